// Trial analysis view: observed counts in, posterior probabilities and
// decision badges out. Numbers shown are verbatim from the /analyze response.

import { ApiClient, ApiError } from '../api';
import { FINAL_DECISION_LABELS, fmt } from '../format';
import type { StudioState } from '../state';
import type { AnalysisReport, TrialDataSpec } from '../types';
import { validateCounts } from '../validation';

export interface AnalysisContext {
  api: ApiClient;
  state: StudioState;
  mcmc?: { n_iterations?: number; burn_in?: number };
  seed?: number;
}

interface ArmEntry {
  responders: number;
  enrolled: number;
}

export class AnalysisView {
  stage: 'interim' | 'final' = 'interim';
  stage1: ArmEntry[];
  go: boolean[];
  stage2High: ArmEntry[];
  stage2Low: ArmEntry[];
  report: AnalysisReport | null = null;
  errorMessage: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly ctx: AnalysisContext,
  ) {
    const j = ctx.state.design.reference_rates.length;
    this.stage1 = Array.from({ length: j }, () => ({ responders: 0, enrolled: 20 }));
    this.go = Array.from({ length: j }, () => false);
    this.stage2High = Array.from({ length: j }, () => ({ responders: 0, enrolled: 20 }));
    this.stage2Low = Array.from({ length: j }, () => ({ responders: 0, enrolled: 20 }));
  }

  countErrors(): Map<string, string> {
    const errors = new Map<string, string>();
    this.stage1.forEach((arm, i) => {
      const message = validateCounts(arm.responders, arm.enrolled);
      if (message) errors.set(`stage1.${i}`, message);
    });
    if (this.stage === 'final') {
      this.go.forEach((g, i) => {
        if (!g) return;
        for (const [key, arm] of [
          [`stage2_high.${i}`, this.stage2High[i]],
          [`stage2_low.${i}`, this.stage2Low[i]],
        ] as const) {
          const message = validateCounts(arm.responders, arm.enrolled);
          if (message) errors.set(key, message);
        }
      });
    }
    return errors;
  }

  payload(): TrialDataSpec {
    const data: TrialDataSpec = {
      stage1: this.stage1.map((a) => ({ ...a })),
    };
    if (this.stage === 'final') {
      data.stage1_decisions = this.go.map((g) => (g ? 1 : 0));
      data.stage2 = this.go.map((g, i) =>
        g ? { high: { ...this.stage2High[i] }, low: { ...this.stage2Low[i] } } : null,
      );
    }
    return data;
  }

  async run(): Promise<void> {
    this.errorMessage = null;
    this.report = null;
    try {
      this.report = await this.ctx.api.analyze({
        data: this.payload(),
        stage: this.stage,
        config: this.ctx.state.design,
        settings: this.ctx.mcmc,
        seed: this.ctx.seed,
      });
    } catch (err) {
      this.errorMessage = err instanceof ApiError ? err.message : String(err);
    }
    this.render();
  }

  render(): void {
    this.root.replaceChildren();
    const section = document.createElement('section');
    section.className = 'panel';
    section.dataset.panel = 'analysis';
    const h = document.createElement('h2');
    h.textContent = 'Trial analysis';
    section.appendChild(h);

    const stageSelect = document.createElement('select');
    stageSelect.dataset.field = 'stage';
    for (const stage of ['interim', 'final']) {
      const opt = document.createElement('option');
      opt.value = stage;
      opt.textContent = stage;
      if (stage === this.stage) opt.selected = true;
      stageSelect.appendChild(opt);
    }
    stageSelect.addEventListener('change', () => {
      this.stage = stageSelect.value as 'interim' | 'final';
      this.render();
    });
    section.appendChild(stageSelect);

    const errors = this.countErrors();
    section.appendChild(this.renderCounts(errors));

    const runBtn = document.createElement('button');
    runBtn.dataset.action = 'run-analysis';
    runBtn.textContent = 'Analyze';
    if (errors.size > 0) runBtn.disabled = true;
    runBtn.addEventListener('click', () => void this.run());
    section.appendChild(runBtn);

    if (this.errorMessage) {
      const p = document.createElement('p');
      p.dataset.field = 'analysis-error';
      p.className = 'field-error';
      p.textContent = this.errorMessage;
      section.appendChild(p);
    }
    if (this.report) {
      section.appendChild(this.renderReport(this.report));
    }
    this.root.appendChild(section);
  }

  private armInputs(
    label: string,
    key: string,
    arms: ArmEntry[],
    errors: Map<string, string>,
    enabled: (i: number) => boolean,
  ): HTMLTableRowElement {
    const tr = document.createElement('tr');
    const th = document.createElement('th');
    th.textContent = label;
    tr.appendChild(th);
    arms.forEach((arm, i) => {
      const td = document.createElement('td');
      if (!enabled(i)) {
        td.textContent = '-';
        tr.appendChild(td);
        return;
      }
      for (const field of ['responders', 'enrolled'] as const) {
        const input = document.createElement('input');
        input.type = 'number';
        input.step = '1';
        input.value = String(arm[field]);
        input.dataset.field = `${key}.${i}.${field}`;
        input.addEventListener('input', () => {
          arm[field] = Number(input.value);
          this.render();
        });
        td.appendChild(input);
      }
      const message = errors.get(`${key}.${i}`);
      if (message) {
        const span = document.createElement('span');
        span.className = 'field-error';
        span.dataset.errorFor = `${key}.${i}`;
        span.textContent = message;
        td.appendChild(span);
      }
      tr.appendChild(td);
    });
    return tr;
  }

  private renderCounts(errors: Map<string, string>): HTMLTableElement {
    const table = document.createElement('table');
    table.className = 'editor-grid';
    const header = document.createElement('tr');
    header.appendChild(document.createElement('th'));
    this.stage1.forEach((_, i) => {
      const th = document.createElement('th');
      th.textContent = `Ind ${i + 1}`;
      header.appendChild(th);
    });
    table.appendChild(header);
    table.appendChild(this.armInputs('Stage 1 (y / n)', 'stage1', this.stage1, errors, () => true));
    if (this.stage === 'final') {
      const goRow = document.createElement('tr');
      const th = document.createElement('th');
      th.textContent = 'Went to Stage 2';
      goRow.appendChild(th);
      this.go.forEach((g, i) => {
        const td = document.createElement('td');
        const box = document.createElement('input');
        box.type = 'checkbox';
        box.checked = g;
        box.dataset.field = `go.${i}`;
        box.addEventListener('change', () => {
          this.go[i] = box.checked;
          this.render();
        });
        td.appendChild(box);
        goRow.appendChild(td);
      });
      table.appendChild(goRow);
      table.appendChild(
        this.armInputs('Stage 2 DL-H (y / n)', 'stage2_high', this.stage2High, errors, (i) => this.go[i]),
      );
      table.appendChild(
        this.armInputs('Stage 2 DL-L (y / n)', 'stage2_low', this.stage2Low, errors, (i) => this.go[i]),
      );
    }
    return table;
  }

  private renderReport(report: AnalysisReport): HTMLElement {
    const wrap = document.createElement('div');
    wrap.dataset.field = 'analysis-report';
    const thresholds = this.ctx.state.design.thresholds;
    const table = document.createElement('table');
    table.className = 'oc-table';
    const header = document.createElement('tr');
    for (const text of ['indication', 'probability', 'threshold', 'decision']) {
      const th = document.createElement('th');
      th.textContent = text;
      header.appendChild(th);
    }
    table.appendChild(header);

    const rec = report.decisions;
    rec.go_stage1.forEach((_, i) => {
      if (report.stage === 'interim') {
        const badge = rec.go_stage1[i] === 1 ? 'GO' : 'NG';
        table.appendChild(this.reportRow(
          `Ind ${i + 1}`,
          `P(effect) = ${fmt(rec.posterior_probs.go[i])}`,
          `s1 = ${thresholds.s1}`,
          badge,
          `badge-go.${i}`,
        ));
      } else if (rec.final[i] === null) {
        table.appendChild(this.reportRow(`Ind ${i + 1}`, '-', '-', 'stopped at stage 1', `badge-final.${i}`));
      } else {
        const parts = [
          `PoC-H ${fmt(rec.posterior_probs.poc_high[i])} vs s2=${thresholds.s2}`,
          `PoC-L ${fmt(rec.posterior_probs.poc_low[i])} vs t2=${thresholds.t2}`,
          `gap ${fmt(rec.posterior_probs.do[i])} vs w2=${thresholds.w2}`,
        ];
        table.appendChild(this.reportRow(
          `Ind ${i + 1}`,
          parts.join('; '),
          '',
          `select ${FINAL_DECISION_LABELS[rec.final[i] as number]}`,
          `badge-final.${i}`,
        ));
      }
    });
    wrap.appendChild(table);

    for (const warning of rec.warnings) {
      const p = document.createElement('p');
      p.className = 'field-error';
      p.textContent = warning;
      wrap.appendChild(p);
    }

    const summary = document.createElement('details');
    const caption = document.createElement('summary');
    caption.textContent = 'posterior summaries';
    summary.appendChild(caption);
    const list = document.createElement('pre');
    list.dataset.field = 'posterior-summaries';
    list.textContent = Object.entries(report.posterior_summaries)
      .map(([name, s]) => `${name}: mean ${fmt(s.mean)} sd ${fmt(s.sd)} [${fmt(s['q2.5'])}, ${fmt(s['q97.5'])}]`)
      .join('\n');
    summary.appendChild(list);
    wrap.appendChild(summary);
    return wrap;
  }

  private reportRow(ind: string, prob: string, threshold: string, badge: string, badgeKey: string): HTMLTableRowElement {
    const tr = document.createElement('tr');
    for (const text of [ind, prob, threshold]) {
      const td = document.createElement('td');
      td.textContent = text;
      tr.appendChild(td);
    }
    const td = document.createElement('td');
    td.dataset.badge = badgeKey;
    td.textContent = badge;
    tr.appendChild(td);
    return tr;
  }
}

export function renderAnalysis(root: HTMLElement, ctx: AnalysisContext): AnalysisView {
  return new AnalysisView(root, ctx);
}
