// Scenario-and-threshold editor plus the operating-characteristics
// comparison table over completed simulation runs.

import { ApiClient, ApiError } from '../api';
import { fmt, fmtPercentProgress } from '../format';
import { pollJob } from '../poll';
import type { StudioState } from '../state';
import type { OperatingCharacteristics, ScenarioSpec } from '../types';
import { validateConfig, validateScenarioRates } from '../validation';

export interface DesignerContext {
  api: ApiClient;
  state: StudioState;
  pollIntervalMs?: number;
  mcmc?: { n_iterations?: number; burn_in?: number };
}

interface MetricRow {
  key: string;
  label: string;
  value: (oc: OperatingCharacteristics) => number | null;
}

export function metricRows(j: number): MetricRow[] {
  const rows: MetricRow[] = [
    { key: 'stage1_type1_fw', label: 'Stage-1 FW type I', value: (oc) => oc.stage1_type1_fw },
    { key: 'stage1_type2_fw', label: 'Stage-1 FW type II', value: (oc) => oc.stage1_type2_fw },
    { key: 'stage2_type1_fw', label: 'Stage-2 FW type I', value: (oc) => oc.stage2_type1_fw },
    { key: 'perfect', label: 'Perfect', value: (oc) => oc.perfect },
    { key: 'poc', label: 'PoC', value: (oc) => oc.poc },
    { key: 'do', label: 'DO', value: (oc) => oc.do },
  ];
  for (let i = 0; i < j; i += 1) {
    rows.push({
      key: `go_rate.${i}`,
      label: `GO rate (ind ${i + 1})`,
      value: (oc) => oc.go_rate[i] ?? null,
    });
    rows.push({
      key: `avg_n.${i}`,
      label: `Avg sample size (ind ${i + 1})`,
      value: (oc) => oc.avg_sample_size[i] ?? null,
    });
  }
  return rows;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function numberInput(
  value: number,
  attrs: Record<string, string>,
  onChange: (v: number) => void,
): HTMLInputElement {
  const input = el('input', { type: 'number', ...attrs });
  input.value = String(value);
  input.addEventListener('input', () => onChange(Number(input.value)));
  return input;
}

export class DesignerView {
  private presets: ScenarioSpec[] = [];
  private sortColumn: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly ctx: DesignerContext,
  ) {}

  async init(): Promise<void> {
    this.presets = await this.ctx.api.scenarios();
    this.ctx.state.subscribe(() => this.render());
    this.render();
  }

  render(): void {
    const { state } = this.ctx;
    const configErrors = validateConfig(state.design);
    const rateErrors = validateScenarioRates(state.highRates, state.lowRates);
    this.root.replaceChildren();

    this.root.appendChild(this.renderDesignEditor(configErrors));
    this.root.appendChild(this.renderScenarioEditor(rateErrors));
    this.root.appendChild(this.renderRunControls(configErrors.size + rateErrors.size > 0));
    this.root.appendChild(this.renderJobList());
    this.root.appendChild(this.renderComparisonTable());
  }

  private fieldError(errors: Map<string, string>, key: string): HTMLElement | null {
    const message = errors.get(key);
    if (!message) return null;
    return el('span', { class: 'field-error', 'data-error-for': key }, message);
  }

  private renderDesignEditor(errors: Map<string, string>): HTMLElement {
    const { state } = this.ctx;
    const design = state.design;
    const j = design.reference_rates.length;
    const section = el('section', { class: 'panel', 'data-panel': 'design' });
    section.appendChild(el('h2', {}, 'Design'));

    const grid = el('table', { class: 'editor-grid' });
    const header = el('tr');
    header.appendChild(el('th', {}, ''));
    for (let i = 0; i < j; i += 1) header.appendChild(el('th', {}, `Ind ${i + 1}`));
    grid.appendChild(header);

    const rows: Array<{ label: string; values: number[]; key: string; step: string }> = [
      { label: 'Reference rate p0', values: design.reference_rates, key: 'reference_rates', step: '0.05' },
      { label: 'Target rate p1*', values: design.target_rates, key: 'target_rates', step: '0.05' },
      { label: 'Stage-1 n', values: design.sample_plan.stage1, key: 'sample_plan.stage1', step: '1' },
      { label: 'Stage-2 n (DL-H)', values: design.sample_plan.stage2_high, key: 'sample_plan.stage2_high', step: '1' },
      { label: 'Stage-2 n (DL-L)', values: design.sample_plan.stage2_low, key: 'sample_plan.stage2_low', step: '1' },
    ];
    for (const row of rows) {
      const tr = el('tr');
      tr.appendChild(el('th', {}, row.label));
      row.values.forEach((v, i) => {
        const td = el('td');
        const input = numberInput(v, { step: row.step, 'data-field': `${row.key}.${i}` }, (value) => {
          row.values[i] = value;
          this.ctx.state.touch();
        });
        td.appendChild(input);
        const err = this.fieldError(errors, `${row.key}.${i}`);
        if (err) td.appendChild(err);
        tr.appendChild(td);
      });
      grid.appendChild(tr);
    }
    section.appendChild(grid);

    const thresholds = el('div', { class: 'threshold-row' });
    for (const key of ['s1', 's2', 't2', 'w2'] as const) {
      const label = el('label', {}, `${key} `);
      label.appendChild(
        numberInput(this.ctx.state.design.thresholds[key], { step: '0.05', 'data-field': `thresholds.${key}` }, (v) => {
          this.ctx.state.design.thresholds[key] = v;
          this.ctx.state.touch();
        }),
      );
      const err = this.fieldError(errors, `thresholds.${key}`);
      if (err) label.appendChild(err);
      thresholds.appendChild(label);
    }
    const tauLabel = el('label', {}, 'tau2 ');
    tauLabel.appendChild(
      numberInput(design.tau2, { step: '0.1', 'data-field': 'tau2' }, (v) => {
        this.ctx.state.design.tau2 = v;
        this.ctx.state.touch();
      }),
    );
    const tauErr = this.fieldError(errors, 'tau2');
    if (tauErr) tauLabel.appendChild(tauErr);
    thresholds.appendChild(tauLabel);
    section.appendChild(thresholds);

    const io = el('div', { class: 'design-io' });
    const exportBtn = el('button', { 'data-action': 'export-design' }, 'Export design JSON');
    exportBtn.addEventListener('click', () => {
      const area = this.root.querySelector<HTMLTextAreaElement>('[data-field="design-json"]');
      if (area) area.value = this.ctx.state.exportDesign();
    });
    const importBtn = el('button', { 'data-action': 'import-design' }, 'Import design JSON');
    importBtn.addEventListener('click', () => {
      const area = this.root.querySelector<HTMLTextAreaElement>('[data-field="design-json"]');
      if (!area) return;
      try {
        this.ctx.state.importDesign(area.value);
      } catch (err) {
        area.setCustomValidity(String(err));
        area.reportValidity?.();
      }
    });
    io.appendChild(exportBtn);
    io.appendChild(importBtn);
    io.appendChild(el('textarea', { 'data-field': 'design-json', rows: '4' }));
    section.appendChild(io);
    return section;
  }

  private renderScenarioEditor(errors: Map<string, string>): HTMLElement {
    const { state } = this.ctx;
    const section = el('section', { class: 'panel', 'data-panel': 'scenario' });
    section.appendChild(el('h2', {}, 'Scenario (true rates)'));

    const select = el('select', { 'data-field': 'preset' });
    select.appendChild(el('option', { value: '' }, 'load preset...'));
    for (const preset of this.presets) {
      select.appendChild(el('option', { value: preset.name }, preset.name));
    }
    select.addEventListener('change', () => {
      const preset = this.presets.find((p) => p.name === select.value);
      if (preset) {
        state.loadScenario(preset.name, preset.true_rates[0], preset.true_rates[1]);
      }
    });
    section.appendChild(select);

    const table = el('table', { class: 'editor-grid' });
    const header = el('tr');
    header.appendChild(el('th', {}, ''));
    state.highRates.forEach((_, i) => header.appendChild(el('th', {}, `Ind ${i + 1}`)));
    table.appendChild(header);
    const doseRows: Array<{ label: string; values: number[]; key: 'high' | 'low' }> = [
      { label: 'DL-H true rate', values: state.highRates, key: 'high' },
      { label: 'DL-L true rate', values: state.lowRates, key: 'low' },
    ];
    for (const row of doseRows) {
      const tr = el('tr');
      tr.appendChild(el('th', {}, row.label));
      row.values.forEach((v, i) => {
        const td = el('td');
        const input = numberInput(v, { step: '0.05', 'data-field': `scenario.${row.key}.${i}` }, (value) => {
          row.values[i] = value;
          state.scenarioName = 'custom';
          state.touch();
        });
        td.appendChild(input);
        const err = this.fieldError(errors, `${row.key}.${i}`);
        if (err) td.appendChild(err);
        tr.appendChild(td);
      });
      table.appendChild(tr);
    }
    section.appendChild(table);
    section.appendChild(el('p', { 'data-field': 'scenario-name' }, `scenario: ${state.scenarioName}`));
    return section;
  }

  private renderRunControls(hasErrors: boolean): HTMLElement {
    const { state } = this.ctx;
    const section = el('section', { class: 'panel', 'data-panel': 'run' });
    const repsLabel = el('label', {}, 'replicates ');
    repsLabel.appendChild(
      numberInput(state.nReplicates, { step: '100', 'data-field': 'n_replicates' }, (v) => {
        state.nReplicates = v;
        state.touch();
      }),
    );
    const seedLabel = el('label', {}, 'seed ');
    seedLabel.appendChild(
      numberInput(state.seed, { step: '1', 'data-field': 'seed' }, (v) => {
        state.seed = v;
        state.touch();
      }),
    );
    const runBtn = el('button', { 'data-action': 'run-simulation' }, 'Run simulation');
    if (hasErrors || state.nReplicates < 1) runBtn.setAttribute('disabled', 'disabled');
    runBtn.addEventListener('click', () => void this.submit());
    section.appendChild(repsLabel);
    section.appendChild(seedLabel);
    section.appendChild(runBtn);
    section.appendChild(el('span', { 'data-field': 'run-error', class: 'field-error' }));
    return section;
  }

  async submit(): Promise<void> {
    const { api, state } = this.ctx;
    try {
      const id = await api.submitSimulation({
        scenario: {
          name: state.scenarioName,
          true_rates: [state.highRates, state.lowRates],
        },
        config: state.design,
        settings: this.ctx.mcmc,
        n_replicates: state.nReplicates,
        seed: state.seed,
      });
      const job = await api.getJob(id);
      state.trackJob(job, `${state.scenarioName} seed=${state.seed}`);
      const done = await pollJob(api, id, {
        intervalMs: this.ctx.pollIntervalMs,
        onUpdate: (update) => state.updateJob(update),
      });
      state.updateJob(done);
    } catch (err) {
      const span = this.root.querySelector('[data-field="run-error"]');
      if (span) span.textContent = err instanceof ApiError ? err.message : String(err);
    }
  }

  private renderJobList(): HTMLElement {
    const section = el('section', { class: 'panel', 'data-panel': 'jobs' });
    section.appendChild(el('h2', {}, 'Simulation jobs'));
    const list = el('ul', { 'data-field': 'job-list' });
    for (const job of this.ctx.state.jobs) {
      const item = el('li', { 'data-job-id': job.id, 'data-status': job.status });
      item.textContent = `${job.label}: ${job.status} (${fmtPercentProgress(job.progress)})`;
      if (job.error) item.textContent += ` - ${job.error}`;
      list.appendChild(item);
    }
    section.appendChild(list);
    return section;
  }

  private renderComparisonTable(): HTMLElement {
    const section = el('section', { class: 'panel', 'data-panel': 'results' });
    section.appendChild(el('h2', {}, 'Operating characteristics'));
    const completed = this.ctx.state.completedJobs();
    if (completed.length === 0) {
      section.appendChild(el('p', {}, 'no completed runs yet'));
      return section;
    }
    const j = this.ctx.state.design.reference_rates.length;
    let rows = metricRows(j);
    if (this.sortColumn) {
      const column = this.sortColumn;
      const run = completed.find((c) => c.id === column);
      if (run?.result) {
        const oc = run.result;
        rows = [...rows].sort((a, b) => {
          const av = a.value(oc);
          const bv = b.value(oc);
          if (av === null) return 1;
          if (bv === null) return -1;
          return bv - av;
        });
      }
    }

    const table = el('table', { class: 'oc-table', 'data-field': 'oc-table' });
    const header = el('tr');
    const metricHeader = el('th', {}, 'metric');
    metricHeader.addEventListener('click', () => {
      this.sortColumn = null;
      this.render();
    });
    header.appendChild(metricHeader);
    for (const run of completed) {
      const th = el('th', { 'data-run-column': run.id }, `${run.label} (n=${run.result?.n_replicates})`);
      th.addEventListener('click', () => {
        this.sortColumn = run.id;
        this.render();
      });
      header.appendChild(th);
    }
    table.appendChild(header);
    for (const row of rows) {
      const tr = el('tr', { 'data-metric': row.key });
      tr.appendChild(el('td', {}, row.label));
      for (const run of completed) {
        tr.appendChild(
          el('td', { 'data-cell': `${row.key}:${run.id}` }, fmt(run.result ? row.value(run.result) : null, 4)),
        );
      }
      table.appendChild(tr);
    }
    section.appendChild(table);
    return section;
  }
}

export function renderDesigner(root: HTMLElement, ctx: DesignerContext): DesignerView {
  return new DesignerView(root, ctx);
}
