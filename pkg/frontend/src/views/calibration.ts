// Dose-gap threshold explorer: the curve family delta(tau2, p2) with a
// draggable horizontal line at the target gap and vertical lines at the
// plausible low-dose rates. The feasible tau2 shown is always the server's.

import { ApiClient, ApiError } from '../api';
import { parseNumberList } from '../format';
import type { StudioState } from '../state';
import type { Curve } from '../types';

const WIDTH = 640;
const HEIGHT = 360;
const MARGIN = { left: 50, right: 16, top: 12, bottom: 34 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;
const DELTA_MAX = 0.4;

const svgNS = 'http://www.w3.org/2000/svg';

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(svgNS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

const xScale = (p2: number) => MARGIN.left + p2 * PLOT_W;
const yScale = (delta: number) => MARGIN.top + (1 - Math.min(delta, DELTA_MAX) / DELTA_MAX) * PLOT_H;
const yInvert = (py: number) => (1 - (py - MARGIN.top) / PLOT_H) * DELTA_MAX;

export interface CalibrationContext {
  api: ApiClient;
  state: StudioState;
}

export class CalibrationView {
  private curves: Curve[] = [];
  private pending = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly ctx: CalibrationContext,
  ) {}

  async init(): Promise<void> {
    const grid = this.gridValues();
    this.curves = await this.ctx.api.curves(grid);
    await this.recalibrate();
    this.render();
  }

  gridValues(): number[] {
    const { min, max, step } = this.ctx.state.calibration.grid;
    const values: number[] = [];
    for (let k = 0; ; k += 1) {
      const v = Number((min + k * step).toFixed(10));
      if (v > max + 1e-12) break;
      values.push(v);
    }
    return values;
  }

  async recalibrate(): Promise<void> {
    const { api, state } = this.ctx;
    const cal = state.calibration;
    if (cal.p2Candidates.length === 0) {
      cal.lastResult = null;
      return;
    }
    this.pending = true;
    try {
      cal.lastResult = await api.calibrate({
        delta: cal.delta,
        p2: cal.p2Candidates,
        grid: cal.grid,
      });
    } catch (err) {
      if (!(err instanceof ApiError)) throw err;
      cal.lastResult = null;
    } finally {
      this.pending = false;
    }
  }

  render(): void {
    const { state } = this.ctx;
    const cal = state.calibration;
    this.root.replaceChildren();

    const section = document.createElement('section');
    section.className = 'panel';
    section.dataset.panel = 'calibration';

    const heading = document.createElement('h2');
    heading.textContent = 'Dose-gap threshold calibration';
    section.appendChild(heading);

    const controls = document.createElement('div');
    const deltaLabel = document.createElement('label');
    deltaLabel.textContent = 'minimum gap delta ';
    const deltaInput = document.createElement('input');
    deltaInput.type = 'number';
    deltaInput.step = '0.01';
    deltaInput.value = String(cal.delta);
    deltaInput.dataset.field = 'delta';
    deltaInput.addEventListener('change', () => {
      cal.delta = Number(deltaInput.value);
      void this.recalibrate().then(() => this.render());
    });
    deltaLabel.appendChild(deltaInput);
    controls.appendChild(deltaLabel);

    const p2Label = document.createElement('label');
    p2Label.textContent = ' plausible low-dose rates ';
    const p2Input = document.createElement('input');
    p2Input.type = 'text';
    p2Input.value = cal.p2Candidates.join(',');
    p2Input.dataset.field = 'p2-candidates';
    p2Input.addEventListener('change', () => {
      cal.p2Candidates = parseNumberList(p2Input.value).filter((v) => v > 0 && v < 1);
      void this.recalibrate().then(() => this.render());
    });
    p2Label.appendChild(p2Input);
    controls.appendChild(p2Label);
    section.appendChild(controls);

    const status = document.createElement('p');
    status.dataset.field = 'calibration-status';
    if (cal.p2Candidates.length === 0) {
      status.textContent = 'enter at least one plausible low-dose rate';
    } else if (cal.lastResult === null) {
      status.textContent = this.pending ? 'calibrating...' : 'calibration unavailable';
    } else if (cal.lastResult.tau2 === null) {
      status.textContent = 'no feasible tau2 on the grid for this gap';
    } else {
      status.textContent = `max feasible tau2 = ${cal.lastResult.tau2}`;
    }
    section.appendChild(status);

    section.appendChild(this.renderChart());

    const apply = document.createElement('button');
    apply.dataset.action = 'apply-tau2';
    apply.textContent = 'Apply tau2 to design';
    const feasible = cal.lastResult?.tau2 ?? null;
    if (feasible === null || cal.p2Candidates.length === 0) {
      apply.disabled = true;
      const hint = document.createElement('span');
      hint.dataset.field = 'apply-hint';
      hint.textContent =
        cal.p2Candidates.length === 0
          ? ' (needs low-dose rate candidates)'
          : ' (no feasible value to apply)';
      section.appendChild(apply);
      section.appendChild(hint);
    } else {
      apply.addEventListener('click', () => {
        state.design.tau2 = feasible;
        state.touch();
        this.render();
      });
      section.appendChild(apply);
    }

    const applied = document.createElement('p');
    applied.dataset.field = 'design-tau2';
    applied.textContent = `design tau2: ${state.design.tau2}`;
    section.appendChild(applied);

    this.root.appendChild(section);
  }

  private renderChart(): SVGElement {
    const cal = this.ctx.state.calibration;
    const chosen = cal.lastResult?.tau2 ?? null;
    const svg = svgEl('svg', {
      viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
      width: String(WIDTH),
      height: String(HEIGHT),
      'data-field': 'calibration-chart',
    });

    svg.appendChild(svgEl('rect', {
      x: String(MARGIN.left), y: String(MARGIN.top),
      width: String(PLOT_W), height: String(PLOT_H),
      fill: 'none', stroke: '#999',
    }));

    for (const curve of this.curves) {
      const points = curve.points
        .map((p) => `${xScale(p.p2).toFixed(1)},${yScale(p.delta).toFixed(1)}`)
        .join(' ');
      svg.appendChild(svgEl('polyline', {
        points,
        fill: 'none',
        stroke: curve.tau2 === chosen ? '#c62828' : '#90a4ae',
        'stroke-width': curve.tau2 === chosen ? '2.5' : '1',
        'data-curve-tau2': String(curve.tau2),
      }));
    }

    for (const p2 of cal.p2Candidates) {
      svg.appendChild(svgEl('line', {
        x1: String(xScale(p2)), x2: String(xScale(p2)),
        y1: String(MARGIN.top), y2: String(MARGIN.top + PLOT_H),
        stroke: '#1565c0', 'stroke-dasharray': '4 3',
        'data-p2-line': String(p2),
      }));
    }

    const deltaY = yScale(cal.delta);
    const deltaLine = svgEl('line', {
      x1: String(MARGIN.left), x2: String(MARGIN.left + PLOT_W),
      y1: String(deltaY), y2: String(deltaY),
      stroke: '#2e7d32', 'stroke-width': '2', cursor: 'ns-resize',
      'data-field': 'delta-line',
    });
    svg.appendChild(deltaLine);

    // drag the horizontal line to change the target gap
    let dragging = false;
    const onMove = (event: PointerEvent) => {
      if (!dragging) return;
      const rect = (svg as unknown as { getBoundingClientRect: () => DOMRect }).getBoundingClientRect();
      const py = ((event.clientY - rect.top) / Math.max(rect.height, 1)) * HEIGHT;
      const value = Math.min(Math.max(yInvert(py), 0.005), DELTA_MAX);
      cal.delta = Number(value.toFixed(3));
      deltaLine.setAttribute('y1', String(yScale(cal.delta)));
      deltaLine.setAttribute('y2', String(yScale(cal.delta)));
    };
    deltaLine.addEventListener('pointerdown', () => {
      dragging = true;
    });
    svg.addEventListener('pointermove', onMove);
    const finish = () => {
      if (!dragging) return;
      dragging = false;
      void this.recalibrate().then(() => this.render());
    };
    svg.addEventListener('pointerup', finish);
    svg.addEventListener('pointerleave', finish);

    const xLabel = svgEl('text', {
      x: String(MARGIN.left + PLOT_W / 2), y: String(HEIGHT - 8),
      'text-anchor': 'middle', 'font-size': '12',
    });
    xLabel.textContent = 'low-dose response rate p2';
    svg.appendChild(xLabel);
    const yLabel = svgEl('text', {
      x: '14', y: String(MARGIN.top + PLOT_H / 2),
      transform: `rotate(-90 14 ${MARGIN.top + PLOT_H / 2})`,
      'text-anchor': 'middle', 'font-size': '12',
    });
    yLabel.textContent = 'implied rate gap';
    svg.appendChild(yLabel);
    return svg;
  }
}

export function renderCalibration(root: HTMLElement, ctx: CalibrationContext): CalibrationView {
  return new CalibrationView(root, ctx);
}
