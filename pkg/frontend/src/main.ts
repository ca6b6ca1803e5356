// App bootstrap: three tabs (designer, calibration, analysis) over one
// shared state and one API client.

import { ApiClient, FetchLike } from './api';
import { StudioState } from './state';
import { AnalysisView, renderAnalysis } from './views/analysis';
import { CalibrationView, renderCalibration } from './views/calibration';
import { DesignerView, renderDesigner } from './views/designer';

export interface AppOptions {
  baseUrl?: string;
  fetchFn?: FetchLike;
  pollIntervalMs?: number;
  mcmc?: { n_iterations?: number; burn_in?: number };
  seed?: number;
}

export interface App {
  state: StudioState;
  api: ApiClient;
  designer: DesignerView;
  calibration: CalibrationView;
  analysis: AnalysisView;
  showTab: (name: TabName) => void;
  ready: Promise<void>;
}

export type TabName = 'designer' | 'calibration' | 'analysis';

export function initApp(root: HTMLElement, options: AppOptions = {}): App {
  const api = new ApiClient(options.baseUrl ?? '', options.fetchFn);
  const state = new StudioState();

  root.replaceChildren();
  const nav = document.createElement('nav');
  const panes: Record<TabName, HTMLElement> = {
    designer: document.createElement('div'),
    calibration: document.createElement('div'),
    analysis: document.createElement('div'),
  };
  const buttons: Partial<Record<TabName, HTMLButtonElement>> = {};

  const showTab = (name: TabName) => {
    for (const [tab, pane] of Object.entries(panes) as [TabName, HTMLElement][]) {
      pane.style.display = tab === name ? '' : 'none';
      buttons[tab]?.classList.toggle('active', tab === name);
    }
  };

  for (const name of ['designer', 'calibration', 'analysis'] as TabName[]) {
    const btn = document.createElement('button');
    btn.textContent = name;
    btn.dataset.tab = name;
    btn.addEventListener('click', () => showTab(name));
    buttons[name] = btn;
    nav.appendChild(btn);
    panes[name].dataset.pane = name;
    root.appendChild(panes[name]);
  }
  root.insertBefore(nav, root.firstChild);

  const designer = renderDesigner(panes.designer, {
    api,
    state,
    pollIntervalMs: options.pollIntervalMs,
    mcmc: options.mcmc,
  });
  const calibration = renderCalibration(panes.calibration, { api, state });
  const analysis = renderAnalysis(panes.analysis, {
    api,
    state,
    mcmc: options.mcmc,
    seed: options.seed,
  });

  const ready = Promise.all([designer.init(), calibration.init()]).then(() => {
    analysis.render();
    showTab('designer');
  });

  return { state, api, designer, calibration, analysis, showTab, ready };
}
