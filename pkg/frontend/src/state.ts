// Central studio state: the editable design, the scenario grid, calibration
// inputs, and the submitted-job list. Views subscribe and re-render; the
// state holds API payloads verbatim and computes nothing statistical.

import type { CalibrationResult, ConfigSpec, Job } from './types';
import { defaultConfig } from './validation';

export interface TrackedJob extends Job {
  label: string;
  submittedAt: number;
}

export interface CalibrationState {
  delta: number;
  p2Candidates: number[];
  grid: { min: number; max: number; step: number };
  lastResult: CalibrationResult | null;
}

type Listener = () => void;

export class StudioState {
  design: ConfigSpec = defaultConfig();
  scenarioName = 'GN';
  highRates: number[] = [0.1, 0.2, 0.1, 0.2];
  lowRates: number[] = [0.1, 0.2, 0.1, 0.2];
  nReplicates = 1000;
  seed = 42;
  calibration: CalibrationState = {
    delta: 0.1,
    p2Candidates: [0.3, 0.4, 0.5],
    grid: { min: 0.1, max: 1.5, step: 0.1 },
    lastResult: null,
  };
  jobs: TrackedJob[] = [];
  dirty = false;

  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  notify(): void {
    for (const listener of this.listeners) listener();
  }

  touch(): void {
    this.dirty = true;
    this.notify();
  }

  loadScenario(name: string, high: number[], low: number[]): void {
    this.scenarioName = name;
    this.highRates = [...high];
    this.lowRates = [...low];
    this.touch();
  }

  trackJob(job: Job, label: string): void {
    this.jobs = [{ ...job, label, submittedAt: Date.now() }, ...this.jobs];
    this.notify();
  }

  // reconcile by id: server state wins, client-only fields are preserved
  updateJob(job: Job): void {
    let found = false;
    this.jobs = this.jobs.map((j) => {
      if (j.id !== job.id) return j;
      found = true;
      return { ...j, ...job };
    });
    if (found) this.notify();
  }

  completedJobs(): TrackedJob[] {
    return this.jobs.filter((j) => j.status === 'done' && j.result);
  }

  exportDesign(): string {
    return JSON.stringify(this.design, null, 2);
  }

  importDesign(text: string): void {
    const parsed = JSON.parse(text) as ConfigSpec;
    if (!Array.isArray(parsed.reference_rates)) {
      throw new Error('not a design config: missing reference_rates');
    }
    this.design = parsed;
    this.touch();
  }
}
