// Client-side design validation mirroring the server's rules, so invalid
// configs are caught inline and never submitted.

import type { ConfigSpec } from './types';

export type FieldErrors = Map<string, string>;

const inOpenUnit = (v: number) => Number.isFinite(v) && v > 0 && v < 1;
const positiveInt = (v: number) => Number.isInteger(v) && v > 0;

export function validateConfig(config: ConfigSpec): FieldErrors {
  const errors: FieldErrors = new Map();
  const j = config.reference_rates.length;

  if (j === 0) {
    errors.set('reference_rates', 'need at least one indication');
  }
  if (config.target_rates.length !== j) {
    errors.set('target_rates', 'must match the number of indications');
  }
  config.reference_rates.forEach((p, i) => {
    if (!inOpenUnit(p)) errors.set(`reference_rates.${i}`, 'must lie strictly between 0 and 1');
  });
  config.target_rates.forEach((p, i) => {
    if (!inOpenUnit(p)) {
      errors.set(`target_rates.${i}`, 'must lie strictly between 0 and 1');
    } else if (inOpenUnit(config.reference_rates[i]) && p <= config.reference_rates[i]) {
      errors.set(`target_rates.${i}`, 'target rate must exceed the reference rate');
    }
  });

  for (const key of ['s1', 's2', 't2', 'w2'] as const) {
    if (!inOpenUnit(config.thresholds[key])) {
      errors.set(`thresholds.${key}`, 'must lie strictly between 0 and 1');
    }
  }
  if (!(Number.isFinite(config.tau2) && config.tau2 > 0)) {
    errors.set('tau2', 'must be positive');
  }

  for (const arm of ['stage1', 'stage2_high', 'stage2_low'] as const) {
    const sizes = config.sample_plan[arm];
    if (sizes.length !== j) {
      errors.set(`sample_plan.${arm}`, 'must match the number of indications');
      continue;
    }
    sizes.forEach((n, i) => {
      if (!positiveInt(n)) errors.set(`sample_plan.${arm}.${i}`, 'must be a positive integer');
    });
  }

  for (const [key, value] of Object.entries(config.hyper)) {
    if (key.startsWith('mu_')) continue;
    if (!(Number.isFinite(value) && value > 0)) {
      errors.set(`hyper.${key}`, 'must be positive');
    }
  }
  return errors;
}

export function validateScenarioRates(high: number[], low: number[]): FieldErrors {
  const errors: FieldErrors = new Map();
  high.forEach((h, i) => {
    const l = low[i];
    if (!(Number.isFinite(h) && h >= 0 && h <= 1)) {
      errors.set(`high.${i}`, 'must lie in [0, 1]');
    }
    if (!(Number.isFinite(l) && l >= 0 && l <= 1)) {
      errors.set(`low.${i}`, 'must lie in [0, 1]');
    } else if (Number.isFinite(h) && l > h) {
      errors.set(`low.${i}`, 'low-dose rate may not exceed the high-dose rate');
    }
  });
  return errors;
}

export function validateCounts(responders: number, enrolled: number): string | null {
  if (!Number.isInteger(enrolled) || enrolled < 0) return 'enrolled must be a non-negative integer';
  if (!Number.isInteger(responders) || responders < 0) return 'responders must be a non-negative integer';
  if (responders > enrolled) return 'responders cannot exceed enrolled';
  return null;
}

export function defaultConfig(): ConfigSpec {
  return {
    reference_rates: [0.1, 0.2, 0.1, 0.2],
    target_rates: [0.4, 0.5, 0.4, 0.5],
    thresholds: { s1: 0.5, s2: 0.5, t2: 0.5, w2: 0.5 },
    tau2: 0.4,
    hyper: {
      mu_eta0: 0,
      sigma2_eta0: 1,
      alpha_eta: 10,
      beta_eta: 1,
      mu_gamma0: 0,
      sigma2_gamma0: 1,
      alpha_gamma: 2,
      beta_gamma: 1,
    },
    sample_plan: {
      stage1: [20, 20, 20, 20],
      stage2_high: [20, 20, 20, 20],
      stage2_low: [20, 20, 20, 20],
    },
  };
}
