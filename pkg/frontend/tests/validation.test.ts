import { describe, expect, it } from 'vitest';

import {
  defaultConfig,
  validateConfig,
  validateCounts,
  validateScenarioRates,
} from '../src/validation';

describe('validateConfig', () => {
  it('accepts the default design', () => {
    expect(validateConfig(defaultConfig()).size).toBe(0);
  });

  it('rejects rates outside (0, 1)', () => {
    const cfg = defaultConfig();
    cfg.reference_rates[0] = 0;
    cfg.target_rates[2] = 1.2;
    const errors = validateConfig(cfg);
    expect(errors.get('reference_rates.0')).toMatch(/between 0 and 1/);
    expect(errors.get('target_rates.2')).toMatch(/between 0 and 1/);
  });

  it('requires target above reference per indication', () => {
    const cfg = defaultConfig();
    cfg.target_rates[1] = 0.2;
    expect(validateConfig(cfg).get('target_rates.1')).toMatch(/exceed/);
  });

  it('rejects out-of-range thresholds (mirrors server rule)', () => {
    const cfg = defaultConfig();
    cfg.thresholds.s1 = 1.2;
    expect(validateConfig(cfg).get('thresholds.s1')).toBeDefined();
  });

  it('rejects non-positive tau2 and sample sizes', () => {
    const cfg = defaultConfig();
    cfg.tau2 = 0;
    cfg.sample_plan.stage1[3] = 0;
    const errors = validateConfig(cfg);
    expect(errors.get('tau2')).toBeDefined();
    expect(errors.get('sample_plan.stage1.3')).toBeDefined();
  });
});

describe('validateScenarioRates', () => {
  it('enforces the monotone dose-response ordering', () => {
    const errors = validateScenarioRates([0.4, 0.2], [0.5, 0.2]);
    expect(errors.get('low.0')).toMatch(/may not exceed/);
    expect(errors.has('low.1')).toBe(false);
  });

  it('allows boundary rates 0 and 1', () => {
    expect(validateScenarioRates([1, 0], [0.5, 0]).size).toBe(0);
  });
});

describe('validateCounts', () => {
  it('rejects responders above enrolled', () => {
    expect(validateCounts(21, 20)).toMatch(/cannot exceed/);
    expect(validateCounts(20, 20)).toBeNull();
    expect(validateCounts(-1, 20)).toMatch(/non-negative/);
  });
});
