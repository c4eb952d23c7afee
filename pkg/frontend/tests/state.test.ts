import { describe, expect, it } from 'vitest';

import {
  defaultSliders,
  energyDelta,
  initialState,
  overridesFrom,
  pinCurrent,
  validateSliders,
} from '../src/state.js';
import { fixturePayload } from './fixtures.js';

describe('validateSliders', () => {
  it('accepts the defaults', () => {
    expect(validateSliders(defaultSliders())).toBeNull();
  });

  it('rejects l >= m', () => {
    const values = { ...defaultSliders(), l: 7, m: 7 };
    expect(validateSliders(values)).toMatch(/l/);
  });

  it('rejects negative weights', () => {
    const values = { ...defaultSliders(), gamma1: -1 };
    expect(validateSliders(values)).toMatch(/gamma1/);
  });

  it('rejects non-finite values', () => {
    const values = { ...defaultSliders(), lambda_c: Number.NaN };
    expect(validateSliders(values)).toMatch(/lambda_c/);
  });
});

describe('session state', () => {
  it('overrides mirror the slider values', () => {
    const values = { ...defaultSliders(), m: 3 };
    expect(overridesFrom(values)).toEqual(values);
  });

  it('energy delta compares current against pinned', () => {
    const state = initialState();
    expect(energyDelta(state)).toBeNull();
    state.current = fixturePayload();
    pinCurrent(state);
    expect(energyDelta(state)).toBe(0);
    state.current = { ...fixturePayload(), total_energy: 100.456 };
    expect(energyDelta(state)).toBeCloseTo(-23.0);
  });

  it('pinned payload is immutable', () => {
    const state = initialState();
    state.current = fixturePayload();
    pinCurrent(state);
    expect(Object.isFrozen(state.pinned)).toBe(true);
    expect(() => {
      (state.pinned as { total_energy: number }).total_energy = 0;
    }).toThrow();
  });
});
