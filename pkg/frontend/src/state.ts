// Session state for the tuning loop: current/pinned payloads and slider values.

import type { TimelinePayload } from './types.js';

export interface SliderValues {
  l: number;
  m: number;
  gamma1: number;
  gamma2: number;
  lambda_trans: number;
  lambda_c: number;
  lambda_sal: number;
  lambda_sp: number;
}

export const SLIDER_SPECS: Array<{
  key: keyof SliderValues;
  label: string;
  min: number;
  max: number;
  step: number;
}> = [
  { key: 'l', label: 'min shot length l (s)', min: 0.2, max: 5, step: 0.1 },
  { key: 'm', label: 'target shot length m (s)', min: 1, max: 20, step: 0.5 },
  { key: 'gamma1', label: 'fast-cut penalty g1', min: 0, max: 300, step: 5 },
  { key: 'gamma2', label: 'long-hold penalty g2', min: 0, max: 100, step: 1 },
  { key: 'lambda_trans', label: 'transition penalty', min: 0, max: 50, step: 1 },
  { key: 'lambda_c', label: 'dialogue weight', min: 0, max: 5, step: 0.1 },
  { key: 'lambda_sal', label: 'saliency weight', min: 0, max: 5, step: 0.1 },
  { key: 'lambda_sp', label: 'speaker weight', min: 0, max: 5, step: 0.1 },
];

export function defaultSliders(): SliderValues {
  return {
    l: 1,
    m: 7,
    gamma1: 100,
    gamma2: 10,
    lambda_trans: 5,
    lambda_c: 1,
    lambda_sal: 1,
    lambda_sp: 1,
  };
}

/** Parameter invariants enforced before any request leaves the browser. */
export function validateSliders(values: SliderValues): string | null {
  for (const spec of SLIDER_SPECS) {
    const value = values[spec.key];
    if (!Number.isFinite(value)) {
      return `${spec.key} must be a finite number`;
    }
    if (spec.key !== 'l' && spec.key !== 'm' && value < 0) {
      return `${spec.key} must be >= 0`;
    }
  }
  if (values.l < 0 || values.m < 0) {
    return 'shot lengths must be >= 0';
  }
  if (!(values.l < values.m)) {
    return 'minimum shot length l must stay below target length m';
  }
  return null;
}

export function overridesFrom(values: SliderValues): Record<string, number> {
  return { ...values };
}

export interface SessionState {
  projectId: string | null;
  current: TimelinePayload | null;
  pinned: TimelinePayload | null;
  sliders: SliderValues;
  cursor: number;
}

export function initialState(): SessionState {
  return {
    projectId: null,
    current: null,
    pinned: null,
    sliders: defaultSliders(),
    cursor: 0,
  };
}

/** Pin the current payload for A/B comparison; the pin is frozen. */
export function pinCurrent(state: SessionState): void {
  if (state.current) {
    state.pinned = Object.freeze(state.current);
  }
}

/** Energy of the current solve minus the pinned one (negative = improvement). */
export function energyDelta(state: SessionState): number | null {
  if (!state.current || !state.pinned) {
    return null;
  }
  return state.current.total_energy - state.pinned.total_energy;
}
