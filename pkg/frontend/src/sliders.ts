// Parameter panel: sliders mirroring the tunable edit parameters, an apply
// button that submits overrides, A/B pinning, and an inline error row that
// never clobbers slider state.

import {
  SLIDER_SPECS,
  SessionState,
  SliderValues,
  energyDelta,
  overridesFrom,
  validateSliders,
} from './state.js';

export interface SliderPanelHooks {
  onApply: (overrides: Record<string, number>) => void;
  onPin: () => void;
}

export function renderSliderPanel(
  container: HTMLElement,
  state: SessionState,
  hooks: SliderPanelHooks,
): void {
  container.replaceChildren();
  const form = document.createElement('form');
  form.className = 'param-panel';
  form.addEventListener('submit', (event) => event.preventDefault());

  for (const spec of SLIDER_SPECS) {
    const row = document.createElement('label');
    row.className = 'param-row';
    const name = document.createElement('span');
    name.textContent = spec.label;
    const slider = document.createElement('input');
    slider.type = 'range';
    slider.name = spec.key;
    slider.min = String(spec.min);
    slider.max = String(spec.max);
    slider.step = String(spec.step);
    slider.value = String(state.sliders[spec.key]);
    const readout = document.createElement('output');
    readout.textContent = String(state.sliders[spec.key]);
    slider.addEventListener('input', () => {
      state.sliders[spec.key] = Number(slider.value);
      readout.textContent = slider.value;
    });
    row.append(name, slider, readout);
    form.appendChild(row);
  }

  const error = document.createElement('div');
  error.className = 'param-error';
  error.hidden = true;

  const delta = document.createElement('div');
  delta.className = 'energy-delta';
  renderDelta(delta, state);

  const apply = document.createElement('button');
  apply.type = 'submit';
  apply.className = 'apply';
  apply.textContent = 'Apply';
  apply.addEventListener('click', () => {
    const message = validateSliders(state.sliders);
    if (message) {
      error.hidden = false;
      error.textContent = message;
      return;
    }
    error.hidden = true;
    hooks.onApply(overridesFrom(state.sliders));
  });

  const pin = document.createElement('button');
  pin.type = 'button';
  pin.className = 'pin';
  pin.textContent = 'Pin for compare';
  pin.addEventListener('click', () => {
    hooks.onPin();
    renderDelta(delta, state);
  });

  form.append(apply, pin, error, delta);
  container.appendChild(form);
}

export function showServerRejection(container: HTMLElement, message: string): void {
  const error = container.querySelector<HTMLElement>('.param-error');
  if (error) {
    error.hidden = false;
    error.textContent = message;
  }
}

export function renderDelta(element: HTMLElement, state: SessionState): void {
  const value = energyDelta(state);
  if (value === null) {
    element.textContent = state.pinned ? '' : 'no pinned solve';
    return;
  }
  const sign = value > 0 ? '+' : '';
  element.textContent = `energy vs pinned: ${sign}${value.toFixed(4)}`;
}

export function currentSliderValues(state: SessionState): SliderValues {
  return { ...state.sliders };
}
