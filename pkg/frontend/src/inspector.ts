// Frame inspector: every rush rect drawn as an outline at the scrubbed frame,
// the selected rush emphasized, over a neutral stage the size of the frame.

import type { FrameRectsResponse } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export function renderInspector(
  container: HTMLElement,
  rects: FrameRectsResponse | null,
  frameWidth: number,
  frameHeight: number,
): void {
  container.replaceChildren();
  if (!rects) {
    const empty = document.createElement('div');
    empty.className = 'inspector-empty';
    empty.textContent = 'Scrub to a frame to inspect rush framings.';
    container.appendChild(empty);
    return;
  }
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('class', 'inspector');
  svg.setAttribute('viewBox', `0 0 ${frameWidth} ${frameHeight}`);
  svg.setAttribute('data-frame', String(rects.frame));

  const stage = document.createElementNS(SVG_NS, 'rect');
  stage.setAttribute('class', 'stage');
  stage.setAttribute('x', '0');
  stage.setAttribute('y', '0');
  stage.setAttribute('width', String(frameWidth));
  stage.setAttribute('height', String(frameHeight));
  svg.appendChild(stage);

  for (const rect of rects.rects) {
    const outline = document.createElementNS(SVG_NS, 'rect');
    outline.setAttribute(
      'class',
      rect.selected ? 'rush-outline selected' : 'rush-outline',
    );
    outline.setAttribute('data-rush', rect.label);
    outline.setAttribute('x', String(rect.cx - rect.w / 2));
    outline.setAttribute('y', String(rect.cy - rect.h / 2));
    outline.setAttribute('width', String(rect.w));
    outline.setAttribute('height', String(rect.h));
    svg.appendChild(outline);

    const tag = document.createElementNS(SVG_NS, 'text');
    tag.setAttribute('class', 'rush-tag');
    tag.setAttribute('x', String(rect.cx - rect.w / 2 + 6));
    tag.setAttribute('y', String(rect.cy - rect.h / 2 + 18));
    tag.textContent = rect.label;
    svg.appendChild(tag);
  }
  container.appendChild(svg);
}

export interface ScrubHooks {
  onScrub: (frame: number) => void;
}

export function renderScrubber(
  container: HTMLElement,
  frameCount: number,
  cursor: number,
  hooks: ScrubHooks,
): HTMLInputElement {
  container.replaceChildren();
  const scrub = document.createElement('input');
  scrub.type = 'range';
  scrub.className = 'frame-scrub';
  scrub.min = '0';
  scrub.max = String(Math.max(0, frameCount - 1));
  scrub.value = String(Math.min(cursor, Math.max(0, frameCount - 1)));
  scrub.disabled = frameCount <= 0;
  const readout = document.createElement('output');
  readout.textContent = scrub.value;
  scrub.addEventListener('input', () => {
    readout.textContent = scrub.value;
    hooks.onScrub(Number(scrub.value));
  });
  container.append(scrub, readout);
  return scrub;
}
