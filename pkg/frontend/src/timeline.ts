// Timeline view: one SVG lane per rush, selected spans filled, cut markers,
// a unary heatmap strip per lane, and a hover readout of the potentials.

import { computeTimeline, hoverInfo, xToFrame } from './geometry.js';
import type { TimelinePayload } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export function renderTimeline(
  container: HTMLElement,
  payload: TimelinePayload | null,
  width = 960,
): void {
  container.replaceChildren();
  if (!payload || payload.selected.length === 0) {
    const empty = document.createElement('div');
    empty.className = 'timeline-empty';
    empty.textContent = 'No solve yet - register a project and apply parameters.';
    container.appendChild(empty);
    return;
  }
  const geometry = computeTimeline(payload, width);
  const svg = svgEl('svg', {
    class: 'timeline',
    viewBox: `0 0 ${geometry.width} ${geometry.height}`,
    width: geometry.width,
    height: geometry.height,
    role: 'img',
  });

  for (const lane of geometry.lanes) {
    const group = svgEl('g', { class: 'lane', 'data-rush': lane.label });
    group.appendChild(
      svgEl('rect', {
        class: 'lane-bg',
        x: geometry.labelWidth,
        y: lane.y,
        width: geometry.width - geometry.labelWidth,
        height: lane.laneHeight,
      }),
    );
    const label = svgEl('text', {
      class: 'lane-label',
      x: 4,
      y: lane.y + lane.laneHeight / 2 + 4,
    });
    label.textContent = lane.label;
    group.appendChild(label);
    for (const cell of lane.heat) {
      group.appendChild(
        svgEl('rect', {
          class: 'heat',
          x: cell.x,
          y: lane.y + lane.laneHeight - 6,
          width: cell.width,
          height: 6,
          'fill-opacity': cell.intensity.toFixed(3),
          'data-frame': cell.frame,
        }),
      );
    }
    for (const span of lane.spans) {
      group.appendChild(
        svgEl('rect', {
          class: 'segment',
          x: span.x,
          y: lane.y + 2,
          width: span.width,
          height: lane.laneHeight - 10,
          'data-start': span.startFrame,
          'data-end': span.endFrame,
        }),
      );
    }
    svg.appendChild(group);
  }

  for (const marker of geometry.cutMarkers) {
    svg.appendChild(
      svgEl('line', {
        class: 'cut-marker',
        x1: marker.x,
        x2: marker.x,
        y1: 0,
        y2: geometry.height,
        'data-frame': marker.frame,
      }),
    );
  }

  const tooltip = document.createElement('div');
  tooltip.className = 'timeline-tooltip';
  tooltip.hidden = true;

  svg.addEventListener('mousemove', (event: MouseEvent) => {
    const target = event.target as Element | null;
    const lane = target?.closest('g.lane');
    const rushLabel = lane?.getAttribute('data-rush');
    if (!rushLabel) {
      tooltip.hidden = true;
      return;
    }
    const bounds = svg.getBoundingClientRect();
    const frame = xToFrame(
      event.clientX - bounds.left,
      geometry.frameCount,
      geometry.width,
    );
    const info = hoverInfo(payload, rushLabel, frame);
    if (!info) {
      tooltip.hidden = true;
      return;
    }
    tooltip.hidden = false;
    tooltip.textContent =
      `frame ${info.frame} | ${info.shot} | ` +
      `U=${info.unary.toFixed(3)} C=${info.contextual.toFixed(3)} ` +
      `V=${info.saliency.toFixed(3)} S=${info.speaker.toFixed(3)}`;
  });
  svg.addEventListener('mouseleave', () => {
    tooltip.hidden = true;
  });

  container.appendChild(svg);
  container.appendChild(tooltip);
}
