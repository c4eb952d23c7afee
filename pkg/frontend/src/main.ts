// App wiring: register a project, solve, and keep the views in sync.
// All edits flow through the service's solve endpoint; payloads are never
// mutated locally.

import { ServiceClient, ServiceError } from './api.js';
import { renderInspector, renderScrubber } from './inspector.js';
import { renderDelta, renderSliderPanel, showServerRejection } from './sliders.js';
import { SolveQueue } from './solveQueue.js';
import { initialState, pinCurrent } from './state.js';
import { renderTimeline } from './timeline.js';
import type { ProjectSummary } from './types.js';

export function bootstrap(root: HTMLElement, client: ServiceClient): void {
  const state = initialState();
  let summary: ProjectSummary | null = null;

  root.innerHTML = `
    <header>
      <h1>stagecut timeline</h1>
      <form id="register">
        <input name="path" placeholder="/absolute/path/to/bundle" size="48" />
        <button type="submit">Open project</button>
        <span id="register-status"></span>
      </form>
    </header>
    <section id="timeline"></section>
    <section id="panel"></section>
    <section id="scrub"></section>
    <section id="inspector"></section>
  `;
  const timelineEl = root.querySelector<HTMLElement>('#timeline')!;
  const panelEl = root.querySelector<HTMLElement>('#panel')!;
  const scrubEl = root.querySelector<HTMLElement>('#scrub')!;
  const inspectorEl = root.querySelector<HTMLElement>('#inspector')!;
  const statusEl = root.querySelector<HTMLElement>('#register-status')!;

  const queue = new SolveQueue<Record<string, number>>(async (overrides) => {
    if (!state.projectId) {
      return;
    }
    try {
      state.current = await client.solve(state.projectId, overrides);
      renderTimeline(timelineEl, state.current);
      const deltaEl = panelEl.querySelector<HTMLElement>('.energy-delta');
      if (deltaEl) {
        renderDelta(deltaEl, state);
      }
    } catch (error) {
      if (error instanceof ServiceError) {
        showServerRejection(panelEl, `[${error.stage}] ${error.message}`);
      } else {
        showServerRejection(panelEl, String(error));
      }
    }
  });

  async function refreshInspector(frame: number): Promise<void> {
    if (!state.projectId || !summary) {
      return;
    }
    try {
      const rects = await client.frameRects(state.projectId, frame);
      renderInspector(inspectorEl, rects, summary.frame_width, summary.frame_height);
    } catch (error) {
      inspectorEl.textContent =
        error instanceof ServiceError ? `[${error.stage}] ${error.message}` : String(error);
    }
  }

  renderTimeline(timelineEl, null);
  renderSliderPanel(panelEl, state, {
    onApply: (overrides) => queue.submit(overrides),
    onPin: () => pinCurrent(state),
  });

  const form = root.querySelector<HTMLFormElement>('#register')!;
  form.addEventListener('submit', async (event) => {
    event.preventDefault();
    const input = form.querySelector<HTMLInputElement>('input[name=path]')!;
    statusEl.textContent = 'loading...';
    try {
      const registered = await client.registerProject(input.value);
      state.projectId = registered.project_id;
      summary = await client.getProject(state.projectId);
      statusEl.textContent = `${summary.project}: ${summary.frame_count} frames @ ${summary.fps} fps`;
      renderScrubber(scrubEl, summary.frame_count, state.cursor, {
        onScrub: (frame) => {
          state.cursor = frame;
          void refreshInspector(frame);
        },
      });
      queue.submit({});
      void refreshInspector(0);
    } catch (error) {
      statusEl.textContent =
        error instanceof ServiceError ? `[${error.stage}] ${error.message}` : String(error);
    }
  });
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  bootstrap(document.getElementById('app')!, new ServiceClient(''));
}
