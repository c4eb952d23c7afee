import { describe, expect, it } from 'vitest';

import {
  LABEL_WIDTH,
  computeTimeline,
  frameToX,
  hoverInfo,
  xToFrame,
} from '../src/geometry.js';
import { fixturePayload } from './fixtures.js';

describe('computeTimeline', () => {
  it('produces one lane per rush in catalog order', () => {
    const geometry = computeTimeline(fixturePayload());
    expect(geometry.lanes.map((lane) => lane.label)).toEqual([
      'ann',
      'bob',
      'ann+bob',
      'MASTER',
    ]);
  });

  it('span widths are proportional to segment lengths', () => {
    const geometry = computeTimeline(fixturePayload(), 960);
    const usable = 960 - LABEL_WIDTH;
    const master = geometry.lanes.find((l) => l.label === 'MASTER')!;
    expect(master.spans).toHaveLength(1);
    expect(master.spans[0].x).toBeCloseTo(LABEL_WIDTH);
    expect(master.spans[0].width).toBeCloseTo(usable * 0.5);
    const ann = geometry.lanes.find((l) => l.label === 'ann')!;
    expect(ann.spans[0].x).toBeCloseTo(LABEL_WIDTH + usable * 0.5);
    expect(ann.spans[0].width).toBeCloseTo(usable * 0.3);
  });

  it('lanes without segments have empty spans', () => {
    const geometry = computeTimeline(fixturePayload());
    expect(geometry.lanes.find((l) => l.label === 'bob')!.spans).toEqual([]);
  });

  it('cut markers sit at segment boundaries', () => {
    const geometry = computeTimeline(fixturePayload());
    expect(geometry.cutMarkers.map((m) => m.frame)).toEqual([50, 80]);
  });

  it('is a pure function of the payload', () => {
    const payload = fixturePayload();
    const frozen = Object.freeze(payload);
    const a = computeTimeline(frozen);
    const b = computeTimeline(fixturePayload());
    expect(a).toEqual(b);
  });

  it('heatmap intensity is normalized to the payload max', () => {
    const geometry = computeTimeline(fixturePayload());
    const intensities = geometry.lanes.flatMap((lane) =>
      lane.heat.map((cell) => cell.intensity),
    );
    expect(Math.max(...intensities)).toBeCloseTo(1.0);
    expect(Math.min(...intensities)).toBeGreaterThanOrEqual(0);
  });

  it('frame/x mappings invert each other', () => {
    for (const frame of [0, 10, 42, 99]) {
      const x = frameToX(frame + 0.5, 100, 960);
      expect(xToFrame(x, 100, 960)).toBe(frame);
    }
  });
});

describe('hoverInfo', () => {
  it('reads the nearest sampled column at or before the frame', () => {
    const payload = fixturePayload();
    const info = hoverInfo(payload, 'ann', 30)!;
    expect(info.frame).toBe(30);
    expect(info.unary).toBeCloseTo(payload.tracks.unary[1][0]);
    expect(info.contextual).toBeCloseTo(payload.tracks.contextual[1][0]);
  });

  it('returns null for unknown shots', () => {
    expect(hoverInfo(fixturePayload(), 'nobody', 0)).toBeNull();
  });
});
