// Pure timeline geometry: everything the renderer draws is derived here,
// deterministically, from the payload alone.

import type { TimelinePayload } from './types.js';

export interface SpanBox {
  startFrame: number;
  endFrame: number;
  x: number;
  width: number;
}

export interface HeatCell {
  x: number;
  width: number;
  /** unary value normalized to [0, 1] across the whole payload */
  intensity: number;
  frame: number;
}

export interface LaneGeometry {
  label: string;
  shotIndex: number;
  y: number;
  laneHeight: number;
  spans: SpanBox[];
  heat: HeatCell[];
}

export interface CutMarker {
  frame: number;
  x: number;
}

export interface TimelineGeometry {
  width: number;
  height: number;
  frameCount: number;
  labelWidth: number;
  lanes: LaneGeometry[];
  cutMarkers: CutMarker[];
}

export const LANE_HEIGHT = 26;
export const LANE_GAP = 4;
export const LABEL_WIDTH = 120;

export function frameToX(
  frame: number,
  frameCount: number,
  width: number,
  labelWidth: number = LABEL_WIDTH,
): number {
  const usable = width - labelWidth;
  return labelWidth + (frame / frameCount) * usable;
}

export function xToFrame(
  x: number,
  frameCount: number,
  width: number,
  labelWidth: number = LABEL_WIDTH,
): number {
  const usable = width - labelWidth;
  const frame = Math.floor(((x - labelWidth) / usable) * frameCount);
  return Math.max(0, Math.min(frameCount - 1, frame));
}

export function computeTimeline(
  payload: TimelinePayload,
  width = 960,
): TimelineGeometry {
  const frameCount = payload.selected.length;
  const shots = payload.tracks.shots;
  const maxUnary = Math.max(
    1e-9,
    ...payload.tracks.unary.map((row) => Math.max(...row)),
  );
  const toX = (frame: number) => frameToX(frame, frameCount, width);
  const strideWidth =
    (payload.tracks.stride / frameCount) * (width - LABEL_WIDTH);

  const lanes: LaneGeometry[] = payload.rushes.map((rush, shotIndex) => {
    const y = shotIndex * (LANE_HEIGHT + LANE_GAP);
    const spans = payload.segments
      .filter((seg) => seg.rush === rush.label)
      .map((seg) => ({
        startFrame: seg.start_frame,
        endFrame: seg.end_frame,
        x: toX(seg.start_frame),
        width: toX(seg.end_frame) - toX(seg.start_frame),
      }));
    const column = shots.indexOf(rush.label);
    const heat = payload.tracks.frames.map((frame, i) => ({
      frame,
      x: toX(frame),
      width: Math.min(strideWidth, width - toX(frame)),
      intensity: column >= 0 ? payload.tracks.unary[i][column] / maxUnary : 0,
    }));
    return { label: rush.label, shotIndex, y, laneHeight: LANE_HEIGHT, spans, heat };
  });

  const cutMarkers: CutMarker[] = payload.segments
    .slice(1)
    .map((seg) => ({ frame: seg.start_frame, x: toX(seg.start_frame) }));

  return {
    width,
    height: lanes.length * (LANE_HEIGHT + LANE_GAP),
    frameCount,
    labelWidth: LABEL_WIDTH,
    lanes,
    cutMarkers,
  };
}

export interface HoverInfo {
  frame: number;
  shot: string;
  unary: number;
  contextual: number;
  saliency: number;
  speaker: number;
}

/** Values shown in the hover readout: nearest downsampled column at or before the frame. */
export function hoverInfo(
  payload: TimelinePayload,
  shotLabel: string,
  frame: number,
): HoverInfo | null {
  const column = payload.tracks.shots.indexOf(shotLabel);
  if (column < 0) {
    return null;
  }
  const frames = payload.tracks.frames;
  let row = 0;
  for (let i = 0; i < frames.length; i += 1) {
    if (frames[i] <= frame) {
      row = i;
    } else {
      break;
    }
  }
  return {
    frame,
    shot: shotLabel,
    unary: payload.tracks.unary[row][column],
    contextual: payload.tracks.contextual[row][column],
    saliency: payload.tracks.saliency[row][column],
    speaker: payload.tracks.speaker[row][column],
  };
}
