// Wire types of the stagecut service (see the service schema module).

export interface SegmentModel {
  rush: string;
  start_frame: number;
  end_frame: number; // exclusive
}

export interface RushKeyframe {
  frame: number;
  cx: number;
  cy: number;
  w: number;
  h: number;
}

export interface RushCatalogEntry {
  label: string;
  keyframes: RushKeyframe[];
}

export interface PotentialTracks {
  stride: number;
  frames: number[];
  shots: string[];
  contextual: number[][];
  saliency: number[][];
  speaker: number[][];
  unary: number[][];
}

export interface TimelinePayload {
  project_id: string;
  segments: SegmentModel[];
  selected: number[];
  tracks: PotentialTracks;
  rushes: RushCatalogEntry[];
  total_energy: number;
  params: Record<string, number | string | null>;
  solve_seconds: number;
}

export interface ProjectSummary {
  project_id: string;
  project: string;
  path: string;
  frame_count: number;
  fps: number;
  frame_width: number;
  frame_height: number;
  actor_ids: string[];
  word_count: number;
  rush_count: number;
}

export interface FrameRect {
  label: string;
  cx: number;
  cy: number;
  w: number;
  h: number;
  selected: boolean;
}

export interface FrameRectsResponse {
  frame: number;
  rects: FrameRect[];
}
