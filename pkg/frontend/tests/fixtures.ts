import type { FrameRectsResponse, TimelinePayload } from '../src/types.js';

/** Small fixture payload: 4 rushes, 100 frames, master opening then a 1-shot. */
export function fixturePayload(): TimelinePayload {
  const shots = ['ann', 'bob', 'ann+bob', 'MASTER'];
  const frames = [0, 25, 50, 75];
  const grid = (values: number[]) => frames.map((_, i) => values.map((v) => v * (i + 1) * 0.1));
  return {
    project_id: 'fixture01',
    segments: [
      { rush: 'MASTER', start_frame: 0, end_frame: 50 },
      { rush: 'ann', start_frame: 50, end_frame: 80 },
      { rush: 'ann+bob', start_frame: 80, end_frame: 100 },
    ],
    selected: [
      ...Array(50).fill(3),
      ...Array(30).fill(0),
      ...Array(20).fill(2),
    ],
    tracks: {
      stride: 25,
      frames,
      shots,
      contextual: grid([1, 0.5, 0.25, 0]),
      saliency: grid([0.5, 1, 0.5, 0]),
      speaker: grid([1, 0, 1, 0]),
      unary: grid([2.5, 1.5, 1.75, 0]),
    },
    rushes: shots.map((label, s) => ({
      label,
      keyframes: frames.map((frame) => ({
        frame,
        cx: 300 + 200 * s,
        cy: 400,
        w: label === 'MASTER' ? 1920 : 400,
        h: label === 'MASTER' ? 1080 : 225,
      })),
    })),
    total_energy: 123.456,
    params: { l: 1, m: 7 },
    solve_seconds: 0.42,
  };
}

export function fixtureRects(frame = 10): FrameRectsResponse {
  return {
    frame,
    rects: [
      { label: 'ann', cx: 400, cy: 500, w: 420, h: 236, selected: false },
      { label: 'bob', cx: 1300, cy: 500, w: 420, h: 236, selected: false },
      { label: 'ann+bob', cx: 900, cy: 520, w: 1200, h: 675, selected: false },
      { label: 'MASTER', cx: 960, cy: 540, w: 1920, h: 1080, selected: true },
    ],
  };
}
