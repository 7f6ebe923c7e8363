/** Synthetic lane-following scenario: a bright lane band on a dark background
 * whose lateral offset and curvature determine the steering label. */

import { Rng } from "./rng.js";

export interface ScenarioConfig {
  height: number; // rows
  width: number; // columns
  curveRange: [number, number];
  curveGain: number; // contribution of curvature to steering
  bandWidth: number; // gaussian band width in pixels
  size: number; // number of images
  seed: number;
}

export const defaultScenario: ScenarioConfig = {
  height: 12,
  width: 16,
  curveRange: [-1, 1],
  curveGain: 0.25,
  bandWidth: 2.0,
  size: 2500,
  seed: 7,
};

export interface Dataset {
  images: Float64Array; // size x (height*width), pixels in [0, 1]
  actions: Float64Array; // steering in [-1, 1]
  offsets: Float64Array;
  curves: Float64Array;
  pixels: number;
}

/** The action map: steer with the lane's lateral offset plus a curvature term. */
export function actionFor(cfg: ScenarioConfig, offset: number, curve: number): number {
  const a = offset + cfg.curveGain * curve;
  return a < -1 ? -1 : a > 1 ? 1 : a;
}

/** Row-dependent band center in columns; offset -1/+1 pins the band to the
 * left/right image edge on the center row. */
function bandCenter(cfg: ScenarioConfig, offset: number, curve: number, row: number): number {
  const mid = (cfg.width - 1) / 2;
  const t = row / (cfg.height - 1) - 0.5;
  const bend = t * t - 1 / 12; // zero-mean over rows
  return mid + offset * mid + curve * bend * cfg.width;
}

export function renderImage(cfg: ScenarioConfig, offset: number, curve: number): Float64Array {
  const img = new Float64Array(cfg.height * cfg.width);
  const inv = 1 / (2 * cfg.bandWidth * cfg.bandWidth);
  for (let r = 0; r < cfg.height; r++) {
    const c0 = bandCenter(cfg, offset, curve, r);
    for (let c = 0; c < cfg.width; c++) {
      const d = c - c0;
      img[r * cfg.width + c] = Math.exp(-d * d * inv);
    }
  }
  return img;
}

export function generateDataset(cfg: ScenarioConfig): Dataset {
  const rng = new Rng(cfg.seed);
  const pixels = cfg.height * cfg.width;
  const images = new Float64Array(cfg.size * pixels);
  const actions = new Float64Array(cfg.size);
  const offsets = new Float64Array(cfg.size);
  const curves = new Float64Array(cfg.size);
  for (let i = 0; i < cfg.size; i++) {
    const offset = rng.uniform(-1, 1);
    const curve = rng.uniform(cfg.curveRange[0], cfg.curveRange[1]);
    offsets[i] = offset;
    curves[i] = curve;
    actions[i] = actionFor(cfg, offset, curve);
    images.set(renderImage(cfg, offset, curve), i * pixels);
  }
  return { images, actions, offsets, curves, pixels };
}

/** Count labels inside each interval; used to check dataset coverage. */
export function intervalCounts(actions: Float64Array, intervals: Array<[number, number]>): number[] {
  return intervals.map(([lo, hi]) => {
    let n = 0;
    for (const a of actions) if (a >= lo && a <= hi) n++;
    return n;
  });
}
