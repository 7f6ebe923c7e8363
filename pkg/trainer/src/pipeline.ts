/** End-to-end toy pipeline: dataset -> autoencoder + controller -> NNW/CSV
 * exports plus a manifest with all configs, seeds and measured gates. */

import * as fs from "node:fs";
import * as path from "node:path";

import { augment, AugmentationLevel, AugmentationSpec, BLUR_KERNELS, BRIGHTNESS_RANGES, tagFor } from "./augment.js";
import { trainController, defaultControllerConfig, ControllerConfig } from "./controller.js";
import { latentsCsv, countInIntervals } from "./csv.js";
import { measureEpsilon } from "./fidelity.js";
import { buildGmVae, defaultGmVaeConfig, encodeMeans, GmVaeConfig, trainGmVae } from "./gmvae.js";
import { forwardBatch, forwardOne, Mlp } from "./mlp.js";
import { emitNnw, expandClampHead, forwardNnw, parseNnw } from "./nnw.js";
import { Rng } from "./rng.js";
import { defaultScenario, generateDataset, ScenarioConfig } from "./scenario.js";

export const ACTION_INTERVALS: Array<[number, number]> = [
  [-0.4, -0.1],
  [-0.1, 0.1],
  [0.1, 0.4],
  [-1.0, -1e-9],
  [1e-9, 1.0],
];

export interface PipelineConfig {
  scenario: ScenarioConfig;
  vae: GmVaeConfig;
  controller: ControllerConfig;
  augmentSeed: number;
  parityInputs: number;
  dz8Preset: boolean;
  outDir: string;
  gates: { maxRatio: number; maxValMae: number; minSignAgreement: number; maxParityDiff: number };
}

export const defaultPipeline: PipelineConfig = {
  scenario: defaultScenario,
  // paper-style beta and weight decay; learning rate and epochs are raised to
  // suit the tiny dense nets (1e-5 / 20 epochs never converges at this scale)
  vae: { ...defaultGmVaeConfig, learningRate: 1.5e-3, epochs: 48, clampFinetuneEpochs: 6 },
  controller: defaultControllerConfig,
  augmentSeed: 1234,
  parityInputs: 1000,
  dz8Preset: true,
  outDir: path.join(path.dirname(new URL(import.meta.url).pathname), "..", "out"),
  gates: { maxRatio: 0.05, maxValMae: 0.05, minSignAgreement: 0.95, maxParityDiff: 1e-5 },
};

export interface ParityResult {
  network: string;
  maxDiff: number;
  inputs: number;
}

function parityCheck(framework: Mlp, exported: Mlp, nInputs: number, inputDim: number, seed: number, scale: number): ParityResult {
  const rng = new Rng(seed);
  let maxDiff = 0;
  for (let i = 0; i < nInputs; i++) {
    const x = new Float64Array(inputDim);
    for (let d = 0; d < inputDim; d++) x[d] = rng.normal() * scale;
    const a = forwardOne(framework, x);
    const b = forwardNnw(exported, x);
    for (let o = 0; o < a.length; o++) maxDiff = Math.max(maxDiff, Math.abs(a[o] - b[o]));
  }
  return { network: framework.name, maxDiff, inputs: nInputs };
}

export interface PipelineResult {
  manifest: Record<string, unknown>;
  outDir: string;
}

export function runPipeline(cfg: PipelineConfig = defaultPipeline): PipelineResult {
  fs.mkdirSync(cfg.outDir, { recursive: true });
  const data = generateDataset(cfg.scenario);
  const n = cfg.scenario.size;
  const pixels = data.pixels;

  const counts = countInIntervals(data.actions, ACTION_INTERVALS);
  if (counts.some((c) => c < 100)) {
    throw new Error(`dataset coverage too thin: per-interval counts ${counts.join(", ")}`);
  }

  const vae = buildGmVae(pixels, cfg.vae);
  const vaeStats = trainGmVae(vae, data.images, n, pixels);

  const trained = trainController(data.images, data.actions, n, pixels, cfg.controller);
  const { metrics } = trained;

  // exports: clamp head expanded to relu(x) - relu(x-1)
  const decoderExport = expandClampHead(vae.decoder);
  const controllerExport: Mlp = {
    inputDim: trained.mlp.inputDim,
    name: "toy_controller",
    layers: trained.mlp.layers.map((l) => ({ ...l, w: l.w.slice(), b: l.b.slice() })),
  };
  decoderExport.name = "toy_decoder";
  const decoderText = emitNnw(decoderExport);
  const controllerText = emitNnw(controllerExport);
  fs.writeFileSync(path.join(cfg.outDir, "decoder.nnw"), decoderText);
  fs.writeFileSync(path.join(cfg.outDir, "controller.nnw"), controllerText);

  const decoderParity = parityCheck(vae.decoder, parseNnw(decoderText), cfg.parityInputs, cfg.vae.dZ, 4242, 1.5);
  const controllerParity = parityCheck(trained.mlp, parseNnw(controllerText), cfg.parityInputs, pixels, 4343, 0.5);
  for (const parity of [decoderParity, controllerParity]) {
    if (parity.maxDiff > cfg.gates.maxParityDiff) {
      throw new Error(`export parity failed for ${parity.network}: max diff ${parity.maxDiff}`);
    }
  }

  // clean latents
  const cleanZ = encodeMeans(vae, data.images, n, pixels);
  const cleanTags = Array.from({ length: n }, () => "clean");
  fs.writeFileSync(path.join(cfg.outDir, "latents_clean.csv"), latentsCsv(cleanZ, n, cfg.vae.dZ, data.actions, cleanTags));
  const cleanCounts = countInIntervals(data.actions, ACTION_INTERVALS);

  // augmented latents: union of clean and augmented rows (labels unchanged)
  const augmentCounts: Record<string, number[]> = {};
  const kinds: AugmentationSpec[] = [];
  for (const level of ["delta1", "delta2", "delta3"] as AugmentationLevel[]) {
    kinds.push({ kind: "brightness", level });
    kinds.push({ kind: "vertical_motion_blur", level });
  }
  let augSeed = cfg.augmentSeed;
  for (const spec of kinds) {
    const augImages = augment(data.images, n, cfg.scenario.height, cfg.scenario.width, spec, augSeed++);
    const augZ = encodeMeans(vae, augImages, n, pixels);
    const unionZ = new Float64Array(2 * n * cfg.vae.dZ);
    unionZ.set(cleanZ, 0);
    unionZ.set(augZ, n * cfg.vae.dZ);
    const unionActions = new Float64Array(2 * n);
    unionActions.set(data.actions, 0);
    unionActions.set(data.actions, n);
    const tags = [...cleanTags, ...Array.from({ length: n }, () => tagFor(spec))];
    const name = `latents_${spec.kind}_${spec.level}.csv`;
    fs.writeFileSync(path.join(cfg.outDir, name), latentsCsv(unionZ, 2 * n, cfg.vae.dZ, unionActions, tags));
    augmentCounts[tagFor(spec)] = countInIntervals(unionActions, ACTION_INTERVALS);
  }

  const fidelity = measureEpsilon(vae, trained.mlp, data.images, n, pixels);

  // optional 8-dimensional preset: exercises the outer-approximation path of
  // the verifier's geometry; Lemma-1 style coverage only, no fidelity gate
  let dz8: Record<string, unknown> | null = null;
  if (cfg.dz8Preset) {
    const vae8cfg: GmVaeConfig = { ...cfg.vae, dZ: 8, epochs: 8, clampFinetuneEpochs: 2, seed: cfg.vae.seed + 100 };
    const vae8 = buildGmVae(pixels, vae8cfg);
    trainGmVae(vae8, data.images, n, pixels);
    const z8 = encodeMeans(vae8, data.images, n, pixels);
    fs.writeFileSync(path.join(cfg.outDir, "latents_clean_dz8.csv"), latentsCsv(z8, n, 8, data.actions, cleanTags));
    dz8 = { dZ: 8, epochs: vae8cfg.epochs, seed: vae8cfg.seed };
  }

  const manifest = {
    scenario: cfg.scenario,
    vae: cfg.vae,
    controller: cfg.controller,
    augmentSeed: cfg.augmentSeed,
    actionIntervals: ACTION_INTERVALS,
    intervalCounts: { clean: cleanCounts, ...augmentCounts },
    vaeFinalLoss: vaeStats.epochLosses[vaeStats.epochLosses.length - 1],
    vaeFinalRecon: vaeStats.reconLosses[vaeStats.reconLosses.length - 1],
    controllerMetrics: metrics,
    fidelity,
    parity: [decoderParity, controllerParity],
    augmentationRanges: { brightness: BRIGHTNESS_RANGES, vertical_motion_blur: BLUR_KERNELS },
    dz8Preset: dz8,
  };
  fs.writeFileSync(path.join(cfg.outDir, "manifest.json"), JSON.stringify(manifest, null, 1) + "\n");

  const failures: string[] = [];
  if (!(fidelity.ratio <= cfg.gates.maxRatio)) {
    failures.push(`fidelity ratio ${fidelity.ratio.toFixed(4)} > ${cfg.gates.maxRatio}`);
  }
  if (!(metrics.valMae < cfg.gates.maxValMae)) {
    failures.push(`validation MAE ${metrics.valMae.toFixed(4)} >= ${cfg.gates.maxValMae}`);
  }
  if (!(metrics.signAgreement >= cfg.gates.minSignAgreement)) {
    failures.push(`sign agreement ${metrics.signAgreement.toFixed(4)} < ${cfg.gates.minSignAgreement}`);
  }
  if (failures.length) {
    throw new Error(`pipeline gates failed: ${failures.join("; ")}`);
  }
  return { manifest, outDir: cfg.outDir };
}

const isMain = process.argv[1] && import.meta.url.endsWith(path.basename(process.argv[1]));
if (isMain) {
  const outDir = process.argv[2] ?? defaultPipeline.outDir;
  const result = runPipeline({ ...defaultPipeline, outDir });
  const m = result.manifest as Record<string, any>;
  console.log(`pipeline complete; outputs in ${result.outDir}`);
  console.log(`controller: valMAE=${m.controllerMetrics.valMae.toFixed(4)} signAgreement=${(m.controllerMetrics.signAgreement * 100).toFixed(1)}%`);
  console.log(`fidelity: epsilon=${m.fidelity.reconEpsilon.toFixed(4)} baseline=${m.fidelity.baseline.toFixed(4)} ratio=${m.fidelity.ratio.toFixed(4)}`);
  console.log(`parity: ${m.parity.map((p: any) => `${p.network}=${p.maxDiff.toExponential(2)}`).join(" ")}`);
}
