/** NNW text format: emit trained networks for the verifier, re-parse and
 * evaluate for export parity checks. */

import { Mlp } from "./mlp.js";

function fmt(v: number): string {
  // String() of a JS number is the shortest decimal that round-trips
  return String(v);
}

export function emitNnw(mlp: Mlp): string {
  const lines = [`NNW 1`, `name ${mlp.name}`, `input ${mlp.inputDim}`, `layers ${mlp.layers.length}`];
  for (const layer of mlp.layers) {
    if (layer.activation !== "relu" && layer.activation !== "linear") {
      throw new Error(`layer activation ${layer.activation} is not exportable; expand it first`);
    }
    lines.push(`layer ${layer.outDim} ${layer.activation}`);
    for (let r = 0; r < layer.outDim; r++) {
      const row: string[] = [];
      for (let c = 0; c < layer.inDim; c++) row.push(fmt(layer.w[r * layer.inDim + c]));
      row.push(fmt(layer.b[r]));
      lines.push(row.join(" "));
    }
  }
  return lines.join("\n") + "\n";
}

/** Replace a trailing clamp01 head with relu(x) - relu(x - 1) as two layers. */
export function expandClampHead(mlp: Mlp): Mlp {
  const last = mlp.layers[mlp.layers.length - 1];
  if (last.activation !== "clamp01") {
    throw new Error(`final layer activation is ${last.activation}, expected clamp01`);
  }
  const p = last.outDim;
  const wide = new Float64Array(2 * p * last.inDim);
  wide.set(last.w, 0);
  wide.set(last.w, p * last.inDim);
  const bias = new Float64Array(2 * p);
  bias.set(last.b, 0);
  for (let i = 0; i < p; i++) bias[p + i] = last.b[i] - 1;
  const merge = new Float64Array(p * 2 * p);
  for (let i = 0; i < p; i++) {
    merge[i * 2 * p + i] = 1;
    merge[i * 2 * p + p + i] = -1;
  }
  return {
    inputDim: mlp.inputDim,
    name: mlp.name,
    layers: [
      ...mlp.layers.slice(0, -1).map((l) => ({ ...l, w: l.w.slice(), b: l.b.slice() })),
      { inDim: last.inDim, outDim: 2 * p, w: wide, b: bias, activation: "relu" as const },
      { inDim: 2 * p, outDim: p, w: merge, b: new Float64Array(p), activation: "linear" as const },
    ],
  };
}

export function parseNnw(text: string): Mlp {
  const tokens: string[] = [];
  for (const line of text.split("\n")) {
    const t = line.trim();
    if (t.startsWith("#") || t === "") continue;
    tokens.push(...t.split(/\s+/));
  }
  let pos = 0;
  const next = () => {
    if (pos >= tokens.length) throw new Error("unexpected end of NNW input");
    return tokens[pos++];
  };
  const expect = (k: string) => {
    const t = next();
    if (t !== k) throw new Error(`expected ${k}, got ${t}`);
  };
  expect("NNW");
  if (next() !== "1") throw new Error("unsupported NNW version");
  expect("name");
  const name = next();
  expect("input");
  const inputDim = parseInt(next(), 10);
  expect("layers");
  const nLayers = parseInt(next(), 10);
  const layers = [];
  let prev = inputDim;
  for (let li = 0; li < nLayers; li++) {
    expect("layer");
    const outDim = parseInt(next(), 10);
    const act = next();
    if (act !== "relu" && act !== "linear") throw new Error(`unknown activation ${act}`);
    const w = new Float64Array(outDim * prev);
    const b = new Float64Array(outDim);
    for (let r = 0; r < outDim; r++) {
      for (let c = 0; c < prev; c++) {
        const v = Number(next());
        if (!Number.isFinite(v)) throw new Error(`non-finite weight in layer ${li}`);
        w[r * prev + c] = v;
      }
      const bv = Number(next());
      if (!Number.isFinite(bv)) throw new Error(`non-finite bias in layer ${li}`);
      b[r] = bv;
    }
    layers.push({ inDim: prev, outDim, w, b, activation: act as "relu" | "linear" });
    prev = outDim;
  }
  return { inputDim, layers, name };
}

export function forwardNnw(mlp: Mlp, x: Float64Array): Float64Array {
  let cur = x;
  for (const layer of mlp.layers) {
    const out = new Float64Array(layer.outDim);
    for (let r = 0; r < layer.outDim; r++) {
      let acc = layer.b[r];
      const wo = r * layer.inDim;
      for (let c = 0; c < layer.inDim; c++) acc += layer.w[wo + c] * cur[c];
      out[r] = layer.activation === "relu" && acc < 0 ? 0 : acc;
    }
    cur = out;
  }
  return cur;
}
