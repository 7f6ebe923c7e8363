/** Labeled latent CSV: header z_0,...,z_{d-1},action,tag. */

export function latentsCsv(Z: Float64Array, n: number, dZ: number, actions: Float64Array, tags: string[]): string {
  const header = [...Array.from({ length: dZ }, (_, i) => `z_${i}`), "action", "tag"].join(",");
  const lines = [header];
  for (let s = 0; s < n; s++) {
    const row: string[] = [];
    for (let d = 0; d < dZ; d++) row.push(String(Z[s * dZ + d]));
    row.push(String(actions[s]));
    row.push(tags[s]);
    lines.push(row.join(","));
  }
  return lines.join("\n") + "\n";
}

export function countInIntervals(actions: Float64Array, intervals: Array<[number, number]>): number[] {
  return intervals.map(([lo, hi]) => {
    let c = 0;
    for (const a of actions) if (a >= lo && a <= hi) c++;
    return c;
  });
}
