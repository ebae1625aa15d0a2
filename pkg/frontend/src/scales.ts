/** Axis scales and tick generation.  Pure coordinate mapping — the only
 * transformations this package applies to the data. */

export interface Scale {
  (value: number): number;
  ticks(): number[];
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.ticks = () => {
    const step = niceStep(span / 5);
    const start = Math.ceil(d0 / step) * step;
    const out: number[] = [];
    for (let t = start; t <= d1 + 1e-9 * Math.abs(step); t += step) {
      out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
    }
    return out;
  };
  return fn;
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale requires a positive domain, got [${d0}, ${d1}]`);
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  const fn = ((v: number) =>
    range[0] + ((Math.log10(v) - l0) / span) * (range[1] - range[0])) as Scale;
  fn.domain = domain;
  fn.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e++) {
      out.push(10 ** e);
    }
    // Dense decades: fall back to every other power of ten.
    return out.length > 8 ? out.filter((_, i) => i % 2 === 0) : out;
  };
  return fn;
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(Math.abs(raw) || 1));
  const frac = Math.abs(raw) / mag;
  const nice = frac < 1.5 ? 1 : frac < 3.5 ? 2 : frac < 7.5 ? 5 : 10;
  return nice * mag;
}

/** Positive extent of a data set, padded multiplicatively for log axes. */
export function logDomain(values: number[], pad = 1.5): [number, number] {
  const positive = values.filter((v) => v > 0 && Number.isFinite(v));
  if (positive.length === 0) {
    throw new Error("no positive finite values for a log axis");
  }
  return [Math.min(...positive) / pad, Math.max(...positive) * pad];
}

export function linearDomain(values: number[], pad = 0.05): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) {
    throw new Error("no finite values for an axis");
  }
  const lo = Math.min(...finite);
  const hi = Math.max(...finite);
  const margin = (hi - lo || 1) * pad;
  return [lo - margin, hi + margin];
}
