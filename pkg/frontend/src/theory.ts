/**
 * Closed-form overlay curves, re-evaluated here so figures never depend on
 * the simulation runtime.  This is deliberate duplication of the primary
 * package's formulas; the test suite pins every value against the primary's
 * `theory` CSV output to 1e-9.
 */

export function entropyDensity(q: number): number {
  return Math.log(q);
}

export function puritySpeed(q: number): number {
  if (q < 2) throw new RangeError("local dimension must be >= 2");
  return (2 * Math.log((q * q + 1) / (2 * q))) / Math.log(q);
}

export function meanPurity(q: number, t: number): number {
  if (t < 0) throw new RangeError("time must be nonnegative");
  return ((2 * q) / (1 + q * q)) ** (2 * t);
}

function factorial(k: number): number {
  let out = 1;
  for (let j = 2; j <= k; j++) out *= j;
  return out;
}

function binomial(n: number, k: number): number {
  let out = 1;
  for (let j = 1; j <= k; j++) out = (out * (n - k + j)) / j;
  return Math.round(out);
}

export function haarFramePotential(nA: number, k: number): number {
  if (nA < 1 || k < 1) throw new RangeError("need N >= 1 and k >= 1");
  return 1 / binomial(nA + k - 1, k);
}

export function membraneFramePotential(q: number, lA: number, t: number, k: number): number {
  const s = entropyDensity(q);
  const v2 = puritySpeed(q);
  if (t <= lA / v2) {
    return factorial(k) * Math.exp(-k * v2 * s * t);
  }
  return haarFramePotential(q ** lA, k);
}

export function roundedFp1(q: number, lA: number, t: number): number {
  const s = entropyDensity(q);
  return Math.exp(-s * lA) + Math.exp(-puritySpeed(q) * s * t);
}

export function delta2NonInt(q: number, lA: number, t: number, k: number): number {
  const s = entropyDensity(q);
  const g = (lA - puritySpeed(q) * t) * s;
  return (1 + Math.exp(g)) ** k - 1;
}

export function largeQFramePotential(q: number, lA: number, t: number, k: number): number {
  const kf = factorial(k);
  if (t <= lA / 2) {
    return kf * 4 ** (k * t) * q ** (-2 * k * t);
  }
  return kf * q ** (-k * lA);
}

export function bulkFpLargeQ(q: number, t: number, k: number, boundary: "obc" | "pbc"): number {
  const base = factorial(k) * Math.exp(-2 * puritySpeed(q) * k * t);
  return boundary === "obc" ? factorial(k) * base : base;
}

/** Evaluate the overlay named like the simulation's theory observables. */
export function theoryObservable(
  name: string,
  q: number,
  lA: number,
  t: number,
  k: number,
  boundary: string
): number {
  switch (name) {
    case "theory_mean_purity":
      return meanPurity(q, t);
    case "theory_membrane_fp":
      return membraneFramePotential(q, lA, t, k);
    case "theory_haar_fp":
      return haarFramePotential(q ** lA, k);
    case "theory_delta2_nonint":
      return delta2NonInt(q, lA, t, k);
    case "theory_rounded_fp1":
      return roundedFp1(q, lA, t);
    case "theory_large_q_fp":
      return largeQFramePotential(q, lA, t, k);
    case "theory_bulk_fp_large_q":
      return bulkFpLargeQ(q, t, k, boundary === "pbc" ? "pbc" : "obc");
    default:
      throw new RangeError(`unknown theory observable ${name}`);
  }
}
