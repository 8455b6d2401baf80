/**
 * Four numeric kernels on contiguous 3D arrays in x-fastest layout, matching
 * the laseg toolkit's implementations so an external training loop can call
 * the exact same math:
 *
 *   - boundaryMask:            slice-wise 3-voxel boundary band
 *   - signedBoundaryDistance:  anisotropic signed distance about a band
 *   - topkLoss:                mean CE over the hardest k% voxels, with grad
 *   - entropySum:              total Shannon entropy in nats
 *
 * Inputs are never mutated; every kernel works on its own buffers.
 */

export type Dims = readonly [number, number, number];
export type Spacing = readonly [number, number, number];

export class DegenerateInputError extends Error {}

const CLAMP_EPS = 1e-7;
const BIG = 1e30;

function checkGrid(data: ArrayLike<number>, dims: Dims, what: string): void {
  if (dims.length !== 3 || dims.some((d) => !Number.isInteger(d) || d < 1)) {
    throw new Error(`${what}: dims must be three positive integers, got [${dims}]`);
  }
  const n = dims[0] * dims[1] * dims[2];
  if (data.length !== n) {
    throw new Error(`${what}: data length ${data.length} does not match dims product ${n}`);
  }
}

function checkBinary(data: ArrayLike<number>, what: string): void {
  for (let i = 0; i < data.length; i++) {
    const v = data[i];
    if (v !== 0 && v !== 1) {
      throw new Error(`${what}: expected 0/1 values, found ${v} at index ${i}`);
    }
  }
}

/** In-plane max over a (2r+1)^2 window; out-of-bounds counts as `pad`. */
function pool2d(
  src: Float64Array,
  dims: Dims,
  r: number,
  pad: number,
  out: Float64Array,
): void {
  const [nx, ny, nz] = dims;
  for (let z = 0; z < nz; z++) {
    const base = nx * ny * z;
    for (let y = 0; y < ny; y++) {
      for (let x = 0; x < nx; x++) {
        let m = -Infinity;
        for (let dy = -r; dy <= r; dy++) {
          const yy = y + dy;
          for (let dx = -r; dx <= r; dx++) {
            const xx = x + dx;
            const inside = xx >= 0 && xx < nx && yy >= 0 && yy < ny;
            const v = inside ? src[base + xx + nx * yy] : pad;
            if (v > m) m = v;
          }
        }
        out[base + x + nx * y] = m;
      }
    }
  }
}

/**
 * 3-voxel boundary band of a binary mask, per z-slice:
 * Pool5(V) + Pool3(-V), out-of-bounds treated as background for both pools.
 */
export function boundaryMask(mask: ArrayLike<number>, dims: Dims): Float32Array {
  checkGrid(mask, dims, "boundaryMask");
  checkBinary(mask, "boundaryMask");
  const n = mask.length;
  const g = new Float64Array(n);
  const neg = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    g[i] = mask[i];
    neg[i] = -mask[i];
  }
  const poolD = new Float64Array(n);
  const poolE = new Float64Array(n);
  pool2d(g, dims, 2, 0.0, poolD);
  pool2d(neg, dims, 1, 0.0, poolE);
  const band = new Float32Array(n);
  for (let i = 0; i < n; i++) band[i] = poolD[i] + poolE[i];
  return band;
}

/** d[q] = min_j (f[j] + w * (q - j)^2), lower envelope of parabolas. */
function envelope1d(f: Float64Array, w: number, n: number): void {
  const d = new Float64Array(n);
  const v = new Int32Array(n);
  const z = new Float64Array(n + 1);
  let k = 0;
  z[0] = -Infinity;
  z[1] = Infinity;
  for (let q = 1; q < n; q++) {
    const fq = f[q] + w * q * q;
    let s: number;
    for (;;) {
      const p = v[k];
      s = (fq - (f[p] + w * p * p)) / (2.0 * w * (q - p));
      if (s > z[k]) break;
      k -= 1;
    }
    k += 1;
    v[k] = q;
    z[k] = s;
    z[k + 1] = Infinity;
  }
  k = 0;
  for (let q = 0; q < n; q++) {
    while (z[k + 1] < q) k += 1;
    d[q] = w * (q - v[k]) * (q - v[k]) + f[v[k]];
  }
  f.set(d);
}

/** Exact squared anisotropic EDT of `foreground`, separable per axis. */
function edtSquared(foreground: Uint8Array, dims: Dims, spacing: Spacing): Float64Array {
  const [nx, ny, nz] = dims;
  const n = nx * ny * nz;
  const f = new Float64Array(n);
  for (let i = 0; i < n; i++) f[i] = foreground[i] ? BIG : 0.0;
  const lens = [nx, ny, nz];
  const strides = [1, nx, nx * ny];
  const row = new Float64Array(Math.max(nx, ny, nz));
  for (let axis = 0; axis < 3; axis++) {
    const len = lens[axis];
    if (len === 1) continue;
    const stride = strides[axis];
    const w = spacing[axis] * spacing[axis];
    const oLens = lens.filter((_, a) => a !== axis);
    const oStrides = strides.filter((_, a) => a !== axis);
    const line = row.subarray(0, len);
    for (let j = 0; j < oLens[1]; j++) {
      for (let i = 0; i < oLens[0]; i++) {
        const base = i * oStrides[0] + j * oStrides[1];
        for (let q = 0; q < len; q++) line[q] = f[base + q * stride];
        envelope1d(line, w, len);
        for (let q = 0; q < len; q++) f[base + q * stride] = line[q];
      }
    }
  }
  return f;
}

/**
 * Signed distance about a boundary band, in mm:
 * off-band voxels carry the distance to the band; band voxels carry
 * -(distance to off-band - 1).
 */
export function signedBoundaryDistance(
  band: ArrayLike<number>,
  dims: Dims,
  spacing: Spacing,
): Float64Array {
  checkGrid(band, dims, "signedBoundaryDistance");
  if (spacing.length !== 3 || spacing.some((s) => !(s > 0) || !Number.isFinite(s))) {
    throw new Error(`signedBoundaryDistance: spacing must be three positive reals, got [${spacing}]`);
  }
  const n = band.length;
  const inBand = new Uint8Array(n);
  const offBand = new Uint8Array(n);
  let count = 0;
  for (let i = 0; i < n; i++) {
    const b = band[i] > 0.5 ? 1 : 0;
    inBand[i] = b;
    offBand[i] = b ? 0 : 1;
    count += b;
  }
  if (count === 0) throw new DegenerateInputError("boundary band is empty");
  if (count === n) throw new DegenerateInputError("boundary band covers the whole volume");
  const distToBand = edtSquared(offBand, dims, spacing);
  const distToOff = edtSquared(inBand, dims, spacing);
  const d = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    d[i] = inBand[i] ? -(Math.sqrt(distToOff[i]) - 1.0) : Math.sqrt(distToBand[i]);
  }
  return d;
}

function cePerVoxel(
  probs: ArrayLike<number>,
  labels: ArrayLike<number>,
): { ce: Float64Array; grad: Float64Array } {
  const n = probs.length;
  const ce = new Float64Array(n);
  const grad = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const s = probs[i];
    const g = labels[i];
    const clamped = s < CLAMP_EPS || s > 1.0 - CLAMP_EPS;
    const sc = Math.min(Math.max(s, CLAMP_EPS), 1.0 - CLAMP_EPS);
    ce[i] = -(g * Math.log(sc) + (1.0 - g) * Math.log(1.0 - sc));
    grad[i] = clamped ? 0.0 : (sc - g) / (sc * (1.0 - sc));
  }
  return { ce, grad };
}

export interface TopkResult {
  value: number;
  grad: Float64Array;
}

/**
 * Mean binary cross-entropy over the k% of voxels with the highest per-voxel
 * loss; ties break toward the lower linear index.  The selection is held
 * constant for the gradient, so grad is the CE derivative on selected voxels
 * and zero elsewhere, divided by the selection size.
 */
export function topkLoss(
  probs: ArrayLike<number>,
  labels: ArrayLike<number>,
  dims: Dims,
  kPercent: number,
): TopkResult {
  checkGrid(probs, dims, "topkLoss");
  checkGrid(labels, dims, "topkLoss");
  if (probs.length !== labels.length) {
    throw new Error(`topkLoss: shape mismatch, ${probs.length} vs ${labels.length}`);
  }
  if (!(kPercent > 0 && kPercent <= 100)) {
    throw new Error(`topkLoss: k must lie in (0, 100], got ${kPercent}`);
  }
  const n = probs.length;
  const { ce, grad } = cePerVoxel(probs, labels);
  const nSel = Math.ceil((kPercent * n) / 100.0);
  const order = Array.from({ length: n }, (_, i) => i);
  order.sort((a, b) => ce[b] - ce[a] || a - b);
  const selected = new Uint8Array(n);
  for (let i = 0; i < nSel; i++) selected[order[i]] = 1;
  let sum = 0.0;
  for (let i = 0; i < n; i++) if (selected[i]) sum += ce[i];
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) out[i] = selected[i] ? grad[i] / nSel : 0.0;
  return { value: sum / nSel, grad: out };
}

/** Sum over voxels of -p*ln(p) - (1-p)*ln(1-p), with 0*ln(0) = 0. Nats. */
export function entropySum(probs: ArrayLike<number>, dims: Dims): number {
  checkGrid(probs, dims, "entropySum");
  let h = 0.0;
  for (let i = 0; i < probs.length; i++) {
    const p = probs[i];
    if (p < 0 || p > 1) {
      throw new Error(`entropySum: probability out of [0, 1] at index ${i}: ${p}`);
    }
    if (p > 0) h -= p * Math.log(p);
    const q = 1.0 - p;
    if (q > 0) h -= q * Math.log(q);
  }
  return h;
}
