/**
 * Minimal reader for the .bvol volume format.
 *
 * A volume is a `<stem>.json` header plus a `<stem>.raw` payload of
 * little-endian float32 values in x-fastest order:
 *
 *   idx(x, y, z) = x + nx * (y + ny * z)
 */
import { readFileSync } from "node:fs";

export type Kind = "image" | "probability" | "distance" | "label";

export interface Bvol {
  dims: [number, number, number];
  spacingMm: [number, number, number];
  kind: Kind;
  data: Float32Array;
}

export class FormatError extends Error {}

export function idx(x: number, y: number, z: number, nx: number, ny: number): number {
  return x + nx * (y + ny * z);
}

const KINDS = new Set(["image", "probability", "distance", "label"]);

export function readBvol(stem: string): Bvol {
  const header = JSON.parse(readFileSync(`${stem}.json`, "utf8"));
  if (header.magic !== "BVOL1") {
    throw new FormatError(`bad magic in ${stem}.json: ${header.magic}`);
  }
  if (header.byte_order !== "LE" || header.dtype !== "f32") {
    throw new FormatError(`unsupported encoding in ${stem}.json`);
  }
  const dims = header.dims as [number, number, number];
  const spacing = header.spacing_mm as [number, number, number];
  if (!Array.isArray(dims) || dims.length !== 3 || dims.some((d) => !Number.isInteger(d) || d < 1)) {
    throw new FormatError(`bad dims in ${stem}.json`);
  }
  if (!Array.isArray(spacing) || spacing.length !== 3 || spacing.some((s) => !(s > 0) || !Number.isFinite(s))) {
    throw new FormatError(`bad spacing in ${stem}.json`);
  }
  if (!KINDS.has(header.kind)) {
    throw new FormatError(`bad kind in ${stem}.json: ${header.kind}`);
  }
  const raw = readFileSync(`${stem}.raw`);
  const n = dims[0] * dims[1] * dims[2];
  if (raw.byteLength !== 4 * n) {
    throw new FormatError(`payload length mismatch in ${stem}.raw: ${raw.byteLength} vs ${4 * n}`);
  }
  const data = new Float32Array(n);
  for (let i = 0; i < n; i++) data[i] = raw.readFloatLE(4 * i);
  return { dims, spacingMm: spacing, kind: header.kind, data };
}
