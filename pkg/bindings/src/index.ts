export { boundaryMask, signedBoundaryDistance, topkLoss, entropySum, DegenerateInputError } from "./kernels.js";
export type { Dims, Spacing, TopkResult } from "./kernels.js";
export { readBvol, idx, FormatError } from "./bvol.js";
export type { Bvol, Kind } from "./bvol.js";
