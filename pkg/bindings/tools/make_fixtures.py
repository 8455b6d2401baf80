#!/usr/bin/env python3
"""Generate cross-language parity fixtures for the kernel bindings.

For each of the four kernels this writes 50 randomized inputs and the
reference outputs produced by the laseg package, as .bvol volumes plus a
manifest.json with scalar expectations.  The TypeScript test suite consumes
only these files.  Deterministic: rerunning reproduces identical fixtures.
"""
import json
import shutil
from pathlib import Path

import numpy as np

from laseg import (
    Spacing,
    TopKConfig,
    Volume,
    boundary_mask,
    entropy_sum,
    signed_boundary_distance,
    topk_loss,
    write_volume,
)

ROOT = Path(__file__).resolve().parent.parent / "fixtures"
N_CASES = 50


def _mask_volume(rng, dims, spacing, p_fg):
    data = (rng.random(dims) < p_fg).astype(np.float32)
    return Volume(data, spacing, "label")


def _spacing(rng):
    return Spacing(*(float(s) for s in rng.uniform(0.3, 3.0, size=3)))


def gen_boundary(rng, out):
    manifest = []
    for i in range(N_CASES):
        dims = (int(rng.integers(4, 15)), int(rng.integers(4, 15)), int(rng.integers(1, 5)))
        m = _mask_volume(rng, dims, Spacing(1.0, 1.0, 1.0), float(rng.uniform(0.05, 0.9)))
        band = boundary_mask(m)
        stem = f"case_{i:03d}"
        write_volume(m, out / f"{stem}_in")
        write_volume(band, out / f"{stem}_out")
        manifest.append({"stem": stem})
    return manifest


def gen_signed_dm(rng, out):
    manifest = []
    i = 0
    while i < N_CASES:
        dims = (int(rng.integers(6, 15)), int(rng.integers(6, 15)), int(rng.integers(2, 5)))
        sp = _spacing(rng)
        band = boundary_mask(_mask_volume(rng, dims, sp, float(rng.uniform(0.1, 0.6))))
        if not band.data.any() or band.data.all():
            continue
        dm = signed_boundary_distance(band, sp)
        stem = f"case_{i:03d}"
        write_volume(band, out / f"{stem}_in")
        write_volume(dm, out / f"{stem}_out")
        manifest.append({"stem": stem})
        i += 1
    return manifest


def gen_topk(rng, out):
    manifest = []
    ks = [10.0, 20.0, 50.0, 100.0]
    for i in range(N_CASES):
        dims = (int(rng.integers(3, 9)), int(rng.integers(3, 9)), int(rng.integers(2, 5)))
        sp = Spacing(1.0, 1.0, 1.0)
        s = Volume(rng.uniform(1e-3, 1.0 - 1e-3, size=dims).astype(np.float32), sp, "probability")
        g = Volume((rng.random(dims) < 0.5).astype(np.float32), sp, "label")
        k = ks[i % len(ks)]
        res = topk_loss(s, g, TopKConfig(k))
        stem = f"case_{i:03d}"
        write_volume(s, out / f"{stem}_probs")
        write_volume(g, out / f"{stem}_labels")
        write_volume(Volume(res.gradient, sp, "image"), out / f"{stem}_grad")
        manifest.append({"stem": stem, "k": k, "value": res.value})
    return manifest


def gen_entropy(rng, out):
    manifest = []
    for i in range(N_CASES):
        dims = (int(rng.integers(3, 11)), int(rng.integers(3, 11)), int(rng.integers(1, 5)))
        p = rng.random(dims).astype(np.float32)
        # sprinkle exact endpoints to exercise the 0*ln(0) convention
        p[rng.random(dims) < 0.05] = 0.0
        p[rng.random(dims) < 0.05] = 1.0
        vol = Volume(p, Spacing(1.0, 1.0, 1.0), "probability")
        stem = f"case_{i:03d}"
        write_volume(vol, out / f"{stem}_in")
        manifest.append({"stem": stem, "value": entropy_sum(vol)})
    return manifest


def main():
    if ROOT.exists():
        shutil.rmtree(ROOT)
    manifest = {}
    for name, gen, seed in (
        ("boundary", gen_boundary, 101),
        ("signed_dm", gen_signed_dm, 202),
        ("topk", gen_topk, 303),
        ("entropy", gen_entropy, 404),
    ):
        out = ROOT / name
        out.mkdir(parents=True)
        manifest[name] = gen(np.random.default_rng(seed), out)
    (ROOT / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote fixtures for {len(manifest)} kernels under {ROOT}")


if __name__ == "__main__":
    main()
