"""Regenerate the binding parity fixtures.

Writes small seeded mask/map pairs with the toolkit's own serializers
so the checked-in .npy files are exactly what the CLI would produce.
Run from this directory (or anywhere; paths are script-relative).
"""
from pathlib import Path

import numpy as np

from faultbench.types import FaultMask
from faultbench.volume_io import save_mask

ROOT = Path(__file__).resolve().parent


def fresh(subdir: str) -> Path:
    path = ROOT / subdir
    path.mkdir(parents=True, exist_ok=True)
    for old in path.glob("*.npy"):
        old.unlink()
    return path


def main() -> None:
    rng = np.random.default_rng(20260815)

    # eval parity: three mask pairs, one of them degenerate (empty pred)
    pred_dir = fresh("eval/pred")
    gt_dir = fresh("eval/gt")
    for i in range(3):
        gt = rng.random((24, 32)) < 0.12
        pred = gt ^ (rng.random((24, 32)) < 0.05)
        if i == 2:
            pred = np.zeros_like(gt)
        save_mask(FaultMask(pred), pred_dir / f"section_{i:03d}.npy")
        save_mask(FaultMask(gt), gt_dir / f"section_{i:03d}.npy")

    # standardize parity: one thick blob
    std_dir = fresh("std")
    blob = np.zeros((20, 20), dtype=bool)
    blob[4:9, 3:15] = True
    blob[10:16, 8:12] = True
    save_mask(FaultMask(blob), std_dir / "input_000.npy")

    # ODS parity: two probability maps with distinct useful thresholds
    ods_pred = fresh("ods/pred")
    ods_gt = fresh("ods/gt")
    for i in range(2):
        gt = rng.random((16, 16)) < 0.15
        noise = rng.random((16, 16)) * 0.35
        pmap = np.where(gt, 0.55 + 0.4 * rng.random((16, 16)), noise)
        np.save(ods_pred / f"pair_{i}.npy", pmap.astype(np.float64))
        save_mask(FaultMask(gt), ods_gt / f"pair_{i}.npy")

    print("fixtures written under", ROOT)


if __name__ == "__main__":
    main()
