"""
Fusion-weight sweep
===================

Score PF-DCP for a range of coarse:fine weight ratios on a folder of
hazy/ground-truth pairs, the way the indoor 4:1 and outdoor 80:1 settings
were chosen. With no arguments a few synthetic pairs are generated.

    python fusion_weight_sweep.py [HAZY_DIR GT_DIR]
"""
import sys
import tempfile
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from skimage import data

from pfdcp import DehazeParams, dehaze_pfdcp, load_image, psnr, save_image, ssim
from pfdcp.cli import _match_size, pair_dataset
from pfdcp.synth import smooth_transmission, synthesize_haze

if len(sys.argv) == 3:
    hazy_dir, gt_dir = Path(sys.argv[1]), Path(sys.argv[2])
else:
    tmp = Path(tempfile.mkdtemp())
    hazy_dir, gt_dir = tmp / "hazy", tmp / "gt"
    hazy_dir.mkdir(), gt_dir.mkdir()
    rng = np.random.default_rng(2)
    for name in ("coffee", "chelsea", "astronaut", "rocket"):
        clear = getattr(data, name)()[..., :3] / 255.0
        t = smooth_transmission(*clear.shape[:2], rng, 0.3, 0.9)
        save_image(clear, gt_dir / f"{name}.png")
        save_image(synthesize_haze(clear, rng.uniform(0.8, 1.0, 3), t), hazy_dir / f"{name}_1.png")

pairs, _ = pair_dataset(hazy_dir, gt_dir)
images = []
for hazy_path, gt_path in pairs:
    hazy = load_image(hazy_path)
    images.append((hazy, _match_size(load_image(gt_path), hazy.shape)))

ratios = [0, 0.25, 1, 4, 16, 80]
scores = []
for r in ratios:
    params = DehazeParams(fusion_low_weight=r, fusion_high_weight=1)
    row = []
    for hazy, gt in images:
        out = dehaze_pfdcp(hazy, params)[0]
        row.append((psnr(out, gt), ssim(out, gt)))
    scores.append(np.mean(row, axis=0))
    print(f"{r:>6}:1  PSNR {scores[-1][0]:6.2f}  SSIM {scores[-1][1]:.3f}")

scores = np.array(scores)
fig, ax = plt.subplots(figsize=(5, 3.5))
ax.semilogx([max(r, 0.1) for r in ratios], scores[:, 0], "o-")
ax.set_xlabel("coarse : fine weight")
ax.set_ylabel("mean PSNR (dB)")
fig.tight_layout()
fig.savefig("fusion_weight_sweep.png", dpi=80)
