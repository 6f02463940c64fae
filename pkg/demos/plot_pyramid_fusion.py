"""
Pyramid fusion of transmission maps
===================================

Run PF-DCP step by step and show the refined transmission map of every
pyramid level next to the fused and final maps.
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from skimage import data

from pfdcp import DehazeParams, dehaze_dcp, pfdcp_stages, psnr, ssim, synthesize_haze
from pfdcp.synth import smooth_transmission

rng = np.random.default_rng(1)
clear = data.astronaut() / 255.0
h, w = clear.shape[:2]
t_true = smooth_transmission(h, w, rng, 0.25, 0.9)
hazy = synthesize_haze(clear, [0.9, 0.9, 0.92], t_true)

params = DehazeParams(fusion_low_weight=4, fusion_high_weight=1)
stages = pfdcp_stages(hazy, params)
print(f"{len(stages.levels)} levels:", [lv.shape[:2] for lv in stages.levels])
print("shared atmospheric light:", np.round(stages.atmosphere, 3))

###############################################################################
# Coarser levels see a wider neighbourhood through the same 15x15 patch,
# so their maps are smoother and lighter.

n = len(stages.refined)
fig, axes = plt.subplots(1, n + 3, figsize=(2.4 * (n + 3), 3))
for k, t in enumerate(stages.refined):
    axes[k].imshow(t, cmap="gray", vmin=0, vmax=1)
    axes[k].set_title(f"level {k}")
axes[n].imshow(stages.fused, cmap="gray", vmin=0, vmax=1)
axes[n].set_title("fused")
axes[n + 1].imshow(stages.final, cmap="gray", vmin=0, vmax=1)
axes[n + 1].set_title("final")
axes[n + 2].imshow(t_true, cmap="gray", vmin=0, vmax=1)
axes[n + 2].set_title("true t")
for ax in axes:
    ax.axis("off")
fig.tight_layout()
fig.savefig("pyramid_fusion.png", dpi=80)

###############################################################################
# Compare against single-scale DCP.

dcp_out = dehaze_dcp(hazy, params)[0]
for name, img in (("hazy", hazy), ("DCP", dcp_out), ("PF-DCP", stages.dehazed)):
    print(f"{name:7s} PSNR {psnr(img, clear):6.2f}  SSIM {ssim(img, clear):.3f}")
