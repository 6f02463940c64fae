"""
Dark channel and atmospheric light
==================================

Add synthetic haze to a clear photo, then look at how the dark channel and
the airlight estimate depend on the patch size.
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from skimage import data

from pfdcp import dark_channel, estimate_atmosphere, smooth_transmission, synthesize_haze

rng = np.random.default_rng(0)
clear = data.coffee() / 255.0
h, w = clear.shape[:2]

# haze thickens toward the top of the frame
depth = np.linspace(1.0, 0.2, h)[:, None] + 0.3 * smooth_transmission(h, w, rng, 0, 1)
t = np.exp(-1.2 * depth)
hazy = synthesize_haze(clear, [0.92, 0.93, 0.95], t)

###############################################################################
# The dark channel of the clear image is close to zero almost everywhere;
# haze lifts it in proportion to 1 - t.

fig, axes = plt.subplots(2, 3, figsize=(12, 6))
axes[0, 0].imshow(clear)
axes[0, 0].set_title("clear")
axes[1, 0].imshow(hazy)
axes[1, 0].set_title("hazy")
for col, patch in enumerate((3, 15), start=1):
    axes[0, col].imshow(dark_channel(clear, patch), cmap="gray", vmin=0, vmax=1)
    axes[0, col].set_title(f"clear, dark channel {patch}x{patch}")
    dark = dark_channel(hazy, patch)
    axes[1, col].imshow(dark, cmap="gray", vmin=0, vmax=1)
    a = estimate_atmosphere(hazy, dark, 0.001)
    axes[1, col].set_title(f"hazy, {patch}x{patch}, A={np.round(a, 3)}")
for ax in axes.flat:
    ax.axis("off")
fig.tight_layout()
fig.savefig("dark_channel.png", dpi=80)
print("mean dark channel, clear:", dark_channel(clear, 15).mean().round(4))
print("mean dark channel, hazy: ", dark_channel(hazy, 15).mean().round(4))
