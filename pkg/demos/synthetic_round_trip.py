"""
Haze model round trip
=====================

With the true airlight and transmission, recovery undoes the haze model
exactly; the only loss comes from the transmission floor t0.
"""
import numpy as np
from skimage import data

from pfdcp import recover, synthesize_haze
from pfdcp.synth import smooth_transmission

rng = np.random.default_rng(3)
clear = data.chelsea() / 255.0
a = np.array([0.85, 0.9, 0.95])

for t_min in (0.3, 0.15, 0.05):
    t = smooth_transmission(*clear.shape[:2], rng, t_min)
    hazy = synthesize_haze(clear, a, t)
    err = np.abs(recover(hazy, a, t, t0=0.1) - clear).max()
    print(f"t >= {t_min:.2f}: max recovery error {err:.2e}")
