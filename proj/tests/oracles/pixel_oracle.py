"""Independent pixel-ratio oracle for rendered PNG frames.

Usage: python3 pixel_oracle.py FRAME.png [...]

Reimplements the sensing chain with numpy and scipy.ndimage: brighten by 3.5
(round half up, cap 255), zero blood-red (hue <= 10 or >= 160 on the 0-180
scale, saturation > 15), near-black (gray < 5) and out-of-ROI pixels, keep
the largest 8-connected non-black component, fill its holes, count.
Frames were produced with `balloonscope --seed S render --angle A ...`.
"""
import sys

import numpy as np
from PIL import Image
from scipy import ndimage

ROI = (40, 40, 360, 360)  # x0, y0, x1, y1, half-open


def classify(rgb):
    v = np.minimum(np.floor(rgb.astype(np.float64) * 3.5 + 0.5), 255.0)
    r, g, b = v[..., 0], v[..., 1], v[..., 2]
    mx = v.max(axis=-1)
    mn = v.min(axis=-1)
    d = mx - mn
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(mx == r, 60.0 * (g - b) / d,
             np.where(mx == g, 120.0 + 60.0 * (b - r) / d, 240.0 + 60.0 * (r - g) / d))
        h = np.where(d == 0, 0.0, h)
        h = np.where(h < 0, h + 360.0, h) / 2.0
        s = np.where(mx == 0, 0.0, 255.0 * d / mx)
    red = ((h <= 10.0) | (h >= 160.0)) & (s > 15.0)
    gray = (299 * r + 587 * g + 114 * b + 500) // 1000
    dark = gray < 5
    yy, xx = np.mgrid[0:v.shape[0], 0:v.shape[1]]
    x0, y0, x1, y1 = ROI
    roi = (xx >= x0) & (xx < x1) & (yy >= y0) & (yy < y1)
    keep = ~red & ~dark & roi & (v.sum(axis=-1) > 0)
    return keep


def inside_count(path):
    rgb = np.asarray(Image.open(path).convert("RGB"))
    keep = classify(rgb)
    labels, n = ndimage.label(keep, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        return 0
    sizes = np.bincount(labels.ravel())[1:]
    largest = labels == (1 + int(np.argmax(sizes)))
    return int(ndimage.binary_fill_holes(largest).sum())


if __name__ == "__main__":
    for p in sys.argv[1:]:
        n = inside_count(p)
        print(p, n, 160000 - n, repr(n / 160000))
