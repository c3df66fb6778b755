"""The six corruption transforms across their severity ladder.

Each transform maps an image in [0, 1] back into [0, 1]; severity 0 is
always the identity.  On a synthetic test card (smooth gradient plus a
checkerboard patch) the printed statistics show what each transform does:
brightness shifts the mean, contrast stretches the spread, the noises
raise pixel-level deviation, pixelate and blur wash out local detail.
"""

import numpy as np

from labelvar.corruptions import CORRUPTIONS

H = W = 24
yy, xx = np.mgrid[0:H, 0:W]
card = 0.25 + 0.5 * (xx / (W - 1))  # horizontal gradient
card[6:18, 6:18] = (yy[6:18, 6:18] + xx[6:18, 6:18]) % 2  # checkerboard patch
image = np.clip(card, 0.0, 1.0)[:, :, None]

edge_energy = lambda img: float(np.abs(np.diff(img[:, :, 0], axis=1)).mean())

print(f"test card: mean {image.mean():.3f}, std {image.std():.3f}, "
      f"edge energy {edge_energy(image):.3f}\n")

for name in sorted(CORRUPTIONS):
    fn = CORRUPTIONS[name]
    print(name)
    for severity in range(5):
        out = fn(image, severity, seed=42)
        assert out.min() >= 0.0 and out.max() <= 1.0
        delta = float(np.abs(out - image).mean())
        print(
            f"  severity {severity}: mean {out.mean():.3f}  std {out.std():.3f}  "
            f"edges {edge_energy(out):.3f}  mean |delta| {delta:.3f}"
        )
    print()
