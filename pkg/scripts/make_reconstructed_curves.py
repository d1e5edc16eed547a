"""Regenerate the bundled gain curves in src/hgsqueeze/data/.

The published gain curves exist only as figures, so these files are
reconstructions: the ideal below-threshold gain at thresholds of 1x, 3.9x
and 6.2x the 260 mW TEM00 threshold, with 0.5% multiplicative Gaussian noise
(seed 0).  They are not digitized measurements.
"""

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "hgsqueeze" / "data"
REF_MW = 260.0
CURVES = {
    0: (1.0, [0, 10, 20, 30, 50, 80, 110, 140, 170, 200, 230]),
    1: (3.9, [0, 10, 20, 30, 50, 100, 150, 200, 250, 300, 340]),
    2: (6.2, [0, 10, 20, 30, 50, 100, 150, 200, 250, 300, 340]),
}


def main():
    rng = np.random.default_rng(0)
    for order, (ratio, powers) in CURVES.items():
        p = np.array(powers, dtype=float)
        g = 1.0 / (1.0 - np.sqrt(p / (ratio * REF_MW))) ** 2
        g = g * (1.0 + 0.005 * rng.standard_normal(p.size))
        lines = ["pump_mw,gain"] + [f"{pi:g},{gi:.4f}" for pi, gi in zip(p, g)]
        (OUT / f"gain_tem{order}0.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
