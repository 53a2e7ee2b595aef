"""Two interleaved squares on the unit circle, sweeping the edge weight.

Writes demos/out/sweep.csv (weight fraction, degree, r, value of the top
level at the union) for plotting. Flat stretches rise with the weight and
vanish once they reach the tent above them.

    python3 demos/weight_sweep.py
"""
import math
from pathlib import Path

import numpy as np

from ltda.landscape import generalized_landscape, restrict_to
from ltda.metric_space import from_point_cloud
from ltda.poset import power_poset, weight_constant


def main():
    angles = np.arange(4) * math.pi / 2
    pts = [(math.cos(t), math.sin(t)) for t in angles]
    pts += [(math.cos(t + math.pi / 4), math.sin(t + math.pi / 4)) for t in angles]
    lms = from_point_cloud(pts, [range(4), range(4, 8)])
    H = math.sqrt(2 - math.sqrt(2))
    Z = np.linspace(0, 2, 81)
    rows = ["fraction,degree,r,value"]
    for frac in np.round(np.arange(0.2, 0.95, 0.1), 1):
        P = weight_constant(power_poset(2), frac * H)
        for j in (0, 1):
            s = restrict_to(generalized_landscape(lms, P, j, Z, 2), {0, 1})
            rows += [f"{frac},{j},{r!r},{v!r}" for r, v in zip(Z, s.values[0])]
            print(f"weight {frac:.1f}H degree {j}: peak {s.values[0].max():.3f}")
    out = Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    (out / "sweep.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
