"""Compare the landscape pipeline with the closed forms of the three worked examples.

    python3 demos/worked_examples.py
"""
import numpy as np

from ltda.landscape import default_grid, element_name, generalized_landscape
from ltda.oracles import golden_cases


def main():
    for case in golden_cases():
        Z = default_grid(case.lms, case.poset, 101)
        gl = generalized_landscape(case.lms, case.poset, case.degree, Z, case.n_max)
        print(f"{case.name}: {len(gl.paths)} paths, {case.n_max} levels")
        for c, p in enumerate(gl.elements):
            err = max(abs(gl.values[n - 1, i, c] - case.formula(p, n, z))
                      for n in range(1, case.n_max + 1) for i, z in enumerate(Z))
            peak = gl.values[:, :, c].max(axis=1)
            print(f"  {element_name(p):>4}: level peaks {np.round(peak, 3).tolist()}, max error {err:.1e}")


if __name__ == "__main__":
    main()
