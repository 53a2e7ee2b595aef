"""Class-aware vs class-naive landscapes on the scikit-learn digits.

Writes one CSV of flattened images per digit to demos/out/digits and runs
the pairwise command on three pairs with 10 samples per class.

    python3 demos/digits_pairwise.py
"""
from pathlib import Path

from click.testing import CliRunner
from sklearn.datasets import load_digits

from ltda.cli import main as cli


def main():
    out = Path(__file__).parent / "out" / "digits"
    out.mkdir(parents=True, exist_ok=True)
    digits = load_digits()
    for c in range(10):
        X = digits.data[digits.target == c]
        (out / f"{c}.csv").write_text("\n".join(",".join(repr(float(v)) for v in row) for row in X) + "\n")
    res = CliRunner().invoke(cli, ["pairwise", str(out), "--samples", "10", "--seed", "0",
                                   "--pairs", "1-8,4-6,3-5", "--out", str(out.parent / "pairwise.csv")])
    print(res.output, end="")


if __name__ == "__main__":
    main()
