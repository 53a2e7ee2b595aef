"""How the labeled GH variants react to swapped and repeated labels.

    python3 demos/label_variants.py
"""
from ltda.gh import gh_k_exact, gh_perm_exact, gh_plain, gh_stab_exact
from ltda.metric_space import from_point_cloud

LINE = [(-1, 0), (0, 0), (1, 0)]


def show(title, X, Y):
    print(title)
    print(f"  registered {gh_k_exact(X, Y).value:g}")
    perm = gh_perm_exact(X, Y)
    print(f"  best permutation {perm.value:g} (sigma {tuple(s + 1 for s in perm.sigma)})")
    print(f"  stabilized {gh_stab_exact(X, Y).value:g}")
    print(f"  unlabeled {gh_plain(X, Y).value:g}")


def main():
    show("same three points, the two labels swapped",
         from_point_cloud(LINE, [[0], [1, 2]]), from_point_cloud(LINE, [[1, 2], [0]]))
    show("points 0, 1, 3 with labels (A, B, A) vs (A, B, B)",
         from_point_cloud([(0,), (1,), (3,)], [[0, 1], [2], [0, 1]]),
         from_point_cloud([(0,), (1,), (3,)], [[0, 1], [2], [2]]))


if __name__ == "__main__":
    main()
