"""Smoke test for the subcut Python extension."""

import math

import subcut


def main():
    k3 = subcut.Graph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
    assert k3.cut_value([True, False, False]) == 2.0

    f = subcut.Oracle.cut(k3)
    assert f.is_submodular()
    value, grad, perm = f.envelope([0.5, 0.5, 0.5])
    assert value == 0.0 and len(grad) == 3 and sorted(perm) == [0, 1, 2]
    assert f.greedy_vertex([0, 1, 2]) == [2.0, 0.0, -2.0]

    p = subcut.Multilinear(3, [(3.0, [0, 1]), (-2.0, [0, 1, 2])])
    f1, f2 = subcut.ss_decompose(p)
    assert f1.is_submodular() and f2.is_submodular()
    for mask in range(8):
        x = [bool(mask >> j & 1) for j in range(3)]
        assert math.isclose(f1.evaluate(x) - f2.evaluate(x), p([float(b) for b in x]), abs_tol=1e-12)

    model = subcut.Model.maxcut(k3)
    assert model.summary() == "MODEL n=3 y=3 rows=10 targets=1"
    none = model.root(mode="none")
    assert (none.d1, none.d2, none.p, none.closed) == (3.0, 3.0, 2.0, 0.0)
    sub = model.root(mode="submodular")
    assert 0.0 < sub.closed <= 1.0 and sub.cuts > 0

    g = subcut.generate_g05(12, seed=1)
    report = subcut.Model.maxcut(g).root(mode="both", rounds=3)
    assert report.d2 <= report.d1 and report.p <= report.d2 + 1e-9

    poly = subcut.generate_autocorr(8, seed=2)
    assert {len(s) for _, s in poly.terms} <= {2, 4}
    assert subcut.Model.polynomial(poly).root(mode="ss", rounds=2).closed >= 0.0

    assert subcut.shifted_geometric_mean([0.0, 3.0]) == 1.0
    assert subcut.closed_gap(3.0, 2.5, 2.0) == 0.5

    try:
        subcut.Oracle.cut(subcut.Graph(2, [(0, 1, -1.0)]))
    except ValueError:
        pass
    else:
        raise AssertionError("negative weights must be rejected")

    print("python smoke test passed:", sub)


if __name__ == "__main__":
    main()
