"""Smoke test for the fractal_approx extension module.

Build first, e.g. `pip install --no-build-isolation -e crates/python`
(needs maturin), then run `python crates/python/python/smoke_test.py`.
"""

import math

import fractal_approx as fa


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    p = fa.Partition(0.0, 1.0, n=4)
    s = fa.ScaleVector.constant(4, 0.3)
    assert p.segments == 4
    assert p.nodes == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert close(s.contraction, 0.3, 0.0)

    basis = fa.CardinalBasis(p, s)
    assert len(basis) == 5
    for k in range(5):
        e = [1.0 if j == k else 0.0 for j in range(5)]
        assert all(close(v, w, 1e-14) for v, w in zip(basis.node_values(e), e))

    r = fa.fit("poly:0,1", p, s, depth=3)
    assert all(close(a, x, 1e-12) for a, x in zip(r.alpha, p.nodes))
    assert r.collage_residual < 1e-10

    r = fa.fit(lambda x: math.sin(3 * x), p, s, depth=4)
    assert r.measured_l2_error <= r.collage_bound + 1e-8
    assert r.max_node_jump <= 1e-10
    assert len(r.samples) == 4**5 + 1

    zero = fa.ScaleVector([0.0] * 4)
    lhs = fa.fit("sin", p, zero, depth=2).alpha
    rhs = fa.hat_projection("sin", p)
    assert all(close(a, b, 1e-10) for a, b in zip(lhs, rhs))

    exact = {x: approx for x, _, approx in r.samples}
    value, bound = basis.evaluate(r.alpha, 0.375)
    assert close(value, exact[0.375], bound + 1e-12)

    try:
        fa.ScaleVector([1.0, 0.0])
    except ValueError as err:
        assert "|s| must be < 1" in str(err)
    else:
        raise AssertionError("expected ValueError")

    print("fractal_approx", fa.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
