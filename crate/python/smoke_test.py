"""Smoke test for the metaplectic extension.

Build it first with `maturin develop --release` inside crates/py.
"""

import cmath
import math

import metaplectic as mp


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    ident = mp.SpElement([[1.0, 0.0], [0.0, 1.0]])
    assert close(mp.w1_sigma(ident, [0.0], [0.0]), 1.0, 1e-15)

    t = 0.15
    m = [[t, 0.0], [0.0, t]]
    want = cmath.exp(-1j * math.tan(t)) / math.cos(t)
    assert close(mp.star_exp(m, [1.0, 0.0]), want, 1e-14)
    assert close(mp.star_exp(m, [1.0, 0.0], order=40), want, 1e-12)

    k = mp.SuElement.random(1, 3)
    kinv = k.inverse()
    sign, scalar = mp.cocycle(k, kinv)
    assert sign in (1, -1) and close(scalar, sign, 1e-9)
    z, w = [0.2 + 0.1j], [-0.3 + 0.4j]
    assert close(mp.sigma_kernel(k, z, w), mp.sigma_kernel(mp.SuElement.from_matrix(k.matrix()), z, w), 1e-14)

    k = mp.SpElement.random_negative(1, 5).to_su()
    assert k.det_one_plus() < 0
    closed = mp.w0_sigma(k, [0.3 + 0.1j])
    quad = mp.w0_sigma_quadrature(k, [0.3 + 0.1j], nodes=80)
    assert close(closed, quad, 1e-6), (closed, quad)

    g = mp.SpElement([[-2.0, 0.0], [0.0, -0.5]])
    try:
        mp.w0_sigma(g.to_su(), [0.3 + 0.1j])
        raise AssertionError("expected AmbiguousPhaseError")
    except mp.AmbiguousPhaseError:
        pass
    mp.w0_sigma(g.to_su(), [0.3 + 0.1j], adjudicate=True)

    x = mp.SpLie.random(1, 2)
    assert close(mp.w1_exp(x, [0.4], [-0.2]), mp.w1_sigma(x.exp(), [0.4], [-0.2]), 1e-10)

    p = {(1, 0): 1.0}
    q = {(0, 1): 1.0}
    comm = mp.moyal_mul(p, q).get((0, 0), 0) - mp.moyal_mul(q, p).get((0, 0), 0)
    assert comm == -1j, comm

    try:
        mp.SpElement([[1.0, 1.0], [0.0, 2.0]])
        raise AssertionError("expected MetaplecticError")
    except mp.MetaplecticError:
        pass

    report = mp.run_suite("polar", n=1, trials=5, seed=2)
    assert report["failures"] == 0 and len(report["records"]) == 5
    assert "jacobi-bk" in mp.suite_names()
    print("smoke test passed")


if __name__ == "__main__":
    main()
