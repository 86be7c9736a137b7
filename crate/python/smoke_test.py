"""Smoke test for the pymatfn extension module."""

import cmath
import math

import pymatfn as mf


def close(x, y, tol):
    return abs(x - y) <= tol * max(1.0, abs(y))


def main():
    exp_set = mf.ParameterSet([[1.0]], [[1.0]], [[[1.0]]])
    r = mf.eval(exp_set, 1.0)
    assert close(r["value"][0][0], math.e, 1e-14), r
    assert r["verdict"] == "AllFiniteZ"

    tag, margin = mf.classify(mf.ParameterSet([[1]], [[1]], [[[0.5]]] * 3, [[[2.0]]]), 1.0)
    assert tag == "BoundaryAbsolute" and abs(margin - 0.5) < 1e-15

    g = mf.gamma([[2.0, 1.0], [0.0, 3.0]])
    assert close(g[0][0], 1.0, 1e-13) and close(g[0][1], 1.0, 1e-13) and close(g[1][1], 2.0, 1e-13)

    diag2 = mf.ParameterSet(
        [[1, 0], [0, 1.5]],
        [[2.2, 0], [0, 1.8]],
        [[[1.2, 0], [0, 0.8]], [[0.7, 0], [0, 1.4]]],
        [[[2.5, 0], [0, 1.9]], [[1.6, 0], [0, 2.3]]],
    )
    reports = mf.verify(diag2, 0.3)
    assert reports and all(rep["residual"] <= 1e-9 for rep in reports), reports

    beta11 = mf.ParameterSet(
        [[1, 0], [0, 1.5]],
        [[1, 0], [0, 2]],
        [[[1.5, 0.2], [0, 0.9]]],
        [[[3, 0.2], [0, 2.4]]],
    )
    rep = mf.integral(beta11, 0.5)
    series = mf.eval(beta11, 0.5)["value"]
    diff = max(abs(a - b) for ra, rb in zip(rep["value"], series) for a, b in zip(ra, rb))
    assert diff < 1e-10, diff

    mono = mf.ParameterSet([[1.0]], [[1.0]], [], [[[1.5]]])
    v = mf.frac_integral(mono, 0.5, 0.4)
    assert abs(v[0][0]) > 0

    lag = mf.ParameterSet([[1.0]], [[1.0]], [[[0.0]]])
    val = mf.special_value("laguerre", lag, 0.25, degree=1)
    assert close(val[0][0], 0.75, 1e-14)
    j0 = mf.special_value("bessel_maitland", mf.ParameterSet([[1.0]], [[0.0]]), 1.0)
    assert close(j0[0][0].real, 0.22389077914123567, 1e-12)

    back = mf.ParameterSet.from_json(diag2.to_json())
    assert back.to_json() == diag2.to_json()

    try:
        mf.eval(mf.ParameterSet([[1]], [[1]], [[[0.5]]] * 3, [[[2.0]]]), 2.0)
    except mf.DomainError:
        pass
    else:
        raise AssertionError("divergent point accepted")

    assert isinstance(mf.eval(exp_set, 1j)["value"][0][0], complex)
    assert close(mf.eval(exp_set, 1j)["value"][0][0], cmath.exp(1j), 1e-14)
    print("pymatfn smoke test: ok")


if __name__ == "__main__":
    main()
