import math

import mpmath as mp
import numpy as np
import pytest

from dpp_scaling.ensemble import EnsembleSpec, make_map
from dpp_scaling.fredholm import (
    discretize, doubling_error, gap_convergence_report, gap_probability, trace,
)
from dpp_scaling.kernels import (
    AiryKernel, BesselKernel, DysonKernel, FiniteKernel, airy_trace, bessel_trace,
)


def _mp_sine_gap(a, b, m=40):
    """Nystrom determinant of the sine kernel in 30-digit arithmetic."""
    with mp.workdps(30):
        nodes, weights = zip(*[(x, w) for x, w in _mp_legendre(m)])
        half, mid = (mp.mpf(b) - a) / 2, (mp.mpf(b) + a) / 2
        xs = [mid + half * x for x in nodes]
        ws = [half * w for w in weights]
        mat = mp.matrix(m, m)
        for i in range(m):
            for j in range(m):
                d = xs[i] - xs[j]
                k = mp.mpf(1) if d == 0 else mp.sin(mp.pi * d) / (mp.pi * d)
                mat[i, j] = (1 if i == j else 0) - mp.sqrt(ws[i]) * k * mp.sqrt(ws[j])
        return float(mp.det(mat))


def _mp_legendre(m):
    out = []
    for k in range(1, m + 1):
        x = mp.cos(mp.pi * (k - mp.mpf(1) / 4) / (m + mp.mpf(1) / 2))
        for _ in range(50):
            p0, p1 = mp.mpf(1), x
            for j in range(2, m + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = m * (x * p1 - p0) / (x * x - 1)
            x = x - p1 / dp
        out.append((x, 2 / ((1 - x * x) * dp * dp)))
    return out


class ZeroKernel:
    def __call__(self, x, y):
        return np.zeros(np.broadcast(x, y).shape)


def test_zero_kernel():
    assert gap_probability(ZeroKernel(), (0.0, 3.0), 16) == 1.0
    assert gap_probability(ZeroKernel(), (0.0, 3.0), 16, method="lu") == 1.0


def test_dyson_small_interval():
    value = gap_probability(DysonKernel(), (0.0, 0.01), 20)
    assert abs(value - (1 - 0.01)) <= 1e-4
    assert value == pytest.approx(gap_probability(DysonKernel(), (0.0, 0.01), 40), abs=1e-14)


def test_dyson_against_extended_precision():
    assert gap_probability(DysonKernel(), (0.0, 1.0), 48) == pytest.approx(_mp_sine_gap(0, 1, 24),
                                                                           abs=1e-13)


def test_self_consistency():
    k = DysonKernel()
    assert abs(gap_probability(k, (0.0, 1.0), 48) - gap_probability(k, (0.0, 1.0), 64)) <= 1e-10


@pytest.mark.parametrize("kernel,interval", [
    (DysonKernel(), (0.0, 1.0)), (DysonKernel(), (-0.5, 0.5)), (DysonKernel(), (0.0, 2.5)),
    (AiryKernel(), (-2.0, 38.0)), (AiryKernel(), (0.0, 40.0)),
    (BesselKernel(0.0), (0.0, 1.0)), (BesselKernel(1.0), (0.0, 4.0)),
    (BesselKernel(0.5), (0.0, 2.0)), (BesselKernel(2.5), (0.0, 10.0)),
])
def test_doubling_and_lu(kernel, interval):
    assert doubling_error(kernel, interval, 48) <= 1e-9
    eig = gap_probability(kernel, interval, 48)
    lu = gap_probability(kernel, interval, 48, method="lu")
    assert abs(eig - lu) <= 1e-11 * abs(eig)
    assert 0.0 <= eig <= 1.0


def test_bessel_zero_gap_is_exponential():
    # hard-edge Bessel(0) kernel: E(0, s) = exp(-s/4)
    for s in [0.5, 1.0, 4.0, 10.0]:
        assert gap_probability(BesselKernel(0.0), (0.0, s), 48) == pytest.approx(math.exp(-s / 4),
                                                                                 rel=1e-13)


def test_lue_alpha_zero_hard_gap_exact_at_every_n():
    # the smallest LUE(alpha=0) eigenvalue is exponential with rate n
    for n in [3, 25, 100]:
        spec = EnsembleSpec.lue(n, alpha=0.0)
        k = FiniteKernel(spec, make_map(spec, "hard"))
        assert gap_probability(k, (0.0, 1.0), 48) == pytest.approx(math.exp(-0.25), rel=1e-12)


def test_monotone_under_nesting():
    for kernel, intervals in [
        (DysonKernel(), [(0.0, 0.2), (-0.1, 0.5), (-0.3, 1.0), (-1.0, 1.5)]),
        (AiryKernel(), [(1.0, 41.0), (0.0, 40.0), (-1.0, 39.0), (-3.0, 37.0)]),
    ]:
        vals = [gap_probability(kernel, j, 48) for j in intervals]
        assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_eigenvalues_in_unit_interval():
    spec = EnsembleSpec.gue(60)
    k = FiniteKernel(spec, make_map(spec, "bulk", t=0.3))
    disc = discretize(k, (-2.0, 3.0), 64)
    assert np.max(np.abs(disc.matrix - disc.matrix.T)) <= 1e-14
    ev = disc.eigenvalues()
    assert ev.min() >= -1e-8 and ev.max() <= 1 + 1e-8


def test_traces():
    for a, b in [(0.0, 1.0), (-2.0, 0.5), (3.0, 10.0)]:
        assert trace(DysonKernel(), (a, b), 32) == pytest.approx(b - a, abs=1e-12)
    assert trace(AiryKernel(), (0.0, 40.0), 64) == pytest.approx(airy_trace(0.0), abs=1e-7)
    assert trace(AiryKernel(), (0.0, math.inf), 64) == pytest.approx(airy_trace(0.0), abs=1e-7)
    assert trace(BesselKernel(1.0), (0.0, 10.0), 64) == pytest.approx(bessel_trace(1.0, 10.0),
                                                                      abs=1e-8)


def test_degenerate_and_bad_intervals():
    assert gap_probability(DysonKernel(), (0.3, 0.3)) == 1.0
    assert trace(DysonKernel(), (0.3, 0.3)) == 0.0
    with pytest.raises(ValueError):
        gap_probability(DysonKernel(), (1.0, 0.0))
    with pytest.raises(ValueError):
        gap_probability(DysonKernel(), (0.0, 1.0), method="qr")
    with pytest.raises(ValueError):
        gap_probability(DysonKernel(), (0.0, 1.0), 0)


def test_nonfinite_kernel_is_arithmetic_error():
    bad = lambda x, y: np.full(np.broadcast(x, y).shape, np.nan)
    with pytest.raises(ArithmeticError):
        gap_probability(bad, (0.0, 1.0), 8)


def test_gap_report_bulk():
    rows = gap_convergence_report(EnsembleSpec.gue(1), "bulk", (-0.5, 0.5), [25, 50, 100, 200], t=0.0)
    diffs = [r.difference for r in rows]
    assert all(b <= 1.1 * a for a, b in zip(diffs, diffs[1:]))
    assert diffs[-1] < 1e-3
    assert rows[0].gap_limit == pytest.approx(gap_probability(DysonKernel(), (-0.5, 0.5)), abs=1e-14)


def test_gap_report_degenerate_interval():
    rows = gap_convergence_report(EnsembleSpec.gue(1), "bulk", (0.2, 0.2), [10, 20], t=0.0)
    assert all(r.gap_n == 1.0 and r.gap_limit == 1.0 for r in rows)


def test_gap_report_hard_edge():
    rows = gap_convergence_report(EnsembleSpec.lue(1, alpha=0.0), "hard", (0.0, 1.0), [25, 200])
    for r in rows:
        assert r.difference <= 1e-12
        assert r.gap_limit == pytest.approx(math.exp(-0.25), rel=1e-13)
