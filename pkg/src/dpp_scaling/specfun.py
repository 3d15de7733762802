"""Real-argument Airy and Bessel functions.

Only what the limit kernels need: ``Ai``, ``Ai'``, ``J_nu`` and ``J_nu'`` for
real order ``nu >= 0``, plus ``log_gamma``.  Everything is vectorized over
numpy arrays; scalars in give floats out.

Airy
    ``x >= 10``: the exponentially decaying asymptotic expansion.
    ``-20 <= x < 10``: a local Taylor expansion around the nearest node of a
    table (spacing 1/2).  The Taylor coefficients follow from ``y'' = x y``.
    The table is built once, at import, by Taylor stepping: downward from
    ``x = 0`` (exact Maclaurin values) on the oscillatory side, and downward
    from ``x = 10`` (asymptotic values) on the decaying side, which is the
    stable direction for the recessive solution.

Bessel
    ascending series for ``x <= max(5, 2 sqrt(nu + 1))``,
    Hankel's expansion for ``x >= max(30, nu**2 / 2)``,
    Miller's backward recurrence with the Neumann-type normalization
    ``(x/2)**nu0 = sum_i (nu0 + 2i) Gamma(nu0 + i) / i! J_{nu0+2i}(x)``
    in between.
"""

from __future__ import annotations

import math

import numpy as np

AIRY_XMIN = -20.0
AIRY_XMAX = 200.0
BESSEL_NU_MAX = 50.0
BESSEL_X_MAX = 1.0e4

_AI0 = 0.355028053887817239260063186004183558  # 3^(-2/3) / Gamma(2/3)
_AIP0 = -0.258819403792806798405183560189203964  # -3^(-1/3) / Gamma(1/3)

_TAYLOR_TERMS = 34
_TABLE_STEP = 0.5
_ASYMPTOTIC_START = 10.0


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return float(arr) if scalar else arr


# ---------------------------------------------------------------- log-gamma


def log_gamma(x):
    """Natural log of the gamma function for ``x > 0``."""
    arr, scalar = _as_array(x)
    if np.any(~(arr > 0)):
        raise ValueError("log_gamma requires x > 0")
    flat = np.fromiter((math.lgamma(v) for v in arr.ravel()), float, arr.size)
    return _out(flat.reshape(arr.shape), scalar)


# -------------------------------------------------------------------- Airy


def _airy_taylor(x0, y0, dy0, h, terms=_TAYLOR_TERMS):
    """Ai and Ai' at ``x0 + h`` from values at ``x0`` (all broadcastable)."""
    c_prev2 = np.zeros_like(h)  # c_{k-1}
    c_prev = y0 * np.ones_like(h)  # c_k with k = 0
    c_cur = dy0 * np.ones_like(h)  # c_{k+1}
    value = c_prev + c_cur * h
    deriv = c_cur.copy()
    hk = h.copy()  # h**(k+1)
    hk_1 = np.ones_like(h)  # h**k
    # (k+2)(k+1) c_{k+2} = x0 c_k + c_{k-1}
    for k in range(0, terms):
        c_next = (x0 * c_prev + c_prev2) / ((k + 2) * (k + 1))
        hk_1 = hk
        hk = hk * h
        value = value + c_next * hk
        deriv = deriv + (k + 2) * c_next * hk_1
        c_prev2, c_prev, c_cur = c_prev, c_cur, c_next
    return value, deriv


def _airy_asymptotic(x):
    """Ai, Ai' for large positive x (error ~ exp(-2 zeta))."""
    zeta = 2.0 / 3.0 * x * np.sqrt(x)
    u = 1.0
    sum_u = np.ones_like(x)
    sum_v = np.ones_like(x)
    zk = np.ones_like(x)
    for k in range(1, 40):
        u = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        zk = zk * (-zeta)
        sum_u = sum_u + u / zk
        sum_v = sum_v + v / zk
        if np.all(np.abs(u / zk) < 1e-18):
            break
    pref = np.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    quarter = x**0.25
    return pref / quarter * sum_u, -pref * quarter * sum_v


def _build_airy_table():
    step = _TABLE_STEP
    n_neg = int(round(-AIRY_XMIN / step))
    n_pos = int(round(_ASYMPTOTIC_START / step))
    nodes = np.arange(-n_neg, n_pos + 1) * step
    ai = np.empty(nodes.size)
    aip = np.empty(nodes.size)
    zero = n_neg
    ai[zero], aip[zero] = _AI0, _AIP0
    h = np.array(-step)
    for i in range(zero, 0, -1):
        y, dy = _airy_taylor(nodes[i], ai[i], aip[i], h)
        ai[i - 1], aip[i - 1] = y, dy
    top = nodes.size - 1
    a_top, ap_top = _airy_asymptotic(np.array(nodes[top]))
    ai[top], aip[top] = a_top, ap_top
    for i in range(top, zero + 1, -1):
        y, dy = _airy_taylor(nodes[i], ai[i], aip[i], h)
        ai[i - 1], aip[i - 1] = y, dy
    return nodes, ai, aip


_AIRY_NODES, _AIRY_VALUES, _AIRY_DERIVS = _build_airy_table()


def airy_pair(x):
    """Return ``(Ai(x), Ai'(x))`` on the window ``[-20, 200]``.

    Values beyond roughly ``x = 104`` underflow to 0.
    """
    arr, scalar = _as_array(x)
    if np.any(~((arr >= AIRY_XMIN) & (arr <= AIRY_XMAX))):
        raise ValueError(f"Airy argument outside [{AIRY_XMIN}, {AIRY_XMAX}]")
    ai = np.empty(arr.shape)
    aip = np.empty(arr.shape)
    far = arr >= _ASYMPTOTIC_START
    if np.any(far):
        with np.errstate(under="ignore"):
            ai[far], aip[far] = _airy_asymptotic(arr[far])
    near = ~far
    if np.any(near):
        xs = arr[near]
        idx = np.rint((xs - AIRY_XMIN) / _TABLE_STEP).astype(int)
        x0 = _AIRY_NODES[idx]
        ai[near], aip[near] = _airy_taylor(
            x0, _AIRY_VALUES[idx], _AIRY_DERIVS[idx], xs - x0
        )
    if scalar:
        return float(ai), float(aip)
    return ai, aip


def airy_ai(x):
    """Airy function ``Ai(x)`` for real ``x`` in ``[-20, 200]``."""
    arr, scalar = _as_array(x)
    return _out(airy_pair(arr)[0], scalar)


def airy_ai_prime(x):
    """Derivative ``Ai'(x)`` for real ``x`` in ``[-20, 200]``."""
    arr, scalar = _as_array(x)
    return _out(airy_pair(arr)[1], scalar)


# ------------------------------------------------------------------ Bessel


def _check_bessel(nu, x):
    if not (0.0 <= nu <= BESSEL_NU_MAX + 1.0):
        raise ValueError(f"Bessel order {nu} outside [0, {BESSEL_NU_MAX}]")
    if np.any(~((x >= 0.0) & (x <= BESSEL_X_MAX))):
        raise ValueError(f"Bessel argument outside [0, {BESSEL_X_MAX:g}]")


def _series_threshold(nu):
    return max(5.0, 2.0 * math.sqrt(nu + 1.0))


def _hankel_threshold(nu):
    return max(30.0, 0.5 * nu * nu)


def _bessel_series(nu, x, derivative=False):
    """Ascending series; with ``derivative`` the termwise x-derivative."""
    x = np.asarray(x, dtype=float)
    pos = x > 0
    with np.errstate(divide="ignore"):
        logt = nu * np.log(np.where(pos, x, 1.0) / 2.0) - math.lgamma(nu + 1.0)
    term = np.where(pos, np.exp(logt), 1.0 if nu == 0 else 0.0)
    q = -(x * x) / 4.0
    if derivative:
        # d/dx (x/2)^(nu+2k) = (nu + 2k)/x (x/2)^(nu+2k)
        safe = np.where(pos, x, 1.0)
        total = term * nu / safe
        for k in range(1, 200):
            term = term * q / (k * (nu + k))
            contrib = term * (nu + 2 * k) / safe
            total = total + contrib
            if np.all(np.abs(contrib) <= 1e-17 * np.abs(total)) and k > 2:
                break
        if nu == 1.0:
            total = np.where(pos, total, 0.5)
        elif nu > 1.0:
            total = np.where(pos, total, 0.0)
        else:
            total = np.where(pos, total, np.inf if 0 < nu < 1 else 0.0)
        return total
    total = term.copy()
    for k in range(1, 200):
        term = term * q / (k * (nu + k))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)) and k > 2:
            break
    return total


def _hankel(nu, x):
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    coeff = 1.0
    xk = np.ones_like(x)
    last = np.full_like(x, np.inf)
    for k in range(1, 200):
        coeff = coeff * (mu - (2 * k - 1) ** 2) / (k * 8.0)
        xk = xk * x
        term = coeff / xk
        mag = np.abs(term)
        if np.any(mag > last) and np.all(mag < 1e-16):
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q = q + sign * term
        else:
            p = p + sign * term
        if np.all(mag < 1e-17):
            break
        last = mag
    phase = (0.5 * nu + 0.25) * math.pi
    cos_chi = np.cos(x) * math.cos(phase) + np.sin(x) * math.sin(phase)
    sin_chi = np.sin(x) * math.cos(phase) - np.cos(x) * math.sin(phase)
    return np.sqrt(2.0 / (math.pi * x)) * (p * cos_chi - q * sin_chi)


def _miller(nu, x):
    """J_nu and J_{nu+1} by normalized backward recurrence (x > 0)."""
    nu0 = nu - math.floor(nu)
    k_target = int(math.floor(nu))
    xmax = float(np.max(x))
    top = int(math.ceil(max(xmax, nu + 1) + 15.0 * xmax ** (1.0 / 3.0) + 30))
    if top % 2:
        top += 1
    j_next = np.zeros_like(x)  # order nu0 + k + 1
    j_cur = np.full_like(x, 1e-300)  # order nu0 + k
    norm = np.zeros_like(x)
    out = np.zeros_like(x)
    out_next = np.zeros_like(x)
    log_half_x = np.log(x / 2.0)
    for k in range(top, -1, -1):
        if k % 2 == 0:
            i = k // 2
            if i == 0:
                c = math.exp(math.lgamma(nu0 + 1.0))
            else:
                c = (nu0 + 2 * i) * math.exp(math.lgamma(nu0 + i) - math.lgamma(i + 1.0))
            norm = norm + c * j_cur
        if k == k_target:
            out = j_cur.copy()
            out_next = j_next.copy()
        if k == 0:
            break
        order = nu0 + k
        j_prev = (2.0 * order / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j_cur, j_next = j_cur * scale, j_next * scale
            norm, out, out_next = norm * scale, out * scale, out_next * scale
    factor = np.exp(nu0 * log_half_x) / norm
    return out * factor, out_next * factor


def _bessel_pair(nu, x):
    """J_nu(x) and J_{nu+1}(x) for an array x >= 0."""
    j = np.empty(x.shape)
    j1 = np.empty(x.shape)
    small = x <= _series_threshold(nu)
    large = (x >= _hankel_threshold(nu)) & ~small
    mid = ~(small | large)
    if np.any(small):
        with np.errstate(under="ignore"):
            j[small] = _bessel_series(nu, x[small])
            j1[small] = _bessel_series(nu + 1.0, x[small])
    if np.any(large):
        j[large] = _hankel(nu, x[large])
        j1[large] = _hankel(nu + 1.0, x[large])
    if np.any(mid):
        j[mid], j1[mid] = _miller(nu, x[mid])
    return j, j1


def bessel_j(nu, x):
    """Bessel function ``J_nu(x)`` for ``0 <= nu <= 50``, ``0 <= x <= 1e4``."""
    nu = float(nu)
    arr, scalar = _as_array(x)
    _check_bessel(nu, arr)
    return _out(_bessel_pair(nu, arr.ravel())[0].reshape(arr.shape), scalar)


def bessel_j_and_next(nu, x):
    """Return ``(J_nu(x), J_{nu+1}(x))``; cheaper than two calls."""
    nu = float(nu)
    arr, scalar = _as_array(x)
    _check_bessel(nu, arr)
    j, j1 = _bessel_pair(nu, arr.ravel())
    if scalar:
        return float(j[0]), float(j1[0])
    return j.reshape(arr.shape), j1.reshape(arr.shape)


def bessel_j_prime(nu, x):
    """Derivative ``J_nu'(x)``.

    Uses ``J_nu' = (nu/x) J_nu - J_{nu+1}``, or the termwise differentiated
    series for small x so that ``J_1'(0) = 1/2`` comes out exactly.
    """
    nu = float(nu)
    arr, scalar = _as_array(x)
    _check_bessel(nu, arr)
    flat = arr.ravel()
    out = np.empty(flat.shape)
    small = flat <= _series_threshold(nu)
    if np.any(small):
        with np.errstate(under="ignore", divide="ignore"):
            out[small] = _bessel_series(nu, flat[small], derivative=True)
    rest = ~small
    if np.any(rest):
        xs = flat[rest]
        j, j1 = _bessel_pair(nu, xs)
        out[rest] = nu / xs * j - j1
    return _out(out.reshape(arr.shape), scalar)
