"""Special functions for the radial operator calculus.

Evaluators for the Bessel function J_k, exponentially scaled modified Bessel
functions I_k and K_k, the modified Struve function L_k, and the rescaled
Struve combination

    M_k(s) = 2^(k-1) sqrt(pi) Gamma(k+1/2) (I_k(s) - L_k(s))
           = s^k * integral_0^{pi/2} exp(-s cos t) sin(t)^{2k} dt,

which generates the antiderivatives of s^k I_k(s) and s^k K_k(s) used by the
cylinder Green's-function estimates.  J, I, K, L are delegated to scipy
(relative accuracy ~1e-14 over the ranges used here); M_k is evaluated from
its integral representation with doubling Gauss-Legendre panels because the
I_k - L_k difference cancels catastrophically for s beyond ~15.

All orders are non-negative integers.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special as sp

from .scaled import SpecFunValue

__all__ = [
    "bessel_j",
    "bessel_i_scaled",
    "bessel_k_scaled",
    "struve_l",
    "struve_m",
    "struve_m_ratio",
    "iv_ratio",
    "bessel_j_mixed_chain",
]


def _check_order(k) -> int:
    if int(k) != k or k < 0:
        raise ValueError(f"order must be a non-negative integer, got {k!r}")
    return int(k)


def bessel_j(k: int, x):
    """Bessel function of the first kind J_k(x) for integer k >= 0, x >= 0."""
    k = _check_order(k)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("argument must be non-negative")
    out = sp.jv(k, x)
    return float(out) if out.ndim == 0 else out


def ive(k: int, s):
    """exp(-s) I_k(s), vectorized."""
    return sp.ive(_check_order(k), s)


def kve(k: int, s):
    """exp(+s) K_k(s), vectorized."""
    return sp.kve(_check_order(k), s)


def bessel_i_scaled(k: int, s: float) -> SpecFunValue:
    """Modified Bessel I_k(s) as a scaled value (mantissa ~ e^{-s} I_k)."""
    k = _check_order(k)
    if s < 0:
        raise ValueError("argument must be non-negative")
    return SpecFunValue.of(sp.ive(k, s), s)


def bessel_k_scaled(k: int, s: float) -> SpecFunValue:
    """Modified Bessel K_k(s) as a scaled value (mantissa ~ e^{+s} K_k).

    K_k diverges at s = 0, which is rejected.
    """
    k = _check_order(k)
    if s <= 0:
        raise ValueError("K_k requires s > 0")
    return SpecFunValue.of(sp.kve(k, s), -s)


def struve_l(k: int, s):
    """Modified Struve function L_k(s)."""
    return sp.modstruve(_check_order(k), np.asarray(s, dtype=float))


def struve_m_ratio(k: int, s, tol: float = 1e-12, max_doublings: int = 12):
    """M_k(s) / s^k = integral_0^{pi/2} exp(-s cos t) sin(t)^{2k} dt.

    Bounded by pi/2 for all s >= 0, so it never overflows; large powers of s
    are attached by the callers only where they cancel.  Panels are doubled
    until successive values agree to ``tol`` in the sup norm.
    """
    k = _check_order(k)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("argument must be non-negative")
    xq, wq = leggauss(64)
    prev = None
    val = None
    npanel = 1
    for _ in range(max_doublings):
        edges = np.linspace(0.0, np.pi / 2, npanel + 1)
        mid = (edges[1:] + edges[:-1]) / 2
        half = (edges[1:] - edges[:-1]) / 2
        theta = (mid[:, None] + half[:, None] * xq[None, :]).ravel()
        wts = (half[:, None] * wq[None, :]).ravel()
        integ = np.exp(-s[..., None] * np.cos(theta)) * np.sin(theta) ** (2 * k)
        val = integ @ wts
        if prev is not None and np.max(np.abs(val - prev)) <= tol * max(
            1.0, np.max(np.abs(val))
        ):
            break
        prev = val
        npanel *= 2
    return val if val.ndim else float(val)


def struve_m(k: int, s):
    """Rescaled modified Struve function of the second kind M_k(s).

    Satisfies 0 <= M_k(s) <= s^{k-1} for k >= 1 and 0 <= M_0(s) <= 2/s;
    M_0 diverges like pi/2 at 0+ but is undefined at s = 0 together with
    k = 0 in this scaling (rejected).
    """
    k = _check_order(k)
    scalar = np.isscalar(s)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if k == 0 and np.any(s == 0):
        raise ValueError("M_0 requires s > 0")
    out = s**k * struve_m_ratio(k, s)
    return float(out[0]) if scalar else out


def iv_ratio(k: int, s_num, s_den):
    """I_k(s_num) / I_k(s_den) computed in scaled space.

    Safe for s_num <= s_den up to ~1e3 where the unscaled I would overflow.
    """
    s_num = np.asarray(s_num, dtype=float)
    return sp.ive(k, s_num) / sp.ive(k, s_den) * np.exp(s_num - s_den)


def _mixed_indices(k: int, n: int, i: int):
    """Index sequence of D^{n-i}_{-k+i} D^i_k, rightmost applied first."""
    if not 0 <= i <= n:
        raise ValueError("need 0 <= i <= n")
    first = [k - (i - 1) + j for j in range(i)]          # D^i_k
    second = [(-k + i) - (n - i - 1) + j for j in range(n - i)]  # D^{n-i}_{-k+i}
    return second + first


def bessel_j_mixed_chain(k: int, n: int, i: int, r):
    """Evaluate D^{n-i}_{-k+i} D^i_k J_k(r) by expanding each Bessel-operator
    step through J_m'(r) = (J_{m-1}(r) - J_{m+1}(r)) / 2.

    The expansion produces combinations sum c * J_m(r) / r^p whose inverse
    powers cancel analytically; evaluating them tests that cancellation, so
    the result is compared by callers against (-1)^{n-i} J_{k+n-2i}(r).
    Requires r > 0 (the r^{-p} terms are removable but not evaluable at 0).
    """
    k = _check_order(k)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("chain evaluation requires r > 0")
    terms = {(k, 0): 1.0}
    for nu in reversed(_mixed_indices(k, n, i)):
        new: dict = {}

        def put(key, c):
            if c != 0.0:
                new[key] = new.get(key, 0.0) + c

        for (m, p), c in terms.items():
            put((m - 1, p), c / 2)
            put((m + 1, p), -c / 2)
            put((m, p + 1), c * (nu - p))
        terms = new
    out = np.zeros_like(r)
    for (m, p), c in terms.items():
        out += c * sp.jv(m, r) / r**p
    return out
