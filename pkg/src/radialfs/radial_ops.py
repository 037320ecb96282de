"""Discrete Bessel-operator calculus on radial quadrature grids.

The k-index Bessel operator D_k = d/dr + k/r replaces d/dr for radial
coefficients of mode k functions e^{i k theta} f_k(r, z): D_k maps a mode k
coefficient to a mode k-1 coefficient and D_{-k} to a mode k+1 coefficient.
Higher operators compose as D^n_k = D_{k-(n-1)} ... D_{k-1} D_k and the
general mixed derivative is D^{n-i}_{-k+i} D^i_k.

Grids are Gauss-Legendre, either on a finite interval (0, R) or mapped onto
(0, infinity) by r = c t / (1 - t).  There is never a node at r = 0, so the
k/r term is always evaluable; quadrature weights absorb the radial measure
r dr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "RadialGrid",
    "AxialGrid",
    "ModeField",
    "BesselOpSpec",
    "apply_bessel_op",
    "apply_mixed",
    "check_commutation",
    "project_mode",
    "leibniz_product",
    "compose_faadibruno",
    "set_partitions",
]


def _legendre_nodes(n: int):
    """Gauss-Legendre nodes on (-1, 1) with weights and barycentric weights."""
    x, w = leggauss(n)
    lam = (-1.0) ** np.arange(n) * np.sqrt((1 - x**2) * w)
    return x, w, lam


def _diff_matrix(nodes, lam):
    """Barycentric differentiation matrix, exact on degree n-1 polynomials."""
    n = len(nodes)
    d = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(d, 1.0)
    D = (lam[None, :] / lam[:, None]) / d
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Quadrature and differentiation on (0, R) for the measure r dr.

    Attributes
    ----------
    nodes : positive, strictly increasing radii (no node at 0 or R).
    weights : quadrature weights for integral f(r) r dr.
    dr_weights : weights for the plain measure dr.
    diff : dense differentiation matrix acting on node values.
    R : domain radius, ``math.inf`` for mapped grids.
    map_param : R for finite grids, the map constant c for r = c t/(1-t).
    """

    nodes: np.ndarray
    weights: np.ndarray
    dr_weights: np.ndarray
    diff: np.ndarray
    R: float
    kind: str
    map_param: float
    _t: np.ndarray = field(repr=False, default=None)
    _lam: np.ndarray = field(repr=False, default=None)

    @staticmethod
    def gauss(n: int, R: float = 1.0) -> "RadialGrid":
        """Gauss-Legendre grid on the finite interval (0, R)."""
        if R <= 0 or not math.isfinite(R):
            raise ValueError("R must be positive and finite")
        x, w, lam = _legendre_nodes(n)
        t = (x + 1) / 2
        r = R * t
        dr_w = w * R / 2
        D = _diff_matrix(t, lam) / R
        return RadialGrid(r, dr_w * r, dr_w, D, R, "legendre", R, t, lam)

    @staticmethod
    def gauss_mapped(n: int, c: float = 5.0) -> "RadialGrid":
        """Grid on (0, infinity) via the algebraic map r = c t / (1 - t)."""
        if c <= 0:
            raise ValueError("map constant must be positive")
        x, w, lam = _legendre_nodes(n)
        t = (x + 1) / 2
        r = c * t / (1 - t)
        jac = c / (1 - t) ** 2
        dr_w = (w / 2) * jac
        D = np.diag(1.0 / jac) @ _diff_matrix(t, lam)
        return RadialGrid(r, dr_w * r, dr_w, D, math.inf, "mapped", c, t, lam)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> complex:
        """integral f(r) r dr over the grid."""
        return np.tensordot(self.weights, values, axes=(0, 0))

    def _to_internal(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "legendre":
            return r / self.map_param
        return r / (self.map_param + r)

    def interpolate(self, values, r):
        """Barycentric evaluation of the nodal interpolant at radii ``r``.

        Stable for evaluation anywhere in [0, R], including the endpoints
        that carry no node.
        """
        tq = np.atleast_1d(self._to_internal(r))
        values = np.asarray(values)
        d = tq[:, None] - self._t[None, :]
        hit = np.abs(d) < 1e-15
        d[hit] = 1.0
        w = self._lam[None, :] / d
        w /= w.sum(axis=1, keepdims=True)
        w[hit.any(axis=1)] = 0.0
        w[hit] = 1.0
        out = w @ values
        return out[0] if np.isscalar(r) else out

    def boundary_value(self, values):
        """Interpolated value at r = R (finite grids only)."""
        if self.kind != "legendre":
            raise ValueError("boundary evaluation needs a finite grid")
        return self.interpolate(values, self.R)


@dataclass(frozen=True)
class AxialGrid:
    """Uniform periodic grid on [-L, L) with Fourier spectral derivatives."""

    L: float
    n: int

    @property
    def nodes(self) -> np.ndarray:
        return -self.L + 2 * self.L * np.arange(self.n) / self.n

    @property
    def dz(self) -> float:
        return 2 * self.L / self.n

    @property
    def frequencies(self) -> np.ndarray:
        """Spectral frequencies xi_j = pi j / L in fft order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dz)

    def derivative(self, values, order: int = 1) -> np.ndarray:
        """d^order/dz^order along the last axis, Fourier spectral."""
        if order == 0:
            return np.asarray(values, dtype=complex)
        vh = np.fft.fft(values, axis=-1)
        vh *= (1j * self.frequencies) ** order
        return np.fft.ifft(vh, axis=-1)


@dataclass(frozen=True, eq=False)
class ModeField:
    """Samples of a mode-k radial coefficient f_k on a radial (x axial) grid.

    ``values`` has shape (n_r,) for z-independent fields and (n_r, n_z)
    otherwise.  ``k`` may be None when an operator application has taken the
    field outside the tracked integer-mode ladder.
    """

    k: Optional[int]
    grid: RadialGrid
    values: np.ndarray
    axial: Optional[AxialGrid] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        if self.axial is None:
            if v.ndim != 1 or v.shape[0] != self.grid.n:
                raise ValueError("expected shape (n_r,) for z-independent field")
        else:
            if v.shape != (self.grid.n, self.axial.n):
                raise ValueError("expected shape (n_r, n_z)")

    @staticmethod
    def from_callable(grid: RadialGrid, f: Callable, k: Optional[int] = 0,
                      axial: Optional[AxialGrid] = None) -> "ModeField":
        """Sample f(r) or f(r, z) on the grid."""
        if axial is None:
            return ModeField(k, grid, np.asarray(f(grid.nodes), dtype=complex))
        rr, zz = np.meshgrid(grid.nodes, axial.nodes, indexing="ij")
        return ModeField(k, grid, np.asarray(f(rr, zz), dtype=complex), axial)

    def with_values(self, values, k="unset") -> "ModeField":
        return ModeField(self.k if k == "unset" else k, self.grid, values, self.axial)

    def __add__(self, other):
        if isinstance(other, ModeField):
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + other)

    def __sub__(self, other):
        if isinstance(other, ModeField):
            return self.with_values(self.values - other.values)
        return self.with_values(self.values - other)

    def __mul__(self, other):
        if isinstance(other, ModeField):
            k = None if (self.k is None or other.k is None) else self.k + other.k
            return self.with_values(self.values * other.values, k=k)
        return self.with_values(self.values * other)

    __rmul__ = __mul__


@dataclass(frozen=True)
class BesselOpSpec:
    """An operator D_{nu_1} o ... o D_{nu_n} d^p/dz^p (rightmost acts first).

    ``mixed(k, n, i)`` builds the canonical generalized derivative
    D^{n-i}_{-k+i} D^i_k; ``as_mixed(k)`` recovers (n, i) again, so the
    canonical expansion round-trips.
    """

    indices: tuple
    axial_order: int = 0

    @staticmethod
    def power(nu: float, n: int, axial_order: int = 0) -> "BesselOpSpec":
        """D^n_nu = D_{nu-(n-1)} ... D_{nu-1} D_nu."""
        return BesselOpSpec(tuple(nu - (n - 1) + j for j in range(n)), axial_order)

    @staticmethod
    def mixed(k: int, n: int, i: int, axial_order: int = 0) -> "BesselOpSpec":
        if not 0 <= i <= n:
            raise ValueError("need 0 <= i <= n")
        outer = BesselOpSpec.power(-k + i, n - i).indices
        inner = BesselOpSpec.power(k, i).indices
        return BesselOpSpec(outer + inner, axial_order)

    @property
    def order(self) -> int:
        return len(self.indices)

    def as_mixed(self, k: int):
        """Return (n, i) such that self == mixed(k, n, i), or None."""
        n = self.order
        for i in range(n + 1):
            if self.indices == BesselOpSpec.mixed(k, n, i, self.axial_order).indices:
                return n, i
        return None


def _track_mode(mode, nu):
    """Mode bookkeeping for one application of D_nu.

    D_m lowers a mode m coefficient to m-1, D_{-m} raises it to m+1; any
    other index leaves the integer-mode ladder and the mode becomes None.
    """
    if mode is None or nu != int(nu):
        return None
    nu = int(nu)
    if nu == mode:
        return mode - 1
    if nu == -mode:
        return mode + 1
    return None


def apply_bessel_op(spec: BesselOpSpec, f: ModeField) -> ModeField:
    """Apply the operator to a sampled field, tracking the resulting mode."""
    if spec.axial_order and f.axial is None:
        raise ValueError("axial derivative requested on a z-independent field")
    vals = f.values
    if spec.axial_order:
        vals = f.axial.derivative(vals, spec.axial_order)
    r = f.grid.nodes
    D = f.grid.diff
    mode = f.k
    for nu in reversed(spec.indices):
        shape = (-1,) + (1,) * (vals.ndim - 1)
        vals = D @ vals + (nu / r).reshape(shape) * vals
        mode = _track_mode(mode, nu)
    return ModeField(mode, f.grid, vals, f.axial)


def apply_mixed(f: ModeField, n: int, i: int, axial_order: int = 0) -> ModeField:
    """D^{n-i}_{-k+i} D^i_k d^axial/dz^axial applied to the mode-k field f."""
    if f.k is None:
        raise ValueError("field has no tracked mode")
    return apply_bessel_op(BesselOpSpec.mixed(f.k, n, i, axial_order), f)


def _l21(f: ModeField) -> float:
    v2 = np.abs(f.values) ** 2
    if f.axial is None:
        return math.sqrt(abs(2 * np.pi * f.grid.integrate(v2)))
    return math.sqrt(abs(2 * np.pi * f.grid.integrate(v2).sum() * f.axial.dz))


def check_commutation(nu: float, mu: float, n: int, m: int, f: ModeField) -> float:
    """Relative residual of D^n_nu D^m_mu = D^m_{mu+n} D^n_{nu-m} on f."""
    lhs = apply_bessel_op(
        BesselOpSpec.power(nu, n),
        apply_bessel_op(BesselOpSpec.power(mu, m), f),
    )
    rhs = apply_bessel_op(
        BesselOpSpec.power(mu + n, m),
        apply_bessel_op(BesselOpSpec.power(nu - m, n), f),
    )
    return _l21(lhs - rhs) / _l21(f)


def project_mode(psi: Callable, k: int, grid: RadialGrid,
                 axial: Optional[AxialGrid] = None,
                 n_theta: Optional[int] = None) -> ModeField:
    """Angular projection P_k[psi](r, z) = (1/2pi) int psi e^{-i k theta} dtheta.

    ``psi`` takes Cartesian arguments (x, y) or (x, y, z).  The trapezoid
    rule in theta is spectrally accurate for smooth psi; the default size
    4|k| + 16 resolves the e^{-i k theta} factor with margin.
    """
    m = n_theta if n_theta is not None else max(4 * abs(k) + 16, 16)
    theta = 2 * np.pi * np.arange(m) / m
    phase = np.exp(-1j * k * theta) / m
    r = grid.nodes
    x = r[:, None] * np.cos(theta)[None, :]
    y = r[:, None] * np.sin(theta)[None, :]
    if axial is None:
        vals = np.asarray(psi(x, y), dtype=complex) @ phase
        return ModeField(k, grid, vals)
    z = axial.nodes
    vals = np.empty((grid.n, axial.n), dtype=complex)
    for j, zj in enumerate(z):
        vals[:, j] = np.asarray(psi(x, y, zj), dtype=complex) @ phase
    return ModeField(k, grid, vals, axial)


def leibniz_product(f: ModeField, g: ModeField, spec: BesselOpSpec) -> float:
    """Residual of the product rule for D^{n-i}_{-k-q+i} D^i_{k+q} d^{p-n}_z (f g).

    The right-hand side is the triple binomial sum over derivative splittings
    of f (mode k) and g (mode q); the residual is relative to the direct
    application of ``spec`` to the product field.
    """
    if f.k is None or g.k is None:
        raise ValueError("both factors need tracked modes")
    k, q = f.k, g.k
    n = spec.order
    mix = spec.as_mixed(k + q)
    if mix is None:
        raise ValueError("spec is not a canonical mixed operator for mode k+q")
    _, i = mix
    pn = spec.axial_order
    lhs = apply_bessel_op(spec, f * g)
    acc = np.zeros_like(lhs.values)
    for j in range(i + 1):
        for ell in range(j, n - (i - j) + 1):
            for s2 in range(pn + 1):
                coef = (
                    math.comb(n - i, ell - j)
                    * math.comb(i, j)
                    * math.comb(pn, s2)
                )
                df = apply_mixed(f, n - (i - j) - ell + (i - j), i - j,
                                 axial_order=pn - s2)
                dg = apply_mixed(g, ell, j, axial_order=s2)
                acc = acc + coef * df.values * dg.values
    rhs = lhs.with_values(acc)
    denom = _l21(lhs)
    return _l21(lhs - rhs) / (denom if denom > 0 else 1.0)


def set_partitions(p: int):
    """All partitions of {1, ..., p} as tuples of sorted blocks."""
    return [tuple(sorted(part)) for part in _partitions_of(list(range(1, p + 1)))]


def _partitions_of(elems):
    if not elems:
        return [[]]
    first, rest = elems[0], elems[1:]
    out = []
    for k_sub in range(len(rest) + 1):
        for extra in combinations(rest, k_sub):
            block = tuple(sorted((first,) + extra))
            remaining = [x for x in rest if x not in extra]
            for sub in _partitions_of(remaining):
                out.append([block] + list(sub))
    return out


def compose_faadibruno(u_derivs: Sequence[Callable], f_radial: Callable,
                       k: int, ell: int, p: int, grid: RadialGrid,
                       n: Optional[int] = None, i: Optional[int] = None) -> float:
    """Residual of the radial Faa di Bruno formula for u composed with a mode-k
    function, projected onto mode ell.

    ``u_derivs`` lists u and its derivatives up to order p (entire scalar
    maps); ``f_radial`` is the z-independent radial coefficient callable.
    Both sides are computed through angular projection: the left side applies
    D^{n-i}_{-ell+i} D^i_ell to P_ell[u o f_hat], the right side sums
    P_{ell - |pi| k} [ u^(|pi|)(f_hat) * prod_B D^B_k f ] over partitions pi
    of {1, ..., p}.  Returns the max relative residual over all (n, i) with
    i <= n <= p, or the single requested pair.
    """
    if p > 2:
        raise ValueError("partition sum implemented for p <= 2")
    if len(u_derivs) < p + 1:
        raise ValueError("need u and its first p derivatives")
    fk = ModeField.from_callable(grid, f_radial, k=k)

    def u_of_fhat(m, theta_phase):
        # u^(m) evaluated at e^{i k theta} f(r), vectorized over (r, theta)
        return u_derivs[m](theta_phase * fk.values[:, None])

    m_theta = max(4 * (abs(k) * (p + 1) + abs(ell)) + 16, 32)
    theta = 2 * np.pi * np.arange(m_theta) / m_theta
    kphase = np.exp(1j * k * theta)[None, :]

    def project(plane_vals, mode):
        ph = np.exp(-1j * mode * theta) / m_theta
        return plane_vals @ ph

    pairs = [(n, i)] if n is not None else [
        (nn, ii) for nn in range(p + 1) for ii in range(nn + 1)
    ]
    worst = 0.0
    u_ell = ModeField(ell, grid, project(u_of_fhat(0, kphase), ell))
    for nn, ii in pairs:
        if p - nn > 0:
            continue  # z-independent: axial derivatives vanish on both sides
        lhs = apply_bessel_op(BesselOpSpec.mixed(ell, nn, ii), u_ell)
        acc = np.zeros(grid.n, dtype=complex)
        for part in set_partitions(p):
            m = len(part)
            blockprod = np.ones(grid.n, dtype=complex)
            for block in part:
                mb_i = sum(1 for e in block if e <= ii)
                mb_n = sum(1 for e in block if e <= nn)
                if len(block) - mb_n > 0:
                    blockprod = None  # axial factor of a z-independent field
                    break
                d = apply_mixed(fk, mb_n, mb_i)
                blockprod = blockprod * d.values
            if blockprod is None:
                continue
            plane = u_of_fhat(m, kphase) * blockprod[:, None]
            acc = acc + project(plane, ell - m * k)
        rhs = ModeField(None, grid, acc)
        denom = max(_l21(lhs), _l21(u_ell))
        worst = max(worst, _l21(lhs - rhs) / (denom if denom > 0 else 1.0))
    return worst
