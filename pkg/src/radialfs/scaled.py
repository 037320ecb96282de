"""Overflow-safe scaled values: x = mantissa * exp(log_scale).

The cylinder solver needs ratios like I_k(|xi| r) / I_k(|xi|) for |xi| up to
~1e3, far beyond the ~700 overflow threshold of unscaled modified Bessel
functions.  Products and sums are therefore carried as (mantissa, exponent)
pairs and only collapsed to a float once all large exponents have cancelled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SpecFunValue", "ScaledArray"]

#: exponent above which exp() would overflow a double
_EXP_MAX = 709.0


def _normalize(man, exp):
    """Bring nonzero mantissas into [1/e, e) by shifting integer exponent."""
    man = np.asarray(man, dtype=float)
    exp = np.asarray(exp, dtype=float)
    out_man = man.copy()
    out_exp = exp.copy()
    nz = out_man != 0.0
    if np.any(nz):
        shift = np.round(np.log(np.abs(out_man[nz])))
        out_man[nz] *= np.exp(-shift)
        out_exp[nz] += shift
    out_exp[~nz] = 0.0
    return out_man, out_exp


@dataclass(frozen=True)
class SpecFunValue:
    """A scalar special-function value stored as mantissa * exp(log_scale).

    The mantissa is kept normalized: zero, or with absolute value in
    [1/e, e).  ``value()`` reconstructs the plain float and raises
    OverflowError when the result is not representable.
    """

    mantissa: float
    log_scale: float

    @staticmethod
    def of(mantissa: float, log_scale: float = 0.0) -> "SpecFunValue":
        m, e = _normalize(mantissa, log_scale)
        return SpecFunValue(float(m), float(e))

    def value(self) -> float:
        if self.mantissa == 0.0:
            return 0.0
        if self.log_scale > _EXP_MAX:
            raise OverflowError(
                f"scaled value exp({self.log_scale:.1f}) exceeds float range"
            )
        return self.mantissa * np.exp(self.log_scale)

    def __mul__(self, other):
        if isinstance(other, SpecFunValue):
            return SpecFunValue.of(
                self.mantissa * other.mantissa, self.log_scale + other.log_scale
            )
        return SpecFunValue.of(self.mantissa * other, self.log_scale)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, SpecFunValue):
            return SpecFunValue.of(
                self.mantissa / other.mantissa, self.log_scale - other.log_scale
            )
        return SpecFunValue.of(self.mantissa / other, self.log_scale)

    def __neg__(self):
        return SpecFunValue(-self.mantissa, self.log_scale)

    def __add__(self, other):
        if not isinstance(other, SpecFunValue):
            other = SpecFunValue.of(other)
        if self.mantissa == 0.0:
            return other
        if other.mantissa == 0.0:
            return self
        ref = max(self.log_scale, other.log_scale)
        m = self.mantissa * np.exp(self.log_scale - ref) + other.mantissa * np.exp(
            other.log_scale - ref
        )
        return SpecFunValue.of(m, ref)

    def __sub__(self, other):
        if not isinstance(other, SpecFunValue):
            other = SpecFunValue.of(other)
        return self + (-other)


class ScaledArray:
    """Vectorized (mantissa, exponent) arithmetic over numpy arrays."""

    __slots__ = ("man", "exp")

    def __init__(self, man, exp=None, normalize: bool = True):
        man = np.asarray(man, dtype=float)
        exp = np.zeros_like(man) if exp is None else np.asarray(exp, dtype=float)
        man, exp = np.broadcast_arrays(man, exp)
        if normalize:
            man, exp = _normalize(man, exp)
        self.man = man
        self.exp = exp

    @staticmethod
    def from_log(logval) -> "ScaledArray":
        return ScaledArray(np.ones_like(np.asarray(logval, dtype=float)), logval)

    def __mul__(self, other):
        if isinstance(other, ScaledArray):
            return ScaledArray(self.man * other.man, self.exp + other.exp)
        return ScaledArray(self.man * np.asarray(other, dtype=float), self.exp)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScaledArray):
            return ScaledArray(self.man / other.man, self.exp - other.exp)
        return ScaledArray(self.man / np.asarray(other, dtype=float), self.exp)

    def __neg__(self):
        return ScaledArray(-self.man, self.exp, normalize=False)

    def __add__(self, other):
        if not isinstance(other, ScaledArray):
            other = ScaledArray(np.asarray(other, dtype=float))
        ref = np.maximum(self.exp, other.exp)
        # zero entries carry exponent 0; exclude them from the reference
        ref = np.where((self.man == 0) & (other.man != 0), other.exp, ref)
        ref = np.where((other.man == 0) & (self.man != 0), self.exp, ref)
        m = self.man * np.exp(
            np.minimum(self.exp - ref, 0.0)
        ) + other.man * np.exp(np.minimum(other.exp - ref, 0.0))
        return ScaledArray(m, ref)

    def __sub__(self, other):
        if not isinstance(other, ScaledArray):
            other = ScaledArray(np.asarray(other, dtype=float))
        return self + (-other)

    def abs(self) -> "ScaledArray":
        return ScaledArray(np.abs(self.man), self.exp, normalize=False)

    def to_float(self):
        """Collapse to plain floats; raises OverflowError on unrepresentable values."""
        bad = (self.man != 0.0) & (self.exp > _EXP_MAX)
        if np.any(bad):
            raise OverflowError("scaled array holds values beyond float range")
        out = self.man * np.exp(np.where(self.man == 0.0, 0.0, self.exp))
        return out
