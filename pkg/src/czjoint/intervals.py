"""Closed-interval arithmetic with outward rounding.

Scalars are :class:`Interval` values; vectors and matrices are
:class:`IntervalMatrix` objects backed by a pair of numpy arrays so that
mid/rad and interval-matrix products stay vectorized.

Every arithmetic result is widened by one unit in the last place on each
side, which keeps enclosures valid under round-to-nearest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real

import numpy as np

__all__ = [
    "EmptyIntervalError",
    "IntervalDomainError",
    "Interval",
    "IntervalMatrix",
    "iv_add",
    "iv_sub",
    "iv_mul",
    "mid_rad",
    "imat_vec",
    "sqr",
    "hull_of_points",
]

_EPS = np.finfo(float).eps


class EmptyIntervalError(ValueError):
    """Raised when an operation receives an empty interval."""


class IntervalDomainError(ArithmeticError):
    """Raised when an interval operation leaves its domain (e.g. 1/[−1,1])."""


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


@dataclass(frozen=True)
class Interval:
    """Closed real interval ``[lo, hi]``.

    The empty interval is a distinct state (``Interval.empty()``), never an
    interval with ``lo > hi``.
    """

    lo: float
    hi: float
    is_empty: bool = False

    def __post_init__(self):
        if self.is_empty:
            return
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]: lo > hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def empty(cls) -> Interval:
        return cls(math.nan, math.nan, is_empty=True)

    @classmethod
    def point(cls, x: float) -> Interval:
        return cls(x, x)

    @classmethod
    def from_mid_rad(cls, mid: float, rad: float) -> Interval:
        if rad < 0:
            raise ValueError("radius must be nonnegative")
        return cls(_down(mid - rad), _up(mid + rad))

    # -- queries -------------------------------------------------------------
    def _check(self):
        if self.is_empty:
            raise EmptyIntervalError("operation on an empty interval")

    @property
    def mid(self) -> float:
        self._check()
        if self.lo == self.hi:
            return self.lo
        return 0.5 * self.lo + 0.5 * self.hi

    @property
    def rad(self) -> float:
        self._check()
        return 0.5 * (self.hi - self.lo)

    @property
    def width(self) -> float:
        self._check()
        return self.hi - self.lo

    def contains(self, x) -> bool:
        if self.is_empty:
            return False
        if isinstance(x, Interval):
            return x.is_empty or (self.lo <= x.lo and x.hi <= self.hi)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def intersect(self, other: Interval) -> Interval:
        if self.is_empty or other.is_empty:
            return Interval.empty()
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return Interval.empty()
        return Interval(lo, hi)

    def hull(self, other: Interval) -> Interval:
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    # -- arithmetic ----------------------------------------------------------
    @staticmethod
    def _coerce(x) -> Interval:
        if isinstance(x, Interval):
            return x
        if isinstance(x, (Real, np.floating, np.integer)):
            return Interval(float(x), float(x))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return iv_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return iv_sub(self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return iv_sub(other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return iv_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return iv_div(self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return iv_div(other, self)

    def __neg__(self):
        self._check()
        return Interval(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        self._check()
        if k == 0:
            return Interval(1.0, 1.0)
        if k == 1:
            return self
        if k % 2 == 0:
            if self.lo >= 0:
                lo, hi = self.lo**k, self.hi**k
            elif self.hi <= 0:
                lo, hi = self.hi**k, self.lo**k
            else:
                lo, hi = 0.0, max(self.lo**k, self.hi**k)
        else:
            lo, hi = self.lo**k, self.hi**k
        return Interval(max(_down(lo), 0.0) if k % 2 == 0 else _down(lo), _up(hi))

    def __repr__(self):
        if self.is_empty:
            return "Interval.empty()"
        return f"Interval({self.lo!r}, {self.hi!r})"


def _nonempty(*xs: Interval):
    for x in xs:
        if x.is_empty:
            raise EmptyIntervalError("operation on an empty interval")


def iv_add(a: Interval, b: Interval) -> Interval:
    _nonempty(a, b)
    return Interval(_down(a.lo + b.lo), _up(a.hi + b.hi))


def iv_sub(a: Interval, b: Interval) -> Interval:
    _nonempty(a, b)
    return Interval(_down(a.lo - b.hi), _up(a.hi - b.lo))


def iv_mul(a: Interval, b: Interval) -> Interval:
    _nonempty(a, b)
    p = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    return Interval(_down(min(p)), _up(max(p)))


def iv_div(a: Interval, b: Interval) -> Interval:
    _nonempty(a, b)
    if b.lo <= 0.0 <= b.hi:
        raise IntervalDomainError(f"division by an interval containing zero: {b!r}")
    p = (a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi)
    return Interval(_down(min(p)), _up(max(p)))


def sqr(a: Interval) -> Interval:
    return a**2


def mid_rad(x: Interval) -> tuple[float, float]:
    """Return ``(mid(x), rad(x))``."""
    return x.mid, x.rad


class IntervalMatrix:
    """Componentwise interval matrix (or vector when 1-D).

    Stored as ``lo``/``hi`` float arrays of equal shape.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = np.array(lo, dtype=float)
        hi = lo.copy() if hi is None else np.array(hi, dtype=float)
        if lo.shape != hi.shape:
            raise ValueError(f"shape mismatch between lo {lo.shape} and hi {hi.shape}")
        if np.isnan(lo).any() or np.isnan(hi).any():
            raise ValueError("interval endpoints must not be NaN")
        if (lo > hi).any():
            raise ValueError("lo must not exceed hi componentwise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        self.lo = lo
        self.hi = hi

    @classmethod
    def from_intervals(cls, entries) -> IntervalMatrix:
        """Build from a (nested) sequence of :class:`Interval` or reals."""
        arr = np.array(entries, dtype=object)
        lo = np.empty(arr.shape)
        hi = np.empty(arr.shape)
        for idx, e in np.ndenumerate(arr):
            if isinstance(e, Interval):
                if e.is_empty:
                    raise EmptyIntervalError("interval matrix entries must be non-empty")
                lo[idx], hi[idx] = e.lo, e.hi
            else:
                lo[idx] = hi[idx] = float(e)
        return cls(lo, hi)

    @classmethod
    def from_mid_rad(cls, mid, rad) -> IntervalMatrix:
        mid = np.asarray(mid, dtype=float)
        rad = np.asarray(rad, dtype=float)
        if (rad < 0).any():
            raise ValueError("radius must be nonnegative")
        return cls(np.nextafter(mid - rad, -np.inf), np.nextafter(mid + rad, np.inf))

    @property
    def shape(self):
        return self.lo.shape

    @property
    def ndim(self):
        return self.lo.ndim

    @property
    def mid(self) -> np.ndarray:
        return 0.5 * self.lo + 0.5 * self.hi

    @property
    def rad(self) -> np.ndarray:
        # Rounded up so [mid - rad, mid + rad] still covers [lo, hi].
        m = self.mid
        r = np.maximum(self.hi - m, m - self.lo)
        return np.where(self.lo == self.hi, 0.0, np.nextafter(r, np.inf))

    def __getitem__(self, idx):
        lo, hi = self.lo[idx], self.hi[idx]
        if np.ndim(lo) == 0:
            return Interval(float(lo), float(hi))
        return IntervalMatrix(lo, hi)

    def __len__(self):
        return len(self.lo)

    def to_intervals(self) -> list:
        return np.vectorize(Interval, otypes=[object])(self.lo, self.hi).tolist()

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(self.lo <= x) and np.all(x <= self.hi))

    def subset_of(self, other: IntervalMatrix) -> bool:
        return bool(np.all(other.lo <= self.lo) and np.all(self.hi <= other.hi))

    def centered(self) -> IntervalMatrix:
        """``N − mid(N)``, a zero-centred matrix with the same radius."""
        r = self.rad
        return IntervalMatrix(-r, r)

    def __sub__(self, other):
        if isinstance(other, IntervalMatrix):
            return IntervalMatrix(np.nextafter(self.lo - other.hi, -np.inf),
                                  np.nextafter(self.hi - other.lo, np.inf))
        other = np.asarray(other, dtype=float)
        return IntervalMatrix(np.nextafter(self.lo - other, -np.inf),
                              np.nextafter(self.hi - other, np.inf))

    def __add__(self, other):
        if isinstance(other, IntervalMatrix):
            return IntervalMatrix(np.nextafter(self.lo + other.lo, -np.inf),
                                  np.nextafter(self.hi + other.hi, np.inf))
        other = np.asarray(other, dtype=float)
        return IntervalMatrix(np.nextafter(self.lo + other, -np.inf),
                              np.nextafter(self.hi + other, np.inf))

    def __repr__(self):
        return f"IntervalMatrix(lo={self.lo.tolist()!r}, hi={self.hi.tolist()!r})"


def imat_vec(N: IntervalMatrix, v) -> IntervalMatrix:
    """Enclose ``{N̂ v : N̂ ∈ N}`` as an interval vector."""
    v = np.asarray(v, dtype=float)
    if N.ndim != 2 or v.ndim != 1 or N.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch: N is {N.shape}, v is {v.shape}")
    a = N.lo * v
    b = N.hi * v
    lo = np.minimum(a, b).sum(axis=1)
    hi = np.maximum(a, b).sum(axis=1)
    # Rigorous bound on the floating-point summation error.
    err = (N.shape[1] + 1) * _EPS * np.maximum(np.abs(a), np.abs(b)).sum(axis=1)
    return IntervalMatrix(np.nextafter(lo - err, -np.inf), np.nextafter(hi + err, np.inf))


def hull_of_points(points) -> IntervalMatrix:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return IntervalMatrix(pts.min(axis=0), pts.max(axis=0))
