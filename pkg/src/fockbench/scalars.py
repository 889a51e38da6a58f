"""Scalar backends: exact Gaussian rationals and tolerance-based floats.

Every piece of linear algebra in the package is generic over a Backend
object.  The exact backend works with QQi (complex numbers whose real and
imaginary parts are fractions.Fraction); the float backend works with the
builtin complex and a fixed comparison tolerance plus a stricter pivot
threshold for eliminations.
"""

from __future__ import annotations

from fractions import Fraction


class QQi:
    """Complex number with exact rational real/imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other):
        other = _coerce(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return QQi(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi((self.re * other.re + self.im * other.im) / d,
                   (self.im * other.re - self.re * other.im) / d)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def conj(self):
        return QQi(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        if self.im == 0:
            return f"QQi({self.re})"
        return f"QQi({self.re}, {self.im})"

    def to_complex(self):
        return complex(self.re) + 1j * complex(self.im)


def _coerce(v):
    if isinstance(v, QQi):
        return v
    if isinstance(v, (int, Fraction)):
        return QQi(v)
    raise TypeError(f"cannot mix {type(v).__name__} with QQi")


class ExactBackend:
    """Gaussian-rational arithmetic; comparisons are exact."""

    name = "exact"
    tolerance = 0

    def scalar(self, re, im=0):
        return QQi(re, im)

    @property
    def zero(self):
        return QQi(0)

    @property
    def one(self):
        return QQi(1)

    def is_null(self, x):
        return not x

    def conj(self, x):
        return x.conj()

    def pivot_ok(self, x):
        return bool(x)

    def pivot_size(self, x):
        # exact pivots are all equally good; prefer "simpler" entries
        return 1

    def from_json(self, v):
        return scalar_from_json(v, self)

    def to_json(self, x):
        return [_frac_to_json(x.re), _frac_to_json(x.im)]


class FloatBackend:
    """complex arithmetic with a comparison tolerance and pivot threshold."""

    name = "float"

    def __init__(self, tolerance=1e-9, pivot_threshold=1e-7):
        self.tolerance = tolerance
        self.pivot_threshold = pivot_threshold

    def scalar(self, re, im=0):
        return complex(re) + 1j * complex(im)

    @property
    def zero(self):
        return 0j

    @property
    def one(self):
        return 1 + 0j

    def is_null(self, x):
        return abs(x) <= self.tolerance

    def conj(self, x):
        return x.conjugate()

    def pivot_ok(self, x):
        return abs(x) > self.pivot_threshold

    def pivot_size(self, x):
        return abs(x)

    def from_json(self, v):
        return scalar_from_json(v, self)

    def to_json(self, x):
        return [x.real, x.imag]


EXACT = ExactBackend()
FLOAT = FloatBackend()


def _frac_to_json(f: Fraction):
    return f"{f.numerator}/{f.denominator}"


def _frac_from_json(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10 ** 12)
    raise ValueError(f"cannot parse rational from {v!r}")


def scalar_from_json(v, backend):
    """Parse a scalar from JSON: number, "num/den", or [re, im]."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex scalar must be [re, im], got {v!r}")
        re, im = v
    else:
        re, im = v, 0
    if backend.name == "exact":
        return QQi(_frac_from_json(re), _frac_from_json(im))
    return complex(float(_frac_from_json(re)), float(_frac_from_json(im)))
