"""Scalar fields: exact Gaussian rationals, complex floats, and symbolic scalars.

All linear algebra in this package is generic over a small field adapter
(:class:`FieldOps`).  The exact field is the workhorse; the float and
symbolic fields exist for the orbit scanner.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable


class GaussianRational:
    """An element a + b*i of Q(i) with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        # skip re-wrapping: arithmetic overwhelmingly passes Fractions back in
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if type(other) is GaussianRational or isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.re and not o.im:
            return self
        if not self.re and not self.im:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.im:
            if not o.im:
                return GaussianRational(self.re * o.re)
            return GaussianRational(self.re * o.re, self.re * o.im)
        if not o.im:
            return GaussianRational(self.re * o.re, self.im * o.re)
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm_sq()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- structure ----------------------------------------------------------

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        return f"QI({self})"

    def __str__(self):
        return format_scalar(self)


QI = GaussianRational

_TERM = re.compile(
    r"\s*([+-]?)\s*(?:(\d+(?:/\d+)?)\s*(i?)|(i))\s*"
)


def parse_scalar(text: str) -> GaussianRational:
    """Parse "a/b+c/d i" style strings, e.g. "3/2-1/4i", "2", "-i"."""
    s = text.strip()
    if not s:
        raise ValueError("empty scalar string")
    re_part = Fraction(0)
    im_part = Fraction(0)
    pos = 0
    seen_re = seen_im = False
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None:
            raise ValueError(f"bad scalar string: {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        if m.group(4) is not None or m.group(3) == "i":
            if seen_im:
                raise ValueError(f"repeated imaginary term in scalar string: {text!r}")
            seen_im = True
            im_part = sign if m.group(4) is not None else Fraction(m.group(2)) * sign
        else:
            if seen_re:
                raise ValueError(f"repeated real term in scalar string: {text!r}")
            seen_re = True
            re_part = Fraction(m.group(2)) * sign
        pos = m.end()
    return GaussianRational(re_part, im_part)


def format_scalar(x: GaussianRational) -> str:
    if x.im == 0:
        return str(x.re)
    imag = f"{abs(x.im)}i"
    if x.re == 0:
        return imag if x.im > 0 else "-" + imag
    sign = "+" if x.im > 0 else "-"
    return f"{x.re}{sign}{imag}"


@dataclass(frozen=True)
class FieldOps:
    """Adapter making the linear algebra generic over the scalar type.

    ``is_zero`` carries the equality policy: exact for Q(i), tolerance for
    floats, simplification for symbolic scalars.  ``mag`` is used only for
    pivot selection and may be any nonnegative size surrogate.
    """

    name: str
    zero: Any
    one: Any
    imag: Any
    conj: Callable[[Any], Any]
    is_zero: Callable[[Any], bool]
    mag: Callable[[Any], Any]
    from_rational: Callable[[Fraction], Any]
    to_complex: Callable[[Any], complex]
    exact: bool

    def from_int(self, k: int):
        return self.from_rational(Fraction(k))

    def is_real(self, x) -> bool:
        return self.is_zero(x - self.conj(x))

    def eq(self, a, b) -> bool:
        return self.is_zero(a - b)


EXACT = FieldOps(
    name="exact",
    zero=QI(0),
    one=QI(1),
    imag=QI(0, 1),
    conj=lambda x: x.conjugate(),
    is_zero=lambda x: x.is_zero(),
    mag=lambda x: x.norm_sq(),
    from_rational=lambda q: QI(q),
    to_complex=complex,
    exact=True,
)


def float_field(tolerance: float = 1e-9) -> FieldOps:
    """Complex floats with an explicit comparison tolerance."""
    tol = float(tolerance)
    return FieldOps(
        name=f"float(tol={tol:g})",
        zero=0j,
        one=1 + 0j,
        imag=1j,
        conj=lambda x: x.conjugate(),
        is_zero=lambda x: abs(x) <= tol,
        mag=lambda x: abs(x),
        from_rational=lambda q: complex(q),
        to_complex=lambda x: x,
        exact=False,
    )


def symbolic_field() -> FieldOps:
    """Scalars in Q(i) extended by real sympy symbols (orbit scanner only)."""
    import sympy

    def _is_zero(x):
        if x == 0:
            return True
        s = sympy.simplify(sympy.expand(x))
        return s == 0 or s.is_zero is True

    return FieldOps(
        name="symbolic",
        zero=sympy.Integer(0),
        one=sympy.Integer(1),
        imag=sympy.I,
        conj=lambda x: sympy.conjugate(x),
        is_zero=_is_zero,
        mag=lambda x: 0,  # first-nonzero pivoting
        from_rational=lambda q: sympy.Rational(q.numerator, q.denominator),
        to_complex=lambda x: complex(x),
        exact=False,
    )


def qi_to_sympy(x: GaussianRational):
    import sympy

    return sympy.Rational(x.re.numerator, x.re.denominator) + sympy.I * sympy.Rational(
        x.im.numerator, x.im.denominator
    )
