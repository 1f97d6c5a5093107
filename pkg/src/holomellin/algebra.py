"""Exact arithmetic over the rationals.

Scalars are :class:`fractions.Fraction`.  Polynomials are dense, immutable and
tagged with the name of their variable (``"x"`` for the differential side,
``"n"`` for the recurrence side) so that the two worlds are never mixed by
accident.
"""

from fractions import Fraction
from functools import reduce
from math import gcd, isqrt, lcm

from .errors import HolomellinError, VariableMismatchError

__all__ = [
    "Poly",
    "RationalFunction",
    "to_scalar",
    "poly_arith",
    "poly_gcd",
    "poly_shift",
    "falling_factorial",
    "rational_roots",
    "nullspace",
    "format_scalar",
]


def to_scalar(value):
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


def format_scalar(c):
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class Poly:
    """Dense univariate polynomial; ``coeffs[i]`` multiplies ``var**i``.

    >>> (Poly([1, 1], "x") * Poly([-1, 1], "x")).coeffs == (-1, 0, 1)
    True
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs=(), var="x"):
        cs = [to_scalar(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def const(cls, c, var="x"):
        return cls([c], var)

    @classmethod
    def monomial(cls, k, c=1, var="x"):
        if k < 0:
            raise ValueError("negative exponent")
        return cls([0] * k + [c], var)

    @classmethod
    def gen(cls, var="x"):
        return cls([0, 1], var)

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self):
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self):
        return not self.coeffs

    def is_constant(self):
        return len(self.coeffs) <= 1

    def __bool__(self):
        return bool(self.coeffs)

    def coeff(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def low_order(self):
        """Index of the lowest nonzero coefficient (``-1`` for zero)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return -1

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.var == other.var and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def __repr__(self):
        return f"Poly({[format_scalar(c) for c in self.coeffs]}, {self.var!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            if k == 0:
                mono = ""
            elif k == 1:
                mono = self.var
            else:
                mono = f"{self.var}^{k}"
            mag = abs(c)
            if not mono:
                body = format_scalar(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_scalar(mag)}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.var != self.var:
                raise VariableMismatchError(
                    f"polynomials in {self.var!r} and {other.var!r} cannot be combined"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(other, self.var)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out, self.var)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Poly((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers of polynomials")
        result = Poly.const(1, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c):
        c = to_scalar(c)
        return Poly([c * a for a in self.coeffs], self.var)

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lc = other.lc
        quot = [Fraction(0)] * max(len(rem) - dd, 0)
        for k in range(len(rem) - 1 - dd, -1, -1):
            q = rem[k + dd] / lc
            quot[k] = q
            if q:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= q * b
        return Poly(quot, self.var), Poly(rem[:dd] if dd > 0 else (), self.var)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def monic(self):
        if not self.coeffs:
            return self
        return self.scale(1 / self.lc)

    def content(self):
        """Positive rational ``c`` with ``self / c`` integral and primitive."""
        if not self.coeffs:
            return Fraction(0)
        nums = reduce(gcd, (c.numerator for c in self.coeffs))
        dens = reduce(lcm, (c.denominator for c in self.coeffs))
        return Fraction(abs(nums), dens)

    def primitive(self):
        if not self.coeffs:
            return self
        return self.scale(1 / self.content())

    def derivative(self):
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:], self.var)

    def shift(self, k):
        """Return ``p(var + k)`` (Taylor shift by repeated Horner steps)."""
        k = to_scalar(k)
        if not k or len(self.coeffs) <= 1:
            return self
        out = list(self.coeffs)
        size = len(out)
        for i in range(size - 1):
            for j in range(size - 2, i - 1, -1):
                out[j] += k * out[j + 1]
        return Poly(out, self.var)

    def __call__(self, value):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def evalf(self, value):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * value + float(c)
        return acc

    def with_var(self, var):
        return Poly(self.coeffs, var)


def _same_var(a, b):
    if a.var != b.var:
        raise VariableMismatchError(
            f"polynomials in {a.var!r} and {b.var!r} cannot be combined"
        )


def poly_arith(a, b, op):
    """Apply ``op`` in ``{"add", "sub", "mul"}`` to two polynomials."""
    _same_var(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_gcd(a, b):
    _same_var(a, b)
    if a.is_zero() and b.is_zero():
        raise HolomellinError("gcd of two zero polynomials is undefined")
    while b:
        a, b = b, a % b
    return a.monic()


def poly_shift(p, k):
    return p.shift(k)


def falling_factorial(n_offset, length, var="n"):
    """``(n+m)(n+m-1)...(n+m-length+1)`` as a polynomial in ``n``."""
    if length < 0:
        raise HolomellinError("falling factorial with negative length")
    result = Poly.const(1, var)
    for j in range(length):
        result = result * Poly([n_offset - j, 1], var)
    return result


def _divisors(m):
    m = abs(m)
    small, large = [], []
    for d in range(1, isqrt(m) + 1):
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
    return small + large[::-1]


def rational_roots(p):
    """Rational roots of ``p`` with multiplicities, as ``{root: multiplicity}``.

    Candidates ``±r/s`` come from the divisors of the trailing and leading
    coefficients of the integral primitive part.
    """
    if p.is_zero():
        raise HolomellinError("the zero polynomial has every number as a root")
    roots = {}
    low = p.low_order()
    if low > 0:
        roots[Fraction(0)] = low
        p = Poly(p.coeffs[low:], p.var)
    q = p.primitive()
    if q.degree <= 0:
        return roots
    a0 = int(q.coeffs[0])
    an = int(q.lc)
    candidates = sorted(
        {Fraction(s * r, t) for r in _divisors(a0) for t in _divisors(an) for s in (1, -1)}
    )
    for cand in candidates:
        lin = Poly([-cand, 1], q.var)
        mult = 0
        while q.degree >= 1 and q(cand) == 0:
            q = q.exact_div(lin)
            mult += 1
        if mult:
            roots[cand] = mult
        if q.degree < 1:
            break
    return dict(sorted(roots.items()))


class RationalFunction:
    """Quotient of polynomials in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            raise TypeError("numerator must be a Poly")
        if den is None:
            den = Poly.const(1, num.var)
        elif not isinstance(den, Poly):
            den = Poly.const(den, num.var)
        _same_var(num, den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = Poly.const(1, num.var)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
        lc = den.lc
        object.__setattr__(self, "num", num.scale(1 / lc))
        object.__setattr__(self, "den", den.scale(1 / lc))

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @property
    def var(self):
        return self.num.var

    @classmethod
    def coerce(cls, value, var):
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, Poly):
            return cls(value)
        return cls(Poly.const(to_scalar(value), var))

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.degree == 0

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (Poly, int, Fraction)):
            return self == RationalFunction.coerce(other, self.var)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        num = str(self.num)
        if len(self.num.coeffs) - self.num.coeffs.count(0) > 1:
            num = f"({num})"
        return f"{num}/({self.den})"

    def __add__(self, other):
        other = RationalFunction.coerce(other, self.var)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalFunction.coerce(other, self.var))

    def __rsub__(self, other):
        return RationalFunction.coerce(other, self.var) - self

    def __mul__(self, other):
        other = RationalFunction.coerce(other, self.var)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalFunction.coerce(other, self.var)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other, self.var) / self

    def __pow__(self, k):
        if k < 0:
            return RationalFunction(self.den ** (-k), self.num ** (-k))
        return RationalFunction(self.num**k, self.den**k)

    def shift(self, k):
        return RationalFunction(self.num.shift(k), self.den.shift(k))

    def derivative(self):
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, value):
        return self.num(value) / self.den(value)


def nullspace(rows, ncols):
    """Basis of ``{v : rows @ v = 0}`` over the rationals.

    The basis comes from the reduced row echelon form, so it is canonical:
    each vector has a 1 in its own free column and 0 in the other free ones.
    """
    mat = [[Fraction(c) for c in row] for row in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [c * inv for c in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        basis.append(vec)
    return basis
