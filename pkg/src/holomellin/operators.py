"""Linear differential and recurrence operators with polynomial coefficients.

A :class:`DiffOp` ``[q0, q1, ..., ql]`` stands for the equation
``q0(x) f(x) + q1(x) f'(x) + ... + ql(x) f^(l)(x) = 0``.

A :class:`RecOp` ``[p0, ..., pd]`` with ``offset`` ``s`` and inhomogeneous part
``{sym: r}`` stands for
``p0(n) F(n+s) + ... + pd(n) F(n+s+d) + sum r(n) * sym = 0``,
where each ``sym`` is an opaque constant such as ``f(1)`` or ``f'(1)``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

from .algebra import Poly, poly_gcd
from .errors import HolomellinError, MissingBoundaryValueError, ZeroOperatorError

__all__ = [
    "BoundarySymbol",
    "DerivAtOne",
    "MellinMoment",
    "DiffOp",
    "RecOp",
    "normalize_diffop",
    "normalize_recop",
    "apply_recop",
    "apply_diffop_series",
]


@dataclass(frozen=True, order=True)
class BoundarySymbol:
    """Opaque constant: ``f^(index)(1)`` for kind ``"deriv"``, the Mellin
    moment ``M(index)`` for kind ``"moment"``."""

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("deriv", "moment"):
            raise ValueError(f"unknown boundary symbol kind {self.kind!r}")
        if self.index < 0:
            raise ValueError("boundary symbol index must be nonnegative")

    def __str__(self):
        if self.kind == "moment":
            return f"M({self.index})"
        if self.index == 0:
            return "f(1)"
        return f"f^({self.index})(1)"


def DerivAtOne(j):
    return BoundarySymbol("deriv", j)


def MellinMoment(n0):
    return BoundarySymbol("moment", n0)


def _poly_tuple(polys, var):
    out = []
    for p in polys:
        if not isinstance(p, Poly):
            p = Poly.const(p, var)
        elif p.var != var:
            if p.is_constant():
                p = p.with_var(var)
            else:
                raise HolomellinError(f"coefficient {p} is not a polynomial in {var}")
        out.append(p)
    return tuple(out)


def _format_terms(terms):
    """Render ``[(poly, suffix), ...]`` as ``(x^3 - x)*Dx + 2*x - f(1)``."""
    chunks = []
    for poly, suffix in terms:
        if poly.is_zero():
            continue
        single = sum(1 for c in poly.coeffs if c) == 1
        if single:
            negative = poly.lc < 0
            body = str(-poly if negative else poly)
            if body == "1" and suffix:
                body = suffix
            elif suffix:
                body = f"{body}*{suffix}"
        else:
            negative = poly.lc < 0
            body = f"({-poly if negative else poly})"
            if suffix:
                body = f"{body}*{suffix}"
        if not chunks:
            chunks.append(("-" if negative else "") + body)
        else:
            chunks.append((" - " if negative else " + ") + body)
    return "".join(chunks) if chunks else "0"


@dataclass(frozen=True)
class DiffOp:
    coeffs: tuple

    def __post_init__(self):
        cs = list(_poly_tuple(self.coeffs, "x"))
        while cs and cs[-1].is_zero():
            cs.pop()
        if not cs:
            raise ZeroOperatorError("differential operator with all coefficients zero")
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    def coeff(self, j):
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else Poly((), "x")

    def derivative_relation(self):
        """The operator of ``d/dx (sum q_j f^(j))``."""
        out = [Poly((), "x")] * (len(self.coeffs) + 1)
        for j, q in enumerate(self.coeffs):
            out[j] = out[j] + q.derivative()
            out[j + 1] = out[j + 1] + q
        return DiffOp(tuple(out))

    def apply(self, func):
        """Apply to a :class:`~holomellin.algebra.RationalFunction`."""
        total = None
        deriv = func
        for q in self.coeffs:
            term = deriv * q
            total = term if total is None else total + term
            deriv = deriv.derivative()
        return total

    def __str__(self):
        terms = []
        for j in range(self.order, -1, -1):
            suffix = "" if j == 0 else ("Dx" if j == 1 else f"Dx^{j}")
            terms.append((self.coeffs[j], suffix))
        return _format_terms(terms)


@dataclass(frozen=True)
class RecOp:
    coeffs: tuple
    inhom: dict = field(default_factory=dict)
    offset: int = 0

    def __post_init__(self):
        cs = list(_poly_tuple(self.coeffs, "n"))
        while cs and cs[-1].is_zero():
            cs.pop()
        inhom = {}
        for sym, r in sorted(dict(self.inhom).items()):
            (r,) = _poly_tuple([r], "n")
            if not r.is_zero():
                inhom[sym] = r
        if not cs and not inhom:
            raise ZeroOperatorError("recurrence operator with all coefficients zero")
        # leading zero coefficients only move the offset
        low = 0
        while low < len(cs) and cs[low].is_zero():
            low += 1
        cs = cs[low:]
        object.__setattr__(self, "offset", self.offset + low if cs else 0)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "inhom", inhom)

    @property
    def order(self):
        return max(len(self.coeffs) - 1, 0)

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else Poly((), "n")

    def is_homogeneous(self):
        return not self.inhom

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Poly((), "n")

    def shifts(self):
        """``{absolute shift: coefficient}`` for the nonzero coefficients."""
        return {self.offset + i: p for i, p in enumerate(self.coeffs) if p}

    def homogeneous_part(self):
        return RecOp(self.coeffs, {}, self.offset)

    def __eq__(self, other):
        if not isinstance(other, RecOp):
            return NotImplemented
        return (
            self.coeffs == other.coeffs
            and self.offset == other.offset
            and self.inhom == other.inhom
        )

    def __hash__(self):
        return hash((self.coeffs, self.offset, tuple(self.inhom.items())))

    def __str__(self):
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            s = self.offset + i
            if self.offset == 0:
                suffix = "" if s == 0 else ("S" if s == 1 else f"S^{s}")
            elif s == 0:
                suffix = "M(n)"
            else:
                suffix = f"M(n{s:+d})"
            terms.append((self.coeffs[i], suffix))
        for sym, r in self.inhom.items():
            terms.append((r, str(sym)))
        return _format_terms(terms)


def _scalar_content(polys):
    nums = [c.numerator for p in polys for c in p.coeffs]
    dens = [c.denominator for p in polys for c in p.coeffs]
    return Fraction(reduce(gcd, nums), reduce(lcm, dens))


def _strip_content(polys):
    """Divide a family of polynomials by their monic gcd and rational content."""
    nonzero = [p for p in polys if p]
    g = reduce(poly_gcd, nonzero)
    if g.degree > 0:
        polys = [p.exact_div(g) for p in polys]
    c = _scalar_content([p for p in polys if p])
    return [p.scale(1 / c) for p in polys]


def normalize_diffop(op):
    """Remove polynomial and rational content, make the leading coefficient's
    leading scalar positive."""
    cs = _strip_content(list(op.coeffs))
    if cs[-1].lc < 0:
        cs = [-p for p in cs]
    return DiffOp(tuple(cs))


def normalize_recop(op):
    """Canonical form: lowest shift 0, content-free, positive leading scalar.

    Re-indexing a relation whose lowest shift is ``s`` substitutes
    ``n -> n - s`` into every coefficient (inhomogeneous terms included).
    """
    shifts = op.shifts()
    if not shifts:
        if not op.inhom:
            raise ZeroOperatorError("cannot normalize the zero recurrence")
        low, high = 0, -1
    else:
        low, high = min(shifts), max(shifts)
    zero = Poly((), "n")
    coeffs = [shifts.get(s, zero).shift(-low) for s in range(low, high + 1)]
    syms = list(op.inhom)
    inhom_polys = [op.inhom[s].shift(-low) for s in syms]
    stripped = _strip_content(coeffs + inhom_polys)
    coeffs, inhom_polys = stripped[: len(coeffs)], stripped[len(coeffs):]
    lead = coeffs[-1] if coeffs else inhom_polys[0]
    if lead.lc < 0:
        coeffs = [-p for p in coeffs]
        inhom_polys = [-p for p in inhom_polys]
    return RecOp(tuple(coeffs), dict(zip(syms, inhom_polys)), 0)


def _times(c, value):
    """Exact rational coefficient times a value of any numeric flavour."""
    if isinstance(value, (int, Fraction)):
        return c * value
    if isinstance(value, float):
        return float(c) * value
    return value * c.numerator / c.denominator


def apply_recop(op, seq, boundary_values=None):
    """Residuals of ``op`` on a finite sequence.

    Residual ``t`` evaluates the relation at ``n = t - offset`` so that it uses
    ``seq[t] ... seq[t + order]``; all residuals vanish iff the sequence
    satisfies the recurrence on that window.
    """
    boundary_values = boundary_values or {}
    missing = [s for s in op.inhom if s not in boundary_values]
    if missing:
        raise MissingBoundaryValueError(
            "no value supplied for " + ", ".join(str(s) for s in missing)
        )
    seq = list(seq)
    count = len(seq) - op.order
    if count <= 0:
        raise HolomellinError(
            f"sequence of length {len(seq)} is too short for a recurrence of order {op.order}"
        )
    out = []
    for t in range(count):
        n = t - op.offset
        acc = 0
        for i, p in enumerate(op.coeffs):
            if p:
                acc = acc + _times(p(n), seq[t + i])
        for sym, r in op.inhom.items():
            acc = acc + _times(r(n), boundary_values[sym])
        out.append(acc)
    return out


def apply_diffop_series(op, coeffs):
    """Apply a :class:`DiffOp` to a truncated power series.

    Returns the coefficients of the result; only the first
    ``len(coeffs) - op.order`` entries are free of truncation effects.
    """
    size = len(coeffs)
    out = [Fraction(0)] * size
    for j, q in enumerate(op.coeffs):
        for m, c in enumerate(q.coeffs):
            if not c:
                continue
            # x^m D^j sum f_k x^k = sum f_k k(k-1)..(k-j+1) x^(k-j+m)
            for k in range(j, size):
                e = k - j + m
                if e >= size:
                    break
                ff = 1
                for t in range(j):
                    ff *= k - t
                out[e] += c * ff * coeffs[k]
    return out
