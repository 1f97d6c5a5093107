"""Surface syntax for operators, and the JSON exchange format.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``*``/``/``, which bind tighter than binary ``+``/``-``)::

    relation := expr [ "=" "0" ]
    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("-" | "+") unary | power
    power    := atom [ "^" exponent ]
    atom     := INT | "x" | "n" | "Dx" | "D" | "S" | "f" | "f(" arg ")"
              | "M(" arg ")" | "f^(" INT ")(1)" | "(" expr ")"
    arg      := "n" [("+" | "-") INT] | INT

``Dx`` and ``S`` act on an implicit unknown, so coefficients go to their
left: ``(x-3)*Dx``.  ``f(n+2)``/``M(n+2)`` are the same as ``S^2``,
``f(1)`` and ``f^(j)(1)`` are boundary constants, ``M(k)`` is a fixed moment.
Rational-function coefficients are allowed and cleared by a common
denominator when the expression is lowered.
"""

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Poly, RationalFunction, format_scalar, poly_gcd
from .errors import HolomellinError, MixedOperatorError, ParseError
from .operators import (
    BoundarySymbol,
    DerivAtOne,
    DiffOp,
    MellinMoment,
    RecOp,
    normalize_diffop,
    normalize_recop,
)

__all__ = [
    "parse_operator",
    "parse_polynomial",
    "parse_symbol",
    "pretty",
    "to_json",
    "from_json",
    "Parsed",
]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")
_IDENTITY = ("I", 0)


@dataclass(frozen=True)
class Parsed:
    """Lowered operator plus the polynomial its denominators were cleared by."""

    op: object
    cleared: Poly


class _Value:
    """Linear combination ``{key: coefficient}``; keys are ``("I", 0)``,
    ``("D", k)``, ``("S", k)`` or ``("B", BoundarySymbol)``."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    def is_coefficient(self):
        return all(k == _IDENTITY for k in self.terms)

    def coefficient(self, var):
        return self.terms.get(_IDENTITY, RationalFunction(Poly((), var)))

    def has_operator(self):
        return any(k[0] in "DS" and k[1] != 0 for k in self.terms)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        for m in _TOKEN.finditer(text):
            if m.group(0).strip() == "":
                continue
            kind = "int" if m.group(1) else "name" if m.group(2) else "sym"
            self.tokens.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        self.i = 0
        self.var = self._detect_var()

    # -- helpers -----------------------------------------------------------

    def _detect_var(self):
        x_side = n_side = None
        for kind, tok, pos in self.tokens:
            if kind != "name":
                continue
            if tok in ("x", "Dx", "D") and x_side is None:
                x_side = (tok, pos)
            if tok in ("n", "S") and n_side is None:
                n_side = (tok, pos)
        if x_side and n_side:
            later = max(x_side, n_side, key=lambda t: t[1])
            raise MixedOperatorError(
                f"{x_side[0]!r} and {n_side[0]!r} mix the differential and "
                "recurrence worlds", self.text, later[1]
            )
        if n_side:
            return "n"
        if x_side:
            return "x"
        # only atoms like f(1) or M(3): decided by the caller
        return None

    def peek(self, offset=0):
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else ("end", "", len(self.text))

    def advance(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, tok, pos = self.advance()
        if tok != value:
            found = "end of input" if kind == "end" else repr(tok)
            raise ParseError(f"expected {value!r}, found {found}", self.text, pos)
        return pos

    def error(self, message, pos=None):
        if pos is None:
            pos = self.peek()[2]
        return ParseError(message, self.text, pos)

    def const(self, c):
        return _Value({_IDENTITY: RationalFunction(Poly.const(c, self.var or "x"))})

    # -- grammar -----------------------------------------------------------

    def parse(self):
        value = self.expr()
        if self.peek()[1] == "=":
            self.advance()
            kind, tok, pos = self.advance()
            if tok != "0":
                raise self.error("only relations of the form '... = 0' are supported", pos)
        kind, tok, pos = self.peek()
        if kind != "end":
            raise self.error(f"unexpected {tok!r}", pos)
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            rhs = self.term()
            value = _add(value, rhs, -1 if op == "-" else 1)
        return value

    def term(self):
        value = self.unary()
        while self.peek()[1] in ("*", "/"):
            op, pos = self.advance()[1:]
            rhs = self.unary()
            if op == "*":
                value = self.mul(value, rhs, pos)
            else:
                if not rhs.is_coefficient():
                    raise self.error("only coefficients can be divided by", pos)
                coef = rhs.coefficient(self.var or "x")
                if coef.is_zero():
                    raise self.error("division by zero", pos)
                value = _Value({k: v / coef for k, v in value.terms.items()})
        return value

    def unary(self):
        if self.peek()[1] == "-":
            self.advance()
            return _add(_Value({}), self.unary(), -1)
        if self.peek()[1] == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        start = self.peek()[2]
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        pos = self.advance()[2]
        k = self.exponent()
        if base.is_coefficient():
            if k < 0:
                raise self.error("negative powers of coefficients are not allowed", pos)
            return _Value({_IDENTITY: base.coefficient(self.var or "x") ** k})
        if len(base.terms) == 1:
            (key, coef), = base.terms.items()
            if key[0] in "DS" and coef == RationalFunction.coerce(1, coef.var):
                if key[0] == "D" and k < 0:
                    raise self.error("negative powers of Dx are not allowed", pos)
                return _Value({(key[0], key[1] * k): coef})
        raise self.error("only coefficients, Dx and S can be raised to a power", start)

    def exponent(self):
        kind, tok, pos = self.peek()
        if kind == "int":
            self.advance()
            return int(tok)
        if tok == "(":
            self.advance()
            sign = 1
            if self.peek()[1] == "-":
                self.advance()
                sign = -1
            kind, tok, pos = self.advance()
            if kind != "int":
                raise self.error("exponent must be an integer", pos)
            self.expect(")")
            return sign * int(tok)
        raise self.error("exponent must be an integer", pos)

    def atom(self):
        kind, tok, pos = self.advance()
        var = self.var or "x"
        if kind == "int":
            return self.const(Fraction(int(tok)))
        if tok == "(":
            value = self.expr()
            self.expect(")")
            return value
        if tok in ("x", "n"):
            return _Value({_IDENTITY: RationalFunction(Poly.gen(tok))})
        one = RationalFunction(Poly.const(1, var))
        if tok in ("Dx", "D"):
            return _Value({("D", 1): one})
        if tok == "S":
            return _Value({("S", 1): one})
        if tok == "f":
            if self.peek()[1] == "^" and self.peek(1)[1] == "(":
                self.advance()
                self.advance()
                k, j, jpos = self.advance()
                if k != "int":
                    raise self.error("expected derivative order", jpos)
                self.expect(")")
                self.expect("(")
                arg_pos = self.peek()[2]
                if self.advance()[1] != "1":
                    raise self.error("boundary derivatives are taken at 1", arg_pos)
                self.expect(")")
                return _Value({("B", DerivAtOne(int(j))): one})
            if self.peek()[1] != "(":
                return _Value({_IDENTITY: one})
            self.advance()
            arg = self.argument()
            self.expect(")")
            if arg[0] == "shift":
                return _Value({("S", arg[1]): one})
            if arg[1] != 1:
                raise self.error("f(k) is only meaningful as the boundary value f(1)", pos)
            return _Value({("B", DerivAtOne(0)): one})
        if tok == "M":
            self.expect("(")
            arg = self.argument()
            self.expect(")")
            if arg[0] == "shift":
                return _Value({("S", arg[1]): one})
            return _Value({("B", MellinMoment(arg[1])): one})
        if kind == "end":
            raise self.error("unexpected end of input", pos)
        raise self.error(f"unexpected {tok!r}", pos)

    def argument(self):
        kind, tok, pos = self.advance()
        if kind == "int":
            return ("const", int(tok))
        if tok != "n":
            raise self.error("argument must be n, n+k, n-k or an integer", pos)
        if self.peek()[1] in ("+", "-"):
            sign = 1 if self.advance()[1] == "+" else -1
            kind, tok, pos = self.advance()
            if kind != "int":
                raise self.error("expected an integer shift", pos)
            return ("shift", sign * int(tok))
        return ("shift", 0)

    def mul(self, a, b, pos):
        if a.has_operator() and not all(v.num.is_constant() and v.den.is_constant() for v in b.terms.values()):
            raise self.error("coefficients must stand to the left of Dx and S", pos)
        out = {}
        for ka, va in a.terms.items():
            for kb, vb in b.terms.items():
                key = _combine_keys(ka, kb)
                if key is None:
                    raise self.error("boundary constants cannot be multiplied by operators", pos)
                if key == "mixed":
                    raise MixedOperatorError("Dx and S cannot be multiplied", self.text, pos)
                prod = va * vb
                out[key] = out[key] + prod if key in out else prod
        return _Value(out)


def _combine_keys(a, b):
    if a == _IDENTITY:
        return b
    if b == _IDENTITY:
        return a
    if a[0] == "B" or b[0] == "B":
        return None
    if a[0] != b[0]:
        return "mixed"
    return (a[0], a[1] + b[1])


def _add(a, b, sign):
    out = dict(a.terms)
    for k, v in b.terms.items():
        v = v if sign > 0 else -v
        out[k] = out[k] + v if k in out else v
    return _Value(out)


def _lower(value, var, text):
    kinds = {k[0] for k in value.terms if k != _IDENTITY}
    if "D" in kinds and "S" in kinds:
        raise MixedOperatorError("Dx and S terms in one operator", text, 0)
    if "D" in kinds or (var == "x" and "S" not in kinds):
        kind = "diff"
    elif "S" in kinds or var == "n":
        kind = "rec"
    else:
        raise ParseError("cannot tell a differential from a recurrence operator", text, 0)
    if not value.terms:
        raise ParseError("the operator is zero", text, 0)
    # clear denominators
    den = Poly.const(1, var)
    for v in value.terms.values():
        den = _lcm(den, v.den.with_var(var))
    polys = {}
    for k, v in value.terms.items():
        num = v.num.with_var(var) * den
        polys[k] = num.exact_div(v.den.with_var(var))
    if kind == "diff":
        if any(k[0] == "B" for k in polys):
            raise ParseError("boundary constants are not allowed in differential operators", text, 0)
        orders = {0 if k == _IDENTITY else k[1]: p for k, p in polys.items()}
        top = max(orders)
        return DiffOp(tuple(orders.get(j, Poly((), "x")) for j in range(top + 1))), den
    shifts = {}
    inhom = {}
    for k, p in polys.items():
        if k[0] == "B":
            inhom[k[1]] = p
        else:
            shifts[0 if k == _IDENTITY else k[1]] = p
    if not shifts:
        raise ParseError("a recurrence needs at least one sequence term", text, 0)
    low, high = min(shifts), max(shifts)
    coeffs = tuple(shifts.get(s, Poly((), "n")) for s in range(low, high + 1))
    return RecOp(coeffs, inhom, low), den


def _lcm(a, b):
    return (a * b).exact_div(poly_gcd(a, b)).monic()


def parse_operator(text, kind=None, normalize=True, with_report=False):
    """Parse ``text`` into a (normalized) DiffOp or RecOp.

    ``kind`` (``"diffop"``/``"recop"``) resolves inputs that mention neither
    variable nor operator.  With ``with_report`` a :class:`Parsed` is returned
    so callers can see which denominator was cleared.
    """
    parser = _Parser(text)
    if parser.var is None:
        parser.var = {"diffop": "x", "recop": "n"}.get(kind)
    value = parser.parse()
    var = parser.var
    if var is None:
        var = "n" if any(k[0] in "SB" for k in value.terms) else "x"
    op, den = _lower(value, var, text)
    if kind == "diffop" and not isinstance(op, DiffOp) or kind == "recop" and not isinstance(op, RecOp):
        raise ParseError(f"expected a {kind}, got {type(op).__name__}", text, 0)
    if normalize:
        op = normalize_diffop(op) if isinstance(op, DiffOp) else normalize_recop(op)
    return Parsed(op, den) if with_report else op


def parse_polynomial(text, var):
    """Parse a polynomial such as ``1/2*n^2 + n``."""
    parser = _Parser(text)
    if parser.var not in (None, var):
        raise ParseError(f"expected a polynomial in {var}", text, 0)
    parser.var = var
    value = parser.parse()
    if not value.is_coefficient():
        raise ParseError("expected a polynomial, found operator terms", text, 0)
    coef = value.coefficient(var)
    if not coef.is_polynomial():
        raise ParseError("expected a polynomial, found a rational function", text, 0)
    return coef.num.with_var(var)


_SYMBOL = re.compile(r"^\s*(?:f\^\((\d+)\)\(1\)|f\(1\)|M\((\d+)\))\s*$")


def parse_symbol(text):
    m = _SYMBOL.match(text)
    if not m:
        raise ParseError(f"unknown boundary symbol {text!r}", text, 0)
    if m.group(2) is not None:
        return MellinMoment(int(m.group(2)))
    return DerivAtOne(int(m.group(1) or 0))


def _symbol_json(sym):
    return f"M({sym.index})" if sym.kind == "moment" else f"f^({sym.index})(1)"


def pretty(op):
    return str(op)


def to_json(op):
    if isinstance(op, DiffOp):
        return {"kind": "diffop", "var": "x", "coeffs": [str(p) for p in op.coeffs], "inhom": []}
    if isinstance(op, RecOp):
        out = {
            "kind": "recop",
            "var": "n",
            "coeffs": [str(p) for p in op.coeffs],
            "inhom": [{"symbol": _symbol_json(s), "coeff": str(r)} for s, r in op.inhom.items()],
        }
        if op.offset:
            out["offset"] = op.offset
        return out
    raise TypeError(f"cannot serialize {type(op).__name__}")


def from_json(data):
    if not isinstance(data, dict):
        raise HolomellinError("operator JSON must be an object")
    kind = data.get("kind")
    coeffs = data.get("coeffs")
    if kind not in ("diffop", "recop") or not isinstance(coeffs, list):
        raise HolomellinError("operator JSON needs 'kind' (diffop|recop) and a 'coeffs' list")
    var = "x" if kind == "diffop" else "n"
    if data.get("var", var) != var:
        raise HolomellinError(f"a {kind} is written in the variable {var}")
    for c in coeffs:
        if not isinstance(c, str):
            raise HolomellinError("coefficients must be exact strings, not numbers")
    polys = tuple(parse_polynomial(c, var) for c in coeffs)
    inhom = {}
    for entry in data.get("inhom", []) or []:
        try:
            sym = parse_symbol(entry["symbol"])
            inhom[sym] = parse_polynomial(entry["coeff"], "n")
        except (KeyError, TypeError):
            raise HolomellinError("inhom entries need 'symbol' and 'coeff' strings") from None
    if kind == "diffop":
        if inhom:
            raise HolomellinError("differential operators carry no inhomogeneous part")
        return DiffOp(polys)
    return RecOp(polys, inhom, int(data.get("offset", 0)))
