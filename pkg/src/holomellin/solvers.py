"""Closed-form solutions at desk scale.

* :func:`hyper_solutions` -- hypergeometric solutions of a recurrence via
  Petkovšek's ``Z * a(n)/b(n) * c(n+1)/c(n)`` ansatz, with ``a`` and ``b``
  restricted to products of linear factors over the rationals.
* :func:`rational_ode_solutions` -- rational solutions of a linear ODE whose
  poles sit at rational roots of the leading coefficient; pole orders and the
  degree at infinity come from indicial equations.

Every returned object has been checked with :func:`verify_certificate`.
"""

import itertools
import logging
from dataclasses import dataclass
from math import comb

from .algebra import Poly, RationalFunction, falling_factorial, nullspace, rational_roots
from .errors import HolomellinError, InvariantViolation, UnsupportedInputError
from .operators import DiffOp, RecOp, normalize_recop

__all__ = [
    "HypergeometricCertificate",
    "RationalSolution",
    "hyper_solutions",
    "polynomial_solutions",
    "rational_ode_solutions",
    "verify_certificate",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HypergeometricCertificate:
    """``y(n+1)/y(n) = ratio(n)``."""

    ratio: RationalFunction

    def __str__(self):
        return str(self.ratio)


@dataclass(frozen=True)
class RationalSolution:
    value: RationalFunction

    def __str__(self):
        return str(self.value)


def _sort_key(rf):
    return (rf.den.degree, rf.num.degree, rf.den.coeffs, rf.num.coeffs)


def verify_certificate(target, candidate):
    """Substitute ``candidate`` into ``target`` exactly.

    Returns ``(ok, residual)`` where ``residual`` is a RationalFunction that
    vanishes iff ``ok``.
    """
    if isinstance(candidate, (HypergeometricCertificate, RationalSolution)):
        candidate = candidate.ratio if isinstance(candidate, HypergeometricCertificate) else candidate.value
    if not isinstance(candidate, RationalFunction):
        raise HolomellinError(f"malformed candidate {candidate!r}")
    if isinstance(target, RecOp):
        if candidate.var != "n" or candidate.is_zero():
            raise HolomellinError("a hypergeometric certificate is a nonzero rational function of n")
        residual = RationalFunction(Poly((), "n"))
        prod = RationalFunction(Poly.const(1, "n"))
        for i, p in enumerate(target.coeffs):
            residual = residual + prod * p
            prod = prod * candidate.shift(i)
    elif isinstance(target, DiffOp):
        if candidate.var != "x":
            raise HolomellinError("a rational ODE solution is a rational function of x")
        residual = target.apply(candidate)
    else:
        raise HolomellinError(f"cannot verify against {type(target).__name__}")
    return residual.is_zero(), residual


def polynomial_solutions(coeffs, var="n"):
    """Basis of polynomial ``c`` with ``sum_i coeffs[i](n) c(n+i) = 0``."""
    d = len(coeffs) - 1
    delta = []
    for j in range(d + 1):
        r = Poly((), var)
        for i in range(j, d + 1):
            r = r + coeffs[i].scale(comb(i, j))
        delta.append(r)
    top = max(r.degree - j for j, r in enumerate(delta) if r)
    indicial = Poly((), "k")
    for j, r in enumerate(delta):
        if r and r.degree - j == top:
            indicial = indicial + falling_factorial(0, j, "k").scale(r.lc)
    if indicial.is_zero():
        raise InvariantViolation("indicial polynomial of a nonzero operator vanished")
    degrees = [int(k) for k in rational_roots(indicial) if k >= 0 and k.denominator == 1]
    if not degrees:
        return []
    bound = max(degrees)
    columns = []
    for t in range(bound + 1):
        mono = Poly.monomial(t, 1, var)
        image = Poly((), var)
        for i, p in enumerate(coeffs):
            if p:
                image = image + p * mono.shift(i)
        columns.append(image)
    height = max(c.degree for c in columns) + 1
    rows = [[col.coeff(r) for col in columns] for r in range(height)]
    return [Poly(vec, var) for vec in nullspace(rows, bound + 1)]


def _monic_divisors(p, max_degree):
    """Monic products of the rational linear factors of ``p``, up to a degree cap."""
    roots = rational_roots(p)
    linear = [(r, m) for r, m in roots.items()]
    total = sum(m for _, m in linear)
    if total > max_degree:
        log.warning(
            "factor degree cap %d is binding (%d linear factors available)", max_degree, total
        )
    out = []
    for mults in itertools.product(*[range(m + 1) for _, m in linear]):
        if sum(mults) > max_degree:
            continue
        div = Poly.const(1, p.var)
        for (r, _), e in zip(linear, mults):
            div = div * Poly([-r, 1], p.var) ** e
        out.append(div)
    return out


def hyper_solutions(rec, max_factor_degree=3):
    """All hypergeometric solutions (up to scalar multiples) reachable with
    linear factors of the extreme coefficients."""
    if not rec.is_homogeneous():
        raise UnsupportedInputError("hyper_solutions needs a homogeneous recurrence")
    rec = normalize_recop(rec)
    d = rec.order
    if d < 1:
        return []
    p = list(rec.coeffs)
    a_cands = _monic_divisors(p[0], max_factor_degree)
    b_cands = _monic_divisors(p[d].shift(1 - d), max_factor_degree)
    found = {}
    for a, b in itertools.product(a_cands, b_cands):
        P = []
        for i in range(d + 1):
            term = p[i]
            for j in range(i):
                term = term * a.shift(j)
            for j in range(i, d):
                term = term * b.shift(j)
            P.append(term)
        top = max(q.degree for q in P)
        zpoly = Poly([q.lc if q.degree == top else 0 for q in P], "z")
        if zpoly.is_zero():
            continue
        for z in rational_roots(zpoly):
            if z == 0:
                continue
            weighted = [q.scale(z**i) for i, q in enumerate(P)]
            for c in polynomial_solutions(weighted):
                ratio = RationalFunction(a.scale(z) * c.shift(1), b * c)
                found.setdefault(ratio, HypergeometricCertificate(ratio))
    out = []
    for cert in sorted(found.values(), key=lambda c: _sort_key(c.ratio)):
        ok, residual = verify_certificate(rec, cert)
        if not ok:
            raise InvariantViolation(f"certificate {cert} fails with residual {residual}")
        out.append(cert)
    return out


def _indicial_at(ode, alpha):
    """Indicial polynomial of ``ode`` at the finite point ``alpha``."""
    local = [q.shift(alpha) for q in ode.coeffs]
    mu = min(q.low_order() - j for j, q in enumerate(local) if q)
    ind = Poly((), "s")
    for j, q in enumerate(local):
        if q and q.low_order() - j == mu:
            ind = ind + falling_factorial(0, j, "s").scale(q.coeff(q.low_order()))
    return ind


def _indicial_at_infinity(ode):
    mu = max(q.degree - j for j, q in enumerate(ode.coeffs) if q)
    ind = Poly((), "s")
    for j, q in enumerate(ode.coeffs):
        if q and q.degree - j == mu:
            ind = ind + falling_factorial(0, j, "s").scale(q.lc)
    return ind


def _integer_roots(p):
    return sorted(int(r) for r in rational_roots(p) if r.denominator == 1)


def rational_ode_solutions(ode, max_pole_order=6, max_numerator_degree=12):
    """Basis of the rational solutions of ``ode``."""
    l = ode.order
    if l == 0:
        return []
    den = Poly.const(1, "x")
    for alpha in rational_roots(ode.leading):
        poles = [-s for s in _integer_roots(_indicial_at(ode, alpha)) if s < 0]
        e = max(poles, default=0)
        if e > max_pole_order:
            log.warning("pole order %d at %s exceeds the cap %d", e, alpha, max_pole_order)
            e = max_pole_order
        den = den * Poly([-alpha, 1], "x") ** e
    growth = _integer_roots(_indicial_at_infinity(ode))
    if not growth:
        return []
    deg_num = den.degree + max(growth)
    if deg_num < 0:
        return []
    cap = den.degree + max_numerator_degree
    if deg_num > cap:
        log.warning("numerator degree %d exceeds the cap %d", deg_num, cap)
        deg_num = cap
    # y = N/D  =>  y^(j) = N_j / D^(j+1),  N_{j+1} = N_j' D - (j+1) N_j D'
    dprime = den.derivative()
    columns = []
    for t in range(deg_num + 1):
        Nj = Poly.monomial(t, 1, "x")
        total = Poly((), "x")
        for j, q in enumerate(ode.coeffs):
            if q:
                total = total + q * Nj * den ** (l - j)
            Nj = Nj.derivative() * den - (dprime * Nj).scale(j + 1)
        columns.append(total)
    height = max(c.degree for c in columns) + 1
    rows = [[col.coeff(r) for col in columns] for r in range(height)]
    sols = []
    for vec in nullspace(rows, deg_num + 1):
        value = RationalFunction(Poly(vec, "x"), den)
        value = RationalFunction(value.num.monic(), value.den)
        sols.append(RationalSolution(value))
    sols.sort(key=lambda s: _sort_key(s.value))
    for sol in sols:
        ok, residual = verify_certificate(ode, sol)
        if not ok:
            raise InvariantViolation(f"rational solution {sol} fails with residual {residual}")
    return sols
