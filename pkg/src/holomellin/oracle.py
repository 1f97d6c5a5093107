"""Power-series oracle used to check the symbolic converters numerically.

A solution ``f = sum f_k x^k`` of an ODE has Taylor coefficients obeying a
recurrence that is read off term by term (``x^m D^p`` shifts the index by
``p - m`` with a falling-factorial weight).  Unrolling it gives exact or
floating point coefficients, and Mellin moments follow by termwise
integration, ``M(n) = sum_k f_k / (n + k + 1)``.

This path shares nothing with :mod:`holomellin.forward` or
:mod:`holomellin.inverse` beyond the polynomial type.
"""

import logging
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath
import numpy as np

from .algebra import Poly, falling_factorial, rational_roots, to_scalar
from .errors import OracleError, SingularIndexError
from .operators import DiffOp, RecOp, normalize_diffop, normalize_recop

__all__ = [
    "SeriesExpansion",
    "Estimate",
    "coefficient_relation",
    "ode_to_coeff_rec",
    "expand",
    "numeric_mellin",
    "numeric_regularized_mellin",
    "numeric_boundary",
    "quad_mellin",
    "radius_of_convergence",
    "default_max_terms",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_TERMS = 10**6
WINDOW = 16
EULER_DEPTH = 24
EXACT_LIMIT = 512


def default_max_terms():
    env = os.environ.get("HOLOMELLIN_MAX_TERMS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise OracleError(f"HOLOMELLIN_MAX_TERMS={env!r} is not an integer") from None
    return DEFAULT_MAX_TERMS


class Estimate(NamedTuple):
    value: float
    error_bound: float
    terms: int
    method: str


def coefficient_relation(ode):
    """Raw coefficient recurrence ``{s: P_s}`` with
    ``sum_s P_s(N) f_{N+s} = 0`` for every integer ``N`` (``f_k = 0`` for
    ``k < 0``).  Not content-reduced, so it stays valid at every index."""
    rel = {}
    for p, q in enumerate(ode.coeffs):
        for m, c in enumerate(q.coeffs):
            if c:
                s = p - m
                rel[s] = rel.get(s, Poly((), "n")) + falling_factorial(s, p).scale(c)
    return {s: P for s, P in sorted(rel.items()) if P}


def ode_to_coeff_rec(ode):
    """Normalized recurrence for the Taylor coefficients of any series solution."""
    rel = coefficient_relation(ode)
    low = min(rel)
    coeffs = [rel.get(s, Poly((), "n")) for s in range(low, max(rel) + 1)]
    return normalize_recop(RecOp(tuple(coeffs), {}, low))


@dataclass(frozen=True)
class SeriesExpansion:
    coeffs: tuple
    truncation_order: int
    source_ode: DiffOp
    exact: bool = True
    initial: tuple = ()

    def extended(self, K):
        """The same series expanded (in floating point) to order ``K``."""
        if K <= self.truncation_order:
            return self
        return expand(self.source_ode, self.initial, K, exact=self.exact and K <= EXACT_LIMIT)

    def __call__(self, x):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc


def expand(ode, initial_coeffs, K, exact=True):
    """Taylor coefficients ``f_0 ... f_K`` of the solution with the given
    leading coefficients."""
    init = [to_scalar(c) for c in initial_coeffs]
    if K < len(init) - 1:
        raise ValueError("K must be at least len(initial_coeffs) - 1")
    rel = coefficient_relation(ode)
    top = max(rel)
    lower = [(s - top, P) for s, P in rel.items() if s != top]
    lead = rel[top]
    if exact:
        values = list(init)
        for k in range(len(init), K + 1):
            N = k - top
            a = lead(N)
            if a == 0:
                raise SingularIndexError(k)
            acc = Fraction(0)
            for d, P in lower:
                j = k + d
                if j >= 0 and values[j]:
                    acc += P(N) * values[j]
            values.append(-acc / a)
        _check_initial(rel, values, len(init))
        return SeriesExpansion(tuple(values), K, ode, True, tuple(init))
    lead_f = [float(c) for c in lead.coeffs]
    lower_f = [(d, [float(c) for c in P.coeffs]) for d, P in lower]
    values = [float(c) for c in init]
    for k in range(len(init), K + 1):
        N = k - top
        a = _horner(lead_f, N)
        if lead(N) == 0:
            raise SingularIndexError(k)
        acc = 0.0
        for d, pc in lower_f:
            j = k + d
            if j >= 0:
                acc += _horner(pc, N) * values[j]
        values.append(-acc / a)
    return SeriesExpansion(tuple(values), K, ode, False, tuple(init))


def _horner(cs, t):
    acc = 0.0
    for c in reversed(cs):
        acc = acc * t + c
    return acc


def _check_initial(rel, values, count):
    """Relations involving only user-supplied coefficients must already hold."""
    top = max(rel)
    for N in range(-top, count - top):
        acc = Fraction(0)
        for s, P in rel.items():
            j = N + s
            if 0 <= j < len(values):
                acc += P(N) * values[j]
        if acc:
            raise OracleError(
                f"initial coefficients violate the coefficient recurrence at index {N + top}"
            )


def radius_of_convergence(ode):
    """Distance from 0 to the nearest nonzero root of the leading coefficient.

    Common polynomial content is dropped first; its roots are not
    singularities of the solutions.
    """
    lead = normalize_diffop(ode).leading
    zeros = lead.low_order()
    core = Poly(lead.coeffs[zeros:], "x")
    if core.degree < 1:
        return math.inf
    exact_roots = rational_roots(core)
    radius = min((abs(float(r)) for r in exact_roots), default=math.inf)
    rest = core
    for r, mult in exact_roots.items():
        for _ in range(mult):
            rest = rest.exact_div(Poly([-r, 1], "x"))
    if rest.degree >= 1:
        roots = np.roots([float(c) for c in reversed(rest.coeffs)])
        radius = min(radius, float(min(abs(roots))))
    return radius


def _singular_at_one(ode):
    return normalize_diffop(ode).leading(1) == 0


def _sum_with_tail(make_terms, s, tol, max_terms, terms, singular_one, radius):
    """Shared driver: partial sums plus a tail estimate chosen from the
    analytic type of the series on the unit circle."""
    if radius < 1 - 1e-12:
        raise OracleError(
            f"radius of convergence {radius:.6g} < 1, oracle inapplicable"
        )
    K = terms if terms is not None else max(64, min(s.truncation_order - EULER_DEPTH - 1, 4096))
    last = None
    while True:
        s = s.extended(K + EULER_DEPTH + 1)
        t = make_terms(s.coeffs[: K + EULER_DEPTH + 2])
        est = _estimate(t, K, radius, singular_one)
        last = est
        if est.error_bound <= tol or terms is not None:
            return est
        if K >= max_terms:
            break
        K = min(4 * K, max_terms)
    raise OracleError(
        f"tail bound {last.error_bound:.3g} above tolerance {tol:.3g} after {last.terms} terms"
    )


def _estimate(t, K, radius, singular_one):
    head = t[: K + 1]
    partial = math.fsum(float(v) for v in head)
    window = [float(v) for v in head[-WINDOW:]]
    if all(v == 0 for v in window):
        return Estimate(partial, 0.0, K + 1, "terminating")
    if radius > 1 + 1e-12:
        ratios = [abs(b / a) for a, b in zip(window, window[1:]) if a]
        if any(r >= 1 for r in ratios):
            raise OracleError("coefficient ratios exceed 1, radius < 1, oracle inapplicable")
        rho = max(ratios + [1 / radius])
        bound = abs(window[-1]) * rho / (1 - rho)
        return Estimate(partial, bound, K + 1, "geometric")
    signs = [v > 0 for v in window if v]
    alternating = len(signs) == len(window) and all(a != b for a, b in zip(signs, signs[1:]))
    same_sign = len(set(signs)) == 1 and len(signs) == len(window)
    if alternating and not singular_one:
        tail, err = _euler_tail(t[K + 1:])
        return Estimate(partial + tail, err, K + 1, "alternating")
    if same_sign:
        value, err = _power_model([float(v) for v in head], K)
        return Estimate(value, err, K + 1, "power-law")
    # singularities at 1 and -1 together: pairing neighbours cancels the
    # alternating component, leaving a one-signed power-law tail
    J = (K - 1) // 2
    pairs = [float(t[2 * j]) + float(t[2 * j + 1]) for j in range(J + 1)]
    pwin = pairs[-WINDOW:]
    if J >= 2 * WINDOW - 1 and (all(v > 0 for v in pwin) or all(v < 0 for v in pwin)):
        value, err = _power_model(pairs, J)
        return Estimate(value, err, 2 * J + 2, "paired-power-law")
    raise OracleError("tail has no recognizable sign pattern; use quad_mellin instead")


def _power_tail(t, K):
    """Tail ``sum_{k>K} t_k`` assuming ``t_k ~ c k^-alpha``."""
    a_hi = abs(t[K])
    a_lo = abs(t[K // 2])
    alpha = math.log(a_lo / a_hi) / math.log(K / (K // 2))
    if alpha <= 1.05:
        raise OracleError(f"terms decay like k^-{alpha:.3g}; the Mellin sum diverges")
    return t[K] * K / (alpha - 1)


def _power_model(t, K):
    """Sum of ``t`` with a power-law tail; the error is the disagreement
    between the models fitted at ``K`` and ``K/2``."""
    full = math.fsum(t[: K + 1]) + _power_tail(t, K)
    half = math.fsum(t[: K // 2 + 1]) + _power_tail(t, K // 2)
    return full, abs(full - half)


def _euler_tail(rest):
    """Euler transform of the alternating tail ``sum rest``.

    With ``a_j = |rest[j]|`` and ``D`` the backward-sign difference,
    ``sum (-1)^j a_j = sum_p (-D)^p a_0 / 2^(p+1)``; the error is estimated by
    the last included term.
    """
    sign = 1 if rest[0] > 0 else -1
    a = [abs(v) for v in rest]
    if not all(isinstance(v, Fraction) for v in a):
        a = [float(v) for v in a]
    total = 0.0
    term = 0.0
    for p in range(len(a)):
        term = float(a[0]) / 2 ** (p + 1)
        total += term
        a = [x - y for x, y in zip(a, a[1:])]
        if not a:
            break
    return sign * total, abs(term)


def numeric_mellin(s, n, tol=DEFAULT_TOL, max_terms=None, terms=None):
    """``int_0^1 x^n f(x) dx`` from a series expansion, with a tail estimate.

    ``terms`` fixes the truncation order instead of refining adaptively.
    """
    if n < 0:
        raise ValueError("numeric_mellin needs n >= 0")
    max_terms = max_terms or default_max_terms()

    def make_terms(cs):
        return [c / (n + k + 1) for k, c in enumerate(cs)]

    return _sum_with_tail(
        make_terms, s, tol, max_terms, terms,
        _singular_at_one(s.source_ode), radius_of_convergence(s.source_ode),
    )


def numeric_regularized_mellin(s, n, tol=DEFAULT_TOL, max_terms=None, terms=None):
    """``int_0^1 (x^n - 1) f(x) dx``, subtracting termwise before summing."""
    if n < 1:
        raise ValueError("numeric_regularized_mellin needs n >= 1")
    max_terms = max_terms or default_max_terms()

    def make_terms(cs):
        return [-c * n / ((k + 1) * (n + k + 1)) for k, c in enumerate(cs)]

    return _sum_with_tail(
        make_terms, s, tol, max_terms, terms,
        _singular_at_one(s.source_ode), radius_of_convergence(s.source_ode),
    )


def numeric_boundary(s, j, tol=DEFAULT_TOL, max_terms=None):
    """``f^(j)(1)``.

    Inside the disc of convergence the differentiated series is summed
    directly.  On its boundary the series is summed with the same tail
    models as :func:`numeric_mellin`; when those do not apply, Abel summation
    at ``r = 1 - h`` with Richardson extrapolation ``h -> 0`` is used.
    """
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    radius = radius_of_convergence(s.source_ode)
    if radius < 1 - 1e-12:
        raise OracleError(f"radius of convergence {radius:.6g} < 1, f^({j})(1) unavailable")
    if radius > 1 + 1e-12:
        need = max(64, int(45 / math.log(radius)) + j * 8)
        s = s.extended(need)
        cs = [float(c) for c in s.coeffs[: need + 1]]
        terms = [float(falling_factorial(0, j)(k)) * c for k, c in enumerate(cs)][j:]
        bound = abs(terms[-1]) * len(terms)
        value = math.fsum(terms)
        if bound > tol:
            raise OracleError(f"f^({j})(1) not converged: bound {bound:.3g}")
        return Estimate(value, bound, len(cs), "direct")
    ff = falling_factorial(0, j)

    def make_terms(cs):
        return [ff(k) * c for k, c in enumerate(cs)]

    try:
        return _sum_with_tail(
            make_terms, s, tol, max_terms or default_max_terms(), None,
            _singular_at_one(s.source_ode), radius,
        )
    except OracleError as exc:
        log.debug("termwise f^(%d)(1) failed (%s); trying Abel summation", j, exc)
    hs = [2.0 ** -(i + 2) for i in range(7)]
    need = int(40 / hs[-1] * 1.1)
    s = s.extended(need)
    cs = [float(c) for c in s.coeffs[: need + 1]]
    weights = [float(ff(k)) for k in range(len(cs))]
    values = []
    for h in hs:
        r = 1.0 - h
        acc = 0.0
        power = 1.0
        for k in range(j, len(cs)):
            acc += weights[k] * cs[k] * power
            power *= r
            if power < 1e-18 and k > j + 8:
                break
        values.append(acc)
    table = [values]
    for m in range(1, len(hs)):
        prev = table[-1]
        row = []
        for i in range(len(prev) - 1):
            h_far, h_near = hs[i], hs[i + m]
            row.append((h_far * prev[i + 1] - h_near * prev[i]) / (h_far - h_near))
        table.append(row)
    value = table[-1][0]
    err = abs(table[-1][0] - table[-2][0])
    if err > tol:
        raise OracleError(
            f"f^({j})(1) did not converge under Abel-Richardson extrapolation (estimate {err:.3g})"
        )
    return Estimate(value, err, len(cs), "abel-richardson")


def quad_mellin(func, n, regularized=False, dps=30):
    """Adaptive tanh-sinh quadrature of ``int_0^1 x^n f`` (or ``(x^n - 1) f``).

    ``func`` takes and returns mpmath numbers; it may be integrably singular
    at either endpoint, which tanh-sinh handles without evaluating there.
    """
    with mpmath.workdps(dps):
        if regularized:
            integrand = lambda x: (x**n - 1) * func(x)
        else:
            integrand = lambda x: x**n * func(x)
        value, err = mpmath.quad(integrand, [0, 1], error=True)
        return Estimate(float(value), float(err), 0, "tanh-sinh")
