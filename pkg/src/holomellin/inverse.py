"""Inverse Mellin direction: recurrence for M(n) to an ODE for f(x).

The driver keeps a *mixed relation*

    sum_i p_i(n) M(n+i) + M[sum_j q_j(x) f^(j)](n) + sum r(n) * sym = 0

and repeatedly trades the top power ``n^k`` of the sequence part for the
differential term ``(-1)^k x^(k+i) f^(k)``.  Expanding the Mellin image of
that term produces ``(n+i+1)...(n+i+k) M(n+i)``, whose leading ``n^k``
cancels the one being removed, so the n-degree strictly drops each pass.
"""

import logging
from dataclasses import dataclass, field

from .algebra import Poly
from .errors import HolomellinError, InvariantViolation, UnsupportedInputError
from .forward import accumulate, mellin_of_term
from .operators import DiffOp, RecOp, _format_terms, normalize_diffop, normalize_recop

__all__ = ["MixedRelation", "reduction_pass", "eliminate_boundary", "rec_to_ode"]

log = logging.getLogger(__name__)


def _clean(d):
    return {k: v for k, v in sorted(d.items()) if v}


@dataclass(frozen=True)
class MixedRelation:
    rec_part: dict
    diff_part: dict = field(default_factory=dict)
    inhom: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rec_part", _clean(self.rec_part))
        object.__setattr__(self, "diff_part", _clean(self.diff_part))
        object.__setattr__(self, "inhom", _clean(self.inhom))

    @classmethod
    def from_recop(cls, rec):
        return cls(rec.shifts(), {}, dict(rec.inhom))

    @property
    def degree(self):
        """Maximal n-degree over the sequence part (``-1`` when it is empty)."""
        return max((p.degree for p in self.rec_part.values()), default=-1)

    def __str__(self):
        terms = []
        for j in sorted(self.diff_part, reverse=True):
            suffix = "f" if j == 0 else ("f'" if j == 1 else f"f^({j})")
            terms.append((self.diff_part[j], suffix))
        for i in sorted(self.rec_part, reverse=True):
            suffix = "f(n)" if i == 0 else f"f(n{i:+d})"
            terms.append((self.rec_part[i], suffix))
        for sym, r in self.inhom.items():
            terms.append((r, str(sym)))
        return _format_terms(terms) + " = 0"


def reduction_pass(rel):
    """Remove every ``n^k`` term, ``k`` the current maximal n-degree."""
    k = rel.degree
    if k < 0:
        raise HolomellinError("reduction_pass needs a nonempty sequence part")
    rec = dict(rel.rec_part)
    diff = dict(rel.diff_part)
    inhom = dict(rel.inhom)
    sign = -1 if k % 2 else 1
    for i, p in rel.rec_part.items():
        c = p.coeff(k)
        if not c:
            continue
        if k + i < 0:
            raise UnsupportedInputError(
                f"shift {i} is negative; normalize the recurrence before reducing it"
            )
        diff[k] = diff.get(k, Poly((), "x")) + Poly.monomial(k + i, c * sign, "x")
        # subtract c * M[(-1)^k x^(k+i) f^(k)](n)
        accumulate(rec, inhom, mellin_of_term(k + i, k), -c * sign)
    out = MixedRelation(rec, diff, inhom)
    if out.degree >= k:
        raise InvariantViolation(
            f"degree reduction failed: n^{k} terms survived in {out}"
        )
    return out


def eliminate_boundary(rel, normalize=True):
    """Turn a relation without sequence terms into a homogeneous ODE.

    Leftover boundary constants are killed by one differentiation in x.
    """
    if rel.rec_part:
        raise HolomellinError("sequence terms remain; run reduction passes first")
    if not rel.diff_part:
        raise HolomellinError("degenerate relation: no differential terms")
    order = max(rel.diff_part)
    op = DiffOp(tuple(rel.diff_part.get(j, Poly((), "x")) for j in range(order + 1)))
    if rel.inhom:
        op = op.derivative_relation()
    return normalize_diffop(op) if normalize else op


def rec_to_ode(rec, trace=None, normalize_input=True, normalize_output=True):
    """Holonomic ODE for ``f`` given a homogeneous recurrence for ``M[f](n)``.

    ``trace``, when given, is a list that receives the string form of every
    intermediate relation.  With ``normalize_output=False`` the operator is
    returned exactly as the reduction produced it, polynomial content
    included; removing that content can add solutions.
    """
    if not rec.is_homogeneous():
        raise UnsupportedInputError(
            "inverse conversion is defined for homogeneous recurrences only"
        )
    if normalize_input:
        rec = normalize_recop(rec)
    rel = MixedRelation.from_recop(rec)
    if trace is not None:
        trace.append(str(rel))
    budget = rel.degree + 1
    passes = 0
    while rel.rec_part:
        before = rel.degree
        rel = reduction_pass(rel)
        passes += 1
        if passes > budget:
            raise InvariantViolation(f"{passes} passes exceed the bound {budget}")
        log.debug("pass %d: degree %d -> %d", passes, before, rel.degree)
        if trace is not None:
            trace.append(str(rel))
    ode = eliminate_boundary(rel, normalize=normalize_output)
    if trace is not None and rel.inhom:
        trace.append(f"d/dx: {ode} = 0")
    return ode
