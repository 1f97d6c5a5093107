"""Mellin transform of a holonomic function: ODE in x to recurrence in n.

With ``M(n) = int_0^1 x^n f(x) dx``, integrating by parts ``p`` times gives

    M[x^m f^(p)](n) = (-1)^p (n+m)!/(n+m-p)! M(n+m-p)
                      + sum_{i<p} (-1)^i (n+m)!/(n+m-i)! f^(p-1-i)(1),

so every monomial term of an ODE maps to one shifted Mellin term plus
boundary constants at ``x = 1``.
"""

from dataclasses import dataclass, field

from .algebra import Poly, falling_factorial
from .errors import HolomellinError
from .operators import DerivAtOne, RecOp, normalize_diffop, normalize_recop

__all__ = ["MellinTermImage", "mellin_of_term", "ode_to_mellin_rec", "accumulate"]


@dataclass(frozen=True)
class MellinTermImage:
    shifts: dict
    inhom: dict = field(default_factory=dict)

    @property
    def shift(self):
        (k,) = self.shifts
        return k

    @property
    def coeff(self):
        return self.shifts[self.shift]


def mellin_of_term(m, p):
    """Image of ``x^m f^(p)(x)`` under the Mellin transform."""
    if m < 0 or p < 0:
        raise HolomellinError("mellin_of_term needs m >= 0 and p >= 0")
    sign = -1 if p % 2 else 1
    shifts = {m - p: falling_factorial(m, p).scale(sign)}
    inhom = {}
    for i in range(p):
        inhom[DerivAtOne(p - 1 - i)] = falling_factorial(m, i).scale(-1 if i % 2 else 1)
    return MellinTermImage(shifts, inhom)


def accumulate(target_shifts, target_inhom, image, scale):
    """Add ``scale * image`` into the two dicts in place."""
    for k, p in image.shifts.items():
        target_shifts[k] = target_shifts.get(k, Poly((), "n")) + p.scale(scale)
    for sym, p in image.inhom.items():
        target_inhom[sym] = target_inhom.get(sym, Poly((), "n")) + p.scale(scale)


def ode_to_mellin_rec(ode, normalize_input=True):
    """Recurrence (with boundary-constant inhomogeneity) satisfied by the
    Mellin transform of any solution of ``ode`` whose transform exists.

    Polynomial content of the ODE changes the image; pass
    ``normalize_input=False`` to convert the operator exactly as given.

    >>> from holomellin.operators import DiffOp
    >>> str(ode_to_mellin_rec(DiffOp((0, 1))))
    '(n + 1) - f(1)'
    """
    if normalize_input:
        ode = normalize_diffop(ode)
    shifts, inhom = {}, {}
    for p, q in enumerate(ode.coeffs):
        for m, c in enumerate(q.coeffs):
            if c:
                accumulate(shifts, inhom, mellin_of_term(m, p), c)
    live = {k: v for k, v in shifts.items() if v}
    if not live:
        raise HolomellinError(f"Mellin image of {ode} has no sequence terms")
    low = min(live)
    coeffs = [live.get(k, Poly((), "n")) for k in range(low, max(live) + 1)]
    return normalize_recop(RecOp(tuple(coeffs), inhom, low))
