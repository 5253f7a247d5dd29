"""Exponent bookkeeping for the system with powers (p, q) on H^N.

Verdicts are decided in exact rational arithmetic on the given float
values, so boundary cases such as ``(N, p, q) = (3, 5, 5)`` land exactly on
the critical hyperbola instead of a rounding error away from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError


def _check(N, p, q):
    if int(N) != N or N < 3:
        raise InputError(f"N must be an integer >= 3, got {N!r}")
    for name, val in (("p", p), ("q", q)):
        if not (math.isfinite(val) and val > 1):
            raise InputError(f"{name} must be finite and > 1, got {val!r}")


def critical_exponent(N):
    """Sobolev-critical power ``(N+2)/(N-2)``."""
    return (N + 2) / (N - 2)


def _margin_exact(N, p, q):
    N, p, q = Fraction(int(N)), Fraction(p), Fraction(q)
    return 1 / (p + 1) + 1 / (q + 1) - (N - 2) / N


def _interval_exact(N, p, q):
    N, p, q = Fraction(int(N)), Fraction(p), Fraction(q)
    lo = N / 2 - N / (q + 1)
    hi = 2 - N / 2 + N / (p + 1)
    return max(lo, Fraction(0)), min(hi, Fraction(2))


@dataclass(frozen=True)
class ExponentRegime:
    N: int
    p: float
    q: float
    slack_p: float
    slack_q: float
    hyperbola_margin: float
    sobolev_interval: tuple | None
    # p, q <= (N+2)/(N-2): hypothesis of the symmetry and decay results
    subcritical: bool
    # p, q < (N+2)/(N-2): the strict reading used in the ground-state proof
    subcritical_strict: bool
    # 1/(p+1) + 1/(q+1) > (N-2)/N: radial solutions exist
    above_hyperbola: bool

    @property
    def on_hyperbola(self):
        return self.hyperbola_margin == 0.0

    @property
    def verdicts(self):
        return {
            "symmetry_and_decay": self.subcritical,
            "radial_existence": self.above_hyperbola,
            "ground_state_existence": self.subcritical,
            "ground_state_existence_strict": self.subcritical_strict,
        }

    def as_dict(self):
        return {
            "N": self.N, "p": self.p, "q": self.q,
            "critical_exponent": critical_exponent(self.N),
            "slack_p": self.slack_p, "slack_q": self.slack_q,
            "hyperbola_margin": self.hyperbola_margin,
            "sobolev_interval": (list(self.sobolev_interval)
                                 if self.sobolev_interval else None),
            "verdicts": self.verdicts,
        }


def classify_exponents(N, p, q):
    """Fill an :class:`ExponentRegime` for the triple ``(N, p, q)``."""
    _check(N, p, q)
    crit = Fraction(int(N) + 2, int(N) - 2)
    sp, sq = crit - Fraction(p), crit - Fraction(q)
    margin = _margin_exact(N, p, q)
    return ExponentRegime(
        N=int(N), p=float(p), q=float(q),
        slack_p=float(sp), slack_q=float(sq),
        hyperbola_margin=float(margin),
        sobolev_interval=sobolev_pair_interval(N, p, q),
        subcritical=sp >= 0 and sq >= 0,
        subcritical_strict=sp > 0 and sq > 0,
        above_hyperbola=margin > 0,
    )


def sobolev_pair_interval(N, p, q):
    """Range of ``s`` with ``H^s x H^(2-s)`` embedding into the nonlinear terms.

    ``u`` in ``H^s`` must reach ``L^(q+1)`` and ``v`` in ``H^(2-s)`` must
    reach ``L^(p+1)``; with the radial embedding bound
    ``r <= 2N/(N-2s)`` this gives
    ``N/2 - N/(q+1) <= s <= 2 - N/2 + N/(p+1)``.  Returns ``(s_lo, s_hi)``
    or None when empty.
    """
    _check(N, p, q)
    lo, hi = _interval_exact(N, p, q)
    if lo > hi:
        return None
    return (float(lo), float(hi))


@dataclass(frozen=True)
class EmbeddingRange:
    s: float
    lower: float
    upper: float
    unbounded: bool

    @property
    def continuous(self):
        """Closed exponent range ``[2, upper]``."""
        return (self.lower, self.upper)

    @property
    def compact(self):
        """Open exponent range ``(2, upper)``."""
        return (self.lower, self.upper)

    def is_continuous(self, r):
        return self.lower <= r <= self.upper

    def is_compact(self, r):
        return self.lower < r < self.upper


def embedding_range(N, s):
    """Lebesgue exponents reached by radial ``H^s(H^N)`` functions."""
    if int(N) != N or N < 3:
        raise InputError(f"N must be an integer >= 3, got {N!r}")
    if not s > 0:
        raise InputError(f"smoothness s must be positive, got {s!r}")
    if 2 * s >= N:
        return EmbeddingRange(s, 2.0, math.inf, True)
    return EmbeddingRange(s, 2.0, 2 * N / (N - 2 * s), False)


@dataclass(frozen=True)
class CharacteristicRoots:
    mu_minus: float
    mu_plus: float
    nu_minus: float
    nu_plus: float


def characteristic_roots(N, eps):
    """Roots of the two constant-coefficient comparison operators.

    ``y'' + (N-1)(1+eps) y'`` has roots ``-(N-1)(1+eps)`` and 0;
    ``y'' + (N-1) y' + eps y`` has ``(-(N-1) -/+ sqrt((N-1)^2 - 4 eps))/2``,
    real and distinct for ``0 <= eps < (N-1)^2 / 4``.
    """
    if int(N) != N or N < 3:
        raise InputError(f"N must be an integer >= 3, got {N!r}")
    n1 = N - 1
    if not (0 <= eps < n1 * n1 / 4):
        raise InputError(f"eps must lie in [0, {n1 * n1 / 4}), got {eps!r}")
    disc = math.sqrt(n1 * n1 - 4 * eps)
    return CharacteristicRoots(
        mu_minus=-n1 * (1 + eps), mu_plus=0.0,
        nu_minus=(-n1 - disc) / 2, nu_plus=(-n1 + disc) / 2)
