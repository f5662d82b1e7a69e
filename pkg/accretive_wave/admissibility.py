"""Closed-form parameter logic of the local existence theory: the admissible
range of p, the exponent surcharge nu, the slab exponent epsilon and the
Strichartz pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Any, NamedTuple

from accretive_wave.exception import DomainError

__all__ = [
    "AdmissibleDecision",
    "ProofExponents",
    "StrichartzPair",
    "Theorem",
    "check_admissible",
    "epsilon",
    "infer_theorem",
    "nu",
    "p_range",
    "proof_exponents",
    "strichartz_pair",
]

MAX_REAL_P_DIM = 3


class Theorem(IntEnum):
    """Which existence result a parameter set is checked against."""

    INTEGER_P = 1
    REAL_P = 2


def _json_float(value: float | None) -> float | str | None:
    if value is not None and math.isinf(value):
        return "inf"
    return value


@dataclass(frozen=True)
class AdmissibleDecision:
    theorem: Theorem
    admissible: bool
    p_interval: tuple[float, float]
    eps: float | None
    reason: str

    def to_dict(self) -> dict[str, Any]:
        low, high = self.p_interval
        return {
            "theorem": int(self.theorem),
            "admissible": self.admissible,
            "p_interval": [_json_float(low), _json_float(high)],
            "eps": _json_float(self.eps),
            "reason": self.reason,
        }


@dataclass(frozen=True)
class StrichartzPair:
    """Exponents (q, rho) and the dual (dual_q, dual_rho) tied to mu by
    rho - 1/q = mu = 1 - (dual_rho - 1/dual_q).
    """

    q: float
    rho: float
    dual_q: float
    dual_rho: float
    dual_conjugate: float
    mu: float

    @property
    def residual(self) -> float:
        return self.rho - 1.0 / self.q - self.mu

    @property
    def dual_residual(self) -> float:
        return 1.0 - (self.dual_rho - 1.0 / self.dual_q) - self.mu


class ProofExponents(NamedTuple):
    q: float
    rho: float
    eps: float


def _check_p(p: float) -> None:
    if not p > 1:
        raise DomainError(f"power p must be greater than 1 (got {p})")


def _check_dim(dim: int) -> None:
    if dim < 1:
        raise DomainError(f"dimension must be at least 1 (got {dim})")


def nu(s: float, p: float, dim: int) -> float:
    """Sobolev surcharge max(0, (N/2 - s)(p - 1)/p)."""
    _check_p(p)
    return max(0.0, (dim / 2.0 - s) * (p - 1.0) / p)


def epsilon(mu: float, p: float, dim: int) -> float:
    """Slab exponent; 1 when mu >= 1 + N/2. Positivity is not checked."""
    _check_p(p)
    if mu >= 1.0 + dim / 2.0:
        return 1.0
    return 1.0 - (p - 1.0) * (1.0 + dim / 2.0 - mu)


def p_range(mu: float, dim: int) -> tuple[float, float]:
    """Open interval of admissible p for integer powers."""
    if not mu >= 1.0:
        raise DomainError(f"mu must be at least 1 (got {mu})")
    _check_dim(dim)
    if mu >= 1.0 + dim / 2.0:
        return 1.0, math.inf
    return 1.0, (dim + 4.0 - 2.0 * mu) / (dim + 2.0 - 2.0 * mu)


def infer_theorem(p: float) -> Theorem:
    if float(p).is_integer():
        return Theorem.INTEGER_P
    return Theorem.REAL_P


def _in_mu_set(mu: float) -> bool:
    return 1.0 < mu < 2.0 or (mu >= 1.0 and float(mu).is_integer())


def _check_integer_p(mu: float, p: float, dim: int) -> AdmissibleDecision:
    interval = p_range(mu, dim)
    low, high = interval
    eps = epsilon(mu, p, dim) if p > 1 else None
    if not (float(p).is_integer() and p >= 2):
        reason = f"p={p:g} is not an integer >= 2"
        return AdmissibleDecision(
            Theorem.INTEGER_P, False, interval, eps, reason
        )
    if not low < p < high:
        reason = f"p={p:g} outside the open interval ({low:g}, {high:g})"
        return AdmissibleDecision(
            Theorem.INTEGER_P, False, interval, eps, reason
        )
    reason = f"p={p:g} lies in ({low:g}, {high:g}), eps={eps:g}"
    return AdmissibleDecision(Theorem.INTEGER_P, True, interval, eps, reason)


def _check_real_p(mu: float, p: float, dim: int) -> AdmissibleDecision:
    if not mu >= 1.0:
        raise DomainError(f"mu must be at least 1 (got {mu})")
    _check_dim(dim)
    interval = (max(1.0, mu - 1.0), math.inf)

    def decide(admissible: bool, reason: str) -> AdmissibleDecision:
        return AdmissibleDecision(
            Theorem.REAL_P, admissible, interval, None, reason
        )

    if dim > MAX_REAL_P_DIM:
        return decide(False, "N>3")
    if not p > 1:
        return decide(False, f"p={p:g} is not greater than 1")
    if p < mu - 1.0:
        return decide(False, f"p={p:g} is below mu-1={mu - 1.0:g}")
    note = (
        "mu is taken from (1,2) union the positive integers; the "
        "intersection form of this hypothesis is empty"
    )
    if not _in_mu_set(mu):
        return decide(
            False, f"mu={mu:g} is neither in (1,2) nor an integer; {note}"
        )
    return decide(True, f"p={p:g} >= max(1, mu-1) with N={dim}; {note}")


def check_admissible(
    theorem: Theorem | int, mu: float, p: float, dim: int
) -> AdmissibleDecision:
    """Decide whether (mu, p, N) satisfies the hypotheses of ``theorem``.

    :raises DomainError: when mu < 1 or N < 1.
    """
    theorem = Theorem(theorem)
    if theorem is Theorem.INTEGER_P:
        return _check_integer_p(mu, p, dim)
    return _check_real_p(mu, p, dim)


def strichartz_pair(
    q: float, mu: float, dual_q: float = math.inf
) -> StrichartzPair:
    """rho = mu + 1/q and dual_rho = 1 - mu + 1/dual_q."""
    if not q >= 2.0:
        raise DomainError(f"q must be at least 2 (got {q})")
    if not dual_q >= 2.0:
        raise DomainError(f"dual q must be at least 2 (got {dual_q})")
    if math.isinf(dual_q):
        conjugate = 1.0
    else:
        conjugate = dual_q / (dual_q - 1.0)
    return StrichartzPair(
        q=q,
        rho=mu + 1.0 / q,
        dual_q=dual_q,
        dual_rho=1.0 - mu + 1.0 / dual_q,
        dual_conjugate=conjugate,
        mu=mu,
    )


def proof_exponents(mu: float, p: float, dim: int) -> ProofExponents:
    """Time and space exponents (q, rho) of the fixed-point space."""
    eps = epsilon(mu, p, dim)
    if eps <= 0.0:
        raise DomainError(
            f"eps={eps:g} is not positive for mu={mu:g}, p={p:g}, N={dim}"
        )
    if mu >= 1.0 + dim / 2.0:
        return ProofExponents(math.inf, mu, eps)
    return ProofExponents(p / (1.0 - eps), mu + nu(mu - 1.0, p, dim), eps)
