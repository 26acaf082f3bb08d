"""Hartle-Hawking states written in the Boulware (Rob) x anti-Boulware (AntiRob) basis.

Scalar modes live in an infinite Fock space and are truncated at a certified
occupation ``n_max``; Dirac modes (unprimed sector only) are exact in the
four-dimensional basis {vacuum, up, down, pair}.

Truncation bound. With x = tanh^2 q the vacuum weights are (1 - x) x^n and
the one-particle weights are (1 - x)^2 (n + 1) x^n. Summing the geometric
series and its derivative from n = N + 1 gives the discarded masses::

    vacuum:        x^(N+1)
    one-particle:  x^(N+1) * (1 + (N + 1)(1 - x))

The second dominates the first, so it is the reported ``tail_bound``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, HorizonLimitError, TruncationError
from .fock import SubsystemDims, TripartiteState

NMAX_CAP = 4096

# Dirac single-mode basis, fixed once
VAC, UP, DOWN, PAIR = 0, 1, 2, 3
DIRAC_LABELS = ("0", "up", "down", "pair")


@dataclass(frozen=True)
class ScalarTruncation:
    n_max: int
    tail_bound: float
    tolerance: float

    @property
    def dim(self) -> int:
        """Rob/AntiRob dimension needed to hold occupations 0..n_max+1."""
        return self.n_max + 2


def _log_tails(x: float, n_max: int) -> tuple[float, float]:
    """Natural logs of the vacuum and one-particle tails (-inf when x == 0)."""
    if x == 0.0:
        return -math.inf, -math.inf
    log_vac = (n_max + 1) * math.log(x)
    return log_vac, log_vac + math.log1p((n_max + 1) * (1.0 - x))


def vacuum_tail(tanh_qs: float, n_max: int) -> float:
    return math.exp(_log_tails(tanh_qs * tanh_qs, n_max)[0])


def one_particle_tail(tanh_qs: float, n_max: int) -> float:
    return math.exp(_log_tails(tanh_qs * tanh_qs, n_max)[1])


def _check_tanh(tanh_qs: float) -> None:
    if not 0.0 <= tanh_qs:
        raise DomainError(f"tanh q_s must be >= 0, got {tanh_qs!r}")
    if not tanh_qs < 1.0:
        raise HorizonLimitError(
            "tanh q_s = 1 (horizon limit): the scalar Fock series does not truncate"
        )


def truncation_at(tanh_qs: float, n_max: int) -> ScalarTruncation:
    """Truncation at a fixed ``n_max``, with its exact tail bound as the tolerance."""
    _check_tanh(tanh_qs)
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    tail = one_particle_tail(tanh_qs, n_max)
    return ScalarTruncation(n_max, tail, tail)


def choose_nmax(tanh_qs: float, tolerance: float, max_nmax: int = NMAX_CAP) -> ScalarTruncation:
    """Smallest n_max whose vacuum and one-particle tails both fall below ``tolerance``."""
    _check_tanh(tanh_qs)
    if not tolerance > 0:
        raise DomainError(f"tolerance must be > 0, got {tolerance!r}")
    x = tanh_qs * tanh_qs
    log_tol = math.log(tolerance)

    def ok(n: int) -> bool:
        return _log_tails(x, n)[1] <= log_tol

    if not ok(max_nmax):
        raise TruncationError(
            f"no n_max <= {max_nmax} reaches tail {tolerance:g} at q_s = {math.atanh(tanh_qs):.6g}"
            f" (tanh q_s = {tanh_qs:.12g})"
        )
    # the one-particle tail is strictly decreasing in n_max
    lo, hi = 0, max_nmax
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return ScalarTruncation(lo, one_particle_tail(tanh_qs, lo), tolerance)


def _powers(t: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1, dtype=float)
    if t == 0.0:
        return (n == 0).astype(float)
    return np.exp(n * math.log(t))


def scalar_vacuum_coefficients(tanh_qs: float, n_max: int) -> np.ndarray:
    """Amplitude of |n>_R |n>_Rbar, n = 0..n_max: tanh^n q / cosh q."""
    return _powers(tanh_qs, n_max) * math.sqrt(1.0 - tanh_qs * tanh_qs)


def scalar_one_particle_coefficients(tanh_qs: float, n_max: int) -> np.ndarray:
    """Amplitude of |n+1>_R |n>_Rbar, n = 0..n_max: tanh^n q sqrt(n+1) / cosh^2 q."""
    n = np.arange(n_max + 1, dtype=float)
    return _powers(tanh_qs, n_max) * np.sqrt(n + 1.0) * (1.0 - tanh_qs * tanh_qs)


def scalar_hh_vacuum(tanh_qs: float, trunc: ScalarTruncation) -> np.ndarray:
    _check_tanh(tanh_qs)
    d = trunc.dim
    out = np.zeros((d, d))
    idx = np.arange(trunc.n_max + 1)
    out[idx, idx] = scalar_vacuum_coefficients(tanh_qs, trunc.n_max)
    return out


def scalar_hh_one_particle(tanh_qs: float, trunc: ScalarTruncation) -> np.ndarray:
    _check_tanh(tanh_qs)
    d = trunc.dim
    out = np.zeros((d, d))
    idx = np.arange(trunc.n_max + 1)
    out[idx + 1, idx] = scalar_one_particle_coefficients(tanh_qs, trunc.n_max)
    return out


def scalar_entangled(tanh_qs: float, trunc: ScalarTruncation) -> TripartiteState:
    """(|0>_A |0_H> + |1>_A |1_H>) / sqrt(2), truncated."""
    d = trunc.dim
    psi = np.zeros((2, d, d))
    psi[0] = scalar_hh_vacuum(tanh_qs, trunc)
    psi[1] = scalar_hh_one_particle(tanh_qs, trunc)
    return TripartiteState(SubsystemDims(2, d, d), psi / math.sqrt(2.0))


def _dirac_angles(tan_qd: float) -> tuple[float, float]:
    if not 0.0 <= tan_qd <= 1.0:
        raise DomainError(f"tan q_d must lie in [0, 1], got {tan_qd!r}")
    q = math.atan(tan_qd)
    return math.cos(q), math.sin(q)


def dirac_hh_vacuum(tan_qd: float) -> np.ndarray:
    c, s = _dirac_angles(tan_qd)
    out = np.zeros((4, 4))
    out[VAC, VAC] = c * c
    out[UP, DOWN] = s * c
    out[DOWN, UP] = s * c
    out[PAIR, PAIR] = s * s
    return out


def dirac_hh_one_particle(tan_qd: float, spin: Literal["up", "down"]) -> np.ndarray:
    c, s = _dirac_angles(tan_qd)
    out = np.zeros((4, 4))
    if spin == "up":
        out[UP, VAC] = c
        out[PAIR, UP] = s
    elif spin == "down":
        # anticommutation ordering flips the sign of the pair term
        out[DOWN, VAC] = c
        out[PAIR, DOWN] = -s
    else:
        raise DomainError(f"spin must be 'up' or 'down', got {spin!r}")
    return out


def dirac_entangled(tan_qd: float) -> TripartiteState:
    """(|0>_A |0_H> + |up>_A |down_H>) / sqrt(2); Alice index 0 = vacuum, 1 = up."""
    psi = np.stack([dirac_hh_vacuum(tan_qd), dirac_hh_one_particle(tan_qd, "down")])
    return TripartiteState(SubsystemDims(2, 4, 4), psi / math.sqrt(2.0))
