"""Negativity, von Neumann entropy and mutual information.

Two routes are provided. The generic route builds dense reduced density
matrices and diagonalises them; it is the reference. The scalar fast route
exploits the diagonal Bogoliubov structure of the truncated scalar state

    |Psi> = sum_n c_n |0>|n>|n> + d_n |1>|n+1>|n>

under which every reduced matrix and every partial transpose decomposes
into independent small pieces:

* rho_AR^pT  couples only (1, n) with (0, n+1): 2x2 blocks.
* rho_ARbar^pT couples only (0, k-1) with (1, k): 2x2 blocks.
* rho_RRbar^pT conserves r + rbar = s; inside each sector the two rank-one
  terms act as the reflections a -> s - a and a -> s - a + 1 on the Rob
  occupation, which chain the sector into a path, i.e. a tridiagonal block.
* rho_A, rho_R, rho_Rbar are diagonal.

Entropies are in bits throughout, so I_AR + I_ARbar = 2 for a Bell pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import ConsistencyError, InvalidStateError, UsageError
from .fock import DensityMatrix, TripartiteState, partial_trace, partial_transpose, reduced_density
from .states import ScalarTruncation, scalar_one_particle_coefficients, scalar_vacuum_coefficients

NEGATIVITY_FLOOR = 1e-14
ENTROPY_DROP = 1e-14
ENTROPY_INVALID = -1e-8
HERMITIAN_TOL = 1e-10
MI_NOISE = 1e-10
SCHMIDT_TOL = 1e-9
FAST_PATH_TOL = 1e-8
RRBAR_SECTOR_SKIP = 1e-17

BIPARTITIONS = ("AR", "ARbar", "RRbar")
# subsystem indices kept for each bipartition of (A, R, Rbar)
_KEEP = {"AR": (0, 1), "ARbar": (0, 2), "RRbar": (1, 2)}


@dataclass(frozen=True)
class BipartitionReport:
    bipartition: str
    negativity: float
    mutual_information: float
    entropy_a: float
    entropy_b: float
    entropy_joint: float
    nmax_used: int = 0
    tail_bound: float = 0.0


def eigenvalues_hermitian(matrix) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix (LAPACK ``heevd`` via numpy)."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise UsageError(f"expected a square matrix, got shape {m.shape}")
    if m.size == 0:
        return np.zeros(0)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * scale:
        raise UsageError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def _negativity_from_spectrum(eigs: np.ndarray) -> float:
    neg = eigs[eigs <= -NEGATIVITY_FLOOR]
    return float(-neg.sum()) + 0.0  # avoid -0.0


def negativity(rho: DensityMatrix, subsystem: int = 0) -> float:
    if len(rho.dims) != 2:
        raise UsageError(f"negativity needs a bipartite matrix, got dims {rho.dims}")
    return _negativity_from_spectrum(eigenvalues_hermitian(partial_transpose(rho, subsystem)))


def entropy_from_eigenvalues(eigs) -> float:
    """-sum p log2 p over the spectrum, dropping eigenvalues below 1e-14."""
    p = np.asarray(eigs, dtype=float)
    if p.size and p.min() < ENTROPY_INVALID:
        raise InvalidStateError(f"density matrix has eigenvalue {p.min():.3g} < {ENTROPY_INVALID}")
    p = p[p > ENTROPY_DROP]
    return float(-(p * np.log2(p)).sum())


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return entropy_from_eigenvalues(eigenvalues_hermitian(rho.entries))


def _mi(s_a: float, s_b: float, s_ab: float) -> float:
    value = s_a + s_b - s_ab
    if value < -MI_NOISE:
        raise ConsistencyError(f"mutual information {value:.3g} violates subadditivity")
    return max(value, 0.0)


def mutual_information(rho_ab: DensityMatrix) -> float:
    if len(rho_ab.dims) != 2:
        raise UsageError(f"mutual information needs a bipartite matrix, got dims {rho_ab.dims}")
    s_a = von_neumann_entropy(partial_trace(rho_ab, [0]))
    s_b = von_neumann_entropy(partial_trace(rho_ab, [1]))
    return _mi(s_a, s_b, von_neumann_entropy(rho_ab))


def _check_bipartitions(bipartitions: Iterable[str] | None) -> tuple[str, ...]:
    if bipartitions is None:
        return BIPARTITIONS
    chosen = tuple(b for b in BIPARTITIONS if b in set(bipartitions))
    unknown = set(bipartitions) - set(BIPARTITIONS)
    if unknown:
        raise UsageError(f"unknown bipartitions {sorted(unknown)}")
    return chosen


def analyze_all(
    state: TripartiteState,
    trunc: ScalarTruncation | None = None,
    bipartitions: Iterable[str] | None = None,
) -> dict[str, BipartitionReport]:
    """Generic dense analysis of a pure tripartite state.

    Reduced matrices are contracted from the amplitudes, then diagonalised
    densely. Single-party entropies come from the same dense route; the Schmidt
    identities S_AR = S_Rbar, S_ARbar = S_R, S_RRbar = S_A are checked for
    every bipartition analysed.
    """
    chosen = _check_bipartitions(bipartitions)
    single = [von_neumann_entropy(reduced_density(state, [i])) for i in range(3)]
    nmax = trunc.n_max if trunc is not None else 0
    tail = trunc.tail_bound if trunc is not None else 0.0
    reports = {}
    for name in chosen:
        i, j = _KEEP[name]
        (missing,) = {0, 1, 2} - {i, j}
        rho_ab = reduced_density(state, [i, j])
        s_joint = von_neumann_entropy(rho_ab)
        if abs(s_joint - single[missing]) > SCHMIDT_TOL:
            raise ConsistencyError(
                f"Schmidt identity broken for {name}: S_joint={s_joint!r}, S_complement={single[missing]!r}"
            )
        reports[name] = BipartitionReport(
            bipartition=name,
            negativity=negativity(rho_ab),
            mutual_information=_mi(single[i], single[j], s_joint),
            entropy_a=single[i],
            entropy_b=single[j],
            entropy_joint=s_joint,
            nmax_used=nmax,
            tail_bound=tail,
        )
    return reports


# ---------------------------------------------------------------------------
# scalar fast path


def _scalar_amplitudes(tanh_qs: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Tripartite amplitudes c_n (on |0,n,n>) and d_n (on |1,n+1,n>), zero-padded to n_max + 3."""
    c = np.zeros(n_max + 3)
    d = np.zeros(n_max + 3)
    c[: n_max + 1] = scalar_vacuum_coefficients(tanh_qs, n_max) / math.sqrt(2.0)
    d[: n_max + 1] = scalar_one_particle_coefficients(tanh_qs, n_max) / math.sqrt(2.0)
    return c, d


def _two_by_two_negativity(diag0: np.ndarray, diag1: np.ndarray, off: np.ndarray) -> float:
    blocks = np.empty((len(off), 2, 2))
    blocks[:, 0, 0] = diag0
    blocks[:, 1, 1] = diag1
    blocks[:, 0, 1] = off
    blocks[:, 1, 0] = off
    return _negativity_from_spectrum(np.linalg.eigvalsh(blocks).ravel())


def scalar_ar_blockwise(tanh_qs: float, trunc: ScalarTruncation, check: bool = False) -> float:
    """Alice-Rob negativity from the 2x2 blocks {(1, n), (0, n+1)} of rho_AR^pT.

    With ``check=True`` the dense generic route is run as well and any
    disagreement above 1e-8 raises :class:`ConsistencyError`.
    """
    n = trunc.n_max
    c, d = _scalar_amplitudes(tanh_qs, n)
    k = np.arange(n + 1)
    d_prev = np.concatenate(([0.0], d[:n]))
    value = _two_by_two_negativity(d_prev**2, c[k + 1] ** 2, c[k] * d[k])
    if check:
        from .states import scalar_entangled

        rho_ar = reduced_density(scalar_entangled(tanh_qs, trunc), [0, 1])
        generic = negativity(rho_ar)
        if abs(generic - value) > FAST_PATH_TOL:
            raise ConsistencyError(f"blockwise AR negativity {value!r} != generic {generic!r}")
    return value


def scalar_arbar_blockwise(tanh_qs: float, trunc: ScalarTruncation) -> float:
    """Alice-AntiRob negativity from the 2x2 blocks {(0, k-1), (1, k)} of rho_ARbar^pT."""
    n = trunc.n_max
    c, d = _scalar_amplitudes(tanh_qs, n)
    k = np.arange(1, n + 2)
    return _two_by_two_negativity(c[k - 1] ** 2, d[k] ** 2, c[k] * d[k - 1])


def _rrbar_sector(s: int, c: np.ndarray, d: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Tridiagonal (diag, offdiag) of rho_RRbar^pT restricted to r + rbar = s.

    The path starts at the sector's fixed point (r = s/2 for even s, where the
    vacuum term is diagonal; r = (s+1)/2 for odd s, where the one-particle term
    is) and alternates outwards, ending at r = 0.
    """
    k = np.arange(s + 1)
    if s % 2 == 0:
        m = s // 2
        r = np.where(k % 2 == 0, m - k // 2, m + (k + 1) // 2)
        first = c[m] ** 2
        vac_link = k[:-1] % 2 == 1
    else:
        m = (s + 1) // 2
        r = np.where(k % 2 == 1, m - (k + 1) // 2, m + k // 2)
        first = d[m - 1] ** 2
        vac_link = k[:-1] % 2 == 0
    # the path alternates sides of the centre, so states outside the
    # truncated space form a contiguous tail
    inside = (r < dim) & (s - r < dim)
    stop = int(np.argmin(inside)) if not inside.all() else s + 1
    r = r[:stop]
    ra = r[:-1]
    off = np.where(
        vac_link[: stop - 1],
        c[ra] * c[s - ra],
        d[np.maximum(ra - 1, 0)] * d[s - ra],
    )
    diag = np.zeros(stop)
    diag[0] = first
    return diag, off


def scalar_rrbar_blockwise(tanh_qs: float, trunc: ScalarTruncation) -> float:
    """Rob-AntiRob negativity, one tridiagonal eigenproblem per occupation sector.

    Cost grows like n_max^3; the result is a truncation-dependent lower
    estimate of a quantity that diverges at the horizon.
    """
    n = trunc.n_max
    c, d = _scalar_amplitudes(tanh_qs, n)
    c = np.concatenate((c, np.zeros(n + 2)))
    d = np.concatenate((d, np.zeros(n + 2)))
    dim = trunc.dim
    total = 0.0
    for s in range(2 * dim - 1):
        diag, off = _rrbar_sector(s, c, d, dim)
        # diag >= 0, so by Weyl the sector's negativity is at most the
        # negativity of its off-diagonal part, itself <= sum |off|
        if diag.size == 1 or np.abs(off).sum() <= RRBAR_SECTOR_SKIP:
            continue
        total += _negativity_from_spectrum(eigvalsh_tridiagonal(diag, off))
    return total


def scalar_spectra(tanh_qs: float, trunc: ScalarTruncation) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spectra of rho_A, rho_R, rho_Rbar (all diagonal for the scalar state)."""
    n = trunc.n_max
    c, d = _scalar_amplitudes(tanh_qs, n)
    c2, d2 = c[: n + 1] ** 2, d[: n + 1] ** 2
    spec_a = np.array([c2.sum(), d2.sum()])
    spec_r = np.concatenate((c2, [0.0])) + np.concatenate(([0.0], d2))
    spec_rbar = c2 + d2
    return spec_a, spec_r, spec_rbar


def analyze_scalar(
    tanh_qs: float,
    trunc: ScalarTruncation,
    bipartitions: Iterable[str] | None = None,
) -> dict[str, BipartitionReport]:
    """Fast-path equivalent of ``analyze_all(scalar_entangled(tanh_qs, trunc), trunc)``."""
    chosen = _check_bipartitions(bipartitions)
    s_a, s_r, s_rbar = (entropy_from_eigenvalues(p) for p in scalar_spectra(tanh_qs, trunc))
    singles = (s_a, s_r, s_rbar)
    neg_fn = {
        "AR": scalar_ar_blockwise,
        "ARbar": scalar_arbar_blockwise,
        "RRbar": scalar_rrbar_blockwise,
    }
    reports = {}
    for name in chosen:
        i, j = _KEEP[name]
        (missing,) = {0, 1, 2} - {i, j}
        s_joint = singles[missing]
        reports[name] = BipartitionReport(
            bipartition=name,
            negativity=neg_fn[name](tanh_qs, trunc),
            mutual_information=_mi(singles[i], singles[j], s_joint),
            entropy_a=singles[i],
            entropy_b=singles[j],
            entropy_joint=s_joint,
            nmax_used=trunc.n_max,
            tail_bound=trunc.tail_bound,
        )
    return reports
