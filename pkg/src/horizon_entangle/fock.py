"""Dense tensor-product arithmetic over Alice (x) Rob (x) AntiRob.

Flat indices are row-major over ``(a, r, rbar)`` with Alice slowest, i.e.
``flat = (a * dim_r + r) * dim_rbar + rbar``. Density matrices carry the list
of subsystem dimensions so they can be traced and partially transposed
without extra bookkeeping at call sites.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import UsageError

HERMITIAN_ATOL = 1e-12


@dataclass(frozen=True)
class SubsystemDims:
    dim_a: int
    dim_r: int
    dim_rbar: int

    def __post_init__(self):
        for name in ("dim_a", "dim_r", "dim_rbar"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise UsageError(f"{name} must be a positive integer, got {value!r}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.dim_a, self.dim_r, self.dim_rbar)

    @property
    def total(self) -> int:
        return self.dim_a * self.dim_r * self.dim_rbar


@dataclass(frozen=True, eq=False)
class TripartiteState:
    dims: SubsystemDims
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.dims.total:
            raise UsageError(
                f"amplitude vector has length {amps.size}, dims {self.dims.shape} need {self.dims.total}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims.shape)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def nonzero(self) -> list[tuple[int, int, int, complex]]:
        """(a, r, rbar, amplitude) for every nonzero amplitude, in flat-index order."""
        out = []
        for flat in np.flatnonzero(self.amplitudes):
            a, r, rb = index_decode(int(flat), self.dims)
            out.append((a, r, rb, complex(self.amplitudes[flat])))
        return out

    def dump(self) -> str:
        """Plain-text listing, one ``a r rbar re im`` row per nonzero amplitude."""
        lines = [f"# dims {self.dims.dim_a} {self.dims.dim_r} {self.dims.dim_rbar}"]
        for a, r, rb, amp in self.nonzero():
            lines.append(f"{a} {r} {rb} {amp.real:.17g} {amp.imag:.17g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        side = int(np.prod(dims))
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (side, side):
            raise UsageError(f"matrix shape {m.shape} does not match dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))


def index_encode(a: int, r: int, rbar: int, dims: SubsystemDims) -> int:
    for value, size, name in zip((a, r, rbar), dims.shape, ("a", "r", "rbar")):
        if not 0 <= value < size:
            raise UsageError(f"index {name}={value} out of range [0, {size})")
    return (a * dims.dim_r + r) * dims.dim_rbar + rbar


def index_decode(flat: int, dims: SubsystemDims) -> tuple[int, int, int]:
    if not 0 <= flat < dims.total:
        raise UsageError(f"flat index {flat} out of range [0, {dims.total})")
    ar, rbar = divmod(flat, dims.dim_rbar)
    a, r = divmod(ar, dims.dim_r)
    return a, r, rbar


def outer(state: TripartiteState) -> DensityMatrix:
    psi = state.amplitudes
    return DensityMatrix(np.outer(psi, psi.conj()), state.dims.shape)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``; kept factors stay in their original order."""
    n = len(rho.dims)
    keep = sorted(set(keep))
    if not keep or len(keep) == n or keep[0] < 0 or keep[-1] >= n:
        raise UsageError(f"keep must be a nonempty proper subset of range({n}), got {keep}")
    t = rho.entries.reshape(rho.dims + rho.dims)
    # einsum labels: ket axes 0..n-1, bra axes n..2n-1; traced bra axes reuse ket labels
    ket = list(range(n))
    bra = [i if i not in keep else n + i for i in range(n)]
    out = keep + [n + i for i in keep]
    reduced = np.einsum(t, ket + bra, out)
    dims = tuple(rho.dims[i] for i in keep)
    side = int(np.prod(dims))
    return DensityMatrix(reduced.reshape(side, side), dims)


def reduced_density(state: TripartiteState, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix of a pure state, contracted straight from the amplitudes.

    Equal to ``partial_trace(outer(state), keep)`` but never forms the full
    tripartite matrix, so it scales to large truncations.
    """
    keep = sorted(set(keep))
    if not keep or len(keep) == 3 or keep[0] < 0 or keep[-1] > 2:
        raise UsageError(f"keep must be a nonempty proper subset of range(3), got {keep}")
    traced = [i for i in range(3) if i not in keep]
    t = np.transpose(state.tensor, keep + traced)
    dims = tuple(state.dims.shape[i] for i in keep)
    m = t.reshape(int(np.prod(dims)), -1)
    return DensityMatrix(m @ m.conj().T, dims)


def partial_transpose(rho: DensityMatrix, subsystem: int = 0) -> np.ndarray:
    """Transpose the ket/bra indices of one factor: <i j|X|k l> -> <k j|X|i l> for factor 0."""
    n = len(rho.dims)
    if not 0 <= subsystem < n:
        raise UsageError(f"subsystem index {subsystem} out of range [0, {n})")
    t = rho.entries.reshape(rho.dims + rho.dims)
    t = np.swapaxes(t, subsystem, n + subsystem)
    side = rho.entries.shape[0]
    return np.ascontiguousarray(t).reshape(side, side)


def purity(rho: DensityMatrix) -> float:
    m = rho.entries
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(m) ** 2))


def product_state(*factors: Sequence[complex]) -> np.ndarray:
    """Kronecker product of ket vectors; convenience for building test states."""
    out = np.array([1.0 + 0j])
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out
