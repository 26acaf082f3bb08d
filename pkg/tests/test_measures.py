import math
import time

import numpy as np
import pytest
from scipy.stats import unitary_group

from horizon_entangle.errors import ConsistencyError, InvalidStateError, UsageError
from horizon_entangle.fock import DensityMatrix, SubsystemDims, TripartiteState, reduced_density
from horizon_entangle.measures import (
    analyze_all,
    analyze_scalar,
    eigenvalues_hermitian,
    entropy_from_eigenvalues,
    mutual_information,
    negativity,
    scalar_ar_blockwise,
    scalar_arbar_blockwise,
    scalar_rrbar_blockwise,
    von_neumann_entropy,
)
from horizon_entangle.states import choose_nmax, dirac_entangled, scalar_entangled, truncation_at

BELL = DensityMatrix(np.outer([1, 0, 0, 1], [1, 0, 0, 1]) / 2, (2, 2))


def test_eigenvalues_simple():
    assert np.allclose(eigenvalues_hermitian(np.eye(4)), 1.0)
    assert np.allclose(eigenvalues_hermitian(np.diag([3.0, -1.0])), [-1.0, 3.0])


def test_eigenvalues_reconstruction():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(50, 50)) + 1j * rng.normal(size=(50, 50))
    m = a + a.conj().T
    lam = eigenvalues_hermitian(m)
    assert np.all(np.diff(lam) >= 0)
    _, v = np.linalg.eigh(m)
    assert np.linalg.norm(m - v @ np.diag(lam) @ v.conj().T) < 1e-10


def test_eigenvalues_rejects_non_hermitian():
    with pytest.raises(UsageError):
        eigenvalues_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_negativity_bell_and_product():
    assert np.isclose(negativity(BELL), 0.5, atol=1e-15)
    prod = DensityMatrix(np.kron(np.diag([0.4, 0.6]), np.diag([0.1, 0.2, 0.7])), (2, 3))
    assert negativity(prod) == 0.0


DIRAC_HORIZON_NEG_AR = 0.24999999999999992  # brute-force pipeline, tan q_d = 1


def test_negativity_dirac_horizon_regression():
    rho_ar = reduced_density(dirac_entangled(1.0), [0, 1])
    assert abs(negativity(rho_ar) - DIRAC_HORIZON_NEG_AR) < 1e-12


def test_entropy_values():
    assert abs(von_neumann_entropy(BELL)) < 1e-12
    assert np.isclose(von_neumann_entropy(DensityMatrix(np.eye(2) / 2, (2,))), 1.0)
    assert np.isclose(von_neumann_entropy(DensityMatrix(np.diag([0.25, 0.75]), (2,))), 0.811278, atol=1e-6)
    assert np.isclose(entropy_from_eigenvalues([0.25, 0.75]), -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75)))


def test_entropy_rejects_negative_spectrum():
    with pytest.raises(InvalidStateError):
        entropy_from_eigenvalues([1.1, -0.1])


def test_mutual_information_values():
    assert np.isclose(mutual_information(BELL), 2.0)
    prod = DensityMatrix(np.kron(np.diag([0.4, 0.6]), np.diag([0.3, 0.7])), (2, 2))
    assert abs(mutual_information(prod)) < 1e-12
    classical = DensityMatrix(np.diag([0.5, 0, 0, 0.5]), (2, 2))
    assert np.isclose(mutual_information(classical), 1.0)


@pytest.mark.parametrize("field", ["scalar", "dirac"])
def test_analyze_all_zero_squeezing(field):
    if field == "scalar":
        trunc = choose_nmax(0.0, 1e-9)
        reports = analyze_all(scalar_entangled(0.0, trunc), trunc)
    else:
        reports = analyze_all(dirac_entangled(0.0))
    assert np.isclose(reports["AR"].negativity, 0.5, atol=1e-12)
    assert np.isclose(reports["AR"].mutual_information, 2.0, atol=1e-12)
    for name in ("ARbar", "RRbar"):
        assert reports[name].negativity == 0.0
        assert abs(reports[name].mutual_information) < 1e-12


@pytest.mark.parametrize("t", [0.05, 0.3, 0.6, 0.9, 0.99, 1.0])
def test_dirac_conservation(t):
    r = analyze_all(dirac_entangled(t))
    assert abs(r["AR"].negativity + r["ARbar"].negativity - 0.5) < 1e-12
    assert abs(r["AR"].mutual_information + r["ARbar"].mutual_information - 2.0) < 1e-12


@pytest.mark.parametrize("t", [0.1, 0.5, 0.8])
def test_scalar_arbar_separable(t):
    trunc = choose_nmax(t, 1e-10)
    r = analyze_all(scalar_entangled(t, trunc), trunc, bipartitions=("AR", "ARbar"))
    assert r["ARbar"].negativity <= 1e-10
    assert r["AR"].nmax_used == trunc.n_max


def test_blockwise_ar_zero_and_generic():
    assert np.isclose(scalar_ar_blockwise(0.0, choose_nmax(0.0, 1e-9)), 0.5)
    trunc = choose_nmax(0.5, 1e-12)
    generic = negativity(reduced_density(scalar_entangled(0.5, trunc), [0, 1]))
    assert abs(scalar_ar_blockwise(0.5, trunc) - generic) < 1e-10
    # the self-check path runs the generic route too
    assert scalar_ar_blockwise(0.5, trunc, check=True) == scalar_ar_blockwise(0.5, trunc)


@pytest.mark.parametrize("t, n", [(0.0, 3), (0.3, 8), (0.7, 14), (0.9, 20)])
def test_analyze_scalar_matches_dense(t, n):
    trunc = truncation_at(t, n)
    fast = analyze_scalar(t, trunc)
    dense = analyze_all(scalar_entangled(t, trunc), trunc)
    for name in fast:
        for attr in ("negativity", "mutual_information", "entropy_a", "entropy_b", "entropy_joint"):
            assert abs(getattr(fast[name], attr) - getattr(dense[name], attr)) < 1e-10, (name, attr)


def test_individual_blockwise_routes():
    trunc = truncation_at(0.6, 12)
    dense = analyze_all(scalar_entangled(0.6, trunc), trunc)
    assert np.isclose(scalar_arbar_blockwise(0.6, trunc), dense["ARbar"].negativity, atol=1e-12)
    assert np.isclose(scalar_rrbar_blockwise(0.6, trunc), dense["RRbar"].negativity, atol=1e-12)


def test_negativity_invariant_under_transposed_factor():
    rng = np.random.default_rng(11)
    for _ in range(20):
        da, db = rng.integers(2, 5, size=2)
        psi = rng.normal(size=da * db) + 1j * rng.normal(size=da * db)
        rho = DensityMatrix(np.outer(psi, psi.conj()) / np.vdot(psi, psi), (int(da), int(db)))
        assert abs(negativity(rho, 0) - negativity(rho, 1)) < 1e-11


def test_negativity_local_unitary_invariance():
    rng = np.random.default_rng(12)
    psi = rng.normal(size=6) + 1j * rng.normal(size=6)
    rho = np.outer(psi, psi.conj()) / np.vdot(psi, psi)
    u = np.kron(unitary_group.rvs(2, random_state=1), unitary_group.rvs(3, random_state=2))
    a = negativity(DensityMatrix(rho, (2, 3)))
    b = negativity(DensityMatrix(u @ rho @ u.conj().T, (2, 3)))
    assert np.isclose(a, b, atol=1e-12)


def test_blockwise_faster_than_dense_at_512():
    trunc = truncation_at(0.9, 512)
    t0 = time.perf_counter()
    for _ in range(5):
        fast = scalar_ar_blockwise(0.9, trunc)
    t_fast = (time.perf_counter() - t0) / 5
    t0 = time.perf_counter()
    dense = negativity(reduced_density(scalar_entangled(0.9, trunc), [0, 1]))
    t_dense = time.perf_counter() - t0
    assert abs(fast - dense) < 1e-10
    assert t_dense >= 10 * t_fast


def test_mutual_information_guard():
    from horizon_entangle.measures import _mi

    with pytest.raises(ConsistencyError):
        _mi(0.0, 0.0, 1.0)
    assert _mi(1.0, 1.0, 2.0 + 1e-12) == 0.0
