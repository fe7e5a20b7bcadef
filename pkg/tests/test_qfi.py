import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import random_density
from interferoq.dephasing import INDEPENDENT, DephasingParams, ghz_readout
from interferoq.errors import DerivativeConsistencyError, StencilError
from interferoq.models import InterferometerSpec, dephased_state_family, qfi_closed_form
from interferoq.qfi import (
    StateFamily,
    qfi_pure_generator,
    qfi_sld,
    qfi_spectral,
    qfi_spectral_naive,
    sld_operator,
)
from interferoq.qstate import DensityMatrix, collective_jz, ghz_state, product_plus_state


def random_hermitian(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def unitary_family(rho0, h):
    return StateFamily(lambda chi: DensityMatrix(_conj(rho0, h, chi)))


def _conj(rho0, h, chi):
    u = expm(-1j * chi * h)
    return u @ rho0 @ u.conj().T


def unitary_qfi_oracle(rho0, h):
    """2 sum_ij (p_i - p_j)^2 / (p_i + p_j) |<i|H|j>|^2 in the eigenbasis of rho0."""
    p, v = np.linalg.eigh(rho0)
    hh = v.conj().T @ h @ v
    total = 0.0
    for i in range(p.size):
        for j in range(p.size):
            if p[i] + p[j] > 1e-12:
                total += 2 * (p[i] - p[j]) ** 2 / (p[i] + p[j]) * abs(hh[i, j]) ** 2
    return total


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_pure_ghz_heisenberg(n):
    # [PAPER] pure GHZ under J_z: F = N^2; product state: F = N
    assert qfi_pure_generator(ghz_state(n), collective_jz(n)) == pytest.approx(n**2, rel=1e-14)
    assert qfi_pure_generator(product_plus_state(n), collective_jz(n)) == pytest.approx(
        n, rel=1e-13
    )


def test_pure_state_all_routes_agree():
    n = 3
    rho0 = ghz_state(n).density_matrix().matrix
    fam = unitary_family(rho0, collective_jz(n))
    assert qfi_sld(fam, 0.2).value == pytest.approx(9.0, rel=1e-8)
    assert qfi_spectral(fam, 0.2).value == pytest.approx(9.0, rel=1e-8)


@pytest.mark.parametrize("c", [1.0, 0.3, 1e-4])
def test_bloch_vector_oracle(c):
    # [DERIVED] a qubit with Bloch vector of length c rotating at rate s has F = c^2 s^2
    s = 2.7
    params = DephasingParams(INDEPENDENT, -np.log(c), 1.0)
    fam = StateFamily(lambda chi: ghz_readout(1, s * chi, params).matrix_2x2())
    assert qfi_spectral(fam, 0.4).value == pytest.approx(c**2 * s**2, rel=1e-7)
    assert qfi_sld(fam, 0.4).value == pytest.approx(c**2 * s**2, rel=1e-7)


def test_mixed_unitary_family_matches_oracle(rng):
    rho0 = random_density(2, rng)
    h = random_hermitian(4, rng)
    fam = unitary_family(rho0, h)
    expected = unitary_qfi_oracle(rho0, h)
    assert qfi_spectral(fam, 0.0).value == pytest.approx(expected, rel=1e-7)
    assert qfi_sld(fam, 0.0).value == pytest.approx(expected, rel=1e-7)
    assert qfi_spectral_naive(fam, 0.0) == pytest.approx(expected, rel=1e-6)


def test_rank_deficient_family(rng):
    rho0 = random_density(2, rng, rank=2)
    h = random_hermitian(4, rng)
    fam = unitary_family(rho0, h)
    res = qfi_spectral(fam, 0.0)
    assert res.support_dim == 2
    assert res.value == pytest.approx(unitary_qfi_oracle(rho0, h), rel=1e-7)


def test_sld_solves_lyapunov_equation(rng):
    rho = random_density(2, rng)
    h = random_hermitian(4, rng)
    drho = -1j * (h @ rho - rho @ h)
    sld = sld_operator(DensityMatrix(rho), drho)
    np.testing.assert_allclose((rho @ sld + sld @ rho) / 2, drho, atol=1e-12)


def test_sld_rejects_traceful_derivative():
    with pytest.raises(DerivativeConsistencyError):
        sld_operator(DensityMatrix(np.eye(2) / 2), np.eye(2) * 1e-3)


def test_degenerate_support_raises():
    fam = StateFamily(lambda chi: DensityMatrix(np.eye(4) / 4))
    with pytest.raises(StencilError):
        qfi_spectral(fam, 0.0)


def test_diagnostics_reported():
    spec = InterferometerSpec(2.0, 1.0, 3)
    res = qfi_spectral(dephased_state_family(spec, 0.5), 0.3)
    assert res.method == "spectral"
    assert res.support_dim == 2
    assert res.diagnostics["fd_step"] == pytest.approx(1e-5)
    assert res.diagnostics["discarded_weight"] < 1e-12
    assert sum(res.diagnostics["terms"]) == pytest.approx(res.value)


def test_richardson_consistency():
    # the central-difference estimate at h and h/2 agree to O(h^2)
    spec = InterferometerSpec(1.0, 1.0, 3, strength=1.0)
    exact = qfi_closed_form(spec, 0.5)
    errs = []
    for h in (1e-2, 5e-3):
        base = dephased_state_family(spec, 0.5)
        fam = StateFamily(base.evaluator, fd_step=h)
        errs.append(abs(qfi_spectral(fam, 0.3).value - exact))
    assert errs[1] < errs[0]
    assert 3.0 < errs[0] / errs[1] < 5.0


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_unitary_invariance(n, chi, seed):
    rng = np.random.default_rng(seed)
    spec = InterferometerSpec(2.0, 1.0, n)
    base = dephased_state_family(spec, 0.4)
    w = expm(-1j * random_hermitian(2**n, rng))
    rotated = StateFamily(lambda x: DensityMatrix(w @ base(x).matrix @ w.conj().T))
    a = qfi_sld(base, chi).value
    b = qfi_sld(rotated, chi).value
    assert b == pytest.approx(a, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.sampled_from([0.1, 0.5, 1.0]), st.floats(-2, 2))
def test_chi_independence(n, gt, chi):
    spec = InterferometerSpec(2.0, 1.0, n)
    fam = dephased_state_family(spec, gt)
    assert qfi_spectral(fam, chi).value == pytest.approx(qfi_closed_form(spec, gt), rel=1e-6)
