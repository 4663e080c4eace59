import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plasmonqe import dynamics, numerics
from plasmonqe.dynamics import (EmitterSystem, build_hamiltonian, build_liouvillian,
                                check_density_matrix, evolve, populations, product_state,
                                single_excitation_block, steady_state, two_emitters)

G = 2.9e10


def single_emitter(rabi=0.0):
    return EmitterSystem(positions_nm=[[0, 0, 10]], gamma=G, rabi=[rabi * G],
                         omega12=[[0.0]], gamma_matrix=[[G]])


def test_basis_order():
    assert dynamics.basis_labels(2) == ["ee", "eg", "ge", "gg"]
    assert product_state("eg")[1, 1] == 1
    s1 = dynamics.lowering(0, 2)
    # lowering emitter 1 maps |ee> to |ge>
    np.testing.assert_array_equal(s1 @ product_state("ee") @ s1.T, product_state("ge"))


def test_single_emitter_decay():
    t = np.linspace(0, 5, 51)
    for method in ("expm", "integrate"):
        pe = evolve(single_emitter(), np.diag([1.0, 0.0]), t, method=method).states[:, 0, 0].real
        np.testing.assert_allclose(pe, np.exp(-2 * t), atol=1e-6, rtol=0)


def test_collective_rates():
    L = build_liouvillian(two_emitters(rabi_over_gamma=0, omega12_over_gamma=0))
    H = single_excitation_block(L)
    # coherence-free populations of |+> and |-> decay at 4 and 0
    plus = 0.5 * np.array([[1, 1], [1, 1]])
    minus = 0.5 * np.array([[1, -1], [-1, 1]])
    rates = []
    for blk in (plus, minus):
        v = blk.reshape(-1, order="F")
        rates.append(-(v.conj() @ H @ v).real / (v.conj() @ v).real)
    np.testing.assert_allclose(rates, [4.0, 0.0], atol=1e-12)
    ev = np.linalg.eigvals(H)
    assert np.min(np.abs(ev)) < 1e-12
    assert np.min(np.abs(ev + 4)) < 1e-12


def test_dark_state_is_stationary():
    sys = two_emitters(rabi_over_gamma=0, omega12_over_gamma=0.7)
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    assert dynamics.liouvillian_residual(sys, rho) < 1e-12


def test_hamiltonian_entries():
    H = build_hamiltonian(two_emitters(omega12_over_gamma=0.3, rabi_over_gamma=(0.4, 0.2),
                                       detuning_over_gamma=1.0))
    i = dynamics.basis_index
    assert H[i("eg"), i("ge")] == pytest.approx(0.3)
    assert H[i("ee"), i("ee")] == pytest.approx(1.0)
    assert H[i("gg"), i("gg")] == pytest.approx(-1.0)
    # drive on emitter 1 couples |ge> -> |ee>
    assert H[i("ee"), i("ge")] == pytest.approx(0.2)
    assert H[i("ee"), i("eg")] == pytest.approx(0.1)


configs = st.tuples(
    st.floats(0, 5), st.floats(0, 2), st.floats(0, 2), st.floats(0, 1), st.floats(-2, 2),
    st.sampled_from(["ee", "eg", "ge", "gg"]))


@settings(max_examples=25, deadline=None)
@given(configs)
def test_density_matrix_invariants(cfg):
    o12, r1, r2, g12, det, init = cfg
    sys = two_emitters(omega12_over_gamma=o12, rabi_over_gamma=(r1, r2),
                       gamma12_over_gamma=g12, detuning_over_gamma=det)
    sol = evolve(sys, product_state(init), np.linspace(0, 5, 26), check=False)
    for rho in sol.states:
        assert abs(np.trace(rho) - 1) <= 1e-9
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-10
        assert np.linalg.eigvalsh(rho)[0] >= -1e-8


def test_expm_and_integrate_agree():
    sys = two_emitters(omega12_over_gamma=2.0, rabi_over_gamma=(1.0, 0.5))
    t = np.linspace(0, 3, 7)
    a = evolve(sys, product_state("ee"), t).states
    b = evolve(sys, product_state("ee"), t, method="integrate").states
    assert np.max(np.abs(a - b)) < 1e-8


def test_populations_independent_of_omega12_when_undriven():
    t = np.linspace(0, 5, 21)
    ref = None
    for o12 in (0.0, 0.5, 3.0):
        sys = two_emitters(omega12_over_gamma=o12, rabi_over_gamma=0, gamma12_over_gamma=0)
        p = populations(evolve(sys, product_state("ee"), t)).as_array()
        if ref is None:
            ref = p
        np.testing.assert_allclose(p, ref, atol=1e-12)


def test_steady_state_unique_and_degenerate():
    sys = two_emitters(gamma12_over_gamma=0.5)
    rho = steady_state(sys)
    check_density_matrix(rho)
    assert dynamics.liouvillian_residual(sys, rho) < 1e-10
    deg = two_emitters()
    with pytest.raises(numerics.DegenerateKernelError):
        steady_state(deg)
    rho_ee = steady_state(deg, rho0=product_state("ee"))
    long = evolve(deg, product_state("ee"), [0.0, 200.0]).states[-1]
    np.testing.assert_allclose(rho_ee, long, atol=1e-9)


def test_undriven_steady_state_is_ground():
    rho = steady_state(two_emitters(rabi_over_gamma=0, gamma12_over_gamma=0.3))
    assert populations(rho).P_gg[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kw", [
    dict(positions_nm=[[0, 0, 0], [0, 0, 0]]),
    dict(gamma_matrix=[[G, 2 * G], [2 * G, G]]),
    dict(omega12=[[1.0, 0.0], [1.0, 0.0]]),
    dict(rabi=[1.0]),
])
def test_system_validation(kw):
    base = dict(positions_nm=[[0, 0, 0], [1, 0, 0]], gamma=G, rabi=[0, 0],
                omega12=np.zeros((2, 2)), gamma_matrix=np.eye(2) * G)
    base.update(kw)
    with pytest.raises(ValueError):
        EmitterSystem(**base)


def test_check_density_matrix_names_invariant():
    with pytest.raises(numerics.InvariantError) as info:
        check_density_matrix(np.diag([0.5, 0.2, 0.1, 0.1]))
    assert info.value.invariant == "trace"
    with pytest.raises(numerics.InvariantError) as info:
        check_density_matrix(np.diag([1.2, -0.2, 0, 0]))
    assert info.value.invariant == "positivity"


def test_evolve_input_checks():
    sys = two_emitters()
    with pytest.raises(ValueError):
        evolve(sys, np.eye(2) / 2, [0, 1])
    with pytest.raises(ValueError):
        evolve(sys, product_state("ee"), [0, 1], method="euler")
