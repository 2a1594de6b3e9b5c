import numpy as np
import pytest

from spinladder.hilbert import basis_state, dense_matrix, sz_diagonal
from spinladder.model import (
    BondKind,
    BondTerm,
    Couplings,
    HamiltonianTerms,
    LadderSpec,
    StageTag,
    total_hamiltonian,
)
from spinladder.propagate import (
    EvolutionConfig,
    Method,
    SpectralPropagator,
    TrotterPropagator,
    prepare,
)


def single_xy_bond(amp=0.5):
    return HamiltonianTerms(2, (BondTerm(BondKind.XY, 1, 2, amp, StageTag.RUNG),))


@pytest.mark.parametrize("method", list(Method))
@pytest.mark.parametrize("t", [0.5, 2.0, 7.0])
def test_two_site_rabi_rotation(method, t):
    # single flip-flop bond of amplitude 1/2 rotates |ud> <-> |du> at angle t/2
    prop = prepare(single_xy_bond(), EvolutionConfig(method=method, dt=0.01))
    psi = prop.evolve(basis_state(2, 0b01), t)
    p_up_site1 = abs(psi[0b01]) ** 2
    assert p_up_site1 == pytest.approx(np.cos(t / 2) ** 2, abs=1e-7)


@pytest.mark.parametrize("method", list(Method))
def test_t_zero_is_identity(method):
    spec = LadderSpec(m=2)
    terms = total_hamiltonian(spec, Couplings(j_se=0.3, alpha=1.0))
    prop = prepare(terms, EvolutionConfig(method=method))
    rng = np.random.default_rng(0)
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi /= np.linalg.norm(psi)
    assert np.allclose(prop.evolve(psi, 0.0), psi)


def test_spectral_forward_backward_roundtrip():
    spec = LadderSpec(m=3)
    terms = total_hamiltonian(spec, Couplings(j_se=0.4, alpha=0.5))
    prop = prepare(terms, EvolutionConfig())
    rng = np.random.default_rng(7)
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi /= np.linalg.norm(psi)
    back = prop.evolve(prop.evolve(psi, 13.7), -13.7)
    assert np.max(np.abs(back - psi)) <= 1e-12


@pytest.mark.parametrize("method", list(Method))
def test_norm_conservation(method):
    spec = LadderSpec(m=3)
    terms = total_hamiltonian(spec, Couplings(j_se=0.5, alpha=1.0))
    prop = prepare(terms, EvolutionConfig(method=method, dt=0.05))
    rng = np.random.default_rng(3)
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi /= np.linalg.norm(psi)
    out = prop.evolve(psi, 5.0)
    assert abs(np.linalg.norm(out) - 1.0) <= 1e-10


@pytest.mark.parametrize("method", list(Method))
def test_total_sz_conserved(method):
    spec = LadderSpec(m=2)
    terms = total_hamiltonian(spec, Couplings(j_se=0.5, alpha=1.0))
    prop = prepare(terms, EvolutionConfig(method=method, dt=0.05))
    sz_total = sum(sz_diagonal(spec.n_sites, s) for s in range(1, spec.n_sites + 1))
    rng = np.random.default_rng(4)
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi /= np.linalg.norm(psi)
    before = sz_total @ np.abs(psi) ** 2
    after = sz_total @ np.abs(prop.evolve(psi, 5.0)) ** 2
    assert before == pytest.approx(after, abs=1e-10)


def test_time_reversal_through_negated_hamiltonian():
    spec = LadderSpec(m=3)
    terms = total_hamiltonian(spec, Couplings(j_se=0.3, alpha=1.0))
    negated = HamiltonianTerms(
        terms.n_sites,
        tuple(
            BondTerm(t.kind, t.site_a, t.site_b, -t.amplitude, t.stage)
            for t in terms.terms
        ),
    )
    fwd = prepare(terms, EvolutionConfig())
    bwd = prepare(negated, EvolutionConfig())
    rng = np.random.default_rng(9)
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi /= np.linalg.norm(psi)
    restored = bwd.evolve(fwd.evolve(psi, 8.0), 8.0)
    assert np.max(np.abs(restored - psi)) <= 1e-10


def test_odd_ring_gate_grouping_falls_back():
    # a 5-cycle admits no 2-coloring; grouping must still keep each group
    # site-disjoint
    spec = LadderSpec(m=5)
    terms = total_hamiltonian(spec, Couplings(j_se=0.1, alpha=1.0))
    prop = TrotterPropagator(terms, dt=0.1, order=2)
    for group in prop.groups:
        sites = [s for gate in group for s in gate.sites]
        assert len(sites) == len(set(sites))
    # system-leg bonds (both sites <= 5) cannot all fit in two groups
    per_group = [
        sum(1 for g in group if max(g.sites) <= 5) for group in prop.groups
    ]
    assert sum(1 for n in per_group if n > 0) >= 3


def test_trotter4_accuracy_against_spectral():
    spec = LadderSpec(m=3)
    terms = total_hamiltonian(spec, Couplings(j_se=0.2, alpha=1.0))
    exact = prepare(terms, EvolutionConfig())
    rng = np.random.default_rng(42)
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi /= np.linalg.norm(psi)
    ref = exact.evolve(psi, 10.0)
    tr4 = prepare(terms, EvolutionConfig(method=Method.TROTTER4, dt=0.05))
    assert np.max(np.abs(tr4.evolve(psi, 10.0) - ref)) <= 1e-6


def test_convergence_orders():
    spec = LadderSpec(m=3)
    terms = total_hamiltonian(spec, Couplings(j_se=0.2, alpha=1.0))
    exact = prepare(terms, EvolutionConfig())
    rng = np.random.default_rng(42)
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi /= np.linalg.norm(psi)
    ref = exact.evolve(psi, 10.0)

    def endpoint_error(order, dt):
        prop = TrotterPropagator(terms, dt=dt, order=order)
        return np.max(np.abs(prop.evolve(psi, 10.0) - ref))

    ratio2 = endpoint_error(2, 0.1) / endpoint_error(2, 0.05)
    assert ratio2 == pytest.approx(4.0, rel=0.2)
    ratio4 = endpoint_error(4, 0.1) / endpoint_error(4, 0.05)
    assert ratio4 == pytest.approx(16.0, rel=0.3)


def test_trotter_time_rounding_warns():
    prop = TrotterPropagator(single_xy_bond(), dt=0.1, order=2)
    psi = basis_state(2, 0b01)
    with pytest.warns(UserWarning, match="rounding"):
        prop.evolve(psi, 0.13)


def test_spectral_matches_dense_exponential():
    spec = LadderSpec(m=2)
    terms = total_hamiltonian(spec, Couplings(j_se=0.4, alpha=0.3))
    prop = prepare(terms, EvolutionConfig())
    H = dense_matrix(terms)
    energies, modes = np.linalg.eigh(H)
    rng = np.random.default_rng(8)
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi /= np.linalg.norm(psi)
    t = 3.3
    expected = modes @ (np.exp(-1j * energies * t) * (modes.conj().T @ psi))
    assert np.allclose(prop.evolve(psi, t), expected)


def test_trajectory_requires_monotone_times():
    prop = TrotterPropagator(single_xy_bond(), dt=0.1, order=2)
    psi = basis_state(2, 0b01)
    with pytest.raises(ValueError):
        list(prop.trajectory(psi, [1.0, 0.5]))


def test_config_validation():
    with pytest.raises(ValueError):
        EvolutionConfig(dt=0.0)
    with pytest.raises(ValueError):
        EvolutionConfig(t_max=-1.0)
    with pytest.raises(ValueError):
        TrotterPropagator(single_xy_bond(), dt=0.1, order=3)
