import numpy as np
import pytest

from spinladder.ensemble import (
    EnsembleMode,
    EnsembleSpec,
    TimeSeries,
    _site1_up_codes,
    ensemble_matrix,
    exact_trace_states,
    polarization_curve,
    random_phase_state,
)
from spinladder.hilbert import local_sz, sz_diagonal
from spinladder.model import Couplings, LadderSpec, total_hamiltonian
from spinladder.propagate import EvolutionConfig, prepare


def test_site1_up_codes_two_spins():
    # two spins: exactly |up down> and |up up>
    assert sorted(_site1_up_codes(2)) == [0b01, 0b11]


def test_exact_trace_counts():
    assert len(list(exact_trace_states(LadderSpec(m=2)))) == 8
    n = sum(1 for _ in exact_trace_states(LadderSpec(m=5)))
    assert n == 512


def test_exact_trace_cap_suggests_random_phase():
    with pytest.raises(ValueError, match="random-phase"):
        list(exact_trace_states(LadderSpec(m=7)))


def test_trace_states_polarized_at_site_one():
    for psi in exact_trace_states(LadderSpec(m=2)):
        assert local_sz(psi, 1) == pytest.approx(0.5)
        assert np.linalg.norm(psi) == pytest.approx(1.0)


def test_random_phase_state_properties():
    spec = LadderSpec(m=3)
    psi = random_phase_state(spec, seed=1, realization_index=0)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    assert local_sz(psi, 1) == pytest.approx(0.5)


def test_random_phase_reproducible_and_order_independent():
    spec = LadderSpec(m=2)
    a = random_phase_state(spec, seed=9, realization_index=4)
    b = random_phase_state(spec, seed=9, realization_index=4)
    assert np.array_equal(a, b)
    c = random_phase_state(spec, seed=9, realization_index=5)
    assert not np.allclose(a, c)
    mat = ensemble_matrix(spec, EnsembleSpec(n_realizations=6, seed=9))
    assert np.array_equal(mat[:, 4], a)
    assert np.array_equal(mat[:, 5], c)


def test_random_phase_statistics_match_trace():
    # <S^z_2(t)> estimated from 100 entangled draws agrees with the exact
    # trace within three standard errors
    spec = LadderSpec(m=2)
    terms = total_hamiltonian(spec, Couplings(j_se=0.3, alpha=1.0))
    prop = prepare(terms, EvolutionConfig())
    t = 3.0
    w2 = sz_diagonal(spec.n_sites, 2)

    exact_states = ensemble_matrix(spec, EnsembleSpec(mode=EnsembleMode.EXACT_TRACE))
    exact_val = float(np.mean(w2 @ np.abs(prop.evolve(exact_states, t)) ** 2))

    draws = ensemble_matrix(spec, EnsembleSpec(n_realizations=100, seed=2))
    vals = w2 @ np.abs(prop.evolve(draws, t)) ** 2
    se = vals.std(ddof=1) / np.sqrt(len(vals))
    assert abs(vals.mean() - exact_val) <= 3 * se


def test_polarization_curve_starts_at_one():
    spec = LadderSpec(m=2)
    prop = prepare(total_hamiltonian(spec, Couplings(j_se=0.2)), EvolutionConfig())
    states = ensemble_matrix(spec, EnsembleSpec(mode=EnsembleMode.EXACT_TRACE))
    series = polarization_curve(states, prop, np.linspace(0, 5, 11))
    assert series.values[0] == pytest.approx(1.0, abs=1e-10)


def test_polarization_frozen_when_all_couplings_vanish():
    spec = LadderSpec(m=2)
    prop = prepare(
        total_hamiltonian(spec, Couplings(j_s=0.0, j_e=0.0, j_se=0.0)),
        EvolutionConfig(),
    )
    states = ensemble_matrix(spec, EnsembleSpec(mode=EnsembleMode.EXACT_TRACE))
    series = polarization_curve(states, prop, np.linspace(0, 10, 21))
    assert np.allclose(series.values, 1.0)


def test_isolated_two_site_chain_oscillates():
    # decoupled m=2 system leg (open chain): P11(t) = cos^2(j_s t / 2)
    from spinladder.model import Boundary

    spec = LadderSpec(m=2, boundary=Boundary.OPEN)
    j_s = 0.8
    prop = prepare(
        total_hamiltonian(spec, Couplings(j_s=j_s, j_se=0.0)), EvolutionConfig()
    )
    states = ensemble_matrix(spec, EnsembleSpec(mode=EnsembleMode.EXACT_TRACE))
    times = np.linspace(0, 12, 40)
    series = polarization_curve(states, prop, times)
    assert np.allclose(series.values, np.cos(j_s * times / 2) ** 2, atol=1e-10)


def test_random_phase_error_scaling():
    # the estimator error shrinks roughly as 1/sqrt(n)
    spec = LadderSpec(m=3)
    prop = prepare(total_hamiltonian(spec, Couplings(j_se=0.1)), EvolutionConfig())
    times = np.linspace(0, 30, 61)
    exact = polarization_curve(
        ensemble_matrix(spec, EnsembleSpec(mode=EnsembleMode.EXACT_TRACE)), prop, times
    )

    def deviation(n, seed):
        est = polarization_curve(
            ensemble_matrix(spec, EnsembleSpec(n_realizations=n, seed=seed)),
            prop,
            times,
        )
        return np.max(np.abs(est.values - exact.values))

    small = np.mean([deviation(8, s) for s in range(4)])
    large = np.mean([deviation(32, s) for s in range(4)])
    ratio = small / large
    assert 1.0 <= ratio <= 4.0


def test_empty_ensemble_rejected():
    spec = LadderSpec(m=2)
    prop = prepare(total_hamiltonian(spec, Couplings()), EvolutionConfig())
    with pytest.raises(ValueError, match="empty"):
        polarization_curve(iter([]), prop, np.linspace(0, 1, 5))


def test_time_series_validation():
    with pytest.raises(ValueError):
        TimeSeries(np.array([0.0, 1.0]), np.array([1.0]))


def test_time_series_window():
    s = TimeSeries(np.arange(10.0), np.arange(10.0) ** 2, "SP")
    w = s.window(2.0, 5.0)
    assert list(w.times) == [2.0, 3.0, 4.0, 5.0]
