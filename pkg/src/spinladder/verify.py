"""Oracle cross-checks wiring independent computation paths against each
other: dense matrix vs matrix-free action, Trotter vs spectral evolution,
and the many-body vs one-body reductions.

These run from the `verify` CLI subcommand and service endpoint; any
failure is a correctness regression, not a tolerance issue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleMode, EnsembleSpec
from .hilbert import apply_terms, dense_matrix
from .model import (
    BondKind,
    Boundary,
    Couplings,
    HamiltonianTerms,
    LadderSpec,
    stage_hamiltonians,
    total_hamiltonian,
)
from .onebody import HoppingMatrix, onebody_return, quenched_le
from .propagate import EvolutionConfig, Method, prepare
from .protocols import LeSchedule, forward_p11, loschmidt_echo


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    bound: str
    detail: str = ""


def _check_dense_vs_matrix_free() -> CheckResult:
    spec = LadderSpec(m=3, boundary=Boundary.RING)
    terms = total_hamiltonian(spec, Couplings(j_s=1.0, j_e=0.8, j_se=0.3, alpha=0.7))
    H = dense_matrix(terms)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
        psi /= np.linalg.norm(psi)
        worst = max(worst, float(np.max(np.abs(H @ psi - apply_terms(psi, terms)))))
    return CheckResult(
        "dense vs matrix-free action", worst <= 1e-12, worst, "<= 1e-12"
    )


def _check_trotter_vs_exact() -> CheckResult:
    spec = LadderSpec(m=3, boundary=Boundary.RING)
    terms = total_hamiltonian(spec, Couplings(j_se=0.2, alpha=1.0))
    exact = prepare(terms, EvolutionConfig(method=Method.EXACT_SPECTRAL))
    rng = np.random.default_rng(3)
    psi0 = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    psi0 /= np.linalg.norm(psi0)
    t = 10.0
    ref = exact.evolve(psi0, t)
    tr4 = prepare(terms, EvolutionConfig(method=Method.TROTTER4, dt=0.05))
    err = float(np.max(np.abs(tr4.evolve(psi0, t) - ref)))
    return CheckResult(
        "4th-order Trotter vs spectral (dt=0.05, t=10)", err <= 1e-6, err, "<= 1e-6"
    )


def _check_forward_vs_onebody() -> CheckResult:
    spec = LadderSpec(m=5, boundary=Boundary.RING)
    times = np.linspace(0.0, 30.0, 61)
    mb = forward_p11(
        spec,
        Couplings(j_se=0.0),
        EnsembleSpec(mode=EnsembleMode.EXACT_TRACE),
        EvolutionConfig(),
        times,
    )
    ob = onebody_return(HoppingMatrix.from_spec(spec, j=1.0), times)
    err = float(np.max(np.abs(mb.values - ob.values)))
    return CheckResult(
        "many-body P11 (decoupled) vs one-body return", err <= 1e-10, err, "<= 1e-10"
    )


def _ising_only(terms: HamiltonianTerms) -> HamiltonianTerms:
    kept = tuple(
        t for t in terms.terms if not (t.stage.value == "rung" and t.kind is BondKind.XY)
    )
    return HamiltonianTerms(terms.n_sites, kept, terms.stage_tag)


def _check_echo_vs_quenched_onebody() -> CheckResult:
    spec = LadderSpec(m=3, boundary=Boundary.OPEN)
    c = Couplings(j_s=1.0, j_e=0.0, j_se=0.4, alpha=1.0)
    schedule = LeSchedule(np.linspace(0.5, 10.0, 20))
    mb = _staged_echo_ising_only(spec, c, schedule)
    ob = quenched_le(spec, c.j_s, c.alpha * c.j_se, np.concatenate([[0.0], schedule.t_r_values]))
    err = float(np.max(np.abs(mb.values - ob.values)))
    return CheckResult(
        "many-body echo (frozen Ising environment) vs quenched one-body",
        err <= 1e-8,
        err,
        "<= 1e-8",
    )


def _staged_echo_ising_only(spec, c, schedule):
    """Echo with the rung XY part removed, leaving a static environment."""
    from .ensemble import TimeSeries, ensemble_matrix, mean_polarization
    from .hilbert import sz_diagonal
    from .propagate import SpectralPropagator

    fwd, bwd = stage_hamiltonians(spec, c)
    fwd_prop = SpectralPropagator(_ising_only(fwd))
    bwd_prop = SpectralPropagator(_ising_only(bwd))
    psi0 = ensemble_matrix(spec, EnsembleSpec(mode=EnsembleMode.EXACT_TRACE))
    w = sz_diagonal(spec.n_sites, 1)
    t_r = schedule.t_r_values
    values = np.empty(len(t_r) + 1)
    values[0] = mean_polarization(psi0, w)
    for k, (_, psi_f) in enumerate(fwd_prop.trajectory(psi0, t_r)):
        values[k + 1] = mean_polarization(bwd_prop.evolve(psi_f, t_r[k]), w)
    return TimeSeries(np.concatenate([[0.0], t_r]), values, "MLE")


def _check_echo_reversal() -> CheckResult:
    spec = LadderSpec(m=3, boundary=Boundary.RING)
    series = loschmidt_echo(
        spec,
        Couplings(j_se=0.0),
        EnsembleSpec(mode=EnsembleMode.EXACT_TRACE),
        LeSchedule(np.linspace(1.0, 20.0, 10)),
        EvolutionConfig(),
    )
    err = float(np.max(np.abs(series.values - 1.0)))
    return CheckResult(
        "perfect echo at j_se=0 (commuting legs)", err <= 1e-10, err, "<= 1e-10"
    )


def run_verification() -> list[CheckResult]:
    return [
        _check_dense_vs_matrix_free(),
        _check_trotter_vs_exact(),
        _check_forward_vs_onebody(),
        _check_echo_vs_quenched_onebody(),
        _check_echo_reversal(),
    ]
