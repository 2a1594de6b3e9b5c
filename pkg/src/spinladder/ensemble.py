"""Infinite-temperature "site-1 up" ensembles and polarization curves.

The initial condition is an equal-weight mixture over every Ising
configuration with the first spin up.  Two realizations are provided:

* exact trace -- one product state per configuration, 2^(2m-1) in total;
* random phase -- entangled states |up_1> (x) sum_r e^{i phi_r}|beta_r>
  with i.i.d. uniform phases, a handful of which already estimate the
  ensemble-averaged local polarization well in the weak-coupling regime.

Phases come from a counter-based Philox generator keyed on
(seed, realization_index), so each realization is reproducible on its own
and results do not depend on evaluation order.

Curves report the rescaled local polarization 2<S^z_1>, which starts at 1
and saturates near 1/(2m) once the excitation has spread ergodically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

import numpy as np

from .hilbert import sz_diagonal
from .model import LadderSpec
from .propagate import Propagator

#: exact-trace enumeration cap: 2^(cap-1) forward evolutions
EXACT_TRACE_CAP_SITES = 12


class EnsembleMode(str, Enum):
    EXACT_TRACE = "exact_trace"
    RANDOM_PHASE = "random_phase"


@dataclass(frozen=True)
class EnsembleSpec:
    mode: EnsembleMode = EnsembleMode.RANDOM_PHASE
    n_realizations: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be >= 1")


@dataclass
class TimeSeries:
    """A sampled observable curve with run metadata."""

    times: np.ndarray
    values: np.ndarray
    observable: str = "P11"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have matching length")

    def __len__(self) -> int:
        return len(self.times)

    def window(self, t_min: float = -np.inf, t_max: float = np.inf) -> "TimeSeries":
        mask = (self.times >= t_min) & (self.times <= t_max)
        return TimeSeries(self.times[mask], self.values[mask], self.observable, dict(self.meta))


def _site1_up_codes(n_sites: int) -> np.ndarray:
    """Codes of all configurations with bit 1 (site 1) set."""
    return (np.arange(1 << (n_sites - 1)) << 1) | 1


def exact_trace_states(
    spec: LadderSpec, cap_sites: int = EXACT_TRACE_CAP_SITES
) -> Iterator[np.ndarray]:
    """Yield every Ising product state with site 1 up, normalized."""
    if spec.n_sites > cap_sites:
        raise ValueError(
            f"exact trace over 2^{spec.n_sites - 1} states exceeds the cap "
            f"of 2m <= {cap_sites}; use the random-phase mode instead"
        )
    dim = spec.dim
    for code in _site1_up_codes(spec.n_sites):
        psi = np.zeros(dim, dtype=np.complex128)
        psi[code] = 1.0
        yield psi


def _phases(n: int, seed: int, realization_index: int) -> np.ndarray:
    key = np.array([seed, realization_index], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return np.exp(2j * np.pi * gen.random(n))


def random_phase_state(
    spec: LadderSpec, seed: int, realization_index: int
) -> np.ndarray:
    """Entangled representative |up_1> (x) sum_r e^{i phi_r} |beta_r> / sqrt(R)."""
    codes = _site1_up_codes(spec.n_sites)
    psi = np.zeros(spec.dim, dtype=np.complex128)
    psi[codes] = _phases(len(codes), seed, realization_index) / np.sqrt(len(codes))
    return psi


def ensemble_matrix(spec: LadderSpec, ens: EnsembleSpec) -> np.ndarray:
    """All ensemble members as columns of one (dim, R) matrix."""
    codes = _site1_up_codes(spec.n_sites)
    if ens.mode is EnsembleMode.EXACT_TRACE:
        if spec.n_sites > EXACT_TRACE_CAP_SITES:
            raise ValueError(
                f"exact trace over 2^{spec.n_sites - 1} states exceeds the cap "
                f"of 2m <= {EXACT_TRACE_CAP_SITES}; use the random-phase mode"
            )
        psi = np.zeros((spec.dim, len(codes)), dtype=np.complex128)
        psi[codes, np.arange(len(codes))] = 1.0
        return psi
    psi = np.zeros((spec.dim, ens.n_realizations), dtype=np.complex128)
    root = np.sqrt(len(codes))
    for k in range(ens.n_realizations):
        psi[codes, k] = _phases(len(codes), ens.seed, k) / root
    return psi


def mean_polarization(states: np.ndarray, weights: np.ndarray) -> float:
    """Rescaled ensemble-mean polarization 2 <S^z> for column states."""
    sz = weights @ (np.abs(states) ** 2)
    return float(2.0 * sz.mean())


def polarization_curve(
    states: np.ndarray | Iterable[np.ndarray],
    propagator: Propagator,
    times: np.ndarray,
    site: int = 1,
    observable: str = "P11",
    meta: dict | None = None,
) -> TimeSeries:
    """Evolve the ensemble and record 2 * mean <S^z_site> at each time."""
    if not isinstance(states, np.ndarray):
        cols = list(states)
        if not cols:
            raise ValueError("empty ensemble")
        states = np.stack(cols, axis=1)
    if states.ndim == 1:
        states = states[:, None]
    if states.shape[1] == 0:
        raise ValueError("empty ensemble")
    w = sz_diagonal(propagator.n_sites, site)
    values = np.empty(len(times))
    for k, (_, psi) in enumerate(propagator.trajectory(states, times)):
        values[k] = mean_polarization(psi, w)
    return TimeSeries(np.asarray(times, dtype=float), values, observable, meta or {})
