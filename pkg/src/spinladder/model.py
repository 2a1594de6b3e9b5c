"""Ladder geometry, couplings and Hamiltonian term lists.

The simulated system is a spin-1/2 ladder: a "system" chain of m spins
weakly coupled, rung by rung, to an "environment" chain of m spins.  Both
legs carry a nearest-neighbour XY (flip-flop) interaction; each rung mixes
an Ising (ZZ) and an XY part, with the anisotropy parameter ``alpha``
setting their relative weight (0 = pure XY, -1/2 = Heisenberg, 1 =
truncated dipolar).

Hamiltonians are represented as flat lists of one- and two-spin bond terms
so that the same description drives the dense-matrix oracle, the
matrix-free term application and the Trotter gate splitting.  Energies are
measured in units of the environment coupling (J_E = 1 by default) and
hbar = 1 throughout, so times are in units of hbar/J_E.

Conventions: S^z eigenvalues are +-1/2 and S+|down> = |up>.  Sites are
numbered 1..2m with the system leg on 1..m and the environment leg on
m+1..2m; rung n joins sites n and n+m.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum


class Boundary(str, Enum):
    OPEN = "open"
    RING = "ring"


class Leg(str, Enum):
    SYSTEM = "system"
    ENVIRONMENT = "environment"


class BondKind(str, Enum):
    #: amp * (S+_a S-_b + S-_a S+_b)
    XY = "xy"
    #: amp * S^z_a S^z_b
    ZZ = "zz"


class StageTag(str, Enum):
    SYSTEM_LEG = "system_leg"
    ENVIRONMENT_LEG = "environment_leg"
    RUNG = "rung"


@dataclass(frozen=True)
class LadderSpec:
    """Geometry of the ladder: spins per leg and boundary condition."""

    m: int
    boundary: Boundary = Boundary.RING

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"need at least 2 spins per leg, got m={self.m}")

    @property
    def n_sites(self) -> int:
        return 2 * self.m

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def leg_bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbour pairs (1-based) within one leg of length m."""
        bonds = [(n, n + 1) for n in range(1, self.m)]
        if self.boundary is Boundary.RING:
            bonds.append((self.m, 1))
        return bonds


@dataclass(frozen=True)
class Couplings:
    """Exchange energies and rung anisotropy, in units of J_E."""

    j_s: float = 1.0
    j_e: float = 1.0
    j_se: float = 0.1
    alpha: float = 0.0

    #: anisotropy presets named after the standard magnetic-resonance cases
    PRESETS = {"xy": 0.0, "heisenberg": -0.5, "dipolar": 1.0}

    def __post_init__(self):
        for name in ("j_s", "j_e", "j_se", "alpha"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.j_e != 0.0 and abs(self.j_se) > abs(self.j_e):
            warnings.warn(
                f"j_se={self.j_se} exceeds j_e={self.j_e}; outside the "
                "weak-coupling regime the perturbative rate analysis "
                "does not apply",
                stacklevel=2,
            )


@dataclass(frozen=True)
class BondTerm:
    """A single two-spin term; sites are 1-based."""

    kind: BondKind
    site_a: int
    site_b: int
    amplitude: float
    stage: StageTag

    def __post_init__(self):
        if self.site_a == self.site_b:
            raise ValueError("bond must couple two distinct sites")


@dataclass(frozen=True)
class HamiltonianTerms:
    """An operator as a sum of bond terms on a fixed set of sites."""

    n_sites: int
    terms: tuple[BondTerm, ...]
    stage_tag: StageTag | None = None

    def __post_init__(self):
        for t in self.terms:
            if not (1 <= t.site_a <= self.n_sites and 1 <= t.site_b <= self.n_sites):
                raise ValueError(
                    f"term sites ({t.site_a},{t.site_b}) outside 1..{self.n_sites}"
                )

    def __add__(self, other: "HamiltonianTerms") -> "HamiltonianTerms":
        if self.n_sites != other.n_sites:
            raise ValueError("cannot combine terms on different site counts")
        tag = self.stage_tag if self.stage_tag == other.stage_tag else None
        return HamiltonianTerms(self.n_sites, self.terms + other.terms, tag)

    def negate_stage(self, stage: StageTag) -> "HamiltonianTerms":
        """Flip the sign of every term carrying the given stage tag."""
        flipped = tuple(
            BondTerm(t.kind, t.site_a, t.site_b, -t.amplitude, t.stage)
            if t.stage is stage
            else t
            for t in self.terms
        )
        return HamiltonianTerms(self.n_sites, flipped, self.stage_tag)

    def max_abs_amplitude(self) -> float:
        return max((abs(t.amplitude) for t in self.terms), default=0.0)


def build_leg(spec: LadderSpec, j: float, leg: Leg) -> HamiltonianTerms:
    """XY chain on one leg: amplitude j/2 per bond in the S+S- convention.

    The environment leg occupies sites m+1..2m, so its bond indices are
    offset by m.
    """
    offset = 0 if leg is Leg.SYSTEM else spec.m
    stage = StageTag.SYSTEM_LEG if leg is Leg.SYSTEM else StageTag.ENVIRONMENT_LEG
    terms = tuple(
        BondTerm(BondKind.XY, a + offset, b + offset, j / 2.0, stage)
        for (a, b) in spec.leg_bonds()
    )
    return HamiltonianTerms(spec.n_sites, terms, stage)


def build_rungs(spec: LadderSpec, j_se: float, alpha: float) -> HamiltonianTerms:
    """Interchain coupling: per rung, 2*alpha*j_se ZZ and -j_se/2 XY.

    At alpha = 0 the Ising part vanishes and no ZZ terms are emitted.
    """
    terms: list[BondTerm] = []
    for n in range(1, spec.m + 1):
        if alpha != 0.0:
            terms.append(
                BondTerm(BondKind.ZZ, n, n + spec.m, 2.0 * alpha * j_se, StageTag.RUNG)
            )
        terms.append(BondTerm(BondKind.XY, n, n + spec.m, -j_se / 2.0, StageTag.RUNG))
    return HamiltonianTerms(spec.n_sites, tuple(terms), StageTag.RUNG)


def total_hamiltonian(spec: LadderSpec, c: Couplings) -> HamiltonianTerms:
    """H_total = H_S + H_E + V_SE."""
    return (
        build_leg(spec, c.j_s, Leg.SYSTEM)
        + build_leg(spec, c.j_e, Leg.ENVIRONMENT)
        + build_rungs(spec, c.j_se, c.alpha)
    )


def stage_hamiltonians(
    spec: LadderSpec, c: Couplings
) -> tuple[HamiltonianTerms, HamiltonianTerms]:
    """Forward and backward generators of the echo protocol.

    The forward stage evolves under H_S + Sigma with Sigma = H_E + V_SE;
    the backward stage reverses only the system leg, evolving under
    -H_S + Sigma.  Sigma is the non-reversed part acting in both periods.
    """
    forward = total_hamiltonian(spec, c)
    backward = forward.negate_stage(StageTag.SYSTEM_LEG)
    return forward, backward
