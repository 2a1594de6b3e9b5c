import numpy as np
import pytest

from spinladder.hilbert import dense_matrix, sz_diagonal
from spinladder.model import (
    BondKind,
    BondTerm,
    Boundary,
    Couplings,
    HamiltonianTerms,
    LadderSpec,
    Leg,
    StageTag,
    build_leg,
    build_rungs,
    stage_hamiltonians,
    total_hamiltonian,
)


def test_open_leg_m2_single_bond():
    spec = LadderSpec(m=2, boundary=Boundary.OPEN)
    leg = build_leg(spec, 1.0, Leg.SYSTEM)
    assert [(t.site_a, t.site_b, t.amplitude) for t in leg.terms] == [(1, 2, 0.5)]
    assert all(t.kind is BondKind.XY for t in leg.terms)


def test_ring_closure_m3():
    spec = LadderSpec(m=3, boundary=Boundary.RING)
    leg = build_leg(spec, 1.0, Leg.SYSTEM)
    assert [(t.site_a, t.site_b) for t in leg.terms] == [(1, 2), (2, 3), (3, 1)]


def test_environment_leg_site_offset():
    spec = LadderSpec(m=5, boundary=Boundary.RING)
    leg = build_leg(spec, 1.0, Leg.ENVIRONMENT)
    assert len(leg.terms) == 5
    sites = {s for t in leg.terms for s in (t.site_a, t.site_b)}
    assert sites == set(range(6, 11))


def test_rungs_alpha_zero_has_no_ising_part():
    rungs = build_rungs(LadderSpec(m=4), 0.1, 0.0)
    assert all(t.kind is BondKind.XY for t in rungs.terms)
    assert all(t.amplitude == -0.05 for t in rungs.terms)


def test_rung_matrix_element_on_aligned_pair():
    # single rung on two sites, truncated-dipolar anisotropy
    terms = HamiltonianTerms(
        2,
        (
            BondTerm(BondKind.ZZ, 1, 2, 2 * 1.0 * 0.1, StageTag.RUNG),
            BondTerm(BondKind.XY, 1, 2, -0.05, StageTag.RUNG),
        ),
    )
    H = dense_matrix(terms)
    up_up = 0b11
    assert H[up_up, up_up] == pytest.approx(0.05)


def test_heisenberg_amplitude_ratio():
    rungs = build_rungs(LadderSpec(m=2), 0.3, -0.5)
    zz = [t for t in rungs.terms if t.kind is BondKind.ZZ][0]
    xy = [t for t in rungs.terms if t.kind is BondKind.XY][0]
    assert zz.amplitude / xy.amplitude == pytest.approx(2.0)


def test_backward_negates_only_system_leg():
    spec = LadderSpec(m=3)
    fwd, bwd = stage_hamiltonians(spec, Couplings(j_se=0.0, alpha=0.5))
    for tf, tb in zip(fwd.terms, bwd.terms):
        if tf.stage is StageTag.SYSTEM_LEG:
            assert tb.amplitude == -tf.amplitude
        else:
            assert tb.amplitude == tf.amplitude


def test_backward_equals_forward_when_system_off():
    spec = LadderSpec(m=3)
    fwd, bwd = stage_hamiltonians(spec, Couplings(j_s=0.0, j_se=0.2))
    assert np.allclose(dense_matrix(fwd), dense_matrix(bwd))


def test_forward_term_count_m5_ring_dipolar():
    fwd, _ = stage_hamiltonians(LadderSpec(m=5), Couplings(j_se=0.1, alpha=1.0))
    assert len(fwd.terms) == 20


@pytest.mark.parametrize("alpha", [0.0, -0.5, 1.0, 0.3])
def test_assembled_matrix_is_hermitian(alpha):
    terms = total_hamiltonian(
        LadderSpec(m=3), Couplings(j_s=1.0, j_e=0.7, j_se=0.4, alpha=alpha)
    )
    H = dense_matrix(terms)
    assert np.array_equal(H, H.T.conj())


def test_commutes_with_total_sz():
    spec = LadderSpec(m=3)
    terms = total_hamiltonian(spec, Couplings(j_se=0.5, alpha=1.0))
    H = dense_matrix(terms)
    sz_total = np.zeros(spec.dim)
    for site in range(1, spec.n_sites + 1):
        sz_total += sz_diagonal(spec.n_sites, site)
    comm = H * sz_total[None, :] - sz_total[:, None] * H
    assert np.max(np.abs(comm)) <= 1e-12 * terms.max_abs_amplitude()


def test_rung_amplitudes_linear_in_alpha():
    j_se = 0.2
    for alpha in (0.25, 0.5, 1.0):
        rungs = build_rungs(LadderSpec(m=3), j_se, alpha)
        zz = [t.amplitude for t in rungs.terms if t.kind is BondKind.ZZ]
        xy = [t.amplitude for t in rungs.terms if t.kind is BondKind.XY]
        assert np.allclose(zz, 2 * alpha * j_se)
        assert np.allclose(xy, -j_se / 2)


def test_spec_validation():
    with pytest.raises(ValueError):
        LadderSpec(m=1)
    with pytest.raises(ValueError):
        Couplings(j_se=float("nan"))
    with pytest.raises(ValueError):
        BondTerm(BondKind.XY, 2, 2, 1.0, StageTag.RUNG)


def test_weak_coupling_warning():
    with pytest.warns(UserWarning, match="weak"):
        Couplings(j_se=1.5, j_e=1.0)


def test_terms_of_different_sizes_do_not_combine():
    a = build_leg(LadderSpec(m=2), 1.0, Leg.SYSTEM)
    b = build_leg(LadderSpec(m=3), 1.0, Leg.SYSTEM)
    with pytest.raises(ValueError):
        a + b
