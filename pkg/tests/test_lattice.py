"""Unit tests for the hard-wall chain, packets, and causality bounds."""

from __future__ import annotations

import numpy as np
import pytest

import oracles as oc
from nosignal import (
    Region,
    SpacelikeCertificate,
    apply,
    check_spacelike,
    default_scenario,
    hamiltonian,
    leakage,
    make_lattice,
    prepare_scenario,
    propagator,
    region_projector,
    wavepacket,
)
from nosignal import lattice as lattice_mod
from nosignal.composite import CompositeSpace, joint_position_probability


# ---------------------------------------------------------------------------
# construction and regions


def test_lattice_validation():
    lat = make_lattice(12, 0.5)
    assert lat.n_sites == 12
    assert lat.hopping == 0.5
    assert lat.site_tag == "site[n=12]"
    with pytest.raises(ValueError):
        make_lattice(7, 1.0)
    with pytest.raises(ValueError):
        make_lattice(12, 0.0)
    with pytest.raises(ValueError):
        make_lattice(12, -1.0)


def test_region_behavior():
    r = Region(2, 5)
    assert r.width == 3
    np.testing.assert_array_equal(r.sites(), [2, 3, 4])
    assert r.overlaps(Region(4, 9))
    assert not r.overlaps(Region(5, 9))  # half-open intervals just touch
    with pytest.raises(ValueError):
        Region(5, 5)
    with pytest.raises(ValueError):
        Region(-1, 3)


def test_region_projector_is_exact():
    lat = make_lattice(10, 1.0)
    p = region_projector(lat, Region(3, 6))
    want = np.zeros((10, 10))
    want[3, 3] = want[4, 4] = want[5, 5] = 1.0
    np.testing.assert_array_equal(p.to_dense(), want)  # bit-exact 0/1 entries
    with pytest.raises(ValueError):
        region_projector(lat, Region(3, 11))


# ---------------------------------------------------------------------------
# hamiltonian and propagator


def test_hamiltonian_matches_reference():
    lat = make_lattice(9, 1.7)
    h = hamiltonian(lat).to_dense()
    np.testing.assert_array_equal(h, oc.hop_hamiltonian(9, 1.7))
    assert np.linalg.norm(h - h.conj().T) == 0.0


def test_propagator_matches_expm():
    lat = make_lattice(14, 0.8)
    for t in (0.0, 0.37, 2.0, 11.5):
        u = propagator(lat, t).to_dense()
        np.testing.assert_allclose(u, oc.single_propagator(14, 0.8, t), atol=1e-12)


def test_propagator_unitarity_and_composition():
    lat = make_lattice(96, 1.0)
    for t in (0.5, 3.0, 10.0):
        assert propagator(lat, t).unitarity_defect() <= lattice_mod.UNITARITY_ATOL
    u_a = propagator(lat, 2.0).to_dense()
    u_b = propagator(lat, 3.5).to_dense()
    u_ab = propagator(lat, 5.5).to_dense()
    assert np.linalg.norm(u_ab - u_a @ u_b) < 1e-12


def test_propagator_rejects_negative_time():
    lat = make_lattice(12, 1.0)
    with pytest.raises(ValueError):
        propagator(lat, -0.1)


# ---------------------------------------------------------------------------
# wavepackets


def test_wavepacket_matches_reference_formula():
    lat = make_lattice(32, 1.0)
    got = wavepacket(lat, Region(2, 30), 12.0, 4.0, 0.9)
    want = oc.hann_packet(32, 2, 30, 12.0, 4.0, 0.9)
    np.testing.assert_allclose(got.amps, want, atol=1e-14)
    assert got.norm == pytest.approx(1.0, abs=1e-12)


def test_wavepacket_support_is_exact():
    lat = make_lattice(40, 1.0)
    pk = wavepacket(lat, Region(5, 25), 12.0, 4.0, 1.3)
    outside = np.ones(40, dtype=bool)
    outside[5:25] = False
    assert np.all(pk.amps[outside] == 0.0)  # exactly zero, not merely small
    # amplitude profile does not depend on the carrier momentum
    pk0 = wavepacket(lat, Region(5, 25), 12.0, 4.0, 0.0)
    np.testing.assert_allclose(np.abs(pk.amps), np.abs(pk0.amps), atol=1e-14)


def test_wavepacket_validation():
    lat = make_lattice(40, 1.0)
    with pytest.raises(ValueError):
        wavepacket(lat, Region(5, 25), 12.0, 6.0, 0.0)  # width > support/4
    with pytest.raises(ValueError):
        wavepacket(lat, Region(5, 25), 6.0, 4.0, 0.0)  # envelope clips the edge
    with pytest.raises(ValueError):
        wavepacket(lat, Region(5, 25), 12.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        wavepacket(lat, Region(5, 50), 12.0, 4.0, 0.0)  # support exceeds lattice


def test_wavepacket_group_velocity():
    # At carrier momentum pi/2 the packet centroid should move at close to
    # the band's maximal group velocity 2 * hopping.
    lat = make_lattice(96, 1.0)
    pk = wavepacket(lat, Region(4, 56), 30.0, 10.0, np.pi / 2)
    t = 4.0
    moved = apply(propagator(lat, t), pk)
    x = np.arange(96)
    v = (float(x @ np.abs(moved.amps) ** 2) - float(x @ np.abs(pk.amps) ** 2)) / t
    assert abs(v - 2.0) / 2.0 < 0.05


# ---------------------------------------------------------------------------
# leakage


def test_leakage_dense_sparse_agree():
    lat = make_lattice(96, 1.0)
    src, dst = Region(8, 20), Region(44, 56)
    for t in (4.0, 10.0):
        dense = leakage(lat, src, dst, t, method="dense")
        sparse = leakage(lat, src, dst, t, method="sparse")
        auto = leakage(lat, src, dst, t, method="auto")
        assert abs(dense - sparse) <= 1e-10
        assert auto == pytest.approx(dense, abs=1e-10)


def test_leakage_zero_time_disjoint_regions():
    lat = make_lattice(32, 1.0)
    assert leakage(lat, Region(0, 8), Region(16, 24), 0.0) == 0.0
    assert leakage(lat, Region(0, 8), Region(16, 24), 0.0, method="sparse") == 0.0


def test_leakage_single_site_destination():
    lat = make_lattice(32, 1.0)
    dst = Region(20, 21)
    dense = leakage(lat, Region(0, 8), dst, 3.0, method="dense")
    sparse = leakage(lat, Region(0, 8), dst, 3.0, method="sparse")
    assert abs(dense - sparse) <= 1e-12


def test_leakage_matches_direct_svd():
    lat = make_lattice(48, 1.3)
    src, dst = Region(2, 10), Region(30, 44)
    for t in (1.0, 5.0):
        got = leakage(lat, src, dst, t)
        want = oc.block_leakage(48, 1.3, range(2, 10), range(30, 44), t)
        assert got == pytest.approx(want, abs=1e-12)


def test_leakage_rejects_unknown_method():
    lat = make_lattice(32, 1.0)
    with pytest.raises(ValueError):
        leakage(lat, Region(0, 4), Region(8, 12), 1.0, method="magic")


# Frozen distance/time samples on the 96-site chain: the gap between the
# regions is wide enough that the propagator block stays tiny, while the
# same gap at a long enough time is crossed almost completely.
LIGHT_CONE_SAMPLES = [
    (24, 4.0),
    (32, 6.0),
    (40, 8.0),
    (48, 10.0),
    (56, 12.0),
    (56, 18.0),
]


@pytest.mark.parametrize("gap,t", LIGHT_CONE_SAMPLES)
def test_leakage_small_outside_light_cone(gap, t):
    lat = make_lattice(96, 1.0)
    src = Region(8, 20)
    dst = Region(20 + gap, 32 + gap)
    assert leakage(lat, src, dst, t) <= 1e-6
    assert leakage(lat, dst, src, t) <= 1e-6


def test_leakage_large_inside_light_cone():
    lat = make_lattice(96, 1.0)
    assert leakage(lat, Region(8, 20), Region(44, 56), 16.0) > 0.5


# ---------------------------------------------------------------------------
# certificates


def test_certificate_on_default_geometry():
    cfg = default_scenario()
    lat, space, psi0 = prepare_scenario(cfg)
    cert = check_spacelike(lat, cfg.o1, cfg.o3, psi0, cfg.t_total, cfg.eps)
    assert cert.passed
    assert cert.epsilon == pytest.approx(1e-6)
    # the stored leaks are exactly the maxima over the sampled time grid
    times = np.linspace(0.0, cfg.t_total, lattice_mod.CERTIFICATE_TIME_SAMPLES)
    want_13 = max(leakage(lat, cfg.o1, cfg.o3, t) for t in times)
    want_31 = max(leakage(lat, cfg.o3, cfg.o1, t) for t in times)
    assert cert.leak_13 == want_13
    assert cert.leak_31 == want_31
    # and the overlaps are the joint occupancies of the initial state
    want_o1 = joint_position_probability(space, psi0, cfg.o1.sites(), cfg.o1.sites())
    want_o3 = joint_position_probability(space, psi0, cfg.o3.sites(), cfg.o3.sites())
    assert cert.overlap_O1 == want_o1
    assert cert.overlap_O3 == want_o3


def test_certificate_fails_when_regions_too_close():
    cfg = default_scenario()
    lat, _space, psi0 = prepare_scenario(cfg)
    near = Region(24, 36)  # close enough to O1 for leakage within t_total
    cert = check_spacelike(lat, cfg.o1, near, psi0, cfg.t_total, cfg.eps)
    assert not cert.passed
    assert cert.leak_13 > cfg.eps


def test_certificate_flag_consistency_enforced():
    with pytest.raises(ValueError):
        SpacelikeCertificate(
            epsilon=1e-6, leak_13=1.0, leak_31=0.0, overlap_O1=0.0, overlap_O3=0.0,
            passed=True,
        )
    with pytest.raises(ValueError):
        SpacelikeCertificate(
            epsilon=1e-6, leak_13=-0.5, leak_31=0.0, overlap_O1=0.0, overlap_O3=0.0,
            passed=False,
        )


def test_check_spacelike_validates_inputs():
    cfg = default_scenario()
    lat, space, psi0 = prepare_scenario(cfg)
    with pytest.raises(ValueError):
        check_spacelike(lat, cfg.o1, cfg.o3, psi0, -1.0, cfg.eps)
    with pytest.raises(ValueError):
        check_spacelike(lat, cfg.o1, cfg.o3, psi0, cfg.t_total, 0.0)
    small_space_state = wavepacket(lat, Region(8, 20), 14.0, 3.0, 0.0)
    with pytest.raises(ValueError):
        check_spacelike(lat, cfg.o1, cfg.o3, small_space_state, cfg.t_total, cfg.eps)
    other = CompositeSpace(12)
    assert other.dim == 8 * 12 * 12  # sanity for the failing tag path below
