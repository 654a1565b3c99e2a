"""Kick, joint spin measurement, and detector coupling on the lattice.

The scenario pipeline is: prepare the two-particle state, optionally kick
spins in region O1, evolve for ``t1``, optionally measure a Bell-type spin
projector (globally or localized to region O2), evolve for ``t2``, couple a
detector qubit in region O3, and read the qubit.  The difference between
the qubit statistics of the kicked and unkicked arms is the signaling
metric: for exchange-symmetric position-localized operations it vanishes
(up to certified leakage), while label-addressed operations make it finite.

Operations come in two flavors throughout:

* ``position`` / ``localized`` modes condition on *where* a particle is.
  They are exchange symmetric and therefore compatible with fermionic or
  bosonic statistics.
* ``label`` modes act on a fixed particle slot (slot 1 for the kick,
  slot 2's spin for the detector).  They are deliberately available, and
  deliberately not exchange symmetric, so the simulator can quantify what
  goes wrong when they are used on indistinguishable particles.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

import numpy as np
import scipy.sparse as sp

from . import qcore
from .composite import (
    CompositeSpace,
    Statistics,
    antisymmetry_violation,
    evolve_positions,
    lift_one_particle,
    position_occupancy,
    prepare_initial,
    site_basis_tag,
)
from .lattice import (
    Lattice1D,
    Region,
    SpacelikeCertificate,
    check_spacelike,
    make_lattice,
    propagator,
    region_projector,
    wavepacket,
)
from .qcore import (
    DENSE_DIM_LIMIT,
    PAULI_X,
    SPIN_IDENTITY,
    SPIN_TAG,
    BranchEnsemble,
    LinearOperator,
    StateVector,
    apply,
    luders_measure,
    tensor_product,
)

QUBIT_TAG = "qubit"
TWO_SPIN_TAG = f"{SPIN_TAG}*{SPIN_TAG}"
SPIN_QUBIT_TAG = f"{SPIN_TAG}*{QUBIT_TAG}"

KICK_MODES = ("off", "position", "label1")
JOINT_MODES = ("none", "global_bell", "localized_bell")
DETECTOR_MODES = ("position", "label2")

STAGES = ("prepared", "post_kick", "post_o2", "final")

MeasurementProcedure = Callable[[BranchEnsemble], BranchEnsemble]


@dataclass(frozen=True)
class PacketSpec:
    """Wavepacket parameters handed to :func:`nosignal.lattice.wavepacket`."""

    support: Region
    center: float
    width: float
    momentum: float

    def __post_init__(self):
        for name in ("center", "width", "momentum"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"packet {name} must be finite, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one signaling experiment (both arms)."""

    n: int
    o1: Region
    o3: Region
    packet1: PacketSpec
    packet2: PacketSpec
    t2: float
    hopping: float = 1.0
    o2: Optional[Region] = None
    statistics: str = "fermion"
    kick_mode: str = "position"
    joint_mode: str = "none"
    detector_mode: str = "position"
    t1: float = 0.0
    eps: float = 1e-6
    selective_o3: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8:
            raise ValueError(f"n must be an integer >= 8, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not (float(self.hopping) > 0.0) or not math.isfinite(float(self.hopping)):
            raise ValueError(f"hopping must be positive and finite, got {self.hopping}")
        object.__setattr__(self, "hopping", float(self.hopping))
        for name in ("o1", "o3"):
            region = getattr(self, name)
            if not isinstance(region, Region):
                raise ValueError(f"{name} must be a Region")
            if region.hi > self.n:
                raise ValueError(f"{name} [{region.lo}, {region.hi}) exceeds the {self.n}-site lattice")
        if self.o1.overlaps(self.o3):
            raise ValueError(
                f"O1, O3 disjoint violated: O1=[{self.o1.lo}, {self.o1.hi}) overlaps "
                f"O3=[{self.o3.lo}, {self.o3.hi})"
            )
        Statistics(self.statistics)
        object.__setattr__(self, "statistics", str(Statistics(self.statistics).value))
        if self.kick_mode not in KICK_MODES:
            raise ValueError(f"kick_mode must be one of {KICK_MODES}, got {self.kick_mode!r}")
        if self.joint_mode not in JOINT_MODES:
            raise ValueError(f"joint_mode must be one of {JOINT_MODES}, got {self.joint_mode!r}")
        if self.detector_mode not in DETECTOR_MODES:
            raise ValueError(f"detector_mode must be one of {DETECTOR_MODES}, got {self.detector_mode!r}")
        if self.joint_mode == "localized_bell":
            if self.o2 is None:
                raise ValueError("joint_mode localized_bell requires an O2 region")
            if not isinstance(self.o2, Region) or self.o2.hi > self.n:
                raise ValueError("O2 must be a region inside the lattice")
        elif self.o2 is not None and (not isinstance(self.o2, Region) or self.o2.hi > self.n):
            raise ValueError("O2 must be a region inside the lattice")
        for name in ("t1", "t2"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)
        if not (float(self.eps) > 0.0) or not math.isfinite(float(self.eps)):
            raise ValueError(f"eps must be positive and finite, got {self.eps}")
        object.__setattr__(self, "eps", float(self.eps))
        object.__setattr__(self, "selective_o3", bool(self.selective_o3))
        for name in ("packet1", "packet2"):
            packet = getattr(self, name)
            if not isinstance(packet, PacketSpec):
                raise ValueError(f"{name} must be a PacketSpec")
            if packet.support.hi > self.n:
                raise ValueError(f"{name} support exceeds the {self.n}-site lattice")

    @property
    def t_total(self) -> float:
        return self.t1 + self.t2


@dataclass(frozen=True)
class SignalingReport:
    """Outcome of both arms of a scenario plus the causal-separation evidence."""

    p_q1_kick: float
    p_q1_nokick: float
    delta: float
    arrival_prob: float
    certificate: SpacelikeCertificate
    max_antisym_violation: float
    branch_count_kick: int
    branch_count_nokick: int


def signaling_delta(report: SignalingReport) -> float:
    """Absolute difference of the detector-qubit excitation probabilities."""
    return abs(report.p_q1_kick - report.p_q1_nokick)


# ---------------------------------------------------------------------------
# elementary operators


def bell_projector() -> LinearOperator:
    """Rank-1 projector onto ``(|uu> + |dd>)/sqrt(2)`` on two spins."""
    vec = np.zeros(4, dtype=np.complex128)
    vec[0] = 1.0 / np.sqrt(2.0)  # |dd>
    vec[3] = 1.0 / np.sqrt(2.0)  # |uu>
    return LinearOperator(np.outer(vec, vec.conj()), TWO_SPIN_TAG)


def detector_coupling() -> LinearOperator:
    """Self-inverse unitary on (spin, qubit): ``u0 <-> d1``, fixing ``d0``, ``u1``.

    Basis order is ``2*s + q`` with spin down = 0: the detector absorbs an
    up excitation (``|u 0> -> |d 1>``) and re-emits it in reverse.
    """
    mat = np.zeros((4, 4), dtype=np.complex128)
    mat[0, 0] = 1.0  # d0 -> d0
    mat[1, 2] = 1.0  # u0 -> d1
    mat[2, 1] = 1.0  # d1 -> u0
    mat[3, 3] = 1.0  # u1 -> u1
    return LinearOperator(mat, SPIN_QUBIT_TAG)


def _site_projector(n: int, region: Region) -> LinearOperator:
    if region.hi > n:
        raise ValueError(f"region [{region.lo}, {region.hi}) exceeds the {n}-site lattice")
    diag = np.zeros(n, dtype=np.complex128)
    diag[region.lo:region.hi] = 1.0
    return LinearOperator(np.diag(diag), site_basis_tag(n))


def _finalize_storage(mat: sp.csr_array, space: CompositeSpace) -> LinearOperator:
    if space.dim <= DENSE_DIM_LIMIT:
        return LinearOperator(mat.toarray(), space.basis_tag)
    return LinearOperator(mat, space.basis_tag)


def _controlled_flip(n: int, region: Region) -> LinearOperator:
    """(position, spin) operator: flip the spin iff the position is in ``region``."""
    proj = _site_projector(n, region)
    rest = LinearOperator(np.diag(1.0 - np.diag(proj.to_dense())), proj.basis_tag)
    return tensor_product(proj, PAULI_X) + tensor_product(rest, SPIN_IDENTITY)


def kick_operator(space: CompositeSpace, o1: Region, mode: str) -> LinearOperator:
    """Spin-flip operation localized in O1.

    ``position`` mode flips the spin of whichever particle occupies O1
    (both, if both do); it is a unitary, exchange-symmetric operator.
    ``label1`` mode flips the spin of particle slot 1 only (conditioned on
    that slot's position being in O1) and is not exchange symmetric.
    """
    if mode not in ("position", "label1"):
        raise ValueError(f"kick mode must be position or label1, got {mode!r}")
    flip = _controlled_flip(space.n_sites, o1)
    c1 = lift_one_particle(space, flip, 1, "both")
    if mode == "label1":
        return c1
    c2 = lift_one_particle(space, flip, 2, "both")
    return c1 @ c2


def _spin_qubit_map_8(which: int) -> np.ndarray:
    """Detector coupling acting on (s1,s2,q) through slot ``which``'s spin."""
    d_map = {(0, 0): (0, 0), (1, 0): (0, 1), (0, 1): (1, 0), (1, 1): (1, 1)}
    mat = np.zeros((8, 8), dtype=np.complex128)
    for s1 in (0, 1):
        for s2 in (0, 1):
            for q in (0, 1):
                if which == 1:
                    s1p, qp = d_map[(s1, q)]
                    s2p = s2
                else:
                    s2p, qp = d_map[(s2, q)]
                    s1p = s1
                mat[4 * s1p + 2 * s2p + qp, 4 * s1 + 2 * s2 + q] = 1.0
    return mat


def _both_in_region_coupling_8() -> np.ndarray:
    """Exchange-symmetric self-inverse coupling used when both particles sit
    in the detector region.

    Acts like the single-particle coupling on the spin-exchange-symmetric
    combinations (the one-excitation symmetric state trades with the qubit,
    ``|dd 0>`` and ``|uu 1>`` are fixed, ``|uu 0>`` trades with the
    symmetric one-excitation state at ``q = 1``) and leaves the
    antisymmetric spin combinations untouched.  Only this convention matters
    on the certified scenarios: the sector it governs carries amplitude
    bounded by the overlap entries of the spacelike certificate.
    """
    e = np.eye(8, dtype=np.complex128)
    dd0, dd1 = e[0], e[1]
    du0, du1 = e[2], e[3]
    ud0, ud1 = e[4], e[5]
    uu0, uu1 = e[6], e[7]
    plus0 = (ud0 + du0) / np.sqrt(2.0)
    minus0 = (ud0 - du0) / np.sqrt(2.0)
    plus1 = (ud1 + du1) / np.sqrt(2.0)
    minus1 = (ud1 - du1) / np.sqrt(2.0)
    pairs = [
        (dd0, dd0),
        (uu1, uu1),
        (dd1, plus0),
        (plus0, dd1),
        (minus0, minus0),
        (plus1, uu0),
        (uu0, plus1),
        (minus1, minus1),
    ]
    return sum(np.outer(img, src.conj()) for img, src in pairs)


def _occupancy_diagonal(space: CompositeSpace, region: Region) -> np.ndarray:
    """0/1 diagonal of the projector onto 'at least one particle in region'."""
    n = space.n_sites
    inside = np.zeros(n, dtype=bool)
    inside[region.lo:region.hi] = True
    pair_mask = inside[:, None] | inside[None, :]
    return np.repeat(pair_mask.ravel(), 8).astype(np.complex128)


def occupancy_projector(space: CompositeSpace, region: Region) -> LinearOperator:
    """Projector onto states with at least one particle in ``region``.

    Equal to ``P1 + P2 - P1 P2`` for the two lifted position projectors;
    diagonal with exact 0/1 entries, and exchange symmetric.
    """
    diag = _occupancy_diagonal(space, region)
    mat = sp.csr_array(sp.diags_array(diag))
    return _finalize_storage(mat, space)


def position_detector_unitary(space: CompositeSpace, o3: Region) -> LinearOperator:
    """Position-controlled detector coupling: exchange-symmetric unitary.

    Applies the (spin, qubit) coupling to whichever particle occupies O3;
    sectors where both particles occupy O3 use the symmetric two-particle
    convention of :func:`_both_in_region_coupling_8`.
    """
    n = space.n_sites
    if o3.hi > n:
        raise ValueError(f"O3 [{o3.lo}, {o3.hi}) exceeds the {n}-site lattice")
    inside = np.zeros(n, dtype=bool)
    inside[o3.lo:o3.hi] = True
    only1 = np.outer(inside, ~inside).ravel().astype(np.complex128)
    only2 = np.outer(~inside, inside).ravel().astype(np.complex128)
    both = np.outer(inside, inside).ravel().astype(np.complex128)
    neither = np.outer(~inside, ~inside).ravel().astype(np.complex128)
    blocks = (
        (neither, np.eye(8, dtype=np.complex128)),
        (only1, _spin_qubit_map_8(1)),
        (only2, _spin_qubit_map_8(2)),
        (both, _both_in_region_coupling_8()),
    )
    mat = sum(
        sp.kron(sp.diags_array(mask), sp.csr_array(op8), format="csr")
        for mask, op8 in blocks
    )
    return _finalize_storage(sp.csr_array(mat), space)


def _label2_coupling(space: CompositeSpace) -> LinearOperator:
    """Detector coupling wired to particle slot 2's spin, position-blind."""
    d4 = detector_coupling().to_dense()
    mat = sp.kron(sp.identity(2 * space.n_sites**2, dtype=np.complex128), sp.csr_array(d4), format="csr")
    return _finalize_storage(sp.csr_array(mat), space)


# ---------------------------------------------------------------------------
# measurement procedures


def _split_on_diagonal_projector(
    ens: BranchEnsemble,
    diag: np.ndarray,
    post_hit: Optional[LinearOperator],
    selective: bool,
) -> BranchEnsemble:
    """Branch every ensemble member on a diagonal 0/1 projector.

    ``post_hit`` (a unitary) is applied to the projected branch.  With
    ``selective`` true only the projected branches survive, renormalized
    over the surviving weight.
    """
    hits = []
    misses = []
    for w, state in ens.branches:
        base = float(np.vdot(state.amps, state.amps).real)
        inside = state.amps * diag
        outside = state.amps - inside
        p_in = float(np.vdot(inside, inside).real) / base
        p_out = float(np.vdot(outside, outside).real) / base
        if w * p_in > qcore.BRANCH_PRUNE_THRESHOLD:
            hit_state = StateVector(inside / np.linalg.norm(inside), state.basis_tag)
            if post_hit is not None:
                hit_state = apply(post_hit, hit_state)
            hits.append((w * p_in, hit_state))
        if not selective and w * p_out > qcore.BRANCH_PRUNE_THRESHOLD:
            misses.append((w * p_out, StateVector(outside / np.linalg.norm(outside), state.basis_tag)))
    if selective:
        total = sum(w for w, _ in hits)
        if total <= 1e-12:
            raise ValueError("selective detection post-selected on an empty outcome")
        hits = [(w / total, s) for w, s in hits]
        return BranchEnsemble(tuple(hits))
    return BranchEnsemble(tuple(hits + misses))


def detector_measurement(
    space: CompositeSpace,
    o3: Region,
    mode: str,
    selective: bool = False,
) -> MeasurementProcedure:
    """Measurement procedure for the detector stage.

    ``position`` mode applies the exchange-symmetric position-controlled
    coupling unitary; with ``selective`` true it then branches on the O3
    occupancy projector and keeps only the occupied outcome (renormalized).
    ``label2`` mode is the label-addressed procedure: branch on O3 occupancy
    and apply the coupling to particle slot 2's spin on the occupied branch
    regardless of which particle actually sits in O3.  It is not exchange
    symmetric and breaks the antisymmetry of fermionic states.

    Returns
    -------
    callable
        Maps a :class:`BranchEnsemble` to the post-measurement ensemble.
    """
    if mode not in DETECTOR_MODES:
        raise ValueError(f"detector mode must be one of {DETECTOR_MODES}, got {mode!r}")
    diag = _occupancy_diagonal(space, o3)
    if mode == "position":
        unitary = position_detector_unitary(space, o3)

        def procedure(ens: BranchEnsemble) -> BranchEnsemble:
            moved = BranchEnsemble(tuple((w, apply(unitary, s)) for w, s in ens.branches))
            if not selective:
                return moved
            return _split_on_diagonal_projector(moved, diag, None, True)

        return procedure

    coupling = _label2_coupling(space)

    def procedure(ens: BranchEnsemble) -> BranchEnsemble:
        return _split_on_diagonal_projector(ens, diag, coupling, selective)

    return procedure


def joint_measurement(
    space: CompositeSpace,
    mode: str,
    o2: Optional[Region] = None,
) -> MeasurementProcedure:
    """Measurement procedure for the O2 stage (non-selective).

    ``global_bell`` branches on the Bell-direction spin projector applied to
    the spins wherever the particles are; ``localized_bell`` applies it only
    on the sector where both particles occupy O2 (the projector is the
    product of the two position projectors and the spin projector, which all
    commute).  ``none`` returns the ensemble unchanged.
    """
    if mode not in JOINT_MODES:
        raise ValueError(f"joint mode must be one of {JOINT_MODES}, got {mode!r}")
    if mode == "none":
        return lambda ens: ens
    pb = bell_projector().to_dense()
    n = space.n_sites
    if mode == "global_bell":
        spin_part = sp.kron(sp.csr_array(pb), sp.identity(2, dtype=np.complex128))
        proj = sp.kron(sp.identity(n * n, dtype=np.complex128), spin_part, format="csr")
    else:
        if o2 is None:
            raise ValueError("localized_bell needs an O2 region")
        if o2.hi > n:
            raise ValueError(f"O2 [{o2.lo}, {o2.hi}) exceeds the {n}-site lattice")
        inside = np.zeros(n, dtype=bool)
        inside[o2.lo:o2.hi] = True
        pair = np.outer(inside, inside).ravel().astype(np.complex128)
        spin_part = sp.kron(sp.csr_array(pb), sp.identity(2, dtype=np.complex128))
        proj = sp.kron(sp.diags_array(pair), spin_part, format="csr")
    p_op = _finalize_storage(sp.csr_array(proj), space)
    q_op = qcore.identity(space.dim, space.basis_tag, sparse=p_op.is_sparse) - p_op

    def procedure(ens: BranchEnsemble) -> BranchEnsemble:
        return luders_measure([p_op, q_op], ens)

    return procedure


# ---------------------------------------------------------------------------
# pipelines


def run_naive_sorkin(observable: LinearOperator, kick: bool) -> float:
    """Two-spin pipeline with label addressing and no notion of position.

    Starts from ``|dd>``, optionally flips spin 1, measures the Bell-direction
    projector non-selectively, and returns the expectation of ``observable``
    on spin 2.  Reproduces the closed forms ``tr(C)/2`` (no kick) and
    ``<d|C|d>`` (kick): the kick at one site changes the statistics at the
    other, which is the signaling this package exists to dissect.
    """
    if observable.dim != 2 or observable.basis_tag != SPIN_TAG:
        raise ValueError("observable must be a single-spin operator")
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = 1.0  # |dd>
    state = StateVector(amps, TWO_SPIN_TAG)
    if kick:
        state = apply(tensor_product(PAULI_X, SPIN_IDENTITY), state)
    pb = bell_projector()
    ens = luders_measure([pb, qcore.identity(4, TWO_SPIN_TAG) - pb], state)
    return qcore.expectation(tensor_product(SPIN_IDENTITY, observable), ens)


@dataclass(frozen=True)
class _ArmResult:
    stages: Mapping[str, BranchEnsemble]
    p_q1: float
    arrival: float
    max_violation: float


def qubit_one_probability(ens: BranchEnsemble) -> float:
    """Probability that the detector qubit reads 1 (qubit is the fastest index)."""
    total = 0.0
    for w, state in ens.branches:
        total += w * float(np.sum(np.abs(state.amps[1::2]) ** 2))
    return total


def _max_violation(ens: BranchEnsemble) -> float:
    return max(antisymmetry_violation(state) for _, state in ens.branches)


def _evolve_ensemble(space: CompositeSpace, u: LinearOperator, ens: BranchEnsemble) -> BranchEnsemble:
    return BranchEnsemble(tuple((w, evolve_positions(space, u, s)) for w, s in ens.branches))


def run_arm_stages(cfg: ScenarioConfig, kicked: bool) -> Mapping[str, BranchEnsemble]:
    """Run one arm of a scenario and return the four stage snapshots.

    Stages: ``prepared`` (initial state), ``post_kick`` (after the optional
    O1 kick, before any evolution), ``post_o2`` (after the t1 evolution and
    the joint measurement), ``final`` (after the t2 evolution and the
    detector measurement).
    """
    lat, space, psi0 = prepare_scenario(cfg)
    return _run_arm(cfg, lat, space, psi0, kicked).stages


def prepare_scenario(cfg: ScenarioConfig):
    """Build the lattice, composite space, and initial state of a scenario."""
    lat = make_lattice(cfg.n, cfg.hopping)
    space = CompositeSpace(cfg.n)
    p1 = wavepacket(lat, cfg.packet1.support, cfg.packet1.center, cfg.packet1.width, cfg.packet1.momentum)
    p2 = wavepacket(lat, cfg.packet2.support, cfg.packet2.center, cfg.packet2.width, cfg.packet2.momentum)
    psi0 = prepare_initial(space, cfg.statistics, p1, p2)
    return lat, space, psi0


def _run_arm(
    cfg: ScenarioConfig,
    lat: Lattice1D,
    space: CompositeSpace,
    psi0: StateVector,
    kicked: bool,
) -> _ArmResult:
    stages = {}
    ens = BranchEnsemble.pure(psi0)
    stages["prepared"] = ens
    if kicked and cfg.kick_mode != "off":
        kick = kick_operator(space, cfg.o1, cfg.kick_mode)
        ens = BranchEnsemble(tuple((w, apply(kick, s)) for w, s in ens.branches))
    stages["post_kick"] = ens
    ens = _evolve_ensemble(space, propagator(lat, cfg.t1), ens)
    ens = joint_measurement(space, cfg.joint_mode, cfg.o2)(ens)
    stages["post_o2"] = ens
    ens = _evolve_ensemble(space, propagator(lat, cfg.t2), ens)
    occ1, occ2 = position_occupancy(space, ens)
    arrival = float(occ1[cfg.o3.lo:cfg.o3.hi].sum() + occ2[cfg.o3.lo:cfg.o3.hi].sum())
    pre_detector_violation = _max_violation(ens)
    ens = detector_measurement(space, cfg.o3, cfg.detector_mode, cfg.selective_o3)(ens)
    stages["final"] = ens
    violation = max(
        _max_violation(stages["prepared"]),
        _max_violation(stages["post_kick"]),
        _max_violation(stages["post_o2"]),
        pre_detector_violation,
        _max_violation(stages["final"]),
    )
    return _ArmResult(
        stages=stages,
        p_q1=qubit_one_probability(ens),
        arrival=arrival,
        max_violation=violation,
    )


def run_scenario(cfg: ScenarioConfig, threads: int = 0) -> SignalingReport:
    """Run both arms of a scenario and assemble the signaling report.

    Parameters
    ----------
    cfg : ScenarioConfig
    threads : int
        1 runs the two arms serially; 0 (auto) or >= 2 runs them in a small
        thread pool.  Results are identical either way.

    Returns
    -------
    SignalingReport
        ``delta = |p_q1_kick - p_q1_nokick|`` plus the spacelike
        certificate, the O3 arrival probability of the unkicked arm at
        detection time, the worst antisymmetry violation seen in any branch
        of either arm (meaningful for fermion statistics), and the final
        branch counts.
    """
    lat, space, psi0 = prepare_scenario(cfg)
    certificate = check_spacelike(lat, cfg.o1, cfg.o3, psi0, cfg.t_total, cfg.eps)
    if threads == 0:
        threads = min(2, os.cpu_count() or 1)
    # Warm the eigensystem cache before any thread dispatch.
    propagator(lat, cfg.t1)
    propagator(lat, cfg.t2)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            fut_nokick = pool.submit(_run_arm, cfg, lat, space, psi0, False)
            fut_kick = pool.submit(_run_arm, cfg, lat, space, psi0, True)
            arm_nokick = fut_nokick.result()
            arm_kick = fut_kick.result()
    else:
        arm_nokick = _run_arm(cfg, lat, space, psi0, False)
        arm_kick = _run_arm(cfg, lat, space, psi0, True)
    return SignalingReport(
        p_q1_kick=arm_kick.p_q1,
        p_q1_nokick=arm_nokick.p_q1,
        delta=abs(arm_kick.p_q1 - arm_nokick.p_q1),
        arrival_prob=arm_nokick.arrival,
        certificate=certificate,
        max_antisym_violation=max(arm_kick.max_violation, arm_nokick.max_violation),
        branch_count_kick=arm_kick.stages["final"].branch_count,
        branch_count_nokick=arm_nokick.stages["final"].branch_count,
    )


def default_scenario(**overrides) -> ScenarioConfig:
    """Canonical 96-site geometry used by the demos and the test suite.

    O1 = [8, 20) holds packet 1 at rest; packet 2 starts around site 62
    moving right at the fastest group velocity and reaches O3 = [76, 88)
    after 10 time units, while O1 and O3 stay causally disconnected to
    better than 1e-6 over the whole window.
    """
    base = dict(
        n=96,
        hopping=1.0,
        o1=Region(8, 20),
        o2=Region(40, 52),
        o3=Region(76, 88),
        packet1=PacketSpec(support=Region(8, 20), center=14.0, width=3.0, momentum=0.0),
        packet2=PacketSpec(support=Region(50, 74), center=62.0, width=6.0, momentum=float(np.pi / 2)),
        statistics="fermion",
        kick_mode="position",
        joint_mode="none",
        detector_mode="position",
        t1=0.0,
        t2=10.0,
        eps=1e-6,
        selective_o3=False,
    )
    base.update(overrides)
    return ScenarioConfig(**base)
