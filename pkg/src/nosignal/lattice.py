"""One-dimensional hard-wall lattice: Hamiltonian, propagators, wavepackets.

Units: hbar = 1 and lattice spacing = 1, so times are in units of inverse
hopping and the effective signal velocity is bounded by ``2 * hopping``
sites per unit time (the maximum group velocity of the dispersion
``E(k) = 2J (1 - cos k)``).

Spacelike separation of two regions is certified numerically rather than
assumed: :func:`check_spacelike` bounds the propagator leakage between the
regions over a time grid and the initial joint occupancy of each region,
and packages the outcome as a :class:`SpacelikeCertificate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg

from .composite import CompositeSpace, joint_position_probability, site_basis_tag
from .qcore import LinearOperator, StateVector

# Number of evenly spaced sample times (including both endpoints) used by
# the spacelike certificate.
CERTIFICATE_TIME_SAMPLES = 9

UNITARITY_ATOL = 1e-12


@dataclass(frozen=True)
class Lattice1D:
    """Hard-wall chain of ``n_sites`` sites with hopping amplitude ``hopping``."""

    n_sites: int
    hopping: float

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 8:
            raise ValueError(f"lattice needs at least 8 sites, got {self.n_sites}")
        if not (self.hopping > 0.0) or not math.isfinite(self.hopping):
            raise ValueError(f"hopping must be positive and finite, got {self.hopping}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "hopping", float(self.hopping))

    @property
    def site_tag(self) -> str:
        return site_basis_tag(self.n_sites)


@dataclass(frozen=True)
class Region:
    """Half-open site interval ``[lo, hi)``."""

    lo: int
    hi: int

    def __post_init__(self):
        if int(self.lo) != self.lo or int(self.hi) != self.hi:
            raise ValueError("region bounds must be integers")
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "hi", int(self.hi))
        if self.lo < 0 or self.hi <= self.lo:
            raise ValueError(f"region needs 0 <= lo < hi, got [{self.lo}, {self.hi})")

    @property
    def width(self) -> int:
        return self.hi - self.lo

    def sites(self) -> np.ndarray:
        return np.arange(self.lo, self.hi)

    def overlaps(self, other: "Region") -> bool:
        return self.lo < other.hi and other.lo < self.hi


@dataclass(frozen=True)
class SpacelikeCertificate:
    """Numerical evidence that two regions cannot influence each other.

    ``leak_13`` / ``leak_31`` are the worst-case propagator leakages between
    the regions over the sampled time grid (a grid maximum, not a continuum
    supremum; the grid is ``CERTIFICATE_TIME_SAMPLES`` evenly spaced times
    from 0 to the total protocol time).  ``overlap_O1`` / ``overlap_O3`` are
    the joint two-particle occupancies of each region in the initial state.
    ``passed`` is true exactly when all four numbers are <= ``epsilon``;
    it serializes under the key ``"pass"``.
    """

    epsilon: float
    leak_13: float
    leak_31: float
    overlap_O1: float
    overlap_O3: float
    passed: bool

    def __post_init__(self):
        for name in ("epsilon", "leak_13", "leak_31", "overlap_O1", "overlap_O3"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"certificate field {name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)
        expected = (
            self.leak_13 <= self.epsilon
            and self.leak_31 <= self.epsilon
            and self.overlap_O1 <= self.epsilon
            and self.overlap_O3 <= self.epsilon
        )
        if bool(self.passed) != expected:
            raise ValueError("certificate pass flag is inconsistent with its values")
        object.__setattr__(self, "passed", bool(self.passed))


def make_lattice(n_sites: int, hopping: float) -> Lattice1D:
    """Construct a validated hard-wall lattice."""
    return Lattice1D(n_sites, hopping)


def _check_region(lat: Lattice1D, region: Region, name: str = "region"):
    if region.hi > lat.n_sites:
        raise ValueError(f"{name} [{region.lo}, {region.hi}) exceeds the {lat.n_sites}-site lattice")


def region_projector(lat: Lattice1D, region: Region) -> LinearOperator:
    """Diagonal projector onto the sites of ``region`` (exact 0/1 entries)."""
    _check_region(lat, region)
    diag = np.zeros(lat.n_sites, dtype=np.complex128)
    diag[region.lo:region.hi] = 1.0
    return LinearOperator(np.diag(diag), lat.site_tag)


def hamiltonian(lat: Lattice1D) -> LinearOperator:
    """Single-particle hopping Hamiltonian with hard-wall ends.

    ``H[i, i] = 2 J`` and ``H[i, i +- 1] = -J``; the constant shift keeps
    the spectrum inside ``[0, 4J]``.
    """
    n, j = lat.n_sites, lat.hopping
    mat = np.zeros((n, n), dtype=np.complex128)
    np.fill_diagonal(mat, 2.0 * j)
    idx = np.arange(n - 1)
    mat[idx, idx + 1] = -j
    mat[idx + 1, idx] = -j
    return LinearOperator(mat, lat.site_tag)


@lru_cache(maxsize=32)
def _eigensystem(lat: Lattice1D):
    mat = hamiltonian(lat).to_dense()
    evals, evecs = np.linalg.eigh(mat)
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def propagator(lat: Lattice1D, t: float) -> LinearOperator:
    """Time evolution ``U_t = exp(-i H t)`` via full eigendecomposition.

    Parameters
    ----------
    lat : Lattice1D
    t : float
        Evolution time, ``t >= 0``.

    Returns
    -------
    LinearOperator
        Unitary to within ``UNITARITY_ATOL`` (guaranteed by construction
        from an orthonormal eigenbasis; checked by the test suite).
    """
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise ValueError(f"propagator time must be finite and >= 0, got {t}")
    if t == 0.0:
        # Exact identity instead of the ~1e-16 eigh reconstruction residue.
        return LinearOperator(np.eye(lat.n_sites, dtype=np.complex128), lat.site_tag)
    evals, evecs = _eigensystem(lat)
    phases = np.exp(-1j * evals * t)
    return LinearOperator((evecs * phases) @ evecs.conj().T, lat.site_tag)


def wavepacket(lat: Lattice1D, support: Region, center: float, width: float, momentum: float) -> StateVector:
    """Normalized raised-cosine wavepacket with compact support.

    The envelope is ``(1 + cos(pi (x - center) / width)) / 2`` for
    ``|x - center| <= width`` and identically zero elsewhere, multiplied by
    the plane-wave phase ``exp(i * momentum * x)``.  A packet built this way
    moves with group velocity close to ``2 J sin(momentum)``.

    Parameters
    ----------
    lat : Lattice1D
    support : Region
        Sites allowed to carry amplitude; the envelope must fit inside.
    center : float
        Envelope center (need not be an integer site).
    width : float
        Envelope half-width; required to satisfy ``width <= support.width / 4``.
    momentum : float
        Carrier momentum in radians per site.

    Returns
    -------
    StateVector
        Unit-norm single-particle state, exactly zero outside ``support``.
    """
    _check_region(lat, support, "packet support")
    center = float(center)
    width = float(width)
    momentum = float(momentum)
    if not (width > 0.0) or not math.isfinite(width):
        raise ValueError(f"packet width must be positive, got {width}")
    if width > support.width / 4.0:
        raise ValueError(
            f"packet width {width} exceeds a quarter of its support width {support.width}"
        )
    if center - width < support.lo or center + width > support.hi - 1:
        raise ValueError(
            f"packet envelope [{center - width}, {center + width}] does not fit inside "
            f"support sites [{support.lo}, {support.hi - 1}]"
        )
    x = np.arange(lat.n_sites)
    inside = np.abs(x - center) <= width
    envelope = np.where(inside, 0.5 * (1.0 + np.cos(np.pi * (x - center) / width)), 0.0)
    amps = envelope * np.exp(1j * momentum * x)
    state = StateVector(amps, lat.site_tag)
    return state.normalized()


def leakage(lat: Lattice1D, src: Region, dst: Region, t: float, method: str = "auto") -> float:
    """Worst-case amplitude transfer ``|P_dst U_t P_src|_2`` (spectral norm).

    Parameters
    ----------
    lat : Lattice1D
    src, dst : Region
        Source and destination site regions.
    t : float
        Evolution time.
    method : {"auto", "dense", "sparse"}
        ``dense`` computes the largest singular value of the coupling block
        by full SVD; ``sparse`` runs an iterative sparse SVD on the same
        block; ``auto`` picks ``dense`` for small blocks.

    Returns
    -------
    float
        Largest singular value of the propagator block mapping ``src``
        amplitudes into ``dst``.
    """
    _check_region(lat, src, "src")
    _check_region(lat, dst, "dst")
    if method not in ("auto", "dense", "sparse"):
        raise ValueError(f"unknown leakage method {method!r}")
    u = propagator(lat, t).to_dense()
    block = u[dst.lo:dst.hi, src.lo:src.hi]
    if method == "auto":
        method = "dense" if block.size <= 64 * 64 else "sparse"
    if method == "dense":
        return float(np.linalg.svd(block, compute_uv=False)[0])
    if min(block.shape) == 1:
        return float(np.linalg.norm(block))
    sparse_block = sp.csr_array(block)
    if sp.linalg.norm(sparse_block) == 0.0:
        return 0.0
    sigma = scipy.sparse.linalg.svds(sparse_block, k=1, return_singular_vectors=False)
    return float(sigma[0])


def check_spacelike(
    lat: Lattice1D,
    o1: Region,
    o3: Region,
    psi: StateVector,
    t_total: float,
    eps: float,
) -> SpacelikeCertificate:
    """Certify that two regions stay causally disconnected for a protocol.

    Two conditions are bounded numerically: single-particle propagator
    leakage between the regions at every sampled time in ``[0, t_total]``
    (both directions), and joint occupancy of each region by both particles
    of the initial two-particle state ``psi``.

    Parameters
    ----------
    lat : Lattice1D
    o1, o3 : Region
        The two regions to certify against each other.
    psi : StateVector
        Initial state on the two-particle composite space for this lattice
        (dimension ``8 * n_sites**2``).
    t_total : float
        Total protocol duration to cover.
    eps : float
        Certification threshold applied to all four bounds.

    Returns
    -------
    SpacelikeCertificate
    """
    _check_region(lat, o1, "O1")
    _check_region(lat, o3, "O3")
    t_total = float(t_total)
    if not math.isfinite(t_total) or t_total < 0.0:
        raise ValueError(f"t_total must be finite and >= 0, got {t_total}")
    if not (float(eps) > 0.0):
        raise ValueError(f"eps must be positive, got {eps}")
    space = CompositeSpace(lat.n_sites)
    if psi.basis_tag != space.basis_tag or psi.dim != space.dim:
        raise ValueError(
            f"psi must live on the two-particle composite space {space.basis_tag!r}, got {psi.basis_tag!r}"
        )
    times = np.linspace(0.0, t_total, CERTIFICATE_TIME_SAMPLES)
    leak_13 = max(leakage(lat, o1, o3, t) for t in times)
    leak_31 = max(leakage(lat, o3, o1, t) for t in times)
    overlap_o1 = joint_position_probability(space, psi, o1.sites(), o1.sites())
    overlap_o3 = joint_position_probability(space, psi, o3.sites(), o3.sites())
    eps = float(eps)
    passed = leak_13 <= eps and leak_31 <= eps and overlap_o1 <= eps and overlap_o3 <= eps
    return SpacelikeCertificate(
        epsilon=eps,
        leak_13=leak_13,
        leak_31=leak_31,
        overlap_O1=overlap_o1,
        overlap_O3=overlap_o3,
        passed=passed,
    )
