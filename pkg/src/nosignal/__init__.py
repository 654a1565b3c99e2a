"""Two spin-1/2 particles on a 1-D lattice plus a detector qubit.

Numerically answers when a localized operation in one region can change
measurement statistics in a causally disconnected region: with
exchange-symmetric position-localized operations the effect vanishes to
certified precision, while label-addressed operations (or distinguishable
particles combined with a global joint measurement) produce a finite,
quantified signal.
"""

from .composite import (
    CompositeSpace,
    Statistics,
    antisymmetrize,
    antisymmetry_violation,
    basis_index,
    decode_basis_index,
    evolve_positions,
    exchange_operator,
    is_exchange_symmetric,
    joint_position_probability,
    lift_one_particle,
    position_occupancy,
    prepare_initial,
    symmetrize,
)
from .lattice import (
    Lattice1D,
    Region,
    SpacelikeCertificate,
    check_spacelike,
    hamiltonian,
    leakage,
    make_lattice,
    propagator,
    region_projector,
    wavepacket,
)
from .protocol import (
    PacketSpec,
    ScenarioConfig,
    SignalingReport,
    bell_projector,
    default_scenario,
    detector_coupling,
    detector_measurement,
    joint_measurement,
    kick_operator,
    occupancy_projector,
    prepare_scenario,
    qubit_one_probability,
    run_arm_stages,
    run_naive_sorkin,
    run_scenario,
    signaling_delta,
)
from .qcore import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    BranchEnsemble,
    DensityMatrix,
    LinearOperator,
    StateVector,
    apply,
    expectation,
    identity,
    luders_measure,
    reduced_density,
    tensor_product,
)

__version__ = "0.1.0"

__all__ = [
    "BranchEnsemble",
    "CompositeSpace",
    "DensityMatrix",
    "Lattice1D",
    "LinearOperator",
    "PacketSpec",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "Region",
    "ScenarioConfig",
    "SignalingReport",
    "SpacelikeCertificate",
    "StateVector",
    "Statistics",
    "antisymmetrize",
    "antisymmetry_violation",
    "apply",
    "basis_index",
    "bell_projector",
    "check_spacelike",
    "decode_basis_index",
    "default_scenario",
    "detector_coupling",
    "detector_measurement",
    "evolve_positions",
    "exchange_operator",
    "expectation",
    "hamiltonian",
    "identity",
    "is_exchange_symmetric",
    "joint_measurement",
    "joint_position_probability",
    "kick_operator",
    "leakage",
    "lift_one_particle",
    "luders_measure",
    "make_lattice",
    "occupancy_projector",
    "position_occupancy",
    "prepare_initial",
    "prepare_scenario",
    "propagator",
    "qubit_one_probability",
    "reduced_density",
    "region_projector",
    "run_arm_stages",
    "run_naive_sorkin",
    "run_scenario",
    "signaling_delta",
    "symmetrize",
    "tensor_product",
    "wavepacket",
    "__version__",
]
