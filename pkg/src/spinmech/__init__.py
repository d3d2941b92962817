"""Simulator for parametrically amplified spin-mechanical systems."""

from .errors import (
    ConfigError,
    DegenerateInputError,
    InstabilityError,
    InvalidDimensionError,
    NoSqueezedFixedPointError,
    RunFailedError,
    SignatureMismatchError,
    SpinMechError,
    TruncationError,
    UndefinedDirectionError,
    UnsupportedConfigurationError,
)
from .hilbert import (
    Operator,
    QuantumState,
    SpaceSignature,
    basis_state,
    boson_spin_signature,
    boson_spin_state,
    collective_spin,
    embed,
    expectation,
    fock_annihilation,
    fock_creation,
    fock_number,
    identity,
    partial_trace,
    pauli,
    spin_basis_state,
)
from .models import (
    DeviceParams,
    ModelParams,
    SqueezeParams,
    TimeDependentHamiltonian,
    build_correction,
    build_interaction_picture,
    build_ising,
    build_oat,
    build_squeezed_rabi,
    build_time_dependent,
    build_total_hamiltonian,
    cantilever_params,
    cooperativity,
    derive_squeeze_params,
    dressed_states,
    engineered_dissipation,
    enhancement_factors,
    lamb_dicke_eta,
    magnetic_coupling,
    pump_amplitude,
    strain_coupling,
)
from .dynamics import (
    CollapseChannel,
    Trajectory,
    choose_truncation,
    evolve_lindblad,
    evolve_unitary,
)
from .integrate import IntegratorOptions
from .transforms import (
    FrameTransform,
    cat_alpha,
    coherent_state,
    conjugate,
    ghz_target,
    polaron_transform,
    schrieffer_wolff_check,
    squeeze_operator,
    target_cat_state,
)
from .metrics import SqueezingReport, concurrence, fidelity, spin_squeezing

__version__ = "0.1.0"
