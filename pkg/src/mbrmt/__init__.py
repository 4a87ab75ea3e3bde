"""Random-matrix ensembles for many-body systems.

Sampling of classical Gaussian ensembles and their embedded few-body
counterparts for fermions and bosons, spectral one- and two-point statistics,
and qubit dephasing against random environments.
"""

from .basis import (
    BOSON,
    FERMION,
    ConfigurationBlock,
    ManyBodyBasis,
    SingleParticleSpace,
    apply_kbody_term,
    block_transfer_matrix,
    configuration_blocks,
    dimension,
    enumerate_basis,
    transfer_distance,
)
from .classical import (
    ClassicalEnsembleSpec,
    MatrixSample,
    catalan,
    log_jpdf,
    sample_classical,
    semicircle_cdf,
    semicircle_density,
    semicircle_radius,
)
from .config import RunConfig, RunManifest
from .decoherence import (
    EnvironmentPair,
    PurityTrace,
    QubitEnvSpec,
    T_HEISENBERG,
    build_environment,
    evolve_dephasing_fast,
    evolve_full,
    first_crossing_time,
    initial_state,
    purity,
    purity_trace,
    reduced_density,
)
from .embedded import (
    CrossMomentStats,
    EmbeddedEnsembleSpec,
    KBodyCoefficients,
    ManyBodyHamiltonian,
    compose_one_plus_two,
    cross_moment_fluctuations,
    embed,
    one_body_hamiltonian,
    sample_kbody,
    sample_member,
    unit_spacing_energies,
)
from .errors import CapacityError, ConfigError, UnfoldingError
from .rng import RandomStream
from .spectra import (
    MemberMoments,
    Spectrum,
    StatCurve,
    UnfoldedSpectrum,
    delta3,
    delta3_from_sigma2,
    edgeworth_cdf,
    edgeworth_density,
    eigenvalue_density,
    eigvals_symmetric,
    ensemble_map_members,
    flores_correction,
    goe_delta3,
    goe_number_variance,
    kramers_deduplicate,
    ks_distance,
    moments,
    nnsd,
    number_variance,
    poisson_spacing,
    poisson_spacing_cdf,
    semi_poisson_spacing,
    unfold,
    unfold_members,
    wigner_surmise,
    wigner_surmise_cdf,
)

__version__ = "0.1.0"
