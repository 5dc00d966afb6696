"""Direct temperature readout for a dissipative qubit thermometer."""

from .core import (
    BathSpec,
    BlochVector,
    DomainError,
    GibbsProperties,
    GibbsState,
    QubitHamiltonian,
    gibbs_properties,
    heat_capacity,
    mean_energy,
    relative_entropy,
    von_neumann_entropy,
)
from .dynamics import (
    DissipationRates,
    IntegrationError,
    Trajectory,
    analytic_trajectory,
    bloch_time_derivative,
    propagate_analytic,
    propagate_numeric,
    rates_from_bath,
    stationary_state,
)
from .experiment import (
    COLUMNS,
    ConfigError,
    ExperimentConfig,
    OutputRow,
    TimeGrid,
    emit_csv,
    parse_config,
    preset_config,
    preset_names,
    run_experiment,
)
from .inference import (
    CorrectedReadout,
    ErrorPair,
    FiniteLagEstimates,
    ReferenceReadout,
    Regime,
    UnphysicalEnergyError,
    classify_regime,
    corrected_readout,
    covariance_identity_residual,
    effective_beta_e,
    error_e1,
    error_e2,
    finite_lag_estimators,
    generalized_free_energy,
    infer_beta_r,
    worst_case_errors,
)
from .metrology import (
    SingularStateError,
    TemperatureDerivative,
    dbloch_dT_analytic,
    dbloch_dT_numeric,
    qcrb_variance_bound,
    qfi_bloch,
    qfi_closed_form,
    thermal_qfi,
)

__version__ = "0.1.0"
