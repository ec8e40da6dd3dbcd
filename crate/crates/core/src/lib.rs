//! Entanglement dynamics of two independent atom-cavity systems whose
//! cavities support many discrete modes.
//!
//! Each atom exchanges its excitation with the modes of its own cavity. With
//! more than one mode the emitted photon only rephases at the atom after the
//! round-trip time `L/c`, which breaks the harmonic Rabi cycle into collapse,
//! sudden death and revival of the two-atom concurrence.
//!
//! Units: the central-mode vacuum Rabi frequency is 1.

pub mod cli;
pub mod double;
pub mod entanglement;
pub mod error;
pub mod integrator;
pub mod model;
pub mod records;
pub mod retardation;
pub mod single;
pub mod state;

pub use double::{
    deriv_double, init_double, observables_double, AngleConvention, DoubleExcState,
    DoubleExcSystem, DoubleObservables,
};
pub use entanglement::{
    concurrence_double_closed, concurrence_single_closed, concurrence_wootters, rho_atoms_double,
    rho_atoms_single, TwoQubitDensity,
};
pub use error::{Error, Result};
pub use integrator::{
    default_step, expm_oracle, integrate, propagate, run_step, StepPlan, Trajectory,
};
pub use model::{build_mode_grid, retardation_time, CouplingProfile, ModeGrid, SystemConfig};
pub use records::{record_double, record_single, DoubleRecord, Record, SingleRecord};
pub use retardation::{
    default_min_gap, detect_revivals, kernel_peaks, kernel_samples, memory_kernel,
    predict_revival_times, Revival, RevivalPrediction, RevivalReport,
};
pub use single::{
    deriv_single, init_atoms_entangled, init_fields_entangled, observables_single, SingleExcState,
    SingleExcSystem, SingleObservables,
};
pub use state::{Amplitudes, LinearSystem};
