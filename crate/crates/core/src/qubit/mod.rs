//! Jordan-Wigner encoding, Pauli-level locality checks and rotation
//! schedules for exponentials of number-operator polynomials.

mod jw;
mod locality;
mod pauli;
mod schedule;

pub use jw::jw_map;
pub use locality::{
    locality_report, pauli_census, support_width, LocalityReport, SectorLocality, StringCensus,
    SupportWidth,
};
pub use pauli::{PauliLetter, PauliOperator, PauliString, PAULI_PRUNE};
pub use schedule::{
    apply_gates, schedule_number_exponential, Gate, RotationEntry, RotationSchedule, ANGLE_PRUNE,
};
