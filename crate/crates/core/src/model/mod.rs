//! Spatial and channel model: shape functions, path loss, SINR and the
//! restrictions every closed form relies on.

mod channel;
mod scenario;
mod shape;

pub use channel::{
    db_to_linear, linear_to_db, parse_level, path_loss, sinr, ChannelParams, PathLossExponent,
    REFERENCE_DISTANCE,
};
pub use scenario::{
    validate_scenario, NetworkScenario, Restriction, Severity, ValidationReport, Violation,
};
pub use shape::{Jump, ShapeFunction, TailDecay, Tabulated};
