//! Josephson-energy variability of Al/AlOx/Al tunnel junctions with rough
//! interfaces.
//!
//! The pipeline synthesizes two independent Gaussian random interface
//! profiles per device ([`randfield`]), converts the resulting local barrier
//! thickness into a normal conductance by summing locally uniform tunnel
//! barriers ([`transport`]), maps conductance to `E_J` with the
//! Ambegaokar–Baratoff relation, repeats this over seeded Monte Carlo
//! ensembles ([`ensemble`]) and fits the resulting distribution with a
//! log-normal ([`stats`]).

pub mod cli;
pub mod config;
pub mod domain;
pub mod ensemble;
pub mod interp;
pub mod quadrature;
pub mod randfield;
pub mod report;
pub mod stats;
pub mod transport;

pub use domain::{
    validate, FieldNormalization, GridSpec, JunctionParams, RoughnessParams, ValidatedConfig,
    ValidationError, DEFAULT_THICKNESS_FLOOR_NM,
};
pub use ensemble::{run_ensemble, run_sweep, EnsembleConfig, EnsembleResult, SweepSeeds};
pub use randfield::{synthesize_field, thickness_map, FieldSynthesizer, HeightField, ThicknessMap};
pub use stats::{fit_lognormal, histogram, lognormal_moments, transmon_frequency, LogNormalFit};
pub use transport::{
    build_conductance_table, conductance_density, ej_from_conductance, ej_rough, ej_short_junction,
    ej_uniform, length_scales, BarrierProfile, ConductanceTable,
};
