//! Batch front-end: a key=value config file drives the pipelines and the
//! results land as deterministic JSON and gnuplot-ready tables.

pub mod config;
pub mod report;
pub mod run;

pub use config::{Overrides, RunConfig};
pub use run::{
    cmd_all, cmd_convention, cmd_levinson, cmd_radial, cmd_scan, cmd_sweep, RunReport,
};
