//! File formats and the `pairdeg` command-line front end for `pairdeg-core`.

pub mod app;
pub mod formats;

pub use app::run;
