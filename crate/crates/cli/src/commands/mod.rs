//! One module per subcommand.

pub mod classify;
pub mod cluster;
pub mod contrast;
pub mod extract;
pub mod ingest;
pub mod report;
pub mod select;
pub mod synth;
