//! System files, report serialization, rendering and the command line.

mod cli;
mod render;
mod schema;

pub use cli::{run_command, EXIT_INVALID, EXIT_OK, EXIT_USAGE};
pub use render::{export_obj, render_svg};
pub use schema::{parse_system_file, MapSpec, PolyhedronSpec, RunConfig, SystemDescription};
