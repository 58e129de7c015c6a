//! Instance documents and report rendering.

mod instance;
mod report;

pub use instance::{
    parse_cone, parse_cone_file, parse_instance, parse_json, parse_points, parse_test_vectors, scalar,
    serialize_instance, vector, vector_value, FORMAT_VERSION,
};
pub use report::{
    bellman_json, bellman_text, emit_tables, expectation_tables, pareto_json, pareto_text, rect_json, rect_text,
    sup_json, value_set_lines,
};

use std::path::Path;

use crate::dp::ControlledProblem;
use crate::error::{Error, Result};

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))
}

pub fn load_instance(path: &Path) -> Result<ControlledProblem> {
    parse_instance(&read_file(path)?)
}
