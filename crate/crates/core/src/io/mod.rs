//! Netlist file formats.
//!
//! Two interchangeable formats are supported:
//!
//! * a BLIF dialect (`.model` / `.inputs` / `.outputs` / `.names` /
//!   `.latch` / `.end`, plus a `.cell` extension for programmable-fabric
//!   instances in redacted netlists);
//! * a JSON graph format mirroring the IR vertex-for-vertex.
//!
//! Both serializers are byte-deterministic, and `parse(serialize(g))` is
//! graph-isomorphic to `g` with names preserved.

pub mod blif;
pub mod json;

use std::path::Path;

use thiserror::Error;

use crate::graph::Hypergraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Blif,
    Json,
}

impl Format {
    /// Picks a format from a file extension (`.blif` or `.json`).
    pub fn from_path(path: &Path) -> Result<Format, ParseError> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("blif") => Ok(Format::Blif),
            Some("json") => Ok(Format::Json),
            other => Err(ParseError::UnknownFormat(
                other.unwrap_or("<none>").to_string(),
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: net '{net}' is driven more than once")]
    MultiplyDriven { line: usize, net: String },
    #[error("net '{0}' is used but never driven")]
    Undriven(String),
    #[error("line {line}: table has {got} inputs, cap is {cap}")]
    UnsupportedArity { line: usize, got: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error("json: {0}")]
    Json(String),
    #[error("unknown netlist format '{0}' (expected .blif or .json)")]
    UnknownFormat(String),
}

#[derive(Debug, Error)]
pub enum SerializeError {
    #[error("duplicate net name '{0}'")]
    DuplicateName(String),
    #[error("primary output '{port}' is driven by net '{net}'; BLIF requires the driver to carry the port name")]
    PoNameMismatch { port: String, net: String },
    #[error("vertex kind of '{0}' has no BLIF form")]
    Unrepresentable(String),
}

pub fn parse_netlist(text: &str, format: Format) -> Result<Hypergraph, ParseError> {
    match format {
        Format::Blif => blif::parse(text),
        Format::Json => json::parse(text),
    }
}

pub fn serialize_netlist(g: &Hypergraph, format: Format) -> Result<String, SerializeError> {
    match format {
        Format::Blif => blif::serialize(g),
        Format::Json => Ok(json::serialize(g)),
    }
}
