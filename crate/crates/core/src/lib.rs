//! Fine-grain hardware-IP redaction compiler.
//!
//! Takes a gate-level netlist, replaces selected Boolean and sequential
//! logic with programmable cells (look-up tables, registered look-up tables
//! and programmable interconnect muxes), applies randomized structural
//! transformations, and emits the redacted netlist together with the
//! functional bitstream that restores the original behavior. Companion
//! passes verify functional equivalence of the programmed design and score
//! the functional/structural distance between redacted variants.

pub mod bitstream;
pub mod equiv;
pub mod fabric;
pub mod gate;
pub mod graph;
pub mod io;
pub mod numeric;
pub mod params;
pub mod redact;
pub mod sim;
pub mod rng;

pub use gate::GateKind;
pub use graph::{CutKind, CutPoint, GraphError, Hypergraph, Vertex, VertexId, VertexKind};
pub use io::{parse_netlist, serialize_netlist, Format, ParseError, SerializeError};
