//! JSON graph format mirroring the IR.
//!
//! ```json
//! {"vertices": [{"id": 0, "kind": "input", "fanins": [], "name": "a"}, ...],
//!  "inputs": [0], "outputs": [5]}
//! ```
//!
//! Kind strings: `input`, `output`, `const0`, `const1`, `buf`, `not`,
//! `and<n>`, `or<n>`, `nand<n>`, `nor<n>`, `xor`, `xnor`, `mux2`, `table`,
//! `dff`, `CLUT<w>`, `CSB<w>`, `CSBQ`, `CPI<w>`, `cfg0`/`cfg1`. Tables carry
//! a `bits` string (bit k at index k); fabric kinds carry `elem`; `CSBQ` may
//! carry `ff`, the original flip-flop name. Field order is fixed so output
//! is byte-deterministic.

use serde::{Deserialize, Serialize};

use super::ParseError;
use crate::gate::GateKind;
use crate::graph::{Hypergraph, Vertex, VertexId, VertexKind};

#[derive(Serialize, Deserialize)]
struct JsonVertex {
    id: VertexId,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    elem: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ff: Option<String>,
    fanins: Vec<VertexId>,
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    bits: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    model: String,
    vertices: Vec<JsonVertex>,
    inputs: Vec<VertexId>,
    outputs: Vec<VertexId>,
}

fn kind_to_parts(kind: &VertexKind) -> (String, Option<u32>, Option<String>, Option<String>) {
    match kind {
        VertexKind::Input => ("input".into(), None, None, None),
        VertexKind::Output => ("output".into(), None, None, None),
        VertexKind::Gate(g) => {
            let s = match g {
                GateKind::Const0 => "const0".to_string(),
                GateKind::Const1 => "const1".to_string(),
                GateKind::Buf => "buf".to_string(),
                GateKind::Not => "not".to_string(),
                GateKind::And(n) => format!("and{n}"),
                GateKind::Or(n) => format!("or{n}"),
                GateKind::Nand(n) => format!("nand{n}"),
                GateKind::Nor(n) => format!("nor{n}"),
                GateKind::Xor => "xor".to_string(),
                GateKind::Xnor => "xnor".to_string(),
                GateKind::Mux2 => "mux2".to_string(),
                GateKind::Dff => "dff".to_string(),
                GateKind::Table { width, bits } => {
                    let s: String =
                        (0..(1usize << width)).map(|k| if (bits >> k) & 1 == 1 { '1' } else { '0' }).collect();
                    return ("table".to_string(), None, None, Some(s));
                }
            };
            (s, None, None, None)
        }
        VertexKind::Clut { width, elem } => (format!("CLUT{width}"), Some(*elem), None, None),
        VertexKind::CsbCore { width, elem } => (format!("CSB{width}"), Some(*elem), None, None),
        VertexKind::CsbReg { elem, source_ff } => {
            ("CSBQ".to_string(), Some(*elem), source_ff.clone(), None)
        }
        VertexKind::Cpi { width, elem } => (format!("CPI{width}"), Some(*elem), None, None),
        VertexKind::ConfigBit { value } => {
            (if *value { "cfg1" } else { "cfg0" }.to_string(), None, None, None)
        }
    }
}

fn kind_from_parts(v: &JsonVertex) -> Result<VertexKind, ParseError> {
    let bad = |msg: String| ParseError::Json(msg);
    let arity_suffix = |s: &str, prefix: &str| -> Result<u8, ParseError> {
        s[prefix.len()..]
            .parse::<u8>()
            .map_err(|_| bad(format!("bad kind '{s}'")))
    };
    let elem = || v.elem.ok_or_else(|| bad(format!("kind '{}' needs elem", v.kind)));
    Ok(match v.kind.as_str() {
        "input" => VertexKind::Input,
        "output" => VertexKind::Output,
        "const0" => VertexKind::Gate(GateKind::Const0),
        "const1" => VertexKind::Gate(GateKind::Const1),
        "buf" => VertexKind::Gate(GateKind::Buf),
        "not" => VertexKind::Gate(GateKind::Not),
        "xor" => VertexKind::Gate(GateKind::Xor),
        "xnor" => VertexKind::Gate(GateKind::Xnor),
        "mux2" => VertexKind::Gate(GateKind::Mux2),
        "dff" => VertexKind::Gate(GateKind::Dff),
        "cfg0" => VertexKind::ConfigBit { value: false },
        "cfg1" => VertexKind::ConfigBit { value: true },
        "table" => {
            let s = v
                .bits
                .as_deref()
                .ok_or_else(|| bad("table vertex needs bits".into()))?;
            if !s.len().is_power_of_two() || s.len() > 64 {
                return Err(bad(format!("table bits length {} is not a power of two <= 64", s.len())));
            }
            let width = s.len().trailing_zeros() as u8;
            let mut bits = 0u64;
            for (k, c) in s.chars().enumerate() {
                match c {
                    '1' => bits |= 1 << k,
                    '0' => {}
                    _ => return Err(bad("table bits must be 0/1".into())),
                }
            }
            VertexKind::Gate(GateKind::Table { width, bits })
        }
        "CSBQ" => VertexKind::CsbReg { elem: elem()?, source_ff: v.ff.clone() },
        s if s.starts_with("and") => VertexKind::Gate(GateKind::And(arity_suffix(s, "and")?)),
        s if s.starts_with("nand") => VertexKind::Gate(GateKind::Nand(arity_suffix(s, "nand")?)),
        s if s.starts_with("nor") => VertexKind::Gate(GateKind::Nor(arity_suffix(s, "nor")?)),
        s if s.starts_with("or") => VertexKind::Gate(GateKind::Or(arity_suffix(s, "or")?)),
        s if s.starts_with("CLUT") => {
            VertexKind::Clut { width: arity_suffix(s, "CLUT")?, elem: elem()? }
        }
        s if s.starts_with("CSB") => {
            VertexKind::CsbCore { width: arity_suffix(s, "CSB")?, elem: elem()? }
        }
        s if s.starts_with("CPI") => {
            VertexKind::Cpi { width: arity_suffix(s, "CPI")?, elem: elem()? }
        }
        other => return Err(bad(format!("unknown kind '{other}'"))),
    })
}

pub fn serialize(g: &Hypergraph) -> String {
    let vertices: Vec<JsonVertex> = g
        .iter()
        .map(|v| {
            let (kind, elem, ff, bits) = kind_to_parts(&v.kind);
            JsonVertex { id: v.id, kind, elem, ff, fanins: v.fanins.clone(), name: v.name.clone(), bits }
        })
        .collect();
    let doc = JsonGraph {
        model: g.name().to_string(),
        vertices,
        inputs: g.pi_ids(),
        outputs: g.po_ids(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

pub fn parse(text: &str) -> Result<Hypergraph, ParseError> {
    let doc: JsonGraph =
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let max_id = doc.vertices.iter().map(|v| v.id).max().map(|m| m as usize + 1).unwrap_or(0);
    let mut vertices: Vec<Option<Vertex>> = vec![None; max_id];
    for jv in &doc.vertices {
        let kind = kind_from_parts(jv)?;
        let slot = &mut vertices[jv.id as usize];
        if slot.is_some() {
            return Err(ParseError::Json(format!("duplicate vertex id {}", jv.id)));
        }
        *slot = Some(Vertex {
            id: jv.id,
            kind,
            fanins: jv.fanins.clone(),
            name: jv.name.clone(),
        });
    }
    for jv in &doc.vertices {
        for &f in &jv.fanins {
            if vertices.get(f as usize).and_then(|s| s.as_ref()).is_none() {
                return Err(ParseError::Undriven(format!("vertex {} fanin {f}", jv.id)));
            }
        }
    }
    Ok(Hypergraph::from_parts(doc.model, vertices)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_ids_and_names() {
        let mut g = Hypergraph::new("t");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let b = g.add_vertex(VertexKind::Input, vec![], "b").unwrap();
        let x = g
            .add_vertex(VertexKind::Gate(GateKind::Table { width: 2, bits: 0b0110 }), vec![a, b], "x")
            .unwrap();
        let q = g.add_vertex(VertexKind::Gate(GateKind::Dff), vec![x], "q").unwrap();
        g.add_vertex(VertexKind::Output, vec![q], "q_out").unwrap();
        let s1 = serialize(&g);
        let g2 = parse(&s1).unwrap();
        let s2 = serialize(&g2);
        assert_eq!(s1, s2);
        for v in g.iter() {
            let w = g2.vertex(v.id);
            assert_eq!(v.name, w.name);
            assert_eq!(v.kind, w.kind);
            assert_eq!(v.fanins, w.fanins);
        }
    }

    #[test]
    fn fabric_vertices_round_trip() {
        let mut g = Hypergraph::new("r");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let l = g
            .add_vertex(VertexKind::Clut { width: 2, elem: 0 }, vec![a, a], "l")
            .unwrap();
        let c = g
            .add_vertex(VertexKind::CsbCore { width: 2, elem: 1 }, vec![l, a], "c")
            .unwrap();
        let r = g
            .add_vertex(
                VertexKind::CsbReg { elem: 1, source_ff: Some("q0".into()) },
                vec![c],
                "q",
            )
            .unwrap();
        let p = g
            .add_vertex(VertexKind::Cpi { width: 2, elem: 2 }, vec![r, a], "p")
            .unwrap();
        g.add_vertex(VertexKind::Output, vec![p], "p").unwrap();
        let s1 = serialize(&g);
        let g2 = parse(&s1).unwrap();
        assert_eq!(serialize(&g2), s1);
        assert!(matches!(
            g2.vertex(r).kind,
            VertexKind::CsbReg { elem: 1, ref source_ff } if source_ff.as_deref() == Some("q0")
        ));
    }

    #[test]
    fn bad_kind_is_an_error() {
        let s = r#"{"model":"m","vertices":[{"id":0,"kind":"frob","fanins":[],"name":"x"}],"inputs":[],"outputs":[]}"#;
        assert!(parse(s).is_err());
    }
}
