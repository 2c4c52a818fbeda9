//! BLIF dialect reader/writer.
//!
//! Grammar (one command per logical line, `\` continues a line, `#` starts
//! a comment):
//!
//! ```text
//! .model <name>
//! .inputs <net>...
//! .outputs <net>...
//! .names <in-net>... <out-net>     followed by cover rows `{0,1,-}* {0,1}`
//! .latch <in-net> <out-net> [0]    zero-initialized data flip-flop
//! .cell CLUT<w> <elem> <in>*w <out>
//! .cell CPI<w>  <elem> <in>*w <out>
//! .cell CSB<w>  <elem> <in>*w <reg-out> <comb-out> [ff=<name>]
//! .end
//! ```
//!
//! `.cell` is this tool's extension carrying programmable-fabric instances;
//! original designs use only the six standard commands. Combinational gates
//! are emitted as truth-table covers (one minterm row per one-bit), so
//! primitive gate kinds other than the flip-flop read back as `Table`
//! vertices of the same function.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{ParseError, SerializeError};
use crate::gate::{GateKind, MAX_TABLE_WIDTH};
use crate::graph::{Hypergraph, Vertex, VertexId, VertexKind};

#[derive(Debug)]
enum Def {
    Pi,
    Names {
        inputs: Vec<String>,
        rows: Vec<(String, char)>,
        line: usize,
    },
    Latch {
        input: String,
    },
    CellLut {
        kind_is_cpi: bool,
        elem: u32,
        inputs: Vec<String>,
    },
    CellCsb {
        elem: u32,
        inputs: Vec<String>,
        comb_net: String,
        source_ff: Option<String>,
    },
}

struct LogicalLine {
    number: usize,
    tokens: Vec<String>,
}

fn logical_lines(text: &str) -> Vec<LogicalLine> {
    let mut out: Vec<LogicalLine> = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut pending_start = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let continued = line.trim_end().ends_with('\\');
        let body = line.trim_end().trim_end_matches('\\');
        if pending.is_empty() {
            pending_start = i + 1;
        }
        pending.extend(body.split_whitespace().map(str::to_string));
        if continued {
            continue;
        }
        if !pending.is_empty() {
            out.push(LogicalLine {
                number: pending_start,
                tokens: std::mem::take(&mut pending),
            });
        }
    }
    if !pending.is_empty() {
        out.push(LogicalLine { number: pending_start, tokens: pending });
    }
    out
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn parse_cell_kind(tok: &str, line: usize) -> Result<(&'static str, u8), ParseError> {
    for prefix in ["CLUT", "CSB", "CPI"] {
        if let Some(rest) = tok.strip_prefix(prefix) {
            let width: u8 = rest
                .parse()
                .map_err(|_| syntax(line, format!("bad cell width in '{tok}'")))?;
            if width < 2 {
                return Err(syntax(line, format!("cell width {width} below 2")));
            }
            return Ok((prefix, width));
        }
    }
    Err(syntax(line, format!("unknown cell kind '{tok}'")))
}

pub fn parse(text: &str) -> Result<Hypergraph, ParseError> {
    let lines = logical_lines(text);
    let mut model = String::from("top");
    let mut outputs: Vec<(String, usize)> = Vec::new();
    // (net, def) in file order; map for multiple-driver detection.
    let mut defs: Vec<(String, Def)> = Vec::new();
    let mut driver_seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut ended = false;

    fn claim_net(
        driver_seen: &mut BTreeMap<String, usize>,
        net: &str,
        line: usize,
    ) -> Result<(), ParseError> {
        if driver_seen.insert(net.to_string(), line).is_some() {
            return Err(ParseError::MultiplyDriven { line, net: net.to_string() });
        }
        Ok(())
    }
    let define = |driver_seen: &mut BTreeMap<String, usize>,
                      defs: &mut Vec<(String, Def)>,
                      net: String,
                      def: Def,
                      line: usize|
     -> Result<(), ParseError> {
        claim_net(driver_seen, &net, line)?;
        defs.push((net, def));
        Ok(())
    };

    let mut i = 0;
    while i < lines.len() {
        let ll = &lines[i];
        let ln = ll.number;
        let cmd = ll.tokens[0].as_str();
        if ended {
            break;
        }
        match cmd {
            ".model" => {
                if ll.tokens.len() != 2 {
                    return Err(syntax(ln, ".model takes one name"));
                }
                model = ll.tokens[1].clone();
                i += 1;
            }
            ".inputs" => {
                for t in &ll.tokens[1..] {
                    define(&mut driver_seen, &mut defs, t.clone(), Def::Pi, ln)?;
                }
                i += 1;
            }
            ".outputs" => {
                for t in &ll.tokens[1..] {
                    outputs.push((t.clone(), ln));
                }
                i += 1;
            }
            ".names" => {
                if ll.tokens.len() < 2 {
                    return Err(syntax(ln, ".names needs an output net"));
                }
                let nets = &ll.tokens[1..];
                let (inputs, output) = nets.split_at(nets.len() - 1);
                if inputs.len() > MAX_TABLE_WIDTH as usize {
                    return Err(ParseError::UnsupportedArity {
                        line: ln,
                        got: inputs.len(),
                        cap: MAX_TABLE_WIDTH as usize,
                    });
                }
                let mut rows = Vec::new();
                let mut j = i + 1;
                while j < lines.len() && !lines[j].tokens[0].starts_with('.') {
                    let row = &lines[j];
                    let (pattern, lit) = match row.tokens.len() {
                        1 => (String::new(), &row.tokens[0]),
                        2 => (row.tokens[0].clone(), &row.tokens[1]),
                        _ => return Err(syntax(row.number, "bad cover row")),
                    };
                    if pattern.len() != inputs.len()
                        || !pattern.chars().all(|c| matches!(c, '0' | '1' | '-'))
                    {
                        return Err(syntax(row.number, "cover row does not match input count"));
                    }
                    let lit = match lit.as_str() {
                        "0" => '0',
                        "1" => '1',
                        _ => return Err(syntax(row.number, "output literal must be 0 or 1")),
                    };
                    rows.push((pattern, lit));
                    j += 1;
                }
                define(
                    &mut driver_seen,
                    &mut defs,
                    output[0].clone(),
                    Def::Names { inputs: inputs.to_vec(), rows, line: ln },
                    ln,
                )?;
                i = j;
            }
            ".latch" => {
                if ll.tokens.len() < 3 || ll.tokens.len() > 4 {
                    return Err(syntax(ln, ".latch takes input, output and optional init"));
                }
                if let Some(init) = ll.tokens.get(3) {
                    if init != "0" {
                        return Err(syntax(ln, "only zero-initialized latches are supported"));
                    }
                }
                define(
                    &mut driver_seen,
                    &mut defs,
                    ll.tokens[2].clone(),
                    Def::Latch { input: ll.tokens[1].clone() },
                    ln,
                )?;
                i += 1;
            }
            ".cell" => {
                if ll.tokens.len() < 3 {
                    return Err(syntax(ln, ".cell needs a kind and an element id"));
                }
                let (kind, width) = parse_cell_kind(&ll.tokens[1], ln)?;
                let elem: u32 = ll.tokens[2]
                    .parse()
                    .map_err(|_| syntax(ln, "bad element id"))?;
                let rest = &ll.tokens[3..];
                match kind {
                    "CLUT" | "CPI" => {
                        if rest.len() != width as usize + 1 {
                            return Err(syntax(ln, "cell net count does not match width"));
                        }
                        define(
                            &mut driver_seen,
                            &mut defs,
                            rest[width as usize].clone(),
                            Def::CellLut {
                                kind_is_cpi: kind == "CPI",
                                elem,
                                inputs: rest[..width as usize].to_vec(),
                            },
                            ln,
                        )?;
                    }
                    "CSB" => {
                        let mut rest = rest.to_vec();
                        let source_ff = match rest.last() {
                            Some(t) if t.starts_with("ff=") => {
                                let name = t[3..].to_string();
                                rest.pop();
                                Some(name)
                            }
                            _ => None,
                        };
                        if rest.len() != width as usize + 2 {
                            return Err(syntax(ln, "cell net count does not match width"));
                        }
                        let reg_net = rest[width as usize].clone();
                        let comb_net = rest[width as usize + 1].clone();
                        claim_net(&mut driver_seen, &comb_net, ln)?;
                        define(
                            &mut driver_seen,
                            &mut defs,
                            reg_net,
                            Def::CellCsb {
                                elem,
                                inputs: rest[..width as usize].to_vec(),
                                comb_net,
                                source_ff,
                            },
                            ln,
                        )?;
                    }
                    _ => unreachable!(),
                }
                i += 1;
            }
            ".end" => {
                ended = true;
                i += 1;
            }
            other if other.starts_with('.') => {
                return Err(syntax(ln, format!("unsupported command '{other}'")));
            }
            _ => return Err(syntax(ln, "cover row outside a .names block")),
        }
    }

    // Assign vertex ids: defs in file order (CSB takes two: core then reg),
    // then primary outputs.
    let mut id_of: BTreeMap<&str, VertexId> = BTreeMap::new();
    let mut next: VertexId = 0;
    for (net, def) in &defs {
        match def {
            Def::CellCsb { comb_net, .. } => {
                id_of.insert(comb_net.as_str(), next);
                id_of.insert(net.as_str(), next + 1);
                next += 2;
            }
            _ => {
                id_of.insert(net.as_str(), next);
                next += 1;
            }
        }
    }
    let resolve = |net: &str| -> Result<VertexId, ParseError> {
        id_of
            .get(net)
            .copied()
            .ok_or_else(|| ParseError::Undriven(net.to_string()))
    };

    let mut vertices: Vec<Option<Vertex>> = Vec::new();
    for (net, def) in &defs {
        match def {
            Def::Pi => vertices.push(Some(Vertex {
                id: vertices.len() as VertexId,
                kind: VertexKind::Input,
                fanins: vec![],
                name: net.clone(),
            })),
            Def::Names { inputs, rows, line } => {
                let fanins = inputs
                    .iter()
                    .map(|n| resolve(n))
                    .collect::<Result<Vec<_>, _>>()?;
                let kind = table_from_cover(inputs.len(), rows, *line)?;
                vertices.push(Some(Vertex {
                    id: vertices.len() as VertexId,
                    kind,
                    fanins,
                    name: net.clone(),
                }));
            }
            Def::Latch { input } => {
                let d = resolve(input)?;
                vertices.push(Some(Vertex {
                    id: vertices.len() as VertexId,
                    kind: VertexKind::Gate(GateKind::Dff),
                    fanins: vec![d],
                    name: net.clone(),
                }));
            }
            Def::CellLut { kind_is_cpi, elem, inputs } => {
                let fanins = inputs
                    .iter()
                    .map(|n| resolve(n))
                    .collect::<Result<Vec<_>, _>>()?;
                let width = inputs.len() as u8;
                let kind = if *kind_is_cpi {
                    VertexKind::Cpi { width, elem: *elem }
                } else {
                    VertexKind::Clut { width, elem: *elem }
                };
                vertices.push(Some(Vertex {
                    id: vertices.len() as VertexId,
                    kind,
                    fanins,
                    name: net.clone(),
                }));
            }
            Def::CellCsb { elem, inputs, comb_net, source_ff } => {
                let fanins = inputs
                    .iter()
                    .map(|n| resolve(n))
                    .collect::<Result<Vec<_>, _>>()?;
                let core_id = vertices.len() as VertexId;
                vertices.push(Some(Vertex {
                    id: core_id,
                    kind: VertexKind::CsbCore { width: inputs.len() as u8, elem: *elem },
                    fanins,
                    name: comb_net.clone(),
                }));
                vertices.push(Some(Vertex {
                    id: core_id + 1,
                    kind: VertexKind::CsbReg { elem: *elem, source_ff: source_ff.clone() },
                    fanins: vec![core_id],
                    name: net.clone(),
                }));
            }
        }
    }
    for (net, _line) in &outputs {
        let d = resolve(net)?;
        vertices.push(Some(Vertex {
            id: vertices.len() as VertexId,
            kind: VertexKind::Output,
            fanins: vec![d],
            name: net.clone(),
        }));
    }

    Ok(Hypergraph::from_parts(model, vertices)?)
}

fn table_from_cover(
    width: usize,
    rows: &[(String, char)],
    line: usize,
) -> Result<VertexKind, ParseError> {
    if width == 0 {
        return match rows {
            [] => Ok(VertexKind::Gate(GateKind::Const0)),
            [(_, '1')] => Ok(VertexKind::Gate(GateKind::Const1)),
            [(_, '0')] => Ok(VertexKind::Gate(GateKind::Const0)),
            _ => Err(syntax(line, "constant cover may have at most one row")),
        };
    }
    let lit = rows.first().map(|(_, l)| *l).unwrap_or('1');
    if rows.iter().any(|(_, l)| *l != lit) {
        return Err(syntax(line, "cover rows mix output literals"));
    }
    let mut covered: u64 = 0;
    for k in 0..(1u64 << width) {
        let matched = rows.iter().any(|(pat, _)| {
            pat.chars().enumerate().all(|(j, c)| match c {
                '-' => true,
                '1' => (k >> j) & 1 == 1,
                '0' => (k >> j) & 1 == 0,
                _ => unreachable!(),
            })
        });
        if matched {
            covered |= 1 << k;
        }
    }
    let n_bits = 1usize << width;
    let mask = if n_bits == 64 { u64::MAX } else { (1u64 << n_bits) - 1 };
    let bits = if lit == '1' { covered } else { !covered & mask };
    Ok(VertexKind::Gate(GateKind::Table { width: width as u8, bits }))
}

/// Truth-table bits for any combinational gate kind.
fn gate_bits(kind: &GateKind) -> (usize, u64) {
    let w = kind.arity();
    let mut bits: u64 = 0;
    for k in 0..(1usize << w) {
        let inputs: Vec<bool> = (0..w).map(|j| (k >> j) & 1 == 1).collect();
        if kind.eval(&inputs) {
            bits |= 1 << k;
        }
    }
    (w, bits)
}

pub fn serialize(g: &Hypergraph) -> Result<String, SerializeError> {
    // Name uniqueness among net-defining vertices.
    let mut seen = std::collections::HashSet::new();
    for v in g.iter() {
        if v.kind == VertexKind::Output {
            continue;
        }
        if !seen.insert(v.name.as_str()) {
            return Err(SerializeError::DuplicateName(v.name.clone()));
        }
    }
    let mut out = String::new();
    writeln!(out, ".model {}", g.name()).unwrap();
    let pis: Vec<&str> = g.pi_ids().iter().map(|&i| g.vertex(i).name.as_str()).collect();
    if !pis.is_empty() {
        writeln!(out, ".inputs {}", pis.join(" ")).unwrap();
    }
    let mut po_names = Vec::new();
    for &po in &g.po_ids() {
        let v = g.vertex(po);
        let driver = g.vertex(v.fanins[0]);
        if driver.name != v.name {
            return Err(SerializeError::PoNameMismatch {
                port: v.name.clone(),
                net: driver.name.clone(),
            });
        }
        po_names.push(v.name.as_str());
    }
    if !po_names.is_empty() {
        writeln!(out, ".outputs {}", po_names.join(" ")).unwrap();
    }

    for v in g.iter() {
        match &v.kind {
            VertexKind::Input | VertexKind::Output | VertexKind::CsbReg { .. } => {}
            VertexKind::ConfigBit { .. } => {
                return Err(SerializeError::Unrepresentable(v.name.clone()))
            }
            VertexKind::Gate(GateKind::Dff) => {
                let d = g.vertex(v.fanins[0]);
                writeln!(out, ".latch {} {}", d.name, v.name).unwrap();
            }
            VertexKind::Gate(k) => {
                let (w, bits) = gate_bits(k);
                let ins: Vec<&str> =
                    v.fanins.iter().map(|&f| g.vertex(f).name.as_str()).collect();
                if w == 0 {
                    writeln!(out, ".names {}", v.name).unwrap();
                    if bits & 1 == 1 {
                        writeln!(out, "1").unwrap();
                    }
                } else {
                    writeln!(out, ".names {} {}", ins.join(" "), v.name).unwrap();
                    for k in 0..(1usize << w) {
                        if (bits >> k) & 1 == 1 {
                            let pat: String =
                                (0..w).map(|j| if (k >> j) & 1 == 1 { '1' } else { '0' }).collect();
                            writeln!(out, "{pat} 1").unwrap();
                        }
                    }
                }
            }
            VertexKind::Clut { elem, width } | VertexKind::Cpi { elem, width } => {
                let kind = if matches!(v.kind, VertexKind::Cpi { .. }) { "CPI" } else { "CLUT" };
                let ins: Vec<&str> =
                    v.fanins.iter().map(|&f| g.vertex(f).name.as_str()).collect();
                writeln!(out, ".cell {kind}{width} {elem} {} {}", ins.join(" "), v.name).unwrap();
            }
            VertexKind::CsbCore { elem, width } => {
                // The registered half is emitted on the same line.
                let reg = g
                    .fanouts(v.id)
                    .iter()
                    .copied()
                    .find(|&c| matches!(g.vertex(c).kind, VertexKind::CsbReg { .. }))
                    .expect("CSB core has its register");
                let regv = g.vertex(reg);
                let ins: Vec<&str> =
                    v.fanins.iter().map(|&f| g.vertex(f).name.as_str()).collect();
                let ff = match &regv.kind {
                    VertexKind::CsbReg { source_ff: Some(n), .. } => format!(" ff={n}"),
                    _ => String::new(),
                };
                writeln!(
                    out,
                    ".cell CSB{width} {elem} {} {} {}{ff}",
                    ins.join(" "),
                    regv.name,
                    v.name
                )
                .unwrap();
            }
        }
    }
    writeln!(out, ".end").unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::ParseError;

    #[test]
    fn and_table_from_cover() {
        let g = parse(".model t\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n").unwrap();
        let y = g.po_ids()[0];
        let and = g.vertex(g.vertex(y).fanins[0]);
        assert_eq!(and.kind, VertexKind::Gate(GateKind::Table { width: 2, bits: 0b1000 }));
    }

    #[test]
    fn zero_literal_cover_complements() {
        // y = 0 exactly when a=1,b=1 -> NAND.
        let g = parse(".model t\n.inputs a b\n.outputs y\n.names a b y\n11 0\n.end\n").unwrap();
        let y = g.po_ids()[0];
        let nand = g.vertex(g.vertex(y).fanins[0]);
        assert_eq!(nand.kind, VertexKind::Gate(GateKind::Table { width: 2, bits: 0b0111 }));
    }

    #[test]
    fn sequential_feedback_ring_is_accepted() {
        let text = ".model ring\n.outputs q\n.latch n q\n.names q n\n0 1\n.end\n";
        let g = parse(text).unwrap();
        assert!(g.is_sequential());
        assert!(g.topological_order().is_ok());
    }

    #[test]
    fn multiply_driven_net_rejected() {
        let text = ".model m\n.inputs a\n.outputs y\n.names a y\n1 1\n.names a y\n0 1\n.end\n";
        match parse(text) {
            Err(ParseError::MultiplyDriven { net, .. }) => assert_eq!(net, "y"),
            other => panic!("expected multiply-driven, got {other:?}"),
        }
    }

    #[test]
    fn undriven_net_rejected() {
        let text = ".model m\n.inputs a\n.outputs y\n.names a ghost y\n11 1\n.end\n";
        match parse(text) {
            Err(ParseError::Undriven(n)) => assert_eq!(n, "ghost"),
            other => panic!("expected undriven, got {other:?}"),
        }
    }

    #[test]
    fn wide_table_rejected() {
        let text = ".model m\n.inputs a b c d e f g\n.outputs y\n.names a b c d e f g y\n1111111 1\n.end\n";
        assert!(matches!(parse(text), Err(ParseError::UnsupportedArity { got: 7, .. })));
    }

    #[test]
    fn combinational_cycle_rejected() {
        let text = ".model m\n.inputs a\n.outputs y\n.names a y x\n11 1\n.names x y\n1 1\n.end\n";
        assert!(matches!(parse(text), Err(ParseError::Graph(_))));
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let text = ".model t\n.inputs a b c\n.outputs s q\n.names a b x\n10 1\n01 1\n.names x c s\n11 1\n.latch s q 0\n.end\n";
        let g = parse(text).unwrap();
        let s1 = serialize(&g).unwrap();
        let g2 = parse(&s1).unwrap();
        let s2 = serialize(&g2).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(g.len(), g2.len());
    }

    #[test]
    fn fabric_cells_round_trip() {
        let text = ".model r\n.inputs a b\n.outputs y\n.cell CLUT2 0 a b n1\n.cell CSB2 1 n1 a q1 c1 ff=q_orig\n.cell CPI2 2 q1 b y\n.end\n";
        let g = parse(text).unwrap();
        assert!(g.contains_fabric());
        let s1 = serialize(&g).unwrap();
        assert_eq!(s1, text);
        let g2 = parse(&s1).unwrap();
        assert_eq!(serialize(&g2).unwrap(), s1);
    }
}
