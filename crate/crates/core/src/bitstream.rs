//! Functional bitstream: assembly, serialization, and programming.
//!
//! Segments are chained in ascending element id, matching the order the
//! configuration shift registers are daisy-chained in. Two file forms:
//!
//! * text (`.bits`): one `elem kind width bits` line per segment, bits as a
//!   `0`/`1` string, least significant first;
//! * packed (`.bitsbin`): magic `FBS1`, version u16 LE, count u32 LE, then
//!   per segment `elem u32 LE, kind u8, width u16 LE, bit-count u32 LE,
//!   bits packed LSB-first and padded to a byte`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::fabric::{BitSegment, Element, SegmentKind};
use crate::gate::{GateKind, MAX_TABLE_WIDTH};
use crate::graph::{GraphError, Hypergraph, NameAllocator, VertexId, VertexKind};

const MAGIC: &[u8; 4] = b"FBS1";
const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum BitstreamError {
    #[error("bad magic (not a packed bitstream)")]
    BadMagic,
    #[error("unsupported bitstream version {0}")]
    BadVersion(u16),
    #[error("truncated bitstream file")]
    Truncated,
    #[error("trailing bytes after the last segment")]
    TrailingBytes,
    #[error("line {0}: malformed text segment")]
    BadTextLine(usize),
    #[error("segment {elem}: bit count {got} does not match width {width}")]
    LengthMismatch { elem: u32, width: u16, got: usize },
    #[error("segments out of chain order at element {0}")]
    ChainOrder(u32),
    #[error("duplicate segment for element {0}")]
    DuplicateSegment(u32),
    #[error("netlist cell {elem} has no bitstream segment")]
    MissingSegment { elem: u32 },
    #[error("segment {elem} is a {seg} but the netlist cell is a {cell}")]
    KindMismatch { elem: u32, seg: &'static str, cell: &'static str },
    #[error("segment {elem} width {seg} does not match cell width {cell}")]
    WidthMismatch { elem: u32, seg: u16, cell: u16 },
    #[error("cell select index {index} outside {legs} legs")]
    BadSelect { index: usize, legs: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bitstream {
    segments: Vec<BitSegment>,
}

impl Bitstream {
    /// Assembles the chain from elements in creation order.
    pub fn from_elements(elements: &[Element]) -> Bitstream {
        let mut segments: Vec<BitSegment> = elements.iter().map(Element::segment).collect();
        segments.sort_by_key(|s| s.elem);
        Bitstream { segments }
    }

    pub fn from_segments(mut segments: Vec<BitSegment>) -> Result<Bitstream, BitstreamError> {
        segments.sort_by_key(|s| s.elem);
        for pair in segments.windows(2) {
            if pair[0].elem == pair[1].elem {
                return Err(BitstreamError::DuplicateSegment(pair[0].elem));
            }
        }
        for s in &segments {
            if s.bits.len() != s.expected_len() {
                return Err(BitstreamError::LengthMismatch {
                    elem: s.elem,
                    width: s.width,
                    got: s.bits.len(),
                });
            }
        }
        Ok(Bitstream { segments })
    }

    pub fn segments(&self) -> &[BitSegment] {
        &self.segments
    }

    pub fn total_bits(&self) -> usize {
        self.segments.iter().map(|s| s.bits.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segment(&self, elem: u32) -> Option<&BitSegment> {
        self.segments
            .binary_search_by_key(&elem, |s| s.elem)
            .ok()
            .map(|i| &self.segments[i])
    }

    /// Text serialization; byte-deterministic.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.segments {
            let bits: String = s.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(out, "{} {} {} {}", s.elem, s.kind.label(), s.width, bits).unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Bitstream, BitstreamError> {
        let mut segments = Vec::new();
        let mut last: Option<u32> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 {
                return Err(BitstreamError::BadTextLine(i + 1));
            }
            let elem: u32 = toks[0].parse().map_err(|_| BitstreamError::BadTextLine(i + 1))?;
            let kind = match toks[1] {
                "CLUT" => SegmentKind::Clut,
                "CSB" => SegmentKind::Csb,
                "CPI" => SegmentKind::Cpi,
                _ => return Err(BitstreamError::BadTextLine(i + 1)),
            };
            let width: u16 = toks[2].parse().map_err(|_| BitstreamError::BadTextLine(i + 1))?;
            let bits: Vec<bool> = toks[3]
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(BitstreamError::BadTextLine(i + 1)),
                })
                .collect::<Result<_, _>>()?;
            if let Some(prev) = last {
                if elem <= prev {
                    return Err(BitstreamError::ChainOrder(elem));
                }
            }
            last = Some(elem);
            let seg = BitSegment { elem, kind, width, bits };
            if seg.bits.len() != seg.expected_len() {
                return Err(BitstreamError::LengthMismatch {
                    elem,
                    width,
                    got: seg.bits.len(),
                });
            }
            segments.push(seg);
        }
        Ok(Bitstream { segments })
    }

    /// Packed serialization; byte-deterministic.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.segments.len() as u32).to_le_bytes());
        for s in &self.segments {
            out.extend_from_slice(&s.elem.to_le_bytes());
            out.push(s.kind as u8);
            out.extend_from_slice(&s.width.to_le_bytes());
            out.extend_from_slice(&(s.bits.len() as u32).to_le_bytes());
            let mut byte = 0u8;
            for (i, &b) in s.bits.iter().enumerate() {
                if b {
                    byte |= 1 << (i % 8);
                }
                if i % 8 == 7 {
                    out.push(byte);
                    byte = 0;
                }
            }
            if s.bits.len() % 8 != 0 {
                out.push(byte);
            }
        }
        out
    }

    pub fn parse_packed(bytes: &[u8]) -> Result<Bitstream, BitstreamError> {
        let mut at = 0usize;
        let take = |at: &mut usize, n: usize| -> Result<&[u8], BitstreamError> {
            if *at + n > bytes.len() {
                return Err(BitstreamError::Truncated);
            }
            let s = &bytes[*at..*at + n];
            *at += n;
            Ok(s)
        };
        if take(&mut at, 4)? != MAGIC {
            return Err(BitstreamError::BadMagic);
        }
        let version = u16::from_le_bytes(take(&mut at, 2)?.try_into().unwrap());
        if version != VERSION {
            return Err(BitstreamError::BadVersion(version));
        }
        let count = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap());
        let mut segments = Vec::with_capacity(count as usize);
        let mut last: Option<u32> = None;
        for _ in 0..count {
            let elem = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap());
            let kind = match take(&mut at, 1)?[0] {
                0 => SegmentKind::Clut,
                1 => SegmentKind::Csb,
                2 => SegmentKind::Cpi,
                _ => return Err(BitstreamError::BadMagic),
            };
            let width = u16::from_le_bytes(take(&mut at, 2)?.try_into().unwrap());
            let nbits = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
            let seg = BitSegment { elem, kind, width, bits: Vec::new() };
            if nbits != seg.expected_len() {
                return Err(BitstreamError::LengthMismatch { elem, width, got: nbits });
            }
            let raw = take(&mut at, nbits.div_ceil(8))?;
            let bits: Vec<bool> = (0..nbits).map(|i| (raw[i / 8] >> (i % 8)) & 1 == 1).collect();
            if let Some(prev) = last {
                if elem <= prev {
                    return Err(BitstreamError::ChainOrder(elem));
                }
            }
            last = Some(elem);
            segments.push(BitSegment { bits, ..seg });
        }
        if at != bytes.len() {
            return Err(BitstreamError::TrailingBytes);
        }
        Ok(Bitstream { segments })
    }
}

/// Replaces every fabric cell in `netlist` with its programmed logical
/// function: lookup cells become truth-table gates (Shannon-split above the
/// table-width cap), registered outputs become plain flip-flops, and
/// interconnect muxes collapse to buffers of their selected leg. The result
/// simulates and is expected to be equivalent to the pre-redaction design.
pub fn program(netlist: &Hypergraph, bits: &Bitstream) -> Result<Hypergraph, BitstreamError> {
    let mut g = netlist.clone();
    let mut names = NameAllocator::from_graph(&g);
    let cells: Vec<VertexId> = g
        .iter()
        .filter(|v| {
            matches!(
                v.kind,
                VertexKind::Clut { .. } | VertexKind::CsbCore { .. } | VertexKind::Cpi { .. }
            )
        })
        .map(|v| v.id)
        .collect();
    for id in cells {
        let v = g.vertex(id).clone();
        let elem = v.kind.elem_id().expect("fabric cell");
        let seg = bits
            .segment(elem)
            .ok_or(BitstreamError::MissingSegment { elem })?;
        let (cell_kind, cell_width): (&'static str, u16) = match v.kind {
            VertexKind::Clut { width, .. } => ("CLUT", width as u16),
            VertexKind::CsbCore { width, .. } => ("CSB", width as u16),
            VertexKind::Cpi { width, .. } => ("CPI", width as u16),
            _ => unreachable!(),
        };
        let seg_ok = matches!(
            (seg.kind, cell_kind),
            (SegmentKind::Clut, "CLUT") | (SegmentKind::Csb, "CSB") | (SegmentKind::Cpi, "CPI")
        );
        if !seg_ok {
            return Err(BitstreamError::KindMismatch {
                elem,
                seg: seg.kind.label(),
                cell: cell_kind,
            });
        }
        if seg.width != cell_width {
            return Err(BitstreamError::WidthMismatch { elem, seg: seg.width, cell: cell_width });
        }
        match seg.kind {
            SegmentKind::Clut | SegmentKind::Csb => {
                resolve_table(&mut g, &mut names, id, &v.fanins, &seg.bits)?;
            }
            SegmentKind::Cpi => {
                let mut index = 0usize;
                for (j, &b) in seg.bits.iter().enumerate() {
                    if b {
                        index |= 1 << j;
                    }
                }
                if index >= v.fanins.len() {
                    return Err(BitstreamError::BadSelect { index, legs: v.fanins.len() });
                }
                let leg = v.fanins[index];
                g.reshape_vertex(id, VertexKind::Gate(GateKind::Buf), vec![leg]);
            }
        }
    }
    // Registered outputs are data flip-flops once programmed.
    let regs: Vec<VertexId> = g
        .iter()
        .filter(|v| matches!(v.kind, VertexKind::CsbReg { .. }))
        .map(|v| v.id)
        .collect();
    for id in regs {
        g.set_kind(id, VertexKind::Gate(GateKind::Dff));
    }
    debug_assert!(g.check().is_ok());
    Ok(g)
}

fn pack_bits(bits: &[bool]) -> u64 {
    let mut packed = 0u64;
    for (k, &b) in bits.iter().enumerate() {
        if b {
            packed |= 1 << k;
        }
    }
    packed
}

/// Rewrites vertex `id` into a table gate over `fanins`, Shannon-splitting
/// on the top input while the width exceeds the table cap.
fn resolve_table(
    g: &mut Hypergraph,
    names: &mut NameAllocator,
    id: VertexId,
    fanins: &[VertexId],
    bits: &[bool],
) -> Result<(), BitstreamError> {
    let width = fanins.len();
    if width <= MAX_TABLE_WIDTH as usize {
        g.reshape_vertex(
            id,
            VertexKind::Gate(GateKind::Table { width: width as u8, bits: pack_bits(bits) }),
            fanins.to_vec(),
        );
        return Ok(());
    }
    let half = bits.len() / 2;
    let sub = &fanins[..width - 1];
    let lo = cofactor_vertex(g, names, sub, &bits[..half])?;
    let hi = cofactor_vertex(g, names, sub, &bits[half..])?;
    g.reshape_vertex(
        id,
        VertexKind::Gate(GateKind::Mux2),
        vec![fanins[width - 1], lo, hi],
    );
    Ok(())
}

/// Builds a fresh vertex computing `bits` over `fanins`.
fn cofactor_vertex(
    g: &mut Hypergraph,
    names: &mut NameAllocator,
    fanins: &[VertexId],
    bits: &[bool],
) -> Result<VertexId, BitstreamError> {
    let width = fanins.len();
    if width <= MAX_TABLE_WIDTH as usize {
        let name = names.fresh("pg", 0);
        return Ok(g.add_vertex(
            VertexKind::Gate(GateKind::Table { width: width as u8, bits: pack_bits(bits) }),
            fanins.to_vec(),
            name,
        )?);
    }
    let half = bits.len() / 2;
    let sub = &fanins[..width - 1];
    let lo = cofactor_vertex(g, names, sub, &bits[..half])?;
    let hi = cofactor_vertex(g, names, sub, &bits[half..])?;
    let name = names.fresh("pg", 0);
    Ok(g.add_vertex(
        VertexKind::Gate(GateKind::Mux2),
        vec![fanins[width - 1], lo, hi],
        name,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fabric::{ElementKind, Role};

    fn seg(elem: u32, kind: SegmentKind, width: u16, bits: &str) -> BitSegment {
        BitSegment {
            elem,
            kind,
            width,
            bits: bits.chars().map(|c| c == '1').collect(),
        }
    }

    #[test]
    fn total_bits_arithmetic() {
        let b = Bitstream::from_segments(vec![
            seg(0, SegmentKind::Clut, 2, "0001"),
            seg(1, SegmentKind::Clut, 3, "01100101"),
            seg(2, SegmentKind::Cpi, 2, "1"),
        ])
        .unwrap();
        assert_eq!(b.total_bits(), 4 + 8 + 1);
    }

    #[test]
    fn empty_bitstream() {
        let b = Bitstream::from_elements(&[]);
        assert!(b.is_empty());
        assert_eq!(b.total_bits(), 0);
        assert_eq!(b.to_text(), "");
        assert_eq!(Bitstream::parse_text("").unwrap(), b);
    }

    #[test]
    fn text_line_format() {
        let b = Bitstream::from_segments(vec![seg(0, SegmentKind::Clut, 2, "0001")]).unwrap();
        assert_eq!(b.to_text(), "0 CLUT 2 0001\n");
        assert_eq!(Bitstream::parse_text(&b.to_text()).unwrap(), b);
    }

    #[test]
    fn packed_round_trip_and_tampering() {
        let b = Bitstream::from_segments(vec![
            seg(0, SegmentKind::Clut, 3, "01100101"),
            seg(1, SegmentKind::Csb, 2, "0111"),
            seg(2, SegmentKind::Cpi, 2, "1"),
        ])
        .unwrap();
        let bytes = b.to_packed();
        assert_eq!(Bitstream::parse_packed(&bytes).unwrap(), b);
        // Bad magic.
        let mut bad = bytes.clone();
        bad[0] ^= 0xFF;
        assert!(matches!(Bitstream::parse_packed(&bad), Err(BitstreamError::BadMagic)));
        // Truncation.
        assert!(matches!(
            Bitstream::parse_packed(&bytes[..bytes.len() - 1]),
            Err(BitstreamError::Truncated)
        ));
        // Tampered per-segment bit count.
        let mut bad2 = bytes.clone();
        bad2[4 + 2 + 4 + 4 + 1 + 2] ^= 0x01; // first segment's bit-count field
        assert!(matches!(
            Bitstream::parse_packed(&bad2),
            Err(BitstreamError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn program_resolves_cells_in_place() {
        // CLUT2 (AND) -> CPI2 -> PO, plus a CSB pass-through.
        let mut g = Hypergraph::new("t");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let b = g.add_vertex(VertexKind::Input, vec![], "b").unwrap();
        let l = g
            .add_vertex(VertexKind::Clut { width: 2, elem: 0 }, vec![a, b], "n")
            .unwrap();
        let c = g
            .add_vertex(VertexKind::Cpi { width: 2, elem: 1 }, vec![l, a], "y")
            .unwrap();
        g.add_vertex(VertexKind::Output, vec![c], "y").unwrap();
        let core = g
            .add_vertex(VertexKind::CsbCore { width: 2, elem: 2 }, vec![b, a], "qc")
            .unwrap();
        let q = g
            .add_vertex(VertexKind::CsbReg { elem: 2, source_ff: Some("q".into()) }, vec![core], "q")
            .unwrap();
        g.add_vertex(VertexKind::Output, vec![q], "q").unwrap();

        let bits = Bitstream::from_segments(vec![
            seg(0, SegmentKind::Clut, 2, "0001"),
            seg(1, SegmentKind::Cpi, 2, "0"),
            seg(2, SegmentKind::Csb, 2, "0101"), // pass-through of input 0
        ])
        .unwrap();
        let resolved = program(&g, &bits).unwrap();
        assert!(!resolved.contains_fabric());
        assert!(matches!(
            resolved.vertex(l).kind,
            VertexKind::Gate(GateKind::Table { width: 2, bits: 0b1000 })
        ));
        assert!(matches!(resolved.vertex(c).kind, VertexKind::Gate(GateKind::Buf)));
        assert_eq!(resolved.vertex(c).fanins, vec![l]);
        assert!(matches!(resolved.vertex(q).kind, VertexKind::Gate(GateKind::Dff)));

        // Missing segment.
        let short = Bitstream::from_segments(vec![seg(0, SegmentKind::Clut, 2, "0001")]).unwrap();
        assert!(matches!(
            program(&g, &short),
            Err(BitstreamError::MissingSegment { elem: 1 })
        ));
    }

    #[test]
    fn from_elements_orders_by_id() {
        let mk = |id: u32| Element {
            id,
            kind: ElementKind::Clut,
            comb_vertex: 0,
            reg_vertex: None,
            bits: vec![false, false, false, true],
            roles: vec![Role::Functional, Role::Functional],
            select_index: 0,
            base_width: 2,
            dummies_added: 0,
            output_inverted: false,
        };
        let b = Bitstream::from_elements(&[mk(2), mk(0), mk(1)]);
        let ids: Vec<u32> = b.segments().iter().map(|s| s.elem).collect();
        assert_eq!(ids, vec![0, 1, 2]);
    }
}
