//! Programmable-fabric primitives and their bit-level laws.
//!
//! Three cell families implement redacted logic:
//!
//! * **CLUT** — an s-input look-up table programmed by `2^s` bits;
//! * **CSB** — a CLUT feeding a data flip-flop, with the registered output
//!   and optionally the combinational one exposed;
//! * **CPI** — a programmable mux hiding which of its legs is functional,
//!   programmed by `ceil(log2 n)` select bits.
//!
//! Truth tables are stored least-significant-input-first: bit `k` is the
//! output for the assignment where input `j` carries bit `j` of `k`.
//! Expansion to standard cells uses a complete 2:1-mux tree whose root
//! selects on the most significant input and whose leaves are
//! configuration-register bits in minterm order.

use thiserror::Error;

use crate::gate::GateKind;
use crate::graph::{Hypergraph, NameAllocator, VertexId, VertexKind};

#[derive(Debug, Error)]
pub enum FabricError {
    #[error("cone support {got} exceeds the {cap}-input cap")]
    SupportTooLarge { got: usize, cap: usize },
    #[error("bit vector length {bits} does not match {inputs} inputs")]
    LengthMismatch { bits: usize, inputs: usize },
    #[error("select index {index} outside {legs} legs")]
    SelectOutOfRange { index: usize, legs: usize },
    #[error("element {elem} has no bitstream segment")]
    MissingSegment { elem: u32 },
    #[error("segment for element {elem} has {got} bits, cell needs {want}")]
    SegmentWidth { elem: u32, got: usize, want: usize },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Whether an element input participates in the programmed function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Functional,
    Dummy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementKind {
    Clut,
    Csb {
        /// The registered output carries the redacted flip-flop's function.
        /// When false the flip-flop is a decoy and may only feed dummy
        /// bindings.
        reg_functional: bool,
        /// Original flip-flop name, for blocks that replaced one.
        source_ff: Option<String>,
        /// Conversion provenance: built from a CLUT during decoy placement.
        from_clut: bool,
    },
    Cpi,
}

/// One fabric cell plus the bookkeeping the pipeline and the metrics need.
#[derive(Debug, Clone)]
pub struct Element {
    /// Creation-ordered id; also the bitstream chain position.
    pub id: u32,
    pub kind: ElementKind,
    /// The combinational vertex (CLUT table, CSB core, or CPI mux).
    pub comb_vertex: VertexId,
    /// The registered-output vertex for CSBs.
    pub reg_vertex: Option<VertexId>,
    /// Truth table for CLUT/CSB; for a CPI this is empty and the programmed
    /// select lives in `select_index`.
    pub bits: Vec<bool>,
    /// Per-input role, parallel to the cell vertex's fanins.
    pub roles: Vec<Role>,
    /// CPI only: which leg is functional.
    pub select_index: usize,
    /// Width at construction time, before any dummy expansion.
    pub base_width: u8,
    /// Dummy inputs added after construction.
    pub dummies_added: u8,
    /// Output inversion applied (and absorbed by consumers).
    pub output_inverted: bool,
}

impl Element {
    pub fn width(&self) -> usize {
        self.roles.len()
    }

    pub fn is_lut_like(&self) -> bool {
        !matches!(self.kind, ElementKind::Cpi)
    }

    /// Select bits, least significant first, for a CPI of this width.
    pub fn select_bits(&self) -> Vec<bool> {
        let n = select_bit_count(self.width());
        (0..n).map(|j| (self.select_index >> j) & 1 == 1).collect()
    }

    pub fn segment(&self) -> BitSegment {
        match self.kind {
            ElementKind::Cpi => BitSegment {
                elem: self.id,
                kind: SegmentKind::Cpi,
                width: self.width() as u16,
                bits: self.select_bits(),
            },
            ElementKind::Clut => BitSegment {
                elem: self.id,
                kind: SegmentKind::Clut,
                width: self.width() as u16,
                bits: self.bits.clone(),
            },
            ElementKind::Csb { .. } => BitSegment {
                elem: self.id,
                kind: SegmentKind::Csb,
                width: self.width() as u16,
                bits: self.bits.clone(),
            },
        }
    }
}

/// Number of select bits for an n-leg interconnect mux.
pub fn select_bit_count(legs: usize) -> usize {
    debug_assert!(legs >= 1);
    (usize::BITS - (legs - 1).leading_zeros()) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Clut = 0,
    Csb = 1,
    Cpi = 2,
}

impl SegmentKind {
    pub fn label(self) -> &'static str {
        match self {
            SegmentKind::Clut => "CLUT",
            SegmentKind::Csb => "CSB",
            SegmentKind::Cpi => "CPI",
        }
    }
}

/// One element's slice of the functional bitstream. For CLUT/CSB the bits
/// are the truth table; for a CPI they are the select, LSB first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSegment {
    pub elem: u32,
    pub kind: SegmentKind,
    /// Cell input count (the bit count follows from it).
    pub width: u16,
    pub bits: Vec<bool>,
}

impl BitSegment {
    pub fn expected_len(&self) -> usize {
        match self.kind {
            SegmentKind::Clut | SegmentKind::Csb => 1usize << self.width,
            SegmentKind::Cpi => select_bit_count(self.width as usize),
        }
    }
}

/// Exhaustively evaluates a combinational cone and returns its truth table
/// over `input_order` (input 0 is the least significant index bit).
pub fn encode_truth_table(
    g: &Hypergraph,
    root: VertexId,
    members: &std::collections::BTreeSet<VertexId>,
    input_order: &[VertexId],
) -> Result<Vec<bool>, FabricError> {
    let cap = crate::gate::MAX_TABLE_WIDTH as usize;
    if input_order.len() > cap {
        return Err(FabricError::SupportTooLarge { got: input_order.len(), cap });
    }
    // Member evaluation order: ascending topological position, computed
    // locally (members form a DAG under the graph's edges).
    let order = {
        let mut order: Vec<VertexId> = Vec::with_capacity(members.len());
        let mut placed: std::collections::HashSet<VertexId> = input_order.iter().copied().collect();
        let mut pending: Vec<VertexId> = members.iter().copied().collect();
        while !pending.is_empty() {
            let before = pending.len();
            pending.retain(|&m| {
                let ready = g
                    .vertex(m)
                    .fanins
                    .iter()
                    .all(|f| placed.contains(f) || !members.contains(f));
                if ready {
                    order.push(m);
                    placed.insert(m);
                }
                !ready
            });
            assert!(pending.len() < before, "cone members form a cycle");
        }
        order
    };
    let n = input_order.len();
    let mut bits = vec![false; 1 << n];
    let mut values: std::collections::HashMap<VertexId, bool> = std::collections::HashMap::new();
    for k in 0..(1usize << n) {
        values.clear();
        for (j, &v) in input_order.iter().enumerate() {
            values.insert(v, (k >> j) & 1 == 1);
        }
        for &m in &order {
            let v = g.vertex(m);
            let ins: Vec<bool> = v
                .fanins
                .iter()
                .map(|f| *values.get(f).expect("cone leaves are in input_order"))
                .collect();
            let kind = match &v.kind {
                VertexKind::Gate(k) => k,
                other => panic!("cone member {other:?} is not a gate"),
            };
            values.insert(m, kind.eval(&ins));
        }
        bits[k] = *values.get(&root).expect("root evaluated");
    }
    Ok(bits)
}

/// Look-up-table semantics: `bits[sum(v_j * 2^j)]`.
pub fn clut_eval(bits: &[bool], inputs: &[bool]) -> Result<bool, FabricError> {
    if bits.len() != 1usize << inputs.len() {
        return Err(FabricError::LengthMismatch { bits: bits.len(), inputs: inputs.len() });
    }
    let mut k = 0usize;
    for (j, &v) in inputs.iter().enumerate() {
        if v {
            k |= 1 << j;
        }
    }
    Ok(bits[k])
}

/// Interconnect-mux semantics: pass the leg the select bits index.
pub fn cpi_eval(select_bits: &[bool], inputs: &[bool]) -> Result<bool, FabricError> {
    if select_bits.len() != select_bit_count(inputs.len()) {
        return Err(FabricError::LengthMismatch {
            bits: select_bits.len(),
            inputs: inputs.len(),
        });
    }
    let mut index = 0usize;
    for (j, &b) in select_bits.iter().enumerate() {
        if b {
            index |= 1 << j;
        }
    }
    if index >= inputs.len() {
        return Err(FabricError::SelectOutOfRange { index, legs: inputs.len() });
    }
    Ok(inputs[index])
}

/// Input-space expansion kernel: doubles the table by inserting a new input
/// at `position` whose two cofactors are both the original function.
pub fn extend_with_dummy(bits: &[bool], position: usize) -> Vec<bool> {
    let width = bits.len().trailing_zeros() as usize;
    assert!(bits.len().is_power_of_two());
    assert!(position <= width, "insert position {position} beyond width {width}");
    let low_mask = (1usize << position) - 1;
    (0..bits.len() * 2)
        .map(|k| {
            let low = k & low_mask;
            let high = k >> (position + 1);
            bits[(high << position) | low]
        })
        .collect()
}

/// Functional-space expansion kernel: rewrites the table for a physical
/// input reordering. `perm[old] = new` position; the programmed cell with
/// its wiring reordered the same way computes the identical function.
pub fn permute_bits(bits: &[bool], perm: &[usize]) -> Vec<bool> {
    let width = bits.len().trailing_zeros() as usize;
    assert_eq!(perm.len(), width);
    let mut out = vec![false; bits.len()];
    for (k, out_slot) in out.iter_mut().enumerate() {
        // Gather: bit at old position j of the source index comes from the
        // new position perm[j] of k.
        let mut src = 0usize;
        for (j, &p) in perm.iter().enumerate() {
            if (k >> p) & 1 == 1 {
                src |= 1 << j;
            }
        }
        *out_slot = bits[src];
    }
    out
}

/// Output-inversion kernel.
pub fn invert_bits(bits: &[bool]) -> Vec<bool> {
    bits.iter().map(|b| !b).collect()
}

/// Consumer-side compensation for an inverted input: swap the cofactors
/// along `position`.
pub fn swap_cofactors(bits: &[bool], position: usize) -> Vec<bool> {
    (0..bits.len())
        .map(|k| bits[k ^ (1usize << position)])
        .collect()
}

/// Drops every input whose two cofactors are equal, producing the canonical
/// function over the remaining inputs. Returns `(reduced_bits, kept_old_positions)`.
pub fn strip_mute_inputs(bits: &[bool]) -> (Vec<bool>, Vec<usize>) {
    let width = bits.len().trailing_zeros() as usize;
    let mut cur = bits.to_vec();
    let mut kept: Vec<usize> = (0..width).collect();
    let mut j = 0;
    while j < kept.len() {
        let mute = (0..cur.len()).all(|k| cur[k] == cur[k ^ (1 << j)]);
        if mute {
            // Restrict to the j=0 cofactor.
            let low_mask = (1usize << j) - 1;
            cur = (0..cur.len() / 2)
                .map(|k| cur[((k >> j) << (j + 1)) | (k & low_mask)])
                .collect();
            kept.remove(j);
        } else {
            j += 1;
        }
    }
    (cur, kept)
}

/// Gate-level expansion of every fabric cell in `g`: CLUT/CSB cores become
/// complete 2:1-mux trees with config-bit leaves, CSB registered outputs
/// become data flip-flops, CPIs become mux trees with select config bits.
/// Config bits are loaded from `segments` when present, zero otherwise.
pub fn expand_netlist(
    g: &Hypergraph,
    segments: &[BitSegment],
) -> Result<Hypergraph, FabricError> {
    let seg_of: std::collections::BTreeMap<u32, &BitSegment> =
        segments.iter().map(|s| (s.elem, s)).collect();
    let mut out = g.clone();
    let mut names = NameAllocator::from_graph(g);
    let fabric_combs: Vec<VertexId> = g
        .iter()
        .filter(|v| {
            matches!(
                v.kind,
                VertexKind::Clut { .. } | VertexKind::CsbCore { .. } | VertexKind::Cpi { .. }
            )
        })
        .map(|v| v.id)
        .collect();
    for id in fabric_combs {
        let v = out.vertex(id).clone();
        let elem = v.kind.elem_id().expect("fabric vertex");
        let seg = seg_of.get(&elem).copied();
        let mut counter = 0u64;
        let mut cfg = |out: &mut Hypergraph, names: &mut NameAllocator, value: bool| {
            let name = names.fresh(&format!("cfg{elem}_"), counter);
            counter += 1;
            out.add_vertex(VertexKind::ConfigBit { value }, vec![], name)
                .expect("config bit")
        };
        let root = match &v.kind {
            VertexKind::Clut { width, .. } | VertexKind::CsbCore { width, .. } => {
                let want = 1usize << *width;
                if let Some(s) = seg {
                    if s.bits.len() != want {
                        return Err(FabricError::SegmentWidth {
                            elem,
                            got: s.bits.len(),
                            want,
                        });
                    }
                }
                let leaves: Vec<VertexId> = (0..want)
                    .map(|k| {
                        let value = seg.map(|s| s.bits[k]).unwrap_or(false);
                        cfg(&mut out, &mut names, value)
                    })
                    .collect();
                let mut mux_counter = 0u64;
                build_mux_tree(&mut out, &mut names, elem, &v.fanins, &leaves, &mut mux_counter)
            }
            VertexKind::Cpi { width, .. } => {
                let nsel = select_bit_count(*width as usize);
                if let Some(s) = seg {
                    if s.bits.len() != nsel {
                        return Err(FabricError::SegmentWidth {
                            elem,
                            got: s.bits.len(),
                            want: nsel,
                        });
                    }
                }
                let sels: Vec<VertexId> = (0..nsel)
                    .map(|j| {
                        let value = seg.map(|s| s.bits[j]).unwrap_or(false);
                        cfg(&mut out, &mut names, value)
                    })
                    .collect();
                // Pad legs to a power of two by repeating the last leg.
                let mut legs = v.fanins.clone();
                while !legs.len().is_power_of_two() {
                    legs.push(*legs.last().unwrap());
                }
                let mut mux_counter = 0u64;
                build_leg_tree(&mut out, &mut names, elem, &legs, &sels, &mut mux_counter)
            }
            _ => unreachable!(),
        };
        // The tree root takes over the cell's net.
        let name = v.name.clone();
        out.rewire_consumers(id, root, &[]);
        out.remove_vertex(id)?;
        out.rename_vertex(root, name);
    }
    // Registered CSB outputs become plain data flip-flops.
    let regs: Vec<VertexId> = out
        .iter()
        .filter(|v| matches!(v.kind, VertexKind::CsbReg { .. }))
        .map(|v| v.id)
        .collect();
    for id in regs {
        out.set_kind(id, VertexKind::Gate(GateKind::Dff));
    }
    debug_assert!(out.check().is_ok());
    Ok(out)
}

/// Complete mux tree over table leaves; input `fanins[level]` selects at
/// tree depth `width-1-level` (the root selects on the last input).
fn build_mux_tree(
    g: &mut Hypergraph,
    names: &mut NameAllocator,
    elem: u32,
    fanins: &[VertexId],
    leaves: &[VertexId],
    counter: &mut u64,
) -> VertexId {
    if leaves.len() == 1 {
        return leaves[0];
    }
    let half = leaves.len() / 2;
    let level = fanins.len() - 1;
    let lo = build_mux_tree(g, names, elem, &fanins[..level], &leaves[..half], counter);
    let hi = build_mux_tree(g, names, elem, &fanins[..level], &leaves[half..], counter);
    let name = names.fresh(&format!("m{elem}_"), *counter);
    *counter += 1;
    g.add_vertex(VertexKind::Gate(GateKind::Mux2), vec![fanins[level], lo, hi], name)
        .expect("mux vertex")
}

/// Mux tree over interconnect legs (power-of-two count), selected by config
/// bits, most significant at the root.
fn build_leg_tree(
    g: &mut Hypergraph,
    names: &mut NameAllocator,
    elem: u32,
    legs: &[VertexId],
    sels: &[VertexId],
    counter: &mut u64,
) -> VertexId {
    if legs.len() == 1 {
        return legs[0];
    }
    let half = legs.len() / 2;
    let level = sels.len() - 1;
    let lo = build_leg_tree(g, names, elem, &legs[..half], &sels[..level], counter);
    let hi = build_leg_tree(g, names, elem, &legs[half..], &sels[..level], counter);
    let name = names.fresh(&format!("m{elem}_"), *counter);
    *counter += 1;
    g.add_vertex(VertexKind::Gate(GateKind::Mux2), vec![sels[level], lo, hi], name)
        .expect("mux vertex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn bits_from(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn bits_string(b: &[bool]) -> String {
        b.iter().map(|&x| if x { '1' } else { '0' }).collect()
    }

    /// Independent oracle for the 3-input sample function
    /// `o = (!i2 & i1) ^ i0`, evaluated directly.
    fn sample3(i0: bool, i1: bool, i2: bool) -> bool {
        ((!i2) & i1) ^ i0
    }

    fn sample3_bits() -> Vec<bool> {
        (0..8)
            .map(|k| sample3(k & 1 == 1, (k >> 1) & 1 == 1, (k >> 2) & 1 == 1))
            .collect()
    }

    #[test]
    fn encode_and2() {
        let mut g = Hypergraph::new("t");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let b = g.add_vertex(VertexKind::Input, vec![], "b").unwrap();
        let y = g
            .add_vertex(VertexKind::Gate(GateKind::And(2)), vec![a, b], "y")
            .unwrap();
        let members: BTreeSet<VertexId> = [y].into_iter().collect();
        let bits = encode_truth_table(&g, y, &members, &[a, b]).unwrap();
        assert_eq!(bits_string(&bits), "0001");
    }

    #[test]
    fn encode_three_input_sample() {
        // o = (!i2 & i1) ^ i0 built from gates, order [i0, i1, i2].
        let mut g = Hypergraph::new("t");
        let i0 = g.add_vertex(VertexKind::Input, vec![], "i0").unwrap();
        let i1 = g.add_vertex(VertexKind::Input, vec![], "i1").unwrap();
        let i2 = g.add_vertex(VertexKind::Input, vec![], "i2").unwrap();
        let n2 = g.add_vertex(VertexKind::Gate(GateKind::Not), vec![i2], "n2").unwrap();
        let a = g
            .add_vertex(VertexKind::Gate(GateKind::And(2)), vec![n2, i1], "a")
            .unwrap();
        let o = g.add_vertex(VertexKind::Gate(GateKind::Xor), vec![a, i0], "o").unwrap();
        let members: BTreeSet<VertexId> = [n2, a, o].into_iter().collect();
        let bits = encode_truth_table(&g, o, &members, &[i0, i1, i2]).unwrap();
        assert_eq!(bits, sample3_bits());
        assert_eq!(bits_string(&bits), "01100101");
    }

    #[test]
    fn encode_constant_zero_cone() {
        let mut g = Hypergraph::new("t");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let z = g.add_vertex(VertexKind::Gate(GateKind::Const0), vec![], "z").unwrap();
        let y = g
            .add_vertex(VertexKind::Gate(GateKind::And(2)), vec![a, z], "y")
            .unwrap();
        let members: BTreeSet<VertexId> = [z, y].into_iter().collect();
        let bits = encode_truth_table(&g, y, &members, &[a]).unwrap();
        assert_eq!(bits, vec![false, false]);
    }

    #[test]
    fn clut_and_cpi_eval() {
        assert!(clut_eval(&bits_from("0001"), &[true, true]).unwrap());
        assert!(!clut_eval(&bits_from("0001"), &[true, false]).unwrap());
        // select=1 picks the second leg.
        assert!(!cpi_eval(&[true], &[true, false]).unwrap());
        assert!(cpi_eval(&[false], &[true, false]).unwrap());
        // Sample function, k=3 (i0=1, i1=1, i2=0) -> 0.
        assert!(!clut_eval(&sample3_bits(), &[true, true, false]).unwrap());
        assert!(clut_eval(&bits_from("01"), &[true, false]).is_err());
    }

    #[test]
    fn dummy_extension_doubles_and_preserves() {
        let and2 = bits_from("0001");
        let ext = extend_with_dummy(&and2, 2);
        assert_eq!(bits_string(&ext), "00010001");
        // Restricting the dummy to either value recovers AND2.
        for a in [false, true] {
            for b in [false, true] {
                for d in [false, true] {
                    assert_eq!(
                        clut_eval(&ext, &[a, b, d]).unwrap(),
                        clut_eval(&and2, &[a, b]).unwrap()
                    );
                }
            }
        }
        // Two insertions quadruple the size.
        let ext2 = extend_with_dummy(&ext, 0);
        assert_eq!(ext2.len(), 4 * and2.len());
    }

    #[test]
    fn permutation_matches_rewired_cell() {
        let bits = sample3_bits();
        let perm = [2usize, 0, 1]; // old j -> new perm[j]
        let permuted = permute_bits(&bits, &perm);
        // Wiring reordered the same way: logical input j now feeds pin perm[j].
        for k in 0..8usize {
            let logical = [k & 1 == 1, (k >> 1) & 1 == 1, (k >> 2) & 1 == 1];
            let mut pins = [false; 3];
            for (j, &p) in perm.iter().enumerate() {
                pins[p] = logical[j];
            }
            assert_eq!(
                clut_eval(&permuted, &pins).unwrap(),
                clut_eval(&bits, &logical).unwrap()
            );
        }
        // Identity permutation leaves bits unchanged.
        assert_eq!(permute_bits(&bits, &[0, 1, 2]), bits);
    }

    #[test]
    fn inversion_is_involutive_and_bounded() {
        let bits = sample3_bits();
        assert_eq!(invert_bits(&invert_bits(&bits)), bits);
        // All reorderings x inversion of the sample function: at most 12
        // distinct tables, every one functionally equivalent when the
        // wiring and the output phase are accounted for.
        let perms: Vec<Vec<usize>> = permutations(3);
        let mut distinct: BTreeSet<Vec<bool>> = BTreeSet::new();
        for p in &perms {
            for inv in [false, true] {
                let mut t = permute_bits(&bits, p);
                if inv {
                    t = invert_bits(&t);
                }
                // Equivalence under the physical interpretation.
                for k in 0..8usize {
                    let logical = [k & 1 == 1, (k >> 1) & 1 == 1, (k >> 2) & 1 == 1];
                    let mut pins = [false; 3];
                    for (j, &np) in p.iter().enumerate() {
                        pins[np] = logical[j];
                    }
                    let out = clut_eval(&t, &pins).unwrap() ^ inv;
                    assert_eq!(out, sample3(logical[0], logical[1], logical[2]));
                }
                distinct.insert(t);
            }
        }
        assert!(distinct.len() <= 12);
        assert_eq!(distinct.len(), 12);
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 1 {
            return vec![vec![0]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for slot in 0..n {
                let mut q: Vec<usize> =
                    p.iter().map(|&x| if x >= slot { x + 1 } else { x }).collect();
                q.push(slot);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn cofactor_swap_compensates_inversion() {
        let bits = sample3_bits();
        let swapped = swap_cofactors(&bits, 1);
        for k in 0..8usize {
            let ins = [k & 1 == 1, (k >> 1) & 1 == 1, (k >> 2) & 1 == 1];
            let inverted_in = [ins[0], !ins[1], ins[2]];
            assert_eq!(
                clut_eval(&swapped, &inverted_in).unwrap(),
                clut_eval(&bits, &ins).unwrap()
            );
        }
    }

    #[test]
    fn strip_mute_inputs_recovers_core_function() {
        let and2 = bits_from("0001");
        let ext = extend_with_dummy(&and2, 1);
        let ext = extend_with_dummy(&ext, 3);
        let (core, kept) = strip_mute_inputs(&ext);
        assert_eq!(core, and2);
        assert_eq!(kept, vec![0, 2]);
        let (c2, k2) = strip_mute_inputs(&and2);
        assert_eq!(c2, and2);
        assert_eq!(k2, vec![0, 1]);
    }

    #[test]
    fn expansion_counts() {
        // CLUT2 -> 3 muxes + 4 config bits; CLUT4 -> 15 + 16; CPI2 -> 1 + 1.
        for (width, muxes, cfgs) in [(2u8, 3usize, 4usize), (4, 15, 16)] {
            let mut g = Hypergraph::new("t");
            let ins: Vec<VertexId> = (0..width)
                .map(|i| g.add_vertex(VertexKind::Input, vec![], format!("i{i}")).unwrap())
                .collect();
            let l = g
                .add_vertex(VertexKind::Clut { width, elem: 0 }, ins, "l")
                .unwrap();
            g.add_vertex(VertexKind::Output, vec![l], "l").unwrap();
            let e = expand_netlist(&g, &[]).unwrap();
            let n_mux = e
                .iter()
                .filter(|v| v.kind == VertexKind::Gate(GateKind::Mux2))
                .count();
            let n_cfg = e
                .iter()
                .filter(|v| matches!(v.kind, VertexKind::ConfigBit { .. }))
                .count();
            assert_eq!((n_mux, n_cfg), (muxes, cfgs));
        }
        let mut g = Hypergraph::new("t");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let b = g.add_vertex(VertexKind::Input, vec![], "b").unwrap();
        let p = g
            .add_vertex(VertexKind::Cpi { width: 2, elem: 0 }, vec![a, b], "p")
            .unwrap();
        g.add_vertex(VertexKind::Output, vec![p], "p").unwrap();
        let e = expand_netlist(&g, &[]).unwrap();
        let n_mux = e.iter().filter(|v| v.kind == VertexKind::Gate(GateKind::Mux2)).count();
        let n_cfg = e.iter().filter(|v| matches!(v.kind, VertexKind::ConfigBit { .. })).count();
        assert_eq!((n_mux, n_cfg), (1, 1));
    }
}
