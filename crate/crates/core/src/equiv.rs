//! Equivalence checking by simulation: exhaustive enumeration, random
//! vectors, and bounded sequential co-simulation. Ports are matched by
//! name; a mismatch verdict carries the first differing vector.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Hypergraph, VertexId};
use crate::rng::{Stage, StreamRng};
use crate::sim::{SimError, Simulator};

/// Default cap on primary inputs for the exhaustive path.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

#[derive(Debug, Error)]
pub enum EquivError {
    #[error("interface mismatch: {0}")]
    Interface(String),
    #[error("{0} primary inputs exceed the exhaustive cap of {1}")]
    TooWide(usize, usize),
    #[error("vector count must be nonzero")]
    NoVectors,
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Outcome of an equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    /// A primary-input vector (named, in checked order) on which some output
    /// differs; `cycle` is set by the sequential checker.
    Mismatch {
        inputs: Vec<(String, bool)>,
        output: String,
        cycle: Option<usize>,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }
}

struct Matched<'a> {
    sim_a: Simulator<'a>,
    sim_b: Simulator<'a>,
    /// Shared PI names (sorted) with per-design vector positions.
    pi_names: Vec<String>,
    a_pi_slots: Vec<usize>,
    b_pi_slots: Vec<usize>,
    /// Shared PO names (sorted) with per-design trace positions.
    po_names: Vec<String>,
    a_po_slots: Vec<usize>,
    b_po_slots: Vec<usize>,
}

fn port_index(g: &Hypergraph, ids: &[VertexId]) -> BTreeMap<String, usize> {
    ids.iter()
        .enumerate()
        .map(|(i, &id)| (g.vertex(id).name.clone(), i))
        .collect()
}

fn match_interfaces<'a>(a: &'a Hypergraph, b: &'a Hypergraph) -> Result<Matched<'a>, EquivError> {
    let sim_a = Simulator::new(a)?;
    let sim_b = Simulator::new(b)?;
    let a_pis = port_index(a, sim_a.pi_ids());
    let b_pis = port_index(b, sim_b.pi_ids());
    let a_pos = port_index(a, sim_a.po_ids());
    let b_pos = port_index(b, sim_b.po_ids());
    if a_pis.keys().ne(b_pis.keys()) {
        return Err(EquivError::Interface(format!(
            "input sets differ: [{}] vs [{}]",
            a_pis.keys().cloned().collect::<Vec<_>>().join(","),
            b_pis.keys().cloned().collect::<Vec<_>>().join(","),
        )));
    }
    if a_pos.keys().ne(b_pos.keys()) {
        return Err(EquivError::Interface(format!(
            "output sets differ: [{}] vs [{}]",
            a_pos.keys().cloned().collect::<Vec<_>>().join(","),
            b_pos.keys().cloned().collect::<Vec<_>>().join(","),
        )));
    }
    let pi_names: Vec<String> = a_pis.keys().cloned().collect();
    let po_names: Vec<String> = a_pos.keys().cloned().collect();
    Ok(Matched {
        a_pi_slots: pi_names.iter().map(|n| a_pis[n]).collect(),
        b_pi_slots: pi_names.iter().map(|n| b_pis[n]).collect(),
        a_po_slots: po_names.iter().map(|n| a_pos[n]).collect(),
        b_po_slots: po_names.iter().map(|n| b_pos[n]).collect(),
        pi_names,
        po_names,
        sim_a,
        sim_b,
    })
}

impl Matched<'_> {
    fn scatter(&self, named: &[bool], slots: &[usize], width: usize) -> Vec<bool> {
        let mut v = vec![false; width];
        for (i, &slot) in slots.iter().enumerate() {
            v[slot] = named[i];
        }
        v
    }

    /// Runs one combinational vector on both sides; returns the first
    /// differing output name, if any.
    fn compare_comb(&mut self, named: &[bool]) -> Result<Option<String>, EquivError> {
        let va = self.scatter(named, &self.a_pi_slots, self.a_pi_slots.len());
        let vb = self.scatter(named, &self.b_pi_slots, self.b_pi_slots.len());
        let oa = self.sim_a.simulate_comb(&va)?;
        let ob = self.sim_b.simulate_comb(&vb)?;
        for (i, name) in self.po_names.iter().enumerate() {
            if oa[self.a_po_slots[i]] != ob[self.b_po_slots[i]] {
                return Ok(Some(name.clone()));
            }
        }
        Ok(None)
    }

    fn mismatch(&self, named: &[bool], output: String, cycle: Option<usize>) -> Verdict {
        Verdict::Mismatch {
            inputs: self
                .pi_names
                .iter()
                .cloned()
                .zip(named.iter().copied())
                .collect(),
            output,
            cycle,
        }
    }
}

/// Exhaustive combinational equivalence over all `2^n` input vectors.
/// Registers (if any) are held in their zero reset state; this is the
/// defined equivalence for combinational designs whose redacted form
/// carries decoy flip-flops.
pub fn exhaustive_equiv(
    a: &Hypergraph,
    b: &Hypergraph,
    cap: usize,
) -> Result<Verdict, EquivError> {
    let mut m = match_interfaces(a, b)?;
    let n = m.pi_names.len();
    if n > cap {
        return Err(EquivError::TooWide(n, cap));
    }
    let mut named = vec![false; n];
    for k in 0..(1u64 << n) {
        for (j, slot) in named.iter_mut().enumerate() {
            *slot = (k >> j) & 1 == 1;
        }
        if let Some(output) = m.compare_comb(&named)? {
            return Ok(m.mismatch(&named, output, None));
        }
    }
    Ok(Verdict::Equivalent)
}

/// Random-vector combinational equivalence.
pub fn random_miter_equiv(
    a: &Hypergraph,
    b: &Hypergraph,
    n_vectors: usize,
    seed: u32,
) -> Result<Verdict, EquivError> {
    if n_vectors == 0 {
        return Err(EquivError::NoVectors);
    }
    let mut m = match_interfaces(a, b)?;
    let mut rng = StreamRng::new(seed, Stage::Verify);
    let n = m.pi_names.len();
    let mut named = vec![false; n];
    for _ in 0..n_vectors {
        for slot in named.iter_mut() {
            *slot = rng.bit();
        }
        if let Some(output) = m.compare_comb(&named)? {
            return Ok(m.mismatch(&named, output, None));
        }
    }
    Ok(Verdict::Equivalent)
}

/// Bounded sequential co-simulation from the zero state under shared random
/// stimuli. Reports the first cycle with any differing output.
pub fn seq_cosim_equiv(
    a: &Hypergraph,
    b: &Hypergraph,
    cycles: usize,
    seed: u32,
) -> Result<Verdict, EquivError> {
    if cycles == 0 {
        return Err(EquivError::NoVectors);
    }
    let mut m = match_interfaces(a, b)?;
    let mut rng = StreamRng::new(seed, Stage::Verify);
    let n = m.pi_names.len();
    let mut stimuli: Vec<Vec<bool>> = Vec::with_capacity(cycles);
    for _ in 0..cycles {
        stimuli.push((0..n).map(|_| rng.bit()).collect());
    }
    let stim_a: Vec<Vec<bool>> = stimuli
        .iter()
        .map(|s| m.scatter(s, &m.a_pi_slots, m.a_pi_slots.len()))
        .collect();
    let stim_b: Vec<Vec<bool>> = stimuli
        .iter()
        .map(|s| m.scatter(s, &m.b_pi_slots, m.b_pi_slots.len()))
        .collect();
    let trace_a = m.sim_a.simulate_seq(&stim_a)?;
    let trace_b = m.sim_b.simulate_seq(&stim_b)?;
    for c in 0..cycles {
        for (i, name) in m.po_names.iter().enumerate() {
            if trace_a[c][m.a_po_slots[i]] != trace_b[c][m.b_po_slots[i]] {
                return Ok(m.mismatch(&stimuli[c], name.clone(), Some(c)));
            }
        }
    }
    Ok(Verdict::Equivalent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_netlist, Format};

    fn blif(text: &str) -> Hypergraph {
        parse_netlist(text, Format::Blif).unwrap()
    }

    #[test]
    fn design_equivalent_to_itself() {
        let a = blif(".model m\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n");
        assert!(exhaustive_equiv(&a, &a, 20).unwrap().is_equivalent());
        assert!(seq_cosim_equiv(&a, &a, 16, 3).unwrap().is_equivalent());
    }

    #[test]
    fn and_vs_or_counterexample() {
        let a = blif(".model m\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n");
        let o = blif(".model m\n.inputs a b\n.outputs y\n.names a b y\n1- 1\n-1 1\n.end\n");
        match exhaustive_equiv(&a, &o, 20).unwrap() {
            Verdict::Mismatch { inputs, output, .. } => {
                assert_eq!(output, "y");
                // First differing assignment in enumeration order: a=1, b=0.
                assert_eq!(inputs, vec![("a".into(), true), ("b".into(), false)]);
            }
            v => panic!("expected mismatch, got {v:?}"),
        }
        assert!(!random_miter_equiv(&a, &o, 64, 1).unwrap().is_equivalent());
    }

    #[test]
    fn interface_mismatch_is_an_error() {
        let a = blif(".model m\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n");
        let c = blif(".model m\n.inputs a c\n.outputs y\n.names a c y\n11 1\n.end\n");
        assert!(matches!(exhaustive_equiv(&a, &c, 20), Err(EquivError::Interface(_))));
    }

    #[test]
    fn exhaustive_cap_enforced() {
        let a = blif(".model m\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n");
        assert!(matches!(exhaustive_equiv(&a, &a, 1), Err(EquivError::TooWide(2, 1))));
    }
}
