//! Levelized logic simulation.
//!
//! Registers update synchronously from an all-zero initial state; config
//! bits read as constants. Unprogrammed fabric cells cannot be evaluated —
//! program or expand the netlist first.

use thiserror::Error;

use crate::graph::{Hypergraph, VertexId, VertexKind};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("netlist contains unprogrammed fabric cell '{0}'")]
    Unprogrammed(String),
    #[error("stimulus vector has {got} bits, design has {want} inputs")]
    VectorWidth { got: usize, want: usize },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Reusable simulation context: pinned topological order and value store.
pub struct Simulator<'g> {
    g: &'g Hypergraph,
    order: Vec<VertexId>,
    pis: Vec<VertexId>,
    pos: Vec<VertexId>,
    regs: Vec<VertexId>,
    values: Vec<bool>,
    state: Vec<bool>,
}

impl<'g> Simulator<'g> {
    pub fn new(g: &'g Hypergraph) -> Result<Self, SimError> {
        if let Some(v) = g.iter().find(|v| {
            matches!(
                v.kind,
                VertexKind::Clut { .. } | VertexKind::CsbCore { .. } | VertexKind::Cpi { .. }
            )
        }) {
            return Err(SimError::Unprogrammed(v.name.clone()));
        }
        let order = g.topological_order()?;
        Ok(Simulator {
            g,
            order,
            pis: g.pi_ids(),
            pos: g.po_ids(),
            regs: g.ff_ids(),
            values: vec![false; g.id_bound()],
            state: vec![false; g.id_bound()],
        })
    }

    pub fn pi_ids(&self) -> &[VertexId] {
        &self.pis
    }

    pub fn po_ids(&self) -> &[VertexId] {
        &self.pos
    }

    /// Resets register state to all zero.
    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|b| *b = false);
    }

    /// One combinational evaluation with the current register state.
    /// `pi_vector` is in `pi_ids()` order.
    fn settle(&mut self, pi_vector: &[bool]) -> Result<(), SimError> {
        if pi_vector.len() != self.pis.len() {
            return Err(SimError::VectorWidth { got: pi_vector.len(), want: self.pis.len() });
        }
        for (&pi, &v) in self.pis.iter().zip(pi_vector) {
            self.values[pi as usize] = v;
        }
        // Registers may sort after their consumers (their output edges are
        // cut), so expose the state ahead of the combinational sweep.
        for &r in &self.regs {
            self.values[r as usize] = self.state[r as usize];
        }
        for &id in &self.order {
            let v = self.g.vertex(id);
            match &v.kind {
                VertexKind::Input => {}
                VertexKind::ConfigBit { value } => self.values[id as usize] = *value,
                VertexKind::Output => {
                    self.values[id as usize] = self.values[v.fanins[0] as usize]
                }
                k if k.is_register() => {}
                VertexKind::Gate(gk) => {
                    let mut ins = [false; 8];
                    for (j, &f) in v.fanins.iter().enumerate() {
                        ins[j] = self.values[f as usize];
                    }
                    self.values[id as usize] = gk.eval(&ins[..v.fanins.len()]);
                }
                other => unreachable!("unsimulatable kind {other:?}"),
            }
        }
        Ok(())
    }

    /// Advances every register to the value on its data input.
    fn tick(&mut self) {
        for &r in &self.regs {
            let d = self.g.vertex(r).fanins[0];
            self.state[r as usize] = self.values[d as usize];
        }
    }

    fn read_pos(&self) -> Vec<bool> {
        self.pos.iter().map(|&p| self.values[p as usize]).collect()
    }

    /// Value currently on a vertex's output net.
    pub fn value(&self, id: VertexId) -> bool {
        self.values[id as usize]
    }

    /// Combinational snapshot: zeroed registers, one settle, PO values in
    /// `po_ids()` order.
    pub fn simulate_comb(&mut self, pi_vector: &[bool]) -> Result<Vec<bool>, SimError> {
        self.reset();
        self.settle(pi_vector)?;
        Ok(self.read_pos())
    }

    /// Like `simulate_comb` but leaves internal net values readable.
    pub fn settle_comb(&mut self, pi_vector: &[bool]) -> Result<(), SimError> {
        self.reset();
        self.settle(pi_vector)
    }

    /// Synchronous simulation from the zero state: one settle + tick per
    /// cycle, returning the PO trace.
    pub fn simulate_seq(&mut self, stimuli: &[Vec<bool>]) -> Result<Vec<Vec<bool>>, SimError> {
        self.reset();
        let mut trace = Vec::with_capacity(stimuli.len());
        for vec in stimuli {
            self.settle(vec)?;
            trace.push(self.read_pos());
            self.tick();
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateKind;

    #[test]
    fn and_gate() {
        let mut g = Hypergraph::new("t");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let b = g.add_vertex(VertexKind::Input, vec![], "b").unwrap();
        let y = g.add_vertex(VertexKind::Gate(GateKind::And(2)), vec![a, b], "y").unwrap();
        g.add_vertex(VertexKind::Output, vec![y], "y").unwrap();
        let mut sim = Simulator::new(&g).unwrap();
        assert_eq!(sim.simulate_comb(&[true, true]).unwrap(), vec![true]);
        assert_eq!(sim.simulate_comb(&[true, false]).unwrap(), vec![false]);
    }

    #[test]
    fn one_bit_counter_trace() {
        // q' = !q, output q: cycles produce 0, 1, 0.
        let mut g = Hypergraph::new("t");
        let pi = g.add_vertex(VertexKind::Input, vec![], "en").unwrap();
        let q = g.add_vertex(VertexKind::Gate(GateKind::Dff), vec![pi], "q").unwrap();
        let n = g.add_vertex(VertexKind::Gate(GateKind::Not), vec![q], "n").unwrap();
        g.set_fanin(q, 0, n);
        g.add_vertex(VertexKind::Output, vec![q], "q").unwrap();
        let mut sim = Simulator::new(&g).unwrap();
        let stim = vec![vec![false]; 3];
        let trace = sim.simulate_seq(&stim).unwrap();
        assert_eq!(trace, vec![vec![false], vec![true], vec![false]]);
    }

    #[test]
    fn fabric_cells_refuse_to_simulate() {
        let mut g = Hypergraph::new("t");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let l = g.add_vertex(VertexKind::Clut { width: 2, elem: 0 }, vec![a, a], "l").unwrap();
        g.add_vertex(VertexKind::Output, vec![l], "l").unwrap();
        assert!(matches!(Simulator::new(&g), Err(SimError::Unprogrammed(_))));
    }
}
