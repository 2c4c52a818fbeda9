//! Hypergraph IR for gate-level netlists.
//!
//! Vertices are single-output nodes: primary inputs/outputs, logic gates,
//! flip-flops, and (after redaction) programmable-fabric cells. Nets are
//! implicit: a vertex's output net fans out to every vertex listing it as a
//! fanin, and the fanout index is maintained as the exact inverse of the
//! fanin lists. There is a single implicit clock domain and registers carry
//! no set/reset.
//!
//! All queries iterate in ascending vertex id so results are byte-stable.

use std::collections::BTreeSet;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gate::GateKind;

/// Dense vertex identifier. Ids are stable across JSON round-trips; removed
/// vertices leave holes that are never reused within one graph's lifetime.
pub type VertexId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {0} does not exist")]
    NoSuchVertex(VertexId),
    #[error("vertex '{name}': expected {expected} fanins, got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid gate for vertex '{name}': {reason}")]
    InvalidGate { name: String, reason: String },
    #[error("combinational cycle through: {}", .0.join(" -> "))]
    CombinationalCycle(Vec<String>),
    #[error("vertex '{0}' still has consumers")]
    HasConsumers(String),
    #[error("query vertex '{0}' must be a gate or flip-flop")]
    NotAGate(String),
    #[error("graph invariant violated: {0}")]
    Invariant(String),
}

/// What a vertex is. Fabric kinds carry the owning element id so bitstream
/// segments can be matched back to cells after a netlist round-trip.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    /// Primary input (no fanins).
    Input,
    /// Primary output port (exactly one fanin).
    Output,
    /// Logic gate or data flip-flop.
    Gate(GateKind),
    /// Configurable look-up table cell; combinational.
    Clut { width: u8, elem: u32 },
    /// The look-up-table half of a configurable sequential block.
    CsbCore { width: u8, elem: u32 },
    /// The registered output of a configurable sequential block. `source_ff`
    /// names the original flip-flop this block replaced, when there is one.
    CsbReg { elem: u32, source_ff: Option<String> },
    /// Configurable programmable interconnect cell; combinational.
    Cpi { width: u8, elem: u32 },
    /// Configuration-register output. Distinct from a data flip-flop: it is
    /// a load-once constant during functional simulation.
    ConfigBit { value: bool },
}

impl VertexKind {
    /// Required fanin count.
    pub fn arity(&self) -> usize {
        match self {
            VertexKind::Input | VertexKind::ConfigBit { .. } => 0,
            VertexKind::Output => 1,
            VertexKind::Gate(k) => k.arity(),
            VertexKind::Clut { width, .. }
            | VertexKind::CsbCore { width, .. }
            | VertexKind::Cpi { width, .. } => *width as usize,
            VertexKind::CsbReg { .. } => 1,
        }
    }

    /// Registers: data flip-flops and CSB registered outputs. Their output
    /// edges are excluded from the combinational subgraph.
    pub fn is_register(&self) -> bool {
        matches!(self, VertexKind::Gate(GateKind::Dff) | VertexKind::CsbReg { .. })
    }

    /// Combinational nodes that count as gates in cone queries.
    pub fn is_comb_node(&self) -> bool {
        match self {
            VertexKind::Gate(k) => !k.is_dff(),
            VertexKind::Clut { .. } | VertexKind::CsbCore { .. } | VertexKind::Cpi { .. } => true,
            _ => false,
        }
    }

    /// Cone leaves: sources whose value is given, not computed, within a
    /// combinational frame.
    pub fn is_driver(&self) -> bool {
        matches!(self, VertexKind::Input | VertexKind::ConfigBit { .. }) || self.is_register()
    }

    /// Unprogrammed fabric cells (cannot be simulated without a bitstream).
    pub fn is_fabric(&self) -> bool {
        matches!(
            self,
            VertexKind::Clut { .. }
                | VertexKind::CsbCore { .. }
                | VertexKind::CsbReg { .. }
                | VertexKind::Cpi { .. }
        )
    }

    /// Element id for fabric kinds.
    pub fn elem_id(&self) -> Option<u32> {
        match self {
            VertexKind::Clut { elem, .. }
            | VertexKind::CsbCore { elem, .. }
            | VertexKind::CsbReg { elem, .. }
            | VertexKind::Cpi { elem, .. } => Some(*elem),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub kind: VertexKind,
    pub fanins: Vec<VertexId>,
    pub name: String,
}

/// Cut-point: a primary output or the data input of a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutKind {
    Po,
    PseudoPo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutPoint {
    /// The PO vertex, or the vertex driving the register's data input.
    pub vertex: VertexId,
    /// For pseudo-POs: the register whose data input anchors this cut-point.
    pub register: Option<VertexId>,
    pub kind: CutKind,
}

/// Fan-in cone split into combinational members and driver leaves.
#[derive(Debug, Clone, Default)]
pub struct FaninCone {
    /// Combinational gates in the cone, ascending id.
    pub gates: Vec<VertexId>,
    /// Primary inputs, register outputs and config bits feeding the cone.
    pub drivers: Vec<VertexId>,
}

#[derive(Debug, Clone, Default)]
pub struct Hypergraph {
    name: String,
    vertices: Vec<Option<Vertex>>,
    fanouts: Vec<Vec<VertexId>>,
}

impl Hypergraph {
    pub fn new(name: impl Into<String>) -> Self {
        Hypergraph {
            name: name.into(),
            vertices: Vec::new(),
            fanouts: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_model_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Adds a vertex, checking kind validity and arity.
    pub fn add_vertex(
        &mut self,
        kind: VertexKind,
        fanins: Vec<VertexId>,
        name: impl Into<String>,
    ) -> Result<VertexId, GraphError> {
        let name = name.into();
        if let VertexKind::Gate(k) = &kind {
            k.validate()
                .map_err(|reason| GraphError::InvalidGate { name: name.clone(), reason })?;
        }
        if fanins.len() != kind.arity() {
            return Err(GraphError::ArityMismatch {
                name,
                expected: kind.arity(),
                got: fanins.len(),
            });
        }
        for &f in &fanins {
            if self.get(f).is_none() {
                return Err(GraphError::NoSuchVertex(f));
            }
        }
        let id = self.vertices.len() as VertexId;
        for &f in &fanins {
            self.fanouts[f as usize].push(id);
        }
        self.vertices.push(Some(Vertex { id, kind, fanins, name }));
        self.fanouts.push(Vec::new());
        Ok(id)
    }

    pub fn get(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.get(id as usize).and_then(|v| v.as_ref())
    }

    /// Panics if the vertex does not exist.
    pub fn vertex(&self, id: VertexId) -> &Vertex {
        self.get(id).expect("vertex exists")
    }

    pub fn fanouts(&self, id: VertexId) -> &[VertexId] {
        &self.fanouts[id as usize]
    }

    /// Live vertices in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter_map(|v| v.as_ref())
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Upper bound over ids ever allocated (including holes).
    pub fn id_bound(&self) -> usize {
        self.vertices.len()
    }

    pub fn pi_ids(&self) -> Vec<VertexId> {
        self.iter()
            .filter(|v| v.kind == VertexKind::Input)
            .map(|v| v.id)
            .collect()
    }

    pub fn po_ids(&self) -> Vec<VertexId> {
        self.iter()
            .filter(|v| v.kind == VertexKind::Output)
            .map(|v| v.id)
            .collect()
    }

    /// Registers: raw flip-flops plus CSB registered outputs.
    pub fn ff_ids(&self) -> Vec<VertexId> {
        self.iter()
            .filter(|v| v.kind.is_register())
            .map(|v| v.id)
            .collect()
    }

    /// Gates and flip-flops (redaction candidates), excluding ports.
    pub fn gate_ids(&self) -> Vec<VertexId> {
        self.iter()
            .filter(|v| matches!(v.kind, VertexKind::Gate(_)))
            .map(|v| v.id)
            .collect()
    }

    pub fn is_sequential(&self) -> bool {
        self.iter().any(|v| v.kind.is_register())
    }

    pub fn contains_fabric(&self) -> bool {
        self.iter().any(|v| v.kind.is_fabric())
    }

    /// Redirects every consumer of `old` (except those listed in `keep`) to
    /// read `new` instead.
    pub fn rewire_consumers(&mut self, old: VertexId, new: VertexId, keep: &[VertexId]) {
        let consumers: Vec<VertexId> = self.fanouts[old as usize]
            .iter()
            .copied()
            .filter(|c| !keep.contains(c))
            .collect();
        for c in consumers {
            let v = self.vertices[c as usize].as_mut().expect("consumer alive");
            for f in v.fanins.iter_mut() {
                if *f == old {
                    *f = new;
                }
            }
        }
        self.rebuild_fanouts();
    }

    /// Replaces a single fanin slot of `consumer`.
    pub fn set_fanin(&mut self, consumer: VertexId, position: usize, source: VertexId) {
        let v = self.vertices[consumer as usize].as_mut().expect("vertex alive");
        let old = v.fanins[position];
        v.fanins[position] = source;
        let slot = self.fanouts[old as usize]
            .iter()
            .position(|&c| c == consumer)
            .expect("fanout entry present");
        self.fanouts[old as usize].swap_remove(slot);
        self.fanouts[old as usize].sort_unstable();
        self.fanouts[source as usize].push(consumer);
    }

    /// Appends a fanin to a fabric vertex, growing its width by one.
    pub fn push_fanin(&mut self, consumer: VertexId, position: usize, source: VertexId) {
        let v = self.vertices[consumer as usize].as_mut().expect("vertex alive");
        v.fanins.insert(position, source);
        match &mut v.kind {
            VertexKind::Clut { width, .. }
            | VertexKind::CsbCore { width, .. }
            | VertexKind::Cpi { width, .. } => *width += 1,
            _ => panic!("push_fanin on non-fabric vertex"),
        }
        self.fanouts[source as usize].push(consumer);
    }

    /// Rewrites a vertex's kind and fanins together (the programming path:
    /// a fabric cell collapsing to its resolved logic). Fanout lists of the
    /// old and new sources are updated.
    pub fn reshape_vertex(&mut self, id: VertexId, kind: VertexKind, fanins: Vec<VertexId>) {
        assert_eq!(kind.arity(), fanins.len());
        let old = self.vertices[id as usize]
            .as_ref()
            .expect("vertex alive")
            .fanins
            .clone();
        for f in old {
            let slot = self.fanouts[f as usize]
                .iter()
                .position(|&c| c == id)
                .expect("fanout entry present");
            self.fanouts[f as usize].swap_remove(slot);
        }
        for &f in &fanins {
            self.fanouts[f as usize].push(id);
        }
        let v = self.vertices[id as usize].as_mut().expect("vertex alive");
        v.kind = kind;
        v.fanins = fanins;
    }

    /// Reorders a vertex's fanins in place: the fanin at old position `j`
    /// moves to position `perm[j]`. The fanin multiset (and so the fanout
    /// index) is unchanged.
    pub fn permute_fanins(&mut self, id: VertexId, perm: &[usize]) {
        let v = self.vertices[id as usize].as_mut().expect("vertex alive");
        assert_eq!(perm.len(), v.fanins.len());
        let old = v.fanins.clone();
        for (j, &np) in perm.iter().enumerate() {
            v.fanins[np] = old[j];
        }
    }

    /// Removes a vertex that no longer has consumers.
    pub fn remove_vertex(&mut self, id: VertexId) -> Result<(), GraphError> {
        let v = self.get(id).ok_or(GraphError::NoSuchVertex(id))?;
        if !self.fanouts[id as usize].is_empty() {
            return Err(GraphError::HasConsumers(v.name.clone()));
        }
        let fanins = v.fanins.clone();
        for f in fanins {
            self.fanouts[f as usize].retain(|&c| c != id);
        }
        self.vertices[id as usize] = None;
        Ok(())
    }

    pub fn rename_vertex(&mut self, id: VertexId, name: impl Into<String>) {
        self.vertices[id as usize].as_mut().expect("vertex alive").name = name.into();
    }

    pub fn set_kind(&mut self, id: VertexId, kind: VertexKind) {
        let v = self.vertices[id as usize].as_mut().expect("vertex alive");
        debug_assert_eq!(kind.arity(), v.fanins.len());
        v.kind = kind;
    }

    /// Assembles a graph from pre-built vertices (parser path: BLIF and the
    /// JSON format allow forward references). Validates every invariant.
    pub(crate) fn from_parts(
        name: String,
        vertices: Vec<Option<Vertex>>,
    ) -> Result<Self, GraphError> {
        let mut g = Hypergraph {
            name,
            fanouts: vec![Vec::new(); vertices.len()],
            vertices,
        };
        for v in g.iter() {
            if let VertexKind::Gate(k) = &v.kind {
                k.validate()
                    .map_err(|reason| GraphError::InvalidGate { name: v.name.clone(), reason })?;
            }
        }
        g.rebuild_fanouts();
        g.check()?;
        Ok(g)
    }

    fn rebuild_fanouts(&mut self) {
        for l in self.fanouts.iter_mut() {
            l.clear();
        }
        let edges: Vec<(VertexId, VertexId)> = self
            .iter()
            .flat_map(|v| v.fanins.iter().map(move |&f| (f, v.id)))
            .collect();
        for (f, c) in edges {
            self.fanouts[f as usize].push(c);
        }
    }

    /// Topological order over the combinational subgraph (register output
    /// edges excluded, so registers act as sources for their consumers).
    /// Ties are broken by ascending id. Fails with one offending cycle.
    pub fn topological_order(&self) -> Result<Vec<VertexId>, GraphError> {
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        for v in self.iter() {
            for &f in &v.fanins {
                if !self.vertex(f).kind.is_register() {
                    indeg[v.id as usize] += 1;
                }
            }
        }
        let mut heap: BTreeSet<VertexId> = self
            .iter()
            .filter(|v| indeg[v.id as usize] == 0)
            .map(|v| v.id)
            .collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(&id) = heap.iter().next() {
            heap.remove(&id);
            order.push(id);
            if self.vertex(id).kind.is_register() {
                continue; // output edges of registers do not gate consumers
            }
            for &c in &self.fanouts[id as usize] {
                indeg[c as usize] -= 1;
                if indeg[c as usize] == 0 {
                    heap.insert(c);
                }
            }
        }
        if order.len() == self.len() {
            Ok(order)
        } else {
            Err(GraphError::CombinationalCycle(self.find_cycle(&indeg)))
        }
    }

    fn find_cycle(&self, indeg: &[usize]) -> Vec<String> {
        let start = self
            .iter()
            .find(|v| indeg[v.id as usize] > 0)
            .map(|v| v.id)
            .expect("a vertex on the cycle");
        let mut seen: Vec<VertexId> = vec![start];
        let mut cur = start;
        loop {
            let v = self.vertex(cur);
            let next = v
                .fanins
                .iter()
                .copied()
                .find(|&f| indeg[f as usize] > 0 && !self.vertex(f).kind.is_register())
                .expect("unresolved predecessor on cycle");
            if let Some(pos) = seen.iter().position(|&s| s == next) {
                let mut cycle: Vec<String> =
                    seen[pos..].iter().map(|&s| self.vertex(s).name.clone()).collect();
                cycle.reverse();
                cycle.push(self.vertex(next).name.clone());
                return cycle;
            }
            seen.push(next);
            cur = next;
        }
    }

    /// Positions of each vertex in the topological order.
    pub fn topological_positions(&self) -> Result<Vec<usize>, GraphError> {
        let order = self.topological_order()?;
        let mut pos = vec![usize::MAX; self.vertices.len()];
        for (i, &id) in order.iter().enumerate() {
            pos[id as usize] = i;
        }
        Ok(pos)
    }

    /// Maximum fan-out free cone rooted at `root` (a gate or flip-flop):
    /// the largest fanin cone in which every non-root member's fanouts all
    /// stay inside the cone. Inputs and register outputs are never members.
    pub fn extract_mffc(&self, root: VertexId) -> Result<BTreeSet<VertexId>, GraphError> {
        let rv = self.get(root).ok_or(GraphError::NoSuchVertex(root))?;
        if !matches!(rv.kind, VertexKind::Gate(_)) {
            return Err(GraphError::NotAGate(rv.name.clone()));
        }
        let mut cone: BTreeSet<VertexId> = BTreeSet::new();
        cone.insert(root);
        loop {
            let mut grew = false;
            let frontier: BTreeSet<VertexId> = cone
                .iter()
                .flat_map(|&m| self.vertex(m).fanins.iter().copied())
                .filter(|f| !cone.contains(f))
                .collect();
            for u in frontier {
                let uv = self.vertex(u);
                let is_comb_gate = matches!(&uv.kind, VertexKind::Gate(k) if !k.is_dff());
                if !is_comb_gate {
                    continue;
                }
                if self.fanouts[u as usize].iter().all(|c| cone.contains(c)) {
                    cone.insert(u);
                    grew = true;
                }
            }
            if !grew {
                return Ok(cone);
            }
        }
    }

    /// Structural cut-points: one per primary output, one per register.
    pub fn cut_points(&self) -> Vec<CutPoint> {
        let mut cps = Vec::new();
        for v in self.iter() {
            match &v.kind {
                VertexKind::Output => cps.push(CutPoint {
                    vertex: v.id,
                    register: None,
                    kind: CutKind::Po,
                }),
                k if k.is_register() => cps.push(CutPoint {
                    vertex: v.fanins[0],
                    register: Some(v.id),
                    kind: CutKind::PseudoPo,
                }),
                _ => {}
            }
        }
        cps
    }

    /// Fan-in cone of a cut-point: transitive fanin stopping at drivers
    /// (primary inputs, register outputs, config bits).
    pub fn fan_in_cone(&self, cp: &CutPoint) -> FaninCone {
        let start = match cp.kind {
            CutKind::Po => self.vertex(cp.vertex).fanins[0],
            CutKind::PseudoPo => cp.vertex,
        };
        self.fan_in_cone_of(start)
    }

    /// Fan-in cone seen from a signal (the vertex itself is a member when
    /// combinational, a driver leaf otherwise).
    pub fn fan_in_cone_of(&self, start: VertexId) -> FaninCone {
        let mut gates: BTreeSet<VertexId> = BTreeSet::new();
        let mut drivers: BTreeSet<VertexId> = BTreeSet::new();
        let mut stack = vec![start];
        let mut visited: HashSet<VertexId> = HashSet::new();
        while let Some(id) = stack.pop() {
            if !visited.insert(id) {
                continue;
            }
            let v = self.vertex(id);
            if v.kind.is_driver() {
                drivers.insert(id);
            } else if v.kind.is_comb_node() {
                gates.insert(id);
                stack.extend(v.fanins.iter().copied());
            } else if v.kind == VertexKind::Output {
                stack.extend(v.fanins.iter().copied());
            }
        }
        FaninCone {
            gates: gates.into_iter().collect(),
            drivers: drivers.into_iter().collect(),
        }
    }

    /// Fan-out cone of a signal: combinational vertices reached forward,
    /// stopping at primary outputs and register data inputs (the stop
    /// vertices themselves are not included).
    pub fn fan_out_cone(&self, start: VertexId) -> Vec<VertexId> {
        let mut members: BTreeSet<VertexId> = BTreeSet::new();
        let mut stack: Vec<VertexId> = self.fanouts(start).to_vec();
        while let Some(id) = stack.pop() {
            let v = self.vertex(id);
            if v.kind == VertexKind::Output || v.kind.is_register() {
                continue;
            }
            if members.insert(id) {
                stack.extend(self.fanouts(id).iter().copied());
            }
        }
        members.into_iter().collect()
    }

    /// Validates all structural invariants.
    pub fn check(&self) -> Result<(), GraphError> {
        for v in self.iter() {
            if v.fanins.len() != v.kind.arity() {
                return Err(GraphError::ArityMismatch {
                    name: v.name.clone(),
                    expected: v.kind.arity(),
                    got: v.fanins.len(),
                });
            }
            for &f in &v.fanins {
                if self.get(f).is_none() {
                    return Err(GraphError::Invariant(format!(
                        "vertex '{}' reads dead vertex {}",
                        v.name, f
                    )));
                }
                if self.vertex(f).kind == VertexKind::Output {
                    return Err(GraphError::Invariant(format!(
                        "vertex '{}' reads a primary output",
                        v.name
                    )));
                }
            }
        }
        // Fanout index is the exact inverse of the fanin lists.
        let mut expect: Vec<Vec<VertexId>> = vec![Vec::new(); self.vertices.len()];
        for v in self.iter() {
            for &f in &v.fanins {
                expect[f as usize].push(v.id);
            }
        }
        for v in self.iter() {
            let mut a = self.fanouts[v.id as usize].clone();
            let mut b = expect[v.id as usize].clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return Err(GraphError::Invariant(format!(
                    "fanout index of '{}' is stale",
                    v.name
                )));
            }
        }
        self.topological_order()?;
        Ok(())
    }
}

/// Deterministic fresh-name source that never collides with names already
/// present in a graph.
#[derive(Debug, Default)]
pub struct NameAllocator {
    used: HashSet<String>,
}

impl NameAllocator {
    pub fn from_graph(g: &Hypergraph) -> Self {
        NameAllocator {
            used: g.iter().map(|v| v.name.clone()).collect(),
        }
    }

    pub fn claim(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, prefix: &str, n: u64) -> String {
        let mut candidate = format!("{prefix}{n}");
        while self.used.contains(&candidate) {
            candidate.push('_');
        }
        self.used.insert(candidate.clone());
        candidate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateKind;

    fn chain3() -> (Hypergraph, VertexId, VertexId, VertexId, VertexId) {
        let mut g = Hypergraph::new("chain");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let b = g.add_vertex(VertexKind::Gate(GateKind::Not), vec![a], "b").unwrap();
        let c = g.add_vertex(VertexKind::Gate(GateKind::Buf), vec![b], "c").unwrap();
        let y = g.add_vertex(VertexKind::Output, vec![c], "y").unwrap();
        (g, a, b, c, y)
    }

    #[test]
    fn topo_chain_in_order() {
        let (g, a, b, c, y) = chain3();
        assert_eq!(g.topological_order().unwrap(), vec![a, b, c, y]);
    }

    #[test]
    fn topo_diamond_tie_break_by_id() {
        let mut g = Hypergraph::new("d");
        let i = g.add_vertex(VertexKind::Input, vec![], "i").unwrap();
        let l = g.add_vertex(VertexKind::Gate(GateKind::Not), vec![i], "l").unwrap();
        let r = g.add_vertex(VertexKind::Gate(GateKind::Buf), vec![i], "r").unwrap();
        let o = g
            .add_vertex(VertexKind::Gate(GateKind::And(2)), vec![l, r], "o")
            .unwrap();
        assert_eq!(g.topological_order().unwrap(), vec![i, l, r, o]);
    }

    #[test]
    fn sequential_loop_is_legal_combinational_loop_is_not() {
        // DFF + NOT feedback ring: legal. Built with a placeholder fanin
        // that is patched once the NOT exists.
        let mut g = Hypergraph::new("ring");
        let pi = g.add_vertex(VertexKind::Input, vec![], "pi").unwrap();
        let q = g.add_vertex(VertexKind::Gate(GateKind::Dff), vec![pi], "q").unwrap();
        let n = g.add_vertex(VertexKind::Gate(GateKind::Not), vec![q], "n").unwrap();
        g.set_fanin(q, 0, n);
        assert!(g.topological_order().is_ok());

        // Pure combinational ring: cycle error.
        let mut g2 = Hypergraph::new("bad");
        let a = g2.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let x = g2.add_vertex(VertexKind::Gate(GateKind::And(2)), vec![a, a], "x").unwrap();
        let y = g2.add_vertex(VertexKind::Gate(GateKind::Not), vec![x], "y").unwrap();
        g2.set_fanin(x, 1, y);
        match g2.topological_order() {
            Err(GraphError::CombinationalCycle(cyc)) => assert!(!cyc.is_empty()),
            other => panic!("expected cycle error, got {other:?}"),
        }
    }

    #[test]
    fn mffc_single_fanout_absorbed() {
        let mut g = Hypergraph::new("m");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let b = g.add_vertex(VertexKind::Input, vec![], "b").unwrap();
        let g1 = g.add_vertex(VertexKind::Gate(GateKind::And(2)), vec![a, b], "g1").unwrap();
        let g2 = g.add_vertex(VertexKind::Gate(GateKind::Not), vec![g1], "g2").unwrap();
        let _y = g.add_vertex(VertexKind::Output, vec![g2], "y").unwrap();
        let cone = g.extract_mffc(g2).unwrap();
        assert_eq!(cone.into_iter().collect::<Vec<_>>(), vec![g1, g2]);
    }

    #[test]
    fn mffc_external_fanout_excluded() {
        let mut g = Hypergraph::new("m2");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        let g1 = g.add_vertex(VertexKind::Gate(GateKind::Not), vec![a], "g1").unwrap();
        let g2 = g.add_vertex(VertexKind::Gate(GateKind::Buf), vec![g1], "g2").unwrap();
        let g3 = g.add_vertex(VertexKind::Gate(GateKind::Not), vec![g1], "g3").unwrap();
        let _y2 = g.add_vertex(VertexKind::Output, vec![g2], "y2").unwrap();
        let _y3 = g.add_vertex(VertexKind::Output, vec![g3], "y3").unwrap();
        let cone = g.extract_mffc(g2).unwrap();
        assert_eq!(cone.into_iter().collect::<Vec<_>>(), vec![g2]);
    }

    #[test]
    fn mffc_rejects_ports() {
        let (g, a, _, _, y) = chain3();
        assert!(g.extract_mffc(a).is_err());
        assert!(g.extract_mffc(y).is_err());
    }

    #[test]
    fn cut_point_counts() {
        // Combinational: 3 POs -> 3 cut-points.
        let mut g = Hypergraph::new("c");
        let a = g.add_vertex(VertexKind::Input, vec![], "a").unwrap();
        for i in 0..3 {
            let n = g
                .add_vertex(VertexKind::Gate(GateKind::Not), vec![a], format!("n{i}"))
                .unwrap();
            g.add_vertex(VertexKind::Output, vec![n], format!("y{i}")).unwrap();
        }
        let cps = g.cut_points();
        assert_eq!(cps.len(), 3);
        assert!(cps.iter().all(|c| c.kind == CutKind::Po));

        // 2 DFFs + 1 PO -> 3 cut-points.
        let mut s = Hypergraph::new("s");
        let pi = s.add_vertex(VertexKind::Input, vec![], "pi").unwrap();
        let d1 = s.add_vertex(VertexKind::Gate(GateKind::Dff), vec![pi], "d1").unwrap();
        let d2 = s.add_vertex(VertexKind::Gate(GateKind::Dff), vec![d1], "d2").unwrap();
        s.add_vertex(VertexKind::Output, vec![d2], "y").unwrap();
        assert_eq!(s.cut_points().len(), 3);
    }

    #[test]
    fn fanin_cone_of_and() {
        let mut g = Hypergraph::new("f");
        let a = g.add_vertex(VertexKind::Input, vec![], "pi0").unwrap();
        let b = g.add_vertex(VertexKind::Input, vec![], "pi1").unwrap();
        let and = g.add_vertex(VertexKind::Gate(GateKind::And(2)), vec![a, b], "n").unwrap();
        let y = g.add_vertex(VertexKind::Output, vec![and], "y").unwrap();
        let cp = CutPoint { vertex: y, register: None, kind: CutKind::Po };
        let cone = g.fan_in_cone(&cp);
        assert_eq!(cone.gates, vec![and]);
        assert_eq!(cone.drivers, vec![a, b]);
        assert!(g.fan_out_cone(y).is_empty());
    }
}
