//! The redaction pipeline: critical-node selection, cone-to-cell mapping,
//! decoy sequential/Boolean block placement, per-element randomization
//! (dummy inputs, input reordering, output inversion) and interconnect-mux
//! insertion.
//!
//! Every randomized choice draws from a per-stage deterministic stream
//! seeded by the 32-bit run seed, so a given `(netlist, seed, parameters)`
//! triple always produces byte-identical outputs.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::fabric::{
    encode_truth_table, extend_with_dummy, invert_bits, permute_bits, swap_cofactors, Element,
    ElementKind, FabricError, Role,
};
use crate::graph::{GraphError, Hypergraph, NameAllocator, VertexId, VertexKind};
use crate::numeric::{binary_entropy_q32, Q32_ONE};
use crate::params::{ParamsError, RedactionParams};
use crate::rng::{Stage, StreamRng};
use crate::sim::{SimError, Simulator};

#[derive(Debug, Error)]
pub enum RedactError {
    #[error("empty netlist")]
    EmptyNetlist,
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Fabric(#[from] FabricError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A scored redaction candidate.
#[derive(Debug, Clone)]
pub struct CriticalVertex {
    pub vertex: VertexId,
    /// Removal-cost score in Q32 fixed point.
    pub rcf: u64,
}

/// The ordered critical set: sorted by descending removal cost (ties by
/// ascending id), then shuffled when randomization is enabled.
#[derive(Debug, Clone)]
pub struct CriticalSet {
    pub order: Vec<CriticalVertex>,
}

/// Per-cone record for the input-coverage audit: a decomposition of a cone
/// with `cone_inputs` external inputs must provide at least that many cell
/// input pins.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConeAudit {
    pub root: String,
    pub cone_inputs: usize,
    pub covered_inputs: usize,
}

/// Output of the pipeline: residual netlist with fabric cells inline,
/// element metadata, and the transformation counters.
#[derive(Debug, Clone)]
pub struct RedactedDesign {
    pub graph: Hypergraph,
    pub elements: Vec<Element>,
    /// Original vertex id -> element id that absorbed it.
    pub absorbed: BTreeMap<VertexId, u32>,
    /// Cut-points in the original design.
    pub n_o: usize,
    /// New cut-points from decoy flip-flops added over lookup cells.
    pub n_a: usize,
    /// New cut-points from decoy Boolean blocks.
    pub n_b: usize,
    /// Interconnect-mux candidate count (cell outputs).
    pub cpi_candidates: usize,
    /// Interconnect muxes placed.
    pub cpi_placed: usize,
    pub audits: Vec<ConeAudit>,
}

impl RedactedDesign {
    /// Cut-point total per the accounting identity.
    pub fn n_r(&self) -> usize {
        self.n_o + self.n_a + self.n_b
    }
}

/// Empirical signal entropy of one vertex over uniform random input
/// vectors (registers held at zero), in Q32.
pub fn signal_entropy_q32(
    g: &Hypergraph,
    vertex: VertexId,
    samples: u32,
    rng: &mut StreamRng,
) -> Result<u64, RedactError> {
    let ones = entropy_counts(g, samples, rng)?;
    Ok(binary_entropy_q32(ones[vertex as usize], samples as u64))
}

/// Same as [`signal_entropy_q32`] but as an `f64` in `[0, 1]`.
pub fn signal_entropy(
    g: &Hypergraph,
    vertex: VertexId,
    samples: u32,
    seed: u32,
) -> Result<f64, RedactError> {
    let mut rng = StreamRng::new(seed, Stage::Entropy);
    Ok(crate::numeric::q32_to_f64(signal_entropy_q32(g, vertex, samples, &mut rng)?))
}

/// One-counter-per-vertex batch: simulates `samples` random vectors and
/// counts ones on every net.
fn entropy_counts(
    g: &Hypergraph,
    samples: u32,
    rng: &mut StreamRng,
) -> Result<Vec<u64>, RedactError> {
    let mut sim = Simulator::new(g)?;
    let n_pi = sim.pi_ids().len();
    let mut ones = vec![0u64; g.id_bound()];
    let mut vector = vec![false; n_pi];
    for _ in 0..samples {
        for slot in vector.iter_mut() {
            *slot = rng.bit();
        }
        sim.settle_comb(&vector)?;
        for v in g.iter() {
            if sim.value(v.id) {
                ones[v.id as usize] += 1;
            }
        }
    }
    Ok(ones)
}

/// Scores every gate and flip-flop with the removal-cost function
/// `w_fi * |FI|/max + w_fo * |FO|/max + w_h * H`, selects the top
/// `ceil(coverage * n)` (ties by ascending id) and, with randomization
/// enabled, shuffles the selection.
pub fn identify_critical_nodes(
    g: &Hypergraph,
    seed: u32,
    params: &RedactionParams,
) -> Result<CriticalSet, RedactError> {
    let candidates = g.gate_ids();
    if candidates.is_empty() && g.len() == 0 {
        return Err(RedactError::EmptyNetlist);
    }
    let mut entropy_rng = StreamRng::new(seed, Stage::Entropy);
    let ones = entropy_counts(g, params.entropy_samples, &mut entropy_rng)?;

    let mut fi = vec![0u64; g.id_bound()];
    let mut fo = vec![0u64; g.id_bound()];
    for &v in &candidates {
        let vert = g.vertex(v);
        fi[v as usize] = if vert.kind.is_register() {
            g.fan_in_cone_of(vert.fanins[0]).gates.len() as u64 + 1
        } else {
            g.fan_in_cone_of(v).gates.len() as u64
        };
        fo[v as usize] = g.fan_out_cone(v).len() as u64;
    }
    let max_fi = candidates.iter().map(|&v| fi[v as usize]).max().unwrap_or(0).max(1);
    let max_fo = candidates.iter().map(|&v| fo[v as usize]).max().unwrap_or(0).max(1);
    let wq = |w: f64| -> u128 { (w * Q32_ONE as f64) as u128 };
    let (w_fi, w_fo, w_h) = (wq(params.w_fi), wq(params.w_fo), wq(params.w_h));

    let mut scored: Vec<CriticalVertex> = candidates
        .iter()
        .map(|&v| {
            let fi_n = ((fi[v as usize] as u128) << 32) / max_fi as u128;
            let fo_n = ((fo[v as usize] as u128) << 32) / max_fo as u128;
            let h = binary_entropy_q32(ones[v as usize], params.entropy_samples as u64) as u128;
            let rcf = ((w_fi * fi_n + w_fo * fo_n + w_h * h) >> 32) as u64;
            CriticalVertex { vertex: v, rcf }
        })
        .collect();
    scored.sort_by(|a, b| b.rcf.cmp(&a.rcf).then(a.vertex.cmp(&b.vertex)));
    let take = (params.coverage * candidates.len() as f64).ceil() as usize;
    scored.truncate(take);
    if params.rt_enabled {
        let mut rng = StreamRng::new(seed, Stage::Shuffle);
        rng.shuffle(&mut scored);
    }
    Ok(CriticalSet { order: scored })
}

/// Pipeline state threaded through the transformation passes.
struct Builder<'p> {
    orig: Hypergraph,
    work: Hypergraph,
    names: NameAllocator,
    elements: Vec<Element>,
    absorbed: BTreeMap<VertexId, u32>,
    /// Element id -> the critical root its cone came from.
    element_root: BTreeMap<u32, VertexId>,
    params: &'p RedactionParams,
    seed: u32,
    processed_roots: Vec<VertexId>,
    n_a: usize,
    n_b: usize,
    cpi_candidates: usize,
    cpi_placed: usize,
}

/// Runs the whole redaction pipeline.
pub fn redact(
    netlist: &Hypergraph,
    seed: u32,
    params: &RedactionParams,
) -> Result<RedactedDesign, RedactError> {
    params.validate()?;
    netlist.check()?;
    if netlist.is_empty() {
        return Err(RedactError::EmptyNetlist);
    }
    let critical = identify_critical_nodes(netlist, seed, params)?;
    let n_o = netlist.cut_points().len();

    let mut b = Builder {
        orig: netlist.clone(),
        work: netlist.clone(),
        names: NameAllocator::from_graph(netlist),
        elements: Vec::new(),
        absorbed: BTreeMap::new(),
        element_root: BTreeMap::new(),
        params,
        seed,
        processed_roots: Vec::new(),
        n_a: 0,
        n_b: 0,
        cpi_candidates: 0,
        cpi_placed: 0,
    };

    // Cone mapping over the shuffled critical set.
    let mut size_rng = StreamRng::new(seed, Stage::Sizes);
    for cv in &critical.order {
        if b.absorbed.contains_key(&cv.vertex) {
            continue; // already inside an earlier element
        }
        let r_size = if params.rt_enabled {
            params.gamma_min as usize
                + size_rng.range((params.gamma_max - params.gamma_min + 1) as usize)
        } else {
            params.gamma_min as usize
        };
        if b.orig.vertex(cv.vertex).kind.is_register() {
            b.redact_sequential(cv.vertex, r_size, &mut size_rng)?;
        } else {
            b.redact_boolean(cv.vertex, r_size, &mut size_rng)?;
        }
        b.processed_roots.push(cv.vertex);
    }

    if params.rt_enabled {
        b.place_dummy_csbs()?;
        b.randomize_elements()?;
        b.place_cpis()?;
    }

    let audits = b.compute_audits();
    debug_assert!(b.work.check().is_ok());
    Ok(RedactedDesign {
        graph: b.work,
        elements: b.elements,
        absorbed: b.absorbed,
        n_o,
        n_a: b.n_a,
        n_b: b.n_b,
        cpi_candidates: b.cpi_candidates,
        cpi_placed: b.cpi_placed,
        audits,
    })
}

impl Builder<'_> {
    /// Greedy fanin-wise cone growth from `root`, restricted to live members
    /// of `mffc`, keeping the distinct-support count within `r_size`.
    /// `ghost_consumer` (the flip-flop being replaced, if any) counts as
    /// inside the cone for the fanout-free check.
    fn grow_cone(
        &self,
        root: VertexId,
        mffc: &BTreeSet<VertexId>,
        r_size: usize,
        ghost_consumer: Option<VertexId>,
    ) -> (BTreeSet<VertexId>, Vec<VertexId>) {
        let mut cone: BTreeSet<VertexId> = BTreeSet::new();
        cone.insert(root);
        let support = |cone: &BTreeSet<VertexId>| -> Vec<VertexId> {
            let mut s: BTreeSet<VertexId> = BTreeSet::new();
            for &m in cone.iter() {
                for &f in &self.work.vertex(m).fanins {
                    if !cone.contains(&f) {
                        s.insert(f);
                    }
                }
            }
            s.into_iter().collect()
        };
        loop {
            let cur = support(&cone);
            let mut grew = false;
            for &u in &cur {
                if !mffc.contains(&u) || self.work.get(u).is_none() {
                    continue;
                }
                if !matches!(&self.work.vertex(u).kind, VertexKind::Gate(k) if !k.is_dff()) {
                    continue;
                }
                let closed = self.work.fanouts(u).iter().all(|&c| {
                    cone.contains(&c) || ghost_consumer == Some(c)
                });
                if !closed {
                    continue;
                }
                let mut trial = cone.clone();
                trial.insert(u);
                if support(&trial).len() <= r_size {
                    cone = trial;
                    grew = true;
                    break;
                }
            }
            if !grew {
                return (cone.clone(), support(&cone));
            }
        }
    }

    /// Sources legal as dummy inputs of `consumer`: strictly earlier in the
    /// current topological order, or any registered output. Excludes ports,
    /// config bits and the consumer's own vertices.
    fn dummy_source_pool(&self, consumer_comb: VertexId, exclude: &[VertexId]) -> Vec<VertexId> {
        let pos = self.work.topological_positions().expect("acyclic during pipeline");
        let anchor = pos[consumer_comb as usize];
        self.work
            .iter()
            .filter(|v| {
                !matches!(v.kind, VertexKind::Output | VertexKind::ConfigBit { .. })
                    && !exclude.contains(&v.id)
                    && (v.kind.is_register() || pos[v.id as usize] < anchor)
            })
            .map(|v| v.id)
            .collect()
    }

    /// Pads a table up to `width` with fresh dummy inputs appended at the
    /// end. Sources come from at-or-before `anchor` in the current
    /// topological order, or from registered outputs; with no anchor (a
    /// block nothing depends on combinationally) any non-port vertex
    /// qualifies.
    fn pad_to_width(
        &mut self,
        comb_inputs: &mut Vec<VertexId>,
        roles: &mut Vec<Role>,
        bits: &mut Vec<bool>,
        width: usize,
        rng: &mut StreamRng,
        exclude: &[VertexId],
        anchor: Option<VertexId>,
    ) {
        if comb_inputs.len() >= width {
            return;
        }
        let pos = self.work.topological_positions().expect("acyclic during pipeline");
        let anchor_pos = anchor.map(|a| pos[a as usize]).unwrap_or(usize::MAX);
        let pool: Vec<VertexId> = self
            .work
            .iter()
            .filter(|v| {
                !matches!(v.kind, VertexKind::Output | VertexKind::ConfigBit { .. })
                    && !exclude.contains(&v.id)
                    && (v.kind.is_register() || pos[v.id as usize] <= anchor_pos)
            })
            .map(|v| v.id)
            .collect();
        while comb_inputs.len() < width {
            if pool.is_empty() {
                break;
            }
            let src = pool[rng.range(pool.len())];
            let position = comb_inputs.len();
            *bits = extend_with_dummy(bits, position);
            comb_inputs.push(src);
            roles.push(Role::Dummy);
        }
    }

    fn redact_boolean(
        &mut self,
        root: VertexId,
        r_size: usize,
        rng: &mut StreamRng,
    ) -> Result<(), RedactError> {
        let mffc = self.orig.extract_mffc(root)?;
        let (cone, support) = self.grow_cone(root, &mffc, r_size, None);
        let bits0 = encode_truth_table(&self.work, root, &cone, &support)?;
        let elem = self.elements.len() as u32;
        let base_width = support.len().max(self.params.gamma_min as usize);

        let mut inputs = support.clone();
        let mut roles: Vec<Role> = vec![Role::Functional; support.len()];
        let mut bits = bits0;
        let exclude: Vec<VertexId> = cone.iter().copied().collect();
        self.pad_to_width(&mut inputs, &mut roles, &mut bits, base_width, rng, &exclude, Some(root));

        let width = inputs.len() as u8;
        let tmp = self.names.fresh("lut", elem as u64);
        let lut = self
            .work
            .add_vertex(VertexKind::Clut { width, elem }, inputs, tmp)?;
        let root_name = self.work.vertex(root).name.clone();
        self.work.rewire_consumers(root, lut, &[]);
        self.retire_cone(&cone, elem)?;
        self.work.rename_vertex(lut, root_name);

        self.elements.push(Element {
            id: elem,
            kind: ElementKind::Clut,
            comb_vertex: lut,
            reg_vertex: None,
            bits,
            roles,
            select_index: 0,
            base_width: width,
            dummies_added: 0,
            output_inverted: false,
        });
        self.element_root.insert(elem, root);
        Ok(())
    }

    fn redact_sequential(
        &mut self,
        ff: VertexId,
        r_size: usize,
        rng: &mut StreamRng,
    ) -> Result<(), RedactError> {
        let mffc = self.orig.extract_mffc(ff)?;
        let driver = self.work.vertex(ff).fanins[0];
        let driver_is_cone_root = self.work.get(driver).is_some()
            && matches!(&self.work.vertex(driver).kind, VertexKind::Gate(k) if !k.is_dff())
            && mffc.contains(&driver)
            && self.work.fanouts(driver).iter().all(|&c| c == ff);
        let elem = self.elements.len() as u32;

        let (cone, mut inputs, mut roles, mut bits, core_name) = if driver_is_cone_root {
            let (cone, support) = self.grow_cone(driver, &mffc, r_size, Some(ff));
            let bits = encode_truth_table(&self.work, driver, &cone, &support)?;
            let roles = vec![Role::Functional; support.len()];
            let name = self.work.vertex(driver).name.clone();
            (cone, support, roles, bits, name)
        } else {
            // Single-wire data input: identity pass-through.
            let name = self.names.fresh("csb", elem as u64);
            (
                BTreeSet::new(),
                vec![driver],
                vec![Role::Functional],
                vec![false, true],
                name,
            )
        };
        let base_width = inputs.len().max(self.params.gamma_min as usize);
        let mut exclude: Vec<VertexId> = cone.iter().copied().collect();
        exclude.push(ff);
        self.pad_to_width(
            &mut inputs,
            &mut roles,
            &mut bits,
            base_width,
            rng,
            &exclude,
            Some(driver),
        );

        let width = inputs.len() as u8;
        let tmp_core = self.names.fresh("csbc", elem as u64);
        let core = self
            .work
            .add_vertex(VertexKind::CsbCore { width, elem }, inputs, tmp_core)?;
        let ff_name = self.work.vertex(ff).name.clone();
        let tmp_reg = self.names.fresh("csbq", elem as u64);
        let reg = self.work.add_vertex(
            VertexKind::CsbReg { elem, source_ff: Some(ff_name.clone()) },
            vec![core],
            tmp_reg,
        )?;
        self.work.rewire_consumers(ff, reg, &[]);
        self.absorbed.insert(ff, elem);
        self.work.remove_vertex(ff)?;
        self.retire_cone(&cone, elem)?;
        self.work.rename_vertex(reg, ff_name);
        self.work.rename_vertex(core, core_name);

        self.elements.push(Element {
            id: elem,
            kind: ElementKind::Csb {
                reg_functional: true,
                source_ff: Some(self.work.vertex(reg).name.clone()),
                from_clut: false,
            },
            comb_vertex: core,
            reg_vertex: Some(reg),
            bits,
            roles,
            select_index: 0,
            base_width: width,
            dummies_added: 0,
            output_inverted: false,
        });
        self.element_root.insert(elem, ff);
        Ok(())
    }

    /// Removes absorbed cone members (consumers first) and records them.
    fn retire_cone(&mut self, cone: &BTreeSet<VertexId>, elem: u32) -> Result<(), RedactError> {
        for &m in cone {
            self.absorbed.insert(m, elem);
        }
        let mut remaining: BTreeSet<VertexId> = cone.clone();
        while !remaining.is_empty() {
            let ready: Vec<VertexId> = remaining
                .iter()
                .copied()
                .filter(|&m| self.work.fanouts(m).is_empty())
                .collect();
            assert!(!ready.is_empty(), "cone removal stuck; external consumer remains");
            for m in ready {
                self.work.remove_vertex(m)?;
                remaining.remove(&m);
            }
        }
        Ok(())
    }

    /// Decoy block placement: converts random lookup cells into blocks with
    /// a decoy flip-flop, and adds fully decoy pass-through blocks anchored
    /// on flip-flop signals. Each success introduces exactly one new
    /// cut-point, counted in `n_a`/`n_b`.
    fn place_dummy_csbs(&mut self) -> Result<(), RedactError> {
        let p = self.params;
        let mut rng = StreamRng::new(self.seed, Stage::DummyCsb);
        let cap = p.gamma_min as usize + p.d_max as usize;

        // Type a: convert a lookup cell; its table keeps driving the
        // original loads combinationally while a new decoy flip-flop
        // registers it for a dummy binding of a later element.
        let clut_count = self
            .elements
            .iter()
            .filter(|e| matches!(e.kind, ElementKind::Clut))
            .count();
        let modulus = (p.gamma_a_max * clut_count as f64).ceil() as u64;
        let raw = rng.next_u32() as u64;
        let n_a_draws = if modulus == 0 { 0 } else { raw % modulus };
        for _ in 0..n_a_draws {
            let cluts: Vec<u32> = self
                .elements
                .iter()
                .filter(|e| matches!(e.kind, ElementKind::Clut))
                .map(|e| e.id)
                .collect();
            if cluts.is_empty() {
                break;
            }
            let pick = cluts[rng.range(cluts.len())];
            let hosts: Vec<u32> = self
                .elements
                .iter()
                .filter(|e| e.id > pick && e.is_lut_like() && e.width() < cap)
                .map(|e| e.id)
                .collect();
            if hosts.is_empty() {
                continue; // unsuitable pick; the iteration is still consumed
            }
            let host = hosts[rng.range(hosts.len())];
            let reg_name = self.names.fresh("dq", pick as u64);
            let core_v = self.elements[pick as usize].comb_vertex;
            let reg = self.work.add_vertex(
                VertexKind::CsbReg { elem: pick, source_ff: None },
                vec![core_v],
                reg_name,
            )?;
            let width = self.elements[pick as usize].width() as u8;
            self.work
                .set_kind(core_v, VertexKind::CsbCore { width, elem: pick });
            {
                let e = &mut self.elements[pick as usize];
                e.kind = ElementKind::Csb {
                    reg_functional: false,
                    source_ff: None,
                    from_clut: true,
                };
                e.reg_vertex = Some(reg);
            }
            self.add_dummy_binding(host, reg, &mut rng);
            self.n_a += 1;
        }

        // Type b: a fully decoy block: a pass-through table reading a
        // flip-flop signal, registered by a decoy flip-flop that feeds a
        // dummy binding.
        let ff_count = self.orig.ff_ids().len();
        let modulus_b = (p.gamma_b_max * ff_count as f64).ceil() as u64;
        let raw_b = rng.next_u32() as u64;
        let n_b_draws = if modulus_b == 0 { 0 } else { raw_b % modulus_b };
        for _ in 0..n_b_draws {
            let anchors = self.orig.ff_ids();
            let anchor_orig = anchors[rng.range(anchors.len())];
            // The anchored signal in the working graph: the flip-flop if it
            // is still raw, else the registered output of its block.
            let anchor = if self.work.get(anchor_orig).is_some() {
                anchor_orig
            } else {
                let elem = self.absorbed[&anchor_orig];
                match self.elements[elem as usize].reg_vertex {
                    Some(r) => r,
                    None => continue,
                }
            };
            let hosts: Vec<u32> = self
                .elements
                .iter()
                .filter(|e| e.is_lut_like() && e.width() < cap)
                .map(|e| e.id)
                .collect();
            if hosts.is_empty() {
                continue;
            }
            let host = hosts[rng.range(hosts.len())];
            let elem = self.elements.len() as u32;
            let mut inputs = vec![anchor];
            let mut roles = vec![Role::Functional];
            let mut bits = vec![false, true];
            // Pads may come from anywhere: the new block has no consumers
            // on its combinational path, and its registered output is a cut
            // edge.
            self.pad_to_width(
                &mut inputs,
                &mut roles,
                &mut bits,
                p.gamma_min as usize,
                &mut rng,
                &[],
                None,
            );
            let width = inputs.len() as u8;
            let core_name = self.names.fresh("db", elem as u64);
            let core = self
                .work
                .add_vertex(VertexKind::CsbCore { width, elem }, inputs, core_name)?;
            let reg_name = self.names.fresh("dq", elem as u64);
            let reg = self.work.add_vertex(
                VertexKind::CsbReg { elem, source_ff: None },
                vec![core],
                reg_name,
            )?;
            self.elements.push(Element {
                id: elem,
                kind: ElementKind::Csb { reg_functional: false, source_ff: None, from_clut: false },
                comb_vertex: core,
                reg_vertex: Some(reg),
                bits,
                roles,
                select_index: 0,
                base_width: width,
                dummies_added: 0,
                output_inverted: false,
            });
            self.add_dummy_binding(host, reg, &mut rng);
            self.n_b += 1;
        }
        Ok(())
    }

    /// Wires `source` into a fresh dummy input of element `host` at a random
    /// position, doubling that element's table.
    fn add_dummy_binding(&mut self, host: u32, source: VertexId, rng: &mut StreamRng) {
        let e = &mut self.elements[host as usize];
        let position = rng.range(e.width() + 1);
        e.bits = extend_with_dummy(&e.bits, position);
        e.roles.insert(position, Role::Dummy);
        e.dummies_added += 1;
        let comb = e.comb_vertex;
        self.work.push_fanin(comb, position, source);
    }

    /// The per-element randomization pass: with probability one half each
    /// lookup cell (then each sequential block) gains 1..d_max dummy inputs,
    /// has its inputs reordered, and has its output inverted when every
    /// consumer can absorb the inversion.
    fn randomize_elements(&mut self) -> Result<(), RedactError> {
        let mut rng = StreamRng::new(self.seed, Stage::Randomize);
        let cluts: Vec<u32> = self
            .elements
            .iter()
            .filter(|e| matches!(e.kind, ElementKind::Clut))
            .map(|e| e.id)
            .collect();
        self.randomize_pass(&mut rng, &cluts);
        let csbs: Vec<u32> = self
            .elements
            .iter()
            .filter(|e| match &e.kind {
                ElementKind::Csb { from_clut, .. } => {
                    self.params.randomize_converted || !from_clut
                }
                _ => false,
            })
            .map(|e| e.id)
            .collect();
        self.randomize_pass(&mut rng, &csbs);
        Ok(())
    }

    fn randomize_pass(&mut self, rng: &mut StreamRng, ids: &[u32]) {
        let cap = self.params.width_cap();
        for &id in ids {
            if rng.next_u32() % 2 != 0 {
                continue;
            }
            // Dummy-input expansion.
            if self.params.d_max > 0 {
                let want = 1 + rng.range(self.params.d_max as usize);
                for _ in 0..want {
                    if self.elements[id as usize].width() >= cap {
                        break;
                    }
                    let comb = self.elements[id as usize].comb_vertex;
                    let mut exclude = vec![comb];
                    if let Some(r) = self.elements[id as usize].reg_vertex {
                        exclude.push(r);
                    }
                    let pool = self.dummy_source_pool(comb, &exclude);
                    if pool.is_empty() {
                        break;
                    }
                    let src = pool[rng.range(pool.len())];
                    let e = &mut self.elements[id as usize];
                    let position = rng.range(e.width() + 1);
                    e.bits = extend_with_dummy(&e.bits, position);
                    e.roles.insert(position, Role::Dummy);
                    e.dummies_added += 1;
                    self.work.push_fanin(comb, position, src);
                }
            }
            // Input reordering.
            {
                let w = self.elements[id as usize].width();
                let mut perm: Vec<usize> = (0..w).collect();
                rng.shuffle(&mut perm);
                let e = &mut self.elements[id as usize];
                e.bits = permute_bits(&e.bits, &perm);
                let mut new_roles = vec![Role::Dummy; w];
                for (j, &np) in perm.iter().enumerate() {
                    new_roles[np] = e.roles[j];
                }
                e.roles = new_roles;
                let comb = e.comb_vertex;
                self.work.permute_fanins(comb, &perm);
            }
            // Output inversion, only when absorbable.
            self.try_invert_output(id);
        }
    }

    /// Inverts element `id`'s table when every fanout either is a dummy
    /// binding (inversion-immune) or a functional input of another cell
    /// (absorbed by swapping that cell's cofactors). A registered output
    /// with functional consumers blocks inversion: the zero reset state has
    /// no complemented counterpart.
    fn try_invert_output(&mut self, id: u32) {
        let e = &self.elements[id as usize];
        let comb = e.comb_vertex;
        let reg = e.reg_vertex;
        let vertex_elem: BTreeMap<VertexId, u32> = self
            .elements
            .iter()
            .map(|el| (el.comb_vertex, el.id))
            .collect();

        // (consumer element, position) pairs needing cofactor swaps.
        let mut swaps: Vec<(u32, usize)> = Vec::new();
        // Combinational output: functional bindings absorb by cofactor
        // swap, dummy bindings are immune, anything else blocks.
        for &c in self.work.fanouts(comb) {
            if Some(c) == reg {
                continue; // internal edge to the element's own register
            }
            let Some(&ce) = vertex_elem.get(&c) else {
                return;
            };
            let cons = &self.elements[ce as usize];
            if matches!(cons.kind, ElementKind::Cpi) {
                return;
            }
            for (pos, &f) in self.work.vertex(c).fanins.iter().enumerate() {
                if f == comb {
                    match cons.roles[pos] {
                        Role::Functional => swaps.push((ce, pos)),
                        Role::Dummy => {}
                    }
                }
            }
        }
        // Registered output: the zero reset state has no complemented
        // counterpart, so only dummy bindings may observe it.
        if let Some(r) = reg {
            for &c in self.work.fanouts(r) {
                let Some(&ce) = vertex_elem.get(&c) else {
                    return;
                };
                let cons = &self.elements[ce as usize];
                if matches!(cons.kind, ElementKind::Cpi) {
                    return;
                }
                for (pos, &f) in self.work.vertex(c).fanins.iter().enumerate() {
                    if f == r && cons.roles[pos] == Role::Functional {
                        return;
                    }
                }
            }
        }
        let e = &mut self.elements[id as usize];
        e.bits = invert_bits(&e.bits);
        e.output_inverted = true;
        for (ce, pos) in swaps {
            let cons = &mut self.elements[ce as usize];
            cons.bits = swap_cofactors(&cons.bits, pos);
        }
    }

    /// Interconnect randomization: a fraction of cell outputs each get a
    /// two-leg programmable mux whose other leg reads a decoy signal from
    /// earlier in the topology.
    fn place_cpis(&mut self) -> Result<(), RedactError> {
        let mut rng = StreamRng::new(self.seed, Stage::Cpi);
        let candidates: Vec<u32> = self
            .elements
            .iter()
            .filter(|e| e.is_lut_like())
            .map(|e| e.id)
            .collect();
        self.cpi_candidates = candidates.len();
        let r = (self.params.cpi_fraction * candidates.len() as f64).ceil() as usize;
        let mut shuffled = candidates.clone();
        rng.shuffle(&mut shuffled);
        let mut selected: Vec<u32> = shuffled.into_iter().take(r).collect();
        selected.sort_unstable();

        for owner in selected {
            let out_vertex = match &self.elements[owner as usize] {
                e if matches!(e.kind, ElementKind::Clut) => e.comb_vertex,
                e => e.reg_vertex.expect("sequential block has a register"),
            };
            // Decoy-leg pool. The mux output feeds the cell's former
            // consumers, so a combinational decoy must sit before every one
            // of them in the topology; register decoys are always cut.
            let pos = self.work.topological_positions()?;
            let anchor = if self.work.vertex(out_vertex).kind.is_register() {
                self.work
                    .fanouts(out_vertex)
                    .iter()
                    .map(|&c| pos[c as usize])
                    .min()
                    .unwrap_or(usize::MAX)
            } else {
                pos[out_vertex as usize]
            };
            let pool: Vec<VertexId> = self
                .work
                .iter()
                .filter(|v| {
                    !matches!(v.kind, VertexKind::Output | VertexKind::ConfigBit { .. })
                        && v.id != out_vertex
                        && (v.kind.is_register() || pos[v.id as usize] < anchor)
                })
                .map(|v| v.id)
                .collect();
            if pool.is_empty() {
                continue;
            }
            let decoy = pool[rng.range(pool.len())];
            let functional_leg = rng.range(2);
            let legs = if functional_leg == 0 {
                vec![out_vertex, decoy]
            } else {
                vec![decoy, out_vertex]
            };
            let elem = self.elements.len() as u32;
            let tmp = self.names.fresh("cpi", elem as u64);
            let cpi = self
                .work
                .add_vertex(VertexKind::Cpi { width: 2, elem }, legs, tmp)?;
            self.work.rewire_consumers(out_vertex, cpi, &[cpi]);
            // The mux takes over the net name; the cell output moves to a
            // derived internal name.
            let net = self.work.vertex(out_vertex).name.clone();
            let hidden = self.names.fresh(&format!("{net}__r"), elem as u64);
            self.work.rename_vertex(out_vertex, hidden);
            self.work.rename_vertex(cpi, net);
            let mut roles = vec![Role::Dummy; 2];
            roles[functional_leg] = Role::Functional;
            self.elements.push(Element {
                id: elem,
                kind: ElementKind::Cpi,
                comb_vertex: cpi,
                reg_vertex: None,
                bits: Vec::new(),
                roles,
                select_index: functional_leg,
                base_width: 2,
                dummies_added: 0,
                output_inverted: false,
            });
            self.cpi_placed += 1;
        }
        Ok(())
    }

    /// Input-coverage audit per processed cone: the cells decomposing one
    /// maximum fanout-free cone must offer at least as many input pins as
    /// the absorbed logic has external inputs.
    fn compute_audits(&self) -> Vec<ConeAudit> {
        let mut audits = Vec::new();
        for &root in &self.processed_roots {
            let mffc = match self.orig.extract_mffc(root) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let members: Vec<u32> = self
                .elements
                .iter()
                .filter(|e| {
                    self.element_root
                        .get(&e.id)
                        .is_some_and(|r| mffc.contains(r))
                })
                .map(|e| e.id)
                .collect();
            if members.is_empty() {
                continue;
            }
            let absorbed_here: BTreeSet<VertexId> = self
                .absorbed
                .iter()
                .filter(|(_, e)| members.contains(e))
                .map(|(&v, _)| v)
                .collect();
            let mut external: BTreeSet<VertexId> = BTreeSet::new();
            for &m in &absorbed_here {
                for &f in &self.orig.vertex(m).fanins {
                    if !absorbed_here.contains(&f) {
                        external.insert(f);
                    }
                }
            }
            let covered: usize = members
                .iter()
                .map(|&e| self.elements[e as usize].width())
                .sum();
            audits.push(ConeAudit {
                root: self.orig.vertex(root).name.clone(),
                cone_inputs: external.len(),
                covered_inputs: covered,
            });
        }
        audits
    }
}

/// Checks the input-coverage inequality over every audited cone.
pub fn audit_violations(audits: &[ConeAudit]) -> Vec<&ConeAudit> {
    audits
        .iter()
        .filter(|a| a.covered_inputs < a.cone_inputs)
        .collect()
}
