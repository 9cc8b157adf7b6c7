//! Outcome-tree engine shared by exact enumeration and Monte Carlo sampling.
//!
//! Every operation in a protocol is linear in the input, so a branch carries
//! the images `c0`, `c1` of `|0⟩` and `|1⟩` instead of a single state. The
//! actual register state is `α c0 + β c1`; both columns are rescaled together
//! so that it stays normalized, and the conditional probability of a child is
//! then just its squared norm. Success is decided from the columns alone (the
//! data map must be a multiple of the identity), which is what Bob can infer
//! from the classical record.

use std::sync::Arc;

use num_complex::Complex64;

use crate::bases::BasisParam;
use crate::bases::{self, BasisSet, Label};
use crate::error::{Error, Result};
use crate::gates::Pauli;
use crate::numeric::Neumaier;
use crate::statevec::{self, InputQubit, StateVector, TOL};
use crate::teleport::{self, bell_correction, ChannelParam, Correction, OutcomeBranch, Pattern};

type C = Complex64;

/// Default cap on the number of measurement leaves an exact run may expand.
pub const DEFAULT_BRANCH_BUDGET: u128 = 1 << 20;

/// Whether tree expansion and sampling fan out over threads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    #[default]
    Parallel,
}

impl Execution {
    pub(crate) fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// How the input enters the register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Prep {
    /// `α|0⟩ + β|1⟩` on one qubit.
    Plain,
    /// `α|00⟩ + β|11⟩`, the input CNOT-ed onto a fresh qubit.
    Masked,
}

/// Protocol stages as written by the protocol layer.
#[derive(Clone, Debug)]
pub(crate) enum Stage {
    /// Append a two-qubit channel, measure the data qubit and the channel's
    /// first half in `B_m`, then apply the Bell-outcome Pauli to what is left.
    Hop {
        basis: Arc<BasisSet>,
        channel: StateVector,
        stop_if_clean: bool,
    },
    /// Joint measurement on `targets`; the measured qubits leave the register.
    Measure {
        basis: Arc<BasisSet>,
        targets: Vec<usize>,
    },
    /// Bring a two-qubit register to `a|00⟩, b|11⟩` form with Paulis, undo
    /// the mask with a CNOT and drop the second qubit.
    Unmask,
}

/// Sparse `d_out × d_in` matrix.
#[derive(Clone, Debug)]
struct LinearMap {
    d_out: usize,
    entries: Vec<(u32, u32, C)>,
}

impl LinearMap {
    /// Column `i` is `f(|i⟩)`.
    fn from_columns(d_in: usize, d_out: usize, f: impl Fn(&[C]) -> Vec<C>) -> Self {
        let mut entries = Vec::new();
        for i in 0..d_in {
            let mut e = vec![C::new(0.0, 0.0); d_in];
            e[i] = C::new(1.0, 0.0);
            let col = f(&e);
            debug_assert_eq!(col.len(), d_out);
            for (r, v) in col.into_iter().enumerate() {
                if v != C::new(0.0, 0.0) {
                    entries.push((r as u32, i as u32, v));
                }
            }
        }
        LinearMap { d_out, entries }
    }

    fn apply_into(&self, v: &[C], out: &mut Vec<C>) {
        out.clear();
        out.resize(self.d_out, C::new(0.0, 0.0));
        for &(r, c, x) in &self.entries {
            out[r as usize] += x * v[c as usize];
        }
    }
}

/// One measurement outcome with its correction folded in.
#[derive(Clone, Debug)]
struct Outcome {
    label: Label,
    map: LinearMap,
    paulis: &'static [Pauli],
}

#[derive(Clone, Debug)]
enum Op {
    Measure {
        outcomes: Vec<Outcome>,
        qubits_out: usize,
        stop_if_clean: bool,
    },
    Unmask,
}

/// A protocol as a fixed sequence of stages.
#[derive(Clone, Debug)]
pub(crate) struct Plan {
    pub name: &'static str,
    /// Register width and the images of `|0⟩`, `|1⟩` before the first stage.
    start: (usize, Vec<C>, Vec<C>),
    stages: Vec<Stage>,
    ops: Vec<Op>,
    /// Send every surviving failure through an ancilla interaction.
    correct_failures: bool,
}

impl Plan {
    pub fn new(
        name: &'static str,
        prep: Prep,
        channels: Vec<StateVector>,
        stages: Vec<Stage>,
        correct_failures: bool,
    ) -> Plan {
        let z = C::new(0.0, 0.0);
        let one = C::new(1.0, 0.0);
        let (mut qubits, mut c0, mut c1) = match prep {
            Prep::Plain => (1, vec![one, z], vec![z, one]),
            Prep::Masked => (2, vec![one, z, z, z], vec![z, z, z, one]),
        };
        // channels are appended in order
        for ch in &channels {
            c0 = statevec::kron(&c0, ch.amplitudes());
            c1 = statevec::kron(&c1, ch.amplitudes());
            qubits += ch.num_qubits();
        }
        let start = (qubits, c0, c1);
        let mut ops = Vec::with_capacity(stages.len());
        for stage in &stages {
            ops.push(compile(stage, qubits));
            qubits = match ops.last() {
                Some(Op::Measure { qubits_out, .. }) => *qubits_out,
                _ => qubits - 1,
            };
        }
        Plan {
            name,
            start,
            stages,
            ops,
            correct_failures,
        }
    }

    /// Serial teleportations over two-qubit channels.
    pub fn relay(
        name: &'static str,
        hops: &[(BasisParam, ChannelParam)],
        stop_if_clean: bool,
        correct_failures: bool,
    ) -> Plan {
        let stages = hops
            .iter()
            .map(|&(m, n)| Stage::Hop {
                basis: Arc::new(bases::bell_basis(m.value()).expect("validated parameter")),
                channel: teleport::channel_state(n),
                stop_if_clean,
            })
            .collect();
        Plan::new(name, Prep::Plain, Vec::new(), stages, correct_failures)
    }

    /// Upper bound on measurement leaves (ancilla outcomes not counted).
    pub fn leaf_bound(&self) -> u128 {
        self.ops.iter().fold(1u128, |acc, op| match op {
            Op::Measure { outcomes, .. } => acc.saturating_mul(outcomes.len() as u128),
            Op::Unmask => acc,
        })
    }

    pub fn hop_count(&self) -> usize {
        self.stages
            .iter()
            .filter(|s| matches!(s, Stage::Hop { .. }))
            .count()
    }

    fn root(&self, record: bool) -> Node {
        let (qubits, c0, c1) = self.start.clone();
        Node {
            qubits,
            c0,
            c1,
            prob: 1.0,
            stage: 0,
            hops: 0,
            record,
            labels: Vec::new(),
            corrections: Vec::new(),
        }
    }
}

fn compile(stage: &Stage, qubits: usize) -> Op {
    match stage {
        Stage::Hop {
            basis,
            channel,
            stop_if_clean,
        } => {
            assert_eq!(qubits, 1, "hop expects a single data qubit");
            let outcomes = basis
                .elements()
                .iter()
                .map(|el| {
                    let paulis = bell_correction(&el.label);
                    let map = LinearMap::from_columns(2, 2, |e| {
                        let full = statevec::kron(e, channel.amplitudes());
                        let mut out = statevec::contract(&full, 3, el.state.amplitudes(), &[0, 1]);
                        for &g in paulis {
                            out = statevec::apply_matrix(&out, 1, &g.matrix(), &[0]);
                        }
                        out
                    });
                    Outcome {
                        label: el.label.clone(),
                        map,
                        paulis,
                    }
                })
                .collect();
            Op::Measure {
                outcomes,
                qubits_out: 1,
                stop_if_clean: *stop_if_clean,
            }
        }
        Stage::Measure { basis, targets } => {
            let out_q = qubits - targets.len();
            let outcomes = basis
                .elements()
                .iter()
                .map(|el| Outcome {
                    label: el.label.clone(),
                    map: LinearMap::from_columns(1 << qubits, 1 << out_q, |e| {
                        statevec::contract(e, qubits, el.state.amplitudes(), targets)
                    }),
                    paulis: &[],
                })
                .collect();
            Op::Measure {
                outcomes,
                qubits_out: out_q,
                stop_if_clean: false,
            }
        }
        Stage::Unmask => {
            assert_eq!(qubits, 2, "unmask expects two qubits");
            Op::Unmask
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    qubits: usize,
    c0: Vec<C>,
    c1: Vec<C>,
    /// Absolute probability of reaching this node.
    prob: f64,
    stage: usize,
    hops: usize,
    record: bool,
    labels: Vec<Label>,
    corrections: Vec<Correction>,
}

/// A resolved branch.
#[derive(Clone, Debug)]
pub(crate) struct Leaf {
    pub labels: Vec<Label>,
    pub corrections: Vec<Correction>,
    pub probability: f64,
    /// Normalized final register, absent for null branches.
    pub state: Option<(usize, Vec<C>)>,
    pub success: bool,
    pub corrected: bool,
    /// Teleportation hops (or joint measurements) performed.
    pub depth: usize,
}

impl Leaf {
    pub fn into_branch(self) -> OutcomeBranch {
        let post_state = self
            .state
            .and_then(|(n, amps)| StateVector::new(n, amps).ok());
        OutcomeBranch {
            labels: self.labels,
            probability: self.probability,
            post_state,
            corrections_applied: self.corrections,
            success: self.success,
        }
    }
}

enum Step {
    Leaf(Leaf),
    Node(Node),
}

/// Aggregate of a set of leaves.
#[derive(Clone, Debug, Default)]
pub(crate) struct Summary {
    total: Neumaier,
    success: Neumaier,
    direct: Neumaier,
    direct_by_depth: Vec<Neumaier>,
    pub leaves: u64,
}

impl Summary {
    fn add(&mut self, leaf: &Leaf) {
        self.leaves += 1;
        self.total.add(leaf.probability);
        if leaf.success {
            self.success.add(leaf.probability);
            if !leaf.corrected {
                self.direct.add(leaf.probability);
                if self.direct_by_depth.len() <= leaf.depth {
                    self.direct_by_depth
                        .resize(leaf.depth + 1, Neumaier::default());
                }
                self.direct_by_depth[leaf.depth].add(leaf.probability);
            }
        }
    }

    fn merge(&mut self, other: Summary) {
        self.leaves += other.leaves;
        self.total.merge(&other.total);
        self.success.merge(&other.success);
        self.direct.merge(&other.direct);
        if self.direct_by_depth.len() < other.direct_by_depth.len() {
            self.direct_by_depth
                .resize(other.direct_by_depth.len(), Neumaier::default());
        }
        for (a, b) in self.direct_by_depth.iter_mut().zip(&other.direct_by_depth) {
            a.merge(b);
        }
    }

    pub fn total(&self) -> f64 {
        self.total.value()
    }

    pub fn success(&self) -> f64 {
        self.success.value()
    }

    pub fn direct(&self) -> f64 {
        self.direct.value()
    }

    /// Direct success probability by number of measurements; index 0 is
    /// unused by relay protocols.
    pub fn direct_by_depth(&self) -> Vec<f64> {
        self.direct_by_depth.iter().map(Neumaier::value).collect()
    }
}

/// Full tree: every leaf in depth-first order, plus the aggregate.
pub(crate) struct Enumeration {
    pub summary: Summary,
    pub leaves: Option<Vec<Leaf>>,
}

/// Expands every branch of `plan` for `input`.
pub(crate) fn enumerate(
    plan: &Plan,
    input: &InputQubit,
    budget: u128,
) -> Result<Vec<OutcomeBranch>> {
    let run = run_exact(plan, input, budget, true, Execution::Sequential)?;
    Ok(run
        .leaves
        .expect("collected")
        .into_iter()
        .map(Leaf::into_branch)
        .collect())
}

/// Exact expansion with optional leaf collection.
pub(crate) fn run_exact(
    plan: &Plan,
    input: &InputQubit,
    budget: u128,
    collect: bool,
    exec: Execution,
) -> Result<Enumeration> {
    let bound = plan.leaf_bound();
    if bound > budget {
        return Err(Error::BranchBudget {
            leaves: bound,
            budget,
        });
    }
    let (a, b) = (input.alpha(), input.beta());

    // Breadth-first until there is enough independent work, then depth-first
    // per frontier item. The frontier keeps tree order, so the result does
    // not depend on how the items are scheduled.
    const FRONTIER: usize = 256;
    let mut frontier = vec![Step::Node(plan.root(collect))];
    while frontier.len() < FRONTIER && frontier.iter().any(|s| matches!(s, Step::Node(_))) {
        let mut next = Vec::with_capacity(frontier.len() * 4);
        for step in frontier {
            match step {
                Step::Node(node) => expand(plan, node, a, b, &mut next)?,
                leaf => next.push(leaf),
            }
        }
        frontier = next;
    }

    let work = |step: Step| -> Result<(Summary, Vec<Leaf>)> {
        let mut summary = Summary::default();
        let mut leaves = Vec::new();
        dfs(plan, step, a, b, &mut |leaf| {
            summary.add(&leaf);
            if collect {
                leaves.push(leaf);
            }
        })?;
        Ok((summary, leaves))
    };

    let parts: Vec<Result<(Summary, Vec<Leaf>)>> = if exec.is_parallel() {
        par_map(frontier, work)
    } else {
        frontier.into_iter().map(work).collect()
    };

    let mut summary = Summary::default();
    let mut all = collect.then(Vec::new);
    for part in parts {
        let (s, l) = part?;
        summary.merge(s);
        if let Some(all) = all.as_mut() {
            all.extend(l);
        }
    }
    Ok(Enumeration {
        summary,
        leaves: all,
    })
}

#[cfg(feature = "parallel")]
fn par_map<F, T>(items: Vec<Step>, f: F) -> Vec<T>
where
    F: Fn(Step) -> T + Sync + Send,
    T: Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<F, T>(items: Vec<Step>, f: F) -> Vec<T>
where
    F: Fn(Step) -> T,
{
    items.into_iter().map(f).collect()
}

fn dfs(plan: &Plan, step: Step, a: C, b: C, emit: &mut dyn FnMut(Leaf)) -> Result<()> {
    let mut stack = vec![step];
    let mut children = Vec::new();
    while let Some(step) = stack.pop() {
        match step {
            Step::Leaf(l) => emit(l),
            Step::Node(n) => {
                expand(plan, n, a, b, &mut children)?;
                stack.extend(children.drain(..).rev());
            }
        }
    }
    Ok(())
}

/// Outcome of a single sampled trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Trajectory {
    pub success: bool,
    pub corrected: bool,
}

/// Walks one trajectory, drawing each outcome from its exact conditional
/// distribution by inverse CDF. `uniform` yields values in `[0, 1)`.
#[cfg(test)]
pub(crate) fn sample(
    plan: &Plan,
    input: &InputQubit,
    uniform: &mut dyn FnMut() -> f64,
) -> Result<Trajectory> {
    Sampler::new(plan, input).draw(uniform)
}

/// Trajectory sampler with buffers reused across draws.
pub(crate) struct Sampler<'p> {
    plan: &'p Plan,
    a: C,
    b: C,
    node: Node,
    kids: Vec<(Vec<C>, Vec<C>)>,
    conds: Vec<f64>,
}

impl<'p> Sampler<'p> {
    pub fn new(plan: &'p Plan, input: &InputQubit) -> Self {
        Sampler {
            plan,
            a: input.alpha(),
            b: input.beta(),
            node: plan.root(false),
            kids: Vec::new(),
            conds: Vec::with_capacity(16),
        }
    }

    /// One trajectory; `uniform` yields values in `[0, 1)`.
    pub fn draw(&mut self, uniform: &mut dyn FnMut() -> f64) -> Result<Trajectory> {
        let (plan, a, b) = (self.plan, self.a, self.b);
        let node = &mut self.node;
        let (q, c0, c1) = &plan.start;
        node.qubits = *q;
        node.c0.clone_from(c0);
        node.c1.clone_from(c1);
        node.stage = 0;
        node.hops = 0;
        loop {
            match plan.ops.get(node.stage) {
                Some(Op::Measure {
                    outcomes,
                    qubits_out,
                    stop_if_clean,
                }) => {
                    if self.kids.len() < outcomes.len() {
                        self.kids.resize_with(outcomes.len(), Default::default);
                    }
                    self.conds.clear();
                    for (o, (k0, k1)) in outcomes.iter().zip(self.kids.iter_mut()) {
                        o.map.apply_into(&node.c0, k0);
                        o.map.apply_into(&node.c1, k1);
                        self.conds.push(state_norm_sqr(k0, k1, a, b));
                    }
                    let pick = inverse_cdf(&self.conds, uniform());
                    let cond = self.conds[pick];
                    if cond < TOL.null_probability {
                        return Ok(Trajectory {
                            success: false,
                            corrected: false,
                        });
                    }
                    let (k0, k1) = &mut self.kids[pick];
                    std::mem::swap(&mut node.c0, k0);
                    std::mem::swap(&mut node.c1, k1);
                    let s = 1.0 / cond.sqrt();
                    node.c0.iter_mut().for_each(|x| *x *= s);
                    node.c1.iter_mut().for_each(|x| *x *= s);
                    node.qubits = *qubits_out;
                    node.stage += 1;
                    node.hops += 1;
                    if *stop_if_clean && is_clean(&node.c0, &node.c1) {
                        return Ok(Trajectory {
                            success: true,
                            corrected: false,
                        });
                    }
                }
                Some(Op::Unmask) => {
                    unmask(node)?;
                    node.stage += 1;
                }
                None => return finish_sampled(plan, node, a, b, uniform),
            }
        }
    }
}

/// Sampling counterpart of [`finish`]: same decisions, no records.
fn finish_sampled(
    plan: &Plan,
    node: &Node,
    a: C,
    b: C,
    uniform: &mut dyn FnMut() -> f64,
) -> Result<Trajectory> {
    if node.qubits != 1 {
        return Err(Error::Internal(format!(
            "{}: {} qubits left at the end of the plan",
            plan.name, node.qubits
        )));
    }
    let Some((x, y)) = diagonal(&node.c0, &node.c1) else {
        return Err(Error::UncorrectableShape);
    };
    // σz on the data qubit when the diagonal has opposite signs
    let sz = if (x * y.conj()).re < 0.0 { -1.0 } else { 1.0 };
    let c0 = [node.c0[0], node.c0[1] * sz];
    let c1 = [node.c1[0], node.c1[1] * sz];
    if is_clean(&c0, &c1) {
        return Ok(Trajectory {
            success: true,
            corrected: false,
        });
    }
    if !plan.correct_failures {
        return Ok(Trajectory {
            success: false,
            corrected: false,
        });
    }
    let (x, y) = (c0[0], c1[1]);
    if (x * y.conj()).im.abs() > TOL.structure * x.norm() * y.norm() {
        return Err(Error::UncorrectableShape);
    }
    let (pattern, n_eff) = if y.norm() <= x.norm() {
        (Pattern::A, y.norm() / x.norm())
    } else {
        (Pattern::B, x.norm() / y.norm())
    };
    let u = pattern.interaction(n_eff);
    let interact = |col: &[C; 2], aux: usize| -> [C; 2] {
        [0, 1].map(|d| u.get(2 * d + aux, 0) * col[0] + u.get(2 * d + aux, 2) * col[1])
    };
    let branch = |aux: usize| {
        let (k0, k1) = (interact(&c0, aux), interact(&c1, aux));
        (state_norm_sqr(&k0, &k1, a, b), k0, k1)
    };
    let (p0, k0, k1) = branch(0);
    let p1 = branch(1).0;
    let corrected = Trajectory {
        success: false,
        corrected: true,
    };
    if inverse_cdf(&[p0, p1], uniform()) == 1 || p0 < TOL.null_probability {
        return Ok(corrected);
    }
    Ok(Trajectory {
        success: is_clean(&k0, &k1),
        ..corrected
    })
}

fn inverse_cdf(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // rounding left `u` past the last edge
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

fn expand(plan: &Plan, mut node: Node, a: C, b: C, out: &mut Vec<Step>) -> Result<()> {
    match plan.ops.get(node.stage) {
        Some(Op::Measure { outcomes, .. }) => {
            for k in 0..outcomes.len() {
                measure_one(plan, &node, k, a, b, out);
            }
            Ok(())
        }
        Some(Op::Unmask) => {
            unmask(&mut node)?;
            node.stage += 1;
            out.push(Step::Node(node));
            Ok(())
        }
        None => finish(plan, node, a, b, out),
    }
}

/// Child of `node` for outcome `k` of the current measurement.
fn measure_one(plan: &Plan, node: &Node, k: usize, a: C, b: C, out: &mut Vec<Step>) {
    let Some(Op::Measure {
        outcomes,
        qubits_out,
        stop_if_clean,
    }) = plan.ops.get(node.stage)
    else {
        unreachable!("called on a measurement stage")
    };
    let o = &outcomes[k];
    let mut k0 = Vec::new();
    let mut k1 = Vec::new();
    o.map.apply_into(&node.c0, &mut k0);
    o.map.apply_into(&node.c1, &mut k1);
    let cond = state_norm_sqr(&k0, &k1, a, b);
    let mut labels = Vec::new();
    let mut corrections = Vec::new();
    if node.record {
        labels.reserve(node.labels.len() + 1);
        labels.extend(node.labels.iter().cloned());
        labels.push(o.label.clone());
        corrections = node.corrections.clone();
    }
    let prob = node.prob * cond;
    if cond < TOL.null_probability {
        out.push(Step::Leaf(Leaf {
            labels,
            corrections,
            probability: prob,
            state: None,
            success: false,
            corrected: false,
            depth: node.hops + 1,
        }));
        return;
    }
    if node.record {
        corrections.extend(
            o.paulis
                .iter()
                .map(|&gate| Correction::Pauli { qubit: 0, gate }),
        );
    }
    let s = 1.0 / cond.sqrt();
    k0.iter_mut().for_each(|x| *x *= s);
    k1.iter_mut().for_each(|x| *x *= s);
    let child = Node {
        qubits: *qubits_out,
        c0: k0,
        c1: k1,
        prob,
        stage: node.stage + 1,
        hops: node.hops + 1,
        record: node.record,
        labels,
        corrections,
    };
    if *stop_if_clean && is_clean(&child.c0, &child.c1) {
        out.push(Step::Leaf(success_leaf(child, a, b, false)));
    } else {
        out.push(Step::Node(child));
    }
}

fn state_norm_sqr(c0: &[C], c1: &[C], a: C, b: C) -> f64 {
    c0.iter()
        .zip(c1)
        .map(|(x, y)| (a * x + b * y).norm_sqr())
        .sum()
}

/// In-place Pauli on qubit `q` of an `n`-qubit vector.
fn pauli_in_place(v: &mut [C], n: usize, q: usize, gate: Pauli) {
    let mask = 1usize << (n - 1 - q);
    match gate {
        Pauli::X => {
            for i in 0..v.len() {
                if i & mask == 0 {
                    v.swap(i, i | mask);
                }
            }
        }
        Pauli::Z => {
            for (i, x) in v.iter_mut().enumerate() {
                if i & mask != 0 {
                    *x = -*x;
                }
            }
        }
    }
}

fn pauli_node(node: &mut Node, q: usize, gate: Pauli) {
    pauli_in_place(&mut node.c0, node.qubits, q, gate);
    pauli_in_place(&mut node.c1, node.qubits, q, gate);
    if node.record {
        node.corrections.push(Correction::Pauli { qubit: q, gate });
    }
}

fn scale_of(c0: &[C], c1: &[C]) -> f64 {
    c0.iter().chain(c1).map(|x| x.norm()).fold(0.0, f64::max)
}

/// Diagonal entries of a single-qubit map, if it is diagonal.
fn diagonal(c0: &[C], c1: &[C]) -> Option<(C, C)> {
    let tol = TOL.equality * scale_of(c0, c1);
    (c0[1].norm() <= tol && c1[0].norm() <= tol).then_some((c0[0], c1[1]))
}

/// `c0 = λ|0⟩`, `c1 = λ|1⟩` for some `λ ≠ 0`.
fn is_clean(c0: &[C], c1: &[C]) -> bool {
    match diagonal(c0, c1) {
        Some((x, y)) => {
            let scale = x.norm().max(y.norm());
            scale > 0.0 && (x - y).norm() <= TOL.equality * scale
        }
        None => false,
    }
}

fn leaf_of(node: Node, a: C, b: C, success: bool, corrected: bool) -> Leaf {
    let state = node.record.then(|| {
        let amps = node
            .c0
            .iter()
            .zip(&node.c1)
            .map(|(x, y)| a * x + b * y)
            .collect();
        (node.qubits, amps)
    });
    Leaf {
        labels: node.labels,
        corrections: node.corrections,
        probability: node.prob,
        state,
        success,
        corrected,
        depth: node.hops,
    }
}

fn success_leaf(node: Node, a: C, b: C, corrected: bool) -> Leaf {
    leaf_of(node, a, b, true, corrected)
}

fn finish(plan: &Plan, mut node: Node, a: C, b: C, out: &mut Vec<Step>) -> Result<()> {
    if node.qubits != 1 {
        return Err(Error::Internal(format!(
            "{}: {} qubits left at the end of the plan",
            plan.name, node.qubits
        )));
    }
    let Some((x, y)) = diagonal(&node.c0, &node.c1) else {
        return Err(Error::UncorrectableShape);
    };
    // Opposite signs on the diagonal are a Z away from the same shape.
    if (x * y.conj()).re < 0.0 {
        pauli_node(&mut node, 0, Pauli::Z);
    }
    if is_clean(&node.c0, &node.c1) {
        out.push(Step::Leaf(success_leaf(node, a, b, false)));
        return Ok(());
    }
    if !plan.correct_failures {
        out.push(Step::Leaf(leaf_of(node, a, b, false, false)));
        return Ok(());
    }

    let (x, y) = (node.c0[0], node.c1[1]);
    if (x * y.conj()).im.abs() > TOL.structure * x.norm() * y.norm() {
        return Err(Error::UncorrectableShape);
    }
    let (pattern, n_eff) = if y.norm() <= x.norm() {
        (Pattern::A, y.norm() / x.norm())
    } else {
        (Pattern::B, x.norm() / y.norm())
    };
    let u = pattern.interaction(n_eff);
    if node.record {
        node.corrections
            .push(Correction::Interaction { pattern, n: n_eff });
        node.corrections.push(Correction::MeasureAncilla);
    }

    // Data qubit first, ancilla second, ancilla starting in |0⟩: the data
    // amplitude `d` feeds columns `2d` of the interaction.
    let interact = |col: &[C], aux: usize| -> Vec<C> {
        (0..2)
            .map(|d_out| {
                (0..2)
                    .map(|d_in| u.get(2 * d_out + aux, 2 * d_in) * col[d_in])
                    .sum()
            })
            .collect()
    };
    for (aux, label) in [(0, "aux0"), (1, "aux1")] {
        let mut k0 = interact(&node.c0, aux);
        let mut k1 = interact(&node.c1, aux);
        let cond = state_norm_sqr(&k0, &k1, a, b);
        let mut labels = Vec::new();
        let mut corrections = Vec::new();
        if node.record {
            labels = node.labels.clone();
            labels.push(Label::Borrowed(label));
            corrections = node.corrections.clone();
        }
        let prob = node.prob * cond;
        if cond < TOL.null_probability {
            out.push(Step::Leaf(Leaf {
                labels,
                corrections,
                probability: prob,
                state: None,
                success: false,
                corrected: true,
                depth: node.hops,
            }));
            continue;
        }
        let s = 1.0 / cond.sqrt();
        k0.iter_mut().for_each(|v| *v *= s);
        k1.iter_mut().for_each(|v| *v *= s);
        let child = Node {
            qubits: 1,
            c0: k0,
            c1: k1,
            prob,
            stage: node.stage,
            hops: node.hops,
            record: node.record,
            labels,
            corrections,
        };
        let success = aux == 0 && is_clean(&child.c0, &child.c1);
        out.push(Step::Leaf(leaf_of(child, a, b, success, true)));
    }
    Ok(())
}

fn unmask(node: &mut Node) -> Result<()> {
    if node.qubits != 2 {
        return Err(Error::Internal(format!(
            "unmask expects two qubits, register has {}",
            node.qubits
        )));
    }
    // Only σx moves amplitude between basis states, so the first fitting word
    // in search order is a pattern of σx flips: `c0` must sit on `|s⟩` and
    // `c1` on `|s ⊕ 11⟩`.
    let tol = TOL.equality * scale_of(&node.c0, &node.c1);
    let fits = |s: usize| {
        (0..4).all(|i| i == s || node.c0[i].norm() <= tol)
            && (0..4).all(|i| i == 3 ^ s || node.c1[i].norm() <= tol)
    };
    let Some(s) = [0b00, 0b01, 0b10, 0b11].into_iter().find(|&s| fits(s)) else {
        return Err(Error::UncorrectableShape);
    };
    for q in 0..2 {
        if s & (0b10 >> q) != 0 {
            pauli_node(node, q, Pauli::X);
        }
    }
    if (node.c0[0] * node.c1[3].conj()).re < 0.0 {
        pauli_node(node, 0, Pauli::Z);
    }
    // CNOT(0 → 1) sends |11⟩ to |10⟩, then qubit 1 is read as |0⟩.
    node.c0 = vec![node.c0[0], node.c0[3]];
    node.c1 = vec![node.c1[0], node.c1[3]];
    node.qubits = 1;
    if node.record {
        node.corrections.push(Correction::Cnot {
            control: 0,
            target: 1,
        });
        node.corrections
            .push(Correction::Release { qubit: 1, bit: 0 });
    }
    Ok(())
}

/// Lifts a measurement stage over a fresh basis.
pub(crate) fn measure(basis: BasisSet, targets: &[usize]) -> Stage {
    Stage::Measure {
        basis: Arc::new(basis),
        targets: targets.to_vec(),
    }
}
