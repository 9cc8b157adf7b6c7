//! End-to-end protocols, each run by exact enumeration of its outcome tree.
//!
//! Wire orders (qubit 0 first):
//!
//! * relay protocols: `[data]`, each hop appends a channel pair and measures
//!   the first two qubits, leaving the far end of the channel.
//! * `par_ghz3`: `[1, 3, 5, 4, 6]` with channels on `(3,5)` and `(4,6)`;
//!   qubits `1, 3, 4` are measured, Bob keeps `(5, 6)`.
//! * masked variants: `[1, 2, 3, 5, 4, 6]` where `(1, 2)` holds
//!   `α|00⟩ + β|11⟩` and `(3, 5, 4, 6)` holds either two channel pairs or one
//!   four-qubit `A+_n` resource. GHZ4 measurements act on `(1, 3, 2, 4)`;
//!   the double Bell measurement on `(1, 3)` then `(2, 4)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::analytics::{self, FormulaId};
use crate::bases::{self, BasisParam, Label};
use crate::engine::{self, Execution, Plan, Prep, Stage, DEFAULT_BRANCH_BUDGET};
use crate::error::{Error, Result};
use crate::statevec::{InputQubit, StateVector};
use crate::teleport::{self, ChannelParam, OutcomeBranch};

/// Registered protocols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolId {
    Group1,
    Group2,
    Group3,
    Chain1,
    Chain2,
    Chain3,
    Chain3Ancilla,
    NetMatched,
    NetStandard,
    ParGhz3,
    ParDoubleBell,
    ParGhz4,
    GhzChanGhz4M1,
    GhzChanGhz4Mn,
    GhzChanDoubleBell,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 15] = [
        ProtocolId::Group1,
        ProtocolId::Group2,
        ProtocolId::Group3,
        ProtocolId::Chain1,
        ProtocolId::Chain2,
        ProtocolId::Chain3,
        ProtocolId::Chain3Ancilla,
        ProtocolId::NetMatched,
        ProtocolId::NetStandard,
        ProtocolId::ParGhz3,
        ProtocolId::ParDoubleBell,
        ProtocolId::ParGhz4,
        ProtocolId::GhzChanGhz4M1,
        ProtocolId::GhzChanGhz4Mn,
        ProtocolId::GhzChanDoubleBell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolId::Group1 => "group1",
            ProtocolId::Group2 => "group2",
            ProtocolId::Group3 => "group3",
            ProtocolId::Chain1 => "chain1",
            ProtocolId::Chain2 => "chain2",
            ProtocolId::Chain3 => "chain3",
            ProtocolId::Chain3Ancilla => "chain3_ancilla",
            ProtocolId::NetMatched => "net_matched",
            ProtocolId::NetStandard => "net_standard",
            ProtocolId::ParGhz3 => "par_ghz3",
            ProtocolId::ParDoubleBell => "par_double_bell",
            ProtocolId::ParGhz4 => "par_ghz4",
            ProtocolId::GhzChanGhz4M1 => "ghz_chan_ghz4_m1",
            ProtocolId::GhzChanGhz4Mn => "ghz_chan_ghz4_mn",
            ProtocolId::GhzChanDoubleBell => "ghz_chan_double_bell",
        }
    }

    /// Comma-separated list of registered names.
    pub fn registered() -> String {
        ProtocolId::ALL.map(ProtocolId::name).join(", ")
    }

    /// Whether the protocol takes a number of teleportations `q`.
    pub fn needs_q(self) -> bool {
        matches!(
            self,
            ProtocolId::Chain1
                | ProtocolId::Chain2
                | ProtocolId::Chain3
                | ProtocolId::Chain3Ancilla
                | ProtocolId::NetMatched
                | ProtocolId::NetStandard
        )
    }

    /// Closed forms for the direct and corrected success, where known.
    pub fn formulas(self) -> (Option<FormulaId>, Option<FormulaId>) {
        use FormulaId::*;
        match self {
            ProtocolId::Group1 => (None, Some(PSuc1)),
            ProtocolId::Group2 => (Some(PSuc2), Some(PSuc2)),
            ProtocolId::Group3 => (Some(PSuc3), Some(PSuc3)),
            ProtocolId::Chain1 | ProtocolId::Chain2 => (None, None),
            ProtocolId::Chain3 => (Some(ChainTotal), Some(ChainTotal)),
            ProtocolId::Chain3Ancilla => (Some(ChainTotal), Some(ChainTildeTotal)),
            ProtocolId::NetMatched => (Some(NetMatchedDirect), Some(NetMatchedTotal)),
            ProtocolId::NetStandard => (Some(NetStandardDirect), Some(NetStandardTotal)),
            ProtocolId::ParGhz3
            | ProtocolId::ParDoubleBell
            | ProtocolId::ParGhz4
            | ProtocolId::GhzChanGhz4Mn => (Some(PSuc2), Some(PSuc1)),
            ProtocolId::GhzChanGhz4M1 | ProtocolId::GhzChanDoubleBell => (None, Some(PSuc1)),
        }
    }

    /// Whether the corrected success is claimed to reach `2n²/(1+n²)`.
    pub fn reaches_one_copy_bound(self) -> bool {
        self.formulas().1 == Some(FormulaId::PSuc1) || self == ProtocolId::Chain3Ancilla
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownProtocol {
                name: s.to_string(),
                registered: ProtocolId::registered(),
            })
    }
}

/// Closed-form expectations for one parameter point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Expected {
    pub direct: Option<f64>,
    pub corrected: Option<f64>,
}

/// Closed-form values for `id` at `(n, q)`.
///
/// The two GHZ-channel protocols measured at `m = 1` have no direct success
/// for `n < 1`, which is reported as `0`.
pub fn expected(id: ProtocolId, n: f64, q: Option<u32>) -> Result<Expected> {
    let (d, c) = id.formulas();
    let eval = |f: Option<FormulaId>| -> Result<Option<f64>> {
        f.map(|f| analytics::eval_formula(f, n, if f.needs_q() { q } else { None }))
            .transpose()
    };
    let mut out = Expected {
        direct: eval(d)?,
        corrected: eval(c)?,
    };
    if matches!(
        id,
        ProtocolId::GhzChanGhz4M1 | ProtocolId::GhzChanDoubleBell
    ) && n < 1.0
    {
        out.direct = Some(0.0);
    }
    Ok(out)
}

/// Parameters shared by every protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunParams {
    pub input: InputQubit,
    pub n: ChannelParam,
    /// Number of teleportations, for chain and network protocols only.
    pub q: Option<u32>,
}

impl RunParams {
    pub fn new(input: InputQubit, n: f64, q: Option<u32>) -> Result<Self> {
        Ok(RunParams {
            input,
            n: ChannelParam::new(n)?,
            q,
        })
    }

    fn q_for(&self, id: ProtocolId) -> Result<Option<u32>> {
        match (id.needs_q(), self.q) {
            (true, Some(0)) => Err(Error::OutOfRange {
                name: "q",
                value: 0.0,
            }),
            (true, None) => Err(Error::InvalidArgument(format!("{id} requires q"))),
            (false, Some(_)) => Err(Error::InvalidArgument(format!("{id} takes no q"))),
            (_, q) => Ok(q),
        }
    }
}

/// Knobs for exact runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Largest number of measurement leaves an exact run may expand.
    pub budget: u128,
    /// Keep every branch in the report; aggregates are always computed.
    pub keep_branches: bool,
    pub execution: Execution,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            budget: DEFAULT_BRANCH_BUDGET,
            keep_branches: true,
            execution: Execution::Parallel,
        }
    }
}

/// Channels used by a run, by type. Early-stopping chains report the full
/// schedule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EntanglementUse {
    pub bell: usize,
    pub ghz4: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportParams {
    pub n: f64,
    pub m_policy: String,
    pub q: Option<u32>,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolReport {
    pub protocol_name: String,
    pub params: ReportParams,
    pub direct_success: f64,
    pub corrected_success: f64,
    /// Sum over every leaf; 1 up to rounding.
    pub total_probability: f64,
    pub branch_count: u64,
    /// Direct success first reached at teleportation `j`, at index `j - 1`.
    pub step_success: Vec<f64>,
    pub entanglement_consumed: EntanglementUse,
    pub expected: Expected,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<OutcomeBranch>,
    /// Fidelity of each kept branch with the input; `None` for null branches.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub branch_fidelity: Vec<Option<f64>>,
}

impl ProtocolReport {
    /// First labels of branches that succeed without an ancilla.
    pub fn direct_success_labels(&self) -> Vec<Label> {
        let mut out: Vec<Label> = Vec::new();
        for b in self.branches.iter().filter(|b| b.is_direct_success()) {
            let l = &b.labels[0];
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
        out
    }

    /// `|enumeration - formula|` for the corrected total, when a formula exists.
    pub fn corrected_diff(&self) -> Option<f64> {
        self.expected
            .corrected
            .map(|e| (e - self.corrected_success).abs())
    }

    pub fn direct_diff(&self) -> Option<f64> {
        self.expected
            .direct
            .map(|e| (e - self.direct_success).abs())
    }
}

/// Serial teleportation schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSchedule {
    pub q: u32,
    pub m_seq: Vec<BasisParam>,
    pub n_seq: Vec<ChannelParam>,
    pub final_ancilla: bool,
}

impl ChainSchedule {
    pub fn new(
        m_seq: Vec<BasisParam>,
        n_seq: Vec<ChannelParam>,
        final_ancilla: bool,
    ) -> Result<Self> {
        if m_seq.len() != n_seq.len() {
            return Err(Error::InvalidArgument(format!(
                "schedule lengths differ: {} measurements, {} channels",
                m_seq.len(),
                n_seq.len()
            )));
        }
        if m_seq.is_empty() {
            return Err(Error::OutOfRange {
                name: "q",
                value: 0.0,
            });
        }
        Ok(ChainSchedule {
            q: m_seq.len() as u32,
            m_seq,
            n_seq,
            final_ancilla,
        })
    }

    /// Standard Bell measurements over identical channels.
    pub fn protocol1(n: ChannelParam, q: u32) -> Result<Self> {
        Self::new(vec![one(); q as usize], vec![n; q as usize], false)
    }

    /// Matched generalized Bell measurements over identical channels.
    pub fn protocol2(n: ChannelParam, q: u32) -> Result<Self> {
        Self::new(
            vec![n.as_basis_param(); q as usize],
            vec![n; q as usize],
            false,
        )
    }

    /// Standard Bell measurements, `n₁ = n₂ = n`, `n_j = n^(2^(j-2))`.
    pub fn protocol3(n: ChannelParam, q: u32, final_ancilla: bool) -> Result<Self> {
        let n_seq = (1..=q)
            .map(|j| {
                let e = if j <= 2 { 1.0 } else { 2f64.powi(j as i32 - 2) };
                ChannelParam::new(n.value().powf(e))
            })
            .collect::<Result<Vec<_>>>()?;
        let s = Self::new(vec![one(); q as usize], n_seq, final_ancilla)?;
        debug_assert!(s.is_protocol3(n));
        Ok(s)
    }

    fn is_protocol3(&self, n: ChannelParam) -> bool {
        self.n_seq.iter().enumerate().all(|(i, nj)| {
            let want = if i < 2 {
                n.value()
            } else {
                n.value().powf(2f64.powi(i as i32 - 1))
            };
            (nj.value() - want).abs() <= 1e-15
        }) && self.m_seq.iter().all(|m| m.value() == 1.0)
    }

    fn plan(&self, name: &'static str) -> Plan {
        let hops: Vec<_> = self
            .m_seq
            .iter()
            .copied()
            .zip(self.n_seq.iter().copied())
            .collect();
        Plan::relay(name, &hops, true, self.final_ancilla)
    }
}

fn one() -> BasisParam {
    BasisParam::new(1.0).expect("in range")
}

/// Variants with two parallel Bell channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParallelVariant {
    Ghz3,
    DoubleBell,
    Ghz4,
}

/// Variants with one four-qubit `A+_n` channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GhzChannelVariant {
    Ghz4MeasureM1,
    Ghz4MeasureMn,
    DoubleBellM1,
}

/// How a four-qubit channel is measured, for parameter choices outside the
/// registered ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GhzChannelMeasurement {
    Ghz4,
    DoubleBell,
}

/// Network topology variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NetworkMode {
    /// `m_j = n_j = n`.
    Matched,
    /// `m_j = 1`.
    Standard,
}

fn plan_for(id: ProtocolId, p: &RunParams) -> Result<(Plan, String, EntanglementUse)> {
    let q = p.q_for(id)?;
    let n = p.n;
    let bell = |k| EntanglementUse { bell: k, ghz4: 0 };
    Ok(match id {
        ProtocolId::Group1 => (
            Plan::relay("group1", &[(one(), n)], false, true),
            "m=1".into(),
            bell(1),
        ),
        ProtocolId::Group2 => (
            Plan::relay("group2", &[(n.as_basis_param(), n)], false, false),
            "m=n".into(),
            bell(1),
        ),
        ProtocolId::Group3 => (
            Plan::relay("group3", &[(one(), n), (one(), n)], false, false),
            "m=1".into(),
            bell(2),
        ),
        ProtocolId::Chain1
        | ProtocolId::Chain2
        | ProtocolId::Chain3
        | ProtocolId::Chain3Ancilla => {
            let q = q.expect("checked");
            let (schedule, policy) = match id {
                ProtocolId::Chain1 => (ChainSchedule::protocol1(n, q)?, "m_j=1, n_j=n"),
                ProtocolId::Chain2 => (ChainSchedule::protocol2(n, q)?, "m_j=n_j=n"),
                ProtocolId::Chain3 => (
                    ChainSchedule::protocol3(n, q, false)?,
                    "m_j=1, n_j=n^(2^(j-2))",
                ),
                _ => (
                    ChainSchedule::protocol3(n, q, true)?,
                    "m_j=1, n_j=n^(2^(j-2)), ancilla",
                ),
            };
            (
                schedule.plan(static_name(id)),
                policy.into(),
                bell(q as usize),
            )
        }
        ProtocolId::NetMatched | ProtocolId::NetStandard => {
            let q = q.expect("checked");
            let (mode, policy) = if id == ProtocolId::NetMatched {
                (NetworkMode::Matched, "m_j=n_j=n")
            } else {
                (NetworkMode::Standard, "m_j=1, n_j=n")
            };
            (network_plan(n, q, mode), policy.into(), bell(q as usize))
        }
        ProtocolId::ParGhz3 => (
            parallel_plan(n, ParallelVariant::Ghz3),
            "m=1".into(),
            bell(2),
        ),
        ProtocolId::ParDoubleBell => (
            parallel_plan(n, ParallelVariant::DoubleBell),
            "m=1".into(),
            bell(2),
        ),
        ProtocolId::ParGhz4 => (
            parallel_plan(n, ParallelVariant::Ghz4),
            "m=1".into(),
            bell(2),
        ),
        ProtocolId::GhzChanGhz4M1 | ProtocolId::GhzChanGhz4Mn | ProtocolId::GhzChanDoubleBell => {
            let (m, meas, policy) = match id {
                ProtocolId::GhzChanGhz4M1 => (one(), GhzChannelMeasurement::Ghz4, "m=1"),
                ProtocolId::GhzChanGhz4Mn => {
                    (n.as_basis_param(), GhzChannelMeasurement::Ghz4, "m=n")
                }
                _ => (one(), GhzChannelMeasurement::DoubleBell, "m=1"),
            };
            (
                ghz_channel_plan(static_name(id), n, m, meas),
                policy.into(),
                EntanglementUse { bell: 0, ghz4: 1 },
            )
        }
    })
}

fn static_name(id: ProtocolId) -> &'static str {
    id.name()
}

fn network_plan(n: ChannelParam, q: u32, mode: NetworkMode) -> Plan {
    let m = match mode {
        NetworkMode::Matched => n.as_basis_param(),
        NetworkMode::Standard => one(),
    };
    let name = match mode {
        NetworkMode::Matched => "net_matched",
        NetworkMode::Standard => "net_standard",
    };
    Plan::relay(name, &vec![(m, n); q as usize], false, true)
}

fn parallel_plan(n: ChannelParam, variant: ParallelVariant) -> Plan {
    let pair = teleport::channel_state(n);
    let m1 = one();
    let (name, prep, stages) = match variant {
        ParallelVariant::Ghz3 => (
            "par_ghz3",
            Prep::Plain,
            vec![engine::measure(bases::ghz3_family(m1), &[0, 1, 3])],
        ),
        ParallelVariant::DoubleBell => ("par_double_bell", Prep::Masked, double_bell_stages()),
        ParallelVariant::Ghz4 => (
            "par_ghz4",
            Prep::Masked,
            vec![engine::measure(bases::ghz4_family(m1), &[0, 2, 1, 4])],
        ),
    };
    let mut stages = stages;
    stages.push(Stage::Unmask);
    Plan::new(name, prep, vec![pair.clone(), pair], stages, true)
}

fn double_bell_stages() -> Vec<Stage> {
    let bell = Arc::new(bases::bell_basis(1.0).expect("in range"));
    vec![
        Stage::Measure {
            basis: bell.clone(),
            targets: vec![0, 2],
        },
        Stage::Measure {
            basis: bell,
            targets: vec![0, 2],
        },
    ]
}

/// `A+_n = (|0000⟩ + n|1111⟩)/√(1+n²)` on `(3, 5, 4, 6)`.
pub fn ghz4_channel_state(n: ChannelParam) -> StateVector {
    bases::ghz4_family(n.as_basis_param())
        .element("A+")
        .expect("A+ is in the family")
        .clone()
}

fn ghz_channel_plan(
    name: &'static str,
    n: ChannelParam,
    m: BasisParam,
    measurement: GhzChannelMeasurement,
) -> Plan {
    let mut stages = match measurement {
        GhzChannelMeasurement::Ghz4 => vec![engine::measure(bases::ghz4_family(m), &[0, 2, 1, 4])],
        GhzChannelMeasurement::DoubleBell => double_bell_stages(),
    };
    stages.push(Stage::Unmask);
    Plan::new(
        name,
        Prep::Masked,
        vec![ghz4_channel_state(n)],
        stages,
        true,
    )
}

fn input_parts(input: &InputQubit) -> ([f64; 2], [f64; 2]) {
    let (a, b) = (input.alpha(), input.beta());
    ([a.re, a.im], [b.re, b.im])
}

fn execute(
    name: &str,
    plan: &Plan,
    p: &RunParams,
    policy: String,
    consumed: EntanglementUse,
    expected: Expected,
    opts: &RunOptions,
) -> Result<ProtocolReport> {
    let run = engine::run_exact(
        plan,
        &p.input,
        opts.budget,
        opts.keep_branches,
        opts.execution,
    )?;
    let summary = &run.summary;
    let branches: Vec<OutcomeBranch> = run
        .leaves
        .unwrap_or_default()
        .into_iter()
        .map(|l| l.into_branch())
        .collect();
    let target = p.input.to_state();
    let branch_fidelity = branches
        .iter()
        .map(|b| b.post_state.as_ref().and_then(|s| s.fidelity(&target).ok()))
        .collect();
    let mut step_success = summary.direct_by_depth();
    if !step_success.is_empty() {
        step_success.remove(0);
    }
    step_success.resize(plan.hop_count().max(step_success.len()), 0.0);
    let (alpha, beta) = input_parts(&p.input);
    let corrected = summary.success().clamp(0.0, 1.0);
    Ok(ProtocolReport {
        protocol_name: name.to_string(),
        params: ReportParams {
            n: p.n.value(),
            m_policy: policy,
            q: p.q,
            alpha,
            beta,
        },
        direct_success: summary.direct().clamp(0.0, corrected),
        corrected_success: corrected,
        total_probability: summary.total(),
        branch_count: summary.leaves,
        step_success,
        entanglement_consumed: consumed,
        expected,
        branches,
        branch_fidelity,
    })
}

/// Runs a registered protocol.
pub fn run(id: ProtocolId, p: &RunParams, opts: &RunOptions) -> Result<ProtocolReport> {
    let (plan, policy, consumed) = plan_for(id, p)?;
    let exp = expected(id, p.n.value(), p.q)?;
    execute(id.name(), &plan, p, policy, consumed, exp, opts)
}

/// Runs a protocol by registered name.
pub fn run_named(name: &str, p: &RunParams, opts: &RunOptions) -> Result<ProtocolReport> {
    run(name.parse()?, p, opts)
}

pub(crate) fn sampling_plan(id: ProtocolId, p: &RunParams) -> Result<Plan> {
    Ok(plan_for(id, p)?.0)
}

fn params(input: &InputQubit, n: ChannelParam, q: Option<u32>) -> RunParams {
    RunParams {
        input: *input,
        n,
        q,
    }
}

/// Standard teleportation, failures cleaned by an ancilla.
pub fn run_group1(input: &InputQubit, n: ChannelParam) -> Result<ProtocolReport> {
    run(
        ProtocolId::Group1,
        &params(input, n, None),
        &RunOptions::default(),
    )
}

/// Matched generalized Bell measurement.
pub fn run_group2(input: &InputQubit, n: ChannelParam) -> Result<ProtocolReport> {
    run(
        ProtocolId::Group2,
        &params(input, n, None),
        &RunOptions::default(),
    )
}

/// Two standard teleportations.
pub fn run_group3(input: &InputQubit, n: ChannelParam) -> Result<ProtocolReport> {
    run(
        ProtocolId::Group3,
        &params(input, n, None),
        &RunOptions::default(),
    )
}

/// Serial teleportation that stops at the first clean outcome.
pub fn run_chain(
    input: &InputQubit,
    schedule: &ChainSchedule,
    opts: &RunOptions,
) -> Result<ProtocolReport> {
    let n = schedule.n_seq[0];
    let p = params(input, n, Some(schedule.q));
    let named = if schedule.is_protocol3(n) {
        Some(if schedule.final_ancilla {
            ProtocolId::Chain3Ancilla
        } else {
            ProtocolId::Chain3
        })
    } else {
        None
    };
    let (name, exp) = match named {
        Some(id) => (id.name(), expected(id, n.value(), Some(schedule.q))?),
        None => ("chain_custom", Expected::default()),
    };
    let policy = format!(
        "m={:?}, n={:?}",
        schedule.m_seq.iter().map(|m| m.value()).collect::<Vec<_>>(),
        schedule.n_seq.iter().map(|n| n.value()).collect::<Vec<_>>()
    );
    execute(
        name,
        &schedule.plan("chain"),
        &p,
        policy,
        EntanglementUse {
            bell: schedule.q as usize,
            ghz4: 0,
        },
        exp,
        opts,
    )
}

/// `q` teleportations through intermediate stations, corrections deferred
/// to Bob.
pub fn run_network(
    input: &InputQubit,
    n: ChannelParam,
    q: u32,
    mode: NetworkMode,
    opts: &RunOptions,
) -> Result<ProtocolReport> {
    let id = match mode {
        NetworkMode::Matched => ProtocolId::NetMatched,
        NetworkMode::Standard => ProtocolId::NetStandard,
    };
    run(id, &params(input, n, Some(q)), opts)
}

/// Two parallel Bell channels with equal `n`.
pub fn run_parallel(
    input: &InputQubit,
    n: ChannelParam,
    variant: ParallelVariant,
) -> Result<ProtocolReport> {
    let id = match variant {
        ParallelVariant::Ghz3 => ProtocolId::ParGhz3,
        ParallelVariant::DoubleBell => ProtocolId::ParDoubleBell,
        ParallelVariant::Ghz4 => ProtocolId::ParGhz4,
    };
    run(id, &params(input, n, None), &RunOptions::default())
}

/// As [`run_parallel`] with the channels given separately. Only the
/// matching case is supported.
pub fn run_parallel_channels(
    input: &InputQubit,
    n1: ChannelParam,
    n2: ChannelParam,
    variant: ParallelVariant,
) -> Result<ProtocolReport> {
    if n1 != n2 {
        return Err(Error::Unsupported(format!(
            "parallel channels with different entanglement ({} and {})",
            n1.value(),
            n2.value()
        )));
    }
    run_parallel(input, n1, variant)
}

/// One four-qubit `A+_n` channel.
pub fn run_ghz_channel(
    input: &InputQubit,
    n: ChannelParam,
    variant: GhzChannelVariant,
) -> Result<ProtocolReport> {
    let id = match variant {
        GhzChannelVariant::Ghz4MeasureM1 => ProtocolId::GhzChanGhz4M1,
        GhzChannelVariant::Ghz4MeasureMn => ProtocolId::GhzChanGhz4Mn,
        GhzChannelVariant::DoubleBellM1 => ProtocolId::GhzChanDoubleBell,
    };
    run(id, &params(input, n, None), &RunOptions::default())
}

/// Four-qubit channel with an arbitrary measurement parameter. No closed
/// forms are attached.
pub fn run_ghz_channel_custom(
    input: &InputQubit,
    n: ChannelParam,
    m: BasisParam,
    measurement: GhzChannelMeasurement,
) -> Result<ProtocolReport> {
    if m.value() == 0.0 && measurement == GhzChannelMeasurement::Ghz4 {
        return Err(Error::DegenerateBasis("ghz4_m"));
    }
    let plan = ghz_channel_plan("ghz_chan_custom", n, m, measurement);
    execute(
        "ghz_chan_custom",
        &plan,
        &params(input, n, None),
        format!("m={}", m.value()),
        EntanglementUse { bell: 0, ghz4: 1 },
        Expected::default(),
        &RunOptions::default(),
    )
}
