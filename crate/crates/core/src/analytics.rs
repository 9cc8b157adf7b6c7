//! Closed-form success probabilities, the noisy-device efficiency model, the
//! distillation identity and the LOCC ceilings.
//!
//! Powers `n^(2^k)` are taken as `exp(2^k ln n)` and `1 - n^(2^k)` as
//! `-expm1(2^k ln n)`, so ratios like `(1-n²)/(1-n^(2^q))` stay accurate
//! near `n = 1`. Binomials live in log space.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ln_binomial, Neumaier};
use crate::statevec::InputQubit;

/// Names of the closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    PSuc1,
    PSuc2,
    PSuc3,
    ChainStep,
    ChainTotal,
    ChainTildeStep,
    ChainTildeTotal,
    NetMatchedDirect,
    NetMatchedTotal,
    NetStandardDirect,
    NetStandardTotal,
    DistillPer08,
    BoundOneCopy,
    BoundTwoCopy,
}

impl FormulaId {
    pub const ALL: [FormulaId; 14] = [
        FormulaId::PSuc1,
        FormulaId::PSuc2,
        FormulaId::PSuc3,
        FormulaId::ChainStep,
        FormulaId::ChainTotal,
        FormulaId::ChainTildeStep,
        FormulaId::ChainTildeTotal,
        FormulaId::NetMatchedDirect,
        FormulaId::NetMatchedTotal,
        FormulaId::NetStandardDirect,
        FormulaId::NetStandardTotal,
        FormulaId::DistillPer08,
        FormulaId::BoundOneCopy,
        FormulaId::BoundTwoCopy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaId::PSuc1 => "p_suc1",
            FormulaId::PSuc2 => "p_suc2",
            FormulaId::PSuc3 => "p_suc3",
            FormulaId::ChainStep => "chain_step",
            FormulaId::ChainTotal => "chain_total",
            FormulaId::ChainTildeStep => "chain_tilde_step",
            FormulaId::ChainTildeTotal => "chain_tilde_total",
            FormulaId::NetMatchedDirect => "net_matched_direct",
            FormulaId::NetMatchedTotal => "net_matched_total",
            FormulaId::NetStandardDirect => "net_standard_direct",
            FormulaId::NetStandardTotal => "net_standard_total",
            FormulaId::DistillPer08 => "distill_per08",
            FormulaId::BoundOneCopy => "bound_one_copy",
            FormulaId::BoundTwoCopy => "bound_two_copy",
        }
    }

    /// Whether the formula takes a number of teleportations.
    pub fn needs_q(self) -> bool {
        !matches!(
            self,
            FormulaId::PSuc1
                | FormulaId::PSuc2
                | FormulaId::PSuc3
                | FormulaId::BoundOneCopy
                | FormulaId::BoundTwoCopy
        )
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFormula(s.to_string()))
    }
}

fn check_n(n: f64) -> Result<()> {
    if (0.0..=1.0).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "n",
            value: n,
        })
    }
}

/// Evaluates a closed form. `q` must be given exactly when the formula
/// needs it, and be at least 1.
pub fn eval_formula(id: FormulaId, n: f64, q: Option<u32>) -> Result<f64> {
    check_n(n)?;
    let q = match (id.needs_q(), q) {
        (true, Some(0)) => {
            return Err(Error::OutOfRange {
                name: "q",
                value: 0.0,
            })
        }
        (true, Some(q)) => q,
        (true, None) => return Err(Error::InvalidArgument(format!("{id} requires q"))),
        (false, Some(_)) => return Err(Error::InvalidArgument(format!("{id} takes no q"))),
        (false, None) => 0,
    };
    Ok(match id {
        FormulaId::PSuc1 | FormulaId::BoundOneCopy => p_suc1(n),
        FormulaId::PSuc2 | FormulaId::PSuc3 => p_suc2(n),
        FormulaId::BoundTwoCopy => 2.0 * p_suc2(n),
        FormulaId::ChainStep => chain_step(n, q),
        FormulaId::ChainTotal => chain_total(n, q),
        FormulaId::ChainTildeStep => chain_tilde_step(n, q),
        FormulaId::ChainTildeTotal => chain_tilde_total(n, q),
        FormulaId::NetMatchedDirect => net_matched_direct(n, q),
        FormulaId::NetMatchedTotal => net_matched_total(n, q),
        FormulaId::NetStandardDirect => net_standard_direct(n, q),
        FormulaId::NetStandardTotal => net_standard_total(n, q),
        FormulaId::DistillPer08 => distill_per08(n, q),
    })
}

/// `2n²/(1+n²)`.
pub fn p_suc1(n: f64) -> f64 {
    2.0 * n * n / (1.0 + n * n)
}

/// `2n²/(1+n²)²`.
pub fn p_suc2(n: f64) -> f64 {
    let d = 1.0 + n * n;
    2.0 * n * n / (d * d)
}

/// `n^(2^k)`.
fn pow2k(n: f64, k: u32) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        (2f64.powi(k as i32) * n.ln()).exp()
    }
}

/// `(1-n²)/(1-n^(2^k))`, `k ≥ 1`, continuous at `n = 1`.
fn damping_ratio(n: f64, k: u32) -> f64 {
    if n == 1.0 {
        return 2f64.powi(1 - k as i32);
    }
    if n == 0.0 {
        return 1.0;
    }
    let l = n.ln();
    (2.0 * l).exp_m1() / (2f64.powi(k as i32) * l).exp_m1()
}

/// Success at the `q`-th teleportation of the halving-entanglement chain;
/// zero for `q = 1`.
pub fn chain_step(n: f64, q: u32) -> f64 {
    if q < 2 {
        return 0.0;
    }
    2.0 * pow2k(n, q - 1) * damping_ratio(n, q) / (1.0 + n * n)
}

/// Cumulative chain success over `q` teleportations.
pub fn chain_total(n: f64, q: u32) -> f64 {
    (2..=q)
        .map(|j| chain_step(n, j))
        .collect::<Neumaier>()
        .value()
}

/// Extra success from cleaning the chain's failures with an ancilla after
/// `q` teleportations.
pub fn chain_tilde_step(n: f64, q: u32) -> f64 {
    2.0 * pow2k(n, q) * damping_ratio(n, q) / (1.0 + n * n)
}

pub fn chain_tilde_total(n: f64, q: u32) -> f64 {
    let mut acc: Neumaier = (2..=q).map(|j| chain_step(n, j)).collect();
    acc.add(chain_tilde_step(n, q));
    acc.value()
}

/// `exp(ln C(a,b) + e ln n - d ln(1+n²))`, zero when `n = 0` and `e > 0`.
fn term(ln_c: f64, n: f64, e: u64, d: u64) -> f64 {
    if e == 0 {
        return (ln_c - d as f64 * n.mul_add(n, 1.0).ln()).exp();
    }
    if n == 0.0 {
        return 0.0;
    }
    (ln_c + e as f64 * n.ln() - d as f64 * (n * n).ln_1p()).exp()
}

/// `C(2q,q) n^(2q)/(1+n²)^(2q)`.
pub fn net_matched_direct(n: f64, q: u32) -> f64 {
    let q = q as u64;
    term(ln_binomial(2 * q, q), n, 2 * q, 2 * q)
}

pub fn net_matched_total(n: f64, q: u32) -> f64 {
    let q = q as u64;
    let mut acc = Neumaier::default();
    for j in 1..=q {
        acc.add(term(ln_binomial(2 * q, q - j), n, 2 * (q + j), 2 * q));
    }
    for j in 0..=q {
        acc.add(term(ln_binomial(2 * q, q + j), n, 2 * (q + j), 2 * q));
    }
    acc.value()
}

/// `C(q,q/2) n^q/(1+n²)^q` for even `q`, zero for odd `q`.
pub fn net_standard_direct(n: f64, q: u32) -> f64 {
    if q % 2 == 1 {
        return 0.0;
    }
    let q = q as u64;
    term(ln_binomial(q, q / 2), n, q, q)
}

pub fn net_standard_total(n: f64, q: u32) -> f64 {
    let mut acc = Neumaier::default();
    acc.add(net_standard_direct(n, q));
    let q = q as u64;
    let ln2 = std::f64::consts::LN_2;
    for j in 0..=(q - 1) / 2 {
        acc.add(term(ln_binomial(q, j) + ln2, n, 2 * (q - j), q));
    }
    acc.value()
}

/// Probability of distilling one maximally entangled pair from a chain of
/// `q` identical channels.
pub fn distill_per08(n: f64, q: u32) -> f64 {
    let f2 = 1.0 / (1.0 + n * n);
    let g2 = n * n * f2;
    if n == 0.0 {
        // only the j = 0 term survives
        return 0.0;
    }
    let ln_fg2 = f2.ln() + g2.ln();
    let mut acc = Neumaier::default();
    for j in 0..=((q as u64) - 1) / 2 {
        acc.add((ln_binomial(2 * j, j) + j as f64 * ln_fg2).exp());
    }
    // f² - g² = (1-n²)/(1+n²)
    let diff = (1.0 - n) * (1.0 + n) * f2;
    1.0 - diff * acc.value()
}

/// Both sides of the network/distillation identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistillCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

pub fn distill_equivalence(n: f64, q: u32) -> Result<DistillCheck> {
    check_n(n)?;
    if q == 0 {
        return Err(Error::OutOfRange {
            name: "q",
            value: 0.0,
        });
    }
    let lhs = net_standard_total(n, q);
    let rhs = distill_per08(n, q);
    Ok(DistillCheck {
        lhs,
        rhs,
        diff: (lhs - rhs).abs(),
    })
}

/// Device efficiencies: Bell measurement, unitary correction, generalized
/// Bell measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub eps_b: f64,
    pub eps_u: f64,
    pub eps_m: f64,
}

impl NoiseParams {
    pub fn new(eps_b: f64, eps_u: f64, eps_m: f64) -> Result<Self> {
        for (name, v) in [("eps_b", eps_b), ("eps_u", eps_u), ("eps_m", eps_m)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        Ok(NoiseParams {
            eps_b,
            eps_u,
            eps_m,
        })
    }

    pub fn ideal() -> Self {
        NoiseParams {
            eps_b: 1.0,
            eps_u: 1.0,
            eps_m: 1.0,
        }
    }
}

/// The three single-step correction strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Group {
    /// Ancilla interaction after a standard Bell measurement.
    One,
    /// Generalized Bell measurement with the matching condition.
    Two,
    /// Two standard teleportations.
    Three,
}

impl TryFrom<u8> for Group {
    type Error = Error;

    fn try_from(g: u8) -> Result<Self> {
        match g {
            1 => Ok(Group::One),
            2 => Ok(Group::Two),
            3 => Ok(Group::Three),
            _ => Err(Error::InvalidArgument(format!(
                "group must be 1, 2 or 3, got {g}"
            ))),
        }
    }
}

/// Ideal success probability scaled by the efficiencies each strategy
/// depends on.
pub fn noisy_success(group: Group, n: f64, noise: &NoiseParams) -> Result<f64> {
    check_n(n)?;
    Ok(match group {
        Group::One => noise.eps_b * noise.eps_u * p_suc1(n),
        Group::Two => noise.eps_m * p_suc2(n),
        Group::Three => noise.eps_b * noise.eps_b * p_suc2(n),
    })
}

/// One cell of the group-1 crossover map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossoverCell {
    pub r: f64,
    pub n: f64,
    /// `r(1+n²)`.
    pub ratio: f64,
    /// Group 1 strictly ahead.
    pub above: bool,
}

/// `r(1+n²)` over a grid, where `r` is the efficiency ratio between group 1
/// and the competing strategy (`ε_bε_u/ε_m` against group 2, `ε_u/ε_b`
/// against group 3).
pub fn crossover_surface(r_grid: &[f64], n_grid: &[f64]) -> Result<Vec<CrossoverCell>> {
    if r_grid.is_empty() || n_grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    for &r in r_grid {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::OutOfRange {
                name: "r",
                value: r,
            });
        }
    }
    for &n in n_grid {
        check_n(n)?;
    }
    let mut out = Vec::with_capacity(r_grid.len() * n_grid.len());
    for &r in r_grid {
        for &n in n_grid {
            let ratio = r * (1.0 + n * n);
            out.push(CrossoverCell {
                r,
                n,
                ratio,
                above: ratio > 1.0,
            });
        }
    }
    Ok(out)
}

/// `M² N²`-weighted single-step outcome probabilities in basis order
/// `Φ+, Φ-, Ψ+, Ψ-`.
pub fn single_step_probabilities(input: &InputQubit, m: f64, n: f64) -> [f64; 4] {
    let (a2, b2) = (input.alpha().norm_sqr(), input.beta().norm_sqr());
    let w = 1.0 / ((1.0 + m * m) * (1.0 + n * n));
    let eta1 = |x: f64, y: f64| w * (x + m * m * n * n * y);
    let eta2 = |x: f64, y: f64| w * (m * m * x + n * n * y);
    [eta1(a2, b2), eta2(a2, b2), eta2(b2, a2), eta1(b2, a2)]
}

/// Sixteen two-step outcome probabilities, row order `Φ+Φ+, Φ+Φ-, …, Ψ-Ψ-`.
///
/// Each outcome scales `(α, β)` by a fixed pair of coefficients, so a pair of
/// outcomes multiplies them; the weight is `M_a² M_b² N_a² N_b²`.
pub fn two_step_probabilities(
    input: &InputQubit,
    m_a: f64,
    n_a: f64,
    m_b: f64,
    n_b: f64,
) -> [f64; 16] {
    let (a2, b2) = (input.alpha().norm_sqr(), input.beta().norm_sqr());
    let w = 1.0 / ((1.0 + m_a * m_a) * (1.0 + n_a * n_a) * (1.0 + m_b * m_b) * (1.0 + n_b * n_b));
    let coeffs = |m: f64, n: f64| [(1.0, m * n), (m, n), (n, m), (m * n, 1.0)];
    let (first, second) = (coeffs(m_a, n_a), coeffs(m_b, n_b));
    let mut out = [0.0; 16];
    for (i, (x1, y1)) in first.iter().enumerate() {
        for (j, (x2, y2)) in second.iter().enumerate() {
            let (x, y) = (x1 * x2, y1 * y2);
            out[4 * i + j] = w * (x * x * a2 + y * y * b2);
        }
    }
    out
}
