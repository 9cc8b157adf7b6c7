//! Invariant suites behind `teleport verify`.

use teleport_core::analytics;
use teleport_core::bases::{bell_basis, ghz3_basis, ghz4_basis};
use teleport_core::protocols::{self, ProtocolId};
use teleport_core::teleport::{unitary_u, unitary_v};
use teleport_core::{eval_formula, FormulaId, InputQubit, RunOptions, RunParams};

use crate::Suite;

struct Check {
    name: String,
    max_dev: f64,
    tol: f64,
    note: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, tol: f64) -> Self {
        Check {
            name: name.into(),
            max_dev: 0.0,
            tol,
            note: None,
        }
    }

    fn see(&mut self, dev: f64) {
        // NaN must fail
        if dev.is_nan() || dev > self.max_dev {
            self.max_dev = dev;
        }
    }

    fn passed(&self) -> bool {
        self.max_dev < self.tol
    }
}

/// Runs `suite`, printing one line per check; `Err` carries the failure
/// count.
pub fn run(suite: Suite, q_max: u32) -> Result<(), usize> {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Bases {
        checks.extend(bases());
    }
    if all || suite == Suite::Formulas {
        checks.extend(formulas());
    }
    if all || suite == Suite::Distill {
        checks.push(distill(q_max.max(1)));
    }
    if all || suite == Suite::Bounds {
        checks.extend(bounds());
    }
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed() { "PASS" } else { "FAIL" };
        failed += usize::from(!c.passed());
        print!(
            "{tag}  {:<40} max_dev={:.3e} tol={:.0e}",
            c.name, c.max_dev, c.tol
        );
        match &c.note {
            Some(n) => println!("  {n}"),
            None => println!(),
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(failed)
    }
}

fn grid(k: usize) -> impl Iterator<Item = f64> {
    (0..=k).map(move |i| i as f64 / k as f64)
}

fn bases() -> Vec<Check> {
    let mut gram = Check::new("bases/gram", 1e-12);
    let mut complete = Check::new("bases/completeness", 1e-12);
    let mut unitary = Check::new("bases/interaction_unitarity", 1e-12);
    for k in 1..=20 {
        let m = k as f64 / 20.0;
        for b in [bell_basis(m), ghz3_basis(m), ghz4_basis(m)] {
            match b {
                Ok(b) => {
                    gram.see(b.gram_deviation());
                    complete.see(b.completeness_deviation());
                }
                Err(_) => gram.see(f64::INFINITY),
            }
        }
    }
    for n in grid(19) {
        unitary.see(unitary_u(n).unitarity_deviation());
        unitary.see(unitary_v(n).unitarity_deviation());
    }
    gram.note = Some("B_m, GHZ3_m, GHZ4_m at 20 values of m".into());
    unitary.note = Some("U_n, V_n at 20 values of n".into());
    vec![gram, complete, unitary]
}

fn qs(id: ProtocolId) -> Vec<Option<u32>> {
    if id.needs_q() {
        (1..=6).map(Some).collect()
    } else {
        vec![None]
    }
}

fn quiet() -> RunOptions {
    RunOptions {
        keep_branches: false,
        ..RunOptions::default()
    }
}

fn formulas() -> Vec<Check> {
    let input = InputQubit::default();
    let mut out = Vec::new();
    for id in ProtocolId::ALL {
        let (d, c) = id.formulas();
        if d.is_none() && c.is_none() {
            continue;
        }
        let mut check = Check::new(format!("formulas/{id}"), 1e-12);
        let mut points = 0;
        // at n = 1 every branch is clean and the closed forms no longer apply
        for n in grid(20).filter(|&n| n < 1.0) {
            for q in qs(id) {
                let report =
                    RunParams::new(input, n, q).and_then(|p| protocols::run(id, &p, &quiet()));
                match report {
                    Ok(r) => {
                        check.see(r.corrected_diff().unwrap_or(0.0));
                        check.see(r.direct_diff().unwrap_or(0.0));
                        check.see((r.total_probability - 1.0).abs());
                        points += 1;
                    }
                    Err(_) => check.see(f64::INFINITY),
                }
            }
        }
        check.note = Some(format!("{points} points"));
        out.push(check);
    }
    out
}

fn distill(q_max: u32) -> Check {
    let mut c = Check::new("distill/network_identity", 1e-10);
    for k in 1..=19 {
        let n = k as f64 * 0.05;
        for q in 1..=q_max {
            match analytics::distill_equivalence(n, q) {
                Ok(d) => c.see(d.diff),
                Err(_) => c.see(f64::INFINITY),
            }
        }
    }
    c.note = Some(format!("n = 0.05..0.95, q = 1..{q_max}"));
    c
}

fn bounds() -> Vec<Check> {
    let input = InputQubit::default();
    // deviation is the excess over the one-copy ceiling
    let mut ceiling = Check::new("bounds/one_copy_ceiling", 1e-12);
    let mut below_two_copy = Check::new("bounds/below_two_copy_reference", 1e-12);
    for n in grid(20) {
        let one = eval_formula(FormulaId::BoundOneCopy, n, None).unwrap_or(f64::NAN);
        let two = eval_formula(FormulaId::BoundTwoCopy, n, None).unwrap_or(f64::NAN);
        for id in ProtocolId::ALL {
            for q in qs(id) {
                match RunParams::new(input, n, q).and_then(|p| protocols::run(id, &p, &quiet())) {
                    Ok(r) => {
                        ceiling.see((r.corrected_success - one).max(0.0));
                        below_two_copy.see((r.corrected_success - two).max(0.0));
                    }
                    Err(_) => ceiling.see(f64::INFINITY),
                }
            }
        }
    }
    ceiling.note = Some("every protocol at or below 2n²/(1+n²)".into());
    below_two_copy.note = Some("Q_suc = 4n²/(1+n²)² is a reference, not achieved".into());
    vec![ceiling, below_two_copy]
}
