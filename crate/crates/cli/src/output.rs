//! Text, CSV and JSON writers. Floats are written as the shortest decimal that
//! parses back to the same value.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use teleport_core::bases::BasisSet;
use teleport_core::sweep::SweepRow;
use teleport_core::{McConfig, McEstimate, ProtocolId, ProtocolReport, RunParams};

/// Standard output or a file.
pub enum Sink {
    Stdout(io::StdoutLock<'static>),
    File(BufWriter<File>),
}

impl Sink {
    pub fn open(path: Option<&Path>) -> io::Result<Sink> {
        Ok(match path {
            None => Sink::Stdout(io::stdout().lock()),
            Some(p) => Sink::File(BufWriter::new(File::create(p).map_err(|e| {
                io::Error::new(e.kind(), format!("cannot write {}: {e}", p.display()))
            })?)),
        })
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.flush()
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(s) => s.write(buf),
            Sink::File(f) => f.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(s) => s.flush(),
            Sink::File(f) => f.flush(),
        }
    }
}

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn opt_q(q: Option<u32>) -> String {
    q.map(|q| q.to_string()).unwrap_or_default()
}

fn csv_out(sink: &mut Sink) -> csv::Writer<&mut Sink> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

fn finish_csv(w: csv::Writer<&mut Sink>) -> io::Result<()> {
    w.into_inner().map_err(|e| e.into_error())?.flush()
}

fn json_out(sink: &mut Sink, v: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *sink, v)?;
    writeln!(sink)
}

fn with_noisy(header: &[&str], noisy: bool) -> Vec<String> {
    let mut h: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    if noisy {
        h.push("noisy".into());
    }
    h
}

pub fn report_text(sink: &mut Sink, r: &ProtocolReport, noisy: Option<f64>) -> io::Result<()> {
    let f12 = |x: f64| format!("{x:.12}");
    let mut lines = vec![
        ("protocol", r.protocol_name.clone()),
        ("n", num(r.params.n)),
        ("q", r.params.q.map_or("-".into(), |q| q.to_string())),
        ("m", r.params.m_policy.clone()),
        ("direct_success", f12(r.direct_success)),
        ("corrected_success", f12(r.corrected_success)),
        ("total_probability", f12(r.total_probability)),
        ("branch_count", r.branch_count.to_string()),
        ("formula", r.expected.corrected.map_or("-".into(), num)),
        (
            "abs_diff",
            r.corrected_diff()
                .map_or("-".into(), |d| format!("{d:.3e}")),
        ),
    ];
    if let Some(d) = r.direct_diff() {
        lines.push(("direct_abs_diff", format!("{d:.3e}")));
    }
    if let Some(x) = noisy {
        lines.push(("noisy", f12(x)));
    }
    for (k, v) in lines {
        writeln!(sink, "{k:<18} {v}")?;
    }
    Ok(())
}

pub fn report_csv(sink: &mut Sink, r: &ProtocolReport, noisy: Option<f64>) -> io::Result<()> {
    let mut w = csv_out(sink);
    w.write_record(with_noisy(
        &[
            "protocol",
            "n",
            "q",
            "direct",
            "corrected",
            "formula",
            "abs_diff",
            "branch_count",
            "total_probability",
        ],
        noisy.is_some(),
    ))?;
    let mut row = vec![
        r.protocol_name.clone(),
        num(r.params.n),
        opt_q(r.params.q),
        num(r.direct_success),
        num(r.corrected_success),
        opt(r.expected.corrected),
        opt(r.corrected_diff()),
        r.branch_count.to_string(),
        num(r.total_probability),
    ];
    if let Some(x) = noisy {
        row.push(num(x));
    }
    w.write_record(row)?;
    finish_csv(w)
}

pub fn branches_csv(sink: &mut Sink, r: &ProtocolReport) -> io::Result<()> {
    let mut w = csv_out(sink);
    w.write_record([
        "index",
        "labels",
        "probability",
        "success",
        "direct",
        "fidelity",
        "corrections",
    ])?;
    for (i, (b, f)) in r.branches.iter().zip(&r.branch_fidelity).enumerate() {
        let corrections: Vec<String> = b
            .corrections_applied
            .iter()
            .map(|c| c.to_string())
            .collect();
        w.write_record([
            i.to_string(),
            b.label_string(),
            num(b.probability),
            b.success.to_string(),
            b.is_direct_success().to_string(),
            opt(*f),
            corrections.join(" "),
        ])?;
    }
    finish_csv(w)
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    #[serde(flatten)]
    report: &'a ProtocolReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    noisy: Option<f64>,
}

pub fn report_json(sink: &mut Sink, report: &ProtocolReport, noisy: Option<f64>) -> io::Result<()> {
    json_out(sink, &ReportDoc { report, noisy })
}

#[derive(Serialize)]
pub struct McRow {
    protocol: &'static str,
    n: f64,
    q: Option<u32>,
    samples: u64,
    seed: u64,
    workers: usize,
    successes: u64,
    p_hat: f64,
    std_err: f64,
    exact: Option<f64>,
    z_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noisy: Option<f64>,
}

impl McRow {
    pub fn new(
        id: ProtocolId,
        p: &RunParams,
        config: McConfig,
        est: McEstimate,
        exact: Option<f64>,
        noisy: Option<f64>,
    ) -> Self {
        McRow {
            protocol: id.name(),
            n: p.n.value(),
            q: p.q,
            samples: config.samples,
            seed: config.seed,
            workers: config.workers,
            successes: est.successes,
            p_hat: est.p_hat,
            std_err: est.std_err,
            exact,
            z_score: exact.map(|e| est.z_score(e)),
            noisy,
        }
    }

    pub fn text(&self, sink: &mut Sink) -> io::Result<()> {
        writeln!(sink, "{:<18} {}", "protocol", self.protocol)?;
        writeln!(sink, "{:<18} {}", "n", num(self.n))?;
        writeln!(
            sink,
            "{:<18} {}",
            "q",
            self.q.map_or("-".into(), |q| q.to_string())
        )?;
        writeln!(
            sink,
            "{:<18} {} (seed {}, {} workers)",
            "samples", self.samples, self.seed, self.workers
        )?;
        writeln!(sink, "{:<18} {:.12}", "p_hat", self.p_hat)?;
        writeln!(sink, "{:<18} {:.3e}", "std_err", self.std_err)?;
        writeln!(
            sink,
            "{:<18} {}",
            "formula",
            self.exact.map_or("-".into(), num)
        )?;
        writeln!(
            sink,
            "{:<18} {}",
            "z_score",
            self.z_score.map_or("-".into(), |z| format!("{z:.3}"))
        )?;
        if let Some(x) = self.noisy {
            writeln!(sink, "{:<18} {x:.12}", "noisy")?;
        }
        Ok(())
    }

    pub fn csv(&self, sink: &mut Sink) -> io::Result<()> {
        let mut w = csv_out(sink);
        w.write_record(with_noisy(
            &[
                "protocol",
                "n",
                "q",
                "samples",
                "seed",
                "workers",
                "successes",
                "p_hat",
                "std_err",
                "formula",
                "z_score",
            ],
            self.noisy.is_some(),
        ))?;
        let mut row = vec![
            self.protocol.to_string(),
            num(self.n),
            opt_q(self.q),
            self.samples.to_string(),
            self.seed.to_string(),
            self.workers.to_string(),
            self.successes.to_string(),
            num(self.p_hat),
            num(self.std_err),
            opt(self.exact),
            opt(self.z_score),
        ];
        if let Some(x) = self.noisy {
            row.push(num(x));
        }
        w.write_record(row)?;
        finish_csv(w)
    }

    pub fn json(&self, sink: &mut Sink) -> io::Result<()> {
        json_out(sink, self)
    }
}

#[derive(Serialize)]
pub struct FormulaRow {
    pub protocol: &'static str,
    pub n: f64,
    pub q: Option<u32>,
    pub direct: Option<f64>,
    pub corrected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noisy: Option<f64>,
}

impl FormulaRow {
    pub fn text(&self, sink: &mut Sink) -> io::Result<()> {
        let show = |x: Option<f64>| x.map_or("-".into(), |x| format!("{x:.12}"));
        writeln!(sink, "{:<18} {}", "protocol", self.protocol)?;
        writeln!(sink, "{:<18} {}", "n", num(self.n))?;
        writeln!(
            sink,
            "{:<18} {}",
            "q",
            self.q.map_or("-".into(), |q| q.to_string())
        )?;
        writeln!(sink, "{:<18} {}", "direct", show(self.direct))?;
        writeln!(sink, "{:<18} {}", "corrected", show(self.corrected))?;
        if let Some(x) = self.noisy {
            writeln!(sink, "{:<18} {x:.12}", "noisy")?;
        }
        Ok(())
    }

    pub fn csv(&self, sink: &mut Sink) -> io::Result<()> {
        let mut w = csv_out(sink);
        w.write_record(with_noisy(
            &["protocol", "n", "q", "direct", "corrected"],
            self.noisy.is_some(),
        ))?;
        let mut row = vec![
            self.protocol.to_string(),
            num(self.n),
            opt_q(self.q),
            opt(self.direct),
            opt(self.corrected),
        ];
        if let Some(x) = self.noisy {
            row.push(num(x));
        }
        w.write_record(row)?;
        finish_csv(w)
    }

    pub fn json(&self, sink: &mut Sink) -> io::Result<()> {
        json_out(sink, self)
    }
}

pub const SWEEP_COLUMNS: [&str; 8] = [
    "n",
    "q",
    "direct",
    "corrected",
    "formula",
    "abs_diff",
    "p_hat",
    "std_err",
];

pub fn sweep_csv(sink: &mut Sink, rows: &[SweepRow], noisy: bool) -> io::Result<()> {
    let mut w = csv_out(sink);
    w.write_record(with_noisy(&SWEEP_COLUMNS, noisy))?;
    for r in rows {
        let mut rec = vec![
            num(r.n),
            opt_q(r.q),
            opt(r.direct),
            opt(r.corrected),
            opt(r.formula),
            opt(r.abs_diff),
            opt(r.p_hat),
            opt(r.std_err),
        ];
        if noisy {
            rec.push(opt(r.noisy));
        }
        w.write_record(rec)?;
    }
    finish_csv(w)
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    protocol: &'static str,
    rows: &'a [SweepRow],
}

pub fn sweep_json(sink: &mut Sink, id: ProtocolId, rows: &[SweepRow]) -> io::Result<()> {
    json_out(
        sink,
        &SweepDoc {
            protocol: id.name(),
            rows,
        },
    )
}

#[derive(Serialize)]
struct ElementDoc<'a> {
    label: &'a str,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct BasisDoc<'a> {
    num_qubits: usize,
    m: Option<f64>,
    elements: Vec<ElementDoc<'a>>,
}

pub fn basis_csv(sink: &mut Sink, basis: &BasisSet) -> io::Result<()> {
    let k = basis.num_qubits();
    let mut w = csv_out(sink);
    w.write_record(["label", "index", "bits", "re", "im"])?;
    for e in basis.elements() {
        for (i, a) in e.state.amplitudes().iter().enumerate() {
            w.write_record([
                e.label.to_string(),
                i.to_string(),
                format!("{i:0k$b}"),
                num(a.re),
                num(a.im),
            ])?;
        }
    }
    finish_csv(w)
}

pub fn basis_json(sink: &mut Sink, basis: &BasisSet) -> io::Result<()> {
    let elements = basis
        .elements()
        .iter()
        .map(|e| ElementDoc {
            label: &e.label,
            amplitudes: e.state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        })
        .collect();
    json_out(
        sink,
        &BasisDoc {
            num_qubits: basis.num_qubits(),
            m: basis.param().map(|m| m.value()),
            elements,
        },
    )
}
