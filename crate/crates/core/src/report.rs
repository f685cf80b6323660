//! Text and CSV renderings of metric reports.
//!
//! CSV column order is fixed:
//! `version,label,dcc,dicc,apl,so_max,so_mean,ns,nr_mode,seed,nr`, where `nr`
//! is `x:value` pairs joined by `;`. Rationals are written as `p/q`.

use itertools::Itertools;

use crate::hierarchy::ComparisonReport;
use crate::math::{format_rational, to_f64, Rational};
use crate::metrics::{MetricsReport, NrMode};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: [&str; 11] = [
    "version", "label", "dcc", "dicc", "apl", "so_max", "so_mean", "ns", "nr_mode", "seed", "nr",
];

fn nr_field(nr: &[(usize, Rational)]) -> String {
    nr.iter()
        .map(|(x, v)| format!("{x}:{}", format_rational(v)))
        .join(";")
}

fn mode_detail(mode: &NrMode) -> String {
    match mode {
        NrMode::Exact { .. } => "exact".to_string(),
        NrMode::MonteCarlo { trials, seed } => format!("monte-carlo trials={trials} seed={seed}"),
    }
}

pub fn render_text(label: &str, r: &MetricsReport) -> String {
    let mut lines = vec![
        format!("report {label} (kps {VERSION})"),
        format!("dcc      {}", format_rational(&r.dcc)),
        format!(
            "dicc     {}",
            r.dicc.as_ref().map_or("n/a".to_string(), format_rational)
        ),
        format!("apl      {}", r.apl),
        format!("so_max   {}", r.so_max),
        format!("so_mean  {}", format_rational(&r.so_mean)),
        format!("ns       {}", r.ns),
        format!("nr_mode  {}", mode_detail(&r.nr_mode)),
    ];
    for (x, v) in &r.nr {
        lines.push(format!(
            "nr[x={x}]  {} ({:.6})",
            format_rational(v),
            to_f64(v)
        ));
    }
    lines.join("\n") + "\n"
}

fn csv_record(label: &str, r: &MetricsReport) -> Vec<String> {
    vec![
        VERSION.to_string(),
        label.to_string(),
        format_rational(&r.dcc),
        r.dicc.as_ref().map_or(String::new(), format_rational),
        r.apl.to_string(),
        r.so_max.to_string(),
        format_rational(&r.so_mean),
        r.ns.to_string(),
        r.nr_mode.label().to_string(),
        r.nr_mode.seed().map_or(String::new(), |s| s.to_string()),
        nr_field(&r.nr),
    ]
}

fn write_csv(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn render_csv(label: &str, r: &MetricsReport) -> String {
    write_csv(vec![csv_record(label, r)])
}

/// `x,nr,nr_float` rows.
pub fn render_nr_table(r: &MetricsReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "nr", "nr_float"])
        .expect("in-memory write");
    for (x, v) in &r.nr {
        w.write_record([
            x.to_string(),
            format_rational(v),
            format!("{:.6}", to_f64(v)),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Rows `graph-based`, `classical` and `delta` (graph-based minus classical).
/// The delta row leaves `dicc`, `nr_mode` and `seed` empty.
pub fn render_comparison_csv(c: &ComparisonReport) -> String {
    let d = &c.deltas;
    let delta = vec![
        VERSION.to_string(),
        "delta".to_string(),
        format_rational(&d.dcc),
        String::new(),
        d.apl.as_ref().map_or("n/a".to_string(), format_rational),
        d.so_max.to_string(),
        format_rational(&d.so_mean),
        d.ns.to_string(),
        String::new(),
        String::new(),
        nr_field(&d.nr),
    ];
    write_csv(vec![
        csv_record("graph-based", &c.graph_based),
        csv_record("classical", &c.classical),
        delta,
    ])
}
