//! Line-oriented text formats for designs, graphs, targets, assignments,
//! MAR traces and flat `key=value` configs.
//!
//! ```text
//! design v=7 b=7          graph n=3 m=2        kps nodes=3 keys=2
//! 0 1 2                   0 1                  0
//! 0 3 4                   1 2                  0 1
//! ...                                          1
//!
//! target n=4              l=1 clique=0,1,2 keep=0 drop=3
//! must
//! 0 1
//! forbid
//! 2 3
//! may
//! ```
//!
//! Outside assignment bodies, blank lines and lines starting with `#` are
//! ignored. An assignment body has exactly one line per node; an empty line
//! is an empty ring.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use itertools::Itertools;
use thiserror::Error;

use crate::assignment::KeyAssignment;
use crate::design::Design;
use crate::graph::Graph;
use crate::mar::{MarStep, MarTrace};
use crate::target::{Section, TargetGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the input ended early.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: FromStr>(line: usize, token: &str, what: &str) -> Result<T, ParseError> {
    token
        .parse()
        .or_else(|_| err(line, format!("expected {what}, found `{token}`")))
}

/// Parses `<tag> k1=<n> k2=<n> ...` with exactly the given keys in order.
fn parse_header(
    line: usize,
    text: &str,
    tag: &str,
    keys: &[&str],
) -> Result<Vec<usize>, ParseError> {
    let mut tokens = text.split_whitespace();
    if tokens.next() != Some(tag) {
        return err(line, format!("expected `{tag}` header"));
    }
    let mut values = Vec::with_capacity(keys.len());
    for key in keys {
        let Some(tok) = tokens.next() else {
            return err(line, format!("header is missing `{key}=`"));
        };
        let Some(value) = tok.strip_prefix(key).and_then(|t| t.strip_prefix('=')) else {
            return err(line, format!("expected `{key}=<n>`, found `{tok}`"));
        };
        values.push(parse_num(line, value, key)?);
    }
    if let Some(extra) = tokens.next() {
        return err(line, format!("unexpected `{extra}` in header"));
    }
    Ok(values)
}

fn parse_indices(
    line: usize,
    text: &str,
    bound: usize,
    what: &str,
) -> Result<Vec<usize>, ParseError> {
    text.split_whitespace()
        .map(|t| {
            let i: usize = parse_num(line, t, what)?;
            if i >= bound {
                return err(line, format!("{what} {i} is out of range 0..{bound}"));
            }
            Ok(i)
        })
        .collect()
}

pub fn write_design(d: &Design) -> String {
    let mut out = format!("design v={} b={}\n", d.point_count(), d.block_count());
    for block in d.blocks() {
        writeln!(out, "{}", block.iter().join(" ")).unwrap();
    }
    out
}

pub fn parse_design(text: &str) -> Result<Design, ParseError> {
    let mut lines = content_lines(text);
    let Some((hl, header)) = lines.next() else {
        return err(0, "empty input");
    };
    let hv = parse_header(hl, header, "design", &["v", "b"])?;
    let (v, b) = (hv[0], hv[1]);
    let mut blocks = Vec::with_capacity(b);
    let mut last = hl;
    for (ln, l) in lines {
        last = ln;
        if blocks.len() == b {
            return err(ln, format!("more than the declared {b} blocks"));
        }
        let block = parse_indices(ln, l, v, "point")?;
        if block.iter().duplicates().next().is_some() {
            return err(ln, "block repeats a point");
        }
        blocks.push(block);
    }
    if blocks.len() != b {
        return err(last, format!("declared {b} blocks, found {}", blocks.len()));
    }
    Ok(Design::new(v, blocks).expect("points checked in range and distinct"))
}

fn write_edges(out: &mut String, g: &Graph) {
    for (a, b) in g.edges() {
        writeln!(out, "{a} {b}").unwrap();
    }
}

fn parse_edge(line: usize, text: &str, g: &mut Graph) -> Result<(), ParseError> {
    let ends = parse_indices(line, text, g.node_count(), "node")?;
    let [a, b] = ends[..] else {
        return err(line, "an edge line needs exactly two nodes");
    };
    if a == b {
        return err(line, format!("self-loop at node {a}"));
    }
    if !g.add_edge(a, b) {
        return err(line, format!("duplicate edge ({a}, {b})"));
    }
    Ok(())
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("graph n={} m={}\n", g.node_count(), g.edge_count());
    write_edges(&mut out, g);
    out
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let Some((hl, header)) = lines.next() else {
        return err(0, "empty input");
    };
    let hv = parse_header(hl, header, "graph", &["n", "m"])?;
    let mut g = Graph::empty(hv[0]);
    let mut last = hl;
    for (ln, l) in lines {
        last = ln;
        parse_edge(ln, l, &mut g)?;
    }
    if g.edge_count() != hv[1] {
        return err(
            last,
            format!("declared {} edges, found {}", hv[1], g.edge_count()),
        );
    }
    Ok(g)
}

pub fn write_target(t: &TargetGraph) -> String {
    let mut out = format!("target n={}\n", t.node_count());
    for s in Section::ALL {
        writeln!(out, "{}", s.tag()).unwrap();
        write_edges(&mut out, t.section(s));
    }
    out
}

pub fn parse_target(text: &str) -> Result<TargetGraph, ParseError> {
    let mut lines = content_lines(text);
    let Some((hl, header)) = lines.next() else {
        return err(0, "empty input");
    };
    let n = parse_header(hl, header, "target", &["n"])?[0];
    let mut graphs = [Graph::empty(n), Graph::empty(n), Graph::empty(n)];
    let mut current: Option<usize> = None;
    let mut last = hl;
    for (ln, l) in lines {
        last = ln;
        if let Some(i) = Section::ALL.iter().position(|s| s.tag() == l) {
            current = Some(i);
            continue;
        }
        let Some(i) = current else {
            return err(ln, "edge before any `must`, `forbid` or `may` section");
        };
        parse_edge(ln, l, &mut graphs[i])?;
    }
    let [must, forbid, may] = graphs;
    TargetGraph::new(must, forbid, may).or_else(|e| err(last, e.to_string()))
}

pub fn write_assignment(a: &KeyAssignment) -> String {
    let mut out = format!("kps nodes={} keys={}\n", a.node_count(), a.key_count());
    for ring in a.rings() {
        writeln!(out, "{}", ring.iter().join(" ")).unwrap();
    }
    out
}

pub fn parse_assignment(text: &str) -> Result<KeyAssignment, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hl, header) = loop {
        match lines.next() {
            None => return err(0, "empty input"),
            Some((_, l)) if l.is_empty() || l.starts_with('#') => continue,
            Some(h) => break h,
        }
    };
    let hv = parse_header(hl, header, "kps", &["nodes", "keys"])?;
    let (n, m) = (hv[0], hv[1]);
    let mut rings = Vec::with_capacity(n);
    let mut last = hl;
    for (ln, l) in lines.by_ref().take(n) {
        last = ln;
        rings.push(parse_indices(ln, l, m, "key")?);
    }
    if rings.len() != n {
        return err(0, format!("declared {n} nodes, found {}", rings.len()));
    }
    if let Some((ln, _)) = lines.find(|(_, l)| !l.is_empty()) {
        return err(ln, format!("more than the declared {n} rings"));
    }
    KeyAssignment::new(m, rings).or_else(|e| err(last, e.to_string()))
}

pub fn write_trace(t: &MarTrace) -> String {
    let mut out = String::new();
    for s in &t.steps {
        writeln!(
            out,
            "l={} clique={} keep={} drop={}",
            s.iteration,
            s.clique.iter().join(","),
            s.kept_key,
            s.removed
        )
        .unwrap();
    }
    out
}

/// Parses trace steps. The initial key count is not part of the log and is
/// taken from the caller.
pub fn parse_trace(text: &str, initial_key_count: usize) -> Result<MarTrace, ParseError> {
    let mut steps = Vec::new();
    for (ln, l) in content_lines(text) {
        let fields: Vec<(&str, &str)> = l
            .split_whitespace()
            .map(|t| t.split_once('=').ok_or(t))
            .collect::<Result<_, _>>()
            .or_else(|t| err(ln, format!("expected `key=value`, found `{t}`")))?;
        let names: Vec<&str> = fields.iter().map(|f| f.0).collect();
        if names != ["l", "clique", "keep", "drop"] {
            return err(ln, "expected fields l, clique, keep, drop");
        }
        let clique = fields[1]
            .1
            .split(',')
            .map(|t| parse_num(ln, t, "node"))
            .collect::<Result<_, _>>()?;
        steps.push(MarStep {
            iteration: parse_num(ln, fields[0].1, "iteration")?,
            clique,
            kept_key: parse_num(ln, fields[2].1, "key")?,
            removed: parse_num(ln, fields[3].1, "count")?,
        });
    }
    Ok(MarTrace {
        initial_key_count,
        steps,
    })
}

/// Flat `key = value` lines.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ParseError> {
    let mut map = BTreeMap::new();
    for (ln, l) in content_lines(text) {
        let Some((k, v)) = l.split_once('=') else {
            return err(ln, "expected `key=value`");
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return err(ln, "empty key");
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return err(ln, format!("duplicate key `{k}`"));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::stanton_design;
    use crate::mar::{run_mar, MarConfig};
    use crate::target::matched_pairs_target;

    #[test]
    fn design_round_trip() {
        let d = stanton_design();
        let text = write_design(&d);
        assert!(text.starts_with("design v=8 b=14\n0 1 2 3\n"));
        assert_eq!(parse_design(&text).unwrap(), d);
    }

    #[test]
    fn design_errors_carry_lines() {
        let e = parse_design("design v=3 b=1\n# comment\n0 1 7\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(parse_design("design v=3 b=2\n0 1\n").unwrap_err().line, 2);
        assert_eq!(parse_design("design v=3\n").unwrap_err().line, 1);
        assert_eq!(parse_design("design v=3 b=1\n0 0\n").unwrap_err().line, 2);
        assert_eq!(parse_design("").unwrap_err().line, 0);
    }

    #[test]
    fn graph_round_trip() {
        let g = Graph::cycle(5);
        assert_eq!(write_graph(&g), "graph n=5 m=5\n0 1\n0 4\n1 2\n2 3\n3 4\n");
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        assert_eq!(parse_graph("graph n=3 m=1\n1 1\n").unwrap_err().line, 2);
        assert_eq!(
            parse_graph("graph n=3 m=2\n0 1\n1 0\n").unwrap_err().line,
            3
        );
    }

    #[test]
    fn target_round_trip() {
        let t = matched_pairs_target(3).unwrap();
        assert_eq!(parse_target(&write_target(&t)).unwrap(), t);
        assert_eq!(parse_target("target n=2\n0 1\n").unwrap_err().line, 2);
        assert!(parse_target("target n=2\nmust\n0 1\nmay\n0 1\n").is_err());
    }

    #[test]
    fn assignment_round_trip_with_empty_ring() {
        let a = KeyAssignment::new(2, vec![vec![0], vec![], vec![0, 1]]).unwrap();
        let text = write_assignment(&a);
        assert_eq!(text, "kps nodes=3 keys=2\n0\n\n0 1\n");
        assert_eq!(parse_assignment(&text).unwrap(), a);
        assert_eq!(
            parse_assignment("kps nodes=1 keys=1\n3\n")
                .unwrap_err()
                .line,
            2
        );
        assert!(parse_assignment("kps nodes=2 keys=1\n0\n").is_err());
    }

    #[test]
    fn trace_round_trip() {
        let (_, trace) =
            run_mar(&Graph::complete(5), &MarConfig::new(3, "greedy-largest")).unwrap();
        let text = write_trace(&trace);
        assert!(text.starts_with("l=1 clique="));
        assert_eq!(parse_trace(&text, trace.initial_key_count).unwrap(), trace);
        assert_eq!(
            parse_trace("l=1 clique=0,1 keep=x drop=1\n", 0)
                .unwrap_err()
                .line,
            1
        );
    }

    #[test]
    fn config() {
        let c = parse_config("# plan\ns = 2\nb0=7\n\ngroup=fano\n").unwrap();
        assert_eq!(c["s"], "2");
        assert_eq!(c["group"], "fano");
        assert_eq!(parse_config("a=1\na=2\n").unwrap_err().line, 2);
        assert_eq!(parse_config("junk\n").unwrap_err().line, 1);
    }
}
