//! Output formats: JSON (canonical), CSV with a fixed header per table, DOT
//! for graphs and automata.

use std::fmt::Write as _;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

use seplab_core::{GameGraph, SafetyAutomaton};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Dot,
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// A CSV table; `header` fixes the columns.
pub fn csv<R: AsRef<[String]>>(header: &[&str], rows: &[R]) -> Result<String> {
    let mut w = ::csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.as_ref())?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Words as `(v,p)(v,p)...`, the form used in CSV cells.
pub fn word_cell(letters: &[[u32; 2]]) -> String {
    letters.iter().fold(String::new(), |mut s, l| {
        let _ = write!(s, "({},{})", l[0], l[1]);
        s
    })
}

pub fn graph_dot(g: &GameGraph) -> String {
    let mut s = String::from("digraph G {\n");
    for v in 1..=g.n() {
        let _ = writeln!(s, "  {v};");
    }
    for (u, v, p) in g.edges() {
        let _ = writeln!(s, "  {u} -> {v} [label=\"{p}\"];");
    }
    s.push_str("}\n");
    s
}

/// Parallel letters between two states are merged into one labelled edge.
pub fn automaton_dot(a: &SafetyAutomaton) -> String {
    let mut s = String::from("digraph A {\n  rankdir=LR;\n  init [shape=point];\n");
    for q in 0..a.states() {
        let shape = if q == a.accept() { "doublecircle" } else { "circle" };
        let _ = writeln!(s, "  q{q} [shape={shape}];");
    }
    let _ = writeln!(s, "  init -> q{};", a.start());
    let mut labels: std::collections::BTreeMap<(u32, u32), Vec<String>> = Default::default();
    for (q, v, p, r) in a.transitions() {
        labels.entry((q, r)).or_default().push(format!("({v},{p})"));
    }
    for ((q, r), ls) in labels {
        let _ = writeln!(s, "  q{q} -> q{r} [label=\"{}\"];", ls.join(" "));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_first() {
        let out = csv(&["a", "b"], &[vec!["1".to_string(), "x,y".to_string()]]).unwrap();
        assert_eq!(out, "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn dot_lists_every_edge() {
        let g = GameGraph::new(2, 2, [(1, 2, 2), (2, 1, 1)]).unwrap();
        let dot = graph_dot(&g);
        assert!(dot.contains("1 -> 2 [label=\"2\"]") && dot.contains("2 -> 1 [label=\"1\"]"));
    }
}
