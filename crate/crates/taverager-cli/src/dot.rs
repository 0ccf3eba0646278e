//! Deterministic DOT and SVG emission for window diagrams.
//!
//! Each window indecomposable becomes one node carrying a `role` attribute
//! (aisle / coaisle / neither); AR arrows become edges. Node and edge order
//! follow the window's canonical ordering, so identical input produces
//! byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use taverager::aisle::TStructure;
use taverager::id::IndecId;
use taverager::window::ARWindow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Aisle,
    Coaisle,
    Neither,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Aisle => "aisle",
            Role::Coaisle => "coaisle",
            Role::Neither => "neither",
        }
    }

    fn color(self) -> &'static str {
        match self {
            Role::Aisle => "lightblue",
            Role::Coaisle => "lightsalmon",
            Role::Neither => "white",
        }
    }
}

pub fn role_of(ts: &TStructure, id: &IndecId) -> Role {
    if ts.in_aisle(id) {
        Role::Aisle
    } else if ts.in_coaisle(id) {
        Role::Coaisle
    } else {
        Role::Neither
    }
}

pub fn to_dot(win: &ARWindow, ts: &TStructure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", ts.name);
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=box, style=filled];");
    for id in win.indecs() {
        let role = role_of(ts, id);
        let _ = writeln!(
            out,
            "  \"{id}\" [fillcolor={}, role=\"{}\"];",
            role.color(),
            role.name()
        );
    }
    for &(i, j) in win.arrows() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", win.id(i), win.id(j));
    }
    let _ = writeln!(out, "}}");
    out
}

/// Role assignment recovered from an emitted DOT file, for round-trips.
pub fn parse_roles(dot: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for line in dot.lines() {
        let line = line.trim();
        let Some(rest) = line.strip_prefix('"') else { continue };
        let Some((name, attrs)) = rest.split_once('"') else { continue };
        let Some(ix) = attrs.find("role=\"") else { continue };
        let tail = &attrs[ix + 6..];
        if let Some((role, _)) = tail.split_once('"') {
            out.insert(name.to_string(), role.to_string());
        }
    }
    out
}

/// Minimal standalone SVG: nodes at their translation-quiver coordinates,
/// arrows as straight lines. No external renderer needed.
pub fn to_svg(win: &ARWindow, ts: &TStructure) -> String {
    const XS: i64 = 90;
    const YS: i64 = 70;
    const PAD: i64 = 50;
    let coords: Vec<(i64, i64)> = win
        .indecs()
        .iter()
        .enumerate()
        .map(|(ix, id)| match win.zq_coord(id) {
            Some((slice, row)) => (slice, row as i64),
            None => (ix as i64, 0),
        })
        .collect();
    let min_x = coords.iter().map(|c| c.0).min().unwrap_or(0);
    let max_x = coords.iter().map(|c| c.0).max().unwrap_or(0);
    let max_y = coords.iter().map(|c| c.1).max().unwrap_or(0);
    let px = |c: (i64, i64)| ((c.0 - min_x) * XS + PAD, c.1 * YS + PAD);
    let width = (max_x - min_x) * XS + 2 * PAD;
    let height = max_y * YS + 2 * PAD;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\">"
    );
    for &(i, j) in win.arrows() {
        let (x1, y1) = px(coords[i]);
        let (x2, y2) = px(coords[j]);
        let _ = writeln!(
            out,
            "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"gray\"/>"
        );
    }
    for (ix, id) in win.indecs().iter().enumerate() {
        let (x, y) = px(coords[ix]);
        let role = role_of(ts, id);
        let _ = writeln!(
            out,
            "  <circle cx=\"{x}\" cy=\"{y}\" r=\"16\" fill=\"{}\" stroke=\"black\"/>",
            role.color()
        );
        let _ = writeln!(
            out,
            "  <text x=\"{x}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{id}</text>",
            y + 28
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}
