//! Plain-text graph files.
//!
//! ```text
//! # comment
//! group z2          (or: group zk <k>)
//! n <count>
//! e <tail> <head> <x> <y>   (z2: two signed integers per edge)
//! e <tail> <head> <r>       (zk: one residue in [0, k))
//! ```
//!
//! `#` starts a comment anywhere on a line; blank lines are ignored.  Edge
//! order in the file is preserved exactly, since the greedy algorithms
//! process edges in this order.

use thiserror::Error;

use crate::graph::{Color, ColoredGraph, Group, Z2_COORD_BOUND};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        msg: msg.into(),
    }
}

pub fn parse(text: &str) -> Result<ColoredGraph, ParseError> {
    let mut group: Option<Group> = None;
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize, Color)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "group" => {
                if group.is_some() {
                    return Err(err(line, "duplicate group directive"));
                }
                group = Some(match tokens.get(1) {
                    Some(&"z2") => {
                        if tokens.len() != 2 {
                            return Err(err(line, "usage: group z2"));
                        }
                        Group::Z2
                    }
                    Some(&"zk") => {
                        let k: u32 = tokens
                            .get(2)
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| err(line, "usage: group zk <k>"))?;
                        if k < 2 {
                            return Err(err(line, format!("modulus must be at least 2 (got {k})")));
                        }
                        if tokens.len() != 3 {
                            return Err(err(line, "usage: group zk <k>"));
                        }
                        Group::Zk(k)
                    }
                    _ => return Err(err(line, "group must be `z2` or `zk <k>`")),
                });
            }
            "n" => {
                if n.is_some() {
                    return Err(err(line, "duplicate n directive"));
                }
                let count: usize = tokens
                    .get(1)
                    .filter(|_| tokens.len() == 2)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line, "usage: n <count>"))?;
                n = Some(count);
            }
            "e" => {
                let group = group.ok_or_else(|| err(line, "edge before group directive"))?;
                let n = n.ok_or_else(|| err(line, "edge before n directive"))?;
                let endpoint = |pos: usize| -> Result<usize, ParseError> {
                    let v: usize = tokens
                        .get(pos)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err(line, "bad edge endpoint"))?;
                    if v >= n {
                        return Err(err(line, format!("endpoint {v} out of range (n = {n})")));
                    }
                    Ok(v)
                };
                let tail = endpoint(1)?;
                let head = endpoint(2)?;
                let color = match group {
                    Group::Z2 => {
                        if tokens.len() != 5 {
                            return Err(err(line, "z2 edge needs two color coordinates"));
                        }
                        let coord = |pos: usize| -> Result<i64, ParseError> {
                            let c: i64 = tokens[pos]
                                .parse()
                                .map_err(|_| err(line, "bad color coordinate"))?;
                            if c.abs() > Z2_COORD_BOUND {
                                return Err(err(line, "color coordinate exceeds |c| <= 2^30"));
                            }
                            Ok(c)
                        };
                        Color::Z2(coord(3)?, coord(4)?)
                    }
                    Group::Zk(k) => {
                        if tokens.len() != 4 {
                            return Err(err(line, "zk edge needs one color residue"));
                        }
                        let r: u32 = tokens[3]
                            .parse()
                            .map_err(|_| err(line, "bad color residue"))?;
                        if r >= k {
                            return Err(err(
                                line,
                                format!("color not reduced modulo {k} (residue {r})"),
                            ));
                        }
                        Color::Zk(r)
                    }
                };
                edges.push((tail, head, color));
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }

    let group = group.ok_or_else(|| err(text.lines().count() + 1, "missing group directive"))?;
    let n = n.ok_or_else(|| err(text.lines().count() + 1, "missing n directive"))?;
    Ok(ColoredGraph::new(group, n, edges).expect("per-line validation covered all invariants"))
}

pub fn serialize(graph: &ColoredGraph) -> String {
    let mut out = String::new();
    match graph.group() {
        Group::Z2 => out.push_str("group z2\n"),
        Group::Zk(k) => out.push_str(&format!("group zk {k}\n")),
    }
    out.push_str(&format!("n {}\n", graph.n()));
    for e in graph.edges() {
        match e.color {
            Color::Z2(x, y) => out.push_str(&format!("e {} {} {} {}\n", e.tail, e.head, x, y)),
            Color::Zk(r) => out.push_str(&format!("e {} {} {}\n", e.tail, e.head, r)),
        }
    }
    out
}
