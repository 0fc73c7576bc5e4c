//! DIMACS and plain adjacency-list serialization.
//!
//! DIMACS layout written here (1-indexed, `\n` separated):
//!
//! ```text
//! c <comment>          zero or more
//! p edge <n> <m>
//! e <u> <v>            m lines, u < v, lexicographic
//! n <v> <c>            one per vertex, only for colored graphs
//! ```
//!
//! The reader accepts comment lines anywhere, color lines anywhere after the
//! `p` line, and rejects everything else.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn write_dimacs<W: Write>(g: &Graph, comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        if c.is_empty() {
            writeln!(out, "c")?;
        } else {
            writeln!(out, "c {c}")?;
        }
    }
    writeln!(out, "p edge {} {}", g.vertex_count(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1)?;
    }
    if let Some(colors) = g.colors() {
        for (v, c) in colors.iter().enumerate() {
            writeln!(out, "n {} {}", v + 1, c)?;
        }
    }
    Ok(())
}

pub fn dimacs_string(g: &Graph, comments: &[String]) -> String {
    let mut buf = Vec::new();
    write_dimacs(g, comments, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("invalid {what}")))
}

/// Reads a DIMACS graph. Also returns the comment lines (without the `c `).
pub fn read_dimacs<R: BufRead>(input: R) -> Result<(Graph, Vec<String>)> {
    let mut comments = Vec::new();
    let mut graph: Option<Graph> = None;
    let mut declared_edges = 0usize;
    let mut colors: Option<Vec<Option<u32>>> = None;

    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let kind = toks.next().unwrap_or("");
        match kind {
            "c" => {
                let rest = line.trim_start().strip_prefix('c').unwrap_or("");
                comments.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                continue;
            }
            "p" => {
                if graph.is_some() {
                    return Err(parse_err(lineno, "duplicate problem line"));
                }
                if toks.next() != Some("edge") {
                    return Err(parse_err(lineno, "expected 'p edge <n> <m>'"));
                }
                let n = parse_num(toks.next(), lineno, "vertex count")?;
                declared_edges = parse_num(toks.next(), lineno, "edge count")?;
                graph = Some(Graph::new(n));
            }
            "e" => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| parse_err(lineno, "edge before problem line"))?;
                let u = parse_num(toks.next(), lineno, "endpoint")?;
                let v = parse_num(toks.next(), lineno, "endpoint")?;
                let n = g.vertex_count();
                if u == 0 || v == 0 || u > n || v > n || u == v {
                    return Err(parse_err(lineno, format!("invalid edge {u} {v}")));
                }
                if !g.add_edge(u - 1, v - 1)? {
                    return Err(parse_err(lineno, format!("duplicate edge {u} {v}")));
                }
            }
            "n" => {
                let g = graph
                    .as_ref()
                    .ok_or_else(|| parse_err(lineno, "color line before problem line"))?;
                let v = parse_num(toks.next(), lineno, "vertex")?;
                let c = parse_num(toks.next(), lineno, "color")?;
                if v == 0 || v > g.vertex_count() {
                    return Err(parse_err(lineno, format!("vertex {v} out of range")));
                }
                let c = u32::try_from(c).map_err(|_| parse_err(lineno, "color too large"))?;
                let cs = colors.get_or_insert_with(|| vec![None; g.vertex_count()]);
                if cs[v - 1].replace(c).is_some() {
                    return Err(parse_err(lineno, format!("vertex {v} colored twice")));
                }
            }
            other => return Err(parse_err(lineno, format!("unknown line type '{other}'"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens"));
        }
    }
    let mut g = graph.ok_or_else(|| parse_err(0, "missing problem line"))?;
    if g.edge_count() != declared_edges {
        return Err(parse_err(
            0,
            format!(
                "problem line declares {declared_edges} edges, found {}",
                g.edge_count()
            ),
        ));
    }
    if let Some(cs) = colors {
        g.set_colors(cs.into_iter().map(|c| c.unwrap_or(0)).collect())?;
    }
    Ok((g, comments))
}

/// `"<n>\n"` followed by one `"u v\n"` line per edge (0-indexed).
pub fn write_adjlist<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{}", g.vertex_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_adjlist<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines().enumerate();
    let n = loop {
        match lines.next() {
            Some((i, l)) => {
                let l = l?;
                if l.trim().is_empty() {
                    continue;
                }
                break l
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(i + 1, "invalid vertex count"))?;
            }
            None => return Err(parse_err(0, "empty input")),
        }
    };
    let mut g = Graph::new(n);
    for (i, l) in lines {
        let l = l?;
        if l.trim().is_empty() {
            continue;
        }
        let mut t = l.split_whitespace();
        let u = parse_num(t.next(), i + 1, "endpoint")?;
        let v = parse_num(t.next(), i + 1, "endpoint")?;
        if t.next().is_some() {
            return Err(parse_err(i + 1, "trailing tokens"));
        }
        g.add_edge(u, v)
            .map_err(|_| parse_err(i + 1, format!("invalid edge {u} {v}")))?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_bit_exact() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            dimacs_string(&g, &[]),
            "p edge 3 3\ne 1 2\ne 1 3\ne 2 3\n"
        );
    }

    #[test]
    fn colored_graph_writes_color_lines() {
        let g = Graph::from_edges(2, [(0, 1)])
            .unwrap()
            .with_colors(vec![0, 3])
            .unwrap();
        let s = dimacs_string(&g, &["hello".to_string()]);
        assert_eq!(s, "c hello\np edge 2 1\ne 1 2\nn 1 0\nn 2 3\n");
        let (h, comments) = read_dimacs(s.as_bytes()).unwrap();
        assert_eq!(h, g);
        assert_eq!(comments, vec!["hello".to_string()]);
    }

    #[test]
    fn malformed_input_reports_line() {
        let bad = [
            ("e 1 2\n", 1),
            ("p edge 2 1\np edge 2 1\n", 2),
            ("p edge 2 1\ne 1 1\n", 2),
            ("p edge 2 1\ne 1 3\n", 2),
            ("p edge 2 2\ne 1 2\ne 2 1\n", 3),
            ("p edge 2 1\nx 1 2\n", 2),
            ("p cnf 2 1\n", 1),
        ];
        for (text, line) in bad {
            match read_dimacs(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} -> {other:?}"),
            }
        }
        assert!(read_dimacs("p edge 3 2\ne 1 2\n".as_bytes()).is_err());
        assert!(read_dimacs("c only\n".as_bytes()).is_err());
    }

    #[test]
    fn adjlist_round_trip() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3), (1, 3)]).unwrap();
        let mut buf = Vec::new();
        write_adjlist(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "4\n0 1\n1 3\n2 3\n");
        assert_eq!(read_adjlist(&buf[..]).unwrap(), g);
    }
}
