use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::Graph;
use crate::error::{Error, Result};

/// Parses an edge-list document.
///
/// One `u v` pair per line, `#` starts a comment, blank lines are ignored.
/// An optional header `n <count> D <bound>` (either key may be omitted) fixes
/// the vertex count and degree bound. Without `n`, vertex ids are renumbered
/// densely in increasing order.
pub fn load_graph(text: &str) -> Result<Graph> {
    let mut header_n = None;
    let mut header_d = None;
    let mut edges = Vec::new();
    let mut seen_edge = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens[0] == "n" || tokens[0] == "D" {
            if seen_edge || header_n.is_some() || header_d.is_some() {
                return Err(Error::parse(line_no, "header must precede edges and appear once"));
            }
            if !tokens.len().is_multiple_of(2) {
                return Err(Error::parse(line_no, "header expects key/value pairs"));
            }
            for pair in tokens.chunks(2) {
                let value: usize = pair[1]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad header value {:?}", pair[1])))?;
                match pair[0] {
                    "n" if header_n.is_none() => header_n = Some(value),
                    "D" if header_d.is_none() => header_d = Some(value),
                    k => return Err(Error::parse(line_no, format!("unexpected header key {k:?}"))),
                }
            }
            continue;
        }
        if tokens.len() != 2 {
            return Err(Error::parse(line_no, format!("expected \"u v\", got {line:?}")));
        }
        let parse = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("bad vertex id {t:?}")))
        };
        let (u, v) = (parse(tokens[0])?, parse(tokens[1])?);
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        edges.push((u, v));
        seen_edge = true;
    }

    match header_n {
        Some(n) => {
            if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            Graph::from_edges(n, edges, header_d)
        }
        None => {
            let ids: BTreeSet<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
            let ids: Vec<usize> = ids.into_iter().collect();
            let index = |x: usize| ids.binary_search(&x).expect("id collected above");
            let dense = edges.iter().map(|&(u, v)| (index(u), index(v)));
            Graph::from_edges(ids.len(), dense.collect::<Vec<_>>(), header_d)
        }
    }
}

/// Writes a graph in the edge-list format, header included.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n {} D {}\n", g.n(), g.degree_bound());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
