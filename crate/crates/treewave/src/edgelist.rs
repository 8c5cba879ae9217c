//! Whitespace-separated edge lists: one `u v` pair of 0-based indices per
//! line, `#` starts a comment line. The vertex count is the largest index
//! plus one.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use treewave_core::RegularGraph;

#[derive(Debug, thiserror::Error)]
pub enum EdgeListError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge list is empty")]
    Empty,
    #[error(transparent)]
    Graph(#[from] treewave_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parses edge-list text into `(n_vertices, edges)`.
pub fn parse(text: &str) -> Result<(usize, Vec<(usize, usize)>), EdgeListError> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = |what: &str| -> Result<usize, EdgeListError> {
            let field = fields.next().ok_or_else(|| EdgeListError::Parse {
                line: i + 1,
                message: format!("missing {what} vertex"),
            })?;
            field.parse().map_err(|_| EdgeListError::Parse {
                line: i + 1,
                message: format!("{field:?} is not a vertex index"),
            })
        };
        let (u, v) = (next("first")?, next("second")?);
        if let Some(extra) = fields.next() {
            return Err(EdgeListError::Parse {
                line: i + 1,
                message: format!("unexpected field {extra:?}"),
            });
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(EdgeListError::Empty);
    }
    Ok((n, edges))
}

pub fn parse_graph(text: &str) -> Result<RegularGraph, EdgeListError> {
    let (n, edges) = parse(text)?;
    Ok(RegularGraph::from_edges(n, &edges)?)
}

pub fn read_graph(path: &Path) -> Result<RegularGraph, EdgeListError> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn write<W: Write>(g: &RegularGraph, mut out: W) -> io::Result<()> {
    writeln!(out, "# {} vertices, degree {}", g.n_vertices(), g.degree())?;
    for (u, v) in g.adjacency().edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}
