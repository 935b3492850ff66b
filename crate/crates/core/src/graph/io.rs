use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{Arcs, Graph, NodeTable};
use crate::{Error, Result};

/// How edge-list ids not yet in the node table are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdPolicy {
    /// Unseen ids get the next dense index.
    #[default]
    Create,
    /// Unseen ids are an error; requires a pre-loaded table.
    Strict,
}

/// Result of [`load_edge_list`].
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub table: NodeTable,
    /// Present when at least one line carried a direction marker.
    pub arcs: Option<Arcs>,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Reads a whitespace-separated edge list.
///
/// Each data line is `source target [dir]` where the optional `dir` token is
/// `>` (source cites target), `<` (target cites source) or `-` (unknown).
/// Lines starting with `#` are comments. Dense indices follow the order of
/// `table` (if given) and then first appearance in the file.
pub fn load_edge_list(
    path: impl AsRef<Path>,
    policy: IdPolicy,
    table: Option<NodeTable>,
) -> Result<LoadedGraph> {
    let path = path.as_ref();
    if policy == IdPolicy::Strict && table.is_none() {
        return Err(Error::InvalidParameter(
            "strict id policy needs a pre-loaded node table".into(),
        ));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut table = table.unwrap_or_default();
    let mut edges = Vec::new();
    let mut arcs = Vec::new();
    let mut directed = false;
    let mut data_lines = 0usize;

    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        data_lines += 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (src, dst, dir) = match tokens.as_slice() {
            [a, b] => (*a, *b, None),
            [a, b, d] => (*a, *b, Some(*d)),
            _ => {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!(
                        "expected `source target [dir]`, got {} tokens",
                        tokens.len()
                    ),
                ))
            }
        };
        let mut lookup = |id: &str| -> Result<usize> {
            match policy {
                IdPolicy::Create => Ok(table.get_or_insert(id)),
                IdPolicy::Strict => table
                    .index_of(id)
                    .ok_or_else(|| Error::UnknownId(id.to_string())),
            }
        };
        let u = lookup(src)?;
        let v = lookup(dst)?;
        edges.push((u, v));
        match dir {
            None | Some("-") => {}
            Some(">") => {
                directed = true;
                arcs.push((u, v));
            }
            Some("<") => {
                directed = true;
                arcs.push((v, u));
            }
            Some(other) => {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("direction token must be `>`, `<` or `-`, got `{other}`"),
                ))
            }
        }
    }
    if data_lines == 0 {
        return Err(Error::EmptyEdgeList {
            path: path.to_path_buf(),
        });
    }
    let n = table.len();
    let (graph, stats) = Graph::from_edges(n, edges)?;
    let arcs = directed.then(|| Arcs::from_pairs(n, arcs));
    Ok(LoadedGraph {
        graph,
        table,
        arcs,
        self_loops: stats.self_loops,
        duplicates: stats.duplicates,
    })
}

/// Reads a CSV node table with an `id` column and optional `category`;
/// remaining columns are kept as string attributes.
pub fn load_node_table(path: impl AsRef<Path>) -> Result<NodeTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let id_col = headers
        .iter()
        .position(|h| h == "id")
        .ok_or_else(|| Error::parse(path, 1, "header has no `id` column"))?;
    let cat_col = headers.iter().position(|h| h == "category");

    let mut table = NodeTable::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(path, row + 2, e.to_string()))?;
        let id = record
            .get(id_col)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::parse(path, row + 2, "empty id"))?;
        let category = cat_col
            .and_then(|c| record.get(c))
            .filter(|s| !s.is_empty())
            .map(str::to_string);
        let extra: BTreeMap<String, String> = headers
            .iter()
            .zip(record.iter())
            .enumerate()
            .filter(|(i, _)| *i != id_col && Some(*i) != cat_col)
            .map(|(_, (h, v))| (h.to_string(), v.to_string()))
            .collect();
        table.push_with_extra(id, category, extra)?;
    }
    Ok(table)
}

/// Writes `graph` as an edge list using the external ids from `table`.
pub fn write_edge_list<W: Write>(
    graph: &Graph,
    table: &NodeTable,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(
        out,
        "# nodes={} edges={}",
        graph.node_count(),
        graph.edge_count()
    )?;
    for (u, v) in graph.edges() {
        writeln!(out, "{}\t{}", table.id(u), table.id(v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn duplicate_edge_collapses() {
        let f = file_with("a b\nb c\na b\n");
        let g = load_edge_list(f.path(), IdPolicy::Create, None).unwrap();
        assert_eq!(g.graph.node_count(), 3);
        assert_eq!(g.graph.edge_count(), 2);
        assert_eq!(g.duplicates, 1);
    }

    #[test]
    fn self_loop_dropped_and_counted() {
        let f = file_with("a a\na b\n");
        let g = load_edge_list(f.path(), IdPolicy::Create, None).unwrap();
        assert_eq!(g.graph.node_count(), 2);
        assert_eq!(g.graph.edge_count(), 1);
        assert_eq!(g.self_loops, 1);
    }

    #[test]
    fn comments_tabs_and_first_appearance_order() {
        let f = file_with("# header\nz\ty\n\ny x\n");
        let g = load_edge_list(f.path(), IdPolicy::Create, None).unwrap();
        assert_eq!(g.table.ids(), &["z", "y", "x"]);
        assert!(g.arcs.is_none());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = file_with("a b\n# c\nc d e f\n");
        match load_edge_list(f.path(), IdPolicy::Create, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = file_with("# only a comment\n");
        assert!(matches!(
            load_edge_list(f.path(), IdPolicy::Create, None),
            Err(Error::EmptyEdgeList { .. })
        ));
    }

    #[test]
    fn strict_policy_rejects_unknown_ids() {
        let mut table = NodeTable::new();
        table.push("a", None).unwrap();
        table.push("b", None).unwrap();
        let f = file_with("a b\nb q\n");
        match load_edge_list(f.path(), IdPolicy::Strict, Some(table.clone())) {
            Err(Error::UnknownId(id)) => assert_eq!(id, "q"),
            other => panic!("unexpected {other:?}"),
        }
        let ok = file_with("a b\n");
        assert!(load_edge_list(ok.path(), IdPolicy::Strict, Some(table)).is_ok());
        assert!(load_edge_list(ok.path(), IdPolicy::Strict, None).is_err());
    }

    #[test]
    fn isolated_table_nodes_are_retained() {
        let mut table = NodeTable::new();
        for id in ["a", "b", "lonely"] {
            table.push(id, None).unwrap();
        }
        let f = file_with("a b\n");
        let g = load_edge_list(f.path(), IdPolicy::Create, Some(table)).unwrap();
        assert_eq!(g.graph.node_count(), 3);
        assert_eq!(g.graph.degree(2), 0);
    }

    #[test]
    fn direction_markers_build_arcs() {
        let f = file_with("a b >\nc b <\nb d -\n");
        let g = load_edge_list(f.path(), IdPolicy::Create, None).unwrap();
        let arcs = g.arcs.unwrap();
        let (a, b, c) = (0, 1, 2);
        assert_eq!(arcs.cites[a], vec![b]);
        assert_eq!(arcs.cites[b], vec![c]);
        assert_eq!(arcs.cited_by[b], vec![a]);
        assert_eq!(g.graph.edge_count(), 3);
    }

    #[test]
    fn node_table_categories() {
        let f = file_with("id,category,year\na,Medicine,2017\nb,Chemistry,2018\nc,,2018\n");
        let t = load_node_table(f.path()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.distinct_categories(), vec!["Chemistry", "Medicine"]);
        assert_eq!(t.category(2), None);
        assert_eq!(t.extra(0).get("year").map(String::as_str), Some("2017"));
    }

    #[test]
    fn node_table_duplicate_id() {
        let f = file_with("id,category\na,X\na,Y\n");
        assert!(matches!(
            load_node_table(f.path()),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn asjc_seed_categories() {
        let cats = [
            "Computer Science",
            "Mathematics",
            "Medicine",
            "Chemistry",
            "Social Sciences",
            "Neuroscience",
            "Engineering",
            "Biochemistry, Genetics and Molecular Biology",
        ];
        let mut body = String::from("id,category\n");
        for (i, c) in cats.iter().cycle().take(40).enumerate() {
            body.push_str(&format!("p{i},\"{c}\"\n"));
        }
        let f = file_with(&body);
        let t = load_node_table(f.path()).unwrap();
        assert_eq!(t.distinct_categories().len(), 8);
    }
}
