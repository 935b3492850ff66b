use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::EmbeddingMatrix;
use crate::graph::NodeTable;
use crate::{Error, Result};

/// Reads `id,e0,...` rows and re-aligns them to `table` order.
///
/// The method tag comes from a leading `# method=<tag>` line when present,
/// otherwise from the file stem.
pub fn import_embedding(path: impl AsRef<Path>, table: &NodeTable) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut tag = None;
    let mut skipped = 0;
    let mut body = text.as_str();
    while let Some(line) = body.lines().next().filter(|l| l.starts_with('#')) {
        if let Some(t) = line.trim_start_matches('#').trim().strip_prefix("method=") {
            tag = Some(t.trim().to_string());
        }
        body = &body[(line.len() + 1).min(body.len())..];
        skipped += 1;
    }
    let tag = tag.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "imported".to_string())
    });

    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, skipped + 1, e.to_string()))?
        .clone();
    if headers.get(0) != Some("id") || headers.len() < 2 {
        return Err(Error::parse(
            path,
            skipped + 1,
            "header must be id,e0,...,e{d-1}",
        ));
    }
    let d = headers.len() - 1;
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; table.len()];
    for (i, record) in reader.records().enumerate() {
        let line = skipped + i + 2;
        let record = record.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if record.len() != d + 1 {
            return Err(Error::Dimension(format!(
                "{}:{line}: {} values, expected {d}",
                path.display(),
                record.len() - 1
            )));
        }
        let id = &record[0];
        let v = table
            .index_of(id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))?;
        if rows[v].is_some() {
            return Err(Error::DuplicateId(id.to_string()));
        }
        let values = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(path, line, format!("`{cell}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows[v] = Some(values);
    }
    let mut flat = Vec::with_capacity(table.len() * d);
    for (v, row) in rows.into_iter().enumerate() {
        let row = row.ok_or_else(|| Error::MissingNode(table.id(v).to_string()))?;
        flat.extend(row);
    }
    let vectors = Array2::from_shape_vec((table.len(), d), flat).expect("rows have width d");
    EmbeddingMatrix::new(vectors, tag)
}

/// Writes `# method=<tag>` followed by `id,e0,...` rows.
pub fn write_embedding_csv<W: Write>(
    emb: &EmbeddingMatrix,
    table: &NodeTable,
    mut out: W,
) -> Result<()> {
    if emb.node_count() != table.len() {
        return Err(Error::Dimension(format!(
            "{} embedding rows for {} nodes",
            emb.node_count(),
            table.len()
        )));
    }
    writeln!(out, "# method={}", emb.method_tag).map_err(|e| Error::io("<embedding csv>", e))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend((0..emb.dim()).map(|j| format!("e{j}")));
    w.write_record(&header)?;
    for (v, row) in emb.vectors.rows().into_iter().enumerate() {
        let mut record = Vec::with_capacity(emb.dim() + 1);
        record.push(table.id(v).to_string());
        record.extend(row.iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<embedding csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn round_trip_keeps_values_and_tag() {
        let table = NodeTable::sequential(3);
        let emb = EmbeddingMatrix::new(array![[0.1, -2.0], [3.5, 1e-300], [0.0, 7.0]], "graphwave")
            .unwrap();
        let mut buf = Vec::new();
        write_embedding_csv(&emb, &table, &mut buf).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), &buf).unwrap();
        assert_eq!(import_embedding(f.path(), &table).unwrap(), emb);
    }

    #[test]
    fn rows_are_realigned_and_tag_falls_back_to_stem() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("struc2vec.csv");
        std::fs::write(&path, "id,e0\nb,2\na,1\n").unwrap();
        let mut table = NodeTable::new();
        table.push("a", None).unwrap();
        table.push("b", None).unwrap();
        let emb = import_embedding(&path, &table).unwrap();
        assert_eq!(emb.method_tag, "struc2vec");
        assert_eq!(emb.vectors, array![[1.0], [2.0]]);
    }

    #[test]
    fn missing_node_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "id,e0\n0,1\n").unwrap();
        match import_embedding(&path, &NodeTable::sequential(2)) {
            Err(Error::MissingNode(id)) => assert_eq!(id, "1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_and_bad_cells_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "id,e0,e1\n0,1,2\n1,3\n").unwrap();
        assert!(import_embedding(&path, &NodeTable::sequential(2)).is_err());
        std::fs::write(&path, "id,e0\n0,1\n1,abc\n").unwrap();
        assert!(matches!(
            import_embedding(&path, &NodeTable::sequential(2)),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
