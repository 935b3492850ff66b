use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::{OrbitMatrix, ORBIT_COUNT};
use crate::graph::NodeTable;
use crate::{Error, Result};

/// CSV with header `id,o0,...,o72`, one row per node in table order.
pub fn write_orbit_csv<W: Write>(counts: &OrbitMatrix, table: &NodeTable, out: W) -> Result<()> {
    if counts.node_count() != table.len() {
        return Err(Error::Dimension(format!(
            "{} orbit rows for {} nodes",
            counts.node_count(),
            table.len()
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend((0..ORBIT_COUNT).map(|o| format!("o{o}")));
    w.write_record(&header)?;
    for (v, row) in counts.counts.rows().into_iter().enumerate() {
        let mut record = Vec::with_capacity(ORBIT_COUNT + 1);
        record.push(table.id(v).to_string());
        record.extend(row.iter().map(u64::to_string));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<orbit csv>", e))?;
    Ok(())
}

/// Reads an orbit CSV; returns ids in file order with the matching rows.
pub fn read_orbit_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, OrbitMatrix)> {
    let path = path.as_ref();
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let expected: Vec<String> = std::iter::once("id".to_string())
        .chain((0..ORBIT_COUNT).map(|o| format!("o{o}")))
        .collect();
    if headers.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::parse(path, 1, "header must be id,o0,...,o72"));
    }
    let mut ids = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| Error::parse(path, line, e.to_string()))?;
        ids.push(record[0].to_string());
        for cell in record.iter().skip(1) {
            let c: u64 = cell
                .parse()
                .map_err(|_| Error::parse(path, line, format!("`{cell}` is not a count")))?;
            values.push(c);
        }
    }
    let counts =
        Array2::from_shape_vec((ids.len(), ORBIT_COUNT), values).expect("checked row width");
    Ok((ids, OrbitMatrix { counts }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::count_orbits;
    use crate::graph::Graph;

    #[test]
    fn csv_round_trip() {
        let g = Graph::from_edge_slice(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        let m = count_orbits(&g).unwrap();
        let table = NodeTable::sequential(4);
        let mut buf = Vec::new();
        write_orbit_csv(&m, &table, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("id,o0,o1,"));
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), &buf).unwrap();
        let (ids, back) = read_orbit_csv(f.path()).unwrap();
        assert_eq!(ids, table.ids());
        assert_eq!(back, m);
    }
}
