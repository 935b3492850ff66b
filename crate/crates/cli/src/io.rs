use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use orbitrole::graph::NodeTable;

/// How many mismatched ids an alignment error lists.
const SHOWN_MISMATCHES: usize = 10;

/// A role CSV `id,role[,role_name]` in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleFile {
    pub ids: Vec<String>,
    pub roles: Vec<usize>,
}

pub fn read_roles_csv(path: &Path) -> Result<RoleFile> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("opening roles file {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(id_col), Some(role_col)) = (col("id"), col("role")) else {
        bail!("{}: header must contain `id` and `role`", path.display());
    };
    let mut file = RoleFile {
        ids: Vec::new(),
        roles: Vec::new(),
    };
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: line {}", path.display(), row + 2))?;
        let id = record.get(id_col).unwrap_or_default();
        let role = record.get(role_col).unwrap_or_default();
        let role: usize = role.parse().with_context(|| {
            format!(
                "{}: line {}: role `{role}` is not a non-negative integer",
                path.display(),
                row + 2
            )
        })?;
        file.ids.push(id.to_string());
        file.roles.push(role);
    }
    Ok(file)
}

/// Writes `id,role` or `id,role,role_name` when names are given.
pub fn write_roles_csv<W: Write>(
    table: &NodeTable,
    roles: &[usize],
    names: Option<&[String]>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match names {
        Some(_) => w.write_record(["id", "role", "role_name"])?,
        None => w.write_record(["id", "role"])?,
    }
    for (v, &r) in roles.iter().enumerate() {
        let mut record = vec![table.id(v).to_string(), r.to_string()];
        if let Some(names) = names {
            record.push(names[r].clone());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Puts the roles into `table` order. Any id present on one side only is an
/// error that lists the first few offenders of each kind.
pub fn align_roles(table: &NodeTable, file: &RoleFile, what: &str) -> Result<Vec<usize>> {
    let mut seen = BTreeSet::new();
    let mut slots: Vec<Option<usize>> = vec![None; table.len()];
    let mut unknown = Vec::new();
    for (id, &role) in file.ids.iter().zip(&file.roles) {
        if !seen.insert(id.as_str()) {
            bail!("roles file lists id `{id}` twice");
        }
        match table.index_of(id) {
            Some(v) => slots[v] = Some(role),
            None => unknown.push(id.as_str()),
        }
    }
    let missing: Vec<&str> = (0..table.len())
        .filter(|&v| slots[v].is_none())
        .map(|v| table.id(v))
        .collect();
    if !unknown.is_empty() || !missing.is_empty() {
        let mut msg = format!("roles do not align with {what}");
        if !unknown.is_empty() {
            msg += &format!(
                "; {} ids not in {what}: {}",
                unknown.len(),
                unknown[..unknown.len().min(SHOWN_MISMATCHES)].join(", ")
            );
        }
        if !missing.is_empty() {
            msg += &format!(
                "; {} ids without a role: {}",
                missing.len(),
                missing[..missing.len().min(SHOWN_MISMATCHES)].join(", ")
            );
        }
        bail!(msg);
    }
    Ok(slots
        .into_iter()
        .map(|s| s.expect("checked above"))
        .collect())
}

pub fn table_from_ids(ids: &[String]) -> Result<NodeTable> {
    let mut table = NodeTable::new();
    for id in ids {
        table.push(id.clone(), None)?;
    }
    Ok(table)
}

/// Ids in the first column of an embedding CSV, skipping `#` lines.
pub fn read_embedding_ids(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening embedding {}", path.display()))?;
    let mut ids = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {}", path.display(), row + 1))?;
        ids.push(record.get(0).unwrap_or_default().to_string());
    }
    Ok(ids)
}

/// File stem used to tag outputs derived from `path`.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into())
}
