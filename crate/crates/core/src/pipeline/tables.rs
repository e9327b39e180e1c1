use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::layout::TableName;
use super::PipelineError;

/// Appends rows to `<name>` shards under `dir`, starting a new shard once
/// `max_rows` data rows are in the current one.
#[derive(Debug)]
pub struct ShardedWriter {
    dir: PathBuf,
    name: TableName,
    header: Vec<String>,
    max_rows: usize,
    shard: usize,
    rows_in_shard: usize,
    file: Option<BufWriter<File>>,
}

/// Shard position of a writer, as stored in checkpoints.
pub type ShardState = (usize, usize);

impl ShardedWriter {
    pub fn new(dir: &Path, name: TableName, header: Vec<String>, max_rows: usize) -> Self {
        ShardedWriter {
            dir: dir.to_path_buf(),
            name,
            header,
            max_rows: max_rows.max(1),
            shard: 0,
            rows_in_shard: 0,
            file: None,
        }
    }

    /// Continue after a checkpoint. The shard file must already have been
    /// cut back to its checkpointed length.
    pub fn resume(mut self, state: ShardState) -> Self {
        self.shard = state.0;
        self.rows_in_shard = state.1;
        self
    }

    pub fn state(&self) -> ShardState {
        (self.shard, self.rows_in_shard)
    }

    pub fn key(&self) -> String {
        self.name.key()
    }

    fn path(&self) -> PathBuf {
        self.dir.join(self.name.with_index(self.shard).file_name())
    }

    fn open(&mut self) -> Result<&mut BufWriter<File>, PipelineError> {
        if self.rows_in_shard >= self.max_rows {
            self.flush()?;
            self.file = None;
            self.shard += 1;
            self.rows_in_shard = 0;
        }
        if self.file.is_none() {
            let path = self.path();
            let fresh = !path.exists() || fs::metadata(&path)?.len() == 0;
            let f = OpenOptions::new().create(true).append(true).open(&path)?;
            let mut w = BufWriter::new(f);
            if fresh {
                writeln!(w, "{}", self.header.join(","))?;
            }
            self.file = Some(w);
        }
        Ok(self.file.as_mut().expect("opened above"))
    }

    pub fn write_row(&mut self, cells: &[String]) -> Result<(), PipelineError> {
        let w = self.open()?;
        writeln!(w, "{}", cells.join(","))?;
        self.rows_in_shard += 1;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), PipelineError> {
        if let Some(w) = self.file.as_mut() {
            w.flush()?;
        }
        Ok(())
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    /// Index columns included; empty cells read as NaN.
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Number of leading index columns (`scenario`, then `step`/`point`).
    pub fn index_width(&self) -> usize {
        self.header
            .iter()
            .take_while(|h| matches!(h.as_str(), "scenario" | "step" | "point"))
            .count()
    }

    pub fn value_columns(&self) -> &[String] {
        &self.header[self.index_width()..]
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table, PipelineError> {
    let bad = |reason: String| PipelineError::Layout {
        file: path.display().to_string(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let row = record
            .iter()
            .map(|cell| {
                if cell.is_empty() {
                    Ok(f64::NAN)
                } else {
                    cell.parse::<f64>()
                        .map_err(|_| bad(format!("row {}: '{cell}' is not a number", line + 1)))
                }
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Every shard of one table, in shard order.
pub fn shard_paths(dir: &Path, key: &str) -> Result<Vec<(TableName, PathBuf)>, PipelineError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()).and_then(TableName::parse) else {
            continue;
        };
        if name.key() == key {
            out.push((name, path));
        }
    }
    out.sort_by_key(|(n, _)| n.index);
    Ok(out)
}

/// Concatenate the shards of one table.
pub fn load_table(dir: &Path, key: &str) -> Result<Option<Table>, PipelineError> {
    let mut table: Option<Table> = None;
    for (_, path) in shard_paths(dir, key)? {
        let part = read_table(&path)?;
        match table.as_mut() {
            None => table = Some(part),
            Some(t) => {
                if t.header != part.header {
                    return Err(PipelineError::Layout {
                        file: path.display().to_string(),
                        reason: "header differs from the first shard".into(),
                    });
                }
                t.rows.extend(part.rows);
            }
        }
    }
    Ok(table)
}
