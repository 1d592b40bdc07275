//! Measurement tables keyed by context bucket and arm.
//!
//! CSV schema (header required):
//!
//! ```text
//! bucket,arm,r_dl_mbit,r_ul_mbit,p_total_w,p_cpu_w
//! high,0,9.4,6.1,14.2,5.9
//! ```
//!
//! Duplicate keys keep the last row and bump [`TraceTable::duplicates`].

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{BucketScheme, SlotContext};
use crate::error::{Error, Result};
use crate::reward::PowerReading;

pub const TRACE_HEADER: [&str; 6] = ["bucket", "arm", "r_dl_mbit", "r_ul_mbit", "p_total_w", "p_cpu_w"];

/// One measured (bucket, arm) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub r_dl: f64,
    pub r_ul: f64,
    pub total_w: f64,
    pub cpu_w: f64,
}

impl TraceRow {
    pub fn power(&self) -> PowerReading {
        PowerReading {
            total_w: self.total_w,
            cpu_w: self.cpu_w,
        }
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    bucket: String,
    arm: usize,
    r_dl_mbit: f64,
    r_ul_mbit: f64,
    p_total_w: f64,
    p_cpu_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    scheme: BucketScheme,
    arm_count: usize,
    rows: BTreeMap<(String, usize), TraceRow>,
    duplicates: u64,
}

impl TraceTable {
    /// Builds a table from in-memory rows and checks that every (bucket, arm)
    /// pair of `scheme` x `0..arm_count` is present.
    pub fn from_rows(
        scheme: BucketScheme,
        arm_count: usize,
        rows: impl IntoIterator<Item = ((String, usize), TraceRow)>,
    ) -> Result<Self> {
        let mut table = TraceTable {
            scheme,
            arm_count,
            rows: BTreeMap::new(),
            duplicates: 0,
        };
        for (key, row) in rows {
            if table.rows.insert(key, row).is_some() {
                table.duplicates += 1;
            }
        }
        table.check_complete()?;
        Ok(table)
    }

    pub fn load(path: &Path, scheme: BucketScheme, arm_count: usize) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let parse_err = |line: u64, message: String| Error::TraceParse {
            path: path.to_path_buf(),
            line,
            message,
        };

        let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
        if headers.iter().ne(TRACE_HEADER) {
            return Err(parse_err(
                1,
                format!("expected header `{}`", TRACE_HEADER.join(",")),
            ));
        }
        let labels = scheme.labels();
        let mut table = TraceTable {
            scheme,
            arm_count,
            rows: BTreeMap::new(),
            duplicates: 0,
        };
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                parse_err(line, e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let row: CsvRow = record
                .deserialize(Some(&headers))
                .map_err(|e| parse_err(line, e.to_string()))?;
            if !labels.contains(&row.bucket) {
                return Err(parse_err(line, format!("unknown bucket `{}`", row.bucket)));
            }
            if row.arm >= arm_count {
                return Err(parse_err(
                    line,
                    format!("arm {} outside a space of {arm_count} policies", row.arm),
                ));
            }
            let values = [row.r_dl_mbit, row.r_ul_mbit, row.p_total_w, row.p_cpu_w];
            if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(parse_err(line, "values must be finite and non-negative".into()));
            }
            if row.p_cpu_w > row.p_total_w {
                return Err(parse_err(line, "p_cpu_w exceeds p_total_w".into()));
            }
            let key = (row.bucket, row.arm);
            let cell = TraceRow {
                r_dl: row.r_dl_mbit,
                r_ul: row.r_ul_mbit,
                total_w: row.p_total_w,
                cpu_w: row.p_cpu_w,
            };
            if table.rows.insert(key.clone(), cell).is_some() {
                table.duplicates += 1;
                warn!("{}:{line}: duplicate row for {key:?}, keeping the last", path.display());
            }
        }
        table.check_complete()?;
        Ok(table)
    }

    fn check_complete(&self) -> Result<()> {
        let missing: Vec<(String, usize)> = self
            .scheme
            .labels()
            .into_iter()
            .flat_map(|label| (0..self.arm_count).map(move |arm| (label.clone(), arm)))
            .filter(|key| !self.rows.contains_key(key))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::IncompleteTrace { missing })
        }
    }

    pub fn scheme(&self) -> BucketScheme {
        self.scheme
    }

    pub fn arm_count(&self) -> usize {
        self.arm_count
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows replaced by a later duplicate while loading.
    pub fn duplicates(&self) -> u64 {
        self.duplicates
    }

    pub fn get(&self, bucket: &str, arm: usize) -> Result<&TraceRow> {
        self.rows
            .get(&(bucket.to_string(), arm))
            .ok_or_else(|| Error::IncompleteTrace {
                missing: vec![(bucket.to_string(), arm)],
            })
    }

    pub fn lookup(&self, ctx: &SlotContext, arm: usize) -> Result<&TraceRow> {
        self.get(&self.scheme.label(ctx), arm)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&(String, usize), &TraceRow)> {
        self.rows.iter()
    }

    /// Writes the table in the CSV schema above, rows sorted by key.
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(TRACE_HEADER)?;
        for ((bucket, arm), row) in &self.rows {
            writer.write_record([
                bucket.clone(),
                arm.to_string(),
                row.r_dl.to_string(),
                row.r_ul.to_string(),
                row.total_w.to_string(),
                row.cpu_w.to_string(),
            ])?;
        }
        writer.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}
