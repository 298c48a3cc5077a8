//! CSV tables: `#`-prefixed metadata, one header row, then numeric rows in
//! 17-significant-digit scientific notation so values round-trip exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // `inf`, `-inf`, `NaN` all parse back with str::parse.
        format!("{x}")
    }
}

impl Table {
    pub fn new(meta: Vec<String>, header: Vec<String>) -> Self {
        Self {
            meta,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for m in &self.meta {
            writeln!(w, "# {m}")?;
        }
        let mut csv = csv::WriterBuilder::new().from_writer(w);
        csv.write_record(&self.header)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(|x| fmt_f64(*x)))?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        self.write_to(std::io::BufWriter::new(f))
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let mut meta = Vec::new();
        let mut body = String::new();
        for line in BufReader::new(f).lines() {
            let line = line?;
            match line.strip_prefix('#') {
                Some(m) => meta.push(m.strip_prefix(' ').unwrap_or(m).to_string()),
                None => {
                    body.push_str(&line);
                    body.push('\n');
                }
            }
        }
        let mut rdr = csv::ReaderBuilder::new().from_reader(body.as_bytes());
        let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .with_context(|| format!("{}: data row {}", path.display(), i + 1))?;
            if row.len() != header.len() {
                bail!(
                    "{}: data row {} has {} fields, header has {}",
                    path.display(),
                    i + 1,
                    row.len(),
                    header.len()
                );
            }
            rows.push(row);
        }
        Ok(Self { meta, header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}
