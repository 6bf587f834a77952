use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

/// Scientific notation with 12 significant digits; `NA` for missing values.
pub fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn sci_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_owned(), sci)
}

/// A header plus string rows, written whole so a failed run leaves no file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    /// Whitespace-separated columns; rows whose `group` column changes
    /// start a new gnuplot data block.
    pub fn to_dat(&self, group: Option<&str>) -> String {
        let g = group.and_then(|name| self.column(name));
        let mut out = format!("# {}\n", self.header.join(" "));
        let mut last: Option<&str> = None;
        for r in &self.rows {
            if let Some(i) = g {
                if last.is_some_and(|l| l != r[i]) {
                    out.push_str("\n\n");
                }
                last = Some(&r[i]);
            }
            out.push_str(&r.join(" "));
            out.push('\n');
        }
        out
    }
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sci(0.8175), "8.17500000000e-1");
        assert_eq!(sci(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(sci_opt(None), "NA");
        let back: f64 = sci(std::f64::consts::PI).parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn dat_blocks_split_on_group_change() {
        let mut t = Table::new(vec!["alpha", "x"]);
        for (a, x) in [("3", "1"), ("3", "2"), ("4", "1")] {
            t.rows.push(vec![a.into(), x.into()]);
        }
        assert_eq!(t.to_dat(Some("alpha")), "# alpha x\n3 1\n3 2\n\n\n4 1\n");
        assert_eq!(t.to_csv(), b"alpha,x\n3,1\n3,2\n4,1\n");
    }
}
