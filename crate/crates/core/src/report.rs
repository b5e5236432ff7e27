//! CSV output shared by every experiment: one `#` comment line recording the
//! tool version, resolved configuration and seed, then an RFC 4180 table.

use std::io::Write;

/// Reals are written with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug)]
pub struct CsvTable {
    comment: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(comment: impl Into<String>, header: &[&str]) -> Self {
        Self {
            comment: comment.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        writeln!(out, "# {}", self.comment).expect("writing to a Vec");
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).expect("writing to a Vec");
        for row in &self.rows {
            w.write_record(row).expect("writing to a Vec");
        }
        w.into_inner().expect("flushing a Vec")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut t = CsvTable::new("tool 0.1 seed=1", &["d", "x"]);
        t.push(vec!["2".into(), real(0.25)]);
        let text = String::from_utf8(t.to_bytes()).unwrap();
        assert_eq!(text, "# tool 0.1 seed=1\nd,x\n2,2.5000000000000000e-1\n");
        let mantissa = real(1.0 / 3.0).split('e').next().unwrap().replace('.', "");
        assert_eq!(mantissa.len(), 17);
    }
}
