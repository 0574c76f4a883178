//! CSV and JSON encoding. Every float is written with 17 significant digits
//! (`{:.16e}`), so values survive a text round trip exactly.

use std::io::{self, Write};
use std::path::Path;

use fracmaster_core::spectral::{SpaceTimeField, SpectralBasis};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // csv has no standard spelling; keep Rust's so `parse::<f64>` reads it back.
        format!("{x}")
    }
}

/// Pretty printer that writes floats as `{:.16e}`.
struct Fixed17<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fixed17(PrettyFormatter::new()));
    // Serializing plain data structs into a Vec cannot fail.
    value.serialize(&mut ser).expect("JSON serialization");
    out.push(b'\n');
    out
}

/// Builds a CSV table in memory. Float cells go through [`fmt_f64`].
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
    width: usize,
    comment: Option<String>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Table { writer, width: header.len(), comment: None }
    }

    /// A `# ...` line placed above the header.
    pub fn with_comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = Some(comment.into());
        self
    }

    pub fn row(&mut self, cells: &[Cell]) {
        debug_assert_eq!(cells.len(), self.width);
        let rec: Vec<String> = cells.iter().map(Cell::render).collect();
        self.writer.write_record(&rec).expect("in-memory write");
    }

    pub fn floats(&mut self, cells: &[f64]) {
        debug_assert_eq!(cells.len(), self.width);
        let rec: Vec<String> = cells.iter().map(|&x| fmt_f64(x)).collect();
        self.writer.write_record(&rec).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        let body = self.writer.into_inner().expect("in-memory flush");
        match self.comment {
            Some(c) => {
                let mut out = format!("# {c}\n").into_bytes();
                out.extend_from_slice(&body);
                out
            }
            None => body,
        }
    }
}

pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

/// One row per (time sample, node): `t, x[, y], re, im`.
pub fn field_csv(u: &SpaceTimeField, meta: &str) -> Vec<u8> {
    let grid = u.grid();
    let two = grid.dim() == 2;
    let header: &[&str] = if two { &["t", "x", "y", "re", "im"] } else { &["t", "x", "re", "im"] };
    let mut table = Table::new(header).with_comment(meta);
    for i in 0..u.time().samples() {
        let t = u.time().time(i);
        for (j, v) in u.slice(i).iter().enumerate() {
            let p = grid.point(j);
            if two {
                table.floats(&[t, p[0], p[1], v.re, v.im]);
            } else {
                table.floats(&[t, p[0], v.re, v.im]);
            }
        }
    }
    table.into_bytes()
}

#[derive(Debug, Serialize)]
pub struct BasisMetadata {
    pub description: String,
    pub dimension: usize,
    pub origin: Vec<f64>,
    pub extents: Vec<f64>,
    pub bc: String,
    pub modes: usize,
    pub grid_nodes: Vec<usize>,
    pub period: f64,
    pub time_samples: usize,
    pub smallest_eigenvalue: f64,
    pub largest_eigenvalue: f64,
}

pub fn basis_metadata(basis: &SpectralBasis, period: f64, samples: usize) -> BasisMetadata {
    let axes = basis.grid().axes();
    let ev = basis.eigenvalues();
    BasisMetadata {
        description: fracmaster_core::spectral::describe_basis(basis),
        dimension: axes.len(),
        origin: axes.iter().map(|a| a.origin).collect(),
        extents: axes.iter().map(|a| a.length).collect(),
        bc: basis.bc().name().to_string(),
        modes: basis.len(),
        grid_nodes: axes.iter().map(|a| a.nodes).collect(),
        period,
        time_samples: samples,
        smallest_eigenvalue: ev.iter().copied().fold(f64::INFINITY, f64::min),
        largest_eigenvalue: ev.iter().copied().fold(0.0, f64::max),
    }
}

/// Reads a numeric CSV (optional header, `#` comments) into rows.
pub fn read_numeric_csv(path: &Path) -> Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if line == 0 => continue,
            Err(e) => return Err(format!("{}: row {}: {e}", path.display(), line + 1)),
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        let v: Vec<f64> = serde_json::from_slice(&json_bytes(&[0.1, 1.0 / 3.0])).unwrap();
        assert_eq!(v, vec![0.1, 1.0 / 3.0]);
        assert!(String::from_utf8(json_bytes(&1.0)).unwrap().starts_with("1.0000000000000000e0"));
    }
}
