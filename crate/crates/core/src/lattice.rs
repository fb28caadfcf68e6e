//! Lattice representation: generator matrices, the map `z -> Bz`, and
//! coordinate-wise rounding back onto `Z^d`.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Smallest admissible ratio `|det B| / prod_i ||b_i||` before a basis is
/// treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// A point of the integer lattice `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerPoint(pub Vec<i64>);

impl IntegerPoint {
    pub fn zeros(dim: usize) -> Self {
        IntegerPoint(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        IntegerPoint(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().map(|&z| z as f64).collect()
    }
}

impl From<Vec<i64>> for IntegerPoint {
    fn from(v: Vec<i64>) -> Self {
        IntegerPoint(v)
    }
}

/// Checks that every coordinate is finite.
pub fn check_finite(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("vector has non-finite entries".into()))
    }
}

/// Rounds a scalar to the nearest integer; halves go away from zero.
#[inline]
pub fn round_scalar(v: f64) -> f64 {
    // f64::round already breaks ties away from zero.
    v.round()
}

/// Writes the coordinate-wise rounding of `x` into `out` without validation.
#[inline]
pub fn round_into(x: &[f64], out: &mut [f64]) {
    for (o, &v) in out.iter_mut().zip(x) {
        *o = round_scalar(v);
    }
}

/// Nearest point of `Z^d` under coordinate-wise rounding.
///
/// Ties at half-integers are broken away from zero, so `(0.5, -1.5)` maps to
/// `(1, -2)`.
pub fn round_nearest(x: &[f64]) -> Result<IntegerPoint> {
    check_finite(x)?;
    Ok(IntegerPoint(x.iter().map(|&v| round_scalar(v) as i64).collect()))
}

/// Full-rank square generator matrix `B` of a lattice `B Z^d`.
#[derive(Clone, PartialEq)]
pub struct GeneratorMatrix {
    entries: DMatrix<f64>,
    abs_det: f64,
}

impl fmt::Debug for GeneratorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorMatrix")
            .field("dim", &self.dim())
            .field("abs_det", &self.abs_det)
            .finish()
    }
}

impl GeneratorMatrix {
    /// Builds a generator from a dense matrix, rejecting singular or
    /// non-finite input.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::InvalidInput(format!(
                "generator matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("generator matrix has non-finite entries".into()));
        }
        // LU with partial pivoting.
        let abs_det = entries.clone().lu().determinant().abs();
        let hadamard: f64 = entries.column_iter().map(|c| c.norm()).product();
        let ratio = if hadamard > 0.0 { abs_det / hadamard } else { 0.0 };
        if !(ratio > RANK_TOLERANCE) {
            return Err(Error::SingularMatrix { abs_det, ratio });
        }
        Ok(GeneratorMatrix { entries, abs_det })
    }

    /// Builds a generator from row-major data.
    pub fn from_rows(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: data.len() });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    pub fn identity(dim: usize) -> Self {
        GeneratorMatrix { entries: DMatrix::identity(dim, dim), abs_det: 1.0 }
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn abs_det(&self) -> f64 {
        self.abs_det
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.entries.column(col).iter().copied().collect()
    }

    pub fn is_upper_triangular(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..i).all(|j| self.entries[(i, j)] == 0.0))
    }

    /// `B x` for a real vector.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let v = &self.entries * DVector::from_column_slice(x);
        Ok(v.iter().copied().collect())
    }

    /// Reads the plain-text format: first line `d`, then `d` rows of `d`
    /// whitespace-separated reals. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) =
            lines.next().ok_or(Error::Parse { line: 1, msg: "missing dimension line".into() })?;
        let dim: usize = header
            .parse()
            .map_err(|_| Error::Parse { line: line_no, msg: format!("bad dimension `{header}`") })?;
        if dim == 0 {
            return Err(Error::Parse { line: line_no, msg: "dimension must be positive".into() });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for _ in 0..dim {
            let (line_no, row) = lines
                .next()
                .ok_or(Error::Parse { line: line_no, msg: format!("expected {dim} rows") })?;
            let vals = row
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
            if vals.len() != dim {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {dim} entries, found {}", vals.len()),
                });
            }
            data.extend(vals);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::Parse { line: line_no, msg: "trailing data after matrix".into() });
        }
        Self::from_rows(dim, &data)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes to the text format read by [`GeneratorMatrix::parse`].
    pub fn to_text(&self) -> String {
        let d = self.dim();
        let mut s = format!("{d}\n");
        for i in 0..d {
            let row: Vec<String> = (0..d).map(|j| format!("{:e}", self.entries[(i, j)])).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

/// `B z`: maps an integer coefficient vector to its lattice point.
pub fn lattice_map(b: &GeneratorMatrix, z: &IntegerPoint) -> Result<Vec<f64>> {
    b.apply(&z.to_real())
}

/// Integer entries of the Leech lattice generator, row-major; the actual
/// generator is this matrix scaled by `1/sqrt(8)`.
#[rustfmt::skip]
const LEECH_INT: [[i8; 24]; 24] = [
    [8,4,4,4,4,4,4,2,4,4,4,2,4,2,2,2,4,2,2,2,0,0,0,-3],
    [0,4,0,0,0,0,0,2,0,0,0,2,0,2,0,0,0,0,0,2,2,0,0,1],
    [0,0,4,0,0,0,0,2,0,0,0,2,0,0,2,0,0,2,0,0,2,0,0,1],
    [0,0,0,4,0,0,0,2,0,0,0,2,0,0,0,2,0,0,2,0,2,0,0,1],
    [0,0,0,0,4,0,0,2,0,0,0,0,0,2,2,2,0,2,2,2,2,0,0,1],
    [0,0,0,0,0,4,0,2,0,0,0,0,0,2,0,0,0,0,2,0,0,0,0,1],
    [0,0,0,0,0,0,4,2,0,0,0,0,0,0,2,0,0,0,0,2,0,0,0,1],
    [0,0,0,0,0,0,0,2,0,0,0,0,0,0,0,2,0,2,0,0,0,0,0,1],
    [0,0,0,0,0,0,0,0,4,0,0,2,0,2,2,2,0,2,2,2,2,2,2,1],
    [0,0,0,0,0,0,0,0,0,4,0,2,0,2,0,0,0,2,0,0,0,2,0,1],
    [0,0,0,0,0,0,0,0,0,0,4,2,0,0,2,0,0,0,2,0,0,0,2,1],
    [0,0,0,0,0,0,0,0,0,0,0,2,0,0,0,2,0,0,0,2,0,0,0,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,4,2,2,2,0,0,0,0,2,2,2,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,2,0,0,0,0,0,0,0,2,0,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,0,0,0,0,0,0,0,2,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,0,0,0,0,0,0,0,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,4,2,2,2,2,2,2,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,0,0,0,2,0,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,0,0,0,2,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,0,0,0,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,2,2,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,0,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1],
];

/// Integer part of the Leech generator (before the `1/sqrt(8)` scale).
pub fn leech_integer_entries() -> [[i8; 24]; 24] {
    LEECH_INT
}

/// The 24-dimensional upper-triangular Leech lattice generator.
pub fn leech_generator() -> GeneratorMatrix {
    let scale = 1.0 / 8f64.sqrt();
    let m = DMatrix::from_fn(24, 24, |i, j| f64::from(LEECH_INT[i][j]) * scale);
    GeneratorMatrix::new(m).expect("Leech generator is unimodular")
}
