//! Plain-text instance files.
//!
//! ```text
//! # optional comment lines
//! m n
//! re im re im ...      (m * n complex entries, row-major)
//! b
//! re im ...            (m entries, optional section)
//! x
//! re im ...            (n entries, optional section)
//! ```
//!
//! Tokens may be split across lines freely. Numbers are written with 17
//! significant digits so files round-trip exactly.

use std::fmt::Write as _;
use std::path::Path;

use kaczmarz::matcore::matvec;
use kaczmarz::{DenseMatrix, LinearSystem, Scalar};

use crate::error::{BenchError, Result};

/// Contents of an instance file. Without `b`, the right-hand side is `A x`
/// when `x` is present and zero otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub a: DenseMatrix,
    pub b: Option<Vec<Scalar>>,
    pub x: Option<Vec<Scalar>>,
}

impl InstanceFile {
    pub fn from_system(system: &LinearSystem) -> Self {
        Self { a: system.a.clone(), b: Some(system.b.clone()), x: system.x_true.clone() }
    }

    pub fn into_system(self) -> Result<LinearSystem> {
        let b = match (self.b, &self.x) {
            (Some(b), _) => b,
            (None, Some(x)) => matvec(&self.a, x)?,
            (None, None) => vec![Scalar::new(0.0, 0.0); self.a.rows()],
        };
        Ok(LinearSystem::new(self.a, b, self.x)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        text.parse()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string()).map_err(|e| BenchError::io(path, e))
    }
}

fn push_pairs(out: &mut String, values: &[Scalar]) {
    let line: Vec<String> = values.iter().map(|z| format!("{:.16e} {:.16e}", z.re, z.im)).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
}

impl std::fmt::Display for InstanceFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.a.rows(), self.a.cols());
        for j in 0..self.a.rows() {
            push_pairs(&mut out, self.a.row(j));
        }
        if let Some(b) = &self.b {
            out.push_str("b\n");
            push_pairs(&mut out, b);
        }
        if let Some(x) = &self.x {
            out.push_str("x\n");
            push_pairs(&mut out, x);
        }
        f.write_str(&out)
    }
}

impl std::str::FromStr for InstanceFile {
    type Err = BenchError;

    fn from_str(text: &str) -> Result<Self> {
        let mut tokens = text.lines().filter(|l| !l.trim_start().starts_with('#')).flat_map(str::split_whitespace).peekable();
        let mut dim = |what: &str| -> Result<usize> {
            let tok = tokens.next().ok_or_else(|| BenchError::Instance(format!("missing {what}")))?;
            tok.parse().map_err(|_| BenchError::Instance(format!("invalid {what} `{tok}`")))
        };
        let (m, n) = (dim("row count")?, dim("column count")?);
        if m == 0 || n == 0 {
            return Err(BenchError::Instance(format!("dimensions must be positive, got {m} x {n}")));
        }

        fn complex_values<'a>(tokens: &mut impl Iterator<Item = &'a str>, count: usize, what: &str) -> Result<Vec<Scalar>> {
            let mut out = Vec::with_capacity(count);
            for i in 0..count {
                let mut part = || -> Result<f64> {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| BenchError::Instance(format!("{what}: expected {count} complex entries, found {i}")))?;
                    tok.parse().map_err(|_| BenchError::Instance(format!("{what}: invalid number `{tok}`")))
                };
                let (re, im) = (part()?, part()?);
                out.push(Scalar::new(re, im));
            }
            Ok(out)
        }

        let a = DenseMatrix::new(m, n, complex_values(&mut tokens, m * n, "matrix")?)?;
        let (mut b, mut x) = (None, None);
        while let Some(section) = tokens.next() {
            match section {
                "b" if b.is_none() => b = Some(complex_values(&mut tokens, m, "b")?),
                "x" if x.is_none() => x = Some(complex_values(&mut tokens, n, "x")?),
                other => return Err(BenchError::Instance(format!("unexpected token `{other}`"))),
            }
        }
        Ok(Self { a, b, x })
    }
}
