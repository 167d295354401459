use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMat, KrylovOptions, LowestPairs};
use crate::{Error, Result, C64};

/// Above this dimension the dense eigensolver gives way to shift-invert Krylov.
pub const DENSE_LIMIT: usize = 2048;
/// Largest Gram matrix accepted.
pub const DEFAULT_GRAM_CAP: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// ||y|| = sqrt((R+1) N).
    Relaxed,
    /// |y_i| = 1 for all i.
    Rounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseAssignment {
    pub y: Vec<C64>,
    pub norm_kind: NormKind,
}

impl PhaseAssignment {
    /// Rescales `v` to the relaxed norm.
    pub fn relaxed(v: Vec<C64>) -> Self {
        let target = (v.len() as f64).sqrt();
        let nv = linalg::norm(&v);
        let s = if nv > 0.0 { target / nv } else { 0.0 };
        Self { y: v.into_iter().map(|z| z * s).collect(), norm_kind: NormKind::Relaxed }
    }

    /// Entrywise unit modulus; zero entries become 1. Returns the count of those.
    pub fn rounded(&self) -> (Self, usize) {
        let mut zeros = 0;
        let y = self
            .y
            .iter()
            .map(|z| {
                let m = z.norm();
                if m > 0.0 {
                    z / m
                } else {
                    zeros += 1;
                    C64::new(1.0, 0.0)
                }
            })
            .collect();
        (Self { y, norm_kind: NormKind::Rounded }, zeros)
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda_min: f64,
    pub lambda_second: f64,
    pub y_min: PhaseAssignment,
    pub residual: f64,
}

fn check_dim(gram: &CMat) -> Result<usize> {
    let n = gram.nrows();
    if n != gram.ncols() || n == 0 {
        return Err(Error::ShapeMismatch("Gram matrix must be square and non-empty".into()));
    }
    if n > DEFAULT_GRAM_CAP {
        return Err(Error::invalid(format!("Gram dimension {n} exceeds cap {DEFAULT_GRAM_CAP}")));
    }
    Ok(n)
}

fn solve(gram: &CMat, want_vector: bool) -> Result<LowestPairs> {
    let n = check_dim(gram)?;
    if n < DENSE_LIMIT {
        linalg::lowest_pairs_dense(gram, want_vector)
    } else {
        linalg::lowest_pairs_krylov(gram, KrylovOptions::default())
    }
}

/// Two smallest eigenvalues and the minimizing vector, residual-verified to
/// 1e-8 max|G|.
pub fn smallest_eigpair(gram: &CMat) -> Result<EigenResult> {
    let pairs = solve(gram, true)?;
    let scale = linalg::max_abs(gram);
    if !(pairs.residual <= 1e-8 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::Eigensolver { reason: "residual above tolerance".into(), residual: pairs.residual });
    }
    Ok(EigenResult {
        lambda_min: pairs.lambda_min,
        lambda_second: pairs.lambda_second,
        y_min: PhaseAssignment::relaxed(pairs.vector),
        residual: pairs.residual,
    })
}

/// Just (lambda_min, lambda_second).
pub fn smallest_two(gram: &CMat) -> Result<(f64, f64)> {
    let pairs = solve(gram, false)?;
    Ok((pairs.lambda_min, pairs.lambda_second))
}
