//! Thin helpers over `faer` for dense Hermitian work.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result, C64};

pub type CMat = Mat<C64>;

/// Eigenvalues in ascending order with matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn hermitian_eigen(m: &CMat) -> Result<Eigen> {
    let e = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|err| Error::Eigensolver { reason: format!("{err:?}"), residual: f64::NAN })?;
    let n = m.nrows();
    let values = (0..n).map(|i| e.S()[i].re).collect();
    Ok(Eigen { values, vectors: e.U().to_owned() })
}

pub fn hermitian_eigenvalues(m: &CMat) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|err| Error::Eigensolver { reason: format!("{err:?}"), residual: f64::NAN })
}

pub fn max_abs(m: &CMat) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

/// max |M - M^dagger|
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn matvec(m: &CMat, v: &[C64]) -> Vec<C64> {
    let x = Mat::from_fn(v.len(), 1, |i, _| v[i]);
    let y = m * &x;
    (0..m.nrows()).map(|i| y[(i, 0)]).collect()
}

pub fn column(m: &CMat, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

/// Conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Two smallest eigenpairs of a Hermitian positive semidefinite matrix.
#[derive(Debug, Clone)]
pub struct LowestPairs {
    pub lambda_min: f64,
    pub lambda_second: f64,
    /// Unit-norm eigenvector of `lambda_min`.
    pub vector: Vec<C64>,
    /// max over both pairs of |G v - lambda v|.
    pub residual: f64,
}

/// Tuning for [`lowest_pairs_krylov`].
#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    pub block: usize,
    pub max_basis: usize,
    /// Relative residual target, measured against max|G|.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { block: 4, max_basis: 480, tol: 1e-10, seed: 0x5eed }
    }
}

pub fn lowest_pairs_dense(g: &CMat, want_vector: bool) -> Result<LowestPairs> {
    let n = g.nrows();
    if n == 0 {
        return Err(Error::invalid("empty Gram matrix"));
    }
    if !want_vector {
        let ev = hermitian_eigenvalues(g)?;
        let second = if n > 1 { ev[1] } else { ev[0] };
        return Ok(LowestPairs { lambda_min: ev[0], lambda_second: second, vector: Vec::new(), residual: 0.0 });
    }
    let e = hermitian_eigen(g)?;
    let v = column(&e.vectors, 0);
    let gv = matvec(g, &v);
    let residual = gv.iter().zip(&v).map(|(a, b)| (a - b * e.values[0]).norm_sqr()).sum::<f64>().sqrt();
    let second = if n > 1 { e.values[1] } else { e.values[0] };
    Ok(LowestPairs { lambda_min: e.values[0], lambda_second: second, vector: v, residual })
}

/// Block Krylov iteration on (G + delta I)^-1 with full reorthogonalization,
/// followed by Rayleigh-Ritz against G itself so the reported residuals are
/// the true ones.
pub fn lowest_pairs_krylov(g: &CMat, opts: KrylovOptions) -> Result<LowestPairs> {
    let n = g.nrows();
    let b = opts.block.max(2).min(n);
    let scale = max_abs(g).max(f64::MIN_POSITIVE);
    let delta = 1e-10 * scale;
    let mut shifted = g.clone();
    for i in 0..n {
        shifted[(i, i)] += C64::new(delta, 0.0);
    }
    let llt = shifted
        .llt(Side::Lower)
        .map_err(|err| Error::Eigensolver { reason: format!("cholesky: {err:?}"), residual: f64::NAN })?;

    let max_basis = opts.max_basis.min(n);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_basis);
    let mut g_basis: Vec<Vec<C64>> = Vec::with_capacity(max_basis);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut block: Vec<Vec<C64>> = (0..b)
        .map(|_| (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect())
        .collect();

    let mut projected: Vec<Vec<C64>> = Vec::with_capacity(max_basis);
    let mut last_check = 0usize;
    let mut best: Option<LowestPairs> = None;
    loop {
        let mut added = Vec::new();
        for mut v in block.drain(..) {
            for _ in 0..2 {
                for q in &basis {
                    let c = inner(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= c * qi;
                    }
                }
            }
            let nv = norm(&v);
            if nv < 1e-12 || basis.len() >= max_basis {
                continue;
            }
            v.iter_mut().for_each(|z| *z /= nv);
            let gv = matvec(g, &v);
            let col: Vec<C64> = basis.iter().map(|q| inner(q, &gv)).collect();
            projected.push(col);
            g_basis.push(gv);
            basis.push(v);
            added.push(basis.len() - 1);
        }
        let m = basis.len();
        let stalled = added.is_empty() || m >= max_basis;
        if m >= 2 && (m - last_check >= 4 * b || stalled) {
            last_check = m;
            let pairs = ritz_lowest(&basis, &g_basis, &projected)?;
            let done = pairs.residual <= opts.tol * scale;
            best = Some(pairs);
            if done {
                break;
            }
        }
        if stalled {
            break;
        }
        let mut rhs = Mat::from_fn(n, added.len(), |i, c| basis[added[c]][i]);
        llt.solve_in_place(&mut rhs);
        block = (0..added.len()).map(|c| (0..n).map(|i| rhs[(i, c)]).collect()).collect();
    }
    best.ok_or_else(|| Error::Eigensolver { reason: "Krylov space collapsed".into(), residual: f64::NAN })
}

/// `projected[k][i]` holds <q_i, G q_k> for i < k.
fn ritz_lowest(basis: &[Vec<C64>], g_basis: &[Vec<C64>], projected: &[Vec<C64>]) -> Result<LowestPairs> {
    let m = basis.len();
    let n = basis[0].len();
    let h = Mat::from_fn(m, m, |i, j| {
        if i < j {
            projected[j][i]
        } else if i > j {
            projected[i][j].conj()
        } else {
            C64::new(inner(&basis[i], &g_basis[i]).re, 0.0)
        }
    });
    let e = hermitian_eigen(&h)?;
    let mut residual = 0.0f64;
    let mut first = Vec::new();
    for p in 0..2 {
        let mut v = vec![C64::new(0.0, 0.0); n];
        let mut gv = vec![C64::new(0.0, 0.0); n];
        for k in 0..m {
            let c = e.vectors[(k, p)];
            for i in 0..n {
                v[i] += c * basis[k][i];
                gv[i] += c * g_basis[k][i];
            }
        }
        let r = gv.iter().zip(&v).map(|(a, b)| (a - b * e.values[p]).norm_sqr()).sum::<f64>().sqrt();
        residual = residual.max(r);
        if p == 0 {
            first = v;
        }
    }
    Ok(LowestPairs { lambda_min: e.values[0], lambda_second: e.values[1], vector: first, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_psd(n: usize, rank: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::from_fn(rank, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        a.adjoint() * &a
    }

    #[test]
    fn krylov_matches_dense_on_full_rank() {
        let g = random_psd(120, 200, 1);
        let dense = lowest_pairs_dense(&g, true).unwrap();
        let kry = lowest_pairs_krylov(&g, KrylovOptions::default()).unwrap();
        assert!((dense.lambda_min - kry.lambda_min).abs() < 1e-9 * dense.lambda_second.max(1.0));
        assert!((dense.lambda_second - kry.lambda_second).abs() < 1e-9 * dense.lambda_second.max(1.0));
        let overlap = inner(&dense.vector, &kry.vector).norm();
        assert!((overlap - 1.0).abs() < 1e-8);
    }

    #[test]
    fn krylov_finds_repeated_null_space() {
        let g = random_psd(90, 88, 2);
        let kry = lowest_pairs_krylov(&g, KrylovOptions::default()).unwrap();
        let scale = max_abs(&g);
        assert!(kry.lambda_min.abs() < 1e-9 * scale);
        assert!(kry.lambda_second.abs() < 1e-9 * scale);
        assert!(kry.residual < 1e-8 * scale);
    }

    #[test]
    fn hermiticity_defect_detects_asymmetry() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert_eq!(hermiticity_defect(&m), 1.0);
        m[(1, 0)] = C64::new(1.0, 0.0);
        assert_eq!(hermiticity_defect(&m), 0.0);
    }
}
