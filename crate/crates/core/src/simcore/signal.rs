use ndarray::Array2;

use super::hamiltonian::Hamiltonian;
use super::state::QuantumState;
use crate::dsp::WindowKind;
use crate::linalg::{self, CMat};
use crate::{Error, Result, C64};

/// Samples f[j] at t_j = j * dt.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries1D {
    pub values: Vec<C64>,
    pub dt: f64,
    pub label: String,
}

impl TimeSeries1D {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// T = N * dt.
    pub fn period(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

/// f[j, l] on a centered grid stored by modulo index.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal2D {
    pub values: Array2<C64>,
    pub dt: f64,
    pub dz: f64,
    pub windowed: bool,
}

impl Signal2D {
    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn magnitudes(&self) -> Array2<f64> {
        self.values.mapv(|z| z.norm())
    }
}

/// <bra| e^{iHt} |ket> as a weighted sum of phases.
#[derive(Debug, Clone)]
pub struct SpectralWeights {
    pub energies: Vec<f64>,
    pub weights: Vec<C64>,
}

impl SpectralWeights {
    pub fn new(h: &Hamiltonian, bra: &QuantumState, ket: &QuantumState) -> Result<Self> {
        let eig = h.eigen()?;
        if bra.dim() != h.dim() || ket.dim() != h.dim() {
            return Err(Error::ShapeMismatch(format!("states must have size {}", h.dim())));
        }
        let vt = eig.vectors.adjoint();
        let proj = |s: &QuantumState| -> Vec<C64> {
            let x = CMat::from_fn(s.dim(), 1, |i, _| s.amplitudes()[i]);
            let y = vt * &x;
            (0..y.nrows()).map(|i| y[(i, 0)]).collect()
        };
        let (u, w) = (proj(bra), proj(ket));
        let weights = u.iter().zip(&w).map(|(a, b)| a.conj() * b).collect();
        Ok(Self { energies: eig.values.clone(), weights })
    }

    pub fn at(&self, t: f64) -> C64 {
        self.energies.iter().zip(&self.weights).map(|(&e, &w)| w * C64::from_polar(1.0, e * t)).sum()
    }
}

pub fn signal_1d(h: &Hamiltonian, bra: &QuantumState, ket: &QuantumState, dt: f64, n_samples: usize) -> Result<TimeSeries1D> {
    let sw = SpectralWeights::new(h, bra, ket)?;
    let values = (0..n_samples).map(|j| sw.at(j as f64 * dt)).collect();
    Ok(TimeSeries1D { values, dt, label: String::new() })
}

fn half_width(n: usize, what: &str) -> Result<i64> {
    if n.is_multiple_of(2) {
        return Err(Error::invalid(format!("{what} must be odd, got {n}")));
    }
    Ok((n as i64 - 1) / 2)
}

fn wrap(offset: i64, n: usize) -> usize {
    offset.rem_euclid(n as i64) as usize
}

/// Centered, windowed f(j' dt) for j' in [-(N-1)/2, (N-1)/2], stored at j' mod N.
/// This is the z = 0 slice of [`signal_2d`].
pub fn windowed_series(h: &Hamiltonian, psi: &QuantumState, dt: f64, n: usize, window: WindowKind) -> Result<TimeSeries1D> {
    let half = half_width(n, "n")?;
    let sw = SpectralWeights::new(h, psi, psi)?;
    let period = n as f64 * dt;
    let mut values = vec![C64::new(0.0, 0.0); n];
    for j in -half..=half {
        let t = j as f64 * dt;
        values[wrap(j, n)] = sw.at(t) * window.eval(t, period);
    }
    Ok(TimeSeries1D { values, dt, label: "windowed".into() })
}

/// Joint eigenbasis data of commuting (H, H_D): for each joint eigenvector,
/// its H energy, H_D eigenvalue and weight |<psi|v>|^2.
fn joint_weights(h: &Hamiltonian, hd: &Hamiltonian, psi: &QuantumState) -> Result<Vec<(f64, f64, f64)>> {
    let deig = hd.eigen()?;
    let dim = h.dim();
    let mut out = Vec::with_capacity(dim);
    let mut start = 0;
    while start < dim {
        let base = deig.values[start];
        let tol = 1e-9 * base.abs().max(1.0);
        let mut end = start + 1;
        while end < dim && (deig.values[end] - base).abs() <= tol {
            end += 1;
        }
        let k = end - start;
        let vc = CMat::from_fn(dim, k, |i, c| deig.vectors[(i, start + c)]);
        let hc = vc.adjoint() * h.matrix() * &vc;
        let hc = CMat::from_fn(k, k, |i, j| (hc[(i, j)] + hc[(j, i)].conj()) * 0.5);
        let e = linalg::hermitian_eigen(&hc)?;
        let psi_m = CMat::from_fn(dim, 1, |i, _| psi.amplitudes()[i]);
        let p = e.vectors.adjoint() * (vc.adjoint() * &psi_m);
        let mean_d: f64 = deig.values[start..end].iter().sum::<f64>() / k as f64;
        for i in 0..k {
            out.push((e.values[i], mean_d, p[(i, 0)].norm_sqr()));
        }
        start = end;
    }
    Ok(out)
}

/// Variance of `op` in `psi`.
pub fn variance(op: &Hamiltonian, psi: &QuantumState) -> Result<f64> {
    let v = op.apply(psi)?;
    let mean = linalg::inner(psi.amplitudes(), &v).re;
    Ok((linalg::norm(&v).powi(2) - mean * mean).max(0.0))
}

/// 2D signal with the default virtual-time grid T' = T, i.e. dz = N dt / M.
pub fn signal_2d(
    h: &Hamiltonian,
    hd: &Hamiltonian,
    psi: &QuantumState,
    dt: f64,
    n: usize,
    m: usize,
    window: WindowKind,
) -> Result<Signal2D> {
    signal_2d_with_dz(h, hd, psi, dt, n as f64 * dt / m as f64, n, m, window)
}

/// f(t, z) = <psi| e^{itH} e^{izH_D} |psi> times the product window, sampled
/// at centered (j' dt, l' dz) and stored at (j' mod N, l' mod M). Only the
/// half-plane is evaluated; the rest follows from f(-t,-z) = conj f(t,z).
#[allow(clippy::too_many_arguments)]
pub fn signal_2d_with_dz(
    h: &Hamiltonian,
    hd: &Hamiltonian,
    psi: &QuantumState,
    dt: f64,
    dz: f64,
    n: usize,
    m: usize,
    window: WindowKind,
) -> Result<Signal2D> {
    let hn = half_width(n, "n")?;
    let hm = half_width(m, "m")?;
    if hd.dim() != h.dim() || psi.dim() != h.dim() {
        return Err(Error::ShapeMismatch("H, H_D and psi must share a Hilbert space".into()));
    }
    let scale = linalg::max_abs(h.matrix()).max(1.0) * linalg::max_abs(hd.matrix()).max(1.0);
    let comm = h.commutator_max(hd)?;
    if comm > 1e-10 * scale {
        return Err(Error::NonCommuting(comm));
    }
    let var = variance(hd, psi)?;
    if var <= 1e-10 {
        return Err(Error::DegenerateEmbedding(var));
    }
    let joint = joint_weights(h, hd, psi)?;
    let joint: Vec<_> = joint.into_iter().filter(|&(_, _, w)| w > 0.0).collect();
    let (period_t, period_z) = (n as f64 * dt, m as f64 * dz);

    // z-factor table: zf[l'][i] = w_i e^{i l' dz E^D_i}
    let z_table: Vec<Vec<C64>> = (-hm..=hm)
        .map(|l| joint.iter().map(|&(_, ed, w)| C64::from_polar(w, l as f64 * dz * ed)).collect())
        .collect();
    let mut values = Array2::zeros((n, m));
    for j in 0..=hn {
        let t = j as f64 * dt;
        let t_phase: Vec<C64> = joint.iter().map(|&(e, _, _)| C64::from_polar(1.0, t * e)).collect();
        let wt = window.eval(t, period_t);
        for (li, l) in (-hm..=hm).enumerate() {
            if j == 0 && l < 0 {
                continue;
            }
            let raw: C64 = t_phase.iter().zip(&z_table[li]).map(|(a, b)| a * b).sum();
            let z = l as f64 * dz;
            let v = raw * wt * window.eval(z, period_z);
            values[(wrap(j, n), wrap(l, m))] = v;
            if j != 0 || l != 0 {
                values[(wrap(-j, n), wrap(-l, m))] = v.conj();
            }
        }
    }
    Ok(Signal2D { values, dt, dz, windowed: window != WindowKind::Rectangular })
}
