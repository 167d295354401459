use serde::{Deserialize, Serialize};

use crate::dsp::{dft_vec, idft_vec};
use crate::shotnoise::{interference_scale, SampleKey, ShotConfig};
use crate::simcore::{all_secondary_bitstrings, signal_1d, BitString, Hamiltonian, QuantumState, SpectralWeights};
use crate::{Error, Result, C64};

/// Magnitudes measured for one secondary state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondaryMagnitudes {
    pub abs_f2: Vec<f64>,
    pub abs_f3: Vec<f64>,
    pub abs_f4: Vec<f64>,
}

/// |f1| plus, per secondary state r, |f2|, |f1 + f2| and |f1 + i f2|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VprDataset {
    pub abs_f1: Vec<f64>,
    pub secondary: Vec<SecondaryMagnitudes>,
    pub dt: f64,
}

impl VprDataset {
    pub fn n(&self) -> usize {
        self.abs_f1.len()
    }

    pub fn r_count(&self) -> usize {
        self.secondary.len()
    }

    /// Number of unknown phases, (R + 1) N.
    pub fn unknowns(&self) -> usize {
        (self.r_count() + 1) * self.n()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::invalid("empty dataset"));
        }
        if self.secondary.is_empty() {
            return Err(Error::invalid("dataset needs at least one secondary signal"));
        }
        for (r, s) in self.secondary.iter().enumerate() {
            if s.abs_f2.len() != n || s.abs_f3.len() != n || s.abs_f4.len() != n {
                return Err(Error::ShapeMismatch(format!("secondary block {r} has inconsistent length")));
            }
        }
        let all = self.abs_f1.iter().chain(self.secondary.iter().flat_map(|s| s.abs_f2.iter().chain(&s.abs_f3).chain(&s.abs_f4)));
        if all.clone().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid("magnitudes must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Magnitude block r of the unknown vector: 0 is |f1|, r >= 1 is |f2^(r)|.
    pub fn block(&self, r: usize) -> &[f64] {
        if r == 0 {
            &self.abs_f1
        } else {
            &self.secondary[r - 1].abs_f2
        }
    }

    /// Samples measured in total: (3R + 1) N.
    pub fn sample_points(&self) -> usize {
        (3 * self.r_count() + 1) * self.n()
    }
}

/// Ground-truth complex signals behind a dataset.
#[derive(Debug, Clone)]
pub struct VprSignals {
    pub f1: Vec<C64>,
    pub f2: Vec<Vec<C64>>,
    /// <Phi|psi_r>, used for the interference normalization.
    pub overlaps: Vec<C64>,
    pub dt: f64,
}

fn magnitudes(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| z.norm()).collect()
}

impl VprSignals {
    /// f1 = <Phi|e^{iHt}|Phi>, f2^(r) = <Phi|e^{iHt}|psi_r>.
    pub fn simulate(h: &Hamiltonian, phi: &QuantumState, secondaries: &[QuantumState], dt: f64, n: usize) -> Result<Self> {
        let f1 = signal_1d(h, phi, phi, dt, n)?.values;
        let f2 = secondaries.iter().map(|psi| signal_1d(h, phi, psi, dt, n).map(|s| s.values)).collect::<Result<Vec<_>>>()?;
        let overlaps = secondaries.iter().map(|psi| phi.overlap(psi)).collect();
        Ok(Self { f1, f2, overlaps, dt })
    }

    pub fn n(&self) -> usize {
        self.f1.len()
    }

    pub fn r_count(&self) -> usize {
        self.f2.len()
    }

    pub fn f3(&self, r: usize) -> Vec<C64> {
        self.f1.iter().zip(&self.f2[r]).map(|(a, b)| a + b).collect()
    }

    pub fn f4(&self, r: usize) -> Vec<C64> {
        self.f1.iter().zip(&self.f2[r]).map(|(a, b)| a + C64::i() * b).collect()
    }

    /// The hidden vector x = (f1, f2^(1), ..., f2^(R)).
    pub fn stacked(&self) -> Vec<C64> {
        self.f1.iter().chain(self.f2.iter().flatten()).copied().collect()
    }

    /// Keeps only the first `r` secondary signals.
    pub fn take(&self, r: usize) -> Self {
        Self { f1: self.f1.clone(), f2: self.f2[..r].to_vec(), overlaps: self.overlaps[..r].to_vec(), dt: self.dt }
    }

    pub fn ideal_dataset(&self) -> VprDataset {
        let secondary = (0..self.r_count())
            .map(|r| SecondaryMagnitudes {
                abs_f2: magnitudes(&self.f2[r]),
                abs_f3: magnitudes(&self.f3(r)),
                abs_f4: magnitudes(&self.f4(r)),
            })
            .collect();
        VprDataset { abs_f1: magnitudes(&self.f1), secondary, dt: self.dt }
    }

    /// Signal ids: f1 is 0; for block r (0-based) f2, f3, f4 are 3r+1, 3r+2, 3r+3.
    pub fn noisy_dataset(&self, cfg: &ShotConfig) -> Result<VprDataset> {
        let sample = |v: &[C64], scale: f64, id: u64| -> Result<Vec<f64>> {
            v.iter().enumerate().map(|(j, &z)| cfg.noisy_magnitude(z, scale, SampleKey::new(id, j as u64))).collect()
        };
        let abs_f1 = sample(&self.f1, 1.0, 0)?;
        let secondary = (0..self.r_count())
            .map(|r| {
                let id = 3 * r as u64;
                let ov = self.overlaps[r];
                Ok(SecondaryMagnitudes {
                    abs_f2: sample(&self.f2[r], 1.0, id + 1)?,
                    abs_f3: sample(&self.f3(r), interference_scale(ov, C64::new(1.0, 0.0)), id + 2)?,
                    abs_f4: sample(&self.f4(r), interference_scale(ov, C64::i()), id + 3)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VprDataset { abs_f1, secondary, dt: self.dt })
    }

    /// Zeroes every spectral bin outside one window of `sigma` cyclic bins and
    /// rotates that window to start at bin 0, so the result has support
    /// {0..sigma-1}. The window chosen holds the most total energy across all
    /// signals. Returns the new signals and the original window start.
    pub fn truncate_support(&self, sigma: usize) -> Result<(Self, usize)> {
        let n = self.n();
        if sigma == 0 || sigma > n {
            return Err(Error::invalid(format!("support size {sigma} outside 1..={n}")));
        }
        let spectra: Vec<Vec<C64>> = std::iter::once(&self.f1).chain(&self.f2).map(|s| dft_vec(s)).collect();
        let energy: Vec<f64> = (0..n).map(|k| spectra.iter().map(|s| s[k].norm_sqr()).sum()).collect();
        let window = |k0: usize| -> f64 { (0..sigma).map(|d| energy[(k0 + d) % n]).sum() };
        let k0 = (0..n).max_by(|&a, &b| window(a).total_cmp(&window(b)).then(b.cmp(&a))).unwrap_or(0);
        let cut = |s: &Vec<C64>| -> Vec<C64> {
            let mut kept = vec![C64::new(0.0, 0.0); n];
            for d in 0..sigma {
                kept[d] = s[(k0 + d) % n];
            }
            idft_vec(&kept)
        };
        let f1 = cut(&spectra[0]);
        let f2 = spectra[1..].iter().map(cut).collect();
        Ok((Self { f1, f2, overlaps: self.overlaps.clone(), dt: self.dt }, k0))
    }
}

/// Secondaries whose coupling falls below this carry no phase information.
pub const COUPLING_TOL: f64 = 1e-9;

/// Sum over distinct energies of |<Phi|P_E|psi>|; zero exactly when
/// <Phi|e^{iHt}|psi> vanishes for all t.
pub fn coupling_strength(h: &Hamiltonian, phi: &QuantumState, psi: &QuantumState) -> Result<f64> {
    let sw = SpectralWeights::new(h, phi, psi)?;
    let mut total = 0.0;
    let mut acc = C64::new(0.0, 0.0);
    let mut last: Option<f64> = None;
    for (&e, &w) in sw.energies.iter().zip(&sw.weights) {
        if let Some(l) = last {
            if e - l > 1e-9 * (1.0 + e.abs()) {
                total += acc.norm();
                acc = C64::new(0.0, 0.0);
            }
        }
        acc += w;
        last = Some(e);
    }
    Ok(total + acc.norm())
}

/// The first `r_count` secondary bitstrings (seeded order, see
/// [`all_secondary_bitstrings`]) that couple to `phi` under `h`. Candidates
/// in another symmetry sector would give f2 = 0 identically and leave their
/// block of the quadratic form unconstrained.
pub fn coupled_secondaries(
    h: &Hamiltonian,
    phi: &QuantumState,
    target: &BitString,
    r_count: usize,
    flips_per_state: usize,
    seed: u64,
) -> Result<Vec<BitString>> {
    let mut out = Vec::with_capacity(r_count);
    for b in all_secondary_bitstrings(target, flips_per_state, seed)? {
        if out.len() == r_count {
            break;
        }
        if coupling_strength(h, phi, &QuantumState::basis(&b))? > COUPLING_TOL {
            out.push(b);
        }
    }
    if out.len() < r_count {
        return Err(Error::NotEnoughStates { requested: r_count, possible: out.len() });
    }
    Ok(out)
}
