use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::fourier::{dft2_array, idft2_array};
use super::metrics::l1_magnitude_error;
use super::spectrum::{Spectrum1D, Spectrum2D};
use crate::{Error, Result, C64};

/// Global phase, cyclic shift and conjugate reflection.
///
/// `apply(x)[k] = e^{i phase} * y[k - shift]` where `y = x` or, when
/// `conj_reflect` is set, `y[k] = conj(x[-k])`. Indices are cyclic.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AmbiguityTransform {
    pub shift: (usize, usize),
    pub conj_reflect: bool,
    pub global_phase: f64,
}

impl AmbiguityTransform {
    pub fn is_identity(&self) -> bool {
        self.shift == (0, 0) && !self.conj_reflect && self.global_phase == 0.0
    }

    pub fn apply(&self, x: &Array2<C64>) -> Array2<C64> {
        let (n, m) = x.dim();
        let (k0, m0) = (self.shift.0 % n, self.shift.1 % m);
        let rot = C64::from_polar(1.0, self.global_phase);
        Array2::from_shape_fn((n, m), |(k, q)| {
            let (sk, sq) = ((k + n - k0) % n, (q + m - m0) % m);
            let y = if self.conj_reflect { x[((n - sk) % n, (m - sq) % m)].conj() } else { x[(sk, sq)] };
            rot * y
        })
    }

    pub fn invert(&self, z: &Array2<C64>) -> Array2<C64> {
        let (n, m) = z.dim();
        let (k0, m0) = (self.shift.0 % n, self.shift.1 % m);
        let rot = C64::from_polar(1.0, -self.global_phase);
        let unshift = |k: usize, q: usize| rot * z[((k + k0) % n, (q + m0) % m)];
        Array2::from_shape_fn((n, m), |(k, q)| {
            if self.conj_reflect {
                unshift((n - k) % n, (m - q) % m).conj()
            } else {
                unshift(k, q)
            }
        })
    }

    pub fn apply_1d(&self, x: &[C64]) -> Vec<C64> {
        self.apply(&column(x)).into_iter().collect()
    }

    pub fn invert_1d(&self, z: &[C64]) -> Vec<C64> {
        self.invert(&column(z)).into_iter().collect()
    }
}

fn column(x: &[C64]) -> Array2<C64> {
    Array2::from_shape_vec((x.len(), 1), x.to_vec()).expect("length matches")
}

/// Closed-form phase so that `cand ~ e^{i phi} * base`.
fn best_phase(base: &Array2<C64>, cand: &Array2<C64>) -> f64 {
    let overlap: C64 = base.iter().zip(cand.iter()).map(|(b, c)| b.conj() * c).sum();
    if overlap.norm() == 0.0 {
        0.0
    } else {
        overlap.arg()
    }
}

fn finish(cand: &Array2<C64>, reference: &Array2<C64>, shift: (usize, usize), conj_reflect: bool) -> (AmbiguityTransform, Array2<C64>) {
    let mut t = AmbiguityTransform { shift, conj_reflect, global_phase: 0.0 };
    let moved = t.apply(reference);
    let phase = best_phase(&moved, cand);
    // keep the exact identity when the phase is pure rounding noise
    t.global_phase = if phase.abs() < 1e-12 { 0.0 } else { phase };
    let aligned = t.invert(cand);
    (t, aligned)
}

/// Finds `T` with `candidate ~ T(reference)` by exhaustive search over cyclic
/// shifts and reflection under the magnitude l1 metric; returns `T` and
/// `T^-1(candidate)`. Ties resolve toward the identity, then smaller shifts.
pub fn align_ambiguities(candidate: &Spectrum1D, reference: &Spectrum1D) -> Result<(AmbiguityTransform, Spectrum1D)> {
    let n = candidate.len();
    if n != reference.len() {
        return Err(Error::ShapeMismatch(format!("spectra of length {} and {}", n, reference.len())));
    }
    let cm = candidate.magnitudes();
    let rm = reference.magnitudes();
    let mut best = (f64::INFINITY, 0usize, false);
    for reflect in [false, true] {
        for k0 in 0..n {
            let mut err = 0.0;
            for (k, c) in cm.iter().enumerate() {
                let src = (k + n - k0) % n;
                let src = if reflect { (n - src) % n } else { src };
                err += (c - rm[src]).abs();
            }
            err /= n.max(1) as f64;
            if best.0.is_infinite() || err < best.0 - 1e-12 * best.0.max(1e-300) {
                best = (err, k0, reflect);
            }
        }
    }
    let (t, aligned) = finish(&column(&candidate.values), &column(&reference.values), (best.1, 0), best.2);
    Ok((t, Spectrum1D::new(aligned.into_iter().collect(), candidate.period)))
}

/// 2D variant. The shift search maximizes the circular cross-correlation of
/// magnitudes (computed through the DFT), which is the L2 magnitude
/// mismatch minimizer; the reported error is still l1.
pub fn align_ambiguities_2d(candidate: &Spectrum2D, reference: &Spectrum2D) -> Result<(AmbiguityTransform, Spectrum2D)> {
    let (n, m) = candidate.values.dim();
    if reference.values.dim() != (n, m) {
        return Err(Error::ShapeMismatch(format!("grids {:?} and {:?}", (n, m), reference.values.dim())));
    }
    let mags = |a: &Array2<C64>| a.mapv(|z| C64::new(z.norm(), 0.0));
    let a_hat = dft2_array(&mags(&candidate.values));
    let mut best: Option<(f64, (usize, usize), bool)> = None;
    let mut scores = Vec::new();
    for reflect in [false, true] {
        let base = AmbiguityTransform { shift: (0, 0), conj_reflect: reflect, global_phase: 0.0 }.apply(&reference.values);
        let b_hat = dft2_array(&mags(&base));
        let prod = Array2::from_shape_fn((n, m), |ix| a_hat[ix] * b_hat[ix].conj());
        let corr = idft2_array(&prod);
        for ((k, q), z) in corr.indexed_iter() {
            scores.push((z.re, (k, q), reflect));
        }
    }
    let top = scores.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * top.abs().max(1e-300);
    for &(score, shift, reflect) in &scores {
        if score >= top - tol {
            let key = (reflect, shift);
            if best.is_none_or(|(_, s, r)| key < (r, s)) {
                best = Some((score, shift, reflect));
            }
        }
    }
    let (_, shift, reflect) = best.expect("non-empty grid");
    let (t, aligned) = finish(&candidate.values, &reference.values, shift, reflect);
    Ok((t, Spectrum2D { values: aligned, period_t: candidate.period_t, period_z: candidate.period_z }))
}

/// l1 error after alignment, 1D.
pub fn aligned_l1_error(candidate: &Spectrum1D, reference: &Spectrum1D) -> Result<(f64, AmbiguityTransform, Spectrum1D)> {
    let (t, aligned) = align_ambiguities(candidate, reference)?;
    let err = l1_magnitude_error(&aligned.values, &reference.values)?;
    Ok((err, t, aligned))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, m: usize) -> Array2<C64> {
        Array2::from_shape_fn((n, m), |(k, q)| {
            let x = (k * 31 + q * 17 + 3) as f64;
            C64::new((x * 0.37).sin() + 1.3, (x * 0.11).cos())
        })
    }

    #[test]
    fn apply_then_invert_is_identity() {
        let x = sample(7, 5);
        let t = AmbiguityTransform { shift: (3, 4), conj_reflect: true, global_phase: 0.7 };
        let back = t.invert(&t.apply(&x));
        for (a, b) in back.iter().zip(x.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn recovers_constructed_shift_2d() {
        let r = sample(9, 11);
        let truth = AmbiguityTransform { shift: (3, 5), conj_reflect: false, global_phase: 1.1 };
        let c = truth.apply(&r);
        let rs = Spectrum2D { values: r, period_t: 1.0, period_z: 1.0 };
        let cs = Spectrum2D { values: c, period_t: 1.0, period_z: 1.0 };
        let (t, aligned) = align_ambiguities_2d(&cs, &rs).unwrap();
        assert_eq!(t.shift, (3, 5));
        assert!(!t.conj_reflect);
        assert!((t.global_phase - 1.1).abs() < 1e-10);
        let resid = aligned.values.iter().zip(rs.values.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(resid < 1e-10);
    }

    #[test]
    fn recovers_reflection_1d() {
        let r: Vec<C64> = sample(13, 1).into_iter().collect();
        let truth = AmbiguityTransform { shift: (0, 0), conj_reflect: true, global_phase: 0.0 };
        let c = truth.apply_1d(&r);
        let (t, aligned) = align_ambiguities(&Spectrum1D::new(c, 1.0), &Spectrum1D::new(r.clone(), 1.0)).unwrap();
        assert!(t.conj_reflect);
        assert_eq!(t.shift, (0, 0));
        assert!(aligned.values.iter().zip(&r).all(|(a, b)| (a - b).norm() < 1e-10));
    }

    #[test]
    fn identity_and_idempotence() {
        let r: Vec<C64> = sample(17, 1).into_iter().collect();
        let rs = Spectrum1D::new(r.clone(), 1.0);
        let (t, _) = align_ambiguities(&rs, &rs).unwrap();
        assert!(t.is_identity());

        let shifted = AmbiguityTransform { shift: (4, 0), conj_reflect: false, global_phase: -0.3 }.apply_1d(&r);
        let (_, aligned) = align_ambiguities(&Spectrum1D::new(shifted, 1.0), &rs).unwrap();
        let (again, _) = align_ambiguities(&aligned, &rs).unwrap();
        assert!(again.is_identity(), "{again:?}");
    }
}
