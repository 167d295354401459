use super::super::simcore::{Hamiltonian, QuantumState};
use crate::{Error, Result, C64};

/// Phases of f[0, l] = <psi| e^{i z_l H_D} |psi> for centered z_l = l' dz,
/// stored at l' mod M. Needs a diagonal H_D, so the value is a finite sum
/// over the support of psi.
pub fn classical_anchor_phases(hd: &Hamiltonian, psi: &QuantumState, dz: f64, m: usize) -> Result<Vec<C64>> {
    if !hd.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    if m.is_multiple_of(2) {
        return Err(Error::invalid(format!("m must be odd, got {m}")));
    }
    if psi.dim() != hd.dim() {
        return Err(Error::ShapeMismatch("state and H_D sizes differ".into()));
    }
    let diag = hd.diagonal();
    let support: Vec<(f64, f64)> = psi.support().map(|(x, a)| (a.norm_sqr(), diag[x])).collect();
    let half = (m as i64 - 1) / 2;
    let mut out = vec![C64::new(1.0, 0.0); m];
    for l in -half..=half {
        let z = l as f64 * dz;
        let v: C64 = support.iter().map(|&(w, d)| C64::from_polar(w, z * d)).sum();
        out[l.rem_euclid(m as i64) as usize] = if v.norm() > 0.0 { v / v.norm() } else { C64::new(1.0, 0.0) };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::{build_number_operator, BitString, Lattice};

    #[test]
    fn two_mode_uniform() {
        let hd = build_number_operator(&Lattice::new(1, 2, false).unwrap()).unwrap();
        let psi = QuantumState::uniform(2);
        let dz = 0.3;
        let a = classical_anchor_phases(&hd, &psi, dz, 7).unwrap();
        assert_eq!(a[0], C64::new(1.0, 0.0));
        for l in -3i64..=3 {
            let z = l as f64 * dz;
            let v = (C64::new(1.0, 0.0) + C64::from_polar(2.0, z) + C64::from_polar(1.0, 2.0 * z)) / 4.0;
            assert!((a[l.rem_euclid(7) as usize] - v / v.norm()).norm() < 1e-14);
        }
    }

    #[test]
    fn eigenstate_is_pure_tone() {
        let hd = build_number_operator(&Lattice::new(1, 3, false).unwrap()).unwrap();
        let psi = QuantumState::basis(&"101".parse::<BitString>().unwrap());
        let a = classical_anchor_phases(&hd, &psi, 0.2, 5).unwrap();
        assert!((a[1] - C64::from_polar(1.0, 0.4)).norm() < 1e-14);
        assert!((a[4] - C64::from_polar(1.0, -0.4)).norm() < 1e-14);
    }
}
