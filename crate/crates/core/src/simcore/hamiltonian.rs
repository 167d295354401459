use serde::Serialize;

use super::lattice::{FermiHubbardParams, Lattice, Spin};
use super::state::QuantumState;
use crate::linalg::{self, CMat, Eigen};
use crate::{Error, Result, C64};

/// Largest Hilbert dimension accepted by the dense builders.
pub const DEFAULT_DIM_CAP: usize = 1 << 12;

/// Dense Hermitian operator on n qubits with an optional cached eigensystem.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: CMat,
    eig: Option<Eigen>,
}

impl Hamiltonian {
    /// Validates shape and Hermiticity; does not diagonalize.
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::ShapeMismatch(format!(
                "Hamiltonian must be square with power-of-two size, got {}x{}",
                dim,
                matrix.ncols()
            )));
        }
        let scale = linalg::max_abs(&matrix);
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > 1e-12 * scale.max(f64::MIN_POSITIVE) && defect > 0.0 {
            return Err(Error::invalid(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(Self { matrix, eig: None })
    }

    /// Diagonal operator; the eigensystem is read off directly.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let matrix = CMat::from_fn(dim, dim, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) });
        let mut h = Self::from_matrix(matrix)?;
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let values = order.iter().map(|&i| diag[i]).collect();
        let vectors = CMat::from_fn(dim, dim, |i, j| if order[j] == i { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        h.eig = Some(Eigen { values, vectors });
        Ok(h)
    }

    pub fn diagonalize(mut self) -> Result<Self> {
        if self.eig.is_none() {
            self.eig = Some(linalg::hermitian_eigen(&self.matrix)?);
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn eigen(&self) -> Result<&Eigen> {
        self.eig.as_ref().ok_or(Error::MissingEigensystem)
    }

    pub fn eigenvalues(&self) -> Result<&[f64]> {
        Ok(&self.eigen()?.values)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.matrix[(i, j)] == C64::new(0.0, 0.0)))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// max |[A, B]| entrywise.
    pub fn commutator_max(&self, other: &Hamiltonian) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch("commutator of operators with different sizes".into()));
        }
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        Ok(linalg::max_abs(&(ab - ba)))
    }

    pub fn apply(&self, state: &QuantumState) -> Result<Vec<C64>> {
        if state.dim() != self.dim() {
            return Err(Error::ShapeMismatch(format!("state of size {} vs operator {}", state.dim(), self.dim())));
        }
        Ok(linalg::matvec(&self.matrix, state.amplitudes()))
    }

    /// Compact JSON dump for debugging: size, eigenvalues if known.
    pub fn debug_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Dump<'a> {
            dim: usize,
            n_qubits: usize,
            eigenvalues: Option<&'a [f64]>,
        }
        serde_json::to_value(Dump {
            dim: self.dim(),
            n_qubits: self.n_qubits(),
            eigenvalues: self.eig.as_ref().map(|e| e.values.as_slice()),
        })
        .expect("plain struct serializes")
    }
}

fn check_cap(lattice: &Lattice, cap: usize) -> Result<usize> {
    match lattice.hilbert_dim() {
        Some(d) if d <= cap as u128 => Ok(d as usize),
        Some(d) => Err(Error::DeskScaleExceeded { required: d, cap }),
        None => Err(Error::DeskScaleExceeded { required: u128::MAX, cap }),
    }
}

#[inline]
fn occupied(state: usize, mode: usize, n: usize) -> bool {
    (state >> (n - 1 - mode)) & 1 == 1
}

#[inline]
fn flip(state: usize, mode: usize, n: usize) -> usize {
    state ^ (1 << (n - 1 - mode))
}

/// Parity of occupied modes with index below `mode`.
#[inline]
fn jw_sign(state: usize, mode: usize, n: usize) -> f64 {
    let above = if mode == 0 { 0 } else { state >> (n - mode) };
    if above.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// a_p^dagger a_q applied to a basis state: `Some((sign, new_state))` or zero.
fn hop(state: usize, p: usize, q: usize, n: usize) -> Option<(f64, usize)> {
    if !occupied(state, q, n) {
        return None;
    }
    let s1 = jw_sign(state, q, n);
    let mid = flip(state, q, n);
    if occupied(mid, p, n) {
        return None;
    }
    let s2 = jw_sign(mid, p, n);
    Some((s1 * s2, flip(mid, p, n)))
}

pub fn build_fermi_hubbard(lattice: &Lattice, params: &FermiHubbardParams) -> Result<Hamiltonian> {
    build_fermi_hubbard_capped(lattice, params, DEFAULT_DIM_CAP)
}

/// Jordan-Wigner image of -tau sum (a^dagger a + h.c.) + U sum n_up n_down, diagonalized.
pub fn build_fermi_hubbard_capped(lattice: &Lattice, params: &FermiHubbardParams, cap: usize) -> Result<Hamiltonian> {
    let dim = check_cap(lattice, cap)?;
    let n = lattice.modes();
    let mut m = CMat::zeros(dim, dim);
    let edges = lattice.edges();
    for x in 0..dim {
        for &(a, b) in &edges {
            for &spin in lattice.spins() {
                let (p, q) = (lattice.mode(a, spin), lattice.mode(b, spin));
                for (to, from) in [(p, q), (q, p)] {
                    if let Some((sign, y)) = hop(x, to, from, n) {
                        m[(y, x)] += C64::new(-params.tau * sign, 0.0);
                    }
                }
            }
        }
        if lattice.spinful {
            let doubles = (0..lattice.sites())
                .filter(|&s| occupied(x, lattice.mode(s, Spin::Up), n) && occupied(x, lattice.mode(s, Spin::Down), n))
                .count();
            m[(x, x)] += C64::new(params.u * doubles as f64, 0.0);
        }
    }
    Hamiltonian::from_matrix(m)?.diagonalize()
}

/// Total particle number sum (I - Z)/2, i.e. the Hamming weight of each basis label.
pub fn build_number_operator(lattice: &Lattice) -> Result<Hamiltonian> {
    build_number_operator_capped(lattice, DEFAULT_DIM_CAP)
}

pub fn build_number_operator_capped(lattice: &Lattice, cap: usize) -> Result<Hamiltonian> {
    let dim = check_cap(lattice, cap)?;
    let diag: Vec<f64> = (0..dim).map(|x| x.count_ones() as f64).collect();
    Hamiltonian::from_diagonal(&diag)
}

/// Affine map a*H + b*I that placed the spectrum into a band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandMap {
    pub scale: f64,
    pub offset: f64,
    /// Set when E_min == E_max and only a shift was applied.
    pub degenerate: bool,
}

impl BandMap {
    pub fn to_original(&self, energy: f64) -> f64 {
        (energy - self.offset) / self.scale
    }

    pub fn to_band(&self, energy: f64) -> f64 {
        self.scale * energy + self.offset
    }
}

pub fn normalize_to_band(h: &Hamiltonian, lo: f64, hi: f64) -> Result<(Hamiltonian, BandMap)> {
    if !(hi > lo) {
        return Err(Error::invalid(format!("band requires hi > lo, got [{lo}, {hi}]")));
    }
    let eig = h.eigen()?;
    let e_min = eig.values[0];
    let e_max = *eig.values.last().expect("non-empty spectrum");
    let spread = e_max - e_min;
    let map = if spread <= 1e-12 * e_max.abs().max(e_min.abs()).max(1.0) {
        BandMap { scale: 1.0, offset: lo - e_min, degenerate: true }
    } else {
        let scale = (hi - lo) / spread;
        BandMap { scale, offset: lo - scale * e_min, degenerate: false }
    };
    let dim = h.dim();
    let matrix = CMat::from_fn(dim, dim, |i, j| {
        let v = h.matrix[(i, j)] * map.scale;
        if i == j {
            v + map.offset
        } else {
            v
        }
    });
    let mut values: Vec<f64> = eig.values.iter().map(|&e| map.to_band(e)).collect();
    if !map.degenerate {
        values[0] = lo;
        *values.last_mut().unwrap() = hi;
    }
    let out = Hamiltonian { matrix, eig: Some(Eigen { values, vectors: eig.vectors.clone() }) };
    Ok((out, map))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn single_site_spinful() {
        let h = build_fermi_hubbard(&Lattice::new(1, 1, true).unwrap(), &FermiHubbardParams::default()).unwrap();
        assert_close(h.eigenvalues().unwrap(), &[0.0, 0.0, 0.0, 4.0], 1e-12);
        // |11> is index 3 and carries U
        assert_eq!(h.matrix()[(3, 3)], C64::new(4.0, 0.0));
    }

    #[test]
    fn two_site_spinless() {
        let h = build_fermi_hubbard(&Lattice::new(1, 2, false).unwrap(), &FermiHubbardParams::default()).unwrap();
        assert_close(h.eigenvalues().unwrap(), &[-1.0, 0.0, 0.0, 1.0], 1e-12);
    }

    #[test]
    fn jordan_wigner_sign_across_occupied_mode() {
        // three spinless sites in a line: hopping 0 <-> 1 past nothing, but
        // a 2x2 grid has edge (0,2) which crosses mode 1
        let l = Lattice::new(2, 2, false).unwrap();
        let h = build_fermi_hubbard(&l, &FermiHubbardParams::default()).unwrap();
        // |1 1 0 0> -> a_2^dag a_0 -> |0 1 1 0>, one occupied mode (1) in between
        let from = 0b1100;
        let to = 0b0110;
        assert_eq!(h.matrix()[(to, from)], C64::new(1.0, 0.0));
        // without the intervening particle the sign is the bare -tau
        assert_eq!(h.matrix()[(0b0010, 0b1000)], C64::new(-1.0, 0.0));
    }

    #[test]
    fn number_operator_is_hamming_weight() {
        let one = Lattice::new(1, 1, false).unwrap();
        assert_eq!(build_number_operator(&one).unwrap().diagonal(), vec![0.0, 1.0]);
        let two = Lattice::new(1, 2, false).unwrap();
        let n = build_number_operator(&two).unwrap();
        assert_eq!(n.diagonal(), vec![0.0, 1.0, 1.0, 2.0]);
        assert_eq!(n.eigenvalues().unwrap(), &[0.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn fermi_hubbard_conserves_number() {
        let l = Lattice::new(2, 2, true).unwrap();
        let h = build_fermi_hubbard(&l, &FermiHubbardParams::default()).unwrap();
        let n = build_number_operator(&l).unwrap();
        assert!(h.commutator_max(&n).unwrap() < 1e-12);
    }

    #[test]
    fn eigensystem_residuals() {
        let l = Lattice::new(1, 3, true).unwrap();
        let h = build_fermi_hubbard(&l, &FermiHubbardParams::default()).unwrap();
        let e = h.eigen().unwrap();
        let scale = linalg::max_abs(h.matrix());
        assert!(linalg::hermiticity_defect(h.matrix()) <= 1e-12 * scale);
        for i in 0..h.dim() {
            let v = linalg::column(&e.vectors, i);
            let hv = linalg::matvec(h.matrix(), &v);
            let r: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * e.values[i]).norm_sqr()).sum::<f64>().sqrt();
            assert!(r <= 1e-9 * scale, "residual {r}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let l = Lattice::new(1, 7, true).unwrap();
        match build_fermi_hubbard(&l, &FermiHubbardParams::default()) {
            Err(Error::DeskScaleExceeded { required, cap }) => {
                assert_eq!(required, 1 << 14);
                assert_eq!(cap, DEFAULT_DIM_CAP);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn band_endpoints() {
        let z = Hamiltonian::from_diagonal(&[1.0, -1.0]).unwrap();
        let (scaled, map) = normalize_to_band(&z, 0.0, std::f64::consts::PI).unwrap();
        assert_close(&sorted(scaled.diagonal()), &[0.0, std::f64::consts::PI], 1e-15);
        assert!(!map.degenerate);
        assert!((map.to_original(std::f64::consts::PI) - 1.0).abs() < 1e-15);

        let id = Hamiltonian::from_diagonal(&[1.0, 1.0]).unwrap();
        let (shifted, map) = normalize_to_band(&id, 0.0, std::f64::consts::PI).unwrap();
        assert!(map.degenerate);
        assert_eq!(map.scale, 1.0);
        assert_eq!(shifted.diagonal(), vec![0.0, 0.0]);
    }

    #[test]
    fn band_on_fermi_hubbard_survives_rediagonalization() {
        let l = Lattice::new(2, 2, true).unwrap();
        let h = build_fermi_hubbard(&l, &FermiHubbardParams::default()).unwrap();
        let (scaled, _) = normalize_to_band(&h, 0.0, std::f64::consts::PI).unwrap();
        let fresh = linalg::hermitian_eigenvalues(scaled.matrix()).unwrap();
        assert!(fresh[0].abs() < 1e-10);
        assert!((fresh.last().unwrap() - std::f64::consts::PI).abs() < 1e-10);
    }
}
