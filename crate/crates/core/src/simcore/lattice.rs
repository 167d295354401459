use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

/// Rectangular grid of sites, optionally carrying two spin species per site.
/// Boundaries are open unless `periodic` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub rows: usize,
    pub cols: usize,
    pub spinful: bool,
    #[serde(default)]
    pub periodic: bool,
}

impl Lattice {
    pub fn new(rows: usize, cols: usize, spinful: bool) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!("lattice must be non-empty, got {rows}x{cols}")));
        }
        Ok(Self { rows, cols, spinful, periodic: false })
    }

    /// Wraps both directions into rings; a direction of length <= 2 gains no
    /// extra bond.
    pub fn with_periodic(self, periodic: bool) -> Self {
        Self { periodic, ..self }
    }

    pub fn sites(&self) -> usize {
        self.rows * self.cols
    }

    /// Number of fermionic modes, which is also the qubit count.
    pub fn modes(&self) -> usize {
        self.sites() * if self.spinful { 2 } else { 1 }
    }

    /// 2^modes, or `None` if it does not fit in a `u128`.
    pub fn hilbert_dim(&self) -> Option<u128> {
        (self.modes() < 128).then(|| 1u128 << self.modes())
    }

    /// Row-major site index.
    pub fn site(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    /// Mode index: the spin-up block comes first, then spin-down.
    pub fn mode(&self, site: usize, spin: Spin) -> usize {
        match spin {
            Spin::Up => site,
            Spin::Down => {
                debug_assert!(self.spinful);
                self.sites() + site
            }
        }
    }

    /// Nearest-neighbour site pairs (a < b), row-major.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let here = self.site(r, c);
                if c + 1 < self.cols {
                    out.push((here, self.site(r, c + 1)));
                }
                if r + 1 < self.rows {
                    out.push((here, self.site(r + 1, c)));
                }
            }
        }
        if self.periodic {
            if self.cols > 2 {
                out.extend((0..self.rows).map(|r| (self.site(r, 0), self.site(r, self.cols - 1))));
            }
            if self.rows > 2 {
                out.extend((0..self.cols).map(|c| (self.site(0, c), self.site(self.rows - 1, c))));
            }
            out.sort_unstable();
        }
        out
    }

    pub fn spins(&self) -> &'static [Spin] {
        if self.spinful {
            &[Spin::Up, Spin::Down]
        } else {
            &[Spin::Up]
        }
    }
}

/// Hopping strength and on-site repulsion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermiHubbardParams {
    pub tau: f64,
    pub u: f64,
}

impl Default for FermiHubbardParams {
    fn default() -> Self {
        Self { tau: 1.0, u: 4.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_edges() {
        let l = Lattice::new(2, 2, true).unwrap();
        assert_eq!(l.modes(), 8);
        assert_eq!(l.hilbert_dim(), Some(256));
        assert_eq!(l.edges(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(l.mode(3, Spin::Down), 7);

        let line = Lattice::new(1, 5, false).unwrap();
        assert_eq!(line.edges().len(), 4);
        assert!(Lattice::new(0, 3, false).is_err());
        assert_eq!(line.with_periodic(true).edges(), vec![(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(l.with_periodic(true).edges(), l.edges());
    }
}
