use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Computational-basis label; character 0 is qubit 0, the most significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn from_index(index: usize, n_qubits: usize) -> Self {
        Self((0..n_qubits).map(|q| (index >> (n_qubits - 1 - q)) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        BitString(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("bad bit '{other}' in \"{s}\""))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            return Err(Error::invalid("empty bitstring"));
        }
        Ok(Self(bits))
    }
}

impl TryFrom<String> for BitString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
}

impl QuantumState {
    /// Normalizes the given amplitudes; rejects the zero vector and non-power-of-two lengths.
    pub fn from_amplitudes(mut amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() || !amplitudes.len().is_power_of_two() {
            return Err(Error::ShapeMismatch(format!("state length {} is not a power of two", amplitudes.len())));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { amplitudes })
    }

    pub fn basis(bits: &BitString) -> Self {
        let n = bits.len();
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n];
        amplitudes[bits.index()] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Normalized sum of weighted states.
    pub fn superposition(terms: &[(C64, QuantumState)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::ZeroVector)?;
        let dim = first.1.dim();
        let mut acc = vec![C64::new(0.0, 0.0); dim];
        for (c, s) in terms {
            if s.dim() != dim {
                return Err(Error::ShapeMismatch("superposition of states with different sizes".into()));
            }
            for (a, b) in acc.iter_mut().zip(&s.amplitudes) {
                *a += c * b;
            }
        }
        Self::from_amplitudes(acc)
    }

    /// Equal-weight superposition of all 2^n basis states.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = C64::new((dim as f64).sqrt().recip(), 0.0);
        Self { amplitudes: vec![a; dim] }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.amplitudes)
    }

    /// <self|other>
    pub fn overlap(&self, other: &QuantumState) -> C64 {
        crate::linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    /// Nonzero amplitudes with their basis indices.
    pub fn support(&self) -> impl Iterator<Item = (usize, C64)> + '_ {
        self.amplitudes.iter().copied().enumerate().filter(|(_, a)| *a != C64::new(0.0, 0.0))
    }

    pub fn debug_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim(),
            "amplitudes": self.amplitudes.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
        })
    }
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - current.len() {
                break;
            }
            current.push(items[i]);
            rec(items, k, i + 1, current, out);
            current.pop();
        }
    }
    rec(items, k, 0, &mut current, &mut out);
    out
}

/// Every string reachable from `target` by flipping `flips_per_state`
/// disjoint (occupied, empty) qubit pairs, in a seeded random order.
pub fn all_secondary_bitstrings(target: &BitString, flips_per_state: usize, seed: u64) -> Result<Vec<BitString>> {
    if flips_per_state == 0 {
        return Err(Error::invalid("flips_per_state must be positive"));
    }
    let ones: Vec<usize> = (0..target.len()).filter(|&q| target.bits()[q]).collect();
    let zeros: Vec<usize> = (0..target.len()).filter(|&q| !target.bits()[q]).collect();
    if ones.len() < flips_per_state || zeros.len() < flips_per_state {
        return Ok(Vec::new());
    }
    let drop_sets = combinations(&ones, flips_per_state);
    let add_sets = combinations(&zeros, flips_per_state);
    let mut pairs: Vec<(usize, usize)> =
        (0..drop_sets.len()).flat_map(|a| (0..add_sets.len()).map(move |b| (a, b))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs.shuffle(&mut rng);
    Ok(pairs
        .into_iter()
        .map(|(a, b)| {
            let mut bits = target.bits().to_vec();
            for &q in drop_sets[a].iter().chain(&add_sets[b]) {
                bits[q] = !bits[q];
            }
            BitString::new(bits)
        })
        .collect())
}

/// The first `r_count` strings of [`all_secondary_bitstrings`]: weight
/// preserving, distinct, uniformly chosen under the seed.
pub fn secondary_bitstrings(target: &BitString, r_count: usize, flips_per_state: usize, seed: u64) -> Result<Vec<BitString>> {
    let mut all = all_secondary_bitstrings(target, flips_per_state, seed)?;
    if r_count > all.len() {
        return Err(Error::NotEnoughStates { requested: r_count, possible: all.len() });
    }
    all.truncate(r_count);
    Ok(all)
}

/// [`secondary_bitstrings`] lifted to basis states.
pub fn make_secondary_states(target: &BitString, r_count: usize, flips_per_state: usize, seed: u64) -> Result<Vec<QuantumState>> {
    Ok(secondary_bitstrings(target, r_count, flips_per_state, seed)?.iter().map(QuantumState::basis).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn basis_index_is_big_endian() {
        let s = QuantumState::basis(&bs("0101"));
        assert_eq!(s.amplitudes()[5], C64::new(1.0, 0.0));
        assert_eq!(s.support().count(), 1);
        assert_eq!(BitString::from_index(5, 4), bs("0101"));
    }

    #[test]
    fn uniform_amplitudes() {
        let s = QuantumState::uniform(3);
        for a in s.amplitudes() {
            assert!((a.re - 8f64.powf(-0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn three_term_superposition() {
        let terms: Vec<_> = ["010101010010101010", "101010101101010101", "011001100011001100"]
            .iter()
            .map(|b| (C64::new(1.0, 0.0), QuantumState::basis(&bs(b))))
            .collect();
        let s = QuantumState::superposition(&terms).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        let nz: Vec<_> = s.support().collect();
        assert_eq!(nz.len(), 3);
        for (_, a) in nz {
            assert!((a.re - 3f64.sqrt().recip()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_superposition_is_rejected() {
        let a = QuantumState::basis(&bs("01"));
        let err = QuantumState::superposition(&[(C64::new(1.0, 0.0), a.clone()), (C64::new(-1.0, 0.0), a)]);
        assert!(matches!(err, Err(Error::ZeroVector)));
    }

    #[test]
    fn secondary_two_qubit() {
        let out = secondary_bitstrings(&bs("01"), 1, 1, 0).unwrap();
        assert_eq!(out, vec![bs("10")]);
        assert!(matches!(secondary_bitstrings(&bs("01"), 2, 1, 0), Err(Error::NotEnoughStates { requested: 2, possible: 1 })));
    }

    #[test]
    fn secondary_half_filled_ten() {
        let target = bs("1010101010");
        let a = secondary_bitstrings(&target, 10, 2, 7).unwrap();
        let b = secondary_bitstrings(&target, 10, 2, 7).unwrap();
        assert_eq!(a, b);
        let distinct: HashSet<_> = a.iter().collect();
        assert_eq!(distinct.len(), 10);
        assert!(!distinct.contains(&target));
        for s in &a {
            assert_eq!(s.weight(), 5);
            let diff = s.bits().iter().zip(target.bits()).filter(|(x, y)| x != y).count();
            assert_eq!(diff, 4);
        }
    }

    #[test]
    fn bitstring_serde_round_trip() {
        let b = bs("0110");
        let j = serde_json::to_string(&b).unwrap();
        assert_eq!(j, "\"0110\"");
        assert_eq!(serde_json::from_str::<BitString>(&j).unwrap(), b);
    }
}
