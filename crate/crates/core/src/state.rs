use num_complex::Complex64;

use crate::error::{Error, Result};

/// Normalization slack accepted at construction.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Normalized vector of complex amplitudes over some basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wrap amplitudes that must already be normalized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid("state", format!("norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::invalid("state", "cannot normalize a zero vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(Self { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalized(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: index + 1 });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Unchecked constructor for propagator output; norm is monitored by tests.
    pub(crate) fn from_evolved(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amplitudes.iter().map(|a| a.norm_sqr())
    }

    /// `Σ_k |c_k|² w_k` for a diagonal observable with weights `w`.
    pub fn diagonal_expectation(&self, weights: &[f64]) -> f64 {
        debug_assert_eq!(weights.len(), self.dim());
        self.amplitudes.iter().zip(weights).map(|(a, w)| a.norm_sqr() * w).sum()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Indices carrying nonzero amplitude.
    pub fn support(&self) -> Vec<usize> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter_map(|(i, a)| (a.norm_sqr() > 0.0).then_some(i))
            .collect()
    }

    /// Amplitudes at `indices`, in order. Normalization is preserved only if
    /// the support lies inside `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        Self::new(indices.iter().map(|&i| self.amplitudes[i]).collect())
    }

    /// Embed a restricted state back into a space of dimension `dim`.
    pub fn embed(&self, indices: &[usize], dim: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for (&i, &a) in indices.iter().zip(&self.amplitudes) {
            amplitudes[i] = a;
        }
        Self { amplitudes }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn norm(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(StateVector::new(v.clone()).is_err());
        let s = StateVector::normalized(v).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!(StateVector::normalized(vec![Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn restrict_embed_round_trip() {
        let s = StateVector::from_real(&[0.0, 3.0, 0.0, 4.0]).unwrap();
        assert_eq!(s.support(), vec![1, 3]);
        let r = s.restrict(&[1, 3]).unwrap();
        assert_eq!(r.embed(&[1, 3], 4), s);
        assert!(s.restrict(&[1]).is_err());
    }
}
