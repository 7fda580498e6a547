use serde::{Deserialize, Serialize};

use crate::error::{MuError, Result};

/// One tensor factor: a copy of `C^dim`, possibly its complex conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub dim: usize,
    pub conjugate: bool,
}

impl Factor {
    pub fn plain(dim: usize) -> Self {
        Factor { dim, conjugate: false }
    }

    /// The conjugate factor. Conjugating twice gives back `self`.
    pub fn conj(self) -> Self {
        Factor { dim: self.dim, conjugate: !self.conjugate }
    }
}

#[derive(Deserialize)]
struct RawSpace {
    factors: Vec<Factor>,
}

/// An ordered tensor product of finite-dimensional Hilbert spaces.
///
/// Every space carries the lexicographic product basis: the first factor is
/// the most significant digit of a flat index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct Space {
    factors: Vec<Factor>,
}

impl TryFrom<RawSpace> for Space {
    type Error = MuError;

    fn try_from(raw: RawSpace) -> Result<Self> {
        Space::new(raw.factors)
    }
}

impl Space {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(MuError::Shape("a space needs at least one factor".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.dim == 0) {
            return Err(MuError::Shape(format!("factor dimension must be >= 1, got {}", f.dim)));
        }
        Ok(Space { factors })
    }

    /// A single plain factor `C^d`.
    pub fn hilbert(d: usize) -> Self {
        Space::from_dims(&[d])
    }

    /// `(C^d)^{⊗n}`.
    pub fn power(d: usize, n: usize) -> Self {
        Space::from_dims(&vec![d; n])
    }

    /// Plain (non-conjugate) factors with the given dimensions.
    ///
    /// Panics on an empty list or a zero dimension.
    pub fn from_dims(dims: &[usize]) -> Self {
        Space::new(dims.iter().map(|&d| Factor::plain(d)).collect()).expect("invalid dimensions")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    /// Total dimension, the product of the factor dimensions.
    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn conj(&self) -> Self {
        Space { factors: self.factors.iter().map(|f| f.conj()).collect() }
    }

    pub fn tensor(&self, other: &Space) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Space { factors }
    }

    /// The sub-space formed by the given legs (0-based), in the given order.
    pub fn select(&self, legs: &[usize]) -> Result<Self> {
        let factors = legs
            .iter()
            .map(|&l| {
                self.factors
                    .get(l)
                    .copied()
                    .ok_or_else(|| MuError::Shape(format!("leg {l} out of range for {} factors", self.len())))
            })
            .collect::<Result<Vec<_>>>()?;
        Space::new(factors)
    }

    /// Same space with factor `leg` conjugated.
    pub fn conj_leg(&self, leg: usize) -> Self {
        let mut s = self.clone();
        s.factors[leg] = s.factors[leg].conj();
        s
    }

    /// Factors in reversed order (codomain of the flip on two factors).
    pub fn swapped(&self) -> Self {
        let mut factors = self.factors.clone();
        factors.reverse();
        Space { factors }
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|fac| if fac.conjugate { format!("conj(C^{})", fac.dim) } else { format!("C^{}", fac.dim) })
            .collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_is_product() {
        let s = Space::from_dims(&[2, 3, 4]);
        assert_eq!(s.dim(), 24);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn double_conjugation_is_identity() {
        let s = Space::new(vec![Factor::plain(2), Factor { dim: 3, conjugate: true }]).unwrap();
        assert_eq!(s.conj().conj(), s);
        assert_ne!(s.conj(), s);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(Space::new(vec![Factor::plain(0)]).is_err());
        assert!(Space::new(vec![]).is_err());
        assert!(serde_json::from_str::<Space>(r#"{"factors":[{"dim":0,"conjugate":false}]}"#).is_err());
    }

    #[test]
    fn select_and_swap() {
        let s = Space::from_dims(&[2, 3, 5]);
        assert_eq!(s.select(&[2, 0]).unwrap().dims(), vec![5, 2]);
        assert!(s.select(&[3]).is_err());
        assert_eq!(s.swapped().dims(), vec![5, 3, 2]);
    }
}
