//! Sign vectors: the combinatorial identity of a zonotope vertex.
//!
//! A sign vector is an element of `{-1,+1}^m` recording which endpoint of each
//! generator segment a vertex uses. A pair `{k, -k}` shares one *canonical*
//! representative, the one whose first entry is `+1`; all deduplication in the
//! crate is keyed on canonical sign vectors so vertex identity never depends
//! on floating-point coordinates.

use std::fmt;

use thiserror::Error;

/// Records whether canonicalization negated the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Kept,
    Negated,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignVectorError {
    #[error("sign vector must be nonempty")]
    Empty,
    #[error("entry {0} is not -1 or +1")]
    BadEntry(usize),
}

/// An element of `{-1,+1}^m`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(Box<[i8]>);

impl SignVector {
    pub fn from_signs(signs: impl Into<Vec<i8>>) -> Result<Self, SignVectorError> {
        let signs = signs.into();
        if signs.is_empty() {
            return Err(SignVectorError::Empty);
        }
        if let Some(i) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(SignVectorError::BadEntry(i));
        }
        Ok(SignVector(signs.into_boxed_slice()))
    }

    /// Build from raw inner products, mapping strictly positive values to `+1`
    /// and strictly negative ones to `-1`. The caller is responsible for
    /// rejecting zeros beforehand.
    pub(crate) fn from_products(products: &[f64]) -> Self {
        SignVector(
            products
                .iter()
                .map(|&p| if p > 0.0 { 1i8 } else { -1i8 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> SignVector {
        SignVector(self.0.iter().map(|&s| -s).collect())
    }

    /// A sign vector is canonical iff its first entry is `+1`.
    pub fn is_canonical(&self) -> bool {
        self.0[0] == 1
    }

    /// The canonical representative of `{k, -k}` plus whether negation occurred.
    pub fn canonicalize(&self) -> (SignVector, Parity) {
        if self.is_canonical() {
            (self.clone(), Parity::Kept)
        } else {
            (self.negated(), Parity::Negated)
        }
    }

    /// Copy with the sign at `index` flipped.
    pub fn flipped(&self, index: usize) -> SignVector {
        let mut signs = self.0.to_vec();
        signs[index] = -signs[index];
        SignVector(signs.into_boxed_slice())
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in self.0.iter() {
            f.write_str(if s == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignVector({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(signs: &[i8]) -> SignVector {
        SignVector::from_signs(signs.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_entries() {
        assert_eq!(
            SignVector::from_signs(vec![1, 0, -1]),
            Err(SignVectorError::BadEntry(1))
        );
        assert_eq!(SignVector::from_signs(vec![]), Err(SignVectorError::Empty));
    }

    #[test]
    fn canonicalize_examples() {
        let (c, p) = sv(&[1, -1, 1]).canonicalize();
        assert_eq!(c, sv(&[1, -1, 1]));
        assert_eq!(p, Parity::Kept);

        let (c, p) = sv(&[-1, -1, 1]).canonicalize();
        assert_eq!(c, sv(&[1, 1, -1]));
        assert_eq!(p, Parity::Negated);
    }

    #[test]
    fn canonicalize_idempotent() {
        for signs in [[-1, 1, 1], [1, 1, -1], [-1, -1, -1]] {
            let once = sv(&signs).canonicalize().0;
            let twice = once.canonicalize().0;
            assert_eq!(once, twice);
            assert!(once.is_canonical());
        }
    }

    #[test]
    fn flip_and_negate() {
        let k = sv(&[1, -1]);
        assert_eq!(k.flipped(1), sv(&[1, 1]));
        assert_eq!(k.negated(), sv(&[-1, 1]));
        assert_eq!(k.negated().negated(), k);
    }
}
