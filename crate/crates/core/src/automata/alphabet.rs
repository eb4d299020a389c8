// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::numberfield::FieldElement;
use crate::substitution::AbelianVector;

/// One transition label. A digit is identified by its bound representations
/// (vector, scalar, tag, pair components); the display name is cosmetic.
#[derive(Clone, Debug)]
pub struct Digit {
    pub name: String,
    pub vector: Option<AbelianVector>,
    pub scalar: Option<FieldElement>,
    /// Extra discriminator, e.g. which substitution produced the digit.
    pub tag: Option<String>,
    pub pair: Option<Arc<(Digit, Digit)>>,
}

impl Digit {
    pub fn named(name: impl Into<String>) -> Digit {
        Digit {
            name: name.into(),
            vector: None,
            scalar: None,
            tag: None,
            pair: None,
        }
    }

    pub fn from_scalar(x: FieldElement) -> Digit {
        Digit {
            name: x.to_string(),
            vector: None,
            scalar: Some(x),
            tag: None,
            pair: None,
        }
    }

    pub fn from_vector(v: AbelianVector, scalar: Option<FieldElement>) -> Digit {
        Digit {
            name: v.to_string(),
            vector: Some(v),
            scalar,
            tag: None,
            pair: None,
        }
    }

    pub fn pair_of(a: &Digit, b: &Digit) -> Digit {
        Digit {
            name: format!("({},{})", a.name, b.name),
            vector: None,
            scalar: None,
            tag: None,
            pair: Some(Arc::new((a.clone(), b.clone()))),
        }
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Digit {
        let tag = tag.into();
        self.name = format!("({},{})", self.name, tag);
        self.tag = Some(tag);
        self
    }

    /// Whether the digit represents zero in every form it carries.
    pub fn is_zero(&self) -> bool {
        if let Some(p) = &self.pair {
            return p.0.is_zero() && p.1.is_zero();
        }
        if self.tag.is_some() {
            return false;
        }
        let v = self.vector.as_ref().map(|v| v.is_zero());
        let s = self.scalar.as_ref().map(|s| s.is_zero());
        match (v, s) {
            (None, None) => self.name == "0",
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a && b,
        }
    }

    /// Scalar value; for a pair digit, the difference of the component scalars.
    pub fn value(&self) -> Option<FieldElement> {
        if let Some(p) = &self.pair {
            let a = p.0.value()?;
            let b = p.1.value()?;
            return Some(&a - &b);
        }
        self.scalar.clone()
    }

    fn has_representation(&self) -> bool {
        self.vector.is_some() || self.scalar.is_some() || self.pair.is_some()
    }
}

impl PartialEq for Digit {
    fn eq(&self, other: &Self) -> bool {
        if !self.has_representation() && !other.has_representation() {
            return self.name == other.name && self.tag == other.tag;
        }
        self.vector == other.vector
            && self.scalar == other.scalar
            && self.tag == other.tag
            && self.pair == other.pair
    }
}

impl Eq for Digit {}

impl Hash for Digit {
    fn hash<H: Hasher>(&self, state: &mut H) {
        if !self.has_representation() {
            self.name.hash(state);
        }
        self.vector.hash(state);
        self.scalar.hash(state);
        self.tag.hash(state);
        if let Some(p) = &self.pair {
            p.0.hash(state);
            p.1.hash(state);
        }
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Ordered finite set of pairwise distinct digits.
#[derive(Clone, Debug)]
pub struct DigitAlphabet {
    digits: Vec<Digit>,
    index: FxHashMap<Digit, usize>,
    zero: Option<usize>,
}

impl PartialEq for DigitAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.digits == other.digits
    }
}

impl Eq for DigitAlphabet {}

impl DigitAlphabet {
    /// Builds an alphabet, dropping repeated digits (first occurrence wins).
    pub fn new(digits: impl IntoIterator<Item = Digit>) -> Arc<DigitAlphabet> {
        let mut out = Vec::new();
        let mut index = FxHashMap::default();
        for d in digits {
            if !index.contains_key(&d) {
                index.insert(d.clone(), out.len());
                out.push(d);
            }
        }
        let zero = out.iter().position(|d| d.is_zero());
        Arc::new(DigitAlphabet {
            digits: out,
            index,
            zero,
        })
    }

    /// Plain alphabet of named digits (used by tests and examples).
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Arc<DigitAlphabet> {
        DigitAlphabet::new(names.iter().map(|n| Digit::named(n.as_ref())))
    }

    /// Scalar digits in the given order.
    pub fn from_scalars(xs: impl IntoIterator<Item = FieldElement>) -> Arc<DigitAlphabet> {
        DigitAlphabet::new(xs.into_iter().map(Digit::from_scalar))
    }

    /// All pairs `(x, y)`, with pair `(i, j)` at index `i * |b| + j`.
    pub fn product(a: &DigitAlphabet, b: &DigitAlphabet) -> Arc<DigitAlphabet> {
        let mut v = Vec::with_capacity(a.len() * b.len());
        for x in &a.digits {
            for y in &b.digits {
                v.push(Digit::pair_of(x, y));
            }
        }
        DigitAlphabet::new(v)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn digit(&self, i: usize) -> &Digit {
        &self.digits[i]
    }

    pub fn index_of(&self, d: &Digit) -> Option<usize> {
        self.index.get(d).copied()
    }

    pub fn index_of_zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn zero(&self) -> Result<usize> {
        self.zero.ok_or(Error::NoZeroDigit)
    }

    pub fn index_by_name(&self, name: &str) -> Option<usize> {
        self.digits.iter().position(|d| d.name == name)
    }

    /// Scalars of all digits; errors naming the first digit without one.
    pub fn scalars(&self) -> Result<Vec<FieldElement>> {
        self.digits
            .iter()
            .map(|d| d.value().ok_or_else(|| Error::MissingScalar(d.name.clone())))
            .collect()
    }

    /// Position of each digit of `self` inside `other`.
    pub fn embedding_into(&self, other: &DigitAlphabet) -> Vec<Option<usize>> {
        self.digits.iter().map(|d| other.index_of(d)).collect()
    }

    /// Union keeping the order of `self` followed by the new digits of `other`.
    pub fn union(&self, other: &DigitAlphabet) -> Arc<DigitAlphabet> {
        DigitAlphabet::new(self.digits.iter().chain(other.digits.iter()).cloned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_and_zero() {
        let a = DigitAlphabet::from_names(&["1", "0", "1"]);
        assert_eq!(a.len(), 2);
        assert_eq!(a.index_of_zero(), Some(1));
        let p = DigitAlphabet::product(&a, &a);
        assert_eq!(p.len(), 4);
        assert_eq!(p.index_of_zero(), Some(3));
    }
}
