//! Generator words: finite products of one-parameter exponentials.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::GeneratorSet;
use crate::error::{Error, Result};
use crate::matrix::{GroupElement, GroupKind, Matrix};

/// One factor `exp(time · X_generator)`. `generator` is a zero-based index
/// into the generator set; JSON files carry it one-based as `[index, time]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Letter {
    pub generator: usize,
    pub time: f64,
}

impl Letter {
    pub fn new(generator: usize, time: f64) -> Self {
        Letter { generator, time }
    }

    pub fn inverse(self) -> Self {
        Letter::new(self.generator, -self.time)
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.generator + 1, self.time).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (index, time) = <(usize, f64)>::deserialize(d)?;
        if index == 0 {
            return Err(serde::de::Error::custom("generator indices are one-based"));
        }
        Ok(Letter::new(index - 1, time))
    }
}

/// Inverse of a word: reversed order, negated times.
pub fn inverse_letters(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordMeta {
    pub length: usize,
    /// Length bound the producing construction guarantees.
    pub bound_used: u64,
    /// Frobenius distance between the replayed word and what it stands for.
    pub product_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorWord {
    pub letters: Vec<Letter>,
    pub meta: WordMeta,
}

impl GeneratorWord {
    pub fn new(letters: Vec<Letter>, bound_used: u64, product_error: f64) -> Self {
        let length = letters.len();
        GeneratorWord {
            letters,
            meta: WordMeta {
                length,
                bound_used,
                product_error,
            },
        }
    }

    pub fn empty() -> Self {
        GeneratorWord::new(Vec::new(), 0, 0.0)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn min_time(&self) -> Option<f64> {
        self.letters.iter().map(|l| l.time).reduce(f64::min)
    }
}

/// Group generated by the set: special when every generator is traceless.
pub fn group_of(gens: &GeneratorSet) -> GroupKind {
    let kinds = gens.elements().iter().map(|e| e.group_kind());
    let mut out = GroupKind::SpecialUnitary;
    for k in kinds {
        out = match (out, k) {
            (_, GroupKind::GeneralLinearComponent) => return GroupKind::GeneralLinearComponent,
            (_, GroupKind::SpecialOrthogonal) => GroupKind::SpecialOrthogonal,
            (GroupKind::SpecialOrthogonal, _) => GroupKind::SpecialOrthogonal,
            (_, GroupKind::Unitary) => GroupKind::Unitary,
            (o, _) => o,
        };
    }
    out
}

/// Ordered product `Π exp(time · X_index)`, left to right.
pub fn replay(letters: &[Letter], gens: &GeneratorSet) -> Result<GroupElement> {
    let n = gens.dim();
    let mut acc = Matrix::identity(n, n);
    for l in letters {
        let x = gens.get(l.generator)?;
        if !l.time.is_finite() {
            return Err(Error::NonFinite);
        }
        acc = acc * x.exp(l.time)?.mat();
    }
    Ok(GroupElement::from_parts(acc, group_of(gens)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demos::{su2_pauli_pair, so3_rotations};
    use crate::matrix::mat_distance;

    #[test]
    fn empty_word_is_identity() {
        let g = su2_pauli_pair();
        let k = replay(&[], &g).unwrap();
        assert_eq!(k.mat(), &Matrix::identity(2, 2));
        assert_eq!(k.group(), GroupKind::SpecialUnitary);
    }

    #[test]
    fn same_subgroup_letters_merge() {
        let g = su2_pauli_pair();
        let k = replay(&[Letter::new(0, 0.4), Letter::new(0, -1.1)], &g).unwrap();
        let direct = g.elements()[0].exp(-0.7).unwrap();
        assert!(mat_distance(k.mat(), direct.mat()) < 1e-14);
    }

    #[test]
    fn word_times_inverse_is_identity() {
        let g = so3_rotations();
        let w = vec![Letter::new(0, 0.3), Letter::new(1, -2.0), Letter::new(0, 1.25)];
        let mut both = w.clone();
        both.extend(inverse_letters(&w));
        let k = replay(&both, &g).unwrap();
        assert!(mat_distance(k.mat(), &Matrix::identity(3, 3)) < 1e-14);
        assert_eq!(k.group(), GroupKind::SpecialOrthogonal);
    }

    #[test]
    fn bad_index() {
        let g = su2_pauli_pair();
        assert!(matches!(
            replay(&[Letter::new(2, 0.1)], &g),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn letter_json_is_one_based() {
        let s = serde_json::to_string(&Letter::new(0, 0.5)).unwrap();
        assert_eq!(s, "[1,0.5]");
        let l: Letter = serde_json::from_str("[2,-1.5]").unwrap();
        assert_eq!(l, Letter::new(1, -1.5));
        assert!(serde_json::from_str::<Letter>("[0,1.0]").is_err());
    }
}
