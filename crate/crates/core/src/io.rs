//! JSON file formats.
//!
//! Matrices are row-major nested lists of `[re, im]` pairs. Everything is
//! written through [`to_canonical_string`]: compact output, struct field
//! order as declared, and every float with 17 significant digits, so that
//! serialize → parse → serialize is byte-identical.

use std::io;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde_json::ser::Formatter;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::GeneratorSet;
use crate::completion::{CompletedBasis, CompletionConfig, ConjugationWord, ExtendedElement};
use crate::error::{Error, Result};
use crate::matrix::{mat_distance, AlgebraElement, GroupElement, GroupKind, Matrix, Structure, Tolerances};
use crate::net::CoverNet;
use crate::word::{replay, GeneratorWord, Letter};

/// serde adapter for [`Matrix`] as nested `[re, im]` rows.
pub mod matrix_json {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Matrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(serde::de::Error::custom)
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> std::result::Result<Matrix, String> {
        let n = rows.len();
        if n == 0 {
            return Err("matrix has no rows".into());
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(format!("row {i} has {} entries, expected {n} (matrices must be square)", r.len()));
            }
        }
        Ok(Matrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
    }
}

/// serde adapter for a list of matrices.
pub mod matrix_list_json {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Wrapped(#[serde(with = "matrix_json")] Matrix);

    pub fn serialize<S: Serializer>(ms: &[Matrix], s: S) -> std::result::Result<S::Ok, S::Error> {
        let w: Vec<Wrapped> = ms.iter().cloned().map(Wrapped).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Matrix>, D::Error> {
        Ok(Vec::<Wrapped>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

fn has_non_finite(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Null => true,
        serde_json::Value::Array(a) => a.iter().any(has_non_finite),
        serde_json::Value::Object(o) => o.values().any(has_non_finite),
        _ => false,
    }
}

/// Canonical compact JSON with 17-significant-digit floats.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Parse {
        context: "serialize".into(),
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Like [`to_canonical_string`] but refuses `null`s, which is what
/// non-finite floats become.
pub fn to_canonical_checked<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse {
        context: "serialize".into(),
        message: e.to_string(),
    })?;
    if has_non_finite(&v) {
        return Err(Error::NonFinite);
    }
    to_canonical_string(value)
}

pub fn parse_str<T: DeserializeOwned>(text: &str, context: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        context: context.to_string(),
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    parse_str(&text, &path.display().to_string())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = to_canonical_checked(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

/// Generators of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub dim: usize,
    pub structure: Structure,
    #[serde(with = "matrix_list_json")]
    pub generators: Vec<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_algebra_dim: Option<usize>,
}

impl ProblemFile {
    pub fn from_generators(gens: &GeneratorSet, expected_algebra_dim: Option<usize>) -> Self {
        ProblemFile {
            dim: gens.dim(),
            structure: gens.structure(),
            generators: gens.elements().iter().map(|e| e.mat().clone()).collect(),
            labels: Some(gens.labels().to_vec()),
            expected_algebra_dim,
        }
    }

    /// Validates every generator and assembles the generator set.
    pub fn to_generators(&self, tol: &Tolerances) -> Result<GeneratorSet> {
        let mut elements = Vec::with_capacity(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            let ctx = format!("generators[{i}]");
            if g.nrows() != self.dim {
                return Err(Error::Parse {
                    context: ctx,
                    message: format!("expected {0}x{0}, found {1}x{1}", self.dim, g.nrows()),
                });
            }
            let el = AlgebraElement::with_tol(g.clone(), self.structure, tol.struct_tol).map_err(|e| Error::Parse {
                context: ctx,
                message: e.to_string(),
            })?;
            elements.push(el);
        }
        if elements.is_empty() {
            return Err(Error::Parse {
                context: "generators".into(),
                message: "at least one generator is required".into(),
            });
        }
        GeneratorSet::with_tol(elements, self.labels.clone().unwrap_or_default(), tol.rank_tol)
    }
}

/// One target matrix or a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetFile {
    Single {
        #[serde(with = "matrix_json")]
        matrix: Matrix,
    },
    Batch {
        #[serde(with = "matrix_list_json")]
        matrices: Vec<Matrix>,
    },
}

impl TargetFile {
    pub fn matrices(&self) -> Vec<Matrix> {
        match self {
            TargetFile::Single { matrix } => vec![matrix.clone()],
            TargetFile::Batch { matrices } => matrices.clone(),
        }
    }

    pub fn to_elements(&self, group: GroupKind, tol: &Tolerances) -> Result<Vec<GroupElement>> {
        self.matrices()
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                GroupElement::with_tol(m, group, tol.group_tol).map_err(|e| Error::Parse {
                    context: format!("target[{i}]"),
                    message: e.to_string(),
                })
            })
            .collect()
    }
}

/// A word together with the replay error it claims against its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordFile {
    pub word: GeneratorWord,
    pub stated_error: f64,
    pub nonnegative: bool,
}

/// Completed basis cache.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub problem: ProblemFile,
    pub config: CompletionConfig,
    pub extended: Vec<ExtendedEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedEntry {
    #[serde(with = "matrix_json")]
    pub element: Matrix,
    pub factors: Vec<Letter>,
    /// One-based generator index being conjugated.
    pub core: usize,
    /// One-based basis indices.
    pub conjugator: usize,
    pub conjugated: usize,
    pub time: f64,
    pub score: f64,
}

impl BasisFile {
    pub fn from_basis(basis: &CompletedBasis, config: &CompletionConfig) -> Self {
        BasisFile {
            problem: ProblemFile::from_generators(basis.generators(), Some(basis.n())),
            config: config.clone(),
            extended: basis
                .extended()
                .iter()
                .map(|e| ExtendedEntry {
                    element: e.element.mat().clone(),
                    factors: e.word.factors.clone(),
                    core: e.word.core + 1,
                    conjugator: e.conjugator + 1,
                    conjugated: e.conjugated + 1,
                    time: e.time,
                    score: e.score,
                })
                .collect(),
        }
    }

    /// Rebuilds the basis, re-checking independence and word reproduction.
    pub fn to_basis(&self, tol: &Tolerances) -> Result<CompletedBasis> {
        let gens = self.problem.to_generators(tol)?;
        let structure = gens.structure();
        let mut extended = Vec::with_capacity(self.extended.len());
        for (i, e) in self.extended.iter().enumerate() {
            if e.core == 0 || e.conjugator == 0 || e.conjugated == 0 {
                return Err(Error::Parse {
                    context: format!("extended[{i}]"),
                    message: "indices are one-based".into(),
                });
            }
            extended.push(ExtendedElement {
                element: AlgebraElement::with_tol(e.element.clone(), structure, tol.struct_tol)?,
                word: ConjugationWord {
                    factors: e.factors.clone(),
                    core: e.core - 1,
                },
                conjugator: e.conjugator - 1,
                conjugated: e.conjugated - 1,
                time: e.time,
                score: e.score,
            });
        }
        CompletedBasis::from_parts(gens, extended, 1e-9)
    }
}

/// Net cache: the generators it was built for plus the net itself (which
/// carries its seed and configuration).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetFile {
    #[serde(with = "matrix_list_json")]
    pub generators: Vec<Matrix>,
    pub net: CoverNet,
}

impl NetFile {
    pub fn new(gens: &GeneratorSet, net: CoverNet) -> Self {
        NetFile {
            generators: gens.elements().iter().map(|e| e.mat().clone()).collect(),
            net,
        }
    }

    /// Checks that the cache belongs to `gens` and that every point's word
    /// replays to its element within `tol`.
    pub fn into_net(self, gens: &GeneratorSet, tol: f64) -> Result<CoverNet> {
        let same = self.generators.len() == gens.len()
            && self
                .generators
                .iter()
                .zip(gens.elements())
                .all(|(a, b)| mat_distance(a, b.mat()) == 0.0);
        if !same {
            return Err(Error::Parse {
                context: "net cache".into(),
                message: "cache was built for different generators".into(),
            });
        }
        for (i, p) in self.net.points.iter().enumerate() {
            let k = replay(&p.word.letters, gens)?;
            if mat_distance(k.mat(), &p.element) > tol {
                return Err(Error::Parse {
                    context: format!("net.points[{i}]"),
                    message: "word does not replay to its element".into(),
                });
            }
        }
        Ok(self.net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demos::su2_pauli_pair;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(to_canonical_string(&0.1f64).unwrap(), "1.0000000000000001e-1");
        assert_eq!(to_canonical_string(&[1.0f64, -2.5]).unwrap(), "[1.0000000000000000e0,-2.5000000000000000e0]");
        let back: f64 = parse_str("1.0000000000000001e-1", "t").unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn non_finite_refused() {
        assert!(matches!(to_canonical_checked(&[f64::NAN]), Err(Error::NonFinite)));
    }

    #[test]
    fn problem_round_trip() {
        let p = ProblemFile::from_generators(&su2_pauli_pair(), Some(3));
        let s = to_canonical_string(&p).unwrap();
        let q: ProblemFile = parse_str(&s, "p").unwrap();
        assert_eq!(p, q);
        assert_eq!(s, to_canonical_string(&q).unwrap());
        let g = q.to_generators(&Tolerances::default()).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn problem_errors_name_the_field() {
        let bad = r#"{"dim":2,"structure":"skew_hermitian","generators":[[[[0,0],[1,0]],[[-1,0],[0,0]]],[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#;
        let p: ProblemFile = parse_str(bad, "p").unwrap();
        match p.to_generators(&Tolerances::default()) {
            Err(Error::Parse { context, .. }) => assert_eq!(context, "generators[1]"),
            other => panic!("{other:?}"),
        }
        let err = parse_str::<ProblemFile>("{\"dim\": 2,\n \"structure\": 7}", "p").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn target_file_shapes() {
        let single: TargetFile = parse_str(r#"{"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#, "t").unwrap();
        assert_eq!(single.matrices().len(), 1);
        let batch: TargetFile = parse_str(r#"{"matrices":[[[[1,0]]],[[[0,1]]]]}"#, "t").unwrap();
        assert_eq!(batch.matrices().len(), 2);
        assert!(parse_str::<TargetFile>(r#"{"matrix":[[[1,0],[0,0]]]}"#, "t").is_err());
    }
}
