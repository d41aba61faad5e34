//! JSON file formats for frames, subspace families and certificates.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certificate::{scalars, Certificate};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{ArithmeticMode, Field, Rational, Tolerance};
use crate::scalar::Scalar;
use crate::subspace::SubspaceFamily;

/// `{"dim": N, "field": "exact"|"float", "vectors": [[...], ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    pub dim: usize,
    pub field: String,
    pub vectors: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisEntry {
    /// Spanning vectors of the subspace, each of length `dim`.
    pub basis: Vec<Vec<Scalar>>,
}

/// `{"dim": N, "field": ..., "subspaces": [{"basis": [[...], ...]}, ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceFile {
    pub dim: usize,
    pub field: String,
    pub subspaces: Vec<BasisEntry>,
}

/// A certificate as written by the command line tool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    #[serde(flatten)]
    pub certificate: Certificate,
    pub command: String,
    /// SHA-256 of the input bytes, hex encoded.
    pub inputs_digest: String,
    pub tool_version: String,
}

impl CertificateFile {
    pub fn new(certificate: Certificate, command: &str, input: &[u8]) -> Self {
        CertificateFile {
            certificate,
            command: command.to_string(),
            inputs_digest: digest(input),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A frame in whichever arithmetic its file (or an override) asks for.
#[derive(Clone, Debug)]
pub enum AnyFrame {
    Exact(Frame<Rational>),
    Float(Frame<f64>),
}

#[derive(Clone, Debug)]
pub enum AnyFamily {
    Exact(SubspaceFamily<Rational>),
    Float(SubspaceFamily<f64>),
}

pub fn parse_field(field: &str) -> Result<ArithmeticMode> {
    match field.to_ascii_lowercase().as_str() {
        "exact" => Ok(ArithmeticMode::Exact),
        "float" => Ok(ArithmeticMode::Float),
        "complex" => Err(Error::UnsupportedField(field.to_string())),
        _ => Err(Error::Format(format!(
            "field must be \"exact\" or \"float\", got {field:?}"
        ))),
    }
}

/// Converts a parsed scalar. A file declared exact must not carry
/// non-integer JSON numbers unless the caller forces exact arithmetic, in
/// which case floats convert to their exact dyadic value.
fn lift<T: Field>(s: &Scalar, strict: bool) -> Result<T> {
    if let Scalar::Float(v) = s {
        if !v.is_finite() {
            return Err(Error::Format(format!("non-finite entry {v}")));
        }
        if strict && T::MODE == ArithmeticMode::Exact {
            return Err(Error::Format(format!(
                "exact inputs need \"p/q\" strings or integers, got {v}"
            )));
        }
    }
    T::from_scalar(s).ok_or_else(|| Error::Format(format!("cannot represent {s}")))
}

fn lift_vectors<T: Field>(dim: usize, vs: &[Vec<Scalar>], strict: bool) -> Result<Vec<Vec<T>>> {
    vs.iter()
        .enumerate()
        .map(|(i, v)| {
            if v.len() != dim {
                return Err(Error::Format(format!(
                    "vector {i} has length {}, expected {dim}",
                    v.len()
                )));
            }
            v.iter().map(|s| lift(s, strict)).collect()
        })
        .collect()
}

fn parse_json<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

impl FrameFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn from_frame<T: Field>(f: &Frame<T>) -> Self {
        FrameFile {
            dim: f.dim(),
            field: T::MODE.to_string(),
            vectors: f.vectors().iter().map(|v| scalars(v)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("frames serialize")
    }

    fn build<T: Field>(&self, strict: bool) -> Result<Frame<T>> {
        Frame::new(self.dim, lift_vectors(self.dim, &self.vectors, strict)?)
    }

    /// The frame in the declared field, or in `mode` when given.
    pub fn to_frame(&self, mode: Option<ArithmeticMode>) -> Result<AnyFrame> {
        let declared = parse_field(&self.field)?;
        let strict = mode.is_none();
        Ok(match mode.unwrap_or(declared) {
            ArithmeticMode::Exact => AnyFrame::Exact(self.build(strict)?),
            ArithmeticMode::Float => AnyFrame::Float(self.build(strict)?),
        })
    }
}

impl SubspaceFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("families serialize")
    }

    fn build<T: Field>(&self, strict: bool, tol: &Tolerance) -> Result<SubspaceFamily<T>> {
        if self.dim == 0 {
            return Err(Error::Format("dim must be positive".into()));
        }
        let sets = self
            .subspaces
            .iter()
            .map(|s| lift_vectors(self.dim, &s.basis, strict))
            .collect::<Result<Vec<_>>>()?;
        let fam = SubspaceFamily::from_spanning_sets(self.dim, &sets, tol)?;
        if let Some(k) = fam.members().iter().position(|m| m.dim() == 0) {
            return Err(Error::Format(format!("subspace {k} is the zero subspace")));
        }
        Ok(fam)
    }

    pub fn to_family(&self, mode: Option<ArithmeticMode>, tol: &Tolerance) -> Result<AnyFamily> {
        let declared = parse_field(&self.field)?;
        let strict = mode.is_none();
        Ok(match mode.unwrap_or(declared) {
            ArithmeticMode::Exact => AnyFamily::Exact(self.build(strict, tol)?),
            ArithmeticMode::Float => AnyFamily::Float(self.build(strict, tol)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{Method, Verdict, Witness};

    #[test]
    fn frame_file_round_trip() {
        let text =
            r#"{"dim": 2, "field": "exact", "vectors": [["1/1", "0"], ["0", 1], ["2/4", "1"]]}"#;
        let file = FrameFile::parse(text).unwrap();
        let AnyFrame::Exact(f) = file.to_frame(None).unwrap() else {
            panic!()
        };
        assert_eq!(f.vector(2)[0], Rational::from_ratio(1, 2));
        let back = FrameFile::from_frame(&f);
        assert_eq!(
            back.vectors[2][0],
            Scalar::Exact(Rational::from_ratio(1, 2))
        );
        let json = back.to_json();
        assert!(json.contains("\"1/2\""));
        assert_eq!(FrameFile::parse(&json).unwrap(), back);
    }

    #[test]
    fn float_files_and_overrides() {
        let text = r#"{"dim": 2, "field": "float", "vectors": [[0.5, 0], [0, 1]]}"#;
        let file = FrameFile::parse(text).unwrap();
        assert!(matches!(file.to_frame(None).unwrap(), AnyFrame::Float(_)));
        let AnyFrame::Exact(f) = file.to_frame(Some(ArithmeticMode::Exact)).unwrap() else {
            panic!()
        };
        assert_eq!(f.vector(0)[0], Rational::from_ratio(1, 2));
        let strict = r#"{"dim": 1, "field": "exact", "vectors": [[0.1]]}"#;
        assert!(matches!(
            FrameFile::parse(strict).unwrap().to_frame(None),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn malformed_inputs() {
        let complex = r#"{"dim": 1, "field": "complex", "vectors": [[1]]}"#;
        assert!(matches!(
            FrameFile::parse(complex).unwrap().to_frame(None),
            Err(Error::UnsupportedField(_))
        ));
        let short = r#"{"dim": 2, "field": "exact", "vectors": [[1]]}"#;
        assert!(FrameFile::parse(short).unwrap().to_frame(None).is_err());
        assert!(FrameFile::parse("{").is_err());
        assert!(FrameFile::parse(r#"{"dim": 1, "field": "exact", "vectors": [["1/0"]]}"#).is_err());
    }

    #[test]
    fn subspace_files() {
        let text = r#"{"dim": 2, "field": "exact",
            "subspaces": [{"basis": [["1", "0"]]}, {"basis": [["1", "1"], ["2", "2"]]}]}"#;
        let file = SubspaceFile::parse(text).unwrap();
        let AnyFamily::Exact(fam) = file.to_family(None, &Tolerance::default()).unwrap() else {
            panic!()
        };
        assert_eq!(fam.len(), 2);
        assert_eq!(fam.members()[1].dim(), 1);
        let zero = r#"{"dim": 2, "field": "float", "subspaces": [{"basis": [[0, 0]]}]}"#;
        assert!(SubspaceFile::parse(zero)
            .unwrap()
            .to_family(None, &Tolerance::default())
            .is_err());
    }

    #[test]
    fn certificate_file_round_trip() {
        let cert = Certificate::new(
            Verdict::No,
            Method::ComplementProperty,
            ArithmeticMode::Exact,
        )
        .with_witness(Witness::Partition { subset: vec![0, 2] });
        let file = CertificateFile::new(cert, "cp", b"input");
        let json = file.to_json();
        assert!(json.contains("\"verdict\": \"NO\""));
        assert!(json.contains("\"kind\": \"partition\""));
        assert_eq!(CertificateFile::parse(&json).unwrap(), file);
        assert_eq!(file.inputs_digest.len(), 64);
    }
}
