//! Stable JSON documents for systems and beams.
//!
//! System document:
//! ```json
//! {
//!   "n": 2,
//!   "B": [{"re": -1.0, "im": 0.0}, {"re": 1.0, "im": 0.0}],
//!   "C": [[{"re": 1.0, "im": 0.0}, ...], ...],
//!   "D": [[...], ...],
//!   "Q": {"kind": "zero"}
//!      | {"kind": "constant", "matrix": [[complex]]}
//!      | {"kind": "grid", "samples": [[[complex]]], "interp": 0,
//!         "endpoint_continuity": [[bool]]}
//! }
//! ```
//!
//! Beam document: profiles are numbers (constant) or arrays of uniform
//! samples on `[0, length]`; the damping coefficients are complex scalars.

use crate::linalg::{c64, C64, CMat};
use crate::system::{
    validate_bvp, BoundaryPair, DiracBVP, Interp, PotentialField, PotentialKind, WeightMatrix,
};
use crate::timoshenko::{BeamModel, Profile};
use crate::{Error, Result};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexDoc {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexDoc> for C64 {
    fn from(z: ComplexDoc) -> Self {
        c64(z.re, z.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialDoc {
    Zero,
    Constant {
        matrix: Vec<Vec<ComplexDoc>>,
    },
    Grid {
        samples: Vec<Vec<Vec<ComplexDoc>>>,
        interp: u8,
        #[serde(skip_serializing_if = "Option::is_none")]
        endpoint_continuity: Option<Vec<Vec<bool>>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemDoc {
    pub n: usize,
    #[serde(rename = "B")]
    pub b: Vec<ComplexDoc>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<ComplexDoc>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<ComplexDoc>>,
    #[serde(rename = "Q")]
    pub q: PotentialDoc,
}

fn matrix_from_doc(rows: &[Vec<ComplexDoc>], n: usize, name: &str) -> Result<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("{name} must be {n} x {n}")));
    }
    let data: Vec<C64> = rows.iter().flatten().map(|&z| z.into()).collect();
    Ok(CMat { rows: n, cols: n, data })
}

fn matrix_to_doc(m: &CMat) -> Vec<Vec<ComplexDoc>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| m[(i, j)].into()).collect()).collect()
}

impl SystemDoc {
    pub fn to_bvp(&self) -> Result<DiracBVP> {
        let n = self.n;
        if self.b.len() != n {
            return Err(Error::Parse(format!("B must have {n} entries")));
        }
        let weight = WeightMatrix::new(self.b.iter().map(|&z| z.into()).collect());
        let c = matrix_from_doc(&self.c, n, "C")?;
        let d = matrix_from_doc(&self.d, n, "D")?;
        let potential = match &self.q {
            PotentialDoc::Zero => PotentialField::zero(n),
            PotentialDoc::Constant { matrix } => {
                PotentialField::constant(matrix_from_doc(matrix, n, "Q.matrix")?)
            }
            PotentialDoc::Grid { samples, interp, endpoint_continuity } => {
                if samples.len() < 2 {
                    return Err(Error::Parse("grid potential needs at least 2 samples".into()));
                }
                let mats: Result<Vec<CMat>> =
                    samples.iter().map(|s| matrix_from_doc(s, n, "Q.samples[i]")).collect();
                let interp = match interp {
                    0 => Interp::Step,
                    1 => Interp::Linear,
                    other => return Err(Error::Parse(format!("interp must be 0 or 1, got {other}"))),
                };
                let mut field = PotentialField::grid(mats?, interp);
                if let Some(flags) = endpoint_continuity {
                    if flags.len() != n || flags.iter().any(|r| r.len() != n) {
                        return Err(Error::Parse("endpoint_continuity must be n x n".into()));
                    }
                    field = field.with_continuity(flags.clone());
                }
                field
            }
        };
        let bvp = DiracBVP::new(weight, potential, BoundaryPair::new(c, d));
        let report = validate_bvp(&bvp);
        if !report.is_valid() {
            return Err(Error::Parse(format!("invalid system: {}", report.violations.join("; "))));
        }
        Ok(bvp)
    }

    pub fn from_bvp(bvp: &DiracBVP) -> Self {
        let q = match &bvp.potential.kind {
            PotentialKind::Zero => PotentialDoc::Zero,
            PotentialKind::Constant(m) => PotentialDoc::Constant { matrix: matrix_to_doc(m) },
            PotentialKind::Grid { samples, interp } => PotentialDoc::Grid {
                samples: samples.iter().map(matrix_to_doc).collect(),
                interp: *interp as u8,
                endpoint_continuity: Some(bvp.potential.continuity_flags()),
            },
        };
        Self {
            n: bvp.n(),
            b: bvp.weight.entries().iter().map(|&z| z.into()).collect(),
            c: matrix_to_doc(&bvp.boundary.c),
            d: matrix_to_doc(&bvp.boundary.d),
            q,
        }
    }
}

/// Parse and validate a system document.
pub fn parse_system(text: &str) -> Result<DiracBVP> {
    let doc: SystemDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("system document: {e}")))?;
    doc.to_bvp()
}

/// Serialize a problem back to its document form.
pub fn system_to_json(bvp: &DiracBVP) -> String {
    serde_json::to_string_pretty(&SystemDoc::from_bvp(bvp)).expect("system serialization")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileDoc {
    Constant(f64),
    Samples(Vec<f64>),
}

impl From<&ProfileDoc> for Profile {
    fn from(p: &ProfileDoc) -> Self {
        match p {
            ProfileDoc::Constant(v) => Profile::Constant(*v),
            ProfileDoc::Samples(v) => Profile::Samples(v.clone()),
        }
    }
}

fn default_zero_profile() -> ProfileDoc {
    ProfileDoc::Constant(0.0)
}

fn default_zero_complex() -> ComplexDoc {
    ComplexDoc { re: 0.0, im: 0.0 }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeamDoc {
    pub length: f64,
    pub rho: ProfileDoc,
    #[serde(rename = "I_rho")]
    pub i_rho: ProfileDoc,
    #[serde(rename = "K")]
    pub shear: ProfileDoc,
    #[serde(rename = "EI")]
    pub flexural: ProfileDoc,
    #[serde(default = "default_zero_profile")]
    pub p1: ProfileDoc,
    #[serde(default = "default_zero_profile")]
    pub p2: ProfileDoc,
    pub alpha1: ComplexDoc,
    pub alpha2: ComplexDoc,
    #[serde(default = "default_zero_complex")]
    pub beta1: ComplexDoc,
    #[serde(default = "default_zero_complex")]
    pub beta2: ComplexDoc,
}

impl BeamDoc {
    pub fn to_beam(&self) -> BeamModel {
        BeamModel {
            length: self.length,
            rho: (&self.rho).into(),
            i_rho: (&self.i_rho).into(),
            shear: (&self.shear).into(),
            flexural: (&self.flexural).into(),
            damping1: (&self.p1).into(),
            damping2: (&self.p2).into(),
            alpha1: self.alpha1.into(),
            alpha2: self.alpha2.into(),
            beta1: self.beta1.into(),
            beta2: self.beta2.into(),
        }
    }
}

/// Parse a beam document.
pub fn parse_beam(text: &str) -> Result<BeamModel> {
    let doc: BeamDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("beam document: {e}")))?;
    Ok(doc.to_beam())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_round_trip() {
        let text = r#"{
            "n": 2,
            "B": [{"re": -1.0, "im": 0.0}, {"re": 1.0, "im": 0.0}],
            "C": [[{"re": 1.0, "im": 0.0}, {"re": 0.0, "im": 0.0}],
                  [{"re": 0.0, "im": 0.0}, {"re": 1.0, "im": 0.0}]],
            "D": [[{"re": -1.0, "im": 0.0}, {"re": 0.0, "im": 0.0}],
                  [{"re": 0.0, "im": 0.0}, {"re": -1.0, "im": 0.0}]],
            "Q": {"kind": "zero"}
        }"#;
        let bvp = parse_system(text).unwrap();
        assert_eq!(bvp.n(), 2);
        let back = system_to_json(&bvp);
        let again = parse_system(&back).unwrap();
        assert_eq!(bvp, again);
    }

    #[test]
    fn grid_potential_document() {
        let text = r#"{
            "n": 1,
            "B": [{"re": 1.0, "im": 0.0}],
            "C": [[{"re": 1.0, "im": 0.0}]],
            "D": [[{"re": 0.0, "im": 0.0}]],
            "Q": {"kind": "grid",
                  "samples": [[[{"re": 0.0, "im": 0.0}]], [[{"re": 1.0, "im": 0.0}]]],
                  "interp": 1,
                  "endpoint_continuity": [[true]]}
        }"#;
        let bvp = parse_system(text).unwrap();
        assert!(bvp.potential.continuous_at_ends(0, 0));
        let mid = bvp.potential.eval(0.5);
        assert!((mid[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(matches!(parse_system("{"), Err(Error::Parse(_))));
        // wrong B length
        let text = r#"{"n": 2, "B": [{"re": 1.0, "im": 0.0}],
            "C": [[{"re":1.0,"im":0.0},{"re":0.0,"im":0.0}],[{"re":0.0,"im":0.0},{"re":1.0,"im":0.0}]],
            "D": [[{"re":1.0,"im":0.0},{"re":0.0,"im":0.0}],[{"re":0.0,"im":0.0},{"re":1.0,"im":0.0}]],
            "Q": {"kind": "zero"}}"#;
        assert!(matches!(parse_system(text), Err(Error::Parse(_))));
        // structurally invalid: zero weight entry
        let text = r#"{"n": 1, "B": [{"re": 0.0, "im": 0.0}],
            "C": [[{"re":1.0,"im":0.0}]], "D": [[{"re":0.0,"im":0.0}]],
            "Q": {"kind": "zero"}}"#;
        assert!(matches!(parse_system(text), Err(Error::Parse(_))));
    }

    #[test]
    fn beam_document() {
        let text = r#"{
            "length": 1.0,
            "rho": 1.0, "I_rho": 4.0, "K": 1.0, "EI": 1.0,
            "alpha1": {"re": 2.5, "im": 0.0},
            "alpha2": {"re": 1.0833333333333333, "im": 0.0}
        }"#;
        let beam = parse_beam(text).unwrap();
        assert_eq!(beam.length, 1.0);
        assert_eq!(beam.beta1, crate::linalg::ZERO);
        let red = crate::timoshenko::reduce_to_dirac(&beam).unwrap();
        assert!((red.b1 - 2.0).abs() < 1e-12);
    }
}
