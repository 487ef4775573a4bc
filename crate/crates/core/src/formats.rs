//! JSON file formats: cap bodies, direction sets, bound certificates and
//! illumination reports. Writers emit keys in a fixed order.

use std::f64::consts::FRAC_PI_2;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cap_body::{cap_of, CapBody, CapBodyError, Vertex};
use crate::exact::{rational_to_f64, Rational};
use crate::illuminator::{DirectionSet, IlluminationError, IlluminationReport};
use crate::ilp::{CertificateReport, ConstraintForm, IlpSolution};
use crate::sphere::{Cap, UnitVector};

/// Loaded radii must stay at least this far below π/2.
pub const RADIUS_MARGIN: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON")]
    Json(#[from] serde_json::Error),
    #[error("a cap-body file needs exactly one of \"caps\" and \"vertices\"")]
    AmbiguousBody,
    #[error("entry {index}: {reason}")]
    InvalidEntry { index: usize, reason: String },
    #[error(transparent)]
    Body(#[from] CapBodyError),
    #[error(transparent)]
    Directions(#[from] IlluminationError),
    #[error("integer {0} does not fit the certificate format")]
    Overflow(BigInt),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapEntry {
    pub center: [f64; 3],
    pub radius_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapBodyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Vec<CapEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 3]>>,
}

fn normalize(index: usize, p: [f64; 3]) -> Result<UnitVector, FormatError> {
    UnitVector::from_array(p)
        .ok_or_else(|| FormatError::InvalidEntry { index, reason: format!("{p:?} cannot be normalized") })
}

fn check_radius(index: usize, r: f64) -> Result<(), FormatError> {
    if r.is_finite() && r > 0.0 && r < FRAC_PI_2 - RADIUS_MARGIN {
        Ok(())
    } else {
        Err(FormatError::InvalidEntry { index, reason: format!("radius {r} outside (0, π/2 − {RADIUS_MARGIN})") })
    }
}

impl CapBodyFile {
    pub fn from_body(body: &CapBody) -> Self {
        let caps = body.caps().iter().map(|c| CapEntry { center: c.center.to_array(), radius_rad: c.radius }).collect();
        Self { caps: Some(caps), vertices: None }
    }

    pub fn into_body(self) -> Result<CapBody, FormatError> {
        let caps = match (self.caps, self.vertices) {
            (Some(entries), None) => entries
                .into_iter()
                .enumerate()
                .map(|(i, e)| {
                    check_radius(i, e.radius_rad)?;
                    Ok(Cap::closed(normalize(i, e.center)?, e.radius_rad))
                })
                .collect::<Result<Vec<_>, FormatError>>()?,
            (None, Some(points)) => points
                .into_iter()
                .enumerate()
                .map(|(i, p)| {
                    let cap = cap_of(&Vertex { position: p })?;
                    check_radius(i, cap.radius)?;
                    Ok(cap)
                })
                .collect::<Result<Vec<_>, FormatError>>()?,
            _ => return Err(FormatError::AmbiguousBody),
        };
        Ok(CapBody::from_caps(caps)?)
    }
}

pub fn body_from_json(text: &str) -> Result<CapBody, FormatError> {
    serde_json::from_str::<CapBodyFile>(text)?.into_body()
}

pub fn body_to_json(body: &CapBody) -> String {
    to_pretty(&CapBodyFile::from_body(body))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionFile {
    pub directions: Vec<[f64; 3]>,
}

pub fn directions_from_json(text: &str) -> Result<DirectionSet, FormatError> {
    let file: DirectionFile = serde_json::from_str(text)?;
    let dirs = file.directions.into_iter().enumerate().map(|(i, p)| normalize(i, p)).collect::<Result<Vec<_>, _>>()?;
    Ok(DirectionSet::new(dirs)?)
}

pub fn directions_to_json(dirs: &DirectionSet) -> String {
    to_pretty(&DirectionFile { directions: dirs.directions().iter().map(|v| v.to_array()).collect() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: i128,
    pub den: i128,
}

impl RationalJson {
    pub fn from_rational(r: &Rational) -> Result<Self, FormatError> {
        let fit = |b: &BigInt| b.to_i128().ok_or_else(|| FormatError::Overflow(b.clone()));
        Ok(Self { num: fit(r.numer())?, den: fit(r.denom())? })
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

/// The bound certificate. Float-mode certificates carry `"D": null`, the
/// exact binary value of the floating-point optimum, and `certified: false`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub t: usize,
    #[serde(rename = "D")]
    pub d: Option<u64>,
    #[serde(rename = "M_t")]
    pub m_t: RationalJson,
    #[serde(rename = "floor_M_t")]
    pub floor_m_t: i128,
    pub verdict_lt_3: bool,
    pub counts: Vec<u64>,
    pub mode: String,
    #[serde(rename = "M_t_approx")]
    pub m_t_approx: f64,
    pub directions_bound: Option<i128>,
    pub constraint_form: Option<String>,
    pub certified: bool,
}

impl Certificate {
    pub fn exact(report: &CertificateReport, form: ConstraintForm) -> Result<Self, FormatError> {
        let fit = |b: &BigInt| b.to_i128().ok_or_else(|| FormatError::Overflow(b.clone()));
        Ok(Self {
            t: report.t,
            d: Some(report.d),
            m_t: RationalJson::from_rational(&report.m_t)?,
            floor_m_t: fit(&report.floor_m_t)?,
            verdict_lt_3: report.verdict_lt_3,
            counts: report.counts.clone(),
            mode: report.mode.name().to_string(),
            m_t_approx: rational_to_f64(&report.m_t),
            directions_bound: Some(fit(&report.directions_bound)?),
            constraint_form: Some(form.name().to_string()),
            certified: true,
        })
    }

    pub fn float(t: usize, sol: &IlpSolution) -> Result<Self, FormatError> {
        let floor = sol.objective.floor().to_integer();
        Ok(Self {
            t,
            d: None,
            m_t: RationalJson::from_rational(&sol.objective)?,
            floor_m_t: floor.to_i128().ok_or(FormatError::Overflow(floor))?,
            verdict_lt_3: sol.objective < Rational::from_integer(BigInt::from(3)),
            counts: sol.counts.clone(),
            mode: sol.mode.name().to_string(),
            m_t_approx: sol.objective_f64(),
            directions_bound: None,
            constraint_form: None,
            certified: false,
        })
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

#[derive(Serialize)]
struct ReportJson<'a> {
    illuminated: bool,
    hull_ok: bool,
    verdict: &'static str,
    unlit: &'a [usize],
    per_cap: &'a [crate::illuminator::CapAssignment],
}

pub fn report_to_json(report: &IlluminationReport) -> String {
    to_pretty(&ReportJson {
        illuminated: report.illuminated,
        hull_ok: report.hull_ok,
        verdict: report.verdict(),
        unlit: &report.unlit,
        per_cap: &report.per_cap,
    })
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap_body::k0;

    #[test]
    fn caps_and_vertices_forms() {
        let a = body_from_json(r#"{"caps": [{"center": [0, 0, 2], "radius_rad": 0.5}]}"#).unwrap();
        assert_eq!(a.caps()[0].center, UnitVector::E_Z);
        let x = 1.0 / 0.5f64.cos();
        let b = body_from_json(&format!(r#"{{"vertices": [[0, 0, {x}]]}}"#)).unwrap();
        assert!((b.caps()[0].radius - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(body_from_json("{"), Err(FormatError::Json(_))));
        assert!(matches!(body_from_json("{}"), Err(FormatError::AmbiguousBody)));
        assert!(matches!(body_from_json(r#"{"caps": [], "vertices": []}"#), Err(FormatError::AmbiguousBody)));
        assert!(matches!(
            body_from_json(r#"{"caps": [{"center": [0, 0, 1], "radius_rad": 1.570796326794}]}"#),
            Err(FormatError::InvalidEntry { index: 0, .. })
        ));
        assert!(matches!(
            body_from_json(r#"{"caps": [{"center": [0, 0, 0], "radius_rad": 0.5}]}"#),
            Err(FormatError::InvalidEntry { .. })
        ));
        assert!(matches!(body_from_json(r#"{"vertices": [[0, 0, 0.5]]}"#), Err(FormatError::Body(_))));
        assert!(matches!(body_from_json(r#"{"caps": []}"#), Err(FormatError::Body(CapBodyError::Empty))));
        assert!(matches!(
            body_from_json(
                r#"{"caps": [{"center": [0,0,1], "radius_rad": 1.0}, {"center": [1,0,0], "radius_rad": 1.0}]}"#
            ),
            Err(FormatError::Body(CapBodyError::OverlappingCaps { .. }))
        ));
    }

    #[test]
    fn body_round_trip() {
        let body = k0();
        let text = body_to_json(&body);
        assert_eq!(body_from_json(&text).unwrap(), body);
        assert_eq!(body_to_json(&body_from_json(&text).unwrap()), text);
    }

    #[test]
    fn directions_round_trip() {
        let dirs = DirectionSet::octahedron();
        let text = directions_to_json(&dirs);
        assert_eq!(directions_from_json(&text).unwrap(), dirs);
        assert!(directions_from_json(r#"{"directions": []}"#).is_err());
        let d = directions_from_json(r#"{"directions": [[0, 3, 0]]}"#).unwrap();
        assert_eq!(d.directions()[0], UnitVector::E_Y);
    }

    #[test]
    fn certificate_key_order() {
        let cert = Certificate {
            t: 1,
            d: Some(3000),
            m_t: RationalJson { num: 37, den: 1 },
            floor_m_t: 37,
            verdict_lt_3: false,
            counts: vec![37],
            mode: "exact".into(),
            m_t_approx: 37.0,
            directions_bound: Some(41),
            constraint_form: Some("halved".into()),
            certified: true,
        };
        let text = cert.to_json();
        let keys = ["\"t\"", "\"D\"", "\"M_t\"", "\"floor_M_t\"", "\"verdict_lt_3\"", "\"counts\"", "\"mode\""];
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }
}
