//! JSON field descriptions.

use serde::Deserialize;

use crate::algebra::rational::NumOrStr;
use crate::algebra::PolyFile;

use super::{BumpDisk, BumpField, Field, FieldError, RadialLinearField, RadialProfile};

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FieldSpec {
    Poly(PolyFile),
    Bump {
        disks: Vec<BumpDiskSpec>,
        #[serde(default)]
        margin: Option<f64>,
    },
    RadialLinear {
        #[serde(default)]
        a: Option<NumOrStr>,
        #[serde(default)]
        b: Option<NumOrStr>,
        #[serde(default)]
        c0: Option<NumOrStr>,
        profile: ProfileSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
pub struct BumpDiskSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Poly { coeffs: Vec<NumOrStr> },
    Linear { t: NumOrStr },
    Quadratic { t1: NumOrStr, t2: NumOrStr },
}

/// Default separation required between bump disks.
pub const DEFAULT_BUMP_MARGIN: f64 = 0.0;

impl FieldSpec {
    pub fn build(&self) -> Result<Field, FieldError> {
        let bad = |e: crate::algebra::AlgebraError| FieldError::Invalid(e.to_string());
        let num = |v: &Option<NumOrStr>| match v {
            Some(v) => v.to_rational().map_err(bad),
            None => Ok(crate::algebra::int(0)),
        };
        match self {
            FieldSpec::Poly(p) => Ok(Field::poly(p.to_poly().map_err(bad)?)),
            FieldSpec::Bump { disks, margin } => {
                let disks = disks.iter().map(|d| BumpDisk { center: d.center, radius: d.radius }).collect();
                Ok(Field::Bump(BumpField::new(disks, margin.unwrap_or(DEFAULT_BUMP_MARGIN))?))
            }
            FieldSpec::RadialLinear { a, b, c0, profile } => {
                let profile = match profile {
                    ProfileSpec::Poly { coeffs } => RadialProfile::Poly(
                        coeffs.iter().map(|c| c.to_rational()).collect::<Result<_, _>>().map_err(bad)?,
                    ),
                    ProfileSpec::Linear { t } => RadialProfile::Linear { t: t.to_rational().map_err(bad)? },
                    ProfileSpec::Quadratic { t1, t2 } => RadialProfile::Quadratic {
                        t1: t1.to_rational().map_err(bad)?,
                        t2: t2.to_rational().map_err(bad)?,
                    },
                };
                Ok(Field::RadialLinear(RadialLinearField::new(num(a)?, num(b)?, num(c0)?, profile)))
            }
        }
    }
}

/// Parses a field description. A bare polynomial file (`{"terms": ...}`
/// without a `type`) is read as a polynomial field.
pub fn load_field(json: &str) -> Result<Field, FieldError> {
    let invalid = |e: serde_json::Error| FieldError::Invalid(e.to_string());
    let mut v: serde_json::Value = serde_json::from_str(json).map_err(invalid)?;
    if let Some(obj) = v.as_object_mut() {
        if !obj.contains_key("type") && obj.contains_key("terms") {
            obj.insert("type".into(), "poly".into());
        }
    }
    let spec: FieldSpec = serde_json::from_value(v).map_err(invalid)?;
    spec.build()
}
