//! Polynomial file format: `{"terms": [[i, j, "num/den"], ...]}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::bipoly::BiPoly;
use super::rational::{format_rational, parse_rational};
use super::AlgebraError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyFile {
    pub terms: Vec<(u32, u32, String)>,
}

impl PolyFile {
    pub fn to_poly(&self) -> Result<BiPoly, AlgebraError> {
        let mut seen = BTreeSet::new();
        let mut p = BiPoly::zero();
        for (i, j, c) in &self.terms {
            if !seen.insert((*i, *j)) {
                return Err(AlgebraError::DuplicateTerm(*i, *j));
            }
            p.add_term((*i, *j), parse_rational(c)?);
        }
        Ok(p)
    }

    pub fn from_poly(p: &BiPoly) -> Self {
        Self { terms: p.terms().map(|(&(i, j), c)| (i, j, format_rational(c))).collect() }
    }
}

pub fn parse_poly_json(s: &str) -> Result<BiPoly, AlgebraError> {
    let f: PolyFile = serde_json::from_str(s).map_err(|e| AlgebraError::Parse(e.to_string()))?;
    f.to_poly()
}

pub fn poly_to_json(p: &BiPoly) -> String {
    serde_json::to_string(&PolyFile::from_poly(p)).expect("poly serialization")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn parse_and_emit() {
        let p = parse_poly_json(r#"{"terms": [[3, 0, "1/1"], [1, 2, "-3"], [0, 0, "2/4"]]}"#).unwrap();
        assert_eq!(p.coeff(3, 0), rat(1, 1));
        assert_eq!(p.coeff(1, 2), rat(-3, 1));
        assert_eq!(p.coeff(0, 0), rat(1, 2));
        let back = parse_poly_json(&poly_to_json(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn duplicate_pairs_rejected() {
        let e = parse_poly_json(r#"{"terms": [[1, 0, "1"], [1, 0, "2"]]}"#);
        assert_eq!(e, Err(AlgebraError::DuplicateTerm(1, 0)));
    }

    #[test]
    fn malformed_rejected() {
        assert!(parse_poly_json(r#"{"terms": [[1, 0, "x"]]}"#).is_err());
        assert!(parse_poly_json(r#"{"terms": [[-1, 0, "1"]]}"#).is_err());
        assert!(parse_poly_json(r#"{"nope": []}"#).is_err());
    }
}
