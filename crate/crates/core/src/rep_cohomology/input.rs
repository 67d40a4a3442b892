//! Representation input documents.
//!
//! ```json
//! { "group": "SU2", "genus": 2, "central": "+I", "rep": "torus:[0.7,1.1,2.3,0.4]" }
//! ```
//!
//! `rep` is either a named constructor (`central:[+,-,+,-]`,
//! `torus:[θ1,…]`, `random:<seed>`) or `{"matrices": [...]}` with row-major
//! complex entries given as `[re, im]` pairs.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{constructors, random_solution, BundleClass, RepPoint};
use crate::error::{Error, Result};
use crate::free_words::Presentation;
use crate::lie_model::{CMatrix, GroupElement, LieGroupModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepSource {
    Named(String),
    Matrices { matrices: Vec<Vec<Vec<[f64; 2]>>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepDocument {
    pub group: String,
    pub genus: usize,
    #[serde(default = "default_central")]
    pub central: String,
    pub rep: RepSource,
}

fn default_central() -> String {
    "+I".to_string()
}

/// Everything needed to evaluate the complex.
pub struct ResolvedRep {
    pub group: Arc<LieGroupModel>,
    pub presentation: Presentation,
    pub class: BundleClass,
    pub rep: RepPoint,
}

impl RepDocument {
    pub fn resolve(&self) -> Result<ResolvedRep> {
        let group = Arc::new(LieGroupModel::parse(&self.group)?);
        let presentation = Presentation::surface(self.genus)?;
        let class = BundleClass::named(&group, &self.central)?;
        let rep = match &self.rep {
            RepSource::Named(text) => named(text, &group, &presentation, &class)?,
            RepSource::Matrices { matrices } => {
                let values = matrices
                    .iter()
                    .map(|rows| matrix_from_rows(rows, group.matrix_dim()))
                    .collect::<Result<Vec<_>>>()?;
                RepPoint::new(group.clone(), values)?
            }
        };
        if rep.len() != presentation.generator_count() {
            return Err(Error::InvalidArgument(format!(
                "genus {} needs {} values, got {}",
                self.genus,
                presentation.generator_count(),
                rep.len()
            )));
        }
        Ok(ResolvedRep {
            group,
            presentation,
            class,
            rep,
        })
    }
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>], n: usize) -> Result<GroupElement> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("expected {n}x{n} matrices")));
    }
    let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
    Ok(GroupElement::from_matrix(m))
}

fn bracketed(body: &str) -> Result<Vec<&str>> {
    let inner = body
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::InvalidArgument(format!("expected a bracketed list, got `{body}`")))?;
    Ok(inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
}

fn named(
    text: &str,
    group: &Arc<LieGroupModel>,
    pres: &Presentation,
    class: &BundleClass,
) -> Result<RepPoint> {
    let (kind, body) = text
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("unknown representation `{text}`")))?;
    match kind.trim() {
        "central" => {
            let signs = bracketed(body)?
                .into_iter()
                .map(|s| match s {
                    "+" | "+I" => Ok(true),
                    "-" | "-I" => Ok(false),
                    other => Err(Error::InvalidArgument(format!("bad sign `{other}`"))),
                })
                .collect::<Result<Vec<_>>>()?;
            constructors::central(group, &signs)
        }
        "torus" => {
            let angles = bracketed(body)?
                .into_iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad angle `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            constructors::torus(group, &angles)
        }
        "random" => {
            let seed = body
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidArgument(format!("bad seed `{body}`")))?;
            random_solution(pres, group, class, seed)
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown constructor `{other}` (expected central, torus or random)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep_cohomology::relator_defect;

    fn doc(rep: &str) -> RepDocument {
        RepDocument {
            group: "SU2".into(),
            genus: 2,
            central: "+I".into(),
            rep: RepSource::Named(rep.into()),
        }
    }

    #[test]
    fn named_constructors_resolve() {
        for text in ["central:[+,-,+,-]", "torus:[0.7,1.1,2.3,0.4]", "random:42"] {
            let r = doc(text).resolve().unwrap();
            assert!(relator_defect(&r.presentation, &r.rep, &r.class) < 1e-12, "{text}");
        }
    }

    #[test]
    fn explicit_matrices_resolve() {
        let id = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]];
        let d = RepDocument {
            group: "SU2".into(),
            genus: 1,
            central: "+I".into(),
            rep: RepSource::Matrices {
                matrices: vec![id.clone(), id],
            },
        };
        assert_eq!(d.resolve().unwrap().rep.len(), 2);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        for text in ["central:[+,x,+,-]", "torus:0.7", "random:abc", "banana:[1]", "central:[+,+]"] {
            assert!(doc(text).resolve().is_err(), "{text}");
        }
        let mut bad = doc("central:[+,+,+,+]");
        bad.group = "SU3".into();
        assert!(bad.resolve().is_err());
    }
}
