//! JSON algebra files.
//!
//! ```json
//! {"field": {"prime": 101},
//!  "quiver": {"vertices": ["1", "2"], "arrows": [{"name": "a", "from": "1", "to": "2"}]},
//!  "relations": [[{"coeff": "1", "path": ["a", "b"]}]]}
//! ```
//! Paths list arrows in traversal order.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, Arrow, Presentation, Quiver, RelationTerm};
use crate::linalg::{Field, FieldSpec, PrimeField, Rationals};

pub const SCHEMA: &str = "itlab/1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("{path}: line {line}, column {column}: {msg}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{path}: {field}: {msg}")]
    Field { path: String, field: String, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowFile {
    pub name: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverFile {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermFile {
    #[serde(default = "one")]
    pub coeff: String,
    pub path: Vec<String>,
}

fn one() -> String {
    "1".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default = "default_field")]
    pub field: FieldSpec,
    pub quiver: QuiverFile,
    #[serde(default)]
    pub relations: Vec<Vec<TermFile>>,
    /// Longest path length considered when building the basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_path_len: Option<usize>,
}

fn default_field() -> FieldSpec {
    FieldSpec::Prime(FieldSpec::DEFAULT_PRIME)
}

/// A presentation over whichever field the file names.
#[derive(Debug, Clone)]
pub enum AnyPresentation {
    Prime(Presentation<PrimeField>),
    Rationals(Presentation<Rationals>),
}

pub const DEFAULT_MAX_PATH_LEN: usize = 24;

impl AlgebraFile {
    pub fn parse(path: &str, text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError::Syntax {
            path: path.into(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }

    pub fn read(path: &str) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError::Io {
            path: path.into(),
            msg: e.to_string(),
        })?;
        Self::parse(path, &text)
    }

    pub fn max_path_len(&self) -> usize {
        self.max_path_len.unwrap_or(DEFAULT_MAX_PATH_LEN)
    }

    pub fn presentation(&self, path: &str) -> Result<AnyPresentation, InputError> {
        match self.field {
            FieldSpec::Prime(p) => {
                let f = PrimeField::new(p).ok_or_else(|| InputError::Field {
                    path: path.into(),
                    field: "field.prime".into(),
                    msg: format!("{p} is not a prime that fits the arithmetic"),
                })?;
                Ok(AnyPresentation::Prime(self.presentation_over(path, f)?))
            }
            FieldSpec::Rationals => Ok(AnyPresentation::Rationals(self.presentation_over(path, Rationals)?)),
        }
    }

    pub fn presentation_over<F: Field>(&self, path: &str, field: F) -> Result<Presentation<F>, InputError> {
        let err = |fld: String, msg: String| InputError::Field {
            path: path.into(),
            field: fld,
            msg,
        };
        let q = &self.quiver;
        let vertex = |name: &str, fld: String| {
            q.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| err(fld, format!("unknown vertex `{name}`")))
        };
        let mut arrows = Vec::new();
        for (i, a) in q.arrows.iter().enumerate() {
            arrows.push(Arrow {
                name: a.name.clone(),
                from: vertex(&a.from, format!("quiver.arrows[{i}].from"))?,
                to: vertex(&a.to, format!("quiver.arrows[{i}].to"))?,
            });
        }
        let quiver = Quiver::new(q.vertices.clone(), arrows).map_err(|e| err("quiver".into(), e.to_string()))?;
        let mut relations = Vec::new();
        for (ri, rel) in self.relations.iter().enumerate() {
            let mut terms = Vec::new();
            for (ti, t) in rel.iter().enumerate() {
                let fld = format!("relations[{ri}][{ti}]");
                let coeff = field
                    .parse_elem(&t.coeff)
                    .map_err(|e| err(format!("{fld}.coeff"), format!("bad scalar `{}`", e.0)))?;
                let path = t
                    .path
                    .iter()
                    .map(|n| {
                        quiver
                            .arrow_index(n)
                            .ok_or_else(|| err(format!("{fld}.path"), format!("unknown arrow `{n}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                terms.push(RelationTerm { coeff, path });
            }
            relations.push(terms);
        }
        let p = Presentation {
            field,
            quiver,
            relations,
        };
        p.validate().map_err(|e| match e {
            AlgebraError::InvalidRelation(m) => err("relations".into(), m),
            other => err("presentation".into(), other.to_string()),
        })?;
        Ok(p)
    }

    pub fn from_presentation<F: Field>(p: &Presentation<F>) -> Self {
        let q = &p.quiver;
        Self {
            schema: Some(SCHEMA.into()),
            field: p.field.spec(),
            quiver: QuiverFile {
                vertices: q.vertices.clone(),
                arrows: q
                    .arrows
                    .iter()
                    .map(|a| ArrowFile {
                        name: a.name.clone(),
                        from: q.vertices[a.from].clone(),
                        to: q.vertices[a.to].clone(),
                    })
                    .collect(),
            },
            relations: p
                .relations
                .iter()
                .map(|rel| {
                    rel.iter()
                        .map(|t| TermFile {
                            coeff: p.field.format_elem(&t.coeff),
                            path: t.path.iter().map(|&a| q.arrows[a].name.clone()).collect(),
                        })
                        .collect()
                })
                .collect(),
            max_path_len: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;

    const F1: &str = r#"{"field":{"prime":101},"quiver":{"vertices":["1","2"],"arrows":[{"name":"a","from":"1","to":"2"}]},"relations":[]}"#;

    #[test]
    fn parse_and_round_trip() {
        let f = AlgebraFile::parse("f1", F1).unwrap();
        let AnyPresentation::Prime(p) = f.presentation("f1").unwrap() else {
            panic!("expected a prime field")
        };
        assert_eq!(build_algebra(&p, 8).unwrap().dim(), 3);
        let back = AlgebraFile::from_presentation(&p);
        assert_eq!(back.quiver, f.quiver);
        let json = serde_json::to_string(&back).unwrap();
        assert_eq!(AlgebraFile::parse("x", &json).unwrap(), back);
    }

    #[test]
    fn diagnostics() {
        let bad_vertex = F1.replace(r#""to":"2""#, r#""to":"9""#);
        let e = AlgebraFile::parse("f", &bad_vertex).unwrap().presentation("f").unwrap_err();
        assert!(matches!(&e, InputError::Field { field, .. } if field == "quiver.arrows[0].to"), "{e}");
        let bad_rel = F1.replace(r#""relations":[]"#, r#""relations":[[{"coeff":"1","path":["a","a"]}]]"#);
        let e = AlgebraFile::parse("f", &bad_rel).unwrap().presentation("f").unwrap_err();
        assert!(e.to_string().contains("not composable") && e.to_string().contains("a,a"), "{e}");
        let e = AlgebraFile::parse("f", "{\n \"quiver\": [").unwrap_err();
        assert!(matches!(e, InputError::Syntax { line: 2, .. }), "{e}");
    }
}
