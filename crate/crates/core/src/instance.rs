//! The self-describing instance format: one JSON document with a `kind` tag.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dendroidal::{Forest, Simplex, SimplexError, Tree, TreeError};
use crate::grothendieck::{GrothendieckError, OperadicLeftFibration};
use crate::operad::{Algebra, AlgebraError, AlgebraSpec, Color, ColoredOperad, OpId, OperadMap, OperadSpec, SpecError};
use crate::pointed::{PointedError, PointedMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceFile {
    Operad(OperadSpec),
    Algebra(AlgebraSpec),
    Fibration(FibrationSpec),
    Tree { text: String },
    Forest { text: String },
    Simplex { start: usize, maps: Vec<MapSpec> },
}

/// A total operad over a base operad with the images of its colors and
/// operations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationSpec {
    pub base: OperadSpec,
    pub total: OperadSpec,
    pub colors: Vec<usize>,
    pub ops: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub target: usize,
    pub image: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed instance: {0}")]
    Json(#[from] serde_json::Error),
    #[error("operad: {0}")]
    Spec(#[from] SpecError),
    #[error("algebra: {0}")]
    Algebra(#[from] AlgebraError),
    #[error("fibration: {0}")]
    Fibration(#[from] GrothendieckError),
    #[error("forest: {0}")]
    Tree(#[from] TreeError),
    #[error("pointed map: {0}")]
    Map(#[from] PointedError),
    #[error("simplex: {0}")]
    Simplex(#[from] SimplexError),
}

/// A loaded instance. Loading checks shapes and references only; the laws
/// are left to the checkers.
#[derive(Clone, Debug)]
pub enum Instance {
    Operad(Arc<ColoredOperad>),
    Algebra(Algebra),
    Fibration(OperadicLeftFibration),
    Tree(Tree),
    Forest(Forest),
    Simplex(Simplex),
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances serialize")
    }

    pub fn load(&self) -> Result<Instance, LoadError> {
        Ok(match self {
            InstanceFile::Operad(spec) => Instance::Operad(Arc::new(ColoredOperad::from_spec(spec)?)),
            InstanceFile::Algebra(spec) => {
                let operad = Arc::new(ColoredOperad::from_spec(&spec.operad)?);
                Instance::Algebra(Algebra::new(operad, spec.carriers.clone(), spec.actions.clone())?)
            }
            InstanceFile::Fibration(spec) => {
                let base = Arc::new(ColoredOperad::from_spec(&spec.base)?);
                let total = Arc::new(ColoredOperad::from_spec(&spec.total)?);
                let proj = OperadMap {
                    colors: spec.colors.iter().map(|&c| Color(c)).collect(),
                    ops: spec.ops.iter().map(|&o| OpId(o)).collect(),
                };
                Instance::Fibration(OperadicLeftFibration::from_parts(base, total, proj)?)
            }
            InstanceFile::Tree { text } => Instance::Tree(Tree::parse(text)?),
            InstanceFile::Forest { text } => Instance::Forest(Forest::parse(text)?),
            InstanceFile::Simplex { start, maps } => {
                let maps = maps
                    .iter()
                    .map(|m| PointedMap::new(m.target, m.image.clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                Instance::Simplex(Simplex::new(*start, maps)?)
            }
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InstanceFile::Operad(_) => "operad",
            InstanceFile::Algebra(_) => "algebra",
            InstanceFile::Fibration(_) => "fibration",
            InstanceFile::Tree { .. } => "tree",
            InstanceFile::Forest { .. } => "forest",
            InstanceFile::Simplex { .. } => "simplex",
        }
    }

    /// First 16 hex digits of the SHA-256 of the compact JSON encoding.
    pub fn hash(&self) -> String {
        hash_text(&serde_json::to_string(self).expect("instances serialize"))
    }
}

pub fn hash_text(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl From<&ColoredOperad> for InstanceFile {
    fn from(p: &ColoredOperad) -> Self {
        InstanceFile::Operad(p.to_spec())
    }
}

impl From<&Algebra> for InstanceFile {
    fn from(a: &Algebra) -> Self {
        InstanceFile::Algebra(a.to_spec())
    }
}

impl From<&OperadicLeftFibration> for InstanceFile {
    fn from(f: &OperadicLeftFibration) -> Self {
        InstanceFile::Fibration(FibrationSpec {
            base: f.base().to_spec(),
            total: f.total().to_spec(),
            colors: f.proj().colors.iter().map(|c| c.0).collect(),
            ops: f.proj().ops.iter().map(|o| o.0).collect(),
        })
    }
}

impl From<&Simplex> for InstanceFile {
    fn from(s: &Simplex) -> Self {
        InstanceFile::Simplex {
            start: s.objects()[0],
            maps: s.maps().iter().map(|m| MapSpec { target: m.target(), image: m.image().to_vec() }).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grothendieck::unstraighten;
    use crate::operad::library;

    #[test]
    fn roundtrips_through_json() {
        let comm = Arc::new(library::comm(3));
        let alg = Algebra::from_fn(comm.clone(), vec![2], |_, a| a.iter().copied().max().unwrap_or(0)).unwrap();
        let fib = unstraighten(&alg, 2).unwrap();
        let sigma = Simplex::from_maps(vec![PointedMap::new(1, vec![1, 0]).unwrap()]).unwrap();
        let files = [
            InstanceFile::from(&*comm),
            InstanceFile::from(&alg),
            InstanceFile::from(&fib),
            InstanceFile::Tree { text: "r(a(x, y), b)".into() },
            InstanceFile::Forest { text: "a(); b".into() },
            InstanceFile::from(&sigma),
        ];
        for f in &files {
            let back = InstanceFile::parse(&f.to_json()).unwrap();
            assert_eq!(&back, f);
            assert_eq!(back.hash(), f.hash());
            back.load().unwrap();
        }
        match files[2].load().unwrap() {
            Instance::Fibration(g) => assert_eq!(g.total().color_count(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kind_tag_is_required() {
        assert!(matches!(InstanceFile::parse(r#"{"text": "r"}"#), Err(LoadError::Json(_))));
        let f = InstanceFile::parse(r#"{"kind": "tree", "text": "r(a, b)"}"#).unwrap();
        assert_eq!(f.kind(), "tree");
        assert!(matches!(
            InstanceFile::parse(r#"{"kind": "tree", "text": "r(a"}"#).unwrap().load(),
            Err(LoadError::Tree(_))
        ));
    }
}
