use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Color, ColoredOperad, OpId, Operation};
use crate::perm::factorial;

/// Serialized form of a [`ColoredOperad`]: every table written out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperadSpec {
    pub colors: Vec<String>,
    pub operations: Vec<OperationSpec>,
    /// Unit operation per color.
    pub units: Vec<usize>,
    /// Per operation, its image under each permutation in lexicographic order.
    pub symmetry: Vec<Vec<usize>>,
    /// Entries `[outer, inner_0, .., inner_{k-1}, composite]`.
    pub composition: Vec<Vec<usize>>,
    #[serde(default = "default_cap")]
    pub arity_cap: usize,
}

fn default_cap() -> usize {
    super::DEFAULT_ARITY_CAP
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationSpec {
    pub name: String,
    pub inputs: Vec<usize>,
    pub output: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("operation {op} refers to unknown color {color}")]
    UnknownColor { op: usize, color: usize },
    #[error("reference to unknown operation {0}")]
    UnknownOp(usize),
    #[error("operation {name} has arity {arity}, above the cap {cap}")]
    ArityCap { name: String, arity: usize, cap: usize },
    #[error("expected {expected} units, found {found}")]
    Units { expected: usize, found: usize },
    #[error("unit of color {0} is not a unary endo-operation of that color")]
    UnitProfile(usize),
    #[error("symmetry row of operation {op} has {found} entries, expected {expected}")]
    SymmetryShape { op: usize, found: usize, expected: usize },
    #[error("composition entry {0:?} is malformed or not composable")]
    CompositionEntry(Vec<usize>),
    #[error("composition entry for {0:?} given twice")]
    DuplicateComposite(Vec<usize>),
    #[error("composite missing for {0:?}")]
    MissingComposite(Vec<usize>),
}

impl ColoredOperad {
    pub fn to_spec(&self) -> OperadSpec {
        let mut composition: Vec<Vec<usize>> = self
            .composition_table()
            .iter()
            .map(|(k, v)| k.iter().map(|o| o.0).chain(std::iter::once(v.0)).collect())
            .collect();
        composition.sort();
        OperadSpec {
            colors: self.colors().map(|c| self.color_name(c).to_string()).collect(),
            operations: self
                .ops()
                .map(|o| {
                    let op = self.op(o);
                    OperationSpec {
                        name: op.name.clone(),
                        inputs: op.inputs.iter().map(|c| c.0).collect(),
                        output: op.output.0,
                    }
                })
                .collect(),
            units: self.colors().map(|c| self.unit(c).0).collect(),
            symmetry: self.symmetry_table().iter().map(|row| row.iter().map(|o| o.0).collect()).collect(),
            composition,
            arity_cap: self.arity_cap(),
        }
    }

    /// Structural loading: every id resolves, tables have the right shapes
    /// and the composition table is total on composable tuples. The operad
    /// axioms are checked separately by [`ColoredOperad::validate`].
    pub fn from_spec(spec: &OperadSpec) -> Result<Self, SpecError> {
        let nc = spec.colors.len();
        let no = spec.operations.len();
        let mut ops = Vec::with_capacity(no);
        for (i, op) in spec.operations.iter().enumerate() {
            for &c in op.inputs.iter().chain(std::iter::once(&op.output)) {
                if c >= nc {
                    return Err(SpecError::UnknownColor { op: i, color: c });
                }
            }
            if op.inputs.len() > spec.arity_cap {
                return Err(SpecError::ArityCap { name: op.name.clone(), arity: op.inputs.len(), cap: spec.arity_cap });
            }
            ops.push(Operation {
                name: op.name.clone(),
                inputs: op.inputs.iter().map(|&c| Color(c)).collect(),
                output: Color(op.output),
            });
        }
        if spec.units.len() != nc {
            return Err(SpecError::Units { expected: nc, found: spec.units.len() });
        }
        for (c, &u) in spec.units.iter().enumerate() {
            if u >= no {
                return Err(SpecError::UnknownOp(u));
            }
            if ops[u].inputs != [Color(c)] || ops[u].output != Color(c) {
                return Err(SpecError::UnitProfile(c));
            }
        }
        if spec.symmetry.len() != no {
            return Err(SpecError::SymmetryShape { op: spec.symmetry.len(), found: 0, expected: no });
        }
        for (i, row) in spec.symmetry.iter().enumerate() {
            let expected = factorial(ops[i].inputs.len());
            if row.len() != expected {
                return Err(SpecError::SymmetryShape { op: i, found: row.len(), expected });
            }
            if let Some(&bad) = row.iter().find(|&&o| o >= no) {
                return Err(SpecError::UnknownOp(bad));
            }
        }
        let symmetry = spec.symmetry.iter().map(|row| row.iter().map(|&o| OpId(o)).collect()).collect();
        let units = spec.units.iter().map(|&u| OpId(u)).collect();
        let mut operad =
            ColoredOperad::from_parts(spec.colors.clone(), ops, units, symmetry, HashMap::new(), spec.arity_cap);
        let mut composition = HashMap::new();
        for entry in &spec.composition {
            if entry.len() < 2 || entry.iter().any(|&o| o >= no) {
                return Err(SpecError::CompositionEntry(entry.clone()));
            }
            let key: Vec<OpId> = entry[..entry.len() - 1].iter().map(|&o| OpId(o)).collect();
            let value = OpId(entry[entry.len() - 1]);
            let Some((inputs, output)) = operad.composite_profile(key[0], &key[1..]) else {
                return Err(SpecError::CompositionEntry(entry.clone()));
            };
            if operad.inputs(value) != inputs.as_slice() || operad.output(value) != output {
                return Err(SpecError::CompositionEntry(entry.clone()));
            }
            if composition.insert(key, value).is_some() {
                return Err(SpecError::DuplicateComposite(entry[..entry.len() - 1].to_vec()));
            }
        }
        for key in operad.composable_tuples() {
            if !composition.contains_key(&key) {
                return Err(SpecError::MissingComposite(key.iter().map(|o| o.0).collect()));
            }
        }
        operad.composition = composition;
        Ok(operad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::library;

    #[test]
    fn spec_roundtrip() {
        for p in [library::comm(3), library::action(3), library::z2_sets(3)] {
            let spec = p.to_spec();
            let back = ColoredOperad::from_spec(&spec).unwrap();
            assert_eq!(back, p);
            let json = serde_json::to_string(&spec).unwrap();
            let again: OperadSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(again, spec);
        }
    }

    #[test]
    fn missing_composite_detected() {
        let mut spec = library::comm(2).to_spec();
        spec.composition.pop();
        assert!(matches!(ColoredOperad::from_spec(&spec), Err(SpecError::MissingComposite(_))));
    }
}
