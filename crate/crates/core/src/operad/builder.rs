use std::collections::HashMap;

use thiserror::Error;

use super::{perms_upto, Color, ColoredOperad, OpId, Operation};
use crate::perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("operation {name} has arity {arity}, above the cap {cap}")]
    ArityCap { name: String, arity: usize, cap: usize },
    #[error("no value for {op:?}·{perm:?}")]
    MissingAction { op: OpId, perm: Perm },
    #[error("{op:?}·{perm:?} = {image:?} has the wrong profile")]
    ActionProfile { op: OpId, perm: Perm, image: OpId },
    #[error("no composite for {0:?}")]
    MissingComposite(Vec<OpId>),
    #[error("composite of {key:?} = {image:?} has the wrong profile")]
    CompositeProfile { key: Vec<OpId>, image: OpId },
}

/// Collects colors and operations, then materializes symmetry and composition
/// tables from closures. Units are created with their colors; composites
/// involving units and trivial permutations are filled in automatically.
#[derive(Debug, Clone)]
pub struct OperadBuilder {
    cap: usize,
    colors: Vec<String>,
    ops: Vec<Operation>,
    units: Vec<OpId>,
}

impl OperadBuilder {
    pub fn new(arity_cap: usize) -> Self {
        OperadBuilder { cap: arity_cap, colors: Vec::new(), ops: Vec::new(), units: Vec::new() }
    }

    pub fn color(&mut self, name: &str) -> Color {
        let c = Color(self.colors.len());
        self.colors.push(name.to_string());
        self.units.push(OpId(self.ops.len()));
        self.ops.push(Operation { name: format!("1_{name}"), inputs: vec![c], output: c });
        c
    }

    pub fn op(&mut self, name: &str, inputs: &[Color], output: Color) -> OpId {
        self.ops.push(Operation { name: name.to_string(), inputs: inputs.to_vec(), output });
        OpId(self.ops.len() - 1)
    }

    pub fn unit(&self, c: Color) -> OpId {
        self.units[c.0]
    }

    pub fn operation(&self, id: OpId) -> &Operation {
        &self.ops[id.0]
    }

    pub fn op_ids(&self) -> impl Iterator<Item = OpId> {
        (0..self.ops.len()).map(OpId)
    }

    pub fn build(
        self,
        act: impl Fn(OpId, &Perm) -> Option<OpId>,
        compose: impl Fn(OpId, &[OpId]) -> Option<OpId>,
    ) -> Result<ColoredOperad, BuildError> {
        for op in &self.ops {
            if op.arity() > self.cap {
                return Err(BuildError::ArityCap { name: op.name.clone(), arity: op.arity(), cap: self.cap });
            }
        }
        let perms = perms_upto(self.cap);
        let mut symmetry = Vec::with_capacity(self.ops.len());
        for (i, op) in self.ops.iter().enumerate() {
            let id = OpId(i);
            let mut row = Vec::with_capacity(perms[op.arity()].len());
            for sigma in &perms[op.arity()] {
                let image = if sigma.is_identity() {
                    id
                } else {
                    act(id, sigma).ok_or_else(|| BuildError::MissingAction { op: id, perm: sigma.clone() })?
                };
                let target = &self.ops[image.0];
                if target.output != op.output || target.inputs != sigma.permute(&op.inputs) {
                    return Err(BuildError::ActionProfile { op: id, perm: sigma.clone(), image });
                }
                row.push(image);
            }
            symmetry.push(row);
        }
        let mut operad = ColoredOperad::from_parts(
            self.colors.clone(),
            self.ops.clone(),
            self.units.clone(),
            symmetry,
            HashMap::new(),
            self.cap,
        );
        let mut composition = HashMap::new();
        for key in operad.composable_tuples() {
            let (outer, inners) = (key[0], &key[1..]);
            let image = if operad.is_unit(outer) {
                inners[0]
            } else if inners.iter().all(|&p| operad.is_unit(p)) {
                outer
            } else {
                compose(outer, inners).ok_or_else(|| BuildError::MissingComposite(key.clone()))?
            };
            let (inputs, output) = operad.composite_profile(outer, inners).expect("composable");
            let target = operad.op(image);
            if target.inputs != inputs || target.output != output {
                return Err(BuildError::CompositeProfile { key, image });
            }
            composition.insert(key, image);
        }
        operad.composition = composition;
        Ok(operad)
    }
}
