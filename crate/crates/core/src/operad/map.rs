use thiserror::Error;

use super::{perms_upto, Color, ColoredOperad, OpId};
use crate::perm::Perm;

/// A map of operads: images of colors and operations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperadMap {
    pub colors: Vec<Color>,
    pub ops: Vec<OpId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperadMapViolation {
    #[error("map has the wrong number of color or operation images")]
    Shape,
    #[error("image of {0:?} has the wrong profile")]
    Profile(OpId),
    #[error("unit of {0:?} is not sent to a unit")]
    Unit(Color),
    #[error("{op:?}·{perm:?} is not sent to the permuted image")]
    Symmetry { op: OpId, perm: Perm },
    #[error("composite {0:?} is not preserved")]
    Composition(Vec<OpId>),
}

impl OperadMap {
    pub fn identity(p: &ColoredOperad) -> Self {
        OperadMap { colors: p.colors().collect(), ops: p.ops().collect() }
    }

    /// The map determined by a color assignment into an operad with at most
    /// one operation per profile, when every image profile is inhabited.
    pub fn from_color_map(src: &ColoredOperad, tgt: &ColoredOperad, colors: Vec<Color>) -> Option<Self> {
        let mut ops = Vec::with_capacity(src.op_count());
        for op in src.ops() {
            let inputs: Vec<Color> = src.inputs(op).iter().map(|c| colors[c.0]).collect();
            match tgt.hom(&inputs, colors[src.output(op).0]) {
                [only] => ops.push(*only),
                _ => return None,
            }
        }
        Some(OperadMap { colors, ops })
    }

    pub fn check(&self, src: &ColoredOperad, tgt: &ColoredOperad) -> Result<(), OperadMapViolation> {
        if self.colors.len() != src.color_count() || self.ops.len() != src.op_count() {
            return Err(OperadMapViolation::Shape);
        }
        if self.colors.iter().any(|c| c.0 >= tgt.color_count()) || self.ops.iter().any(|o| o.0 >= tgt.op_count()) {
            return Err(OperadMapViolation::Shape);
        }
        for op in src.ops() {
            let image = self.ops[op.0];
            let inputs: Vec<Color> = src.inputs(op).iter().map(|c| self.colors[c.0]).collect();
            if tgt.inputs(image) != inputs.as_slice() || tgt.output(image) != self.colors[src.output(op).0] {
                return Err(OperadMapViolation::Profile(op));
            }
        }
        for c in src.colors() {
            if self.ops[src.unit(c).0] != tgt.unit(self.colors[c.0]) {
                return Err(OperadMapViolation::Unit(c));
            }
        }
        let perms = perms_upto(src.arity_cap());
        for op in src.ops() {
            for sigma in &perms[src.arity(op)] {
                if self.ops[src.act(op, sigma).0] != tgt.act(self.ops[op.0], sigma) {
                    return Err(OperadMapViolation::Symmetry { op, perm: sigma.clone() });
                }
            }
        }
        for key in src.composable_tuples() {
            let composite = src.compose(key[0], &key[1..]).expect("total composition");
            let images: Vec<OpId> = key[1..].iter().map(|q| self.ops[q.0]).collect();
            if tgt.compose(self.ops[key[0].0], &images) != Some(self.ops[composite.0]) {
                return Err(OperadMapViolation::Composition(key));
            }
        }
        Ok(())
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &OperadMap) -> OperadMap {
        OperadMap {
            colors: first.colors.iter().map(|c| self.colors[c.0]).collect(),
            ops: first.ops.iter().map(|o| self.ops[o.0]).collect(),
        }
    }
}
