use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{block_starts, perms_upto, Color, ColoredOperad, OpId};
use crate::perm::Perm;

/// A set-valued algebra: a finite carrier `{0, .., n-1}` per color and an
/// action table per operation. Tables are indexed in mixed radix with the
/// first input most significant.
#[derive(Clone, PartialEq, Eq)]
pub struct Algebra {
    operad: Arc<ColoredOperad>,
    carriers: Vec<usize>,
    actions: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("expected {expected} carriers, found {found}")]
    Carriers { expected: usize, found: usize },
    #[error("expected {expected} action tables, found {found}")]
    Tables { expected: usize, found: usize },
    #[error("table of {op:?} has {found} entries, expected {expected}")]
    TableSize { op: OpId, found: usize, expected: usize },
    #[error("table of {op:?} has value {value} outside its output carrier")]
    TableValue { op: OpId, value: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraViolation {
    #[error("unit {op:?} does not act as the identity")]
    Unit { op: OpId },
    #[error("action of {op:?}·{perm:?} disagrees with permuted action of {op:?} at {args:?}")]
    Symmetry { op: OpId, perm: Perm, args: Vec<usize> },
    #[error("action of composite {key:?} disagrees with composed actions at {args:?}")]
    Composition { key: Vec<OpId>, args: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraMapError {
    #[error("algebras are over different operads")]
    DifferentOperads,
    #[error("expected {expected} components, found {found}")]
    ComponentCount { found: usize, expected: usize },
    #[error("component for color {color:?} has {found} entries for a carrier of size {expected}")]
    CarrierMismatch { color: Color, found: usize, expected: usize },
    #[error("component for color {color:?} leaves the target carrier")]
    OutOfRange { color: Color },
}

pub(crate) fn table_len(carriers: &[usize], inputs: &[Color]) -> usize {
    inputs.iter().map(|c| carriers[c.0]).product()
}

pub(crate) fn encode(carriers: &[usize], inputs: &[Color], args: &[usize]) -> usize {
    let mut idx = 0;
    for (c, &a) in inputs.iter().zip(args) {
        idx = idx * carriers[c.0] + a;
    }
    idx
}

pub(crate) fn decode(carriers: &[usize], inputs: &[Color], mut idx: usize) -> Vec<usize> {
    let mut args = vec![0; inputs.len()];
    for (k, c) in inputs.iter().enumerate().rev() {
        let n = carriers[c.0];
        args[k] = idx % n;
        idx /= n;
    }
    args
}

impl Algebra {
    pub fn new(operad: Arc<ColoredOperad>, carriers: Vec<usize>, actions: Vec<Vec<usize>>) -> Result<Self, AlgebraError> {
        if carriers.len() != operad.color_count() {
            return Err(AlgebraError::Carriers { expected: operad.color_count(), found: carriers.len() });
        }
        if actions.len() != operad.op_count() {
            return Err(AlgebraError::Tables { expected: operad.op_count(), found: actions.len() });
        }
        for op in operad.ops() {
            let expected = table_len(&carriers, operad.inputs(op));
            let table = &actions[op.0];
            if table.len() != expected {
                return Err(AlgebraError::TableSize { op, found: table.len(), expected });
            }
            let bound = carriers[operad.output(op).0];
            if let Some(&value) = table.iter().find(|&&v| v >= bound) {
                return Err(AlgebraError::TableValue { op, value });
            }
        }
        Ok(Algebra { operad, carriers, actions })
    }

    /// Builds the action tables by evaluating `f` on every argument tuple.
    pub fn from_fn(
        operad: Arc<ColoredOperad>,
        carriers: Vec<usize>,
        f: impl Fn(OpId, &[usize]) -> usize,
    ) -> Result<Self, AlgebraError> {
        if carriers.len() != operad.color_count() {
            return Err(AlgebraError::Carriers { expected: operad.color_count(), found: carriers.len() });
        }
        let actions = operad
            .ops()
            .map(|op| {
                let inputs = operad.inputs(op);
                (0..table_len(&carriers, inputs)).map(|i| f(op, &decode(&carriers, inputs, i))).collect()
            })
            .collect();
        Algebra::new(operad, carriers, actions)
    }

    /// The algebra with every carrier a point.
    pub fn terminal(operad: Arc<ColoredOperad>) -> Self {
        let carriers = vec![1; operad.color_count()];
        Algebra::from_fn(operad, carriers, |_, _| 0).expect("terminal algebra")
    }

    pub fn operad(&self) -> &ColoredOperad {
        &self.operad
    }

    pub fn operad_arc(&self) -> &Arc<ColoredOperad> {
        &self.operad
    }

    pub fn carrier(&self, c: Color) -> usize {
        self.carriers[c.0]
    }

    pub fn carriers(&self) -> &[usize] {
        &self.carriers
    }

    pub fn table(&self, op: OpId) -> &[usize] {
        &self.actions[op.0]
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.actions
    }

    pub fn eval(&self, op: OpId, args: &[usize]) -> usize {
        self.actions[op.0][encode(&self.carriers, self.operad.inputs(op), args)]
    }

    /// Every argument tuple for `op`, in table order.
    pub fn arguments(&self, op: OpId) -> impl Iterator<Item = Vec<usize>> + '_ {
        let inputs = self.operad.inputs(op);
        (0..table_len(&self.carriers, inputs)).map(move |i| decode(&self.carriers, inputs, i))
    }

    pub fn validate(&self) -> Result<(), AlgebraViolation> {
        let p = &*self.operad;
        for c in p.colors() {
            let u = p.unit(c);
            if self.actions[u.0].iter().enumerate().any(|(i, &v)| i != v) {
                return Err(AlgebraViolation::Unit { op: u });
            }
        }
        let perms = perms_upto(p.arity_cap());
        for op in p.ops() {
            for sigma in &perms[p.arity(op)] {
                let image = p.act(op, sigma);
                for args in self.arguments(image) {
                    let mut b = vec![0; args.len()];
                    for (i, &a) in args.iter().enumerate() {
                        b[sigma.apply(i)] = a;
                    }
                    if self.eval(image, &args) != self.eval(op, &b) {
                        return Err(AlgebraViolation::Symmetry { op, perm: sigma.clone(), args });
                    }
                }
            }
        }
        for key in p.composable_tuples() {
            let (outer, inners) = (key[0], &key[1..]);
            let Some(composite) = p.compose(outer, inners) else { continue };
            let starts = block_starts(inners.iter().map(|&q| p.arity(q)));
            for args in self.arguments(composite) {
                let mids: Vec<usize> = inners
                    .iter()
                    .enumerate()
                    .map(|(i, &q)| self.eval(q, &args[starts[i]..starts[i] + p.arity(q)]))
                    .collect();
                if self.eval(composite, &args) != self.eval(outer, &mids) {
                    return Err(AlgebraViolation::Composition { key: key.clone(), args });
                }
            }
        }
        Ok(())
    }

    /// The algebra with carriers relabeled by `perms[c][old] = new`.
    pub fn relabel(&self, perms: &[Vec<usize>]) -> Self {
        let p = &*self.operad;
        let mut inverse: Vec<Vec<usize>> = Vec::new();
        for (c, perm) in perms.iter().enumerate() {
            let mut inv = vec![0; self.carriers[c]];
            for (old, &new) in perm.iter().enumerate() {
                inv[new] = old;
            }
            inverse.push(inv);
        }
        Algebra::from_fn(self.operad.clone(), self.carriers.clone(), |op, args| {
            let old: Vec<usize> =
                p.inputs(op).iter().zip(args).map(|(c, &a)| inverse[c.0][a]).collect();
            perms[p.output(op).0][self.eval(op, &old)]
        })
        .expect("relabeling preserves shape")
    }

    /// Serialized form: carriers and action tables.
    pub fn to_spec(&self) -> AlgebraSpec {
        AlgebraSpec { operad: self.operad.to_spec(), carriers: self.carriers.clone(), actions: self.actions.clone() }
    }

    pub fn describe(&self) -> String {
        use std::fmt::Write as _;
        let p = &*self.operad;
        let mut out = String::new();
        for c in p.colors() {
            let _ = writeln!(out, "carrier {}: {}", p.color_name(c), self.carriers[c.0]);
        }
        for op in p.ops() {
            if p.is_unit(op) {
                continue;
            }
            let entries: Vec<String> = self
                .arguments(op)
                .map(|args| format!("{:?}↦{}", args, self.eval(op, &args)))
                .collect();
            let _ = writeln!(out, "{}: {}", p.op(op).name, entries.join(" "));
        }
        out
    }
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra").field("carriers", &self.carriers).field("actions", &self.actions).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub operad: super::OperadSpec,
    pub carriers: Vec<usize>,
    pub actions: Vec<Vec<usize>>,
}

/// Checks that `components[c]: A(c) → B(c)` commutes with every action map.
pub fn algebra_map_check(components: &[Vec<usize>], a: &Algebra, b: &Algebra) -> Result<bool, AlgebraMapError> {
    if a.operad != b.operad && *a.operad != *b.operad {
        return Err(AlgebraMapError::DifferentOperads);
    }
    let p = a.operad();
    if components.len() != p.color_count() {
        return Err(AlgebraMapError::ComponentCount { found: components.len(), expected: p.color_count() });
    }
    for c in p.colors() {
        let comp = &components[c.0];
        if comp.len() != a.carrier(c) {
            return Err(AlgebraMapError::CarrierMismatch { color: c, found: comp.len(), expected: a.carrier(c) });
        }
        if comp.iter().any(|&v| v >= b.carrier(c)) {
            return Err(AlgebraMapError::OutOfRange { color: c });
        }
    }
    for op in p.ops() {
        let inputs = p.inputs(op);
        for args in a.arguments(op) {
            let mapped: Vec<usize> = inputs.iter().zip(&args).map(|(c, &x)| components[c.0][x]).collect();
            if components[p.output(op).0][a.eval(op, &args)] != b.eval(op, &mapped) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::library;

    fn max_monoid() -> Algebra {
        let comm = Arc::new(library::comm(3));
        Algebra::from_fn(comm, vec![2], |_, args| args.iter().copied().max().unwrap_or(0)).unwrap()
    }

    #[test]
    fn max_monoid_is_an_algebra() {
        max_monoid().validate().unwrap();
    }

    #[test]
    fn non_associative_table_rejected() {
        let comm = Arc::new(library::comm(3));
        // x·y = 1 - x on a two-element set is not commutative
        let bad = Algebra::from_fn(comm, vec![2], |op, args| match args.len() {
            0 => 0,
            1 => args[0],
            _ => {
                let _ = op;
                1 - args[0]
            }
        })
        .unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn algebra_maps_on_max_monoid() {
        let a = max_monoid();
        assert_eq!(algebra_map_check(&[vec![0, 1]], &a, &a), Ok(true));
        // constant at 1 misses the unit 0
        assert_eq!(algebra_map_check(&[vec![1, 1]], &a, &a), Ok(false));
        let t = Algebra::terminal(a.operad_arc().clone());
        assert_eq!(algebra_map_check(&[vec![0]], &t, &t), Ok(true));
        assert!(matches!(algebra_map_check(&[vec![0]], &a, &a), Err(AlgebraMapError::CarrierMismatch { .. })));
    }

    #[test]
    fn relabel_swaps_roles() {
        let a = max_monoid();
        let b = a.relabel(&[vec![1, 0]]);
        b.validate().unwrap();
        assert_eq!(b.eval(OpId(2), &[0, 1]), 0);
        assert_eq!(algebra_map_check(&[vec![1, 0]], &a, &b), Ok(true));
    }
}
