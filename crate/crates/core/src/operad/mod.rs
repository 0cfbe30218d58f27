//! Finite colored symmetric operads with explicit symmetry and composition
//! tables, truncated at an arity cap.
//!
//! Symmetric groups act on the right: `φ·σ` has inputs
//! `(c_{σ(0)}, .., c_{σ(n-1)})` when `φ` has inputs `(c_0, .., c_{n-1})`.
//! Composition `γ(θ; φ_0, .., φ_{k-1})` lists the inputs block by block.

mod algebra;
mod builder;
mod enumerate;
pub mod library;
mod map;
mod spec;
mod validate;

pub use algebra::{algebra_map_check, Algebra, AlgebraError, AlgebraMapError, AlgebraSpec, AlgebraViolation};
pub use builder::{BuildError, OperadBuilder};
pub use enumerate::{enumerate_algebras, iso_classes};
pub use map::{OperadMap, OperadMapViolation};
pub use spec::{OperadSpec, OperationSpec, SpecError};
pub use validate::{ValidationReport, Violation};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::perm::{self, Perm};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Color(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpId(pub usize);

impl fmt::Debug for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Debug for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "φ{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Operation {
    pub name: String,
    pub inputs: Vec<Color>,
    pub output: Color,
}

impl Operation {
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
}

pub const DEFAULT_ARITY_CAP: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredOperad {
    color_names: Vec<String>,
    ops: Vec<Operation>,
    profiles: HashMap<(Vec<Color>, Color), Vec<OpId>>,
    into: Vec<Vec<OpId>>,
    units: Vec<OpId>,
    // symmetry[op][rank(σ)] = op·σ
    symmetry: Vec<Vec<OpId>>,
    // [outer, inner_0, ..] ↦ composite
    composition: HashMap<Vec<OpId>, OpId>,
    arity_cap: usize,
}

impl ColoredOperad {
    pub(crate) fn from_parts(
        color_names: Vec<String>,
        ops: Vec<Operation>,
        units: Vec<OpId>,
        symmetry: Vec<Vec<OpId>>,
        composition: HashMap<Vec<OpId>, OpId>,
        arity_cap: usize,
    ) -> Self {
        let mut profiles: HashMap<(Vec<Color>, Color), Vec<OpId>> = HashMap::new();
        let mut into = vec![Vec::new(); color_names.len()];
        for (i, op) in ops.iter().enumerate() {
            profiles.entry((op.inputs.clone(), op.output)).or_default().push(OpId(i));
            into[op.output.0].push(OpId(i));
        }
        ColoredOperad { color_names, ops, profiles, into, units, symmetry, composition, arity_cap }
    }

    pub fn color_count(&self) -> usize {
        self.color_names.len()
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> {
        (0..self.color_names.len()).map(Color)
    }

    pub fn color_name(&self, c: Color) -> &str {
        &self.color_names[c.0]
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> impl Iterator<Item = OpId> {
        (0..self.ops.len()).map(OpId)
    }

    pub fn op(&self, id: OpId) -> &Operation {
        &self.ops[id.0]
    }

    pub fn arity(&self, id: OpId) -> usize {
        self.ops[id.0].inputs.len()
    }

    pub fn inputs(&self, id: OpId) -> &[Color] {
        &self.ops[id.0].inputs
    }

    pub fn output(&self, id: OpId) -> Color {
        self.ops[id.0].output
    }

    pub fn unit(&self, c: Color) -> OpId {
        self.units[c.0]
    }

    pub fn is_unit(&self, id: OpId) -> bool {
        self.arity(id) == 1 && self.units[self.output(id).0] == id
    }

    pub fn arity_cap(&self) -> usize {
        self.arity_cap
    }

    /// Operations with the given inputs and output.
    pub fn hom(&self, inputs: &[Color], output: Color) -> &[OpId] {
        // HashMap lookup needs an owned key; profiles are short.
        self.profiles.get(&(inputs.to_vec(), output)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Operations with the given output.
    pub fn ops_into(&self, c: Color) -> &[OpId] {
        &self.into[c.0]
    }

    /// Largest number of operations sharing one profile.
    pub fn max_hom_size(&self) -> usize {
        self.profiles.values().map(Vec::len).max().unwrap_or(0)
    }

    /// `op·σ`.
    pub fn act(&self, op: OpId, sigma: &Perm) -> OpId {
        self.symmetry[op.0][sigma.rank()]
    }

    /// `γ(outer; inners)`, or `None` when the inputs do not match or the
    /// composite would exceed the arity cap.
    pub fn compose(&self, outer: OpId, inners: &[OpId]) -> Option<OpId> {
        let mut key = Vec::with_capacity(inners.len() + 1);
        key.push(outer);
        key.extend_from_slice(inners);
        self.composition.get(&key).copied()
    }

    pub(crate) fn composition_table(&self) -> &HashMap<Vec<OpId>, OpId> {
        &self.composition
    }

    pub(crate) fn symmetry_table(&self) -> &[Vec<OpId>] {
        &self.symmetry
    }

    /// Profile a composite must have.
    pub fn composite_profile(&self, outer: OpId, inners: &[OpId]) -> Option<(Vec<Color>, Color)> {
        let o = self.op(outer);
        if o.inputs.len() != inners.len() {
            return None;
        }
        let mut inputs = Vec::new();
        for (c, &p) in o.inputs.iter().zip(inners) {
            if self.output(p) != *c {
                return None;
            }
            inputs.extend_from_slice(self.inputs(p));
        }
        Some((inputs, o.output))
    }

    /// Every composable `(outer, inners)` whose composite stays within the
    /// arity cap, in a deterministic order.
    pub fn composable_tuples(&self) -> Vec<Vec<OpId>> {
        let mut out = Vec::new();
        for outer in self.ops() {
            let mut current = vec![outer];
            self.extend_tuples(outer, 0, 0, &mut current, &mut out);
        }
        out
    }

    fn extend_tuples(&self, outer: OpId, slot: usize, arity: usize, current: &mut Vec<OpId>, out: &mut Vec<Vec<OpId>>) {
        let inputs = self.inputs(outer);
        if slot == inputs.len() {
            out.push(current.clone());
            return;
        }
        for &p in self.ops_into(inputs[slot]) {
            let a = arity + self.arity(p);
            if a > self.arity_cap {
                continue;
            }
            current.push(p);
            self.extend_tuples(outer, slot + 1, a, current, out);
            current.pop();
        }
    }

    /// Operations grouped into symmetric-group orbits; each orbit is listed
    /// once, led by its least id.
    pub fn orbits(&self) -> Vec<Vec<OpId>> {
        let mut seen = vec![false; self.op_count()];
        let mut out = Vec::new();
        for op in self.ops() {
            if seen[op.0] {
                continue;
            }
            let mut orbit: Vec<OpId> = self.symmetry[op.0].clone();
            orbit.sort_unstable();
            orbit.dedup();
            for o in &orbit {
                seen[o.0] = true;
            }
            out.push(orbit);
        }
        out
    }

    /// The operad with colors and operations renamed, keeping ids.
    pub fn renamed(&self, colors: impl Fn(Color, &str) -> String, ops: impl Fn(OpId, &str) -> String) -> Self {
        let mut out = self.clone();
        out.color_names = self.colors().map(|c| colors(c, self.color_name(c))).collect();
        for (i, op) in out.ops.iter_mut().enumerate() {
            op.name = ops(OpId(i), &self.ops[i].name);
        }
        out
    }

    /// Relabels colors and operations along bijections `color_perm[old] = new`
    /// and `op_perm[old] = new`.
    pub fn relabel(&self, color_perm: &[usize], op_perm: &[usize]) -> Self {
        let mut color_names = vec![String::new(); self.color_count()];
        for c in self.colors() {
            color_names[color_perm[c.0]] = self.color_names[c.0].clone();
        }
        let nc = |c: Color| Color(color_perm[c.0]);
        let no = |o: OpId| OpId(op_perm[o.0]);
        let mut ops = vec![
            Operation { name: String::new(), inputs: Vec::new(), output: Color(0) };
            self.op_count()
        ];
        let mut symmetry = vec![Vec::new(); self.op_count()];
        for o in self.ops() {
            let op = self.op(o);
            ops[no(o).0] =
                Operation { name: op.name.clone(), inputs: op.inputs.iter().map(|&c| nc(c)).collect(), output: nc(op.output) };
            symmetry[no(o).0] = self.symmetry[o.0].iter().map(|&x| no(x)).collect();
        }
        let mut units = vec![OpId(0); self.color_count()];
        for c in self.colors() {
            units[nc(c).0] = no(self.unit(c));
        }
        let composition = self
            .composition
            .iter()
            .map(|(k, &v)| (k.iter().map(|&o| no(o)).collect(), no(v)))
            .collect();
        ColoredOperad::from_parts(color_names, ops, units, symmetry, composition, self.arity_cap)
    }

    /// Disjoint union: colors and operations of `self` first, then `other`.
    pub fn coproduct(&self, other: &ColoredOperad) -> Self {
        let (nc, no) = (self.color_count(), self.op_count());
        let mut color_names = self.color_names.clone();
        color_names.extend(other.color_names.iter().cloned());
        let mut ops = self.ops.clone();
        ops.extend(other.ops.iter().map(|op| Operation {
            name: op.name.clone(),
            inputs: op.inputs.iter().map(|c| Color(c.0 + nc)).collect(),
            output: Color(op.output.0 + nc),
        }));
        let mut units = self.units.clone();
        units.extend(other.units.iter().map(|o| OpId(o.0 + no)));
        let mut symmetry = self.symmetry.clone();
        symmetry.extend(other.symmetry.iter().map(|row| row.iter().map(|o| OpId(o.0 + no)).collect()));
        let mut composition = self.composition.clone();
        for (k, v) in &other.composition {
            composition.insert(k.iter().map(|o| OpId(o.0 + no)).collect(), OpId(v.0 + no));
        }
        ColoredOperad::from_parts(
            color_names,
            ops,
            units,
            symmetry,
            composition,
            self.arity_cap.max(other.arity_cap),
        )
    }

    /// Human-readable listing of colors and operations.
    pub fn describe(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let names: Vec<&str> = self.color_names.iter().map(String::as_str).collect();
        let _ = writeln!(out, "colors: {}", names.join(", "));
        for o in self.ops() {
            let op = self.op(o);
            let ins: Vec<&str> = op.inputs.iter().map(|c| self.color_name(*c)).collect();
            let _ = writeln!(out, "  {}: ({}) -> {}", op.name, ins.join(", "), self.color_name(op.output));
        }
        out
    }
}

/// Block layout of a composite: `starts[i]` is the position of the first
/// input of the `i`-th inner operation.
pub(crate) fn block_starts(arities: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut acc = 0;
    for a in arities {
        starts.push(acc);
        acc += a;
    }
    starts
}

/// The permutation `τ` with `γ(φ·σ; ψ) = γ(φ; ψ_{σ⁻¹(·)})·τ`, given the arities
/// of `ψ` in the order they are plugged into `φ·σ`.
pub(crate) fn block_permutation(sigma: &Perm, arities: &[usize]) -> Perm {
    let k = sigma.len();
    let inv = sigma.inverse();
    let rhs_arities: Vec<usize> = (0..k).map(|j| arities[inv.apply(j)]).collect();
    let rhs_starts = block_starts(rhs_arities);
    let mut tau = Vec::new();
    for i in 0..k {
        for r in 0..arities[i] {
            tau.push(rhs_starts[sigma.apply(i)] + r);
        }
    }
    Perm::from_vec(tau).expect("block permutation")
}

/// `τ_0 ⊕ .. ⊕ τ_{k-1}` acting blockwise.
pub(crate) fn block_sum(taus: &[Perm]) -> Perm {
    let starts = block_starts(taus.iter().map(Perm::len));
    let mut out = Vec::new();
    for (t, s) in taus.iter().zip(starts) {
        out.extend(t.as_slice().iter().map(|&x| x + s));
    }
    Perm::from_vec(out).expect("block sum")
}

pub(crate) fn perms_upto(cap: usize) -> Vec<Vec<Perm>> {
    (0..=cap).map(perm::all).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_permutation_swaps_blocks() {
        // φ·(01) with ψ_0 of arity 2 and ψ_1 of arity 1: blocks trade places
        let sigma = Perm::from_vec(vec![1, 0]).unwrap();
        let tau = block_permutation(&sigma, &[2, 1]);
        assert_eq!(tau.as_slice(), &[1, 2, 0]);
    }

    #[test]
    fn composable_tuples_respect_cap() {
        let comm = library::comm(3);
        for t in comm.composable_tuples() {
            let arity: usize = t[1..].iter().map(|&o| comm.arity(o)).sum();
            assert!(arity <= 3);
        }
    }
}
