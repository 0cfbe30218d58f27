use std::collections::HashMap;
use std::fmt;

use super::{block_permutation, block_starts, block_sum, perms_upto, ColoredOperad, OpId};
use crate::perm::Perm;

/// One failed axiom instance. `suspects` lists the composition-table keys the
/// failing identity was computed from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    SymmetryProfile { op: OpId, perm: Perm },
    SymmetryAction { op: OpId, first: Perm, second: Perm },
    LeftUnit { op: OpId },
    RightUnit { op: OpId },
    Associativity { outer: OpId, middle: Vec<OpId>, inner: Vec<OpId>, suspects: Vec<Vec<OpId>> },
    EquivarianceOuter { outer: OpId, perm: Perm, inners: Vec<OpId>, suspects: Vec<Vec<OpId>> },
    EquivarianceInner { outer: OpId, inners: Vec<OpId>, perms: Vec<Perm>, suspects: Vec<Vec<OpId>> },
    MissingComposite(Vec<OpId>),
}

impl Violation {
    pub fn suspects(&self) -> Vec<Vec<OpId>> {
        match self {
            Violation::Associativity { suspects, .. }
            | Violation::EquivarianceOuter { suspects, .. }
            | Violation::EquivarianceInner { suspects, .. } => suspects.clone(),
            Violation::MissingComposite(k) => vec![k.clone()],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SymmetryProfile { op, perm } => write!(f, "{op:?}·{perm:?} has the wrong profile"),
            Violation::SymmetryAction { op, first, second } => {
                write!(f, "({op:?}·{first:?})·{second:?} ≠ {op:?}·({first:?}∘{second:?})")
            }
            Violation::LeftUnit { op } => write!(f, "γ(1; {op:?}) ≠ {op:?}"),
            Violation::RightUnit { op } => write!(f, "γ({op:?}; 1, .., 1) ≠ {op:?}"),
            Violation::Associativity { outer, middle, inner, .. } => {
                write!(f, "associativity fails for outer {outer:?}, middle {middle:?}, inner {inner:?}")
            }
            Violation::EquivarianceOuter { outer, perm, inners, .. } => {
                write!(f, "γ({outer:?}·{perm:?}; {inners:?}) is not the permuted composite")
            }
            Violation::EquivarianceInner { outer, inners, perms, .. } => {
                write!(f, "γ({outer:?}; {inners:?} acted on by {perms:?}) is not the permuted composite")
            }
            Violation::MissingComposite(k) => write!(f, "composite missing for {k:?}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// The composition-table key implicated in the most violations.
    pub fn prime_suspect(&self) -> Option<Vec<OpId>> {
        let mut counts: HashMap<Vec<OpId>, usize> = HashMap::new();
        for v in &self.violations {
            let mut s = v.suspects();
            s.sort();
            s.dedup();
            for k in s {
                *counts.entry(k).or_default() += 1;
            }
        }
        counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(k, _)| k)
    }
}

struct Recorder<'a> {
    operad: &'a ColoredOperad,
    used: Vec<Vec<OpId>>,
}

impl Recorder<'_> {
    fn compose(&mut self, outer: OpId, inners: &[OpId]) -> Option<OpId> {
        let mut key = vec![outer];
        key.extend_from_slice(inners);
        self.used.push(key);
        self.operad.compose(outer, inners)
    }
}

impl ColoredOperad {
    /// Checks symmetry, unit, associativity and both equivariance laws on
    /// every instance within the arity cap.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let perms = perms_upto(self.arity_cap());
        self.check_symmetry(&perms, &mut violations);
        let tuples = self.composable_tuples();
        for key in &tuples {
            if self.compose(key[0], &key[1..]).is_none() {
                violations.push(Violation::MissingComposite(key.clone()));
            }
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }
        for op in self.ops() {
            if self.compose(self.unit(self.output(op)), &[op]) != Some(op) {
                violations.push(Violation::LeftUnit { op });
            }
            let units: Vec<OpId> = self.inputs(op).iter().map(|&c| self.unit(c)).collect();
            if self.compose(op, &units) != Some(op) {
                violations.push(Violation::RightUnit { op });
            }
        }
        for key in &tuples {
            self.check_associativity(key, &mut violations);
            self.check_outer_equivariance(key, &perms, &mut violations);
            self.check_inner_equivariance(key, &perms, &mut violations);
        }
        ValidationReport { violations }
    }

    fn check_symmetry(&self, perms: &[Vec<Perm>], out: &mut Vec<Violation>) {
        for op in self.ops() {
            let n = self.arity(op);
            for sigma in &perms[n] {
                let image = self.act(op, sigma);
                if self.output(image) != self.output(op) || self.inputs(image) != sigma.permute(self.inputs(op)) {
                    out.push(Violation::SymmetryProfile { op, perm: sigma.clone() });
                }
            }
            for sigma in &perms[n] {
                for tau in &perms[n] {
                    if self.act(self.act(op, sigma), tau) != self.act(op, &sigma.compose(tau)) {
                        out.push(Violation::SymmetryAction { op, first: sigma.clone(), second: tau.clone() });
                    }
                }
            }
        }
    }

    fn check_associativity(&self, key: &[OpId], out: &mut Vec<Violation>) {
        let (outer, middle) = (key[0], &key[1..]);
        let total: usize = middle.iter().map(|&p| self.arity(p)).sum();
        let colors: Vec<_> = middle.iter().flat_map(|&p| self.inputs(p).iter().copied()).collect();
        let mut inner = Vec::with_capacity(total);
        self.each_inner_tuple(&colors, 0, 0, &mut inner, &mut |inner| {
            let mut rec = Recorder { operad: self, used: Vec::new() };
            let left = rec.compose(outer, middle).and_then(|m| rec.compose(m, inner));
            let starts = block_starts(middle.iter().map(|&p| self.arity(p)));
            let mut parts = Vec::with_capacity(middle.len());
            for (i, &p) in middle.iter().enumerate() {
                let block = &inner[starts[i]..starts[i] + self.arity(p)];
                parts.push(rec.compose(p, block));
            }
            let right = parts.into_iter().collect::<Option<Vec<_>>>().and_then(|ps| rec.compose(outer, &ps));
            if left.is_none() || left != right {
                out.push(Violation::Associativity {
                    outer,
                    middle: middle.to_vec(),
                    inner: inner.to_vec(),
                    suspects: rec.used,
                });
            }
        });
    }

    /// Calls `f` on every tuple of operations with the given output colors
    /// whose total arity, added to `arity`, stays within the cap.
    fn each_inner_tuple(
        &self,
        colors: &[super::Color],
        slot: usize,
        arity: usize,
        current: &mut Vec<OpId>,
        f: &mut impl FnMut(&[OpId]),
    ) {
        if slot == colors.len() {
            f(current);
            return;
        }
        for &p in self.ops_into(colors[slot]) {
            let a = arity + self.arity(p);
            if a > self.arity_cap() {
                continue;
            }
            current.push(p);
            self.each_inner_tuple(colors, slot + 1, a, current, f);
            current.pop();
        }
    }

    fn check_outer_equivariance(&self, key: &[OpId], perms: &[Vec<Perm>], out: &mut Vec<Violation>) {
        // key = [φ·σ-shaped outer, ψ_0..] is read as a composite with outer φ·σ
        // for every σ with φ = (outer)·σ⁻¹.
        let (outer, inners) = (key[0], &key[1..]);
        let k = inners.len();
        let arities: Vec<usize> = inners.iter().map(|&p| self.arity(p)).collect();
        for sigma in &perms[k] {
            if sigma.is_identity() {
                continue;
            }
            let inv = sigma.inverse();
            let phi = self.act(outer, &inv);
            let mut rec = Recorder { operad: self, used: Vec::new() };
            let left = rec.compose(outer, inners);
            let reordered: Vec<OpId> = (0..k).map(|j| inners[inv.apply(j)]).collect();
            let tau = block_permutation(sigma, &arities);
            let right = rec.compose(phi, &reordered).map(|c| self.act(c, &tau));
            // `outer = φ·σ` since the action is a group action
            if left.is_none() || left != right {
                out.push(Violation::EquivarianceOuter {
                    outer: phi,
                    perm: sigma.clone(),
                    inners: inners.to_vec(),
                    suspects: rec.used,
                });
            }
        }
    }

    fn check_inner_equivariance(&self, key: &[OpId], perms: &[Vec<Perm>], out: &mut Vec<Violation>) {
        let (outer, inners) = (key[0], &key[1..]);
        let mut chosen: Vec<Perm> = Vec::with_capacity(inners.len());
        self.each_perm_family(inners, perms, &mut chosen, &mut |taus| {
            if taus.iter().all(Perm::is_identity) {
                return;
            }
            let acted: Vec<OpId> = inners.iter().zip(taus).map(|(&p, t)| self.act(p, t)).collect();
            let mut rec = Recorder { operad: self, used: Vec::new() };
            let left = rec.compose(outer, &acted);
            let right = rec.compose(outer, inners).map(|c| self.act(c, &block_sum(taus)));
            if left.is_none() || left != right {
                out.push(Violation::EquivarianceInner {
                    outer,
                    inners: inners.to_vec(),
                    perms: taus.to_vec(),
                    suspects: rec.used,
                });
            }
        });
    }

    fn each_perm_family(
        &self,
        inners: &[OpId],
        perms: &[Vec<Perm>],
        chosen: &mut Vec<Perm>,
        f: &mut impl FnMut(&[Perm]),
    ) {
        if chosen.len() == inners.len() {
            f(chosen);
            return;
        }
        for p in &perms[self.arity(inners[chosen.len()])] {
            chosen.push(p.clone());
            self.each_perm_family(inners, perms, chosen, f);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::library;

    #[test]
    fn library_operads_validate() {
        for (name, p) in library::all(3) {
            let report = p.validate();
            assert!(report.is_valid(), "{name}: {:?}", report.violations.first().map(|v| v.to_string()));
        }
        assert!(library::ass(3).validate().is_valid());
        assert!(library::comm(4).validate().is_valid());
    }

    #[test]
    fn corrupted_associativity_entry_is_pinpointed() {
        let ass = library::ass(3);
        // γ(x0·x1; x0·x1, 1): swap the result for the other binary-into-ternary word
        let binary: Vec<OpId> = ass.ops().filter(|&o| ass.arity(o) == 2).collect();
        let (mu, unit) = (binary[0], ass.unit(crate::operad::Color(0)));
        let key = vec![mu, mu, unit];
        let good = ass.compose(mu, &[mu, unit]).unwrap();
        let wrong = ass.ops().find(|&o| ass.arity(o) == 3 && o != good).unwrap();
        let mut spec = ass.to_spec();
        for entry in &mut spec.composition {
            if entry.len() == 4 && entry[..3] == [mu.0, mu.0, unit.0] {
                entry[3] = wrong.0;
            }
        }
        let corrupted = crate::operad::ColoredOperad::from_spec(&spec).unwrap();
        let report = corrupted.validate();
        assert!(!report.is_valid());
        assert!(report.violations.iter().all(|v| v.suspects().contains(&key)));
        assert_eq!(report.prime_suspect(), Some(key));
    }
}
