//! Exhaustive enumeration of algebras with bounded carriers, as a small
//! constraint search. Symmetry equations are merged up front with union-find;
//! composition equations are propagated as entries become known.

use std::collections::HashMap;
use std::sync::Arc;

use super::algebra::{decode, encode, table_len};
use super::{block_starts, perms_upto, ColoredOperad, OpId};
use crate::operad::Algebra;
use crate::perm;

/// Every algebra whose carriers have at most `size_bound` elements (empty
/// carriers included), ordered by carrier sizes and then lexicographically
/// by action tables.
pub fn enumerate_algebras(operad: &Arc<ColoredOperad>, size_bound: usize) -> Vec<Algebra> {
    let k = operad.color_count();
    let mut out = Vec::new();
    let mut sizes = vec![0; k];
    loop {
        out.extend(Solver::new(operad, &sizes).solve());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if sizes[i] < size_bound {
                sizes[i] += 1;
                sizes[i + 1..].iter_mut().for_each(|s| *s = 0);
                break;
            }
        }
    }
}

/// Groups algebras into isomorphism classes (by brute force over carrier
/// permutations). Classes are listed in order of first member.
pub fn iso_classes(algebras: &[Algebra]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut by_key: HashMap<(Vec<usize>, Vec<Vec<usize>>), usize> = HashMap::new();
    for (i, a) in algebras.iter().enumerate() {
        let key = (a.carriers().to_vec(), canonical_tables(a));
        match by_key.get(&key) {
            Some(&c) => classes[c].push(i),
            None => {
                by_key.insert(key, classes.len());
                classes.push(vec![i]);
            }
        }
    }
    classes
}

fn canonical_tables(a: &Algebra) -> Vec<Vec<usize>> {
    let per_color: Vec<Vec<perm::Perm>> = a.carriers().iter().map(|&n| perm::all(n)).collect();
    let mut best: Option<Vec<Vec<usize>>> = None;
    let mut choice = vec![0; per_color.len()];
    loop {
        let perms: Vec<Vec<usize>> =
            choice.iter().zip(&per_color).map(|(&i, ps)| ps[i].as_slice().to_vec()).collect();
        let tables = a.relabel(&perms).tables().to_vec();
        if best.as_ref().map_or(true, |b| tables < *b) {
            best = Some(tables);
        }
        let mut i = choice.len();
        loop {
            if i == 0 {
                return best.unwrap_or_default();
            }
            i -= 1;
            if choice[i] + 1 < per_color[i].len() {
                choice[i] += 1;
                choice[i + 1..].iter_mut().for_each(|c| *c = 0);
                break;
            }
        }
    }
}

struct Constraint {
    chi: usize,
    theta: OpId,
    inners: Vec<usize>,
}

enum Trail {
    Assign(usize),
    Watch(usize),
}

struct Solver<'a> {
    operad: &'a Arc<ColoredOperad>,
    carriers: Vec<usize>,
    offsets: Vec<usize>,
    entry_op: Vec<OpId>,
    parent: Vec<usize>,
    values: Vec<Option<usize>>,
    constraints: Vec<Constraint>,
    watch: Vec<Vec<usize>>,
    trail: Vec<Trail>,
    order: Vec<usize>,
    consistent: bool,
}

impl<'a> Solver<'a> {
    fn new(operad: &'a Arc<ColoredOperad>, carriers: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(operad.op_count() + 1);
        let mut entry_op = Vec::new();
        let mut total = 0;
        for op in operad.ops() {
            offsets.push(total);
            let n = table_len(carriers, operad.inputs(op));
            entry_op.extend(std::iter::repeat(op).take(n));
            total += n;
        }
        offsets.push(total);
        let mut s = Solver {
            operad,
            carriers: carriers.to_vec(),
            offsets,
            entry_op,
            parent: (0..total).collect(),
            values: vec![None; total],
            constraints: Vec::new(),
            watch: vec![Vec::new(); total],
            trail: Vec::new(),
            order: Vec::new(),
            consistent: true,
        };
        s.merge_symmetry();
        s.fix_units();
        s.add_compositions();
        let mut order: Vec<usize> = (0..total).filter(|&e| s.find(e) == e && s.values[e].is_none()).collect();
        order.sort_by_key(|&e| (operad.arity(s.entry_op[e]), e));
        s.order = order;
        s
    }

    fn entry(&self, op: OpId, args: &[usize]) -> usize {
        self.offsets[op.0] + encode(&self.carriers, self.operad.inputs(op), args)
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn find_const(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn merge_symmetry(&mut self) {
        let p = self.operad;
        let perms = perms_upto(p.arity_cap());
        for op in p.ops() {
            for sigma in &perms[p.arity(op)] {
                let image = p.act(op, sigma);
                let inputs = p.inputs(image);
                for i in 0..table_len(&self.carriers, inputs) {
                    let args = decode(&self.carriers, inputs, i);
                    let mut b = vec![0; args.len()];
                    for (j, &a) in args.iter().enumerate() {
                        b[sigma.apply(j)] = a;
                    }
                    let (x, y) = (self.entry(image, &args), self.entry(op, &b));
                    let (rx, ry) = (self.find(x), self.find(y));
                    if rx != ry {
                        self.parent[rx.max(ry)] = rx.min(ry);
                    }
                }
            }
        }
    }

    fn fix_units(&mut self) {
        for c in self.operad.colors() {
            let u = self.operad.unit(c);
            for a in 0..self.carriers[c.0] {
                let r = self.find(self.offsets[u.0] + a);
                match self.values[r] {
                    Some(v) if v != a => self.consistent = false,
                    _ => self.values[r] = Some(a),
                }
            }
        }
    }

    fn add_compositions(&mut self) {
        let p = self.operad;
        for key in p.composable_tuples() {
            let (outer, inners) = (key[0], &key[1..]);
            if p.is_unit(outer) || inners.iter().all(|&q| p.is_unit(q)) {
                continue;
            }
            let chi_op = p.compose(outer, inners).expect("total composition");
            let starts = block_starts(inners.iter().map(|&q| p.arity(q)));
            let inputs = p.inputs(chi_op);
            for i in 0..table_len(&self.carriers, inputs) {
                let args = decode(&self.carriers, inputs, i);
                let chi = self.find(self.offsets[chi_op.0] + i);
                let inner_entries: Vec<usize> = inners
                    .iter()
                    .enumerate()
                    .map(|(j, &q)| {
                        let e = self.entry(q, &args[starts[j]..starts[j] + p.arity(q)]);
                        self.find(e)
                    })
                    .collect();
                let id = self.constraints.len();
                self.watch[chi].push(id);
                for &e in &inner_entries {
                    self.watch[e].push(id);
                }
                self.constraints.push(Constraint { chi, theta: outer, inners: inner_entries });
            }
        }
    }

    fn assign(&mut self, root: usize, v: usize, queue: &mut Vec<usize>) {
        self.values[root] = Some(v);
        self.trail.push(Trail::Assign(root));
        queue.push(root);
    }

    /// Re-examines constraint `id`; returns false on contradiction.
    fn examine(&mut self, id: usize, queue: &mut Vec<usize>) -> bool {
        let c = &self.constraints[id];
        let mut mids = Vec::with_capacity(c.inners.len());
        for &e in &c.inners {
            match self.values[e] {
                Some(v) => mids.push(v),
                None => return true,
            }
        }
        let (chi, theta) = (c.chi, c.theta);
        let rt = self.find_const(self.entry(theta, &mids));
        match (self.values[chi], self.values[rt]) {
            (Some(a), Some(b)) => a == b,
            (Some(a), None) => {
                self.assign(rt, a, queue);
                true
            }
            (None, Some(b)) => {
                self.assign(chi, b, queue);
                true
            }
            (None, None) => {
                self.watch[rt].push(id);
                self.trail.push(Trail::Watch(rt));
                true
            }
        }
    }

    fn propagate(&mut self, mut queue: Vec<usize>) -> bool {
        while let Some(root) = queue.pop() {
            let mut k = 0;
            while k < self.watch[root].len() {
                let id = self.watch[root][k];
                if !self.examine(id, &mut queue) {
                    return false;
                }
                k += 1;
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail") {
                Trail::Assign(r) => self.values[r] = None,
                Trail::Watch(r) => {
                    self.watch[r].pop();
                }
            }
        }
    }

    fn solve(mut self) -> Vec<Algebra> {
        let mut out = Vec::new();
        if !self.consistent {
            return out;
        }
        // make every constraint look at the fixed entries once
        for id in 0..self.constraints.len() {
            let mut queue = Vec::new();
            if !self.examine(id, &mut queue) || !self.propagate(queue) {
                return out;
            }
        }
        self.search(0, &mut out);
        out
    }

    fn search(&mut self, start: usize, out: &mut Vec<Algebra>) {
        let Some(pos) = (start..self.order.len()).find(|&i| self.values[self.order[i]].is_none()) else {
            out.push(self.materialize());
            return;
        };
        let root = self.order[pos];
        let domain = self.carriers[self.operad.output(self.entry_op[root]).0];
        for v in 0..domain {
            let mark = self.trail.len();
            let mut queue = Vec::new();
            self.assign(root, v, &mut queue);
            if self.propagate(queue) {
                self.search(pos + 1, out);
            }
            self.undo(mark);
        }
    }

    fn materialize(&self) -> Algebra {
        let actions = self
            .operad
            .ops()
            .map(|op| {
                (self.offsets[op.0]..self.offsets[op.0 + 1])
                    .map(|e| self.values[self.find_const(e)].expect("complete assignment"))
                    .collect()
            })
            .collect();
        let alg = Algebra::new(Arc::clone(self.operad), self.carriers.clone(), actions).expect("well-shaped tables");
        debug_assert!(alg.validate().is_ok(), "{alg:?}");
        alg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::library;

    #[test]
    fn comm_algebras_are_commutative_monoids() {
        let comm = Arc::new(library::comm(3));
        assert_eq!(enumerate_algebras(&comm, 1).len(), 1);
        let two = enumerate_algebras(&comm, 2);
        assert_eq!(two.len(), 5);
        assert_eq!(iso_classes(&two).len(), 3);
    }

    #[test]
    fn initial_operad_has_all_set_families() {
        let p = Arc::new(library::initial(2, 3));
        assert_eq!(enumerate_algebras(&p, 2).len(), 9);
    }

    #[test]
    fn every_enumerated_algebra_validates() {
        for (name, p) in library::all(3) {
            let p = Arc::new(p);
            for a in enumerate_algebras(&p, 2) {
                assert!(a.validate().is_ok(), "{name}: {a:?}");
            }
        }
    }
}
