use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::{Forest, Vertex};
use crate::grothendieck::OperadicLeftFibration;
use crate::operad::{Color, ColoredOperad, OpId};
use crate::perm::Perm;

/// A map from the operad of a forest: a color per edge and an operation per
/// vertex, whose inputs are the colors of the vertex inputs in their listed
/// order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decoration {
    pub colors: Vec<Color>,
    pub ops: Vec<OpId>,
}

/// All decorations of `forest` by `operad`. The empty forest has exactly
/// one.
pub fn decorations(operad: &ColoredOperad, forest: &Forest) -> Vec<Decoration> {
    let leaves = forest.leaves();
    let order = forest.bottom_up();
    let mut out = Vec::new();
    let mut colors = vec![Color(0); forest.edge_count()];
    let mut ops = vec![OpId(0); forest.vertex_count()];
    fill_leaves(operad, forest, &leaves, &order, 0, &mut colors, &mut ops, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn fill_leaves(
    operad: &ColoredOperad,
    forest: &Forest,
    leaves: &[usize],
    order: &[usize],
    k: usize,
    colors: &mut Vec<Color>,
    ops: &mut Vec<OpId>,
    out: &mut Vec<Decoration>,
) {
    if k == leaves.len() {
        fill_vertices(operad, forest, order, 0, colors, ops, out);
        return;
    }
    for c in operad.colors() {
        colors[leaves[k]] = c;
        fill_leaves(operad, forest, leaves, order, k + 1, colors, ops, out);
    }
}

fn fill_vertices(
    operad: &ColoredOperad,
    forest: &Forest,
    order: &[usize],
    k: usize,
    colors: &mut Vec<Color>,
    ops: &mut Vec<OpId>,
    out: &mut Vec<Decoration>,
) {
    let Some(&v) = order.get(k) else {
        out.push(Decoration { colors: colors.clone(), ops: ops.clone() });
        return;
    };
    let Vertex { inputs, output } = &forest.vertices()[v];
    let in_colors: Vec<Color> = inputs.iter().map(|&e| colors[e]).collect();
    for c in operad.colors() {
        for &op in operad.hom(&in_colors, c) {
            colors[*output] = c;
            ops[v] = op;
            fill_vertices(operad, forest, order, k + 1, colors, ops, out);
        }
    }
}

/// The composite of the decorated subtree of `forest` with root `root` and
/// leaves `leaves`, with inputs in the order of `leaves`. `None` when there
/// is no such subtree or the composite passes the arity cap.
pub fn subtree_composite(
    operad: &ColoredOperad,
    forest: &Forest,
    decoration: &Decoration,
    root: usize,
    leaves: &[usize],
) -> Option<OpId> {
    let wanted: BTreeSet<usize> = leaves.iter().copied().collect();
    if wanted.len() != leaves.len() {
        return None;
    }
    fn eval(
        operad: &ColoredOperad,
        forest: &Forest,
        d: &Decoration,
        e: usize,
        wanted: &BTreeSet<usize>,
    ) -> Option<(OpId, Vec<usize>)> {
        if wanted.contains(&e) {
            return Some((operad.unit(d.colors[e]), vec![e]));
        }
        let v = forest.producer(e)?;
        let mut inners = Vec::new();
        let mut order = Vec::new();
        for &i in &forest.vertices()[v].inputs {
            let (op, leaves) = eval(operad, forest, d, i, wanted)?;
            inners.push(op);
            order.extend(leaves);
        }
        Some((operad.compose(d.ops[v], &inners)?, order))
    }
    let (op, order) = eval(operad, forest, decoration, root, &wanted)?;
    if order.len() != leaves.len() {
        return None;
    }
    let sigma: Vec<usize> = leaves.iter().map(|l| order.iter().position(|o| o == l).unwrap()).collect();
    let sigma = Perm::from_vec(sigma)?;
    Some(if sigma.is_identity() { op } else { operad.act(op, &sigma) })
}

/// Restriction of a decoration of `tgt` along a forest map `src → tgt`.
pub fn pull_back(
    operad: &ColoredOperad,
    tgt: &Forest,
    decoration: &Decoration,
    src: &Forest,
    map: &[usize],
) -> Option<Decoration> {
    let colors = map.iter().map(|&e| decoration.colors[e]).collect();
    let ops = src
        .vertices()
        .iter()
        .map(|v| {
            let leaves: Vec<usize> = v.inputs.iter().map(|&e| map[e]).collect();
            subtree_composite(operad, tgt, decoration, map[v.output], &leaves)
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Decoration { colors, ops })
}

/// The sub-forest on a set of edges, keeping the vertices all of whose edges
/// are kept, except `drop`. Returns the forest and the old index of each new
/// edge.
fn restrict(forest: &Forest, keep: &BTreeSet<usize>, drop: Option<usize>) -> (Forest, Vec<usize>) {
    let old: Vec<usize> = keep.iter().copied().collect();
    let new: HashMap<usize, usize> = old.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let vertices = forest
        .vertices()
        .iter()
        .enumerate()
        .filter(|&(i, v)| Some(i) != drop && keep.contains(&v.output) && v.inputs.iter().all(|e| keep.contains(e)))
        .map(|(_, v)| v)
        .map(|v| Vertex { inputs: v.inputs.iter().map(|e| new[e]).collect(), output: new[&v.output] })
        .collect();
    let labels = old.iter().map(|&e| forest.label(e).to_string()).collect();
    (Forest::new(labels, vertices).expect("restriction of a forest"), old)
}

fn edges_above(forest: &Forest, e: usize, out: &mut BTreeSet<usize>) {
    out.insert(e);
    if let Some(v) = forest.producer(e) {
        for &i in &forest.vertices()[v].inputs {
            edges_above(forest, i, out);
        }
    }
}

/// For each inner edge `e`: the number of decorations of the forest, and
/// the size of the fiber product over the color of `e` of decorations of
/// the part above `e` and the part below it.
pub fn segal_counts(operad: &ColoredOperad, forest: &Forest) -> Vec<(usize, usize, usize)> {
    let whole = decorations(operad, forest).len();
    forest
        .inner_edges()
        .into_iter()
        .map(|e| {
            let mut above = BTreeSet::new();
            edges_above(forest, e, &mut above);
            let below: BTreeSet<usize> =
                (0..forest.edge_count()).filter(|x| *x == e || !above.contains(x)).collect();
            let (up, up_old) = restrict(forest, &above, None);
            let (down, down_old) = restrict(forest, &below, forest.producer(e));
            let up_at = up_old.iter().position(|&x| x == e).unwrap();
            let down_at = down_old.iter().position(|&x| x == e).unwrap();
            let mut upper: HashMap<Color, usize> = HashMap::new();
            for d in decorations(operad, &up) {
                *upper.entry(d.colors[up_at]).or_default() += 1;
            }
            let fibered =
                decorations(operad, &down).iter().map(|d| upper.get(&d.colors[down_at]).copied().unwrap_or(0)).sum();
            (e, whole, fibered)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{forest}: {extensions} extensions of {leaf_lift:?} over {base:?}")]
pub struct LLocalFailure {
    pub forest: String,
    pub base: Decoration,
    pub leaf_lift: Vec<Color>,
    pub extensions: usize,
}

/// Leaf lifts and extension counts (capped at 2) for one forest. Returns the
/// first failure, and whether the fiber product of leaf lifts and base
/// decorations is inhabited.
fn l_local_forest(fib: &OperadicLeftFibration, forest: &Forest) -> (Option<LLocalFailure>, bool) {
    let base = fib.base();
    let total = fib.total();
    let leaves = forest.leaves();
    let order = forest.bottom_up();
    let mut inhabited = false;
    for x in decorations(base, forest) {
        let fibers: Vec<&[Color]> = leaves.iter().map(|&e| fib.fiber(x.colors[e])).collect();
        if fibers.iter().any(|f| f.is_empty()) {
            continue;
        }
        inhabited = true;
        let mut idx = vec![0usize; leaves.len()];
        loop {
            let lift: Vec<Color> = idx.iter().zip(&fibers).map(|(&i, f)| f[i]).collect();
            let mut colors = vec![Color(0); forest.edge_count()];
            for (&e, &c) in leaves.iter().zip(&lift) {
                colors[e] = c;
            }
            let n = count_extensions(fib, total, forest, &x, &order, 0, &mut colors);
            if n != 1 {
                let fail = LLocalFailure { forest: forest.to_string(), base: x, leaf_lift: lift, extensions: n };
                return (Some(fail), true);
            }
            if !advance(&mut idx, &fibers) {
                break;
            }
        }
    }
    (None, inhabited)
}

/// Steps an odometer over the product of `fibers`; false after the last.
fn advance(idx: &mut [usize], fibers: &[&[Color]]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < fibers[k].len() {
            return true;
        }
        idx[k] = 0;
    }
    false
}

fn count_extensions(
    fib: &OperadicLeftFibration,
    total: &ColoredOperad,
    forest: &Forest,
    x: &Decoration,
    order: &[usize],
    k: usize,
    colors: &mut Vec<Color>,
) -> usize {
    let Some(&v) = order.get(k) else { return 1 };
    let vert = &forest.vertices()[v];
    let inputs: Vec<Color> = vert.inputs.iter().map(|&e| colors[e]).collect();
    let mut n = 0;
    for &o in fib.lifts(x.ops[v], &inputs) {
        colors[vert.output] = total.output(o);
        n += count_extensions(fib, total, forest, x, order, k + 1, colors);
        if n >= 2 {
            return 2;
        }
    }
    n
}

/// Unique extension along leaf inclusions for the nerve of `fib`: for every
/// forest, every decoration by the base and every lift of its leaf colors,
/// exactly one decoration by the total operad lies over both. Forests with
/// more than one tree are decided from their trees, since nerves send
/// disjoint unions to products; `direct` forces the check on the whole
/// forest instead. Returns the number of forests checked.
pub fn l_local_check(fib: &OperadicLeftFibration, forests: &[Forest], direct: bool) -> Result<usize, LLocalFailure> {
    let mut memo: HashMap<String, (Option<LLocalFailure>, bool)> = HashMap::new();
    for forest in forests {
        if direct || forest.roots().len() <= 1 {
            if let (Some(fail), _) = l_local_forest(fib, forest) {
                return Err(fail);
            }
            continue;
        }
        let mut first_failure = None;
        let mut all_inhabited = true;
        for tree in forest.trees() {
            let key = tree.forest().to_string();
            let (fail, inhabited) =
                memo.entry(key).or_insert_with(|| l_local_forest(fib, tree.forest())).clone();
            all_inhabited &= inhabited;
            if first_failure.is_none() {
                first_failure = fail;
            }
        }
        if let (Some(mut fail), true) = (first_failure, all_inhabited) {
            fail.forest = forest.to_string();
            return Err(fail);
        }
    }
    Ok(forests.len())
}

#[cfg(test)]
mod tests {
    use super::super::{enumerate_forest_codes, enumerate_tree_codes, Tree};
    use super::*;
    use std::sync::Arc;
    use crate::grothendieck::{chaotic_operad, unstraighten};
    use crate::operad::library;
    use crate::operad::{Algebra, OperadMap};

    #[test]
    fn empty_forest_has_one_decoration() {
        assert_eq!(decorations(&library::comm2(3), &Forest::empty()).len(), 1);
    }

    #[test]
    fn comm_decorates_every_tree_once() {
        let p = library::comm(3);
        for code in enumerate_tree_codes(3, 3) {
            let t = Forest::from_code(&code).unwrap();
            assert_eq!(decorations(&p, &t).len(), 1, "{code}");
        }
    }

    #[test]
    fn forest_decorations_are_products() {
        let p = library::comm2(2);
        let a = Forest::parse("r(x, y)").unwrap();
        let b = Forest::parse("s(u())").unwrap();
        let both = Forest::disjoint_union(&[a.clone(), b.clone()]);
        assert_eq!(decorations(&p, &both).len(), decorations(&p, &a).len() * decorations(&p, &b).len());
    }

    #[test]
    fn segal_on_small_trees() {
        for (_, p) in library::all(3) {
            for code in enumerate_tree_codes(3, 2) {
                let t = Forest::from_code(&code).unwrap();
                for (e, whole, fibered) in segal_counts(&p, &t) {
                    assert_eq!(whole, fibered, "{code} at {e}");
                }
            }
        }
    }

    #[test]
    fn composite_of_a_grafting() {
        let p = library::comm(3);
        let t = Forest::parse("r(a(x, y), b)").unwrap();
        let d = &decorations(&p, &t)[0];
        let op = subtree_composite(&p, &t, d, 0, &[4, 2, 3]).unwrap();
        assert_eq!(p.arity(op), 3);
        assert!(subtree_composite(&p, &t, d, 0, &[2, 3]).is_none());
    }

    fn max_monoid(cap: usize) -> OperadicLeftFibration {
        let p = Arc::new(library::comm(cap));
        let alg = Algebra::from_fn(p, vec![2], |_, args| args.iter().copied().max().unwrap_or(0)).unwrap();
        unstraighten(&alg, cap).unwrap()
    }

    fn small_forests() -> Vec<Forest> {
        let trees = enumerate_tree_codes(2, 2);
        enumerate_forest_codes(&trees, 2).iter().map(|c| Forest::from_code(c).unwrap()).collect()
    }

    #[test]
    fn unstraightening_is_local() {
        let fib = max_monoid(3);
        assert_eq!(l_local_check(&fib, &small_forests(), false), Ok(small_forests().len()));
    }

    #[test]
    fn doubled_lift_is_not_local() {
        let base = library::comm(2);
        let (total, proj) = chaotic_operad(&base, &[2]).unwrap();
        let fib = OperadicLeftFibration::from_parts(Arc::new(base), Arc::new(total), proj).unwrap();
        let err = l_local_check(&fib, &[Tree::corolla(2).into_forest()], false).unwrap_err();
        assert_eq!(err.extensions, 2);
    }

    #[test]
    fn missing_lift_is_not_local() {
        let base = library::comm(2);
        let total = library::initial(1, 2);
        let proj = OperadMap { colors: vec![Color(0)], ops: vec![base.unit(Color(0))] };
        let fib = OperadicLeftFibration::from_parts(Arc::new(base), Arc::new(total), proj).unwrap();
        let err = l_local_check(&fib, &[Tree::corolla(0).into_forest()], false).unwrap_err();
        assert_eq!(err.extensions, 0);
    }

    #[test]
    fn product_rule_matches_direct_check() {
        let base = library::comm(2);
        let (total, proj) = chaotic_operad(&base, &[2]).unwrap();
        let bad = OperadicLeftFibration::from_parts(Arc::new(base), Arc::new(total), proj).unwrap();
        for fib in [max_monoid(2), bad] {
            for f in small_forests() {
                let a = l_local_check(&fib, std::slice::from_ref(&f), false).is_ok();
                let b = l_local_check(&fib, std::slice::from_ref(&f), true).is_ok();
                assert_eq!(a, b, "{f}");
            }
        }
    }
}
