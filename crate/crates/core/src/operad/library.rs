//! Small named operads used by the sweeps and tests.

use std::collections::HashMap;

use super::{BuildError, Color, ColoredOperad, OpId, OperadBuilder};
use crate::perm::Perm;

/// An operad with at most one operation per profile. `profiles` lists the
/// non-unit operations; the list must be closed under permutation and
/// composition (up to the cap), which the builder verifies.
pub fn thin(cap: usize, colors: &[&str], profiles: &[(Vec<Color>, Color, String)]) -> Result<ColoredOperad, BuildError> {
    let mut b = OperadBuilder::new(cap);
    for c in colors {
        b.color(c);
    }
    let mut lookup: HashMap<(Vec<Color>, Color), OpId> = HashMap::new();
    for c in 0..colors.len() {
        lookup.insert((vec![Color(c)], Color(c)), b.unit(Color(c)));
    }
    for (inputs, output, name) in profiles {
        let id = b.op(name, inputs, *output);
        lookup.insert((inputs.clone(), *output), id);
    }
    let ops: Vec<_> = b.op_ids().map(|o| b.operation(o).clone()).collect();
    let act = |op: OpId, sigma: &Perm| {
        let o = &ops[op.0];
        lookup.get(&(sigma.permute(&o.inputs), o.output)).copied()
    };
    let compose = |outer: OpId, inners: &[OpId]| {
        let inputs: Vec<Color> = inners.iter().flat_map(|q| ops[q.0].inputs.iter().copied()).collect();
        lookup.get(&(inputs, ops[outer.0].output)).copied()
    };
    b.build(act, compose)
}

/// `colors` colors and nothing but units.
pub fn initial(colors: usize, cap: usize) -> ColoredOperad {
    let names: Vec<String> = (0..colors).map(|i| format!("c{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    thin(cap, &refs, &[]).expect("initial operad")
}

fn comm_profiles(c: Color, prefix: &str, cap: usize, nullary: bool) -> Vec<(Vec<Color>, Color, String)> {
    (0..=cap)
        .filter(|&n| n != 1 && (nullary || n != 0))
        .map(|n| (vec![c; n], c, format!("{prefix}{n}")))
        .collect()
}

/// One operation in every arity: commutative monoids.
pub fn comm(cap: usize) -> ColoredOperad {
    thin(cap, &["x"], &comm_profiles(Color(0), "m", cap, true)).expect("comm")
}

/// Commutative semigroups: no nullary operation.
pub fn comm_nonunital(cap: usize) -> ColoredOperad {
    thin(cap, &["x"], &comm_profiles(Color(0), "m", cap, false)).expect("comm_nonunital")
}

/// Pointed sets: a single constant.
pub fn pointed(cap: usize) -> ColoredOperad {
    thin(cap, &["x"], &[(vec![], Color(0), "pt".into())]).expect("pointed")
}

/// A single unary operation `f: a → b`.
pub fn arrow(cap: usize) -> ColoredOperad {
    thin(cap, &["a", "b"], &[(vec![Color(0)], Color(1), "f".into())]).expect("arrow")
}

/// Two independent copies of `comm`.
pub fn comm2(cap: usize) -> ColoredOperad {
    let mut profiles = comm_profiles(Color(0), "a", cap, true);
    profiles.extend(comm_profiles(Color(1), "b", cap, true));
    thin(cap, &["a", "b"], &profiles).expect("comm2")
}

/// One operation `(c_1, .., c_n) → b` for every list of colors, and only the
/// unit into `a`. Algebras are a commutative monoid `B` with a map `A → B`.
pub fn mixed_comm(cap: usize) -> ColoredOperad {
    let mut profiles = Vec::new();
    for n in 0..=cap {
        for code in 0..(1usize << n) {
            let inputs: Vec<Color> = (0..n).map(|i| Color((code >> (n - 1 - i)) & 1)).collect();
            if inputs == [Color(1)] {
                continue;
            }
            let name: String = inputs.iter().map(|c| if c.0 == 0 { 'a' } else { 'b' }).collect();
            profiles.push((inputs, Color(1), format!("m[{name}]")));
        }
    }
    thin(cap, &["a", "b"], &profiles).expect("mixed_comm")
}

/// Sets with an involution: a unary `g` with `g∘g = 1`.
pub fn z2_sets(cap: usize) -> ColoredOperad {
    let mut b = OperadBuilder::new(cap);
    let x = b.color("x");
    let unit = b.unit(x);
    let g = b.op("g", &[x], x);
    b.build(|_, _| None, |outer, inners| (outer == g && inners == [g]).then_some(unit)).expect("z2_sets")
}

/// Operations `(n, ε)` in every arity with `ε ∈ {0, 1}`; composition combines
/// labels with `combine`, whose neutral element labels the unit.
fn labeled_comm(cap: usize, neutral: usize, combine: fn(usize, usize) -> usize) -> ColoredOperad {
    let mut b = OperadBuilder::new(cap);
    let x = b.color("x");
    let mut ids: HashMap<(usize, usize), OpId> = HashMap::new();
    ids.insert((1, neutral), b.unit(x));
    for n in 0..=cap {
        for e in 0..2 {
            if (n, e) == (1, neutral) {
                continue;
            }
            ids.insert((n, e), b.op(&format!("m{n}.{e}"), &vec![x; n], x));
        }
    }
    let label: HashMap<OpId, (usize, usize)> = ids.iter().map(|(&k, &v)| (v, k)).collect();
    let act = |op: OpId, _: &Perm| Some(op);
    let compose = |outer: OpId, inners: &[OpId]| {
        let (_, mut e) = label[&outer];
        let mut n = 0;
        for q in inners {
            let (m, f) = label[q];
            n += m;
            e = combine(e, f);
        }
        ids.get(&(n, e)).copied()
    };
    b.build(act, compose).expect("labeled comm")
}

/// Commutative monoids with an involutive automorphism: labels add mod 2.
pub fn labeled_comm_z2(cap: usize) -> ColoredOperad {
    labeled_comm(cap, 0, |a, b| a ^ b)
}

/// Commutative monoids with an idempotent endomorphism: labels multiply.
pub fn labeled_comm_mult(cap: usize) -> ColoredOperad {
    labeled_comm(cap, 1, |a, b| a & b)
}

/// Free on one binary operation `μ: (a, b) → b`, a left action with no
/// relations. An operation into `b` is fixed by its input colors (exactly one
/// `b`) and the order in which its `a`-inputs act, outermost first.
pub fn action(cap: usize) -> ColoredOperad {
    let (a, bc) = (Color(0), Color(1));
    let mut b = OperadBuilder::new(cap);
    b.color("a");
    b.color("b");
    type Key = (Vec<Color>, Vec<usize>);
    let mut ids: HashMap<Key, OpId> = HashMap::new();
    ids.insert((vec![bc], vec![]), b.unit(bc));
    for n in 2..=cap {
        for pos in 0..n {
            let inputs: Vec<Color> = (0..n).map(|i| if i == pos { bc } else { a }).collect();
            let a_slots: Vec<usize> = (0..n).filter(|&i| i != pos).collect();
            for order in crate::perm::all(n - 1) {
                let order = order.permute(&a_slots);
                let name = format!("μ{:?}", order.iter().map(|i| i + 1).collect::<Vec<_>>());
                ids.insert((inputs.clone(), order), b.op(&name, &inputs, bc));
            }
        }
    }
    let key_of: HashMap<OpId, Key> = ids.iter().map(|(k, &v)| (v, k.clone())).collect();
    let act = |op: OpId, sigma: &Perm| {
        let (inputs, order) = &key_of[&op];
        let inv = sigma.inverse();
        let order: Vec<usize> = order.iter().map(|&p| inv.apply(p)).collect();
        ids.get(&(sigma.permute(inputs), order)).copied()
    };
    let compose = |outer: OpId, inners: &[OpId]| {
        let (inputs, order) = &key_of[&outer];
        let mut starts = Vec::new();
        let mut all_inputs = Vec::new();
        for &q in inners {
            starts.push(all_inputs.len());
            let (qi, _) = key_of.get(&q).cloned().unwrap_or((vec![a], vec![]));
            all_inputs.extend(qi);
        }
        let b_slot = inputs.iter().position(|&c| c == bc)?;
        let mut new_order: Vec<usize> = order.iter().map(|&p| starts[p]).collect();
        let inner_order = key_of.get(&inners[b_slot]).map(|k| k.1.clone()).unwrap_or_default();
        new_order.extend(inner_order.iter().map(|&p| starts[b_slot] + p));
        ids.get(&(all_inputs, new_order)).copied()
    };
    b.build(act, compose).expect("action")
}

/// Associative monoids, as a symmetric operad: arity-`n` operations are the
/// orders in which inputs are multiplied. Not part of the sweep (up to six
/// operations per profile); used to exercise validation.
pub fn ass(cap: usize) -> ColoredOperad {
    let mut b = OperadBuilder::new(cap);
    let x = b.color("x");
    let mut ids: HashMap<Vec<usize>, OpId> = HashMap::new();
    ids.insert(vec![0], b.unit(x));
    for n in 0..=cap {
        for w in crate::perm::all(n) {
            if n == 1 {
                continue;
            }
            let word = w.as_slice().to_vec();
            let name = format!("x{}", word.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("x"));
            ids.insert(word, b.op(&name, &vec![x; n], x));
        }
    }
    let word_of: HashMap<OpId, Vec<usize>> = ids.iter().map(|(k, &v)| (v, k.clone())).collect();
    let act = |op: OpId, sigma: &Perm| {
        let inv = sigma.inverse();
        ids.get(&word_of[&op].iter().map(|&i| inv.apply(i)).collect::<Vec<_>>()).copied()
    };
    let compose = |outer: OpId, inners: &[OpId]| {
        let starts = super::block_starts(inners.iter().map(|q| word_of[q].len()));
        let mut word = Vec::new();
        for &j in &word_of[&outer] {
            word.extend(word_of[&inners[j]].iter().map(|&r| starts[j] + r));
        }
        ids.get(&word).copied()
    };
    b.build(act, compose).expect("ass")
}

/// Every operad in the sweep, with arity cap `cap`.
pub fn all(cap: usize) -> Vec<(&'static str, ColoredOperad)> {
    vec![
        ("initial1", initial(1, cap)),
        ("initial2", initial(2, cap)),
        ("comm", comm(cap)),
        ("comm_nonunital", comm_nonunital(cap)),
        ("pointed", pointed(cap)),
        ("z2_sets", z2_sets(cap)),
        ("labeled_comm_z2", labeled_comm_z2(cap)),
        ("labeled_comm_mult", labeled_comm_mult(cap)),
        ("arrow", arrow(cap)),
        ("comm2", comm2(cap)),
        ("action", action(cap)),
        ("mixed_comm", mixed_comm(cap)),
    ]
}

/// Looks up a library operad by name (including `ass`).
pub fn by_name(name: &str, cap: usize) -> Option<ColoredOperad> {
    if name == "ass" {
        return Some(ass(cap));
    }
    all(cap).into_iter().find(|(n, _)| *n == name).map(|(_, p)| p)
}

/// The sweep: library operads with at most `colors` colors and `op_bound`
/// operations per profile.
pub fn sweep_operads(colors: usize, op_bound: usize, cap: usize) -> Vec<(&'static str, ColoredOperad)> {
    all(cap)
        .into_iter()
        .filter(|(_, p)| p.color_count() <= colors && p.max_hom_size() <= op_bound)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_sizes() {
        assert_eq!(comm(3).max_hom_size(), 1);
        assert_eq!(z2_sets(3).max_hom_size(), 2);
        assert_eq!(action(3).max_hom_size(), 2);
        assert_eq!(ass(3).max_hom_size(), 6);
        assert_eq!(sweep_operads(1, 1, 3).len(), 4);
        assert_eq!(sweep_operads(2, 2, 3).len(), all(3).len());
    }

    #[test]
    fn action_composites_record_order() {
        let p = action(3);
        let mu = p.hom(&[Color(0), Color(1)], Color(1))[0];
        let outer = p.compose(mu, &[p.unit(Color(0)), mu]).unwrap();
        // μ(x, μ(y, z)): x acts last, so it is outermost
        assert_eq!(p.op(outer).name, "μ[1, 2]");
    }
}
