//! Permutations of `{0, .., n-1}` in one-line notation.
//!
//! A permutation `σ` is stored as the vector `[σ(0), .., σ(n-1)]`. Symmetric
//! group actions on operations are right actions: `φ·σ` has inputs
//! `(c_{σ(0)}, .., c_{σ(n-1)})` when `φ` has inputs `(c_0, .., c_{n-1})`.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// Builds a permutation from its one-line notation, or `None` when the
    /// vector is not a bijection of `0..len`.
    pub fn from_vec(v: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; v.len()];
        for &x in &v {
            if x >= v.len() || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    /// Lexicographic rank among all permutations of the same length.
    pub fn rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller = self.0[i + 1..].iter().filter(|&&x| x < self.0[i]).count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    /// Reorders `items` so that position `i` of the result holds `items[σ(i)]`.
    pub fn permute<T: Clone>(&self, items: &[T]) -> Vec<T> {
        self.0.iter().map(|&i| items[i].clone()).collect()
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All permutations of length `n` in lexicographic order, so that
/// `all(n)[k].rank() == k`.
pub fn all(n: usize) -> Vec<Perm> {
    let mut out = Vec::with_capacity(factorial(n));
    let mut current = (0..n).collect::<Vec<_>>();
    loop {
        out.push(Perm(current.clone()));
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// The permutation sending position `q` of the sorted order of `keys` to the
/// position where that key sits in `keys`. `keys` must be distinct.
pub fn sorting(keys: &[usize]) -> Perm {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by_key(|&i| keys[i]);
    Perm(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranks_follow_enumeration_order() {
        for n in 0..6 {
            let perms = all(n);
            assert_eq!(perms.len(), factorial(n));
            for (k, p) in perms.iter().enumerate() {
                assert_eq!(p.rank(), k);
            }
        }
    }

    #[test]
    fn sorting_permutation() {
        let keys = [5, 1, 3];
        let s = sorting(&keys);
        assert_eq!(s.permute(&keys), vec![1, 3, 5]);
    }

    proptest! {
        #[test]
        fn group_laws(n in 0usize..6, a in 0usize..720, b in 0usize..720, c in 0usize..720) {
            let perms = all(n);
            let (a, b, c) = (&perms[a % perms.len()], &perms[b % perms.len()], &perms[c % perms.len()]);
            prop_assert_eq!(a.compose(&b.compose(c)), a.compose(b).compose(c));
            prop_assert!(a.compose(&a.inverse()).is_identity());
            prop_assert_eq!(a.compose(&Perm::identity(n)), a.clone());
        }
    }
}
