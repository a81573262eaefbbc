//! Small fixed-universe bitsets over object indices.

use smallvec::SmallVec;

use crate::pstrips::Obj;

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// Set of objects `0..n` of one state. Every set built for the same state has
/// the same number of words; bits at or above `n` are always clear.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ObjSet {
    words: SmallVec<[u64; 1]>,
}

impl ObjSet {
    pub fn empty(n: usize) -> Self {
        ObjSet {
            words: SmallVec::from_elem(0, words_for(n)),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * 64;
            *w = if n >= lo + 64 {
                u64::MAX
            } else if n > lo {
                (1u64 << (n - lo)) - 1
            } else {
                0
            };
        }
        s
    }

    pub fn from_words(words: &[u64]) -> Self {
        ObjSet {
            words: SmallVec::from_slice(words),
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, o: Obj) {
        self.words[o as usize / 64] |= 1u64 << (o % 64);
    }

    pub fn contains(&self, o: Obj) -> bool {
        self.words
            .get(o as usize / 64)
            .is_some_and(|w| w & (1u64 << (o % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersects(&self, other: &ObjSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn intersect_with(&mut self, other: &ObjSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &ObjSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Complement relative to `0..n`.
    pub fn complement(&self, n: usize) -> ObjSet {
        let mut out = Self::full(n);
        for (a, b) in out.words.iter_mut().zip(&self.words) {
            *a &= !b;
        }
        out
    }

    pub fn is_subset(&self, other: &ObjSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Obj> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(i as Obj * 64 + b)
            })
        })
    }
}

/// Binary relation over `0..n` as successor rows: `rows[o]` holds every
/// `o'` with `(o, o')` in the relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub rows: Vec<ObjSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            rows: vec![ObjSet::empty(n); n],
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, a: Obj, b: Obj) {
        self.rows[a as usize].insert(b);
    }

    pub fn contains(&self, a: Obj, b: Obj) -> bool {
        self.rows[a as usize].contains(b)
    }

    pub fn intersect(&self, other: &Relation) -> Relation {
        let mut out = self.clone();
        for (r, o) in out.rows.iter_mut().zip(&other.rows) {
            r.intersect_with(o);
        }
        out
    }

    pub fn transpose(&self) -> Relation {
        let n = self.n();
        let mut out = Relation::empty(n);
        for (a, row) in self.rows.iter().enumerate() {
            for b in row.iter() {
                out.insert(b, a as Obj);
            }
        }
        out
    }

    /// Reflexive-transitive closure (Warshall over bit rows).
    pub fn star(&self) -> Relation {
        let n = self.n();
        let mut out = self.clone();
        for k in 0..n {
            let row_k = out.rows[k].clone();
            for i in 0..n {
                if out.rows[i].contains(k as Obj) {
                    out.rows[i].union_with(&row_k);
                }
            }
        }
        for i in 0..n {
            out.rows[i].insert(i as Obj);
        }
        out
    }

    /// `{o | some o' in c with (o, o') in self}`.
    pub fn preimage(&self, c: &ObjSet) -> ObjSet {
        let n = self.n();
        let mut out = ObjSet::empty(n);
        for (o, row) in self.rows.iter().enumerate() {
            if row.intersects(c) {
                out.insert(o as Obj);
            }
        }
        out
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Obj, Obj)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |b| (a as Obj, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_complement_respect_universe() {
        for n in [0usize, 1, 5, 63, 64, 65, 130] {
            let f = ObjSet::full(n);
            assert_eq!(f.len(), n);
            assert!(f.complement(n).is_empty());
            assert_eq!(ObjSet::empty(n).complement(n), f);
        }
    }

    #[test]
    fn iter_returns_members_in_order() {
        let mut s = ObjSet::empty(70);
        for o in [69, 3, 64, 0] {
            s.insert(o);
        }
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 64, 69]);
    }

    #[test]
    fn star_of_chain() {
        let mut r = Relation::empty(3);
        r.insert(2, 1);
        r.insert(1, 0);
        let s = r.star();
        let pairs: Vec<_> = s.pairs().collect();
        assert_eq!(pairs, vec![(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]);
    }
}
