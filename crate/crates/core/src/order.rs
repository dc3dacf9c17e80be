//! Finite partially ordered sets, order-completeness, and completion by
//! synthetic extremal symbols.
//!
//! Elements are addressed by dense indices. A [`Poset`] keeps one bitmask row
//! per element (`bit j of up[i]` means `i <= j`), which keeps subset scans
//! and relabelings cheap at the sizes this crate works with.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::util::permutations;

/// Largest poset the bitmask representation supports.
pub const MAX_POSET_SIZE: usize = 62;

/// Up to this size order-completeness is decided by scanning every subset.
pub const EXHAUSTIVE_COMPLETENESS_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("a poset needs at least one element")]
    Empty,
    #[error("poset has {0} elements, more than the supported {MAX_POSET_SIZE}")]
    TooLarge(usize),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("antisymmetry violated: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    AntisymmetryViolation(String, String),
    #[error("not order-complete: {{{}}} lacks a required bound", .0.join(", "))]
    NotOrderComplete(Vec<String>),
    #[error("`{0}` is not an element of the completed order")]
    UnknownToken(String),
}

/// A finite partially ordered set with named elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    up: Vec<u64>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of `pairs` over `elements`.
    ///
    /// ```
    /// use ordhull::order::Poset;
    ///
    /// let chain = Poset::closure(&["0", "1", "2"], &[("0", "1"), ("1", "2")]).unwrap();
    /// assert!(chain.leq(0, 2));
    /// assert_eq!(chain.relation_size(), 6);
    /// ```
    pub fn closure<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self, OrderError> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(OrderError::DuplicateElement(name.clone()));
            }
        }
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| OrderError::UnknownElement(s.as_ref().to_string()))
        };
        let mut idx_pairs = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            idx_pairs.push((lookup(a)?, lookup(b)?));
        }
        Self::from_relation(names, &idx_pairs)
    }

    /// Index-based variant of [`Poset::closure`].
    pub fn from_relation(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, OrderError> {
        let n = names.len();
        if n == 0 {
            return Err(OrderError::Empty);
        }
        if n > MAX_POSET_SIZE {
            return Err(OrderError::TooLarge(n));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(OrderError::DuplicateElement(name.clone()));
            }
        }
        let mut up: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(OrderError::UnknownElement(format!("#{}", a.max(b))));
            }
            up[a] |= 1 << b;
        }
        // Warshall on bit rows.
        for k in 0..n {
            for i in 0..n {
                if up[i] >> k & 1 == 1 {
                    up[i] |= up[k];
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if up[i] >> j & 1 == 1 && up[j] >> i & 1 == 1 {
                    return Err(OrderError::AntisymmetryViolation(
                        names[i].clone(),
                        names[j].clone(),
                    ));
                }
            }
        }
        Ok(Poset { names, up })
    }

    /// A chain `0 < 1 < ... < n-1` with decimal names.
    pub fn chain(n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_relation(names, &pairs).expect("chain is a valid poset")
    }

    /// An antichain on the given names.
    pub fn antichain<S: AsRef<str>>(names: &[S]) -> Result<Self, OrderError> {
        Self::closure(names, &[])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a] >> b & 1 == 1
    }

    /// Number of pairs `(a, b)` with `a <= b`, reflexive pairs included.
    pub fn relation_size(&self) -> usize {
        self.up.iter().map(|r| r.count_ones() as usize).sum()
    }

    fn all_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// Bitmask of the elements above `a` (including `a`).
    pub fn up_mask(&self, a: usize) -> u64 {
        self.up[a]
    }

    /// Bitmask of the elements below `a` (including `a`).
    pub fn down_mask(&self, a: usize) -> u64 {
        (0..self.len())
            .filter(|&i| self.leq(i, a))
            .fold(0, |m, i| m | 1 << i)
    }

    /// Common upper bounds of the elements in `mask`.
    pub fn upper_bounds(&self, mask: u64) -> u64 {
        bits(mask).fold(self.all_mask(), |acc, i| acc & self.up[i])
    }

    /// Common lower bounds of the elements in `mask`.
    pub fn lower_bounds(&self, mask: u64) -> u64 {
        bits(mask).fold(self.all_mask(), |acc, i| acc & self.down_mask(i))
    }

    /// The least element of `mask`, if it has one.
    pub fn least_in(&self, mask: u64) -> Option<usize> {
        bits(mask).find(|&i| mask & !self.up[i] == 0)
    }

    /// The greatest element of `mask`, if it has one.
    pub fn greatest_in(&self, mask: u64) -> Option<usize> {
        bits(mask).find(|&i| mask & !self.down_mask(i) == 0)
    }

    pub fn least(&self) -> Option<usize> {
        self.least_in(self.all_mask())
    }

    pub fn greatest(&self) -> Option<usize> {
        self.greatest_in(self.all_mask())
    }

    /// Supremum of `mask` inside the poset itself, if it exists.
    pub fn sup_in_base(&self, mask: u64) -> Option<usize> {
        self.least_in(self.upper_bounds(mask))
    }

    /// Infimum of `mask` inside the poset itself, if it exists.
    pub fn inf_in_base(&self, mask: u64) -> Option<usize> {
        self.greatest_in(self.lower_bounds(mask))
    }

    pub fn is_order_complete(&self) -> bool {
        self.incompleteness_witness().is_none()
    }

    /// A subset that is bounded below without an infimum (or bounded above
    /// without a supremum), or `None` if the poset is order-complete.
    ///
    /// Small posets are scanned exhaustively; larger ones use the pairwise
    /// meet/join criterion, which is equivalent for finite posets.
    pub fn incompleteness_witness(&self) -> Option<Vec<usize>> {
        if self.len() <= EXHAUSTIVE_COMPLETENESS_LIMIT {
            self.incompleteness_witness_exhaustive()
        } else {
            self.incompleteness_witness_pairwise()
        }
    }

    /// Scans every nonempty subset. Infima are checked before suprema.
    pub fn incompleteness_witness_exhaustive(&self) -> Option<Vec<usize>> {
        let all = self.all_mask();
        let subsets = || (1..=all).filter(move |m| m & !all == 0);
        for mask in subsets() {
            if self.lower_bounds(mask) != 0 && self.inf_in_base(mask).is_none() {
                return Some(bits(mask).collect());
            }
        }
        for mask in subsets() {
            if self.upper_bounds(mask) != 0 && self.sup_in_base(mask).is_none() {
                return Some(bits(mask).collect());
            }
        }
        None
    }

    /// Checks only pairs: every pair with a lower bound needs a meet and every
    /// pair with an upper bound needs a join.
    pub fn incompleteness_witness_pairwise(&self) -> Option<Vec<usize>> {
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                let m = 1 << a | 1 << b;
                if self.lower_bounds(m) != 0 && self.inf_in_base(m).is_none() {
                    return Some(vec![a, b]);
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                let m = 1 << a | 1 << b;
                if self.upper_bounds(m) != 0 && self.sup_in_base(m).is_none() {
                    return Some(vec![a, b]);
                }
            }
        }
        None
    }

    /// The order-dual poset on the same names.
    pub fn dual(&self) -> Poset {
        let n = self.len();
        let up = (0..n).map(|i| self.down_mask(i)).collect();
        Poset { names: self.names.clone(), up }
    }

    /// Covering pairs `(a, b)`: `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq(a, b) {
                    let between = (0..n).any(|c| {
                        c != a && c != b && self.leq(a, c) && self.leq(c, b)
                    });
                    if !between {
                        out.push((a, b));
                    }
                }
            }
        }
        out
    }

    /// Whether `map` (indexed by element) preserves `<=`.
    pub fn is_monotone(&self, map: &[usize]) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| !self.leq(a, b) || self.leq(map[a], map[b])))
    }

    /// All order-preserving self-maps, in lexicographic order.
    pub fn monotone_maps(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; self.len()];
        self.monotone_rec(0, &mut cur, &mut out);
        out
    }

    fn monotone_rec(&self, i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let n = self.len();
        if i == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            let ok = (0..i).all(|j| {
                (!self.leq(j, i) || self.leq(cur[j], v)) && (!self.leq(i, j) || self.leq(v, cur[j]))
            });
            if ok {
                cur[i] = v;
                self.monotone_rec(i + 1, cur, out);
            }
        }
    }

    /// Order automorphisms, in lexicographic order (identity first).
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        permutations(self.len())
            .into_iter()
            .filter(|p| self.is_automorphism(p))
            .collect()
    }

    fn is_automorphism(&self, p: &[usize]) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| self.leq(a, b) == self.leq(p[a], p[b])))
    }

    /// Relation bits under relabeling `perm` (old index `i` becomes `perm[i]`).
    fn relabeled_rows(&self, perm: &[usize]) -> Vec<u64> {
        let n = self.len();
        let mut rows = vec![0u64; n];
        for a in 0..n {
            for b in bits(self.up[a]) {
                rows[perm[a]] |= 1 << perm[b];
            }
        }
        rows
    }

    /// Lexicographically least relation under all relabelings, with the
    /// permutation that attains it.
    pub fn canonical_form(&self) -> (Vec<u64>, Vec<usize>) {
        permutations(self.len())
            .into_iter()
            .map(|p| (self.relabeled_rows(&p), p))
            .min()
            .expect("at least one permutation")
    }

    /// All posets with `n` elements up to isomorphism, named `s0..`.
    ///
    /// Every finite poset has a linear extension, so closing each subset of
    /// the pairs `i < j` reaches every isomorphism class.
    pub fn enumerate(n: usize) -> Vec<Poset> {
        assert!((1..=6).contains(&n), "poset enumeration supports 1..=6 elements");
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let mut classes = BTreeSet::new();
        for subset in 0u64..(1 << pairs.len()) {
            let chosen: Vec<_> = bits(subset).map(|k| pairs[k]).collect();
            let p = Poset::from_relation(names.clone(), &chosen).expect("upward pairs are acyclic");
            classes.insert(p.canonical_form().0);
        }
        classes
            .into_iter()
            .map(|rows| Poset { names: names.clone(), up: rows })
            .collect()
    }

    /// Applies the relabeling `perm` and keeps names attached to their new slots.
    pub fn relabel(&self, perm: &[usize]) -> Poset {
        let mut names = vec![String::new(); self.len()];
        for (old, &new) in perm.iter().enumerate() {
            names[new] = self.names[old].clone();
        }
        Poset { names, up: self.relabeled_rows(perm) }
    }

    pub fn with_names(&self, names: Vec<String>) -> Result<Poset, OrderError> {
        assert_eq!(names.len(), self.len());
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(OrderError::DuplicateElement(n.clone()));
            }
        }
        Ok(Poset { names, up: self.up.clone() })
    }
}

/// Iterates the set bits of a mask, lowest first.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// Reserved token for the synthetic least element.
pub const BOTTOM_TOKEN: &str = "BOT";
/// Reserved token for the synthetic greatest element.
pub const TOP_TOKEN: &str = "TOP";

/// An element of a completed poset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompletedElement {
    Member(usize),
    Bottom,
    Top,
}

/// A poset with a synthetic least and/or greatest element adjoined when the
/// base lacks one.
///
/// Indices `0..base.len()` are the base elements; the synthetic bottom (if
/// added) comes next, then the synthetic top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletedPoset {
    base: Poset,
    bottom_added: bool,
    top_added: bool,
    order_complete: bool,
    leq: Vec<u64>,
    join: Vec<Option<usize>>,
    meet: Vec<Option<usize>>,
    bottom: usize,
    top: usize,
}

/// Adjoins the missing extrema to `base`.
pub fn complete(base: &Poset) -> CompletedPoset {
    CompletedPoset::new(base.clone())
}

impl CompletedPoset {
    pub fn new(base: Poset) -> Self {
        let n = base.len();
        let least = base.least();
        let greatest = base.greatest();
        let bottom_added = least.is_none();
        let top_added = greatest.is_none();
        let total = n + bottom_added as usize + top_added as usize;
        let bottom = least.unwrap_or(n);
        let top = greatest.unwrap_or(n + bottom_added as usize);
        let mut leq = vec![0u64; total];
        for (i, row) in leq.iter_mut().enumerate().take(n) {
            *row = base.up_mask(i);
        }
        if bottom_added {
            leq[n] = if total == 64 { u64::MAX } else { (1u64 << total) - 1 };
        }
        if top_added {
            for row in leq.iter_mut() {
                *row |= 1 << top;
            }
        }
        let order_complete = base.is_order_complete();
        let mut c = CompletedPoset {
            base,
            bottom_added,
            top_added,
            order_complete,
            leq,
            join: Vec::new(),
            meet: Vec::new(),
            bottom,
            top,
        };
        let mut join = vec![None; total * total];
        let mut meet = vec![None; total * total];
        for a in 0..total {
            for b in 0..total {
                let m = 1u64 << a | 1u64 << b;
                join[a * total + b] = c.least_in(c.upper_bounds(m));
                meet[a * total + b] = c.greatest_in(c.lower_bounds(m));
            }
        }
        c.join = join;
        c.meet = meet;
        c
    }

    pub fn base(&self) -> &Poset {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn bottom_added(&self) -> bool {
        self.bottom_added
    }

    pub fn top_added(&self) -> bool {
        self.top_added
    }

    pub fn is_order_complete(&self) -> bool {
        self.order_complete
    }

    /// Index of the global minimum (the synthetic bottom when added).
    pub fn bottom(&self) -> usize {
        self.bottom
    }

    /// Index of the global maximum (the synthetic top when added).
    pub fn top(&self) -> usize {
        self.top
    }

    /// Whether index `i` is a base element rather than a synthetic symbol.
    pub fn is_member(&self, i: usize) -> bool {
        i < self.base.len()
    }

    pub fn is_bottom_symbol(&self, i: usize) -> bool {
        self.bottom_added && i == self.bottom
    }

    pub fn is_top_symbol(&self, i: usize) -> bool {
        self.top_added && i == self.top
    }

    pub fn element(&self, i: usize) -> CompletedElement {
        if self.is_member(i) {
            CompletedElement::Member(i)
        } else if self.is_bottom_symbol(i) {
            CompletedElement::Bottom
        } else {
            assert!(self.is_top_symbol(i), "index {i} out of range");
            CompletedElement::Top
        }
    }

    pub fn index(&self, e: CompletedElement) -> Option<usize> {
        match e {
            CompletedElement::Member(i) if i < self.base.len() => Some(i),
            CompletedElement::Member(_) => None,
            CompletedElement::Bottom => self.bottom_added.then_some(self.bottom),
            CompletedElement::Top => self.top_added.then_some(self.top),
        }
    }

    /// Display name: the base name, or `BOT` / `TOP` for synthetic symbols.
    pub fn label(&self, i: usize) -> &str {
        match self.element(i) {
            CompletedElement::Member(j) => self.base.name(j),
            CompletedElement::Bottom => BOTTOM_TOKEN,
            CompletedElement::Top => TOP_TOKEN,
        }
    }

    /// Parses a base name or a reserved token. Tokens for symbols that were
    /// not added are rejected.
    pub fn parse(&self, token: &str) -> Result<usize, OrderError> {
        if let Some(i) = self.base.index_of(token) {
            return Ok(i);
        }
        let e = match token {
            BOTTOM_TOKEN => CompletedElement::Bottom,
            TOP_TOKEN => CompletedElement::Top,
            _ => return Err(OrderError::UnknownToken(token.to_string())),
        };
        self.index(e).ok_or_else(|| OrderError::UnknownToken(token.to_string()))
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a] >> b & 1 == 1
    }

    fn upper_bounds(&self, mask: u64) -> u64 {
        let all = if self.len() == 64 { u64::MAX } else { (1u64 << self.len()) - 1 };
        bits(mask).fold(all, |acc, i| acc & self.leq[i])
    }

    fn lower_bounds(&self, mask: u64) -> u64 {
        let n = self.len();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        bits(mask).fold(all, |acc, i| {
            acc & (0..n).filter(|&j| self.leq(j, i)).fold(0, |m, j| m | 1 << j)
        })
    }

    fn least_in(&self, mask: u64) -> Option<usize> {
        bits(mask).find(|&i| mask & !self.leq[i] == 0)
    }

    fn greatest_in(&self, mask: u64) -> Option<usize> {
        bits(mask).find(|&i| bits(mask).all(|j| self.leq(j, i)))
    }

    /// Binary join. Always defined when the base is order-complete.
    ///
    /// # Panics
    ///
    /// Panics if the pair has no least upper bound.
    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b].expect("join exists in a completed order-complete poset")
    }

    /// Binary meet; see [`CompletedPoset::join`].
    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b].expect("meet exists in a completed order-complete poset")
    }

    /// Least upper bound of `items`; the empty supremum is the global minimum.
    pub fn sup<I: IntoIterator<Item = usize>>(&self, items: I) -> Result<usize, OrderError> {
        self.require_complete()?;
        Ok(items.into_iter().fold(self.bottom, |acc, x| self.join(acc, x)))
    }

    /// Greatest lower bound of `items`; the empty infimum is the global maximum.
    pub fn inf<I: IntoIterator<Item = usize>>(&self, items: I) -> Result<usize, OrderError> {
        self.require_complete()?;
        Ok(items.into_iter().fold(self.top, |acc, x| self.meet(acc, x)))
    }

    fn require_complete(&self) -> Result<(), OrderError> {
        if self.order_complete {
            Ok(())
        } else {
            let w = self.base.incompleteness_witness().unwrap_or_default();
            Err(OrderError::NotOrderComplete(
                w.into_iter().map(|i| self.base.name(i).to_string()).collect(),
            ))
        }
    }

    /// The order-dual completion (synthetic bottom and top swap roles).
    pub fn dual(&self) -> CompletedPoset {
        let mut d = CompletedPoset::new(self.base.dual());
        // The dual base has the same symbols added with roles swapped; the
        // constructor places them as (bottom, top), so re-derive the tables
        // on this poset's index layout for index-compatible comparisons.
        let n = self.len();
        let mut leq = vec![0u64; n];
        for (a, row) in leq.iter_mut().enumerate() {
            for b in 0..n {
                if self.leq(b, a) {
                    *row |= 1 << b;
                }
            }
        }
        d.leq = leq;
        d.bottom_added = self.top_added;
        d.top_added = self.bottom_added;
        d.bottom = self.top;
        d.top = self.bottom;
        d.join = self.meet.clone();
        d.meet = self.join.clone();
        d
    }
}
