//! Finite semigroups as Cayley tables, homomorphisms between them, identity
//! adjunction, and generation from subsets.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::util::permutations;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("a semigroup needs at least one element")]
    Empty,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("operation table must be {0}x{0}")]
    TableShape(usize),
    #[error("not associative: ({0}{1}){2} != {0}({1}{2})")]
    NotAssociative(String, String, String),
    #[error("map does not cover every source element")]
    MapShape,
    #[error("not a homomorphism: h({0}{1}) != h({0})h({1})")]
    NotHomomorphism(String, String),
    #[error("homomorphism sends the identity `{0}` to `{1}`, not to the target identity")]
    IdentityNotPreserved(String, String),
    #[error("target semigroup has no identity element")]
    TargetNotMonoid,
    #[error("generating set is empty")]
    EmptyGenerators,
    #[error("group-mode generation requires a group")]
    GroupModeOnNonGroup,
}

/// How a subset generates: finite products only, or products of elements and
/// their inverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenerationMode {
    Semigroup,
    Group,
}

/// A finite semigroup given by its Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSemigroup {
    names: Vec<String>,
    table: Vec<usize>,
    identity: Option<usize>,
    inverses: Option<Vec<usize>>,
    commutative: bool,
}

impl FiniteSemigroup {
    /// Validates an index table (`table[a][b] = ab`) and derives the flags.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, AlgebraError> {
        let n = names.len();
        if n == 0 {
            return Err(AlgebraError::Empty);
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(AlgebraError::DuplicateElement(name.clone()));
            }
        }
        if table.len() != n || table.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(AlgebraError::TableShape(n));
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        Self::from_flat(names, flat)
    }

    /// Validates a table whose cells are element names.
    ///
    /// ```
    /// use ordhull::algebra::FiniteSemigroup;
    ///
    /// let z2 = FiniteSemigroup::from_named_table(
    ///     &["e", "g"],
    ///     &[vec!["e", "g"], vec!["g", "e"]],
    /// ).unwrap();
    /// assert!(z2.is_group() && z2.is_commutative());
    /// ```
    pub fn from_named_table<S: AsRef<str>>(elements: &[S], table: &[Vec<S>]) -> Result<Self, AlgebraError> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let index: BTreeMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut rows = Vec::with_capacity(table.len());
        for row in table {
            let mut r = Vec::with_capacity(row.len());
            for cell in row {
                let v = index
                    .get(cell.as_ref())
                    .copied()
                    .ok_or_else(|| AlgebraError::UnknownElement(cell.as_ref().to_string()))?;
                r.push(v);
            }
            rows.push(r);
        }
        Self::new(names, rows)
    }

    fn from_flat(names: Vec<String>, table: Vec<usize>) -> Result<Self, AlgebraError> {
        let n = names.len();
        let mul = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(AlgebraError::NotAssociative(
                            names[a].clone(),
                            names[b].clone(),
                            names[c].clone(),
                        ));
                    }
                }
            }
        }
        Ok(Self::with_flags(names, table))
    }

    fn with_flags(names: Vec<String>, table: Vec<usize>) -> Self {
        let n = names.len();
        let mul = |a: usize, b: usize| table[a * n + b];
        let identity = (0..n).find(|&e| (0..n).all(|a| mul(e, a) == a && mul(a, e) == a));
        let inverses = identity.and_then(|e| {
            (0..n)
                .map(|a| (0..n).find(|&b| mul(a, b) == e && mul(b, a) == e))
                .collect::<Option<Vec<_>>>()
        });
        let commutative = (0..n).all(|a| (0..n).all(|b| mul(a, b) == mul(b, a)));
        FiniteSemigroup { names, table, identity, inverses, commutative }
    }

    /// The cyclic group of order `n`, elements `{prefix}0..`, with `{prefix}0` the identity.
    pub fn cyclic(n: usize, prefix: &str) -> Self {
        let names = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let table = (0..n).flat_map(|a| (0..n).map(move |b| (a + b) % n)).collect();
        Self::with_flags(names, table)
    }

    /// The one-element group on `name`.
    pub fn trivial(name: &str) -> Self {
        Self::with_flags(vec![name.to_string()], vec![0])
    }

    /// The left-zero semigroup (`xy = x`) on the given names.
    pub fn left_zero<S: AsRef<str>>(names: &[S]) -> Result<Self, AlgebraError> {
        let n = names.len();
        let rows = (0..n).map(|a| vec![a; n]).collect();
        Self::new(names.iter().map(|s| s.as_ref().to_string()).collect(), rows)
    }

    /// All products equal `{prefix}0`.
    pub fn null(n: usize, prefix: &str) -> Self {
        let names = (0..n).map(|i| format!("{prefix}{i}")).collect();
        Self::with_flags(names, vec![0; n * n])
    }

    /// `<a | a^(index+period) = a^index>`: element `k` is `a^(k+1)`.
    pub fn monogenic(index: usize, period: usize, prefix: &str) -> Self {
        assert!(index >= 1 && period >= 1);
        let n = index + period - 1;
        let names = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let reduce = |mut e: usize| {
            while e > n {
                e -= period;
            }
            e
        };
        let table = (0..n).flat_map(|a| (0..n).map(move |b| reduce(a + b + 2) - 1)).collect();
        Self::with_flags(names, table)
    }

    /// The group generated by permutations of `0..degree` under composition
    /// (`ab` applies `b` first), identity first, then in discovery order.
    pub fn permutation_group(gens: &[Vec<usize>], prefix: &str) -> Self {
        let degree = gens.first().map_or(1, Vec::len);
        let mut elems: Vec<Vec<usize>> = vec![(0..degree).collect()];
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let next: Vec<usize> = elems[i].iter().map(|&x| g[x]).collect();
                if !elems.contains(&next) {
                    elems.push(next);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let pos = |p: &Vec<usize>| elems.iter().position(|q| q == p).expect("closed under composition");
        let table = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| pos(&elems[b].iter().map(|&x| elems[a][x]).collect()))
            .collect();
        Self::with_flags((0..n).map(|i| format!("{prefix}{i}")).collect(), table)
    }

    /// `self x other` with componentwise product; `(a, b)` is element `a * |other| + b`.
    pub fn direct_product(&self, other: &FiniteSemigroup, prefix: &str) -> Self {
        let (n, m) = (self.len(), other.len());
        let table = (0..n * m)
            .flat_map(|x| (0..n * m).map(move |y| (x, y)))
            .map(|(x, y)| self.mul(x / m, y / m) * m + other.mul(x % m, y % m))
            .collect();
        Self::with_flags((0..n * m).map(|i| format!("{prefix}{i}")).collect(), table)
    }

    /// Adjoins an absorbing element, appended last.
    pub fn with_zero(&self, prefix: &str) -> Self {
        let n = self.len();
        let z = n;
        let table = (0..=n)
            .flat_map(|a| (0..=n).map(move |b| (a, b)))
            .map(|(a, b)| if a == z || b == z { z } else { self.mul(a, b) })
            .collect();
        Self::with_flags((0..=n).map(|i| format!("{prefix}{i}")).collect(), table)
    }

    /// Elements of every subgroup that contains the identity, as sorted lists.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let Some(e) = self.identity else { return Vec::new() };
        let n = self.len();
        assert!(n <= 16, "subgroup enumeration is by subset scan");
        (0u32..1 << n)
            .filter(|m| m & (1 << e) != 0)
            .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect::<Vec<_>>())
            .filter(|sub| {
                sub.iter().all(|&a| {
                    sub.iter().all(|&b| sub.contains(&self.mul(a, b)))
                        && self.inverse(a).is_some_and(|i| sub.contains(&i))
                })
            })
            .collect()
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

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.len() + b]
    }

    /// The table as rows of indices.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    pub fn identity(&self) -> Option<usize> {
        self.identity
    }

    pub fn is_monoid(&self) -> bool {
        self.identity.is_some()
    }

    pub fn is_group(&self) -> bool {
        self.inverses.is_some()
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    /// Two-sided inverse, when the semigroup is a group.
    pub fn inverse(&self, a: usize) -> Option<usize> {
        self.inverses.as_ref().map(|inv| inv[a])
    }

    /// Closure of `gens` under the operation (and inverses in group mode).
    ///
    /// ```
    /// use ordhull::algebra::{FiniteSemigroup, GenerationMode};
    ///
    /// let z4 = FiniteSemigroup::cyclic(4, "g");
    /// let all = z4.generate(&[1], GenerationMode::Semigroup).unwrap();
    /// assert_eq!(all.len(), 4);
    /// ```
    pub fn generate(&self, gens: &[usize], mode: GenerationMode) -> Result<BTreeSet<usize>, AlgebraError> {
        if gens.is_empty() {
            return Err(AlgebraError::EmptyGenerators);
        }
        let mut seeds: BTreeSet<usize> = gens.iter().copied().collect();
        if mode == GenerationMode::Group {
            let inv = self.inverses.as_ref().ok_or(AlgebraError::GroupModeOnNonGroup)?;
            seeds.extend(gens.iter().map(|&g| inv[g]));
        }
        let mut out = seeds.clone();
        let mut frontier: Vec<usize> = seeds.iter().copied().collect();
        while let Some(a) = frontier.pop() {
            for &g in &seeds {
                for p in [self.mul(a, g), self.mul(g, a)] {
                    if out.insert(p) {
                        frontier.push(p);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_generating(&self, gens: &[usize], mode: GenerationMode) -> Result<bool, AlgebraError> {
        Ok(self.generate(gens, mode)?.len() == self.len())
    }

    /// Relabels with `perm` (old index `a` becomes `perm[a]`).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.len();
        let mut names = vec![String::new(); n];
        let mut table = vec![0; n * n];
        for a in 0..n {
            names[perm[a]] = self.names[a].clone();
            for b in 0..n {
                table[perm[a] * n + perm[b]] = perm[self.mul(a, b)];
            }
        }
        Self::with_flags(names, table)
    }

    pub fn with_names(&self, names: Vec<String>) -> Result<Self, AlgebraError> {
        if names.len() != self.len() {
            return Err(AlgebraError::TableShape(self.len()));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(AlgebraError::DuplicateElement(n.clone()));
            }
        }
        Ok(Self::with_flags(names, self.table.clone()))
    }

    /// Lexicographically least flattened table over all relabelings.
    pub fn canonical_table(&self) -> Vec<usize> {
        let n = self.len();
        permutations(n)
            .into_iter()
            .map(|p| {
                let mut t = vec![0; n * n];
                for a in 0..n {
                    for b in 0..n {
                        t[p[a] * n + p[b]] = p[self.mul(a, b)];
                    }
                }
                t
            })
            .min()
            .expect("at least one permutation")
    }

    pub fn is_isomorphic(&self, other: &FiniteSemigroup) -> bool {
        self.len() == other.len() && self.canonical_table() == other.canonical_table()
    }

    /// Every semigroup of order `n` up to isomorphism, elements `{prefix}0..`.
    ///
    /// Tables are filled cell by cell with associativity checked on every
    /// fully defined triple, then deduplicated by canonical table.
    pub fn enumerate(n: usize, prefix: &str) -> Vec<FiniteSemigroup> {
        assert!((1..=4).contains(&n), "semigroup enumeration supports orders 1..=4");
        let mut classes = BTreeSet::new();
        let mut cells = vec![usize::MAX; n * n];
        enumerate_rec(n, 0, &mut cells, &mut |t| {
            let s = Self::with_flags(vec![String::new(); n], t.to_vec());
            classes.insert(s.canonical_table());
        });
        let names: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
        classes
            .into_iter()
            .map(|t| Self::with_flags(names.clone(), t))
            .collect()
    }

    /// Number of associative tables on `n` labeled elements.
    pub fn count_labeled(n: usize) -> usize {
        let mut count = 0;
        let mut cells = vec![usize::MAX; n * n];
        enumerate_rec(n, 0, &mut cells, &mut |_| count += 1);
        count
    }
}

fn enumerate_rec(n: usize, pos: usize, cells: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if pos == n * n {
        emit(cells);
        return;
    }
    for v in 0..n {
        cells[pos] = v;
        if partial_associative(n, cells) {
            enumerate_rec(n, pos + 1, cells, emit);
        }
    }
    cells[pos] = usize::MAX;
}

fn partial_associative(n: usize, t: &[usize]) -> bool {
    let get = |a: usize, b: usize| t[a * n + b];
    for a in 0..n {
        for b in 0..n {
            let ab = get(a, b);
            if ab == usize::MAX {
                continue;
            }
            for c in 0..n {
                let bc = get(b, c);
                if bc == usize::MAX {
                    continue;
                }
                let l = get(ab, c);
                let r = get(a, bc);
                if l != usize::MAX && r != usize::MAX && l != r {
                    return false;
                }
            }
        }
    }
    true
}

/// A semigroup homomorphism `source -> target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: FiniteSemigroup,
    target: FiniteSemigroup,
    map: Vec<usize>,
}

impl Homomorphism {
    /// Checks multiplicativity and, between monoids, that the identity is preserved.
    pub fn new(source: FiniteSemigroup, target: FiniteSemigroup, map: Vec<usize>) -> Result<Self, AlgebraError> {
        if map.len() != source.len() || map.iter().any(|&v| v >= target.len()) {
            return Err(AlgebraError::MapShape);
        }
        for a in 0..source.len() {
            for b in 0..source.len() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(AlgebraError::NotHomomorphism(
                        source.name(a).to_string(),
                        source.name(b).to_string(),
                    ));
                }
            }
        }
        if let (Some(e), Some(t)) = (source.identity(), target.identity()) {
            if map[e] != t {
                return Err(AlgebraError::IdentityNotPreserved(
                    source.name(e).to_string(),
                    target.name(map[e]).to_string(),
                ));
            }
        }
        Ok(Homomorphism { source, target, map })
    }

    /// The map sending everything to the target identity.
    pub fn to_identity(source: FiniteSemigroup, target: FiniteSemigroup) -> Result<Self, AlgebraError> {
        let e = target.identity().ok_or(AlgebraError::TargetNotMonoid)?;
        let map = vec![e; source.len()];
        Self::new(source, target, map)
    }

    pub fn source(&self) -> &FiniteSemigroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteSemigroup {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// Target indices hit by the map, ascending.
    pub fn image_indices(&self) -> Vec<usize> {
        self.map.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_indices().len() == self.target.len()
    }

    /// Replaces the target by the image subsemigroup, which makes the map
    /// surjective. Image elements keep their names and relative order.
    pub fn restrict_to_image(&self) -> Homomorphism {
        let image = self.image_indices();
        let pos: BTreeMap<usize, usize> = image.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let names = image.iter().map(|&t| self.target.name(t).to_string()).collect();
        let m = image.len();
        let mut table = vec![0; m * m];
        for (i, &a) in image.iter().enumerate() {
            for (j, &b) in image.iter().enumerate() {
                table[i * m + j] = pos[&self.target.mul(a, b)];
            }
        }
        let target = FiniteSemigroup::with_flags(names, table);
        let map = self.map.iter().map(|t| pos[t]).collect();
        Homomorphism { source: self.source.clone(), target, map }
    }
}

/// Adjoins a formal identity to a semigroup that lacks one, extending `hom`
/// (if given) by sending the new identity to the target identity.
///
/// A semigroup that already has an identity is returned unchanged. The new
/// element is appended last and named `1` (primed until the name is free).
pub fn adjoin_identity(
    s: &FiniteSemigroup,
    hom: Option<&Homomorphism>,
) -> Result<(FiniteSemigroup, Option<Homomorphism>), AlgebraError> {
    if s.is_monoid() {
        return Ok((s.clone(), hom.cloned()));
    }
    let n = s.len();
    let mut name = "1".to_string();
    while s.index_of(&name).is_some() {
        name.push('\'');
    }
    let mut names = s.names.clone();
    names.push(name);
    let m = n + 1;
    let mut table = vec![0; m * m];
    for a in 0..m {
        for b in 0..m {
            table[a * m + b] = match (a == n, b == n) {
                (true, _) => b,
                (false, true) => a,
                _ => s.mul(a, b),
            };
        }
    }
    let monoid = FiniteSemigroup::from_flat(names, table)?;
    let extended = match hom {
        None => None,
        Some(h) => {
            let unit = h.target.identity().ok_or(AlgebraError::TargetNotMonoid)?;
            let mut map = h.map.clone();
            map.push(unit);
            Some(Homomorphism::new(monoid.clone(), h.target.clone(), map)?)
        }
    };
    Ok((monoid, extended))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> FiniteSemigroup {
        FiniteSemigroup::cyclic(2, "z")
    }

    #[test]
    fn small_constructors_are_associative() {
        let s3 = FiniteSemigroup::permutation_group(&[vec![1, 0, 2], vec![1, 2, 0]], "p");
        assert_eq!(s3.len(), 6);
        assert!(s3.is_group() && !s3.is_commutative());
        assert_eq!(s3.subgroups().len(), 6);
        let z2 = z2();
        let v4 = z2.direct_product(&z2, "v");
        assert!(v4.is_group() && v4.is_commutative());
        assert!(!v4.is_isomorphic(&FiniteSemigroup::cyclic(4, "c")));
        let m = FiniteSemigroup::monogenic(2, 3, "m");
        assert_eq!(m.len(), 4);
        assert!(!m.is_monoid());
        for s in [s3, v4, m, FiniteSemigroup::null(3, "n"), FiniteSemigroup::cyclic(3, "c").with_zero("w")] {
            assert!(FiniteSemigroup::new(s.names().to_vec(), s.rows()).is_ok(), "{s:?}");
        }
        // a^1..a^4 with a^5 = a^2: the element a^2 generates the cyclic part.
        assert!(FiniteSemigroup::monogenic(1, 4, "c").is_isomorphic(&FiniteSemigroup::cyclic(4, "z")));
    }

    #[test]
    fn z2_is_commutative_group() {
        let g = z2();
        assert!(g.is_group() && g.is_commutative());
        assert_eq!(g.identity(), Some(0));
        assert_eq!(g.inverse(1), Some(1));
    }

    #[test]
    fn left_zero_has_no_identity() {
        let lz = FiniteSemigroup::left_zero(&["a", "b"]).unwrap();
        assert!(!lz.is_monoid() && !lz.is_group() && !lz.is_commutative());
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // ab = b, ba = a, everything else a: (ab)b = bb = a but a(bb) = aa = a,
        // (ba)b = ab = b while b(ab) = bb = a.
        let err = FiniteSemigroup::new(
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![0, 0]],
        )
        .unwrap_err();
        assert!(matches!(err, AlgebraError::NotAssociative(..)));
    }

    #[test]
    fn adjoin_identity_to_left_zero() {
        let lz = FiniteSemigroup::left_zero(&["a", "b"]).unwrap();
        let (m, _) = adjoin_identity(&lz, None).unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.is_monoid());
        assert_eq!(m.identity(), Some(2));
        assert_eq!(m.name(2), "1");
    }

    #[test]
    fn adjoin_identity_keeps_monoids() {
        let (m, _) = adjoin_identity(&z2(), None).unwrap();
        assert_eq!(m, z2());
    }

    #[test]
    fn adjoin_identity_extends_hom_to_unit() {
        let lz = FiniteSemigroup::left_zero(&["a", "b"]).unwrap();
        let hom = Homomorphism::to_identity(lz.clone(), z2()).unwrap();
        let (_, ext) = adjoin_identity(&lz, Some(&hom)).unwrap();
        let ext = ext.unwrap();
        assert_eq!(ext.apply(2), z2().identity().unwrap());
    }

    #[test]
    fn adjoin_identity_needs_monoid_target() {
        let lz = FiniteSemigroup::left_zero(&["a", "b"]).unwrap();
        let hom = Homomorphism::new(lz.clone(), lz.clone(), vec![0, 1]).unwrap();
        assert_eq!(adjoin_identity(&lz, Some(&hom)).unwrap_err(), AlgebraError::TargetNotMonoid);
    }

    #[test]
    fn generation_examples() {
        let z4 = FiniteSemigroup::cyclic(4, "g");
        assert!(z4.is_generating(&[1], GenerationMode::Semigroup).unwrap());
        let lz = FiniteSemigroup::left_zero(&["a", "b"]).unwrap();
        assert_eq!(lz.generate(&[0], GenerationMode::Semigroup).unwrap(), BTreeSet::from([0]));
        assert!(z2().is_generating(&[1], GenerationMode::Group).unwrap());
        assert!(!z2().is_generating(&[0], GenerationMode::Semigroup).unwrap());
        assert_eq!(z2().generate(&[], GenerationMode::Semigroup), Err(AlgebraError::EmptyGenerators));
        assert_eq!(lz.generate(&[0], GenerationMode::Group), Err(AlgebraError::GroupModeOnNonGroup));
    }

    #[test]
    fn restrict_parity_map_is_unchanged() {
        let z4 = FiniteSemigroup::cyclic(4, "g");
        let parity = Homomorphism::new(z4, z2(), vec![0, 1, 0, 1]).unwrap();
        assert!(parity.is_surjective());
        assert_eq!(parity.restrict_to_image(), parity);
    }

    #[test]
    fn restrict_trivial_map_shrinks_target() {
        let h = Homomorphism::to_identity(z2(), z2()).unwrap();
        let r = h.restrict_to_image();
        assert_eq!(r.target().len(), 1);
        assert!(r.target().is_group());
        assert!(r.is_surjective());
    }

    #[test]
    fn homomorphism_must_preserve_identity() {
        let lz_monoid = adjoin_identity(&FiniteSemigroup::left_zero(&["a", "b"]).unwrap(), None)
            .unwrap()
            .0;
        // Everything to the idempotent `a` is multiplicative but misses the unit.
        let err = Homomorphism::new(z2(), lz_monoid, vec![0, 0]).unwrap_err();
        assert!(matches!(err, AlgebraError::IdentityNotPreserved(..)));
    }

    #[test]
    fn labeled_and_unlabeled_counts() {
        let labeled: Vec<_> = (1..=3).map(FiniteSemigroup::count_labeled).collect();
        assert_eq!(labeled, [1, 8, 113]);
        let classes: Vec<_> = (1..=3).map(|n| FiniteSemigroup::enumerate(n, "a").len()).collect();
        assert_eq!(classes, [1, 5, 24]);
    }

    #[test]
    fn order_four_counts() {
        assert_eq!(FiniteSemigroup::count_labeled(4), 3492);
        let all = FiniteSemigroup::enumerate(4, "a");
        assert_eq!(all.len(), 188);
        assert_eq!(all.iter().filter(|s| s.is_group()).count(), 2);
    }
}
