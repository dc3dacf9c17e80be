//! Homogeneity classes, lower/upper envelopes over a class, regularized
//! minorant and majorant, and generator-restricted relation checks.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::Action;
use crate::algebra::{AlgebraError, GenerationMode};
use crate::instance::{FunctionTable, Instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("the orbitwise algorithm needs H and T to be groups")]
    OrbitwiseNeedsGroups,
    #[error("the orbitwise algorithm handles hg and hgc, not {0}")]
    OrbitwiseClass(ClassSpec),
    #[error("T is not a group, so h(h)^-1 is undefined")]
    TargetNotGroup,
    #[error("the given subset does not generate H")]
    NotGenerating,
    #[error("group-mode generation only supports the `=` relation")]
    GroupModeRelation,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The four function classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassSpec {
    /// `f(hx) = h(h) f(x)` with values in `S`.
    Hg,
    /// `f(hx) = h(h) f(x)` with values in the completion.
    Hgc,
    /// `f(hx) <= h(h) f(x)`.
    Sub,
    /// `f(hx) >= h(h) f(x)`.
    Super,
}

impl ClassSpec {
    pub const ALL: [ClassSpec; 4] = [ClassSpec::Hg, ClassSpec::Hgc, ClassSpec::Sub, ClassSpec::Super];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassSpec::Hg => "hg",
            ClassSpec::Hgc => "hgc",
            ClassSpec::Sub => "sub",
            ClassSpec::Super => "super",
        }
    }

    fn relation(self) -> Relation {
        match self {
            ClassSpec::Hg | ClassSpec::Hgc => Relation::Eq,
            ClassSpec::Sub => Relation::Le,
            ClassSpec::Super => Relation::Ge,
        }
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hg" => Ok(ClassSpec::Hg),
            "hgc" => Ok(ClassSpec::Hgc),
            "sub" => Ok(ClassSpec::Sub),
            "super" => Ok(ClassSpec::Super),
            _ => Err(format!("unknown class `{s}` (expected hg, hgc, sub, super)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lower" => Ok(Side::Lower),
            "upper" => Ok(Side::Upper),
            _ => Err(format!("unknown side `{s}` (expected lower, upper)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Enumerate every candidate table dominated by (or dominating) `f`.
    #[serde(rename = "oracle")]
    BruteForce,
    /// One representative per orbit, extended along the orbit.
    Orbitwise,
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "oracle" | "bruteforce" | "brute-force" => Ok(Algorithm::BruteForce),
            "orbitwise" => Ok(Algorithm::Orbitwise),
            _ => Err(format!("unknown algorithm `{s}` (expected oracle, orbitwise)")),
        }
    }
}

/// The relation in `f(hx) R h(h) f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Le, Relation::Ge, Relation::Eq];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// Whether `f(hx) R h(h) f(x)` at one pair.
#[inline]
pub fn relation_holds(inst: &Instance, f: &FunctionTable, h: usize, x: usize, rel: Relation) -> bool {
    let lhs = f.get(inst.hx(h, x));
    let rhs = inst.hs(h, f.get(x));
    match rel {
        Relation::Le => inst.leq(lhs, rhs),
        Relation::Ge => inst.leq(rhs, lhs),
        Relation::Eq => lhs == rhs,
    }
}

/// First `(h, x)` where the relation fails, scanning `hs` in order.
pub fn relation_witness(
    inst: &Instance,
    f: &FunctionTable,
    hs: impl IntoIterator<Item = usize>,
    rel: Relation,
) -> Option<(usize, usize)> {
    let nx = inst.nx();
    hs.into_iter()
        .flat_map(|h| (0..nx).map(move |x| (h, x)))
        .find(|&(h, x)| !relation_holds(inst, f, h, x, rel))
}

/// Why `f` is not in `class`: a pair breaking the relation, or for `hg` a
/// point valued at a synthetic symbol (reported with `h = None`).
pub fn membership_witness(inst: &Instance, f: &FunctionTable, class: ClassSpec) -> Option<(Option<usize>, usize)> {
    if class == ClassSpec::Hg {
        if let Some(x) = (0..inst.nx()).find(|&x| !inst.poset().is_member(f.get(x))) {
            return Some((None, x));
        }
    }
    relation_witness(inst, f, 0..inst.nh(), class.relation()).map(|(h, x)| (Some(h), x))
}

pub fn is_member(inst: &Instance, f: &FunctionTable, class: ClassSpec) -> bool {
    membership_witness(inst, f, class).is_none()
}

/// All classes containing `f`.
///
/// ```
/// use ordhull::envelope::{classify, ClassSpec};
/// use ordhull::fixtures::diamond_swap;
/// use ordhull::instance::FunctionTable;
///
/// let inst = diamond_swap();
/// let f = FunctionTable(vec![1, 2]); // a -> 01, b -> 10
/// assert_eq!(classify(&inst, &f).len(), 4);
/// assert!(classify(&inst, &FunctionTable(vec![1, 1])).is_empty());
/// ```
pub fn classify(inst: &Instance, f: &FunctionTable) -> BTreeSet<ClassSpec> {
    ClassSpec::ALL.into_iter().filter(|&c| is_member(inst, f, c)).collect()
}

/// Lower or upper envelope of `f` over `class`.
pub fn envelope(
    inst: &Instance,
    f: &FunctionTable,
    class: ClassSpec,
    side: Side,
    algorithm: Algorithm,
) -> Result<FunctionTable, EnvelopeError> {
    match algorithm {
        Algorithm::BruteForce => Ok(brute_force(inst, f, class, side)),
        Algorithm::Orbitwise => orbitwise(inst, f, class, side),
    }
}

pub fn lower_envelope(
    inst: &Instance,
    f: &FunctionTable,
    class: ClassSpec,
    algorithm: Algorithm,
) -> Result<FunctionTable, EnvelopeError> {
    envelope(inst, f, class, Side::Lower, algorithm)
}

pub fn upper_envelope(
    inst: &Instance,
    f: &FunctionTable,
    class: ClassSpec,
    algorithm: Algorithm,
) -> Result<FunctionTable, EnvelopeError> {
    envelope(inst, f, class, Side::Upper, algorithm)
}

/// Start value and pointwise combiner for a side: sup from the bottom for
/// lower envelopes, inf from the top for upper ones.
fn side_fold(inst: &Instance, side: Side) -> (usize, impl Fn(usize, usize) -> usize + '_) {
    let p = inst.poset();
    let start = match side {
        Side::Lower => p.bottom(),
        Side::Upper => p.top(),
    };
    (start, move |a, b| match side {
        Side::Lower => p.join(a, b),
        Side::Upper => p.meet(a, b),
    })
}

fn dominated(inst: &Instance, side: Side, candidate: usize, bound: usize) -> bool {
    match side {
        Side::Lower => inst.leq(candidate, bound),
        Side::Upper => inst.leq(bound, candidate),
    }
}

fn brute_force(inst: &Instance, f: &FunctionTable, class: ClassSpec, side: Side) -> FunctionTable {
    let nx = inst.nx();
    let p = inst.poset();
    let choices: Vec<Vec<usize>> = (0..nx)
        .map(|x| {
            (0..inst.nc())
                .filter(|&c| dominated(inst, side, c, f.get(x)))
                .filter(|&c| class != ClassSpec::Hg || p.is_member(c))
                .collect()
        })
        .collect();
    let (start, combine) = side_fold(inst, side);
    let mut acc = vec![start; nx];
    if choices.iter().any(|c| c.is_empty()) {
        return FunctionTable(acc);
    }
    let radices: Vec<usize> = choices.iter().map(|c| c.len()).collect();
    let mut digits = vec![0; nx];
    let mut phi = FunctionTable(vec![0; nx]);
    loop {
        for x in 0..nx {
            phi.0[x] = choices[x][digits[x]];
        }
        if relation_witness(inst, &phi, 0..inst.nh(), class.relation()).is_none() {
            for x in 0..nx {
                acc[x] = combine(acc[x], phi.0[x]);
            }
        }
        if !next_mixed(&mut digits, &radices) {
            break;
        }
    }
    FunctionTable(acc)
}

fn next_mixed(digits: &mut [usize], radices: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

fn orbitwise(inst: &Instance, f: &FunctionTable, class: ClassSpec, side: Side) -> Result<FunctionTable, EnvelopeError> {
    if !matches!(class, ClassSpec::Hg | ClassSpec::Hgc) {
        return Err(EnvelopeError::OrbitwiseClass(class));
    }
    let fl = inst.flags();
    if !(fl.h_group && fl.t_group) {
        return Err(EnvelopeError::OrbitwiseNeedsGroups);
    }
    let partition = inst.carrier().orbit_partition().map_err(|_| EnvelopeError::OrbitwiseNeedsGroups)?;
    let p = inst.poset();
    let (start, combine) = side_fold(inst, side);
    let mut acc = vec![start; inst.nx()];
    for &rep in &partition.representatives {
        let stab = inst.carrier().stabilizer(rep);
        let mut found = false;
        for s in 0..inst.nc() {
            if class == ClassSpec::Hg && !p.is_member(s) {
                continue;
            }
            let compatible = stab.iter().all(|&h| inst.hs(h, s) == s);
            let fits = (0..inst.nh()).all(|h| dominated(inst, side, inst.hs(h, s), f.get(inst.hx(h, rep))));
            if compatible && fits {
                found = true;
                for h in 0..inst.nh() {
                    let y = inst.hx(h, rep);
                    acc[y] = combine(acc[y], inst.hs(h, s));
                }
            }
        }
        if !found {
            return Ok(FunctionTable::constant(inst.nx(), start));
        }
    }
    Ok(FunctionTable(acc))
}

/// Class members of an instance, enumerated once and reused across many
/// envelope queries. Envelopes computed here are the same brute-force sup/inf
/// as [`Algorithm::BruteForce`].
#[derive(Debug, Clone)]
pub struct ClassMembers {
    members: [Vec<FunctionTable>; 4],
}

impl ClassMembers {
    pub fn new(inst: &Instance) -> Self {
        let mut members: [Vec<FunctionTable>; 4] = Default::default();
        for f in inst.all_functions() {
            for (i, class) in ClassSpec::ALL.into_iter().enumerate() {
                if is_member(inst, &f, class) {
                    members[i].push(f.clone());
                }
            }
        }
        ClassMembers { members }
    }

    pub fn members(&self, class: ClassSpec) -> &[FunctionTable] {
        &self.members[class as usize]
    }

    pub fn envelope(&self, inst: &Instance, f: &FunctionTable, class: ClassSpec, side: Side) -> FunctionTable {
        let (start, combine) = side_fold(inst, side);
        let mut acc = vec![start; inst.nx()];
        for phi in self.members(class) {
            let ok = match side {
                Side::Lower => inst.fn_leq(phi, f),
                Side::Upper => inst.fn_leq(f, phi),
            };
            if ok {
                for (a, &v) in acc.iter_mut().zip(phi.values()) {
                    *a = combine(*a, v);
                }
            }
        }
        FunctionTable(acc)
    }
}

/// Greatest sub-homogeneous minorant, by lowering `f(hx)` to
/// `f(hx) /\ h(h) f(x)` until nothing changes. Equals the brute-force
/// lower envelope over `sub`.
pub fn greatest_sub_minorant(inst: &Instance, f: &FunctionTable) -> FunctionTable {
    relax(inst, f, Side::Lower)
}

/// Least super-homogeneous majorant; dual of [`greatest_sub_minorant`].
pub fn least_super_majorant(inst: &Instance, f: &FunctionTable) -> FunctionTable {
    relax(inst, f, Side::Upper)
}

fn relax(inst: &Instance, f: &FunctionTable, side: Side) -> FunctionTable {
    let p = inst.poset();
    let mut g = f.clone();
    loop {
        let mut changed = false;
        for h in 0..inst.nh() {
            for x in 0..inst.nx() {
                let y = inst.hx(h, x);
                let bound = inst.hs(h, g.get(x));
                let v = match side {
                    Side::Lower => p.meet(g.get(y), bound),
                    Side::Upper => p.join(g.get(y), bound),
                };
                if v != g.get(y) {
                    g.0[y] = v;
                    changed = true;
                }
            }
        }
        if !changed {
            return g;
        }
    }
}

/// `x -> inf_h h(h)^{-1} f(hx)`.
pub fn regularized_minorant(inst: &Instance, f: &FunctionTable) -> Result<FunctionTable, EnvelopeError> {
    regularize(inst, f, Side::Lower)
}

/// `x -> sup_h h(h)^{-1} f(hx)`.
pub fn regularized_majorant(inst: &Instance, f: &FunctionTable) -> Result<FunctionTable, EnvelopeError> {
    regularize(inst, f, Side::Upper)
}

fn regularize(inst: &Instance, f: &FunctionTable, side: Side) -> Result<FunctionTable, EnvelopeError> {
    if !inst.flags().t_group {
        return Err(EnvelopeError::TargetNotGroup);
    }
    let p = inst.poset();
    let out = (0..inst.nx())
        .map(|x| {
            let terms = (0..inst.nh()).map(|h| inst.hs_inv(h, f.get(inst.hx(h, x))).expect("T is a group"));
            match side {
                Side::Lower => terms.fold(p.top(), |a, b| p.meet(a, b)),
                Side::Upper => terms.fold(p.bottom(), |a, b| p.join(a, b)),
            }
        })
        .collect();
    Ok(FunctionTable(out))
}

/// `x -> t f(x)` for an element `t` of `T`.
pub fn left_multiply(inst: &Instance, t: usize, f: &FunctionTable) -> FunctionTable {
    FunctionTable(f.values().iter().map(|&v| inst.ts(t, v)).collect())
}

/// Checks `f(hx) R h(h) f(x)` for `h` in `gens` only, after confirming that
/// `gens` generates `H` in `mode`. Group mode is accepted for `=` only.
pub fn check_on_generators(
    inst: &Instance,
    f: &FunctionTable,
    gens: &[usize],
    mode: GenerationMode,
    rel: Relation,
) -> Result<bool, EnvelopeError> {
    if mode == GenerationMode::Group && rel != Relation::Eq {
        return Err(EnvelopeError::GroupModeRelation);
    }
    if !inst.h().is_generating(gens, mode)? {
        return Err(EnvelopeError::NotGenerating);
    }
    Ok(relation_witness(inst, f, gens.iter().copied(), rel).is_none())
}

/// `f(hx) R h(h) f(x)` for every `h` and `x`.
pub fn check_everywhere(inst: &Instance, f: &FunctionTable, rel: Relation) -> bool {
    relation_witness(inst, f, 0..inst.nh(), rel).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::CarrierAction;
    use crate::action::OrderedAction;
    use crate::algebra::{FiniteSemigroup, Homomorphism};
    use crate::fixtures::*;
    use crate::order::{CompletedPoset, Poset};
    use proptest::prelude::*;

    fn t(v: &[usize]) -> FunctionTable {
        FunctionTable(v.to_vec())
    }

    const BOTH: [Algorithm; 2] = [Algorithm::BruteForce, Algorithm::Orbitwise];

    #[test]
    fn classify_examples() {
        let inst = diamond_swap();
        assert_eq!(classify(&inst, &t(&[1, 2])), ClassSpec::ALL.into_iter().collect());
        assert!(classify(&inst, &t(&[1, 1])).is_empty());
        assert_eq!(membership_witness(&inst, &t(&[1, 1]), ClassSpec::Sub), Some((Some(1), 0)));
    }

    #[test]
    fn synthetic_constants_are_hgc_not_hg() {
        let inst = diamond_swap_antichain();
        for c in [inst.bottom(), inst.top()] {
            let f = FunctionTable::constant(2, c);
            let cls = classify(&inst, &f);
            assert!(cls.contains(&ClassSpec::Hgc) && !cls.contains(&ClassSpec::Hg));
        }
    }

    #[test]
    fn non_homogeneous_lower_hg_is_bottom_constant() {
        let inst = diamond_swap();
        for alg in BOTH {
            assert_eq!(lower_envelope(&inst, &t(&[1, 1]), ClassSpec::Hg, alg).unwrap(), t(&[0, 0]));
        }
    }

    #[test]
    fn homogeneous_function_is_its_own_envelope() {
        let inst = diamond_swap();
        let f = t(&[1, 2]);
        for class in ClassSpec::ALL {
            for side in [Side::Lower, Side::Upper] {
                assert_eq!(envelope(&inst, &f, class, side, Algorithm::BruteForce).unwrap(), f);
            }
        }
    }

    #[test]
    fn invariant_envelopes_are_constants() {
        let inst = chain_invariant();
        let f = t(&[0, 2]);
        for alg in BOTH {
            assert_eq!(lower_envelope(&inst, &f, ClassSpec::Hg, alg).unwrap(), t(&[0, 0]));
            assert_eq!(upper_envelope(&inst, &f, ClassSpec::Hg, alg).unwrap(), t(&[2, 2]));
        }
    }

    #[test]
    fn empty_minorant_set_gives_synthetic_constant() {
        let inst = diamond_swap_antichain();
        let bot = FunctionTable::constant(2, inst.bottom());
        let top = FunctionTable::constant(2, inst.top());
        for alg in BOTH {
            assert_eq!(lower_envelope(&inst, &bot, ClassSpec::Hg, alg).unwrap(), bot);
            assert_eq!(upper_envelope(&inst, &top, ClassSpec::Hg, alg).unwrap(), top);
        }
    }

    #[test]
    fn orbitwise_preconditions() {
        let inst = diamond_swap();
        assert_eq!(
            lower_envelope(&inst, &t(&[1, 1]), ClassSpec::Sub, Algorithm::Orbitwise),
            Err(EnvelopeError::OrbitwiseClass(ClassSpec::Sub))
        );
        let lz = FiniteSemigroup::left_zero(&["l", "r"]).unwrap();
        let triv = FiniteSemigroup::trivial("e");
        let hom = Homomorphism::new(lz.clone(), triv.clone(), vec![0, 0]).unwrap();
        let codomain = OrderedAction::new(triv, CompletedPoset::new(Poset::chain(2)), vec![vec![0, 1]]).unwrap();
        let semi = Instance::new(hom, CarrierAction::regular(lz), codomain).unwrap();
        assert_eq!(
            lower_envelope(&semi, &t(&[0, 1]), ClassSpec::Hg, Algorithm::Orbitwise),
            Err(EnvelopeError::OrbitwiseNeedsGroups)
        );
    }

    #[test]
    fn regularization_examples() {
        let inst = diamond_swap();
        assert_eq!(regularized_minorant(&inst, &t(&[1, 1])).unwrap(), t(&[0, 0]));
        assert_eq!(regularized_majorant(&inst, &t(&[1, 1])).unwrap(), t(&[3, 3]));
        let f = t(&[1, 2]);
        assert_eq!(regularized_minorant(&inst, &f).unwrap(), f);
        assert_eq!(regularized_majorant(&inst, &f).unwrap(), f);
        let b = chain_invariant();
        assert_eq!(regularized_minorant(&b, &t(&[0, 2])).unwrap(), t(&[0, 0]));
        assert_eq!(regularized_majorant(&b, &t(&[0, 2])).unwrap(), t(&[2, 2]));
    }

    #[test]
    fn left_multiply_examples() {
        let inst = diamond_swap();
        let f = t(&[1, 2]);
        let gf = left_multiply(&inst, 1, &f);
        assert_eq!(gf, t(&[2, 1]));
        assert!(is_member(&inst, &gf, ClassSpec::Hg));
        assert_eq!(left_multiply(&inst, 0, &f), f);
        let anti = diamond_swap_antichain();
        let bot = FunctionTable::constant(2, anti.bottom());
        assert_eq!(left_multiply(&anti, 1, &bot), bot);
    }

    fn z4_parity() -> Instance {
        let z4 = FiniteSemigroup::cyclic(4, "g");
        let hom = Homomorphism::new(z4.clone(), z2(), vec![0, 1, 0, 1]).unwrap();
        let codomain = OrderedAction::new(
            z2(),
            CompletedPoset::new(Poset::antichain(&["p", "q"]).unwrap()),
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        Instance::new(hom, CarrierAction::regular(z4), codomain).unwrap()
    }

    #[test]
    fn generator_check_matches_full_check() {
        let inst = diamond_swap();
        assert!(check_on_generators(&inst, &t(&[1, 2]), &[1], GenerationMode::Semigroup, Relation::Eq).unwrap());
        let z4 = z4_parity();
        let mut compared = 0;
        for f in z4.all_functions() {
            for rel in Relation::ALL {
                let g = check_on_generators(&z4, &f, &[1], GenerationMode::Semigroup, rel).unwrap();
                assert_eq!(g, check_everywhere(&z4, &f, rel), "{f:?} {rel:?}");
                compared += 1;
            }
        }
        assert_eq!(compared, 4usize.pow(4) * 3);
    }

    #[test]
    fn generator_check_errors() {
        let inst = diamond_swap();
        let f = t(&[1, 2]);
        assert_eq!(
            check_on_generators(&inst, &f, &[0], GenerationMode::Semigroup, Relation::Le),
            Err(EnvelopeError::NotGenerating)
        );
        assert_eq!(
            check_on_generators(&inst, &f, &[1], GenerationMode::Group, Relation::Le),
            Err(EnvelopeError::GroupModeRelation)
        );
        assert!(check_on_generators(&inst, &f, &[1], GenerationMode::Group, Relation::Eq).unwrap());
    }

    #[test]
    fn relaxation_matches_brute_force() {
        for inst in [diamond_swap(), fixed_point_gap(), fixed_point_gap_antichain(), z4_parity()] {
            for f in inst.all_functions() {
                assert_eq!(
                    greatest_sub_minorant(&inst, &f),
                    lower_envelope(&inst, &f, ClassSpec::Sub, Algorithm::BruteForce).unwrap()
                );
                assert_eq!(
                    least_super_majorant(&inst, &f),
                    upper_envelope(&inst, &f, ClassSpec::Super, Algorithm::BruteForce).unwrap()
                );
            }
        }
    }

    #[test]
    fn member_index_matches_brute_force() {
        let inst = fixed_point_gap_antichain();
        let members = ClassMembers::new(&inst);
        for f in inst.all_functions() {
            for class in ClassSpec::ALL {
                for side in [Side::Lower, Side::Upper] {
                    assert_eq!(
                        members.envelope(&inst, &f, class, side),
                        envelope(&inst, &f, class, side, Algorithm::BruteForce).unwrap()
                    );
                }
            }
        }
    }

    fn fixture() -> impl Strategy<Value = Instance> {
        prop_oneof![
            Just(diamond_swap()),
            Just(chain_invariant()),
            Just(fixed_point_gap()),
            Just(fixed_point_gap_antichain()),
            Just(z4_parity()),
        ]
    }

    fn with_functions() -> impl Strategy<Value = (Instance, FunctionTable, FunctionTable)> {
        fixture().prop_flat_map(|inst| {
            let (nx, nc) = (inst.nx(), inst.nc());
            let tab = proptest::collection::vec(0..nc, nx).prop_map(FunctionTable);
            (Just(inst), tab.clone(), tab)
        })
    }

    proptest! {
        #[test]
        fn envelopes_are_monotone((inst, f, g) in with_functions()) {
            let lo = FunctionTable(f.values().iter().zip(g.values()).map(|(&a, &b)| inst.poset().meet(a, b)).collect());
            for class in ClassSpec::ALL {
                for side in [Side::Lower, Side::Upper] {
                    let el = envelope(&inst, &lo, class, side, Algorithm::BruteForce).unwrap();
                    let ef = envelope(&inst, &f, class, side, Algorithm::BruteForce).unwrap();
                    prop_assert!(inst.fn_leq(&el, &ef));
                }
            }
        }

        #[test]
        fn envelopes_fix_class_members((inst, f, _g) in with_functions()) {
            for class in classify(&inst, &f) {
                for side in [Side::Lower, Side::Upper] {
                    prop_assert_eq!(&envelope(&inst, &f, class, side, Algorithm::BruteForce).unwrap(), &f);
                }
            }
        }

        #[test]
        fn regularization_brackets_f((inst, f, _g) in with_functions()) {
            let lo = regularized_minorant(&inst, &f).unwrap();
            let hi = regularized_majorant(&inst, &f).unwrap();
            prop_assert!(inst.fn_leq(&lo, &f) && inst.fn_leq(&f, &hi));
            if is_member(&inst, &f, ClassSpec::Hgc) {
                prop_assert_eq!(&lo, &f);
                prop_assert_eq!(&hi, &f);
            }
        }

        #[test]
        fn identity_multiplication_is_identity((inst, f, _g) in with_functions()) {
            let e = inst.t().identity().unwrap();
            prop_assert_eq!(left_multiply(&inst, e, &f), f);
        }

        #[test]
        fn orbitwise_agrees_with_oracle((inst, f, _g) in with_functions()) {
            for class in [ClassSpec::Hg, ClassSpec::Hgc] {
                for side in [Side::Lower, Side::Upper] {
                    prop_assert_eq!(
                        envelope(&inst, &f, class, side, Algorithm::Orbitwise).unwrap(),
                        envelope(&inst, &f, class, side, Algorithm::BruteForce).unwrap()
                    );
                }
            }
        }
    }
}
