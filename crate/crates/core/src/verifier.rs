//! Instance families (exhaustive or seeded random), batch statement runs and
//! the counterexample hunt.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{CarrierAction, OrderedAction};
use crate::algebra::{FiniteSemigroup, Homomorphism};
use crate::envelope::{envelope, Algorithm, ClassSpec, Side};
use crate::instance::{FunctionTable, Instance, InstanceFlags};
use crate::io::InstanceFile;
use crate::order::{CompletedPoset, Poset};
use crate::statements::{Checker, EnvelopeMode, StatementId, StatementReport, Verdict, Witness};
use crate::util::{mix_seed, permutations};

/// Largest bounds accepted by the exhaustive mode.
pub const EXHAUSTIVE_LIMIT: Bounds = Bounds { max_h: 4, max_x: 3, max_s: 4 };
/// Largest bounds accepted by the random mode.
pub const RANDOM_LIMIT: Bounds = Bounds { max_h: 8, max_x: 8, max_s: 5 };

/// Instances handed to the worker pool at once.
const CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifierError {
    #[error("bounds {bounds} exceed the {mode} limit {limit}")]
    BoundsTooLarge { bounds: Bounds, limit: Bounds, mode: &'static str },
    #[error("every bound must be at least 1, got {0}")]
    ZeroBound(Bounds),
    #[error("the constraints admit no instance: {0}")]
    Unsatisfiable(&'static str),
    #[error("no target statements given")]
    EmptyTargets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_h: usize,
    pub max_x: usize,
    pub max_s: usize,
}

impl Bounds {
    pub fn new(max_h: usize, max_x: usize, max_s: usize) -> Self {
        Bounds { max_h, max_x, max_s }
    }

    fn within(self, limit: Bounds) -> bool {
        self.max_h <= limit.max_h && self.max_x <= limit.max_x && self.max_s <= limit.max_s
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.max_h, self.max_x, self.max_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum FamilyMode {
    Exhaustive,
    Random { seed: u64, count: usize },
}

/// Required values of instance flags; `None` leaves a flag free.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    pub h_group: Option<bool>,
    #[serde(default)]
    pub h_monoid: Option<bool>,
    pub t_group: Option<bool>,
    pub free: Option<bool>,
    pub t_commutative: Option<bool>,
}

impl Constraints {
    pub fn groups() -> Self {
        Constraints { h_group: Some(true), t_group: Some(true), ..Default::default() }
    }

    pub fn admits(&self, f: InstanceFlags) -> bool {
        let ok = |want: Option<bool>, have: bool| want.is_none_or(|w| w == have);
        ok(self.h_group, f.h_group)
            && ok(self.h_monoid, f.h_monoid)
            && ok(self.t_group, f.t_group) && ok(self.free, f.free) && ok(self.t_commutative, f.t_commutative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFamily {
    pub bounds: Bounds,
    pub mode: FamilyMode,
    pub constraints: Constraints,
}

/// A lazy, deterministic stream of instances.
pub type InstanceStream = Box<dyn Iterator<Item = Instance> + Send>;

pub fn enumerate_instances(family: &InstanceFamily) -> Result<InstanceStream, VerifierError> {
    let b = family.bounds;
    if b.max_h == 0 || b.max_x == 0 || b.max_s == 0 {
        return Err(VerifierError::ZeroBound(b));
    }
    let c = family.constraints;
    if c.h_group == Some(true) && c.t_group == Some(false) {
        return Err(VerifierError::Unsatisfiable("the image of a group is a group"));
    }
    if c.free == Some(false) && b.max_h < 2 {
        return Err(VerifierError::Unsatisfiable("the one-element semigroup acts freely"));
    }
    match family.mode {
        FamilyMode::Exhaustive => {
            if !b.within(EXHAUSTIVE_LIMIT) {
                return Err(VerifierError::BoundsTooLarge { bounds: b, limit: EXHAUSTIVE_LIMIT, mode: "exhaustive" });
            }
            Ok(exhaustive(b, c))
        }
        FamilyMode::Random { seed, count } => {
            if !b.within(RANDOM_LIMIT) {
                return Err(VerifierError::BoundsTooLarge { bounds: b, limit: RANDOM_LIMIT, mode: "random" });
            }
            if c.h_group == Some(true) && c.t_commutative == Some(false) && b.max_h < 6 {
                return Err(VerifierError::Unsatisfiable("groups of order below 6 are commutative"));
            }
            Ok(Box::new((0..count).map(move |i| random_instance(b, c, mix_seed(seed, i as u64)))))
        }
    }
}

fn semigroups(n: usize) -> &'static [FiniteSemigroup] {
    static CACHE: OnceLock<Vec<Vec<FiniteSemigroup>>> = OnceLock::new();
    &CACHE.get_or_init(|| (1..=4).map(|n| FiniteSemigroup::enumerate(n, "h")).collect())[n - 1]
}

fn complete_posets(n: usize) -> &'static [Poset] {
    static CACHE: [OnceLock<Vec<Poset>>; 6] = [const { OnceLock::new() }; 6];
    CACHE[n - 1].get_or_init(|| Poset::enumerate(n).into_iter().filter(Poset::is_order_complete).collect())
}

fn monotone_maps(p: &Poset) -> Arc<Vec<Vec<usize>>> {
    static CACHE: OnceLock<Mutex<BTreeMap<Vec<u64>, Arc<Vec<Vec<usize>>>>>> = OnceLock::new();
    let key: Vec<u64> = (0..p.len()).map(|i| p.up_mask(i)).collect();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("cache lock").get(&key) {
        return Arc::clone(v);
    }
    let maps = Arc::new(p.monotone_maps());
    cache.lock().expect("cache lock").insert(key, Arc::clone(&maps));
    maps
}

fn keep_h(h: &FiniteSemigroup, c: Constraints) -> bool {
    c.h_group.is_none_or(|g| g == h.is_group()) && c.h_monoid.is_none_or(|m| m == h.is_monoid())
}

fn identity_map(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Whether the assignment for `a` agrees with every fully assigned product.
fn consistent(h: &FiniteSemigroup, maps: &[Option<&[usize]>], a: usize) -> bool {
    let composes = |p: &[usize], q: &[usize], r: &[usize]| q.iter().zip(r).all(|(&qx, &rx)| p[qx] == rx);
    let ma = maps[a].expect("assigned");
    for b in 0..h.len() {
        let Some(mb) = maps[b] else { continue };
        if let Some(mab) = maps[h.mul(a, b)] {
            if !composes(ma, mb, mab) {
                return false;
            }
        }
        if let Some(mba) = maps[h.mul(b, a)] {
            if !composes(mb, ma, mba) {
                return false;
            }
        }
        for c in 0..h.len() {
            if h.mul(b, c) == a {
                if let Some(mc) = maps[c] {
                    if !composes(mb, mc, ma) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Lazily enumerates homomorphisms from `h` into maps on `n` points drawn
/// from `cands`, with the identity (if any) sent to the identity map.
struct HomIter {
    h: FiniteSemigroup,
    cands: Arc<Vec<Vec<usize>>>,
    order: Vec<usize>,
    level_cands: Vec<Vec<usize>>,
    assigned: Vec<Option<usize>>,
    ptr: Vec<usize>,
    level: usize,
    done: bool,
}

impl HomIter {
    fn new(h: FiniteSemigroup, n: usize, cands: Arc<Vec<Vec<usize>>>) -> Self {
        let id = identity_map(n);
        let mut order: Vec<usize> = (0..h.len()).collect();
        if let Some(e) = h.identity() {
            order.retain(|&a| a != e);
            order.insert(0, e);
        }
        let all: Vec<usize> = (0..cands.len()).collect();
        let level_cands = order
            .iter()
            .map(|&a| {
                if Some(a) == h.identity() {
                    cands.iter().position(|m| *m == id).into_iter().collect()
                } else {
                    all.clone()
                }
            })
            .collect();
        let k = h.len();
        HomIter { h, cands, order, level_cands, assigned: vec![None; k], ptr: vec![0; k], level: 0, done: false }
    }

    fn maps(&self) -> Vec<Option<&[usize]>> {
        self.assigned.iter().map(|c| c.map(|i| self.cands[i].as_slice())).collect()
    }
}

impl Iterator for HomIter {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Vec<Vec<usize>>> {
        let k = self.order.len();
        loop {
            if self.done {
                return None;
            }
            let l = self.level;
            if l == k {
                let out = self.assigned.iter().map(|c| self.cands[c.expect("complete")].clone()).collect();
                self.level = k - 1;
                return Some(out);
            }
            let a = self.order[l];
            if self.ptr[l] < self.level_cands[l].len() {
                self.assigned[a] = Some(self.level_cands[l][self.ptr[l]]);
                self.ptr[l] += 1;
                if consistent(&self.h, &self.maps(), a) {
                    self.level += 1;
                    if self.level < k {
                        self.ptr[self.level] = 0;
                    }
                }
            } else {
                self.assigned[a] = None;
                if l == 0 {
                    self.done = true;
                } else {
                    self.level -= 1;
                }
            }
        }
    }
}

/// Randomized depth-first search for one homomorphism; falls back to the
/// trivial action when the node budget runs out.
fn random_hom<R: Rng>(
    h: &FiniteSemigroup,
    n: usize,
    rng: &mut R,
    sample: &mut dyn FnMut(&mut R) -> Vec<usize>,
    fallbacks: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    const WIDTH: usize = 24;
    const BUDGET: usize = 4000;
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.shuffle(rng);
    if let Some(e) = h.identity() {
        order.retain(|&a| a != e);
        order.insert(0, e);
    }
    let mut maps: Vec<Option<Vec<usize>>> = vec![None; h.len()];
    let mut budget = BUDGET;

    #[allow(clippy::too_many_arguments)]
    fn go<R: Rng>(
        h: &FiniteSemigroup,
        n: usize,
        order: &[usize],
        l: usize,
        maps: &mut Vec<Option<Vec<usize>>>,
        rng: &mut R,
        sample: &mut dyn FnMut(&mut R) -> Vec<usize>,
        fallbacks: &[Vec<usize>],
        budget: &mut usize,
    ) -> bool {
        if l == order.len() {
            return true;
        }
        let a = order[l];
        let cands: Vec<Vec<usize>> = if Some(a) == h.identity() {
            vec![identity_map(n)]
        } else {
            let mut c: Vec<Vec<usize>> = (0..WIDTH).map(|_| sample(rng)).collect();
            let mut fb = fallbacks.to_vec();
            fb.shuffle(rng);
            c.extend(fb);
            c
        };
        for m in cands {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            maps[a] = Some(m);
            let view: Vec<Option<&[usize]>> = maps.iter().map(|m| m.as_deref()).collect();
            if consistent(h, &view, a) && go(h, n, order, l + 1, maps, rng, sample, fallbacks, budget) {
                return true;
            }
        }
        maps[a] = None;
        false
    }

    if go(h, n, &order, 0, &mut maps, rng, sample, fallbacks, &mut budget) {
        maps.into_iter().map(|m| m.expect("complete")).collect()
    } else {
        vec![identity_map(n); h.len()]
    }
}

fn relabel_rows(rows: &[Vec<usize>], perm: &[usize]) -> Vec<Vec<usize>> {
    rows.iter()
        .map(|r| {
            let mut out = vec![0; r.len()];
            for (x, &y) in r.iter().enumerate() {
                out[perm[x]] = perm[y];
            }
            out
        })
        .collect()
}

/// Whether `rows` is lexicographically least among its relabelings by `perms`.
fn is_canonical(rows: &[Vec<usize>], perms: &[Vec<usize>]) -> bool {
    perms.iter().all(|p| relabel_rows(rows, p).as_slice() >= rows)
}

/// Builds the instance with `T` the image of `rho` in the monoid of maps on `S`.
fn assemble(h: &FiniteSemigroup, x_rows: Vec<Vec<usize>>, s: &Poset, rho: &[Vec<usize>]) -> Option<Instance> {
    let mut images: Vec<&Vec<usize>> = Vec::new();
    let hom: Vec<usize> = rho
        .iter()
        .map(|m| {
            images.iter().position(|i| *i == m).unwrap_or_else(|| {
                images.push(m);
                images.len() - 1
            })
        })
        .collect();
    let nt = images.len();
    let table: Vec<Vec<usize>> = (0..nt)
        .map(|a| {
            (0..nt)
                .map(|b| {
                    let comp: Vec<usize> = images[b].iter().map(|&y| images[a][y]).collect();
                    images.iter().position(|i| **i == comp).expect("image is closed")
                })
                .collect()
        })
        .collect();
    let t = FiniteSemigroup::new((0..nt).map(|i| format!("t{i}")).collect(), table).ok()?;
    let hom = Homomorphism::new(h.clone(), t.clone(), hom).ok()?;
    let nx = x_rows.first().map_or(0, Vec::len);
    let carrier = CarrierAction::new(h.clone(), (0..nx).map(|i| format!("x{i}")).collect(), x_rows).ok()?;
    let base: Vec<Vec<usize>> = images.iter().map(|m| (*m).clone()).collect();
    let codomain = OrderedAction::new(t, CompletedPoset::new(s.clone()), base).ok()?;
    Instance::new(hom, carrier, codomain).ok()
}

fn all_maps(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut digits = vec![0; n];
    loop {
        out.push(digits.clone());
        if !crate::util::next_tuple(&mut digits, n) {
            return out;
        }
    }
}

fn exhaustive(b: Bounds, c: Constraints) -> InstanceStream {
    let hs: Vec<FiniteSemigroup> =
        (1..=b.max_h).flat_map(|n| semigroups(n).iter().filter(|h| keep_h(h, c)).cloned()).collect();
    let posets: Arc<Vec<Poset>> = Arc::new((1..=b.max_s).flat_map(|n| complete_posets(n).iter().cloned()).collect());
    Box::new(hs.into_iter().flat_map(move |h| {
        let posets = Arc::clone(&posets);
        (1..=b.max_x).flat_map(move |nx| {
            let h = h.clone();
            let posets = Arc::clone(&posets);
            let cands = if h.is_group() { permutations(nx) } else { all_maps(nx) };
            let perms = permutations(nx);
            let identity = h.identity();
            HomIter::new(h.clone(), nx, Arc::new(cands))
                .filter(move |rows| is_canonical(rows, &perms))
                .filter(move |rows| {
                    let e = identity;
                    c.free.is_none_or(|want| {
                        let free = (0..nx).all(|x| (0..rows.len()).all(|a| rows[a][x] != x || Some(a) == e));
                        free == want
                    })
                })
                .flat_map(move |x_rows| {
                    let h = h.clone();
                    let posets = Arc::clone(&posets);
                    (0..posets.len()).flat_map(move |si| {
                        let s = posets[si].clone();
                        let auts = s.automorphisms();
                        let cands = if h.is_group() { Arc::new(auts.clone()) } else { monotone_maps(&s) };
                        let h2 = h.clone();
                        let x_rows = x_rows.clone();
                        HomIter::new(h.clone(), s.len(), cands)
                            .filter(move |rho| is_canonical(rho, &auts))
                            .filter_map(move |rho| assemble(&h2, x_rows.clone(), &s, &rho))
                            .filter(move |inst| c.admits(inst.flags()))
                    })
                })
        })
    }))
}

fn random_pool(n: usize, c: Constraints) -> Vec<FiniteSemigroup> {
    let p = "h";
    let pool: Vec<FiniteSemigroup> = if n <= 4 {
        semigroups(n).to_vec()
    } else {
        let z = |k| FiniteSemigroup::cyclic(k, p);
        let mut v = vec![z(n)];
        match n {
            6 => v.push(FiniteSemigroup::permutation_group(&[vec![1, 0, 2], vec![1, 2, 0]], p)),
            8 => {
                v.push(z(2).direct_product(&z(4), p));
                v.push(z(2).direct_product(&z(2), p).direct_product(&z(2), p));
                v.push(FiniteSemigroup::permutation_group(&[vec![1, 2, 3, 0], vec![3, 2, 1, 0]], p));
            }
            _ => {}
        }
        v.push(FiniteSemigroup::null(n, p));
        v.push(FiniteSemigroup::left_zero(&(0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>()).expect("left zero"));
        v.push(z(n - 1).with_zero(p));
        for index in 2..=n {
            v.push(FiniteSemigroup::monogenic(index, n + 1 - index, p));
        }
        v
    };
    pool.into_iter().filter(|h| keep_h(h, c)).collect()
}

/// `H` acting on a disjoint union of coset spaces `H/K`.
fn random_group_action<R: Rng>(h: &FiniteSemigroup, max_x: usize, free: Option<bool>, rng: &mut R) -> Option<Vec<Vec<usize>>> {
    let n = h.len();
    let e = h.identity().expect("group");
    let subgroups = h.subgroups();
    let trivial = vec![e];
    let mut orbits: Vec<&Vec<usize>> = Vec::new();
    let mut remaining = rng.gen_range(1..=max_x);
    if free == Some(true) {
        if n > max_x {
            return None;
        }
        remaining = n * rng.gen_range(1..=max_x / n);
    }
    if free == Some(false) {
        let nontrivial: Vec<&Vec<usize>> = subgroups.iter().filter(|k| k.len() > 1 && n / k.len() <= remaining).collect();
        orbits.push(nontrivial.choose(rng)?);
        remaining -= n / orbits[0].len();
    }
    while remaining > 0 {
        let fits: Vec<&Vec<usize>> = subgroups
            .iter()
            .filter(|k| n / k.len() <= remaining && (free != Some(true) || **k == trivial))
            .collect();
        let k = fits.choose(rng).expect("H itself always fits");
        remaining -= n / k.len();
        orbits.push(k);
    }
    // Points are left cosets gK, listed orbit by orbit.
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for k in &orbits {
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for g in 0..n {
            let mut c: Vec<usize> = k.iter().map(|&x| h.mul(g, x)).collect();
            c.sort_unstable();
            if !seen.contains(&c) {
                seen.push(c);
            }
        }
        cosets.extend(seen);
    }
    let offsets: Vec<usize> = orbits
        .iter()
        .scan(0, |acc, k| {
            let start = *acc;
            *acc += n / k.len();
            Some(start)
        })
        .collect();
    let orbit_of = |i: usize| offsets.iter().rposition(|&o| o <= i).expect("offset");
    let rows = (0..n)
        .map(|a| {
            (0..cosets.len())
                .map(|i| {
                    let mut moved: Vec<usize> = cosets[i].iter().map(|&g| h.mul(a, g)).collect();
                    moved.sort_unstable();
                    let o = orbit_of(i);
                    let end = offsets.get(o + 1).copied().unwrap_or(cosets.len());
                    (offsets[o]..end).find(|&j| cosets[j] == moved).expect("cosets are permuted")
                })
                .collect()
        })
        .collect();
    Some(rows)
}

fn random_instance(b: Bounds, c: Constraints, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(inst) = random_attempt(b, c, &mut rng) {
            if c.admits(inst.flags()) {
                return inst;
            }
        }
    }
}

fn random_attempt<R: Rng>(b: Bounds, c: Constraints, rng: &mut R) -> Option<Instance> {
    let nh = rng.gen_range(1..=b.max_h);
    let pool = random_pool(nh, c);
    let h = pool.choose(rng)?.clone();
    let x_rows = if h.is_group() {
        random_group_action(&h, b.max_x, c.free, rng)?
    } else {
        let nx = rng.gen_range(1..=b.max_x);
        let fallbacks: Vec<Vec<usize>> =
            std::iter::once(identity_map(nx)).chain((0..nx).map(|x| vec![x; nx])).collect();
        random_hom(&h, nx, rng, &mut |r: &mut R| (0..nx).map(|_| r.gen_range(0..nx)).collect(), &fallbacks)
    };
    let ns = rng.gen_range(1..=b.max_s);
    let s = complete_posets(ns).choose(rng)?.clone();
    let rho = if h.is_group() {
        let auts = s.automorphisms();
        let mut pick = |r: &mut R| auts.choose(r).expect("identity is an automorphism").clone();
        random_hom(&h, ns, rng, &mut pick, &[identity_map(ns)])
    } else {
        let maps = monotone_maps(&s);
        let fallbacks: Vec<Vec<usize>> = std::iter::once(identity_map(ns)).chain((0..ns).map(|x| vec![x; ns])).collect();
        let mut pick = |r: &mut R| maps.choose(r).expect("identity is monotone").clone();
        random_hom(&h, ns, rng, &mut pick, &fallbacks)
    };
    assemble(&h, x_rows, &s, &rho)
}

/// Whether two instances agree up to relabeling `H`, `X` and `S`. Brute
/// force over all bijections; meant for small instances.
pub fn same_up_to_relabeling(a: &Instance, b: &Instance) -> bool {
    let (pa, pb) = (a.poset().base(), b.poset().base());
    if a.nh() != b.nh() || a.nx() != b.nx() || pa.len() != pb.len() || a.t().len() != b.t().len() {
        return false;
    }
    let (ha, hb) = (a.h(), b.h());
    let s_isos: Vec<Vec<usize>> = permutations(pa.len())
        .into_iter()
        .filter(|s| (0..pa.len()).all(|i| (0..pa.len()).all(|j| pa.leq(i, j) == pb.leq(s[i], s[j]))))
        .collect();
    let x_perms = permutations(a.nx());
    permutations(a.nh())
        .into_iter()
        .filter(|f| (0..ha.len()).all(|i| (0..ha.len()).all(|j| f[ha.mul(i, j)] == hb.mul(f[i], f[j]))))
        .any(|f| {
            x_perms.iter().any(|p| (0..a.nh()).all(|h| (0..a.nx()).all(|x| p[a.hx(h, x)] == b.hx(f[h], p[x]))))
                && s_isos
                    .iter()
                    .any(|s| (0..a.nh()).all(|h| (0..pa.len()).all(|c| s[a.hs(h, c)] == b.hs(f[h], s[c]))))
        })
}

/// Which functions a suite run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "f_mode", content = "n", rename_all = "lowercase")]
pub enum FMode {
    All,
    Sampled(usize),
}

/// The functions selected by `fmode`, named by their compact label.
pub fn suite_functions(inst: &Instance, fmode: FMode, seed: u64) -> Vec<(String, FunctionTable)> {
    let fs: Vec<FunctionTable> = match fmode {
        FMode::All => inst.all_functions().collect(),
        FMode::Sampled(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| inst.random_function(&mut rng)).collect()
        }
    };
    fs.into_iter().map(|f| (inst.function_label(&f), f)).collect()
}

/// Every statement on `inst`: the global ones once, the rest per function.
pub fn run_suite(inst: &Instance, fmode: FMode, mode: EnvelopeMode, seed: u64) -> Vec<StatementReport> {
    run_statements(inst, StatementId::ALL, fmode, mode, seed)
}

pub fn run_statements(
    inst: &Instance,
    stmts: &[StatementId],
    fmode: FMode,
    mode: EnvelopeMode,
    seed: u64,
) -> Vec<StatementReport> {
    let ck = Checker::new(inst, mode, seed);
    let mut out = ck.check_global(stmts);
    if stmts.iter().any(|s| s.needs_function()) {
        for (name, f) in suite_functions(inst, fmode, seed) {
            out.extend(ck.check_function(&name, &f, stmts));
        }
    }
    out
}

/// Applies `f` to every instance of the stream on the worker pool, keeping
/// stream order.
pub fn map_instances<T, F>(stream: impl Iterator<Item = Instance>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &Instance) -> T + Sync,
{
    let mut out = Vec::new();
    let mut stream = stream.enumerate().peekable();
    while stream.peek().is_some() {
        let chunk: Vec<(usize, Instance)> = stream.by_ref().take(CHUNK).collect();
        out.extend(chunk.par_iter().map(|(i, inst)| f(*i, inst)).collect::<Vec<_>>());
    }
    out
}

/// Outcome counts for one statement over a family.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub holds: u64,
    /// Failures of parts whose hypotheses held.
    pub fails: u64,
    /// Failures only on parts whose hypotheses did not hold.
    pub fails_outside_hypotheses: u64,
    pub skipped: u64,
    pub first_failure: Option<FailureRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub instance_index: usize,
    pub function: Option<String>,
    pub witness: Witness,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survey {
    pub instances: usize,
    pub tallies: BTreeMap<StatementId, Tally>,
}

impl Survey {
    fn absorb(&mut self, index: usize, reports: &[StatementReport]) {
        self.instances += 1;
        for r in reports {
            let t = self.tallies.entry(r.stmt).or_default();
            match &r.verdict {
                Verdict::Holds => t.holds += 1,
                Verdict::Skipped { .. } => t.skipped += 1,
                Verdict::Fails(w) => {
                    if w.hypotheses_met {
                        t.fails += 1;
                    } else {
                        t.fails_outside_hypotheses += 1;
                    }
                    let better = match &t.first_failure {
                        None => true,
                        Some(prev) => w.hypotheses_met && !prev.witness.hypotheses_met,
                    };
                    if better {
                        t.first_failure =
                            Some(FailureRecord { instance_index: index, function: r.function.clone(), witness: w.clone() });
                    }
                }
            }
        }
    }

    /// Failures under hypotheses, summed over `stmts`.
    pub fn failures(&self, stmts: &[StatementId]) -> u64 {
        stmts.iter().filter_map(|s| self.tallies.get(s)).map(|t| t.fails).sum()
    }
}

/// Runs `stmts` on every instance of the family.
pub fn survey(
    family: &InstanceFamily,
    stmts: &[StatementId],
    fmode: FMode,
    mode: EnvelopeMode,
    seed: u64,
) -> Result<Survey, VerifierError> {
    let stream = enumerate_instances(family)?;
    let per = map_instances(stream, |i, inst| run_statements(inst, stmts, fmode, mode, mix_seed(seed, i as u64)));
    let mut s = Survey::default();
    for (i, reports) in per.iter().enumerate() {
        s.absorb(i, reports);
    }
    Ok(s)
}

/// First disagreement between the orbitwise and brute-force envelopes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub function: String,
    pub class: ClassSpec,
    pub side: Side,
    pub orbitwise: String,
    pub oracle: String,
}

/// Compares the orbitwise HG/HGC envelopes against brute force for every
/// function. Returns the number of comparisons and the first mismatch.
pub fn oracle_equivalence(inst: &Instance) -> (u64, Option<Mismatch>) {
    let mut compared = 0;
    for f in inst.all_functions() {
        for class in [ClassSpec::Hg, ClassSpec::Hgc] {
            for side in [Side::Lower, Side::Upper] {
                let fast = envelope(inst, &f, class, side, Algorithm::Orbitwise).expect("groups");
                let slow = envelope(inst, &f, class, side, Algorithm::BruteForce).expect("brute force");
                compared += 1;
                if fast != slow {
                    return (
                        compared,
                        Some(Mismatch {
                            function: inst.function_label(&f),
                            class,
                            side,
                            orbitwise: inst.function_label(&fast),
                            oracle: inst.function_label(&slow),
                        }),
                    );
                }
            }
        }
    }
    (compared, None)
}

/// A statement failure found by the hunt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntResult {
    pub stmt: StatementId,
    pub instance_index: usize,
    /// Replayable file; the failing function is stored as `witness`.
    pub instance: InstanceFile,
    pub function: String,
    pub witness: Witness,
    pub oracle_confirmed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntOutcome {
    pub examined: usize,
    /// Fast-mode failures the oracle did not reproduce.
    pub unconfirmed: usize,
    pub findings: Vec<HuntResult>,
}

/// Name of the failing function inside a finding's instance file.
pub const WITNESS_FUNCTION: &str = "witness";

/// Functions per instance up to which the hunt enumerates every table.
const HUNT_ALL_FUNCTIONS: u128 = 4096;
const HUNT_SAMPLED: usize = 256;

/// Evaluates `targets` on the first `budget` instances of the family and
/// returns the failures that the brute-force oracle reproduces.
pub fn hunt(family: &InstanceFamily, targets: &[StatementId], budget: usize, seed: u64) -> Result<HuntOutcome, VerifierError> {
    if targets.is_empty() {
        return Err(VerifierError::EmptyTargets);
    }
    let stream = enumerate_instances(family)?.take(budget);
    let per = map_instances(stream, |i, inst| hunt_one(i, inst, targets, mix_seed(seed, i as u64)));
    let mut out = HuntOutcome { examined: per.len(), unconfirmed: 0, findings: Vec::new() };
    for (found, unconfirmed) in per {
        out.findings.extend(found);
        out.unconfirmed += unconfirmed;
    }
    Ok(out)
}

fn hunt_one(index: usize, inst: &Instance, targets: &[StatementId], seed: u64) -> (Vec<HuntResult>, usize) {
    let fmode = if inst.function_count() <= HUNT_ALL_FUNCTIONS { FMode::All } else { FMode::Sampled(HUNT_SAMPLED) };
    let fast = Checker::new(inst, EnvelopeMode::Fast, seed);
    let oracle = Checker::new(inst, EnvelopeMode::Oracle, seed);
    let mut found = Vec::new();
    let mut unconfirmed = 0;
    let functions = suite_functions(inst, fmode, seed);
    for &stmt in targets {
        let mut record = |function: Option<(&str, &FunctionTable)>, w: Witness| {
            let functions: Vec<(String, FunctionTable)> =
                function.map(|(_, f)| (WITNESS_FUNCTION.to_string(), f.clone())).into_iter().collect();
            found.push(HuntResult {
                stmt,
                instance_index: index,
                instance: InstanceFile::from_instance(inst, &functions),
                function: function.map_or_else(String::new, |(n, _)| n.to_string()),
                witness: w,
                oracle_confirmed: true,
            });
        };
        if !stmt.needs_function() {
            if fast.check_global(&[stmt])[0].verdict.is_failure() {
                match oracle.check_global(&[stmt]).remove(0).verdict {
                    Verdict::Fails(w) => record(None, w),
                    _ => unconfirmed += 1,
                }
            }
            continue;
        }
        for (name, f) in &functions {
            if !fast.check_function(name, f, &[stmt])[0].verdict.is_failure() {
                continue;
            }
            match oracle.check_function(name, f, &[stmt]).remove(0).verdict {
                Verdict::Fails(w) => {
                    record(Some((name, f)), w);
                    break;
                }
                _ => unconfirmed += 1,
            }
        }
    }
    (found, unconfirmed)
}

/// One line of `findings.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingRecord {
    pub file: String,
    pub digest: String,
    pub stmt: StatementId,
    pub instance_index: usize,
    pub function: String,
    pub witness: Witness,
    pub oracle_confirmed: bool,
}

/// Writes one instance file per finding and the `findings.jsonl` index.
pub fn write_findings(outcome: &HuntOutcome, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut index = String::new();
    let mut paths = Vec::new();
    for (k, r) in outcome.findings.iter().enumerate() {
        let name = format!("finding-{k:04}-{}.json", r.stmt.as_str().to_ascii_lowercase());
        let path = dir.join(&name);
        std::fs::write(&path, r.instance.to_json())?;
        let rec = FindingRecord {
            file: name,
            digest: r.instance.digest(),
            stmt: r.stmt,
            instance_index: r.instance_index,
            function: r.function.clone(),
            witness: r.witness.clone(),
            oracle_confirmed: r.oracle_confirmed,
        };
        index.push_str(&serde_json::to_string(&rec).expect("records serialize"));
        index.push('\n');
        paths.push(path);
    }
    std::fs::write(dir.join("findings.jsonl"), index)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn family(b: (usize, usize, usize), mode: FamilyMode, constraints: Constraints) -> InstanceFamily {
        InstanceFamily { bounds: Bounds::new(b.0, b.1, b.2), mode, constraints }
    }

    #[test]
    fn exhaustive_bounds_checked() {
        let f = family((6, 6, 6), FamilyMode::Exhaustive, Constraints::default());
        assert!(matches!(enumerate_instances(&f), Err(VerifierError::BoundsTooLarge { .. })));
        let f = family((0, 1, 1), FamilyMode::Exhaustive, Constraints::default());
        assert!(matches!(enumerate_instances(&f), Err(VerifierError::ZeroBound(_))));
    }

    #[test]
    fn small_group_family_contains_chain_invariant() {
        let f = family((2, 2, 3), FamilyMode::Exhaustive, Constraints::groups());
        let all: Vec<Instance> = enumerate_instances(&f).unwrap().collect();
        assert!(all.iter().all(|i| i.flags().h_group));
        let target = fixtures::chain_invariant();
        assert!(all.iter().any(|i| same_up_to_relabeling(i, &target)));
        assert!(all.iter().any(|i| same_up_to_relabeling(i, &fixtures::diamond_swap_antichain())));
    }

    #[test]
    fn small_group_family_hand_count() {
        // Z1 and Z2; carriers of size 1 or 2 (Z2: trivial or swap on 2 points,
        // trivial on 1); posets: the 1- and 2-element chain and the
        // 2-antichain (the antichain has a swap automorphism).
        // Z1: 2 carriers x 3 posets = 6.
        // Z2: carriers {1 point, 2 fixed, swap} = 3; posets: chain1, chain2
        // (trivial rho only), antichain (trivial or swap) = 4; 3 x 4 = 12.
        let f = family((2, 2, 2), FamilyMode::Exhaustive, Constraints::groups());
        assert_eq!(enumerate_instances(&f).unwrap().count(), 18);
    }

    #[test]
    fn random_stream_is_reproducible() {
        let f = family((4, 4, 5), FamilyMode::Random { seed: 42, count: 100 }, Constraints::default());
        let a: Vec<String> = enumerate_instances(&f).unwrap().map(|i| InstanceFile::from_instance(&i, &[]).digest()).collect();
        let b: Vec<String> = enumerate_instances(&f).unwrap().map(|i| InstanceFile::from_instance(&i, &[]).digest()).collect();
        assert_eq!(a.len(), 100);
        assert_eq!(a, b);
    }

    #[test]
    fn random_constraints_are_met() {
        for c in [
            Constraints::groups(),
            Constraints { free: Some(false), ..Constraints::groups() },
            Constraints { free: Some(true), ..Constraints::groups() },
            Constraints { h_group: Some(false), ..Default::default() },
        ] {
            let f = family((8, 8, 5), FamilyMode::Random { seed: 7, count: 40 }, c);
            for inst in enumerate_instances(&f).unwrap() {
                assert!(c.admits(inst.flags()), "{c:?} {}", inst.flags());
            }
        }
    }

    #[test]
    fn suite_on_diamond_swap_holds() {
        let inst = fixtures::diamond_swap();
        let reports = run_suite(&inst, FMode::All, EnvelopeMode::Fast, 0);
        assert_eq!(reports.len(), 2 + 16 * 16);
        assert!(reports.iter().all(|r| !r.verdict.is_failure()), "{:?}", reports.iter().find(|r| r.verdict.is_failure()));
        for id in StatementId::ALL {
            assert!(reports.iter().any(|r| r.stmt == *id), "{id}");
        }
    }

    #[test]
    fn suite_on_fixed_point_gap_antichain_reports_thm2_l() {
        let inst = fixtures::fixed_point_gap_antichain();
        let reports = run_suite(&inst, FMode::All, EnvelopeMode::Oracle, 0);
        assert!(reports.iter().any(|r| r.stmt == StatementId::Thm2L && r.verdict.is_failure_under_hypotheses()));
    }

    #[test]
    fn hunt_requires_targets() {
        let f = family((2, 2, 2), FamilyMode::Exhaustive, Constraints::groups());
        assert_eq!(hunt(&f, &[], 10, 0), Err(VerifierError::EmptyTargets));
    }

    #[test]
    fn hunt_finds_stabilizer_gap() {
        let c = Constraints { free: Some(false), ..Constraints::groups() };
        let f = family((2, 3, 4), FamilyMode::Exhaustive, c);
        let out = hunt(&f, &[StatementId::Thm2L], 1000, 0).unwrap();
        assert!(!out.findings.is_empty());
        assert!(out.findings.iter().all(|r| r.oracle_confirmed));
        assert_eq!(out.unconfirmed, 0);
        let target = fixtures::fixed_point_gap_antichain();
        assert!(out.findings.iter().any(|r| {
            let loaded = r.instance.load().unwrap();
            same_up_to_relabeling(&loaded.instance, &target)
        }));
    }

    #[test]
    fn findings_replay() {
        let c = Constraints { free: Some(false), ..Constraints::groups() };
        let f = family((2, 1, 2), FamilyMode::Exhaustive, c);
        let out = hunt(&f, &[StatementId::Thm2L], 100, 0).unwrap();
        let dir = std::env::temp_dir().join(format!("ordhull-findings-{}", std::process::id()));
        let paths = write_findings(&out, &dir).unwrap();
        assert_eq!(paths.len(), out.findings.len());
        for p in &paths {
            let loaded = InstanceFile::read(p).unwrap().load().unwrap();
            let f = loaded.function(WITNESS_FUNCTION).unwrap().clone();
            let r = Checker::new(&loaded.instance, EnvelopeMode::Oracle, 0)
                .check(StatementId::Thm2L, Some((WITNESS_FUNCTION, &f)))
                .unwrap();
            assert!(r.verdict.is_failure());
        }
        let lines = std::fs::read_to_string(dir.join("findings.jsonl")).unwrap();
        assert_eq!(lines.lines().count(), paths.len());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
