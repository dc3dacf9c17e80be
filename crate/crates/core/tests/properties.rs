//! Cross-module laws checked on generated posets, semigroups and instances.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;

use ordhull::action::Action;
use ordhull::algebra::{adjoin_identity, FiniteSemigroup, GenerationMode};
use ordhull::instance::Instance;
use ordhull::order::{CompletedPoset, Poset};
use ordhull::statements::{Checker, EnvelopeMode, StatementId, Verdict};
use ordhull::verifier::{self, Bounds, Constraints, FMode, FamilyMode, InstanceFamily};

fn posets() -> &'static [Poset] {
    static P: OnceLock<Vec<Poset>> = OnceLock::new();
    P.get_or_init(|| (1..=5).flat_map(Poset::enumerate).collect())
}

fn semigroups() -> &'static [FiniteSemigroup] {
    static S: OnceLock<Vec<FiniteSemigroup>> = OnceLock::new();
    S.get_or_init(|| (1..=4).flat_map(|n| FiniteSemigroup::enumerate(n, "s")).collect())
}

fn groups() -> impl Strategy<Value = FiniteSemigroup> {
    let gs: Vec<FiniteSemigroup> = semigroups().iter().filter(|s| s.is_group()).cloned().collect();
    proptest::sample::select(gs)
}

fn poset() -> impl Strategy<Value = Poset> {
    (0..posets().len()).prop_map(|i| posets()[i].clone())
}

fn semigroup() -> impl Strategy<Value = FiniteSemigroup> {
    (0..semigroups().len()).prop_map(|i| semigroups()[i].clone())
}

fn random_instance(seed: u64, constraints: Constraints) -> Instance {
    let family = InstanceFamily {
        bounds: Bounds::new(3, 3, 4),
        mode: FamilyMode::Random { seed, count: 1 },
        constraints,
    };
    verifier::enumerate_instances(&family).unwrap().next().expect("one instance")
}

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn complete_posets_have_all_bounds(p in poset(), mask in any::<u64>()) {
        prop_assume!(p.is_order_complete());
        let c = CompletedPoset::new(p);
        let a = members(mask, c.len());
        let sup = c.sup(a.iter().copied()).unwrap();
        let inf = c.inf(a.iter().copied()).unwrap();
        if !a.is_empty() {
            prop_assert!(c.leq(inf, sup));
        }
        for &x in &a {
            prop_assert!(c.leq(inf, x) && c.leq(x, sup));
        }
        prop_assert_eq!(c.dual().sup(a.iter().copied()).unwrap(), inf);
        prop_assert_eq!(c.dual().inf(a.iter().copied()).unwrap(), sup);
    }

    #[test]
    fn completeness_checks_agree(p in poset()) {
        let exhaustive = p.incompleteness_witness_exhaustive().is_none();
        prop_assert_eq!(p.is_order_complete(), exhaustive);
        prop_assert_eq!(p.incompleteness_witness_pairwise().is_none(), exhaustive);
    }

    #[test]
    fn generation_is_monotone_and_idempotent(s in semigroup(), a in any::<u8>(), b in any::<u8>()) {
        let n = s.len();
        let small = members(u64::from(a), n);
        prop_assume!(!small.is_empty());
        let big: Vec<usize> = members(u64::from(a | b), n);
        let g_small = s.generate(&small, GenerationMode::Semigroup).unwrap();
        let g_big = s.generate(&big, GenerationMode::Semigroup).unwrap();
        prop_assert!(g_small.is_subset(&g_big));
        let again: Vec<usize> = g_small.iter().copied().collect();
        prop_assert_eq!(s.generate(&again, GenerationMode::Semigroup).unwrap(), g_small);
    }

    #[test]
    fn group_generation_adds_inverses(s in groups(), a in any::<u8>()) {
        let gens = members(u64::from(a), s.len());
        prop_assume!(!gens.is_empty());
        let mut with_inv: BTreeSet<usize> = gens.iter().copied().collect();
        with_inv.extend(gens.iter().map(|&g| s.inverse(g).unwrap()));
        let with_inv: Vec<usize> = with_inv.into_iter().collect();
        prop_assert_eq!(
            s.generate(&with_inv, GenerationMode::Semigroup).unwrap(),
            s.generate(&gens, GenerationMode::Group).unwrap()
        );
    }

    #[test]
    fn adjoined_identity_gives_a_monoid(s in semigroup()) {
        let (m, _) = adjoin_identity(&s, None).unwrap();
        prop_assert!(m.is_monoid());
        let n = m.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    prop_assert_eq!(m.mul(m.mul(a, b), c), m.mul(a, m.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn instance_structure(seed in any::<u64>()) {
        let inst = random_instance(seed, Constraints::default());
        prop_assert!(inst.hom().is_surjective());
        let h = inst.h();
        let carrier = inst.carrier();
        for x in 0..carrier.point_count() {
            let stab = carrier.stabilizer(x);
            for &a in &stab {
                for &b in &stab {
                    prop_assert!(stab.contains(&h.mul(a, b)));
                }
            }
            if h.is_group() {
                for y in carrier.orbit(x) {
                    prop_assert!(carrier.orbit(y).contains(&x));
                }
            }
        }
        // The monotonicity axiom on the whole completion, synthetic symbols
        // included.
        let n = inst.nc();
        for t in 0..inst.t().len() {
            for a in 0..n {
                for b in 0..n {
                    if inst.leq(a, b) {
                        prop_assert!(inst.leq(inst.ts(t, a), inst.ts(t, b)));
                    }
                }
            }
        }
    }

    #[test]
    fn suite_reports_every_statement(seed in any::<u64>()) {
        let inst = random_instance(seed, Constraints::default());
        let reports = verifier::run_suite(&inst, FMode::Sampled(2), EnvelopeMode::Fast, seed);
        let seen: BTreeSet<StatementId> = reports.iter().map(|r| r.stmt).collect();
        prop_assert_eq!(seen.len(), StatementId::ALL.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hunts_are_deterministic_and_replay(seed in any::<u64>()) {
        let family = InstanceFamily {
            bounds: Bounds::new(3, 3, 4),
            mode: FamilyMode::Random { seed, count: 40 },
            constraints: Constraints { t_group: Some(true), ..Default::default() },
        };
        let targets = [StatementId::Thm2L, StatementId::Thm3I, StatementId::Thm2Lu];
        let a = verifier::hunt(&family, &targets, 40, seed).unwrap();
        let b = verifier::hunt(&family, &targets, 40, seed).unwrap();
        prop_assert_eq!(&a.findings, &b.findings);
        for finding in &a.findings {
            let loaded = finding.instance.load().unwrap();
            let checker = Checker::new(&loaded.instance, EnvelopeMode::Oracle, 0);
            let report = match loaded.function(verifier::WITNESS_FUNCTION) {
                Some(f) => checker.check(finding.stmt, Some((verifier::WITNESS_FUNCTION, f))).unwrap(),
                None => checker.check(finding.stmt, None).unwrap(),
            };
            prop_assert_eq!(report.verdict, Verdict::Fails(finding.witness.clone()));
        }
    }
}
