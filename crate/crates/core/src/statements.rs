//! Executable predicates for the envelope results: each statement is checked
//! on one instance (and one function, where it is about a function) and
//! yields a report carrying the first failing part as a witness.

use std::cell::OnceCell;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::Action;
use crate::algebra::GenerationMode;
use crate::envelope::{
    check_everywhere, envelope, greatest_sub_minorant, is_member, least_super_majorant, left_multiply,
    regularized_majorant, regularized_minorant, relation_witness, Algorithm, ClassMembers, ClassSpec, Relation,
    Side,
};
use crate::instance::{FunctionTable, Instance};
use crate::order::bits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown statement `{0}`")]
    UnknownStatement(String),
    #[error("{0} is about a function; none was given")]
    FunctionRequired(StatementId),
}

macro_rules! statements {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Identifiers of the checkable statements.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum StatementId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl StatementId {
            pub const ALL: &'static [StatementId] = &[$(StatementId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(StatementId::$variant => $name,)*
                }
            }
        }

        impl FromStr for StatementId {
            type Err = CheckError;

            fn from_str(s: &str) -> Result<Self, CheckError> {
                match s.trim().to_ascii_uppercase().as_str() {
                    $($name => Ok(StatementId::$variant),)*
                    _ => Err(CheckError::UnknownStatement(s.to_string())),
                }
            }
        }
    };
}

statements! {
    Lemma1 => "LEMMA1",
    Prop1 => "PROP1",
    Cor1 => "COR1",
    ChainE => "CHAIN_E",
    Thm1L => "THM1_L",
    Thm1U => "THM1_U",
    Thm1Equiv => "THM1_EQUIV",
    Thm2L => "THM2_L",
    Thm2U => "THM2_U",
    Thm2Lu => "THM2_LU",
    Prop3 => "PROP3",
    Thm3I => "THM3_I",
    Thm3II => "THM3_II",
    Thm3III => "THM3_III",
    Prop4 => "PROP4",
    Thm4 => "THM4",
    Task1L => "TASK1L",
    Facts212 => "FACTS212",
}

impl StatementId {
    /// Whether the statement quantifies over a given function `f`.
    pub fn needs_function(self) -> bool {
        !matches!(self, StatementId::Lemma1 | StatementId::Prop1)
    }

    /// Structural hypotheses of the statement as a whole.
    pub fn requires(self) -> &'static [Hypothesis] {
        use Hypothesis::*;
        use StatementId::*;
        match self {
            Lemma1 | Prop1 | Cor1 | ChainE | Thm1L | Thm1U | Thm4 => &[],
            Thm1Equiv | Prop3 | Facts212 => &[TGroup],
            Thm2L | Thm2U | Thm2Lu | Thm3I | Thm3II | Thm3III | Task1L => &[HGroup, TGroup],
            Prop4 => &[TCommutative],
        }
    }

    /// Parses `all` or a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<StatementId>, CheckError> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(StatementId::ALL.to_vec());
        }
        let mut out: Vec<StatementId> = Vec::new();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let id = part.parse()?;
            if !out.contains(&id) {
                out.push(id);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    HGroup,
    HMonoid,
    TGroup,
    TCommutative,
}

impl Hypothesis {
    fn holds(self, inst: &Instance) -> bool {
        let f = inst.flags();
        match self {
            Hypothesis::HGroup => f.h_group,
            Hypothesis::HMonoid => f.h_monoid,
            Hypothesis::TGroup => f.t_group,
            Hypothesis::TCommutative => f.t_commutative,
        }
    }
}

/// Where and how a statement failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub part: String,
    pub point: Option<String>,
    pub detail: String,
    /// Whether the hypotheses of this part (statement plus part-specific
    /// ones) held on the instance.
    pub hypotheses_met: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails(Witness),
    Skipped { reason: String },
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    /// A failure on a part whose hypotheses all held.
    pub fn is_failure_under_hypotheses(&self) -> bool {
        matches!(self, Verdict::Fails(w) if w.hypotheses_met)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementReport {
    pub stmt: StatementId,
    pub function: Option<String>,
    pub hypotheses_met: bool,
    pub verdict: Verdict,
}

/// How envelopes are computed while checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeMode {
    /// Orbitwise for groups, relaxation for the semi-homogeneous sides, and
    /// a shared member index otherwise.
    Fast,
    /// Per-function brute-force enumeration for every envelope.
    Oracle,
}

/// Checks statements on one instance. Class members and per-function
/// envelopes are computed lazily and reused.
pub struct Checker<'a> {
    inst: &'a Instance,
    mode: EnvelopeMode,
    seed: u64,
    members: OnceCell<ClassMembers>,
}

/// Subsets of a set of this size or fewer are enumerated exhaustively.
const EXHAUSTIVE_SUBSETS: usize = 12;
/// Families drawn per class when the member list is too large to enumerate.
const SAMPLED_FAMILIES: usize = 256;

impl<'a> Checker<'a> {
    pub fn new(inst: &'a Instance, mode: EnvelopeMode, seed: u64) -> Self {
        Checker { inst, mode, seed, members: OnceCell::new() }
    }

    pub fn instance(&self) -> &Instance {
        self.inst
    }

    fn members(&self) -> &ClassMembers {
        self.members.get_or_init(|| ClassMembers::new(self.inst))
    }

    /// Checks one statement. `f` is required for function statements.
    pub fn check(&self, stmt: StatementId, f: Option<(&str, &FunctionTable)>) -> Result<StatementReport, CheckError> {
        match f {
            Some((name, f)) => Ok(self.check_function(name, f, &[stmt]).remove(0)),
            None if stmt.needs_function() => Err(CheckError::FunctionRequired(stmt)),
            None => Ok(self.check_global(&[stmt]).remove(0)),
        }
    }

    /// Reports for the statements in `stmts` that do not take a function.
    pub fn check_global(&self, stmts: &[StatementId]) -> Vec<StatementReport> {
        stmts
            .iter()
            .filter(|s| !s.needs_function())
            .map(|&stmt| {
                let mut ev = Eval::new(self.inst, stmt);
                match stmt {
                    StatementId::Lemma1 => self.lemma1(&mut ev),
                    StatementId::Prop1 => self.prop1(&mut ev),
                    _ => unreachable!(),
                }
                ev.finish(None)
            })
            .collect()
    }

    /// Reports for the function statements in `stmts`, evaluated on `f`.
    pub fn check_function(&self, name: &str, f: &FunctionTable, stmts: &[StatementId]) -> Vec<StatementReport> {
        let env = FnEnvelopes::new(self, f);
        stmts
            .iter()
            .filter(|s| s.needs_function())
            .map(|&stmt| {
                let mut ev = Eval::new(self.inst, stmt);
                let skipped = match stmt {
                    StatementId::Cor1 => self.cor1(&env, &mut ev),
                    StatementId::ChainE => self.chain_e(&env, &mut ev),
                    StatementId::Thm1L => self.thm1(&env, &mut ev, Side::Lower),
                    StatementId::Thm1U => self.thm1(&env, &mut ev, Side::Upper),
                    StatementId::Thm1Equiv => self.thm1_equiv(&env, &mut ev),
                    StatementId::Thm2L => self.thm2(&env, &mut ev, Side::Lower),
                    StatementId::Thm2U => self.thm2(&env, &mut ev, Side::Upper),
                    StatementId::Thm2Lu => self.thm2_lu(&env, &mut ev),
                    StatementId::Prop3 => self.prop3(&env, &mut ev),
                    StatementId::Thm3I => self.thm3_i(&env, &mut ev),
                    StatementId::Thm3II => self.thm3_side(&env, &mut ev, Side::Lower),
                    StatementId::Thm3III => self.thm3_side(&env, &mut ev, Side::Upper),
                    StatementId::Prop4 => self.prop4(&env, &mut ev),
                    StatementId::Thm4 => self.thm4(&env, &mut ev),
                    StatementId::Task1L => self.task1l(&env, &mut ev),
                    StatementId::Facts212 => self.facts212(&env, &mut ev),
                    StatementId::Lemma1 | StatementId::Prop1 => unreachable!(),
                };
                match skipped {
                    Some(reason) => ev.skip(Some(name), reason),
                    None => ev.finish(Some(name)),
                }
            })
            .collect()
    }

    fn label(&self, c: usize) -> &str {
        self.inst.poset().label(c)
    }

    fn subsets(&self, n: usize, salt: u64) -> Vec<u64> {
        if n <= EXHAUSTIVE_SUBSETS {
            (0..1u64 << n).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(crate::util::mix_seed(self.seed, salt));
            (0..SAMPLED_FAMILIES).map(|_| rng.gen::<u64>() & ((1u64 << n) - 1)).collect()
        }
    }

    fn lemma1(&self, ev: &mut Eval) {
        let inst = self.inst;
        let p = inst.poset();
        let t_group = inst.flags().t_group;
        for t in 0..inst.t().len() {
            for mask in self.subsets(inst.nc(), 1) {
                let s0: Vec<usize> = bits(mask).collect();
                let moved: Vec<usize> = s0.iter().map(|&s| inst.ts(t, s)).collect();
                let sup_t = p.sup(moved.iter().copied()).expect("complete");
                let t_sup = inst.ts(t, p.sup(s0.iter().copied()).expect("complete"));
                let inf_t = p.inf(moved.iter().copied()).expect("complete");
                let t_inf = inst.ts(t, p.inf(s0.iter().copied()).expect("complete"));
                let point = || {
                    let set: Vec<&str> = s0.iter().map(|&s| self.label(s)).collect();
                    Some(format!("t={}, S0={{{}}}", inst.t().name(t), set.join(",")))
                };
                ev.part("sup", true, inst.leq(sup_t, t_sup), point, || {
                    format!("sup tS0 = {} not <= t sup S0 = {}", self.label(sup_t), self.label(t_sup))
                });
                ev.part("inf", true, inst.leq(t_inf, inf_t), point, || {
                    format!("t inf S0 = {} not <= inf tS0 = {}", self.label(t_inf), self.label(inf_t))
                });
                ev.part("sup-equality", t_group, sup_t == t_sup, point, || {
                    format!("sup tS0 = {} != t sup S0 = {}", self.label(sup_t), self.label(t_sup))
                });
                ev.part("inf-equality", t_group, t_inf == inf_t, point, || {
                    format!("t inf S0 = {} != inf tS0 = {}", self.label(t_inf), self.label(inf_t))
                });
            }
        }
    }

    fn families(&self, n: usize, salt: u64) -> Vec<Vec<usize>> {
        if n <= EXHAUSTIVE_SUBSETS {
            return (0..1u64 << n).map(|m| bits(m).collect()).collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(crate::util::mix_seed(self.seed, salt));
        let idx: Vec<usize> = (0..n).collect();
        let mut out = vec![Vec::new(), idx.clone()];
        for _ in 0..SAMPLED_FAMILIES {
            let k = rng.gen_range(1..=4.min(n));
            let mut fam: Vec<usize> = idx.choose_multiple(&mut rng, k).copied().collect();
            fam.sort_unstable();
            out.push(fam);
        }
        out
    }

    fn prop1(&self, ev: &mut Eval) {
        let inst = self.inst;
        let p = inst.poset();
        let t_group = inst.flags().t_group;
        let fold = |fam: &[&FunctionTable], side: Side| -> FunctionTable {
            FunctionTable(
                (0..inst.nx())
                    .map(|x| match side {
                        Side::Lower => fam.iter().fold(p.bottom(), |a, f| p.join(a, f.get(x))),
                        Side::Upper => fam.iter().fold(p.top(), |a, f| p.meet(a, f.get(x))),
                    })
                    .collect(),
            )
        };
        // (class closed under, operation, result class, part name, hypothesis)
        let cases = [
            (ClassSpec::Sub, Side::Lower, ClassSpec::Sub, "sup-sub", true),
            (ClassSpec::Super, Side::Upper, ClassSpec::Super, "inf-super", true),
            (ClassSpec::Hgc, Side::Lower, ClassSpec::Hgc, "sup-hgc", t_group),
            (ClassSpec::Hgc, Side::Upper, ClassSpec::Hgc, "inf-hgc", t_group),
        ];
        for (salt, (from, side, into, name, hyp)) in cases.into_iter().enumerate() {
            let members = self.members().members(from);
            for fam in self.families(members.len(), 100 + salt as u64) {
                let fs: Vec<&FunctionTable> = fam.iter().map(|&i| &members[i]).collect();
                let g = fold(&fs, side);
                let ok = is_member(inst, &g, into);
                ev.part(
                    name,
                    hyp,
                    ok,
                    || {
                        let labels: Vec<String> =
                            fs.iter().map(|f| format!("[{}]", inst.function_label(f))).collect();
                        Some(format!("F={{{}}}", labels.join(", ")))
                    },
                    || format!("result [{}] is not in {}", inst.function_label(&g), into),
                );
                if !ok {
                    break;
                }
            }
        }
    }

    fn cor1(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let inst = self.inst;
        let t_group = inst.flags().t_group;
        let checks = [
            (Side::Lower, [ClassSpec::Hg, ClassSpec::Hgc, ClassSpec::Sub], ClassSpec::Sub, "lower-in-sub", true),
            (Side::Upper, [ClassSpec::Hg, ClassSpec::Hgc, ClassSpec::Super], ClassSpec::Super, "upper-in-super", true),
        ];
        for (side, classes, into, name, hyp) in checks {
            for class in classes {
                let e = env.get(class, side);
                ev.part(name, hyp, is_member(inst, e, into), || None, || {
                    format!("{} {} envelope [{}] is not in {}", side.as_str(), class, inst.function_label(e), into)
                });
            }
        }
        for (class, side) in [
            (ClassSpec::Hg, Side::Lower),
            (ClassSpec::Hgc, Side::Lower),
            (ClassSpec::Hg, Side::Upper),
            (ClassSpec::Hgc, Side::Upper),
        ] {
            let e = env.get(class, side);
            ev.part("in-hgc", t_group, is_member(inst, e, ClassSpec::Hgc), || None, || {
                format!("{} {} envelope [{}] is not in hgc", side.as_str(), class, inst.function_label(e))
            });
        }
        None
    }

    fn chain_e(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let inst = self.inst;
        let f = env.f;
        let chain: [(&str, &FunctionTable); 7] = [
            ("lE_hg", env.get(ClassSpec::Hg, Side::Lower)),
            ("lE_hgc", env.get(ClassSpec::Hgc, Side::Lower)),
            ("lE_sub", env.get(ClassSpec::Sub, Side::Lower)),
            ("f", f),
            ("uE_super", env.get(ClassSpec::Super, Side::Upper)),
            ("uE_hgc", env.get(ClassSpec::Hgc, Side::Upper)),
            ("uE_hg", env.get(ClassSpec::Hg, Side::Upper)),
        ];
        for w in chain.windows(2) {
            let (ln, l) = w[0];
            let (rn, r) = w[1];
            let bad = (0..inst.nx()).find(|&x| !inst.leq(l.get(x), r.get(x)));
            ev.part("chain", true, bad.is_none(), || bad.map(|x| self.point(x)), || {
                let x = bad.unwrap_or(0);
                format!("{ln} = {} not <= {rn} = {}", self.label(l.get(x)), self.label(r.get(x)))
            });
        }
        if is_member(inst, f, ClassSpec::Hg) {
            for (name, e) in chain {
                ev.part("collapse", true, e == f, || None, || {
                    format!("f is in hg but {name} = [{}] differs from f", inst.function_label(e))
                });
            }
        }
        None
    }

    fn point(&self, x: usize) -> String {
        format!("x={}", self.inst.carrier().point_label(x))
    }

    fn thm1(&self, env: &FnEnvelopes, ev: &mut Eval, side: Side) -> Option<String> {
        let class = match side {
            Side::Lower => ClassSpec::Sub,
            Side::Upper => ClassSpec::Super,
        };
        let fixed = env.get(class, side) == env.f;
        let member = is_member(self.inst, env.f, class);
        ev.part("iff", true, fixed == member, || None, || {
            format!("{} {class} envelope fixes f: {fixed}, f in {class}: {member}", side.as_str())
        });
        None
    }

    fn thm1_equiv(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let a = is_member(self.inst, env.f, ClassSpec::Hgc);
        let b = env.get(ClassSpec::Hgc, Side::Lower) == env.f;
        let c = env.get(ClassSpec::Hgc, Side::Upper) == env.f;
        ev.part("equivalence", true, a == b && b == c, || None, || {
            format!("f in hgc: {a}, lE_hgc = f: {b}, uE_hgc = f: {c}")
        });
        None
    }

    /// Whether `g` avoids the synthetic symbol at the given side, and whether
    /// it is constantly that symbol.
    fn symbol_profile(&self, g: &FunctionTable, side: Side) -> (bool, bool) {
        let p = self.inst.poset();
        let (added, sym) = match side {
            Side::Lower => (p.bottom_added(), p.bottom()),
            Side::Upper => (p.top_added(), p.top()),
        };
        let avoids = !added || g.values().iter().all(|&v| v != sym);
        let constant = added && g.is_constant(sym);
        (avoids, constant)
    }

    fn thm2(&self, env: &FnEnvelopes, ev: &mut Eval, side: Side) -> Option<String> {
        let f = env.f;
        let (avoids, constant) = self.symbol_profile(f, side);
        let c1 = avoids && is_member(self.inst, f, ClassSpec::Hgc);
        let c2 = constant;
        let fixed = env.get(ClassSpec::Hg, side) == f;
        let e = env.get(ClassSpec::Hg, side);
        let tag = if side == Side::Lower { "l" } else { "u" };
        ev.part("necessity", true, !fixed || c1 || c2, || None, || {
            format!("hg envelope equals f but neither [{tag}1] nor [{tag}2] holds")
        });
        ev.part("sufficiency", true, fixed || !(c1 || c2), || None, || {
            let which = if c1 { format!("[{tag}1]") } else { format!("[{tag}2]") };
            format!("{which} holds but the hg envelope is [{}]", self.inst.function_label(e))
        });
        ev.part("exclusive", true, !(c1 && c2), || None, || format!("[{tag}1] and [{tag}2] both hold"));
        None
    }

    fn thm2_lu(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let f = env.f;
        let lo = env.get(ClassSpec::Hg, Side::Lower);
        let hi = env.get(ClassSpec::Hg, Side::Upper);
        let both = lo == f && hi == f;
        let member = is_member(self.inst, f, ClassSpec::Hg);
        ev.part("necessity", true, !both || member, || None, || {
            "both hg envelopes equal f but f is not in hg".to_string()
        });
        ev.part("sufficiency", true, !member || both, || None, || {
            format!(
                "f is in hg but the envelopes are [{}] and [{}]",
                self.inst.function_label(lo),
                self.inst.function_label(hi)
            )
        });
        None
    }

    fn prop3(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let inst = self.inst;
        let (lo, hi) = env.regularized()?;
        ev.part("minorant-super", true, is_member(inst, lo, ClassSpec::Super), || None, || {
            format!("f_min = [{}] is not in super", inst.function_label(lo))
        });
        ev.part("majorant-sub", true, is_member(inst, hi, ClassSpec::Sub), || None, || {
            format!("f_max = [{}] is not in sub", inst.function_label(hi))
        });
        let h_group = inst.flags().h_group;
        for (name, g) in [("f_min", lo), ("f_max", hi)] {
            ev.part("in-hgc", h_group, is_member(inst, g, ClassSpec::Hgc), || None, || {
                format!("{name} = [{}] is not in hgc", inst.function_label(g))
            });
        }
        None
    }

    fn thm3_i(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let inst = self.inst;
        let (lo, hi) = env.regularized()?;
        let le = env.get(ClassSpec::Hgc, Side::Lower);
        let ue = env.get(ClassSpec::Hgc, Side::Upper);
        ev.part("lower", true, le == lo, || None, || {
            format!("lE_hgc = [{}] but f_min = [{}]", inst.function_label(le), inst.function_label(lo))
        });
        ev.part("upper", true, ue == hi, || None, || {
            format!("uE_hgc = [{}] but f_max = [{}]", inst.function_label(ue), inst.function_label(hi))
        });
        let h_monoid = inst.flags().h_monoid;
        ev.part("bracket", h_monoid, inst.fn_leq(lo, env.f) && inst.fn_leq(env.f, hi), || None, || {
            "f_min <= f <= f_max fails".to_string()
        });
        None
    }

    fn thm3_side(&self, env: &FnEnvelopes, ev: &mut Eval, side: Side) -> Option<String> {
        let (lo, hi) = env.regularized()?;
        let g = if side == Side::Lower { lo } else { hi };
        let (avoids, constant) = self.symbol_profile(g, side);
        let e = env.get(ClassSpec::Hg, side);
        let fixed = e == g;
        let tag = if side == Side::Lower { "II" } else { "III" };
        ev.part("necessity", true, !fixed || avoids || constant, || None, || {
            format!("hg envelope equals the regularization but neither {tag}1 nor {tag}2 holds")
        });
        ev.part("sufficiency", true, fixed || !(avoids || constant), || None, || {
            format!(
                "{tag}{} holds but the hg envelope [{}] differs from [{}]",
                if avoids { 1 } else { 2 },
                self.inst.function_label(e),
                self.inst.function_label(g)
            )
        });
        ev.part("exclusive", true, !(avoids && constant), || None, || format!("{tag}1 and {tag}2 both hold"));
        None
    }

    fn prop4(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let inst = self.inst;
        let f = env.f;
        let classes: Vec<ClassSpec> = ClassSpec::ALL.into_iter().filter(|&c| is_member(inst, f, c)).collect();
        for t in 0..inst.t().len() {
            let tf = left_multiply(inst, t, f);
            for &class in &classes {
                ev.part(
                    class.as_str(),
                    true,
                    is_member(inst, &tf, class),
                    || Some(format!("t={}", inst.t().name(t))),
                    || format!("f is in {class} but tf = [{}] is not", inst.function_label(&tf)),
                );
            }
        }
        None
    }

    fn thm4(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let inst = self.inst;
        let h = inst.h();
        let f = env.f;
        let subsets: Vec<Vec<usize>> = if h.len() <= 8 {
            (1u64..1 << h.len()).map(|m| bits(m).collect()).collect()
        } else {
            vec![(0..h.len()).collect()]
        };
        let full: Vec<bool> = Relation::ALL.iter().map(|&r| check_everywhere(inst, f, r)).collect();
        let h_group = inst.flags().h_group;
        for gens in &subsets {
            let names = || {
                let n: Vec<&str> = gens.iter().map(|&g| h.name(g)).collect();
                Some(format!("H'={{{}}}", n.join(",")))
            };
            if h.is_generating(gens, GenerationMode::Semigroup).unwrap_or(false) {
                for (i, rel) in Relation::ALL.into_iter().enumerate() {
                    let local = relation_witness(inst, f, gens.iter().copied(), rel).is_none();
                    ev.part(rel_part(rel), true, local == full[i], names, || {
                        format!("relation {} on generators: {local}, on all of H: {}", rel.as_str(), full[i])
                    });
                }
            }
            if h_group && h.is_generating(gens, GenerationMode::Group).unwrap_or(false) {
                let local = relation_witness(inst, f, gens.iter().copied(), Relation::Eq).is_none();
                let member = is_member(inst, f, ClassSpec::Hgc);
                ev.part("group-generated", true, !local || member, names, || {
                    "equality holds on group generators but f is not in hgc".to_string()
                });
            }
        }
        None
    }

    fn task1l(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let inst = self.inst;
        let (lo, hi) = env.regularized()?;
        let (bot, top) = (inst.bottom(), inst.top());
        for (side, g, ext) in [(Side::Lower, lo, bot), (Side::Upper, hi, top)] {
            let (avoids, _) = self.symbol_profile(g, side);
            let g_trivial = g.is_constant(ext);
            for class in [ClassSpec::Hg, ClassSpec::Hgc] {
                let e = env.get(class, side);
                let nontrivial = !e.is_constant(ext);
                let predicted = match class {
                    ClassSpec::Hg => avoids && !g_trivial,
                    _ => !g_trivial,
                };
                let name = format!("{}-{}", side.as_str(), class);
                ev.part(&name, true, nontrivial == predicted, || None, || {
                    format!(
                        "{} {class} envelope [{}] nontrivial: {nontrivial}, predicted from the regularization: {predicted}",
                        side.as_str(),
                        inst.function_label(e)
                    )
                });
            }
        }
        None
    }

    fn facts212(&self, env: &FnEnvelopes, ev: &mut Eval) -> Option<String> {
        let inst = self.inst;
        let f = env.f;
        if !is_member(inst, f, ClassSpec::Hgc) {
            return Some("f is not in hgc".to_string());
        }
        let orb_s = |c: usize| -> BTreeSet<usize> { (0..inst.t().len()).map(|t| inst.ts(t, c)).collect() };
        let stationary_x = inst.carrier().stationary_elements();
        let p = inst.poset();
        for c in 0..inst.nc() {
            if !p.is_member(c) {
                ev.part("symbols-stationary", true, orb_s(c) == BTreeSet::from([c]), || None, || {
                    format!("synthetic {} is moved", self.label(c))
                });
            }
        }
        for x in 0..inst.nx() {
            let img: BTreeSet<usize> = inst.carrier().orbit(x).into_iter().map(|y| f.get(y)).collect();
            let orb = orb_s(f.get(x));
            let point = || Some(self.point(x));
            let show = |s: &BTreeSet<usize>| s.iter().map(|&c| self.label(c)).collect::<Vec<_>>().join(",");
            ev.part("inclusion", true, img.is_subset(&orb), point, || {
                format!("f(orbit) = {{{}}} is not inside orbit(f(x)) = {{{}}}", show(&img), show(&orb))
            });
            if orb.len() == 1 {
                ev.part("stationary-value", true, img.len() == 1, point, || {
                    format!("f(x) is stationary but f(orbit) = {{{}}}", show(&img))
                });
            }
            ev.part("equality", true, img == orb, point, || {
                format!("f(orbit) = {{{}}} but orbit(f(x)) = {{{}}}", show(&img), show(&orb))
            });
            if stationary_x.contains(&x) {
                ev.part("stationary-point", true, orb.len() == 1, point, || {
                    format!("x is stationary but orbit(f(x)) = {{{}}}", show(&orb))
                });
            }
        }
        None
    }
}

fn rel_part(rel: Relation) -> &'static str {
    match rel {
        Relation::Le => "generated-le",
        Relation::Ge => "generated-ge",
        Relation::Eq => "generated-eq",
    }
}

/// Envelopes and regularizations of one function, computed on first use.
struct FnEnvelopes<'c, 'a> {
    checker: &'c Checker<'a>,
    f: &'c FunctionTable,
    cache: [OnceCell<FunctionTable>; 8],
    regularized: OnceCell<Option<(FunctionTable, FunctionTable)>>,
}

impl<'c, 'a> FnEnvelopes<'c, 'a> {
    fn new(checker: &'c Checker<'a>, f: &'c FunctionTable) -> Self {
        FnEnvelopes { checker, f, cache: Default::default(), regularized: OnceCell::new() }
    }

    fn get(&self, class: ClassSpec, side: Side) -> &FunctionTable {
        let slot = class as usize * 2 + side as usize;
        self.cache[slot].get_or_init(|| self.compute(class, side))
    }

    fn compute(&self, class: ClassSpec, side: Side) -> FunctionTable {
        let ck = self.checker;
        let inst = ck.inst;
        let f = self.f;
        if ck.mode == EnvelopeMode::Oracle {
            return envelope(inst, f, class, side, Algorithm::BruteForce).expect("brute force always applies");
        }
        let fl = inst.flags();
        match (class, side) {
            (ClassSpec::Sub, Side::Lower) => greatest_sub_minorant(inst, f),
            (ClassSpec::Super, Side::Upper) => least_super_majorant(inst, f),
            (ClassSpec::Hg | ClassSpec::Hgc, _) if fl.h_group && fl.t_group => {
                envelope(inst, f, class, side, Algorithm::Orbitwise).expect("groups checked")
            }
            _ => ck.members().envelope(inst, f, class, side),
        }
    }

    /// `(f_min, f_max)`, or `None` when `T` is not a group.
    fn regularized(&self) -> Option<(&FunctionTable, &FunctionTable)> {
        self.regularized
            .get_or_init(|| {
                let inst = self.checker.inst;
                Some((regularized_minorant(inst, self.f).ok()?, regularized_majorant(inst, self.f).ok()?))
            })
            .as_ref()
            .map(|(a, b)| (a, b))
    }
}

/// Collects part outcomes for one statement evaluation.
struct Eval {
    stmt: StatementId,
    core: bool,
    first: Option<Witness>,
    first_under_hypotheses: Option<Witness>,
}

impl Eval {
    fn new(inst: &Instance, stmt: StatementId) -> Self {
        let core = stmt.requires().iter().all(|h| h.holds(inst));
        Eval { stmt, core, first: None, first_under_hypotheses: None }
    }

    fn part(
        &mut self,
        name: &str,
        part_hypothesis: bool,
        ok: bool,
        point: impl FnOnce() -> Option<String>,
        detail: impl FnOnce() -> String,
    ) {
        if ok {
            return;
        }
        let met = self.core && part_hypothesis;
        if self.first_under_hypotheses.is_some() || (!met && self.first.is_some()) {
            return;
        }
        let w = Witness { part: name.to_string(), point: point(), detail: detail(), hypotheses_met: met };
        if met {
            self.first_under_hypotheses = Some(w.clone());
        }
        if self.first.is_none() || met {
            self.first = Some(w);
        }
    }

    fn finish(self, function: Option<&str>) -> StatementReport {
        let verdict = match self.first_under_hypotheses.or(self.first) {
            Some(w) => Verdict::Fails(w),
            None => Verdict::Holds,
        };
        StatementReport {
            stmt: self.stmt,
            function: function.map(str::to_string),
            hypotheses_met: self.core,
            verdict,
        }
    }

    fn skip(self, function: Option<&str>, reason: String) -> StatementReport {
        StatementReport {
            stmt: self.stmt,
            function: function.map(str::to_string),
            hypotheses_met: self.core,
            verdict: Verdict::Skipped { reason },
        }
    }
}
