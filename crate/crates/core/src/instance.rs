//! A validated problem instance: `H` acting on `X`, a homomorphism onto `T`,
//! and `T` acting monotonically on the completion of `S`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{Action, ActionError, CarrierAction, OrderedAction};
use crate::algebra::{AlgebraError, FiniteSemigroup, Homomorphism};
use crate::order::{CompletedPoset, OrderError};
use crate::util::next_tuple;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("the carrier action is not by the homomorphism's source")]
    SourceMismatch,
    #[error("the codomain action is not by the homomorphism's target")]
    TargetMismatch,
    #[error("function is missing a value at `{0}`")]
    MissingValue(String),
    #[error("function names `{0}`, which is not a carrier element")]
    ExtraValue(String),
}

/// A total map from carrier indices to completed-codomain indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FunctionTable(pub Vec<usize>);

impl FunctionTable {
    pub fn constant(len: usize, value: usize) -> Self {
        FunctionTable(vec![value; len])
    }

    #[inline]
    pub fn get(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self, value: usize) -> bool {
        self.0.iter().all(|&v| v == value)
    }
}

/// Structural flags that decide which hypotheses an instance meets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstanceFlags {
    pub h_group: bool,
    pub h_monoid: bool,
    pub t_group: bool,
    pub t_commutative: bool,
    pub free: bool,
}

/// A fully validated instance. The homomorphism is restricted to its image,
/// so `T` here is always `h(H)`.
#[derive(Debug, Clone)]
pub struct Instance {
    hom: Homomorphism,
    carrier: CarrierAction,
    codomain: OrderedAction,
    flags: InstanceFlags,
    x_act: Vec<usize>,
    s_act: Vec<usize>,
    s_inv: Option<Vec<usize>>,
}

impl Instance {
    pub fn new(hom: Homomorphism, carrier: CarrierAction, codomain: OrderedAction) -> Result<Self, InstanceError> {
        if carrier.acting() != hom.source() {
            return Err(InstanceError::SourceMismatch);
        }
        if codomain.acting() != hom.target() {
            return Err(InstanceError::TargetMismatch);
        }
        let poset = codomain.codomain();
        if !poset.is_order_complete() {
            let w = poset.base().incompleteness_witness().unwrap_or_default();
            return Err(OrderError::NotOrderComplete(
                w.into_iter().map(|i| poset.base().name(i).to_string()).collect(),
            )
            .into());
        }
        let image = hom.image_indices();
        let hom = hom.restrict_to_image();
        let codomain = codomain.restrict(&image, hom.target().clone())?;
        let t = hom.target();
        let flags = InstanceFlags {
            h_group: hom.source().is_group(),
            h_monoid: hom.source().is_monoid(),
            t_group: t.is_group(),
            t_commutative: t.is_commutative(),
            free: carrier.is_free(),
        };
        let nh = hom.source().len();
        let nx = carrier.point_count();
        let nc = codomain.point_count();
        let mut x_act = vec![0; nh * nx];
        let mut s_act = vec![0; nh * nc];
        for h in 0..nh {
            for x in 0..nx {
                x_act[h * nx + x] = carrier.act(h, x);
            }
            for c in 0..nc {
                s_act[h * nc + c] = codomain.act(hom.apply(h), c);
            }
        }
        let s_inv = t.is_group().then(|| {
            let mut inv = vec![0; nh * nc];
            for h in 0..nh {
                let ti = t.inverse(hom.apply(h)).expect("group element has an inverse");
                for c in 0..nc {
                    inv[h * nc + c] = codomain.act(ti, c);
                }
            }
            inv
        });
        Ok(Instance { hom, carrier, codomain, flags, x_act, s_act, s_inv })
    }

    pub fn flags(&self) -> InstanceFlags {
        self.flags
    }

    pub fn hom(&self) -> &Homomorphism {
        &self.hom
    }

    pub fn h(&self) -> &FiniteSemigroup {
        self.hom.source()
    }

    pub fn t(&self) -> &FiniteSemigroup {
        self.hom.target()
    }

    pub fn carrier(&self) -> &CarrierAction {
        &self.carrier
    }

    pub fn codomain(&self) -> &OrderedAction {
        &self.codomain
    }

    pub fn poset(&self) -> &CompletedPoset {
        self.codomain.codomain()
    }

    pub fn nh(&self) -> usize {
        self.h().len()
    }

    pub fn nx(&self) -> usize {
        self.carrier.point_count()
    }

    /// Size of the completed codomain.
    pub fn nc(&self) -> usize {
        self.codomain.point_count()
    }

    /// `hx`.
    #[inline]
    pub fn hx(&self, h: usize, x: usize) -> usize {
        self.x_act[h * self.nx() + x]
    }

    /// `h(h) c` on the completed codomain.
    #[inline]
    pub fn hs(&self, h: usize, c: usize) -> usize {
        self.s_act[h * self.nc() + c]
    }

    /// `h(h)^{-1} c`, available when `T` is a group.
    #[inline]
    pub fn hs_inv(&self, h: usize, c: usize) -> Option<usize> {
        self.s_inv.as_ref().map(|inv| inv[h * self.nc() + c])
    }

    /// `t c` for an element of `T`.
    #[inline]
    pub fn ts(&self, t: usize, c: usize) -> usize {
        self.codomain.act(t, c)
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.poset().leq(a, b)
    }

    pub fn fn_leq(&self, f: &FunctionTable, g: &FunctionTable) -> bool {
        f.0.iter().zip(&g.0).all(|(&a, &b)| self.leq(a, b))
    }

    pub fn bottom(&self) -> usize {
        self.poset().bottom()
    }

    pub fn top(&self) -> usize {
        self.poset().top()
    }

    /// Number of tables in `(S completed)^X`.
    pub fn function_count(&self) -> u128 {
        (self.nc() as u128).pow(self.nx() as u32)
    }

    /// Every function table, in lexicographic order of values.
    pub fn all_functions(&self) -> AllFunctions {
        AllFunctions { digits: Some(vec![0; self.nx()]), radix: self.nc() }
    }

    pub fn random_function<R: Rng>(&self, rng: &mut R) -> FunctionTable {
        FunctionTable((0..self.nx()).map(|_| rng.gen_range(0..self.nc())).collect())
    }

    /// Parses `{carrier element: codomain token}`, requiring every element.
    pub fn parse_function(&self, values: &BTreeMap<String, String>) -> Result<FunctionTable, InstanceError> {
        if let Some(k) = values.keys().find(|k| self.carrier.index_of(k).is_none()) {
            return Err(InstanceError::ExtraValue(k.clone()));
        }
        let mut out = Vec::with_capacity(self.nx());
        for x in self.carrier.carrier() {
            let token = values.get(x).ok_or_else(|| InstanceError::MissingValue(x.clone()))?;
            out.push(self.poset().parse(token)?);
        }
        Ok(FunctionTable(out))
    }

    /// `(carrier element, codomain label)` pairs in carrier order.
    pub fn render_function(&self, f: &FunctionTable) -> Vec<(String, String)> {
        self.carrier
            .carrier()
            .iter()
            .zip(f.values())
            .map(|(x, &v)| (x.clone(), self.poset().label(v).to_string()))
            .collect()
    }

    /// Compact one-line form, e.g. `a=01 b=10`.
    pub fn function_label(&self, f: &FunctionTable) -> String {
        self.render_function(f)
            .into_iter()
            .map(|(x, v)| format!("{x}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for InstanceFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "H group: {}, H monoid: {}, T group: {}, T commutative: {}, free: {}",
            self.h_group, self.h_monoid, self.t_group, self.t_commutative, self.free
        )
    }
}

/// Iterator over all function tables of an instance.
pub struct AllFunctions {
    digits: Option<Vec<usize>>,
    radix: usize,
}

impl Iterator for AllFunctions {
    type Item = FunctionTable;

    fn next(&mut self) -> Option<FunctionTable> {
        let digits = self.digits.as_mut()?;
        let out = FunctionTable(digits.clone());
        if !next_tuple(digits, self.radix) {
            self.digits = None;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fix_a_flags() {
        let inst = fixtures::diamond_swap();
        let fl = inst.flags();
        assert!(fl.h_group && fl.t_group && fl.t_commutative && fl.free);
        assert_eq!(inst.nc(), 4);
        assert_eq!(inst.function_count(), 16);
        assert_eq!(inst.all_functions().count(), 16);
    }

    #[test]
    fn fix_c_is_not_free() {
        assert!(!fixtures::fixed_point_gap().flags().free);
    }

    #[test]
    fn restriction_shrinks_t_to_image() {
        let inst = fixtures::chain_invariant();
        assert_eq!(inst.t().len(), 1);
        assert!(inst.hom().is_surjective());
    }

    #[test]
    fn parse_and_render_round_trip() {
        let inst = fixtures::diamond_swap();
        let map: BTreeMap<String, String> =
            [("a".to_string(), "01".to_string()), ("b".to_string(), "10".to_string())].into();
        let f = inst.parse_function(&map).unwrap();
        assert_eq!(inst.function_label(&f), "a=01 b=10");
        let mut missing = map.clone();
        missing.remove("b");
        assert_eq!(inst.parse_function(&missing), Err(InstanceError::MissingValue("b".into())));
        let mut bot = map.clone();
        bot.insert("a".into(), "BOT".into());
        assert!(matches!(inst.parse_function(&bot), Err(InstanceError::Order(_))));
    }

    #[test]
    fn inverse_action_undoes_action() {
        let inst = fixtures::diamond_swap();
        for h in 0..inst.nh() {
            for c in 0..inst.nc() {
                assert_eq!(inst.hs_inv(h, inst.hs(h, c)), Some(c));
            }
        }
    }

    #[test]
    fn image_identity_must_act_as_identity() {
        // T = {1, z} with z the constant map onto `0`; a left-zero H lands on z,
        // so the image {z} is a monoid whose identity moves `1`.
        let h = FiniteSemigroup::left_zero(&["a", "b"]).unwrap();
        let t = FiniteSemigroup::new(vec!["1".into(), "z".into()], vec![vec![0, 1], vec![1, 1]]).unwrap();
        let chain = CompletedPoset::new(crate::order::Poset::chain(2));
        let codomain = OrderedAction::new(t.clone(), chain, vec![vec![0, 1], vec![0, 0]]).unwrap();
        let hom = Homomorphism::new(h.clone(), t, vec![1, 1]).unwrap();
        let err = Instance::new(hom, CarrierAction::regular(h), codomain).unwrap_err();
        assert_eq!(err, InstanceError::Action(ActionError::Ax1Violation { x: "1".into() }));
    }
}
