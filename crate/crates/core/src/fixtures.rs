//! Small named instances used throughout the tests, the guide, and the
//! shipped instance files.

use crate::action::{CarrierAction, OrderedAction};
use crate::algebra::{FiniteSemigroup, Homomorphism};
use crate::instance::Instance;
use crate::order::{CompletedPoset, Poset};

/// `{e, g}` with `g^2 = e`.
pub fn z2() -> FiniteSemigroup {
    FiniteSemigroup::from_named_table(&["e", "g"], &[vec!["e", "g"], vec!["g", "e"]])
        .expect("Z2 table is a group")
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// The diamond `00 < 01, 10 < 11`.
pub fn diamond() -> Poset {
    Poset::closure(
        &["00", "01", "10", "11"],
        &[("00", "01"), ("00", "10"), ("01", "11"), ("10", "11")],
    )
    .expect("diamond is a poset")
}

fn swap_carrier(with_fixed: bool) -> CarrierAction {
    let (carrier, table) = if with_fixed {
        (names(&["a", "b", "c"]), vec![vec![0, 1, 2], vec![1, 0, 2]])
    } else {
        (names(&["a", "b"]), vec![vec![0, 1], vec![1, 0]])
    };
    CarrierAction::new(z2(), carrier, table).expect("swap is an action")
}

fn identity_hom() -> Homomorphism {
    Homomorphism::new(z2(), z2(), vec![0, 1]).expect("identity is a homomorphism")
}

fn diamond_swap_action() -> OrderedAction {
    OrderedAction::new(z2(), CompletedPoset::new(diamond()), vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]])
        .expect("coordinate swap is monotone")
}

fn antichain_swap_action() -> OrderedAction {
    let anti = Poset::antichain(&["p", "q"]).expect("antichain");
    OrderedAction::new(z2(), CompletedPoset::new(anti), vec![vec![0, 1], vec![1, 0]])
        .expect("swap is monotone on an antichain")
}

/// Z2 swapping `{a, b}` and the diamond's coordinates.
pub fn diamond_swap() -> Instance {
    Instance::new(identity_hom(), swap_carrier(false), diamond_swap_action()).expect("valid instance")
}

/// Z2 swapping `{a, b}`, acting trivially on the chain `0 < 1 < 2`.
pub fn chain_invariant() -> Instance {
    let trivial = FiniteSemigroup::trivial("e");
    let hom = Homomorphism::to_identity(z2(), trivial.clone()).expect("constant map");
    let codomain = OrderedAction::new(trivial, CompletedPoset::new(Poset::chain(3)), vec![vec![0, 1, 2]])
        .expect("identity action");
    Instance::new(hom, swap_carrier(false), codomain).expect("valid instance")
}

/// [`diamond_swap`] with a third point `c` fixed by `g`.
pub fn fixed_point_gap() -> Instance {
    Instance::new(identity_hom(), swap_carrier(true), diamond_swap_action()).expect("valid instance")
}

/// [`fixed_point_gap`] over the antichain `{p, q}` with `g` swapping `p, q`.
/// Both synthetic symbols are adjoined.
pub fn fixed_point_gap_antichain() -> Instance {
    Instance::new(identity_hom(), swap_carrier(true), antichain_swap_action()).expect("valid instance")
}

/// [`diamond_swap`] over the antichain `{p, q}`.
pub fn diamond_swap_antichain() -> Instance {
    Instance::new(identity_hom(), swap_carrier(false), antichain_swap_action()).expect("valid instance")
}
