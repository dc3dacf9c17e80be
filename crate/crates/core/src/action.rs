//! Left actions of finite semigroups: on a plain carrier set, and monotonically
//! on a completed poset with the synthetic symbols fixed.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::FiniteSemigroup;
use crate::order::CompletedPoset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("the carrier is empty")]
    EmptyCarrier,
    #[error("duplicate carrier element `{0}`")]
    DuplicateElement(String),
    #[error("action table must have {rows} rows of {cols} in-range entries")]
    Shape { rows: usize, cols: usize },
    #[error("Ax0 violated: {h1}({h2} {x}) != ({h1}{h2}) {x}")]
    Ax0Violation { h1: String, h2: String, x: String },
    #[error("Ax1 violated: the identity moves `{x}`")]
    Ax1Violation { x: String },
    #[error("Ax2 violated: {s1} <= {s2} but {t} {s1} is not <= {t} {s2}")]
    Ax2Violation { t: String, s1: String, s2: String },
    #[error("orbit partition requires a group")]
    NotAGroup,
}

/// Shared orbit machinery over any finite left action.
pub trait Action {
    fn acting(&self) -> &FiniteSemigroup;

    fn point_count(&self) -> usize;

    fn act(&self, h: usize, x: usize) -> usize;

    fn point_label(&self, x: usize) -> &str;

    /// `{hx : h in H}`. Contains `x` itself only when some element fixes it.
    fn orbit(&self, x: usize) -> BTreeSet<usize> {
        (0..self.acting().len()).map(|h| self.act(h, x)).collect()
    }

    /// `{h : hx = x}`.
    fn stabilizer(&self, x: usize) -> BTreeSet<usize> {
        (0..self.acting().len()).filter(|&h| self.act(h, x) == x).collect()
    }

    /// Points whose orbit is exactly themselves.
    fn stationary_elements(&self) -> BTreeSet<usize> {
        (0..self.point_count())
            .filter(|&x| (0..self.acting().len()).all(|h| self.act(h, x) == x))
            .collect()
    }

    /// Every stabilizer is contained in `{identity}` (empty without one).
    fn is_free(&self) -> bool {
        let unit = self.acting().identity();
        (0..self.point_count()).all(|x| self.stabilizer(x).into_iter().all(|h| Some(h) == unit))
    }

    /// Orbits of a group action, each represented by its lexicographically
    /// least label. Orbits are listed in order of their representatives.
    fn orbit_partition(&self) -> Result<OrbitPartition, ActionError> {
        if !self.acting().is_group() {
            return Err(ActionError::NotAGroup);
        }
        let n = self.point_count();
        let mut assigned = vec![false; n];
        let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();
        for x in 0..n {
            if assigned[x] {
                continue;
            }
            let orbit: Vec<usize> = self.orbit(x).into_iter().collect();
            for &y in &orbit {
                assigned[y] = true;
            }
            let rep = *orbit
                .iter()
                .min_by(|&&a, &&b| self.point_label(a).cmp(self.point_label(b)))
                .expect("a group orbit contains its point");
            parts.push((rep, orbit));
        }
        parts.sort_by(|a, b| self.point_label(a.0).cmp(self.point_label(b.0)));
        let mut orbit_of = vec![0; n];
        for (j, (_, orbit)) in parts.iter().enumerate() {
            for &y in orbit {
                orbit_of[y] = j;
            }
        }
        let (representatives, orbits) = parts.into_iter().unzip();
        Ok(OrbitPartition { orbits, representatives, orbit_of })
    }
}

/// Disjoint orbits of a group action with one representative each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub orbits: Vec<Vec<usize>>,
    pub representatives: Vec<usize>,
    orbit_of: Vec<usize>,
}

impl OrbitPartition {
    /// Index of the orbit containing `x`.
    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x]
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }
}

fn check_table(table: &[Vec<usize>], rows: usize, cols: usize, range: usize) -> Result<(), ActionError> {
    if table.len() != rows || table.iter().any(|r| r.len() != cols || r.iter().any(|&v| v >= range)) {
        return Err(ActionError::Shape { rows, cols });
    }
    Ok(())
}

/// Finds the first Ax0/Ax1 failure of `act` over the points `0..n`.
fn check_ax0_ax1(
    acting: &FiniteSemigroup,
    n: usize,
    act: impl Fn(usize, usize) -> usize,
    label: impl Fn(usize) -> String,
) -> Result<(), ActionError> {
    let m = acting.len();
    for h1 in 0..m {
        for h2 in 0..m {
            let h12 = acting.mul(h1, h2);
            for x in 0..n {
                if act(h1, act(h2, x)) != act(h12, x) {
                    return Err(ActionError::Ax0Violation {
                        h1: acting.name(h1).to_string(),
                        h2: acting.name(h2).to_string(),
                        x: label(x),
                    });
                }
            }
        }
    }
    if let Some(e) = acting.identity() {
        if let Some(x) = (0..n).find(|&x| act(e, x) != x) {
            return Err(ActionError::Ax1Violation { x: label(x) });
        }
    }
    Ok(())
}

/// A left action of `H` on a finite carrier `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarrierAction {
    acting: FiniteSemigroup,
    carrier: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl CarrierAction {
    /// `table[h][x]` is `hx`. Checks Ax0 and, for a monoid, Ax1.
    pub fn new(acting: FiniteSemigroup, carrier: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, ActionError> {
        if carrier.is_empty() {
            return Err(ActionError::EmptyCarrier);
        }
        let mut seen = BTreeSet::new();
        for x in &carrier {
            if !seen.insert(x.as_str()) {
                return Err(ActionError::DuplicateElement(x.clone()));
            }
        }
        check_table(&table, acting.len(), carrier.len(), carrier.len())?;
        check_ax0_ax1(&acting, carrier.len(), |h, x| table[h][x], |x| carrier[x].clone())?;
        Ok(CarrierAction { acting, carrier, table })
    }

    /// The action of `H` on itself by left multiplication.
    pub fn regular(acting: FiniteSemigroup) -> Self {
        let carrier = acting.names().to_vec();
        let table = acting.rows();
        CarrierAction { acting, carrier, table }
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, x: &str) -> Option<usize> {
        self.carrier.iter().position(|c| c == x)
    }
}

impl Action for CarrierAction {
    fn acting(&self) -> &FiniteSemigroup {
        &self.acting
    }

    fn point_count(&self) -> usize {
        self.carrier.len()
    }

    #[inline]
    fn act(&self, h: usize, x: usize) -> usize {
        self.table[h][x]
    }

    fn point_label(&self, x: usize) -> &str {
        &self.carrier[x]
    }
}

/// A monotone action of `T` on the completion of an order-complete poset.
/// Synthetic symbols are fixed by every element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedAction {
    acting: FiniteSemigroup,
    codomain: CompletedPoset,
    table: Vec<Vec<usize>>,
}

impl OrderedAction {
    /// `base_table[t][s]` is `ts` for base elements; the table is extended to
    /// the symbols and checked for Ax0, Ax1 and Ax2 on the whole completion.
    pub fn new(
        acting: FiniteSemigroup,
        codomain: CompletedPoset,
        base_table: Vec<Vec<usize>>,
    ) -> Result<Self, ActionError> {
        let n = codomain.base().len();
        check_table(&base_table, acting.len(), n, n)?;
        let table: Vec<Vec<usize>> = base_table
            .into_iter()
            .map(|mut row| {
                row.extend(n..codomain.len());
                row
            })
            .collect();
        let a = OrderedAction { acting, codomain, table };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<(), ActionError> {
        let c = &self.codomain;
        check_ax0_ax1(&self.acting, c.len(), |t, s| self.table[t][s], |s| c.label(s).to_string())?;
        for t in 0..self.acting.len() {
            for s1 in 0..c.len() {
                for s2 in 0..c.len() {
                    if c.leq(s1, s2) && !c.leq(self.table[t][s1], self.table[t][s2]) {
                        return Err(ActionError::Ax2Violation {
                            t: self.acting.name(t).to_string(),
                            s1: c.label(s1).to_string(),
                            s2: c.label(s2).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Keeps only the rows of `indices`, now acted on by `sub`, whose element
    /// `i` is `indices[i]` of the current acting semigroup.
    pub fn restrict(&self, indices: &[usize], sub: FiniteSemigroup) -> Result<Self, ActionError> {
        let table = indices.iter().map(|&t| self.table[t].clone()).collect();
        let a = OrderedAction { acting: sub, codomain: self.codomain.clone(), table };
        a.validate()?;
        Ok(a)
    }

    pub fn codomain(&self) -> &CompletedPoset {
        &self.codomain
    }

    /// Rows over completed indices.
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Rows restricted to base elements.
    pub fn base_table(&self) -> Vec<Vec<usize>> {
        let n = self.codomain.base().len();
        self.table.iter().map(|r| r[..n].to_vec()).collect()
    }
}

impl Action for OrderedAction {
    fn acting(&self) -> &FiniteSemigroup {
        &self.acting
    }

    fn point_count(&self) -> usize {
        self.codomain.len()
    }

    #[inline]
    fn act(&self, t: usize, s: usize) -> usize {
        self.table[t][s]
    }

    fn point_label(&self, s: usize) -> &str {
        self.codomain.label(s)
    }
}
