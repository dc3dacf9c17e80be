//! The JSON instance file: named semigroups, actions, poset, functions and an
//! optional numeric demo block. Loading runs every structural validation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::action::{Action, CarrierAction, OrderedAction};
use crate::algebra::{FiniteSemigroup, Homomorphism};
use crate::demo::DemoConfig;
use crate::instance::{FunctionTable, Instance, InstanceError};
use crate::order::{CompletedPoset, Poset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{section}: missing entry for `{key}`")]
    MissingEntry { section: &'static str, key: String },
    #[error("{section}: `{key}` is not declared")]
    Undeclared { section: &'static str, key: String },
    #[error("{section}: {source}")]
    Invalid {
        section: &'static str,
        #[source]
        source: InstanceError,
    },
    #[error("function `{name}`: {source}")]
    Function {
        name: String,
        #[source]
        source: InstanceError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSpec {
    pub elements: Vec<String>,
    /// Row-major: `table[i][j]` is `elements[i] * elements[j]`.
    pub table: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetSpec {
    pub elements: Vec<String>,
    /// `(a, b)` with `a < b`; the order is their reflexive-transitive closure.
    pub covers: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(rename = "semigroup_H")]
    pub semigroup_h: SemigroupSpec,
    #[serde(rename = "semigroup_T")]
    pub semigroup_t: SemigroupSpec,
    pub hom: BTreeMap<String, String>,
    pub carrier: Vec<String>,
    #[serde(rename = "action_X")]
    pub action_x: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(rename = "poset_S")]
    pub poset_s: PosetSpec,
    #[serde(rename = "action_S")]
    pub action_s: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub functions: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demo: Option<DemoConfig>,
}

/// A validated instance together with its named functions.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: Instance,
    pub functions: Vec<(String, FunctionTable)>,
    pub demo: Option<DemoConfig>,
}

impl LoadedInstance {
    pub fn function(&self, name: &str) -> Option<&FunctionTable> {
        self.functions.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

fn invalid(section: &'static str) -> impl Fn(InstanceError) -> LoadError {
    move |source| LoadError::Invalid { section, source }
}

fn semigroup(spec: &SemigroupSpec, section: &'static str) -> Result<FiniteSemigroup, LoadError> {
    FiniteSemigroup::from_named_table(&spec.elements, &spec.table).map_err(|e| invalid(section)(e.into()))
}

/// Rows of a per-element map, in declaration order of both sides.
fn map_rows(
    section: &'static str,
    map: &BTreeMap<String, BTreeMap<String, String>>,
    acting: &[String],
    domain: &[String],
    lookup: impl Fn(&str) -> Option<usize>,
) -> Result<Vec<Vec<usize>>, LoadError> {
    if let Some(k) = map.keys().find(|k| !acting.contains(k)) {
        return Err(LoadError::Undeclared { section, key: k.clone() });
    }
    acting
        .iter()
        .map(|a| {
            let row = map.get(a).ok_or_else(|| LoadError::MissingEntry { section, key: a.clone() })?;
            if let Some(k) = row.keys().find(|k| !domain.contains(k)) {
                return Err(LoadError::Undeclared { section, key: format!("{a}: {k}") });
            }
            domain
                .iter()
                .map(|d| {
                    let v = row.get(d).ok_or_else(|| LoadError::MissingEntry { section, key: format!("{a}: {d}") })?;
                    lookup(v).ok_or_else(|| LoadError::Undeclared { section, key: format!("{a}: {d} -> {v}") })
                })
                .collect()
        })
        .collect()
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LoadError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files serialize") + "\n"
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("instance files serialize")))
    }

    pub fn load(&self) -> Result<LoadedInstance, LoadError> {
        let h = semigroup(&self.semigroup_h, "semigroup_H")?;
        let t = semigroup(&self.semigroup_t, "semigroup_T")?;
        if let Some(k) = self.hom.keys().find(|k| h.index_of(k).is_none()) {
            return Err(LoadError::Undeclared { section: "hom", key: k.clone() });
        }
        let map = h
            .names()
            .iter()
            .map(|a| {
                let v = self.hom.get(a).ok_or_else(|| LoadError::MissingEntry { section: "hom", key: a.clone() })?;
                t.index_of(v).ok_or_else(|| LoadError::Undeclared { section: "hom", key: format!("{a} -> {v}") })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let hom = Homomorphism::new(h.clone(), t.clone(), map).map_err(|e| invalid("hom")(e.into()))?;

        let x_rows = map_rows("action_X", &self.action_x, h.names(), &self.carrier, |v| {
            self.carrier.iter().position(|c| c == v)
        })?;
        let carrier =
            CarrierAction::new(h, self.carrier.clone(), x_rows).map_err(|e| invalid("action_X")(e.into()))?;

        let poset = Poset::closure(&self.poset_s.elements, &self.poset_s.covers).map_err(|e| invalid("poset_S")(e.into()))?;
        let s_rows = map_rows("action_S", &self.action_s, t.names(), poset.names(), |v| poset.index_of(v))?;
        let codomain = OrderedAction::new(t, CompletedPoset::new(poset), s_rows)
            .map_err(|e| invalid("action_S")(e.into()))?;

        let instance = Instance::new(hom, carrier, codomain).map_err(invalid("instance"))?;
        let functions = self
            .functions
            .iter()
            .map(|(name, values)| {
                instance
                    .parse_function(values)
                    .map(|f| (name.clone(), f))
                    .map_err(|source| LoadError::Function { name: name.clone(), source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(demo) = &self.demo {
            demo.model
                .validate()
                .map_err(|e| LoadError::Parse(format!("demo: {e}")))?;
        }
        Ok(LoadedInstance { instance, functions, demo: self.demo.clone() })
    }

    /// The file describing `inst` (with `T` already its image) and `functions`.
    pub fn from_instance(inst: &Instance, functions: &[(String, FunctionTable)]) -> Self {
        let spec = |s: &FiniteSemigroup| SemigroupSpec {
            elements: s.names().to_vec(),
            table: s.rows().iter().map(|r| r.iter().map(|&c| s.name(c).to_string()).collect()).collect(),
        };
        let h = inst.h();
        let t = inst.t();
        let carrier = inst.carrier();
        let base = inst.poset().base();
        let action_x = (0..h.len())
            .map(|a| {
                let row = (0..carrier.point_count())
                    .map(|x| (carrier.point_label(x).to_string(), carrier.point_label(carrier.act(a, x)).to_string()))
                    .collect();
                (h.name(a).to_string(), row)
            })
            .collect();
        let action_s = (0..t.len())
            .map(|a| {
                let row = (0..base.len())
                    .map(|s| (base.name(s).to_string(), base.name(inst.ts(a, s)).to_string()))
                    .collect();
                (t.name(a).to_string(), row)
            })
            .collect();
        InstanceFile {
            semigroup_h: spec(h),
            semigroup_t: spec(t),
            hom: (0..h.len()).map(|a| (h.name(a).to_string(), t.name(inst.hom().apply(a)).to_string())).collect(),
            carrier: carrier.carrier().to_vec(),
            action_x,
            poset_s: PosetSpec {
                elements: base.names().to_vec(),
                covers: base.covers().into_iter().map(|(a, b)| (base.name(a).to_string(), base.name(b).to_string())).collect(),
            },
            action_s,
            functions: functions
                .iter()
                .map(|(n, f)| (n.clone(), inst.render_function(f).into_iter().collect()))
                .collect(),
            demo: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionError;
    use crate::fixtures;

    fn fix_a_file() -> InstanceFile {
        let inst = fixtures::diamond_swap();
        InstanceFile::from_instance(&inst, &[("f".into(), FunctionTable(vec![1, 1]))])
    }

    #[test]
    fn round_trip() {
        let file = fix_a_file();
        let back = InstanceFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
        let loaded = back.load().unwrap();
        assert_eq!(loaded.function("f"), Some(&FunctionTable(vec![1, 1])));
        assert_eq!(InstanceFile::from_instance(&loaded.instance, &loaded.functions), file);
        assert_eq!(file.digest().len(), 64);
    }

    #[test]
    fn missing_hom_entry() {
        let mut file = fix_a_file();
        file.hom.remove("g");
        assert_eq!(file.load().unwrap_err(), LoadError::MissingEntry { section: "hom", key: "g".into() });
    }

    #[test]
    fn ax2_violation_surfaces() {
        let mut file = fix_a_file();
        // g swaps 00 and 01 and fixes the rest: an involution that reverses
        // 00 <= 01.
        let g = file.action_s.get_mut("g").unwrap();
        for (s, v) in [("00", "01"), ("01", "00"), ("10", "10"), ("11", "11")] {
            g.insert(s.into(), v.into());
        }
        match file.load().unwrap_err() {
            LoadError::Invalid { section: "action_S", source: InstanceError::Action(e) } => {
                assert_eq!(e, ActionError::Ax2Violation { t: "g".into(), s1: "00".into(), s2: "01".into() });
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = fix_a_file().to_json().replacen("\"carrier\"", "\"carier\"", 1);
        assert!(matches!(InstanceFile::from_json(&text), Err(LoadError::Parse(_))));
    }

    #[test]
    fn bad_function_token() {
        let mut file = fix_a_file();
        file.functions.get_mut("f").unwrap().insert("a".into(), "zz".into());
        assert!(matches!(file.load().unwrap_err(), LoadError::Function { .. }));
    }
}
