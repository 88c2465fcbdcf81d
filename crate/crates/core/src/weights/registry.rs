//! Name-based lookup of weight families.
//!
//! Weight strings take the form `name` or `name:param` (for example
//! `alpha-bergman:0.5`). Anything ending in `.json`, or naming an existing
//! file, is read as a measure file and synthesized.

use std::collections::BTreeMap;
use std::path::Path;

use super::family::Weight;
use super::measure::ZenMeasure;
use super::family::Synthesized;
use crate::error::{Result, ZenError};

type Constructor = fn(Option<f64>) -> Result<Weight>;

#[derive(Debug, Clone, Copy)]
pub struct WeightEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub takes_param: bool,
    construct: Constructor,
}

impl WeightEntry {
    pub fn build(&self, param: Option<f64>) -> Result<Weight> {
        (self.construct)(param)
    }
}

pub struct WeightRegistry {
    entries: BTreeMap<&'static str, WeightEntry>,
}

fn no_param(name: &'static str, param: Option<f64>) -> Result<()> {
    match param {
        None => Ok(()),
        Some(_) => Err(ZenError::param("weight", format!("`{name}` takes no parameter"))),
    }
}

impl Default for WeightRegistry {
    fn default() -> Self {
        let mut reg = WeightRegistry {
            entries: BTreeMap::new(),
        };
        reg.register(WeightEntry {
            name: "hardy",
            summary: "w(t) = 1 (Hardy space H^2)",
            takes_param: false,
            construct: |p| no_param("hardy", p).map(|_| Weight::hardy()),
        });
        reg.register(WeightEntry {
            name: "alpha-bergman",
            summary: "w(t) = t^-(alpha+1), alpha > -1 (default 0: Bergman space A^2)",
            takes_param: true,
            construct: |p| Weight::alpha_bergman(p.unwrap_or(0.0)),
        });
        reg.register(WeightEntry {
            name: "hardy-bergman",
            summary: "w(t) = 1 + 1/t (H^2 ∩ A^2)",
            takes_param: false,
            construct: |p| no_param("hardy-bergman", p).map(|_| Weight::hardy_bergman()),
        });
        reg
    }
}

impl WeightRegistry {
    pub fn register(&mut self, entry: WeightEntry) {
        self.entries.insert(entry.name, entry);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = &WeightEntry> {
        self.entries.values()
    }

    pub fn get(&self, name: &str) -> Option<&WeightEntry> {
        self.entries.get(name)
    }

    /// Resolve a weight string.
    pub fn resolve(&self, spec: &str) -> Result<Weight> {
        let spec = spec.trim();
        if spec.ends_with(".json") || Path::new(spec).is_file() {
            let measure = ZenMeasure::from_json_file(spec)?;
            return Ok(Weight::new(Synthesized::new(measure, spec)?));
        }
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => {
                let v = p
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| ZenError::param("weight", format!("cannot parse parameter `{p}`")))?;
                (n.trim(), Some(v))
            }
            None => (spec, None),
        };
        let entry = self
            .get(name)
            .ok_or_else(|| ZenError::UnknownWeight(name.to_string()))?;
        entry.build(param)
    }
}

/// Build a builtin weight by kind name and optional parameter.
pub fn builtin_weight(kind: &str, param: Option<f64>) -> Result<Weight> {
    let reg = WeightRegistry::default();
    let entry = reg
        .get(kind)
        .ok_or_else(|| ZenError::UnknownWeight(kind.to_string()))?;
    entry.build(param)
}
