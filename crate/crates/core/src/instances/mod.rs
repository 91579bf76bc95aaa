//! Instance families: oblivious lower-bound sequences, adaptive adversaries
//! and seeded random 1-D corpora.

mod adversary;
mod lower_bounds;
mod random;

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use serde::Serialize;

pub use adversary::{adversary_sc, adversary_sharp, period_count, Adversary, AdversaryKind, AdversaryParams};
pub use lower_bounds::{
    convex_lb_minimizer, gen_convex_lower_bound, gen_directional, gen_frozen, gen_sc_lower_bound, sc_lb_k,
    sc_lb_minimizers,
};
pub use random::{gen_random_1d, gen_random_1d_lin, Random1dKind};

use crate::error::{ConesError, Result};
use crate::geometry::{ConvexSet, NestedSequence, Point};
use crate::objectives::Objective;

pub const FAMILY_NAMES: [&str; 7] = [
    "sc_lb",
    "convex_lb",
    "directional",
    "frozen",
    "sharp_adv",
    "sc_adv",
    "random_1d",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objectives {
    Fixed(Objective),
    /// `f_1, ..., f_T` for the linear-combination setting.
    PerStep(Vec<Objective>),
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Feed {
    Oblivious(NestedSequence),
    Adaptive(Box<Adversary>),
}

impl Feed {
    /// Reveals `S_t`.
    pub fn reveal(&mut self, t: usize) -> Result<ConvexSet> {
        match self {
            Feed::Oblivious(seq) => seq.get(t).cloned().ok_or_else(|| {
                ConesError::ParameterError(format!("sequence has {} sets, asked for t = {t}", seq.len()))
            }),
            Feed::Adaptive(adv) => Ok(adv.reveal(t)),
        }
    }

    /// Reports the action `x_t` back to the feed.
    pub fn observe(&mut self, t: usize, x: &Point) -> Result<()> {
        match self {
            Feed::Oblivious(_) => Ok(()),
            Feed::Adaptive(adv) => adv.observe(t, x),
        }
    }

    pub fn adversary(&self) -> Option<&Adversary> {
        match self {
            Feed::Adaptive(adv) => Some(adv),
            Feed::Oblivious(_) => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub family: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub x0: Point,
    pub objectives: Objectives,
    pub feed: Feed,
    /// The ground set `X`.
    pub domain: ConvexSet,
    /// Construction minimizers, when the family has them.
    pub minimizers: Vec<Point>,
    pub seed: Option<u64>,
    pub meta: BTreeMap<String, f64>,
}

impl Instance {
    pub fn dim(&self) -> usize {
        self.x0.dim()
    }

    /// `f_t` (1-based); fixed-objective instances return the same function for every `t`.
    pub fn objective_at(&self, t: usize) -> &Objective {
        match &self.objectives {
            Objectives::Fixed(f) => f,
            Objectives::PerStep(fs) => &fs[t.clamp(1, fs.len()) - 1],
        }
    }

    pub fn fixed_objective(&self) -> Option<&Objective> {
        match &self.objectives {
            Objectives::Fixed(f) => Some(f),
            Objectives::PerStep(_) => None,
        }
    }

    pub fn sequence(&self) -> Option<&NestedSequence> {
        match &self.feed {
            Feed::Oblivious(seq) => Some(seq),
            Feed::Adaptive(_) => None,
        }
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self.feed, Feed::Adaptive(_))
    }

    /// Same objective and metadata, replaying `seq` obliviously.
    pub fn replay(&self, seq: NestedSequence) -> Instance {
        Instance {
            family: format!("{}_replay", self.family),
            horizon: seq.len(),
            feed: Feed::Oblivious(seq),
            ..self.clone()
        }
    }

    /// Checks `x0 ∈ X` and, for oblivious feeds, nestedness on `samples` points per step.
    /// The lower-bound families pin `x0` to the minimizer over `X`, outside `S_1`.
    pub fn check(&self, samples: usize, seed: u64) -> Result<()> {
        let v = self.domain.violation(&self.x0)?;
        if v > self.domain.feas_tol() {
            return Err(ConesError::ParameterError(format!("x0 violates X by {v:.3e}")));
        }
        let Some(seq) = self.sequence() else {
            return Ok(());
        };
        if seq.len() != self.horizon {
            return Err(ConesError::ParameterError(format!(
                "{} sets for horizon {}",
                seq.len(),
                self.horizon
            )));
        }
        let report = seq.assert_nested(samples, seed);
        if let Some(first) = report.violations.first() {
            return Err(ConesError::ParameterError(format!("sequence not nested: {first:?}")));
        }
        Ok(())
    }
}

/// Family parameters with their defaults.
pub fn family_defaults(family: &str, horizon: usize) -> Result<BTreeMap<&'static str, f64>> {
    let d4 = 4.0;
    let pairs: Vec<(&'static str, f64)> = match family {
        "sc_lb" => vec![("r0", 1.0), ("D", d4)],
        "convex_lb" => vec![("D", d4), ("a", d4 / (2.0 * SQRT_2)), ("k", d4 / (4.0 * SQRT_2))],
        "directional" => vec![("D", (horizon as f64).max(10.0))],
        "frozen" => vec![("T_freeze", 7.0), ("r0", 1.0), ("D", d4)],
        "sharp_adv" => vec![("a", 0.75), ("b", 1.5), ("B", 1.0), ("c", 1.0), ("eps", 0.23)],
        "sc_adv" => vec![
            ("a", 0.75),
            ("b", 1.5),
            ("B", 1.0),
            ("eps", 0.23),
            ("c_R", 1.0),
            ("lambda", 0.5),
        ],
        "random_1d" => vec![("sharp", 0.0), ("fixed_objective", 0.0)],
        other => return Err(ConesError::UnknownFamily(other.to_string())),
    };
    Ok(pairs.into_iter().collect())
}

fn as_count(name: &str, v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v.is_finite() {
        Ok(v as usize)
    } else {
        Err(ConesError::ParameterError(format!("{name} = {v} must be a nonnegative integer")))
    }
}

fn as_flag(name: &str, v: f64) -> Result<bool> {
    match v {
        0.0 => Ok(false),
        1.0 => Ok(true),
        _ => Err(ConesError::ParameterError(format!("{name} = {v} must be 0 or 1"))),
    }
}

/// Builds a named family. Keys of `params` override the defaults; unknown keys are rejected.
pub fn build_family(family: &str, horizon: usize, params: &BTreeMap<String, f64>, seed: u64) -> Result<Instance> {
    let mut p = family_defaults(family, horizon)?;
    for (k, v) in params {
        match p.get_mut(k.as_str()) {
            Some(slot) => *slot = *v,
            None => {
                let known: Vec<_> = p.keys().copied().collect();
                return Err(ConesError::ParameterError(format!(
                    "unknown parameter `{k}` for family {family}; expected one of: {}",
                    known.join(", ")
                )));
            }
        }
    }
    if horizon == 0 {
        return Err(ConesError::ParameterError("T must be at least 1".into()));
    }
    match family {
        "sc_lb" => gen_sc_lower_bound(horizon, p["r0"], p["D"]),
        "convex_lb" => gen_convex_lower_bound(horizon, p["D"], p["a"], p["k"]),
        "directional" => gen_directional(p["D"], horizon),
        "frozen" => gen_frozen(as_count("T_freeze", p["T_freeze"])?, horizon, p["r0"], p["D"]),
        "sharp_adv" => adversary_sharp(p["a"], p["b"], p["B"], p["c"], p["eps"], horizon),
        "sc_adv" => adversary_sc(p["a"], p["b"], p["B"], p["eps"], p["c_R"], p["lambda"], horizon),
        "random_1d" => {
            let kind = if as_flag("fixed_objective", p["fixed_objective"])? {
                Random1dKind::FixedObjective
            } else if as_flag("sharp", p["sharp"])? {
                Random1dKind::Sharp
            } else {
                Random1dKind::Lin
            };
            gen_random_1d(kind, horizon, seed)
        }
        _ => unreachable!("family_defaults rejects unknown names"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn unknown_family_and_key() {
        assert!(matches!(
            build_family("nope", 5, &BTreeMap::new(), 0),
            Err(ConesError::UnknownFamily(_))
        ));
        let err = build_family("sc_lb", 5, &params(&[("radius", 1.0)]), 0).unwrap_err();
        assert!(err.to_string().contains("r0"));
    }

    #[test]
    fn every_family_builds_and_checks() {
        for fam in FAMILY_NAMES {
            let inst = build_family(fam, 12, &BTreeMap::new(), 3).unwrap();
            assert_eq!(inst.horizon, 12, "{fam}");
            inst.check(16, 1).unwrap();
        }
    }

    #[test]
    fn overrides_apply() {
        let inst = build_family("frozen", 20, &params(&[("T_freeze", 4.0)]), 0).unwrap();
        let seq = inst.sequence().unwrap();
        assert_eq!(seq.get(4), seq.get(20));
        assert_ne!(seq.get(3), seq.get(4));
        assert!(build_family("frozen", 20, &params(&[("T_freeze", 2.5)]), 0).is_err());
    }

    #[test]
    fn instance_serializes() {
        let inst = build_family("directional", 3, &BTreeMap::new(), 0).unwrap();
        let json = serde_json::to_value(&inst).unwrap();
        assert_eq!(json["T"], 3);
        assert_eq!(json["meta"]["D"], 10.0);
        assert!(json["feed"]["oblivious"].is_array());
    }
}
