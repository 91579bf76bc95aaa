use serde::{Deserialize, Serialize};

use super::point::Point;
use super::project::project;
use super::set::ConvexSet;
use crate::error::{ConesError, Result};
use crate::rng::{seeded, uniform_in_box};

/// Ordered feasible sets `S_1, ..., S_T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NestedSequence {
    sets: Vec<ConvexSet>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NestingViolation {
    /// `S_t` is not `S_{t-1}` with extra cuts appended.
    Structural { t: usize },
    /// A sampled point of `S_t` lies outside `S_{t-1}`.
    Sample { t: usize, point: Point, violation: f64 },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NestingReport {
    pub checked_points: usize,
    pub violations: Vec<NestingViolation>,
}

impl NestingReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl NestedSequence {
    /// Accepts any list of sets; use [`NestedSequence::assert_nested`] to audit it.
    pub fn new(sets: Vec<ConvexSet>) -> Result<Self> {
        let Some(first) = sets.first() else {
            return Err(ConesError::ParameterError("a sequence needs at least one set".into()));
        };
        let d = first.dim();
        if let Some(s) = sets.iter().find(|s| s.dim() != d) {
            return Err(ConesError::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
        Ok(Self { sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `S_t` for `t` in `1..=len`.
    pub fn get(&self, t: usize) -> Option<&ConvexSet> {
        t.checked_sub(1).and_then(|i| self.sets.get(i))
    }

    pub fn sets(&self) -> &[ConvexSet] {
        &self.sets
    }

    pub fn last(&self) -> &ConvexSet {
        self.sets.last().expect("sequence is nonempty")
    }

    pub fn dim(&self) -> usize {
        self.sets[0].dim()
    }

    pub fn push(&mut self, s: ConvexSet) {
        self.sets.push(s);
    }

    pub fn structurally_nested(prev: &ConvexSet, next: &ConvexSet) -> bool {
        prev.base() == next.base()
            && next.cuts().len() >= prev.cuts().len()
            && next.cuts()[..prev.cuts().len()] == *prev.cuts()
    }

    pub fn assert_nested(&self, samples: usize, seed: u64) -> NestingReport {
        let mut rng = seeded(seed);
        let mut report = NestingReport::default();
        for (i, pair) in self.sets.windows(2).enumerate() {
            let t = i + 2;
            let (prev, next) = (&pair[0], &pair[1]);
            if !Self::structurally_nested(prev, next) {
                report.violations.push(NestingViolation::Structural { t });
            }
            let (lo, hi) = next.bounding_box();
            let tol = prev.feas_tol();
            for _ in 0..samples {
                let raw = uniform_in_box(&mut rng, &lo, &hi);
                let Ok(p) = project(next, &raw) else {
                    continue;
                };
                report.checked_points += 1;
                let v = prev.violation_unchecked(&p);
                if v > tol {
                    report.violations.push(NestingViolation::Sample {
                        t,
                        point: p,
                        violation: v,
                    });
                }
            }
        }
        report
    }
}
