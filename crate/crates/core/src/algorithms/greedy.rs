use super::{Policy, StepKind, StepOutcome};
use crate::error::Result;
use crate::geometry::{ConvexSet, Point};
use crate::objectives::Objective;
use crate::solvers::{argmin_delta, minimize_over, nearest_from_min};

/// Plays the minimizer nearest to the previous action every round.
#[derive(Clone, Debug, Default)]
pub struct Greedy {
    x_prev: Option<Point>,
}

impl Greedy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn reset(&mut self, x0: Point) {
        self.x_prev = Some(x0);
    }

    fn step(&mut self, f: &Objective, s: &ConvexSet) -> Result<StepOutcome> {
        let prev = self.x_prev.clone().unwrap_or_else(|| s.base_center());
        let min = minimize_over(f, s)?;
        let action = nearest_from_min(f, s, &min, &prev, argmin_delta(min.value))?;
        self.x_prev = Some(action.clone());
        Ok(StepOutcome {
            f_value: f.value(&action),
            v_t: min.value,
            action,
            kind: StepKind::Greedy,
            slack: None,
        })
    }
}
