use super::{Policy, StepKind, StepOutcome};
use crate::error::{ConesError, Result};
use crate::geometry::{ConvexSet, Point};
use crate::objectives::Objective;
use crate::solvers::{minimize_over, opt_tol, project_sublevel};

/// Level-set projection: projects onto `{f ≤ L_p + eps}` and raises the level
/// when that set becomes empty.
#[derive(Clone, Debug)]
pub struct Lsp {
    eps: f64,
    phase: usize,
    level: f64,
    x_prev: Option<Point>,
    transitions: Vec<usize>,
    t: usize,
}

impl Lsp {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(ConesError::ParameterError(format!("LSP eps = {eps} must be positive")));
        }
        Ok(Self {
            eps,
            phase: 0,
            level: f64::NEG_INFINITY,
            x_prev: None,
            transitions: Vec::new(),
            t: 0,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn level(&self) -> f64 {
        self.level
    }
}

impl Policy for Lsp {
    fn name(&self) -> &'static str {
        "lsp"
    }

    fn reset(&mut self, x0: Point) {
        *self = Self {
            x_prev: Some(x0),
            ..Self::new(self.eps).expect("eps was validated")
        };
    }

    fn step(&mut self, f: &Objective, s: &ConvexSet) -> Result<StepOutcome> {
        self.t += 1;
        let prev = self.x_prev.clone().unwrap_or_else(|| s.base_center());
        let v = minimize_over(f, s)?.value;
        let mut kind = StepKind::Lazy;
        if self.phase == 0 || v > self.level + self.eps + opt_tol(v) {
            self.phase += 1;
            self.level = v;
            self.transitions.push(self.t);
            kind = StepKind::PhaseTransition;
        }
        let action = match project_sublevel(f, s, self.level + self.eps, &prev) {
            Err(ConesError::EmptyLevelSet { .. }) if kind == StepKind::Lazy => {
                self.phase += 1;
                self.level = v;
                self.transitions.push(self.t);
                kind = StepKind::PhaseTransition;
                project_sublevel(f, s, self.level + self.eps, &prev)?
            }
            other => other?,
        };
        self.x_prev = Some(action.clone());
        Ok(StepOutcome {
            f_value: f.value(&action),
            v_t: v,
            action,
            kind,
            slack: Some(self.level + self.eps - v),
        })
    }

    fn phase(&self) -> usize {
        self.phase
    }

    fn jump_times(&self) -> &[usize] {
        &self.transitions
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_set_has_one_phase() {
        let s = ConvexSet::boxed(Point::from([1.0, 1.0]), Point::from([3.0, 3.0])).unwrap();
        let mut p = Lsp::new(0.1).unwrap();
        p.reset(Point::from([3.0, 3.0]));
        let f = Objective::squared_norm();
        for _ in 0..5 {
            let out = p.step(&f, &s).unwrap();
            assert!(out.f_value <= 2.0 + 0.1 + 1e-9);
        }
        assert_eq!(p.phase(), 1);
        assert!(Lsp::new(0.0).is_err());
    }
}
