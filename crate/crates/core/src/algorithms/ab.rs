use super::{Policy, StepKind, StepOutcome};
use crate::error::{ConesError, Result};
use crate::geometry::{project, ConvexSet, Point};
use crate::objectives::Objective;
use crate::solvers::{argmin_delta, minimize_over, nearest_from_min};

pub const TERNARY_ITERS: usize = 200;
pub const BISECTION_ITERS: usize = 128;

/// One-dimensional algorithm for service plus movement cost: minimize `f_t`
/// over the component of `{x : |x − z_t| ≤ f_t(x)}` that contains `z_t`.
#[derive(Clone, Debug, Default)]
pub struct AbPolicy {
    x_prev: Option<f64>,
    last_anchor: Option<f64>,
    last_component: Option<(f64, f64)>,
}

impl AbPolicy {
    pub fn new() -> Self {
        Self::default()
    }

    /// `z_t` of the last round.
    pub fn anchor(&self) -> Option<f64> {
        self.last_anchor
    }

    /// `[L, R]` of the last round.
    pub fn component(&self) -> Option<(f64, f64)> {
        self.last_component
    }
}

/// Minimizer of a convex function on `[a, b]` by ternary search.
fn ternary_min<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..TERNARY_ITERS {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if g(m1) <= g(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    0.5 * (a + b)
}

/// Farthest point `x` from `z` towards `end` with `g ≥ 0` on the whole segment `[z, x]`.
fn reach<G: Fn(f64) -> f64>(g: &G, z: f64, end: f64) -> f64 {
    if end == z {
        return z;
    }
    let (lo, hi) = if end > z { (z, end) } else { (end, z) };
    let m = ternary_min(g, lo, hi);
    let m = if g(end) < g(m) { end } else { m };
    if g(m) >= 0.0 {
        return end;
    }
    // g(z) ≥ 0 > g(m): bisect for the last nonnegative point between them
    let (mut ok, mut bad) = (z, m);
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (ok + bad);
        if mid == ok || mid == bad {
            break;
        }
        if g(mid) >= 0.0 {
            ok = mid;
        } else {
            bad = mid;
        }
    }
    ok
}

impl Policy for AbPolicy {
    fn name(&self) -> &'static str {
        "ab"
    }

    fn reset(&mut self, x0: Point) {
        self.x_prev = Some(x0[0]);
        self.last_anchor = None;
        self.last_component = None;
    }

    fn step(&mut self, f: &Objective, s: &ConvexSet) -> Result<StepOutcome> {
        if s.dim() != 1 {
            return Err(ConesError::DimensionMismatch {
                expected: 1,
                found: s.dim(),
            });
        }
        let ConvexSet::Box { lo, hi } = s.base() else {
            return Err(ConesError::InvalidSet("A_B needs an interval".into()));
        };
        let (lo, hi) = (lo[0], hi[0]);
        let prev = self.x_prev.unwrap_or(0.5 * (lo + hi));
        let z = project(s, &Point::scalar(prev))?[0];
        // the feasible interval after cuts
        let lo = s.cuts().iter().fold(lo, |acc, h| {
            if h.normal()[0] > 0.0 {
                acc.max(h.offset() / h.normal()[0])
            } else {
                acc
            }
        });
        let hi = s.cuts().iter().fold(hi, |acc, h| {
            if h.normal()[0] < 0.0 {
                acc.min(h.offset() / h.normal()[0])
            } else {
                acc
            }
        });
        let g = |x: f64| f.value(&Point::scalar(x)) - (x - z).abs();
        if g(z) < 0.0 {
            return Err(ConesError::BisectionFailure(format!(
                "f_t(z_t) = {} is negative at z_t = {z}",
                g(z)
            )));
        }
        let left = reach(&g, z, lo.min(z));
        let right = reach(&g, z, hi.max(z));
        let comp = ConvexSet::interval(left, right)?;
        let min = minimize_over(f, &comp)?;
        let action = nearest_from_min(f, &comp, &min, &Point::scalar(prev), argmin_delta(min.value))?;
        let v = minimize_over(f, s)?.value;
        self.x_prev = Some(action[0]);
        self.last_anchor = Some(z);
        self.last_component = Some((left, right));
        Ok(StepOutcome {
            f_value: f.value(&action),
            v_t: v,
            slack: Some(f.value(&action) - (action[0] - z).abs()),
            action,
            kind: StepKind::AbMove,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_shift_example() {
        let mut p = AbPolicy::new();
        p.reset(Point::scalar(0.0));
        let s = ConvexSet::interval(0.0, 10.0).unwrap();
        let out = p.step(&Objective::abs_shift(5.0), &s).unwrap();
        assert_eq!(p.anchor(), Some(0.0));
        let (l, r) = p.component().unwrap();
        assert_eq!(l, 0.0);
        assert!((r - 2.5).abs() < 1e-12);
        assert!((out.action[0] - 2.5).abs() < 1e-12);
        let cost = out.f_value + out.action[0].abs();
        assert!((cost - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_cost_stay() {
        let mut p = AbPolicy::new();
        p.reset(Point::scalar(3.0));
        let s = ConvexSet::interval(0.0, 10.0).unwrap();
        let out = p.step(&Objective::abs_shift(3.0), &s).unwrap();
        assert_eq!(out.action, Point::scalar(3.0));
    }

    #[test]
    fn ties_break_toward_previous_action() {
        let mut p = AbPolicy::new();
        p.reset(Point::scalar(8.0));
        let s = ConvexSet::interval(0.0, 5.0).unwrap();
        let out = p.step(&Objective::constant(1.0), &s).unwrap();
        // z = 5, constant cost 1 lets the component reach [4, 5]; nearest to 8 is 5
        assert!((out.action[0] - 5.0).abs() < 1e-7);
    }
}
