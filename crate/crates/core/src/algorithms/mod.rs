//! Online policies behind a single step interface.

mod ab;
mod frugal;
mod greedy;
mod lsp;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ConesError, Result};
use crate::geometry::{ConvexSet, Point};
use crate::objectives::Objective;

pub use ab::AbPolicy;
pub use frugal::{Frugal, GapFrugal};
pub use greedy::Greedy;
pub use lsp::Lsp;

pub const POLICY_NAMES: [&str; 5] = ["greedy", "frugal", "lsp", "gap_frugal", "ab"];

/// Slack added to every lazy/jump comparison: `1e-9 * t * (1 + |v_t|)`.
pub fn cond_tol(t: usize, v: f64) -> f64 {
    1e-9 * t as f64 * (1.0 + v.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Lazy,
    Jump,
    PhaseTransition,
    Greedy,
    AbMove,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Lazy => "lazy",
            StepKind::Jump => "jump",
            StepKind::PhaseTransition => "phase_transition",
            StepKind::Greedy => "greedy",
            StepKind::AbMove => "ab_move",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub action: Point,
    pub kind: StepKind,
    pub f_value: f64,
    pub v_t: f64,
    /// Margin of the policy's lazy test (positive means the test passed).
    pub slack: Option<f64>,
}

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    /// Starts a new run from `x0`.
    fn reset(&mut self, x0: Point);

    /// Plays round `t = previous t + 1` on the revealed set.
    fn step(&mut self, f: &Objective, s: &ConvexSet) -> Result<StepOutcome>;

    /// Current phase index (0 for policies without phases).
    fn phase(&self) -> usize {
        0
    }

    fn jump_times(&self) -> &[usize] {
        &[]
    }
}

/// Tolerance parameter for LSP, possibly tied to the horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LspEps {
    Fixed(f64),
    /// `eps = T^(-beta)`
    HorizonPower(f64),
}

impl LspEps {
    pub fn resolve(&self, horizon: usize) -> f64 {
        match self {
            LspEps::Fixed(e) => *e,
            LspEps::HorizonPower(beta) => (horizon.max(1) as f64).powf(-beta),
        }
    }
}

impl Default for LspEps {
    fn default() -> Self {
        LspEps::HorizonPower(0.5)
    }
}

/// Builds a policy from its CLI name.
pub fn make_policy(name: &str, eps: LspEps, horizon: usize) -> Result<Box<dyn Policy>> {
    Ok(match name {
        "greedy" => Box::new(Greedy::new()),
        "frugal" => Box::new(Frugal::new()),
        "lsp" => Box::new(Lsp::new(eps.resolve(horizon))?),
        "gap_frugal" => Box::new(GapFrugal::new()),
        "ab" => Box::new(AbPolicy::new()),
        other => return Err(ConesError::UnknownPolicy(other.to_string())),
    })
}

/// `Σ f_t(x_t) + Σ |x_t − x_{t−1}|`.
pub fn lin_cost(x0: &Point, actions: &[Point], fs: &[Objective]) -> Result<f64> {
    if actions.len() != fs.len() {
        return Err(ConesError::ParameterError(format!(
            "{} actions but {} objectives",
            actions.len(),
            fs.len()
        )));
    }
    let mut prev = x0;
    let mut total = 0.0;
    for (x, f) in actions.iter().zip(fs) {
        total += f.eval(x)? + x.dist(prev);
        prev = x;
    }
    Ok(total)
}
