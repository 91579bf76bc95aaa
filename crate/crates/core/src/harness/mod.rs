//! Run loop, metrics and sweeps.

pub mod figures;
mod output;
mod sweep;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

pub use output::{emit_csv, emit_json, trace_header, Tabular, SWEEP_HEADER};
pub use sweep::{fit_loglog_slope, sweep_t, PolicySpec, SweepRow, SweepTable};

use crate::algorithms::{Policy, StepKind};
use crate::error::{ConesError, Result};
use crate::geometry::{NestedSequence, Point};
use crate::instances::Instance;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: usize,
    pub x: Point,
    pub f_x: f64,
    pub v_t: f64,
    pub move_inc: f64,
    pub move_cum: f64,
    #[serde(rename = "F_t")]
    pub f_cum: f64,
    /// `F_t − t·v_t`
    pub regret_cum: f64,
    pub kind: StepKind,
    pub phase: usize,
}

/// Adversary state after a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdversaryReport {
    pub periods: usize,
    pub completed_periods: usize,
    pub period_starts: Vec<usize>,
    #[serde(skip)]
    pub recorded: Option<NestedSequence>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trace {
    pub policy_name: String,
    pub family: String,
    pub x0: Point,
    pub records: Vec<StepRecord>,
    pub jump_times: Vec<usize>,
    pub instance_meta: BTreeMap<String, f64>,
    pub adversary: Option<AdversaryReport>,
    pub runtime_ms: f64,
}

impl Trace {
    pub fn last(&self) -> Option<&StepRecord> {
        self.records.last()
    }

    pub fn regret_final(&self) -> f64 {
        self.last().map_or(0.0, |r| r.regret_cum)
    }

    pub fn move_final(&self) -> f64 {
        self.last().map_or(0.0, |r| r.move_cum)
    }

    /// `Σ f_t(x_t) + Σ ‖x_t − x_{t−1}‖`
    pub fn lin_cost(&self) -> f64 {
        self.last().map_or(0.0, |r| r.f_cum + r.move_cum)
    }

    pub fn actions(&self) -> Vec<Point> {
        self.records.iter().map(|r| r.x.clone()).collect()
    }

    pub fn max_regret(&self) -> f64 {
        self.records.iter().map(|r| r.regret_cum).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn dim(&self) -> usize {
        self.x0.dim()
    }
}

/// Plays `policy` on `inst` for `T` rounds. The instance is not mutated; adaptive
/// feeds run on a private copy.
pub fn run(policy: &mut dyn Policy, inst: &Instance) -> Result<Trace> {
    let start = Instant::now();
    let mut feed = inst.feed.clone();
    policy.reset(inst.x0.clone());
    let mut records = Vec::with_capacity(inst.horizon);
    let mut prev = inst.x0.clone();
    let (mut move_cum, mut f_cum) = (0.0, 0.0);
    for t in 1..=inst.horizon {
        let s = feed.reveal(t)?;
        let f = inst.objective_at(t);
        let out = policy.step(f, &s)?;
        let violation = s.violation(&out.action)?;
        if violation > s.feas_tol() {
            return Err(ConesError::InfeasibleAction {
                policy: policy.name().to_string(),
                t,
                violation,
            });
        }
        let move_inc = out.action.dist(&prev);
        move_cum += move_inc;
        f_cum += out.f_value;
        feed.observe(t, &out.action)?;
        records.push(StepRecord {
            t,
            x: out.action.clone(),
            f_x: out.f_value,
            v_t: out.v_t,
            move_inc,
            move_cum,
            f_cum,
            regret_cum: f_cum - t as f64 * out.v_t,
            kind: out.kind,
            phase: policy.phase(),
        });
        prev = out.action;
    }
    let adversary = match feed.adversary() {
        Some(adv) => Some(AdversaryReport {
            periods: adv.params.periods,
            completed_periods: adv.completed_periods(),
            period_starts: adv.period_starts().to_vec(),
            recorded: Some(adv.recorded()?),
        }),
        None => None,
    };
    Ok(Trace {
        policy_name: policy.name().to_string(),
        family: inst.family.clone(),
        x0: inst.x0.clone(),
        records,
        jump_times: policy.jump_times().to_vec(),
        instance_meta: inst.meta.clone(),
        adversary,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
