//! Invariant suites shared by the `verify` command and the test-suite.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::algorithms::{Frugal, Greedy, Policy};
use crate::error::{ConesError, Result};
use crate::geometry::{proj_tol, project, ConvexSet, Halfspace, NestedSequence, Point};
use crate::harness::run;
use crate::instances::{
    build_family, gen_random_1d, gen_sc_lower_bound, sc_lb_k, sc_lb_minimizers, Instance, Random1dKind, FAMILY_NAMES,
};
use crate::objectives::{Objective, ObjectiveKind};
use crate::oracle::{brute_force_min_grid, enumerate_lin_1d, offline_lin_dp_1d, static_opt};
use crate::rng::{sample_in_set, seeded, uniform_in_box, Prng};
use crate::solvers::{minimize_over, opt_tol};

pub const SUITES: [&str; 6] = ["geometry", "solvers", "algorithms", "instances", "oracle", "all"];

const REGRET_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}::{}: {}", self.suite, self.name, self.detail)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Replace Frugal with a copy whose jump branch is disabled.
    pub inject_fault: bool,
}

/// Runs one suite (or `all`).
pub fn run_suite(suite: &str, opts: VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let all = suite == "all";
    if !SUITES.contains(&suite) {
        return Err(ConesError::ParameterError(format!(
            "unknown suite `{suite}`; expected one of: {}",
            SUITES.join(", ")
        )));
    }
    if all || suite == "geometry" {
        out.extend(geometry(opts)?);
    }
    if all || suite == "solvers" {
        out.extend(solvers(opts)?);
    }
    if all || suite == "algorithms" {
        out.extend(algorithms(opts)?);
    }
    if all || suite == "instances" {
        out.extend(instances(opts)?);
    }
    if all || suite == "oracle" {
        out.extend(oracle(opts)?);
    }
    Ok(out)
}

struct Tally {
    suite: &'static str,
    name: &'static str,
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(suite: &'static str, name: &'static str) -> Self {
        Self {
            suite,
            name,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) -> CheckResult {
        let detail = match self.failures.first() {
            None => format!("{} checks", self.checked),
            Some(first) => format!("{} of {} checks failed; first: {first}", self.failures.len(), self.checked),
        };
        CheckResult {
            suite: self.suite,
            name: self.name,
            passed: self.failures.is_empty(),
            detail,
        }
    }
}

/// Random nonempty set in dimension `d`: a box or ball cut by up to three halfspaces
/// that keep a sampled anchor point.
pub fn random_set(rng: &mut Prng, d: usize) -> Result<ConvexSet> {
    let lo = Point::new((0..d).map(|_| rng.random_range(-3.0..0.0)).collect())?;
    let hi = Point::new((0..d).map(|_| rng.random_range(0.5..3.0)).collect())?;
    let base = if rng.random_bool(0.7) {
        ConvexSet::boxed(lo.clone(), hi.clone())?
    } else {
        ConvexSet::ball(uniform_in_box(rng, &lo, &hi), rng.random_range(0.5..2.5))?
    };
    let anchor = sample_in_set(rng, &base)?;
    let mut set = base;
    for _ in 0..rng.random_range(0..=3usize) {
        let n = Point::new((0..d).map(|_| rng.random_range(-1.0..1.0)).collect())?;
        if n.norm() < 1e-3 {
            continue;
        }
        let offset = n.dot(&anchor) - rng.random_range(0.0..1.0);
        set = set.intersect_halfspace(Halfspace::new(n, offset)?)?;
    }
    Ok(set)
}

fn spread_point(rng: &mut Prng, d: usize) -> Point {
    Point::from_vec_unchecked((0..d).map(|_| rng.random_range(-6.0..6.0)).collect())
}

fn geometry(opts: VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut rng = seeded(opts.seed ^ 0x9e0);
    let mut member = Tally::new("geometry", "projection_membership");
    let mut idem = Tally::new("geometry", "projection_idempotence");
    let mut nonexp = Tally::new("geometry", "projection_nonexpansive");
    let mut vi = Tally::new("geometry", "projection_variational_inequality");
    for i in 0..120 {
        let d = 1 + i % 3;
        let s = random_set(&mut rng, d)?;
        let x = spread_point(&mut rng, d);
        let y = spread_point(&mut rng, d);
        let px = project(&s, &x)?;
        let py = project(&s, &y)?;
        let v = s.violation(&px)?;
        member.check(v <= s.feas_tol(), || format!("violation {v:.3e} in d = {d}"));
        let ppx = project(&s, &px)?;
        idem.check(ppx.dist(&px) <= proj_tol(&px), || format!("moved {:.3e}", ppx.dist(&px)));
        let (lhs, rhs) = (px.dist(&py), x.dist(&y));
        nonexp.check(lhs <= rhs + proj_tol(&x) + proj_tol(&y), || format!("{lhs} > {rhs}"));
        for _ in 0..4 {
            let z = sample_in_set(&mut rng, &s)?;
            let ip = x.sub(&px).dot(&z.sub(&px));
            let tol = 1e-7 * (1.0 + x.sub(&px).norm() * z.sub(&px).norm());
            vi.check(ip <= tol, || format!("<x − Px, z − Px> = {ip:.3e}"));
        }
    }
    Ok(vec![member.finish(), idem.finish(), nonexp.finish(), vi.finish()])
}

fn random_objective(rng: &mut Prng, d: usize) -> Objective {
    let center = spread_point(rng, d).scale(0.5);
    let kind = match rng.random_range(0..if d == 1 { 5 } else { 4 }) {
        0 => ObjectiveKind::Quadratic { center },
        1 => ObjectiveKind::SquaredNorm,
        2 => ObjectiveKind::ScaledNorm {
            c: rng.random_range(0.5..3.0),
            center,
        },
        3 if d == 2 => ObjectiveKind::LinearPlusQuad {
            eps: rng.random_range(0.0..0.5),
        },
        3 => ObjectiveKind::MaxAbs,
        _ => ObjectiveKind::AbsShift { m: center[0] },
    };
    Objective::new(kind, Default::default()).expect("valid parameters")
}

fn solvers(opts: VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut rng = seeded(opts.seed ^ 0x501);
    let mut subgrad = Tally::new("solvers", "subgradient_inequality");
    for i in 0..200 {
        let d = 1 + i % 3;
        let f = random_objective(&mut rng, d);
        let x = spread_point(&mut rng, d);
        let y = spread_point(&mut rng, d);
        let g = f.subgradient(&x)?;
        let (fx, fy) = (f.eval(&x)?, f.eval(&y)?);
        let lin = fx + g.dot(&y.sub(&x));
        subgrad.check(fy >= lin - 1e-9 * (1.0 + fy.abs()), || {
            format!("{} at {x}: f(y) = {fy} < {lin}", f.kind.name())
        });
    }
    let mut grid = Tally::new("solvers", "minimize_over_vs_grid");
    let n = 201;
    for i in 0..50 {
        let d = 1 + i % 2;
        let s = random_set(&mut rng, d)?;
        let f = random_objective(&mut rng, d);
        let m = minimize_over(&f, &s)?;
        let Ok(g) = brute_force_min_grid(&f, &s, n) else {
            continue;
        };
        let (lo, hi) = s.bounding_box();
        let cell = lo.dist(&hi) / (n - 1) as f64;
        let feasible = s.violation(&m.argmin)? <= s.feas_tol();
        let not_beaten = m.value <= g.value + opt_tol(g.value);
        let gap = (g.value - m.value).max(0.0);
        let bound = match &f.kind {
            ObjectiveKind::Quadratic { .. } => Some((2.0 * gap).sqrt()),
            ObjectiveKind::SquaredNorm => Some(gap.sqrt()),
            ObjectiveKind::ScaledNorm { c, .. } if d == 1 => Some(gap / c),
            ObjectiveKind::AbsShift { .. } => Some(gap),
            _ => None,
        };
        let near = bound.is_none_or(|b| m.argmin.dist(&g.path[0]) <= b + 2.0 * cell);
        let ok = feasible && not_beaten && near;
        grid.check(ok, || {
            format!(
                "{} d = {d}: solver {} at {}, grid {} at {}",
                f.kind.name(),
                m.value,
                m.argmin,
                g.value,
                g.path[0]
            )
        });
    }
    Ok(vec![subgrad.finish(), grid.finish()])
}

fn frugal(opts: VerifyOptions) -> Box<dyn Policy> {
    if opts.inject_fault {
        Box::new(Frugal::new().with_jumps_disabled())
    } else {
        Box::new(Frugal::new())
    }
}

fn regret_corpus(opts: VerifyOptions) -> Result<Vec<Instance>> {
    let none = BTreeMap::new();
    let mut out = vec![
        build_family("frozen", 60, &none, opts.seed)?,
        build_family("sc_lb", 40, &none, opts.seed)?,
        build_family("convex_lb", 30, &none, opts.seed)?,
        build_family("directional", 10, &none, opts.seed)?,
        build_family("sharp_adv", 64, &none, opts.seed)?,
        build_family("sc_adv", 64, &none, opts.seed)?,
    ];
    for s in 0..5 {
        out.push(gen_random_1d(Random1dKind::FixedObjective, 40, opts.seed + s)?);
    }
    Ok(out)
}

fn algorithms(opts: VerifyOptions) -> Result<Vec<CheckResult>> {
    let corpus = regret_corpus(opts)?;
    let mut fr = Tally::new("algorithms", "frugal_regret_nonpositive");
    let mut gr = Tally::new("algorithms", "greedy_regret_nonpositive");
    let mut budget = Tally::new("algorithms", "budget_identity");
    let mut det = Tally::new("algorithms", "trace_determinism");
    for inst in &corpus {
        let trace = run(frugal(opts).as_mut(), inst)?;
        let worst = trace.max_regret();
        fr.check(worst <= REGRET_TOL, || format!("{}: max regret {worst:.3e}", inst.family));
        let mut prev: Option<(f64, f64)> = None;
        for r in &trace.records {
            let (reg, v) = prev.unwrap_or((0.0, r.v_t));
            let want = (r.f_x - r.v_t) - (r.t as f64 - 1.0) * (r.v_t - v);
            let got = r.regret_cum - reg;
            budget.check((got - want).abs() <= 1e-8 * (1.0 + r.regret_cum.abs()), || {
                format!("{} t = {}: {got} vs {want}", inst.family, r.t)
            });
            prev = Some((r.regret_cum, r.v_t));
        }
        let g = run(&mut Greedy::new(), inst)?;
        let worst = g.max_regret();
        gr.check(worst <= REGRET_TOL, || format!("{}: max regret {worst:.3e}", inst.family));
        let again = run(frugal(opts).as_mut(), inst)?;
        det.check(again.records == trace.records, || format!("{} differs between runs", inst.family));
    }
    Ok(vec![fr.finish(), gr.finish(), budget.finish(), det.finish()])
}

fn instances(opts: VerifyOptions) -> Result<Vec<CheckResult>> {
    let none = BTreeMap::new();
    let mut nested = Tally::new("instances", "generators_nested");
    for fam in FAMILY_NAMES {
        for horizon in [8, 24] {
            let inst = build_family(fam, horizon, &none, opts.seed)?;
            let seq = match inst.sequence() {
                Some(seq) => seq.clone(),
                None => {
                    let trace = run(&mut Frugal::new(), &inst)?;
                    trace
                        .adversary
                        .and_then(|a| a.recorded)
                        .ok_or_else(|| ConesError::ParameterError("adversary did not record".into()))?
                }
            };
            let report = seq.assert_nested(16, opts.seed);
            let structural = seq
                .sets()
                .windows(2)
                .all(|w| NestedSequence::structurally_nested(&w[0], &w[1]));
            nested.check(report.is_ok() && structural, || {
                format!("{fam} T = {horizon}: {:?}", report.violations.first())
            });
        }
    }
    let mut radii = Tally::new("instances", "sc_lb_radius_recurrence");
    for horizon in [16, 64, 200] {
        let k = sc_lb_k(horizon, 1.0, 4.0);
        let mins = sc_lb_minimizers(horizon, 1.0, 4.0, k)?;
        for i in 1..=horizon / 2 {
            let r_prev = mins[2 * i - 2].norm();
            let want = r_prev + k * k / r_prev;
            let got = mins[2 * i].norm();
            radii.check((got - want).abs() <= 1e-9 * want, || format!("T = {horizon}, i = {i}: {got} vs {want}"));
        }
    }
    let mut sc_min = Tally::new("instances", "sc_lb_minimizers_solve_sets");
    let inst = gen_sc_lower_bound(24, 1.0, 4.0)?;
    let seq = inst.sequence().expect("oblivious");
    for t in 1..=24 {
        let m = minimize_over(inst.objective_at(t), seq.get(t).expect("t ≤ T"))?;
        let d = m.argmin.dist(&inst.minimizers[t]);
        sc_min.check(d <= 1e-8, || format!("t = {t}: argmin off by {d:.3e}"));
    }
    let mut random = Tally::new("instances", "random_determinism");
    for s in 0..5 {
        let a = serde_json::to_string(&gen_random_1d(Random1dKind::Lin, 20, opts.seed + s)?)?;
        let b = serde_json::to_string(&gen_random_1d(Random1dKind::Lin, 20, opts.seed + s)?)?;
        random.check(a == b, || format!("seed {} not reproducible", opts.seed + s));
    }
    Ok(vec![nested.finish(), radii.finish(), sc_min.finish(), random.finish()])
}

fn oracle(opts: VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut dp = Tally::new("oracle", "dp_matches_enumeration");
    for horizon in 1..=4 {
        for s in 0..3 {
            let inst = gen_random_1d(Random1dKind::Lin, horizon, opts.seed + 17 * s)?;
            let a = offline_lin_dp_1d(&inst, 21)?;
            let b = enumerate_lin_1d(&inst, 21)?;
            dp.check((a.value - b.value).abs() <= 1e-9 * (1.0 + b.value), || {
                format!("T = {horizon}: dp {} vs enumeration {}", a.value, b.value)
            });
        }
    }
    let mut refine = Tally::new("oracle", "dp_refinement_monotone");
    for s in 0..5 {
        let inst = gen_random_1d(Random1dKind::Lin, 30, opts.seed + s)?;
        let coarse = offline_lin_dp_1d(&inst, 251)?.value;
        let fine = offline_lin_dp_1d(&inst, 501)?.value;
        refine.check(fine <= coarse + 1e-6, || format!("seed {}: {fine} > {coarse}", opts.seed + s));
    }
    let mut stat = Tally::new("oracle", "static_opt_feasible");
    for fam in ["sc_lb", "convex_lb", "directional", "frozen"] {
        let inst = build_family(fam, 20, &BTreeMap::new(), opts.seed)?;
        let seq = inst.sequence().expect("oblivious");
        let r = static_opt(inst.objective_at(20), seq.last(), 20, &inst.x0)?;
        let worst = seq
            .sets()
            .iter()
            .map(|s| s.violation_unchecked(&r.path[0]) - s.feas_tol())
            .fold(f64::NEG_INFINITY, f64::max);
        stat.check(worst <= 0.0, || format!("{fam}: x_OPT violates some S_t by {worst:.3e}"));
    }
    Ok(vec![dp.finish(), refine.finish(), stat.finish()])
}
