use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::{Feed, Instance, Objectives};
use crate::error::{ConesError, Result};
use crate::geometry::{ConvexSet, Halfspace, NestedSequence, Point};
use crate::objectives::{Objective, ObjectiveKind, Regularity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    /// `f = c‖x‖`
    Sharp,
    /// `f = ½‖x‖²`
    StronglyConvex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryParams {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub eps: f64,
    pub horizon: usize,
    /// Number of periods `K`.
    pub periods: usize,
    pub delta: f64,
    pub eta: f64,
    pub c_bar: f64,
    pub r_max: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
}

/// Adaptive adversary that freezes the feasible set until the player comes
/// within `eps` of the current period minimizer, then cuts towards the next one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Adversary {
    pub kind: AdversaryKind,
    pub params: AdversaryParams,
    minimizers: Vec<Point>,
    #[serde(skip)]
    current: Option<ConvexSet>,
    #[serde(skip)]
    period: usize,
    completed: usize,
    period_starts: Vec<usize>,
    #[serde(skip)]
    emitted: Vec<ConvexSet>,
    #[serde(skip)]
    domain: Option<ConvexSet>,
}

/// `K = ⌊log_{1+C̄} T⌋ + 1`
pub fn period_count(horizon: usize, c_bar: f64) -> usize {
    ((horizon.max(1) as f64).ln() / (1.0 + c_bar).ln()).floor() as usize + 1
}

fn validate(a: f64, b: f64, big_b: f64, eps: f64) -> Result<()> {
    let fail = |m: String| Err(ConesError::ParameterError(m));
    if !(a > 0.0 && b > a && b.is_finite()) {
        return fail(format!("need b > a > 0, got a = {a}, b = {b}"));
    }
    if !(big_b > 0.0 && big_b.is_finite()) {
        return fail(format!("B = {big_b} must be positive"));
    }
    let cap = big_b / (3.0 * SQRT_2);
    if !(eps > 0.0 && eps < cap) {
        return fail(format!("eps = {eps} must lie in (0, B/(3√2) = {cap})"));
    }
    Ok(())
}

impl Adversary {
    fn build(kind: AdversaryKind, params: AdversaryParams) -> Result<Self> {
        let AdversaryParams {
            a, b, big_b, periods, ..
        } = params;
        let delta = (b - a) / periods as f64;
        let need = big_b * big_b * periods as f64 / (4.0 * (b - a));
        if a <= need {
            return Err(ConesError::ParameterError(format!(
                "a = {a} must exceed B²K/(4(b−a)) = {need} for K = {periods}"
            )));
        }
        debug_assert_eq!(delta, params.delta);
        let half = big_b / (2.0 * SQRT_2);
        let minimizers = (1..=periods)
            .map(|k| {
                let p = if k % 2 == 1 { -half } else { half };
                Point::from([p, -(a + k as f64 * delta)])
            })
            .collect();
        let domain = ConvexSet::boxed(Point::from([-half, -b]), Point::from([half, -a]))?;
        let mut adv = Self {
            kind,
            params,
            minimizers,
            current: None,
            period: 0,
            completed: 0,
            period_starts: Vec::new(),
            emitted: Vec::new(),
            domain: Some(domain.clone()),
        };
        adv.current = Some(domain);
        adv.open_period(1)?;
        Ok(adv)
    }

    fn halfspace(&self, k: usize) -> Result<Halfspace> {
        let m = &self.minimizers[k - 1];
        Halfspace::new(m.clone(), m.dot(m))
    }

    fn open_period(&mut self, t: usize) -> Result<()> {
        self.period += 1;
        let h = self.halfspace(self.period)?;
        let next = self.current.as_ref().expect("initialized").intersect_halfspace(h)?;
        self.current = Some(next);
        self.period_starts.push(t);
        Ok(())
    }

    /// Minimizer `x_k*` of period `k` (1-based).
    pub fn period_minimizer(&self, k: usize) -> &Point {
        &self.minimizers[k - 1]
    }

    pub fn minimizers(&self) -> &[Point] {
        &self.minimizers
    }

    pub fn current_period(&self) -> usize {
        self.period
    }

    /// Periods whose invariant `‖x_t − x_k*‖ ≤ eps` has been met.
    pub fn completed_periods(&self) -> usize {
        self.completed
    }

    /// Start times `t_k`.
    pub fn period_starts(&self) -> &[usize] {
        &self.period_starts
    }

    pub fn domain(&self) -> &ConvexSet {
        self.domain.as_ref().expect("initialized")
    }

    /// `S_t`, recorded for later replay.
    pub fn reveal(&mut self, _t: usize) -> ConvexSet {
        let s = self.current.clone().expect("initialized");
        self.emitted.push(s.clone());
        s
    }

    /// Sees the player's action `x_t`; a met invariant opens the next period at `t + 1`.
    pub fn observe(&mut self, t: usize, x: &Point) -> Result<()> {
        if self.completed >= self.period {
            return Ok(());
        }
        if x.dist(self.period_minimizer(self.period)) <= self.params.eps {
            self.completed = self.period;
            if self.period < self.params.periods {
                self.open_period(t + 1)?;
            }
        }
        Ok(())
    }

    /// Sets emitted so far, as an oblivious sequence.
    pub fn recorded(&self) -> Result<NestedSequence> {
        NestedSequence::new(self.emitted.clone())
    }

    pub fn reset_recording(&mut self) {
        self.emitted.clear();
    }
}

fn r_max(b: f64, big_b: f64) -> f64 {
    (big_b * big_b / 8.0 + b * b).sqrt()
}

fn into_instance(adv: Adversary, family: &str, objective: Objective, x0: Point) -> Instance {
    let p = &adv.params;
    let meta = [
        ("a", p.a),
        ("b", p.b),
        ("B", p.big_b),
        ("eps", p.eps),
        ("K", p.periods as f64),
        ("delta", p.delta),
        ("eta", p.eta),
        ("C_bar", p.c_bar),
        ("R_max", p.r_max),
    ]
    .into_iter()
    .chain(p.c.map(|c| ("c", c)))
    .chain(p.c_r.map(|c| ("c_R", c)))
    .chain(p.lambda.map(|l| ("lambda", l)))
    .map(|(n, v)| (n.to_string(), v))
    .collect();
    Instance {
        family: family.into(),
        horizon: p.horizon,
        x0,
        objectives: Objectives::Fixed(objective),
        domain: adv.domain().clone(),
        minimizers: adv.minimizers.clone(),
        feed: Feed::Adaptive(Box::new(adv)),
        seed: None,
        meta,
    }
}

/// Adversary against `c‖x‖` with `C̄ = R(2R+ε)/ε²`.
pub fn adversary_sharp(a: f64, b: f64, big_b: f64, c: f64, eps: f64, horizon: usize) -> Result<Instance> {
    validate(a, b, big_b, eps)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(ConesError::ParameterError(format!("c = {c} must be positive")));
    }
    let r = r_max(b, big_b);
    let eta = c * eps * eps / (2.0 * r + eps);
    let c_bar = r * (2.0 * r + eps) / (eps * eps);
    let periods = period_count(horizon, c_bar);
    let params = AdversaryParams {
        a,
        b,
        big_b,
        eps,
        horizon,
        periods,
        delta: (b - a) / periods as f64,
        eta,
        c_bar,
        r_max: r,
        c: Some(c),
        c_r: None,
        lambda: None,
    };
    let mut adv = Adversary::build(AdversaryKind::Sharp, params)?;
    let x0 = adv.period_minimizer(1).clone();
    adv.observe(0, &x0)?;
    let objective = Objective::new(
        ObjectiveKind::ScaledNorm {
            c,
            center: Point::zeros(2),
        },
        Regularity {
            lipschitz_g: Some(c),
            sharpness_alpha: Some(c),
            ..Regularity::default()
        },
    )?;
    Ok(into_instance(adv, "sharp_adv", objective, x0))
}

/// Adversary against `½‖x‖²` with `η = ε²/2` and `C̄ = R²/ε²`.
pub fn adversary_sc(a: f64, b: f64, big_b: f64, eps: f64, c_r: f64, lambda: f64, horizon: usize) -> Result<Instance> {
    validate(a, b, big_b, eps)?;
    if !(0.0..1.0).contains(&lambda) {
        return Err(ConesError::ParameterError(format!("lambda = {lambda} must lie in [0, 1)")));
    }
    if !(c_r > 0.0 && c_r.is_finite()) {
        return Err(ConesError::ParameterError(format!("c_R = {c_r} must be positive")));
    }
    let r = r_max(b, big_b);
    let eta = eps * eps / 2.0;
    let c_bar = r * r / (eps * eps);
    let periods = period_count(horizon, c_bar);
    let params = AdversaryParams {
        a,
        b,
        big_b,
        eps,
        horizon,
        periods,
        delta: (b - a) / periods as f64,
        eta,
        c_bar,
        r_max: r,
        c: None,
        c_r: Some(c_r),
        lambda: Some(lambda),
    };
    let mut adv = Adversary::build(AdversaryKind::StronglyConvex, params)?;
    let x0 = adv.period_minimizer(1).clone();
    adv.observe(0, &x0)?;
    let domain = adv.domain().clone();
    let objective = Objective::on_domain(ObjectiveKind::Quadratic { center: Point::zeros(2) }, &domain)?;
    Ok(into_instance(adv, "sc_adv", objective, x0))
}
