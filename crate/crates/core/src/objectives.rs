//! Loss functions with value and subgradient oracles.

use serde::{Deserialize, Serialize};

use crate::error::{ConesError, Result};
use crate::geometry::{ConvexSet, Point};
use crate::rng::{sample_in_set, seeded};
use crate::solvers::{minimize_over, project_sublevel};

/// Regularity constants. Every field is optional because not every kind has them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lipschitz_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strong_convexity_mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub smoothness_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sharpness_alpha: Option<f64>,
}

impl Regularity {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("G", self.lipschitz_g),
            ("mu", self.strong_convexity_mu),
            ("L", self.smoothness_l),
            ("alpha", self.sharpness_alpha),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(ConesError::ParameterError(format!("{name} = {v} must be positive")));
                }
            }
        }
        if let (Some(mu), Some(l)) = (self.strong_convexity_mu, self.smoothness_l) {
            if mu > l {
                return Err(ConesError::ParameterError(format!("mu = {mu} exceeds L = {l}")));
            }
        }
        if let (Some(a), Some(g)) = (self.sharpness_alpha, self.lipschitz_g) {
            if a > g {
                return Err(ConesError::ParameterError(format!("alpha = {a} exceeds G = {g}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// `½‖x − center‖²`
    Quadratic { center: Point },
    /// `‖x‖²`
    SquaredNorm,
    /// `c‖x − center‖`
    ScaledNorm { c: f64, center: Point },
    /// `max_i |x_i|`
    MaxAbs,
    /// `x1 + x2 + eps·x1²` (d = 2)
    LinearPlusQuad { eps: f64 },
    /// `|x − m|` (d = 1)
    AbsShift { m: f64 },
    /// constant `c`
    Constant { c: f64 },
}

impl ObjectiveKind {
    /// Required dimension, if the kind fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ObjectiveKind::Quadratic { center } | ObjectiveKind::ScaledNorm { center, .. } => Some(center.dim()),
            ObjectiveKind::LinearPlusQuad { .. } => Some(2),
            ObjectiveKind::AbsShift { .. } => Some(1),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::Quadratic { .. } => "quadratic",
            ObjectiveKind::SquaredNorm => "squared_norm",
            ObjectiveKind::ScaledNorm { .. } => "scaled_norm",
            ObjectiveKind::MaxAbs => "max_abs",
            ObjectiveKind::LinearPlusQuad { .. } => "linear_plus_quad",
            ObjectiveKind::AbsShift { .. } => "abs_shift",
            ObjectiveKind::Constant { .. } => "constant",
        }
    }

    /// True when the minimizer over any nonempty convex set is a single point.
    pub fn has_unique_minimizer(&self) -> bool {
        match self {
            ObjectiveKind::MaxAbs | ObjectiveKind::Constant { .. } => false,
            ObjectiveKind::LinearPlusQuad { eps } => *eps > 0.0,
            ObjectiveKind::ScaledNorm { c, .. } => *c > 0.0,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    #[serde(flatten)]
    pub kind: ObjectiveKind,
    #[serde(default)]
    pub regularity: Regularity,
    #[serde(default)]
    pub value_shift: f64,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, regularity: Regularity) -> Result<Self> {
        match &kind {
            ObjectiveKind::ScaledNorm { c, .. } if !(*c > 0.0 && c.is_finite()) => {
                return Err(ConesError::ParameterError(format!("scaled norm needs c > 0, got {c}")))
            }
            ObjectiveKind::LinearPlusQuad { eps } if !(*eps >= 0.0 && eps.is_finite()) => {
                return Err(ConesError::ParameterError(format!("linear-plus-quad needs eps >= 0, got {eps}")))
            }
            ObjectiveKind::AbsShift { m } if !m.is_finite() => {
                return Err(ConesError::ParameterError("abs shift needs a finite m".into()))
            }
            ObjectiveKind::Constant { c } if !c.is_finite() => {
                return Err(ConesError::ParameterError("constant must be finite".into()))
            }
            _ => {}
        }
        regularity.validate()?;
        Ok(Self {
            kind,
            regularity,
            value_shift: 0.0,
        })
    }

    /// Builds `kind` with regularity constants computed for the domain `x`.
    pub fn on_domain(kind: ObjectiveKind, x: &ConvexSet) -> Result<Self> {
        if let Some(d) = kind.dim() {
            if d != x.dim() {
                return Err(ConesError::DimensionMismatch {
                    expected: x.dim(),
                    found: d,
                });
            }
        }
        let r_from = |c: &Point| max_dist_over_box(x, c);
        let origin = Point::zeros(x.dim());
        let reg = match &kind {
            ObjectiveKind::Quadratic { center } => Regularity {
                lipschitz_g: positive(r_from(center)),
                strong_convexity_mu: Some(1.0),
                smoothness_l: Some(1.0),
                sharpness_alpha: None,
            },
            ObjectiveKind::SquaredNorm => Regularity {
                lipschitz_g: positive(2.0 * r_from(&origin)),
                strong_convexity_mu: Some(2.0),
                smoothness_l: Some(2.0),
                sharpness_alpha: None,
            },
            ObjectiveKind::ScaledNorm { c, .. } => Regularity {
                lipschitz_g: Some(*c),
                sharpness_alpha: Some(*c),
                ..Regularity::default()
            },
            ObjectiveKind::MaxAbs => Regularity {
                lipschitz_g: Some(1.0),
                ..Regularity::default()
            },
            ObjectiveKind::LinearPlusQuad { eps } => {
                let (lo, hi) = x.bounding_box();
                let m = lo[0].abs().max(hi[0].abs());
                Regularity {
                    lipschitz_g: Some(((1.0 + 2.0 * eps * m).powi(2) + 1.0).sqrt()),
                    smoothness_l: positive(2.0 * eps),
                    ..Regularity::default()
                }
            }
            ObjectiveKind::AbsShift { .. } => Regularity {
                lipschitz_g: Some(1.0),
                sharpness_alpha: Some(1.0),
                ..Regularity::default()
            },
            ObjectiveKind::Constant { .. } => Regularity::default(),
        };
        Self::new(kind, reg)
    }

    pub fn quadratic(center: Point) -> Self {
        let d = center.dim();
        Self::plain(ObjectiveKind::Quadratic { center }, d)
    }

    pub fn squared_norm() -> Self {
        Self::plain(ObjectiveKind::SquaredNorm, 0)
    }

    pub fn max_abs() -> Self {
        Self::plain(ObjectiveKind::MaxAbs, 0)
    }

    pub fn abs_shift(m: f64) -> Self {
        Self::plain(ObjectiveKind::AbsShift { m }, 1)
    }

    pub fn constant(c: f64) -> Self {
        Self::plain(ObjectiveKind::Constant { c }, 0)
    }

    fn plain(kind: ObjectiveKind, _d: usize) -> Self {
        Self::new(kind, Regularity::default()).expect("parameters are valid")
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.value_shift = shift;
        self
    }

    fn check(&self, x: &Point) -> Result<()> {
        if let Some(d) = self.kind.dim() {
            x.check_dim(d)?;
        }
        Ok(())
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        self.check(x)?;
        Ok(self.value(x))
    }

    pub(crate) fn value(&self, x: &Point) -> f64 {
        let raw = match &self.kind {
            ObjectiveKind::Quadratic { center } => 0.5 * x.dist(center).powi(2),
            ObjectiveKind::SquaredNorm => x.dot(x),
            ObjectiveKind::ScaledNorm { c, center } => c * x.dist(center),
            ObjectiveKind::MaxAbs => x.coords().iter().fold(0.0f64, |m, v| m.max(v.abs())),
            ObjectiveKind::LinearPlusQuad { eps } => x[0] + x[1] + eps * x[0] * x[0],
            ObjectiveKind::AbsShift { m } => (x[0] - m).abs(),
            ObjectiveKind::Constant { c } => *c,
        };
        raw + self.value_shift
    }

    pub fn subgradient(&self, x: &Point) -> Result<Point> {
        self.check(x)?;
        Ok(self.subgradient_unchecked(x))
    }

    pub(crate) fn subgradient_unchecked(&self, x: &Point) -> Point {
        match &self.kind {
            ObjectiveKind::Quadratic { center } => x.sub(center),
            ObjectiveKind::SquaredNorm => x.scale(2.0),
            ObjectiveKind::ScaledNorm { c, center } => {
                let diff = x.sub(center);
                let n = diff.norm();
                if n == 0.0 {
                    Point::zeros(x.dim())
                } else {
                    diff.scale(c / n)
                }
            }
            ObjectiveKind::MaxAbs => {
                let mut g = vec![0.0; x.dim()];
                let (i, m) = x
                    .coords()
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
                if m > 0.0 {
                    g[i] = x[i].signum();
                }
                Point::from_vec_unchecked(g)
            }
            ObjectiveKind::LinearPlusQuad { eps } => Point::from([1.0 + 2.0 * eps * x[0], 1.0]),
            ObjectiveKind::AbsShift { m } => {
                let s = x[0] - m;
                Point::scalar(if s > 0.0 {
                    1.0
                } else if s < 0.0 {
                    -1.0
                } else {
                    0.0
                })
            }
            ObjectiveKind::Constant { .. } => Point::zeros(x.dim()),
        }
    }
}

fn positive(v: f64) -> Option<f64> {
    (v > 0.0 && v.is_finite()).then_some(v)
}

fn max_dist_over_box(x: &ConvexSet, c: &Point) -> f64 {
    let (lo, hi) = x.bounding_box();
    lo.coords()
        .iter()
        .zip(hi.coords())
        .zip(c.coords())
        .map(|((l, h), ci)| (l - ci).abs().max((h - ci).abs()).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessViolation {
    pub x: Point,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SharpnessReport {
    pub samples: usize,
    pub min_value: f64,
    /// Smallest observed `(f(x) − v) / dist(x, argmin)` over samples away from the argmin.
    pub min_ratio: f64,
    pub violations: Vec<SharpnessViolation>,
}

/// Samples `S` and checks `f(x) − v ≥ alpha·dist(x, X*_δ) − 1e-7`.
pub fn check_alpha_sharp(f: &Objective, s: &ConvexSet, alpha: f64, samples: usize, seed: u64) -> Result<SharpnessReport> {
    let min = minimize_over(f, s)?;
    let v = min.value;
    let delta = 1e-8 * (1.0 + v.abs());
    let mut rng = seeded(seed);
    let mut report = SharpnessReport {
        samples,
        min_value: v,
        min_ratio: f64::INFINITY,
        violations: Vec::new(),
    };
    for _ in 0..samples {
        let x = sample_in_set(&mut rng, s)?;
        let gap = f.value(&x) - v;
        let near = project_sublevel(f, s, v + delta, &x)?;
        let dist = x.dist(&near);
        if dist > 1e-6 {
            report.min_ratio = report.min_ratio.min(gap / dist);
        }
        let bound = alpha * dist;
        if gap < bound - 1e-7 {
            report.violations.push(SharpnessViolation { x, gap, bound });
        }
    }
    Ok(report)
}
