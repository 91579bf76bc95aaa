//! Constrained minimization, nearest minimizers and sublevel projections.

use crate::error::{ConesError, Result};
use crate::geometry::{project, ConvexSet, Halfspace, Point, Polygon};
use crate::objectives::{Objective, ObjectiveKind};

pub const SUBGRADIENT_ITERS: usize = 5_000;
pub const MULTIPLIER_BISECTION_STEPS: usize = 200;

/// Optimality slack `1e-9 * (1 + |value|)`.
pub fn opt_tol(value: f64) -> f64 {
    1e-9 * (1.0 + value.abs())
}

/// Width of the sublevel surrogate that stands in for a non-unique argmin set.
pub fn argmin_delta(value: f64) -> f64 {
    1e-8 * (1.0 + value.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinResult {
    pub argmin: Point,
    pub value: f64,
    pub certified: bool,
}

fn check_dims(f: &Objective, s: &ConvexSet) -> Result<()> {
    match f.kind.dim() {
        Some(d) if d != s.dim() => Err(ConesError::DimensionMismatch {
            expected: s.dim(),
            found: d,
        }),
        _ => Ok(()),
    }
}

fn exact(f: &Objective, p: Point) -> MinResult {
    MinResult {
        value: f.value(&p),
        argmin: p,
        certified: true,
    }
}

fn box_based_2d(s: &ConvexSet) -> bool {
    s.dim() == 2 && matches!(s.base(), ConvexSet::Box { .. })
}

pub fn minimize_over(f: &Objective, s: &ConvexSet) -> Result<MinResult> {
    check_dims(f, s)?;
    let d = s.dim();
    match &f.kind {
        ObjectiveKind::Quadratic { center } | ObjectiveKind::ScaledNorm { center, .. } => {
            Ok(exact(f, project(s, center)?))
        }
        ObjectiveKind::SquaredNorm => Ok(exact(f, project(s, &Point::zeros(d))?)),
        ObjectiveKind::AbsShift { m } => Ok(exact(f, project(s, &Point::scalar(*m))?)),
        ObjectiveKind::Constant { .. } => Ok(exact(f, project(s, &s.base_center())?)),
        ObjectiveKind::MaxAbs if d == 1 => Ok(exact(f, project(s, &Point::zeros(1))?)),
        ObjectiveKind::MaxAbs if box_based_2d(s) => Ok(exact(f, max_abs_polygon(&Polygon::of(s)?))),
        ObjectiveKind::LinearPlusQuad { eps } if box_based_2d(s) => {
            Ok(exact(f, linear_quad_polygon(&Polygon::of(s)?, *eps)))
        }
        _ => projected_subgradient(f, s),
    }
}

fn best_of(f: &Objective, candidates: impl IntoIterator<Item = [f64; 2]>) -> Point {
    let mut best: Option<(f64, [f64; 2])> = None;
    for c in candidates {
        let v = f.value(&Point::from_vec_unchecked(c.to_vec()));
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, c));
        }
    }
    Point::from_vec_unchecked(best.expect("polygon has vertices").1.to_vec())
}

fn max_abs_polygon(poly: &Polygon) -> Point {
    let f = Objective::max_abs();
    let mut cands: Vec<[f64; 2]> = poly.vertices.clone();
    // the kinks of max(|x|,|y|) are the lines x = 0, y = 0, x = y, x = -y
    let lines: [([f64; 2], f64); 4] = [([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0), ([1.0, -1.0], 0.0), ([1.0, 1.0], 0.0)];
    for (p, q) in poly.edges() {
        for (n, c) in &lines {
            let sp = n[0] * p[0] + n[1] * p[1] - c;
            let sq = n[0] * q[0] + n[1] * q[1] - c;
            if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
                let s = sp / (sp - sq);
                cands.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
            }
        }
    }
    if point_in_polygon(poly, [0.0, 0.0]) {
        cands.push([0.0, 0.0]);
    }
    best_of(&f, cands)
}

fn point_in_polygon(poly: &Polygon, x: [f64; 2]) -> bool {
    let area_sign = poly.area().signum();
    poly.edges().all(|(p, q)| {
        let cross = (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]);
        cross * area_sign >= 0.0
    })
}

fn linear_quad_polygon(poly: &Polygon, eps: f64) -> Point {
    let f = Objective::new(ObjectiveKind::LinearPlusQuad { eps }, Default::default()).expect("eps validated");
    let mut cands: Vec<[f64; 2]> = poly.vertices.clone();
    for (p, q) in poly.edges() {
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let a = eps * dx * dx;
        let b = dx + dy + 2.0 * eps * p[0] * dx;
        if a > 0.0 {
            let s = (-b / (2.0 * a)).clamp(0.0, 1.0);
            cands.push([p[0] + s * dx, p[1] + s * dy]);
        }
    }
    best_of(&f, cands)
}

/// Projected subgradient with step `D / (G √k)`, keeping the best iterate.
fn projected_subgradient(f: &Objective, s: &ConvexSet) -> Result<MinResult> {
    let diam = s.diameter_bound().max(f64::MIN_POSITIVE);
    let mut x = project(s, &s.base_center())?;
    let g0 = f.subgradient_unchecked(&x).norm();
    let g_bound = f.regularity.lipschitz_g.unwrap_or(g0).max(1e-12);
    let mut best = (f.value(&x), x.clone());
    for k in 1..=SUBGRADIENT_ITERS {
        let g = f.subgradient_unchecked(&x);
        if g.norm() == 0.0 {
            break;
        }
        let eta = diam / (g_bound * (k as f64).sqrt());
        x = project(s, &x.axpy(-eta, &g))?;
        let v = f.value(&x);
        if v < best.0 {
            best = (v, x.clone());
        }
    }
    Ok(MinResult {
        value: best.0,
        argmin: best.1,
        certified: false,
    })
}

/// Point of the `delta`-sublevel surrogate of the argmin set nearest to `reference`.
/// Kinds with a unique minimizer return it directly.
pub fn nearest_minimizer(f: &Objective, s: &ConvexSet, reference: &Point, delta: f64) -> Result<Point> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(ConesError::ParameterError(format!("delta = {delta} must be positive")));
    }
    reference.check_dim(s.dim())?;
    let min = minimize_over(f, s)?;
    nearest_from_min(f, s, &min, reference, delta)
}

/// [`nearest_minimizer`] reusing an already computed [`MinResult`].
/// A sublevel set too thin for the projection falls back to `min.argmin`.
pub fn nearest_from_min(f: &Objective, s: &ConvexSet, min: &MinResult, reference: &Point, delta: f64) -> Result<Point> {
    if f.kind.has_unique_minimizer() && min.certified {
        return Ok(min.argmin.clone());
    }
    match project_sublevel(f, s, min.value + delta, reference) {
        Err(ConesError::EmptyLevelSet { .. }) => Ok(min.argmin.clone()),
        other => other,
    }
}

/// Euclidean projection of `reference` onto `{x ∈ S : f(x) ≤ level}`.
pub fn project_sublevel(f: &Objective, s: &ConvexSet, level: f64, reference: &Point) -> Result<Point> {
    check_dims(f, s)?;
    reference.check_dim(s.dim())?;
    if s.violation_unchecked(reference) == 0.0 && f.value(reference) <= level {
        return Ok(reference.clone());
    }
    let v = minimize_over(f, s)?.value;
    if level < v - opt_tol(v) {
        return Err(ConesError::EmptyLevelSet { level });
    }
    let raw = (level - f.value_shift).max(0.0);
    let d = s.dim();
    let empty = |e: ConesError| match e {
        ConesError::EmptySet | ConesError::EmptyIntersection => ConesError::EmptyLevelSet { level },
        other => other,
    };
    match &f.kind {
        ObjectiveKind::Constant { .. } => project(s, reference),
        ObjectiveKind::SquaredNorm => ball_sublevel(f, s, &Point::zeros(d), raw.sqrt(), level, reference).map_err(empty),
        ObjectiveKind::Quadratic { center } => {
            ball_sublevel(f, s, center, (2.0 * raw).sqrt(), level, reference).map_err(empty)
        }
        ObjectiveKind::ScaledNorm { c, center } => {
            ball_sublevel(f, s, center, raw / c, level, reference).map_err(empty)
        }
        ObjectiveKind::AbsShift { m } => {
            let hs = [
                Halfspace::new(Point::scalar(1.0), m - raw)?,
                Halfspace::new(Point::scalar(-1.0), -(m + raw))?,
            ];
            project(&s.with_cuts_unchecked(hs)?, reference).map_err(empty)
        }
        ObjectiveKind::MaxAbs => {
            let mut hs = Vec::with_capacity(2 * d);
            for i in 0..d {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                hs.push(Halfspace::new(Point::new(e.clone())?, -raw)?);
                e[i] = -1.0;
                hs.push(Halfspace::new(Point::new(e)?, -raw)?);
            }
            project(&s.with_cuts_unchecked(hs)?, reference).map_err(empty)
        }
        ObjectiveKind::LinearPlusQuad { eps } => {
            let eps = *eps;
            let r = reference.clone();
            multiplier_bisection(f, level, |lambda| {
                let sc = (1.0 + 2.0 * lambda * eps).sqrt();
                let scaled = s.scaled_axes(&[sc, 1.0])?;
                let w = Point::new(vec![(r[0] - lambda) / sc, r[1] - lambda])?;
                let z = project(&scaled, &w)?;
                Ok(Point::from_vec_unchecked(vec![z[0] / sc, z[1]]))
            })
        }
    }
}

/// Projection onto `S ∩ Ball(center, radius)`.
fn ball_sublevel(f: &Objective, s: &ConvexSet, center: &Point, radius: f64, level: f64, reference: &Point) -> Result<Point> {
    match s.base() {
        ConvexSet::Box { .. } => {
            let mut cuts = s.base_faces();
            cuts.extend_from_slice(s.cuts());
            let joint = ConvexSet::Cut {
                base: Box::new(ConvexSet::ball(center.clone(), radius)?),
                cuts,
            };
            project(&joint, reference)
        }
        _ => {
            // ½‖x − r‖² + λ·½‖x − c‖² is minimized over S by projecting (r + λc)/(1 + λ)
            multiplier_bisection(f, level, |lambda| {
                let target = reference.axpy(lambda, center).scale(1.0 / (1.0 + lambda));
                project(s, &target)
            })
        }
    }
}

/// Bisection on the multiplier of `f ≤ level`; `prox(λ)` minimizes `½‖x − ref‖² + λ f(x)` over S.
fn multiplier_bisection<P>(f: &Objective, level: f64, prox: P) -> Result<Point>
where
    P: Fn(f64) -> Result<Point>,
{
    let x0 = prox(0.0)?;
    if f.value(&x0) <= level {
        return Ok(x0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x_hi = prox(hi)?;
    let mut doublings = 0;
    while f.value(&x_hi) > level && doublings < 1000 {
        lo = hi;
        hi *= 2.0;
        x_hi = prox(hi)?;
        doublings += 1;
    }
    if f.value(&x_hi) > level + opt_tol(level) {
        return Err(ConesError::IterationLimit {
            what: "sublevel multiplier bracket",
            iterations: doublings,
        });
    }
    for _ in 0..MULTIPLIER_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let xm = prox(mid)?;
        if f.value(&xm) <= level {
            hi = mid;
            x_hi = xm;
        } else {
            lo = mid;
        }
    }
    Ok(x_hi)
}
