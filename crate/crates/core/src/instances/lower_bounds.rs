use std::f64::consts::SQRT_2;

use super::{Feed, Instance, Objectives};
use crate::error::{ConesError, Result};
use crate::geometry::{ConvexSet, Halfspace, NestedSequence, Point};
use crate::objectives::{Objective, ObjectiveKind};

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(ConesError::ParameterError(msg.into()))
    }
}

/// Line spacing `k = sqrt((D/√2)·r0 / (T/2 + 1))`.
pub fn sc_lb_k(horizon: usize, r0: f64, d: f64) -> f64 {
    ((d / SQRT_2) * r0 / (horizon as f64 / 2.0 + 1.0)).sqrt()
}

/// Minimizers `x_0*, ..., x_T*` of the strongly convex lower-bound construction.
/// Each `x_t*` is the tangent at `x_{t-1}*` intersected with `p = -k` (t odd) or `p = 0` (t even).
pub fn sc_lb_minimizers(horizon: usize, r0: f64, d: f64, k: f64) -> Result<Vec<Point>> {
    let a = r0;
    let bottom = -a - d / SQRT_2;
    let mut out = vec![Point::from([0.0, -a])];
    for t in 1..=horizon {
        let prev = &out[t - 1];
        let p = if t % 2 == 1 { -k } else { 0.0 };
        let q = (prev.dot(prev) - prev[0] * p) / prev[1];
        if q < bottom - 1e-12 * (1.0 + bottom.abs()) {
            return Err(ConesError::ParameterError(format!(
                "minimizer {t} at q = {q} leaves the square (bottom {bottom})"
            )));
        }
        out.push(Point::from([p, q]));
    }
    Ok(out)
}

pub fn gen_sc_lower_bound(horizon: usize, r0: f64, d: f64) -> Result<Instance> {
    require(horizon >= 1, "T must be at least 1")?;
    require(r0 > 0.0 && r0.is_finite(), format!("r0 = {r0} must be positive"))?;
    require(d > 0.0 && d.is_finite(), format!("D = {d} must be positive"))?;
    let a = r0;
    let half = d / (2.0 * SQRT_2);
    let k = sc_lb_k(horizon, r0, d);
    require(k <= half, format!("k = {k} exceeds the half width {half}"))?;
    let x = ConvexSet::boxed(Point::from([-half, -a - d / SQRT_2]), Point::from([half, -a]))?;
    let mins = sc_lb_minimizers(horizon, r0, d, k)?;
    let mut sets = Vec::with_capacity(horizon);
    let mut cur = x.clone();
    for m in &mins[1..] {
        cur = cur.intersect_halfspace(Halfspace::new(m.clone(), m.dot(m))?)?;
        sets.push(cur.clone());
    }
    let objective = Objective::on_domain(ObjectiveKind::SquaredNorm, &x)?;
    Ok(Instance {
        family: "sc_lb".into(),
        horizon,
        x0: mins[0].clone(),
        objectives: Objectives::Fixed(objective),
        feed: Feed::Oblivious(NestedSequence::new(sets)?),
        domain: x,
        minimizers: mins,
        seed: None,
        meta: [("r0", r0), ("D", d), ("k", k), ("a", a)]
            .into_iter()
            .map(|(n, v)| (n.to_string(), v))
            .collect(),
    })
}

/// `x_t* = ((-1)^t D/(2√2), -a - Σ_{i≤t} k/2^{i-1})`
pub fn convex_lb_minimizer(t: usize, d: f64, a: f64, k: f64) -> Point {
    let half = d / (2.0 * SQRT_2);
    let p = if t % 2 == 1 { -half } else { half };
    let drop: f64 = (1..=t).map(|i| k / 2f64.powi(i as i32 - 1)).sum();
    Point::from([p, -a - drop])
}

pub fn gen_convex_lower_bound(horizon: usize, d: f64, a: f64, k: f64) -> Result<Instance> {
    require(horizon >= 1, "T must be at least 1")?;
    require(d > 0.0 && d.is_finite(), format!("D = {d} must be positive"))?;
    let half = d / (2.0 * SQRT_2);
    require(a >= half - 1e-12, format!("a = {a} must be at least D/(2√2) = {half}"))?;
    require(k > 0.0 && k <= half + 1e-12, format!("k = {k} must lie in (0, D/(2√2)]"))?;
    let x = ConvexSet::boxed(Point::from([-half, -a - d / SQRT_2]), Point::from([half, -a]))?;
    let mins: Vec<Point> = (1..=horizon + 1).map(|t| convex_lb_minimizer(t, d, a, k)).collect();
    let origin = Point::zeros(2);
    let mut sets = Vec::with_capacity(horizon);
    let mut cur = x.clone();
    for t in 0..horizon {
        let h = Halfspace::through_points_excluding(&mins[t], &mins[t + 1], &origin)?;
        cur = cur.intersect_halfspace(h)?;
        sets.push(cur.clone());
    }
    let x0 = crate::geometry::project(&sets[0], &origin)?;
    let objective = Objective::on_domain(ObjectiveKind::MaxAbs, &x)?;
    let mut minimizers = vec![x0.clone()];
    minimizers.extend(mins.into_iter().take(horizon));
    Ok(Instance {
        family: "convex_lb".into(),
        horizon,
        x0,
        objectives: Objectives::Fixed(objective),
        feed: Feed::Oblivious(NestedSequence::new(sets)?),
        domain: x,
        minimizers,
        seed: None,
        meta: [("D", d), ("a", a), ("k", k)]
            .into_iter()
            .map(|(n, v)| (n.to_string(), v))
            .collect(),
    })
}

pub fn gen_directional(d: f64, horizon: usize) -> Result<Instance> {
    require(d > 2.0 && d.is_finite(), format!("D = {d} must exceed 2"))?;
    require(horizon >= 1, "T must be at least 1")?;
    require(horizon as f64 <= d, format!("T = {horizon} must not exceed D = {d}"))?;
    let eps = 4.0 / ((d - 2.0) * (d - 2.0));
    let x = ConvexSet::boxed(Point::from([0.0, 0.0]), Point::from([d, d]))?;
    let mut sets = Vec::with_capacity(horizon);
    let mut cur = x.clone();
    for t in 1..=horizon {
        cur = cur.intersect_halfspace(Halfspace::new(Point::from([1.0, 1.0]), t as f64)?)?;
        sets.push(cur.clone());
    }
    let objective = Objective::on_domain(ObjectiveKind::LinearPlusQuad { eps }, &x)?;
    let mut minimizers = vec![Point::from([0.0, 1.0])];
    minimizers.extend((1..=horizon).map(|t| Point::from([0.0, t as f64])));
    Ok(Instance {
        family: "directional".into(),
        horizon,
        x0: Point::from([0.0, 1.0]),
        objectives: Objectives::Fixed(objective),
        feed: Feed::Oblivious(NestedSequence::new(sets)?),
        domain: x,
        minimizers,
        seed: None,
        meta: [("D", d), ("eps", eps)]
            .into_iter()
            .map(|(n, v)| (n.to_string(), v))
            .collect(),
    })
}

pub fn gen_frozen(t_freeze: usize, horizon: usize, r0: f64, d: f64) -> Result<Instance> {
    require(t_freeze >= 1, "T_freeze must be at least 1")?;
    require(t_freeze <= horizon, format!("T_freeze = {t_freeze} exceeds T = {horizon}"))?;
    let mut inst = gen_sc_lower_bound(t_freeze, r0, d)?;
    let Feed::Oblivious(seq) = &mut inst.feed else {
        unreachable!("the lower-bound generator is oblivious")
    };
    let last = seq.last().clone();
    for _ in t_freeze..horizon {
        seq.push(last.clone());
    }
    let last_min = inst.minimizers[t_freeze].clone();
    inst.minimizers.extend(std::iter::repeat_n(last_min, horizon - t_freeze));
    inst.family = "frozen".into();
    inst.horizon = horizon;
    inst.meta.insert("T_freeze".into(), t_freeze as f64);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn k_value() {
        // sqrt(2√2 / 4.5) for r0 = 1, D = 4, T = 7
        assert_relative_eq!(sc_lb_k(7, 1.0, 4.0), (2.0 * SQRT_2 / 4.5).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(sc_lb_k(7, 1.0, 4.0), 0.792_804_7, epsilon = 1e-7);
    }

    #[test]
    fn first_radius_step() {
        let mins = sc_lb_minimizers(2, 1.0, 4.0, 0.5).unwrap();
        assert_eq!(mins[1], Point::from([-0.5, -1.0]));
        assert_relative_eq!(mins[2].norm() - 1.0, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn radius_recurrence() {
        let k = sc_lb_k(40, 1.0, 4.0);
        let mins = sc_lb_minimizers(40, 1.0, 4.0, k).unwrap();
        for i in 1..=20 {
            let r_prev = mins[2 * i - 2].norm();
            assert_relative_eq!(mins[2 * i].norm(), r_prev + k * k / r_prev, max_relative = 1e-9);
        }
    }

    #[test]
    fn sc_lb_minimizers_solve_each_set() {
        let inst = gen_sc_lower_bound(12, 1.0, 4.0).unwrap();
        let f = inst.objective_at(1);
        for t in 1..=12 {
            let s = inst.sequence().unwrap().get(t).unwrap();
            let m = crate::solvers::minimize_over(f, s).unwrap();
            assert!(m.argmin.dist(&inst.minimizers[t]) < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn convex_lb_geometry() {
        let d = 4.0;
        let half = d / (2.0 * SQRT_2);
        let k = d / (4.0 * SQRT_2);
        let q1 = convex_lb_minimizer(1, d, half, k)[1];
        let q2 = convex_lb_minimizer(2, d, half, k)[1];
        assert_relative_eq!(q2 - q1, -k / 2.0, max_relative = 1e-12);
        let far = convex_lb_minimizer(200, d, half, k);
        assert!(far[1] >= -half - d / SQRT_2);
        let inst = gen_convex_lower_bound(10, d, half, k).unwrap();
        let f = inst.objective_at(1);
        for t in 1..=10 {
            let s = inst.sequence().unwrap().get(t).unwrap();
            let m = crate::solvers::minimize_over(f, s).unwrap();
            assert_relative_eq!(m.value, f.value(&inst.minimizers[t]), max_relative = 1e-12);
            assert!(m.argmin.dist(&inst.minimizers[t]) < 1e-9, "t = {t}: {}", m.argmin);
        }
        assert!(gen_convex_lower_bound(4, d, 0.5, k).is_err());
        assert!(gen_convex_lower_bound(4, d, half, 2.0).is_err());
    }

    #[test]
    fn directional_parameters() {
        let inst = gen_directional(10.0, 5).unwrap();
        assert_eq!(inst.meta["eps"], 0.0625);
        assert!(gen_directional(10.0, 11).is_err());
        assert!(gen_directional(2.0, 1).is_err());
    }

    #[test]
    fn frozen_repeats_last_set() {
        let inst = gen_frozen(7, 20, 1.0, 4.0).unwrap();
        let seq = inst.sequence().unwrap();
        assert_eq!(seq.len(), 20);
        assert_eq!(seq.get(8), seq.get(20));
        assert_eq!(seq.get(7), seq.get(8));
        assert!(gen_frozen(8, 7, 1.0, 4.0).is_err());
    }
}
