//! Offline reference solutions.

use serde::Serialize;

use crate::error::{ConesError, Result};
use crate::geometry::{ConvexSet, Point};
use crate::instances::Instance;
use crate::objectives::Objective;
use crate::solvers::minimize_over;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OfflineResult {
    pub value: f64,
    /// The DP path `x_1..x_T`, or the single static point.
    pub path: Vec<Point>,
    pub grid_resolution: usize,
    /// `‖x^OPT − x0‖` for the static benchmark.
    pub movement: Option<f64>,
}

/// Static hindsight benchmark `T · min_{S_T} f`.
pub fn static_opt(f: &Objective, s_last: &ConvexSet, horizon: usize, x0: &Point) -> Result<OfflineResult> {
    let m = minimize_over(f, s_last)?;
    let movement = m.argmin.dist(x0);
    Ok(OfflineResult {
        value: horizon as f64 * m.value,
        path: vec![m.argmin],
        grid_resolution: 0,
        movement: Some(movement),
    })
}

fn lin_setup(inst: &Instance, grid_n: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if inst.dim() != 1 {
        return Err(ConesError::DimensionMismatch {
            expected: 1,
            found: inst.dim(),
        });
    }
    if grid_n < 3 {
        return Err(ConesError::ParameterError(format!("grid_n = {grid_n} must be at least 3")));
    }
    let seq = inst
        .sequence()
        .ok_or_else(|| ConesError::ParameterError("the offline DP needs an oblivious sequence".into()))?;
    let (lo, hi) = seq.get(1).expect("nonempty").bounding_box();
    let (lo, hi) = (lo[0], hi[0]);
    let grid: Vec<f64> = (0..grid_n)
        .map(|i| lo + (hi - lo) * i as f64 / (grid_n - 1) as f64)
        .collect();
    let mut costs = Vec::with_capacity(seq.len());
    for (i, s) in seq.sets().iter().enumerate() {
        let t = i + 1;
        let f = inst.objective_at(t);
        let tol = s.feas_tol();
        let row: Vec<f64> = grid
            .iter()
            .map(|&g| {
                let p = Point::scalar(g);
                if s.violation_unchecked(&p) <= tol {
                    f.value(&p)
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        if row.iter().all(|c| c.is_infinite()) {
            return Err(ConesError::InfeasibleGrid { t });
        }
        costs.push(row);
    }
    Ok((grid, costs))
}

/// `min_j V(j) + |g_i − g_j|` for every `i`, with the minimizing `j` (ties to the smaller index).
fn distance_transform(grid: &[f64], v: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = grid.len();
    let mut fwd = vec![(f64::INFINITY, 0usize); n];
    for i in 0..n {
        let mut best = (v[i], i);
        if i > 0 {
            let carry = fwd[i - 1].0 + (grid[i] - grid[i - 1]);
            if carry <= best.0 {
                best = (carry, fwd[i - 1].1);
            }
        }
        fwd[i] = best;
    }
    let mut bwd = vec![(f64::INFINITY, 0usize); n];
    for i in (0..n).rev() {
        let mut best = (v[i], i);
        if i + 1 < n {
            let carry = bwd[i + 1].0 + (grid[i + 1] - grid[i]);
            if carry < best.0 {
                best = (carry, bwd[i + 1].1);
            }
        }
        bwd[i] = best;
    }
    fwd.iter()
        .zip(&bwd)
        .map(|(&(fv, fj), &(bv, bj))| if bv < fv || (bv == fv && bj < fj) { (bv, bj) } else { (fv, fj) })
        .unzip()
}

/// Offline optimum of `Σ f_t(x_t) + Σ |x_t − x_{t−1}|` over a uniform grid of `S_1`.
pub fn offline_lin_dp_1d(inst: &Instance, grid_n: usize) -> Result<OfflineResult> {
    let (grid, costs) = lin_setup(inst, grid_n)?;
    let x0 = inst.x0[0];
    let mut v: Vec<f64> = grid
        .iter()
        .zip(&costs[0])
        .map(|(g, c)| c + (g - x0).abs())
        .collect();
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(costs.len());
    for row in &costs[1..] {
        let (dt, arg) = distance_transform(&grid, &v);
        v = dt.iter().zip(row).map(|(d, c)| d + c).collect();
        parents.push(arg);
    }
    let mut end = 0;
    for i in 1..v.len() {
        if v[i] < v[end] {
            end = i;
        }
    }
    let value = v[end];
    let mut idx = vec![end];
    for arg in parents.iter().rev() {
        let next = arg[*idx.last().expect("nonempty")];
        idx.push(next);
    }
    idx.reverse();
    Ok(OfflineResult {
        value,
        path: idx.into_iter().map(|i| Point::scalar(grid[i])).collect(),
        grid_resolution: grid_n,
        movement: None,
    })
}

/// Exhaustive search over every grid path; exponential in `T`, for cross-checking the DP.
pub fn enumerate_lin_1d(inst: &Instance, grid_n: usize) -> Result<OfflineResult> {
    let (grid, costs) = lin_setup(inst, grid_n)?;
    let horizon = costs.len();
    let total = grid_n
        .checked_pow(horizon as u32)
        .filter(|&n| n <= 50_000_000)
        .ok_or_else(|| ConesError::ParameterError(format!("{grid_n}^{horizon} paths is too many")))?;
    let mut best = (f64::INFINITY, Vec::new());
    let mut idx = vec![0usize; horizon];
    for code in 0..total {
        let mut c = code;
        for slot in idx.iter_mut().rev() {
            *slot = c % grid_n;
            c /= grid_n;
        }
        let mut prev = inst.x0[0];
        let mut cost = 0.0;
        for (t, &i) in idx.iter().enumerate() {
            cost += costs[t][i] + (grid[i] - prev).abs();
            prev = grid[i];
        }
        if cost < best.0 {
            best = (cost, idx.clone());
        }
    }
    Ok(OfflineResult {
        value: best.0,
        path: best.1.into_iter().map(|i| Point::scalar(grid[i])).collect(),
        grid_resolution: grid_n,
        movement: None,
    })
}

/// Grid minimizer of `f` over `S` using `n` points per axis of the bounding box.
pub fn brute_force_min_grid(f: &Objective, s: &ConvexSet, n: usize) -> Result<OfflineResult> {
    let d = s.dim();
    if d > 2 {
        return Err(ConesError::ParameterError(format!("grid search supports d ≤ 2, got {d}")));
    }
    if n < 2 {
        return Err(ConesError::ParameterError(format!("n = {n} must be at least 2")));
    }
    let (lo, hi) = s.bounding_box();
    let axis = |k: usize, i: usize| lo[k] + (hi[k] - lo[k]) * i as f64 / (n - 1) as f64;
    let tol = s.feas_tol();
    let mut best: Option<(f64, Point)> = None;
    let rows = if d == 2 { n } else { 1 };
    for i in 0..n {
        for j in 0..rows {
            let p = if d == 2 {
                Point::from([axis(0, i), axis(1, j)])
            } else {
                Point::scalar(axis(0, i))
            };
            if s.violation_unchecked(&p) > tol {
                continue;
            }
            let v = f.eval(&p)?;
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, p));
            }
        }
    }
    let (value, p) = best.ok_or(ConesError::InfeasibleGrid { t: 0 })?;
    Ok(OfflineResult {
        value,
        path: vec![p],
        grid_resolution: n,
        movement: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::NestedSequence;
    use crate::instances::{gen_directional, gen_random_1d_lin, Feed, Objectives};
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;

    fn constant_instance(horizon: usize, x0: f64, m: f64) -> Instance {
        let s = ConvexSet::interval(0.0, 10.0).unwrap();
        Instance {
            family: "test".into(),
            horizon,
            x0: Point::scalar(x0),
            objectives: Objectives::Fixed(Objective::abs_shift(m)),
            feed: Feed::Oblivious(NestedSequence::new(vec![s.clone(); horizon]).unwrap()),
            domain: s,
            minimizers: Vec::new(),
            seed: None,
            meta: BTreeMap::new(),
        }
    }

    #[test]
    fn dp_stays_at_the_center() {
        let r = offline_lin_dp_1d(&constant_instance(6, 5.0, 5.0), 101).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.path.iter().all(|p| p[0] == 5.0));
    }

    #[test]
    fn dp_single_step() {
        let r = offline_lin_dp_1d(&constant_instance(1, 0.0, 5.0), 101).unwrap();
        assert_relative_eq!(r.value, 5.0, epsilon = 1e-12);
        // ties go to the smallest grid index
        assert_eq!(r.path[0][0], 0.0);
    }

    #[test]
    fn dp_matches_enumeration() {
        for seed in 0..6 {
            let inst = gen_random_1d_lin(3, seed).unwrap();
            let dp = offline_lin_dp_1d(&inst, 21).unwrap();
            let en = enumerate_lin_1d(&inst, 21).unwrap();
            assert_relative_eq!(dp.value, en.value, epsilon = 1e-9);
            let fs: Vec<_> = (1..=3).map(|t| inst.objective_at(t).clone()).collect();
            let cost = crate::algorithms::lin_cost(&inst.x0, &dp.path, &fs).unwrap();
            assert_relative_eq!(cost, dp.value, epsilon = 1e-9);
        }
    }

    #[test]
    fn static_directional() {
        let inst = gen_directional(10.0, 5).unwrap();
        let r = static_opt(inst.objective_at(5), inst.sequence().unwrap().last(), 5, &inst.x0).unwrap();
        assert!(r.path[0].dist(&Point::from([0.0, 5.0])) < 1e-9);
        assert_relative_eq!(r.value, 25.0, epsilon = 1e-9);
        assert_relative_eq!(r.movement.unwrap(), 4.0, epsilon = 1e-9);
    }

    #[test]
    fn grid_box_minimum() {
        let s = ConvexSet::boxed(Point::from([1.0, 1.0]), Point::from([2.0, 2.0])).unwrap();
        let r = brute_force_min_grid(&Objective::squared_norm(), &s, 101).unwrap();
        assert_eq!(r.path[0], Point::from([1.0, 1.0]));
        assert_relative_eq!(r.value, 2.0);
    }

    #[test]
    fn infeasible_grid_is_reported() {
        let s = ConvexSet::interval(0.0, 10.0)
            .unwrap()
            .intersect_halfspace(crate::geometry::Halfspace::new(Point::scalar(1.0), 0.01).unwrap())
            .unwrap()
            .intersect_halfspace(crate::geometry::Halfspace::new(Point::scalar(-1.0), -0.02).unwrap())
            .unwrap();
        let mut inst = constant_instance(1, 0.0, 5.0);
        inst.feed = Feed::Oblivious(NestedSequence::new(vec![s]).unwrap());
        assert!(matches!(offline_lin_dp_1d(&inst, 11), Err(ConesError::InfeasibleGrid { t: 1 })));
    }
}
