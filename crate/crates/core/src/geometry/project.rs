//! Euclidean projection onto [`ConvexSet`]s.
//!
//! Box and Ball use closed forms. Cut sets in dimension <= 3 use an exact
//! working-set scheme: project onto the intersection of the base with a small
//! working set of halfspaces by enumerating every subset of at most `d` of
//! them, then add the most violated remaining halfspace and repeat. Each
//! subset candidate is the projection onto an affine subspace (optionally
//! intersected with the base ball), so the final answer is exact up to
//! floating point. Higher dimensions fall back to Dykstra's alternating
//! projections.

use super::point::Point;
use super::set::{ConvexSet, Halfspace};
use crate::error::{ConesError, Result};

/// Iteration cap for the Dykstra fallback (full sweeps over all constraints).
pub const DYKSTRA_MAX_SWEEPS: usize = 10_000;

/// Stopping threshold for iterative projection: `1e-10 * (1 + |x|)`.
pub fn proj_tol(x: &Point) -> f64 {
    1e-10 * (1.0 + x.norm())
}

pub fn project(set: &ConvexSet, x: &Point) -> Result<Point> {
    x.check_dim(set.dim())?;
    match set {
        ConvexSet::Box { lo, hi } => Ok(clamp(x, lo, hi)),
        ConvexSet::Ball { center, radius } => Ok(project_ball(x, center, *radius)),
        ConvexSet::Cut { .. } => {
            let tol = set.feas_tol();
            if set.violation_unchecked(x) == 0.0 {
                return Ok(x.clone());
            }
            if set.dim() <= 3 {
                match project_working_set(set, x, tol) {
                    Err(ConesError::IterationLimit { .. }) => dykstra(set, x, tol),
                    other => other,
                }
            } else {
                dykstra(set, x, tol)
            }
        }
    }
}

fn clamp(x: &Point, lo: &Point, hi: &Point) -> Point {
    Point::from_vec_unchecked(
        x.coords()
            .iter()
            .zip(lo.coords().iter().zip(hi.coords()))
            .map(|(v, (l, h))| v.clamp(*l, *h))
            .collect(),
    )
}

fn project_ball(x: &Point, center: &Point, radius: f64) -> Point {
    let diff = x.sub(center);
    let n = diff.norm();
    if n <= radius {
        x.clone()
    } else {
        center.axpy(radius / n, &diff)
    }
}

struct Constraints<'a> {
    ball: Option<(&'a Point, f64)>,
    halfspaces: Vec<Halfspace>,
}

impl<'a> Constraints<'a> {
    fn of(set: &'a ConvexSet) -> Self {
        let ball = match set.base() {
            ConvexSet::Ball { center, radius } => Some((center, *radius)),
            _ => None,
        };
        let mut halfspaces = set.base_faces();
        halfspaces.extend_from_slice(set.cuts());
        Self { ball, halfspaces }
    }
}

fn project_working_set(set: &ConvexSet, x: &Point, tol: f64) -> Result<Point> {
    let cons = Constraints::of(set);
    let mut working: Vec<usize> = Vec::new();
    for _ in 0..=cons.halfspaces.len() + 1 {
        let p = project_onto_subset(&cons, &working, x, tol).ok_or(ConesError::EmptySet)?;
        let (worst, viol) = cons
            .halfspaces
            .iter()
            .enumerate()
            .map(|(i, h)| (i, -h.slack(&p)))
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if worst == usize::MAX || viol <= tol {
            return Ok(p);
        }
        if working.contains(&worst) {
            break;
        }
        working.push(worst);
    }
    Err(ConesError::IterationLimit {
        what: "working-set projection",
        iterations: cons.halfspaces.len() + 2,
    })
}

/// Exact projection onto `ball ∩ {h_i : i ∈ working}` by subset enumeration.
fn project_onto_subset(cons: &Constraints<'_>, working: &[usize], x: &Point, tol: f64) -> Option<Point> {
    let d = x.dim();
    let max_k = d.min(working.len());
    let mut best: Option<(f64, Point)> = None;
    let mut consider = |q: Point| {
        let feasible_ball = cons.ball.is_none_or(|(c, r)| q.dist(c) <= r + tol);
        if !feasible_ball {
            return;
        }
        if working.iter().any(|&i| cons.halfspaces[i].slack(&q) < -tol) {
            return;
        }
        let dist = q.dist(x);
        if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
            best = Some((dist, q));
        }
    };

    let mut subset: Vec<usize> = Vec::with_capacity(max_k);
    for k in 0..=max_k {
        for_each_combination(working.len(), k, &mut subset, &mut |idx| {
            let hs: Vec<&Halfspace> = idx.iter().map(|&i| &cons.halfspaces[working[i]]).collect();
            let Some(q) = affine_projection(&hs, x) else {
                return;
            };
            match cons.ball {
                None => consider(q),
                Some((c, r)) => {
                    let Some(c_proj) = affine_projection(&hs, c) else {
                        return;
                    };
                    let rho2 = r * r - c.dist(&c_proj).powi(2);
                    if rho2 < -tol * (1.0 + r) {
                        return;
                    }
                    let rho = rho2.max(0.0).sqrt();
                    let off = q.sub(&c_proj);
                    let n = off.norm();
                    if n <= rho {
                        consider(q);
                    } else {
                        consider(c_proj.axpy(rho / n, &off));
                    }
                }
            }
        });
    }
    best.map(|(_, p)| p)
}

fn for_each_combination<F: FnMut(&[usize])>(n: usize, k: usize, buf: &mut Vec<usize>, f: &mut F) {
    fn rec<F: FnMut(&[usize])>(start: usize, n: usize, k: usize, buf: &mut Vec<usize>, f: &mut F) {
        if buf.len() == k {
            f(buf);
            return;
        }
        for i in start..n {
            if n - i < k - buf.len() {
                break;
            }
            buf.push(i);
            rec(i + 1, n, k, buf, f);
            buf.pop();
        }
    }
    buf.clear();
    rec(0, n, k, buf, f);
}

/// Projection of `x` onto `{y : a_i·y = b_i}`; `None` if the normals are dependent.
fn affine_projection(hs: &[&Halfspace], x: &Point) -> Option<Point> {
    let k = hs.len();
    if k == 0 {
        return Some(x.clone());
    }
    let mut gram = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = hs[i].normal().dot(hs[j].normal());
        }
        rhs[i] = hs[i].offset() - hs[i].normal().dot(x);
    }
    let lambda = solve_small(&mut gram, &mut rhs, k)?;
    let mut y = x.clone();
    for (h, l) in hs.iter().zip(&lambda) {
        y = y.axpy(*l, h.normal());
    }
    Some(y)
}

/// Gaussian elimination with partial pivoting on a k x k row-major system.
pub(crate) fn solve_small(a: &mut [f64], b: &mut [f64], k: usize) -> Option<Vec<f64>> {
    const PIVOT_EPS: f64 = 1e-12;
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i * k + col].abs().total_cmp(&a[j * k + col].abs()))?;
        if a[piv * k + col].abs() < PIVOT_EPS {
            return None;
        }
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
            }
            b.swap(piv, col);
        }
        for row in col + 1..k {
            let m = a[row * k + col] / a[col * k + col];
            for j in col..k {
                a[row * k + j] -= m * a[col * k + j];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|j| a[row * k + j] * x[j]).sum();
        x[row] = (b[row] - s) / a[row * k + row];
    }
    Some(x)
}

/// Dykstra's alternating projections over the base and every cut.
pub fn dykstra(set: &ConvexSet, x: &Point, tol: f64) -> Result<Point> {
    let base = set.base();
    let cuts = set.cuts();
    let stop = proj_tol(x);
    let mut cur = x.clone();
    let mut incr: Vec<Point> = vec![Point::zeros(x.dim()); cuts.len() + 1];
    for _ in 0..DYKSTRA_MAX_SWEEPS {
        let start = cur.clone();
        for (i, inc) in incr.iter_mut().enumerate() {
            let z = cur.add(inc);
            let next = if i == 0 {
                project(base, &z)?
            } else {
                let h = &cuts[i - 1];
                let s = h.slack(&z);
                if s >= 0.0 {
                    z.clone()
                } else {
                    z.axpy(-s, h.normal())
                }
            };
            *inc = z.sub(&next);
            cur = next;
        }
        if cur.dist(&start) < stop {
            return if set.violation_unchecked(&cur) <= tol {
                Ok(cur)
            } else {
                Err(ConesError::EmptySet)
            };
        }
    }
    if set.violation_unchecked(&cur) > 1e3 * tol.max(stop) {
        // a persistent residual after the full budget means the pieces do not meet
        return Err(ConesError::EmptySet);
    }
    Err(ConesError::IterationLimit {
        what: "Dykstra projection",
        iterations: DYKSTRA_MAX_SWEEPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Point, b: &Point, tol: f64) -> bool {
        a.dist(b) <= tol
    }

    #[test]
    fn closed_forms() {
        let sq = ConvexSet::boxed(Point::from([0.0, 0.0]), Point::from([1.0, 1.0])).unwrap();
        assert_eq!(project(&sq, &Point::from([2.0, 0.5])).unwrap(), Point::from([1.0, 0.5]));
        let ball = ConvexSet::ball(Point::from([0.0, 0.0]), 1.0).unwrap();
        let p = project(&ball, &Point::from([3.0, 4.0])).unwrap();
        assert!(close(&p, &Point::from([0.6, 0.8]), 1e-15));
    }

    #[test]
    fn diagonal_cut_adds_half_to_each_coordinate() {
        let big = ConvexSet::boxed(Point::from([0.0, 0.0]), Point::from([10.0, 10.0])).unwrap();
        let cut = big
            .intersect_halfspace(Halfspace::new(Point::from([1.0, 1.0]), 3.0).unwrap())
            .unwrap();
        let p = project(&cut, &Point::from([1.0, 1.0])).unwrap();
        assert!(close(&p, &Point::from([1.5, 1.5]), 1e-12), "{p}");
    }

    #[test]
    fn vertex_projection() {
        // corner formed by a cut and a box face
        let sq = ConvexSet::boxed(Point::from([0.0, 0.0]), Point::from([1.0, 1.0])).unwrap();
        let cut = sq
            .intersect_halfspace(Halfspace::new(Point::from([1.0, 1.0]), 1.5).unwrap())
            .unwrap();
        let p = project(&cut, &Point::from([2.0, -1.0])).unwrap();
        assert!(close(&p, &Point::from([1.0, 0.5]), 1e-12), "{p}");
    }

    #[test]
    fn ball_based_cut() {
        let ball = ConvexSet::ball(Point::from([0.0, 0.0]), 1.0).unwrap();
        let cut = ball
            .intersect_halfspace(Halfspace::new(Point::from([0.0, 1.0]), 0.5).unwrap())
            .unwrap();
        // far above: lands on the ball arc
        let p = project(&cut, &Point::from([0.0, 3.0])).unwrap();
        assert!(close(&p, &Point::from([0.0, 1.0]), 1e-12), "{p}");
        // far to the side below the chord: lands on the chord endpoint
        let p = project(&cut, &Point::from([5.0, 0.0])).unwrap();
        let end = Point::from([(0.75f64).sqrt(), 0.5]);
        assert!(close(&p, &end, 1e-12), "{p}");
    }

    #[test]
    fn high_dimension_uses_dykstra() {
        let d = 5;
        let cube = ConvexSet::boxed(Point::new(vec![0.0; d]).unwrap(), Point::new(vec![1.0; d]).unwrap()).unwrap();
        let cut = cube
            .intersect_halfspace(Halfspace::new(Point::new(vec![1.0; d]).unwrap(), 4.0).unwrap())
            .unwrap();
        let p = project(&cut, &Point::new(vec![0.5; d]).unwrap()).unwrap();
        // closed form: shift along the all-ones direction to sum = 4
        for c in p.coords() {
            assert!((c - 0.8).abs() < 1e-6, "{p}");
        }
        let empty = cube
            .with_cuts_unchecked([Halfspace::new(Point::new(vec![1.0; d]).unwrap(), 6.0).unwrap()])
            .unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn small_solver() {
        let mut a = vec![2.0, 1.0, 1.0, 3.0];
        let mut b = vec![3.0, 5.0];
        let x = solve_small(&mut a, &mut b, 2).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
        let mut a = vec![1.0, 1.0, 1.0, 1.0];
        let mut b = vec![1.0, 2.0];
        assert!(solve_small(&mut a, &mut b, 2).is_none());
    }
}
