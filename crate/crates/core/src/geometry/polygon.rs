//! Vertex representation of planar Box-based sets.

use super::point::Point;
use super::set::{ConvexSet, Halfspace};
use crate::error::{ConesError, Result};

/// Counter-clockwise vertex list of a 2-D set whose base is a Box.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn of(set: &ConvexSet) -> Result<Self> {
        if set.dim() != 2 {
            return Err(ConesError::DimensionMismatch {
                expected: 2,
                found: set.dim(),
            });
        }
        let ConvexSet::Box { lo, hi } = set.base() else {
            return Err(ConesError::InvalidSet("polygon needs a box base".into()));
        };
        let mut verts = vec![[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
        let tol = set.feas_tol();
        for h in set.cuts() {
            verts = clip(&verts, h, tol);
            if verts.is_empty() {
                return Err(ConesError::EmptySet);
            }
        }
        Ok(Self { vertices: verts })
    }

    /// Consecutive vertex pairs, closing the loop.
    pub fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        0.5 * self
            .edges()
            .map(|(p, q)| p[0] * q[1] - q[0] * p[1])
            .sum::<f64>()
    }

    pub fn points(&self) -> Vec<Point> {
        self.vertices.iter().map(|v| Point::from(*v)).collect()
    }
}

fn clip(poly: &[[f64; 2]], h: &Halfspace, tol: f64) -> Vec<[f64; 2]> {
    let slack = |v: &[f64; 2]| h.normal()[0] * v[0] + h.normal()[1] * v[1] - h.offset();
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let (sc, sn) = (slack(&cur), slack(&next));
        let cur_in = sc >= -tol;
        let next_in = sn >= -tol;
        if cur_in {
            out.push(cur);
        }
        if cur_in != next_in && (sc - sn).abs() > 0.0 {
            let s = sc / (sc - sn);
            out.push([cur[0] + s * (next[0] - cur[0]), cur[1] + s * (next[1] - cur[1])]);
        }
    }
    let same = |a: &[f64; 2], b: &[f64; 2]| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()) <= tol;
    out.dedup_by(|b, a| same(a, b));
    while out.len() > 1 && same(&out[0], out.last().unwrap()) {
        out.pop();
    }
    out
}
