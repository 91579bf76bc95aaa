use serde::{Deserialize, Serialize};

use super::point::Point;
use super::project::project;
use crate::error::{ConesError, Result};

/// Closed halfspace `{x : a·x >= b}` with `a` stored at unit length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHalfspace")]
pub struct Halfspace {
    a: Point,
    b: f64,
}

#[derive(Deserialize)]
struct RawHalfspace {
    a: Point,
    b: f64,
}

impl TryFrom<RawHalfspace> for Halfspace {
    type Error = ConesError;

    fn try_from(raw: RawHalfspace) -> Result<Self> {
        Halfspace::new(raw.a, raw.b)
    }
}

impl Halfspace {
    /// Normalizes `normal` to unit length and rescales `offset` with it.
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(ConesError::InvalidSet("halfspace normal must be nonzero".into()));
        }
        if !offset.is_finite() {
            return Err(ConesError::InvalidSet("halfspace offset must be finite".into()));
        }
        Ok(Self {
            a: normal.scale(1.0 / n),
            b: offset / n,
        })
    }

    /// Halfspace bounded by the line through `p` and `q` (d = 2) that excludes `away_from`.
    pub fn through_points_excluding(p: &Point, q: &Point, away_from: &Point) -> Result<Self> {
        p.check_dim(2)?;
        q.check_dim(2)?;
        let dir = q.sub(p);
        let normal = Point::from([-dir[1], dir[0]]);
        let h = Halfspace::new(normal, 0.0)?;
        let offset = h.a.dot(p);
        let h = Halfspace { a: h.a, b: offset };
        if h.slack(away_from) > 0.0 {
            Ok(Halfspace {
                a: h.a.scale(-1.0),
                b: -h.b,
            })
        } else {
            Ok(h)
        }
    }

    pub fn normal(&self) -> &Point {
        &self.a
    }

    pub fn offset(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `a·x − b`; nonnegative inside.
    pub fn slack(&self, x: &Point) -> f64 {
        self.a.dot(x) - self.b
    }

    pub(crate) fn scaled_axes(&self, scales: &[f64]) -> Result<Self> {
        // {a·y >= b} with y_i = z_i / s_i becomes {(a_i / s_i)·z >= b}.
        let a: Vec<f64> = self
            .a
            .coords()
            .iter()
            .zip(scales)
            .map(|(ai, si)| ai / si)
            .collect();
        Halfspace::new(Point::new(a)?, self.b)
    }
}

/// Feasible set representation: box, ball, or a base with an ordered list of cuts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexSet {
    Box {
        lo: Point,
        hi: Point,
    },
    Ball {
        center: Point,
        #[serde(rename = "r")]
        radius: f64,
    },
    Cut {
        base: std::boxed::Box<ConvexSet>,
        #[serde(rename = "halfspaces")]
        cuts: Vec<Halfspace>,
    },
}

impl ConvexSet {
    pub fn boxed(lo: Point, hi: Point) -> Result<Self> {
        lo.check_dim(hi.dim())?;
        if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
            return Err(ConesError::InvalidSet(format!("box lo {lo} exceeds hi {hi}")));
        }
        Ok(ConvexSet::Box { lo, hi })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(ConesError::InvalidSet(format!("ball radius {radius} must be finite and >= 0")));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    /// Interval `[lo, hi]` as a one-dimensional box.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(Point::new(vec![lo])?, Point::new(vec![hi])?)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box { lo, .. } => lo.dim(),
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Cut { base, .. } => base.dim(),
        }
    }

    /// The uncut Box or Ball underneath.
    pub fn base(&self) -> &ConvexSet {
        match self {
            ConvexSet::Cut { base, .. } => base.base(),
            other => other,
        }
    }

    pub fn cuts(&self) -> &[Halfspace] {
        match self {
            ConvexSet::Cut { cuts, .. } => cuts,
            _ => &[],
        }
    }

    /// Re-validates a deserialized set and flattens cut-of-cut nesting.
    pub fn validated(self) -> Result<Self> {
        match self {
            ConvexSet::Box { lo, hi } => ConvexSet::boxed(lo, hi),
            ConvexSet::Ball { center, radius } => ConvexSet::ball(center, radius),
            ConvexSet::Cut { base, cuts } => {
                let base = base.validated()?;
                let mut all: Vec<Halfspace> = base.cuts().to_vec();
                all.extend(cuts);
                let d = base.dim();
                if let Some(h) = all.iter().find(|h| h.dim() != d) {
                    return Err(ConesError::DimensionMismatch {
                        expected: d,
                        found: h.dim(),
                    });
                }
                let set = ConvexSet::Cut {
                    base: std::boxed::Box::new(base.base().clone()),
                    cuts: all,
                };
                if set.is_empty() {
                    return Err(ConesError::EmptySet);
                }
                Ok(set)
            }
        }
    }

    /// Largest violation of any defining constraint at `x` (0 when inside).
    pub fn violation(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim())?;
        Ok(self.violation_unchecked(x))
    }

    pub(crate) fn violation_unchecked(&self, x: &Point) -> f64 {
        match self {
            ConvexSet::Box { lo, hi } => x
                .coords()
                .iter()
                .zip(lo.coords().iter().zip(hi.coords()))
                .map(|(v, (l, h))| (l - v).max(v - h))
                .fold(0.0, f64::max),
            ConvexSet::Ball { center, radius } => (x.dist(center) - radius).max(0.0),
            ConvexSet::Cut { base, cuts } => cuts
                .iter()
                .map(|h| -h.slack(x))
                .fold(base.violation_unchecked(x), f64::max),
        }
    }

    /// True iff every defining constraint holds within additive slack `tol`.
    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        Ok(self.violation(x)? <= tol)
    }

    /// Upper bound on the Euclidean diameter; exact for Box and Ball.
    pub fn diameter_bound(&self) -> f64 {
        match self {
            ConvexSet::Box { lo, hi } => hi.dist(lo),
            ConvexSet::Ball { radius, .. } => 2.0 * radius,
            ConvexSet::Cut { base, .. } => base.diameter_bound(),
        }
    }

    /// Scale-relative feasibility slack `1e-9 * (1 + diameter)`.
    pub fn feas_tol(&self) -> f64 {
        1e-9 * (1.0 + self.diameter_bound())
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            ConvexSet::Box { lo, hi } => (lo.clone(), hi.clone()),
            ConvexSet::Ball { center, radius } => (
                Point::from_vec_unchecked(center.coords().iter().map(|c| c - radius).collect()),
                Point::from_vec_unchecked(center.coords().iter().map(|c| c + radius).collect()),
            ),
            ConvexSet::Cut { base, .. } => base.bounding_box(),
        }
    }

    /// Center of the base Box or Ball.
    pub fn base_center(&self) -> Point {
        let (lo, hi) = self.bounding_box();
        lo.add(&hi).scale(0.5)
    }

    /// Appends one cut; fails with `EmptyIntersection` if the result is empty.
    pub fn intersect_halfspace(&self, h: Halfspace) -> Result<ConvexSet> {
        self.intersect_halfspaces(std::iter::once(h))
    }

    pub fn intersect_halfspaces<I>(&self, hs: I) -> Result<ConvexSet>
    where
        I: IntoIterator<Item = Halfspace>,
    {
        let out = self.with_cuts_unchecked(hs)?;
        if out.is_empty() {
            return Err(ConesError::EmptyIntersection);
        }
        Ok(out)
    }

    pub(crate) fn with_cuts_unchecked<I>(&self, hs: I) -> Result<ConvexSet>
    where
        I: IntoIterator<Item = Halfspace>,
    {
        let d = self.dim();
        let mut cuts = self.cuts().to_vec();
        for h in hs {
            if h.dim() != d {
                return Err(ConesError::DimensionMismatch {
                    expected: d,
                    found: h.dim(),
                });
            }
            cuts.push(h);
        }
        Ok(ConvexSet::Cut {
            base: std::boxed::Box::new(self.base().clone()),
            cuts,
        })
    }

    /// Box faces as halfspaces (empty for a Ball base).
    pub(crate) fn base_faces(&self) -> Vec<Halfspace> {
        match self.base() {
            ConvexSet::Box { lo, hi } => {
                let d = lo.dim();
                let mut out = Vec::with_capacity(2 * d);
                for i in 0..d {
                    let mut e = vec![0.0; d];
                    e[i] = 1.0;
                    out.push(Halfspace {
                        a: Point::from_vec_unchecked(e.clone()),
                        b: lo[i],
                    });
                    e[i] = -1.0;
                    out.push(Halfspace {
                        a: Point::from_vec_unchecked(e),
                        b: -hi[i],
                    });
                }
                out
            }
            _ => Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ConvexSet::Box { .. } | ConvexSet::Ball { .. } => false,
            ConvexSet::Cut { .. } => {
                matches!(project(self, &self.base_center()), Err(ConesError::EmptySet))
            }
        }
    }

    /// Axis-scaled image `{(s_i y_i) : y ∈ self}` for a Box-based set.
    pub(crate) fn scaled_axes(&self, scales: &[f64]) -> Result<ConvexSet> {
        let base = match self.base() {
            ConvexSet::Box { lo, hi } => ConvexSet::Box {
                lo: Point::new(lo.coords().iter().zip(scales).map(|(l, s)| l * s).collect())?,
                hi: Point::new(hi.coords().iter().zip(scales).map(|(h, s)| h * s).collect())?,
            },
            _ => {
                return Err(ConesError::InvalidSet(
                    "axis scaling is only defined for box-based sets".into(),
                ))
            }
        };
        let cuts = self
            .cuts()
            .iter()
            .map(|h| h.scaled_axes(scales))
            .collect::<Result<Vec<_>>>()?;
        if cuts.is_empty() {
            Ok(base)
        } else {
            Ok(ConvexSet::Cut {
                base: std::boxed::Box::new(base),
                cuts,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexSet {
        ConvexSet::boxed(Point::from([0.0, 0.0]), Point::from([1.0, 1.0])).unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(unit_square().contains(&Point::from([0.5, 0.5]), 0.0).unwrap());
        let ball = ConvexSet::ball(Point::from([0.0, 0.0]), 1.0).unwrap();
        assert!(ball.contains(&Point::from([1.0 + 1e-12, 0.0]), 1e-9).unwrap());
        let big = ConvexSet::boxed(Point::from([0.0, 0.0]), Point::from([10.0, 10.0])).unwrap();
        let s = 2f64.sqrt();
        let h = Halfspace::new(Point::from([1.0 / s, 1.0 / s]), 3.0 / s).unwrap();
        let cut = big.intersect_halfspace(h).unwrap();
        assert!(!cut.contains(&Point::from([1.0, 1.0]), 0.0).unwrap());
    }

    #[test]
    fn contains_rejects_wrong_dimension() {
        assert!(matches!(
            unit_square().contains(&Point::from([0.5]), 0.0),
            Err(ConesError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn halfspace_is_normalized() {
        let h = Halfspace::new(Point::from([3.0, 4.0]), 10.0).unwrap();
        assert!((h.normal().norm() - 1.0).abs() < 1e-15);
        assert!((h.offset() - 2.0).abs() < 1e-15);
        assert!(Halfspace::new(Point::from([0.0, 0.0]), 1.0).is_err());
    }

    #[test]
    fn intersect_examples() {
        let sq = unit_square();
        let redundant = sq
            .intersect_halfspace(Halfspace::new(Point::from([1.0, 0.0]), 0.0).unwrap())
            .unwrap();
        for p in [[0.0, 0.0], [0.5, 1.0], [1.0, 1.0], [1.2, 0.5], [-0.1, 0.5]] {
            let p = Point::from(p);
            assert_eq!(sq.contains(&p, 0.0).unwrap(), redundant.contains(&p, 0.0).unwrap());
        }
        let disjoint = sq.intersect_halfspace(Halfspace::new(Point::from([1.0, 0.0]), 2.0).unwrap());
        assert!(matches!(disjoint, Err(ConesError::EmptyIntersection)));

        let big = ConvexSet::boxed(Point::from([0.0, 0.0]), Point::from([10.0, 10.0])).unwrap();
        let cut = big
            .intersect_halfspace(Halfspace::new(Point::from([1.0, 1.0]), 3.0).unwrap())
            .unwrap();
        assert!(cut.contains(&Point::from([3.0, 0.0]), 0.0).unwrap());
        assert!(!cut.contains(&Point::from([1.0, 1.0]), 0.0).unwrap());
    }

    #[test]
    fn emptiness_examples() {
        assert!(!unit_square().is_empty());
        assert!(!ConvexSet::ball(Point::from([1.0, 2.0]), 0.0).unwrap().is_empty());
        let slab = unit_square()
            .with_cuts_unchecked([
                Halfspace::new(Point::from([1.0, 0.0]), 0.6).unwrap(),
                Halfspace::new(Point::from([-1.0, 0.0]), -0.4).unwrap(),
            ])
            .unwrap();
        assert!(slab.is_empty());
    }

    #[test]
    fn diameter_examples() {
        let b = ConvexSet::boxed(Point::from([0.0, 0.0]), Point::from([3.0, 4.0])).unwrap();
        assert_eq!(b.diameter_bound(), 5.0);
        assert_eq!(ConvexSet::ball(Point::from([0.0, 0.0]), 2.0).unwrap().diameter_bound(), 4.0);
        let c = b
            .intersect_halfspace(Halfspace::new(Point::from([1.0, 1.0]), 1.0).unwrap())
            .unwrap();
        assert_eq!(c.diameter_bound(), 5.0);
    }

    #[test]
    fn json_shapes() {
        let sq = unit_square();
        assert_eq!(
            serde_json::to_string(&sq).unwrap(),
            r#"{"box":{"lo":[0.0,0.0],"hi":[1.0,1.0]}}"#
        );
        let ball = ConvexSet::ball(Point::from([0.0]), 2.0).unwrap();
        assert_eq!(serde_json::to_string(&ball).unwrap(), r#"{"ball":{"center":[0.0],"r":2.0}}"#);
        let cut = sq
            .intersect_halfspace(Halfspace::new(Point::from([2.0, 0.0]), 1.0).unwrap())
            .unwrap();
        let json = serde_json::to_string(&cut).unwrap();
        assert!(json.starts_with(r#"{"cut":{"base":{"box""#));
        assert!(json.contains(r#""halfspaces":[{"a":[1.0,0.0],"b":0.5}]"#));
        let back: ConvexSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back.validated().unwrap(), cut);
        // unnormalized input is normalized on the way in
        let raw = r#"{"cut":{"base":{"box":{"lo":[0,0],"hi":[1,1]}},"halfspaces":[{"a":[2,0],"b":1}]}}"#;
        let parsed: ConvexSet = serde_json::from_str(raw).unwrap();
        assert_eq!(parsed, cut);
    }
}
