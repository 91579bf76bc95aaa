use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Feed, Instance, Objectives};
use crate::error::{ConesError, Result};
use crate::geometry::{ConvexSet, Halfspace, NestedSequence, Point};
use crate::objectives::{Objective, ObjectiveKind};
use crate::rng::seeded;

/// Outer interval every random instance lives in.
pub const RANDOM_DOMAIN: (f64, f64) = (0.0, 10.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Random1dKind {
    /// Per-step `|x − m_t|`.
    Lin,
    /// Per-step `c_t |x − m_t|` with `c_t ∈ [1, 3]`.
    Sharp,
    /// One `c |x − m|` for the whole run.
    FixedObjective,
}

impl Random1dKind {
    fn tag(self) -> f64 {
        match self {
            Random1dKind::Lin => 0.0,
            Random1dKind::Sharp => 1.0,
            Random1dKind::FixedObjective => 2.0,
        }
    }
}

fn interval(lo: f64, hi: f64) -> Result<ConvexSet> {
    ConvexSet::interval(lo, hi)
}

fn lower_cut(lo: f64) -> Result<Halfspace> {
    Halfspace::new(Point::scalar(1.0), lo)
}

fn upper_cut(hi: f64) -> Result<Halfspace> {
    Halfspace::new(Point::scalar(-1.0), -hi)
}

fn shrinking_intervals<R: Rng>(rng: &mut R, horizon: usize) -> Result<Vec<ConvexSet>> {
    let (dlo, dhi) = RANDOM_DOMAIN;
    let mut lo = rng.random_range(dlo..dlo + 2.0);
    let mut hi = rng.random_range(dhi - 2.0..=dhi);
    let mut cur = interval(dlo, dhi)?.intersect_halfspaces([lower_cut(lo)?, upper_cut(hi)?])?;
    let mut out = Vec::with_capacity(horizon);
    for t in 0..horizon {
        if t > 0 && rng.random_bool(0.4) {
            let cut = rng.random_range(0.0..0.15) * (hi - lo);
            let h = if rng.random_bool(0.5) {
                lo += cut;
                lower_cut(lo)?
            } else {
                hi -= cut;
                upper_cut(hi)?
            };
            cur = cur.intersect_halfspace(h)?;
        }
        out.push(cur.clone());
    }
    Ok(out)
}

fn random_center<R: Rng>(rng: &mut R, prev: Option<f64>) -> f64 {
    match prev {
        Some(m) if rng.random_bool(0.6) => m,
        _ => rng.random_range(RANDOM_DOMAIN.0..=RANDOM_DOMAIN.1),
    }
}

fn scaled(c: f64, m: f64, domain: &ConvexSet) -> Result<Objective> {
    Objective::on_domain(
        ObjectiveKind::ScaledNorm {
            c,
            center: Point::scalar(m),
        },
        domain,
    )
}

/// Seeded nested intervals in `[0, 10]` with nonnegative objectives.
pub fn gen_random_1d(kind: Random1dKind, horizon: usize, seed: u64) -> Result<Instance> {
    if horizon == 0 {
        return Err(ConesError::ParameterError("T must be at least 1".into()));
    }
    let mut rng = seeded(seed);
    let sets = shrinking_intervals(&mut rng, horizon)?;
    let domain = interval(RANDOM_DOMAIN.0, RANDOM_DOMAIN.1)?;
    let objectives = match kind {
        Random1dKind::Lin => {
            let mut m = None;
            let fs = (0..horizon)
                .map(|_| {
                    let c = random_center(&mut rng, m);
                    m = Some(c);
                    Objective::on_domain(ObjectiveKind::AbsShift { m: c }, &domain)
                })
                .collect::<Result<Vec<_>>>()?;
            Objectives::PerStep(fs)
        }
        Random1dKind::Sharp => {
            let mut m = None;
            let fs = (0..horizon)
                .map(|_| {
                    let center = random_center(&mut rng, m);
                    m = Some(center);
                    scaled(rng.random_range(1.0..=3.0), center, &domain)
                })
                .collect::<Result<Vec<_>>>()?;
            Objectives::PerStep(fs)
        }
        Random1dKind::FixedObjective => {
            let center = random_center(&mut rng, None);
            Objectives::Fixed(scaled(rng.random_range(1.0..=3.0), center, &domain)?)
        }
    };
    let (lo, hi) = sets[0].bounding_box();
    let x0 = Point::scalar(rng.random_range(lo[0]..=hi[0]));
    Ok(Instance {
        family: "random_1d".into(),
        horizon,
        x0,
        objectives,
        feed: Feed::Oblivious(NestedSequence::new(sets)?),
        domain,
        minimizers: Vec::new(),
        seed: Some(seed),
        meta: [("seed", seed as f64), ("kind", kind.tag())]
            .into_iter()
            .map(|(n, v)| (n.to_string(), v))
            .collect(),
    })
}

/// Per-step `|x − m_t|` objectives.
pub fn gen_random_1d_lin(horizon: usize, seed: u64) -> Result<Instance> {
    gen_random_1d(Random1dKind::Lin, horizon, seed)
}
