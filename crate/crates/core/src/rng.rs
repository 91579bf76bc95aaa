//! Seeded PRNG used by samplers and random instance generators.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoroshiro64StarStar;

use crate::error::Result;
use crate::geometry::{project, ConvexSet, Point};

pub type Prng = Xoroshiro64StarStar;

pub fn seeded(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

/// Uniform point in the axis-aligned box `[lo, hi]`.
pub fn uniform_in_box<R: Rng>(rng: &mut R, lo: &Point, hi: &Point) -> Point {
    let coords = lo
        .coords()
        .iter()
        .zip(hi.coords())
        .map(|(l, h)| if h > l { rng.random_range(*l..=*h) } else { *l })
        .collect();
    Point::from_vec_unchecked(coords)
}

/// A point of `set`: rejection sampling in the bounding box, falling back to
/// projecting the last draw when the set is thin.
pub fn sample_in_set<R: Rng>(rng: &mut R, set: &ConvexSet) -> Result<Point> {
    let (lo, hi) = set.bounding_box();
    let mut last = uniform_in_box(rng, &lo, &hi);
    for _ in 0..64 {
        if set.violation_unchecked(&last) == 0.0 {
            return Ok(last);
        }
        last = uniform_in_box(rng, &lo, &hi);
    }
    project(set, &last)
}
