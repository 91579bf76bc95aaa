use proptest::prelude::*;

use cones::algorithms::{Frugal, Greedy};
use cones::geometry::{proj_tol, project, ConvexSet, Halfspace, Point};
use cones::harness::run;
use cones::instances::{gen_random_1d, Random1dKind};
use cones::objectives::{Objective, ObjectiveKind, Regularity};
use cones::oracle::{enumerate_lin_1d, offline_lin_dp_1d};

fn coords(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, d)
}

/// A box `[-w, w]^d` cut by halfspaces that keep the origin-shifted anchor.
fn cut_box(d: usize) -> impl Strategy<Value = ConvexSet> {
    (
        prop::collection::vec(0.5..3.0f64, d),
        coords(d),
        prop::collection::vec((coords(d), 0.0..1.0f64), 0..4),
    )
        .prop_map(move |(w, anchor, cuts)| {
            let lo = Point::new(w.iter().map(|v| -v).collect()).unwrap();
            let hi = Point::new(w.clone()).unwrap();
            let a = Point::new(anchor.iter().zip(&w).map(|(c, w)| c.clamp(-w, *w) * 0.5).collect()).unwrap();
            let mut s = ConvexSet::boxed(lo, hi).unwrap();
            for (n, back) in cuts {
                let n = Point::new(n).unwrap();
                if n.norm() > 1e-2 {
                    let off = n.dot(&a) - back;
                    s = s.intersect_halfspace(Halfspace::new(n, off).unwrap()).unwrap();
                }
            }
            s
        })
}

fn dim_and_set() -> impl Strategy<Value = (ConvexSet, Vec<f64>, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|d| (cut_box(d), coords(d), coords(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn projection_lands_inside((s, x, _) in dim_and_set()) {
        let p = project(&s, &Point::new(x).unwrap()).unwrap();
        prop_assert!(s.violation(&p).unwrap() <= s.feas_tol());
    }

    #[test]
    fn projection_is_idempotent((s, x, _) in dim_and_set()) {
        let p = project(&s, &Point::new(x).unwrap()).unwrap();
        let q = project(&s, &p).unwrap();
        prop_assert!(p.dist(&q) <= proj_tol(&p));
    }

    #[test]
    fn projection_is_nonexpansive((s, x, y) in dim_and_set()) {
        let (x, y) = (Point::new(x).unwrap(), Point::new(y).unwrap());
        let (px, py) = (project(&s, &x).unwrap(), project(&s, &y).unwrap());
        prop_assert!(px.dist(&py) <= x.dist(&y) + proj_tol(&x) + proj_tol(&y));
    }

    #[test]
    fn projection_residual_is_a_normal((s, x, y) in dim_and_set()) {
        let x = Point::new(x).unwrap();
        let px = project(&s, &x).unwrap();
        let z = project(&s, &Point::new(y).unwrap()).unwrap();
        let ip = x.sub(&px).dot(&z.sub(&px));
        prop_assert!(ip <= 1e-7 * (1.0 + x.sub(&px).norm() * z.sub(&px).norm()), "{ip}");
    }

    #[test]
    fn subgradients_support_the_graph(
        kind in 0usize..6,
        c in 0.5..3.0f64,
        eps in 0.0..1.0f64,
        center in coords(2),
        x in coords(2),
        y in coords(2),
    ) {
        let center = Point::new(center).unwrap();
        let (mut x, mut y) = (Point::new(x).unwrap(), Point::new(y).unwrap());
        let k = match kind {
            0 => ObjectiveKind::Quadratic { center },
            1 => ObjectiveKind::SquaredNorm,
            2 => ObjectiveKind::ScaledNorm { c, center },
            3 => ObjectiveKind::MaxAbs,
            4 => ObjectiveKind::LinearPlusQuad { eps },
            _ => {
                x = Point::scalar(x[0]);
                y = Point::scalar(y[0]);
                ObjectiveKind::AbsShift { m: center[0] }
            }
        };
        let f = Objective::new(k, Regularity::default()).unwrap();
        let g = f.subgradient(&x).unwrap();
        let lin = f.eval(&x).unwrap() + g.dot(&y.sub(&x));
        let fy = f.eval(&y).unwrap();
        prop_assert!(fy >= lin - 1e-9 * (1.0 + fy.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dp_equals_enumeration(seed in any::<u64>(), horizon in 1usize..=4, n in 3usize..=11) {
        let inst = gen_random_1d(Random1dKind::Lin, horizon, seed).unwrap();
        match (offline_lin_dp_1d(&inst, n), enumerate_lin_1d(&inst, n)) {
            (Ok(a), Ok(b)) => prop_assert!((a.value - b.value).abs() <= 1e-9 * (1.0 + b.value)),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "dp {a:?} vs enumeration {b:?}"),
        }
    }

    #[test]
    fn dp_refinement_never_hurts(seed in any::<u64>()) {
        let inst = gen_random_1d(Random1dKind::Sharp, 20, seed).unwrap();
        let coarse = offline_lin_dp_1d(&inst, 101).unwrap().value;
        let fine = offline_lin_dp_1d(&inst, 201).unwrap().value;
        prop_assert!(fine <= coarse + 1e-6);
    }

    #[test]
    fn random_sequences_are_nested(seed in any::<u64>()) {
        let inst = gen_random_1d(Random1dKind::Lin, 30, seed).unwrap();
        prop_assert!(inst.sequence().unwrap().assert_nested(8, seed).is_ok());
    }

    #[test]
    fn frugal_and_greedy_never_regret(seed in any::<u64>()) {
        let inst = gen_random_1d(Random1dKind::FixedObjective, 60, seed).unwrap();
        for trace in [run(&mut Frugal::new(), &inst).unwrap(), run(&mut Greedy::new(), &inst).unwrap()] {
            prop_assert!(trace.max_regret() <= 1e-6);
        }
    }

    #[test]
    fn movement_accounting(seed in any::<u64>()) {
        let inst = gen_random_1d(Random1dKind::FixedObjective, 40, seed).unwrap();
        let trace = run(&mut Frugal::new(), &inst).unwrap();
        let mut sum = 0.0;
        for r in &trace.records {
            sum += r.move_inc;
            prop_assert!(r.move_inc >= 0.0);
            prop_assert!((r.move_cum - sum).abs() <= 1e-9 * (1.0 + sum));
        }
        let last = trace.records.last().unwrap();
        prop_assert!(last.move_cum >= last.x.dist(&inst.x0) - 1e-8);
    }
}
