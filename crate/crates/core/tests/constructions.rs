use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use approx::assert_relative_eq;
use cones::algorithms::{Greedy, Lsp};
use cones::geometry::{project, Point};
use cones::harness::{run, sweep_t, PolicySpec};
use cones::instances::{
    adversary_sc, gen_convex_lower_bound, gen_directional, gen_frozen, gen_random_1d, sc_lb_k, Feed, Random1dKind,
};
use cones::oracle::{brute_force_min_grid, offline_lin_dp_1d, static_opt};
use cones::rng::{sample_in_set, seeded};
use cones::solvers::minimize_over;

#[test]
fn sc_lb_spacing_matches_closed_form() {
    let by_hand = (4.0 / SQRT_2 / 4.5f64).sqrt();
    assert_relative_eq!(sc_lb_k(7, 1.0, 4.0), by_hand, max_relative = 1e-15);
    assert!((by_hand - 0.7928047).abs() < 5e-8);
}

#[test]
fn directional_projection_chain() {
    let d = 10.0;
    let inst = gen_directional(d, 8).unwrap();
    let f = inst.objective_at(1);
    let eps = inst.meta["eps"];
    assert_relative_eq!(eps, 0.0625);
    let seq = inst.sequence().unwrap();
    for s in 1..=4usize {
        let mut y = Point::from([0.0, s as f64]);
        for tau in s + 1..=8 {
            y = project(seq.get(tau).unwrap(), &y).unwrap();
            let half = (tau - s) as f64 / 2.0;
            assert!(y.dist(&Point::from([half, s as f64 + half])) < 1e-9);
            let fy = f.eval(&y).unwrap();
            assert_relative_eq!(fy, tau as f64 + eps * ((tau - s) as f64).powi(2) / 4.0, max_relative = 1e-12);
            for t in tau + 1..=8 {
                assert!(fy <= t as f64 + 1e-9);
            }
        }
    }
}

#[test]
fn directional_static_optimum() {
    let inst = gen_directional(10.0, 5).unwrap();
    let r = static_opt(inst.objective_at(5), inst.sequence().unwrap().last(), 5, &inst.x0).unwrap();
    assert!(r.path[0].dist(&Point::from([0.0, 5.0])) < 1e-9);
    assert_relative_eq!(r.value, 25.0, max_relative = 1e-12);
}

#[test]
fn frozen_static_optimum_is_last_construction_minimizer() {
    let inst = gen_frozen(7, 200, 1.0, 4.0).unwrap();
    let seq = inst.sequence().unwrap();
    let r = static_opt(inst.objective_at(1), seq.last(), 200, &inst.x0).unwrap();
    assert!(r.path[0].dist(&inst.minimizers[7]) < 1e-9);
    let v7 = minimize_over(inst.objective_at(1), seq.get(7).unwrap()).unwrap().value;
    for t in 8..=200 {
        let v = minimize_over(inst.objective_at(1), seq.get(t).unwrap()).unwrap().value;
        assert_eq!(v, v7);
    }
}

#[test]
fn convex_lb_first_set_minimizer_on_top_edge() {
    let d = 4.0;
    let a = d / (2.0 * SQRT_2);
    let inst = gen_convex_lower_bound(6, d, a, d / (4.0 * SQRT_2)).unwrap();
    let s1 = inst.sequence().unwrap().get(1).unwrap();
    let g = brute_force_min_grid(inst.objective_at(1), s1, 401).unwrap();
    let m = minimize_over(inst.objective_at(1), s1).unwrap();
    let cell = d / SQRT_2 / 400.0;
    assert!((g.value - m.value).abs() <= 2.0 * cell);
    assert!(m.argmin[1] <= -a + 1e-9);
    assert!((g.path[0][1] - m.argmin[1]).abs() <= 2.0 * cell);
}

#[test]
fn convex_lb_greedy_moves_across_each_step() {
    let d = 4.0;
    let inst = gen_convex_lower_bound(10, d, d / (2.0 * SQRT_2), d / (4.0 * SQRT_2)).unwrap();
    let trace = run(&mut Greedy::new(), &inst).unwrap();
    // the nearest point of the argmin surrogate may stop just short of the corner
    for r in &trace.records[1..] {
        assert!(r.move_inc >= d / SQRT_2 * (1.0 - 1e-4), "t = {}: {}", r.t, r.move_inc);
    }
}

#[test]
fn sc_adversary_gap_outside_the_ball() {
    let (eps, horizon) = (0.23, 512);
    let inst = adversary_sc(0.75, 1.5, 1.0, eps, 1.0, 0.5, horizon).unwrap();
    let eta = inst.meta["eta"];
    let Feed::Adaptive(mut adv) = inst.feed.clone() else { panic!() };
    let f = inst.objective_at(1);
    let mut rng = seeded(11);
    for k in 2..=adv.params.periods {
        let s = adv.reveal(k);
        let star = adv.period_minimizer(k).clone();
        let v = f.eval(&star).unwrap();
        let g = brute_force_min_grid(f, &s, 301).unwrap();
        let (lo, hi) = s.bounding_box();
        assert!(g.path[0].dist(&star) <= 2.0 * lo.dist(&hi) / 300.0);
        for _ in 0..400 {
            let x = sample_in_set(&mut rng, &s).unwrap();
            if x.dist(&star) > eps {
                assert!(f.eval(&x).unwrap() - v >= eta);
            }
        }
        adv.observe(k, &star).unwrap();
    }
}

#[test]
fn lsp_regret_within_horizon_budget() {
    let horizons = [16, 32, 64, 128, 256];
    let table = sweep_t(PolicySpec::new("lsp"), "sc_lb", &horizons, &BTreeMap::new(), 0).unwrap();
    for r in &table.rows {
        assert!(r.regret_final <= (r.horizon as f64).sqrt() + 1.0, "T = {}", r.horizon);
    }
    let g = sweep_t(PolicySpec::new("greedy"), "sc_lb", &horizons, &BTreeMap::new(), 0).unwrap();
    assert!(g.rows.windows(2).all(|w| w[1].move_final > w[0].move_final));
}

#[test]
fn lsp_phases_start_at_one() {
    let inst = gen_frozen(7, 30, 1.0, 4.0).unwrap();
    let mut lsp = Lsp::new(0.1).unwrap();
    let trace = run(&mut lsp, &inst).unwrap();
    assert_eq!(trace.jump_times.first(), Some(&1));
    assert!(trace.jump_times.iter().all(|&t| (1..=30).contains(&t)));
}

#[test]
fn dp_refinement_is_stable_on_the_corpus() {
    for seed in 0..10 {
        let inst = gen_random_1d(Random1dKind::Lin, 50, seed).unwrap();
        let coarse = offline_lin_dp_1d(&inst, 1001).unwrap().value;
        let fine = offline_lin_dp_1d(&inst, 2001).unwrap().value;
        assert!((coarse - fine).abs() < 1e-3 * (1.0 + fine) || (coarse - fine).abs() / fine < 0.01, "seed {seed}");
        assert!(fine <= coarse + 1e-9);
    }
}
