use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use qtransport::model::{
    boundary_states, trig_sum_endpoint, propagate_const, propagate_schedule, sample_trajectory,
    trochoid_radius_sq, Schedule, Sign, State,
};
use qtransport::synthesis::{build_schedule, build_schedule_signed, fit_switching_function, DEFAULT_EPS_BANG};
use qtransport::verification::{endpoint_residual, integrate_ode, IntegratorConfig};

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

/// Up to ten arcs, each in (0, 2π).
fn schedule() -> impl Strategy<Value = Schedule> {
    (sign(), prop::collection::vec(1e-3..TAU - 1e-3, 1..=10))
        .prop_map(|(s, d)| Schedule::new(s, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn trig_sums_match_rotations(s in schedule()) {
        let a = trig_sum_endpoint(&s);
        let b = propagate_schedule(&s);
        prop_assert!(a.max_abs_diff(&b) < 1e-10, "{a:?} vs {b:?}");
    }

    #[test]
    fn negated_schedule_mirrors_exactly(s in schedule()) {
        let a = propagate_schedule(&s);
        let b = propagate_schedule(&s.negated());
        prop_assert!(-a.x1 == b.x1 && -a.x2 == b.x2 && -a.x3 == b.x3);
    }

    #[test]
    fn x3_is_the_signed_sum(s in schedule()) {
        let x = propagate_schedule(&s);
        prop_assert!((x.x3 - s.signed_sum()).abs() < 1e-12);
    }

    #[test]
    fn radius_is_conserved_along_an_arc(
        x1 in -5.0..5.0f64, x2 in -5.0..5.0f64, x3 in -5.0..5.0f64,
        u in sign(), dt in 0.0..10.0f64,
    ) {
        let start = State::new(x1, x2, x3);
        let end = propagate_const(start, u, dt).unwrap();
        let (r0, r1) = (trochoid_radius_sq(&start, u), trochoid_radius_sq(&end, u));
        prop_assert!((r0 - r1).abs() < 1e-10 * r0.max(1.0));
    }

    #[test]
    fn propagation_composes(
        x1 in -5.0..5.0f64, x2 in -5.0..5.0f64, x3 in -5.0..5.0f64,
        u in sign(), a in 0.0..5.0f64, b in 0.0..5.0f64,
    ) {
        let start = State::new(x1, x2, x3);
        let once = propagate_const(start, u, a + b).unwrap();
        let twice = propagate_const(propagate_const(start, u, a).unwrap(), u, b).unwrap();
        prop_assert!(once.max_abs_diff(&twice) < 1e-12);
    }

    #[test]
    fn schedule_json_round_trips(s in schedule()) {
        let text = serde_json::to_string(&s).unwrap();
        let back: Schedule = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn sampled_trajectory_ends_on_the_endpoint(s in schedule(), dt in 0.01..1.0f64) {
        let samples = sample_trajectory(&s, dt).unwrap();
        let last = samples.last().unwrap();
        prop_assert_eq!(last.t, s.total_time());
        prop_assert_eq!(last.state, propagate_schedule(&s));
        prop_assert!(samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn synthesized_schedules_hit_the_target(gamma in 1e-3..12.0 * PI) {
        let r = build_schedule(gamma).unwrap();
        let end = propagate_schedule(&r.schedule);
        prop_assert!((end - State::target(gamma)).norm() < 1e-8);
        prop_assert_eq!(r.switch_count(), if r.is_bang() { 0 } else { 2 * r.rho as usize });
        prop_assert!((r.total_time - r.schedule.total_time()).abs() < 1e-9);
        let res = endpoint_residual(&r.schedule, gamma).unwrap();
        prop_assert!(res.max() < 1e-9);
    }

    #[test]
    fn minimum_time_is_monotone(g in 1e-3..10.0 * PI, dg in 1e-6..1.0f64) {
        let a = build_schedule(g).unwrap().total_time;
        let b = build_schedule(g + dg).unwrap().total_time;
        prop_assert!(b > a - 1e-12, "T({g}) = {a}, T({}) = {b}", g + dg);
    }

    #[test]
    fn mirrored_synthesis_starts_negative(gamma in 1e-3..10.0 * PI) {
        let r = build_schedule_signed(-gamma, DEFAULT_EPS_BANG).unwrap();
        prop_assert_eq!(r.schedule.initial_sign(), Sign::Minus);
        prop_assert_eq!(r.gamma, -gamma);
    }

    #[test]
    fn interior_boundaries_are_on_the_switching_curve(gamma in 1e-2..10.0 * PI) {
        let r = build_schedule(gamma).unwrap();
        if r.switch_count() >= 2 {
            let fit = fit_switching_function(&r.schedule).unwrap();
            for t in r.switch_times() {
                prop_assert!(fit.evaluate(t).abs() < 1e-8);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rk4_agrees_with_closed_form(s in schedule()) {
        let a = integrate_ode(&s, &IntegratorConfig::default());
        let b = propagate_schedule(&s);
        prop_assert!(a.max_abs_diff(&b) < 1e-6);
    }
}

#[test]
fn rk4_order_over_a_schedule_set() {
    let set = [
        vec![1.7, 0.9, 3.3, 0.4, 2.0],
        vec![2.5, 2.5],
        vec![0.3, 5.9, 0.3, 5.9, 0.3, 1.0],
        vec![6.0],
    ];
    for d in set {
        let s = Schedule::new(Sign::Plus, d).unwrap();
        let exact = propagate_schedule(&s);
        let e1 = integrate_ode(&s, &IntegratorConfig::new(0.04).unwrap()).max_abs_diff(&exact);
        let e2 = integrate_ode(&s, &IntegratorConfig::new(0.02).unwrap()).max_abs_diff(&exact);
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "{:?}: ratio {ratio}", s.durations());
    }
}

#[test]
fn boundary_states_chain_the_segments() {
    let s = Schedule::new(Sign::Minus, vec![0.5, 1.5, 2.5]).unwrap();
    let b = boundary_states(&s);
    assert_eq!(b.len(), 4);
    assert_eq!(b[0], State::ORIGIN);
    assert_eq!(b[3], propagate_schedule(&s));
}

#[test]
fn sweep_is_monotone() {
    let rows = qtransport::synthesis::sweep(0.1 * PI, 10.0 * PI, 500).unwrap();
    assert!(rows.windows(2).all(|w| w[1].total_time >= w[0].total_time));
}

#[test]
fn minimum_time_is_continuous_across_branches() {
    // Below a corner the gap closes linearly. Above it τ starts at a triple
    // zero of f_ρ, so the gap closes like δ^(1/3): shrinking δ by 1000 must
    // shrink the gap by about 10.
    for rho in 1..=4 {
        let corner = f64::from(rho) * TAU;
        let gap = |g: f64| (build_schedule(g).unwrap().total_time - corner).abs();
        assert!(gap(corner - 1e-7) < 1e-6, "ρ={rho} from below");
        let (a, b) = (gap(corner + 1e-5), gap(corner + 1e-8));
        let ratio = a / b;
        assert!((9.0..11.0).contains(&ratio), "ρ={rho}: {a} / {b} = {ratio}");
    }
}
