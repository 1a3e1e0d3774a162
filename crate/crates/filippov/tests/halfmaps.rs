use filippov::canonical::CanonicalParams;
use filippov::flow::first_return;
use filippov::halfmaps::HalfMapContext;
use filippov::system::Side;
use proptest::prelude::*;
use std::f64::consts::PI;

fn context() -> impl Strategy<Value = HalfMapContext> {
    (0.05..1.5f64, 0.1..3.0f64, 0.1..3.0f64, 0.05..1.0f64, -3.0..-0.2f64, 0.1..3.0f64).prop_map(
        |(alpha, beta, eta, g, gamma2, r)| {
            let p = CanonicalParams::new(alpha, beta, 1, eta, g * eta - r, g, gamma2, g);
            HalfMapContext::new(&p).expect("condition holds by construction")
        },
    )
}

fn richardson1<F: Fn(f64) -> f64>(f: F, y: f64, h: f64) -> f64 {
    let d = |h: f64| (f(y + h) - f(y - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parametric_maps_match_exact_flow(ctx in context(), u in 0.0..1.0f64) {
        let p = ctx.params;
        let y = ctx.y_star + 0.01 + 40.0 * u * u;
        let hit = first_return(&p.right_field(), [0.0, y], Side::Right).unwrap();
        let pr = ctx.P_R(y).unwrap();
        prop_assert!((hit.z[1] - pr).abs() < 1e-8 * (1.0 + pr.abs()), "{} vs {}", hit.z[1], pr);
        let pl = ctx.P_L_inv(y).unwrap();
        let back = first_return(&p.left_field(), [0.0, pl], Side::Left).unwrap();
        prop_assert!((back.z[1] - y).abs() < 1e-8 * (1.0 + y), "{} vs {}", back.z[1], y);
    }

    #[test]
    fn closed_form_derivatives_match_differences(ctx in context(), u in 0.0..1.0f64) {
        let y = ctx.y_star + 0.5 + 30.0 * u;
        let d = ctx.derivatives(y).unwrap();
        let h = (1e-3 * (1.0 + y.abs())).min(0.02 * (y - ctx.y_star));
        let pr = |v: f64| ctx.P_R(v).unwrap();
        let pl = |v: f64| ctx.P_L_inv(v).unwrap();
        prop_assert!(rel(d.d_pr, richardson1(pr, y, h)) < 1e-6);
        prop_assert!(rel(d.d_plinv, richardson1(pl, y, h)) < 1e-6, "{} {} {}", y, d.d_plinv, richardson1(pl, y, h));
        // Second derivatives are differenced from the (already checked) first derivatives.
        // Where the first derivative changes by less than 1e-5 across the step the curvature
        // is below double-precision resolution and the comparison says nothing.
        let dpr = |v: f64| ctx.derivatives(v).unwrap().d_pr;
        let dpl = |v: f64| ctx.derivatives(v).unwrap().d_plinv;
        let h2 = 0.02 * (y - ctx.y_star);
        if d.d2_pr.abs() * h2 > 1e-5 * d.d_pr.abs() {
            prop_assert!(rel(d.d2_pr, richardson1(dpr, y, h2)) < 1e-6, "{} {}", d.d2_pr, richardson1(dpr, y, h2));
        }
        if d.d2_plinv.abs() * h2 > 1e-5 * d.d_plinv.abs() {
            prop_assert!(rel(d.d2_plinv, richardson1(dpl, y, h2)) < 1e-6, "{} {}", d.d2_plinv, richardson1(dpl, y, h2));
        }
        prop_assert!(d.d_pr < 0.0 && d.d_plinv < 0.0 && d.d2_pr < 0.0 && d.d2_plinv > 0.0);
    }

    #[test]
    fn maps_are_decreasing_and_signed(ctx in context()) {
        let mut last = (f64::INFINITY, f64::INFINITY);
        for k in 1..200 {
            let y = ctx.y_star + 0.05 * k as f64;
            let pr = ctx.P_R(y).unwrap();
            let pl = ctx.P_L_inv(y).unwrap();
            prop_assert!(pr < 0.0 && pl < -ctx.params.eta);
            prop_assert!(pr < last.0 && pl < last.1);
            last = (pr, pl);
        }
    }

    #[test]
    fn at_most_two_zeros(ctx in context()) {
        let zeros = ctx.zeros_of_D();
        prop_assert!(zeros.len() <= 2);
        if ctx.displacement(ctx.y_star).unwrap() < 0.0 {
            prop_assert_eq!(zeros.len(), 1);
        }
        for z in &zeros {
            prop_assert!(z.residual.abs() < 1e-9 * (1.0 + z.y.abs()), "{:?}", z);
        }
    }

    #[test]
    fn displacement_is_convex(ctx in context()) {
        let h = 0.05;
        for k in 2..100 {
            let y = ctx.y_star + h * k as f64;
            let d = ctx.displacement(y - h).unwrap() - 2.0 * ctx.displacement(y).unwrap()
                + ctx.displacement(y + h).unwrap();
            prop_assert!(d > -1e-9);
        }
    }
}

#[test]
fn asymptotic_slopes() {
    for a in [0.25, 0.5, 1.0] {
        for g in [0.25, 0.5, 1.0] {
            let p = CanonicalParams::new(a, 1.0, 1, 1.0, g - 1.0, g, -1.0, g);
            let ctx = HalfMapContext::new(&p).unwrap();
            let d = ctx.derivatives(1e5).unwrap();
            let nu = ctx.nu;
            assert!(rel(d.d_pr, -(a * PI).exp()) < 0.01, "{a} {}", d.d_pr);
            assert!(rel(d.d_plinv, -(-g * PI / nu).exp()) < 0.01, "{g} {}", d.d_plinv);
        }
    }
}

#[test]
fn right_map_scales_with_beta() {
    let p = CanonicalParams::new(0.5, 1.0, 1, 1.0, -1.0, 0.5, -1.0, 0.5);
    let q = CanonicalParams { beta: 2.0, ..p };
    let (c1, c2) = (HalfMapContext::new(&p).unwrap(), HalfMapContext::new(&q).unwrap());
    let t = 4.0;
    let (y1, p1) = c1.right_map_param(t).unwrap();
    let (y2, p2) = c2.right_map_param(t).unwrap();
    assert!((y2 - 2.0 * y1).abs() < 1e-12 * y2.abs());
    assert!((p2 - 2.0 * p1).abs() < 1e-12 * p2.abs());
}

#[test]
fn left_map_blows_up_near_half_turn() {
    let p = CanonicalParams::new(0.5, 1.0, 1, 1.0, -1.0, 0.5, -1.0, 0.5);
    let ctx = HalfMapContext::new(&p).unwrap();
    let (y, pl) = ctx.left_map_param(PI / ctx.nu + 1e-8).unwrap();
    assert!(y > 1e6 && pl < -1e6);
}
