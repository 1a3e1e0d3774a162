use filippov::canonical::{shear_to_equal_gammas, to_canonical};
use filippov::flow::{linear_flow, Propagator};
use filippov::system::{classify_point, sigma_decomposition, sliding_field_raw, AffineField, FilippovSystem, RegionLabel};
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn field() -> impl Strategy<Value = AffineField> {
    ([[entry(), entry()], [entry(), entry()]], [entry(), entry()]).prop_map(|(a, b)| AffineField::new(a, b))
}

fn system() -> impl Strategy<Value = FilippovSystem> {
    (field(), field()).prop_map(|(l, r)| FilippovSystem::new(l, r)).prop_filter("nondegenerate", |s| s.is_nondegenerate())
}

fn rk4(f: &AffineField, z0: [f64; 2], t: f64, steps: usize) -> [f64; 2] {
    let h = t / steps as f64;
    let add = |z: [f64; 2], k: [f64; 2], s: f64| [z[0] + s * k[0], z[1] + s * k[1]];
    let mut z = z0;
    for _ in 0..steps {
        let k1 = f.eval(&z);
        let k2 = f.eval(&add(z, k1, 0.5 * h));
        let k3 = f.eval(&add(z, k2, 0.5 * h));
        let k4 = f.eval(&add(z, k3, h));
        z = [
            z[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            z[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
    }
    z
}

fn close(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
    let scale = 1.0 + a[0].abs().max(a[1].abs()).max(b[0].abs()).max(b[1].abs());
    (a[0] - b[0]).abs() <= tol * scale && (a[1] - b[1]).abs() <= tol * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_form_flow_matches_rk4(f in field(), x in entry(), y in entry(), t in 0.0..2.0f64) {
        let exact = linear_flow(&f, [x, y], t);
        let num = rk4(&f, [x, y], t, 4000);
        prop_assert!(close(exact, num, 1e-9), "{exact:?} vs {num:?}");
    }

    #[test]
    fn flow_is_a_semigroup(f in field(), x in entry(), y in entry(), s in 0.0..1.5f64, t in 0.0..1.5f64) {
        let p = Propagator::new(&f, [x, y]);
        let two_step = linear_flow(&f, p.at(s), t);
        prop_assert!(close(p.at(s + t), two_step, 1e-10), "{:?} vs {two_step:?}", p.at(s + t));
    }

    #[test]
    fn decomposition_partitions_the_axis(sys in system(), u in -20.0..20.0f64) {
        let dec = sigma_decomposition(&sys);
        prop_assert_eq!(dec.intervals.first().unwrap().lo, f64::NEG_INFINITY);
        prop_assert_eq!(dec.intervals.last().unwrap().hi, f64::INFINITY);
        for w in dec.intervals.windows(2) {
            prop_assert_eq!(w[0].hi, w[1].lo);
            prop_assert!(w[0].lo < w[0].hi);
        }
        for iv in &dec.intervals {
            let mid = if iv.lo.is_finite() && iv.hi.is_finite() {
                0.5 * (iv.lo + iv.hi)
            } else if iv.lo.is_finite() {
                iv.lo + 1.0
            } else if iv.hi.is_finite() {
                iv.hi - 1.0
            } else {
                0.0
            };
            prop_assert_eq!(classify_point(&sys, mid), iv.label);
        }
        let inside = dec.intervals.iter().filter(|iv| iv.contains(u)).count();
        let on_edge = dec.points.iter().any(|(p, _)| *p == u);
        prop_assert!(inside + on_edge as usize == 1);
    }

    #[test]
    fn sliding_field_is_the_filippov_combination(sys in system(), y in -5.0..5.0f64) {
        let label = classify_point(&sys, y);
        prop_assume!(matches!(label, RegionLabel::AttractiveSliding | RegionLabel::RepulsiveSliding));
        let (fr, fl) = (sys.right.eval(&[0.0, y]), sys.left.eval(&[0.0, y]));
        let lambda = fl[0] / (fl[0] - fr[0]);
        prop_assert!((0.0..=1.0).contains(&lambda));
        let comb = [lambda * fr[0] + (1.0 - lambda) * fl[0], lambda * fr[1] + (1.0 - lambda) * fl[1]];
        let scale = 1.0 + fr[1].abs() + fl[1].abs();
        prop_assert!(comb[0].abs() <= 1e-12 * scale);
        prop_assert!((comb[1] - sliding_field_raw(&sys, y)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn canonical_record_conjugates_the_fields(sys in system(), x in entry(), y in entry()) {
        let Ok((p, rec)) = to_canonical(&sys) else { return Ok(()) };
        let pushed = rec.push_system(&sys);
        let target = p.system();
        for (a, b) in [(pushed.left, target.left), (pushed.right, target.right)] {
            let ea: Vec<f64> = a.a.iter().flatten().chain(&a.b).copied().collect();
            let eb: Vec<f64> = b.a.iter().flatten().chain(&b.b).copied().collect();
            let scale = 1.0 + eb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(ea.iter().zip(&eb).all(|(u, v)| (u - v).abs() <= 1e-9 * scale), "{ea:?} vs {eb:?}");
        }
        prop_assert!(p.eta != 0.0);
        let z = [x, y];
        let back = rec.pullback(&rec.push(&z));
        prop_assert!(close(back, z, 1e-9), "{back:?} vs {z:?}");
    }

    #[test]
    fn shear_equalizes_gammas(sys in system()) {
        let Ok((p, _)) = to_canonical(&sys) else { return Ok(()) };
        let Ok((q, rec)) = shear_to_equal_gammas(&p) else { return Ok(()) };
        prop_assert_eq!(q.gamma1, q.gamma3);
        prop_assert!((q.Delta() - p.Delta()).abs() <= 1e-12 * (1.0 + p.Delta().abs()));
        let pushed = rec.push_system(&p.system());
        let left = q.left_field();
        for (u, v) in pushed.left.a.iter().flatten().chain(&pushed.left.b).zip(left.a.iter().flatten().chain(&left.b)) {
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }
}
