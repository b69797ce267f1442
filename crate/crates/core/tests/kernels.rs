use czp_core::kernels::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cutoff2() -> Cutoff<2> {
    Cutoff::from_bounds([0.3, 0.3], [0.7, 0.7], [0.1, 0.1], [0.9, 0.9], 0.5).unwrap()
}

fn cutoff3() -> Cutoff<3> {
    Cutoff::from_bounds([0.3; 3], [0.7; 3], [0.1; 3], [0.9; 3], 0.8).unwrap()
}

#[test]
fn omega_sphere_means_vanish() {
    for i in 0..2 {
        for j in 0..2 {
            let m = sphere_mean::<2>(|y| cz_kernel(i, j, y).unwrap());
            assert!(m.abs() <= 1e-12, "2D ({i},{j}): {m}");
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let m = sphere_mean::<3>(|y| cz_kernel(i, j, y).unwrap());
            assert!(m.abs() <= 1e-10, "3D ({i},{j}): {m}");
        }
    }
    let m = sphere_mean::<3>(|y| y[0] * y[1] / (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]));
    assert!(m.abs() < 1e-10);
}

#[test]
fn omega_over_circle_is_analytic_cancellation() {
    // int_0^{2 pi} (1 - 2 cos^2) = 0
    let m = sphere_mean_with::<2>(|y| cz_kernel(0, 0, y).unwrap(), 7);
    assert!(m.abs() < 1e-14);
}

#[test]
fn laplacian_of_potential_vanishes_off_origin() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let x2 = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let h = newtonian_hessian(&x2).unwrap();
        assert!((h[0][0] + h[1][1]).abs() < 1e-8 * (1.0 + h[0][0].abs()));
        let x3 = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let h = newtonian_hessian(&x3).unwrap();
        assert!((h[0][0] + h[1][1] + h[2][2]).abs() < 1e-8 * (1.0 + h[0][0].abs()));
    }
}

#[test]
fn potential_gradient_matches_differences() {
    let x = [0.3, -0.7, 0.2];
    let g = newtonian_gradient(&x).unwrap();
    let e = 1e-6;
    for a in 0..3 {
        let mut p = x;
        let mut m = x;
        p[a] += e;
        m[a] -= e;
        let fd = (newtonian_potential(&p).unwrap() - newtonian_potential(&m).unwrap()) / (2.0 * e);
        assert!((fd - g[a]).abs() < 1e-8);
    }
}

fn fd_check<const D: usize>(cutoff: &Cutoff<D>, seed: u64) -> f64 {
    // Central-difference oracle of eta(y) Phi(x - y) in y, step 1e-5.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = |x: &[f64; D], y: &[f64; D]| {
        let r: [f64; D] = std::array::from_fn(|a| y[a] - x[a]);
        cutoff.eval(y) * newtonian_potential(&r).unwrap()
    };
    let step = 1e-5;
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    while tested < 100 {
        let x: [f64; D] = std::array::from_fn(|_| rng.gen_range(0.35..0.65));
        let y: [f64; D] = std::array::from_fn(|_| rng.gen_range(0.05..0.95));
        // Transition annulus, excluding the far tails of the ramps where eta
        // is below any relative resolution of a finite difference.
        let eta = cutoff.eval(&y);
        if !(1e-6..1.0).contains(&eta) {
            continue;
        }
        let dist: f64 = (0..D).map(|a| (y[a] - x[a]).powi(2)).sum::<f64>().sqrt();
        if dist < 0.05 {
            continue;
        }
        tested += 1;
        let g = eta_phi_gradient(&x, &y, cutoff).unwrap();
        let h = eta_phi_hessian(&x, &y, cutoff).unwrap();
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let hnorm = h.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        for a in 0..D {
            let at = |s: f64| {
                let mut p = y;
                p[a] += s * step;
                p
            };
            // Fourth-order central difference.
            let d4 = |v: &dyn Fn(&[f64; D]) -> f64| {
                (8.0 * (v(&at(1.0)) - v(&at(-1.0))) - (v(&at(2.0)) - v(&at(-2.0)))) / (12.0 * step)
            };
            let fd = d4(&|p| f(&x, p));
            worst = worst.max((fd - g[a]).abs() / gnorm);
            for b in 0..D {
                let fd = d4(&|p| eta_phi_gradient(&x, p, cutoff).unwrap()[b]);
                worst = worst.max((fd - h[a][b]).abs() / hnorm);
            }
        }
    }
    worst
}

#[test]
fn eta_phi_derivatives_match_differences() {
    let e2 = fd_check(&cutoff2(), 11);
    let e3 = fd_check(&cutoff3(), 12);
    assert!(e2 <= 1e-6, "2D relative error {e2}");
    assert!(e3 <= 1e-6, "3D relative error {e3}");
}

#[test]
fn hessian_inside_inner_window_is_pure_cz_term() {
    let c = cutoff2();
    let x = [0.5, 0.5];
    let y = [0.62, 0.41];
    let h = eta_phi_hessian(&x, &y, &c).unwrap();
    let r = [y[0] - x[0], y[1] - x[1]];
    let rn2 = r[0] * r[0] + r[1] * r[1];
    for i in 0..2 {
        for j in 0..2 {
            let expect = -cz_kernel(i, j, &r).unwrap() / (sphere_area(2) * rn2);
            assert!((h[i][j] - expect).abs() < 1e-14 * (1.0 + expect.abs()));
        }
    }
    let far = eta_phi_hessian(&x, &[0.95, 0.5], &c).unwrap();
    assert!(far.iter().flatten().all(|v| *v == 0.0));
    assert_eq!(eta_phi_gradient(&x, &[0.02, 0.5], &c).unwrap(), [0.0, 0.0]);
}

#[test]
fn cutoff_profile_invariants() {
    let c = cutoff2();
    assert_eq!(c.eval(&[0.5, 0.5]), 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let y = [rng.gen_range(-0.1..1.1), rng.gen_range(-0.1..1.1)];
        let v = c.eval(&y);
        assert!((0.0..=1.0).contains(&v));
        let inside_w = (0.3..=0.7).contains(&y[0]) && (0.3..=0.7).contains(&y[1]);
        let outside_v = !(0.1..=0.9).contains(&y[0]) || !(0.1..=0.9).contains(&y[1]);
        if inside_w {
            assert_eq!(v, 1.0);
            assert_eq!(c.grad(&y), [0.0, 0.0]);
        }
        if outside_v {
            assert_eq!(v, 0.0);
            assert_eq!(c.hess(&y), [[0.0; 2]; 2]);
        }
    }
}

#[test]
fn mollifier_at_support_edge() {
    let m = Mollifier::<3>::new(0.25).unwrap();
    assert_eq!(m.eval(&[0.25, 0.0, 0.0]), 0.0);
    assert_eq!(m.eval(&[0.2, 0.2, 0.0]), 0.0);
}

#[test]
fn riesz_constants_and_kernel() {
    assert!((riesz_constant(2) - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    let v = riesz_kernel(0, &[2.0, 0.0]).unwrap();
    assert!((v - riesz_constant(2) / 4.0).abs() < 1e-15);
    assert!(riesz_kernel(1, &[0.0, 0.0]).is_err());
}

proptest! {
    #[test]
    fn omega_is_symmetric_trace_free_and_homogeneous(
        y in prop::array::uniform3(-5.0f64..5.0),
        lambda in 0.01f64..100.0,
    ) {
        prop_assume!(y.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let mut trace = 0.0;
        for i in 0..3 {
            trace += cz_kernel(i, i, &y).unwrap();
            for j in 0..3 {
                let a = cz_kernel(i, j, &y).unwrap();
                prop_assert_eq!(a, cz_kernel(j, i, &y).unwrap());
                let scaled = [lambda * y[0], lambda * y[1], lambda * y[2]];
                prop_assert!((a - cz_kernel(i, j, &scaled).unwrap()).abs() < 1e-13);
            }
        }
        prop_assert!(trace.abs() < 1e-13);
    }

    #[test]
    fn omega_trace_free_in_plane(y in prop::array::uniform2(-5.0f64..5.0)) {
        prop_assume!(y[0].abs() + y[1].abs() > 1e-6);
        let t = cz_kernel(0, 0, &y).unwrap() + cz_kernel(1, 1, &y).unwrap();
        prop_assert!(t.abs() < 1e-14);
    }
}
