mod common;

use common::bump;
use czp_core::elasticity::matrix::{add, identity, matmul, norm2, scale, trace, transpose};
use czp_core::elasticity::*;
use czp_core::grid::{integrate, GridSpec, ScalarField, TensorField, Window};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mat3() -> impl Strategy<Value = Matrix<3>> {
    prop::array::uniform3(prop::array::uniform3(-2.0..2.0f64))
}

fn mat2() -> impl Strategy<Value = Matrix<2>> {
    prop::array::uniform2(prop::array::uniform2(-2.0..2.0f64))
}

fn random3(rng: &mut impl Rng) -> Matrix<3> {
    std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.5..1.5)))
}

fn max_diff<const D: usize>(a: &Matrix<D>, b: &Matrix<D>) -> f64 {
    (0..D).flat_map(|i| (0..D).map(move |j| (i, j))).map(|(i, j)| (a[i][j] - b[i][j]).abs()).fold(0.0, f64::max)
}

fn material() -> Material {
    Material::new(1.3, 0.7, 1.0).unwrap()
}

// ---------- cofactor algebra ----------

#[test]
fn cofactor_by_hand() {
    assert_eq!(cofactor(&[[1.0, 2.0], [3.0, 4.0]]), [[4.0, -3.0], [-2.0, 1.0]]);
    assert_eq!(cofactor(&identity::<3>()), identity::<3>());
    // Row 0 of cof for a 3x3 by explicit minors.
    let p = [[2.0, -1.0, 0.5], [1.0, 3.0, -2.0], [0.0, 4.0, 1.0]];
    let c = cofactor(&p);
    assert_eq!(c[0], [3.0 * 1.0 - (-2.0) * 4.0, -(1.0 * 1.0 - (-2.0) * 0.0), 1.0 * 4.0 - 3.0 * 0.0]);
}

proptest! {
    #[test]
    fn transpose_times_cofactor_is_determinant_3d(p in mat3()) {
        let lhs = matmul(&transpose(&p), &cofactor(&p));
        let rhs = scale(det(&p), &identity());
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * (1.0 + norm2(&p)).powf(1.5));
    }

    #[test]
    fn transpose_times_cofactor_is_determinant_2d(p in mat2()) {
        let lhs = matmul(&transpose(&p), &cofactor(&p));
        prop_assert!(max_diff(&lhs, &scale(det(&p), &identity())) <= 1e-12 * (1.0 + norm2(&p)));
    }

    #[test]
    fn cofactor_is_multiplicative(x in mat3(), y in mat3()) {
        let lhs = cofactor(&matmul(&x, &y));
        let rhs = matmul(&cofactor(&x), &cofactor(&y));
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * (1.0 + norm2(&x) * norm2(&y)));
    }

    #[test]
    fn planar_cofactor_preserves_norm(p in mat2()) {
        prop_assert!((norm2(&p) - norm2(&cofactor(&p))).abs() <= 1e-15 * norm2(&p).max(1.0));
    }
}

// ---------- energy and stress ----------

#[test]
fn energy_at_reference_values() {
    let m = material();
    assert_eq!(mr_energy(&identity::<3>(), &m), 0.0);
    assert_eq!(mr_energy(&identity::<2>(), &m), 0.0);
    // |P|^2 = |cof P|^2 = 5.25 for diag(2, 1/2, 1).
    let p = [[2.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 1.0]];
    assert_eq!(cofactor(&p), [[0.5, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]);
    let expect = 0.5 * (m.mu1 + m.mu2) * 2.25;
    assert!((mr_energy(&p, &m) - expect).abs() < 1e-14);
    assert!((mr_energy(&[[0.0; 3]; 3], &m).abs() - 1.5 * (m.mu1 + m.mu2)).abs() < 1e-14);
}

fn fd_stress(p: &Matrix<3>, m: &Material, step: f64) -> Matrix<3> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (mut a, mut b) = (*p, *p);
            a[i][j] += step;
            b[i][j] -= step;
            (mr_energy(&a, m) - mr_energy(&b, m)) / (2.0 * step)
        })
    })
}

#[test]
fn stress_at_identity() {
    let m = material();
    let s = mr_stress(&identity::<3>(), &m);
    assert!(max_diff(&s, &scale(m.mu1 + 2.0 * m.mu2, &identity())) <= 1e-10);
    assert!(max_diff(&s, &fd_stress(&identity(), &m, 1e-5)) <= 1e-8);
}

#[test]
fn cofactor_derivative_at_identity() {
    // d/dt cof(Id + t E) at t = 0 is tr(E) Id - E^T.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let e = random3(&mut rng);
    let t = 1e-6;
    let plus = cofactor(&add(&identity(), &scale(t, &e)));
    let minus = cofactor(&add(&identity(), &scale(-t, &e)));
    let fd = scale(0.5 / t, &add(&plus, &scale(-1.0, &minus)));
    let expect = add(&scale(trace(&e), &identity()), &scale(-1.0, &transpose(&e)));
    assert!(max_diff(&fd, &expect) < 1e-8);
}

#[test]
fn neo_hookean_stress_is_linear() {
    let m = Material::neo_hookean(2.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let p = random3(&mut rng);
        assert_eq!(mr_stress(&p, &m), scale(2.0, &p));
    }
}

#[test]
fn stress_matches_finite_differences() {
    let m = material();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let p = random3(&mut rng);
        let s = mr_stress(&p, &m);
        let fd = fd_stress(&p, &m, 1e-5);
        let rel = max_diff(&s, &fd) / norm2(&s).sqrt();
        assert!(rel <= 1e-6, "{rel}");
    }
    let m2 = material();
    for _ in 0..100 {
        let p: Matrix<2> = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.5..1.5)));
        let s = mr_stress(&p, &m2);
        // |cof P| = |P| in the plane, so DL = (mu1 + mu2) P.
        assert!(max_diff(&s, &scale(m2.mu1 + m2.mu2, &p)) < 1e-14);
    }
}

fn rotation(axis: [f64; 3], angle: f64) -> Matrix<3> {
    let n = (axis.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let k = [axis[0] / n, axis[1] / n, axis[2] / n];
    let kx = [[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]];
    add(&add(&identity(), &scale(angle.sin(), &kx)), &scale(1.0 - angle.cos(), &matmul(&kx, &kx)))
}

#[test]
fn energy_is_frame_indifferent() {
    let m = material();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let p = random3(&mut rng);
        let r = rotation([rng.gen(), rng.gen(), rng.gen::<f64>() + 0.1], rng.gen_range(0.0..6.0));
        let e = mr_energy(&p, &m);
        assert!((mr_energy(&matmul(&r, &p), &m) - e).abs() <= 1e-12 * e.abs().max(1.0));
    }
}

#[test]
fn growth_condition() {
    let m = material();
    let c = m.mu1 + m.mu2 + 1.0;
    let at_id = growth_check(&identity::<3>(), &m, c);
    assert!(at_id.holds && at_id.margin > 0.0);
    let zero = growth_check(&[[0.0; 3]; 3], &m, c);
    assert!((zero.energy - 1.5 * (m.mu1 + m.mu2)).abs() < 1e-14 && zero.holds);
    // Both sides are quartic in s at most, so the ratio stays bounded.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let p = random3(&mut rng);
    let ratios: Vec<f64> = [1.0, 10.0, 100.0, 1000.0]
        .iter()
        .map(|&s| {
            let g = growth_check(&scale(s, &p), &m, 1.0);
            g.energy.max(g.strain) / g.bound
        })
        .collect();
    assert!(ratios.iter().all(|r| r.is_finite() && *r < 10.0), "{ratios:?}");
    assert!((ratios[3] - ratios[2]).abs() < 1e-2 * ratios[2]);
}

// ---------- strain ----------

fn unit_grid3(n: usize) -> GridSpec<3> {
    GridSpec::cell_centered(n, 0.0, 1.0).unwrap()
}

#[test]
fn strain_of_identity_and_neo_hookean_shear() {
    let m = material();
    let spec = unit_grid3(4);
    let id: Deformation<3> = AnalyticMap::identity().into();
    let s = cauchy_green_strain(&id, &spec, &m).unwrap();
    assert!(max_diff(&s.at_linear(7), &scale(m.mu1 + 2.0 * m.mu2, &identity())) < 1e-14);

    let nh = Material::neo_hookean(1.5, 1.0).unwrap();
    let spec2 = GridSpec::<2>::cell_centered(8, 0.0, 1.0).unwrap();
    let shear: Deformation<2> = AnalyticMap::shear(0.4).into();
    let p = [[1.0, 0.4], [0.0, 1.0]];
    let s = cauchy_green_strain(&shear, &spec2, &nh).unwrap();
    assert!(max_diff(&s.at_linear(3), &scale(1.5, &matmul(&p, &transpose(&p)))) < 1e-14);
}

#[test]
fn strain_matches_row_cofactor_display() {
    // The mu2 block of DL(P) P^T is |Q|^2 Id - Q Q^T in terms of the rows Q_i
    // of cof P: diagonal |Q_j|^2 + |Q_k|^2, off-diagonal -<Q_i, Q_j>.
    let m = material();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..50 {
        let p = random3(&mut rng);
        let q = cofactor(&p);
        let dot = |a: usize, b: usize| (0..3).map(|k| q[a][k] * q[b][k]).sum::<f64>();
        let block: Matrix<3> =
            std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    if i == j {
                        (0..3).filter(|&k| k != i).map(|k| dot(k, k)).sum()
                    } else {
                        -dot(i, j)
                    }
                })
            });
        let expect = add(&scale(m.mu1, &matmul(&p, &transpose(&p))), &scale(m.mu2, &block));
        let got = strain_of_gradient(&p, &m);
        assert!(max_diff(&got, &expect) <= 1e-12 * (1.0 + norm2(&p)).powi(2));
    }
}

// ---------- push-forward ----------

fn smooth_strain(x: &[f64; 2]) -> Matrix<2> {
    let b = bump(x, &[0.5, 0.5], 0.3);
    [[b * (1.0 + x[0]), b * x[1]], [-b, b * (2.0 * x[0] * x[1])]]
}

#[test]
fn pushforward_by_identity_is_exact() {
    let spec = GridSpec::<2>::cell_centered(16, 0.0, 1.0).unwrap();
    let sigma = TensorField::from_fn(spec.clone(), smooth_strain).unwrap();
    let id: Deformation<2> = AnalyticMap::identity().into();
    assert_eq!(pushforward(&sigma, &id, &spec).unwrap(), sigma);
}

#[test]
fn pushforward_by_shear_matches_composition() {
    let gamma = 0.3;
    let spec = GridSpec::<2>::cell_centered(32, 0.0, 1.0).unwrap();
    let shear: Deformation<2> = AnalyticMap::shear(gamma).into();
    let got = pushforward_fn(|x| Ok(smooth_strain(x)), &shear, &spec).unwrap();
    let expect = TensorField::from_fn(spec.clone(), |y| smooth_strain(&[y[0] - gamma * y[1], y[1]])).unwrap();
    assert!(got.axpby(1.0, &expect, -1.0).unwrap().max_abs() <= 1e-8);

    // Sampled strain: multilinear interpolation, second order.
    let err = |n: usize| {
        let src = GridSpec::<2>::new([n + 1, n + 1], [2.0 / n as f64; 2], [-0.5, -0.5]).unwrap();
        let sigma = TensorField::from_fn(src, smooth_strain).unwrap();
        pushforward(&sigma, &shear, &spec).unwrap().axpby(1.0, &expect, -1.0).unwrap().max_abs()
    };
    let (e1, e2) = (err(64), err(128));
    assert!(e2 < e1 / 3.0, "{e1} -> {e2}");
}

#[test]
fn pushforward_preserves_integrals() {
    // sigma is supported well inside both grids, so the change of variables
    // with det = 1 equates the two integrals.
    let spec = GridSpec::<2>::cell_centered(128, 0.0, 1.0).unwrap();
    let twist: Deformation<2> = AnalyticMap::twist([0.5, 0.5], 0.4, 0.6).into();
    let moved = pushforward_fn(|x| Ok(smooth_strain(x)), &twist, &spec).unwrap();
    let orig = TensorField::from_fn(spec.clone(), smooth_strain).unwrap();
    let full = Window::full(&spec);
    for r in [1.0, 2.0, 3.0] {
        let a = integrate(&moved.frobenius().map(|v| v.powf(r)).unwrap(), &full).unwrap();
        let b = integrate(&orig.frobenius().map(|v| v.powf(r)).unwrap(), &full).unwrap();
        assert!((a - b).abs() <= 1e-6 * b, "r = {r}: {a} vs {b}");
    }
}

#[test]
fn deformed_window_keeps_its_volume() {
    let spec = GridSpec::<2>::cell_centered(64, 0.0, 1.0).unwrap();
    let w = Window::central(&spec, 0.5).unwrap();
    let ones = ScalarField::constant(spec.clone(), 1.0).unwrap();
    let vol = integrate(&ones, &w).unwrap();
    for u in [AnalyticMap::shear(0.7), AnalyticMap::twist([0.5, 0.5], 0.3, 1.0), AnalyticMap::quadratic_shear(0.5)] {
        let v = deformed_volume(&u.into(), &spec, &w).unwrap();
        assert!((v - vol).abs() <= 1e-6, "{v} vs {vol}");
    }
}

#[test]
fn newton_inversion_matches_closed_form() {
    let twist = AnalyticMap::twist([0.5, 0.5], 0.4, 0.8);
    let exact: Deformation<2> = twist.clone().into();
    // The same map with its inverse withheld forces the Newton path.
    let t1 = twist.clone();
    let t2 = twist.clone();
    let no_inverse: Deformation<2> = AnalyticMap::from_fns(
        "twist without inverse",
        move |x| exact_eval(&t1, x),
        move |x| Deformation::from(t2.clone()).jacobian(x).unwrap(),
        None,
    )
    .into();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let y = [rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9)];
        let a = exact.inverse(&y).unwrap();
        let b = no_inverse.inverse(&y).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
    }
}

fn exact_eval(m: &AnalyticMap<2>, x: &[f64; 2]) -> [f64; 2] {
    Deformation::from(m.clone()).eval(x).unwrap()
}

#[test]
fn twist_jacobian_matches_finite_differences() {
    let u: Deformation<2> = AnalyticMap::twist([0.5, 0.5], 0.4, 0.8).into();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..50 {
        let x = [rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9)];
        let j = u.jacobian(&x).unwrap();
        assert!((det(&j) - 1.0).abs() < 1e-12);
        for b in 0..2 {
            let (mut xp, mut xm) = (x, x);
            xp[b] += 1e-6;
            xm[b] -= 1e-6;
            let (up, um) = (u.eval(&xp).unwrap(), u.eval(&xm).unwrap());
            for a in 0..2 {
                assert!(((up[a] - um[a]) / 2e-6 - j[a][b]).abs() < 1e-7);
            }
        }
    }
}

#[test]
fn admissibility() {
    let spec = GridSpec::<2>::cell_centered(16, 0.0, 1.0).unwrap();
    let id = validate_admissible(&AnalyticMap::identity().into(), &spec, 1e-10).unwrap();
    assert!(id.admissible && id.max_det_error == 0.0);
    let shear = validate_admissible(&AnalyticMap::shear(0.5).into(), &spec, 1e-10).unwrap();
    assert!(shear.admissible && shear.max_det_error == 0.0);
    let stretch = AnalyticMap::affine([[2.0, 0.0], [0.0, 1.0]], [0.0, 0.0]);
    let rep = validate_admissible(&stretch.into(), &spec, 1e-10).unwrap();
    assert!(!rep.admissible && (rep.max_det_error - 1.0).abs() < 1e-15);
    assert!(rep.grad_l2.is_finite() && rep.cof_l2.is_finite());
}

#[test]
fn sampled_deformation_uses_finite_differences() {
    let spec = GridSpec::<2>::cell_centered(32, 0.0, 1.0).unwrap();
    let exact: Deformation<2> = AnalyticMap::quadratic_shear(0.5).into();
    let sampled = Deformation::sampled(exact.sample(&spec).unwrap()).unwrap();
    // Quadratic components: the second-order stencils are exact.
    let rep = validate_admissible(&sampled, &spec, 1e-10).unwrap();
    assert!(rep.admissible, "{}", rep.max_det_error);
    let y = [0.4, 0.6];
    let x = sampled.inverse(&y).unwrap();
    let back = exact.eval(&x).unwrap();
    assert!((back[0] - y[0]).abs() < 1e-3 && (back[1] - y[1]).abs() < 1e-12);
}
