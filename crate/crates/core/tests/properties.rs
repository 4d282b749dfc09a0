//! Seeded cross-module invariant checks: each test loops over randomized
//! inputs with a fixed RNG stream so failures are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use slc_core::barriers::{delta_lower, dist_upper, kappa, level_curvature};
use slc_core::foliation::{min_gap, sweep};
use slc_core::graphsolve::{
    angle_sum_field, linearized_operator, newton_solve, normal_components,
    perron_solve, GraphField, SolverConfig,
};
use slc_core::hypgeom::{
    exp_point, fundamental_forms, geodesic_velocity, normal_flow_shape,
    parallel_transport, HPoint, MinkVec, UnitTangent,
};
use slc_core::kpmetric::{
    kp_metric, round_chart_factor, RoundBall, SamplerConfig, SphericalDomain,
};
use slc_core::symcurv::{
    eigen_monotonicity_check, r_theta, round_trip_residual, sin_inequality_margin,
    sl_r, zeroth_coeff, AngleParams, SymMatrix,
};

fn random_pd(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    // B·Bᵀ + εId is positive definite
    let mut e = vec![0.0; n * n];
    let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += b[i * n + k] * b[j * n + k];
            }
            e[i * n + j] = s + if i == j { 0.05 } else { 0.0 };
        }
    }
    SymMatrix::new(n, &e).unwrap()
}

fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    let mut e = vec![0.0; n * n];
    let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += b[i * n + k] * b[j * n + k];
            }
            e[i * n + j] = s;
        }
    }
    SymMatrix::new(n, &e).unwrap()
}

#[test]
fn curvature_round_trip_and_monotone_in_r() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..400 {
        let n = rng.gen_range(2..=4usize);
        let a = random_pd(n, &mut rng);
        let theta = rng.gen_range(0.15..n as f64 * FRAC_PI_2 - 0.15);
        let p = AngleParams::new(theta, n).unwrap();
        // defining equation holds at the solved r
        assert!(round_trip_residual(&a, &p).unwrap() <= 1e-10);
        // the angle sum is strictly increasing in r
        let r = r_theta(&a, &p).unwrap();
        assert!(sl_r(&a, 1.1 * r).unwrap() > theta);
        assert!(sl_r(&a, 0.9 * r).unwrap() < theta);
    }
}

#[test]
fn curvature_antitone_under_domination() {
    // A ⪯ B pointwise on spectra ⇒ r_theta(A) ≥ r_theta(B): a flatter
    // surface needs a larger scaling to reach the same angle sum
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..300 {
        let n = rng.gen_range(2..=4usize);
        let a = random_pd(n, &mut rng);
        let bump = random_psd(n, &mut rng);
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = a.get(i, j) + bump.get(i, j);
            }
        }
        let b = SymMatrix::new(n, &e).unwrap();
        assert!(eigen_monotonicity_check(&b, &a).unwrap());
        let theta = rng.gen_range(0.3..n as f64 * FRAC_PI_2 - 0.3);
        let p = AngleParams::new(theta, n).unwrap();
        let ra = r_theta(&a, &p).unwrap();
        let rb = r_theta(&b, &p).unwrap();
        assert!(rb <= ra + 1e-10, "domination violated: {rb} > {ra}");
    }
}

#[test]
fn angle_comparison_margin_grid() {
    // n sin²(t/n) − m sin²(t/m) ≥ 0 for n < m, vanishing only at n=1, m=2,
    // t = π/2
    for n in 1..8usize {
        for m in (n + 1)..=8usize {
            for k in 1..=200 {
                let t = FRAC_PI_2 * k as f64 / 200.0;
                let margin = sin_inequality_margin(n, m, t).unwrap();
                assert!(margin >= -1e-12, "margin {margin} at ({n},{m},{t})");
                let at_zero = n == 1 && m == 2 && (t - FRAC_PI_2).abs() < 1e-9;
                if margin < 1e-9 && t > 1e-6 {
                    assert!(at_zero, "unexpected zero at ({n},{m},{t})");
                }
            }
        }
    }
}

#[test]
fn zeroth_coefficient_positive_in_regime() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut min_seen = f64::INFINITY;
    for _ in 0..2000 {
        let n = rng.gen_range(2..=4usize);
        let lo = (n as f64 - 1.0) * FRAC_PI_2 + 1e-3;
        let hi = n as f64 * FRAC_PI_2 - 1e-3;
        let theta = rng.gen_range(lo..hi);
        let p = AngleParams::new(theta, n).unwrap();
        let a = random_pd(n, &mut rng);
        let r = r_theta(&a, &p).unwrap();
        if r <= p.threshold() {
            continue;
        }
        let z = zeroth_coeff(&a, r).unwrap();
        min_seen = min_seen.min(z);
    }
    assert!(min_seen >= -1e-10, "zeroth coefficient dipped to {min_seen}");
}

#[test]
fn geodesic_flow_and_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..200 {
        let y: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let mut v = MinkVec::zeros(4);
        v.coords[0] = (1.0 + y[0] * y[0] + y[1] * y[1]).sqrt();
        v.coords[1] = y[0];
        v.coords[2] = y[1];
        let p = HPoint::project(v).unwrap();
        // random unit tangent
        let raw = MinkVec::new((0..4).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let c = p.vec().dot(&raw);
        let t = raw.add(&p.vec().scale(c));
        let nt = t.dot(&t);
        if nt <= 1e-4 {
            continue;
        }
        let u = UnitTangent::new(p.clone(), t.scale(1.0 / nt.sqrt())).unwrap();
        let (s, w): (f64, f64) =
            (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        // flow property exp(s+w) = exp_w ∘ exp_s
        let direct = exp_point(&u, s + w);
        let composed = exp_point(&geodesic_velocity(&u, s), w);
        assert!(direct.distance(&composed) <= 1e-9);
        // transport is isometric and stays tangent
        let moved = parallel_transport(&u, &u.dir, s);
        let q = exp_point(&u, s);
        assert!((moved.dot(&moved) - 1.0).abs() <= 1e-10);
        assert!(q.vec().dot(&moved).abs() <= 1e-10);
    }
}

#[test]
fn normal_flow_composes_and_matches_ode() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..300 {
        let l0: f64 = rng.gen_range(0.0..3.0);
        let d1: f64 = rng.gen_range(0.0..1.5);
        let d2: f64 = rng.gen_range(0.0..1.5);
        let once =
            normal_flow_shape(&slc_core::Spectrum::new(vec![l0]), d1 + d2).unwrap();
        let twice = normal_flow_shape(
            &normal_flow_shape(&slc_core::Spectrum::new(vec![l0]), d1).unwrap(),
            d2,
        )
        .unwrap();
        assert!((once.values()[0] - twice.values()[0]).abs() <= 1e-10);
        // 4th-order integration of λ' = 1 − λ²
        let steps = 2000;
        let h = (d1 + d2) / steps as f64;
        let f = |l: f64| 1.0 - l * l;
        let mut l = l0;
        for _ in 0..steps {
            let k1 = f(l);
            let k2 = f(l + 0.5 * h * k1);
            let k3 = f(l + 0.5 * h * k2);
            let k4 = f(l + h * k3);
            l += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((once.values()[0] - l).abs() <= 1e-8);
    }
}

#[test]
fn model_shape_operators_from_patches() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let h = 1e-3;
    for _ in 0..10 {
        let rho: f64 = rng.gen_range(0.4..1.6);
        let patch = move |ang: &[f64]| {
            let (a, b) = (ang[0], ang[1]);
            let dir = [a.sin() * b.cos(), a.sin() * b.sin(), a.cos()];
            let mut v = MinkVec::zeros(4);
            v.coords[0] = rho.cosh();
            for k in 0..3 {
                v.coords[k + 1] = rho.sinh() * dir[k];
            }
            HPoint::project(v).unwrap()
        };
        let at = [rng.gen_range(0.7..2.2), rng.gen_range(0.0..TAU)];
        let f = fundamental_forms(&patch, &at, h).unwrap();
        for v in f.principal_curvatures().values() {
            assert!((v - 1.0 / rho.tanh()).abs() <= 1e-4);
        }
    }
}

#[test]
fn linearization_matches_directional_derivative() {
    // the assembled fixed-r operator against a central finite difference of
    // the discrete angle-sum field along a smooth interior perturbation
    let theta = 3.0 * FRAC_PI_4;
    let p = AngleParams::new(theta, 2).unwrap();
    let d = 0.8_f64;
    let r = p.threshold() / d.tanh();
    let (nr, nphi, h) = (24usize, 16usize, 0.05_f64);
    let cfg = SolverConfig::new(theta, r);
    let g0 = GraphField::disk_with_boundary(nr, nphi, h, d, |phi| {
        d * (1.0 - 0.02 * (1.0 + (2.0 * phi).cos()))
    })
    .unwrap();
    let (g, _) = newton_solve(&g0, &cfg).unwrap();

    let rho_d = (nr as f64 - 0.5) * h;
    let spec = g.grid_spec().unwrap();
    let f: Vec<f64> = (0..nr * nphi)
        .map(|q| {
            let rho = spec.rho(q / nphi);
            let phi = spec.phi(q % nphi);
            let s = (PI * rho / rho_d).sin();
            s * s * (1.0 + 0.5 * (2.0 * phi).cos())
        })
        .collect();
    let eps = 1e-5;
    let u = g.heights();
    let up: Vec<f64> = u.iter().zip(&f).map(|(a, b)| a + eps * b).collect();
    let um: Vec<f64> = u.iter().zip(&f).map(|(a, b)| a - eps * b).collect();
    let gp = GraphField::disk(nr, nphi, h, up).unwrap();
    let gm = GraphField::disk(nr, nphi, h, um).unwrap();
    let sp = angle_sum_field(&gp, &p, r).unwrap();
    let sm = angle_sum_field(&gm, &p, r).unwrap();
    let c = normal_components(&g, &p).unwrap();
    let v: Vec<f64> = c
        .iter()
        .zip(&f)
        .map(|(cv, fv)| if cv.is_nan() { 0.0 } else { cv * fv })
        .collect();
    let op = linearized_operator(&g, &p, r).unwrap();
    let pred = op.apply(&v);
    let mut max_err = 0.0_f64;
    let mut max_mag = 0.0_f64;
    for q in 0..nr * nphi {
        if spec.is_dirichlet(q) {
            continue;
        }
        let fd = (sp[q] - sm[q]) / (2.0 * eps);
        let want = r * pred[q];
        max_err = max_err.max((fd - want).abs());
        max_mag = max_mag.max(want.abs());
    }
    assert!(max_mag > 0.1, "degenerate test direction");
    let rel = max_err / max_mag;
    assert!(rel <= 1e-2, "linearization mismatch: relative error {rel}");
}

#[test]
fn newton_residual_tail_is_superlinear() {
    let theta = 3.0 * FRAC_PI_4;
    let p = AngleParams::new(theta, 2).unwrap();
    let d = 0.9_f64;
    let target = p.threshold() / d.tanh();
    let g0 = GraphField::disk_with_boundary(10, 8, 0.08, 0.8, |_| d).unwrap();
    let (_, report) = newton_solve(&g0, &SolverConfig::new(theta, target)).unwrap();
    assert!(report.converged);
    let res = &report.residuals;
    let last = *res.last().unwrap();
    assert!(last <= 1e-9);
    // once the residual is small the contraction is faster than linear
    let small: Vec<f64> =
        res.iter().cloned().filter(|v| *v < 1e-2 && *v > 0.0).collect();
    for w in small.windows(2) {
        assert!(
            w[1] <= 0.5 * w[0] + 1e-12,
            "slow tail contraction: {} -> {}",
            w[0],
            w[1]
        );
    }
}

#[test]
fn perron_and_newton_agree_on_profiles() {
    let theta = 3.0 * FRAC_PI_4;
    let p = AngleParams::new(theta, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..3 {
        let target = p.threshold() * rng.gen_range(1.6..2.4);
        let exact = (p.threshold() / target).atanh();
        let seed = GraphField::rot_sym_constant(21, 0.05, exact).unwrap();
        let (above, _) =
            newton_solve(&seed, &SolverConfig::new(theta, 0.92 * target)).unwrap();
        let mut u0 = above.heights();
        let last = u0.len() - 1;
        u0[last] = exact;
        let g0 = GraphField::rot_sym(0.05, u0.clone()).unwrap();
        let cfg = SolverConfig::new(theta, target);
        let (pe, prep) = perron_solve(&g0, &cfg).unwrap();
        let (ne, _) = newton_solve(&g0, &cfg).unwrap();
        assert!(prep.converged);
        for ((a, b), s) in pe.heights().iter().zip(ne.heights()).zip(&u0) {
            assert!((a - b).abs() <= 1e-7);
            assert!(*a <= s + 1e-12, "iteration not monotone");
        }
    }
}

#[test]
fn foliation_leaves_are_ordered_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    for _ in 0..5 {
        let theta = rng.gen_range(FRAC_PI_2 * 1.2..FRAC_PI_2 * 1.9);
        let p = AngleParams::new(theta, 2).unwrap();
        let template = GraphField::fuchsian(2, 0.4).unwrap();
        let rs: Vec<f64> =
            (0..5).map(|k| p.threshold() * (6.0 - k as f64)).collect();
        let result =
            sweep(&template, theta, &rs, None::<fn(f64, f64) -> f64>).unwrap();
        assert!(!result.truncated);
        for w in result.records.windows(2) {
            assert!(min_gap(&w[1].solved, &w[0].solved).unwrap() > 0.0);
        }
        for rec in &result.records {
            assert!(rec.max_height <= dist_upper(&p, rec.r).unwrap() + 1e-9);
        }
    }
}

#[test]
fn comparison_bounds_are_ordered() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for _ in 0..200 {
        let theta = rng.gen_range(FRAC_PI_2 * 1.05..FRAC_PI_2 * 1.95);
        let p = AngleParams::new(theta, 2).unwrap();
        let r = p.threshold() * rng.gen_range(1.02..8.0);
        let dl = delta_lower(&p, r).unwrap();
        let du = dist_upper(&p, r).unwrap();
        assert!(dl <= du + 1e-10, "bounds crossed: {dl} > {du}");
        // the tube comparison sits below the umbilic one
        let d = rng.gen_range(0.1..2.5);
        assert!(kappa(&p, d).unwrap() <= level_curvature(&p, d).unwrap() + 1e-12);
    }
}

#[test]
fn kp_metric_invariances() {
    let sampler = SamplerConfig::default();
    // unit ball in the chart = hemisphere domain: sampled infimum equals the
    // hyperbolic metric of that single ball
    let hemi = SphericalDomain::Ball(
        RoundBall::new(vec![0.0, 0.0, 1.0], FRAC_PI_2).unwrap(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    for _ in 0..20 {
        let rr: f64 = rng.gen_range(0.0..0.8);
        let ang: f64 = rng.gen_range(0.0..TAU);
        let q = [rr * ang.cos(), rr * ang.sin()];
        let est = kp_metric(&hemi, &q, &sampler).unwrap();
        let want = 4.0 / (1.0 - rr * rr).powi(2);
        assert!(
            (est.chart_factor - want).abs() <= 1e-6 * want,
            "hemisphere factor {} vs {want}",
            est.chart_factor
        );
        // conformal: tensor proportional to identity
        assert!((est.tensor[1]).abs() <= 1e-6 * est.chart_factor);
        assert!(
            (est.tensor[0] - est.tensor[3]).abs() <= 1e-6 * est.chart_factor
        );
    }
    // domain monotonicity: shrinking the domain can only increase the metric
    let small = SphericalDomain::Ball(
        RoundBall::new(vec![0.0, 0.0, 1.0], 0.4 * PI).unwrap(),
    );
    for _ in 0..10 {
        let rr: f64 = rng.gen_range(0.0..0.25);
        let ang: f64 = rng.gen_range(0.0..TAU);
        let q = [rr * ang.cos(), rr * ang.sin()];
        let big = kp_metric(&hemi, &q, &sampler).unwrap();
        let shrunk = kp_metric(&small, &q, &sampler).unwrap();
        assert!(shrunk.chart_factor >= big.chart_factor - 1e-9);
    }
    // round factor normalization agrees with the chart factor
    let q = [0.3, -0.1];
    let est = kp_metric(&hemi, &q, &sampler).unwrap();
    assert!(
        (est.round_factor * round_chart_factor(&q) - est.chart_factor).abs()
            <= 1e-12 * est.chart_factor
    );
}
