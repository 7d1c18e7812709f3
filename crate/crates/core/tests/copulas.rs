mod common;

use common::{ecdf, samplable_copulas, unit_points};
use taildep::tdf::PickandsFunction;
use taildep::{Copula, Error, Rotation};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn closed_form_values() {
    assert!(close(Copula::Independence.cdf(0.3, 0.5).unwrap(), 0.15, 1e-15));

    let mo = Copula::marshall_olkin(0.353, 0.75).unwrap();
    let want = (0.5f64.powf(0.647) * 0.5).min(0.5 * 0.5f64.powf(0.25));
    assert!(close(mo.cdf(0.5, 0.5).unwrap(), want, 1e-15));

    // θv = 0.32 ≥ u = 0.2 puts the point in the first branch.
    let s = Copula::singular_nelsen(0.4).unwrap();
    assert!(close(s.cdf(0.2, 0.8).unwrap(), 0.2, 1e-15));
    // (1−θ)v = 0.54 ≥ 1−u = 0.1: second branch u+v−1.
    assert!(close(s.cdf(0.9, 0.9).unwrap(), 0.8, 1e-15));
    // Otherwise θv.
    assert!(close(s.cdf(0.5, 0.5).unwrap(), 0.2, 1e-15));

    // Archimedean closed form from the generator.
    let cl = Copula::clayton(2.0).unwrap();
    let want = (0.5f64.powi(-2) * 2.0 - 1.0).powf(-0.5);
    assert!(close(cl.cdf(0.5, 0.5).unwrap(), want, 1e-15));

    let gu = Copula::gumbel(2.0).unwrap();
    let l = -(0.3f64.ln());
    assert!(close(gu.cdf(0.3, 0.3).unwrap(), (-(2.0 * l * l).sqrt()).exp(), 1e-15));

    let fr = Copula::frechet(0.3, 0.2).unwrap();
    let (u, v) = (0.7, 0.6);
    assert!(close(fr.cdf(u, v).unwrap(), 0.3 * 0.6 + 0.2 * 0.3 + 0.5 * 0.42, 1e-15));
}

#[test]
fn student_t_cdf_against_orthant_identity() {
    // At (1/2, 1/2) every bivariate t copula equals 1/4 + asin(ρ)/(2π).
    for (nu, rho) in [(1.0, 0.3), (4.0, -0.6), (30.0, 0.9)] {
        let c = Copula::student_t(nu, rho).unwrap();
        let want = 0.25 + f64::asin(rho) / (2.0 * std::f64::consts::PI);
        assert!(close(c.cdf(0.5, 0.5).unwrap(), want, 1e-9), "nu={nu} rho={rho}");
    }
}

#[test]
fn domain_and_parameter_errors() {
    assert!(matches!(Copula::Independence.cdf(1.1, 0.5), Err(Error::Domain(_))));
    assert!(matches!(Copula::Independence.cdf(0.5, f64::NAN), Err(Error::Domain(_))));
    assert!(Copula::frechet(0.7, 0.4).is_err());
    assert!(Copula::marshall_olkin(0.0, 0.5).is_err());
    assert!(Copula::clayton(0.0).is_err());
    assert!(Copula::gumbel(0.9).is_err());
    assert!(Copula::singular_nelsen(1.2).is_err());
    assert!(Copula::student_t(3.0, 1.0).is_err());
    assert!(Copula::mixture(vec![0.5, 0.4], vec![Copula::Independence, Copula::Comonotone]).is_err());
    assert!(Copula::mixture(vec![1.5, -0.5], vec![Copula::Independence, Copula::Comonotone]).is_err());
}

#[test]
fn bounds_groundedness_and_margins() {
    let pts = unit_points(10_000, 1);
    for (name, c) in samplable_copulas() {
        let is_t = matches!(c, Copula::StudentT { .. });
        let tol = if is_t { 1e-9 } else { 1e-12 };
        let pts = if is_t { &pts[..200] } else { &pts[..] };
        for &(u, v) in pts {
            let x = c.cdf(u, v).unwrap();
            assert!(x >= (u + v - 1.0).max(0.0) - tol && x <= u.min(v) + tol, "{name} at ({u},{v}): {x}");
            assert!(c.cdf(u, 0.0).unwrap().abs() <= tol && c.cdf(0.0, v).unwrap().abs() <= tol, "{name} grounded");
            assert!(close(c.cdf(u, 1.0).unwrap(), u, tol) && close(c.cdf(1.0, v).unwrap(), v, tol), "{name} margins");
        }
    }
}

#[test]
fn two_increasing_on_random_rectangles() {
    let pts = unit_points(4000, 2);
    for (name, c) in samplable_copulas() {
        let n = if matches!(c, Copula::StudentT { .. }) { 100 } else { 2000 };
        for pair in pts.chunks(2).take(n) {
            let (u1, u2) = (pair[0].0.min(pair[1].0), pair[0].0.max(pair[1].0));
            let (v1, v2) = (pair[0].1.min(pair[1].1), pair[0].1.max(pair[1].1));
            let vol = c.cdf(u2, v2).unwrap() - c.cdf(u1, v2).unwrap() - c.cdf(u2, v1).unwrap() + c.cdf(u1, v1).unwrap();
            assert!(vol >= -1e-10, "{name}: volume {vol}");
        }
    }
}

#[test]
fn rotations() {
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let pi_s = Copula::Independence.rotate(Rotation::S1S2);
    let m_tau = Copula::Comonotone.rotate(Rotation::Tau);
    let mo = Copula::marshall_olkin(0.353, 0.75).unwrap();
    let mo_s = mo.clone().rotate(Rotation::S1S2);
    let cl = Copula::clayton(3.0).unwrap();
    let cl_twice = cl.clone().rotate(Rotation::S1).rotate(Rotation::S1);
    for &u in &grid {
        for &v in &grid {
            assert!(close(pi_s.cdf(u, v).unwrap(), u * v, 1e-15));
            assert!(close(m_tau.cdf(u, v).unwrap(), u.min(v), 1e-15));
            let ie = u + v - 1.0 + mo.cdf(1.0 - u, 1.0 - v).unwrap();
            assert!(close(mo_s.cdf(u, v).unwrap(), ie.max((u + v - 1.0).max(0.0)).min(u.min(v)), 1e-15));
            assert!(close(cl_twice.cdf(u, v).unwrap(), cl.cdf(u, v).unwrap(), 1e-12));
        }
    }
    // M on a 101 × 101 grid is invariant under τ.
    for i in 0..=100 {
        for j in 0..=100 {
            let (u, v) = (i as f64 / 100.0, j as f64 / 100.0);
            assert_eq!(m_tau.cdf(u, v).unwrap(), Copula::Comonotone.cdf(u, v).unwrap());
        }
    }
}

#[test]
fn rotated_samples_are_transformed_base_samples() {
    let base = Copula::clayton(2.0).unwrap();
    let b = base.sample(50, 5).unwrap();
    for (rot, f) in [
        (Rotation::S1, Box::new(|(u, v): (f64, f64)| (1.0 - u, v)) as Box<dyn Fn((f64, f64)) -> (f64, f64)>),
        (Rotation::S2, Box::new(|(u, v): (f64, f64)| (u, 1.0 - v))),
        (Rotation::Tau, Box::new(|(u, v): (f64, f64)| (v, u))),
        (Rotation::S1S2, Box::new(|(u, v): (f64, f64)| (1.0 - u, 1.0 - v))),
    ] {
        let r = base.clone().rotate(rot).sample(50, 5).unwrap();
        for (p, q) in b.iter().zip(&r) {
            assert_eq!(f(*p), *q);
        }
    }
}

#[test]
fn sampling_is_deterministic_and_in_range() {
    for (name, c) in samplable_copulas() {
        let a = c.sample(500, 11).unwrap();
        let b = c.sample(500, 11).unwrap();
        assert_eq!(a, b, "{name}");
        assert_ne!(a, c.sample(500, 12).unwrap(), "{name}");
        assert!(a.iter().all(|&(u, v)| (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)), "{name}");
    }
    let m = Copula::Comonotone.sample(3, 99).unwrap();
    assert!(m.iter().all(|p| p.0 == p.1));
    assert!(Copula::Independence.sample(0, 1).is_err());
}

#[test]
fn analytic_only_families_refuse_to_sample() {
    let ev = Copula::extreme_value(PickandsFunction::asym_gumbel(0.5, 0.8, 2.0).unwrap());
    let e = ev.clone().rotate(Rotation::S1S2).sample(10, 1).unwrap_err();
    assert!(matches!(e, Error::UnsupportedFamily(ref m) if m.contains("analytic-only")));
    let mix = Copula::mixture(vec![0.5, 0.5], vec![Copula::Independence, ev]).unwrap();
    assert!(mix.sample(10, 1).is_err());
}

/// Kolmogorov–Smirnov distance of a sample to U(0,1).
fn ks(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn sampler_matches_cdf_and_has_uniform_margins() {
    let n = 100_000;
    // 1% critical value of the KS statistic.
    let ks_crit = 1.628 / (n as f64).sqrt();
    let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
    for (name, c) in samplable_copulas() {
        let pts = c.sample(n, 2024).unwrap();
        assert!(ks(pts.iter().map(|p| p.0).collect()) < ks_crit, "{name}: u margin");
        assert!(ks(pts.iter().map(|p| p.1).collect()) < ks_crit, "{name}: v margin");
        for &u in &grid {
            for &v in &grid {
                let want = c.cdf(u, v).unwrap();
                let got = ecdf(&pts, u, v);
                let se = (want * (1.0 - want) / n as f64).sqrt();
                // Degenerate cells (C ∈ {0, 1}) must match exactly up to one point.
                let tol = (3.0 * se).max(1.5 / n as f64);
                assert!((got - want).abs() <= tol, "{name} at ({u},{v}): {got} vs {want}");
            }
        }
    }
}

#[test]
fn singular_mass_on_first_segment() {
    let theta = 0.3;
    let n = 100_000;
    let pts = Copula::singular_nelsen(theta).unwrap().sample(n, 8).unwrap();
    // Segment (0,0)–(θ,1) is u = θv.
    let on = pts.iter().filter(|p| (p.0 - theta * p.1).abs() < 1e-12).count() as f64 / n as f64;
    assert!((on - theta).abs() <= 3.0 * (theta * (1.0 - theta) / n as f64).sqrt(), "{on}");
}
