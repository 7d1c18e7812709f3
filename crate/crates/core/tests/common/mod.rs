#![allow(dead_code)]

use taildep::tdf::PickandsFunction;
use taildep::{Copula, Rotation, TailDependenceFunction as T};

/// One instance of every samplable copula family, plus a mixture and rotations.
pub fn samplable_copulas() -> Vec<(&'static str, Copula)> {
    vec![
        ("pi", Copula::Independence),
        ("m", Copula::Comonotone),
        ("w", Copula::Countermonotone),
        ("frechet", Copula::frechet(0.3, 0.2).unwrap()),
        ("mo", Copula::marshall_olkin(0.353, 0.75).unwrap()),
        ("clayton", Copula::clayton(2.0).unwrap()),
        ("gumbel", Copula::gumbel(1.7).unwrap()),
        ("singular", Copula::singular_nelsen(0.4).unwrap()),
        ("t", Copula::student_t(4.0, 0.5).unwrap()),
        (
            "mixture",
            Copula::mixture(vec![0.3, 0.7], vec![Copula::clayton(1.0).unwrap(), Copula::gumbel(2.0).unwrap()]).unwrap(),
        ),
        ("smo", Copula::marshall_olkin(0.4, 0.9).unwrap().rotate(Rotation::S1S2)),
        ("s1-clayton", Copula::clayton(1.5).unwrap().rotate(Rotation::S1)),
        ("tau-singular", Copula::singular_nelsen(0.25).unwrap().rotate(Rotation::Tau)),
    ]
}

/// Every analytic TDF family with representative parameters.
pub fn tdf_families() -> Vec<(&'static str, T)> {
    vec![
        ("zero", T::Zero),
        ("m", T::Comonotone),
        ("frechet", T::frechet(0.4).unwrap()),
        ("mo", T::marshall_olkin(0.353, 0.75).unwrap()),
        ("mo-swapped", T::marshall_olkin(0.9, 0.2).unwrap()),
        ("clayton", T::clayton(1.0).unwrap()),
        ("clayton-strong", T::clayton(5.0).unwrap()),
        ("sgumbel", T::survival_gumbel(2.0).unwrap()),
        ("singular", T::singular(0.3).unwrap()),
        ("t", T::student_t(4.0, 0.5).unwrap()),
        ("t-negative", T::student_t(2.5, -0.3).unwrap()),
        ("sev-gumbel", T::SurvivalEvTail { pickands: PickandsFunction::asym_gumbel(0.75, 0.35, 2.0).unwrap() }),
        ("sev-tabulated", T::SurvivalEvTail { pickands: tabulated_a() }),
        ("asym-gumbel", T::asym_gumbel(0.75, 0.35, 3.0).unwrap()),
        ("asym-galambos", T::asym_galambos(0.35, 0.75, 1.5).unwrap()),
        (
            "mixture",
            T::mixture(vec![0.6, 0.4], vec![T::singular(0.1).unwrap(), T::transposed(T::singular(0.4).unwrap())]).unwrap(),
        ),
        ("transposed-mo", T::transposed(T::marshall_olkin(0.2, 0.6).unwrap())),
    ]
}

/// A convex, asymmetric tabulated Pickands function with four linear pieces.
pub fn tabulated_a() -> PickandsFunction {
    let w = vec![0.0, 0.2, 0.5, 0.7, 1.0];
    let a = vec![1.0, 0.85, 0.7, 0.75, 1.0];
    PickandsFunction::tabulated(w, a).unwrap()
}

/// Deterministic pseudo-random points in (0,1)² from a small LCG, so the
/// tests do not depend on the library's own RNG.
pub fn unit_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    };
    (0..n).map(|_| (next(), next())).collect()
}

/// Empirical CDF of `pts` at (u, v).
pub fn ecdf(pts: &[(f64, f64)], u: f64, v: f64) -> f64 {
    pts.iter().filter(|p| p.0 <= u && p.1 <= v).count() as f64 / pts.len() as f64
}

/// Composite Simpson rule with `n` (even) panels, an oracle independent of
/// the library's adaptive quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Simpson on each piece between the given breakpoints.
pub fn simpson_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], n: usize) -> f64 {
    breaks.windows(2).map(|w| simpson(&f, w[0], w[1], n)).sum()
}

/// Student t CDF by Simpson quadrature of the density over (−∞, x], mapped
/// onto [0, 1); independent of the statrs CDF used by the library.
pub fn t_cdf(x: f64, nu: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let c = (ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0)).exp() / (nu * std::f64::consts::PI).sqrt();
    let pdf = |t: f64| c * (1.0 + t * t / nu).powf(-(nu + 1.0) / 2.0);
    // Substitute t = x − s/(1−s) to integrate over (−∞, x].
    let g = |s: f64| {
        if s >= 1.0 {
            0.0
        } else {
            let d = 1.0 - s;
            pdf(x - s / d) / (d * d)
        }
    };
    simpson(g, 0.0, 1.0, 20_000)
}
