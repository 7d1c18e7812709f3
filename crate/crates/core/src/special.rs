//! Student t distribution helpers.

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::gamma::ln_gamma;

fn dist(nu: f64) -> StudentsT {
    StudentsT::new(0.0, 1.0, nu).expect("nu > 0")
}

/// T_ν(x), via the regularized incomplete beta function.
pub fn t_cdf(x: f64, nu: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    dist(nu).cdf(x)
}

pub fn t_pdf(x: f64, nu: f64) -> f64 {
    let ln_c = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln();
    (ln_c - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()).exp()
}

/// T_ν^{-1}(p), polished with Newton steps on the cdf.
pub fn t_quantile(p: f64, nu: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p == 0.5 {
        return 0.0;
    }
    // Work in the lower half for accuracy.
    let (q, sign) = if p > 0.5 { (1.0 - p, 1.0) } else { (p, -1.0) };
    let mut x = -dist(nu).inverse_cdf(q).abs();
    for _ in 0..4 {
        let f = t_cdf(x, nu) - q;
        let d = t_pdf(x, nu);
        if d <= 0.0 || !d.is_finite() {
            break;
        }
        let step = f / d;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    sign * x.abs()
}
