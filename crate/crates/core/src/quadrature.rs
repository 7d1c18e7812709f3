//! Adaptive Simpson quadrature and golden-section search.

use crate::error::{Error, Result};

pub const ABS_TOL: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;

/// Initial subpanels per breakpoint interval, so that a lucky agreement of
/// the coarse Simpson estimates cannot end the recursion prematurely.
const INITIAL_PANELS: usize = 4;

struct Acc {
    unconverged: bool,
    bound: f64,
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut Acc,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        acc.bound += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    if depth == 0 || lm <= a || rm >= b {
        acc.unconverged = true;
        acc.bound += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    recurse(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, acc)
        + recurse(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, acc)
}

/// ∫_a^b f with absolute tolerance `tol`; `breaks` are inserted as panel
/// boundaries (points outside (a, b) are ignored).
pub fn integrate_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut nodes = vec![a, b];
    nodes.extend(breaks.iter().copied().filter(|&x| x > a && x < b && x.is_finite()));
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    nodes.dedup();

    let mut acc = Acc { unconverged: false, bound: 0.0 };
    let mut total = 0.0;
    let len = b - a;
    for w in nodes.windows(2) {
        let h = (w[1] - w[0]) / INITIAL_PANELS as f64;
        for i in 0..INITIAL_PANELS {
            let lo = w[0] + h * i as f64;
            let hi = if i + 1 == INITIAL_PANELS { w[1] } else { lo + h };
            let mid = 0.5 * (lo + hi);
            let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            let panel_tol = tol * (hi - lo) / len;
            total += recurse(&f, lo, flo, mid, fmid, hi, fhi, whole, panel_tol, MAX_DEPTH, &mut acc);
        }
    }
    if acc.unconverged && acc.bound > tol {
        return Err(Error::Quadrature { bound: acc.bound });
    }
    Ok(total)
}

/// ∫_a^b f to [`ABS_TOL`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64]) -> Result<f64> {
    integrate_tol(f, a, b, breaks, ABS_TOL)
}

/// Maximise a unimodal `f` on [a, b]; returns (argmax, max).
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, &[]).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn kink_with_breakpoint() {
        let v = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3]).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn kink_without_breakpoint() {
        let v = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[]).unwrap();
        assert!((v - 0.29).abs() < 1e-10);
    }

    #[test]
    fn discontinuity_reports_bound() {
        let r = integrate_tol(|x: f64| if x < 1.0 / 3.0 { 0.0 } else { 1e6 }, 0.0, 1.0, &[], 1e-14);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn golden_section() {
        let (x, fx) = golden_max(|x| -(x - 0.7) * (x - 0.7), 0.0, 2.0, 1e-10);
        assert!((x - 0.7).abs() < 1e-6 && fx.abs() < 1e-12);
    }
}
