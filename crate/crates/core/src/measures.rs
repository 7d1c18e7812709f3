//! Generating measures and the tail dependence measures built from them.
//!
//! The μ-tail dependence measure is λ_μ(Λ) = ∫Λ dμ / ∫M dμ. It is computed
//! either by integrating Λ against μ directly ([`mu_tdm`]) or through the
//! margin slices Λ₁, Λ₂ alone ([`mu_tdm_radial`]).

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::copulas::Copula;
use crate::error::{check, Error, Result};
use crate::quadrature::{golden_max, integrate, integrate_tol, ABS_TOL};
use crate::tdf::TailFunction;

/// Default half-size of the b-grid and of the empirical evaluation grid.
pub const DEFAULT_L: usize = 100;
/// Default floor of the analytic λ̄ grid.
pub const DEFAULT_T_MIN_ANALYTIC: f64 = 1e-4;
/// Values within this distance of the maximum belong to the argmax set.
pub const ARGMAX_TOL: f64 = 1e-9;

/// Law of a radius r ∈ (0,1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialDensity {
    Uniform,
    /// P(r ≤ x) = x^m.
    Monomial { m: f64 },
}

impl RadialDensity {
    fn check(&self) -> Result<()> {
        match self {
            Self::Uniform => Ok(()),
            Self::Monomial { m } => check(*m > 0.0 && m.is_finite(), || format!("monomial exponent must be > 0, got {m}")),
        }
    }

    fn exponent(&self) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::Monomial { m } => *m,
        }
    }

    /// E[r].
    pub fn mean(&self) -> f64 {
        let m = self.exponent();
        m / (m + 1.0)
    }

    /// ∫ g dF over (0,1], via r = x^{1/m}.
    fn integrate<F: Fn(f64) -> f64>(&self, g: F, breaks: &[f64], tol: f64) -> Result<f64> {
        let m = self.exponent();
        if m == 1.0 {
            integrate_tol(g, 0.0, 1.0, breaks, tol)
        } else {
            let xb: Vec<f64> = breaks.iter().map(|r| r.powf(m)).collect();
            integrate_tol(|x: f64| g(x.powf(1.0 / m)), 0.0, 1.0, &xb, tol)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurePart {
    /// Point mass at (u₀,v₀) ∈ (0,1]².
    Atom { u0: f64, v0: f64 },
    UniformSquare,
    /// Uniform on the diagonal: the measure induced by M.
    DiagonalUniform,
    /// Uniform on the antidiagonal: the measure induced by W.
    AntidiagonalUniform,
    /// r·(e_u, e_v) with (e_u, e_v) = (min(1,1/a), a·min(1,1/a)) and r ~ density.
    LineSegment { slope: f64, density: RadialDensity },
    /// Independent U, V with P(U ≤ x) = x^{m₁}, P(V ≤ y) = y^{m₂}.
    MonomialProduct { m1: f64, m2: f64 },
}

impl MeasurePart {
    fn check(&self) -> Result<()> {
        match self {
            Self::Atom { u0, v0 } => check(*u0 > 0.0 && *u0 <= 1.0 && *v0 > 0.0 && *v0 <= 1.0, || {
                format!("atom must lie in (0,1]^2, got ({u0}, {v0})")
            }),
            Self::LineSegment { slope, density } => {
                check(*slope > 0.0 && slope.is_finite(), || format!("line slope must be in (0,inf), got {slope}"))?;
                density.check()
            }
            Self::MonomialProduct { m1, m2 } => check(*m1 > 0.0 && *m2 > 0.0 && m1.is_finite() && m2.is_finite(), || {
                format!("monomial exponents must be > 0, got ({m1}, {m2})")
            }),
            _ => Ok(()),
        }
    }

    fn line_end(slope: f64) -> (f64, f64) {
        let s = 1f64.min(1.0 / slope);
        (s, slope * s)
    }
}

/// A finite mixture of [`MeasurePart`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingMeasure {
    components: Vec<(f64, MeasurePart)>,
}

impl GeneratingMeasure {
    pub fn new(components: Vec<(f64, MeasurePart)>) -> Result<Self> {
        let weights: Vec<f64> = components.iter().map(|c| c.0).collect();
        crate::tdf::check_weights(&weights, components.len())?;
        for (_, p) in &components {
            p.check()?;
        }
        Ok(Self { components })
    }

    pub fn single(part: MeasurePart) -> Result<Self> {
        Self::new(vec![(1.0, part)])
    }

    pub fn atom(u0: f64, v0: f64) -> Result<Self> {
        Self::single(MeasurePart::Atom { u0, v0 })
    }

    pub fn uniform_square() -> Self {
        Self { components: vec![(1.0, MeasurePart::UniformSquare)] }
    }

    pub fn diagonal() -> Self {
        Self { components: vec![(1.0, MeasurePart::DiagonalUniform)] }
    }

    pub fn antidiagonal() -> Self {
        Self { components: vec![(1.0, MeasurePart::AntidiagonalUniform)] }
    }

    /// w·Diagonal + (1−w)·Antidiagonal; w = 1/2 generates tail Gini's gamma.
    pub fn diagonal_mix(w: f64) -> Result<Self> {
        check((0.0..=1.0).contains(&w), || format!("mixing weight must be in [0,1], got {w}"))?;
        Self::new(vec![(w, MeasurePart::DiagonalUniform), (1.0 - w, MeasurePart::AntidiagonalUniform)])
    }

    pub fn line(slope: f64, density: RadialDensity) -> Result<Self> {
        Self::single(MeasurePart::LineSegment { slope, density })
    }

    pub fn monomial_product(m1: f64, m2: f64) -> Result<Self> {
        Self::single(MeasurePart::MonomialProduct { m1, m2 })
    }

    pub fn components(&self) -> &[(f64, MeasurePart)] {
        &self.components
    }
}

/// ∫ f dμ.
pub fn integrate_measure<F: Fn(f64, f64) -> f64>(mu: &GeneratingMeasure, f: F) -> Result<f64> {
    integrate_piecewise(mu, f, &[1.0])
}

/// ∫ f dμ where f may be non-differentiable along the rays v = s·u, s ∈ `kinks`.
pub fn integrate_piecewise<F: Fn(f64, f64) -> f64>(mu: &GeneratingMeasure, f: F, kinks: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (w, part) in &mu.components {
        if *w == 0.0 {
            continue;
        }
        total += w * integrate_part(part, &f, kinks)?;
    }
    Ok(total)
}

fn integrate_part<F: Fn(f64, f64) -> f64>(part: &MeasurePart, f: &F, kinks: &[f64]) -> Result<f64> {
    match part {
        MeasurePart::Atom { u0, v0 } => Ok(f(*u0, *v0)),
        MeasurePart::DiagonalUniform => integrate(|s| f(s, s), 0.0, 1.0, &[]),
        MeasurePart::AntidiagonalUniform => {
            let breaks: Vec<f64> = kinks.iter().map(|s| 1.0 / (1.0 + s)).collect();
            integrate(|u| f(u, 1.0 - u), 0.0, 1.0, &breaks)
        }
        MeasurePart::LineSegment { slope, density } => {
            let (eu, ev) = MeasurePart::line_end(*slope);
            density.integrate(|r| f(r * eu, r * ev), &[], ABS_TOL)
        }
        MeasurePart::UniformSquare => tensor(f, 1.0, 1.0, kinks),
        MeasurePart::MonomialProduct { m1, m2 } => tensor(f, *m1, *m2, kinks),
    }
}

/// ∫∫ f(x^{1/m₁}, y^{1/m₂}) dy dx with kink rays mapped to panel breaks.
fn tensor<F: Fn(f64, f64) -> f64>(f: &F, m1: f64, m2: f64, kinks: &[f64]) -> Result<f64> {
    let inner_err: Cell<Option<Error>> = Cell::new(None);
    let to_u = |x: f64| if m1 == 1.0 { x } else { x.powf(1.0 / m1) };
    let to_v = |y: f64| if m2 == 1.0 { y } else { y.powf(1.0 / m2) };
    let inner = |x: f64| {
        let u = to_u(x);
        let breaks: Vec<f64> = kinks.iter().map(|s| s * u).filter(|&v| v < 1.0).map(|v| v.powf(m2)).collect();
        match integrate_tol(|y| f(u, to_v(y)), 0.0, 1.0, &breaks, ABS_TOL / 10.0) {
            Ok(v) => v,
            Err(e) => {
                inner_err.set(Some(e));
                0.0
            }
        }
    };
    let outer_breaks: Vec<f64> = kinks.iter().filter(|&&s| s > 1.0).map(|s| (1.0 / s).powf(m1)).collect();
    let v = integrate(inner, 0.0, 1.0, &outer_breaks)?;
    match inner_err.take() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

fn kinks_with_diagonal<T: TailFunction + ?Sized>(tdf: &T) -> Vec<f64> {
    let mut k = tdf.kink_slopes();
    k.push(1.0);
    k
}

/// λ_μ(Λ) = ∫Λ dμ / ∫M dμ by direct integration against μ.
pub fn mu_tdm<T: TailFunction + ?Sized>(tdf: &T, mu: &GeneratingMeasure) -> Result<f64> {
    let kinks = kinks_with_diagonal(tdf);
    let num = integrate_piecewise(mu, |u, v| tdf.eval(u, v), &kinks)?;
    let den = integrate_piecewise(mu, |u: f64, v: f64| u.min(v), &[1.0])?;
    Ok(num / den)
}

/// ∫M dμ in closed form.
pub fn integral_of_m(mu: &GeneratingMeasure) -> f64 {
    mu.components
        .iter()
        .map(|(w, part)| {
            w * match part {
                MeasurePart::Atom { u0, v0 } => u0.min(*v0),
                MeasurePart::DiagonalUniform => 0.5,
                MeasurePart::AntidiagonalUniform => 0.25,
                MeasurePart::LineSegment { slope, density } => {
                    let (eu, ev) = MeasurePart::line_end(*slope);
                    density.mean() * eu.min(ev)
                }
                MeasurePart::UniformSquare => 1.0 / 3.0,
                MeasurePart::MonomialProduct { m1, m2 } => {
                    m1 * m2 / (m1 + m2 + 1.0) * (1.0 / (m1 + 1.0) + 1.0 / (m2 + 1.0))
                }
            }
        })
        .sum()
}

/// Kinks of Λ₁ and Λ₂ on (0,1) implied by the kink rays of Λ.
fn margin_breaks<T: TailFunction + ?Sized>(tdf: &T) -> (Vec<f64>, Vec<f64>) {
    let k = tdf.kink_slopes();
    let b1 = k.iter().filter(|&&s| s > 1.0).map(|s| 1.0 / s).collect();
    let b2 = k.iter().filter(|&&s| s < 1.0).copied().collect();
    (b1, b2)
}

/// λ_μ(Λ) through the L∞-radial representation: only Λ₁ and Λ₂ are
/// evaluated, and ∫M dμ is taken in closed form.
pub fn mu_tdm_radial<T: TailFunction + ?Sized>(tdf: &T, mu: &GeneratingMeasure) -> Result<f64> {
    let (b1, b2) = margin_breaks(tdf);
    let mut num = 0.0;
    for (w, part) in &mu.components {
        let val = match part {
            MeasurePart::Atom { u0, v0 } => {
                if u0 <= v0 {
                    v0 * tdf.lambda1(u0 / v0)
                } else {
                    u0 * tdf.lambda2(v0 / u0)
                }
            }
            MeasurePart::DiagonalUniform => 0.5 * tdf.lambda1(1.0),
            MeasurePart::AntidiagonalUniform => {
                let j = |t: f64| (1.0 + t).powi(-3);
                integrate(|t| tdf.lambda1(t) * j(t), 0.0, 1.0, &b1)?
                    + integrate(|t| tdf.lambda2(t) * j(t), 0.0, 1.0, &b2)?
            }
            MeasurePart::LineSegment { slope, density } => {
                let edge = if *slope <= 1.0 { tdf.lambda2(*slope) } else { tdf.lambda1(1.0 / slope) };
                density.mean() * edge
            }
            MeasurePart::UniformSquare => radial_monomial(tdf, 1.0, 1.0, &b1, &b2)?,
            MeasurePart::MonomialProduct { m1, m2 } => radial_monomial(tdf, *m1, *m2, &b1, &b2)?,
        };
        num += w * val;
    }
    Ok(num / integral_of_m(mu))
}

/// (m₁m₂/(m₁+m₂+1))·∫₀¹ {Λ₁(t)t^{m₁−1} + Λ₂(t)t^{m₂−1}} dt.
fn radial_monomial<T: TailFunction + ?Sized>(tdf: &T, m1: f64, m2: f64, b1: &[f64], b2: &[f64]) -> Result<f64> {
    Ok(m1 * m2 / (m1 + m2 + 1.0) * weighted_margin_integral(tdf, m1, m2, b1, b2)?)
}

/// ∫₀¹ {Λ₁(t)t^{m₁−1} + Λ₂(t)t^{m₂−1}} dt, written as Λᵢ⋆(t)·t^{mᵢ} so the
/// integrand stays bounded for mᵢ < 1.
fn weighted_margin_integral<T: TailFunction + ?Sized>(tdf: &T, m1: f64, m2: f64, b1: &[f64], b2: &[f64]) -> Result<f64> {
    let g1 = |t: f64| if t <= 0.0 { 0.0 } else { tdf.lambda1_star(t) * t.powf(m1) };
    let g2 = |t: f64| if t <= 0.0 { 0.0 } else { tdf.lambda2_star(t) * t.powf(m2) };
    Ok(integrate(g1, 0.0, 1.0, b1)? + integrate(g2, 0.0, 1.0, b2)?)
}

/// λ_{μ,p}(C) = ∫(C−Π)(pu,pv) dμ / ∫(M−Π)(pu,pv) dμ.
pub fn mu_tdm_at_level_p(c: &Copula, mu: &GeneratingMeasure, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("level p must lie in (0,1), got {p}")));
    }
    let num = integrate_measure(mu, |u, v| c.cdf_unchecked(p * u, p * v) - p * p * u * v)?;
    let den = integrate_measure(mu, |u: f64, v: f64| p * u.min(v) - p * p * u * v)?;
    if den <= 0.0 {
        return Err(Error::InvalidParameter("generating measure has zero denominator".into()));
    }
    Ok(num / den)
}

/// λ = Λ(1,1).
pub fn tdc<T: TailFunction + ?Sized>(tdf: &T) -> f64 {
    tdf.eval(1.0, 1.0)
}

/// Λ(u₀,v₀)/min(u₀,v₀) for (u₀,v₀) ∈ (0,1]².
pub fn gtdc<T: TailFunction + ?Sized>(tdf: &T, u0: f64, v0: f64) -> Result<f64> {
    if !(u0 > 0.0 && u0 <= 1.0 && v0 > 0.0 && v0 <= 1.0) {
        return Err(Error::Domain(format!("GTDC needs (u0, v0) in (0,1]^2, got ({u0}, {v0})")));
    }
    Ok(tdf.eval(u0, v0) / u0.min(v0))
}

/// λ_S = ∫₀¹ (Λ(t,1) + Λ(1,t)) dt.
pub fn tail_spearman<T: TailFunction + ?Sized>(tdf: &T) -> Result<f64> {
    let (b1, b2) = margin_breaks(tdf);
    Ok(integrate(|t| tdf.lambda1(t), 0.0, 1.0, &b1)? + integrate(|t| tdf.lambda2(t), 0.0, 1.0, &b2)?)
}

fn antidiagonal_integral<T: TailFunction + ?Sized>(tdf: &T, density: RadialDensity) -> Result<f64> {
    let breaks: Vec<f64> = tdf.kink_slopes().iter().map(|s| 1.0 / (1.0 + s)).collect();
    density.integrate(|u| tdf.eval(u, 1.0 - u), &breaks, ABS_TOL)
}

/// λ_G = (2/3)(Λ(1,1) + 2∫₀¹ Λ(u,1−u) du).
pub fn tail_gini<T: TailFunction + ?Sized>(tdf: &T) -> Result<f64> {
    Ok(2.0 / 3.0 * (tdf.eval(1.0, 1.0) + 2.0 * antidiagonal_integral(tdf, RadialDensity::Uniform)?))
}

/// Weighted tail Gini: the diagonal carries weight w with the law μ₁ of the
/// diagonal coordinate, the antidiagonal weight 1−w with the law μ₂ of u.
pub fn tail_gini_w<T: TailFunction + ?Sized>(tdf: &T, w: f64, mu1: RadialDensity, mu2: RadialDensity) -> Result<f64> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::Domain(format!("gini_w weight must lie in [0,1], got {w}")));
    }
    mu1.check()?;
    mu2.check()?;
    let e1 = mu1.mean();
    let anti = antidiagonal_integral(tdf, mu2)?;
    let anti_m = mu2.integrate(|u| u.min(1.0 - u), &[0.5], ABS_TOL)?;
    Ok((w * tdf.eval(1.0, 1.0) * e1 + (1.0 - w) * anti) / (w * e1 + (1.0 - w) * anti_m))
}

/// ((m₁+1)(m₂+1)/(m₁+m₂+2))·∫₀¹ {Λ(t,1)t^{m₁−1} + Λ(1,t)t^{m₂−1}} dt.
pub fn polynomial_tdm<T: TailFunction + ?Sized>(tdf: &T, m1: f64, m2: f64) -> Result<f64> {
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(Error::Domain(format!("polynomial exponents must be > 0, got ({m1}, {m2})")));
    }
    let (b1, b2) = margin_breaks(tdf);
    Ok((m1 + 1.0) * (m2 + 1.0) / (m1 + m2 + 2.0) * weighted_margin_integral(tdf, m1, m2, &b1, &b2)?)
}

/// a(μ) = ∫max dμ / ∫min dμ.
pub fn coefficient_a(mu: &GeneratingMeasure) -> Result<f64> {
    let num = integrate_measure(mu, |u: f64, v: f64| u.max(v))?;
    let den = integrate_measure(mu, |u: f64, v: f64| u.min(v))?;
    Ok(num / den)
}

/// True when some component is known to put mass arbitrarily close to the
/// diagonal away from the origin (atoms on the diagonal, the diagonal, the
/// slope-1 line). A sufficient check only: `false` means "not established".
pub fn touches_diagonal(mu: &GeneratingMeasure) -> bool {
    mu.components.iter().any(|(w, part)| {
        *w > 0.0
            && match part {
                MeasurePart::Atom { u0, v0 } => u0 == v0,
                MeasurePart::DiagonalUniform => true,
                MeasurePart::LineSegment { slope, .. } => *slope == 1.0,
                _ => false,
            }
    })
}

/// {1/L, 2/L, …, 1, L/(L−1), …, L}.
pub fn default_b_grid(l: usize) -> Vec<f64> {
    let l = l.max(1);
    let mut g: Vec<f64> = (1..=l).map(|i| i as f64 / l as f64).collect();
    g.extend((1..l).rev().map(|j| l as f64 / j as f64));
    g
}

/// `points` geometrically spaced values from 1 down to `t_min`.
pub fn geometric_t_grid(t_min: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    let lmin = t_min.ln();
    let mut g: Vec<f64> = (0..points).map(|i| (lmin * i as f64 / (points - 1) as f64).exp()).collect();
    g[points - 1] = t_min;
    g
}

/// The analytic λ̄ grid: 400 geometric points from 1 to `t_min`.
pub fn analytic_t_grid(t_min: f64) -> Vec<f64> {
    geometric_t_grid(t_min, 400)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiBar {
    pub value: f64,
    /// Every evaluated b within [`ARGMAX_TOL`] of the maximum, ascending.
    pub argmax: Vec<f64>,
}

impl ChiBar {
    /// m̄ = sup{min(b, 1/b) : b in the argmax set}.
    pub fn m_bar(&self) -> f64 {
        self.argmax.iter().map(|&b| b.min(1.0 / b)).fold(0.0, f64::max)
    }

    /// χ̄⋆ = χ̄ / m̄.
    pub fn chi_star(&self) -> f64 {
        if self.value <= 0.0 {
            0.0
        } else {
            self.value / self.m_bar()
        }
    }
}

/// χ̄ = max_b Λ(b, 1/b) over `grid`, augmented with the kink directions of
/// Λ inside the grid range; smooth Λ get one golden-section pass around the
/// best grid point.
pub fn chi_bar<T: TailFunction + ?Sized>(tdf: &T, grid: &[f64]) -> ChiBar {
    let mut pts: Vec<f64> = grid.iter().copied().filter(|b| *b > 0.0 && b.is_finite()).collect();
    if pts.is_empty() {
        return ChiBar { value: 0.0, argmax: Vec::new() };
    }
    let lo = pts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pts.iter().copied().fold(0.0, f64::max);
    for s in tdf.kink_slopes() {
        let b = 1.0 / s.sqrt();
        if b >= lo && b <= hi {
            pts.push(b);
        }
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let phi = |b: f64| tdf.eval(b, 1.0 / b);
    let mut vals: Vec<(f64, f64)> = pts.iter().map(|&b| (b, phi(b))).collect();
    let best = vals.iter().enumerate().fold(0, |bi, (i, v)| if v.1 > vals[bi].1 { i } else { bi });
    if !tdf.piecewise_linear() && vals.len() > 1 {
        let a = vals[best.saturating_sub(1)].0;
        let b = vals[(best + 1).min(vals.len() - 1)].0;
        let (x, fx) = golden_max(phi, a, b, 1e-12 * b.max(1.0));
        if fx > vals[best].1 {
            vals.push((x, fx));
        }
    }
    let value = vals.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let mut argmax: Vec<f64> = vals.iter().filter(|v| v.1 >= value - ARGMAX_TOL).map(|v| v.0).collect();
    argmax.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ChiBar { value, argmax }
}

/// χ̄⋆ = χ̄ / m̄.
pub fn chi_star<T: TailFunction + ?Sized>(tdf: &T, grid: &[f64]) -> f64 {
    chi_bar(tdf, grid).chi_star()
}

/// Grid value of λ̄, a lower bound for the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaBar {
    pub value: f64,
    pub t_min: f64,
}

/// max over the grid of Λ⋆(t).
pub fn lambda_bar<T: TailFunction + ?Sized>(tdf: &T, t_grid: &[f64]) -> Result<LambdaBar> {
    let t_min = t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    if t_grid.is_empty() || t_min.is_nan() || t_min <= 0.0 {
        return Err(Error::Domain("lambda_bar grid must be nonempty and positive".into()));
    }
    let value = t_grid.iter().map(|&t| tdf.lambda_star(t)).fold(0.0, f64::max);
    Ok(LambdaBar { value, t_min })
}

/// (χ_φ, κ_φ) = (Λ(b,1/b), Λ(b,1/b)/min(b,1/b)) for a path with φ′(0+) = b.
pub fn phi_tdc<T: TailFunction + ?Sized>(tdf: &T, b: f64) -> Result<(f64, f64)> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!("path slope must lie in (0,inf), got {b}")));
    }
    let chi = tdf.eval(b, 1.0 / b);
    Ok((chi, chi / b.min(1.0 / b)))
}

/// A measure addressed by name: `tdc`, `gtdc:u0,v0`, `spearman`, `gini`,
/// `gini_w:w`, `poly:m1,m2`, `line:a`, `chi_bar`, `chi_star`, `lambda_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureSpec {
    Tdc,
    Gtdc(f64, f64),
    Spearman,
    Gini,
    GiniW(f64),
    Poly(f64, f64),
    Line(f64),
    ChiBar,
    ChiStar,
    LambdaBar,
}

impl MeasureSpec {
    /// The six measures of the simulation study.
    pub const TABLE: [MeasureSpec; 6] = [
        MeasureSpec::Tdc,
        MeasureSpec::Gini,
        MeasureSpec::Spearman,
        MeasureSpec::ChiBar,
        MeasureSpec::ChiStar,
        MeasureSpec::LambdaBar,
    ];

    pub fn name(&self) -> String {
        match self {
            Self::Tdc => "tdc".into(),
            Self::Gtdc(u, v) => format!("gtdc:{u},{v}"),
            Self::Spearman => "spearman".into(),
            Self::Gini => "gini".into(),
            Self::GiniW(w) => format!("gini_w:{w}"),
            Self::Poly(a, b) => format!("poly:{a},{b}"),
            Self::Line(a) => format!("line:{a}"),
            Self::ChiBar => "chi_bar".into(),
            Self::ChiStar => "chi_star".into(),
            Self::LambdaBar => "lambda_bar".into(),
        }
    }

    /// Generating measure of a μ-TDM; `None` for the maximal-type measures.
    pub fn generating_measure(&self) -> Result<Option<GeneratingMeasure>> {
        Ok(Some(match self {
            Self::Tdc => GeneratingMeasure::atom(1.0, 1.0)?,
            Self::Gtdc(u, v) => GeneratingMeasure::atom(*u, *v)?,
            Self::Spearman => GeneratingMeasure::uniform_square(),
            Self::Gini => GeneratingMeasure::diagonal_mix(0.5)?,
            Self::GiniW(w) => GeneratingMeasure::diagonal_mix(*w)?,
            Self::Poly(a, b) => GeneratingMeasure::monomial_product(*a, *b)?,
            Self::Line(a) => GeneratingMeasure::line(*a, RadialDensity::Uniform)?,
            Self::ChiBar | Self::ChiStar | Self::LambdaBar => return Ok(None),
        }))
    }
}

impl std::fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

impl std::str::FromStr for MeasureSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let unknown = || Error::UnknownMeasure(s.to_string());
        let nums = |n: usize| -> Result<Vec<f64>> {
            let a = args.ok_or_else(unknown)?;
            let v: Vec<f64> = a.split(',').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| unknown())?;
            if v.len() != n || v.iter().any(|x| !x.is_finite()) {
                return Err(unknown());
            }
            Ok(v)
        };
        let spec = match head {
            "tdc" if args.is_none() => Self::Tdc,
            "spearman" if args.is_none() => Self::Spearman,
            "gini" if args.is_none() => Self::Gini,
            "chi_bar" if args.is_none() => Self::ChiBar,
            "chi_star" if args.is_none() => Self::ChiStar,
            "lambda_bar" if args.is_none() => Self::LambdaBar,
            "gtdc" => {
                let v = nums(2)?;
                if !(v[0] > 0.0 && v[0] <= 1.0 && v[1] > 0.0 && v[1] <= 1.0) {
                    return Err(Error::Domain(format!("gtdc needs (u0, v0) in (0,1]^2, got {s}")));
                }
                Self::Gtdc(v[0], v[1])
            }
            "gini_w" => {
                let v = nums(1)?;
                if !(0.0..=1.0).contains(&v[0]) {
                    return Err(Error::Domain(format!("gini_w weight must lie in [0,1], got {s}")));
                }
                Self::GiniW(v[0])
            }
            "poly" => {
                let v = nums(2)?;
                if !(v[0] > 0.0 && v[1] > 0.0) {
                    return Err(Error::Domain(format!("poly exponents must be > 0, got {s}")));
                }
                Self::Poly(v[0], v[1])
            }
            "line" => {
                let v = nums(1)?;
                if v[0] <= 0.0 {
                    return Err(Error::Domain(format!("line slope must be > 0, got {s}")));
                }
                Self::Line(v[0])
            }
            _ => return Err(unknown()),
        };
        Ok(spec)
    }
}

/// Closed-route value of a named measure for an analytic Λ. `t_min` is the
/// floor of the λ̄ grid, `l` sets the b-grid.
pub fn evaluate<T: TailFunction + ?Sized>(tdf: &T, spec: MeasureSpec, t_min: f64, l: usize) -> Result<f64> {
    Ok(match spec {
        MeasureSpec::Tdc => tdc(tdf),
        MeasureSpec::Gtdc(u, v) => gtdc(tdf, u, v)?,
        MeasureSpec::Spearman => tail_spearman(tdf)?,
        MeasureSpec::Gini => tail_gini(tdf)?,
        MeasureSpec::GiniW(w) => tail_gini_w(tdf, w, RadialDensity::Uniform, RadialDensity::Uniform)?,
        MeasureSpec::Poly(a, b) => polynomial_tdm(tdf, a, b)?,
        MeasureSpec::Line(a) => mu_tdm_radial(tdf, &GeneratingMeasure::line(a, RadialDensity::Uniform)?)?,
        MeasureSpec::ChiBar => chi_bar(tdf, &default_b_grid(l)).value,
        MeasureSpec::ChiStar => chi_star(tdf, &default_b_grid(l)),
        MeasureSpec::LambdaBar => lambda_bar(tdf, &analytic_t_grid(t_min))?.value,
    })
}
