//! Parametric bivariate copulas.
//!
//! Samplers are exact constructions: gamma frailty for Clayton, positive
//! stable frailty (Chambers–Mallows–Stuck) for Gumbel, exponential shocks
//! for Marshall–Olkin, a normal/χ² mixture for t. Extreme-value copulas are
//! analytic-only.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::quadrature;
use crate::rng;
use crate::special::{t_cdf, t_quantile};
use crate::tdf::{check_weights, PickandsFunction, TailDependenceFunction, TailFunction};

/// Element of the D4 subgroup acting on (U,V): σ₁ flips U, σ₂ flips V, τ
/// swaps the coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    S1,
    S2,
    Tau,
    S1S2,
}

impl std::str::FromStr for Rotation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s1" | "sigma1" => Ok(Self::S1),
            "s2" | "sigma2" => Ok(Self::S2),
            "tau" => Ok(Self::Tau),
            "s1s2" | "survival" => Ok(Self::S1S2),
            _ => Err(Error::InvalidParameter(format!("unknown rotation '{s}' (s1, s2, tau, s1s2)"))),
        }
    }
}

/// (X,Y) = swap?(flip_u?(U), flip_v?(V)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct View {
    flip_u: bool,
    flip_v: bool,
    swap: bool,
}

impl View {
    const ID: View = View { flip_u: false, flip_v: false, swap: false };

    fn of(r: Rotation) -> View {
        match r {
            Rotation::S1 => View { flip_u: true, flip_v: false, swap: false },
            Rotation::S2 => View { flip_u: false, flip_v: true, swap: false },
            Rotation::Tau => View { flip_u: false, flip_v: false, swap: true },
            Rotation::S1S2 => View { flip_u: true, flip_v: true, swap: false },
        }
    }

    /// `self` applied after `g`.
    fn after(self, g: View) -> View {
        if g.swap {
            View { flip_u: g.flip_u ^ self.flip_v, flip_v: g.flip_v ^ self.flip_u, swap: !self.swap }
        } else {
            View { flip_u: g.flip_u ^ self.flip_u, flip_v: g.flip_v ^ self.flip_v, swap: self.swap }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Copula {
    Independence,
    Comonotone,
    Countermonotone,
    /// αM + βW + (1−α−β)Π.
    Frechet { alpha: f64, beta: f64 },
    /// min(u^{1−a}v, uv^{1−b}).
    MarshallOlkin { a: f64, b: f64 },
    Clayton { theta: f64 },
    Gumbel { theta: f64 },
    /// Mass θ on the segment (0,0)–(θ,1), mass 1−θ on (θ,1)–(1,0).
    SingularNelsen { theta: f64 },
    StudentT { nu: f64, rho: f64 },
    Mixture { weights: Vec<f64>, components: Vec<Copula> },
    Rotated { rotation: Rotation, base: Box<Copula> },
    /// exp(ln(uv)·A(ln u / ln(uv))); no sampler. The upper tail is the
    /// survival-EV tail u + v − (u+v)·A(u/(u+v)).
    ExtremeValue { pickands: PickandsFunction },
    /// max(Λ(u,v), u+v−1).
    TdfInduced { tdf: TailDependenceFunction },
}

impl Copula {
    pub fn frechet(alpha: f64, beta: f64) -> Result<Self> {
        check(alpha >= 0.0 && beta >= 0.0 && alpha + beta <= 1.0, || {
            format!("Fréchet needs alpha, beta >= 0 and alpha + beta <= 1, got ({alpha}, {beta})")
        })?;
        Ok(Self::Frechet { alpha, beta })
    }

    pub fn marshall_olkin(a: f64, b: f64) -> Result<Self> {
        check(a > 0.0 && a <= 1.0 && b > 0.0 && b <= 1.0, || {
            format!("Marshall-Olkin needs a, b in (0,1], got ({a}, {b})")
        })?;
        Ok(Self::MarshallOlkin { a, b })
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        check(theta > 0.0 && theta.is_finite(), || format!("Clayton needs theta > 0, got {theta}"))?;
        Ok(Self::Clayton { theta })
    }

    pub fn gumbel(theta: f64) -> Result<Self> {
        check(theta >= 1.0 && theta.is_finite(), || format!("Gumbel needs theta >= 1, got {theta}"))?;
        Ok(Self::Gumbel { theta })
    }

    pub fn singular_nelsen(theta: f64) -> Result<Self> {
        check((0.0..=1.0).contains(&theta), || format!("singular copula needs theta in [0,1], got {theta}"))?;
        Ok(Self::SingularNelsen { theta })
    }

    pub fn student_t(nu: f64, rho: f64) -> Result<Self> {
        check(nu > 0.0 && nu.is_finite(), || format!("t copula needs nu > 0, got {nu}"))?;
        check(rho > -1.0 && rho < 1.0, || format!("t copula needs rho in (-1,1), got {rho}"))?;
        Ok(Self::StudentT { nu, rho })
    }

    pub fn mixture(weights: Vec<f64>, components: Vec<Copula>) -> Result<Self> {
        check_weights(&weights, components.len())?;
        Ok(Self::Mixture { weights, components })
    }

    pub fn extreme_value(pickands: PickandsFunction) -> Self {
        Self::ExtremeValue { pickands }
    }

    /// Copula of ξ(U,V).
    pub fn rotate(self, rotation: Rotation) -> Self {
        Self::Rotated { rotation, base: Box::new(self) }
    }

    /// C(u,v) for (u,v) ∈ [0,1]².
    pub fn cdf(&self, u: f64, v: f64) -> Result<f64> {
        if !((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)) {
            return Err(Error::Domain(format!("copula arguments must lie in [0,1], got ({u}, {v})")));
        }
        Ok(self.cdf_unchecked(u, v))
    }

    pub(crate) fn cdf_unchecked(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return v.min(1.0);
        }
        if v >= 1.0 {
            return u;
        }
        match self {
            Self::Independence => u * v,
            Self::Comonotone => u.min(v),
            Self::Countermonotone => (u + v - 1.0).max(0.0),
            Self::Frechet { alpha, beta } => {
                alpha * u.min(v) + beta * (u + v - 1.0).max(0.0) + (1.0 - alpha - beta) * u * v
            }
            Self::MarshallOlkin { a, b } => (u.powf(1.0 - a) * v).min(u * v.powf(1.0 - b)),
            Self::Clayton { theta } => {
                let s = u.powf(-theta) + v.powf(-theta) - 1.0;
                s.powf(-1.0 / theta).min(u.min(v))
            }
            Self::Gumbel { theta } => {
                let x = (-u.ln()).powf(*theta) + (-v.ln()).powf(*theta);
                (-x.powf(1.0 / theta)).exp()
            }
            Self::SingularNelsen { theta } => {
                if theta * v >= u {
                    u
                } else if (1.0 - theta) * v >= 1.0 - u {
                    u + v - 1.0
                } else {
                    theta * v
                }
            }
            Self::StudentT { nu, rho } => student_t_cdf(u, v, *nu, *rho),
            Self::Mixture { weights, components } => {
                weights.iter().zip(components).map(|(w, c)| w * c.cdf_unchecked(u, v)).sum()
            }
            Self::Rotated { rotation, base } => {
                let c = match rotation {
                    Rotation::S1 => v - base.cdf_unchecked(1.0 - u, v),
                    Rotation::S2 => u - base.cdf_unchecked(u, 1.0 - v),
                    Rotation::Tau => base.cdf_unchecked(v, u),
                    Rotation::S1S2 => u + v - 1.0 + base.cdf_unchecked(1.0 - u, 1.0 - v),
                };
                frechet_bounds(c, u, v)
            }
            Self::ExtremeValue { pickands } => {
                let (lu, lv) = (u.ln(), v.ln());
                let s = lu + lv;
                (s * pickands.eval(lu / s)).exp()
            }
            Self::TdfInduced { tdf } => tdf.eval(u, v).max(u + v - 1.0),
        }
    }

    /// n i.i.d. pairs from a ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
        check(n >= 1, || "sample size must be at least 1".into())?;
        self.check_samplable()?;
        let mut rng = rng::from_seed(seed);
        Ok((0..n).map(|_| self.draw(&mut rng)).collect())
    }

    fn check_samplable(&self) -> Result<()> {
        match self {
            Self::ExtremeValue { .. } => Err(Error::UnsupportedFamily(
                "extreme-value copulas are analytic-only (no sampler); use their tail dependence function".into(),
            )),
            Self::Mixture { components, .. } => components.iter().try_for_each(|c| c.check_samplable()),
            Self::Rotated { base, .. } => base.check_samplable(),
            _ => Ok(()),
        }
    }

    /// One draw; callers have checked samplability.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self {
            Self::Independence => (rng.gen(), rng.gen()),
            Self::Comonotone => {
                let u = rng.gen();
                (u, u)
            }
            Self::Countermonotone => {
                let u: f64 = rng.gen();
                (u, 1.0 - u)
            }
            Self::Frechet { alpha, beta } => {
                let w: f64 = rng.gen();
                if w < *alpha {
                    Self::Comonotone.draw(rng)
                } else if w < alpha + beta {
                    Self::Countermonotone.draw(rng)
                } else {
                    Self::Independence.draw(rng)
                }
            }
            Self::MarshallOlkin { a, b } => {
                // Shocks with rates l1 = (1−a)/a, l2 = (1−b)/b, l12 = 1; the
                // survival functions of X = min(Z1,Z12), Y = min(Z2,Z12) are
                // uniform and their joint law is the MO copula.
                let (l1, l2) = ((1.0 - a) / a, (1.0 - b) / b);
                let z12: f64 = rng.sample(Exp1);
                let z1: f64 = if l1 > 0.0 { rng.sample::<f64, _>(Exp1) / l1 } else { f64::INFINITY };
                let z2: f64 = if l2 > 0.0 { rng.sample::<f64, _>(Exp1) / l2 } else { f64::INFINITY };
                let x = z1.min(z12);
                let y = z2.min(z12);
                ((-(l1 + 1.0) * x).exp(), (-(l2 + 1.0) * y).exp())
            }
            Self::Clayton { theta } => {
                let frailty: f64 = Gamma::new(1.0 / theta, 1.0).unwrap().sample(rng);
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                let psi = |s: f64| (1.0 + s).powf(-1.0 / theta);
                (psi(e1 / frailty), psi(e2 / frailty))
            }
            Self::Gumbel { theta } => {
                let s = positive_stable(1.0 / theta, rng);
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                let psi = |x: f64| (-x.powf(1.0 / theta)).exp();
                (psi(e1 / s), psi(e2 / s))
            }
            Self::SingularNelsen { theta } => {
                let pick: f64 = rng.gen();
                let s: f64 = rng.gen();
                if pick < *theta {
                    (theta * s, s)
                } else {
                    (theta + (1.0 - theta) * s, 1.0 - s)
                }
            }
            Self::StudentT { nu, rho } => {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                let w: f64 = ChiSquared::new(*nu).unwrap().sample(rng);
                let scale = (nu / w).sqrt();
                let x = z1 * scale;
                let y = (rho * z1 + (1.0 - rho * rho).sqrt() * z2) * scale;
                (t_cdf(x, *nu), t_cdf(y, *nu))
            }
            Self::Mixture { weights, components } => {
                let w: f64 = rng.gen();
                let mut acc = 0.0;
                for (wi, c) in weights.iter().zip(components) {
                    acc += wi;
                    if w < acc {
                        return c.draw(rng);
                    }
                }
                components.last().unwrap().draw(rng)
            }
            Self::Rotated { rotation, base } => {
                let (u, v) = base.draw(rng);
                match rotation {
                    Rotation::S1 => (1.0 - u, v),
                    Rotation::S2 => (u, 1.0 - v),
                    Rotation::Tau => (v, u),
                    Rotation::S1S2 => (1.0 - u, 1.0 - v),
                }
            }
            Self::ExtremeValue { .. } => unreachable!("extreme-value copulas have no sampler"),
            Self::TdfInduced { tdf } => {
                let u: f64 = rng.gen();
                let w: f64 = rng.gen();
                (u, conditional_inverse(tdf, u, w))
            }
        }
    }

    /// Lower tail dependence function Λ(u,v) = lim C(pu,pv)/p.
    pub fn lower_tdf(&self) -> TailDependenceFunction {
        self.view_tdf(View::ID)
    }

    /// Tail dependence function at the corner selected by a rotation, i.e.
    /// the lower TDF of rotate(C, r).
    pub fn corner_tdf(&self, rotation: Rotation) -> TailDependenceFunction {
        self.view_tdf(View::of(rotation))
    }

    fn view_tdf(&self, view: View) -> TailDependenceFunction {
        use TailDependenceFunction as T;
        if view.swap {
            let inner = self.view_tdf(View { swap: false, ..view });
            return match inner {
                T::Zero | T::Comonotone | T::FrechetTail { .. } => inner,
                other => T::transposed(other),
            };
        }
        let lower = !view.flip_u && !view.flip_v;
        let upper = view.flip_u && view.flip_v;
        match self {
            Self::Independence => T::Zero,
            Self::Comonotone => {
                if lower || upper {
                    T::Comonotone
                } else {
                    T::Zero
                }
            }
            Self::Countermonotone => {
                if lower || upper {
                    T::Zero
                } else {
                    T::Comonotone
                }
            }
            Self::Frechet { alpha, beta } => {
                let w = if lower || upper { *alpha } else { *beta };
                frechet_or_simpler(w)
            }
            Self::MarshallOlkin { a, b } => {
                if upper {
                    T::MarshallOlkinTail { a: *a, b: *b }
                } else {
                    T::Zero
                }
            }
            Self::Clayton { theta } => {
                if lower {
                    T::ClaytonTail { theta: *theta }
                } else {
                    T::Zero
                }
            }
            Self::Gumbel { theta } => {
                if upper && *theta > 1.0 {
                    T::SurvivalGumbelTail { theta: *theta }
                } else {
                    T::Zero
                }
            }
            Self::SingularNelsen { theta } => {
                if lower {
                    singular_or_simpler(*theta)
                } else if view.flip_u && !view.flip_v {
                    singular_or_simpler(1.0 - theta)
                } else {
                    T::Zero
                }
            }
            Self::StudentT { nu, rho } => {
                let r = if lower || upper { *rho } else { -rho };
                T::StudentTTail { nu: *nu, rho: r }
            }
            Self::Mixture { weights, components } => T::ConvexMixture {
                weights: weights.clone(),
                components: components.iter().map(|c| c.view_tdf(view)).collect(),
            },
            Self::Rotated { rotation, base } => base.view_tdf(view.after(View::of(*rotation))),
            Self::ExtremeValue { pickands } => {
                if upper {
                    TailDependenceFunction::SurvivalEvTail { pickands: pickands.clone() }
                } else if lower && (pickands.eval(0.5) - 0.5).abs() < 1e-12 {
                    T::Comonotone
                } else {
                    T::Zero
                }
            }
            Self::TdfInduced { tdf } => {
                if lower {
                    tdf.clone()
                } else if upper && (tdf.eval(1.0, 1.0) - 1.0).abs() < 1e-12 {
                    T::Comonotone
                } else {
                    T::Zero
                }
            }
        }
    }
}

fn frechet_or_simpler(alpha: f64) -> TailDependenceFunction {
    if alpha == 0.0 {
        TailDependenceFunction::Zero
    } else if alpha == 1.0 {
        TailDependenceFunction::Comonotone
    } else {
        TailDependenceFunction::FrechetTail { alpha }
    }
}

fn singular_or_simpler(theta: f64) -> TailDependenceFunction {
    if theta == 0.0 {
        TailDependenceFunction::Zero
    } else {
        TailDependenceFunction::SingularTail { theta }
    }
}

/// Positive stable variable with Laplace transform exp(−s^α), α ∈ (0,1],
/// by the Chambers–Mallows–Stuck (Kanter) representation.
fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    let theta: f64 = std::f64::consts::PI * rng.gen::<f64>();
    let w: f64 = rng.sample(Exp1);
    let a = (alpha * theta).sin() / theta.sin().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * theta).sin() / w).powf((1.0 - alpha) / alpha);
    a * b
}

/// Tolerance of the numeric bivariate t integral.
const T_CDF_TOL: f64 = 1e-11;

/// C(u,v) = ∫_{−∞}^{x} f_ν(s) T_{ν+1}((y − ρs)/√((1−ρ²)(ν+s²)/(ν+1))) ds with
/// x = T_ν^{-1}(u), y = T_ν^{-1}(v), after substituting
/// s = x − ((1−z)/z)^q so the heavy tail maps to a bounded integrand.
fn student_t_cdf(u: f64, v: f64, nu: f64, rho: f64) -> f64 {
    let x = t_quantile(u, nu);
    let y = t_quantile(v, nu);
    let q = (2.0 / nu).max(1.0);
    let scale = (1.0 - rho * rho) / (nu + 1.0);
    let integrand = |z: f64| {
        if z <= 0.0 {
            return 0.0;
        }
        let r = (1.0 - z) / z;
        let s = x - r.powf(q);
        let jac = if r > 0.0 { q * r.powf(q - 1.0) / (z * z) } else if q == 1.0 { 1.0 / (z * z) } else { 0.0 };
        let cond = t_cdf((y - rho * s) / (scale * (nu + s * s)).sqrt(), nu + 1.0);
        let dens = crate::special::t_pdf(s, nu);
        let val = dens * cond * jac;
        if val.is_finite() {
            val
        } else {
            0.0
        }
    };
    let c = quadrature::integrate_tol(integrand, 0.0, 1.0, &[], T_CDF_TOL).unwrap_or(f64::NAN);
    frechet_bounds(c, u, v)
}

/// Projects c onto [W(u,v), M(u,v)]. Rounding can push u+v−1 above min(u,v)
/// at v = 1, so the upper bound is applied last instead of using `clamp`.
fn frechet_bounds(c: f64, u: f64, v: f64) -> f64 {
    c.max((u + v - 1.0).max(0.0)).min(u.min(v))
}

/// v solving ∂C_Λ/∂u(u, v) = w, by bisection on a central difference.
fn conditional_inverse(tdf: &TailDependenceFunction, u: f64, w: f64) -> f64 {
    let h = 1e-7;
    let (lo_u, hi_u) = ((u - h).max(0.0), (u + h).min(1.0));
    let c = |a: f64, v: f64| tdf.eval(a, v).max(a + v - 1.0).max(0.0);
    let partial = |v: f64| (c(hi_u, v) - c(lo_u, v)) / (hi_u - lo_u);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if partial(mid) < w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
