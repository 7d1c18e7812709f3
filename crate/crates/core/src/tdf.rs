//! Tail dependence functions Λ(u,v) = lim_{p↓0} C(pu,pv)/p.
//!
//! Every Λ is 1-homogeneous, 2-increasing, grounded and squeezed between 0
//! and M(u,v) = min(u,v). It is defined on the whole nonnegative quadrant.

use serde::{Deserialize, Serialize};

use crate::copulas::Copula;
use crate::error::{check, Error, Result};
use crate::special::t_cdf;

/// Anything evaluable as a tail dependence function: the analytic families
/// below and the empirical Λ_n of the estimation module.
pub trait TailFunction: Sync {
    /// Λ(u,v) for u, v ≥ 0.
    fn eval(&self, u: f64, v: f64) -> f64;

    /// Slopes s of the rays v = s·u along which Λ is not differentiable.
    fn kink_slopes(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Λ is linear on each cone between kink rays. For such Λ the maximum of
    /// b ↦ Λ(b,1/b) lies on a kink ray or at a grid end, so no refinement is
    /// needed.
    fn piecewise_linear(&self) -> bool {
        false
    }

    /// Λ₁(t) = Λ(t,1).
    fn lambda1(&self, t: f64) -> f64 {
        self.eval(t, 1.0)
    }

    /// Λ₂(t) = Λ(1,t).
    fn lambda2(&self, t: f64) -> f64 {
        self.eval(1.0, t)
    }

    /// Λ₁⋆(t) = Λ(t,1)/t for t > 0.
    fn lambda1_star(&self, t: f64) -> f64 {
        self.eval(t, 1.0) / t
    }

    /// Λ₂⋆(t) = Λ(1,t)/t for t > 0.
    fn lambda2_star(&self, t: f64) -> f64 {
        self.eval(1.0, t) / t
    }

    /// Λ⋆(t) = max(Λ₁⋆(t), Λ₂⋆(t)).
    fn lambda_star(&self, t: f64) -> f64 {
        self.lambda1_star(t).max(self.lambda2_star(t))
    }
}

/// Pickands dependence function A on [0,1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PickandsFunction {
    Constant1,
    MaxLower,
    AsymGumbel { alpha: f64, beta: f64, theta: f64 },
    AsymGalambos { alpha: f64, beta: f64, theta: f64 },
    /// Piecewise-linear interpolation of (w, A(w)) nodes.
    Tabulated { w: Vec<f64>, a: Vec<f64> },
}

impl PickandsFunction {
    pub fn asym_gumbel(alpha: f64, beta: f64, theta: f64) -> Result<Self> {
        check(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && beta <= 1.0, || {
            format!("asymmetric Gumbel needs alpha, beta in (0,1], got ({alpha}, {beta})")
        })?;
        check(theta >= 1.0 && theta.is_finite(), || format!("asymmetric Gumbel needs theta >= 1, got {theta}"))?;
        Ok(Self::AsymGumbel { alpha, beta, theta })
    }

    pub fn asym_galambos(alpha: f64, beta: f64, theta: f64) -> Result<Self> {
        check(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && beta <= 1.0, || {
            format!("Galambos needs alpha, beta in (0,1], got ({alpha}, {beta})")
        })?;
        check(theta > 0.0 && theta.is_finite(), || format!("Galambos needs theta > 0, got {theta}"))?;
        Ok(Self::AsymGalambos { alpha, beta, theta })
    }

    /// Checks strictly increasing nodes covering 0 and 1, endpoint values 1,
    /// the bounds max(w,1−w) ≤ A ≤ 1 and convexity.
    pub fn tabulated(w: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParameter(format!("tabulated Pickands function: {m}")));
        if w.len() != a.len() || w.len() < 2 {
            return bad("need at least two (w, A) nodes of equal length".into());
        }
        if w[0] != 0.0 || *w.last().unwrap() != 1.0 {
            return bad("nodes must start at 0 and end at 1".into());
        }
        if w.windows(2).any(|p| p[1] <= p[0]) {
            return bad("nodes must be strictly increasing".into());
        }
        if (a[0] - 1.0).abs() > 1e-12 || (a[a.len() - 1] - 1.0).abs() > 1e-12 {
            return bad("A(0) and A(1) must equal 1".into());
        }
        for (&wi, &ai) in w.iter().zip(&a) {
            if ai > 1.0 + 1e-12 || ai < wi.max(1.0 - wi) - 1e-12 {
                return bad(format!("A({wi}) = {ai} violates max(w,1-w) <= A <= 1"));
            }
        }
        for i in 1..w.len() - 1 {
            let left = (a[i] - a[i - 1]) / (w[i] - w[i - 1]);
            let right = (a[i + 1] - a[i]) / (w[i + 1] - w[i]);
            if right - left < -1e-10 {
                return bad(format!("not convex at w = {}", w[i]));
            }
        }
        Ok(Self::Tabulated { w, a })
    }

    /// Reads a `w,A` CSV with a header row.
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let (mut w, mut a) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::InvalidParameter(format!("Pickands CSV: {e}")))?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("Pickands CSV: bad field in {rec:?}")))
            };
            w.push(parse(0)?);
            a.push(parse(1)?);
        }
        Self::tabulated(w, a)
    }

    pub fn eval(&self, w: f64) -> f64 {
        let w = w.clamp(0.0, 1.0);
        match self {
            Self::Constant1 => 1.0,
            Self::MaxLower => w.max(1.0 - w),
            Self::AsymGumbel { alpha, beta, theta } => {
                (1.0 - alpha) * w + (1.0 - beta) * (1.0 - w) + lp_norm(alpha * w, beta * (1.0 - w), *theta)
            }
            Self::AsymGalambos { alpha, beta, theta } => 1.0 - neg_lp(alpha * w, beta * (1.0 - w), *theta),
            Self::Tabulated { w: ws, a } => {
                let i = ws.partition_point(|&x| x <= w).clamp(1, ws.len() - 1);
                let (w0, w1) = (ws[i - 1], ws[i]);
                let s = (w - w0) / (w1 - w0);
                a[i - 1] + s * (a[i] - a[i - 1])
            }
        }
    }
}

/// (x^θ + y^θ)^{1/θ}, scaled to avoid overflow.
fn lp_norm(x: f64, y: f64, theta: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == 0.0 {
        return 0.0;
    }
    hi * ((lo / hi).powf(theta).ln_1p() / theta).exp()
}

/// x + y − (x^θ + y^θ)^{1/θ}, without cancellation for lopsided arguments.
fn gumbel_gap(x: f64, y: f64, theta: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo <= 0.0 {
        return 0.0;
    }
    (lo - hi * ((lo / hi).powf(theta).ln_1p() / theta).exp_m1()).max(0.0)
}

/// (x^{−θ} + y^{−θ})^{−1/θ}, zero when either argument is zero.
fn neg_lp(x: f64, y: f64, theta: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo <= 0.0 {
        return 0.0;
    }
    lo * (-(lo / hi).powf(theta).ln_1p() / theta).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailDependenceFunction {
    Zero,
    Comonotone,
    /// α·min(u,v).
    FrechetTail { alpha: f64 },
    /// min(au, bv).
    MarshallOlkinTail { a: f64, b: f64 },
    /// (u^{−θ} + v^{−θ})^{−1/θ}.
    ClaytonTail { theta: f64 },
    /// u + v − (u^θ + v^θ)^{1/θ}.
    SurvivalGumbelTail { theta: f64 },
    /// min(u, θv).
    SingularTail { theta: f64 },
    StudentTTail { nu: f64, rho: f64 },
    /// u + v − (u+v)·A(u/(u+v)).
    SurvivalEvTail { pickands: PickandsFunction },
    /// αu + βv − ((αu)^θ + (βv)^θ)^{1/θ}.
    AsymGumbelTail { alpha: f64, beta: f64, theta: f64 },
    /// ((αu)^{−θ} + (βv)^{−θ})^{−1/θ}.
    AsymGalambosTail { alpha: f64, beta: f64, theta: f64 },
    ConvexMixture { weights: Vec<f64>, components: Vec<TailDependenceFunction> },
    /// base(v, u).
    Transposed { base: Box<TailDependenceFunction> },
}

pub(crate) fn check_weights(weights: &[f64], len: usize) -> Result<()> {
    check(weights.len() == len && len > 0, || "weights and components must have equal, nonzero length".into())?;
    check(weights.iter().all(|&w| w >= 0.0 && w.is_finite()), || "weights must be nonnegative".into())?;
    let s: f64 = weights.iter().sum();
    check((s - 1.0).abs() <= 1e-12, || format!("weights must sum to 1, got {s}"))
}

impl TailDependenceFunction {
    pub fn frechet(alpha: f64) -> Result<Self> {
        check((0.0..=1.0).contains(&alpha), || format!("Fréchet tail needs alpha in [0,1], got {alpha}"))?;
        Ok(Self::FrechetTail { alpha })
    }

    pub fn marshall_olkin(a: f64, b: f64) -> Result<Self> {
        check(a > 0.0 && a <= 1.0 && b > 0.0 && b <= 1.0, || format!("MO tail needs a, b in (0,1], got ({a}, {b})"))?;
        Ok(Self::MarshallOlkinTail { a, b })
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        check(theta > 0.0 && theta.is_finite(), || format!("Clayton tail needs theta > 0, got {theta}"))?;
        Ok(Self::ClaytonTail { theta })
    }

    pub fn survival_gumbel(theta: f64) -> Result<Self> {
        check(theta >= 1.0 && theta.is_finite(), || format!("survival Gumbel tail needs theta >= 1, got {theta}"))?;
        Ok(Self::SurvivalGumbelTail { theta })
    }

    pub fn singular(theta: f64) -> Result<Self> {
        check((0.0..=1.0).contains(&theta), || format!("singular tail needs theta in [0,1], got {theta}"))?;
        Ok(Self::SingularTail { theta })
    }

    pub fn student_t(nu: f64, rho: f64) -> Result<Self> {
        check(nu > 0.0 && nu.is_finite(), || format!("t tail needs nu > 0, got {nu}"))?;
        check(rho > -1.0 && rho < 1.0, || format!("t tail needs rho in (-1,1), got {rho}"))?;
        Ok(Self::StudentTTail { nu, rho })
    }

    pub fn asym_gumbel(alpha: f64, beta: f64, theta: f64) -> Result<Self> {
        PickandsFunction::asym_gumbel(alpha, beta, theta)?;
        Ok(Self::AsymGumbelTail { alpha, beta, theta })
    }

    pub fn asym_galambos(alpha: f64, beta: f64, theta: f64) -> Result<Self> {
        PickandsFunction::asym_galambos(alpha, beta, theta)?;
        Ok(Self::AsymGalambosTail { alpha, beta, theta })
    }

    pub fn mixture(weights: Vec<f64>, components: Vec<TailDependenceFunction>) -> Result<Self> {
        check_weights(&weights, components.len())?;
        Ok(Self::ConvexMixture { weights, components })
    }

    pub fn transposed(base: TailDependenceFunction) -> Self {
        Self::Transposed { base: Box::new(base) }
    }

    /// Checked evaluation: both arguments must be finite and nonnegative.
    pub fn try_eval(&self, u: f64, v: f64) -> Result<f64> {
        if !(u >= 0.0 && v >= 0.0 && u.is_finite() && v.is_finite()) {
            return Err(Error::Domain(format!("Λ is defined on [0,∞)², got ({u}, {v})")));
        }
        Ok(TailFunction::eval(self, u, v))
    }

    /// (Λ₁, Λ₂) as closures.
    pub fn margins(&self) -> (impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_) {
        (move |t| self.lambda1(t), move |t| self.lambda2(t))
    }

    /// (Λ₁⋆, Λ₂⋆, Λ⋆) as closures on (0,1].
    #[allow(clippy::type_complexity)]
    pub fn normalized_margins(
        &self,
    ) -> (impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_) {
        (move |t| self.lambda1_star(t), move |t| self.lambda2_star(t), move |t| self.lambda_star(t))
    }
}

fn student_t_tail(u: f64, v: f64, nu: f64, rho: f64) -> f64 {
    let c = ((nu + 1.0) / (1.0 - rho * rho)).sqrt();
    let lr = v.ln() - u.ln();
    // (v/u)^{-1/ν} and (u/v)^{-1/ν} in log space.
    let r1 = (-lr / nu).exp();
    let r2 = (lr / nu).exp();
    u * t_cdf(c * (rho - r1), nu + 1.0) + v * t_cdf(c * (rho - r2), nu + 1.0)
}

impl TailFunction for TailDependenceFunction {
    fn eval(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Zero => 0.0,
            Self::Comonotone => u.min(v),
            Self::FrechetTail { alpha } => alpha * u.min(v),
            Self::MarshallOlkinTail { a, b } => (a * u).min(b * v),
            Self::ClaytonTail { theta } => neg_lp(u, v, *theta),
            Self::SurvivalGumbelTail { theta } => gumbel_gap(u, v, *theta),
            Self::SingularTail { theta } => u.min(theta * v),
            Self::StudentTTail { nu, rho } => student_t_tail(u, v, *nu, *rho),
            Self::SurvivalEvTail { pickands } => match pickands {
                PickandsFunction::Constant1 => 0.0,
                PickandsFunction::MaxLower => u.min(v),
                PickandsFunction::AsymGumbel { alpha, beta, theta } => gumbel_gap(alpha * u, beta * v, *theta),
                PickandsFunction::AsymGalambos { alpha, beta, theta } => neg_lp(alpha * u, beta * v, *theta),
                PickandsFunction::Tabulated { .. } => {
                    let s = u + v;
                    (s * (1.0 - pickands.eval(u / s))).max(0.0)
                }
            },
            Self::AsymGumbelTail { alpha, beta, theta } => gumbel_gap(alpha * u, beta * v, *theta),
            Self::AsymGalambosTail { alpha, beta, theta } => neg_lp(alpha * u, beta * v, *theta),
            Self::ConvexMixture { weights, components } => {
                weights.iter().zip(components).map(|(w, c)| w * c.eval(u, v)).sum()
            }
            Self::Transposed { base } => base.eval(v, u),
        }
    }

    fn kink_slopes(&self) -> Vec<f64> {
        let mut s = match self {
            Self::Comonotone | Self::FrechetTail { .. } => vec![1.0],
            Self::MarshallOlkinTail { a, b } => vec![a / b],
            Self::SingularTail { theta } if *theta > 0.0 => vec![1.0 / theta],
            Self::SurvivalEvTail { pickands } => match pickands {
                PickandsFunction::MaxLower => vec![1.0],
                PickandsFunction::Tabulated { w, .. } => {
                    w.iter().filter(|&&x| x > 0.0 && x < 1.0).map(|&x| (1.0 - x) / x).collect()
                }
                _ => Vec::new(),
            },
            Self::ConvexMixture { components, .. } => components.iter().flat_map(|c| c.kink_slopes()).collect(),
            Self::Transposed { base } => base.kink_slopes().into_iter().map(|x| 1.0 / x).collect(),
            _ => Vec::new(),
        };
        s.sort_by(|x, y| x.partial_cmp(y).unwrap());
        s.dedup();
        s
    }

    fn piecewise_linear(&self) -> bool {
        match self {
            Self::Zero
            | Self::Comonotone
            | Self::FrechetTail { .. }
            | Self::MarshallOlkinTail { .. }
            | Self::SingularTail { .. } => true,
            Self::SurvivalEvTail { pickands } => {
                matches!(pickands, PickandsFunction::Constant1 | PickandsFunction::MaxLower)
            }
            Self::ConvexMixture { components, .. } => components.iter().all(|c| c.piecewise_linear()),
            Self::Transposed { base } => base.piecewise_linear(),
            _ => false,
        }
    }
}

/// Λ(u,v) = u + v − (u+v)·A(u/(u+v)).
pub fn tdf_from_pickands(a: PickandsFunction) -> TailDependenceFunction {
    TailDependenceFunction::SurvivalEvTail { pickands: a }
}

/// Nodes used when a general Λ is tabulated as A(w) = 1 − Λ(w, 1−w).
pub const PICKANDS_TABLE_NODES: usize = 1001;

/// A(w) = 1 − Λ(w, 1−w).
///
/// Exact for survival-EV tails, Zero and M. Any other Λ is tabulated on
/// [`PICKANDS_TABLE_NODES`] equispaced nodes. Distinct Λ outside the
/// survival-EV class can share the same A, so this direction is not
/// injective in general.
pub fn pickands_from_tdf(tdf: &TailDependenceFunction) -> Result<PickandsFunction> {
    use TailDependenceFunction as T;
    Ok(match tdf {
        T::Zero => PickandsFunction::Constant1,
        T::Comonotone => PickandsFunction::MaxLower,
        T::SurvivalEvTail { pickands } => pickands.clone(),
        T::AsymGumbelTail { alpha, beta, theta } => {
            PickandsFunction::AsymGumbel { alpha: *alpha, beta: *beta, theta: *theta }
        }
        T::AsymGalambosTail { alpha, beta, theta } => {
            PickandsFunction::AsymGalambos { alpha: *alpha, beta: *beta, theta: *theta }
        }
        other => {
            let m = PICKANDS_TABLE_NODES - 1;
            let w: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
            let a = w
                .iter()
                .map(|&x| (1.0 - other.eval(x, 1.0 - x)).clamp(x.max(1.0 - x), 1.0))
                .collect();
            PickandsFunction::tabulated(w, a)?
        }
    })
}

/// C_Λ(u,v) = max(Λ(u,v), u+v−1), after checking that Λ is a TDF.
pub fn copula_from_tdf(tdf: TailDependenceFunction) -> Result<Copula> {
    let report = validate_tdf(|u, v| tdf.eval(u, v));
    if !report.passes(1e-9) {
        return Err(Error::InvalidTdf(report.summary()));
    }
    Ok(Copula::TdfInduced { tdf })
}

/// Worst violation of each defining property, found on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    /// max |Λ(su,sv) − sΛ(u,v)|.
    pub homogeneity: f64,
    /// max of the negative part of rectangle volumes.
    pub two_increasing: f64,
    /// max violation of 0 ≤ Λ ≤ min(u,v).
    pub bounds: f64,
    /// max |Λ(u,0)|, |Λ(0,v)|.
    pub groundedness: f64,
}

impl ValidityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.homogeneity <= tol && self.two_increasing <= tol && self.bounds <= tol && self.groundedness <= tol
    }

    pub fn summary(&self) -> String {
        format!(
            "homogeneity {:.3e}, 2-increasing {:.3e}, bounds {:.3e}, groundedness {:.3e}",
            self.homogeneity, self.two_increasing, self.bounds, self.groundedness
        )
    }
}

/// Grid check of homogeneity, 2-increasingness, bounds and groundedness on
/// [0,2]² (41 × 41 nodes).
pub fn validate_tdf<F: Fn(f64, f64) -> f64>(candidate: F) -> ValidityReport {
    let n = 40;
    let g: Vec<f64> = (0..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
    let vals: Vec<Vec<f64>> = g.iter().map(|&u| g.iter().map(|&v| candidate(u, v)).collect()).collect();
    let mut r = ValidityReport { homogeneity: 0.0, two_increasing: 0.0, bounds: 0.0, groundedness: 0.0 };
    for (i, &u) in g.iter().enumerate() {
        for (j, &v) in g.iter().enumerate() {
            let x = vals[i][j];
            let b = (x - u.min(v)).max(-x).max(0.0);
            r.bounds = r.bounds.max(if x.is_finite() { b } else { f64::INFINITY });
            if i == 0 || j == 0 {
                r.groundedness = r.groundedness.max(x.abs());
            } else {
                let vol = vals[i][j] - vals[i - 1][j] - vals[i][j - 1] + vals[i - 1][j - 1];
                r.two_increasing = r.two_increasing.max(-vol);
                for s in [0.25, 0.5, 3.0] {
                    r.homogeneity = r.homogeneity.max((candidate(s * u, s * v) - s * x).abs());
                }
            }
        }
    }
    r
}
