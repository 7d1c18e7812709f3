//! Nonparametric estimation from a bivariate sample.
//!
//! Pseudo-observations → empirical TDF Λ_n(u,v) = (n/k)·C_n(ku/n, kv/n) →
//! plug-in estimators, with the threshold k chosen by a plateau rule and
//! uncertainty from a pairs bootstrap.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{self, MeasureSpec, DEFAULT_L};
use crate::rng;
use crate::tdf::TailFunction;

/// Absolute slack when comparing rank scores with thresholds, so that
/// k·u landing a rounding error below an integer rank still counts it.
const SCORE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    RawRanks,
    KnownMargins,
}

/// Denominator of the pseudo-observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankScale {
    /// rank/n.
    #[default]
    N,
    /// rank/(n+1).
    NPlusOne,
}

/// Pseudo-observations (ûᵢ, v̂ᵢ).
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSample {
    u: Vec<f64>,
    v: Vec<f64>,
    /// n·ûᵢ and n·v̂ᵢ; exact ranks under [`RankScale::N`].
    su: Vec<f64>,
    sv: Vec<f64>,
    provenance: Provenance,
    scale: RankScale,
    tied: bool,
}

/// Midranks: rank = number of values ≤ x, averaged over tie groups.
/// Returns the ranks and whether any tie occurred.
fn midranks(x: &[f64]) -> (Vec<f64>, bool) {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; n];
    let mut tied = false;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        if j - i > 1 {
            tied = true;
        }
        let rank = (i + 1 + j) as f64 / 2.0;
        for &p in &idx[i..j] {
            r[p] = rank;
        }
        i = j;
    }
    (r, tied)
}

impl PseudoSample {
    fn from_ranks(ru: Vec<f64>, rv: Vec<f64>, scale: RankScale, tied: bool) -> Self {
        let n = ru.len() as f64;
        let denom = match scale {
            RankScale::N => n,
            RankScale::NPlusOne => n + 1.0,
        };
        let to_score = |r: f64| match scale {
            RankScale::N => r,
            RankScale::NPlusOne => r * n / (n + 1.0),
        };
        Self {
            u: ru.iter().map(|r| r / denom).collect(),
            v: rv.iter().map(|r| r / denom).collect(),
            su: ru.iter().map(|&r| to_score(r)).collect(),
            sv: rv.iter().map(|&r| to_score(r)).collect(),
            provenance: Provenance::RawRanks,
            scale,
            tied,
        }
    }

    fn rank_pairs(x: &[f64], y: &[f64], scale: RankScale, warn: bool) -> Self {
        let (ru, tu) = midranks(x);
        let (rv, tv) = midranks(y);
        if warn && (tu || tv) {
            log::warn!("ties in the data: midranks used (continuous margins are assumed)");
        }
        Self::from_ranks(ru, rv, scale, tu || tv)
    }

    /// Uniform values of known margins, used as they are.
    pub fn from_uniform(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::InvalidSample("at least two observations are required".into()));
        }
        if pairs.iter().any(|&(u, v)| !((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v))) {
            return Err(Error::InvalidSample("uniform values must lie in [0,1]".into()));
        }
        let n = pairs.len() as f64;
        Ok(Self {
            u: pairs.iter().map(|p| p.0).collect(),
            v: pairs.iter().map(|p| p.1).collect(),
            su: pairs.iter().map(|p| p.0 * n).collect(),
            sv: pairs.iter().map(|p| p.1 * n).collect(),
            provenance: Provenance::KnownMargins,
            scale: RankScale::N,
            tied: false,
        })
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn scale(&self) -> RankScale {
        self.scale
    }

    pub fn has_ties(&self) -> bool {
        self.tied
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.v.iter().copied())
    }

    /// Pairs drawn with replacement; ranks are recomputed unless the margins
    /// are known.
    fn resample<R: Rng>(&self, rng: &mut R) -> Self {
        let n = self.n();
        let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        match self.provenance {
            Provenance::KnownMargins => {
                let pick = |s: &[f64]| idx.iter().map(|&i| s[i]).collect::<Vec<_>>();
                Self { u: pick(&self.u), v: pick(&self.v), su: pick(&self.su), sv: pick(&self.sv), ..self.clone() }
            }
            Provenance::RawRanks => {
                let x: Vec<f64> = idx.iter().map(|&i| self.su[i]).collect();
                let y: Vec<f64> = idx.iter().map(|&i| self.sv[i]).collect();
                Self::rank_pairs(&x, &y, self.scale, false)
            }
        }
    }
}

/// ûᵢ = rank(xᵢ)/n, v̂ᵢ = rank(yᵢ)/n.
pub fn pseudo_observations(data: &[(f64, f64)]) -> Result<PseudoSample> {
    pseudo_observations_scaled(data, RankScale::N)
}

pub fn pseudo_observations_scaled(data: &[(f64, f64)], scale: RankScale) -> Result<PseudoSample> {
    if data.len() < 2 {
        return Err(Error::InvalidSample("at least two observations are required".into()));
    }
    if data.iter().any(|(x, y)| x.is_nan() || y.is_nan()) {
        return Err(Error::InvalidSample("NaN in the data".into()));
    }
    let x: Vec<f64> = data.iter().map(|p| p.0).collect();
    let y: Vec<f64> = data.iter().map(|p| p.1).collect();
    Ok(PseudoSample::rank_pairs(&x, &y, scale, true))
}

/// Dominance counter over points sorted by the first score: a Fenwick tree
/// whose nodes hold the sorted second scores of their ranges. Each query
/// costs O(log² m) for m stored points.
#[derive(Debug, Clone)]
struct DominanceCounter {
    xs: Vec<f64>,
    nodes: Vec<Vec<f64>>,
}

impl DominanceCounter {
    fn new(mut pts: Vec<(f64, f64)>) -> Self {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let m = pts.len();
        let mut nodes: Vec<Vec<f64>> = vec![Vec::new(); m + 1];
        for i in 1..=m {
            let lo = i - (i & i.wrapping_neg());
            let mut ys: Vec<f64> = pts[lo..i].iter().map(|p| p.1).collect();
            ys.sort_by(f64::total_cmp);
            nodes[i] = ys;
        }
        Self { xs: pts.iter().map(|p| p.0).collect(), nodes }
    }

    /// #{x ≤ a, y ≤ b}.
    fn count(&self, a: f64, b: f64) -> usize {
        let mut i = self.xs.partition_point(|&x| x <= a);
        let mut c = 0;
        while i > 0 {
            c += self.nodes[i].partition_point(|&y| y <= b);
            i -= i & i.wrapping_neg();
        }
        c
    }
}

/// Λ_n(u,v) = (n/k)·C_n(ku/n, kv/n).
///
/// Only points with both scores ≤ `cap`·k are indexed; larger queries fall
/// back to a linear scan.
#[derive(Debug, Clone)]
pub struct EmpiricalTdf {
    n: usize,
    k: usize,
    cap: f64,
    counter: DominanceCounter,
    su: Vec<f64>,
    sv: Vec<f64>,
}

impl EmpiricalTdf {
    /// Indexes arguments up to the default grid half-size L = 100.
    pub fn new(sample: &PseudoSample, k: usize) -> Result<Self> {
        Self::with_cap(sample, k, DEFAULT_L as f64)
    }

    pub fn with_cap(sample: &PseudoSample, k: usize, cap: f64) -> Result<Self> {
        let n = sample.n();
        if k < 1 || k > n {
            return Err(Error::InvalidParameter(format!("k must satisfy 1 <= k <= n = {n}, got {k}")));
        }
        let lim = cap.max(1.0) * k as f64 + SCORE_SLACK;
        let pts: Vec<(f64, f64)> =
            sample.su.iter().zip(&sample.sv).filter(|(a, b)| **a <= lim && **b <= lim).map(|(a, b)| (*a, *b)).collect();
        Ok(Self { n, k, cap: cap.max(1.0), counter: DominanceCounter::new(pts), su: sample.su.clone(), sv: sample.sv.clone() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// #{i : n·ûᵢ ≤ a, n·v̂ᵢ ≤ b}.
    fn count(&self, a: f64, b: f64) -> usize {
        let lim = self.cap * self.k as f64;
        if a <= lim && b <= lim {
            self.counter.count(a + SCORE_SLACK, b + SCORE_SLACK)
        } else {
            self.su.iter().zip(&self.sv).filter(|(x, y)| **x <= a + SCORE_SLACK && **y <= b + SCORE_SLACK).count()
        }
    }
}

impl TailFunction for EmpiricalTdf {
    fn eval(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        let k = self.k as f64;
        let c = self.count(k * u, k * v);
        (self.n as f64 / k) * c as f64 / (self.n as f64 + 1.0)
    }

    fn piecewise_linear(&self) -> bool {
        true
    }
}

/// C_n(u,v) = #{ûᵢ ≤ u, v̂ᵢ ≤ v}/(n+1).
#[derive(Debug, Clone)]
pub struct EmpiricalCopula(EmpiricalTdf);

impl EmpiricalCopula {
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.0.eval(u, v)
    }
}

pub fn empirical_copula(sample: &PseudoSample) -> EmpiricalCopula {
    EmpiricalCopula(EmpiricalTdf::with_cap(sample, sample.n(), 1.0).expect("k = n is valid"))
}

pub fn empirical_tdf(sample: &PseudoSample, k: usize) -> Result<EmpiricalTdf> {
    EmpiricalTdf::new(sample, k)
}

/// Evaluation grids of the plug-in estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorGrids {
    /// Trapezoid grid {0, 1/L, …, 1} and b-grid half-size.
    pub l: usize,
    /// Floor of the λ̄ grid {t_floor, t_floor + 1/L, …, 1}.
    pub t_floor: f64,
}

impl Default for EstimatorGrids {
    fn default() -> Self {
        Self { l: DEFAULT_L, t_floor: 10.0 / DEFAULT_L as f64 }
    }
}

impl EstimatorGrids {
    fn t_grid(&self) -> Vec<f64> {
        let l = self.l as f64;
        let start = (self.t_floor * l).ceil().max(1.0) as usize;
        (start..=self.l).map(|i| i as f64 / l).collect()
    }
}

fn trapezoid(vals: &[f64], h: f64) -> f64 {
    if vals.len() < 2 {
        return 0.0;
    }
    h * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[vals.len() - 1]))
}

/// Plug-in estimate of a named measure from an empirical TDF.
///
/// Integrals use the composite trapezoid rule on {0, 1/L, …, 1}. χ̄ and χ̄⋆
/// maximise over the default b-grid. λ̄ is the larger of max Λ_n⋆ over the
/// t-grid and the χ̄⋆ estimate, so tdc ≤ χ̄ ≤ χ̄⋆ ≤ λ̄ holds on every sample.
pub fn estimate_with(tdf: &EmpiricalTdf, spec: MeasureSpec, grids: &EstimatorGrids) -> Result<f64> {
    let l = grids.l.max(1);
    let h = 1.0 / l as f64;
    let ts: Vec<f64> = (0..=l).map(|i| i as f64 * h).collect();
    let anti = || trapezoid(&ts.iter().map(|&u| tdf.eval(u, 1.0 - u)).collect::<Vec<_>>(), h);
    Ok(match spec {
        MeasureSpec::Tdc => tdf.eval(1.0, 1.0),
        MeasureSpec::Gtdc(u, v) => measures::gtdc(tdf, u, v)?,
        MeasureSpec::Spearman => {
            trapezoid(&ts.iter().map(|&t| tdf.lambda1(t)).collect::<Vec<_>>(), h)
                + trapezoid(&ts.iter().map(|&t| tdf.lambda2(t)).collect::<Vec<_>>(), h)
        }
        MeasureSpec::Gini => 2.0 / 3.0 * (tdf.eval(1.0, 1.0) + 2.0 * anti()),
        MeasureSpec::GiniW(w) => (w * tdf.eval(1.0, 1.0) * 0.5 + (1.0 - w) * anti()) / (w * 0.5 + (1.0 - w) * 0.25),
        MeasureSpec::Poly(m1, m2) => {
            let g = |m: f64, f: &dyn Fn(f64) -> f64| {
                let vals: Vec<f64> = ts.iter().map(|&t| if t == 0.0 { 0.0 } else { f(t) * t.powf(m - 1.0) }).collect();
                trapezoid(&vals, h)
            };
            (m1 + 1.0) * (m2 + 1.0) / (m1 + m2 + 2.0) * (g(m1, &|t| tdf.lambda1(t)) + g(m2, &|t| tdf.lambda2(t)))
        }
        MeasureSpec::Line(a) => {
            let s = 1f64.min(1.0 / a);
            tdf.eval(s, a * s) / s.min(a * s)
        }
        MeasureSpec::ChiBar => measures::chi_bar(tdf, &measures::default_b_grid(l)).value,
        MeasureSpec::ChiStar => measures::chi_bar(tdf, &measures::default_b_grid(l)).chi_star(),
        MeasureSpec::LambdaBar => {
            let grid_max = grids.t_grid().iter().map(|&t| tdf.lambda_star(t)).fold(0.0, f64::max);
            grid_max.max(measures::chi_bar(tdf, &measures::default_b_grid(l)).chi_star())
        }
    })
}

/// Builds Λ_n and returns the plug-in estimate of `name`.
pub fn estimate_measure(sample: &PseudoSample, k: usize, name: &str, grids: &EstimatorGrids) -> Result<f64> {
    let spec: MeasureSpec = name.parse()?;
    estimate_with(&EmpiricalTdf::new(sample, k)?, spec, grids)
}

/// Outcome of the plateau search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub k_star: usize,
    /// True when no window qualified and k⋆ = ⌊0.02n⌋.
    pub fallback: bool,
    /// (k, λ̂(k)) on the search grid.
    pub curve: Vec<(usize, f64)>,
    pub smoothed: Vec<f64>,
    pub window: usize,
    pub sigma: f64,
}

/// Default plateau bounds [max(20, ⌈0.001n⌉), ⌊0.1n⌋].
pub fn default_plateau_bounds(n: usize) -> (usize, usize) {
    (20usize.max((0.001 * n as f64).ceil() as usize), (0.1 * n as f64).floor() as usize)
}

/// λ̂(k) = Λ_n(1,1) on an arithmetic grid of at most 200 values in
/// [k_min, k_max], smoothed by a centred moving average of half-width
/// ⌈G/40⌉. The first window of m = ⌈√G⌉ smoothed values with
/// Σ_{i=1}^{m−1} |λ̃_{j+i} − λ̃_j| ≤ 2σ (σ the standard deviation of the
/// smoothed curve) gives k⋆ at its centre.
pub fn plateau_find_k(sample: &PseudoSample, k_min: usize, k_max: usize) -> Result<Plateau> {
    let n = sample.n();
    if !(k_min >= 1 && k_min < k_max && k_max <= n) {
        return Err(Error::InvalidParameter(format!(
            "plateau bounds need 1 <= k_min < k_max <= n = {n}, got [{k_min}, {k_max}]"
        )));
    }
    let mut maxes: Vec<f64> = sample.su.iter().zip(&sample.sv).map(|(a, b)| a.max(*b)).collect();
    maxes.sort_by(f64::total_cmp);
    let span = k_max - k_min;
    let g = (span + 1).min(200);
    let mut ks: Vec<usize> = (0..g).map(|i| k_min + ((i * span) as f64 / (g - 1) as f64).round() as usize).collect();
    ks.dedup();
    let nf = n as f64;
    let curve: Vec<(usize, f64)> = ks
        .iter()
        .map(|&k| {
            let c = maxes.partition_point(|&m| m <= k as f64 + SCORE_SLACK);
            (k, nf / k as f64 * c as f64 / (nf + 1.0))
        })
        .collect();
    let g = curve.len();
    let half = g.div_ceil(40);
    let smoothed: Vec<f64> = (0..g)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(g - 1);
            curve[lo..=hi].iter().map(|c| c.1).sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let mean = smoothed.iter().sum::<f64>() / g as f64;
    let sigma = (smoothed.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / g as f64).sqrt();
    let m = ((g as f64).sqrt().ceil() as usize).clamp(1, g);
    let found = (0..=g - m).find(|&j| (1..m).map(|i| (smoothed[j + i] - smoothed[j]).abs()).sum::<f64>() <= 2.0 * sigma);
    let (k_star, fallback) = match found {
        Some(j) => (curve[j + (m - 1) / 2].0, false),
        None => {
            log::warn!("no plateau found; falling back to k = floor(0.02 n)");
            (((0.02 * nf).floor() as usize).clamp(1, n), true)
        }
    };
    Ok(Plateau { k_star, fallback, curve, smoothed, window: m, sigma })
}

/// Point estimate, percentile interval and settings of one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub measure: String,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub seed: u64,
    pub t_min: f64,
    #[serde(rename = "L")]
    pub l: usize,
    /// The interval endpoints are the extreme replicates.
    pub low_b: bool,
}

/// Bootstrap settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    /// Re-run the plateau search on every replicate within these bounds.
    pub rechoose_k: Option<(usize, usize)>,
}

/// Nearest-rank percentile of sorted data.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let b = sorted.len();
    let idx = ((p * b as f64 - 1e-9).ceil() as usize).clamp(1, b) - 1;
    sorted[idx]
}

/// Percentile bootstrap: B resamples of pairs with replacement, re-ranked,
/// evaluated with the same k (unless `rechoose_k`). Replicate i draws from
/// ChaCha8 stream i+1 of `seed`; replicates run in parallel and are
/// assembled in index order.
pub fn bootstrap(
    sample: &PseudoSample,
    k: usize,
    specs: &[MeasureSpec],
    cfg: &BootstrapConfig,
    grids: &EstimatorGrids,
) -> Result<Vec<MeasureReport>> {
    if cfg.replicates < 2 {
        return Err(Error::InvalidParameter(format!("bootstrap needs B >= 2, got {}", cfg.replicates)));
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::InvalidParameter(format!("confidence level must lie in (0,1), got {}", cfg.level)));
    }
    let base = EmpiricalTdf::new(sample, k)?;
    let point: Vec<f64> = specs.iter().map(|&s| estimate_with(&base, s, grids)).collect::<Result<_>>()?;
    let reps: Vec<Vec<f64>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(cfg.seed, i as u64);
            let rs = sample.resample(&mut rng);
            let kk = match cfg.rechoose_k {
                Some((lo, hi)) => plateau_find_k(&rs, lo, hi)?.k_star,
                None => k,
            };
            let t = EmpiricalTdf::new(&rs, kk)?;
            specs.iter().map(|&s| estimate_with(&t, s, grids)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let alpha = 1.0 - cfg.level;
    let low_b = alpha / 2.0 * (cfg.replicates as f64) < 1.0;
    Ok(specs
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let mut col: Vec<f64> = reps.iter().map(|r| r[j]).collect();
            col.sort_by(f64::total_cmp);
            MeasureReport {
                measure: s.name(),
                estimate: point[j],
                ci_low: percentile(&col, alpha / 2.0),
                ci_high: percentile(&col, 1.0 - alpha / 2.0),
                level: cfg.level,
                n: sample.n(),
                k,
                b: cfg.replicates,
                seed: cfg.seed,
                t_min: grids.t_floor,
                l: grids.l,
                low_b,
            }
        })
        .collect())
}
