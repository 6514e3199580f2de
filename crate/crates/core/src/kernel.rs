// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Coupling functions, their time-domain kernels, and the discrete collision
//! weights they induce on a uniform time grid.
//!
//! A coupling is always described in the time domain: a kernel 𝓕(s) that
//! depends only on the lag `s = t - t'`, made of point masses (deltas) plus an
//! optional smooth part with compact support on `[0, T_max]`. Averaging the
//! kernel over the square `[t_{n-1}, t_n] × [t_{m-1}, t_m]` gives the weight
//! `W(n - m)`; the coupling strength of ancilla `m` at step `n` is
//! `sqrt(gamma / dt) · W(n - m)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative offset `|L - l·dt| / dt` above which a delta lag counts as off-grid.
pub const LAG_MISMATCH_TOL: f64 = 1e-9;

/// Gauss-Legendre panels per integration piece for the smooth kernel part.
pub const QUAD_PANELS: usize = 16;

// 8-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// A point mass of the kernel at `lag` (time units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Delta {
    pub lag: f64,
    pub weight: Complex64,
}

/// One compactly supported smooth contribution to the kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SmoothTerm {
    /// `weight · exp(-rate · s)` for `0 <= s <= cutoff`, zero elsewhere.
    Exponential {
        rate: f64,
        weight: Complex64,
        cutoff: f64,
    },
    /// Piecewise-linear interpolation of `values[k]` at `s = k · spacing`.
    Sampled {
        spacing: f64,
        values: Vec<Complex64>,
    },
}

impl SmoothTerm {
    /// Upper end of the support; the lower end is always 0.
    pub fn support_end(&self) -> f64 {
        match self {
            SmoothTerm::Exponential { cutoff, .. } => *cutoff,
            SmoothTerm::Sampled { spacing, values } => {
                *spacing * (values.len().saturating_sub(1)) as f64
            }
        }
    }

    /// Kernel value at lag `s`; zero outside `[0, support_end]`.
    pub fn eval(&self, s: f64) -> Complex64 {
        if s < 0.0 || s > self.support_end() {
            return Complex64::new(0.0, 0.0);
        }
        match self {
            SmoothTerm::Exponential { rate, weight, .. } => weight * (-rate * s).exp(),
            SmoothTerm::Sampled { spacing, values } => {
                if values.len() == 1 {
                    return values[0];
                }
                let x = s / spacing;
                let k = (x.floor() as usize).min(values.len() - 2);
                let frac = x - k as f64;
                values[k] * (1.0 - frac) + values[k + 1] * frac
            }
        }
    }

    /// Interior points where the term is not smooth (sample nodes).
    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        if let SmoothTerm::Sampled { spacing, values } = self {
            let first = (lo / spacing).floor().max(0.0) as usize;
            for k in first..values.len() {
                let x = k as f64 * spacing;
                if x >= hi {
                    break;
                }
                if x > lo {
                    out.push(x);
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SmoothTerm::Exponential {
                rate,
                weight,
                cutoff,
            } => {
                if !rate.is_finite() || !weight.re.is_finite() || !weight.im.is_finite() {
                    return Err(Error::domain("exponential kernel term must be finite"));
                }
                if !(cutoff.is_finite() && *cutoff >= 0.0) {
                    return Err(Error::domain(format!(
                        "exponential kernel cutoff must be finite and >= 0, got {cutoff}"
                    )));
                }
            }
            SmoothTerm::Sampled { spacing, values } => {
                if !(spacing.is_finite() && *spacing > 0.0) {
                    return Err(Error::domain(format!(
                        "sampled kernel spacing must be > 0, got {spacing}"
                    )));
                }
                if values.is_empty() {
                    return Err(Error::domain("sampled kernel needs at least one value"));
                }
                if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::domain("sampled kernel values must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// Frequency structure of the coupling.
#[derive(Clone, Debug)]
pub enum CouplingShape {
    /// F(ω) = 1.
    White,
    /// F(ω) = 1 - e^{-iφ} e^{-iωτ}: an emitter in front of a mirror with
    /// round-trip delay `tau` and round-trip phase `phi`.
    Mirror { phi: f64, tau: f64 },
    /// Arbitrary causal time-domain kernel.
    Custom {
        deltas: Vec<Delta>,
        smooth: Vec<SmoothTerm>,
    },
}

/// A colored system-bath coupling: rate `gamma` and shape of F(ω).
///
/// Equality compares `gamma` and the canonical time kernel, so a `White`
/// coupling equals a `Custom` one with a single unit delta at lag 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CouplingRecord", into = "CouplingRecord")]
pub struct CouplingSpec {
    gamma: f64,
    shape: CouplingShape,
}

impl PartialEq for CouplingSpec {
    fn eq(&self, other: &Self) -> bool {
        self.gamma == other.gamma && self.time_kernel() == other.time_kernel()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "gamma must be finite and >= 0, got {gamma}"
        )))
    }
}

impl CouplingSpec {
    pub fn white(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            gamma,
            shape: CouplingShape::White,
        })
    }

    pub fn mirror(gamma: f64, phi: f64, tau: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !phi.is_finite() {
            return Err(Error::domain(format!("phi must be finite, got {phi}")));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::domain(format!(
                "tau must be finite and >= 0, got {tau}"
            )));
        }
        Ok(Self {
            gamma,
            shape: CouplingShape::Mirror { phi, tau },
        })
    }

    pub fn custom(gamma: f64, deltas: Vec<Delta>, smooth: Vec<SmoothTerm>) -> Result<Self> {
        check_gamma(gamma)?;
        for d in &deltas {
            if !(d.lag.is_finite() && d.lag >= 0.0) {
                return Err(Error::domain(format!(
                    "delta lags must be finite and >= 0, got {}",
                    d.lag
                )));
            }
            if !d.weight.re.is_finite() || !d.weight.im.is_finite() {
                return Err(Error::domain("delta weights must be finite"));
            }
        }
        for term in &smooth {
            term.validate()?;
        }
        Ok(Self {
            gamma,
            shape: CouplingShape::Custom { deltas, smooth },
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn shape(&self) -> &CouplingShape {
        &self.shape
    }

    /// Same shape, different rate.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            gamma,
            shape: self.shape.clone(),
        })
    }

    pub fn time_kernel(&self) -> TimeKernel {
        time_kernel(self)
    }
}

/// Time-domain kernel 𝓕(s): merged deltas with strictly increasing lags plus
/// smooth terms.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeKernel {
    deltas: Vec<(f64, Complex64)>,
    smooth: Vec<SmoothTerm>,
}

impl TimeKernel {
    pub fn new(deltas: impl IntoIterator<Item = (f64, Complex64)>, smooth: Vec<SmoothTerm>) -> Self {
        let mut sorted: Vec<(f64, Complex64)> = deltas.into_iter().collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, Complex64)> = Vec::with_capacity(sorted.len());
        for (lag, w) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == lag => last.1 += w,
                _ => merged.push((lag, w)),
            }
        }
        Self {
            deltas: merged,
            smooth,
        }
    }

    pub fn deltas(&self) -> &[(f64, Complex64)] {
        &self.deltas
    }

    pub fn smooth(&self) -> &[SmoothTerm] {
        &self.smooth
    }

    /// Smooth part evaluated at lag `s`.
    pub fn smooth_at(&self, s: f64) -> Complex64 {
        self.smooth.iter().map(|t| t.eval(s)).sum()
    }

    /// Largest lag carrying weight.
    pub fn support_end(&self) -> f64 {
        let d = self.deltas.last().map_or(0.0, |d| d.0);
        self.smooth
            .iter()
            .map(SmoothTerm::support_end)
            .fold(d, f64::max)
    }

    /// Kernel of the sum of two couplings.
    pub fn sum(&self, other: &TimeKernel) -> TimeKernel {
        let mut smooth = self.smooth.clone();
        smooth.extend(other.smooth.iter().cloned());
        TimeKernel::new(
            self.deltas.iter().chain(other.deltas.iter()).copied(),
            smooth,
        )
    }
}

/// Fourier transform of the coupling function, in closed form.
pub fn time_kernel(spec: &CouplingSpec) -> TimeKernel {
    match &spec.shape {
        CouplingShape::White => TimeKernel::new([(0.0, Complex64::new(1.0, 0.0))], Vec::new()),
        CouplingShape::Mirror { phi, tau } => TimeKernel::new(
            [
                (0.0, Complex64::new(1.0, 0.0)),
                (*tau, -Complex64::from_polar(1.0, -phi)),
            ],
            Vec::new(),
        ),
        CouplingShape::Custom { deltas, smooth } => {
            TimeKernel::new(deltas.iter().map(|d| (d.lag, d.weight)), smooth.clone())
        }
    }
}

/// Something worth telling the user about a discretized kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightWarning {
    /// A delta lag is not an integer multiple of `dt`; it was rounded.
    DiscretizationMismatch { lag: f64, bin: usize, offset: f64 },
    /// Several deltas fell into the same lag bin and were added.
    MergedDeltas { bin: usize, count: usize },
}

impl std::fmt::Display for WeightWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightWarning::DiscretizationMismatch { lag, bin, offset } => write!(
                f,
                "discretization mismatch: delta at lag {lag} rounded to bin {bin} (offset {offset:e})"
            ),
            WeightWarning::MergedDeltas { bin, count } => {
                write!(f, "merged deltas: {count} deltas share lag bin {bin}")
            }
        }
    }
}

/// Stationary banded weight table: `W(n, m) = W(n - m)`.
///
/// The same type carries the scaled coupling strengths `g(l)` once
/// [`coupling_strengths`] has been applied.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    dt: f64,
    n_steps: usize,
    lags: BTreeMap<usize, Complex64>,
    warnings: Vec<WeightWarning>,
}

impl WeightMatrix {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Weight at integer lag `l`; zero for lags not stored.
    pub fn lag(&self, l: usize) -> Complex64 {
        self.lags.get(&l).copied().unwrap_or_default()
    }

    /// Entry `(n, m)` of the full matrix. Kernels are causal, so entries
    /// above the diagonal vanish.
    pub fn get(&self, n: i64, m: i64) -> Complex64 {
        if m > n {
            return Complex64::new(0.0, 0.0);
        }
        self.lag((n - m) as usize)
    }

    /// Stored `(lag, weight)` pairs in increasing lag order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.lags.iter().map(|(&l, &w)| (l, w))
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    pub fn max_lag(&self) -> usize {
        self.lags.keys().next_back().copied().unwrap_or(0)
    }

    pub fn warnings(&self) -> &[WeightWarning] {
        &self.warnings
    }

    /// Lag table as CSV with columns `lag,re_w,im_w`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,re_w,im_w\n");
        for (l, w) in self.iter() {
            let _ = writeln!(out, "{l},{},{}", crate::fmt_f64(w.re), crate::fmt_f64(w.im));
        }
        out
    }

    /// Apply `f(lag, weight)` to every stored weight.
    pub fn map_lags(&self, f: impl Fn(usize, Complex64) -> Complex64) -> WeightMatrix {
        WeightMatrix {
            dt: self.dt,
            n_steps: self.n_steps,
            lags: self.lags.iter().map(|(&l, &w)| (l, f(l, w))).collect(),
            warnings: self.warnings.clone(),
        }
    }

    /// Multiply every stored weight by a common factor.
    pub fn scaled(&self, factor: f64) -> WeightMatrix {
        WeightMatrix {
            dt: self.dt,
            n_steps: self.n_steps,
            lags: self.lags.iter().map(|(&l, &w)| (l, w * factor)).collect(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Integrate `f` over `[lo, hi]` with composite 8-point Gauss-Legendre.
fn gauss_legendre<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64, panels: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    if hi <= lo {
        return acc;
    }
    let h = (hi - lo) / panels as f64;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let mid = a + 0.5 * h;
        let half = 0.5 * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            acc += f(mid + half * x) * (w * half);
        }
    }
    acc
}

/// Cell average of one smooth term for integer lag `l`.
///
/// The square integral of a difference kernel reduces exactly to
/// `(1/dt) ∫ f(u) (dt - |u - l dt|) du` over `u ∈ [(l-1) dt, (l+1) dt]`.
/// Each half is split at the support edges and at sample nodes and then
/// integrated with [`QUAD_PANELS`] Gauss-Legendre panels per piece.
fn smooth_cell_average(term: &SmoothTerm, dt: f64, l: usize) -> Complex64 {
    let centre = l as f64 * dt;
    let end = term.support_end();
    let mut total = Complex64::new(0.0, 0.0);
    for (a, b) in [(centre - dt, centre), (centre, centre + dt)] {
        let lo = a.max(0.0);
        let hi = b.min(end);
        if hi <= lo {
            continue;
        }
        let mut cuts = vec![lo];
        term.breakpoints(lo, hi, &mut cuts);
        cuts.push(hi);
        let integrand = |u: f64| term.eval(u) * (dt - (u - centre).abs());
        for w in cuts.windows(2) {
            total += gauss_legendre(&integrand, w[0], w[1], QUAD_PANELS);
        }
    }
    total / dt
}

/// Discrete collision weights of `kernel` on the grid `t_n = n · dt`.
///
/// Deltas land in bin `round(L / dt)` with their full weight; off-grid lags
/// and bins shared by several deltas are reported through
/// [`WeightMatrix::warnings`]. Smooth terms are cell-averaged as in
/// [`smooth_cell_average`].
pub fn collision_weights(kernel: &TimeKernel, dt: f64, n_steps: usize) -> Result<WeightMatrix> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain(format!("dt must be finite and > 0, got {dt}")));
    }
    if n_steps == 0 {
        return Err(Error::domain("n_steps must be >= 1"));
    }

    let mut lags: BTreeMap<usize, Complex64> = BTreeMap::new();
    let mut hits: BTreeMap<usize, usize> = BTreeMap::new();
    let mut warnings = Vec::new();

    for &(lag, w) in &kernel.deltas {
        let bin = (lag / dt).round() as usize;
        let offset = lag - bin as f64 * dt;
        if offset.abs() > LAG_MISMATCH_TOL * dt {
            warnings.push(WeightWarning::DiscretizationMismatch { lag, bin, offset });
        }
        *lags.entry(bin).or_default() += w;
        *hits.entry(bin).or_default() += 1;
    }
    for (&bin, &count) in &hits {
        if count > 1 {
            warnings.push(WeightWarning::MergedDeltas { bin, count });
        }
    }

    for term in &kernel.smooth {
        let end = term.support_end();
        // Bins whose cell [(l-1) dt, (l+1) dt] meets the support [0, end].
        let last = (end / dt).floor() as usize + 1;
        for l in 0..=last {
            if l > 0 && (l - 1) as f64 * dt >= end {
                break;
            }
            let w = smooth_cell_average(term, dt, l);
            *lags.entry(l).or_default() += w;
        }
    }

    Ok(WeightMatrix {
        dt,
        n_steps,
        lags,
        warnings,
    })
}

/// Coupling strengths `g(l) = sqrt(gamma / dt) · W(l)`.
pub fn coupling_strengths(weights: &WeightMatrix, gamma: f64) -> Result<WeightMatrix> {
    check_gamma(gamma)?;
    Ok(weights.scaled((gamma / weights.dt).sqrt()))
}

/// Serialized form of [`CouplingSpec`] used by configuration files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingRecord {
    White {
        gamma: f64,
    },
    Mirror {
        gamma: f64,
        phi: f64,
        tau: f64,
    },
    Custom {
        gamma: f64,
        #[serde(default)]
        deltas: Vec<Delta>,
        #[serde(default)]
        smooth: Vec<SmoothTerm>,
    },
}

impl TryFrom<CouplingRecord> for CouplingSpec {
    type Error = Error;

    fn try_from(r: CouplingRecord) -> Result<Self> {
        match r {
            CouplingRecord::White { gamma } => CouplingSpec::white(gamma),
            CouplingRecord::Mirror { gamma, phi, tau } => CouplingSpec::mirror(gamma, phi, tau),
            CouplingRecord::Custom {
                gamma,
                deltas,
                smooth,
            } => CouplingSpec::custom(gamma, deltas, smooth),
        }
    }
}

impl From<CouplingSpec> for CouplingRecord {
    fn from(s: CouplingSpec) -> Self {
        let gamma = s.gamma;
        match s.shape {
            CouplingShape::White => CouplingRecord::White { gamma },
            CouplingShape::Mirror { phi, tau } => CouplingRecord::Mirror { gamma, phi, tau },
            CouplingShape::Custom { deltas, smooth } => CouplingRecord::Custom {
                gamma,
                deltas,
                smooth,
            },
        }
    }
}
