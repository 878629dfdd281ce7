//! Grid-based ℓ1 deconvolution and exact-recovery trials.
//!
//! [`basis_pursuit`] minimizes `‖a‖₁` subject to `𝒦a = y` with a
//! Chambolle–Pock primal-dual iteration. Every few hundred steps it tries
//! to finish early: it takes the support of the current iterate, solves
//! least squares on it and projects the current dual vector onto
//! `{w : 𝒦_Sᵀ w = sign(a_S)}`. If the fit is exact and the projected dual
//! is feasible, `(a, w)` is a primal-dual optimal pair up to `tol` and the
//! polished `a` is returned.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bumpwave::SpikeConfig;
use crate::kernels::KernelModel;
use crate::linalg::{dot, norm, Mat, Qr};
use crate::{norm2, sub, Error, Result, Vec2};

/// Default cap on the number of matrix entries `rows × cols`.
pub const DEFAULT_ENTRY_BUDGET: usize = 20_000_000;
/// `‖â − a‖₂` below which a trial counts as exact recovery.
pub const RECOVERY_TOL: f64 = 1e-3;

/// A signed sum of spikes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeSignal {
    pub locations: Vec<Vec2>,
    pub amplitudes: Vec<f64>,
    min_sep: f64,
}

impl SpikeSignal {
    pub fn new(locations: Vec<Vec2>, amplitudes: Vec<f64>) -> Result<Self> {
        if locations.len() != amplitudes.len() {
            return Err(Error::InvalidArgument("one amplitude per location"));
        }
        if amplitudes.iter().chain(locations.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let min_sep = min_separation(&locations);
        Ok(Self { locations, amplitudes, min_sep })
    }

    /// Smallest pairwise distance; infinite for fewer than two spikes.
    pub fn min_separation(&self) -> f64 {
        self.min_sep
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

pub fn min_separation(points: &[Vec2]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            m = m.min(norm2(sub(points[i], points[j])));
        }
    }
    m
}

/// The samples `origin + ζ(p, q)` for `0 ≤ p < nx`, `0 ≤ q < ny`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub origin: Vec2,
    pub zeta: f64,
    pub nx: usize,
    pub ny: usize,
}

impl SampleGrid {
    /// Smallest grid anchored at `lo` that reaches `hi` in both directions.
    pub fn covering(lo: Vec2, hi: Vec2, zeta: f64) -> Self {
        let n = |a: f64, b: f64| libm::floor((b - a) / zeta + 1e-9) as usize + 1;
        Self { origin: lo, zeta, nx: n(lo[0], hi[0]), ny: n(lo[1], hi[1]) }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major in `q`, then `p`.
    pub fn points(&self) -> Vec<Vec2> {
        let mut out = Vec::with_capacity(self.len());
        for q in 0..self.ny {
            for p in 0..self.nx {
                out.push([self.origin[0] + self.zeta * p as f64, self.origin[1] + self.zeta * q as f64]);
            }
        }
        out
    }
}

/// Samples and the measured values at them.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub samples: Vec<Vec2>,
    pub y: Vec<f64>,
}

impl MeasurementSet {
    /// Noiseless measurements `y_i = Σ_j a_j K(s_i − t_j)`.
    pub fn synthesize(signal: &SpikeSignal, samples: Vec<Vec2>, model: &KernelModel) -> Self {
        let y = samples
            .iter()
            .map(|s| signal.locations.iter().zip(&signal.amplitudes).map(|(t, a)| a * model.eval_units(sub(*s, *t))).sum())
            .collect();
        Self { samples, y }
    }

    /// Adds i.i.d. Gaussian noise of standard deviation `sigma`.
    pub fn add_noise(&mut self, sigma: f64, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in &mut self.y {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += sigma * z;
        }
    }
}

/// `𝒦[i][j] = K(s_i − g_j)`, rows by sample and columns by candidate.
pub fn assemble_operator(candidates: &[Vec2], samples: &[Vec2], model: &KernelModel, budget: usize) -> Result<Mat> {
    let (rows, cols) = (samples.len(), candidates.len());
    if rows.saturating_mul(cols) > budget {
        return Err(Error::BudgetExceeded { rows, cols, budget });
    }
    let mut data = Vec::with_capacity(rows * cols);
    for s in samples {
        data.extend(candidates.iter().map(|g| model.eval_units(sub(*s, *g))));
    }
    Ok(Mat::from_rows(rows, cols, data))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Iterations between optimality checks.
    pub check_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iters: 100_000, check_every: 250 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub a: Vec<f64>,
    pub iterations: usize,
    /// `‖𝒦a − y‖₂ / ‖y‖₂` (absolute when `y = 0`).
    pub residual: f64,
    /// `‖𝒦ᵀw‖∞` for the dual vector `w` accompanying `a`.
    pub dual_max: f64,
}

/// Largest singular value of `k` by power iteration on `𝒦ᵀ𝒦`.
pub fn operator_norm(k: &Mat, iters: usize) -> f64 {
    let mut v = vec![1.0; k.cols];
    let mut l = norm(&v);
    for _ in 0..iters {
        let w = k.matvec_t(&k.matvec(&v));
        l = norm(&w);
        if l == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|x| x / l).collect();
    }
    libm::sqrt(l)
}

fn soft(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Attempts to confirm optimality of the support of `a` using the dual
/// iterate `w`. Returns the polished solution when it succeeds.
fn check_optimality(k: &Mat, y: &[f64], a: &[f64], w: &[f64], tol: f64) -> Option<Solution> {
    let amax = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if amax == 0.0 {
        return None;
    }
    let support: Vec<usize> = (0..a.len()).filter(|&j| a[j].abs() > 1e-3 * amax).collect();
    if support.len() > k.rows {
        return None;
    }
    let ks = k.select_columns(&support);
    let qr = Qr::new(&ks).ok()?;
    if qr.rcond_estimate() < 1e-13 {
        return None;
    }
    let x = qr.solve_ls(y).ok()?;
    let fit = ks.matvec(&x);
    let ynorm = norm(y);
    let residual = norm(&fit.iter().zip(y).map(|(f, v)| f - v).collect::<Vec<_>>()) / ynorm;
    if !(residual < tol) {
        return None;
    }
    let signs: Vec<f64> = x.iter().map(|v| v.signum()).collect();
    let gap: Vec<f64> = signs.iter().zip(ks.matvec_t(w)).map(|(s, c)| s - c).collect();
    let corr = qr.q_times(&qr.solve_rt(&gap).ok()?);
    let w2: Vec<f64> = w.iter().zip(&corr).map(|(a, b)| a + b).collect();
    let c = k.matvec_t(&w2);
    let off = (0..a.len()).filter(|j| support.binary_search(j).is_err()).map(|j| c[j].abs()).fold(0.0, f64::max);
    if !(off <= 1.0 + 10.0 * tol) {
        return None;
    }
    let mut out = vec![0.0; a.len()];
    for (&j, v) in support.iter().zip(x) {
        out[j] = v;
    }
    Some(Solution { a: out, iterations: 0, residual, dual_max: off.max(1.0) })
}

fn residual_of(k: &Mat, y: &[f64], a: &[f64]) -> f64 {
    let r: Vec<f64> = k.matvec(a).iter().zip(y).map(|(f, v)| f - v).collect();
    let yn = norm(y);
    if yn > 0.0 {
        norm(&r) / yn
    } else {
        norm(&r)
    }
}

/// `min ‖a‖₁` subject to `𝒦a = y`.
pub fn basis_pursuit(k: &Mat, y: &[f64], opts: &SolverOptions) -> Result<Solution> {
    if y.len() != k.rows {
        return Err(Error::InvalidArgument("y length must equal the number of rows"));
    }
    let n = k.cols;
    if norm(y) == 0.0 {
        return Ok(Solution { a: vec![0.0; n], iterations: 0, residual: 0.0, dual_max: 0.0 });
    }
    let l = operator_norm(k, 100);
    let step = 0.99 / l;
    let (tau, sigma) = (step, step);
    let mut a = vec![0.0; n];
    let mut a_bar = a.clone();
    let mut nu = vec![0.0; k.rows];
    let every = opts.check_every.max(1);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for it in 1..=opts.max_iters {
        let ka = k.matvec(&a_bar);
        for ((v, f), t) in nu.iter_mut().zip(&ka).zip(y) {
            *v += sigma * (f - t);
        }
        let kt = k.matvec_t(&nu);
        for j in 0..n {
            let new = soft(a[j] - tau * kt[j], tau);
            a_bar[j] = 2.0 * new - a[j];
            a[j] = new;
        }
        if it % every == 0 || it == opts.max_iters {
            let w: Vec<f64> = nu.iter().map(|v| -v).collect();
            if let Some(mut sol) = check_optimality(k, y, &a, &w, opts.tol) {
                sol.iterations = it;
                return Ok(sol);
            }
            let res = residual_of(k, y, &a);
            if best.as_ref().is_none_or(|(r, _)| res < *r) {
                best = Some((res, a.clone()));
            }
        }
    }
    Err(Error::NotConverged { iterations: opts.max_iters, best: best.map(|b| b.1).unwrap_or(a) })
}

/// `min ‖a‖₁` subject to `‖𝒦a − y‖₂ ≤ ξ`.
///
/// Stops once the constraint holds to `10⁻⁸` and the iterate has settled to
/// relative change below `tol`.
pub fn basis_pursuit_denoise(k: &Mat, y: &[f64], xi: f64, opts: &SolverOptions) -> Result<Solution> {
    if !(xi > 0.0) {
        return Err(Error::InvalidArgument("xi must be positive"));
    }
    if y.len() != k.rows {
        return Err(Error::InvalidArgument("y length must equal the number of rows"));
    }
    let n = k.cols;
    let ynorm = norm(y);
    if xi >= ynorm {
        return Ok(Solution { a: vec![0.0; n], iterations: 0, residual: 1.0, dual_max: 0.0 });
    }
    let l = operator_norm(k, 100);
    let step = 0.99 / l;
    let (tau, sigma) = (step, step);
    let mut a = vec![0.0; n];
    let mut a_bar = a.clone();
    let mut nu = vec![0.0; k.rows];
    let mut prev = a.clone();
    let every = opts.check_every.max(1);
    for it in 1..=opts.max_iters {
        let ka = k.matvec(&a_bar);
        // prox of σF* with F the indicator of the ξ-ball around y
        let v: Vec<f64> = nu.iter().zip(&ka).zip(y).map(|((u, f), t)| u + sigma * f - sigma * t).collect();
        let vn = norm(&v);
        let shrink = if vn > 0.0 { (1.0 - sigma * xi / vn).max(0.0) } else { 0.0 };
        for (u, vi) in nu.iter_mut().zip(&v) {
            *u = shrink * vi;
        }
        let kt = k.matvec_t(&nu);
        for j in 0..n {
            let new = soft(a[j] - tau * kt[j], tau);
            a_bar[j] = 2.0 * new - a[j];
            a[j] = new;
        }
        if it % every == 0 {
            let r: Vec<f64> = k.matvec(&a).iter().zip(y).map(|(f, t)| f - t).collect();
            let rn = norm(&r);
            let change: Vec<f64> = a.iter().zip(&prev).map(|(x, p)| x - p).collect();
            let scale = norm(&a).max(1e-300);
            if rn <= xi + 1e-8 && norm(&change) <= opts.tol * scale {
                let kt: Vec<f64> = k.matvec_t(&nu);
                let dual_max = kt.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                return Ok(Solution { a, iterations: it, residual: rn / ynorm, dual_max });
            }
            prev.clone_from(&a);
        }
    }
    Err(Error::NotConverged { iterations: opts.max_iters, best: a })
}

/// Which samples a trial observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    FullGrid,
    /// Only the three grid samples nearest each spike.
    ThreeNearest,
}

impl Pattern {
    pub fn name(self) -> &'static str {
        match self {
            Pattern::FullGrid => "full_grid",
            Pattern::ThreeNearest => "three_nearest",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full_grid" | "full" => Some(Pattern::FullGrid),
            "three_nearest" => Some(Pattern::ThreeNearest),
            _ => None,
        }
    }
}

/// Geometry of recovery trials, in the kernel's experiment units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialGeometry {
    /// Sample-grid margin around the spikes' bounding box.
    pub margin: f64,
    /// Candidate-lattice border around the spikes' bounding box.
    pub border: f64,
    /// Target candidate spacing; the actual spacing divides `Δ`.
    pub spacing: f64,
}

impl Default for TrialGeometry {
    fn default() -> Self {
        Self { margin: 3.0, border: 1.0, spacing: 0.25 }
    }
}

/// `n` spikes in rows of a hexagonal arrangement with separation `delta`.
pub fn hex_arrangement(delta: f64, n: usize) -> Vec<Vec2> {
    let cols = (libm::ceil(libm::sqrt(n as f64)) as usize).max(1);
    (0..n)
        .map(|i| {
            let (q, r) = (i % cols, i / cols);
            [delta * (q as f64 + 0.5 * (r % 2) as f64), delta * r as f64 * 0.866_025_403_784_438_6]
        })
        .collect()
}

fn bbox(points: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Triangular lattice with spacing `delta / ceil(delta / spacing)` that
/// contains every point of [`hex_arrangement`], clipped to the box.
pub fn candidate_lattice(delta: f64, spacing: f64, lo: Vec2, hi: Vec2) -> Vec<Vec2> {
    let m = (libm::ceil(delta / spacing) as i64).max(1);
    let h = delta / m as f64;
    let rh = h * 0.866_025_403_784_438_6;
    let mut out = Vec::new();
    let r0 = libm::floor(lo[1] / rh) as i64 - 1;
    let r1 = libm::ceil(hi[1] / rh) as i64 + 1;
    let q0 = libm::floor(lo[0] / h) as i64 - 2;
    let q1 = libm::ceil(hi[0] / h) as i64 + 2;
    let eps = 1e-9 * h;
    for r in r0..=r1 {
        let y = r as f64 * rh;
        if y < lo[1] - eps || y > hi[1] + eps {
            continue;
        }
        let off = 0.5 * h * r.rem_euclid(2) as f64;
        for q in q0..=q1 {
            let x = q as f64 * h + off;
            if x >= lo[0] - eps && x <= hi[0] + eps {
                out.push([x, y]);
            }
        }
    }
    out
}

/// A fully specified recovery instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSetup {
    pub signal: SpikeSignal,
    pub candidates: Vec<Vec2>,
    pub samples: Vec<Vec2>,
    /// Ground truth on the candidate lattice.
    pub truth: Vec<f64>,
}

pub fn trial_setup(delta: f64, zeta: f64, n_spikes: usize, pattern: Pattern, seed: u64, geometry: &TrialGeometry) -> Result<TrialSetup> {
    if !(delta > 0.0 && zeta > 0.0) || n_spikes == 0 {
        return Err(Error::InvalidArgument("need delta > 0, zeta > 0 and at least one spike"));
    }
    let raw = hex_arrangement(delta, n_spikes);
    let (lo, hi) = bbox(&raw);
    let b = geometry.border;
    let candidates = candidate_lattice(delta, geometry.spacing, [lo[0] - b, lo[1] - b], [hi[0] + b, hi[1] + b]);
    let mut truth = vec![0.0; candidates.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locations = Vec::with_capacity(n_spikes);
    let mut amplitudes = Vec::with_capacity(n_spikes);
    for t in raw {
        let (j, d) = candidates
            .iter()
            .enumerate()
            .map(|(j, g)| (j, norm2(sub(*g, t))))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .ok_or(Error::InvalidArgument("empty candidate lattice"))?;
        debug_assert!(d < 1e-9 * delta.max(1.0));
        let amp: f64 = StandardNormal.sample(&mut rng);
        truth[j] = amp;
        locations.push(candidates[j]);
        amplitudes.push(amp);
    }
    let m = geometry.margin;
    let grid = SampleGrid::covering([lo[0] - m, lo[1] - m], [hi[0] + m, hi[1] + m], zeta);
    let samples = match pattern {
        Pattern::FullGrid => grid.points(),
        Pattern::ThreeNearest => {
            let mut s: Vec<Vec2> = Vec::new();
            for t in &locations {
                for p in SpikeConfig::nearest(*t, grid.origin, zeta).s {
                    if !s.iter().any(|q| norm2(sub(*q, p)) < 1e-9 * zeta) {
                        s.push(p);
                    }
                }
            }
            s
        }
    };
    Ok(TrialSetup { signal: SpikeSignal::new(locations, amplitudes)?, candidates, samples, truth })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub success: bool,
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// One seeded exact-recovery trial: synthesize, solve, compare.
///
/// Solver non-convergence is reported through `converged` and judged on
/// the best iterate.
pub fn recovery_trial(
    delta: f64,
    zeta: f64,
    n_spikes: usize,
    pattern: Pattern,
    seed: u64,
    model: &KernelModel,
    opts: &SolverOptions,
) -> Result<TrialOutcome> {
    let setup = trial_setup(delta, zeta, n_spikes, pattern, seed, &TrialGeometry::default())?;
    let k = assemble_operator(&setup.candidates, &setup.samples, model, DEFAULT_ENTRY_BUDGET)?;
    let y = k.matvec(&setup.truth);
    let (a, iterations, converged) = match basis_pursuit(&k, &y, opts) {
        Ok(s) => (s.a, s.iterations, true),
        Err(Error::NotConverged { iterations, best }) => (best, iterations, false),
        Err(e) => return Err(e),
    };
    let diff: Vec<f64> = a.iter().zip(&setup.truth).map(|(x, t)| x - t).collect();
    let error = libm::sqrt(dot(&diff, &diff));
    Ok(TrialOutcome { success: error < RECOVERY_TOL, error, iterations, converged })
}
