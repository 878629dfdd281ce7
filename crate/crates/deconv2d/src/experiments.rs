//! Conditioning, phase-diagram and certificate experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use deconv2d_core::certify::{recovery_sweep, CertifyConfig, SweepRow, Verdict};
use deconv2d_core::envelope::EnvelopeSet;
use deconv2d_core::kernels::{KernelKind, KernelModel};
use deconv2d_core::linalg::Mat;
use deconv2d_core::schur::{numeric_certificate, svd_small, NumericCertificate};
use deconv2d_core::solver::{assemble_operator, min_separation, recovery_trial, Pattern, SampleGrid, SolverOptions};
use deconv2d_core::Vec2;

use crate::csvout::{num, opt};
use crate::error::AppResult;

/// Side of the square spike lattice used for conditioning.
pub const SVD_LATTICE: usize = 8;
/// Sample margin around the lattice, in kernel units.
pub const SVD_MARGIN: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdRow {
    pub delta: f64,
    pub zeta: f64,
    pub sigma_min: f64,
    pub sigma_med: f64,
}

/// `8 × 8` square lattice with spacing `delta`.
pub fn square_lattice(delta: f64, n: usize) -> Vec<Vec2> {
    (0..n * n).map(|i| [delta * (i % n) as f64, delta * (i / n) as f64]).collect()
}

/// Extreme and middle singular values of the Gaussian sampling matrix for
/// each separation and spacing. The middle value is the `⌈n/2⌉`-th largest.
pub fn svd_conditioning(deltas: &[f64], zetas: &[f64]) -> AppResult<Vec<SvdRow>> {
    let cells: Vec<(f64, f64)> = deltas.iter().flat_map(|&d| zetas.iter().map(move |&z| (d, z))).collect();
    cells
        .par_iter()
        .map(|&(delta, zeta)| {
            let sv = svd_small(&conditioning_operator(delta, zeta)?)?;
            let n = sv.len();
            Ok(SvdRow { delta, zeta, sigma_min: sv[n - 1], sigma_med: sv[n.div_ceil(2) - 1] })
        })
        .collect()
}

pub fn svd_rows(rows: &[SvdRow]) -> Vec<Vec<String>> {
    rows.iter().map(|r| vec![num(r.delta), num(r.zeta), num(r.sigma_min), num(r.sigma_med)]).collect()
}

pub const SVD_HEADER: [&str; 4] = ["delta", "zeta", "sigma_min", "sigma_med"];

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRow {
    pub delta: f64,
    pub zeta: f64,
    pub kernel: KernelKind,
    pub pattern: Pattern,
    pub trials: usize,
    pub successes: usize,
}

impl PhaseRow {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

pub const PHASE_HEADER: [&str; 7] = ["delta", "zeta", "kernel", "pattern", "trials", "successes", "rate"];

pub fn phase_rows(rows: &[PhaseRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                num(r.delta),
                num(r.zeta),
                r.kernel.name().to_string(),
                r.pattern.name().to_string(),
                r.trials.to_string(),
                r.successes.to_string(),
                num(r.rate()),
            ]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    pub kernel: KernelKind,
    pub pattern: Pattern,
    pub n_spikes: usize,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverOptions,
}

/// Recovery rate over `trials` seeds (`seed, seed + 1, …`) for every
/// `(Δ, ζ)` pair; rows come back in grid order regardless of scheduling.
pub fn phase_diagram(deltas: &[f64], zetas: &[f64], cfg: &PhaseConfig) -> AppResult<Vec<PhaseRow>> {
    let model = KernelModel::standard(cfg.kernel);
    let jobs: Vec<(usize, f64, f64, u64)> = deltas
        .iter()
        .flat_map(|&d| zetas.iter().map(move |&z| (d, z)))
        .enumerate()
        .flat_map(|(c, (d, z))| (0..cfg.trials as u64).map(move |s| (c, d, z, cfg.seed.wrapping_add(s))))
        .collect();
    let outcomes: Vec<(usize, bool)> = jobs
        .par_iter()
        .map(|&(c, d, z, s)| Ok((c, recovery_trial(d, z, cfg.n_spikes, cfg.pattern, s, &model, &cfg.solver)?.success)))
        .collect::<AppResult<_>>()?;
    let mut rows: Vec<PhaseRow> = deltas
        .iter()
        .flat_map(|&d| zetas.iter().map(move |&z| (d, z)))
        .map(|(delta, zeta)| PhaseRow { delta, zeta, kernel: cfg.kernel, pattern: cfg.pattern, trials: cfg.trials, successes: 0 })
        .collect();
    for (c, ok) in outcomes {
        rows[c].successes += usize::from(ok);
    }
    Ok(rows)
}

pub const CERTIFY_HEADER: [&str; 12] =
    ["k1", "zeta_lo", "zeta_hi", "delta", "verdict", "u1", "u2", "alpha_inf", "beta_inf", "gamma_inf", "alpha_lb", "stage"];

pub fn certify_sweep(deltas: &[f64], sets: &[EnvelopeSet], config: &CertifyConfig) -> AppResult<Vec<SweepRow>> {
    Ok(recovery_sweep(deltas, sets, config)?)
}

pub fn certify_rows(rows: &[SweepRow]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for row in rows {
        for r in &row.reports {
            let (verdict, stage) = match r.verdict {
                Verdict::Certified => ("certified", ""),
                Verdict::Failed(s) => ("failed", s.name()),
            };
            let finite = |v: f64| if v.is_finite() { num(v) } else { String::new() };
            out.push(vec![
                row.k1.to_string(),
                num(row.zeta.lo),
                num(row.zeta.hi),
                num(r.delta),
                verdict.to_string(),
                opt(r.u1),
                opt(r.u2),
                finite(r.schur.alpha_inf),
                finite(r.schur.beta_inf),
                finite(r.schur.gamma_inf),
                finite(r.schur.alpha_lb),
                stage.to_string(),
            ]);
        }
    }
    out
}

/// Random support of `n` spikes in a square of side `side` with pairwise
/// separation at least `delta`, by seeded rejection sampling.
pub fn random_support(n: usize, delta: f64, side: f64, seed: u64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Vec2> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while pts.len() < n && attempts < 1_000_000 {
        attempts += 1;
        let p = [rng.random_range(0.0..side), rng.random_range(0.0..side)];
        if pts.iter().all(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() >= delta) {
            pts.push(p);
        }
    }
    pts
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateDemo {
    pub certificate: NumericCertificate,
    /// `(x, y, Q(x, y))` on the evaluation grid.
    pub grid: Vec<[f64; 3]>,
}

/// `n` random spikes with separation `delta` and alternating signs, the
/// solved certificate, and `Q` on a grid of spacing `step` over the
/// support's bounding box widened by `delta`.
pub fn certificate_demo(n: usize, delta: f64, zeta: f64, step: f64, seed: u64) -> AppResult<CertificateDemo> {
    let side = delta * (n as f64).sqrt().ceil() * 1.5;
    let spikes = random_support(n, delta, side, seed);
    debug_assert!(spikes.len() < 2 || min_separation(&spikes) >= delta);
    let signs: Vec<f64> = (0..spikes.len()).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let cert = numeric_certificate(&spikes, &signs, zeta, [0.0, 0.0])?;
    let lo = [
        spikes.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min) - delta,
        spikes.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min) - delta,
    ];
    let hi = [
        spikes.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) + delta,
        spikes.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max) + delta,
    ];
    let g = SampleGrid::covering(lo, hi, step);
    let grid = g.points().into_iter().map(|p| [p[0], p[1], cert.eval(p)]).collect();
    Ok(CertificateDemo { certificate: cert, grid })
}

/// Gaussian sampling matrix of the square lattice, rows by sample.
pub fn conditioning_operator(delta: f64, zeta: f64) -> AppResult<Mat> {
    let t = square_lattice(delta, SVD_LATTICE);
    let ext = delta * (SVD_LATTICE - 1) as f64;
    let grid = SampleGrid::covering([-SVD_MARGIN; 2], [ext + SVD_MARGIN; 2], zeta);
    Ok(assemble_operator(&t, &grid.points(), &KernelModel::gaussian(1.0), usize::MAX)?)
}
