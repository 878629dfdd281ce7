//! The exact-recovery certifier for one separation `Δ` and one ζ band.
//!
//! Rotate and translate so that one spike sits at the origin and the point
//! under test lies on the positive x-axis at radius `r ≤ Δ`. Split `(0, Δ]`
//! into equal segments and bound, on each, the certificate `Q`, its radial
//! derivative and its largest Hessian eigenvalue. Near the spike a negative
//! curvature integral keeps `Q < 1`; a gradient integral extends that
//! outward; beyond, the direct bound `Q < 1` takes over. Points at distance
//! at least `Δ` from every spike are handled by the far-field check.

use alloc::vec::Vec;

use crate::envelope::{tail_constants, EnvelopeKind as K, EnvelopeSet, StepEnvelope, TailConstants};
use crate::hexgeom::{build_partition, segment_feasible_distance, HexPartition};
use crate::interval::Interval;
use crate::schur::{block_norm_bounds, schur_bounds, NormBounds, SchurReport};
use crate::Result;

/// Default number of segments tiling `(0, Δ]`.
pub const SEGMENTS: usize = 100;
/// Floor on the far-layer slack inside segment bounds.
pub const SEGMENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentBound {
    pub a: f64,
    pub b: f64,
    pub q_ub: f64,
    pub q_lb: f64,
    pub grad_ub: f64,
    pub eig_ub: f64,
}

/// Where certification of a cell stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    SchurConditions,
    CoefficientBounds,
    FarField,
    NoNegativeCurvature,
    NoGradientExtension,
    UpperBound,
    LowerBound,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::SchurConditions => "schur_conditions",
            Stage::CoefficientBounds => "coefficient_bounds",
            Stage::FarField => "far_field",
            Stage::NoNegativeCurvature => "no_negative_curvature",
            Stage::NoGradientExtension => "no_gradient_extension",
            Stage::UpperBound => "upper_bound",
            Stage::LowerBound => "lower_bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Failed(Stage),
}

impl Verdict {
    pub fn is_certified(self) -> bool {
        self == Verdict::Certified
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub delta: f64,
    pub k1: u32,
    pub zeta: Interval,
    pub u1: Option<f64>,
    pub u2: Option<f64>,
    pub segments: Vec<SegmentBound>,
    pub norm_bounds: NormBounds,
    pub schur: SchurReport,
    pub far_field_ok: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    pub segments: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { segments: SEGMENTS }
    }
}

fn up(x: f64) -> f64 {
    Interval::point(x).hi
}

struct Coeffs {
    alpha: f64,
    alpha_lb: f64,
    beta: f64,
    gamma: f64,
    eps: f64,
    eps_eig: f64,
}

impl Coeffs {
    fn new(schur: &SchurReport, tails: &TailConstants) -> Self {
        let (a, b, g) = (schur.alpha_inf, schur.beta_inf, schur.gamma_inf);
        let eps = SEGMENT_EPS.max(up(a * tails.eps_b + (b + g) * tails.eps_w) * (1.0 + 1e-12));
        let eps_eig = SEGMENT_EPS.max(up(a * tails.eps_b_lambda + (b + g) * tails.eps_w_lambda) * (1.0 + 1e-12));
        Self { alpha: a, alpha_lb: schur.alpha_lb, beta: b, gamma: g, eps, eps_eig }
    }
}

fn grad_norm(dx: &StepEnvelope, dy: &StepEnvelope, r: f64) -> f64 {
    up(libm::hypot(dx.query(r), dy.query(r)))
}

/// Upward-rounded sum of nonnegative terms.
fn sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Interval::point(0.0);
    for t in terms {
        acc = acc + Interval::point(t);
    }
    acc.hi
}

/// The four bounds on one segment `[a, b]` given the per-cell distances
/// `d_u` from the segment to the admissible part of each inner cell.
fn segment_bound(a: f64, b: f64, d_u: &[f64], envs: &EnvelopeSet, c: &Coeffs) -> SegmentBound {
    let e = |k| envs.get(k);
    let (bb, w1, w2) = (e(K::B), e(K::W1), e(K::W2));
    let value = |r: f64| up(c.alpha * bb.query(r) + c.beta * w1.query(r) + c.gamma * w2.query(r));
    let grad = |r: f64| {
        up(c.alpha * grad_norm(e(K::DxB), e(K::DyB), r)
            + c.beta * grad_norm(e(K::DxW1), e(K::DyW1), r)
            + c.gamma * grad_norm(e(K::DxW2), e(K::DyW2), r))
    };
    let eig = |r: f64| up(c.alpha * e(K::LamB).query(r) + c.beta * e(K::LamW1).query(r) + c.gamma * e(K::LamW2).query(r));

    let neighbours_q = sum(d_u.iter().map(|&d| value(d)));
    let neighbours_g = sum(d_u.iter().map(|&d| grad(d)));
    let neighbours_e = sum(d_u.iter().map(|&d| eig(d)));
    let self_waves_q = up(c.beta * w1.query(a) + c.gamma * w2.query(a));
    let self_bump_q = up(c.alpha * bb.query(a));

    let q_ub = sum([self_bump_q, self_waves_q, neighbours_q, c.eps]);
    let q_lb = -sum([self_waves_q, neighbours_q, c.eps]);

    let omega = e(K::DB).seg_max(a, b);
    let self_g = (c.alpha_lb * omega).max(c.alpha * omega);
    let waves_g = up(c.beta * grad_norm(e(K::DxW1), e(K::DyW1), a) + c.gamma * grad_norm(e(K::DxW2), e(K::DyW2), a));
    let grad_ub = up(up(self_g + waves_g) + up(neighbours_g + c.eps));

    let eta = e(K::LamBInf).seg_max(a, b);
    let self_e = (c.alpha_lb * eta).max(c.alpha * eta);
    let waves_e = up(c.beta * e(K::LamW1).query(a) + c.gamma * e(K::LamW2).query(a));
    let eig_ub = up(up(self_e + waves_e) + up(neighbours_e + c.eps_eig));

    SegmentBound { a, b, q_ub, q_lb, grad_ub, eig_ub }
}

/// Lower bounds on the distance from `[a, b] × {0}` to any other spike in
/// each inner cell.
pub fn segment_distances(a: f64, b: f64, partition: &HexPartition) -> Vec<f64> {
    let slack = 1e-12 * partition.delta;
    partition.cells.iter().map(|cell| segment_feasible_distance(a, b, cell, partition.delta).max(a) - slack).map(|d| d.max(0.0)).collect()
}

/// Bounds on `Q`, `∂_r Q` and `λ_max(∇²Q)` over points of radius `[a, b]`.
///
/// `schur` must have all conditions holding.
pub fn qtri_segment_bounds(a: f64, b: f64, partition: &HexPartition, envs: &EnvelopeSet, schur: &SchurReport) -> Result<SegmentBound> {
    let d_u = segment_distances(a, b, partition);
    Ok(segment_bound(a, b, &d_u, envs, &Coeffs::new(schur, &tail_constants(envs.zeta.hi)?)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionIntegrals {
    /// `∫₀^r ēig(s)(r − s) ds`
    pub curvature: f64,
    /// `∫_{u1}^r ḡ(s) ds`
    pub gradient: f64,
}

/// Closed-form integrals of the step bounds.
pub fn regions_integrals(segments: &[SegmentBound], u1: f64, r: f64) -> RegionIntegrals {
    let mut curvature = 0.0;
    let mut gradient = 0.0;
    for s in segments {
        let (a, b) = (s.a.min(r), s.b.min(r));
        curvature += s.eig_ub * ((r - a) * (r - a) - (r - b) * (r - b)) / 2.0;
        let (ga, gb) = (s.a.max(u1).min(r), s.b.max(u1).min(r));
        gradient += s.grad_ub * (gb - ga);
    }
    RegionIntegrals { curvature, gradient }
}

/// A chosen pair of radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionChoice {
    pub u1: f64,
    pub u2: f64,
    /// Index of the segment whose right end is `u2`.
    pub u2_segment: usize,
}

/// Prefix data for the curvature integral: value and slope at each `a_i`.
fn curvature_prefix(segments: &[SegmentBound]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(segments.len() + 1);
    let (mut c, mut dc) = (0.0, 0.0);
    out.push((c, dc));
    for s in segments {
        let h = s.b - s.a;
        c += dc * h + s.eig_ub * h * h / 2.0;
        dc += s.eig_ub * h;
        out.push((c, dc));
    }
    out
}

/// Whether the curvature integral, a quadratic on segment `i`, stays
/// negative on `(a_i, b_i]`.
fn curvature_negative_on(seg: &SegmentBound, c0: f64, dc0: f64, first: bool) -> bool {
    let h = seg.b - seg.a;
    let at = |x: f64| c0 + dc0 * x + seg.eig_ub * x * x / 2.0;
    if first {
        return seg.eig_ub < 0.0 && at(h) < 0.0 && dc0 <= 0.0 && c0 <= 0.0;
    }
    if !(c0 < 0.0 && at(h) < 0.0) {
        return false;
    }
    if seg.eig_ub < 0.0 {
        let x = -dc0 / seg.eig_ub;
        if x > 0.0 && x < h && !(at(x) < 0.0) {
            return false;
        }
    }
    true
}

/// Picks `u1` (end of the negative-curvature region) and `u2` (end of the
/// gradient continuation), preferring pairs for which `Q_ub < 1` holds from
/// the segment containing `u2` outward, then the largest `u2`, then the
/// largest `u1`.
pub fn find_u1_u2(segments: &[SegmentBound]) -> core::result::Result<RegionChoice, Stage> {
    let n = segments.len();
    let prefix = curvature_prefix(segments);
    let mut k_max = 0;
    for (i, s) in segments.iter().enumerate() {
        let (c0, dc0) = prefix[i];
        if !curvature_negative_on(s, c0, dc0, i == 0) {
            break;
        }
        k_max = i + 1;
    }
    if k_max == 0 {
        return Err(Stage::NoNegativeCurvature);
    }
    // upper_ok_from[i]: Q_ub < 1 on segments i..n.
    let mut upper_ok_from = alloc::vec![true; n + 1];
    for i in (0..n).rev() {
        upper_ok_from[i] = upper_ok_from[i + 1] && segments[i].q_ub < 1.0;
    }
    let mut best: Option<(bool, RegionChoice)> = None;
    for k in 1..=k_max {
        let (c_u1, _) = prefix[k];
        let mut g = c_u1;
        let mut m = k;
        while m < n {
            let s = &segments[m];
            let next = g + s.grad_ub * (s.b - s.a);
            if !(next < 0.0) {
                break;
            }
            g = next;
            m += 1;
        }
        let choice = RegionChoice { u1: segments[k - 1].b, u2: segments[m - 1].b, u2_segment: m - 1 };
        let ok = upper_ok_from[m - 1];
        let better = match &best {
            None => true,
            Some((bok, b)) => (ok, choice.u2, choice.u1) > (*bok, b.u2, b.u1),
        };
        if better {
            best = Some((ok, choice));
        }
    }
    Ok(best.expect("k_max >= 1").1)
}

/// `|Q(t)| < 1` for points at distance at least `Δ` from every spike.
pub fn far_field_check(schur: &SchurReport, nb: &NormBounds) -> bool {
    let v = sum([up(schur.alpha_inf * nb.i_b), up(schur.beta_inf * nb.w1), up(schur.gamma_inf * nb.w2)]);
    v < 1.0
}

/// Runs the full procedure for separation `delta` with envelopes for one band.
pub fn certify_cell(delta: f64, envs: &EnvelopeSet, config: &CertifyConfig) -> Result<CertificateReport> {
    let partition = build_partition(delta);
    let nb = block_norm_bounds(&partition, envs)?;
    let schur = schur_bounds(&nb);
    let mut report = CertificateReport {
        delta,
        k1: envs.spec.k1,
        zeta: envs.zeta,
        u1: None,
        u2: None,
        segments: Vec::new(),
        norm_bounds: nb,
        schur,
        far_field_ok: false,
        verdict: Verdict::Failed(Stage::SchurConditions),
    };
    if !schur.all_hold() {
        return Ok(report);
    }
    if !(schur.alpha_inf <= 2.0 && schur.beta_inf <= 1.0 && schur.gamma_inf <= 1.0) {
        report.verdict = Verdict::Failed(Stage::CoefficientBounds);
        return Ok(report);
    }
    report.far_field_ok = far_field_check(&schur, &nb);
    let coeffs = Coeffs::new(&schur, &tail_constants(envs.zeta.hi)?);
    let n = config.segments.max(1);
    report.segments = (1..=n)
        .map(|i| {
            let a = delta * (i - 1) as f64 / n as f64;
            let b = delta * i as f64 / n as f64;
            segment_bound(a, b, &segment_distances(a, b, &partition), envs, &coeffs)
        })
        .collect();
    if !report.far_field_ok {
        report.verdict = Verdict::Failed(Stage::FarField);
        return Ok(report);
    }
    let choice = match find_u1_u2(&report.segments) {
        Ok(c) => c,
        Err(stage) => {
            report.verdict = Verdict::Failed(stage);
            return Ok(report);
        }
    };
    report.u1 = Some(choice.u1);
    report.u2 = Some(choice.u2);
    report.verdict = if report.segments[choice.u2_segment..].iter().any(|s| !(s.q_ub < 1.0)) {
        Verdict::Failed(Stage::UpperBound)
    } else if report.segments.iter().any(|s| !(s.q_lb > -1.0)) {
        Verdict::Failed(Stage::LowerBound)
    } else {
        Verdict::Certified
    };
    Ok(report)
}

/// Verdicts for one band over a grid of separations.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k1: u32,
    pub zeta: Interval,
    pub reports: Vec<CertificateReport>,
}

impl SweepRow {
    /// Least certified separation on the grid.
    pub fn threshold(&self) -> Option<f64> {
        self.reports.iter().filter(|r| r.verdict.is_certified()).map(|r| r.delta).min_by(f64::total_cmp)
    }

    /// Whether every separation above a certified one is also certified.
    pub fn is_up_closed(&self) -> bool {
        let mut seen = false;
        let mut sorted: Vec<&CertificateReport> = self.reports.iter().collect();
        sorted.sort_by(|a, b| a.delta.total_cmp(&b.delta));
        for r in sorted {
            if r.verdict.is_certified() {
                seen = true;
            } else if seen {
                return false;
            }
        }
        true
    }
}

/// Evenly spaced separations `lo, lo + step, …` up to `hi` inclusive.
pub fn delta_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = libm::floor((hi - lo) / step + 1e-9) as usize;
    (0..=n).map(|i| libm::round((lo + step * i as f64) * 1e9) / 1e9).collect()
}

/// Certifies every separation in `deltas` for each envelope set.
pub fn recovery_sweep(deltas: &[f64], sets: &[EnvelopeSet], config: &CertifyConfig) -> Result<Vec<SweepRow>> {
    sets.iter()
        .map(|envs| {
            #[cfg(feature = "parallel")]
            let reports = {
                use rayon::prelude::*;
                deltas.par_iter().map(|&d| certify_cell(d, envs, config)).collect::<Result<Vec<_>>>()?
            };
            #[cfg(not(feature = "parallel"))]
            let reports = deltas.iter().map(|&d| certify_cell(d, envs, config)).collect::<Result<Vec<_>>>()?;
            Ok(SweepRow { k1: envs.spec.k1, zeta: envs.zeta, reports })
        })
        .collect()
}
