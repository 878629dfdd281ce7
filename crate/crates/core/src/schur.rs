//! Invertibility of the interpolation system and bounds on its solution.
//!
//! With `n` spikes the unknowns are the bump weights `α` and wave weights
//! `β, γ`, and the equations ask that `Q(t_j) = τ_j` and `∇Q(t_j) = 0`:
//!
//! ```text
//! [ 𝓑    𝓦¹    𝓦²   ] [α]   [τ]
//! [ 𝓑_x  𝓦¹_x  𝓦²_x ] [β] = [0]
//! [ 𝓑_y  𝓦¹_y  𝓦²_y ] [γ]   [0]
//! ```
//!
//! The diagonal blocks `𝓑, 𝓦¹_x, 𝓦²_y` are close to the identity and the
//! rest are small. Eliminating `γ` then `β` leaves the Schur complements
//!
//! ```text
//! 𝓢₁ = 𝓦¹_x − 𝓦²_x (𝓦²_y)⁻¹ 𝓦¹_y
//! 𝓢₂ = 𝓑_x − 𝓦²_x (𝓦²_y)⁻¹ 𝓑_y
//! 𝓢₃ = 𝓑 − 𝓦¹ 𝓢₁⁻¹ 𝓢₂ − 𝓦² (𝓦²_y)⁻¹ (𝓑_y − 𝓦¹_y 𝓢₁⁻¹ 𝓢₂)
//! ```
//!
//! whose `∞`-norms follow from the block norms by the triangle inequality
//! and Neumann series. All scalar arithmetic below is outward rounded.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bumpwave::{bw_coefficients, bw_eval, bw_grad, BumpWaveCoeffs, BwKind, SpikeConfig};
use crate::envelope::{tail_constants, EnvelopeKind, EnvelopeSet};
use crate::hexgeom::HexPartition;
use crate::interval::Interval;
use crate::kernels::gaussian_jet;
use crate::linalg::{singular_values, Lu, Mat};
use crate::{Error, Result, Vec2};

/// Upper bounds on the `∞`-norms of the nine blocks, each over its
/// off-diagonal part or its deviation from the identity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormBounds {
    /// `‖I − 𝓑‖`
    pub i_b: f64,
    pub bx: f64,
    pub by: f64,
    pub w1: f64,
    pub w2: f64,
    /// `‖I − 𝓦¹_x‖`
    pub i_w1x: f64,
    pub w2x: f64,
    pub w1y: f64,
    /// `‖I − 𝓦²_y‖`
    pub i_w2y: f64,
    pub eps_b: f64,
    pub eps_w: f64,
}

impl NormBounds {
    pub fn as_array(&self) -> [f64; 9] {
        [self.i_b, self.bx, self.by, self.w1, self.w2, self.i_w1x, self.w2x, self.w1y, self.i_w2y]
    }

    pub const NAMES: [&'static str; 9] = ["I-B", "Bx", "By", "W1", "W2", "I-W1x", "W2x", "W1y", "I-W2y"];

    /// Componentwise `self ≥ other`.
    pub fn dominates(&self, other: &NormBounds) -> bool {
        self.as_array().iter().zip(other.as_array()).all(|(a, b)| *a >= b)
    }
}

/// The envelope that bounds each block's entries, in [`NormBounds::as_array`] order.
pub const BLOCK_ENVELOPES: [EnvelopeKind; 9] = [
    EnvelopeKind::B,
    EnvelopeKind::DxB,
    EnvelopeKind::DyB,
    EnvelopeKind::W1,
    EnvelopeKind::W2,
    EnvelopeKind::DxW1,
    EnvelopeKind::DxW2,
    EnvelopeKind::DyW1,
    EnvelopeKind::DyW2,
];

fn sum_up(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = Interval::point(0.0);
    for v in values {
        acc = acc + Interval::point(v);
    }
    acc.hi
}

/// Sums each block's envelope over the 216 inner cells at their `d_U`
/// and adds the far-layer constant.
pub fn block_norm_bounds(partition: &HexPartition, envelopes: &EnvelopeSet) -> Result<NormBounds> {
    if !(partition.delta >= 2.0) {
        return Err(Error::OutOfValidatedRange("block norm bounds need delta >= 2"));
    }
    let tails = tail_constants(envelopes.zeta.hi)?;
    let d_u = partition.d_u_values();
    let mut out = [0.0; 9];
    for (o, kind) in out.iter_mut().zip(BLOCK_ENVELOPES) {
        let env = envelopes.get(kind);
        let eps = if kind.is_wave() { tails.eps_w } else { tails.eps_b };
        *o = sum_up(d_u.iter().map(|&d| env.query(d)).chain(core::iter::once(eps)));
    }
    let [i_b, bx, by, w1, w2, i_w1x, w2x, w1y, i_w2y] = out;
    Ok(NormBounds { i_b, bx, by, w1, w2, i_w1x, w2x, w1y, i_w2y, eps_b: tails.eps_b, eps_w: tails.eps_w })
}

/// Bounds implied by a [`NormBounds`]. Quantities downstream of a failed
/// condition are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurReport {
    /// `‖I − 𝓦²_y‖ < 1`, `‖I − 𝓢₁‖ < 1`, `‖I − 𝓢₃‖ < 1`.
    pub conditions_hold: [bool; 3],
    pub inv_w2y: f64,
    pub i_s1: f64,
    pub inv_s1: f64,
    pub s2: f64,
    pub i_s3: f64,
    pub inv_s3: f64,
    pub alpha_inf: f64,
    pub beta_inf: f64,
    pub gamma_inf: f64,
    pub alpha_minus_tau_inf: f64,
    pub alpha_lb: f64,
}

impl SchurReport {
    pub fn all_hold(&self) -> bool {
        self.conditions_hold.iter().all(|&c| c)
    }
}

fn iv(x: f64) -> Interval {
    Interval::point(x)
}

/// `1/(1 − x)` rounded up, for `0 ≤ x < 1`.
fn neumann(x: Interval) -> Result<Interval> {
    iv(1.0).div(iv(1.0) - x)
}

pub fn schur_bounds(nb: &NormBounds) -> SchurReport {
    let nan = f64::NAN;
    let mut rep = SchurReport {
        conditions_hold: [false; 3],
        inv_w2y: nan,
        i_s1: nan,
        inv_s1: nan,
        s2: nan,
        i_s3: nan,
        inv_s3: nan,
        alpha_inf: nan,
        beta_inf: nan,
        gamma_inf: nan,
        alpha_minus_tau_inf: nan,
        alpha_lb: nan,
    };
    if !(nb.i_w2y < 1.0) {
        return rep;
    }
    let Ok(inv_w2y) = neumann(iv(nb.i_w2y)) else { return rep };
    let inv_w2y = iv(inv_w2y.hi);
    rep.conditions_hold[0] = true;
    rep.inv_w2y = inv_w2y.hi;

    let i_s1 = iv(nb.i_w1x) + iv(nb.w2x) * inv_w2y * iv(nb.w1y);
    let s2 = iv(nb.bx) + iv(nb.w2x) * inv_w2y * iv(nb.by);
    rep.i_s1 = i_s1.hi;
    rep.s2 = s2.hi;
    if !(i_s1.hi < 1.0) {
        return rep;
    }
    let Ok(inv_s1) = neumann(iv(i_s1.hi)) else { return rep };
    let inv_s1 = iv(inv_s1.hi);
    let s2 = iv(s2.hi);
    rep.conditions_hold[1] = true;
    rep.inv_s1 = inv_s1.hi;

    let beta_part = inv_s1 * s2;
    let i_s3 = iv(nb.i_b) + iv(nb.w1) * beta_part + iv(nb.w2) * inv_w2y * (iv(nb.w1y) * beta_part + iv(nb.by));
    rep.i_s3 = i_s3.hi;
    if !(i_s3.hi < 1.0) {
        return rep;
    }
    let Ok(inv_s3) = neumann(iv(i_s3.hi)) else { return rep };
    let inv_s3 = iv(inv_s3.hi);
    rep.conditions_hold[2] = true;
    rep.inv_s3 = inv_s3.hi;
    rep.alpha_inf = inv_s3.hi;
    let beta = beta_part * inv_s3;
    rep.beta_inf = beta.hi;
    rep.gamma_inf = beta.hi;
    let amt = inv_s3 * iv(i_s3.hi);
    rep.alpha_minus_tau_inf = amt.hi;
    rep.alpha_lb = (iv(1.0) - iv(amt.hi)).lo;
    rep
}

/// A numerically solved dual certificate `Q = Σ_j α_j B_j + β_j W¹_j + γ_j W²_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericCertificate {
    pub spikes: Vec<Vec2>,
    pub signs: Vec<f64>,
    pub zeta: f64,
    pub configs: Vec<SpikeConfig>,
    pub coeffs: Vec<BumpWaveCoeffs>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Merged weight `q` on each distinct sample.
    pub weights: Vec<(Vec2, f64)>,
}

impl NumericCertificate {
    pub fn eval(&self, x: Vec2) -> f64 {
        self.weights.iter().map(|(s, q)| q * gaussian_jet([s[0] - x[0], s[1] - x[1]]).k).sum()
    }

    pub fn grad(&self, x: Vec2) -> Vec2 {
        let mut g = [0.0; 2];
        for (s, q) in &self.weights {
            let d = [s[0] - x[0], s[1] - x[1]];
            let k = gaussian_jet(d).k;
            g[0] += q * d[0] * k;
            g[1] += q * d[1] * k;
        }
        g
    }
}

/// Spike configurations on the grid `origin + ζℤ²` and their closed-form
/// bump/wave coefficients.
pub fn spike_configs(spikes: &[Vec2], origin: Vec2, zeta: f64) -> Result<(Vec<SpikeConfig>, Vec<BumpWaveCoeffs>)> {
    let configs: Vec<SpikeConfig> = spikes.iter().map(|&t| SpikeConfig::nearest(t, origin, zeta)).collect();
    let coeffs = configs.iter().map(bw_coefficients).collect::<Result<Vec<_>>>()?;
    Ok((configs, coeffs))
}

/// The `3n × 3n` interpolation matrix, rows (value, ∂x, ∂y) by spike and
/// columns (B, W¹, W²) by spike.
pub fn assemble_block_system(configs: &[SpikeConfig], coeffs: &[BumpWaveCoeffs]) -> Mat {
    let n = configs.len();
    let mut m = Mat::zeros(3 * n, 3 * n);
    for (i, (cfg, c)) in configs.iter().zip(coeffs).enumerate() {
        for (kb, kind) in BwKind::ALL.into_iter().enumerate() {
            for (j, other) in configs.iter().enumerate() {
                let v = bw_eval(cfg, c, kind, other.t);
                let g = bw_grad(cfg, c, kind, other.t);
                let col = kb * n + i;
                m.set(j, col, v);
                m.set(n + j, col, g[0]);
                m.set(2 * n + j, col, g[1]);
            }
        }
    }
    m
}

/// Exact block norms of an assembled system, for checking [`NormBounds`].
pub fn measured_block_norms(m: &Mat, n: usize) -> NormBounds {
    let block = |br: usize, bc: usize, minus_identity: bool| -> f64 {
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        let v = m.get(br * n + j, bc * n + i);
                        if minus_identity && i == j {
                            (1.0 - v).abs()
                        } else {
                            v.abs()
                        }
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    };
    NormBounds {
        i_b: block(0, 0, true),
        bx: block(1, 0, false),
        by: block(2, 0, false),
        w1: block(0, 1, false),
        w2: block(0, 2, false),
        i_w1x: block(1, 1, true),
        w2x: block(1, 2, false),
        w1y: block(2, 1, false),
        i_w2y: block(2, 2, true),
        eps_b: 0.0,
        eps_w: 0.0,
    }
}

/// Solves the interpolation system for spikes `spikes` with signs `signs`
/// on the grid `origin + ζℤ²`.
pub fn numeric_certificate(spikes: &[Vec2], signs: &[f64], zeta: f64, origin: Vec2) -> Result<NumericCertificate> {
    if spikes.len() != signs.len() || spikes.is_empty() {
        return Err(Error::InvalidArgument("need one sign per spike and at least one spike"));
    }
    let n = spikes.len();
    let (configs, coeffs) = spike_configs(spikes, origin, zeta)?;
    let m = assemble_block_system(&configs, &coeffs);
    let lu = Lu::new(&m, 1e-12)?;
    let mut rhs = alloc::vec![0.0; 3 * n];
    rhs[..n].copy_from_slice(signs);
    let x = lu.solve(&rhs);
    let (alpha, rest) = x.split_at(n);
    let (beta, gamma) = rest.split_at(n);
    let mut merged: BTreeMap<(i64, i64), (Vec2, f64)> = BTreeMap::new();
    for i in 0..n {
        for (k, s) in configs[i].s.iter().enumerate() {
            let q = alpha[i] * coeffs[i].m[k][0] + beta[i] * coeffs[i].m[k][1] + gamma[i] * coeffs[i].m[k][2];
            let key = (libm::round((s[0] - origin[0]) / zeta) as i64, libm::round((s[1] - origin[1]) / zeta) as i64);
            merged.entry(key).or_insert((*s, 0.0)).1 += q;
        }
    }
    Ok(NumericCertificate {
        spikes: spikes.to_vec(),
        signs: signs.to_vec(),
        zeta,
        configs,
        coeffs,
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        gamma: gamma.to_vec(),
        weights: merged.into_values().collect(),
    })
}

/// Singular values of a small dense matrix, descending.
pub fn svd_small(m: &Mat) -> Result<Vec<f64>> {
    singular_values(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let r = schur_bounds(&NormBounds::default());
        assert!(r.all_hold());
        let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
        assert!(close(r.alpha_inf, 1.0) && close(r.beta_inf, 0.0) && close(r.gamma_inf, 0.0) && close(r.alpha_lb, 1.0));
        assert!(r.alpha_inf >= 1.0 && r.alpha_lb <= 1.0);
    }

    #[test]
    fn first_condition_short_circuits() {
        let r = schur_bounds(&NormBounds { i_w2y: 1.0, ..Default::default() });
        assert_eq!(r.conditions_hold, [false; 3]);
        assert!(r.alpha_inf.is_nan());
    }

    #[test]
    fn single_spike() {
        let c = numeric_certificate(&[[0.13, -0.07]], &[-1.0], 0.4, [0.0, 0.0]).unwrap();
        assert!((c.alpha[0] + 1.0).abs() < 1e-12);
        assert!(c.beta[0].abs() < 1e-12 && c.gamma[0].abs() < 1e-12);
        assert!((c.eval([0.13, -0.07]) + 1.0).abs() < 1e-12);
    }
}
