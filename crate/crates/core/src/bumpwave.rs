//! Bumps and waves: three-Gaussian interpolants attached to one spike.
//!
//! For a spike `t` with nearest samples `s1, s2, s3`, each function has the
//! form `κ K(s1 - x) + μ K(s2 - x) + ρ K(s3 - x)` with `K` the unit
//! Gaussian. The bump takes value 1 with zero gradient at `t`; wave `i` has
//! value 0 and gradient `e_i` at `t`.
//!
//! Writing `ĉ_i = c_i K(s_i - t)` turns the interpolation conditions into a
//! barycentric problem: the bump's `ĉ` are the barycentric coordinates of
//! `t` in the sample triangle, and the waves' `ĉ` sum to zero.

use crate::kernels::gaussian_jet;
use crate::{Error, Result, Vec2};

/// A spike, its three nearest samples and the grid spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeConfig {
    pub t: Vec2,
    pub s: [Vec2; 3],
    pub zeta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BwKind {
    B,
    W1,
    W2,
}

impl BwKind {
    pub const ALL: [BwKind; 3] = [BwKind::B, BwKind::W1, BwKind::W2];

    fn col(self) -> usize {
        match self {
            BwKind::B => 0,
            BwKind::W1 => 1,
            BwKind::W2 => 2,
        }
    }
}

/// Rows κ, μ, ρ (one per sample); columns B, W¹, W².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpWaveCoeffs {
    pub m: [[f64; 3]; 3],
    /// Signed area determinant `D = D₁ + D₂ + D₃` of the sample triangle.
    pub d: f64,
    /// Barycentric parts `D_i / D` of the bump.
    pub bary: [f64; 3],
}

impl BumpWaveCoeffs {
    /// The three sample weights of one function.
    pub fn column(&self, kind: BwKind) -> [f64; 3] {
        let c = kind.col();
        [self.m[0][c], self.m[1][c], self.m[2][c]]
    }
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

impl SpikeConfig {
    /// Spike at `t` whose nearest sample sits at `t - ζw`, with the other
    /// two samples one step along `+x` and `+y`.
    pub fn from_offset(t: Vec2, w: Vec2, zeta: f64) -> Self {
        let s1 = [t[0] - zeta * w[0], t[1] - zeta * w[1]];
        Self { t, s: [s1, [s1[0] + zeta, s1[1]], [s1[0], s1[1] + zeta]], zeta }
    }

    /// The three samples of the grid `origin + ζℤ²` nearest to `t`: the
    /// closest grid point and its horizontal and vertical neighbours on the
    /// side of `t`.
    pub fn nearest(t: Vec2, origin: Vec2, zeta: f64) -> Self {
        let gx = (t[0] - origin[0]) / zeta;
        let gy = (t[1] - origin[1]) / zeta;
        let px = libm::round(gx);
        let py = libm::round(gy);
        let sx = if gx >= px { 1.0 } else { -1.0 };
        let sy = if gy >= py { 1.0 } else { -1.0 };
        let s1 = [origin[0] + px * zeta, origin[1] + py * zeta];
        Self { t, s: [s1, [s1[0] + sx * zeta, s1[1]], [s1[0], s1[1] + sy * zeta]], zeta }
    }
}

/// Closed-form bump/wave coefficients.
pub fn bw_coefficients(cfg: &SpikeConfig) -> Result<BumpWaveCoeffs> {
    let [s1, s2, s3] = cfg.s;
    let t = cfg.t;
    let e1 = [s2[0] - s1[0], s2[1] - s1[1]];
    let e2 = [s3[0] - s1[0], s3[1] - s1[1]];
    let d = cross(e1, e2);
    if d.abs() < 1e-14 {
        return Err(Error::DegenerateSamples(d));
    }
    let r = |s: Vec2| [s[0] - t[0], s[1] - t[1]];
    let (r1, r2, r3) = (r(s1), r(s2), r(s3));
    let d1 = cross(r2, r3);
    let d2 = cross(r3, r1);
    let d3 = cross(r1, r2);
    let bary = [d1 / d, d2 / d, d3 / d];
    // Wave parts: ĉ₂ e1 + ĉ₃ e2 = e_i and ĉ₁ = -(ĉ₂ + ĉ₃).
    let w1 = [e2[1] / d, -e1[1] / d];
    let w2 = [-e2[0] / d, e1[0] / d];
    let hat = [[bary[0], -(w1[0] + w1[1]), -(w2[0] + w2[1])], [bary[1], w1[0], w2[0]], [bary[2], w1[1], w2[1]]];
    let mut m = [[0.0; 3]; 3];
    for (i, ri) in [r1, r2, r3].into_iter().enumerate() {
        let g = libm::exp(0.5 * (ri[0] * ri[0] + ri[1] * ri[1]));
        for c in 0..3 {
            m[i][c] = hat[i][c] * g;
        }
    }
    Ok(BumpWaveCoeffs { m, d: d1 + d2 + d3, bary })
}

/// Value of the bump or a wave at `x`.
pub fn bw_eval(cfg: &SpikeConfig, coeffs: &BumpWaveCoeffs, kind: BwKind, x: Vec2) -> f64 {
    let c = coeffs.column(kind);
    (0..3).map(|i| c[i] * gaussian_jet([cfg.s[i][0] - x[0], cfg.s[i][1] - x[1]]).k).sum()
}

/// Gradient with respect to `x`.
pub fn bw_grad(cfg: &SpikeConfig, coeffs: &BumpWaveCoeffs, kind: BwKind, x: Vec2) -> Vec2 {
    let c = coeffs.column(kind);
    let mut g = [0.0; 2];
    for i in 0..3 {
        let d = [cfg.s[i][0] - x[0], cfg.s[i][1] - x[1]];
        let k = gaussian_jet(d).k;
        g[0] += c[i] * d[0] * k;
        g[1] += c[i] * d[1] * k;
    }
    g
}

/// Hessian `[[∂xx, ∂xy], [∂xy, ∂yy]]` with respect to `x`.
pub fn bw_hessian(cfg: &SpikeConfig, coeffs: &BumpWaveCoeffs, kind: BwKind, x: Vec2) -> [[f64; 2]; 2] {
    let c = coeffs.column(kind);
    let mut h = [[0.0; 2]; 2];
    for i in 0..3 {
        let j = gaussian_jet([cfg.s[i][0] - x[0], cfg.s[i][1] - x[1]]);
        h[0][0] += c[i] * j.dxx;
        h[1][1] += c[i] * j.dyy;
        h[0][1] += c[i] * j.dxy;
    }
    h[1][0] = h[0][1];
    h
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn sym2_eigenvalues(h: [[f64; 2]; 2]) -> [f64; 2] {
    let m = 0.5 * (h[0][0] + h[1][1]);
    let d = 0.5 * (h[0][0] - h[1][1]);
    let r = libm::hypot(d, h[0][1]);
    [m - r, m + r]
}

/// `Σ |c_i| max(‖s_i - x‖² - 1, 1) exp(-‖s_i - x‖²/2)`, which bounds
/// `|vᵀ∇²f(x)v|` over unit vectors `v`.
pub fn bw_hessian_quadform_bound(cfg: &SpikeConfig, coeffs: &BumpWaveCoeffs, kind: BwKind, x: Vec2) -> f64 {
    let c = coeffs.column(kind);
    (0..3)
        .map(|i| {
            let d = [cfg.s[i][0] - x[0], cfg.s[i][1] - x[1]];
            let q = d[0] * d[0] + d[1] * d[1];
            c[i].abs() * (q - 1.0).max(1.0) * libm::exp(-0.5 * q)
        })
        .sum()
}

/// Far-field bound `6r² exp(-r²/2 + √2 ζ r)` on a bump and its first and
/// second partials at distance `r` from the spike.
pub fn bump_tail_bound(r: f64, zeta: f64) -> f64 {
    6.0 * r * r * libm::exp(-0.5 * r * r + core::f64::consts::SQRT_2 * zeta * r)
}

/// Wave analogue of [`bump_tail_bound`], carrying an extra `1/ζ`.
pub fn wave_tail_bound(r: f64, zeta: f64) -> f64 {
    bump_tail_bound(r, zeta) / zeta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_on_sample() {
        let z = 0.4;
        let cfg = SpikeConfig { t: [0.0, 0.0], s: [[0.0, 0.0], [z, 0.0], [0.0, z]], zeta: z };
        let c = bw_coefficients(&cfg).unwrap();
        let e = libm::exp(z * z / 2.0) / z;
        let b = c.column(BwKind::B);
        assert!((b[0] - 1.0).abs() < 1e-15 && b[1].abs() < 1e-15 && b[2].abs() < 1e-15);
        let w1 = c.column(BwKind::W1);
        assert!((w1[0] + 1.0 / z).abs() < 1e-13 && (w1[1] - e).abs() < 1e-13 && w1[2] == 0.0);
        let w2 = c.column(BwKind::W2);
        assert!((w2[0] + 1.0 / z).abs() < 1e-13 && w2[1] == 0.0 && (w2[2] - e).abs() < 1e-13);
    }

    #[test]
    fn collinear_samples_rejected() {
        let cfg = SpikeConfig { t: [0.0, 0.0], s: [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], zeta: 1.0 };
        assert!(matches!(bw_coefficients(&cfg), Err(Error::DegenerateSamples(_))));
    }

    #[test]
    fn single_gaussian_eigen_bound() {
        let z = 0.5;
        let cfg = SpikeConfig { t: [0.0, 0.0], s: [[0.0, 0.0], [z, 0.0], [0.0, z]], zeta: z };
        let coeffs = BumpWaveCoeffs { m: [[1.0, 0.0, 0.0], [0.0; 3], [0.0; 3]], d: z * z, bary: [1.0, 0.0, 0.0] };
        assert!((bw_hessian_quadform_bound(&cfg, &coeffs, BwKind::B, [0.0, 0.0]) - 1.0).abs() < 1e-15);
        let b = bw_hessian_quadform_bound(&cfg, &coeffs, BwKind::B, [2.0, 0.0]);
        assert!((b - 3.0 * libm::exp(-2.0)).abs() < 1e-15);
        let ev = sym2_eigenvalues(bw_hessian(&cfg, &coeffs, BwKind::B, [2.0, 0.0]));
        assert!((ev[1] - 3.0 * libm::exp(-2.0)).abs() < 1e-15);
    }

    #[test]
    fn nearest_picks_side_of_spike() {
        let c = SpikeConfig::nearest([0.26, -0.31], [0.0, 0.0], 0.5);
        assert_eq!(c.s[0], [0.5, -0.5]);
        assert_eq!(c.s[1], [0.0, -0.5]);
        assert_eq!(c.s[2], [0.5, 0.0]);
    }
}
