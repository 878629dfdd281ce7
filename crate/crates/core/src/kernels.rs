//! Point-spread functions.
//!
//! [`kernel_eval`] takes positions in the kernel's native coordinates. A
//! model's `scale` is the length of one experiment unit in those
//! coordinates, so separations quoted "in units" are multiplied by it (see
//! [`KernelModel::eval_units`]).

use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Gaussian,
    Microscopy,
    Airy,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Gaussian => "gaussian",
            KernelKind::Microscopy => "microscopy",
            KernelKind::Airy => "airy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(KernelKind::Gaussian),
            "microscopy" => Some(KernelKind::Microscopy),
            "airy" => Some(KernelKind::Airy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelModel {
    pub kind: KernelKind,
    pub scale: f64,
}

/// Width of the central lobe of the microscopy profile: `2σ₀² = 1.72²/2`.
pub const MICROSCOPY_SIGMA0: f64 = 0.86;
/// Argument scaling that puts the first zero of the Airy pattern at radius 1.
pub const AIRY_FREQ: f64 = 3.8317;

impl KernelModel {
    pub fn gaussian(sigma: f64) -> Self {
        Self { kind: KernelKind::Gaussian, scale: sigma }
    }

    pub fn microscopy() -> Self {
        Self { kind: KernelKind::Microscopy, scale: MICROSCOPY_SIGMA0 }
    }

    pub fn airy() -> Self {
        Self { kind: KernelKind::Airy, scale: 1.0 }
    }

    /// The model with its conventional unit length.
    pub fn standard(kind: KernelKind) -> Self {
        match kind {
            KernelKind::Gaussian => Self::gaussian(1.0),
            KernelKind::Microscopy => Self::microscopy(),
            KernelKind::Airy => Self::airy(),
        }
    }

    /// Kernel value at a displacement expressed in units of `scale`.
    pub fn eval_units(&self, t: Vec2) -> f64 {
        kernel_eval(self, [t[0] * self.scale, t[1] * self.scale])
    }

    /// Radial profile in units of `scale`.
    pub fn profile_units(&self, r: f64) -> f64 {
        kernel_eval(self, [r * self.scale, 0.0])
    }
}

/// Evaluates `K(t)` in native coordinates.
pub fn kernel_eval(model: &KernelModel, t: Vec2) -> f64 {
    let r2 = t[0] * t[0] + t[1] * t[1];
    match model.kind {
        KernelKind::Gaussian => libm::exp(-r2 / (2.0 * model.scale * model.scale)),
        KernelKind::Microscopy => {
            let r = libm::sqrt(r2);
            let ridge = r - 2.45;
            libm::exp(-2.0 * r2 / (1.72 * 1.72)) + 0.0208 * libm::exp(-2.0 * ridge * ridge / (1.10 * 1.10))
        }
        KernelKind::Airy => {
            let x = AIRY_FREQ * libm::sqrt(r2);
            let v = 2.0 * j1_over_x(x);
            v * v
        }
    }
}

/// Values and derivatives of the unit Gaussian `exp(-‖t‖²/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianJet {
    pub k: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dyy: f64,
    pub dxy: f64,
}

pub fn gaussian_jet(t: Vec2) -> GaussianJet {
    let [x, y] = t;
    let k = libm::exp(-0.5 * (x * x + y * y));
    GaussianJet { k, dx: -x * k, dy: -y * k, dxx: (x * x - 1.0) * k, dyy: (y * y - 1.0) * k, dxy: x * y * k }
}

/// Below this argument `J₁` is summed from its power series.
const J1_SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> f64 {
    if x < 0.0 {
        return -bessel_j1(-x);
    }
    if x < J1_SERIES_LIMIT {
        x * j1_series_over_x(x)
    } else {
        j1_asymptotic(x)
    }
}

/// `J₁(x)/x`, finite at the origin where it equals `1/2`.
pub fn j1_over_x(x: f64) -> f64 {
    let x = x.abs();
    if x < J1_SERIES_LIMIT {
        j1_series_over_x(x)
    } else {
        j1_asymptotic(x) / x
    }
}

fn j1_series_over_x(x: f64) -> f64 {
    // Σ_k (-1)^k (x²/4)^k / (k! (k+1)!) / 2
    let q = 0.25 * x * x;
    let mut term = 0.5;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > libm::sqrt(q) {
            break;
        }
        if k > 200.0 {
            break;
        }
    }
    sum
}

fn j1_asymptotic(x: f64) -> f64 {
    // Hankel expansion with mu = 4ν² = 4, truncated at the smallest term.
    let mu = 4.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    let mut k = 1;
    while k < 60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() >= prev {
            break;
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
        k += 1;
    }
    let chi = x - 0.75 * core::f64::consts::PI;
    libm::sqrt(2.0 / (core::f64::consts::PI * x)) * (p * libm::cos(chi) - q * libm::sin(chi))
}
