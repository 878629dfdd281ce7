//! Radial step-function envelopes of bumps, waves and their derivatives.
//!
//! An envelope for band `k1` bounds a quantity attached to a spike at the
//! origin, uniformly over every grid spacing `ζ ∈ I_ζ(k1)` and every offset
//! of the spike inside its sample triangle. The bound is piecewise constant
//! in `r = ‖t‖` on right-closed bins of width `1/tres` covering `[0, 10]`,
//! with a single tail constant beyond.
//!
//! Values come from interval evaluation over a product partition of the
//! positional argument `t ∈ [-10, 10]²` (square cells of side `1/tres`) and
//! the normalized offset `w = u/ζ` (square cells of side `1/ures`).
//! Monotone kinds bound the supremum over `‖t‖ ≥ r` and are clamped below
//! by [`ENVELOPE_FLOOR`]. The two signed kinds, [`EnvelopeKind::DB`] and
//! [`EnvelopeKind::LamBInf`], bound the supremum over `‖t‖ = r` only and are
//! left unclamped so that their negative values near the spike survive.

use alloc::vec;
use alloc::vec::Vec;

use crate::bumpwave::bump_tail_bound;
use crate::interval::{iv_norm_sq, Interval, Interval2};
use crate::{Error, Result};

/// Lower clamp for monotone envelopes and the ceiling for tails.
pub const ENVELOPE_FLOOR: f64 = 2e-9;
/// Radius beyond which envelopes report their tail.
pub const T_MAX: f64 = 10.0;
/// Default cap on interval cell evaluations per envelope set.
pub const DEFAULT_CELL_CAP: u64 = 4_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnvelopeKind {
    B,
    DxB,
    DyB,
    W1,
    DxW1,
    DyW1,
    W2,
    DxW2,
    DyW2,
    LamB,
    LamW1,
    LamW2,
    DB,
    LamBInf,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 14] = [
        EnvelopeKind::B,
        EnvelopeKind::DxB,
        EnvelopeKind::DyB,
        EnvelopeKind::W1,
        EnvelopeKind::DxW1,
        EnvelopeKind::DyW1,
        EnvelopeKind::W2,
        EnvelopeKind::DxW2,
        EnvelopeKind::DyW2,
        EnvelopeKind::LamB,
        EnvelopeKind::LamW1,
        EnvelopeKind::LamW2,
        EnvelopeKind::DB,
        EnvelopeKind::LamBInf,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvelopeKind::B => "B",
            EnvelopeKind::DxB => "dxB",
            EnvelopeKind::DyB => "dyB",
            EnvelopeKind::W1 => "W1",
            EnvelopeKind::DxW1 => "dxW1",
            EnvelopeKind::DyW1 => "dyW1",
            EnvelopeKind::W2 => "W2",
            EnvelopeKind::DxW2 => "dxW2",
            EnvelopeKind::DyW2 => "dyW2",
            EnvelopeKind::LamB => "lamB",
            EnvelopeKind::LamW1 => "lamW1",
            EnvelopeKind::LamW2 => "lamW2",
            EnvelopeKind::DB => "DB",
            EnvelopeKind::LamBInf => "lamBinf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Monotone kinds bound `sup_{‖t‖ ≥ r}`; the others `sup_{‖t‖ = r}`.
    pub fn is_monotone(self) -> bool {
        !matches!(self, EnvelopeKind::DB | EnvelopeKind::LamBInf)
    }

    /// Wave kinds carry the extra `1/ζ` in their tails.
    pub fn is_wave(self) -> bool {
        matches!(
            self,
            EnvelopeKind::W1
                | EnvelopeKind::DxW1
                | EnvelopeKind::DyW1
                | EnvelopeKind::W2
                | EnvelopeKind::DxW2
                | EnvelopeKind::DyW2
                | EnvelopeKind::LamW1
                | EnvelopeKind::LamW2
        )
    }

    /// Wave eigenvalue kinds sweep offsets over `[-1/2, 1/2]²` instead of
    /// the canonical `[0, 1/2]²`.
    pub fn uses_extended_offsets(self) -> bool {
        matches!(self, EnvelopeKind::LamW1 | EnvelopeKind::LamW2)
    }
}

/// Partition parameters for one ζ band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvelopeGridSpec {
    /// Band index: `I_ζ(k1) = [0.1 + 0.05(k1-1), 0.1 + 0.05 k1]`.
    pub k1: u32,
    /// Cells per unit length in `t`; also the radial bins per unit.
    pub tres: u32,
    /// Cells per unit of `w = u/ζ`.
    pub ures: u32,
    pub cell_cap: u64,
}

/// Number of ζ bands.
pub const ZETA_BANDS: u32 = 16;

/// The ζ interval of band `k1`.
pub fn zeta_band(k1: u32) -> Result<Interval> {
    if !(1..=ZETA_BANDS).contains(&k1) {
        return Err(Error::InvalidArgument("k1 must lie in 1..=16"));
    }
    let lo = 0.1 + 0.8 * (k1 - 1) as f64 / 16.0;
    let hi = 0.1 + 0.8 * k1 as f64 / 16.0;
    Ok(Interval::new(lo.next_down(), hi.next_up()))
}

/// The band containing `zeta`, preferring the lower band on shared edges.
pub fn band_of(zeta: f64) -> Option<u32> {
    (1..=ZETA_BANDS).find(|&k| {
        let lo = 0.1 + 0.8 * (k - 1) as f64 / 16.0;
        let hi = 0.1 + 0.8 * k as f64 / 16.0;
        lo <= zeta && zeta <= hi
    })
}

impl EnvelopeGridSpec {
    pub fn new(k1: u32, tres: u32, ures: u32) -> Self {
        Self { k1, tres, ures, cell_cap: DEFAULT_CELL_CAP }
    }

    /// The fast profile: bins of width 1/10 in both `t` and `w`.
    pub fn desk(k1: u32) -> Self {
        Self::new(k1, 10, 10)
    }

    /// The fine profile: bins of width 1/40.
    pub fn fine(k1: u32) -> Self {
        Self::new(k1, 40, 40)
    }

    pub fn zeta(&self) -> Result<Interval> {
        zeta_band(self.k1)
    }

    pub fn validate(&self) -> Result<()> {
        zeta_band(self.k1)?;
        if self.tres == 0 || self.ures == 0 {
            return Err(Error::InvalidArgument("resolutions must be at least 1"));
        }
        Ok(())
    }

    fn t_cells_per_axis(&self) -> usize {
        (2.0 * T_MAX) as usize * self.tres as usize
    }

    fn half_u_cells(&self) -> usize {
        (self.ures as usize).div_ceil(2)
    }

    /// Interval evaluations needed to build all fourteen kinds.
    pub fn cell_count(&self) -> u64 {
        let t = self.t_cells_per_axis() as u64;
        let h = self.half_u_cells() as u64;
        t * t * (h * h + 4 * h * h)
    }
}

/// Piecewise-constant radial bound.
#[derive(Debug, Clone, PartialEq)]
pub struct StepEnvelope {
    pub kind: EnvelopeKind,
    pub monotone: bool,
    pub k1: u32,
    pub tres: u32,
    pub ures: u32,
    /// Bin edges `0 = r₀ < … < r_m = 10`; bin `i` is `(r_i, r_{i+1}]`.
    pub edges: Vec<f64>,
    pub values: Vec<f64>,
    /// Bound for `r > 10`.
    pub tail: f64,
}

impl StepEnvelope {
    pub fn bins(&self) -> usize {
        self.values.len()
    }

    fn bin_of(&self, r: f64) -> usize {
        let idx = self.edges.partition_point(|&e| e < r);
        idx.saturating_sub(1).min(self.values.len() - 1)
    }

    /// Value of the bin containing `r`, or the tail beyond the last edge.
    pub fn query(&self, r: f64) -> f64 {
        if r > *self.edges.last().expect("edges") {
            self.tail
        } else {
            self.values[self.bin_of(r)]
        }
    }

    /// Maximum over the bins meeting `[a, b]`.
    pub fn seg_max(&self, a: f64, b: f64) -> f64 {
        let last = *self.edges.last().expect("edges");
        let mut m = f64::NEG_INFINITY;
        if a <= last {
            let hi = if b > last { self.values.len() - 1 } else { self.bin_of(b) };
            for v in &self.values[self.bin_of(a)..=hi] {
                m = m.max(*v);
            }
        }
        if b > last {
            m = m.max(self.tail);
        }
        m
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(self.tail, f64::max)
    }
}

pub fn envelope_query(env: &StepEnvelope, r: f64) -> f64 {
    env.query(r)
}

pub fn envelope_seg_max(env: &StepEnvelope, a: f64, b: f64) -> f64 {
    env.seg_max(a, b)
}

/// All fourteen envelopes of one band.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSet {
    pub spec: EnvelopeGridSpec,
    pub zeta: Interval,
    envs: Vec<StepEnvelope>,
}

impl EnvelopeSet {
    /// Assembles a set from envelopes given in any order; every kind must
    /// appear exactly once and agree on band and resolution.
    pub fn from_envelopes(spec: EnvelopeGridSpec, mut envs: Vec<StepEnvelope>) -> Result<Self> {
        envs.sort_by_key(|e| e.kind);
        let ok = envs.len() == 14
            && envs
                .iter()
                .zip(EnvelopeKind::ALL)
                .all(|(e, k)| e.kind == k && e.k1 == spec.k1 && e.tres == spec.tres && e.ures == spec.ures);
        if !ok {
            return Err(Error::InvalidArgument("envelope set must hold each kind once for one band"));
        }
        Ok(Self { spec, zeta: spec.zeta()?, envs })
    }

    pub fn get(&self, kind: EnvelopeKind) -> &StepEnvelope {
        &self.envs[kind.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &StepEnvelope> {
        self.envs.iter()
    }

    pub fn into_vec(self) -> Vec<StepEnvelope> {
        self.envs
    }
}

/// Uniform bounds on the contribution of all spikes in layers nine and up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailConstants {
    pub eps_b: f64,
    pub eps_w: f64,
    pub eps_b_lambda: f64,
    pub eps_w_lambda: f64,
}

pub fn tail_constants(zeta: f64) -> Result<TailConstants> {
    if !(zeta > 1e-2 && zeta <= 1.0) {
        return Err(Error::OutOfValidatedRange("tail constants need 0.01 < zeta <= 1"));
    }
    Ok(TailConstants { eps_b: 2e-12, eps_w: 2e-10, eps_b_lambda: 2e-11, eps_w_lambda: 2e-9 })
}

/// Sums `6l · g(3l/2 - 3)` over `layers`, where `g` is the bump tail bound
/// at spacing `zeta`. The second value carries the wave factor `1/ζ`.
pub fn layer_tail_sum(zeta: f64, layers: core::ops::RangeInclusive<u32>) -> (f64, f64) {
    let mut s = 0.0;
    for l in layers {
        let r = 1.5 * l as f64 - 3.0;
        s += 6.0 * l as f64 * bump_tail_bound(r, zeta);
    }
    (s, s / zeta)
}

// ---------------------------------------------------------------------------
// Interval evaluation of one (ζ, w, t) cell.

fn meet(a: Interval, b: Interval) -> Interval {
    let lo = a.lo.max(b.lo);
    let hi = a.hi.min(b.hi);
    if lo <= hi {
        Interval { lo, hi }
    } else {
        a.hull(b)
    }
}

fn widen_rel(v: f64, ulps: f64, up: bool) -> f64 {
    let d = v.abs() * ulps * f64::EPSILON + f64::MIN_POSITIVE;
    if up {
        v + d
    } else {
        v - d
    }
}

/// Encloses `(e^{ζx} - 1)/ζ`, which increases in both `ζ > 0` and `x`.
fn phi(z: Interval, x: Interval) -> Interval {
    let f = |zz: f64, xx: f64| libm::expm1(zz * xx) / zz;
    Interval { lo: widen_rel(f(z.lo, x.lo), 8.0, false), hi: widen_rel(f(z.hi, x.hi), 8.0, true) }
}

fn one() -> Interval {
    Interval::point(1.0)
}

struct TCell {
    x: Interval2,
    nsq: Interval,
    norm: Interval,
    lo_bin: usize,
    hi_bin: usize,
}

/// Per-sample data for one cell.
struct Sample {
    d: [Interval; 2],
    q: Interval,
    e: Interval,
}

fn samples(z: Interval, w: Interval2, c: &TCell) -> [Sample; 3] {
    let px = z * w.x;
    let py = z * w.y;
    let s = [[px.neg(), py.neg()], [z * (one() - w.x), py.neg()], [px.neg(), z * (one() - w.y)]];
    let half = Interval::point(0.5);
    s.map(|si| {
        let d = [si[0] - c.x.x, si[1] - c.x.y];
        let q = iv_norm_sq(Interval2::new(d[0], d[1]));
        let dotp = si[0] * c.x.x + si[1] * c.x.y;
        let e1 = dotp - half * c.nsq;
        let e2 = half * (iv_norm_sq(Interval2::new(si[0], si[1])) - q);
        Sample { d, q, e: meet(e1, e2).exp() }
    })
}

/// Upper bounds of every canonical-offset kind over one cell.
fn eval_canonical(z: Interval, w: Interval2, c: &TCell, out: &mut [f64; 14]) {
    let [s1, s2, s3] = samples(z, w, c);
    let beta = [one() - w.x - w.y, w.x, w.y];
    let px = z * w.x;
    let py = z * w.y;
    let phx = phi(z, c.x.x);
    let phy = phi(z, c.x.y);

    let b_direct = beta[0] * s1.e + beta[1] * s2.e + beta[2] * s3.e;
    let b = meet(b_direct, s1.e * (one() + px * phx + py * phy));

    let dxb = meet(beta[0] * s1.d[0] * s1.e + beta[1] * s2.d[0] * s2.e + beta[2] * s3.d[0] * s3.e, s1.d[0] * b + px * s2.e);
    let dyb = meet(beta[0] * s1.d[1] * s1.e + beta[1] * s2.d[1] * s2.e + beta[2] * s3.d[1] * s3.e, s1.d[1] * b + py * s3.e);

    let divz = |v: Interval| v.div(z).expect("zeta band excludes zero");
    let w1 = meet(divz(s2.e - s1.e), s1.e * phx);
    let dxw1 = meet(divz(s2.d[0] * s2.e - s1.d[0] * s1.e), s1.d[0] * w1 + s2.e);
    let dyw1 = meet(divz(s2.d[1] * s2.e - s1.d[1] * s1.e), s1.d[1] * w1);
    let w2 = meet(divz(s3.e - s1.e), s1.e * phy);
    let dxw2 = meet(divz(s3.d[0] * s3.e - s1.d[0] * s1.e), s1.d[0] * w2);
    let dyw2 = meet(divz(s3.d[1] * s3.e - s1.d[1] * s1.e), s1.d[1] * w2 + s3.e);

    let qm = |s: &Sample| s.q - one();
    let lam_inf = beta[0] * qm(&s1) * s1.e + beta[1] * qm(&s2) * s2.e + beta[2] * qm(&s3) * s3.e;
    let qa = |s: &Sample| (s.q - one()).max(one());
    let lam_b = beta[0] * qa(&s1) * s1.e + beta[1] * qa(&s2) * s2.e + beta[2] * qa(&s3) * s3.e;

    // Directional derivative along t/‖t‖, capped by Cauchy–Schwarz.
    let gx = dxb.mag();
    let gy = dyb.mag();
    let cs = Interval::point(gx).sqr().add(Interval::point(gy).sqr()).sqrt().map(|v| v.hi).unwrap_or(f64::INFINITY);
    let mut db = cs;
    if c.norm.lo > 0.0 {
        let num = dxb * c.x.x + dyb * c.x.y;
        if let Ok(q) = num.div(c.norm) {
            db = db.min(q.hi);
        }
    }

    let vals = [
        (EnvelopeKind::B, b.mag()),
        (EnvelopeKind::DxB, dxb.mag()),
        (EnvelopeKind::DyB, dyb.mag()),
        (EnvelopeKind::W1, w1.mag()),
        (EnvelopeKind::DxW1, dxw1.mag()),
        (EnvelopeKind::DyW1, dyw1.mag()),
        (EnvelopeKind::W2, w2.mag()),
        (EnvelopeKind::DxW2, dxw2.mag()),
        (EnvelopeKind::DyW2, dyw2.mag()),
        (EnvelopeKind::LamB, lam_b.hi),
        (EnvelopeKind::DB, db),
        (EnvelopeKind::LamBInf, lam_inf.hi),
    ];
    for (k, v) in vals {
        let slot = &mut out[k.index()];
        *slot = slot.max(v);
    }
}

/// Wave eigenvalue bounds over one cell with an extended offset box.
fn eval_extended(z: Interval, w: Interval2, c: &TCell, out: &mut [f64; 14]) {
    let [s1, s2, s3] = samples(z, w, c);
    let qa = |s: &Sample| (s.q - one()).max(one()) * s.e;
    let a1 = qa(&s1);
    let l1 = (a1 + qa(&s2)).div(z).expect("zeta band excludes zero");
    let l2 = (a1 + qa(&s3)).div(z).expect("zeta band excludes zero");
    let o1 = &mut out[EnvelopeKind::LamW1.index()];
    *o1 = o1.max(l1.hi);
    let o2 = &mut out[EnvelopeKind::LamW2.index()];
    *o2 = o2.max(l2.hi);
}

/// Tail value for `r > 10` for a kind over band `z`.
fn tail_value(kind: EnvelopeKind, z: Interval) -> f64 {
    // Eigenvalue sums and directional derivatives are bounded by four
    // second partials or two first partials respectively.
    let base = 4.0 * bump_tail_bound(T_MAX, z.hi);
    let v = if kind.is_wave() { base / z.lo } else { base };
    widen_rel(v, 16.0, true)
}

fn edges(tres: u32) -> Vec<f64> {
    let m = (T_MAX as usize) * tres as usize;
    (0..=m).map(|k| k as f64 / tres as f64).collect()
}

fn bin_index(edges: &[f64], r: f64) -> usize {
    edges.partition_point(|&e| e < r).saturating_sub(1).min(edges.len() - 2)
}

fn t_row_cells(spec: &EnvelopeGridSpec, j: usize, e: &[f64]) -> Vec<TCell> {
    let n = spec.t_cells_per_axis();
    let tres = spec.tres as f64;
    let coord = |k: usize| (k as f64 - T_MAX * tres) / tres;
    let xj = Interval { lo: coord(j), hi: coord(j + 1) };
    (0..n)
        .map(|k| {
            let yk = Interval { lo: coord(k), hi: coord(k + 1) };
            let x = Interval2::new(xj, yk);
            let nsq = iv_norm_sq(x);
            let norm = nsq.sqrt().expect("squared norm is nonnegative");
            TCell { x, nsq, norm, lo_bin: bin_index(e, norm.lo), hi_bin: bin_index(e, norm.hi) }
        })
        .collect()
}

fn u_cells(spec: &EnvelopeGridSpec, extended: bool) -> Vec<Interval2> {
    let h = spec.half_u_cells() as i64;
    let ures = spec.ures as f64;
    let range: Vec<i64> = if extended { (-h..h).collect() } else { (0..h).collect() };
    let axis: Vec<Interval> = range.iter().map(|&j| Interval { lo: j as f64 / ures, hi: (j + 1) as f64 / ures }).collect();
    let mut v = Vec::with_capacity(axis.len() * axis.len());
    for a in &axis {
        for b in &axis {
            v.push(Interval2::new(*a, *b));
        }
    }
    v
}

/// Per-kind bin maxima accumulated over a set of rows.
struct Acc {
    top: Vec<[f64; 14]>,
}

impl Acc {
    fn new(m: usize) -> Self {
        Self { top: vec![[f64::NEG_INFINITY; 14]; m] }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for (a, b) in self.top.iter_mut().zip(other.top) {
            for k in 0..14 {
                a[k] = a[k].max(b[k]);
            }
        }
        self
    }
}

fn process_row(spec: &EnvelopeGridSpec, z: Interval, j: usize, e: &[f64], canon: &[Interval2], ext: &[Interval2]) -> Acc {
    let mut acc = Acc::new(e.len() - 1);
    for c in t_row_cells(spec, j, e) {
        let mut out = [f64::NEG_INFINITY; 14];
        for w in canon {
            eval_canonical(z, *w, &c, &mut out);
        }
        for w in ext {
            eval_extended(z, *w, &c, &mut out);
        }
        for k in EnvelopeKind::ALL {
            let v = out[k.index()];
            if k.is_monotone() {
                let slot = &mut acc.top[c.hi_bin][k.index()];
                *slot = slot.max(v);
            } else {
                for b in c.lo_bin..=c.hi_bin {
                    let slot = &mut acc.top[b][k.index()];
                    *slot = slot.max(v);
                }
            }
        }
    }
    acc
}

/// Builds all fourteen envelopes of a band in one pass over the cells.
pub fn build_envelopes(spec: &EnvelopeGridSpec) -> Result<EnvelopeSet> {
    spec.validate()?;
    let needed = spec.cell_count();
    if needed > spec.cell_cap {
        return Err(Error::ResourceBudgetExceeded { needed, cap: spec.cell_cap });
    }
    let z = spec.zeta()?;
    let e = edges(spec.tres);
    let canon = u_cells(spec, false);
    let ext = u_cells(spec, true);
    let rows = spec.t_cells_per_axis();

    #[cfg(feature = "parallel")]
    let acc = {
        use rayon::prelude::*;
        (0..rows).into_par_iter().map(|j| process_row(spec, z, j, &e, &canon, &ext)).reduce(|| Acc::new(e.len() - 1), Acc::merge)
    };
    #[cfg(not(feature = "parallel"))]
    let acc = (0..rows).map(|j| process_row(spec, z, j, &e, &canon, &ext)).fold(Acc::new(e.len() - 1), Acc::merge);

    let m = e.len() - 1;
    let envs = EnvelopeKind::ALL
        .into_iter()
        .map(|k| {
            let mut values: Vec<f64> = acc.top.iter().map(|b| b[k.index()]).collect();
            if k.is_monotone() {
                let mut run = f64::NEG_INFINITY;
                for v in values.iter_mut().rev() {
                    run = run.max(*v);
                    *v = run.max(ENVELOPE_FLOOR);
                }
            }
            debug_assert_eq!(values.len(), m);
            StepEnvelope {
                kind: k,
                monotone: k.is_monotone(),
                k1: spec.k1,
                tres: spec.tres,
                ures: spec.ures,
                edges: e.clone(),
                values,
                tail: tail_value(k, z),
            }
        })
        .collect();
    EnvelopeSet::from_envelopes(*spec, envs)
}

/// Builds a single envelope. Building the whole set costs about the same,
/// so prefer [`build_envelopes`] when more than one kind is needed.
pub fn build_envelope(spec: &EnvelopeGridSpec, kind: EnvelopeKind) -> Result<StepEnvelope> {
    Ok(build_envelopes(spec)?.get(kind).clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(values: Vec<f64>, tail: f64) -> StepEnvelope {
        let m = values.len();
        StepEnvelope {
            kind: EnvelopeKind::DB,
            monotone: false,
            k1: 1,
            tres: 1,
            ures: 1,
            edges: (0..=m).map(|k| k as f64 * T_MAX / m as f64).collect(),
            values,
            tail,
        }
    }

    #[test]
    fn query_and_seg_max() {
        let e = tiny(vec![3.0, -1.0, 2.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-12);
        assert_eq!(e.query(0.0), 3.0);
        assert_eq!(e.query(1.0), 3.0);
        assert_eq!(e.query(1.5), -1.0);
        assert_eq!(e.query(10.5), 1e-12);
        assert_eq!(e.seg_max(1.2, 1.8), -1.0);
        assert_eq!(e.seg_max(1.2, 2.0), -1.0);
        assert_eq!(e.seg_max(1.2, 2.1), 2.0);
        assert_eq!(e.seg_max(0.0, 10.0), 3.0);
        assert_eq!(e.seg_max(9.5, 11.0), 1e-12);
    }

    #[test]
    fn bands() {
        let z = zeta_band(5).unwrap();
        assert!(z.lo <= 0.3 && z.hi >= 0.35 && z.hi < 0.3500001);
        assert_eq!(band_of(0.32), Some(5));
        assert!(zeta_band(0).is_err() && zeta_band(17).is_err());
    }

    #[test]
    fn phi_brackets() {
        let z = Interval::new(0.3, 0.35);
        let x = Interval::new(-0.2, 0.1);
        let p = phi(z, x);
        for &zz in &[0.3, 0.32, 0.35] {
            for &xx in &[-0.2, -0.05, 0.0, 0.1] {
                let v = libm::expm1(zz * xx) / zz;
                assert!(p.contains(v));
            }
        }
    }

    #[test]
    fn tails_are_tiny() {
        let t = tail_constants(0.5).unwrap();
        assert_eq!((t.eps_b, t.eps_w, t.eps_b_lambda, t.eps_w_lambda), (2e-12, 2e-10, 2e-11, 2e-9));
        assert!(tail_constants(0.009).is_err());
        for k in EnvelopeKind::ALL {
            assert!(tail_value(k, zeta_band(1).unwrap()) <= ENVELOPE_FLOOR);
        }
    }
}
