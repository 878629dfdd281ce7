//! Hexagonal partitions of the plane and the distances built on them.
//!
//! Cells are regular hexagons of circumradius `Δ/2`, so each has diameter
//! `Δ` and holds at most one spike of a support with separation `Δ`. The
//! cell `U₀` is centred at the origin and cell `(q, r)` (axial coordinates)
//! lies in layer `(|q| + |r| + |q + r|)/2`.

use alloc::vec::Vec;

use crate::{norm2, sub, Error, Result, Vec2};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Number of layers whose cells are summed explicitly.
pub const INNER_LAYERS: u32 = 8;
/// Cells in layers `1..=8`.
pub const N8: usize = 216;

/// Which way the hexagons point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HexOrientation {
    /// Vertical edges left and right; vertices at the top and bottom.
    #[default]
    PointyTop,
    /// Horizontal edges top and bottom; vertices on the x-axis.
    FlatTop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexCell {
    pub q: i32,
    pub r: i32,
    pub layer: u32,
    pub center: Vec2,
    /// Counter-clockwise.
    pub vertices: [Vec2; 6],
}

pub fn hex_layer(q: i32, r: i32) -> u32 {
    ((q.abs() + r.abs() + (q + r).abs()) / 2) as u32
}

fn cell_at(q: i32, r: i32, delta: f64, orientation: HexOrientation) -> HexCell {
    let rad = 0.5 * delta;
    let (center, phase) = match orientation {
        HexOrientation::PointyTop => ([rad * SQRT3 * (q as f64 + 0.5 * r as f64), 1.5 * rad * r as f64], 30.0),
        HexOrientation::FlatTop => ([1.5 * rad * q as f64, rad * SQRT3 * (r as f64 + 0.5 * q as f64)], 0.0),
    };
    let mut vertices = [[0.0; 2]; 6];
    for (k, v) in vertices.iter_mut().enumerate() {
        let a = (phase + 60.0 * k as f64).to_radians();
        *v = [center[0] + rad * libm::cos(a), center[1] + rad * libm::sin(a)];
    }
    HexCell { q, r, layer: hex_layer(q, r), center, vertices }
}

/// Cells of layers `1..=layers` with their lower distance bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct HexPartition {
    pub delta: f64,
    pub orientation: HexOrientation,
    pub cells: Vec<HexCell>,
    d_u: Vec<f64>,
}

pub fn build_partition(delta: f64) -> HexPartition {
    build_partition_with(delta, HexOrientation::default(), INNER_LAYERS)
}

pub fn build_partition_with(delta: f64, orientation: HexOrientation, layers: u32) -> HexPartition {
    let l = layers as i32;
    let mut cells = Vec::new();
    for q in -l..=l {
        for r in (-l).max(-q - l)..=l.min(-q + l) {
            if q == 0 && r == 0 {
                continue;
            }
            cells.push(cell_at(q, r, delta, orientation));
        }
    }
    cells.sort_by_key(|c| (c.layer, c.q, c.r));
    let d_u = cells.iter().map(|c| d_u(c, delta)).collect();
    HexPartition { delta, orientation, cells, d_u }
}

impl HexPartition {
    /// `d_U` of cell `i` (see [`d_u`]).
    pub fn d_u(&self, i: usize) -> f64 {
        self.d_u[i]
    }

    pub fn d_u_values(&self) -> &[f64] {
        &self.d_u
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Axial coordinates of the cell containing `p`.
    pub fn locate(&self, p: Vec2) -> (i32, i32) {
        let rad = 0.5 * self.delta;
        let (qf, rf) = match self.orientation {
            HexOrientation::PointyTop => ((SQRT3 / 3.0 * p[0] - p[1] / 3.0) / rad, (2.0 / 3.0 * p[1]) / rad),
            HexOrientation::FlatTop => ((2.0 / 3.0 * p[0]) / rad, (-p[0] / 3.0 + SQRT3 / 3.0 * p[1]) / rad),
        };
        cube_round(qf, rf)
    }
}

fn cube_round(qf: f64, rf: f64) -> (i32, i32) {
    let sf = -qf - rf;
    let (mut q, mut r, s) = (libm::round(qf), libm::round(rf), libm::round(sf));
    let (dq, dr, ds) = ((q - qf).abs(), (r - rf).abs(), (s - sf).abs());
    if dq > dr && dq > ds {
        q = -r - s;
    } else if dr > ds {
        r = -q - s;
    }
    (q as i32, r as i32)
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Whether `p` lies in the closed convex counter-clockwise polygon, with
/// absolute slack `tol`.
pub fn point_in_convex(p: Vec2, poly: &[Vec2], tol: f64) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = sub(b, a);
        cross(e, sub(p, a)) >= -tol * norm2(e)
    })
}

/// Closest point to `p` on segment `[a, b]`.
pub fn closest_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let e = sub(b, a);
    let l2 = dot(e, e);
    if l2 == 0.0 {
        return a;
    }
    let t = (dot(sub(p, a), e) / l2).clamp(0.0, 1.0);
    [a[0] + t * e[0], a[1] + t * e[1]]
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    norm2(sub(p, closest_on_segment(p, a, b)))
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    cross(sub(b, a), sub(c, a))
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

pub fn segments_intersect(p1: Vec2, q1: Vec2, p2: Vec2, q2: Vec2) -> bool {
    let d1 = orient(p2, q2, p1);
    let d2 = orient(p2, q2, q1);
    let d3 = orient(p1, q1, p2);
    let d4 = orient(p1, q1, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(p2, q2, p1))
        || (d2 == 0.0 && on_segment(p2, q2, q1))
        || (d3 == 0.0 && on_segment(p1, q1, p2))
        || (d4 == 0.0 && on_segment(p1, q1, q2))
}

pub fn segment_segment_distance(p1: Vec2, q1: Vec2, p2: Vec2, q2: Vec2) -> f64 {
    if segments_intersect(p1, q1, p2, q2) {
        return 0.0;
    }
    point_segment_distance(p1, p2, q2)
        .min(point_segment_distance(q1, p2, q2))
        .min(point_segment_distance(p2, p1, q1))
        .min(point_segment_distance(q2, p1, q1))
}

/// Distance between the segment `[a, b] × {0}` and a hexagon.
pub fn segment_cell_distance(a: f64, b: f64, cell: &HexCell) -> f64 {
    let (p, q) = ([a, 0.0], [b, 0.0]);
    if point_in_convex(p, &cell.vertices, 0.0) || point_in_convex(q, &cell.vertices, 0.0) {
        return 0.0;
    }
    (0..6).map(|i| segment_segment_distance(p, q, cell.vertices[i], cell.vertices[(i + 1) % 6])).fold(f64::INFINITY, f64::min)
}

/// Parameters `t ∈ [0, 1]` where segment `a + t(b - a)` crosses the circle
/// `‖x - c‖ = radius`, ascending.
fn segment_circle_params(a: Vec2, b: Vec2, c: Vec2, radius: f64) -> Vec<f64> {
    let e = sub(b, a);
    let f = sub(a, c);
    let qa = dot(e, e);
    let qb = 2.0 * dot(f, e);
    let qc = dot(f, f) - radius * radius;
    let disc = qb * qb - 4.0 * qa * qc;
    let mut out = Vec::new();
    if qa == 0.0 || disc < 0.0 {
        return out;
    }
    let sq = libm::sqrt(disc);
    for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
        if (-1e-12..=1.0 + 1e-12).contains(&t) {
            out.push(t.clamp(0.0, 1.0));
        }
    }
    out
}

/// Distance from `[a, b] × {0}` to `cell ∖ B°(0, Δ)`, the part of the cell
/// where a spike at separation `Δ` from the origin may sit.
///
/// Infinite if the cell lies inside the open disk.
pub fn segment_feasible_distance(a: f64, b: f64, cell: &HexCell, delta: f64) -> f64 {
    // The segment itself may cross the feasible part of the cell.
    let outside = [(a.max(delta), b), (a, b.min(-delta))];
    if outside.iter().any(|&(lo, hi)| lo <= hi && segment_cell_distance(lo, hi, cell) == 0.0) {
        return 0.0;
    }
    let (p, q) = ([a, 0.0], [b, 0.0]);
    let mut best = f64::INFINITY;
    let mut arc_angles = Vec::new();
    for i in 0..6 {
        let u = cell.vertices[i];
        let v = cell.vertices[(i + 1) % 6];
        let ts = segment_circle_params(u, v, [0.0, 0.0], delta);
        let at = |t: f64| [u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])];
        for &t in &ts {
            let x = at(t);
            arc_angles.push(libm::atan2(x[1], x[0]));
        }
        // Portions of the edge outside the open disk.
        let pieces: Vec<(f64, f64)> = match ts.len() {
            2 => alloc::vec![(0.0, ts[0]), (ts[1], 1.0)],
            1 => {
                if norm2(u) >= delta {
                    alloc::vec![(0.0, ts[0])]
                } else {
                    alloc::vec![(ts[0], 1.0)]
                }
            }
            _ => {
                if norm2(at(0.5)) >= delta {
                    alloc::vec![(0.0, 1.0)]
                } else {
                    Vec::new()
                }
            }
        };
        for (t0, t1) in pieces {
            if t1 >= t0 {
                let (x0, x1) = (at(t0), at(t1));
                if norm2(at(0.5 * (t0 + t1))) >= delta * (1.0 - 1e-12) {
                    best = best.min(segment_segment_distance(p, q, x0, x1));
                }
            }
        }
    }
    // Nearest point of the arc of the circle lying inside the cell.
    let theta = if point_in_convex([delta, 0.0], &cell.vertices, 0.0) {
        Some(0.0)
    } else {
        arc_angles.into_iter().min_by(|x, y| x.abs().total_cmp(&y.abs()))
    };
    if let Some(th) = theta {
        let c = delta * libm::cos(th);
        let s = c.clamp(a, b);
        best = best.min(libm::hypot(s - c, delta * libm::sin(th)));
    }
    best
}

/// A disk `‖x - center‖ < radius`, open unless stated otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Vec2,
    pub radius: f64,
}

fn circle_circle(a: &Disk, b: &Disk) -> Vec<Vec2> {
    let d = sub(b.center, a.center);
    let dist = norm2(d);
    if dist == 0.0 || dist > a.radius + b.radius || dist < (a.radius - b.radius).abs() {
        return Vec::new();
    }
    let x = (dist * dist + a.radius * a.radius - b.radius * b.radius) / (2.0 * dist);
    let h = libm::sqrt((a.radius * a.radius - x * x).max(0.0));
    let ex = [d[0] / dist, d[1] / dist];
    let m = [a.center[0] + x * ex[0], a.center[1] + x * ex[1]];
    alloc::vec![[m[0] - h * ex[1], m[1] + h * ex[0]], [m[0] + h * ex[1], m[1] - h * ex[0]]]
}

/// Nearest point of a closed convex polygon to the origin.
pub fn nearest_point_of_polygon(poly: &[Vec2]) -> Vec2 {
    if point_in_convex([0.0, 0.0], poly, 0.0) {
        return [0.0, 0.0];
    }
    let n = poly.len();
    (0..n)
        .map(|i| closest_on_segment([0.0, 0.0], poly[i], poly[(i + 1) % n]))
        .min_by(|x, y| norm2(*x).total_cmp(&norm2(*y)))
        .expect("polygon has vertices")
}

/// `inf ‖v‖` over a closed convex polygon (counter-clockwise) minus a union
/// of open disks.
///
/// The infimum is attained on the boundary of the feasible set unless the
/// polygon's own nearest point survives. Along an edge the norm is convex
/// and along a circle it is monotone between the circle's nearest and
/// farthest points, so it suffices to test the polygon's nearest point,
/// vertices, edge projections, edge/circle and circle/circle crossings, and
/// each circle's nearest point.
pub fn min_norm_outside(poly: &[Vec2], exclusions: &[Disk]) -> Result<f64> {
    let n = poly.len();
    let scale = poly.iter().map(|v| norm2(*v)).fold(1.0, f64::max);
    let tol = 1e-12 * scale;
    let mut cands: Vec<Vec2> = Vec::new();
    cands.push(nearest_point_of_polygon(poly));
    for i in 0..n {
        let (u, v) = (poly[i], poly[(i + 1) % n]);
        cands.push(u);
        cands.push(closest_on_segment([0.0, 0.0], u, v));
        for d in exclusions {
            for t in segment_circle_params(u, v, d.center, d.radius) {
                cands.push([u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])]);
            }
        }
    }
    for (i, d) in exclusions.iter().enumerate() {
        let cn = norm2(d.center);
        if cn > 0.0 {
            cands.push([d.center[0] * (1.0 - d.radius / cn), d.center[1] * (1.0 - d.radius / cn)]);
        } else {
            for a in [0.0f64, 90.0, 180.0, 270.0] {
                let a = a.to_radians();
                cands.push([d.radius * libm::cos(a), d.radius * libm::sin(a)]);
            }
        }
        for e in &exclusions[i + 1..] {
            cands.extend(circle_circle(d, e));
        }
    }
    let feasible = |c: &Vec2| point_in_convex(*c, poly, tol) && exclusions.iter().all(|d| norm2(sub(*c, d.center)) >= d.radius - tol);
    cands.iter().filter(|c| feasible(c)).map(|c| norm2(*c)).min_by(f64::total_cmp).ok_or(Error::EmptyFeasible)
}

/// `inf{‖x‖ : x ∈ U, ‖x‖ ≥ Δ}` for one cell.
pub fn d_u(cell: &HexCell, delta: f64) -> f64 {
    min_norm_outside(&cell.vertices, &[Disk { center: [0.0, 0.0], radius: delta }]).unwrap_or(f64::INFINITY)
}

/// `(3l - 2)Δ/4 - ‖z‖`: a lower bound on the distance from any point of a
/// layer-`l` cell to a point `z`.
pub fn layer_distance_bound(l: u32, delta: f64, z_norm: f64) -> f64 {
    (3.0 * l as f64 - 2.0) * delta / 4.0 - z_norm
}

/// Centres of the nine cells around a point that is at least `Δ/2` from
/// every spike, in the numbering used by [`norms9_bounds`]. The point sits
/// at the centre of a pointy-top cell; `U₁` is to its right, `U₂` to its
/// left, `U₃`/`U₄` upper and lower left, `U₅`/`U₆` upper and lower right,
/// `U₇`/`U₈` one step further out on the right and `U₉` two cells right.
pub fn norms9_cells(delta: f64) -> [HexCell; 9] {
    let p = HexOrientation::PointyTop;
    [(1, 0), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 1), (2, -1), (2, 0)].map(|(q, r)| cell_at(q, r, delta, p))
}

fn quad_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let s = libm::sqrt(disc);
    alloc::vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
}

/// Lower bounds on `‖t₁‖, …, ‖t₉‖` for the spikes nearest a point at least
/// `Δ/2` from the support, given `t₁ ∈ [l1, r1] × {0}` and the first
/// coordinate of `t₂ ∈ U₂` (upper half) in `[l2, r2]`.
pub fn norms9_bounds(l1: f64, r1: f64, l2: f64, r2: f64, delta: f64) -> Result<[f64; 9]> {
    let d = delta;
    let tol = 1e-12 * d;
    if !(d > 0.0) || !(0.5 * d - tol <= l1 && l1 <= r1 && r1 <= d + tol) {
        return Err(Error::InvalidCase("need delta/2 <= l1 <= r1 <= delta"));
    }
    let u2 = -SQRT3 * d / 2.0;
    let half_w = SQRT3 * d / 4.0;
    if !(l2 <= r2 && l2 >= u2 - half_w - tol && r2 <= u2 + half_w + tol) {
        return Err(Error::InvalidCase("(l2, 0) and (r2, 0) must lie in U2"));
    }
    let h = SQRT3 * d / 2.0;
    let t1 = l1;
    let t2 = r2.abs().max(l1);
    let t3 = l1.max(libm::sqrt((d * d - l2 * l2).max(0.0)));
    let t5 = l1.max(libm::sqrt((d * d - r1 * r1).max(0.0)));
    let c7 = if 0.5 * (l1 + r1) <= h { l1 } else { r1 };
    let t7 = libm::hypot(h, libm::sqrt((d * d - (h - c7) * (h - c7)).max(0.0)));
    // U₉'s upper-left and upper-right edges meet at (√3Δ, Δ/2).
    let (m, c, x_lo, x_hi) = if l1 <= h {
        (1.0 / SQRT3, -0.5 * d, 3.0 * SQRT3 * d / 4.0, SQRT3 * d)
    } else {
        (-1.0 / SQRT3, 1.5 * d, SQRT3 * d, 5.0 * SQRT3 * d / 4.0)
    };
    let roots = quad_roots(1.0 + m * m, 2.0 * m * c - 2.0 * l1, l1 * l1 + c * c - d * d);
    let t9 = roots
        .into_iter()
        .filter(|&y1| y1 >= x_lo - tol && y1 <= x_hi + tol)
        .map(|y1| libm::hypot(y1, m * y1 + c))
        .min_by(f64::total_cmp)
        .unwrap_or(3.0 * SQRT3 * d / 4.0);
    Ok([t1, t2, t3, t1, t5, t5, t7, t7, t9])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_counts() {
        let p = build_partition(1.0);
        assert_eq!(p.len(), N8);
        for l in 1..=8u32 {
            assert_eq!(p.cells.iter().filter(|c| c.layer == l).count(), 6 * l as usize);
        }
    }

    #[test]
    fn first_layer_touches_circle() {
        let p = build_partition(3.0);
        for (i, c) in p.cells.iter().enumerate() {
            if c.layer == 1 {
                assert!((p.d_u(i) - 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn layer_bound_examples() {
        assert_eq!(layer_distance_bound(9, 2.0, 2.0), 10.5);
        assert_eq!(layer_distance_bound(2, 3.0, 0.0), 3.0);
        assert_eq!(layer_distance_bound(5, 2.0, 1.0) - layer_distance_bound(4, 2.0, 1.0), 1.5);
    }

    #[test]
    fn norms9_examples() {
        let d = 2.0;
        let b = norms9_bounds(d / 2.0, d / 2.0, -0.9 * d, -0.6 * d, d).unwrap();
        assert!((b[4] - SQRT3 * d / 2.0).abs() < 1e-12);
        let b = norms9_bounds(0.6 * d, d, -0.9 * d, -0.6 * d, d).unwrap();
        assert_eq!(b[4], 0.6 * d);
        assert!(norms9_bounds(0.4 * d, d, -0.9 * d, -0.6 * d, d).is_err());
    }

    #[test]
    fn locate_finds_centres() {
        for o in [HexOrientation::PointyTop, HexOrientation::FlatTop] {
            let p = build_partition_with(1.7, o, 3);
            for c in &p.cells {
                assert_eq!(p.locate(c.center), (c.q, c.r));
            }
        }
    }
}
