//! Closed-form results: the strip displacement bound, wedge escape
//! regions, circle caustics and inscribed polygons, equilateral-triangle
//! periodicity, and the strip nonrecurrence scan.

use crate::collision::{
    collision_matrix, collision_matrix_at, frame_rotation, strip_cycle_matrix, wedge_alpha,
    wedge_axis, wedge_cycle_matrix,
};
use crate::flow::Orbit;
use crate::math::Mat3;
use crate::{Error, Result, VelocityState};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

/// Default number of cycle iterates examined when deciding numerically
/// whether a wedge rotation angle is a rational multiple of 2 pi.
pub const CYCLE_SEARCH_LIMIT: usize = 10_000;
/// Angular tolerance for that rationality decision.
pub const CYCLE_ANGLE_TOL: f64 = 1e-9;

/// Maximal displacement of a strip orbit in the rotational coordinate,
/// `sqrt(3/2 (1/v2^2 - 1))` for constant vertical velocity `v2`.
///
/// The bound is attained (and only approached) along the astroid of
/// chord segments in the rotational-parallel plane; the parallel extent
/// of the same region is larger by a factor sqrt(2).
pub fn strip_bound(v2: f64) -> Result<f64> {
    if v2 == 0.0 {
        return Err(Error::UnboundedDisplacement);
    }
    if !(v2.abs() <= 1.0) {
        return Err(Error::BadParameter {
            op: "strip_bound",
            constraint: "|v2| must not exceed the unit speed",
            value: v2,
        });
    }
    Ok((1.5 * (1.0 / (v2 * v2) - 1.0)).sqrt())
}

/// Smallest `n <= max_n` with `n * alpha` within `angle_tol` of a multiple
/// of 2 pi, where `alpha` is the cycle rotation angle of the `theta` wedge;
/// `None` means the rotation is treated as irrational.
///
/// Decided on powers of the cycle matrix rather than on an arccos value:
/// near `alpha = pi` the inverse cosine loses half the working precision,
/// while `||S^n - I||_F = 2 sqrt2 |sin(n alpha / 2)|` stays fully accurate.
pub fn velocity_cycle_order(theta: f64, max_n: usize, angle_tol: f64) -> Result<Option<usize>> {
    let s = wedge_cycle_matrix(theta)?;
    let id = Mat3::identity();
    let dist_tol = SQRT_2 * angle_tol;
    let mut m = Mat3::identity();
    for n in 1..=max_n {
        m = m.mul_mat(&s);
        if m.distance(&id) < dist_tol {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// How a wedge velocity relates to the escape region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Escape,
    NonEscape,
    /// Within the tolerance band of the region boundary; undecided.
    Boundary,
}

/// Shape of the non-escape region on the velocity sphere.
#[derive(Clone, Debug)]
pub enum EscapeRegionKind {
    /// Irrational rotation angle: antipodal spherical caps about the axis.
    Cap { angular_radius: f64 },
    /// Rational rotation: a curvilinear regular polygon, fixed with sides
    /// permuted by the cycle rotation.
    CurvilinearPolygon { vertices: Vec<[f64; 3]>, order: usize },
}

/// The escape-region data of a wedge: axis, direct-escape sector, and the
/// invariant non-escape region around the axis.
#[derive(Clone, Debug)]
pub struct EscapeRegion {
    pub theta: f64,
    pub alpha: f64,
    pub axis: VelocityState,
    /// Velocity cycle order when the rotation is rational.
    pub cycle: Option<usize>,
    pub kind: EscapeRegionKind,
    /// Unit normals of the two great circles bounding the direct-escape
    /// sector (planar escape directions lifted to the sphere).
    pub sector_normals: [[f64; 3]; 2],
    /// Single-collision maps of the two walls (right wall first).
    wall_maps: [Mat3; 2],
}

/// Signed membership margin of `v` in the direct-escape sector: positive
/// inside, negative outside, in radians of planar direction.
fn sector_margin(theta: f64, v: VelocityState) -> f64 {
    let planar = v.planar();
    if planar.norm() < 1e-300 {
        return -FRAC_PI_2; // rotation poles never escape directly
    }
    let phi = planar.angle();
    let up = angle_dist(phi, FRAC_PI_2);
    let down = angle_dist(phi, -FRAC_PI_2);
    theta / 2.0 - up.min(down)
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % TAU;
    if d > PI {
        d -= TAU;
    } else if d < -PI {
        d += TAU;
    }
    d.abs()
}

/// Build the escape-region description for a wedge of angle `theta`.
pub fn escape_region(theta: f64) -> Result<EscapeRegion> {
    let alpha = wedge_alpha(theta)?;
    let axis = wedge_axis(theta)?;
    let cycle = velocity_cycle_order(theta, CYCLE_SEARCH_LIMIT, CYCLE_ANGLE_TOL)?;
    let (s, c) = (theta / 2.0).sin_cos();
    // Great circles through the rotation poles at planar angles
    // pi/2 -+ theta/2: normals (0, -cos, +-sin).
    let sector_normals = [[0.0, -c, s], [0.0, -c, -s]];
    let wall_maps = [
        collision_matrix_at(PI - theta / 2.0, crate::CollisionLaw::NoSlip),
        collision_matrix_at(theta / 2.0, crate::CollisionLaw::NoSlip),
    ];
    let kind = match cycle {
        None => {
            let angular_radius = cap_radius(theta);
            EscapeRegionKind::Cap { angular_radius }
        }
        Some(n) => {
            let vertices = polygon_vertices(&wall_maps, axis, sector_normals, n);
            let order = vertices.len();
            EscapeRegionKind::CurvilinearPolygon { vertices, order }
        }
    };
    Ok(EscapeRegion { theta, alpha, axis, cycle, kind, sector_normals, wall_maps })
}

/// Angular distance from the axis to the direct-escape sector,
/// `arcsin(cos(theta/2) / sqrt(3 - 2 cos^2(theta/2)))`: the invariant cap
/// radius. Grows to a hemisphere as `theta -> 0`, shrinks to zero as
/// `theta -> pi`.
pub fn cap_radius(theta: f64) -> f64 {
    let c = (theta / 2.0).cos();
    (c / (3.0 - 2.0 * c * c).sqrt()).asin()
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Vertices of the curvilinear non-escape polygon: pairwise intersections
/// of the rotated sector boundaries that lie on the region boundary,
/// ordered by azimuth about the axis.
///
/// The escape set is swept out by pulling the direct-escape sector back
/// through every collision history, i.e. through alternating products of
/// the two wall maps in both phases, closed by the cycle order.
fn polygon_vertices(
    wall_maps: &[Mat3; 2],
    axis: VelocityState,
    sector: [[f64; 3]; 2],
    n: usize,
) -> Vec<[f64; 3]> {
    let a = axis.to_array();
    // All distinct boundary great circles (normals up to sign).
    let mut normals: Vec<[f64; 3]> = Vec::new();
    let mut push_unique = |nv: [f64; 3]| {
        let dup = normals.iter().any(|w| norm3(cross3(*w, nv)) < 1e-9);
        if !dup {
            normals.push(nv);
        }
    };
    for first in 0..2usize {
        let mut m = Mat3::identity();
        for step in 0..2 * n {
            for base in sector {
                push_unique(m.mul_vec(base));
            }
            // Orthogonal maps send the great circle with normal m to the
            // one with normal (map . m).
            m = wall_maps[(first + step) % 2].mul_mat(&m);
        }
    }
    // Candidate vertices: intersections of pairs of circles, on the axis side.
    let mut verts: Vec<[f64; 3]> = Vec::new();
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            let x = cross3(normals[i], normals[j]);
            let nrm = norm3(x);
            if nrm < 1e-12 {
                continue;
            }
            for sign in [1.0, -1.0] {
                let p = [sign * x[0] / nrm, sign * x[1] / nrm, sign * x[2] / nrm];
                if dot3(p, a) <= 0.0 {
                    continue;
                }
                // Keep only points on the region boundary: no circle
                // strictly separates p from the axis.
                let inside = normals.iter().all(|w| {
                    let sa = dot3(a, *w);
                    sa.signum() * dot3(p, *w) >= -1e-9
                });
                if inside && !verts.iter().any(|q| norm3(cross3(*q, p)) < 1e-9 && dot3(*q, p) > 0.0)
                {
                    verts.push(p);
                }
            }
        }
    }
    // Order by azimuth about the axis.
    let ref_dir = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let proj = dot3(ref_dir, a);
        let mut v = [ref_dir[0] - proj * a[0], ref_dir[1] - proj * a[1], ref_dir[2] - proj * a[2]];
        let n = norm3(v);
        v = [v[0] / n, v[1] / n, v[2] / n];
        v
    };
    let e2 = cross3(a, e1);
    verts.sort_by(|p, q| {
        let ap = dot3(*p, e2).atan2(dot3(*p, e1));
        let aq = dot3(*q, e2).atan2(dot3(*q, e1));
        ap.partial_cmp(&aq).unwrap()
    });
    verts
}

impl EscapeRegion {
    /// Classify a unit velocity as escaping or not, with a symmetric
    /// tolerance band `tol` (radians) around the region boundary.
    ///
    /// Velocities are identified antipodally (time reversibility); the
    /// classification only depends on the ray through `v`.
    pub fn classify(&self, v: VelocityState, tol: f64) -> Classification {
        let v = if v.v1 < 0.0 { v.reversed() } else { v };
        let v = v.normalized();
        match self.cycle {
            None => {
                let EscapeRegionKind::Cap { angular_radius } = &self.kind else {
                    unreachable!("irrational rotation always builds a cap");
                };
                let d = v.angle_to(self.axis);
                let d = d.min(PI - d);
                let margin = angular_radius - d;
                if margin > tol {
                    Classification::NonEscape
                } else if margin < -tol {
                    Classification::Escape
                } else {
                    Classification::Boundary
                }
            }
            Some(n) => {
                // Escape iff the velocity, or any of its post-collision
                // descendants over one full cycle (both wall phases), lands
                // in the direct-escape sector.
                let mut worst = sector_margin(self.theta, v);
                for first in 0..2usize {
                    let mut w = v.to_array();
                    for step in 0..2 * n {
                        w = self.wall_maps[(first + step) % 2].mul_vec(w);
                        worst = worst.max(sector_margin(self.theta, VelocityState::from_array(w)));
                    }
                }
                if worst > tol {
                    Classification::Escape
                } else if worst < -tol {
                    Classification::NonEscape
                } else {
                    Classification::Boundary
                }
            }
        }
    }

    /// Monte Carlo estimate of the non-escape area on the unit sphere.
    pub fn nonescape_area(&self, samples: usize, seed: u64, tol: f64) -> f64 {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        for _ in 0..samples {
            let v = sample_unit_sphere(&mut rng);
            if self.classify(v, tol) == Classification::NonEscape {
                hits += 1;
            }
        }
        4.0 * PI * hits as f64 / samples as f64
    }
}

/// Uniform sample on the unit velocity sphere.
pub fn sample_unit_sphere<R: rand::Rng>(rng: &mut R) -> VelocityState {
    loop {
        let v = VelocityState::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let s = v.speed();
        if s > 1e-3 && s <= 1.0 {
            return v.normalized();
        }
    }
}

/// Classify a velocity for the `theta` wedge; convenience wrapper that
/// builds the region each call.
pub fn classify_velocity(theta: f64, v: VelocityState, tol: f64) -> Result<Classification> {
    Ok(escape_region(theta)?.classify(v, tol))
}

/// The pair of caustic radii of a circular-table orbit.
///
/// Signed values: the magnitude is the caustic radius in units of the
/// table radius, the sign records the orientation of the tangency.
#[derive(Clone, Copy, Debug)]
pub struct CausticPair {
    pub r1: f64,
    pub r2: f64,
    pub theta1: f64,
    pub theta2: f64,
}

/// Caustic radii from the post-collision velocity in the collision-local
/// frame (first planar axis tangent, second radial):
///
/// `r1 = v1 / sqrt(v1^2 + v2^2)`,
/// `r2 = w / sqrt(w^2 + v2^2)` with `w = (2 sqrt2/3) v0 + (1/3) v1`.
///
/// Flights are tangent to the two circles alternately, at chord midpoints.
pub fn circle_caustics(v: VelocityState) -> Result<CausticPair> {
    if v.v2 == 0.0 {
        return Err(Error::ZeroNormalVelocity);
    }
    let r1 = v.v1 / (v.v1 * v.v1 + v.v2 * v.v2).sqrt();
    let w = (2.0 * SQRT_2 / 3.0) * v.v0 + v.v1 / 3.0;
    let r2 = w / (w * w + v.v2 * v.v2).sqrt();
    Ok(CausticPair { r1, r2, theta1: r1.asin(), theta2: r2.asin() })
}

/// Velocity (in the collision-local frame) whose circular-table orbit is a
/// regular n-gon: `v1 = sqrt2 v0` and `v2 = tan(pi/n) v1`, normalized.
///
/// `n = 2` is the diameter orbit, the pure-normal limit of the family.
pub fn circle_ngon_velocity(n: usize) -> Result<VelocityState> {
    if n < 2 {
        return Err(Error::NgonTooSmall(n));
    }
    if n == 2 {
        return Ok(VelocityState::new(0.0, 0.0, 1.0));
    }
    let v0 = 1.0;
    let v1 = SQRT_2 * v0;
    let v2 = (PI / n as f64).tan() * v1;
    Ok(VelocityState::new(v0, v1, v2).normalized())
}

/// The two per-collision velocity transformations of the equilateral
/// triangle, relative to the frame carried from wall to wall:
/// `S1 = T R'(2 pi/3)` and `S2 = T R'(-2 pi/3)` (the frame turns by the
/// exterior angle `pi - pi/3` between adjacent walls).
///
/// They satisfy `S1^6 = I` and `S1 S2^3 S1^2 = I`, which forces every
/// nondegenerate orbit to be periodic.
pub fn triangle_cycle_matrices() -> (Mat3, Mat3) {
    let t = collision_matrix();
    let s1 = t.mul_mat(&frame_rotation(2.0 * PI / 3.0));
    let s2 = t.mul_mat(&frame_rotation(-2.0 * PI / 3.0));
    (s1, s2)
}

/// Period and wall word of an equilateral-triangle orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleClass {
    pub period: usize,
    /// Wall indices over one period, relabeled so the first distinct walls
    /// read 1, 2, 3 (canonical up to rotation and relabeling).
    pub word: String,
}

/// Canonical wall words of the surviving combinatorial classes.
pub const TRIANGLE_WORDS: [&str; 5] = ["12", "123", "1212", "121323", "123123"];

/// Classify a detected-periodic orbit on the equilateral triangle table.
pub fn triangle_classify(orbit: &Orbit) -> Result<TriangleClass> {
    let period = match orbit.termination {
        crate::flow::Termination::PeriodDetected(p) => p,
        other => {
            return Err(Error::UnsuitableOrbit(format!(
                "orbit did not close: terminated {other:?}"
            )))
        }
    };
    if orbit.events.len() < period {
        return Err(Error::UnsuitableOrbit("fewer events than one period".into()));
    }
    let tail: Vec<usize> = orbit.events[orbit.events.len() - period..]
        .iter()
        .map(|e| e.piece)
        .collect();
    // Walls must never repeat immediately (cyclically).
    for k in 0..tail.len() {
        if tail[k] == tail[(k + 1) % tail.len()] {
            return Err(Error::UnsuitableOrbit(format!(
                "immediate wall repeat in word {tail:?}"
            )));
        }
    }
    let word = canonical_word(&tail);
    Ok(TriangleClass { period, word })
}

/// Lexicographically smallest relabeled rotation of a wall sequence.
pub fn canonical_word(seq: &[usize]) -> String {
    let mut best: Option<String> = None;
    for r in 0..seq.len() {
        let mut map: Vec<Option<usize>> = vec![None, None, None];
        let mut next = 1usize;
        let mut s = String::with_capacity(seq.len());
        for k in 0..seq.len() {
            let w = seq[(r + k) % seq.len()];
            let label = match map.get(w).and_then(|m| *m) {
                Some(l) => l,
                None => {
                    let l = next;
                    if w < map.len() {
                        map[w] = Some(l);
                    }
                    next += 1;
                    l
                }
            };
            s.push(char::from_digit(label as u32, 10).unwrap());
        }
        if best.as_ref().map_or(true, |b| s < *b) {
            best = Some(s);
        }
    }
    best.unwrap_or_default()
}

/// Result of scanning powers of the strip cycle matrix for near-returns.
#[derive(Clone, Copy, Debug)]
pub struct NonrecurrenceScan {
    pub min_distance: f64,
    pub at_power: usize,
}

/// Minimum Frobenius distance of `S^n` to the identity over `1 <= n <= N`:
/// a numeric witness that the strip rotation angle is an irrational
/// multiple of pi (the minimum stays far from zero).
pub fn strip_nonrecurrence_scan(n_max: usize) -> NonrecurrenceScan {
    let s = strip_cycle_matrix();
    let id = Mat3::identity();
    let mut m = Mat3::identity();
    let mut best = NonrecurrenceScan { min_distance: f64::INFINITY, at_power: 0 };
    for n in 1..=n_max {
        m = m.mul_mat(&s);
        let d = m.distance(&id);
        if d < best.min_distance {
            best = NonrecurrenceScan { min_distance: d, at_power: n };
        }
    }
    best
}

/// One row of a wedge spectrum table.
#[derive(Clone, Debug)]
pub struct WedgeSpectrum {
    pub theta: f64,
    pub alpha: f64,
    /// Velocity cycle order `n` when `n alpha = 0 mod 2 pi`.
    pub cycle: Option<usize>,
    /// Orbit period `2n` for periodic wedges.
    pub period: Option<usize>,
}

/// Spectrum data for a single wedge angle.
pub fn wedge_spectrum(theta: f64) -> Result<WedgeSpectrum> {
    let alpha = wedge_alpha(theta)?;
    let cycle = velocity_cycle_order(theta, CYCLE_SEARCH_LIMIT, CYCLE_ANGLE_TOL)?;
    Ok(WedgeSpectrum { theta, alpha, cycle, period: cycle.map(|n| 2 * n) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::theta_for_alpha;
    use crate::flow::{iterate, iterate_with, IterateOptions, PhasePoint, Termination};
    use crate::math::Vec2;
    use crate::table::{circle, regular_polygon, wedge};
    use rand::SeedableRng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b} +- {tol}, got {a}");
    }

    #[test]
    fn strip_bound_values() {
        assert_eq!(strip_bound(1.0).unwrap(), 0.0);
        assert_close(strip_bound(std::f64::consts::FRAC_1_SQRT_2).unwrap(), 1.5f64.sqrt(), 1e-14);
        // Independent evaluation of the same formula.
        let v2 = 0.9f64;
        assert_close(
            strip_bound(v2).unwrap(),
            (1.5f64 * (1.0 / 0.81 - 1.0)).sqrt(),
            1e-14,
        );
        assert!(matches!(strip_bound(0.0), Err(Error::UnboundedDisplacement)));
        assert!(strip_bound(1.1).is_err());
    }

    #[test]
    fn axis_is_always_nonescape() {
        for theta in [0.2, 0.8, PI / 3.0, 1.9, 2.9] {
            let region = escape_region(theta).unwrap();
            let axis = wedge_axis(theta).unwrap();
            assert_eq!(region.classify(axis, 1e-6), Classification::NonEscape, "theta={theta}");
        }
    }

    #[test]
    fn planar_escape_sector_velocity_escapes() {
        for theta in [0.5, 1.2, 2.0] {
            let region = escape_region(theta).unwrap();
            let v = VelocityState::new(0.0, 0.0, 1.0); // straight out the mouth
            assert_eq!(region.classify(v, 1e-6), Classification::Escape, "theta={theta}");
        }
    }

    #[test]
    fn classification_is_cycle_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for theta in [0.7, PI / 3.0, 2.1] {
            let region = escape_region(theta).unwrap();
            let s = wedge_cycle_matrix(theta).unwrap();
            for _ in 0..200 {
                let v = sample_unit_sphere(&mut rng);
                let a = region.classify(v, 1e-4);
                let b = region.classify(VelocityState::from_array(s.mul_vec(v.to_array())), 1e-4);
                if a != Classification::Boundary && b != Classification::Boundary {
                    assert_eq!(a, b, "theta={theta}");
                }
            }
        }
    }

    #[test]
    fn cap_radius_matches_sector_distance_oracle() {
        // The cap radius equals the minimal angular distance from the axis
        // to the direct-escape sector, here found by brute minimization.
        for theta in [0.4, 1.0, 1.8, 2.6] {
            let axis = wedge_axis(theta).unwrap();
            let mut min_dist = f64::INFINITY;
            let n = 4000;
            for k in 0..n {
                let phi = TAU * k as f64 / n as f64;
                // Boundary rays of the sector at planar angles pi/2 +- theta/2,
                // every rotational height.
                for bdry in [FRAC_PI_2 - theta / 2.0, FRAC_PI_2 + theta / 2.0] {
                    let (s, c) = bdry.sin_cos();
                    let v0 = phi.cos();
                    let pl = phi.sin().abs();
                    let v = VelocityState::new(v0, pl * c, pl * s);
                    let d = v.angle_to(axis);
                    min_dist = min_dist.min(d.min(PI - d));
                }
            }
            assert_close(cap_radius(theta), min_dist, 1e-6);
        }
    }

    #[test]
    fn periodic_region_is_a_curvilinear_polygon() {
        // theta = pi/3 has cycle order 2 (alpha = pi): a 4-gon.
        let region = escape_region(PI / 3.0).unwrap();
        assert_eq!(region.cycle, Some(2));
        match &region.kind {
            EscapeRegionKind::CurvilinearPolygon { order, .. } => assert_eq!(*order, 4),
            other => panic!("expected polygon, got {other:?}"),
        }
        // theta for alpha = pi/2 has cycle order 4: an 8-gon.
        let theta8 = theta_for_alpha(FRAC_PI_2).unwrap()[0];
        let region = escape_region(theta8).unwrap();
        assert_eq!(region.cycle, Some(4));
        match &region.kind {
            EscapeRegionKind::CurvilinearPolygon { order, .. } => assert_eq!(*order, 8),
            other => panic!("expected polygon, got {other:?}"),
        }
        // Odd cycle order: alpha = 2 pi/3 gives a triangle.
        let theta3 = theta_for_alpha(2.0 * PI / 3.0).unwrap()[0];
        let region = escape_region(theta3).unwrap();
        assert_eq!(region.cycle, Some(3));
        match &region.kind {
            EscapeRegionKind::CurvilinearPolygon { order, .. } => assert_eq!(*order, 3),
            other => panic!("expected polygon, got {other:?}"),
        }
    }

    #[test]
    fn nonescape_velocities_survive_simulation() {
        let theta = PI / 3.0;
        let region = escape_region(theta).unwrap();
        let table = wedge(theta).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 40 {
            let v = sample_unit_sphere(&mut rng);
            if region.classify(v, 0.02) != Classification::NonEscape {
                continue;
            }
            checked += 1;
            let start = PhasePoint::new(Vec2::new(0.0, 1.0), v);
            let opts = IterateOptions::new(&table, 10_000).without_period_detection();
            let orbit = iterate_with(&table, start, &opts);
            assert_eq!(orbit.termination, Termination::MaxCollisions, "v = {v:?}");
        }
    }

    #[test]
    fn caustic_pair_formulas() {
        // v1 = sqrt2 v0 collapses the two radii exactly.
        let v = VelocityState::new(0.4, 0.4 * SQRT_2, 0.3);
        let c = circle_caustics(v).unwrap();
        assert_eq!(c.r1, c.r2);

        // Inscribed-square family.
        let v = VelocityState::new(1.0, SQRT_2, SQRT_2).normalized();
        let c = circle_caustics(v).unwrap();
        assert_close(c.r1, SQRT_2 / 2.0, 1e-15);
        assert_close(c.r2, SQRT_2 / 2.0, 1e-15);

        // Zero rotational velocity: generically alternating caustics.
        let v = VelocityState::new(0.0, 0.5, 0.6);
        let c = circle_caustics(v).unwrap();
        let w = 0.5 / 3.0;
        assert_close(c.r2, w / (w * w + 0.36f64).sqrt(), 1e-15);
        assert!((c.r1 - c.r2).abs() > 1e-3);

        assert!(circle_caustics(VelocityState::new(0.1, 0.9, 0.0)).is_err());
    }

    #[test]
    fn ngon_velocities_close_after_n_collisions() {
        let table = circle(1.0).unwrap();
        for n in 2..=8usize {
            let v = circle_ngon_velocity(n).unwrap();
            let p0 = Vec2::new(0.0, -1.0);
            // Local frame at p0: tangent (1, 0), inward normal (0, 1).
            let start = PhasePoint::new(p0, v);
            let opts = IterateOptions::new(&table, n).without_period_detection();
            let orbit = iterate_with(&table, start, &opts);
            assert_eq!(orbit.events.len(), n);
            let back = orbit.events.last().unwrap();
            assert!(
                (back.point - p0).norm() < 1e-9,
                "n = {n} failed to close: {:.3e}",
                (back.point - p0).norm()
            );
        }
        assert!(circle_ngon_velocity(1).is_err());
    }

    #[test]
    fn square_orbit_has_equal_sides() {
        let table = circle(1.0).unwrap();
        let v = circle_ngon_velocity(4).unwrap();
        let start = PhasePoint::new(Vec2::new(0.0, -1.0), v);
        let opts = IterateOptions::new(&table, 4).without_period_detection();
        let orbit = iterate_with(&table, start, &opts);
        let mut pts = vec![start.position];
        pts.extend(orbit.events.iter().map(|e| e.point));
        let sides: Vec<f64> = pts.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        for s in &sides {
            assert_close(*s, sides[0], 1e-9);
        }
    }

    #[test]
    fn triangle_matrix_identities() {
        let (s1, s2) = triangle_cycle_matrices();
        assert!(s1.powi(6).max_abs_diff(&Mat3::identity()) < 1e-12);
        let m = s1.mul_mat(&s2.powi(3)).mul_mat(&s1.powi(2));
        assert!(m.max_abs_diff(&Mat3::identity()) < 1e-12);
        assert!(s1.orthogonality_defect() < 1e-14);
        assert!(s2.orthogonality_defect() < 1e-14);
        assert_close(s1.det(), 1.0, 1e-14);
    }

    #[test]
    fn triangle_orbits_classify_into_allowed_words() {
        let table = regular_polygon(3, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut seen = std::collections::BTreeMap::new();
        for _ in 0..100 {
            let start = random_interior_start(&table, &mut rng);
            let orbit = iterate(&table, start, 100);
            let class = triangle_classify(&orbit).expect("triangle orbit must close");
            assert!(
                matches!(class.period, 2 | 3 | 4 | 6),
                "period {} out of range",
                class.period
            );
            assert!(
                TRIANGLE_WORDS.contains(&class.word.as_str()),
                "forbidden wall word {}",
                class.word
            );
            *seen.entry(class.word).or_insert(0usize) += 1;
        }
        // The generic classes actually occur.
        assert!(seen.keys().any(|w| w == "1212" || w == "121323" || w == "123123"));
    }

    fn random_interior_start(
        table: &crate::table::Table,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> PhasePoint {
        use rand::Rng;
        let (lo, hi) = table.sample_box();
        loop {
            let p = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
            if table.contains(p) {
                let v = sample_unit_sphere(rng);
                if v.planar().norm() > 1e-3 {
                    return PhasePoint::new(p, v);
                }
            }
        }
    }

    #[test]
    fn canonical_words() {
        assert_eq!(canonical_word(&[2, 0, 2, 0]), "1212");
        assert_eq!(canonical_word(&[1, 2, 0, 1, 2, 0]), "123123");
        assert_eq!(canonical_word(&[0, 1]), "12");
        // The paper's 121323 class in a rotated, relabeled disguise.
        assert_eq!(canonical_word(&[2, 1, 2, 0, 1, 0]), "121323");
    }

    #[test]
    fn nonrecurrence_scan_matches_direct_evaluation() {
        // ||S - I||_F = 2 sqrt2 |sin(alpha/2)| with cos(alpha) = -7/9.
        let scan1 = strip_nonrecurrence_scan(1);
        let alpha = (-7.0f64 / 9.0).acos();
        assert_close(scan1.min_distance, 2.0 * SQRT_2 * (alpha / 2.0).sin(), 1e-12);
        assert_eq!(scan1.at_power, 1);
    }

    #[test]
    fn nonrecurrence_floor_and_best_rational_approximation() {
        let scan = strip_nonrecurrence_scan(100);
        // Regression floor frozen from the first computation (0.04296...).
        assert!(scan.min_distance > 1e-3);
        assert!(scan.min_distance > 0.0429 && scan.min_distance < 0.0430);
        // The minimizing power is the denominator of the best rational
        // approximation of alpha / 2 pi, found by continued fractions.
        let alpha = (-7.0f64 / 9.0).acos();
        let mut x = alpha / TAU;
        let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.floor() as i64, 1i64);
        let mut best_den = 1usize;
        for _ in 0..20 {
            x = 1.0 / (x - x.floor());
            let a = x.floor() as i64;
            let (p2, q2) = (a * p1 + p0, a * q1 + q0);
            if q2 > 100 {
                break;
            }
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
            best_den = q1 as usize;
        }
        assert_eq!(scan.at_power, best_den);
    }

    #[test]
    fn wedge_spectrum_rows() {
        let row = wedge_spectrum(PI / 3.0).unwrap();
        assert_eq!(row.cycle, Some(2));
        assert_eq!(row.period, Some(4));
        let row = wedge_spectrum(0.977).unwrap();
        assert_eq!(row.cycle, None);
    }
}
