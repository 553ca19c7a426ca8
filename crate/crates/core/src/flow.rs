//! The billiard map: alternate free flight and collision, track the
//! rotational coordinate, record events, detect termination and periodicity.

use crate::collision::{self, CollisionLaw};
use crate::math::Vec2;
use crate::table::{FirstHit, Table, CORNER_TOL, TANGENCY_TOL};
use crate::{Error, VelocityState};

/// Upper bound on consecutive glued-edge crossings within one flight.
const MAX_PORTAL_CROSSINGS: usize = 100_000;

/// A point of the extended configuration space: planar position, the
/// accumulated rotational coordinate `x0` (never wrapped), and velocity.
#[derive(Clone, Copy, Debug)]
pub struct PhasePoint {
    pub position: Vec2,
    pub x0: f64,
    pub velocity: VelocityState,
}

impl PhasePoint {
    pub fn new(position: Vec2, velocity: VelocityState) -> Self {
        PhasePoint { position, x0: 0.0, velocity }
    }

    /// Rescale the velocity to unit speed (unit kinetic energy).
    pub fn normalized(mut self) -> Self {
        self.velocity = self.velocity.normalized();
        self
    }
}

/// One recorded collision.
#[derive(Clone, Copy, Debug)]
pub struct CollisionEvent {
    pub index: usize,
    pub piece: usize,
    pub point: Vec2,
    /// Rotational coordinate at the collision.
    pub x0: f64,
    /// Arclength parameter of the collision point on its piece.
    pub arclength: f64,
    /// Flight time since the previous event (portal crossings included).
    pub flight_time: f64,
    pub v_before: VelocityState,
    pub v_after: VelocityState,
}

/// Why an orbit stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    MaxCollisions,
    Escaped,
    Corner,
    Degenerate,
    PeriodDetected(usize),
}

/// A finished orbit: initial condition, events, and the termination reason.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub initial: PhasePoint,
    pub events: Vec<CollisionEvent>,
    pub termination: Termination,
    /// Events whose post-collision velocity matched an earlier event on the
    /// same piece while the position did not (within tolerance); on a wedge
    /// this would contradict the repeated-velocity lemma.
    pub lemma_anomalies: usize,
}

/// Position/velocity tolerances for period detection.
#[derive(Clone, Copy, Debug)]
pub struct PeriodTolerances {
    /// Absolute tolerance on the arclength coordinate.
    pub pos_tol: f64,
    /// Absolute tolerance on the post-collision velocity.
    pub vel_tol: f64,
    /// How far back an event is compared against; `None` scans everything.
    pub horizon: Option<usize>,
}

impl PeriodTolerances {
    /// Defaults: `1e-9` times the table feature size for positions,
    /// `1e-9` for velocities, ring-buffer horizon 64.
    pub fn for_table(table: &Table) -> Self {
        PeriodTolerances {
            pos_tol: 1e-9 * table.feature_size(),
            vel_tol: 1e-9,
            horizon: Some(64),
        }
    }
}

/// Controls for [`iterate_with`].
#[derive(Clone, Copy, Debug)]
pub struct IterateOptions {
    pub max_collisions: usize,
    pub law: CollisionLaw,
    pub period_detection: Option<PeriodTolerances>,
}

impl IterateOptions {
    pub fn new(table: &Table, max_collisions: usize) -> Self {
        IterateOptions {
            max_collisions,
            law: CollisionLaw::NoSlip,
            period_detection: Some(PeriodTolerances::for_table(table)),
        }
    }

    pub fn without_period_detection(mut self) -> Self {
        self.period_detection = None;
        self
    }

    pub fn with_law(mut self, law: CollisionLaw) -> Self {
        self.law = law;
        self
    }
}

/// Outcome of a single step of the billiard map.
#[derive(Clone, Debug)]
pub enum StepResult {
    Collision(CollisionEvent, PhasePoint),
    Terminated(Termination),
}

/// One application of the billiard map: free flight along the planar
/// velocity (crossing glued edges transparently), then reflection in the
/// local frame of the hit piece. The rotational coordinate advances by
/// `v0` times the flight time; flight time is distance over planar speed.
pub fn step(table: &Table, pp: &PhasePoint, law: CollisionLaw, index: usize) -> StepResult {
    let v = pp.velocity;
    let planar = v.planar();
    let planar_speed = planar.norm();
    if planar_speed < 1e-14 {
        // Pure rotation never reaches the boundary.
        return StepResult::Terminated(Termination::Degenerate);
    }
    let dir = planar * (1.0 / planar_speed);
    let mut origin = pp.position;
    let mut travelled = 0.0;
    for _ in 0..MAX_PORTAL_CROSSINGS {
        match table.first_hit_unchecked(origin, dir) {
            Err(Error::DegenerateRay) => return StepResult::Terminated(Termination::Degenerate),
            Err(_) => return StepResult::Terminated(Termination::Degenerate),
            Ok(FirstHit::Escaped) => return StepResult::Terminated(Termination::Escaped),
            Ok(FirstHit::GluingCrossed { distance, exit, .. }) => {
                travelled += distance;
                origin = exit;
                if origin.norm() > table.escape_radius() {
                    return StepResult::Terminated(Termination::Escaped);
                }
            }
            Ok(FirstHit::Hit(hit)) => {
                travelled += hit.time;
                if hit.point.norm() > table.escape_radius() {
                    return StepResult::Terminated(Termination::Escaped);
                }
                if dir.dot(hit.normal.as_vec()).abs() < TANGENCY_TOL {
                    return StepResult::Terminated(Termination::Degenerate);
                }
                if hit.endpoint_distance < CORNER_TOL * table.feature_size() {
                    return StepResult::Terminated(Termination::Corner);
                }
                let flight_time = travelled / planar_speed;
                let x0 = pp.x0 + v.v0 * flight_time;
                let v_after = match collision::reflect_in_local_frame(v, hit.normal, law) {
                    Ok(w) => w,
                    Err(_) => return StepResult::Terminated(Termination::Degenerate),
                };
                let event = CollisionEvent {
                    index,
                    piece: hit.piece,
                    point: hit.point,
                    x0,
                    arclength: hit.arclength,
                    flight_time,
                    v_before: v,
                    v_after,
                };
                let next = PhasePoint { position: hit.point, x0, velocity: v_after };
                return StepResult::Collision(event, next);
            }
        }
    }
    StepResult::Terminated(Termination::Degenerate)
}

/// Run the billiard map until termination or the collision cap, streaming
/// each event into `on_event`. Returns the termination, the final phase
/// point, and the event count. Memory use is O(1); period detection, when
/// enabled, keeps only the ring-buffer horizon.
pub fn iterate_each<F: FnMut(&CollisionEvent)>(
    table: &Table,
    start: PhasePoint,
    opts: &IterateOptions,
    mut on_event: F,
) -> (Termination, PhasePoint, usize, usize) {
    let mut pp = start;
    let mut ring: Vec<CollisionEvent> = Vec::new();
    let mut anomalies = 0usize;
    for index in 0..opts.max_collisions {
        match step(table, &pp, opts.law, index) {
            StepResult::Terminated(t) => return (t, pp, index, anomalies),
            StepResult::Collision(event, next) => {
                on_event(&event);
                pp = next;
                if let Some(tols) = &opts.period_detection {
                    if let Some(p) = scan_ring(&ring, &event, tols, &mut anomalies) {
                        return (Termination::PeriodDetected(p), pp, index + 1, anomalies);
                    }
                    ring.push(event);
                    if let Some(h) = tols.horizon {
                        if ring.len() > h {
                            let overflow = ring.len() - h;
                            ring.drain(..overflow);
                        }
                    }
                }
            }
        }
    }
    (Termination::MaxCollisions, pp, opts.max_collisions, anomalies)
}

fn events_match(earlier: &CollisionEvent, later: &CollisionEvent, tols: &PeriodTolerances) -> bool {
    earlier.piece == later.piece
        && (earlier.arclength - later.arclength).abs() < tols.pos_tol
        && earlier.v_after.distance(later.v_after) < tols.vel_tol
}

fn scan_ring(
    ring: &[CollisionEvent],
    event: &CollisionEvent,
    tols: &PeriodTolerances,
    anomalies: &mut usize,
) -> Option<usize> {
    // Nearest previous match gives the smallest period.
    for prev in ring.iter().rev() {
        if events_match(prev, event, tols) {
            return Some(event.index - prev.index);
        }
        if prev.piece == event.piece && prev.v_after.distance(event.v_after) < tols.vel_tol {
            // Velocity repeats on the same wall without the position doing
            // so: a repeated-velocity lemma violation worth surfacing.
            *anomalies += 1;
        }
    }
    None
}

/// Run the billiard map with the default no-slip options, collecting the
/// full event list.
pub fn iterate(table: &Table, start: PhasePoint, max_collisions: usize) -> Orbit {
    iterate_with(table, start, &IterateOptions::new(table, max_collisions))
}

/// Run the billiard map with explicit options, collecting the event list.
pub fn iterate_with(table: &Table, start: PhasePoint, opts: &IterateOptions) -> Orbit {
    let mut events = Vec::new();
    let (termination, _, _, lemma_anomalies) =
        iterate_each(table, start, opts, |e| events.push(*e));
    Orbit { initial: start, events, termination, lemma_anomalies }
}

/// Result of a standalone period scan over a finished orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodScan {
    pub period: Option<usize>,
    pub velocity_only_matches: usize,
}

/// Smallest `p` such that some pair of events `k` and `k + p` agree in
/// (piece, arclength, post-collision velocity) within the tolerances.
/// Also counts same-wall velocity matches whose positions disagree.
pub fn detect_period(orbit: &Orbit, tols: &PeriodTolerances) -> PeriodScan {
    let events = &orbit.events;
    let n = events.len();
    let mut velocity_only = 0usize;
    let mut period = None;
    'outer: for p in 1..n {
        if let Some(h) = tols.horizon {
            if p > h {
                break;
            }
        }
        for k in 0..n - p {
            if events_match(&events[k], &events[k + p], tols) {
                period = Some(p);
                break 'outer;
            }
        }
    }
    for p in 1..n.min(tols.horizon.unwrap_or(n)) {
        for k in 0..n - p {
            let (a, b) = (&events[k], &events[k + p]);
            if a.piece == b.piece
                && a.v_after.distance(b.v_after) < tols.vel_tol
                && (a.arclength - b.arclength).abs() >= tols.pos_tol
            {
                velocity_only += 1;
            }
        }
        if period.is_some() {
            break;
        }
    }
    PeriodScan { period, velocity_only_matches: velocity_only }
}

/// Displacement statistics of the collision points projected to the
/// rotational-parallel plane `(x0, x1)`: the supremum of
/// `|<(x0, x1) - (x0, x1)_initial, direction>|` over events.
pub fn displacement_stats(orbit: &Orbit, direction: Vec2) -> DisplacementStats {
    let start = Vec2::new(orbit.initial.x0, orbit.initial.position.x);
    let mut max_abs = 0.0f64;
    for e in &orbit.events {
        let p = Vec2::new(e.x0, e.point.x);
        max_abs = max_abs.max((p - start).dot(direction).abs());
    }
    DisplacementStats { max_abs, collisions: orbit.events.len() }
}

#[derive(Clone, Copy, Debug)]
pub struct DisplacementStats {
    pub max_abs: f64,
    pub collisions: usize,
}

/// Least-squares line fit `y = intercept + slope x`; returns
/// (slope, intercept, max absolute residual).
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0f64, f64::max);
    (slope, intercept, resid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::{strip_cycle_matrix, wedge_axis};
    use crate::table::{strip, wedge};
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    #[test]
    fn trivial_strip_orbit_has_period_two() {
        let table = strip(1.0).unwrap();
        let start = PhasePoint::new(Vec2::ZERO, VelocityState::new(0.0, 0.0, 1.0));
        let orbit = iterate(&table, start, 100);
        assert_eq!(orbit.termination, Termination::PeriodDetected(2));
        let first = &orbit.events[0];
        assert!((first.point - Vec2::new(0.0, 1.0)).norm() < 1e-12);
        assert!((first.flight_time - 1.0).abs() < 1e-12);
        // Conjugation through the ceiling frame leaves ~1 ulp of residue.
        assert!(first.v_after.distance(VelocityState::new(0.0, 0.0, -1.0)) < 1e-15);
    }

    #[test]
    fn strip_two_steps_compose_to_cycle_matrix() {
        let table = strip(1.0).unwrap();
        // Downward initial data: floor first, then ceiling, matching the
        // composite's collision order.
        let v = VelocityState::new(0.2, 0.5, -0.6).normalized();
        let start = PhasePoint::new(Vec2::new(0.0, 0.5), v);
        let opts = IterateOptions::new(&table, 2).without_period_detection();
        let orbit = iterate_with(&table, start, &opts);
        assert_eq!(orbit.events.len(), 2);
        let got = orbit.events[1].v_after.to_array();
        let want = strip_cycle_matrix().mul_vec(v.to_array());
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn right_angle_wedge_axis_is_period_two() {
        let theta = FRAC_PI_2;
        let table = wedge(theta).unwrap();
        let axis = wedge_axis(theta).unwrap();
        let (s, c) = (theta / 2.0).sin_cos();
        let start = PhasePoint::new(Vec2::new(-s, c), axis);
        let orbit = iterate(&table, start, 50);
        assert_eq!(orbit.termination, Termination::PeriodDetected(2));
        let e = &orbit.events[1];
        assert!((e.point - start.position).norm() < 1e-10);
        assert!(e.v_after.distance(axis) < 1e-10);
    }

    #[test]
    fn wedge_quarter_period_four() {
        let table = wedge(PI / 3.0).unwrap();
        let v = wedge_axis(PI / 3.0).unwrap();
        // Generic bounded start: tilt off the axis, keep inside the cap.
        let v = VelocityState::new(v.v0 + 0.05, v.v1, v.v2 + 0.08).normalized();
        let start = PhasePoint::new(Vec2::new(0.0, 1.0), v);
        let orbit = iterate(&table, start, 200);
        assert_eq!(orbit.termination, Termination::PeriodDetected(4));
    }

    #[test]
    fn wedge_direct_escape() {
        let table = wedge(1.0).unwrap();
        let start = PhasePoint::new(Vec2::new(0.0, 1.0), VelocityState::new(0.1, 0.05, 0.9).normalized());
        let orbit = iterate(&table, start, 10);
        assert_eq!(orbit.termination, Termination::Escaped);
        assert!(orbit.events.is_empty());
    }

    #[test]
    fn strip_contact_lines_have_slope_sqrt2() {
        let table = strip(1.0).unwrap();
        let rho = (1.0f64 - 0.36).sqrt();
        let v = VelocityState::new(2.0 * rho / 6.0f64.sqrt(), -SQRT_2 * rho / 6.0f64.sqrt(), 0.6);
        let start = PhasePoint::new(Vec2::ZERO, v);
        let opts = IterateOptions::new(&table, 4000).without_period_detection();
        let orbit = iterate_with(&table, start, &opts);
        assert_eq!(orbit.events.len(), 4000);
        for (piece, want) in [(1usize, SQRT_2), (0usize, -SQRT_2)] {
            let pts: Vec<&CollisionEvent> =
                orbit.events.iter().filter(|e| e.piece == piece).collect();
            let xs: Vec<f64> = pts.iter().map(|e| e.x0).collect();
            let ys: Vec<f64> = pts.iter().map(|e| e.point.x).collect();
            let (slope, _, resid) = least_squares_line(&xs, &ys);
            assert!((slope - want).abs() < 1e-8, "slope {slope} vs {want}");
            assert!(resid < 1e-8, "residual {resid}");
        }
    }

    #[test]
    fn strip_flight_segments_have_fixed_projected_length() {
        let table = strip(1.0).unwrap();
        let v2 = 0.7;
        let rho = (1.0f64 - v2 * v2).sqrt();
        let v = VelocityState::new(rho * 0.8, rho * 0.6, v2);
        let start = PhasePoint::new(Vec2::ZERO, v);
        let opts = IterateOptions::new(&table, 500).without_period_detection();
        let orbit = iterate_with(&table, start, &opts);
        let want = (1.0 / (v2 * v2) - 1.0).sqrt();
        let mut prev = Vec2::new(start.x0, start.position.x);
        for e in &orbit.events {
            let here = Vec2::new(e.x0, e.point.x);
            assert!(((here - prev).norm() - want).abs() < 1e-10);
            prev = here;
        }
    }

    #[test]
    fn reversing_velocity_retraces_collision_points() {
        let table = crate::table::regular_polygon(6, 1.0).unwrap();
        let v = VelocityState::new(0.3, 0.5, 0.45).normalized();
        let start = PhasePoint::new(Vec2::new(0.1, -0.2), v);
        let opts = IterateOptions::new(&table, 100).without_period_detection();
        let orbit = iterate_with(&table, start, &opts);
        assert_eq!(orbit.events.len(), 100);
        let last = orbit.events.last().unwrap();
        let back = PhasePoint::new(last.point, last.v_after.reversed());
        let rev = iterate_with(&table, back, &opts);
        for (k, e) in rev.events.iter().take(99).enumerate() {
            let mirror = &orbit.events[98 - k];
            assert!(
                (e.point - mirror.point).norm() < 1e-8,
                "reverse event {k} deviates by {:.3e}",
                (e.point - mirror.point).norm()
            );
        }
    }

    #[test]
    fn wedge_orbit_keeps_distance_to_axis() {
        let theta = 1.3;
        let table = wedge(theta).unwrap();
        let axis = wedge_axis(theta).unwrap();
        let v = VelocityState::new(axis.v0 + 0.1, axis.v1 - 0.05, 0.12).normalized();
        let d0 = v.angle_to(axis);
        let start = PhasePoint::new(Vec2::new(0.0, 1.0), v);
        let opts = IterateOptions::new(&table, 400).without_period_detection();
        let orbit = iterate_with(&table, start, &opts);
        assert!(orbit.events.len() >= 100, "orbit escaped unexpectedly");
        // Post-collision velocities alternate walls; distance to the axis is
        // preserved every two collisions (full cycles of the rotation).
        for e in orbit.events.iter().skip(1).step_by(2) {
            let d = e.v_after.angle_to(axis);
            assert!((d - d0).abs() < 1e-10, "axis distance drifted {:.3e}", (d - d0).abs());
        }
    }

    #[test]
    fn energy_is_conserved_along_orbits() {
        let table = crate::table::regular_polygon(6, 1.0).unwrap();
        let start = PhasePoint::new(
            Vec2::new(-0.1, 0.3),
            VelocityState::new(0.4, -0.5, 0.3).normalized(),
        );
        let opts = IterateOptions::new(&table, 10_000).without_period_detection();
        let mut max_err = 0.0f64;
        let (term, _, n, _) = iterate_each(&table, start, &opts, |e| {
            max_err = max_err.max((e.v_after.speed() - 1.0).abs());
        });
        assert_eq!(term, Termination::MaxCollisions);
        assert_eq!(n, 10_000);
        assert!(max_err < 1e-11, "energy drift {max_err:.3e}");
    }

    #[test]
    fn torus_flights_cross_gluings_transparently() {
        let table = crate::table::disk_on_torus(1.0, 0.25).unwrap();
        let start = PhasePoint::new(
            Vec2::new(0.1, 0.1),
            VelocityState::new(0.2, 0.7, 0.33).normalized(),
        );
        let opts = IterateOptions::new(&table, 200).without_period_detection();
        let orbit = iterate_with(&table, start, &opts);
        assert!(orbit.events.len() >= 100);
        for e in &orbit.events {
            assert_eq!(e.piece, 4, "events must only occur on the scatterer");
        }
    }
}
