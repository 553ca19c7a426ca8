//! Exact table geometry: boundary pieces, glued edges, and the first-hit
//! ray query. All intersections are closed form (line-line, line-circle).

use crate::math::Vec2;
use crate::{Error, Result, UnitNormal};
use std::f64::consts::{PI, TAU};

mod builders;
pub use builders::*;

/// Ray intersections closer than this along the ray are treated as the
/// departing collision point and ignored.
pub const GRAZING_TOL: f64 = 1e-10;
/// A hit closer than this (times the table feature size) to a piece
/// endpoint terminates the orbit as a corner.
pub const CORNER_TOL: f64 = 1e-9;
/// |direction . normal| below this is a tangential hit; the no-slip law
/// is undefined there and the orbit terminates as degenerate.
pub const TANGENCY_TOL: f64 = 1e-9;

/// One smooth piece of the table boundary.
///
/// Every piece carries an explicit interior-side flag; the inward normal is
/// never inferred from winding. Arcs are parametrized counterclockwise from
/// `start_angle` over `span` in `(0, 2pi]`.
#[derive(Clone, Debug)]
pub enum BoundaryPiece {
    Segment {
        a: Vec2,
        b: Vec2,
        /// Interior lies to the left of `a -> b`.
        interior_on_left: bool,
    },
    Arc {
        center: Vec2,
        radius: f64,
        start_angle: f64,
        span: f64,
        /// Interior on the center side (convex wall) or away from it
        /// (dispersing wall).
        interior_toward_center: bool,
    },
    Line {
        point: Vec2,
        /// Unit direction along the wall.
        direction: Vec2,
        /// Interior lies to the left of `direction`.
        interior_on_left: bool,
        /// The anchor point is a true boundary vertex (wedge apex); hits
        /// near it are corner hits.
        vertex_at_point: bool,
    },
}

impl BoundaryPiece {
    pub fn segment(a: Vec2, b: Vec2) -> Self {
        BoundaryPiece::Segment { a, b, interior_on_left: true }
    }

    /// Arc length of the piece, `None` for an infinite line.
    pub fn length(&self) -> Option<f64> {
        match self {
            BoundaryPiece::Segment { a, b, .. } => Some((*b - *a).norm()),
            BoundaryPiece::Arc { radius, span, .. } => Some(radius * span),
            BoundaryPiece::Line { .. } => None,
        }
    }

    fn validate(&self, idx: usize) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidTable(format!("piece {idx}: {msg}")));
        match self {
            BoundaryPiece::Segment { a, b, .. } => {
                if (*b - *a).norm() == 0.0 {
                    return fail("segment endpoints coincide".into());
                }
            }
            BoundaryPiece::Arc { radius, span, .. } => {
                if !(*radius > 0.0) {
                    return fail(format!("arc radius {radius} must be positive"));
                }
                if !(*span > 0.0 && *span <= TAU + 1e-12) {
                    return fail(format!("arc span {span} outside (0, 2pi]"));
                }
            }
            BoundaryPiece::Line { direction, .. } => {
                if (direction.norm() - 1.0).abs() > 1e-12 {
                    return fail("line direction must be unit".into());
                }
            }
        }
        Ok(())
    }

    /// Point at arclength parameter `s` measured along the piece.
    pub fn point_at(&self, s: f64) -> Vec2 {
        match self {
            BoundaryPiece::Segment { a, b, .. } => {
                let t = (*b - *a).normalized();
                *a + t * s
            }
            BoundaryPiece::Arc { center, radius, start_angle, .. } => {
                let phi = start_angle + s / radius;
                *center + Vec2::new(phi.cos(), phi.sin()) * *radius
            }
            BoundaryPiece::Line { point, direction, .. } => *point + *direction * s,
        }
    }

    /// Forward unit tangent at arclength parameter `s` (direction of
    /// increasing parameter).
    pub fn tangent_at(&self, s: f64) -> Vec2 {
        match self {
            BoundaryPiece::Segment { a, b, .. } => (*b - *a).normalized(),
            BoundaryPiece::Arc { radius, start_angle, .. } => {
                let phi = start_angle + s / radius;
                Vec2::new(-phi.sin(), phi.cos())
            }
            BoundaryPiece::Line { direction, .. } => *direction,
        }
    }

    /// Inward unit normal at arclength parameter `s`.
    pub fn inward_normal_at(&self, s: f64) -> Vec2 {
        match self {
            BoundaryPiece::Segment { a, b, interior_on_left } => {
                let t = (*b - *a).normalized();
                if *interior_on_left { t.perp() } else { -t.perp() }
            }
            BoundaryPiece::Arc { center: _, radius, start_angle, interior_toward_center, .. } => {
                let phi = start_angle + s / radius;
                let outward = Vec2::new(phi.cos(), phi.sin());
                if *interior_toward_center { -outward } else { outward }
            }
            BoundaryPiece::Line { direction, interior_on_left, .. } => {
                if *interior_on_left { direction.perp() } else { -direction.perp() }
            }
        }
    }

    /// Closest point on the piece to `p`, as (arclength parameter, point).
    pub fn project(&self, p: Vec2) -> (f64, Vec2) {
        match self {
            BoundaryPiece::Segment { a, b, .. } => {
                let e = *b - *a;
                let len = e.norm();
                let s = ((p - *a).dot(e) / len).clamp(0.0, len);
                (s, self.point_at(s))
            }
            BoundaryPiece::Arc { center, radius, start_angle, span, .. } => {
                let rel = p - *center;
                let phi = if rel.norm() == 0.0 { *start_angle } else { rel.angle() };
                let mut d = wrap_nonneg(phi - start_angle);
                if d > *span {
                    // Snap to the nearer arc endpoint.
                    let over = d - span;
                    let under = TAU - d;
                    d = if over < under { *span } else { 0.0 };
                }
                let s = d * radius;
                (s, self.point_at(s))
            }
            BoundaryPiece::Line { point, direction, .. } => {
                let s = (p - *point).dot(*direction);
                (s, self.point_at(s))
            }
        }
    }

    /// Distance from the arclength parameter `s` to the nearest piece
    /// endpoint; infinite for full circles and anchor-free lines.
    pub fn endpoint_distance(&self, s: f64) -> f64 {
        match self {
            BoundaryPiece::Segment { a, b, .. } => {
                let len = (*b - *a).norm();
                s.min(len - s).max(0.0)
            }
            BoundaryPiece::Arc { radius, span, .. } => {
                if *span >= TAU - 1e-12 {
                    f64::INFINITY
                } else {
                    let len = radius * span;
                    s.min(len - s).max(0.0)
                }
            }
            BoundaryPiece::Line { vertex_at_point, .. } => {
                if *vertex_at_point { s.abs() } else { f64::INFINITY }
            }
        }
    }

    /// All forward ray intersections beyond the grazing tolerance, as
    /// (distance along ray, arclength parameter on the piece).
    fn ray_intersections(&self, origin: Vec2, dir: Vec2, out: &mut Vec<(f64, f64)>) {
        match self {
            BoundaryPiece::Segment { a, b, .. } => {
                let e = *b - *a;
                let denom = dir.cross(e);
                if denom.abs() < 1e-300 {
                    return;
                }
                let rel = *a - origin;
                let t = rel.cross(e) / denom;
                let u = rel.cross(dir) / denom;
                let len = e.norm();
                let slack = 1e-12 * len.max(1.0);
                if t > GRAZING_TOL && u >= -slack / len && u <= 1.0 + slack / len {
                    out.push((t, (u * len).clamp(0.0, len)));
                }
            }
            BoundaryPiece::Arc { center, radius, start_angle, span, .. } => {
                let oc = origin - *center;
                let b = oc.dot(dir);
                let c = oc.norm_squared() - radius * radius;
                let disc = b * b - c;
                if disc < 0.0 {
                    return;
                }
                let sq = disc.sqrt();
                // Stable quadratic roots.
                let q = -(b + b.signum() * sq);
                let roots = if q == 0.0 { [0.0, 0.0] } else { [q, c / q] };
                for t in roots {
                    if t <= GRAZING_TOL {
                        continue;
                    }
                    let p = origin + dir * t;
                    let phi = (p - *center).angle();
                    let d = wrap_nonneg(phi - start_angle);
                    let ang_slack = 1e-12;
                    if d <= *span + ang_slack || d >= TAU - ang_slack {
                        let s = (d.min(*span) * radius).clamp(0.0, radius * span);
                        out.push((t, s));
                    }
                }
            }
            BoundaryPiece::Line { point, direction, interior_on_left, .. } => {
                let n = if *interior_on_left { direction.perp() } else { -direction.perp() };
                let dn = dir.dot(n);
                if dn.abs() < 1e-300 {
                    return;
                }
                let t = (*point - origin).dot(n) / dn;
                if t > GRAZING_TOL {
                    let p = origin + dir * t;
                    out.push((t, (p - *point).dot(*direction)));
                }
            }
        }
    }
}

fn wrap_nonneg(angle: f64) -> f64 {
    let mut a = angle % TAU;
    if a < 0.0 {
        a += TAU;
    }
    a
}

/// Identification of two parallel, equal-length straight edges by a
/// translation. Crossing either edge teleports the flight without a
/// collision event.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub source: usize,
    pub target: usize,
    /// Maps the source edge exactly onto the target edge.
    pub translation: Vec2,
}

/// A billiard table: boundary pieces, glued edges, and escape geometry.
/// Immutable after construction; all queries are pure.
#[derive(Clone, Debug)]
pub struct Table {
    pieces: Vec<BoundaryPiece>,
    gluings: Vec<Gluing>,
    bounded: bool,
    escape_radius: f64,
    feature_size: f64,
    /// For piece i, the gluing index it participates in (if any).
    glue_of: Vec<Option<usize>>,
    /// Cumulative arclength offset of each non-glued piece.
    arclength_offsets: Vec<Option<f64>>,
}

/// Result of a first-hit query.
#[derive(Clone, Debug)]
pub enum FirstHit {
    Hit(Hit),
    /// The flight crossed a glued edge: continue from `exit` with the same
    /// direction after travelling `distance`.
    GluingCrossed { distance: f64, entry: Vec2, exit: Vec2 },
    /// No forward intersection; only possible on unbounded tables.
    Escaped,
}

/// A boundary hit along a unit-speed planar ray.
#[derive(Clone, Debug)]
pub struct Hit {
    /// Length along the ray (time at unit planar speed).
    pub time: f64,
    pub point: Vec2,
    pub piece: usize,
    pub normal: UnitNormal,
    /// Distance to the nearest endpoint of the piece (corner guard).
    pub endpoint_distance: f64,
    /// Arclength parameter of the hit on its piece.
    pub arclength: f64,
}

impl Table {
    pub fn new(pieces: Vec<BoundaryPiece>, gluings: Vec<Gluing>, bounded: bool) -> Result<Table> {
        Table::with_escape_radius(pieces, gluings, bounded, None)
    }

    pub fn with_escape_radius(
        pieces: Vec<BoundaryPiece>,
        gluings: Vec<Gluing>,
        bounded: bool,
        escape_radius: Option<f64>,
    ) -> Result<Table> {
        if pieces.is_empty() {
            return Err(Error::InvalidTable("no boundary pieces".into()));
        }
        for (i, p) in pieces.iter().enumerate() {
            p.validate(i)?;
        }
        let mut glue_of = vec![None; pieces.len()];
        for (gi, g) in gluings.iter().enumerate() {
            validate_gluing(&pieces, g)?;
            for side in [g.source, g.target] {
                if glue_of[side].is_some() {
                    return Err(Error::InvalidTable(format!(
                        "piece {side} appears in more than one gluing"
                    )));
                }
                glue_of[side] = Some(gi);
            }
        }
        let feature_size = feature_size(&pieces);
        let escape_radius = match (bounded, escape_radius) {
            (true, _) => f64::INFINITY,
            (false, Some(r)) => r,
            (false, None) => 1e6 * feature_size,
        };
        let mut arclength_offsets = vec![None; pieces.len()];
        let mut acc = 0.0;
        for (i, p) in pieces.iter().enumerate() {
            if glue_of[i].is_none() {
                if let Some(len) = p.length() {
                    arclength_offsets[i] = Some(acc);
                    acc += len;
                }
            }
        }
        Ok(Table {
            pieces,
            gluings,
            bounded,
            escape_radius,
            feature_size,
            glue_of,
            arclength_offsets,
        })
    }

    pub fn pieces(&self) -> &[BoundaryPiece] {
        &self.pieces
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn escape_radius(&self) -> f64 {
        self.escape_radius
    }

    /// A length scale of the table used to scale position tolerances.
    pub fn feature_size(&self) -> f64 {
        self.feature_size
    }

    /// Total arclength of the collision boundary (non-glued finite pieces).
    pub fn boundary_length(&self) -> f64 {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(i, _)| self.glue_of[*i].is_none())
            .filter_map(|(_, p)| p.length())
            .sum()
    }

    /// Global arclength coordinate of a boundary point, accumulated over
    /// non-glued pieces in declaration order.
    pub fn global_arclength(&self, piece: usize, s: f64) -> f64 {
        self.arclength_offsets[piece].map_or(s, |off| off + s)
    }

    /// Whether `p` lies in the closed table interior (boundary included).
    ///
    /// Tables made only of infinite lines are half-plane intersections;
    /// closed boundaries are decided by crossing parity along a probe ray,
    /// retried in a different direction whenever the probe grazes an
    /// endpoint or runs tangent to an arc.
    pub fn contains(&self, p: Vec2) -> bool {
        let boundary_tol = 1e-9 * self.feature_size.max(1.0);
        let mut nearest = f64::INFINITY;
        for piece in &self.pieces {
            let (_, q) = piece.project(p);
            nearest = nearest.min((p - q).norm());
        }
        if nearest <= boundary_tol {
            return true;
        }
        if self.pieces.iter().all(|pc| matches!(pc, BoundaryPiece::Line { .. })) {
            return self.pieces.iter().all(|pc| {
                let (s, q) = pc.project(p);
                (p - q).dot(pc.inward_normal_at(s)) >= 0.0
            });
        }
        // Crossing parity. Probe angles are fixed and incommensurate so a
        // degenerate alignment is never hit twice.
        for k in 0..32u32 {
            let ang = 0.577215664901532 + 2.399963229728653 * k as f64;
            let dir = Vec2::new(ang.cos(), ang.sin());
            if let Some(crossings) = self.count_crossings(p, dir) {
                return crossings % 2 == 1;
            }
        }
        // Every probe was degenerate; fall back to the nearest piece side.
        let mut best = (f64::INFINITY, false);
        for piece in &self.pieces {
            let (s, q) = piece.project(p);
            let d = (p - q).norm();
            if d < best.0 {
                best = (d, (p - q).dot(piece.inward_normal_at(s)) >= 0.0);
            }
        }
        best.1
    }

    /// Number of transversal boundary crossings of the probe ray, `None`
    /// when the probe hits an endpoint or runs tangent to an arc.
    fn count_crossings(&self, origin: Vec2, dir: Vec2) -> Option<usize> {
        let mut crossings = 0usize;
        for piece in &self.pieces {
            match piece {
                BoundaryPiece::Segment { a, b, .. } => {
                    let e = *b - *a;
                    let denom = dir.cross(e);
                    let len = e.norm();
                    if denom.abs() < 1e-12 * len {
                        // Parallel: either misses or grazes along the edge.
                        let off = (*a - origin).cross(dir);
                        if off.abs() < 1e-9 * len.max(1.0) {
                            return None;
                        }
                        continue;
                    }
                    let rel = *a - origin;
                    let t = rel.cross(e) / denom;
                    let u = rel.cross(dir) / denom;
                    if t <= 0.0 {
                        continue;
                    }
                    if u < -1e-12 || u > 1.0 + 1e-12 {
                        continue;
                    }
                    if u < 1e-9 || u > 1.0 - 1e-9 {
                        return None; // endpoint graze
                    }
                    crossings += 1;
                }
                BoundaryPiece::Arc { center, radius, start_angle, span, .. } => {
                    let oc = origin - *center;
                    let b = oc.dot(dir);
                    let c = oc.norm_squared() - radius * radius;
                    let disc = b * b - c;
                    if disc < 0.0 {
                        continue;
                    }
                    if disc < (1e-9 * radius) * (1e-9 * radius) {
                        return None; // tangent probe
                    }
                    let sq = disc.sqrt();
                    let q = -(b + b.signum() * sq);
                    let roots = if q == 0.0 { [0.0, 0.0] } else { [q, c / q] };
                    for t in roots {
                        if t <= 0.0 {
                            continue;
                        }
                        let hit = origin + dir * t;
                        let phi = (hit - *center).angle();
                        let d = wrap_nonneg(phi - start_angle);
                        if *span >= TAU - 1e-12 {
                            crossings += 1;
                            continue;
                        }
                        let eps = 1e-9;
                        let near_start = d < eps || d > TAU - eps;
                        let near_end = (d - *span).abs() < eps;
                        if near_start || near_end {
                            return None; // arc endpoint graze
                        }
                        if d < *span {
                            crossings += 1;
                        }
                    }
                }
                BoundaryPiece::Line { point, direction, .. } => {
                    let n = direction.perp();
                    let dn = dir.dot(n);
                    if dn.abs() < 1e-12 {
                        let off = (*point - origin).dot(n);
                        if off.abs() < 1e-9 {
                            return None;
                        }
                        continue;
                    }
                    let t = (*point - origin).dot(n) / dn;
                    if t > 0.0 {
                        crossings += 1;
                    }
                }
            }
        }
        Some(crossings)
    }

    /// First boundary intersection of the unit-speed ray `origin + t dir`.
    ///
    /// Returns the smallest positive intersection beyond the grazing
    /// tolerance; a crossing of a glued edge is reported for transparent
    /// continuation instead of a collision. Checks that the origin lies in
    /// the table.
    pub fn first_hit(&self, origin: Vec2, dir: Vec2) -> Result<FirstHit> {
        if !self.contains(origin) {
            return Err(Error::OriginOutsideTable);
        }
        self.first_hit_unchecked(origin, dir)
    }

    /// [`Table::first_hit`] without the interior precondition check; the
    /// flow guarantees it by construction.
    pub fn first_hit_unchecked(&self, origin: Vec2, dir: Vec2) -> Result<FirstHit> {
        let mut cands: Vec<(f64, f64)> = Vec::new();
        let mut best: Option<(f64, usize, f64)> = None;
        for (i, piece) in self.pieces.iter().enumerate() {
            cands.clear();
            piece.ray_intersections(origin, dir, &mut cands);
            for &(t, s) in &cands {
                // Only hits approached from the interior side count.
                if dir.dot(piece.inward_normal_at(s)) > TANGENCY_TOL {
                    continue;
                }
                if best.map_or(true, |(bt, _, _)| t < bt) {
                    best = Some((t, i, s));
                }
            }
        }
        let Some((t, i, s)) = best else {
            return if self.bounded {
                Err(Error::DegenerateRay)
            } else {
                Ok(FirstHit::Escaped)
            };
        };
        let point = origin + dir * t;
        if let Some(gi) = self.glue_of[i] {
            let g = &self.gluings[gi];
            let shift = if g.source == i { g.translation } else { -g.translation };
            return Ok(FirstHit::GluingCrossed { distance: t, entry: point, exit: point + shift });
        }
        let piece = &self.pieces[i];
        let normal = UnitNormal::from_direction(piece.inward_normal_at(s))?;
        Ok(FirstHit::Hit(Hit {
            time: t,
            point,
            piece: i,
            normal,
            endpoint_distance: piece.endpoint_distance(s),
            arclength: s,
        }))
    }

    /// Sample-based validity audit: casts `samples` rays from interior
    /// points and checks that every hit lands on its piece with an inward
    /// normal, and that bounded tables never report escape.
    pub fn audit(&self, samples: usize, seed: u64) -> Result<()> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = self.feature_size;
        let bbox = self.sample_box();
        let mut found = 0usize;
        let mut attempts = 0usize;
        while found < samples {
            attempts += 1;
            if attempts > samples * 200 {
                return Err(Error::InvalidTable(
                    "audit could not sample interior points".into(),
                ));
            }
            let p = Vec2::new(
                rng.gen_range(bbox.0.x..=bbox.1.x),
                rng.gen_range(bbox.0.y..=bbox.1.y),
            );
            if !self.contains(p) {
                continue;
            }
            // Stay clear of the boundary so ray origins are unambiguous.
            let near = self
                .pieces
                .iter()
                .map(|pc| (p - pc.project(p).1).norm())
                .fold(f64::INFINITY, f64::min);
            if near < 1e-6 * f {
                continue;
            }
            found += 1;
            let ang = rng.gen_range(0.0..TAU);
            let dir = Vec2::new(ang.cos(), ang.sin());
            match self.first_hit_unchecked(p, dir)? {
                FirstHit::Hit(h) => {
                    let (_, q) = self.pieces[h.piece].project(h.point);
                    if (h.point - q).norm() > 1e-10 * f.max(1.0) {
                        return Err(Error::InvalidTable(format!(
                            "hit point off its piece by {:.3e}",
                            (h.point - q).norm()
                        )));
                    }
                    if dir.dot(h.normal.as_vec()) > 0.0 {
                        return Err(Error::InvalidTable("normal faces away from ray".into()));
                    }
                }
                FirstHit::GluingCrossed { .. } => {}
                FirstHit::Escaped => {
                    if self.bounded {
                        return Err(Error::InvalidTable(
                            "bounded table reported an escaping ray".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Axis-aligned box enclosing the finite geometry (or a default box
    /// around the anchors for line-only tables).
    pub fn sample_box(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut extend = |p: Vec2| {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        };
        let mut has_finite = false;
        for p in &self.pieces {
            match p {
                BoundaryPiece::Segment { a, b, .. } => {
                    extend(*a);
                    extend(*b);
                    has_finite = true;
                }
                BoundaryPiece::Arc { .. } => {
                    let (alo, ahi) = arc_bbox(p);
                    extend(alo);
                    extend(ahi);
                    has_finite = true;
                }
                BoundaryPiece::Line { point, .. } => extend(*point),
            }
        }
        if !has_finite {
            let f = self.feature_size;
            lo = lo - Vec2::new(2.0 * f, 2.0 * f);
            hi = hi + Vec2::new(2.0 * f, 2.0 * f);
        }
        (lo, hi)
    }
}

/// Tight axis-aligned box of an arc: its endpoints plus any cardinal
/// extreme of the circle that the angular span covers.
fn arc_bbox(piece: &BoundaryPiece) -> (Vec2, Vec2) {
    let BoundaryPiece::Arc { center, radius, start_angle, span, .. } = piece else {
        unreachable!("arc_bbox on a non-arc piece");
    };
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut extend = |p: Vec2| {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    };
    let at = |phi: f64| *center + Vec2::new(phi.cos(), phi.sin()) * *radius;
    extend(at(*start_angle));
    extend(at(*start_angle + *span));
    for k in 0..4 {
        let cardinal = k as f64 * PI / 2.0;
        let d = wrap_nonneg(cardinal - start_angle);
        if d <= *span {
            extend(at(cardinal));
        }
    }
    (lo, hi)
}

fn feature_size(pieces: &[BoundaryPiece]) -> f64 {
    let mut size: f64 = 0.0;
    for p in pieces {
        match p {
            BoundaryPiece::Segment { a, b, .. } => size = size.max((*b - *a).norm()),
            BoundaryPiece::Arc { .. } => {
                let (lo, hi) = arc_bbox(p);
                size = size.max((hi - lo).norm());
            }
            BoundaryPiece::Line { .. } => {}
        }
    }
    if size == 0.0 {
        1.0
    } else {
        size
    }
}

fn validate_gluing(pieces: &[BoundaryPiece], g: &Gluing) -> Result<()> {
    let get = |i: usize| -> Result<(Vec2, Vec2)> {
        match pieces.get(i) {
            Some(BoundaryPiece::Segment { a, b, .. }) => Ok((*a, *b)),
            Some(_) => Err(Error::InvalidTable(format!(
                "gluing refers to non-segment piece {i}"
            ))),
            None => Err(Error::InvalidTable(format!("gluing refers to missing piece {i}"))),
        }
    };
    let (sa, sb) = get(g.source)?;
    let (ta, tb) = get(g.target)?;
    let tol = 1e-9 * (sb - sa).norm().max(1.0);
    let fwd = (sa + g.translation).distance(ta) < tol && (sb + g.translation).distance(tb) < tol;
    let rev = (sa + g.translation).distance(tb) < tol && (sb + g.translation).distance(ta) < tol;
    if !fwd && !rev {
        return Err(Error::InvalidTable(format!(
            "gluing translation does not map piece {} onto piece {}",
            g.source, g.target
        )));
    }
    let ls = (sb - sa).norm();
    let lt = (tb - ta).norm();
    if (ls - lt).abs() > tol {
        return Err(Error::InvalidTable("glued edges differ in length".into()));
    }
    if (sb - sa).cross(tb - ta).abs() > tol * ls {
        return Err(Error::InvalidTable("glued edges are not parallel".into()));
    }
    Ok(())
}

#[allow(dead_code)]
fn normalize_angle(a: f64) -> f64 {
    let mut x = a % TAU;
    if x > PI {
        x -= TAU;
    } else if x < -PI {
        x += TAU;
    }
    x
}
