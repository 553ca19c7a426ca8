//! Builders for the standard tables: strip, wedge, polygons, circle,
//! stadium, mushroom, pocketed rectangle, moon, disk on a torus, and
//! arc-bulged polygons.

use super::{BoundaryPiece, Gluing, Table};
use crate::math::Vec2;
use crate::{Error, Result};
use std::f64::consts::{PI, TAU};

fn bad(op: &'static str, constraint: &'static str, value: f64) -> Error {
    Error::BadParameter { op, constraint, value }
}

/// Two parallel horizontal walls a distance `separation` apart, the lower
/// one along `y = 0`. Unbounded; unit separation is the normalized case.
pub fn strip(separation: f64) -> Result<Table> {
    if !(separation > 0.0) {
        return Err(bad("strip", "separation must be positive", separation));
    }
    let ex = Vec2::new(1.0, 0.0);
    let pieces = vec![
        BoundaryPiece::Line {
            point: Vec2::ZERO,
            direction: ex,
            interior_on_left: true,
            vertex_at_point: false,
        },
        BoundaryPiece::Line {
            point: Vec2::new(0.0, separation),
            direction: ex,
            interior_on_left: false,
            vertex_at_point: false,
        },
    ];
    Table::with_escape_radius(pieces, vec![], false, Some(1e6 * separation))
}

/// Open wedge of angle `theta` with vertex at the origin and the outward
/// bisector along the positive second axis.
pub fn wedge(theta: f64) -> Result<Table> {
    if !(theta > 0.0 && theta < PI) {
        return Err(bad("wedge", "angle must lie in (0, pi)", theta));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    let pieces = vec![
        // Right wall, inward normal at angle pi - theta/2.
        BoundaryPiece::Line {
            point: Vec2::ZERO,
            direction: Vec2::new(s, c),
            interior_on_left: true,
            vertex_at_point: true,
        },
        // Left wall, inward normal at angle theta/2.
        BoundaryPiece::Line {
            point: Vec2::ZERO,
            direction: Vec2::new(-s, c),
            interior_on_left: false,
            vertex_at_point: true,
        },
    ];
    Table::with_escape_radius(pieces, vec![], false, Some(1e6))
}

/// Regular `n`-gon with the given circumradius, first vertex on top.
pub fn regular_polygon(n: usize, circumradius: f64) -> Result<Table> {
    if n < 3 {
        return Err(bad("regular_polygon", "needs at least 3 sides", n as f64));
    }
    if !(circumradius > 0.0) {
        return Err(bad("regular_polygon", "circumradius must be positive", circumradius));
    }
    let verts: Vec<Vec2> = (0..n)
        .map(|k| {
            let a = PI / 2.0 + TAU * k as f64 / n as f64;
            Vec2::new(circumradius * a.cos(), circumradius * a.sin())
        })
        .collect();
    polygon(&verts)
}

/// Simple polygon from counterclockwise vertices.
pub fn polygon(vertices: &[Vec2]) -> Result<Table> {
    if vertices.len() < 3 {
        return Err(bad("polygon", "needs at least 3 vertices", vertices.len() as f64));
    }
    let area2: f64 = vertices
        .iter()
        .zip(vertices.iter().cycle().skip(1))
        .map(|(a, b)| a.cross(*b))
        .sum();
    if area2 <= 0.0 {
        return Err(bad("polygon", "vertices must be counterclockwise", area2));
    }
    let pieces = vertices
        .iter()
        .zip(vertices.iter().cycle().skip(1))
        .map(|(a, b)| BoundaryPiece::segment(*a, *b))
        .collect();
    Table::new(pieces, vec![], true)
}

/// Circular table of the given radius centered at the origin.
pub fn circle(radius: f64) -> Result<Table> {
    if !(radius > 0.0) {
        return Err(bad("circle", "radius must be positive", radius));
    }
    let pieces = vec![BoundaryPiece::Arc {
        center: Vec2::ZERO,
        radius,
        start_angle: 0.0,
        span: TAU,
        interior_toward_center: true,
    }];
    Table::new(pieces, vec![], true)
}

/// Bunimovich stadium: flat walls `y = +-cap_radius` for
/// `|x| <= half_length`, closed by half-circle caps.
pub fn stadium(half_length: f64, cap_radius: f64) -> Result<Table> {
    if !(half_length > 0.0) {
        return Err(bad("stadium", "half_length must be positive", half_length));
    }
    if !(cap_radius > 0.0) {
        return Err(bad("stadium", "cap_radius must be positive", cap_radius));
    }
    let (h, r) = (half_length, cap_radius);
    let pieces = vec![
        BoundaryPiece::segment(Vec2::new(-h, -r), Vec2::new(h, -r)),
        BoundaryPiece::Arc {
            center: Vec2::new(h, 0.0),
            radius: r,
            start_angle: -PI / 2.0,
            span: PI,
            interior_toward_center: true,
        },
        BoundaryPiece::segment(Vec2::new(h, r), Vec2::new(-h, r)),
        BoundaryPiece::Arc {
            center: Vec2::new(-h, 0.0),
            radius: r,
            start_angle: PI / 2.0,
            span: PI,
            interior_toward_center: true,
        },
    ];
    Table::new(pieces, vec![], true)
}

/// Bunimovich mushroom: semicircular cap of radius `cap_radius` over a
/// rectangular stem of the given width and depth.
pub fn mushroom(cap_radius: f64, stem_width: f64, stem_depth: f64) -> Result<Table> {
    if !(cap_radius > 0.0) {
        return Err(bad("mushroom", "cap_radius must be positive", cap_radius));
    }
    if !(stem_width > 0.0 && stem_width < 2.0 * cap_radius) {
        return Err(bad("mushroom", "stem must be narrower than the cap", stem_width));
    }
    if !(stem_depth > 0.0) {
        return Err(bad("mushroom", "stem_depth must be positive", stem_depth));
    }
    let (r, w, d) = (cap_radius, stem_width / 2.0, stem_depth);
    let pieces = vec![
        BoundaryPiece::Arc {
            center: Vec2::ZERO,
            radius: r,
            start_angle: 0.0,
            span: PI,
            interior_toward_center: true,
        },
        BoundaryPiece::segment(Vec2::new(-r, 0.0), Vec2::new(-w, 0.0)),
        BoundaryPiece::segment(Vec2::new(-w, 0.0), Vec2::new(-w, -d)),
        BoundaryPiece::segment(Vec2::new(-w, -d), Vec2::new(w, -d)),
        BoundaryPiece::segment(Vec2::new(w, -d), Vec2::new(w, 0.0)),
        BoundaryPiece::segment(Vec2::new(w, 0.0), Vec2::new(r, 0.0)),
    ];
    Table::new(pieces, vec![], true)
}

/// Rectangle with dispersing quarter-circle pockets cut into the corners.
pub fn pocketed_rectangle(width: f64, height: f64, pocket_radius: f64) -> Result<Table> {
    if !(width > 0.0) {
        return Err(bad("pocketed_rectangle", "width must be positive", width));
    }
    if !(height > 0.0) {
        return Err(bad("pocketed_rectangle", "height must be positive", height));
    }
    if !(pocket_radius > 0.0 && 2.0 * pocket_radius < width.min(height)) {
        return Err(bad(
            "pocketed_rectangle",
            "pockets must fit inside the rectangle",
            pocket_radius,
        ));
    }
    let (w, h, p) = (width / 2.0, height / 2.0, pocket_radius);
    // Corner pockets are arcs centered at the rectangle corners curving
    // into the table (interior away from the arc center).
    let corner = |cx: f64, cy: f64, start: f64| BoundaryPiece::Arc {
        center: Vec2::new(cx, cy),
        radius: p,
        start_angle: start,
        span: PI / 2.0,
        interior_toward_center: false,
    };
    let pieces = vec![
        BoundaryPiece::segment(Vec2::new(-w + p, -h), Vec2::new(w - p, -h)),
        corner(w, -h, PI / 2.0),
        BoundaryPiece::segment(Vec2::new(w, -h + p), Vec2::new(w, h - p)),
        corner(w, h, PI),
        BoundaryPiece::segment(Vec2::new(w - p, h), Vec2::new(-w + p, h)),
        corner(-w, h, 3.0 * PI / 2.0),
        BoundaryPiece::segment(Vec2::new(-w, h - p), Vec2::new(-w, -h + p)),
        corner(-w, -h, 0.0),
    ];
    Table::new(pieces, vec![], true)
}

/// Moon (lune): the region inside a circle of `outer_radius` centered at
/// the origin and outside a circle of `inner_radius` centered at
/// `(offset, 0)`. The circles must intersect so the table is a crescent.
pub fn moon(outer_radius: f64, inner_radius: f64, offset: f64) -> Result<Table> {
    if !(outer_radius > 0.0 && inner_radius > 0.0) {
        return Err(bad("moon", "radii must be positive", outer_radius.min(inner_radius)));
    }
    if !(inner_radius < outer_radius) {
        return Err(bad("moon", "inner radius must be smaller", inner_radius));
    }
    let (ro, ri, c) = (outer_radius, inner_radius, offset);
    if !(c > ro - ri && c < ro + ri) {
        return Err(bad("moon", "circles must intersect to form a crescent", c));
    }
    // Intersection points of the two circles.
    let x = (ro * ro - ri * ri + c * c) / (2.0 * c);
    let y2 = ro * ro - x * x;
    if y2 <= 0.0 {
        return Err(bad("moon", "degenerate crescent", y2));
    }
    let y = y2.sqrt();
    // Outer arc: counterclockwise from the upper junction around the far
    // side to the lower junction.
    let phi_up = Vec2::new(x, y).angle();
    let phi_dn = Vec2::new(x, -y).angle();
    let outer_span = wrap_span(phi_dn - phi_up);
    // Inner arc seen from its own center, counterclockwise from the upper
    // junction to the lower one across the side facing the origin.
    let psi_up = (Vec2::new(x, y) - Vec2::new(c, 0.0)).angle();
    let psi_dn = (Vec2::new(x, -y) - Vec2::new(c, 0.0)).angle();
    let inner_span = wrap_span(psi_dn - psi_up);
    let pieces = vec![
        BoundaryPiece::Arc {
            center: Vec2::ZERO,
            radius: ro,
            start_angle: phi_up,
            span: outer_span,
            interior_toward_center: true,
        },
        BoundaryPiece::Arc {
            center: Vec2::new(c, 0.0),
            radius: ri,
            start_angle: psi_up,
            span: inner_span,
            interior_toward_center: false,
        },
    ];
    Table::new(pieces, vec![], true)
}

fn wrap_span(a: f64) -> f64 {
    let mut x = a % TAU;
    if x <= 0.0 {
        x += TAU;
    }
    x
}

/// Dispersing disk of radius `scatterer_radius` at the center of a square
/// of side `side` with opposite edges identified (a flat torus).
pub fn disk_on_torus(side: f64, scatterer_radius: f64) -> Result<Table> {
    if !(side > 0.0) {
        return Err(bad("disk_on_torus", "side must be positive", side));
    }
    if !(scatterer_radius > 0.0 && 2.0 * scatterer_radius < side) {
        return Err(bad(
            "disk_on_torus",
            "scatterer must fit inside the cell",
            scatterer_radius,
        ));
    }
    let l = side;
    let pieces = vec![
        BoundaryPiece::segment(Vec2::new(0.0, 0.0), Vec2::new(l, 0.0)), // bottom
        BoundaryPiece::segment(Vec2::new(l, 0.0), Vec2::new(l, l)),    // right
        BoundaryPiece::segment(Vec2::new(l, l), Vec2::new(0.0, l)),    // top
        BoundaryPiece::segment(Vec2::new(0.0, l), Vec2::new(0.0, 0.0)), // left
        BoundaryPiece::Arc {
            center: Vec2::new(l / 2.0, l / 2.0),
            radius: scatterer_radius,
            start_angle: 0.0,
            span: TAU,
            interior_toward_center: false,
        },
    ];
    let gluings = vec![
        Gluing { source: 0, target: 2, translation: Vec2::new(0.0, l) },
        Gluing { source: 3, target: 1, translation: Vec2::new(l, 0.0) },
    ];
    Table::new(pieces, gluings, true)
}

/// Polygon with every edge replaced by a circular arc of the given sagitta
/// bulging outward; the arc-bulged tables stand in for small smooth
/// perturbations of the polygon.
pub fn bulged_polygon(vertices: &[Vec2], sagitta: f64) -> Result<Table> {
    if vertices.len() < 3 {
        return Err(bad("bulged_polygon", "needs at least 3 vertices", vertices.len() as f64));
    }
    let area2: f64 = vertices
        .iter()
        .zip(vertices.iter().cycle().skip(1))
        .map(|(a, b)| a.cross(*b))
        .sum();
    if area2 <= 0.0 {
        return Err(bad("bulged_polygon", "vertices must be counterclockwise", area2));
    }
    if !(sagitta > 0.0) {
        return Err(bad("bulged_polygon", "sagitta must be positive", sagitta));
    }
    let mut pieces = Vec::with_capacity(vertices.len());
    for (a, b) in vertices.iter().zip(vertices.iter().cycle().skip(1)) {
        let chord = (*b - *a).norm();
        if !(sagitta < chord / 2.0) {
            return Err(bad(
                "bulged_polygon",
                "sagitta must be below half the shortest edge",
                sagitta,
            ));
        }
        // Chord-sagitta relation: r = (c^2/4 + s^2) / (2 s).
        let r = (chord * chord / 4.0 + sagitta * sagitta) / (2.0 * sagitta);
        let mid = (*a + *b) * 0.5;
        // Outward bulge: the arc center sits inside the polygon, at
        // distance r - s from the chord on its interior (left) side.
        let inward = (*b - *a).normalized().perp();
        let center = mid + inward * (r - sagitta);
        let ang_a = (*a - center).angle();
        let ang_b = (*b - center).angle();
        let span = wrap_span(ang_b - ang_a);
        pieces.push(BoundaryPiece::Arc {
            center,
            radius: r,
            start_angle: ang_a,
            span,
            interior_toward_center: true,
        });
    }
    Table::new(pieces, vec![], true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::FirstHit;

    #[test]
    fn hexagon_normals_point_at_origin() {
        let t = regular_polygon(6, 1.0).unwrap();
        assert_eq!(t.pieces().len(), 6);
        assert!(t.contains(Vec2::ZERO));
        for piece in t.pieces() {
            let s = piece.length().unwrap() / 2.0;
            let p = piece.point_at(s);
            let n = piece.inward_normal_at(s);
            // Midpoint normal aims at the center of a regular polygon.
            assert!((n - (-p).normalized()).norm() < 1e-12);
        }
    }

    #[test]
    fn wedge_is_right_angle_pair_of_lines() {
        let t = wedge(PI / 2.0).unwrap();
        assert_eq!(t.pieces().len(), 2);
        assert!(t.escape_radius().is_finite());
        let dirs: Vec<Vec2> = t
            .pieces()
            .iter()
            .map(|p| match p {
                BoundaryPiece::Line { direction, .. } => *direction,
                _ => panic!("wedge walls must be lines"),
            })
            .collect();
        assert!(dirs[0].dot(dirs[1]).abs() < 1e-12);
        assert!(t.contains(Vec2::new(0.0, 1.0)));
        assert!(!t.contains(Vec2::new(0.0, -1.0)));
    }

    #[test]
    fn bulged_edges_satisfy_circle_through_three_points() {
        // Independent construction: circumcircle of the two endpoints and
        // the outward-shifted midpoint must match the builder's arc.
        let verts: Vec<Vec2> = (0..5)
            .map(|k| {
                let a = PI / 2.0 + TAU * k as f64 / 5.0;
                Vec2::new(a.cos(), a.sin())
            })
            .collect();
        let s = 0.01;
        let t = bulged_polygon(&verts, s).unwrap();
        assert_eq!(t.pieces().len(), 5);
        for (i, (a, b)) in verts.iter().zip(verts.iter().cycle().skip(1)).enumerate() {
            let outward = -(*b - *a).normalized().perp();
            let m = (*a + *b) * 0.5 + outward * s;
            let (c, r) = circumcircle(*a, m, *b);
            match &t.pieces()[i] {
                BoundaryPiece::Arc { center, radius, .. } => {
                    assert!((c - *center).norm() < 1e-12);
                    assert!((r - radius).abs() < 1e-12);
                }
                other => panic!("expected arc, got {other:?}"),
            }
        }
    }

    fn circumcircle(a: Vec2, b: Vec2, c: Vec2) -> (Vec2, f64) {
        let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        let ux = (a.norm_squared() * (b.y - c.y)
            + b.norm_squared() * (c.y - a.y)
            + c.norm_squared() * (a.y - b.y))
            / d;
        let uy = (a.norm_squared() * (c.x - b.x)
            + b.norm_squared() * (a.x - c.x)
            + c.norm_squared() * (b.x - a.x))
            / d;
        let center = Vec2::new(ux, uy);
        (center, (a - center).norm())
    }

    #[test]
    fn moon_is_a_crescent() {
        let t = moon(1.0, 0.7, 0.6).unwrap();
        assert_eq!(t.pieces().len(), 2);
        // Inside the outer circle but left of the inner one.
        assert!(t.contains(Vec2::new(-0.5, 0.0)));
        // Inside the inner circle: removed from the table.
        assert!(!t.contains(Vec2::new(0.6, 0.0)));
        assert!(moon(1.0, 0.2, 0.1).is_err()); // nested, no crescent
    }

    #[test]
    fn builder_dimension_errors() {
        assert!(strip(0.0).is_err());
        assert!(wedge(PI).is_err());
        assert!(regular_polygon(2, 1.0).is_err());
        assert!(circle(-1.0).is_err());
        assert!(stadium(1.0, 0.0).is_err());
        assert!(mushroom(0.5, 1.5, 0.4).is_err()); // stem wider than cap
        assert!(pocketed_rectangle(1.0, 1.0, 0.6).is_err());
        assert!(disk_on_torus(1.0, 0.5).is_err());
        let tri = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        assert!(bulged_polygon(&tri, 0.6).is_err());
    }

    #[test]
    fn builders_pass_ray_audit() {
        let tables: Vec<(&str, Table)> = vec![
            ("strip", strip(1.0).unwrap()),
            ("wedge", wedge(1.1).unwrap()),
            ("hexagon", regular_polygon(6, 1.0).unwrap()),
            ("triangle", regular_polygon(3, 1.0).unwrap()),
            ("circle", circle(1.0).unwrap()),
            ("stadium", stadium(1.0, 0.5).unwrap()),
            ("mushroom", mushroom(1.0, 0.8, 1.0).unwrap()),
            ("pockets", pocketed_rectangle(2.0, 1.0, 0.2).unwrap()),
            ("moon", moon(1.0, 0.7, 0.6).unwrap()),
            ("torus", disk_on_torus(1.0, 0.25).unwrap()),
            ("pentagon-bulged", {
                let verts: Vec<Vec2> = (0..5)
                    .map(|k| {
                        let a = PI / 2.0 + TAU * k as f64 / 5.0;
                        Vec2::new(a.cos(), a.sin())
                    })
                    .collect();
                bulged_polygon(&verts, 0.02).unwrap()
            }),
        ];
        for (name, table) in tables {
            table
                .audit(10_000, 0xB111A4D)
                .unwrap_or_else(|e| panic!("{name}: audit failed: {e}"));
        }
    }

    #[test]
    fn stadium_flats_and_caps_agree_at_junctions() {
        let t = stadium(1.0, 0.5).unwrap();
        match t.first_hit(Vec2::ZERO, Vec2::new(1.0, 0.0)).unwrap() {
            FirstHit::Hit(h) => {
                assert!((h.point - Vec2::new(1.5, 0.0)).norm() < 1e-12);
                assert_eq!(h.piece, 1);
            }
            other => panic!("expected cap hit, got {other:?}"),
        }
    }
}
