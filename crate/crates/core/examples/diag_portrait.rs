//! Scratch diagnostic for portrait loop structure (not part of the build).
use noslip_billiards::flow::{iterate_with, IterateOptions, PhasePoint};
use noslip_billiards::portrait::{hull_thickness, run_portrait, PortraitRequest, Sampling};
use noslip_billiards::table::regular_polygon;

fn main() {
    let table = regular_polygon(6, 1.0).unwrap();
    let req = PortraitRequest {
        table_desc: "hexagon".into(),
        samples: 20,
        max_collisions: 6000,
        seed: 6,
        jobs: 4,
        sampling: Sampling::RandomBoundary,
    };
    let ds = run_portrait(&table, &req).unwrap();
    for orbit in &ds.orbits {
        let pts: Vec<(f64, f64)> = orbit.points.iter().map(|p| (p.v_t, p.v0)).collect();
        let pieces: Vec<usize> = {
            // recompute piece ids from s
            let mut cum = vec![];
            let mut acc = 0.0;
            for p in table.pieces() {
                let l = p.length().unwrap();
                cum.push((acc, acc + l));
                acc += l;
            }
            orbit
                .points
                .iter()
                .map(|p| cum.iter().position(|(a, b)| p.s >= *a && p.s <= *b).unwrap_or(5))
                .collect()
        };
        // per-wall subsequences, stride within wall
        let mut best = (f64::INFINITY, 0usize);
        for k in 1..=96usize {
            let mut worst = 0.0f64;
            let mut enough = true;
            for wall in 0..6usize {
                let sub: Vec<(f64, f64)> =
                    pts.iter().zip(&pieces).filter(|(_, w)| **w == wall).map(|(p, _)| *p).collect();
                if sub.len() < k * 16 {
                    enough = false;
                    break;
                }
                for r in 0..k {
                    let s: Vec<(f64, f64)> = sub.iter().skip(r).step_by(k).cloned().collect();
                    worst = worst.max(hull_thickness(&s));
                }
            }
            if !enough {
                break;
            }
            if worst < best.0 {
                best = (worst, k);
            }
            if best.0 < 0.002 {
                break;
            }
        }
        println!(
            "orbit {:2}: n={} best_thickness={:.4} at k={}",
            orbit.index,
            pts.len(),
            best.0,
            best.1
        );
    }
    // isosceles axis check
    let verts = [
        noslip_billiards::math::Vec2::new(-0.5, 0.0),
        noslip_billiards::math::Vec2::new(0.5, 0.0),
        noslip_billiards::math::Vec2::new(0.0, 1.5),
    ];
    let tri = noslip_billiards::table::polygon(&verts).unwrap();
    let d1 = (verts[1] - verts[0]).normalized();
    let d2 = (verts[2] - verts[0]).normalized();
    let theta = d1.dot(d2).clamp(-1.0, 1.0).acos();
    let bis = (d1 + d2).normalized();
    let x1 = -bis.perp();
    for sign in [1.0f64, -1.0] {
        let v0 = -std::f64::consts::SQRT_2 * (theta / 2.0).sin() * sign;
        let planar = x1 * sign;
        let v = noslip_billiards::VelocityState::new(v0, planar.x, planar.y).normalized();
        let start = PhasePoint::new(noslip_billiards::math::Vec2::new(-0.35, 0.0), v);
        let opts = IterateOptions::new(&tri, 40).without_period_detection();
        let orbit = iterate_with(&tri, start, &opts);
        println!(
            "isosceles axis sign {sign}: theta={theta:.4} events={} term={:?} first_piece={:?}",
            orbit.events.len(),
            orbit.termination,
            orbit.events.first().map(|e| e.piece)
        );
        if orbit.events.len() >= 2 {
            let e = &orbit.events[1];
            println!(
                "   period-2 return error: {:.3e}",
                (e.point - start.position).norm()
            );
        }
    }
}
