//! Phase-portrait datasets: sampled initial conditions with per-collision
//! velocity-disk projections, plus the geometric measures used to test
//! portrait structure.
//!
//! The velocity disk is the set of (tangential, rotational) post-collision
//! components; its points satisfy `v_t^2 + v0^2 <= 1` at unit speed, the
//! normal component being determined up to sign.

use crate::analysis::sample_unit_sphere;
use crate::flow::{iterate_with, IterateOptions, PhasePoint, Termination};
use crate::table::Table;
use crate::{Result, VelocityState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name of the generator written into dataset headers.
pub const RNG_ALGORITHM: &str = "chacha8";

/// How initial conditions are drawn.
#[derive(Clone, Debug)]
pub enum Sampling {
    /// Position uniform in boundary arclength, velocity uniform on the
    /// inward hemisphere (solid-angle uniform), from the seeded generator.
    RandomBoundary,
    /// Caller-provided phase points.
    Explicit(Vec<PhasePoint>),
}

/// A portrait run request.
#[derive(Clone, Debug)]
pub struct PortraitRequest {
    pub table_desc: String,
    pub samples: usize,
    pub max_collisions: usize,
    pub seed: u64,
    /// Worker threads; 1 runs serially. Output is identical either way.
    pub jobs: usize,
    pub sampling: Sampling,
}

/// One velocity-disk record.
#[derive(Clone, Copy, Debug)]
pub struct PortraitPoint {
    /// Global arclength of the collision point along the boundary.
    pub s: f64,
    /// Post-collision tangential component, oriented by the piece's
    /// forward tangent.
    pub v_t: f64,
    /// Post-collision rotational component.
    pub v0: f64,
}

/// All records of one orbit.
#[derive(Clone, Debug)]
pub struct PortraitOrbit {
    pub index: usize,
    pub initial: PhasePoint,
    pub points: Vec<PortraitPoint>,
    pub termination: Termination,
}

/// A full portrait dataset with its reproducibility header.
#[derive(Clone, Debug)]
pub struct PortraitDataset {
    pub table_desc: String,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub samples: usize,
    pub max_collisions: usize,
    pub orbits: Vec<PortraitOrbit>,
}

/// Draw an initial condition on the boundary: uniform in arclength over
/// non-glued pieces, velocity uniform on the inward hemisphere.
pub fn sample_boundary_start(table: &Table, rng: &mut ChaCha8Rng) -> PhasePoint {
    let total = table.boundary_length();
    loop {
        let mut target = rng.gen_range(0.0..total);
        let mut chosen = None;
        for (i, piece) in table.pieces().iter().enumerate() {
            if table.gluings().iter().any(|g| g.source == i || g.target == i) {
                continue;
            }
            let Some(len) = piece.length() else { continue };
            if target <= len {
                chosen = Some((i, target));
                break;
            }
            target -= len;
        }
        let Some((i, s)) = chosen else { continue };
        let piece = &table.pieces()[i];
        let point = piece.point_at(s);
        let normal = piece.inward_normal_at(s);
        // Uniform on the sphere, reflected onto the inward hemisphere.
        let mut v = sample_unit_sphere(rng);
        let dot = v.planar().dot(normal);
        if dot < 0.0 {
            let planar = v.planar() - normal * (2.0 * dot);
            v = VelocityState::new(v.v0, planar.x, planar.y);
        }
        if v.planar().dot(normal) > 1e-6 {
            return PhasePoint::new(point, v);
        }
    }
}

fn simulate_orbit(
    table: &Table,
    index: usize,
    start: PhasePoint,
    max_collisions: usize,
) -> PortraitOrbit {
    let opts = IterateOptions::new(table, max_collisions).without_period_detection();
    let orbit = iterate_with(table, start, &opts);
    let points = orbit
        .events
        .iter()
        .map(|e| {
            let piece = &table.pieces()[e.piece];
            let tangent = piece.tangent_at(e.arclength);
            PortraitPoint {
                s: table.global_arclength(e.piece, e.arclength),
                v_t: e.v_after.planar().dot(tangent),
                v0: e.v_after.v0,
            }
        })
        .collect();
    PortraitOrbit { index, initial: start, points, termination: orbit.termination }
}

/// Run a portrait batch. Initial conditions are drawn sequentially from
/// the seeded generator, so the dataset is a pure function of the request;
/// orbits then run on `jobs` workers and are collected in sample order,
/// making the output byte-identical at any parallelism degree.
pub fn run_portrait(table: &Table, req: &PortraitRequest) -> Result<PortraitDataset> {
    let starts: Vec<PhasePoint> = match &req.sampling {
        Sampling::Explicit(points) => points.clone(),
        Sampling::RandomBoundary => {
            let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
            (0..req.samples).map(|_| sample_boundary_start(table, &mut rng)).collect()
        }
    };
    let run = |(index, start): (usize, &PhasePoint)| {
        simulate_orbit(table, index, *start, req.max_collisions)
    };
    let orbits: Vec<PortraitOrbit> = if req.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(req.jobs)
            .build()
            .map_err(|e| crate::Error::Config(format!("worker pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            starts.par_iter().enumerate().map(run).collect()
        })
    } else {
        starts.iter().enumerate().map(run).collect()
    };
    Ok(PortraitDataset {
        table_desc: req.table_desc.clone(),
        seed: req.seed,
        rng_algorithm: RNG_ALGORITHM,
        samples: starts.len(),
        max_collisions: req.max_collisions,
        orbits,
    })
}

impl PortraitDataset {
    /// Check the velocity-disk invariant and per-orbit record counts.
    pub fn sanity_check(&self) -> Result<()> {
        for orbit in &self.orbits {
            for p in &orbit.points {
                if p.v_t * p.v_t + p.v0 * p.v0 > 1.0 + 1e-9 {
                    return Err(crate::Error::Config(format!(
                        "orbit {}: point outside the velocity disk",
                        orbit.index
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Maximal distance of the points of a closed convex loop from their own
/// convex hull boundary. Near zero when the points trace a convex curve.
pub fn hull_thickness(points: &[(f64, f64)]) -> f64 {
    if points.len() < 8 {
        return 0.0;
    }
    let span_x = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max)
        - points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let span_y = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
        - points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    if span_x.max(span_y) < 1e-9 {
        return 0.0; // a single velocity point
    }
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return 0.0;
    }
    points
        .iter()
        .map(|p| distance_to_polygon(*p, &hull))
        .fold(0.0f64, f64::max)
}

/// Portrait orbits wind around periodic velocity cycles: an orbit near a
/// period-k cycle traces k separate loops visited cyclically, possibly a
/// different family on each wall. Group the records by wall and stride and
/// report the best (smallest) worst-loop hull thickness over strides up to
/// `max_loops`.
pub fn loop_thickness(points: &[(f64, f64)], pieces: &[usize], max_loops: usize) -> f64 {
    let mut best = f64::INFINITY;
    for k in 1..=max_loops {
        if points.len() / k < 24 {
            break;
        }
        let mut worst = 0.0f64;
        for wall in unique(pieces) {
            for r in 0..k {
                let sub: Vec<(f64, f64)> = points
                    .iter()
                    .zip(pieces)
                    .enumerate()
                    .filter(|(i, (_, w))| i % k == r && **w == wall)
                    .map(|(_, (p, _))| *p)
                    .collect();
                worst = worst.max(hull_thickness(&sub));
            }
        }
        best = best.min(worst);
        if best < 1e-3 {
            break;
        }
    }
    best
}

fn unique(xs: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = xs.to_vec();
    out.sort_unstable();
    out.dedup();
    out
}

/// Andrew's monotone chain; returns hull vertices counterclockwise.
fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn distance_to_polygon(p: (f64, f64), poly: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let e = (b.0 - a.0, b.1 - a.1);
        let len2 = e.0 * e.0 + e.1 * e.1;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.0 - a.0) * e.0 + (p.1 - a.1) * e.1) / len2).clamp(0.0, 1.0)
        };
        let q = (a.0 + t * e.0, a.1 + t * e.1);
        let d = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
        best = best.min(d);
    }
    best
}

/// Mean and standard deviation of the distances from each point to the
/// nearest of the given centers.
pub fn radial_dispersion(points: &[(f64, f64)], centers: &[(f64, f64)]) -> (f64, f64) {
    let dists: Vec<f64> = points
        .iter()
        .map(|p| {
            centers
                .iter()
                .map(|c| ((p.0 - c.0).powi(2) + (p.1 - c.1).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let n = dists.len() as f64;
    let mean = dists.iter().sum::<f64>() / n;
    let var = dists.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
