//! Trace and dataset serialization: CSV and JSON-lines with full double
//! precision, plus a minimal SVG scatter writer.
//!
//! Orbit trace columns, in order:
//! `index,piece,x,y,x0,v0_pre,v1_pre,v2_pre,v0_post,v1_post,v2_post,t`
//! where `(x, y)` is the collision point, `x0` the rotational coordinate at
//! the collision, and `t` the flight time since the previous event.

use crate::flow::{Orbit, Termination};
use crate::portrait::PortraitDataset;
use std::io::{self, Write};

/// Format a float with 17 significant digits (full f64 round-trip).
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Stable label for a termination reason.
pub fn termination_label(t: Termination) -> String {
    match t {
        Termination::MaxCollisions => "max_collisions".into(),
        Termination::Escaped => "escaped".into(),
        Termination::Corner => "corner".into(),
        Termination::Degenerate => "degenerate".into(),
        Termination::PeriodDetected(p) => format!("period:{p}"),
    }
}

/// Header line of the orbit trace CSV format.
pub const ORBIT_CSV_HEADER: &str =
    "index,piece,x,y,x0,v0_pre,v1_pre,v2_pre,v0_post,v1_post,v2_post,t";

/// Write one orbit as CSV. `label` tags the orbit in batch output; pass
/// `None` for single-orbit traces.
pub fn write_orbit_csv<W: Write>(w: &mut W, orbit: &Orbit, label: Option<usize>) -> io::Result<()> {
    if let Some(k) = label {
        writeln!(
            w,
            "# orbit {k}: initial = ({}, {}, {}; {}, {}, {}), termination = {}",
            fmt_g17(orbit.initial.position.x),
            fmt_g17(orbit.initial.position.y),
            fmt_g17(orbit.initial.x0),
            fmt_g17(orbit.initial.velocity.v0),
            fmt_g17(orbit.initial.velocity.v1),
            fmt_g17(orbit.initial.velocity.v2),
            termination_label(orbit.termination)
        )?;
    }
    for e in &orbit.events {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            e.index,
            e.piece,
            fmt_g17(e.point.x),
            fmt_g17(e.point.y),
            fmt_g17(e.x0),
            fmt_g17(e.v_before.v0),
            fmt_g17(e.v_before.v1),
            fmt_g17(e.v_before.v2),
            fmt_g17(e.v_after.v0),
            fmt_g17(e.v_after.v1),
            fmt_g17(e.v_after.v2),
            fmt_g17(e.flight_time),
        )?;
    }
    Ok(())
}

/// Write one orbit as JSON lines mirroring the CSV columns.
pub fn write_orbit_jsonl<W: Write>(
    w: &mut W,
    orbit: &Orbit,
    label: Option<usize>,
) -> io::Result<()> {
    for e in &orbit.events {
        let orbit_field = label.map(|k| format!("\"orbit\":{k},")).unwrap_or_default();
        writeln!(
            w,
            "{{{orbit_field}\"index\":{},\"piece\":{},\"x\":{},\"y\":{},\"x0\":{},\
             \"v_pre\":[{},{},{}],\"v_post\":[{},{},{}],\"t\":{}}}",
            e.index,
            e.piece,
            fmt_g17(e.point.x),
            fmt_g17(e.point.y),
            fmt_g17(e.x0),
            fmt_g17(e.v_before.v0),
            fmt_g17(e.v_before.v1),
            fmt_g17(e.v_before.v2),
            fmt_g17(e.v_after.v0),
            fmt_g17(e.v_after.v1),
            fmt_g17(e.v_after.v2),
            fmt_g17(e.flight_time),
        )?;
    }
    Ok(())
}

fn escape_json(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn portrait_header_lines(ds: &PortraitDataset) -> (String, String, String, String, String) {
    (
        format!("seed = {}", ds.seed),
        format!("rng = {}", ds.rng_algorithm),
        format!("table = {}", ds.table_desc),
        format!("samples = {}", ds.samples),
        format!("max_collisions = {}", ds.max_collisions),
    )
}

/// Portrait CSV: `#`-prefixed header with the reproduction parameters,
/// a `# orbit` preamble per orbit, then `orbit,collision,s,v_t,v0` rows.
pub fn write_portrait_csv<W: Write>(w: &mut W, ds: &PortraitDataset) -> io::Result<()> {
    let (a, b, c, d, e) = portrait_header_lines(ds);
    for line in [a, b, c, d, e] {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "orbit,collision,s,v_t,v0")?;
    for orbit in &ds.orbits {
        writeln!(
            w,
            "# orbit {}: initial = ({}, {}; {}, {}, {}), termination = {}",
            orbit.index,
            fmt_g17(orbit.initial.position.x),
            fmt_g17(orbit.initial.position.y),
            fmt_g17(orbit.initial.velocity.v0),
            fmt_g17(orbit.initial.velocity.v1),
            fmt_g17(orbit.initial.velocity.v2),
            termination_label(orbit.termination)
        )?;
        for (k, p) in orbit.points.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                orbit.index,
                k,
                fmt_g17(p.s),
                fmt_g17(p.v_t),
                fmt_g17(p.v0)
            )?;
        }
    }
    Ok(())
}

/// Portrait JSON lines: a header object followed by one object per orbit.
pub fn write_portrait_jsonl<W: Write>(w: &mut W, ds: &PortraitDataset) -> io::Result<()> {
    writeln!(
        w,
        "{{\"seed\":{},\"rng\":\"{}\",\"table\":\"{}\",\"samples\":{},\"max_collisions\":{}}}",
        ds.seed,
        ds.rng_algorithm,
        escape_json(&ds.table_desc),
        ds.samples,
        ds.max_collisions
    )?;
    for orbit in &ds.orbits {
        let points: Vec<String> = orbit
            .points
            .iter()
            .map(|p| format!("[{},{},{}]", fmt_g17(p.s), fmt_g17(p.v_t), fmt_g17(p.v0)))
            .collect();
        writeln!(
            w,
            "{{\"orbit\":{},\"initial\":{{\"position\":[{},{}],\"x0\":{},\"velocity\":[{},{},{}]}},\
             \"termination\":\"{}\",\"points\":[{}]}}",
            orbit.index,
            fmt_g17(orbit.initial.position.x),
            fmt_g17(orbit.initial.position.y),
            fmt_g17(orbit.initial.x0),
            fmt_g17(orbit.initial.velocity.v0),
            fmt_g17(orbit.initial.velocity.v1),
            fmt_g17(orbit.initial.velocity.v2),
            termination_label(orbit.termination),
            points.join(",")
        )?;
    }
    Ok(())
}

/// Minimal SVG scatter of velocity-disk points, one dot per record, with
/// the unit disk outlined.
pub fn svg_velocity_disk(ds: &PortraitDataset, size: u32) -> String {
    let half = size as f64 / 2.0;
    let scale = half * 0.95;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" \
         viewBox=\"0 0 {size} {size}\">\n"
    ));
    out.push_str(&format!(
        "<circle cx=\"{half}\" cy=\"{half}\" r=\"{scale}\" fill=\"none\" stroke=\"black\"/>\n"
    ));
    for orbit in &ds.orbits {
        // Hue varies per orbit so loops are distinguishable.
        let hue = (orbit.index * 47) % 360;
        for p in &orbit.points {
            let cx = half + scale * p.v_t;
            let cy = half - scale * p.v0;
            out.push_str(&format!(
                "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"0.7\" \
                 fill=\"hsl({hue},70%,40%)\"/>\n"
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{iterate_with, IterateOptions, PhasePoint};
    use crate::math::Vec2;
    use crate::portrait::{run_portrait, PortraitRequest, Sampling};
    use crate::table::{regular_polygon, strip};
    use crate::VelocityState;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 123456.789] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn orbit_csv_shape() {
        let table = strip(1.0).unwrap();
        let start = PhasePoint::new(Vec2::ZERO, VelocityState::new(0.0, 0.0, 1.0));
        let opts = IterateOptions::new(&table, 4).without_period_detection();
        let orbit = iterate_with(&table, start, &opts);
        let mut buf = Vec::new();
        writeln!(&mut buf, "{ORBIT_CSV_HEADER}").unwrap();
        write_orbit_csv(&mut buf, &orbit, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0].split(',').count(), 12);
        assert_eq!(lines[1].split(',').count(), 12);
    }

    #[test]
    fn portrait_writers_are_deterministic() {
        let table = regular_polygon(6, 1.0).unwrap();
        let req = PortraitRequest {
            table_desc: "hexagon".into(),
            samples: 4,
            max_collisions: 64,
            seed: 7,
            jobs: 1,
            sampling: Sampling::RandomBoundary,
        };
        let ds = run_portrait(&table, &req).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_portrait_csv(&mut a, &ds).unwrap();
        write_portrait_csv(&mut b, &ds).unwrap();
        assert_eq!(a, b);
        let mut j = Vec::new();
        write_portrait_jsonl(&mut j, &ds).unwrap();
        let text = String::from_utf8(j).unwrap();
        assert!(text.lines().next().unwrap().contains("\"seed\":7"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn svg_contains_disk_and_points() {
        let table = regular_polygon(6, 1.0).unwrap();
        let req = PortraitRequest {
            table_desc: "hexagon".into(),
            samples: 2,
            max_collisions: 16,
            seed: 1,
            jobs: 1,
            sampling: Sampling::RandomBoundary,
        };
        let ds = run_portrait(&table, &req).unwrap();
        let svg = svg_velocity_disk(&ds, 400);
        assert!(svg.starts_with("<svg"));
        assert!(svg.matches("<circle").count() > 16);
    }
}
