//! The no-slip and specular collision maps, their matrix forms, and the
//! strip/wedge two-collision composites with their rotation spectra.
//!
//! Conventions fixed project-wide:
//!
//! * The particle is a uniform disk, giving the mixing coefficients
//!   `cos beta = 1/3`, `sin beta = 2 sqrt(2)/3`.
//! * With inward normal `nu = (0, 1)` the no-slip map equals the reference
//!   matrix [`collision_matrix`] entry for entry. For a general normal the
//!   tangent is `t = (nu.y, -nu.x)`, so that `(t, nu)` is a right-handed
//!   planar frame.
//! * [`frame_rotation`] acts only on the planar components; the rotational
//!   velocity is a scalar in two dimensions and is frame-independent.

use crate::math::{Mat3, Vec2};
use crate::{Error, Result, UnitNormal, VelocityState};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

/// `cos beta = 1/3`: fraction of tangential/rotational velocity retained.
pub const COS_BETA: f64 = 1.0 / 3.0;
/// `sin beta = 2 sqrt(2)/3`: fraction exchanged between the two.
pub const SIN_BETA: f64 = 2.0 * SQRT_2 / 3.0;

/// Which collision law a flight reflects with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollisionLaw {
    NoSlip,
    Specular,
}

fn require_incoming(v: VelocityState, nu: UnitNormal) -> Result<f64> {
    let vn = v.planar().dot(nu.as_vec());
    if vn >= 0.0 {
        return Err(Error::NotIncoming(vn));
    }
    Ok(vn)
}

/// The no-slip reflection at inward unit normal `nu`, evaluated directly
/// from the velocity-update law (tangent-projection form).
///
/// The normal planar component is reversed; the rotational component and
/// the tangential planar component are mixed by the fixed angle `beta`.
/// Energy (speed) is preserved exactly up to rounding.
pub fn no_slip_reflect(v: VelocityState, nu: UnitNormal) -> Result<VelocityState> {
    let n = nu.as_vec();
    let vn = require_incoming(v, nu)?;
    let t = Vec2::new(n.y, -n.x);
    let vt = v.planar().dot(t);
    let v0 = -COS_BETA * v.v0 + SIN_BETA * vt;
    let wt = SIN_BETA * v.v0 + COS_BETA * vt;
    let planar = t * wt - n * vn;
    Ok(VelocityState::new(v0, planar.x, planar.y))
}

/// Standard specular reflection: rotational component untouched, planar
/// part reflected through the boundary tangent.
pub fn specular_reflect(v: VelocityState, nu: UnitNormal) -> Result<VelocityState> {
    let n = nu.as_vec();
    let vn = require_incoming(v, nu)?;
    let planar = v.planar() - n * (2.0 * vn);
    Ok(VelocityState::new(v.v0, planar.x, planar.y))
}

/// Reflect with the requested law.
pub fn reflect(v: VelocityState, nu: UnitNormal, law: CollisionLaw) -> Result<VelocityState> {
    match law {
        CollisionLaw::NoSlip => no_slip_reflect(v, nu),
        CollisionLaw::Specular => specular_reflect(v, nu),
    }
}

/// The no-slip collision matrix `T` for inward normal `(0, 1)`:
///
/// ```text
///     [ -1/3       2 sqrt2/3   0 ]
///     [ 2 sqrt2/3  1/3         0 ]
///     [ 0          0          -1 ]
/// ```
///
/// `T` is orthogonal and an involution (time reversibility).
pub fn collision_matrix() -> Mat3 {
    Mat3::new([
        [-COS_BETA, SIN_BETA, 0.0],
        [SIN_BETA, COS_BETA, 0.0],
        [0.0, 0.0, -1.0],
    ])
}

/// The specular collision matrix for inward normal `(0, 1)`.
pub fn specular_matrix() -> Mat3 {
    Mat3::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]])
}

/// Rotation of the planar velocity components by `angle` (counterclockwise),
/// identity on the rotational component.
pub fn frame_rotation(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
}

/// Collision matrix at a wall whose inward normal sits at `psi` from the
/// first planar axis: the fixed matrix conjugated into the wall frame.
pub fn collision_matrix_at(psi: f64, law: CollisionLaw) -> Mat3 {
    let m = match law {
        CollisionLaw::NoSlip => collision_matrix(),
        CollisionLaw::Specular => specular_matrix(),
    };
    frame_rotation(psi - FRAC_PI_2)
        .mul_mat(&m)
        .mul_mat(&frame_rotation(FRAC_PI_2 - psi))
}

/// Reflection computed through the matrix route: rotate the wall frame onto
/// the reference frame, apply the fixed matrix, rotate back. Agrees with
/// [`no_slip_reflect`] / [`specular_reflect`] to rounding; the flow uses
/// this path so that every collision is a matrix-testable conjugation.
pub fn reflect_in_local_frame(
    v: VelocityState,
    nu: UnitNormal,
    law: CollisionLaw,
) -> Result<VelocityState> {
    require_incoming(v, nu)?;
    let m = collision_matrix_at(nu.angle(), law);
    Ok(VelocityState::from_array(m.mul_vec(v.to_array())))
}

/// Two-collision composite for the strip between parallel walls:
///
/// ```text
///     [ -7/9          -4 sqrt2/9   0 ]
///     [ 4 sqrt2/9     -7/9         0 ]
///     [ 0              0           1 ]
/// ```
///
/// A rotation about the vertical axis `(0, 0, 1)` (the trivial period-two
/// direction) by the angle `arccos(-7/9)`.
pub fn strip_cycle_matrix() -> Mat3 {
    let d = 7.0 / 9.0;
    let o = 4.0 * SQRT_2 / 9.0;
    Mat3::new([[-d, -o, 0.0], [o, -d, 0.0], [0.0, 0.0, 1.0]])
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    Ok(())
}

/// Two-collision composite for the open wedge of angle `theta` (vertex at
/// the origin, outward bisector along the second planar axis), in global
/// coordinates: collide the wall with normal angle `pi - theta/2` first,
/// then the wall with normal angle `theta/2`.
///
/// An element of SO(3) fixing [`wedge_axis`]; its rotation angle about that
/// axis is [`wedge_alpha`]. As `theta -> 0` it converges to
/// [`strip_cycle_matrix`] conjugated by the swap of the two planar axes
/// (the thin wedge is a strip with vertical rather than horizontal walls).
pub fn wedge_cycle_matrix(theta: f64) -> Result<Mat3> {
    check_theta(theta)?;
    let first = collision_matrix_at(PI - theta / 2.0, CollisionLaw::NoSlip);
    let second = collision_matrix_at(theta / 2.0, CollisionLaw::NoSlip);
    Ok(second.mul_mat(&first))
}

/// The axis of periodicity of the `theta` wedge: the unit velocity
/// proportional to `(-sqrt2 sin(theta/2), 1, 0)`. Bouncing along it gives
/// a period-two orbit for every wedge angle.
pub fn wedge_axis(theta: f64) -> Result<VelocityState> {
    check_theta(theta)?;
    let v = VelocityState::new(-SQRT_2 * (theta / 2.0).sin(), 1.0, 0.0);
    Ok(v.normalized())
}

/// Rotation angle of [`wedge_cycle_matrix`] about the axis of periodicity:
///
/// `cos(alpha) = (32/9) cos^4(theta/2) - (16/3) cos^2(theta/2) + 1`,
///
/// returned as the principal value in `[0, pi]`.
pub fn wedge_alpha(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let u = (theta / 2.0).cos().powi(2);
    Ok(cos_alpha_of_u(u).clamp(-1.0, 1.0).acos())
}

fn cos_alpha_of_u(u: f64) -> f64 {
    (32.0 / 9.0) * u * u - (16.0 / 3.0) * u + 1.0
}

/// All wedge angles `theta` in `(0, pi)` whose rotation angle equals
/// `alpha`, obtained from the closed-form quadratic in `u = cos^2(theta/2)`.
///
/// One angle when `cos(alpha)` lies in `(-7/9, 1)`, two when it lies in
/// `(-1, -7/9)`, and exactly `pi/3` when `alpha = pi`. Sorted ascending.
pub fn theta_for_alpha(alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= PI) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let ca = alpha.cos();
    // (32/9) u^2 - (16/3) u + (1 - cos alpha) = 0
    let a = 32.0 / 9.0;
    let b = -16.0 / 3.0;
    let c = 1.0 - ca;
    let disc = b * b - 4.0 * a * c;
    let mut thetas = Vec::new();
    if disc >= 0.0 {
        let sq = disc.sqrt();
        for u in [(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)] {
            if u > 0.0 && u < 1.0 {
                thetas.push(2.0 * u.sqrt().acos());
            }
        }
    }
    thetas.sort_by(|x, y| x.partial_cmp(y).unwrap());
    thetas.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    Ok(thetas)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol,
            "expected {b} +- {tol}, got {a} (err {:.3e})",
            (a - b).abs()
        );
    }

    /// Independent matrix-vector oracle for the tests below.
    fn matvec(m: [[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, row) in m.iter().enumerate() {
            out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        out
    }

    fn up() -> UnitNormal {
        UnitNormal::new(Vec2::new(0.0, 1.0)).unwrap()
    }

    #[test]
    fn pure_normal_incidence_reverses() {
        let out = no_slip_reflect(VelocityState::new(0.0, 0.0, -1.0), up()).unwrap();
        assert_eq!(out, VelocityState::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn first_column_of_reference_matrix() {
        // Input (1, 0, -1): rotational unit plus incoming normal unit.
        let out = no_slip_reflect(VelocityState::new(1.0, 0.0, -1.0), up()).unwrap();
        assert_close(out.v0, -1.0 / 3.0, 1e-15);
        assert_close(out.v1, 2.0 * SQRT_2 / 3.0, 1e-15);
        assert_close(out.v2, 1.0, 1e-15);
    }

    #[test]
    fn generic_input_matches_matrix_oracle() {
        let v = VelocityState::new(0.3, -0.4, -0.8660254037844386);
        assert_close(v.speed(), 1.0, 1e-12);
        let out = no_slip_reflect(v, up()).unwrap();
        let expect = matvec(collision_matrix().0, v.to_array());
        for (a, b) in out.to_array().iter().zip(expect.iter()) {
            assert_close(*a, *b, 1e-15);
        }
        assert_close(out.speed(), 1.0, 1e-12);
    }

    #[test]
    fn specular_examples() {
        let cases = [
            ([0.0, 0.0, -1.0], [0.0, 0.0, 1.0]),
            ([1.0, 0.0, -1.0], [1.0, 0.0, 1.0]),
            ([0.5, 0.5, -0.7071067811865476], [0.5, 0.5, 0.7071067811865476]),
        ];
        for (input, want) in cases {
            let out = specular_reflect(VelocityState::from_array(input), up()).unwrap();
            assert_eq!(out.to_array(), want);
        }
    }

    #[test]
    fn rejects_outgoing_and_tangent_inputs() {
        let v = VelocityState::new(0.0, 1.0, 0.0);
        assert!(matches!(no_slip_reflect(v, up()), Err(Error::NotIncoming(_))));
        let v = VelocityState::new(0.0, 0.0, 1.0);
        assert!(specular_reflect(v, up()).is_err());
    }

    #[test]
    fn collision_matrix_entries_exact() {
        let t = collision_matrix().0;
        assert_eq!(t[0][0], -1.0 / 3.0);
        assert_eq!(t[0][1], 2.0 * SQRT_2 / 3.0);
        assert_eq!(t[1][0], 2.0 * SQRT_2 / 3.0);
        assert_eq!(t[1][1], 1.0 / 3.0);
        assert_eq!(t[2][2], -1.0);
        assert_eq!(t[0][2], 0.0);
        assert_eq!(t[2][0], 0.0);
    }

    #[test]
    fn collision_matrix_is_involution() {
        let t = collision_matrix();
        assert!(t.powi(2).max_abs_diff(&Mat3::identity()) < 1e-14);
        assert!(t.orthogonality_defect() < 1e-14);
    }

    #[test]
    fn block_is_reflection_times_rotation() {
        // Upper-left 2x2 block equals diag(-1, 1) * R_beta with cos beta = 1/3.
        let t = collision_matrix().0;
        let (sb, cb) = (SIN_BETA, COS_BETA);
        let expect = [[-cb, sb], [sb, cb]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(t[i][j], expect[i][j]);
            }
        }
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        assert_close(det, -1.0, 1e-15);
    }

    #[test]
    fn frame_rotation_basics() {
        assert!(frame_rotation(0.0).max_abs_diff(&Mat3::identity()) < 1e-15);
        let out = frame_rotation(FRAC_PI_2).mul_vec([0.0, 1.0, 0.0]);
        assert_close(out[0], 0.0, 1e-15);
        assert_close(out[1], 0.0, 1e-15);
        assert_close(out[2], 1.0, 1e-15);
    }

    #[test]
    fn strip_cycle_entries_and_axis() {
        let s = strip_cycle_matrix();
        assert_eq!(s.0[0][0], -7.0 / 9.0);
        assert_eq!(s.0[0][1], -4.0 * SQRT_2 / 9.0);
        assert_eq!(s.0[1][0], 4.0 * SQRT_2 / 9.0);
        assert_eq!(s.0[2][2], 1.0);
        // Vertical axis fixed: the trivial period-two orbit.
        assert_eq!(s.mul_vec([0.0, 0.0, 1.0]), [0.0, 0.0, 1.0]);
        // Rotation angle from the trace oracle.
        let angle = ((s.trace() - 1.0) / 2.0).acos();
        assert_close(angle, (-7.0f64 / 9.0).acos(), 1e-14);
    }

    #[test]
    fn strip_cycle_is_frame_adjusted_square() {
        // S = (F T)^2 with F the half-turn frame adjustment between the walls.
        let ft = frame_rotation(PI).mul_mat(&collision_matrix());
        assert!(ft.powi(2).max_abs_diff(&strip_cycle_matrix()) < 1e-15);
    }

    #[test]
    fn wedge_cycle_reduces_to_strip_in_thin_limit() {
        // The thin wedge is a strip with vertical walls: compare against the
        // strip composite with the two planar axes swapped. The trace (hence
        // the rotation angle) agrees without any frame bookkeeping.
        let swap = Mat3::new([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);
        let swapped_strip = swap.mul_mat(&strip_cycle_matrix()).mul_mat(&swap);
        for theta in [1e-8, 1e-7, 1e-6] {
            let s = wedge_cycle_matrix(theta).unwrap();
            let dev = s.max_abs_diff(&swapped_strip);
            assert!(dev < 4.0 * theta + 1e-9, "theta = {theta}: deviation {dev:.3e}");
            assert_close(s.trace(), strip_cycle_matrix().trace(), 1e-12);
        }
    }

    #[test]
    fn wedge_cycle_squares_to_identity_at_pi_over_three() {
        let s = wedge_cycle_matrix(PI / 3.0).unwrap();
        assert!(s.powi(2).max_abs_diff(&Mat3::identity()) < 1e-12);
    }

    #[test]
    fn wedge_cycle_fixes_axis_for_random_angles() {
        // Deterministic pseudo-random thetas; matrix-vector oracle.
        let mut x = 0.123456789_f64;
        for _ in 0..100 {
            x = (x * 9301.0 + 49297.0) % 1.0;
            let theta = 1e-3 + x * (PI - 2e-3);
            let s = wedge_cycle_matrix(theta).unwrap();
            let a = wedge_axis(theta).unwrap().to_array();
            let sa = matvec(s.0, a);
            for (p, q) in sa.iter().zip(a.iter()) {
                assert_close(*p, *q, 1e-12);
            }
        }
    }

    #[test]
    fn wedge_axis_values() {
        let a = wedge_axis(1e-12).unwrap();
        assert_close(a.v0, 0.0, 1e-11);
        assert_close(a.v1, 1.0, 1e-11);
        let a = wedge_axis(FRAC_PI_2).unwrap();
        assert_close(a.v0, -std::f64::consts::FRAC_1_SQRT_2, 1e-15);
        assert_close(a.v1, std::f64::consts::FRAC_1_SQRT_2, 1e-15);
        assert_eq!(a.v2, 0.0);
    }

    #[test]
    fn wedge_alpha_anchors() {
        // theta = pi/3: cos alpha = 2 - 4 + 1 = -1, a quarter-period wedge.
        // Near alpha = pi the arccos halves the working precision, so the
        // anchor is pinned on the cosine.
        assert_close(wedge_alpha(PI / 3.0).unwrap().cos(), -1.0, 1e-12);
        assert_close(wedge_alpha(PI / 3.0).unwrap(), PI, 1e-7);
        // Fig-level anchors quoted to a few decimals.
        assert_close(wedge_alpha(2.16598).unwrap(), FRAC_PI_2, 1e-4);
        assert_close(wedge_alpha(0.2709).unwrap(), 4.0 * PI / 5.0, 1e-3);
        // Thin limit agrees with the strip rotation angle.
        assert_close(wedge_alpha(1e-9).unwrap(), (-7.0f64 / 9.0).acos(), 1e-8);
        assert!(wedge_alpha(0.0).is_err());
        assert!(wedge_alpha(PI).is_err());
    }

    #[test]
    fn theta_for_alpha_anchors() {
        let ts = theta_for_alpha(PI).unwrap();
        assert_eq!(ts.len(), 1);
        assert_close(ts[0], PI / 3.0, 1e-9);

        let ts = theta_for_alpha(FRAC_PI_2).unwrap();
        assert_eq!(ts.len(), 1);
        assert_close(ts[0], 2.16598, 1e-5);

        // cos(4pi/5) < -7/9: two branches, both solving the forward relation.
        let ts = theta_for_alpha(4.0 * PI / 5.0).unwrap();
        assert_eq!(ts.len(), 2);
        assert_close(ts[0], 0.2709, 2e-5);
        for t in &ts {
            assert_close(wedge_alpha(*t).unwrap(), 4.0 * PI / 5.0, 1e-10);
        }

        assert!(theta_for_alpha(0.0).is_err());
        assert!(theta_for_alpha(PI + 1e-9).is_err());
    }

    #[test]
    fn theta_for_alpha_matches_bisection_oracle() {
        // Independent root-finder on the forward formula, one monotone
        // branch at a time (decreasing on (0, u*), increasing on (u*, 1)
        // in u = cos^2(theta/2), i.e. split theta at 2 acos(sqrt(3)/2)).
        let bisect = |mut lo: f64, mut hi: f64, target: f64| -> f64 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let f = wedge_alpha(mid).unwrap();
                let flo = wedge_alpha(lo).unwrap();
                if (f - target) * (flo - target) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let split = 2.0 * (3.0f64.sqrt() / 2.0).acos(); // theta = pi/3
        let alpha = 4.0 * PI / 5.0;
        let roots = theta_for_alpha(alpha).unwrap();
        let small = bisect(1e-6, split, alpha);
        let large = bisect(split, PI - 1e-6, alpha);
        assert_close(roots[0], small, 1e-9);
        assert_close(roots[1], large, 1e-9);
    }
}
