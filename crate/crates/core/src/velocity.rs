//! Velocity triples and validated unit normals.

use crate::math::Vec2;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Velocity of the billiard particle in energy-normalized coordinates:
/// `v0` is the rotational component, `(v1, v2)` the planar ones, and
/// `speed = sqrt(v0^2 + v1^2 + v2^2)` is the conserved kinetic norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityState {
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
}

impl VelocityState {
    pub fn new(v0: f64, v1: f64, v2: f64) -> Self {
        VelocityState { v0, v1, v2 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        VelocityState::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.v0, self.v1, self.v2]
    }

    pub fn planar(self) -> Vec2 {
        Vec2::new(self.v1, self.v2)
    }

    pub fn speed(self) -> f64 {
        (self.v0 * self.v0 + self.v1 * self.v1 + self.v2 * self.v2).sqrt()
    }

    /// Rescale to unit speed.
    pub fn normalized(self) -> Self {
        let s = self.speed();
        VelocityState::new(self.v0 / s, self.v1 / s, self.v2 / s)
    }

    pub fn dot(self, other: VelocityState) -> f64 {
        self.v0 * other.v0 + self.v1 * other.v1 + self.v2 * other.v2
    }

    pub fn distance(self, other: VelocityState) -> f64 {
        let d0 = self.v0 - other.v0;
        let d1 = self.v1 - other.v1;
        let d2 = self.v2 - other.v2;
        (d0 * d0 + d1 * d1 + d2 * d2).sqrt()
    }

    pub fn scaled(self, s: f64) -> Self {
        VelocityState::new(self.v0 * s, self.v1 * s, self.v2 * s)
    }

    pub fn reversed(self) -> Self {
        self.scaled(-1.0)
    }

    /// Angle to another unit velocity on the energy sphere.
    pub fn angle_to(self, other: VelocityState) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

/// A validated planar unit vector pointing into the table interior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitNormal(Vec2);

impl UnitNormal {
    /// Tolerance on `|n| - 1` accepted by [`UnitNormal::new`].
    pub const TOL: f64 = 1e-12;

    pub fn new(v: Vec2) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > Self::TOL {
            return Err(Error::NonUnitNormal(n));
        }
        Ok(UnitNormal(v))
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn from_direction(v: Vec2) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NonUnitNormal(n));
        }
        Ok(UnitNormal(v * (1.0 / n)))
    }

    pub fn as_vec(self) -> Vec2 {
        self.0
    }

    /// Angle of the normal measured from the first planar axis.
    pub fn angle(self) -> f64 {
        self.0.angle()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit_normals() {
        assert!(UnitNormal::new(Vec2::new(0.0, 1.1)).is_err());
        assert!(UnitNormal::new(Vec2::new(0.0, 1.0)).is_ok());
        assert!(UnitNormal::new(Vec2::new(0.6, 0.8)).is_ok());
    }

    #[test]
    fn speed_and_normalization() {
        let v = VelocityState::new(1.0, 2.0, 2.0);
        assert!((v.speed() - 3.0).abs() < 1e-15);
        assert!((v.normalized().speed() - 1.0).abs() < 1e-15);
    }
}
