//! Real-valued polarization algebra: field vectors in the horizontal/vertical
//! basis, analyzer angles, and ideal-polarizer transition matrices.

use std::f64::consts::PI;
use std::ops::{Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("polarization angle must be finite, got {0}")]
pub struct NonFiniteAngle(pub f64);

/// Analyzer orientation, canonicalized into `[0, pi)` radians.
///
/// A linear polarizer is invariant under a half-turn, so angles differing by
/// `pi` denote the same element and compare equal after construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolAngle(f64);

impl PolAngle {
    pub const ZERO: PolAngle = PolAngle(0.0);

    pub fn new(radians: f64) -> Result<Self, NonFiniteAngle> {
        if !radians.is_finite() {
            return Err(NonFiniteAngle(radians));
        }
        let mut r = radians.rem_euclid(PI);
        // rem_euclid of a tiny negative input can round up to the modulus.
        if r >= PI {
            r = 0.0;
        }
        Ok(PolAngle(r))
    }

    pub fn from_degrees(degrees: f64) -> Result<Self, NonFiniteAngle> {
        if !degrees.is_finite() {
            return Err(NonFiniteAngle(degrees));
        }
        Self::new(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }
}

/// Real Jones vector: field amplitudes along the horizontal and vertical axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolVector {
    pub h: f64,
    pub v: f64,
}

impl PolVector {
    pub const fn new(h: f64, v: f64) -> Self {
        PolVector { h, v }
    }

    /// Total field intensity `h^2 + v^2`.
    pub fn intensity(self) -> f64 {
        self.h * self.h + self.v * self.v
    }

    pub fn dot(self, other: PolVector) -> f64 {
        self.h * other.h + self.v * other.v
    }

    /// Amplitude passed by an analyzer at `theta`: `h cos(theta) + v sin(theta)`.
    pub fn project_amplitude(self, theta: PolAngle) -> f64 {
        self.h * theta.cos() + self.v * theta.sin()
    }
}

impl Sub for PolVector {
    type Output = PolVector;

    fn sub(self, rhs: PolVector) -> PolVector {
        PolVector::new(self.h - rhs.h, self.v - rhs.v)
    }
}

impl Neg for PolVector {
    type Output = PolVector;

    fn neg(self) -> PolVector {
        PolVector::new(-self.h, -self.v)
    }
}

/// Transition matrix of an ideal linear polarizer: the rank-one projector
/// onto the pass axis at angle `theta`,
/// `[[cos^2, cos sin], [sin cos, sin^2]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizerOp {
    pub m00: f64,
    pub m01: f64,
    pub m10: f64,
    pub m11: f64,
}

impl PolarizerOp {
    /// Horizontal pass axis, written exactly (the transmitted port of an
    /// ideal polarizing beam splitter).
    pub const TRANSMIT_HORIZONTAL: PolarizerOp = PolarizerOp {
        m00: 1.0,
        m01: 0.0,
        m10: 0.0,
        m11: 0.0,
    };

    /// Vertical pass axis, written exactly (the reflected port of an ideal
    /// polarizing beam splitter).
    pub const REFLECT_VERTICAL: PolarizerOp = PolarizerOp {
        m00: 0.0,
        m01: 0.0,
        m10: 0.0,
        m11: 1.0,
    };

    pub fn new(theta: PolAngle) -> Self {
        let (s, c) = theta.radians().sin_cos();
        PolarizerOp {
            m00: c * c,
            m01: c * s,
            m10: s * c,
            m11: s * s,
        }
    }

    pub fn apply(self, w: PolVector) -> PolVector {
        PolVector::new(
            self.m00 * w.h + self.m01 * w.v,
            self.m10 * w.h + self.m11 * w.v,
        )
    }

    pub fn trace(self) -> f64 {
        self.m00 + self.m11
    }

    pub fn determinant(self) -> f64 {
        self.m00 * self.m11 - self.m01 * self.m10
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= TOL
    }

    #[test]
    fn angle_rejects_non_finite() {
        assert!(PolAngle::new(f64::NAN).is_err());
        assert!(PolAngle::new(f64::INFINITY).is_err());
        assert!(PolAngle::from_degrees(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn angle_canonicalizes_into_half_turn() {
        let a = PolAngle::from_degrees(-45.0).unwrap();
        assert!(close(a.degrees(), 135.0));
        assert!(close(PolAngle::new(PI).unwrap().radians(), 0.0));
        assert!(close(PolAngle::from_degrees(270.0).unwrap().degrees(), 90.0));
    }

    #[test]
    fn right_angle_round_trips_exactly() {
        // 90 deg -> pi/2 -> 90 deg with no rounding; regime tables rely on it.
        let a = PolAngle::from_degrees(90.0).unwrap();
        assert_eq!(a.radians(), std::f64::consts::FRAC_PI_2);
        assert_eq!(a.degrees(), 90.0);
        assert_eq!(PolAngle::from_degrees(45.0).unwrap().radians(), std::f64::consts::FRAC_PI_4);
    }

    #[test]
    fn diagonal_polarizer_matrix() {
        let p = PolarizerOp::new(PolAngle::from_degrees(45.0).unwrap());
        for m in [p.m00, p.m01, p.m10, p.m11] {
            assert!(close(m, 0.5));
        }
    }

    #[test]
    fn projection_of_diagonal_field() {
        let w = PolVector::new(1.0, 1.0);
        let amp = w.project_amplitude(PolAngle::from_degrees(45.0).unwrap());
        assert!(close(amp, std::f64::consts::SQRT_2));
        assert!(close(w.intensity(), 2.0));
    }

    #[test]
    fn exact_pbs_ports() {
        let w = PolVector::new(0.3, -0.7);
        assert_eq!(PolarizerOp::TRANSMIT_HORIZONTAL.apply(w), PolVector::new(0.3, 0.0));
        assert_eq!(PolarizerOp::REFLECT_VERTICAL.apply(w), PolVector::new(0.0, -0.7));
    }

    fn angles() -> impl Strategy<Value = PolAngle> {
        (-12.0..12.0f64).prop_map(|r| PolAngle::new(r).unwrap())
    }

    proptest! {
        #[test]
        fn canonical_range(r in -100.0..100.0f64) {
            let a = PolAngle::new(r).unwrap();
            prop_assert!((0.0..PI).contains(&a.radians()));
        }

        #[test]
        fn projector_is_symmetric_idempotent_trace_one(theta in angles()) {
            let p = PolarizerOp::new(theta);
            prop_assert_eq!(p.m01, p.m10);
            prop_assert!(close(p.trace(), 1.0));
            prop_assert!(p.determinant().abs() <= TOL);
            // idempotence: P(Pw) = Pw
            let w = PolVector::new(0.8, -0.4);
            let once = p.apply(w);
            let twice = p.apply(once);
            prop_assert!(close(once.h, twice.h));
            prop_assert!(close(once.v, twice.v));
        }

        #[test]
        fn projector_half_turn_periodic(r in -6.0..6.0f64) {
            let p = PolarizerOp::new(PolAngle::new(r).unwrap());
            let q = PolarizerOp::new(PolAngle::new(r + PI).unwrap());
            prop_assert!(close(p.m00, q.m00));
            prop_assert!(close(p.m01, q.m01));
            prop_assert!(close(p.m11, q.m11));
        }

        #[test]
        fn projection_squared_is_transmitted_intensity(theta in angles(), h in -2.0..2.0f64, v in -2.0..2.0f64) {
            let w = PolVector::new(h, v);
            let amp = w.project_amplitude(theta);
            let out = PolarizerOp::new(theta).apply(w);
            prop_assert!((out.intensity() - amp * amp).abs() <= 1e-10);
        }

        #[test]
        fn polarizer_never_amplifies(theta in angles(), h in -2.0..2.0f64, v in -2.0..2.0f64) {
            let w = PolVector::new(h, v);
            let out = PolarizerOp::new(theta).apply(w);
            prop_assert!(out.intensity() <= w.intensity() + TOL);
        }
    }
}
