//! The optical bench: two pulsed two-beam sources, a polarizing beam
//! splitter (PBS) joining one beam from each source, and four analyzers.
//!
//! Each source fires anticorrelated linear-polarization pulse pairs selected
//! by one random bit. Beam 1 of source A goes straight to analyzer 1; beam 1
//! of source B goes straight to analyzer 4. Beam 2 of each source meets the
//! PBS, which transmits horizontal components and reflects vertical ones:
//! detector 2 sees B's transmitted component minus A's reflected one, and
//! detector 3 the converse.

use crate::jones::{PolAngle, PolVector, PolarizerOp};

pub use crate::jones::NonFiniteAngle;

/// One random firing configuration of the two sources: bit `n` selects
/// source A's pulse pair, bit `m` source B's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceState {
    n: bool,
    m: bool,
}

impl SourceState {
    /// All four equiprobable configurations, indexed by `n + 2m`.
    pub const ALL: [SourceState; 4] = [
        SourceState { n: false, m: false },
        SourceState { n: true, m: false },
        SourceState { n: false, m: true },
        SourceState { n: true, m: true },
    ];

    pub const fn from_bits(n: bool, m: bool) -> Self {
        SourceState { n, m }
    }

    pub const fn from_index(index: usize) -> Self {
        SourceState {
            n: index & 1 != 0,
            m: index & 2 != 0,
        }
    }

    pub fn index(self) -> usize {
        self.n as usize | (self.m as usize) << 1
    }

    pub fn n(self) -> u8 {
        self.n as u8
    }

    pub fn m(self) -> u8 {
        self.m as u8
    }
}

/// The four simultaneous source beams for one firing configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceFields {
    /// Source A, beam toward analyzer 1.
    pub a1: PolVector,
    /// Source A, beam toward the PBS.
    pub a2: PolVector,
    /// Source B, beam toward analyzer 4.
    pub b1: PolVector,
    /// Source B, beam toward the PBS.
    pub b2: PolVector,
}

/// Unit basis pair `(cos(b*pi/2), sin(b*pi/2))`, written exactly for bit input.
fn bit_basis(bit: bool) -> (f64, f64) {
    if bit {
        (0.0, 1.0)
    } else {
        (1.0, 0.0)
    }
}

/// Pulse pairs emitted for configuration `s`. Within a source the two beams
/// are orthogonal (anticorrelated polarizations).
pub fn source_fields(s: SourceState) -> SourceFields {
    let (cn, sn) = bit_basis(s.n);
    let (cm, sm) = bit_basis(s.m);
    SourceFields {
        a1: PolVector::new(cn, sn),
        a2: PolVector::new(sn, -cn),
        b1: PolVector::new(cm, sm),
        b2: PolVector::new(sm, -cm),
    }
}

/// Fields leaving the PBS toward analyzers 2 and 3 (before analysis).
///
/// The splitter transmits horizontal components and reflects vertical ones,
/// with a sign flip on reflection.
pub fn pbs_output_fields(s: SourceState) -> (PolVector, PolVector) {
    let f = source_fields(s);
    let toward_2 = PolarizerOp::TRANSMIT_HORIZONTAL.apply(f.b2)
        - PolarizerOp::REFLECT_VERTICAL.apply(f.a2);
    let toward_3 = PolarizerOp::TRANSMIT_HORIZONTAL.apply(f.a2)
        - PolarizerOp::REFLECT_VERTICAL.apply(f.b2);
    (toward_2, toward_3)
}

/// The four analyzer orientations, one per detector arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSettings {
    pub theta1: PolAngle,
    pub theta2: PolAngle,
    pub theta3: PolAngle,
    pub theta4: PolAngle,
}

impl AnalyzerSettings {
    pub fn new(theta1: PolAngle, theta2: PolAngle, theta3: PolAngle, theta4: PolAngle) -> Self {
        AnalyzerSettings {
            theta1,
            theta2,
            theta3,
            theta4,
        }
    }

    pub fn from_radians(thetas: [f64; 4]) -> Result<Self, NonFiniteAngle> {
        let [t1, t2, t3, t4] = thetas;
        Ok(AnalyzerSettings {
            theta1: PolAngle::new(t1)?,
            theta2: PolAngle::new(t2)?,
            theta3: PolAngle::new(t3)?,
            theta4: PolAngle::new(t4)?,
        })
    }

    pub fn from_degrees(degrees: [f64; 4]) -> Result<Self, NonFiniteAngle> {
        let [t1, t2, t3, t4] = degrees;
        Ok(AnalyzerSettings {
            theta1: PolAngle::from_degrees(t1)?,
            theta2: PolAngle::from_degrees(t2)?,
            theta3: PolAngle::from_degrees(t3)?,
            theta4: PolAngle::from_degrees(t4)?,
        })
    }

    /// Arm order reversed end to end: detector 1 swapped with 4, 2 with 3.
    pub fn reversed(self) -> Self {
        AnalyzerSettings {
            theta1: self.theta4,
            theta2: self.theta3,
            theta3: self.theta2,
            theta4: self.theta1,
        }
    }
}

/// Fields arriving at the four detectors after analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorFields {
    pub e1: PolVector,
    pub e2: PolVector,
    pub e3: PolVector,
    pub e4: PolVector,
}

pub fn detector_fields(s: SourceState, a: AnalyzerSettings) -> DetectorFields {
    let f = source_fields(s);
    let (toward_2, toward_3) = pbs_output_fields(s);
    DetectorFields {
        e1: PolarizerOp::new(a.theta1).apply(f.a1),
        e2: PolarizerOp::new(a.theta2).apply(toward_2),
        e3: PolarizerOp::new(a.theta3).apply(toward_3),
        e4: PolarizerOp::new(a.theta4).apply(f.b1),
    }
}

/// Analyzed amplitude at each detector, split by originating source where a
/// detector sees both (the two PBS arms).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorAmplitudes {
    /// Detector 1 (source A only).
    pub det1: f64,
    /// Detector 2, contribution reflected from source A.
    pub det2_a: f64,
    /// Detector 2, contribution transmitted from source B.
    pub det2_b: f64,
    /// Detector 3, contribution transmitted from source A.
    pub det3_a: f64,
    /// Detector 3, contribution reflected from source B.
    pub det3_b: f64,
    /// Detector 4 (source B only).
    pub det4: f64,
}

pub fn detector_amplitudes(s: SourceState, a: AnalyzerSettings) -> DetectorAmplitudes {
    let f = source_fields(s);
    DetectorAmplitudes {
        det1: f.a1.project_amplitude(a.theta1),
        det2_a: -f.a2.v * a.theta2.sin(),
        det2_b: f.b2.h * a.theta2.cos(),
        det3_a: f.a2.h * a.theta3.cos(),
        det3_b: -f.b2.v * a.theta3.sin(),
        det4: f.b1.project_amplitude(a.theta4),
    }
}

/// Fourfold amplitude products of the two indistinguishable routes through
/// the PBS arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathwayAmplitudes {
    /// Both PBS beams transmitted: B reaches detector 2, A reaches detector 3.
    pub t1: f64,
    /// Both PBS beams reflected: A reaches detector 2, B reaches detector 3.
    pub t2: f64,
}

impl PathwayAmplitudes {
    pub fn total(self) -> f64 {
        self.t1 + self.t2
    }
}

/// Route decomposition of the fourfold product `e1 * e2 * e3 * e4`.
///
/// Same-source cross routes (A into both PBS arms, or B into both) carry a
/// factor `sin(k pi/2) cos(k pi/2)` that vanishes for bit-valued `k`, so the
/// two terms below are exhaustive: `t1 + t2` equals the full product of the
/// four analyzed amplitudes.
pub fn pathway_amplitudes(s: SourceState, a: AnalyzerSettings) -> PathwayAmplitudes {
    let d = detector_amplitudes(s, a);
    PathwayAmplitudes {
        t1: d.det1 * d.det2_b * d.det3_a * d.det4,
        t2: d.det1 * d.det2_a * d.det3_b * d.det4,
    }
}
