//! Quantum-mechanical reference: fourfold coincidence probability predicted
//! for the entangled state `(|HVVH> + |VHHV>) / sqrt(2)` when photon `j` is
//! analyzed along `theta_j`.
//!
//! Computed as an explicit inner product in the 16-dimensional four-photon
//! polarization basis, deliberately avoiding the closed forms used by the
//! classical estimators so the two routes stay independent.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::bench::AnalyzerSettings;

/// Projection of the entangled state onto one product of analyzer axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzAmplitude(f64);

impl GhzAmplitude {
    pub fn value(self) -> f64 {
        self.0
    }
}

const DIM: usize = 16;

/// Basis index with photon 1 in the highest bit; bit 0 = horizontal,
/// bit 1 = vertical.
fn basis_index(b1: usize, b2: usize, b3: usize, b4: usize) -> usize {
    b1 << 3 | b2 << 2 | b3 << 1 | b4
}

fn entangled_state() -> [f64; DIM] {
    let mut state = [0.0; DIM];
    state[basis_index(0, 1, 1, 0)] = FRAC_1_SQRT_2; // |HVVH>
    state[basis_index(1, 0, 0, 1)] = FRAC_1_SQRT_2; // |VHHV>
    state
}

/// Tensor product of the four analyzer axis kets `(cos, sin)`.
fn analyzer_product_state(a: AnalyzerSettings) -> [f64; DIM] {
    let axes = [
        [a.theta1.cos(), a.theta1.sin()],
        [a.theta2.cos(), a.theta2.sin()],
        [a.theta3.cos(), a.theta3.sin()],
        [a.theta4.cos(), a.theta4.sin()],
    ];
    let mut state = [0.0; DIM];
    for (idx, slot) in state.iter_mut().enumerate() {
        let mut amp = 1.0;
        for (photon, axis) in axes.iter().enumerate() {
            let bit = (idx >> (3 - photon)) & 1;
            amp *= axis[bit];
        }
        *slot = amp;
    }
    state
}

pub fn ghz_amplitude(a: AnalyzerSettings) -> GhzAmplitude {
    let ghz = entangled_state();
    let axes = analyzer_product_state(a);
    GhzAmplitude(ghz.iter().zip(axes).map(|(g, x)| g * x).sum())
}

/// Fourfold coincidence probability: the squared projection amplitude.
pub fn ghz_probability(a: AnalyzerSettings) -> f64 {
    let amp = ghz_amplitude(a).value();
    amp * amp
}
