use std::f64::consts::TAU;

use crate::rng::RngStream;

/// Spin-1/2 confined to the x-y plane, described by its azimuth.
///
/// The field only ever rotates the spin about z, so this angle is the whole
/// state. A fresh spin points along +x.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarSpin {
    theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

fn wrap(angle: f64) -> f64 {
    let t = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl PlanarSpin {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_angle(theta: f64) -> Self {
        Self { theta: wrap(theta) }
    }

    /// Spin at `turns` full revolutions from +x. Keeps half-turn values exact.
    pub fn from_turns(turns: f64) -> Self {
        Self::from_angle(TAU * turns.rem_euclid(1.0))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Rotate about z by `angle` radians.
    #[must_use]
    pub fn precess(self, angle: f64) -> Self {
        Self::from_angle(self.theta + angle)
    }

    /// Probability of finding the spin along -x: `sin^2(theta/2)`.
    pub fn minus_x_probability(&self) -> f64 {
        let s = (0.5 * self.theta).sin();
        s * s
    }

    /// Probability of finding the spin along -y: `(1 - sin theta) / 2`.
    pub fn minus_y_probability(&self) -> f64 {
        0.5 * (1.0 - self.theta.sin())
    }

    pub fn measure_x(self, rng: &mut RngStream) -> Outcome {
        sample(self.minus_x_probability(), rng)
    }

    pub fn measure_y(self, rng: &mut RngStream) -> Outcome {
        sample(self.minus_y_probability(), rng)
    }
}

fn sample(p_minus: f64, rng: &mut RngStream) -> Outcome {
    if rng.bernoulli(p_minus) {
        Outcome::Minus
    } else {
        Outcome::Plus
    }
}
