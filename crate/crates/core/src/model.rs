//! Closed-form leading-order state of the detector pair.
//!
//! All lengths are in units of the switching width and all gaps in units of
//! its inverse. The state entries are returned divided by `lambda^2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::ModelError;
use crate::specfun::{
    boundary_kernel, flat_bracket, kernel_ratio, kernel_ratio_difference, kernel_ratio_excess,
    ComplexValue,
};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Absolute slack allowed in `p_a p_b >= |c|^2`.
pub const POSITIVITY_SLACK: f64 = 1e-12;

/// Transition probability without a boundary at zero gap, `1 / (4 pi)`.
pub const FLAT_PROBABILITY_AT_ZERO_GAP: f64 = 1.0 / (4.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorPair {
    pub omega_a: f64,
    pub omega_b: f64,
    pub lambda: f64,
    pub sigma: f64,
}

impl DetectorPair {
    /// Pair with unit coupling and unit switching width.
    pub fn new(omega_a: f64, omega_b: f64) -> Self {
        Self {
            omega_a,
            omega_b,
            lambda: 1.0,
            sigma: 1.0,
        }
    }

    pub fn from_difference(omega_a: f64, delta_omega: f64) -> Self {
        Self::new(omega_a, omega_a + delta_omega)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn delta_omega(&self) -> f64 {
        self.omega_b - self.omega_a
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        non_negative("omega_a", self.omega_a)?;
        if !self.omega_b.is_finite() {
            return Err(ModelError::Domain {
                name: "omega_b",
                value: self.omega_b,
            });
        }
        if self.omega_b < self.omega_a {
            return Err(ModelError::GapOrdering {
                omega_a: self.omega_a,
                omega_b: self.omega_b,
            });
        }
        positive("lambda", self.lambda)?;
        positive("sigma", self.sigma)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    Parallel,
    Vertical,
    Boundaryless,
}

impl Alignment {
    pub const ALL: [Alignment; 3] = [Alignment::Parallel, Alignment::Vertical, Alignment::Boundaryless];

    pub fn as_str(&self) -> &'static str {
        match self {
            Alignment::Parallel => "parallel",
            Alignment::Vertical => "vertical",
            Alignment::Boundaryless => "boundaryless",
        }
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Alignment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "parallel" | "p" => Ok(Alignment::Parallel),
            "vertical" | "v" => Ok(Alignment::Vertical),
            "boundaryless" | "flat" | "b" => Ok(Alignment::Boundaryless),
            other => Err(format!(
                "unknown alignment '{other}' (expected parallel, vertical or boundaryless)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub alignment: Alignment,
    /// Interdetector separation `L`.
    pub separation: f64,
    /// Distance from the boundary to the nearer detector. Ignored without a boundary.
    pub dz: f64,
}

impl Geometry {
    pub fn new(alignment: Alignment, separation: f64, dz: f64) -> Self {
        Self {
            alignment,
            separation,
            dz,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.separation.is_finite() && self.separation > 0.0) {
            return Err(ModelError::CoincidentDetectors(self.separation));
        }
        if self.alignment != Alignment::Boundaryless {
            non_negative("dz", self.dz)?;
        }
        Ok(())
    }

    /// Distance between one detector and the mirror image of the other.
    /// `None` without a boundary.
    pub fn image_separation(&self) -> Option<f64> {
        match self.alignment {
            Alignment::Parallel => Some(self.separation.hypot(2.0 * self.dz)),
            Alignment::Vertical => Some(self.separation + 2.0 * self.dz),
            Alignment::Boundaryless => None,
        }
    }

    /// `(L/2)^2 - (L'/2)^2`, formed without cancellation.
    fn half_square_difference(&self) -> f64 {
        match self.alignment {
            Alignment::Parallel => -self.dz * self.dz,
            Alignment::Vertical => -self.dz * (self.separation + self.dz),
            Alignment::Boundaryless => 0.0,
        }
    }

    fn scaled(&self, sigma: f64) -> Geometry {
        Geometry {
            alignment: self.alignment,
            separation: self.separation / sigma,
            dz: self.dz / sigma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDetectorState {
    pub p_a: f64,
    pub p_b: f64,
    pub c: ComplexValue,
    pub x: ComplexValue,
}

impl TwoDetectorState {
    /// `p_a p_b - |c|^2`.
    pub fn positivity_margin(&self) -> f64 {
        self.p_a * self.p_b - self.c.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbabilityMode {
    WithBoundary,
    Boundaryless,
}

/// Excitation probability of a single detector at distance `dz` from the mirror.
pub fn transition_probability(gap: f64, dz: f64, mode: ProbabilityMode) -> Result<f64, ModelError> {
    non_negative("gap", gap)?;
    if mode == ProbabilityMode::Boundaryless {
        return Ok(flat_bracket(gap));
    }
    non_negative("dz", dz)?;
    if dz == 0.0 {
        return Ok(0.0);
    }
    let p = if dz <= crate::specfun::SERIES_RADIUS {
        -kernel_ratio_excess(dz, gap) / (8.0 * SQRT_PI)
    } else {
        flat_bracket(gap) - boundary_kernel(dz, gap) / (8.0 * SQRT_PI * dz)
    };
    Ok(p.max(0.0))
}

/// Auxiliary function `f(L)` of the correlation term `C`.
pub fn aux_f(separation: f64, omega_a: f64, delta_omega: f64) -> f64 {
    let b = omega_a + 0.5 * delta_omega;
    0.5 * kernel_ratio(0.5 * separation, b)
}

/// Auxiliary function `g(L)` of the correlation term `X`.
pub fn aux_g(separation: f64, delta_omega: f64) -> ComplexValue {
    let a = 0.5 * separation;
    let b = 0.5 * delta_omega;
    let damping = (-a * a).exp();
    let phase = 2.0 * a * b;
    ComplexValue::new(
        0.5 * kernel_ratio(a, b) + damping * phase.sin() / separation,
        damping * phase.cos() / separation,
    )
}

/// `i exp(-a^2 - 2iab) / (2a)`: the part of `g` that is singular at `L = 0`.
fn pole_part(a: f64, b: f64) -> ComplexValue {
    let phase = 2.0 * a * b;
    let m = (-a * a).exp() / (2.0 * a);
    ComplexValue::new(m * phase.sin(), m * phase.cos())
}

/// `pole_part(a1) - pole_part(a2)` with `sq_diff = a1^2 - a2^2` known exactly.
fn pole_part_difference(a1: f64, a2: f64, sq_diff: f64, b: f64) -> ComplexValue {
    // pole_part(a2) / pole_part(a1) = exp(t) with t = ln(a1/a2) + sq_diff + 2ib(a1 - a2)
    let gap = sq_diff / (a1 + a2);
    let t_re = -(-gap / a1).ln_1p() + sq_diff;
    let t_im = 2.0 * b * gap;
    let half = (0.5 * t_im).sin();
    let expm1 = ComplexValue::new(
        t_re.exp_m1() * t_im.cos() - 2.0 * half * half,
        t_re.exp() * t_im.sin(),
    );
    -pole_part(a1, b) * expm1
}

fn c_prefactor(delta_omega: f64) -> f64 {
    (-0.25 * delta_omega * delta_omega).exp() / (4.0 * SQRT_PI)
}

fn x_prefactor(beta: f64) -> f64 {
    -(-0.25 * beta * beta).exp() / (4.0 * SQRT_PI)
}

/// Correlation term `C` (real; returned with zero imaginary part).
pub fn correlation_c(pair: &DetectorPair, geom: &Geometry) -> Result<ComplexValue, ModelError> {
    pair.validate()?;
    geom.validate()?;
    let g = geom.scaled(pair.sigma);
    let (wa, dw) = (pair.omega_a * pair.sigma, pair.delta_omega() * pair.sigma);
    Ok(ComplexValue::new(correlation_c_scaled(wa, dw, &g), 0.0))
}

fn correlation_c_scaled(omega_a: f64, delta_omega: f64, geom: &Geometry) -> f64 {
    let pre = c_prefactor(delta_omega);
    let b = omega_a + 0.5 * delta_omega;
    let a1 = 0.5 * geom.separation;
    match geom.image_separation() {
        None => pre * aux_f(geom.separation, omega_a, delta_omega),
        Some(_) if geom.dz == 0.0 => 0.0,
        Some(image) => {
            let diff = kernel_ratio_difference(a1, 0.5 * image, geom.half_square_difference(), b);
            pre * 0.5 * diff
        }
    }
}

/// Correlation term `X`.
pub fn correlation_x(pair: &DetectorPair, geom: &Geometry) -> Result<ComplexValue, ModelError> {
    pair.validate()?;
    geom.validate()?;
    let g = geom.scaled(pair.sigma);
    let (wa, dw) = (pair.omega_a * pair.sigma, pair.delta_omega() * pair.sigma);
    Ok(correlation_x_scaled(wa, dw, &g))
}

fn correlation_x_scaled(omega_a: f64, delta_omega: f64, geom: &Geometry) -> ComplexValue {
    let pre = x_prefactor(2.0 * omega_a + delta_omega);
    let b = 0.5 * delta_omega;
    let a1 = 0.5 * geom.separation;
    match geom.image_separation() {
        None => aux_g(geom.separation, delta_omega) * pre,
        Some(_) if geom.dz == 0.0 => ComplexValue::new(0.0, 0.0),
        Some(image) => {
            let a2 = 0.5 * image;
            let sq = geom.half_square_difference();
            let regular = 0.5 * kernel_ratio_difference(a1, a2, sq, b);
            let singular = pole_part_difference(a1, a2, sq, b);
            (ComplexValue::new(regular, 0.0) + singular) * pre
        }
    }
}

/// Full leading-order state. Fails if the positivity condition is violated
/// by more than [`POSITIVITY_SLACK`].
pub fn evaluate(pair: &DetectorPair, geom: &Geometry) -> Result<TwoDetectorState, ModelError> {
    pair.validate()?;
    geom.validate()?;
    let g = geom.scaled(pair.sigma);
    let (wa, wb) = (pair.omega_a * pair.sigma, pair.omega_b * pair.sigma);
    let dw = wb - wa;
    let (p_a, p_b) = match g.alignment {
        Alignment::Boundaryless => (flat_bracket(wa), flat_bracket(wb)),
        Alignment::Parallel => (
            transition_probability(wa, g.dz, ProbabilityMode::WithBoundary)?,
            transition_probability(wb, g.dz, ProbabilityMode::WithBoundary)?,
        ),
        Alignment::Vertical => (
            transition_probability(wa, g.dz, ProbabilityMode::WithBoundary)?,
            transition_probability(wb, g.dz + g.separation, ProbabilityMode::WithBoundary)?,
        ),
    };
    let state = TwoDetectorState {
        p_a,
        p_b,
        c: ComplexValue::new(correlation_c_scaled(wa, dw, &g), 0.0),
        x: correlation_x_scaled(wa, dw, &g),
    };
    let margin = state.positivity_margin();
    if margin < -POSITIVITY_SLACK {
        return Err(ModelError::Positivity { deficit: margin });
    }
    Ok(state)
}

fn non_negative(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::Domain { name, value })
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::Domain { name, value })
    }
}
