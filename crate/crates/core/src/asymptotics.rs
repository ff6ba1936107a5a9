//! Leading-order approximants for identical detectors in the corners of
//! parameter space.
//!
//! Values are per `lambda^2`, in units where `sigma = 1`. The "much less
//! than" conditions of each corner are made concrete with fixed
//! thresholds: a quantity that must be small should be at most
//! [`SMALL`], one that must be large at least [`LARGE`] (gaps: at least
//! [`LARGE_GAP`]). Parameters that miss a threshold by less than
//! [`MISMATCH_FACTOR`] produce a warning; beyond that the call fails with
//! [`AsymptoticError::RegimeMismatch`].

use std::f64::consts::{LN_2, PI};

use crate::error::AsymptoticError;
use crate::model::Alignment;

const SQRT_PI: f64 = 1.772_453_850_905_516;

pub const SMALL: f64 = 0.1;
pub const LARGE: f64 = 10.0;
pub const LARGE_GAP: f64 = 3.0;
pub const MISMATCH_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapClass {
    SmallGap,
    LargeGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    NearBoundary,
    FarBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SepClass {
    SmallL,
    LargeL,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Regime {
    pub gap_class: GapClass,
    pub zone: Zone,
    pub sep_class: SepClass,
}

impl Regime {
    pub const fn new(gap_class: GapClass, zone: Zone, sep_class: SepClass) -> Self {
        Self {
            gap_class,
            zone,
            sep_class,
        }
    }

    /// The corner nearest to `params`, splitting each axis at the geometric
    /// mean of its two thresholds.
    pub fn classify(params: &Params) -> Self {
        let split = (SMALL * LARGE).sqrt();
        Self {
            gap_class: if params.omega <= (SMALL * LARGE_GAP).sqrt() {
                GapClass::SmallGap
            } else {
                GapClass::LargeGap
            },
            zone: if params.dz <= split {
                Zone::NearBoundary
            } else {
                Zone::FarBoundary
            },
            sep_class: if params.separation <= split {
                SepClass::SmallL
            } else {
                SepClass::LargeL
            },
        }
    }

    /// Checks `params` against this corner. With `ordered`, the two length
    /// scales on the same side of `sigma` must also be well separated.
    fn check(&self, params: &Params, ordered: bool) -> Result<Vec<String>, AsymptoticError> {
        let mut c = Checker::default();
        match self.gap_class {
            GapClass::SmallGap => c.at_most("omega", params.omega, SMALL)?,
            GapClass::LargeGap => c.at_least("omega", params.omega, LARGE_GAP)?,
        }
        match self.zone {
            Zone::NearBoundary => c.at_most("dz", params.dz, SMALL)?,
            Zone::FarBoundary => c.at_least("dz", params.dz, LARGE)?,
        }
        match self.sep_class {
            SepClass::SmallL => c.at_most("L", params.separation, SMALL)?,
            SepClass::LargeL => c.at_least("L", params.separation, LARGE)?,
        }
        if ordered {
            match (self.zone, self.sep_class) {
                (Zone::NearBoundary, SepClass::SmallL) => c.at_most("dz/L", params.dz / params.separation, SMALL)?,
                (Zone::FarBoundary, SepClass::LargeL) => c.at_most("L/dz", params.separation / params.dz, SMALL)?,
                _ => {}
            }
        }
        Ok(c.warnings)
    }
}

#[derive(Default)]
struct Checker {
    warnings: Vec<String>,
}

impl Checker {
    fn at_most(&mut self, name: &str, value: f64, limit: f64) -> Result<(), AsymptoticError> {
        if value <= limit {
            Ok(())
        } else if value <= MISMATCH_FACTOR * limit {
            self.warnings.push(format!("{name} = {value} is above {limit}"));
            Ok(())
        } else {
            Err(AsymptoticError::RegimeMismatch(format!(
                "{name} = {value} exceeds {limit} by more than a factor {MISMATCH_FACTOR}"
            )))
        }
    }

    fn at_least(&mut self, name: &str, value: f64, limit: f64) -> Result<(), AsymptoticError> {
        if value >= limit {
            Ok(())
        } else if value * MISMATCH_FACTOR >= limit {
            self.warnings.push(format!("{name} = {value} is below {limit}"));
            Ok(())
        } else {
            Err(AsymptoticError::RegimeMismatch(format!(
                "{name} = {value} falls short of {limit} by more than a factor {MISMATCH_FACTOR}"
            )))
        }
    }
}

/// Common gap `omega`, separation `L` and distance `dz` of the nearer detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub omega: f64,
    pub separation: f64,
    pub dz: f64,
}

impl Params {
    pub const fn new(omega: f64, separation: f64, dz: f64) -> Self {
        Self { omega, separation, dz }
    }

    fn validate(&self) -> Result<(), AsymptoticError> {
        let bad = |name: &'static str, value: f64| Err(crate::error::ModelError::Domain { name, value }.into());
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return bad("omega", self.omega);
        }
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return bad("separation", self.separation);
        }
        if !(self.dz >= 0.0 && self.dz.is_finite()) {
            return bad("dz", self.dz);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub value: f64,
    /// Thresholds missed by less than [`MISMATCH_FACTOR`].
    pub warnings: Vec<String>,
}

fn unsupported(what: &str, regime: &Regime, alignment: Alignment) -> AsymptoticError {
    AsymptoticError::Unsupported(format!("no {what} approximant for {regime:?} with {alignment} alignment"))
}

/// Transition probability close to the boundary, `dz << 1`. Unchecked.
pub fn approx_probability_near(gap: f64, dz: f64) -> f64 {
    dz * dz / (2.0 * PI) * (1.0 / 3.0 - SQRT_PI * gap / 2.0)
}

/// `|X|` near the boundary for the parallel alignment and a small gap,
/// branching on the separation.
pub fn approx_abs_x_near(params: &Params) -> Result<Approximation, AsymptoticError> {
    params.validate()?;
    let Params { omega: w, separation: l, dz } = *params;
    let sep_class = side_of_sigma(l)?;
    let warnings = Regime::new(GapClass::SmallGap, Zone::NearBoundary, sep_class).check(params, false)?;
    let value = match sep_class {
        SepClass::SmallL => dz * dz / (2.0 * l.powi(3) * SQRT_PI) * (1.0 - w * w),
        SepClass::LargeL => 2.0 * dz * dz / (l.powi(4) * PI) * (1.0 - w * w),
    };
    Ok(Approximation { value, warnings })
}

/// Correlation term `C` near the boundary for a small gap.
pub fn approx_correlation_c_near(params: &Params) -> Result<Approximation, AsymptoticError> {
    params.validate()?;
    let Params { omega: w, separation: l, dz } = *params;
    let sep_class = side_of_sigma(l)?;
    let warnings = Regime::new(GapClass::SmallGap, Zone::NearBoundary, sep_class).check(params, false)?;
    let value = match sep_class {
        SepClass::SmallL => dz * dz / (2.0 * PI) * (1.0 / 3.0 - l * l / 15.0 - SQRT_PI * w / 2.0),
        SepClass::LargeL => dz * dz / PI * (2.0 / l.powi(4) - SQRT_PI * w / 4.0 * (-0.25 * l * l).exp()),
    };
    Ok(Approximation { value, warnings })
}

fn side_of_sigma(l: f64) -> Result<SepClass, AsymptoticError> {
    if l <= MISMATCH_FACTOR * SMALL {
        Ok(SepClass::SmallL)
    } else if l * MISMATCH_FACTOR >= LARGE {
        Ok(SepClass::LargeL)
    } else {
        Err(AsymptoticError::RegimeMismatch(format!(
            "L = {l} is neither small nor large compared with sigma"
        )))
    }
}

/// Concurrence of identical detectors in the given corner.
pub fn approx_concurrence(regime: Regime, alignment: Alignment, params: &Params) -> Result<Approximation, AsymptoticError> {
    use GapClass::*;
    use SepClass::*;
    use Zone::*;
    params.validate()?;
    let Params { omega: w, separation: l, dz } = *params;
    let far = |w: f64| 1.0 / (2.0 * SQRT_PI) * (1.0 / l - 1.0 / SQRT_PI + 1.0 / (2.0 * SQRT_PI * dz * dz) + w);
    let (ordered, value) = match (alignment, regime.gap_class, regime.zone, regime.sep_class) {
        (Alignment::Parallel, SmallGap, NearBoundary, SmallL) => (
            true,
            dz * dz / SQRT_PI * (1.0 / l.powi(3) + 1.0 / (4.0 * l) - 1.0 / (3.0 * SQRT_PI) + w / 2.0),
        ),
        (Alignment::Parallel, SmallGap, NearBoundary, LargeL) => {
            (false, (-dz * dz / (3.0 * PI) + 4.0 * dz * dz / (l.powi(4) * PI)).max(0.0))
        }
        (Alignment::Parallel, SmallGap, FarBoundary, SmallL) => (false, far(w)),
        (Alignment::Parallel, SmallGap, FarBoundary, LargeL) => (true, 0.0),
        (Alignment::Parallel, LargeGap, NearBoundary, SmallL) => {
            (false, (-w * w).exp() * dz * dz / (l.powi(3) * SQRT_PI))
        }
        (Alignment::Vertical, SmallGap, NearBoundary, SmallL) => (
            true,
            dz / SQRT_PI * (1.0 / (l * l) + 0.25 - l / (3.0 * SQRT_PI) + l * w / 2.0),
        ),
        (Alignment::Vertical, SmallGap, FarBoundary, SmallL) => (false, far(w)),
        (Alignment::Vertical, SmallGap, _, LargeL) => (false, 0.0),
        (Alignment::Vertical, LargeGap, NearBoundary, SmallL) => (false, (-w * w).exp() * dz / (l * l * SQRT_PI)),
        _ => return Err(unsupported("concurrence", &regime, alignment)),
    };
    let warnings = regime.check(params, ordered)?;
    Ok(Approximation { value, warnings })
}

/// Mutual information of identical detectors in the given corner.
pub fn approx_mutual_info(regime: Regime, alignment: Alignment, params: &Params) -> Result<Approximation, AsymptoticError> {
    use GapClass::*;
    use SepClass::*;
    use Zone::*;
    params.validate()?;
    let Params { omega: w, separation: l, dz } = *params;
    let dz2 = dz * dz;
    // dz^2 ln(x / dz) -> 0 at the boundary
    let dz2_log = |x: f64| if dz == 0.0 { 0.0 } else { dz2 * (x / dz).ln() };
    let far_small_l = || 1.0 / (2.0 * PI) * (LN_2 + l * l / 6.0 * l.ln() - LN_2 / (2.0 * dz2) - SQRT_PI * w * LN_2);
    let far_large_l = || 1.0 / (l * l * PI) * (1.0 / (l * l) - 1.0 / (2.0 * dz2) + SQRT_PI * w / (l * l));
    let (ordered, value) = match (alignment, regime.gap_class, regime.zone, regime.sep_class) {
        (Alignment::Parallel, SmallGap, NearBoundary, SmallL) => (
            true,
            LN_2 / 3.0 * dz2 / PI + l * l * dz2 / (15.0 * PI) * l.ln() - LN_2 / 2.0 * w * dz2 / SQRT_PI,
        ),
        (Alignment::Parallel, SmallGap, NearBoundary, LargeL) => {
            (false, 12.0 * dz2 / (l.powi(8) * PI) * (2.0 + 3.0 * SQRT_PI * w))
        }
        (Alignment::Parallel, LargeGap, NearBoundary, SmallL) => (
            false,
            (-w * w).exp() * dz2 / (8.0 * PI * w.powi(6)) * (2.0 * w * w * LN_2 - l * l * w.ln()),
        ),
        (Alignment::Vertical, SmallGap, NearBoundary, SmallL) => {
            (true, (2.0 - 3.0 * SQRT_PI * w) / (6.0 * PI) * dz2_log(l))
        }
        (Alignment::Vertical, SmallGap, NearBoundary, LargeL) => {
            (false, 32.0 * (1.0 + SQRT_PI * w) / (l.powi(6) * PI) * dz2_log(1.0))
        }
        (Alignment::Vertical, LargeGap, NearBoundary, SmallL) => {
            (false, (-w * w).exp() / (4.0 * PI * w.powi(4)) * dz2_log(l))
        }
        (Alignment::Parallel | Alignment::Vertical, SmallGap, FarBoundary, SmallL) => (false, far_small_l()),
        (Alignment::Parallel | Alignment::Vertical, SmallGap, FarBoundary, LargeL) => (true, far_large_l()),
        _ => return Err(unsupported("mutual information", &regime, alignment)),
    };
    let warnings = regime.check(params, ordered)?;
    Ok(Approximation { value, warnings })
}
