//! Optimal gap differences and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ModelError, OptimizeError};
use crate::measures::{rescale_report, CorrelationReport};
use crate::model::{evaluate, Alignment, DetectorPair, Geometry, TwoDetectorState};

/// Default upper end of the gap-difference search, in units of `1/sigma`.
pub const DEFAULT_BOUND: f64 = 20.0;
/// Points of the coarse scan, including `delta_omega = 0`.
pub const SCAN_POINTS: usize = 64;
/// Smallest nonzero point of the logarithmic coarse scan.
pub const SCAN_FLOOR: f64 = 1e-3;
/// Golden-section stops once the bracket is this fraction of its position.
pub const REFINE_REL_WIDTH: f64 = 1e-6;
/// Objectives whose scan varies by less than this are reported as flat.
pub const FLAT_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Concurrence,
    MutualInfo,
    PA,
    PB,
    AbsC,
    AbsX,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::Concurrence,
        Quantity::MutualInfo,
        Quantity::PA,
        Quantity::PB,
        Quantity::AbsC,
        Quantity::AbsX,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::Concurrence => "concurrence",
            Quantity::MutualInfo => "mutual_info",
            Quantity::PA => "p_a",
            Quantity::PB => "p_b",
            Quantity::AbsC => "abs_c",
            Quantity::AbsX => "abs_x",
        }
    }

    /// Value at coupling `lambda` from a per-`lambda^2` state.
    pub fn of(&self, state: &TwoDetectorState, lambda: f64) -> f64 {
        let l2 = lambda * lambda;
        match self {
            Quantity::Concurrence | Quantity::MutualInfo => {
                let r = rescale_report(&CorrelationReport::from_state(state), lambda);
                if *self == Quantity::Concurrence {
                    r.concurrence
                } else {
                    r.mutual_info
                }
            }
            Quantity::PA => state.p_a * l2,
            Quantity::PB => state.p_b * l2,
            Quantity::AbsC => state.c.norm() * l2,
            Quantity::AbsX => state.x.norm() * l2,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "concurrence" | "c" => Ok(Quantity::Concurrence),
            "mutual_info" | "mi" | "i" => Ok(Quantity::MutualInfo),
            "p_a" => Ok(Quantity::PA),
            "p_b" => Ok(Quantity::PB),
            "abs_c" => Ok(Quantity::AbsC),
            "abs_x" => Ok(Quantity::AbsX),
            other => Err(format!("unknown quantity '{other}'")),
        }
    }
}

/// One evaluation point, in units of `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointSpec {
    pub omega_a: f64,
    pub delta_omega: f64,
    pub separation: f64,
    pub dz: f64,
    pub alignment: Alignment,
    pub lambda: f64,
}

impl PointSpec {
    pub fn pair(&self) -> DetectorPair {
        DetectorPair::from_difference(self.omega_a, self.delta_omega).with_lambda(self.lambda)
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.alignment, self.separation, self.dz)
    }

    /// Per-`lambda^2` state.
    pub fn state(&self) -> Result<TwoDetectorState, ModelError> {
        evaluate(&self.pair(), &self.geometry())
    }

    pub fn value(&self, quantity: Quantity) -> Result<f64, ModelError> {
        Ok(quantity.of(&self.state()?, self.lambda))
    }

    /// `quantity` for the vertical alignment minus the parallel one.
    pub fn alignment_gain(&self, quantity: Quantity) -> Result<f64, ModelError> {
        let at = |alignment| PointSpec { alignment, ..*self }.value(quantity);
        Ok(at(Alignment::Vertical)? - at(Alignment::Parallel)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub delta_omega_star: f64,
    pub value_at_star: f64,
    /// The optimum is `delta_omega = 0`.
    pub at_lower_bound: bool,
    pub bracket: (f64, f64),
    /// The coarse scan varied by less than [`FLAT_TOLERANCE`].
    pub flat_warning: bool,
}

fn scan_grid(bound: f64) -> Vec<f64> {
    let n = SCAN_POINTS - 1;
    let mut grid = Vec::with_capacity(SCAN_POINTS);
    grid.push(0.0);
    if bound <= SCAN_FLOOR {
        grid.extend((1..=n).map(|i| bound * i as f64 / n as f64));
    } else {
        let (lo, hi) = (SCAN_FLOOR.ln(), bound.ln());
        grid.extend((0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()));
        grid[n] = bound;
    }
    grid
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of `f` on `[a, b]`; returns `(x, f(x), (lo, hi))`.
fn golden_max<F>(f: &F, mut a: f64, mut b: f64, floor: f64) -> Result<(f64, f64, (f64, f64)), ModelError>
where
    F: Fn(f64) -> Result<f64, ModelError>,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > REFINE_REL_WIDTH * (0.5 * (a + b)).abs().max(floor) {
        // on ties keep the left part, so plateaus resolve to smaller gaps
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1, (a, b)) } else { (x2, f2, (a, b)) })
}

/// Maximizes `quantity` over `delta_omega` in `[0, bound]` with `pair`'s
/// `omega_a`, `lambda` and `sigma`.
pub fn optimal_gap_for(
    pair: &DetectorPair,
    geom: &Geometry,
    quantity: Quantity,
    bound: f64,
) -> Result<OptimizeResult, OptimizeError> {
    if !matches!(quantity, Quantity::Concurrence | Quantity::MutualInfo) {
        return Err(OptimizeError::UnsupportedQuantity(quantity.as_str()));
    }
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(OptimizeError::InvalidBound(bound));
    }
    let objective = |dw: f64| -> Result<f64, ModelError> {
        let p = DetectorPair {
            omega_b: pair.omega_a + dw,
            ..*pair
        };
        Ok(quantity.of(&evaluate(&p, geom)?, pair.lambda))
    };
    let grid = scan_grid(bound);
    let values = grid.iter().map(|&x| objective(x)).collect::<Result<Vec<_>, _>>()?;

    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let flat_warning = values[best] - min < FLAT_TOLERANCE;
    let last = grid.len() - 1;
    if flat_warning {
        return Ok(OptimizeResult {
            delta_omega_star: 0.0,
            value_at_star: values[0],
            at_lower_bound: true,
            bracket: (0.0, grid[1]),
            flat_warning,
        });
    }

    let (a, b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(last)]);
    let (x, fx, bracket) = golden_max(&objective, a, b, grid[1])?;
    let (star, value) = if fx > values[best] { (x, fx) } else { (grid[best], values[best]) };
    Ok(OptimizeResult {
        delta_omega_star: star,
        value_at_star: value,
        at_lower_bound: star == 0.0,
        bracket,
        flat_warning,
    })
}

/// [`optimal_gap_for`] at unit coupling and `sigma = 1`.
pub fn optimal_gap(omega_a: f64, geom: &Geometry, quantity: Quantity, bound: f64) -> Result<OptimizeResult, OptimizeError> {
    optimal_gap_for(&DetectorPair::new(omega_a, omega_a), geom, quantity, bound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub dz: f64,
    pub result: Result<OptimizeResult, OptimizeError>,
}

/// Optimal gap difference at each `dz`, evaluated in parallel.
pub fn optimal_gap_curve(
    omega_a: f64,
    separation: f64,
    dz_grid: &[f64],
    alignment: Alignment,
    quantity: Quantity,
) -> Result<Vec<CurveRow>, OptimizeError> {
    if dz_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(OptimizeError::InvalidSweep("dz grid must be sorted ascending".into()));
    }
    Ok(crate::parallel::install(|| {
        dz_grid
            .par_iter()
            .map(|&dz| CurveRow {
                dz,
                result: optimal_gap(omega_a, &Geometry::new(alignment, separation, dz), quantity, DEFAULT_BOUND),
            })
            .collect()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    #[serde(rename = "L")]
    Separation,
    Dz,
    DeltaOmega,
    OmegaA,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::Separation => "L",
            SweepVariable::Dz => "dz",
            SweepVariable::DeltaOmega => "delta_omega",
            SweepVariable::OmegaA => "omega_a",
        }
    }

    fn apply(&self, base: &PointSpec, x: f64) -> PointSpec {
        let mut p = *base;
        match self {
            SweepVariable::Separation => p.separation = x,
            SweepVariable::Dz => p.dz = x,
            SweepVariable::DeltaOmega => p.delta_omega = x,
            SweepVariable::OmegaA => p.omega_a = x,
        }
        p
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L" | "l" | "separation" => Ok(SweepVariable::Separation),
            "dz" => Ok(SweepVariable::Dz),
            "delta_omega" | "delta-omega" => Ok(SweepVariable::DeltaOmega),
            "omega_a" | "omega-a" => Ok(SweepVariable::OmegaA),
            other => Err(format!("unknown sweep variable '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(format!("unknown spacing '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl SweepRange {
    pub fn points(&self) -> Vec<f64> {
        let n = self.n_points;
        let last = n - 1;
        let mut xs: Vec<f64> = match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / last as f64)
                .collect(),
            Spacing::Log => {
                let (a, b) = (self.lo.ln(), self.hi.ln());
                (0..n).map(|i| (a + (b - a) * i as f64 / last as f64).exp()).collect()
            }
        };
        xs[0] = self.lo;
        xs[last] = self.hi;
        xs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: SweepRange,
    pub fixed: PointSpec,
    pub quantities: Vec<Quantity>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let r = &self.range;
        let bad = |msg: &str| Err(OptimizeError::InvalidSweep(msg.into()));
        if !(r.lo.is_finite() && r.hi.is_finite() && r.lo < r.hi) {
            return bad("range needs finite lo < hi");
        }
        if r.n_points < 2 {
            return bad("range needs at least 2 points");
        }
        if r.spacing == Spacing::Log && r.lo <= 0.0 {
            return bad("log spacing needs lo > 0");
        }
        if self.quantities.is_empty() {
            return bad("no quantities requested");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    /// In the order of [`SweepSpec::quantities`]; empty when `error` is set.
    pub values: Vec<f64>,
    pub perturbative_ok: bool,
    pub error: Option<String>,
}

/// Evaluates every requested quantity along the sweep, one row per point.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, OptimizeError> {
    spec.validate()?;
    let mut quantities = spec.quantities.clone();
    let mut seen = Vec::new();
    quantities.retain(|q| {
        let fresh = !seen.contains(q);
        seen.push(*q);
        fresh
    });
    let xs = spec.range.points();
    Ok(crate::parallel::install(|| {
        xs.par_iter()
            .map(|&x| {
                let point = spec.variable.apply(&spec.fixed, x);
                match point.state() {
                    Ok(state) => {
                        let report = rescale_report(&CorrelationReport::from_state(&state), point.lambda);
                        SweepRow {
                            x,
                            values: quantities.iter().map(|q| q.of(&state, point.lambda)).collect(),
                            perturbative_ok: report.perturbative_ok,
                            error: None,
                        }
                    }
                    Err(e) => SweepRow {
                        x,
                        values: Vec::new(),
                        perturbative_ok: false,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    }))
}
