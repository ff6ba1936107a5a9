#![allow(dead_code)]

use std::path::PathBuf;

use harvestlab::asymptotics::{
    approx_abs_x_near, approx_concurrence, approx_correlation_c_near, approx_mutual_info, approx_probability_near,
    GapClass, Params, Regime, SepClass, Zone,
};
use harvestlab::measures::{concurrence, mutual_information};
use harvestlab::model::{evaluate, DetectorPair, Geometry, TwoDetectorState};
use harvestlab::Alignment;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

fn rows(name: &str) -> Vec<Vec<f64>> {
    std::fs::read_to_string(data(name))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

/// `(z, w(z))` from the extended-precision table.
pub fn faddeeva_reference() -> Vec<(harvestlab::ComplexValue, harvestlab::ComplexValue)> {
    rows("faddeeva_grid.csv")
        .into_iter()
        .map(|r| (harvestlab::ComplexValue::new(r[0], r[1]), harvestlab::ComplexValue::new(r[2], r[3])))
        .collect()
}

/// `(a, b, K)` from the definition evaluated in extended precision.
pub fn kernel_reference() -> Vec<(f64, f64, f64)> {
    rows("boundary_kernel.csv").into_iter().map(|r| (r[0], r[1], r[2])).collect()
}

fn t(x: f64) -> f64 {
    10f64.powf(x)
}

/// Path into a regime corner: `d` counts decades inside it.
pub type Path = fn(f64) -> (f64, f64, f64);

pub fn near(d: f64) -> (f64, f64, f64) {
    (t(-d), t(-d), t(-2.0 * d))
}
pub fn near_wide(d: f64) -> (f64, f64, f64) {
    (t(-d), t(d), t(-d))
}
pub fn far(d: f64) -> (f64, f64, f64) {
    (t(-d), t(-d), t(d))
}
pub fn far_wide(d: f64) -> (f64, f64, f64) {
    (t(-d), t(d), t(2.0 * d))
}
pub fn large_gap(d: f64) -> (f64, f64, f64) {
    (4.0 * 2f64.powf(2.0 * (d - 1.0)), t(-d), t(-2.0 * d))
}
pub fn large_gap_close(d: f64) -> (f64, f64, f64) {
    (16.0, 1e-2, t(-2.0 - d))
}

#[derive(Clone, Copy)]
pub enum Target {
    Probability,
    AbsX,
    C,
    Concurrence,
    MutualInfo,
}

pub struct Corner {
    pub name: String,
    pub alignment: Alignment,
    pub regime: Regime,
    pub path: Path,
    pub target: Target,
}

impl Corner {
    /// Relative error of the approximation at depth `d`.
    pub fn error(&self, d: f64) -> f64 {
        let (w, l, dz) = (self.path)(d);
        let p = Params::new(w, l, dz);
        let s: TwoDetectorState = evaluate(&DetectorPair::new(w, w), &Geometry::new(self.alignment, l, dz)).unwrap();
        let (approx, exact) = match self.target {
            Target::Probability => (approx_probability_near(w, dz), s.p_a),
            Target::AbsX => (approx_abs_x_near(&p).unwrap().value, s.x.norm()),
            Target::C => (approx_correlation_c_near(&p).unwrap().value, s.c.re),
            Target::Concurrence => (
                approx_concurrence(self.regime, self.alignment, &p).unwrap().value,
                concurrence(&s),
            ),
            Target::MutualInfo => (
                approx_mutual_info(self.regime, self.alignment, &p).unwrap().value,
                mutual_information(&s),
            ),
        };
        ((approx - exact) / exact).abs()
    }
}

pub fn corners() -> Vec<Corner> {
    use Alignment::{Parallel, Vertical};
    use GapClass::*;
    use SepClass::*;
    use Zone::*;
    let cases: [(Alignment, Regime, Path, Target); 19] = [
        (Parallel, Regime::new(SmallGap, NearBoundary, SmallL), near, Target::Probability),
        (Parallel, Regime::new(SmallGap, NearBoundary, SmallL), near, Target::AbsX),
        (Parallel, Regime::new(SmallGap, NearBoundary, SmallL), near, Target::C),
        (Parallel, Regime::new(SmallGap, NearBoundary, SmallL), near, Target::Concurrence),
        (Parallel, Regime::new(SmallGap, FarBoundary, SmallL), far, Target::Concurrence),
        (Parallel, Regime::new(LargeGap, NearBoundary, SmallL), large_gap, Target::Concurrence),
        (Vertical, Regime::new(SmallGap, NearBoundary, SmallL), near, Target::Concurrence),
        (Vertical, Regime::new(SmallGap, FarBoundary, SmallL), far, Target::Concurrence),
        (Vertical, Regime::new(LargeGap, NearBoundary, SmallL), large_gap, Target::Concurrence),
        (Parallel, Regime::new(SmallGap, NearBoundary, SmallL), near, Target::MutualInfo),
        (Parallel, Regime::new(SmallGap, NearBoundary, LargeL), near_wide, Target::MutualInfo),
        (Parallel, Regime::new(SmallGap, FarBoundary, SmallL), far, Target::MutualInfo),
        (Parallel, Regime::new(SmallGap, FarBoundary, LargeL), far_wide, Target::MutualInfo),
        (Parallel, Regime::new(LargeGap, NearBoundary, SmallL), large_gap, Target::MutualInfo),
        (Vertical, Regime::new(SmallGap, NearBoundary, SmallL), near, Target::MutualInfo),
        (Vertical, Regime::new(SmallGap, NearBoundary, LargeL), near_wide, Target::MutualInfo),
        (Vertical, Regime::new(SmallGap, FarBoundary, SmallL), far, Target::MutualInfo),
        (Vertical, Regime::new(SmallGap, FarBoundary, LargeL), far_wide, Target::MutualInfo),
        (Vertical, Regime::new(LargeGap, NearBoundary, SmallL), large_gap_close, Target::MutualInfo),
    ];
    cases
        .iter()
        .map(|&(alignment, regime, path, target)| {
            let what = match target {
                Target::Probability => "p",
                Target::AbsX => "|x|",
                Target::C => "c",
                Target::Concurrence => "concurrence",
                Target::MutualInfo => "mutual_info",
            };
            Corner {
                name: format!(
                    "{what} {} {:?}/{:?}/{:?}",
                    alignment.as_str(),
                    regime.gap_class,
                    regime.zone,
                    regime.sep_class
                ),
                alignment,
                regime,
                path,
                target,
            }
        })
        .collect()
}

/// Depths of the three-point approach; the last is two decades inside.
pub const DEPTHS: [f64; 3] = [1.0, 1.5, 2.0];
