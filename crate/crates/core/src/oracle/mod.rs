//! Brute-force quadrature oracle for the state entries.
//!
//! After the Gaussian integral over the mean proper time is done in closed
//! form, every entry is a single integral over the time difference `s`
//! against `1 / (s^2 - d^2)`, with `d` the spatial distance between the
//! points the Wightman function connects.
//!
//! `X` is integrated along the real axis: the poles at `s = d > 0` are
//! handled by symmetric pole subtraction plus the delta-function part of
//! the `i eps` prescription.
//!
//! `C` and the transition probability oscillate as `exp(-i omega s)` with
//! `omega` up to the largest gap, so on the real axis their value is
//! `exp(-omega^2)` below the size of the integrand. Their contour is moved
//! to `Im s = -max(2 omega, 1)`, which the `i eps` prescription allows
//! since every singularity sits on or above the real axis. There the
//! integrand is a plain Gaussian, and differences such as direct minus
//! image are taken inside the integrand. The double pole of the coincident
//! term is still regularized at finite `eps` and extrapolated.

pub mod quadrature;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::OracleError;
use crate::model::{self, Alignment, DetectorPair, Geometry};
use crate::specfun::{boundary_kernel, flat_bracket, ComplexValue};

use quadrature::{integrate, integrate_pieces, richardson};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Beyond this distance past the last pole the Gaussian factor is below `e^-100`.
const GAUSSIAN_REACH: f64 = 20.0;

/// Extrapolants whose last two refinements differ by more than this
/// fraction are rejected.
const EXTRAPOLATION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Half-width of the symmetric window around each pole.
    pub pv_window: f64,
    pub eps_ladder: Vec<f64>,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            pv_window: 0.5,
            eps_ladder: vec![4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4, 1.25e-4],
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), OracleError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(OracleError::InvalidSpec("tolerances must be positive"));
        }
        if !(self.pv_window > 0.0 && self.pv_window.is_finite()) {
            return Err(OracleError::InvalidSpec("pv_window must be positive"));
        }
        if self.eps_ladder.len() < 2 {
            return Err(OracleError::InvalidSpec("eps_ladder needs at least two entries"));
        }
        if self.eps_ladder.iter().any(|&e| !(e > 0.0 && e.is_finite()))
            || self.eps_ladder.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(OracleError::InvalidSpec(
                "eps_ladder must be positive and strictly decreasing",
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(OracleError::InvalidSpec("max_subdivisions must be positive"));
        }
        Ok(())
    }
}

/// Pole locations of the two parts of the Wightman function, direct minus image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WightmanSpec {
    pub spatial_gap_direct: f64,
    /// `None` without a boundary.
    pub spatial_gap_image: Option<f64>,
}

impl WightmanSpec {
    /// Cross-correlation between the two detectors.
    pub fn for_geometry(geom: &Geometry) -> Result<Self, OracleError> {
        geom.validate()?;
        if geom.alignment != Alignment::Boundaryless && geom.dz == 0.0 {
            return Err(OracleError::DegenerateGeometry(
                "detectors on the boundary; the correlation vanishes identically",
            ));
        }
        Ok(Self {
            spatial_gap_direct: geom.separation,
            spatial_gap_image: geom.image_separation(),
        })
    }

    /// Self-correlation of one detector at distance `dz` from the boundary.
    pub fn for_probability(dz: f64) -> Result<Self, OracleError> {
        if !(dz > 0.0 && dz.is_finite()) {
            return Err(OracleError::DegenerateGeometry("dz must be positive"));
        }
        Ok(Self {
            spatial_gap_direct: 0.0,
            spatial_gap_image: Some(2.0 * dz),
        })
    }
}

/// Oracle value with its achieved absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate<T> {
    pub value: T,
    pub error: f64,
}

/// `P int_0^inf exp(-s^2/4) cos(omega s) / (s^2 - d^2) ds` for `d > 0`.
fn pv_half_line(d: f64, omega: f64, quad: &QuadratureSpec) -> Result<OracleEstimate<f64>, OracleError> {
    let h = |s: f64| (-0.25 * s * s).exp() * (omega * s).cos();
    let w = quad.pv_window.min(0.5 * d);
    let regular = |s: f64| h(s) / ((s - d) * (s + d));
    let phi = |s: f64| h(s) / (s + d);
    let (lo, hi) = (d - w, d + w);
    let left = integrate(regular, 0.0, lo, quad.abs_tol, quad.rel_tol, quad.max_subdivisions)?;
    let right = integrate(
        regular,
        hi,
        hi + GAUSSIAN_REACH,
        quad.abs_tol,
        quad.rel_tol,
        quad.max_subdivisions,
    )?;
    // the pole's Laurent part phi(d) / (s - d) integrates to zero on the window
    let window = integrate(
        |t: f64| (phi(d + t) - phi(d - t)) / t,
        0.0,
        w,
        quad.abs_tol,
        quad.rel_tol,
        quad.max_subdivisions,
    )?;
    Ok(OracleEstimate {
        value: left.value + right.value + window.value,
        error: left.abs_error + right.abs_error + window.abs_error,
    })
}

/// Depth below the real axis of the deformed contour for frequency `omega`.
fn contour_depth(omega: f64) -> f64 {
    (2.0 * omega).max(1.0)
}

/// `Re int exp(-s^2/4 - i omega s) kernel(s) ds` along `s = t - i c`.
///
/// Every singularity of `kernel` must lie on or above the real axis. The
/// constant factor `exp(c^2/4 - omega c)` is kept out of the integrand so
/// that the tolerances act on an `O(kernel)` quantity.
fn shifted_line<K: Fn(ComplexValue) -> ComplexValue>(
    omega: f64,
    kernel: K,
    poles: &[f64],
    quad: &QuadratureSpec,
) -> Result<OracleEstimate<f64>, OracleError> {
    let c = contour_depth(omega);
    let freq = 0.5 * c - omega;
    let integrand = |t: f64| {
        let s = ComplexValue::new(t, -c);
        (ComplexValue::from_polar((-0.25 * t * t).exp(), freq * t) * kernel(s)).re
    };
    let mut breaks = vec![-GAUSSIAN_REACH, -1.0, 0.0, 1.0, GAUSSIAN_REACH];
    for &d in poles.iter().filter(|&&d| d < GAUSSIAN_REACH) {
        breaks.extend_from_slice(&[-d, d]);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let r = integrate_pieces(integrand, &breaks, quad.abs_tol, quad.rel_tol, quad.max_subdivisions)?;
    let weight = (0.25 * c * c - omega * c).exp();
    Ok(OracleEstimate {
        value: weight * r.value,
        error: weight * r.abs_error,
    })
}

/// Contribution of one pole distance to `X`, before the prefactor.
fn x_term(d: f64, half_diff: f64, quad: &QuadratureSpec) -> Result<OracleEstimate<ComplexValue>, OracleError> {
    let pv = pv_half_line(d, half_diff, quad)?;
    let delta = PI / (2.0 * d) * (-0.25 * d * d).exp() * (d * half_diff).cos();
    Ok(OracleEstimate {
        value: ComplexValue::new(pv.value, -delta),
        error: pv.error,
    })
}

/// Correlation term `C` by quadrature along the deformed contour.
pub fn pv_correlation_c(
    pair: &DetectorPair,
    geom: &Geometry,
    quad: &QuadratureSpec,
) -> Result<OracleEstimate<ComplexValue>, OracleError> {
    pair.validate()?;
    quad.validate()?;
    let (wa, dw, g) = scaled(pair, geom);
    let spec = WightmanSpec::for_geometry(&g)?;
    let half_sum = wa + 0.5 * dw;
    let scale = -(-0.25 * dw * dw).exp() / (4.0 * PI * SQRT_PI);
    let l2 = spec.spatial_gap_direct.powi(2);
    let bracket = match spec.spatial_gap_image {
        None => shifted_line(half_sum, |s| (s * s - l2).inv(), &[spec.spatial_gap_direct], quad)?,
        Some(image) => {
            // 1/(s^2 - L^2) - 1/(s^2 - L'^2) with L'^2 - L^2 taken exactly
            let excess = match g.alignment {
                Alignment::Vertical => 4.0 * g.dz * (g.separation + g.dz),
                _ => 4.0 * g.dz * g.dz,
            };
            let i2 = image * image;
            let b = shifted_line(
                half_sum,
                |s| ((s * s - l2) * (s * s - i2)).inv(),
                &[spec.spatial_gap_direct, image],
                quad,
            )?;
            OracleEstimate {
                value: -excess * b.value,
                error: excess * b.error,
            }
        }
    };
    Ok(OracleEstimate {
        value: ComplexValue::new(scale * bracket.value, 0.0),
        error: (scale * bracket.error).abs(),
    })
}

/// Correlation term `X` by principal-value quadrature.
pub fn pv_correlation_x(
    pair: &DetectorPair,
    geom: &Geometry,
    quad: &QuadratureSpec,
) -> Result<OracleEstimate<ComplexValue>, OracleError> {
    pair.validate()?;
    quad.validate()?;
    let (wa, dw, g) = scaled(pair, geom);
    let spec = WightmanSpec::for_geometry(&g)?;
    let beta = 2.0 * wa + dw;
    let pre = (-0.25 * beta * beta).exp() / (2.0 * PI * SQRT_PI);
    let direct = x_term(spec.spatial_gap_direct, 0.5 * dw, quad)?;
    let (mut value, mut error) = (direct.value, direct.error);
    if let Some(image) = spec.spatial_gap_image {
        let im = x_term(image, 0.5 * dw, quad)?;
        value -= im.value;
        error += im.error;
    }
    Ok(OracleEstimate {
        value: value * pre,
        error: pre * error,
    })
}

/// Breakdown of the oracle transition probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionOracle {
    pub value: f64,
    /// Coincident (boundary-free) part, extrapolated in `eps`.
    pub direct: f64,
    /// Image part; negative, since the boundary suppresses excitation.
    pub image: f64,
    pub error: f64,
}

/// Transition probability from the time-domain integral.
///
/// With `g(s) = exp(-s^2/4 - i gap s)` and `d = 2 dz`, the probability is
/// `Re int g [1/(s^2 - d^2) - 1/(s - i eps)^2]` as `eps -> 0`. The
/// eps-independent part `d^2 / (s^2 (s^2 - d^2))` is integrated once; the
/// remainder `1/s^2 - 1/(s - i eps)^2` is evaluated along `quad.eps_ladder`
/// and Richardson-extrapolated.
pub fn eps_transition_probability(gap: f64, dz: f64, quad: &QuadratureSpec) -> Result<TransitionOracle, OracleError> {
    quad.validate()?;
    if !(gap >= 0.0 && gap.is_finite()) {
        return Err(crate::error::ModelError::Domain { name: "gap", value: gap }.into());
    }
    let spec = WightmanSpec::for_probability(dz)?;
    let d = spec.spatial_gap_image.unwrap_or(2.0 * dz);
    let d2 = d * d;
    let scale = SQRT_PI / (4.0 * PI * PI);

    let combined = shifted_line(gap, |s| (s * s * (s * s - d2)).inv(), &[d], quad)?;
    let coincident = shifted_line(gap, |s| (s * s).inv(), &[], quad)?;
    let image = shifted_line(gap, |s| (s * s - d2).inv(), &[d], quad)?;

    let mut samples = Vec::with_capacity(quad.eps_ladder.len());
    let mut quad_error: f64 = 0.0;
    for &eps in &quad.eps_ladder {
        let r = shifted_line(
            gap,
            |s| -(s * 2.0 * ComplexValue::i() + eps) * eps / (s * s * (s - ComplexValue::new(0.0, eps)).powi(2)),
            &[],
            quad,
        )?;
        quad_error = quad_error.max(r.error);
        samples.push(r.value);
    }
    let remainder = richardson(&quad.eps_ladder, &samples);
    let value = scale * (d2 * combined.value + remainder.value);
    if !(value.is_finite() && scale * remainder.error <= EXTRAPOLATION_LIMIT * value.abs()) {
        return Err(OracleError::ExtrapolationUnstable(remainder.error));
    }
    Ok(TransitionOracle {
        value,
        direct: -scale * (coincident.value - remainder.value),
        image: scale * image.value,
        error: scale * (d2 * combined.error + quad_error + remainder.error),
    })
}

fn scaled(pair: &DetectorPair, geom: &Geometry) -> (f64, f64, Geometry) {
    let s = pair.sigma;
    (
        pair.omega_a * s,
        pair.delta_omega() * s,
        Geometry::new(geom.alignment, geom.separation / s, geom.dz / s),
    )
}

/// Closed-form image part of the transition probability, for comparison
/// with [`TransitionOracle::image`].
pub fn closed_form_image(gap: f64, dz: f64) -> f64 {
    -boundary_kernel(dz, gap) / (8.0 * SQRT_PI * dz)
}

/// Closed-form coincident part, for comparison with [`TransitionOracle::direct`].
pub fn closed_form_direct(gap: f64) -> f64 {
    flat_bracket(gap)
}

/// Axes of the certification grid; the grid is their full product.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationGrid {
    pub omegas: Vec<f64>,
    pub delta_omegas: Vec<f64>,
    pub separations: Vec<f64>,
    pub dzs: Vec<f64>,
    pub alignments: Vec<Alignment>,
}

impl Default for CertificationGrid {
    fn default() -> Self {
        Self {
            omegas: vec![0.0, 0.1, 0.5, 1.1, 2.0],
            delta_omegas: vec![0.0, 0.08, 0.5, 1.0],
            separations: vec![0.1, 0.5, 1.5, 5.0],
            dzs: vec![0.05, 0.5, 1.0, 3.0, 10.0],
            alignments: vec![Alignment::Parallel, Alignment::Vertical],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificationPoint {
    pub omega_a: f64,
    pub delta_omega: f64,
    pub separation: f64,
    pub dz: f64,
    pub alignment: Alignment,
}

impl CertificationGrid {
    pub fn points(&self) -> Vec<CertificationPoint> {
        let mut out = Vec::new();
        for &alignment in &self.alignments {
            for &omega_a in &self.omegas {
                for &delta_omega in &self.delta_omegas {
                    for &separation in &self.separations {
                        for &dz in &self.dzs {
                            out.push(CertificationPoint {
                                omega_a,
                                delta_omega,
                                separation,
                                dz,
                                alignment,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCertificate {
    #[serde(flatten)]
    pub point: CertificationPoint,
    pub rel_err_p_a: f64,
    pub rel_err_p_b: f64,
    pub rel_err_c: f64,
    pub rel_err_x: f64,
    pub max_rel_err: f64,
    /// Largest oracle error estimate relative to the value it qualifies.
    pub oracle_rel_error: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub rel_tol: f64,
    pub n_points: usize,
    pub n_failed: usize,
    pub worst_rel_err: f64,
    pub worst: Option<PointCertificate>,
    pub passed: bool,
    pub points: Vec<PointCertificate>,
}

/// Absolute floor below which two values are considered equal regardless
/// of their ratio.
pub const CERTIFICATION_FLOOR: f64 = 1e-15;

fn relative_error(closed: ComplexValue, oracle: ComplexValue) -> f64 {
    (closed - oracle).norm() / oracle.norm().max(CERTIFICATION_FLOOR)
}

fn certify_point(point: &CertificationPoint, quad: &QuadratureSpec, rel_tol: f64) -> PointCertificate {
    let failed = |msg: String| PointCertificate {
        point: *point,
        rel_err_p_a: f64::NAN,
        rel_err_p_b: f64::NAN,
        rel_err_c: f64::NAN,
        rel_err_x: f64::NAN,
        max_rel_err: f64::INFINITY,
        oracle_rel_error: f64::NAN,
        passed: false,
        failure: Some(msg),
    };
    let pair = DetectorPair::from_difference(point.omega_a, point.delta_omega);
    let geom = Geometry::new(point.alignment, point.separation, point.dz);
    let closed = match model::evaluate(&pair, &geom) {
        Ok(s) => s,
        Err(e) => return failed(format!("closed form: {e}")),
    };
    let dz_b = match point.alignment {
        Alignment::Vertical => point.dz + point.separation,
        _ => point.dz,
    };
    let run = || -> Result<_, OracleError> {
        let pa = eps_transition_probability(pair.omega_a, point.dz, quad)?;
        let pb = eps_transition_probability(pair.omega_b, dz_b, quad)?;
        let c = pv_correlation_c(&pair, &geom, quad)?;
        let x = pv_correlation_x(&pair, &geom, quad)?;
        Ok((pa, pb, c, x))
    };
    let (pa, pb, c, x) = match run() {
        Ok(v) => v,
        Err(e) => return failed(format!("oracle: {e}")),
    };
    let real = |v: f64| ComplexValue::new(v, 0.0);
    let rel_err_p_a = relative_error(real(closed.p_a), real(pa.value));
    let rel_err_p_b = relative_error(real(closed.p_b), real(pb.value));
    let rel_err_c = relative_error(closed.c, c.value);
    let rel_err_x = relative_error(closed.x, x.value);
    let max_rel_err = rel_err_p_a.max(rel_err_p_b).max(rel_err_c).max(rel_err_x);
    let oracle_rel_error = [
        pa.error / pa.value.abs().max(CERTIFICATION_FLOOR),
        pb.error / pb.value.abs().max(CERTIFICATION_FLOOR),
        c.error / c.value.norm().max(CERTIFICATION_FLOOR),
        x.error / x.value.norm().max(CERTIFICATION_FLOOR),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    PointCertificate {
        point: *point,
        rel_err_p_a,
        rel_err_p_b,
        rel_err_c,
        rel_err_x,
        max_rel_err,
        oracle_rel_error,
        passed: max_rel_err <= rel_tol,
        failure: None,
    }
}

/// Compares closed forms and oracle on every grid point, in parallel.
pub fn certify(
    grid: &CertificationGrid,
    quad: &QuadratureSpec,
    rel_tol: f64,
) -> Result<CertificationReport, OracleError> {
    quad.validate()?;
    if !(rel_tol > 0.0) {
        return Err(OracleError::InvalidSpec("rel_tol must be positive"));
    }
    let points = grid.points();
    if points.is_empty() {
        return Err(OracleError::EmptyGrid);
    }
    let certificates: Vec<PointCertificate> =
        crate::parallel::install(|| points.par_iter().map(|p| certify_point(p, quad, rel_tol)).collect());
    let n_failed = certificates.iter().filter(|c| !c.passed).count();
    let worst = certificates
        .iter()
        .max_by(|a, b| a.max_rel_err.total_cmp(&b.max_rel_err))
        .cloned();
    Ok(CertificationReport {
        rel_tol,
        n_points: certificates.len(),
        n_failed,
        worst_rel_err: worst.as_ref().map_or(0.0, |w| w.max_rel_err),
        worst,
        passed: n_failed == 0,
        points: certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{correlation_c, correlation_x, transition_probability, ProbabilityMode};

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn default_spec_is_valid() {
        quad().validate().unwrap();
        let mut q = quad();
        q.eps_ladder = vec![1e-3, 2e-3];
        assert!(q.validate().is_err());
        q = quad();
        q.abs_tol = 0.0;
        assert!(q.validate().is_err());
    }

    #[test]
    fn coincident_term_at_zero_gap() {
        let t = eps_transition_probability(0.0, 1.0, &quad()).unwrap();
        assert!((t.direct - 1.0 / (4.0 * PI)).abs() < 1e-11, "{}", t.direct);
    }

    #[test]
    fn probability_matches_closed_form() {
        for &(gap, dz) in &[(0.1, 1.0), (0.0, 0.05), (1.1, 0.5), (2.0, 3.0)] {
            let t = eps_transition_probability(gap, dz, &quad()).unwrap();
            let closed = transition_probability(gap, dz, ProbabilityMode::WithBoundary).unwrap();
            assert!((t.value - closed).abs() < 1e-8 * closed, "gap={gap} dz={dz} {} {closed}", t.value);
            assert!((t.image - closed_form_image(gap, dz)).abs() < 1e-10 * closed_form_image(gap, dz).abs());
        }
    }

    #[test]
    fn c_matches_closed_form() {
        let pair = DetectorPair::from_difference(0.1, 0.0);
        let geom = Geometry::new(Alignment::Parallel, 0.5, 1.0);
        let o = pv_correlation_c(&pair, &geom, &quad()).unwrap();
        let c = correlation_c(&pair, &geom).unwrap();
        assert!((o.value - c).norm() < 1e-7 * c.norm(), "{} {c}", o.value);
    }

    #[test]
    fn x_matches_closed_form() {
        let pair = DetectorPair::from_difference(1.1, 0.0);
        for al in Alignment::ALL {
            let geom = Geometry::new(al, 1.0, 1.0);
            let o = pv_correlation_x(&pair, &geom, &quad()).unwrap();
            let x = correlation_x(&pair, &geom).unwrap();
            assert!((o.value - x).norm() < 1e-7 * x.norm(), "{al}: {} {x}", o.value);
        }
    }

    #[test]
    fn degenerate_geometry_rejected() {
        let pair = DetectorPair::new(0.1, 0.1);
        let geom = Geometry::new(Alignment::Parallel, 0.5, 0.0);
        assert!(matches!(
            pv_correlation_c(&pair, &geom, &quad()),
            Err(OracleError::DegenerateGeometry(_))
        ));
        assert!(eps_transition_probability(0.1, 0.0, &quad()).is_err());
    }

    #[test]
    fn empty_grid_rejected() {
        let mut grid = CertificationGrid::default();
        grid.dzs.clear();
        assert_eq!(certify(&grid, &quad(), 1e-6).unwrap_err(), OracleError::EmptyGrid);
        assert_eq!(OracleError::EmptyGrid.to_string(), "empty grid");
    }

    #[test]
    fn default_grid_size() {
        assert_eq!(CertificationGrid::default().points().len(), 800);
    }
}
