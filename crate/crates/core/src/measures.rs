//! Concurrence and mutual information of the two-detector state.

use crate::model::TwoDetectorState;

/// Total excitation `p_a + p_b` below which the leading-order expansion is trusted.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub concurrence: f64,
    pub mutual_info: f64,
    pub l_plus: f64,
    pub l_minus: f64,
    pub perturbative_ok: bool,
}

impl CorrelationReport {
    pub fn from_state(state: &TwoDetectorState) -> Self {
        let (l_plus, l_minus) = eigenvalues(state);
        Self {
            concurrence: concurrence(state),
            mutual_info: mutual_information(state),
            l_plus,
            l_minus,
            perturbative_ok: state.p_a + state.p_b < PERTURBATIVE_LIMIT,
        }
    }
}

/// `2 max(0, |x| - sqrt(p_a p_b))`.
pub fn concurrence(state: &TwoDetectorState) -> f64 {
    2.0 * (state.x.norm() - (state.p_a * state.p_b).sqrt()).max(0.0)
}

/// Eigenvalues `(L+, L-)` of the single-excitation block.
///
/// `L-` is formed as `(p_a p_b - |c|^2) / L+` so it keeps full relative
/// accuracy when it is much smaller than `L+`.
pub fn eigenvalues(state: &TwoDetectorState) -> (f64, f64) {
    let (p_a, p_b) = (state.p_a, state.p_b);
    let c2 = state.c.norm_sqr();
    let spread = (p_a - p_b).abs();
    let disc = spread.hypot(2.0 * c2.sqrt());
    let l_plus = 0.5 * (p_a + p_b + disc);
    if l_plus == 0.0 {
        return (0.0, 0.0);
    }
    let l_minus = ((p_a * p_b - c2) / l_plus).max(0.0);
    (l_plus, l_minus)
}

fn xlogx(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        v * v.ln()
    }
}

/// `ln(1 + u) - u`.
fn log1p_minus(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        // -u^2/2 + u^3/3 - ...
        let mut term = -u * u;
        let mut sum = 0.0;
        for k in 2..14 {
            sum += term / k as f64;
            term *= -u;
        }
        sum
    } else {
        u.ln_1p() - u
    }
}

/// Mutual information `L+ ln L+ + L- ln L- - p_a ln p_a - p_b ln p_b`.
///
/// Written as a sum of individually small terms so that nearly degenerate
/// eigenvalues do not cancel catastrophically. Exactly zero when `c = 0`
/// or either probability vanishes.
pub fn mutual_information(state: &TwoDetectorState) -> f64 {
    let (p_a, p_b) = (state.p_a, state.p_b);
    let c2 = state.c.norm_sqr();
    if c2 == 0.0 || p_a <= 0.0 || p_b <= 0.0 {
        return 0.0;
    }
    let (hi, lo) = if p_a >= p_b { (p_a, p_b) } else { (p_b, p_a) };
    let spread = hi - lo;
    let disc = spread.hypot(2.0 * c2.sqrt());
    // eigenvalues are hi + shift and lo - shift
    let shift = 2.0 * c2 / (disc + spread);
    let l_plus = hi + shift;
    let l_minus = (p_a * p_b - c2) / l_plus;
    if l_minus <= 0.0 {
        return (xlogx(l_plus) - xlogx(p_a) - xlogx(p_b)).max(0.0);
    }
    let u = shift / hi;
    let v = shift / lo;
    // ln(L- / lo), and lo (h(-v)) = lo ln(L- / lo) + shift
    let (log_lower, lower) = if v < 0.5 {
        ((-v).ln_1p(), lo * log1p_minus(-v))
    } else {
        let l = (l_minus / lo).ln();
        (l, lo * l + shift)
    };
    let log_ratio = (spread / lo).ln_1p() + u.ln_1p() - log_lower;
    let mi = hi * log1p_minus(u) + lower + shift * log_ratio;
    mi.max(0.0)
}

/// Converts a per-`lambda^2` report to coupling `lambda`.
pub fn rescale_report(report: &CorrelationReport, lambda: f64) -> CorrelationReport {
    let s = lambda * lambda;
    CorrelationReport {
        concurrence: report.concurrence * s,
        mutual_info: report.mutual_info * s,
        l_plus: report.l_plus * s,
        l_minus: report.l_minus * s,
        perturbative_ok: (report.l_plus + report.l_minus) * s < PERTURBATIVE_LIMIT,
    }
}
