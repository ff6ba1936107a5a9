//! Adaptive Gauss-Kronrod (10, 21) quadrature and Richardson extrapolation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::OracleError;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Weights of the 10-point Gauss rule on the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Error estimate is pinned at the rounding floor; splitting cannot help.
    at_floor: bool,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = fc.abs() * WGK[10];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(10).enumerate() {
        let dx = half * x;
        let (lo, hi) = (f(center - dx), f(center + dx));
        let pair = lo + hi;
        kronrod += w * pair;
        abs_sum += w * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).abs();
    // QUADPACK-style sharpening of the raw Gauss/Kronrod difference
    let error = if raw > 0.0 {
        let scale = (200.0 * raw / (value.abs().max(f64::MIN_POSITIVE))).powf(1.5);
        raw * scale.min(1.0)
    } else {
        0.0
    };
    let floor = 50.0 * f64::EPSILON * abs_sum * half;
    Segment {
        a,
        b,
        value,
        error: error.max(floor),
        at_floor: error <= floor,
    }
}

/// Integrates `f` over `[a, b]` until the error estimate drops below
/// `max(abs_tol, rel_tol |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadEstimate, OracleError> {
    integrate_pieces(f, &[a, b], abs_tol, rel_tol, max_subdivisions)
}

/// As [`integrate`], over consecutive intervals between the given breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadEstimate, OracleError> {
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(&f, w[0], w[1]));
        }
    }
    let mut subdivisions = 0;
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadEstimate {
                value,
                abs_error: error,
                subdivisions,
            });
        }
        if heap.peek().is_some_and(|s| s.at_floor) {
            // every remaining estimate is rounding noise
            return Ok(QuadEstimate {
                value,
                abs_error: error,
                subdivisions,
            });
        }
        if subdivisions >= max_subdivisions {
            return Err(OracleError::Convergence {
                estimate: value,
                error,
                subdivisions,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => {
                return Ok(QuadEstimate {
                    value: 0.0,
                    abs_error: 0.0,
                    subdivisions,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            return Err(OracleError::Convergence {
                estimate: value,
                error,
                subdivisions,
            });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
        subdivisions += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// Difference between the two most refined extrapolants.
    pub error: f64,
}

/// Richardson extrapolation to `h -> 0` of samples `v(h)` on a ladder with
/// constant ratio, assuming an expansion in integer powers `h, h^2, ...`.
pub fn richardson(hs: &[f64], values: &[f64]) -> Extrapolation {
    assert_eq!(hs.len(), values.len());
    assert!(!hs.is_empty());
    // Neville table for the polynomial in h evaluated at h = 0
    let n = hs.len();
    let mut table = values.to_vec();
    let mut previous_best = table[n - 1];
    let mut best = table[n - 1];
    for level in 1..n {
        for i in (level..n).rev() {
            let (h_far, h_near) = (hs[i - level], hs[i]);
            table[i] = (h_far * table[i] - h_near * table[i - 1]) / (h_far - h_near);
        }
        previous_best = best;
        best = table[n - 1];
    }
    Extrapolation {
        value: best,
        error: (best - previous_best).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x + 1.0, 0.0, 2.0, 1e-14, 1e-14, 10).unwrap();
        assert!((r.value - 10.0).abs() < 1e-13);
        assert_eq!(r.subdivisions, 0);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate(|x| (-x * x).exp(), -10.0, 10.0, 1e-15, 1e-14, 100).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn peaked_integrand_needs_subdivision() {
        let eps: f64 = 1e-4;
        let r = integrate(|x| eps / (x * x + eps * eps), 0.0, 1.0, 1e-13, 1e-13, 500).unwrap();
        let exact = (1.0 / eps).atan();
        assert!((r.value - exact).abs() < 1e-12, "{} {exact}", r.value);
        assert!(r.subdivisions > 0);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate(|x| (1.0 / x).sin(), 1e-8, 1.0, 1e-15, 1e-15, 5);
        assert!(matches!(r, Err(OracleError::Convergence { .. })));
    }

    #[test]
    fn richardson_removes_integer_powers() {
        let f = |h: f64| 2.0 + 0.3 * h - 1.7 * h * h + 0.25 * h.powi(3);
        let hs = [0.4, 0.2, 0.1, 0.05];
        let vs: Vec<f64> = hs.iter().map(|&h| f(h)).collect();
        let e = richardson(&hs, &vs);
        assert!((e.value - 2.0).abs() < 1e-13);
    }
}
