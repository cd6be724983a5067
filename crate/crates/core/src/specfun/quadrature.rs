#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate, always `>= 0`.
    pub error_estimate: f64,
    /// Number of integrand evaluations, always `>= 1`.
    pub evaluations: usize,
}

// Kronrod 15-point abscissae on [-1, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Globally adaptive Gauss–Kronrod (7/15) integrator.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subintervals kept in the partition.
    pub max_intervals: usize,
}

impl Integrator {
    pub fn new(abs_tol: f64) -> Self {
        Self { abs_tol, rel_tol: 0.0, max_intervals: 2000 }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }

    /// Integrate `f` over `[lo, hi]`; either bound may be infinite.
    pub fn integrate<F>(&self, mut f: F, lo: f64, hi: f64) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> f64,
    {
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) || self.abs_tol < 0.0 || self.rel_tol < 0.0 {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be nonnegative with one positive, got abs {} rel {}",
                self.abs_tol, self.rel_tol
            )));
        }
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Domain("quadrature bounds must not be NaN".into()));
        }
        if lo == hi {
            return Ok(QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 1 });
        }
        if lo > hi {
            let r = self.integrate(f, hi, lo)?;
            return Ok(QuadratureResult { value: -r.value, ..r });
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => self.run(&mut f, lo, hi),
            (true, false) => self.run(
                &mut |t: f64| {
                    let s = 1.0 - t;
                    f(lo + t / s) / (s * s)
                },
                0.0,
                1.0,
            ),
            (false, true) => self.run(
                &mut |t: f64| {
                    let s = 1.0 - t;
                    f(hi - t / s) / (s * s)
                },
                0.0,
                1.0,
            ),
            (false, false) => self.run(
                &mut |t: f64| {
                    let s = 1.0 - t * t;
                    f(t / s) * (1.0 + t * t) / (s * s)
                },
                -1.0,
                1.0,
            ),
        }
    }

    fn run(&self, f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64) -> Result<QuadratureResult> {
        let mut evaluations = 0usize;
        let first = kronrod15(f, lo, hi, &mut evaluations)?;
        let mut heap = BinaryHeap::new();
        // Segments whose error estimate is pure rounding: splitting cannot help.
        let mut settled = Vec::new();
        heap.push(first);
        let mut tiny_interval = false;

        loop {
            let (value, error) = totals(heap.iter().chain(&settled));
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            // With only rounding-limited segments left the estimate is final.
            if error <= target || heap.is_empty() {
                return Ok(QuadratureResult { value, error_estimate: error, evaluations });
            }
            if heap.len() + settled.len() >= self.max_intervals || tiny_interval {
                return Err(Error::Convergence { estimate: value, error });
            }
            let worst = heap.pop().expect("checked non-empty");
            if worst.rounding_limited {
                settled.push(worst);
                continue;
            }
            let mid = 0.5 * (worst.lo + worst.hi);
            if mid <= worst.lo || mid >= worst.hi || (worst.hi - worst.lo) < 1e3 * f64::EPSILON * mid.abs() {
                tiny_interval = true;
                heap.push(worst);
                continue;
            }
            heap.push(kronrod15(f, worst.lo, mid, &mut evaluations)?);
            heap.push(kronrod15(f, mid, worst.hi, &mut evaluations)?);
        }
    }
}

/// Integrate `f` over `[lo, hi]` to absolute tolerance `tol`.
///
/// `hi` may be `f64::INFINITY` and `lo` may be `f64::NEG_INFINITY`.
pub fn integrate_adaptive<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    Integrator::new(tol).integrate(f, lo, hi)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    rounding_limited: bool,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        self.error.total_cmp(&other.error).then(other.lo.total_cmp(&self.lo))
    }
}

fn totals<'a>(segments: impl Iterator<Item = &'a Segment>) -> (f64, f64) {
    // Sum in interval order so the result does not depend on heap layout.
    let mut segs: Vec<&Segment> = segments.collect();
    segs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    segs.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}

fn kronrod15(f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64, evaluations: &mut usize) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut eval = |x: f64| -> Result<f64> {
        *evaluations += 1;
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Numerical(format!("integrand is not finite at x = {x:e}")))
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let mut rounding_limited = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        rounding_limited = error <= floor;
        error = error.max(floor);
    }
    Ok(Segment { lo, hi, value, error, rounding_limited })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn weights_integrate_constants_exactly() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert_abs_diff_eq!(k, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_half_line() {
        let r = integrate_adaptive(|x| (-x * x).exp(), 0.0, f64::INFINITY, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, PI.sqrt() / 2.0, epsilon = 1e-10);
        assert!(r.error_estimate >= 0.0 && r.evaluations >= 15);
    }

    #[test]
    fn lorentzian_whole_line() {
        let r = integrate_adaptive(|x| 1.0 / (1.0 + x * x), f64::NEG_INFINITY, f64::INFINITY, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, PI, epsilon = 1e-9);
    }

    #[test]
    fn negative_half_line_and_reversed_bounds() {
        let r = integrate_adaptive(|x| x.exp(), f64::NEG_INFINITY, 0.0, 1e-11).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
        let r = integrate_adaptive(|x| x * x, 3.0, 0.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, -9.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_interval() {
        let r = integrate_adaptive(|_| 1.0, 2.0, 2.0, 1e-9).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let err = Integrator::new(1e-14).with_max_intervals(3).integrate(|x| (1.0 / x).sin(), 1e-3, 1.0).unwrap_err();
        match err {
            Error::Convergence { estimate, error } => {
                assert!(estimate.is_finite() && error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        assert!(matches!(
            integrate_adaptive(|x| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, 1e-9),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(integrate_adaptive(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate_adaptive(|x| x, 0.0, f64::NAN, 1e-9).is_err());
    }
}
