use crate::error::{domain, Result};

/// Above this argument the scaled modified Bessel functions switch from the
/// ascending series to the asymptotic expansion. At x = 30 the asymptotic
/// terms keep shrinking until k ~ 2x, so truncation error is far below f64
/// resolution; below it the all-positive series loses nothing to cancellation.
pub(crate) const SERIES_LIMIT: f64 = 30.0;

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("bessel_j0 requires a finite argument, got {x}")));
    }
    Ok(j0(x))
}

/// Bessel function of the first kind of order one.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("bessel_j1 requires a finite argument, got {x}")));
    }
    Ok(j1(x))
}

/// `e^{-x} I0(x)` for `x >= 0`.
pub fn bessel_i0e(x: f64) -> Result<f64> {
    check_nonneg("bessel_i0e", x)?;
    Ok(i0e(x))
}

/// `e^{-x} I1(x)` for `x >= 0`.
pub fn bessel_i1e(x: f64) -> Result<f64> {
    check_nonneg("bessel_i1e", x)?;
    Ok(i1e(x))
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(domain(format!("{name} requires x >= 0, got {x}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn j0(x: f64) -> f64 {
    libm::j0(x)
}

#[inline]
pub(crate) fn j1(x: f64) -> f64 {
    libm::j1(x)
}

pub(crate) fn i0e(x: f64) -> f64 {
    scaled_modified(0, x)
}

pub(crate) fn i1e(x: f64) -> f64 {
    scaled_modified(1, x)
}

fn scaled_modified(order: u32, x: f64) -> f64 {
    if x == f64::INFINITY {
        return 0.0;
    }
    if x <= SERIES_LIMIT {
        ascending_series(order, x) * (-x).exp()
    } else {
        hankel_asymptotic(order, x)
    }
}

/// I_n(x) = sum_k (x/2)^(2k+n) / (k! (k+n)!)
fn ascending_series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let quarter_sq = half * half;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= quarter_sq / (f64::from(k) * f64::from(k + order));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

/// e^{-x} I_n(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k prod_{j<=k} (4n^2 - (2j-1)^2) / (k! (8x)^k)
fn hankel_asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(order * order);
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut k = 0u32;
    loop {
        k += 1;
        let odd = f64::from(2 * k - 1);
        let next = -term * (mu - odd * odd) / (f64::from(k) * 8.0 * x);
        if next.abs() >= term.abs() || next == 0.0 {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}
