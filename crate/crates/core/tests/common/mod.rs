//! Reference implementations that share no code with the library.

#![allow(dead_code)]

/// `J_0(x), J_1(x), J_2(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j012(x: f64) -> [f64; 3] {
    let x = x.abs();
    if x == 0.0 {
        return [1.0, 0.0, 0.0];
    }
    if x < 1e-3 {
        let q = x * x / 4.0;
        return [1.0 - q + q * q / 4.0, x / 2.0 * (1.0 - q / 2.0 + q * q / 12.0), q / 2.0 * (1.0 - q / 3.0)];
    }
    let start = 2 * ((x as usize + 40 + (20.0 * x.sqrt()) as usize) / 2);
    let (mut next, mut cur) = (0.0_f64, 1e-300_f64);
    let mut low = [0.0; 3];
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // `cur` now holds J_{k-1}.
        let order = k - 1;
        if order < 3 {
            low[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            for v in low.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += low[0];
    [low[0] / norm, low[1] / norm, low[2] / norm]
}

pub fn j0(x: f64) -> f64 {
    bessel_j012(x)[0]
}

pub fn j1(x: f64) -> f64 {
    bessel_j012(x)[1]
}

/// `e^{-x} I_0(x)` and `e^{-x} I_1(x)` from the ascending series; all terms
/// positive, so accurate wherever `I(x)` itself is representable.
pub fn scaled_i01(x: f64) -> (f64, f64) {
    let q = x * x / 4.0;
    let (mut t0, mut s0) = (1.0_f64, 1.0_f64);
    let (mut t1, mut s1) = (x / 2.0, x / 2.0);
    for k in 1..2000 {
        let k = k as f64;
        t0 *= q / (k * k);
        t1 *= q / (k * (k + 1.0));
        s0 += t0;
        s1 += t1;
        if t0 < 1e-18 * s0 && t1 < 1e-18 * s1.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let e = (-x).exp();
    (s0 * e, s1 * e)
}

/// Root of `f` in `[a, b]` by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || b - a < 1e-16 * m.abs() {
            return m;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}
