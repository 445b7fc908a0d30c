//! Wigner rotation matrices, spherical harmonics and Legendre polynomials.

use num_complex::Complex;

use crate::Real;

fn binomial(n: i32, k: i32) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut v = 1.0f64;
    for i in 0..k {
        v = v * f64::from(n - i) / f64::from(i + 1);
    }
    v.round()
}

/// Jacobi polynomial `P_n^(a,b)(x)` by upward recurrence.
fn jacobi<T: Real>(n: i32, a: i32, b: i32, x: T) -> T {
    let c = |v: i32| T::from_i32(v).unwrap();
    let two = c(2);
    let p0 = T::one();
    if n == 0 {
        return p0;
    }
    let mut prev = p0;
    let mut cur = c(a + 1) + c(a + b + 2) * (x - T::one()) / two;
    for k in 2..=n {
        let s = 2 * k + a + b;
        let lhs = c(2 * k) * c(k + a + b) * c(s - 2);
        let next = (c(s - 1) * (c(s) * c(s - 2) * x + c(a * a - b * b)) * cur
            - two * c(k + a - 1) * c(k + b - 1) * c(s) * prev)
            / lhs;
        prev = cur;
        cur = next;
    }
    cur
}

/// Reduced rotation matrix `d^j_{m'm}(beta)` with doubled `j`, `m'`, `m`,
/// through Jacobi polynomials.
///
/// Arguments are assumed valid (`|m| <= j`, matching parity).
pub fn small_d<T: Real>(j: i32, mp: i32, m: i32, beta: T) -> T {
    let cases = [
        ((j + m) / 2, mp - m, true),
        ((j - m) / 2, m - mp, false),
        ((j + mp) / 2, m - mp, false),
        ((j - mp) / 2, mp - m, true),
    ];
    let (k, a2, phased) = cases.into_iter().min_by_key(|c| c.0).unwrap();
    let a = a2 / 2;
    let b = j - 2 * k - a;
    let pref = (binomial(j - k, k + a) / binomial(k + b, b)).sqrt();
    let sign = if phased && a.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let half = beta / T::from_f64(2.0).unwrap();
    let (sin, cos) = half.sin_cos();
    T::from_f64(sign * pref).unwrap() * sin.powi(a) * cos.powi(b) * jacobi(k, a, b, beta.cos())
}

/// Rotation matrix element `D^j_{m'm}(alpha, beta, gamma)` in the z-y-z
/// convention, `exp(-i m' alpha) d^j_{m'm}(beta) exp(-i m gamma)`.
pub fn wigner_d<T: Real>(j: i32, mp: i32, m: i32, alpha: T, beta: T, gamma: T) -> Complex<T> {
    let half = T::from_f64(0.5).unwrap();
    let phase = -(T::from_i32(mp).unwrap() * half * alpha + T::from_i32(m).unwrap() * half * gamma);
    Complex::from_polar(small_d(j, mp, m, beta), phase)
}

/// `Y_{KN}(theta, phi)` for integer rank given doubled `k`, `n`; Condon-Shortley phase.
pub fn spherical_y<T: Real>(k: i32, n: i32, theta: T, phi: T) -> Complex<T> {
    let norm = (T::from_i32(k + 1).unwrap() / (T::from_f64(4.0).unwrap() * T::PI())).sqrt();
    let half = T::from_f64(0.5).unwrap();
    Complex::from_polar(norm * small_d(k, n, 0, theta), T::from_i32(n).unwrap() * half * phi)
}

/// Legendre polynomial by upward recurrence.
pub fn legendre_p<T: Real>(k: u32, x: T) -> T {
    if k == 0 {
        return T::one();
    }
    let (mut p0, mut p1) = (T::one(), x);
    for n in 1..k {
        let nf = T::from_u32(n).unwrap();
        let p2 = ((nf + nf + T::one()) * x * p1 - nf * p0) / (nf + T::one());
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}
