//! Racah sums for 3j and 6j symbols in exact integer arithmetic.
//!
//! Every factorial is held as a vector of prime exponents. The alternating sum
//! is done in `BigInt` after dividing out the common prime content, so there is
//! no cancellation until the single final conversion to `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::LazyLock;

/// Largest factorial argument supported by the prime table.
pub(crate) const MAX_FACTORIAL: i64 = 8192;

static PRIMES: LazyLock<Vec<u32>> = LazyLock::new(|| sieve(MAX_FACTORIAL as usize));

fn sieve(n: usize) -> Vec<u32> {
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut k = i * i;
        while k <= n {
            composite[k] = true;
            k += i;
        }
    }
    out
}

/// Prime-exponent representation of a rational built from factorials.
#[derive(Clone, Debug)]
struct Factored(Vec<i64>);

impl Factored {
    fn unit(len: usize) -> Self {
        Factored(vec![0; len])
    }

    /// Multiplies by `(n!)^power`.
    fn factorial(&mut self, n: i64, power: i64) {
        debug_assert!(n >= 0);
        for (e, &p) in self.0.iter_mut().zip(PRIMES.iter()) {
            let p = p as i64;
            if p > n {
                break;
            }
            let mut q = n;
            let mut acc = 0;
            while q > 0 {
                q /= p;
                acc += q;
            }
            *e += power * acc;
        }
    }

    fn delta(&mut self, a: i64, b: i64, c: i64) {
        // arguments are doubled angular momenta
        self.factorial((a + b - c) / 2, 1);
        self.factorial((a - b + c) / 2, 1);
        self.factorial((-a + b + c) / 2, 1);
        self.factorial((a + b + c) / 2 + 1, -1);
    }
}

fn prime_len(max_arg: i64) -> usize {
    assert!(max_arg <= MAX_FACTORIAL, "factorial argument {max_arg} exceeds supported range");
    PRIMES.partition_point(|&p| (p as i64) <= max_arg).max(1)
}

fn pow_big(p: u32, e: i64) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Evaluates `sqrt(radicand) * sum_t sign_t * term_t` and rounds once to f64.
fn evaluate(radicand: &Factored, terms: &[(bool, Factored)]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let len = radicand.0.len();
    let mut base = terms[0].1 .0.clone();
    for (_, t) in &terms[1..] {
        for (b, &e) in base.iter_mut().zip(t.0.iter()) {
            *b = (*b).min(e);
        }
    }
    let mut sum = BigInt::zero();
    for (negative, t) in terms {
        let mut v = BigInt::one();
        for i in 0..len {
            let e = t.0[i] - base[i];
            if e > 0 {
                v *= pow_big(PRIMES[i], e);
            }
        }
        if *negative {
            sum -= v;
        } else {
            sum += v;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let negative = sum.is_negative();
    // value^2 = sum^2 * prod p^(2 base + radicand)
    let mut num = sum.abs();
    num = &num * &num;
    let mut den = BigInt::one();
    for i in 0..len {
        let e = 2 * base[i] + radicand.0[i];
        if e > 0 {
            num *= pow_big(PRIMES[i], e);
        } else if e < 0 {
            den *= pow_big(PRIMES[i], -e);
        }
    }
    let square = BigRational::new(num, den).to_f64().expect("finite square of a bounded symbol");
    let v = square.sqrt();
    if negative {
        -v
    } else {
        v
    }
}

/// Exact Wigner 3j symbol with doubled arguments. Selection rules must
/// already hold.
pub(crate) fn three_j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    let max_arg = (j1 + j2 + j3) / 2 + 1;
    let len = prime_len(max_arg);
    let mut rad = Factored::unit(len);
    rad.delta(j1, j2, j3);
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        rad.factorial((j + m) / 2, 1);
        rad.factorial((j - m) / 2, 1);
    }
    let a1 = (j3 - j2 + m1) / 2;
    let a2 = (j3 - j1 - m2) / 2;
    let b1 = (j1 + j2 - j3) / 2;
    let b2 = (j1 - m1) / 2;
    let b3 = (j2 + m2) / 2;
    let tmin = 0.max(-a1).max(-a2);
    let tmax = b1.min(b2).min(b3);
    let mut terms = Vec::new();
    for t in tmin..=tmax {
        let mut f = Factored::unit(len);
        for n in [t, a1 + t, a2 + t, b1 - t, b2 - t, b3 - t] {
            f.factorial(n, -1);
        }
        terms.push((t % 2 != 0, f));
    }
    let v = evaluate(&rad, &terms);
    if ((j1 - j2 - m3) / 2).rem_euclid(2) == 1 {
        -v
    } else {
        v
    }
}

/// Exact Wigner 6j symbol with doubled arguments. Triangle rules must
/// already hold.
pub(crate) fn six_j(j1: i64, j2: i64, j3: i64, j4: i64, j5: i64, j6: i64) -> f64 {
    let a = [(j1 + j2 + j3) / 2, (j1 + j5 + j6) / 2, (j4 + j2 + j6) / 2, (j4 + j5 + j3) / 2];
    let b = [(j1 + j2 + j4 + j5) / 2, (j2 + j3 + j5 + j6) / 2, (j3 + j1 + j6 + j4) / 2];
    let tmin = *a.iter().max().unwrap();
    let tmax = *b.iter().min().unwrap();
    let len = prime_len(tmax + 1);
    let mut rad = Factored::unit(len);
    rad.delta(j1, j2, j3);
    rad.delta(j1, j5, j6);
    rad.delta(j4, j2, j6);
    rad.delta(j4, j5, j3);
    let mut terms = Vec::new();
    for t in tmin..=tmax {
        let mut f = Factored::unit(len);
        f.factorial(t + 1, 1);
        for &ai in &a {
            f.factorial(t - ai, -1);
        }
        for &bi in &b {
            f.factorial(bi - t, -1);
        }
        terms.push((t % 2 != 0, f));
    }
    evaluate(&rad, &terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_is_correct_for_small_range() {
        assert_eq!(&sieve(30), &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn factorial_exponents() {
        let mut f = Factored::unit(prime_len(10));
        f.factorial(10, 1);
        // 10! = 2^8 3^4 5^2 7
        assert_eq!(&f.0[..4], &[8, 4, 2, 1]);
    }

    #[test]
    fn three_j_known_value() {
        let v = three_j(2, 2, 4, 2, -2, 0);
        assert!((v - 1.0 / 30f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn six_j_known_value() {
        assert!((six_j(2, 2, 2, 2, 2, 2) - 1.0 / 6.0).abs() < 1e-15);
    }
}
