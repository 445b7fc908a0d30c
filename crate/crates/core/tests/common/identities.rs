//! Symbol identities and tensor sum rules as worst-residual functions. All
//! angular momenta are doubled.

use num_complex::Complex64;
use polarkit::angular::{
    clebsch_gordan, gauss_legendre, nine_j, six_j, spherical_y, three_j, triangle, AngularMomentum, Direction,
};
use polarkit::tensors::{
    integrated_harmonic, photon_tensor, state_tensor, summed_spin_tensor, unpolarized_photon_tensor,
    StateMultipoleIndex,
};
use rand::Rng;

use super::rng;

pub fn fact(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn sign(n: i32) -> f64 {
    if n.rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Racah's single-sum formula in plain floating point; fine for small arguments.
pub fn racah_3j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    if m1 + m2 + m3 != 0 || !triangle(j1, j2, j3) || m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j3 + m3) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i32| x / 2;
    let delta = fact(h(j1 + j2 - j3)) * fact(h(j1 - j2 + j3)) * fact(h(-j1 + j2 + j3)) / fact(h(j1 + j2 + j3) + 1);
    let pre = (delta
        * fact(h(j1 + m1))
        * fact(h(j1 - m1))
        * fact(h(j2 + m2))
        * fact(h(j2 - m2))
        * fact(h(j3 + m3))
        * fact(h(j3 - m3)))
    .sqrt();
    let lo = 0.max(h(j2 - j3 - m1)).max(h(j1 - j3 + m2));
    let hi = h(j1 + j2 - j3).min(h(j1 - m1)).min(h(j2 + m2));
    let mut s = 0.0;
    for t in lo..=hi {
        s += sign(t)
            / (fact(t)
                * fact(h(j3 - j2 + m1) + t)
                * fact(h(j3 - j1 - m2) + t)
                * fact(h(j1 + j2 - j3) - t)
                * fact(h(j1 - m1) - t)
                * fact(h(j2 + m2) - t));
    }
    sign(h(j1 - j2 - m3)) * pre * s
}

/// 9j from its definition as a sum over all projections of six 3j symbols.
#[allow(clippy::too_many_arguments)]
pub fn nine_j_by_projections(a: i32, b: i32, c: i32, d: i32, e: i32, f: i32, g: i32, h: i32, i: i32) -> f64 {
    let ms = |j: i32| (-j..=j).step_by(2);
    let mut s = 0.0;
    for ma in ms(a) {
        for mb in ms(b) {
            let mc = -(ma + mb);
            if mc.abs() > c {
                continue;
            }
            for md in ms(d) {
                for me in ms(e) {
                    let mf = -(md + me);
                    if mf.abs() > f {
                        continue;
                    }
                    let mg = -(ma + md);
                    let mh = -(mb + me);
                    let mi = -(mc + mf);
                    if mg.abs() > g || mh.abs() > h || mi.abs() > i || mg + mh + mi != 0 {
                        continue;
                    }
                    s += three_j(a, b, c, ma, mb, mc)
                        * three_j(d, e, f, md, me, mf)
                        * three_j(g, h, i, mg, mh, mi)
                        * three_j(a, d, g, ma, md, mg)
                        * three_j(b, e, h, mb, me, mh)
                        * three_j(c, f, i, mc, mf, mi);
                }
            }
        }
    }
    s
}

pub fn biedenharn_elliott(args: [i32; 9]) -> (f64, f64) {
    let [a, b, c, d, e, f, p, q, r] = args;
    let total = a + b + c + d + e + f + p + q + r;
    let lo = (a - b).abs().max((c - d).abs()).max((e - f).abs());
    let hi = (a + b).min(c + d).min(e + f);
    let mut lhs = 0.0;
    let mut x = lo;
    while x <= hi {
        lhs += sign((total + x) / 2)
            * f64::from(x + 1)
            * six_j(a, b, x, c, d, p)
            * six_j(c, d, x, e, f, q)
            * six_j(e, f, x, b, a, r);
        x += 2;
    }
    (lhs, six_j(p, q, r, e, a, d) * six_j(p, q, r, f, b, c))
}

/// `ln n!` by direct summation.
pub fn ln_fact(n: i32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// Worst residual of `sum_{m1 m2} (2j3+1) 3j 3j' = delta` for `j1, j2 <= max`.
pub fn three_j_orthogonality_residual(max: i32) -> f64 {
    let mut worst = 0.0f64;
    for j1 in 0..=max {
        for j2 in 0..=max {
            for j3 in (j1 - j2).abs()..=(j1 + j2) {
                if !triangle(j1, j2, j3) {
                    continue;
                }
                for j3p in (j1 - j2).abs()..=(j1 + j2) {
                    if !triangle(j1, j2, j3p) {
                        continue;
                    }
                    for m3 in (-j3..=j3).step_by(2) {
                        for m3p in (-j3p..=j3p).step_by(2) {
                            let mut s = 0.0;
                            for m1 in (-j1..=j1).step_by(2) {
                                for m2 in (-j2..=j2).step_by(2) {
                                    s += three_j(j1, j2, j3, m1, m2, m3) * three_j(j1, j2, j3p, m1, m2, m3p);
                                }
                            }
                            let expect = if j3 == j3p && m3 == m3p { 1.0 } else { 0.0 };
                            worst = worst.max((f64::from(j3 + 1) * s - expect).abs());
                        }
                    }
                }
            }
        }
    }
    worst
}

/// Worst Biedenharn-Elliott residual over every admissible set of arguments
/// `<= max`, with the number of sets checked.
pub fn biedenharn_elliott_residual(max: i32) -> (f64, usize) {
    let range = 0..=max;
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for a in range.clone() {
        for d in range.clone() {
            for p in range.clone() {
                if !triangle(a, d, p) {
                    continue;
                }
                for c in range.clone() {
                    for b in range.clone() {
                        if !triangle(c, b, p) {
                            continue;
                        }
                        for e in range.clone() {
                            for r in range.clone() {
                                if !triangle(e, a, r) {
                                    continue;
                                }
                                for f in range.clone() {
                                    if !triangle(b, f, r) {
                                        continue;
                                    }
                                    for q in range.clone() {
                                        if !triangle(c, f, q) || !triangle(e, d, q) {
                                            continue;
                                        }
                                        if (a + b) % 2 != (c + d) % 2 || (c + d) % 2 != (e + f) % 2 {
                                            continue;
                                        }
                                        let (l, rr) = biedenharn_elliott([a, b, c, d, e, f, p, q, r]);
                                        worst = worst.max((l - rr).abs());
                                        checked += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (worst, checked)
}

/// Worst difference between the 6j-contraction 9j and its projection-sum
/// definition over `count` random admissible argument sets `<= max`.
pub fn nine_j_residual(max: i32, count: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < count {
        let v: [i32; 9] = std::array::from_fn(|_| rng.gen_range(0..=max));
        let [a, b, c, d, e, f, g, h, i] = v;
        let rows = [(a, b, c), (d, e, f), (g, h, i), (a, d, g), (b, e, h), (c, f, i)];
        if !rows.iter().all(|&(x, y, z)| triangle(x, y, z)) {
            continue;
        }
        worst = worst.max((nine_j_by_projections(a, b, c, d, e, f, g, h, i) - nine_j(a, b, c, d, e, f, g, h, i)).abs());
        checked += 1;
    }
    worst
}

/// Relative error of `(j j j; 0 0 0)` against its factorial closed form.
pub fn three_j_closed_form_error(two_j: i32) -> f64 {
    let j = two_j / 2;
    let v = three_j(two_j, two_j, two_j, 0, 0, 0);
    if (3 * j) % 2 == 1 {
        return v.abs();
    }
    let g = 3 * j / 2;
    let ln = 0.5 * (3.0 * ln_fact(2 * g - 2 * j) - ln_fact(2 * g + 1)) + ln_fact(g) - 3.0 * ln_fact(g - j);
    let expect = sign(g) * ln.exp();
    (v - expect).abs() / expect.abs()
}

/// Symbols with `2j = 200` are finite and bounded by one.
pub fn large_symbols_finite() -> bool {
    [
        three_j(200, 200, 200, 0, 0, 0),
        six_j(200, 200, 200, 200, 200, 200),
        six_j(199, 200, 201, 200, 199, 1),
        nine_j(200, 200, 200, 200, 200, 200, 200, 200, 200),
        clebsch_gordan(199, 1, 200, -2, 199, -1),
    ]
    .iter()
    .all(|s| s.is_finite() && s.abs() < 1.0)
}

fn am(x: i32) -> AngularMomentum {
    AngularMomentum::from_twice(x)
}

/// Worst residual of `sum_M T^K_N(J,J,M | axis) = delta_K0 delta_N0` over
/// `2J <= 20`, `K <= 20`.
pub fn projection_sum_residual(axis: &Direction) -> f64 {
    let mut worst = 0.0f64;
    for two_j in 0..=20 {
        for k in 0..=20 {
            for n in -k..=k {
                let idx = StateMultipoleIndex::from_ints(k, n).unwrap();
                let mut s = Complex64::new(0.0, 0.0);
                for m in am(two_j).projections() {
                    s += state_tensor(am(two_j), am(two_j), m, idx, axis).unwrap();
                }
                let expect = summed_spin_tensor::<f64>(idx);
                worst = worst.max((s - expect).norm());
            }
        }
    }
    worst
}

/// Worst deviation of the 64-point Gauss-Legendre integral of `Y_KN` (with a
/// uniform 64-point azimuthal rule) from the closed form, `K <= 20`.
pub fn harmonic_integral_residual() -> f64 {
    let nodes = gauss_legendre(64);
    let nphi = 64;
    let mut worst = 0.0f64;
    for k in 0..=20 {
        for n in -k..=k {
            let mut s = Complex64::new(0.0, 0.0);
            for &(x, w) in &nodes {
                let theta = x.acos();
                for i in 0..nphi {
                    let phi = std::f64::consts::TAU * i as f64 / nphi as f64;
                    s += spherical_y(2 * k, 2 * n, theta, phi) * w * (std::f64::consts::TAU / nphi as f64);
                }
            }
            let idx = StateMultipoleIndex::from_ints(k, n).unwrap();
            worst = worst.max((s - integrated_harmonic::<f64>(idx)).norm());
        }
    }
    worst
}

/// Worst deviation of the unpolarized dipole tensor from the explicit average
/// of the two helicities, all `(K, N)` with `K <= 2`.
pub fn helicity_average_residual(beam: &Direction) -> f64 {
    let one = am(2);
    let mut worst = 0.0f64;
    for k in 0..=2 {
        for n in -k..=k {
            let idx = StateMultipoleIndex::from_ints(k, n).unwrap();
            // the photon tensor is starred; the average is over the unstarred one
            let plus = photon_tensor(one, one, am(2), idx, beam).unwrap().conj();
            let minus = photon_tensor(one, one, am(-2), idx, beam).unwrap().conj();
            let avg = (plus + minus) * 0.5;
            worst = worst.max((unpolarized_photon_tensor(idx, beam) - avg).norm());
        }
    }
    worst
}
