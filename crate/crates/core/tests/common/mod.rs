#![allow(dead_code)]

use bdg_lab::poly::{int, ExactRational};
use bdg_lab::{EvenClassPoly, OddClassPoly, RationalPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_integer_poly(rng: &mut ChaCha8Rng, max_degree: usize, max_coeff: i64) -> Vec<i64> {
    let degree = rng.random_range(1..=max_degree);
    let mut c: Vec<i64> = (0..=degree).map(|_| rng.random_range(-max_coeff..=max_coeff)).collect();
    while c[degree] == 0 {
        c[degree] = rng.random_range(-max_coeff..=max_coeff);
    }
    c
}

/// Random squarefree integer polynomials, rejection-sampled.
pub fn random_squarefree(rng: &mut ChaCha8Rng, count: usize, max_degree: usize, max_coeff: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    while out.len() < count {
        let c = random_integer_poly(rng, max_degree, max_coeff);
        if RationalPoly::from_integers(&c).is_squarefree() {
            out.push(c);
        }
    }
    out
}

fn exact_sign(c: &[i64], x: f64) -> i32 {
    let x = BigRational::from_float(x).unwrap();
    let v = c.iter().rev().fold(BigRational::zero(), |acc, &a| acc * &x + BigRational::from_integer(BigInt::from(a)));
    v.cmp(&BigRational::zero()) as i32
}

/// Sign of `p(x)`; falls back to exact arithmetic when the floating-point
/// value is within its rounding-error bound of zero.
fn sign_at(c: &[i64], x: f64) -> i32 {
    let (mut v, mut mag) = (0.0f64, 0.0f64);
    for &a in c.iter().rev() {
        v = v * x + a as f64;
        mag = mag * x.abs() + (a as f64).abs();
    }
    let err = 4.0 * c.len() as f64 * f64::EPSILON * mag;
    if v.abs() > err {
        if v > 0.0 {
            1
        } else {
            -1
        }
    } else {
        exact_sign(c, x)
    }
}

/// Independent root-count oracle: scans `[lo, hi]` at resolution `step`,
/// counting strict sign changes and exact zeros (endpoint refinement by
/// exact evaluation at every grid point that is numerically ambiguous).
/// Counts roots in `(lo, hi]`.
pub fn sign_scan_count(c: &[i64], lo: f64, hi: f64, step: f64) -> usize {
    let cells = ((hi - lo) / step).round() as i64;
    let mut count = 0;
    let mut prev = sign_at(c, lo);
    for i in 1..=cells {
        let x = lo + (hi - lo) * i as f64 / cells as f64;
        let s = sign_at(c, x);
        if s == 0 {
            count += 1;
        } else if prev != 0 && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

pub fn small_rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> ExactRational {
    BigRational::new(BigInt::from(rng.random_range(0..=max_num)), BigInt::from(rng.random_range(1..=max_den)))
}

pub fn positive_rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> ExactRational {
    BigRational::new(BigInt::from(rng.random_range(1..=max_num)), BigInt::from(rng.random_range(1..=max_den)))
}

/// A random pair of even-class and odd-class polynomials. Right sides are
/// scaled up so that both empty and nonempty feasible sets occur.
pub fn random_class_pair(rng: &mut ChaCha8Rng) -> (EvenClassPoly, OddClassPoly) {
    let top = rng.random_range(1..=4usize);
    let mut b: Vec<ExactRational> = (0..=top).map(|_| small_rational(rng, 9, 9)).collect();
    b[0] = positive_rational(rng, 9, 9);
    b[top] = positive_rational(rng, 9, 9);
    let odd_top = rng.random_range(0..top);
    let scale = int(rng.random_range(1..=30));
    let c: Vec<ExactRational> = (0..=odd_top).map(|_| small_rational(rng, 9, 9) * &scale).collect();
    (EvenClassPoly::new(b).unwrap(), OddClassPoly::new(c).unwrap())
}

/// Probabilists' Hermite polynomial via `He_{k+1} = y He_k - k He_{k-1}`.
pub fn probabilists_hermite(degree: usize) -> RationalPoly {
    let x = RationalPoly::from_integers(&[0, 1]);
    let mut prev = RationalPoly::from_integers(&[1]);
    if degree == 0 {
        return prev;
    }
    let mut cur = x.clone();
    for k in 1..degree {
        let next = &(&x * &cur) - &prev.scale(&int(k as i64));
        prev = cur;
        cur = next;
    }
    cur
}

pub fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::from(1), |acc, i| acc * i)
}

pub fn double_factorial_odd(n: u64) -> BigInt {
    // (2n-1)!!
    (1..=n).fold(BigInt::from(1), |acc, i| acc * (2 * i - 1))
}
