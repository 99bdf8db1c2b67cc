mod common;

use bdg_lab::constants::{proved_constants, sharp_constants, sharp_roots, DEFAULT_TOL};
use bdg_lab::Parity;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use common::double_factorial_odd;

#[test]
fn sandwich_up_to_ten() {
    for n in 2..=10 {
        let r = proved_constants(n, DEFAULT_TOL).unwrap();
        assert!(r.c1_proved > 0.0 && r.c1_sharp > 0.0);
        assert!(r.c1_proved <= r.c2_proved && r.c1_sharp <= r.c2_sharp);
        assert!(r.c1_proved <= r.c1_sharp + 1e-9, "n={n}: {r:?}");
        assert!(r.c2_sharp <= r.c2_proved + 1e-9, "n={n}: {r:?}");
        assert_eq!(r.parity, Parity::of(n));
    }
}

#[test]
fn order_two_proved_equals_sharp() {
    let r = proved_constants(2, DEFAULT_TOL).unwrap();
    assert!((r.c1_proved - r.c1_sharp).abs() <= 1e-9);
    assert!((r.c2_proved - r.c2_sharp).abs() <= 1e-9);
}

#[test]
fn gaussian_moments_lie_between_sharp_constants() {
    for n in 2..=10u32 {
        let (c1, c2) = sharp_roots(n, DEFAULT_TOL).unwrap();
        let df = BigInt::from(double_factorial_odd(n as u64));
        let df = num_rational::BigRational::from_integer(df);
        // exact comparison against the outward enclosure endpoints
        assert!(num_traits::pow(c1.lo.clone(), 2 * n as usize) <= df, "n={n}");
        assert!(num_traits::pow(c2.hi.clone(), 2 * n as usize) >= df, "n={n}");
        let (s1, s2) = sharp_constants(n, DEFAULT_TOL).unwrap();
        let dff = df.to_f64().unwrap();
        assert!(s1 <= dff && dff <= s2);
    }
}

#[test]
fn upper_sharp_constant_grows() {
    let c2: Vec<f64> = (2..=10).map(|n| sharp_constants(n, DEFAULT_TOL).unwrap().1).collect();
    assert!(c2.windows(2).all(|w| w[0] < w[1]), "{c2:?}");
}

#[test]
fn order_three_against_bisection() {
    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a).signum() == f(m).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
    let r = proved_constants(3, DEFAULT_TOL).unwrap();
    let d2 = bisect(|z| z * z * z - 15.0 * z * z - 15.0, 15.0, 16.0);
    assert!((r.d2 - d2).abs() < 1e-10);
    assert!((r.c2_proved / d2.powi(3) - 1.0).abs() < 1e-10);
    let d1 = bisect(|z| z * z * z / 720.0 + z / 16.0 - 1.0 / 48.0, 0.0, 1.0);
    assert!((r.d1 - d1).abs() < 1e-10);
    assert!((r.c1_proved / d1.powi(3) - 1.0).abs() < 1e-9);
    // He6 = y^6 - 15y^4 + 45y^2 - 15, cubic in u = y^2
    let u = bisect(|u| u * u * u - 15.0 * u * u + 45.0 * u - 15.0, 9.0, 12.0);
    assert!((r.c2_sharp / u.powi(3) - 1.0).abs() < 1e-10);
    assert!((u.sqrt() - 3.324_257).abs() < 1e-6);
}
