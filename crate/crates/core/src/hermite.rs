//! Bivariate Hermite polynomials
//!
//! `H_{2n}(x, y) = sum_{k=0}^{n} (-1)^k a_k x^k y^{2n-2k}` with
//! `a_k = 1 / (2^k k! (2n-2k)!)`. Composed with the pair
//! (quadratic variation, stochastic integral) this is a martingale with zero
//! mean. At `x = 1` it is the probabilists' `He_{2n}(y) / (2n)!`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{to_f64, ExactRational, RationalPoly};

pub const MAX_ORDER: u32 = 64;

/// Exact coefficients `a_0..=a_n` of `H_{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteCoeffs {
    n: u32,
    a: Vec<ExactRational>,
    // Floating-point images of `a`, converted once here.
    a_f64: Vec<f64>,
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// Coefficients of `H_{2n}` for `1 <= n <= 64`.
pub fn hermite_coeffs(n: u32) -> Result<HermiteCoeffs> {
    if n == 0 {
        return Err(Error::InvalidOrder { n, reason: "the statistic is constant for n = 0" });
    }
    if n > MAX_ORDER {
        return Err(Error::InvalidOrder { n, reason: "n must not exceed 64" });
    }
    let a: Vec<ExactRational> = (0..=n)
        .map(|k| {
            let den = (BigInt::one() << k) * factorial(k) * factorial(2 * n - 2 * k);
            BigRational::new(BigInt::one(), den)
        })
        .collect();
    let a_f64 = a.iter().map(to_f64).collect();
    Ok(HermiteCoeffs { n, a, a_f64 })
}

impl HermiteCoeffs {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.a
    }

    pub fn coeff(&self, k: usize) -> &ExactRational {
        &self.a[k]
    }

    /// `H_{2n}(x, y)` in floating point, Horner in `u = y^2`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let u = y * y;
        let n = self.n as usize;
        let mut acc = self.a_f64[0];
        let mut x_pow = 1.0;
        for k in 1..=n {
            x_pow *= x;
            let term = self.a_f64[k] * x_pow;
            acc = acc * u + if k % 2 == 0 { term } else { -term };
        }
        acc
    }

    /// Exact evaluation, used as a reference for the floating-point path.
    pub fn eval_exact(&self, x: &ExactRational, y: &ExactRational) -> ExactRational {
        let u = y * y;
        let mut acc = self.a[0].clone();
        let mut x_pow = ExactRational::one();
        for (k, a) in self.a.iter().enumerate().skip(1) {
            x_pow *= x;
            let term = a * &x_pow;
            acc = acc * &u + if k % 2 == 0 { term } else { -term };
        }
        acc
    }

    /// `y -> H_{2n}(1, y)`, degree `2n`, exact.
    pub fn univariate_restriction(&self) -> RationalPoly {
        let n = self.n as usize;
        let mut coeffs = vec![ExactRational::from_integer(0.into()); 2 * n + 1];
        for (k, a) in self.a.iter().enumerate() {
            coeffs[2 * n - 2 * k] = if k % 2 == 0 { a.clone() } else { -a };
        }
        RationalPoly::new(coeffs)
    }

    /// One sample of the martingale statistic `rho_{2n} = H_{2n}(qv, si)`.
    pub fn rho_sample(&self, qv: f64, si: f64) -> Result<f64> {
        if !(qv >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "quadratic variation sample must be nonnegative, got {qv}"
            )));
        }
        Ok(self.eval(qv, si))
    }
}

/// Free-function form of [`HermiteCoeffs::eval`].
pub fn eval_bivariate(h: &HermiteCoeffs, x: f64, y: f64) -> f64 {
    h.eval(x, y)
}

pub fn univariate_restriction(h: &HermiteCoeffs) -> RationalPoly {
    h.univariate_restriction()
}

pub fn rho_sample(h: &HermiteCoeffs, qv: f64, si: f64) -> Result<f64> {
    h.rho_sample(qv, si)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    #[test]
    fn coefficients_small_orders() {
        assert_eq!(hermite_coeffs(1).unwrap().coeffs(), &[rat(1, 2), rat(1, 2)]);
        assert_eq!(hermite_coeffs(2).unwrap().coeffs(), &[rat(1, 24), rat(1, 4), rat(1, 8)]);
        assert_eq!(
            hermite_coeffs(3).unwrap().coeffs(),
            &[rat(1, 720), rat(1, 48), rat(1, 16), rat(1, 48)]
        );
    }

    #[test]
    fn order_validation() {
        assert!(matches!(hermite_coeffs(0), Err(Error::InvalidOrder { n: 0, .. })));
        assert!(hermite_coeffs(64).is_ok());
        assert!(hermite_coeffs(65).is_err());
    }

    #[test]
    fn bivariate_values() {
        let h1 = hermite_coeffs(1).unwrap();
        assert_eq!(h1.eval(1.0, 1.0), 0.0);
        let h2 = hermite_coeffs(2).unwrap();
        assert_eq!(h2.eval(1.0, 0.0), 0.125);
        // 16/24 - 4/4 + 1/8 = -5/24
        assert_eq!(h2.eval_exact(&int(1), &int(2)), rat(-5, 24));
        assert!((h2.eval(1.0, 2.0) + 5.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn restriction_small_orders() {
        let p1 = hermite_coeffs(1).unwrap().univariate_restriction();
        assert_eq!(p1, RationalPoly::new(vec![rat(-1, 2), int(0), rat(1, 2)]));
        let p2 = hermite_coeffs(2).unwrap().univariate_restriction();
        assert_eq!(p2.scale(&int(24)), RationalPoly::from_integers(&[3, 0, -6, 0, 1]));
    }

    #[test]
    fn rho_samples() {
        let h1 = hermite_coeffs(1).unwrap();
        let (t, w) = (0.7, -1.3);
        assert!((h1.rho_sample(t, w).unwrap() - (w * w - t) / 2.0).abs() < 1e-15);
        assert_eq!(h1.rho_sample(0.0, 0.0).unwrap(), 0.0);
        let h2 = hermite_coeffs(2).unwrap();
        assert!((h2.rho_sample(1.0, 2.0).unwrap() + 5.0 / 24.0).abs() < 1e-15);
        assert!(matches!(h2.rho_sample(-1e-3, 0.0), Err(Error::InvalidInput(_))));
        assert!(h2.rho_sample(f64::NAN, 0.0).is_err());
    }
}
