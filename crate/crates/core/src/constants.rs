//! Per-order moment inequalities and the constants they imply.
//!
//! For `n` even the identity `E rho_{2n} = 0`, after dropping the even-index
//! middle terms and applying Hölder, becomes
//! `a_0 z^n + a_n <= sum_{j odd} a_j z^{n-j}` in the moment ratio `z`.
//! For `n` odd the upper bound keeps `a_0 z^n <= sum_{j odd} a_j z^{n-j}`
//! and the lower bound keeps `sum_{j even, j < n} a_j z^{n-j} >= a_n`.
//! Sharp constants are `l^{2n}` and `r^{2n}` for the extreme positive roots
//! `l`, `r` of `H_{2n}(1, y)`.

use num_traits::Zero;
use serde::Serialize;

use crate::cert::{
    lemma2_interval, lemma3_bound_poly, smallest_and_largest_positive_roots, CertifiedInterval,
    EvenClassPoly, OddClassPoly,
};
use crate::error::{Error, Result};
use crate::hermite::hermite_coeffs;
use crate::poly::{to_f64, ExactRational, RationalPoly};

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u32) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Proved and sharp constants for one order `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsResult {
    pub n: u32,
    pub parity: Parity,
    pub d1: f64,
    pub d2: f64,
    #[serde(rename = "C1_proved")]
    pub c1_proved: f64,
    #[serde(rename = "C2_proved")]
    pub c2_proved: f64,
    #[serde(rename = "C1_sharp")]
    pub c1_sharp: f64,
    #[serde(rename = "C2_sharp")]
    pub c2_sharp: f64,
    pub tol: f64,
}

/// Right side of the odd-order upper inequality `lead * z^degree <= rhs(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OddUpperInequality {
    pub lead: ExactRational,
    pub degree: usize,
    pub rhs: RationalPoly,
}

fn require_order(n: u32, parity: Option<Parity>) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidOrder { n, reason: "moment inequalities start at n = 2" });
    }
    match parity {
        Some(Parity::Even) if n % 2 == 1 => Err(Error::InvalidOrder { n, reason: "n must be even" }),
        Some(Parity::Odd) if n % 2 == 0 => Err(Error::InvalidOrder { n, reason: "n must be odd" }),
        _ => Ok(()),
    }
}

pub fn even_inequality(n: u32) -> Result<(EvenClassPoly, OddClassPoly)> {
    require_order(n, Some(Parity::Even))?;
    let h = hermite_coeffs(n)?;
    let n = n as usize;
    let mut b = vec![ExactRational::zero(); n / 2 + 1];
    b[0] = h.coeff(n).clone();
    b[n / 2] = h.coeff(0).clone();
    // a_j z^(n-j) with n - j = 2i + 1
    let mut c = vec![ExactRational::zero(); n / 2];
    for j in (1..n).step_by(2) {
        c[(n - j - 1) / 2] = h.coeff(j).clone();
    }
    Ok((EvenClassPoly::new(b)?, OddClassPoly::new(c)?))
}

pub fn odd_upper_inequality(n: u32) -> Result<OddUpperInequality> {
    require_order(n, Some(Parity::Odd))?;
    let h = hermite_coeffs(n)?;
    let n = n as usize;
    let mut rhs = vec![ExactRational::zero(); n];
    for j in (1..=n).step_by(2) {
        rhs[n - j] = h.coeff(j).clone();
    }
    Ok(OddUpperInequality { lead: h.coeff(0).clone(), degree: n, rhs: RationalPoly::new(rhs) })
}

/// `(P, a_n)` with `P(z) = sum_{j even, j < n} a_j z^{n-j}`.
pub fn odd_lower_inequality(n: u32) -> Result<(RationalPoly, ExactRational)> {
    require_order(n, Some(Parity::Odd))?;
    let h = hermite_coeffs(n)?;
    let n = n as usize;
    let mut p = vec![ExactRational::zero(); n + 1];
    for j in (0..n).step_by(2) {
        p[n - j] = h.coeff(j).clone();
    }
    Ok((RationalPoly::new(p), h.coeff(n).clone()))
}

fn pow_f64(x: &ExactRational, n: u32) -> f64 {
    to_f64(&num_traits::pow(x.clone(), n as usize))
}

/// Outward-rounded sharp constants `(l^{2n}, r^{2n})`.
pub fn sharp_constants(n: u32, tol: f64) -> Result<(f64, f64)> {
    let (l, r) = sharp_roots(n, tol)?;
    Ok((pow_f64(&l.lo, 2 * n), pow_f64(&r.hi, 2 * n)))
}

/// Enclosures of the smallest and largest positive roots of `H_{2n}(1, y)`.
pub fn sharp_roots(n: u32, tol: f64) -> Result<(CertifiedInterval, CertifiedInterval)> {
    let h = hermite_coeffs(n)?;
    smallest_and_largest_positive_roots(&h.univariate_restriction(), tol)
}

/// Runs the constant derivation for order `n`.
///
/// `d1` and `d2` are the outer endpoints of the certified enclosures, so the
/// proved constants are valid as stated; the n-th powers are taken exactly
/// and rounded once.
pub fn proved_constants(n: u32, tol: f64) -> Result<BoundsResult> {
    require_order(n, None)?;
    let (d1, d2) = match Parity::of(n) {
        Parity::Even => {
            let (p1, p2) = even_inequality(n)?;
            let iv = lemma2_interval(&p1, &p2, tol)?;
            if iv.is_empty() {
                return Err(Error::Precondition(format!("empty feasible set for n = {n}")));
            }
            (iv.lo, iv.hi)
        }
        Parity::Odd => {
            let upper = odd_upper_inequality(n)?;
            let hi = lemma3_bound_poly(&upper.lead, upper.degree, &upper.rhs, tol)?.hi;
            let (p, threshold) = odd_lower_inequality(n)?;
            let shifted = &p - &RationalPoly::constant(threshold);
            let (root, largest) = smallest_and_largest_positive_roots(&shifted, tol)?;
            // P is increasing on [0, inf), so the positive root is unique.
            if root != largest {
                return Err(Error::Precondition(format!(
                    "lower-bound polynomial has several positive roots for n = {n}"
                )));
            }
            (root.lo, hi)
        }
    };
    let (c1_sharp, c2_sharp) = sharp_constants(n, tol)?;
    Ok(BoundsResult {
        n,
        parity: Parity::of(n),
        d1: to_f64(&d1),
        d2: to_f64(&d2),
        c1_proved: pow_f64(&d1, n),
        c2_proved: pow_f64(&d2, n),
        c1_sharp,
        c2_sharp,
        tol,
    })
}
