//! Certified real-root counting and isolation.
//!
//! Every decision is made in exact rational arithmetic: root counts come
//! from Sturm sign variations, bisection runs on dyadic rationals, and
//! interval endpoints are never roots of the polynomial being isolated.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{dyadic_at_most, int, pow2, to_f64, ExactRational, IntegerPoly, RationalPoly};

/// Exponents `k` of the outward endpoint nudges `2^-k` tried by
/// [`count_roots_in`] when an endpoint is a root.
const NUDGE_EXPONENTS: std::ops::RangeInclusive<i32> = 20..=60;

#[derive(Clone, Debug)]
pub struct SturmChain {
    polys: Vec<RationalPoly>,
    ints: Vec<IntegerPoly>,
}

/// Canonical Sturm sequence `p, p', -rem(p, p'), ...`.
pub fn sturm_chain(p: &RationalPoly) -> Result<Vec<RationalPoly>> {
    Ok(SturmChain::new(p)?.polys)
}

fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut last = Ordering::Equal;
    let mut count = 0;
    for s in signs.filter(|s| *s != Ordering::Equal) {
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

impl SturmChain {
    pub fn new(p: &RationalPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut polys = vec![p.clone()];
        let d = p.derivative();
        if !d.is_zero() {
            polys.push(d);
            loop {
                let n = polys.len();
                let (_, r) = polys[n - 2].div_rem(&polys[n - 1]);
                if r.is_zero() {
                    break;
                }
                polys.push(-&r);
            }
        }
        let ints = polys.iter().map(IntegerPoly::new).collect();
        Ok(SturmChain { polys, ints })
    }

    pub fn polys(&self) -> &[RationalPoly] {
        &self.polys
    }

    /// Integer form of the first element, the polynomial itself.
    fn head(&self) -> &IntegerPoly {
        &self.ints[0]
    }

    pub fn variations_at(&self, x: &ExactRational) -> usize {
        variations(self.ints.iter().map(|q| q.sign_at(x)))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        variations(self.polys.iter().map(RationalPoly::sign_at_neg_inf))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        variations(self.polys.iter().map(RationalPoly::sign_at_pos_inf))
    }

    /// Distinct real roots overall.
    pub fn total(&self) -> usize {
        self.variations_at_neg_inf() - self.variations_at_pos_inf()
    }

    /// Distinct roots in `(a, b]`; `a` and `b` must not be roots.
    fn between(&self, a: &ExactRational, b: &ExactRational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }

    /// Root counts strictly below `lo`, in `[lo, hi]`, strictly above `hi`,
    /// for endpoints that are not roots.
    fn counts(&self, lo: &ExactRational, hi: &ExactRational) -> RootCounts {
        let (vl, vh) = (self.variations_at(lo), self.variations_at(hi));
        RootCounts {
            below: self.variations_at_neg_inf() - vl,
            inside: vl - vh,
            above: vh - self.variations_at_pos_inf(),
        }
    }
}

/// Number of distinct real roots of `p` in `(a, b]`.
///
/// An endpoint that is itself a root is moved outward by `2^-k` for
/// `k = 20, 21, ..., 60` until it is not; the count is then taken on the
/// widened interval.
pub fn count_roots_in(p: &RationalPoly, a: &ExactRational, b: &ExactRational) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if a >= b {
        return Err(Error::Precondition(format!("empty interval ({a}, {b}]")));
    }
    let chain = SturmChain::new(p)?;
    let a = nudge(p, a, Ordering::Less)?;
    let b = nudge(p, b, Ordering::Greater)?;
    Ok(chain.between(&a, &b))
}

fn nudge(p: &RationalPoly, x: &ExactRational, direction: Ordering) -> Result<ExactRational> {
    if !p.eval(x).is_zero() {
        return Ok(x.clone());
    }
    for k in NUDGE_EXPONENTS {
        let step = pow2(-k);
        let y = if direction == Ordering::Less { x - step } else { x + step };
        if !p.eval(&y).is_zero() {
            return Ok(y);
        }
    }
    Err(Error::EndpointRoot {
        point: x.to_string(),
        attempts: NUDGE_EXPONENTS.count() as u32,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalStatus {
    Empty,
    Nonempty,
}

/// Distinct-root counts backing a [`CertifiedInterval`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RootCounts {
    pub below: usize,
    pub inside: usize,
    pub above: usize,
}

/// Dyadic enclosure whose root claims are backed by exact Sturm counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedInterval {
    pub lo: ExactRational,
    pub hi: ExactRational,
    pub status: IntervalStatus,
    pub certificate: RootCounts,
}

impl CertifiedInterval {
    fn empty() -> Self {
        CertifiedInterval {
            lo: ExactRational::zero(),
            hi: ExactRational::zero(),
            status: IntervalStatus::Empty,
            certificate: RootCounts::default(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.status == IntervalStatus::Empty
    }

    pub fn width(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn lo_f64(&self) -> f64 {
        to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        to_f64(&self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo_f64() <= x && x <= self.hi_f64()
    }
}

fn parse_tol(tol: f64) -> Result<ExactRational> {
    dyadic_at_most(tol)
        .ok_or_else(|| Error::InvalidInput(format!("tolerance must be finite and positive, got {tol}")))
}

/// Dyadic point in `(a, b)` that is not a root of `p`, preferring the midpoint.
fn split_point(p: &IntegerPoly, a: &ExactRational, b: &ExactRational) -> ExactRational {
    let width = b - a;
    let mid = a + &width / int(2);
    if p.sign_at(&mid) != Ordering::Equal {
        return mid;
    }
    // p has finitely many roots, so some off-center dyadic point works.
    (2..)
        .map(|j| &mid + &width / int(2).pow(j))
        .find(|x| p.sign_at(x) != Ordering::Equal)
        .expect("a nonzero polynomial has finitely many roots")
}

/// Splits `(a, b)` into subintervals holding exactly one root each.
fn isolate_range(
    chain: &SturmChain,
    a: ExactRational,
    b: ExactRational,
) -> Vec<(ExactRational, ExactRational)> {
    let mut out = Vec::new();
    let mut stack = vec![(a, b)];
    while let Some((a, b)) = stack.pop() {
        match chain.between(&a, &b) {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let m = split_point(chain.head(), &a, &b);
                // Right half first so the left half is processed next.
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }
    out
}

/// Shrinks a single-root bracket of a squarefree `p` until it is at most
/// `tol` wide and, if requested, its lower end is positive.
fn refine(
    p: &IntegerPoly,
    mut a: ExactRational,
    mut b: ExactRational,
    tol: &ExactRational,
    require_positive: bool,
) -> (ExactRational, ExactRational) {
    let sign_a = p.sign_at(&a);
    while &(&b - &a) > tol || (require_positive && !a.is_positive()) {
        let m = split_point(p, &a, &b);
        if p.sign_at(&m) == sign_a {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}

fn enclose(
    chain: &SturmChain,
    a: ExactRational,
    b: ExactRational,
    tol: &ExactRational,
    require_positive: bool,
) -> Vec<CertifiedInterval> {
    isolate_range(chain, a, b)
        .into_iter()
        .map(|(a, b)| {
            let (lo, hi) = refine(chain.head(), a, b, tol, require_positive);
            let certificate = chain.counts(&lo, &hi);
            CertifiedInterval { lo, hi, status: IntervalStatus::Nonempty, certificate }
        })
        .collect()
}

/// Disjoint dyadic enclosures, one per real root, ascending, each at most
/// `tol` wide.
pub fn isolate_real_roots(p: &RationalPoly, tol: f64) -> Result<Vec<CertifiedInterval>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let tol = parse_tol(tol)?;
    let g = p.gcd(&p.derivative());
    if g.degree().unwrap_or(0) > 0 {
        return Err(Error::NotSquarefree { gcd: g.to_string() });
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let chain = SturmChain::new(p)?;
    let bound = p.root_bound();
    Ok(enclose(&chain, -&bound, bound, &tol, false))
}

/// `P1(z) = sum_k b[k] z^(2k)` with nonnegative coefficients, `b[0] > 0`
/// and a positive top coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenClassPoly {
    b: Vec<ExactRational>,
}

impl EvenClassPoly {
    pub fn new(b: Vec<ExactRational>) -> Result<Self> {
        if b.len() < 2 {
            return Err(Error::Precondition("even-class polynomial needs a nonconstant top term".into()));
        }
        if b.iter().any(Signed::is_negative) {
            return Err(Error::Precondition("even-class coefficients must be nonnegative".into()));
        }
        if !b[0].is_positive() {
            return Err(Error::Precondition("even-class constant term b_0 must be positive".into()));
        }
        if !b[b.len() - 1].is_positive() {
            return Err(Error::Precondition("even-class top coefficient must be positive".into()));
        }
        Ok(EvenClassPoly { b })
    }

    /// Index of the top coefficient; the degree is twice this.
    pub fn top(&self) -> usize {
        self.b.len() - 1
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.b
    }

    pub fn to_poly(&self) -> RationalPoly {
        let mut coeffs = vec![ExactRational::zero(); 2 * self.top() + 1];
        for (k, b) in self.b.iter().enumerate() {
            coeffs[2 * k] = b.clone();
        }
        RationalPoly::new(coeffs)
    }
}

/// `P2(z) = z * sum_i c[i] z^(2i)` with nonnegative coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct OddClassPoly {
    c: Vec<ExactRational>,
}

impl OddClassPoly {
    pub fn new(c: Vec<ExactRational>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::Precondition("odd-class polynomial needs at least one coefficient".into()));
        }
        if c.iter().any(Signed::is_negative) {
            return Err(Error::Precondition("odd-class coefficients must be nonnegative".into()));
        }
        Ok(OddClassPoly { c })
    }

    pub fn top(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.c
    }

    pub fn to_poly(&self) -> RationalPoly {
        let mut coeffs = vec![ExactRational::zero(); 2 * self.top() + 2];
        for (i, c) in self.c.iter().enumerate() {
            coeffs[2 * i + 1] = c.clone();
        }
        RationalPoly::new(coeffs)
    }
}

/// Tightest certified `[d1, d2]` containing `{z : P1(z) <= P2(z)}`.
///
/// On a nonempty result `0 < lo`, every real root of `P2 - P1` lies in
/// `[lo, hi]` and `P2 - P1 < 0` outside it. The endpoints are within `tol`
/// of the extreme roots. If `P2 - P1` has no real root the set is empty.
pub fn lemma2_interval(p1: &EvenClassPoly, p2: &OddClassPoly, tol: f64) -> Result<CertifiedInterval> {
    if p2.top() >= p1.top() {
        return Err(Error::Precondition(format!(
            "odd-class top index {} must be below even-class top index {}",
            p2.top(),
            p1.top()
        )));
    }
    let tol = parse_tol(tol)?;
    let diff = &p2.to_poly() - &p1.to_poly();
    let sf = diff.squarefree_part();
    let chain = SturmChain::new(&sf)?;
    if chain.total() == 0 {
        return Ok(CertifiedInterval::empty());
    }
    // diff(0) = -b_0 < 0, so 0 is never a root of sf.
    let zero = ExactRational::zero();
    if chain.variations_at_neg_inf() != chain.variations_at(&zero) {
        return Err(Error::Precondition("P2 - P1 has a nonpositive root".into()));
    }
    let roots = enclose(&chain, zero, sf.root_bound(), &tol, true);
    let (first, last) = (&roots[0], &roots[roots.len() - 1]);
    let (lo, hi) = (first.lo.clone(), last.hi.clone());
    let certificate = chain.counts(&lo, &hi);
    debug_assert_eq!((certificate.below, certificate.above), (0, 0));
    Ok(CertifiedInterval { lo, hi, status: IntervalStatus::Nonempty, certificate })
}

/// Certified `d2` with `b0 z^(2m+1) > P2(z)` for every `z > d2`.
pub fn lemma3_bound(b0: &ExactRational, m: usize, p2: &OddClassPoly, tol: f64) -> Result<CertifiedInterval> {
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    if p2.top() >= m {
        return Err(Error::Precondition(format!(
            "odd-class top index {} must be below m = {m}",
            p2.top()
        )));
    }
    if !p2.coeffs()[0].is_positive() || !p2.coeffs()[p2.top()].is_positive() {
        return Err(Error::Precondition("c_0 and the top coefficient must be positive".into()));
    }
    lemma3_bound_poly(b0, 2 * m + 1, &p2.to_poly(), tol)
}

/// Monomial-dominance bound for an arbitrary right side.
///
/// `rhs` may have any exponents as long as its coefficients are nonnegative,
/// it is nonzero, and its degree is below `degree` (odd). `hi` is the upper
/// end of the enclosure of the largest real root of `b0 z^degree - rhs`;
/// `lo` is the lower end of the enclosure of its smallest real root, which
/// may be nonpositive.
pub fn lemma3_bound_poly(
    b0: &ExactRational,
    degree: usize,
    rhs: &RationalPoly,
    tol: f64,
) -> Result<CertifiedInterval> {
    if !b0.is_positive() {
        return Err(Error::Precondition("leading coefficient b_0 must be positive".into()));
    }
    if degree % 2 == 0 {
        return Err(Error::Precondition(format!("monomial degree {degree} must be odd")));
    }
    if rhs.is_zero() {
        return Err(Error::Precondition("right side must not vanish identically".into()));
    }
    if rhs.coeffs().iter().any(Signed::is_negative) {
        return Err(Error::Precondition("right side coefficients must be nonnegative".into()));
    }
    if rhs.degree().unwrap() >= degree {
        return Err(Error::Precondition(format!(
            "right side degree {} must be below {degree}",
            rhs.degree().unwrap()
        )));
    }
    let tol = parse_tol(tol)?;
    let diff = &RationalPoly::monomial(b0.clone(), degree) - rhs;
    let sf = diff.squarefree_part();
    let chain = SturmChain::new(&sf)?;
    let bound = sf.root_bound();
    // Odd degree: at least one real root.
    let roots = enclose(&chain, -&bound, bound, &tol, false);
    let (lo, hi) = (roots[0].lo.clone(), roots[roots.len() - 1].hi.clone());
    let certificate = chain.counts(&lo, &hi);
    Ok(CertifiedInterval { lo, hi, status: IntervalStatus::Nonempty, certificate })
}

/// Enclosures of the smallest and largest positive roots of `p`.
///
/// Counts in the certificates refer to the distinct nonzero real roots.
pub fn smallest_and_largest_positive_roots(
    p: &RationalPoly,
    tol: f64,
) -> Result<(CertifiedInterval, CertifiedInterval)> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let tol = parse_tol(tol)?;
    let mut sf = p.squarefree_part();
    let zero = ExactRational::zero();
    if sf.eval(&zero).is_zero() {
        sf = sf.div_rem(&RationalPoly::monomial(int(1), 1)).0;
    }
    let chain = SturmChain::new(&sf)?;
    if chain.variations_at(&zero) == chain.variations_at_pos_inf() {
        return Err(Error::NoPositiveRoots);
    }
    let roots = enclose(&chain, zero, sf.root_bound(), &tol, true);
    Ok((roots[0].clone(), roots[roots.len() - 1].clone()))
}
