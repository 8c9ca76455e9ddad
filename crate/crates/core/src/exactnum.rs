//! Exact arithmetic in the multi-quadratic field Q(√d : d squarefree).
//!
//! A [`RealElement`] is a finite Q-linear combination of square roots of
//! squarefree positive integers, stored as a map `radicand -> coefficient`
//! with radicand `1` standing for the rational part. Zero coefficients are
//! never stored, so the empty map is zero and equality of maps is equality
//! of real numbers.
//!
//! That last claim rests on the classical theorem that the square roots of
//! distinct squarefree positive integers are linearly independent over Q.
//! It is taken as an axiom here and not re-proven.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
}

/// Writes `n = s² · m` with `m` squarefree. `n` must be at least 1.
pub fn normalize_radicand(n: u64) -> (u64, u64) {
    assert!(n >= 1, "radicand must be positive");
    let mut rest = n;
    let mut square_part = 1u64;
    let mut free_part = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        let mut e = 0u32;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            square_part *= p.pow(e / 2);
            if e % 2 == 1 {
                free_part *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    free_part *= rest;
    (square_part, free_part)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// √a · √b = g · √(a'b') for squarefree a, b with g = gcd(a, b).
fn surd_product(a: u64, b: u64) -> (u64, u64) {
    let g = gcd_u64(a, b);
    let rad = (a / g)
        .checked_mul(b / g)
        .expect("radicand overflow in surd product");
    (g, rad)
}

/// An exact real number in the multi-quadratic field.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RealElement {
    terms: BTreeMap<u64, Rational>,
}

impl RealElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Self { terms }
    }

    /// `√n` for any positive integer, normalized to `s·√m`.
    pub fn sqrt(n: u64) -> Self {
        let (s, m) = normalize_radicand(n);
        Self::surd(Rational::from_integer(BigInt::from(s)), m)
    }

    /// `coeff · √radicand`. The radicand is normalized first, so any
    /// positive integer is accepted.
    pub fn surd(coeff: Rational, radicand: u64) -> Self {
        let (s, m) = normalize_radicand(radicand);
        let mut terms = BTreeMap::new();
        let c = coeff * Rational::from_integer(BigInt::from(s));
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    /// Builds an element from `(radicand, coefficient)` pairs; radicands are
    /// normalized and like terms combined.
    pub fn from_terms<I: IntoIterator<Item = (u64, Rational)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (rad, c) in terms {
            out = out + Self::surd(c, rad);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&1).is_some_and(|c| c.is_one())
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&r| r == 1)
    }

    /// The rational part (coefficient of radicand 1).
    pub fn rational_part(&self) -> Rational {
        self.coefficient(1)
    }

    /// Coefficient of `√radicand`; `radicand` must already be squarefree.
    pub fn coefficient(&self, radicand: u64) -> Rational {
        self.terms
            .get(&radicand)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Returns the value as a rational if it has no surd part.
    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.rational_part())
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> + '_ {
        self.terms.iter().map(|(&r, c)| (r, c))
    }

    /// Radicands with nonzero coefficient, including 1 when present.
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.keys().copied()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&r, c)| (r, c * q)).collect(),
        }
    }

    /// Coefficient vector over an explicit radicand list.
    pub fn coefficients_over(&self, radicands: &[u64]) -> Vec<Rational> {
        radicands.iter().map(|&r| self.coefficient(r)).collect()
    }

    /// Multiplicative inverse.
    ///
    /// Works in the subalgebra spanned by √m for m ranging over squarefree
    /// products of the primes dividing some radicand of `self`. That algebra
    /// has dimension 2^|P|; multiplication by `self` is a Q-linear map on it
    /// and the inverse is the solution of `self · x = 1`.
    pub fn inverse(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(q.recip()));
        }
        if self.terms.len() == 1 {
            // (c√m)⁻¹ = √m / (c·m)
            let (&m, c) = self.terms.iter().next().unwrap();
            let denom = c * Rational::from_integer(BigInt::from(m));
            return Ok(Self::surd(denom.recip(), m));
        }

        let primes: Vec<u64> = self
            .terms
            .keys()
            .flat_map(|&r| prime_factors(r))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let dim = 1usize << primes.len();
        let basis: Vec<u64> = (0..dim)
            .map(|mask| {
                primes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &p)| p)
                    .product()
            })
            .collect();
        let index: BTreeMap<u64, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();

        // Column c holds the coordinates of self·√basis[c].
        let mut system = vec![vec![Rational::zero(); dim + 1]; dim];
        for (c, &b) in basis.iter().enumerate() {
            for (&r, coeff) in &self.terms {
                let (g, rad) = surd_product(r, b);
                let row = index[&rad];
                system[row][c] += coeff * Rational::from_integer(BigInt::from(g));
            }
        }
        system[index[&1]][dim] = Rational::one();

        let solution = solve_dense_rational(system).ok_or(ExactError::DivisionByZero)?;
        Ok(Self::from_terms(basis.into_iter().zip(solution)))
    }

    /// Decimal approximation with `|value − self| < 10^(−digits)`.
    pub fn eval_float(&self, digits: u32) -> Approximation {
        assert!(digits >= 1, "digits must be at least 1");
        if self.is_zero() {
            return Approximation {
                mantissa: BigInt::zero(),
                digits,
            };
        }
        // Each term is evaluated with error < 2 units in the last guard place.
        let guard = digits + 4 + (self.terms.len() as u32).ilog10() + 1;
        let scale = BigInt::from(10u32).pow(guard);
        let mut acc = BigInt::zero();
        for (&m, c) in &self.terms {
            let p = c.numer();
            let q = c.denom();
            let radicand = BigInt::from(m) * p * p * &scale * &scale;
            let root = radicand.sqrt();
            let mut term = root.div_floor(q);
            if p.sign() == Sign::Minus {
                term = -term;
            }
            acc += term;
        }
        let shift = BigInt::from(10u32).pow(guard - digits);
        let (quot, rem) = acc.div_mod_floor(&shift);
        let mantissa = if rem * 2 >= shift { quot + 1 } else { quot };
        Approximation { mantissa, digits }
    }

    /// Nearest-ish `f64`; accurate to well within an ulp for moderate values.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.eval_float(20).to_f64()
    }
}

/// Fixed-point decimal `mantissa · 10^(−digits)`, carrying the error bound
/// `10^(−digits)` of the evaluation that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub mantissa: BigInt,
    pub digits: u32,
}

impl Approximation {
    pub fn error_bound(&self) -> f64 {
        10f64.powi(-(self.digits as i32))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_string().parse().expect("decimal rendering parses")
    }
}

impl fmt::Display for Approximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.digits as usize;
        let abs = self.mantissa.abs().to_string();
        let padded = format!("{:0>width$}", abs, width = digits + 1);
        let (int, frac) = padded.split_at(padded.len() - digits);
        let sign = if self.mantissa.is_negative() { "-" } else { "" };
        write!(f, "{sign}{int}.{frac}")
    }
}

/// Gauss-Jordan on an augmented square system; `None` when singular.
fn solve_dense_rational(mut a: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

impl fmt::Display for RealElement {
    /// Renders in the expression grammar accepted by [`crate::realparse::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            match (m, mag.is_one()) {
                (1, _) => write!(f, "{}", fmt_rational(&mag))?,
                (_, true) => write!(f, "sqrt({m})")?,
                (_, false) => write!(f, "{}*sqrt({m})", fmt_rational(&mag))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RealElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealElement({self})")
    }
}

/// `a` or `a/b`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl<'a> Add<&'a RealElement> for &'a RealElement {
    type Output = RealElement;

    fn add(self, rhs: &'a RealElement) -> RealElement {
        let mut terms = self.terms.clone();
        for (&r, c) in &rhs.terms {
            let entry = terms.entry(r).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(&r);
            }
        }
        RealElement { terms }
    }
}

impl Add for RealElement {
    type Output = RealElement;

    fn add(self, rhs: RealElement) -> RealElement {
        &self + &rhs
    }
}

impl<'a> Sub<&'a RealElement> for &'a RealElement {
    type Output = RealElement;

    fn sub(self, rhs: &'a RealElement) -> RealElement {
        self + &(-rhs)
    }
}

impl Sub for RealElement {
    type Output = RealElement;

    fn sub(self, rhs: RealElement) -> RealElement {
        &self - &rhs
    }
}

impl Neg for &RealElement {
    type Output = RealElement;

    fn neg(self) -> RealElement {
        RealElement {
            terms: self.terms.iter().map(|(&r, c)| (r, -c)).collect(),
        }
    }
}

impl Neg for RealElement {
    type Output = RealElement;

    fn neg(self) -> RealElement {
        -&self
    }
}

impl<'a> Mul<&'a RealElement> for &'a RealElement {
    type Output = RealElement;

    fn mul(self, rhs: &'a RealElement) -> RealElement {
        let mut terms: BTreeMap<u64, Rational> = BTreeMap::new();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &rhs.terms {
                let (g, rad) = surd_product(a, b);
                let c = ca * cb * Rational::from_integer(BigInt::from(g));
                *terms.entry(rad).or_insert_with(Rational::zero) += c;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        RealElement { terms }
    }
}

impl Mul for RealElement {
    type Output = RealElement;

    fn mul(self, rhs: RealElement) -> RealElement {
        &self * &rhs
    }
}

impl From<i64> for RealElement {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<Rational> for RealElement {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

/// Shorthand for `n/d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
