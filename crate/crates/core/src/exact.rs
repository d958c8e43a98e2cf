//! Exact arithmetic in real quadratic fields `Q(√d)`.
//!
//! Every state family in this crate has matrix entries that are either
//! rational (decimal inputs, the ξ family, the proposition state) or live in a
//! single quadratic extension (the GHZ/W family, whose off-diagonal entries
//! involve `√((a²−1)(9a²−1))`). [`QuadraticNumber`] covers both cases with one
//! type: a value `r + c·√d` with rational `r`, `c` and a square-free-ish
//! positive integer radicand `d`. Purely rational values carry `c = 0`.
//!
//! Decimal rendering is exact up to the final rounding step, so values can be
//! printed to any number of significant digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact element of `Q(√d)`.
#[derive(Clone, Debug)]
pub struct QuadraticNumber {
    rational: BigRational,
    surd: BigRational,
    // zero whenever `surd` is zero
    radicand: BigInt,
}

impl QuadraticNumber {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        QuadraticNumber {
            rational: r,
            surd: BigRational::zero(),
            radicand: BigInt::zero(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact square root of a non-negative rational.
    pub fn sqrt_rational(value: &BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::domain("square root of a negative number"));
        }
        if value.is_zero() {
            return Ok(Self::zero());
        }
        // √(n/m) = √(n·m)/m
        let n = value.numer();
        let m = value.denom();
        let (outer, inner) = split_square(&(n * m));
        let coeff = BigRational::new(outer, m.clone());
        if inner.is_one() {
            return Ok(Self::from_rational(coeff));
        }
        Ok(QuadraticNumber {
            rational: BigRational::zero(),
            surd: coeff,
            radicand: inner,
        })
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    /// The value as a rational number, if it has no surd component.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.surd.is_zero().then_some(&self.rational)
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    /// Whether `self` and `other` can be combined (they share a quadratic field).
    pub fn compatible(&self, other: &Self) -> bool {
        self.surd.is_zero()
            || other.surd.is_zero()
            || self.radicand == other.radicand
            || is_perfect_square(&(&self.radicand * &other.radicand))
    }

    /// Rewrites `other` over `self`'s radicand (or vice versa) so the two can
    /// be combined term by term. Returns `(radicand, self_surd, other_surd)`.
    fn align(&self, other: &Self) -> (BigInt, BigRational, BigRational) {
        if self.surd.is_zero() {
            return (
                other.radicand.clone(),
                self.surd.clone(),
                other.surd.clone(),
            );
        }
        if other.surd.is_zero() || self.radicand == other.radicand {
            return (self.radicand.clone(), self.surd.clone(), other.surd.clone());
        }
        let product = &self.radicand * &other.radicand;
        assert!(
            is_perfect_square(&product),
            "quadratic numbers from different fields: √{} and √{}",
            self.radicand,
            other.radicand
        );
        // √d₂ = (√(d₁d₂)/d₁)·√d₁
        let scale = BigRational::new(product.sqrt(), self.radicand.clone());
        (
            self.radicand.clone(),
            self.surd.clone(),
            &other.surd * scale,
        )
    }

    fn normalized(rational: BigRational, surd: BigRational, radicand: BigInt) -> Self {
        if surd.is_zero() {
            Self::from_rational(rational)
        } else {
            QuadraticNumber {
                rational,
                surd,
                radicand,
            }
        }
    }

    /// `r − c√d`.
    pub fn conjugate(&self) -> Self {
        QuadraticNumber {
            rational: self.rational.clone(),
            surd: -&self.surd,
            radicand: self.radicand.clone(),
        }
    }

    /// Field norm `r² − c²d`.
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - &self.surd * &self.surd * BigRational::from_integer(self.radicand.clone())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        let n = self.norm();
        let c = self.conjugate();
        QuadraticNumber::normalized(&c.rational / &n, &c.surd / &n, c.radicand)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let rs = sign_of(&self.rational);
        let cs = sign_of(&self.surd);
        if cs == 0 {
            return rs;
        }
        if rs == 0 || rs == cs {
            return cs;
        }
        // opposite signs: compare r² with c²d; equality would make √d rational
        let r2 = &self.rational * &self.rational;
        let c2d = &self.surd * &self.surd * BigRational::from_integer(self.radicand.clone());
        if r2 > c2d {
            rs
        } else {
            cs
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// `floor(|self| · 10^shift)` computed exactly.
    fn scaled_floor(&self, shift: i64) -> BigInt {
        let v = self.abs();
        let ten = BigInt::from(10u32);
        let (mut a, mut b) = (v.rational.numer().clone(), v.rational.denom().clone());
        let (mut p, mut q) = (v.surd.numer().clone(), v.surd.denom().clone());
        if shift >= 0 {
            let f = num_traits::pow(ten, shift as usize);
            a *= &f;
            p *= &f;
        } else {
            let f = num_traits::pow(ten, (-shift) as usize);
            b *= &f;
            q *= &f;
        }
        // (a/b) + (p/q)√d = (a·q + p·b·√d) / (b·q)
        let numer_rational = &a * &q;
        let surd_coeff = &p * &b;
        let denom = &b * &q;
        let floor_surd = if surd_coeff.is_zero() {
            BigInt::zero()
        } else {
            let square = &surd_coeff * &surd_coeff * &v.radicand;
            let root = square.sqrt();
            if surd_coeff.is_positive() {
                root
            } else if &root * &root == square {
                -root
            } else {
                -root - 1
            }
        };
        (numer_rational + floor_surd).div_floor(&denom)
    }

    /// Renders the value with `significant` significant digits. Trailing
    /// fractional zeros are dropped, so exact integers print without a point.
    pub fn to_decimal(&self, significant: usize) -> String {
        let significant = significant.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let negative = self.signum() < 0;
        let guard = 4usize;
        let estimate = self.rough_log10();
        let mut shift = significant as i64 + guard as i64 - 1 - estimate;
        let mut digits;
        loop {
            digits = self.scaled_floor(shift).to_string();
            let want = significant + guard;
            if digits.len() >= want {
                break;
            }
            shift += (want - digits.len()) as i64;
        }
        let len = digits.len();
        let (head, tail) = digits.split_at(significant);
        let mut mantissa: Vec<u8> = head.bytes().map(|c| c - b'0').collect();
        // exponent of the last kept digit
        let mut last_exp = (len - significant) as i64 - shift;
        if tail.as_bytes()[0] >= b'5' {
            let mut i = mantissa.len();
            loop {
                if i == 0 {
                    mantissa.insert(0, 1);
                    mantissa.pop();
                    last_exp += 1;
                    break;
                }
                i -= 1;
                if mantissa[i] == 9 {
                    mantissa[i] = 0;
                } else {
                    mantissa[i] += 1;
                    break;
                }
            }
        }
        let lead_exp = last_exp + significant as i64 - 1;
        let body = format_digits(&mantissa, lead_exp);
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }

    fn rough_log10(&self) -> i64 {
        let r = self.rational.to_f64().unwrap_or(0.0);
        let c = self.surd.to_f64().unwrap_or(0.0);
        let d = self.radicand.to_f64().unwrap_or(0.0);
        let approx = (r + c * d.sqrt()).abs();
        if approx.is_finite() && approx > 0.0 {
            approx.log10().floor() as i64
        } else {
            0
        }
    }

    /// Correctly rounded (to within one ulp) double-precision value.
    pub fn to_f64(&self) -> f64 {
        self.to_decimal(21)
            .parse()
            .expect("decimal rendering parses")
    }
}

fn format_digits(mantissa: &[u8], lead_exp: i64) -> String {
    let digits: String = mantissa.iter().map(|d| char::from(b'0' + d)).collect();
    let n = digits.len() as i64;
    let trim = |s: String| -> String {
        if s.contains('.') {
            let t = s.trim_end_matches('0').trim_end_matches('.');
            t.to_string()
        } else {
            s
        }
    };
    if !(-7..40).contains(&lead_exp) {
        let (first, rest) = digits.split_at(1);
        let frac = rest.trim_end_matches('0');
        let sign = if lead_exp < 0 { '-' } else { '+' };
        return if frac.is_empty() {
            format!("{first}e{sign}{}", lead_exp.abs())
        } else {
            format!("{first}.{frac}e{sign}{}", lead_exp.abs())
        };
    }
    if lead_exp < 0 {
        let zeros = "0".repeat((-lead_exp - 1) as usize);
        return trim(format!("0.{zeros}{digits}"));
    }
    let int_len = lead_exp + 1;
    if int_len >= n {
        let zeros = "0".repeat((int_len - n) as usize);
        format!("{digits}{zeros}")
    } else {
        let (i, f) = digits.split_at(int_len as usize);
        trim(format!("{i}.{f}"))
    }
}

fn sign_of(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Splits `n = outer² · inner`, removing square factors of small primes and
/// any exact square cofactor.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    if is_perfect_square(n) {
        return (n.sqrt(), BigInt::one());
    }
    let mut outer = BigInt::one();
    let mut inner = n.clone();
    let mut p = 2u32;
    while p < 2000 {
        let p2 = BigInt::from(p * p);
        while (&inner % &p2).is_zero() {
            inner /= &p2;
            outer *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if is_perfect_square(&inner) {
        outer *= inner.sqrt();
        inner = BigInt::one();
    }
    (outer, inner)
}

impl PartialEq for QuadraticNumber {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Eq for QuadraticNumber {}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + {}·√{}", self.rational, self.surd, self.radicand)
        }
    }
}

impl From<BigRational> for QuadraticNumber {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl<'a> Add<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn add(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        let (d, s1, s2) = self.align(rhs);
        QuadraticNumber::normalized(&self.rational + &rhs.rational, s1 + s2, d)
    }
}

impl<'a> Sub<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn sub(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        let (d, s1, s2) = self.align(rhs);
        QuadraticNumber::normalized(&self.rational - &rhs.rational, s1 - s2, d)
    }
}

impl<'a> Mul<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn mul(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        let (d, s1, s2) = self.align(rhs);
        let dr = BigRational::from_integer(d.clone());
        let rational = &self.rational * &rhs.rational + &s1 * &s2 * dr;
        let surd = &self.rational * &s2 + &rhs.rational * &s1;
        QuadraticNumber::normalized(rational, surd, d)
    }
}

impl<'a> Div<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        self * &rhs.recip()
    }
}

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber {
            rational: -&self.rational,
            surd: -&self.surd,
            radicand: self.radicand.clone(),
        }
    }
}

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: QuadraticNumber) -> QuadraticNumber {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: &QuadraticNumber) -> QuadraticNumber {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<QuadraticNumber> for &'a QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: QuadraticNumber) -> QuadraticNumber {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

/// Parses decimal text (`-12.5`, `3e-4`, `0.999`) into an exact rational.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::Format(format!("not a decimal number: {text:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let exp: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], exp)
        }
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 4000 {
        return Err(bad());
    }
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// The exact rational whose decimal text is the shortest representation that
/// round-trips `x` (so `0.999` becomes `999/1000`, not a dyadic neighbour).
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::domain(format!("non-finite value {x}")));
    }
    parse_decimal(&format!("{x:e}"))
}

/// Renders a double with 17 significant digits, the round-trip width.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `C(2n, n)` for `n = 0..=n_max`, via `C(2n+2, n+1) = C(2n, n)·(4n+2)/(n+1)`.
pub fn central_binomials(n_max: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = BigInt::one();
    out.push(c.clone());
    for n in 0..n_max {
        c = c * BigInt::from(4 * n + 2) / BigInt::from(n + 1);
        out.push(c.clone());
    }
    out
}

/// A 3×3 matrix over `Q(√d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix3(pub [[QuadraticNumber; 3]; 3]);

impl ExactMatrix3 {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> QuadraticNumber) -> Self {
        ExactMatrix3(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| {
            if i == j {
                QuadraticNumber::one()
            } else {
                QuadraticNumber::zero()
            }
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &QuadraticNumber {
        &self.0[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.0[i][j] == self.0[j][i]))
    }

    fn minor2(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> QuadraticNumber {
        &self.0[r0][c0] * &self.0[r1][c1] - &self.0[r0][c1] * &self.0[r1][c0]
    }

    pub fn determinant(&self) -> QuadraticNumber {
        let m = &self.0;
        &m[0][0] * self.minor2(1, 2, 1, 2) - &m[0][1] * self.minor2(1, 2, 0, 2)
            + &m[0][2] * self.minor2(1, 2, 0, 1)
    }

    /// Leading principal minors of sizes 1, 2, 3.
    pub fn leading_minors(&self) -> [QuadraticNumber; 3] {
        [
            self.0[0][0].clone(),
            self.minor2(0, 1, 0, 1),
            self.determinant(),
        ]
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det.is_zero() {
            return None;
        }
        let inv_det = det.recip();
        // adjugate: cofactor transpose
        let cof = |i: usize, j: usize| -> QuadraticNumber {
            let rows: Vec<usize> = (0..3).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
            let m = self.minor2(rows[0], rows[1], cols[0], cols[1]);
            if (i + j).is_multiple_of(2) {
                m
            } else {
                -m
            }
        };
        Some(Self::from_fn(|i, j| &cof(j, i) * &inv_det))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_fn(|i, j| {
            (0..3).fold(QuadraticNumber::zero(), |acc, k| {
                acc + &self.0[i][k] * &other.0[k][j]
            })
        })
    }

    /// `vᵀ M v` for an integer vector.
    pub fn quadratic_form(&self, v: [i64; 3]) -> QuadraticNumber {
        let mut acc = QuadraticNumber::zero();
        for i in 0..3 {
            for j in 0..3 {
                let w = v[i] * v[j];
                if w != 0 {
                    acc = acc + &self.0[i][j] * &QuadraticNumber::from_integer(w);
                }
            }
        }
        acc
    }

    pub fn to_f64(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].to_f64()))
    }
}
