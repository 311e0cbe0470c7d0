//! Exact arithmetic in the cyclotomic field Q(w), w = exp(i*pi/4), w^4 = -1.
//!
//! Elements are stored as `(n0 + n1 w + n2 w^2 + n3 w^3) / d` with a positive
//! common denominator and `gcd(n0, n1, n2, n3, d) = 1`, which is canonical, so
//! structural equality is field equality.  Values that fit in machine words use
//! an `i64` representation; everything else spills to `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small([i64; 4], i64),
    Big(Box<([BigInt; 4], BigInt)>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicNumber {
    repr: Repr,
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

impl AlgebraicNumber {
    pub fn zero() -> Self {
        Self { repr: Repr::Small([0; 4], 1) }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self { repr: Repr::Small([n, 0, 0, 0], 1) }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_i128([n as i128, 0, 0, 0], d as i128)
    }

    pub fn from_coeffs_i64(c: [i64; 4]) -> Self {
        Self { repr: Repr::Small(c, 1) }
    }

    pub fn from_rationals(c: [BigRational; 4]) -> Self {
        let mut d = BigInt::one();
        for q in &c {
            d = d.lcm(q.denom());
        }
        let n = c.map(|q| q.numer() * (&d / q.denom()));
        Self::from_big(n, d)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big([n, BigInt::zero(), BigInt::zero(), BigInt::zero()], BigInt::one())
    }

    /// The primitive 8th root of unity w.
    pub fn zeta() -> Self {
        Self::from_coeffs_i64([0, 1, 0, 0])
    }

    pub fn i() -> Self {
        Self::from_coeffs_i64([0, 0, 1, 0])
    }

    pub fn sqrt2() -> Self {
        Self::from_coeffs_i64([0, 1, 0, -1])
    }

    /// w^k for any integer k.
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut c = [0i64; 4];
        if k < 4 {
            c[k] = 1;
        } else {
            c[k - 4] = -1;
        }
        Self::from_coeffs_i64(c)
    }

    pub fn i_pow(k: i64) -> Self {
        Self::zeta_pow(2 * k)
    }

    fn from_i128(n: [i128; 4], d: i128) -> Self {
        let (mut n, mut d) = (n, d);
        if d < 0 {
            n = n.map(|x| -x);
            d = -d;
        }
        let mut g = d;
        for x in &n {
            g = gcd_i128(g, *x);
        }
        if g > 1 {
            n = n.map(|x| x / g);
            d /= g;
        }
        let fits = |x: i128| x >= i64::MIN as i128 && x <= i64::MAX as i128;
        if n.iter().all(|&x| fits(x)) && fits(d) {
            Self { repr: Repr::Small(n.map(|x| x as i64), d as i64) }
        } else {
            Self::from_big(n.map(BigInt::from), BigInt::from(d))
        }
    }

    fn from_big(n: [BigInt; 4], d: BigInt) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        let (mut n, mut d) = (n, d);
        if d.is_negative() {
            n = n.map(|x| -x);
            d = -d;
        }
        let mut g = d.clone();
        for x in &n {
            g = g.gcd(x);
        }
        if !g.is_one() {
            n = n.map(|x| x / &g);
            d /= &g;
        }
        let small: Option<Vec<i64>> = n.iter().map(|x| x.to_i64()).collect();
        match (small, d.to_i64()) {
            (Some(s), Some(ds)) => Self { repr: Repr::Small([s[0], s[1], s[2], s[3]], ds) },
            _ => Self { repr: Repr::Big(Box::new((n, d))) },
        }
    }

    fn big_parts(&self) -> ([BigInt; 4], BigInt) {
        match &self.repr {
            Repr::Small(n, d) => (n.map(BigInt::from), BigInt::from(*d)),
            Repr::Big(b) => (b.0.clone(), b.1.clone()),
        }
    }

    /// Coefficient of w^k as an exact rational.
    pub fn coeff(&self, k: usize) -> BigRational {
        let (n, d) = self.big_parts();
        BigRational::new(n[k].clone(), d)
    }

    pub fn coeffs(&self) -> [BigRational; 4] {
        [self.coeff(0), self.coeff(1), self.coeff(2), self.coeff(3)]
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Small([0, 0, 0, 0], _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.repr, Repr::Small([1, 0, 0, 0], 1))
    }

    /// Some(q) when the value is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        let c = self.coeffs();
        if c[1].is_zero() && c[2].is_zero() && c[3].is_zero() {
            Some(c[0].clone())
        } else {
            None
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self.repr {
            Repr::Small([n, 0, 0, 0], 1) => Some(n),
            _ => None,
        }
    }

    fn add_impl(&self, o: &Self, negate: bool) -> Self {
        if let (Repr::Small(a, da), Repr::Small(b, db)) = (&self.repr, &o.repr) {
            let mut out = [0i128; 4];
            let (da, db) = (*da as i128, *db as i128);
            let mut ok = true;
            for k in 0..4 {
                let x = (a[k] as i128) * db;
                let y = (b[k] as i128) * da;
                let r = if negate { x.checked_sub(y) } else { x.checked_add(y) };
                match r {
                    Some(v) => out[k] = v,
                    None => ok = false,
                }
            }
            if ok {
                if let Some(d) = da.checked_mul(db) {
                    if da == 1 && db == 1 {
                        return Self::from_i128(out, 1);
                    }
                    return Self::from_i128(out, d);
                }
            }
        }
        let (a, da) = self.big_parts();
        let (b, db) = o.big_parts();
        let n: [BigInt; 4] = std::array::from_fn(|k| {
            let x = &a[k] * &db;
            let y = &b[k] * &da;
            if negate {
                x - y
            } else {
                x + y
            }
        });
        Self::from_big(n, da * db)
    }

    fn mul_impl(&self, o: &Self) -> Self {
        if let (Repr::Small(a, da), Repr::Small(b, db)) = (&self.repr, &o.repr) {
            let mut acc = [0i128; 4];
            let mut ok = true;
            'outer: for i in 0..4 {
                if a[i] == 0 {
                    continue;
                }
                for j in 0..4 {
                    if b[j] == 0 {
                        continue;
                    }
                    let p = (a[i] as i128) * (b[j] as i128);
                    let k = i + j;
                    let r = if k < 4 { acc[k].checked_add(p) } else { acc[k - 4].checked_sub(p) };
                    match r {
                        Some(v) => acc[if k < 4 { k } else { k - 4 }] = v,
                        None => {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
            if ok {
                let d = (*da as i128) * (*db as i128);
                return Self::from_i128(acc, d);
            }
        }
        let (a, da) = self.big_parts();
        let (b, db) = o.big_parts();
        let mut acc: [BigInt; 4] = std::array::from_fn(|_| BigInt::zero());
        for i in 0..4 {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                let p = &a[i] * &b[j];
                let k = i + j;
                if k < 4 {
                    acc[k] += p;
                } else {
                    acc[k - 4] -= p;
                }
            }
        }
        Self::from_big(acc, da * db)
    }

    /// Galois automorphism w -> w^k (k odd).
    pub fn galois(&self, k: i64) -> Self {
        let (n, d) = self.big_parts();
        let mut out: [BigInt; 4] = std::array::from_fn(|_| BigInt::zero());
        for (j, c) in n.iter().enumerate() {
            let e = (j as i64 * k).rem_euclid(8) as usize;
            if e < 4 {
                out[e] += c;
            } else {
                out[e - 4] -= c;
            }
        }
        Self::from_big(out, d)
    }

    /// Complex conjugation, w -> w^7 = -w^3.
    pub fn conj(&self) -> Self {
        self.galois(7)
    }

    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }

    /// Absolute norm to Q (product of all four conjugates).
    pub fn field_norm(&self) -> BigRational {
        let y = self * &self.galois(5);
        (&y * &y.galois(3)).coeff(0)
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        // x * s5(x) lies in Q(i); times its Q(i)-conjugate it is rational.
        let s5 = self.galois(5);
        let y = self * &s5;
        let y3 = y.galois(3);
        let n = (&y * &y3).coeff(0);
        let num = &s5 * &y3;
        let inv_n = Self::from_rationals([n.recip(), BigRational::zero(), BigRational::zero(), BigRational::zero()]);
        Ok(&num * &inv_n)
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power allowing negative exponents (panics on 0^negative).
    pub fn powi(&self, e: i64) -> Self {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inv().expect("negative power of zero").pow((-e) as u64)
        }
    }

    pub fn unit_flags(&self) -> UnitFlags {
        let x2 = self * self;
        let x4 = &x2 * &x2;
        let x8 = &x4 * &x4;
        let one = Self::one();
        let i = Self::i();
        UnitFlags {
            is_zero: self.is_zero(),
            fourth_power_one: x4 == one,
            fourth_power_minus_one: x4 == -&one,
            eighth_power_one: x8 == one,
            square_pm_one: x2 == one || x2 == -&one,
            square_pm_i: x2 == i || x2 == -&i,
        }
    }

    /// Exact square root inside the field, if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        // x = A + B*sqrt2 with A, B in Q(i):
        // c0 = a0, c2 = a1, c1 = b0 + b1, c3 = b1 - b0.
        let c = self.coeffs();
        let two = BigRational::from_integer(2.into());
        let a = Gauss { re: c[0].clone(), im: c[2].clone() };
        let b = Gauss { re: (&c[1] - &c[3]) / &two, im: (&c[1] + &c[3]) / &two };
        let candidates: Vec<(Gauss, Gauss)> = if b.is_zero() {
            let mut v = Vec::new();
            if let Some(s) = a.sqrt() {
                v.push((s, Gauss::zero()));
            }
            if let Some(s) = a.scale(&two.recip()).sqrt() {
                v.push((Gauss::zero(), s));
            }
            v
        } else {
            // (C + D sqrt2)^2 = C^2 + 2D^2 + 2CD sqrt2
            let n = a.mul(&a).sub(&b.mul(&b).scale(&two));
            let mut v = Vec::new();
            if let Some(m) = n.sqrt() {
                for m in [m.clone(), m.neg()] {
                    if let Some(cc) = a.add(&m).scale(&two.recip()).sqrt() {
                        if !cc.is_zero() {
                            let d = b.div(&cc.scale(&two));
                            v.push((cc, d));
                        }
                    }
                }
            }
            v
        };
        for (cc, d) in candidates {
            let w = Self::from_gauss_pair(&cc, &d);
            if &w * &w == *self {
                return Some(w);
            }
        }
        None
    }

    fn from_gauss_pair(a: &Gauss, b: &Gauss) -> Self {
        // A + B sqrt2, sqrt2 = w - w^3
        Self::from_rationals([a.re.clone(), &b.re + &b.im, a.im.clone(), &b.im - &b.re])
    }

    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        Parser { s: text.as_bytes(), pos: 0 }.expr()
    }

    pub fn format(&self) -> String {
        self.to_string()
    }
}

/// Power tests used throughout the case splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitFlags {
    pub is_zero: bool,
    pub fourth_power_one: bool,
    pub fourth_power_minus_one: bool,
    pub eighth_power_one: bool,
    pub square_pm_one: bool,
    pub square_pm_i: bool,
}

#[derive(Clone, Debug, PartialEq)]
struct Gauss {
    re: BigRational,
    im: BigRational,
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl Gauss {
    fn zero() -> Self {
        Gauss { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &Self) -> Self {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn neg(&self) -> Self {
        Gauss { re: -&self.re, im: -&self.im }
    }
    fn mul(&self, o: &Self) -> Self {
        Gauss { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
    fn scale(&self, q: &BigRational) -> Self {
        Gauss { re: &self.re * q, im: &self.im * q }
    }
    fn div(&self, o: &Self) -> Self {
        let n = &o.re * &o.re + &o.im * &o.im;
        let c = Gauss { re: o.re.clone(), im: -&o.im };
        self.mul(&c).scale(&n.recip())
    }
    fn sqrt(&self) -> Option<Self> {
        if self.im.is_zero() {
            if let Some(r) = rational_sqrt(&self.re) {
                return Some(Gauss { re: r, im: BigRational::zero() });
            }
            return rational_sqrt(&-&self.re).map(|r| Gauss { re: BigRational::zero(), im: r });
        }
        let r = rational_sqrt(&(&self.re * &self.re + &self.im * &self.im))?;
        let two = BigRational::from_integer(2.into());
        let s = rational_sqrt(&((&self.re + &r) / &two))?;
        if s.is_zero() {
            return None;
        }
        let t = &self.im / (&two * &s);
        Some(Gauss { re: s, im: t })
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeffs();
        let mut out = String::new();
        for (k, q) in c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let neg = q.is_negative();
            let a = q.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let unit = a.is_one();
            if k == 0 || !unit {
                out.push_str(&a.to_string());
            }
            if k > 0 {
                if !unit {
                    out.push('*');
                }
                out.push('w');
                if k > 1 {
                    out.push_str(&format!("^{k}"));
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, AlgebraError> {
        Err(AlgebraError::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn int(&mut self) -> Result<BigInt, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    fn expr(&mut self) -> Result<AlgebraicNumber, AlgebraError> {
        let mut acc = AlgebraicNumber::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                None if first => return self.err("empty expression"),
                None => break,
                _ if first => 1,
                _ => return self.err("expected '+' or '-'"),
            };
            first = false;
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn generator(&mut self) -> Result<Option<AlgebraicNumber>, AlgebraError> {
        match self.peek() {
            Some(b'i') => {
                self.pos += 1;
                Ok(Some(AlgebraicNumber::i()))
            }
            Some(b'w') => {
                self.pos += 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let e = self.int()?;
                    let e = (e % 8u32).to_i64().unwrap();
                    Ok(Some(AlgebraicNumber::zeta_pow(e)))
                } else {
                    Ok(Some(AlgebraicNumber::zeta()))
                }
            }
            _ => Ok(None),
        }
    }

    fn term(&mut self) -> Result<AlgebraicNumber, AlgebraError> {
        if let Some(g) = self.generator()? {
            return Ok(g);
        }
        let n = self.int()?;
        let mut q = BigRational::from_integer(n);
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.int()?;
            if d.is_zero() {
                return self.err("zero denominator");
            }
            q /= BigRational::from_integer(d);
        }
        let r = AlgebraicNumber::from_rationals([q, BigRational::zero(), BigRational::zero(), BigRational::zero()]);
        if self.peek() == Some(b'*') {
            self.pos += 1;
            match self.generator()? {
                Some(g) => return Ok(&r * &g),
                None => return self.err("expected 'w' or 'i' after '*'"),
            }
        }
        Ok(r)
    }
}

impl std::str::FromStr for AlgebraicNumber {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl From<i64> for AlgebraicNumber {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a AlgebraicNumber> for &'a AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, o: &'a AlgebraicNumber) -> AlgebraicNumber {
                let f: fn(&AlgebraicNumber, &AlgebraicNumber) -> AlgebraicNumber = $body;
                f(self, o)
            }
        }
        impl $tr<AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, o: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, o: &'a AlgebraicNumber) -> AlgebraicNumber {
                (&self).$m(o)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b, false));
forward_binop!(Sub, sub, |a, b| a.add_impl(b, true));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));
forward_binop!(Div, div, |a, b| a.checked_div(b).expect("division by zero"));

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        match &self.repr {
            Repr::Small(n, d) if n.iter().all(|&x| x != i64::MIN) => {
                AlgebraicNumber { repr: Repr::Small(n.map(|x| -x), *d) }
            }
            _ => {
                let (n, d) = self.big_parts();
                AlgebraicNumber::from_big(n.map(|x| -x), d)
            }
        }
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

impl std::iter::Sum for AlgebraicNumber {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| &a + &b)
    }
}

impl std::iter::Product for AlgebraicNumber {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| &a * &b)
    }
}

impl serde::Serialize for AlgebraicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for AlgebraicNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => Self::parse(&s).map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(k) => Ok(Self::from_int(k)),
                None => Err(serde::de::Error::custom("non-integer JSON number; use a scalar string")),
            },
            _ => Err(serde::de::Error::custom("expected a scalar string")),
        }
    }
}

/// Minimal field interface so that a few algorithms can also run in a
/// quadratic extension of Q(w).
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display {
    /// A square root in the same field, if one exists.
    fn fsqrt(&self) -> Option<Self>;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn fadd(&self, o: &Self) -> Self;
    fn fsub(&self, o: &Self) -> Self;
    fn fmul(&self, o: &Self) -> Self;
    fn fneg(&self) -> Self;
    /// Panics on zero.
    fn finv(&self) -> Self;
    fn embed(x: &AlgebraicNumber) -> Self;

    fn fdiv(&self, o: &Self) -> Self {
        self.fmul(&o.finv())
    }
    fn fpow(&self, e: u64) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.fmul(self);
        }
        acc
    }
}

impl Field for AlgebraicNumber {
    fn zero() -> Self {
        AlgebraicNumber::zero()
    }
    fn one() -> Self {
        AlgebraicNumber::one()
    }
    fn is_zero(&self) -> bool {
        AlgebraicNumber::is_zero(self)
    }
    fn fadd(&self, o: &Self) -> Self {
        self + o
    }
    fn fsub(&self, o: &Self) -> Self {
        self - o
    }
    fn fmul(&self, o: &Self) -> Self {
        self * o
    }
    fn fneg(&self) -> Self {
        -self
    }
    fn finv(&self) -> Self {
        self.inv().expect("division by zero")
    }
    fn embed(x: &AlgebraicNumber) -> Self {
        x.clone()
    }
    fn fsqrt(&self) -> Option<Self> {
        self.sqrt()
    }
    fn fpow(&self, e: u64) -> Self {
        self.pow(e)
    }
}

/// Element `a + b*sqrt(d)` of Q(w)(sqrt d), where d is a non-square of Q(w).
/// `d` is `None` for elements known to lie in the base field.
#[derive(Clone, Debug)]
pub struct QuadExt {
    pub a: AlgebraicNumber,
    pub b: AlgebraicNumber,
    pub d: Option<AlgebraicNumber>,
}

impl QuadExt {
    pub fn new(a: AlgebraicNumber, b: AlgebraicNumber, d: AlgebraicNumber) -> Self {
        QuadExt { a, b, d: Some(d) }
    }

    pub fn sqrt_of(d: &AlgebraicNumber) -> Self {
        QuadExt { a: AlgebraicNumber::zero(), b: AlgebraicNumber::one(), d: Some(d.clone()) }
    }

    fn radicand(&self, o: &Self) -> Option<AlgebraicNumber> {
        match (&self.d, &o.d) {
            (Some(x), Some(y)) => {
                debug_assert_eq!(x, y, "mixing different quadratic extensions");
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }

    pub fn in_base(&self) -> Option<AlgebraicNumber> {
        if self.b.is_zero() {
            Some(self.a.clone())
        } else {
            None
        }
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b
    }
}

impl Field for QuadExt {
    fn zero() -> Self {
        QuadExt { a: AlgebraicNumber::zero(), b: AlgebraicNumber::zero(), d: None }
    }
    fn one() -> Self {
        QuadExt { a: AlgebraicNumber::one(), b: AlgebraicNumber::zero(), d: None }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn fadd(&self, o: &Self) -> Self {
        QuadExt { a: &self.a + &o.a, b: &self.b + &o.b, d: self.radicand(o) }
    }
    fn fsub(&self, o: &Self) -> Self {
        QuadExt { a: &self.a - &o.a, b: &self.b - &o.b, d: self.radicand(o) }
    }
    fn fmul(&self, o: &Self) -> Self {
        let d = self.radicand(o);
        let bb = &self.b * &o.b;
        let a = match &d {
            Some(d) if !bb.is_zero() => &(&self.a * &o.a) + &(&bb * d),
            _ => &self.a * &o.a,
        };
        QuadExt { a, b: &(&self.a * &o.b) + &(&self.b * &o.a), d }
    }
    fn fneg(&self) -> Self {
        QuadExt { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }
    fn finv(&self) -> Self {
        if self.b.is_zero() {
            return QuadExt { a: self.a.inv().expect("division by zero"), b: AlgebraicNumber::zero(), d: self.d.clone() };
        }
        let d = self.d.clone().expect("radicand");
        let n = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &d);
        let ni = n.inv().expect("division by zero");
        QuadExt { a: &self.a * &ni, b: -&(&self.b * &ni), d: Some(d) }
    }
    fn embed(x: &AlgebraicNumber) -> Self {
        QuadExt { a: x.clone(), b: AlgebraicNumber::zero(), d: None }
    }
    fn fsqrt(&self) -> Option<Self> {
        let lift = |a: AlgebraicNumber, b: AlgebraicNumber| QuadExt { a, b, d: self.d.clone() };
        let Some(d) = self.d.clone() else {
            return self.a.sqrt().map(|r| lift(r, AlgebraicNumber::zero()));
        };
        if self.b.is_zero() {
            if let Some(r) = self.a.sqrt() {
                return Some(lift(r, AlgebraicNumber::zero()));
            }
            // a = d q^2
            return (&self.a / &d).sqrt().map(|q| lift(AlgebraicNumber::zero(), q));
        }
        // (p + q sqrt d)^2 = a + b sqrt d  =>  p^2 = (a +- sqrt(a^2 - d b^2)) / 2
        let n = (&(&self.a * &self.a) - &(&(&self.b * &self.b) * &d)).sqrt()?;
        let half = AlgebraicNumber::from_ratio(1, 2);
        for s in [&n, &-&n] {
            let p2 = &(&self.a + s) * &half;
            if let Some(p) = p2.sqrt() {
                if p.is_zero() {
                    continue;
                }
                let q = &self.b / &(&AlgebraicNumber::from_int(2) * &p);
                let r = lift(p, q);
                if r.fmul(&r) == *self {
                    return Some(r);
                }
            }
        }
        None
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.d {
            Some(d) if !self.b.is_zero() => write!(f, "({}) + ({})*sqrt({})", self.a, self.b, d),
            _ => write!(f, "{}", self.a),
        }
    }
}
