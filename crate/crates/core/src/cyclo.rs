//! Exact arithmetic in cyclotomic fields `Q(w)`, `w` a primitive `m`-th root of unity.
//!
//! Elements are stored in the power basis `1, w, ..., w^(d-1)` with
//! `d = deg Phi_m`, so equality is coordinate equality.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Coordinate type of every cyclotomic value.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("division by zero in Q(w_{0})")]
    DivisionByZero(u32),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("cannot parse cyclotomic number `{0}`")]
    Parse(String),
}

/// Integer polynomial coefficients, lowest degree first.
fn poly_divexact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = &den[dd];
    let mut quo = vec![BigInt::zero(); num.len() - dd];
    for k in (0..quo.len()).rev() {
        let c = &rem[k + dd] / lead;
        if !c.is_zero() {
            for (i, d) in den.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
        }
        quo[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quo
}

/// The m-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(m: u32) -> Vec<BigInt> {
    assert!(m > 0);
    let mut p = vec![BigInt::zero(); m as usize + 1];
    p[0] = BigInt::from(-1);
    p[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            p = poly_divexact(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

pub(crate) struct Field {
    m: u32,
    deg: usize,
    /// `w^k mod Phi_m` for `k < 2*deg - 1`.
    reduce: Vec<Vec<i64>>,
    /// `w^k` for `0 <= k < m`.
    powers: Vec<Vec<i64>>,
}

impl Field {
    fn build(m: u32) -> Field {
        let phi = cyclotomic_polynomial(m);
        let deg = phi.len() - 1;
        let to_i64 = |b: &BigInt| -> i64 { i64::try_from(b).expect("cyclotomic coefficient fits in i64") };
        let phi: Vec<i64> = phi.iter().map(to_i64).collect();
        // w^deg = -(phi_0 + ... + phi_{deg-1} w^{deg-1})
        let span = (2 * deg).max(m as usize + 1);
        let mut table: Vec<Vec<i64>> = Vec::with_capacity(span);
        let mut cur = vec![0i64; deg];
        cur[0] = 1;
        for _ in 0..span {
            table.push(cur.clone());
            let top = cur[deg - 1];
            let mut next = vec![0i64; deg];
            for i in (1..deg).rev() {
                next[i] = cur[i - 1];
            }
            for i in 0..deg {
                next[i] -= top * phi[i];
            }
            cur = next;
        }
        let powers = table[..m as usize].to_vec();
        table.truncate(2 * deg - 1);
        Field { m, deg, reduce: table, powers }
    }
}

fn field(m: u32) -> &'static Field {
    static FIELDS: OnceLock<RwLock<HashMap<u32, &'static Field>>> = OnceLock::new();
    let fields = FIELDS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(f) = fields.read().unwrap().get(&m) {
        return f;
    }
    let mut w = fields.write().unwrap();
    w.entry(m).or_insert_with(|| Box::leak(Box::new(Field::build(m))))
}

/// Degree of `Phi_m`, i.e. Euler's totient of `m`.
pub fn field_degree(m: u32) -> usize {
    field(m).deg
}

/// Numerator width of the inline representation.
const INLINE: usize = 8;

/// Common-denominator form: value = (sum num_i w^i) / den, den > 0, content 1.
/// `Small` is used whenever everything fits in `i64`, so the form is canonical.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { den: i64, num: [i64; INLINE] },
    Big { den: BigInt, num: Vec<BigInt> },
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Normalizes a wide numerator over a positive denominator.
fn normalize_wide(deg: usize, den: i128, num: &[i128; INLINE]) -> Repr {
    debug_assert!(den > 0);
    let mut g = den as u128;
    if g != 1 {
        for &c in &num[..deg] {
            g = gcd_u128(g, c.unsigned_abs());
            if g == 1 {
                break;
            }
        }
    }
    let g = g as i128;
    let den = den / g;
    if let Ok(d) = i64::try_from(den) {
        let mut out = [0i64; INLINE];
        let mut fits = true;
        for i in 0..deg {
            match i64::try_from(num[i] / g) {
                Ok(v) => out[i] = v,
                Err(_) => {
                    fits = false;
                    break;
                }
            }
        }
        if fits {
            return Repr::Small { den: d, num: out };
        }
    }
    Repr::Big { den: BigInt::from(den), num: num[..deg].iter().map(|&c| BigInt::from(c / g)).collect() }
}

/// Normalizes a big numerator over a nonzero denominator.
fn normalize_big(deg: usize, mut den: BigInt, mut num: Vec<BigInt>) -> Repr {
    if den.is_negative() {
        den = -den;
        for c in num.iter_mut() {
            *c = -std::mem::take(c);
        }
    }
    let mut g = den.clone();
    for c in &num {
        if g.is_one() {
            break;
        }
        g = g.gcd(c);
    }
    if !g.is_one() {
        den /= &g;
        for c in num.iter_mut() {
            *c /= &g;
        }
    }
    if deg <= INLINE {
        if let Ok(d) = i64::try_from(&den) {
            let mut out = [0i64; INLINE];
            if num.iter().zip(out.iter_mut()).all(|(c, o)| i64::try_from(c).map(|v| *o = v).is_ok()) {
                return Repr::Small { den: d, num: out };
            }
        }
    }
    Repr::Big { den, num }
}

/// An exact element of `Q(w_m)`.
#[derive(Clone)]
pub struct CyclotomicNumber {
    field: &'static Field,
    repr: Repr,
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field.m == other.field.m && self.repr == other.repr
    }
}
impl Eq for CyclotomicNumber {}

impl Hash for CyclotomicNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.m.hash(state);
        self.repr.hash(state);
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self, self.field.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl CyclotomicNumber {
    fn from_repr(field: &'static Field, repr: Repr) -> Self {
        CyclotomicNumber { field, repr }
    }

    fn from_big(field: &'static Field, den: BigInt, num: Vec<BigInt>) -> Self {
        Self::from_repr(field, normalize_big(field.deg, den, num))
    }

    fn big_parts(&self) -> (BigInt, Vec<BigInt>) {
        match &self.repr {
            Repr::Small { den, num } => (BigInt::from(*den), num[..self.field.deg].iter().map(|&c| BigInt::from(c)).collect()),
            Repr::Big { den, num } => (den.clone(), num.clone()),
        }
    }

    pub fn zero(m: u32) -> Self {
        let field = field(m);
        if field.deg <= INLINE {
            Self::from_repr(field, Repr::Small { den: 1, num: [0; INLINE] })
        } else {
            Self::from_repr(field, Repr::Big { den: BigInt::one(), num: vec![BigInt::zero(); field.deg] })
        }
    }

    pub fn one(m: u32) -> Self {
        Self::from_integer(m, 1)
    }

    pub fn from_integer(m: u32, n: i64) -> Self {
        Self::from_fraction(m, n, 1)
    }

    pub fn from_rational(m: u32, r: Rational) -> Self {
        let f = field(m);
        let mut num = vec![BigInt::zero(); f.deg];
        let (n, d) = r.into();
        num[0] = n;
        Self::from_big(f, d, num)
    }

    /// `p/q` as an element of `Q(w_m)`.
    pub fn from_fraction(m: u32, p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::from_rational(m, Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Builds a value from power-basis coordinates, reducing if more than `deg` are given.
    pub fn from_coords(m: u32, coords: Vec<Rational>) -> Self {
        let f = field(m);
        if coords.len() == f.deg {
            let den = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let num = coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
            return Self::from_big(f, den, num);
        }
        let mut z = Self::zero(m);
        for (k, c) in coords.into_iter().enumerate() {
            if !c.is_zero() {
                z += &(Self::omega_power(m, k as i64).scale(&c));
            }
        }
        z
    }

    pub fn from_int_coords(m: u32, coords: &[i64]) -> Self {
        Self::from_coords(m, coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    /// `w^p`; negative `p` allowed.
    pub fn omega_power(m: u32, p: i64) -> Self {
        let f = field(m);
        let k = p.rem_euclid(m as i64) as usize;
        Self::from_big(f, BigInt::one(), f.powers[k].iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn modulus(&self) -> u32 {
        self.field.m
    }

    /// Power-basis coordinates.
    pub fn coords(&self) -> Vec<Rational> {
        let (den, num) = self.big_parts();
        num.into_iter().map(|c| Rational::new(c, den.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Small { num, .. } => num.iter().all(|&c| c == 0),
            Repr::Big { num, .. } => num.iter().all(Zero::is_zero),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Small { den, num } => *den == 1 && num[0] == 1 && num[1..].iter().all(|&c| c == 0),
            Repr::Big { .. } => false,
        }
    }

    /// The value as a rational if it lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        let (den, num) = self.big_parts();
        if num[1..].iter().all(Zero::is_zero) {
            Some(Rational::new(num[0].clone(), den))
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.field.m);
        }
        self * &Self::from_rational(self.field.m, r.clone())
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self * &Self::from_integer(self.field.m, n)
    }

    fn check(&self, other: &Self) -> Result<(), CycloError> {
        if self.field.m != other.field.m {
            Err(CycloError::ModulusMismatch(self.field.m, other.field.m))
        } else {
            Ok(())
        }
    }

    /// Checked binary arithmetic.
    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self, CycloError> {
        self.check(other)?;
        Ok(match op {
            ArithOp::Add => self + other,
            ArithOp::Sub => self - other,
            ArithOp::Mul => self * other,
            ArithOp::Div => return self.checked_div(other),
        })
    }

    /// `self + sign * other`.
    fn add_signed(&self, other: &Self, negate: bool) -> Self {
        assert_eq!(self.field.m, other.field.m, "modulus mismatch");
        let deg = self.field.deg;
        if let (Repr::Small { den: d1, num: a }, Repr::Small { den: d2, num: b }) = (&self.repr, &other.repr) {
            let (d1, d2) = (*d1 as i128, *d2 as i128);
            let g = gcd_u128(d1 as u128, d2 as u128) as i128;
            let (f1, f2) = (d2 / g, d1 / g);
            let mut num = [0i128; INLINE];
            for i in 0..deg {
                let y = b[i] as i128 * f2;
                num[i] = a[i] as i128 * f1 + if negate { -y } else { y };
            }
            return Self::from_repr(self.field, normalize_wide(deg, d1 * f1, &num));
        }
        let (d1, a) = self.big_parts();
        let (d2, b) = other.big_parts();
        let num = a
            .iter()
            .zip(&b)
            .map(|(x, y)| {
                let y = y * &d1;
                x * &d2 + if negate { -y } else { y }
            })
            .collect();
        Self::from_big(self.field, d1 * d2, num)
    }

    fn mul_small(&self, a: &[i64; INLINE], d1: i64, b: &[i64; INLINE], d2: i64) -> Option<Repr> {
        let deg = self.field.deg;
        let mut prod = [0i128; 2 * INLINE];
        for i in 0..deg {
            if a[i] == 0 {
                continue;
            }
            for j in 0..deg {
                if b[j] != 0 {
                    prod[i + j] = prod[i + j].checked_add(a[i] as i128 * b[j] as i128)?;
                }
            }
        }
        let mut num = [0i128; INLINE];
        num[..deg].copy_from_slice(&prod[..deg]);
        for k in deg..2 * deg - 1 {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for (i, &r) in self.field.reduce[k].iter().enumerate() {
                if r != 0 {
                    num[i] = num[i].checked_add(c.checked_mul(r as i128)?)?;
                }
            }
        }
        Some(normalize_wide(deg, d1 as i128 * d2 as i128, &num))
    }

    fn mul_ref(&self, other: &Self) -> Self {
        assert_eq!(self.field.m, other.field.m, "modulus mismatch");
        if let (Repr::Small { den: d1, num: a }, Repr::Small { den: d2, num: b }) = (&self.repr, &other.repr) {
            if let Some(r) = self.mul_small(a, *d1, b, *d2) {
                return Self::from_repr(self.field, r);
            }
        }
        let d = self.field.deg;
        let (d1, a) = self.big_parts();
        let (d2, b) = other.big_parts();
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let mut out = prod[..d].to_vec();
        for (k, c) in prod.iter().enumerate().skip(d) {
            if c.is_zero() {
                continue;
            }
            for (i, &r) in self.field.reduce[k].iter().enumerate() {
                if r != 0 {
                    out[i] += c * r;
                }
            }
        }
        Self::from_big(self.field, d1 * d2, out)
    }

    /// Multiplicative inverse, by solving `self * x = 1` over `Q`.
    pub fn inv(&self) -> Result<Self, CycloError> {
        let m = self.field.m;
        if self.is_zero() {
            return Err(CycloError::DivisionByZero(m));
        }
        let d = self.field.deg;
        // column j of the multiplication matrix is self * w^j
        let cols: Vec<Vec<Rational>> = (0..d).map(|j| (self * &Self::omega_power(m, j as i64)).coords()).collect();
        let mut a: Vec<Vec<Rational>> = (0..d)
            .map(|i| {
                let mut row: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
                row.push(if i == 0 { Rational::one() } else { Rational::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !a[r][col].is_zero()).expect("multiplication by nonzero element is invertible");
            a.swap(col, piv);
            let p = a[col][col].clone();
            for x in a[col].iter_mut() {
                *x /= &p;
            }
            for r in 0..d {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in col..=d {
                        let t = &a[col][c] * &f;
                        a[r][c] -= t;
                    }
                }
            }
        }
        Ok(Self::from_coords(m, a.into_iter().map(|r| r[d].clone()).collect()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, CycloError> {
        self.check(other)?;
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self, CycloError> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.field.m);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Smallest `k > 0` with `self^k = 1`, searched up to `bound`.
    pub fn multiplicative_order(&self, bound: u64) -> Option<u64> {
        let one = Self::one(self.field.m);
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc == one {
                return Some(k);
            }
            acc = &acc * self;
        }
        None
    }

    /// Galois conjugation `w -> w^k` (k coprime to m).
    pub fn galois(&self, k: i64) -> Self {
        let m = self.field.m;
        let mut z = Self::zero(m);
        for (i, c) in self.coords().iter().enumerate() {
            if !c.is_zero() {
                z += &Self::omega_power(m, k * i as i64).scale(c);
            }
        }
        z
    }

    /// Parses `a0 + a1*w + a2*w^2 + ...` in `Q(w_m)`.
    pub fn parse(m: u32, s: &str) -> Result<Self, CycloError> {
        if m == 0 {
            return Err(CycloError::ZeroModulus);
        }
        parse_expr(m, s).ok_or_else(|| CycloError::Parse(s.to_string()))
    }
}

fn fmt_abs(r: &Rational) -> String {
    let a = r.abs();
    if a.denom().is_one() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mag = fmt_abs(c);
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != "1" {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "w")?;
                    } else {
                        write!(f, "w^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn parse_expr(m: u32, s: &str) -> Option<CyclotomicNumber> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return None;
    }
    let mut pos = 0;
    let mut acc = CyclotomicNumber::zero(m);
    let read_int = |pos: &mut usize| -> Option<BigInt> {
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return None;
        }
        chars[start..*pos].iter().collect::<String>().parse().ok()
    };
    let mut first = true;
    while pos < chars.len() {
        let mut sign = 1;
        match chars[pos] {
            '+' => pos += 1,
            '-' | '\u{2212}' => {
                sign = -1;
                pos += 1
            }
            _ if first => {}
            _ => return None,
        }
        first = false;
        let mut coef = Rational::one();
        let mut has_coef = false;
        if pos < chars.len() && chars[pos].is_ascii_digit() {
            let n = read_int(&mut pos)?;
            let mut d = BigInt::one();
            if pos < chars.len() && chars[pos] == '/' {
                pos += 1;
                d = read_int(&mut pos)?;
                if d.is_zero() {
                    return None;
                }
            }
            coef = Rational::new(n, d);
            has_coef = true;
        }
        let mut power = 0i64;
        if pos < chars.len() && chars[pos] == '*' {
            if !has_coef {
                return None;
            }
            pos += 1;
            if pos >= chars.len() || !matches!(chars[pos], 'w' | '\u{3c9}') {
                return None;
            }
        }
        if pos < chars.len() && matches!(chars[pos], 'w' | '\u{3c9}') {
            pos += 1;
            power = 1;
            if pos < chars.len() && chars[pos] == '^' {
                pos += 1;
                let neg = pos < chars.len() && chars[pos] == '-';
                if neg {
                    pos += 1;
                }
                let e: i64 = i64::try_from(read_int(&mut pos)?).ok()?;
                power = if neg { -e } else { e };
            }
        } else if !has_coef {
            return None;
        }
        if sign < 0 {
            coef = -coef;
        }
        acc += &CyclotomicNumber::omega_power(m, power).scale(&coef);
    }
    Some(acc)
}

impl FromStr for CyclotomicNumber {
    type Err = CycloError;
    /// Parses `m:expr`, e.g. `12:2 + 2*w - w^3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, e) = s.split_once(':').ok_or_else(|| CycloError::Parse(s.to_string()))?;
        let m: u32 = m.trim().parse().map_err(|_| CycloError::Parse(s.to_string()))?;
        Self::parse(m, e)
    }
}

impl<'a> Add<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.add_signed(rhs, false)
    }
}

impl<'a> Sub<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.add_signed(rhs, true)
    }
}

impl<'a> Mul<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.mul_ref(rhs)
    }
}

impl<'a> Div<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn div(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.checked_div(rhs).expect("cyclotomic division")
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        if let Repr::Small { den, num } = &self.repr {
            if num.iter().all(|&c| c != i64::MIN) {
                let mut out = *num;
                for c in out.iter_mut() {
                    *c = -*c;
                }
                return CyclotomicNumber::from_repr(self.field, Repr::Small { den: *den, num: out });
            }
        }
        let (den, num) = self.big_parts();
        CyclotomicNumber::from_big(self.field, den, num.into_iter().map(|c| -c).collect())
    }
}

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<CyclotomicNumber> for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $f(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&CyclotomicNumber> for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $f(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
                (&self).$f(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&CyclotomicNumber> for CyclotomicNumber {
    fn add_assign(&mut self, rhs: &CyclotomicNumber) {
        *self = self.add_signed(rhs, false);
    }
}

impl SubAssign<&CyclotomicNumber> for CyclotomicNumber {
    fn sub_assign(&mut self, rhs: &CyclotomicNumber) {
        *self = self.add_signed(rhs, true);
    }
}

impl MulAssign<&CyclotomicNumber> for CyclotomicNumber {
    fn mul_assign(&mut self, rhs: &CyclotomicNumber) {
        *self = self.mul_ref(rhs);
    }
}

impl serde::Serialize for CyclotomicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Integer gcd.
pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Named constants in `Q(w_12)`.
pub mod constants {
    use super::CyclotomicNumber;

    pub const MODULUS: u32 = 12;

    pub const A_FLAT: &str = "4 + 4*w + 2*w^3";
    pub const B_FLAT: &str = "-24 - 28*w + 14*w^3";
    pub const C_FLAT: &str = "42 + 48*w - 24*w^3";
    pub const A_NAT: &str = "-6 - 8*w + 4*w^3";
    pub const B_NAT: &str = "14 + 16*w - 8*w^3";
    pub const D_NAT: &str = "4 - 8*w^2 - 6*w^3";
    pub const E_NAT: &str = "2 - 4*w^2";

    /// All named constants with their labels.
    pub const ALL: [(&str, &str); 7] = [
        ("A_flat", A_FLAT),
        ("B_flat", B_FLAT),
        ("C_flat", C_FLAT),
        ("A_nat", A_NAT),
        ("B_nat", B_NAT),
        ("D_nat", D_NAT),
        ("E_nat", E_NAT),
    ];

    pub fn get(text: &str) -> CyclotomicNumber {
        CyclotomicNumber::parse(MODULUS, text).expect("constant parses")
    }

    pub fn a_flat() -> CyclotomicNumber {
        get(A_FLAT)
    }
    pub fn b_flat() -> CyclotomicNumber {
        get(B_FLAT)
    }
    pub fn c_flat() -> CyclotomicNumber {
        get(C_FLAT)
    }
    pub fn a_nat() -> CyclotomicNumber {
        get(A_NAT)
    }
    pub fn b_nat() -> CyclotomicNumber {
        get(B_NAT)
    }
    pub fn d_nat() -> CyclotomicNumber {
        get(D_NAT)
    }
    pub fn e_nat() -> CyclotomicNumber {
        get(E_NAT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> CyclotomicNumber {
        CyclotomicNumber::parse(12, s).unwrap()
    }

    #[test]
    fn phi_small_moduli() {
        let as_i64 = |m| cyclotomic_polynomial(m).iter().map(|c| i64::try_from(c).unwrap()).collect::<Vec<_>>();
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(as_i64(10), vec![1, -1, 1, -1, 1]);
        assert_eq!(field_degree(12), 4);
        assert_eq!(field_degree(10), 4);
        assert_eq!(field_degree(2), 1);
    }

    #[test]
    fn omega_reductions() {
        let o = CyclotomicNumber::omega_power(12, 1);
        let o3 = CyclotomicNumber::omega_power(12, 3);
        assert_eq!(&o * &o3, w("-1 + w^2"));
        assert_eq!(CyclotomicNumber::omega_power(12, 6), w("-1"));
        assert_eq!(CyclotomicNumber::omega_power(12, 4), w("w^2 - 1"));
        assert_eq!(CyclotomicNumber::omega_power(12, -1), w("w - w^3"));
        assert_eq!(CyclotomicNumber::omega_power(2, 1), CyclotomicNumber::from_integer(2, -1));
    }

    #[test]
    fn omega_inverse_by_linear_algebra() {
        // solve w * x = 1 independently: x = w^11 reduced by hand through w^12 = 1
        let inv = CyclotomicNumber::omega_power(12, 1).inv().unwrap();
        assert_eq!(inv, w("w - w^3"));
        assert!((&inv * &CyclotomicNumber::omega_power(12, 1)).is_one());
    }

    #[test]
    fn constant_quotients() {
        use constants::*;
        let q1 = b_flat().checked_div(&a_nat()).unwrap();
        let q2 = d_nat().checked_div(&e_nat()).unwrap();
        assert_eq!(q1, w("2 + 2*w - w^3"));
        assert_eq!(q2, q1);
        assert_eq!(&q1 * &a_nat(), b_flat());
        assert_eq!(&q2 * &e_nat(), d_nat());
    }

    #[test]
    fn constants_round_trip() {
        for (_, text) in constants::ALL {
            assert_eq!(constants::get(text).to_string(), text);
        }
    }

    #[test]
    fn formatting() {
        assert_eq!(CyclotomicNumber::zero(12).to_string(), "0");
        assert_eq!(w("-w").to_string(), "-w");
        assert_eq!(w("1/3*w^2 - 2/3").to_string(), "-2/3 + 1/3*w^2");
        assert_eq!(w("w^12").to_string(), "1");
        assert!(CyclotomicNumber::parse(12, "2 + + w").is_err());
        assert!(CyclotomicNumber::parse(12, "").is_err());
        assert_eq!("12:2 + 2*w - w^3".parse::<CyclotomicNumber>().unwrap(), w("2 + 2*w - w^3"));
    }

    #[test]
    fn errors() {
        let a = CyclotomicNumber::one(12);
        let b = CyclotomicNumber::one(10);
        assert_eq!(a.arith(&b, ArithOp::Add), Err(CycloError::ModulusMismatch(12, 10)));
        assert_eq!(a.arith(&CyclotomicNumber::zero(12), ArithOp::Div), Err(CycloError::DivisionByZero(12)));
    }

    #[test]
    fn omega_orders() {
        for m in [2u32, 3, 5, 6, 10, 12] {
            for p in 0..(2 * m as i64) {
                let o = CyclotomicNumber::omega_power(m, p);
                let expect = m as i64 / gcd(m as i64, p);
                assert_eq!(o.multiplicative_order(2 * m as u64), Some(expect as u64), "m={m} p={p}");
                assert_eq!(CyclotomicNumber::omega_power(m, p + m as i64), o);
            }
        }
    }
}
