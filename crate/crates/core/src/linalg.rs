//! Dense exact linear algebra over `Q(w_m)`, plus a modular rank used as a
//! fast certificate.

use crate::cyclo::CyclotomicNumber;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub type CMatrix = Vec<Vec<CyclotomicNumber>>;

/// Row echelon form in place; returns pivot columns.
fn echelon(a: &mut CMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for x in a[r].iter_mut().skip(c) {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    if !a[r][j].is_zero() {
                        let t = &a[r][j] * &f;
                        a[i][j] -= &t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact rank.
pub fn rank(a: &CMatrix) -> usize {
    let mut b = a.clone();
    echelon(&mut b).len()
}

/// Basis of the right nullspace `{x : A x = 0}`; each vector has a 1 at its free column.
pub fn nullspace(a: &CMatrix, m: u32) -> Vec<Vec<CyclotomicNumber>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut b = a.clone();
    let pivots = echelon(&mut b);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![CyclotomicNumber::zero(m); cols];
        v[free] = CyclotomicNumber::one(m);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&b[r][free];
        }
        out.push(v);
    }
    out
}

/// Solves `A x = b` for square or overdetermined consistent systems.
pub fn solve(a: &CMatrix, b: &[CyclotomicNumber], m: u32) -> Option<Vec<CyclotomicNumber>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: CMatrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = echelon(&mut aug);
    if pivots.contains(&cols) || pivots.len() < cols {
        return None;
    }
    let mut x = vec![CyclotomicNumber::zero(m); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][cols].clone();
    }
    Some(x)
}

/// A prime `p = 1 (mod m)` together with a primitive `m`-th root of unity in `F_p`.
#[derive(Debug, Clone, Copy)]
pub struct ModularField {
    pub p: u64,
    pub root: u64,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl ModularField {
    /// The `index`-th prime below `2^62` congruent to 1 mod `m`, with a primitive root of order `m`.
    pub fn new(m: u32, index: usize) -> ModularField {
        let m64 = m as u64;
        let mut p = ((1u64 << 62) / m64) * m64 + 1;
        let mut found = 0;
        loop {
            p -= m64;
            if is_prime(p) {
                if found == index {
                    break;
                }
                found += 1;
            }
        }
        let fac = prime_factors(m64);
        let root = (2..p)
            .map(|g| powmod(g, (p - 1) / m64, p))
            .find(|&r| fac.iter().all(|&f| powmod(r, m64 / f, p) != 1))
            .expect("primitive root exists");
        ModularField { p, root }
    }

    pub fn inv(&self, a: u64) -> u64 {
        powmod(a, self.p - 2, self.p)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.p)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn reduce_int(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().expect("reduced")
    }

    /// Image of a cyclotomic number under `w -> root`; `None` if a denominator vanishes mod p.
    pub fn reduce(&self, z: &CyclotomicNumber) -> Option<u64> {
        let mut acc = 0u64;
        let mut wp = 1u64;
        for c in z.coords() {
            if !c.is_zero() {
                let den = self.reduce_int(c.denom());
                if den == 0 {
                    return None;
                }
                let v = self.mul(self.reduce_int(c.numer()), self.inv(den));
                acc = self.add(acc, self.mul(v, wp));
            }
            wp = self.mul(wp, self.root);
        }
        Some(acc)
    }

    /// Rank of a matrix over `F_p`.
    pub fn rank(&self, mut a: Vec<Vec<u64>>) -> usize {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
            a.swap(r, piv);
            let inv = self.inv(a[r][c]);
            for j in c..cols {
                a[r][j] = self.mul(a[r][j], inv);
            }
            for i in r + 1..rows {
                let f = a[i][c];
                if f != 0 {
                    for j in c..cols {
                        let t = self.mul(f, a[r][j]);
                        a[i][j] = self.sub(a[i][j], t);
                    }
                }
            }
            r += 1;
        }
        r
    }
}

/// Exact rank, certified through a modular image when that image already has full row rank.
pub fn certified_rank(a: &CMatrix, m: u32) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let f = ModularField::new(m, 0);
    let reduced: Option<Vec<Vec<u64>>> = a.iter().map(|row| row.iter().map(|z| f.reduce(z)).collect()).collect();
    if let Some(r) = reduced {
        // reduction cannot increase rank, so a full-rank image is exact
        if f.rank(r) == rows {
            return rows;
        }
    }
    rank(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(m: u32, v: i64) -> CyclotomicNumber {
        CyclotomicNumber::from_integer(m, v)
    }

    #[test]
    fn rank_and_nullspace() {
        let m = 12;
        let w = CyclotomicNumber::omega_power(m, 1);
        let a = vec![vec![c(m, 1), w.clone(), c(m, 0)], vec![w.clone(), &w * &w, c(m, 0)]];
        assert_eq!(rank(&a), 1);
        assert_eq!(certified_rank(&a, m), 1);
        let ns = nullspace(&a, m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let mut s = c(m, 0);
                for (x, y) in row.iter().zip(v) {
                    s += &(x * y);
                }
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn modular_root_has_order_m() {
        for m in [2u32, 10, 12] {
            let f = ModularField::new(m, 0);
            assert_eq!(f.p % m as u64, 1);
            assert_eq!(powmod(f.root, m as u64, f.p), 1);
            if m > 1 {
                assert_ne!(f.root, 1);
            }
            // the image of Phi_m(w) must vanish
            let z = CyclotomicNumber::omega_power(m, m as i64 / 2 + 1);
            let direct = powmod(f.root, (m as u64 / 2 + 1) % m as u64, f.p);
            assert_eq!(f.reduce(&z), Some(direct));
        }
    }

    #[test]
    fn solve_square() {
        let m = 12;
        let a = vec![vec![c(m, 2), c(m, 1)], vec![c(m, 1), c(m, 3)]];
        let x = solve(&a, &[c(m, 3), c(m, 4)], m).unwrap();
        assert_eq!(x, vec![c(m, 1), c(m, 1)]);
    }
}
