//! Principal Heisenberg Fock spaces and the E, X and Z vertex-operator modes on
//! tensor powers of the basic representation.
//!
//! Every eigenspace `a_(i)` used here is one-dimensional, so a Fock factor is a
//! polynomial ring in creation variables `y_n = b_{-n} (x) t^{-n}`, one per
//! allowed degree `n > 0`. `E^-` acts by multiplication with an exponential
//! series and `E^+` by the substitution `y_n -> y_n + s_n zeta^n`; every mode is
//! therefore a finite computation on each graded component.
//!
//! A space is either the tensor power itself ([`Frame::Tensor`], one set of
//! variables per factor) or its vacuum space ([`Frame::Vacuum`]), written in the
//! difference coordinates `r_c = y^(c) - y^(c+1)`. Z-operators commute with the
//! diagonal Heisenberg action, so they restrict to the vacuum space.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::{constants, CyclotomicNumber, Rational};
use crate::lattice::{LatticeError, LatticeVector, TwistedCoxeterData};
use crate::linalg;
use crate::partitions::{self, ConstraintSet, Partition};
use crate::qseries::{self, DeltaKind, SeriesError};

#[derive(Debug, Error)]
pub enum FockError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("a_({residue}) has dimension {dim}; only one-dimensional eigenspaces are supported")]
    MultiDimensional { residue: u32, dim: usize },
    #[error("level must be positive")]
    ZeroLevel,
    #[error("degree {degree} exceeds the space's bound {bound}")]
    DegreeBound { degree: i64, bound: u32 },
    #[error("operator does not preserve the vacuum space")]
    NotVacuumPreserving,
    #[error("vector is not in the vacuum space")]
    NotInVacuumSpace,
    #[error("spaces have different levels or mode sets")]
    IncompatibleSpaces,
    #[error("relation {0} does not exist (expected 1..=4)")]
    UnknownRelation(u8),
    #[error("relation {relation} needs A+B not divisible by 3, got A={a}, B={b}")]
    Precondition { relation: u8, a: i64, b: i64 },
    #[error("straightening is not covered for (A,B) = ({0},{1})")]
    Uncovered(i64, i64),
    #[error("found {found} highest-weight vectors up to degree {bound}, wanted {wanted}")]
    SearchExhausted { found: usize, wanted: usize, bound: u32 },
    #[error("unknown module {label} with a = {a}")]
    UnknownModule { label: String, a: usize },
}

/// Eigenbases of `nu` on `C (x) L` and the pairings between opposite degrees.
#[derive(Debug)]
pub struct HeisenbergStructure {
    pub data: Arc<TwistedCoxeterData>,
    /// `basis[i]` spans `a_(i)`, `0 <= i < m`; coordinates in the simple-root basis.
    pub basis: Vec<Vec<Vec<CyclotomicNumber>>>,
    /// `pairing[i] = <b_i, b_{-i}>` when `a_(i)` is nonzero.
    pub pairing: Vec<Option<CyclotomicNumber>>,
}

pub fn heisenberg_structure(data: Arc<TwistedCoxeterData>) -> HeisenbergStructure {
    let m = data.m as i64;
    let basis: Vec<_> = (0..m).map(|i| data.eigenspace(i)).collect();
    let mut h = HeisenbergStructure { data, basis, pairing: Vec::new() };
    h.pairing = (0..m as usize)
        .map(|i| {
            let j = (m as usize - i) % m as usize;
            match (h.basis[i].first(), h.basis[j].first()) {
                (Some(x), Some(y)) => Some(h.pair(x, y)),
                _ => None,
            }
        })
        .collect();
    h
}

impl HeisenbergStructure {
    pub fn m(&self) -> u32 {
        self.data.m
    }

    fn residue(&self, i: i64) -> usize {
        i.rem_euclid(self.m() as i64) as usize
    }

    pub fn dim(&self, i: i64) -> usize {
        self.basis[self.residue(i)].len()
    }

    /// Residues `i mod m` with `a_(i) != 0`.
    pub fn nonzero_residues(&self) -> Vec<u32> {
        (0..self.m()).filter(|&i| self.dim(i as i64) > 0).collect()
    }

    /// The invariant form extended bilinearly to cyclotomic coordinates.
    pub fn pair(&self, x: &[CyclotomicNumber], y: &[CyclotomicNumber]) -> CyclotomicNumber {
        let cartan = &self.data.config.cartan;
        let mut s = CyclotomicNumber::zero(self.m());
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if cartan[a][b] != 0 && !yb.is_zero() {
                    s += &(xa * yb).scale_int(cartan[a][b]);
                }
            }
        }
        s
    }

    /// Pairing of the basis vectors of `a_(i)` and `a_(-i)`, or zero.
    pub fn pairing_at(&self, i: i64) -> CyclotomicNumber {
        self.pairing[self.residue(i)].clone().unwrap_or_else(|| CyclotomicNumber::zero(self.m()))
    }

    /// The scalar `c` with `pr_j(beta) = c b_j`.
    pub fn coefficient(&self, beta: &[i64], j: i64) -> CyclotomicNumber {
        let Some(b) = self.basis[self.residue(j)].first() else {
            return CyclotomicNumber::zero(self.m());
        };
        let pr = self.data.project(beta, j);
        let k = b.iter().position(|z| !z.is_zero()).expect("basis vector is nonzero");
        let c = pr[k].clone();
        debug_assert!(pr.iter().zip(b).all(|(p, x)| *p == &c * x));
        c
    }

    fn check_one_dimensional(&self) -> Result<(), FockError> {
        for (i, b) in self.basis.iter().enumerate() {
            if b.len() > 1 {
                return Err(FockError::MultiDimensional { residue: i as u32, dim: b.len() });
            }
        }
        Ok(())
    }
}

/// Exponent vector of a monomial: `mono[var]` with `var = mode_index * slots + slot`,
/// trailing zeros trimmed.
pub type Monomial = Vec<u8>;

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[u8], b: &[u8]) -> Monomial {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, e) in out.iter_mut().zip(short) {
        *o += e;
    }
    out
}

/// A finite linear combination of monomials with coefficients in `Q(w_m)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    pub terms: BTreeMap<Monomial, CyclotomicNumber>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    /// The empty monomial with coefficient 1.
    pub fn vacuum(m: u32) -> Self {
        Self::monomial(Vec::new(), CyclotomicNumber::one(m))
    }

    pub fn monomial(mono: Monomial, c: CyclotomicNumber) -> Self {
        let mut v = FockVector::zero();
        v.add_term(mono, &c);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, c: &CyclotomicNumber) {
        let mono = trim(mono);
        self.add_trimmed(&mono, c);
    }

    /// `add_term` for a monomial without trailing zero exponents.
    fn add_trimmed(&mut self, mono: &[u8], c: &CyclotomicNumber) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(mono) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(mono);
                }
            }
            None => {
                self.terms.insert(mono.to_vec(), c.clone());
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &FockVector, c: &CyclotomicNumber) {
        if c.is_zero() {
            return;
        }
        let unit = c.is_one();
        for (mono, x) in &other.terms {
            if unit {
                self.add_trimmed(mono, x);
            } else {
                self.add_trimmed(mono, &(x * c));
            }
        }
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> FockVector {
        let mut out = FockVector::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (mono, x) in &other.terms {
            out.add_trimmed(mono, x);
        }
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (mono, x) in &other.terms {
            out.add_trimmed(mono, &-x);
        }
        out
    }

    /// Polynomial product.
    pub fn mul(&self, other: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        out.add_product(self, other);
        out
    }

    /// `self += a * b` as polynomials.
    fn add_product(&mut self, a: &FockVector, b: &FockVector) {
        for (ma, x) in &a.terms {
            for (mb, y) in &b.terms {
                self.add_trimmed(&mono_mul(ma, mb), &(x * y));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Tensor,
    Vacuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Minus,
    Plus,
}

/// Symbolic operator descriptors; a composition applies its list right to left.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OperatorMode {
    /// `b_j (x) t^j` acting diagonally on all tensor factors.
    Heisenberg {
        degree: i64,
    },
    X {
        beta: LatticeVector,
        index: i64,
    },
    Z {
        beta: LatticeVector,
        index: i64,
    },
    /// The `zeta^index` piece of `E^sign(beta, zeta, r)^power` on every factor.
    E {
        beta: LatticeVector,
        sign: Sign,
        r: i64,
        power: i64,
        index: i64,
    },
    Compose(Vec<OperatorMode>),
}

/// `exp(sum_v mult_v x_v zeta^{-n_v}) exp(sum_v shift_v zeta^{n_v} d/dx_v)`.
#[derive(Debug)]
struct Dressing {
    mult: Vec<CyclotomicNumber>,
    shift: Vec<CyclotomicNumber>,
    pieces: Mutex<Vec<Arc<FockVector>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct DressingKey {
    beta: LatticeVector,
    mult: Vec<Rational>,
    shift: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum MemoKey {
    Z(LatticeVector, i64),
    X(LatticeVector, i64),
}

/// A graded Fock space of level `level` in one of the two frames.
#[derive(Debug)]
pub struct FockSpace {
    pub heis: Arc<HeisenbergStructure>,
    pub level: usize,
    pub frame: Frame,
    pub max_degree: u32,
    modes: Vec<u32>,
    dressings: Mutex<HashMap<DressingKey, Arc<Dressing>>>,
    memo: Mutex<HashMap<(MemoKey, Monomial), Arc<FockVector>>>,
}

impl FockSpace {
    pub fn new(heis: Arc<HeisenbergStructure>, level: usize, frame: Frame, max_degree: u32) -> Result<Self, FockError> {
        if level == 0 {
            return Err(FockError::ZeroLevel);
        }
        heis.check_one_dimensional()?;
        let modes = (1..=max_degree).filter(|&n| heis.dim(-(n as i64)) > 0).collect();
        Ok(FockSpace { heis, level, frame, max_degree, modes, dressings: Mutex::new(HashMap::new()), memo: Mutex::new(HashMap::new()) })
    }

    /// The same space in the other frame.
    pub fn companion(&self, frame: Frame) -> FockSpace {
        FockSpace::new(self.heis.clone(), self.level, frame, self.max_degree).expect("validated on construction")
    }

    pub fn m(&self) -> u32 {
        self.heis.m()
    }

    pub fn slots(&self) -> usize {
        match self.frame {
            Frame::Tensor => self.level,
            Frame::Vacuum => self.level - 1,
        }
    }

    /// Allowed creation degrees up to the bound.
    pub fn modes(&self) -> &[u32] {
        &self.modes
    }

    fn nvars(&self) -> usize {
        self.modes.len() * self.slots()
    }

    fn var_degree(&self, var: usize) -> u32 {
        self.modes[var / self.slots()]
    }

    /// Variable index of `y^(slot)_n` (or `r_slot,n` in the vacuum frame).
    pub fn variable(&self, slot: usize, n: u32) -> Option<usize> {
        let i = self.modes.iter().position(|&d| d == n)?;
        (slot < self.slots()).then_some(i * self.slots() + slot)
    }

    /// Monomial consisting of one variable.
    pub fn creation(&self, slot: usize, n: u32) -> Option<Monomial> {
        let v = self.variable(slot, n)?;
        let mut mono = vec![0; v + 1];
        mono[v] = 1;
        Some(mono)
    }

    pub fn degree(&self, mono: &[u8]) -> u32 {
        mono.iter().enumerate().map(|(v, &e)| e as u32 * self.var_degree(v)).sum()
    }

    /// Per-slot multisets of creation degrees, largest first.
    pub fn factor_modes(&self, mono: &[u8]) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.slots()];
        for (v, &e) in mono.iter().enumerate() {
            for _ in 0..e {
                out[v % self.slots()].push(self.var_degree(v));
            }
        }
        for f in out.iter_mut() {
            f.sort_unstable_by(|a, b| b.cmp(a));
        }
        out
    }

    /// Degrees occurring in `v`, ascending.
    pub fn degrees(&self, v: &FockVector) -> Vec<u32> {
        let mut d: Vec<u32> = v.terms.keys().map(|m| self.degree(m)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn vacuum(&self) -> FockVector {
        FockVector::vacuum(self.m())
    }

    /// All monomials of degree `d`, ordered by factor-lexicographic exponent vectors.
    pub fn basis(&self, d: u32) -> Vec<Monomial> {
        fn rec(s: &FockSpace, var: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Monomial>) {
            if left == 0 {
                out.push(trim(cur.clone()));
                return;
            }
            if var == s.nvars() {
                return;
            }
            let w = s.var_degree(var);
            let mut e = 0u32;
            while e * w <= left {
                cur[var] = e as u8;
                rec(s, var + 1, left - e * w, cur, out);
                e += 1;
            }
            cur[var] = 0;
        }
        let mut out = Vec::new();
        if d > self.max_degree {
            return out;
        }
        rec(self, 0, d, &mut vec![0; self.nvars()], &mut out);
        out.sort();
        out
    }

    fn check_degree(&self, d: i64) -> Result<(), FockError> {
        if d > self.max_degree as i64 {
            Err(FockError::DegreeBound { degree: d, bound: self.max_degree })
        } else {
            Ok(())
        }
    }

    /// Builds the dressing for per-factor exponents of `E^-(beta)` and `E^+(beta)`.
    fn dressing(&self, beta: &[i64], mult: &[Rational], shift: &[Rational]) -> Result<Arc<Dressing>, FockError> {
        let key = DressingKey { beta: beta.to_vec(), mult: mult.to_vec(), shift: shift.to_vec() };
        if let Some(d) = self.dressings.lock().unwrap().get(&key) {
            return Ok(d.clone());
        }
        let m = self.m();
        let k = self.level;
        let slots = self.slots();
        let mut mv = vec![CyclotomicNumber::zero(m); self.nvars()];
        let mut sv = vec![CyclotomicNumber::zero(m); self.nvars()];
        let total: Rational = mult.iter().sum();
        if self.frame == Frame::Vacuum && !total.is_zero() {
            return Err(FockError::NotVacuumPreserving);
        }
        for (idx, &n) in self.modes.iter().enumerate() {
            let n = n as i64;
            let cm = self.heis.coefficient(beta, -n);
            let cp = &self.heis.coefficient(beta, n) * &self.heis.pairing_at(n);
            let base = cm.scale(&Rational::new(BigInt::from(-(m as i64)), BigInt::from(n)));
            let lam: Vec<CyclotomicNumber> = mult.iter().map(|e| base.scale(e)).collect();
            let s: Vec<CyclotomicNumber> = shift.iter().map(|e| cp.scale(e)).collect();
            match self.frame {
                Frame::Tensor => {
                    for f in 0..k {
                        mv[idx * slots + f] = lam[f].clone();
                        sv[idx * slots + f] = s[f].clone();
                    }
                }
                Frame::Vacuum => {
                    let mut acc = CyclotomicNumber::zero(m);
                    for c in 0..slots {
                        acc += &lam[c];
                        mv[idx * slots + c] = acc.clone();
                        sv[idx * slots + c] = &s[c] - &s[c + 1];
                    }
                }
            }
        }
        let d = Arc::new(Dressing { mult: mv, shift: sv, pieces: Mutex::new(vec![Arc::new(FockVector::vacuum(m))]) });
        self.dressings.lock().unwrap().insert(key, d.clone());
        Ok(d)
    }

    /// `zeta^{-b}` coefficient of the multiplication series.
    fn mult_piece(&self, d: &Dressing, b: u32) -> Arc<FockVector> {
        let mut pieces = d.pieces.lock().unwrap();
        while pieces.len() <= b as usize {
            let t = pieces.len() as u32;
            let mut acc = FockVector::zero();
            for (idx, &n) in self.modes.iter().enumerate() {
                if n > t {
                    break;
                }
                let prev = &pieces[(t - n) as usize];
                for s in 0..self.slots() {
                    let var = idx * self.slots() + s;
                    let c = &d.mult[var];
                    if c.is_zero() {
                        continue;
                    }
                    let c = c.scale_int(n as i64);
                    let mut single = vec![0u8; var + 1];
                    single[var] = 1;
                    for (mono, x) in &prev.terms {
                        acc.add_term(mono_mul(mono, &single), &(x * &c));
                    }
                }
            }
            let inv = Rational::new(BigInt::one(), BigInt::from(t));
            pieces.push(Arc::new(FockVector { terms: acc.terms.into_iter().map(|(k, v)| (k, v.scale(&inv))).collect() }));
        }
        pieces[b as usize].clone()
    }

    /// Pieces of `mono(x + shift zeta^n)` by `zeta`-degree `0..=deg(mono)`.
    fn shift_pieces(&self, d: &Dressing, mono: &[u8]) -> Vec<FockVector> {
        let deg = self.degree(mono) as usize;
        let mut out = vec![FockVector::zero(); deg + 1];
        let vars: Vec<(usize, u8)> = mono.iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| (v, e)).collect();
        let m = self.m();
        fn rec(
            s: &FockSpace,
            d: &Dressing,
            vars: &[(usize, u8)],
            i: usize,
            cur: &mut Vec<u8>,
            a: usize,
            c: CyclotomicNumber,
            out: &mut [FockVector],
        ) {
            if i == vars.len() {
                out[a].add_term(cur.clone(), &c);
                return;
            }
            let (v, e) = vars[i];
            let n = s.var_degree(v) as usize;
            let sh = &d.shift[v];
            let mut pw = CyclotomicNumber::one(s.m());
            for t in 0..=e {
                if t > 0 {
                    if sh.is_zero() {
                        break;
                    }
                    pw = &pw * sh;
                }
                let binom = BigInt::from(binomial(e as u64, t as u64));
                let coeff = (&c * &pw).scale(&Rational::from_integer(binom));
                cur[v] = e - t;
                rec(s, d, vars, i + 1, cur, a + n * t as usize, coeff, out);
            }
            cur[v] = e;
        }
        let mut cur = mono.to_vec();
        rec(self, d, &vars, 0, &mut cur, 0, CyclotomicNumber::one(m), &mut out);
        out
    }

    /// `zeta^i` coefficient of a dressing on one monomial.
    fn apply_dressing(&self, d: &Dressing, i: i64, mono: &[u8]) -> FockVector {
        let deg = self.degree(mono) as i64;
        let mut out = FockVector::zero();
        if i > deg {
            return out;
        }
        let pieces = self.shift_pieces(d, mono);
        for a in i.max(0)..=deg {
            let s = &pieces[a as usize];
            if s.is_zero() {
                continue;
            }
            let mb = self.mult_piece(d, (a - i) as u32);
            out.add_product(&mb, s);
        }
        out
    }

    fn apply_sum(&self, parts: &[Arc<Dressing>], scale: &CyclotomicNumber, i: i64, mono: &[u8]) -> FockVector {
        let mut out = FockVector::zero();
        for d in parts {
            for (t, x) in self.apply_dressing(d, i, mono).terms {
                out.add_trimmed(&t, &x);
            }
        }
        out.scale(scale)
    }

    fn apply_memo(
        &self,
        key: MemoKey,
        parts: &[Arc<Dressing>],
        scale: &CyclotomicNumber,
        i: i64,
        v: &FockVector,
    ) -> Result<FockVector, FockError> {
        let mut out = FockVector::zero();
        for (mono, c) in &v.terms {
            self.check_degree(self.degree(mono) as i64 - i)?;
            let k = (key.clone(), mono.clone());
            let hit = self.memo.lock().unwrap().get(&k).cloned();
            let image = match hit {
                Some(x) => x,
                None => {
                    let x = Arc::new(self.apply_sum(parts, scale, i, mono));
                    debug_assert!(x.terms.keys().all(|t| self.degree(t) as i64 == self.degree(mono) as i64 - i));
                    self.memo.lock().unwrap().insert(k, x.clone());
                    x
                }
            };
            out.add_scaled(&image, c);
        }
        Ok(out)
    }

    fn inv_m(&self) -> CyclotomicNumber {
        CyclotomicNumber::from_fraction(self.m(), 1, self.m() as i64)
    }

    /// `zeta^i` coefficient of `Z(beta, zeta) = E^-(beta,zeta,k) X(beta,zeta) E^+(beta,zeta,k)`,
    /// computed as `sum_j Z^(j)`.
    pub fn apply_z(&self, beta: &[i64], i: i64, v: &FockVector) -> Result<FockVector, FockError> {
        let k = self.level;
        let parts = (0..k)
            .map(|j| {
                let e: Vec<Rational> = (0..k)
                    .map(|f| Rational::new(BigInt::one(), BigInt::from(k as i64)) - Rational::from_integer(BigInt::from((f == j) as i64)))
                    .collect();
                self.dressing(beta, &e, &e)
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.apply_memo(MemoKey::Z(beta.to_vec(), i), &parts, &self.inv_m(), i, v)
    }

    /// `zeta^i` coefficient of `X(beta, zeta)` with trivial `rho`, summed over the factors.
    pub fn apply_x(&self, beta: &[i64], i: i64, v: &FockVector) -> Result<FockVector, FockError> {
        if self.frame == Frame::Vacuum {
            return Err(FockError::NotVacuumPreserving);
        }
        let k = self.level;
        let parts = (0..k)
            .map(|j| {
                let e: Vec<Rational> = (0..k).map(|f| -Rational::from_integer(BigInt::from((f == j) as i64))).collect();
                self.dressing(beta, &e, &e)
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.apply_memo(MemoKey::X(beta.to_vec(), i), &parts, &self.inv_m(), i, v)
    }

    /// `zeta^i` piece of `E^sign(beta, zeta, r)^power` acting on every factor.
    pub fn apply_e(&self, beta: &[i64], sign: Sign, r: i64, power: i64, i: i64, v: &FockVector) -> Result<FockVector, FockError> {
        let e = vec![Rational::new(BigInt::from(power), BigInt::from(r)); self.level];
        let zero = vec![Rational::zero(); self.level];
        let d = match sign {
            Sign::Minus => {
                if i > 0 {
                    return Ok(FockVector::zero());
                }
                self.dressing(beta, &e, &zero)?
            }
            Sign::Plus => {
                if i < 0 {
                    return Ok(FockVector::zero());
                }
                self.dressing(beta, &zero, &e)?
            }
        };
        let one = CyclotomicNumber::one(self.m());
        let mut out = FockVector::zero();
        for (mono, c) in &v.terms {
            self.check_degree(self.degree(mono) as i64 - i)?;
            out.add_scaled(&self.apply_sum(std::slice::from_ref(&d), &one, i, mono), c);
        }
        Ok(out)
    }

    /// `b_j (x) t^j` acting through the coproduct: a derivation for `j > 0`,
    /// multiplication for `j < 0`.
    pub fn apply_heisenberg(&self, j: i64, v: &FockVector) -> Result<FockVector, FockError> {
        let m = self.m();
        let n = j.unsigned_abs() as u32;
        if j == 0 || self.heis.dim(j) == 0 {
            return Ok(FockVector::zero());
        }
        let mut out = FockVector::zero();
        match (self.frame, j > 0) {
            (Frame::Vacuum, true) => {}
            (Frame::Vacuum, false) => return Err(FockError::NotVacuumPreserving),
            (Frame::Tensor, true) => {
                let scale = self.heis.pairing_at(j).scale(&Rational::new(BigInt::from(j), BigInt::from(m as i64)));
                for s in 0..self.slots() {
                    let Some(var) = self.variable(s, n) else { continue };
                    for (mono, c) in &v.terms {
                        let e = mono.get(var).copied().unwrap_or(0);
                        if e > 0 {
                            let mut t = mono.clone();
                            t[var] -= 1;
                            out.add_term(t, &(c * &scale).scale_int(e as i64));
                        }
                    }
                }
            }
            (Frame::Tensor, false) => {
                self.check_degree(self.degrees(v).last().copied().unwrap_or(0) as i64 + n as i64)?;
                for s in 0..self.slots() {
                    let single = self.creation(s, n).expect("mode within bound");
                    for (mono, c) in &v.terms {
                        out.add_term(mono_mul(mono, &single), c);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, op: &OperatorMode, v: &FockVector) -> Result<FockVector, FockError> {
        match op {
            OperatorMode::Heisenberg { degree } => self.apply_heisenberg(*degree, v),
            OperatorMode::X { beta, index } => self.apply_x(beta, *index, v),
            OperatorMode::Z { beta, index } => self.apply_z(beta, *index, v),
            OperatorMode::E { beta, sign, r, power, index } => self.apply_e(beta, *sign, *r, *power, *index, v),
            OperatorMode::Compose(list) => {
                let mut cur = v.clone();
                for op in list.iter().rev() {
                    cur = self.apply(op, &cur)?;
                }
                Ok(cur)
            }
        }
    }

    /// `zeta^i` coefficient of the product `E^-(beta,k) X(beta) E^+(beta,k)`, expanded
    /// piece by piece (tensor frame only).
    pub fn apply_z_composed(&self, beta: &[i64], i: i64, v: &FockVector) -> Result<FockVector, FockError> {
        let k = self.level as i64;
        let mut out = FockVector::zero();
        let top = self.degrees(v).last().copied().unwrap_or(0) as i64;
        for c in 0..=top {
            let w = self.apply_e(beta, Sign::Plus, k, 1, c, v)?;
            if w.is_zero() {
                continue;
            }
            for b in (i - c)..=(top - c) {
                let x = self.apply_x(beta, b, &w)?;
                if x.is_zero() {
                    continue;
                }
                out = out.add(&self.apply_e(beta, Sign::Minus, k, 1, i - b - c, &x)?);
            }
        }
        Ok(out)
    }

    /// Image of `v` under a linear substitution of the variables.
    fn substitute(&self, v: &FockVector, image: &dyn Fn(usize) -> FockVector) -> FockVector {
        let m = self.m();
        let mut out = FockVector::zero();
        for (mono, c) in &v.terms {
            let mut acc = FockVector::vacuum(m);
            for (var, &e) in mono.iter().enumerate() {
                if e > 0 {
                    let img = image(var);
                    for _ in 0..e {
                        acc = acc.mul(&img);
                    }
                }
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    /// Rewrites a tensor-frame vector in the vacuum coordinates of `target`.
    pub fn to_vacuum(&self, v: &FockVector, target: &FockSpace) -> Result<FockVector, FockError> {
        if self.frame != Frame::Tensor || target.frame != Frame::Vacuum || self.level != target.level || self.modes != target.modes {
            return Err(FockError::IncompatibleSpaces);
        }
        let top = self.degrees(v).last().copied().unwrap_or(0);
        for &n in self.modes.iter().take_while(|&&n| n <= top) {
            if !self.apply_heisenberg(n as i64, v)?.is_zero() {
                return Err(FockError::NotInVacuumSpace);
            }
        }
        let m = self.m();
        let k = self.level;
        // y^(f) = r_f + ... + r_{k-2} on the vacuum space, with y^(k-1) set to 0
        Ok(self.substitute(v, &|var| {
            let f = var % k;
            let n = self.var_degree(var);
            let mut img = FockVector::zero();
            for c in f..k - 1 {
                img.add_term(target.creation(c, n).expect("same modes"), &CyclotomicNumber::one(m));
            }
            img
        }))
    }

    /// Rewrites a vacuum-frame vector in the tensor coordinates of `target`.
    pub fn to_tensor(&self, v: &FockVector, target: &FockSpace) -> Result<FockVector, FockError> {
        if self.frame != Frame::Vacuum || target.frame != Frame::Tensor || self.level != target.level || self.modes != target.modes {
            return Err(FockError::IncompatibleSpaces);
        }
        let m = self.m();
        let slots = self.slots();
        Ok(self.substitute(v, &|var| {
            let c = var % slots;
            let n = self.var_degree(var);
            let mut img = FockVector::zero();
            img.add_term(target.creation(c, n).expect("same modes"), &CyclotomicNumber::one(m));
            img.add_term(target.creation(c + 1, n).expect("same modes"), &-CyclotomicNumber::one(m));
            img
        }))
    }

    /// Terms as JSON: per-factor lists of creation degrees and the coefficient.
    pub fn to_json(&self, v: &FockVector) -> serde_json::Value {
        let terms: Vec<serde_json::Value> =
            v.terms.iter().map(|(mono, c)| serde_json::json!({ "factors": self.factor_modes(mono), "coeff": c.to_string() })).collect();
        serde_json::json!({ "level": self.level, "frame": self.frame, "terms": terms })
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `Z_{-lambda_1} ... Z_{-lambda_l} w0`, applied right to left.
pub fn z_monomial(space: &FockSpace, beta: &[i64], lambda: &Partition, w0: &FockVector) -> Result<FockVector, FockError> {
    let mut v = w0.clone();
    for &part in lambda.parts().iter().rev() {
        if v.is_zero() {
            break;
        }
        v = space.apply_z(beta, -(part as i64), &v)?;
    }
    Ok(v)
}

/// A standard module realized inside a level-`k` tensor power, with the
/// highest-weight vector carried in vacuum coordinates.
#[derive(Debug)]
pub struct ZModule {
    pub label: String,
    pub a: usize,
    pub tensor: FockSpace,
    pub vacuum: FockSpace,
    pub beta: LatticeVector,
    pub w0: FockVector,
    pub w0_degree: u32,
}

impl ZModule {
    pub fn z_monomial(&self, lambda: &Partition) -> Result<FockVector, FockError> {
        z_monomial(&self.vacuum, &self.beta, lambda, &self.w0)
    }
}

/// Level used for each built-in type.
pub const LEVEL: usize = 3;

fn structure(label: &str) -> Result<Arc<HeisenbergStructure>, FockError> {
    let data = Arc::new(TwistedCoxeterData::builtin(label)?);
    Ok(Arc::new(heisenberg_structure(data)))
}

/// The highest-weight vector `w0^(a)` in tensor coordinates.
///
/// `D4-3`: the explicit `u_1`, `u_2`, `u_3` (degrees 1, 0, 3). `A1-1`: `a = 2` is the
/// vacuum (`3 Lambda_0`) and `a = 1` the degree-1 difference vector. `A4-2`: `a = 1`
/// is the vacuum; `a >= 2` takes the first kernel vector at the `(a-1)`-th positive
/// degree carrying highest-weight vectors.
pub fn highest_weight_vector(tensor: &FockSpace, label: &str, a: usize) -> Result<FockVector, FockError> {
    let m = tensor.m();
    let unknown = || FockError::UnknownModule { label: label.to_string(), a };
    let beta1 = crate::lattice::simple_root(tensor.heis.data.rank(), 0);
    let b = |slot: usize, e: u8| -> FockVector {
        // B(-1)^e in factor `slot`
        let c = tensor.heis.coefficient(&beta1, -1);
        let mut mono = vec![0u8; tensor.variable(slot, 1).expect("degree 1 is allowed") + 1];
        mono[slot] = e;
        FockVector::monomial(mono, c.pow(e as i64).expect("nonzero"))
    };
    let one = || FockVector::vacuum(m);
    let tensor3 = |x: FockVector, y: FockVector, z: FockVector| x.mul(&y).mul(&z);
    match (label, a) {
        ("D4-3", 2) | ("A4-2", 1) | ("A1-1", 2) => Ok(one()),
        ("D4-3", 1) | ("A1-1", 1) => Ok(b(0, 1).sub(&b(1, 1))),
        ("D4-3", 3) => {
            let terms = [(1i64, [1u8, 2, 0]), (-1, [2, 1, 0]), (1, [2, 0, 1]), (-1, [1, 0, 2]), (1, [0, 1, 2]), (-1, [0, 2, 1])];
            let mut u = FockVector::zero();
            for (s, e) in terms {
                let t = tensor3(b(0, e[0]), b(1, e[1]), b(2, e[2]));
                u.add_scaled(&t, &CyclotomicNumber::from_integer(m, s));
            }
            Ok(u)
        }
        ("A4-2", a) if a >= 2 => {
            let vacuum = tensor.companion(Frame::Vacuum);
            let reps = representatives(&tensor.heis.data);
            let mut found = 0;
            for d in 1..=tensor.max_degree.min(12) {
                let ker = highest_weight_search(&vacuum, &reps, d)?;
                if !ker.is_empty() {
                    found += 1;
                    if found == a - 1 {
                        return vacuum.to_tensor(&ker[0], tensor);
                    }
                }
            }
            Err(FockError::SearchExhausted { found, wanted: a - 1, bound: tensor.max_degree.min(12) })
        }
        _ => Err(unknown()),
    }
}

fn representatives(data: &TwistedCoxeterData) -> Vec<LatticeVector> {
    data.orbits.iter().map(|o| o[0].clone()).collect()
}

/// Basis of the vacuum-space vectors of degree `d` killed by `Z_n(beta)` for
/// `1 <= n <= d` and every orbit representative `beta`; inside the vacuum space
/// this is the joint kernel of all positive-degree operators.
pub fn highest_weight_search(vacuum: &FockSpace, reps: &[LatticeVector], d: u32) -> Result<Vec<FockVector>, FockError> {
    let m = vacuum.m();
    let basis = vacuum.basis(d);
    let mut rows: BTreeMap<(usize, u32, Monomial), Vec<CyclotomicNumber>> = BTreeMap::new();
    for (col, mono) in basis.iter().enumerate() {
        let v = FockVector::monomial(mono.clone(), CyclotomicNumber::one(m));
        for (r, beta) in reps.iter().enumerate() {
            for n in 1..=d {
                for (t, c) in vacuum.apply_z(beta, n as i64, &v)?.terms {
                    rows.entry((r, n, t)).or_insert_with(|| vec![CyclotomicNumber::zero(m); basis.len()])[col] = c;
                }
            }
        }
    }
    let a: linalg::CMatrix = rows.into_values().collect();
    let null = if a.is_empty() {
        (0..basis.len()).map(|i| (0..basis.len()).map(|j| CyclotomicNumber::from_integer(m, (i == j) as i64)).collect()).collect()
    } else {
        linalg::nullspace(&a, m)
    };
    Ok(null
        .into_iter()
        .map(|x| {
            let mut v = FockVector::zero();
            for (mono, c) in basis.iter().zip(&x) {
                v.add_term(mono.clone(), c);
            }
            v
        })
        .collect())
}

/// Builds the module `(label, a)` with degrees up to `max_degree`.
pub fn standard_module(label: &str, a: usize, max_degree: u32) -> Result<ZModule, FockError> {
    let heis = structure(label)?;
    let tensor = FockSpace::new(heis, LEVEL, Frame::Tensor, max_degree)?;
    let vacuum = tensor.companion(Frame::Vacuum);
    let w = highest_weight_vector(&tensor, label, a)?;
    let w0 = tensor.to_vacuum(&w, &vacuum)?;
    let w0_degree = tensor.degrees(&w).first().copied().unwrap_or(0);
    let beta = crate::lattice::simple_root(tensor.heis.data.rank(), 0);
    Ok(ZModule { label: label.to_string(), a, tensor, vacuum, beta, w0, w0_degree })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankRow {
    pub n: u32,
    pub count: usize,
    pub rank: usize,
}

/// Number of partitions of `n` in `set`, and the rank of their Z-monomials on `w0`.
pub fn rank_of_family(module: &ZModule, set: &ConstraintSet, n: u32) -> Result<RankRow, FockError> {
    let parts = partitions::enumerate(set, n);
    let m = module.vacuum.m();
    let vectors = parts.iter().map(|l| module.z_monomial(l)).collect::<Result<Vec<_>, _>>()?;
    let mut cols: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for v in &vectors {
        for mono in v.terms.keys() {
            let next = cols.len();
            cols.entry(mono).or_insert(next);
        }
    }
    let a: linalg::CMatrix = vectors
        .iter()
        .map(|v| {
            let mut row = vec![CyclotomicNumber::zero(m); cols.len()];
            for (mono, c) in &v.terms {
                row[cols[mono]] = c.clone();
            }
            row
        })
        .collect();
    let rank = if cols.is_empty() { 0 } else { linalg::certified_rank(&a, m) };
    Ok(RankRow { n, count: parts.len(), rank })
}

/// Scalars entering the right-hand sides of the four relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationConstants {
    pub eps4: CyclotomicNumber,
    pub eps5: CyclotomicNumber,
    pub eps_neg: CyclotomicNumber,
    pub a_flat: CyclotomicNumber,
    pub b_flat: CyclotomicNumber,
    pub c_flat: CyclotomicNumber,
    pub a_nat: CyclotomicNumber,
    pub b_nat: CyclotomicNumber,
    pub d_nat: CyclotomicNumber,
    pub e_nat: CyclotomicNumber,
}

impl RelationConstants {
    fn epsilons(data: &TwistedCoxeterData) -> Result<[CyclotomicNumber; 3], FockError> {
        let b1 = &data.orbits[0][0];
        let neg: LatticeVector = b1.iter().map(|x| -x).collect();
        Ok([data.epsilon(&data.apply_nu(4, b1), b1)?, data.epsilon(&data.apply_nu(5, b1), b1)?, data.epsilon(b1, &neg)?])
    }

    /// The named constants as printed.
    pub fn printed(data: &TwistedCoxeterData) -> Result<Self, FockError> {
        let [eps4, eps5, eps_neg] = Self::epsilons(data)?;
        Ok(RelationConstants {
            eps4,
            eps5,
            eps_neg,
            a_flat: constants::a_flat(),
            b_flat: constants::b_flat(),
            c_flat: constants::c_flat(),
            a_nat: constants::a_nat(),
            b_nat: constants::b_nat(),
            d_nat: constants::d_nat(),
            e_nat: constants::e_nat(),
        })
    }

    /// The named constants read off delta combinations fitted to the G-products.
    pub fn fitted(data: &TwistedCoxeterData) -> Result<Self, FockError> {
        let [eps4, eps5, eps_neg] = Self::epsilons(data)?;
        let fit = |factors: &[(usize, i64)], sign: i32| -> Result<qseries::DeltaCombination, FockError> {
            let g = qseries::g_product(factors, 24);
            Ok(qseries::fit_delta(&qseries::symmetrized(&g, sign, 24))?.0)
        };
        let id1 = fit(&[(1, 2), (2, 1)], 1)?;
        let id3 = fit(&[(1, 2), (3, 1)], 1)?;
        let id6 = fit(&[(1, -1), (4, 1)], -1)?;
        let id8 = fit(&[(1, -1), (5, 1)], -1)?;
        Ok(RelationConstants {
            eps4,
            eps5,
            eps_neg,
            a_flat: id1.coefficient(DeltaKind::Delta, 4),
            b_flat: id1.coefficient(DeltaKind::Delta, 5),
            c_flat: id1.coefficient(DeltaKind::Delta, 6),
            a_nat: id3.coefficient(DeltaKind::Delta, 5),
            b_nat: id3.coefficient(DeltaKind::Delta, 6),
            d_nat: id6.coefficient(DeltaKind::Delta, 1),
            e_nat: id8.coefficient(DeltaKind::Delta, 1),
        })
    }
}

/// One instance `theta^(r)_{A,B}` of the four relations, as
/// `sum_p c_p (Z_{A-p} Z_{B+p} + sign Z_{B-p} Z_{A+p}) - z Z_{A+B} - z' Z'_{A+B} - scalar`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationInstance {
    pub relation: u8,
    pub a: i64,
    pub b: i64,
    /// `c_p` for `p = 0..coeffs.len()`.
    pub coeffs: Vec<CyclotomicNumber>,
    pub sign: i64,
    pub z: CyclotomicNumber,
    pub z_prime: CyclotomicNumber,
    pub scalar: CyclotomicNumber,
}

/// Series index of the `c_p` in each relation.
pub fn relation_series(relation: u8) -> Result<usize, FockError> {
    match relation {
        1 => Ok(1),
        2 => Ok(2),
        3 => Ok(3),
        4 => Ok(6),
        r => Err(FockError::UnknownRelation(r)),
    }
}

/// The relation `theta^(relation)_{A,B}` with coefficients up to `p = terms - 1`.
pub fn relation_instance(relation: u8, a: i64, b: i64, k: &RelationConstants, terms: usize) -> Result<RelationInstance, FockError> {
    let g = relation_series(relation)?;
    if relation >= 3 && (a + b) % 3 == 0 {
        return Err(FockError::Precondition { relation, a, b });
    }
    let m = 12u32;
    let w = |e: i64| CyclotomicNumber::omega_power(m, e);
    let inv_m = CyclotomicNumber::from_fraction(m, 1, 12);
    let inv_m2 = CyclotomicNumber::from_fraction(m, 1, 144);
    let zero = CyclotomicNumber::zero(m);
    let delta = a + b == 0;
    let alt = |e: i64| CyclotomicNumber::from_integer(m, if e.rem_euclid(2) == 0 { 1 } else { -1 });
    let two_minus = &w(-2 * a + 2 * b) - &w(2 * a - 2 * b);
    let two_plus = &w(-2 * a + 2 * b) + &w(2 * a - 2 * b);
    let five_minus = &w(4 * a + 9 * b) - &w(9 * a + 4 * b);
    let five_plus = &w(4 * a + 9 * b) + &w(9 * a + 4 * b);
    let (sign, z, z_prime, scalar) = match relation {
        1 => (
            -1,
            &(&k.eps4 * &inv_m) * &two_minus,
            &(&k.eps5 * &inv_m) * &five_minus,
            if delta { (&k.eps_neg * &inv_m2).scale_int(3 * a) * alt(a) } else { zero.clone() },
        ),
        2 => (
            1,
            &(&(&k.a_flat * &inv_m) * &two_plus) + &(&inv_m.scale_int(4) * &alt(a + b)),
            &(&k.b_flat * &inv_m) * &five_plus,
            if delta { (&k.c_flat * &inv_m2).scale_int(3) * alt(a) } else { zero.clone() },
        ),
        3 => (
            1,
            &inv_m.scale_int(12) * &alt(a + b),
            &(&k.a_nat * &inv_m) * &five_plus,
            if delta { (&k.b_nat * &inv_m2).scale_int(3) * alt(a) } else { zero.clone() },
        ),
        _ => {
            let one = CyclotomicNumber::one(m);
            let factor = &one - &(&k.d_nat / &k.e_nat).scale_int(3);
            (
                -1,
                &(&k.d_nat * &inv_m) * &two_minus,
                zero.clone(),
                if delta { (&factor * &inv_m2).scale_int(12 * a) * alt(a) } else { zero.clone() },
            )
        }
    };
    let coeffs = qseries::g_series(g, terms.saturating_sub(1));
    Ok(RelationInstance { relation, a, b, coeffs, sign, z, z_prime, scalar })
}

/// Operators of the D4^(3) relations acting in one space.
#[derive(Debug)]
pub struct RelationEngine {
    pub space: FockSpace,
    pub beta1: LatticeVector,
    pub beta2: LatticeVector,
}

impl RelationEngine {
    /// Level-3 D4^(3) in the given frame, degrees up to `max_degree`.
    pub fn d4(frame: Frame, max_degree: u32) -> Result<Self, FockError> {
        let heis = structure("D4-3")?;
        let beta1 = heis.data.orbits[0][0].clone();
        let beta2 = heis.data.orbits[1][0].clone();
        Ok(RelationEngine { space: FockSpace::new(heis, LEVEL, frame, max_degree)?, beta1, beta2 })
    }

    /// `theta v`; the sums over `p` stop once `Z_{B+p}` (resp. `Z_{A+p}`) kills `v`.
    pub fn apply(&self, rel: &RelationInstance, v: &FockVector) -> Result<FockVector, FockError> {
        let s = &self.space;
        let top = s.degrees(v).last().copied().unwrap_or(0) as i64;
        let mut out = FockVector::zero();
        let m = s.m();
        let sign = CyclotomicNumber::from_integer(m, rel.sign);
        // Z_{B-p'} Z_{A+p'} is Z_{A-p} Z_{B+p} with p' = p + B - A, so both sums share one loop.
        let shift = rel.b - rel.a;
        let mut p = 0.min(-shift);
        while rel.b + p <= top {
            let mut c = CyclotomicNumber::zero(m);
            for (q, factor) in [(p, None), (p + shift, Some(&sign))] {
                if q < 0 {
                    continue;
                }
                let cq = rel.coeffs.get(q as usize).ok_or(FockError::DegreeBound { degree: q, bound: rel.coeffs.len() as u32 })?;
                match factor {
                    None => c += cq,
                    Some(f) => c += &(cq * f),
                }
            }
            if !c.is_zero() {
                let inner = s.apply_z(&self.beta1, rel.b + p, v)?;
                if !inner.is_zero() {
                    out.add_scaled(&s.apply_z(&self.beta1, rel.a - p, &inner)?, &c);
                }
            }
            p += 1;
        }
        let ab = rel.a + rel.b;
        if !rel.z.is_zero() {
            out.add_scaled(&s.apply_z(&self.beta1, ab, v)?, &-&rel.z);
        }
        if !rel.z_prime.is_zero() {
            out.add_scaled(&s.apply_z(&self.beta2, ab, v)?, &-&rel.z_prime);
        }
        out.add_scaled(v, &-&rel.scalar);
        Ok(out)
    }

    /// Applies the relation to every basis monomial of degree `<= max_deg`;
    /// returns the first nonzero residual.
    pub fn verify(&self, rel: &RelationInstance, max_deg: u32) -> Result<RelationCheck, FockError> {
        let m = self.space.m();
        let mut checked = 0;
        for d in 0..=max_deg {
            for mono in self.space.basis(d) {
                let v = FockVector::monomial(mono.clone(), CyclotomicNumber::one(m));
                let r = self.apply(rel, &v)?;
                checked += 1;
                if !r.is_zero() {
                    let (t, c) = r.terms.iter().next().expect("nonzero");
                    return Ok(RelationCheck {
                        relation: rel.relation,
                        a: rel.a,
                        b: rel.b,
                        checked,
                        witness: Some(Witness {
                            vector: self.space.factor_modes(&mono),
                            term: self.space.factor_modes(t),
                            coeff: c.to_string(),
                        }),
                    });
                }
            }
        }
        Ok(RelationCheck { relation: rel.relation, a: rel.a, b: rel.b, checked, witness: None })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub vector: Vec<Vec<u32>>,
    pub term: Vec<Vec<u32>>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: u8,
    pub a: i64,
    pub b: i64,
    pub checked: usize,
    pub witness: Option<Witness>,
}

impl RelationCheck {
    pub fn vanishes(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks relation `relation` for the pair `(A, B)` on degrees `<= max_deg`.
pub fn verify_relation(
    engine: &RelationEngine,
    k: &RelationConstants,
    relation: u8,
    a: i64,
    b: i64,
    max_deg: u32,
) -> Result<RelationCheck, FockError> {
    let terms = (max_deg as i64 - a.min(b)).max(0) as usize + 1;
    let rel = relation_instance(relation, a, b, k, terms)?;
    engine.verify(&rel, max_deg)
}

/// `i` is higher than `j` (equal lengths are compared by suffix sums).
pub fn is_higher(i: &[i64], j: &[i64]) -> bool {
    if i.len() != j.len() {
        return i.len() < j.len();
    }
    i != j && (0..i.len()).all(|p| i[p..].iter().sum::<i64>() >= j[p..].iter().sum::<i64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StraightenCase {
    /// `A > B`, `A + 5 != B (mod 12)`.
    Generic,
    /// `A > B`, `A + 5 = B (mod 12)`.
    Shifted,
    /// `A = B`, `2A` not divisible by 3.
    Diagonal,
    /// `B = A + 1`, `2A + 1` not divisible by 3.
    Adjacent,
}

/// A combination of relations whose `Z_A Z_B` coefficient is 1:
/// `sum_q pairs[q] Z_{A-q} Z_{B+q} + d Z_{A+B} + d' Z'_{A+B} + e`.
/// `d'` vanishes except in the [`StraightenCase::Shifted`] case.
#[derive(Debug, Clone, Serialize)]
pub struct Straightened {
    pub a: i64,
    pub b: i64,
    pub case: StraightenCase,
    /// Coefficient of `Z_A Z_B` before normalization.
    pub leading: CyclotomicNumber,
    /// `(q, coefficient of Z_{A-q} Z_{B+q})`, nonzero entries only.
    pub pairs: Vec<(i64, CyclotomicNumber)>,
    pub d: CyclotomicNumber,
    pub d_prime: CyclotomicNumber,
    pub e: CyclotomicNumber,
    /// `(weight, relation, A', B')`, already divided by `leading`.
    pub combination: Vec<(CyclotomicNumber, u8, i64, i64)>,
}

impl Straightened {
    pub fn pair(&self, q: i64) -> CyclotomicNumber {
        self.pairs.iter().find(|(p, _)| *p == q).map(|(_, c)| c.clone()).unwrap_or_else(|| CyclotomicNumber::zero(12))
    }

    /// Every monomial other than `Z_A Z_B` is higher than `(A, B)`.
    pub fn remainder_is_higher(&self) -> bool {
        self.pairs.iter().filter(|(q, _)| *q != 0).all(|(q, _)| is_higher(&[self.a - q, self.b + q], &[self.a, self.b]))
    }

    /// Applies the combination to all basis vectors of degree `<= max_deg`.
    pub fn verify(&self, engine: &RelationEngine, k: &RelationConstants, max_deg: u32) -> Result<bool, FockError> {
        let m = engine.space.m();
        let rels = self
            .combination
            .iter()
            .map(|(w, r, a, b)| {
                let terms = (max_deg as i64 - a.min(b)).max(0) as usize + 1;
                Ok((w.clone(), relation_instance(*r, *a, *b, k, terms)?))
            })
            .collect::<Result<Vec<_>, FockError>>()?;
        for d in 0..=max_deg {
            for mono in engine.space.basis(d) {
                let v = FockVector::monomial(mono, CyclotomicNumber::one(m));
                let mut acc = FockVector::zero();
                for (w, rel) in &rels {
                    acc.add_scaled(&engine.apply(rel, &v)?, w);
                }
                if !acc.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Builds the normalized straightening relation for `Z_A Z_B`, keeping pair
/// coefficients up to `q = depth`.
pub fn straighten_pair(a: i64, b: i64, k: &RelationConstants, depth: i64) -> Result<Straightened, FockError> {
    let m = 12u32;
    let w = |e: i64| CyclotomicNumber::omega_power(m, e);
    let one = CyclotomicNumber::one(m);
    let ratio = &k.b_flat / &k.a_nat;
    let (case, combo): (StraightenCase, Vec<(CyclotomicNumber, u8, i64, i64)>) = if a > b && (a + 5 - b).rem_euclid(12) != 0 {
        let plus = &w(4 * a + 9 * b) + &w(9 * a + 4 * b);
        let minus = &w(4 * a + 9 * b) - &w(9 * a + 4 * b);
        (StraightenCase::Generic, vec![(&k.b_flat * &plus, 1, a, b), (-(&k.eps5 * &minus), 2, a, b)])
    } else if a > b {
        (StraightenCase::Shifted, vec![(-one.clone(), 1, a + 1, b - 1), (one.clone(), 2, a + 1, b - 1)])
    } else if a == b && (2 * a) % 3 != 0 {
        (StraightenCase::Diagonal, vec![(one.clone(), 2, a, a), (-ratio.clone(), 3, a, a)])
    } else if b == a + 1 && (2 * a + 1) % 3 != 0 {
        let c6 = qseries::g_series(6, 0)[0].clone();
        (StraightenCase::Adjacent, vec![(c6.clone(), 2, a, b), (-(&c6 * &ratio), 3, a, b), (&one - &ratio, 4, a, b)])
    } else {
        return Err(FockError::Uncovered(a, b));
    };
    // expand: every product is Z_{A-q} Z_{B+q}
    let terms = (depth + (a - b).abs() + 3) as usize;
    let mut pairs: BTreeMap<i64, CyclotomicNumber> = BTreeMap::new();
    let mut d = CyclotomicNumber::zero(m);
    let mut d_prime = CyclotomicNumber::zero(m);
    let mut e = CyclotomicNumber::zero(m);
    for (wt, r, ra, rb) in &combo {
        let inst = relation_instance(*r, *ra, *rb, k, terms)?;
        for (p, c) in inst.coeffs.iter().enumerate() {
            let p = p as i64;
            for (first, factor) in [(ra - p, wt.clone()), (rb - p, wt.scale_int(inst.sign))] {
                let q = a - first;
                if q <= depth {
                    *pairs.entry(q).or_insert_with(|| CyclotomicNumber::zero(m)) += &(c * &factor);
                }
            }
        }
        d -= &(wt * &inst.z);
        d_prime -= &(wt * &inst.z_prime);
        e -= &(wt * &inst.scalar);
    }
    let leading = pairs.get(&0).cloned().unwrap_or_else(|| CyclotomicNumber::zero(m));
    if leading.is_zero() {
        return Err(FockError::Uncovered(a, b));
    }
    let inv = leading.inv().expect("nonzero");
    Ok(Straightened {
        a,
        b,
        case,
        leading,
        pairs: pairs.into_iter().filter(|(_, c)| !c.is_zero()).map(|(q, c)| (q, &c * &inv)).collect(),
        d: &d * &inv,
        d_prime: &d_prime * &inv,
        e: &e * &inv,
        combination: combo.into_iter().map(|(wt, r, ra, rb)| (&wt * &inv, r, ra, rb)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d4_space(level: usize, frame: Frame, max: u32) -> FockSpace {
        FockSpace::new(structure("D4-3").unwrap(), level, frame, max).unwrap()
    }

    fn c(s: &str) -> CyclotomicNumber {
        CyclotomicNumber::parse(12, s).unwrap()
    }

    #[test]
    fn d4_structure() {
        let h = structure("D4-3").unwrap();
        assert_eq!(h.nonzero_residues(), vec![1, 5, 7, 11]);
        assert!(h.nonzero_residues().iter().all(|&i| h.dim(i as i64) == 1));
        let total: usize = (0..12).map(|i| h.dim(i)).sum();
        assert_eq!(total, 4);
        assert!(!h.pair(&h.basis[1][0], &h.basis[11][0]).is_zero());
        assert!(h.pair(&h.basis[1][0], &h.basis[7][0]).is_zero());
        let a1 = structure("A1-1").unwrap();
        assert_eq!(a1.nonzero_residues(), vec![1]);
    }

    #[test]
    fn vacuum_actions() {
        let s = d4_space(1, Frame::Tensor, 8);
        let b1 = s.heis.data.orbits[0][0].clone();
        let vac = s.vacuum();
        assert_eq!(s.apply_e(&b1, Sign::Plus, 1, 1, 0, &vac).unwrap(), vac);
        assert!(s.apply_e(&b1, Sign::Plus, 1, 1, 2, &vac).unwrap().is_zero());
        let e1 = s.apply_e(&b1, Sign::Minus, 1, 1, -1, &vac).unwrap();
        let cm = s.heis.coefficient(&b1, -1);
        assert_eq!(e1, FockVector::monomial(s.creation(0, 1).unwrap(), cm.scale_int(-12)));
        assert_eq!(s.apply_x(&b1, 0, &vac).unwrap(), vac.scale(&CyclotomicNumber::from_fraction(12, 1, 12)));
        assert!(s.apply_x(&b1, 1, &vac).unwrap().is_zero());
        let s3 = d4_space(3, Frame::Tensor, 8);
        assert_eq!(s3.apply_x(&b1, 0, &vac).unwrap(), vac.scale(&CyclotomicNumber::from_fraction(12, 3, 12)));
    }

    #[test]
    fn kernels_and_highest_weight() {
        let m2 = standard_module("D4-3", 2, 10).unwrap();
        let m3 = standard_module("D4-3", 3, 10).unwrap();
        assert_eq!(m3.w0_degree, 3);
        assert!(m2.vacuum.apply_z(&m2.beta, -1, &m2.w0).unwrap().is_zero());
        assert!(m3.vacuum.apply_z(&m3.beta, -1, &m3.w0).unwrap().is_zero());
        assert!(m3.vacuum.apply_z(&m3.beta, -2, &m3.w0).unwrap().is_zero());
        let m1 = standard_module("D4-3", 1, 10).unwrap();
        assert_eq!(m1.w0_degree, 1);
        let v = m1.z_monomial(&Partition::new(vec![1]).unwrap()).unwrap();
        assert!(!v.is_zero());
        assert_eq!(m1.vacuum.degrees(&v), vec![2]);
    }

    #[test]
    fn fitted_constants() {
        let data = TwistedCoxeterData::builtin("D4-3").unwrap();
        let p = RelationConstants::printed(&data).unwrap();
        let f = RelationConstants::fitted(&data).unwrap();
        assert_eq!(f.a_flat, c("4 + 4*w - 2*w^3"));
        assert_ne!(f.a_flat, p.a_flat);
        assert_eq!(
            (&f.b_flat, &f.c_flat, &f.a_nat, &f.b_nat, &f.d_nat, &f.e_nat),
            (&p.b_flat, &p.c_flat, &p.a_nat, &p.b_nat, &p.d_nat, &p.e_nat)
        );
    }

    #[test]
    fn straightening_constants() {
        let data = TwistedCoxeterData::builtin("D4-3").unwrap();
        let k = RelationConstants::fitted(&data).unwrap();
        let s = straighten_pair(1, 6, &k, 4);
        assert!(s.is_err());
        let shifted = straighten_pair(4, -3, &k, 4).unwrap();
        assert_eq!(shifted.case, StraightenCase::Shifted);
        assert_eq!(shifted.leading, c("2"));
        // the pair used is (A+1, B-1), where the Z' elimination does not degenerate
        assert!(!shifted.d_prime.is_zero());
        let g = straighten_pair(4, 2, &k, 4).unwrap();
        let third = CyclotomicNumber::from_fraction(12, 1, 3);
        assert_eq!(g.pair(1), &(&c("w") * &c("2 - w^2")) * &third);
        let dg = straighten_pair(4, 4, &k, 4).unwrap();
        assert_eq!(dg.leading, c("-1 - 2*w + w^3").scale_int(2));
        assert_eq!(dg.pair(1), &c("3 + 2*w - w^3") * &third);
        let adj = straighten_pair(3, 4, &k, 4).unwrap();
        assert_eq!(adj.leading, c("2 + 2*w - w^3").scale_int(8));
        assert!(adj.pair(-1).is_zero());
        assert!(shifted.remainder_is_higher());
        for s in [&g, &dg, &adj] {
            assert!(s.remainder_is_higher());
            assert!(s.d_prime.is_zero());
        }
    }
}
