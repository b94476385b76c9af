//! Simply-laced root lattices, twisted Coxeter automorphisms, the epsilon
//! cocycle and eigenprojections.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::{CyclotomicNumber, Rational};
use crate::linalg;

pub type LatticeVector = Vec<i64>;
pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("Cartan matrix must be symmetric with diagonal 2")]
    NotSimplyLaced,
    #[error("sigma is not a permutation of 1..{0}")]
    BadPermutation(usize),
    #[error("sigma does not preserve the Cartan matrix")]
    SigmaNotAutomorphism,
    #[error("representatives do not hit each sigma-orbit exactly once")]
    NotTransversal,
    #[error("unknown root system `{0}`")]
    UnknownType(String),
    #[error("config parse error: {0}")]
    Config(String),
    #[error("{0} is not a root")]
    NotARoot(String),
    #[error("epsilon factor with vanishing base")]
    VanishingBase,
}

/// A simply-laced Cartan matrix with a diagram automorphism and orbit representatives.
///
/// `sigma` and `representatives` are 1-based, as in the TOML schema:
///
/// ```toml
/// label = "D4-3"
/// cartan = [[2,-1,0,0],[-1,2,-1,-1],[0,-1,2,0],[0,-1,0,2]]
/// sigma = [3,2,4,1]
/// representatives = [1,2]
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystemConfig {
    pub label: String,
    pub cartan: IntMatrix,
    pub sigma: Vec<usize>,
    pub representatives: Vec<usize>,
}

fn a_cartan(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

impl RootSystemConfig {
    /// Built-in configurations: `A1-1`, `A2-2`, `A4-2`, `D4-3`.
    pub fn builtin(label: &str) -> Result<Self, LatticeError> {
        let cfg = match label {
            "A1-1" => RootSystemConfig { label: label.into(), cartan: a_cartan(1), sigma: vec![1], representatives: vec![1] },
            "A2-2" => RootSystemConfig { label: label.into(), cartan: a_cartan(2), sigma: vec![2, 1], representatives: vec![1] },
            "A4-2" => RootSystemConfig { label: label.into(), cartan: a_cartan(4), sigma: vec![4, 3, 2, 1], representatives: vec![1, 2] },
            // node 2 is the centre of the D4 diagram
            "D4-3" => RootSystemConfig {
                label: label.into(),
                cartan: vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]],
                sigma: vec![3, 2, 4, 1],
                representatives: vec![1, 2],
            },
            other => return Err(LatticeError::UnknownType(other.to_string())),
        };
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, LatticeError> {
        let cfg: RootSystemConfig = toml::from_str(text).map_err(|e| LatticeError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let n = self.rank();
        for row in &self.cartan {
            if row.len() != n {
                return Err(LatticeError::Dimension { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            if self.cartan[i][i] != 2 {
                return Err(LatticeError::NotSimplyLaced);
            }
            for j in 0..n {
                if self.cartan[i][j] != self.cartan[j][i] {
                    return Err(LatticeError::NotSimplyLaced);
                }
            }
        }
        let mut seen = vec![false; n];
        if self.sigma.len() != n {
            return Err(LatticeError::BadPermutation(n));
        }
        for &s in &self.sigma {
            if s == 0 || s > n || seen[s - 1] {
                return Err(LatticeError::BadPermutation(n));
            }
            seen[s - 1] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if self.cartan[self.sigma[i] - 1][self.sigma[j] - 1] != self.cartan[i][j] {
                    return Err(LatticeError::SigmaNotAutomorphism);
                }
            }
        }
        let orbit_of = |i: usize| -> Vec<usize> {
            let mut orb = vec![i];
            let mut j = self.sigma[i] - 1;
            while j != i {
                orb.push(j);
                j = self.sigma[j] - 1;
            }
            orb
        };
        let mut covered = vec![0usize; n];
        for &r in &self.representatives {
            if r == 0 || r > n {
                return Err(LatticeError::NotTransversal);
            }
            for j in orbit_of(r - 1) {
                covered[j] += 1;
            }
        }
        if covered.iter().any(|&c| c != 1) {
            return Err(LatticeError::NotTransversal);
        }
        Ok(())
    }

    /// `<x, y> = x^T X y`.
    pub fn bilinear_form(&self, x: &[i64], y: &[i64]) -> Result<i64, LatticeError> {
        let n = self.rank();
        for v in [x, y] {
            if v.len() != n {
                return Err(LatticeError::Dimension { expected: n, got: v.len() });
            }
        }
        Ok(form(&self.cartan, x, y))
    }
}

fn form(cartan: &IntMatrix, x: &[i64], y: &[i64]) -> i64 {
    let mut s = 0;
    for (i, xi) in x.iter().enumerate() {
        if *xi != 0 {
            for (j, yj) in y.iter().enumerate() {
                s += xi * cartan[i][j] * yj;
            }
        }
    }
    s
}

fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn mat_vec(a: &IntMatrix, v: &[i64]) -> LatticeVector {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Simple unit vector `beta_i` (0-based `i`).
pub fn simple_root(n: usize, i: usize) -> LatticeVector {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Root of an entry in an orbit table: `nu^power(beta_rep)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitPosition {
    /// 1-based representative index.
    pub representative: usize,
    pub power: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitSumEntry {
    pub p: usize,
    pub root: LatticeVector,
    pub position: OrbitPosition,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitSumTable {
    pub c_minus1: Vec<usize>,
    pub c_minus2: Vec<usize>,
    pub sums: Vec<OrbitSumEntry>,
}

/// The twisted Coxeter automorphism `nu` and everything derived from it.
#[derive(Debug)]
pub struct TwistedCoxeterData {
    pub config: RootSystemConfig,
    pub nu: IntMatrix,
    pub m: u32,
    nu_powers: Vec<IntMatrix>,
    /// `orbits[r][j] = nu^j(beta_rep_r)`.
    pub orbits: Vec<Vec<LatticeVector>>,
    eps_cache: RwLock<HashMap<(LatticeVector, LatticeVector), CyclotomicNumber>>,
}

impl TwistedCoxeterData {
    /// `nu = s_{i_1} ... s_{i_j} sigma'` with the representatives taken in listed order.
    pub fn build(cfg: &RootSystemConfig) -> Result<Self, LatticeError> {
        cfg.validate()?;
        let n = cfg.rank();
        let mut perm = vec![vec![0; n]; n];
        for i in 0..n {
            perm[cfg.sigma[i] - 1][i] = 1;
        }
        let mut nu = identity(n);
        for &r in &cfg.representatives {
            let i = r - 1;
            let mut s = identity(n);
            for l in 0..n {
                s[i][l] -= cfg.cartan[i][l];
            }
            nu = mat_mul(&nu, &s);
        }
        nu = mat_mul(&nu, &perm);
        let id = identity(n);
        let mut nu_powers = vec![id.clone()];
        let mut cur = nu.clone();
        while cur != id {
            nu_powers.push(cur.clone());
            cur = mat_mul(&cur, &nu);
            assert!(nu_powers.len() <= 1 << 12, "nu has finite order");
        }
        let m = nu_powers.len() as u32;
        let orbits = cfg.representatives.iter().map(|&r| nu_powers.iter().map(|p| mat_vec(p, &simple_root(n, r - 1))).collect()).collect();
        Ok(TwistedCoxeterData { config: cfg.clone(), nu, m, nu_powers, orbits, eps_cache: RwLock::new(HashMap::new()) })
    }

    pub fn builtin(label: &str) -> Result<Self, LatticeError> {
        Self::build(&RootSystemConfig::builtin(label)?)
    }

    pub fn rank(&self) -> usize {
        self.config.rank()
    }

    pub fn form(&self, x: &[i64], y: &[i64]) -> i64 {
        form(&self.config.cartan, x, y)
    }

    /// `nu^p` for any integer `p`.
    pub fn nu_power(&self, p: i64) -> &IntMatrix {
        &self.nu_powers[p.rem_euclid(self.m as i64) as usize]
    }

    pub fn apply_nu(&self, p: i64, v: &[i64]) -> LatticeVector {
        mat_vec(self.nu_power(p), v)
    }

    pub fn is_root(&self, v: &[i64]) -> bool {
        self.form(v, v) == 2
    }

    /// Locates a root in the orbit tables.
    pub fn orbit_position(&self, v: &[i64]) -> Option<OrbitPosition> {
        for (r, orbit) in self.orbits.iter().enumerate() {
            if let Some(j) = orbit.iter().position(|w| w.as_slice() == v) {
                return Some(OrbitPosition { representative: self.config.representatives[r], power: j });
            }
        }
        None
    }

    /// `eps(beta, beta') = prod_{p=1}^{m-1} (1 - w^{-p})^{<nu^p beta, beta'>}`.
    pub fn epsilon(&self, beta: &[i64], beta2: &[i64]) -> Result<CyclotomicNumber, LatticeError> {
        let key = (beta.to_vec(), beta2.to_vec());
        if let Some(v) = self.eps_cache.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let m = self.m;
        let one = CyclotomicNumber::one(m);
        let mut acc = one.clone();
        for p in 1..m as i64 {
            let e = self.form(&self.apply_nu(p, beta), beta2);
            if e != 0 {
                let base = &one - &CyclotomicNumber::omega_power(m, -p);
                let f = base.pow(e).map_err(|_| LatticeError::VanishingBase)?;
                acc = &acc * &f;
            }
        }
        self.eps_cache.write().unwrap().insert(key, acc.clone());
        Ok(acc)
    }

    /// `pr_i(beta) = (1/m) sum_p w^{-ip} nu^p(beta)`, with coordinates in the simple-root basis.
    pub fn project(&self, beta: &[i64], i: i64) -> Vec<CyclotomicNumber> {
        let m = self.m;
        let n = self.rank();
        let mut out = vec![CyclotomicNumber::zero(m); n];
        for p in 0..m as i64 {
            let w = CyclotomicNumber::omega_power(m, -i * p);
            for (k, c) in self.apply_nu(p, beta).into_iter().enumerate() {
                if c != 0 {
                    out[k] += &w.scale_int(c);
                }
            }
        }
        let inv_m = Rational::new(1.into(), (m as i64).into());
        out.iter().map(|z| z.scale(&inv_m)).collect()
    }

    /// Applies `nu` to a cyclotomic coordinate vector.
    pub fn apply_nu_cyclo(&self, v: &[CyclotomicNumber]) -> Vec<CyclotomicNumber> {
        let m = self.m;
        self.nu
            .iter()
            .map(|row| {
                let mut s = CyclotomicNumber::zero(m);
                for (c, x) in row.iter().zip(v) {
                    if *c != 0 {
                        s += &x.scale_int(*c);
                    }
                }
                s
            })
            .collect()
    }

    /// Basis of `ker(nu - w^i)`, each vector normalized so its first nonzero coordinate is 1.
    pub fn eigenspace(&self, i: i64) -> Vec<Vec<CyclotomicNumber>> {
        let m = self.m;
        let n = self.rank();
        let wi = CyclotomicNumber::omega_power(m, i);
        let a: linalg::CMatrix = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let mut z = CyclotomicNumber::from_integer(m, self.nu[r][c]);
                        if r == c {
                            z -= &wi;
                        }
                        z
                    })
                    .collect()
            })
            .collect();
        let mut basis = linalg::nullspace(&a, m);
        for v in basis.iter_mut() {
            normalize_first(v);
        }
        basis
    }

    /// `C_l` sets and the roots `nu^p beta + beta'` for `p in C_{-1}`.
    pub fn root_orbit_sum_check(&self, beta: &[i64], beta2: &[i64]) -> Result<OrbitSumTable, LatticeError> {
        for v in [beta, beta2] {
            if !self.is_root(v) {
                return Err(LatticeError::NotARoot(format!("{v:?}")));
            }
        }
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        let mut sums = Vec::new();
        for p in 0..self.m as usize {
            let nb = self.apply_nu(p as i64, beta);
            match self.form(&nb, beta2) {
                -1 => {
                    c1.push(p);
                    let root: LatticeVector = nb.iter().zip(beta2).map(|(a, b)| a + b).collect();
                    let position = self.orbit_position(&root).ok_or_else(|| LatticeError::NotARoot(format!("{root:?}")))?;
                    sums.push(OrbitSumEntry { p, root, position });
                }
                -2 => c2.push(p),
                _ => {}
            }
        }
        Ok(OrbitSumTable { c_minus1: c1, c_minus2: c2, sums })
    }
}

/// Scales a nonzero vector so that its first nonzero entry is 1.
pub fn normalize_first(v: &mut [CyclotomicNumber]) {
    if let Some(lead) = v.iter().find(|z| !z.is_zero()).cloned() {
        let inv = lead.inv().expect("nonzero");
        for z in v.iter_mut() {
            *z = &*z * &inv;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d4() -> TwistedCoxeterData {
        TwistedCoxeterData::builtin("D4-3").unwrap()
    }

    #[test]
    fn d4_forms() {
        let cfg = RootSystemConfig::builtin("D4-3").unwrap();
        let b = |i| simple_root(4, i);
        assert_eq!(cfg.bilinear_form(&b(0), &b(0)).unwrap(), 2);
        assert_eq!(cfg.bilinear_form(&b(0), &b(1)).unwrap(), -1);
        assert_eq!(cfg.bilinear_form(&b(0), &b(2)).unwrap(), 0);
        assert!(cfg.bilinear_form(&b(0), &[1, 0]).is_err());
    }

    #[test]
    fn d4_nu() {
        let d = d4();
        assert_eq!(d.m, 12);
        assert_eq!(d.apply_nu(1, &simple_root(4, 0)), vec![1, 1, 1, 0]);
        let minus_id: IntMatrix = identity(4).iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        assert_eq!(*d.nu_power(6), minus_id);
    }

    #[test]
    fn d4_orbit_table() {
        let d = d4();
        // nu^j(beta_1) and nu^j(beta_2) for j = 1..5
        let b1 = [[1, 1, 1, 0], [1, 1, 1, 1], [1, 2, 1, 1], [0, 1, 1, 1], [0, 1, 0, 1]];
        let b2 = [[-1, -1, 0, 0], [0, 0, -1, 0], [-1, -1, 0, -1], [0, -1, -1, 0], [0, 0, 0, -1]];
        for j in 0..5 {
            assert_eq!(d.orbits[0][j + 1], b1[j].to_vec(), "nu^{} beta1", j + 1);
            assert_eq!(d.orbits[1][j + 1], b2[j].to_vec(), "nu^{} beta2", j + 1);
        }
    }

    #[test]
    fn a_types() {
        let a1 = TwistedCoxeterData::builtin("A1-1").unwrap();
        assert_eq!(a1.m, 2);
        assert_eq!(a1.apply_nu(1, &[1]), vec![-1]);
        assert_eq!(TwistedCoxeterData::builtin("A4-2").unwrap().m, 10);
        assert_eq!(TwistedCoxeterData::builtin("A2-2").unwrap().m, 6);
    }

    #[test]
    fn epsilon_values() {
        let d = d4();
        let b1 = simple_root(4, 0);
        let e4 = d.epsilon(&d.apply_nu(4, &b1), &b1).unwrap();
        let e5 = d.epsilon(&d.apply_nu(5, &b1), &b1).unwrap();
        assert_eq!(e4, CyclotomicNumber::parse(12, "4 - 8*w^2 - 6*w^3").unwrap());
        assert_eq!(e5, CyclotomicNumber::parse(12, "-52 + 104*w^2 + 90*w^3").unwrap());
    }

    #[test]
    fn orbit_sums() {
        let d = d4();
        let b1 = simple_root(4, 0);
        let t = d.root_orbit_sum_check(&b1, &b1).unwrap();
        assert_eq!(t.c_minus1, vec![4, 5, 7, 8]);
        assert_eq!(t.c_minus2, vec![6]);
        let at = |p| t.sums.iter().find(|e| e.p == p).unwrap().position.clone();
        assert_eq!(at(5), OrbitPosition { representative: 2, power: 9 });
        assert_eq!(at(4), OrbitPosition { representative: 1, power: 2 });
        assert_eq!(at(8), OrbitPosition { representative: 1, power: 10 });
    }

    /// Independent eigenvalue oracle: nonzero projections occur exactly where
    /// the eigenspace is nontrivial.
    #[test]
    fn projections_match_eigenspaces() {
        for (label, expect) in [("D4-3", vec![1, 5, 7, 11]), ("A4-2", vec![1, 3, 7, 9]), ("A1-1", vec![1])] {
            let d = TwistedCoxeterData::builtin(label).unwrap();
            let b1 = simple_root(d.rank(), 0);
            let mut nonzero = Vec::new();
            let mut total = 0;
            for i in 0..d.m as i64 {
                let dim = d.eigenspace(i).len();
                total += dim;
                let pr = d.project(&b1, i);
                let nz = pr.iter().any(|z| !z.is_zero());
                if nz {
                    nonzero.push(i);
                    assert!(dim >= 1);
                    assert_eq!(d.apply_nu_cyclo(&pr), pr.iter().map(|z| z * &CyclotomicNumber::omega_power(d.m, i)).collect::<Vec<_>>());
                }
            }
            assert_eq!(total, d.rank(), "{label}");
            assert_eq!(nonzero, expect, "{label}");
        }
    }

    #[test]
    fn resolution_of_identity() {
        let d = d4();
        for r in 0..4 {
            let b = simple_root(4, r);
            let mut sum = vec![CyclotomicNumber::zero(12); 4];
            for i in 0..12 {
                for (s, z) in sum.iter_mut().zip(d.project(&b, i)) {
                    *s += &z;
                }
            }
            let expect: Vec<_> = b.iter().map(|&c| CyclotomicNumber::from_integer(12, c)).collect();
            assert_eq!(sum, expect);
        }
    }

    #[test]
    fn config_errors() {
        let mut c = RootSystemConfig::builtin("D4-3").unwrap();
        c.representatives = vec![1];
        assert_eq!(c.validate(), Err(LatticeError::NotTransversal));
        c.representatives = vec![1, 3, 2];
        assert_eq!(c.validate(), Err(LatticeError::NotTransversal));
        let text =
            "label = \"D4-3\"\ncartan = [[2,-1,0,0],[-1,2,-1,-1],[0,-1,2,0],[0,-1,0,2]]\nsigma = [3,2,4,1]\nrepresentatives = [1,2]\n";
        assert_eq!(RootSystemConfig::from_toml(text).unwrap(), RootSystemConfig::builtin("D4-3").unwrap());
        assert!(RootSystemConfig::builtin("E8").is_err());
    }
}
