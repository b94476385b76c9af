//! Simultaneous q-difference systems read off an automaton, their uncoupling
//! into a scalar recurrence, and certification by series annihilation.
//!
//! Operators live in the Ore ring `Z[x, q][s]` where `s f(x) = f(xq)`; an
//! operator is stored as its coefficient list `[a_0, a_1, ...]`, meaning
//! `sum a_i(x, q) s^i`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::automata::{weighted_count, Dfa};
use crate::poly::{Poly2, PolyError};
use crate::qseries::{apply_recurrence, BivariateSeries, SeriesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QdiffError {
    #[error("start state is accepting; the complement language is empty")]
    EmptyComplement,
    #[error("elimination degenerated with {remaining} equations left")]
    Degenerate { remaining: usize },
    #[error("reference data line {line}: {msg}")]
    Fixture { line: usize, msg: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `f_v(x) = sum_u matrix[v][u] f_u(xq)` over the non-accepting states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimultaneousSystem {
    /// DFA state ids of the unknowns.
    pub states: Vec<usize>,
    pub matrix: Vec<Vec<Poly2>>,
    /// Index of the start state within `states`.
    pub start: usize,
}

/// The published simultaneous system for the reference `L_3` automaton, rows and columns
/// over the non-accepting states in order.
pub const REFERENCE_L3_SYSTEM: [[&str; 10]; 10] = [
    ["0", "1", "xq", "0", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "1", "xq", "0", "0", "0", "0", "0"],
    ["0", "1", "0", "0", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "1", "xq", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "0", "0", "1", "0", "0"],
    ["0", "0", "0", "0", "0", "1", "xq", "0", "x^2q^2", "0"],
    ["0", "0", "xq", "1", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "1", "0", "0", "0", "xq"],
    ["0", "0", "0", "0", "1", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "1", "0", "0", "0", "0", "0", "0"],
];

/// Entry `(v, u)` is `sum x^a q^a` over letters `a` with `delta(v, a) = u`.
pub fn system_from_dfa(dfa: &Dfa) -> Result<SimultaneousSystem, QdiffError> {
    if dfa.accepting[dfa.start] {
        return Err(QdiffError::EmptyComplement);
    }
    let states: Vec<usize> = (0..dfa.len()).filter(|&s| !dfa.accepting[s]).collect();
    let index: BTreeMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let n = states.len();
    let mut matrix = vec![vec![Poly2::zero(); n]; n];
    for (v, &s) in states.iter().enumerate() {
        for (a, &t) in dfa.delta[s].iter().enumerate() {
            if let Some(&u) = index.get(&t) {
                matrix[v][u].add_term(a as u32, a as u32, BigInt::one());
            }
        }
    }
    Ok(SimultaneousSystem { start: index[&dfa.start], states, matrix })
}

/// `sum_r polys[r](x, q) f(x q^r, q) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScalarRecurrence {
    pub polys: Vec<Poly2>,
}

impl ScalarRecurrence {
    pub fn order(&self) -> usize {
        self.polys.len().saturating_sub(1)
    }

    /// Removes common content and fixes the sign so that the trailing coefficient of `p_0` is positive.
    pub fn normalized(&self) -> ScalarRecurrence {
        let mut polys = normalize_content(&self.polys);
        let mut first = 0;
        while first < polys.len() && polys[first].is_zero() {
            first += 1;
        }
        polys.drain(..first.min(polys.len()));
        if first > 0 && !polys.is_empty() {
            polys = normalize_content(&unshift(&polys, first as u32));
        }
        while polys.last().is_some_and(Poly2::is_zero) {
            polys.pop();
        }
        if polys.first().and_then(Poly2::trailing_coeff).is_some_and(|c| c.is_negative()) {
            polys = polys.iter().map(|p| -p).collect();
        }
        ScalarRecurrence { polys }
    }

    /// True if `self = c * other` for a rational function `c`.
    pub fn proportional_to(&self, other: &ScalarRecurrence) -> bool {
        if self.polys.len() != other.polys.len() {
            return false;
        }
        let k = self.polys.iter().position(|p| !p.is_zero());
        let Some(k) = k else { return other.polys.iter().all(Poly2::is_zero) };
        if other.polys[k].is_zero() {
            return false;
        }
        self.polys.iter().zip(&other.polys).all(|(a, b)| (a * &other.polys[k]) == (b * &self.polys[k]))
    }

    /// Equal up to an overall sign.
    pub fn equal_up_to_sign(&self, other: &ScalarRecurrence) -> bool {
        self.polys == other.polys || self.polys.iter().zip(&other.polys).all(|(a, b)| a == &-b) && self.polys.len() == other.polys.len()
    }
}

/// Rewrites `sum_{i >= k} a_i s^i` as the operator `s^{-k}` applied on the left,
/// clearing the negative powers of `q` that appear.
fn unshift(polys: &[Poly2], k: u32) -> Vec<Poly2> {
    let shifted: Vec<BTreeMap<(u32, i64), BigInt>> =
        polys.iter().map(|p| p.terms().iter().map(|(&(i, j), c)| ((i, j as i64 - (k as i64) * i as i64), c.clone())).collect()).collect();
    let low = shifted.iter().flat_map(|m| m.keys().map(|k| k.1)).min().unwrap_or(0).min(0);
    shifted.into_iter().map(|m| Poly2::from_terms(m.into_iter().map(|((i, j), c)| ((i, (j - low) as u32), c)))).collect()
}

fn content(polys: &[Poly2]) -> Poly2 {
    let mut g = Poly2::zero();
    for p in polys {
        if !p.is_zero() {
            g = g.gcd(p);
            if g.len() == 1 && g.trailing_coeff().is_some_and(|c| c.is_one()) && g.monomial_content() == (0, 0) {
                break;
            }
        }
    }
    g
}

/// Divides out the monomial, integer and polynomial content shared by all entries.
fn normalize_content(polys: &[Poly2]) -> Vec<Poly2> {
    let nonzero: Vec<&Poly2> = polys.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return polys.to_vec();
    }
    let a = nonzero.iter().map(|p| p.monomial_content().0).min().unwrap();
    let b = nonzero.iter().map(|p| p.monomial_content().1).min().unwrap();
    let mut out: Vec<Poly2> = polys.iter().map(|p| if p.is_zero() { Poly2::zero() } else { p.div_monomial(a, b) }).collect();
    let mut ic = BigInt::zero();
    for p in out.iter().filter(|p| !p.is_zero()) {
        ic = num_integer::Integer::gcd(&ic, &p.integer_content());
    }
    if !ic.is_one() {
        out = out.iter().map(|p| p.div_integer(&ic)).collect();
    }
    let g = content(&out);
    if g.len() > 1 || g.monomial_content() != (0, 0) {
        out = out.iter().map(|p| p.div_exact(&g).expect("content divides")).collect();
    }
    out
}

type Ore = Vec<Poly2>;

fn ore_trim(mut a: Ore) -> Ore {
    while a.last().is_some_and(Poly2::is_zero) {
        a.pop();
    }
    a
}

/// `c s^k * a`.
fn ore_lmul(c: &Poly2, k: u32, a: &Ore) -> Ore {
    let mut out = vec![Poly2::zero(); k as usize];
    out.extend(a.iter().map(|p| c * &p.shift_x(k)));
    out
}

fn ore_sub(a: &Ore, b: &Ore) -> Ore {
    let n = a.len().max(b.len());
    let z = Poly2::zero();
    ore_trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

/// One equation: unknown index -> operator applied to it; the sum vanishes.
type Equation = BTreeMap<usize, Ore>;

fn eq_normalize(e: Equation) -> Equation {
    let keys: Vec<usize> = e.keys().copied().collect();
    let lens: Vec<usize> = keys.iter().map(|k| e[k].len()).collect();
    let flat: Vec<Poly2> = keys.iter().flat_map(|k| e[k].iter().cloned()).collect();
    let norm = normalize_content(&flat);
    let mut out = Equation::new();
    let mut pos = 0;
    for (k, l) in keys.into_iter().zip(lens) {
        let op = ore_trim(norm[pos..pos + l].to_vec());
        pos += l;
        if !op.is_empty() {
            out.insert(k, op);
        }
    }
    out
}

/// `E2 <- s^k(lc1) E2 - lc2 s^k E1`, cancelling the leading term of `E2`'s `u`-component.
fn reduce(e2: &Equation, e1: &Equation, u: usize) -> Equation {
    let p1 = &e1[&u];
    let p2 = &e2[&u];
    let k = (p2.len() - p1.len()) as u32;
    let lc1 = p1.last().unwrap().shift_x(k);
    let lc2 = p2.last().unwrap();
    let mut out = Equation::new();
    let keys: std::collections::BTreeSet<usize> = e1.keys().chain(e2.keys()).copied().collect();
    for key in keys {
        let a = e2.get(&key).map(|op| ore_lmul(&lc1, 0, op)).unwrap_or_default();
        let b = e1.get(&key).map(|op| ore_lmul(lc2, k, op)).unwrap_or_default();
        let d = ore_sub(&a, &b);
        if !d.is_empty() {
            out.insert(key, d);
        }
    }
    eq_normalize(out)
}

fn pivot_key(e: &Equation, u: usize, idx: usize) -> (usize, (u32, u32, usize), usize) {
    let op = &e[&u];
    (op.len(), op.last().unwrap().weight(), idx)
}

/// Runs left Euclid on the `u`-components until exactly one equation still involves `u`; returns it.
fn euclid_on(eqs: &mut Vec<Equation>, u: usize) -> Option<Equation> {
    loop {
        let with_u: Vec<usize> = (0..eqs.len()).filter(|&i| eqs[i].contains_key(&u)).collect();
        match with_u.len() {
            0 => return None,
            1 => return Some(eqs.remove(with_u[0])),
            _ => {}
        }
        let piv = *with_u.iter().min_by_key(|&&i| pivot_key(&eqs[i], u, i)).unwrap();
        let target = *with_u.iter().filter(|&&i| i != piv).max_by_key(|&&i| (eqs[i][&u].len(), std::cmp::Reverse(i))).unwrap();
        let reduced = reduce(&eqs[target], &eqs[piv], u);
        eqs[target] = reduced;
        eqs.retain(|e| !e.is_empty());
    }
}

/// Uncouples the system into a scalar recurrence for the start unknown.
///
/// Unknowns are eliminated one at a time (fewest occurrences first, ties by
/// index); each elimination is fraction-free left Euclid in the Ore ring with
/// content removal after every step.
pub fn murray_miller(system: &SimultaneousSystem) -> Result<ScalarRecurrence, QdiffError> {
    let n = system.states.len();
    let mut eqs: Vec<Equation> = (0..n)
        .map(|v| {
            let mut e = Equation::new();
            for u in 0..n {
                let entry = &system.matrix[v][u];
                let mut op: Ore = if u == v { vec![Poly2::one()] } else { Vec::new() };
                if !entry.is_zero() {
                    op.resize(2, Poly2::zero());
                    op[1] = -entry;
                }
                let op = ore_trim(op);
                if !op.is_empty() {
                    e.insert(u, op);
                }
            }
            e
        })
        .collect();
    let mut remaining: Vec<usize> = (0..n).filter(|&u| u != system.start).collect();
    while !remaining.is_empty() {
        let (pos, &u) = remaining.iter().enumerate().min_by_key(|(_, &u)| (eqs.iter().filter(|e| e.contains_key(&u)).count(), u)).unwrap();
        remaining.remove(pos);
        euclid_on(&mut eqs, u);
    }
    let s = system.start;
    let result = match euclid_on(&mut eqs, s) {
        Some(e) => e,
        None => return Err(QdiffError::Degenerate { remaining: eqs.len() }),
    };
    Ok(ScalarRecurrence { polys: result[&s].clone() }.normalized())
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnihilationReport {
    pub order: usize,
    pub checked_to: u32,
    pub vanishes: bool,
    /// `((x-degree, q-degree), coefficient)` of the first surviving term.
    pub first_nonzero: Option<((u32, u32), String)>,
}

/// Applies the recurrence to `f` and checks that nothing survives through `q^order`.
pub fn verify_on_series(rec: &ScalarRecurrence, f: &BivariateSeries, order: u32) -> Result<AnnihilationReport, QdiffError> {
    let r = apply_recurrence(&rec.polys, f, order)?;
    let first = r.first_nonzero().map(|(k, c)| (k, c.to_string()));
    Ok(AnnihilationReport { order: rec.order(), checked_to: order, vanishes: first.is_none(), first_nonzero: first })
}

/// Annihilation check against the generating function counted from `dfa`.
pub fn verify_annihilation(rec: &ScalarRecurrence, dfa: &Dfa, order: u32) -> Result<AnnihilationReport, QdiffError> {
    verify_on_series(rec, &weighted_count(dfa, order), order)
}

const REFERENCE_DATA: &str = include_str!("../data/reference_recurrences.txt");

/// Reference recurrences for the `L_1`, `L_2`, `L_3` families, indexed by `a - 1`.
pub fn reference_recurrences() -> Result<Vec<ScalarRecurrence>, QdiffError> {
    parse_recurrences(REFERENCE_DATA)
}

/// Lines `a r polynomial`; `#` starts a comment.
pub fn parse_recurrences(text: &str) -> Result<Vec<ScalarRecurrence>, QdiffError> {
    let mut table: BTreeMap<usize, BTreeMap<usize, Poly2>> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| QdiffError::Fixture { line: n + 1, msg: msg.to_string() };
        let mut it = line.splitn(3, char::is_whitespace);
        let a: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("family index"))?;
        let r: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("shift"))?;
        let p = Poly2::parse(it.next().ok_or_else(|| bad("polynomial"))?)?;
        table.entry(a).or_default().insert(r, p);
    }
    table
        .into_values()
        .map(|rows| {
            let order = rows.keys().max().copied().unwrap_or(0);
            let polys = (0..=order).map(|r| rows.get(&r).cloned().unwrap_or_default()).collect();
            Ok(ScalarRecurrence { polys })
        })
        .collect()
}

/// A correction to one printed reference polynomial: `p_shift += delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Erratum {
    pub family: usize,
    pub shift: usize,
    pub delta: &'static str,
}

/// The printed `p_4` for `L_2` lacks the term `x^2 q^8` inside its last factor.
pub const REFERENCE_ERRATA: [Erratum; 1] = [Erratum { family: 2, shift: 4, delta: "-x^{4}q^{14}(1+q)(1+xq^{4})" }];

/// Reference recurrences with [`REFERENCE_ERRATA`] applied.
pub fn corrected_reference_recurrences() -> Result<Vec<ScalarRecurrence>, QdiffError> {
    let mut recs = reference_recurrences()?;
    for e in REFERENCE_ERRATA {
        let p = &mut recs[e.family - 1].polys[e.shift];
        *p = &*p + &Poly2::parse(e.delta)?;
    }
    Ok(recs)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub derived: ScalarRecurrence,
    pub derived_check: AnnihilationReport,
    pub reference_check: AnnihilationReport,
    pub proportional: bool,
    pub equal_up_to_sign: bool,
}

/// Derives a recurrence from `dfa` and checks it alongside `reference` on the same series.
pub fn compare_with_reference(dfa: &Dfa, reference: &ScalarRecurrence, order: u32) -> Result<ComparisonReport, QdiffError> {
    let derived = murray_miller(&system_from_dfa(dfa)?)?;
    let f = weighted_count(dfa, order);
    let derived_check = verify_on_series(&derived, &f, order)?;
    let reference_check = verify_on_series(reference, &f, order)?;
    let norm = reference.normalized();
    Ok(ComparisonReport {
        proportional: derived.proportional_to(&norm),
        equal_up_to_sign: derived.equal_up_to_sign(&norm),
        derived,
        derived_check,
        reference_check,
    })
}
