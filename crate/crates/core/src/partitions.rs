//! Partitions, the named partition families, saturations and multiplicity words.
//!
//! "Begins with" and "matches" are read at the smallest-part end: `lambda`
//! begins with `(d_1, ..., d_r)` when its last `r` parts are `d_1, ..., d_r`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parts must be positive and weakly decreasing: {0:?}")]
    Invalid(Vec<u32>),
    #[error("multiplicity {mult} of part {part} exceeds bound {bound}")]
    MultiplicityOverflow { part: u32, mult: u32, bound: u32 },
    #[error("saturation of the empty partition")]
    EmptySaturation,
    #[error("empty partition in a custom pattern or prefix list")]
    EmptyPattern,
    #[error("unknown constraint set `{0}`")]
    UnknownSet(String),
    #[error("constraint file: {0}")]
    Config(String),
}

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl TryFrom<Vec<u32>> for Partition {
    type Error = PartitionError;
    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.0
    }
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionError::Invalid(parts));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn largest(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    /// `m_j(lambda)`.
    pub fn multiplicity(&self, j: u32) -> u32 {
        self.0.iter().filter(|&&p| p == j).count() as u32
    }

    /// `[m_1, ..., m_{lambda_1}]`.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.largest() as usize];
        for &p in &self.0 {
            m[p as usize - 1] += 1;
        }
        m
    }

    /// True if the last `c.len()` parts equal `c`.
    pub fn begins_with(&self, c: &[u32]) -> bool {
        self.0.len() >= c.len() && &self.0[self.0.len() - c.len()..] == c
    }

    /// True if some contiguous window equals `b`.
    pub fn matches(&self, b: &[u32]) -> bool {
        !b.is_empty() && self.0.windows(b.len()).any(|w| w == b)
    }

    /// True if some window equals `b + k` for some `k >= 0`.
    pub fn matches_shifted(&self, b: &[u32]) -> bool {
        !b.is_empty() && self.0.windows(b.len()).any(|w| window_is_shift(w, b))
    }
}

fn window_is_shift(w: &[u32], b: &[u32]) -> bool {
    if w[0] < b[0] {
        return false;
    }
    let k = w[0] - b[0];
    w.iter().zip(b).all(|(x, y)| *x == y + k)
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = PartitionError;
    /// Comma-separated parts, optionally parenthesized; empty string is the empty partition.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() {
            return Ok(Partition::empty());
        }
        let parts: Result<Vec<u32>, _> = t.split(',').map(|x| x.trim().parse::<u32>()).collect();
        Partition::new(parts.map_err(|_| PartitionError::Invalid(Vec::new()))?)
    }
}

/// Canonical order: lexicographically descending on parts.
pub fn canonical_sort(v: &mut [Partition]) {
    v.sort_by(|a, b| b.0.cmp(&a.0));
}

/// The forbidden patterns shared by the three `L` families.
pub const L_FORBIDDEN: [&[u32]; 13] = [
    &[1, 1, 1],
    &[2, 1, 1],
    &[2, 2, 1],
    &[3, 2, 1],
    &[3, 3, 1],
    &[5, 3, 3],
    &[4, 4, 1, 1],
    &[5, 4, 1, 1],
    &[5, 4, 2, 1],
    &[5, 5, 2, 1],
    &[6, 5, 3, 1, 1],
    &[6, 6, 3, 1, 1],
    &[7, 6, 4, 2, 1],
];

/// Forbidden prefixes of `L_1`, `L_2`, `L_3`.
pub fn l_prefixes(a: u8) -> Vec<Vec<u32>> {
    match a {
        1 => vec![vec![1], vec![5, 4, 2, 2], vec![9, 8, 6, 4, 2, 2]],
        2 => vec![vec![1, 1], vec![2, 2], vec![4, 3, 1]],
        3 => {
            vec![vec![1, 1], vec![2, 1], vec![2, 2], vec![3, 2], vec![3, 3], vec![4, 3, 1], vec![4, 4, 1], vec![5, 4, 2], vec![6, 5, 3, 1]]
        }
        _ => panic!("L index must be 1..=3"),
    }
}

/// A family cut out by a multiplicity bound, shifted forbidden patterns and forbidden prefixes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomSet {
    pub m: u32,
    #[serde(default)]
    pub forbidden: Vec<Partition>,
    #[serde(default)]
    pub prefixes: Vec<Partition>,
}

impl CustomSet {
    pub fn new(m: u32, forbidden: Vec<Partition>, prefixes: Vec<Partition>) -> Result<Self, PartitionError> {
        if forbidden.iter().chain(&prefixes).any(Partition::is_empty) {
            return Err(PartitionError::EmptyPattern);
        }
        Ok(CustomSet { m, forbidden, prefixes })
    }

    /// `L_a` for `a = 1, 2, 3`.
    pub fn l_set(a: u8) -> Self {
        let f = L_FORBIDDEN.iter().map(|p| Partition(p.to_vec())).collect();
        let i = l_prefixes(a).into_iter().map(Partition).collect();
        CustomSet { m: 3, forbidden: f, prefixes: i }
    }

    /// Parses `m = 3`, `forbidden = [[1,1,1], ...]`, `prefixes = [[1], ...]`.
    pub fn from_toml(text: &str) -> Result<Self, PartitionError> {
        let c: CustomSet = toml::from_str(text).map_err(|e| PartitionError::Config(e.to_string()))?;
        CustomSet::new(c.m, c.forbidden, c.prefixes)
    }

    fn satisfies(&self, l: &Partition) -> bool {
        l.multiplicities().iter().all(|&x| x < self.m)
            && !self.prefixes.iter().any(|c| l.begins_with(c.parts()))
            && !self.forbidden.iter().any(|b| l.matches_shifted(b.parts()))
    }
}

/// Named families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    Rr(u8),
    Kr(u8),
    L(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintSet {
    Preset(Preset),
    /// Parts congruent to one of `residues` modulo `modulus`.
    Congruence {
        modulus: u32,
        residues: Vec<u32>,
    },
    Custom(CustomSet),
}

impl FromStr for ConstraintSet {
    type Err = PartitionError;
    /// `RR1`, `RR2`, `KR1`..`KR5`, `L1`..`L3`, or `T<modulus>:<r1>,<r2>,...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || PartitionError::UnknownSet(s.to_string());
        let idx = |prefix: &str, hi: u8| -> Option<u8> {
            let rest = s.strip_prefix(prefix)?.trim_start_matches('_');
            rest.parse::<u8>().ok().filter(|a| (1..=hi).contains(a))
        };
        if let Some(a) = idx("RR", 2) {
            return Ok(ConstraintSet::Preset(Preset::Rr(a)));
        }
        if let Some(a) = idx("KR", 5) {
            return Ok(ConstraintSet::Preset(Preset::Kr(a)));
        }
        if let Some(a) = idx("L", 3) {
            return Ok(ConstraintSet::Preset(Preset::L(a)));
        }
        if let Some(rest) = s.strip_prefix('T') {
            let (m, r) = rest.split_once(':').ok_or_else(err)?;
            let modulus: u32 = m.trim().parse().map_err(|_| err())?;
            let residues: Result<Vec<u32>, _> = r.split(',').map(|x| x.trim().parse::<u32>()).collect();
            let residues = residues.map_err(|_| err())?;
            if modulus == 0 || residues.is_empty() || residues.iter().any(|&x| x == 0 || x > modulus) {
                return Err(err());
            }
            return Ok(ConstraintSet::Congruence { modulus, residues });
        }
        Err(err())
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintSet::Preset(Preset::Rr(a)) => write!(f, "RR{a}"),
            ConstraintSet::Preset(Preset::Kr(a)) => write!(f, "KR{a}"),
            ConstraintSet::Preset(Preset::L(a)) => write!(f, "L{a}"),
            ConstraintSet::Congruence { modulus, residues } => {
                let r: Vec<String> = residues.iter().map(u32::to_string).collect();
                write!(f, "T{modulus}:{}", r.join(","))
            }
            ConstraintSet::Custom(c) => write!(f, "custom(m={}, |F|={}, |I|={})", c.m, c.forbidden.len(), c.prefixes.len()),
        }
    }
}

/// `P(lambda, k)`: adjacent parts differing by at most 1 sum to `k` mod 3.
fn condition_p(parts: &[u32], k: u32) -> bool {
    parts.windows(2).all(|w| w[0] - w[1] > 1 || (w[0] + w[1]) % 3 == k)
}

fn kr_difference(parts: &[u32]) -> bool {
    parts.windows(3).all(|w| w[0] >= w[2] + 3)
}

fn kr_satisfies(a: u8, l: &Partition) -> bool {
    let p = l.parts();
    if !kr_difference(p) {
        return false;
    }
    match a {
        1 => condition_p(p, 0),
        2 => condition_p(p, 0) && l.multiplicity(1) == 0,
        3 => condition_p(p, 0) && l.multiplicity(1) == 0 && l.multiplicity(2) == 0,
        4 => condition_p(p, 2) && l.multiplicity(1) == 0,
        5 => condition_p(p, 1) && l.multiplicity(2) <= 1,
        _ => panic!("KR index must be 1..=5"),
    }
}

fn rr_satisfies(a: u8, l: &Partition) -> bool {
    let p = l.parts();
    p.windows(2).all(|w| w[0] >= w[1] + 2) && (a == 1 || l.multiplicity(1) == 0)
}

impl ConstraintSet {
    pub fn preset(p: Preset) -> Self {
        ConstraintSet::Preset(p)
    }

    /// Membership.
    pub fn satisfies(&self, l: &Partition) -> bool {
        match self {
            ConstraintSet::Preset(Preset::Kr(a)) => kr_satisfies(*a, l),
            ConstraintSet::Preset(Preset::Rr(a)) => rr_satisfies(*a, l),
            ConstraintSet::Preset(Preset::L(a)) => CustomSet::l_set(*a).satisfies(l),
            ConstraintSet::Congruence { modulus, residues } => {
                l.parts().iter().all(|p| residues.iter().any(|r| p % modulus == r % modulus))
            }
            ConstraintSet::Custom(c) => c.satisfies(l),
        }
    }

    /// The equivalent custom description for `L` presets.
    pub fn as_custom(&self) -> Option<CustomSet> {
        match self {
            ConstraintSet::Preset(Preset::L(a)) => Some(CustomSet::l_set(*a)),
            ConstraintSet::Custom(c) => Some(c.clone()),
            _ => None,
        }
    }
}

/// Incremental checker: every condition except "begins with" is decided by
/// the windows that end at the newest (smallest) part, so violations found on
/// a prefix persist in every extension.
struct Checker {
    set: ConstraintSet,
    custom: Option<CustomSet>,
}

impl Checker {
    fn new(set: &ConstraintSet) -> Self {
        Checker { set: set.clone(), custom: set.as_custom() }
    }

    fn part_allowed(&self, part: u32) -> bool {
        match &self.set {
            ConstraintSet::Congruence { modulus, residues } => residues.iter().any(|r| part % modulus == r % modulus),
            ConstraintSet::Preset(Preset::Kr(a)) => !(matches!(a, 2..=4) && part == 1 || *a == 3 && part == 2),
            ConstraintSet::Preset(Preset::Rr(2)) => part != 1,
            _ => true,
        }
    }

    /// Conditions involving the last part of `p`.
    fn tail_ok(&self, p: &[u32]) -> bool {
        let n = p.len();
        let last = p[n - 1];
        if !self.part_allowed(last) {
            return false;
        }
        match &self.set {
            ConstraintSet::Preset(Preset::Kr(a)) => {
                if n >= 3 && p[n - 3] < last + 3 {
                    return false;
                }
                if n >= 2 {
                    let k = match a {
                        4 => 2,
                        5 => 1,
                        _ => 0,
                    };
                    if p[n - 2] - last <= 1 && (p[n - 2] + last) % 3 != k {
                        return false;
                    }
                    if *a == 5 && last == 2 && p[n - 2] == 2 {
                        return false;
                    }
                }
                true
            }
            ConstraintSet::Preset(Preset::Rr(_)) => n < 2 || p[n - 2] >= last + 2,
            ConstraintSet::Congruence { .. } => true,
            _ => {
                let c = self.custom.as_ref().unwrap();
                let run = p.iter().rev().take_while(|&&x| x == last).count() as u32;
                if run >= c.m {
                    return false;
                }
                for b in &c.forbidden {
                    let r = b.len();
                    if r <= n && window_is_shift(&p[n - r..], b.parts()) {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn final_ok(&self, p: &[u32]) -> bool {
        match &self.custom {
            Some(c) => !c.prefixes.iter().any(|pre| {
                let r = pre.len();
                p.len() >= r && &p[p.len() - r..] == pre.parts()
            }),
            None => true,
        }
    }
}

fn walk<F: FnMut(&[u32], u32)>(ch: &Checker, parts: &mut Vec<u32>, weight: u32, max_weight: u32, visit: &mut F) {
    if ch.final_ok(parts) {
        visit(parts, weight);
    }
    let cap = parts.last().copied().unwrap_or(max_weight).min(max_weight - weight);
    for next in (1..=cap).rev() {
        parts.push(next);
        if ch.tail_ok(parts) {
            walk(ch, parts, weight + next, max_weight, visit);
        }
        parts.pop();
    }
}

/// All members of weight `n`, in canonical order.
pub fn enumerate(set: &ConstraintSet, n: u32) -> Vec<Partition> {
    let ch = Checker::new(set);
    let mut out = Vec::new();
    let mut parts = Vec::new();
    walk(&ch, &mut parts, 0, n, &mut |p, w| {
        if w == n {
            out.push(Partition(p.to_vec()));
        }
    });
    out
}

/// `|set ∩ PAR(n)|` for `0 <= n <= max_n` by exhaustive search.
pub fn brute_force_counts(set: &ConstraintSet, max_n: u32) -> Vec<u64> {
    let ch = Checker::new(set);
    let mut out = vec![0u64; max_n as usize + 1];
    let mut parts = Vec::new();
    walk(&ch, &mut parts, 0, max_n, &mut |_, w| out[w as usize] += 1);
    out
}

/// `sum x^{len} q^{weight}` over members of weight at most `max_n`, as `(len, weight) -> count`.
pub fn brute_force_bivariate(set: &ConstraintSet, max_n: u32) -> std::collections::BTreeMap<(u32, u32), u64> {
    let ch = Checker::new(set);
    let mut out = std::collections::BTreeMap::new();
    let mut parts = Vec::new();
    walk(&ch, &mut parts, 0, max_n, &mut |p, w| *out.entry((p.len() as u32, w)).or_insert(0) += 1);
    out
}

/// Every partition of `n`, canonical order.
pub fn all_partitions(n: u32) -> Vec<Partition> {
    enumerate(&ConstraintSet::Congruence { modulus: 1, residues: vec![1] }, n)
}

/// `sat_m(lambda)`: same largest part, multiplicities below `m`, containing `lambda` as a window.
pub fn saturate(l: &Partition, m: u32) -> Result<Vec<Partition>, PartitionError> {
    if l.is_empty() {
        return Err(PartitionError::EmptySaturation);
    }
    let top = l.largest() as usize;
    let mut out = Vec::new();
    let mut mult = vec![0u32; top];
    // odometer over m_1..m_{top-1} in [0, m) and m_top in [1, m)
    loop {
        for last in 1..m {
            mult[top - 1] = last;
            let mu = decode_multiplicities(&mult);
            if mu.matches(l.parts()) {
                out.push(mu);
            }
        }
        let mut i = 0;
        loop {
            if i + 1 >= top {
                canonical_sort(&mut out);
                return Ok(out);
            }
            mult[i] += 1;
            if mult[i] < m {
                break;
            }
            mult[i] = 0;
            i += 1;
        }
    }
}

/// Partition with `m_j = mult[j-1]`.
pub fn decode_multiplicities(mult: &[u32]) -> Partition {
    let mut parts = Vec::new();
    for (j, &c) in mult.iter().enumerate().rev() {
        for _ in 0..c {
            parts.push(j as u32 + 1);
        }
    }
    Partition(parts)
}

/// `Pi2(lambda) = m_1 ... m_{lambda_1}`, letters below `m`.
pub fn encode_multiplicity_word(l: &Partition, m: u32) -> Result<Vec<u8>, PartitionError> {
    let mult = l.multiplicities();
    for (j, &c) in mult.iter().enumerate() {
        if c >= m {
            return Err(PartitionError::MultiplicityOverflow { part: j as u32 + 1, mult: c, bound: m });
        }
    }
    Ok(mult.into_iter().map(|c| c as u8).collect())
}

pub fn decode_multiplicity_word(w: &[u8]) -> Partition {
    decode_multiplicities(&w.iter().map(|&c| c as u32).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Serialize)]
pub struct PtReport {
    pub lhs: String,
    pub rhs: String,
    pub counts_lhs: Vec<u64>,
    pub counts_rhs: Vec<u64>,
    pub first_disagreement: Option<u32>,
}

impl PtReport {
    pub fn agree(&self) -> bool {
        self.first_disagreement.is_none()
    }

    pub fn from_counts(lhs: &ConstraintSet, rhs: &ConstraintSet, a: Vec<u64>, b: Vec<u64>) -> Self {
        let first_disagreement = a.iter().zip(&b).position(|(x, y)| x != y).map(|n| n as u32);
        PtReport { lhs: lhs.to_string(), rhs: rhs.to_string(), counts_lhs: a, counts_rhs: b, first_disagreement }
    }
}

/// Compares counting functions of two families by brute force for `n <= max_n`.
pub fn pt_equiv(a: &ConstraintSet, b: &ConstraintSet, max_n: u32) -> PtReport {
    let (ca, cb) = rayon::join(|| brute_force_counts(a, max_n), || brute_force_counts(b, max_n));
    PtReport::from_counts(a, b, ca, cb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn set(s: &str) -> ConstraintSet {
        s.parse().unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(set("KR1").satisfies(&p("2,1")));
        assert!(!set("KR1").satisfies(&p("1,1,1")));
        assert!(!set("L1").satisfies(&p("3,1")));
        assert!(set("L1").satisfies(&p("3,3")));
        assert!(!set("L1").satisfies(&p("2,2,2")));
        for s in ["KR1", "KR5", "RR2", "L3", "T9:1,3,6,8"] {
            assert!(set(s).satisfies(&Partition::empty()));
        }
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate(&set("KR1"), 3), vec![p("3"), p("2,1")]);
        assert_eq!(enumerate(&set("L1"), 6), vec![p("6"), p("4,2"), p("3,3")]);
        assert_eq!(enumerate(&set("RR2"), 0), vec![Partition::empty()]);
    }

    #[test]
    fn enumeration_agrees_with_filtering() {
        let sets = ["RR1", "RR2", "KR1", "KR2", "KR3", "KR4", "KR5", "L1", "L2", "L3", "T9:2,3,5,8"];
        for n in 0..=18 {
            let all = all_partitions(n);
            for s in sets {
                let cs = set(s);
                let filtered: Vec<Partition> = all.iter().filter(|l| cs.satisfies(l)).cloned().collect();
                assert_eq!(enumerate(&cs, n), filtered, "{s} n={n}");
            }
        }
    }

    #[test]
    fn partition_counts() {
        let c = brute_force_counts(&set("T1:1"), 10);
        assert_eq!(c, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn saturation() {
        // 12 windows-with-padding of (5,3,2) with multiplicities below 3
        let got = saturate(&p("5,3,2"), 3).unwrap();
        let expect = [
            "5,5,3,2,2",
            "5,3,2,2",
            "5,5,3,2",
            "5,3,2",
            "5,5,3,2,2,1",
            "5,3,2,2,1",
            "5,5,3,2,1",
            "5,3,2,1",
            "5,5,3,2,2,1,1",
            "5,3,2,2,1,1",
            "5,5,3,2,1,1",
            "5,3,2,1,1",
        ];
        let mut expect: Vec<Partition> = expect.iter().map(|s| p(s)).collect();
        canonical_sort(&mut expect);
        assert_eq!(got, expect);
        assert_eq!(saturate(&p("1"), 3).unwrap(), vec![p("1,1"), p("1")]);
        assert_eq!(saturate(&p("2"), 2).unwrap(), vec![p("2,1"), p("2")]);
        assert!(saturate(&Partition::empty(), 2).is_err());
    }

    #[test]
    fn multiplicity_words() {
        assert_eq!(encode_multiplicity_word(&p("5,5,3,2,2"), 3).unwrap(), vec![0, 2, 1, 0, 2]);
        assert_eq!(encode_multiplicity_word(&p("3,2"), 3).unwrap(), vec![0, 1, 1]);
        assert!(encode_multiplicity_word(&Partition::empty(), 3).unwrap().is_empty());
        assert!(encode_multiplicity_word(&p("1,1,1"), 3).is_err());
        assert_eq!(decode_multiplicity_word(&[0, 2, 1, 0, 2]), p("5,5,3,2,2"));
    }

    #[test]
    fn pt_examples() {
        assert!(pt_equiv(&set("RR1"), &set("T5:1,4"), 50).agree());
        assert!(pt_equiv(&set("KR2"), &set("T9:2,3,6,7"), 40).agree());
        assert!(pt_equiv(&set("L2"), &set("T2:1"), 40).agree());
        let bad = pt_equiv(&set("RR1"), &set("T5:2,3"), 10);
        assert_eq!(bad.first_disagreement, Some(1));
    }

    #[test]
    fn parsing_sets() {
        assert_eq!(set("T9:1,3,6,8"), ConstraintSet::Congruence { modulus: 9, residues: vec![1, 3, 6, 8] });
        assert!("KR6".parse::<ConstraintSet>().is_err());
        assert!("T0:1".parse::<ConstraintSet>().is_err());
        let c = CustomSet::from_toml("m = 3\nforbidden = [[1,1,1]]\nprefixes = [[1]]\n").unwrap();
        assert_eq!(c.m, 3);
        assert!(CustomSet::from_toml("m = 3\nforbidden = [[]]\n").is_err());
        assert_eq!(set("L1").to_string(), "L1");
    }
}
