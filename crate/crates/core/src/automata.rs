//! Pattern-avoidance automata over multiplicity words and counting with them.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partitions::{encode_multiplicity_word, saturate, ConstraintSet, Partition, PartitionError, Preset, PtReport};
use crate::poly::Poly2;
use crate::qseries::{congruence_counts, BivariateSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("empty pattern")]
    EmptyPattern,
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("automaton is not minimal")]
    NotMinimal,
    #[error("malformed transition table: {0}")]
    Malformed(String),
    #[error("count at weight {0} exceeds u64")]
    CountOverflow(u32),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Nondeterministic automaton over `{0, ..., m-1}`.
#[derive(Debug, Clone)]
pub struct Nfa {
    pub alphabet: u8,
    /// `delta[state][letter]` lists targets.
    pub delta: Vec<Vec<Vec<usize>>>,
    pub starts: Vec<usize>,
    pub accepting: Vec<bool>,
}

impl Nfa {
    fn add_state(&mut self, accepting: bool) -> usize {
        self.delta.push(vec![Vec::new(); self.alphabet as usize]);
        self.accepting.push(accepting);
        self.delta.len() - 1
    }

    fn add_chain(&mut self, from: usize, word: &[u8], to: usize) {
        let mut cur = from;
        for (k, &a) in word.iter().enumerate() {
            let next = if k + 1 == word.len() { to } else { self.add_state(false) };
            self.delta[cur][a as usize].push(next);
            cur = next;
        }
    }

    pub fn accepts(&self, word: &[u8]) -> bool {
        let mut cur: BTreeSet<usize> = self.starts.iter().copied().collect();
        for &a in word {
            cur = cur.iter().flat_map(|&s| self.delta[s][a as usize].iter().copied()).collect();
        }
        cur.iter().any(|&s| self.accepting[s])
    }
}

/// Multiplicity words of every partition in the saturations of `patterns`.
pub fn saturated_words(m: u32, patterns: &[Partition]) -> Result<BTreeSet<Vec<u8>>, AutomataError> {
    let mut out = BTreeSet::new();
    for b in patterns {
        if b.is_empty() {
            return Err(AutomataError::EmptyPattern);
        }
        // a pattern already exceeding the bound has an empty saturation
        for mu in saturate(b, m)? {
            out.insert(encode_multiplicity_word(&mu, m)?);
        }
    }
    Ok(out)
}

/// NFA for `K* W_F K* + W_I K*` where `W_F`, `W_I` are the multiplicity words of the saturated pattern sets.
pub fn build_avoidance_nfa(m: u32, forbidden: &[Partition], prefixes: &[Partition]) -> Result<Nfa, AutomataError> {
    if m == 0 || m > u8::MAX as u32 {
        return Err(AutomataError::EmptyAlphabet);
    }
    let wf = saturated_words(m, forbidden)?;
    let wi = saturated_words(m, prefixes)?;
    let mut nfa = Nfa { alphabet: m as u8, delta: Vec::new(), starts: Vec::new(), accepting: Vec::new() };
    let loop_start = nfa.add_state(false);
    let prefix_start = nfa.add_state(false);
    let sink = nfa.add_state(true);
    for a in 0..m as usize {
        nfa.delta[loop_start][a].push(loop_start);
        nfa.delta[sink][a].push(sink);
    }
    for w in &wf {
        nfa.add_chain(loop_start, w, sink);
    }
    for w in &wi {
        nfa.add_chain(prefix_start, w, sink);
    }
    nfa.starts = vec![loop_start, prefix_start];
    Ok(nfa)
}

/// Total deterministic automaton over `{0, ..., m-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dfa {
    pub alphabet: u8,
    /// `delta[state][letter]`.
    pub delta: Vec<Vec<usize>>,
    pub start: usize,
    pub accepting: Vec<bool>,
}

/// Reference minimal DFA for the `L_3` configuration, start `q0`, accepting sink `q3`.
pub const REFERENCE_L3_DELTA: [[usize; 3]; 11] =
    [[1, 2, 3], [4, 5, 3], [1, 3, 3], [3, 3, 3], [6, 7, 3], [8, 3, 3], [6, 7, 9], [4, 2, 3], [6, 10, 3], [5, 3, 3], [4, 3, 3]];

impl Dfa {
    pub fn new(alphabet: u8, delta: Vec<Vec<usize>>, start: usize, accepting: Vec<bool>) -> Result<Self, AutomataError> {
        let n = delta.len();
        if alphabet == 0 {
            return Err(AutomataError::EmptyAlphabet);
        }
        if start >= n || accepting.len() != n {
            return Err(AutomataError::Malformed("start or accepting out of range".into()));
        }
        for (s, row) in delta.iter().enumerate() {
            if row.len() != alphabet as usize || row.iter().any(|&t| t >= n) {
                return Err(AutomataError::Malformed(format!("row {s}")));
            }
        }
        Ok(Dfa { alphabet, delta, start, accepting })
    }

    /// The reference `L_3` table.
    pub fn reference_l3() -> Self {
        let delta = REFERENCE_L3_DELTA.iter().map(|r| r.to_vec()).collect();
        let accepting = (0..11).map(|s| s == 3).collect();
        Dfa { alphabet: 3, delta, start: 0, accepting }
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    pub fn run(&self, word: &[u8]) -> usize {
        word.iter().fold(self.start, |s, &a| self.delta[s][a as usize])
    }

    pub fn accepts(&self, word: &[u8]) -> bool {
        self.accepting[self.run(word)]
    }

    /// States from which reading only zeros never reaches an accepting state.
    pub fn zero_safe(&self) -> Vec<bool> {
        (0..self.len())
            .map(|s| {
                let mut seen = vec![false; self.len()];
                let mut cur = s;
                while !seen[cur] {
                    if self.accepting[cur] {
                        return false;
                    }
                    seen[cur] = true;
                    cur = self.delta[cur][0];
                }
                true
            })
            .collect()
    }

    /// Relabels states in BFS order from the start (letters in increasing order), dropping unreachable ones.
    pub fn canonical(&self) -> Dfa {
        let mut label: Vec<Option<usize>> = vec![None; self.len()];
        let mut order = vec![self.start];
        label[self.start] = Some(0);
        let mut queue = VecDeque::from([self.start]);
        while let Some(s) = queue.pop_front() {
            for &t in &self.delta[s] {
                if label[t].is_none() {
                    label[t] = Some(order.len());
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let delta = order.iter().map(|&s| self.delta[s].iter().map(|&t| label[t].unwrap()).collect()).collect();
        let accepting = order.iter().map(|&s| self.accepting[s]).collect();
        Dfa { alphabet: self.alphabet, delta, start: 0, accepting }
    }

    /// Hopcroft refinement followed by canonical relabeling.
    pub fn minimize(&self) -> Dfa {
        let dfa = self.canonical();
        let n = dfa.len();
        let k = dfa.alphabet as usize;
        let mut inverse: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; k];
        for s in 0..n {
            for a in 0..k {
                inverse[a][dfa.delta[s][a]].push(s);
            }
        }
        let (acc, rej): (Vec<usize>, Vec<usize>) = (0..n).partition(|&s| dfa.accepting[s]);
        let mut blocks: Vec<BTreeSet<usize>> = Vec::new();
        let mut block_of = vec![0usize; n];
        for part in [acc, rej] {
            if !part.is_empty() {
                for &s in &part {
                    block_of[s] = blocks.len();
                }
                blocks.push(part.into_iter().collect());
            }
        }
        let mut work: BTreeSet<usize> = (0..blocks.len()).collect();
        while let Some(&splitter) = work.iter().next() {
            work.remove(&splitter);
            let target = blocks[splitter].clone();
            for inv in &inverse {
                let pre: BTreeSet<usize> = target.iter().flat_map(|&t| inv[t].iter().copied()).collect();
                let touched: BTreeSet<usize> = pre.iter().map(|&s| block_of[s]).collect();
                for b in touched {
                    let inside: BTreeSet<usize> = blocks[b].intersection(&pre).copied().collect();
                    if inside.len() == blocks[b].len() {
                        continue;
                    }
                    let outside: BTreeSet<usize> = blocks[b].difference(&inside).copied().collect();
                    let nb = blocks.len();
                    let (keep, moved) = if inside.len() <= outside.len() { (outside, inside) } else { (inside, outside) };
                    for &s in &moved {
                        block_of[s] = nb;
                    }
                    blocks[b] = keep;
                    blocks.push(moved);
                    if work.contains(&b) {
                        work.insert(nb);
                    } else {
                        // the smaller half suffices
                        let small = if blocks[b].len() <= blocks[nb].len() { b } else { nb };
                        work.insert(small);
                    }
                }
            }
        }
        let delta = blocks
            .iter()
            .map(|blk| {
                let s = *blk.iter().next().unwrap();
                dfa.delta[s].iter().map(|&t| block_of[t]).collect()
            })
            .collect();
        let accepting = blocks.iter().map(|blk| dfa.accepting[*blk.iter().next().unwrap()]).collect();
        Dfa { alphabet: dfa.alphabet, delta, start: block_of[dfa.start], accepting }.canonical()
    }

    pub fn is_minimal(&self) -> bool {
        self.canonical().len() == self.len() && self.minimize().len() == self.len()
    }

    /// JSON layout `{states, alphabet, delta, start, accepting}` with states named `q0, q1, ...`.
    pub fn to_json(&self) -> serde_json::Value {
        let names: Vec<String> = (0..self.len()).map(|s| format!("q{s}")).collect();
        let accepting: Vec<&String> = names.iter().zip(&self.accepting).filter(|(_, &a)| a).map(|(n, _)| n).collect();
        serde_json::json!({
            "states": names,
            "alphabet": (0..self.alphabet).collect::<Vec<u8>>(),
            "delta": self.delta,
            "start": format!("q{}", self.start),
            "accepting": accepting,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n");
        for q in 0..self.len() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  q{q} [shape={shape}];");
        }
        let _ = writeln!(s, "  start -> q{};", self.start);
        for (q, row) in self.delta.iter().enumerate() {
            let mut by_target: BTreeMap<usize, Vec<String>> = BTreeMap::new();
            for (a, &t) in row.iter().enumerate() {
                by_target.entry(t).or_default().push(a.to_string());
            }
            for (t, letters) in by_target {
                let _ = writeln!(s, "  q{q} -> q{t} [label=\"{}\"];", letters.join(","));
            }
        }
        s.push_str("}\n");
        s
    }

    /// One row per letter, one column per state.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("letter");
        for q in 0..self.len() {
            let _ = write!(s, ",q{q}");
        }
        s.push('\n');
        for a in 0..self.alphabet as usize {
            let _ = write!(s, "{a}");
            for q in 0..self.len() {
                let _ = write!(s, ",q{}", self.delta[q][a]);
            }
            s.push('\n');
        }
        s
    }
}

/// Subset construction followed by minimization.
pub fn determinize_minimize(nfa: &Nfa) -> Dfa {
    let sink_states: BTreeSet<usize> =
        (0..nfa.delta.len()).filter(|&s| nfa.accepting[s] && nfa.delta[s].iter().all(|t| t == &vec![s])).collect();
    let normalize = |set: BTreeSet<usize>| -> BTreeSet<usize> {
        // an absorbing accepting state makes the rest of the subset irrelevant
        match set.iter().find(|s| sink_states.contains(s)) {
            Some(&s) => BTreeSet::from([s]),
            None => set,
        }
    };
    let start = normalize(nfa.starts.iter().copied().collect());
    let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut subsets = vec![start];
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let mut row = Vec::with_capacity(nfa.alphabet as usize);
        for a in 0..nfa.alphabet as usize {
            let next = normalize(subsets[i].iter().flat_map(|&s| nfa.delta[s][a].iter().copied()).collect());
            let id = *ids.entry(next.clone()).or_insert_with(|| {
                subsets.push(next);
                subsets.len() - 1
            });
            row.push(id);
        }
        delta.push(row);
        i += 1;
    }
    let accepting = subsets.iter().map(|set| set.iter().any(|&s| nfa.accepting[s])).collect();
    Dfa { alphabet: nfa.alphabet, delta, start: 0, accepting }.minimize()
}

/// Minimal DFA of the avoidance language for `(m, F, I)`.
pub fn avoidance_dfa(m: u32, forbidden: &[Partition], prefixes: &[Partition]) -> Result<Dfa, AutomataError> {
    Ok(determinize_minimize(&build_avoidance_nfa(m, forbidden, prefixes)?))
}

/// Equality of canonical forms; both inputs must be minimal.
pub fn dfa_isomorphic(a: &Dfa, b: &Dfa) -> Result<bool, AutomataError> {
    if !a.is_minimal() || !b.is_minimal() {
        return Err(AutomataError::NotMinimal);
    }
    Ok(a.canonical() == b.canonical())
}

/// A word accepted by exactly one of the automata, if any (shortest, BFS over the product).
pub fn separating_word(a: &Dfa, b: &Dfa) -> Option<Vec<u8>> {
    let mut seen = BTreeSet::from([(a.start, b.start)]);
    let mut queue = VecDeque::from([((a.start, b.start), Vec::new())]);
    while let Some(((s, t), w)) = queue.pop_front() {
        if a.accepting[s] != b.accepting[t] {
            return Some(w);
        }
        for l in 0..a.alphabet.min(b.alphabet) {
            let next = (a.delta[s][l as usize], b.delta[t][l as usize]);
            if seen.insert(next) {
                let mut w2 = w.clone();
                w2.push(l);
                queue.push_back((next, w2));
            }
        }
    }
    None
}

/// Counts of words outside the language, weighted as partitions: letter `a` at
/// position `j` is `a` parts equal to `j`. Returns `[len][weight]` through `max_n`.
fn count_table(dfa: &Dfa, max_n: u32) -> Vec<Vec<u128>> {
    let n = max_n as usize;
    let safe = dfa.zero_safe();
    let states = dfa.len();
    let mut out = vec![vec![0u128; n + 1]; n + 1];
    if safe[dfa.start] {
        out[0][0] = 1;
    }
    // cur[state][len][weight]
    let mut cur = vec![vec![vec![0u128; n + 1]; n + 1]; states];
    if !dfa.accepting[dfa.start] {
        cur[dfa.start][0][0] = 1;
    }
    for j in 1..=n {
        let mut next = vec![vec![vec![0u128; n + 1]; n + 1]; states];
        for s in 0..states {
            if cur[s].iter().all(|r| r.iter().all(|&c| c == 0)) {
                continue;
            }
            for a in 0..dfa.alphabet as usize {
                let t = dfa.delta[s][a];
                if dfa.accepting[t] {
                    continue;
                }
                let dw = j * a;
                for len in 0..=n {
                    for w in 0..=n {
                        let c = cur[s][len][w];
                        if c == 0 || w + dw > n || len + a > n {
                            continue;
                        }
                        next[t][len + a][w + dw] += c;
                        if a > 0 && safe[t] {
                            out[len + a][w + dw] += c;
                        }
                    }
                }
            }
        }
        cur = next;
    }
    out
}

/// `sum x^{len(lambda)} q^{|lambda|}` over partitions whose multiplicity words avoid the language, through `q^max_n`.
pub fn weighted_count(dfa: &Dfa, max_n: u32) -> BivariateSeries {
    let table = count_table(dfa, max_n);
    let mut p = Poly2::zero();
    for (len, row) in table.iter().enumerate() {
        for (w, &c) in row.iter().enumerate() {
            if c != 0 {
                p.add_term(len as u32, w as u32, BigInt::from(c));
            }
        }
    }
    BivariateSeries::from_poly(p, max_n)
}

/// The `x = 1` specialization of [`weighted_count`], computed without tracking length.
pub fn univariate_counts(dfa: &Dfa, max_n: u32) -> Vec<u128> {
    let n = max_n as usize;
    let safe = dfa.zero_safe();
    let states = dfa.len();
    let mut out = vec![0u128; n + 1];
    if safe[dfa.start] {
        out[0] = 1;
    }
    let mut cur = vec![vec![0u128; n + 1]; states];
    if !dfa.accepting[dfa.start] {
        cur[dfa.start][0] = 1;
    }
    for j in 1..=n {
        let mut next = vec![vec![0u128; n + 1]; states];
        for s in 0..states {
            for a in 0..dfa.alphabet as usize {
                let t = dfa.delta[s][a];
                if dfa.accepting[t] {
                    continue;
                }
                let dw = j * a;
                if dw > n {
                    continue;
                }
                for w in 0..=n - dw {
                    let c = cur[s][w];
                    if c != 0 {
                        next[t][w + dw] += c;
                        if a > 0 && safe[t] {
                            out[w + dw] += c;
                        }
                    }
                }
            }
        }
        cur = next;
    }
    out
}

/// Counts for the `RR` and `KR` families by a transfer matrix over part values.
///
/// State after value `v` is `(m_{v-1}, m_v)`; every condition of these
/// families only involves three consecutive multiplicities.
pub fn local_counts(preset: Preset, max_n: u32) -> Vec<u128> {
    let n = max_n as usize;
    let (cap, k): (usize, Option<usize>) = match preset {
        Preset::Rr(_) => (1, None),
        Preset::Kr(4) => (2, Some(2)),
        Preset::Kr(5) => (2, Some(1)),
        Preset::Kr(_) => (2, Some(0)),
        Preset::L(_) => panic!("L families are counted through their automata"),
    };
    let allowed = |v: usize, m2: usize, m1: usize, m0: usize| -> bool {
        // m2 = m_{v-2}, m1 = m_{v-1}, m0 = m_v
        match preset {
            Preset::Rr(a) => m1 + m0 <= 1 && !(a == 2 && v == 1 && m0 > 0),
            Preset::Kr(a) => {
                let k = k.unwrap();
                if m2 + m1 + m0 > 2 {
                    return false;
                }
                if m0 >= 2 && (2 * v) % 3 != k {
                    return false;
                }
                if m1 >= 1 && m0 >= 1 && v >= 2 && (2 * v - 1) % 3 != k {
                    return false;
                }
                match (a, v) {
                    (2..=4, 1) => m0 == 0,
                    (3, 2) => m0 == 0,
                    (5, 2) => m0 <= 1,
                    _ => true,
                }
            }
            Preset::L(_) => unreachable!(),
        }
    };
    let width = cap + 1;
    let mut cur = vec![vec![0u128; n + 1]; width * width];
    cur[0][0] = 1;
    for v in 1..=n.max(1) {
        let mut next = vec![vec![0u128; n + 1]; width * width];
        for m2 in 0..width {
            for m1 in 0..width {
                let row = &cur[m2 * width + m1];
                for m0 in 0..width {
                    if !allowed(v, m2, m1, m0) {
                        continue;
                    }
                    let dw = v * m0;
                    if dw > n {
                        continue;
                    }
                    let dst = m1 * width + m0;
                    for w in 0..=n - dw {
                        if row[w] != 0 {
                            next[dst][w + dw] += row[w];
                        }
                    }
                }
            }
        }
        cur = next;
    }
    let mut out = vec![0u128; n + 1];
    for row in &cur {
        for (w, &c) in row.iter().enumerate() {
            out[w] += c;
        }
    }
    out
}

/// Counts of `set` for `n <= max_n` without enumerating partitions: transfer
/// matrices for `RR`/`KR`, the avoidance DFA for `L` and custom sets, the
/// product expansion for congruence sets.
pub fn dp_counts(set: &ConstraintSet, max_n: u32) -> Result<Vec<u64>, AutomataError> {
    let overflow = |n: usize| AutomataError::CountOverflow(n as u32);
    let wide: Vec<u128> = match set {
        ConstraintSet::Preset(p @ (Preset::Rr(_) | Preset::Kr(_))) => local_counts(*p, max_n),
        ConstraintSet::Congruence { modulus, residues } => {
            return congruence_counts(*modulus, residues, max_n)
                .iter()
                .enumerate()
                .map(|(n, c)| u64::try_from(c).map_err(|_| overflow(n)))
                .collect();
        }
        other => {
            let c = other.as_custom().expect("remaining sets are custom");
            univariate_counts(&avoidance_dfa(c.m, &c.forbidden, &c.prefixes)?, max_n)
        }
    };
    wide.iter().enumerate().map(|(n, &c)| u64::try_from(c).map_err(|_| overflow(n))).collect()
}

/// Compares counting functions of two families through [`dp_counts`].
pub fn pt_equiv_dp(a: &ConstraintSet, b: &ConstraintSet, max_n: u32) -> Result<PtReport, AutomataError> {
    Ok(PtReport::from_counts(a, b, dp_counts(a, max_n)?, dp_counts(b, max_n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{brute_force_counts, ConstraintSet, CustomSet};

    fn l_dfa(a: u8) -> Dfa {
        let c = CustomSet::l_set(a);
        avoidance_dfa(c.m, &c.forbidden, &c.prefixes).unwrap()
    }

    #[test]
    fn l3_matches_reference_table() {
        let d = l_dfa(3);
        assert_eq!(d.len(), 11);
        assert_eq!(d, Dfa::reference_l3());
        assert!(dfa_isomorphic(&d, &Dfa::reference_l3()).unwrap());
        assert_eq!(l_dfa(1).len(), 14);
        assert_eq!(l_dfa(2).len(), 12);
    }

    #[test]
    fn trivial_languages() {
        let empty = avoidance_dfa(2, &[], &[]).unwrap();
        assert_eq!(empty.delta, vec![vec![0, 0]]);
        assert_eq!(empty.accepting, vec![false]);
        let c = weighted_count(&empty, 6);
        // prod (1 + x q^j): [x^2 q^5] counts {4,1},{3,2}
        assert_eq!(c.coeff(2, 5), BigInt::from(2));
        assert_eq!(c.coeff(0, 0), BigInt::from(1));
        let ones = avoidance_dfa(2, &["1".parse().unwrap()], &[]).unwrap();
        assert!(ones.accepts(&[0, 0, 1]));
        assert!(!ones.accepts(&[0, 0, 0]));
        assert_eq!(ones.len(), 2);
    }

    #[test]
    fn permuted_states_are_isomorphic() {
        let d = Dfa::reference_l3();
        let perm: Vec<usize> = (0..11).map(|s| (s * 7 + 3) % 11).collect();
        let mut delta = vec![vec![0; 3]; 11];
        let mut acc = vec![false; 11];
        for s in 0..11 {
            delta[perm[s]] = d.delta[s].iter().map(|&t| perm[t]).collect();
            acc[perm[s]] = d.accepting[s];
        }
        let p = Dfa::new(3, delta, perm[0], acc).unwrap();
        assert!(dfa_isomorphic(&d, &p).unwrap());
        assert!(!dfa_isomorphic(&l_dfa(1), &d).unwrap());
        assert!(separating_word(&l_dfa(1), &d).is_some());
    }

    #[test]
    fn counts_match_brute_force() {
        for a in 1..=3u8 {
            let d = l_dfa(a);
            let brute = brute_force_counts(&ConstraintSet::Preset(Preset::L(a)), 30);
            let dp = univariate_counts(&d, 30);
            assert_eq!(dp.iter().map(|&c| c as u64).collect::<Vec<_>>(), brute, "L{a}");
            let bi = weighted_count(&d, 30).at_x_one();
            assert_eq!(bi.iter().map(|c| c.to_string()).collect::<Vec<_>>(), brute.iter().map(u64::to_string).collect::<Vec<_>>());
        }
        assert_eq!(univariate_counts(&l_dfa(1), 6)[6], 3);
        for p in [Preset::Rr(1), Preset::Rr(2), Preset::Kr(1), Preset::Kr(2), Preset::Kr(3), Preset::Kr(4), Preset::Kr(5)] {
            let brute = brute_force_counts(&ConstraintSet::Preset(p), 30);
            let dp: Vec<u64> = local_counts(p, 30).iter().map(|&c| c as u64).collect();
            assert_eq!(dp, brute, "{p:?}");
        }
    }

    #[test]
    fn exports() {
        let d = Dfa::reference_l3();
        let j = d.to_json();
        assert_eq!(j["states"].as_array().unwrap().len(), 11);
        assert_eq!(j["accepting"], serde_json::json!(["q3"]));
        let csv = d.to_csv();
        assert!(csv.starts_with("letter,q0,q1"));
        assert!(csv.lines().nth(3).unwrap().starts_with("2,q3,q3,q3,q3,q3,q3,q9"));
        assert!(d.to_dot().contains("q6 -> q9 [label=\"2\"]"));
    }
}
