use std::collections::BTreeMap;
use std::error::Error;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::Path;
use std::sync::Arc;

use serde_json::json;
use zalg_core::automata::{avoidance_dfa, dfa_isomorphic, dp_counts, pt_equiv_dp, Dfa};
use zalg_core::cyclo::{constants, CyclotomicNumber};
use zalg_core::fock::{
    heisenberg_structure, highest_weight_vector, rank_of_family, standard_module, straighten_pair, verify_relation, FockSpace, FockVector,
    Frame, RelationCheck, RelationConstants, RelationEngine, StraightenCase,
};
use zalg_core::lattice::{simple_root, TwistedCoxeterData};
use zalg_core::partitions::{brute_force_bivariate, brute_force_counts, pt_equiv, ConstraintSet, CustomSet, Partition, Preset};
use zalg_core::poly::Poly2;
use zalg_core::qdiff::{
    corrected_reference_recurrences, murray_miller, parse_recurrences, reference_recurrences, system_from_dfa, verify_annihilation,
    ScalarRecurrence, REFERENCE_L3_SYSTEM,
};
use zalg_core::qseries::{congruence_counts, fourier_identities, g_series, triple_sum, verify_fourier_identity, DeltaKind};

use crate::report::{Artifact, Check, ScenarioReport};
use crate::{CliError, Params};

pub const SCENARIOS: [&str; 10] =
    ["pt-equiv", "triple-sum", "automaton", "qdiff-derive", "qdiff-verify-paper", "fourier", "relations", "kernel", "rank", "constants"];

/// Runtime context shared by all scenarios.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub cache_dir: Option<std::path::PathBuf>,
}

type Outcome = Result<(), Box<dyn Error + Send + Sync>>;

/// Runs one scenario. Usage errors are returned as `Err`; computation errors become failed checks.
pub fn run_scenario(name: &str, params: &Params, ctx: &Context) -> Result<ScenarioReport, CliError> {
    let start = std::time::Instant::now();
    let mut report = match name {
        "pt-equiv" => pt_equiv_scenario(params)?,
        "triple-sum" => triple_sum_scenario(params)?,
        "automaton" => automaton_scenario(params)?,
        "qdiff-derive" => qdiff_derive_scenario(params)?,
        "qdiff-verify-paper" => qdiff_verify_scenario(params)?,
        "fourier" => fourier_scenario(params)?,
        "relations" => relations_scenario(params, ctx)?,
        "kernel" => kernel_scenario(params)?,
        "rank" => rank_scenario(params)?,
        "constants" => constants_scenario(params)?,
        other => return Err(CliError::UnknownScenario(other.to_string())),
    };
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}

/// Validates keys and records the effective value of every parameter.
struct Reader<'a> {
    scenario: &'static str,
    params: &'a Params,
    effective: BTreeMap<String, String>,
}

impl<'a> Reader<'a> {
    fn new(scenario: &'static str, params: &'a Params, allowed: &[&str]) -> Result<Self, CliError> {
        if let Some(key) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CliError::UnknownParam { scenario: scenario.to_string(), key: key.clone() });
        }
        Ok(Reader { scenario, params, effective: BTreeMap::new() })
    }

    fn invalid(&self, key: &str, value: &str, reason: impl Into<String>) -> CliError {
        CliError::InvalidParam {
            scenario: self.scenario.to_string(),
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.into(),
        }
    }

    fn number(&self, key: &str, text: &str, range: &RangeInclusive<u32>) -> Result<u32, CliError> {
        let v: u32 = text.trim().parse().map_err(|_| self.invalid(key, text, "not a non-negative integer"))?;
        if !range.contains(&v) {
            return Err(self.invalid(key, text, format!("must lie in {}..={}", range.start(), range.end())));
        }
        Ok(v)
    }

    fn u32(&mut self, key: &str, default: u32, range: RangeInclusive<u32>) -> Result<u32, CliError> {
        let v = match self.params.get(key) {
            Some(text) => self.number(key, text, &range)?,
            None => default,
        };
        self.effective.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    fn list(&mut self, key: &str, default: &[u32], range: RangeInclusive<u32>) -> Result<Vec<u32>, CliError> {
        let v = match self.params.get(key) {
            Some(text) => {
                let mut v = text.split(',').map(|t| self.number(key, t, &range)).collect::<Result<Vec<_>, _>>()?;
                v.sort_unstable();
                v.dedup();
                v
            }
            None => default.to_vec(),
        };
        self.effective.insert(key.to_string(), join(&v, ","));
        Ok(v)
    }

    fn text(&mut self, key: &str) -> Option<String> {
        let v = self.params.get(key).map(|s| s.trim().to_string());
        if let Some(s) = &v {
            self.effective.insert(key.to_string(), s.clone());
        }
        v
    }

    fn set(&self, key: &str, text: &str) -> Result<ConstraintSet, CliError> {
        text.parse().map_err(|e: zalg_core::partitions::PartitionError| self.invalid(key, text, e.to_string()))
    }

    fn report(self) -> ScenarioReport {
        ScenarioReport::new(self.scenario, self.effective)
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Records a failed check instead of aborting the report when a computation errors out.
fn guarded(report: &mut ScenarioReport, name: &str, body: impl FnOnce(&mut ScenarioReport) -> Outcome) {
    if let Err(e) = body(report) {
        report.push(Check::fail(name, e.to_string()));
    }
}

fn first_difference(a: &[u64], b: &[u64]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y).or((a.len() != b.len()).then(|| a.len().min(b.len())))
}

pub const PT_PAIRS: [(&str, &str); 10] = [
    ("KR1", "T9:1,3,6,8"),
    ("KR2", "T9:2,3,6,7"),
    ("KR3", "T9:3,4,5,6"),
    ("KR4", "T9:2,3,5,8"),
    ("KR5", "T9:1,4,6,7"),
    ("RR1", "T5:1,4"),
    ("RR2", "T5:2,3"),
    ("L1", "T16:2,3,4,5,11,12,13,14"),
    ("L2", "T2:1"),
    ("L3", "T16:1,4,6,7,9,10,12,15"),
];

fn pt_equiv_scenario(params: &Params) -> Result<ScenarioReport, CliError> {
    let mut r = Reader::new("pt-equiv", params, &["lhs", "rhs", "max-n", "brute-n"])?;
    let pairs = match (r.text("lhs"), r.text("rhs")) {
        (Some(l), Some(rhs)) => vec![(r.set("lhs", &l)?, r.set("rhs", &rhs)?)],
        (None, None) => PT_PAIRS.iter().map(|(l, rhs)| (l.parse().unwrap(), rhs.parse().unwrap())).collect(),
        (Some(l), None) => return Err(r.invalid("rhs", "", format!("required together with lhs = {l}"))),
        (None, Some(rhs)) => return Err(r.invalid("lhs", "", format!("required together with rhs = {rhs}"))),
    };
    let max_n = r.u32("max-n", 200, 0..=2000)?;
    let brute_n = r.u32("brute-n", 60.min(max_n), 0..=max_n.min(80))?;
    let mut report = r.report();
    let mut csv = String::from("lhs,rhs,n,count_lhs,count_rhs\n");
    for (lhs, rhs) in &pairs {
        let label = format!("{lhs} vs {rhs}");
        guarded(&mut report, &label, |report| {
            let dp = pt_equiv_dp(lhs, rhs, max_n)?;
            let diff = first_difference(&dp.counts_lhs, &dp.counts_rhs);
            report.push(
                Check::expect(format!("{label}: counting, n <= {max_n}"), diff.is_none(), || "counts differ".into())
                    .with_witness(diff.map(|n| json!({"n": n, "lhs": dp.counts_lhs[n], "rhs": dp.counts_rhs.get(n)}))),
            );
            let brute = pt_equiv(lhs, rhs, brute_n);
            let diff = first_difference(&brute.counts_lhs, &brute.counts_rhs);
            report.push(
                Check::expect(format!("{label}: brute force, n <= {brute_n}"), diff.is_none(), || "counts differ".into())
                    .with_witness(diff.map(|n| json!({"n": n, "lhs": brute.counts_lhs[n], "rhs": brute.counts_rhs.get(n)}))),
            );
            let diff = first_difference(&brute.counts_lhs, &dp.counts_lhs[..=brute_n as usize]);
            report.push(
                Check::expect(format!("{label}: brute force agrees with counting"), diff.is_none(), || "methods disagree".into())
                    .with_witness(diff.map(|n| json!({"n": n, "brute": brute.counts_lhs[n], "counting": dp.counts_lhs[n]}))),
            );
            for (n, (a, b)) in dp.counts_lhs.iter().zip(&dp.counts_rhs).enumerate() {
                let _ = writeln!(csv, "{},{},{n},{a},{b}", csv_field(&lhs.to_string()), csv_field(&rhs.to_string()));
            }
            Ok(())
        });
    }
    report.attach(Artifact::new("pt_equiv.csv", csv));
    Ok(report)
}

fn triple_sum_scenario(params: &Params) -> Result<ScenarioReport, CliError> {
    let mut r = Reader::new("triple-sum", params, &["a", "order"])?;
    let family = r.list("a", &[1, 2, 3, 4, 5], 1..=5)?;
    let order = r.u32("order", 40, 0..=80)?;
    let mut report = r.report();
    let mut csv = String::from("a,x,q,coefficient\n");
    for a in family {
        let name = format!("KR{a} triple sum, q^{order}");
        guarded(&mut report, &name, |report| {
            let series = triple_sum(a as usize, order)?;
            let brute = brute_force_bivariate(&ConstraintSet::preset(Preset::Kr(a as u8)), order);
            let mismatch = (0..=order).flat_map(|j| (0..=order).map(move |i| (i, j))).find(|&(i, j)| {
                let want = brute.get(&(i, j)).copied().unwrap_or(0);
                series.coeff(i, j) != want.into()
            });
            report.push(Check::expect(&name, mismatch.is_none(), || "coefficient differs from the brute-force count".into()).with_witness(
                mismatch.map(|(i, j)| {
                    json!({"x": i, "q": j, "series": series.coeff(i, j).to_string(), "brute": brute.get(&(i, j)).copied().unwrap_or(0)})
                }),
            ));
            for (&(i, j), c) in brute.iter().filter(|(_, &c)| c != 0) {
                let _ = writeln!(csv, "{a},{i},{j},{c}");
            }
            Ok(())
        });
    }
    report.attach(Artifact::new("triple_sum.csv", csv));
    Ok(report)
}

fn l_dfa(a: u8) -> Result<Dfa, zalg_core::automata::AutomataError> {
    let c = CustomSet::l_set(a);
    avoidance_dfa(c.m, &c.forbidden, &c.prefixes)
}

fn automaton_scenario(params: &Params) -> Result<ScenarioReport, CliError> {
    let mut r = Reader::new("automaton", params, &["a", "check-n"])?;
    let family = r.list("a", &[3], 1..=3)?;
    let check_n = r.u32("check-n", 30, 0..=60)?;
    let mut report = r.report();
    for a in family {
        let a = a as u8;
        guarded(&mut report, &format!("L{a} automaton"), |report| {
            let dfa = l_dfa(a)?;
            report.push(Check::expect(format!("L{a}: minimal"), dfa.is_minimal(), || "minimization shrinks the automaton".into()));
            let sinks: Vec<usize> = (0..dfa.len()).filter(|&s| dfa.accepting[s]).collect();
            let absorbing = sinks.len() == 1 && dfa.delta[sinks[0]].iter().all(|&t| t == sinks[0]);
            report.push(Check::expect(format!("L{a}: single accepting sink"), absorbing, || format!("accepting states {sinks:?}")));
            let set = ConstraintSet::preset(Preset::L(a));
            let counted = dp_counts(&set, check_n)?;
            let brute = brute_force_counts(&set, check_n);
            let diff = first_difference(&counted, &brute);
            report.push(
                Check::expect(format!("L{a}: automaton counts match brute force, n <= {check_n}"), diff.is_none(), || {
                    "counts differ".into()
                })
                .with_witness(diff.map(|n| json!({"n": n, "automaton": counted[n], "brute": brute[n]}))),
            );
            if a == 3 {
                l3_reference_checks(report, &dfa)?;
            }
            let stem = format!("l{a}");
            report.attach(Artifact::json(format!("{stem}.dfa.json"), &dfa.to_json()));
            report.attach(Artifact::new(format!("{stem}.dot"), dfa.to_dot()));
            report.attach(Artifact::new(format!("{stem}.table.csv"), dfa.to_csv()));
            Ok(())
        });
    }
    Ok(report)
}

fn l3_reference_checks(report: &mut ScenarioReport, dfa: &Dfa) -> Outcome {
    let reference = Dfa::reference_l3();
    report.push(Check::expect("L3: 11 states", dfa.len() == 11, || format!("{} states", dfa.len())));
    report.push(Check::expect("L3: isomorphic to the reference table", dfa_isomorphic(dfa, &reference)?, || "not isomorphic".into()));
    let mut reduced = CustomSet::l_set(3);
    let triple: Partition = "1,1,1".parse()?;
    reduced.forbidden.retain(|p| p != &triple);
    let alt = avoidance_dfa(reduced.m, &reduced.forbidden, &reduced.prefixes)?;
    report.push(Check::expect("L3: forbidding (1,1,1) is redundant", dfa_isomorphic(&alt, &reference)?, || "automata differ".into()));
    let sys = system_from_dfa(&reference)?;
    let mut mismatch = None;
    for (v, (row, want)) in sys.matrix.iter().zip(REFERENCE_L3_SYSTEM).enumerate() {
        for (u, (entry, text)) in row.iter().zip(want).enumerate() {
            if mismatch.is_none() && entry != &Poly2::parse(text)? {
                mismatch = Some(json!({"row": v, "column": u, "computed": entry.to_string(), "reference": text}));
            }
        }
    }
    let shape_ok = sys.matrix.len() == 10 && sys.matrix.iter().all(|r| r.len() == 10);
    report.push(
        Check::expect("L3: simultaneous system matches the reference matrix", shape_ok && mismatch.is_none(), || "entry differs".into())
            .with_witness(mismatch),
    );
    Ok(())
}

fn recurrence_text(a: u32, rec: &ScalarRecurrence) -> String {
    let mut s = String::new();
    for (i, p) in rec.polys.iter().enumerate() {
        let _ = writeln!(s, "{a} {i} {p}");
    }
    s
}

fn qdiff_derive_scenario(params: &Params) -> Result<ScenarioReport, CliError> {
    let mut r = Reader::new("qdiff-derive", params, &["a", "order"])?;
    let family = r.list("a", &[1, 2, 3], 1..=3)?;
    let order = r.u32("order", 60, 0..=120)?;
    let mut report = r.report();
    for a in family {
        guarded(&mut report, &format!("L{a} derivation"), |report| {
            let dfa = l_dfa(a as u8)?;
            let derived = murray_miller(&system_from_dfa(&dfa)?)?;
            report.push(Check::expect(format!("L{a}: order 8"), derived.order() == 8, || format!("order {}", derived.order())));
            let rep = verify_annihilation(&derived, &dfa, order)?;
            report.push(
                Check::expect(format!("L{a}: annihilates through q^{order}"), rep.vanishes, || "nonzero residual".into())
                    .with_witness(rep.first_nonzero.map(|((i, j), c)| json!({"x": i, "q": j, "coefficient": c}))),
            );
            let reference = &corrected_reference_recurrences()?[a as usize - 1];
            report.push(Check::expect(
                format!("L{a}: equals the reference recurrence up to sign"),
                derived.equal_up_to_sign(reference),
                || "derived and reference recurrences differ".into(),
            ));
            let text = recurrence_text(a, &derived);
            let round_trip = parse_recurrences(&text)?;
            report.push(Check::expect(format!("L{a}: artifact parses back"), round_trip.first() == Some(&derived), || {
                "round trip differs".into()
            }));
            report.attach(Artifact::new(format!("recurrence_L{a}.txt"), text));
            Ok(())
        });
    }
    Ok(report)
}

/// Residual left by the printed `L_2` recurrence: one missing term in `p_4`.
const L2_ERRATUM_RESIDUAL: ((u32, u32), &str) = ((4, 14), "1");

fn qdiff_verify_scenario(params: &Params) -> Result<ScenarioReport, CliError> {
    let mut r = Reader::new("qdiff-verify-paper", params, &["a", "order"])?;
    let family = r.list("a", &[1, 2, 3], 1..=3)?;
    let order = r.u32("order", 60, 15..=120)?;
    let mut report = r.report();
    let mut csv = String::from("a,variant,vanishes,x,q,coefficient\n");
    for a in family {
        guarded(&mut report, &format!("L{a} published recurrence"), |report| {
            let dfa = l_dfa(a as u8)?;
            let idx = a as usize - 1;
            let printed = verify_annihilation(&reference_recurrences()?[idx], &dfa, order)?;
            let corrected = verify_annihilation(&corrected_reference_recurrences()?[idx], &dfa, order)?;
            let name = format!("L{a}: published recurrence annihilates through q^{order}");
            let witness = printed.first_nonzero.as_ref().map(|((i, j), c)| json!({"x": i, "q": j, "coefficient": c}));
            let known = a == 2 && printed.first_nonzero.as_ref().map(|((i, j), c)| ((*i, *j), c.as_str())) == Some(L2_ERRATUM_RESIDUAL);
            let check = if printed.vanishes {
                Check::pass(name)
            } else if known {
                Check::flagged(name, "published p_4 leaves x^4 q^14; one-term erratum applied")
            } else {
                Check::fail(name, "nonzero residual")
            };
            report.push(check.with_witness(witness));
            report.push(
                Check::expect(format!("L{a}: corrected recurrence annihilates through q^{order}"), corrected.vanishes, || {
                    "nonzero residual".into()
                })
                .with_witness(corrected.first_nonzero.as_ref().map(|((i, j), c)| json!({"x": i, "q": j, "coefficient": c}))),
            );
            for (variant, rep) in [("published", &printed), ("corrected", &corrected)] {
                let (x, q, c) = match &rep.first_nonzero {
                    Some(((i, j), c)) => (i.to_string(), j.to_string(), csv_field(c)),
                    None => (String::new(), String::new(), String::new()),
                };
                let _ = writeln!(csv, "{a},{variant},{},{x},{q},{c}", rep.vanishes);
            }
            Ok(())
        });
    }
    report.attach(Artifact::new("qdiff_verify.csv", csv));
    Ok(report)
}

fn c12(s: &str) -> CyclotomicNumber {
    CyclotomicNumber::parse(12, s).expect("valid literal")
}

fn fourier_scenario(params: &Params) -> Result<ScenarioReport, CliError> {
    let mut r = Reader::new("fourier", params, &["identity", "radius"])?;
    let wanted = r.list("identity", &[1, 2, 3, 4, 5, 6, 7, 8], 1..=8)?;
    let radius = r.u32("radius", 40, 1..=120)?;
    let mut report = r.report();
    let mut csv = String::from("identity,n,lhs,rhs,pass\n");
    for id in fourier_identities().into_iter().filter(|id| wanted.contains(&(id.index as u32))) {
        let k = id.index;
        guarded(&mut report, &format!("identity {k}"), |report| {
            let rep = verify_fourier_identity(&id, radius as usize)?;
            report.push(Check::expect(
                format!("identity {k}: fitted delta combination reproduces |n| <= {radius}"),
                rep.fitted_verifies,
                || "fit does not reproduce the window".into(),
            ));
            let name = format!("identity {k}: published right-hand side");
            let first_bad = rep.rows.iter().find(|row| !row.pass);
            let witness = first_bad.map(|row| json!({"n": row.n, "lhs": row.lhs.to_string(), "rhs": row.rhs.to_string()}));
            let check = if rep.all_pass && rep.fitted == id.printed {
                Check::pass(name)
            } else if k == 1 && identity_one_discrepancy(&rep.fitted) {
                let a_fit = rep.fitted.coefficient(DeltaKind::Delta, 4);
                Check::flagged(name, format!("published A_flat violates 2A+2B+C = 2; fitted A_flat = {a_fit}"))
            } else {
                Check::fail(name, "published combination does not match")
            };
            report.push(check.with_witness(witness));
            for row in &rep.rows {
                let _ = writeln!(csv, "{k},{},{},{},{}", row.n, csv_field(&row.lhs.to_string()), csv_field(&row.rhs.to_string()), row.pass);
            }
            Ok(())
        });
    }
    report.attach(Artifact::new("fourier.csv", csv));
    Ok(report)
}

/// The fitted identity-1 constants satisfy the forced constant-term identity, the published ones miss it by `8 w^3`.
fn identity_one_discrepancy(fitted: &zalg_core::qseries::DeltaCombination) -> bool {
    let a_fit = fitted.coefficient(DeltaKind::Delta, 4);
    let forced = |a: &CyclotomicNumber| &(&a.scale_int(2) + &constants::b_flat().scale_int(2)) + &constants::c_flat();
    let two = CyclotomicNumber::from_integer(12, 2);
    a_fit == c12("4 + 4*w - 2*w^3")
        && fitted.coefficient(DeltaKind::Delta, -4) == a_fit
        && fitted.coefficient(DeltaKind::Delta, 5) == constants::b_flat()
        && fitted.coefficient(DeltaKind::Delta, 6) == constants::c_flat()
        && forced(&a_fit) == two
        && &forced(&constants::a_flat()) - &two == c12("8*w^3")
}

fn relations_scenario(params: &Params, ctx: &Context) -> Result<ScenarioReport, CliError> {
    let mut r = Reader::new("relations", params, &["relation", "bound", "max-deg"])?;
    let which = r.list("relation", &[1, 2, 3, 4], 1..=4)?;
    let bound = r.u32("bound", 6, 0..=12)? as i64;
    let max_deg = r.u32("max-deg", 8, 0..=12)?;
    let mut report = r.report();
    let mut csv = String::from("relation,A,B,checked,vanishes\n");
    guarded(&mut report, "relation engine", |report| {
        let data = TwistedCoxeterData::builtin("D4-3")?;
        let k = RelationConstants::fitted(&data)?;
        let engine = RelationEngine::d4(Frame::Vacuum, max_deg + 2 * bound as u32 + 10)?;
        for rel in which {
            let rel = rel as u8;
            let mut count = 0usize;
            let mut failure = None;
            for a in -bound..=bound {
                for b in -bound..=bound {
                    if rel >= 3 && (a + b) % 3 == 0 {
                        continue;
                    }
                    let check =
                        cached_relation(ctx.cache_dir.as_deref(), rel, a, b, max_deg, || verify_relation(&engine, &k, rel, a, b, max_deg))?;
                    let _ = writeln!(csv, "{rel},{a},{b},{},{}", check.checked, check.vanishes());
                    if failure.is_none() && !check.vanishes() {
                        failure = Some(check);
                    }
                    count += 1;
                }
            }
            report.push(
                Check::expect(
                    format!("relation {rel}: {count} instances, |A|,|B| <= {bound}, degree <= {max_deg}"),
                    failure.is_none(),
                    || "relation does not vanish".into(),
                )
                .with_witness(failure.map(|f| serde_json::to_value(f).expect("relation checks serialize"))),
            );
        }
        Ok(())
    });
    report.attach(Artifact::new("relations.csv", csv));
    Ok(report)
}

/// Relation verdicts are cached per instance under `<cache>/relations/`.
fn cached_relation(
    cache: Option<&Path>,
    rel: u8,
    a: i64,
    b: i64,
    max_deg: u32,
    compute: impl FnOnce() -> Result<RelationCheck, zalg_core::fock::FockError>,
) -> Result<RelationCheck, Box<dyn Error + Send + Sync>> {
    let Some(dir) = cache else {
        return Ok(compute()?);
    };
    let dir = dir.join("relations");
    let path = dir.join(format!("D4-3_level3_vacuum_fitted_r{rel}_A{a}_B{b}_deg{max_deg}.json"));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(check) = serde_json::from_str::<RelationCheck>(&text) {
            return Ok(check);
        }
    }
    let check = compute()?;
    std::fs::create_dir_all(&dir)?;
    std::fs::write(&path, serde_json::to_string(&check)?)?;
    Ok(check)
}

fn kernel_scenario(params: &Params) -> Result<ScenarioReport, CliError> {
    let mut r = Reader::new("kernel", params, &["max-mode"])?;
    let max_mode = r.u32("max-mode", 8, 1..=16)?;
    let mut report = r.report();
    guarded(&mut report, "highest-weight vectors", |report| {
        let heis = Arc::new(heisenberg_structure(Arc::new(TwistedCoxeterData::builtin("D4-3")?)));
        let s = FockSpace::new(heis, 3, Frame::Tensor, max_mode.max(8))?;
        let b1 = simple_root(4, 0);
        let u = (1..=3).map(|a| highest_weight_vector(&s, "D4-3", a)).collect::<Result<Vec<FockVector>, _>>()?;
        for (i, want) in [1u32, 0, 3].into_iter().enumerate() {
            let got = s.degrees(&u[i]);
            report.push(Check::expect(format!("u_{}: degree {want}", i + 1), got == vec![want], || format!("degrees {got:?}")));
        }
        for (i, mode) in [(1usize, -1i64), (2, -1), (2, -2)] {
            let out = s.apply_z(&b1, mode, &u[i])?;
            report.push(
                Check::expect(format!("Z_{mode} u_{} = 0", i + 1), out.is_zero(), || "nonzero image".into())
                    .with_witness((!out.is_zero()).then(|| s.to_json(&out))),
            );
        }
        for (i, v) in u.iter().enumerate() {
            let mut bad = None;
            for j in 1..=max_mode as i64 {
                if bad.is_none() && !s.apply_heisenberg(j, v)?.is_zero() {
                    bad = Some(j);
                }
            }
            report.push(
                Check::expect(format!("u_{}: killed by Heisenberg modes 1..={max_mode}", i + 1), bad.is_none(), || {
                    "mode acts nontrivially".into()
                })
                .with_witness(bad.map(|j| json!({"mode": j}))),
            );
        }
        let vectors: BTreeMap<String, serde_json::Value> =
            u.iter().enumerate().map(|(i, v)| (format!("u{}", i + 1), s.to_json(v))).collect();
        report.attach(Artifact::json("kernel.json", &vectors));
        Ok(())
    });
    Ok(report)
}

/// `(type, family sets and products indexed by a - 1, default a values, default max n)`.
struct RankFamily {
    label: &'static str,
    sets: &'static [(&'static str, &'static str)],
    default_a: &'static [u32],
    default_max_n: u32,
}

const RANK_FAMILIES: [RankFamily; 3] = [
    RankFamily {
        label: "D4-3",
        sets: &[("KR1", "T9:1,3,6,8"), ("KR2", "T9:2,3,6,7"), ("KR3", "T9:3,4,5,6")],
        default_a: &[1, 2, 3],
        default_max_n: 10,
    },
    RankFamily {
        label: "A4-2",
        sets: &[("L1", "T16:2,3,4,5,11,12,13,14"), ("L2", "T2:1"), ("L3", "T16:1,4,6,7,9,10,12,15")],
        default_a: &[1],
        default_max_n: 8,
    },
    RankFamily { label: "A1-1", sets: &[("RR1", "T5:1,4"), ("RR2", "T5:2,3")], default_a: &[1, 2], default_max_n: 10 },
];

fn rank_scenario(params: &Params) -> Result<ScenarioReport, CliError> {
    let mut r = Reader::new("rank", params, &["type", "a", "max-n"])?;
    let families: Vec<&RankFamily> = match r.text("type") {
        Some(t) => vec![RANK_FAMILIES.iter().find(|f| f.label == t).ok_or_else(|| r.invalid("type", &t, "expected D4-3, A4-2 or A1-1"))?],
        None => RANK_FAMILIES.iter().collect(),
    };
    if families.len() > 1 && (params.contains_key("a") || params.contains_key("max-n")) {
        return Err(r.invalid("type", "", "a and max-n require a single type"));
    }
    let mut jobs = Vec::new();
    for f in &families {
        let a = r.list("a", f.default_a, 1..=f.sets.len() as u32)?;
        let max_n = r.u32("max-n", f.default_max_n, 0..=24)?;
        jobs.push((*f, a, max_n));
    }
    if families.len() > 1 {
        r.effective.remove("a");
        r.effective.remove("max-n");
    }
    let mut report = r.report();
    for (f, family, max_n) in jobs {
        let mut csv = String::from("a,n,count,rank,product-coefficient\n");
        for a in family {
            let (set, product) = f.sets[a as usize - 1];
            let name = format!("{} a={a}: |{set} n| = rank = [q^n] {product}, n <= {max_n}", f.label);
            guarded(&mut report, &name, |report| {
                let family_set: ConstraintSet = set.parse()?;
                let coeffs = match product.parse()? {
                    ConstraintSet::Congruence { modulus, residues } => congruence_counts(modulus, &residues, max_n),
                    _ => unreachable!("products are congruence sets"),
                };
                let module = standard_module(f.label, a as usize, max_n + 4)?;
                let mut bad = None;
                for n in 0..=max_n {
                    let row = rank_of_family(&module, &family_set, n)?;
                    let coeff = &coeffs[n as usize];
                    if bad.is_none() && (row.rank != row.count || coeff != &row.count.into()) {
                        bad = Some(json!({"n": n, "count": row.count, "rank": row.rank, "product-coefficient": coeff.to_string()}));
                    }
                    let _ = writeln!(csv, "{a},{n},{},{},{coeff}", row.count, row.rank);
                }
                report
                    .push(Check::expect(&name, bad.is_none(), || "count, rank and product coefficient disagree".into()).with_witness(bad));
                Ok(())
            });
        }
        report.attach(Artifact::new(format!("rank_{}.csv", f.label), csv));
    }
    Ok(report)
}

fn constants_scenario(params: &Params) -> Result<ScenarioReport, CliError> {
    let r = Reader::new("constants", params, &[])?;
    let mut report = r.report();
    let mut csv = String::from("name,value\n");
    guarded(&mut report, "cyclotomic constants", |report| {
        let data = TwistedCoxeterData::builtin("D4-3")?;
        let b1 = simple_root(4, 0);
        for (p, want) in [(4i64, "4 - 8*w^2 - 6*w^3"), (5, "-52 + 104*w^2 + 90*w^3")] {
            let eps = data.epsilon(&data.apply_nu(p, &b1), &b1)?;
            report.push(Check::expect(format!("epsilon(nu^{p} b1, b1) = {want}"), eps == c12(want), || format!("got {eps}")));
            let _ = writeln!(csv, "epsilon(nu^{p} b1;b1),{eps}");
        }
        let ratio = constants::b_flat().checked_div(&constants::a_nat())?;
        let other = constants::d_nat().checked_div(&constants::e_nat())?;
        report.push(Check::expect("B_flat/A_nat = 2 + 2*w - w^3", ratio == c12("2 + 2*w - w^3"), || format!("got {ratio}")));
        report.push(Check::expect("D_nat/E_nat = B_flat/A_nat", other == ratio, || format!("got {other}")));
        let _ = writeln!(csv, "B_flat/A_nat,{ratio}");
        let third = CyclotomicNumber::from_fraction(12, 1, 3);
        let published_c1 = ["-6 - 4*w + 2*w^3", "-4*w + 2*w^3", "6 - 4*w + 2*w^3", "8*w - 4*w^3", "-6 + 8*w - 4*w^3", "4*w - 2*w^3"];
        for (i, text) in published_c1.iter().enumerate() {
            let g = g_series(i + 1, 2);
            let want = &c12(text) * &third;
            report.push(Check::expect(format!("c^({})_1 = ({text})/3", i + 1), g[1] == want, || format!("got {}", g[1])));
            let _ = writeln!(csv, "c^({})_0,{}", i + 1, g[0]);
            let _ = writeln!(csv, "c^({})_1,{}", i + 1, g[1]);
            if i < 5 {
                report.push(Check::expect(format!("c^({})_0 = 1", i + 1), g[0].is_one(), || format!("got {}", g[0])));
            }
        }
        let c60 = g_series(6, 1)[0].clone();
        let published = c12("-1 - 2*w - w^3");
        let name = "c^(6)_0 = 1 - D_nat/E_nat";
        report.push(if c60 == published {
            Check::pass(name)
        } else if c60 == &CyclotomicNumber::one(12) - &ratio {
            Check::flagged(name, format!("computed {c60}, published {published}"))
        } else {
            Check::fail(name, format!("got {c60}"))
        });
        Ok(())
    });
    guarded(&mut report, "straightening", |report| {
        let data = TwistedCoxeterData::builtin("D4-3")?;
        let k = RelationConstants::fitted(&data)?;
        let engine = RelationEngine::d4(Frame::Vacuum, 16)?;
        let third = CyclotomicNumber::from_fraction(12, 1, 3);
        let cases = [
            ((4, -3), StraightenCase::Shifted, None, Some(CyclotomicNumber::from_integer(12, 2))),
            ((4, 2), StraightenCase::Generic, Some(&(&c12("w") * &c12("2 - w^2")) * &third), None),
            ((4, 4), StraightenCase::Diagonal, Some(&c12("3 + 2*w - w^3") * &third), Some(c12("-1 - 2*w + w^3").scale_int(2))),
            ((3, 4), StraightenCase::Adjacent, None, Some(c12("2 + 2*w - w^3").scale_int(8))),
        ];
        for ((a, b), case, pair, leading) in cases {
            let s = straighten_pair(a, b, &k, 4)?;
            let tag = format!("straighten ({a},{b})");
            report.push(Check::expect(format!("{tag}: case {case:?}"), s.case == case, || format!("got {:?}", s.case)));
            if let Some(want) = pair {
                report.push(Check::expect(format!("{tag}: pair coefficient {want}"), s.pair(1) == want, || format!("got {}", s.pair(1))));
                let _ = writeln!(csv, "{tag} pair(1),{}", s.pair(1));
            }
            if let Some(want) = leading {
                report
                    .push(Check::expect(format!("{tag}: leading coefficient {want}"), s.leading == want, || format!("got {}", s.leading)));
                let _ = writeln!(csv, "{tag} leading,{}", s.leading);
            }
            report.push(Check::expect(format!("{tag}: remainder is higher"), s.remainder_is_higher(), || "remainder not higher".into()));
            report.push(Check::expect(format!("{tag}: combination verified on degree <= 4"), s.verify(&engine, &k, 4)?, || {
                "combination does not reproduce Z_A Z_B".into()
            }));
        }
        Ok(())
    });
    report.attach(Artifact::new("constants.csv", csv));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kv: &[(&str, &str)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn unknown_keys_and_bad_values_are_usage_errors() {
        let ctx = Context::default();
        assert!(matches!(run_scenario("nope", &Params::new(), &ctx), Err(CliError::UnknownScenario(_))));
        assert!(matches!(run_scenario("kernel", &params(&[("max-n", "3")]), &ctx), Err(CliError::UnknownParam { .. })));
        assert!(matches!(run_scenario("fourier", &params(&[("identity", "9")]), &ctx), Err(CliError::InvalidParam { .. })));
        assert!(matches!(run_scenario("pt-equiv", &params(&[("lhs", "KR1")]), &ctx), Err(CliError::InvalidParam { .. })));
        assert!(matches!(run_scenario("pt-equiv", &params(&[("lhs", "XX"), ("rhs", "KR1")]), &ctx), Err(CliError::InvalidParam { .. })));
        assert!(matches!(run_scenario("rank", &params(&[("a", "1")]), &ctx), Err(CliError::InvalidParam { .. })));
    }

    #[test]
    fn effective_params_include_defaults() {
        let rep = run_scenario("triple-sum", &params(&[("a", "2,1,2"), ("order", "12")]), &Context::default()).unwrap();
        assert_eq!(rep.params["a"], "1,2");
        assert_eq!(rep.params["order"], "12");
        assert!(!rep.failed());
    }

    #[test]
    fn csv_fields_are_quoted_when_needed() {
        assert_eq!(csv_field("KR1"), "KR1");
        assert_eq!(csv_field("T9:1,3"), "\"T9:1,3\"");
    }
}
