use std::sync::Arc;

use proptest::prelude::*;
use zalg_core::cyclo::{CyclotomicNumber, Rational};
use zalg_core::fock::*;
use zalg_core::lattice::{simple_root, TwistedCoxeterData};
use zalg_core::partitions::{enumerate, ConstraintSet, Preset};
use zalg_core::qseries::twisted_product;

fn heis() -> Arc<HeisenbergStructure> {
    Arc::new(heisenberg_structure(Arc::new(TwistedCoxeterData::builtin("D4-3").unwrap())))
}

fn space(level: usize, frame: Frame, max: u32) -> FockSpace {
    FockSpace::new(heis(), level, frame, max).unwrap()
}

fn basis_vectors(s: &FockSpace, max: u32) -> Vec<FockVector> {
    (0..=max).flat_map(|d| s.basis(d)).map(|mono| FockVector::monomial(mono, CyclotomicNumber::one(s.m()))).collect()
}

fn beta1() -> Vec<i64> {
    simple_root(4, 0)
}

#[test]
fn z_as_dressed_product_matches_factor_sum() {
    let s = space(3, Frame::Tensor, 12);
    let b = beta1();
    for v in basis_vectors(&s, 6) {
        for i in -2..=2 {
            assert_eq!(s.apply_z_composed(&b, i, &v).unwrap(), s.apply_z(&b, i, &v).unwrap(), "i = {i}, v = {v:?}");
        }
    }
}

#[test]
fn e_plus_e_minus_exchange_on_vacuum() {
    // E+(b,z1,r) E-(b',z2,s) = E-(b',z2,s) E+(b,z1,r) F_{b,b'}(z1/z2)^{1/rs}; on the vacuum
    // the z1^a z2^-c coefficient reduces to f_a E-_{a-c} vac.
    let s = space(1, Frame::Tensor, 10);
    let data = &s.heis.data;
    let b = beta1();
    let vac = s.vacuum();
    for q in [0i64, 1, 4, 5, 6] {
        let b2 = data.apply_nu(q, &b);
        for (r, t) in [(1i64, 1i64), (3, 1), (1, 3)] {
            let exps: Vec<Rational> =
                (0..12).map(|p| Rational::new(data.form(&data.apply_nu(p, &b), &b2).into(), (r * t).into())).collect();
            let f = twisted_product(12, &exps, 6);
            for c in 0..=6i64 {
                let lower = s.apply_e(&b2, Sign::Minus, t, 1, -c, &vac).unwrap();
                for a in 0..=(6 - c) {
                    let lhs = s.apply_e(&b, Sign::Plus, r, 1, a, &lower).unwrap();
                    let rhs = s.apply_e(&b2, Sign::Minus, t, 1, a - c, &vac).unwrap().scale(&f[a as usize]);
                    assert_eq!(lhs, rhs, "q={q} r={r} s={t} a={a} c={c}");
                }
            }
        }
    }
}

#[test]
fn heisenberg_commutators() {
    let s = space(3, Frame::Tensor, 24);
    let m = s.m() as i64;
    let comm = |i: i64, j: i64, v: &FockVector| {
        let ij = s.apply_heisenberg(i, &s.apply_heisenberg(j, v).unwrap()).unwrap();
        let ji = s.apply_heisenberg(j, &s.apply_heisenberg(i, v).unwrap()).unwrap();
        ij.sub(&ji)
    };
    for v in basis_vectors(&s, 4) {
        for i in [1i64, 5, 7, 11] {
            let c = s.heis.pairing_at(i).scale(&Rational::new((3 * i).into(), m.into()));
            assert_eq!(comm(i, -i, &v), v.scale(&c));
            assert!(comm(i, -(i + 4), &v).is_zero());
            assert!(comm(i, -(i + 6), &v).is_zero());
        }
    }
}

#[test]
fn positive_modes_kill_highest_weight_vectors_and_their_z_monomials() {
    let s = space(3, Frame::Tensor, 8);
    let b = beta1();
    for a in 1..=3usize {
        let u = highest_weight_vector(&s, "D4-3", a).unwrap();
        for lambda in (0..=3).flat_map(|n| enumerate(&ConstraintSet::preset(Preset::Kr(a as u8)), n)) {
            let v = z_monomial(&s, &b, &lambda, &u).unwrap();
            for j in 1..=8 {
                assert!(s.apply_heisenberg(j, &v).unwrap().is_zero(), "a={a} lambda={lambda:?} j={j}");
            }
        }
    }
}

#[test]
fn grading_shift_of_z_modes() {
    let s = space(3, Frame::Vacuum, 16);
    let b = beta1();
    for v in basis_vectors(&s, 5) {
        let d = s.degrees(&v)[0] as i64;
        for i in -4..=4 {
            let out = s.apply_z(&b, i, &v).unwrap();
            assert!(s.degrees(&out).iter().all(|&e| e as i64 == d - i));
        }
    }
}

#[test]
fn partial_relations_reject_multiples_of_three() {
    let data = TwistedCoxeterData::builtin("D4-3").unwrap();
    let k = RelationConstants::fitted(&data).unwrap();
    let eng = RelationEngine::d4(Frame::Vacuum, 12).unwrap();
    for r in [3u8, 4] {
        assert!(matches!(verify_relation(&eng, &k, r, 1, 2, 2), Err(FockError::Precondition { .. })));
        assert!(matches!(verify_relation(&eng, &k, r, -3, 0, 2), Err(FockError::Precondition { .. })));
    }
    assert!(matches!(verify_relation(&eng, &k, 5, 0, 0, 2), Err(FockError::UnknownRelation(5))));
}

#[test]
fn x_zero_mode_on_vacuum() {
    let b = beta1();
    for level in [1usize, 3] {
        let s = space(level, Frame::Tensor, 6);
        let vac = s.vacuum();
        assert_eq!(s.apply_x(&b, 0, &vac).unwrap(), vac.scale(&CyclotomicNumber::from_fraction(12, level as i64, 12)));
        for i in 1..=4 {
            assert!(s.apply_x(&b, i, &vac).unwrap().is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn z_modes_are_covariant_under_nu(p in 0i64..12, i in -3i64..=3) {
        let s = space(3, Frame::Vacuum, 12);
        let b = beta1();
        let bp = s.heis.data.apply_nu(p, &b);
        let w = CyclotomicNumber::omega_power(12, p * i);
        for v in basis_vectors(&s, 6) {
            prop_assert_eq!(s.apply_z(&bp, i, &v).unwrap(), s.apply_z(&b, i, &v).unwrap().scale(&w));
        }
    }

    #[test]
    fn rank_never_exceeds_count(a in 1usize..=3, n in 0u32..=6) {
        let module = standard_module("D4-3", a, n + 3).unwrap();
        let row = rank_of_family(&module, &ConstraintSet::preset(Preset::Kr(a as u8)), n).unwrap();
        prop_assert!(row.rank <= row.count);
    }
}
