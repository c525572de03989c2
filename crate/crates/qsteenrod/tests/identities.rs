//! Cross-module identities at small parameters: each test compares two independent
//! computations of the same quantity.

use qsteenrod::flat_sections::{annihilation_check, arithmetic_flat_section, sigma_d_specialized};
use qsteenrod::localization_engine::{
    integral_quotient_ring, local_p1_closed_form, local_p1_table, localization_bracket, multiple_cover_integral,
    s1_weight, structure_constant_s1, InsertionClass,
};
use qsteenrod::poly_series::reduce_endo_mod_p;
use qsteenrod::quantum_connection::{
    char0_recursion, char0_seed, covariant_constancy_defect, qsigma_degree, qsigma_series, to_stable_basis, Connection,
};
use qsteenrod::{BigRational, Monomial, PrimeModulus, Truncation};

fn pm(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

const CLASSES: [InsertionClass; 2] = [InsertionClass::One, InsertionClass::B];

#[test]
fn local_p1_matches_closed_form() {
    for p in [pm(3), pm(5)] {
        let q = 2 * p.get() as u32;
        assert_eq!(local_p1_table(p, q).unwrap(), local_p1_closed_form(p, q).unwrap());
    }
}

#[test]
fn residues_match_quotient_ring() {
    let p = pm(5);
    for d in 1..=6 {
        for b0 in CLASSES {
            for binf in CLASSES {
                let a = localization_bracket(p, d, b0, binf, 3).unwrap();
                let b = integral_quotient_ring(p, d, b0, binf, 3).unwrap();
                assert_eq!(a, b, "d={d} {b0:?} {binf:?}");
            }
        }
    }
}

#[test]
fn pairing_values_are_homogeneous() {
    let p = pm(5);
    for d in 1..=6 {
        for b0 in CLASSES {
            for binf in CLASSES {
                let s = structure_constant_s1(p, d, b0, binf, 4).unwrap();
                assert!(s.is_homogeneous(s1_weight(p, b0, binf)), "d={d}");
            }
        }
    }
}

#[test]
fn engine_series_is_flat_p5() {
    let p = pm(5);
    let w = Truncation::UNBOUNDED.with_q_max(10).with_h_max(4);
    let m = qsigma_series(p, w).unwrap();
    let conn = Connection::geometric(p, w).unwrap();
    assert!(covariant_constancy_defect(&m, &conn).unwrap().is_zero());
    // and in the stable basis
    let ms = to_stable_basis(&m).unwrap();
    let cs = Connection::stable(p, w).unwrap();
    assert!(covariant_constancy_defect(&ms, &cs).unwrap().is_zero());
}

#[test]
fn char0_reduction_matches_engine_in_low_degree() {
    for p in [pm(5), pm(7)] {
        let pi = p.get() as u32;
        let s = char0_recursion(&char0_seed::<BigRational>(()), pi - 1).unwrap();
        let reduced = reduce_endo_mod_p(&s, p)
            .unwrap()
            .try_map(|e| e.mul_monomial(&p.elem(1), Monomial::t(pi as i32 - 1)))
            .unwrap();
        let w = Truncation::UNBOUNDED.with_q_max(pi - 1).with_h_max(4);
        let engine = qsigma_series(p, w).unwrap();
        assert!(reduced.restrict(w).unwrap().sub(&engine).unwrap().is_zero(), "p={p}");
    }
}

#[test]
fn periodicity_after_specialization() {
    let p = pm(3);
    for d in 1..=3 {
        let a = qsigma_degree(p, d, 2 * d as i32 + 4).unwrap();
        let b = qsigma_degree(p, d + 3, 2 * (d + 3) as i32 + 4).unwrap();
        for mu in 0..3 {
            let mu = p.elem(mu);
            assert_eq!(a.substitute_h(&mu).unwrap(), b.substitute_h(&mu).unwrap(), "d={d}");
        }
    }
}

#[test]
fn specialized_engine_matches_binomial_matrices() {
    let p = pm(5);
    let pt = Monomial::t(5);
    for m in 1..5 {
        let mu = p.elem(m);
        for d in 1..=5 {
            let e = to_stable_basis(&qsigma_degree(p, d, 2 * d as i32 + 2).unwrap()).unwrap().substitute_h(&mu).unwrap();
            let s = sigma_d_specialized(p, mu, d).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(e.entry(i, j).coeff(pt), s.matrix[i][j], "μ={m} d={d} ({i},{j})");
                    assert_eq!(e.entry(i, j).len() as u64, (s.matrix[i][j].value() != 0) as u64);
                }
            }
        }
    }
}

#[test]
fn annihilation_and_linearity() {
    let p = pm(5);
    for m in 0..5 {
        assert!(annihilation_check(p, m).unwrap().holds);
        let s = arithmetic_flat_section(p, m).unwrap();
        let f = qsteenrod::flat_sections::QPoly::from_ints(p, &[2, 0, 0, 0, 0, 3]);
        let v = [s.entries[0].mul(&f), s.entries[1].mul(&f)];
        assert!(qsteenrod::flat_sections::annihilation_defect(p, s.mu, &v).unwrap().holds);
    }
}

#[test]
fn multiple_cover_count() {
    let p = pm(7);
    for d in 1..=4 {
        let v = multiple_cover_integral(p, d).unwrap();
        assert_eq!(v.coeff(Monomial::ONE), p.elem(1));
        assert_eq!(v.len(), 1);
    }
}
