//! The numbered acceptance criteria, each a sweep of one check over a set of primes.

use qsteenrod::{Basis, PrimeModulus, Result};
use rand_chacha::ChaCha8Rng;

use crate::checks;
use crate::report::{Outcome, Status};

pub struct Criterion {
    pub number: u8,
    pub check_id: &'static str,
    pub anchor: &'static str,
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { number: 1, check_id: "local-p1-closed-form", anchor: "local P¹ structure constants equal the closed-form matrix" },
    Criterion { number: 2, check_id: "char0-recursion", anchor: "characteristic-0 flat endomorphism reproduces the reference orders 1-3" },
    Criterion { number: 3, check_id: "covariant-constancy", anchor: "equivariant operation commutes with the quantum connection" },
    Criterion { number: 4, check_id: "dual-path", anchor: "fixed-point residues equal quotient-ring integration" },
    Criterion { number: 5, check_id: "periodicity", anchor: "specialized coefficients depend only on d mod p" },
    Criterion { number: 6, check_id: "low-order-closed-forms", anchor: "h¹ and h² slices equal the reduced localization formulas" },
    Criterion { number: 7, check_id: "annihilation", anchor: "specialized operation annihilates the arithmetic flat section" },
    Criterion { number: 8, check_id: "flat-section", anchor: "arithmetic flat section solves the stable-basis equation" },
    Criterion { number: 9, check_id: "rank-2-module", anchor: "flat endomorphisms form a free rank-2 module over F_p[[q^p]]" },
    Criterion { number: 10, check_id: "multiple-cover", anchor: "three-point multiple-cover integral equals one" },
    Criterion { number: 11, check_id: "properties", anchor: "grading, binomial and ring-axiom properties" },
];

/// Primes each criterion sweeps in the acceptance run.
pub fn acceptance_primes(number: u8) -> Vec<PrimeModulus> {
    let ps: &[u64] = match number {
        3 | 6 => &[3, 5],
        2 => &[],
        _ => &[3, 5, 7],
    };
    ps.iter().map(|&p| PrimeModulus::new(p).expect("odd prime")).collect()
}

/// Merge per-prime outcomes: any failure fails, then any inconclusive, else pass.
pub fn merge(parts: Vec<(Option<PrimeModulus>, Outcome)>) -> Outcome {
    let status = if parts.iter().any(|(_, o)| o.status == Status::Fail) {
        Status::Fail
    } else if parts.iter().any(|(_, o)| o.status == Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    let detail = parts
        .iter()
        .map(|(p, o)| match p {
            Some(p) => format!("p={p}: {}", o.detail),
            None => o.detail.clone(),
        })
        .collect::<Vec<_>>()
        .join("; ");
    let defects: Vec<_> = parts.iter().filter_map(|(_, o)| o.defect.clone()).collect();
    Outcome { status, defect: (!defects.is_empty()).then(|| serde_json::Value::Array(defects)), detail }
}

/// Run criterion `number` over `primes`.
pub fn run(number: u8, primes: &[PrimeModulus], rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut parts = Vec::new();
    if number == 2 {
        return checks::char0_reference_check();
    }
    for &p in primes {
        let pi = p.get() as u32;
        let o = match number {
            1 => checks::local_p1(p, 3 * pi)?,
            3 => checks::flatness(p, 3 * pi, 4, Basis::Geometric)?,
            4 => checks::dual_path(p, 2 * pi, 4)?,
            5 => checks::periodicity(p, pi, &(0..pi as i64).collect::<Vec<_>>())?,
            6 => checks::closed_forms(p, 2 * pi)?,
            7 => checks::annihilation(p, 2 * pi)?,
            8 => checks::flat_section_correctness(p)?,
            9 => checks::rank2(p, 2 * pi, 3, 10, rng)?,
            10 => checks::multiple_cover(p, 5)?,
            11 => checks::properties(p, 2 * pi, 100, rng)?,
            _ => return Err(qsteenrod::Error::Domain(format!("no criterion {number}"))),
        };
        parts.push((Some(p), o));
    }
    Ok(merge(parts))
}
