//! Verification checks. Each returns an [`Outcome`] after computing both sides of an identity.

use qsteenrod::exact_arith::{binom_field, binom_lucas};
use qsteenrod::flat_sections::{
    annihilation_check, arithmetic_flat_section, gauge_qde_check, reduced_dde_check, stable_qde_defect,
    stable_qde_series_defect, QPoly,
};
use qsteenrod::localization_engine::{
    h_expansion_closed_form, h_expansion_single_component, integral_quotient_ring, local_p1_closed_form, local_p1_table,
    localization_bracket, multiple_cover_integral, s1_weight, structure_constant_s1, InsertionClass,
};
use qsteenrod::quantum_connection::{
    char0_recursion, char0_reference, char0_seed, covariant_constancy_defect, modp_flat_solver, qsigma_degree,
    qsigma_series, rank2_decompose, to_stable_basis, traceless_part, Connection,
};
use qsteenrod::{BigRational, Basis, Endo2, Error, ModPEndo, ModPSeries, Monomial, PrimeModulus, Result, Truncation};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::Outcome;

pub const CLASSES: [InsertionClass; 2] = [InsertionClass::One, InsertionClass::B];

fn pair_label(b0: InsertionClass, binf: InsertionClass) -> String {
    format!("({},{})", b0.as_str(), binf.as_str())
}

/// Local P¹ engine table against the closed-form matrix, `d = 1..=q_max`.
pub fn local_p1(p: PrimeModulus, q_max: u32) -> Result<Outcome> {
    let engine = local_p1_table(p, q_max)?;
    let closed = local_p1_closed_form(p, q_max)?;
    let mut bad = Vec::new();
    for d in 1..=q_max {
        for i in 0..2 {
            for j in 0..2 {
                let (a, b) = (engine[i][j].coeff_q(d), closed[i][j].coeff_q(d));
                if a != b {
                    bad.push(json!({"p": p.get(), "d": d, "entry": [i, j], "engine": a.render(), "closed_form": b.render()}));
                }
            }
        }
    }
    Ok(Outcome::from_mismatches("local P¹ entries", 4 * q_max as usize, bad))
}

/// Characteristic-0 recursion against the reference orders 1..=3.
pub fn char0_reference_check() -> Result<Outcome> {
    let s = char0_recursion(&char0_seed::<BigRational>(()), 3)?;
    let mut bad = Vec::new();
    for k in 1..=3u32 {
        let got = s.coeff_q(k)?;
        let want = char0_reference(k as usize)?;
        if got != want {
            bad.push(json!({"order": k, "computed": got.to_json(), "reference": want.to_json()}));
        }
    }
    Ok(Outcome::from_mismatches("characteristic-0 orders", 3, bad))
}

/// Covariant-constancy defect of the engine series through `q^{q_max}`, `h^{h_max}`.
pub fn flatness(p: PrimeModulus, q_max: u32, h_max: i32, basis: Basis) -> Result<Outcome> {
    if q_max < 2 {
        return Err(Error::TruncationTooShallow(format!("q_max = {q_max} < 2")));
    }
    let w = Truncation::UNBOUNDED.with_q_max(q_max).with_h_max(h_max);
    let m = qsigma_series(p, w)?;
    let (m, conn) = match basis {
        Basis::Geometric => (m, Connection::geometric(p, w)?),
        Basis::Stable => (to_stable_basis(&m)?, Connection::stable(p, w)?),
    };
    let defect = covariant_constancy_defect(&m, &conn)?;
    Ok(if defect.is_zero() {
        Outcome::pass(format!("defect vanishes through q^{q_max}, h^{}", defect.window().h_max))
    } else {
        Outcome::fail(format!("nonzero defect"), Some(defect.to_json()))
    })
}

/// Residue extraction against quotient-ring integration for `d ≤ d_max`.
pub fn dual_path(p: PrimeModulus, d_max: u32, h_max: i32) -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut n = 0;
    for d in 1..=d_max {
        for b0 in CLASSES {
            for binf in CLASSES {
                n += 1;
                let a = localization_bracket(p, d, b0, binf, h_max)?;
                let b = integral_quotient_ring(p, d, b0, binf, h_max)?;
                if !a.eq_within(&b)? {
                    bad.push(json!({"p": p.get(), "d": d, "pair": pair_label(b0, binf), "residue": a.render(), "quotient_ring": b.render()}));
                }
            }
        }
    }
    Ok(Outcome::from_mismatches("residue/quotient-ring pairs", n, bad))
}

/// `M_d|_{h=μt} = M_{d+p}|_{h=μt}` for every `μ ∈ F_p`, `1 ≤ d ≤ d_max`.
pub fn periodicity(p: PrimeModulus, d_max: u32, mus: &[i64]) -> Result<Outcome> {
    let pi = p.get() as u32;
    let mut bad = Vec::new();
    let mut n = 0;
    for d in 1..=d_max {
        let exact = |dd: u32| qsigma_degree(p, dd, 2 * dd as i32 + 1);
        let (a, b) = (exact(d)?, exact(d + pi)?);
        for &mu in mus {
            n += 1;
            let mu = p.elem(mu);
            let (sa, sb) = (a.substitute_h(&mu)?, b.substitute_h(&mu)?);
            if sa != sb {
                bad.push(json!({"p": p.get(), "d": d, "mu": mu.value(), "q^d": sa.to_json(), "q^(d+p)": sb.to_json()}));
            }
        }
    }
    Ok(Outcome::from_mismatches("(d, μ) pairs", n, bad))
}

/// `h¹`, `h²` slices of the engine against the closed forms; also counts how many slices the
/// single-component reduction gets wrong.
pub fn closed_forms(p: PrimeModulus, d_max: u32) -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut single_wrong = 0;
    let mut n = 0;
    let mut divisible = 0;
    for d in 1..=d_max {
        for b0 in CLASSES {
            for binf in CLASSES {
                let s = structure_constant_s1(p, d, b0, binf, 3)?;
                for order in 1..=2u32 {
                    n += 1;
                    if d as u64 % p.get() == 0 {
                        divisible += 1;
                    }
                    let engine = s.coeff_h(order as i32).with_window(Truncation::UNBOUNDED.with_x_max(0))?;
                    let closed = h_expansion_closed_form(p, d, b0, binf, order)?;
                    if engine != closed {
                        bad.push(json!({"p": p.get(), "d": d, "pair": pair_label(b0, binf), "order": order, "engine": engine.render(), "closed_form": closed.render()}));
                    }
                    if h_expansion_single_component(p, d, b0, binf, order)? != engine {
                        single_wrong += 1;
                    }
                }
            }
        }
    }
    let mut out = Outcome::from_mismatches(&format!("slices ({divisible} with p | d)"), n, bad);
    out.detail += &format!("; single-component reduction disagrees on {single_wrong}/{n}");
    Ok(out)
}

/// Finite annihilation identity for every `m ∈ [0, p)`, plus the direct series product
/// `Σ(q) I_μ` with the engine's specialized stable-basis coefficients through `q^{q_max}`.
pub fn annihilation(p: PrimeModulus, series_q_max: u32) -> Result<Outcome> {
    let pi = p.get() as u32;
    let mut bad = Vec::new();
    let stable: Vec<ModPEndo> = (1..=series_q_max)
        .map(|d| to_stable_basis(&qsigma_degree(p, d, 2 * d as i32 + 1)?))
        .collect::<Result<_>>()?;
    for m in 0..pi {
        let r = annihilation_check(p, m)?;
        if !r.holds {
            bad.push(json!({"p": p.get(), "m": m, "path": "finite identity", "defect": [r.defect[0].coeffs().iter().map(|c| c.value()).collect::<Vec<_>>(), r.defect[1].coeffs().iter().map(|c| c.value()).collect::<Vec<_>>()]}));
        }
        if m == 0 {
            continue; // the stable-basis specialization needs h = μt invertible
        }
        let section = arithmetic_flat_section(p, m)?;
        let mu = section.mu;
        let pt = Monomial::t(pi as i32);
        let mut out = [QPoly::zero(p), QPoly::zero(p)];
        let classical = [[p.elem(0), p.elem(0)], [mu, p.elem(0)]];
        let mut mats = vec![classical];
        for s in &stable {
            let sp = s.substitute_h(&mu)?;
            mats.push([[sp.entry(0, 0).coeff(pt), sp.entry(0, 1).coeff(pt)], [sp.entry(1, 0).coeff(pt), sp.entry(1, 1).coeff(pt)]]);
        }
        for (d, mat) in mats.iter().enumerate() {
            for i in 0..2 {
                let v = section.entries[0].scale(mat[i][0]).add(&section.entries[1].scale(mat[i][1]));
                out[i] = out[i].add(&v.shift(d));
            }
        }
        let low: Vec<u64> = out.iter().flat_map(|e| e.coeffs().iter().take(series_q_max as usize + 1).map(|c| c.value())).collect();
        if low.iter().any(|&c| c != 0) {
            bad.push(json!({"p": p.get(), "m": m, "path": "engine series", "low_order_product": low}));
        }
    }
    Ok(Outcome::from_mismatches("sections (finite identity and engine series for m ≠ 0)", pi as usize, bad))
}

/// Stable-basis flatness of `I_μ`, the two-variable system on the master-function
/// coefficients, and rejection of a corrupted gauge exponent.
pub fn flat_section_correctness(p: PrimeModulus) -> Result<Outcome> {
    let pi = p.get() as u32;
    let mut bad = Vec::new();
    for m in 0..pi {
        let s = arithmetic_flat_section(p, m)?;
        if !stable_qde_defect(s.mu, &s.entries).iter().all(QPoly::is_zero) {
            bad.push(json!({"p": p.get(), "m": m, "check": "stable equation (polynomial)"}));
        }
        if !stable_qde_series_defect(&s, 3 * pi)?.is_zero() {
            bad.push(json!({"p": p.get(), "m": m, "check": "stable equation (series)"}));
        }
        if !reduced_dde_check(p, m)? {
            bad.push(json!({"p": p.get(), "m": m, "check": "two-variable system"}));
        }
        if !gauge_qde_check(p, m, 2 * m)? {
            bad.push(json!({"p": p.get(), "m": m, "check": "gauge exponent 2m"}));
        }
        if gauge_qde_check(p, m, 2 * m + 1)? {
            bad.push(json!({"p": p.get(), "m": m, "check": "corrupted gauge exponent accepted"}));
        }
    }
    Ok(Outcome::from_mismatches("sections", pi as usize, bad))
}

/// Random element of F_p[q^p] through `q^{q_max}`.
pub fn random_q_p_series(p: PrimeModulus, q_max: u32, rng: &mut ChaCha8Rng) -> Result<ModPSeries> {
    let pi = p.get() as u32;
    let terms: Vec<_> = (0..=q_max / pi).map(|k| (Monomial::q(k * pi), p.elem(rng.gen_range(0..pi as i64)))).collect();
    ModPSeries::from_terms(terms, p, Truncation::UNBOUNDED.with_q_max(q_max))
}

/// Solver against `f(q^p)·(normalized QΣ)` and decomposition round trips for `n` random draws.
pub fn rank2(p: PrimeModulus, q_max: u32, h_max: i32, n: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let w = Truncation::UNBOUNDED.with_q_max(q_max).with_h_max(h_max).with_x_max(0);
    let q = qsigma_series(p, w)?;
    let normalized = traceless_part(&q)?;
    let base = ModPSeries::monomial(p.elem(-1), Monomial::t(p.get() as i32 - 1), Truncation::UNBOUNDED.with_h_max(h_max))?;
    let id = Endo2::identity(p, q.window(), Basis::Geometric);
    let mut bad = Vec::new();
    for trial in 0..n {
        let f = random_q_p_series(p, q_max, rng)?;
        let solved = modp_flat_solver(&base.mul(&f)?, q_max)?;
        if !solved.sub(&normalized.scale_series(&f)?)?.is_zero() {
            bad.push(json!({"p": p.get(), "trial": trial, "check": "solver", "f": f.to_json()}));
        }
        let (f1, f2) = (random_q_p_series(p, q_max, rng)?, random_q_p_series(p, q_max, rng)?);
        let sigma = id.scale_series(&f1)?.add(&q.scale_series(&f2)?)?;
        let (g1, g2) = rank2_decompose(&sigma, &q)?;
        if !g1.sub(&f1)?.is_zero() || !g2.sub(&f2)?.is_zero() {
            bad.push(json!({"p": p.get(), "trial": trial, "check": "decomposition", "f1": f1.to_json(), "f2": f2.to_json()}));
        }
    }
    Ok(Outcome::from_mismatches("random trials", n, bad))
}

/// `∫ c_top(Obs)·H³ = 1` for `d = 1..=d_max`.
pub fn multiple_cover(p: PrimeModulus, d_max: u32) -> Result<Outcome> {
    let one = ModPSeries::one(p, Truncation::UNBOUNDED);
    let mut bad = Vec::new();
    for d in 1..=d_max {
        let v = multiple_cover_integral(p, d)?;
        if v.with_window(Truncation::UNBOUNDED)? != one {
            bad.push(json!({"d": d, "value": v.render()}));
        }
    }
    Ok(Outcome::from_mismatches("degrees", d_max as usize, bad))
}

fn random_series(p: PrimeModulus, rng: &mut ChaCha8Rng, w: Truncation) -> Result<ModPSeries> {
    let n = rng.gen_range(0..8);
    let terms: Vec<_> = (0..n)
        .map(|_| {
            let m = Monomial::new(rng.gen_range(0..=w.q_max.min(6)), rng.gen_range(-3..4), rng.gen_range(0..=w.h_max.min(4)), 0);
            (m, p.elem(rng.gen_range(0..p.get() as i64)))
        })
        .collect();
    ModPSeries::from_terms(terms, p, w)
}

/// Grading homogeneity of emitted series, binomial agreement, and random ring axioms.
pub fn properties(p: PrimeModulus, d_max: u32, cases: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut homog = 0;
    for d in 1..=d_max {
        for b0 in CLASSES {
            for binf in CLASSES {
                homog += 1;
                let s = structure_constant_s1(p, d, b0, binf, 4)?;
                if !s.is_homogeneous(s1_weight(p, b0, binf)) {
                    bad.push(json!({"property": "homogeneity", "d": d, "pair": pair_label(b0, binf)}));
                }
            }
        }
    }
    let pi = p.get() as i64;
    let table = local_p1_table(p, d_max)?;
    for (i, row) in table.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            homog += 1;
            let weight = [[pi - 2, pi - 1], [pi - 3, pi - 2]][i][j];
            if !e.is_homogeneous(weight) {
                bad.push(json!({"property": "homogeneity", "local_p1_entry": [i, j]}));
            }
        }
    }
    let mut binoms = 0;
    for n in 0..(p.get() * p.get()) {
        for k in 0..p.get() {
            binoms += 1;
            if binom_field(p.elem(n as i64), k)? != binom_lucas(n, k, p) {
                bad.push(json!({"property": "binomial", "n": n, "k": k}));
            }
        }
    }
    let w = Truncation::UNBOUNDED.with_q_max(6).with_h_max(4).with_x_max(0);
    for case in 0..cases {
        let (a, b, c) = (random_series(p, rng, w)?, random_series(p, rng, w)?, random_series(p, rng, w)?);
        let ok = a.add(&b)?.add(&c)? == a.add(&b.add(&c)?)?
            && a.mul(&b)? == b.mul(&a)?
            && a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?
            && a.mul(&b.add(&c)?)? == a.mul(&b)?.add(&a.mul(&c)?)?
            && a.add(&a.neg())?.is_zero();
        if !ok {
            bad.push(json!({"property": "ring axioms", "case": case, "a": a.to_json(), "b": b.to_json(), "c": c.to_json()}));
        }
    }
    let mut out = Outcome::from_mismatches("property instances", homog + binoms + cases, bad);
    out.detail += &format!(" ({homog} homogeneity, {binoms} binomial, {cases} ring-axiom)");
    Ok(out)
}

/// Pairing values `(QΣ(b0), b∞)` for `1 ≤ d ≤ q_max` as JSON, keyed by insertion pair.
pub fn pairing_values_json(p: PrimeModulus, q_max: u32, h_max: i32, pairs: &[(InsertionClass, InsertionClass)]) -> Result<Value> {
    let mut out = serde_json::Map::new();
    for &(b0, binf) in pairs {
        let mut acc = ModPSeries::zero(p, Truncation::UNBOUNDED.with_q_max(q_max).with_h_max(h_max).with_x_max(0));
        for d in 1..=q_max {
            acc = acc.add(&structure_constant_s1(p, d, b0, binf, h_max)?.shift_q(d)?)?;
        }
        out.insert(pair_label(b0, binf), acc.to_json());
    }
    Ok(Value::Object(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use rand::SeedableRng;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn small_instances_pass() {
        let p = pm(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(local_p1(p, 6).unwrap().status, Status::Pass);
        assert_eq!(char0_reference_check().unwrap().status, Status::Pass);
        assert_eq!(flatness(p, 6, 3, Basis::Geometric).unwrap().status, Status::Pass);
        assert_eq!(flatness(p, 6, 3, Basis::Stable).unwrap().status, Status::Pass);
        assert_eq!(dual_path(p, 3, 2).unwrap().status, Status::Pass);
        assert_eq!(periodicity(p, 2, &[0, 1, 2]).unwrap().status, Status::Pass);
        assert_eq!(closed_forms(p, 6).unwrap().status, Status::Pass);
        assert_eq!(annihilation(p, 6).unwrap().status, Status::Pass);
        assert_eq!(flat_section_correctness(p).unwrap().status, Status::Pass);
        assert_eq!(rank2(p, 6, 2, 2, &mut rng).unwrap().status, Status::Pass);
        assert_eq!(multiple_cover(p, 2).unwrap().status, Status::Pass);
        assert_eq!(properties(p, 3, 10, &mut rng).unwrap().status, Status::Pass);
    }

    #[test]
    fn flatness_needs_two_q_orders() {
        assert!(matches!(flatness(pm(3), 1, 2, Basis::Geometric), Err(Error::TruncationTooShallow(_))));
    }
}
