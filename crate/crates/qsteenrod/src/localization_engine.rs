//! Structure constants of the (S¹-equivariant) quantum Steenrod operation of the
//! fiber class `b` for the local P¹ threefold and for T*P¹.
//!
//! Degree-`d` sections land in `P^{2d+1}`; the `Z/p`-fixed locus splits into
//! components indexed by `ℓ ∈ [0, p)`, and each contributes an `x`-coefficient of
//! a factored rational function. An independent path integrates the same class
//! in the quotient ring `F_p[t, h][H] / ∏_{k=0}^{d} (H - kt)²`.
//!
//! Variables: `x` is the hyperplane variable on a fixed component; the
//! quotient-ring path carries `H` in the same `x` slot.

use crate::error::{Error, Result};
use crate::exact_arith::{FieldElement, PrimeModulus};
use crate::poly_series::{AdicVar, Basis, Endo2, FactoredRationalFn, GradedSeries, Monomial, Truncation};
use crate::{ModPEndo, ModPSeries};

/// Insertion class: the unit `1 ∈ H⁰` or the fiber class `b ∈ H²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InsertionClass {
    One,
    B,
}

impl InsertionClass {
    pub const ALL: [InsertionClass; 2] = [InsertionClass::One, InsertionClass::B];

    /// Real cohomological degree.
    pub fn degree(self) -> i64 {
        match self {
            InsertionClass::One => 0,
            InsertionClass::B => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InsertionClass::One => "1",
            InsertionClass::B => "b",
        }
    }
}

/// `d = αp + β` with `0 ≤ β < p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeSplit {
    pub d: u32,
    pub alpha: u32,
    pub beta: u32,
}

impl DegreeSplit {
    pub fn new(d: u32, p: PrimeModulus) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("curve degree must be positive".into()));
        }
        let pp = p.get() as u32;
        Ok(Self { d, alpha: d / pp, beta: d % pp })
    }
}

/// Fixed component `ℓ` and its complex dimension `2⌊(d-ℓ)/p⌋ + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedComponent {
    pub ell: u32,
    pub dim_complex: u32,
}

/// One fixed-component summand: take `x^extract` of `integrand`.
#[derive(Debug, Clone)]
pub struct LocalizationTerm {
    pub component: FixedComponent,
    pub integrand: FactoredRationalFn<FieldElement>,
    pub extract: u32,
}

fn lin(p: PrimeModulus, cx: i64, ct: i64, ch: i64, w: Truncation) -> Result<ModPSeries> {
    GradedSeries::from_terms(
        [(Monomial::x(1), p.elem(cx)), (Monomial::t(1), p.elem(ct)), (Monomial::h(1), p.elem(ch))],
        p,
        w,
    )
}

/// `c_{0,∞}(H, t)` with `H` in the `x` slot shifted by `shift·t`:
/// `1`, `H - dt`, `H`, `H(H - dt)` for `(b0, b∞) = (1,1), (b,1), (1,b), (b,b)`.
fn incidence_shifted(
    p: PrimeModulus,
    b0: InsertionClass,
    binf: InsertionClass,
    d: u32,
    shift: i64,
    w: Truncation,
) -> Result<ModPSeries> {
    let mut f = GradedSeries::one(p, w);
    if binf == InsertionClass::B {
        f = f.mul(&lin(p, 1, shift, 0, w)?)?;
    }
    if b0 == InsertionClass::B {
        f = f.mul(&lin(p, 1, shift - d as i64, 0, w)?)?;
    }
    Ok(f)
}

/// Euler class of the incidence constraint at `0` and `∞`, as a polynomial in `H` (the `x` slot).
pub fn incidence_factor(p: PrimeModulus, b0: InsertionClass, binf: InsertionClass, d: u32) -> Result<ModPSeries> {
    incidence_shifted(p, b0, binf, d, 0, Truncation::UNBOUNDED)
}

/// Obstruction Euler class `∏_{k=1}^{d-1} (H - kt - [h])²`.
pub fn obs_euler(p: PrimeModulus, d: u32, with_h: bool, w: Truncation) -> Result<ModPSeries> {
    let mut f = GradedSeries::one(p, w);
    for k in 1..d as i64 {
        let l = lin(p, 1, -k, if with_h { -1 } else { 0 }, w)?;
        f = f.mul(&l)?.mul(&l)?;
    }
    Ok(f)
}

/// `C_{d,ℓ} = (x^{p-1} - t^{p-1})^{1-2α} · c_{0,∞}(x + ℓt, t) · ∏_{k=1}^{d-1} (x + (ℓ-k)t - h)²`,
/// truncated at `x^{x_max}` and `h^{h_max}`.
pub fn c_dl(
    p: PrimeModulus,
    split: DegreeSplit,
    ell: u32,
    b0: InsertionClass,
    binf: InsertionClass,
    h_max: i32,
    x_max: u32,
) -> Result<ModPSeries> {
    let w = Truncation::UNBOUNDED.with_h_max(h_max).with_x_max(x_max);
    let pm1 = p.get() as i32 - 1;
    let base = GradedSeries::from_terms(
        [(Monomial::x(pm1 as u32), p.elem(1)), (Monomial::t(pm1), p.elem(-1))],
        p,
        w,
    )?;
    let mut f = if split.alpha == 0 { base } else { base.inv_unit(AdicVar::X)?.pow(2 * split.alpha - 1)? };
    f = f.mul(&incidence_shifted(p, b0, binf, split.d, ell as i64, w)?)?;
    for k in 1..split.d as i64 {
        let l = lin(p, 1, ell as i64 - k, -1, w)?;
        f = f.mul(&l)?.mul(&l)?;
    }
    Ok(f)
}

/// The fixed-component summands for degree `d`.
pub fn localization_terms(
    p: PrimeModulus,
    split: DegreeSplit,
    b0: InsertionClass,
    binf: InsertionClass,
    h_max: i32,
) -> Result<Vec<LocalizationTerm>> {
    let deg_c = (b0.degree() + binf.degree()) as u32 / 2;
    let x_max = 2 * split.alpha + deg_c + 2;
    let mut out = Vec::new();
    for ell in 0..p.get() as u32 {
        let (extract, dim) = if ell <= split.beta {
            (2 * split.alpha, 2 * split.alpha + 1)
        } else if split.alpha >= 1 {
            (2 * split.alpha - 2, 2 * split.alpha - 1)
        } else {
            // component would have negative dimension
            continue;
        };
        let mut f = FactoredRationalFn::new(c_dl(p, split, ell, b0, binf, h_max, x_max)?);
        if ell <= split.beta {
            for j in 1..=ell as i64 {
                f = f.divide_by(p.elem(j), 2);
            }
            for j in 1..=(split.beta - ell) as i64 {
                f = f.divide_by(p.elem(-j), 2);
            }
        } else {
            for j in 0..=split.beta as i64 {
                f = f.divide_by(p.elem(ell as i64 - j), 2);
            }
        }
        out.push(LocalizationTerm { component: FixedComponent { ell, dim_complex: dim }, integrand: f, extract });
    }
    Ok(out)
}

/// Sum of fixed-component contributions (the bracket multiplying `h q^d`), to `h^{h_max}`.
pub fn localization_bracket(
    p: PrimeModulus,
    d: u32,
    b0: InsertionClass,
    binf: InsertionClass,
    h_max: i32,
) -> Result<ModPSeries> {
    let split = DegreeSplit::new(d, p)?;
    let w = output_window(d, h_max);
    let mut acc = GradedSeries::zero(p, w);
    for term in localization_terms(p, split, b0, binf, h_max)? {
        acc = acc.add(&term.integrand.coeff_x(term.extract)?.with_window(w)?)?;
    }
    Ok(acc)
}

/// The bracket is a polynomial of `h`-degree `≤ 2(d-1)`; past that the window is exact.
fn output_window(d: u32, h_max: i32) -> Truncation {
    let exact = h_max >= 2 * (d as i32 - 1);
    Truncation::UNBOUNDED.with_x_max(0).with_h_max(if exact { i32::MAX } else { h_max })
}

/// Coefficient of `q^d` in `(QΣ^{S¹}(b0), b∞)_{S¹}` beyond the classical term: `h · bracket`,
/// known through `h^{h_max}` (exact in `h` once `h_max ≥ 2d - 1`).
pub fn structure_constant_s1(
    p: PrimeModulus,
    d: u32,
    b0: InsertionClass,
    binf: InsertionClass,
    h_max: i32,
) -> Result<ModPSeries> {
    if h_max < 1 {
        return Ok(GradedSeries::zero(p, Truncation::UNBOUNDED.with_x_max(0).with_h_max(h_max.max(0))));
    }
    let br = localization_bracket(p, d, b0, binf, h_max - 1)?;
    br.mul_monomial(&p.elem(1), Monomial::h(1))
}

/// Non-equivariant structure constant: the `h → 0` slice of the bracket.
pub fn structure_constant_noneq(p: PrimeModulus, d: u32, b0: InsertionClass, binf: InsertionClass) -> Result<ModPSeries> {
    Ok(localization_bracket(p, d, b0, binf, 0)?.coeff_h(0))
}

/// Expected `(t, h)`-weight of [`structure_constant_s1`].
pub fn s1_weight(p: PrimeModulus, b0: InsertionClass, binf: InsertionClass) -> i64 {
    p.get() as i64 + (b0.degree() + binf.degree()) / 2 - 2
}

/// Coefficient of `H^{2d+1}` in the remainder of `f` modulo `∏_{k=0}^{d} (H - kt)²`.
pub fn quotient_ring_top_coefficient(p: PrimeModulus, f: &ModPSeries, d: u32) -> Result<ModPSeries> {
    let w = Truncation::UNBOUNDED.with_h_max(f.window().h_max);
    let mut rel = GradedSeries::one(p, w);
    for k in 0..=d as i64 {
        let l = lin(p, 1, -k, 0, w)?;
        rel = rel.mul(&l)?.mul(&l)?;
    }
    let n = 2 * d + 2;
    let mut rem = f.with_window(w)?;
    loop {
        let top = rem.terms().map(|(m, _)| m.x).max().unwrap_or(0);
        if top < n {
            break;
        }
        // subtract lead · x^{top-n} · rel, where lead is the x^top coefficient
        let lead = rem.coeff_x_plain(top).mul_monomial(&p.elem(1), Monomial::x(top - n))?;
        rem = rem.sub(&lead.mul(&rel)?)?;
    }
    Ok(rem.coeff_x_plain(2 * d + 1).with_window(Truncation::UNBOUNDED.with_x_max(0).with_h_max(w.h_max))?)
}

/// Independent oracle for the bracket: integrate
/// `∏_{k=1}^{d-1} (H - kt - h)² · ∏_{k=0}^{p-1} (H - kt) · c_{0,∞}(H, t)` over `P^{2d+1}`.
pub fn integral_quotient_ring(
    p: PrimeModulus,
    d: u32,
    b0: InsertionClass,
    binf: InsertionClass,
    h_max: i32,
) -> Result<ModPSeries> {
    let w = Truncation::UNBOUNDED.with_h_max(h_max);
    let mut f = obs_euler(p, d, true, w)?;
    for k in 0..p.get() as i64 {
        f = f.mul(&lin(p, 1, -k, 0, w)?)?;
    }
    f = f.mul(&incidence_shifted(p, b0, binf, d, 0, w)?)?;
    let r = quotient_ring_top_coefficient(p, &f, d)?;
    r.with_window(output_window(d, h_max))
}

/// `∫_{P^{2d+1}} c_top(Obs) · H³` in the quotient ring; the three-point multiple-cover count.
pub fn multiple_cover_integral(p: PrimeModulus, d: u32) -> Result<ModPSeries> {
    let w = Truncation::UNBOUNDED;
    let f = obs_euler(p, d, false, w)?.mul_monomial(&p.elem(1), Monomial::x(3))?;
    quotient_ring_top_coefficient(p, &f, d)
}

/// Closed forms for the `h¹` and `h²` coefficients of [`structure_constant_s1`] (`order = 0`
/// returns the vanishing `h⁰` part for `d ≥ 1`).
///
/// Only the components `ℓ = β` and `ℓ = 0` survive at these orders. Writing
/// `c(X) = c_{0,∞}(X, t)`:
/// - `h¹`, `p ∤ d`: `-t^{p-3}/β² · (c(βt) + c(0))`;
///   `p | d`: `(x²: (x^{p-1} - t^{p-1}) c(x))`.
/// - `h²`, `p ∤ d`: `Σ_{m≢β} 2t^{p-4} c(βt)/((β-m)β²) + 2α t^{p-4} (x¹: (t/β² - 2x/β³) c(x+βt))
///   - Σ_{m≢0} 2t^{p-4} c(0)/(mβ²) + 2α t^{p-4} (x¹: (t/β² + 2x/β³) c(x))`;
///   `p | d`: `Σ_{m≢0} (x²: -2 (x^{p-1} - t^{p-1})/(x - mt) · c(x)) - 2(α-1) (x³: (x^{p-1} - t^{p-1}) c(x))`,
///
/// with `m` ranging over `1..d-1`. The widely quoted `ℓ = β`-only reduction is
/// [`h_expansion_single_component`]; it differs whenever `c(0) ≠ 0`, `α ≥ 1`, or `p = 3`.
pub fn h_expansion_closed_form(
    p: PrimeModulus,
    d: u32,
    b0: InsertionClass,
    binf: InsertionClass,
    order: u32,
) -> Result<ModPSeries> {
    closed_form(p, d, b0, binf, order, false)
}

/// The `ℓ = β`-only reduction of the bracket at orders `h¹`, `h²`, kept for comparison with
/// [`h_expansion_closed_form`]; it drops the `ℓ = 0` component, carries the opposite sign on the
/// `α`-term, counts `α` rather than `α - 1` poles at `x = 0` when `p | d`, and drops
/// `x^{p-1}` in the `p | d`, `h¹` case.
pub fn h_expansion_single_component(
    p: PrimeModulus,
    d: u32,
    b0: InsertionClass,
    binf: InsertionClass,
    order: u32,
) -> Result<ModPSeries> {
    closed_form(p, d, b0, binf, order, true)
}

fn closed_form(
    p: PrimeModulus,
    d: u32,
    b0: InsertionClass,
    binf: InsertionClass,
    order: u32,
    single: bool,
) -> Result<ModPSeries> {
    let split = DegreeSplit::new(d, p)?;
    let (alpha, beta) = (split.alpha as i64, split.beta as i64);
    let pi = p.get() as i32;
    let zero = GradedSeries::zero(p, Truncation::UNBOUNDED.with_x_max(0));
    let wx = Truncation::UNBOUNDED.with_x_max(4);
    // c(x + s·t) as a polynomial in x
    let c_at = |s: i64| incidence_shifted(p, b0, binf, d, s, wx);
    let coef = |f: &ModPSeries, k: u32| f.coeff_x_plain(k);
    let xp = GradedSeries::from_terms(
        [(Monomial::x(pi as u32 - 1), p.elem(1)), (Monomial::t(pi - 1), p.elem(-1))],
        p,
        wx,
    )?;
    let eval0 = |s: i64| -> Result<ModPSeries> { Ok(coef(&c_at(s)?, 0)) };
    let result = match (order, beta) {
        (0, _) => zero.clone(),
        (1, 0) => {
            if single {
                coef(&c_at(0)?, 2).mul_monomial(&p.elem(-1), Monomial::t(pi - 1))?
            } else {
                coef(&xp.mul(&c_at(0)?)?, 2)
            }
        }
        (1, _) => {
            let k = p.elem(-1) * p.elem(beta * beta).inv()?;
            let mut s = eval0(beta)?;
            if !single {
                s = s.add(&eval0(0)?)?;
            }
            s.mul_monomial(&k, Monomial::t(pi - 3))?
        }
        (2, 0) => {
            let c = c_at(0)?;
            let mut acc = zero.clone();
            for m in 1..d as i64 {
                if m % pi as i64 == 0 {
                    continue;
                }
                let f = FactoredRationalFn::new(xp.mul(&c)?.scale(&p.elem(-2))).divide_by(p.elem(-m), 1);
                acc = acc.add(&f.coeff_x(2)?.with_window(zero.window())?)?;
            }
            let poles = if single { alpha } else { alpha - 1 };
            let tail = coef(&xp.mul(&c)?, 3).scale(&p.elem(-2 * poles));
            acc.add(&tail.with_window(zero.window())?)?
        }
        (2, _) => {
            let ib = p.elem(beta).inv()?;
            let ib2 = ib * ib;
            let ib3 = ib2 * ib;
            let cb = eval0(beta)?;
            let mut acc = zero.clone();
            for m in 1..d as i64 {
                if (m - beta).rem_euclid(pi as i64) == 0 {
                    continue;
                }
                let k = p.elem(2) * p.elem(beta - m).inv()? * ib2;
                acc = acc.add(&cb.mul_monomial(&k, Monomial::t(pi - 4))?)?;
            }
            // 2α t^{p-4} (x¹: (t/β² ∓ 2x/β³) c(x + s t))
            let alpha_term = |s: i64, sign: i64| -> Result<ModPSeries> {
                let g = GradedSeries::from_terms(
                    [(Monomial::t(1), ib2), (Monomial::x(1), p.elem(-2 * sign) * ib3)],
                    p,
                    wx,
                )?;
                coef(&g.mul(&c_at(s)?)?, 1).mul_monomial(&p.elem(2 * alpha), Monomial::t(pi - 4))
            };
            let sign_beta = if single { -1 } else { 1 };
            acc = acc.add(&alpha_term(beta, 1)?.scale(&p.elem(sign_beta)))?;
            if !single {
                let c0 = eval0(0)?;
                for m in 1..d as i64 {
                    if m % pi as i64 == 0 {
                        continue;
                    }
                    let k = p.elem(-2) * p.elem(m).inv()? * ib2;
                    acc = acc.add(&c0.mul_monomial(&k, Monomial::t(pi - 4))?)?;
                }
                acc = acc.add(&alpha_term(0, -1)?)?;
            }
            acc
        }
        _ => return Err(Error::Domain(format!("closed forms exist for orders 0..=2, got {order}"))),
    };
    result.with_window(Truncation::UNBOUNDED.with_x_max(0))
}

/// `(QΣ(b0), b∞)` values of the non-equivariant operation for the local P¹ threefold, arranged
/// as `[[(QΣ(1), b), (QΣ(b), b)], [(QΣ(1), 1), (QΣ(b), 1)]]`, summed over `1 ≤ d ≤ q_max`.
pub fn local_p1_table(p: PrimeModulus, q_max: u32) -> Result<[[ModPSeries; 2]; 2]> {
    use InsertionClass::{One, B};
    let w = Truncation::UNBOUNDED.with_x_max(0).with_h_max(0).with_q_max(q_max);
    let mut table = zero_table(p, w);
    let slots = [[(One, B), (B, B)], [(One, One), (B, One)]];
    for d in 1..=q_max {
        for (i, row) in slots.iter().enumerate() {
            for (j, &(b0, binf)) in row.iter().enumerate() {
                let v = structure_constant_noneq(p, d, b0, binf)?.shift_q(d)?.with_window(w)?;
                table[i][j] = table[i][j].add(&v)?;
            }
        }
    }
    Ok(table)
}

/// The closed-form local P¹ matrix `[[−d^{p−2}t^{p−2}, −t^{p−1}[p|d]], [−2d^{p−3}t^{p−3}, d^{p−2}t^{p−2}]]`
/// summed against `q^d`, with `0⁰ = 1`.
pub fn local_p1_closed_form(p: PrimeModulus, q_max: u32) -> Result<[[ModPSeries; 2]; 2]> {
    let w = Truncation::UNBOUNDED.with_x_max(0).with_h_max(0).with_q_max(q_max);
    let pi = p.get() as i32;
    let mut terms: [[Vec<(Monomial, FieldElement)>; 2]; 2] = Default::default();
    for d in 1..=q_max {
        let dd = p.elem(d as i64);
        let pw = |e: u32| if e == 0 { p.elem(1) } else { num_traits::Pow::pow(dd, e) };
        terms[0][0].push((Monomial::new(d, pi - 2, 0, 0), -pw(pi as u32 - 2)));
        if d % pi as u32 == 0 {
            terms[0][1].push((Monomial::new(d, pi - 1, 0, 0), p.elem(-1)));
        }
        terms[1][0].push((Monomial::new(d, pi - 3, 0, 0), p.elem(-2) * pw(pi as u32 - 3)));
        terms[1][1].push((Monomial::new(d, pi - 2, 0, 0), pw(pi as u32 - 2)));
    }
    let [[a, b], [c, e]] = terms;
    Ok([
        [GradedSeries::from_terms(a, p, w)?, GradedSeries::from_terms(b, p, w)?],
        [GradedSeries::from_terms(c, p, w)?, GradedSeries::from_terms(e, p, w)?],
    ])
}

fn zero_table(p: PrimeModulus, w: Truncation) -> [[ModPSeries; 2]; 2] {
    let z = GradedSeries::zero(p, w);
    [[z.clone(), z.clone()], [z.clone(), z]]
}

/// The `q⁰` term `St(b) ∪ ·` on T*P¹: `[[0, 0], [-t^{p-1}, 0]]` on `(1, b)`. In the stable
/// basis this is `h t^{p-1} [[0, 0], [1, 0]]`, i.e. `μ t^p [[0, 0], [1, 0]]` at `h = μt`.
pub fn classical_steenrod_term(p: PrimeModulus, basis: Basis) -> Result<ModPEndo> {
    let pt = p.get() as i32 - 1;
    let geo = Endo2::from_monomials(
        p,
        [[(0, Monomial::ONE), (0, Monomial::ONE)], [(-1, Monomial::t(pt)), (0, Monomial::ONE)]],
        Truncation::UNBOUNDED,
        Basis::Geometric,
    )?;
    match basis {
        Basis::Geometric => Ok(geo),
        Basis::Stable => crate::quantum_connection::to_stable_basis(&geo),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use InsertionClass::{One, B};

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn incidence_table() {
        let p = pm(5);
        assert_eq!(incidence_factor(p, One, One, 4).unwrap(), GradedSeries::one(p, Truncation::UNBOUNDED));
        let bb = incidence_factor(p, B, B, 3).unwrap();
        assert_eq!(bb.coeff(Monomial::x(2)), p.elem(1));
        assert_eq!(bb.coeff(Monomial::new(0, 1, 0, 1)), p.elem(-3));
        assert_eq!(incidence_factor(p, One, B, 7).unwrap().len(), 1);
    }

    #[test]
    fn obstruction_class() {
        let p = pm(5);
        let w = Truncation::UNBOUNDED;
        assert_eq!(obs_euler(p, 1, true, w).unwrap(), GradedSeries::one(p, w));
        let o = obs_euler(p, 2, false, w).unwrap();
        assert_eq!(o.coeff(Monomial::new(0, 1, 0, 1)), p.elem(-2));
        assert_eq!(o.coeff(Monomial::t(2)), p.elem(1));
        let o3 = obs_euler(p, 3, true, w).unwrap();
        assert!(o3.is_homogeneous(4));
        assert_eq!(o3.coeff(Monomial::h(4)), p.elem(1));
    }

    #[test]
    fn c_dl_smallest_case_and_weight() {
        let p = pm(5);
        let s = DegreeSplit::new(1, p).unwrap();
        let c = c_dl(p, s, 1, One, One, 4, 6).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.coeff(Monomial::x(4)), p.elem(1));
        assert_eq!(c.coeff(Monomial::t(4)), p.elem(-1));
        let s = DegreeSplit::new(7, p).unwrap();
        let c = c_dl(p, s, 3, B, B, 3, 6).unwrap();
        assert!(c.is_homogeneous(-4 + 2 + 12));
    }

    #[test]
    fn alpha_one_h_zero_slice_matches_direct_product() {
        // d = p, ℓ = 0: C^0 = x^{-2}·(x^{p-1} - t^{p-1})^{-1}·∏_{k=1}^{p-1}(x - kt)² · x²
        // and ∏_{k=1}^{p-1}(x - kt) = x^{p-1} - t^{p-1}, so C^0 = x^{p-1} - t^{p-1}.
        for pp in [3u64, 5, 7] {
            let p = pm(pp);
            let s = DegreeSplit::new(pp as u32, p).unwrap();
            let c = c_dl(p, s, 0, One, One, 0, 8).unwrap();
            let mut expect = vec![(Monomial::t(pp as i32 - 1), p.elem(-1))];
            if pp - 1 <= 8 {
                expect.push((Monomial::x(pp as u32 - 1), p.elem(1)));
            }
            let e = GradedSeries::from_terms(expect, p, c.window()).unwrap();
            assert_eq!(c, e);
        }
    }

    #[test]
    fn local_p1_examples() {
        let p = pm(5);
        let v = structure_constant_noneq(p, 1, One, B).unwrap();
        assert_eq!(v.coeff(Monomial::t(3)), p.elem(-1));
        // -2·d^{p-3} = -2·2² = -8 ≡ 2
        let v = structure_constant_noneq(p, 2, One, One).unwrap();
        assert_eq!(v.coeff(Monomial::t(2)), p.elem(2));
        let p3 = pm(3);
        let v = structure_constant_noneq(p3, 3, B, B).unwrap();
        assert_eq!(v.coeff(Monomial::t(2)), p3.elem(-1));
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn s1_examples() {
        let p = pm(5);
        let v = structure_constant_s1(p, 1, One, B, 4).unwrap();
        assert_eq!(v.coeff(Monomial::new(0, 3, 1, 0)), p.elem(-1));
        assert!(v.is_homogeneous(s1_weight(p, One, B)));
        for pp in [3u64, 5, 7] {
            let p = pm(pp);
            let v = structure_constant_s1(p, 2 * pp as u32, B, B, 2).unwrap();
            assert_eq!(v.coeff(Monomial::new(0, pp as i32 - 1, 1, 0)), p.elem(-1));
        }
    }

    #[test]
    fn dual_path_small() {
        let p = pm(3);
        for d in 1..=4 {
            for b0 in InsertionClass::ALL {
                for binf in InsertionClass::ALL {
                    let a = localization_bracket(p, d, b0, binf, 4).unwrap();
                    let b = integral_quotient_ring(p, d, b0, binf, 4).unwrap();
                    assert_eq!(a, b, "d={d} {b0:?} {binf:?}");
                }
            }
        }
    }

    #[test]
    fn multiple_cover_is_one() {
        for d in 1..=5 {
            let v = multiple_cover_integral(pm(5), d).unwrap();
            assert_eq!(v, GradedSeries::one(pm(5), v.window()));
        }
    }

    #[test]
    fn exactness_flag() {
        let p = pm(5);
        assert!(structure_constant_s1(p, 2, One, One, 3).unwrap().window().h_max == i32::MAX);
        assert_eq!(structure_constant_s1(p, 3, One, One, 3).unwrap().window().h_max, 3);
    }

    #[test]
    fn closed_form_spot_checks() {
        let p = pm(5);
        let v = h_expansion_closed_form(p, 1, One, B, 1).unwrap();
        assert_eq!(v.coeff(Monomial::t(3)), p.elem(-1));
        assert!(h_expansion_closed_form(p, 3, B, One, 0).unwrap().is_zero());
        let p3 = pm(3);
        let s = structure_constant_s1(p3, 4, One, One, 3).unwrap().coeff_h(2);
        assert_eq!(h_expansion_closed_form(p3, 4, One, One, 2).unwrap(), s);
    }

    #[test]
    fn classical_term_in_both_bases() {
        let p = PrimeModulus::new(5).unwrap();
        let g = classical_steenrod_term(p, Basis::Geometric).unwrap();
        assert_eq!(g.entry(1, 0).coeff(Monomial::t(4)), p.elem(-1));
        assert!(g.entry(0, 1).is_zero() && g.entry(1, 1).is_zero());
        let s = classical_steenrod_term(p, Basis::Stable).unwrap();
        for mu in 0..5 {
            let m = s.substitute_h(&p.elem(mu)).unwrap();
            assert_eq!(m.entry(1, 0).coeff(Monomial::t(5)), p.elem(mu));
            assert!(m.entry(0, 0).is_zero() && m.entry(0, 1).is_zero() && m.entry(1, 1).is_zero());
        }
    }
}
