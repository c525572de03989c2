//! The S¹-equivariant quantum connection of T*P¹, its flat endomorphisms, and the
//! conversions between pairing values and endomorphism matrices.
//!
//! Conventions: matrices act on column vectors in the basis `(1, b)` (geometric) or
//! `(b - h, b)` (stable); column `j` is the image of basis vector `j`. A connection
//! `t q∂_q - B` is stored through its endomorphism part `B`, and `Σ` is flat iff
//! `t q∂_q Σ = [B, Σ]`.

use crate::error::{Error, Result};
use crate::exact_arith::{FieldElement, PrimeModulus, Scalar};
use crate::localization_engine::{structure_constant_s1, InsertionClass};
use crate::poly_series::{q_over_one_minus_q, AdicVar, Basis, Endo2, GradedSeries, Monomial, Truncation};
use crate::{BigRational, ModPEndo, ModPSeries, RationalEndo};

/// Pairing values `(QΣ(b0), b∞)` indexed `[b0][b∞]` with index 0 for `1` and 1 for `b`.
pub type PairingTable<S> = [[GradedSeries<S>; 2]; 2];

fn mono<S: Scalar>(ctx: S::Ctx, c: i64, m: Monomial) -> GradedSeries<S> {
    GradedSeries::monomial(S::from_int(c, ctx), m, Truncation::UNBOUNDED).expect("unbounded window")
}

/// Equivariant Poincaré pairing on `(1, b)`: `[[2h⁻², h⁻¹], [h⁻¹, 0]]`.
pub fn pairing_matrix<S: Scalar>(ctx: S::Ctx) -> Endo2<S> {
    Endo2::new(
        [[mono(ctx, 2, Monomial::h(-2)), mono(ctx, 1, Monomial::h(-1))], [mono(ctx, 1, Monomial::h(-1)), mono(ctx, 0, Monomial::ONE)]],
        Basis::Geometric,
    )
    .expect("constant matrix")
}

/// Inverse pairing `[[0, h], [h, -2]]`.
pub fn inverse_pairing_matrix<S: Scalar>(ctx: S::Ctx) -> Endo2<S> {
    Endo2::new(
        [[mono(ctx, 0, Monomial::ONE), mono(ctx, 1, Monomial::h(1))], [mono(ctx, 1, Monomial::h(1)), mono(ctx, -2, Monomial::ONE)]],
        Basis::Geometric,
    )
    .expect("constant matrix")
}

/// Endomorphism `M` with `(M b0, b∞) = table[b0][b∞]`, i.e. `M = G⁻¹ S'` where `S'[i][j] = table[j][i]`.
pub fn pairing_to_matrix<S: Scalar>(table: &PairingTable<S>) -> Result<Endo2<S>> {
    let ctx = table[0][0].ctx();
    let sp = Endo2::new(
        [[table[0][0].clone(), table[1][0].clone()], [table[0][1].clone(), table[1][1].clone()]],
        Basis::Geometric,
    )?;
    inverse_pairing_matrix(ctx).mul(&sp)
}

/// Inverse of [`pairing_to_matrix`]: `table[j][i] = (G M)[i][j]`.
pub fn matrix_to_pairing<S: Scalar>(m: &Endo2<S>) -> Result<PairingTable<S>> {
    if m.basis() != Basis::Geometric {
        return Err(Error::BasisMismatch);
    }
    let sp = pairing_matrix(m.ctx()).mul(m)?;
    let e = sp.entries();
    Ok([[e[0][0].clone(), e[1][0].clone()], [e[0][1].clone(), e[1][1].clone()]])
}

/// Matrix of `b *_{S¹}` on `(1, b)`: `[[0, h²q/(1-q)], [1, -2hq/(1-q)]]`, through `q^{q_max}` of `window`.
pub fn quantum_product_b<S: Scalar>(ctx: S::Ctx, window: Truncation) -> Result<Endo2<S>> {
    let g = q_over_one_minus_q::<S>(ctx, window)?;
    let one = S::one(ctx);
    Endo2::new(
        [
            [GradedSeries::zero(ctx, window), g.mul_monomial(&one, Monomial::h(2))?],
            [GradedSeries::one(ctx, window), g.mul_monomial(&S::from_int(-2, ctx), Monomial::h(1))?],
        ],
        Basis::Geometric,
    )
}

/// Change of basis to `(b - h, b)`: columns `(-h, 1)` and `(0, 1)`.
fn stable_change<S: Scalar>(ctx: S::Ctx) -> (Endo2<S>, Endo2<S>) {
    let p = Endo2::new(
        [[mono(ctx, -1, Monomial::h(1)), mono(ctx, 0, Monomial::ONE)], [mono(ctx, 1, Monomial::ONE), mono(ctx, 1, Monomial::ONE)]],
        Basis::Geometric,
    )
    .expect("constant matrix");
    let pinv = Endo2::new(
        [[mono(ctx, -1, Monomial::h(-1)), mono(ctx, 0, Monomial::ONE)], [mono(ctx, 1, Monomial::h(-1)), mono(ctx, 1, Monomial::ONE)]],
        Basis::Geometric,
    )
    .expect("constant matrix");
    (p, pinv)
}

/// `P⁻¹ e P` with `P` the stable-envelope change of basis.
pub fn to_stable_basis<S: Scalar>(e: &Endo2<S>) -> Result<Endo2<S>> {
    if e.basis() != Basis::Geometric {
        return Err(Error::BasisMismatch);
    }
    let (p, pinv) = stable_change(e.ctx());
    Ok(pinv.mul(e)?.mul(&p)?.retag(Basis::Stable))
}

/// `P e P⁻¹`, back to `(1, b)`.
pub fn from_stable_basis<S: Scalar>(e: &Endo2<S>) -> Result<Endo2<S>> {
    if e.basis() != Basis::Stable {
        return Err(Error::BasisMismatch);
    }
    let (p, pinv) = stable_change(e.ctx());
    let g = e.clone().retag(Basis::Geometric);
    p.mul(&g)?.mul(&pinv)
}

/// `t q∂_q - B` through its endomorphism part.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection<S: Scalar> {
    pub matrix: Endo2<S>,
}

impl<S: Scalar> Connection<S> {
    /// Geometric basis: `B = b *_{S¹}`.
    pub fn geometric(ctx: S::Ctx, window: Truncation) -> Result<Self> {
        Ok(Self { matrix: quantum_product_b(ctx, window)? })
    }

    /// Stable basis: `B = -h (N + q/(1-q) J)` with `N = [[0,0],[1,0]]`, `J` all ones.
    pub fn stable(ctx: S::Ctx, window: Truncation) -> Result<Self> {
        let g = q_over_one_minus_q::<S>(ctx, window)?.mul_monomial(&S::from_int(-1, ctx), Monomial::h(1))?;
        let mh = GradedSeries::monomial(S::from_int(-1, ctx), Monomial::h(1), window)?;
        let matrix = Endo2::new([[g.clone(), g.clone()], [g.add(&mh)?, g]], Basis::Stable)?;
        Ok(Self { matrix })
    }

    pub fn basis(&self) -> Basis {
        self.matrix.basis()
    }
}

/// `t q∂_q Σ - [B, Σ]`; zero (within the window) iff `Σ` is covariantly constant.
pub fn covariant_constancy_defect<S: Scalar>(sigma: &Endo2<S>, conn: &Connection<S>) -> Result<Endo2<S>> {
    if sigma.basis() != conn.basis() {
        return Err(Error::BasisMismatch);
    }
    let w = sigma.window().intersect(conn.matrix.window());
    if w.q_max < 2 {
        return Err(Error::TruncationTooShallow("defect needs q_max ≥ 2".into()));
    }
    let ctx = sigma.ctx();
    let lhs = sigma.q_derivative()?.try_map(|e| e.mul_monomial(&S::one(ctx), Monomial::t(1)))?;
    lhs.sub(&conn.matrix.commutator(sigma)?)
}

/// Flat extension of `classical` to `Σ = Σ_k Σ^{(k)} q^k`, solving
/// `(tk - ad_{B⁽⁰⁾}) Σ^{(k)} = Σ_{j<k} [B^{(k-j)}, Σ^{(j)}]` order by order.
/// Over F_p this stops with `NonInvertibleOrder(k)` at the first `p | k`.
pub fn char0_recursion<S: Scalar>(classical: &Endo2<S>, q_max: u32) -> Result<Endo2<S>> {
    let ctx = classical.ctx();
    let cw = classical.window();
    let t_floor = classical
        .entries()
        .iter()
        .flatten()
        .flat_map(|e| e.terms().map(|(m, _)| m.t))
        .min()
        .unwrap_or(0)
        .min(0);
    let w = Truncation { q_max, t_min: cw.t_min.min(t_floor - 2 * q_max as i32), ..cw };
    let b = quantum_product_b::<S>(ctx, w)?;
    let bq: Vec<Endo2<S>> = (0..=q_max).map(|m| b.coeff_q(m)).collect::<Result<_>>()?;
    let b0 = &bq[0];
    let mut sig: Vec<Endo2<S>> = vec![classical.coeff_q(0)?.try_map(|e| e.with_window(w))?];
    for k in 1..=q_max {
        let mut rhs = Endo2::zero(ctx, w, classical.basis());
        for j in 0..k {
            rhs = rhs.add(&bq[(k - j) as usize].commutator(&sig[j as usize])?)?;
        }
        let kinv = S::from_int(k as i64, ctx).checked_inv().ok_or(Error::NonInvertibleOrder(k))?;
        // (tk - ad)⁻¹ = Σ_n ad^n / (tk)^{n+1}; ad_{B⁽⁰⁾} is nilpotent on 2×2 matrices
        let mut term = rhs.clone();
        let mut acc = Endo2::zero(ctx, w, classical.basis());
        for n in 1..=3i32 {
            let scaled = term.try_map(|e| e.mul_monomial(&kinv.clone().pow(n as u32), Monomial::t(-n)))?;
            acc = acc.add(&scaled)?;
            term = b0.commutator(&term)?;
        }
        if !term.is_zero() {
            return Err(Error::InconsistentSystem(k));
        }
        let check = acc
            .try_map(|e| e.mul_monomial(&S::from_int(k as i64, ctx), Monomial::t(1)))?
            .sub(&b0.commutator(&acc)?)?;
        if check != rhs {
            return Err(Error::InconsistentSystem(k));
        }
        sig.push(acc);
    }
    let mut out = Endo2::zero(ctx, w, classical.basis());
    for (k, s) in sig.iter().enumerate() {
        out = out.add(&s.try_map(|e| e.shift_q(k as u32))?)?;
    }
    Ok(out)
}

/// Classical seed "cup product with the fiber class" on `(1, b)`: `[[0, 0], [-1, 0]]`.
/// The fiber class is `-b` in the convention where `b` pairs to `h⁻¹` with `1`.
pub fn char0_seed<S: Scalar>(ctx: S::Ctx) -> Endo2<S> {
    Endo2::from_monomials(
        ctx,
        [[(0, Monomial::ONE), (0, Monomial::ONE)], [(-1, Monomial::ONE), (0, Monomial::ONE)]],
        Truncation::UNBOUNDED,
        Basis::Geometric,
    )
    .expect("constant matrix")
}

/// Known low-order coefficients `Σ^{(1)}, Σ^{(2)}, Σ^{(3)}` of the characteristic-0 flat
/// endomorphism seeded by [`char0_seed`], as `(numerator, denominator, t-exponent, h-exponent)`
/// per entry.
pub const CHAR0_REFERENCE: [[[&[(i64, i64, i32, i32)]; 2]; 2]; 3] = [
    [[&[(-1, 1, -1, 2)], &[]], [&[(-2, 1, -2, 2), (2, 1, -1, 1)], &[(1, 1, -1, 2)]]],
    [
        [&[(-3, 2, -3, 4), (1, 1, -2, 3), (-1, 2, -1, 2)], &[(1, 1, -2, 4)]],
        [&[(-3, 2, -4, 4), (3, 1, -3, 3), (-5, 2, -2, 2), (1, 1, -1, 1)], &[(3, 2, -3, 4), (-1, 1, -2, 3), (1, 2, -1, 2)]],
    ],
    [
        [&[(-5, 6, -5, 6), (1, 1, -4, 5), (-11, 6, -3, 4), (1, 1, -2, 3), (-1, 3, -1, 2)], &[(1, 1, -4, 6), (1, 1, -2, 4)]],
        [
            &[(-5, 9, -6, 6), (5, 3, -5, 5), (-29, 9, -4, 4), (11, 3, -3, 3), (-20, 9, -2, 2), (2, 3, -1, 1)],
            &[(5, 6, -5, 6), (-1, 1, -4, 5), (11, 6, -3, 4), (-1, 1, -2, 3), (1, 3, -1, 2)],
        ],
    ],
];

/// [`CHAR0_REFERENCE`] order `k ∈ {1, 2, 3}` as a rational endomorphism (no `q`).
pub fn char0_reference(k: usize) -> Result<RationalEndo> {
    if !(1..=3).contains(&k) {
        return Err(Error::Domain(format!("reference matrices cover orders 1..=3, got {k}")));
    }
    let cell = |terms: &[(i64, i64, i32, i32)]| {
        GradedSeries::from_terms(
            terms.iter().map(|&(n, d, te, he)| (Monomial::new(0, te, he, 0), BigRational::new(n.into(), d.into()))),
            (),
            Truncation::UNBOUNDED,
        )
    };
    let r = &CHAR0_REFERENCE[k - 1];
    Endo2::new([[cell(r[0][0])?, cell(r[0][1])?], [cell(r[1][0])?, cell(r[1][1])?]], Basis::Geometric)
}

/// The flat endomorphism in traceless normal form `[[u/2, b], [c, -u/2]]` whose lower-left
/// entry agrees with `c_prime` in every degree `k` where `k` is not invertible (and `k = 0`).
/// Flatness reads `t q u' = 2(βc - b)`, `t q b' = -βu - γb`, `t q c' = u + γc` with
/// `β = h²q/(1-q)`, `γ = -2hq/(1-q)`, `u = a - e`; the trace is an arbitrary function of `q^p`.
pub fn modp_flat_solver<S: Scalar>(c_prime: &GradedSeries<S>, q_max: u32) -> Result<Endo2<S>> {
    let ctx = c_prime.ctx();
    let mut w = c_prime.window().with_q_max(q_max);
    w.t_min = i32::MIN;
    let inv_k = |k: u32| S::from_int(k as i64, ctx).checked_inv();
    for (m, _) in c_prime.terms() {
        if m.q > 0 && inv_k(m.q).is_some() {
            return Err(Error::Domain(format!("c_prime has a term at invertible degree q^{}", m.q)));
        }
    }
    let zero = GradedSeries::<S>::zero(ctx, Truncation { q_max: 0, ..w });
    let one = S::one(ctx);
    let hm = |s: &GradedSeries<S>, c: i64, e: i32| s.mul_monomial(&S::from_int(c, ctx), Monomial::h(e));
    let (mut us, mut bs, mut cs) = (vec![zero.clone()], vec![zero.clone()], vec![c_prime.coeff_q(0).restrict(zero.window())?]);
    let (mut su, mut sb, mut sc) = (zero.clone(), zero.clone(), zero.clone());
    for k in 1..=q_max {
        su = su.add(&us[k as usize - 1])?;
        sb = sb.add(&bs[k as usize - 1])?;
        sc = sc.add(&cs[k as usize - 1])?;
        let b_num = hm(&su, -1, 2)?.add(&hm(&sb, 2, 1)?)?;
        let (u, b, c) = match inv_k(k) {
            Some(ki) => {
                let over_tk = |s: &GradedSeries<S>| s.mul_monomial(&ki, Monomial::t(-1));
                let b = over_tk(&b_num)?;
                let num = hm(&sc, 2, 2)?
                    .sub(&b.scale(&S::from_int(2, ctx)))?
                    .sub(&sc.mul_monomial(&S::from_int(2 * k as i64, ctx), Monomial::new(0, 1, 1, 0))?)?;
                let c = over_tk(&over_tk(&num)?)?;
                let u = c.mul_monomial(&S::from_int(k as i64, ctx), Monomial::t(1))?.add(&hm(&sc, 2, 1)?)?;
                (u, b, c)
            }
            None => {
                if !b_num.is_zero() {
                    return Err(Error::InconsistentSystem(k));
                }
                (hm(&sc, 2, 1)?, hm(&sc, 1, 2)?, c_prime.coeff_q(k).restrict(zero.window())?)
            }
        };
        us.push(u);
        bs.push(b);
        cs.push(c);
    }
    let half = S::from_int(2, ctx).checked_inv().ok_or(Error::DivisionByZero)?;
    let assemble = |v: &[GradedSeries<S>], c: &S| -> Result<GradedSeries<S>> {
        let mut acc = GradedSeries::zero(ctx, w);
        for (k, s) in v.iter().enumerate() {
            acc = acc.add(&s.with_window(w)?.shift_q(k as u32)?.scale(c))?;
        }
        Ok(acc)
    };
    let u = assemble(&us, &half)?;
    Endo2::new([[u.clone(), assemble(&bs, &one)?], [assemble(&cs, &one)?, u.neg()]], Basis::Geometric)
}

/// `Σ - (tr Σ / 2)·id`.
pub fn traceless_part<S: Scalar>(e: &Endo2<S>) -> Result<Endo2<S>> {
    let ctx = e.ctx();
    let half = S::from_int(2, ctx).checked_inv().ok_or(Error::DivisionByZero)?;
    let tr = e.trace()?.scale(&half);
    let id = Endo2::identity(ctx, e.window(), e.basis());
    e.sub(&id.scale_series(&tr)?)
}

/// Write a flat `sigma` as `f1·id + f2·qsigma` with `f1, f2` power series in `q^p`.
pub fn rank2_decompose(sigma: &ModPEndo, qsigma: &ModPEndo) -> Result<(ModPSeries, ModPSeries)> {
    let p = sigma.ctx();
    let w = sigma.window().intersect(qsigma.window());
    let conn = Connection::geometric(p, w)?;
    if !covariant_constancy_defect(sigma, &conn)?.is_zero() {
        return Err(Error::NotFlat);
    }
    let f2 = sigma.entry(1, 0).mul(&qsigma.entry(1, 0).inv_unit(AdicVar::Q)?)?;
    let rest = sigma.sub(&qsigma.scale_series(&f2)?)?;
    let half = p.elem(2).inv()?;
    let f1 = rest.trace()?.scale(&half);
    let pp = p.get() as u32;
    if f1.terms().chain(f2.terms()).any(|(m, _)| m.q % pp != 0) {
        return Err(Error::NotFlat);
    }
    Ok((f1, f2))
}

/// Classical pairing values `(St(b) ∪ b0, b∞)` with `St(b) = -t^{p-1} b`: only `(1, 1) = -t^{p-1}h⁻¹`.
pub fn classical_pairing_table(p: PrimeModulus) -> PairingTable<FieldElement> {
    let z = GradedSeries::zero(p, Truncation::UNBOUNDED);
    let c = mono(p, -1, Monomial::new(0, p.get() as i32 - 1, -1, 0));
    [[c, z.clone()], [z.clone(), z]]
}

/// Pairing values of the `q^d` coefficient from the localization engine, through `h^{h_max}`.
pub fn degree_pairing_table(p: PrimeModulus, d: u32, h_max: i32) -> Result<PairingTable<FieldElement>> {
    use InsertionClass::{One, B};
    let v = |b0, binf| structure_constant_s1(p, d, b0, binf, h_max);
    Ok([[v(One, One)?, v(One, B)?], [v(B, One)?, v(B, B)?]])
}

/// Geometric-basis matrix of the `q^d` coefficient of `QΣ_b^{S¹}`.
pub fn qsigma_degree(p: PrimeModulus, d: u32, h_max: i32) -> Result<ModPEndo> {
    pairing_to_matrix(&degree_pairing_table(p, d, h_max)?)
}

/// `QΣ_b^{S¹} = Σ_d M_d q^d` (classical term included) in the geometric basis, within `window`.
pub fn qsigma_series(p: PrimeModulus, window: Truncation) -> Result<ModPEndo> {
    let w = Truncation::UNBOUNDED.with_q_max(window.q_max).with_h_max(window.h_max).with_x_max(0);
    let mut acc = pairing_to_matrix(&classical_pairing_table(p))?.restrict(w)?;
    for d in 1..=window.q_max {
        let md = qsigma_degree(p, d, window.h_max)?.try_map(|e| e.with_window(w)?.shift_q(d))?;
        acc = acc.add(&md)?;
    }
    acc.restrict(window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BigRational;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn pairing_inverse() {
        let g = pairing_matrix::<BigRational>(());
        let gi = inverse_pairing_matrix::<BigRational>(());
        assert_eq!(g.mul(&gi).unwrap(), Endo2::identity((), Truncation::UNBOUNDED, Basis::Geometric));
    }

    #[test]
    fn classical_term_from_pairing() {
        let p = pm(5);
        let m = pairing_to_matrix(&classical_pairing_table(p)).unwrap();
        assert!(m.entry(0, 0).is_zero() && m.entry(0, 1).is_zero() && m.entry(1, 1).is_zero());
        assert_eq!(m.entry(1, 0).coeff(Monomial::t(4)), p.elem(-1));
        let back = matrix_to_pairing(&m).unwrap();
        assert_eq!(back, classical_pairing_table(p));
    }

    #[test]
    fn quantum_product_facts() {
        let p = pm(7);
        let w = Truncation::UNBOUNDED.with_q_max(6);
        let b = quantum_product_b::<FieldElement>(p, w).unwrap();
        // unit axiom: b * 1 = b
        assert!(b.entry(0, 0).is_zero());
        assert_eq!(b.entry(1, 0), &GradedSeries::one(p, w));
        // (b * b, b) = h q/(1-q): pair column 1 with b
        let t = matrix_to_pairing(&b).unwrap();
        for d in 1..=6 {
            assert_eq!(t[1][1].coeff(Monomial::new(d, 0, 1, 0)), p.elem(1));
        }
        // dual of b is -2b + h: (b, -2b + h) = 1
        let g = pairing_matrix::<FieldElement>(p);
        let v = g.entry(1, 1).scale(&p.elem(-2)).add(&g.entry(1, 0).mul_monomial(&p.elem(1), Monomial::h(1)).unwrap()).unwrap();
        assert_eq!(v, GradedSeries::one(p, Truncation::UNBOUNDED));
    }

    #[test]
    fn stable_connection_is_conjugate() {
        let p = pm(5);
        let w = Truncation::UNBOUNDED.with_q_max(8);
        let geo = Connection::<FieldElement>::geometric(p, w).unwrap();
        let st = Connection::<FieldElement>::stable(p, w).unwrap();
        assert_eq!(to_stable_basis(&geo.matrix).unwrap(), st.matrix);
        assert_eq!(from_stable_basis(&st.matrix).unwrap(), geo.matrix);
    }

    #[test]
    fn basis_change_is_functorial() {
        let p = pm(5);
        let w = Truncation::UNBOUNDED.with_q_max(4);
        let a = qsigma_series(p, w.with_h_max(3)).unwrap();
        let b = Connection::<FieldElement>::geometric(p, w).unwrap().matrix;
        let lhs = to_stable_basis(&a.mul(&b).unwrap()).unwrap();
        let rhs = to_stable_basis(&a).unwrap().mul(&to_stable_basis(&b).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn identity_is_flat() {
        let p = pm(3);
        let w = Truncation::UNBOUNDED.with_q_max(6);
        let conn = Connection::<FieldElement>::geometric(p, w).unwrap();
        let id = Endo2::identity(p, w, Basis::Geometric);
        assert!(covariant_constancy_defect(&id, &conn).unwrap().is_zero());
        assert!(matches!(
            covariant_constancy_defect(&id.restrict(w.with_q_max(1)).unwrap(), &conn),
            Err(Error::TruncationTooShallow(_))
        ));
    }

    #[test]
    fn engine_matrix_is_flat_small() {
        let p = pm(3);
        let w = Truncation::UNBOUNDED.with_q_max(6).with_h_max(3);
        let m = qsigma_series(p, w).unwrap();
        let conn = Connection::geometric(p, w).unwrap();
        assert!(covariant_constancy_defect(&m, &conn).unwrap().is_zero());
    }

    #[test]
    fn char0_reproduces_reference() {
        let s = char0_recursion(&char0_seed::<BigRational>(()), 3).unwrap();
        for k in 1..=3 {
            assert_eq!(s.coeff_q(k).unwrap(), char0_reference(k as usize).unwrap(), "order {k}");
        }
        let r3 = char0_reference(3).unwrap();
        assert_eq!(r3.entry(1, 0).coeff(Monomial::new(0, -6, 6, 0)), BigRational::new((-5).into(), 9.into()));
    }

    #[test]
    fn char0_recursion_halts_mod_p() {
        let p = pm(3);
        let seed = Endo2::<FieldElement>::from_monomials(
            p,
            [[(0, Monomial::ONE), (0, Monomial::ONE)], [(-1, Monomial::t(2)), (0, Monomial::ONE)]],
            Truncation::UNBOUNDED,
            Basis::Geometric,
        )
        .unwrap();
        assert_eq!(char0_recursion(&seed, 3), Err(Error::NonInvertibleOrder(3)));
        assert!(char0_recursion(&seed, 2).is_ok());
    }

    #[test]
    fn solver_zero_and_engine() {
        let p = pm(3);
        let w = Truncation::UNBOUNDED.with_q_max(7).with_h_max(4);
        let z = ModPSeries::zero(p, w);
        assert!(modp_flat_solver(&z, 7).unwrap().is_zero());
        let c = GradedSeries::monomial(p.elem(-1), Monomial::t(2), w).unwrap();
        let s = modp_flat_solver(&c, 7).unwrap();
        let m = traceless_part(&qsigma_series(p, w).unwrap()).unwrap();
        assert!(s.sub(&m).unwrap().is_zero());
    }

    #[test]
    fn decompose_simple() {
        let p = pm(3);
        let w = Truncation::UNBOUNDED.with_q_max(7).with_h_max(3);
        let q = qsigma_series(p, w).unwrap();
        let id = Endo2::identity(p, q.window(), Basis::Geometric);
        let (f1, f2) = rank2_decompose(&id, &q).unwrap();
        assert_eq!(f1, GradedSeries::one(p, w));
        assert!(f2.is_zero());
        let (f1, f2) = rank2_decompose(&q, &q).unwrap();
        assert!(f1.is_zero());
        assert_eq!(f2, GradedSeries::one(p, w));
    }
}
