//! Arithmetic flat sections of the mod-p quantum differential equation of T*P¹ at the
//! specialization `h/t = μ`: master-function coefficients, the explicit section `I_μ`,
//! the specialized structure-constant matrices `Σ_d`, and the identities relating them.
//!
//! `μ` is always carried by its integer representative `m ∈ [0, p)`. Specialized
//! matrices are stored through their `t^p` coefficient (every entry is a multiple of
//! `μ t^p`). Vectors act as columns in the stable basis `(b - h, b)`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_arith::{binom_field, binom_lucas, FieldElement, PrimeModulus};
use crate::localization_engine::{structure_constant_s1, InsertionClass};
use crate::poly_series::{Basis, Endo2, GradedSeries, Monomial, Truncation};
use crate::ModPEndo;

/// Polynomial in `z1, z2` over F_p; keys are `(deg z1, deg z2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiPoly {
    p: PrimeModulus,
    terms: BTreeMap<(u32, u32), FieldElement>,
}

impl BiPoly {
    pub fn zero(p: PrimeModulus) -> Self {
        Self { p, terms: BTreeMap::new() }
    }

    pub fn monomial(p: PrimeModulus, c: i64, e1: u32, e2: u32) -> Self {
        let mut r = Self::zero(p);
        r.accumulate((e1, e2), p.elem(c));
        r
    }

    fn accumulate(&mut self, k: (u32, u32), c: FieldElement) {
        let v = self.terms.get(&k).copied().unwrap_or(self.p.elem(0)) + c;
        if v.value() == 0 {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, v);
        }
    }

    pub fn coeff(&self, e1: u32, e2: u32) -> FieldElement {
        self.terms.get(&(e1, e2)).copied().unwrap_or(self.p.elem(0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &FieldElement)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.accumulate(*k, *c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(self.p.elem(-1)))
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        let mut r = Self::zero(self.p);
        for (k, v) in &self.terms {
            r.accumulate(*k, *v * c);
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.p);
        for ((a1, a2), c) in &self.terms {
            for ((b1, b2), e) in &o.terms {
                r.accumulate((a1 + b1, a2 + b2), *c * *e);
            }
        }
        r
    }

    /// Euler operator `z_i ∂_{z_i}` (`i ∈ {1, 2}`).
    pub fn euler(&self, i: usize) -> Self {
        let mut r = Self::zero(self.p);
        for (&(e1, e2), c) in &self.terms {
            let e = if i == 1 { e1 } else { e2 };
            r.accumulate((e1, e2), *c * self.p.elem(e as i64));
        }
        r
    }

    /// Common total degree, if every term has the same one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|(a, b)| a + b);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Dehomogenize at `z1 = 1, z2 = q`: dense coefficients in `q`.
    pub fn at_z1_one(&self) -> QPoly {
        let mut c = Vec::new();
        for (&(_, e2), v) in &self.terms {
            let k = e2 as usize;
            if c.len() <= k {
                c.resize(k + 1, self.p.elem(0));
            }
            c[k] = c[k] + *v;
        }
        QPoly::new(self.p, c)
    }
}

/// Dense polynomial in `q` over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    p: PrimeModulus,
    coeffs: Vec<FieldElement>,
}

impl QPoly {
    pub fn new(p: PrimeModulus, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.value() == 0) {
            coeffs.pop();
        }
        Self { p, coeffs }
    }

    pub fn from_ints(p: PrimeModulus, c: &[i64]) -> Self {
        Self::new(p, c.iter().map(|&v| p.elem(v)).collect())
    }

    pub fn zero(p: PrimeModulus) -> Self {
        Self { p, coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs.get(k).copied().unwrap_or(self.p.elem(0))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(self.p, (0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(self.p.elem(-1)))
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|&v| v * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let mut c = vec![self.p.elem(0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j] + *a * *b;
            }
        }
        Self::new(self.p, c)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::from_ints(self.p, &[1]), |acc, _| acc.mul(self))
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.p.elem(0); k];
        c.extend_from_slice(&self.coeffs);
        Self::new(self.p, c)
    }

    /// `q d/dq`.
    pub fn q_derivative(&self) -> Self {
        Self::new(self.p, self.coeffs.iter().enumerate().map(|(k, &c)| c * self.p.elem(k as i64)).collect())
    }

    /// As a `q`-series with no `t`, `h`, `x` dependence.
    pub fn to_series(&self, window: Truncation) -> Result<GradedSeries<FieldElement>> {
        GradedSeries::from_terms(self.coeffs.iter().enumerate().map(|(k, &c)| (Monomial::q(k as u32), c)), self.p, window)
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.value() != 0)
                .map(|(k, c)| json!({"q": k, "c": c.value()}))
                .collect(),
        )
    }
}

/// Pair of polynomials acting as a column vector.
pub type QVector = [QPoly; 2];

fn check_m(p: PrimeModulus, m: u32) -> Result<()> {
    if (m as u64) < p.get() {
        Ok(())
    } else {
        Err(Error::Domain(format!("m = {m} must lie in [0, {p})")))
    }
}

/// `Φ = s^m (s - z1)^{p-m} (s - z2)^{p-m}` as coefficients of `s^0, s^1, …` in F_p[z1, z2].
pub fn master_polynomial(p: PrimeModulus, m: u32) -> Result<Vec<BiPoly>> {
    check_m(p, m)?;
    let n = p.get() as u32 - m;
    // multiply coefficient vectors in s
    let mul = |a: &[BiPoly], b: &[BiPoly]| -> Vec<BiPoly> {
        let mut r = vec![BiPoly::zero(p); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                r[i + j] = r[i + j].add(&x.mul(y));
            }
        }
        r
    };
    let mut phi = vec![BiPoly::zero(p); m as usize];
    phi.push(BiPoly::monomial(p, 1, 0, 0));
    for lin in [[BiPoly::monomial(p, -1, 1, 0), BiPoly::monomial(p, 1, 0, 0)], [BiPoly::monomial(p, -1, 0, 1), BiPoly::monomial(p, 1, 0, 0)]] {
        for _ in 0..n {
            phi = mul(&phi, &lin);
        }
    }
    Ok(phi)
}

/// `Ψ_i = coefficient of s^{p-1} in Φ/(s - z_i)`, computed by synthetic division.
pub fn psi_coefficients(p: PrimeModulus, m: u32) -> Result<[BiPoly; 2]> {
    let phi = master_polynomial(p, m)?;
    let div = |root: BiPoly| -> Result<BiPoly> {
        let deg = phi.len() - 1;
        let mut quot = vec![BiPoly::zero(p); deg];
        let mut carry = BiPoly::zero(p);
        for k in (1..=deg).rev() {
            carry = phi[k].add(&carry.mul(&root));
            quot[k - 1] = carry.clone();
        }
        if !phi[0].add(&carry.mul(&root)).is_zero() {
            return Err(Error::DivisionNotExact);
        }
        Ok(quot.get(p.get() as usize - 1).cloned().unwrap_or_else(|| BiPoly::zero(p)))
    };
    Ok([div(BiPoly::monomial(p, 1, 1, 0))?, div(BiPoly::monomial(p, 1, 0, 1))?])
}

/// The distinguished polynomial flat section `I_μ` at `h/t = μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatSection {
    pub p: PrimeModulus,
    pub m: u32,
    pub mu: FieldElement,
    pub entries: QVector,
}

impl FlatSection {
    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p.get(),
            "m": self.m,
            "basis": Basis::Stable.as_str(),
            "entries": [self.entries[0].to_json(), self.entries[1].to_json()],
        })
    }
}

fn lucas(p: PrimeModulus, n: i64, k: i64) -> FieldElement {
    if n < 0 || k < 0 || k > n {
        p.elem(0)
    } else {
        binom_lucas(n as u64, k as u64, p)
    }
}

/// `I_μ = (-1)^{p-m} (1-q)^{2m} (Σ_d C(p-m-1, d-1) C(p-m, d) q^d, Σ_d C(p-m, d) C(p-m-1, d) q^d)`.
pub fn arithmetic_flat_section(p: PrimeModulus, m: u32) -> Result<FlatSection> {
    check_m(p, m)?;
    let n = (p.get() as u32 - m) as i64;
    let e1 = QPoly::new(p, (0..=n).map(|d| lucas(p, n - 1, d - 1) * lucas(p, n, d)).collect());
    let e2 = QPoly::new(p, (0..=n).map(|d| lucas(p, n, d) * lucas(p, n - 1, d)).collect());
    let sign = p.elem(if n % 2 == 0 { 1 } else { -1 });
    let gauge = QPoly::from_ints(p, &[1, -1]).pow(2 * m).scale(sign);
    Ok(FlatSection { p, m, mu: p.elem(m as i64), entries: [gauge.mul(&e1), gauge.mul(&e2)] })
}

/// `(1-q)^{gauge_exponent} · Ψ_i(1, q)`: the gauge-transformed master-function section.
pub fn gauged_psi_section(p: PrimeModulus, m: u32, gauge_exponent: u32) -> Result<QVector> {
    let [a, b] = psi_coefficients(p, m)?;
    let g = QPoly::from_ints(p, &[1, -1]).pow(gauge_exponent);
    Ok([g.mul(&a.at_z1_one()), g.mul(&b.at_z1_one())])
}

/// Defect of the stable-basis equation `q∂_q I = -μ (N + q/(1-q) J) I` with denominators
/// cleared: `(1-q) q∂_q I + μ((1-q) N I + q J I)`, where `N(x, y) = (0, x)` and `J` is all ones.
pub fn stable_qde_defect(mu: FieldElement, v: &QVector) -> QVector {
    let p = mu.modulus();
    let one_minus_q = QPoly::from_ints(p, &[1, -1]);
    let sum = v[0].add(&v[1]);
    let n_i = [QPoly::zero(p), v[0].clone()];
    let f = |i: usize| {
        one_minus_q
            .mul(&v[i].q_derivative())
            .add(&one_minus_q.mul(&n_i[i]).add(&sum.shift(1)).scale(mu))
    };
    [f(0), f(1)]
}

/// Independent path: `t q∂_q I - B I` with the stable connection matrix of the series
/// layer specialized at `h = μt`, through `q^{q_max}`. Returns the defect columns.
pub fn stable_qde_series_defect(section: &FlatSection, q_max: u32) -> Result<ModPEndo> {
    use crate::quantum_connection::Connection;
    let p = section.p;
    let w = Truncation::UNBOUNDED.with_q_max(q_max);
    let b = Connection::stable(p, w)?.matrix.substitute_h(&section.mu)?;
    let z = GradedSeries::zero(p, w);
    let col = Endo2::new(
        [[section.entries[0].to_series(w)?, z.clone()], [section.entries[1].to_series(w)?, z]],
        Basis::Stable,
    )?;
    let lhs = col.q_derivative()?.try_map(|e| e.mul_monomial(&p.elem(1), Monomial::t(1)))?;
    lhs.sub(&b.mul(&col)?)
}

/// `Σ_d = μ t^p ·(t^p-coefficient matrix)` in the stable basis at `h/t = μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecializedSigma {
    pub d: u32,
    pub matrix: [[FieldElement; 2]; 2],
}

impl SpecializedSigma {
    /// The matrix `M t^p` as a stable-basis endomorphism.
    pub fn to_endo(&self, window: Truncation) -> Result<ModPEndo> {
        let p = self.matrix[0][0].modulus();
        let pt = Monomial::t(p.get() as i32);
        let e = |c: FieldElement| GradedSeries::monomial(c, pt, window);
        Endo2::new(
            [[e(self.matrix[0][0])?, e(self.matrix[0][1])?], [e(self.matrix[1][0])?, e(self.matrix[1][1])?]],
            Basis::Stable,
        )
    }

    fn apply(&self, v: &QVector) -> QVector {
        let r = |i: usize| v[0].scale(self.matrix[i][0]).add(&v[1].scale(self.matrix[i][1]));
        [r(0), r(1)]
    }
}

/// The `q^d` coefficient of `QΣ_b^{S¹}|_{h/t=μ}` in the stable basis, from the binomial
/// closed form for `1 ≤ d ≤ p-1` and the constants at `d ∈ {0, p}`.
pub fn sigma_d_specialized(p: PrimeModulus, mu: FieldElement, d: u32) -> Result<SpecializedSigma> {
    let pp = p.get() as u32;
    if d > pp {
        return Err(Error::Domain(format!("Σ_d is tabulated for d ≤ p, got d = {d}")));
    }
    let z = p.elem(0);
    let matrix = if d == 0 {
        [[z, z], [mu, z]]
    } else if d == pp {
        [[z, mu], [mu, z]]
    } else {
        let gb = |top: FieldElement, k: i64| -> Result<FieldElement> {
            if k < 0 {
                Ok(z)
            } else {
                binom_field(top, k as u64)
            }
        };
        let a = |l: i64, dd: i64| -> Result<FieldElement> {
            if l < 0 || l > dd {
                return Ok(z);
            }
            Ok(gb(mu + p.elem(dd - l - 1), dd)? * lucas(p, dd, l))
        };
        let b = |l: i64, dd: i64| -> Result<FieldElement> {
            if l < 0 || l > dd {
                return Ok(z);
            }
            Ok(gb(mu + p.elem(dd - l), dd)? * lucas(p, dd, l))
        };
        let d = d as i64;
        let mut s = [[z, z], [z, z]];
        for l in 0..=d {
            s[0][0] = s[0][0] - a(l - 1, d - 1)? * b(l, d)?;
            s[0][1] = s[0][1] - a(l - 1, d - 1)? * b(l, d - 1)?;
            s[1][0] = s[1][0] + a(l, d)? * b(l, d)?;
            s[1][1] = s[1][1] + a(l, d)? * b(l, d - 1)?;
        }
        s.map(|r| r.map(|x| x * mu))
    };
    Ok(SpecializedSigma { d, matrix })
}

/// Outcome of the finite annihilation identity.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnihilationReport {
    pub holds: bool,
    /// `q^p (Σ_0 - Σ_p) I - (Σ_0 + Σ_1 q + … + Σ_{p-1} q^{p-1}) I` (coefficients of `t^p`).
    pub defect: QVector,
}

/// Evaluates both sides of `q^p (Σ_0 - Σ_p) I = (Σ_0 + … + Σ_{p-1} q^{p-1}) I` for a given vector.
pub fn annihilation_defect(p: PrimeModulus, mu: FieldElement, v: &QVector) -> Result<AnnihilationReport> {
    let pp = p.get() as usize;
    let sig: Vec<SpecializedSigma> = (0..=pp as u32).map(|d| sigma_d_specialized(p, mu, d)).collect::<Result<_>>()?;
    let s0 = sig[0].apply(v);
    let sp = sig[pp].apply(v);
    let lhs = [s0[0].sub(&sp[0]).shift(pp), s0[1].sub(&sp[1]).shift(pp)];
    let mut rhs = [QPoly::zero(p), QPoly::zero(p)];
    for (d, s) in sig.iter().take(pp).enumerate() {
        let sv = s.apply(v);
        rhs = [rhs[0].add(&sv[0].shift(d)), rhs[1].add(&sv[1].shift(d))];
    }
    let defect = [lhs[0].sub(&rhs[0]), lhs[1].sub(&rhs[1])];
    Ok(AnnihilationReport { holds: defect.iter().all(QPoly::is_zero), defect })
}

/// The finite annihilation identity for `I_μ` with `μ = m`.
pub fn annihilation_check(p: PrimeModulus, m: u32) -> Result<AnnihilationReport> {
    let s = arithmetic_flat_section(p, m)?;
    annihilation_defect(p, s.mu, &s.entries)
}

/// `μ Σ_{ℓ ≤ d} C(μ-ℓ+d-1, d) C(μ-ℓ+d, d) C(d, ℓ)²` (the `t^p` coefficient).
pub fn hypergeometric_structure_constant(p: PrimeModulus, mu: FieldElement, d: u32) -> Result<FieldElement> {
    if d == 0 || d as u64 >= p.get() {
        return Err(Error::Domain(format!("hypergeometric value needs 1 ≤ d < p, got d = {d}")));
    }
    let d = d as i64;
    let mut acc = p.elem(0);
    for l in 0..=d {
        let c = lucas(p, d, l);
        acc = acc + binom_field(mu + p.elem(d - l - 1), d as u64)? * binom_field(mu + p.elem(d - l), d as u64)? * c * c;
    }
    Ok(acc * mu)
}

/// Engine side of the hypergeometric dictionary: `-(QΣ_d(b - h), b - h)_{S¹}` at `h = μ`, `t = 1`,
/// from the localization pairing values of degree `d`.
pub fn hypergeometric_from_engine(p: PrimeModulus, mu: FieldElement, d: u32) -> Result<FieldElement> {
    use InsertionClass::{One, B};
    let h_max = 2 * d as i32 + 1;
    let eval = |b0, binf| -> Result<FieldElement> {
        let s = structure_constant_s1(p, d, b0, binf, h_max)?;
        let mut acc = p.elem(0);
        for (m, c) in s.terms() {
            if m.h < 0 {
                return Err(Error::Domain("negative h power in a quantum pairing value".into()));
            }
            acc = acc + *c * num_traits::Pow::pow(mu, m.h as u32);
        }
        Ok(acc)
    };
    // b - h = -h·1 + b
    let w = [-mu, p.elem(1)];
    let classes = [One, B];
    let mut val = p.elem(0);
    for i in 0..2 {
        for j in 0..2 {
            val = val + w[i] * w[j] * eval(classes[i], classes[j])?;
        }
    }
    Ok(-val)
}

/// The two-variable system and its one-dimensional reduction on `(Ψ_1, Ψ_2)`, with
/// denominators cleared (`μ = m`):
/// `(z1-z2) z1∂1 I = μ((z1-z2)A1 + z1 L) I`, `(z2-z1) z2∂2 I = μ((z2-z1)A2 + z2 L) I`,
/// `(z2-z1)(z2∂2 - z1∂1) I = μ((z2-z1)K + (z2+z1)L) I`.
pub fn reduced_dde_check(p: PrimeModulus, m: u32) -> Result<bool> {
    let psi = psi_coefficients(p, m)?;
    let mu = p.elem(m as i64);
    let z1 = BiPoly::monomial(p, 1, 1, 0);
    let z2 = BiPoly::monomial(p, 1, 0, 1);
    let apply = |mat: [[i64; 2]; 2], i: usize| psi[0].scale(p.elem(mat[i][0])).add(&psi[1].scale(p.elem(mat[i][1])));
    const K: [[i64; 2]; 2] = [[0, 1], [-1, 0]];
    const L: [[i64; 2]; 2] = [[-1, 1], [1, -1]];
    const A1: [[i64; 2]; 2] = [[0, -1], [0, 0]];
    const A2: [[i64; 2]; 2] = [[0, 0], [-1, 0]];
    let z12 = z1.sub(&z2);
    let z21 = z2.sub(&z1);
    let ok = (0..2).all(|i| {
        let e1 = z12.mul(&psi[i].euler(1)).sub(&z12.mul(&apply(A1, i)).add(&z1.mul(&apply(L, i))).scale(mu));
        let e2 = z21.mul(&psi[i].euler(2)).sub(&z21.mul(&apply(A2, i)).add(&z2.mul(&apply(L, i))).scale(mu));
        let red = z21
            .mul(&psi[i].euler(2).sub(&psi[i].euler(1)))
            .sub(&z21.mul(&apply(K, i)).add(&z2.add(&z1).mul(&apply(L, i))).scale(mu));
        e1.is_zero() && e2.is_zero() && red.is_zero()
    });
    Ok(ok)
}

/// The gauge-transformed section `(1-q)^{gauge_exponent} Ψ(1, q)` solves the stable-basis
/// equation at `μ = m`; the correct exponent is `2m`.
pub fn gauge_qde_check(p: PrimeModulus, m: u32, gauge_exponent: u32) -> Result<bool> {
    let v = gauged_psi_section(p, m, gauge_exponent)?;
    Ok(stable_qde_defect(p.elem(m as i64), &v).iter().all(QPoly::is_zero))
}
