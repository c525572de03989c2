//! Sparse truncated series in the Novikov variable `q`, Laurent in the equivariant
//! parameters `t` and `h`, and polynomial in an auxiliary variable `x`.
//!
//! The odd equivariant parameter is deliberately absent: every formula implemented
//! in this crate is independent of it (see [`ODD_PARAMETER_FREE`]).
//!
//! Truncation semantics: `q`, `x`, and `h` are cut from above (terms beyond the
//! window are dropped); `t_min` and `h_min` are representability floors, and a term
//! below them is an error rather than a silent loss.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_arith::{binom_int, reduce_rational, FieldElement, PrimeModulus, Scalar};
use num_rational::BigRational;

/// Documents that no series carries the odd parameter of the `Z/p`-equivariant theory.
pub const ODD_PARAMETER_FREE: bool = true;

/// Exponent vector. The derived ordering is lexicographic on `(q, h, t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub q: u32,
    pub h: i32,
    pub t: i32,
    pub x: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { q: 0, h: 0, t: 0, x: 0 };

    pub fn new(q: u32, t: i32, h: i32, x: u32) -> Self {
        Self { q, h, t, x }
    }

    pub fn q(q: u32) -> Self {
        Self { q, ..Self::ONE }
    }

    pub fn t(t: i32) -> Self {
        Self { t, ..Self::ONE }
    }

    pub fn h(h: i32) -> Self {
        Self { h, ..Self::ONE }
    }

    pub fn x(x: u32) -> Self {
        Self { x, ..Self::ONE }
    }

    pub fn times(self, o: Self) -> Self {
        Self { q: self.q + o.q, h: self.h + o.h, t: self.t + o.t, x: self.x + o.x }
    }

    /// Total cohomological weight in units of `t` (`t`, `h`, `x` all count one).
    pub fn weight(self) -> i64 {
        self.t as i64 + self.h as i64 + self.x as i64
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^{}·t^{}·h^{}·x^{}", self.q, self.t, self.h, self.x)
    }
}

/// Truncation window. `UNBOUNDED` marks an exact series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub q_max: u32,
    pub h_max: i32,
    pub x_max: u32,
    pub t_min: i32,
    pub h_min: i32,
}

impl Truncation {
    pub const UNBOUNDED: Truncation =
        Truncation { q_max: u32::MAX, h_max: i32::MAX, x_max: u32::MAX, t_min: i32::MIN, h_min: i32::MIN };

    /// Default output window for prime `p`: `q ≤ 3p`, `h ≤ 4`, `t ≥ -(p+4)`, `h ≥ -2`, no `x`.
    pub fn default_for(p: u64) -> Self {
        Truncation { q_max: 3 * p as u32, h_max: 4, x_max: 0, t_min: -(p as i32 + 4), h_min: -2 }
    }

    pub fn with_q_max(self, q_max: u32) -> Self {
        Self { q_max, ..self }
    }

    pub fn with_h_max(self, h_max: i32) -> Self {
        Self { h_max, ..self }
    }

    pub fn with_x_max(self, x_max: u32) -> Self {
        Self { x_max, ..self }
    }

    pub fn with_t_min(self, t_min: i32) -> Self {
        Self { t_min, ..self }
    }

    pub fn intersect(self, o: Self) -> Self {
        Truncation {
            q_max: self.q_max.min(o.q_max),
            h_max: self.h_max.min(o.h_max),
            x_max: self.x_max.min(o.x_max),
            t_min: self.t_min.max(o.t_min),
            h_min: self.h_min.max(o.h_min),
        }
    }

    pub fn h_bounded(self) -> bool {
        self.h_max != i32::MAX
    }

    fn keeps(self, m: Monomial) -> bool {
        m.q <= self.q_max && m.x <= self.x_max && m.h <= self.h_max
    }

    fn floor_ok(self, m: Monomial) -> bool {
        m.t >= self.t_min && m.h >= self.h_min
    }
}

fn shift_ceiling(h_max: i32, by: i32) -> i32 {
    if h_max == i32::MAX {
        h_max
    } else {
        h_max.saturating_add(by)
    }
}

/// Which variable an adic inversion expands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdicVar {
    Q,
    X,
}

/// Sparse truncated series with exact coefficients. No zero coefficient is stored.
/// Equality compares terms and coefficient ring; use [`GradedSeries::eq_within`] to
/// compare up to the common truncation window.
#[derive(Debug, Clone)]
pub struct GradedSeries<S: Scalar> {
    terms: BTreeMap<Monomial, S>,
    window: Truncation,
    ctx: S::Ctx,
}

impl<S: Scalar> PartialEq for GradedSeries<S> {
    fn eq(&self, o: &Self) -> bool {
        self.ctx == o.ctx && self.terms == o.terms
    }
}

impl<S: Scalar> GradedSeries<S> {
    pub fn zero(ctx: S::Ctx, window: Truncation) -> Self {
        Self { terms: BTreeMap::new(), window, ctx }
    }

    pub fn monomial(c: S, m: Monomial, window: Truncation) -> Result<Self> {
        let ctx = c.ctx();
        Self::from_terms([(m, c)], ctx, window)
    }

    pub fn constant(c: S, window: Truncation) -> Self {
        Self::monomial(c, Monomial::ONE, window).expect("constant fits every window")
    }

    pub fn one(ctx: S::Ctx, window: Truncation) -> Self {
        Self::constant(S::one(ctx), window)
    }

    /// Build from `(monomial, coefficient)` pairs; repeated monomials are summed.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, S)>>(
        terms: I,
        ctx: S::Ctx,
        window: Truncation,
    ) -> Result<Self> {
        let mut s = Self::zero(ctx, window);
        for (m, c) in terms {
            s.accumulate(m, c)?;
        }
        Ok(s)
    }

    fn accumulate(&mut self, m: Monomial, c: S) -> Result<()> {
        if c.ctx() != self.ctx {
            return Err(Error::RingMismatch);
        }
        if c.is_zero() || !self.window.keeps(m) {
            return Ok(());
        }
        if !self.window.floor_ok(m) {
            return Err(Error::FloorUnderflow(m.to_string()));
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
        Ok(())
    }

    pub fn window(&self) -> Truncation {
        self.window
    }

    /// Equality after restricting both sides to their common window.
    pub fn eq_within(&self, o: &Self) -> Result<bool> {
        let w = self.window.intersect(o.window);
        Ok(self.restrict(w)? == o.restrict(w)?)
    }

    pub fn ctx(&self) -> S::Ctx {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> S {
        self.terms.get(&m).cloned().unwrap_or_else(|| S::zero(self.ctx))
    }

    /// Re-truncate to the intersection with `w`.
    pub fn restrict(&self, w: Truncation) -> Result<Self> {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.clone())), self.ctx, self.window.intersect(w))
    }

    /// Replace the window without intersecting (used when a result is known to be exact).
    pub fn with_window(&self, w: Truncation) -> Result<Self> {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.clone())), self.ctx, w)
    }

    fn check_ring(&self, o: &Self) -> Result<()> {
        if self.ctx == o.ctx {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_ring(o)?;
        let mut r = self.restrict(o.window)?;
        for (m, c) in &o.terms {
            r.accumulate(*m, c.clone())?;
        }
        Ok(r)
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
            window: self.window,
            ctx: self.ctx,
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        let terms = if c.is_zero() {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(m, v)| (*m, v.clone() * c.clone())).collect()
        };
        Self { terms, window: self.window, ctx: self.ctx }
    }

    /// Multiply by `c·m` for a single monomial `m` (possibly with negative `t`, `h`).
    pub fn mul_monomial(&self, c: &S, m: Monomial) -> Result<Self> {
        let mut w = self.window;
        w.h_max = shift_ceiling(w.h_max, m.h);
        Self::from_terms(self.terms.iter().map(|(k, v)| (k.times(m), v.clone() * c.clone())), self.ctx, w)
    }

    /// Lowest `h` exponent present.
    pub fn h_valuation(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.h).min()
    }

    /// Exact product truncated to the intersection window. When negative `h` powers
    /// are present, the `h` ceiling shrinks so that every kept coefficient is exact.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_ring(o)?;
        let mut w = self.window.intersect(o.window);
        let va = self.h_valuation().unwrap_or(0);
        let vb = o.h_valuation().unwrap_or(0);
        w.h_max = w.h_max.min(shift_ceiling(self.window.h_max, vb)).min(shift_ceiling(o.window.h_max, va));
        let mut acc: BTreeMap<Monomial, S> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.times(*mb);
                if !w.keeps(m) {
                    continue;
                }
                let v = ca.clone() * cb.clone();
                match acc.get_mut(&m) {
                    Some(e) => *e = e.clone() + v,
                    None => {
                        acc.insert(m, v);
                    }
                }
            }
        }
        let mut r = Self::zero(self.ctx, w);
        for (m, c) in acc {
            if !c.is_zero() {
                if !w.floor_ok(m) {
                    return Err(Error::FloorUnderflow(m.to_string()));
                }
                r.terms.insert(m, c);
            }
        }
        Ok(r)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut r = Self::one(self.ctx, self.window);
        for _ in 0..n {
            r = r.mul(self)?;
        }
        Ok(r)
    }

    /// Inverse in the `q`- or `x`-adic completion. The part of degree zero in the
    /// adic variable must be a single invertible monomial `c·t^a·h^b`.
    pub fn inv_unit(&self, var: AdicVar) -> Result<Self> {
        let deg = |m: &Monomial| match var {
            AdicVar::Q => m.q,
            AdicVar::X => m.x,
        };
        let bound = match var {
            AdicVar::Q => self.window.q_max,
            AdicVar::X => self.window.x_max,
        };
        if bound == u32::MAX {
            return Err(Error::TruncationTooShallow("adic inversion needs a bounded window".into()));
        }
        let head: Vec<_> = self.terms.iter().filter(|(m, _)| deg(m) == 0).collect();
        if head.len() != 1 {
            return Err(Error::NotAUnit(format!("{} terms in degree zero", head.len())));
        }
        let (m0, c0) = head[0];
        let c0inv = c0.checked_inv().ok_or_else(|| Error::NotAUnit("non-invertible leading coefficient".into()))?;
        let inv_m0 = Monomial { q: 0, h: -m0.h, t: -m0.t, x: 0 };
        if m0.q != 0 || m0.x != 0 {
            return Err(Error::NotAUnit("leading monomial involves q or x".into()));
        }
        let mut w = self.window;
        w.t_min = i32::MIN;
        w.h_min = i32::MIN;
        let b0 = GradedSeries::monomial(c0inv, inv_m0, w)?;
        // r = 1 - b0·a has positive adic degree, so 1/a = b0 · Σ r^n
        let r = GradedSeries::one(self.ctx, w).sub(&b0.mul(&self.with_window(w)?)?)?;
        let mut acc = GradedSeries::one(self.ctx, w);
        let mut pw = GradedSeries::one(self.ctx, w);
        for _ in 0..bound {
            pw = pw.mul(&r)?;
            if pw.is_zero() {
                break;
            }
            acc = acc.add(&pw)?;
        }
        let res = b0.mul(&acc)?;
        let mut out = self.window;
        out.h_max = res.window.h_max;
        res.with_window(out)
    }

    /// `q ∂_q`: multiplies each coefficient by its `q` exponent.
    pub fn q_derivative(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.clone() * S::from_int(m.q as i64, self.ctx)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Self { terms, window: self.window, ctx: self.ctx }
    }

    /// Terms satisfying a predicate, as a series over the same window.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (*m, c.clone())).collect(),
            window: self.window,
            ctx: self.ctx,
        }
    }

    /// Coefficient of `q^d`, as a series with `q` exponent zero.
    pub fn coeff_q(&self, d: u32) -> Self {
        let mut s = self.filter(|m| m.q == d);
        s.terms = s.terms.into_iter().map(|(m, c)| (Monomial { q: 0, ..m }, c)).collect();
        s
    }

    /// Coefficient of `h^b`, as a series with `h` exponent zero.
    pub fn coeff_h(&self, b: i32) -> Self {
        let mut s = self.filter(|m| m.h == b);
        s.terms = s.terms.into_iter().map(|(m, c)| (Monomial { h: 0, ..m }, c)).collect();
        s.window.h_max = s.window.h_max.max(0);
        s.window.h_min = s.window.h_min.min(0);
        s
    }

    /// Coefficient of `x^k`, as a series with `x` exponent zero.
    pub fn coeff_x_plain(&self, k: u32) -> Self {
        let mut s = self.filter(|m| m.x == k);
        s.terms = s.terms.into_iter().map(|(m, c)| (Monomial { x: 0, ..m }, c)).collect();
        s
    }

    /// Shift every `q` exponent by `d`.
    pub fn shift_q(&self, d: u32) -> Result<Self> {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.times(Monomial::q(d)), c.clone())), self.ctx, self.window)
    }

    /// Replace `t^a h^b` by `μ^b t^{a+b}`. Only meaningful for series exact in `h`.
    pub fn substitute_h(&self, mu: &S) -> Result<Self> {
        if self.window.h_bounded() {
            return Err(Error::InexactSpecialization);
        }
        let mut w = self.window;
        w.t_min = i32::MIN;
        let mut r = Self::zero(self.ctx, w);
        for (m, c) in &self.terms {
            let f = if m.h >= 0 {
                mu.clone().pow(m.h as u32)
            } else {
                mu.checked_inv().ok_or(Error::DivisionByZero)?.pow((-m.h) as u32)
            };
            r.accumulate(Monomial { h: 0, t: m.t + m.h, ..*m }, c.clone() * f)?;
        }
        Ok(r)
    }

    /// True iff every term has total `(t, h, x)`-weight `weight`.
    pub fn is_homogeneous(&self, weight: i64) -> bool {
        self.terms.keys().all(|m| m.weight() == weight)
    }

    /// JSON array of `{"q","t","h","x","c"}` records in canonical order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| json!({"q": m.q, "t": m.t, "h": m.h, "x": m.x, "c": c.to_json()}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, ctx: S::Ctx, window: Truncation) -> Option<Self> {
        let mut terms = Vec::new();
        for rec in v.as_array()? {
            let m = Monomial {
                q: rec.get("q")?.as_u64()? as u32,
                t: rec.get("t")?.as_i64()? as i32,
                h: rec.get("h")?.as_i64()? as i32,
                x: rec.get("x")?.as_u64()? as u32,
            };
            terms.push((m, S::from_json(rec.get("c")?, ctx)?));
        }
        Self::from_terms(terms, ctx, window).ok()
    }

    /// Human-facing rendering, e.g. `4·t^2·h^1 q^3 + ...`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = c.to_string();
                if m.t != 0 {
                    s += &format!("·t^{}", m.t);
                }
                if m.h != 0 {
                    s += &format!("·h^{}", m.h);
                }
                if m.x != 0 {
                    s += &format!("·x^{}", m.x);
                }
                if m.q != 0 {
                    s += &format!(" q^{}", m.q);
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

/// Exact product truncated to the intersection window.
pub fn series_mul<S: Scalar>(a: &GradedSeries<S>, b: &GradedSeries<S>) -> Result<GradedSeries<S>> {
    a.mul(b)
}

/// Two-sided inverse in the `var`-adic completion, up to truncation.
pub fn series_inv_unit<S: Scalar>(a: &GradedSeries<S>, var: AdicVar) -> Result<GradedSeries<S>> {
    a.inv_unit(var)
}

/// Specialize `h = μ t`.
pub fn substitute_h<S: Scalar>(s: &GradedSeries<S>, mu: &S) -> Result<GradedSeries<S>> {
    s.substitute_h(mu)
}

/// True iff every monomial has `t`-plus-`h` weight `weight` (`x` counted too, `q` weightless).
pub fn homogeneity_check<S: Scalar>(s: &GradedSeries<S>, weight: i64) -> bool {
    s.is_homogeneous(weight)
}

/// `numerator · ∏ (x + c_i t)^{-m_i}`, expanded `x`-adically on demand.
#[derive(Debug, Clone)]
pub struct FactoredRationalFn<S: Scalar> {
    pub numerator: GradedSeries<S>,
    pub denominator_factors: Vec<(S, u32)>,
}

impl<S: Scalar> FactoredRationalFn<S> {
    pub fn new(numerator: GradedSeries<S>) -> Self {
        Self { numerator, denominator_factors: Vec::new() }
    }

    /// Append a factor `(x + c t)^{-m}`.
    pub fn divide_by(mut self, c: S, m: u32) -> Self {
        self.denominator_factors.push((c, m));
        self
    }

    /// Coefficient of `x^k`. Each `(x + ct)^{-m}` is expanded in closed form as
    /// `Σ_n binom(-m, n) c^{-m-n} t^{-m-n} x^n`.
    pub fn coeff_x(&self, k: u32) -> Result<GradedSeries<S>> {
        let num = &self.numerator;
        if k > num.window.x_max {
            return Err(Error::TruncationTooShallow(format!("x^{k} beyond numerator window")));
        }
        let ctx = num.ctx;
        let mut w = num.window.with_x_max(k);
        w.t_min = i32::MIN;
        let mut acc = num.restrict(Truncation::UNBOUNDED.with_x_max(k))?.with_window(w)?;
        for (c, m) in &self.denominator_factors {
            let cinv = c.checked_inv().ok_or_else(|| Error::NotAUnit("factor x + 0·t".into()))?;
            let m = *m as i64;
            let mut terms = Vec::with_capacity(k as usize + 1);
            for n in 0..=k as i64 {
                let b = S::from_bigint(&binom_int(-m, n), ctx);
                let e = (m + n) as u32;
                terms.push((Monomial::new(0, -(m + n) as i32, 0, n as u32), b * cinv.clone().pow(e)));
            }
            acc = acc.mul(&GradedSeries::from_terms(terms, ctx, Truncation::UNBOUNDED.with_x_max(k))?)?;
        }
        let mut out = acc.coeff_x_plain(k);
        let mut ow = num.window;
        ow.t_min = i32::MIN;
        ow.h_max = out.window.h_max;
        out.window = ow;
        Ok(out)
    }
}

/// Free-function form of [`FactoredRationalFn::coeff_x`].
pub fn coeff_x<S: Scalar>(f: &FactoredRationalFn<S>, k: u32) -> Result<GradedSeries<S>> {
    f.coeff_x(k)
}

/// Basis in which a 2×2 endomorphism is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `(1, b)`.
    Geometric,
    /// `(b - h, b)`.
    Stable,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::Geometric => "geometric",
            Basis::Stable => "stable",
        }
    }
}

/// 2×2 matrix of series acting on column vectors; column `j` is the image of basis vector `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Endo2<S: Scalar> {
    entries: [[GradedSeries<S>; 2]; 2],
    basis: Basis,
}

impl<S: Scalar> Endo2<S> {
    /// All entries are restricted to their common window.
    pub fn new(entries: [[GradedSeries<S>; 2]; 2], basis: Basis) -> Result<Self> {
        let ctx = entries[0][0].ctx;
        let mut w = Truncation::UNBOUNDED;
        for e in entries.iter().flatten() {
            if e.ctx != ctx {
                return Err(Error::RingMismatch);
            }
            w = w.intersect(e.window);
        }
        let [[a, b], [c, d]] = entries;
        Ok(Self { entries: [[a.restrict(w)?, b.restrict(w)?], [c.restrict(w)?, d.restrict(w)?]], basis })
    }

    pub fn zero(ctx: S::Ctx, window: Truncation, basis: Basis) -> Self {
        let z = GradedSeries::zero(ctx, window);
        Self { entries: [[z.clone(), z.clone()], [z.clone(), z]], basis }
    }

    pub fn identity(ctx: S::Ctx, window: Truncation, basis: Basis) -> Self {
        let z = GradedSeries::zero(ctx, window);
        let o = GradedSeries::one(ctx, window);
        Self { entries: [[o.clone(), z.clone()], [z, o]], basis }
    }

    /// Constant matrix `[[a, b], [c, d]]` times the monomial `m`, exact in every variable.
    pub fn from_monomials(ctx: S::Ctx, rows: [[(i64, Monomial); 2]; 2], window: Truncation, basis: Basis) -> Result<Self> {
        let mk = |(c, m): (i64, Monomial)| GradedSeries::monomial(S::from_int(c, ctx), m, window);
        let [[a, b], [c, d]] = rows;
        Self::new([[mk(a)?, mk(b)?], [mk(c)?, mk(d)?]], basis)
    }

    pub fn entry(&self, i: usize, j: usize) -> &GradedSeries<S> {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[[GradedSeries<S>; 2]; 2] {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn window(&self) -> Truncation {
        self.entries[0][0].window
    }

    pub fn ctx(&self) -> S::Ctx {
        self.entries[0][0].ctx
    }

    /// Same entries, relabelled basis (for matrices that are literally equal in both).
    pub fn retag(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    fn same_basis(&self, o: &Self) -> Result<()> {
        if self.basis == o.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    pub fn try_map(&self, f: impl Fn(&GradedSeries<S>) -> Result<GradedSeries<S>>) -> Result<Self> {
        let e = &self.entries;
        Self::new([[f(&e[0][0])?, f(&e[0][1])?], [f(&e[1][0])?, f(&e[1][1])?]], self.basis)
    }

    fn zip(&self, o: &Self, f: impl Fn(&GradedSeries<S>, &GradedSeries<S>) -> Result<GradedSeries<S>>) -> Result<Self> {
        self.same_basis(o)?;
        let (a, b) = (&self.entries, &o.entries);
        Self::new(
            [[f(&a[0][0], &b[0][0])?, f(&a[0][1], &b[0][1])?], [f(&a[1][0], &b[1][0])?, f(&a[1][1], &b[1][1])?]],
            self.basis,
        )
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_basis(o)?;
        let (a, b) = (&self.entries, &o.entries);
        let cell = |i: usize, j: usize| a[i][0].mul(&b[0][j])?.add(&a[i][1].mul(&b[1][j])?);
        Self::new([[cell(0, 0)?, cell(0, 1)?], [cell(1, 0)?, cell(1, 1)?]], self.basis)
    }

    /// `[self, o] = self·o - o·self`.
    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    /// Multiply every entry by the series `s`.
    pub fn scale_series(&self, s: &GradedSeries<S>) -> Result<Self> {
        self.try_map(|e| e.mul(s))
    }

    pub fn scale(&self, c: &S) -> Result<Self> {
        self.try_map(|e| Ok(e.scale(c)))
    }

    pub fn trace(&self) -> Result<GradedSeries<S>> {
        self.entries[0][0].add(&self.entries[1][1])
    }

    pub fn q_derivative(&self) -> Result<Self> {
        self.try_map(|e| Ok(e.q_derivative()))
    }

    pub fn restrict(&self, w: Truncation) -> Result<Self> {
        self.try_map(|e| e.restrict(w))
    }

    pub fn coeff_q(&self, d: u32) -> Result<Self> {
        self.try_map(|e| Ok(e.coeff_q(d)))
    }

    pub fn substitute_h(&self, mu: &S) -> Result<Self> {
        self.try_map(|e| e.substitute_h(mu))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    /// `{"basis": ..., "entries": [[s, s], [s, s]]}`.
    pub fn to_json(&self) -> Value {
        let e = &self.entries;
        json!({
            "basis": self.basis.as_str(),
            "entries": [[e[0][0].to_json(), e[0][1].to_json()], [e[1][0].to_json(), e[1][1].to_json()]],
        })
    }

    pub fn from_json(v: &Value, ctx: S::Ctx, window: Truncation) -> Option<Self> {
        let basis = match v.get("basis")?.as_str()? {
            "geometric" => Basis::Geometric,
            "stable" => Basis::Stable,
            _ => return None,
        };
        let rows = v.get("entries")?.as_array()?;
        let cell = |i: usize, j: usize| GradedSeries::from_json(rows.get(i)?.get(j)?, ctx, window);
        Self::new([[cell(0, 0)?, cell(0, 1)?], [cell(1, 0)?, cell(1, 1)?]], basis).ok()
    }
}

/// Reduce a rational series into F_p; fails if a denominator is divisible by `p`.
pub fn reduce_series_mod_p(s: &GradedSeries<BigRational>, p: PrimeModulus) -> Result<GradedSeries<FieldElement>> {
    let terms = s.terms().map(|(m, c)| Ok((*m, reduce_rational(c, p)?))).collect::<Result<Vec<_>>>()?;
    GradedSeries::from_terms(terms, p, s.window())
}

/// Entrywise [`reduce_series_mod_p`].
pub fn reduce_endo_mod_p(e: &Endo2<BigRational>, p: PrimeModulus) -> Result<Endo2<FieldElement>> {
    let r = |i: usize, j: usize| reduce_series_mod_p(e.entry(i, j), p);
    Endo2::new([[r(0, 0)?, r(0, 1)?], [r(1, 0)?, r(1, 1)?]], e.basis())
}

/// `Σ_{k=1}^{q_max} q^k`, i.e. `q/(1-q)` expanded through `series_inv_unit`.
pub fn q_over_one_minus_q<S: Scalar>(ctx: S::Ctx, window: Truncation) -> Result<GradedSeries<S>> {
    let w = Truncation::UNBOUNDED.with_q_max(window.q_max).with_x_max(window.x_max);
    let one_minus_q = GradedSeries::from_terms(
        [(Monomial::ONE, S::one(ctx)), (Monomial::q(1), -S::one(ctx))],
        ctx,
        w,
    )?;
    one_minus_q.inv_unit(AdicVar::Q)?.mul_monomial(&S::one(ctx), Monomial::q(1))?.restrict(window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{FieldElement, PrimeModulus};
    use num_rational::BigRational;

    type F = FieldElement;

    fn p5() -> PrimeModulus {
        PrimeModulus::new(5).unwrap()
    }

    fn w() -> Truncation {
        Truncation::UNBOUNDED.with_q_max(6).with_x_max(6)
    }

    #[test]
    fn unit_and_geometric_series() {
        let p = p5();
        let one = GradedSeries::<F>::one(p, w());
        let s = GradedSeries::from_terms([(Monomial::new(2, 1, -1, 0), p.elem(3))], p, w()).unwrap();
        assert_eq!(one.mul(&s).unwrap(), s);
        let omq = GradedSeries::from_terms([(Monomial::ONE, p.elem(1)), (Monomial::q(1), p.elem(-1))], p, w()).unwrap();
        let geo = omq.inv_unit(AdicVar::Q).unwrap();
        assert_eq!(geo.len(), 7);
        assert_eq!(omq.mul(&geo).unwrap(), one);
    }

    #[test]
    fn connection_entry_expansion() {
        let p = p5();
        let win = Truncation::UNBOUNDED.with_q_max(3);
        let e = q_over_one_minus_q::<F>(p, win).unwrap().mul_monomial(&p.elem(1), Monomial::h(2)).unwrap();
        let expect = GradedSeries::from_terms((1..=3).map(|d| (Monomial::new(d, 0, 2, 0), p.elem(1))), p, win).unwrap();
        assert_eq!(e.restrict(win).unwrap().terms().collect::<Vec<_>>(), expect.terms().collect::<Vec<_>>());
    }

    #[test]
    fn x_adic_inverse_of_square() {
        let ctx = ();
        let win = Truncation::UNBOUNDED.with_x_max(5);
        let xt = GradedSeries::<BigRational>::from_terms(
            [(Monomial::x(1), BigRational::from_int(1, ctx)), (Monomial::t(1), BigRational::from_int(1, ctx))],
            ctx,
            win,
        )
        .unwrap();
        let sq = xt.mul(&xt).unwrap();
        let inv = sq.inv_unit(AdicVar::X).unwrap();
        assert_eq!(inv.coeff(Monomial::t(-2)), BigRational::from_int(1, ctx));
        assert_eq!(inv.coeff(Monomial::new(0, -3, 0, 1)), BigRational::from_int(-2, ctx));
        assert_eq!(inv.coeff(Monomial::new(0, -4, 0, 2)), BigRational::from_int(3, ctx));
        assert_eq!(sq.mul(&inv).unwrap(), GradedSeries::one(ctx, win));
    }

    #[test]
    fn coeff_x_examples() {
        let p = p5();
        let num = GradedSeries::<F>::one(p, w());
        let f = FactoredRationalFn::new(num).divide_by(p.elem(1), 2);
        assert_eq!(f.coeff_x(0).unwrap().coeff(Monomial::t(-2)), p.elem(1));
        assert_eq!(f.coeff_x(1).unwrap().coeff(Monomial::t(-3)), p.elem(-2));
        let num = GradedSeries::from_terms([(Monomial::x(4), p.elem(2)), (Monomial::new(0, 1, 0, 5), p.elem(1))], p, w()).unwrap();
        let f = FactoredRationalFn::new(num).divide_by(p.elem(3), 1);
        for k in 0..4 {
            assert!(f.coeff_x(k).unwrap().is_zero());
        }
        let bad = FactoredRationalFn::new(GradedSeries::one(p, w())).divide_by(p.elem(0), 1);
        assert!(matches!(bad.coeff_x(0), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn substitute_h_examples() {
        let p = p5();
        let win = Truncation::UNBOUNDED;
        let s = GradedSeries::monomial(p.elem(1), Monomial::new(0, 4, 1, 0), win).unwrap();
        let r = s.substitute_h(&p.elem(3)).unwrap();
        assert_eq!(r.coeff(Monomial::t(5)), p.elem(3));
        let c = GradedSeries::from_terms([(Monomial::h(2), p.elem(1)), (Monomial::t(2), p.elem(-1))], p, win).unwrap();
        assert!(c.substitute_h(&p.elem(1)).unwrap().is_zero());
        let trunc = c.restrict(Truncation::UNBOUNDED.with_h_max(4)).unwrap();
        assert_eq!(trunc.substitute_h(&p.elem(1)), Err(Error::InexactSpecialization));
    }

    #[test]
    fn homogeneity() {
        let p = p5();
        let s = GradedSeries::monomial(p.elem(1), Monomial::new(0, 4, 1, 0), Truncation::UNBOUNDED).unwrap();
        assert!(homogeneity_check(&s, 5));
        let mixed = GradedSeries::from_terms([(Monomial::ONE, p.elem(1)), (Monomial::t(1), p.elem(1))], p, Truncation::UNBOUNDED).unwrap();
        assert!(!homogeneity_check(&mixed, 0));
        assert!(!homogeneity_check(&mixed, 1));
    }

    #[test]
    fn negative_h_shrinks_precision() {
        let p = p5();
        let a = GradedSeries::<F>::monomial(p.elem(1), Monomial::h(-1), Truncation::UNBOUNDED).unwrap();
        let b = GradedSeries::from_terms([(Monomial::h(1), p.elem(1)), (Monomial::h(4), p.elem(2))], p, Truncation::UNBOUNDED.with_h_max(4)).unwrap();
        assert_eq!(a.mul(&b).unwrap().window().h_max, 3);
    }

    #[test]
    fn floors_are_errors() {
        let p = p5();
        let s = GradedSeries::<F>::monomial(p.elem(1), Monomial::t(-3), Truncation::default_for(5)).unwrap();
        assert!(matches!(s.mul(&s).unwrap().mul(&s).unwrap().mul(&s), Err(Error::FloorUnderflow(_))));
    }

    #[test]
    fn json_round_trip_and_order() {
        let p = p5();
        let s = GradedSeries::from_terms(
            [(Monomial::new(1, 2, 0, 0), p.elem(1)), (Monomial::new(0, 1, 1, 0), p.elem(4)), (Monomial::new(0, 3, -1, 0), p.elem(2))],
            p,
            Truncation::UNBOUNDED,
        )
        .unwrap();
        let j = s.to_json();
        let hs: Vec<i64> = j.as_array().unwrap().iter().map(|r| r["h"].as_i64().unwrap()).collect();
        assert_eq!(hs, vec![-1, 1, 0]);
        assert_eq!(GradedSeries::from_json(&j, p, Truncation::UNBOUNDED), Some(s));
    }

    #[test]
    fn ring_mismatch() {
        let a = GradedSeries::<F>::one(p5(), w());
        let b = GradedSeries::<F>::one(PrimeModulus::new(7).unwrap(), w());
        assert_eq!(a.mul(&b), Err(Error::RingMismatch));
    }

    #[test]
    fn endo_basis_guard() {
        let p = p5();
        let a = Endo2::<F>::identity(p, w(), Basis::Geometric);
        let b = Endo2::<F>::identity(p, w(), Basis::Stable);
        assert_eq!(a.mul(&b), Err(Error::BasisMismatch));
        assert!(a.commutator(&a).unwrap().is_zero());
    }
}
