//! Truncated bimoulds: depth-indexed polynomial coefficient tables.
//!
//! A bimould assigns to every depth `d` a polynomial in the variables
//! `X_1, Y_1, ..., X_d, Y_d` with coefficients in a ring `R` (rationals,
//! q-series, or word-algebra elements). [`TruncBimould`] stores these
//! polynomials sparsely and truncated: a monomial of total degree `t` in the
//! depth-`d` part has weight `t + d`, and only monomials of weight at most
//! `weight_bound` are kept. Every operation in this module maps weight-`w`
//! monomials to weight-`w` monomials (variable substitutions are linear,
//! divided differences trade one X-degree for one depth), so the window is
//! preserved exactly: inside it all coefficients are exact, outside it
//! nothing is claimed.
//!
//! The product symmetry checkers expand a two-sided block recursion: for the
//! stuffle flavor blocks are prepended on the left and a prepended block
//! keeps its own Y variable, while for the balanced flavor blocks are
//! appended on the right and an appended block carries the sum of the two
//! current trailing Y variables. In both flavors the third branch is a
//! divided difference in the two X variables, computed by exact polynomial
//! division by `X_i - X_j`.

use num_traits::{One, Zero};
use serde_json::{json, Map as JsonMap, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use crate::qseries::QSeries;
use crate::quasishuffle::{engine, ProductId};
use crate::rational::Q;
use crate::words::LinComb;
use crate::{CoreError, Result};

/// Exponent vector of a depth-`d` monomial: `[e_1, f_1, ..., e_d, f_d]`
/// where `e_i` is the exponent of `X_i` and `f_i` that of `Y_i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    /// The constant monomial at depth `d`.
    pub fn zero(d: usize) -> Self {
        Mono(vec![0; 2 * d])
    }

    /// Depth of the variable space this monomial lives in.
    pub fn depth(&self) -> usize {
        self.0.len() / 2
    }

    pub fn x_exp(&self, slot: usize) -> u16 {
        self.0[2 * slot]
    }

    pub fn y_exp(&self, slot: usize) -> u16 {
        self.0[2 * slot + 1]
    }

    /// Total degree.
    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Weight of the monomial as a bimould entry: total degree plus depth.
    pub fn weight(&self) -> u32 {
        self.total_degree() + self.depth() as u32
    }

    /// Concatenate the variable blocks of two monomials.
    pub fn concat(&self, other: &Mono) -> Mono {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Mono(v)
    }

    /// Parse `"e1,f1,e2,f2"`; the empty string is the depth-0 monomial.
    pub fn parse(s: &str) -> Result<Mono> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(Mono(Vec::new()));
        }
        let mut v = Vec::new();
        for part in t.split(',') {
            let e: u16 = part.trim().parse().map_err(|_| {
                CoreError::Parse(format!("bad exponent '{}' in monomial '{s}'", part.trim()))
            })?;
            v.push(e);
        }
        if v.len() % 2 != 0 {
            return Err(CoreError::Parse(format!(
                "monomial '{s}' needs an even number of exponents"
            )));
        }
        Ok(Mono(v))
    }

    /// Key form used by the JSON mould format: `"e1,f1,e2,f2"`.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&e| e == 0) {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for slot in 0..self.depth() {
            for (name, e) in [("X", self.x_exp(slot)), ("Y", self.y_exp(slot))] {
                if e == 1 {
                    parts.push(format!("{name}{}", slot + 1));
                } else if e > 1 {
                    parts.push(format!("{name}{}^{e}", slot + 1));
                }
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Coefficient ring abstraction for bimoulds. Operations must be total on
/// the values actually combined; q-series combine on the overlap of their
/// windows.
pub trait CoeffRing: Clone + PartialEq + fmt::Debug {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Q) -> Self;
    fn is_zero(&self) -> bool;
    /// Human-readable form for failure reports.
    fn show(&self) -> String;
}

impl CoeffRing for Q {
    fn add(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn sub(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn scale(&self, c: &Q) -> Self {
        self.clone() * c.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn show(&self) -> String {
        self.to_string()
    }
}

impl CoeffRing for QSeries {
    fn add(&self, other: &Self) -> Self {
        QSeries::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        QSeries::sub(self, other)
    }
    fn neg(&self) -> Self {
        QSeries::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        QSeries::mul(self, other)
    }
    fn scale(&self, c: &Q) -> Self {
        QSeries::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        QSeries::is_zero(self)
    }
    fn show(&self) -> String {
        self.to_string()
    }
}

/// A way of multiplying word linear combinations, fixed at the type level so
/// that [`WordCoeff`] is a coefficient ring.
pub trait WordProduct: Clone + PartialEq + fmt::Debug + 'static {
    fn mul_words(a: &LinComb, b: &LinComb) -> LinComb;
}

/// Balanced quasi-shuffle multiplication of word coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MulBalanced;
impl WordProduct for MulBalanced {
    fn mul_words(a: &LinComb, b: &LinComb) -> LinComb {
        engine()
            .product_lin(ProductId::Balanced, a, b)
            .expect("balanced-alphabet words")
    }
}

/// Bi-index stuffle multiplication of word coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MulStuffleYbi;
impl WordProduct for MulStuffleYbi {
    fn mul_words(a: &LinComb, b: &LinComb) -> LinComb {
        engine()
            .product_lin(ProductId::StuffleYbi, a, b)
            .expect("bi-index-alphabet words")
    }
}

/// Concatenation of word coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MulConcat;
impl WordProduct for MulConcat {
    fn mul_words(a: &LinComb, b: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (u, cu) in a.iter() {
            for (v, cv) in b.iter() {
                out.add_term(u.concat(v), cu.clone() * cv.clone());
            }
        }
        out
    }
}

/// Word linear combinations as bimould coefficients, multiplied by `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordCoeff<P: WordProduct> {
    pub lc: LinComb,
    _marker: PhantomData<P>,
}

impl<P: WordProduct> WordCoeff<P> {
    pub fn new(lc: LinComb) -> Self {
        WordCoeff {
            lc,
            _marker: PhantomData,
        }
    }
}

impl<P: WordProduct> CoeffRing for WordCoeff<P> {
    fn add(&self, other: &Self) -> Self {
        Self::new(self.lc.add(&other.lc))
    }
    fn sub(&self, other: &Self) -> Self {
        Self::new(self.lc.sub(&other.lc))
    }
    fn neg(&self) -> Self {
        Self::new(self.lc.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        Self::new(P::mul_words(&self.lc, &other.lc))
    }
    fn scale(&self, c: &Q) -> Self {
        Self::new(self.lc.scale(c))
    }
    fn is_zero(&self) -> bool {
        self.lc.is_zero()
    }
    fn show(&self) -> String {
        self.lc.to_string()
    }
}

/// Sparse polynomial with [`Mono`] keys and ring coefficients. All
/// monomials of one polynomial share a variable space (equal vector
/// length); the mould product concatenates spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly<R: CoeffRing> {
    terms: BTreeMap<Mono, R>,
}

impl<R: CoeffRing> Default for SparsePoly<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: CoeffRing> SparsePoly<R> {
    pub fn zero() -> Self {
        SparsePoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_term(mono: Mono, r: R) -> Self {
        let mut p = Self::zero();
        p.add_term(mono, r);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn get(&self, mono: &Mono) -> Option<&R> {
        self.terms.get(mono)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &R)> {
        self.terms.iter()
    }

    /// Add `r` at `mono`, dropping the entry if it cancels.
    pub fn add_term(&mut self, mono: Mono, r: R) {
        if r.is_zero() {
            return;
        }
        match self.terms.remove(&mono) {
            None => {
                self.terms.insert(mono, r);
            }
            Some(old) => {
                let sum = old.add(&r);
                if !sum.is_zero() {
                    self.terms.insert(mono, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, r) in other.iter() {
            out.add_term(m.clone(), r.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, r) in other.iter() {
            out.add_term(m.clone(), r.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            terms: self.terms.iter().map(|(m, r)| (m.clone(), r.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if Zero::is_zero(c) {
            return Self::zero();
        }
        SparsePoly {
            terms: self
                .terms
                .iter()
                .map(|(m, r)| (m.clone(), r.scale(c)))
                .collect(),
        }
    }

    pub fn scale_ring(&self, c: &R) -> Self {
        let mut out = Self::zero();
        for (m, r) in self.iter() {
            out.add_term(m.clone(), r.mul(c));
        }
        out
    }

    /// Product within a shared variable space, keeping only monomials of
    /// total degree at most `degree_cap` when a cap is given.
    pub fn mul(&self, other: &Self, degree_cap: Option<u32>) -> Self {
        let mut out = Self::zero();
        for (ma, ra) in self.iter() {
            for (mb, rb) in other.iter() {
                let mono = Mono(
                    ma.0.iter()
                        .zip(mb.0.iter())
                        .map(|(&x, &y)| x + y)
                        .collect(),
                );
                if let Some(cap) = degree_cap {
                    if mono.total_degree() > cap {
                        continue;
                    }
                }
                out.add_term(mono, ra.mul(rb));
            }
        }
        out
    }

    /// Product that concatenates the variable blocks of the factors (the
    /// depth-part product of moulds).
    pub fn mul_concat(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ra) in self.iter() {
            for (mb, rb) in other.iter() {
                out.add_term(ma.concat(mb), ra.mul(rb));
            }
        }
        out
    }

    /// Same-space product with a rational polynomial; coefficient products
    /// are scalings, which is much cheaper than generic ring products when
    /// `R` is a series type.
    pub fn mul_q(&self, other: &SparsePoly<Q>, degree_cap: Option<u32>) -> Self {
        let mut out = Self::zero();
        for (ma, ra) in self.iter() {
            for (mb, c) in other.iter() {
                debug_assert_eq!(ma.0.len(), mb.0.len());
                let mono = Mono(
                    ma.0.iter()
                        .zip(mb.0.iter())
                        .map(|(&x, &y)| x + y)
                        .collect(),
                );
                if let Some(cap) = degree_cap {
                    if mono.total_degree() > cap {
                        continue;
                    }
                }
                out.add_term(mono, ra.scale(c));
            }
        }
        out
    }

    /// Block-concatenating product with a rational polynomial on the right.
    pub fn mul_concat_q(&self, other: &SparsePoly<Q>) -> Self {
        let mut out = Self::zero();
        for (ma, ra) in self.iter() {
            for (mb, c) in other.iter() {
                out.add_term(ma.concat(mb), ra.scale(c));
            }
        }
        out
    }

    pub fn map_coeffs<S: CoeffRing>(&self, f: impl Fn(&R) -> S) -> SparsePoly<S> {
        let mut out = SparsePoly::zero();
        for (m, r) in self.iter() {
            out.add_term(m.clone(), f(r));
        }
        out
    }

    /// Keep only monomials accepted by the filter.
    pub fn filter_monos(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        SparsePoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, r)| (m.clone(), r.clone()))
                .collect(),
        }
    }

    /// Apply a linear variable substitution. Substitutions send variables to
    /// linear forms, so total degree is preserved termwise.
    pub fn substitute(&self, subst: &Subst) -> Self {
        let mut out = Self::zero();
        for (mono, coeff) in self.iter() {
            let mut expansion = SparsePoly::<Q>::from_term(
                Mono(vec![0; subst.target_len]),
                Q::one(),
            );
            for (var, &exp) in mono.0.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                let powed = linear_power(&subst.assigns[var], exp, subst.target_len);
                expansion = expansion.mul(&powed, None);
            }
            for (tmono, qc) in expansion.iter() {
                out.add_term(tmono.clone(), coeff.scale(qc));
            }
        }
        out
    }
}

/// Linear substitution: every source variable is sent to a signed sum of
/// target variables.
#[derive(Debug, Clone)]
pub struct Subst {
    /// `assigns[v]` is the image of source variable `v` as a list of
    /// `(coefficient, target variable)` pairs.
    pub assigns: Vec<Vec<(i64, usize)>>,
    /// Length of the target exponent vectors.
    pub target_len: usize,
}

/// Expand `(sum_i c_i t_{v_i})^e` as a sparse polynomial over the rationals.
pub(crate) fn linear_power(form: &[(i64, usize)], e: u16, target_len: usize) -> SparsePoly<Q> {
    let mut acc = SparsePoly::<Q>::from_term(Mono(vec![0; target_len]), Q::one());
    let base: Vec<(Q, usize)> = form
        .iter()
        .map(|&(c, v)| (Q::from_integer(c.into()), v))
        .collect();
    for _ in 0..e {
        let mut next = SparsePoly::<Q>::zero();
        for (m, r) in acc.iter() {
            for (c, v) in &base {
                let mut mono = m.clone();
                mono.0[*v] += 1;
                next.add_term(mono, r.clone() * c.clone());
            }
        }
        acc = next;
    }
    acc
}

/// Exact division of `poly` by `(t_{vi} - t_{vj})`, where `vi`, `vj` index
/// variables of the shared space. Fails with
/// [`CoreError::DivisionRemainder`] if the division is not exact.
pub fn div_exact_var_diff<R: CoeffRing>(
    poly: &SparsePoly<R>,
    vi: usize,
    vj: usize,
) -> Result<SparsePoly<R>> {
    if poly.is_zero() {
        return Ok(SparsePoly::zero());
    }
    // Group by the exponent of t_vi.
    let mut layers: BTreeMap<u16, SparsePoly<R>> = BTreeMap::new();
    for (m, r) in poly.iter() {
        let e = m.0[vi];
        let mut rest = m.clone();
        rest.0[vi] = 0;
        layers
            .entry(e)
            .or_insert_with(SparsePoly::zero)
            .add_term(rest, r.clone());
    }
    let top = *layers.keys().next_back().unwrap();
    let shift_j = |p: &SparsePoly<R>| -> SparsePoly<R> {
        let mut out = SparsePoly::zero();
        for (m, r) in p.iter() {
            let mut mono = m.clone();
            mono.0[vj] += 1;
            out.add_term(mono, r.clone());
        }
        out
    };
    // Quotient layers from the top down: Q_{e-1} = A_e + t_vj * Q_e.
    let mut quotient_layers: BTreeMap<u16, SparsePoly<R>> = BTreeMap::new();
    let mut carry = SparsePoly::<R>::zero(); // Q_e while descending
    for e in (1..=top).rev() {
        let a_e = layers.get(&e).cloned().unwrap_or_default();
        let q = a_e.add(&shift_j(&carry));
        quotient_layers.insert(e - 1, q.clone());
        carry = q;
    }
    let a_0 = layers.get(&0).cloned().unwrap_or_default();
    let remainder = a_0.add(&shift_j(&carry));
    if !remainder.is_zero() {
        return Err(CoreError::DivisionRemainder(format!(
            "remainder with {} terms dividing by (t{vi} - t{vj})",
            remainder.num_terms()
        )));
    }
    let mut out = SparsePoly::zero();
    for (e, layer) in quotient_layers {
        for (m, r) in layer.iter() {
            let mut mono = m.clone();
            mono.0[vi] += e;
            out.add_term(mono, r.clone());
        }
    }
    Ok(out)
}

/// Depth-indexed truncated bimould.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncBimould<R: CoeffRing> {
    parts: Vec<SparsePoly<R>>,
    weight_bound: u32,
}

impl<R: CoeffRing> TruncBimould<R> {
    /// The zero bimould with the given bounds.
    pub fn zero(depth_bound: usize, weight_bound: u32) -> Self {
        TruncBimould {
            parts: vec![SparsePoly::zero(); depth_bound + 1],
            weight_bound,
        }
    }

    /// Assemble from per-depth parts, dropping anything outside the weight
    /// window.
    pub fn from_parts(parts: Vec<SparsePoly<R>>, weight_bound: u32) -> Self {
        let mut m = TruncBimould {
            parts,
            weight_bound,
        };
        m.enforce_window();
        m
    }

    fn enforce_window(&mut self) {
        let wb = self.weight_bound;
        for p in &mut self.parts {
            *p = p.filter_monos(|m| m.weight() <= wb);
        }
    }

    pub fn depth_bound(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn weight_bound(&self) -> u32 {
        self.weight_bound
    }

    pub fn part(&self, d: usize) -> &SparsePoly<R> {
        &self.parts[d]
    }

    /// Add a coefficient, silently dropping monomials outside the window
    /// (that is what truncation means). Panics if the monomial depth does
    /// not match `d`.
    pub fn add_term(&mut self, d: usize, mono: Mono, r: R) {
        assert_eq!(mono.depth(), d, "monomial depth mismatch");
        if d > self.depth_bound() || mono.weight() > self.weight_bound {
            return;
        }
        self.parts[d].add_term(mono, r);
    }

    /// Checked coefficient read: `Ok(None)` means zero inside the window,
    /// an error means the request left the window.
    pub fn coeff(&self, d: usize, mono: &Mono) -> Result<Option<&R>> {
        if d > self.depth_bound() {
            return Err(CoreError::WindowExceeded(format!(
                "depth {d} beyond bound {}",
                self.depth_bound()
            )));
        }
        if mono.weight() > self.weight_bound {
            return Err(CoreError::WindowExceeded(format!(
                "monomial of weight {} beyond bound {}",
                mono.weight(),
                self.weight_bound
            )));
        }
        Ok(self.parts[d].get(mono))
    }

    pub fn add(&self, other: &Self) -> Self {
        let db = self.depth_bound().min(other.depth_bound());
        let wb = self.weight_bound.min(other.weight_bound);
        let parts = (0..=db)
            .map(|d| self.parts[d].add(&other.parts[d]))
            .collect();
        TruncBimould::from_parts(parts, wb)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let db = self.depth_bound().min(other.depth_bound());
        let wb = self.weight_bound.min(other.weight_bound);
        let parts = (0..=db)
            .map(|d| self.parts[d].sub(&other.parts[d]))
            .collect();
        TruncBimould::from_parts(parts, wb)
    }

    pub fn scale(&self, c: &Q) -> Self {
        TruncBimould {
            parts: self.parts.iter().map(|p| p.scale(c)).collect(),
            weight_bound: self.weight_bound,
        }
    }

    /// Mould product: the depth-`d` part of the result is the sum over
    /// splits `d = i + (d-i)` of the block-concatenated products of parts.
    pub fn mould_mul(&self, other: &Self) -> Self {
        let db = self.depth_bound().min(other.depth_bound());
        let wb = self.weight_bound.min(other.weight_bound);
        let mut out = TruncBimould::zero(db, wb);
        for d in 0..=db {
            let mut acc = SparsePoly::zero();
            for i in 0..=d {
                acc = acc.add(&self.parts[i].mul_concat(&other.parts[d - i]));
            }
            out.parts[d] = acc;
        }
        out.enforce_window();
        out
    }

    /// Mould product with a rational bimould on the right: depth `d` of the
    /// result collects `self` on the first `i` variable pairs times `other`
    /// on the remaining `d - i` pairs.
    pub fn mould_mul_q(&self, other: &TruncBimould<Q>) -> Self {
        let db = self.depth_bound().min(other.depth_bound());
        let wb = self.weight_bound.min(other.weight_bound);
        let mut out = TruncBimould::zero(db, wb);
        for d in 0..=db {
            let mut acc = SparsePoly::zero();
            for i in 0..=d {
                acc = acc.add(&self.parts[i].mul_concat_q(&other.parts[d - i]));
            }
            out.parts[d] = acc;
        }
        out.enforce_window();
        out
    }

    /// Apply a per-depth linear substitution.
    pub fn substitute(&self, make: impl Fn(usize) -> Subst) -> Self {
        let parts = (0..=self.depth_bound())
            .map(|d| {
                if d == 0 {
                    self.parts[0].clone()
                } else {
                    self.parts[d].substitute(&make(d))
                }
            })
            .collect();
        TruncBimould {
            parts,
            weight_bound: self.weight_bound,
        }
    }

    /// Y-variable accumulation: the depth-`d` part becomes
    /// `M(X_1, ..., X_d; Y_1, Y_1+Y_2, ..., Y_1+...+Y_d)`.
    pub fn hash_y(&self) -> Self {
        self.substitute(subst_hash_y)
    }

    /// Inverse of [`TruncBimould::hash_y`]: `Y_i` is replaced by
    /// `Y_i - Y_{i-1}`.
    pub fn hash_y_inv(&self) -> Self {
        self.substitute(subst_hash_y_inv)
    }

    /// The swap involution:
    /// `M(Y_1+...+Y_d, ..., Y_1+Y_2, Y_1; X_d, X_{d-1}-X_d, ..., X_1-X_2)`.
    pub fn swap(&self) -> Self {
        self.substitute(subst_swap)
    }

    /// The tau involution: `M(Y_d, ..., Y_1; X_d, ..., X_1)`.
    pub fn tau(&self) -> Self {
        self.substitute(subst_tau)
    }

    pub fn map_coeffs<S: CoeffRing>(&self, f: impl Fn(&R) -> S) -> TruncBimould<S> {
        TruncBimould {
            parts: self.parts.iter().map(|p| p.map_coeffs(&f)).collect(),
            weight_bound: self.weight_bound,
        }
    }
}

/// Substitution sending slot variables to themselves (identity).
pub fn subst_identity(d: usize) -> Subst {
    Subst {
        assigns: (0..2 * d).map(|v| vec![(1, v)]).collect(),
        target_len: 2 * d,
    }
}

/// See [`TruncBimould::hash_y`].
pub fn subst_hash_y(d: usize) -> Subst {
    let mut assigns = Vec::with_capacity(2 * d);
    for slot in 0..d {
        assigns.push(vec![(1, 2 * slot)]);
        assigns.push((0..=slot).map(|j| (1, 2 * j + 1)).collect());
    }
    Subst {
        assigns,
        target_len: 2 * d,
    }
}

/// See [`TruncBimould::hash_y_inv`].
pub fn subst_hash_y_inv(d: usize) -> Subst {
    let mut assigns = Vec::with_capacity(2 * d);
    for slot in 0..d {
        assigns.push(vec![(1, 2 * slot)]);
        if slot == 0 {
            assigns.push(vec![(1, 1)]);
        } else {
            assigns.push(vec![(1, 2 * slot + 1), (-1, 2 * slot - 1)]);
        }
    }
    Subst {
        assigns,
        target_len: 2 * d,
    }
}

/// See [`TruncBimould::swap`].
pub fn subst_swap(d: usize) -> Subst {
    let mut assigns = Vec::with_capacity(2 * d);
    for slot in 0..d {
        // X_{slot+1} -> Y_1 + ... + Y_{d - slot}
        assigns.push((0..d - slot).map(|j| (1, 2 * j + 1)).collect());
        // Y_{slot+1} -> X_{d-slot} - X_{d-slot+1} (no second term when
        // slot = 0).
        let i = d - slot; // 1-based X index of the positive term
        if slot == 0 {
            assigns.push(vec![(1, 2 * (i - 1))]);
        } else {
            assigns.push(vec![(1, 2 * (i - 1)), (-1, 2 * i)]);
        }
    }
    Subst {
        assigns,
        target_len: 2 * d,
    }
}

/// See [`TruncBimould::tau`].
pub fn subst_tau(d: usize) -> Subst {
    let mut assigns = Vec::with_capacity(2 * d);
    for slot in 0..d {
        assigns.push(vec![(1, 2 * (d - 1 - slot) + 1)]);
        assigns.push(vec![(1, 2 * (d - 1 - slot))]);
    }
    Subst {
        assigns,
        target_len: 2 * d,
    }
}

/// Which block recursion a product symmetry check expands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductSymmetry {
    /// Prepend blocks on the left; a prepended block keeps its own Y
    /// variable. Matches the stuffle product on the bi-index alphabet.
    Stuffle,
    /// Append blocks on the right; an appended block carries the sum of the
    /// two current trailing Y variables. Matches the balanced product.
    Balanced,
}

/// X-variable content of one slot of an expansion term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum XSpec {
    Var(usize),
    DivDiff(usize, usize),
}

/// One slot of an expansion term: an X assignment and the set of original
/// Y indices summed in this slot.
#[derive(Debug, Clone)]
struct SlotSpec {
    x: XSpec,
    y: Vec<usize>,
}

#[derive(Debug, Clone)]
struct RecTerm {
    slots: Vec<SlotSpec>,
}

fn identity_slots(indices: &[usize]) -> Vec<SlotSpec> {
    indices
        .iter()
        .map(|&i| SlotSpec {
            x: XSpec::Var(i),
            y: vec![i],
        })
        .collect()
}

/// Expand the product `M(slots a) * M(slots b)` into recursion terms.
fn expand_recursion(flavor: ProductSymmetry, a: &[usize], b: &[usize]) -> Vec<RecTerm> {
    if a.is_empty() {
        return vec![RecTerm {
            slots: identity_slots(b),
        }];
    }
    if b.is_empty() {
        return vec![RecTerm {
            slots: identity_slots(a),
        }];
    }
    let mut out = Vec::new();
    match flavor {
        ProductSymmetry::Stuffle => {
            let (fa, fb) = (a[0], b[0]);
            for (slot, ra, rb) in [
                (
                    SlotSpec {
                        x: XSpec::Var(fa),
                        y: vec![fa],
                    },
                    &a[1..],
                    b,
                ),
                (
                    SlotSpec {
                        x: XSpec::Var(fb),
                        y: vec![fb],
                    },
                    a,
                    &b[1..],
                ),
                (
                    SlotSpec {
                        x: XSpec::DivDiff(fa, fb),
                        y: vec![fa, fb],
                    },
                    &a[1..],
                    &b[1..],
                ),
            ] {
                for term in expand_recursion(flavor, ra, rb) {
                    let mut slots = vec![slot.clone()];
                    slots.extend(term.slots);
                    out.push(RecTerm { slots });
                }
            }
        }
        ProductSymmetry::Balanced => {
            let (la, lb) = (*a.last().unwrap(), *b.last().unwrap());
            for (slot, ra, rb) in [
                (
                    SlotSpec {
                        x: XSpec::Var(la),
                        y: vec![la, lb],
                    },
                    &a[..a.len() - 1],
                    b,
                ),
                (
                    SlotSpec {
                        x: XSpec::Var(lb),
                        y: vec![la, lb],
                    },
                    a,
                    &b[..b.len() - 1],
                ),
                (
                    SlotSpec {
                        x: XSpec::DivDiff(la, lb),
                        y: vec![la, lb],
                    },
                    &a[..a.len() - 1],
                    &b[..b.len() - 1],
                ),
            ] {
                for term in expand_recursion(flavor, ra, rb) {
                    let mut slots = term.slots;
                    slots.push(slot.clone());
                    out.push(RecTerm { slots });
                }
            }
        }
    }
    out
}

/// Evaluate one expansion term against the depth-`len(slots)` part of `m`.
/// `d` is the depth of the full product (the target variable space).
fn eval_term<R: CoeffRing>(m: &TruncBimould<R>, term: &RecTerm, d: usize) -> Result<SparsePoly<R>> {
    // Handle at most one divided-difference slot directly; further ones are
    // resolved by recursion on term variants.
    if let Some(pos) = term
        .slots
        .iter()
        .position(|s| matches!(s.x, XSpec::DivDiff(_, _)))
    {
        let (i, j) = match term.slots[pos].x {
            XSpec::DivDiff(i, j) => (i, j),
            XSpec::Var(_) => unreachable!(),
        };
        let mut variant_i = term.clone();
        variant_i.slots[pos].x = XSpec::Var(i);
        let mut variant_j = term.clone();
        variant_j.slots[pos].x = XSpec::Var(j);
        let numerator = eval_term(m, &variant_i, d)?.sub(&eval_term(m, &variant_j, d)?);
        return div_exact_var_diff(&numerator, 2 * i, 2 * j);
    }
    let source_depth = term.slots.len();
    let mut assigns = Vec::with_capacity(2 * source_depth);
    for slot in &term.slots {
        match slot.x {
            XSpec::Var(i) => assigns.push(vec![(1, 2 * i)]),
            XSpec::DivDiff(_, _) => unreachable!(),
        }
        assigns.push(slot.y.iter().map(|&j| (1, 2 * j + 1)).collect());
    }
    let subst = Subst {
        assigns,
        target_len: 2 * d,
    };
    Ok(m.part(source_depth).substitute(&subst))
}

/// Outcome of a bimould predicate check.
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub name: String,
    pub passed: bool,
    /// Depths the check covered.
    pub depth_checked: usize,
    /// Weight window within which comparisons were exact.
    pub weight_bound: u32,
    /// Optional per-variable degree cap applied to the comparison set.
    pub degree_cap: Option<u16>,
    /// Number of monomial comparisons made.
    pub compared: usize,
    /// Up to ten human-readable failure descriptions.
    pub failures: Vec<String>,
}

impl SymmetryReport {
    fn record_failure(&mut self, msg: String) {
        self.passed = false;
        if self.failures.len() < 10 {
            self.failures.push(msg);
        }
    }
}

fn mono_within_cap(m: &Mono, cap: Option<u16>) -> bool {
    match cap {
        None => true,
        Some(c) => m.0.iter().all(|&e| e <= c),
    }
}

/// Compare two polynomials on the capped monomial set inside the weight
/// window and record failures. The weight filter matters: block products of
/// in-window parts can reach beyond the window, where truncated expansions
/// say nothing.
fn compare_polys<R: CoeffRing>(
    report: &mut SymmetryReport,
    context: &str,
    lhs: &SparsePoly<R>,
    rhs: &SparsePoly<R>,
    cap: Option<u16>,
    weight_bound: u32,
) {
    let mut monos: Vec<&Mono> = lhs.iter().map(|(m, _)| m).collect();
    monos.extend(rhs.iter().map(|(m, _)| m));
    monos.sort();
    monos.dedup();
    for m in monos {
        if !mono_within_cap(m, cap) || m.weight() > weight_bound {
            continue;
        }
        report.compared += 1;
        match (lhs.get(m), rhs.get(m)) {
            (Some(a), Some(b)) if a == b => {}
            (None, None) => {}
            (a, b) => {
                let sa = a.map(CoeffRing::show).unwrap_or_else(|| "0".into());
                let sb = b.map(CoeffRing::show).unwrap_or_else(|| "0".into());
                report.record_failure(format!("{context} at {m}: product={sa} expansion={sb}"));
            }
        }
    }
}

/// Check that `m` turns the chosen quasi-shuffle product into its block
/// recursion: for every depth `d <= depth_bound` and every split
/// `d = n + (d-n)`, the concatenated product of parts equals the expanded
/// recursion.
pub fn check_product_symmetry<R: CoeffRing>(
    m: &TruncBimould<R>,
    flavor: ProductSymmetry,
    degree_cap: Option<u16>,
) -> Result<SymmetryReport> {
    let name = match flavor {
        ProductSymmetry::Stuffle => "stuffle-product",
        ProductSymmetry::Balanced => "balanced-product",
    };
    let mut report = SymmetryReport {
        name: name.into(),
        passed: true,
        depth_checked: m.depth_bound(),
        weight_bound: m.weight_bound(),
        degree_cap,
        compared: 0,
        failures: Vec::new(),
    };
    for d in 2..=m.depth_bound() {
        for n in 1..d {
            let a: Vec<usize> = (0..n).collect();
            let b: Vec<usize> = (n..d).collect();
            let lhs = m.part(n).mul_concat(m.part(d - n));
            let mut rhs = SparsePoly::<R>::zero();
            for term in expand_recursion(flavor, &a, &b) {
                rhs = rhs.add(&eval_term(m, &term, d)?);
            }
            let context = format!("depth {d} split ({n},{})", d - n);
            compare_polys(&mut report, &context, &lhs, &rhs, degree_cap, m.weight_bound());
        }
    }
    Ok(report)
}

/// Check `swap(m) = m` on the capped monomial set.
pub fn check_swap_invariance<R: CoeffRing>(
    m: &TruncBimould<R>,
    degree_cap: Option<u16>,
) -> SymmetryReport {
    let swapped = m.swap();
    let mut report = SymmetryReport {
        name: "swap-invariant".into(),
        passed: true,
        depth_checked: m.depth_bound(),
        weight_bound: m.weight_bound(),
        degree_cap,
        compared: 0,
        failures: Vec::new(),
    };
    for d in 0..=m.depth_bound() {
        let context = format!("depth {d}");
        compare_polys(&mut report, &context, m.part(d), swapped.part(d), degree_cap, m.weight_bound());
    }
    report
}

/// Check `tau(m) = m` on the capped monomial set.
pub fn check_tau_invariance<R: CoeffRing>(
    m: &TruncBimould<R>,
    degree_cap: Option<u16>,
) -> SymmetryReport {
    let swapped = m.tau();
    let mut report = SymmetryReport {
        name: "tau-invariant".into(),
        passed: true,
        depth_checked: m.depth_bound(),
        weight_bound: m.weight_bound(),
        degree_cap,
        compared: 0,
        failures: Vec::new(),
    };
    for d in 0..=m.depth_bound() {
        let context = format!("depth {d}");
        compare_polys(&mut report, &context, m.part(d), swapped.part(d), degree_cap, m.weight_bound());
    }
    report
}

/// Generating series of the bi-index alphabet with word coefficients: the
/// coefficient of `X_1^{k_1-1} Y_1^{m_1} ... X_d^{k_d-1} Y_d^{m_d}` is
/// `y(k_1|m_1)...y(k_d|m_d) / (m_1! ... m_d!)`.
pub fn genseries_ybi(
    depth_bound: usize,
    weight_bound: u32,
) -> TruncBimould<WordCoeff<MulStuffleYbi>> {
    let mut out = TruncBimould::zero(depth_bound, weight_bound);
    out.add_term(0, Mono::zero(0), WordCoeff::new(LinComb::unit()));
    for_each_profile(depth_bound, weight_bound, &mut |pairs| {
        let word = crate::words::Word::from_ybi_pairs(pairs);
        let mono = Mono(
            pairs
                .iter()
                .flat_map(|&(k, m)| [(k - 1) as u16, m as u16])
                .collect(),
        );
        let mut norm = Q::one();
        for &(_, m) in pairs {
            norm /= crate::rational::factorial_q(m as u64);
        }
        out.add_term(
            pairs.len(),
            mono,
            WordCoeff::new(LinComb::from_term(word, norm)),
        );
    });
    out
}

/// Generating series of convergent balanced words with word coefficients:
/// the coefficient of `X_1^{k_1-1} Y_1^{m_1} ... X_d^{k_d-1} Y_d^{m_d}` is
/// the word `b_{k_1} b_0^{m_1} ... b_{k_d} b_0^{m_d}` (no factorials).
pub fn genseries_b0(depth_bound: usize, weight_bound: u32) -> TruncBimould<WordCoeff<MulBalanced>> {
    let mut out = TruncBimould::zero(depth_bound, weight_bound);
    out.add_term(
        0,
        Mono::zero(0),
        WordCoeff::new(LinComb::unit()),
    );
    for_each_profile(depth_bound, weight_bound, &mut |pairs| {
        let mut letters = Vec::new();
        for &(k, m) in pairs {
            letters.push(crate::words::Letter::B(k));
            for _ in 0..m {
                letters.push(crate::words::Letter::B(0));
            }
        }
        let word = crate::words::Word(letters);
        let mono = Mono(
            pairs
                .iter()
                .flat_map(|&(k, m)| [(k - 1) as u16, m as u16])
                .collect(),
        );
        out.add_term(
            pairs.len(),
            mono,
            WordCoeff::new(LinComb::from_word(word)),
        );
    });
    out
}

/// Generating series over any word product with concat-compatible block
/// structure; used internally and by the concatenation test.
pub fn genseries_concat_b0(
    depth_bound: usize,
    weight_bound: u32,
) -> TruncBimould<WordCoeff<MulConcat>> {
    genseries_b0(depth_bound, weight_bound).map_coeffs(|c| WordCoeff::new(c.lc.clone()))
}

/// Bi-index generating series with concatenation coefficients.
pub fn genseries_concat_ybi(
    depth_bound: usize,
    weight_bound: u32,
) -> TruncBimould<WordCoeff<MulConcat>> {
    genseries_ybi(depth_bound, weight_bound).map_coeffs(|c| WordCoeff::new(c.lc.clone()))
}

/// Visit every nonempty profile `[(k_1, m_1), ..., (k_d, m_d)]` with
/// `k_i >= 1`, `m_i >= 0`, depth at most `depth_bound`, and total weight
/// `sum (k_i + m_i) <= weight_bound`.
fn for_each_profile(
    depth_bound: usize,
    weight_bound: u32,
    visit: &mut impl FnMut(&[(u32, u32)]),
) {
    fn rec(
        depth_left: usize,
        weight_left: u32,
        acc: &mut Vec<(u32, u32)>,
        visit: &mut impl FnMut(&[(u32, u32)]),
    ) {
        if !acc.is_empty() {
            visit(acc);
        }
        if depth_left == 0 {
            return;
        }
        for t in 1..=weight_left {
            for k in 1..=t {
                acc.push((k, t - k));
                rec(depth_left - 1, weight_left - t, acc, visit);
                acc.pop();
            }
        }
    }
    rec(depth_bound, weight_bound, &mut Vec::new(), visit);
}

/// A mould loaded from JSON: rational or q-series coefficients.
pub enum MouldData {
    Rational(TruncBimould<Q>),
    Series(TruncBimould<QSeries>),
}

/// Serialize a rational bimould to the JSON mould format:
/// `{"<depth>": {"e1,f1,...": "p/q", ...}, ...}`.
pub fn mould_rational_to_json(m: &TruncBimould<Q>) -> Value {
    let mut top = JsonMap::new();
    for d in 0..=m.depth_bound() {
        let mut entries = JsonMap::new();
        for (mono, c) in m.part(d).iter() {
            entries.insert(mono.key(), json!(c.to_string()));
        }
        if !entries.is_empty() || d == 0 {
            top.insert(d.to_string(), Value::Object(entries));
        }
    }
    Value::Object(top)
}

/// Serialize a q-series bimould; coefficients become arrays of rational
/// strings `[c_0, c_1, ...]`.
pub fn mould_series_to_json(m: &TruncBimould<QSeries>) -> Value {
    let mut top = JsonMap::new();
    for d in 0..=m.depth_bound() {
        let mut entries = JsonMap::new();
        for (mono, s) in m.part(d).iter() {
            let arr: Vec<Value> = s.coeffs().iter().map(|c| json!(c.to_string())).collect();
            entries.insert(mono.key(), Value::Array(arr));
        }
        if !entries.is_empty() || d == 0 {
            top.insert(d.to_string(), Value::Object(entries));
        }
    }
    Value::Object(top)
}

/// Parse the JSON mould format. The coefficient kind (rational string vs
/// array of rational strings) is detected from the first entry and must be
/// uniform. The window is inferred as the largest weight present.
pub fn mould_from_json(v: &Value) -> Result<MouldData> {
    let obj = v
        .as_object()
        .ok_or_else(|| CoreError::Parse("mould file must be a JSON object".into()))?;
    let mut entries: Vec<(usize, Mono, &Value)> = Vec::new();
    let mut depth_bound = 0usize;
    for (dk, dv) in obj {
        let d: usize = dk
            .trim()
            .parse()
            .map_err(|_| CoreError::Parse(format!("bad depth key '{dk}'")))?;
        depth_bound = depth_bound.max(d);
        let inner = dv.as_object().ok_or_else(|| {
            CoreError::Parse(format!("depth {d} entry must be a JSON object"))
        })?;
        for (mk, mv) in inner {
            let mono = Mono::parse(mk)?;
            if mono.depth() != d {
                return Err(CoreError::Parse(format!(
                    "monomial '{mk}' has depth {} but is filed under depth {d}",
                    mono.depth()
                )));
            }
            entries.push((d, mono, mv));
        }
    }
    let weight_bound = entries.iter().map(|(_, m, _)| m.weight()).max().unwrap_or(0);
    let is_series = entries.first().map(|(_, _, v)| v.is_array()).unwrap_or(false);
    if is_series {
        let mut order: Option<usize> = None;
        let mut m = TruncBimould::<QSeries>::zero(depth_bound, weight_bound);
        for (d, mono, mv) in entries {
            let arr = mv.as_array().ok_or_else(|| {
                CoreError::Parse("mixed rational and series coefficients".into())
            })?;
            if arr.is_empty() {
                return Err(CoreError::Parse("empty coefficient array".into()));
            }
            match order {
                None => order = Some(arr.len() - 1),
                Some(o) if o == arr.len() - 1 => {}
                Some(o) => {
                    return Err(CoreError::Parse(format!(
                        "inconsistent series orders {o} vs {}",
                        arr.len() - 1
                    )))
                }
            }
            let coeffs: Result<Vec<Q>> = arr
                .iter()
                .map(|c| {
                    c.as_str()
                        .ok_or_else(|| {
                            CoreError::Parse("series coefficients must be strings".into())
                        })
                        .and_then(crate::rational::parse_q)
                })
                .collect();
            m.add_term(d, mono, QSeries::from_coeffs(coeffs?));
        }
        Ok(MouldData::Series(m))
    } else {
        let mut m = TruncBimould::<Q>::zero(depth_bound, weight_bound);
        for (d, mono, mv) in entries {
            let s = mv.as_str().ok_or_else(|| {
                CoreError::Parse("mixed rational and series coefficients".into())
            })?;
            m.add_term(d, mono, crate::rational::parse_q(s)?);
        }
        Ok(MouldData::Rational(m))
    }
}

/// Load a mould file from disk.
pub fn load_mould(path: &Path) -> Result<MouldData> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    mould_from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qi, qr};

    fn mono(v: &[u16]) -> Mono {
        Mono(v.to_vec())
    }

    #[test]
    fn mono_basics() {
        let m = mono(&[2, 1, 0, 3]);
        assert_eq!(m.depth(), 2);
        assert_eq!(m.total_degree(), 6);
        assert_eq!(m.weight(), 8);
        assert_eq!(m.key(), "2,1,0,3");
        assert_eq!(Mono::parse("2,1,0,3").unwrap(), m);
        assert_eq!(Mono::parse("").unwrap(), Mono::zero(0));
        assert!(Mono::parse("1,2,3").is_err());
        assert_eq!(m.to_string(), "X1^2 Y1 Y2^3");
    }

    #[test]
    fn poly_mul_and_cancel() {
        let mut p = SparsePoly::<Q>::zero();
        p.add_term(mono(&[1, 0]), qi(2));
        p.add_term(mono(&[0, 1]), qi(-1));
        let q2 = p.mul(&p, None);
        assert_eq!(q2.get(&mono(&[2, 0])), Some(&qi(4)));
        assert_eq!(q2.get(&mono(&[1, 1])), Some(&qi(-4)));
        assert_eq!(q2.get(&mono(&[0, 2])), Some(&qi(1)));
        assert!(p.sub(&p).is_zero());
        // Degree cap.
        let capped = p.mul(&p, Some(1));
        assert!(capped.is_zero());
    }

    #[test]
    fn exact_division_golden() {
        // (X1^3 - X2^3) / (X1 - X2) = X1^2 + X1 X2 + X2^2.
        let mut p = SparsePoly::<Q>::zero();
        p.add_term(mono(&[3, 0, 0, 0]), qi(1));
        p.add_term(mono(&[0, 0, 3, 0]), qi(-1));
        let q = div_exact_var_diff(&p, 0, 2).unwrap();
        assert_eq!(q.get(&mono(&[2, 0, 0, 0])), Some(&qi(1)));
        assert_eq!(q.get(&mono(&[1, 0, 1, 0])), Some(&qi(1)));
        assert_eq!(q.get(&mono(&[0, 0, 2, 0])), Some(&qi(1)));
        assert_eq!(q.num_terms(), 3);

        // Non-divisible input errors.
        let mut bad = SparsePoly::<Q>::zero();
        bad.add_term(mono(&[1, 0, 0, 0]), qi(1));
        assert!(matches!(
            div_exact_var_diff(&bad, 0, 2),
            Err(CoreError::DivisionRemainder(_))
        ));
    }

    #[test]
    fn substitution_involutions() {
        // A random-ish rational bimould within a window.
        let mut m = TruncBimould::<Q>::zero(2, 7);
        m.add_term(0, Mono::zero(0), qi(1));
        m.add_term(1, mono(&[2, 1]), qr(3, 2));
        m.add_term(1, mono(&[0, 3]), qi(-2));
        m.add_term(2, mono(&[1, 0, 0, 2]), qi(5));
        m.add_term(2, mono(&[0, 1, 1, 1]), qr(-7, 3));
        assert_eq!(m.hash_y().hash_y_inv(), m);
        assert_eq!(m.hash_y_inv().hash_y(), m);
        assert_eq!(m.swap().swap(), m);
        assert_eq!(m.tau().tau(), m);
    }

    #[test]
    fn window_is_enforced() {
        let mut m = TruncBimould::<Q>::zero(1, 3);
        m.add_term(1, mono(&[4, 0]), qi(1)); // weight 5 > 3: dropped
        assert!(m.part(1).is_zero());
        m.add_term(1, mono(&[2, 0]), qi(1)); // weight 3: kept
        assert_eq!(m.coeff(1, &mono(&[2, 0])).unwrap(), Some(&qi(1)));
        assert!(m.coeff(1, &mono(&[4, 0])).is_err());
        assert!(m.coeff(2, &Mono::zero(2)).is_err());
    }

    #[test]
    fn recursion_term_counts() {
        for flavor in [ProductSymmetry::Stuffle, ProductSymmetry::Balanced] {
            let t11 = expand_recursion(flavor, &[0], &[1]);
            assert_eq!(t11.len(), 3, "{flavor:?} 1x1");
            let t12 = expand_recursion(flavor, &[0], &[1, 2]);
            assert_eq!(t12.len(), 5, "{flavor:?} 1x2");
            let t22 = expand_recursion(flavor, &[0, 1], &[2, 3]);
            assert_eq!(t22.len(), 13, "{flavor:?} 2x2");
        }
    }

    #[test]
    fn word_series_has_balanced_symmetry() {
        let m = genseries_b0(3, 5);
        let report = check_product_symmetry(&m, ProductSymmetry::Balanced, None).unwrap();
        assert!(report.passed, "failures: {:?}", report.failures);
        assert!(report.compared > 50);
        // The stuffle flavor must fail on the same series.
        let wrong = check_product_symmetry(&m, ProductSymmetry::Stuffle, None).unwrap();
        assert!(!wrong.passed);
    }

    #[test]
    fn word_series_has_stuffle_symmetry() {
        let m = genseries_ybi(3, 5);
        let report = check_product_symmetry(&m, ProductSymmetry::Stuffle, None).unwrap();
        assert!(report.passed, "failures: {:?}", report.failures);
        assert!(report.compared > 50);
        let wrong = check_product_symmetry(&m, ProductSymmetry::Balanced, None).unwrap();
        assert!(!wrong.passed);
    }

    #[test]
    fn concatenation_matches_block_products() {
        // With concatenation coefficients, the mould square of the
        // generating series counts every block split of every word once:
        // its depth-d part is (d+1) times the generating series part.
        for (name, g) in [
            ("balanced", genseries_concat_b0(3, 5)),
            ("bi-index", genseries_concat_ybi(3, 5)),
        ] {
            let sq = g.mould_mul(&g);
            for d in 0..=3usize {
                let expect = g.part(d).scale(&qi(d as i64 + 1));
                assert_eq!(sq.part(d), &expect, "{name} depth {d}");
            }
        }
    }

    #[test]
    fn json_roundtrip_rational() {
        let mut m = TruncBimould::<Q>::zero(1, 4);
        m.add_term(0, Mono::zero(0), qi(1));
        m.add_term(1, mono(&[1, 2]), qr(-5, 7));
        let v = mould_rational_to_json(&m);
        match mould_from_json(&v).unwrap() {
            MouldData::Rational(back) => {
                assert_eq!(back.coeff(1, &mono(&[1, 2])).unwrap(), Some(&qr(-5, 7)));
                assert_eq!(back.coeff(0, &Mono::zero(0)).unwrap(), Some(&qi(1)));
            }
            MouldData::Series(_) => panic!("expected rational mould"),
        }
    }

    #[test]
    fn json_roundtrip_series() {
        let mut m = TruncBimould::<QSeries>::zero(1, 4);
        m.add_term(
            1,
            mono(&[1, 0]),
            QSeries::from_coeffs(vec![qi(0), qi(1), qi(3)]),
        );
        let v = mould_series_to_json(&m);
        match mould_from_json(&v).unwrap() {
            MouldData::Series(back) => {
                let s = back.coeff(1, &mono(&[1, 0])).unwrap().unwrap();
                assert_eq!(s.coeff(2), &qi(3));
            }
            MouldData::Rational(_) => panic!("expected series mould"),
        }
    }
}
