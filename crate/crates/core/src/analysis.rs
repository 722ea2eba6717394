//! Verification suites over a built construction context, exact linear
//! relation finding among the q-zeta series, and the formal and numeric
//! q -> 1 limits.
//!
//! Everything except [`numeric_limit_check`] is exact.  The verification
//! functions walk finite word families and compare truncated q-expansions
//! coefficient by coefficient; their reports say how many cases ran and list
//! the first few failures verbatim.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::eisenstein::EisensteinContext;
use crate::error::CoreError;
use crate::qseries::QSeries;
use crate::quasishuffle::{engine, ProductId};
use crate::rational::Q;
use crate::regmaps::tau_b;
use crate::words::{b_words_up_to_weight, b_words_of_weight, Letter, LinComb, Word};
use crate::Result;

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

/// Outcome of one verification sweep.
#[derive(Clone, Debug)]
pub struct CheckReport {
    /// What was checked.
    pub name: String,
    /// True when every case agreed.
    pub passed: bool,
    /// Number of cases compared.
    pub cases: usize,
    /// Up to ten descriptions of failing cases.
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport {
            name: name.to_string(),
            passed: true,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn record_failure(&mut self, description: String) {
        self.passed = false;
        if self.failures.len() < 10 {
            self.failures.push(description);
        }
    }
}

/// Convergent words (no leading `b0`) within a weight and depth budget,
/// excluding the empty word.
fn convergent_words(weight_max: u32, depth_max: u32) -> Vec<Word> {
    b_words_up_to_weight(weight_max)
        .into_iter()
        .filter(|w| {
            !w.is_empty() && w.0[0] != Letter::B(0) && w.depth() <= depth_max
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Verification sweeps.
// ---------------------------------------------------------------------------

/// Check that every convergent word up to the weight budget has the same
/// q-zeta series as its block-reversed image.
pub fn verify_tau_invariance(ctx: &EisensteinContext, weight_max: u32) -> Result<CheckReport> {
    let mut report = CheckReport::new("tau invariance of the q-zeta values");
    for w in convergent_words(weight_max, ctx.params.depth_max as u32) {
        let image = tau_b(&w)?;
        let lhs = ctx.zeta_q_word(&w)?;
        let rhs = ctx.zeta_q_word(&image)?;
        report.cases += 1;
        if lhs != rhs {
            report.record_failure(format!("{w} vs {image}"));
        }
    }
    Ok(report)
}

/// Check the product formula: the series product of two q-zeta values equals
/// the q-zeta value of the balanced quasi-shuffle product of their words.
///
/// Pairs `(u, v)` run over convergent words with `wt(u) + wt(v)` at most the
/// budget and each factor's depth at most `factor_depth_max`; pairs whose
/// combined depth exceeds the context's depth bound are skipped.
pub fn verify_product_formula(
    ctx: &EisensteinContext,
    weight_sum_max: u32,
    factor_depth_max: u32,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("balanced quasi-shuffle product formula");
    let words = convergent_words(weight_sum_max, factor_depth_max);
    let eng = engine();
    for u in &words {
        for v in &words {
            if u.weight() + v.weight() > weight_sum_max {
                continue;
            }
            if u.depth() + v.depth() > ctx.params.depth_max as u32 {
                continue;
            }
            let lhs = ctx.zeta_q_word(u)?.mul(&ctx.zeta_q_word(v)?);
            let rhs = ctx.zeta_q_lin(&eng.product(ProductId::Balanced, u, v)?)?;
            report.cases += 1;
            if lhs != rhs {
                report.record_failure(format!("{u} times {v}"));
            }
        }
    }
    Ok(report)
}

/// The index transformations of the derivation formula: for every pair
/// `i <= j` of positions, entry `i` is incremented and a zero is inserted
/// directly after position `j`.  Returns `(coefficient, index)` pairs; the
/// coefficient is the original entry `s_i`, so terms with `s_i = 0` are
/// omitted.
pub fn derivation_terms(index: &[u32]) -> Vec<(u32, Vec<u32>)> {
    let l = index.len();
    let mut out = Vec::new();
    for i in 0..l {
        if index[i] == 0 {
            continue;
        }
        for j in i..l {
            let mut s: Vec<u32> = Vec::with_capacity(l + 1);
            s.extend_from_slice(&index[..=j]);
            s[i] += 1;
            s.push(0);
            s.extend_from_slice(&index[j + 1..]);
            out.push((index[i], s));
        }
    }
    out
}

/// Check the derivation formula `q d/dq zeta_q(s) = sum_{i<=j} s_i *
/// zeta_q(..., s_i + 1, ..., s_j, 0, ...)` for every convergent word up to
/// the weight budget.  The right-hand side has weight `wt + 2`, so the
/// context window must cover `weight_max + 2`.
pub fn verify_derivation_formula(
    ctx: &EisensteinContext,
    weight_max: u32,
) -> Result<CheckReport> {
    if weight_max + 2 > ctx.params.weight_bound {
        return Err(CoreError::WindowExceeded(format!(
            "derivation check to weight {weight_max} needs window {} but the context has {}",
            weight_max + 2,
            ctx.params.weight_bound
        )));
    }
    let mut report = CheckReport::new("derivation formula for q d/dq");
    for w in convergent_words(weight_max, ctx.params.depth_max as u32) {
        let index = w.to_b_indices()?;
        let lhs = ctx.zeta_q_word(&w)?.qderiv();
        let mut rhs = QSeries::zero(ctx.params.order);
        for (coeff, term_index) in derivation_terms(&index) {
            let term = ctx.zeta_q(&term_index)?;
            rhs = rhs.add(&term.scale(&Q::from_integer(BigInt::from(coeff))));
        }
        report.cases += 1;
        if lhs != rhs {
            report.record_failure(format!("{w}"));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Exact linear relations.
// ---------------------------------------------------------------------------

/// A set of integer linear combinations of q-zeta series that vanish in
/// every coefficient up to the verified order.
#[derive(Clone, Debug)]
pub struct RelationReport {
    /// Common weight of the basis words.
    pub weight: u32,
    /// Depth bound of the basis words.
    pub depth_max: u32,
    /// The relations hold for all q-coefficients up to this order; beyond it
    /// they are candidates, not theorems.
    pub verified_order: usize,
    /// Basis words in graded-lexicographic order (length, then letters).
    pub basis: Vec<Word>,
    /// Primitive integer combinations, one per kernel dimension, with the
    /// first nonzero coefficient positive.
    pub relations: Vec<LinComb>,
}

/// Find all linear relations among the q-zeta series of the convergent words
/// of one weight, up to the context's truncation order.
pub fn find_relations(
    ctx: &EisensteinContext,
    weight: u32,
    depth_max: u32,
) -> Result<RelationReport> {
    let mut basis: Vec<Word> = b_words_of_weight(weight)
        .into_iter()
        .filter(|w| !w.is_empty() && w.0[0] != Letter::B(0))
        .filter(|w| w.depth() <= depth_max.min(ctx.params.depth_max as u32))
        .collect();
    basis.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));

    let order = ctx.params.order;
    // Matrix with one column per word and one row per q-power.
    let columns: Vec<QSeries> = basis
        .iter()
        .map(|w| ctx.zeta_q_word(w))
        .collect::<Result<_>>()?;
    let mut mat: Vec<Vec<Q>> = (0..=order)
        .map(|n| columns.iter().map(|s| s.coeff(n).clone()).collect())
        .collect();

    let kernel = kernel_basis(&mut mat, basis.len());
    let relations = kernel
        .iter()
        .map(|v| {
            let ints = primitive_integer(v);
            let mut lc = LinComb::zero();
            for (w, c) in basis.iter().zip(ints) {
                lc.add_term(w.clone(), c);
            }
            lc
        })
        .collect();
    Ok(RelationReport {
        weight,
        depth_max,
        verified_order: order,
        basis,
        relations,
    })
}

/// Re-check every relation of a report against another context, typically
/// one built at a doubled truncation order.  Relations that fail there are
/// dropped (they were artifacts of the shorter window); the surviving report
/// carries the higher verified order.  Returns how many were dropped.
pub fn reverify_relations(
    report: &mut RelationReport,
    ctx: &EisensteinContext,
) -> Result<usize> {
    let mut kept = Vec::new();
    let mut dropped = 0usize;
    for rel in report.relations.drain(..) {
        if ctx.zeta_q_lin(&rel)?.is_zero() {
            kept.push(rel);
        } else {
            dropped += 1;
        }
    }
    report.relations = kept;
    report.verified_order = report.verified_order.max(ctx.params.order);
    Ok(dropped)
}

/// Null-space basis of a rational matrix (columns are the unknowns).  The
/// matrix is consumed by in-place row reduction.
fn kernel_basis(mat: &mut [Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let nrows = mat.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][c].clone();
        for x in mat[r].iter_mut() {
            *x = &*x / &inv;
        }
        let pivot_row = mat[r].clone();
        for (i, row) in mat.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, px) in row.iter_mut().zip(pivot_row.iter()) {
                *x -= px * &f;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut kernel = Vec::new();
    for f in 0..ncols {
        if is_pivot[f] {
            continue;
        }
        let mut v = vec![Q::zero(); ncols];
        v[f] = Q::one();
        for (pi, &c) in pivots.iter().enumerate() {
            let coeff = -&mat[pi][f];
            if !coeff.is_zero() {
                v[c] = coeff;
            }
        }
        kernel.push(v);
    }
    kernel
}

/// Scale a rational vector to coprime integers with the first nonzero entry
/// positive.
fn primitive_integer(v: &[Q]) -> Vec<Q> {
    let mut denom_lcm = BigInt::one();
    for x in v {
        if !x.is_zero() {
            denom_lcm = denom_lcm.lcm(x.denom());
        }
    }
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Q::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for x in &scaled {
        g = g.gcd(x);
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    let flip = scaled
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    scaled
        .into_iter()
        .map(|x| {
            let mut y = x / &g;
            if flip {
                y = -y;
            }
            Q::from_integer(y)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Formal and numeric q -> 1 limits.
// ---------------------------------------------------------------------------

/// All decompositions `w = u v` with `u` over `{b0, b1}` and `v` over
/// `{b_i : i >= 1}`, returned as `(x-word, y-word)` pairs: `u = b_{e1} ...
/// b_{en}` becomes the reversed two-letter word `x_{en} ... x_{e1}` and `v`
/// becomes the one-index word of its exponents.
///
/// The scaled limit of the q-zeta series of `w` is the sum over these pairs
/// of products of regularized zeta values; in particular it vanishes when no
/// decomposition exists.
pub fn formal_limit(w: &Word) -> Result<Vec<(Word, Word)>> {
    if !w.is_empty() {
        w.b_blocks()?;
        if w.0[0] == Letter::B(0) {
            return Err(CoreError::InvalidWord(
                "formal limit needs a convergent word (no leading b0)".into(),
            ));
        }
    }
    let n = w.0.len();
    let mut out = Vec::new();
    for split in 0..=n {
        let (u, v) = w.0.split_at(split);
        let u_ok = u.iter().all(|l| matches!(l, Letter::B(0) | Letter::B(1)));
        let v_ok = v.iter().all(|l| !matches!(l, Letter::B(0)));
        if !u_ok || !v_ok {
            continue;
        }
        let x_word = Word(
            u.iter()
                .rev()
                .map(|l| match l {
                    Letter::B(e) => Letter::X(*e as u8),
                    _ => unreachable!(),
                })
                .collect(),
        );
        let y_word = Word(
            v.iter()
                .map(|l| match l {
                    Letter::B(k) => Letter::Y(*k),
                    _ => unreachable!(),
                })
                .collect(),
        );
        out.push((x_word, y_word));
    }
    Ok(out)
}

/// Result of the floating-point extrapolation of a scaled series toward
/// `q = 1`.  Advisory only: everything exact lives elsewhere.
#[derive(Clone, Debug)]
pub struct NumericLimitCheck {
    /// The value the limit is compared against.
    pub target: f64,
    /// Polynomial extrapolation of `h^weight * series(1 - h)` to `h = 0`.
    pub extrapolated: f64,
    /// `|extrapolated - target| / |target|`.
    pub relative_error: f64,
    /// True when the relative error is within the tolerance.
    pub within_tolerance: bool,
    /// The `(h, value)` nodes the extrapolation used.
    pub nodes: Vec<(f64, f64)>,
}

/// Evaluate `h^weight * series(1 - h)` on a descending grid of `h` values
/// and extrapolate polynomially to `h = 0` (Neville's scheme).
pub fn numeric_limit_check(
    series: &QSeries,
    weight: u32,
    target: f64,
    tolerance: f64,
) -> NumericLimitCheck {
    let hs: [f64; 5] = [0.50, 0.45, 0.40, 0.35, 0.30];
    let nodes: Vec<(f64, f64)> = hs
        .iter()
        .map(|&h| (h, h.powi(weight as i32) * series.eval_float(1.0 - h)))
        .collect();
    let extrapolated = neville_at_zero(&nodes);
    let relative_error = if target == 0.0 {
        extrapolated.abs()
    } else {
        ((extrapolated - target) / target).abs()
    };
    NumericLimitCheck {
        target,
        extrapolated,
        relative_error,
        within_tolerance: relative_error <= tolerance,
        nodes,
    }
}

fn neville_at_zero(nodes: &[(f64, f64)]) -> f64 {
    let n = nodes.len();
    let xs: Vec<f64> = nodes.iter().map(|p| p.0).collect();
    let mut vals: Vec<f64> = nodes.iter().map(|p| p.1).collect();
    for level in 1..n {
        for i in 0..(n - level) {
            let xi = xs[i];
            let xj = xs[i + level];
            vals[i] = (-xj * vals[i] + xi * vals[i + 1]) / (xi - xj);
        }
    }
    vals[0]
}

// ---------------------------------------------------------------------------
// Graded dimension bookkeeping (used by relation summaries).
// ---------------------------------------------------------------------------

/// Number of convergent words per weight up to a bound, split by depth cap.
pub fn graded_word_counts(weight_max: u32, depth_max: u32) -> BTreeMap<u32, usize> {
    let mut out = BTreeMap::new();
    for w in 1..=weight_max {
        let count = b_words_of_weight(w)
            .into_iter()
            .filter(|word| {
                !word.is_empty()
                    && word.0[0] != Letter::B(0)
                    && word.depth() <= depth_max
            })
            .count();
        out.insert(w, count);
    }
    out
}
