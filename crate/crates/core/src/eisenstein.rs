//! Construction of the balanced multiple q-zeta series.
//!
//! The pipeline has a rational half and a series half.  The rational half
//! produces a table of depth-one and depth-two constants seeded by Bernoulli
//! numbers: the depth-two constants are solved from the linear equations that
//! both regularized double products impose, together with the comparison map
//! between the two regularizations.  Those constants feed a rational seed
//! bimould.  The series half assembles lattice sums over pairs of positive
//! integers into a bimould of truncated q-expansions, multiplies it with the
//! seed, and finally reads off coefficients.  The coefficient of the monomial
//! `X1^{k1-1} Y1^{m1} ... Xd^{kd-1} Yd^{md}` in the resummed bimould is the
//! balanced multiple q-zeta value of the index `(k1, {0}^{m1}, ..., kd,
//! {0}^{md})`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bimould::{linear_power, Mono, SparsePoly, Subst, TruncBimould};
use crate::error::CoreError;
use crate::qseries::QSeries;
use crate::quasishuffle::{engine, ProductId};
use crate::rational::{bernoulli, factorial_q, fmt_q, parse_q, qi, Q};
use crate::regmaps::{reg_t_inv, reg_t_inv_lin};
use crate::words::{Letter, LinComb, Word};
use crate::Result;

// ---------------------------------------------------------------------------
// Depth-one constants and the comparison coefficients.
// ---------------------------------------------------------------------------

/// Depth-one constant: `-B_k / (2 * k!)` for even `k >= 2`, zero otherwise.
pub fn bernoulli_seed(k: u32) -> Q {
    if k < 2 || !k.is_multiple_of(2) {
        return Q::zero();
    }
    -bernoulli(k as u64) / (qi(2) * factorial_q(k as u64))
}

/// Coefficients of `exp(sum_{n>=2} ((-1)^{n+1}/n) * B_n/(2*n!) * T^n)`.
///
/// This is the series that converts between the two regularization schemes:
/// `T^n` is mapped to `sum_j (n!/(n-j)!) * gamma_j * T^{n-j}`.
pub fn gamma_coeffs(n_max: usize) -> Vec<Q> {
    // c[n] for n >= 2; the exponential is computed by the usual recurrence
    // m*g_m = sum_j (j*c_j) g_{m-j}.
    let mut c = vec![Q::zero(); n_max + 1];
    for (n, cn) in c.iter_mut().enumerate().take(n_max + 1).skip(2) {
        let sign = if n % 2 == 0 { -Q::one() } else { Q::one() };
        *cn = sign * bernoulli(n as u64) / (qi(n as i64) * qi(2) * factorial_q(n as u64));
    }
    let mut g = vec![Q::zero(); n_max + 1];
    g[0] = Q::one();
    for m in 1..=n_max {
        let mut acc = Q::zero();
        for j in 2..=m {
            if !c[j].is_zero() {
                acc += qi(j as i64) * &c[j] * &g[m - j];
            }
        }
        g[m] = acc / qi(m as i64);
    }
    g
}

// ---------------------------------------------------------------------------
// Affine expressions in the unknown depth-two constants.
// ---------------------------------------------------------------------------

/// An affine expression `konst + sum lin[(a,b)] * z(a,b)` in the unknown
/// depth-two constants of one weight.
#[derive(Clone, Debug)]
struct Aff {
    konst: Q,
    lin: BTreeMap<(u32, u32), Q>,
}

impl Aff {
    fn zero() -> Self {
        Aff {
            konst: Q::zero(),
            lin: BTreeMap::new(),
        }
    }

    fn constant(c: Q) -> Self {
        Aff {
            konst: c,
            lin: BTreeMap::new(),
        }
    }

    fn unknown(a: u32, b: u32) -> Self {
        let mut lin = BTreeMap::new();
        lin.insert((a, b), Q::one());
        Aff {
            konst: Q::zero(),
            lin,
        }
    }

    fn add_scaled(&mut self, other: &Aff, c: &Q) {
        if c.is_zero() {
            return;
        }
        self.konst += &other.konst * c;
        for (k, v) in &other.lin {
            let entry = self.lin.entry(*k).or_insert_with(Q::zero);
            *entry += v * c;
            if entry.is_zero() {
                self.lin.remove(k);
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.konst.is_zero() && self.lin.is_empty()
    }
}

/// Value of a convergent word over the one-index alphabet: the empty word is
/// 1, a single letter is a depth-one constant, two letters are an unknown.
fn y_word_value(w: &Word) -> Result<Aff> {
    let ks: Vec<u32> = w
        .0
        .iter()
        .map(|l| match l {
            Letter::Y(k) => Ok(*k),
            other => Err(CoreError::InvalidWord(format!(
                "expected a one-index letter, found {other}"
            ))),
        })
        .collect::<Result<_>>()?;
    match ks.as_slice() {
        [] => Ok(Aff::constant(Q::one())),
        [k] => Ok(Aff::constant(bernoulli_seed(*k))),
        [a, b] => Ok(Aff::unknown(*a, *b)),
        _ => Err(CoreError::DepthUnsupported(
            "constant solver handles depth at most two".into(),
        )),
    }
}

/// Value of a word over the two-letter alphabet, read as exponent runs: each
/// index is one more than the length of an `x0` run ending in `x1`.
fn x_word_value(w: &Word) -> Result<Aff> {
    let mut ks: Vec<u32> = Vec::new();
    let mut run = 0u32;
    for l in &w.0 {
        match l {
            Letter::X(0) => run += 1,
            Letter::X(1) => {
                ks.push(run + 1);
                run = 0;
            }
            other => {
                return Err(CoreError::InvalidWord(format!(
                    "expected a two-letter-alphabet word, found {other}"
                )))
            }
        }
    }
    if run != 0 {
        return Err(CoreError::InvalidWord(
            "word does not end in x1, so it has no index form".into(),
        ));
    }
    match ks.as_slice() {
        [] => Ok(Aff::constant(Q::one())),
        [k] => Ok(Aff::constant(bernoulli_seed(*k))),
        [a, b] => Ok(Aff::unknown(*a, *b)),
        _ => Err(CoreError::DepthUnsupported(
            "constant solver handles depth at most two".into(),
        )),
    }
}

/// Evaluate each T-coefficient of an eliminated expression to an affine form.
fn eval_tpoly(tp: &[LinComb], value: &impl Fn(&Word) -> Result<Aff>) -> Result<Vec<Aff>> {
    tp.iter()
        .map(|lc| {
            let mut acc = Aff::zero();
            for (w, c) in lc.iter() {
                acc.add_scaled(&value(w)?, c);
            }
            Ok(acc)
        })
        .collect()
}

/// Apply the regularization-comparison map to a T-polynomial of affine
/// values: `T^n` maps to `sum_j (n!/(n-j)!) * gamma_j * T^{n-j}`.
fn compare_tpoly(tp: &[Aff], gamma: &[Q]) -> Vec<Aff> {
    let mut out = vec![Aff::zero(); tp.len()];
    for (n, p) in tp.iter().enumerate() {
        let mut falling = Q::one();
        for j in 0..=n {
            if j > 0 {
                falling *= qi((n - j + 1) as i64);
            }
            let c = &falling * &gamma[j];
            out[n - j].add_scaled(p, &c);
        }
    }
    while out.len() > 1 && out.last().map(Aff::is_zero) == Some(true) {
        out.pop();
    }
    out
}

// ---------------------------------------------------------------------------
// The solved constant table.
// ---------------------------------------------------------------------------

/// Sparse kernel vector of one weight's linear system, keyed by the
/// depth-two unknowns it touches.
pub type KernelVector = BTreeMap<(u32, u32), Q>;

/// Table of depth-one and depth-two constants, together with the kernels of
/// the defining linear systems (one system per weight).
#[derive(Clone, Debug)]
pub struct BetaTable {
    /// Largest weight the table covers.
    pub weight_bound: u32,
    /// Nonzero depth-one values, keyed by the index.
    pub depth1: BTreeMap<u32, Q>,
    /// Depth-two values `z(a, b)`, keyed by `(a, b)` with `a + b` at most the
    /// weight bound.  Empty when the table was built depth-one only.
    pub depth2: BTreeMap<(u32, u32), Q>,
    /// Dimension of the solution kernel per weight.
    pub kernel_dims: BTreeMap<u32, usize>,
    /// A basis of each nontrivial kernel, as sparse vectors over the
    /// unknowns of that weight.
    pub kernel_bases: BTreeMap<u32, Vec<KernelVector>>,
}

impl BetaTable {
    /// Depth-one closed-form table with no depth-two content.
    pub fn depth1_only(weight_bound: u32) -> Self {
        let mut depth1 = BTreeMap::new();
        for k in 2..=weight_bound {
            let v = bernoulli_seed(k);
            if !v.is_zero() {
                depth1.insert(k, v);
            }
        }
        BetaTable {
            weight_bound,
            depth1,
            depth2: BTreeMap::new(),
            kernel_dims: BTreeMap::new(),
            kernel_bases: BTreeMap::new(),
        }
    }

    /// Solve the depth-two constants for every weight up to the bound.
    ///
    /// For each weight the unknowns are `z(a, w-a)` for `a = 1..w-1`, and the
    /// rows are machine-derived: the value of the divergent pair `(1, w-1)`
    /// is defined through elimination in the one-index product, every
    /// convergent double product in both products must equal the product of
    /// the depth-one values, and the two eliminations of the divergent pair
    /// must agree after the comparison map.  Each system is put in reduced
    /// row-echelon form; free unknowns are set to zero and recorded as
    /// kernel basis vectors.
    pub fn solve(weight_bound: u32) -> Result<Self> {
        let mut table = Self::depth1_only(weight_bound);
        let gamma = gamma_coeffs(4);
        for w in 2..=weight_bound {
            solve_weight(w, &gamma, &mut table)?;
        }
        Ok(table)
    }

    /// Depth-one value (zero when not stored).
    pub fn value1(&self, k: u32) -> Q {
        self.depth1.get(&k).cloned().unwrap_or_else(Q::zero)
    }

    /// Depth-two value; an error when the pair is outside the table.
    pub fn value2(&self, a: u32, b: u32) -> Result<Q> {
        if a + b > self.weight_bound {
            return Err(CoreError::WindowExceeded(format!(
                "pair ({a}, {b}) has weight {} beyond the table bound {}",
                a + b,
                self.weight_bound
            )));
        }
        self.depth2.get(&(a, b)).cloned().ok_or_else(|| {
            CoreError::InvalidWord(format!("no depth-two value for ({a}, {b}) in the table"))
        })
    }

    /// A copy of the table with one kernel basis vector of the given weight
    /// added to the depth-two values, scaled.  The result still satisfies
    /// every defining equation of the solver.
    pub fn perturbed(&self, weight: u32, index: usize, scale: &Q) -> Result<Self> {
        let basis = self.kernel_bases.get(&weight).ok_or_else(|| {
            CoreError::InvalidWord(format!("no kernel recorded at weight {weight}"))
        })?;
        let vec = basis.get(index).ok_or_else(|| {
            CoreError::InvalidWord(format!(
                "kernel at weight {weight} has only {} basis vectors",
                basis.len()
            ))
        })?;
        let mut out = self.clone();
        for (key, c) in vec {
            let entry = out.depth2.entry(*key).or_insert_with(Q::zero);
            *entry += c * scale;
        }
        Ok(out)
    }

    /// Serialize the value tables (not the kernels) as JSON.
    pub fn to_json(&self) -> serde_json::Value {
        let mut d1 = serde_json::Map::new();
        for (k, v) in &self.depth1 {
            d1.insert(k.to_string(), serde_json::Value::String(fmt_q(v)));
        }
        let mut d2 = serde_json::Map::new();
        for ((a, b), v) in &self.depth2 {
            d2.insert(format!("{a},{b}"), serde_json::Value::String(fmt_q(v)));
        }
        serde_json::json!({
            "weight_bound": self.weight_bound,
            "depth1": serde_json::Value::Object(d1),
            "depth2": serde_json::Value::Object(d2),
        })
    }

    /// Read a table back from the JSON produced by [`BetaTable::to_json`].
    /// Kernel information is not part of the format and comes back empty.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| CoreError::Parse("constant table must be a JSON object".into()))?;
        let mut depth1 = BTreeMap::new();
        let mut depth2 = BTreeMap::new();
        let mut max_weight = 0u32;
        if let Some(d1) = obj.get("depth1") {
            let map = d1
                .as_object()
                .ok_or_else(|| CoreError::Parse("depth1 must be an object".into()))?;
            for (k, val) in map {
                let idx: u32 = k
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad depth-one key {k:?}")))?;
                let q = parse_json_q(val)?;
                max_weight = max_weight.max(idx);
                if !q.is_zero() {
                    depth1.insert(idx, q);
                }
            }
        }
        if let Some(d2) = obj.get("depth2") {
            let map = d2
                .as_object()
                .ok_or_else(|| CoreError::Parse("depth2 must be an object".into()))?;
            for (k, val) in map {
                let parts: Vec<&str> = k.split(',').collect();
                if parts.len() != 2 {
                    return Err(CoreError::Parse(format!("bad depth-two key {k:?}")));
                }
                let a: u32 = parts[0]
                    .trim()
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad depth-two key {k:?}")))?;
                let b: u32 = parts[1]
                    .trim()
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad depth-two key {k:?}")))?;
                max_weight = max_weight.max(a + b);
                depth2.insert((a, b), parse_json_q(val)?);
            }
        }
        let weight_bound = obj
            .get("weight_bound")
            .and_then(|x| x.as_u64())
            .map(|x| x as u32)
            .unwrap_or(max_weight);
        Ok(BetaTable {
            weight_bound,
            depth1,
            depth2,
            kernel_dims: BTreeMap::new(),
            kernel_bases: BTreeMap::new(),
        })
    }
}

fn parse_json_q(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::String(s) => parse_q(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(qi(i))
            } else {
                Err(CoreError::Parse(format!(
                    "numeric value {n} is not an exact integer"
                )))
            }
        }
        other => Err(CoreError::Parse(format!(
            "expected a rational string, found {other}"
        ))),
    }
}

/// One linear-system row: coefficients over the weight's unknown columns and
/// a right-hand side.
struct LinSystem {
    cols: Vec<(u32, u32)>,
    col_of: BTreeMap<(u32, u32), usize>,
    rows: Vec<(Vec<Q>, Q)>,
}

impl LinSystem {
    fn new(w: u32) -> Self {
        let cols: Vec<(u32, u32)> = (1..w).map(|a| (a, w - a)).collect();
        let col_of = cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        LinSystem {
            cols,
            col_of,
            rows: Vec::new(),
        }
    }

    /// Add the row `aff = 0`; constant-only rows are checked and dropped.
    fn add_row(&mut self, aff: &Aff, context: &str) -> Result<()> {
        if aff.lin.is_empty() {
            if aff.konst.is_zero() {
                return Ok(());
            }
            return Err(CoreError::SolverInconsistent(format!(
                "{context}: constant row {} should vanish",
                fmt_q(&aff.konst)
            )));
        }
        let mut coeffs = vec![Q::zero(); self.cols.len()];
        for (key, c) in &aff.lin {
            let idx = self.col_of.get(key).ok_or_else(|| {
                CoreError::SolverInconsistent(format!(
                    "{context}: unknown ({}, {}) is outside the weight's columns",
                    key.0, key.1
                ))
            })?;
            coeffs[*idx] = c.clone();
        }
        self.rows.push((coeffs, -aff.konst.clone()));
        Ok(())
    }

    /// Reduced row-echelon form; returns the pivot column of each pivot row.
    fn rref(&mut self) -> Result<Vec<usize>> {
        let ncols = self.cols.len();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..ncols {
            let Some(p) = (r..self.rows.len()).find(|&i| !self.rows[i].0[c].is_zero()) else {
                continue;
            };
            self.rows.swap(r, p);
            let inv = self.rows[r].0[c].clone();
            for x in self.rows[r].0.iter_mut() {
                *x = &*x / &inv;
            }
            self.rows[r].1 = &self.rows[r].1 / &inv;
            let pivot_row = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i == r || row.0[c].is_zero() {
                    continue;
                }
                let f = row.0[c].clone();
                for (x, px) in row.0.iter_mut().zip(pivot_row.0.iter()) {
                    *x -= px * &f;
                }
                row.1 -= &pivot_row.1 * &f;
            }
            pivots.push(c);
            r += 1;
        }
        for (coeffs, rhs) in &self.rows[r..] {
            debug_assert!(coeffs.iter().all(Zero::is_zero));
            if !rhs.is_zero() {
                return Err(CoreError::SolverInconsistent(format!(
                    "row reduces to 0 = {}",
                    fmt_q(rhs)
                )));
            }
        }
        Ok(pivots)
    }
}

/// Assemble and solve the defining system of one weight, writing the values
/// and kernel data into the table.
fn solve_weight(w: u32, gamma: &[Q], table: &mut BetaTable) -> Result<()> {
    let mut sys = LinSystem::new(w);
    let eng = engine();

    // Defining row for the divergent pair (1, w-1): its value is the
    // constant T-coefficient of the eliminated one-index word.
    let y_div = Word(vec![Letter::Y(1), Letter::Y(w - 1)]);
    let p_one = eval_tpoly(&reg_t_inv(ProductId::StuffleY, &y_div)?, &y_word_value)?;
    let mut def_row = Aff::unknown(1, w - 1);
    def_row.add_scaled(&p_one[0], &-Q::one());
    sys.add_row(&def_row, "divergent-pair definition")?;

    // Convergent double products in both products.
    for a in 2..=(w / 2) {
        let b = w - a;
        if b < 2 {
            continue;
        }
        let rhs = &bernoulli_seed(a) * &bernoulli_seed(b);

        let ya = Word::letter(Letter::Y(a));
        let yb = Word::letter(Letter::Y(b));
        let prod = eng.product(ProductId::StuffleY, &ya, &yb)?;
        let lhs = eval_tpoly(&reg_t_inv_lin(ProductId::StuffleY, &prod)?, &y_word_value)?;
        add_product_rows(&mut sys, &lhs, &rhs, "one-index double product")?;

        let xa = x_encode(&[a]);
        let xb = x_encode(&[b]);
        let prod = eng.product(ProductId::Shuffle, &xa, &xb)?;
        let lhs = eval_tpoly(&reg_t_inv_lin(ProductId::Shuffle, &prod)?, &x_word_value)?;
        add_product_rows(&mut sys, &lhs, &rhs, "two-letter double product")?;
    }

    // Comparison rows: both eliminations of the divergent pair agree after
    // the comparison map is applied to the one-index side.
    let x_div = x_encode(&[1, w - 1]);
    let p_two = eval_tpoly(&reg_t_inv(ProductId::Shuffle, &x_div)?, &x_word_value)?;
    let adjusted = compare_tpoly(&p_one, gamma);
    let deg = p_two.len().max(adjusted.len());
    for n in 0..deg {
        let mut diff = Aff::zero();
        if let Some(p) = p_two.get(n) {
            diff.add_scaled(p, &Q::one());
        }
        if let Some(p) = adjusted.get(n) {
            diff.add_scaled(p, &-Q::one());
        }
        sys.add_row(&diff, "regularization comparison")?;
    }

    let pivots = sys.rref()?;
    let mut is_pivot = vec![false; sys.cols.len()];
    for &c in &pivots {
        is_pivot[c] = true;
    }

    for (pi, &c) in pivots.iter().enumerate() {
        table.depth2.insert(sys.cols[c], sys.rows[pi].1.clone());
    }
    let mut kernel = Vec::new();
    for (f, &pivot) in is_pivot.iter().enumerate() {
        if pivot {
            continue;
        }
        // Free unknowns take the value zero in the stored table.
        table.depth2.insert(sys.cols[f], Q::zero());
        let mut vec = BTreeMap::new();
        vec.insert(sys.cols[f], Q::one());
        for (pi, &c) in pivots.iter().enumerate() {
            let coeff = -&sys.rows[pi].0[f];
            if !coeff.is_zero() {
                vec.insert(sys.cols[c], coeff);
            }
        }
        kernel.push(vec);
    }
    table.kernel_dims.insert(w, kernel.len());
    if !kernel.is_empty() {
        table.kernel_bases.insert(w, kernel);
    }
    Ok(())
}

/// Word of the two-letter alphabet for an index: each entry `k` contributes
/// `x0^{k-1} x1`.
fn x_encode(index: &[u32]) -> Word {
    let mut letters = Vec::new();
    for &k in index {
        for _ in 1..k {
            letters.push(Letter::X(0));
        }
        letters.push(Letter::X(1));
    }
    Word(letters)
}

/// Rows stating that an eliminated product equals a constant: the degree-zero
/// coefficient equals the constant and all higher coefficients vanish.
fn add_product_rows(sys: &mut LinSystem, lhs: &[Aff], rhs: &Q, context: &str) -> Result<()> {
    for (n, aff) in lhs.iter().enumerate() {
        let mut diff = aff.clone();
        if n == 0 {
            diff.add_scaled(&Aff::constant(rhs.clone()), &-Q::one());
        }
        sys.add_row(&diff, context)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Rational seed bimoulds.
// ---------------------------------------------------------------------------

/// Evaluate the rational seed mould at a list of linear forms: depth zero is
/// the constant 1, depth one is `sum_k value1(k) * f^{k-1}`, depth two is
/// `sum value2(k1, k2) * f1^{k1-1} f2^{k2-1}`.
fn seed_mould_at(
    beta: &BetaTable,
    forms: &[Vec<(i64, usize)>],
    target_len: usize,
    degree_cap: u32,
) -> Result<SparsePoly<Q>> {
    match forms {
        [] => Ok(SparsePoly::from_term(
            Mono(vec![0; target_len]),
            Q::one(),
        )),
        [f] => {
            let mut acc = SparsePoly::zero();
            for k in 2..=beta.weight_bound {
                if k - 1 > degree_cap {
                    break;
                }
                let c = beta.value1(k);
                if c.is_zero() {
                    continue;
                }
                acc = acc.add(&linear_power(f, (k - 1) as u16, target_len).scale(&c));
            }
            Ok(acc)
        }
        [f1, f2] => {
            let mut acc = SparsePoly::zero();
            for ((a, b), c) in &beta.depth2 {
                if c.is_zero() || (a - 1) + (b - 1) > degree_cap {
                    continue;
                }
                let pa = linear_power(f1, (a - 1) as u16, target_len);
                let pb = linear_power(f2, (b - 1) as u16, target_len);
                acc = acc.add(&pa.mul(&pb, Some(degree_cap)).scale(c));
            }
            Ok(acc)
        }
        _ => Err(CoreError::DepthUnsupported(
            "rational seed mould is available to depth two".into(),
        )),
    }
}

/// Depth-`d` part of the rational seed bimould in `2d` variables:
/// `sum_{0<=i<=j<=d} gamma_i * seed_{j-i}(Y-prefix sums, decreasing) *
/// seed_{d-j}(X_{j+1}, ..., X_d)`.
fn seed_part(beta: &BetaTable, gamma: &[Q], d: usize, weight_bound: u32) -> Result<SparsePoly<Q>> {
    let cap = weight_bound.saturating_sub(d as u32);
    let mut acc = SparsePoly::zero();
    for j in 0..=d {
        for (i, gi) in gamma.iter().enumerate().take(j + 1) {
            if gi.is_zero() {
                continue;
            }
            let y_forms: Vec<Vec<(i64, usize)>> = (1..=(j - i))
                .rev()
                .map(|r| (0..r).map(|m| (1i64, 2 * m + 1)).collect())
                .collect();
            let x_forms: Vec<Vec<(i64, usize)>> =
                (j..d).map(|m| vec![(1i64, 2 * m)]).collect();
            let py = seed_mould_at(beta, &y_forms, 2 * d, cap)?;
            let px = seed_mould_at(beta, &x_forms, 2 * d, cap)?;
            acc = acc.add(&py.mul(&px, Some(cap)).scale(gi));
        }
    }
    Ok(acc)
}

/// Depth-`d` part of the companion bimould:
/// `sum_{i=0}^d ((-1)^i / (2^i i!)) * seed_{d-i}(X_{i+1}, ..., X_d; -Y_1,
/// ..., -Y_{d-i})`.
fn tail_part(seed_parts: &[SparsePoly<Q>], d: usize) -> SparsePoly<Q> {
    let mut acc = SparsePoly::zero();
    for i in 0..=d {
        let sign = if i % 2 == 0 { Q::one() } else { -Q::one() };
        let two_pow = Q::from_integer(BigInt::one() << i);
        let coeff = sign / (two_pow * factorial_q(i as u64));
        let inner = &seed_parts[d - i];
        let subst = Subst {
            assigns: (0..2 * (d - i))
                .map(|v| {
                    let slot = v / 2;
                    if v % 2 == 0 {
                        vec![(1i64, 2 * (i + slot))]
                    } else {
                        vec![(-1i64, 2 * slot + 1)]
                    }
                })
                .collect(),
            target_len: 2 * d,
        };
        acc = acc.add(&inner.substitute(&subst).scale(&coeff));
    }
    acc
}

// ---------------------------------------------------------------------------
// Series half: lattice sums.
// ---------------------------------------------------------------------------

/// Depth-one lattice sum as a polynomial in `(X1, Y1)`: the coefficient of
/// `X^e Y^f` is `sum_{n,u>=1, nu<=order} (n^e/e!) (u^f/f!) q^{nu}`.
fn lattice_depth1(order: usize, weight_bound: u32) -> SparsePoly<QSeries> {
    let cap = weight_bound.saturating_sub(1) as usize;
    let mut pow_table: Vec<Vec<BigInt>> = Vec::with_capacity(order + 1);
    for x in 0..=order {
        let mut row = Vec::with_capacity(cap + 1);
        let mut acc = BigInt::one();
        for _ in 0..=cap {
            row.push(acc.clone());
            acc *= x;
        }
        pow_table.push(row);
    }
    let mut out = SparsePoly::zero();
    for e in 0..=cap {
        for f in 0..=(cap - e) {
            let mut coeffs = vec![BigInt::zero(); order + 1];
            for n in 1..=order {
                for u in 1..=(order / n) {
                    coeffs[n * u] += &pow_table[n][e] * &pow_table[u][f];
                }
            }
            let norm = factorial_q(e as u64) * factorial_q(f as u64);
            let series = QSeries::from_coeffs(
                coeffs
                    .into_iter()
                    .map(|c| Q::from_integer(c) / &norm)
                    .collect(),
            );
            if !series.is_zero() {
                out.add_term(Mono(vec![e as u16, f as u16]), series);
            }
        }
    }
    out
}

/// Sum over layer pairs `u1 > u2 >= 1` of the product of two depth-one
/// lattice sums in `(X1, Y1)` and `(X2, Y2)`.
///
/// Accumulates integer numerators in `u128`, which is safe because a term is
/// bounded by `order^degree_cap` and there are far fewer than `2^30`
/// contributing lattice points.
fn lattice_pair_depth2(order: usize, degree_cap: u32) -> SparsePoly<QSeries> {
    let cap = degree_cap as usize;
    let mut pow_table: Vec<Vec<u128>> = Vec::with_capacity(order + 1);
    for x in 0..=order {
        let mut row = Vec::with_capacity(cap + 1);
        let mut acc: u128 = 1;
        for _ in 0..=cap {
            row.push(acc);
            acc = acc.saturating_mul(x as u128);
        }
        pow_table.push(row);
    }
    // Exponent tuples grouped by the first pair so the first two powers are
    // hoisted out of the innermost loop.  Each group carries the shared
    // leading exponents and the flat tuple id plus trailing exponents.
    type TupleGroup = ((usize, usize), Vec<(usize, usize, usize)>);
    let mut groups: Vec<TupleGroup> = Vec::new();
    let mut tuple_count = 0usize;
    for e1 in 0..=cap {
        for f1 in 0..=(cap - e1) {
            let mut rest = Vec::new();
            for e2 in 0..=(cap - e1 - f1) {
                for f2 in 0..=(cap - e1 - f1 - e2) {
                    rest.push((tuple_count, e2, f2));
                    tuple_count += 1;
                }
            }
            groups.push(((e1, f1), rest));
        }
    }
    let mut acc: Vec<Vec<u128>> = vec![vec![0u128; order + 1]; tuple_count];
    for u1 in 2..=order {
        for n1 in 1..=(order / u1) {
            let c1 = n1 * u1;
            if c1 >= order {
                continue;
            }
            for u2 in 1..u1 {
                for n2 in 1..=((order - c1) / u2) {
                    let qexp = c1 + n2 * u2;
                    for ((e1, f1), rest) in &groups {
                        let head = pow_table[n1][*e1] * pow_table[u1][*f1];
                        if head == 0 {
                            continue;
                        }
                        for (idx, e2, f2) in rest {
                            acc[*idx][qexp] +=
                                head * pow_table[n2][*e2] * pow_table[u2][*f2];
                        }
                    }
                }
            }
        }
    }
    let mut out = SparsePoly::zero();
    let mut tuple_idx = 0usize;
    for e1 in 0..=cap {
        for f1 in 0..=(cap - e1) {
            for e2 in 0..=(cap - e1 - f1) {
                for f2 in 0..=(cap - e1 - f1 - e2) {
                    let row = &acc[tuple_idx];
                    tuple_idx += 1;
                    if row.iter().all(|&x| x == 0) {
                        continue;
                    }
                    let norm = factorial_q(e1 as u64)
                        * factorial_q(f1 as u64)
                        * factorial_q(e2 as u64)
                        * factorial_q(f2 as u64);
                    let series = QSeries::from_coeffs(
                        row.iter()
                            .map(|&c| Q::from_integer(BigInt::from(c)) / &norm)
                            .collect(),
                    );
                    out.add_term(
                        Mono(vec![e1 as u16, f1 as u16, e2 as u16, f2 as u16]),
                        series,
                    );
                }
            }
        }
    }
    out
}

/// Build the lattice-sum bimould up to the requested depth.
///
/// Depth one is the plain lattice sum.  Depth two groups the three block
/// decompositions of the defining sum: a single layer carrying both
/// Y-variables times a companion factor on either side, plus the sum over
/// strictly ordered layer pairs.
fn build_lattice(
    order: usize,
    weight_bound: u32,
    depth_max: usize,
    seed_parts: &[SparsePoly<Q>],
    tail_parts: &[SparsePoly<Q>],
) -> Result<TruncBimould<QSeries>> {
    let mut parts: Vec<SparsePoly<QSeries>> = Vec::with_capacity(depth_max + 1);
    parts.push(SparsePoly::from_term(Mono::zero(0), QSeries::one(order)));
    let lam = if depth_max >= 1 {
        lattice_depth1(order, weight_bound)
    } else {
        SparsePoly::zero()
    };
    if depth_max >= 1 {
        parts.push(lam.clone());
    }
    if depth_max >= 2 {
        let cap = weight_bound.saturating_sub(2);
        // Single layer at the first slot: Lambda(X1; Y1+Y2) * tail(X2-X1; Y2).
        let lam_first = lam.substitute(&Subst {
            assigns: vec![vec![(1, 0)], vec![(1, 1), (1, 3)]],
            target_len: 4,
        });
        let tail_sub = tail_parts[1].substitute(&Subst {
            assigns: vec![vec![(-1, 0), (1, 2)], vec![(1, 3)]],
            target_len: 4,
        });
        let t1 = lam_first.mul_q(&tail_sub, Some(cap));
        // Single layer at the second slot: seed(X1-X2; Y1) * Lambda(X2; Y1+Y2).
        let lam_second = lam.substitute(&Subst {
            assigns: vec![vec![(1, 2)], vec![(1, 1), (1, 3)]],
            target_len: 4,
        });
        let seed_sub = seed_parts[1].substitute(&Subst {
            assigns: vec![vec![(1, 0), (-1, 2)], vec![(1, 1)]],
            target_len: 4,
        });
        let t2 = lam_second.mul_q(&seed_sub, Some(cap));
        let pairs = lattice_pair_depth2(order, cap);
        parts.push(t1.add(&t2).add(&pairs));
    }
    if depth_max >= 3 {
        return Err(CoreError::DepthUnsupported(
            "lattice bimould is implemented to depth two".into(),
        ));
    }
    Ok(TruncBimould::from_parts(parts, weight_bound))
}

// ---------------------------------------------------------------------------
// The assembled context.
// ---------------------------------------------------------------------------

/// Size limits of one construction run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisensteinParams {
    /// Largest depth of the bimoulds (at most 2).
    pub depth_max: usize,
    /// Largest monomial weight kept in every bimould part.
    pub weight_bound: u32,
    /// Truncation order of the q-expansions.
    pub order: usize,
}

impl EisensteinParams {
    pub fn new(depth_max: usize, weight_bound: u32, order: usize) -> Self {
        EisensteinParams {
            depth_max,
            weight_bound,
            order,
        }
    }
}

/// All bimoulds of one construction run, ready for coefficient extraction.
#[derive(Clone, Debug)]
pub struct EisensteinContext {
    pub params: EisensteinParams,
    /// Solved constant table used by the rational half.
    pub beta: BetaTable,
    /// Comparison-map coefficients.
    pub gamma: Vec<Q>,
    /// Rational seed bimould (the constant terms of the construction).
    pub seed: TruncBimould<Q>,
    /// Companion of the seed used on the right edge of the lattice sums.
    pub tail: TruncBimould<Q>,
    /// Lattice-sum bimould.
    pub lattice: TruncBimould<QSeries>,
    /// The full series bimould: mould product of the lattice sums with the
    /// seed (lattice block first).
    pub eisenstein: TruncBimould<QSeries>,
    /// The same bimould after the inverse Y-resummation; its plain
    /// coefficients are the balanced multiple q-zeta values.
    pub balanced: TruncBimould<QSeries>,
}

impl EisensteinContext {
    /// Build a context with the canonical solved constant table.
    pub fn build(params: EisensteinParams) -> Result<Self> {
        let beta = if params.depth_max >= 2 {
            BetaTable::solve(params.weight_bound)?
        } else {
            BetaTable::depth1_only(params.weight_bound)
        };
        Self::build_with_beta(params, beta)
    }

    /// Build a context from a caller-supplied constant table.
    pub fn build_with_beta(params: EisensteinParams, beta: BetaTable) -> Result<Self> {
        if params.depth_max > 2 {
            return Err(CoreError::DepthUnsupported(
                "construction is implemented to depth two".into(),
            ));
        }
        if params.order == 0 {
            return Err(CoreError::InvalidWord(
                "series order must be at least one".into(),
            ));
        }
        if beta.weight_bound < params.weight_bound {
            return Err(CoreError::InvalidWord(format!(
                "constant table covers weight {} but the context needs {}",
                beta.weight_bound, params.weight_bound
            )));
        }
        let gamma = gamma_coeffs(params.weight_bound.max(4) as usize);
        let mut seed_parts = Vec::with_capacity(params.depth_max + 1);
        for d in 0..=params.depth_max {
            seed_parts.push(seed_part(&beta, &gamma, d, params.weight_bound)?);
        }
        let tail_parts: Vec<SparsePoly<Q>> = (0..=params.depth_max)
            .map(|d| tail_part(&seed_parts, d))
            .collect();
        let lattice = build_lattice(
            params.order,
            params.weight_bound,
            params.depth_max,
            &seed_parts,
            &tail_parts,
        )?;
        let seed = TruncBimould::from_parts(seed_parts, params.weight_bound);
        let tail = TruncBimould::from_parts(tail_parts, params.weight_bound);
        let eisenstein = lattice.mould_mul_q(&seed);
        let balanced = eisenstein.hash_y_inv();
        Ok(EisensteinContext {
            params,
            beta,
            gamma,
            seed,
            tail,
            lattice,
            eisenstein,
            balanced,
        })
    }

    pub fn order(&self) -> usize {
        self.params.order
    }

    pub fn weight_bound(&self) -> u32 {
        self.params.weight_bound
    }

    /// Exponent-pair blocks of a convergent word of the `b` alphabet.
    fn word_blocks(&self, w: &Word) -> Result<Vec<(u32, u32)>> {
        let blocks = w.b_blocks()?;
        if blocks.leading_b0 > 0 {
            return Err(CoreError::InvalidWord(
                "q-zeta extraction needs a convergent word (no leading b0)".into(),
            ));
        }
        Ok(blocks.pairs)
    }

    fn mono_for(&self, pairs: &[(u32, u32)]) -> Result<Mono> {
        let d = pairs.len();
        if d > self.params.depth_max {
            return Err(CoreError::DepthUnsupported(format!(
                "depth {d} beyond the context depth bound {}",
                self.params.depth_max
            )));
        }
        let mut exps = Vec::with_capacity(2 * d);
        let mut weight = 0u32;
        for &(k, m) in pairs {
            exps.push((k - 1) as u16);
            exps.push(m as u16);
            weight += k + m;
        }
        if weight > self.params.weight_bound {
            return Err(CoreError::WindowExceeded(format!(
                "weight {weight} beyond the context weight bound {}",
                self.params.weight_bound
            )));
        }
        Ok(Mono(exps))
    }

    /// Balanced multiple q-zeta value of a convergent word: the plain
    /// coefficient of the resummed bimould.
    pub fn zeta_q_word(&self, w: &Word) -> Result<QSeries> {
        let pairs = self.word_blocks(w)?;
        let mono = self.mono_for(&pairs)?;
        Ok(match self.balanced.coeff(pairs.len(), &mono)? {
            Some(series) => series.clone(),
            None => QSeries::zero(self.params.order),
        })
    }

    /// Balanced multiple q-zeta value of an index `(s1, ..., sl)` with
    /// `s1 >= 1` and the other entries arbitrary (zero entries extend the
    /// previous block).
    pub fn zeta_q(&self, index: &[u32]) -> Result<QSeries> {
        if index.is_empty() {
            return Ok(QSeries::one(self.params.order));
        }
        if index[0] == 0 {
            return Err(CoreError::InvalidWord(
                "a q-zeta index must start with a positive entry".into(),
            ));
        }
        self.zeta_q_word(&Word::from_b_indices(index))
    }

    /// Linear extension of [`EisensteinContext::zeta_q_word`].
    pub fn zeta_q_lin(&self, lc: &LinComb) -> Result<QSeries> {
        let mut out = QSeries::zero(self.params.order);
        for (w, c) in lc.iter() {
            out = out.add(&self.zeta_q_word(w)?.scale(c));
        }
        Ok(out)
    }

    /// Factorial-normalized coefficient of the full series bimould: the
    /// coefficient of `prod X_i^{k_i - 1} Y_i^{m_i} / m_i!`.
    pub fn g_coeff(&self, pairs: &[(u32, u32)]) -> Result<QSeries> {
        let mono = self.mono_for(pairs)?;
        let plain = match self.eisenstein.coeff(pairs.len(), &mono)? {
            Some(series) => series.clone(),
            None => QSeries::zero(self.params.order),
        };
        let mut norm = Q::one();
        for &(_, m) in pairs {
            norm *= factorial_q(m as u64);
        }
        Ok(plain.scale(&norm))
    }
}
