//! Dense exact q-expansions and the nested-sum generators used as oracles.
//!
//! A [`QSeries`] stores the coefficients of `q^0 .. q^order` as exact
//! rationals. Operations never extrapolate: the order of a sum or product is
//! the minimum of the operand orders, and `agrees_with` compares two series
//! on the overlap of their windows. `==` is strict (same order and same
//! coefficients); use [`QSeries::agrees_with`] for the window comparison.
//!
//! The generators in this module are deliberately naive nested sums so they
//! can serve as independent oracles for the generating-series pipeline:
//!
//! * [`generic_qzeta`] — sums `prod_j R_j(q^{n_j}) / (1-q^{n_j})^{s_j}` over
//!   strictly decreasing tuples `n_1 > ... > n_l >= 1`.
//! * [`bracket_sum`] — sums monomials `u_i^{a_i} v_i^{b_i} q^{sum u_i v_i}`
//!   over strictly decreasing `u` tuples and independent `v >= 1`.
//! * [`partition_gen`] — the same values obtained by enumerating partitions
//!   with a prescribed number of distinct part sizes.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{bernoulli, factorial_q, binomial_q, Q};
use crate::{CoreError, Result};

/// Dense q-expansion with exact rational coefficients, truncated at `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Q>,
}

impl QSeries {
    /// The zero series known through `q^order`.
    pub fn zero(order: usize) -> Self {
        QSeries {
            coeffs: vec![Q::zero(); order + 1],
        }
    }

    /// The constant series 1 known through `q^order`.
    pub fn one(order: usize) -> Self {
        Self::constant(Q::one(), order)
    }

    /// A constant series known through `q^order`.
    pub fn constant(c: Q, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `c * q^n` known through `q^order`. Panics if `n > order`.
    pub fn monomial(c: Q, n: usize, order: usize) -> Self {
        assert!(n <= order, "monomial degree beyond order");
        let mut s = Self::zero(order);
        s.coeffs[n] = c;
        s
    }

    /// Build from explicit coefficients `[c_0, c_1, ...]`.
    pub fn from_coeffs(coeffs: Vec<Q>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least q^0");
        QSeries { coeffs }
    }

    /// Largest exponent with a known coefficient.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `q^n`. Panics beyond the order; use
    /// [`QSeries::try_coeff`] for a checked read.
    pub fn coeff(&self, n: usize) -> &Q {
        &self.coeffs[n]
    }

    /// Checked coefficient read.
    pub fn try_coeff(&self, n: usize) -> Result<&Q> {
        self.coeffs.get(n).ok_or_else(|| {
            CoreError::WindowExceeded(format!(
                "coefficient of q^{n} requested, series known to q^{}",
                self.order()
            ))
        })
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Q::is_zero)
    }

    /// Add a rational multiple of `q^n` in place; ignores `n` beyond the
    /// order (the window absorbs it).
    pub fn add_monomial(&mut self, c: &Q, n: usize) {
        if n < self.coeffs.len() && !c.is_zero() {
            self.coeffs[n] += c.clone();
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        let mut out = QSeries::zero(order);
        for n in 0..=order {
            out.coeffs[n] = self.coeffs[n].clone() + other.coeffs[n].clone();
        }
        out
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        let mut out = QSeries::zero(order);
        for n in 0..=order {
            out.coeffs[n] = self.coeffs[n].clone() - other.coeffs[n].clone();
        }
        out
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    /// Product, truncated at the smaller operand order.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        let mut out = QSeries::zero(order);
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(order - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] += self.coeffs[i].clone() * other.coeffs[j].clone();
            }
        }
        out
    }

    /// Restrict to a smaller window.
    pub fn truncated(&self, order: usize) -> Result<QSeries> {
        if order > self.order() {
            return Err(CoreError::WindowExceeded(format!(
                "cannot extend series of order {} to order {order}",
                self.order()
            )));
        }
        Ok(QSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    /// The derivation `q d/dq`.
    pub fn qderiv(&self) -> QSeries {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c.clone() * Q::from_integer(BigInt::from(n)))
                .collect(),
        }
    }

    /// Equality on the overlap of the two windows.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        let order = self.order().min(other.order());
        (0..=order).all(|n| self.coeffs[n] == other.coeffs[n])
    }

    /// Exponent of the first disagreement within the overlap, if any.
    pub fn first_difference(&self, other: &QSeries) -> Option<usize> {
        let order = self.order().min(other.order());
        (0..=order).find(|&n| self.coeffs[n] != other.coeffs[n])
    }

    /// Evaluate at a floating-point `q0` by Horner's rule (advisory use
    /// only; everything else in this crate is exact).
    pub fn eval_float(&self, q0: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            let num = c.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
            let den = c.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
            acc = acc * q0 + num / den;
        }
        acc
    }
}

impl std::fmt::Display for QSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let mag_str = mag.to_string();
            let is_int = mag.is_integer();
            if n == 0 {
                write!(f, "{mag_str}")?;
            } else {
                let power = if n == 1 {
                    "q".to_string()
                } else {
                    format!("q^{n}")
                };
                if mag.is_one() {
                    write!(f, "{power}")?;
                } else if is_int {
                    write!(f, "{mag_str}{power}")?;
                } else {
                    write!(f, "{mag_str}*{power}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Parse a series in the display format (`"-1/24 + q + 3q^2"`, `"0"`) up to
/// the stated order.  Inverse of `Display`: printing and reparsing at the
/// same order gives back the same series.
pub fn parse_qseries(s: &str, order: usize) -> Result<QSeries> {
    let t = s.trim();
    let mut out = QSeries::zero(order);
    if t.is_empty() || t == "0" {
        return Ok(out);
    }
    let mut rest = t;
    let mut neg = false;
    if let Some(r) = rest.strip_prefix('-') {
        neg = true;
        rest = r.trim_start();
    }
    loop {
        let plus = rest.find(" + ");
        let minus = rest.find(" - ");
        let (term, next) = match (plus, minus) {
            (None, None) => (rest, None),
            (Some(p), None) => (&rest[..p], Some((false, p + 3))),
            (None, Some(m)) => (&rest[..m], Some((true, m + 3))),
            (Some(p), Some(m)) if p < m => (&rest[..p], Some((false, p + 3))),
            (_, Some(m)) => (&rest[..m], Some((true, m + 3))),
        };
        let term = term.trim();
        if term.is_empty() {
            return Err(CoreError::Parse(format!("empty term in '{t}'")));
        }
        // Split off the power part: "q", "q^n", or nothing (constant term).
        let (coeff_str, n) = match term.find('q') {
            None => (term, 0usize),
            Some(i) => {
                let power = &term[i..];
                let n = if power == "q" {
                    1
                } else if let Some(e) = power.strip_prefix("q^") {
                    e.parse::<usize>()
                        .map_err(|_| CoreError::Parse(format!("bad exponent in '{term}'")))?
                } else {
                    return Err(CoreError::Parse(format!("bad power in '{term}'")));
                };
                (term[..i].trim_end_matches('*').trim(), n)
            }
        };
        let mut c = if coeff_str.is_empty() {
            Q::one()
        } else {
            crate::rational::parse_q(coeff_str)?
        };
        if neg {
            c = -c;
        }
        if n > order {
            return Err(CoreError::Parse(format!(
                "term q^{n} exceeds the stated order {order}"
            )));
        }
        out.add_monomial(&c, n);
        match next {
            None => break,
            Some((next_neg, skip)) => {
                rest = &rest[skip..];
                neg = next_neg;
            }
        }
    }
    Ok(out)
}

/// Nested sum `sum_{n_1 > ... > n_l >= 1} prod_j R_j(q^{n_j}) / (1-q^{n_j})^{s_j}`
/// truncated at `q^order`.
///
/// `rs[j]` holds the coefficients of `R_{j+1}` in the variable `t`. The
/// outermost polynomial must have zero constant term (otherwise the sum is
/// not a well-defined q-series), and the outermost exponent must be at
/// least 1.
pub fn generic_qzeta(s: &[u32], rs: &[Vec<Q>], order: usize) -> Result<QSeries> {
    if s.len() != rs.len() {
        return Err(CoreError::InvalidWord(format!(
            "{} exponents but {} numerator polynomials",
            s.len(),
            rs.len()
        )));
    }
    if s.is_empty() {
        return Ok(QSeries::one(order));
    }
    if s[0] < 1 {
        return Err(CoreError::InvalidWord(
            "outermost exponent must be at least 1".into(),
        ));
    }
    if rs[0].first().map(Q::is_zero) == Some(false) {
        return Err(CoreError::InvalidWord(
            "outermost numerator polynomial must have zero constant term".into(),
        ));
    }

    // factor(j, n) = R_j(q^n) / (1-q^n)^{s_j} as a window-`order` series.
    let factor = |j: usize, n: usize| -> QSeries {
        let mut out = QSeries::zero(order);
        let sj = s[j] as usize;
        for (a, ra) in rs[j].iter().enumerate() {
            if ra.is_zero() {
                continue;
            }
            if sj == 0 {
                if n * a <= order {
                    out.coeffs[n * a] += ra.clone();
                }
                continue;
            }
            let mut t = 0usize;
            while n * (a + t) <= order {
                let c = binomial_q((t + sj - 1) as u64, (sj - 1) as u64);
                out.coeffs[n * (a + t)] += ra.clone() * c;
                t += 1;
            }
        }
        out
    };

    // tail[m] = sum over admissible (n_j > ... > n_l) with n_j <= m of the
    // inner product, built from the innermost index outward.
    let l = s.len();
    let mut tail: Vec<QSeries> = vec![QSeries::one(order); order + 1];
    for j in (0..l).rev() {
        let mut new_tail = vec![QSeries::zero(order)];
        let mut acc = QSeries::zero(order);
        for n in 1..=order {
            let term = if j + 1 == l {
                factor(j, n)
            } else {
                factor(j, n).mul(&tail[n - 1])
            };
            acc = acc.add(&term);
            new_tail.push(acc.clone());
        }
        tail = new_tail;
    }
    Ok(tail[order].clone())
}

/// Bracket-type double sum: for exponent pairs `(a_i, b_i)`, the series
///
/// ```text
/// sum_{u_1 > ... > u_d >= 1} sum_{v_1, ..., v_d >= 1}
///     prod_i u_i^{a_i} v_i^{b_i} q^{u_1 v_1 + ... + u_d v_d}
/// ```
pub fn bracket_sum(exps: &[(u32, u32)], order: usize) -> QSeries {
    let d = exps.len();
    if d == 0 {
        return QSeries::one(order);
    }
    // Inner v-sums factor: g(b, u) = sum_{v >= 1, uv <= order} v^b q^{uv}.
    let g = |b: u32, u: usize| -> QSeries {
        let mut out = QSeries::zero(order);
        let mut v = 1usize;
        while u * v <= order {
            out.coeffs[u * v] += Q::from_integer(BigInt::from(v).pow(b));
            v += 1;
        }
        out
    };
    let mut total = QSeries::zero(order);
    // Enumerate strictly decreasing u tuples with sum <= order (each v_i is
    // at least 1, so tuples with a larger sum cannot contribute).
    fn rec(
        exps: &[(u32, u32)],
        g: &dyn Fn(u32, usize) -> QSeries,
        i: usize,
        u_max: usize,
        budget: usize,
        partial: &QSeries,
        total: &mut QSeries,
    ) {
        if i == exps.len() {
            *total = total.add(partial);
            return;
        }
        let remaining_min: usize = exps.len() - i - 1; // later u's each >= 1
        let mut u = u_max;
        while u >= 1 {
            // Later u's are strictly smaller; they need at least
            // 1 + 2 + ... but a simple lower bound of 1 each suffices to
            // prune.
            if u + remaining_min <= budget {
                let (a, b) = exps[i];
                let factor = g(b, u).scale(&Q::from_integer(BigInt::from(u).pow(a)));
                let next = partial.mul(&factor);
                if !next.is_zero() {
                    rec(exps, g, i + 1, u - 1, budget - u, &next, total);
                }
            }
            u -= 1;
        }
    }
    rec(exps, &g, 0, order, order, &QSeries::one(order), &mut total);
    total
}

/// Partition generating series: coefficient of `q^N` is the sum over all
/// partitions of `N` having exactly `d = exps.len()` distinct part sizes
/// `i_1 > ... > i_d` (with multiplicities `m_1, ..., m_d >= 1`) of
/// `prod_j i_j^{a_j} m_j^{b_j}`.
///
/// By pairing part sizes with the `u` variables and multiplicities with the
/// `v` variables this equals [`bracket_sum`] with the same exponents; the
/// two enumeration strategies are independent, which makes the pair a useful
/// cross-check.
pub fn partition_gen(exps: &[(u32, u32)], order: usize) -> QSeries {
    let d = exps.len();
    let mut out = QSeries::zero(order);
    if d == 0 {
        out.coeffs[0] = Q::one();
        return out;
    }
    // Enumerate all partitions of all N <= order by nonincreasing parts,
    // tracking (size, multiplicity) runs as they form.
    fn rec(
        exps: &[(u32, u32)],
        out: &mut QSeries,
        runs: &mut Vec<(usize, u32)>,
        largest_allowed: usize,
        total: usize,
        order: usize,
    ) {
        // Close the current partition if it has exactly d runs.
        if total > 0 && runs.len() == exps.len() {
            let mut val = Q::one();
            for (j, &(size, mult)) in runs.iter().enumerate() {
                let (a, b) = exps[j];
                val *= Q::from_integer(
                    BigInt::from(size).pow(a) * BigInt::from(mult).pow(b),
                );
            }
            out.coeffs[total] += val;
        }
        if runs.len() > exps.len() {
            return;
        }
        for part in (1..=largest_allowed.min(order - total)).rev() {
            let extends_run = runs.last().map(|&(s, _)| s == part).unwrap_or(false);
            if extends_run {
                runs.last_mut().unwrap().1 += 1;
            } else {
                runs.push((part, 1));
            }
            rec(exps, out, runs, part, total + part, order);
            if extends_run {
                runs.last_mut().unwrap().1 -= 1;
            } else {
                runs.pop();
            }
        }
    }
    rec(exps, &mut out, &mut Vec::new(), order, 0, order);
    out
}

/// Divisor power sums: `sum_{n >= 1} sigma_r(n) q^n`.
pub fn sigma_divisor(r: u32, order: usize) -> QSeries {
    let mut out = QSeries::zero(order);
    for d in 1..=order {
        for m in 1..=(order / d) {
            out.coeffs[d * m] += Q::from_integer(BigInt::from(d).pow(r));
        }
    }
    out
}

/// Closed form for the depth-one balanced value with indices `(k, {0}^m)`:
///
/// ```text
/// -B_k/(2 k!) [m = 0]  -  B_{m+1}/(2 (m+1)!) [k = 1]
///   + 1/((k-1)! m!) * sum_{u,v >= 1} u^m v^{k-1} q^{uv}
/// ```
pub fn depth1_balanced_closed_form(k: u32, m: u32, order: usize) -> Result<QSeries> {
    if k < 1 {
        return Err(CoreError::InvalidWord(
            "depth-one closed form needs k >= 1".into(),
        ));
    }
    let mut out = QSeries::zero(order);
    if m == 0 {
        out.coeffs[0] -= bernoulli(k as u64) / (Q::from_integer(BigInt::from(2)) * factorial_q(k as u64));
    }
    if k == 1 {
        out.coeffs[0] -= bernoulli((m + 1) as u64)
            / (Q::from_integer(BigInt::from(2)) * factorial_q((m + 1) as u64));
    }
    let norm = (factorial_q((k - 1) as u64) * factorial_q(m as u64)).recip();
    for u in 1..=order {
        for v in 1..=(order / u) {
            let term = Q::from_integer(BigInt::from(u).pow(m) * BigInt::from(v).pow(k - 1));
            out.coeffs[u * v] += term * norm.clone();
        }
    }
    Ok(out)
}

/// The discriminant series `q prod_{n >= 1} (1 - q^n)^{24}` truncated at
/// `q^order`.
pub fn delta_q(order: usize) -> QSeries {
    let mut prod = QSeries::one(order);
    for n in 1..=order {
        // Multiply by (1 - q^n)^24 via repeated sparse multiplication.
        let mut factor = QSeries::zero(order);
        factor.coeffs[0] = Q::one();
        if n <= order {
            factor.coeffs[n] = -Q::one();
        }
        let mut pow = QSeries::one(order);
        let mut base = factor;
        let mut e = 24u32;
        while e > 0 {
            if e & 1 == 1 {
                pow = pow.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        prod = prod.mul(&pow);
    }
    let mut out = QSeries::zero(order);
    for n in 0..order {
        out.coeffs[n + 1] = prod.coeffs[n].clone();
    }
    out
}
