//! Exact rational arithmetic helpers.
//!
//! * [`Q`] — arbitrary-precision rational, the coefficient field everywhere.
//! * [`bernoulli`] — Bernoulli numbers with the B_1 = -1/2 convention.
//! * [`binomial`], [`factorial`] — exact combinatorial coefficients.
//! * [`parse_q`] / plain `Display` — the `p/q` text form used by the CLI and
//!   the JSON file formats.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::sync::Mutex;

use crate::{CoreError, Result};

/// Arbitrary-precision rational number.
pub type Q = num_rational::BigRational;

/// Rational from a machine integer.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational `num/den`. Panics if `den == 0`.
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `p`, `-p`, or `p/q` into a rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    if t.is_empty() {
        return Err(CoreError::Parse("empty rational".into()));
    }
    t.parse::<Q>()
        .map_err(|e| CoreError::Parse(format!("bad rational '{t}': {e}")))
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// `n!` as a rational.
pub fn factorial_q(n: u64) -> Q {
    Q::from_integer(factorial(n))
}

/// Binomial coefficient `C(n, k)` as a big integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient as a rational.
pub fn binomial_q(n: u64, k: u64) -> Q {
    Q::from_integer(binomial(n, k))
}

static BERNOULLI_CACHE: Lazy<Mutex<Vec<Q>>> = Lazy::new(|| Mutex::new(vec![Q::one()]));

/// Bernoulli number `B_n` with the convention `B_1 = -1/2`.
///
/// Computed from the recurrence `sum_{j=0}^{n} C(n+1, j) B_j = 0` for
/// `n >= 1`, with all values cached.
pub fn bernoulli(n: u64) -> Q {
    let mut cache = BERNOULLI_CACHE.lock().unwrap();
    while (cache.len() as u64) <= n {
        let m = cache.len() as u64;
        // B_m = -1/(m+1) * sum_{j=0}^{m-1} C(m+1, j) B_j
        let mut acc = Q::zero();
        for j in 0..m {
            acc += Q::from_integer(binomial(m + 1, j)) * &cache[j as usize];
        }
        let val = -acc / Q::from_integer(BigInt::from(m + 1));
        cache.push(val);
    }
    cache[n as usize].clone()
}

/// Render a rational exactly as the CLI prints it: `p` or `p/q`.
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

/// Render a rational's absolute value (used when the sign is printed
/// separately, as in linear combinations).
pub fn fmt_q_abs(x: &Q) -> String {
    x.abs().to_string()
}
