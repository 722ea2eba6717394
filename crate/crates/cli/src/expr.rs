//! Tiny expression language for the q-expansion oracles.
//!
//! One function call per expression, no arithmetic between calls:
//!
//! * `zq(s1,...,sl; R1,...,Rl)` — nested-sum q-zeta with one polynomial
//!   weight `R_i` in `t` per index (`t` stands for `q^{n_i}`).
//! * `balanced(k, m)` — depth-one closed form.
//! * `bracket(a1,b1; a2,b2; ...)` — double nested sum with monomial weights.
//! * `sigma(r)` — divisor-power sum generating series.
//! * `delta` — the discriminant cusp form expansion.

use anyhow::{anyhow, bail, Result};
use qmzv_core::qseries::{
    bracket_sum, delta_q, depth1_balanced_closed_form, generic_qzeta, sigma_divisor, QSeries,
};
use qmzv_core::rational::{parse_q, qi};
use qmzv_core::Q;

/// Evaluate one expression at the given truncation order.
pub fn eval(expr: &str, order: usize) -> Result<QSeries> {
    let t = expr.trim();
    if t == "delta" || t == "delta()" {
        return Ok(delta_q(order));
    }
    let (name, inner) = split_call(t)?;
    match name {
        "zq" => {
            let (left, right) = inner
                .split_once(';')
                .ok_or_else(|| anyhow!("zq needs 'indices; weights', e.g. zq(2;t)"))?;
            let s = parse_u32_list(left)?;
            let rs: Vec<Vec<Q>> = right
                .split(',')
                .map(parse_poly_in_t)
                .collect::<Result<_>>()?;
            if s.len() != rs.len() {
                bail!("zq got {} indices but {} weights", s.len(), rs.len());
            }
            Ok(generic_qzeta(&s, &rs, order)?)
        }
        "balanced" => {
            let args = parse_u32_list(inner)?;
            let [k, m] = args[..] else {
                bail!("balanced takes exactly two arguments, e.g. balanced(2,0)");
            };
            Ok(depth1_balanced_closed_form(k, m, order)?)
        }
        "bracket" => {
            let exps: Vec<(u32, u32)> = inner
                .split(';')
                .map(|pair| {
                    let nums = parse_u32_list(pair)?;
                    let [a, b] = nums[..] else {
                        bail!("each bracket slot needs two exponents, e.g. bracket(0,1; 0,2)");
                    };
                    Ok((a, b))
                })
                .collect::<Result<_>>()?;
            Ok(bracket_sum(&exps, order))
        }
        "sigma" => {
            let args = parse_u32_list(inner)?;
            let [r] = args[..] else {
                bail!("sigma takes exactly one argument, e.g. sigma(1)");
            };
            Ok(sigma_divisor(r, order))
        }
        other => bail!(
            "unknown function '{other}' (available: zq, balanced, bracket, sigma, delta)"
        ),
    }
}

fn split_call(t: &str) -> Result<(&str, &str)> {
    let open = t
        .find('(')
        .ok_or_else(|| anyhow!("expected a function call like zq(2;t), got '{t}'"))?;
    let inner = t[open..]
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| anyhow!("unbalanced parentheses in '{t}'"))?;
    Ok((t[..open].trim(), inner))
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<u32>()
                .map_err(|_| anyhow!("expected a nonnegative integer, got '{p}'"))
        })
        .collect()
}

/// Parse a polynomial in `t` into its coefficient vector: `"t"`, `"t^2"`,
/// `"2t - 1"`, `"1/2*t^3 + t"`.
fn parse_poly_in_t(s: &str) -> Result<Vec<Q>> {
    let t = s.trim();
    if t.is_empty() {
        bail!("empty polynomial");
    }
    let mut coeffs: Vec<Q> = Vec::new();
    let mut add = |c: Q, pow: usize| {
        if coeffs.len() <= pow {
            coeffs.resize(pow + 1, qi(0));
        }
        coeffs[pow] += c;
    };
    for (neg, term) in signed_terms(t)? {
        let term = term.trim();
        if term.is_empty() {
            bail!("empty term in polynomial '{t}'");
        }
        let (coeff_str, pow) = match term.find('t') {
            None => (term, 0usize),
            Some(i) => {
                let power = &term[i..];
                let pow = if power == "t" {
                    1
                } else if let Some(e) = power.strip_prefix("t^") {
                    e.parse::<usize>()
                        .map_err(|_| anyhow!("bad exponent in '{term}'"))?
                } else {
                    bail!("bad power in '{term}'");
                };
                (term[..i].trim_end_matches('*').trim(), pow)
            }
        };
        let mut c = if coeff_str.is_empty() {
            qi(1)
        } else {
            parse_q(coeff_str)?
        };
        if neg {
            c = -c;
        }
        add(c, pow);
    }
    if coeffs.iter().all(|c| c == &qi(0)) {
        bail!("polynomial '{t}' is zero");
    }
    Ok(coeffs)
}

/// Split on top-level `+` and `-` signs, tolerating missing spaces.
fn signed_terms(t: &str) -> Result<Vec<(bool, String)>> {
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut neg = false;
    let mut seen_any = false;
    for ch in t.chars() {
        match ch {
            '+' | '-' if seen_any && !current.trim().is_empty() => {
                terms.push((neg, std::mem::take(&mut current)));
                neg = ch == '-';
            }
            '-' if !seen_any => {
                neg = true;
                seen_any = true;
            }
            _ => {
                if !ch.is_whitespace() {
                    seen_any = true;
                }
                current.push(ch);
            }
        }
    }
    if current.trim().is_empty() {
        bail!("dangling sign in '{t}'");
    }
    terms.push((neg, current));
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmzv_core::rational::{qi, qr};

    #[test]
    fn polynomial_forms() {
        assert_eq!(parse_poly_in_t("t").unwrap(), vec![qi(0), qi(1)]);
        assert_eq!(parse_poly_in_t("t^2").unwrap(), vec![qi(0), qi(0), qi(1)]);
        assert_eq!(parse_poly_in_t("2t - 1").unwrap(), vec![qi(-1), qi(2)]);
        assert_eq!(
            parse_poly_in_t("1/2*t^2 + t").unwrap(),
            vec![qi(0), qi(1), qr(1, 2)]
        );
        assert_eq!(parse_poly_in_t("-t").unwrap(), vec![qi(0), qi(-1)]);
        assert!(parse_poly_in_t("t - t").is_err());
        assert!(parse_poly_in_t("t^").is_err());
    }

    #[test]
    fn call_dispatch() {
        let zq2 = eval("zq(2; t)", 4).unwrap();
        let sig = sigma_divisor(1, 4);
        for n in 1..=4 {
            assert_eq!(zq2.coeff(n), sig.coeff(n));
        }
        assert!(eval("zq(2,3; t)", 4).is_err());
        assert!(eval("nope(1)", 4).is_err());
        assert!(!eval("delta", 6).unwrap().is_zero());
        let b = eval("bracket(0,1)", 4).unwrap();
        for n in 1..=4 {
            assert_eq!(b.coeff(n), sig.coeff(n));
        }
    }
}
