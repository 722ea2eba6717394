//! Quasi-shuffle products and the letterwise p/y shuffle.
//!
//! A quasi-shuffle product on words is determined by a commutative,
//! associative (possibly partial) merge rule `a <> b` on letters via the
//! recursion
//!
//! ```text
//! (a u) * (b v) = a (u * b v) + b (a u * v) + (a <> b) (u * v)
//! ```
//!
//! with the empty word as unit. Four instances are provided (see
//! [`ProductId`]); pure shuffle is the instance with the empty merge rule.
//! Merge rules are checked for commutativity and associativity on a range of
//! letters when an engine is constructed.
//!
//! The p/y shuffle [`shuffle_b_py`] is not of this form: it absorbs leading
//! `y` letters one-sidedly and merges only `p` letters, with its diamond
//! term present exactly when both remainders start with `y`. Its defining
//! compatibility with the balanced product is
//! `i(u *_b v) = tau(tau(i(u)) sh_b tau(i(v)))`, which the test suite checks
//! exhaustively in low weight.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

use crate::words::{Alphabet, Letter, LinComb, Word};
use crate::{CoreError, Result};

/// The supported quasi-shuffle instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductId {
    /// Shuffle: no letters merge. Valid on any single alphabet.
    Shuffle,
    /// Stuffle on the single-index alphabet: `y_i <> y_j = y_{i+j}`.
    StuffleY,
    /// Stuffle on the bi-index alphabet:
    /// `y(k1|m1) <> y(k2|m2) = y(k1+k2|m1+m2)`.
    StuffleYbi,
    /// Balanced product on `b` letters: `b_i <> b_j = b_{i+j}` when both
    /// `i, j >= 1`; merges involving `b0` vanish.
    Balanced,
}

impl ProductId {
    /// Merge rule of the instance; `None` encodes a vanishing merge.
    pub fn diamond(&self, a: Letter, b: Letter) -> Option<Letter> {
        match self {
            ProductId::Shuffle => None,
            ProductId::StuffleY => match (a, b) {
                (Letter::Y(i), Letter::Y(j)) => Some(Letter::Y(i + j)),
                _ => None,
            },
            ProductId::StuffleYbi => match (a, b) {
                (Letter::Ybi(k1, m1), Letter::Ybi(k2, m2)) => {
                    Some(Letter::Ybi(k1 + k2, m1 + m2))
                }
                _ => None,
            },
            ProductId::Balanced => match (a, b) {
                (Letter::B(i), Letter::B(j)) if i >= 1 && j >= 1 => Some(Letter::B(i + j)),
                _ => None,
            },
        }
    }

    /// Alphabet the instance is defined on; `None` means any single
    /// alphabet.
    pub fn alphabet(&self) -> Option<Alphabet> {
        match self {
            ProductId::Shuffle => None,
            ProductId::StuffleY => Some(Alphabet::Y),
            ProductId::StuffleYbi => Some(Alphabet::Ybi),
            ProductId::Balanced => Some(Alphabet::B),
        }
    }

    fn sample_letters(&self) -> Vec<Letter> {
        match self {
            ProductId::Shuffle => (0..=3).map(Letter::B).collect(),
            ProductId::StuffleY => (1..=8).map(Letter::Y).collect(),
            ProductId::StuffleYbi => {
                let mut v = Vec::new();
                for k in 1..=3 {
                    for m in 0..=2 {
                        v.push(Letter::Ybi(k, m));
                    }
                }
                v
            }
            ProductId::Balanced => (0..=6).map(Letter::B).collect(),
        }
    }

    /// Check the merge rule is commutative and associative (with `None`
    /// acting as zero) over the sample letter range.
    pub fn validate(&self) -> Result<()> {
        let letters = self.sample_letters();
        for &a in &letters {
            for &b in &letters {
                if self.diamond(a, b) != self.diamond(b, a) {
                    return Err(CoreError::SolverInconsistent(format!(
                        "merge rule of {self:?} is not commutative at ({a}, {b})"
                    )));
                }
                for &c in &letters {
                    let lhs = self.diamond(a, b).and_then(|ab| self.diamond(ab, c));
                    let rhs = self.diamond(b, c).and_then(|bc| self.diamond(a, bc));
                    if lhs != rhs {
                        return Err(CoreError::SolverInconsistent(format!(
                            "merge rule of {self:?} is not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_operands(id: ProductId, u: &Word, v: &Word) -> Result<()> {
    let au = u.alphabet()?;
    let av = v.alphabet()?;
    if let (Some(x), Some(y)) = (au, av) {
        if x != y {
            return Err(CoreError::AlphabetMismatch(format!(
                "cannot multiply '{u}' ({x:?}) with '{v}' ({y:?})"
            )));
        }
    }
    if let Some(required) = id.alphabet() {
        for (word, a) in [(u, au), (v, av)] {
            if let Some(x) = a {
                if x != required {
                    return Err(CoreError::AlphabetMismatch(format!(
                        "product {id:?} needs {required:?} words, got '{word}' ({x:?})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Memoizing engine for the quasi-shuffle products and the p/y shuffle.
pub struct QsEngine {
    qs_memo: Mutex<HashMap<(ProductId, Word, Word), LinComb>>,
    py_memo: Mutex<HashMap<(Word, Word), LinComb>>,
}

impl QsEngine {
    /// Build an engine; validates every merge rule.
    pub fn new() -> Self {
        for id in [
            ProductId::Shuffle,
            ProductId::StuffleY,
            ProductId::StuffleYbi,
            ProductId::Balanced,
        ] {
            id.validate().expect("letter merge rule failed validation");
        }
        QsEngine {
            qs_memo: Mutex::new(HashMap::new()),
            py_memo: Mutex::new(HashMap::new()),
        }
    }

    /// Quasi-shuffle product of two words.
    pub fn product(&self, id: ProductId, u: &Word, v: &Word) -> Result<LinComb> {
        check_operands(id, u, v)?;
        Ok(self.product_unchecked(id, u, v))
    }

    fn product_unchecked(&self, id: ProductId, u: &Word, v: &Word) -> LinComb {
        if u.is_empty() {
            return LinComb::from_word(v.clone());
        }
        if v.is_empty() {
            return LinComb::from_word(u.clone());
        }
        // The products are commutative; canonicalize the memo key.
        let key = if u <= v {
            (id, u.clone(), v.clone())
        } else {
            (id, v.clone(), u.clone())
        };
        if let Some(hit) = self.qs_memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let (u, v) = (&key.1, &key.2);
        let a = u.0[0];
        let b = v.0[0];
        let u1 = Word(u.0[1..].to_vec());
        let v1 = Word(v.0[1..].to_vec());
        let mut out = self.product_unchecked(id, &u1, v).prepend(a);
        out = out.add(&self.product_unchecked(id, u, &v1).prepend(b));
        if let Some(ab) = id.diamond(a, b) {
            out = out.add(&self.product_unchecked(id, &u1, &v1).prepend(ab));
        }
        self.qs_memo.lock().unwrap().insert(key.clone(), out.clone());
        out
    }

    /// Bilinear extension of [`QsEngine::product`].
    pub fn product_lin(&self, id: ProductId, x: &LinComb, y: &LinComb) -> Result<LinComb> {
        let mut out = LinComb::zero();
        for (u, cu) in x.iter() {
            for (v, cv) in y.iter() {
                let p = self.product(id, u, v)?;
                for (w, cw) in p.iter() {
                    out.add_term(w.clone(), cw.clone() * cu.clone() * cv.clone());
                }
            }
        }
        Ok(out)
    }

    /// n-th quasi-shuffle power of a word.
    pub fn power(&self, id: ProductId, w: &Word, n: u32) -> Result<LinComb> {
        let mut out = LinComb::unit();
        for _ in 0..n {
            out = self.product_lin(id, &out, &LinComb::from_word(w.clone()))?;
        }
        Ok(out)
    }

    /// Letterwise shuffle on the p/y alphabet.
    ///
    /// Rules, checked in order:
    /// * the empty word is neutral;
    /// * if `u = y u'`, the product is `y (u' sh v)`;
    /// * else if `v = y v'`, the product is `y (u sh v')`;
    /// * else `u = p u'`, `v = p v'`, and the product is
    ///   `p (u' sh v) + p (u sh v') + p (u' sh v')`, the last term present
    ///   only when `u'` and `v'` both start with `y`.
    pub fn shuffle_b_py(&self, u: &Word, v: &Word) -> Result<LinComb> {
        u.expect_alphabet(Alphabet::Py)?;
        v.expect_alphabet(Alphabet::Py)?;
        Ok(self.shuffle_b_unchecked(u, v))
    }

    fn shuffle_b_unchecked(&self, u: &Word, v: &Word) -> LinComb {
        if u.is_empty() {
            return LinComb::from_word(v.clone());
        }
        if v.is_empty() {
            return LinComb::from_word(u.clone());
        }
        let key = (u.clone(), v.clone());
        if let Some(hit) = self.py_memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let u1 = Word(u.0[1..].to_vec());
        let v1 = Word(v.0[1..].to_vec());
        let out = if u.0[0] == Letter::Yy {
            self.shuffle_b_unchecked(&u1, v).prepend(Letter::Yy)
        } else if v.0[0] == Letter::Yy {
            self.shuffle_b_unchecked(u, &v1).prepend(Letter::Yy)
        } else {
            let mut acc = self.shuffle_b_unchecked(&u1, v).prepend(Letter::Pp);
            acc = acc.add(&self.shuffle_b_unchecked(u, &v1).prepend(Letter::Pp));
            let diag = matches!(u1.0.first(), Some(Letter::Yy))
                && matches!(v1.0.first(), Some(Letter::Yy));
            if diag {
                acc = acc.add(&self.shuffle_b_unchecked(&u1, &v1).prepend(Letter::Pp));
            }
            acc
        };
        self.py_memo.lock().unwrap().insert(key, out.clone());
        out
    }

    /// Bilinear extension of [`QsEngine::shuffle_b_py`].
    pub fn shuffle_b_py_lin(&self, x: &LinComb, y: &LinComb) -> Result<LinComb> {
        let mut out = LinComb::zero();
        for (u, cu) in x.iter() {
            for (v, cv) in y.iter() {
                let p = self.shuffle_b_py(u, v)?;
                for (w, cw) in p.iter() {
                    out.add_term(w.clone(), cw.clone() * cu.clone() * cv.clone());
                }
            }
        }
        Ok(out)
    }
}

impl Default for QsEngine {
    fn default() -> Self {
        Self::new()
    }
}

static ENGINE: Lazy<QsEngine> = Lazy::new(QsEngine::new);

/// Shared global engine (memoized across the process).
pub fn engine() -> &'static QsEngine {
    &ENGINE
}

/// Monomial embedding of balanced words into p/y words:
/// `b_{s1} ... b_{sl} -> p^{s1} y ... p^{sl} y`.
pub fn embed_py(w: &Word) -> Result<Word> {
    let indices = w.to_b_indices()?;
    let mut out = Vec::new();
    for s in indices {
        for _ in 0..s {
            out.push(Letter::Pp);
        }
        out.push(Letter::Yy);
    }
    Ok(Word(out))
}

/// Anti-automorphism of p/y words: reverse the word and exchange `p <-> y`.
pub fn tau_py(w: &Word) -> Result<Word> {
    w.expect_alphabet(Alphabet::Py)?;
    Ok(Word(
        w.0.iter()
            .rev()
            .map(|l| match l {
                Letter::Pp => Letter::Yy,
                Letter::Yy => Letter::Pp,
                _ => unreachable!(),
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;
    use crate::words::{parse_lincomb, parse_word};

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    fn lc(s: &str) -> LinComb {
        parse_lincomb(s).unwrap()
    }

    #[test]
    fn merge_rules_validate() {
        for id in [
            ProductId::Shuffle,
            ProductId::StuffleY,
            ProductId::StuffleYbi,
            ProductId::Balanced,
        ] {
            id.validate().unwrap();
        }
    }

    #[test]
    fn balanced_product_goldens() {
        let e = engine();
        assert_eq!(
            e.product(ProductId::Balanced, &w("b1"), &w("b1")).unwrap(),
            lc("2*b1 b1 + b2")
        );
        assert_eq!(
            e.product(ProductId::Balanced, &w("b1"), &w("b0")).unwrap(),
            lc("b0 b1 + b1 b0")
        );
        // b0 letters never merge.
        assert_eq!(
            e.product(ProductId::Balanced, &w("b0"), &w("b0")).unwrap(),
            lc("2*b0 b0")
        );
    }

    #[test]
    fn stuffle_goldens() {
        let e = engine();
        assert_eq!(
            e.product(ProductId::StuffleY, &w("y1"), &w("y2")).unwrap(),
            lc("y1 y2 + y2 y1 + y3")
        );
        assert_eq!(
            e.product(ProductId::StuffleYbi, &w("y(1|0)"), &w("y(1|1)"))
                .unwrap(),
            lc("y(1|0) y(1|1) + y(1|1) y(1|0) + y(2|1)")
        );
    }

    #[test]
    fn shuffle_golden() {
        let e = engine();
        assert_eq!(
            e.product(ProductId::Shuffle, &w("x1"), &w("x0")).unwrap(),
            lc("x0 x1 + x1 x0")
        );
        assert_eq!(
            e.product(ProductId::Shuffle, &w("x1"), &w("x1 x0")).unwrap(),
            lc("2*x1 x1 x0 + x1 x0 x1")
        );
    }

    #[test]
    fn alphabet_guards() {
        let e = engine();
        assert!(e.product(ProductId::Balanced, &w("y1"), &w("y1")).is_err());
        assert!(e.product(ProductId::StuffleY, &w("b1"), &w("b1")).is_err());
        assert!(e
            .product(ProductId::Shuffle, &w("x0"), &w("b1"))
            .is_err());
    }

    #[test]
    fn products_are_commutative_and_associative() {
        let e = engine();
        let cases = [
            (ProductId::Balanced, vec![w("b1 b0"), w("b2"), w("b0")]),
            (ProductId::StuffleY, vec![w("y1"), w("y2 y1"), w("y1 y1")]),
            (
                ProductId::StuffleYbi,
                vec![w("y(1|0)"), w("y(1|1) y(2|0)"), w("y(2|1)")],
            ),
            (ProductId::Shuffle, vec![w("x0 x1"), w("x1"), w("x0")]),
        ];
        for (id, ws) in cases {
            for a in &ws {
                for b in &ws {
                    let ab = e.product(id, a, b).unwrap();
                    let ba = e.product(id, b, a).unwrap();
                    assert_eq!(ab, ba, "{id:?} commutativity at ({a}, {b})");
                    for c in &ws {
                        let lhs = e
                            .product_lin(id, &ab, &LinComb::from_word(c.clone()))
                            .unwrap();
                        let bc = e.product(id, b, c).unwrap();
                        let rhs = e
                            .product_lin(id, &LinComb::from_word(a.clone()), &bc)
                            .unwrap();
                        assert_eq!(lhs, rhs, "{id:?} associativity at ({a}, {b}, {c})");
                    }
                }
            }
        }
    }

    #[test]
    fn py_shuffle_goldens() {
        let e = engine();
        assert_eq!(e.shuffle_b_py(&w("y"), &w("y")).unwrap(), lc("y y"));
        assert_eq!(e.shuffle_b_py(&w("p"), &w("p")).unwrap(), lc("2*p p"));
        assert_eq!(
            e.shuffle_b_py(&w("p y"), &w("p y")).unwrap(),
            lc("2*p y p y + p y y")
        );
        assert_eq!(e.shuffle_b_py(&w("p"), &w("y")).unwrap(), lc("y p"));
    }

    #[test]
    fn py_shuffle_commutative_on_samples() {
        let e = engine();
        let ws = [w("p"), w("y"), w("p y"), w("y p"), w("p p y"), w("y y p")];
        for a in &ws {
            for b in &ws {
                assert_eq!(
                    e.shuffle_b_py(a, b).unwrap(),
                    e.shuffle_b_py(b, a).unwrap(),
                    "p/y shuffle commutativity at ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn embedding_and_tau() {
        assert_eq!(embed_py(&w("b2 b1")).unwrap(), w("p p y p y"));
        assert_eq!(embed_py(&w("b0")).unwrap(), w("y"));
        assert_eq!(tau_py(&w("p p y p y")).unwrap(), w("p y p y y"));
        assert_eq!(tau_py(&Word::empty()).unwrap(), Word::empty());
    }

    #[test]
    fn balanced_product_matches_py_shuffle_through_embedding() {
        // i(u *_b v) = tau( tau(i(u)) sh_b tau(i(v)) ) on a few pairs; the
        // exhaustive low-weight sweep lives in the integration tests.
        let e = engine();
        let pairs = [
            (w("b1"), w("b1")),
            (w("b1"), w("b0")),
            (w("b2"), w("b1 b0")),
            (w("b0"), w("b0 b1")),
        ];
        for (u, v) in pairs {
            let lhs = e
                .product(ProductId::Balanced, &u, &v)
                .unwrap()
                .map_words(embed_py)
                .unwrap();
            let tu = tau_py(&embed_py(&u).unwrap()).unwrap();
            let tv = tau_py(&embed_py(&v).unwrap()).unwrap();
            let rhs = e
                .shuffle_b_py(&tu, &tv)
                .unwrap()
                .map_words(tau_py)
                .unwrap();
            assert_eq!(lhs, rhs, "embedding compatibility at ({u}, {v})");
        }
    }

    #[test]
    fn power_golden() {
        let e = engine();
        let sq = e.power(ProductId::Balanced, &w("b0"), 2).unwrap();
        assert_eq!(sq, lc("2*b0 b0"));
        assert_eq!(sq.coeff(&w("b0 b0")), qi(2));
    }
}
