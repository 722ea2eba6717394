//! Letters, words, and finite linear combinations with rational coefficients.
//!
//! Five letter families share one [`Letter`] type:
//!
//! * `b0, b1, b2, ...` — the balanced alphabet; `wt(b_i) = i` for `i >= 1`,
//!   `wt(b_0) = 1`, and only the letters `b_i` with `i >= 1` count as depth.
//! * `y(k|m)` with `k >= 1`, `m >= 0` — the bi-index alphabet,
//!   `wt = k + m`, depth one per letter.
//! * `y1, y2, ...` — the single-index alphabet, `wt(y_k) = k`.
//! * `x0, x1` — the binary alphabet, weight one per letter; `x1` carries
//!   depth.
//! * `p, y` — the two-letter alphabet used by the letterwise shuffle; `y`
//!   carries depth.
//!
//! Words are plain letter sequences ordered canonically by length, then
//! lexicographically. [`LinComb`] and [`TensorComb`] are sparse maps from
//! words (or word pairs) to rational coefficients; all maps keep themselves
//! free of explicit zeros.

use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::rational::{fmt_q_abs, parse_q, Q};
use crate::{CoreError, Result};

/// One letter of any of the five supported families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// `b_i`, `i >= 0`.
    B(u32),
    /// `y(k|m)`, `k >= 1`, `m >= 0`.
    Ybi(u32, u32),
    /// `y_k`, `k >= 1`.
    Y(u32),
    /// `x_0` or `x_1`.
    X(u8),
    /// The letter `p`.
    Pp,
    /// The letter `y` of the two-letter `p, y` alphabet.
    Yy,
}

/// Letter family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Alphabet {
    B,
    Ybi,
    Y,
    X01,
    Py,
}

impl Letter {
    /// Family this letter belongs to.
    pub fn alphabet(&self) -> Alphabet {
        match self {
            Letter::B(_) => Alphabet::B,
            Letter::Ybi(_, _) => Alphabet::Ybi,
            Letter::Y(_) => Alphabet::Y,
            Letter::X(_) => Alphabet::X01,
            Letter::Pp | Letter::Yy => Alphabet::Py,
        }
    }

    /// Weight contribution of the letter.
    pub fn weight(&self) -> u32 {
        match self {
            Letter::B(0) => 1,
            Letter::B(i) => *i,
            Letter::Ybi(k, m) => k + m,
            Letter::Y(k) => *k,
            Letter::X(_) => 1,
            Letter::Pp | Letter::Yy => 1,
        }
    }

    /// Depth contribution of the letter.
    pub fn depth(&self) -> u32 {
        match self {
            Letter::B(0) => 0,
            Letter::B(_) => 1,
            Letter::Ybi(_, _) => 1,
            Letter::Y(_) => 1,
            Letter::X(e) => u32::from(*e == 1),
            Letter::Pp => 0,
            Letter::Yy => 1,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::B(i) => write!(f, "b{i}"),
            Letter::Ybi(k, m) => write!(f, "y({k}|{m})"),
            Letter::Y(k) => write!(f, "y{k}"),
            Letter::X(e) => write!(f, "x{e}"),
            Letter::Pp => write!(f, "p"),
            Letter::Yy => write!(f, "y"),
        }
    }
}

/// A word: a finite sequence of letters.
///
/// The canonical order is lexicographic on the letter sequence (a proper
/// prefix precedes its extensions); linear combinations display their terms
/// in this order. Graded orders, where needed (relation bases), are applied
/// by the consumer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    /// The empty word.
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Single-letter word.
    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Total weight: sum of letter weights.
    pub fn weight(&self) -> u32 {
        self.0.iter().map(Letter::weight).sum()
    }

    /// Total depth: sum of letter depths.
    pub fn depth(&self) -> u32 {
        self.0.iter().map(Letter::depth).sum()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Word with `l` prepended.
    pub fn prepend(&self, l: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(l);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// Word with `l` appended.
    pub fn append(&self, l: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(l);
        Word(v)
    }

    /// The alphabet of the word: `None` for the empty word, an error if the
    /// letters mix families.
    pub fn alphabet(&self) -> Result<Option<Alphabet>> {
        let mut found: Option<Alphabet> = None;
        for l in &self.0 {
            let a = l.alphabet();
            match found {
                None => found = Some(a),
                Some(prev) if prev != a => {
                    return Err(CoreError::AlphabetMismatch(format!(
                        "word '{self}' mixes {prev:?} and {a:?} letters"
                    )))
                }
                _ => {}
            }
        }
        Ok(found)
    }

    /// Check the word is uniform over `expected` (the empty word passes).
    pub fn expect_alphabet(&self, expected: Alphabet) -> Result<()> {
        match self.alphabet()? {
            None => Ok(()),
            Some(a) if a == expected => Ok(()),
            Some(a) => Err(CoreError::AlphabetMismatch(format!(
                "word '{self}' is over {a:?}, expected {expected:?}"
            ))),
        }
    }

    /// For balanced-alphabet words: true if the word does not start with
    /// `b0`, i.e. lies in the convergent subalgebra. The empty word counts
    /// as convergent.
    pub fn is_b_convergent(&self) -> bool {
        !matches!(self.0.first(), Some(Letter::B(0)))
    }

    /// Build a balanced word from its index tuple `(s_1, ..., s_l)`.
    pub fn from_b_indices(indices: &[u32]) -> Word {
        Word(indices.iter().map(|&s| Letter::B(s)).collect())
    }

    /// Read a balanced word back as its index tuple.
    pub fn to_b_indices(&self) -> Result<Vec<u32>> {
        self.expect_alphabet(Alphabet::B)?;
        Ok(self
            .0
            .iter()
            .map(|l| match l {
                Letter::B(i) => *i,
                _ => unreachable!(),
            })
            .collect())
    }

    /// Build a bi-index word from pairs `(k_i, m_i)`.
    pub fn from_ybi_pairs(pairs: &[(u32, u32)]) -> Word {
        Word(pairs.iter().map(|&(k, m)| Letter::Ybi(k, m)).collect())
    }

    /// Read a bi-index word back as its pairs.
    pub fn to_ybi_pairs(&self) -> Result<Vec<(u32, u32)>> {
        self.expect_alphabet(Alphabet::Ybi)?;
        Ok(self
            .0
            .iter()
            .map(|l| match l {
                Letter::Ybi(k, m) => (*k, *m),
                _ => unreachable!(),
            })
            .collect())
    }

    /// Decompose a balanced word as `b0^{m0} b_{k1} b0^{m1} ... b_{kd} b0^{md}`
    /// with all `k_i >= 1`.
    pub fn b_blocks(&self) -> Result<BBlocks> {
        self.expect_alphabet(Alphabet::B)?;
        let mut leading_b0 = 0u32;
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for l in &self.0 {
            match l {
                Letter::B(0) => match pairs.last_mut() {
                    None => leading_b0 += 1,
                    Some((_, m)) => *m += 1,
                },
                Letter::B(k) => pairs.push((*k, 0)),
                _ => unreachable!(),
            }
        }
        Ok(BBlocks { leading_b0, pairs })
    }
}

/// Block decomposition of a balanced word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BBlocks {
    /// Number of leading `b0` letters.
    pub leading_b0: u32,
    /// The pairs `(k_i, m_i)`: letter `b_{k_i}` followed by `m_i` copies of
    /// `b0`.
    pub pairs: Vec<(u32, u32)>,
}

impl BBlocks {
    /// Reassemble the word.
    pub fn to_word(&self) -> Word {
        let mut v = Vec::new();
        for _ in 0..self.leading_b0 {
            v.push(Letter::B(0));
        }
        for &(k, m) in &self.pairs {
            v.push(Letter::B(k));
            for _ in 0..m {
                v.push(Letter::B(0));
            }
        }
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(Letter::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Parse one letter token.
fn parse_letter(tok: &str) -> Result<Letter> {
    let bad = || CoreError::Parse(format!("bad letter token '{tok}'"));
    if tok == "p" {
        return Ok(Letter::Pp);
    }
    if tok == "y" {
        return Ok(Letter::Yy);
    }
    if let Some(rest) = tok.strip_prefix('b') {
        let i: u32 = rest.parse().map_err(|_| bad())?;
        return Ok(Letter::B(i));
    }
    if let Some(rest) = tok.strip_prefix('x') {
        let e: u8 = rest.parse().map_err(|_| bad())?;
        if e > 1 {
            return Err(CoreError::Parse(format!(
                "bad letter token '{tok}': only x0 and x1 exist"
            )));
        }
        return Ok(Letter::X(e));
    }
    if let Some(rest) = tok.strip_prefix('y') {
        if let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (ks, ms) = inner.split_once('|').ok_or_else(bad)?;
            let k: u32 = ks.trim().parse().map_err(|_| bad())?;
            let m: u32 = ms.trim().parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(CoreError::Parse(format!(
                    "bad letter token '{tok}': first index must be >= 1"
                )));
            }
            return Ok(Letter::Ybi(k, m));
        }
        let k: u32 = rest.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(CoreError::Parse(format!(
                "bad letter token '{tok}': index must be >= 1"
            )));
        }
        return Ok(Letter::Y(k));
    }
    Err(bad())
}

/// Parse a word.
///
/// Accepted forms:
/// * space-separated letter tokens: `"b3 b0 b2"`, `"y(3|1) y(1|0)"`,
///   `"y2 y3"`, `"x0 x1"`, `"p y"`;
/// * the compact balanced form `"z(3,0,2)"` meaning `b3 b0 b2`;
/// * `"1"` or the empty string for the empty word.
pub fn parse_word(s: &str) -> Result<Word> {
    let t = s.trim();
    if t.is_empty() || t == "1" {
        return Ok(Word::empty());
    }
    if let Some(inner) = t.strip_prefix("z(").and_then(|r| r.strip_suffix(')')) {
        let mut letters = Vec::new();
        for part in inner.split(',') {
            let i: u32 = part.trim().parse().map_err(|_| {
                CoreError::Parse(format!("bad index '{}' in '{t}'", part.trim()))
            })?;
            letters.push(Letter::B(i));
        }
        return Ok(Word(letters));
    }
    let mut letters = Vec::new();
    for tok in t.split_whitespace() {
        letters.push(parse_letter(tok)?);
    }
    let w = Word(letters);
    w.alphabet()?;
    Ok(w)
}

/// Sparse linear combination of words with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinComb(BTreeMap<Word, Q>);

impl LinComb {
    pub fn zero() -> Self {
        LinComb(BTreeMap::new())
    }

    /// The empty word with coefficient one.
    pub fn unit() -> Self {
        Self::from_term(Word::empty(), Q::one())
    }

    pub fn from_term(w: Word, c: Q) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(w, c);
        }
        LinComb(m)
    }

    /// Single word with coefficient one.
    pub fn from_word(w: Word) -> Self {
        Self::from_term(w, Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.0.len()
    }

    pub fn coeff(&self, w: &Word) -> Q {
        self.0.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.0.iter()
    }

    /// Add `c * w` in place.
    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &LinComb) -> LinComb {
        let mut out = self.clone();
        for (w, c) in other.iter() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LinComb) -> LinComb {
        let mut out = self.clone();
        for (w, c) in other.iter() {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> LinComb {
        LinComb(self.0.iter().map(|(w, c)| (w.clone(), -c.clone())).collect())
    }

    pub fn scale(&self, c: &Q) -> LinComb {
        if c.is_zero() {
            return LinComb::zero();
        }
        LinComb(
            self.0
                .iter()
                .map(|(w, k)| (w.clone(), k.clone() * c.clone()))
                .collect(),
        )
    }

    /// Prepend a letter to every word.
    pub fn prepend(&self, l: Letter) -> LinComb {
        LinComb(
            self.0
                .iter()
                .map(|(w, c)| (w.prepend(l), c.clone()))
                .collect(),
        )
    }

    /// Append a letter to every word.
    pub fn append(&self, l: Letter) -> LinComb {
        LinComb(
            self.0
                .iter()
                .map(|(w, c)| (w.append(l), c.clone()))
                .collect(),
        )
    }

    /// Linear extension of a word-level map.
    pub fn apply_linear<F>(&self, mut f: F) -> Result<LinComb>
    where
        F: FnMut(&Word) -> Result<LinComb>,
    {
        let mut out = LinComb::zero();
        for (w, c) in self.iter() {
            let fw = f(w)?;
            for (v, k) in fw.iter() {
                out.add_term(v.clone(), k.clone() * c.clone());
            }
        }
        Ok(out)
    }

    /// Linear extension of a word-to-word map.
    pub fn map_words<F>(&self, mut f: F) -> Result<LinComb>
    where
        F: FnMut(&Word) -> Result<Word>,
    {
        let mut out = LinComb::zero();
        for (w, c) in self.iter() {
            out.add_term(f(w)?, c.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for LinComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.0 {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = fmt_q_abs(c);
            if w.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{w}")?;
            } else {
                write!(f, "{mag}*{w}")?;
            }
        }
        Ok(())
    }
}

/// Parse a linear combination in the display format:
/// `"2*b1 b1 + b2"`, `"-b1 b0 + 1/2*b0 b1"`, `"0"`.
pub fn parse_lincomb(s: &str) -> Result<LinComb> {
    let t = s.trim();
    if t.is_empty() || t == "0" {
        return Ok(LinComb::zero());
    }
    // Split into signed terms on top-level " + " and " - " separators.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut rest = t;
    let mut neg = false;
    if let Some(r) = rest.strip_prefix('-') {
        neg = true;
        rest = r.trim_start();
    }
    loop {
        let plus = rest.find(" + ");
        let minus = rest.find(" - ");
        let (cut, next_neg, skip) = match (plus, minus) {
            (None, None) => {
                terms.push((neg, rest.to_string()));
                break;
            }
            (Some(p), None) => (p, false, 3),
            (None, Some(m)) => (m, true, 3),
            (Some(p), Some(m)) if p < m => (p, false, 3),
            (_, Some(m)) => (m, true, 3),
        };
        terms.push((neg, rest[..cut].to_string()));
        rest = &rest[cut + skip..];
        neg = next_neg;
    }
    let mut out = LinComb::zero();
    for (is_neg, term) in terms {
        let term = term.trim();
        if term.is_empty() {
            return Err(CoreError::Parse(format!("empty term in '{t}'")));
        }
        let (coeff, word_part) = match term.split_once('*') {
            Some((c, w)) => (parse_q(c)?, w.trim().to_string()),
            None => {
                // Either a bare word or a bare rational (empty-word term).
                if parse_q(term).is_ok() {
                    (parse_q(term)?, String::new())
                } else {
                    (Q::one(), term.to_string())
                }
            }
        };
        let w = parse_word(&word_part)?;
        let c = if is_neg { -coeff } else { coeff };
        out.add_term(w, c);
    }
    Ok(out)
}

/// Sparse linear combination of word pairs (elements of a tensor square).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorComb(BTreeMap<(Word, Word), Q>);

impl TensorComb {
    pub fn zero() -> Self {
        TensorComb(BTreeMap::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.0.len()
    }

    pub fn coeff(&self, u: &Word, v: &Word) -> Q {
        self.0
            .get(&(u.clone(), v.clone()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Word, Word), &Q)> {
        self.0.iter()
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (u, v);
        let cur = self.0.remove(&key).unwrap_or_else(Q::zero) + c;
        if !cur.is_zero() {
            self.0.insert(key, cur);
        }
    }

    pub fn add(&self, other: &TensorComb) -> TensorComb {
        let mut out = self.clone();
        for ((u, v), c) in other.iter() {
            out.add_term(u.clone(), v.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TensorComb) -> TensorComb {
        let mut out = self.clone();
        for ((u, v), c) in other.iter() {
            out.add_term(u.clone(), v.clone(), -c.clone());
        }
        out
    }

    /// Tensor product of two linear combinations.
    pub fn tensor(a: &LinComb, b: &LinComb) -> TensorComb {
        let mut out = TensorComb::zero();
        for (u, cu) in a.iter() {
            for (v, cv) in b.iter() {
                out.add_term(u.clone(), v.clone(), cu.clone() * cv.clone());
            }
        }
        out
    }

    /// Apply linear maps to the two tensor legs.
    pub fn map_legs<F, G>(&self, mut f: F, mut g: G) -> Result<TensorComb>
    where
        F: FnMut(&Word) -> Result<LinComb>,
        G: FnMut(&Word) -> Result<LinComb>,
    {
        let mut out = TensorComb::zero();
        for ((u, v), c) in self.iter() {
            let fu = f(u)?;
            let gv = g(v)?;
            for (a, ca) in fu.iter() {
                for (b, cb) in gv.iter() {
                    out.add_term(a.clone(), b.clone(), c.clone() * ca.clone() * cb.clone());
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for TensorComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((u, v), c) in &self.0 {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = fmt_q_abs(c);
            if mag == "1" {
                write!(f, "[{u} | {v}]")?;
            } else {
                write!(f, "{mag}*[{u} | {v}]")?;
            }
        }
        Ok(())
    }
}

/// Deconcatenation coproduct of a single word: the sum of `u (x) v` over all
/// splittings `w = u v`, including the two trivial ones.
pub fn delta_dec(w: &Word) -> TensorComb {
    let mut out = TensorComb::zero();
    for cut in 0..=w.0.len() {
        let u = Word(w.0[..cut].to_vec());
        let v = Word(w.0[cut..].to_vec());
        out.add_term(u, v, Q::one());
    }
    out
}

/// Linear extension of [`delta_dec`].
pub fn delta_dec_lin(x: &LinComb) -> TensorComb {
    let mut out = TensorComb::zero();
    for (w, c) in x.iter() {
        for ((u, v), k) in delta_dec(w).iter() {
            out.add_term(u.clone(), v.clone(), c.clone() * k.clone());
        }
    }
    out
}

/// All balanced words of exact weight `w` (weight 0 gives the empty word).
pub fn b_words_of_weight(w: u32) -> Vec<Word> {
    fn go(remaining: u32, acc: &mut Vec<Letter>, out: &mut Vec<Word>) {
        if remaining == 0 {
            out.push(Word(acc.clone()));
            return;
        }
        // First letter b_i uses weight max(i, 1).
        acc.push(Letter::B(0));
        go(remaining - 1, acc, out);
        acc.pop();
        for i in 1..=remaining {
            acc.push(Letter::B(i));
            go(remaining - i, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(w, &mut Vec::new(), &mut out);
    out
}

/// All balanced words of weight at most `wmax`, including the empty word.
pub fn b_words_up_to_weight(wmax: u32) -> Vec<Word> {
    (0..=wmax).flat_map(b_words_of_weight).collect()
}

/// All bi-index words of exact weight `w`.
pub fn ybi_words_of_weight(w: u32) -> Vec<Word> {
    fn go(remaining: u32, acc: &mut Vec<Letter>, out: &mut Vec<Word>) {
        if remaining == 0 {
            out.push(Word(acc.clone()));
            return;
        }
        for t in 1..=remaining {
            for k in 1..=t {
                acc.push(Letter::Ybi(k, t - k));
                go(remaining - t, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(w, &mut Vec::new(), &mut out);
    out
}

/// All bi-index words of weight at most `wmax`, including the empty word.
pub fn ybi_words_up_to_weight(wmax: u32) -> Vec<Word> {
    (0..=wmax).flat_map(ybi_words_of_weight).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qi, qr};

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    #[test]
    fn weight_and_depth() {
        assert_eq!(w("b3 b0 b2").weight(), 6);
        assert_eq!(w("b3 b0 b2").depth(), 2);
        assert_eq!(w("b0 b0").weight(), 2);
        assert_eq!(w("b0 b0").depth(), 0);
        assert_eq!(w("y(3|1) y(1|0)").weight(), 5);
        assert_eq!(w("y(3|1) y(1|0)").depth(), 2);
        assert_eq!(w("y2 y3").weight(), 5);
        assert_eq!(w("x0 x1").weight(), 2);
        assert_eq!(w("x0 x1").depth(), 1);
        assert_eq!(w("p p y").weight(), 3);
        assert_eq!(w("p p y").depth(), 1);
        assert_eq!(Word::empty().weight(), 0);
        assert_eq!(Word::empty().depth(), 0);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(w("z(3,0,2)"), w("b3 b0 b2"));
        assert_eq!(w("1"), Word::empty());
        assert_eq!(w(""), Word::empty());
        assert_eq!(w("y3"), Word::letter(Letter::Y(3)));
        assert_eq!(w("y"), Word::letter(Letter::Yy));
        assert_eq!(w("y(2|0)"), Word::letter(Letter::Ybi(2, 0)));
        assert!(parse_word("x2").is_err());
        assert!(parse_word("y0").is_err());
        assert!(parse_word("y(0|1)").is_err());
        assert!(parse_word("b1 y2").is_err());
        assert!(parse_word("qq").is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["b3 b0 b2", "y(3|1) y(1|0)", "y2 y3", "x0 x1", "p y", "1"] {
            let word = w(s);
            assert_eq!(parse_word(&word.to_string()).unwrap(), word);
        }
    }

    #[test]
    fn canonical_order_is_lex() {
        let mut ws = [w("b2"), w("b1 b1"), w("b1 b0"), w("b0 b1"), w("b0 b0")];
        ws.sort();
        let shown: Vec<String> = ws.iter().map(|x| x.to_string()).collect();
        assert_eq!(
            shown,
            vec!["b0 b0", "b0 b1", "b1 b0", "b1 b1", "b2"]
        );
        // A prefix precedes its extensions.
        assert!(w("b1") < w("b1 b0"));
    }

    #[test]
    fn blocks_roundtrip() {
        let word = w("b0 b0 b3 b0 b2 b0 b0");
        let blocks = word.b_blocks().unwrap();
        assert_eq!(blocks.leading_b0, 2);
        assert_eq!(blocks.pairs, vec![(3, 1), (2, 2)]);
        assert_eq!(blocks.to_word(), word);
    }

    #[test]
    fn lincomb_display_and_parse() {
        let mut lc = LinComb::zero();
        lc.add_term(w("b1 b1"), qi(2));
        lc.add_term(w("b2"), qi(1));
        assert_eq!(lc.to_string(), "2*b1 b1 + b2");
        assert_eq!(parse_lincomb("2*b1 b1 + b2").unwrap(), lc);

        let mut lc2 = LinComb::zero();
        lc2.add_term(w("b1 b0"), qi(-1));
        lc2.add_term(w("b0 b1"), qr(1, 2));
        assert_eq!(lc2.to_string(), "1/2*b0 b1 - b1 b0");
        assert_eq!(parse_lincomb(&lc2.to_string()).unwrap(), lc2);

        assert_eq!(parse_lincomb("0").unwrap(), LinComb::zero());
        assert_eq!(LinComb::zero().to_string(), "0");

        let unit_term = LinComb::from_term(Word::empty(), qr(-1, 24));
        assert_eq!(unit_term.to_string(), "-1/24");
        assert_eq!(parse_lincomb("-1/24").unwrap(), unit_term);
    }

    #[test]
    fn lincomb_cancellation() {
        let mut lc = LinComb::from_term(w("b2"), qi(3));
        lc.add_term(w("b2"), qi(-3));
        assert!(lc.is_zero());
    }

    #[test]
    fn delta_dec_golden() {
        let word = w("b1 b0");
        let d = delta_dec(&word);
        assert_eq!(d.num_terms(), 3);
        assert_eq!(d.coeff(&Word::empty(), &word), qi(1));
        assert_eq!(d.coeff(&w("b1"), &w("b0")), qi(1));
        assert_eq!(d.coeff(&word, &Word::empty()), qi(1));
    }

    #[test]
    fn word_counts_by_weight() {
        // Balanced alphabet: 1, 2, 5, 13, 34, 89 words at weights 0..5.
        let counts: Vec<usize> = (0..=5).map(|k| b_words_of_weight(k).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 13, 34, 89]);
        assert_eq!(b_words_up_to_weight(5).len(), 144);

        // Bi-index alphabet: 1, 1, 3, 8, 21, 55 words at weights 0..5.
        let counts: Vec<usize> = (0..=5).map(|k| ybi_words_of_weight(k).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 8, 21, 55]);
        assert_eq!(ybi_words_up_to_weight(5).len(), 89);
    }

    #[test]
    fn tensor_ops() {
        let a = LinComb::from_word(w("b1"));
        let b = parse_lincomb("b0 - b1").unwrap();
        let t = TensorComb::tensor(&a, &b);
        assert_eq!(t.coeff(&w("b1"), &w("b0")), qi(1));
        assert_eq!(t.coeff(&w("b1"), &w("b1")), qi(-1));
        assert!(t.sub(&t).is_zero());
    }
}
