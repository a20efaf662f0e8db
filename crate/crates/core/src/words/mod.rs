//! Free-group words, finite group tables and exact half-integer arithmetic.

mod finite;
mod half;

pub use finite::{FiniteGroupTable, TableError};
pub use half::{HalfInt, ParseHalfIntError};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter {letter} is outside a generating set of rank {rank}")]
    RankMismatch { letter: u32, rank: u32 },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed token `{0}`")]
    BadToken(String),
}

/// A generator or its inverse. Encoded as `2 * generator + sign_bit`, so the
/// derived order is `a < a^-1 < b < b^-1 < ...` (the shortlex letter order).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: u32, inverse: bool) -> Self {
        Letter(generator * 2 + inverse as u32)
    }

    pub fn pos(generator: u32) -> Self {
        Letter::new(generator, false)
    }

    pub fn neg(generator: u32) -> Self {
        Letter::new(generator, true)
    }

    pub fn generator(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// +1 or -1.
    pub fn sign(self) -> i32 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn from_code(code: u32) -> Self {
        Letter(code)
    }

    /// All letters of a rank-`rank` free group in shortlex order.
    pub fn all(rank: u32) -> impl Iterator<Item = Letter> {
        (0..2 * rank).map(Letter)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = (b'a' + (self.generator() % 26) as u8) as char;
        if self.is_inverse() {
            write!(f, "{}", base.to_ascii_uppercase())
        } else {
            write!(f, "{}", base)
        }
    }
}

/// A freely reduced word. Construction always reduces, so two words are equal
/// as group elements iff they are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FreeWord(Vec<Letter>);

/// Stack-based free reduction.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(raw: I) -> FreeWord {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    FreeWord(out)
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        free_reduce(raw)
    }

    pub fn letter(l: Letter) -> Self {
        FreeWord(vec![l])
    }

    /// Signed generator indices, `+1` for `a`, `-1` for `a^-1` (1-based so that
    /// the sign is visible). Handy in tests.
    pub fn from_signed(raw: &[i32]) -> Self {
        free_reduce(raw.iter().map(|&s| {
            assert!(s != 0);
            Letter::new(s.unsigned_abs() - 1, s < 0)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let a = &self.0;
        let b = &other.0;
        let mut k = 0;
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k].inverse() {
            k += 1;
        }
        let mut out = Vec::with_capacity(a.len() + b.len() - 2 * k);
        out.extend_from_slice(&a[..a.len() - k]);
        out.extend_from_slice(&b[k..]);
        FreeWord(out)
    }

    pub fn mul_letter(&self, l: Letter) -> FreeWord {
        let mut out = self.0.clone();
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
        FreeWord(out)
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn prefix(&self, n: usize) -> FreeWord {
        FreeWord(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> FreeWord {
        FreeWord(self.0[n.min(self.0.len())..].to_vec())
    }

    pub fn conjugate(&self, by: &FreeWord) -> FreeWord {
        by.mul(self).mul(&by.inverse())
    }

    pub fn max_generator(&self) -> Option<u32> {
        self.0.iter().map(|l| l.generator()).max()
    }

    pub fn check_rank(&self, rank: u32) -> Result<(), WordError> {
        match self.0.iter().find(|l| l.generator() >= rank) {
            Some(l) => Err(WordError::RankMismatch { letter: l.generator(), rank }),
            None => Ok(()),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => self.0.len() == 1 || *a != b.inverse(),
            _ => true,
        }
    }

    /// Writes `self = p · core · p^-1` with `core` cyclically reduced.
    pub fn cyclic_split(&self) -> (FreeWord, FreeWord) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        (FreeWord(self.0[..k].to_vec()), FreeWord(self.0[k..n - k].to_vec()))
    }

    pub fn common_prefix_len(&self, other: &FreeWord) -> usize {
        self.0.iter().zip(other.0.iter()).take_while(|(a, b)| a == b).count()
    }

    /// Every reduced word of length exactly `n` over `rank` generators, in shortlex order.
    pub fn sphere(rank: u32, n: usize) -> Vec<FreeWord> {
        let mut layer = vec![FreeWord::identity()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(layer.len() * 3);
            for w in &layer {
                for l in Letter::all(rank) {
                    if w.last() != Some(l.inverse()) {
                        let mut v = w.0.clone();
                        v.push(l);
                        next.push(FreeWord(v));
                    }
                }
            }
            layer = next;
        }
        layer
    }

    /// Every reduced word of length at most `n`, in shortlex order.
    pub fn ball(rank: u32, n: usize) -> Vec<FreeWord> {
        (0..=n).flat_map(|k| FreeWord::sphere(rank, k)).collect()
    }
}

impl Ord for FreeWord {
    /// Shortlex: length first, then lexicographic in the letter order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for l in &self.0 {
            write!(f, "{:?}", l)?;
        }
        Ok(())
    }
}

/// Gromov product `(x|y)_1 = (|x| + |y| - |x^-1 y|) / 2` in a free group.
pub fn gromov_product(x: &FreeWord, y: &FreeWord) -> HalfInt {
    let d = x.inverse().mul(y).len() as i64;
    HalfInt::from_doubled(x.len() as i64 + y.len() as i64 - d)
}

/// The unique geodesic from `x` to `y` in the Cayley tree, vertex by vertex.
pub fn geodesic_path(x: &FreeWord, y: &FreeWord) -> Vec<FreeWord> {
    let step = x.inverse().mul(y);
    let mut out = Vec::with_capacity(step.len() + 1);
    let mut cur = x.clone();
    out.push(cur.clone());
    for &l in step.letters() {
        cur = cur.mul_letter(l);
        out.push(cur.clone());
    }
    out
}

/// A free group with named generators. Checked operations live here; the
/// unchecked ones are on [`FreeWord`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGroup {
    names: Vec<String>,
}

impl FreeGroup {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        FreeGroup { names: names.into_iter().map(Into::into).collect() }
    }

    pub fn of_rank(rank: u32) -> Self {
        FreeGroup::new((0..rank).map(|i| default_name(i)))
    }

    pub fn rank(&self) -> u32 {
        self.names.len() as u32
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn op(&self, u: &FreeWord, v: &FreeWord) -> Result<FreeWord, WordError> {
        u.check_rank(self.rank())?;
        v.check_rank(self.rank())?;
        Ok(u.mul(v))
    }

    pub fn inverse(&self, u: &FreeWord) -> Result<FreeWord, WordError> {
        u.check_rank(self.rank())?;
        Ok(u.inverse())
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// Parses `a^2 b^-1 c`; `1` or the empty string is the identity.
    pub fn parse(&self, text: &str) -> Result<FreeWord, WordError> {
        let mut raw = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, power) = split_power(tok)?;
            let g = self.index_of(name).ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            for _ in 0..power.unsigned_abs() {
                raw.push(Letter::new(g, power < 0));
            }
        }
        Ok(free_reduce(raw))
    }

    pub fn format(&self, w: &FreeWord) -> String {
        format_runs(w.letters(), |g| self.names.get(g as usize).cloned().unwrap_or_else(|| default_name(g)))
    }
}

pub(crate) fn default_name(i: u32) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{}", i)
    }
}

/// Splits `name^k` into `(name, k)`; a bare name has power 1.
pub(crate) fn split_power(tok: &str) -> Result<(&str, i64), WordError> {
    match tok.split_once('^') {
        None => Ok((tok, 1)),
        Some((name, p)) => {
            let k: i64 = p.parse().map_err(|_| WordError::BadToken(tok.to_string()))?;
            if name.is_empty() {
                return Err(WordError::BadToken(tok.to_string()));
            }
            Ok((name, k))
        }
    }
}

pub(crate) fn format_runs(letters: &[Letter], name: impl Fn(u32) -> String) -> String {
    if letters.is_empty() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut j = i;
        while j < letters.len() && letters[j] == l {
            j += 1;
        }
        let k = (j - i) as i64 * l.sign() as i64;
        if k == 1 {
            parts.push(name(l.generator()));
        } else {
            parts.push(format!("{}^{}", name(l.generator()), k));
        }
        i = j;
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &[i32]) -> FreeWord {
        FreeWord::from_signed(s)
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w(&[1, -1]), FreeWord::identity());
        let raw = [Letter::pos(0), Letter::pos(1), Letter::neg(1), Letter::pos(0)];
        assert_eq!(free_reduce(raw), w(&[1, 1]));
    }

    #[test]
    fn nested_insertions_reduce_back() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let target = vec![Letter::pos(0), Letter::neg(1), Letter::pos(0)];
        let mut raw = target.clone();
        for _ in 0..200 {
            let pos = rng.gen_range(0..=raw.len());
            let l = Letter::from_code(rng.gen_range(0..4));
            raw.insert(pos, l.inverse());
            raw.insert(pos, l);
        }
        // independent oracle: repeatedly delete the leftmost cancelling pair
        let mut oracle = raw.clone();
        loop {
            let hit = (0..oracle.len().saturating_sub(1)).find(|&i| oracle[i] == oracle[i + 1].inverse());
            match hit {
                Some(i) => {
                    oracle.drain(i..i + 2);
                }
                None => break,
            }
        }
        assert_eq!(oracle, target);
        assert_eq!(free_reduce(raw).letters(), &target[..]);
    }

    #[test]
    fn group_op_examples() {
        assert_eq!(w(&[1, 2]).mul(&w(&[-2, 3])), w(&[1, 3]));
        let f = FreeGroup::of_rank(2);
        assert!(f.op(&w(&[1]), &w(&[3])).is_err());
    }

    #[test]
    fn gromov_examples() {
        assert_eq!(gromov_product(&w(&[1, 1]), &w(&[1, 1, 1, 2])), HalfInt::from_int(2));
        assert_eq!(gromov_product(&w(&[1]), &w(&[2])), HalfInt::from_int(0));
    }

    #[test]
    fn gromov_equals_common_prefix_exhaustive() {
        let ball = FreeWord::ball(2, 4);
        for x in &ball {
            for y in &ball {
                let g = gromov_product(x, y);
                assert!(g >= HalfInt::ZERO);
                assert_eq!(g, HalfInt::from_int(x.common_prefix_len(y) as i64));
            }
        }
    }

    #[test]
    fn geodesic_examples() {
        let e = FreeWord::identity();
        assert_eq!(geodesic_path(&e, &w(&[1, 2])), vec![e.clone(), w(&[1]), w(&[1, 2])]);
        assert_eq!(geodesic_path(&w(&[1]), &w(&[2])), vec![w(&[1]), e, w(&[2])]);
    }

    #[test]
    fn parse_and_format() {
        let f = FreeGroup::new(["a", "b"]);
        let x = f.parse("a^2 b^-1 a").unwrap();
        assert_eq!(x, w(&[1, 1, -2, 1]));
        assert_eq!(f.format(&x), "a^2 b^-1 a");
        assert_eq!(f.parse("1").unwrap(), FreeWord::identity());
        assert!(f.parse("c").is_err());
    }

    #[test]
    fn shortlex_order() {
        assert!(w(&[2]) < w(&[1, 1]));
        assert!(w(&[1]) < w(&[-1]));
        assert!(w(&[-1]) < w(&[2]));
    }

    #[test]
    fn sphere_sizes() {
        for n in 1..6 {
            assert_eq!(FreeWord::sphere(2, n).len(), 4 * 3usize.pow(n as u32 - 1));
        }
    }

    #[test]
    fn cyclic_split_recovers() {
        let x = w(&[2, 1, 1, 3, -2]);
        let (p, c) = x.cyclic_split();
        assert!(c.is_cyclically_reduced());
        assert_eq!(p.mul(&c).mul(&p.inverse()), x);
    }
}
