//! Letters, words and alphabets over the free group `F(A)` and over the free
//! product of order-two groups `F̄(A)`.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter index {0} out of range for an alphabet of {1} generators")]
    LetterOutOfRange(usize, usize),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("inverse letter `{0}` is not allowed over involutive generators")]
    InverseInInvolutive(String),
    #[error("generator names must be distinct and nonempty")]
    BadGeneratorNames,
    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("syllable forms are only defined over free generators")]
    SyllablesInInvolutive,
}

/// How inverses behave: free generators (`a a' = 1`) or involutions (`a a = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    FreeInverse,
    Involutive,
}

/// A signed generator: `+(i+1)` for `a_i`, `-(i+1)` for `a_i^{-1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i16);

impl Letter {
    pub fn new(gen: usize, positive: bool) -> Letter {
        let v = gen as i16 + 1;
        Letter(if positive { v } else { -v })
    }

    pub fn pos(gen: usize) -> Letter {
        Letter::new(gen, true)
    }

    pub fn neg(gen: usize) -> Letter {
        Letter::new(gen, false)
    }

    pub fn gen(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn exponent(self) -> i64 {
        if self.0 > 0 {
            1
        } else {
            -1
        }
    }

    pub fn inverse(self, mode: Mode) -> Letter {
        match mode {
            Mode::FreeInverse => Letter(-self.0),
            Mode::Involutive => self,
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "a{}", self.gen() + 1)
        } else {
            write!(f, "a{}'", self.gen() + 1)
        }
    }
}

/// A finite sequence of letters. Reduction is always relative to a [`Mode`].
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (idx, l) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

/// Serialized as signed 1-based indices; reports format words against an alphabet instead.
impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|l| l.0))
    }
}

impl Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Word {
        Word(letters)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Word {
        Word(iter.into_iter().collect())
    }
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Builds a word from signed 1-based generator indices, e.g. `[1, -2]` is `a1 a2'`.
    pub fn from_signed(xs: &[i32]) -> Word {
        xs.iter()
            .map(|&x| {
                assert!(x != 0, "0 is not a letter");
                Letter::new(x.unsigned_abs() as usize - 1, x > 0)
            })
            .collect()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn power(&self, e: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() * e);
        for _ in 0..e {
            v.extend_from_slice(&self.0);
        }
        Word(v)
    }

    pub fn subword(&self, start: usize, len: usize) -> Word {
        Word(self.0[start..start + len].to_vec())
    }

    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<(), WordError> {
        for l in &self.0 {
            if l.gen() >= alphabet.len() {
                return Err(WordError::LetterOutOfRange(l.gen(), alphabet.len()));
            }
            if alphabet.mode == Mode::Involutive && !l.is_positive() {
                return Err(WordError::InverseInInvolutive(alphabet.letter_name(*l)));
            }
        }
        Ok(())
    }

    pub fn is_reduced(&self, mode: Mode) -> bool {
        self.0.windows(2).all(|p| p[1] != p[0].inverse(mode))
    }

    pub fn is_cyclically_reduced(&self, mode: Mode) -> bool {
        self.is_reduced(mode)
            && (self.0.len() < 2 || self.0[0] != self.0[self.0.len() - 1].inverse(mode))
    }

    /// The unique reduced form.
    pub fn free_reduce(&self, mode: Mode) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse(mode)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Formal inverse: reverse, and flip signs over free generators.
    pub fn invert(&self, mode: Mode) -> Word {
        self.0.iter().rev().map(|l| l.inverse(mode)).collect()
    }

    /// Returns `(core, conjugator)` with `self = conjugator · core · conjugator⁻¹`.
    pub fn cyclic_reduce(&self, mode: Mode) -> (Word, Word) {
        let w = self.free_reduce(mode);
        let n = w.len();
        let mut k = 0;
        while 2 * k + 1 < n && w.0[n - 1 - k] == w.0[k].inverse(mode) {
            k += 1;
        }
        (Word(w.0[k..n - k].to_vec()), Word(w.0[..k].to_vec()))
    }

    pub fn rotate(&self, shift: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        let s = shift % self.0.len();
        let mut v = self.0[s..].to_vec();
        v.extend_from_slice(&self.0[..s]);
        Word(v)
    }

    /// All `|w|` rotations in rotation order, keeping repeats.
    pub fn cyclic_permutations(&self, mode: Mode) -> Result<Vec<Word>, WordError> {
        if !self.is_cyclically_reduced(mode) {
            return Err(WordError::NotCyclicallyReduced);
        }
        if self.0.is_empty() {
            return Ok(vec![Word::empty()]);
        }
        Ok((0..self.0.len()).map(|s| self.rotate(s)).collect())
    }

    /// Run-length encoding by generator. Only meaningful over free generators.
    pub fn syllable_form(&self, mode: Mode) -> Result<SyllableForm, WordError> {
        if mode == Mode::Involutive {
            return Err(WordError::SyllablesInInvolutive);
        }
        let mut syllables: Vec<(usize, i64)> = Vec::new();
        for &l in &self.0 {
            match syllables.last_mut() {
                Some((g, e)) if *g == l.gen() => *e += l.exponent(),
                _ => syllables.push((l.gen(), l.exponent())),
            }
        }
        Ok(SyllableForm { syllables })
    }

    /// `‖w‖`: number of maximal single-generator blocks.
    pub fn syllable_length(&self) -> usize {
        if self.0.is_empty() {
            return 0;
        }
        1 + self.0.windows(2).filter(|p| p[0].gen() != p[1].gen()).count()
    }

    /// The maximum number of occurrences of one signed letter.
    pub fn letter_bound(&self) -> usize {
        let mut counts: std::collections::HashMap<Letter, usize> = Default::default();
        for &l in &self.0 {
            *counts.entry(l).or_default() += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }

    /// `Some((root, e))` with `self = root^e`, `e ≥ 2` and `root` primitive.
    pub fn is_proper_power(&self) -> Option<(Word, usize)> {
        let n = self.0.len();
        for d in 1..n {
            if n % d == 0 && self.0[d..] == self.0[..n - d] {
                return Some((Word(self.0[..d].to_vec()), n / d));
            }
        }
        None
    }

    /// Generators occurring in the word, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = self.0.iter().map(|l| l.gen()).collect();
        gens.sort_unstable();
        gens.dedup();
        gens
    }

    /// Sum of exponents of `gen`.
    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.0.iter().filter(|l| l.gen() == gen).map(|l| l.exponent()).sum()
    }

    /// Offsets at which `pattern` occurs.
    pub fn occurrences(&self, pattern: &[Letter]) -> Vec<usize> {
        if pattern.is_empty() || pattern.len() > self.0.len() {
            return Vec::new();
        }
        self.0
            .windows(pattern.len())
            .enumerate()
            .filter(|(_, w)| *w == pattern)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyllableForm {
    pub syllables: Vec<(usize, i64)>,
}

impl SyllableForm {
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn expand(&self) -> Word {
        let mut out = Vec::new();
        for &(g, e) in &self.syllables {
            let l = Letter::new(g, e > 0);
            out.extend(std::iter::repeat(l).take(e.unsigned_abs() as usize));
        }
        Word(out)
    }
}

/// Generator names together with the inverse convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
    pub mode: Mode,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        mode: Mode,
    ) -> Result<Alphabet, WordError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        if names.is_empty()
            || names.iter().any(|n| {
                n.is_empty() || n.contains('\'') || n.chars().any(char::is_whitespace)
            })
            || !names.iter().all(|n| seen.insert(n.clone()))
        {
            return Err(WordError::BadGeneratorNames);
        }
        Ok(Alphabet { names, mode })
    }

    /// `a1 … an`.
    pub fn numbered(n: usize, mode: Mode) -> Alphabet {
        Alphabet::new((1..=n).map(|i| format!("a{i}")), mode).expect("distinct names")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let base = self.names.get(l.gen()).cloned().unwrap_or_else(|| format!("?{}", l.gen()));
        if l.is_positive() {
            base
        } else {
            format!("{base}'")
        }
    }

    /// Parses whitespace-separated generator names with an optional `'` suffix for inverses.
    /// `1` or `ε` on its own denotes the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" || tok == "ε" {
                continue;
            }
            let (name, positive) = match tok.strip_suffix('\'') {
                Some(n) => (n, false),
                None => (tok, true),
            };
            let gen = self
                .index_of(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            if !positive && self.mode == Mode::Involutive {
                return Err(WordError::InverseInInvolutive(tok.to_string()));
            }
            letters.push(Letter::new(gen, positive));
        }
        Ok(Word(letters))
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(" ")
    }

    pub fn free_reduce(&self, w: &Word) -> Result<Word, WordError> {
        w.check_alphabet(self)?;
        Ok(w.free_reduce(self.mode))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const F: Mode = Mode::FreeInverse;
    const I: Mode = Mode::Involutive;

    fn w(xs: &[i32]) -> Word {
        Word::from_signed(xs)
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(w(&[]).free_reduce(F), w(&[]));
        assert_eq!(w(&[1, 2, -2, -1]).free_reduce(F), w(&[]));
        assert_eq!(w(&[1, 2, 2, 3]).free_reduce(I), w(&[1, 3]));
    }

    #[test]
    fn free_reduce_rejects_out_of_range() {
        let a = Alphabet::numbered(2, F);
        assert_eq!(a.free_reduce(&w(&[3])), Err(WordError::LetterOutOfRange(2, 2)));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w(&[1, -2]).invert(F), w(&[2, -1]));
        assert_eq!(w(&[1, 2, 3]).invert(I), w(&[3, 2, 1]));
        assert_eq!(w(&[]).invert(F), w(&[]));
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w(&[1, 2, -1]).cyclic_reduce(F), (w(&[2]), w(&[1])));
        assert_eq!(w(&[1, 2]).cyclic_reduce(F), (w(&[1, 2]), w(&[])));
        assert_eq!(w(&[1, 2, 3, 2, 1]).cyclic_reduce(I), (w(&[3]), w(&[1, 2])));
    }

    #[test]
    fn cyclic_permutation_examples() {
        assert_eq!(w(&[1, 2]).cyclic_permutations(F).unwrap(), vec![w(&[1, 2]), w(&[2, 1])]);
        assert_eq!(w(&[]).cyclic_permutations(F).unwrap(), vec![w(&[])]);
        assert_eq!(w(&[1, 1, 2]).cyclic_permutations(F).unwrap().len(), 3);
        assert_eq!(w(&[1, 2, -1]).cyclic_permutations(F), Err(WordError::NotCyclicallyReduced));
    }

    #[test]
    fn syllable_examples() {
        let s = w(&[1, 1, 2, 2, 2, -1]).syllable_form(F).unwrap();
        assert_eq!(s.syllables, vec![(0, 2), (1, 3), (0, -1)]);
        assert_eq!(w(&[1, 1, 2, 2, 2, -1]).syllable_length(), 3);
        assert_eq!(w(&[]).syllable_length(), 0);
        assert_eq!(w(&[1, 2, 1, 2]).syllable_length(), 4);
        assert_eq!(w(&[1]).syllable_form(I), Err(WordError::SyllablesInInvolutive));
    }

    #[test]
    fn letter_bound_examples() {
        assert_eq!(w(&[1, 2, -1, -2]).letter_bound(), 1);
        for d in 2..6 {
            let mut v = vec![1, 1];
            v.extend(std::iter::repeat(2).take(d));
            assert_eq!(w(&v).letter_bound(), d);
        }
        assert_eq!(w(&[1]).letter_bound(), 1);
    }

    #[test]
    fn proper_power_examples() {
        assert_eq!(w(&[1, 2, 1, 2]).is_proper_power(), Some((w(&[1, 2]), 2)));
        assert_eq!(w(&[1, 2]).is_proper_power(), None);
        assert_eq!(w(&[1, 1, 1]).is_proper_power(), Some((w(&[1]), 3)));
    }

    #[test]
    fn proper_power_matches_divisor_brute_force() {
        // every word of length ≤ 10 over {a1, a2, a1', a2'}
        let alphabet = [1, -1, 2, -2];
        for len in 1..=10usize {
            let total = 4usize.pow(len as u32);
            for code in 0..total {
                let mut c = code;
                let xs: Vec<i32> = (0..len)
                    .map(|_| {
                        let x = alphabet[c % 4];
                        c /= 4;
                        x
                    })
                    .collect();
                let word = w(&xs);
                let brute = (2..=len).filter(|e| len % e == 0).find_map(|e| {
                    let root = word.subword(0, len / e);
                    (root.power(e) == word).then_some(e)
                });
                // the maximal exponent corresponds to the primitive root
                let brute_max = (2..=len)
                    .rev()
                    .filter(|e| len % e == 0)
                    .find(|&e| word.subword(0, len / e).power(e) == word);
                assert_eq!(word.is_proper_power().map(|(_, e)| e), brute_max, "{word:?}");
                assert_eq!(brute.is_some(), brute_max.is_some());
            }
        }
    }

    #[test]
    fn parse_and_format() {
        let a = Alphabet::new(["a", "b"], F).unwrap();
        let x = a.parse_word("a b' a").unwrap();
        assert_eq!(x, Word::from(vec![Letter::pos(0), Letter::neg(1), Letter::pos(0)]));
        assert_eq!(a.format_word(&x), "a b' a");
        let c = Alphabet::new(["a", "b"], I).unwrap();
        assert!(matches!(c.parse_word("a b'"), Err(WordError::InverseInInvolutive(_))));
        assert!(matches!(a.parse_word("c"), Err(WordError::UnknownGenerator(_))));
        assert!(Alphabet::new(["a", "a"], F).is_err());
    }

    fn word_strategy(mode: Mode) -> impl Strategy<Value = Word> {
        let letter = match mode {
            Mode::FreeInverse => prop_oneof![Just(1), Just(-1), Just(2), Just(-2), Just(3), Just(-3)].boxed(),
            Mode::Involutive => prop_oneof![Just(1), Just(2), Just(3)].boxed(),
        };
        proptest::collection::vec(letter, 0..16).prop_map(|xs| Word::from_signed(&xs))
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_shrinking(x in word_strategy(F), y in word_strategy(I)) {
            for (word, mode) in [(x, F), (y, I)] {
                let r = word.free_reduce(mode);
                prop_assert!(r.len() <= word.len());
                prop_assert!(r.is_reduced(mode));
                prop_assert_eq!(r.free_reduce(mode), r.clone());
                prop_assert_eq!(word.invert(mode).invert(mode), word.clone());
                prop_assert!(word.concat(&word.invert(mode)).free_reduce(mode).is_empty());
            }
        }

        #[test]
        fn syllables_are_subadditive(u in word_strategy(F), v in word_strategy(F)) {
            let u = u.free_reduce(F);
            let v = v.free_reduce(F);
            let uv = u.concat(&v).free_reduce(F);
            prop_assert!(uv.syllable_length() <= u.syllable_length() + v.syllable_length());
            let s = uv.syllable_form(F).unwrap();
            prop_assert_eq!(s.expand(), uv.clone());
            prop_assert!(s.syllables.windows(2).all(|p| p[0].0 != p[1].0));
        }

        #[test]
        fn letter_bound_is_rotation_and_inversion_invariant(x in word_strategy(F)) {
            let (core, _) = x.cyclic_reduce(F);
            prop_assert!(core.is_cyclically_reduced(F));
            for rot in core.cyclic_permutations(F).unwrap() {
                prop_assert_eq!(rot.letter_bound(), core.letter_bound());
            }
            prop_assert_eq!(core.invert(F).letter_bound(), core.letter_bound());
        }

        #[test]
        fn cyclic_reduce_conjugates_back(x in word_strategy(F), y in word_strategy(I)) {
            for (word, mode) in [(x, F), (y, I)] {
                let (core, c) = word.cyclic_reduce(mode);
                let back = c.concat(&core).concat(&c.invert(mode)).free_reduce(mode);
                prop_assert_eq!(back, word.free_reduce(mode));
                prop_assert!(core.is_cyclically_reduced(mode));
            }
        }
    }
}
