//! Free-group words, integral group rings and right Fox derivatives.
//!
//! Generators are indexed from `0` internally; the textual syntax numbers
//! them from one (`x1`, `x2`, ...). The right Fox derivative is the unique
//! family of operators satisfying
//!
//! ```text
//! 1 - w = Σ_j (1 - x_j) · ∂w/∂x_j
//! ```
//!
//! and it is computed through the product rule
//! `∂(uv) = ∂u · v + ∂v`, `∂x_i/∂x_j = δ_ij`, `∂x_i⁻¹/∂x_j = -δ_ij x_i⁻¹`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients and word lengths are kept below this bound.
pub const ARITHMETIC_BOUND: i64 = 1_000_000;

/// A generator raised to `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: usize, exponent: i8) -> Self {
        assert!(exponent == 1 || exponent == -1, "letter exponent must be ±1");
        Self { generator, exponent }
    }

    pub fn inverse(self) -> Self {
        Self {
            generator: self.generator,
            exponent: -self.exponent,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.exponent == -other.exponent
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Self(vec![Letter::new(index, 1)])
    }

    pub fn inverse_generator(index: usize) -> Self {
        Self(vec![Letter::new(index, -1)])
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for letter in letters {
            match stack.last() {
                Some(&top) if top.cancels(letter) => {
                    stack.pop();
                }
                _ => stack.push(letter),
            }
        }
        assert!(
            (stack.len() as i64) <= ARITHMETIC_BOUND,
            "word length exceeds arithmetic bound"
        );
        Self(stack)
    }

    /// Reduces `letters` after checking every generator index is below `n`.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I, n: usize) -> Result<Self> {
        let letters: Vec<Letter> = letters.into_iter().collect();
        if let Some(bad) = letters.iter().find(|l| l.generator >= n) {
            return Err(Error::GeneratorOutOfRange {
                index: bad.generator,
                n,
            });
        }
        Ok(Self::reduce(letters))
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

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| !p[0].cancels(p[1]))
    }

    /// Number of generators needed to spell the word (`max index + 1`).
    pub fn generator_span(&self) -> usize {
        self.0.iter().map(|l| l.generator + 1).max().unwrap_or(0)
    }

    pub fn multiply(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word::reduce(self.0.iter().rev().map(|l| l.inverse()))
    }

    /// Commutator `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.multiply(v).multiply(&u.inverse()).multiply(&v.inverse())
    }

    /// Parses `x1*x2^-1*x1^3`. The empty string and `1` denote the identity.
    pub fn parse(text: &str, n: usize) -> Result<Word> {
        Parser::new(text).parse_word(n)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        // Runs of the same letter are printed with an exponent.
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let letter = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == letter {
                run += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let power = run as i64 * letter.exponent as i64;
            if power == 1 {
                write!(f, "x{}", letter.generator + 1)?;
            } else {
                write!(f, "x{}^{}", letter.generator + 1, power)?;
            }
            i += run;
        }
        Ok(())
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn integer(&mut self, allow_sign: bool) -> Result<i64> {
        let start = self.pos;
        if allow_sign && matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        text.parse::<i64>()
            .ok()
            .filter(|v| v.abs() <= ARITHMETIC_BOUND)
            .ok_or_else(|| Error::Parse {
                position: start,
                message: format!("integer `{text}` out of range"),
            })
    }

    fn parse_word(&mut self, n: usize) -> Result<Word> {
        self.skip_ws();
        if self.pos == self.bytes.len() {
            return Ok(Word::identity());
        }
        if self.peek() == Some(b'1') {
            self.pos += 1;
            self.skip_ws();
            if self.pos == self.bytes.len() {
                return Ok(Word::identity());
            }
            return Err(self.error("unexpected input after identity `1`"));
        }
        let mut letters = Vec::new();
        loop {
            self.skip_ws();
            self.term(n, &mut letters)?;
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'*') => self.pos += 1,
                Some(c) => return Err(self.error(format!("unexpected character `{}`", c as char))),
            }
        }
        Ok(Word::reduce(letters))
    }

    fn term(&mut self, n: usize, out: &mut Vec<Letter>) -> Result<()> {
        if self.peek() != Some(b'x') {
            return Err(self.error("expected generator `x<k>`"));
        }
        self.pos += 1;
        let index_pos = self.pos;
        let index = self.integer(false)?;
        if index < 1 || index as usize > n {
            return Err(Error::Parse {
                position: index_pos,
                message: format!("generator x{index} out of range 1..={n}"),
            });
        }
        self.skip_ws();
        let mut power = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            power = self.integer(true)?;
        }
        let letter = Letter::new(index as usize - 1, if power < 0 { -1 } else { 1 });
        out.extend(std::iter::repeat_n(letter, power.unsigned_abs() as usize));
        Ok(())
    }
}

fn check_coefficient(c: i64) {
    assert!(
        c.abs() <= ARITHMETIC_BOUND,
        "group ring coefficient exceeds arithmetic bound"
    );
}

/// An element of the integral group ring `ℤF`, stored canonically: keys are
/// reduced words in lexicographic order and no coefficient is zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, i64>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(word: Word) -> Self {
        Self::from_term(word, 1)
    }

    pub fn from_term(word: Word, coefficient: i64) -> Self {
        let mut out = Self::zero();
        out.add_term(word, coefficient);
        out
    }

    /// `1 - x_j`.
    pub fn one_minus_generator(index: usize) -> Self {
        let mut out = Self::one();
        out.add_term(Word::generator(index), -1);
        out
    }

    pub fn add_term(&mut self, word: Word, coefficient: i64) {
        if coefficient == 0 {
            return;
        }
        match self.terms.entry(word) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coefficient;
                if *e.get() == 0 {
                    e.remove();
                } else {
                    check_coefficient(*e.get());
                }
            }
            Entry::Vacant(e) => {
                check_coefficient(coefficient);
                e.insert(coefficient);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, c)| (w, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &Word) -> i64 {
        self.terms.get(word).copied().unwrap_or(0)
    }

    /// Image under the augmentation `ℤF → ℤ` sending every word to `1`.
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), -c);
        }
        out
    }

    pub fn scale(&self, factor: i64) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            out.add_term(w.clone(), c * factor);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                out.add_term(u.multiply(v), a * b);
            }
        }
        out
    }

    /// Right multiplication by a single word.
    pub fn mul_word(&self, word: &Word) -> Self {
        let mut out = Self::zero();
        for (u, a) in self.terms() {
            out.add_term(u.multiply(word), a);
        }
        out
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (word, coef)) in self.terms.iter().enumerate() {
            let magnitude = coef.abs();
            match (i, *coef < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if magnitude != 1 {
                if word.is_identity() {
                    write!(f, "{magnitude}")?;
                    continue;
                }
                write!(f, "{magnitude}*")?;
            }
            write!(f, "{word}")?;
        }
        Ok(())
    }
}

/// Right Fox derivative `∂w/∂x_j`.
///
/// Unrolling the product rule over `w = l_1 ⋯ l_k` gives
/// `Σ_i ∂l_i · (l_{i+1} ⋯ l_k)`, which is accumulated from the right.
pub fn fox_derivative(word: &Word, generator: usize, n: usize) -> Result<GroupRingElement> {
    if generator >= n {
        return Err(Error::GeneratorOutOfRange { index: generator, n });
    }
    if let Some(bad) = word.letters().iter().find(|l| l.generator >= n) {
        return Err(Error::GeneratorOutOfRange {
            index: bad.generator,
            n,
        });
    }
    let letters = word.letters();
    let mut out = GroupRingElement::zero();
    for (i, letter) in letters.iter().enumerate() {
        if letter.generator != generator {
            continue;
        }
        if letter.exponent == 1 {
            // ∂x_j = 1, times the suffix after this letter
            out.add_term(Word::reduce(letters[i + 1..].iter().copied()), 1);
        } else {
            // ∂x_j⁻¹ = -x_j⁻¹, times the suffix
            out.add_term(Word::reduce(letters[i..].iter().copied()), -1);
        }
    }
    Ok(out)
}

/// Checks `1 - w = Σ_j (1 - x_j) ∂w/∂x_j` exactly over the integers, with
/// `j` ranging over the generators `w` mentions.
pub fn verify_fox_identity(word: &Word) -> bool {
    let n = word.generator_span();
    let lhs = GroupRingElement::one().sub(&GroupRingElement::from_word(word.clone()));
    let mut rhs = GroupRingElement::zero();
    for j in 0..n {
        let d = fox_derivative(word, j, n).expect("indices checked");
        rhs = rhs.add(&GroupRingElement::one_minus_generator(j).mul(&d));
    }
    lhs == rhs
}

/// A finite presentation `⟨x_1, …, x_n ; r_1, …, r_m⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    n: usize,
    relators: Vec<Word>,
    genus: Option<usize>,
}

impl Presentation {
    pub fn new(n: usize, relators: Vec<Word>) -> Result<Self> {
        for r in &relators {
            if r.generator_span() > n {
                return Err(Error::GeneratorOutOfRange {
                    index: r.generator_span() - 1,
                    n,
                });
            }
        }
        Ok(Self {
            n,
            relators: relators.into_iter().map(|r| Word::reduce(r.0)).collect(),
            genus: None,
        })
    }

    /// The closed orientable surface of genus `ℓ`:
    /// `⟨x_1, y_1, …, x_ℓ, y_ℓ ; [x_1, y_1] ⋯ [x_ℓ, y_ℓ]⟩`, where `x_k` is
    /// generator `2k` and `y_k` generator `2k + 1` (zero-based).
    pub fn surface(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidArgument(
                "surface genus must be at least 1".into(),
            ));
        }
        let relator = (0..genus).fold(Word::identity(), |acc, k| {
            let c = Word::commutator(&Word::generator(2 * k), &Word::generator(2 * k + 1));
            acc.multiply(&c)
        });
        Ok(Self {
            n: 2 * genus,
            relators: vec![relator],
            genus: Some(genus),
        })
    }

    pub fn generator_count(&self) -> usize {
        self.n
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn genus(&self) -> Option<usize> {
        self.genus
    }

    /// The Fox matrix `[∂r_i/∂x_j]` (rows: relators).
    pub fn fox_matrix(&self) -> Vec<Vec<GroupRingElement>> {
        self.relators
            .iter()
            .map(|r| {
                (0..self.n)
                    .map(|j| fox_derivative(r, j, self.n).expect("validated presentation"))
                    .collect()
            })
            .collect()
    }
}
