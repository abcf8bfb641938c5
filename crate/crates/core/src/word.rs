//! Words over the two generating sets, stored as canonical run-length blocks.
//!
//! `X = {a, a^-1, b, b^-1}` generates the Heisenberg group and
//! `S = {a, a^-1, t}` generates the extension. Words are kept freely reduced
//! in `a` and `b` (so `a a^-1` never survives construction) and canonical as
//! blocks: no zero exponents and no two adjacent blocks with the same base.
//! A run of `t` letters is a single block `t^k` with `k > 0`; `t t` is a
//! word of length two even though it evaluates to the identity.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::group::{GroupError, HeisPoint, Result, VHPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    /// `{a, a^-1, b, b^-1}` over the Heisenberg group.
    X,
    /// `{a, a^-1, t}` over the extension.
    S,
}

impl Alphabet {
    pub fn name(self) -> &'static str {
        match self {
            Alphabet::X => "X",
            Alphabet::S => "S",
        }
    }

    pub fn contains(self, base: Base) -> bool {
        matches!(
            (self, base),
            (_, Base::A) | (Alphabet::X, Base::B) | (Alphabet::S, Base::T)
        )
    }

    pub fn letters(self) -> &'static [Letter] {
        match self {
            Alphabet::X => &[Letter::A, Letter::AInv, Letter::B, Letter::BInv],
            Alphabet::S => &[Letter::A, Letter::AInv, Letter::T],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    A,
    B,
    T,
}

impl Base {
    fn symbol(self) -> char {
        match self {
            Base::A => 'a',
            Base::B => 'b',
            Base::T => 't',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
    T,
}

impl Letter {
    pub fn base(self) -> Base {
        match self {
            Letter::A | Letter::AInv => Base::A,
            Letter::B | Letter::BInv => Base::B,
            Letter::T => Base::T,
        }
    }

    pub fn exponent(self) -> i64 {
        match self {
            Letter::AInv | Letter::BInv => -1,
            _ => 1,
        }
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
            Letter::T => Letter::T,
        }
    }

    pub fn heis(self) -> Option<HeisPoint> {
        match self {
            Letter::A => Some(HeisPoint::a_pow(1)),
            Letter::AInv => Some(HeisPoint::a_pow(-1)),
            Letter::B => Some(HeisPoint::b_pow(1)),
            Letter::BInv => Some(HeisPoint::b_pow(-1)),
            Letter::T => None,
        }
    }

    pub fn vh(self) -> Option<VHPoint> {
        match self {
            Letter::A => Some(VHPoint::A),
            Letter::AInv => Some(VHPoint::new(HeisPoint::a_pow(-1), false)),
            Letter::T => Some(VHPoint::T),
            Letter::B | Letter::BInv => None,
        }
    }

    /// `A` and `B` denote the inverse letters.
    pub fn symbol(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
            Letter::T => 't',
        }
    }

    fn from_symbol(c: char) -> Option<Letter> {
        Some(match c {
            'a' => Letter::A,
            'A' => Letter::AInv,
            'b' => Letter::B,
            'B' => Letter::BInv,
            't' => Letter::T,
            _ => return None,
        })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::AInv => f.write_str("a^-1"),
            Letter::BInv => f.write_str("b^-1"),
            other => write!(f, "{}", other.symbol()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    pub base: Base,
    pub exp: i64,
}

impl Block {
    pub fn len(&self) -> u64 {
        self.exp.unsigned_abs()
    }

    pub fn is_empty(&self) -> bool {
        self.exp == 0
    }

    fn letter(&self) -> Letter {
        match (self.base, self.exp > 0) {
            (Base::A, true) => Letter::A,
            (Base::A, false) => Letter::AInv,
            (Base::B, true) => Letter::B,
            (Base::B, false) => Letter::BInv,
            (Base::T, _) => Letter::T,
        }
    }
}

/// The evaluated image of a word, tagged by its group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Element {
    Heis(HeisPoint),
    Vh(VHPoint),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    blocks: Vec<Block>,
}

impl Word {
    pub fn empty(alphabet: Alphabet) -> Self {
        Word {
            alphabet,
            blocks: Vec::new(),
        }
    }

    pub fn from_letters<I>(alphabet: Alphabet, letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut w = Word::empty(alphabet);
        for l in letters {
            w.push_block(l.base(), l.exponent())?;
        }
        Ok(w)
    }

    pub fn from_blocks<I>(alphabet: Alphabet, blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Base, i64)>,
    {
        let mut w = Word::empty(alphabet);
        for (base, exp) in blocks {
            w.push_block(base, exp)?;
        }
        Ok(w)
    }

    /// Parses whitespace-separated tokens `a`, `A` (= a^-1), `b`, `B`, `t`,
    /// each optionally followed by `^k`; `e` or an empty string is the empty word.
    pub fn parse(alphabet: Alphabet, s: &str) -> Result<Self> {
        let mut w = Word::empty(alphabet);
        for tok in s.split_whitespace() {
            if tok == "e" || tok == "ε" {
                continue;
            }
            let (head, exp) = match tok.split_once('^') {
                Some((h, e)) => (
                    h,
                    e.parse::<i64>()
                        .map_err(|_| GroupError::Parse(tok.to_string()))?,
                ),
                None => (tok, 1),
            };
            let mut chars = head.chars();
            let letter = match (chars.next().and_then(Letter::from_symbol), chars.next()) {
                (Some(l), None) => l,
                _ => return Err(GroupError::Parse(tok.to_string())),
            };
            if letter == Letter::T && exp < 0 {
                return Err(GroupError::Parse(tok.to_string()));
            }
            let exp = exp
                .checked_mul(letter.exponent())
                .ok_or(GroupError::Overflow("parse"))?;
            w.push_block(letter.base(), exp)?;
        }
        Ok(w)
    }

    /// Appends `base^exp`, reducing against the last block.
    /// `t` exponents are run lengths and must be nonnegative.
    pub fn push_block(&mut self, base: Base, exp: i64) -> Result<()> {
        if !self.alphabet.contains(base) {
            return Err(GroupError::MixedAlphabet {
                letter: base.symbol(),
                alphabet: self.alphabet.name(),
            });
        }
        if base == Base::T && exp < 0 {
            return Err(GroupError::Parse(format!("t^{exp}")));
        }
        if exp == 0 {
            return Ok(());
        }
        match self.blocks.last_mut() {
            Some(last) if last.base == base => {
                last.exp = last
                    .exp
                    .checked_add(exp)
                    .ok_or(GroupError::Overflow("word block"))?;
                if last.exp == 0 {
                    self.blocks.pop();
                }
            }
            _ => self.blocks.push(Block { base, exp }),
        }
        Ok(())
    }

    pub fn push(&mut self, letter: Letter) -> Result<()> {
        self.push_block(letter.base(), letter.exponent())
    }

    pub fn extend_word(&mut self, other: &Word) -> Result<()> {
        for b in &other.blocks {
            self.push_block(b.base, b.exp)?;
        }
        Ok(())
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        let mut w = self.clone();
        w.extend_word(other)?;
        Ok(w)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Word length: the sum of absolute block exponents.
    pub fn len(&self) -> u64 {
        self.blocks.iter().map(Block::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn t_count(&self) -> u64 {
        self.blocks
            .iter()
            .filter(|b| b.base == Base::T)
            .map(Block::len)
            .sum()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.letter(), b.len() as usize))
    }

    pub fn reverse(&self) -> Word {
        Word {
            alphabet: self.alphabet,
            blocks: self.blocks.iter().rev().copied().collect(),
        }
    }

    pub fn eval(&self) -> Result<Element> {
        Ok(match self.alphabet {
            Alphabet::X => Element::Heis(self.eval_heis()?),
            Alphabet::S => Element::Vh(self.eval_vh()?),
        })
    }

    pub fn eval_heis(&self) -> Result<HeisPoint> {
        let mut acc = HeisPoint::IDENTITY;
        for b in &self.blocks {
            let g = match b.base {
                Base::A => HeisPoint::a_pow(b.exp),
                Base::B => HeisPoint::b_pow(b.exp),
                Base::T => {
                    return Err(GroupError::MixedAlphabet {
                        letter: 't',
                        alphabet: "X",
                    })
                }
            };
            acc = acc.checked_mul(&g)?;
        }
        Ok(acc)
    }

    pub fn eval_vh(&self) -> Result<VHPoint> {
        let mut acc = VHPoint::IDENTITY;
        for b in &self.blocks {
            let g = match b.base {
                Base::A => VHPoint::new(HeisPoint::a_pow(b.exp), false),
                Base::T => VHPoint::new(HeisPoint::IDENTITY, b.exp % 2 == 1),
                Base::B => {
                    return Err(GroupError::MixedAlphabet {
                        letter: 'b',
                        alphabet: "S",
                    })
                }
            };
            acc = acc.checked_mul(&g)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("e");
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if b.exp == 1 {
                write!(f, "{}", b.base.symbol())?;
            } else {
                write!(f, "{}^{}", b.base.symbol(), b.exp)?;
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: &str) -> Word {
        Word::parse(Alphabet::X, s).unwrap()
    }

    #[test]
    fn empty_word_is_identity() {
        assert_eq!(
            Word::empty(Alphabet::X).eval_heis().unwrap(),
            HeisPoint::IDENTITY
        );
        assert_eq!(
            Word::empty(Alphabet::S).eval_vh().unwrap(),
            VHPoint::IDENTITY
        );
    }

    #[test]
    fn commutator_evaluates_to_center() {
        assert_eq!(x("a b A B").eval_heis().unwrap(), HeisPoint::new(0, 0, 1));
    }

    #[test]
    fn tat_is_b() {
        let w = Word::parse(Alphabet::S, "t a t").unwrap();
        assert_eq!(w.eval_vh().unwrap(), VHPoint::new(HeisPoint::B, false));
        assert_eq!(w.t_count(), 2);
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn blocks_are_canonical() {
        let w = x("a a^2 b B A^3");
        assert_eq!(w.blocks(), &[]);
        let w = x("a^2 b^0 a");
        assert_eq!(
            w.blocks(),
            &[Block {
                base: Base::A,
                exp: 3
            }]
        );
        let w = Word::parse(Alphabet::S, "t t a A t").unwrap();
        assert_eq!(
            w.blocks(),
            &[Block {
                base: Base::T,
                exp: 3
            }]
        );
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn mixed_alphabet_rejected() {
        assert!(matches!(
            Word::parse(Alphabet::X, "a t"),
            Err(GroupError::MixedAlphabet { letter: 't', .. })
        ));
        assert!(Word::from_letters(Alphabet::S, [Letter::A, Letter::B]).is_err());
        assert!(Word::parse(Alphabet::S, "t^-1").is_err());
        assert!(Word::parse(Alphabet::X, "c").is_err());
    }

    #[test]
    fn letters_and_display() {
        let w = x("b^-2 a b a b");
        assert_eq!(w.to_string(), "b^-2 a b a b");
        let flat: Vec<Letter> = w.letters().collect();
        assert_eq!(flat.len() as u64, w.len());
        assert_eq!(Word::from_letters(Alphabet::X, flat).unwrap(), w);
        assert_eq!(Word::empty(Alphabet::S).to_string(), "e");
    }

    #[test]
    fn reverse_is_involution() {
        let w = x("a^3 B^2 a b^5");
        assert_eq!(w.reverse().reverse(), w);
        assert_eq!(w.reverse().to_string(), "b^5 a b^-2 a^3");
    }
}
