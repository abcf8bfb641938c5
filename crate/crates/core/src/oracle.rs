//! Closed-form word length and explicit geodesics for the Heisenberg group
//! over `X = {a, a^-1, b, b^-1}`.
//!
//! Every element is first moved into the fundamental domain
//! `x >= 0, z >= 0, -x <= y <= x` by the length-preserving symmetries
//! [`Symmetry::Tau`], [`Symmetry::PhiA`] and [`Symmetry::PhiB`]. There one of
//! six cases applies and yields a geodesic with at most six maximal blocks,
//! which is then pulled back along the same symmetries.
//!
//! Square-root comparisons are done on squares in integer arithmetic; the
//! oracle never touches floating point.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::group::{GroupError, HeisPoint};
use crate::word::{Alphabet, Base, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("square root of negative number {0}")]
    NegativeSqrt(i64),
    #[error("S_z is only defined for z >= 1, got {0}")]
    NonPositiveZ(i64),
    #[error("the identity has no case; its geodesic is the empty word")]
    Identity,
    #[error("{0} is outside the fundamental domain x, z >= 0, |y| <= x")]
    OutsideDomain(HeisPoint),
    #[error("expected a word over {expected}, got one over {found}")]
    WrongAlphabet {
        expected: &'static str,
        found: &'static str,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
}

pub type Result<T, E = OracleError> = std::result::Result<T, E>;

fn overflow(op: &'static str) -> OracleError {
    OracleError::Group(GroupError::Overflow(op))
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    // Newton from above; strictly decreasing until it hits floor(sqrt(n)).
    let mut x = n;
    let mut y = x.div_ceil(2);
    while y < x {
        x = y;
        y = (x + n / x) / 2;
    }
    x
}

/// Largest `s` with `s * s <= n`.
pub fn isqrt(n: i64) -> Result<i64> {
    if n < 0 {
        return Err(OracleError::NegativeSqrt(n));
    }
    Ok(isqrt_u128(n as u128) as i64)
}

/// Smallest `s` with `s * s >= n`.
pub fn ceil_sqrt(n: i64) -> Result<i64> {
    match n {
        n if n < 0 => Err(OracleError::NegativeSqrt(n)),
        0 => Ok(0),
        n => Ok(isqrt(n - 1)? + 1),
    }
}

/// Length-preserving symmetries of the Cayley graph of `(H, X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Symmetry {
    /// Reverse the word and swap `a` with `b`: `(x, y, z) -> (y, x, z)`.
    Tau,
    /// Negate every `a` exponent: `(x, y, z) -> (-x, y, -z)`.
    PhiA,
    /// Negate every `b` exponent: `(x, y, z) -> (x, -y, -z)`.
    PhiB,
}

impl Symmetry {
    pub fn apply_point(self, p: &HeisPoint) -> Result<HeisPoint> {
        let n = |v: i64| v.checked_neg().ok_or(overflow("symmetry"));
        Ok(match self {
            Symmetry::Tau => HeisPoint::new(p.y, p.x, p.z),
            Symmetry::PhiA => HeisPoint::new(n(p.x)?, p.y, n(p.z)?),
            Symmetry::PhiB => HeisPoint::new(p.x, n(p.y)?, n(p.z)?),
        })
    }

    /// Word-level action; `eval(apply_word(w)) = apply_point(eval(w))`.
    pub fn apply_word(self, w: &Word) -> Result<Word> {
        if w.alphabet() != Alphabet::X {
            return Err(OracleError::WrongAlphabet {
                expected: "X",
                found: w.alphabet().name(),
            });
        }
        let neg = |e: i64| e.checked_neg().ok_or(overflow("symmetry"));
        let mut out = Word::empty(Alphabet::X);
        match self {
            Symmetry::Tau => {
                for b in w.blocks().iter().rev() {
                    let base = if b.base == Base::A { Base::B } else { Base::A };
                    out.push_block(base, b.exp)?;
                }
            }
            Symmetry::PhiA | Symmetry::PhiB => {
                let flipped = if self == Symmetry::PhiA {
                    Base::A
                } else {
                    Base::B
                };
                for b in w.blocks() {
                    let exp = if b.base == flipped {
                        neg(b.exp)?
                    } else {
                        b.exp
                    };
                    out.push_block(b.base, exp)?;
                }
            }
        }
        Ok(out)
    }
}

/// Symmetries applied, in order, to move a point into the fundamental domain.
/// At most one of each, in the order `Tau, PhiA, PhiB`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReductionTrace(Vec<Symmetry>);

impl ReductionTrace {
    pub fn steps(&self) -> &[Symmetry] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Maps a word for the reduced point back to a word for the original.
    /// Every symmetry is an involution, so this undoes the trace in reverse.
    pub fn pull_back(&self, w: &Word) -> Result<Word> {
        let mut out = w.clone();
        for s in self.0.iter().rev() {
            out = s.apply_word(&out)?;
        }
        Ok(out)
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("[]");
        }
        let names: Vec<_> = self.0.iter().map(|s| format!("{s:?}")).collect();
        write!(f, "[{}]", names.join(", "))
    }
}

pub fn in_fundamental_domain(p: &HeisPoint) -> bool {
    p.x >= 0 && p.z >= 0 && -p.x <= p.y && p.y <= p.x
}

/// Tau iff `|y| > |x|`, then PhiA iff `x < 0`, then PhiB iff `z < 0`.
pub fn reduce_to_fundamental(p: &HeisPoint) -> Result<(HeisPoint, ReductionTrace)> {
    let mut q = *p;
    let mut trace = Vec::with_capacity(3);
    if q.y.unsigned_abs() > q.x.unsigned_abs() {
        q = Symmetry::Tau.apply_point(&q)?;
        trace.push(Symmetry::Tau);
    }
    if q.x < 0 {
        q = Symmetry::PhiA.apply_point(&q)?;
        trace.push(Symmetry::PhiA);
    }
    if q.z < 0 {
        q = Symmetry::PhiB.apply_point(&q)?;
        trace.push(Symmetry::PhiB);
    }
    debug_assert!(in_fundamental_domain(&q));
    Ok((q, ReductionTrace(trace)))
}

/// Which of the three near-square shapes `S_z` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SzShape {
    /// `z = (n+1)^2`: `a^(n+1) b^(n+1)`.
    Square { n: i64 },
    /// `z = n^2 + k`, `1 <= k <= n`: `a^k b a^(n-k) b^n`.
    Lower { n: i64, k: i64 },
    /// `z = n^2 + n + k`, `1 <= k <= n`: `a^k b a^(n+1-k) b^n`.
    Upper { n: i64, k: i64 },
}

pub fn s_z_shape(z: i64) -> Result<SzShape> {
    if z <= 0 {
        return Err(OracleError::NonPositiveZ(z));
    }
    let s = isqrt(z)?;
    if s * s == z {
        return Ok(SzShape::Square { n: s - 1 });
    }
    let n = s;
    let k = z - n * n;
    Ok(if k <= n {
        SzShape::Lower { n, k }
    } else {
        SzShape::Upper { n, k: k - n }
    })
}

/// The near-square word `S_z`; its evaluation has third coordinate `z`.
pub fn s_z_word(z: i64) -> Result<Word> {
    Ok(s_z_from_shape(s_z_shape(z)?)?)
}

fn s_z_from_shape(shape: SzShape) -> Result<Word, GroupError> {
    use Base::{A, B};
    match shape {
        SzShape::Square { n } => Word::from_blocks(Alphabet::X, [(A, n + 1), (B, n + 1)]),
        SzShape::Lower { n, k } => {
            Word::from_blocks(Alphabet::X, [(A, k), (B, 1), (A, n - k), (B, n)])
        }
        SzShape::Upper { n, k } => {
            Word::from_blocks(Alphabet::X, [(A, k), (B, 1), (A, n + 1 - k), (B, n)])
        }
    }
}

/// Case of the length formula for a nontrivial point of the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// `y >= 0`, `x^2 < z`.
    I1 { shape: SzShape },
    /// `y >= 0`, `x^2 >= z`, `xy >= z`; `z = ux + v`.
    I21 { u: i64, v: i64 },
    /// `y >= 0`, `x^2 >= z`, `xy < z`.
    I22 { u: i64, v: i64 },
    /// `y < 0`, `x^2 <= z - xy = n^2 + k`, `1 <= k <= n`.
    II1a { n: i64, k: i64 },
    /// `y < 0`, `x^2 <= z - xy = (n+1)^2 - k`, `0 <= k <= n`.
    II1b { n: i64, k: i64 },
    /// `y < 0`, `x^2 > z - xy`.
    II2 { u: i64, v: i64 },
}

impl CaseTag {
    pub fn label(&self) -> &'static str {
        match self {
            CaseTag::I1 { .. } => "I.1",
            CaseTag::I21 { .. } => "I.2.1",
            CaseTag::I22 { .. } => "I.2.2",
            CaseTag::II1a { .. } => "II.1a",
            CaseTag::II1b { .. } => "II.1b",
            CaseTag::II2 { .. } => "II.2",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::I1 { shape } => write!(f, "I.1 {shape:?}"),
            CaseTag::I21 { u, v } | CaseTag::I22 { u, v } | CaseTag::II2 { u, v } => {
                write!(f, "{} (u={u}, v={v})", self.label())
            }
            CaseTag::II1a { n, k } | CaseTag::II1b { n, k } => {
                write!(f, "{} (n={n}, k={k})", self.label())
            }
        }
    }
}

struct Checked;

impl Checked {
    fn mul(a: i64, b: i64) -> Result<i64> {
        a.checked_mul(b).ok_or(overflow("oracle"))
    }
    fn add(a: i64, b: i64) -> Result<i64> {
        a.checked_add(b).ok_or(overflow("oracle"))
    }
    fn sub(a: i64, b: i64) -> Result<i64> {
        a.checked_sub(b).ok_or(overflow("oracle"))
    }
}

pub fn classify_case(p: &HeisPoint) -> Result<CaseTag> {
    if !in_fundamental_domain(p) {
        return Err(OracleError::OutsideDomain(*p));
    }
    if p.is_identity() {
        return Err(OracleError::Identity);
    }
    let HeisPoint { x, y, z } = *p;
    let xx = Checked::mul(x, x)?;
    let xy = Checked::mul(x, y)?;
    if y >= 0 {
        if xx < z {
            return Ok(CaseTag::I1 {
                shape: s_z_shape(z)?,
            });
        }
        // x >= 1 here: x = 0 forces y = 0 and then z = 0.
        let (u, v) = (z / x, z % x);
        return Ok(if xy >= z {
            CaseTag::I21 { u, v }
        } else {
            CaseTag::I22 { u, v }
        });
    }
    let m = Checked::sub(z, xy)?;
    if xx <= m {
        let n = ceil_sqrt(m)? - 1;
        let nn = Checked::mul(n, n)?;
        if m <= Checked::add(nn, n)? {
            Ok(CaseTag::II1a { n, k: m - nn })
        } else {
            Ok(CaseTag::II1b {
                n,
                k: Checked::mul(n + 1, n + 1)? - m,
            })
        }
    } else {
        Ok(CaseTag::II2 { u: z / x, v: z % x })
    }
}

/// The case witness for a nontrivial point of the fundamental domain.
pub fn case_witness(p: &HeisPoint, case: &CaseTag) -> Result<Word> {
    use Base::{A, B};
    let HeisPoint { x, y, z: _ } = *p;
    let s = Checked::sub;
    let w = match *case {
        CaseTag::I1 { shape } => {
            let sz = s_z_from_shape(shape)?;
            let top = sz.eval_heis()?;
            let mut w = Word::from_blocks(Alphabet::X, [(B, s(y, top.y)?)])?;
            w.extend_word(&sz)?;
            w.push_block(A, s(x, top.x)?)?;
            w
        }
        CaseTag::I21 { u, v } | CaseTag::I22 { u, v } | CaseTag::II2 { u, v } => Word::from_blocks(
            Alphabet::X,
            [(B, s(s(y, u)?, 1)?), (A, v), (B, 1), (A, s(x, v)?), (B, u)],
        )?,
        CaseTag::II1a { n, k } => Word::from_blocks(
            Alphabet::X,
            [
                (A, s(x, n)?),
                (B, -n - 1),
                (A, k),
                (B, 1),
                (A, n - k),
                (B, Checked::add(n, y)?),
            ],
        )?,
        CaseTag::II1b { n, k } => Word::from_blocks(
            Alphabet::X,
            [
                (A, s(x, n)?),
                (B, -k),
                (A, -1),
                (B, k - n - 1),
                (A, n + 1),
                (B, Checked::add(n + 1, y)?),
            ],
        )?,
    };
    Ok(w)
}

/// A geodesic together with how it was obtained.
#[derive(Debug, Clone, Serialize)]
pub struct Geodesic {
    pub point: HeisPoint,
    pub reduced: HeisPoint,
    pub trace: ReductionTrace,
    /// `None` only for the identity.
    pub case: Option<CaseTag>,
    pub word: Word,
}

impl Geodesic {
    pub fn length(&self) -> u64 {
        self.word.len()
    }
}

pub fn solve(p: &HeisPoint) -> Result<Geodesic> {
    let (reduced, trace) = reduce_to_fundamental(p)?;
    if reduced.is_identity() {
        return Ok(Geodesic {
            point: *p,
            reduced,
            trace,
            case: None,
            word: Word::empty(Alphabet::X),
        });
    }
    let case = classify_case(&reduced)?;
    let local = case_witness(&reduced, &case)?;
    let word = trace.pull_back(&local)?;
    Ok(Geodesic {
        point: *p,
        reduced,
        trace,
        case: Some(case),
        word,
    })
}

/// A geodesic word for `p` with at most six maximal blocks.
pub fn heis_geodesic(p: &HeisPoint) -> Result<Word> {
    Ok(solve(p)?.word)
}

/// Word length of `p` over `X`, computed as the length of the witness.
pub fn heis_length(p: &HeisPoint) -> Result<u64> {
    Ok(solve(p)?.length())
}

/// How to read the case I.1 length expression `2 * r(2 sqrt z) - x - y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SqrtReading {
    Floor,
    Ceiling,
}

/// The printed closed-form length expressions, evaluated literally.
/// Only case I.1 depends on `reading`.
pub fn formula_length(p: &HeisPoint, reading: SqrtReading) -> Result<i64> {
    let (q, _) = reduce_to_fundamental(p)?;
    if q.is_identity() {
        return Ok(0);
    }
    let HeisPoint { x, y, z } = q;
    let ceil_div = |n: i64, d: i64| (n + d - 1) / d;
    Ok(match classify_case(&q)? {
        CaseTag::I1 { .. } => {
            let four_z = Checked::mul(4, z)?;
            let r = match reading {
                SqrtReading::Floor => isqrt(four_z)?,
                SqrtReading::Ceiling => ceil_sqrt(four_z)?,
            };
            2 * r - x - y
        }
        CaseTag::I21 { .. } => x + y,
        CaseTag::I22 { .. } | CaseTag::II2 { .. } => 2 * ceil_div(z, x) + x - y,
        CaseTag::II1a { .. } | CaseTag::II1b { .. } => {
            let m = Checked::sub(z, Checked::mul(x, y)?)?;
            2 * ceil_sqrt(Checked::mul(4, m)?)? - x + y
        }
    })
}

/// Replaces `t`-heavy stretches of a word over `S` by shorter equivalent
/// ones until at most seven `t` letters remain.
///
/// The leftmost prefix `a^n1 t a^m1 t ... a^n4 t a^m4 t` containing eight
/// `t`s evaluates to the Heisenberg element of
/// `a^n1 b^m1 ... a^n4 b^m4` (since `t a^k t = b^k`). Its geodesic over `X`
/// has at most three `b` blocks, so mapping `b^k` back to `t a^k t` gives a
/// word with at most six `t`s that is at least two letters shorter.
pub fn shorten_t_heavy(w: &Word) -> Result<Word> {
    if w.alphabet() != Alphabet::S {
        return Err(OracleError::WrongAlphabet {
            expected: "S",
            found: w.alphabet().name(),
        });
    }
    let mut cur = w.clone();
    while cur.t_count() >= 8 {
        let next = shorten_leftmost(&cur)?;
        debug_assert!(next.len() < cur.len());
        cur = next;
    }
    Ok(cur)
}

fn shorten_leftmost(w: &Word) -> Result<Word> {
    let mut a_runs = Vec::with_capacity(8);
    let mut pending_a = 0i64;
    let mut rest = Word::empty(Alphabet::S);
    for b in w.blocks() {
        if a_runs.len() == 8 {
            rest.push_block(b.base, b.exp)?;
            continue;
        }
        match b.base {
            Base::A => pending_a = b.exp,
            _ => {
                let mut left = b.exp;
                while left > 0 && a_runs.len() < 8 {
                    a_runs.push(pending_a);
                    pending_a = 0;
                    left -= 1;
                }
                rest.push_block(Base::T, left)?;
            }
        }
    }
    debug_assert_eq!(a_runs.len(), 8);

    let inner = Word::from_blocks(
        Alphabet::X,
        a_runs
            .iter()
            .enumerate()
            .map(|(i, &e)| (if i % 2 == 0 { Base::A } else { Base::B }, e)),
    )?;
    let geodesic = heis_geodesic(&inner.eval_heis()?)?;

    let mut out = Word::empty(Alphabet::S);
    for b in geodesic.blocks() {
        match b.base {
            Base::A => out.push_block(Base::A, b.exp)?,
            _ => {
                out.push_block(Base::T, 1)?;
                out.push_block(Base::A, b.exp)?;
                out.push_block(Base::T, 1)?;
            }
        }
    }
    out.extend_word(&rest)?;
    Ok(out)
}
