//! Breadth-first exploration of Cayley balls.
//!
//! A [`BallIndex`] stores every element at distance at most `radius` from the
//! identity, level by level, with its exact distance, the number of geodesic
//! words reaching it, and the letters of its incoming geodesic edges. Levels
//! are built synchronously: the frontier may be expanded on several threads,
//! but candidates are sorted before they are committed, so the index is the
//! same for any thread count.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::{GroupError, HeisPoint, VHPoint};
use crate::oracle::{self, CaseTag, ReductionTrace};
use crate::word::{Alphabet, Letter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    Heis,
    Vh,
}

impl GroupTag {
    pub fn alphabet(self) -> Alphabet {
        match self {
            GroupTag::Heis => Alphabet::X,
            GroupTag::Vh => Alphabet::S,
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupTag::Heis => "heis",
            GroupTag::Vh => "vh",
        })
    }
}

/// A group with a fixed finite generating set, as seen by the explorer.
pub trait CayleyGroup: Sync {
    type Elem: Copy + Eq + Hash + Ord + Send + Sync + fmt::Debug + fmt::Display + Serialize;

    const TAG: GroupTag;

    fn identity() -> Self::Elem;

    /// `g * letter`.
    fn step(g: &Self::Elem, letter: Letter) -> Result<Self::Elem, GroupError>;

    /// `t` flag for elements of the extension; `false` otherwise.
    fn t_flag(_g: &Self::Elem) -> bool {
        false
    }

    fn generators() -> &'static [Letter] {
        Self::TAG.alphabet().letters()
    }
}

/// `(H, {a, a^-1, b, b^-1})`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Heis;

/// `(vH, {a, a^-1, t})`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Vh;

impl CayleyGroup for Heis {
    type Elem = HeisPoint;
    const TAG: GroupTag = GroupTag::Heis;

    fn identity() -> HeisPoint {
        HeisPoint::IDENTITY
    }

    fn step(g: &HeisPoint, letter: Letter) -> Result<HeisPoint, GroupError> {
        let s = letter.heis().ok_or(GroupError::MixedAlphabet {
            letter: 't',
            alphabet: "X",
        })?;
        g.checked_mul(&s)
    }
}

impl CayleyGroup for Vh {
    type Elem = VHPoint;
    const TAG: GroupTag = GroupTag::Vh;

    fn identity() -> VHPoint {
        VHPoint::IDENTITY
    }

    fn step(g: &VHPoint, letter: Letter) -> Result<VHPoint, GroupError> {
        let s = letter.vh().ok_or(GroupError::MixedAlphabet {
            letter: letter.symbol(),
            alphabet: "S",
        })?;
        g.checked_mul(&s)
    }

    fn t_flag(g: &VHPoint) -> bool {
        g.t
    }
}

#[derive(Debug, Error)]
pub enum ExploreError<E: fmt::Debug> {
    #[error(
        "memory budget of {budget} bytes exceeded while building radius {next}; \
         largest completed radius is {completed_radius}"
    )]
    Budget {
        budget: u64,
        completed_radius: usize,
        next: usize,
        /// Everything up to `completed_radius`.
        partial: Box<BallIndex<E>>,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("t-count analysis supports radius up to {max}, got {radius}")]
    RadiusTooLarge { radius: usize, max: usize },
    #[error("could not build thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy)]
pub struct BfsOptions {
    /// `0` uses rayon's default.
    pub threads: usize,
    pub memory_budget: u64,
}

impl Default for BfsOptions {
    fn default() -> Self {
        BfsOptions {
            threads: 0,
            memory_budget: 4 << 30,
        }
    }
}

/// Exact Cayley ball with distances, geodesic counts and geodesic edges.
#[derive(Debug, Clone)]
pub struct BallIndex<E> {
    tag: GroupTag,
    generators: &'static [Letter],
    radius: usize,
    elements: Vec<E>,
    counts: Vec<BigUint>,
    /// Bit `j` set: `elements[i] * generators[j]^-1` is a predecessor one
    /// level down, reached along the letter `generators[j]`.
    preds: Vec<u8>,
    /// `level_start[d]..level_start[d + 1]` is the sphere of radius `d`.
    level_start: Vec<usize>,
    index: HashMap<E, u32>,
}

impl<E: Copy + Eq + Hash> BallIndex<E> {
    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn generators(&self) -> &'static [Letter] {
        self.generators
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> E {
        self.elements[i]
    }

    pub fn index_of(&self, g: &E) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    pub fn distance_at(&self, i: usize) -> usize {
        self.level_start.partition_point(|&s| s <= i) - 1
    }

    pub fn distance(&self, g: &E) -> Option<usize> {
        self.index_of(g).map(|i| self.distance_at(i))
    }

    pub fn geodesic_count_at(&self, i: usize) -> &BigUint {
        &self.counts[i]
    }

    pub fn geodesic_count(&self, g: &E) -> Option<&BigUint> {
        self.index_of(g).map(|i| &self.counts[i])
    }

    /// Element indices of the sphere of radius `d`.
    pub fn level(&self, d: usize) -> std::ops::Range<usize> {
        self.level_start[d]..self.level_start[d + 1]
    }

    pub fn sphere_size(&self, d: usize) -> usize {
        self.level(d).len()
    }

    pub fn pred_mask(&self, i: usize) -> u8 {
        self.preds[i]
    }

    /// Incoming geodesic edges of element `i`: letters `l` such that
    /// `element(i) * l^-1` lies one level closer to the identity.
    pub fn pred_letters(&self, i: usize) -> impl Iterator<Item = Letter> + '_ {
        let mask = self.preds[i];
        self.generators
            .iter()
            .enumerate()
            .filter(move |(j, _)| mask & (1 << j) != 0)
            .map(|(_, &l)| l)
    }

    /// Approximate resident size of an index holding `n` elements.
    pub fn estimate_bytes(n: usize) -> u64 {
        let per = std::mem::size_of::<E>() * 2 // vec + map key
            + std::mem::size_of::<BigUint>()
            + 4 + 1 + 16; // map value, mask, map slack
        (n * per) as u64
    }
}

pub fn bfs_ball<G: CayleyGroup>(
    radius: usize,
    opts: BfsOptions,
) -> Result<BallIndex<G::Elem>, ExploreError<G::Elem>> {
    if opts.threads == 0 {
        return build_ball::<G>(radius, opts);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| ExploreError::ThreadPool(e.to_string()))?;
    pool.install(|| build_ball::<G>(radius, opts))
}

fn build_ball<G: CayleyGroup>(
    radius: usize,
    opts: BfsOptions,
) -> Result<BallIndex<G::Elem>, ExploreError<G::Elem>> {
    let gens = G::generators();
    let id = G::identity();
    let mut ball = BallIndex {
        tag: G::TAG,
        generators: gens,
        radius: 0,
        elements: vec![id],
        counts: vec![BigUint::one()],
        preds: vec![0],
        level_start: vec![0, 1],
        index: HashMap::from([(id, 0u32)]),
    };

    for d in 0..radius {
        let frontier = ball.level(d);
        let index = &ball.index;
        let elements = &ball.elements;
        // (neighbour, generator index, parent index) for every edge leaving
        // the frontier towards an unseen element.
        let mut cands: Vec<(G::Elem, u8, u32)> = frontier
            .into_par_iter()
            .map(|i| {
                let g = elements[i];
                let mut out = Vec::with_capacity(gens.len());
                for (j, &l) in gens.iter().enumerate() {
                    let h = G::step(&g, l)?;
                    if !index.contains_key(&h) {
                        out.push((h, j as u8, i as u32));
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, GroupError>>()?
            .into_iter()
            .flatten()
            .collect();
        cands.par_sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let fresh = cands.chunk_by(|a, b| a.0 == b.0).count();
        let projected = BallIndex::<G::Elem>::estimate_bytes(ball.len() + fresh);
        if projected > opts.memory_budget {
            return Err(ExploreError::Budget {
                budget: opts.memory_budget,
                completed_radius: d,
                next: d + 1,
                partial: Box::new(ball),
            });
        }

        ball.elements.reserve(fresh);
        for group in cands.chunk_by(|a, b| a.0 == b.0) {
            let h = group[0].0;
            let mut mask = 0u8;
            let mut count = BigUint::zero();
            for &(_, j, parent) in group {
                mask |= 1 << j;
                count += &ball.counts[parent as usize];
            }
            ball.index.insert(h, ball.elements.len() as u32);
            ball.elements.push(h);
            ball.counts.push(count);
            ball.preds.push(mask);
        }
        ball.level_start.push(ball.elements.len());
        ball.radius = d + 1;
    }
    Ok(ball)
}

/// What a growth sequence counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthKind {
    GeodesicWords,
    Elements,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthSequence {
    pub group: GroupTag,
    pub generators: String,
    pub kind: GrowthKind,
    pub cumulative: bool,
    pub values: Vec<BigUint>,
}

impl GrowthSequence {
    fn new(group: GroupTag, kind: GrowthKind, cumulative: bool, values: Vec<BigUint>) -> Self {
        let generators = match group {
            GroupTag::Heis => "{a, a^-1, b, b^-1}",
            GroupTag::Vh => "{a, a^-1, t}",
        };
        GrowthSequence {
            group,
            generators: generators.into(),
            kind,
            cumulative,
            values,
        }
    }
}

fn cumulate(mut v: Vec<BigUint>) -> Vec<BigUint> {
    for i in 1..v.len() {
        let prev = v[i - 1].clone();
        v[i] += prev;
    }
    v
}

fn sphere_words<E: Copy + Eq + Hash>(ball: &BallIndex<E>) -> Vec<BigUint> {
    (0..=ball.radius())
        .map(|d| ball.level(d).map(|i| &ball.counts[i]).sum())
        .collect()
}

/// `gamma(n)`: geodesic words of length at most `n`, the empty word included.
pub fn geodesic_growth<E: Copy + Eq + Hash>(ball: &BallIndex<E>) -> GrowthSequence {
    GrowthSequence::new(
        ball.tag(),
        GrowthKind::GeodesicWords,
        true,
        cumulate(sphere_words(ball)),
    )
}

/// Ball sizes `|B(n)|`.
pub fn element_growth<E: Copy + Eq + Hash>(ball: &BallIndex<E>) -> GrowthSequence {
    let spheres = (0..=ball.radius())
        .map(|d| BigUint::from(ball.sphere_size(d)))
        .collect();
    GrowthSequence::new(ball.tag(), GrowthKind::Elements, true, cumulate(spheres))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub sphere_geodesic_words: BigUint,
    pub gamma_cumulative: BigUint,
    pub sphere_elements: u64,
    pub ball_elements: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthTable {
    pub group: GroupTag,
    pub radius: usize,
    /// Set when the table stops short of the requested radius.
    pub truncated: bool,
    pub rows: Vec<GrowthRow>,
}

impl GrowthTable {
    pub const CSV_HEADER: &'static str =
        "n,sphere_geodesic_words,gamma_cumulative,sphere_elements,ball_elements";

    pub fn from_ball<E: Copy + Eq + Hash>(ball: &BallIndex<E>) -> Self {
        let spheres = sphere_words(ball);
        let mut gamma = BigUint::zero();
        let mut total = 0u64;
        let rows = spheres
            .into_iter()
            .enumerate()
            .map(|(n, s)| {
                gamma += &s;
                let se = ball.sphere_size(n) as u64;
                total += se;
                GrowthRow {
                    n,
                    sphere_geodesic_words: s,
                    gamma_cumulative: gamma.clone(),
                    sphere_elements: se,
                    ball_elements: total,
                }
            })
            .collect();
        GrowthTable {
            group: ball.tag(),
            radius: ball.radius(),
            truncated: false,
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.n,
                r.sphere_geodesic_words,
                r.gamma_cumulative,
                r.sphere_elements,
                r.ball_elements
            );
        }
        out
    }
}

/// Set of achievable `t`-counts, one bit per count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct TCountSet(u128);

impl TCountSet {
    pub const CAPACITY: usize = 128;

    pub fn singleton(c: usize) -> Self {
        TCountSet(1 << c)
    }

    pub fn contains(&self, c: usize) -> bool {
        c < Self::CAPACITY && self.0 & (1 << c) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn max(&self) -> Option<usize> {
        (self.0 != 0).then(|| 127 - self.0.leading_zeros() as usize)
    }

    pub fn members(&self) -> Vec<usize> {
        (0..Self::CAPACITY).filter(|&c| self.contains(c)).collect()
    }

    fn union(self, other: TCountSet) -> Self {
        TCountSet(self.0 | other.0)
    }

    fn shifted(self) -> Self {
        TCountSet(self.0 << 1)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TCountRecord {
    pub element: VHPoint,
    pub achievable: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TCountAnalysis {
    pub sets: Vec<TCountSet>,
    /// Largest number of `t`s on any geodesic in the ball.
    pub max: usize,
    /// An element attaining `max`.
    pub argmax: VHPoint,
}

impl TCountAnalysis {
    pub fn record(&self, ball: &BallIndex<VHPoint>, i: usize) -> TCountRecord {
        TCountRecord {
            element: ball.element(i),
            achievable: self.sets[i].members(),
        }
    }
}

/// Achievable `t`-counts on geodesics, by dynamic programming over the
/// geodesic DAG in breadth-first order.
pub fn t_count_analysis(
    ball: &BallIndex<VHPoint>,
) -> Result<TCountAnalysis, ExploreError<VHPoint>> {
    if ball.radius() >= TCountSet::CAPACITY {
        return Err(ExploreError::RadiusTooLarge {
            radius: ball.radius(),
            max: TCountSet::CAPACITY - 1,
        });
    }
    let mut sets = vec![TCountSet::default(); ball.len()];
    sets[0] = TCountSet::singleton(0);
    let (mut max, mut argmax) = (0, VHPoint::IDENTITY);
    for i in 1..ball.len() {
        let g = ball.element(i);
        let mut acc = TCountSet::default();
        for l in ball.pred_letters(i) {
            let p = Vh::step(&g, l.inverse())?;
            let parent = sets[ball.index_of(&p).expect("predecessor lies in the ball")];
            acc = acc.union(if l == Letter::T {
                parent.shifted()
            } else {
                parent
            });
        }
        let m = acc
            .max()
            .expect("every non-identity element has a predecessor");
        if m > max {
            (max, argmax) = (m, g);
        }
        sets[i] = acc;
    }
    Ok(TCountAnalysis { sets, max, argmax })
}

/// Geodesic growth by enumerating every word of length at most `n`.
///
/// Distances come from the enumeration itself (the shortest enumerated word
/// for each element), so this shares nothing with [`bfs_ball`].
pub fn brute_force_geodesics<G: CayleyGroup>(n: usize) -> Result<GrowthSequence, GroupError> {
    // element -> (shortest length seen, number of words of that length)
    let mut best: HashMap<G::Elem, (usize, u64)> = HashMap::new();
    fn walk<G: CayleyGroup>(
        g: G::Elem,
        len: usize,
        n: usize,
        best: &mut HashMap<G::Elem, (usize, u64)>,
    ) -> Result<(), GroupError> {
        let e = best.entry(g).or_insert((len, 0));
        if len < e.0 {
            *e = (len, 0);
        }
        if len == e.0 {
            e.1 += 1;
        }
        if len < n {
            for &l in G::generators() {
                walk::<G>(G::step(&g, l)?, len + 1, n, best)?;
            }
        }
        Ok(())
    }
    walk::<G>(G::identity(), 0, n, &mut best)?;
    let mut spheres = vec![0u64; n + 1];
    for &(len, count) in best.values() {
        spheres[len] += count;
    }
    let values = cumulate(spheres.into_iter().map(BigUint::from).collect());
    Ok(GrowthSequence::new(
        G::TAG,
        GrowthKind::GeodesicWords,
        true,
        values,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleMismatch {
    pub point: HeisPoint,
    pub bfs_distance: usize,
    pub oracle_length: Option<u64>,
    pub witness: Option<String>,
    pub case: Option<CaseTag>,
    pub trace: Option<ReductionTrace>,
    pub problem: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub radius: usize,
    pub checked: usize,
    pub mismatches: Vec<OracleMismatch>,
    /// Elements where the literal floor reading of the case I.1 expression
    /// disagrees with the breadth-first distance.
    pub floor_reading_disagreements: usize,
    /// Same for the ceiling reading.
    pub ceiling_reading_disagreements: usize,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks length, witness and block shape against the ball for every element.
pub fn verify_oracle_on(ball: &BallIndex<HeisPoint>) -> OracleReport {
    use oracle::SqrtReading;
    let mut mismatches = Vec::new();
    let (mut floor_bad, mut ceil_bad) = (0, 0);
    for (i, &p) in ball.elements().iter().enumerate() {
        let d = ball.distance_at(i);
        let mut fail = |problem: String, g: Option<&oracle::Geodesic>| {
            mismatches.push(OracleMismatch {
                point: p,
                bfs_distance: d,
                oracle_length: g.map(|g| g.length()),
                witness: g.map(|g| g.word.to_string()),
                case: g.and_then(|g| g.case),
                trace: g.map(|g| g.trace.clone()),
                problem,
            })
        };
        match oracle::solve(&p) {
            Err(e) => fail(e.to_string(), None),
            Ok(g) => {
                if g.length() != d as u64 {
                    fail(format!("length {} != distance {d}", g.length()), Some(&g));
                } else if g.word.eval_heis().ok() != Some(p) {
                    fail("witness evaluates elsewhere".into(), Some(&g));
                } else if g.word.block_count() > 6 {
                    fail(format!("{} blocks", g.word.block_count()), Some(&g));
                }
            }
        }
        if oracle::formula_length(&p, SqrtReading::Floor).ok() != Some(d as i64) {
            floor_bad += 1;
        }
        if oracle::formula_length(&p, SqrtReading::Ceiling).ok() != Some(d as i64) {
            ceil_bad += 1;
        }
    }
    OracleReport {
        radius: ball.radius(),
        checked: ball.len(),
        mismatches,
        floor_reading_disagreements: floor_bad,
        ceiling_reading_disagreements: ceil_bad,
    }
}

pub fn verify_oracle(
    radius: usize,
    opts: BfsOptions,
) -> Result<OracleReport, ExploreError<HeisPoint>> {
    Ok(verify_oracle_on(&bfs_ball::<Heis>(radius, opts)?))
}

/// Oracle queries cross-checked against a breadth-first ball; points outside
/// the ball are answered unchecked.
pub struct SelfCheckedOracle {
    ball: BallIndex<HeisPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckedAnswer {
    pub geodesic: oracle::Geodesic,
    /// `None` when the point lies outside the checking radius.
    pub bfs_distance: Option<usize>,
    pub agrees: Option<bool>,
}

impl SelfCheckedOracle {
    pub fn new(radius: usize, opts: BfsOptions) -> Result<Self, ExploreError<HeisPoint>> {
        Ok(SelfCheckedOracle {
            ball: bfs_ball::<Heis>(radius, opts)?,
        })
    }

    pub fn radius(&self) -> usize {
        self.ball.radius()
    }

    pub fn solve(&self, p: &HeisPoint) -> Result<CheckedAnswer, oracle::OracleError> {
        let geodesic = oracle::solve(p)?;
        let bfs_distance = self.ball.distance(p);
        let agrees = bfs_distance
            .map(|d| geodesic.length() == d as u64 && geodesic.word.eval_heis().ok() == Some(*p));
        Ok(CheckedAnswer {
            geodesic,
            bfs_distance,
            agrees,
        })
    }
}

/// Graphviz rendering of the ball of radius `radius` (at most the ball's).
/// Edges for `t` are undirected; `a` and `b` edges point from `g` to `g a`,
/// `g b`.
pub fn export_dot<G: CayleyGroup>(ball: &BallIndex<G::Elem>, radius: usize) -> String {
    let r = radius.min(ball.radius());
    let last = ball.level(r).end;
    let mut out = format!("digraph {} {{\n  node [shape=point];\n", G::TAG);
    for i in 0..last {
        let _ = writeln!(out, "  n{i} [label=\"{}\"];", ball.element(i));
    }
    let positive: Vec<Letter> = G::generators()
        .iter()
        .copied()
        .filter(|l| matches!(l, Letter::A | Letter::B | Letter::T))
        .collect();
    for i in 0..last {
        let g = ball.element(i);
        for &l in &positive {
            let Ok(h) = G::step(&g, l) else { continue };
            let Some(j) = ball.index_of(&h).filter(|&j| j < last) else {
                continue;
            };
            match l {
                Letter::T if i < j => {
                    let _ = writeln!(out, "  n{i} -> n{j} [label=t, dir=none];");
                }
                Letter::T => {}
                _ => {
                    let _ = writeln!(out, "  n{i} -> n{j} [label={}];", l.symbol());
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
