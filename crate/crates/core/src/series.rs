//! Analysis of integer growth sequences: the degree-8 upper bound on
//! geodesic growth in `(vH, S)`, polynomial degree estimates, and exact
//! recurrence guessing.
//!
//! Recurrence guesses are fitted on the first 60% of a sequence and kept
//! only if they reproduce the whole sequence. All fitting is over exact
//! rationals. Failing to find a recurrence is reported together with the
//! search bounds; it is evidence, not a proof of anything.

use std::fmt;
use std::ops::Range;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("window of {len} terms is too short (need at least {need})")]
    WindowTooShort { len: usize, need: usize },
    #[error("window {start}..{end} does not fit a sequence of {len} terms")]
    BadWindow {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("log-log fit needs positive terms at positive indices; term {index} is {value}")]
    NonPositive { index: usize, value: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = SeriesError> = std::result::Result<T, E>;

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `sum_{r=0}^{n} sum_{k=0}^{7} 2^(k+1) C(r, k)`, the upper bound on the
/// number of geodesics of length at most `n` in `(vH, S)`.
pub fn theorem_bound(n: u64) -> BigUint {
    let mut total = BigUint::zero();
    for r in 0..=n {
        for k in 0..=7u64 {
            total += binomial(r, k) << (k + 1);
        }
    }
    total
}

/// All values `theorem_bound(0..=n)` in one pass.
pub fn theorem_bound_prefix(n: u64) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut total = BigUint::zero();
    for r in 0..=n {
        for k in 0..=7u64 {
            total += binomial(r, k) << (k + 1);
        }
        out.push(total.clone());
    }
    out
}

pub fn to_bigints(v: &[BigUint]) -> Vec<BigInt> {
    v.iter().cloned().map(BigInt::from).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMethod {
    FiniteDifferences,
    LogLogSlope,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum DegreeEstimate {
    Exact(usize),
    NotPolynomialOnWindow,
    Slope(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub method: DegreeMethod,
    pub estimate: DegreeEstimate,
    pub window: (usize, usize),
}

/// Smallest `d` whose `(d+1)`-st forward differences vanish on the whole
/// sequence; a constant (or zero) sequence has degree 0.
pub fn difference_degree(seq: &[BigInt]) -> Result<DegreeReport> {
    if seq.len() < 2 {
        return Err(SeriesError::WindowTooShort {
            len: seq.len(),
            need: 2,
        });
    }
    let mut diffs: Vec<BigInt> = seq.to_vec();
    let mut estimate = DegreeEstimate::NotPolynomialOnWindow;
    for d in 0..seq.len() - 1 {
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
        if diffs.iter().all(Zero::is_zero) {
            estimate = DegreeEstimate::Exact(d);
            break;
        }
    }
    Ok(DegreeReport {
        method: DegreeMethod::FiniteDifferences,
        estimate,
        window: (0, seq.len()),
    })
}

fn ln_big(v: &BigInt) -> f64 {
    // to_f64 saturates only beyond ~1e308
    v.to_f64().map(f64::ln).unwrap_or(f64::INFINITY)
}

fn check_window(seq: &[BigInt], window: &Range<usize>, need: usize) -> Result<()> {
    if window.end > seq.len() || window.start > window.end {
        return Err(SeriesError::BadWindow {
            start: window.start,
            end: window.end,
            len: seq.len(),
        });
    }
    if window.len() < need {
        return Err(SeriesError::WindowTooShort {
            len: window.len(),
            need,
        });
    }
    for n in window.clone() {
        if n == 0 || !seq[n].is_positive() {
            return Err(SeriesError::NonPositive {
                index: n,
                value: seq[n].to_string(),
            });
        }
    }
    Ok(())
}

/// Least-squares slope of `ln a(n)` against `ln n` over `window`.
pub fn loglog_degree(seq: &[BigInt], window: Range<usize>) -> Result<DegreeReport> {
    check_window(seq, &window, 2)?;
    let pts: Vec<(f64, f64)> = window
        .clone()
        .map(|n| ((n as f64).ln(), ln_big(&seq[n])))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(DegreeReport {
        method: DegreeMethod::LogLogSlope,
        estimate: DegreeEstimate::Slope(sxy / sxx),
        window: (window.start, window.end),
    })
}

/// Local growth behaviour over a window, for telling polynomial growth from
/// exponential growth on short prefixes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub window: (usize, usize),
    /// `a(n) / a(n-1)` for each `n` in the window after its first index.
    pub ratios: Vec<f64>,
    /// `ln(a(n)/a(n-1)) / ln(n/(n-1))`: the log-log slope between
    /// neighbours. Tends to the degree for polynomial growth and grows
    /// linearly under exponential growth.
    pub local_exponents: Vec<f64>,
    pub ratios_decreasing: bool,
    /// Growth factor of the local exponent from the first pair to the last.
    /// Close to `end / start` under exponential growth, close to 1 under
    /// polynomial growth.
    pub exponent_growth: f64,
    /// `exponent_growth < sqrt(end / start)`.
    pub local_exponent_sublinear: bool,
}

impl RatioReport {
    pub fn sub_exponential(&self) -> bool {
        self.ratios_decreasing && self.local_exponent_sublinear
    }
}

pub fn ratio_test(seq: &[BigInt], window: Range<usize>) -> Result<RatioReport> {
    check_window(seq, &window, 3)?;
    let idx: Vec<usize> = window.clone().collect();
    let mut ratios = Vec::new();
    let mut local = Vec::new();
    for pair in idx.windows(2) {
        let (m, n) = (pair[0], pair[1]);
        let lr = ln_big(&seq[n]) - ln_big(&seq[m]);
        ratios.push(lr.exp());
        local.push(lr / ((n as f64).ln() - (m as f64).ln()));
    }
    let ratios_decreasing = ratios.windows(2).all(|w| w[1] <= w[0]);
    let exponent_growth = local[local.len() - 1] / local[0];
    let span = (window.end - 1) as f64 / window.start as f64;
    Ok(RatioReport {
        window: (window.start, window.end),
        ratios,
        local_exponents: local,
        ratios_decreasing,
        exponent_growth,
        local_exponent_sublinear: exponent_growth.is_finite() && exponent_growth < span.sqrt(),
    })
}

/// Successive log-log slopes over sliding windows ending at each index,
/// with a convergence flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeTrend {
    /// `(end, slope over [end/2, end])`.
    pub slopes: Vec<(usize, f64)>,
    /// The last three slopes lie within `tolerance` of each other.
    pub converged: bool,
    pub tolerance: f64,
}

pub fn slope_trend(seq: &[BigInt], min_end: usize, tolerance: f64) -> SlopeTrend {
    let mut slopes = Vec::new();
    for end in min_end.max(4)..=seq.len().saturating_sub(1) {
        if let Ok(r) = loglog_degree(seq, (end / 2).max(1)..end + 1) {
            if let DegreeEstimate::Slope(s) = r.estimate {
                slopes.push((end, s));
            }
        }
    }
    let converged = slopes.len() >= 3 && {
        let tail: Vec<f64> = slopes[slopes.len() - 3..].iter().map(|s| s.1).collect();
        let (lo, hi) = tail
            .iter()
            .fold((f64::MAX, f64::MIN), |(l, h), &s| (l.min(s), h.max(s)));
        hi - lo <= tolerance
    };
    SlopeTrend {
        slopes,
        converged,
        tolerance,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecurrenceKind {
    /// Constant coefficients.
    Linear,
    /// Polynomial coefficients in `n`.
    PRecursive,
}

fn ser_rat<S: Serializer>(v: &[Vec<BigRational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Vec<String>> = v
        .iter()
        .map(|p| p.iter().map(|c| c.to_string()).collect())
        .collect();
    strs.serialize(s)
}

/// A relation `sum_{i=0}^{order} P_i(n) a(n - i) = 0` holding for every
/// `n >= order` in the verified prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceGuess {
    pub kind: RecurrenceKind,
    pub order: usize,
    /// `coefficients[i][j]` is the coefficient of `n^j` in `P_i`.
    #[serde(serialize_with = "ser_rat")]
    pub coefficients: Vec<Vec<BigRational>>,
    pub fit_len: usize,
    pub verified_len: usize,
}

fn poly_at(p: &[BigRational], n: i64) -> BigRational {
    let x = BigRational::from_integer(BigInt::from(n));
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * &x + c)
}

impl RecurrenceGuess {
    /// Whether the relation holds on every applicable index of `seq`.
    pub fn holds_on(&self, seq: &[BigInt]) -> bool {
        (self.order..seq.len()).all(|n| self.residual(seq, n).is_zero())
    }

    fn residual(&self, seq: &[BigInt], n: usize) -> BigRational {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, p)| poly_at(p, n as i64) * BigRational::from_integer(seq[n - i].clone()))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// For linear recurrences, the `c_i` in `a(n) = sum c_i a(n - i)`.
    pub fn linear_coefficients(&self) -> Option<Vec<BigRational>> {
        if self.kind != RecurrenceKind::Linear {
            return None;
        }
        let lead = &self.coefficients[0][0];
        Some(
            self.coefficients[1..]
                .iter()
                .map(|p| -(&p[0] / lead))
                .collect(),
        )
    }
}

fn fmt_poly(p: &[BigRational]) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| match j {
            0 => c.to_string(),
            1 => format!("{c}*n"),
            _ => format!("{c}*n^{j}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

impl fmt::Display for RecurrenceGuess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(cs) = self.linear_coefficients() {
            let rhs: Vec<String> = cs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| format!("{c}*a(n-{})", i + 1))
                .collect();
            let rhs = if rhs.is_empty() {
                "0".to_string()
            } else {
                rhs.join(" + ")
            };
            return write!(f, "a(n) = {rhs}");
        }
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let shift = if i == 0 {
                    "a(n)".into()
                } else {
                    format!("a(n-{i})")
                };
                format!("({})*{shift}", fmt_poly(p))
            })
            .collect();
        write!(f, "{} = 0", terms.join(" + "))
    }
}

/// Outcome of a bounded recurrence search, including the bounds actually
/// searched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceSearch {
    pub guess: Option<RecurrenceGuess>,
    pub requested_max_order: usize,
    pub searched_max_order: usize,
    pub searched_max_poly_degree: usize,
    pub fit_len: usize,
    pub total_len: usize,
}

/// Number of leading terms used for fitting.
pub fn fit_len(total: usize) -> usize {
    total * 3 / 5
}

/// Minimal connection polynomial `1 + c_1 x + ... + c_L x^L` of `s` over the
/// rationals and its linear complexity `L`.
pub fn berlekamp_massey(s: &[BigRational]) -> (Vec<BigRational>, usize) {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last_disc = BigRational::one();
    for n in 0..s.len() {
        let mut d = s[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            d += &c[i] * &s[n - i];
        }
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let coef = &d / &last_disc;
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + shift] -= &coef * bi;
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            last_disc = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.resize(l + 1, BigRational::zero());
    (c, l)
}

pub fn linear_recurrence_search(seq: &[BigInt], max_order: usize) -> RecurrenceSearch {
    let fit = fit_len(seq.len());
    let searched = max_order.min(fit / 2);
    let mut report = RecurrenceSearch {
        guess: None,
        requested_max_order: max_order,
        searched_max_order: searched,
        searched_max_poly_degree: 0,
        fit_len: fit,
        total_len: seq.len(),
    };
    if fit == 0 {
        return report;
    }
    let prefix: Vec<BigRational> = seq[..fit]
        .iter()
        .cloned()
        .map(BigRational::from_integer)
        .collect();
    let (conn, l) = berlekamp_massey(&prefix);
    if l > searched {
        return report;
    }
    let guess = RecurrenceGuess {
        kind: RecurrenceKind::Linear,
        order: l,
        coefficients: conn.into_iter().map(|c| vec![c]).collect(),
        fit_len: fit,
        verified_len: seq.len(),
    };
    if guess.holds_on(seq) {
        report.guess = Some(guess);
    }
    report
}

/// Minimal-order constant-coefficient recurrence, fitted on a prefix and
/// verified on the whole sequence.
pub fn find_linear_recurrence(seq: &[BigInt], max_order: usize) -> Option<RecurrenceGuess> {
    linear_recurrence_search(seq, max_order).guess
}

/// Basis of the right kernel of `rows` (each of length `ncols`).
fn nullspace(mut rows: Vec<Vec<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); ncols];
            v[fc] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[i][fc].clone();
            }
            v
        })
        .collect()
}

/// Scales to coprime integers with the top coefficient of `P_0` positive.
fn normalize(coeffs: &mut [Vec<BigRational>]) {
    let mut lcm = BigInt::one();
    for c in coeffs.iter().flatten() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .flatten()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    if g.is_zero() {
        return;
    }
    let lead_sign = coeffs[0]
        .iter()
        .rev()
        .find(|c| !c.is_zero())
        .map(|c| c.is_negative());
    if lead_sign == Some(true) {
        g = -g;
    }
    let scale = BigRational::new(lcm, g);
    for c in coeffs.iter_mut().flatten() {
        *c = &*c * &scale;
    }
}

pub fn p_recurrence_search(
    seq: &[BigInt],
    max_order: usize,
    max_poly_degree: usize,
) -> RecurrenceSearch {
    let fit = fit_len(seq.len());
    let mut report = RecurrenceSearch {
        guess: None,
        requested_max_order: max_order,
        searched_max_order: 0,
        searched_max_poly_degree: 0,
        fit_len: fit,
        total_len: seq.len(),
    };
    for order in 1..=max_order {
        for deg in 0..=max_poly_degree {
            let unknowns = (order + 1) * (deg + 1);
            if fit < order + unknowns {
                continue;
            }
            report.searched_max_order = report.searched_max_order.max(order);
            report.searched_max_poly_degree = report.searched_max_poly_degree.max(deg);
            let rows: Vec<Vec<BigRational>> = (order..fit)
                .map(|n| {
                    let mut row = Vec::with_capacity(unknowns);
                    for i in 0..=order {
                        let a = BigRational::from_integer(seq[n - i].clone());
                        let mut pw = BigRational::one();
                        for _ in 0..=deg {
                            row.push(&a * &pw);
                            pw *= BigRational::from_integer(BigInt::from(n));
                        }
                    }
                    row
                })
                .collect();
            for v in nullspace(rows, unknowns) {
                let mut coefficients: Vec<Vec<BigRational>> =
                    v.chunks(deg + 1).map(|c| c.to_vec()).collect();
                if coefficients[0].iter().all(Zero::is_zero) {
                    continue;
                }
                normalize(&mut coefficients);
                let guess = RecurrenceGuess {
                    kind: RecurrenceKind::PRecursive,
                    order,
                    coefficients,
                    fit_len: fit,
                    verified_len: seq.len(),
                };
                if guess.holds_on(seq) {
                    report.guess = Some(guess);
                    return report;
                }
            }
        }
    }
    report
}

/// Lowest-order polynomial-coefficient recurrence (then lowest degree),
/// fitted on a prefix and verified on the whole sequence.
pub fn find_p_recurrence(
    seq: &[BigInt],
    max_order: usize,
    max_poly_degree: usize,
) -> Option<RecurrenceGuess> {
    p_recurrence_search(seq, max_order, max_poly_degree).guess
}

/// Reads a sequence from CSV text: a single column of values, `n,value`
/// pairs, or a table with a header naming `column`. Blank lines and lines
/// starting with `#` are skipped; a non-numeric first row is a header.
pub fn parse_sequence_csv(text: &str, column: Option<&str>) -> Result<Vec<BigInt>> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let mut col_idx: Option<usize> = None;
    let mut header: Option<Vec<String>> = None;
    if let Some(&(_, first)) = rows.peek() {
        let cells: Vec<&str> = first.split(',').map(str::trim).collect();
        if cells.iter().any(|c| c.parse::<BigInt>().is_err()) {
            header = Some(cells.iter().map(|s| s.to_string()).collect());
            rows.next();
        }
    }
    if let Some(h) = &header {
        let want = column.unwrap_or(if h.len() > 2 { "gamma_cumulative" } else { "" });
        if !want.is_empty() {
            col_idx = Some(h.iter().position(|c| c == want).ok_or(SeriesError::Parse {
                line: 1,
                msg: format!("no column named `{want}`"),
            })?);
        }
    } else if let Some(c) = column {
        return Err(SeriesError::Parse {
            line: 1,
            msg: format!("column `{c}` requested but no header"),
        });
    }
    let mut out = Vec::new();
    let mut first_index: Option<BigInt> = None;
    for (line, l) in rows {
        let cells: Vec<&str> = l.split(',').map(str::trim).collect();
        let parse = |s: &str| {
            s.parse::<BigInt>().map_err(|_| SeriesError::Parse {
                line,
                msg: format!("not an integer: `{s}`"),
            })
        };
        let value = match (col_idx, cells.len()) {
            (Some(i), _) => parse(cells.get(i).ok_or(SeriesError::Parse {
                line,
                msg: "missing column".into(),
            })?)?,
            (None, 1) => parse(cells[0])?,
            (None, 2) => {
                let n = parse(cells[0])?;
                let start = first_index.get_or_insert_with(|| n.clone()).clone();
                if n != start + BigInt::from(out.len()) {
                    return Err(SeriesError::Parse {
                        line,
                        msg: format!("index {n} out of sequence"),
                    });
                }
                parse(cells[1])?
            }
            (None, k) => {
                return Err(SeriesError::Parse {
                    line,
                    msg: format!("expected 1 or 2 columns, got {k}"),
                })
            }
        };
        out.push(value);
    }
    Ok(out)
}
