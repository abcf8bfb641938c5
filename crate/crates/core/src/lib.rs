//! Exact arithmetic, word-metric geodesics and geodesic growth for the
//! discrete Heisenberg group `H = <a, b | [a,[a,b]] = [b,[a,b]] = 1>` and
//! its index-2 extension `vH = <a, b, t | ..., t^2 = 1, a^t = b>`.
//!
//! - [`group`]: element arithmetic in normal-form coordinates.
//! - [`word`]: words over `X = {a, a^-1, b, b^-1}` and `S = {a, a^-1, t}`.
//! - [`oracle`]: closed-form length and explicit geodesics in `(H, X)`, and
//!   the shortener bounding the number of `t`s in geodesics of `(vH, S)`.
//! - [`explorer`]: breadth-first Cayley balls, geodesic counts, growth and
//!   `t`-count analysis.
//! - [`series`]: degree estimates and exact recurrence guessing for growth
//!   sequences.
//! - [`cli`]: the `vheis` command-line front end.

pub mod cli;
pub mod explorer;
pub mod group;
pub mod oracle;
pub mod series;
pub mod word;

pub use group::{GroupError, HeisPoint, VHPoint};
pub use word::{Alphabet, Letter, Word};
