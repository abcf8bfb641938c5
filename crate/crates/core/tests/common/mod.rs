#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use vheis::group::{from_matrix, matrix_mul, to_matrix};
use vheis::oracle::heis_length;
use vheis::word::Base;
use vheis::{Alphabet, HeisPoint, Letter, VHPoint, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn point(rng: &mut impl Rng, xy: i64, z: i64) -> HeisPoint {
    HeisPoint::new(
        rng.gen_range(-xy..=xy),
        rng.gen_range(-xy..=xy),
        rng.gen_range(-z..=z),
    )
}

pub fn vh_point(rng: &mut impl Rng, xy: i64, z: i64) -> VHPoint {
    VHPoint::new(point(rng, xy, z), rng.gen())
}

/// Random word over `alphabet` with at most `max_len` letters, built letter by letter.
pub fn letters(rng: &mut impl Rng, alphabet: Alphabet, max_len: usize) -> Vec<Letter> {
    let gens = alphabet.letters();
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| gens[rng.gen_range(0..gens.len())]).collect()
}

/// Left-to-right product of letters, by 3x3 integer matrices.
pub fn matrix_eval(ls: &[Letter]) -> HeisPoint {
    let mut m = to_matrix(&HeisPoint::IDENTITY);
    for l in ls {
        let g = match l {
            Letter::A => [[1, 1, 0], [0, 1, 0], [0, 0, 1]],
            Letter::AInv => [[1, -1, 0], [0, 1, 0], [0, 0, 1]],
            Letter::B => [[1, 0, 0], [0, 1, 1], [0, 0, 1]],
            Letter::BInv => [[1, 0, 0], [0, 1, -1], [0, 0, 1]],
            Letter::T => panic!("t has no matrix"),
        };
        m = matrix_mul(&m, &g).unwrap();
    }
    from_matrix(&m).unwrap()
}

pub fn vh_fold(ls: &[Letter]) -> VHPoint {
    ls.iter().fold(VHPoint::IDENTITY, |g, l| {
        g.checked_mul(&l.vh().unwrap()).unwrap()
    })
}

pub fn heis_fold(ls: &[Letter]) -> HeisPoint {
    ls.iter().fold(HeisPoint::IDENTITY, |g, l| {
        g.checked_mul(&l.heis().unwrap()).unwrap()
    })
}

fn parse(alphabet: Alphabet, s: &str) -> Word {
    Word::parse(alphabet, s).unwrap()
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

/// Group axioms, presentation relations, the swap automorphism, agreement
/// with unitriangular matrices, and symmetry/inverse invariance of length,
/// each on `samples` random inputs.
pub fn algebraic_suite(samples: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);

    // [a,[a,b]] and [b,[a,b]]; over S, b is spelled t a t.
    let x_text = ["a a b A B A b a B A", "b a b A B B b a B A"];
    let x_relators = x_text.map(|s| parse(Alphabet::X, s));
    let s_text = x_text.map(|s| s.replace('b', "t a t").replace('B', "t A t"));
    let s_relators = [
        parse(Alphabet::S, "t t"),
        parse(Alphabet::S, &s_text[0]),
        parse(Alphabet::S, &s_text[1]),
    ];
    let b_in_s = parse(Alphabet::S, "t a t")
        .eval_vh()
        .map_err(|e| e.to_string())?;
    ensure(b_in_s == VHPoint::new(HeisPoint::B, false), || {
        "t a t != b".into()
    })?;

    for i in 0..samples {
        let (p, q, s) = (
            point(&mut r, 10_000, 1_000_000),
            point(&mut r, 10_000, 1_000_000),
            point(&mut r, 10_000, 1_000_000),
        );
        let pq = p.checked_mul(&q).unwrap();
        let left = pq.checked_mul(&s).unwrap();
        let right = p.checked_mul(&q.checked_mul(&s).unwrap()).unwrap();
        ensure(left == right, || {
            format!("H associativity fails at {p} {q} {s}")
        })?;
        ensure(p.checked_mul(&HeisPoint::IDENTITY).unwrap() == p, || {
            format!("right identity {p}")
        })?;
        ensure(HeisPoint::IDENTITY.checked_mul(&p).unwrap() == p, || {
            format!("left identity {p}")
        })?;
        let pi = p.inverse().unwrap();
        ensure(p.checked_mul(&pi).unwrap().is_identity(), || {
            format!("inverse {p}")
        })?;
        ensure(pi.checked_mul(&p).unwrap().is_identity(), || {
            format!("left inverse {p}")
        })?;

        let mp = matrix_mul(&to_matrix(&p), &to_matrix(&q)).unwrap();
        ensure(from_matrix(&mp) == Some(pq), || {
            format!("matrix product {p} {q}")
        })?;
        ensure(from_matrix(&to_matrix(&p)) == Some(p), || {
            format!("matrix round trip {p}")
        })?;

        let sp = p.sigma().unwrap();
        ensure(sp.sigma().unwrap() == p, || {
            format!("sigma is not an involution at {p}")
        })?;
        ensure(
            pq.sigma().unwrap() == sp.checked_mul(&q.sigma().unwrap()).unwrap(),
            || format!("sigma is not multiplicative at {p} {q}"),
        )?;
        let t = VHPoint::T;
        let conj = t
            .checked_mul(&VHPoint::new(p, false))
            .unwrap()
            .checked_mul(&t)
            .unwrap();
        ensure(conj == VHPoint::new(sp, false), || {
            format!("t conjugation != sigma at {p}")
        })?;

        let (g, h, k) = (
            vh_point(&mut r, 10_000, 1_000_000),
            vh_point(&mut r, 10_000, 1_000_000),
            vh_point(&mut r, 10_000, 1_000_000),
        );
        let l = g.checked_mul(&h).unwrap().checked_mul(&k).unwrap();
        let rr = g.checked_mul(&h.checked_mul(&k).unwrap()).unwrap();
        ensure(l == rr, || format!("vH associativity fails at {g} {h} {k}"))?;
        ensure(
            g.checked_mul(&g.inverse().unwrap()).unwrap().is_identity(),
            || format!("vH inverse {g}"),
        )?;

        let u = letters(&mut r, Alphabet::X, 12);
        let v = letters(&mut r, Alphabet::X, 12);
        let wu = Word::from_letters(Alphabet::X, u.iter().copied()).unwrap();
        let wv = Word::from_letters(Alphabet::X, v.iter().copied()).unwrap();
        let joint: Vec<Letter> = u.iter().chain(&v).copied().collect();
        let e = wu.concat(&wv).unwrap().eval_heis().unwrap();
        ensure(e == matrix_eval(&joint), || {
            format!("word evaluation disagrees with matrices on {wu} {wv}")
        })?;
        ensure(
            e == wu
                .eval_heis()
                .unwrap()
                .checked_mul(&wv.eval_heis().unwrap())
                .unwrap(),
            || format!("evaluation is not a homomorphism on {wu} {wv}"),
        )?;

        let rel = &x_relators[i % x_relators.len()];
        let conj = wu
            .concat(rel)
            .unwrap()
            .concat(&wu.reverse_inverse())
            .unwrap();
        ensure(conj.eval_heis().unwrap().is_identity(), || {
            format!("relator {rel} fails under {wu}")
        })?;

        let su = letters(&mut r, Alphabet::S, 12);
        let ws = Word::from_letters(Alphabet::S, su.iter().copied()).unwrap();
        ensure(ws.eval_vh().unwrap() == vh_fold(&su), || {
            format!("S-word evaluation on {ws}")
        })?;
        let rel = &s_relators[i % s_relators.len()];
        let g = vh_fold(&su);
        let c = g
            .checked_mul(&rel.eval_vh().unwrap())
            .unwrap()
            .checked_mul(&g.inverse().unwrap())
            .unwrap();
        ensure(c.is_identity(), || {
            format!("relator {rel} fails under {ws}")
        })?;

        let small = point(&mut r, 1_000, 1_000_000);
        let len = heis_length(&small).unwrap();
        let HeisPoint { x, y, z } = small;
        for image in [
            HeisPoint::new(y, x, z),
            HeisPoint::new(-x, y, -z),
            HeisPoint::new(x, -y, -z),
            small.inverse().unwrap(),
        ] {
            ensure(heis_length(&image).unwrap() == len, || {
                format!("length of {small} differs at {image}")
            })?;
        }
    }
    Ok(())
}

pub trait ReverseInverse {
    fn reverse_inverse(&self) -> Word;
}

impl ReverseInverse for Word {
    fn reverse_inverse(&self) -> Word {
        let blocks: Vec<(Base, i64)> = self
            .blocks()
            .iter()
            .rev()
            .map(|b| (b.base, if b.base == Base::T { b.exp } else { -b.exp }))
            .collect();
        Word::from_blocks(self.alphabet(), blocks).unwrap()
    }
}
