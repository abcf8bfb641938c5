//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::Rng;
use vheis::explorer::{
    bfs_ball, brute_force_geodesics, element_growth, geodesic_growth, t_count_analysis,
    verify_oracle_on, BfsOptions, Heis, Vh,
};
use vheis::oracle::{heis_geodesic, heis_length, shorten_t_heavy};
use vheis::series::{
    find_linear_recurrence, linear_recurrence_search, loglog_degree, p_recurrence_search,
    ratio_test, slope_trend, theorem_bound_prefix, to_bigints, DegreeEstimate,
};
use vheis::{Alphabet, Letter, Word};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ball_opts() -> BfsOptions {
    BfsOptions::default()
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let t = start.elapsed();
    if t <= limit {
        Ok(format!("{detail} in {:.2}s", t.as_secs_f64()))
    } else {
        Err(format!(
            "{detail} but took {:.2}s (limit {}s)",
            t.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

fn oracle_on_radius_twelve() -> Outcome {
    let start = Instant::now();
    let ball = bfs_ball::<Heis>(12, ball_opts()).map_err(|e| e.to_string())?;
    let report = verify_oracle_on(&ball);
    if !report.passed() {
        return Err(format!(
            "{} mismatches, first {:?}",
            report.mismatches.len(),
            report.mismatches.first()
        ));
    }
    for (i, p) in ball.elements().iter().enumerate() {
        let w = heis_geodesic(p).map_err(|e| e.to_string())?;
        let ok = w.eval_heis().ok() == Some(*p)
            && w.len() as usize == ball.distance_at(i)
            && w.block_count() <= 6;
        if !ok {
            return Err(format!(
                "witness {w} for {p} at distance {}",
                ball.distance_at(i)
            ));
        }
    }
    within(
        Duration::from_secs(60),
        start,
        format!("{} elements, 0 mismatches", ball.len()),
    )
}

fn random_witnesses() -> Outcome {
    let start = Instant::now();
    let mut r = common::rng(2024);
    for _ in 0..10_000 {
        let p = common::point(&mut r, 1_000, 1_000_000);
        let w = heis_geodesic(&p).map_err(|e| e.to_string())?;
        let l = heis_length(&p).map_err(|e| e.to_string())?;
        if w.eval_heis().ok() != Some(p) || w.len() != l {
            return Err(format!("bad witness {w} for {p}"));
        }
    }
    within(
        Duration::from_secs(10),
        start,
        "10000 witnesses exact".into(),
    )
}

fn t_count_bound() -> Outcome {
    let start = Instant::now();
    let ball = bfs_ball::<Vh>(12, ball_opts()).map_err(|e| e.to_string())?;
    let a = t_count_analysis(&ball).map_err(|e| e.to_string())?;
    if a.max > 7 {
        return Err(format!("max t-count {} at {}", a.max, a.argmax));
    }
    within(
        Duration::from_secs(120),
        start,
        format!(
            "max t-count {} at {} over {} elements",
            a.max,
            a.argmax,
            ball.len()
        ),
    )
}

fn growth_bound() -> Outcome {
    let ball = bfs_ball::<Vh>(20, ball_opts()).map_err(|e| e.to_string())?;
    let gamma = geodesic_growth(&ball).values;
    let bound = theorem_bound_prefix(20);
    for (n, (g, b)) in gamma.iter().zip(&bound).enumerate() {
        if g > b {
            return Err(format!("gamma({n}) = {g} exceeds {b}"));
        }
    }
    Ok(format!(
        "gamma(n) <= bound(n) for n = 0..20; gamma(20) = {}, bound(20) = {}",
        gamma[20], bound[20]
    ))
}

fn cross_oracle() -> Outcome {
    let vh = geodesic_growth(&bfs_ball::<Vh>(8, ball_opts()).map_err(|e| e.to_string())?).values;
    let vh_brute = brute_force_geodesics::<Vh>(8)
        .map_err(|e| e.to_string())?
        .values;
    let h = geodesic_growth(&bfs_ball::<Heis>(8, ball_opts()).map_err(|e| e.to_string())?).values;
    let h_brute = brute_force_geodesics::<Heis>(8)
        .map_err(|e| e.to_string())?
        .values;
    if vh != vh_brute {
        return Err(format!("vH: {vh:?} vs {vh_brute:?}"));
    }
    if h != h_brute {
        return Err(format!("H: {h:?} vs {h_brute:?}"));
    }
    let head: Vec<u64> = vh[..3].iter().map(|v| v.try_into().unwrap()).collect();
    if head != [1, 4, 10] {
        return Err(format!("gamma_S(0..2) = {head:?}"));
    }
    Ok(format!(
        "both groups agree on n = 0..8; gamma_S(0..2) = {head:?}"
    ))
}

fn heavy_word(r: &mut impl Rng) -> Word {
    let len = r.gen_range(8..=40);
    let ts = r.gen_range(8..=len);
    let mut letters: Vec<Letter> = (0..len)
        .map(|i| {
            if i < ts {
                Letter::T
            } else if r.gen() {
                Letter::A
            } else {
                Letter::AInv
            }
        })
        .collect();
    for i in (1..letters.len()).rev() {
        letters.swap(i, r.gen_range(0..=i));
    }
    Word::from_letters(Alphabet::S, letters).unwrap()
}

fn shortener() -> Outcome {
    let start = Instant::now();
    let mut r = common::rng(99);
    for _ in 0..1_000 {
        let w = heavy_word(&mut r);
        let s = shorten_t_heavy(&w).map_err(|e| e.to_string())?;
        let ok = w.t_count() >= 8
            && s.eval_vh().ok() == w.eval_vh().ok()
            && s.len() < w.len()
            && s.t_count() <= 7;
        if !ok {
            return Err(format!("{w} -> {s}"));
        }
    }
    within(
        Duration::from_secs(10),
        start,
        "1000 words shortened strictly to <= 7 t's".into(),
    )
}

fn usual_growth_degree() -> Outcome {
    let ball = bfs_ball::<Heis>(12, ball_opts()).map_err(|e| e.to_string())?;
    let sizes = to_bigints(&element_growth(&ball).values);
    match loglog_degree(&sizes, 6..13)
        .map_err(|e| e.to_string())?
        .estimate
    {
        DegreeEstimate::Slope(s) if (s - 4.0).abs() <= 0.5 => {
            Ok(format!("slope {s:.3} over radii 6..12"))
        }
        other => Err(format!("estimate {other:?} outside 4 +- 0.5")),
    }
}

fn geodesic_growth_degree() -> Outcome {
    let ball = bfs_ball::<Vh>(24, ball_opts()).map_err(|e| e.to_string())?;
    let gamma = to_bigints(&geodesic_growth(&ball).values);
    let slope = match loglog_degree(&gamma, 12..25)
        .map_err(|e| e.to_string())?
        .estimate
    {
        DegreeEstimate::Slope(s) => s,
        other => return Err(format!("estimate {other:?}")),
    };
    let trend = slope_trend(&gamma, 8, 0.1);
    let ratio = ratio_test(&gamma, 12..25).map_err(|e| e.to_string())?;
    let detail = format!(
        "slope {slope:.3} over radii 12..24, trend converged: {}, ratio test sub-exponential: {}",
        trend.converged,
        ratio.sub_exponential()
    );
    if slope.is_finite() && ratio.sub_exponential() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rationality_probes() -> Outcome {
    let ints = |v: Vec<i64>| v.into_iter().map(BigInt::from).collect::<Vec<_>>();
    let odd = ints((0..30).map(|n| 2 * n + 1).collect());
    let centered = ints((0..30).map(|n| 2 * n * n + 2 * n + 1).collect());
    let mut fib = vec![0i64, 1];
    for i in 2..40 {
        fib.push(fib[i - 1] + fib[i - 2]);
    }
    let fib = ints(fib);
    for (name, seq, order) in [
        ("2n+1", &odd, 2),
        ("2n^2+2n+1", &centered, 3),
        ("Fibonacci", &fib, 2),
    ] {
        match find_linear_recurrence(seq, 10) {
            Some(g) if g.order == order && g.holds_on(seq) => {}
            other => return Err(format!("{name}: {other:?}")),
        }
    }
    let ball = bfs_ball::<Vh>(24, ball_opts()).map_err(|e| e.to_string())?;
    let gamma = to_bigints(&geodesic_growth(&ball).values);
    let lin = linear_recurrence_search(&gamma, 16);
    let p = p_recurrence_search(&gamma, 16, 3);
    for g in [&lin.guess, &p.guess].into_iter().flatten() {
        if !g.holds_on(&gamma) {
            return Err(format!("unsound guess {g}"));
        }
    }
    let describe = |s: &vheis::series::RecurrenceSearch| match &s.guess {
        Some(g) => format!("found {g}"),
        None => format!(
            "none up to order {} (poly degree {}), fit {} of {}",
            s.searched_max_order, s.searched_max_poly_degree, s.fit_len, s.total_len
        ),
    };
    Ok(format!(
        "controls recovered; gamma_S linear: {}; P-recursive: {}",
        describe(&lin),
        describe(&p)
    ))
}

fn algebra() -> Outcome {
    let start = Instant::now();
    common::algebraic_suite(100_000, 1)?;
    within(
        Duration::from_secs(10),
        start,
        "100000 samples exact".into(),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "oracle equals BFS on the radius-12 ball of (H, X)",
            oracle_on_radius_twelve,
        ),
        (
            "random witnesses with |x|,|y| <= 10^3, |z| <= 10^6",
            random_witnesses,
        ),
        (
            "t-count of geodesics in the radius-12 ball of (vH, S) is at most 7",
            t_count_bound,
        ),
        (
            "geodesic growth of (vH, S) below the degree-8 bound",
            growth_bound,
        ),
        (
            "BFS growth equals brute-force enumeration on 0..8",
            cross_oracle,
        ),
        ("shortener on 1000 t-heavy words", shortener),
        (
            "ball growth of (H, X) has degree 4 +- 0.5",
            usual_growth_degree,
        ),
        (
            "geodesic growth slope of (vH, S) finite and sub-exponential",
            geodesic_growth_degree,
        ),
        (
            "recurrence guessing controls and soundness",
            rationality_probes,
        ),
        ("algebraic property suite", algebra),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2}  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2}  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
