//! Shifting, compression, the border condition and the product bounds.

use anyhow::{ensure, Context, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use seplab_core::extremal::{
    are_t_far, chernoff_two_sided, compress_pair, fi_condition, ideals, is_left_compressed, kl_and_topsoe,
    max_border_product, max_product_bruteforce, mu_prob_exact, prob_bound_rhs_exact, shift_family, theorem3_bound,
    theorem3_bound_exact, SetFamily,
};
use seplab_core::sets::combinations;

use crate::cli::{read_json, CompressArgs, Ctx, ExtremalCommand, GridArgs, Outcome, PointArgs, ShiftArgs};
use crate::dto::FamilyDto;
use crate::par;
use crate::render::{csv, json, Format};

pub fn run(cmd: &ExtremalCommand, ctx: &Ctx) -> Result<Outcome> {
    if ctx.format == Format::Dot {
        return Err(ctx.unsupported("extremal"));
    }
    match cmd {
        ExtremalCommand::Shift(a) => shift(a, ctx),
        ExtremalCommand::Compress(a) => compress(a, ctx),
        ExtremalCommand::FiCheck(a) => fi_check(a, ctx),
        ExtremalCommand::Bound(a) => bound(a, ctx),
        ExtremalCommand::Maxprod(a) => maxprod(a, ctx),
        ExtremalCommand::Prob(a) => prob(a, ctx),
    }
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `(n, a, t)` with `t < a < n`, `n <= args.n`, `a <= args.a`.
fn grid(args: &GridArgs) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    let ns: Vec<u32> = if args.exact { vec![args.n] } else { (1..=args.n).collect() };
    for n in ns {
        let as_: Vec<u32> = if args.exact { vec![args.a] } else { (1..=args.a).collect() };
        for a in as_.into_iter().filter(|&a| a < n) {
            for t in (0..a).filter(|&t| args.t.is_none_or(|x| x == t)) {
                out.push((n, a, t));
            }
        }
    }
    out
}

#[derive(Serialize)]
struct Trial {
    trial: u64,
    a: u32,
    t: u32,
    i: u32,
    j: u32,
    f: usize,
    g: usize,
    sizes_kept: bool,
    far_kept: bool,
    compressed: bool,
    potential_decreasing: bool,
    compressed_far: bool,
}

impl Trial {
    fn ok(&self) -> bool {
        self.sizes_kept && self.far_kept && self.compressed && self.potential_decreasing && self.compressed_far
    }
}

/// One `(F, G, t, i < j)`: `F` random, `G` random among the members `t`-far from `F`.
fn trial(index: u64, seed: u64, n: u32, a_max: u32) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let a = rng.gen_range(1..=a_max.min(n - 1));
    let t = rng.gen_range(0..a);
    let i = rng.gen_range(1..n);
    let j = rng.gen_range(i + 1..=n);
    let pool = combinations(n, a);
    let f = SetFamily::new(n, a, pool.iter().copied().filter(|_| rng.gen_bool(0.5)))?;
    let far: Vec<_> = pool.iter().copied().filter(|&y| f.iter().all(|x| x.intersection(y).len() <= t as usize)).collect();
    let g = SetFamily::new(n, a, far.into_iter().filter(|_| rng.gen_bool(0.5)))?;
    let (sf, sg) = (shift_family(&f, i, j), shift_family(&g, j, i));
    let c = compress_pair(&f, &g);
    Ok(Trial {
        trial: index,
        a,
        t,
        i,
        j,
        f: f.len(),
        g: g.len(),
        sizes_kept: sf.len() == f.len() && sg.len() == g.len() && c.f.len() == f.len() && c.g.len() == g.len(),
        far_kept: are_t_far(&sf, &sg, t),
        compressed: is_left_compressed(&c.f),
        potential_decreasing: c.potentials.windows(2).all(|w| w[1] < w[0]),
        compressed_far: are_t_far(&c.f, &c.g, t),
    })
}

fn shift(args: &ShiftArgs, ctx: &Ctx) -> Result<Outcome> {
    if let Some(path) = &args.family {
        let f = read_json::<FamilyDto>(path)?.to_family()?;
        let (i, j) = (args.i.context("--i is required")?, args.j.context("--j is required")?);
        ensure!((1..=f.n()).contains(&i) && (1..=f.n()).contains(&j), "i and j must lie in 1..={}", f.n());
        let s = FamilyDto::from(&shift_family(&f, i, j));
        return Ok(Outcome::ok(match ctx.format {
            Format::Csv => csv(&["member"], &s.members.iter().map(|m| vec![set_cell(m)]).collect::<Vec<_>>())?,
            _ => json(&s)?,
        }));
    }
    ensure!(args.n >= 2 && args.n <= 64, "--n must lie in 2..=64");
    ensure!(args.a >= 1, "--a must be positive");
    let trials = args.trials.context("shift needs --family or --trials")?;
    let pool = seplab_core::sets::binomial(args.n as u64, args.a.min(args.n - 1) as u64);
    ensure!(
        pool <= ctx.caps.family_members as u128,
        "cap exceeded: C({}, a) = {pool} members, family_members cap is {}",
        args.n,
        ctx.caps.family_members
    );
    let rows: Vec<Trial> = par::map_indices(trials, ctx.jobs, |k| trial(k, ctx.seed, args.n, args.a))
        .into_iter()
        .collect::<Result<_>>()?;
    let bad: Vec<&Trial> = rows.iter().filter(|r| !r.ok()).collect();
    let out = match ctx.format {
        Format::Csv => {
            let header = [
                "trial", "a", "t", "i", "j", "f", "g", "sizes_kept", "far_kept", "compressed", "potential_decreasing",
                "compressed_far",
            ];
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let v = serde_json::to_value(r).expect("plain struct");
                    header.iter().map(|h| v[*h].to_string()).collect()
                })
                .collect();
            csv(&header, &cells)?
        }
        _ => json(&json!({
            "seed": ctx.seed,
            "n": args.n,
            "max_a": args.a,
            "trials": trials,
            "violations": bad.len(),
            "failing": bad,
        }))?,
    };
    Ok(Outcome::verdict(bad.is_empty(), out))
}

fn set_cell(m: &[u32]) -> String {
    m.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn compress(args: &CompressArgs, ctx: &Ctx) -> Result<Outcome> {
    let f = read_json::<FamilyDto>(&args.f)?.to_family()?;
    let g = read_json::<FamilyDto>(&args.g)?.to_family()?;
    ensure!(f.n() == g.n(), "the families live on different ground sets");
    let c = compress_pair(&f, &g);
    Ok(Outcome::ok(match ctx.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = c
                .steps
                .iter()
                .zip(&c.potentials)
                .map(|(&(i, j), p)| vec![i.to_string(), j.to_string(), p.to_string()])
                .collect();
            csv(&["i", "j", "potential_before"], &rows)?
        }
        _ => json(&json!({
            "f": FamilyDto::from(&c.f),
            "g": FamilyDto::from(&c.g),
            "steps": c.steps,
            "potentials": c.potentials,
        }))?,
    }))
}

#[derive(Serialize)]
struct FiRow {
    n: u32,
    a: u32,
    t: u32,
    ideals: usize,
    pairs: u64,
    violations: u64,
}

fn fi_point(n: u32, a: u32, t: u32, ctx: &Ctx) -> Result<FiRow> {
    let fs = ideals(n, a, &ctx.caps)?;
    let pool = combinations(n, a);
    let mut violations = 0;
    for f in &fs {
        for &y in &pool {
            let g = SetFamily::new(n, a, [y])?;
            if fi_condition(f, &g, t)? != are_t_far(f, &g, t) {
                violations += 1;
            }
        }
    }
    Ok(FiRow { n, a, t, ideals: fs.len(), pairs: (fs.len() * pool.len()) as u64, violations })
}

fn fi_check(args: &GridArgs, ctx: &Ctx) -> Result<Outcome> {
    let points = grid(args);
    let rows: Vec<FiRow> = par::map_indices(points.len() as u64, ctx.jobs, |i| {
        let (n, a, t) = points[i as usize];
        fi_point(n, a, t, ctx)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let violations: u64 = rows.iter().map(|r| r.violations).sum();
    let out = match ctx.format {
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| [r.n as u64, r.a as u64, r.t as u64, r.ideals as u64, r.pairs, r.violations].map(|x| x.to_string()).to_vec())
                .collect();
            csv(&["n", "a", "t", "ideals", "pairs", "violations"], &cells)?
        }
        _ => json(&json!({ "rows": rows, "violations": violations }))?,
    };
    Ok(Outcome::verdict(violations == 0, out))
}

fn bound(args: &PointArgs, ctx: &Ctx) -> Result<Outcome> {
    let value = theorem3_bound(args.n, args.a, args.t)?;
    let (lo, hi) = theorem3_bound_exact(args.n, args.a, args.t)?;
    Ok(Outcome::ok(match ctx.format {
        Format::Csv => csv(
            &["n", "a", "t", "bound", "lo", "hi"],
            &[[args.n.to_string(), args.a.to_string(), args.t.to_string(), value.to_string(), to_f64(&lo).to_string(), to_f64(&hi).to_string()]],
        )?,
        _ => json(&json!({
            "n": args.n,
            "a": args.a,
            "t": args.t,
            "bound": value,
            "lo": to_f64(&lo),
            "hi": to_f64(&hi),
        }))?,
    }))
}

#[derive(Serialize)]
struct MaxRow {
    n: u32,
    a: u32,
    t: u32,
    max_product: u128,
    border_product: u128,
    bound: f64,
    bound_lo: f64,
    within: bool,
}

fn maxprod(args: &GridArgs, ctx: &Ctx) -> Result<Outcome> {
    let points = grid(args);
    let rows: Vec<MaxRow> = par::map_indices(points.len() as u64, ctx.jobs, |i| -> Result<MaxRow> {
        let (n, a, t) = points[i as usize];
        let brute = max_product_bruteforce(n, a, t, &ctx.caps)?;
        let border = max_border_product(n, a, t, &ctx.caps)?.0;
        let (lo, _) = theorem3_bound_exact(n, a, t)?;
        let within = BigRational::from_integer(BigInt::from(brute.value)) <= lo;
        Ok(MaxRow {
            n,
            a,
            t,
            max_product: brute.value,
            border_product: border,
            bound: theorem3_bound(n, a, t)?,
            bound_lo: to_f64(&lo),
            within,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let violations = rows.iter().filter(|r| !r.within || r.max_product != r.border_product).count();
    let out = match ctx.format {
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.a.to_string(),
                        r.t.to_string(),
                        r.max_product.to_string(),
                        r.border_product.to_string(),
                        r.bound.to_string(),
                        r.bound_lo.to_string(),
                        r.within.to_string(),
                    ]
                })
                .collect();
            csv(&["n", "a", "t", "max_product", "border_product", "bound", "bound_lo", "within"], &cells)?
        }
        _ => json(&json!({ "rows": rows, "violations": violations }))?,
    };
    Ok(Outcome::verdict(violations == 0, out))
}

#[derive(Serialize)]
struct ProbRow {
    n: u32,
    a: u32,
    t: u32,
    ideals: usize,
    max_product: f64,
    rhs: f64,
    violations: usize,
}

/// For each ideal `F`, the largest `G` meeting the border condition; any
/// other compatible `G` is a subfamily and has smaller measure.
fn prob_point(n: u32, a: u32, t: u32, ctx: &Ctx) -> Result<ProbRow> {
    let p = rational(a as i64, n as i64);
    let (rhs, _) = prob_bound_rhs_exact(n, a, t)?;
    let pool = combinations(n, a);
    let fs = ideals(n, a, &ctx.caps)?;
    let mut best = BigRational::from_integer(0.into());
    let mut violations = 0;
    for f in &fs {
        let mut members = Vec::new();
        for &y in &pool {
            if fi_condition(f, &SetFamily::new(n, a, [y])?, t)? {
                members.push(y);
            }
        }
        let g = SetFamily::new(n, a, members)?;
        let v = mu_prob_exact(f, &p) * mu_prob_exact(&g, &p);
        if v > rhs {
            violations += 1;
        }
        if v > best {
            best = v;
        }
    }
    Ok(ProbRow { n, a, t, ideals: fs.len(), max_product: to_f64(&best), rhs: to_f64(&rhs), violations })
}

fn prob(args: &GridArgs, ctx: &Ctx) -> Result<Outcome> {
    let points: Vec<_> = grid(args);
    let rows: Vec<ProbRow> = par::map_indices(points.len() as u64, ctx.jobs, |i| {
        let (n, a, t) = points[i as usize];
        prob_point(n, a, t, ctx)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let product_violations: usize = rows.iter().map(|r| r.violations).sum();

    // l <= 20, p in {0.1, ..., 0.9}, eps in {0, 0.05, ..., 0.5}.
    let cells: Vec<(u32, i64, i64)> =
        (1..=20).flat_map(|l| (1..=9).flat_map(move |p| (0..=10).map(move |e| (l, p, e)))).collect();
    let chernoff: Vec<Option<(u32, i64, i64)>> = par::map_indices(cells.len() as u64, ctx.jobs, |i| {
        let (l, p, e) = cells[i as usize];
        match chernoff_two_sided(l, &rational(p, 10), &rational(e, 20)) {
            Ok(c) if c.holds() => Ok(None),
            Ok(_) => Ok(Some((l, p, e))),
            Err(err) => Err(err),
        }
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let chernoff_bad: Vec<_> = chernoff.into_iter().flatten().collect();

    let mut topsoe_bad = Vec::new();
    // x in {0, 0.01, ..., 0.99}, y in {0.005, 0.015, ..., 0.995}.
    for i in 0..100u32 {
        for j in 0..100u32 {
            let (kl, rhs) = kl_and_topsoe(i as f64 / 100.0, (2 * j + 1) as f64 / 200.0)?;
            if kl + 1e-12 < rhs {
                topsoe_bad.push((i, j));
            }
        }
    }
    let pass = product_violations == 0 && chernoff_bad.is_empty() && topsoe_bad.is_empty();
    let out = match ctx.format {
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.a.to_string(),
                        r.t.to_string(),
                        r.ideals.to_string(),
                        r.max_product.to_string(),
                        r.rhs.to_string(),
                        r.violations.to_string(),
                    ]
                })
                .collect();
            csv(&["n", "a", "t", "ideals", "max_product", "rhs", "violations"], &cells)?
        }
        _ => json(&json!({
            "product": { "rows": rows, "violations": product_violations },
            "chernoff": { "cells": cells.len(), "violations": chernoff_bad },
            "topsoe": { "cells": 100 * 100, "violations": topsoe_bad },
            "pass": pass,
        }))?,
    };
    Ok(Outcome::verdict(pass, out))
}
