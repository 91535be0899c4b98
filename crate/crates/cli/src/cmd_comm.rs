//! The promise disjointness problem: tuples, covers and thresholds.

use anyhow::{ensure, Context, Result};
use serde_json::json;

use seplab_core::comm::{
    a_bruteforce, check_cover, d_size_formula, gen_d, gen_i, lemma9_threshold, min_cover_bruteforce,
    thm4_lower_bound, CoverCheck, DisjPrimeInstance,
};
use seplab_core::Subset;

use crate::cli::{read_json, AArgs, CheckArgs, CommCommand, Ctx, GenArgs, InstanceArgs, Outcome, Which};
use crate::dto::{parse_gamma, subset_dto, CoverDto};
use crate::render::{csv, json, Format};

pub fn run(cmd: &CommCommand, ctx: &Ctx) -> Result<Outcome> {
    if ctx.format == Format::Dot {
        return Err(ctx.unsupported("comm"));
    }
    match cmd {
        CommCommand::Gen(a) => gen(a, ctx),
        CommCommand::Check(a) => check(a, ctx),
        CommCommand::Mincover(a) => mincover(a, ctx),
        CommCommand::Bound(a) => bound(a, ctx),
        CommCommand::A(a) => a_table(a, ctx),
    }
}

fn tuple_dto(t: &[Subset]) -> Vec<Vec<u32>> {
    t.iter().map(|&x| subset_dto(x)).collect()
}

fn tuple_cell(t: &[Subset]) -> String {
    t.iter()
        .map(|x| x.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(" | ")
}

fn gen(args: &GenArgs, ctx: &Ctx) -> Result<Outcome> {
    let (tuples, expected) = match args.which {
        Which::D => (gen_d(args.n, args.k, &ctx.caps)?, Some(d_size_formula(args.n, args.k))),
        Which::I => {
            let inst = DisjPrimeInstance::new(args.n, args.k, parse_gamma(&args.gamma)?)?;
            (gen_i(&inst, &ctx.caps)?, None)
        }
    };
    let pass = expected.is_none_or(|e| e == tuples.len() as u128);
    let out = match ctx.format {
        Format::Csv => csv(&["tuple"], &tuples.iter().map(|t| vec![tuple_cell(t)]).collect::<Vec<_>>())?,
        _ => json(&json!({
            "n": args.n,
            "k": args.k,
            "which": match args.which { Which::D => "D", Which::I => "I" },
            "count": tuples.len(),
            "formula": expected.map(|e| e.to_string()),
            "tuples": tuples.iter().map(|t| tuple_dto(t)).collect::<Vec<_>>(),
        }))?,
    };
    Ok(Outcome::verdict(pass, out))
}

fn check(args: &CheckArgs, ctx: &Ctx) -> Result<Outcome> {
    let cert = read_json::<CoverDto>(&args.cert)?.to_certificate()?;
    let verdict = check_cover(&cert, &ctx.caps)?;
    let (status, detail) = match &verdict {
        CoverCheck::Valid => ("valid", json!(null)),
        CoverCheck::Malformed(m) => ("malformed", json!(m)),
        CoverCheck::Uncovered(t) => ("uncovered", json!(tuple_dto(t))),
        CoverCheck::HitsI { index, tuple } => ("hits-i", json!({ "box": index, "tuple": tuple_dto(tuple) })),
    };
    let out = match ctx.format {
        Format::Csv => csv(&["status", "boxes"], &[[status.to_string(), cert.boxes.len().to_string()]])?,
        _ => json(&json!({ "status": status, "boxes": cert.boxes.len(), "detail": detail }))?,
    };
    Ok(Outcome::verdict(verdict.is_valid(), out))
}

fn instance(args: &InstanceArgs) -> Result<DisjPrimeInstance> {
    let n = u32::try_from(args.n).context("--n is too large for an explicit instance")?;
    let k = u32::try_from(args.k).context("--k is too large for an explicit instance")?;
    Ok(DisjPrimeInstance::new(n, k, parse_gamma(&args.gamma)?)?)
}

fn mincover(args: &InstanceArgs, ctx: &Ctx) -> Result<Outcome> {
    let inst = instance(args)?;
    let m = min_cover_bruteforce(&inst, &ctx.caps)?;
    let out = match ctx.format {
        Format::Csv => csv(&["n", "k", "gamma", "size"], &[[args.n.to_string(), args.k.to_string(), inst.gamma.to_string(), m.size.to_string()]])?,
        _ => json(&json!({ "size": m.size, "cover": CoverDto::from(&m.certificate) }))?,
    };
    Ok(Outcome::ok(out))
}

fn bound(args: &InstanceArgs, ctx: &Ctx) -> Result<Outcome> {
    let gamma = parse_gamma(&args.gamma)?;
    let value = thm4_lower_bound(args.n, args.k, gamma);
    let out = match ctx.format {
        Format::Csv => csv(
            &["n", "k", "gamma", "applicable", "bound"],
            &[[
                args.n.to_string(),
                args.k.to_string(),
                gamma.to_string(),
                value.is_some().to_string(),
                value.map_or(String::new(), |v| v.to_string()),
            ]],
        )?,
        _ => json(&json!({
            "n": args.n,
            "k": args.k,
            "gamma": gamma.to_string(),
            "applicable": value.is_some(),
            "bound": value,
        }))?,
    };
    Ok(Outcome::verdict(value.is_some(), out))
}

fn a_table(args: &AArgs, ctx: &Ctx) -> Result<Outcome> {
    let k_max = args.k_max.unwrap_or(args.k);
    ensure!(k_max >= args.k, "--k-max must be at least --k");
    let mut rows = Vec::new();
    let mut prev: Option<u64> = None;
    let mut pass = true;
    for k in args.k..=k_max {
        let value = a_bruteforce(args.n, args.a, args.t, k, &ctx.caps)?;
        // A^k <= A^(k+1) <= 2 A^k.
        let recursion = prev.is_none_or(|p| p <= value && value <= 2 * p);
        pass &= recursion;
        let threshold = lemma9_threshold(args.n, args.a, args.t, k)?;
        rows.push(json!({ "k": k, "value": value, "recursion": recursion, "threshold": threshold }));
        prev = Some(value);
    }
    let out = match ctx.format {
        Format::Csv => {
            let header = ["k", "value", "recursion", "threshold"];
            let cells: Vec<Vec<String>> = rows.iter().map(|r| header.iter().map(|h| r[*h].to_string()).collect()).collect();
            csv(&header, &cells)?
        }
        _ => json(&json!({ "n": args.n, "a": args.a, "t": args.t, "rows": rows, "recursion_holds": pass }))?,
    };
    Ok(Outcome::verdict(pass, out))
}
