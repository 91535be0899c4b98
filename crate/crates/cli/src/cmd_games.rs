//! Graphs, automata, solvers, fooling words and the parameter arithmetic.

use anyhow::{ensure, Context, Result};
use serde::Serialize;
use serde_json::json;

use seplab_core::automaton::{automaton_spaces, counter_separator, delta_star, make_absorbing, AutomatonSpace};
use seplab_core::fooling::{
    check_fooling_certificate, derive_params, length_lemma_holds, replay_communication_bound, search_fooling_pair,
    structured_search, upper_time, ProofReplay,
};
use seplab_core::game::{classify_graph, enumerate_game_graphs, is_walk};
use seplab_core::separation::{
    confirm_counterexample, derive_time_bound, refute_small_separator, solve_parity_direct,
    solve_parity_via_separator, verification_len, verify_range, verify_unrestricted, Counterexample, Mode,
    ParityArena, Player, Verdict,
};
use seplab_core::{Error, GameGraph, GraphParity, SafetyAutomaton};

use crate::cli::{
    read_json, BoundsArgs, ClassifyArgs, Ctx, FoolArgs, Outcome, ParamsArgs, RefuteArgs, SolveArgs, Via, VerifyArgs,
};
use crate::dto::{
    player_name, word_dto, ArenaDto, AutomatonDto, CounterexampleDto, FoolingCertificateDto, FoolingDto,
    FoolingPairDto, GraphDto,
};
use crate::par;
use crate::render::{automaton_dot, csv, graph_dot, json, word_cell, Format};

fn parity_name(p: GraphParity) -> &'static str {
    match p {
        GraphParity::Even => "even",
        GraphParity::Odd => "odd",
        GraphParity::Neither => "neither",
    }
}

fn load_automaton(path: &std::path::Path) -> Result<SafetyAutomaton> {
    read_json::<AutomatonDto>(path)?.to_automaton()
}

fn u64_len(len: u128, what: &str) -> Result<u64> {
    u64::try_from(len).with_context(|| format!("{what} has more than 2^64 members"))
}

pub fn classify(args: &ClassifyArgs, ctx: &Ctx) -> Result<Outcome> {
    if let Some(path) = &args.graph {
        let g = read_json::<GraphDto>(path)?.to_graph()?;
        let parity = parity_name(classify_graph(&g));
        return Ok(Outcome::ok(match ctx.format {
            Format::Json => json(&json!({ "n": g.n(), "d": g.d(), "parity": parity }))?,
            Format::Csv => csv(&["parity"], &[vec![parity.to_string()]])?,
            Format::Dot => graph_dot(&g),
        }));
    }
    let n = args.n.context("classify needs --graph or --n")?;
    let graphs = enumerate_game_graphs(n, args.d, &ctx.caps)?;
    let classes = par::map_indices(graphs.len(), ctx.jobs, |i| classify_graph(&graphs.get(i).expect("in range")));
    let count = |p| classes.iter().filter(|&&c| c == p).count();
    Ok(Outcome::ok(match ctx.format {
        Format::Json => json(&json!({
            "n": n,
            "d": args.d,
            "graphs": classes.len(),
            "even": count(GraphParity::Even),
            "odd": count(GraphParity::Odd),
            "neither": count(GraphParity::Neither),
        }))?,
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                classes.iter().enumerate().map(|(i, &c)| vec![i.to_string(), parity_name(c).to_string()]).collect();
            csv(&["index", "parity"], &rows)?
        }
        Format::Dot => return Err(ctx.unsupported("classify --n")),
    }))
}

/// The violation of least graph index, found in parallel.
fn first_violation(
    a: &SafetyAutomaton,
    n: usize,
    d: u32,
    mode: Mode,
    initial: Option<u32>,
    ctx: &Ctx,
) -> Result<Option<(u64, Counterexample)>> {
    let len = verification_len(n, d, &ctx.caps)?;
    Ok(par::try_find_first(len, ctx.jobs, |r| verify_range(a, n, d, mode, initial, r, &ctx.caps))?)
}

#[derive(Serialize)]
struct VerifyReport {
    verdict: &'static str,
    n: usize,
    d: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    time: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<u32>,
    graphs: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph_index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<CounterexampleDto>,
}

pub fn verify(args: &VerifyArgs, ctx: &Ctx) -> Result<Outcome> {
    let a = load_automaton(&args.automaton)?;
    let mode = args.time.map_or(Mode::Unrestricted, Mode::Time);
    let hit = first_violation(&a, args.n, args.d, mode, args.initial, ctx)?;
    let report = VerifyReport {
        verdict: if hit.is_some() { "counterexample" } else { "ok" },
        n: args.n,
        d: args.d,
        time: args.time,
        initial: args.initial,
        graphs: verification_len(args.n, args.d, &ctx.caps)?,
        graph_index: hit.as_ref().map(|h| h.0),
        counterexample: hit.as_ref().map(|h| (&h.1).into()),
    };
    let out = match ctx.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let c = report.counterexample.as_ref();
            let row = vec![
                report.verdict.to_string(),
                report.graph_index.map_or(String::new(), |i| i.to_string()),
                c.map_or(String::new(), |c| c.reason.clone()),
                c.map_or(String::new(), |c| word_cell(&c.word)),
                c.and_then(|c| c.loop_start).map_or(String::new(), |s| s.to_string()),
            ];
            csv(&["verdict", "graph_index", "reason", "word", "loop_start"], &[row])?
        }
        Format::Dot => {
            let mut s = automaton_dot(&a);
            if let Some((_, c)) = &hit {
                s.push_str(&graph_dot(&c.graph));
            }
            s
        }
    };
    Ok(Outcome::verdict(hit.is_none(), out))
}

#[derive(Serialize)]
struct RefuteRow {
    index: usize,
    states: u32,
    accept: u32,
    reason: String,
    word: Vec<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    loop_start: Option<usize>,
    confirmed: bool,
    verify_fails: bool,
    automaton: AutomatonDto,
}

impl RefuteRow {
    fn ok(&self) -> bool {
        self.confirmed && self.verify_fails
    }

    fn csv(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            self.states.to_string(),
            self.accept.to_string(),
            self.reason.clone(),
            word_cell(&self.word),
            self.loop_start.map_or(String::new(), |s| s.to_string()),
            self.confirmed.to_string(),
            self.verify_fails.to_string(),
        ]
    }
}

const REFUTE_HEADER: [&str; 8] = ["index", "states", "accept", "reason", "word", "loop_start", "confirmed", "verify_fails"];

fn refute_one(a: &SafetyAutomaton, n: u32, index: usize, caps: &seplab_core::Caps) -> Result<(RefuteRow, Counterexample)> {
    let c = refute_small_separator(a, n)?;
    let confirmed = confirm_counterexample(a, n as usize, 2, &c, None);
    let verify_fails = matches!(verify_unrestricted(a, n as usize, 2, caps)?, Verdict::Counterexample(_));
    let row = RefuteRow {
        index,
        states: a.states(),
        accept: a.accept(),
        reason: c.reason.as_str().to_string(),
        word: word_dto(&c.word),
        loop_start: c.loop_start,
        confirmed,
        verify_fails,
        automaton: a.into(),
    };
    Ok((row, c))
}

/// Every canonical automaton of every space, in enumeration order.
fn canonical_automata(spaces: &[AutomatonSpace], ctx: &Ctx) -> Result<Vec<SafetyAutomaton>> {
    let mut out = Vec::new();
    for s in spaces {
        let len = u64_len(s.raw_len(), "the automaton space")?;
        out.extend(par::map_indices(len, ctx.jobs, |i| s.canonical(i as u128)).into_iter().flatten());
    }
    Ok(out)
}

pub fn refute(args: &RefuteArgs, ctx: &Ctx) -> Result<Outcome> {
    if let Some(path) = &args.automaton {
        let a = load_automaton(path)?;
        let (row, c) = refute_one(&a, args.n, 0, &ctx.caps)?;
        let out = match ctx.format {
            Format::Json => json(&json!({
                "confirmed": row.confirmed,
                "verify_fails": row.verify_fails,
                "counterexample": CounterexampleDto::from(&c),
            }))?,
            Format::Csv => csv(&REFUTE_HEADER, &[row.csv()])?,
            Format::Dot => graph_dot(&c.graph),
        };
        return Ok(Outcome::verdict(row.ok(), out));
    }
    let spaces = automaton_spaces(args.n, 2, args.states, &ctx.caps)?;
    let automata = canonical_automata(&spaces, ctx)?;
    let rows: Vec<RefuteRow> = par::map_indices(automata.len() as u64, ctx.jobs, |i| {
        refute_one(&automata[i as usize], args.n, i as usize, &ctx.caps).map(|(r, _)| r)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let all = rows.iter().all(RefuteRow::ok);
    let out = match ctx.format {
        Format::Json => json(&json!({
            "n": args.n,
            "max_states": args.states,
            "automata": rows.len(),
            "refuted": rows.iter().filter(|r| r.ok()).count(),
            "rows": rows,
        }))?,
        Format::Csv => csv(&REFUTE_HEADER, &rows.iter().map(RefuteRow::csv).collect::<Vec<_>>())?,
        Format::Dot => return Err(ctx.unsupported("refute --all")),
    };
    Ok(Outcome::verdict(all, out))
}

fn arena_dto(arena: &ParityArena) -> ArenaDto {
    let g = GraphDto::from(&arena.graph);
    ArenaDto {
        n: g.n,
        d: g.d,
        edges: g.edges,
        owner: arena.owner.iter().map(|&p| if p == Player::Even { 0 } else { 1 }).collect(),
        initial: arena.initial,
    }
}

#[derive(Default)]
struct SweepPart {
    even: u64,
    odd: u64,
    disagreements: u64,
    first: Option<(u64, ArenaDto)>,
}

/// Arena `i` at size `m`: graph `i / (2^m m)`, then owner bits, then initial node.
fn sweep_size(m: usize, ctx: &Ctx) -> Result<SweepPart> {
    let graphs = enumerate_game_graphs(m, 2, &ctx.caps)?;
    let a = counter_separator(m as u32)?;
    if let Verdict::Counterexample(c) = verify_unrestricted(&a, m, 2, &ctx.caps)? {
        return Err(Error::NotSeparating(c.into()).into());
    }
    let per_graph = (1u64 << m) * m as u64;
    let total = graphs.len().checked_mul(per_graph).context("too many arenas")?;
    let parts = par::map_chunks(total, ctx.jobs, |r| -> Result<SweepPart> {
        let mut part = SweepPart::default();
        let mut current: Option<(u64, GameGraph)> = None;
        for i in r {
            let gi = i / per_graph;
            if current.as_ref().is_none_or(|c| c.0 != gi) {
                current = Some((gi, graphs.get(gi).expect("in range")));
            }
            let g = &current.as_ref().expect("just set").1;
            let rest = i % per_graph;
            let bits = rest / m as u64;
            let owner = (0..m).map(|b| if bits >> b & 1 == 1 { Player::Odd } else { Player::Even }).collect();
            let arena = ParityArena::new(g.clone(), owner, (rest % m as u64) as u32 + 1)?;
            let direct = solve_parity_direct(&arena, &ctx.caps)?.winner;
            let via = solve_parity_via_separator(&arena, &a, true, &ctx.caps)?;
            match direct {
                Player::Even => part.even += 1,
                Player::Odd => part.odd += 1,
            }
            if direct != via {
                part.disagreements += 1;
                if part.first.is_none() {
                    part.first = Some((i, arena_dto(&arena)));
                }
            }
        }
        Ok(part)
    });
    let mut sum = SweepPart::default();
    for p in parts {
        let p = p?;
        sum.even += p.even;
        sum.odd += p.odd;
        sum.disagreements += p.disagreements;
        if sum.first.is_none() {
            sum.first = p.first;
        }
    }
    Ok(sum)
}

pub fn solve(args: &SolveArgs, ctx: &Ctx) -> Result<Outcome> {
    if args.sweep {
        ensure!(args.n >= 1, "--n must be at least 1");
        let mut rows = Vec::new();
        let mut first = None;
        for m in 1..=args.n {
            let part = sweep_size(m, ctx)?;
            if first.is_none() {
                first = part.first.map(|f| f.1);
            }
            rows.push(json!({
                "n": m,
                "arenas": part.even + part.odd,
                "even_wins": part.even,
                "odd_wins": part.odd,
                "disagreements": part.disagreements,
            }));
        }
        let total: u64 = rows.iter().map(|r| r["disagreements"].as_u64().unwrap_or(0)).sum();
        let out = match ctx.format {
            Format::Json => json(&json!({ "rows": rows, "disagreements": total, "first_disagreement": first }))?,
            Format::Csv => {
                let header = ["n", "arenas", "even_wins", "odd_wins", "disagreements"];
                let cells: Vec<Vec<String>> =
                    rows.iter().map(|r| header.iter().map(|h| r[*h].to_string()).collect()).collect();
                csv(&header, &cells)?
            }
            Format::Dot => return Err(ctx.unsupported("solve --sweep")),
        };
        return Ok(Outcome::verdict(total == 0, out));
    }
    let arena = read_json::<ArenaDto>(args.arena.as_ref().context("solve needs --arena or --sweep")?)?.to_arena()?;
    let (winner, strategy) = match args.via {
        Via::Separator => {
            let a = match &args.automaton {
                Some(p) => load_automaton(p)?,
                None => counter_separator(arena.graph.n() as u32)?,
            };
            (solve_parity_via_separator(&arena, &a, args.trust, &ctx.caps)?, None)
        }
        Via::Direct => {
            let s = solve_parity_direct(&arena, &ctx.caps)?;
            (s.winner, s.strategy)
        }
    };
    let via = match args.via {
        Via::Separator => "separator",
        Via::Direct => "direct",
    };
    let out = match ctx.format {
        Format::Json => json(&json!({ "winner": player_name(winner), "via": via, "strategy": strategy }))?,
        Format::Csv => csv(
            &["winner", "via", "strategy"],
            &[vec![
                player_name(winner).to_string(),
                via.to_string(),
                strategy.map_or(String::new(), |s| s.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")),
            ]],
        )?,
        Format::Dot => graph_dot(&arena.graph),
    };
    Ok(Outcome::ok(out))
}

/// Checks a pair on its own terms, then the counterexample it implies.
fn check_pair(a: &SafetyAutomaton, p: &FoolingPairDto) -> Result<(bool, Counterexample)> {
    let pair = p.to_pair()?;
    ensure!(pair.g.len() >= p.t as usize, "even word shorter than t = {}", p.t);
    let abs = make_absorbing(a);
    let (fs, gs) = (delta_star(&abs, abs.start(), &pair.f)?, delta_star(&abs, abs.start(), &pair.g)?);
    let sound = classify_graph(&pair.odd_graph) == GraphParity::Odd
        && classify_graph(&pair.even_graph) == GraphParity::Even
        && is_walk(&pair.odd_graph, &pair.f)
        && is_walk(&pair.even_graph, &pair.g)
        && fs == pair.state
        && gs == pair.state;
    let c = pair.as_counterexample(a, p.t);
    let n = pair.odd_graph.n().max(pair.even_graph.n());
    let d = pair.odd_graph.d().max(pair.even_graph.d());
    Ok((sound && confirm_counterexample(a, n, d, &c, Some(p.t)), c))
}

pub fn fool(args: &FoolArgs, ctx: &Ctx) -> Result<Outcome> {
    let a = load_automaton(&args.automaton)?;
    if ctx.format != Format::Json {
        return Err(ctx.unsupported("fool"));
    }
    if let Some(path) = &args.check {
        let evidence: FoolingDto = read_json(path)?;
        let (valid, failure, c) = match &evidence {
            FoolingDto::Structured(dto) => {
                let cert = dto.to_certificate()?;
                match check_fooling_certificate(&cert, &a) {
                    Ok(()) => (true, None, Some(cert.counterexample(&a)?)),
                    Err(f) => (false, Some(f.as_str()), None),
                }
            }
            FoolingDto::Pair(p) => {
                let (ok, c) = check_pair(&a, p)?;
                (ok, (!ok).then_some("pair-does-not-fool"), Some(c))
            }
        };
        let kind = match evidence {
            FoolingDto::Structured(_) => "structured",
            FoolingDto::Pair(_) => "pair",
        };
        let out = json(&json!({
            "kind": kind,
            "valid": valid,
            "failure": failure,
            "counterexample": c.as_ref().map(CounterexampleDto::from),
        }))?;
        return Ok(Outcome::verdict(valid, out));
    }
    let (n, t) = (args.n.context("--n is required")?, args.t.context("--t is required")?);
    let evidence = if args.structured {
        structured_search(&a, n, t, &ctx.caps)?.map(|c| FoolingDto::Structured(FoolingCertificateDto::from(&c)))
    } else {
        let t = u32::try_from(t).context("--t is too large for the general search")?;
        let n = usize::try_from(n).context("--n is too large")?;
        search_fooling_pair(&a, n, args.d, t, &ctx.caps)?.map(|p| FoolingDto::Pair(FoolingPairDto::new(&p, t)))
    };
    // A found pair is a counterexample to separation.
    Ok(Outcome::verdict(evidence.is_none(), json(&evidence)?))
}

#[derive(Serialize)]
struct BoundRow {
    index: usize,
    states: u32,
    time_bound: u32,
    qn: u64,
    within: bool,
    automaton: AutomatonDto,
}

impl BoundRow {
    fn csv(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            self.states.to_string(),
            self.time_bound.to_string(),
            self.qn.to_string(),
            self.within.to_string(),
        ]
    }
}

const BOUND_HEADER: [&str; 5] = ["index", "states", "time_bound", "qn", "within"];

/// `Ok(None)` for automata that do not separate.
fn time_row(a: &SafetyAutomaton, n: usize, d: u32, index: usize, ctx: &Ctx) -> Result<Option<BoundRow>> {
    match derive_time_bound(a, n, d, &ctx.caps) {
        Ok(t) => {
            let qn = a.states() as u64 * n as u64;
            Ok(Some(BoundRow { index, states: a.states(), time_bound: t, qn, within: t as u64 <= qn, automaton: a.into() }))
        }
        Err(Error::NotSeparating(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn bounds(args: &BoundsArgs, ctx: &Ctx) -> Result<Outcome> {
    if !args.all {
        let a = load_automaton(args.automaton.as_ref().context("bounds needs --automaton or --all")?)?;
        return match derive_time_bound(&a, args.n, args.d, &ctx.caps) {
            Ok(_) => {
                let row = time_row(&a, args.n, args.d, 0, ctx)?.expect("separates");
                let out = match ctx.format {
                    Format::Json => json(&row)?,
                    Format::Csv => csv(&BOUND_HEADER, &[row.csv()])?,
                    Format::Dot => automaton_dot(&a),
                };
                Ok(Outcome::verdict(row.within, out))
            }
            Err(Error::NotSeparating(c)) => {
                let out = json(&json!({ "separating": false, "counterexample": CounterexampleDto::from(&*c) }))?;
                Ok(Outcome::verdict(false, out))
            }
            Err(e) => Err(e.into()),
        };
    }
    let spaces = automaton_spaces(args.n as u32, args.d, args.states, &ctx.caps)?;
    let mut automata = canonical_automata(&spaces, ctx)?;
    let enumerated = automata.len();
    if args.d == 2 {
        automata.push(counter_separator(args.n as u32)?);
    }
    let rows: Vec<BoundRow> = par::map_indices(automata.len() as u64, ctx.jobs, |i| {
        time_row(&automata[i as usize], args.n, args.d, i as usize, ctx)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?
    .into_iter()
    .flatten()
    .collect();
    let violations = rows.iter().filter(|r| !r.within).count();
    let out = match ctx.format {
        Format::Json => json(&json!({
            "n": args.n,
            "d": args.d,
            "max_states": args.states,
            "enumerated": enumerated,
            "separating": rows.len(),
            "violations": violations,
            "rows": rows,
        }))?,
        Format::Csv => csv(&BOUND_HEADER, &rows.iter().map(BoundRow::csv).collect::<Vec<_>>())?,
        Format::Dot => return Err(ctx.unsupported("bounds --all")),
    };
    Ok(Outcome::verdict(violations == 0, out))
}

#[derive(Serialize)]
struct ParamsRow {
    n: u64,
    t: u64,
    n_prime: Option<u64>,
    k: Option<u64>,
    a: Option<u64>,
    blocks: Option<u64>,
    log2_q: Option<String>,
    length_lemma: Option<bool>,
    protocol_cost: bool,
    k_over_gamma: bool,
    log_q: bool,
    hypotheses: bool,
    holds: bool,
}

impl From<&ProofReplay> for ParamsRow {
    fn from(r: &ProofReplay) -> Self {
        let p = r.params.as_ref();
        ParamsRow {
            n: r.n,
            t: r.t,
            n_prime: p.map(|p| p.n_prime),
            k: p.map(|p| p.k),
            a: p.map(|p| p.a),
            blocks: p.map(|p| p.blocks()),
            log2_q: p.map(|p| p.q_exponent.to_string()),
            length_lemma: p.map(length_lemma_holds),
            protocol_cost: r.protocol_cost,
            k_over_gamma: r.k_over_gamma,
            log_q: r.log_q,
            hypotheses: r.hypotheses,
            holds: r.holds(),
        }
    }
}

impl ParamsRow {
    const HEADER: [&'static str; 13] = [
        "n", "t", "n_prime", "k", "a", "blocks", "log2_q", "length_lemma", "protocol_cost", "k_over_gamma", "log_q",
        "hypotheses", "holds",
    ];

    fn csv(&self) -> Vec<String> {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map_or(String::new(), T::to_string)
        }
        vec![
            self.n.to_string(),
            self.t.to_string(),
            opt(&self.n_prime),
            opt(&self.k),
            opt(&self.a),
            opt(&self.blocks),
            opt(&self.log2_q),
            opt(&self.length_lemma),
            self.protocol_cost.to_string(),
            self.k_over_gamma.to_string(),
            self.log_q.to_string(),
            self.hypotheses.to_string(),
            self.holds.to_string(),
        ]
    }
}

pub fn params(args: &ParamsArgs, ctx: &Ctx) -> Result<Outcome> {
    let points: Vec<(u64, u64)> = if args.grid {
        [10_000u64, 100_000, 1_000_000].iter().flat_map(|&n| [(n, 8 * n), (n, 16 * n), (n, upper_time(n))]).collect()
    } else {
        let (n, t) = (args.n.context("--n is required")?, args.t.context("--t is required")?);
        // Surface parameter errors for a single point instead of a silent "false".
        derive_params(n, t)?;
        vec![(n, t)]
    };
    let rows: Vec<ParamsRow> = points.iter().map(|&(n, t)| (&replay_communication_bound(n, t)).into()).collect();
    let all = rows.iter().all(|r| r.holds);
    let out = match ctx.format {
        Format::Json if args.grid => json(&json!({ "rows": rows, "holds": all }))?,
        Format::Json => json(&rows[0])?,
        Format::Csv => csv(&ParamsRow::HEADER, &rows.iter().map(ParamsRow::csv).collect::<Vec<_>>())?,
        Format::Dot => return Err(ctx.unsupported("params")),
    };
    Ok(Outcome::verdict(all, out))
}
