//! The acceptance suite: one PASS/FAIL line per criterion, then a non-zero
//! exit if any failed. Run with `cargo test -p seplab --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use seplab::dto::AutomatonDto;
use seplab_core::automaton::{automaton_spaces, counter_automaton, counter_separator};
use seplab_core::comm::{a_bruteforce, d_size_formula, gen_d};
use seplab_core::fooling::search_fooling_pair;
use seplab_core::separation::{confirm_counterexample, verify_time_t};
use seplab_core::Caps;

struct Suite {
    dir: tempfile::TempDir,
    /// Every command line run so far, for the determinism check.
    runs: Vec<Vec<String>>,
}

struct Run {
    code: i32,
    json: Value,
}

impl Suite {
    fn new() -> Self {
        let dir = tempfile::tempdir().expect("temp dir");
        let save = |name: &str, a: &seplab_core::SafetyAutomaton| {
            std::fs::write(dir.path().join(name), serde_json::to_string(&AutomatonDto::from(a)).unwrap()).unwrap();
        };
        save("counter2.json", &counter_separator(2).unwrap());
        save("cap1.json", &counter_automaton(2, 1).unwrap());
        Suite { dir, runs: Vec::new() }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }

    fn run(&mut self, args: &[&str]) -> Run {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut full = vec!["seplab".to_string(), "--jobs".into(), "4".into()];
        full.extend(args.iter().cloned());
        let out = seplab::run(full, None);
        assert!(out.code != 2, "usage error for {args:?}: {}", out.stderr);
        self.runs.push(args);
        Run { code: out.code, json: serde_json::from_str(&out.stdout).unwrap_or(Value::Null) }
    }
}

type Verdict = (bool, String);
type Criterion = fn(&mut Suite) -> Verdict;

fn timed<F: FnOnce() -> Verdict>(limit: Duration, f: F) -> Verdict {
    let start = Instant::now();
    let (ok, detail) = f();
    let took = start.elapsed();
    (ok && took < limit, format!("{detail}; {:.1}s (limit {}s)", took.as_secs_f64(), limit.as_secs()))
}

fn criterion_1(s: &mut Suite) -> Verdict {
    timed(Duration::from_secs(60), || {
        let a = s.path("counter2.json");
        let r = s.run(&["verify", "--automaton", &a, "--n", "2", "--d", "2", "--time", "6"]);
        let graphs = r.json["graphs"].as_u64().unwrap_or(0);
        (r.code == 0 && r.json["verdict"] == "ok" && graphs == 64, format!("verdict {} over {graphs} graphs", r.json["verdict"]))
    })
}

fn criterion_2(s: &mut Suite) -> Verdict {
    timed(Duration::from_secs(300), || {
        let r = s.run(&["refute", "--all", "--states", "2", "--n", "2"]);
        let (total, refuted) = (r.json["automata"].as_u64().unwrap_or(0), r.json["refuted"].as_u64().unwrap_or(0));
        (r.code == 0 && total > 0 && total == refuted, format!("{refuted}/{total} automata refuted with confirmed counterexamples"))
    })
}

fn criterion_3(s: &mut Suite) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let r = s.run(&["bounds", "--all", "--n", &n.to_string(), "--states", "3"]);
        let separating = r.json["separating"].as_u64().unwrap_or(0);
        let violations = r.json["violations"].as_u64().unwrap_or(u64::MAX);
        // The counter separator is always among the rows.
        ok &= r.code == 0 && separating >= 1 && violations == 0;
        parts.push(format!("n={n}: {separating} separating, {violations} violations"));
    }
    (ok, parts.join("; "))
}

fn criterion_4(s: &mut Suite) -> Verdict {
    timed(Duration::from_secs(600), || {
        let r = s.run(&["solve", "--sweep", "--n", "3"]);
        let at3 = &r.json["rows"][2];
        // 26^3 graphs, 2^3 ownerships, 3 initial nodes.
        let arenas = at3["arenas"].as_u64().unwrap_or(0);
        let d = r.json["disagreements"].as_u64().unwrap_or(u64::MAX);
        (r.code == 0 && arenas == 26u64.pow(3) * 8 * 3 && d == 0, format!("{arenas} arenas at n = 3, {d} disagreements"))
    })
}

fn criterion_5(s: &mut Suite) -> Verdict {
    let r = s.run(&["extremal", "fi-check", "--n", "6", "--a", "3"]);
    let rows = r.json["rows"].as_array().map_or(0, Vec::len);
    let v = r.json["violations"].as_u64().unwrap_or(u64::MAX);
    (r.code == 0 && rows > 0 && v == 0, format!("{rows} grid points, {v} violations"))
}

fn criterion_6(s: &mut Suite) -> Verdict {
    let r = s.run(&["--seed", "2024", "extremal", "shift", "--trials", "10000"]);
    let v = r.json["violations"].as_u64().unwrap_or(u64::MAX);
    (r.code == 0 && r.json["trials"] == 10000 && v == 0, format!("10000 seeded trials, {v} violations"))
}

fn criterion_7(s: &mut Suite) -> Verdict {
    let point = s.run(&["extremal", "maxprod", "--n", "6", "--a", "2", "--t", "0", "--exact"]);
    let row = &point.json["rows"][0];
    let max = row["max_product"].as_u64().unwrap_or(0);
    let bound = row["bound"].as_f64().unwrap_or(f64::NAN);
    // 32 * 2 * 4 * C(6,2)^2 * exp(-1/40).
    let closed = 57600.0 * (-1.0f64 / 40.0).exp();
    let bound_ok = ((bound - closed) / closed).abs() < 1e-9 && (bound - 56177.6).abs() < 0.5;
    let grid = s.run(&["extremal", "maxprod", "--n", "6", "--a", "3"]);
    let v = grid.json["violations"].as_u64().unwrap_or(u64::MAX);
    let points = grid.json["rows"].as_array().map_or(0, Vec::len);
    (
        point.code == 0 && max == 9 && row["within"] == true && bound_ok && grid.code == 0 && v == 0,
        format!("max_product(6,2,0) = {max} <= {bound:.4}; grid of {points} points, {v} violations"),
    )
}

fn criterion_8(s: &mut Suite) -> Verdict {
    let r = s.run(&["extremal", "prob", "--n", "6", "--a", "3"]);
    let product = r.json["product"]["violations"].as_u64().unwrap_or(u64::MAX);
    let chernoff = r.json["chernoff"]["violations"].as_array().map_or(usize::MAX, Vec::len);
    let topsoe = r.json["topsoe"]["violations"].as_array().map_or(usize::MAX, Vec::len);
    (
        r.code == 0 && r.json["pass"] == true,
        format!("violations: product {product}, Chernoff {chernoff} of {}, Topsoe {topsoe} of 10000", r.json["chernoff"]["cells"]),
    )
}

fn criterion_9(s: &mut Suite) -> Verdict {
    let caps = Caps::default();
    let cap1 = s.path("cap1.json");
    let found = s.run(&["fool", "--automaton", &cap1, "--n", "2", "--t", "6"]);
    let pair_path = s.path("pair.json");
    std::fs::write(&pair_path, found.json.to_string()).unwrap();
    let checked = s.run(&["fool", "--automaton", &cap1, "--check", &pair_path]);
    let verified = s.run(&["verify", "--automaton", &cap1, "--n", "2", "--d", "2", "--time", "6"]);
    // The pair's own counterexample, replayed through the library.
    let a = counter_automaton(2, 1).unwrap();
    let replayed = search_fooling_pair(&a, 2, 2, 6, &caps)
        .unwrap()
        .is_some_and(|p| confirm_counterexample(&a, 2, 2, &p.as_counterexample(&a, 6), Some(6)));
    let sep = s.run(&["fool", "--automaton", &s.path("counter2.json"), "--n", "2", "--t", "6"]);

    let mut checked_automata = 0;
    let mut mismatches = 0;
    for space in automaton_spaces(2, 2, 3, &caps).unwrap() {
        for a in space.iter() {
            checked_automata += 1;
            for t in 0..=6 {
                let none = search_fooling_pair(&a, 2, 2, t, &caps).unwrap().is_none();
                let ok = verify_time_t(&a, 2, 2, t, &caps).unwrap().is_ok();
                if none != ok {
                    mismatches += 1;
                }
            }
        }
    }
    let pass = found.code == 1
        && !found.json.is_null()
        && checked.code == 0
        && checked.json["valid"] == true
        && verified.code == 1
        && replayed
        && sep.code == 0
        && sep.json.is_null()
        && mismatches == 0;
    (
        pass,
        format!(
            "cap-1 pair found and checked, verify exit {}; separator search {}; {mismatches} mismatches over {checked_automata} automata x t in 0..=6",
            verified.code,
            if sep.json.is_null() { "None" } else { "found a pair" }
        ),
    )
}

fn criterion_10(s: &mut Suite) -> Verdict {
    let caps = Caps::default();
    let mut count_ok = true;
    for n in 1..=8u32 {
        for k in 1..=3.min(n) {
            count_ok &= gen_d(n, k, &caps).unwrap().len() as u128 == d_size_formula(n, k);
        }
    }
    let gen = s.run(&["comm", "gen", "--n", "8", "--k", "3"]);
    count_ok &= gen.code == 0;

    let cover = s.run(&["comm", "mincover", "--n", "2", "--k", "2", "--gamma", "1/2"]);
    let cover_ok = cover.json["size"] == 2;

    let a = s.run(&["comm", "A", "--n", "3", "--a", "1", "--t", "0", "--k", "2", "--k-max", "4"]);
    let mut a_ok = a.code == 0 && a.json["rows"][0]["value"] == 2;
    let mut points = 1;
    for (n, aa, t) in [(4, 1, 0), (4, 2, 0), (4, 2, 1), (5, 2, 0), (5, 2, 1)] {
        let values: Vec<u64> = (2..=5).map(|k| a_bruteforce(n, aa, t, k, &caps).unwrap()).collect();
        a_ok &= values.windows(2).all(|w| w[0] <= w[1] && w[1] <= 2 * w[0]);
        points += 1;
    }

    let b = s.run(&["comm", "bound", "--n", "100000000", "--k", "10", "--gamma", "1/10"]);
    let value = b.json["bound"].as_f64().unwrap_or(f64::NAN);
    let thm4_ok = (value - 946.85).abs() <= 0.01;
    (
        count_ok && cover_ok && a_ok && thm4_ok,
        format!(
            "D counts {}, min cover {}, A(3,1,0,2) = {} with recursion at {points} points {}, thm4(1e8,10,0.1) = {value:.2} (expected 946.85 +- 0.01)",
            if count_ok { "match" } else { "differ" },
            cover.json["size"],
            a.json["rows"][0]["value"],
            if a_ok { "ok" } else { "broken" },
        ),
    )
}

fn criterion_11(s: &mut Suite) -> Verdict {
    let r = s.run(&["params", "--grid"]);
    let rows = r.json["rows"].as_array().cloned().unwrap_or_default();
    let failing: Vec<String> = rows
        .iter()
        .filter(|row| row["holds"] != true)
        .map(|row| format!("({}, {})", row["n"], row["t"]))
        .collect();
    (
        r.code == 0 && rows.len() == 9 && failing.is_empty(),
        format!("{} of {} grid points violate the chain: {}", failing.len(), rows.len(), failing.join(" ")),
    )
}

fn criterion_12(s: &Suite) -> Verdict {
    let exe = env!("CARGO_BIN_EXE_seplab");
    let run = |jobs: &str, args: &[String]| {
        let out = Command::new(exe).arg("--jobs").arg(jobs).args(args).current_dir(s.dir.path()).output().expect("spawn");
        (out.status.code(), out.stdout)
    };
    let mut differing = Vec::new();
    for args in &s.runs {
        if run("1", args) != run("4", args) {
            differing.push(args.join(" "));
        }
    }
    (differing.is_empty(), format!("{} runs compared, {} differ {:?}", s.runs.len(), differing.len(), differing))
}

fn main() {
    // Honour `cargo test -- --list` and filters the way libtest would.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut s = Suite::new();
    let criteria: [(u32, Criterion); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = Vec::new();
    let mut report = |i: u32, (ok, detail): Verdict| {
        println!("Criterion {i} {}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(i);
        }
    };
    for (i, f) in criteria {
        report(i, f(&mut s));
    }
    report(12, criterion_12(&s));
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
