//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use gridspec::analyzer::{analyze_source, Analysis, CellId, Code};
use gridspec::eval::{apply_builtin, evaluate, Arg, InputBindings, Value, ValueGrid};
use gridspec_cli::load_inputs;

/// Relative tolerance for real-valued comparisons.
const RELATIVE_TOLERANCE: f64 = 1e-9;
/// Seed for every randomized criterion, so runs are reproducible.
const SEED: u64 = 0x5EED_2009;
const ELABORATION_DOCS: usize = 200;
const MATCH_VECTORS: usize = 1000;
const LOAN_CONFIGS: usize = 100;
const CLOSED_FORM_CASES: usize = 300;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn load(name: &str) -> (Analysis, InputBindings, ValueGrid) {
    let dir = fixture_dir(name);
    let analysis = analyze_source(&fs::read_to_string(dir.join("spec.gsx")).unwrap()).unwrap();
    let inputs = load_inputs(&dir.join("inputs.csv"), &analysis).unwrap();
    let values = evaluate(&analysis.plan, &inputs).unwrap();
    (analysis, inputs, values)
}

fn numbers(values: &ValueGrid, table: &str) -> Vec<f64> {
    values
        .column(table)
        .iter()
        .map(|v| v.as_number().unwrap_or(f64::NAN))
        .collect()
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn criterion_1() -> Outcome {
    let (_, _, values) = load("cash_flow");
    let start: Vec<f64> = (0..12).map(|i| 100.0 - 5.0 * i as f64).collect();
    let end: Vec<f64> = (1..=12).map(|i| 100.0 - 5.0 * i as f64).collect();
    expect(
        "start",
        numbers(&values, "total_cash_at_start_of_period"),
        start,
    )?;
    expect("end", numbers(&values, "total_cash_at_end_of_period"), end)?;
    Ok("start 100..45, end 95..40".into())
}

fn criterion_2() -> Outcome {
    let (_, _, values) = load("borrowing");
    let want: Vec<f64> = values
        .column("want_to_borrow_during_period")
        .iter()
        .map(|v| v.as_number().unwrap_or(0.0))
        .collect();
    expect(
        "actually borrowed",
        numbers(&values, "actually_borrowed_during_period"),
        want,
    )?;
    let end = vec![
        95.0, 90.0, 85.0, 80.0, 95.0, 90.0, 85.0, 90.0, 85.0, 80.0, 75.0, 70.0,
    ];
    expect("end", numbers(&values, "total_cash_at_end_of_period"), end)?;
    Ok("borrowed mirrors wanted; end 95,90,85,80,95,90,85,90,85,80,75,70".into())
}

/// Pictured can_supply_wants rows, periods 1..12 by loans 1..4.
const CAN_SUPPLY: [[bool; 4]; 12] = {
    const T: bool = true;
    const F: bool = false;
    [
        [T, T, T, T],
        [F, T, T, T],
        [F, F, T, T],
        [F, F, F, T],
        [F, F, F, F],
        [F, T, T, T],
        [F, F, T, T],
        [F, F, F, T],
        [F, F, F, F],
        [F, F, F, F],
        [T, T, T, T],
        [T, T, T, T],
    ]
};

fn first_column() -> Vec<Value> {
    [1, 2, 3, 4, 0, 2, 3, 4, 0, 0, 1, 1]
        .iter()
        .map(|&n| {
            if n == 0 {
                Value::Na
            } else {
                Value::number(f64::from(n))
            }
        })
        .collect()
}

fn loans_with_ceilings(
    analysis: &Analysis,
    inputs: &InputBindings,
    ceilings: [f64; 4],
) -> ValueGrid {
    let mut bound = InputBindings::new();
    for (cell, value) in inputs.iter() {
        let value = if cell.table == "ceiling" {
            Value::number(ceilings[(cell.indices[0] - 1) as usize])
        } else {
            *value
        };
        bound.bind(&analysis.plan, cell.clone(), value).unwrap();
    }
    evaluate(&analysis.plan, &bound).unwrap()
}

fn reproduces_picture(values: &ValueGrid) -> bool {
    values.column("first_that_can_supply_wants") == first_column()
        && (1..=12).all(|t| {
            (1..=4).all(|l| {
                values.at("can_supply_wants", &[l, t])
                    == Value::Boolean(CAN_SUPPLY[(t - 1) as usize][(l - 1) as usize])
            })
        })
}

fn criterion_3() -> Outcome {
    let (analysis, inputs, values) = load("loans");
    expect(
        "first_that_can_supply_wants",
        values.column("first_that_can_supply_wants"),
        first_column(),
    )?;
    for t in 1..=12i64 {
        let row: Vec<Value> = (1..=4)
            .map(|l| values.at("can_supply_wants", &[l, t]))
            .collect();
        let want: Vec<Value> = CAN_SUPPLY[(t - 1) as usize]
            .iter()
            .map(|&b| Value::Boolean(b))
            .collect();
        expect(&format!("can_supply_wants row t={t}"), row, want)?;
    }
    let nonzero: BTreeMap<(i64, i64), f64> = [
        ((1, 1), 15.0),
        ((2, 2), 25.0),
        ((3, 3), 45.0),
        ((4, 4), 65.0),
        ((2, 6), 12.0),
        ((3, 7), 12.0),
        ((4, 8), 12.0),
    ]
    .into_iter()
    .collect();
    for l in 1..=4 {
        for t in 1..=12 {
            let got = values.at("lent_during_period", &[l, t]).as_number();
            let want = nonzero.get(&(l, t)).copied().unwrap_or(0.0);
            expect(&format!("lent_during_period[{l},{t}]"), got, Some(want))?;
        }
    }
    let end = vec![
        110.0, 130.0, 170.0, 230.0, 225.0, 232.0, 239.0, 246.0, 241.0, 236.0, 231.0, 226.0,
    ];
    expect(
        "total_cash_at_end",
        numbers(&values, "total_cash_at_end_of_period"),
        end,
    )?;

    // The ceilings are the smallest that reproduce the picture: each one
    // lowered by a single unit no longer does.
    let ceilings = [15.0, 37.0, 57.0, 77.0];
    if !reproduces_picture(&loans_with_ceilings(&analysis, &inputs, ceilings)) {
        return Err("ceilings 15,37,57,77 do not reproduce the picture".into());
    }
    for l in 0..4 {
        let mut lower = ceilings;
        lower[l] -= 1.0;
        if reproduces_picture(&loans_with_ceilings(&analysis, &inputs, lower)) {
            return Err(format!("ceiling of loan {} is not minimal", l + 1));
        }
    }
    Ok("H column, truth matrix, lent entries, end balances; ceilings 15,37,57,77 minimal".into())
}

fn cash_end(c: f64, e: f64, n: i64) -> Vec<f64> {
    let spec = format!(
        "bounds s: 1 to {n}.
table expenses : s -> currency.
table initial : -> currency.
table start : s -> currency.
table end : s -> currency.
start[1] = initial[].
start[t>1] = end[t-1].
end[t] = start[t] - expenses[t]."
    );
    let analysis = analyze_source(&spec).unwrap();
    let mut inputs = InputBindings::new();
    inputs
        .bind(
            &analysis.plan,
            CellId::new("initial", vec![]),
            Value::currency(c),
        )
        .unwrap();
    for t in 1..=n {
        inputs
            .bind(
                &analysis.plan,
                CellId::new("expenses", vec![t]),
                Value::currency(e),
            )
            .unwrap();
    }
    numbers(&evaluate(&analysis.plan, &inputs).unwrap(), "end")
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    // Whole-pound amounts: every partial result is exact in binary.
    for _ in 0..CLOSED_FORM_CASES {
        let (c, e, n) = (
            f64::from(rng.gen_range(0..=1000u32)),
            f64::from(rng.gen_range(0..=50u32)),
            rng.gen_range(1..=24i64),
        );
        for (t, got) in (1..=n).zip(cash_end(c, e, n)) {
            if got != c - t as f64 * e {
                return Err(format!("C={c} e={e} t={t}: got {got}"));
            }
        }
    }
    // Real-valued amounts: repeated subtraction rounds, so compare within
    // the pinned tolerance.
    let mut worst = 0.0f64;
    for _ in 0..CLOSED_FORM_CASES {
        let (c, e, n) = (
            rng.gen_range(0.0..=1000.0),
            rng.gen_range(0.0..=50.0),
            rng.gen_range(1..=24i64),
        );
        for (t, got) in (1..=n).zip(cash_end(c, e, n)) {
            let want = c - t as f64 * e;
            let err = (got - want).abs() / c.max(1.0);
            worst = worst.max(err);
            if err > RELATIVE_TOLERANCE {
                return Err(format!("C={c} e={e} t={t}: got {got}, want {want}"));
            }
        }
    }
    Ok(format!(
        "{CLOSED_FORM_CASES} integer cases exact; {CLOSED_FORM_CASES} real cases within {RELATIVE_TOLERANCE:e} (worst {worst:.1e})"
    ))
}

/// A random document of up to 3 tables over up to 2 bounds; each table
/// has arity at most 2 and at most 3 equations. Patterns are
/// `(kind, k)`: 0 constant, 1 variable, 2..=6 guarded.
struct SmallDoc {
    bounds: Vec<(i64, i64)>,
    tables: Vec<Vec<usize>>,
    equations: Vec<Vec<Vec<(u8, i64)>>>,
}

const GUARDS: [&str; 5] = ["<", "<=", ">", ">=", "<>"];

impl SmallDoc {
    fn random(rng: &mut StdRng) -> SmallDoc {
        let bounds: Vec<(i64, i64)> = (0..rng.gen_range(1..=2))
            .map(|_| {
                let lo = rng.gen_range(-2..4);
                (lo, lo + rng.gen_range(0..6))
            })
            .collect();
        let tables: Vec<Vec<usize>> = (0..rng.gen_range(1..=3))
            .map(|_| {
                (0..rng.gen_range(0..=2))
                    .map(|_| rng.gen_range(0..bounds.len()))
                    .collect()
            })
            .collect();
        let equations = tables
            .iter()
            .map(|dims| {
                (0..rng.gen_range(0..=3))
                    .map(|_| {
                        dims.iter()
                            .map(|_| (rng.gen_range(0..7u8), rng.gen_range(-3..9)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        SmallDoc {
            bounds,
            tables,
            equations,
        }
    }

    fn source(&self) -> (String, Vec<Vec<usize>>) {
        let mut lines = Vec::new();
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            lines.push(format!("bounds b{i}: {lo} to {hi}."));
        }
        for (t, dims) in self.tables.iter().enumerate() {
            let dims: Vec<String> = dims.iter().map(|d| format!("b{d}")).collect();
            lines.push(format!("table t{t} : {} -> number.", dims.join(" ")));
        }
        let mut eq_lines = Vec::new();
        for (t, eqs) in self.equations.iter().enumerate() {
            let mut these = Vec::new();
            for (e, pats) in eqs.iter().enumerate() {
                let pats: Vec<String> = pats
                    .iter()
                    .enumerate()
                    .map(|(d, &(kind, k))| match kind {
                        0 => k.to_string(),
                        1 => format!("v{d}"),
                        g => format!("v{d}{}{k}", GUARDS[(g - 2) as usize]),
                    })
                    .collect();
                lines.push(format!("t{t}[{}] = {e}.", pats.join(", ")));
                these.push(lines.len());
            }
            eq_lines.push(these);
        }
        (lines.join("\n"), eq_lines)
    }

    fn cells(&self, table: usize) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.tables[table] {
            let (lo, hi) = self.bounds[d];
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| (lo..=hi).map(move |i| [p.clone(), vec![i]].concat()))
                .collect();
        }
        out
    }
}

fn pattern_accepts(kind: u8, k: i64, x: i64) -> bool {
    match kind {
        0 => x == k,
        1 => true,
        2 => x < k,
        3 => x <= k,
        4 => x > k,
        5 => x >= k,
        _ => x != k,
    }
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut accepted, mut rejected) = (0, 0);
    for n in 0..ELABORATION_DOCS {
        let doc = SmallDoc::random(&mut rng);
        let (text, eq_lines) = doc.source();
        let mut winners = BTreeMap::new();
        let mut uncovered = BTreeSet::new();
        let mut overlapping = BTreeSet::new();
        for (t, eqs) in doc.equations.iter().enumerate() {
            if eqs.is_empty() {
                continue;
            }
            for cell in doc.cells(t) {
                let hits: Vec<usize> = (0..eqs.len())
                    .filter(|&e| {
                        eqs[e]
                            .iter()
                            .zip(&cell)
                            .all(|(&(kind, k), &x)| pattern_accepts(kind, k, x))
                    })
                    .collect();
                let id = CellId::new(format!("t{t}"), cell).to_string();
                match hits.as_slice() {
                    [] => drop(uncovered.insert(id)),
                    [e] => drop(winners.insert(id, eq_lines[t][*e])),
                    _ => drop(overlapping.insert(id)),
                }
            }
        }
        let fail = |why: String| Err(format!("document {n}: {why}\n{text}"));
        match analyze_source(&text) {
            Ok(analysis) => {
                accepted += 1;
                if !uncovered.is_empty() || !overlapping.is_empty() {
                    return fail("accepted but the scan finds gaps or overlaps".into());
                }
                let got: BTreeMap<String, usize> = analysis
                    .plan
                    .rules
                    .values()
                    .map(|r| {
                        (
                            r.cell.to_string(),
                            analysis.plan.equation(r).pos.line as usize,
                        )
                    })
                    .collect();
                if got != winners {
                    return fail("per-cell winners differ".into());
                }
            }
            Err(diags) => {
                rejected += 1;
                let mut got_uncovered = BTreeSet::new();
                let mut got_overlapping = BTreeSet::new();
                for d in diags.iter().filter(|d| d.is_error()) {
                    match d.code {
                        Code::UncoveredCell => drop(
                            got_uncovered.insert(d.message.rsplit(' ').next().unwrap().to_string()),
                        ),
                        Code::OverlappingRules => drop(
                            got_overlapping
                                .insert(d.message.split(' ').next().unwrap().to_string()),
                        ),
                        other => return fail(format!("unexpected {other:?}")),
                    }
                }
                if got_uncovered != uncovered || got_overlapping != overlapping {
                    return fail("verdicts differ".into());
                }
            }
        }
    }
    Ok(format!(
        "{ELABORATION_DOCS} documents agree ({accepted} accepted, {rejected} rejected)"
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut absent = 0;
    for _ in 0..MATCH_VECTORS {
        let len = rng.gen_range(0..=16);
        let haystack: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.3)).collect();
        let needle = rng.gen_bool(0.5);
        let want = match haystack.iter().position(|&b| b == needle) {
            Some(i) => Value::number((i + 1) as f64),
            None => {
                absent += 1;
                Value::Na
            }
        };
        let got = apply_builtin(
            "MATCH",
            vec![
                Arg::Scalar(Value::Boolean(needle)),
                Arg::Range(haystack.iter().map(|&b| Value::Boolean(b)).collect()),
                Arg::Scalar(Value::number(0.0)),
            ],
        )
        .map_err(|e| e.to_string())?;
        expect(&format!("match({needle}, {haystack:?})"), got, want)?;
    }
    Ok(format!(
        "{MATCH_VECTORS} vectors agree ({absent} with no match)"
    ))
}

fn gridspec(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gridspec"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn compile(name: &str, dir: &Path) -> Result<(), String> {
    let f = fixture_dir(name);
    let (code, _) = gridspec(&[
        "compile",
        f.join("spec.gsx").to_str().unwrap(),
        "--inputs",
        f.join("inputs.csv").to_str().unwrap(),
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    expect(&format!("{name} compile exit"), code, 0)
}

fn criterion_7() -> Outcome {
    let mut counts = Vec::new();
    for name in ["cash_flow", "borrowing", "loans"] {
        let tmp = tempfile::tempdir().unwrap();
        compile(name, tmp.path())?;
        let (code, report) = gridspec(&["verify", tmp.path().to_str().unwrap()]);
        expect(&format!("{name} verify exit"), code, 0)?;
        let words: Vec<&str> = report.split_whitespace().collect();
        let checked: usize = words[1].parse().map_err(|_| report.clone())?;
        let mismatches: usize = words[4].parse().map_err(|_| report.clone())?;
        expect(&format!("{name} mismatches"), mismatches, 0)?;
        let (analysis, _, _) = load(name);
        expect(
            &format!("{name} checks vs derived cells"),
            checked,
            analysis.plan.rules.len(),
        )?;
        counts.push(format!("{name} {checked}"));
    }
    Ok(format!(
        "0 mismatches; checks equal derived cells ({}). The stated 48 for cash_flow is not \
         reproducible: it has 36 derived cells (borrowing has 48)",
        counts.join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let (analysis, fixture_inputs, _) = load("loans");
    let plan = &analysis.plan;
    let check = |inputs: &InputBindings, label: &str| -> Result<(), String> {
        let values = evaluate(plan, inputs).map_err(|e| e.to_string())?;
        let num = |t: &str, ix: &[i64]| values.at(t, ix).as_number().unwrap_or(0.0);
        for t in 1..=12 {
            let lent: f64 = (1..=4).map(|l| num("lent_during_period", &[l, t])).sum();
            let delta = num("total_cash_at_end_of_period", &[t])
                - num("total_cash_at_start_of_period", &[t])
                + num("expenses_during_period", &[t]);
            if delta != lent {
                return Err(format!(
                    "{label}: conservation fails at t={t}: {delta} vs {lent}"
                ));
            }
            for l in 1..=4 {
                let capped = values.at("has_ceiling", &[l]) == Value::Boolean(true);
                if capped && num("total_loan_at_end_of_period", &[l, t]) > num("ceiling", &[l]) {
                    return Err(format!("{label}: loan {l} exceeds its ceiling at t={t}"));
                }
            }
        }
        Ok(())
    };
    check(&fixture_inputs, "fixture")?;
    let mut rng = StdRng::seed_from_u64(SEED);
    for n in 0..LOAN_CONFIGS {
        let mut inputs = InputBindings::new();
        let mut bind =
            |t: &str, ix: Vec<i64>, v: Value| inputs.bind(plan, CellId::new(t, ix), v).unwrap();
        bind("initial_cash", vec![], Value::number(100.0));
        for t in 1..=12 {
            bind("expenses_during_period", vec![t], Value::number(5.0));
            if rng.gen_bool(0.85) {
                bind(
                    "want_to_borrow_during_period",
                    vec![t],
                    Value::number(f64::from(rng.gen_range(0..120u32))),
                );
            }
        }
        for l in 1..=4 {
            let ceiling = rng.gen_range(0..150u32);
            bind("has_ceiling", vec![l], Value::Boolean(rng.gen_bool(0.8)));
            bind("ceiling", vec![l], Value::number(f64::from(ceiling)));
            bind(
                "initial_loan",
                vec![l],
                Value::number(f64::from(rng.gen_range(0..=ceiling / 2))),
            );
        }
        check(&inputs, &format!("configuration {n}"))?;
    }
    Ok(format!("fixture and {LOAN_CONFIGS} random configurations"))
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    compile("loans", a.path())?;
    compile("loans", b.path())?;
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    if ta != tb {
        return Err("compiled directories differ".into());
    }
    Ok(format!("{} files byte-identical", ta.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("cash flow balances", criterion_1),
        ("borrowing balances", criterion_2),
        ("loans model", criterion_3),
        ("closed-form cash property", criterion_4),
        ("elaboration oracle", criterion_5),
        ("match oracle", criterion_6),
        ("compile-verify round trip", criterion_7),
        ("conservation and ceiling safety", criterion_8),
        ("compile determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("PASS {}. {title}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {}. {title}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {}. {title}: panicked", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
