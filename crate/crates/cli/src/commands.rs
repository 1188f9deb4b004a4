use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use lingam_core::prelude::*;

use crate::args::{BenchArgs, BenchKind, DetectArgs, Format, SimulateArgs, TestArgs};
use crate::error::{CliError, CliResult};
use crate::input::read_columns;
use crate::report::{long_csv, summarize, table, BenchJson, DetectConfigJson, DetectJson};

/// The given seed, or a fresh one announced on stderr so the run can be repeated.
fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::unwritable(path, e))
}

fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, contents),
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::unwritable("<stdout>", e)),
    }
}

fn independence_config(t: &TestArgs, seed: u64) -> IndependenceTestConfig {
    IndependenceTestConfig {
        method: t.method.into(),
        permutations: t.permutations,
        alpha: t.alpha,
        rng_seed: seed,
        ..Default::default()
    }
}

pub fn detect(args: &DetectArgs) -> CliResult<()> {
    let cols = read_columns(&args.input)?;
    let n = cols.x.len();
    let seed = resolve_seed(args.test.seed);
    let cfg = independence_config(&args.test, seed);
    let sample = PairedSample::from_vecs(cols.x, cols.y)?;
    let report = gauss_detect(&sample, &cfg).map_err(|e| match e {
        Error::DegenerateSeries(c) => {
            let (idx, name) = if c == "x" { (1, &cols.names[0]) } else { (2, &cols.names[1]) };
            CliError::DegenerateColumn(format!("{idx} (`{name}`)"))
        }
        other => other.into(),
    })?;

    let json = DetectJson::new(
        &report,
        DetectConfigJson {
            alpha: cfg.alpha,
            method: cfg.method.as_str(),
            permutations: cfg.permutations,
            seed,
            n,
        },
    );
    let text = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => format!("{}\n{}\n", DetectJson::CSV_HEADER, json.csv_row()),
    };
    emit(args.out.as_deref(), &text)
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let seed = resolve_seed(args.seed);
    let spec = GenSpec {
        n: args.n,
        slope: args.slope,
        noise: args.noise,
        seed,
    };
    let sample = generate(&spec)?;
    let mut text = String::with_capacity(48 * spec.n + 4);
    text.push_str("x,y\n");
    for (x, y) in sample.x().as_slice().iter().zip(sample.y().as_slice()) {
        // 17 significant digits round-trip every f64
        text.push_str(&format!("{x:.16e},{y:.16e}\n"));
    }
    write_file(&args.out, &text)
}

pub fn bench(args: &BenchArgs) -> CliResult<()> {
    let seed = resolve_seed(args.test.seed);
    let cfg = ExperimentConfig {
        sample_sizes: args.sizes.clone(),
        noise_kinds: args.noise.clone(),
        batches: args.batches,
        alpha: args.test.alpha,
        it_cfg: independence_config(&args.test, seed),
        gt: args.gt.into(),
        slope: args.slope,
        master_seed: seed,
    };
    cfg.validate()?;

    let kind = args.kind.as_str();
    let (rows, invalid) = match args.kind {
        BenchKind::Consistency => {
            let report = run_consistency(&cfg)?;
            let invalid = report
                .cells
                .iter()
                .filter(|c| !c.valid)
                .map(|c| (c.noise.to_string(), c.n))
                .collect::<Vec<_>>();
            (report.long_rows(), invalid)
        }
        BenchKind::Tpd => {
            let report = run_tpd(&cfg)?;
            let mut invalid = Vec::new();
            for c in report.cells.iter().filter(|c| !c.valid) {
                let key = (c.noise.to_string(), c.n);
                if !invalid.contains(&key) {
                    invalid.push(key);
                }
            }
            (report.long_rows(), invalid)
        }
    };
    let is_valid = |noise: &str, n: usize| !invalid.iter().any(|(a, b)| a == noise && *b == n);
    let summary = BenchJson {
        kind,
        config: &cfg,
        valid: invalid.is_empty(),
        cells: summarize(&rows, is_valid),
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    let csv = long_csv(&rows);

    let csv_path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{kind}.csv")));
    write_file(&csv_path, &csv)?;
    write_file(&csv_path.with_extension("json"), &json)?;

    let shown = match args.format {
        None => table(&rows),
        Some(Format::Json) => json,
        Some(Format::Csv) => csv,
    };
    emit(None, &shown)?;

    if invalid.is_empty() {
        Ok(())
    } else {
        Err(CliError::InvalidCells(
            invalid.into_iter().map(|(noise, n)| format!("{noise}@{n}")).collect(),
        ))
    }
}
