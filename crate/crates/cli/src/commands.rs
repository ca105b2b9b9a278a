use std::fmt::Write as _;
use std::fs;

use cachelab::analysis::{
    case_study, curve, summarize, sweep_records, verify, GapRecord, IdentityCheck, Preset, SweepGrid, SweepSummary,
    VerifyLevel,
};
use cachelab::bounds::{lb, lb_cutset, rate_ach, EvalMode};
use cachelab::model::{make_config, random_demands, worst_case_demands};
use cachelab::rational::to_csv_string;
use cachelab::schemes::{corner_config, simulate_traced};
use cachelab::{DeliveryMode, Error, ExactBound, ExactConfig, Rational};
use serde_json::json;

use crate::args::{
    BoundArgs, CaseStudyArgs, Cli, Command, CurveArgs, DemandsArg, EvalArg, Format, OutputArgs, RateArgs, SimulateArgs,
    SweepArgs, SweepMode, SystemArgs, VerifyArgs,
};

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure {
            message: e.to_string(),
            code: 2,
        }
    }
}

pub fn emit(output: &OutputArgs, text: &str) -> std::io::Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let out = &cli.output;
    match &cli.command {
        Command::Bound(a) => bound(a, out.resolve(Format::Human)),
        Command::Rate(a) => rate(a, out.resolve(Format::Human)),
        Command::Simulate(a) => simulate(a, out.resolve(Format::Human)),
        Command::Sweep(a) => sweep(a, out.resolve(Format::Csv)),
        Command::Curve(a) => curve_cmd(a, out.resolve(Format::Csv)),
        Command::CaseStudy(a) => case_study_cmd(a, out.resolve(Format::Human)),
        Command::Verify(a) => verify_cmd(a, out.resolve(Format::Human)),
    }
}

fn config(system: &SystemArgs, m: &Rational) -> Result<ExactConfig, Failure> {
    make_config(system.n, system.k, system.l, m.clone(), system.mode.into()).map_err(Failure::usage)
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    text
}

fn bound(a: &BoundArgs, format: Format) -> Result<Outcome, Failure> {
    let config = config(&a.system, &a.m)?;
    let mut result: ExactBound = if a.cutset { lb_cutset(&config) } else { lb(&config) }.map_err(Failure::usage)?;
    if !a.terms {
        result.terms.clear();
    }
    let text = match format {
        Format::Json => to_json(&result),
        Format::Csv => {
            let mut s = String::from("s,ell,mu,value\n");
            if a.terms {
                for t in &result.terms {
                    let _ = writeln!(s, "{},{},{},{}", t.s, t.ell, t.mu, to_csv_string(&t.raw_value));
                }
            } else {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    result.best_s,
                    result.best_ell,
                    result.mu_at_best,
                    to_csv_string(&result.value)
                );
            }
            s
        }
        Format::Human => {
            let mut s = format!(
                "value: {}\ns: {}\nell: {}\nmu: {}\n",
                result.value, result.best_s, result.best_ell, result.mu_at_best
            );
            if a.terms {
                s.push_str("terms:\n");
                for t in &result.terms {
                    let _ = writeln!(s, "  s={} ell={} mu={} value={}", t.s, t.ell, t.mu, t.raw_value);
                }
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn rate(a: &RateArgs, format: Format) -> Result<Outcome, Failure> {
    let config = config(&a.system, &a.m)?;
    let eval = match a.eval {
        EvalArg::Envelope => EvalMode::CornerEnvelope,
        EvalArg::Formula => EvalMode::FormulaAtM,
    };
    let value = rate_ach(&config, eval).map_err(Failure::usage)?;
    let text = match format {
        Format::Json => to_json(&json!({ "rate": value.to_string(), "eval": eval })),
        Format::Csv => format!("rate\n{}\n", to_csv_string(&value)),
        Format::Human => format!("rate: {value}\n"),
    };
    Ok(Outcome::ok(text))
}

fn default_seed() -> u64 {
    std::env::var("CACHELAB_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

/// Domain problems (no such corner, too little collective storage) exit 3;
/// failures inside the scheme exit 4; everything else is a usage error.
fn simulation_failure(e: Error) -> Failure {
    let code = match e {
        Error::NotCorner { .. } | Error::InsufficientCollectiveStorage { .. } | Error::Domain(_) => 3,
        Error::DecodeFailure { .. } | Error::PlacementMismatch(_) | Error::FieldTooSmall(_) => 4,
        _ => 2,
    };
    Failure {
        message: e.to_string(),
        code,
    }
}

fn simulate(a: &SimulateArgs, format: Format) -> Result<Outcome, Failure> {
    let s = &a.system;
    let mut config = corner_config(s.n, s.k, s.l, a.t, s.mode.into()).map_err(simulation_failure)?;
    if let Some(bits) = a.file_bits {
        config = config.with_file_bits(bits).map_err(Failure::usage)?;
    }
    let seed = a.seed.unwrap_or_else(default_seed);
    let demands = match a.demands {
        DemandsArg::Worst => worst_case_demands(&config),
        DemandsArg::Random => random_demands(&config, seed),
    };
    let (report, log) = simulate_traced(&config, a.t, &demands, seed).map_err(simulation_failure)?;
    if let Some(path) = &a.trace {
        fs::write(path, to_json(&log)).map_err(Failure::usage)?;
    }
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => format!(
            "mode,t,file_bits,measured_rate,formula_rate,transmissions,decode_ok,rate_match\n{},{},{},{},{},{},{},{}\n",
            report.mode,
            report.t,
            report.file_bits,
            to_csv_string(&report.measured_rate),
            to_csv_string(&report.formula_rate),
            report.transmissions,
            report.all_decoded(),
            report.rate_match
        ),
        Format::Human => {
            let mut out = format!(
                "rate: {}\nformula: {}\nstrategy: {:?}\ntransmissions: {}\nfile bits: {}\ndecode: {}\n",
                report.measured_rate,
                report.formula_rate,
                report.strategy,
                report.transmissions,
                report.file_bits,
                if report.all_decoded() { "all ok" } else { "FAILED" },
            );
            let _ = writeln!(out, "storage: {}", if report.storage_ok { "ok" } else { "FAILED" });
            if let Some(local) = report.locality_ok {
                let _ = writeln!(out, "locality: {}", if local { "ok" } else { "FAILED" });
            }
            if let Some(uniform) = report.uniform_device_load {
                let _ = writeln!(out, "uniform device load: {uniform}");
            }
            out
        }
    };
    let code = if report.passed() { 0 } else { 4 };
    Ok(Outcome { text, code })
}

fn record_csv_line(r: &GapRecord) -> String {
    let opt = |v: &Option<Rational>| v.as_ref().map(to_csv_string).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        r.mode,
        r.n,
        r.k,
        r.l,
        to_csv_string(&r.m),
        to_csv_string(&r.achievable),
        to_csv_string(&r.achievable_formula),
        to_csv_string(&r.lower_bound),
        to_csv_string(&r.cutset),
        opt(&r.gap),
        opt(&r.gap_formula),
        r.regime.name().replace(' ', "_"),
    )
}

fn sweep(a: &SweepArgs, format: Format) -> Result<Outcome, Failure> {
    let grid = SweepGrid {
        n: a.n.0..=a.n.1,
        k: a.k.0..=a.k.1,
        l: a.l.clone(),
        density: a.density,
    };
    let modes: &[DeliveryMode] = match a.mode {
        SweepMode::Cen => &[DeliveryMode::Centralized],
        SweepMode::D2d => &[DeliveryMode::D2D],
        SweepMode::Both => &[DeliveryMode::Centralized, DeliveryMode::D2D],
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(Failure::usage)?;
    let records: Vec<GapRecord> = pool
        .install(|| -> cachelab::Result<Vec<GapRecord>> {
            let mut all = Vec::new();
            for &mode in modes {
                all.extend(sweep_records(&grid, mode)?);
            }
            Ok(all)
        })
        .map_err(Failure::usage)?;
    let summary: SweepSummary = summarize(&records);

    let text = match format {
        Format::Csv => {
            let mut s = String::from(
                "mode,N,K,L,M,achievable,achievable_formula,lower_bound,cutset,gap,gap_formula,regime\n",
            );
            for r in &records {
                s.push_str(&record_csv_line(r));
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(&summary),
        Format::Human => {
            let mut s = format!(
                "records: {}\nmax gap: {} ({:.4})\n",
                summary.records,
                summary.max_gap,
                cachelab::Scalar::as_f64(&summary.max_gap)
            );
            if let Some(arg) = &summary.argmax {
                let _ = writeln!(s, "argmax: {} N={} K={} L={} M={}", arg.mode, arg.n, arg.k, arg.l, arg.m);
            }
            let _ = writeln!(s, "max gap (closed-form rate): {}", summary.max_gap_formula);
            let _ = writeln!(s, "degenerate: {}", summary.degenerate);
            for (name, status) in &summary.theorem_checks {
                let _ = writeln!(s, "{name}: {}", serde_json::to_value(status).unwrap().as_str().unwrap_or("?"));
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn curve_cmd(a: &CurveArgs, format: Format) -> Result<Outcome, Failure> {
    let s = &a.system;
    let data = curve(s.n, s.k, s.l, s.mode.into(), a.points).map_err(Failure::usage)?;
    let text = match format {
        Format::Csv => data.to_csv(),
        Format::Json => to_json(&data),
        Format::Human => {
            let mut out = format!("{} N={} K={} L={}\n", data.mode, data.n, data.k, data.l);
            let _ = writeln!(out, "{:>10} {:>10} {:>10} {:>10} {:>10}", "M", "lb_new", "lb_cutset", "envelope", "formula");
            for r in &data.rows {
                let _ = writeln!(
                    out,
                    "{:>10} {:>10} {:>10} {:>10} {:>10}",
                    r.m.to_string(),
                    r.lb_new.to_string(),
                    r.lb_cutset.to_string(),
                    r.rate_envelope.to_string(),
                    r.rate_formula.to_string()
                );
            }
            out
        }
    };
    Ok(Outcome::ok(text))
}

fn case_study_cmd(a: &CaseStudyArgs, format: Format) -> Result<Outcome, Failure> {
    let presets: Vec<Preset> = match a.preset {
        Some(p) => vec![p],
        None => Preset::ALL.to_vec(),
    };
    let checks: Vec<IdentityCheck> = presets.into_iter().flat_map(case_study).collect();
    let text = match format {
        Format::Json => to_json(&checks),
        Format::Csv => {
            let mut s = String::from("preset,identity,passed\n");
            for c in &checks {
                let _ = writeln!(s, "{},{},{}", c.preset, c.identity, c.passed);
            }
            s
        }
        Format::Human => checks
            .iter()
            .map(|c| match &c.detail {
                Some(d) => format!("{} ({d})\n", c.line()),
                None => format!("{}\n", c.line()),
            })
            .collect(),
    };
    let code = if checks.iter().all(|c| c.passed) { 0 } else { 1 };
    Ok(Outcome { text, code })
}

fn verify_cmd(a: &VerifyArgs, format: Format) -> Result<Outcome, Failure> {
    let level = if a.full { VerifyLevel::Full } else { VerifyLevel::Quick };
    let report = verify(level);
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("check,passed\n");
            for c in &report.checks {
                let _ = writeln!(s, "{},{}", c.name, c.passed);
            }
            s
        }
        Format::Human => {
            let mut s: String = report.checks.iter().map(|c| c.line() + "\n").collect();
            let passed = report.checks.iter().filter(|c| c.passed).count();
            let _ = writeln!(s, "{passed}/{} checks passed", report.checks.len());
            if let Some(first) = report.first_failure() {
                let _ = writeln!(s, "first failure: {}", first.name);
            }
            s
        }
    };
    let code = if report.passed() { 0 } else { 1 };
    Ok(Outcome { text, code })
}
