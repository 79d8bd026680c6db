mod report;
mod svg;

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cqed_core::entanglement::w_class_fidelity;
use cqed_core::experiments::{
    dispersive_validation_sweep, distill_scan_series, figure1_series, linspace, timing_error_study,
    CollisionMixture, PhaseMode,
};
use cqed_core::{
    analytic_ghz4_evolution, analytic_w_evolution, distillation_probability, fidelity_to,
    ghz4_reference_state, make_target, measure_atom, BasisDescriptor, Ghz4Frequency, StateVector,
    TargetLabel,
};
use serde::Serialize;
use serde_json::json;

use report::{Record, Report};

const PROPERTY_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cqed",
    version,
    about = "Dispersive cavity-QED state preparation studies"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Recorded in the run configuration; all computations are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GhzMode {
    Corrected,
    Printed,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PhaseArg {
    Paper,
    Model,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Evolve |0…01⟩ into the W class and distill by measuring the last atom.
    WState {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=12))]
        n: u64,
        #[arg(long, allow_negative_numbers = true)]
        lambda_t: f64,
    },
    /// Four-atom evolution from |0011⟩.
    Ghz4 {
        #[arg(long, allow_negative_numbers = true, default_value_t = PI / 3.0)]
        lambda_t: f64,
        #[arg(long, value_enum, default_value_t = GhzMode::Corrected)]
        mode: GhzMode,
    },
    /// Two-atom detection probabilities over a λt grid.
    Figure1 {
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        start: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 2.0 * PI)]
        end: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Add the three-channel mixture model as `mix_*` columns.
        #[arg(long)]
        mixture: bool,
        /// Mixture weights: two-atom, extra-first, extra-second.
        #[arg(long, value_delimiter = ',', num_args = 3, requires = "mixture")]
        weights: Option<Vec<f64>>,
    },
    /// Fidelity of W₃ under late-entry and early-exit timing errors.
    Timing {
        #[arg(long, default_value_t = 2.0 * PI / 9.0)]
        lambda_t0: f64,
        #[arg(long, default_value_t = 0.1)]
        fraction: f64,
        /// Early-exit fraction; defaults to `--fraction`.
        #[arg(long)]
        fraction_early: Option<f64>,
        #[arg(long, value_enum, default_value_t = PhaseArg::Paper)]
        phase_mode: PhaseArg,
    },
    /// Full versus effective model across detuning ratios δ/g.
    Validate {
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 20.0, 40.0, 80.0])]
        ratios: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = PI / 4.0)]
        lambda_t: f64,
    },
    /// Distillation probability over a λt grid.
    DistillScan {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        start: f64,
        /// Defaults to 2π/n.
        #[arg(long, allow_negative_numbers = true)]
        end: Option<f64>,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
}

fn amplitude_rows(
    rec: &mut Record,
    prefix: &str,
    psi: &StateVector,
    labels: &[String],
) -> Result<()> {
    for label in labels {
        let a = psi.amplitude_of(label, None)?;
        rec.num(format!("{prefix}{label}_abs"), a.norm())
            .num(format!("{prefix}{label}_re"), a.re)
            .num(format!("{prefix}{label}_im"), a.im);
    }
    Ok(())
}

fn weight_one_labels(n: usize) -> Result<Vec<String>> {
    let basis = BasisDescriptor::atoms(n)?;
    Ok((0..n).rev().map(|k| basis.bits_label(1 << k)).collect())
}

fn w_state(n: usize, lambda_t: f64) -> Result<Record> {
    let psi = analytic_w_evolution(n, lambda_t)?;
    let mut rec = Record::default();
    rec.text("n", n.to_string()).num("lambda_t", lambda_t);
    amplitude_rows(&mut rec, "amp_", &psi, &weight_one_labels(n)?)?;
    rec.num(
        "fidelity_w",
        fidelity_to(&psi, &make_target(TargetLabel::W, n)?)?,
    )
    .num("fidelity_w_phase_adjusted", w_class_fidelity(&psi)?);
    if n >= 3 {
        rec.num(
            "distillation_probability",
            distillation_probability(n, lambda_t)?,
        );
        match measure_atom(&psi, n - 1, 0) {
            Ok(m) => {
                rec.num("measured_probability", m.probability);
                amplitude_rows(&mut rec, "post_", &m.post_state, &weight_one_labels(n - 1)?)?;
                rec.num(
                    "post_fidelity_w",
                    fidelity_to(&m.post_state, &make_target(TargetLabel::W, n - 1)?)?,
                );
            }
            Err(cqed_core::Error::ZeroProbability { .. }) => {
                rec.num("measured_probability", 0.0);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rec)
}

fn ghz4(lambda_t: f64, mode: GhzMode) -> Result<Record> {
    let freq = match mode {
        GhzMode::Corrected => Ghz4Frequency::Corrected,
        GhzMode::Printed => Ghz4Frequency::Printed,
    };
    let psi = analytic_ghz4_evolution(lambda_t, freq);
    let mut rec = Record::default();
    rec.num("lambda_t", lambda_t).text(
        "mode",
        match mode {
            GhzMode::Corrected => "corrected",
            GhzMode::Printed => "printed",
        },
    );
    let labels: Vec<String> = ["0011", "1100", "1001", "0101", "1010", "0110"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    amplitude_rows(&mut rec, "amp_", &psi, &labels)?;
    let cross = labels[2..]
        .iter()
        .map(|l| psi.amplitude_of(l, None).map(|a| a.norm()))
        .collect::<cqed_core::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rec.num("cross_term_max", cross).num(
        "fidelity_to_reference",
        psi.fidelity(&ghz4_reference_state())?,
    );
    Ok(rec)
}

fn timing(
    lambda_t0: f64,
    fraction: f64,
    fraction_early: Option<f64>,
    mode: PhaseArg,
) -> Result<Record> {
    let phase_mode = match mode {
        PhaseArg::Paper => PhaseMode::Paper,
        PhaseArg::Model => PhaseMode::Model,
    };
    let r = timing_error_study(
        lambda_t0,
        fraction,
        fraction_early.unwrap_or(fraction),
        phase_mode,
    )?;
    let mut rec = Record::default();
    rec.num("lambda_t0", r.lambda_t0)
        .num("fraction_late", r.fraction_late)
        .num("fraction_early", r.fraction_early)
        .text(
            "phase_mode",
            match mode {
                PhaseArg::Paper => "paper",
                PhaseArg::Model => "model",
            },
        )
        .num("fidelity_late", r.fidelity_late)
        .num("fidelity_early", r.fidelity_early);
    Ok(rec)
}

/// Failures of the dispersive-limit property: infidelity must at least
/// halve whenever the ratio doubles, and leakage must fall with the ratio.
fn validation_failures(ratios: &[f64], infidelity: &[f64], leakage: &[f64]) -> Vec<String> {
    let mut failures = Vec::new();
    for (i, &r) in ratios.iter().enumerate() {
        if let Some(j) = ratios.iter().position(|&s| (s - 2.0 * r).abs() < 1e-12) {
            if infidelity[j] > 0.5 * infidelity[i] {
                failures.push(format!(
                    "infidelity at ratio {} ({:.3e}) exceeds half of ratio {} ({:.3e})",
                    ratios[j], infidelity[j], r, infidelity[i]
                ));
            }
        }
    }
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| ratios[a].total_cmp(&ratios[b]));
    for w in order.windows(2) {
        if leakage[w[1]] >= leakage[w[0]] {
            failures.push(format!(
                "photon leakage not decreasing from ratio {} to {}",
                ratios[w[0]], ratios[w[1]]
            ));
        }
    }
    failures
}

fn emit(cli: &Cli, report: &Report, svg: Option<String>) -> Result<()> {
    let sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match cli.format {
        Format::Csv => report.write_csv(&mut sink)?,
        Format::Json => {
            let config = json!({
                "command": &cli.command,
                "format": cli.format,
                "out": cli.out.as_ref().map(|p| p.display().to_string()),
                "seed": cli.seed,
            });
            serde_json::to_writer_pretty(&mut sink, &report.to_json(config))?;
            writeln!(sink)?;
        }
        Format::Svg => match svg {
            Some(doc) => sink.write_all(doc.as_bytes())?,
            None => bail!("svg output is only available for figure1"),
        },
    }
    sink.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    if cli.format == Format::Svg && !matches!(cli.command, Command::Figure1 { .. }) {
        bail!("svg output is only available for figure1");
    }
    let mut status = 0;
    let (report, svg) = match &cli.command {
        Command::WState { n, lambda_t } => (Report::Record(w_state(*n as usize, *lambda_t)?), None),
        Command::Ghz4 { lambda_t, mode } => (Report::Record(ghz4(*lambda_t, *mode)?), None),
        Command::Figure1 {
            start,
            end,
            points,
            mixture,
            weights,
        } => {
            let grid = linspace(*start, *end, *points)?;
            let mix = match (mixture, weights) {
                (false, _) => None,
                (true, Some(w)) => Some(CollisionMixture::new(w[0], w[1], w[2])?),
                (true, None) => Some(CollisionMixture::default()),
            };
            let series = figure1_series(&grid, mix.as_ref())?;
            let svg = (cli.format == Format::Svg).then(|| svg::render_figure1(&series));
            (Report::Series(series), svg)
        }
        Command::Timing {
            lambda_t0,
            fraction,
            fraction_early,
            phase_mode,
        } => (
            Report::Record(timing(*lambda_t0, *fraction, *fraction_early, *phase_mode)?),
            None,
        ),
        Command::Validate {
            ratios,
            n,
            lambda_t,
        } => {
            let series = dispersive_validation_sweep(ratios, *lambda_t, *n)?;
            let failures = validation_failures(
                ratios,
                series.column("infidelity").expect("infidelity column"),
                series.column("photon_leakage").expect("leakage column"),
            );
            for f in &failures {
                eprintln!("property failed: {f}");
            }
            if !failures.is_empty() {
                status = PROPERTY_FAILED;
            }
            (Report::Series(series), None)
        }
        Command::DistillScan {
            n,
            start,
            end,
            points,
        } => {
            if *n < 3 {
                bail!("distill-scan needs n >= 3, got {n}");
            }
            let end = end.unwrap_or(2.0 * PI / *n as f64);
            let grid = linspace(*start, end, *points)?;
            (Report::Series(distill_scan_series(*n, &grid)?), None)
        }
    };
    emit(cli, &report, svg)?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
