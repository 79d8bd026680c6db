//! Acceptance criteria, one line each. Exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};

use cqed_core::experiments::{
    collision_probabilities_closed_form, collision_probabilities_mixture, fit_mixture_weights,
    timing_error_study, validation_point, PhaseMode,
};
use cqed_core::models::vacuum_sector_for;
use cqed_core::{
    analytic_ghz4_evolution, analytic_w_evolution, basis_state, concurrence,
    distillation_probability,
    dynamics::{max_distillation_probability, min_equal_magnitude_gap},
    ghz4_reference_state, make_target, BasisDescriptor, Complex64, Ghz4Frequency, Propagator,
    StateVector, TargetLabel,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn w3_preparation() -> Outcome {
    let psi = analytic_w_evolution(3, 2.0 * PI / 9.0).map_err(|e| e.to_string())?;
    let basis = BasisDescriptor::atoms(3).unwrap();
    let mut amps = nalgebra::DVector::zeros(8);
    let s = 1.0 / 3f64.sqrt();
    amps[0b001] = Complex64::from_polar(s, 2.0 * PI / 3.0);
    amps[0b010] = Complex64::new(s, 0.0);
    amps[0b100] = Complex64::new(s, 0.0);
    let target = StateVector::new(basis, amps).unwrap();
    let f = psi.fidelity(&target).unwrap();
    check(f >= 1.0 - 1e-9, format!("fidelity {f:.15}"))
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 1.0f64;
    for n in 2..=6 {
        let prop = Propagator::new(vacuum_sector_for(n, 1.0).unwrap()).unwrap();
        let start = format!("{}1", "0".repeat(n - 1));
        let psi0 = basis_state(BasisDescriptor::atoms(n).unwrap(), &start, None).unwrap();
        for k in 0..20 {
            let lt = 2.0 * PI * k as f64 / 19.0;
            let f = prop
                .evolve(&psi0, lt)
                .unwrap()
                .fidelity(&analytic_w_evolution(n, lt).unwrap())
                .unwrap();
            worst = worst.min(f);
        }
    }
    check(
        worst >= 1.0 - 1e-9,
        format!("worst fidelity {worst:.15} over n=2..6, 20 points"),
    )
}

fn ghz_class_point() -> Outcome {
    let c = analytic_ghz4_evolution(PI / 3.0, Ghz4Frequency::Corrected);
    let a = c.amplitude_of("0011", None).unwrap().norm();
    let b = c.amplitude_of("1100", None).unwrap().norm();
    let cross = ["1001", "0101", "1010", "0110"]
        .iter()
        .map(|l| c.amplitude_of(l, None).unwrap().norm())
        .fold(0.0, f64::max);
    let printed = analytic_ghz4_evolution(PI / 3.0, Ghz4Frequency::Printed);
    let at_1100 = printed
        .fidelity(&basis_state(BasisDescriptor::atoms(4).unwrap(), "1100", None).unwrap())
        .unwrap();
    let f_printed = printed.fidelity(&ghz4_reference_state()).unwrap();
    check(
        (a - 0.5).abs() < 1e-9
            && (b - 3f64.sqrt() / 2.0).abs() < 1e-9
            && cross < 1e-9
            && (at_1100 - 1.0).abs() < 1e-9
            && (f_printed - 0.75).abs() < 1e-9,
        format!("|0011|={a:.12} |1100|={b:.12} cross={cross:.1e}; printed: F(1100)={at_1100:.12} F(ref)={f_printed:.12}"),
    )
}

fn w_concurrence() -> Outcome {
    let mut worst = 0.0f64;
    for n in 3..=6 {
        let w = make_target(TargetLabel::W, n).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                let c = concurrence(&w.state().partial_trace(&[i, j]).unwrap()).unwrap();
                worst = worst.max((c - 2.0 / n as f64).abs());
            }
        }
    }
    check(
        worst <= 1e-8,
        format!("max |C − 2/n| = {worst:.2e} for n=3..6"),
    )
}

fn distillation() -> Outcome {
    let mut worst = 0.0f64;
    for n in 3..=8 {
        let p = distillation_probability(n, PI / n as f64).unwrap();
        let expect = 4.0 * (n as f64 - 1.0) / (n * n) as f64;
        worst = worst
            .max((p - expect).abs())
            .max((max_distillation_probability(n) - expect).abs());
    }
    let gaps: Vec<f64> = (2..=7)
        .map(|n| min_equal_magnitude_gap(n, 10_000))
        .collect();
    let solvable = gaps[..3].iter().all(|&g| g <= 1e-3);
    let blocked = gaps[3..].iter().all(|&g| g >= 0.09);
    check(
        worst <= 1e-9 && solvable && blocked,
        format!(
            "max |P − 4(n−1)/n²| = {worst:.1e}; equal-magnitude gap n=2..7: {}",
            gaps.iter()
                .map(|g| format!("{g:.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    )
}

fn figure1() -> Outcome {
    let p0 = collision_probabilities_closed_form(0.0);
    let origin = (p0.eg - 1.0).abs() < 1e-12
        && p0.ge.abs() < 1e-12
        && p0.ee.abs() < 1e-12
        && p0.gg.abs() < 1e-12;
    let mut sum_err = 0.0f64;
    for k in 0..1000 {
        let x = 2.0 * PI * k as f64 / 999.0;
        sum_err = sum_err.max((collision_probabilities_closed_form(x).sum() - 1.0).abs());
    }
    let fit = fit_mixture_weights().map_err(|e| e.to_string())?;
    let mut mix_err = 0.0f64;
    for k in 0..1000 {
        let x = 2.0 * PI * k as f64 / 999.0;
        let m = collision_probabilities_mixture(&fit.mixture, x).unwrap();
        mix_err = mix_err.max(m.max_abs_diff(&collision_probabilities_closed_form(x)));
    }
    let w = fit.mixture;
    check(
        origin && sum_err <= 1e-12 && mix_err <= 0.002,
        format!(
            "origin ok={origin}; max |Σ−1|={sum_err:.1e}; weights ({:.4}, {:.4}, {:.4}) max deviation {mix_err:.5}",
            w.w_two_atom, w.w_extra_first, w.w_extra_second
        ),
    )
}

fn timing() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for mode in [PhaseMode::Paper, PhaseMode::Model] {
        let r = timing_error_study(2.0 * PI / 9.0, 0.1, 0.1, mode).map_err(|e| e.to_string())?;
        ok &= (r.fidelity_late - 0.99).abs() <= 0.005 && (r.fidelity_early - 0.99).abs() <= 0.005;
        parts.push(format!(
            "{mode:?}: late {:.5} early {:.5}",
            r.fidelity_late, r.fidelity_early
        ));
    }
    check(ok, parts.join("; "))
}

fn dispersive_validity() -> Outcome {
    let pts: Vec<_> = [10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|&r| validation_point(r, PI / 4.0, 2).unwrap())
        .collect();
    let halves = pts[1].infidelity <= 0.5 * pts[0].infidelity;
    let leak_monotone = pts
        .windows(2)
        .all(|w| w[1].photon_leakage < w[0].photon_leakage);
    check(
        halves && leak_monotone,
        format!(
            "infidelity(10)={:.3e} infidelity(20)={:.3e} halves={halves}; leakage {} monotone={leak_monotone}; dressed infidelity {}",
            pts[0].infidelity,
            pts[1].infidelity,
            pts.iter().map(|p| format!("{:.2e}", p.photon_leakage)).collect::<Vec<_>>().join(" "),
            pts.iter().map(|p| format!("{:.2e}", p.infidelity_dressed)).collect::<Vec<_>>().join(" "),
        ),
    )
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cqed"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}", out.status.code()));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn cli_value(csv: &str, key: &str) -> Result<f64, String> {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .ok_or(format!("{key} missing"))?
        .parse()
        .map_err(|e| format!("{key}: {e}"))
}

fn cli_regression() -> Outcome {
    let fig = run_cli(&[
        "figure1",
        "--start",
        "0",
        "--end",
        "6.283185307179586",
        "--points",
        "200",
    ])?;
    let row0 = fig.lines().nth(1).unwrap_or_default();
    let row_ok = row0 == "0,1.000000,0.000000,0.000000,0.000000";
    let t = run_cli(&[
        "timing",
        "--lambda-t0",
        "0.6981",
        "--fraction",
        "0.1",
        "--phase-mode",
        "paper",
    ])?;
    let late = cli_value(&t, "fidelity_late")?;
    let early = cli_value(&t, "fidelity_early")?;
    let g = run_cli(&["ghz4", "--lambda-t", "1.0472", "--mode", "corrected"])?;
    let a = cli_value(&g, "amp_0011_abs")?;
    let b = cli_value(&g, "amp_1100_abs")?;
    let cross = cli_value(&g, "cross_term_max")?;
    check(
        row_ok
            && (late - 0.99).abs() <= 0.005
            && (early - 0.99).abs() <= 0.005
            && format!("{a:.3}") == "0.500"
            && format!("{b:.3}") == "0.866"
            && format!("{cross:.3}") == "0.000",
        format!("row0 `{row0}`; timing {late} / {early}; ghz4 {a} / {b} / cross {cross}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("W3 preparation", w3_preparation),
        ("oracle equivalence", oracle_equivalence),
        ("GHZ-class point", ghz_class_point),
        ("concurrence of W pairs", w_concurrence),
        ("distillation", distillation),
        ("detection curves", figure1),
        ("timing error", timing),
        ("dispersive validity", dispersive_validity),
        ("CLI regression", cli_regression),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
