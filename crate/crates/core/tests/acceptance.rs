//! Acceptance runner: one pass/fail line per criterion.
//!
//! `cargo test --test acceptance` runs all nine; `cargo test --test acceptance -- 3 5`
//! runs a subset. The scaling sample is shared between criteria 4 and 8.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use common::dense::*;
use common::ensemble::{four_state_check, multiplicity_check, pair_law_check};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};
use qsearch_core::harness::{
    fit_records, run_experiment, soluble_cost_tables, write_records_csv, BoyerMode, ExperimentConfig, Method, Record,
    SampleSpec, Sweep,
};
use qsearch_core::meanfield::{integrate_s, integrate_z, predicted_rate, Density, Grid, SModelVariant};
use qsearch_core::nelder_mead::NelderMeadConfig;
use qsearch_core::optimizer::{optimize_sample, ObjectiveKind, SampleObjective, ScheduleFamily};
use qsearch_core::rng::{stream, Purpose};
use qsearch_core::sat::{generate_instance, CostTable, EnsembleParams};
use qsearch_core::schedule::{linear_schedule, LinearForm, PhaseSchedule, Schedule, ScheduleFile};
use qsearch_core::sim::{run_trial, StateVector, TrialOptions};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn paper(j: usize) -> Schedule {
    Schedule::Phased(linear_schedule(&LinearForm::PAPER, j).unwrap())
}

// ---------------------------------------------------------------------------

fn aa_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let n = 8 + (i % 9) as usize;
        let table = soluble_cost_tables(&SampleSpec::paper(n, 1, 500 + i)).map_err(err)?.remove(0);
        let theta = ((table.solution_count() as f64) / (n as f64).exp2()).sqrt().asin();
        let mut psi = StateVector::uniform(n).map_err(err)?;
        for j in 0..=40 {
            let want = ((2 * j + 1) as f64 * theta).sin().powi(2);
            worst = worst.max((psi.solution_probability(&table).map_err(err)? - want).abs());
            psi.invert_solutions(&table).map_err(err)?;
            psi.apply_diffusion();
        }
    }
    check(worst <= 1e-10, format!("20 instances, n 8..16, j 0..40, max error {worst:.1e}"))
}

/// Matrix of a fast operator, column by column from basis states.
fn fast_matrix(n: usize, op: impl Fn(&mut StateVector)) -> Dense {
    let len = 1usize << n;
    let mut cols = Vec::with_capacity(len);
    for s in 0..len {
        let mut e = vec![c(0.0); len];
        e[s] = c(1.0);
        let mut psi = StateVector::from_amplitudes(e).unwrap();
        op(&mut psi);
        cols.push(psi.amplitudes().to_vec());
    }
    (0..len).map(|r| (0..len).map(|s| cols[s][r]).collect()).collect()
}

fn operators() -> Outcome {
    let (mut op_err, mut unit_err, mut inv_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut rng = stream(0xacce_0002, Purpose::Sampling);
    for n in 1..=8usize {
        let tau = 0.29;
        let mixing = fast_matrix(n, |p| p.apply_mixing(tau));
        op_err = op_err.max(max_matrix_diff(&mixing, &dense_mixing(n, tau)));
        unit_err = unit_err.max(unitarity_error(&mixing));
        let walsh = fast_matrix(n, |p| p.fast_walsh());
        op_err = op_err.max(max_matrix_diff(&walsh, &walsh_matrix(n)));
        unit_err = unit_err.max(unitarity_error(&walsh));
        let diffusion = fast_matrix(n, |p| p.apply_diffusion());
        op_err = op_err.max(max_matrix_diff(&diffusion, &dense_diffusion(n)));
        unit_err = unit_err.max(unitarity_error(&diffusion));

        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
        let mut psi = StateVector::from_amplitudes(amps.clone()).map_err(err)?;
        psi.fast_walsh();
        psi.fast_walsh();
        inv_err = inv_err.max(max_diff(psi.amplitudes(), &amps));

        if n >= 3 {
            let table = costs(n, 4 * n, 40 + n as u64);
            let rho = 0.37;
            let phase = fast_matrix(n, |p| p.apply_cost_phase(&table, rho).unwrap());
            op_err = op_err.max(max_matrix_diff(&phase, &dense_phase(&table, rho)));
            unit_err = unit_err.max(unitarity_error(&phase));
            let step = fast_matrix(n, |p| {
                p.apply_cost_phase(&table, rho).unwrap();
                p.apply_mixing(tau);
            });
            let dense_step = matmul(&dense_mixing(n, tau), &dense_phase(&table, rho));
            op_err = op_err.max(max_matrix_diff(&step, &dense_step));
            let flip: Vec<Complex64> = table.costs().iter().map(|&k| c(if k == 0 { -1.0 } else { 1.0 })).collect();
            let aa = fast_matrix(n, |p| {
                p.invert_solutions(&table).unwrap();
                p.apply_diffusion();
            });
            op_err = op_err.max(max_matrix_diff(&aa, &matmul(&dense_diffusion(n), &diag(flip))));
            unit_err = unit_err.max(unitarity_error(&aa));
        }
    }
    let worst = op_err.max(unit_err).max(inv_err);
    check(
        worst <= 1e-12,
        format!("n 1..8: operator {op_err:.1e}, unitarity {unit_err:.1e}, Walsh involution {inv_err:.1e}"),
    )
}

fn mean_field() -> Outcome {
    let density = Density::new(3, 4.25).map_err(err)?;
    let z = integrate_z(&LinearForm::PAPER, &density, &Grid::default()).map_err(err)?;
    let z1 = z.last().unwrap().z.norm();
    let s = integrate_s(&LinearForm::PAPER, &density, &Grid::default(), SModelVariant::Consistent).map_err(err)?;
    let r1 = s.last().unwrap().r;
    let rate = predicted_rate(r1, &density);
    check(
        z1 <= 0.05 && (r1 - 0.399).abs() <= 0.002 && (rate - 0.0957).abs() <= 0.0005,
        format!("|Z(1)| = {z1:.4}, r(1) = {r1:.6}, rate = {rate:.6}"),
    )
}

fn scaling_records() -> &'static Result<Vec<Record>, String> {
    static RECORDS: OnceLock<Result<Vec<Record>, String>> = OnceLock::new();
    RECORDS.get_or_init(|| {
        let mut cfg = ExperimentConfig::new(
            vec![Method::Quantum, Method::AaKnownS, Method::AaBoyer, Method::Gsat],
            Sweep::Range { from: 12, to: 20, step: 2 },
            200,
            1,
        );
        cfg.boyer = BoyerMode::Expected;
        run_experiment(&cfg).map_err(err)
    })
}

fn scaling() -> Outcome {
    let records = scaling_records().as_ref().map_err(Clone::clone)?;
    let fits = fit_records(records, 0.95).map_err(err)?;
    let rate = |m: Method| {
        fits.iter()
            .find(|f| f.method == m)
            .and_then(|f| f.fit.as_ref())
            .map(|f| f.rate)
            .unwrap_or(f64::NAN)
    };
    let (q, aa) = (rate(Method::Quantum), rate(Method::AaKnownS));
    let mut ratios = Vec::new();
    for b in records.iter().filter(|r| r.method == Method::AaBoyer) {
        let known = records
            .iter()
            .find(|r| r.method == Method::AaKnownS && r.n == b.n && r.seed == b.seed)
            .ok_or("missing known-S record")?;
        ratios.push(b.cost / known.cost);
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let counted = records.iter().filter(|r| r.method == Method::Quantum && r.ok()).count();
    check(
        (q - 0.10).abs() <= 0.03 && (aa - 0.30).abs() <= 0.03 && lo > 1.0 && hi < 2.2 && counted == 1000,
        format!("{counted} soluble instances; quantum rate {q:.4}, aa-known-s rate {aa:.4}, boyer/known-S in [{lo:.3}, {hi:.3}]"),
    )
}

fn behavior_shift() -> Outcome {
    let table = soluble_cost_tables(&SampleSpec::paper(20, 1, 1)).map_err(err)?.remove(0);
    let opts = TrialOptions {
        histograms: true,
        ..Default::default()
    };
    let (_, res) = run_trial(&table, &paper(20), opts).map_err(err)?;
    let peaks: Vec<usize> = res.histograms.iter().map(|h| h.peak()).collect();
    let backtracks: usize = peaks.windows(2).map(|w| w[1].saturating_sub(w[0])).sum();
    check(
        backtracks <= 1 && res.psoln >= 0.1,
        format!("peaks {peaks:?}, {backtracks} bin(s) backtracked, Psoln {:.3}", res.psoln),
    )
}

fn ensemble() -> Outcome {
    let pair = pair_law_check(EnsembleParams::new(12, 3, 51).map_err(err)?, 3, 200_000, 0xacce_0006)?;
    let mut rng = stream(0xacce_0060, Purpose::Sampling);
    let states: [u64; 4] = std::array::from_fn(|_| rng.gen::<u64>() & 0x3ff);
    let four = four_state_check(EnsembleParams::new(10, 3, 20).map_err(err)?, states, 2_000_000, 0xacce_0061)?;
    let overlaps = multiplicity_check(6)?;
    Ok(format!(
        "P(c|C,d): {pair} cells within 4 sigma; four-state: {four} cells within 4 sigma; N(W) exact for {overlaps} overlaps"
    ))
}

fn improved_schedule() -> Outcome {
    let train = soluble_cost_tables(&SampleSpec::paper(16, 50, 7)).map_err(err)?;
    let test = soluble_cost_tables(&SampleSpec {
        partition: 1,
        ..SampleSpec::paper(16, 200, 7)
    })
    .map_err(err)?;
    let baseline = SampleObjective::new(
        ObjectiveKind::MedianCost,
        ScheduleFamily::new(ScheduleFile::paper(), true, 0),
        &test,
    )
    .and_then(|o| o.evaluate(&LinearForm::PAPER.to_vec()))
    .map_err(err)?;
    let mut file = ScheduleFile::paper();
    file.sublinear_scale = Some(7.0);
    let family = ScheduleFamily::new(file, false, 2);
    let objective = SampleObjective::new(ObjectiveKind::MedianCost, family.clone(), &train).map_err(err)?;
    let cfg = NelderMeadConfig {
        max_evals: 300,
        step: 0.2,
        ..NelderMeadConfig::default()
    };
    let best = optimize_sample(&objective, &cfg).map_err(err)?;
    let held = SampleObjective::new(ObjectiveKind::MedianCost, family, &test)
        .and_then(|o| o.evaluate(&best.x))
        .map_err(err)?;
    check(
        held < baseline,
        format!(
            "j = {}, train {:.2} -> {:.2}; held-out median {held:.2} vs paper form {baseline:.2}",
            objective.steps(),
            best.initial_value,
            best.value
        ),
    )
}

fn gsat_ordering() -> Outcome {
    let records = scaling_records().as_ref().map_err(Clone::clone)?;
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [12, 16, 20] {
        let med = |m: Method| median(records.iter().filter(|r| r.method == m && r.n == n).map(|r| r.cost).collect());
        let (g, q) = (med(Method::Gsat), med(Method::Quantum));
        ok &= g >= q;
        parts.push(format!("n={n}: gsat {g:.1} vs quantum {q:.1}"));
    }
    check(ok, parts.join(", "))
}

fn schedule_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..6).prop_flat_map(|j| {
        (
            prop::collection::vec(-3.0f64..3.0, j),
            prop::collection::vec(-0.9f64..0.9, j),
        )
    })
}

fn trial(table: &CostTable, rho: Vec<f64>, tau: Vec<f64>) -> (StateVector, f64) {
    let sched = Schedule::Phased(PhaseSchedule::custom(rho, tau).unwrap());
    let (psi, res) = run_trial(table, &sched, TrialOptions::default()).unwrap();
    (psi, res.psoln)
}

fn fail<T: std::fmt::Debug>(name: &'static str) -> impl Fn(TestError<T>) -> String {
    move |e| format!("{name}: {e}")
}

fn properties() -> Outcome {
    let runner = || TestRunner::new_with_rng(Config { failure_persistence: None, ..Config::with_cases(48) }, TestRng::deterministic_rng(RngAlgorithm::ChaCha));

    runner()
        .run(&(schedule_strategy(), 0u64..1000), |((rho, tau), seed)| {
            let (psi, _) = trial(&costs(9, 38, seed), rho, tau);
            prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
            Ok(())
        })
        .map_err(fail("norm"))?;
    runner()
        .run(&(schedule_strategy(), -2i32..3, 0u64..1000), |((rho, tau), shift, seed)| {
            let table = costs(8, 34, seed);
            let shifted = |v: &[f64], k: f64| v.iter().map(|x| x + 2.0 * k).collect::<Vec<_>>();
            let (a, _) = trial(&table, rho.clone(), tau.clone());
            let (b, _) = trial(&table, shifted(&rho, shift as f64), shifted(&tau, -shift as f64));
            prop_assert!(max_diff(a.amplitudes(), b.amplitudes()) < 1e-10);
            Ok(())
        })
        .map_err(fail("phase mod 2"))?;
    runner()
        .run(&(schedule_strategy(), 0u64..1000), |((rho, tau), seed)| {
            let table = costs(8, 34, seed);
            let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
            let (a, pa) = trial(&table, rho.clone(), tau.clone());
            let (b, pb) = trial(&table, neg(&rho), neg(&tau));
            let conj: Vec<Complex64> = a.amplitudes().iter().map(|z| z.conj()).collect();
            prop_assert!(max_diff(&conj, b.amplitudes()) < 1e-12);
            prop_assert!((pa - pb).abs() < 1e-12);
            Ok(())
        })
        .map_err(fail("conjugation"))?;
    runner()
        .run(&(3usize..30, 0usize..130, any::<u64>()), |(n, m, seed)| {
            let params = EnsembleParams::new(n, 3, m).unwrap();
            prop_assert_eq!(generate_instance(params, seed), generate_instance(params, seed));
            Ok(())
        })
        .map_err(fail("generation"))?;

    let mut cfg = ExperimentConfig::new(
        vec![Method::Quantum, Method::Gsat, Method::AaBoyer],
        Sweep::List(vec![8, 9]),
        12,
        11,
    );
    cfg.boyer = BoyerMode::Sampled;
    let csv_with = |threads: usize| -> Result<Vec<u8>, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
        let records = pool.install(|| run_experiment(&cfg)).map_err(err)?;
        let mut out = Vec::new();
        write_records_csv(&mut out, &records).map_err(err)?;
        Ok(out)
    };
    let (one, many) = (csv_with(1)?, csv_with(4)?);
    check(
        one == many,
        "norm, phase mod 2, conjugation, generation (48 cases each); records identical on 1 and 4 threads".into(),
    )
}

// ---------------------------------------------------------------------------

const CRITERIA: [(u8, &str, fn() -> Outcome); 9] = [
    (1, "AA closed form", aa_closed_form),
    (2, "operator correctness", operators),
    (3, "mean-field regressions", mean_field),
    (4, "scaling", scaling),
    (5, "behavior shift", behavior_shift),
    (6, "ensemble statistics", ensemble),
    (7, "improved schedule", improved_schedule),
    (8, "GSAT ordering", gsat_ordering),
    (9, "property suites", properties),
];

fn main() {
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let picked: Vec<u8> = args.iter().filter_map(|a| a.parse().ok()).collect();
    // A plain name filter from `cargo test <filter>` that is not ours: run nothing.
    if !args.is_empty() && picked.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let mut failed = 0;
    for (id, name, run) in CRITERIA {
        if !picked.is_empty() && !picked.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} {name}: PASS ({secs:.0}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} {name}: FAIL ({secs:.0}s) {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
