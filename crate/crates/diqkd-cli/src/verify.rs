//! The `verify` subcommand: run the brute-force oracle and the spectral
//! attack evaluations against the analytic bounds and report deviations.

use diqkd_core::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::Value;

use crate::output::{num, Report, Table};

pub struct VerifyOutcome {
    pub report: Report,
    pub pass: bool,
}

/// Tolerances of the oracle-equivalence contract.
const ORACLE_ABOVE_TOL: f64 = 2e-3;
const ORACLE_BELOW_TOL: f64 = 1e-6;
const SPECTRAL_TOL: f64 = 1e-10;
const BB84_TOL: f64 = 1e-8;

pub fn run(grid_n: usize, cases: usize, seed: u64) -> Result<VerifyOutcome> {
    // deterministic case set: alpha in [0.3, 1.5], s in [2, Q_alpha]
    let mut rng = StdRng::seed_from_u64(seed);
    let inputs: Vec<(f64, f64)> = (0..cases)
        .map(|_| {
            let alpha = rng.gen_range(0.3..1.5);
            let s = rng.gen_range(2.0..BellValue::quantum_bound(alpha));
            (alpha, s)
        })
        .collect();

    let case_rows: Vec<Result<(f64, f64, f64, f64)>> = inputs
        .par_iter()
        .map(|&(alpha, s)| {
            let bound = qubit_correlator_bound(alpha, BellValue(s))?;
            let oracle = oracle_min_correlator(alpha, BellValue(s), grid_n, 5)?;
            Ok((alpha, s, bound, oracle))
        })
        .collect();

    let mut rows: Vec<Vec<Value>> = Vec::with_capacity(cases);
    let mut max_above = 0.0f64;
    let mut max_below = 0.0f64;
    for row in case_rows {
        let (alpha, s, bound, oracle) = row?;
        let dev = oracle - bound;
        max_above = max_above.max(dev);
        max_below = max_below.max(-dev);
        rows.push(vec![
            Value::String("oracle".into()),
            num(alpha),
            num(s),
            num(bound),
            num(oracle),
            num(dev),
        ]);
    }

    // spectral attack vs closed form on a 50 x 50 grid
    let mut spectral_dev = 0.0f64;
    for qi in 0..50 {
        for fi in 0..50 {
            let q = 0.5 * qi as f64 / 49.0;
            let f = fi as f64 / 49.0;
            let d = (attack_entropy_spectral(q, f)? - attack_entropy_closed_form(q, f)?).abs();
            spectral_dev = spectral_dev.max(d);
        }
    }

    // BB84 attack entropy vs bound on a 10 x 10 x 10 grid
    let mut bb84_dev = 0.0f64;
    for qi in 0..10 {
        for zi in 0..10 {
            for xi in 0..10 {
                let q = 0.5 * qi as f64 / 9.0;
                let e_zz = -1.0 + 2.0 * zi as f64 / 9.0;
                let e_xx = -1.0 + 2.0 * xi as f64 / 9.0;
                let st = AttackState::new(e_zz, e_xx)?;
                let d = (bb84_attack_entropy(q, &st)? - bb84_bound(q, e_xx.abs())?).abs();
                bb84_dev = bb84_dev.max(d);
            }
        }
    }

    let pass = max_above <= ORACLE_ABOVE_TOL
        && max_below <= ORACLE_BELOW_TOL
        && spectral_dev <= SPECTRAL_TOL
        && bb84_dev <= BB84_TOL;

    let report = Report {
        command: "verify",
        inputs: vec![
            ("grid_n", Value::from(grid_n as u64)),
            ("cases", Value::from(cases as u64)),
            ("seed", Value::from(seed)),
        ],
        values: vec![
            ("oracle_max_above_bound", num(max_above)),
            ("oracle_max_below_bound", num(max_below)),
            ("oracle_above_tolerance", num(ORACLE_ABOVE_TOL)),
            ("oracle_below_tolerance", num(ORACLE_BELOW_TOL)),
            ("spectral_max_deviation", num(spectral_dev)),
            ("spectral_tolerance", num(SPECTRAL_TOL)),
            ("bb84_attack_max_deviation", num(bb84_dev)),
            ("bb84_tolerance", num(BB84_TOL)),
            ("pass", Value::Bool(pass)),
        ],
        table: Some(Table {
            headers: vec!["check", "alpha", "s", "analytic", "oracle", "deviation"],
            rows,
        }),
    };
    Ok(VerifyOutcome { report, pass })
}
