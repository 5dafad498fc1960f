//! One function per subcommand. Data qubits are 1-based on the command line
//! and 0-based in the library.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use dqc1_lpn::circuits::{build_parity_unitary, BitString};
use dqc1_lpn::infomeasures::{coherence_consumption, quantum_discord};
use dqc1_lpn::lpn::{closed_form_tau, delta_tau, learn as run_learner, step_block};
use dqc1_lpn::noise::{midcircuit_noise_experiment, phase_flip_parity_experiment, probing_state, systematic_error_sweep};
use dqc1_lpn::{rng, Backend, BudgetParams, Dqc1Config, HiddenParityOracle, Observables, Readout};

use crate::args::{
    CoherenceArgs, DiscordArgs, Format, LearnArgs, LearnBackend, NoiseArgs, NoiseMode, OutputArgs, TraceTableArgs,
};
use crate::record::{Cell, RunRecord, Table};
use crate::{CliError, CliResult, Output};

const TAG_RANDOM_S: u64 = 0x5345_4352_4554;
/// Largest register for the dense cross-check column of the trace table.
const TRACE_DENSE_MAX: usize = 6;
const TRACE_ALL_MAX: usize = 8;
const PARITY_ALL_MAX: usize = 10;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn finish<A: Serialize + Clone>(
    command: &str,
    args: &A,
    output: impl Fn(&mut A) -> &mut OutputArgs,
    default_format: Format,
    results: Value,
    table: Table,
) -> CliResult<Output> {
    let mut echo = args.clone();
    let opts = output(&mut echo);
    let format = *opts.format.get_or_insert(default_format);
    let seed = opts.seed;
    let config = serde_json::to_value(&echo).map_err(|e| usage(e.to_string()))?;
    Ok(Output {
        record: RunRecord::new(command, seed, config, results),
        table,
        format,
    })
}

fn parse_bits(text: &str) -> CliResult<BitString> {
    text.parse().map_err(|e: dqc1_lpn::Error| usage(format!("--s {text:?}: {e}")))
}

fn data_index(j: usize, n: usize) -> CliResult<usize> {
    if j == 0 || j > n {
        return Err(usage(format!("--j {j} must lie in 1..={n}")));
    }
    Ok(j - 1)
}

fn observable_name(o: Observables) -> &'static str {
    match o {
        Observables::Both => "both",
        Observables::X => "x",
        Observables::Y => "y",
    }
}

fn bit_list(ks: impl IntoIterator<Item = usize>) -> String {
    let items: Vec<String> = ks.into_iter().map(|k| (k + 1).to_string()).collect();
    if items.is_empty() {
        "none".into()
    } else {
        items.join(" ")
    }
}

pub fn learn(args: &LearnArgs) -> CliResult<Output> {
    let s = match (&args.s, args.random_s) {
        (Some(text), _) => parse_bits(text)?,
        (None, true) => {
            let n = args.n.ok_or_else(|| usage("--random-s needs --n"))?;
            BitString::random(n, &mut rng::stream(args.output.seed, &[TAG_RANDOM_S]))?
        }
        (None, false) => return Err(usage("pass --s <bits> or --random-s")),
    };
    let n = s.len();
    if args.n.is_some_and(|m| m != n) {
        return Err(usage(format!("--n {} does not match the {n}-bit --s", args.n.unwrap_or(0))));
    }
    let backend = match args.backend {
        LearnBackend::Dense => Backend::Dense,
        LearnBackend::Closed | LearnBackend::Sampled => Backend::ClosedForm,
    };
    let readout = match args.backend {
        LearnBackend::Sampled => Readout::Sampled,
        _ => Readout::Exact,
    };
    let cfg = Dqc1Config::new(n, args.alpha)
        .with_p(args.p)
        .with_theta(args.theta)
        .with_backend(backend)
        .with_seed(args.output.seed);
    let budget = BudgetParams {
        epsilon: args.epsilon,
        per_bit_delta: args.per_bit_delta,
        max_queries: args.max_queries,
        queries_override: args.queries,
        ..BudgetParams::new(args.delta, args.alpha, args.p, args.ensemble)
    };
    let mut oracle = HiddenParityOracle::new(s.clone(), cfg, readout)?;
    let outcome = run_learner(&mut oracle, &cfg, &budget)?;

    let mut table = Table::new(vec![
        "j", "observables", "ex", "ey", "se_x", "se_y", "threshold", "queries", "bit",
    ]);
    let mut steps = Vec::with_capacity(n);
    for st in &outcome.steps {
        let e = &st.estimate;
        table.push(vec![
            (st.j + 1).into(),
            observable_name(st.observables).into(),
            e.ex.into(),
            e.ey.into(),
            e.se_x.into(),
            e.se_y.into(),
            st.threshold.into(),
            st.queries.into(),
            u64::from(st.bit).into(),
        ]);
        steps.push(json!({
            "j": st.j + 1,
            "observables": observable_name(st.observables),
            "ex": e.ex,
            "ey": e.ey,
            "se_x": e.se_x,
            "se_y": e.se_y,
            "ensemble_l": e.ensemble_l,
            "queries_q": e.queries_q,
            "threshold": st.threshold,
            "queries": st.queries,
            "bit": u8::from(st.bit),
        }));
    }
    let results = json!({
        "s": s.to_string(),
        "s_hat": outcome.estimate.to_string(),
        "success": outcome.estimate == s,
        "total_queries": outcome.total_queries(),
        "steps": steps,
    });
    let mut echo = args.clone();
    echo.s = Some(s.to_string());
    echo.n = Some(n);
    finish("learn", &echo, |a| &mut a.output, Format::Json, results, table)
}

pub fn trace_table(args: &TraceTableArgs) -> CliResult<Output> {
    let strings: Vec<BitString> = match (&args.s, args.n) {
        (Some(text), n) => {
            let s = parse_bits(text)?;
            if n.is_some_and(|m| m != s.len()) {
                return Err(usage("--n does not match --s"));
            }
            vec![s]
        }
        (None, Some(n)) if (1..=TRACE_ALL_MAX).contains(&n) => BitString::all(n).collect(),
        (None, Some(n)) => {
            return Err(usage(format!(
                "tabulating all strings needs 1 <= n <= {TRACE_ALL_MAX}, got {n}; pass --s"
            )))
        }
        (None, None) => return Err(usage("pass --n or --s")),
    };
    let n = strings[0].len();
    let theta = args.theta;
    let rows: Vec<Vec<Vec<Cell>>> = strings
        .par_iter()
        .map(|s| -> CliResult<Vec<Vec<Cell>>> {
            let mut rows = Vec::new();
            for j in 0..n {
                let prefixes: &[usize] = if j == 0 { &[0] } else { &[0, j] };
                for &prefix in prefixes {
                    let decoupled: Vec<usize> = (0..prefix).collect();
                    let tau = closed_form_tau(s, theta, j, &decoupled)?;
                    let m = (prefix..n).filter(|&k| k != j && s.bit(k)).count();
                    let gap = delta_tau(n, m, theta, j, prefix)?.norm();
                    let dense_err = if n <= TRACE_DENSE_MAX {
                        let corrections: Vec<usize> = decoupled.iter().copied().filter(|&k| s.bit(k)).collect();
                        let block = step_block(n, theta, 0.0, j, &decoupled, &corrections)?.to_operator()?;
                        ((&block * &build_parity_unitary(s)?).normalized_trace() - tau).norm()
                    } else {
                        f64::NAN
                    };
                    rows.push(vec![
                        s.to_string().into(),
                        (j + 1).into(),
                        prefix.into(),
                        tau.re.into(),
                        tau.im.into(),
                        gap.into(),
                        dense_err.into(),
                    ]);
                }
            }
            Ok(rows)
        })
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(vec![
        "s", "j", "decoupled_prefix", "re_tau", "im_tau", "abs_delta_tau", "dense_abs_err",
    ]);
    rows.into_iter().flatten().for_each(|r| table.push(r));
    let results = json!({ "rows": table.to_json() });
    let mut echo = args.clone();
    echo.n = Some(n);
    finish("trace-table", &echo, |a| &mut a.output, Format::Csv, results, table)
}

pub fn discord_sweep(args: &DiscordArgs) -> CliResult<Output> {
    let s = parse_bits(&args.s)?;
    let n = s.len();
    if n > 10 {
        return Err(usage("discord sweeps support at most 10 data qubits"));
    }
    let j = data_index(args.j, n)?;
    let discord = |s: &BitString, alpha: f64, theta: f64| -> CliResult<_> {
        let cfg = Dqc1Config::new(n, alpha).with_theta(theta);
        Ok(quantum_discord(&probing_state(s, &cfg, j)?, 0)?)
    };
    let table = match &args.theta_grid {
        Some(grid) => {
            let (one, zero) = (s.with_bit(j, true), s.with_bit(j, false));
            let rows: Vec<Vec<Cell>> = grid
                .points()
                .par_iter()
                .map(|&theta| {
                    let (d1, d0) = (discord(&one, args.alpha, theta)?, discord(&zero, args.alpha, theta)?);
                    Ok(vec![theta.into(), d1.discord.into(), d0.discord.into(), (d1.discord - d0.discord).into()])
                })
                .collect::<CliResult<_>>()?;
            Table {
                columns: vec!["theta", "discord_sj1", "discord_sj0", "contrast"],
                rows,
            }
        }
        None => {
            let rows: Vec<Vec<Cell>> = args
                .alpha_grid
                .points()
                .par_iter()
                .map(|&alpha| {
                    let d = discord(&s, alpha, args.theta)?;
                    let (polar, azimuth) = d.optimal_measurement;
                    Ok(vec![alpha.into(), d.discord.into(), polar.into(), azimuth.into(), d.iterations.into()])
                })
                .collect::<CliResult<_>>()?;
            Table {
                columns: vec!["alpha", "discord", "polar", "azimuth", "iterations"],
                rows,
            }
        }
    };
    let results = json!({ "rows": table.to_json() });
    finish("discord-sweep", args, |a| &mut a.output, Format::Csv, results, table)
}

fn parse_flip_sets(text: &str, n: usize) -> CliResult<Vec<Vec<usize>>> {
    text.split(';')
        .map(|set| {
            let set = set.trim();
            if set == "none" || set.is_empty() {
                return Ok(Vec::new());
            }
            set.split([',', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| {
                    let k: usize = t.parse().map_err(|_| usage(format!("flip index {t:?} is not an integer")))?;
                    data_index(k, n)
                })
                .collect()
        })
        .collect()
}

pub fn noise_sweep(args: &NoiseArgs) -> CliResult<Output> {
    let s = parse_bits(&args.s)?;
    let n = s.len();
    let j = data_index(args.j.unwrap_or(n), n)?;
    let cfg = Dqc1Config::new(n, args.alpha).with_p(args.p).with_theta(args.theta);
    cfg.validate()?;
    let table = match args.mode {
        NoiseMode::Midq => {
            let rows: Vec<Vec<Cell>> = args
                .q_grid
                .points()
                .par_iter()
                .map(|&q| {
                    let ratio = midcircuit_noise_experiment(&s, &cfg, j, q)?;
                    let deviation = ratio - (1.0 - q);
                    Ok(vec![
                        q.into(),
                        ratio.into(),
                        (1.0 - q).into(),
                        deviation.into(),
                        (deviation.abs() <= 3.0 * q * q).into(),
                    ])
                })
                .collect::<CliResult<_>>()?;
            Table {
                columns: vec!["q", "ratio", "first_order", "deviation", "within_3q2"],
                rows,
            }
        }
        NoiseMode::Parity => {
            let sets = match &args.flips {
                Some(text) => parse_flip_sets(text, n)?,
                None if n <= PARITY_ALL_MAX => (0u32..1 << n)
                    .map(|mask| (0..n).filter(|k| mask >> (n - 1 - k) & 1 == 1).collect())
                    .collect(),
                None => return Err(usage(format!("pass --flips for more than {PARITY_ALL_MAX} qubits"))),
            };
            let rows: Vec<Vec<Cell>> = sets
                .par_iter()
                .map(|set| {
                    let out = phase_flip_parity_experiment(&s, &cfg, j, set)?;
                    let (c, e) = (out.noiseless, out.corrupted);
                    let delta = (e.ex - c.ex).abs().max((e.ey - c.ey).abs());
                    Ok(vec![
                        bit_list(set.iter().copied()).into(),
                        out.coupled_flips.into(),
                        (out.coupled_flips % 2 == 0).into(),
                        c.ex.into(),
                        c.ey.into(),
                        e.ex.into(),
                        e.ey.into(),
                        delta.into(),
                        bit_list(out.flagged.iter().copied()).into(),
                    ])
                })
                .collect::<CliResult<_>>()?;
            Table {
                columns: vec![
                    "flips", "coupled_flips", "even", "ex_clean", "ey_clean", "ex", "ey", "delta", "flagged",
                ],
                rows,
            }
        }
        NoiseMode::Systematic => {
            let sweep = systematic_error_sweep(
                &s,
                j,
                args.theta_error,
                args.phi_grid.points(),
                args.theta_grid.points(),
            )?;
            Table {
                columns: vec![
                    "phi", "theta", "re_tau_dense", "im_tau_dense", "re_tau_predicted", "im_tau_predicted", "agrees",
                ],
                rows: sweep
                    .iter()
                    .map(|r| {
                        vec![
                            r.phi.into(),
                            r.theta.into(),
                            r.tau_dense.0.into(),
                            r.tau_dense.1.into(),
                            r.tau_predicted.0.into(),
                            r.tau_predicted.1.into(),
                            r.agrees.into(),
                        ]
                    })
                    .collect(),
            }
        }
    };
    let results = json!({ "rows": table.to_json() });
    let mut echo = args.clone();
    echo.j = Some(j + 1);
    finish("noise-sweep", &echo, |a| &mut a.output, Format::Csv, results, table)
}

pub fn coherence(args: &CoherenceArgs) -> CliResult<Output> {
    let mut table = Table::new(vec!["alpha", "tau_abs", "delta_c"]);
    for &alpha in args.alpha_grid.points() {
        for &tau in args.tau_grid.points() {
            table.push(vec![alpha.into(), tau.into(), coherence_consumption(alpha, tau)?.into()]);
        }
    }
    let results = json!({ "rows": table.to_json() });
    finish("coherence", args, |a| &mut a.output, Format::Csv, results, table)
}
