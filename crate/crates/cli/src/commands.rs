use std::fs::File;
use std::io::BufWriter;

use cvwitness::exact::{format_f64, QuadraticNumber};
use cvwitness::homodyne::{
    analytic_tprime, augment_with_vacuum, build_network, estimate, sample, write_batch,
    SAMPLER_ALGORITHM,
};
use cvwitness::moments::{
    biseparable_threshold, full_separability_threshold, partition_series, symmetric_sum,
    tilde_series, tilde_symmetric_sum, MomentSeries, Partition, SeriesSource,
};
use cvwitness::oracle::{
    fock_verify_reorder, partition_moment_oracle, quadrature_moment_oracle, reorder_coefficients,
    tilde_moment_oracle, ReorderSpec,
};
use cvwitness::ppt::pt_class1_check;
use cvwitness::reproduce::{run_all, run_criterion, CriterionOutcome};
use cvwitness::states::{covariance_of, GaussianPureState, StateKind};
use cvwitness::witnesses::{classify, epr_moment_bound_check, t1_from_covariance};
use cvwitness::{Error, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::args::{Command, OracleCheck, SeriesKind, Source, StateArgs};
use crate::input::load_state;

pub const SCHEMA_VERSION: &str = "1";

/// A command result: the JSON payload, its CSV mirror and the exit status.
pub struct Output {
    pub json: Value,
    pub csv: Vec<Vec<String>>,
    pub acceptance_failed: bool,
    pub summary: Option<String>,
}

impl Output {
    fn new(json: Value, csv: Vec<Vec<String>>) -> Self {
        Output {
            json,
            csv,
            acceptance_failed: false,
            summary: None,
        }
    }
}

fn rational_decimal(r: &BigRational, digits: usize) -> String {
    QuadraticNumber::from_rational(r.clone()).to_decimal(digits)
}

fn row<const N: usize>(cells: [String; N]) -> Vec<String> {
    cells.to_vec()
}

fn state_json(state: &GaussianPureState, digits: usize) -> Value {
    let matrix = |m: &cvwitness::exact::ExactMatrix3| {
        (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| m.get(i, j).to_decimal(digits))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), json!(state.kind().name()));
    match state.kind() {
        StateKind::Xi { xi } => {
            obj.insert("xi".into(), json!(rational_decimal(xi, digits)));
        }
        StateKind::Ghzw { a } => {
            obj.insert("a".into(), json!(rational_decimal(a, digits)));
        }
        _ => {}
    }
    obj.insert("A".into(), json!(matrix(state.exact_matrix())));
    Value::Object(obj)
}

pub fn run(command: &Command, digits: usize) -> Result<Output> {
    match command {
        Command::State { state } => state_command(state, digits),
        Command::Moments {
            state,
            mmax,
            series,
            tilde,
            source,
        } => moments_command(state, *mmax, *series, *tilde, *source, digits),
        Command::Witness { state, mmax } => witness_command(state, *mmax, digits),
        Command::Ppt { state } => ppt_command(state),
        Command::Simulate {
            state,
            shots,
            seed,
            batch,
        } => simulate_command(state, *shots, *seed, batch.as_deref()),
        Command::Oracle { check } => oracle_command(check),
        Command::Reproduce { criterion } => Ok(reproduce_command(*criterion)),
    }
}

fn state_command(args: &StateArgs, digits: usize) -> Result<Output> {
    let state = load_state(args)?;
    let mut json = state_json(&state, digits);
    let inverse = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| state.exact_inverse().get(i, j).to_decimal(digits))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    let obj = json.as_object_mut().expect("object");
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("A_inverse".into(), json!(inverse));
    obj.insert(
        "condition_number".into(),
        json!(format_f64(state.condition_number())),
    );
    obj.insert("precision".into(), json!(digits));
    let mut csv = vec![row([
        "row".into(),
        "col".into(),
        "A".into(),
        "A_inverse".into(),
    ])];
    for i in 0..3 {
        for j in 0..3 {
            csv.push(row([
                (i + 1).to_string(),
                (j + 1).to_string(),
                state.exact_matrix().get(i, j).to_decimal(digits),
                state.exact_inverse().get(i, j).to_decimal(digits),
            ]));
        }
    }
    Ok(Output::new(json, csv))
}

fn partition_of(kind: SeriesKind) -> Option<Partition> {
    match kind {
        SeriesKind::Sum => None,
        SeriesKind::P1 => Some(Partition::new(1).expect("valid")),
        SeriesKind::P2 => Some(Partition::new(2).expect("valid")),
        SeriesKind::P3 => Some(Partition::new(3).expect("valid")),
    }
}

fn oracle_series(
    state: &GaussianPureState,
    partition: Option<Partition>,
    mmax: usize,
    tilde: bool,
    source: Source,
) -> Result<MomentSeries> {
    let one = |p: Partition, m: usize| match (source, tilde) {
        (Source::Wick, false) => partition_moment_oracle(state, p, m),
        (Source::Wick, true) => tilde_moment_oracle(state, p, m),
        (Source::Quadrature, false) => quadrature_moment_oracle(state, p, m),
        (Source::Quadrature, true) => Err(Error::Domain(
            "the quadrature oracle covers the untilded moments only".into(),
        )),
        (Source::ClosedForm, _) => unreachable!("closed form handled by the caller"),
    };
    let mut values = vec![1.0];
    for m in 1..=mmax {
        let v = match partition {
            Some(p) => one(p, m)?,
            None => {
                let mut total = 0.0;
                for p in Partition::ALL {
                    total += one(p, m)?;
                }
                total / 3.0
            }
        };
        values.push(v);
    }
    let tag = match source {
        Source::Wick => SeriesSource::WickOracle,
        _ => SeriesSource::QuadratureOracle,
    };
    MomentSeries::from_f64(values, tag)
}

fn moments_command(
    args: &StateArgs,
    mmax: usize,
    kind: SeriesKind,
    tilde: bool,
    source: Source,
    digits: usize,
) -> Result<Output> {
    let state = load_state(args)?;
    let partition = partition_of(kind);
    let series = match (source, partition, tilde) {
        (Source::ClosedForm, None, false) => symmetric_sum(&state, mmax)?,
        (Source::ClosedForm, None, true) => tilde_symmetric_sum(&state, mmax)?,
        (Source::ClosedForm, Some(p), false) => partition_series(&state, p, mmax)?,
        (Source::ClosedForm, Some(p), true) => tilde_series(&state, p, mmax)?,
        _ => oracle_series(&state, partition, mmax, tilde, source)?,
    };
    let decimals = series.decimal_strings(digits);
    let rationals = series.rational_strings();
    let mut csv = vec![row([
        "m".into(),
        "value_decimal".into(),
        "value_rational".into(),
    ])];
    let values: Vec<Value> = (0..=mmax)
        .map(|m| {
            let rational = rationals.as_ref().map(|r| r[m].clone());
            csv.push(row([
                m.to_string(),
                decimals[m].clone(),
                rational.clone().unwrap_or_default(),
            ]));
            let mut entry = json!({"m": m, "value_decimal": decimals[m]});
            if let Some(r) = rational {
                entry["value_rational"] = json!(r);
            }
            entry
        })
        .collect();
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "state": state_json(&state, digits),
        "series": match partition { Some(p) => p.label(), None => "sum" },
        "tilde": tilde,
        "source": series.source().name(),
        "arithmetic_mode": series.mode().name(),
        "precision": digits,
        "values": values,
    });
    Ok(Output::new(json, csv))
}

fn witness_command(args: &StateArgs, mmax: usize, digits: usize) -> Result<Output> {
    let state = load_state(args)?;
    let series = symmetric_sum(&state, mmax)?;
    let report = classify(&series)?;
    let decimals = series.decimal_strings(digits);
    let mut csv = vec![row([
        "m".into(),
        "value".into(),
        "full_sep_threshold".into(),
        "bisep_threshold".into(),
        "verdict".into(),
    ])];
    let per_m: Vec<Value> = report
        .per_m
        .iter()
        .map(|o| {
            let full = rational_decimal(&full_separability_threshold(o.m), digits);
            let bisep = rational_decimal(&biseparable_threshold(o.m), digits);
            csv.push(row([
                o.m.to_string(),
                decimals[o.m].clone(),
                full.clone(),
                bisep.clone(),
                o.verdict.name().into(),
            ]));
            json!({
                "m": o.m,
                "value": decimals[o.m],
                "full_sep_threshold": full,
                "bisep_threshold": bisep,
                "universal_floor": "1",
                "verdict": o.verdict.name(),
                "full_sep_margin": format_f64(o.full_sep_margin),
                "bisep_margin": format_f64(o.bisep_margin),
                "unphysical": o.unphysical,
            })
        })
        .collect();
    let t = t1_from_covariance(&covariance_of(&state))?;
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "state": state_json(&state, digits),
        "precision": digits,
        "guard_band": format_f64(report.guard_band),
        "per_m": per_m,
        "overall": report.overall.name(),
        "unphysical_input": report.unphysical_input,
        "quadrature_witness": {
            "t1": format_f64(t.t1),
            "components": t.components.iter().map(|&c| format_f64(c)).collect::<Vec<_>>(),
            "first_order_moment": format_f64(t.first_order_moment()),
            "thresholds": ["9", "5", "3"],
            "verdict": t.verdict.name(),
        },
    });
    Ok(Output::new(json, csv))
}

fn ppt_command(args: &StateArgs) -> Result<Output> {
    let state = load_state(args)?;
    let report = pt_class1_check(&covariance_of(&state))?;
    let mut csv = vec![row([
        "partition".into(),
        "negative".into(),
        "min_eigenvalue".into(),
        "leading_minor".into(),
    ])];
    let partitions: Vec<Value> = report
        .partitions
        .iter()
        .map(|p| {
            let label = Partition::ALL[p.mode].label();
            csv.push(row([
                label.into(),
                p.negative.to_string(),
                format_f64(p.min_eigenvalue),
                format_f64(p.leading_minor),
            ]));
            json!({
                "partition": label,
                "negative": p.negative,
                "min_eigenvalue": format_f64(p.min_eigenvalue),
                "leading_minor": format_f64(p.leading_minor),
                "drop_one_minors": p.drop_one_minors.iter().map(|&v| format_f64(v)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "state": state_json(&state, 17),
        "physical": report.physicality.physical,
        "min_eigenvalue": format_f64(report.physicality.min_eigenvalue),
        "partitions": partitions,
        "class1": report.class1,
    });
    Ok(Output::new(json, csv))
}

fn simulate_command(
    args: &StateArgs,
    shots: usize,
    seed: u64,
    batch_path: Option<&std::path::Path>,
) -> Result<Output> {
    let state = load_state(args)?;
    let network = build_network();
    let gamma = augment_with_vacuum(&covariance_of(&state))?;
    let analytic = analytic_tprime(&gamma, &network)?;
    let batch = sample(&gamma, &network, shots, seed)?;
    if let Some(path) = batch_path {
        let file = File::create(path)
            .map_err(|e| Error::Resource(format!("creating {}: {e}", path.display())))?;
        write_batch(&batch, BufWriter::new(file))?;
    }
    let report = estimate(&batch, Some(analytic))?;
    let z = report.z_score().unwrap_or(f64::NAN);
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "state": state_json(&state, 17),
        "shots": shots,
        "seed": seed,
        "algorithm": SAMPLER_ALGORITHM,
        "analytic_t_prime": format_f64(analytic),
        "t_prime_estimate": format_f64(report.t_prime_estimate),
        "std_error": format_f64(report.std_error),
        "z_score": format_f64(z),
        "statistic": format_f64(report.t_prime_estimate - 3.0 + 3.0 * report.std_error),
        "thresholds": ["9", "5", "3"],
        "verdict": report.verdict.name(),
    });
    let csv = vec![
        row(["quantity".into(), "value".into()]),
        row(["analytic_t_prime".into(), format_f64(analytic)]),
        row([
            "t_prime_estimate".into(),
            format_f64(report.t_prime_estimate),
        ]),
        row(["std_error".into(), format_f64(report.std_error)]),
        row(["verdict".into(), report.verdict.name().into()]),
    ];
    Ok(Output::new(json, csv))
}

fn oracle_command(check: &OracleCheck) -> Result<Output> {
    match check {
        OracleCheck::Moments { state, mmax } => {
            let state = load_state(state)?;
            let mut csv = vec![row([
                "partition".into(),
                "m".into(),
                "closed_form".into(),
                "wick".into(),
                "quadrature".into(),
            ])];
            let mut entries = Vec::new();
            let mut worst = 0.0f64;
            for p in Partition::ALL {
                let closed = partition_series(&state, p, *mmax)?;
                for m in 1..=*mmax {
                    let c = closed.value(m);
                    let wick = if m <= 8 {
                        Some(partition_moment_oracle(&state, p, m)?)
                    } else {
                        None
                    };
                    let quad = quadrature_moment_oracle(&state, p, m)?;
                    worst = worst.max((quad - c).abs() / c);
                    if let Some(w) = wick {
                        worst = worst.max((w - c).abs() / c);
                    }
                    let wick_text = wick.map(format_f64).unwrap_or_default();
                    csv.push(row([
                        p.label().into(),
                        m.to_string(),
                        format_f64(c),
                        wick_text.clone(),
                        format_f64(quad),
                    ]));
                    entries.push(json!({
                        "partition": p.label(),
                        "m": m,
                        "closed_form": format_f64(c),
                        "wick": wick.map(format_f64),
                        "quadrature": format_f64(quad),
                    }));
                }
            }
            if worst > 1e-8 {
                return Err(Error::Consistency(format!(
                    "oracles disagree with the closed form by {worst:e} (relative)"
                )));
            }
            let json = json!({
                "schema_version": SCHEMA_VERSION,
                "state": state_json(&state, 17),
                "max_relative_difference": format_f64(worst),
                "tolerance": "1e-8",
                "entries": entries,
            });
            Ok(Output::new(json, csv))
        }
        OracleCheck::Reorder { n, m, dim } => {
            let spec = ReorderSpec {
                n: *n,
                m: *m,
                c: Complex64::ONE,
            };
            let verified = fock_verify_reorder(&spec, *dim)?;
            let terms = reorder_coefficients(&spec);
            let mut csv = vec![row(["k".into(), "integer_factor".into()])];
            for t in &terms {
                csv.push(row([t.k.to_string(), t.integer_factor.to_string()]));
            }
            let json = json!({
                "schema_version": SCHEMA_VERSION,
                "n": n,
                "m": m,
                "dim": dim,
                "terms": terms.iter().map(|t| json!({"k": t.k, "integer_factor": t.integer_factor.to_string()})).collect::<Vec<_>>(),
                "verified": verified,
            });
            if !verified {
                return Err(Error::Consistency(
                    "reordering identity failed on Fock matrices".into(),
                ));
            }
            Ok(Output::new(json, csv))
        }
        OracleCheck::Epr { n, r } => {
            let c = epr_moment_bound_check(*n, *r)?;
            let json = json!({
                "schema_version": SCHEMA_VERSION,
                "n": n,
                "r": format_f64(*r),
                "value": format_f64(c.value),
                "bound": format_f64(c.bound),
                "closed_form": format_f64(c.closed_form),
                "violated": c.violated,
            });
            let csv = vec![
                row([
                    "n".into(),
                    "r".into(),
                    "value".into(),
                    "bound".into(),
                    "violated".into(),
                ]),
                row([
                    n.to_string(),
                    format_f64(*r),
                    format_f64(c.value),
                    format_f64(c.bound),
                    c.violated.to_string(),
                ]),
            ];
            Ok(Output::new(json, csv))
        }
    }
}

fn reproduce_command(criterion: Option<u8>) -> Output {
    let outcomes: Vec<CriterionOutcome> = match criterion {
        Some(id) => vec![run_criterion(id)],
        None => run_all(),
    };
    let mut csv = vec![row([
        "criterion".into(),
        "check".into(),
        "quoted".into(),
        "computed".into(),
        "tolerance".into(),
        "pass".into(),
    ])];
    let mut summary = String::new();
    let criteria: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            summary.push_str(&format!(
                "criterion {:>2} {}: {}\n",
                o.id,
                if o.pass() { "PASS" } else { "FAIL" },
                o.title
            ));
            let checks: Vec<Value> = o
                .checks
                .iter()
                .map(|c| {
                    csv.push(row([
                        o.id.to_string(),
                        c.label.clone(),
                        c.quoted.clone(),
                        c.computed.clone(),
                        c.tolerance.clone(),
                        c.pass.to_string(),
                    ]));
                    json!({
                        "check": c.label,
                        "quoted": c.quoted,
                        "computed": c.computed,
                        "tolerance": c.tolerance,
                        "pass": c.pass,
                    })
                })
                .collect();
            json!({"id": o.id, "title": o.title, "pass": o.pass(), "checks": checks})
        })
        .collect();
    let pass = outcomes.iter().all(CriterionOutcome::pass);
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "criteria": criteria,
        "pass": pass,
    });
    Output {
        json,
        csv,
        acceptance_failed: !pass,
        summary: Some(summary),
    }
}
