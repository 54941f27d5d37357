//! The subcommands.

use serde_json::json;

use cinf_rbf::interp::bench::{run_bench, BenchConfig, Target};
use cinf_rbf::interp::{
    default_delta, evaluate, fit_detailed, io, min_eig_estimate, FitOptions, InterpError,
    KernelKind,
};
use cinf_rbf::positivity::{
    check_dimension, find_alpha_min, prescreen_dimension, DimensionReport, PositivityError, Verdict,
};
use cinf_rbf::rational::{parse_rational, to_f64};
use cinf_rbf::sympoly::{f_sequence, leading_term};
use cinf_rbf::KernelParams;

use crate::report::{sig, table, Timings};
use crate::{
    AlphaMinArgs, BenchArgs, CliError, DeriveArgs, InterpArgs, Outcome, Status, VerifyArgs,
};

/// Neighbour count targeted by the default support radius.
const DEFAULT_NEIGHBOURS: f64 = 30.0;
const MIN_EIG_ITERS: usize = 300;

fn positivity_error(e: PositivityError) -> CliError {
    match e {
        PositivityError::Domain(m) => CliError::Input(m),
        other => CliError::Other(other.to_string()),
    }
}

fn interp_error(e: InterpError) -> CliError {
    match e {
        InterpError::NotPositiveDefinite(_) => CliError::NotPositiveDefinite(format!(
            "{e}; the Gram matrix of these centers is indefinite for the chosen parameters. \
             Try a larger --alpha or a smaller --delta (see also `cinf-rbf verify`)"
        )),
        InterpError::Io(_) => CliError::Other(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(value).map_err(|e| CliError::Other(e.to_string()))
}

pub fn derive(args: &DeriveArgs, timings: &mut Timings) -> Result<Outcome, CliError> {
    let j = args.order;
    if j == 0 || j > args.max_order {
        return Err(CliError::Input(format!(
            "order must lie in 1..={}, got {j}",
            args.max_order
        )));
    }
    let fj = timings
        .time("derive", || f_sequence(j as usize))
        .pop()
        .expect("nonempty sequence");
    let text = fj.to_string();
    let mut human = format!("{text}\n");
    let mut outputs = json!({ "j": j, "polynomial": text, "terms": fj.len() });
    if args.expand {
        let lead = leading_term(&fj).map_err(|e| CliError::Other(e.to_string()))?;
        human.push_str(&format!(
            "terms: {}\ndegrees: alpha {}, u {}\nleading: {}\n",
            fj.len(),
            lead.deg_alpha,
            lead.deg_u,
            lead
        ));
        outputs["degree_alpha"] = json!(lead.deg_alpha);
        outputs["degree_u"] = json!(lead.deg_u);
        outputs["leading"] = json!({
            "a_j": lead.a_j.to_string(),
            "deg_alpha": lead.deg_alpha,
            "deg_u": lead.deg_u,
            "text": lead.to_string(),
        });
    }
    Ok(Outcome {
        outputs,
        human,
        data: None,
        status: Status::Ok,
    })
}

fn verdict_cells(v: &Verdict) -> (String, String) {
    match v {
        Verdict::ProvenNonnegative => ("nonnegative".into(), String::new()),
        Verdict::Counterexample { u_star, value } => (
            "COUNTEREXAMPLE".into(),
            format!("F({}) = {} < 0", u_star, sig(to_f64(value))),
        ),
        Verdict::Unrefuted {
            min_sampled,
            argmin,
        } => (
            "unrefuted".into(),
            format!("min {} at u = {}", sig(*min_sampled), sig(*argmin)),
        ),
    }
}

fn report_table(report: &DimensionReport) -> String {
    let rows: Vec<Vec<String>> = report
        .certificates
        .iter()
        .map(|c| {
            let (verdict, detail) = verdict_cells(&c.verdict);
            vec![
                c.j.to_string(),
                verdict,
                c.sturm_root_count.map_or("-".into(), |n| n.to_string()),
                sig(c.elapsed.as_secs_f64() * 1e3),
                detail,
            ]
        })
        .collect();
    table(&["j", "verdict", "roots", "ms", "detail"], &rows)
}

pub fn verify(args: &VerifyArgs, timings: &mut Timings) -> Result<Outcome, CliError> {
    let alpha = parse_rational(&args.alpha).map_err(|e| CliError::Input(e.to_string()))?;
    let report = if args.rigorous {
        timings.time("certify", || check_dimension(&alpha, args.dim))
    } else {
        timings.time("prescreen", || {
            prescreen_dimension(&alpha, args.dim, args.u_max, args.samples)
        })
    }
    .map_err(positivity_error)?;

    let mut human = if args.rigorous {
        format!(
            "alpha = {alpha}, d = {}, l = {}: exact Sturm certification\n",
            report.d, report.l
        )
    } else {
        format!(
            "alpha = {alpha}, d = {}, l = {}: grid prescreen on [0, {}] with {} samples (not a proof)\n",
            report.d,
            report.l,
            sig(args.u_max),
            args.samples
        )
    };
    human.push_str(&report_table(&report));
    let status = match report.counterexample() {
        Some(c) => {
            human.push_str(&format!("sign condition refuted at j = {}\n", c.j));
            Status::Refuted
        }
        None if report.strictly_pd => {
            human.push_str("strictly_pd = true: all sign conditions proven\n");
            Status::Ok
        }
        None => {
            human.push_str("no negative sample found; rerun with --rigorous for a certificate\n");
            Status::Ok
        }
    };
    let mut outputs = to_json(&report)?;
    outputs["rigorous"] = json!(args.rigorous);
    Ok(Outcome {
        outputs,
        human,
        data: None,
        status,
    })
}

pub fn alpha_min(args: &AlphaMinArgs, timings: &mut Timings) -> Result<Outcome, CliError> {
    let tol = parse_rational(&args.tol).map_err(|e| CliError::Input(e.to_string()))?;
    let interval = timings
        .time("search", || find_alpha_min(args.dim, &tol))
        .map_err(positivity_error)?;
    let human = format!(
        "d = {}: the sign conditions first hold for alpha in [lo, hi]\n  lo = {} ({}), refuted at j = {}\n  hi = {} ({}), certified\n  width = {}, probes = {}\n",
        interval.d,
        interval.lo,
        sig(to_f64(&interval.lo)),
        interval.lo_witness.j,
        interval.hi,
        sig(to_f64(&interval.hi)),
        sig(to_f64(&interval.width())),
        interval.probes
    );
    let mut outputs = to_json(&interval)?;
    outputs["lo_f64"] = json!(to_f64(&interval.lo));
    outputs["hi_f64"] = json!(to_f64(&interval.hi));
    Ok(Outcome {
        outputs,
        human,
        data: None,
        status: Status::Ok,
    })
}

fn values_csv(values: &[f64]) -> String {
    let mut out = String::from("value\n");
    for v in values {
        out.push_str(&format!("{v:?}\n"));
    }
    out
}

pub fn interp(args: &InterpArgs, timings: &mut Timings) -> Result<Outcome, CliError> {
    let alpha_exact = parse_rational(&args.alpha).map_err(|e| CliError::Input(e.to_string()))?;
    let alpha = to_f64(&alpha_exact);
    let (pts, values) = timings
        .time("read", || -> Result<_, InterpError> {
            Ok((
                io::read_points(&args.points, 1)?,
                io::read_values(&args.values)?,
            ))
        })
        .map_err(interp_error)?;
    if pts.is_empty() {
        return Err(CliError::Input(format!(
            "{} contains no points",
            args.points.display()
        )));
    }
    let delta = match args.delta {
        Some(d) => d,
        None => default_delta(&pts, DEFAULT_NEIGHBOURS).map_err(interp_error)?,
    };
    let params = KernelParams::new(alpha, delta).map_err(|e| CliError::Input(e.to_string()))?;

    let certificate = if args.certify {
        Some(
            timings
                .time("certify", || check_dimension(&alpha_exact, pts.dim()))
                .map_err(positivity_error)?,
        )
    } else {
        None
    };
    let options = FitOptions {
        kernel: KernelKind::Phi,
        certificate: certificate.as_ref(),
    };
    let fitted = timings
        .time("fit", || fit_detailed(&pts, &values, &params, options))
        .map_err(interp_error)?;

    let queries = match &args.query {
        Some(path) => timings
            .time("read", || io::read_points(path, pts.dim()))
            .map_err(interp_error)?,
        None => pts.clone(),
    };
    let predicted = timings
        .time("evaluate", || evaluate(&fitted.model, &queries))
        .map_err(interp_error)?;
    let min_eig = if args.min_eig {
        Some(
            timings
                .time("min_eig", || {
                    min_eig_estimate(&fitted.matrix, &fitted.factor, MIN_EIG_ITERS)
                })
                .map_err(interp_error)?,
        )
    } else {
        None
    };

    timings
        .time("write", || -> Result<(), InterpError> {
            if let Some(out) = &args.out {
                io::write_values(out, &predicted)?;
            }
            if let Some(path) = &args.model_out {
                io::write_model(path, &fitted.model)?;
            }
            Ok(())
        })
        .map_err(interp_error)?;

    let r = &fitted.report;
    let mut human = format!(
        "fitted {} centers in d = {} (alpha = {}, delta = {})\n  nnz = {} (density {}), {} factor\n  residual = {}{}\n  evaluated {} queries\n",
        r.n,
        pts.dim(),
        sig(alpha),
        sig(delta),
        r.nnz,
        sig(r.density),
        r.factor,
        sig(r.residual_inf),
        if r.refined { " after one refinement step" } else { "" },
        predicted.len()
    );
    if let Some(l) = min_eig {
        human.push_str(&format!("  min eigenvalue estimate = {}\n", sig(l)));
    }
    for w in &r.warnings {
        human.push_str(&format!("warning: {w}\n"));
    }

    let mut outputs = json!({
        "n": r.n,
        "d": pts.dim(),
        "alpha": alpha,
        "delta": delta,
        "nnz": r.nnz,
        "density": r.density,
        "factor": r.factor,
        "residual_inf": r.residual_inf,
        "refined": r.refined,
        "warnings": r.warnings,
        "min_eig": min_eig,
        "queries": predicted.len(),
    });
    if let Some(report) = &certificate {
        outputs["certificate"] = to_json(report)?;
    }
    let data = if args.out.is_none() {
        outputs["predictions"] = json!(predicted);
        Some(values_csv(&predicted))
    } else {
        None
    };
    Ok(Outcome {
        outputs,
        human,
        data,
        status: Status::Ok,
    })
}

pub fn bench(args: &BenchArgs, timings: &mut Timings) -> Result<Outcome, CliError> {
    let target: Target = args
        .target
        .parse()
        .map_err(|e: InterpError| CliError::Input(e.to_string()))?;
    let config = BenchConfig {
        dim: args.dim,
        alpha: args.alpha,
        delta: args.delta,
        levels: args.levels,
        base: args.base,
        target,
        seed: args.seed,
        test_points: args.test_points,
        ..BenchConfig::default()
    };
    let result = timings
        .time("bench", || run_bench(&config))
        .map_err(interp_error)?;

    let rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|r| {
            vec![
                r.kernel.name().to_string(),
                r.level.to_string(),
                r.n.to_string(),
                sig(r.fill_distance),
                sig(r.max_error),
                sig(r.rms_error),
                sig(r.cond_estimate),
                sig(r.nnz_fraction),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let mut human = table(
        &[
            "kernel", "level", "n", "fill", "max_err", "rms_err", "cond", "nnz_frac", "note",
        ],
        &rows,
    );
    let phi_errors = result.max_errors(KernelKind::Phi);
    let decreasing = phi_errors.windows(2).all(|w| w[1] < w[0]);
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    human.push_str(&format!(
        "phi max error strictly decreasing: {decreasing}\nfailed fits: {failed}\n"
    ));

    let csv = result.to_csv();
    if let Some(out) = &args.out {
        timings
            .time("write", || std::fs::write(out, &csv))
            .map_err(|e| CliError::Other(format!("{}: {e}", out.display())))?;
    }
    let mut outputs = to_json(&result)?;
    outputs["phi_max_error_strictly_decreasing"] = json!(decreasing);
    outputs["failed_fits"] = json!(failed);
    let status = if failed > 0 {
        Status::NotPositiveDefinite
    } else {
        Status::Ok
    };
    let data = args.out.is_none().then_some(csv);
    Ok(Outcome {
        outputs,
        human,
        data,
        status,
    })
}
