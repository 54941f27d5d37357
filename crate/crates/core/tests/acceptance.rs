//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints its PASS/FAIL line; exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cinf_rbf::interp::bench::{run_bench, BenchConfig};
use cinf_rbf::interp::{
    assemble, cholesky, distance, evaluate, fit_detailed, min_eig_estimate, FitOptions, KernelKind,
    PointSet,
};
use cinf_rbf::kernel::{phi, phi_sqrt_deriv, KernelParams};
use cinf_rbf::positivity::{check_dimension, find_alpha_min, Method, Verdict};
use cinf_rbf::rational::{int, parse_rational, to_f64};
use cinf_rbf::sympoly::{f_seed, f_sequence, leading_term, printed, term_diff};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    PointSet::from_flat(d, (0..n * d).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

fn printed_forms() -> Outcome {
    let fs = f_sequence(3);
    let ok = fs[0] == f_seed() && fs[1] == printed::f2() && fs[2] == printed::f3();
    let factored = fs[2] == printed::f3_factored();
    outcome(
        ok && factored,
        format!(
            "F_1..F_3 equal the printed forms exactly: {}",
            ok && factored
        ),
    )
}

fn f4_consistency() -> Outcome {
    let f4 = f_sequence(4).pop().unwrap();
    let mut worst = 0.0f64;
    for i in 0..10 {
        let t = 0.05 + 0.75 * i as f64 / 9.0;
        for alpha in [2.0, 3.0] {
            let exact = phi_sqrt_deriv(t, alpha, 4, &f4).unwrap();
            let fd = common::fd_phi_sqrt_deriv(t, alpha, 4);
            worst = worst.max(((fd - exact) / exact).abs());
        }
    }
    let diff = term_diff(&f4, &printed::f4());
    let g = term_diff(
        &printed::at_integer_alpha(&f4, 2),
        &printed::g_at_two_times_denominator(),
    );
    outcome(
        worst <= 1e-5,
        format!(
            "worst relative error {worst:.2e} over 20 (t, alpha) pairs; term diff vs printed F_4: {} terms, vs printed G(2,u): {} terms",
            diff.len(),
            g.len()
        ),
    )
}

fn example_reproduction() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for d in 1..=4 {
        let r = check_dimension(&int(2), d).unwrap();
        let exact = r
            .certificates
            .iter()
            .all(|c| c.method == Method::SturmExact);
        ok &= r.strictly_pd && exact;
        parts.push(format!("d={d}: {}", r.strictly_pd));
    }
    outcome(
        ok,
        format!(
            "alpha = 2 strictly_pd with Sturm certificates: {}",
            parts.join(", ")
        ),
    )
}

fn refutation() -> Outcome {
    let alpha = parse_rational("1/2").unwrap();
    let r = check_dimension(&alpha, 1).unwrap();
    let Some(c) = r.counterexample() else {
        return outcome(false, "no counterexample returned");
    };
    let Verdict::Counterexample { u_star, value } = &c.verdict else {
        unreachable!()
    };
    let f2 = &f_sequence(2)[1];
    let again = f2.eval_rational(&alpha, u_star);
    let ok = c.j == 2 && again.is_negative() && &again == value && !r.strictly_pd;
    outcome(
        ok,
        format!("j = {}, F_2(1/2, {u_star}) = {again} (stored {value})", c.j),
    )
}

fn structure_law() -> Outcome {
    let fs = f_sequence(8);
    let mut ok = true;
    let mut coeffs = Vec::new();
    for (k, fj) in fs.iter().enumerate() {
        let j = k as u32 + 1;
        let lead = leading_term(fj).unwrap();
        ok &= fj.degree_alpha() == Some(j - 1)
            && fj.degree_u() == Some(3 * (j - 1) + 1)
            && lead.a_j.is_positive();
        coeffs.push(lead.a_j.to_string());
    }
    outcome(
        ok,
        format!(
            "degrees (j-1, 3j-2) for j = 1..8; a_j = {}",
            coeffs.join(", ")
        ),
    )
}

fn alpha_bracketing() -> Outcome {
    let tol = parse_rational("1e-3").unwrap();
    let oracle = common::one_dimensional_alpha_bound();
    let one = find_alpha_min(1, &tol).unwrap();
    let four = find_alpha_min(4, &tol).unwrap();
    let (lo, hi) = (to_f64(&one.lo), to_f64(&one.hi));
    let ok = lo <= oracle && oracle <= hi && four.hi <= int(2) && one.width() <= tol;
    outcome(
        ok,
        format!(
            "d=1 bracket [{lo:.6}, {hi:.6}] vs oracle {oracle:.9}; d=4 bracket [{:.6}, {:.6}]",
            to_f64(&four.lo),
            to_f64(&four.hi)
        ),
    )
}

fn pd_witness() -> Outcome {
    let params = KernelParams::new(2.0, 0.4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2, 3, 4] {
        let mut good = 0;
        let mut worst_pivot = None;
        let mut min_eig = f64::INFINITY;
        for _ in 0..20 {
            let pts = random_points(&mut rng, 100, d);
            let a = assemble(&pts, &params).unwrap();
            let dense = a.to_dense();
            let symmetric = (0..100).all(|i| (0..100).all(|j| dense[i][j] == dense[j][i]));
            match cholesky(&a) {
                Ok(f) => {
                    let l = min_eig_estimate(&a, &f, 300).unwrap();
                    min_eig = min_eig.min(l);
                    if symmetric && l > 0.0 {
                        good += 1;
                    }
                }
                Err(e) => worst_pivot = Some(worst_pivot.map_or(e.value, |w: f64| w.min(e.value))),
            }
        }
        ok &= good == 20;
        parts.push(match worst_pivot {
            None => format!("d={d}: 20/20 (min eig {min_eig:.3e})"),
            Some(p) => format!("d={d}: {good}/20 (most negative pivot {p:.3e})"),
        });
    }
    outcome(ok, parts.join("; "))
}

fn interpolation_conditions() -> Outcome {
    let params = KernelParams::new(2.0, 0.4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts = random_points(&mut rng, 200, 2);
    let f: Vec<f64> = pts
        .iter()
        .map(|x| (std::f64::consts::PI * x[0]).sin() * (std::f64::consts::PI * x[1]).cos())
        .collect();
    let f_inf = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match fit_detailed(&pts, &f, &params, FitOptions::default()) {
        Ok(fitted) => {
            let s = evaluate(&fitted.model, &pts).unwrap();
            let worst = s
                .iter()
                .zip(&f)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            outcome(
                worst <= 1e-8 * (1.0 + f_inf),
                format!(
                    "max center residual {worst:.3e}, solver residual {:.3e}",
                    fitted.report.residual_inf
                ),
            )
        }
        Err(e) => outcome(false, format!("fit failed: {e}")),
    }
}

/// O(n²) pair enumeration with the same distance and profile evaluation.
fn brute_force(pts: &PointSet, params: &KernelParams) -> Vec<Vec<Option<f64>>> {
    let n = pts.len();
    (0..n)
        .map(|i| {
            (0..=i)
                .map(|j| {
                    let dist = distance(pts.point(i), pts.point(j));
                    (dist < params.delta())
                        .then(|| phi(dist / params.delta(), params.alpha()).unwrap().value)
                })
                .collect()
        })
        .collect()
}

fn sparsity_oracle() -> Outcome {
    let params = KernelParams::new(2.0, 0.4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut identical = 0;
    for _ in 0..10 {
        let pts = random_points(&mut rng, 500, 3);
        let a = assemble(&pts, &params).unwrap();
        let b = brute_force(&pts, &params);
        let mut same = true;
        for (i, row) in b.iter().enumerate() {
            for (j, expect) in row.iter().enumerate() {
                same &= a.get(i, j).map(f64::to_bits) == expect.map(f64::to_bits);
            }
        }
        if same {
            identical += 1;
        }
    }
    outcome(
        identical == 10,
        format!("{identical}/10 sets bit-identical (pattern and values)"),
    )
}

fn convergence_trend() -> Outcome {
    let config = BenchConfig::default();
    let table = run_bench(&config).unwrap();
    let errors = table.max_errors(KernelKind::Phi);
    let failures: Vec<String> = table
        .rows_for(KernelKind::Phi)
        .filter_map(|r| {
            r.error
                .as_ref()
                .map(|e| format!("level {} (n={}): {e}", r.level, r.n))
        })
        .collect();
    let ok = errors.len() == 4 && errors.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
    let mut detail = format!("phi max errors [{}]", shown.join(", "));
    if !failures.is_empty() {
        detail.push_str(&format!("; {}", failures.join("; ")));
    }
    let wendland: Vec<String> = table
        .max_errors(KernelKind::WendlandC2)
        .iter()
        .map(|e| format!("{e:.3e}"))
        .collect();
    detail.push_str(&format!("; wendland_c2 [{}]", wendland.join(", ")));
    outcome(ok, detail)
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "printed-form reproduction",
            printed_forms,
            Duration::from_secs(1),
        ),
        ("F_4 consistency", f4_consistency, Duration::from_secs(5)),
        (
            "example reproduction",
            example_reproduction,
            Duration::from_secs(60),
        ),
        ("refutation sanity", refutation, Duration::from_secs(5)),
        ("structure law", structure_law, Duration::from_secs(10)),
        (
            "minimal-alpha bracketing",
            alpha_bracketing,
            Duration::from_secs(120),
        ),
        ("PD witness", pd_witness, Duration::from_secs(60)),
        (
            "interpolation conditions",
            interpolation_conditions,
            Duration::from_secs(10),
        ),
        ("sparsity oracle", sparsity_oracle, Duration::from_secs(30)),
        (
            "convergence trend",
            convergence_trend,
            Duration::from_secs(60),
        ),
    ];
    let mut failed = Vec::new();
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| outcome(false, "panicked"));
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= *limit;
        println!(
            "criterion {:>2} {}: {name}: {} [{:.2} s, limit {} s]",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
