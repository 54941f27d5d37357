//! Convergence benchmark on nested uniform grids of the unit cube.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    condition_estimate, evaluate, fill_distance, fit_detailed, BoxDomain, FitOptions, InterpError,
    KernelKind, PointSet,
};
use crate::kernel::KernelParams;

/// Smooth test functions on `[0, 1]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `sin(π x_1) · Π_{k>1} cos(π x_k)`
    #[default]
    SinCos,
    /// Franke's function in the first two coordinates.
    Franke,
    /// `exp(−‖x − c‖² / 0.1)` centred in the cube.
    Gaussian,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::SinCos, Target::Franke, Target::Gaussian];

    pub fn name(self) -> &'static str {
        match self {
            Target::SinCos => "sincos",
            Target::Franke => "franke",
            Target::Gaussian => "gaussian",
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Target::SinCos => {
                (PI * x[0]).sin() * x[1..].iter().map(|c| (PI * c).cos()).product::<f64>()
            }
            Target::Franke => {
                let (x, y) = (x[0], x.get(1).copied().unwrap_or(0.5));
                let sq = |v: f64| v * v;
                0.75 * (-sq(9.0 * x - 2.0) / 4.0 - sq(9.0 * y - 2.0) / 4.0).exp()
                    + 0.75 * (-sq(9.0 * x + 1.0) / 49.0 - (9.0 * y + 1.0) / 10.0).exp()
                    + 0.5 * (-sq(9.0 * x - 7.0) / 4.0 - sq(9.0 * y - 3.0) / 4.0).exp()
                    - 0.2 * (-sq(9.0 * x - 4.0) - sq(9.0 * y - 7.0)).exp()
            }
            Target::Gaussian => (-x.iter().map(|c| (c - 0.5) * (c - 0.5)).sum::<f64>() / 0.1).exp(),
        }
    }
}

impl FromStr for Target {
    type Err = InterpError;
    fn from_str(s: &str) -> Result<Self, InterpError> {
        Target::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| InterpError::UnknownTarget(s.to_string()))
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub dim: usize,
    pub alpha: f64,
    pub delta: f64,
    pub levels: usize,
    /// Level `k` has `(base − 1)·2^k + 1` points per axis; `base = 1` starts
    /// from the single centre point.
    pub base: usize,
    pub target: Target,
    pub seed: u64,
    /// Random points at which errors are measured.
    pub test_points: usize,
    /// Iterations of the eigenvalue estimates.
    pub eig_iters: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            alpha: 2.0,
            delta: 0.4,
            levels: 4,
            base: 3,
            target: Target::SinCos,
            seed: 0,
            test_points: 2000,
            eig_iters: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub kernel: KernelKind,
    pub level: usize,
    pub n: usize,
    pub fill_distance: f64,
    pub max_error: f64,
    pub rms_error: f64,
    pub cond_estimate: f64,
    pub nnz_fraction: f64,
    /// Failure message when the fit could not be computed.
    pub error: Option<String>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn rows_for(&self, kernel: KernelKind) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(move |r| r.kernel == kernel)
    }

    pub fn max_errors(&self, kernel: KernelKind) -> Vec<f64> {
        self.rows_for(kernel).map(|r| r.max_error).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "kernel,level,n,fill_distance,max_error,rms_error,cond_estimate,nnz_fraction\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:?},{:?},{:?},{:?},{:?}\n",
                r.kernel.name(),
                r.level,
                r.n,
                r.fill_distance,
                r.max_error,
                r.rms_error,
                r.cond_estimate,
                r.nnz_fraction
            ));
        }
        out
    }
}

/// Points per axis at refinement level `k`.
pub fn points_per_axis(base: usize, level: usize) -> usize {
    match (base, level) {
        (0 | 1, 0) => 1,
        (0 | 1, k) => (1 << k) + 1,
        (b, k) => (b - 1) * (1 << k) + 1,
    }
}

/// Tensor grid with `m` points per axis on `[0, 1]^d` (the centre when
/// `m = 1`).
pub fn uniform_grid(d: usize, m: usize) -> Result<PointSet, InterpError> {
    if m == 0 {
        return Err(InterpError::Empty);
    }
    let axis: Vec<f64> = if m == 1 {
        vec![0.5]
    } else {
        (0..m).map(|i| i as f64 / (m - 1) as f64).collect()
    };
    let total = m
        .checked_pow(d as u32)
        .ok_or_else(|| InterpError::Domain("grid too large".into()))?;
    let mut coords = Vec::with_capacity(total * d);
    for mut idx in 0..total {
        for _ in 0..d {
            coords.push(axis[idx % m]);
            idx /= m;
        }
    }
    PointSet::from_flat(d, coords)
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchTable, InterpError> {
    if config.levels < 2 {
        return Err(InterpError::Domain(
            "at least two levels are required".into(),
        ));
    }
    if config.dim == 0 {
        return Err(InterpError::Domain("dimension must be at least 1".into()));
    }
    let params = KernelParams::new(config.alpha, config.delta)?;
    let d = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let test = PointSet::from_flat(
        d,
        (0..config.test_points * d)
            .map(|_| rng.gen::<f64>())
            .collect(),
    )?;
    let truth: Vec<f64> = test.iter().map(|x| config.target.eval(x)).collect();
    let unit = BoxDomain::unit(d);

    let mut rows = Vec::new();
    for kernel in [KernelKind::Phi, KernelKind::WendlandC2] {
        for level in 0..config.levels {
            let started = Instant::now();
            let pts = uniform_grid(d, points_per_axis(config.base, level))?;
            let values: Vec<f64> = pts.iter().map(|x| config.target.eval(x)).collect();
            let fill = fill_distance(&pts, &unit)?;
            let options = FitOptions {
                kernel,
                certificate: None,
            };
            let mut row = BenchRow {
                kernel,
                level,
                n: pts.len(),
                fill_distance: fill,
                max_error: f64::NAN,
                rms_error: f64::NAN,
                cond_estimate: f64::NAN,
                nnz_fraction: f64::NAN,
                error: None,
                wall_time_ms: 0.0,
            };
            match fit_detailed(&pts, &values, &params, options) {
                Ok(fitted) => {
                    let predicted = evaluate(&fitted.model, &test)?;
                    let (mut max, mut sq) = (0.0f64, 0.0);
                    for (p, t) in predicted.iter().zip(&truth) {
                        max = max.max((p - t).abs());
                        sq += (p - t) * (p - t);
                    }
                    row.max_error = max;
                    row.rms_error = (sq / truth.len().max(1) as f64).sqrt();
                    row.nnz_fraction = fitted.matrix.density();
                    row.cond_estimate =
                        condition_estimate(&fitted.matrix, &fitted.factor, config.eig_iters)?;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
            rows.push(row);
        }
    }
    Ok(BenchTable {
        config: config.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_nested() {
        assert_eq!(points_per_axis(1, 0), 1);
        assert_eq!(points_per_axis(1, 2), 5);
        assert_eq!(points_per_axis(3, 2), 9);
        let coarse = uniform_grid(2, 5).unwrap();
        let fine = uniform_grid(2, 9).unwrap();
        for p in coarse.iter() {
            assert!(fine.iter().any(|q| q == p));
        }
        assert_eq!(uniform_grid(3, 1).unwrap().point(0), &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn single_center_level() {
        let config = BenchConfig {
            dim: 2,
            base: 1,
            levels: 2,
            test_points: 64,
            seed: 3,
            ..Default::default()
        };
        let table = run_bench(&config).unwrap();
        let row = &table.rows[0];
        assert_eq!(row.n, 1);
        assert_eq!(row.fill_distance, 0.5f64.sqrt());

        // s(x) = g(c)·e^α·φ(‖x − c‖/δ) with c the cube centre
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let test: Vec<f64> = (0..128).map(|_| rng.gen::<f64>()).collect();
        let centre = [0.5, 0.5];
        let coef = Target::SinCos.eval(&centre) * config.alpha.exp();
        let max = test
            .chunks(2)
            .map(|x| {
                let r = super::super::distance(x, &centre) / config.delta;
                let s = coef * crate::kernel::phi(r, config.alpha).unwrap().value;
                (Target::SinCos.eval(x) - s).abs()
            })
            .fold(0.0, f64::max);
        assert!((row.max_error - max).abs() <= 1e-14 * max.max(1.0));
    }

    #[test]
    fn targets_parse() {
        assert_eq!("SinCos".parse::<Target>().unwrap(), Target::SinCos);
        assert!(matches!(
            "nope".parse::<Target>(),
            Err(InterpError::UnknownTarget(_))
        ));
        assert!((Target::SinCos.eval(&[0.5, 0.0]) - 1.0).abs() < 1e-15);
    }
}
