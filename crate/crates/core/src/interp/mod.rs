//! Scattered-data interpolation with the compactly supported kernel.
//!
//! The Gram matrix `A[i][j] = φ(‖x_i − x_j‖ / δ)` vanishes whenever two
//! centers are at least `δ` apart, so it is assembled sparsely from a
//! fixed-radius neighbour search and factored by Cholesky.

pub mod bench;
mod cholesky;
pub mod io;
mod sparse;
mod spatial;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{profile_unchecked, KernelError, KernelParams};
use crate::positivity::DimensionReport;

pub use cholesky::{
    cholesky, reverse_cuthill_mckee, CholeskyFactor, DenseFactor, NotPositiveDefinite,
    SkylineFactor, DENSE_LIMIT,
};
pub use sparse::SparseSymMatrix;
pub use spatial::{distance, CellGrid};

/// Coordinate-wise tolerance under which two points count as duplicates.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// Relative residual target of [`fit`].
pub const SOLVE_TOL: f64 = 1e-8;

/// Probe points per axis for [`fill_distance`] (64 intervals) and the cap on
/// their total number.
pub const FILL_PROBES_PER_AXIS: usize = 65;
pub const FILL_PROBE_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },
    #[error("empty point set")]
    Empty,
    #[error(transparent)]
    NotPositiveDefinite(#[from] NotPositiveDefinite),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{path}: {reason}")]
    Parse { path: String, reason: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("unknown target function {0:?}")]
    UnknownTarget(String),
}

fn domain<T>(msg: impl Into<String>) -> Result<T, InterpError> {
    Err(InterpError::Domain(msg.into()))
}

/// Points of `R^d` stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(d: usize, points: &[Vec<f64>]) -> Result<Self, InterpError> {
        let mut coords = Vec::with_capacity(points.len() * d);
        for p in points {
            if p.len() != d {
                return Err(InterpError::DimensionMismatch {
                    expected: d,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(d, coords)
    }

    pub fn from_flat(d: usize, coords: Vec<f64>) -> Result<Self, InterpError> {
        if d == 0 {
            return domain("dimension must be at least 1");
        }
        if !coords.len().is_multiple_of(d) {
            return domain(format!(
                "{} coordinates do not split into rows of {d}",
                coords.len()
            ));
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return domain(format!("point {} has a non-finite coordinate", k / d));
        }
        Ok(Self { d, coords })
    }

    pub fn empty(d: usize) -> Self {
        Self {
            d: d.max(1),
            coords: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// First pair `(i, j)`, `i < j`, whose coordinates all agree within
    /// [`DUPLICATE_TOL`].
    pub fn find_duplicate(&self) -> Option<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.point(a)[0]
                .total_cmp(&self.point(b)[0])
                .then(a.cmp(&b))
        });
        let mut found: Option<(usize, usize)> = None;
        for (k, &a) in order.iter().enumerate() {
            let pa = self.point(a);
            for &b in &order[k + 1..] {
                let pb = self.point(b);
                if pb[0] - pa[0] > DUPLICATE_TOL {
                    break;
                }
                if pa
                    .iter()
                    .zip(pb)
                    .all(|(x, y)| (x - y).abs() <= DUPLICATE_TOL)
                {
                    let pair = (a.min(b), a.max(b));
                    if found.is_none_or(|f| pair < f) {
                        found = Some(pair);
                    }
                }
            }
        }
        found
    }
}

/// Axis-aligned box `[lo_1, hi_1] × … × [lo_d, hi_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, InterpError> {
        if lo.is_empty() || lo.len() != hi.len() {
            return domain("box corners must have the same positive dimension");
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b))
        {
            return domain("box corners must be finite with lo ≤ hi");
        }
        Ok(Self { lo, hi })
    }

    pub fn unit(d: usize) -> Self {
        Self {
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }
    }

    /// Smallest box containing the points.
    pub fn bounding(pts: &PointSet) -> Result<Self, InterpError> {
        if pts.is_empty() {
            return Err(InterpError::Empty);
        }
        let mut lo = pts.point(0).to_vec();
        let mut hi = lo.clone();
        for p in pts.iter() {
            for k in 0..pts.dim() {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

/// Radial profile used to build the Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// The compactly supported C^∞ profile φ with shape parameter α.
    #[default]
    Phi,
    /// Wendland's `(1 − t)⁴₊ (4t + 1)`, positive definite up to `d = 3`.
    WendlandC2,
}

impl KernelKind {
    /// Profile at `r = ‖x‖ / δ ≥ 0`.
    pub fn profile(self, r: f64, alpha: f64) -> f64 {
        match self {
            KernelKind::Phi => profile_unchecked(r, alpha).value,
            KernelKind::WendlandC2 => wendland_unchecked(r),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Phi => "phi",
            KernelKind::WendlandC2 => "wendland_c2",
        }
    }
}

fn wendland_unchecked(t: f64) -> f64 {
    if t >= 1.0 {
        return 0.0;
    }
    let s = 1.0 - t;
    let s2 = s * s;
    s2 * s2 * (4.0 * t + 1.0)
}

/// Wendland's compactly supported C² function `(1 − t)⁴₊ (4t + 1)`.
pub fn wendland_c2(t: f64) -> Result<f64, InterpError> {
    if !(t >= 0.0) || t.is_infinite() {
        return domain(format!("t must be finite and nonnegative, got {t}"));
    }
    Ok(wendland_unchecked(t))
}

/// Gram matrix of the kernel `x ↦ φ(‖x‖/δ)` over `pts`.
pub fn assemble(pts: &PointSet, params: &KernelParams) -> Result<SparseSymMatrix, InterpError> {
    assemble_with(pts, params, KernelKind::Phi)
}

/// Gram matrix for any supported kernel. Entry `(i, j)` is stored exactly
/// when `‖x_i − x_j‖ < δ`, even if its value underflows to zero.
pub fn assemble_with(
    pts: &PointSet,
    params: &KernelParams,
    kind: KernelKind,
) -> Result<SparseSymMatrix, InterpError> {
    if let Some((first, second)) = pts.find_duplicate() {
        return Err(InterpError::DuplicatePoints { first, second });
    }
    let (alpha, delta) = (params.alpha(), params.delta());
    let grid = CellGrid::new(pts, delta);
    let rows: Vec<Vec<(usize, f64)>> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            grid.for_each_within(pts.point(i), delta, |j, dist| {
                if j < i {
                    row.push((j, kind.profile(dist / delta, alpha)));
                }
            });
            row
        })
        .collect();
    let diag = vec![kind.profile(0.0, alpha); pts.len()];
    Ok(SparseSymMatrix::from_rows(rows, &diag))
}

/// A fitted model `s(x) = Σ_j c_j K(‖x − x_j‖ / δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    pub centers: PointSet,
    pub coefficients: Vec<f64>,
    pub params: KernelParams,
    pub kernel: KernelKind,
}

/// Settings for [`fit_detailed`].
#[derive(Debug, Clone, Copy, Default)]
pub struct FitOptions<'a> {
    pub kernel: KernelKind,
    /// Positive-definiteness report covering the parameters, if one was run.
    pub certificate: Option<&'a DimensionReport>,
}

/// Solver diagnostics of a fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub n: usize,
    pub nnz: usize,
    pub density: f64,
    pub factor: &'static str,
    /// `‖A c − f‖_∞` of the returned coefficients.
    pub residual_inf: f64,
    pub refined: bool,
    pub warnings: Vec<String>,
}

/// A fit together with the matrix and factor it was computed from.
#[derive(Debug, Clone)]
pub struct Fitted {
    pub model: Interpolant,
    pub matrix: SparseSymMatrix,
    pub factor: CholeskyFactor,
    pub report: FitReport,
}

/// Solves the interpolation system `A c = f`.
pub fn fit(
    pts: &PointSet,
    values: &[f64],
    params: &KernelParams,
) -> Result<Interpolant, InterpError> {
    fit_detailed(pts, values, params, FitOptions::default()).map(|f| f.model)
}

pub fn fit_detailed(
    pts: &PointSet,
    values: &[f64],
    params: &KernelParams,
    options: FitOptions<'_>,
) -> Result<Fitted, InterpError> {
    if values.len() != pts.len() {
        return Err(InterpError::DimensionMismatch {
            expected: pts.len(),
            found: values.len(),
        });
    }
    if pts.is_empty() {
        return Err(InterpError::Empty);
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return domain(format!("value {k} is not finite"));
    }
    let mut warnings = certification_warnings(pts.dim(), params, options);

    let matrix = assemble_with(pts, params, options.kernel)?;
    let factor = cholesky(&matrix)?;
    let mut coefficients = factor.solve(values);
    let mut residual = residual_vector(&matrix, &coefficients, values);
    let mut residual_inf = inf_norm(&residual);
    let f_inf = inf_norm(values);
    let mut refined = false;
    if residual_inf > SOLVE_TOL * f_inf {
        let correction = factor.solve(&residual);
        for (c, dc) in coefficients.iter_mut().zip(&correction) {
            *c += dc;
        }
        residual = residual_vector(&matrix, &coefficients, values);
        residual_inf = inf_norm(&residual);
        refined = true;
        if residual_inf > SOLVE_TOL * f_inf {
            warnings.push(format!(
                "residual {residual_inf:e} exceeds {SOLVE_TOL:e}·‖f‖∞ after refinement"
            ));
        }
    }

    let report = FitReport {
        n: pts.len(),
        nnz: matrix.nnz(),
        density: matrix.density(),
        factor: factor.kind(),
        residual_inf,
        refined,
        warnings,
    };
    let model = Interpolant {
        centers: pts.clone(),
        coefficients,
        params: *params,
        kernel: options.kernel,
    };
    Ok(Fitted {
        model,
        matrix,
        factor,
        report,
    })
}

fn certification_warnings(d: usize, params: &KernelParams, options: FitOptions<'_>) -> Vec<String> {
    let mut out = Vec::new();
    match (options.kernel, options.certificate) {
        (KernelKind::WendlandC2, _) => {
            if d > 3 {
                out.push(format!(
                    "wendland_c2 is only positive definite up to d = 3, got d = {d}"
                ));
            }
        }
        (KernelKind::Phi, None) => out.push(format!(
            "positive definiteness for alpha = {} in d = {d} has not been certified",
            params.alpha()
        )),
        (KernelKind::Phi, Some(report)) => {
            let alpha = report.certificates.first().and_then(|c| c.alpha.to_f64());
            if !report.strictly_pd {
                out.push(format!(
                    "the supplied report does not certify d = {}",
                    report.d
                ));
            } else if report.d < d {
                out.push(format!("the supplied report covers d = {} < {d}", report.d));
            } else if alpha != Some(params.alpha()) {
                out.push(format!(
                    "the supplied report is for alpha = {}, not {}",
                    alpha.map_or("?".to_string(), |a| a.to_string()),
                    params.alpha()
                ));
            }
        }
    }
    out
}

fn residual_vector(a: &SparseSymMatrix, c: &[f64], f: &[f64]) -> Vec<f64> {
    a.matvec(c).iter().zip(f).map(|(ac, fi)| fi - ac).collect()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Values of the interpolant at the query points.
pub fn evaluate(model: &Interpolant, queries: &PointSet) -> Result<Vec<f64>, InterpError> {
    let centers = &model.centers;
    if queries.is_empty() {
        return Ok(Vec::new());
    }
    if queries.dim() != centers.dim() {
        return Err(InterpError::DimensionMismatch {
            expected: centers.dim(),
            found: queries.dim(),
        });
    }
    let (alpha, delta) = (model.params.alpha(), model.params.delta());
    let grid = CellGrid::new(centers, delta);
    Ok((0..queries.len())
        .into_par_iter()
        .map(|q| {
            let mut s = 0.0;
            grid.for_each_within(queries.point(q), delta, |j, dist| {
                s += model.coefficients[j] * model.kernel.profile(dist / delta, alpha);
            });
            s
        })
        .collect())
}

/// Deterministic, nowhere-special starting vector for the power iterations.
fn start_vector(n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_75).fract())
        .collect();
    normalized(v)
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smallest eigenvalue of `A` by inverse iteration through its Cholesky
/// factor, as `1 / (xᵀ A⁻¹ x)` for the converged unit vector `x`.
pub fn min_eig_estimate(
    a: &SparseSymMatrix,
    factor: &CholeskyFactor,
    iters: usize,
) -> Result<f64, InterpError> {
    if factor.n() != a.n() {
        return domain("factor does not belong to the matrix");
    }
    if a.n() == 0 {
        return Err(InterpError::Empty);
    }
    let mut x = start_vector(a.n());
    let mut estimate = f64::NAN;
    for _ in 0..iters.max(1) {
        let y = factor.solve(&x);
        let next = 1.0 / dot(&x, &y);
        x = normalized(y);
        let converged = (next - estimate).abs() <= 1e-12 * next.abs();
        estimate = next;
        if converged {
            break;
        }
    }
    Ok(estimate)
}

/// Largest eigenvalue of `A` by power iteration.
pub fn max_eig_estimate(a: &SparseSymMatrix, iters: usize) -> Result<f64, InterpError> {
    if a.n() == 0 {
        return Err(InterpError::Empty);
    }
    let mut x = start_vector(a.n());
    let mut estimate = f64::NAN;
    for _ in 0..iters.max(1) {
        let y = a.matvec(&x);
        let next = dot(&x, &y);
        x = normalized(y);
        let converged = (next - estimate).abs() <= 1e-12 * next.abs();
        estimate = next;
        if converged {
            break;
        }
    }
    Ok(estimate)
}

/// 2-norm condition number estimate `λ_max / λ_min`.
pub fn condition_estimate(
    a: &SparseSymMatrix,
    factor: &CholeskyFactor,
    iters: usize,
) -> Result<f64, InterpError> {
    Ok(max_eig_estimate(a, iters)? / min_eig_estimate(a, factor, iters)?)
}

/// Largest distance from a probe of `domain` to its nearest point of `pts`,
/// over a regular probe grid of [`FILL_PROBES_PER_AXIS`] points per axis,
/// coarsened until at most [`FILL_PROBE_CAP`] probes remain.
pub fn fill_distance(pts: &PointSet, domain_box: &BoxDomain) -> Result<f64, InterpError> {
    if pts.is_empty() {
        return Err(InterpError::Empty);
    }
    let d = pts.dim();
    if domain_box.dim() != d {
        return Err(InterpError::DimensionMismatch {
            expected: d,
            found: domain_box.dim(),
        });
    }
    let mut m = FILL_PROBES_PER_AXIS;
    while m > 2 && (m as f64).powi(d as i32) > FILL_PROBE_CAP as f64 {
        m -= 1;
    }
    let total = m.pow(d as u32);

    let bounds = BoxDomain::bounding(pts)?;
    let volume: f64 = (0..d)
        .map(|k| {
            let lo = bounds.lo[k].min(domain_box.lo[k]);
            let hi = bounds.hi[k].max(domain_box.hi[k]);
            hi - lo
        })
        .product();
    let mut cell = (volume / pts.len() as f64).powf(1.0 / d as f64);
    if !(cell.is_finite() && cell > 0.0) {
        cell = 1.0;
    }
    let grid = CellGrid::new(pts, cell);

    let probe = |mut idx: usize| -> Vec<f64> {
        (0..d)
            .map(|k| {
                let i = idx % m;
                idx /= m;
                let (lo, hi) = (domain_box.lo[k], domain_box.hi[k]);
                if m == 1 {
                    0.5 * (lo + hi)
                } else {
                    lo + (hi - lo) * i as f64 / (m - 1) as f64
                }
            })
            .collect()
    };
    Ok((0..total)
        .into_par_iter()
        .map(|idx| grid.nearest(&probe(idx)).map_or(0.0, |(_, dist)| dist))
        .reduce(|| 0.0, f64::max))
}

/// Support radius giving about `neighbours` centers per ball when `pts` fill
/// their bounding box uniformly.
pub fn default_delta(pts: &PointSet, neighbours: f64) -> Result<f64, InterpError> {
    let bounds = BoxDomain::bounding(pts)?;
    let d = pts.dim();
    let volume = bounds.volume();
    if !(volume > 0.0) || pts.len() < 2 {
        return domain("cannot infer a support radius from a degenerate point cloud");
    }
    let delta =
        (neighbours * volume / (pts.len() as f64 * unit_ball_volume(d))).powf(1.0 / d as f64);
    Ok(delta)
}

fn unit_ball_volume(d: usize) -> f64 {
    let mut v = [1.0, 2.0];
    for k in 2..=d {
        v[k % 2] *= 2.0 * std::f64::consts::PI / k as f64;
    }
    v[d % 2]
}
