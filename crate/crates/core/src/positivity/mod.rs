//! Certification of the sign conditions behind positive definiteness.
//!
//! The conditions are `(−1)^j d^j/dt^j φ(√t) ≥ 0` on `(0, ∞)` for
//! `j = 0, …, ℓ` with `ℓ = ⌊d/2⌋ + 2`. Through the closed form of the
//! derivatives this is the same as `F_j(α, u) ≥ 0` for all `u ≥ 0`. At a fixed
//! rational `α` each condition is a univariate question, settled exactly by
//! Sturm sequences.
//!
//! The certificates are exact statements about these sign conditions only.
//! Finite monotonicity of `φ(√t)` does not by itself make the kernel positive
//! definite: Gram matrices at `α = 2` on fine grids have negative eigenvalues
//! even in one dimension. A successful Cholesky factorization remains the
//! only witness for a given point set.

pub mod sturm;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::rational;
use crate::sympoly::{f_sequence, BivarPoly};
use crate::univariate::UniPoly;

pub use sturm::{RayDecision, RayOutcome};

/// Default upper end of the prescreen sampling interval.
pub const DEFAULT_PRESCREEN_U_MAX: f64 = 50.0;
pub const DEFAULT_PRESCREEN_SAMPLES: usize = 2001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PositivityError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no certified alpha found for d = {d} below the cap {cap}")]
    GaveUp { d: usize, cap: String },
}

fn fraction<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    ProvenNonnegative,
    Counterexample {
        #[serde(serialize_with = "fraction")]
        u_star: BigRational,
        #[serde(serialize_with = "fraction")]
        value: BigRational,
    },
    /// Sampling found no negative value. Not a proof.
    Unrefuted {
        min_sampled: f64,
        argmin: f64,
    },
}

impl Verdict {
    pub fn is_proven(&self) -> bool {
        matches!(self, Verdict::ProvenNonnegative)
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self, Verdict::Counterexample { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SturmExact,
    GridPrescreen,
}

/// Outcome of checking `F_j(α, ·) ≥ 0` on `[0, ∞)` at one rational `α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignCertificate {
    pub j: u32,
    #[serde(serialize_with = "fraction")]
    pub alpha: BigRational,
    pub verdict: Verdict,
    pub method: Method,
    /// Distinct roots of `F_j(α, ·)` in `(0, ∞)` when counted.
    pub sturm_root_count: Option<usize>,
    pub zero_polynomial: bool,
    #[serde(rename = "wall_time_ms", serialize_with = "millis")]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub d: usize,
    pub l: usize,
    pub certificates: Vec<SignCertificate>,
    /// All `ℓ` sign conditions were proven.
    pub strictly_pd: bool,
}

impl DimensionReport {
    /// The first refuting certificate, if any.
    pub fn counterexample(&self) -> Option<&SignCertificate> {
        self.certificates
            .iter()
            .find(|c| c.verdict.is_counterexample())
    }

    /// True when every certificate came from exact Sturm certification.
    pub fn is_rigorous(&self) -> bool {
        self.certificates
            .iter()
            .all(|c| c.method == Method::SturmExact)
    }
}

/// Bracket `[lo, hi]` for the smallest `α` satisfying the sign conditions of
/// dimension `d`: `lo` is refuted by a stored counterexample, `hi` is
/// certified.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaInterval {
    pub d: usize,
    #[serde(serialize_with = "fraction")]
    pub lo: BigRational,
    #[serde(serialize_with = "fraction")]
    pub hi: BigRational,
    pub lo_witness: SignCertificate,
    pub hi_report: DimensionReport,
    /// Number of `check_dimension` evaluations made.
    pub probes: usize,
}

impl AlphaInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// Minimum of a sampled polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrescreenMin {
    pub min: f64,
    pub argmin: f64,
    pub index: usize,
}

/// `ℓ = ⌊d/2⌋ + 2`, the number of derivative conditions for dimension `d`.
pub fn order_for_dimension(d: usize) -> usize {
    d / 2 + 2
}

/// Exact decision of `p(u) ≥ 0` on `[0, ∞)`.
pub fn sturm_nonneg_on_ray(p: &UniPoly) -> RayDecision {
    sturm::nonneg_on_ray(p)
}

/// Holds the derivative polynomials so repeated checks do not regenerate
/// them.
#[derive(Debug, Clone, Default)]
pub struct Certifier {
    polys: Vec<BivarPoly>,
}

impl Certifier {
    pub fn new() -> Self {
        Self::default()
    }

    fn polys(&mut self, l: usize) -> &[BivarPoly] {
        if self.polys.len() < l {
            self.polys = f_sequence(l);
        }
        &self.polys[..l]
    }

    /// Sturm certificate for one order `j ≥ 1`.
    pub fn certify(&mut self, alpha: &BigRational, j: usize) -> SignCertificate {
        let fj = self.polys(j)[j - 1].clone();
        certify_one(&fj, j as u32, alpha)
    }

    pub fn check_dimension(
        &mut self,
        alpha: &BigRational,
        d: usize,
    ) -> Result<DimensionReport, PositivityError> {
        validate(alpha, d)?;
        let l = order_for_dimension(d);
        let polys = self.polys(l);
        let certificates: Vec<SignCertificate> = polys
            .par_iter()
            .enumerate()
            .map(|(k, fj)| certify_one(fj, k as u32 + 1, alpha))
            .collect();
        let strictly_pd = certificates.iter().all(|c| c.verdict.is_proven());
        Ok(DimensionReport {
            d,
            l,
            certificates,
            strictly_pd,
        })
    }
}

fn validate(alpha: &BigRational, d: usize) -> Result<(), PositivityError> {
    if d == 0 {
        return Err(PositivityError::Domain(
            "dimension must be at least 1".into(),
        ));
    }
    if !alpha.is_positive() {
        return Err(PositivityError::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(())
}

fn certify_one(fj: &BivarPoly, j: u32, alpha: &BigRational) -> SignCertificate {
    let start = Instant::now();
    let decision = sturm::nonneg_on_ray(&fj.restrict_alpha(alpha));
    let verdict = match decision.outcome {
        RayOutcome::Nonnegative => Verdict::ProvenNonnegative,
        RayOutcome::Negative { u_star, value } => Verdict::Counterexample { u_star, value },
    };
    SignCertificate {
        j,
        alpha: alpha.clone(),
        verdict,
        method: Method::SturmExact,
        sturm_root_count: decision.positive_roots,
        zero_polynomial: decision.zero_polynomial,
        elapsed: start.elapsed(),
    }
}

/// Exact check of `F_j(α, ·) ≥ 0` for `j = 1..=⌊d/2⌋+2`; `strictly_pd` is set
/// when all of them hold.
pub fn check_dimension(alpha: &BigRational, d: usize) -> Result<DimensionReport, PositivityError> {
    Certifier::new().check_dimension(alpha, d)
}

/// Floating-point minimum of `F_j(α, ·)` over `n` uniform samples of
/// `[0, u_max]`. Only a heuristic for locating counterexamples.
pub fn grid_prescreen(
    fj: &BivarPoly,
    alpha: &BigRational,
    u_max: f64,
    n: usize,
) -> Result<PrescreenMin, PositivityError> {
    if n < 2 {
        return Err(PositivityError::Domain("need at least two samples".into()));
    }
    if !(u_max.is_finite() && u_max > 0.0) {
        return Err(PositivityError::Domain(format!(
            "u_max must be positive, got {u_max}"
        )));
    }
    let p = fj.restrict_alpha(alpha);
    let step = u_max / (n - 1) as f64;
    let mut best = PrescreenMin {
        min: f64::INFINITY,
        argmin: 0.0,
        index: 0,
    };
    for i in 0..n {
        let u = i as f64 * step;
        let v = p.eval_f64(u);
        if v < best.min {
            best = PrescreenMin {
                min: v,
                argmin: u,
                index: i,
            };
        }
    }
    Ok(best)
}

/// Non-certifying counterpart of [`check_dimension`]: samples each
/// `F_j(α, ·)`; a sampled negative value is confirmed exactly and reported
/// as a counterexample, anything else is `Unrefuted`. `strictly_pd` is never
/// set.
pub fn prescreen_dimension(
    alpha: &BigRational,
    d: usize,
    u_max: f64,
    n: usize,
) -> Result<DimensionReport, PositivityError> {
    validate(alpha, d)?;
    let l = order_for_dimension(d);
    let u_max_exact = rational::from_f64(u_max)
        .ok_or_else(|| PositivityError::Domain(format!("u_max must be finite, got {u_max}")))?;
    let mut certificates = Vec::with_capacity(l);
    for (k, fj) in f_sequence(l).iter().enumerate() {
        let start = Instant::now();
        let screen = grid_prescreen(fj, alpha, u_max, n)?;
        let mut verdict = Verdict::Unrefuted {
            min_sampled: screen.min,
            argmin: screen.argmin,
        };
        if screen.min < 0.0 {
            let u =
                &u_max_exact * BigRational::new(BigInt::from(screen.index), BigInt::from(n - 1));
            let value = fj.eval_rational(alpha, &u);
            if value.is_negative() {
                verdict = Verdict::Counterexample { u_star: u, value };
            }
        }
        certificates.push(SignCertificate {
            j: k as u32 + 1,
            alpha: alpha.clone(),
            verdict,
            method: Method::GridPrescreen,
            sturm_root_count: None,
            zero_polynomial: fj.is_zero(),
            elapsed: start.elapsed(),
        });
    }
    Ok(DimensionReport {
        d,
        l,
        certificates,
        strictly_pd: false,
    })
}

/// Search configuration for [`find_alpha_min_with`].
#[derive(Debug, Clone)]
pub struct AlphaSearch {
    /// Largest `α` tried while looking for a certified upper end.
    pub cap: BigRational,
    /// Smallest `α` tried while looking for a refuted lower end.
    pub floor: BigRational,
}

impl Default for AlphaSearch {
    fn default() -> Self {
        Self {
            cap: rational::pow2(20),
            floor: rational::pow2(-40),
        }
    }
}

/// Bisection bracket of width ≤ `tol` for the smallest certified `α` in
/// dimension `d`.
pub fn find_alpha_min(d: usize, tol: &BigRational) -> Result<AlphaInterval, PositivityError> {
    find_alpha_min_with(d, tol, &AlphaSearch::default())
}

pub fn find_alpha_min_with(
    d: usize,
    tol: &BigRational,
    search: &AlphaSearch,
) -> Result<AlphaInterval, PositivityError> {
    if !tol.is_positive() {
        return Err(PositivityError::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    validate(&BigRational::one(), d)?;
    let mut certifier = Certifier::new();
    let mut probes = 0;
    let two = rational::int(2);

    let witness = |report: &DimensionReport| report.counterexample().cloned();

    // upward doubling for a certified end
    let mut hi = BigRational::one();
    let mut lo: Option<(BigRational, SignCertificate)> = None;
    let hi_report = loop {
        let report = certifier.check_dimension(&hi, d)?;
        probes += 1;
        if report.strictly_pd {
            break report;
        }
        if let Some(w) = witness(&report) {
            lo = Some((hi.clone(), w));
        }
        hi = &hi * &two;
        if hi > search.cap {
            return Err(PositivityError::GaveUp {
                d,
                cap: search.cap.to_string(),
            });
        }
    };
    let mut hi_report = hi_report;

    // downward halving for a refuted end
    let (mut lo, mut lo_witness) = match lo {
        Some(found) => found,
        None => {
            let mut probe = &hi / &two;
            loop {
                let report = certifier.check_dimension(&probe, d)?;
                probes += 1;
                if let Some(w) = witness(&report) {
                    break (probe, w);
                }
                if report.strictly_pd {
                    hi = probe.clone();
                    hi_report = report;
                }
                probe = &probe / &two;
                if probe < search.floor {
                    return Err(PositivityError::Domain(format!(
                        "no refuted alpha found above {}",
                        search.floor
                    )));
                }
            }
        }
    };

    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        let report = certifier.check_dimension(&mid, d)?;
        probes += 1;
        if report.strictly_pd {
            hi = mid;
            hi_report = report;
        } else if let Some(w) = witness(&report) {
            lo = mid;
            lo_witness = w;
        } else {
            unreachable!("exact certification always decides");
        }
    }

    Ok(AlphaInterval {
        d,
        lo,
        hi,
        lo_witness,
        hi_report,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympoly::{f_sequence, printed};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ray_examples() {
        let d = sturm_nonneg_on_ray(&UniPoly::from_ints([1, -2, 1]));
        assert_eq!(d.outcome, RayOutcome::Nonnegative);
        let fs = f_sequence(3);
        let d = sturm_nonneg_on_ray(&fs[2].restrict_alpha(&q(2, 1)));
        assert_eq!(d.outcome, RayOutcome::Nonnegative);
    }

    #[test]
    fn l_rule() {
        for d in 1..=12 {
            assert_eq!(order_for_dimension(d), d / 2 + 2);
        }
        let r = check_dimension(&q(3, 1), 5).unwrap();
        assert_eq!(r.l, 4);
        assert_eq!(r.certificates.len(), 4);
    }

    #[test]
    fn alpha_two_up_to_dimension_four() {
        for d in 1..=4 {
            let r = check_dimension(&q(2, 1), d).unwrap();
            assert!(r.strictly_pd, "d = {d}: {r:?}");
            assert!(r.is_rigorous());
        }
    }

    #[test]
    fn alpha_half_fails_in_one_dimension() {
        let r = check_dimension(&q(1, 2), 1).unwrap();
        assert!(!r.strictly_pd);
        let c = r.counterexample().unwrap();
        assert_eq!(c.j, 2);
        let Verdict::Counterexample { u_star, value } = &c.verdict else {
            panic!()
        };
        assert!(*u_star > q(0, 1));
        assert_eq!(printed::f2().eval_rational(&q(1, 2), u_star), *value);
        assert!(value.is_negative());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(check_dimension(&q(2, 1), 0).is_err());
        assert!(check_dimension(&q(0, 1), 2).is_err());
        assert!(check_dimension(&q(-1, 1), 2).is_err());
        assert!(find_alpha_min(2, &q(0, 1)).is_err());
        let f1 = f_sequence(1).remove(0);
        assert!(grid_prescreen(&f1, &q(1, 1), 1.0, 1).is_err());
        assert!(grid_prescreen(&f1, &q(1, 1), 0.0, 10).is_err());
    }

    #[test]
    fn monotone_in_alpha_on_samples() {
        for d in 1..=4 {
            let alpha = q(2, 1);
            assert!(check_dimension(&alpha, d).unwrap().strictly_pd);
            for bigger in [&alpha + q(1, 1), &alpha * q(2, 1)] {
                assert!(check_dimension(&bigger, d).unwrap().strictly_pd);
            }
        }
    }

    #[test]
    fn prescreen_examples() {
        let fs = f_sequence(2);
        let m = grid_prescreen(&fs[1], &q(2, 1), 10.0, 1000).unwrap();
        assert!(m.min > 0.0);
        let m = grid_prescreen(&fs[1], &q(1, 2), 1.0, 1000).unwrap();
        assert!(m.min < 0.0);
        // 2u²(u² + 2u − 1) is negative on (0, √2 − 1), minimal near 0.28
        assert!(m.argmin > 0.2 && m.argmin < 0.35, "{m:?}");
        let m = grid_prescreen(&fs[0], &q(7, 1), 10.0, 100).unwrap();
        assert_eq!((m.min, m.argmin), (2.0, 0.0));
    }

    #[test]
    fn prescreen_report_is_never_a_proof() {
        let r = prescreen_dimension(&q(2, 1), 1, DEFAULT_PRESCREEN_U_MAX, 1001).unwrap();
        assert!(!r.strictly_pd);
        assert!(r.certificates.iter().all(
            |c| matches!(c.verdict, Verdict::Unrefuted { min_sampled, .. } if min_sampled >= 0.0)
        ));
        let r = prescreen_dimension(&q(1, 2), 1, 1.0, 1001).unwrap();
        let c = r.counterexample().unwrap();
        assert_eq!(c.method, Method::GridPrescreen);
        let Verdict::Counterexample { u_star, value } = &c.verdict else {
            panic!()
        };
        assert_eq!(f_sequence(2)[1].eval_rational(&q(1, 2), u_star), *value);
    }

    #[test]
    fn bracket_in_one_dimension() {
        let tol = q(1, 1000);
        let iv = find_alpha_min(1, &tol).unwrap();
        assert!(iv.lo < iv.hi);
        assert!(iv.width() <= tol);
        assert!(iv.hi_report.strictly_pd);
        assert!(iv.lo_witness.verdict.is_counterexample());
        // the supremum of (3u² + 2u + 1)/(2(1+u)²(1+u²)) is ≈ 0.50824
        assert!(
            iv.lo <= q(50824, 100000) && iv.hi >= q(50823, 100000),
            "{} {}",
            iv.lo,
            iv.hi
        );
    }

    #[test]
    fn certificates_serialize() {
        let r = check_dimension(&q(1, 2), 1).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["l"], 2);
        assert_eq!(json["certificates"][1]["alpha"], "1/2");
        assert_eq!(json["certificates"][1]["verdict"]["kind"], "counterexample");
        assert_eq!(
            json["certificates"][0]["verdict"]["kind"],
            "proven_nonnegative"
        );
        assert_eq!(json["certificates"][0]["method"], "sturm_exact");
    }

    #[test]
    fn zero_counts_are_flagged() {
        let d = sturm_nonneg_on_ray(&UniPoly::zero());
        assert!(d.zero_polynomial);
        assert_eq!(d.outcome, RayOutcome::Nonnegative);
    }
}
