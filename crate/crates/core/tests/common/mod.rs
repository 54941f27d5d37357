//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use astro_float::{BigFloat, Consts, RoundingMode};

const PREC: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

/// `t ↦ φ(√t) = exp(−α(1 + tan(π/2·t))²)`, written out directly in f64.
pub fn phi_of_sqrt(t: f64, alpha: f64) -> f64 {
    let u = (FRAC_PI_2 * t).tan();
    (-alpha * (1.0 + u) * (1.0 + u)).exp()
}

/// Multiple-precision evaluation of `t ↦ φ(√t)`, so that finite differences
/// are limited by truncation only.
struct HighPrecisionProfile {
    alpha: BigFloat,
    half_pi: BigFloat,
    one: BigFloat,
    consts: Consts,
}

impl HighPrecisionProfile {
    fn new(alpha: f64) -> Self {
        let mut consts = Consts::new().expect("constants cache");
        let pi = consts.pi(PREC, RM);
        let half_pi = pi.div(&BigFloat::from_f64(2.0, PREC), PREC, RM);
        Self {
            alpha: BigFloat::from_f64(alpha, PREC),
            half_pi,
            one: BigFloat::from_f64(1.0, PREC),
            consts,
        }
    }

    fn eval(&mut self, t: &BigFloat) -> BigFloat {
        let u = self
            .half_pi
            .mul(t, PREC, RM)
            .tan(PREC, RM, &mut self.consts);
        let w = self.one.add(&u, PREC, RM);
        let e = self.alpha.mul(&w.mul(&w, PREC, RM), PREC, RM);
        e.neg().exp(PREC, RM, &mut self.consts)
    }
}

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

fn to_f64(x: &BigFloat) -> f64 {
    format!("{x}").parse().expect("decimal output")
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Central difference of order `j` and step `h`; the error expands in even
/// powers of `h`.
fn central(f: &mut HighPrecisionProfile, t: &BigFloat, j: usize, h: &BigFloat) -> BigFloat {
    let mut sum = big(0.0);
    for k in 0..=j {
        let offset = big(j as f64 / 2.0 - k as f64).mul(h, PREC, RM);
        let value = f.eval(&t.add(&offset, PREC, RM));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let weight = big(sign * binomial(j, k));
        sum = sum.add(&weight.mul(&value, PREC, RM), PREC, RM);
    }
    sum.div(&h.powi(j, PREC, RM), PREC, RM)
}

/// Richardson extrapolation of central differences with steps `h0 / 2^i`,
/// `i < levels`. Returns the corner of the tableau and the magnitude of its
/// last correction.
pub fn richardson_derivative(t: f64, alpha: f64, j: usize, h0: f64, levels: usize) -> (f64, f64) {
    let mut f = HighPrecisionProfile::new(alpha);
    let t = big(t);
    let mut prev: Vec<BigFloat> = Vec::new();
    for i in 0..levels {
        let h = big(h0 / 2f64.powi(i as i32));
        let mut row = vec![central(&mut f, &t, j, &h)];
        for m in 1..=i {
            let factor = big(4f64.powi(m as i32));
            let num = factor
                .mul(&row[m - 1], PREC, RM)
                .sub(&prev[m - 1], PREC, RM);
            row.push(num.div(&factor.sub(&big(1.0), PREC, RM), PREC, RM));
        }
        prev = row;
    }
    let last = prev.len() - 1;
    let correction = if last > 0 {
        prev[last].sub(&prev[last - 1], PREC, RM)
    } else {
        big(f64::NAN)
    };
    (to_f64(&prev[last]), to_f64(&correction).abs())
}

/// Oracle for `d^j/dt^j φ(√t)`: the step is tied to the local decay length
/// of the exponent and the stencil stays clear of the pole at `t = 1`.
pub fn fd_phi_sqrt_deriv(t: f64, alpha: f64, j: usize) -> f64 {
    let u = (FRAC_PI_2 * t).tan();
    let log_slope = 2.0 * alpha * (1.0 + u) * FRAC_PI_2 * (1.0 + u * u);
    let reach = (1.0 - t) / (j as f64 / 2.0 + 1.0);
    let h0 = (0.25 / log_slope).min(reach);
    richardson_derivative(t, alpha, j, h0, 6).0
}

/// `sup_{u ≥ 0} (3u² + 2u + 1) / (2(1+u)²(1+u²))` by dense sampling and
/// golden-section refinement around the best sample.
pub fn one_dimensional_alpha_bound() -> f64 {
    let ratio = |u: f64| (3.0 * u * u + 2.0 * u + 1.0) / (2.0 * (1.0 + u).powi(2) * (1.0 + u * u));
    let n = 200_000;
    let u_max = 20.0;
    let (mut best_u, mut best) = (0.0, ratio(0.0));
    for i in 1..=n {
        let u = u_max * i as f64 / n as f64;
        let v = ratio(u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    let step = u_max / n as f64;
    let (mut a, mut b) = ((best_u - step).max(0.0), best_u + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if ratio(c) > ratio(d) {
            b = d;
        } else {
            a = c;
        }
    }
    ratio(0.5 * (a + b)).max(best)
}
