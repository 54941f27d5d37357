//! Exact bivariate polynomials in `(α, u)` and the derivative polynomials
//! `F_j`.
//!
//! Differentiating `e^{−α(1+u)²} (−1)^j α (π/2)^j (1+u²) F_j(α, u)` once in
//! `t`, with `du/dt = (π/2)(1+u²)`, gives the recurrence
//!
//! ```text
//! F_{j+1} = 2α(1+u)(1+u²)·F_j − 2u·F_j − (1+u²)·∂F_j/∂u,    F_1 = 2 + 2u
//! ```
//!
//! Coefficients grow quickly (the leading one is `2^j`, the others faster),
//! so everything is kept in arbitrary-size integers.

pub mod printed;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::univariate::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SympolyError {
    #[error("structural violation: {0}")]
    Structure(String),
    #[error("cannot parse polynomial term {term:?}: {reason}")]
    Parse { term: String, reason: &'static str },
}

/// Exponent pair `(degree in α, degree in u)`.
pub type Exponent = (u32, u32);

/// Sparse polynomial with integer coefficients in the variables `α` (written
/// `a` in text) and `u`. Zero coefficients are never stored, so structural
/// equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BivarPoly {
    coeffs: BTreeMap<Exponent, BigInt>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, alpha_deg: u32, u_deg: u32) -> Self {
        Self::from_terms([((alpha_deg, u_deg), c.into())])
    }

    /// The polynomial `α`.
    pub fn alpha() -> Self {
        Self::monomial(1, 1, 0)
    }

    /// The polynomial `u`.
    pub fn u() -> Self {
        Self::monomial(1, 0, 1)
    }

    /// Builds a polynomial from terms; repeated exponents are summed and
    /// zero coefficients dropped.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigInt)>,
    {
        let mut coeffs: BTreeMap<Exponent, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *coeffs.entry(e).or_default() += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, alpha_deg: u32, u_deg: u32) -> Option<&BigInt> {
        self.coeffs.get(&(alpha_deg, u_deg))
    }

    /// Terms in ascending `(α, u)` exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn degree_alpha(&self) -> Option<u32> {
        self.coeffs.keys().map(|e| e.0).max()
    }

    pub fn degree_u(&self) -> Option<u32> {
        self.coeffs.keys().map(|e| e.1).max()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(e, x)| (*e, x * c)))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative in `u`.
    pub fn d_du(&self) -> Self {
        Self::from_terms(
            self.coeffs
                .iter()
                .filter(|((_, k), _)| *k > 0)
                .map(|(&(i, k), c)| ((i, k - 1), c * BigInt::from(k))),
        )
    }

    pub fn eval_rational(&self, alpha: &BigRational, u: &BigRational) -> BigRational {
        self.restrict_alpha(alpha).eval(u)
    }

    /// Floating-point evaluation; Horner in `u` over Horner-in-`α`
    /// coefficients.
    pub fn eval_f64(&self, alpha: f64, u: f64) -> f64 {
        let Some(deg_u) = self.degree_u() else {
            return 0.0;
        };
        let mut by_u = vec![0.0f64; deg_u as usize + 1];
        let mut powers = Vec::new();
        for (&(i, k), c) in &self.coeffs {
            let i = i as usize;
            while powers.len() <= i {
                powers.push(alpha.powi(powers.len() as i32));
            }
            by_u[k as usize] += c.to_f64().unwrap_or(f64::NAN) * powers[i];
        }
        by_u.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    /// Substitutes a fixed rational `α`, leaving a polynomial in `u`.
    pub fn restrict_alpha(&self, alpha: &BigRational) -> UniPoly {
        let Some(deg_u) = self.degree_u() else {
            return UniPoly::zero();
        };
        let mut coeffs = vec![BigRational::zero(); deg_u as usize + 1];
        let mut powers: Vec<BigRational> = vec![BigRational::one()];
        for (&(i, k), c) in &self.coeffs {
            while powers.len() <= i as usize {
                let next = powers.last().unwrap() * alpha;
                powers.push(next);
            }
            coeffs[k as usize] += &powers[i as usize] * BigRational::from_integer(c.clone());
        }
        UniPoly::new(coeffs)
    }
}

pub fn poly_add(p: &BivarPoly, q: &BivarPoly) -> BivarPoly {
    p + q
}

pub fn poly_mul(p: &BivarPoly, q: &BivarPoly) -> BivarPoly {
    p * q
}

pub fn d_du(p: &BivarPoly) -> BivarPoly {
    p.d_du()
}

pub fn eval_rational(p: &BivarPoly, alpha: &BigRational, u: &BigRational) -> BigRational {
    p.eval_rational(alpha, u)
}

pub fn restrict_alpha(p: &BivarPoly, alpha: &BigRational) -> UniPoly {
    p.restrict_alpha(alpha)
}

impl Add for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        BivarPoly::from_terms(
            self.coeffs
                .iter()
                .chain(rhs.coeffs.iter())
                .map(|(e, c)| (*e, c.clone())),
        )
    }
}

impl Add for BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: BivarPoly) -> BivarPoly {
        &self + &rhs
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        -&self
    }
}

impl Sub for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        self + &(-rhs)
    }
}

impl Sub for BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: BivarPoly) -> BivarPoly {
        &self - &rhs
    }
}

impl Mul for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out: BTreeMap<Exponent, BigInt> = BTreeMap::new();
        for (&(i1, k1), c1) in &self.coeffs {
            for (&(i2, k2), c2) in &rhs.coeffs {
                *out.entry((i1 + i2, k1 + k2)).or_default() += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        BivarPoly { coeffs: out }
    }
}

impl Mul for BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: BivarPoly) -> BivarPoly {
        &self * &rhs
    }
}

/// Text form: terms `c*a^i*u^k` joined by `" + "` in ascending `(i, k)`
/// order. Factors with exponent 0 are omitted and `u^1` is written `u`.
/// Negative coefficients keep their sign inside the term (`2 + -4*u`).
impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&(i, k), c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if i > 0 {
                write!(f, "*a^{i}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "*u")?,
                _ => write!(f, "*u^{k}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for BivarPoly {
    type Err = SympolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut terms = Vec::new();
        for term in s.split(" + ") {
            let bad = |reason| SympolyError::Parse {
                term: term.to_string(),
                reason,
            };
            let mut factors = term.trim().split('*');
            let first = factors.next().ok_or_else(|| bad("empty term"))?;
            let (c, mut rest): (BigInt, Vec<&str>) = match first.parse::<BigInt>() {
                Ok(c) => (c, Vec::new()),
                Err(_) => (BigInt::one(), vec![first]),
            };
            rest.extend(factors);
            let (mut i, mut k) = (0u32, 0u32);
            for factor in rest {
                let (var, exp) = match factor.split_once('^') {
                    Some((v, e)) => (v, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                    None => (factor, 1),
                };
                match var {
                    "a" => i += exp,
                    "u" => k += exp,
                    _ => return Err(bad("unknown variable")),
                }
            }
            terms.push(((i, k), c));
        }
        Ok(Self::from_terms(terms))
    }
}

/// The coefficient `a_j` of the top monomial `α^{j−1} u^{3(j−1)+1}` of `F_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingTerm {
    pub a_j: BigInt,
    pub deg_alpha: u32,
    pub deg_u: u32,
}

impl fmt::Display for LeadingTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*a^{}*u^{}", self.a_j, self.deg_alpha, self.deg_u)
    }
}

/// `F_1 = 2 + 2u`.
pub fn f_seed() -> BivarPoly {
    BivarPoly::from_terms([((0, 0), BigInt::from(2)), ((0, 1), BigInt::from(2))])
}

/// One step of the recurrence, `F_j ↦ F_{j+1}`.
pub fn f_next(fj: &BivarPoly) -> BivarPoly {
    let one_plus_u = BivarPoly::from_terms([((0, 0), BigInt::one()), ((0, 1), BigInt::one())]);
    let one_plus_u2 = BivarPoly::from_terms([((0, 0), BigInt::one()), ((0, 2), BigInt::one())]);
    let growth = (&BivarPoly::monomial(2, 1, 0) * &one_plus_u) * one_plus_u2.clone();
    let chain = BivarPoly::monomial(2, 0, 1);
    &(&(&growth * fj) - &(&chain * fj)) - &(&one_plus_u2 * &fj.d_du())
}

/// `[F_1, …, F_l]`.
pub fn f_sequence(l: usize) -> Vec<BivarPoly> {
    let mut out = Vec::with_capacity(l);
    if l == 0 {
        return out;
    }
    out.push(f_seed());
    while out.len() < l {
        let next = f_next(out.last().unwrap());
        out.push(next);
    }
    out
}

/// Reads off `a_j`, inferring `j` from the degree in `α`. Fails when the
/// polynomial does not have the shape `a_j α^{j−1} u^{3(j−1)+1} + (lower)`
/// with `a_j > 0`.
pub fn leading_term(p: &BivarPoly) -> Result<LeadingTerm, SympolyError> {
    let deg_alpha = p
        .degree_alpha()
        .ok_or_else(|| SympolyError::Structure("zero polynomial".into()))?;
    let deg_u = 3 * deg_alpha + 1;
    if p.degree_u() != Some(deg_u) {
        return Err(SympolyError::Structure(format!(
            "degree in u is {:?}, expected {deg_u}",
            p.degree_u()
        )));
    }
    match p.coeff(deg_alpha, deg_u) {
        Some(c) if c.is_positive() => Ok(LeadingTerm {
            a_j: c.clone(),
            deg_alpha,
            deg_u,
        }),
        Some(c) => Err(SympolyError::Structure(format!(
            "coefficient of a^{deg_alpha}*u^{deg_u} is {c}, not positive"
        ))),
        None => Err(SympolyError::Structure(format!(
            "monomial a^{deg_alpha}*u^{deg_u} is missing"
        ))),
    }
}

/// `(1 + u)^n` as a polynomial, handy for writing expressions by hand.
pub fn one_plus_u_pow(n: u32) -> BivarPoly {
    (&BivarPoly::one() + &BivarPoly::u()).pow(n)
}

/// `(1 + u²)^n`.
pub fn one_plus_u2_pow(n: u32) -> BivarPoly {
    (&BivarPoly::one() + &BivarPoly::monomial(1, 0, 2)).pow(n)
}

/// A coefficient mismatch between two polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDiff {
    pub exponent: Exponent,
    pub left: BigInt,
    pub right: BigInt,
}

/// Monomials whose coefficients differ, in ascending exponent order.
pub fn term_diff(left: &BivarPoly, right: &BivarPoly) -> Vec<TermDiff> {
    let diff = left - right;
    diff.terms()
        .map(|(e, _)| TermDiff {
            exponent: e,
            left: left.coeff(e.0, e.1).cloned().unwrap_or_default(),
            right: right.coeff(e.0, e.1).cloned().unwrap_or_default(),
        })
        .collect()
}

/// `2^j`, the observed value of `a_j`.
pub fn power_of_two(j: u32) -> BigInt {
    Pow::pow(BigInt::from(2), j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> BivarPoly {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn addition() {
        assert!((&p("2 + 2*u") + &p("-2 + -2*u")).is_zero());
        assert_eq!(&p("2 + 2*u") + &BivarPoly::zero(), p("2 + 2*u"));
        assert_eq!(&f_seed() + &f_seed(), p("4 + 4*u"));
    }

    #[test]
    fn multiplication() {
        assert_eq!(&p("1 + 1*u") * &p("1 + 1*u"), p("1 + 2*u + 1*u^2"));
        let x = p("3 + -1*a^2*u + 5*a*u^3");
        assert_eq!(&x * &BivarPoly::one(), x);
        assert_eq!(
            &p("1 + 1*u^2") * &p("2 + 2*u"),
            p("2 + 2*u + 2*u^2 + 2*u^3")
        );
    }

    #[test]
    fn derivative_in_u() {
        assert_eq!(p("2 + 2*u").d_du(), p("2"));
        assert_eq!(p("1*a^1*u^3").d_du(), p("3*a^1*u^2"));
        assert!(p("7").d_du().is_zero());
    }

    #[test]
    fn seed_and_first_steps() {
        let f1 = f_seed();
        assert_eq!(f1.coeff(0, 0), Some(&BigInt::from(2)));
        assert_eq!(f1.coeff(0, 1), Some(&BigInt::from(2)));
        assert_eq!(f1.len(), 2);
        let lt = leading_term(&f1).unwrap();
        assert_eq!((lt.a_j, lt.deg_alpha, lt.deg_u), (BigInt::from(2), 0, 1));
        assert_eq!(f1.eval_rational(&q(5, 1), &q(0, 1)), q(2, 1));

        let f2 = f_next(&f1);
        assert_eq!(f2.eval_rational(&q(2, 1), &q(0, 1)), q(6, 1));
        let lt = leading_term(&f2).unwrap();
        assert_eq!((lt.a_j, lt.deg_alpha, lt.deg_u), (BigInt::from(4), 1, 4));
        let lt = leading_term(&f_next(&f2)).unwrap();
        assert_eq!((lt.a_j, lt.deg_alpha, lt.deg_u), (BigInt::from(8), 2, 7));
    }

    #[test]
    fn sequence_lengths() {
        assert_eq!(f_sequence(1), vec![f_seed()]);
        assert_eq!(f_sequence(4).len(), 4);
        assert!(f_sequence(0).is_empty());
    }

    #[test]
    fn leading_coefficients_are_powers_of_two() {
        for (j, f) in f_sequence(8).iter().enumerate() {
            let j = j as u32 + 1;
            let lt = leading_term(f).unwrap();
            assert_eq!(lt.a_j, power_of_two(j));
            assert_eq!(lt.deg_alpha, j - 1);
            assert_eq!(lt.deg_u, 3 * (j - 1) + 1);
        }
    }

    #[test]
    fn leading_term_rejects_wrong_shapes() {
        assert!(leading_term(&BivarPoly::zero()).is_err());
        assert!(leading_term(&p("1 + -2*a^1*u^4")).is_err());
        assert!(leading_term(&p("1*a^1*u^3")).is_err());
        // right degrees, top monomial absent
        assert!(leading_term(&p("1*a^1*u^2 + 1*u^4")).is_err());
    }

    #[test]
    fn evaluation_and_restriction() {
        let fs = f_sequence(3);
        assert!(fs[0].eval_rational(&q(17, 3), &q(-1, 1)).is_zero());
        // F_2(1/2, u) = 2u²(u² + 2u − 1)
        let v = fs[1].eval_rational(&q(1, 2), &q(1, 5));
        assert_eq!(v, q(2, 25) * q(-14, 25));
        assert!(v < q(0, 1));

        assert_eq!(fs[0].restrict_alpha(&q(9, 7)), UniPoly::from_ints([2, 2]));
        let expected = &(&(&p("8") * &one_plus_u_pow(2)) * &one_plus_u2_pow(1))
            - &(&(&p("2") * &one_plus_u2_pow(1)) + &(&p("4*u") * &one_plus_u_pow(1)));
        assert_eq!(
            fs[1].restrict_alpha(&q(2, 1)),
            expected.restrict_alpha(&q(0, 1))
        );
        for (j, f) in fs.iter().enumerate() {
            assert_eq!(f.restrict_alpha(&q(1, 3)).degree(), Some(3 * j + 1));
        }
    }

    #[test]
    fn float_evaluation_matches_exact() {
        let fs = f_sequence(5);
        for f in &fs {
            let exact = f.eval_rational(&q(5, 2), &q(3, 4));
            let approx = f.eval_f64(2.5, 0.75);
            let exact = exact.to_f64().unwrap();
            assert!((approx - exact).abs() <= 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn text_form() {
        assert_eq!(f_seed().to_string(), "2 + 2*u");
        assert_eq!(BivarPoly::zero().to_string(), "0");
        let f2 = f_next(&f_seed());
        let text = f2.to_string();
        assert!(text.starts_with("-2 + -4*u + -6*u^2 + 4*a^1 + "), "{text}");
        assert!(text.ends_with("4*a^1*u^4"), "{text}");
        assert_eq!(text.parse::<BivarPoly>().unwrap(), f2);
        assert_eq!(leading_term(&f2).unwrap().to_string(), "4*a^1*u^4");
        assert!("2 + 3*x".parse::<BivarPoly>().is_err());
    }

    #[test]
    fn diff_reports_mismatches() {
        let d = term_diff(&p("1 + 2*u"), &p("1 + 3*u + 1*a^1"));
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].exponent, (0, 1));
        assert_eq!(d[1].exponent, (1, 0));
        assert_eq!(d[1].left, BigInt::zero());
    }

    fn arb_poly() -> impl Strategy<Value = BivarPoly> {
        prop::collection::vec(((0u32..4, 0u32..6), -50i64..50), 0..8).prop_map(|terms| {
            BivarPoly::from_terms(terms.into_iter().map(|(e, c)| (e, BigInt::from(c))))
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn product_rule(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!((&a * &b).d_du(), &(&a.d_du() * &b) + &(&a * &b.d_du()));
        }

        #[test]
        fn text_round_trip(a in arb_poly()) {
            prop_assert_eq!(a.to_string().parse::<BivarPoly>().unwrap(), a);
        }

        #[test]
        fn canonical_form_has_no_zeros(a in arb_poly(), b in arb_poly()) {
            let s = &a - &b;
            prop_assert!(s.terms().all(|(_, c)| !c.is_zero()));
        }
    }
}
