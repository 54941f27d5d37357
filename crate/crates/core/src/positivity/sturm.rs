//! Exact nonnegativity of a rational polynomial on `[0, ∞)` via Sturm
//! sequences over the integers.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::univariate::UniPoly;

/// Integer polynomial, ascending coefficients, no trailing zeros.
type IntPoly = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RayOutcome {
    Nonnegative,
    Negative {
        u_star: BigRational,
        value: BigRational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayDecision {
    pub outcome: RayOutcome,
    /// Distinct roots in `(0, ∞)`, when the Sturm count was carried out.
    pub positive_roots: Option<usize>,
    /// Set when the input was the zero polynomial.
    pub zero_polynomial: bool,
}

fn trim(mut p: IntPoly) -> IntPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn degree(p: &IntPoly) -> usize {
    p.len() - 1
}

fn primitive_positive(p: IntPoly) -> IntPoly {
    let content = p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() || content.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &content).collect()
}

fn derivative(p: &IntPoly) -> IntPoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect(),
    )
}

/// Pseudo-remainder `lc(b)^s · (a mod b)` together with `s`.
fn pseudo_remainder(a: &IntPoly, b: &IntPoly) -> (IntPoly, u32) {
    let mut r = a.clone();
    let db = degree(b);
    let lb = b.last().unwrap();
    let mut steps = 0;
    while !r.is_empty() && degree(&r) >= db {
        let shift = degree(&r) - db;
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (k, bc) in b.iter().enumerate() {
            r[k + shift] -= &lr * bc;
        }
        r = trim(r);
        steps += 1;
    }
    (r, steps)
}

fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let (mut x, mut y) = (primitive_positive(a.clone()), primitive_positive(b.clone()));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let (r, _) = pseudo_remainder(&x, &y);
        x = y;
        y = primitive_positive(r);
    }
    x
}

fn to_rational(p: &IntPoly) -> Vec<BigRational> {
    p.iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect()
}

/// Exact quotient `a / b` (the remainder is assumed zero), made primitive.
fn exact_quotient(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut r = to_rational(a);
    let b = to_rational(b);
    let db = b.len() - 1;
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let coef = &r[k + db] / &b[db];
        for (i, bc) in b.iter().enumerate() {
            r[k + i] -= &coef * bc;
        }
        q[k] = coef;
    }
    debug_assert!(r.iter().all(Zero::is_zero));
    UniPoly::new(q).to_primitive_integer()
}

/// Sign of `p(x)` computed without forming the rational value.
fn sign_at(p: &IntPoly, x: &BigRational) -> Ordering {
    let (num, den) = (x.numer(), x.denom());
    let n = degree(p);
    let mut acc = BigInt::zero();
    let mut num_pow = BigInt::one();
    let mut den_pows = vec![BigInt::one(); n + 1];
    for k in 1..=n {
        den_pows[k] = &den_pows[k - 1] * den;
    }
    for (k, c) in p.iter().enumerate() {
        if !c.is_zero() {
            acc += c * &num_pow * &den_pows[n - k];
        }
        num_pow *= num;
    }
    // den > 0 for a normalized rational
    acc.cmp(&BigInt::zero())
}

/// Sturm chain of a square-free polynomial.
fn sturm_chain(q: &IntPoly) -> Vec<IntPoly> {
    let mut chain = vec![q.clone(), primitive_positive(derivative(q))];
    loop {
        let n = chain.len();
        let (a, b) = (&chain[n - 2], &chain[n - 1]);
        if degree(b) == 0 {
            break;
        }
        let (r, steps) = pseudo_remainder(a, b);
        if r.is_empty() {
            break;
        }
        // −rem(a, b), scaled by a positive factor
        let flip = b.last().unwrap().is_negative() && steps % 2 == 1;
        let next: IntPoly = if flip {
            r
        } else {
            r.into_iter().map(|c| -c).collect()
        };
        chain.push(primitive_positive(next));
    }
    chain
}

fn variations(chain: &[IntPoly], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last = Ordering::Equal;
    for p in chain {
        let s = sign_at(p, x);
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Integer strictly greater than every root modulus (Cauchy bound).
fn root_bound(p: &IntPoly) -> BigRational {
    let lead = p.last().unwrap().abs();
    let max = p[..p.len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_default();
    let (quot, rem) = max.div_rem(&lead);
    let ceil = if rem.is_zero() { quot } else { quot + 1 };
    BigRational::from_integer(ceil + 1)
}

/// Isolating intervals `(lo, hi]` of the roots of square-free `q` inside
/// `(0, bound]`; no endpoint except `0` is a root.
fn isolate(q: &IntPoly, bound: &BigRational) -> Vec<(BigRational, BigRational)> {
    let chain = sturm_chain(q);
    let mut stack = vec![(BigRational::zero(), bound.clone())];
    let mut found = Vec::new();
    let two = BigRational::from_integer(BigInt::from(2));
    while let Some((lo, hi)) = stack.pop() {
        let count = variations(&chain, &lo) - variations(&chain, &hi);
        match count {
            0 => {}
            1 => found.push((lo, hi)),
            _ => {
                let mut mid = (&lo + &hi) / &two;
                let mut frac = BigRational::new(BigInt::one(), BigInt::from(4));
                while sign_at(q, &mid) == Ordering::Equal {
                    mid = &lo
                        + (&hi - &lo) * (BigRational::new(BigInt::one(), BigInt::from(2)) + &frac);
                    frac /= &two;
                }
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    found.sort();
    found
}

/// First of `1, 1/2, 1/4, …` at which `p` is negative; requires `p(0) < 0`.
fn negative_near_zero(p: &IntPoly) -> BigRational {
    let mut x = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    while sign_at(p, &x) != Ordering::Less {
        x /= &two;
    }
    x
}

/// Decides whether `p(u) ≥ 0` for every `u ≥ 0`.
pub fn nonneg_on_ray(p: &UniPoly) -> RayDecision {
    if p.is_zero() {
        return RayDecision {
            outcome: RayOutcome::Nonnegative,
            positive_roots: Some(0),
            zero_polynomial: true,
        };
    }
    let full = p.to_primitive_integer();
    let negative = |u: BigRational| {
        let value = p.eval(&u);
        RayOutcome::Negative { u_star: u, value }
    };

    // p = u^m · r with r(0) ≠ 0; u^m ≥ 0 does not affect the sign on the ray
    let zeros = full.iter().take_while(|c| c.is_zero()).count();
    let r: IntPoly = full[zeros..].to_vec();

    if r[0].is_negative() {
        return RayDecision {
            outcome: negative(negative_near_zero(&r)),
            positive_roots: None,
            zero_polynomial: false,
        };
    }
    let bound = root_bound(&r);
    if r.last().unwrap().is_negative() {
        return RayDecision {
            outcome: negative(bound),
            positive_roots: None,
            zero_polynomial: false,
        };
    }
    if r.len() == 1 {
        return RayDecision {
            outcome: RayOutcome::Nonnegative,
            positive_roots: Some(0),
            zero_polynomial: false,
        };
    }

    let g = gcd(&r, &derivative(&r));
    let square_free = if g.len() > 1 {
        exact_quotient(&r, &g)
    } else {
        r.clone()
    };
    let intervals = isolate(&square_free, &bound);

    // between consecutive sample points there is at most one root; r is
    // nonnegative on the ray iff it is positive at every sample
    for (lo, hi) in &intervals {
        for x in [lo, hi] {
            if x.is_zero() {
                continue;
            }
            if sign_at(&r, x) == Ordering::Less {
                return RayDecision {
                    outcome: negative(x.clone()),
                    positive_roots: Some(intervals.len()),
                    zero_polynomial: false,
                };
            }
        }
    }
    RayDecision {
        outcome: RayOutcome::Nonnegative,
        positive_roots: Some(intervals.len()),
        zero_polynomial: false,
    }
}

/// Number of distinct real roots of `p` in `(lo, hi]`, by a Sturm count.
pub fn count_roots(p: &UniPoly, lo: &BigRational, hi: &BigRational) -> usize {
    let ints = p.to_primitive_integer();
    if ints.len() < 2 {
        return 0;
    }
    let g = gcd(&ints, &derivative(&ints));
    let q = if g.len() > 1 {
        exact_quotient(&ints, &g)
    } else {
        ints
    };
    let chain = sturm_chain(&q);
    variations(&chain, lo).saturating_sub(variations(&chain, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn roots_poly(roots: &[(i64, i64)]) -> UniPoly {
        roots.iter().fold(UniPoly::from_ints([1]), |acc, &(n, d)| {
            &acc * &UniPoly::new(vec![q(-n, d), q(1, 1)])
        })
    }

    #[test]
    fn perfect_square_is_nonnegative() {
        let d = nonneg_on_ray(&UniPoly::from_ints([1, -2, 1]));
        assert_eq!(d.outcome, RayOutcome::Nonnegative);
        assert_eq!(d.positive_roots, Some(1));
    }

    #[test]
    fn finds_negative_region_near_zero() {
        let p = UniPoly::from_ints([-1, 2, 1]);
        let d = nonneg_on_ray(&p);
        match d.outcome {
            RayOutcome::Negative { u_star, value } => {
                assert!(u_star > q(0, 1));
                // √2 − 1 > 0.414
                assert!(u_star < q(414, 1000));
                assert_eq!(value, p.eval(&u_star));
                assert!(value < q(0, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_root_inside_the_ray() {
        // (u − 1)(u − 2) is negative on (1, 2)
        let p = roots_poly(&[(1, 1), (2, 1)]);
        match nonneg_on_ray(&p).outcome {
            RayOutcome::Negative { u_star, value } => {
                assert!(u_star > q(1, 1) && u_star < q(2, 1));
                assert!(value < q(0, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn close_double_roots() {
        // (u − 1/3)²(u − 1/3 − 1/1000)² ≥ 0 with two nearby double roots
        let p = roots_poly(&[(1, 3), (1, 3), (1003, 3000), (1003, 3000)]);
        let d = nonneg_on_ray(&p);
        assert_eq!(d.outcome, RayOutcome::Nonnegative);
        assert_eq!(d.positive_roots, Some(2));
        // a nearby odd pair is caught
        let p = roots_poly(&[(1, 3), (1, 3), (1003, 3000), (1004, 3000)]);
        assert!(matches!(
            nonneg_on_ray(&p).outcome,
            RayOutcome::Negative { .. }
        ));
    }

    #[test]
    fn roots_at_zero_and_negative_roots() {
        // u³(u + 1)(u + 5): root at zero and negative roots only
        let p = &UniPoly::from_ints([0, 0, 0, 1]) * &roots_poly(&[(-1, 1), (-5, 1)]);
        assert_eq!(nonneg_on_ray(&p).outcome, RayOutcome::Nonnegative);
        // −u² is negative everywhere except 0
        let d = nonneg_on_ray(&UniPoly::from_ints([0, 0, -1]));
        assert!(matches!(d.outcome, RayOutcome::Negative { .. }));
    }

    #[test]
    fn negative_leading_coefficient() {
        let p = UniPoly::from_ints([5, 3, -1]);
        match nonneg_on_ray(&p).outcome {
            RayOutcome::Negative { u_star, value } => {
                assert_eq!(value, p.eval(&u_star));
                assert!(value < q(0, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constants_and_zero() {
        assert_eq!(
            nonneg_on_ray(&UniPoly::from_ints([3])).outcome,
            RayOutcome::Nonnegative
        );
        let d = nonneg_on_ray(&UniPoly::zero());
        assert!(d.zero_polynomial);
        assert!(matches!(
            nonneg_on_ray(&UniPoly::from_ints([-3])).outcome,
            RayOutcome::Negative { .. }
        ));
    }

    #[test]
    fn root_counts() {
        let p = roots_poly(&[(1, 2), (3, 1), (3, 1), (-2, 1)]);
        assert_eq!(count_roots(&p, &q(0, 1), &q(10, 1)), 2);
        assert_eq!(count_roots(&p, &q(-10, 1), &q(10, 1)), 3);
        assert_eq!(count_roots(&p, &q(1, 1), &q(2, 1)), 0);
    }

    #[test]
    fn sturm_chain_of_cubic() {
        // u³ − u has roots −1, 0, 1
        let p = vec![
            BigInt::from(0),
            BigInt::from(-1),
            BigInt::from(0),
            BigInt::from(1),
        ];
        let chain = sturm_chain(&p);
        let v = |x: BigRational| variations(&chain, &x);
        assert_eq!(v(q(-2, 1)) - v(q(2, 1)), 3);
        assert_eq!(v(q(-1, 2)) - v(q(1, 2)), 1);
    }
}
