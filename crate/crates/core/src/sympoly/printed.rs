//! Hand-expanded forms of `F_2`, `F_3`, `F_4` and of `G(2, u) = F_4(2, u)/(1+u²)`
//! as they are usually written down, in factored notation. Each is rebuilt
//! with the polynomial engine so it can be compared exactly against the
//! recurrence output.

use num_bigint::BigInt;

use super::{one_plus_u2_pow as w, one_plus_u_pow as v, BivarPoly};

fn c(n: i64) -> BivarPoly {
    BivarPoly::constant(n)
}

fn a(n: u32) -> BivarPoly {
    BivarPoly::monomial(1, n, 0)
}

fn u(n: u32) -> BivarPoly {
    BivarPoly::monomial(1, 0, n)
}

fn prod(factors: &[BivarPoly]) -> BivarPoly {
    factors.iter().fold(BivarPoly::one(), |acc, f| &acc * f)
}

fn sum(terms: &[BivarPoly]) -> BivarPoly {
    terms.iter().fold(BivarPoly::zero(), |acc, t| &acc + t)
}

/// `1 + k·u^n`
fn lin(k: i64, n: u32) -> BivarPoly {
    &c(1) + &BivarPoly::monomial(k, 0, n)
}

/// `4α(1+u)²(1+u²) − 2(1+u²) − 4(1+u)u`
pub fn f2() -> BivarPoly {
    sum(&[
        prod(&[c(4), a(1), v(2), w(1)]),
        prod(&[c(-2), w(1)]),
        prod(&[c(-4), v(1), u(1)]),
    ])
}

/// `8α²(1+u)³(1+u²)² − 12α(1+u)(1+u²)² − 24αu(1+u)²(1+u²)
///  + 8(1+u²)u + 4(1+2u)(1+u²) + 8(1+u)u²`
pub fn f3() -> BivarPoly {
    sum(&[
        prod(&[c(8), a(2), v(3), w(2)]),
        prod(&[c(-12), a(1), v(1), w(2)]),
        prod(&[c(-24), a(1), u(1), v(2), w(1)]),
        prod(&[c(8), w(1), u(1)]),
        prod(&[c(4), lin(2, 1), w(1)]),
        prod(&[c(8), v(1), u(2)]),
    ])
}

/// The factored `F_3 = 4α(1+u)(1+u²)[2α(1+u)²(1+u²) − 3(1+u²) − 6u(1+u)]
/// + 8(1+u²)u + 4(1+2u)(1+u²) + 8(1+u)u²`.
pub fn f3_factored() -> BivarPoly {
    let bracket = sum(&[
        prod(&[c(2), a(1), v(2), w(1)]),
        prod(&[c(-3), w(1)]),
        prod(&[c(-6), u(1), v(1)]),
    ]);
    sum(&[
        prod(&[c(4), a(1), v(1), w(1), bracket]),
        prod(&[c(8), w(1), u(1)]),
        prod(&[c(4), lin(2, 1), w(1)]),
        prod(&[c(8), v(1), u(2)]),
    ])
}

/// The twelve-term `F_4` in factored notation.
pub fn f4() -> BivarPoly {
    sum(&[
        prod(&[c(16), a(3), v(4), w(3)]),
        prod(&[c(-48), a(2), v(2), w(3)]),
        prod(&[c(-96), a(2), v(3), u(1), w(2)]),
        prod(&[c(136), a(1), v(1), u(1), w(2)]),
        prod(&[c(8), a(1), v(1), lin(2, 1), w(2)]),
        prod(&[c(64), a(1), v(2), u(2), w(1)]),
        prod(&[c(12), a(1), w(3)]),
        prod(&[c(24), a(1), v(2), lin(3, 2), w(1)]),
        prod(&[c(-104), u(2), w(1)]),
        prod(&[c(-32), u(1), w(1)]),
        prod(&[c(-16), w(1)]),
        prod(&[c(-16), u(3), v(1)]),
    ])
}

/// `G(2, u)·(1 + u²)` from the expanded form
/// `2^7u^8 + 2^9u^7 + (5·2^6 + 2^7)u^6 + 280u^4 + 96u^3 − 120u^2 + 128u + 8
///  − 16u³(1+u)/(1+u²)`, cleared of its denominator.
pub fn g_at_two_times_denominator() -> BivarPoly {
    let polynomial_part = BivarPoly::from_terms(
        [
            (8, 128),
            (7, 512),
            (6, 5 * 64 + 128),
            (4, 280),
            (3, 96),
            (2, -120),
            (1, 128),
            (0, 8),
        ]
        .into_iter()
        .map(|(k, c)| ((0, k), BigInt::from(c))),
    );
    &(&polynomial_part * &w(1)) - &prod(&[c(16), u(3), v(1)])
}

/// Substitutes an integer value of `α`, keeping the result as a `(α, u)`
/// polynomial with no `α` terms.
pub fn at_integer_alpha(p: &BivarPoly, alpha: i64) -> BivarPoly {
    let alpha = BigInt::from(alpha);
    BivarPoly::from_terms(
        p.terms()
            .map(|((i, k), coeff)| ((0, k), coeff * num_traits::Pow::pow(&alpha, i))),
    )
}
