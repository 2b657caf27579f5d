//! Integer form of the marked sweep for exact arithmetic.
//!
//! With `d` the common denominator of the connected counts `g_j = j! lambda_j`
//! and `e` that of the marks, the quantities
//!
//! ```text
//! A_i(m) = m! d^m e^i a_i(m)
//! ```
//!
//! are integers, and adding `k` components of size `j` multiplies `A_i(m-jk)`
//! by `binom(m, jk) * (jk)!/(k! j!^k) * (d^j g_j)^k`. Working in integers
//! avoids a gcd per rational operation, which dominates the cost otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::additive::AdditiveFunction;
use crate::counting::{block_weights, factorials};
use crate::error::Result;
use crate::registry::AssemblyClass;

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// `(a0, a1, a2)` for orders `0..=upto`.
pub(crate) fn marked_totals(
    class: &AssemblyClass,
    h: &AdditiveFunction,
    upto: usize,
) -> Result<[Vec<BigRational>; 3]> {
    let facts = factorials(upto);
    // g[j] = j! lambda_j; sizes with no structures are skipped
    let g: Vec<BigRational> = (0..=upto)
        .map(|j| {
            if j == 0 {
                BigRational::zero()
            } else {
                class.lambda(j) * BigRational::from_integer(facts[j].clone())
            }
        })
        .collect();
    let sizes: Vec<usize> = (1..=upto).filter(|&j| !g[j].is_zero()).collect();
    let marks: Vec<Vec<BigRational>> = (0..=upto)
        .map(|j| {
            if j == 0 || g[j].is_zero() {
                return Ok(Vec::new());
            }
            (0..=upto / j).map(|k| h.h::<BigRational>(j, k)).collect()
        })
        .collect::<Result<_>>()?;
    let d = lcm_of_denominators(sizes.iter().map(|&j| &g[j]));
    let e = lcm_of_denominators(marks.iter().flatten());

    let mut a0 = vec![BigInt::zero(); upto + 1];
    let mut a1 = vec![BigInt::zero(); upto + 1];
    let mut a2 = vec![BigInt::zero(); upto + 1];
    a0[0] = BigInt::one();
    let mut d_pow = BigInt::one();
    let mut last_j = 0;
    for &j in &sizes {
        for _ in last_j..j {
            d_pow *= &d;
        }
        last_j = j;
        let base = (&g[j] * BigRational::from_integer(d_pow.clone())).to_integer();
        let coef = block_weights(&facts, j, &base, upto / j);
        let scaled: Vec<BigInt> = marks[j]
            .iter()
            .map(|m| (m * BigRational::from_integer(e.clone())).to_integer())
            .collect();
        let squared: Vec<BigInt> = scaled.iter().map(|m| m * m).collect();
        let twice: Vec<BigInt> = scaled.iter().map(|m| m * 2).collect();
        for m in (j..=upto).rev() {
            let mut s0 = BigInt::zero();
            let mut s1 = BigInt::zero();
            let mut s2 = BigInt::zero();
            for k in 1..=m / j {
                let r = m - j * k;
                if a0[r].is_zero() {
                    continue;
                }
                let c = &coef[k] * (&facts[m] / (&facts[r] * &facts[j * k]));
                s0 += &c * &a0[r];
                if scaled[k].is_zero() {
                    s1 += &c * &a1[r];
                    s2 += &c * &a2[r];
                } else {
                    s1 += &c * (&a1[r] + &scaled[k] * &a0[r]);
                    s2 += &c * (&a2[r] + &twice[k] * &a1[r] + &squared[k] * &a0[r]);
                }
            }
            a0[m] += s0;
            a1[m] += s1;
            a2[m] += s2;
        }
    }

    let mut out = [
        Vec::with_capacity(upto + 1),
        Vec::with_capacity(upto + 1),
        Vec::with_capacity(upto + 1),
    ];
    let mut d_pow = BigInt::one();
    for m in 0..=upto {
        let scale = &facts[m] * &d_pow;
        let mut den = scale;
        for (i, a) in [&a0, &a1, &a2].into_iter().enumerate() {
            if i > 0 {
                den *= &e;
            }
            out[i].push(BigRational::new(a[m].clone(), den.clone()));
        }
        d_pow *= &d;
    }
    Ok(out)
}
