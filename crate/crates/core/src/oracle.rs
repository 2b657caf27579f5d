//! Brute-force references computed straight from the definitions.
//!
//! Profiles `s = (s_1, ..., s_n)` with `sum j s_j = n` are enumerated one at a
//! time and every quantity is a direct weighted sum over them. Nothing here
//! uses the recurrences of [`crate::counting`].

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::additive::AdditiveFunction;
use crate::error::{Error, Result};
use crate::moments::SpectrumPmf;
use crate::number::factorial;
use crate::registry::AssemblyClass;

/// Largest order accepted by [`enumerate_profiles`].
pub const PROFILE_CAP: usize = 80;
/// Largest order accepted by [`structure_oracle_permutations`].
pub const PERMUTATION_CAP: usize = 8;

/// A component profile; `multiplicities[j - 1] = s_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    pub multiplicities: Vec<usize>,
}

impl Profile {
    pub fn order(&self) -> usize {
        self.multiplicities
            .iter()
            .enumerate()
            .map(|(i, s)| (i + 1) * s)
            .sum()
    }

    pub fn count(&self, j: usize) -> usize {
        j.checked_sub(1)
            .and_then(|i| self.multiplicities.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// `prod_j lambda_j^{s_j} / s_j!`.
    pub fn weight(&self, class: &AssemblyClass) -> BigRational {
        let mut w = BigRational::one();
        for (i, &s) in self.multiplicities.iter().enumerate() {
            if s > 0 {
                w *= power_over_factorial(&class.lambda(i + 1), s);
            }
        }
        w
    }

    /// `(j, s_j)` for the nonzero multiplicities.
    pub fn sparse(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.multiplicities
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .map(|(i, &s)| (i + 1, s))
    }
}

fn power_over_factorial(x: &BigRational, k: usize) -> BigRational {
    let mut p = BigRational::one();
    for _ in 0..k {
        p *= x;
    }
    p / BigRational::from_integer(factorial(k))
}

/// Partitions of `n` in reverse lexicographic order of their parts, starting
/// from `(n)` and ending with `(1, ..., 1)`.
#[derive(Debug, Clone)]
pub struct Profiles {
    n: usize,
    parts: Vec<usize>,
    started: bool,
    done: bool,
}

impl Profiles {
    fn advance(&mut self) -> bool {
        let ones = self.parts.iter().rev().take_while(|&&p| p == 1).count();
        if ones == self.parts.len() {
            return false;
        }
        self.parts.truncate(self.parts.len() - ones);
        let v = self.parts.pop().expect("part larger than one") - 1;
        let mut rest = ones + v + 1;
        while rest >= v {
            self.parts.push(v);
            rest -= v;
        }
        if rest > 0 {
            self.parts.push(rest);
        }
        true
    }
}

impl Iterator for Profiles {
    type Item = Profile;

    fn next(&mut self) -> Option<Profile> {
        if self.done {
            return None;
        }
        if self.started {
            if !self.advance() {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        let mut multiplicities = vec![0; self.n];
        for &p in &self.parts {
            multiplicities[p - 1] += 1;
        }
        if self.n == 0 {
            self.done = true;
        }
        Some(Profile { multiplicities })
    }
}

/// Streams every profile of order `n` exactly once.
pub fn enumerate_profiles(n: usize) -> Result<Profiles> {
    if n > PROFILE_CAP {
        return Err(Error::AboveCap {
            n,
            cap: PROFILE_CAP,
        });
    }
    Ok(Profiles {
        n,
        parts: if n == 0 { Vec::new() } else { vec![n] },
        started: false,
        done: false,
    })
}

/// `Q(n)` as a direct sum over profiles.
pub fn oracle_q(class: &AssemblyClass, n: usize) -> Result<BigRational> {
    Ok(enumerate_profiles(n)?.map(|p| p.weight(class)).sum())
}

/// `P(k_j = k)` by summing the weights of the profiles with `s_j = k`.
pub fn oracle_pmf(class: &AssemblyClass, n: usize, j: usize) -> Result<SpectrumPmf<BigRational>> {
    if j == 0 || j > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= j <= n, got j={j}, n={n}"
        )));
    }
    let mut sums = vec![BigRational::zero(); n / j + 1];
    let mut total = BigRational::zero();
    for p in enumerate_profiles(n)? {
        let w = p.weight(class);
        sums[p.count(j)] += &w;
        total += w;
    }
    if total.is_zero() {
        return Err(Error::EmptySupport { n });
    }
    Ok(SpectrumPmf {
        n,
        j,
        probabilities: sums.into_iter().map(|s| s / &total).collect(),
    })
}

/// Exact `(mean, variance)` of `h` over the profile measure.
pub fn oracle_moments(
    class: &AssemblyClass,
    n: usize,
    h: &AdditiveFunction,
) -> Result<(BigRational, BigRational)> {
    let summary = OracleSummary::compute(class, n, std::slice::from_ref(h))?;
    Ok(summary.moments[0].clone())
}

/// Everything the oracle knows about one order, from a single enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSummary {
    pub n: usize,
    pub q: BigRational,
    /// `pmfs[j - 1]` is the law of `k_j`.
    pub pmfs: Vec<SpectrumPmf<BigRational>>,
    /// `(mean, variance)` per requested function.
    pub moments: Vec<(BigRational, BigRational)>,
    /// `sum_j sum_k h_j(k)^2 P(k_j = k)` per requested function.
    pub second_moment_bounds: Vec<BigRational>,
}

impl OracleSummary {
    pub fn compute(
        class: &AssemblyClass,
        n: usize,
        functions: &[AdditiveFunction],
    ) -> Result<Self> {
        // weight tables lambda_j^s / s! for every size and multiplicity
        let factors: Vec<Vec<BigRational>> = (1..=n)
            .map(|j| {
                let lam = class.lambda(j);
                (0..=n / j).map(|s| power_over_factorial(&lam, s)).collect()
            })
            .collect();
        let mut q = BigRational::zero();
        let mut by_count: Vec<Vec<BigRational>> = (1..=n)
            .map(|j| vec![BigRational::zero(); n / j + 1])
            .collect();
        let mut first = vec![BigRational::zero(); functions.len()];
        let mut second = vec![BigRational::zero(); functions.len()];
        for p in enumerate_profiles(n)? {
            let mut w = BigRational::one();
            for (j, s) in p.sparse() {
                w *= &factors[j - 1][s];
            }
            if w.is_zero() {
                continue;
            }
            for (j, s) in p.sparse() {
                by_count[j - 1][s] += &w;
            }
            for (i, h) in functions.iter().enumerate() {
                let value: BigRational = h.on_counts(&p.multiplicities)?;
                let wv = &w * &value;
                second[i] += &wv * &value;
                first[i] += wv;
            }
            q += w;
        }
        if q.is_zero() {
            return Err(Error::EmptySupport { n });
        }
        let pmfs: Vec<SpectrumPmf<BigRational>> = by_count
            .into_iter()
            .enumerate()
            .map(|(i, mut sums)| {
                let positive: BigRational = sums.iter().skip(1).sum();
                sums[0] = &q - positive;
                SpectrumPmf {
                    n,
                    j: i + 1,
                    probabilities: sums.into_iter().map(|s| s / &q).collect(),
                }
            })
            .collect();
        let mut moments = Vec::with_capacity(functions.len());
        let mut second_moment_bounds = Vec::with_capacity(functions.len());
        for (i, h) in functions.iter().enumerate() {
            let mean = &first[i] / &q;
            let variance = &second[i] / &q - &mean * &mean;
            moments.push((mean, variance));
            let mut bound = BigRational::zero();
            for pmf in &pmfs {
                for (k, p) in pmf.probabilities.iter().enumerate().skip(1) {
                    let v: BigRational = h.h(pmf.j, k)?;
                    bound += &v * &v * p;
                }
            }
            second_moment_bounds.push(bound);
        }
        Ok(OracleSummary {
            n,
            q,
            pmfs,
            moments,
            second_moment_bounds,
        })
    }
}

/// Exact `(mean, variance)` of `h` over all `n!` permutations, with the cycle
/// type of each permutation computed directly.
pub fn structure_oracle_permutations(
    n: usize,
    h: &AdditiveFunction,
) -> Result<(BigRational, BigRational)> {
    if n > PERMUTATION_CAP {
        return Err(Error::AboveCap {
            n,
            cap: PERMUTATION_CAP,
        });
    }
    let mut first = BigRational::zero();
    let mut second = BigRational::zero();
    let mut total = 0u64;
    for perm in (0..n).permutations(n) {
        let counts = cycle_type(&perm);
        let value: BigRational = h.on_counts(&counts)?;
        second += &value * &value;
        first += value;
        total += 1;
    }
    let total = BigRational::from_integer(BigInt::from(total));
    let mean = first / &total;
    let variance = second / &total - &mean * &mean;
    Ok((mean, variance))
}

/// `counts[j - 1]` = number of cycles of length `j`.
pub fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut counts = vec![0; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        counts[len - 1] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::builtin_class;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn small_orders_list_expected_profiles() {
        let three: Vec<_> = enumerate_profiles(3)
            .unwrap()
            .map(|p| p.multiplicities)
            .collect();
        assert_eq!(three, vec![vec![0, 0, 1], vec![1, 1, 0], vec![3, 0, 0]]);
        assert_eq!(enumerate_profiles(5).unwrap().count(), 7);
        let zero: Vec<_> = enumerate_profiles(0).unwrap().collect();
        assert_eq!(zero.len(), 1);
        assert!(zero[0].multiplicities.is_empty());
        assert!(matches!(
            enumerate_profiles(81),
            Err(Error::AboveCap { .. })
        ));
    }

    #[test]
    fn parts_come_in_reverse_lexicographic_order() {
        let parts: Vec<Vec<usize>> = enumerate_profiles(6)
            .unwrap()
            .map(|p| {
                let mut v: Vec<usize> = p
                    .sparse()
                    .flat_map(|(j, s)| std::iter::repeat_n(j, s))
                    .collect();
                v.reverse();
                v
            })
            .collect();
        let mut sorted = parts.clone();
        sorted.sort_by(|a, b| b.cmp(a));
        assert_eq!(parts, sorted);
        assert_eq!(parts.len(), 11);
    }

    #[test]
    fn set_partition_weight_sum() {
        let class = builtin_class("set_partitions").unwrap();
        assert_eq!(oracle_q(&class, 3).unwrap(), q(5, 6));
    }

    #[test]
    fn permutation_references() {
        let class = builtin_class("permutations").unwrap();
        assert_eq!(oracle_pmf(&class, 3, 1).unwrap().probabilities[1], q(1, 2));
        let w = AdditiveFunction::component_count();
        assert_eq!(
            oracle_moments(&class, 3, &w).unwrap(),
            (q(11, 6), q(17, 36))
        );
        assert_eq!(
            structure_oracle_permutations(3, &w).unwrap(),
            (q(11, 6), q(17, 36))
        );
        assert_eq!(
            structure_oracle_permutations(1, &w).unwrap(),
            (q(1, 1), q(0, 1))
        );
        assert_eq!(
            structure_oracle_permutations(4, &w).unwrap(),
            oracle_moments(&class, 4, &w).unwrap()
        );
    }

    #[test]
    fn cycle_types() {
        assert_eq!(cycle_type(&[1, 2, 0, 3]), vec![1, 0, 1, 0]);
        assert_eq!(cycle_type(&[]), Vec::<usize>::new());
    }
}
