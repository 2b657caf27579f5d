//! Component-count laws, additive-function moments and the variance bounds.
//!
//! Under the uniform measure on assemblies of order `n`,
//!
//! ```text
//! P(k_j = k) = (mu_j^k / k!) Q^{j}(n - jk) / Q(n)
//! ```
//!
//! The second moment of an additive function is computed by one sweep over
//! component sizes that carries the totals of `1`, `H` and `H^2` (with `H`
//! the partial value of the function) for every order `m <= n`. A pairwise
//! expansion over `Q^{i,j}` is kept as an independent cross-check for small
//! `n`.

mod exact_sweep;
mod report;

use std::ops::RangeInclusive;

use rayon::prelude::*;

pub use report::{MomentReport, SweepDocument, SweepSummary};

use crate::additive::{AdditiveFunction, Family, FunctionKind};
use crate::counting::{ClassScalar, TableCache, Tables};
use crate::error::{Error, Result};
use crate::number::{Accumulator, Scalar};
use crate::registry::AssemblyClass;

/// Law of `k_j` at order `n`: `probabilities[k] = P(k_j = k)` for
/// `0 <= k <= n/j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPmf<S> {
    pub n: usize,
    pub j: usize,
    pub probabilities: Vec<S>,
}

impl<S: Scalar> SpectrumPmf<S> {
    pub fn total(&self) -> S {
        let mut acc = S::Acc::new();
        for p in &self.probabilities {
            acc.push(p.clone());
        }
        acc.total()
    }

    pub fn mean(&self) -> S {
        let mut acc = S::Acc::new();
        for (k, p) in self.probabilities.iter().enumerate() {
            acc.push(p.times(&S::from_u64(k as u64)));
        }
        acc.total()
    }
}

/// Totals over profiles on sizes `<= n` of `w(s)`, `w(s) H(s)` and
/// `w(s) H(s)^2`, indexed by the order `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedTotals<S> {
    pub a0: Vec<S>,
    pub a1: Vec<S>,
    pub a2: Vec<S>,
}

/// Counting tables for one class plus the operations built on them.
#[derive(Debug)]
pub struct MomentEngine<S> {
    class: AssemblyClass,
    tables: Tables<S>,
    support: Vec<bool>,
}

impl<S: ClassScalar> MomentEngine<S> {
    /// Builds the tables needed for every order up to `n_max`.
    pub fn new(class: &AssemblyClass, n_max: usize) -> Result<Self> {
        Ok(MomentEngine {
            class: class.clone(),
            tables: Tables::new(class, n_max)?,
            support: class.support(n_max),
        })
    }
}

impl<S: Scalar> MomentEngine<S> {
    pub fn class(&self) -> &AssemblyClass {
        &self.class
    }

    pub fn tables(&self) -> &Tables<S> {
        &self.tables
    }

    pub fn n_max(&self) -> usize {
        self.tables.n_max()
    }

    pub fn has_support(&self, n: usize) -> bool {
        self.support[n]
    }

    fn check_order(&self, n: usize) -> Result<&S> {
        if n > self.n_max() {
            return Err(Error::InvalidArgument(format!(
                "order {n} exceeds the table range {}",
                self.n_max()
            )));
        }
        if !self.support[n] {
            return Err(Error::EmptySupport { n });
        }
        let q = self.tables.q(n);
        if q.is_zero() || !q.is_finite() {
            return Err(Error::NonFinite { n });
        }
        Ok(q)
    }

    /// `P(k_j = k)` for all `k`.
    pub fn pmf(&self, n: usize, j: usize) -> Result<SpectrumPmf<S>> {
        if j == 0 || j > n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= j <= n, got j={j}, n={n}"
            )));
        }
        let qn = self.check_order(n)?;
        let excl = self.tables.excl(j)?;
        let w = self.tables.weight(j);
        let ln_w = self.tables.ln_weight(j);
        let probabilities = if S::EXACT {
            let mut coef = S::one_value();
            (0..=n / j)
                .map(|k| {
                    if k > 0 {
                        coef = coef.times(w).over(&S::from_u64(k as u64));
                    }
                    coef.times(&excl[n - j * k]).over(qn)
                })
                .collect()
        } else {
            (0..=n / j)
                .map(|k| S::weighted_ratio(w, ln_w, k, &excl[n - j * k], qn))
                .collect()
        };
        Ok(SpectrumPmf {
            n,
            j,
            probabilities,
        })
    }

    /// Runs the marked sweep up to order `upto`.
    pub fn marked_totals(&self, h: &AdditiveFunction, upto: usize) -> Result<MarkedTotals<S>> {
        if upto > self.n_max() {
            return Err(Error::InvalidArgument(format!(
                "order {upto} exceeds the table range {}",
                self.n_max()
            )));
        }
        if S::EXACT {
            let [a0, a1, a2] = exact_sweep::marked_totals(&self.class, h, upto)?
                .map(|v| v.iter().map(S::from_rational).collect());
            return Ok(MarkedTotals { a0, a1, a2 });
        }
        let mut a0 = vec![S::zero_value(); upto + 1];
        let mut a1 = vec![S::zero_value(); upto + 1];
        let mut a2 = vec![S::zero_value(); upto + 1];
        a0[0] = S::one_value();
        let two = S::from_u64(2);
        for j in 1..=upto {
            let w = self.tables.weight(j);
            let ln_w = self.tables.ln_weight(j);
            if w.is_zero() && ln_w == f64::NEG_INFINITY {
                continue;
            }
            let max_k = upto / j;
            let coef: Vec<S> = (0..=max_k)
                .map(|k| S::power_over_factorial(w, ln_w, k))
                .collect();
            let marks: Vec<S> = (0..=max_k).map(|k| h.h::<S>(j, k)).collect::<Result<_>>()?;
            let marks2: Vec<S> = marks.iter().map(|x| x.times(x)).collect();
            let twice: Vec<S> = marks.iter().map(|x| x.times(&two)).collect();
            // descending m keeps a*[m - jk], k >= 1, at their old values
            for m in (j..=upto).rev() {
                let mut s0 = S::Acc::new();
                let mut s1 = S::Acc::new();
                let mut s2 = S::Acc::new();
                s0.push(a0[m].clone());
                s1.push(a1[m].clone());
                s2.push(a2[m].clone());
                for k in 1..=m / j {
                    let r = m - j * k;
                    let c = &coef[k];
                    if a0[r].is_zero() || c.is_zero() {
                        continue;
                    }
                    s0.push(c.times(&a0[r]));
                    if marks[k].is_zero() {
                        s1.push(c.times(&a1[r]));
                        s2.push(c.times(&a2[r]));
                    } else {
                        s1.push(c.times(&a1[r].plus(&marks[k].times(&a0[r]))));
                        s2.push(
                            c.times(
                                &a2[r]
                                    .plus(&twice[k].times(&a1[r]))
                                    .plus(&marks2[k].times(&a0[r])),
                            ),
                        );
                    }
                }
                a0[m] = s0.total();
                a1[m] = s1.total();
                a2[m] = s2.total();
            }
        }
        Ok(MarkedTotals { a0, a1, a2 })
    }

    /// `(E_n h, E_n h^2)` from totals of a sweep that reached `n`.
    fn raw_moments(&self, totals: &MarkedTotals<S>, n: usize) -> Result<(S, S)> {
        let qn = self.check_order(n)?;
        debug_assert!(
            !S::EXACT || &totals.a0[n] == qn,
            "marked sweep lost normalization"
        );
        Ok((totals.a1[n].over(qn), totals.a2[n].over(qn)))
    }

    /// `(E_n h, V_n h)`.
    pub fn moments(&self, n: usize, h: &AdditiveFunction) -> Result<(S, S)> {
        self.check_order(n)?;
        let totals = self.marked_totals(h, n)?;
        let (m1, m2) = self.raw_moments(&totals, n)?;
        Ok((m1.clone(), variance_from(&m1, &m2)))
    }

    pub fn mean(&self, n: usize, h: &AdditiveFunction) -> Result<S> {
        self.moments(n, h).map(|(m, _)| m)
    }

    pub fn variance(&self, n: usize, h: &AdditiveFunction) -> Result<S> {
        self.moments(n, h).map(|(_, v)| v)
    }

    /// `(E_n h, V_n h)` for every order `1..=upto` from one sweep; only valid
    /// for functions that do not depend on `n`. Orders without structures
    /// are `None`.
    pub fn moments_upto(&self, upto: usize, h: &AdditiveFunction) -> Result<Vec<Option<(S, S)>>> {
        let totals = self.marked_totals(h, upto)?;
        (0..=upto)
            .map(|n| {
                if n == 0 || !self.support[n] {
                    return Ok(None);
                }
                let (m1, m2) = self.raw_moments(&totals, n)?;
                Ok(Some((m1.clone(), variance_from(&m1, &m2))))
            })
            .collect()
    }

    /// `E_n h` through the component-count laws.
    pub fn mean_by_pmf(&self, n: usize, h: &AdditiveFunction) -> Result<S> {
        let mut acc = S::Acc::new();
        for j in 1..=n {
            let pmf = self.pmf(n, j)?;
            for (k, p) in pmf.probabilities.iter().enumerate().skip(1) {
                let v = h.h::<S>(j, k)?;
                if !v.is_zero() {
                    acc.push(v.times(p));
                }
            }
        }
        Ok(acc.total())
    }

    /// `sum_{jk<=n} (mu_j^k h_j(k)^2 / k!) Q^{j}(n-jk) / Q(n)`.
    pub fn rhs_general(&self, n: usize, h: &AdditiveFunction) -> Result<S> {
        let qn = self.check_order(n)?;
        let mut acc = S::Acc::new();
        for j in 1..=n {
            let w = self.tables.weight(j);
            let ln_w = self.tables.ln_weight(j);
            if w.is_zero() && ln_w == f64::NEG_INFINITY {
                continue;
            }
            let excl = self.tables.excl(j)?;
            // exact terms share the denominator Q(n), divided out once below
            let mut coef = S::one_value();
            for k in 1..=n / j {
                if S::EXACT {
                    coef = coef.times(w).over(&S::from_u64(k as u64));
                }
                let v = h.h::<S>(j, k)?;
                if v.is_zero() {
                    continue;
                }
                let ratio = if S::EXACT {
                    coef.times(&excl[n - j * k])
                } else {
                    S::weighted_ratio(w, ln_w, k, &excl[n - j * k], qn)
                };
                acc.push(v.times(&v).times(&ratio));
            }
        }
        Ok(if S::EXACT {
            acc.total().over(qn)
        } else {
            acc.total()
        })
    }

    /// `sum_{j<=n} mu_j a_j^2 Q(n-j) / Q(n)`; `None` for functions that are
    /// not completely additive.
    pub fn rhs_complete(&self, n: usize, h: &AdditiveFunction) -> Result<Option<S>> {
        if h.kind() != FunctionKind::CompletelyAdditive {
            return Ok(None);
        }
        let qn = self.check_order(n)?;
        let mut acc = S::Acc::new();
        for j in 1..=n {
            let a = h.a::<S>(j)?.expect("completely additive");
            if a.is_zero() {
                continue;
            }
            let ratio = S::weighted_ratio(
                self.tables.weight(j),
                self.tables.ln_weight(j),
                1,
                self.tables.q(n - j),
                qn,
            );
            acc.push(a.times(&a).times(&ratio));
        }
        Ok(Some(acc.total()))
    }

    /// `sum_j sum_k h_j(k)^2 P(k_j = k)`, the pmf form of the general bound.
    pub fn rhs_general_by_pmf(&self, n: usize, h: &AdditiveFunction) -> Result<S> {
        let mut acc = S::Acc::new();
        for j in 1..=n {
            let pmf = self.pmf(n, j)?;
            for (k, p) in pmf.probabilities.iter().enumerate().skip(1) {
                let v = h.h::<S>(j, k)?;
                if !v.is_zero() {
                    acc.push(v.times(&v).times(p));
                }
            }
        }
        Ok(acc.total())
    }

    /// Moments plus both bounds and their ratios at order `n`.
    pub fn report(&self, n: usize, h: &AdditiveFunction) -> Result<MomentReport<S>> {
        let (mean, variance) = self.moments(n, h)?;
        self.assemble(n, h, mean, variance)
    }

    fn assemble(
        &self,
        n: usize,
        h: &AdditiveFunction,
        mean: S,
        variance: S,
    ) -> Result<MomentReport<S>> {
        let rhs1 = self.rhs_general(n, h)?;
        let rhs2 = self.rhs_complete(n, h)?;
        Ok(MomentReport::new(n, mean, variance, rhs1, rhs2))
    }

    /// Reports for every supported order in `range`; orders without
    /// structures are listed in `skipped`. Results are in increasing `n`
    /// and do not depend on the thread count.
    pub fn sweep(&self, family: &Family, range: RangeInclusive<usize>) -> Result<SweepSummary<S>> {
        let (lo, hi) = (*range.start(), *range.end());
        if lo == 0 || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "invalid order range {lo}..={hi}"
            )));
        }
        if hi > self.n_max() {
            return Err(Error::InvalidArgument(format!(
                "order {hi} exceeds the table range {}",
                self.n_max()
            )));
        }
        self.tables.build_exclusions()?;
        let orders: Vec<usize> = (lo..=hi).filter(|&n| self.support[n]).collect();
        let skipped: Vec<usize> = (lo..=hi).filter(|&n| !self.support[n]).collect();
        let reports: Vec<MomentReport<S>> = if family.depends_on_n() {
            orders
                .par_iter()
                .map(|&n| self.report(n, &family.for_n(n)))
                .collect::<Result<_>>()?
        } else {
            let h = family.for_n(hi);
            let moments = self.moments_upto(hi, &h)?;
            orders
                .par_iter()
                .map(|&n| {
                    let (mean, variance) = moments[n].clone().expect("supported order");
                    self.assemble(n, &h, mean, variance)
                })
                .collect::<Result<_>>()?
        };
        Ok(SweepSummary::new(reports, skipped))
    }
}

impl<S: ClassScalar> MomentEngine<S> {
    /// `(E_n h, E_n h^2)` by the pairwise expansion over `Q^{i,j}`. Costs
    /// `O(n^4)`; meant as a cross-check of the marked sweep for small `n`.
    pub fn moments_pairwise(
        &self,
        n: usize,
        h: &AdditiveFunction,
        cache: &TableCache,
    ) -> Result<(S, S)> {
        let qn = self.check_order(n)?.clone();
        let mean = self.mean_by_pmf(n, h)?;
        let diag = self.rhs_general(n, h)?;
        let mut acc = S::Acc::new();
        // c_j(k) = mu_j^k h_j(k) / k! for every size with a nonzero mark
        let marked: Vec<(usize, Vec<(usize, S)>)> = (1..=n)
            .filter_map(|j| {
                let w = self.tables.weight(j);
                let ln_w = self.tables.ln_weight(j);
                let terms: Result<Vec<(usize, S)>> = (1..=n / j)
                    .map(|k| {
                        let v = h.h::<S>(j, k)?;
                        Ok((k, v.times(&S::power_over_factorial(w, ln_w, k))))
                    })
                    .filter(|t| t.as_ref().map_or(true, |(_, c)| !c.is_zero()))
                    .collect();
                match terms {
                    Ok(t) if t.is_empty() => None,
                    other => Some(other.map(|t| (j, t))),
                }
            })
            .collect::<Result<_>>()?;
        let two = S::from_u64(2);
        for (a, (i, ti)) in marked.iter().enumerate() {
            for (j, tj) in &marked[a + 1..] {
                if i + j > n {
                    continue;
                }
                let pair = cache.get_or_build::<S>(&self.class, n, &[*i, *j])?;
                for (k, ck) in ti {
                    for (m, cm) in tj {
                        let used = i * k + j * m;
                        if used > n {
                            break;
                        }
                        let q = pair.get(n - used);
                        if !q.is_zero() {
                            acc.push(two.times(ck).times(cm).times(q));
                        }
                    }
                }
            }
        }
        Ok((mean, diag.plus(&acc.total().over(&qn))))
    }
}

fn variance_from<S: Scalar>(m1: &S, m2: &S) -> S {
    let v = m2.minus(&m1.times(m1));
    if !S::EXACT && v < S::zero_value() {
        S::zero_value()
    } else {
        v
    }
}

/// `P(k_j = k)` at order `n`.
pub fn comp_count_pmf<S: ClassScalar>(
    class: &AssemblyClass,
    n: usize,
    j: usize,
) -> Result<SpectrumPmf<S>> {
    MomentEngine::<S>::new(class, n)?.pmf(n, j)
}

/// `E_n h`.
pub fn mean_additive<S: ClassScalar>(
    class: &AssemblyClass,
    n: usize,
    h: &AdditiveFunction,
) -> Result<S> {
    MomentEngine::<S>::new(class, n)?.mean(n, h)
}

/// `V_n h`.
pub fn variance_additive<S: ClassScalar>(
    class: &AssemblyClass,
    n: usize,
    h: &AdditiveFunction,
) -> Result<S> {
    MomentEngine::<S>::new(class, n)?.variance(n, h)
}

/// Right-hand side of the bound for an arbitrary additive function.
pub fn tk_rhs_general<S: ClassScalar>(
    class: &AssemblyClass,
    n: usize,
    h: &AdditiveFunction,
) -> Result<S> {
    MomentEngine::<S>::new(class, n)?.rhs_general(n, h)
}

/// Right-hand side of the bound for `h_j(k) = a_j k`.
pub fn tk_rhs_complete<S: ClassScalar>(
    class: &AssemblyClass,
    n: usize,
    h: &AdditiveFunction,
) -> Result<S> {
    MomentEngine::<S>::new(class, n)?
        .rhs_complete(n, h)?
        .ok_or_else(|| Error::InvalidArgument(format!("`{}` is not completely additive", h.name())))
}

pub fn tk_ratio_sweep<S: ClassScalar>(
    class: &AssemblyClass,
    family: &Family,
    range: RangeInclusive<usize>,
) -> Result<SweepSummary<S>> {
    MomentEngine::<S>::new(class, *range.end())?.sweep(family, range)
}
