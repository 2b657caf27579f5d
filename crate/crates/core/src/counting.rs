//! Partition-weighted sums `Q(n)` and their restricted variants.
//!
//! All tables come from the convolution recurrence
//!
//! ```text
//! n q(n) = sum_{j<=n} j mu_j q(n-j),    q(0) = 1
//! ```
//!
//! with `mu_j = lambda_j` in exact mode and `mu_j = lambda_j rho^j` in the
//! scaled float mode, where `q(n) = Q(n) rho^n`. Excluding a size removes its
//! term from the convolution.

use std::any::Any;
use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::number::{factorial, Accumulator, Scalar};
use crate::registry::AssemblyClass;

/// Largest table length accepted.
pub const MAX_TABLE_LEN: usize = 1 << 22;

/// Representation of the values in a [`QTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TableMode {
    Exact,
    ScaledFloat { rho: f64 },
}

/// Scalars that can be built from a class.
pub trait ClassScalar: Scalar {
    /// `mu_0..=mu_upto` with `mu_0 = 0`.
    fn class_weights(class: &AssemblyClass, upto: usize) -> Vec<Self>;
    fn table_mode(class: &AssemblyClass) -> TableMode;
}

impl ClassScalar for BigRational {
    fn class_weights(class: &AssemblyClass, upto: usize) -> Vec<Self> {
        class.lambdas(upto)
    }
    fn table_mode(_class: &AssemblyClass) -> TableMode {
        TableMode::Exact
    }
}

impl ClassScalar for f64 {
    fn class_weights(class: &AssemblyClass, upto: usize) -> Vec<Self> {
        class
            .ln_scaled_weights(upto)
            .into_iter()
            .map(f64::exp)
            .collect()
    }
    fn table_mode(class: &AssemblyClass) -> TableMode {
        TableMode::ScaledFloat {
            rho: class.rho().to_f64(),
        }
    }
}

fn check_len(n_max: usize) -> Result<()> {
    if n_max >= MAX_TABLE_LEN {
        return Err(Error::TooLarge {
            requested: n_max,
            limit: MAX_TABLE_LEN,
        });
    }
    Ok(())
}

/// Runs the convolution recurrence up to `n_max` with the sizes in
/// `excluded` removed. `weights[j]` is `mu_j`; entries past the end are zero.
pub fn recurrence<S: Scalar>(weights: &[S], n_max: usize, excluded: &[usize]) -> Result<Vec<S>> {
    check_len(n_max)?;
    if S::EXACT {
        let exact: Vec<&BigRational> = weights.iter().filter_map(S::as_rational).collect();
        return Ok(exact_recurrence(&exact, n_max, excluded)
            .iter()
            .map(S::from_rational)
            .collect());
    }
    let coef: Vec<(usize, S)> = (1..=n_max)
        .filter(|j| !excluded.contains(j))
        .filter_map(|j| weights.get(j).map(|w| (j, w)))
        .filter(|(_, w)| !w.is_zero())
        .map(|(j, w)| (j, w.times(&S::from_u64(j as u64))))
        .collect();
    let mut q = Vec::with_capacity(n_max + 1);
    q.push(S::one_value());
    for n in 1..=n_max {
        let mut acc = S::Acc::new();
        for (j, c) in coef.iter().take_while(|(j, _)| *j <= n) {
            let prev = &q[n - j];
            if !prev.is_zero() {
                acc.push(c.times(prev));
            }
        }
        let value = acc.total().over(&S::from_u64(n as u64));
        if !value.is_finite() {
            return Err(Error::NonFinite { n });
        }
        q.push(value);
    }
    Ok(q)
}

/// `0!..=n!`.
pub(crate) fn factorials(n: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::one()];
    for i in 1..=n {
        let next = &f[i - 1] * BigInt::from(i);
        f.push(next);
    }
    f
}

/// Least common denominator `d` of the labelled counts `g_j = j! lambda_j`,
/// so that `d^j g_j` is an integer for every `j`.
pub(crate) fn labelled_denominator(lambdas: &[&BigRational], facts: &[BigInt]) -> BigInt {
    lambdas
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !Scalar::is_zero(**l))
        .fold(BigInt::one(), |acc, (j, l)| {
            let g = *l * BigRational::from_integer(facts[j].clone());
            acc.lcm(g.denom())
        })
}

/// `(jk)!/(k! j!^k) * base^k` for `k = 0..=max_k`: the ways to split `jk`
/// labels into `k` blocks of size `j`, each weighted by `base`.
pub(crate) fn block_weights(
    facts: &[BigInt],
    j: usize,
    base: &BigInt,
    max_k: usize,
) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for k in 1..=max_k {
        let blocks = &facts[j * k - 1] / (&facts[j - 1] * &facts[j * (k - 1)]);
        let next = &out[k - 1] * blocks * base;
        out.push(next);
    }
    out
}

/// The recurrence on the integers `L(n) = n! d^n q(n)`:
/// `L(n) = sum_j binom(n-1, j-1) d^j g_j L(n-j)`.
fn exact_recurrence(
    weights: &[&BigRational],
    n_max: usize,
    excluded: &[usize],
) -> Vec<BigRational> {
    let facts = factorials(n_max);
    let upto = weights.len().min(n_max + 1);
    let d = labelled_denominator(&weights[..upto], &facts);
    let d_pows: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), |p| Some(p * &d))
        .take(n_max + 1)
        .collect();
    let coef: Vec<(usize, BigInt)> = (1..upto)
        .filter(|j| !excluded.contains(j) && !Scalar::is_zero(weights[*j]))
        .map(|j| {
            (
                j,
                (weights[j] * BigRational::from_integer(&facts[j] * &d_pows[j])).to_integer(),
            )
        })
        .collect();
    let mut labelled = vec![BigInt::one()];
    for n in 1..=n_max {
        let mut acc = BigInt::zero();
        for (j, c) in coef.iter().take_while(|(j, _)| *j <= n) {
            let prev = &labelled[n - j];
            if !prev.is_zero() {
                acc += c * (&facts[n - 1] / (&facts[j - 1] * &facts[n - j])) * prev;
            }
        }
        labelled.push(acc);
    }
    labelled
        .into_iter()
        .enumerate()
        .map(|(n, l)| BigRational::new(l, &facts[n] * &d_pows[n]))
        .collect()
}

/// `Q^{j}(0..=N)` by inversion, on the integers `m! d^m Q(m)`.
fn exact_exclusion(lambdas: &[&BigRational], q: &[&BigRational], j: usize) -> Vec<BigRational> {
    if lambdas.get(j).is_none_or(|l| Scalar::is_zero(*l)) {
        return q.iter().map(|&x| x.clone()).collect();
    }
    let n_max = q.len() - 1;
    let facts = factorials(n_max);
    let d = labelled_denominator(lambdas, &facts);
    let d_pows: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), |p| Some(p * &d))
        .take(n_max + 1)
        .collect();
    let scale = |m: usize| &facts[m] * &d_pows[m];
    let labelled: Vec<BigInt> = (0..=n_max)
        .map(|m| (q[m] * BigRational::from_integer(scale(m))).to_integer())
        .collect();
    let base = (lambdas[j] * BigRational::from_integer(&facts[j] * &d_pows[j])).to_integer();
    let blocks = block_weights(&facts, j, &base, n_max / j);
    (0..=n_max)
        .map(|m| {
            let mut acc = BigInt::zero();
            for (i, b) in blocks.iter().enumerate().take(m / j + 1) {
                let r = m - i * j;
                if labelled[r].is_zero() {
                    continue;
                }
                let term = b * (&facts[m] / (&facts[r] * &facts[i * j])) * &labelled[r];
                if i % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            BigRational::new(acc, scale(m))
        })
        .collect()
}

/// `q(0..=N)` for one class, possibly with excluded component sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable<S> {
    mode: TableMode,
    values: Vec<S>,
    excluded: Vec<usize>,
}

impl<S: Scalar> QTable<S> {
    pub fn mode(&self) -> TableMode {
        self.mode
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, n: usize) -> &S {
        &self.values[n]
    }

    pub fn excluded(&self) -> &[usize] {
        &self.excluded
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Writes `n,value` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "value"])?;
        for (n, v) in self.values.iter().enumerate() {
            w.write_record([n.to_string(), v.render()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses the output of [`QTable::write_csv`] back into `(n, value)`
    /// pairs.
    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<(usize, S)>> {
        let mut r = csv::Reader::from_reader(input);
        let mut out = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let n = rec[0]
                .parse::<usize>()
                .map_err(|_| Error::Parse(rec[0].to_string()))?;
            out.push((n, S::parse_value(&rec[1])?));
        }
        Ok(out)
    }
}

/// `Q(0..=N)` (exact) or `Q(n) rho^n` (scaled float).
pub fn q_table<S: ClassScalar>(class: &AssemblyClass, n_max: usize) -> Result<QTable<S>> {
    q_excl_table(class, n_max, &[])
}

/// `Q^{E}(0..=N)`: the sum restricted to profiles without components whose
/// size is in `excluded`. At most two sizes may be excluded.
pub fn q_excl_table<S: ClassScalar>(
    class: &AssemblyClass,
    n_max: usize,
    excluded: &[usize],
) -> Result<QTable<S>> {
    validate_excluded(excluded)?;
    check_len(n_max)?;
    let weights = S::class_weights(class, n_max);
    let values = recurrence(&weights, n_max, excluded)?;
    let mut excluded = excluded.to_vec();
    excluded.sort_unstable();
    Ok(QTable {
        mode: S::table_mode(class),
        values,
        excluded,
    })
}

fn validate_excluded(excluded: &[usize]) -> Result<()> {
    if excluded.len() > 2 {
        return Err(Error::InvalidArgument(
            "at most two component sizes can be excluded".into(),
        ));
    }
    if excluded.contains(&0) {
        return Err(Error::InvalidArgument("excluded sizes must be >= 1".into()));
    }
    if excluded.len() == 2 && excluded[0] == excluded[1] {
        return Err(Error::InvalidArgument(
            "excluded sizes must be distinct".into(),
        ));
    }
    Ok(())
}

/// `G(n) = n! Q(n)`, the number of assemblies of order `n` when all `g_j`
/// are integers.
pub fn g_of_n(class: &AssemblyClass, n: usize) -> Result<BigRational> {
    let q = q_table::<BigRational>(class, n)?;
    Ok(q.get(n) * BigRational::from_integer(factorial(n)))
}

/// `G(0..=N)` from one table.
pub fn g_table(class: &AssemblyClass, n_max: usize) -> Result<Vec<BigRational>> {
    let q = q_table::<BigRational>(class, n_max)?;
    let mut fact = BigInt::from(1);
    Ok(q.values()
        .iter()
        .enumerate()
        .map(|(n, v)| {
            if n > 0 {
                fact *= BigInt::from(n);
            }
            v * BigRational::from_integer(fact.clone())
        })
        .collect())
}

/// The counting data the moment engine needs for one class up to `N`:
/// weights, `q`, and lazily built single-exclusion tables.
#[derive(Debug)]
pub struct Tables<S> {
    n_max: usize,
    weights: Vec<S>,
    ln_weights: Vec<f64>,
    q: Vec<S>,
    exclusions: Vec<OnceLock<Arc<Vec<S>>>>,
}

impl<S: ClassScalar> Tables<S> {
    pub fn new(class: &AssemblyClass, n_max: usize) -> Result<Self> {
        check_len(n_max)?;
        let weights = S::class_weights(class, n_max);
        let ln_weights = if S::EXACT {
            (0..=n_max).map(|j| class.ln_lambda(j)).collect()
        } else {
            class.ln_scaled_weights(n_max)
        };
        let q = recurrence(&weights, n_max, &[])?;
        Ok(Tables {
            n_max,
            weights,
            ln_weights,
            q,
            exclusions: (0..=n_max).map(|_| OnceLock::new()).collect(),
        })
    }
}

impl<S: Scalar> Tables<S> {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `mu_j`.
    pub fn weight(&self, j: usize) -> &S {
        &self.weights[j]
    }

    /// `ln mu_j`, finite even when `mu_j` underflows in floats.
    pub fn ln_weight(&self, j: usize) -> f64 {
        self.ln_weights[j]
    }

    pub fn q(&self, n: usize) -> &S {
        &self.q[n]
    }

    pub fn q_values(&self) -> &[S] {
        &self.q
    }

    /// `Q^{j}(0..=N)`.
    ///
    /// Exact tables use the inversion `Q^{j}(m) = sum_i (-mu_j)^i/i! Q(m-ij)`
    /// (O(N^2/j) integer work); float tables run the recurrence with size `j`
    /// removed, keeping every term nonnegative.
    pub fn excl(&self, j: usize) -> Result<Arc<Vec<S>>> {
        assert!(j >= 1 && j <= self.n_max, "exclusion index out of range");
        if let Some(t) = self.exclusions[j].get() {
            return Ok(t.clone());
        }
        let table = if S::EXACT {
            let weights: Vec<&BigRational> =
                self.weights.iter().filter_map(S::as_rational).collect();
            let q: Vec<&BigRational> = self.q.iter().filter_map(S::as_rational).collect();
            exact_exclusion(&weights, &q, j)
                .iter()
                .map(S::from_rational)
                .collect()
        } else {
            recurrence(&self.weights, self.n_max, &[j])?
        };
        Ok(self.exclusions[j].get_or_init(|| Arc::new(table)).clone())
    }

    /// Builds every `Q^{j}` table, in parallel over `j`.
    pub fn build_exclusions(&self) -> Result<()> {
        (1..=self.n_max)
            .into_par_iter()
            .try_for_each(|j| self.excl(j).map(|_| ()))
    }
}

type CacheKey = (String, Vec<usize>, usize, bool);
type Slot = Arc<OnceLock<Arc<dyn Any + Send + Sync>>>;

/// Shared cache of restricted tables keyed by class, excluded set, `N` and
/// mode. Each key is built at most once; readers of other keys are not
/// blocked while a table is built.
#[derive(Default)]
pub struct TableCache {
    slots: RwLock<HashMap<CacheKey, Slot>>,
}

impl TableCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.slots.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_build<S: ClassScalar>(
        &self,
        class: &AssemblyClass,
        n_max: usize,
        excluded: &[usize],
    ) -> Result<Arc<QTable<S>>> {
        validate_excluded(excluded)?;
        let mut sorted = excluded.to_vec();
        sorted.sort_unstable();
        let key = (class.key(), sorted.clone(), n_max, S::EXACT);
        let slot = {
            let read = self.slots.read().expect("cache lock");
            read.get(&key).cloned()
        };
        let slot = match slot {
            Some(s) => s,
            None => {
                let mut write = self.slots.write().expect("cache lock");
                write.entry(key).or_default().clone()
            }
        };
        if let Some(v) = slot.get() {
            return Ok(downcast(v));
        }
        let table = q_excl_table::<S>(class, n_max, &sorted)?;
        let v = slot.get_or_init(|| Arc::new(table) as Arc<dyn Any + Send + Sync>);
        Ok(downcast(v))
    }
}

fn downcast<S: Scalar>(v: &Arc<dyn Any + Send + Sync>) -> Arc<QTable<S>> {
    v.clone()
        .downcast::<QTable<S>>()
        .expect("cache key includes the mode")
}
