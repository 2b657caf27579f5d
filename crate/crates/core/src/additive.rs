//! Additive functions `h(sigma) = sum_j h_j(k_j(sigma))` with `h_j(0) = 0`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::number::Scalar;

type ExactFn = Arc<dyn Fn(usize, usize) -> BigRational + Send + Sync>;
type FloatFn = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    /// Arbitrary array `h_j(k)`.
    General,
    /// `h_j(k) = a_j k`.
    CompletelyAdditive,
}

#[derive(Clone)]
enum Values {
    Exact(ExactFn),
    Float(FloatFn),
}

/// An additive function given by its array of values.
///
/// For the completely additive kind the stored closure is `a_j` (its second
/// argument is ignored) and `h_j(k) = a_j k`.
#[derive(Clone)]
pub struct AdditiveFunction {
    name: String,
    kind: FunctionKind,
    values: Values,
}

impl fmt::Debug for AdditiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdditiveFunction")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("exact", &self.is_exact())
            .finish()
    }
}

impl AdditiveFunction {
    pub fn general_exact(
        name: impl Into<String>,
        h: impl Fn(usize, usize) -> BigRational + Send + Sync + 'static,
    ) -> Self {
        AdditiveFunction {
            name: name.into(),
            kind: FunctionKind::General,
            values: Values::Exact(Arc::new(h)),
        }
    }

    pub fn general_float(
        name: impl Into<String>,
        h: impl Fn(usize, usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        AdditiveFunction {
            name: name.into(),
            kind: FunctionKind::General,
            values: Values::Float(Arc::new(h)),
        }
    }

    pub fn completely_additive_exact(
        name: impl Into<String>,
        a: impl Fn(usize) -> BigRational + Send + Sync + 'static,
    ) -> Self {
        AdditiveFunction {
            name: name.into(),
            kind: FunctionKind::CompletelyAdditive,
            values: Values::Exact(Arc::new(move |j, _| a(j))),
        }
    }

    pub fn completely_additive_float(
        name: impl Into<String>,
        a: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        AdditiveFunction {
            name: name.into(),
            kind: FunctionKind::CompletelyAdditive,
            values: Values::Float(Arc::new(move |j, _| a(j))),
        }
    }

    /// The number-of-components function `w` (`a_j = 1`).
    pub fn component_count() -> Self {
        Self::completely_additive_exact("w", |_| BigRational::one())
    }

    pub fn zero() -> Self {
        Self::completely_additive_exact("zero", |_| BigRational::zero())
    }

    /// `c h`, preserving the kind.
    pub fn scaled(&self, c: BigRational) -> Self {
        let name = format!("{}*({})", c, self.name);
        let values = match &self.values {
            Values::Exact(f) => {
                let f = f.clone();
                Values::Exact(Arc::new(move |j, k| &c * f(j, k)))
            }
            Values::Float(f) => {
                let f = f.clone();
                let c = crate::number::rational_to_f64(&c);
                Values::Float(Arc::new(move |j, k| c * f(j, k)))
            }
        };
        AdditiveFunction {
            name,
            kind: self.kind,
            values,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, Values::Exact(_))
    }

    /// `h_j(k)`; always zero for `k = 0`.
    pub fn h<S: Scalar>(&self, j: usize, k: usize) -> Result<S> {
        if k == 0 {
            return Ok(S::zero_value());
        }
        let kf = match self.kind {
            FunctionKind::General => None,
            FunctionKind::CompletelyAdditive => Some(k),
        };
        match &self.values {
            Values::Exact(f) => {
                let v = f(j, k);
                let v = match kf {
                    Some(k) => v * BigRational::from_integer(BigInt::from(k)),
                    None => v,
                };
                Ok(S::from_rational(&v))
            }
            Values::Float(f) => {
                let v = f(j, k) * kf.unwrap_or(1) as f64;
                S::from_f64(v).ok_or_else(|| Error::NotExact(self.name.clone()))
            }
        }
    }

    /// `h_j(k)` as a float.
    pub fn h_f64(&self, j: usize, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let scale = match self.kind {
            FunctionKind::General => 1.0,
            FunctionKind::CompletelyAdditive => k as f64,
        };
        match &self.values {
            Values::Exact(f) => crate::number::rational_to_f64(&f(j, k)) * scale,
            Values::Float(f) => f(j, k) * scale,
        }
    }

    /// `a_j` for completely additive functions.
    pub fn a<S: Scalar>(&self, j: usize) -> Result<Option<S>> {
        match self.kind {
            FunctionKind::General => Ok(None),
            FunctionKind::CompletelyAdditive => self.h(j, 1).map(Some),
        }
    }

    /// `h` evaluated on a component profile; `counts[j-1] = k_j`.
    pub fn on_counts<S: Scalar>(&self, counts: &[usize]) -> Result<S> {
        let mut total = S::zero_value();
        for (i, &k) in counts.iter().enumerate() {
            if k > 0 {
                total = total.plus(&self.h::<S>(i + 1, k)?);
            }
        }
        Ok(total)
    }
}

/// Built-in families of additive functions, one function per order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `a_j = 1`: the number of components.
    ComponentCount,
    /// `a_j = ln j` (float only).
    LogSize,
    /// `a_j = 1[j <= n/2]`.
    SmallComponents,
    /// `a_j = +-1` drawn from a seeded generator, independent of `n`.
    Rademacher {
        seed: u64,
    },
    /// `h_j(k) = 1[k >= 1]`: the number of distinct component sizes.
    DistinctSizes,
    /// `h_j(k) = k` for one size `j`, zero elsewhere.
    SingleSize {
        size: usize,
    },
    Zero,
}

impl Family {
    /// Families used by the ratio sweeps.
    pub fn sweep_families(seed: u64) -> Vec<Family> {
        vec![
            Family::ComponentCount,
            Family::LogSize,
            Family::SmallComponents,
            Family::Rademacher { seed },
            Family::DistinctSizes,
        ]
    }

    pub fn name(&self) -> String {
        match self {
            Family::ComponentCount => "w".into(),
            Family::LogSize => "log".into(),
            Family::SmallComponents => "half".into(),
            Family::Rademacher { seed } => format!("rademacher:{seed}"),
            Family::DistinctSizes => "distinct".into(),
            Family::SingleSize { size } => format!("single:{size}"),
            Family::Zero => "zero".into(),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Family::LogSize)
    }

    pub fn kind(&self) -> FunctionKind {
        match self {
            Family::DistinctSizes => FunctionKind::General,
            _ => FunctionKind::CompletelyAdditive,
        }
    }

    /// True when the function for order `n` depends on `n`.
    pub fn depends_on_n(&self) -> bool {
        matches!(self, Family::SmallComponents)
    }

    pub fn for_n(&self, n: usize) -> AdditiveFunction {
        match *self {
            Family::ComponentCount => AdditiveFunction::component_count(),
            Family::LogSize => {
                AdditiveFunction::completely_additive_float("log", |j| (j as f64).ln())
            }
            Family::SmallComponents => {
                AdditiveFunction::completely_additive_exact("half", move |j| {
                    if 2 * j <= n {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
            }
            Family::Rademacher { seed } => {
                let signs = Arc::new(rademacher_signs(seed, n));
                AdditiveFunction::completely_additive_exact(self.name(), move |j| {
                    match signs.get(j.wrapping_sub(1)) {
                        Some(&s) => BigRational::from_integer(BigInt::from(s)),
                        None => rademacher_signs(seed, j)
                            .last()
                            .map(|&s| BigRational::from_integer(BigInt::from(s)))
                            .unwrap_or_else(BigRational::zero),
                    }
                })
            }
            Family::DistinctSizes => AdditiveFunction::general_exact("distinct", |_, k| {
                if k >= 1 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }),
            Family::SingleSize { size } => {
                AdditiveFunction::completely_additive_exact(self.name(), move |j| {
                    if j == size {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
            }
            Family::Zero => AdditiveFunction::zero(),
        }
    }
}

/// `a_1..a_n` in `{-1, +1}`; the first `n` signs do not depend on `n`.
pub fn rademacher_signs(seed: u64, n: usize) -> Vec<i8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect()
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `w`, `log`, `half`, `rademacher:SEED`, `distinct`, `single:J`, `zero`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!(
                "unknown function family `{s}`; expected one of w, log, half, rademacher:SEED, distinct, single:J, zero"
            ))
        };
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let family = match (head, arg) {
            ("w", None) => Family::ComponentCount,
            ("log", None) => Family::LogSize,
            ("half", None) => Family::SmallComponents,
            ("distinct", None) => Family::DistinctSizes,
            ("zero", None) => Family::Zero,
            ("rademacher", Some(a)) => Family::Rademacher {
                seed: a.parse().map_err(|_| bad())?,
            },
            ("single", Some(a)) => {
                let size: usize = a.parse().map_err(|_| bad())?;
                if size == 0 {
                    return Err(bad());
                }
                Family::SingleSize { size }
            }
            _ => return Err(bad()),
        };
        Ok(family)
    }
}
