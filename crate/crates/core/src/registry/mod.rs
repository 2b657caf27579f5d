//! Assembly classes and their component weights.
//!
//! A class is determined by its weight sequence `lambda_j = g_j / j!`, where
//! `g_j` is the number of admissible structures on a block of size `j`, plus
//! the radius `rho` that normalizes the weights.

mod conditions;
mod config;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use conditions::{
    check_condition, scan_constants, suggest_constants, BoundKind, ConditionId, ConditionVerdict,
    ConstantScan, WeaklyLogParams, Witness, DEGENERATE_CONSTANT,
};
pub use config::{class_from_config, ClassConfig, Formula};

use crate::error::{Error, Result};
use crate::number::{factorial, ln_factorial, ln_rational, rational_pow, Real};

/// The built-in classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Permutations,
    Mappings,
    TwoRegularGraphs,
    SetPartitions,
    Forests,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::Permutations,
        Builtin::Mappings,
        Builtin::TwoRegularGraphs,
        Builtin::SetPartitions,
        Builtin::Forests,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Permutations => "permutations",
            Builtin::Mappings => "mappings",
            Builtin::TwoRegularGraphs => "two_regular_graphs",
            Builtin::SetPartitions => "set_partitions",
            Builtin::Forests => "forests",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Human-readable weight formula.
    pub fn formula(self) -> &'static str {
        match self {
            Builtin::Permutations => "lambda_j = 1/j",
            Builtin::Mappings => "lambda_j = (1/j) * sum_{k<j} j^k/k!",
            Builtin::TwoRegularGraphs => "lambda_j = 1/(2j) for j >= 3, else 0",
            Builtin::SetPartitions => "lambda_j = 1/j!",
            Builtin::Forests => "lambda_j = j^(j-2)/j!",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Builtin::Permutations => "permutations; components are cycles",
            Builtin::Mappings => {
                "mappings of a finite set into itself; components are connected functional graphs"
            }
            Builtin::TwoRegularGraphs => {
                "2-regular labeled graphs; components are undirected cycles of length >= 3"
            }
            Builtin::SetPartitions => "set partitions; components are blocks (nominal radius)",
            Builtin::Forests => "forests of unrooted labeled trees",
        }
    }

    pub fn rho(self) -> Real {
        match self {
            Builtin::Permutations | Builtin::TwoRegularGraphs | Builtin::SetPartitions => {
                Real::integer(1)
            }
            Builtin::Mappings | Builtin::Forests => Real::Float((-1.0f64).exp()),
        }
    }

    fn lambda(self, j: usize) -> BigRational {
        let jb = BigInt::from(j);
        match self {
            Builtin::Permutations => BigRational::new(BigInt::one(), jb),
            Builtin::Mappings => {
                // g_j = sum_{k<j} j^k (j-1)!/k!
                let mut g = BigInt::zero();
                let mut falling = BigInt::one();
                let mut power = num_traits::pow(jb.clone(), j - 1);
                for k in (0..j).rev() {
                    g += &power * &falling;
                    falling *= BigInt::from(k);
                    if k > 0 {
                        power /= &jb;
                    }
                }
                BigRational::new(g, factorial(j))
            }
            Builtin::TwoRegularGraphs => {
                if j >= 3 {
                    BigRational::new(BigInt::one(), BigInt::from(2 * j))
                } else {
                    BigRational::zero()
                }
            }
            Builtin::SetPartitions => BigRational::new(BigInt::one(), factorial(j)),
            Builtin::Forests => {
                let base = BigRational::from_integer(jb);
                rational_pow(&base, j as i64 - 2) / BigRational::from_integer(factorial(j))
            }
        }
    }

    fn ln_lambda(self, j: usize) -> f64 {
        let jf = j as f64;
        match self {
            Builtin::Permutations => -jf.ln(),
            Builtin::Mappings => {
                // log-sum-exp over terms j^k/k!, k < j; the largest is near k = j-1
                let mut logs = Vec::with_capacity(j);
                let mut l = 0.0;
                logs.push(l);
                for k in 1..j {
                    l += (jf / k as f64).ln();
                    logs.push(l);
                }
                let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let s: f64 = logs.iter().map(|x| (x - top).exp()).sum();
                top + s.ln() - jf.ln()
            }
            Builtin::TwoRegularGraphs => {
                if j >= 3 {
                    -(2.0 * jf).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Builtin::SetPartitions => -ln_factorial(j),
            Builtin::Forests => (jf - 2.0) * jf.ln() - ln_factorial(j),
        }
    }

    fn is_positive(self, j: usize) -> bool {
        !matches!(self, Builtin::TwoRegularGraphs if j < 3)
    }
}

/// How the weights of a class are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightRule {
    Builtin(Builtin),
    /// `lambda_1..lambda_N`; weights beyond the list are zero.
    Explicit(Vec<BigRational>),
    /// `lambda_j = theta / (j * radius^j)` for `j >= min_size`.
    Logarithmic {
        theta: BigRational,
        radius: BigRational,
        min_size: usize,
    },
}

/// A decomposable class given by its component weights.
#[derive(Debug, Clone)]
pub struct AssemblyClass {
    name: String,
    description: String,
    rho: Real,
    rule: WeightRule,
}

impl AssemblyClass {
    /// Validates the invariants: `rho > 0` and at least one positive weight.
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        rho: Real,
        rule: WeightRule,
    ) -> Result<Self> {
        if !rho.is_positive() || !rho.is_finite() {
            return Err(Error::InvalidRho(rho.render()));
        }
        match &rule {
            WeightRule::Builtin(_) => {}
            WeightRule::Explicit(weights) => {
                if weights.is_empty() {
                    return Err(Error::EmptyWeights);
                }
                if let Some(i) = weights.iter().position(|w| w.is_negative()) {
                    return Err(Error::NegativeWeight(i + 1));
                }
                if weights.iter().all(Zero::is_zero) {
                    return Err(Error::NoPositiveWeight);
                }
            }
            WeightRule::Logarithmic {
                theta,
                radius,
                min_size,
            } => {
                if !theta.is_positive() {
                    return Err(Error::NoPositiveWeight);
                }
                if !radius.is_positive() {
                    return Err(Error::Config("radius must be positive".into()));
                }
                if *min_size == 0 {
                    return Err(Error::Config("min_size must be at least 1".into()));
                }
            }
        }
        Ok(AssemblyClass {
            name: name.into(),
            description: description.into(),
            rho,
            rule,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn rho(&self) -> &Real {
        &self.rho
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    /// Same weights with a different radius.
    pub fn with_rho(&self, rho: Real) -> Result<Self> {
        AssemblyClass::new(
            self.name.clone(),
            self.description.clone(),
            rho,
            self.rule.clone(),
        )
    }

    /// Identifies the class for table caching.
    pub fn key(&self) -> String {
        format!("{}|{}|{:?}", self.name, self.rho.render(), self.rule)
    }

    /// Exact `lambda_j`; zero for `j = 0`.
    pub fn lambda(&self, j: usize) -> BigRational {
        if j == 0 {
            return BigRational::zero();
        }
        match &self.rule {
            WeightRule::Builtin(b) => b.lambda(j),
            WeightRule::Explicit(w) => w.get(j - 1).cloned().unwrap_or_else(BigRational::zero),
            WeightRule::Logarithmic {
                theta,
                radius,
                min_size,
            } => {
                if j < *min_size {
                    BigRational::zero()
                } else {
                    theta
                        / BigRational::from_integer(BigInt::from(j))
                        / rational_pow(radius, j as i64)
                }
            }
        }
    }

    /// `lambda_0..=lambda_upto` with `lambda_0 = 0`.
    pub fn lambdas(&self, upto: usize) -> Vec<BigRational> {
        (0..=upto).map(|j| self.lambda(j)).collect()
    }

    pub fn lambda_f64(&self, j: usize) -> f64 {
        self.ln_lambda(j).exp()
    }

    /// `ln lambda_j` without overflow; `-inf` when the weight is zero.
    pub fn ln_lambda(&self, j: usize) -> f64 {
        if j == 0 {
            return f64::NEG_INFINITY;
        }
        match &self.rule {
            WeightRule::Builtin(b) => b.ln_lambda(j),
            WeightRule::Explicit(_) => ln_rational(&self.lambda(j)),
            WeightRule::Logarithmic {
                theta,
                radius,
                min_size,
            } => {
                if j < *min_size {
                    f64::NEG_INFINITY
                } else {
                    ln_rational(theta) - (j as f64).ln() - j as f64 * ln_rational(radius)
                }
            }
        }
    }

    pub fn is_positive(&self, j: usize) -> bool {
        if j == 0 {
            return false;
        }
        match &self.rule {
            WeightRule::Builtin(b) => b.is_positive(j),
            WeightRule::Explicit(w) => w.get(j - 1).is_some_and(|x| x.is_positive()),
            WeightRule::Logarithmic { min_size, .. } => j >= *min_size,
        }
    }

    /// Tilted weights `lambda_j rho^j` for `j = 0..=upto`, exact when `rho`
    /// is rational.
    pub fn tilted_weights(&self, rho: &Real, upto: usize) -> TiltedWeights {
        match rho {
            Real::Exact(r) => {
                let mut power = BigRational::one();
                let mut out = Vec::with_capacity(upto + 1);
                out.push(BigRational::zero());
                for j in 1..=upto {
                    power *= r;
                    out.push(self.lambda(j) * &power);
                }
                TiltedWeights::Exact(out)
            }
            Real::Float(x) => {
                let ln_rho = x.ln();
                let out = (0..=upto)
                    .map(|j| {
                        if j == 0 {
                            0.0
                        } else {
                            (self.ln_lambda(j) + j as f64 * ln_rho).exp()
                        }
                    })
                    .collect();
                TiltedWeights::Float(out)
            }
        }
    }

    /// `ln(lambda_j rho^j)` using the class radius, for `j = 0..=upto`.
    pub fn ln_scaled_weights(&self, upto: usize) -> Vec<f64> {
        let ln_rho = self.rho.ln();
        (0..=upto)
            .map(|j| {
                if j == 0 {
                    f64::NEG_INFINITY
                } else {
                    self.ln_lambda(j) + j as f64 * ln_rho
                }
            })
            .collect()
    }

    /// `support[n]` is true when the class has at least one structure of
    /// order `n`.
    pub fn support(&self, upto: usize) -> Vec<bool> {
        let sizes: Vec<usize> = (1..=upto).filter(|&j| self.is_positive(j)).collect();
        let mut reach = vec![false; upto + 1];
        reach[0] = true;
        for n in 1..=upto {
            reach[n] = sizes.iter().take_while(|&&j| j <= n).any(|&j| reach[n - j]);
        }
        reach
    }
}

/// Weights `lambda_j rho^j` in the representation dictated by `rho`.
#[derive(Debug, Clone, PartialEq)]
pub enum TiltedWeights {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl TiltedWeights {
    pub fn get(&self, j: usize) -> Real {
        match self {
            TiltedWeights::Exact(v) => Real::Exact(v[j].clone()),
            TiltedWeights::Float(v) => Real::Float(v[j]),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, TiltedWeights::Exact(_))
    }
}

/// Names accepted by [`builtin_class`].
pub fn builtin_names() -> Vec<&'static str> {
    Builtin::ALL.iter().map(|b| b.name()).collect()
}

pub fn builtin_class(name: &str) -> Result<AssemblyClass> {
    let b = Builtin::from_name(name).ok_or_else(|| Error::UnknownClass {
        name: name.to_string(),
        available: builtin_names().join(", "),
    })?;
    Ok(AssemblyClass {
        name: b.name().to_string(),
        description: b.description().to_string(),
        rho: b.rho(),
        rule: WeightRule::Builtin(b),
    })
}
