//! Checks of the logarithmic-type growth conditions on a class.
//!
//! With `t_j = rho^j j lambda_j` the conditions are
//!
//! * strong: `theta <= t_j <= Theta` for all `j`,
//! * upper: `t_j <= Theta` for all `j`,
//! * lower_sum: `sum_{j<=n} t_j >= theta n` for `n >= n0`,
//! * q_lower: `n Q(n) rho^n >= theta' exp(sum_{j<=n} lambda_j rho^j)` for
//!   `n >= 1`.
//!
//! Checks run over a finite range `N` and report the index where the
//! inequality is violated first, or where it is tightest when it holds.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{AssemblyClass, TiltedWeights};
use crate::counting::recurrence;
use crate::error::{Error, Result};
use crate::number::{float_ge, Real, FLOAT_REL_TOL};

/// Constants below this are treated as numerically zero by
/// [`suggest_constants`].
pub const DEGENERATE_CONSTANT: f64 = 1e-12;

/// Constants `(rho, Theta, theta, theta', n0)` of the weakly logarithmic
/// definition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeaklyLogParams {
    pub rho: Real,
    /// `Theta`, the upper bound on `rho^j j lambda_j`.
    pub theta_upper: Real,
    /// `theta`, the lower density of the partial sums.
    pub theta: Real,
    /// `theta'`, the lower constant for `n Q(n) rho^n`.
    pub theta_prime: Real,
    pub n0: usize,
}

impl WeaklyLogParams {
    pub fn new(
        rho: Real,
        theta_upper: Real,
        theta: Real,
        theta_prime: Real,
        n0: usize,
    ) -> Result<Self> {
        for (name, v) in [
            ("rho", &rho),
            ("Theta", &theta_upper),
            ("theta", &theta),
            ("theta'", &theta_prime),
        ] {
            if !v.is_positive() || !v.is_finite() {
                return Err(Error::InvalidConstants(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if n0 == 0 {
            return Err(Error::InvalidConstants("n0 must be at least 1".into()));
        }
        Ok(WeaklyLogParams {
            rho,
            theta_upper,
            theta,
            theta_prime,
            n0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    Strong,
    Upper,
    LowerSum,
    QLower,
}

impl ConditionId {
    pub const ALL: [ConditionId; 4] = [
        ConditionId::Strong,
        ConditionId::Upper,
        ConditionId::LowerSum,
        ConditionId::QLower,
    ];

    /// Conditions (1)..(4) by number.
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(ConditionId::Strong),
            2 => Some(ConditionId::Upper),
            3 => Some(ConditionId::LowerSum),
            4 => Some(ConditionId::QLower),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            ConditionId::Strong => 1,
            ConditionId::Upper => 2,
            ConditionId::LowerSum => 3,
            ConditionId::QLower => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::Strong => "strong",
            ConditionId::Upper => "upper",
            ConditionId::LowerSum => "lower_sum",
            ConditionId::QLower => "q_lower",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.number())
    }
}

/// Which side of the inequality the class quantity must stay on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `value <= bound`
    Upper,
    /// `value >= bound`
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// `j` for the pointwise conditions, `n` for the cumulative ones.
    pub index: usize,
    /// Class-side quantity at `index`.
    pub value: Real,
    /// Constant-side quantity at `index`.
    pub bound: Real,
    pub kind: BoundKind,
}

impl Witness {
    /// Re-evaluates the inequality stored in the witness.
    pub fn satisfied(&self, rel_tol: Option<f64>) -> bool {
        let (big, small) = match self.kind {
            BoundKind::Upper => (&self.bound, &self.value),
            BoundKind::Lower => (&self.value, &self.bound),
        };
        ge(big, small, rel_tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVerdict {
    pub condition: ConditionId,
    pub holds: bool,
    /// First violation when the condition fails, tightest index otherwise.
    pub witness: Option<Witness>,
    pub checked_range: usize,
    /// Relative tolerance used when the comparison was done in floats.
    pub tolerance: Option<f64>,
}

fn ge(big: &Real, small: &Real, rel_tol: Option<f64>) -> bool {
    match (big, small, rel_tol) {
        (Real::Exact(a), Real::Exact(b), None) => a >= b,
        _ => float_ge(
            big.to_f64(),
            small.to_f64(),
            rel_tol.unwrap_or(FLOAT_REL_TOL),
        ),
    }
}

/// Slack of a satisfied inequality; smaller is tighter.
fn slack(value: &Real, bound: &Real, kind: BoundKind) -> Option<Real> {
    let (num, den) = match kind {
        BoundKind::Lower => (value, bound),
        BoundKind::Upper => (bound, value),
    };
    match (num, den) {
        (Real::Exact(a), Real::Exact(b)) => (!b.is_zero()).then(|| Real::Exact(a / b)),
        _ => {
            let d = den.to_f64();
            (d != 0.0).then(|| Real::Float(num.to_f64() / d))
        }
    }
}

struct Scan {
    first_violation: Option<Witness>,
    tightest: Option<(Real, Witness)>,
    tolerance: Option<f64>,
}

impl Scan {
    fn new(tolerance: Option<f64>) -> Self {
        Scan {
            first_violation: None,
            tightest: None,
            tolerance,
        }
    }

    fn visit(&mut self, index: usize, value: Real, bound: Real, kind: BoundKind) {
        let w = Witness {
            index,
            value,
            bound,
            kind,
        };
        if !w.satisfied(self.tolerance) {
            if self.first_violation.is_none() {
                self.first_violation = Some(w);
            }
            return;
        }
        if let Some(s) = slack(&w.value, &w.bound, kind) {
            let tighter = match &self.tightest {
                None => true,
                Some((best, _)) => s.compare(best) == Ordering::Less,
            };
            if tighter {
                self.tightest = Some((s, w));
            }
        }
    }

    fn verdict(self, condition: ConditionId, range: usize) -> ConditionVerdict {
        let holds = self.first_violation.is_none();
        let witness = match self.first_violation {
            Some(w) => Some(w),
            None => self.tightest.map(|(_, w)| w),
        };
        ConditionVerdict {
            condition,
            holds,
            witness,
            checked_range: range,
            tolerance: self.tolerance,
        }
    }
}

/// `t_j = j mu_j` and the partial sums `sum_{j<=n} t_j`, in the
/// representation of the tilted weights.
fn size_terms(weights: &TiltedWeights) -> (Vec<Real>, Vec<Real>) {
    match weights {
        TiltedWeights::Exact(w) => {
            let terms: Vec<BigRational> = w
                .iter()
                .enumerate()
                .map(|(j, x)| x * BigRational::from_integer(j.into()))
                .collect();
            let mut acc = BigRational::zero();
            let sums = terms
                .iter()
                .map(|t| {
                    acc += t;
                    Real::Exact(acc.clone())
                })
                .collect();
            (terms.into_iter().map(Real::Exact).collect(), sums)
        }
        TiltedWeights::Float(w) => {
            let terms: Vec<f64> = w.iter().enumerate().map(|(j, x)| j as f64 * x).collect();
            let mut acc = 0.0;
            let sums = terms
                .iter()
                .map(|t| {
                    acc += t;
                    Real::Float(acc)
                })
                .collect();
            (terms.into_iter().map(Real::Float).collect(), sums)
        }
    }
}

fn times_integer(x: &Real, n: usize) -> Real {
    match x {
        Real::Exact(r) => Real::Exact(r * BigRational::from_integer(n.into())),
        Real::Float(f) => Real::Float(f * n as f64),
    }
}

fn all_exact(values: &[&Real]) -> bool {
    values.iter().all(|v| matches!(v, Real::Exact(_)))
}

/// `(n, n q(n), exp(sum_{j<=n} mu_j))` for `n` in the support, in floats.
fn q_lower_terms(
    class: &AssemblyClass,
    rho: &Real,
    range: usize,
) -> Result<Vec<(usize, f64, f64)>> {
    let weights: Vec<f64> = match class.tilted_weights(rho, range) {
        TiltedWeights::Exact(w) => w.iter().map(crate::number::rational_to_f64).collect(),
        TiltedWeights::Float(w) => w,
    };
    let q = recurrence(&weights, range, &[])?;
    let support = class.support(range);
    let mut out = Vec::with_capacity(range);
    let mut partial = 0.0;
    for n in 1..=range {
        partial += weights[n];
        if support[n] {
            out.push((n, n as f64 * q[n], partial.exp()));
        }
    }
    Ok(out)
}

/// Checks one condition over `j <= range` or `n <= range`.
///
/// Empty orders (no structures of size `n`) are skipped for the `q_lower`
/// condition.
pub fn check_condition(
    class: &AssemblyClass,
    params: &WeaklyLogParams,
    condition: ConditionId,
    range: usize,
) -> Result<ConditionVerdict> {
    if range == 0 {
        return Err(Error::InvalidArgument("range must be at least 1".into()));
    }
    if condition == ConditionId::LowerSum && range < params.n0 {
        return Err(Error::RangeBelowStart {
            range,
            n0: params.n0,
        });
    }
    let weights = class.tilted_weights(&params.rho, range);
    let verdict = match condition {
        ConditionId::Strong | ConditionId::Upper => {
            let (terms, _) = size_terms(&weights);
            let exact = weights.is_exact() && all_exact(&[&params.theta_upper, &params.theta]);
            let mut scan = Scan::new((!exact).then_some(FLOAT_REL_TOL));
            for (j, t) in terms.iter().enumerate().skip(1) {
                if condition == ConditionId::Strong {
                    scan.visit(j, t.clone(), params.theta.clone(), BoundKind::Lower);
                }
                scan.visit(j, t.clone(), params.theta_upper.clone(), BoundKind::Upper);
            }
            scan.verdict(condition, range)
        }
        ConditionId::LowerSum => {
            let (_, sums) = size_terms(&weights);
            let exact = weights.is_exact() && all_exact(&[&params.theta]);
            let mut scan = Scan::new((!exact).then_some(FLOAT_REL_TOL));
            for (n, s) in sums.iter().enumerate().skip(params.n0) {
                scan.visit(
                    n,
                    s.clone(),
                    times_integer(&params.theta, n),
                    BoundKind::Lower,
                );
            }
            scan.verdict(condition, range)
        }
        ConditionId::QLower => {
            let theta_prime = params.theta_prime.to_f64();
            let mut scan = Scan::new(Some(FLOAT_REL_TOL));
            for (n, lhs, growth) in q_lower_terms(class, &params.rho, range)? {
                scan.visit(
                    n,
                    Real::Float(lhs),
                    Real::Float(theta_prime * growth),
                    BoundKind::Lower,
                );
            }
            scan.verdict(condition, range)
        }
    };
    Ok(verdict)
}

/// Raw constants read off a finite range, without any validity filter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantScan {
    pub rho: Real,
    /// `max_{j<=N} rho^j j lambda_j`.
    pub theta_upper: Real,
    /// `min_{j<=N} rho^j j lambda_j`.
    pub strong_lower: Real,
    /// Best `min_{n0<=n<=N} S(n)/n` over `n0` in `[1, N/2]`.
    pub theta: Real,
    pub n0: usize,
    /// `min_{n<=N} n Q(n) rho^n / exp(sum_{j<=n} lambda_j rho^j)`.
    pub theta_prime: f64,
    pub theta_prime_at: Option<usize>,
    pub range: usize,
}

pub fn scan_constants(class: &AssemblyClass, rho: &Real, range: usize) -> Result<ConstantScan> {
    if range == 0 {
        return Err(Error::InvalidArgument("range must be at least 1".into()));
    }
    let weights = class.tilted_weights(rho, range);
    let (terms, sums) = size_terms(&weights);
    let pick = |ord: Ordering| {
        terms[1..]
            .iter()
            .fold(None::<&Real>, |best, t| match best {
                Some(b) if t.compare(b) != ord => Some(b),
                _ => Some(t),
            })
            .cloned()
            .expect("range >= 1")
    };
    let theta_upper = pick(Ordering::Greater);
    let strong_lower = pick(Ordering::Less);

    // density[n] = S(n)/n, suffix minima give theta(n0).
    let density: Vec<Real> = (1..=range)
        .map(|n| match &sums[n] {
            Real::Exact(s) => Real::Exact(s / BigRational::from_integer(n.into())),
            Real::Float(s) => Real::Float(s / n as f64),
        })
        .collect();
    let mut suffix_min = density.clone();
    for i in (0..range.saturating_sub(1)).rev() {
        if suffix_min[i + 1].compare(&suffix_min[i]) == Ordering::Less {
            suffix_min[i] = suffix_min[i + 1].clone();
        }
    }
    let last_start = (range / 2).max(1);
    let mut n0 = 1;
    for start in 2..=last_start {
        if suffix_min[start - 1].compare(&suffix_min[n0 - 1]) == Ordering::Greater {
            n0 = start;
        }
    }
    let theta = suffix_min[n0 - 1].clone();

    let mut theta_prime = f64::INFINITY;
    let mut theta_prime_at = None;
    for (n, lhs, growth) in q_lower_terms(class, rho, range)? {
        let r = lhs / growth;
        if r < theta_prime {
            theta_prime = r;
            theta_prime_at = Some(n);
        }
    }
    if theta_prime_at.is_none() {
        theta_prime = 0.0;
    }
    Ok(ConstantScan {
        rho: rho.clone(),
        theta_upper,
        strong_lower,
        theta,
        n0,
        theta_prime,
        theta_prime_at,
        range,
    })
}

/// Constants under which the class passes the upper, lower_sum and q_lower
/// checks on `[1, N]`, or `None` when any of them degenerates to zero.
pub fn suggest_constants(
    class: &AssemblyClass,
    rho: &Real,
    range: usize,
) -> Result<Option<WeaklyLogParams>> {
    let scan = scan_constants(class, rho, range)?;
    let degenerate = |x: &Real| {
        let f = x.to_f64();
        !x.is_positive() || !f.is_finite() || f <= DEGENERATE_CONSTANT
    };
    if degenerate(&scan.theta_upper)
        || degenerate(&scan.theta)
        || !(scan.theta_prime.is_finite() && scan.theta_prime > DEGENERATE_CONSTANT)
    {
        return Ok(None);
    }
    debug_assert!(!scan.theta.as_exact().is_some_and(|t| t.is_negative()));
    WeaklyLogParams::new(
        rho.clone(),
        scan.theta_upper,
        scan.theta,
        Real::Float(scan.theta_prime),
        scan.n0,
    )
    .map(Some)
}
