//! Exact cross-checks of the engines against the brute-force oracle.

use assembly_core::oracle::{oracle_pmf, oracle_q, OracleSummary, PROFILE_CAP};
use assembly_core::{AdditiveFunction, AssemblyClass, BigRational, MomentEngine, Result, Scalar};

/// Largest order `--verify` accepts.
pub const VERIFY_CAP: usize = 40;

/// The first entry where engine and oracle disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub n: usize,
    pub field: String,
    pub engine: BigRational,
    pub oracle: BigRational,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "verification mismatch at n={} ({}): engine {} != oracle {}",
            self.n,
            self.field,
            self.engine.render(),
            self.oracle.render()
        )
    }
}

fn compare(
    n: usize,
    field: impl Into<String>,
    engine: &BigRational,
    oracle: &BigRational,
) -> Option<Mismatch> {
    (engine != oracle).then(|| Mismatch {
        n,
        field: field.into(),
        engine: engine.clone(),
        oracle: oracle.clone(),
    })
}

pub fn counts(class: &AssemblyClass, values: &[(usize, BigRational)]) -> Result<Option<Mismatch>> {
    debug_assert!(VERIFY_CAP <= PROFILE_CAP);
    for (n, q) in values {
        if let Some(m) = compare(*n, "Q", q, &oracle_q(class, *n)?) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

pub fn pmf(
    class: &AssemblyClass,
    n: usize,
    j: usize,
    engine: &[BigRational],
) -> Result<Option<Mismatch>> {
    let reference = oracle_pmf(class, n, j)?;
    for (k, (e, o)) in engine.iter().zip(&reference.probabilities).enumerate() {
        if let Some(m) = compare(n, format!("P(k_{j}={k})"), e, o) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Checks mean, variance and both bounds at order `n`.
pub fn report(
    engine: &MomentEngine<BigRational>,
    n: usize,
    h: &AdditiveFunction,
) -> Result<Option<Mismatch>> {
    let class = engine.class();
    let r = engine.report(n, h)?;
    let summary = OracleSummary::compute(class, n, std::slice::from_ref(h))?;
    let (mean, variance) = &summary.moments[0];
    for (field, e, o) in [
        ("mean", &r.mean, mean),
        ("variance", &r.variance, variance),
        ("rhs1", &r.rhs1, &summary.second_moment_bounds[0]),
    ] {
        if let Some(m) = compare(n, field, e, o) {
            return Ok(Some(m));
        }
    }
    if let Some(rhs2) = &r.rhs2 {
        let mut reference = BigRational::zero_value();
        for j in 1..=n {
            let a = h.a::<BigRational>(j)?.expect("completely additive");
            if a.is_zero() {
                continue;
            }
            reference += class.lambda(j) * &a * &a * oracle_q(class, n - j)?;
        }
        reference /= &summary.q;
        if let Some(m) = compare(n, "rhs2", rhs2, &reference) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}
