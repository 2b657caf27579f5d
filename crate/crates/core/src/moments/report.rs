use std::cmp::Ordering;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{Real, Scalar};

pub const SWEEP_HEADER: [&str; 7] = ["n", "mean", "variance", "rhs1", "rhs2", "ratio1", "ratio2"];

/// Moments and bound values of one additive function at order `n`.
///
/// Ratios are `None` whenever the matching bound is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport<S> {
    pub n: usize,
    pub mean: S,
    pub variance: S,
    pub rhs1: S,
    pub rhs2: Option<S>,
    pub ratio1: Option<S>,
    pub ratio2: Option<S>,
}

impl<S: Scalar> MomentReport<S> {
    pub fn new(n: usize, mean: S, variance: S, rhs1: S, rhs2: Option<S>) -> Self {
        let ratio = |rhs: &S| (!rhs.is_zero()).then(|| variance.over(rhs));
        let ratio1 = ratio(&rhs1);
        let ratio2 = rhs2.as_ref().and_then(ratio);
        // a vanishing general bound means every weighted h_j(k) is zero
        debug_assert!(!S::EXACT || !rhs1.is_zero() || variance.is_zero());
        MomentReport {
            n,
            mean,
            variance,
            rhs1,
            rhs2,
            ratio1,
            ratio2,
        }
    }

    fn fields(&self) -> [String; 7] {
        let opt = |v: &Option<S>| v.as_ref().map(Scalar::render).unwrap_or_default();
        [
            self.n.to_string(),
            self.mean.render(),
            self.variance.render(),
            self.rhs1.render(),
            opt(&self.rhs2),
            opt(&self.ratio1),
            opt(&self.ratio2),
        ]
    }

    fn from_fields(fields: &[&str]) -> Result<Self> {
        if fields.len() != SWEEP_HEADER.len() {
            return Err(Error::Parse(fields.join(",")));
        }
        let opt = |s: &str| -> Result<Option<S>> {
            if s.is_empty() {
                Ok(None)
            } else {
                S::parse_value(s).map(Some)
            }
        };
        Ok(MomentReport {
            n: fields[0]
                .parse()
                .map_err(|_| Error::Parse(fields[0].to_string()))?,
            mean: S::parse_value(fields[1])?,
            variance: S::parse_value(fields[2])?,
            rhs1: S::parse_value(fields[3])?,
            rhs2: opt(fields[4])?,
            ratio1: opt(fields[5])?,
            ratio2: opt(fields[6])?,
        })
    }

    pub fn to_row(&self) -> ReportRow {
        let opt = |v: &Option<S>| v.as_ref().map(Scalar::to_real);
        ReportRow {
            n: self.n,
            mean: self.mean.to_real(),
            variance: self.variance.to_real(),
            rhs1: self.rhs1.to_real(),
            rhs2: opt(&self.rhs2),
            ratio1: opt(&self.ratio1),
            ratio2: opt(&self.ratio2),
        }
    }

    fn from_row(row: &ReportRow) -> Result<Self> {
        let conv = |r: &Real| -> Result<S> {
            match r {
                Real::Exact(q) if S::EXACT => Ok(S::from_rational(q)),
                Real::Float(x) if !S::EXACT => Ok(S::from_f64(*x).expect("float scalar")),
                other => Err(Error::Parse(format!(
                    "value {other} does not match the table mode"
                ))),
            }
        };
        let opt = |r: &Option<Real>| r.as_ref().map(conv).transpose();
        Ok(MomentReport {
            n: row.n,
            mean: conv(&row.mean)?,
            variance: conv(&row.variance)?,
            rhs1: conv(&row.rhs1)?,
            rhs2: opt(&row.rhs2)?,
            ratio1: opt(&row.ratio1)?,
            ratio2: opt(&row.ratio2)?,
        })
    }
}

/// Serialized form of a [`MomentReport`]: exact values are `"p/q"` strings,
/// floats are numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub mean: Real,
    pub variance: Real,
    pub rhs1: Real,
    pub rhs2: Option<Real>,
    pub ratio1: Option<Real>,
    pub ratio2: Option<Real>,
}

/// Reports over a range of orders with the largest ratios seen.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary<S> {
    pub reports: Vec<MomentReport<S>>,
    /// Orders without structures.
    pub skipped: Vec<usize>,
    pub sup_ratio1: Option<(usize, S)>,
    pub sup_ratio2: Option<(usize, S)>,
}

fn running_sup<S: Scalar>(items: impl Iterator<Item = (usize, S)>) -> Option<(usize, S)> {
    items.fold(None, |best, (n, r)| match best {
        Some((bn, b)) if r.partial_cmp(&b) != Some(Ordering::Greater) => Some((bn, b)),
        _ => Some((n, r)),
    })
}

impl<S: Scalar> SweepSummary<S> {
    pub fn new(reports: Vec<MomentReport<S>>, skipped: Vec<usize>) -> Self {
        let sup_ratio1 = running_sup(
            reports
                .iter()
                .filter_map(|r| r.ratio1.clone().map(|v| (r.n, v))),
        );
        let sup_ratio2 = running_sup(
            reports
                .iter()
                .filter_map(|r| r.ratio2.clone().map(|v| (r.n, v))),
        );
        SweepSummary {
            reports,
            skipped,
            sup_ratio1,
            sup_ratio2,
        }
    }

    /// Largest `ratio1` over reports with `n <= upto`.
    pub fn sup_ratio1_upto(&self, upto: usize) -> Option<(usize, S)> {
        running_sup(
            self.reports
                .iter()
                .filter(|r| r.n <= upto)
                .filter_map(|r| r.ratio1.clone().map(|v| (r.n, v))),
        )
    }

    pub fn sup_ratio2_upto(&self, upto: usize) -> Option<(usize, S)> {
        running_sup(
            self.reports
                .iter()
                .filter(|r| r.n <= upto)
                .filter_map(|r| r.ratio2.clone().map(|v| (r.n, v))),
        )
    }

    /// `n,mean,variance,rhs1,rhs2,ratio1,ratio2` rows; absent values are
    /// empty fields.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SWEEP_HEADER)?;
        for r in &self.reports {
            w.write_record(r.fields())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Vec<MomentReport<S>>> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != SWEEP_HEADER {
            return Err(Error::Parse(header.join(",")));
        }
        r.records()
            .map(|rec| {
                let rec = rec?;
                let fields: Vec<&str> = rec.iter().collect();
                MomentReport::from_fields(&fields)
            })
            .collect()
    }

    pub fn to_document(&self, class: &str, family: &str, mode: &str) -> SweepDocument {
        SweepDocument {
            class: class.to_string(),
            family: family.to_string(),
            mode: mode.to_string(),
            skipped: self.skipped.clone(),
            sup_ratio1: self.sup_ratio1.as_ref().map(|(n, v)| (*n, v.to_real())),
            sup_ratio2: self.sup_ratio2.as_ref().map(|(n, v)| (*n, v.to_real())),
            reports: self.reports.iter().map(MomentReport::to_row).collect(),
        }
    }
}

/// JSON form of a sweep with class and family metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub class: String,
    pub family: String,
    pub mode: String,
    pub skipped: Vec<usize>,
    pub sup_ratio1: Option<(usize, Real)>,
    pub sup_ratio2: Option<(usize, Real)>,
    pub reports: Vec<ReportRow>,
}

impl SweepDocument {
    pub fn reports<S: Scalar>(&self) -> Result<Vec<MomentReport<S>>> {
        self.reports.iter().map(MomentReport::from_row).collect()
    }
}
