//! Convergence sweeps: `L^p` norms of a fixed polynomial in the normalized
//! generators across dimensions, against the free limit and the RD bound.
//!
//! Output is deterministic for a given config: rows follow config order,
//! reals are rendered as truncated decimals of the enclosing bracket midpoint.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Bracket;
use crate::ncpoly::{lp_norm_with, LpNorm, NcPolynomial};
use crate::qnum::GUARD_BITS;
use crate::rapid_decay::{dn_upper_bound, rd_bound};
use crate::weingarten::{Model, Weingarten};

/// Decimal digits printed for real values.
pub const DECIMAL_DIGITS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub polynomial: String,
    pub model: Model,
    #[serde(rename = "N")]
    pub n_list: Vec<u32>,
    pub p: Vec<u32>,
    pub kmax: usize,
    pub precision_bits: u32,
    pub format: OutputFormat,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidDimension { n, min: 2 });
        }
        if let Some(&p) = self.p.iter().find(|&&p| p < 2 || p % 2 == 1) {
            return Err(Error::InvalidArgument(format!("p = {p} must be an even integer >= 2")));
        }
        if self.n_list.is_empty() || self.p.is_empty() {
            return Err(Error::InvalidArgument("empty N or p list".into()));
        }
        Ok(())
    }
}

/// One `(N, p)` cell. `n = None` is the free-limit row.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub n: Option<u32>,
    pub p: u32,
    pub outcome: std::result::Result<RowValues, Error>,
}

#[derive(Clone, Debug)]
pub struct RowValues {
    pub finite: LpNorm,
    pub limit: LpNorm,
    pub gap: Bracket,
    /// `D_upper (deg+1)^{3/2} ||P||_2`; absent below `N = 3` and for the unitary model.
    pub rd_bound: Option<Bracket>,
    pub rd_holds: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn resource_errors(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.outcome, Err(Error::Resource { .. })))
            .count()
    }

    pub fn first_error(&self) -> Option<&Error> {
        self.rows.iter().find_map(|r| r.outcome.as_ref().err())
    }

    /// Whether every finite row satisfies its RD bound.
    pub fn rd_consistent(&self) -> bool {
        self.rows
            .iter()
            .all(|r| !matches!(&r.outcome, Ok(v) if v.rd_holds == Some(false)))
    }

    pub fn render(&self) -> String {
        match self.config.format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,p,lp_finite,lp_limit,gap,rd_bound\n");
        for row in &self.rows {
            let n = row.n.map_or("inf".to_string(), |n| n.to_string());
            match &row.outcome {
                Ok(v) => {
                    let rd = v.rd_bound.as_ref().map_or(String::new(), decimal);
                    writeln!(
                        out,
                        "{n},{},{},{},{},{rd}",
                        row.p,
                        decimal(&v.finite.value),
                        decimal(&v.limit.value),
                        decimal(&v.gap)
                    )
                    .unwrap();
                }
                Err(e) => writeln!(out, "{n},{},{},,,", row.p, error_cell(e)).unwrap(),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<JsonRow> = self.rows.iter().map(JsonRow::from).collect();
        let doc = JsonDoc {
            config: &self.config,
            rows,
            meta: Meta {
                precision_bits: self.config.precision_bits,
                kmax: self.config.kmax,
                version: env!("CARGO_PKG_VERSION"),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("sweep documents serialize");
        s.push('\n');
        s
    }
}

fn decimal(b: &Bracket) -> String {
    b.to_decimal(DECIMAL_DIGITS)
}

fn error_cell(e: &Error) -> String {
    match e {
        Error::Resource { k, n, .. } => format!("resource:k={k}:N={n}"),
        other => format!("error:{}", other.to_string().replace(',', ";")),
    }
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    config: &'a SweepConfig,
    rows: Vec<JsonRow>,
    meta: Meta,
}

#[derive(Serialize)]
struct Meta {
    precision_bits: u32,
    kmax: usize,
    version: &'static str,
}

#[derive(Serialize)]
struct JsonReal {
    value: String,
    lower: String,
    upper: String,
    bits: u32,
}

impl From<&Bracket> for JsonReal {
    fn from(b: &Bracket) -> Self {
        JsonReal {
            value: decimal(b),
            lower: b.lower().to_string(),
            upper: b.upper().to_string(),
            bits: b.bits(),
        }
    }
}

#[derive(Serialize)]
struct JsonNorm {
    moment: String,
    value: JsonReal,
}

impl From<&LpNorm> for JsonNorm {
    fn from(v: &LpNorm) -> Self {
        JsonNorm {
            moment: v.moment.to_string(),
            value: (&v.value).into(),
        }
    }
}

#[derive(Serialize)]
struct JsonRow {
    #[serde(rename = "N")]
    n: String,
    p: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    lp_finite: Option<JsonNorm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lp_limit: Option<JsonNorm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<JsonReal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rd_bound: Option<JsonReal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rd_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl From<&SweepRow> for JsonRow {
    fn from(row: &SweepRow) -> Self {
        let n = row.n.map_or("inf".to_string(), |n| n.to_string());
        match &row.outcome {
            Ok(v) => JsonRow {
                n,
                p: row.p,
                lp_finite: Some((&v.finite).into()),
                lp_limit: Some((&v.limit).into()),
                gap: Some((&v.gap).into()),
                rd_bound: v.rd_bound.as_ref().map(Into::into),
                rd_holds: v.rd_holds,
                error: None,
            },
            Err(e) => JsonRow {
                n,
                p: row.p,
                lp_finite: None,
                lp_limit: None,
                gap: None,
                rd_bound: None,
                rd_holds: None,
                error: Some(error_cell(e)),
            },
        }
    }
}

fn abs_diff(a: &Bracket, b: &Bracket) -> Bracket {
    let d = a.sub(b);
    if d.lower().is_negative() && d.upper().is_positive() {
        let zero = Bracket::from_int(0, d.bits());
        zero.hull(&d).hull(&d.neg())
    } else if d.upper().is_positive() {
        d
    } else {
        d.neg()
    }
}

fn finite_rows(
    engine: &Weingarten,
    poly: &NcPolynomial,
    n: u32,
    p_list: &[u32],
    limits: &[Result<LpNorm>],
    limit_l2: &Result<LpNorm>,
    bits: u32,
) -> Vec<SweepRow> {
    let scaled = poly.scaled_generators(n);
    let rd_constant: Option<Result<BigRational>> =
        (n >= 3 && poly.model() == Model::Orthogonal).then(|| dn_upper_bound(n));
    let l2 = rd_constant
        .as_ref()
        .map(|_| lp_norm_with(engine, &scaled, 2, Some(n), bits));
    p_list
        .iter()
        .zip(limits)
        .map(|(&p, limit)| {
            let outcome = (|| {
                let finite = lp_norm_with(engine, &scaled, p, Some(n), bits)?;
                let limit = limit.clone()?;
                let _ = limit_l2.as_ref().map_err(Clone::clone)?;
                let gap = abs_diff(&finite.value, &limit.value);
                let rd = match (&rd_constant, &l2) {
                    (Some(d), Some(l2)) => {
                        let d = d.clone()?;
                        let l2 = l2.clone()?;
                        Some(rd_bound(&d, scaled.degree(), &l2.value))
                    }
                    _ => None,
                };
                let rd_holds = rd.as_ref().map(|b| finite.value.certainly_le(b));
                Ok(RowValues {
                    finite,
                    limit,
                    gap,
                    rd_bound: rd,
                    rd_holds,
                })
            })();
            SweepRow {
                n: Some(n),
                p,
                outcome,
            }
        })
        .collect()
}

/// Runs a sweep on an engine whose `kmax` matches the config.
pub fn run_converge_with(engine: &Weingarten, config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let poly = NcPolynomial::parse(&config.polynomial, config.model)?;
    let bits = config.precision_bits + GUARD_BITS;
    let limits: Vec<Result<LpNorm>> = config
        .p
        .par_iter()
        .map(|&p| lp_norm_with(engine, &poly, p, None, bits))
        .collect();
    let limit_l2 = lp_norm_with(engine, &poly, 2, None, bits);

    let per_n: Vec<Vec<SweepRow>> = config
        .n_list
        .par_iter()
        .map(|&n| finite_rows(engine, &poly, n, &config.p, &limits, &limit_l2, bits))
        .collect();
    let mut rows: Vec<SweepRow> = per_n.into_iter().flatten().collect();

    for (&p, limit) in config.p.iter().zip(&limits) {
        let outcome = (|| {
            let limit = limit.clone()?;
            let l2 = limit_l2.clone()?;
            let bound = rd_bound(&BigRational::from_integer(1.into()), poly.degree(), &l2.value);
            Ok(RowValues {
                gap: Bracket::from_int(0, bits),
                rd_holds: Some(limit.value.certainly_le(&bound)),
                rd_bound: Some(bound),
                finite: limit.clone(),
                limit,
            })
        })();
        rows.push(SweepRow { n: None, p, outcome });
    }
    Ok(SweepResult {
        config: config.clone(),
        rows,
    })
}

/// Runs a sweep on a fresh engine with the config's `kmax`.
pub fn run_converge(config: &SweepConfig) -> Result<SweepResult> {
    run_converge_with(&Weingarten::new(config.kmax), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::DEFAULT_PRECISION_BITS;

    fn config(poly: &str, format: OutputFormat) -> SweepConfig {
        SweepConfig {
            polynomial: poly.into(),
            model: Model::Orthogonal,
            n_list: vec![4, 8],
            p: vec![2, 4],
            kmax: 12,
            precision_bits: DEFAULT_PRECISION_BITS,
            format,
        }
    }

    #[test]
    fn csv_shape() {
        let res = run_converge(&config("x[1,1]", OutputFormat::Csv)).unwrap();
        let csv = res.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,p,lp_finite,lp_limit,gap,rd_bound");
        assert_eq!(lines.len(), 1 + 4 + 2);
        assert!(lines[1].starts_with("4,2,1.000000"));
        assert!(lines[5].starts_with("inf,2,"));
        assert!(res.rd_consistent());
    }

    #[test]
    fn json_is_stable() {
        let c = config("x[1,1] + x[1,2]", OutputFormat::Json);
        let a = run_converge(&c).unwrap().render();
        let b = run_converge(&c).unwrap().render();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["meta"]["kmax"], 12);
        assert_eq!(v["rows"][0]["N"], "4");
        assert_eq!(v["rows"][0]["lp_finite"]["moment"], "2");
    }

    #[test]
    fn resource_rows() {
        let mut c = config("x[1,1]", OutputFormat::Csv);
        c.p = vec![2, 14];
        let res = run_converge(&c).unwrap();
        assert_eq!(res.resource_errors(), 2);
        assert!(res.to_csv().contains("4,14,resource:k=14:N=4,,,"));
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = config("x[1,1]", OutputFormat::Csv);
        c.p = vec![3];
        assert!(run_converge(&c).is_err());
        let mut c = config("x[1,1]", OutputFormat::Csv);
        c.n_list = vec![1];
        assert!(run_converge(&c).is_err());
    }
}
