//! Published code tables shipped with the crate.
//!
//! Table ids: `I` and `III` hold `xy`-form codes, `II` and `IV` coprime
//! `π`-form codes.

use serde::{Deserialize, Serialize};

use crate::codes::{build_checks, dimension, CodeSpec, SpecDocument};
use crate::distance::{
    distance_upperbound, exact_distance, ExactDistance, LogicalTestContext, ProbeConfig,
    DEFAULT_EXACT_BUDGET,
};
use crate::error::{Error, Result};

const TABLES_JSON: &str = include_str!("../data/tables.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub table: String,
    pub row: usize,
    pub l: usize,
    pub m: usize,
    pub form: String,
    pub a: String,
    pub b: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

impl TableRow {
    pub fn id(&self) -> String {
        format!("{}:{}", self.table, self.row)
    }

    pub fn document(&self) -> SpecDocument {
        SpecDocument {
            l: self.l,
            m: self.m,
            a: self.a.clone(),
            b: self.b.clone(),
            form: self.form.clone(),
        }
    }

    pub fn spec(&self) -> Result<CodeSpec> {
        let spec = CodeSpec::from_document(&self.document())?;
        if spec.n() != self.n {
            return Err(Error::InvalidSpec(format!(
                "{}: n = {} but 2lm = {}",
                self.id(),
                self.n,
                spec.n()
            )));
        }
        Ok(spec)
    }

    pub fn label(&self) -> String {
        format!("[[{},{},{}]]", self.n, self.k, self.d)
    }
}

/// All fixture rows in table order.
pub fn all_rows() -> Vec<TableRow> {
    serde_json::from_str(TABLES_JSON).expect("bundled tables parse")
}

pub fn rows_of(table: &str) -> Vec<TableRow> {
    all_rows()
        .into_iter()
        .filter(|r| r.table.eq_ignore_ascii_case(table))
        .collect()
}

/// Looks up `TABLE:ROW`, e.g. `II:1`.
pub fn find(id: &str) -> Result<TableRow> {
    let (table, row) = id
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("fixture id {id:?} is not TABLE:ROW")))?;
    let row: usize = row
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad row number in {id:?}")))?;
    all_rows()
        .into_iter()
        .find(|r| r.table.eq_ignore_ascii_case(table) && r.row == row)
        .ok_or_else(|| Error::InvalidArgument(format!("no fixture {id}")))
}

/// How a row's distance claim fared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceStatus {
    /// Exhaustive search confirmed the printed distance.
    Exact,
    /// The probe found a logical of exactly the printed weight; lighter ones
    /// were not excluded.
    Bounded,
    /// The probe never got down to the printed weight.
    Unreached,
    /// The printed distance is contradicted, or the code has no logicals.
    Mismatch,
    /// Exhaustive search ran out of budget.
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Rows up to this length get an exhaustive distance check.
    pub exact_max_n: usize,
    pub exact_budget: u64,
    /// Settings of the probe for longer rows; `tau_d` is set per row.
    pub probe: ProbeConfig,
    /// End the probe once it reaches the printed distance instead of
    /// spending the remaining trials looking for a lighter logical.
    pub stop_at_target: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            exact_max_n: 56,
            exact_budget: DEFAULT_EXACT_BUDGET,
            probe: ProbeConfig {
                trials: 100_000,
                ..ProbeConfig::default()
            },
            stop_at_target: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowReport {
    pub id: String,
    pub label: String,
    pub n: usize,
    pub k_table: usize,
    pub k_computed: usize,
    pub k_ok: bool,
    pub d_table: usize,
    pub d_exact: Option<usize>,
    pub d_upper: Option<usize>,
    pub d_status: DistanceStatus,
    pub trials_used: usize,
}

impl RowReport {
    pub fn passed(&self) -> bool {
        self.k_ok
            && matches!(
                self.d_status,
                DistanceStatus::Exact | DistanceStatus::Bounded
            )
    }
}

/// Rebuilds a row and checks its printed `k` and `d`.
pub fn verify_row(row: &TableRow, opts: &VerifyOptions) -> Result<RowReport> {
    let spec = row.spec()?;
    let pc = build_checks(&spec)?;
    let k = dimension(&pc)?;
    let ctx = LogicalTestContext::from_checks(&pc);
    let mut report = RowReport {
        id: row.id(),
        label: row.label(),
        n: row.n,
        k_table: row.k,
        k_computed: k,
        k_ok: k == row.k,
        d_table: row.d,
        d_exact: None,
        d_upper: None,
        d_status: DistanceStatus::Mismatch,
        trials_used: 0,
    };
    if k == 0 {
        return Ok(report);
    }
    if row.n <= opts.exact_max_n {
        match exact_distance(&ctx, row.d, opts.exact_budget) {
            Ok(ExactDistance::Found { distance, .. }) => {
                report.d_exact = Some(distance);
                report.d_upper = Some(distance);
                if distance == row.d {
                    report.d_status = DistanceStatus::Exact;
                }
            }
            // Heavier than printed.
            Ok(ExactDistance::Exceeds(_)) => {}
            Err(Error::BudgetExceeded(_)) => report.d_status = DistanceStatus::BudgetExceeded,
            Err(e) => return Err(e),
        }
    } else {
        let probe = distance_upperbound(
            &ctx,
            &ProbeConfig {
                tau_d: if opts.stop_at_target {
                    row.d + 1
                } else {
                    row.d
                },
                ..opts.probe
            },
        );
        report.d_upper = probe.d_upper;
        report.trials_used = probe.trials_used;
        report.d_status = match probe.d_upper {
            Some(d) if d == row.d => DistanceStatus::Bounded,
            Some(d) if d < row.d => DistanceStatus::Mismatch,
            _ => DistanceStatus::Unreached,
        };
    }
    Ok(report)
}
