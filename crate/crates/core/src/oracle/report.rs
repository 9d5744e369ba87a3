use serde::{Deserialize, Serialize};

use crate::hier::HierModel;

pub const SCHEMA_VERSION: u32 = 1;

/// Direction of a tolerance comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass when value < tolerance.
    Below,
    /// Pass when value > tolerance.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Criterion {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Criterion { name: name.into(), value, tolerance, bound: Bound::Below, passed: value < tolerance }
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Criterion { name: name.into(), value, tolerance, bound: Bound::Above, passed: value > tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSum {
    pub law: String,
    pub sum: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSection {
    pub counts: Vec<usize>,
    pub config_count: usize,
    pub sums: Vec<LawSum>,
}

impl NormalizationSection {
    pub fn max_abs_error(&self) -> f64 {
        self.sums.iter().map(|s| s.abs_error).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityRow {
    pub config_id: usize,
    pub r: usize,
    pub k_tilde: usize,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualitySection {
    pub counts: Vec<usize>,
    pub config_count: usize,
    pub max_residual: f64,
    pub rows: Vec<DualityRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McStatistic {
    pub statistic: String,
    pub samples: u64,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSection {
    pub draws: u64,
    pub seed: u64,
    pub statistics: Vec<McStatistic>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadDiagnostic {
    pub label: String,
    pub value: f64,
    pub reference: f64,
    pub rel_error: f64,
    pub error_estimate: f64,
}

/// A table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v:e}"),
            Cell::Text(v) => f.write_str(v),
        }
    }
}

/// Named rows for CSV emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Counts n⃗ as text, e.g. `3 2`.
pub fn counts_label(counts: &[usize]) -> String {
    counts.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
}

impl NormalizationSection {
    pub fn table(sections: &[NormalizationSection]) -> Table {
        let mut t = Table::new("normalize", &["counts", "law", "sum", "abs_error"]);
        for s in sections {
            for l in &s.sums {
                t.push(vec![counts_label(&s.counts).into(), l.law.clone().into(), l.sum.into(), l.abs_error.into()]);
            }
        }
        t
    }
}

impl DualitySection {
    /// Rows of all sections; config ids run on across sections.
    pub fn table(sections: &[DualitySection]) -> Table {
        let mut t = Table::new("duality", &["config_id", "r", "K_tilde", "log_lhs", "log_rhs", "residual"]);
        let mut offset = 0;
        for s in sections {
            for r in &s.rows {
                t.push(vec![(offset + r.config_id).into(), r.r.into(), r.k_tilde.into(), r.log_lhs.into(), r.log_rhs.into(), r.residual.into()]);
            }
            offset += s.config_count;
        }
        t
    }
}

impl McSection {
    pub fn table(sections: &[McSection]) -> Table {
        let mut t = Table::new("mc", &["statistic", "chi2", "dof", "p_value", "seed", "samples", "tv"]);
        for s in sections {
            for st in &s.statistics {
                t.push(vec![
                    st.statistic.clone().into(),
                    st.chi2.into(),
                    st.dof.into(),
                    st.p_value.into(),
                    Cell::Text(s.seed.to_string()),
                    st.samples.into(),
                    st.tv.into(),
                ]);
            }
        }
        t
    }
}

/// Outcome of one verification task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub sweep_id: String,
    pub model: Option<HierModel>,
    pub counts: Vec<usize>,
    pub config_count: usize,
    pub max_duality_residual: Option<f64>,
    pub normalization: Vec<NormalizationSection>,
    pub duality: Vec<DualitySection>,
    pub quadrature: Vec<QuadDiagnostic>,
    pub mc: Vec<McSection>,
    pub tables: Vec<Table>,
    pub criteria: Vec<Criterion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl VerificationReport {
    pub fn new(sweep_id: impl Into<String>) -> Self {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            sweep_id: sweep_id.into(),
            model: None,
            counts: Vec::new(),
            config_count: 0,
            max_duality_residual: None,
            normalization: Vec::new(),
            duality: Vec::new(),
            quadrature: Vec::new(),
            mc: Vec::new(),
            tables: Vec::new(),
            criteria: Vec::new(),
            wall_clock_seconds: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// Every table of the report: the typed sections first, then the extras.
    pub fn all_tables(&self) -> Vec<Table> {
        let mut out = Vec::new();
        if !self.normalization.is_empty() {
            out.push(NormalizationSection::table(&self.normalization));
        }
        if !self.duality.is_empty() {
            out.push(DualitySection::table(&self.duality));
        }
        if !self.mc.is_empty() {
            out.push(McSection::table(&self.mc));
        }
        if !self.quadrature.is_empty() {
            let mut t = Table::new("quadrature", &["label", "value", "reference", "rel_error", "error_estimate"]);
            for q in &self.quadrature {
                t.push(vec![q.label.clone().into(), q.value.into(), q.reference.into(), q.rel_error.into(), q.error_estimate.into()]);
            }
            out.push(t);
        }
        out.extend(self.tables.iter().cloned());
        let mut c = Table::new("criteria", &["name", "value", "tolerance", "bound", "passed"]);
        for k in &self.criteria {
            let bound = match k.bound {
                Bound::Below => "below",
                Bound::Above => "above",
            };
            c.push(vec![k.name.clone().into(), k.value.into(), k.tolerance.into(), bound.to_string().into(), Cell::Text(k.passed.to_string())]);
        }
        out.push(c);
        out
    }

    pub fn add_duality(&mut self, d: DualitySection) {
        self.config_count += d.config_count;
        self.max_duality_residual = Some(self.max_duality_residual.map_or(d.max_residual, |m| m.max(d.max_residual)));
        self.duality.push(d);
    }
}
