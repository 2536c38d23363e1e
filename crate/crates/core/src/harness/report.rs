use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "==",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One checked relation `lhs ⋈ rhs`. Rows with `asserted = false` are
/// informational and do not affect the exit status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    #[serde(with = "rational::serde_str")]
    pub lhs: Rational,
    pub relation: Relation,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
    pub pass: bool,
    pub asserted: bool,
}

impl Row {
    pub fn recheck(&self) -> bool {
        self.relation.holds(&self.lhs, &self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub pipeline: String,
    pub config_hash: String,
    pub seed: u64,
    pub budget: u128,
    /// Run parameters and informational values, all as strings.
    pub params: BTreeMap<String, String>,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(pipeline: impl Into<String>, config_hash: impl Into<String>, seed: u64, budget: u128) -> Self {
        Report {
            pipeline: pipeline.into(),
            config_hash: config_hash.into(),
            seed,
            budget,
            params: BTreeMap::new(),
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: impl Into<String>, value: impl ToString) {
        self.params.insert(key.into(), value.to_string());
    }

    pub fn value(&mut self, key: impl Into<String>, value: &Rational) {
        self.params.insert(key.into(), rational::format(value));
    }

    pub fn check(&mut self, name: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> bool {
        self.push(name, lhs, relation, rhs, true)
    }

    /// Records a row that is reported but not asserted.
    pub fn note(&mut self, name: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> bool {
        self.push(name, lhs, relation, rhs, false)
    }

    fn push(
        &mut self,
        name: impl Into<String>,
        lhs: Rational,
        relation: Relation,
        rhs: Rational,
        asserted: bool,
    ) -> bool {
        let pass = relation.holds(&lhs, &rhs);
        self.rows.push(Row {
            name: name.into(),
            lhs,
            relation,
            rhs,
            pass,
            asserted,
        });
        pass
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().filter(|r| r.asserted).all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.asserted && !r.pass)
    }

    /// Re-evaluates every row from its `lhs` and `rhs`; a row whose stored
    /// `pass` disagrees is reported by name.
    pub fn recheck(&self) -> Result<()> {
        match self.rows.iter().find(|r| r.recheck() != r.pass) {
            Some(r) => Err(Error::invalid(format!(
                "row {} does not re-evaluate to its pass flag",
                r.name
            ))),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["pipeline", "name", "lhs", "relation", "rhs", "pass", "asserted"])
            .map_err(csv_error)?;
        for r in &self.rows {
            w.write_record([
                self.pipeline.as_str(),
                &r.name,
                &rational::format(&r.lhs),
                r.relation.symbol(),
                &rational::format(&r.rhs),
                if r.pass { "true" } else { "false" },
                if r.asserted { "true" } else { "false" },
            ])
            .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::invalid(format!("csv: {e}"))
}
