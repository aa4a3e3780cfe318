//! Result documents: one row per number, every row carrying the full
//! parameter context of the run.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Doc,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub quantity: String,
    pub index: String,
    pub value_re: f64,
    pub value_im: f64,
    /// Exact rendering for rational or integer results.
    pub exact: Option<String>,
    pub tail_bound: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub records: Vec<Record>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    command: &'a str,
    quantity: &'a str,
    index: &'a str,
    value_re: f64,
    value_im: f64,
    exact: &'a str,
    tail_bound: Option<f64>,
    params: &'a str,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            params: BTreeMap::new(),
            records: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn real(&mut self, quantity: &str, index: impl ToString, v: f64, tail: Option<f64>) {
        self.push(quantity, index, Complex64::new(v, 0.0), None, tail);
    }

    pub fn complex(&mut self, quantity: &str, index: impl ToString, v: Complex64, tail: Option<f64>) {
        self.push(quantity, index, v, None, tail);
    }

    pub fn exact(&mut self, quantity: &str, index: impl ToString, approx: f64, exact: impl ToString) {
        self.push(quantity, index, Complex64::new(approx, 0.0), Some(exact.to_string()), None);
    }

    pub fn flag(&mut self, quantity: &str, v: bool) {
        self.exact(quantity, "", if v { 1.0 } else { 0.0 }, v);
    }

    fn push(&mut self, quantity: &str, index: impl ToString, v: Complex64, exact: Option<String>, tail: Option<f64>) {
        self.records.push(Record {
            quantity: quantity.to_string(),
            index: index.to_string(),
            value_re: v.re,
            value_im: v.im,
            exact,
            tail_bound: tail,
        });
    }

    fn params_line(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    pub fn write(&self, format: Format, out: impl Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                let params = self.params_line();
                let mut w = csv::Writer::from_writer(out);
                for r in &self.records {
                    w.serialize(CsvRow {
                        command: &self.command,
                        quantity: &r.quantity,
                        index: &r.index,
                        value_re: r.value_re,
                        value_im: r.value_im,
                        exact: r.exact.as_deref().unwrap_or(""),
                        tail_bound: r.tail_bound,
                        params: &params,
                    })
                    .map_err(std::io::Error::other)?;
                }
                w.flush()
            }
            Format::Doc => {
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, self).map_err(std::io::Error::other)?;
                writeln!(out)
            }
        }
    }
}

pub fn index2(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

pub fn index3(i: usize, j: usize, k: usize) -> String {
    format!("{i},{j},{k}")
}
