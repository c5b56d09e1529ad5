//! Output documents and their JSON / CSV / markdown renderings.
//!
//! Exact values are always `{"num": "...", "den": "..."}` string pairs; the
//! accompanying `decimal` object is a display approximation and says so.

use kstab_core::exactmath::{approx_f64, Rational};
use kstab_core::invariants::EtaReport;
use kstab_core::models::AmpleModelSequence;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Serialize)]
pub struct Approx {
    pub value: f64,
    pub approx: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactRational {
    pub num: String,
    pub den: String,
    pub decimal: Approx,
}

impl From<&Rational> for ExactRational {
    fn from(value: &Rational) -> Self {
        Self {
            num: value.numer().to_string(),
            den: value.denom().to_string(),
            decimal: Approx {
                value: approx_f64(value),
                approx: true,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
}

impl Meta {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            tool: "kstab",
            version: env!("CARGO_PKG_VERSION"),
            command,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    pub source: String,
    pub n: u32,
    pub d: u32,
    pub c2: i64,
    pub c1_multiple: i64,
    pub degree: ExactRational,
    pub tau_breakpoints: Vec<ExactRational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DfValue {
    pub r: i64,
    pub value: ExactRational,
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceResult {
    pub label: String,
    pub tau_lo: ExactRational,
    pub tau_hi: ExactRational,
    pub integral: ExactRational,
    pub contribution: ExactRational,
}

#[derive(Debug, Clone, Serialize)]
pub struct Results {
    pub eta: ExactRational,
    pub eta_volume_check: Option<ExactRational>,
    pub df: Option<DfValue>,
    pub verdict: String,
    pub pieces: Vec<PieceResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeSample {
    pub x: ExactRational,
    pub v: ExactRational,
}

#[derive(Debug, Clone, Serialize)]
pub struct EtaDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub input: InputEcho,
    pub results: Results,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume_samples: Option<Vec<Vec<VolumeSample>>>,
}

impl EtaDocument {
    pub fn new(
        meta: Option<Meta>,
        source: String,
        seq: &AmpleModelSequence,
        report: &EtaReport,
        samples: Option<Vec<Vec<(Rational, Rational)>>>,
    ) -> Self {
        Self {
            meta,
            input: InputEcho {
                source,
                n: seq.n,
                d: seq.d,
                c2: seq.bundle.c2,
                c1_multiple: seq.bundle.c1_multiple,
                degree: (&seq.degree).into(),
                tau_breakpoints: seq.breakpoints().iter().map(Into::into).collect(),
            },
            results: Results {
                eta: (&report.eta).into(),
                eta_volume_check: report.eta_volume_check.as_ref().map(Into::into),
                df: report.df_at_r.as_ref().map(|(r, v)| DfValue {
                    r: *r,
                    value: v.into(),
                }),
                verdict: report.verdict.to_string(),
                pieces: report
                    .pieces_summary
                    .iter()
                    .map(|p| PieceResult {
                        label: p.label.clone(),
                        tau_lo: (&p.tau_lo).into(),
                        tau_hi: (&p.tau_hi).into(),
                        integral: (&p.integral).into(),
                        contribution: (&p.contribution).into(),
                    })
                    .collect(),
            },
            volume_samples: samples.map(|pieces| {
                pieces
                    .iter()
                    .map(|pts| {
                        pts.iter()
                            .map(|(x, v)| VolumeSample {
                                x: x.into(),
                                v: v.into(),
                            })
                            .collect()
                    })
                    .collect()
            }),
        }
    }

    /// `(section, key, value)` triples shared by the CSV and markdown views.
    fn rows(&self) -> Vec<(String, String, String)> {
        let exact = |r: &ExactRational| {
            if r.den == "1" {
                r.num.clone()
            } else {
                format!("{}/{}", r.num, r.den)
            }
        };
        let mut rows = Vec::new();
        let mut push = |section: &str, key: &str, value: String| {
            rows.push((section.to_string(), key.to_string(), value));
        };
        let input = &self.input;
        push("input", "source", input.source.clone());
        push("input", "n", input.n.to_string());
        push("input", "d", input.d.to_string());
        push("input", "c2", input.c2.to_string());
        push("input", "c1_multiple", input.c1_multiple.to_string());
        push("input", "degree", exact(&input.degree));
        push(
            "input",
            "tau_breakpoints",
            input
                .tau_breakpoints
                .iter()
                .map(exact)
                .collect::<Vec<_>>()
                .join(" "),
        );
        let results = &self.results;
        push("result", "eta", exact(&results.eta));
        push(
            "result",
            "eta_decimal_approx",
            results.eta.decimal.value.to_string(),
        );
        push(
            "result",
            "eta_volume_check",
            results
                .eta_volume_check
                .as_ref()
                .map_or("n/a".to_string(), exact),
        );
        if let Some(df) = &results.df {
            push("result", "df_r", df.r.to_string());
            push("result", "df", exact(&df.value));
            push(
                "result",
                "df_decimal_approx",
                df.value.decimal.value.to_string(),
            );
        }
        push("result", "verdict", results.verdict.clone());
        for (i, piece) in results.pieces.iter().enumerate() {
            let section = format!("piece {i}");
            push(&section, "label", piece.label.clone());
            push(&section, "tau_lo", exact(&piece.tau_lo));
            push(&section, "tau_hi", exact(&piece.tau_hi));
            push(&section, "integral", exact(&piece.integral));
            push(&section, "contribution", exact(&piece.contribution));
        }
        if let Some(samples) = &self.volume_samples {
            for (i, pts) in samples.iter().enumerate() {
                let section = format!("volume piece {i}");
                for s in pts {
                    push(&section, &exact(&s.x), exact(&s.v));
                }
            }
        }
        rows
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut out = csv_writer();
                out.write_record(["section", "key", "value"])
                    .expect("in-memory write");
                for (s, k, v) in self.rows() {
                    out.write_record([s, k, v]).expect("in-memory write");
                }
                csv_finish(out)
            }
            Format::Markdown => {
                let mut text = String::from("| section | key | value |\n|:---|:---|---:|\n");
                for (s, k, v) in self.rows() {
                    text.push_str(&format!(
                        "| {} | {} | {} |\n",
                        md_cell(&s),
                        md_cell(&k),
                        md_cell(&v)
                    ));
                }
                text
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub n: u32,
    pub c2: i64,
    pub tau1: ExactRational,
    pub tau2: ExactRational,
    pub eta: ExactRational,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub rows: Vec<TableRow>,
}

impl TableDocument {
    pub fn render(&self, format: Format) -> String {
        let exact = |r: &ExactRational| {
            if r.den == "1" {
                r.num.clone()
            } else {
                format!("{}/{}", r.num, r.den)
            }
        };
        let cells = |row: &TableRow| {
            [
                row.n.to_string(),
                row.c2.to_string(),
                exact(&row.tau1),
                exact(&row.tau2),
                exact(&row.eta),
                row.verdict.clone(),
            ]
        };
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut out = csv_writer();
                out.write_record(["n", "c2", "tau1", "tau2", "eta", "verdict"])
                    .expect("in-memory write");
                for row in &self.rows {
                    out.write_record(cells(row)).expect("in-memory write");
                }
                csv_finish(out)
            }
            Format::Markdown => {
                let mut text = String::from(
                    "| n | c2 | tau1 | tau2 | eta | verdict |\n|---:|---:|---:|---:|---:|:---|\n",
                );
                for row in &self.rows {
                    let c = cells(row);
                    text.push_str(&format!("| {} |\n", c.map(|s| md_cell(&s)).join(" | ")));
                }
                text
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("document serializes");
    text.push('\n');
    text
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn csv_finish(writer: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8 csv")
}

fn md_cell(text: &str) -> String {
    text.replace('|', "\\|")
}
