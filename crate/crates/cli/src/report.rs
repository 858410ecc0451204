//! Report records and their JSON / Markdown renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use secant_core::catalog::{Mismatch, Skipped, VerifyResult};
use secant_core::terracini::{ContactClass, SecantReport, TangentialReport};
use secant_core::{Engine, VarietySpec};

/// SHA-256 of the spec serialized with sorted keys and no whitespace.
pub fn spec_hash(spec: &VarietySpec) -> String {
    let value = serde_json::to_value(spec).expect("spec serializes");
    hex::encode(Sha256::digest(value.to_string().as_bytes()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub spec_hash: String,
    pub seed: u64,
    pub primes: Vec<u64>,
    pub trials: usize,
    pub ambient_r: usize,
    pub dim_n: usize,
    pub chain: Vec<usize>,
    pub sigma_k: usize,
    pub delta_k: usize,
    pub n_k: Option<usize>,
    pub m_k: Option<usize>,
    pub contact_shape: Option<ContactClass>,
    pub h1: usize,
    pub h2: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    pub mismatches: Vec<Mismatch>,
    /// Order the per-order fields refer to; shown in Markdown only.
    #[serde(skip)]
    pub k: usize,
}

impl Report {
    /// Report of an `analyze` run at order `k`; `chain` may extend past `k`.
    pub fn analysis(
        engine: &Engine,
        spec: &VarietySpec,
        secant: &SecantReport,
        k: usize,
        tangential: Option<&TangentialReport>,
        contact: Option<ContactClass>,
        (h1, h2): (usize, usize),
    ) -> Report {
        let at = secant.at(k);
        Report {
            spec_hash: spec_hash(spec),
            seed: engine.seed(),
            primes: engine.moduli(),
            trials: engine.trials(),
            ambient_r: at.r,
            dim_n: at.n,
            chain: secant.chain.clone(),
            sigma_k: at.sigma_k,
            delta_k: at.delta_k,
            n_k: tangential.map(|t| t.n_k),
            m_k: tangential.map(|t| t.m_k),
            contact_shape: contact,
            h1,
            h2,
            pass: None,
            mismatches: Vec::new(),
            k,
        }
    }

    pub fn verification(engine: &Engine, v: &VerifyResult) -> Report {
        let m = &v.measured;
        let mut rep = Report::analysis(
            engine,
            &v.entry.spec,
            &m.secant,
            v.entry.order,
            Some(&m.tangential),
            Some(m.contact.classification),
            (m.h1, m.h2),
        );
        rep.pass = Some(v.pass);
        rep.mismatches = v.mismatches.clone();
        rep
    }

    pub fn markdown(&self, title: &str) -> String {
        let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        let chain: Vec<String> = self.chain.iter().map(|s| s.to_string()).collect();
        let rows = [
            ("spec_hash", format!("`{}`", self.spec_hash)),
            ("seed", self.seed.to_string()),
            ("primes", format!("{:?}", self.primes)),
            ("trials", self.trials.to_string()),
            ("k", self.k.to_string()),
            ("ambient_r", self.ambient_r.to_string()),
            ("dim_n", self.dim_n.to_string()),
            ("chain", chain.join(", ")),
            ("sigma_k", self.sigma_k.to_string()),
            ("delta_k", self.delta_k.to_string()),
            ("n_k", opt(self.n_k)),
            ("m_k", opt(self.m_k)),
            ("contact_shape", self.contact_shape.map_or("-".to_string(), |c| format!("{c:?}"))),
            ("h1", self.h1.to_string()),
            ("h2", self.h2.to_string()),
        ];
        let mut out = format!("## {title}\n\n| field | value |\n|---|---|\n");
        for (name, value) in rows {
            let _ = writeln!(out, "| {name} | {value} |");
        }
        if let Some(pass) = self.pass {
            let _ = writeln!(out, "| pass | {pass} |");
        }
        if !self.mismatches.is_empty() {
            out.push('\n');
            out.push_str(&mismatch_table(&self.mismatches));
        }
        out
    }
}

pub fn mismatch_table(ms: &[Mismatch]) -> String {
    let mut out = String::from("| field | expected | measured |\n|---|---|---|\n");
    for m in ms {
        let _ = writeln!(out, "| {} | {} | {} |", m.field, m.expected, m.measured);
    }
    out
}

/// One entry of a verify-all run.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum EntryReport {
    Report(Box<Report>),
    Error { pass: bool, error: String },
}

impl EntryReport {
    pub fn pass(&self) -> bool {
        matches!(self, EntryReport::Report(r) if r.pass == Some(true))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyAllReport {
    pub entries: BTreeMap<String, EntryReport>,
    pub skipped: Vec<Skipped>,
}

impl VerifyAllReport {
    pub fn markdown(&self) -> String {
        let mut out = String::from("## catalog verify-all\n\n| entry | pass | r | chain | delta_k | n_k | mismatches |\n|---|---|---|---|---|---|---|\n");
        for (key, e) in &self.entries {
            match e {
                EntryReport::Report(r) => {
                    let ms: Vec<String> = r.mismatches.iter().map(|m| format!("{}: {} != {}", m.field, m.measured, m.expected)).collect();
                    let chain: Vec<String> = r.chain.iter().map(|s| s.to_string()).collect();
                    let _ = writeln!(
                        out,
                        "| {key} | {} | {} | {} | {} | {} | {} |",
                        r.pass == Some(true),
                        r.ambient_r,
                        chain.join(", "),
                        r.delta_k,
                        r.n_k.map_or("-".into(), |n| n.to_string()),
                        ms.join("; ")
                    );
                }
                EntryReport::Error { error, .. } => {
                    let _ = writeln!(out, "| {key} | false | - | - | - | - | error: {error} |");
                }
            }
        }
        if !self.skipped.is_empty() {
            out.push_str("\n### skipped\n\n| family | k | reason |\n|---|---|---|\n");
            for s in &self.skipped {
                let _ = writeln!(out, "| {} | {} | {} |", s.family, s.k, s.reason);
            }
        }
        out
    }
}

/// A `catalog verify` request without a representative.
#[derive(Clone, Debug, Serialize)]
pub struct SkippedReport {
    pub family: String,
    pub k: usize,
    pub skipped: bool,
    pub reason: String,
}
