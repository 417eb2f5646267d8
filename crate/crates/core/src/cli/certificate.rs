use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::engine::{self, Backend, DecideOptions, Outcome, Verdict};
use crate::formula::{parse_typed_sentence, parse_untyped_sentence, to_prenex};
use crate::stratification::{decorate, stratify, FragmentClass};

pub const CERTIFICATE_SCHEMA: &str = "certificate-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Syntax {
    /// Untyped, stratified as an NF formula.
    Nf,
    /// Every binder annotated with its type.
    Typed,
}

impl Syntax {
    /// Typed when any `name:type` annotation occurs.
    pub fn detect(input: &str) -> Syntax {
        if input.contains(':') {
            Syntax::Typed
        } else {
            Syntax::Nf
        }
    }
}

/// The record of one decision. Keys serialize in sorted order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub version: String,
    pub input: String,
    pub syntax: Syntax,
    /// `--atoms`, when given.
    pub requested_atoms: Option<u64>,
    pub prenex: Option<String>,
    pub stratification: Option<BTreeMap<String, u32>>,
    pub fragment: serde_json::Value,
    pub bounds: Option<serde_json::Value>,
    pub backend: Backend,
    pub model_size: Option<u64>,
    pub abstract_atoms: Option<u64>,
    pub schedule: Vec<u64>,
    pub leaves: u64,
    pub cross_checked: Vec<u64>,
    pub verdict: Outcome,
    pub via_negation: bool,
    pub witnesses: Vec<String>,
    pub counterexample: Vec<String>,
    pub flags: Vec<String>,
    pub reason: Option<String>,
    /// Not part of what a re-check compares.
    pub wall_clock_ms: u64,
}

/// Parses, stratifies if needed, prenexes and decides `input`.
pub fn cmd_decide(input: &str, syntax: Syntax, opts: &DecideOptions) -> Result<Certificate, CliError> {
    let start = Instant::now();
    let mut stratification = None;
    let typed = match syntax {
        Syntax::Typed => parse_typed_sentence(input)?,
        Syntax::Nf => {
            let f = parse_untyped_sentence(input)?;
            match stratify(&f) {
                Ok(sigma) => {
                    let typed = decorate(&f, &sigma)?;
                    stratification = Some(sigma.0);
                    typed
                }
                Err(e) => {
                    let fragment = FragmentClass::Outside { reason: e.to_string() };
                    return Ok(Certificate {
                        schema: CERTIFICATE_SCHEMA.into(),
                        version: env!("CARGO_PKG_VERSION").into(),
                        input: input.into(),
                        syntax,
                        requested_atoms: opts.atoms,
                        prenex: None,
                        stratification: None,
                        fragment: serde_json::to_value(&fragment)?,
                        bounds: None,
                        backend: opts.backend,
                        model_size: None,
                        abstract_atoms: None,
                        schedule: vec![],
                        leaves: 0,
                        cross_checked: vec![],
                        verdict: Outcome::OutsideFragment,
                        via_negation: false,
                        witnesses: vec![],
                        counterexample: vec![],
                        flags: vec![],
                        reason: Some(e.to_string()),
                        wall_clock_ms: start.elapsed().as_millis() as u64,
                    });
                }
            }
        }
    };
    let p = to_prenex(&typed);
    let v: Verdict = engine::decide(&p, opts)?;
    Ok(Certificate {
        schema: CERTIFICATE_SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        input: input.into(),
        syntax,
        requested_atoms: opts.atoms,
        prenex: Some(p.to_string()),
        stratification,
        fragment: serde_json::to_value(&v.fragment)?,
        bounds: v.bounds.as_ref().map(serde_json::to_value).transpose()?,
        backend: v.backend,
        model_size: v.model_size,
        abstract_atoms: v.abstract_atoms,
        schedule: v.schedule,
        leaves: v.leaves,
        cross_checked: v.cross_checked,
        verdict: v.outcome,
        via_negation: v.via_negation,
        witnesses: v.witnesses,
        counterexample: v.counterexample,
        flags: v.flags,
        reason: v.reason,
        wall_clock_ms: start.elapsed().as_millis() as u64,
    })
}

impl Certificate {
    /// Canonical JSON: sorted keys, two-space indentation.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("certificate serializes");
        serde_json::to_string_pretty(&value).expect("JSON value prints")
    }

    pub fn from_json(text: &str) -> Result<Certificate, CliError> {
        let cert: Certificate = serde_json::from_str(text)?;
        if cert.schema != CERTIFICATE_SCHEMA {
            return Err(CliError::Usage(format!("unknown certificate schema {}", cert.schema)));
        }
        Ok(cert)
    }

    /// Decides the input again with the recorded options and compares
    /// every field except the wall clock.
    pub fn recheck(&self) -> Result<(), CliError> {
        let opts = DecideOptions { backend: self.backend, atoms: self.requested_atoms, ..DecideOptions::default() };
        let mut again = cmd_decide(&self.input, self.syntax, &opts)?;
        again.wall_clock_ms = self.wall_clock_ms;
        if again != *self {
            return Err(CliError::Mismatch(format!("re-running gives a different certificate:\n{}", again.to_json())));
        }
        Ok(())
    }

    /// Plain-text rendering.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "input:          {}", self.input);
        if let Some(p) = &self.prenex {
            let _ = writeln!(s, "prenex:         {p}");
        }
        if let Some(sigma) = &self.stratification {
            let types: Vec<String> = sigma.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            let _ = writeln!(s, "stratification: {{{}}}", types.join(", "));
        }
        let fragment = self.fragment.get("form").and_then(|f| f.as_str()).unwrap_or("?");
        let _ = writeln!(s, "fragment:       {fragment}");
        if let Some(b) = &self.bounds {
            let field = |k: &str| b.get(k).map(|v| v.to_string().trim_matches('"').to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "bounds:         g_bound={} ab_bound={} certified_m={}",
                field("g_bound"),
                field("ab_bound"),
                field("certified_m")
            );
        }
        let _ = writeln!(s, "backend:        {:?}", self.backend);
        match (self.model_size, self.abstract_atoms) {
            (Some(m), _) => {
                let _ = writeln!(s, "model size:     {m}");
            }
            (None, Some(t)) => {
                let _ = writeln!(s, "model size:     every m >= {t} (abstract, {} leaves)", self.leaves);
            }
            _ => {}
        }
        if !self.cross_checked.is_empty() {
            let _ = writeln!(s, "cross-checked:  m in {:?}", self.cross_checked);
        }
        let _ =
            writeln!(s, "verdict:        {:?}{}", self.verdict, if self.via_negation { " (via negation)" } else { "" });
        if let Some(r) = &self.reason {
            let _ = writeln!(s, "reason:         {r}");
        }
        for w in &self.witnesses {
            let _ = writeln!(s, "witness:        {w}");
        }
        for c in &self.counterexample {
            let _ = writeln!(s, "counterexample: {c}");
        }
        if !self.flags.is_empty() {
            let _ = writeln!(s, "flags:          {}", self.flags.join(", "));
        }
        s
    }
}
