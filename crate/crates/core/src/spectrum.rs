//! Eigenvalue lists with multiplicities, and their CSV file format.
//!
//! File layout:
//! ```text
//! # domain=disk
//! # bc=dirichlet
//! # mu=1
//! # lambda=1
//! # lambda_max=200
//! # method=potential
//! index,eigenvalue,multiplicity,mode_tag
//! 0,14.68197064212389,1,shear-k0
//! ```
//! Extra `# key=value` lines after the six required keys are preserved in order.

use std::fmt;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::elastic::{BoundaryCondition, Domain, LameParams};
use crate::error::{Error, Result};

/// Entries whose relative gap is at most this are merged.
pub const MERGE_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMethod {
    Potential,
    Fem,
    Analytic,
}

impl SpectrumMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Potential => "potential",
            Self::Fem => "fem",
            Self::Analytic => "analytic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "potential" => Ok(Self::Potential),
            "fem" => Ok(Self::Fem),
            "analytic" | "analyticdecoupled" | "synthetic" => Ok(Self::Analytic),
            other => Err(Error::Parse(format!("unknown spectrum method '{other}'"))),
        }
    }
}

impl fmt::Display for SpectrumMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: u32,
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub domain: Domain,
    pub bc: BoundaryCondition,
    pub params: LameParams,
    pub lambda_max: f64,
    pub method: SpectrumMethod,
    entries: Vec<SpectrumEntry>,
    /// Extra preamble items (mesh size, k_max, ...), kept in insertion order.
    pub meta: Vec<(String, String)>,
}

impl Spectrum {
    /// Sorts, drops values above `lambda_max`, and merges near-equal values.
    pub fn new(
        domain: Domain,
        bc: BoundaryCondition,
        params: LameParams,
        lambda_max: f64,
        method: SpectrumMethod,
        raw: Vec<SpectrumEntry>,
    ) -> Result<Self> {
        if !(lambda_max > 0.0) || !lambda_max.is_finite() {
            return Err(Error::Input(format!("lambda_max must be positive, got {lambda_max}")));
        }
        let mut raw: Vec<SpectrumEntry> = raw.into_iter().filter(|e| e.value <= lambda_max).collect();
        for e in &raw {
            if !e.value.is_finite() || e.value < 0.0 {
                return Err(Error::Input(format!("invalid eigenvalue {}", e.value)));
            }
            if e.multiplicity == 0 {
                return Err(Error::Input("multiplicity must be at least 1".into()));
            }
            if bc == BoundaryCondition::Dirichlet && e.value == 0.0 {
                return Err(Error::Input("Dirichlet spectrum must be strictly positive".into()));
            }
        }
        raw.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(Self {
            domain,
            bc,
            params,
            lambda_max,
            method,
            entries: merge_entries(raw),
            meta: Vec::new(),
        })
    }

    /// Keeps entries exactly as given; they must already be ascending and merged.
    fn from_sorted(
        domain: Domain,
        bc: BoundaryCondition,
        params: LameParams,
        lambda_max: f64,
        method: SpectrumMethod,
        entries: Vec<SpectrumEntry>,
        meta: Vec<(String, String)>,
    ) -> Self {
        Self {
            domain,
            bc,
            params,
            lambda_max,
            method,
            entries,
            meta,
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total count including multiplicities.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity as u64).sum()
    }

    /// Eigenvalues repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_count() as usize);
        for e in &self.entries {
            out.extend(std::iter::repeat(e.value).take(e.multiplicity as usize));
        }
        out
    }

    /// Copy restricted to values `<= cap`.
    pub fn truncated(&self, cap: f64) -> Result<Self> {
        let cap = cap.min(self.lambda_max);
        if !(cap > 0.0) {
            return Err(Error::Input(format!("truncation cap must be positive, got {cap}")));
        }
        let entries = self.entries.iter().filter(|e| e.value <= cap).cloned().collect();
        Ok(Self::from_sorted(
            self.domain,
            self.bc,
            self.params,
            cap,
            self.method,
            entries,
            self.meta.clone(),
        ))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv_string().as_bytes())
            .map_err(|e| Error::Input(format!("write failed: {e}")))
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# domain={}", self.domain);
        let _ = writeln!(s, "# bc={}", self.bc);
        let _ = writeln!(s, "# mu={}", self.params.mu());
        let _ = writeln!(s, "# lambda={}", self.params.lambda());
        let _ = writeln!(s, "# lambda_max={}", self.lambda_max);
        let _ = writeln!(s, "# method={}", self.method);
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}={v}");
        }
        s.push_str("index,eigenvalue,multiplicity,mode_tag\n");
        for (i, e) in self.entries.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{},{}", e.value, e.multiplicity, e.tag);
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)
            .map_err(|e| Error::Input(format!("cannot open {}: {e}", path.display())))?;
        Self::read_csv(std::io::BufReader::new(f))
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut pre: Vec<(String, String)> = Vec::new();
        let mut header_seen = false;
        let mut entries: Vec<SpectrumEntry> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(format!("read failed: {e}")))?;
            let ln = lineno + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if header_seen {
                    return Err(Error::Parse(format!("line {ln}: preamble after header")));
                }
                let (k, v) = rest
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("line {ln}: expected '# key=value'")))?;
                pre.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
            if !header_seen {
                if line.trim() != "index,eigenvalue,multiplicity,mode_tag" {
                    return Err(Error::Parse(format!("line {ln}: unexpected header '{line}'")));
                }
                header_seen = true;
                continue;
            }
            let mut parts = line.splitn(4, ',');
            let mut field = |name: &str| {
                parts
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {ln}: missing {name}")))
            };
            let idx: usize = field("index")?
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {ln}: bad index")))?;
            if idx != entries.len() {
                return Err(Error::Parse(format!("line {ln}: index {idx} out of sequence")));
            }
            let value: f64 = field("eigenvalue")?
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {ln}: bad eigenvalue")))?;
            let multiplicity: u32 = field("multiplicity")?
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {ln}: bad multiplicity")))?;
            let tag = field("mode_tag")?.to_string();
            if multiplicity == 0 || !value.is_finite() || value < 0.0 {
                return Err(Error::Parse(format!("line {ln}: invalid entry")));
            }
            if let Some(prev) = entries.last() {
                if value < prev.value {
                    return Err(Error::Parse(format!("line {ln}: eigenvalues not nondecreasing")));
                }
            }
            entries.push(SpectrumEntry {
                value,
                multiplicity,
                tag,
            });
        }
        if !header_seen {
            return Err(Error::Parse("missing CSV header".into()));
        }
        let mut take = |key: &str| -> Result<String> {
            let pos = pre
                .iter()
                .position(|(k, _)| k == key)
                .ok_or_else(|| Error::Parse(format!("preamble key '{key}' missing")))?;
            Ok(pre.remove(pos).1)
        };
        let domain = Domain::parse(&take("domain")?)?;
        let bc = BoundaryCondition::parse(&take("bc")?)?;
        let num = |s: String, key: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse(format!("preamble '{key}' is not a number")))
        };
        let mu = num(take("mu")?, "mu")?;
        let lambda = num(take("lambda")?, "lambda")?;
        let lambda_max = num(take("lambda_max")?, "lambda_max")?;
        let method = SpectrumMethod::parse(&take("method")?)?;
        let params = LameParams::new(mu, lambda)?;
        if entries.iter().any(|e| e.value > lambda_max) {
            return Err(Error::Parse("eigenvalue above lambda_max".into()));
        }
        if bc == BoundaryCondition::Dirichlet && entries.iter().any(|e| e.value == 0.0) {
            return Err(Error::Parse("Dirichlet spectrum contains zero".into()));
        }
        Ok(Self::from_sorted(domain, bc, params, lambda_max, method, entries, pre))
    }
}

fn merge_entries(sorted: Vec<SpectrumEntry>) -> Vec<SpectrumEntry> {
    let mut out: Vec<SpectrumEntry> = Vec::with_capacity(sorted.len());
    // gap is measured from the first value of the current cluster
    let mut anchor = f64::NAN;
    for e in sorted {
        if let Some(last) = out.last_mut() {
            let gap = e.value - anchor;
            if gap <= MERGE_REL_TOL * e.value.abs().max(anchor.abs()) {
                last.multiplicity += e.multiplicity;
                if last.tag != e.tag && !last.tag.split('|').any(|t| t == e.tag) {
                    last.tag = format!("{}|{}", last.tag, e.tag);
                }
                continue;
            }
        }
        anchor = e.value;
        out.push(e);
    }
    out
}
