use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::run;
use crate::algorithms::{make_policy, LspEps};
use crate::error::{ConesError, Result};
use crate::instances::build_family;

/// A policy name plus the LSP tolerance rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicySpec<'a> {
    pub name: &'a str,
    pub lsp_eps: LspEps,
}

impl<'a> PolicySpec<'a> {
    pub fn new(name: &'a str) -> Self {
        Self {
            name,
            lsp_eps: LspEps::default(),
        }
    }

    pub fn lsp(eps: LspEps) -> Self {
        Self { name: "lsp", lsp_eps: eps }
    }

    /// File-name label; LSP variants carry their tolerance rule.
    pub fn label(&self) -> String {
        if self.name != "lsp" {
            return self.name.to_string();
        }
        match self.lsp_eps {
            LspEps::HorizonPower(b) => format!("lsp_beta{b}"),
            LspEps::Fixed(e) => format!("lsp_eps{e}"),
        }
    }
}

impl fmt::Display for PolicySpec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub regret_final: f64,
    pub move_final: f64,
    pub jumps: usize,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub policy: String,
    pub family: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| match name {
                "T" => Ok(r.horizon as f64),
                "regret_final" => Ok(r.regret_final),
                "move_final" => Ok(r.move_final),
                "jumps" => Ok(r.jumps as f64),
                "runtime_ms" => Ok(r.runtime_ms),
                other => Err(ConesError::ParameterError(format!("no sweep column `{other}`"))),
            })
            .collect()
    }
}

/// One fresh instance and policy per horizon, run in parallel.
pub fn sweep_t(
    spec: PolicySpec<'_>,
    family: &str,
    horizons: &[usize],
    params: &BTreeMap<String, f64>,
    seed: u64,
) -> Result<SweepTable> {
    let rows = horizons
        .par_iter()
        .map(|&horizon| {
            let inst = build_family(family, horizon, params, seed)?;
            let mut policy = make_policy(spec.name, spec.lsp_eps, horizon)?;
            let trace = run(policy.as_mut(), &inst)?;
            Ok(SweepRow {
                horizon,
                regret_final: trace.regret_final(),
                move_final: trace.move_final(),
                jumps: trace.jump_times.len(),
                runtime_ms: trace.runtime_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        policy: spec.label(),
        family: family.to_string(),
        rows,
    })
}

/// Least-squares slope of `log(column)` against `log(T)`.
pub fn fit_loglog_slope(table: &SweepTable, column: &str) -> Result<f64> {
    let ts = table.column("T")?;
    let ys = table.column(column)?;
    loglog_slope(&ts, &ys)
}

pub(crate) fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() < 4 {
        return Err(ConesError::DegenerateFit(format!("{} rows, need at least 4", xs.len())));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(ConesError::DegenerateFit(format!("nonpositive value {v}")));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return Err(ConesError::DegenerateFit("all T values are equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
