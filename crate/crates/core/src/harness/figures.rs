//! CSV bundles behind the three simulation figures.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::{emit_csv, run, sweep_t, PolicySpec, Trace};
use crate::algorithms::{make_policy, LspEps};
use crate::error::{ConesError, Result};
use crate::geometry::Polygon;
use crate::instances::{gen_frozen, gen_sc_lower_bound, Instance};

pub const FIG_NAMES: [&str; 3] = ["fig3", "fig4", "fig5"];

pub const R0: f64 = 1.0;
pub const D: f64 = 4.0;
pub const FIG3_T: usize = 7;
pub const FIG4_T_MAX: usize = 200;
pub const FIG5_T_FREEZE: usize = 7;
pub const FIG5_T: usize = 200;

fn trace_of(spec: PolicySpec<'_>, inst: &Instance) -> Result<Trace> {
    let mut policy = make_policy(spec.name, spec.lsp_eps, inst.horizon)?;
    run(policy.as_mut(), inst)
}

/// Set outlines, construction minimizers and `x0`, one vertex per row.
pub fn emit_geometry_csv(inst: &Instance, path: &Path) -> Result<()> {
    let seq = inst
        .sequence()
        .ok_or_else(|| ConesError::ParameterError("geometry export needs an oblivious sequence".into()))?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "role", "idx", "x0", "x1"])?;
    let mut put = |t: usize, role: &str, idx: usize, v: [f64; 2]| {
        w.write_record([
            t.to_string(),
            role.to_string(),
            idx.to_string(),
            format!("{:.16e}", v[0]),
            format!("{:.16e}", v[1]),
        ])
    };
    for (i, v) in Polygon::of(&inst.domain)?.vertices.into_iter().enumerate() {
        put(0, "set", i, v)?;
    }
    for (t, s) in seq.sets().iter().enumerate() {
        for (i, v) in Polygon::of(s)?.vertices.into_iter().enumerate() {
            put(t + 1, "set", i, v)?;
        }
    }
    for (t, m) in inst.minimizers.iter().enumerate() {
        put(t, "minimizer", 0, [m[0], m[1]])?;
    }
    put(0, "x0", 0, [inst.x0[0], inst.x0[1]])?;
    w.flush()?;
    Ok(())
}

fn emit_instance_json(inst: &Instance, path: &Path) -> Result<()> {
    serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), inst)?;
    Ok(())
}

/// Trajectories on the `T = 7` strongly convex lower-bound instance.
pub fn fig3(out: &Path) -> Result<Vec<PathBuf>> {
    let inst = gen_sc_lower_bound(FIG3_T, R0, D)?;
    let stem = format!("fig3_{}_{}", inst.family, FIG3_T);
    let mut files = vec![out.join(format!("{stem}_instance.json")), out.join(format!("{stem}_geometry.csv"))];
    emit_instance_json(&inst, &files[0])?;
    emit_geometry_csv(&inst, &files[1])?;
    for spec in [PolicySpec::new("greedy"), PolicySpec::new("frugal"), PolicySpec::new("lsp")] {
        let path = out.join(format!("{stem}_{}.csv", spec.name));
        emit_csv(&trace_of(spec, &inst)?, &path)?;
        files.push(path);
    }
    Ok(files)
}

/// Final regret and movement against `T = 1..200`, one fresh instance per `T`.
pub fn fig4(out: &Path) -> Result<Vec<PathBuf>> {
    let horizons: Vec<usize> = (1..=FIG4_T_MAX).collect();
    let params: BTreeMap<String, f64> = [("r0".to_string(), R0), ("D".to_string(), D)].into();
    let specs = [
        PolicySpec::new("greedy"),
        PolicySpec::new("frugal"),
        PolicySpec::lsp(LspEps::HorizonPower(0.5)),
        PolicySpec::lsp(LspEps::HorizonPower(1.0)),
    ];
    let mut files = Vec::new();
    for spec in specs {
        let table = sweep_t(spec, "sc_lb", &horizons, &params, 0)?;
        let path = out.join(format!("fig4_sc_lb_{FIG4_T_MAX}_{}.csv", spec.label()));
        emit_csv(&table, &path)?;
        files.push(path);
    }
    Ok(files)
}

/// Cumulative series on the frozen instance.
pub fn fig5(out: &Path) -> Result<Vec<PathBuf>> {
    let inst = gen_frozen(FIG5_T_FREEZE, FIG5_T, R0, D)?;
    let mut files = Vec::new();
    for spec in [
        PolicySpec::new("greedy"),
        PolicySpec::new("frugal"),
        PolicySpec::new("lsp"),
        PolicySpec::new("gap_frugal"),
    ] {
        let path = out.join(format!("fig5_{}_{FIG5_T}_{}.csv", inst.family, spec.name));
        emit_csv(&trace_of(spec, &inst)?, &path)?;
        files.push(path);
    }
    Ok(files)
}

/// Writes the bundle for `name` into `out` and returns the files written.
pub fn reproduce(name: &str, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    match name {
        "fig3" => fig3(out),
        "fig4" => fig4(out),
        "fig5" => fig5(out),
        other => Err(ConesError::ParameterError(format!(
            "unknown figure `{other}`; expected one of: {}",
            FIG_NAMES.join(", ")
        ))),
    }
}
