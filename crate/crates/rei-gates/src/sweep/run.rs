use std::fs;
use std::path::{Path, PathBuf};

use crate::cavity::{pi, ps, vx};
use crate::dipolar::{self, ExactOptions};
use crate::error::{Error, Result};
use crate::exec;
use crate::report::FidelityReport;

use super::spec::{
    dipolar_params, exchange_params, interference_params, scattering_params, Constants, Scheme, SweepSpec,
};

/// Photon-lifetime window searched by the numeric PS optimizer (s).
pub const PS_T1P_RANGE: (f64, f64) = (2e-6, 2e-3);

/// Evaluated grid point. `report` is `None` when the point failed.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axes: Vec<f64>,
    pub report: Option<FidelityReport>,
    pub exact_fidelity: Option<f64>,
    pub error: Option<String>,
}

/// Fidelity of one parameter point; `values` use config units.
pub fn evaluate_point(
    scheme: Scheme,
    constants: &Constants,
    values: &[(String, f64)],
    optimize: bool,
    oracle: bool,
) -> Result<(FidelityReport, Option<f64>)> {
    match scheme {
        Scheme::Md => {
            let p = dipolar_params(constants, values);
            let rep = dipolar::md_closed_form_fidelity(&p)?;
            let exact = if oracle {
                Some(dipolar::md_exact_fidelity(&p, &ExactOptions::default())?.fidelity)
            } else {
                None
            };
            Ok((rep, exact))
        }
        Scheme::PsAnalytic => {
            let p = scattering_params(constants, values);
            let rep = if optimize {
                let (_, mut rep) = ps::ps_optimize_bandwidth(&p, 1e-6 * p.gamma1())?;
                rep.term("t1p", rep.gate_time / ps::TRUNCATION_LIFETIMES);
                rep
            } else {
                ps::ps_analytic_fidelity(&p)?
            };
            Ok((rep, None))
        }
        Scheme::PsNumeric => {
            let p = scattering_params(constants, values);
            let opts = ps::NumericOptions::default();
            let rep = if optimize {
                ps::ps_numeric_optimized(&p, &opts, PS_T1P_RANGE.0, PS_T1P_RANGE.1)?
            } else {
                ps::ps_numeric_fidelity(&p, &opts)?
            };
            Ok((rep, None))
        }
        Scheme::Pi => Ok((pi::pi_fidelity(&interference_params(constants, values))?, None)),
        Scheme::Vx => {
            let p = exchange_params(constants, values, optimize);
            let rep = vx::vx_perturbative_fidelity(&p)?;
            let exact = if oracle { Some(vx::vx_exact_fidelity(&p)?.fidelity) } else { None };
            Ok((rep, exact))
        }
    }
}

/// Evaluates every grid point. Failures are kept per row.
pub fn sweep_rows(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points = spec.points()?;
    let n_axes = spec.axes.len();
    Ok(exec::par_map(&points, |pt| {
        let axes = pt[pt.len() - n_axes..].iter().map(|(_, v)| *v).collect();
        match evaluate_point(spec.scheme, &spec.constants, pt, spec.optimize, spec.oracle) {
            Ok((rep, exact)) if (0.0..=1.0).contains(&rep.fidelity) => {
                SweepRow { axes, report: Some(rep), exact_fidelity: exact, error: None }
            }
            Ok((rep, _)) => SweepRow {
                axes,
                report: None,
                exact_fidelity: None,
                error: Some(format!("fidelity {} outside [0, 1]", rep.fidelity)),
            },
            Err(e) => SweepRow { axes, report: None, exact_fidelity: None, error: Some(e.to_string()) },
        }
    }))
}

pub(crate) fn fmt_num(v: f64) -> String {
    format!("{v:.17e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// Comment block written above the header. Identical metadata means an
/// identical spec and code version.
pub fn metadata(spec: &SweepSpec) -> String {
    let axes: Vec<String> = spec
        .axes
        .iter()
        .map(|a| format!("{}:{}", a.name, if a.grid == super::Grid::Log { "log" } else { "lin" }))
        .collect();
    let mut s = format!("# rei-gates {}\n# scheme = {}\n# axes = {}\n", env!("CARGO_PKG_VERSION"), spec.scheme, axes.join(","));
    for line in spec.to_toml().lines() {
        s.push_str(format!("# spec: {line}").trim_end());
        s.push('\n');
    }
    s
}

/// Full CSV text: metadata, header, one row per grid point.
pub fn render_csv(spec: &SweepSpec, rows: &[SweepRow]) -> Result<String> {
    let mut terms: Vec<String> = Vec::new();
    for rep in rows.iter().filter_map(|r| r.report.as_ref()) {
        for (name, _) in &rep.terms {
            if !terms.contains(name) {
                terms.push(name.clone());
            }
        }
    }
    let mut header: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    header.extend(
        [
            "fidelity",
            "gate_time",
            "eps_l1",
            "eps_h1",
            "eps_hh2",
            "eps_lh2",
            "cooperativity",
            "alpha",
            "success_probability",
        ]
        .map(String::from),
    );
    header.extend(terms.iter().map(|t| format!("term_{t}")));
    if spec.oracle {
        header.push("exact_fidelity".into());
    }
    header.push("warnings".into());
    header.push("error".into());

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in rows {
        let mut rec: Vec<String> = row.axes.iter().map(|v| fmt_num(*v)).collect();
        match &row.report {
            Some(r) => {
                let b = &r.breakdown;
                rec.extend([r.fidelity, r.gate_time, b.eps_l1, b.eps_h1, b.eps_hh2, b.eps_lh2].map(fmt_num));
                rec.extend([r.cooperativity, r.alpha, r.success_probability].map(fmt_opt));
                for t in &terms {
                    rec.push(fmt_opt(r.terms.iter().find(|(n, _)| n == t).map(|(_, v)| *v)));
                }
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 9 + terms.len())),
        }
        if spec.oracle {
            rec.push(fmt_opt(row.exact_fidelity));
        }
        rec.push(row.report.as_ref().map(|r| r.warnings.join("; ")).unwrap_or_default());
        rec.push(row.error.clone().unwrap_or_default());
        w.write_record(&rec)?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut out = metadata(spec);
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Recompute even if an up-to-date output exists.
    pub force: bool,
    /// Worker threads; 0 uses the library default.
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub path: PathBuf,
    pub rows: usize,
    pub failed: usize,
    /// True when an existing output was kept.
    pub skipped: bool,
}

/// Data lines of a CSV file (everything after the header, comments excluded).
fn data_rows(text: &str) -> usize {
    text.lines().filter(|l| !l.starts_with('#')).count().saturating_sub(1)
}

/// Runs the sweep and writes `<out_dir>/<output>.csv`. An existing file with
/// the same metadata and row count is left untouched unless `force` is set.
pub fn run_sweep(spec: &SweepSpec, out_dir: &Path, opts: RunOptions) -> Result<SweepOutcome> {
    spec.validate()?;
    let path = out_dir.join(format!("{}.csv", spec.output));
    let expected = spec.points()?.len();
    if !opts.force {
        if let Ok(existing) = fs::read_to_string(&path) {
            if existing.starts_with(&metadata(spec)) && data_rows(&existing) == expected {
                return Ok(SweepOutcome { path, rows: expected, failed: 0, skipped: true });
            }
        }
    }
    let rows = exec::with_workers(opts.workers, || sweep_rows(spec))?;
    let text = render_csv(spec, &rows)?;
    write_atomic(&path, &text)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(SweepOutcome { path, rows: rows.len(), failed, skipped: false })
}

pub(crate) fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("csv.partial");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
