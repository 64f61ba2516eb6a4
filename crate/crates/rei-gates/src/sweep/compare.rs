use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cavity::{self, pi, ps, vx};
use crate::dipolar;
use crate::error::{Error, Result};

use super::run::{fmt_num, write_atomic, RunOptions, PS_T1P_RANGE};
use super::spec::{interference_params, scattering_params, Axis, Constants, Grid, Scheme, SweepSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComparisonConfig {
    /// Dipolar separations (nm).
    pub separations_nm: Vec<f64>,
    pub cooperativities: Vec<f64>,
    /// Cavity ratio `g/κ` for the cavity schemes.
    pub alpha: f64,
    /// Use the cascaded master equation for PS table rows.
    pub ps_numeric: bool,
    /// Cooperativity range of the 1-D slices.
    pub slice: SliceRange,
    pub constants: Constants,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            separations_nm: vec![5.0, 10.0],
            cooperativities: vec![100.0, 1000.0],
            alpha: 1e-3,
            ps_numeric: false,
            slice: SliceRange { start: 10.0, stop: 1e4, points: 31 },
            constants: Constants::default(),
        }
    }
}

impl ComparisonConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if self.separations_nm.iter().chain(&self.cooperativities).any(|v| !(*v > 0.0)) {
            return Err(Error::Config("separations and cooperativities must be positive".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::Config(format!("alpha = {}", self.alpha)));
        }
        for spec in self.slice_specs() {
            spec.validate()?;
        }
        Ok(())
    }

    /// Sweep specs of the cooperativity slices (ps, pi) at fixed `alpha`.
    pub fn slice_specs(&self) -> Vec<SweepSpec> {
        [(Scheme::PsAnalytic, "slice_ps"), (Scheme::Pi, "slice_pi")]
            .into_iter()
            .map(|(scheme, output)| SweepSpec {
                scheme,
                output: output.into(),
                oracle: false,
                optimize: scheme == Scheme::PsAnalytic,
                axes: vec![Axis {
                    name: "cooperativity".into(),
                    start: self.slice.start,
                    stop: self.slice.stop,
                    points: self.slice.points,
                    grid: Grid::Log,
                }],
                fixed: BTreeMap::from([("alpha".to_string(), self.alpha)]),
                constants: self.constants.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub scheme: String,
    pub parameter: String,
    pub value: f64,
    pub fidelity: f64,
    pub gate_time: f64,
    pub success_probability: Option<f64>,
    pub warnings: Vec<String>,
}

impl ComparisonRow {
    pub fn gate_error(&self) -> f64 {
        1.0 - self.fidelity
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn find(&self, scheme: &str, value: f64) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.scheme == scheme && (r.value - value).abs() <= 1e-9 * value.abs())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scheme", "parameter", "value", "fidelity", "gate_time", "success_probability", "warnings"])?;
        for r in &self.rows {
            w.write_record([
                r.scheme.clone(),
                r.parameter.clone(),
                fmt_num(r.value),
                fmt_num(r.fidelity),
                fmt_num(r.gate_time),
                r.success_probability.map(fmt_num).unwrap_or_default(),
                r.warnings.join("; "),
            ])?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(body).expect("csv output is utf-8"))
    }

    /// Fixed-width text table; `*` marks rows that carry warnings.
    pub fn to_text(&self) -> String {
        let mut s = format!("{:<12} {:>16} {:>10} {:>12} {:>10}\n", "scheme", "point", "fidelity", "gate_time_s", "error_%");
        for r in &self.rows {
            s.push_str(&format!(
                "{:<12} {:>16} {:>10.4} {:>12.3e} {:>10.2}{}\n",
                r.scheme,
                format!("{}={}", r.parameter, r.value),
                r.fidelity,
                r.gate_time,
                100.0 * r.gate_error(),
                if r.warnings.is_empty() { "" } else { "  *" }
            ));
        }
        s
    }
}

/// Fidelities and gate times of every scheme at the configured points.
pub fn run_comparison(cfg: &ComparisonConfig) -> Result<Comparison> {
    cfg.validate()?;
    let c = &cfg.constants;
    let mut rows = Vec::new();
    for &r_nm in &cfg.separations_nm {
        let p = super::spec::dipolar_params(c, &[("r".into(), r_nm * 1e-9)]);
        let rep = dipolar::md_closed_form_fidelity(&p)?;
        rows.push(row("md", "r_nm", r_nm, &rep));
    }
    let g1 = Constants::angular(c.gamma1);
    for &cc in &cfg.cooperativities {
        let at = [("cooperativity".to_string(), cc), ("alpha".to_string(), cfg.alpha)];
        let p = scattering_params(c, &at);
        let rep = if cfg.ps_numeric {
            ps::ps_numeric_optimized(&p, &ps::NumericOptions::default(), PS_T1P_RANGE.0, PS_T1P_RANGE.1)?
        } else {
            ps::ps_optimize_bandwidth(&p, 1e-6 * p.gamma1())?.1
        };
        rows.push(row("ps", "C", cc, &rep));
        let rep = pi::pi_fidelity(&interference_params(c, &at))?;
        rows.push(row("pi", "C", cc, &rep));
        let (g, kappa) = cavity::cavity_for(cc, cfg.alpha, g1);
        let mut v = vx::VirtualExchangeParams {
            g,
            kappa,
            delta: 0.0,
            delta_eg: 0.0,
            gamma1: g1,
            gamma_star: c.gamma_star(c.t2o_cavity),
            gamma5: 1.0 / c.t2s,
            fock_levels: 2,
        };
        v.delta = v.optimal_delta();
        v.delta_eg = 100.0 * v.delta;
        rows.push(row("vx", "C", cc, &vx::vx_perturbative_fidelity(&v)?));
    }
    Ok(Comparison { rows })
}

fn row(scheme: &str, parameter: &str, value: f64, rep: &crate::report::FidelityReport) -> ComparisonRow {
    ComparisonRow {
        scheme: scheme.into(),
        parameter: parameter.into(),
        value,
        fidelity: rep.fidelity,
        gate_time: rep.gate_time,
        success_probability: rep.success_probability,
        warnings: rep.warnings.clone(),
    }
}

/// Writes `comparison.csv` and the slice datasets into `out_dir`.
pub fn write_comparison(cfg: &ComparisonConfig, cmp: &Comparison, out_dir: &Path, opts: RunOptions) -> Result<Vec<PathBuf>> {
    let table = out_dir.join("comparison.csv");
    let mut text = format!("# rei-gates {}\n", env!("CARGO_PKG_VERSION"));
    for line in toml::to_string(cfg).expect("config is serializable").lines() {
        text.push_str(format!("# config: {line}").trim_end());
        text.push('\n');
    }
    text.push_str(&cmp.to_csv()?);
    write_atomic(&table, &text)?;
    let mut paths = vec![table];
    for spec in cfg.slice_specs() {
        paths.push(super::run_sweep(&spec, out_dir, opts)?.path);
    }
    Ok(paths)
}

