use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cavity::{self, pi::InterferenceParams, ps::ScatteringParams, vx::VirtualExchangeParams};
use crate::consts::TWO_PI;
use crate::dipolar::DipolarParams;
use crate::error::{Error, Result};

/// Material constants as entered in config files: rates and frequencies in
/// Hz, times in s. [`Constants::angular`] converts a rate to rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma4: f64,
    pub gamma5: f64,
    pub g_par: f64,
    pub g_perp: f64,
    pub g: f64,
    pub kappa: f64,
    pub t2o_bulk: f64,
    pub t2o_cavity: f64,
    pub t2s: f64,
    pub t1o: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            gamma1: 596.0,
            gamma2: 2.95,
            gamma4: 3.6,
            gamma5: 4.5e3,
            g_par: 2.51,
            g_perp: 1.7,
            g: 23e6,
            kappa: 30.7e9,
            t2o_bulk: 91e-6,
            t2o_cavity: 39e-6,
            t2s: 31e-3,
            t1o: 267e-6,
        }
    }
}

impl Constants {
    pub fn angular(hz: f64) -> f64 {
        TWO_PI * hz
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma4", self.gamma4),
            ("gamma5", self.gamma5),
            ("g_par", self.g_par),
            ("g_perp", self.g_perp),
            ("g", self.g),
            ("kappa", self.kappa),
            ("t2o_bulk", self.t2o_bulk),
            ("t2o_cavity", self.t2o_cavity),
            ("t2s", self.t2s),
            ("t1o", self.t1o),
        ];
        for (name, v) in all {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("constant {name} = {v}")));
            }
        }
        for (name, v) in [("gamma1", self.gamma1), ("t2o_bulk", self.t2o_bulk), ("t2o_cavity", self.t2o_cavity)] {
            if v == 0.0 {
                return Err(Error::Config(format!("constant {name} must be positive")));
            }
        }
        Ok(())
    }

    /// `γ* = 1/T₂o - γ₁/2` in rad/s.
    pub fn gamma_star(&self, t2o: f64) -> f64 {
        (1.0 / t2o - Self::angular(self.gamma1) / 2.0).max(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Md,
    PsAnalytic,
    PsNumeric,
    Pi,
    Vx,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Md => "md",
            Scheme::PsAnalytic => "ps-analytic",
            Scheme::PsNumeric => "ps-numeric",
            Scheme::Pi => "pi",
            Scheme::Vx => "vx",
        }
    }

    /// Parameter names accepted in `axes` and `fixed`.
    pub fn parameters(self) -> &'static [Param] {
        match self {
            Scheme::Md => MD_PARAMS,
            Scheme::PsAnalytic | Scheme::PsNumeric => PS_PARAMS,
            Scheme::Pi => PI_PARAMS,
            Scheme::Vx => VX_PARAMS,
        }
    }

    pub fn parameter(self, name: &str) -> Option<&'static Param> {
        self.parameters().iter().find(|p| p.name == name)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Scheme::Md, Scheme::PsAnalytic, Scheme::PsNumeric, Scheme::Pi, Scheme::Vx]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unit {
    /// Multiplied by 2π on load.
    Hertz,
    Seconds,
    Meters,
    Dimensionless,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: &'static str,
    pub unit: Unit,
    /// Must be strictly positive.
    pub positive: bool,
}

const fn hz(name: &'static str, positive: bool) -> Param {
    Param { name, unit: Unit::Hertz, positive }
}

const fn sec(name: &'static str) -> Param {
    Param { name, unit: Unit::Seconds, positive: true }
}

const fn num(name: &'static str, positive: bool) -> Param {
    Param { name, unit: Unit::Dimensionless, positive }
}

const MD_PARAMS: &[Param] = &[
    Param { name: "r", unit: Unit::Meters, positive: true },
    hz("omega", true),
    hz("delta_s", true),
    hz("gamma1", false),
    hz("gamma2", false),
    hz("gamma3", false),
    hz("gamma4", false),
    hz("gamma5", false),
    num("g_par", false),
    num("g_perp", false),
];

const PS_PARAMS: &[Param] = &[
    hz("g", true),
    hz("kappa", true),
    hz("gamma1", true),
    hz("gamma1_down", false),
    sec("t2o"),
    hz("gamma_star", false),
    hz("gamma2", false),
    hz("gamma4", false),
    sec("t2s"),
    sec("t1p"),
    hz("delta_p", false),
    hz("delta_yb1", false),
    hz("delta_yb2", false),
    num("w", false),
    num("cooperativity", true),
    num("alpha", true),
];

const PI_PARAMS: &[Param] = &[
    hz("gamma1", true),
    hz("gamma1r", false),
    sec("t2o"),
    hz("gamma_star", false),
    hz("delta_omega", false),
    hz("g", false),
    hz("kappa", true),
    num("cooperativity", true),
    num("alpha", true),
];

const VX_PARAMS: &[Param] = &[
    hz("g", true),
    num("kappa_over_g", false),
    num("delta_over_g", true),
    hz("kappa", false),
    hz("delta", true),
    hz("delta_eg", false),
    hz("gamma1", false),
    hz("gamma_star", false),
    hz("gamma5", false),
    num("fock_levels", true),
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    #[default]
    Lin,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub grid: Grid,
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::Config(format!("axis {}: need at least 2 points", self.name)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Config(format!("axis {}: non-finite range", self.name)));
        }
        let n = self.points - 1;
        Ok(match self.grid {
            Grid::Lin => (0..=n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / n as f64)
                .collect(),
            Grid::Log => {
                if !(self.start > 0.0 && self.stop > 0.0) {
                    return Err(Error::Config(format!("axis {}: log grid needs positive bounds", self.name)));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                (0..=n).map(|i| (a + (b - a) * i as f64 / n as f64).exp()).collect()
            }
        })
    }
}

/// One experiment: a scheme, one or two swept parameters and fixed overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub scheme: Scheme,
    /// File stem of the CSV written to the output directory.
    pub output: String,
    /// Also evaluate the exact master-equation oracle (md, vx).
    #[serde(default)]
    pub oracle: bool,
    /// Optimize the free timing parameter (ps bandwidth, vx detuning).
    #[serde(default)]
    pub optimize: bool,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default)]
    pub constants: Constants,
}

impl SweepSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let spec: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config(format!("need 1 or 2 axes, got {}", self.axes.len())));
        }
        if self.output.is_empty() || self.output.contains(['/', '\\']) {
            return Err(Error::Config(format!("output stem '{}' must be a plain file name", self.output)));
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::Config(format!("axis {} given twice", self.axes[0].name)));
        }
        for axis in &self.axes {
            let p = self.lookup(&axis.name)?;
            if self.fixed.contains_key(&axis.name) {
                return Err(Error::Config(format!("{} is both swept and fixed", axis.name)));
            }
            for v in axis.values()? {
                check_value(p, v)?;
            }
        }
        for (k, v) in &self.fixed {
            check_value(self.lookup(k)?, *v)?;
        }
        Ok(())
    }

    fn lookup(&self, name: &str) -> Result<&'static Param> {
        self.scheme
            .parameter(name)
            .ok_or_else(|| Error::Config(format!("scheme {} has no parameter '{name}'", self.scheme)))
    }

    /// Grid points in row order (first axis outermost), each with the
    /// fixed overrides followed by the axis values.
    pub fn points(&self) -> Result<Vec<Vec<(String, f64)>>> {
        let grids: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect::<Result<_>>()?;
        let mut out = Vec::new();
        let inner = grids.get(1).map_or(1, Vec::len);
        for i in 0..grids[0].len() {
            for j in 0..inner {
                let mut pt: Vec<(String, f64)> = self.fixed.iter().map(|(k, v)| (k.clone(), *v)).collect();
                pt.push((self.axes[0].name.clone(), grids[0][i]));
                if let Some(g) = grids.get(1) {
                    pt.push((self.axes[1].name.clone(), g[j]));
                }
                out.push(pt);
            }
        }
        Ok(out)
    }
}

fn check_value(p: &Param, v: f64) -> Result<()> {
    if !v.is_finite() || (p.positive && !(v > 0.0)) || (!p.positive && v < 0.0) {
        return Err(Error::Config(format!("{} = {v} out of range", p.name)));
    }
    if p.name == "fock_levels" && (v.fract() != 0.0 || v < 2.0) {
        return Err(Error::Config(format!("fock_levels = {v} must be an integer >= 2")));
    }
    Ok(())
}

/// Input-unit value converted to SI / rad/s.
fn si(p: &Param, v: f64) -> f64 {
    match p.unit {
        Unit::Hertz => Constants::angular(v),
        _ => v,
    }
}

fn lookup_si(scheme: Scheme, values: &[(String, f64)], name: &str) -> Option<f64> {
    let p = scheme.parameter(name)?;
    values.iter().rev().find(|(k, _)| k == name).map(|(_, v)| si(p, *v))
}

pub fn dipolar_params(c: &Constants, values: &[(String, f64)]) -> DipolarParams {
    let get = |n: &str| lookup_si(Scheme::Md, values, n);
    let g1 = get("gamma1").unwrap_or(Constants::angular(c.gamma1));
    let g2 = get("gamma2").unwrap_or(Constants::angular(c.gamma2));
    let mut p = DipolarParams {
        g_par: get("g_par").unwrap_or(c.g_par),
        g_perp: get("g_perp").unwrap_or(c.g_perp),
        gamma1_up: g1,
        gamma1_down: g1,
        gamma2: g2,
        gamma3: get("gamma3").unwrap_or(g2),
        gamma4: get("gamma4").unwrap_or(Constants::angular(c.gamma4)),
        gamma5: get("gamma5").unwrap_or(Constants::angular(c.gamma5)),
        ..DipolarParams::default()
    };
    if let Some(r) = get("r") {
        p.r = r;
    }
    if let Some(w) = get("omega") {
        p.omega = w;
        p.delta_s = 10.0 * w;
    }
    if let Some(d) = get("delta_s") {
        p.delta_s = d;
    }
    p
}

pub fn scattering_params(c: &Constants, values: &[(String, f64)]) -> ScatteringParams {
    let get = |n: &str| lookup_si(Scheme::PsAnalytic, values, n);
    let mut p = ScatteringParams {
        g: get("g").unwrap_or(Constants::angular(c.g)),
        kappa: get("kappa").unwrap_or(Constants::angular(c.kappa)),
        gamma1_up: get("gamma1").unwrap_or(Constants::angular(c.gamma1)),
        gamma1_down: get("gamma1_down").unwrap_or(0.0),
        gamma2: get("gamma2").unwrap_or(Constants::angular(c.gamma2)),
        gamma4: get("gamma4").unwrap_or(Constants::angular(c.gamma4)),
        gamma_spin: 1.0 / get("t2s").unwrap_or(c.t2s),
        t1o: c.t1o,
        ..ScatteringParams::default()
    }
    .with_t2o(get("t2o").unwrap_or(c.t2o_cavity));
    if let Some(v) = get("gamma_star") {
        p.gamma_star = v;
    }
    if let Some(v) = get("t1p") {
        p.t1p = v;
    }
    p.delta_p = get("delta_p").unwrap_or(0.0);
    p.delta_yb1 = get("delta_yb1").unwrap_or(0.0);
    p.delta_yb2 = get("delta_yb2").unwrap_or(0.0);
    if let Some(w) = get("w") {
        p.w = w;
    }
    let (cc, alpha) = (get("cooperativity"), get("alpha"));
    if cc.is_some() || alpha.is_some() {
        p = p.at_cooperativity(cc.unwrap_or(p.cooperativity()), alpha.unwrap_or(p.alpha()));
    }
    p
}

pub fn interference_params(c: &Constants, values: &[(String, f64)]) -> InterferenceParams {
    let get = |n: &str| lookup_si(Scheme::Pi, values, n);
    let with_cavity = ["g", "kappa", "cooperativity", "alpha"].iter().any(|n| get(n).is_some());
    let t2o = get("t2o").unwrap_or(if with_cavity { c.t2o_cavity } else { c.t2o_bulk });
    let gamma1 = get("gamma1").unwrap_or(Constants::angular(c.gamma1));
    let mut p = InterferenceParams::bulk_from_t2o(gamma1, t2o);
    if let Some(v) = get("gamma1r") {
        p.gamma1r = v;
    }
    if let Some(v) = get("gamma_star") {
        p.gamma_star = v;
    }
    p.delta_omega = get("delta_omega").unwrap_or(0.0);
    if with_cavity {
        let mut g = get("g").unwrap_or(Constants::angular(c.g));
        let mut kappa = get("kappa").unwrap_or(Constants::angular(c.kappa));
        let (cc, alpha) = (get("cooperativity"), get("alpha"));
        if cc.is_some() || alpha.is_some() {
            let cur_c = cavity::cooperativity(g, kappa, gamma1);
            (g, kappa) = cavity::cavity_for(cc.unwrap_or(cur_c), alpha.unwrap_or(g / kappa), gamma1);
        }
        p = p.with_cavity(g, kappa);
    }
    p
}

/// Virtual-exchange parameters. Without overrides the ratios of the
/// reference set are used with `g` from the constants and `Δ = 200 g`.
pub fn exchange_params(c: &Constants, values: &[(String, f64)], optimize: bool) -> VirtualExchangeParams {
    let get = |n: &str| lookup_si(Scheme::Vx, values, n);
    let g = get("g").unwrap_or(Constants::angular(c.g));
    let mut p = VirtualExchangeParams::reference(g, get("delta_over_g").unwrap_or(200.0));
    if let Some(k) = get("kappa_over_g") {
        p.kappa = k * g;
    }
    if let Some(v) = get("kappa") {
        p.kappa = v;
    }
    if let Some(v) = get("delta") {
        p.delta = v;
    }
    for (name, slot) in [
        ("delta_eg", &mut p.delta_eg),
        ("gamma1", &mut p.gamma1),
        ("gamma_star", &mut p.gamma_star),
        ("gamma5", &mut p.gamma5),
    ] {
        if let Some(v) = get(name) {
            *slot = v;
        }
    }
    if let Some(n) = get("fock_levels") {
        p.fock_levels = n as usize;
    }
    if optimize && p.gamma1 > 0.0 {
        p.delta = p.optimal_delta();
    }
    p
}
