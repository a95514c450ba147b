//! Parameter sweeps over ensemble size: configuration, evaluation, CSV and
//! SVG output, and exponent fits over emitted columns.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer};

use crate::dephasing::{DephasingModel, NoiseKind};
use crate::dicke::{Vec3, C64};
use crate::error::{Error, Result};
use crate::exec;
use crate::fit::{fit_exponent, log_grid_n, FitResult};
use crate::metrology::{
    cat_uncertainty_at, minimize_log_bracket, optimize_chi, schedule_exposure, squeezing_frame,
    uncertainty_moment_propagation, SensingConfig,
};
use crate::states::{StateKind, StateSpec};

pub const CSV_HEADER: [&str; 14] = [
    "state",
    "noise",
    "N",
    "t",
    "gamma",
    "omega",
    "chi",
    "z_re",
    "z_im",
    "delta_omega",
    "xi2",
    "var_r",
    "mean_m",
    "status",
];

pub const STATUS_OK: &str = "ok";

/// Exposure search range in units of `1/gamma` when `optimize_t` is set.
const T_SEARCH: (f64, f64) = (1e-4, 1e2);

fn from_str_de<'de, D, T>(d: D) -> std::result::Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: std::str::FromStr<Err = Error>,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum ChiKeyword {
    #[serde(rename = "opt")]
    Opt,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ChiSetting {
    Fixed(f64),
    Keyword(ChiKeyword),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateTemplate {
    pub kind: StateKind,
    /// `[re, im]`
    #[serde(default = "default_z")]
    pub z: [f64; 2],
    /// Number or `"opt"`; twisted states default to `"opt"`.
    #[serde(default)]
    pub chi: Option<ChiSetting>,
}

fn default_z() -> [f64; 2] {
    [1.0, 0.0]
}

impl StateTemplate {
    pub fn z(&self) -> C64 {
        C64::new(self.z[0], self.z[1])
    }

    pub fn chi_setting(&self) -> ChiSetting {
        self.chi.unwrap_or(ChiSetting::Keyword(ChiKeyword::Opt))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(deserialize_with = "from_str_de")]
    pub kind: NoiseKind,
    #[serde(default)]
    pub gamma: f64,
}

impl NoiseSpec {
    pub fn model(&self) -> DephasingModel {
        DephasingModel {
            kind: self.kind,
            gamma: self.gamma,
            axis: Vec3::z(),
        }
    }
}

fn default_per_decade() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NGrid {
    List(Vec<usize>),
    Log(LogGrid),
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub min: usize,
    pub max: usize,
    #[serde(default = "default_per_decade")]
    pub per_decade: usize,
}

impl NGrid {
    pub fn values(&self) -> Vec<usize> {
        match self {
            NGrid::List(v) => v.clone(),
            NGrid::Log(g) if g.min == 0 || g.max < g.min || g.per_decade == 0 => Vec::new(),
            NGrid::Log(g) => log_grid_n(g.min, g.max, g.per_decade),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    /// `t = alpha N^(-s1)`
    Power(PowerSchedule),
    /// Per-N minimization of the uncertainty over `t`.
    Optimize(OptimizeSchedule),
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSchedule {
    pub s1: f64,
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSchedule {
    pub optimize_t: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub state: StateTemplate,
    pub noise: NoiseSpec,
    pub n_grid: NGrid,
    pub schedule: Schedule,
    #[serde(rename = "T", alias = "total_time")]
    pub total_time: f64,
    #[serde(default)]
    pub omega_eval: f64,
    #[serde(default)]
    pub outputs: Outputs,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("sweep config: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.n_grid.values();
        if grid.len() < 3 {
            return Err(Error::Config(format!(
                "n_grid needs at least 3 values, got {}",
                grid.len()
            )));
        }
        if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_grid must be positive and strictly increasing".into()));
        }
        let model = self.noise.model();
        model.validate().map_err(to_config)?;
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(Error::Config(format!("T must be > 0, got {}", self.total_time)));
        }
        if !self.omega_eval.is_finite() {
            return Err(Error::Config("omega_eval must be finite".into()));
        }
        match self.schedule {
            Schedule::Power(p) => {
                if !(p.s1.is_finite() && p.alpha.is_finite() && p.alpha > 0.0) {
                    return Err(Error::Config("schedule needs finite s1 and alpha > 0".into()));
                }
            }
            Schedule::Optimize(o) => {
                if !o.optimize_t {
                    return Err(Error::Config(
                        "schedule {\"optimize_t\": false} names no schedule".into(),
                    ));
                }
                if model.is_trivial() {
                    return Err(Error::Config(
                        "optimize_t needs a dephasing model with gamma > 0".into(),
                    ));
                }
                if self.state.kind == StateKind::Ghz {
                    return Err(Error::Config("optimize_t is not available for ghz".into()));
                }
            }
        }
        let kind = self.state.kind;
        if !kind.uses_chi() && matches!(self.state.chi, Some(ChiSetting::Fixed(_))) {
            return Err(Error::Config(format!("chi is not used by {} states", kind.as_str())));
        }
        if let ChiSetting::Fixed(c) = self.state.chi_setting() {
            if !c.is_finite() {
                return Err(Error::Config("chi must be finite".into()));
            }
        }
        // cheap build to catch z = 0 cats and non-unit OAT seeds
        StateSpec {
            kind,
            z: self.state.z(),
            chi: 0.0,
            n_qubits: 2,
        }
        .build()
        .map_err(to_config)?;
        Ok(())
    }

    /// Decades covered by the N grid.
    pub fn decades(&self) -> f64 {
        let g = self.n_grid.values();
        match (g.first(), g.last()) {
            (Some(&a), Some(&b)) if a > 0 => (b as f64 / a as f64).log10(),
            _ => 0.0,
        }
    }
}

fn to_config(e: Error) -> Error {
    match e {
        Error::Io { .. } | Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// One evaluated grid point. Undefined quantities are NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub state: StateKind,
    pub noise: NoiseKind,
    pub n: usize,
    pub t: f64,
    pub gamma: f64,
    pub omega: f64,
    pub chi: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub delta_omega: f64,
    pub xi2: f64,
    pub var_r: f64,
    pub mean_m: f64,
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }

    pub fn column(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "N" => self.n as f64,
            "t" => self.t,
            "gamma" => self.gamma,
            "omega" => self.omega,
            "chi" => self.chi,
            "z_re" => self.z_re,
            "z_im" => self.z_im,
            "delta_omega" => self.delta_omega,
            "xi2" => self.xi2,
            "var_r" => self.var_r,
            "mean_m" => self.mean_m,
            other => return Err(Error::Config(format!("no numeric column '{other}'"))),
        })
    }

    fn blank(spec: &SweepSpec, n: usize) -> Self {
        let z = if spec.state.kind.uses_z() {
            spec.state.z()
        } else {
            C64::new(f64::NAN, f64::NAN)
        };
        Self {
            state: spec.state.kind,
            noise: spec.noise.kind,
            n,
            t: f64::NAN,
            gamma: spec.noise.gamma,
            omega: spec.omega_eval,
            chi: f64::NAN,
            z_re: z.re,
            z_im: z.im,
            delta_omega: f64::NAN,
            xi2: f64::NAN,
            var_r: f64::NAN,
            mean_m: f64::NAN,
            status: STATUS_OK.into(),
        }
    }
}

fn evaluate_into(spec: &SweepSpec, row: &mut SweepRow) -> Result<()> {
    let kind = spec.state.kind;
    let z = spec.state.z();
    let n = row.n;
    if kind.uses_chi() {
        row.chi = match spec.state.chi_setting() {
            ChiSetting::Fixed(c) => c,
            ChiSetting::Keyword(ChiKeyword::Opt) => optimize_chi(kind, z, n)?.chi,
        };
    }
    let state = StateSpec {
        kind,
        z,
        chi: if kind.uses_chi() { row.chi } else { 0.0 },
        n_qubits: n,
    }
    .build()?;
    let frame = squeezing_frame(&state)?;
    row.xi2 = frame.xi2;
    row.var_r = frame.var_r;
    row.mean_m = frame.mean_m;

    let model = spec.noise.model();
    let total_time = spec.total_time;
    let omega = spec.omega_eval;
    let uncertainty = |t: f64| -> Result<f64> {
        let record = if kind == StateKind::Cat {
            cat_uncertainty_at(z, n, omega, t, total_time, &model)?
        } else {
            let mut cfg = SensingConfig::from_frame(&frame, t, total_time);
            cfg.omega = omega;
            uncertainty_moment_propagation(&state, &model, &cfg)?
        };
        Ok(record.delta_omega)
    };
    match spec.schedule {
        Schedule::Power(p) => {
            row.t = schedule_exposure(n, p.s1, p.alpha);
            row.delta_omega = uncertainty(row.t)?;
        }
        Schedule::Optimize(_) => {
            let g = model.gamma;
            let hi = (T_SEARCH.1 / g).min(total_time);
            let (t, d) = minimize_log_bracket(uncertainty, T_SEARCH.0 / g, hi)?;
            row.t = t;
            row.delta_omega = d;
        }
    }
    Ok(())
}

/// Evaluates one grid point; failures land in the status field.
pub fn evaluate_point(spec: &SweepSpec, n: usize) -> SweepRow {
    let mut row = SweepRow::blank(spec, n);
    if let Err(e) = evaluate_into(spec, &mut row) {
        row.status = format!("error: {e}").replace(['\n', '\r'], " ");
    }
    row
}

/// Runs the sweep with `jobs` workers (`0` for the default). Rows come back
/// sorted by N whatever the scheduling.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.n_grid.values();
    let mut rows = exec::map(&grid, jobs, |&n| evaluate_point(spec, n));
    rows.sort_by_key(|r| r.n);
    Ok(rows)
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_num(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Validation(format!("line {line}: bad number '{s}'")))
}

/// Renders rows as CSV text.
pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Validation("no rows to write".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Numerical(format!("csv encoding: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.state.as_str().to_string(),
            r.noise.as_str().to_string(),
            r.n.to_string(),
            fmt_num(r.t),
            fmt_num(r.gamma),
            fmt_num(r.omega),
            fmt_num(r.chi),
            fmt_num(r.z_re),
            fmt_num(r.z_im),
            fmt_num(r.delta_omega),
            fmt_num(r.xi2),
            fmt_num(r.var_r),
            fmt_num(r.mean_m),
            r.status.clone(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Numerical(format!("csv encoding: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
}

/// Writes rows to `path`. Nothing is created when `rows` is empty.
pub fn emit_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let text = csv_string(rows)?;
    std::fs::write(path.as_ref(), text).map_err(|e| Error::io(path, e))
}

pub fn parse_csv_str(text: &str) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Validation(format!("csv header: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Validation(format!(
            "unexpected csv header '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Validation(format!("line {line}: {e}")))?;
        let f = |j: usize| parse_num(&rec[j], line);
        rows.push(SweepRow {
            state: rec[0].parse()?,
            noise: rec[1].parse()?,
            n: rec[2]
                .parse()
                .map_err(|_| Error::Validation(format!("line {line}: bad N '{}'", &rec[2])))?,
            t: f(3)?,
            gamma: f(4)?,
            omega: f(5)?,
            chi: f(6)?,
            z_re: f(7)?,
            z_im: f(8)?,
            delta_omega: f(9)?,
            xi2: f(10)?,
            var_r: f(11)?,
            mean_m: f(12)?,
            status: rec[13].to_string(),
        });
    }
    Ok(rows)
}

pub fn parse_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv_str(&text)
}

/// Log-log fit of column `y` against column `x` over the rows whose status
/// is ok.
pub fn fit_rows(rows: &[SweepRow], x: &str, y: &str) -> Result<FitResult> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in rows.iter().filter(|r| r.is_ok()) {
        xs.push(r.column(x)?);
        ys.push(r.column(y)?);
    }
    fit_exponent(&xs, &ys)
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 480.0;
const MARGIN: f64 = 64.0;
const SERIES_COLORS: [&str; 6] = ["#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"];

/// Renders `delta_omega` against N on log-log axes as SVG, with guide lines
/// of slope -1/2 (black) and -1 (blue) through the first point.
pub fn plot_svg(rows: &[SweepRow]) -> Result<String> {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        if !(r.is_ok() && r.delta_omega.is_finite() && r.delta_omega > 0.0) {
            continue;
        }
        let label = format!("{} / {}", r.state.as_str(), r.noise.as_str());
        let p = ((r.n as f64).log10(), r.delta_omega.log10());
        match series.iter_mut().find(|(l, _)| *l == label) {
            Some((_, pts)) => pts.push(p),
            None => series.push((label, vec![p])),
        }
    }
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    if all.is_empty() {
        return Err(Error::Validation("no plottable rows".into()));
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (PLOT_W - 2.0 * MARGIN);
    let py = |y: f64| PLOT_H - MARGIN - (y - y0) / (y1 - y0) * (PLOT_H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_W}" height="{PLOT_H}" viewBox="0 0 {PLOT_W} {PLOT_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="area"><rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}"/></clipPath></defs>"#,
        PLOT_W - 2.0 * MARGIN,
        PLOT_H - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        PLOT_W - 2.0 * MARGIN,
        PLOT_H - 2.0 * MARGIN
    );
    for k in (x0 as i32)..=(x1 as i32) {
        let x = px(k as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{MARGIN}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{k}</text>"##,
            PLOT_H - MARGIN,
            PLOT_H - MARGIN + 18.0
        );
    }
    for k in (y0 as i32)..=(y1 as i32) {
        let y = py(k as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{k}</text>"##,
            PLOT_W - MARGIN,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">N</text>"#,
        PLOT_W / 2.0,
        PLOT_H - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">delta omega</text>"#,
        PLOT_H / 2.0,
        PLOT_H / 2.0
    );

    let anchor = all[0];
    for (slope, color, name) in [(-0.5, "black", "N^-1/2"), (-1.0, "blue", "N^-1")] {
        let ya = anchor.1 + slope * (x0 - anchor.0);
        let yb = anchor.1 + slope * (x1 - anchor.0);
        let _ = writeln!(
            s,
            r#"<line class="guide" data-slope="{slope}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="6 4" clip-path="url(#area)"><title>{name}</title></line>"#,
            px(x0),
            py(ya),
            px(x1),
            py(yb)
        );
    }
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let ly = MARGIN + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}" fill="{color}" text-anchor="end">{label}</text>"#,
            PLOT_W - MARGIN - 8.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let svg = plot_svg(rows)?;
    std::fs::write(path.as_ref(), svg).map_err(|e| Error::io(path, e))
}
