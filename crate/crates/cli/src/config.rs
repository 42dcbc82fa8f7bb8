//! Scenario files: parsing, validation and the canonical normal form.
//!
//! A scenario is a TOML document. Every section is optional and falls back to
//! the reference link defaults (300 GHz, 1 km, 10 dBm, 1 GHz, −174 dBm/Hz,
//! 32×32 arrays at half-wavelength spacing, C_n² = 1e-9 m^-2/3). Exactly one
//! `[[sweep]]` axis is required; any number of `[[series]]` families may be
//! added. Validation walks the whole document and reports every problem it
//! finds, each with its key path and source line. Unknown keys are errors.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use serde::Serialize;
use thz_turb_core::coherence::MAX_COPULA_ENTRIES;
use toml::de::{DeTable, DeValue};
use toml::{Table, Value};

use crate::error::{CliError, ConfigIssue};
use crate::sweep::{AxisValues, Parameter, Scale, SeriesSpec, SweepSpec};

/// The quantity a scenario evaluates at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Computation {
    RiscProfile,
    Rytov,
    Nc,
    Losc,
    GgPdf,
    Attenuation,
    LinkBudget,
    Capacity,
    ChannelSample,
}

impl Computation {
    pub const ALL: [Computation; 9] = [
        Computation::RiscProfile,
        Computation::Rytov,
        Computation::Nc,
        Computation::Losc,
        Computation::GgPdf,
        Computation::Attenuation,
        Computation::LinkBudget,
        Computation::Capacity,
        Computation::ChannelSample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Computation::RiscProfile => "risc-profile",
            Computation::Rytov => "rytov",
            Computation::Nc => "nc",
            Computation::Losc => "losc",
            Computation::GgPdf => "gg-pdf",
            Computation::Attenuation => "attenuation",
            Computation::LinkBudget => "link-budget",
            Computation::Capacity => "capacity",
            Computation::ChannelSample => "channel-sample",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Whether varying `p` can change the output of this computation.
    pub fn uses(self, p: Parameter) -> bool {
        use Parameter as P;
        let turbulence = matches!(p, P::Cn2 | P::HvA | P::WindSpeed | P::AltitudeM);
        match self {
            Computation::RiscProfile => turbulence,
            Computation::Rytov => turbulence || matches!(p, P::FrequencyHz | P::DistanceM),
            Computation::Nc => {
                turbulence
                    || matches!(
                        p,
                        P::FrequencyHz | P::DistanceM | P::SpacingWavelengths | P::DtSpacing | P::DrSpacing
                    )
            }
            Computation::Losc => {
                turbulence
                    || matches!(p, P::FrequencyHz | P::DistanceM | P::SpacingWavelengths | P::ArraySize)
            }
            Computation::GgPdf => {
                turbulence || matches!(p, P::FrequencyHz | P::DistanceM | P::RytovVariance | P::Psi)
            }
            Computation::Attenuation => {
                turbulence || matches!(p, P::FrequencyHz | P::DistanceM | P::RytovVariance)
            }
            Computation::LinkBudget | Computation::Capacity => {
                !matches!(p, P::Psi | P::DtSpacing | P::DrSpacing)
            }
            Computation::ChannelSample => {
                turbulence
                    || matches!(
                        p,
                        P::FrequencyHz | P::DistanceM | P::SpacingWavelengths | P::ArraySize | P::RytovVariance
                    )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkSection {
    pub frequency_hz: f64,
    pub distance_m: f64,
    pub altitude_m: f64,
    pub tx_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArraySection {
    pub nx: usize,
    pub ny: usize,
    pub spacing_wavelengths: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TurbulenceModel {
    /// Path-constant C_n² taken as the terahertz-band value.
    Constant,
    /// Hufnagel–Valley profile evaluated at the link altitude and carried to
    /// the terahertz band.
    HufnagelValley,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformName {
    DerivativeRatio,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurbulenceSection {
    pub model: TurbulenceModel,
    pub cn2: f64,
    pub hv_a: f64,
    pub wind_speed: f64,
    pub thz_transform: TransformName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbsorptionSource {
    None,
    Illustrative,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtmosphereSection {
    pub temperature_k: f64,
    pub pressure_mbar: f64,
    pub vapor_pressure_mbar: f64,
    pub absorption: AbsorptionSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absorption_table: Option<PathBuf>,
    pub scale_height_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringSection {
    pub enabled: bool,
    pub n0_per_m4: f64,
    pub rho0_per_m: f64,
    pub index_re: f64,
    pub index_im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GgArgumentName {
    Product,
    Sqrt2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FadingSection {
    pub enabled: bool,
    pub correlated: bool,
    pub gg_argument: GgArgumentName,
    pub psi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rytov_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NcSection {
    pub d_t_spacing: f64,
    pub d_r_spacing: f64,
    pub numeric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelSection {
    pub theta_t: f64,
    pub phi_t: f64,
    pub theta_r: f64,
    pub phi_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSection {
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// A fully validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub computation: Computation,
    pub seed: u64,
    pub link: LinkSection,
    pub tx_array: ArraySection,
    pub rx_array: ArraySection,
    pub turbulence: TurbulenceSection,
    pub atmosphere: AtmosphereSection,
    pub scattering: ScatteringSection,
    pub fading: FadingSection,
    pub nc: NcSection,
    pub channel: ChannelSection,
    pub output: OutputSection,
    pub sweep: SweepSpec,
    pub series: Vec<SeriesSpec>,
}

#[derive(Serialize)]
struct Canonical<'a> {
    computation: Computation,
    seed: u64,
    link: &'a LinkSection,
    tx_array: &'a ArraySection,
    rx_array: &'a ArraySection,
    turbulence: &'a TurbulenceSection,
    atmosphere: &'a AtmosphereSection,
    scattering: &'a ScatteringSection,
    fading: &'a FadingSection,
    nc: &'a NcSection,
    channel: &'a ChannelSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<&'a OutputSection>,
    sweep: [&'a SweepSpec; 1],
    #[serde(skip_serializing_if = "<[_]>::is_empty")]
    series: &'a [SeriesSpec],
}

impl ScenarioConfig {
    /// Canonical TOML rendering with every default made explicit. Parsing it
    /// back yields an equal configuration.
    pub fn canonical(&self) -> String {
        self.render(true)
    }

    /// Canonical rendering of the inputs that determine the numbers, that is
    /// everything except the `[output]` section.
    pub fn canonical_inputs(&self) -> String {
        self.render(false)
    }

    fn render(&self, with_output: bool) -> String {
        let c = Canonical {
            computation: self.computation,
            seed: self.seed,
            link: &self.link,
            tx_array: &self.tx_array,
            rx_array: &self.rx_array,
            turbulence: &self.turbulence,
            atmosphere: &self.atmosphere,
            scattering: &self.scattering,
            fading: &self.fading,
            nc: &self.nc,
            channel: &self.channel,
            output: with_output.then_some(&self.output),
            sweep: [&self.sweep],
            series: &self.series,
        };
        toml::to_string(&c).expect("scenario fields are plain TOML values")
    }
}

/// Parses and validates a scenario. The computation must be named in the file.
pub fn validate_config(text: &str) -> Result<ScenarioConfig, CliError> {
    validate_config_for(text, None)
}

/// Like [`validate_config`], with the computation optionally supplied by the
/// caller. A file that names a different computation is rejected.
pub fn validate_config_for(text: &str, computation: Option<Computation>) -> Result<ScenarioConfig, CliError> {
    let (_, syntax) = DeTable::parse_recoverable(text);
    if !syntax.is_empty() {
        let issues = syntax
            .iter()
            .map(|e| ConfigIssue {
                key: "<document>".into(),
                line: e.span().map(|s| line_of(text, s.start)),
                message: e.message().trim().to_string(),
            })
            .collect();
        return Err(CliError::Validation(issues));
    }
    let root: Table = toml::from_str(text).map_err(|e| {
        CliError::Validation(vec![ConfigIssue {
            key: "<document>".into(),
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().trim().to_string(),
        }])
    })?;
    let mut cx = Ctx {
        issues: Vec::new(),
        lines: line_map(text),
    };
    let cfg = build(&root, computation, &mut cx);
    if cx.issues.is_empty() {
        Ok(cfg.expect("a config is produced whenever no issue was recorded"))
    } else {
        Err(CliError::Validation(cx.issues))
    }
}

struct Ctx {
    issues: Vec<ConfigIssue>,
    lines: HashMap<String, usize>,
}

impl Ctx {
    fn issue(&mut self, key: &str, message: impl Into<String>) {
        let line = self.line(key);
        self.issues.push(ConfigIssue {
            key: key.to_string(),
            line,
            message: message.into(),
        });
    }

    /// Line of `key`, or of its closest located ancestor.
    fn line(&self, key: &str) -> Option<usize> {
        let mut k = key;
        loop {
            if let Some(&l) = self.lines.get(k) {
                return Some(l);
            }
            let cut = k.rfind(['.', '['])?;
            k = &k[..cut];
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

fn line_map(text: &str) -> HashMap<String, usize> {
    fn walk(t: &DeTable<'_>, prefix: &str, text: &str, map: &mut HashMap<String, usize>) {
        for (k, v) in t.iter() {
            let path = if prefix.is_empty() {
                k.get_ref().to_string()
            } else {
                format!("{prefix}.{}", k.get_ref())
            };
            map.entry(path.clone()).or_insert(line_of(text, k.span().start));
            match v.get_ref() {
                DeValue::Table(sub) => walk(sub, &path, text, map),
                DeValue::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        let ip = format!("{path}[{i}]");
                        map.insert(ip.clone(), line_of(text, item.span().start));
                        if let DeValue::Table(sub) = item.get_ref() {
                            walk(sub, &ip, text, map);
                        }
                    }
                }
                _ => {}
            }
        }
    }
    let mut map = HashMap::new();
    if let Ok(root) = DeTable::parse(text) {
        walk(root.get_ref(), "", text, &mut map);
    }
    map
}

type Check = fn(f64) -> Result<(), &'static str>;

fn positive(v: f64) -> Result<(), &'static str> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err("must be finite and > 0")
    }
}

fn non_negative(v: f64) -> Result<(), &'static str> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err("must be finite and >= 0")
    }
}

fn finite(v: f64) -> Result<(), &'static str> {
    if v.is_finite() {
        Ok(())
    } else {
        Err("must be finite")
    }
}

/// Typed view of one table that remembers which keys were consumed.
struct Section<'a> {
    path: String,
    table: Option<&'a Table>,
    seen: HashSet<String>,
}

impl<'a> Section<'a> {
    fn root(table: &'a Table) -> Self {
        Self {
            path: String::new(),
            table: Some(table),
            seen: HashSet::new(),
        }
    }

    fn key(&self, name: &str) -> String {
        if self.path.is_empty() {
            name.to_string()
        } else {
            format!("{}.{name}", self.path)
        }
    }

    fn raw(&mut self, name: &str) -> Option<&'a Value> {
        self.seen.insert(name.to_string());
        self.table.and_then(|t| t.get(name))
    }

    fn sub(&mut self, cx: &mut Ctx, name: &str) -> Section<'a> {
        let key = self.key(name);
        let table = match self.raw(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(other) => {
                cx.issue(&key, format!("expected a table, found {}", other.type_str()));
                None
            }
        };
        Section {
            path: key,
            table,
            seen: HashSet::new(),
        }
    }

    fn opt_f64(&mut self, cx: &mut Ctx, name: &str, check: Check) -> Option<f64> {
        let key = self.key(name);
        let v = match self.raw(name)? {
            Value::Float(f) => *f,
            Value::Integer(i) => *i as f64,
            other => {
                cx.issue(&key, format!("expected a number, found {}", other.type_str()));
                return None;
            }
        };
        match check(v) {
            Ok(()) => Some(v),
            Err(msg) => {
                cx.issue(&key, format!("{msg} (got {v})"));
                None
            }
        }
    }

    fn f64(&mut self, cx: &mut Ctx, name: &str, default: f64, check: Check) -> f64 {
        self.opt_f64(cx, name, check).unwrap_or(default)
    }

    fn opt_usize(&mut self, cx: &mut Ctx, name: &str, min: usize) -> Option<usize> {
        let key = self.key(name);
        match self.raw(name)? {
            Value::Integer(i) if *i >= min as i64 => Some(*i as usize),
            Value::Integer(i) => {
                cx.issue(&key, format!("must be >= {min} (got {i})"));
                None
            }
            other => {
                cx.issue(&key, format!("expected an integer, found {}", other.type_str()));
                None
            }
        }
    }

    fn usize(&mut self, cx: &mut Ctx, name: &str, default: usize, min: usize) -> usize {
        self.opt_usize(cx, name, min).unwrap_or(default)
    }

    fn bool(&mut self, cx: &mut Ctx, name: &str, default: bool) -> bool {
        let key = self.key(name);
        match self.raw(name) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(other) => {
                cx.issue(&key, format!("expected a boolean, found {}", other.type_str()));
                default
            }
        }
    }

    fn opt_str(&mut self, cx: &mut Ctx, name: &str) -> Option<&'a str> {
        let key = self.key(name);
        match self.raw(name)? {
            Value::String(s) => Some(s.as_str()),
            other => {
                cx.issue(&key, format!("expected a string, found {}", other.type_str()));
                None
            }
        }
    }

    /// A string restricted to a fixed vocabulary.
    fn choice<T: Copy>(&mut self, cx: &mut Ctx, name: &str, default: T, options: &[(&str, T)]) -> T {
        let key = self.key(name);
        let Some(s) = self.opt_str(cx, name) else {
            return default;
        };
        match options.iter().find(|(n, _)| *n == s) {
            Some((_, v)) => *v,
            None => {
                let names: Vec<_> = options.iter().map(|(n, _)| format!("`{n}`")).collect();
                cx.issue(&key, format!("unknown value `{s}`; expected one of {}", names.join(", ")));
                default
            }
        }
    }

    fn f64_list(&mut self, cx: &mut Ctx, name: &str) -> Option<Vec<f64>> {
        let key = self.key(name);
        let arr = match self.raw(name)? {
            Value::Array(a) => a,
            other => {
                cx.issue(&key, format!("expected an array of numbers, found {}", other.type_str()));
                return None;
            }
        };
        let mut out = Vec::with_capacity(arr.len());
        let mut ok = true;
        for (i, v) in arr.iter().enumerate() {
            match v {
                Value::Float(f) => out.push(*f),
                Value::Integer(n) => out.push(*n as f64),
                other => {
                    cx.issue(&format!("{key}[{i}]"), format!("expected a number, found {}", other.type_str()));
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    fn finish(self, cx: &mut Ctx) {
        let Some(t) = self.table else { return };
        let mut unknown: Vec<&String> = t.keys().filter(|k| !self.seen.contains(*k)).collect();
        unknown.sort();
        for k in unknown {
            cx.issue(&self.key(k), "unknown key");
        }
    }
}

fn build(root: &Table, forced: Option<Computation>, cx: &mut Ctx) -> Option<ScenarioConfig> {
    let mut top = Section::root(root);

    let named = top.opt_str(cx, "computation");
    let computation = match (named, forced) {
        (None, None) => {
            cx.issue("computation", "missing; name one of the computations");
            None
        }
        (None, Some(c)) => Some(c),
        (Some(n), f) => match Computation::from_name(n) {
            None => {
                let names: Vec<_> = Computation::ALL.iter().map(|c| c.name()).collect();
                cx.issue(
                    "computation",
                    format!("unknown computation `{n}`; expected one of {}", names.join(", ")),
                );
                None
            }
            Some(c) => match f {
                Some(f) if f != c => {
                    cx.issue(
                        "computation",
                        format!("file names `{}` but `{}` was requested", c.name(), f.name()),
                    );
                    None
                }
                _ => Some(c),
            },
        },
    };

    let seed = match top.raw("seed") {
        None => 0,
        Some(Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(other) => {
            cx.issue("seed", format!("expected a non-negative integer, found {other}"));
            0
        }
    };

    let mut s = top.sub(cx, "link");
    let link = LinkSection {
        frequency_hz: s.f64(cx, "frequency_hz", 300e9, positive),
        distance_m: s.f64(cx, "distance_m", 1e3, positive),
        altitude_m: s.f64(cx, "altitude_m", 0.0, non_negative),
        tx_power_dbm: s.f64(cx, "tx_power_dbm", 10.0, finite),
        bandwidth_hz: s.f64(cx, "bandwidth_hz", 1e9, positive),
        noise_psd_dbm_hz: s.f64(cx, "noise_psd_dbm_hz", -174.0, finite),
    };
    s.finish(cx);

    let mut arrays = Vec::new();
    for name in ["tx_array", "rx_array"] {
        let mut s = top.sub(cx, name);
        arrays.push(ArraySection {
            nx: s.usize(cx, "nx", 32, 1),
            ny: s.usize(cx, "ny", 32, 1),
            spacing_wavelengths: s.f64(cx, "spacing_wavelengths", 0.5, positive),
        });
        s.finish(cx);
    }
    let rx_array = arrays.pop().expect("two arrays");
    let tx_array = arrays.pop().expect("two arrays");

    let mut s = top.sub(cx, "turbulence");
    let turbulence = TurbulenceSection {
        model: s.choice(
            cx,
            "model",
            TurbulenceModel::Constant,
            &[
                ("constant", TurbulenceModel::Constant),
                ("hufnagel-valley", TurbulenceModel::HufnagelValley),
            ],
        ),
        cn2: s.f64(cx, "cn2", 1e-9, non_negative),
        hv_a: s.f64(cx, "hv_a", 1.7e-14, non_negative),
        wind_speed: s.f64(cx, "wind_speed", 21.0, non_negative),
        thz_transform: s.choice(
            cx,
            "thz_transform",
            TransformName::DerivativeRatio,
            &[
                ("derivative-ratio", TransformName::DerivativeRatio),
                ("identity", TransformName::Identity),
            ],
        ),
    };
    s.finish(cx);

    let mut s = top.sub(cx, "atmosphere");
    let absorption = s.choice(
        cx,
        "absorption",
        AbsorptionSource::None,
        &[
            ("none", AbsorptionSource::None),
            ("illustrative", AbsorptionSource::Illustrative),
            ("table", AbsorptionSource::Table),
        ],
    );
    let table_key = s.key("absorption_table");
    let absorption_table = s.opt_str(cx, "absorption_table").map(PathBuf::from);
    match (absorption, &absorption_table) {
        (AbsorptionSource::Table, None) => {
            cx.issue(&table_key, "required when absorption = \"table\"");
        }
        (AbsorptionSource::None | AbsorptionSource::Illustrative, Some(_)) => {
            cx.issue(&table_key, "only meaningful when absorption = \"table\"");
        }
        _ => {}
    }
    let atmosphere = AtmosphereSection {
        temperature_k: s.f64(cx, "temperature_k", 288.15, positive),
        pressure_mbar: s.f64(cx, "pressure_mbar", 1013.25, positive),
        vapor_pressure_mbar: s.f64(cx, "vapor_pressure_mbar", 0.0, non_negative),
        absorption,
        absorption_table,
        scale_height_m: s.f64(cx, "scale_height_m", thz_turb_core::propagation::DEFAULT_SCALE_HEIGHT, positive),
    };
    s.finish(cx);

    let mut s = top.sub(cx, "scattering");
    let scattering = ScatteringSection {
        enabled: s.bool(cx, "enabled", false),
        n0_per_m4: s.f64(cx, "n0_per_m4", 1.6e7, non_negative),
        rho0_per_m: s.f64(cx, "rho0_per_m", 5040.0, positive),
        index_re: s.f64(cx, "index_re", 2.5, positive),
        index_im: s.f64(cx, "index_im", 1.3, non_negative),
    };
    s.finish(cx);

    let mut s = top.sub(cx, "fading");
    let fading = FadingSection {
        enabled: s.bool(cx, "enabled", true),
        correlated: s.bool(cx, "correlated", false),
        gg_argument: s.choice(
            cx,
            "gg_argument",
            GgArgumentName::Product,
            &[("product", GgArgumentName::Product), ("sqrt2", GgArgumentName::Sqrt2)],
        ),
        psi: s.f64(cx, "psi", 1.0, positive),
        rytov_variance: s.opt_f64(cx, "rytov_variance", positive),
    };
    s.finish(cx);

    let mut s = top.sub(cx, "nc");
    let nc = NcSection {
        d_t_spacing: s.f64(cx, "d_t_spacing", 1.0, non_negative),
        d_r_spacing: s.f64(cx, "d_r_spacing", 1.0, non_negative),
        numeric: s.bool(cx, "numeric", false),
    };
    s.finish(cx);

    let mut s = top.sub(cx, "channel");
    let channel = ChannelSection {
        theta_t: s.f64(cx, "theta_t", 0.0, finite),
        phi_t: s.f64(cx, "phi_t", 0.0, finite),
        theta_r: s.f64(cx, "theta_r", 0.0, finite),
        phi_r: s.f64(cx, "phi_r", 0.0, finite),
    };
    s.finish(cx);

    let mut s = top.sub(cx, "output");
    let output = OutputSection {
        format: s.choice(
            cx,
            "format",
            OutputFormat::Csv,
            &[("csv", OutputFormat::Csv), ("json", OutputFormat::Json)],
        ),
        path: s.opt_str(cx, "path").map(PathBuf::from),
    };
    s.finish(cx);

    let sweeps = axis_tables(&mut top, cx, "sweep");
    let mut sweep = None;
    match sweeps.len() {
        0 => cx.issue("sweep", "missing; exactly one sweep axis is required"),
        1 => sweep = parse_sweep(sweeps[0], "sweep[0]", cx),
        n => cx.issue("sweep", format!("found {n} sweep axes; exactly one sweep axis is allowed")),
    }
    let series: Vec<SeriesSpec> = axis_tables(&mut top, cx, "series")
        .into_iter()
        .enumerate()
        .filter_map(|(i, t)| parse_series(t, &format!("series[{i}]"), cx))
        .collect();

    top.finish(cx);

    let computation = computation?;
    let sweep = sweep?;
    cross_checks(computation, &turbulence, &fading, &tx_array, &rx_array, &sweep, &series, cx);

    Some(ScenarioConfig {
        computation,
        seed,
        link,
        tx_array,
        rx_array,
        turbulence,
        atmosphere,
        scattering,
        fading,
        nc,
        channel,
        output,
        sweep,
        series,
    })
}

/// Accepts either `[name]` (one table) or `[[name]]` (array of tables).
fn axis_tables<'a>(top: &mut Section<'a>, cx: &mut Ctx, name: &str) -> Vec<&'a Table> {
    match top.raw(name) {
        None => Vec::new(),
        Some(Value::Table(t)) => vec![t],
        Some(Value::Array(items)) => {
            let mut out = Vec::new();
            for (i, item) in items.iter().enumerate() {
                match item {
                    Value::Table(t) => out.push(t),
                    other => cx.issue(&format!("{name}[{i}]"), format!("expected a table, found {}", other.type_str())),
                }
            }
            out
        }
        Some(other) => {
            cx.issue(name, format!("expected a table, found {}", other.type_str()));
            Vec::new()
        }
    }
}

fn axis_parameter(s: &mut Section<'_>, cx: &mut Ctx) -> Option<Parameter> {
    let key = s.key("parameter");
    let Some(name) = s.opt_str(cx, "parameter") else {
        if s.table.is_some_and(|t| !t.contains_key("parameter")) {
            cx.issue(&key, "missing");
        }
        return None;
    };
    let p = Parameter::from_name(name);
    if p.is_none() {
        let names: Vec<_> = Parameter::ALL.iter().map(|p| p.name()).collect();
        cx.issue(&key, format!("unknown parameter `{name}`; expected one of {}", names.join(", ")));
    }
    p
}

fn check_values(p: Parameter, values: &[f64], key: &str, cx: &mut Ctx) -> bool {
    let mut ok = true;
    for (i, &v) in values.iter().enumerate() {
        if let Err(msg) = p.check(v) {
            cx.issue(&format!("{key}[{i}]"), format!("{msg} for {} (got {v})", p.name()));
            ok = false;
        }
    }
    ok
}

fn parse_sweep(t: &Table, path: &str, cx: &mut Ctx) -> Option<SweepSpec> {
    let mut s = Section {
        path: path.to_string(),
        table: Some(t),
        seen: HashSet::new(),
    };
    let parameter = axis_parameter(&mut s, cx);
    let has_values = t.contains_key("values");
    let has_range = ["start", "stop", "points", "scale"].iter().any(|k| t.contains_key(*k));
    let values = if has_values && has_range {
        cx.issue(path, "give either `values` or `start`/`stop`/`points`, not both");
        s.raw("values");
        for k in ["start", "stop", "points", "scale"] {
            s.raw(k);
        }
        None
    } else if has_values {
        let key = s.key("values");
        match s.f64_list(cx, "values") {
            Some(v) if v.len() < 2 => {
                cx.issue(&key, format!("a sweep needs at least 2 points (got {})", v.len()));
                None
            }
            Some(v) => Some(AxisValues::List { values: v }),
            None => None,
        }
    } else {
        let mut missing = false;
        for k in ["start", "stop", "points"] {
            if !t.contains_key(k) {
                cx.issue(&s.key(k), "missing");
                missing = true;
            }
        }
        let start = s.opt_f64(cx, "start", finite);
        let stop = s.opt_f64(cx, "stop", finite);
        let points = s.opt_usize(cx, "points", 2);
        let scale = s.choice(cx, "scale", Scale::Linear, &[("linear", Scale::Linear), ("log", Scale::Log)]);
        match (start, stop, points) {
            (Some(start), Some(stop), Some(points)) if !missing => {
                if scale == Scale::Log && !(start > 0.0 && stop > 0.0) {
                    cx.issue(path, format!("a log sweep needs start and stop > 0 (got {start}, {stop})"));
                    None
                } else {
                    Some(AxisValues::Range {
                        start,
                        stop,
                        points,
                        scale,
                    })
                }
            }
            _ => None,
        }
    };
    s.finish(cx);
    let (parameter, values) = (parameter?, values?);
    let key = match values {
        AxisValues::List { .. } => format!("{path}.values"),
        AxisValues::Range { .. } => format!("{path}.start"),
    };
    let pts = values.points();
    let checked = match values {
        AxisValues::List { .. } => check_values(parameter, &pts, &key, cx),
        AxisValues::Range { start, stop, .. } => {
            let mut ok = true;
            for (k, v) in [("start", start), ("stop", stop)] {
                if let Err(msg) = parameter.check(v) {
                    cx.issue(&format!("{path}.{k}"), format!("{msg} for {} (got {v})", parameter.name()));
                    ok = false;
                }
            }
            if ok && parameter == Parameter::ArraySize {
                ok = check_values(parameter, &pts, &format!("{path}.points"), cx);
            }
            ok
        }
    };
    checked.then_some(SweepSpec { parameter, values })
}

fn parse_series(t: &Table, path: &str, cx: &mut Ctx) -> Option<SeriesSpec> {
    let mut s = Section {
        path: path.to_string(),
        table: Some(t),
        seen: HashSet::new(),
    };
    let parameter = axis_parameter(&mut s, cx);
    let key = s.key("values");
    let values = match s.f64_list(cx, "values") {
        None if !t.contains_key("values") => {
            cx.issue(&key, "missing");
            None
        }
        Some(v) if v.is_empty() => {
            cx.issue(&key, "must not be empty");
            None
        }
        other => other,
    };
    s.finish(cx);
    let (parameter, values) = (parameter?, values?);
    check_values(parameter, &values, &key, cx).then_some(SeriesSpec { parameter, values })
}

#[allow(clippy::too_many_arguments)]
fn cross_checks(
    computation: Computation,
    turbulence: &TurbulenceSection,
    fading: &FadingSection,
    tx: &ArraySection,
    rx: &ArraySection,
    sweep: &SweepSpec,
    series: &[SeriesSpec],
    cx: &mut Ctx,
) {
    let axes = std::iter::once(("sweep[0]".to_string(), sweep.parameter, sweep.values.points()))
        .chain(
            series
                .iter()
                .enumerate()
                .map(|(i, s)| (format!("series[{i}]"), s.parameter, s.values.clone())),
        )
        .collect::<Vec<_>>();

    let mut seen: HashMap<Parameter, String> = HashMap::new();
    for (path, p, _) in &axes {
        let key = format!("{path}.parameter");
        if let Some(first) = seen.get(p) {
            cx.issue(&key, format!("`{}` is already varied by {first}", p.name()));
            continue;
        }
        seen.insert(*p, path.clone());
        if !computation.uses(*p) {
            cx.issue(
                &key,
                format!("`{}` has no effect on computation `{}`", p.name(), computation.name()),
            );
            continue;
        }
        let model_mismatch = match turbulence.model {
            TurbulenceModel::Constant => matches!(p, Parameter::HvA | Parameter::WindSpeed),
            TurbulenceModel::HufnagelValley => *p == Parameter::Cn2,
        };
        let override_hides = fading.rytov_variance.is_some()
            && matches!(
                p,
                Parameter::Cn2 | Parameter::HvA | Parameter::WindSpeed | Parameter::AltitudeM
            )
            && computation != Computation::RiscProfile;
        if model_mismatch {
            cx.issue(
                &key,
                format!(
                    "`{}` has no effect with turbulence model `{}`",
                    p.name(),
                    match turbulence.model {
                        TurbulenceModel::Constant => "constant",
                        TurbulenceModel::HufnagelValley => "hufnagel-valley",
                    }
                ),
            );
        } else if override_hides {
            cx.issue(&key, format!("`{}` is masked by fading.rytov_variance", p.name()));
        }
    }

    if computation == Computation::ChannelSample && fading.enabled && fading.correlated {
        let sizes: Vec<f64> = axes
            .iter()
            .find(|(_, p, _)| *p == Parameter::ArraySize)
            .map(|(_, _, v)| v.clone())
            .unwrap_or_default();
        let largest = sizes.iter().fold(0usize, |m, &s| m.max(s as usize));
        let entries = if largest > 0 {
            largest.pow(4)
        } else {
            tx.nx * tx.ny * rx.nx * rx.ny
        };
        if entries > MAX_COPULA_ENTRIES {
            cx.issue(
                "fading.correlated",
                format!(
                    "correlated sampling supports at most {MAX_COPULA_ENTRIES} matrix entries (N_t N_r = {entries})"
                ),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "computation = \"rytov\"\n[[sweep]]\nparameter = \"distance_m\"\nstart = 100\nstop = 1000\npoints = 3\n";

    #[test]
    fn minimal_file_gets_table_defaults() {
        let c = validate_config(MINIMAL).unwrap();
        assert_eq!(c.link.frequency_hz, 300e9);
        assert_eq!(c.tx_array.nx, 32);
        assert_eq!(c.turbulence.cn2, 1e-9);
        assert_eq!(c.sweep.values.points(), vec![100.0, 550.0, 1000.0]);
    }

    #[test]
    fn canonical_form_round_trips() {
        let c = validate_config(MINIMAL).unwrap();
        let text = c.canonical();
        let again = validate_config(&text).unwrap();
        assert_eq!(c, again);
        assert_eq!(text, again.canonical());
    }

    #[test]
    fn line_numbers_point_at_the_key() {
        let text = format!("{MINIMAL}[link]\n\nbandwidth_hz = -1\n");
        let err = validate_config(&text).unwrap_err();
        let issues = err.issues();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].key, "link.bandwidth_hz");
        assert_eq!(issues[0].line, Some(9));
    }

    #[test]
    fn forced_computation_must_agree() {
        assert!(validate_config_for(MINIMAL, Some(Computation::Rytov)).is_ok());
        let err = validate_config_for(MINIMAL, Some(Computation::Losc)).unwrap_err();
        assert_eq!(err.issues()[0].key, "computation");
    }
}
