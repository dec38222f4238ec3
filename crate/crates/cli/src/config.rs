//! Strict INI-style run configuration: flat sections, line-numbered errors,
//! unknown keys rejected. A parsed document resolves (with defaults and
//! optional sweep overrides) into fully-typed single-run configurations.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use photon_shaper_core::{Error as CoreError, PulseSpec, SystemParams, TimeGrid};

/// Configuration-level failure with an optional line number.
#[derive(Debug)]
pub struct ConfigError {
    pub message: String,
    pub line: Option<usize>,
    /// true when the underlying failure is a size/cost limit, which maps to
    /// a distinct process exit code
    pub capacity: bool,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            line: Some(line),
            capacity: false,
        }
    }

    fn plain(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            line: None,
            capacity: false,
        }
    }

    fn from_core(context: &str, e: CoreError) -> Self {
        Self {
            capacity: matches!(e, CoreError::Capacity(_)),
            message: format!("{context}: {e}"),
            line: None,
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

/// Execution mode, selected by the CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Forward,
    Inverse,
    Spectrum,
    Sweep,
    Figure,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "forward" => Some(Mode::Forward),
            "inverse" => Some(Mode::Inverse),
            "spectrum" => Some(Mode::Spectrum),
            "sweep" => Some(Mode::Sweep),
            "figure" => Some(Mode::Figure),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Forward => "forward",
            Mode::Inverse => "inverse",
            Mode::Spectrum => "spectrum",
            Mode::Sweep => "sweep",
            Mode::Figure => "figure",
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// section name, header line, entries in file order
type Section = (String, usize, Vec<(String, Entry)>);

/// Raw parsed document: ordered sections of ordered key/value entries.
#[derive(Debug, Clone, Default)]
pub struct Document {
    sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let mut doc = Document::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| {
                    ConfigError::at(lineno, format!("malformed section header '{line}'"))
                })?;
                let name = name.trim().to_string();
                if name.is_empty() {
                    return Err(ConfigError::at(lineno, "empty section name"));
                }
                if doc.sections.iter().any(|(n, _, _)| *n == name) {
                    return Err(ConfigError::at(
                        lineno,
                        format!("duplicate section [{name}]"),
                    ));
                }
                doc.sections.push((name, lineno, Vec::new()));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::at(lineno, format!("expected 'key = value', got '{line}'"))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::at(lineno, "empty key"));
            }
            let section = doc.sections.last_mut().ok_or_else(|| {
                ConfigError::at(lineno, format!("key '{key}' appears before any [section]"))
            })?;
            if section.2.iter().any(|(k, _)| *k == key) {
                return Err(ConfigError::at(
                    lineno,
                    format!("duplicate key '{key}' in section [{}]", section.0),
                ));
            }
            section.2.push((
                key,
                Entry {
                    value,
                    line: lineno,
                },
            ));
        }
        Ok(doc)
    }

    fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|(n, _, _)| n == name)
    }
}

const PULSE_KEYS: &[&str] = &[
    "family",
    "amplitude",
    "center",
    "width",
    "centers",
    "widths",
    "ramp",
    "depth",
    "period",
    "csv",
];

const PARAMS_KEYS: &[&str] = &[
    "rabi_R",
    "delta_k",
    "delta_p",
    "gamma_rad_ratio",
    "gamma_total",
];

const GRID_KEYS: &[&str] = &["t_end", "dt"];

const INVERSE_KEYS: &[&str] = &[
    "target_family",
    "target_amplitude",
    "target_center",
    "target_width",
    "target_centers",
    "target_widths",
    "target_ramp",
    "target_depth",
    "target_period",
    "eta_target",
];

const FIGURE_IDS: &[&str] = &["fig2", "fig3", "fig4", "fig5", "fig7", "fig8"];

/// A validated document plus sweep/figure metadata; resolves into typed
/// single-run configurations.
#[derive(Debug, Clone)]
pub struct Plan {
    pub mode: Mode,
    /// section -> key -> value, defaults applied
    values: BTreeMap<String, BTreeMap<String, String>>,
    /// sweep axes in file order: (section.key, values)
    pub sweep: Vec<(String, Vec<String>)>,
    pub figure_id: Option<String>,
    /// directory the config was loaded from; csv paths resolve against it
    base_dir: PathBuf,
}

/// One fully-resolved run.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub params: SystemParams,
    pub grid: TimeGrid,
    pub pump: Option<EnvelopeSource>,
    pub coupling: EnvelopeSource,
    pub inverse: Option<InverseSpec>,
    pub spectrum_span: f64,
    pub spectrum_points: usize,
    pub out_dir: PathBuf,
    /// canonical reparseable text of this run's configuration
    pub canonical: String,
}

#[derive(Debug, Clone)]
pub enum EnvelopeSource {
    Spec(PulseSpec),
    Csv(PathBuf),
}

#[derive(Debug, Clone)]
pub struct InverseSpec {
    pub target: PulseSpec,
    pub eta_target: f64,
}

fn allowed_sections(mode: Mode) -> Vec<&'static str> {
    match mode {
        Mode::Forward => vec!["params", "grid", "pump", "coupling", "outputs"],
        Mode::Spectrum => vec!["params", "grid", "pump", "coupling", "outputs", "spectrum"],
        Mode::Inverse => vec!["params", "grid", "coupling", "inverse", "outputs"],
        Mode::Sweep | Mode::Figure => vec![
            "params", "grid", "pump", "coupling", "inverse", "outputs", "sweep", "figure",
        ],
    }
}

fn section_keys(section: &str) -> Option<&'static [&'static str]> {
    match section {
        "params" => Some(PARAMS_KEYS),
        "grid" => Some(GRID_KEYS),
        "pump" | "coupling" => Some(PULSE_KEYS),
        "inverse" => Some(INVERSE_KEYS),
        "outputs" => Some(&["dir"]),
        "spectrum" => Some(&["span", "points"]),
        "figure" => Some(&["id"]),
        "sweep" => None, // dotted keys, validated separately
        _ => None,
    }
}

impl Plan {
    pub fn from_document(mode: Mode, doc: &Document, base_dir: &Path) -> Result<Plan> {
        let allowed = allowed_sections(mode);
        for (name, line, entries) in &doc.sections {
            if !allowed.contains(&name.as_str()) {
                return Err(ConfigError::at(
                    *line,
                    format!("section [{name}] is not used in {} mode", mode.name()),
                ));
            }
            if name == "sweep" {
                if !matches!(mode, Mode::Sweep | Mode::Figure) {
                    unreachable!();
                }
                for (key, entry) in entries {
                    validate_sweep_key(key, entry.line)?;
                }
                continue;
            }
            let keys = section_keys(name).unwrap();
            for (key, entry) in entries {
                if !keys.contains(&key.as_str()) {
                    return Err(ConfigError::at(
                        entry.line,
                        format!("unknown key '{key}' in section [{name}]"),
                    ));
                }
            }
        }

        // required sections per mode
        let mut required = vec!["params", "grid", "coupling"];
        match mode {
            Mode::Forward | Mode::Spectrum => required.push("pump"),
            Mode::Inverse => required.push("inverse"),
            Mode::Sweep => required.push("sweep"),
            Mode::Figure => required.push("figure"),
        }
        for name in required {
            if doc.section(name).is_none() {
                return Err(ConfigError::plain(format!(
                    "missing required section [{name}] for {} mode",
                    mode.name()
                )));
            }
        }
        // sweep/figure runs are forward unless an [inverse] section selects
        // the design pipeline; forward runs need a pump
        if matches!(mode, Mode::Sweep | Mode::Figure) {
            match (
                doc.section("pump").is_some(),
                doc.section("inverse").is_some(),
            ) {
                (false, false) => {
                    return Err(ConfigError::plain(
                        "missing [pump] section (or [inverse] for design runs)",
                    ))
                }
                (true, true) => {
                    return Err(ConfigError::plain(
                        "provide either [pump] or [inverse], not both",
                    ))
                }
                _ => {}
            }
        }
        if matches!(mode, Mode::Inverse) && doc.section("pump").is_some() {
            return Err(ConfigError::plain(
                "inverse mode designs the pump; remove the [pump] section",
            ));
        }

        let mut values: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for (name, _, entries) in &doc.sections {
            if name == "sweep" || name == "figure" {
                continue;
            }
            let map = values.entry(name.clone()).or_default();
            for (key, entry) in entries {
                map.insert(key.clone(), entry.value.clone());
            }
        }

        let figure_id = match doc.section("figure") {
            Some((_, line, entries)) => {
                let id = entries
                    .iter()
                    .find(|(k, _)| k == "id")
                    .map(|(_, e)| e.value.clone())
                    .ok_or_else(|| ConfigError::at(*line, "missing 'id' in [figure]"))?;
                if !FIGURE_IDS.contains(&id.as_str()) {
                    return Err(ConfigError::plain(format!(
                        "unknown figure id '{id}' (expected one of {FIGURE_IDS:?})"
                    )));
                }
                Some(id)
            }
            None => None,
        };
        if mode == Mode::Figure && figure_id.is_none() {
            return Err(ConfigError::plain("figure mode requires [figure] id"));
        }

        let mut sweep = Vec::new();
        if let Some((_, _, entries)) = doc.section("sweep") {
            for (key, entry) in entries {
                let parts: Vec<String> = entry
                    .value
                    .split(',')
                    .map(|v| v.trim().to_string())
                    .filter(|v| !v.is_empty())
                    .collect();
                if parts.is_empty() {
                    return Err(ConfigError::at(
                        entry.line,
                        format!("sweep key '{key}' has an empty value list"),
                    ));
                }
                sweep.push((key.clone(), parts));
            }
        }
        if mode == Mode::Sweep && sweep.is_empty() {
            return Err(ConfigError::plain("[sweep] section lists no axes"));
        }

        let plan = Plan {
            mode,
            values,
            sweep,
            figure_id,
            base_dir: base_dir.to_path_buf(),
        };
        // validate the base configuration eagerly (file existence, ranges)
        plan.resolve(&[])?;
        Ok(plan)
    }

    /// Cartesian expansion of the sweep axes, in listed order.
    pub fn expand(&self) -> Vec<Vec<(String, String)>> {
        let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
        for (key, vals) in &self.sweep {
            let mut next = Vec::with_capacity(combos.len() * vals.len());
            for combo in &combos {
                for v in vals {
                    let mut c = combo.clone();
                    c.push((key.clone(), v.clone()));
                    next.push(c);
                }
            }
            combos = next;
        }
        combos
    }

    /// Resolves a single run, with sweep overrides applied on top of the
    /// document values.
    pub fn resolve(&self, overrides: &[(String, String)]) -> Result<ResolvedRun> {
        let mut values = self.values.clone();
        for (dotted, value) in overrides {
            let (section, key) = dotted
                .split_once('.')
                .ok_or_else(|| ConfigError::plain(format!("malformed sweep key '{dotted}'")))?;
            values
                .entry(section.to_string())
                .or_default()
                .insert(key.to_string(), value.clone());
        }

        let get = |section: &str, key: &str| -> Option<&String> {
            values.get(section).and_then(|m| m.get(key))
        };
        let parse_f64 = |section: &str, key: &str, raw: &String| -> Result<f64> {
            raw.parse::<f64>().map_err(|_| {
                ConfigError::plain(format!("[{section}] {key} = '{raw}' is not a number"))
            })
        };
        let get_f64 = |section: &str, key: &str| -> Result<Option<f64>> {
            match get(section, key) {
                Some(raw) => Ok(Some(parse_f64(section, key, raw)?)),
                None => Ok(None),
            }
        };
        let require_f64 = |section: &str, key: &str| -> Result<f64> {
            get_f64(section, key)?.ok_or_else(|| {
                ConfigError::plain(format!("missing required key '{key}' in [{section}]"))
            })
        };

        let params = SystemParams {
            rabi_r: require_f64("params", "rabi_R")?,
            delta_k: get_f64("params", "delta_k")?.unwrap_or(0.0),
            delta_p: get_f64("params", "delta_p")?.unwrap_or(0.0),
            gamma_rad_ratio: get_f64("params", "gamma_rad_ratio")?.unwrap_or(0.9),
            gamma_total: get_f64("params", "gamma_total")?.unwrap_or(1.0),
        };
        params
            .validated()
            .map_err(|e| ConfigError::from_core("[params]", e))?;

        let t_end = require_f64("grid", "t_end")?;
        let dt = get_f64("grid", "dt")?.unwrap_or(1e-3);
        let grid = TimeGrid::new(t_end, dt).map_err(|e| ConfigError::from_core("[grid]", e))?;

        let pump = match values.get("pump") {
            Some(_) => Some(self.envelope_source("pump", &values)?),
            None => None,
        };
        let coupling = self.envelope_source("coupling", &values)?;

        let inverse = match values.get("inverse") {
            Some(map) => {
                let eta_raw = map.get("eta_target").ok_or_else(|| {
                    ConfigError::plain("missing required key 'eta_target' in [inverse]")
                })?;
                let eta_target = parse_f64("inverse", "eta_target", eta_raw)?;
                let target = build_pulse_spec("inverse", map, "target_")?;
                Some(InverseSpec { target, eta_target })
            }
            None => None,
        };

        let spectrum_span = get_f64("spectrum", "span")?.unwrap_or(25.0);
        let spectrum_points = match get("spectrum", "points") {
            Some(raw) => raw.parse::<usize>().map_err(|_| {
                ConfigError::plain(format!("[spectrum] points = '{raw}' is not an integer"))
            })?,
            None => 4001,
        };
        if spectrum_span < 20.0 * params.gamma_total {
            return Err(ConfigError::plain(format!(
                "[spectrum] span = {spectrum_span} must cover at least 20 linewidths"
            )));
        }
        if spectrum_points < 2 {
            return Err(ConfigError::plain("[spectrum] points must be at least 2"));
        }

        let out_dir = match get("outputs", "dir") {
            Some(d) => self.base_dir.join(d),
            None => self.base_dir.join("out"),
        };

        let canonical = canonical_text(&values, self.figure_id.as_deref(), &self.sweep);
        Ok(ResolvedRun {
            params,
            grid,
            pump,
            coupling,
            inverse,
            spectrum_span,
            spectrum_points,
            out_dir,
            canonical,
        })
    }

    fn envelope_source(
        &self,
        section: &str,
        values: &BTreeMap<String, BTreeMap<String, String>>,
    ) -> Result<EnvelopeSource> {
        let map = values
            .get(section)
            .ok_or_else(|| ConfigError::plain(format!("missing section [{section}]")))?;
        if let Some(path) = map.get("csv") {
            if map.len() > 1 {
                return Err(ConfigError::plain(format!(
                    "[{section}] csv = ... excludes the parametric keys"
                )));
            }
            let resolved = self.base_dir.join(path);
            if !resolved.is_file() {
                return Err(ConfigError::plain(format!(
                    "[{section}] csv file '{}' does not exist",
                    resolved.display()
                )));
            }
            return Ok(EnvelopeSource::Csv(resolved));
        }
        Ok(EnvelopeSource::Spec(build_pulse_spec(section, map, "")?))
    }
}

fn validate_sweep_key(key: &str, line: usize) -> Result<()> {
    let (section, field) = key.split_once('.').ok_or_else(|| {
        ConfigError::at(
            line,
            format!("sweep key '{key}' must be of the form section.key"),
        )
    })?;
    let keys = match section {
        "params" => PARAMS_KEYS,
        "grid" => GRID_KEYS,
        "pump" | "coupling" => PULSE_KEYS,
        "inverse" => INVERSE_KEYS,
        _ => {
            return Err(ConfigError::at(
                line,
                format!("sweep key '{key}' names an unknown section '{section}'"),
            ))
        }
    };
    if field == "csv" {
        return Err(ConfigError::at(line, "cannot sweep over csv paths"));
    }
    if !keys.contains(&field) {
        return Err(ConfigError::at(
            line,
            format!("sweep key '{key}' names an unknown field '{field}'"),
        ));
    }
    Ok(())
}

fn parse_pair(section: &str, key: &str, raw: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = raw.split(',').map(|s| s.trim()).collect();
    if parts.len() != 2 {
        return Err(ConfigError::plain(format!(
            "[{section}] {key} = '{raw}' must list exactly two values"
        )));
    }
    let mut out = [0.0; 2];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .parse::<f64>()
            .map_err(|_| ConfigError::plain(format!("[{section}] {key}: '{p}' is not a number")))?;
    }
    Ok(out)
}

fn build_pulse_spec(
    section: &str,
    map: &BTreeMap<String, String>,
    prefix: &str,
) -> Result<PulseSpec> {
    let key = |name: &str| format!("{prefix}{name}");
    let get = |name: &str| map.get(&key(name));
    let get_f64 = |name: &str| -> Result<Option<f64>> {
        match get(name) {
            Some(raw) => Ok(Some(raw.parse::<f64>().map_err(|_| {
                ConfigError::plain(format!(
                    "[{section}] {} = '{raw}' is not a number",
                    key(name)
                ))
            })?)),
            None => Ok(None),
        }
    };
    let require_f64 = |name: &str| -> Result<f64> {
        get_f64(name)?.ok_or_else(|| {
            ConfigError::plain(format!(
                "missing required key '{}' in [{section}]",
                key(name)
            ))
        })
    };

    let family = get("family").ok_or_else(|| {
        ConfigError::plain(format!(
            "missing required key '{}' in [{section}]",
            key("family")
        ))
    })?;
    // target amplitudes are normalized away, so they may be omitted
    let amplitude = match get_f64("amplitude")? {
        Some(a) => a,
        None if !prefix.is_empty() => 1.0,
        None => {
            return Err(ConfigError::plain(format!(
                "missing required key '{}' in [{section}]",
                key("amplitude")
            )))
        }
    };

    let spec = match family.as_str() {
        "gaussian" => PulseSpec::Gaussian {
            amplitude,
            center: require_f64("center")?,
            width: require_f64("width")?,
        },
        "sin2" => PulseSpec::Sin2 {
            amplitude,
            center: require_f64("center")?,
            width: require_f64("width")?,
        },
        "double_gaussian" => {
            let centers_raw = get("centers").ok_or_else(|| {
                ConfigError::plain(format!(
                    "missing required key '{}' in [{section}]",
                    key("centers")
                ))
            })?;
            let widths_raw = get("widths").ok_or_else(|| {
                ConfigError::plain(format!(
                    "missing required key '{}' in [{section}]",
                    key("widths")
                ))
            })?;
            PulseSpec::DoubleGaussian {
                amplitude,
                centers: parse_pair(section, &key("centers"), centers_raw)?,
                widths: parse_pair(section, &key("widths"), widths_raw)?,
            }
        }
        "flattop" => PulseSpec::Flattop {
            amplitude,
            center: require_f64("center")?,
            width: require_f64("width")?,
            ramp: require_f64("ramp")?,
        },
        "constant" => PulseSpec::Constant { amplitude },
        "oscillating" => PulseSpec::Oscillating {
            amplitude,
            depth: require_f64("depth")?,
            period: require_f64("period")?,
        },
        other => {
            return Err(ConfigError::plain(format!(
                "[{section}] unknown pulse family '{other}'"
            )))
        }
    };
    Ok(spec)
}

/// Canonical, reparseable text of a resolved configuration (sweep axes and
/// figure id included so aggregate manifests reproduce the whole run set).
fn canonical_text(
    values: &BTreeMap<String, BTreeMap<String, String>>,
    figure_id: Option<&str>,
    sweep: &[(String, Vec<String>)],
) -> String {
    let mut out = String::new();
    for section in [
        "params", "grid", "pump", "coupling", "inverse", "spectrum", "outputs",
    ] {
        if let Some(map) = values.get(section) {
            out.push_str(&format!("[{section}]\n"));
            for (k, v) in map {
                out.push_str(&format!("{k} = {v}\n"));
            }
            out.push('\n');
        }
    }
    if let Some(id) = figure_id {
        out.push_str(&format!("[figure]\nid = {id}\n\n"));
    }
    if !sweep.is_empty() {
        out.push_str("[sweep]\n");
        for (k, vals) in sweep {
            out.push_str(&format!("{k} = {}\n", vals.join(",")));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forward_doc(extra: &str) -> String {
        format!(
            "[params]\nrabi_R = 2\n\n[grid]\nt_end = 20\n\n\
             [pump]\nfamily = gaussian\namplitude = 1\ncenter = 10\nwidth = 3\n\n\
             [coupling]\nfamily = constant\namplitude = 1\n{extra}"
        )
    }

    #[test]
    fn minimal_forward_config_gets_defaults() {
        let doc = Document::parse(&forward_doc("")).unwrap();
        let plan = Plan::from_document(Mode::Forward, &doc, Path::new(".")).unwrap();
        let run = plan.resolve(&[]).unwrap();
        assert_eq!(run.grid.dt(), 1e-3);
        assert_eq!(run.params.gamma_rad_ratio, 0.9);
        assert_eq!(run.params.delta_k, 0.0);
    }

    #[test]
    fn unknown_key_is_a_hard_error() {
        let text = "[params]\nrabbi_R = 2\n\n[grid]\nt_end = 20\n";
        let doc = Document::parse(text).unwrap();
        let err = Plan::from_document(Mode::Forward, &doc, Path::new(".")).unwrap_err();
        assert!(err.message.contains("rabbi_R"), "{err}");
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn sweep_expansion_counts() {
        let text = forward_doc("\n[sweep]\npump.amplitude = 0.1,0.4,0.7,1.0,1.5\n");
        let doc = Document::parse(&text).unwrap();
        let plan = Plan::from_document(Mode::Sweep, &doc, Path::new(".")).unwrap();
        let combos = plan.expand();
        assert_eq!(combos.len(), 5);
        let run = plan.resolve(&combos[2]).unwrap();
        match run.pump.unwrap() {
            EnvelopeSource::Spec(PulseSpec::Gaussian { amplitude, .. }) => {
                assert_eq!(amplitude, 0.7)
            }
            other => panic!("unexpected source {other:?}"),
        }
    }

    #[test]
    fn empty_sweep_rejected() {
        let text = forward_doc("\n[sweep]\n");
        let doc = Document::parse(&text).unwrap();
        let err = Plan::from_document(Mode::Sweep, &doc, Path::new(".")).unwrap_err();
        assert!(err.message.contains("no axes"), "{err}");
    }

    #[test]
    fn line_numbers_in_parse_errors() {
        let err = Document::parse("[params\n").unwrap_err();
        assert_eq!(err.line, Some(1));
        let err = Document::parse("[a]\nx 3\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        let err = Document::parse("[a]\nx = 1\nx = 2\n").unwrap_err();
        assert_eq!(err.line, Some(3));
    }

    #[test]
    fn missing_csv_rejected_at_parse_time() {
        let text = "[params]\nrabi_R = 2\n\n[grid]\nt_end = 20\n\n\
                    [pump]\ncsv = does_not_exist.csv\n\n\
                    [coupling]\nfamily = constant\namplitude = 1\n";
        let doc = Document::parse(text).unwrap();
        let err = Plan::from_document(Mode::Forward, &doc, Path::new(".")).unwrap_err();
        assert!(err.message.contains("does_not_exist.csv"), "{err}");
    }

    #[test]
    fn range_violations_are_config_errors() {
        let text = "[params]\nrabi_R = 2\ngamma_rad_ratio = 1.2\n\n[grid]\nt_end = 20\n\n\
                    [pump]\nfamily = constant\namplitude = 1\n\n\
                    [coupling]\nfamily = constant\namplitude = 1\n";
        let doc = Document::parse(text).unwrap();
        let err = Plan::from_document(Mode::Forward, &doc, Path::new(".")).unwrap_err();
        assert!(err.message.contains("gamma_rad_ratio"), "{err}");
    }

    #[test]
    fn canonical_round_trip() {
        let text = forward_doc("\n[sweep]\nparams.rabi_R = 1,4,7\n");
        let doc = Document::parse(&text).unwrap();
        let plan = Plan::from_document(Mode::Sweep, &doc, Path::new(".")).unwrap();
        let run = plan.resolve(&[]).unwrap();
        // the canonical text parses back to an equivalent plan
        let doc2 = Document::parse(&run.canonical).unwrap();
        let plan2 = Plan::from_document(Mode::Sweep, &doc2, Path::new(".")).unwrap();
        let run2 = plan2.resolve(&[]).unwrap();
        assert_eq!(run.canonical, run2.canonical);
        assert_eq!(plan2.expand().len(), 3);
    }
}
