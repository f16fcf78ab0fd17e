//! Experiment configuration: file formats, flag overrides and fail-fast resolution.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use hfss_core::maps;
use hfss_core::selection::DEFAULT_DELTA;
use hfss_core::vec3::Vec3;
use hfss_core::{BallMesh, DirectorField, Scheme, SchemeConfig, SelectionConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliResult, Failure};

/// Stored snapshots per trajectory when no stride is given.
const TARGET_STORED: usize = 200;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DatumSpec {
    Constant {
        #[serde(default = "up")]
        direction: Vec3,
    },
    #[default]
    GreatCircle,
    Equator,
    Twisted,
    RandomSmooth {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Raw little-endian f64 triples, node-major, one per mesh node.
    CustomFile { path: PathBuf },
}

fn up() -> Vec3 {
    [0.0, 0.0, 1.0]
}

impl DatumSpec {
    /// `constant`, `great-circle`, `equator`, `twisted`, `random-smooth[:seed]`,
    /// `custom-file:<path>`.
    pub fn parse(s: &str) -> CliResult<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let bad = || Failure::Validation(format!("unknown datum '{s}'"));
        Ok(match (kind, arg) {
            ("constant", None) => DatumSpec::Constant { direction: up() },
            ("great-circle", None) => DatumSpec::GreatCircle,
            ("equator", None) => DatumSpec::Equator,
            ("twisted", None) => DatumSpec::Twisted,
            ("random-smooth", None) => DatumSpec::RandomSmooth { seed: None },
            ("random-smooth", Some(a)) => DatumSpec::RandomSmooth { seed: Some(a.parse().map_err(|_| bad())?) },
            ("custom-file", Some(p)) => DatumSpec::CustomFile { path: p.into() },
            _ => return Err(bad()),
        })
    }

    pub fn build(&self, mesh: &Arc<BallMesh>) -> CliResult<DirectorField> {
        let invalid = |e: hfss_core::Error| Failure::Validation(format!("initial datum: {e}"));
        match self {
            DatumSpec::Constant { direction } => maps::constant(mesh.clone(), *direction).map_err(invalid),
            DatumSpec::GreatCircle => maps::great_circle(mesh.clone()).map_err(invalid),
            DatumSpec::Equator => maps::equator(mesh.clone()).map_err(invalid),
            DatumSpec::Twisted => maps::twisted(mesh.clone()).map_err(invalid),
            DatumSpec::RandomSmooth { seed } => maps::random_smooth(mesh.clone(), seed.unwrap_or(0)).map_err(invalid),
            DatumSpec::CustomFile { path } => {
                let bytes = std::fs::read(path)
                    .map_err(|e| Failure::Validation(format!("datum file {}: {e}", path.display())))?;
                let values = crate::archive::decode_field(&bytes, mesh.node_count())
                    .ok_or_else(|| Failure::Validation(format!("datum file {} has the wrong length", path.display())))?;
                DirectorField::new(mesh.clone(), values).map_err(invalid)
            }
        }
    }
}

/// One scheme of the ensemble; time grid and storage come from the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeEntry {
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub damping: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger_tolerance: Option<f64>,
}

impl SchemeEntry {
    pub fn plain(scheme: Scheme) -> Self {
        Self { scheme, epsilon: None, damping: 0.0, gate_threshold: None, ledger_tolerance: None }
    }

    /// `<tag>[:key=value,...]` with keys `epsilon`, `damping`, `gate`, `ledger`.
    pub fn parse(s: &str) -> CliResult<Self> {
        let (tag, rest) = s.split_once(':').unwrap_or((s, ""));
        let scheme = Scheme::from_tag(tag).ok_or_else(|| Failure::Validation(format!("unknown scheme '{tag}'")))?;
        let mut entry = Self::plain(scheme);
        for kv in rest.split(',').filter(|t| !t.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Failure::Validation(format!("expected key=value in scheme option '{kv}'")))?;
            let x: f64 = v.parse().map_err(|_| Failure::Validation(format!("bad number '{v}' for {k}")))?;
            match k {
                "epsilon" => entry.epsilon = Some(x),
                "damping" => entry.damping = x,
                "gate" => entry.gate_threshold = Some(x),
                "ledger" => entry.ledger_tolerance = Some(x),
                _ => return Err(Failure::Validation(format!("unknown scheme option '{k}'"))),
            }
        }
        Ok(entry)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionSpec {
    /// The first enumeration drives selection; a second one is compared against it.
    pub enumerations: Vec<String>,
    pub delta: f64,
}

impl Default for SelectionSpec {
    fn default() -> Self {
        Self { enumerations: vec!["default".into()], delta: DEFAULT_DELTA }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    /// `h^2 / 7` when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub horizon: f64,
    /// Chosen to keep about 200 stored snapshots when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    pub dense_prefix: usize,
    pub seed: u64,
    pub datum: DatumSpec,
    pub schemes: Vec<SchemeEntry>,
    pub selection: SelectionSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 16,
            dt: None,
            horizon: 0.5,
            stride: None,
            dense_prefix: 16,
            seed: 0,
            datum: DatumSpec::default(),
            schemes: vec![SchemeEntry::plain(Scheme::ProjectionExplicit)],
            selection: SelectionSpec::default(),
            out: None,
        }
    }
}

/// Command-line overrides, applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub schemes: Vec<String>,
    pub datum: Option<String>,
    pub seed: Option<u64>,
    pub enumerations: Vec<String>,
    pub stride: Option<usize>,
    pub dense_prefix: Option<usize>,
}

impl ExperimentConfig {
    /// Reads JSON when the extension is `.json`, TOML otherwise.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Validation(format!("config {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| Failure::Validation(format!("config {}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
        if let Some(v) = o.n {
            self.n = v;
        }
        if let Some(v) = o.dt {
            self.dt = Some(v);
        }
        if let Some(v) = o.horizon {
            self.horizon = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.stride {
            self.stride = Some(v);
        }
        if let Some(v) = o.dense_prefix {
            self.dense_prefix = v;
        }
        if let Some(d) = &o.datum {
            self.datum = DatumSpec::parse(d)?;
        }
        if !o.schemes.is_empty() {
            self.schemes = o.schemes.iter().map(|s| SchemeEntry::parse(s)).collect::<CliResult<_>>()?;
        }
        if !o.enumerations.is_empty() {
            self.selection.enumerations = o.enumerations.clone();
        }
        Ok(())
    }

    /// Validates everything and builds the inputs before any flow runs.
    ///
    /// The returned config has every default made explicit, so echoing it is
    /// enough to rerun the experiment.
    pub fn resolve(mut self) -> CliResult<Resolved> {
        let mesh = Arc::new(BallMesh::new(self.n)?);
        let h = mesh.spacing();
        let dt = *self.dt.get_or_insert(h * h / 7.0);
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Failure::Validation(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Failure::Validation(format!("dt must be positive, got {dt}")));
        }
        let steps = (self.horizon / dt).round() as usize;
        let stride = *self.stride.get_or_insert(steps.div_ceil(TARGET_STORED).max(1));
        if self.schemes.is_empty() {
            return Err(Failure::Validation("at least one scheme is required".into()));
        }
        if self.selection.enumerations.is_empty() {
            self.selection.enumerations.push("default".into());
        }
        if self.selection.enumerations.len() > 2 {
            return Err(Failure::Validation("at most two enumerations can be compared".into()));
        }
        let seed = self.seed;
        for e in &mut self.selection.enumerations {
            *e = e
                .split(',')
                .map(|t| if t.trim() == "shuffle" { format!("shuffle:{seed}") } else { t.trim().to_string() })
                .collect::<Vec<_>>()
                .join(",");
        }
        if let DatumSpec::RandomSmooth { seed: s @ None } = &mut self.datum {
            *s = Some(seed);
        }

        let schemes: Vec<SchemeConfig> = self
            .schemes
            .iter_mut()
            .map(|e| {
                if e.scheme == Scheme::Penalized && e.epsilon.is_none() {
                    e.epsilon = Some(4.0 * h);
                }
                SchemeConfig {
                    epsilon: e.epsilon,
                    damping: e.damping,
                    gate_threshold: e.gate_threshold,
                    ledger_tolerance: e.ledger_tolerance,
                    ..SchemeConfig::new(e.scheme, dt, self.horizon).with_storage(stride, self.dense_prefix)
                }
            })
            .collect();
        for s in &schemes {
            s.validate(&mesh)?;
        }
        let datum = self.datum.build(&mesh)?;
        let mut selections = Vec::new();
        for e in &self.selection.enumerations {
            let mut sel = SelectionConfig::from_enumeration(&datum, e)?;
            sel.delta = self.selection.delta;
            sel.validate(None)?;
            selections.push(sel);
        }
        Ok(Resolved { config: self, mesh, datum, schemes, selections })
    }
}

pub struct Resolved {
    pub config: ExperimentConfig,
    pub mesh: Arc<BallMesh>,
    pub datum: DirectorField,
    pub schemes: Vec<SchemeConfig>,
    pub selections: Vec<SelectionConfig>,
}

impl Resolved {
    pub fn out(&self) -> CliResult<PathBuf> {
        self.config.out.clone().ok_or_else(|| Failure::Validation("an output directory is required (--out)".into()))
    }

    /// `λT >= 20` for every functional of every enumeration.
    pub fn validate_rates(&self) -> CliResult<()> {
        for s in &self.selections {
            s.validate(Some(self.config.horizon))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_options_parse() {
        let e = SchemeEntry::parse("penalized:epsilon=0.5").unwrap();
        assert_eq!(e.scheme, Scheme::Penalized);
        assert_eq!(e.epsilon, Some(0.5));
        let e = SchemeEntry::parse("ll:damping=1").unwrap();
        assert_eq!(e.scheme, Scheme::LandauLifshitz);
        assert_eq!(e.damping, 1.0);
        assert!(SchemeEntry::parse("euler").is_err());
        assert!(SchemeEntry::parse("penalized:eps").is_err());
    }

    #[test]
    fn datum_names_parse() {
        assert_eq!(DatumSpec::parse("equator").unwrap(), DatumSpec::Equator);
        assert_eq!(DatumSpec::parse("random-smooth:4").unwrap(), DatumSpec::RandomSmooth { seed: Some(4) });
        assert!(DatumSpec::parse("hedgehog").is_err());
        assert!(DatumSpec::parse("custom-file").is_err());
    }

    #[test]
    fn resolution_fills_defaults_and_round_trips() {
        let mut cfg =
            ExperimentConfig { datum: DatumSpec::RandomSmooth { seed: None }, seed: 11, ..Default::default() };
        cfg.schemes.push(SchemeEntry::plain(Scheme::Penalized));
        cfg.selection.enumerations = vec!["shuffle".into(), "aligned,shuffle:3".into()];
        let r = cfg.resolve().unwrap();
        assert!(r.config.dt.is_some() && r.config.stride.is_some());
        assert_eq!(r.config.datum, DatumSpec::RandomSmooth { seed: Some(11) });
        assert_eq!(r.config.selection.enumerations, vec!["shuffle:11", "aligned,shuffle:3"]);
        assert!(r.config.schemes[1].epsilon.is_some());
        let again = r.config.clone().resolve().unwrap();
        assert_eq!(again.config, r.config);
        assert_eq!(again.schemes, r.schemes);
        let text = toml::to_string(&r.config).unwrap();
        assert_eq!(toml::from_str::<ExperimentConfig>(&text).unwrap(), r.config);
    }

    #[test]
    fn unstable_dt_is_rejected_up_front() {
        let cfg = ExperimentConfig { dt: Some(1.0), ..Default::default() };
        assert!(matches!(cfg.resolve(), Err(Failure::Validation(_))));
    }
}
