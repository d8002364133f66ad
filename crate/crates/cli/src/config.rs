//! Run configuration: a flat `key = value` file with sections, overridden by
//! command-line flags.
//!
//! ```text
//! # comment
//! [run]
//! preset = normal          # or leave out and give [measures]
//! a = 50
//! b = 50
//! seed = 7
//! replicas = 400
//! out = runs
//!
//! [preset]                 # numeric preset arguments
//! pv = 0.4
//!
//! [measures]               # inline model, instead of a preset
//! nu_v = normal(0,1)
//! nu_h = normal(0,1)
//!
//! [functions]              # expressions in s; missing ones are 0
//! p_v = 0.4
//! p_h = 1{s>0} + 0.25*1{s==0}
//! q = 0.1
//! p0 = 0
//!
//! [levels]
//! level = 0.001
//! band = 3
//! face_tolerance = 0.1
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use pks_core::catalog::{self, ModelPreset, PresetArgs};
use pks_core::statistics::Levels;
use pks_core::{Error, Expr, IntensityMeasure, PksParams, Result, Seed};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub preset_args: PresetArgs,
    /// `[measures]` and `[functions]` entries, as written.
    pub inline: BTreeMap<String, String>,
    pub a: f64,
    pub b: f64,
    pub seed: u64,
    pub replicas: usize,
    /// Output directory; verify writes report files only when it is set.
    pub out: Option<PathBuf>,
    pub levels: Levels,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: None,
            preset_args: PresetArgs::new(),
            inline: BTreeMap::new(),
            a: 10.0,
            b: 10.0,
            seed: 0,
            replicas: 1,
            out: None,
            levels: Levels::default(),
        }
    }
}

/// The model a configuration describes.
pub enum Model {
    Preset(ModelPreset),
    Inline(PksParams),
}

impl Model {
    pub fn params(&self) -> &PksParams {
        match self {
            Model::Preset(p) => &p.params,
            Model::Inline(p) => p,
        }
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| parse_error(line, format!("{key}: '{value}' is not a valid number")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
                section = name.trim().to_string();
                if !matches!(section.as_str(), "run" | "preset" | "measures" | "functions" | "levels") {
                    return Err(parse_error(line, format!("unknown section [{section}]")));
                }
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| parse_error(line, format!("expected 'key = value', got '{body}'")))?;
            let (key, value) = (key.trim(), value.trim());
            match section.as_str() {
                "run" => cfg.set_run(line, key, value)?,
                "preset" => {
                    cfg.preset_args.insert(key.to_string(), number(line, key, value)?);
                }
                "measures" if matches!(key, "nu_v" | "nu_h") => {
                    cfg.inline.insert(key.to_string(), value.to_string());
                }
                "functions" if matches!(key, "p_v" | "p_h" | "q" | "p0") => {
                    cfg.inline.insert(key.to_string(), value.to_string());
                }
                "levels" => {
                    let v: f64 = number(line, key, value)?;
                    match key {
                        "level" => cfg.levels.level = v,
                        "band" => cfg.levels.band = v,
                        "face_tolerance" => cfg.levels.face_tolerance = v,
                        _ => return Err(parse_error(line, format!("unknown key '{key}' in [levels]"))),
                    }
                }
                "" => return Err(parse_error(line, "key outside of any section")),
                s => return Err(parse_error(line, format!("unknown key '{key}' in [{s}]"))),
            }
        }
        Ok(cfg)
    }

    fn set_run(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        match key {
            "preset" => self.preset = Some(value.to_string()),
            "a" => self.a = number(line, key, value)?,
            "b" => self.b = number(line, key, value)?,
            "seed" => self.seed = number(line, key, value)?,
            "replicas" => self.replicas = number(line, key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(parse_error(line, format!("unknown key '{key}' in [run]"))),
        }
        Ok(())
    }

    pub fn seed(&self) -> Seed {
        Seed::new(self.seed, 0)
    }

    /// Builds and validates the model.
    pub fn model(&self) -> Result<Model> {
        match (&self.preset, self.inline.is_empty()) {
            (Some(name), true) => Ok(Model::Preset(catalog::preset(name, &self.preset_args)?)),
            (None, false) => {
                if !self.preset_args.is_empty() {
                    return Err(Error::Parameter("preset arguments given without a preset".into()));
                }
                let measure = |key: &str| -> Result<IntensityMeasure> {
                    self.inline
                        .get(key)
                        .ok_or_else(|| Error::Parameter(format!("[measures] needs {key}")))?
                        .parse()
                };
                let function = |key: &str| -> Result<Expr> {
                    self.inline.get(key).map_or(Ok(Expr::zero()), |s| Expr::parse(s))
                };
                let p0 = match self.inline.get("p0") {
                    Some(v) => v
                        .parse()
                        .map_err(|_| Error::Parameter(format!("p0: '{v}' is not a valid number")))?,
                    None => 0.0,
                };
                let params = PksParams::new(
                    measure("nu_v")?,
                    measure("nu_h")?,
                    function("p_v")?,
                    function("p_h")?,
                    function("q")?,
                    p0,
                )?;
                params.check()?;
                Ok(Model::Inline(params))
            }
            (Some(_), false) => Err(Error::Parameter(
                "give either a preset or [measures]/[functions], not both".into(),
            )),
            (None, true) => Err(Error::Parameter("no model: give --preset or a config with [measures]".into())),
        }
    }
}
