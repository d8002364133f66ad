//! `pks`: simulate, render and verify Poisson-Kirchhoff systems.
//!
//! Exit codes: 0 success, 1 a verification verdict failed, 2 usage, config or
//! input error.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use config::{Model, RunConfig};
use pks_core::catalog::{self, check_kernels, check_rates, ENTRIES};
use pks_core::drawing::{deserialize, render_svg, serialize, RenderMode, SvgStyle};
use pks_core::dynamics::{simulate_with, SimulationOptions};
use pks_core::statistics::{
    evaluate_cross_section, evaluate_exits, evaluate_face_limits, evaluate_mean_counts,
    evaluate_reversibility, reports_to_json, reports_to_text, summarize, EnsembleConfig, Needs,
    Section, StatReport,
};
use pks_core::{Error, Result};

#[derive(Parser)]
#[command(name = "pks", version, about = "Poisson-Kirchhoff system simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate replicas and write one drawing document per replica.
    Simulate(RunArgs),
    /// Render a drawing document as SVG.
    Render {
        drawing: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Lines)]
        mode: Mode,
        /// Output file; defaults to the input with an .svg extension.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
    },
    /// Run a verification suite and report its verdicts.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Slope of the diagonal cross-section.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Use a staircase with this many steps instead of the diagonal.
        #[arg(long)]
        steps: Option<usize>,
        /// Kernel samples per total (kernels suite).
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Support points per measure (rates suite).
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Scales the vertical turn rate; anything but 1 simulates a wrong model.
        #[arg(long, default_value_t = 1.0)]
        vertical_turn_factor: f64,
    },
    /// List the preset catalog.
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Preset argument, e.g. `--arg pv=0.25`; repeatable.
    #[arg(long = "arg", value_name = "KEY=VALUE")]
    args: Vec<String>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lines,
    Potential,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Rates,
    Kernels,
    Exits,
    CrossSection,
    Reversibility,
    Means,
    Faces,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Rates => "rates",
            Suite::Kernels => "kernels",
            Suite::Exits => "exits",
            Suite::CrossSection => "cross-section",
            Suite::Reversibility => "reversibility",
            Suite::Means => "means",
            Suite::Faces => "faces",
        }
    }
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::parse(&fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.preset {
            cfg.preset = Some(p.clone());
        }
        for kv in &self.args {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("--arg expects KEY=VALUE, got '{kv}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("--arg {k}: '{v}' is not a number")))?;
            cfg.preset_args.insert(k.trim().to_string(), v);
        }
        cfg.a = self.a.unwrap_or(cfg.a);
        cfg.b = self.b.unwrap_or(cfg.b);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.replicas = self.replicas.unwrap_or(cfg.replicas);
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if cfg.replicas == 0 {
            return Err(Error::Parameter("replicas must be at least 1".into()));
        }
        Ok(cfg)
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn simulate(run: &RunArgs) -> Result<()> {
    let cfg = run.config()?;
    let model = cfg.model()?;
    let seed = cfg.seed();
    let docs = (0..cfg.replicas)
        .into_par_iter()
        .map(|i| {
            let d = simulate_with(model.params(), cfg.a, cfg.b, seed.replica(i as u64), &SimulationOptions::default())?;
            Ok(serialize(&d))
        })
        .collect::<Result<Vec<String>>>()?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    for (i, doc) in docs.iter().enumerate() {
        let path = dir.join(format!("drawing-{}-{i}.pks", cfg.seed));
        write(&path, doc)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn render(input: &Path, mode: Mode, output: Option<&Path>, width: f64) -> Result<()> {
    let d = deserialize(&fs::read_to_string(input)?)?;
    let style = SvgStyle {
        width,
        mode: match mode {
            Mode::Lines => RenderMode::Lines,
            Mode::Potential => RenderMode::Potential,
        },
        ..SvgStyle::default()
    };
    let svg = render_svg(&d, &style)?;
    let path = output.map_or_else(|| input.with_extension("svg"), Path::to_path_buf);
    write(&path, &svg)?;
    println!("{}", path.display());
    Ok(())
}

struct VerifyArgs {
    suite: Suite,
    alpha: f64,
    steps: Option<usize>,
    samples: usize,
    points: usize,
    vertical_turn_factor: f64,
}

fn preset_of(model: &Model, suite: Suite) -> Result<&catalog::ModelPreset> {
    match model {
        Model::Preset(p) => Ok(p),
        Model::Inline(_) => Err(Error::Parameter(format!(
            "suite {} compares against closed forms and needs a preset",
            suite.name()
        ))),
    }
}

fn verify(run: &RunArgs, v: &VerifyArgs) -> Result<bool> {
    let cfg = run.config()?;
    let model = cfg.model()?;
    let params = model.params();
    let mut ens = EnsembleConfig::new(cfg.a, cfg.b, cfg.replicas, cfg.seed());
    ens.levels = cfg.levels;
    ens.options.vertical_turn_factor = v.vertical_turn_factor;
    let simulated = |needs: Needs| summarize(params, &ens, &needs);
    let reports: Vec<StatReport> = match v.suite {
        Suite::Rates => check_rates(preset_of(&model, v.suite)?, v.points),
        Suite::Kernels => check_kernels(preset_of(&model, v.suite)?, v.samples, cfg.seed(), cfg.levels.level)?,
        Suite::Exits => evaluate_exits(params, &ens, &simulated(Needs { exits: true, ..Needs::default() })?),
        Suite::CrossSection => {
            let section = match v.steps {
                Some(steps) => Section::Staircase { steps },
                None => Section::Diagonal { alpha: v.alpha },
            };
            let reps = simulated(Needs { section: Some(section), ..Needs::default() })?;
            evaluate_cross_section(params, &ens, &reps)
        }
        Suite::Reversibility => {
            evaluate_reversibility(&ens, &simulated(Needs { reversibility: true, ..Needs::default() })?)
        }
        Suite::Means => evaluate_mean_counts(params, &ens, &simulated(Needs { faces: true, ..Needs::default() })?),
        Suite::Faces => evaluate_face_limits(params, &ens, &simulated(Needs { faces: true, ..Needs::default() })?),
    };
    if reports.is_empty() {
        return Err(Error::Precondition(format!(
            "suite {} has nothing to check for this model",
            v.suite.name()
        )));
    }
    let text = reports_to_text(v.suite.name(), &reports);
    print!("{text}");
    if let Some(dir) = &cfg.out {
        write(&dir.join(format!("report-{}.txt", v.suite.name())), &text)?;
        write(&dir.join(format!("report-{}.json", v.suite.name())), &reports_to_json(v.suite.name(), &reports))?;
    }
    Ok(reports.iter().all(StatReport::passed))
}

fn list_catalog(json: bool) {
    let mut out = String::new();
    if json {
        out = serde_json::to_string_pretty(ENTRIES).expect("catalog serializes");
        out.push('\n');
    } else {
        for e in ENTRIES {
            let _ = writeln!(out, "{}", e.name);
            let _ = writeln!(out, "  nu_V = {}, nu_H = {}", e.nu_v, e.nu_h);
            match e.out_of_scope {
                Some(why) => {
                    let _ = writeln!(out, "  out of scope: {why}");
                }
                None => {
                    let _ = writeln!(out, "  args: {}", e.args);
                    let _ = writeln!(out, "  vertical rate ratio: {}", e.vertical_rate);
                    let _ = writeln!(out, "  horizontal rate ratio: {}", e.horizontal_rate);
                    let _ = writeln!(out, "  kernel: {}", e.kernel);
                }
            }
        }
    }
    // a closed pipe (`pks catalog | head`) is not an error
    let _ = io::stdout().write_all(out.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Simulate(run) => simulate(run).map(|()| true),
        Command::Render {
            drawing,
            mode,
            output,
            width,
        } => render(drawing, *mode, output.as_deref(), *width).map(|()| true),
        Command::Verify {
            run,
            suite,
            alpha,
            steps,
            samples,
            points,
            vertical_turn_factor,
        } => verify(
            run,
            &VerifyArgs {
                suite: *suite,
                alpha: *alpha,
                steps: *steps,
                samples: *samples,
                points: *points,
                vertical_turn_factor: *vertical_turn_factor,
            },
        ),
        Command::Catalog { json } => {
            list_catalog(*json);
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("pks: {e}");
            ExitCode::from(2)
        }
    }
}
