//! Experiment configuration: a TOML file, command-line overrides and
//! built-in defaults, in decreasing order of precedence.
//!
//! ```toml
//! [network]
//! lambda_b = 0.2
//! lambda_u = 0.02
//! alpha = 4.0
//!
//! [demand]
//! b = 10.0
//!
//! [costs]
//! c_b = 0.1
//! c_w = 0.1
//!
//! [sim]
//! trials = 20000
//! seed = 1
//! expected_bs = 500
//!
//! [quadrature]
//! abs_tol = 1e-10
//! rel_tol = 1e-10
//! tail_tol = 1e-10
//!
//! [optimizer]
//! grid_points = 81
//! starts = 4
//!
//! [sweep]
//! variable = "lambda_b"  # lambda_b | lambda_u | b
//! start = 0.02
//! stop = 20.0
//! points = 31
//! scale = "log"          # log | linear
//! # values = [0.1, 0.2, 1.0] replaces start/stop/points
//! alphas = [3.0, 4.0, 6.0]
//! ```

use std::fmt;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;
use udn_core::se::QuadratureConfig;

use crate::error::{CliError, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    network: NetworkBlock,
    #[serde(default)]
    demand: DemandBlock,
    #[serde(default)]
    costs: CostsBlock,
    #[serde(default)]
    sim: SimBlock,
    #[serde(default)]
    quadrature: QuadratureBlock,
    #[serde(default)]
    optimizer: OptimizerBlock,
    sweep: Option<SweepBlock>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkBlock {
    lambda_b: Option<Spanned<f64>>,
    lambda_u: Option<Spanned<f64>>,
    alpha: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DemandBlock {
    b: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostsBlock {
    c_b: Option<Spanned<f64>>,
    c_w: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimBlock {
    trials: Option<Spanned<i64>>,
    seed: Option<Spanned<i64>>,
    expected_bs: Option<Spanned<i64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureBlock {
    abs_tol: Option<Spanned<f64>>,
    rel_tol: Option<Spanned<f64>>,
    tail_tol: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizerBlock {
    grid_points: Option<Spanned<i64>>,
    starts: Option<Spanned<i64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepBlock {
    variable: Option<Spanned<String>>,
    start: Option<Spanned<f64>>,
    stop: Option<Spanned<f64>>,
    points: Option<Spanned<i64>>,
    scale: Option<Spanned<String>>,
    values: Option<Spanned<Vec<f64>>>,
    alphas: Option<Spanned<Vec<f64>>>,
}

/// Values given on the command line; `None` defers to the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lambda_b: Option<f64>,
    pub lambda_u: Option<f64>,
    pub alpha: Option<f64>,
    pub b: Option<f64>,
    pub c_b: Option<f64>,
    pub c_w: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    SeSweep,
    MonteCarlo,
    Optimize,
    Figures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVar {
    LambdaB,
    LambdaU,
    B,
}

impl SweepVar {
    pub fn key(self) -> &'static str {
        match self {
            SweepVar::LambdaB => "lambda_b",
            SweepVar::LambdaU => "lambda_u",
            SweepVar::B => "b",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "lambda_b" => Some(SweepVar::LambdaB),
            "lambda_u" => Some(SweepVar::LambdaU),
            "b" => Some(SweepVar::B),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVar,
    pub values: Vec<f64>,
}

impl Sweep {
    /// `points` values from `start` to `stop` inclusive.
    pub fn range(variable: SweepVar, start: f64, stop: f64, points: usize, log: bool) -> Self {
        let values = (0..points)
            .map(|i| {
                if points == 1 {
                    return start;
                }
                let f = i as f64 / (points - 1) as f64;
                if log {
                    (start.ln() + f * (stop.ln() - start.ln())).exp()
                } else {
                    start + f * (stop - start)
                }
            })
            .collect();
        Self { variable, values }
    }
}

/// Fully resolved, validated parameters for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub lambda_b: f64,
    pub lambda_u: f64,
    pub alpha: f64,
    pub b: f64,
    pub c_b: f64,
    pub c_w: f64,
    pub trials: u64,
    pub seed: u64,
    pub expected_bs: u32,
    pub quadrature: QuadratureConfig,
    pub grid_points: usize,
    pub starts: usize,
    pub sweep: Sweep,
    pub alphas: Vec<f64>,
}

impl Settings {
    /// Defaults and overrides only.
    pub fn from_overrides(kind: CommandKind, overrides: &Overrides) -> Result<Self> {
        Resolver::new(None, "").resolve(kind, &FileConfig::default(), overrides)
    }

    /// Parses `text` (read from `path`) and applies `overrides` on top.
    pub fn from_toml(kind: CommandKind, path: &Path, text: &str, overrides: &Overrides) -> Result<Self> {
        let file: FileConfig =
            toml::from_str(text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Resolver::new(Some(path), text).resolve(kind, &file, overrides)
    }

    pub fn load(kind: CommandKind, path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                Self::from_toml(kind, p, &text, overrides)
            }
            None => Self::from_overrides(kind, overrides),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Default,
    Flag,
    File { line: usize },
}

struct Val<T> {
    value: T,
    origin: Origin,
}

struct Resolver<'a> {
    path: Option<&'a Path>,
    text: &'a str,
}

impl<'a> Resolver<'a> {
    fn new(path: Option<&'a Path>, text: &'a str) -> Self {
        Self { path, text }
    }

    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn pick<T: Clone>(&self, flag: Option<T>, file: &Option<Spanned<T>>, default: T) -> Val<T> {
        if let Some(value) = flag {
            return Val {
                value,
                origin: Origin::Flag,
            };
        }
        match file {
            Some(s) => Val {
                value: s.get_ref().clone(),
                origin: Origin::File {
                    line: self.line(s.span()),
                },
            },
            None => Val {
                value: default,
                origin: Origin::Default,
            },
        }
    }

    fn fail(&self, origin: Origin, key: &str, value: impl fmt::Display, why: &str) -> CliError {
        let place = match (origin, self.path) {
            (Origin::File { line }, Some(p)) => format!("{}:{line}", p.display()),
            (Origin::File { line }, None) => format!("line {line}"),
            (Origin::Flag, _) => "command line".to_owned(),
            (Origin::Default, _) => "default".to_owned(),
        };
        CliError::Validation(format!("{place}: {key} = {value}: {why}"))
    }

    fn positive(&self, v: &Val<f64>, key: &str) -> Result<f64> {
        if v.value > 0.0 && v.value.is_finite() {
            Ok(v.value)
        } else {
            Err(self.fail(v.origin, key, v.value, "must be positive and finite"))
        }
    }

    fn alpha(&self, value: f64, origin: Origin, key: &str) -> Result<f64> {
        if value > 2.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(self.fail(origin, key, value, "path-loss exponent must exceed 2"))
        }
    }

    fn count(&self, v: &Val<i64>, key: &str, min: i64, max: i64) -> Result<i64> {
        if (min..=max).contains(&v.value) {
            Ok(v.value)
        } else {
            Err(self.fail(v.origin, key, v.value, &format!("must lie in [{min}, {max}]")))
        }
    }

    fn resolve(&self, kind: CommandKind, f: &FileConfig, o: &Overrides) -> Result<Settings> {
        let lambda_b = self.positive(&self.pick(o.lambda_b, &f.network.lambda_b, 0.2), "network.lambda_b")?;
        let lambda_u = self.positive(&self.pick(o.lambda_u, &f.network.lambda_u, 0.02), "network.lambda_u")?;
        let a = self.pick(o.alpha, &f.network.alpha, 4.0);
        let alpha = self.alpha(a.value, a.origin, "network.alpha")?;
        let b = self.positive(&self.pick(o.b, &f.demand.b, 10.0), "demand.b")?;
        let c_b = self.positive(&self.pick(o.c_b, &f.costs.c_b, 0.1), "costs.c_b")?;
        let c_w = self.positive(&self.pick(o.c_w, &f.costs.c_w, 0.1), "costs.c_w")?;

        let as_i64 = |x: Option<u64>| x.map(|v| i64::try_from(v).unwrap_or(i64::MAX));
        let trials = self.count(
            &self.pick(as_i64(o.trials), &f.sim.trials, 20_000),
            "sim.trials",
            1,
            i64::MAX,
        )?;
        let seed = self.count(&self.pick(as_i64(o.seed), &f.sim.seed, 1), "sim.seed", 0, i64::MAX)?;
        let expected_bs = self.count(
            &self.pick(None, &f.sim.expected_bs, i64::from(udn_core::sim::DEFAULT_EXPECTED_BS)),
            "sim.expected_bs",
            1,
            i64::from(u32::MAX),
        )?;

        let defaults = QuadratureConfig::default();
        let quadrature = QuadratureConfig {
            abs_tol: self.positive(
                &self.pick(None, &f.quadrature.abs_tol, defaults.abs_tol),
                "quadrature.abs_tol",
            )?,
            rel_tol: self.positive(
                &self.pick(None, &f.quadrature.rel_tol, defaults.rel_tol),
                "quadrature.rel_tol",
            )?,
            tail_tol: self.positive(
                &self.pick(None, &f.quadrature.tail_tol, defaults.tail_tol),
                "quadrature.tail_tol",
            )?,
            ..defaults
        };
        let grid_points = self.count(
            &self.pick(None, &f.optimizer.grid_points, 81),
            "optimizer.grid_points",
            2,
            10_000,
        )?;
        let starts = self.count(&self.pick(None, &f.optimizer.starts, 4), "optimizer.starts", 1, 1_000)?;

        let sweep = self.sweep(kind, f.sweep.as_ref(), o, lambda_b)?;
        let alphas = match (o.alpha, f.sweep.as_ref().and_then(|s| s.alphas.as_ref())) {
            (Some(a), _) => vec![a],
            (None, Some(list)) => {
                let origin = Origin::File {
                    line: self.line(list.span()),
                };
                if list.get_ref().is_empty() {
                    return Err(CliError::Usage(format!(
                        "{}: sweep.alphas is empty; give at least one path-loss exponent",
                        self.path.map_or("config".into(), |p| p.display().to_string())
                    )));
                }
                list.get_ref()
                    .iter()
                    .map(|&a| self.alpha(a, origin, "sweep.alphas"))
                    .collect::<Result<_>>()?
            }
            (None, None) if kind == CommandKind::SeSweep => vec![3.0, 4.0, 6.0],
            (None, None) => vec![alpha],
        };

        Ok(Settings {
            lambda_b,
            lambda_u,
            alpha,
            b,
            c_b,
            c_w,
            trials: trials as u64,
            seed: seed as u64,
            expected_bs: expected_bs as u32,
            quadrature,
            grid_points: grid_points as usize,
            starts: starts as usize,
            sweep,
            alphas,
        })
    }

    fn sweep(&self, kind: CommandKind, block: Option<&SweepBlock>, o: &Overrides, lambda_b: f64) -> Result<Sweep> {
        let (default_var, allowed): (SweepVar, &[SweepVar]) = match kind {
            CommandKind::SeSweep | CommandKind::MonteCarlo | CommandKind::Figures => {
                (SweepVar::LambdaB, &[SweepVar::LambdaB])
            }
            CommandKind::Optimize => (SweepVar::LambdaU, &[SweepVar::LambdaU, SweepVar::B]),
        };
        let variable = match block.and_then(|s| s.variable.as_ref()) {
            Some(v) => {
                let origin = Origin::File {
                    line: self.line(v.span()),
                };
                match SweepVar::parse(v.get_ref()) {
                    Some(var) if allowed.contains(&var) => var,
                    _ => {
                        let names: Vec<_> = allowed.iter().map(|a| a.key()).collect();
                        return Err(self.fail(
                            origin,
                            "sweep.variable",
                            v.get_ref(),
                            &format!("expected one of {names:?}"),
                        ));
                    }
                }
            }
            None => default_var,
        };
        let flag = match variable {
            SweepVar::LambdaB => o.lambda_b,
            SweepVar::LambdaU => o.lambda_u,
            SweepVar::B => o.b,
        };
        if let Some(v) = flag {
            return Ok(Sweep {
                variable,
                values: vec![v],
            });
        }
        let (start, stop, points) = match (kind, variable) {
            (CommandKind::MonteCarlo, _) => (lambda_b, lambda_b, 1),
            (_, SweepVar::LambdaB) => (0.02, 20.0, 31),
            (_, SweepVar::LambdaU) => (0.1, 10.0, 21),
            (_, SweepVar::B) => (1.0, 100.0, 21),
        };
        let key = format!("sweep ({})", variable.key());
        let Some(block) = block else {
            return Ok(Sweep::range(variable, start, stop, points, true));
        };
        if let Some(values) = &block.values {
            let origin = Origin::File {
                line: self.line(values.span()),
            };
            if values.get_ref().is_empty() {
                return Err(self.fail(origin, "sweep.values", "[]", "range is empty"));
            }
            for &v in values.get_ref() {
                self.positive(&Val { value: v, origin }, &key)?;
            }
            return Ok(Sweep {
                variable,
                values: values.get_ref().clone(),
            });
        }
        let start = self.positive(&self.pick(None, &block.start, start), "sweep.start")?;
        let stop = self.positive(&self.pick(None, &block.stop, stop), "sweep.stop")?;
        let points = self.count(
            &self.pick(None, &block.points, points as i64),
            "sweep.points",
            1,
            100_000,
        )?;
        let scale = self.pick(None, &block.scale, "log".to_owned());
        let log = match scale.value.as_str() {
            "log" => true,
            "linear" => false,
            other => return Err(self.fail(scale.origin, "sweep.scale", other, "expected \"log\" or \"linear\"")),
        };
        Ok(Sweep::range(variable, start, stop, points as usize, log))
    }
}
