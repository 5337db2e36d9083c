//! Case configuration files.
//!
//! Flat `key = value` lines grouped under `[section]` headers. `#` starts a
//! comment. A file starts from a template, either `domain.preset` or the
//! default case of `domain.kind`, and every other key overrides one field.
//!
//! | section    | keys |
//! |------------|------|
//! | `domain`   | `preset`, `kind` (`column1d`, `uniform2d`, `darcy2d`), `name`, `length`, `width`, `time` |
//! | `physics`  | `diffusion_x`, `diffusion_y`, `alpha`, `velocity_x`, `velocity_y`, `porosity`, `mu_phi`, `c0`, `initial_concentration`, `permeability` |
//! | `network`  | `hidden` (comma list), `activation`, `omega0` |
//! | `training` | `interior`, `boundary_initial`, `data`, `weight_ic`, `weight_bc`, `weight_data`, `weight_pde`, `memory`, `max_iters`, `tolerance`, `time_limit` (s), `warmup_steps`, `warmup_rate`, `parallel` |
//! | `bc`       | `left`, `right`, `bottom`, `top`, `pressure_left`, `pressure_right`, `pressure_bottom`, `pressure_top`, `anchors` |
//! | `output`   | `grid`, `snapshots` (comma list) |
//!
//! Face conditions are `zero-gradient`, `inlet` (the whole face) or
//! `inlet:a,b`. Permeability is `homogeneous:k`, `lobes`, `sine:k0,amp,waves`
//! or `raster:path` (relative to the config file). Anchors are
//! `x:y:p` triples separated by `;`.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use super::case::{lobed_permeability, preset, Anchor, CaseBundle, CaseKind, FaceCondition};
use crate::exec::ExecMode;
use crate::net::Activation;
use crate::oracles::Face;
use crate::physics::{AnalyticField, PermeabilityField, RasterField};
use crate::training::Warmup;
use crate::{Error, Result};

const SECTIONS: [&str; 6] = ["domain", "physics", "network", "training", "bc", "output"];

struct Line<'a> {
    number: usize,
    section: &'a str,
    key: &'a str,
    value: &'a str,
}

/// Reads and validates a configuration file.
pub fn parse_case_config(path: &Path) -> Result<CaseBundle> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_case_text(&text, path)
}

/// Parses configuration text; `path` names the source in errors and anchors
/// relative raster paths.
pub fn parse_case_text(text: &str, path: &Path) -> Result<CaseBundle> {
    let display = path.display().to_string();
    let err = |number: usize, message: String| Error::Parse { path: display.clone(), line: number, message };

    let mut lines = Vec::new();
    let mut section: Option<&str> = None;
    for (k, raw) in text.lines().enumerate() {
        let number = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(number, format!("malformed section header `{line}`")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(err(number, format!("unknown section `[{name}]`")));
            }
            section = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(number, format!("expected `key = value`, got `{line}`")))?;
        let section = section.ok_or_else(|| err(number, "key outside any section".into()))?;
        lines.push(Line { number, section, key: key.trim(), value: value.trim() });
    }

    let template = match (find(&lines, "domain", "preset"), find(&lines, "domain", "kind")) {
        (Some(p), _) => preset(p.value).map_err(|e| err(p.number, e.to_string()))?,
        (None, Some(k)) => {
            let name = match k.value {
                "column1d" => "case1",
                "uniform2d" => "case2-advection",
                "darcy2d" => "case3",
                other => return Err(err(k.number, format!("unknown kind `{other}`"))),
            };
            preset(name)?
        }
        (None, None) => return Err(err(1, "domain.preset or domain.kind is required".into())),
    };
    let mut b = template;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();

    for l in &lines {
        apply(&mut b, l, &base_dir).map_err(|m| err(l.number, m))?;
    }
    b.validate()?;
    Ok(b)
}

fn find<'a>(lines: &'a [Line<'a>], section: &str, key: &str) -> Option<&'a Line<'a>> {
    lines.iter().rev().find(|l| l.section == section && l.key == key)
}

fn num<T: FromStr>(l: &Line<'_>) -> std::result::Result<T, String> {
    l.value
        .parse()
        .map_err(|_| format!("{}.{}: cannot parse `{}`", l.section, l.key, l.value))
}

fn list(l: &Line<'_>) -> std::result::Result<Vec<f64>, String> {
    l.value
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| format!("{}.{}: bad number `{}`", l.section, l.key, s.trim())))
        .collect()
}

fn face_condition(value: &str, extent: f64) -> std::result::Result<FaceCondition, String> {
    match value {
        "zero-gradient" | "neumann" => Ok(FaceCondition::ZeroGradient),
        "inlet" => Ok(FaceCondition::Inlet { from: 0.0, to: extent }),
        v => {
            let range = v
                .strip_prefix("inlet:")
                .ok_or_else(|| format!("unknown face condition `{v}`"))?;
            let (a, b) = range.split_once(',').ok_or("inlet interval needs `a,b`")?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad interval bound `{s}`"));
            Ok(FaceCondition::Inlet { from: parse(a)?, to: parse(b)? })
        }
    }
}

fn permeability(value: &str, base: &Path) -> std::result::Result<PermeabilityField, String> {
    let (kind, arg) = value.split_once(':').unwrap_or((value, ""));
    let nums = || -> std::result::Result<Vec<f64>, String> {
        arg.split(',').map(|s| s.trim().parse().map_err(|_| format!("bad number `{s}`"))).collect()
    };
    match kind {
        "homogeneous" => match nums()?.as_slice() {
            [k] => Ok(PermeabilityField::Homogeneous { k: *k }),
            _ => Err("homogeneous permeability needs one value".into()),
        },
        "lobes" => Ok(lobed_permeability()),
        "sine" => match nums()?.as_slice() {
            [k0, amplitude, waves] => Ok(PermeabilityField::Analytic(AnalyticField::SineX {
                k0: *k0,
                amplitude: *amplitude,
                waves: *waves,
            })),
            _ => Err("sine permeability needs `k0,amplitude,waves`".into()),
        },
        "raster" => {
            let p = PathBuf::from(arg);
            let p = if p.is_relative() { base.join(p) } else { p };
            RasterField::read(&p).map(PermeabilityField::Raster).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown permeability `{other}`")),
    }
}

fn apply(b: &mut CaseBundle, l: &Line<'_>, base: &Path) -> std::result::Result<(), String> {
    let c = &mut b.case;
    let t = &mut b.training;
    match (l.section, l.key) {
        ("domain", "preset" | "kind") => {}
        ("domain", "name") => c.name = l.value.to_string(),
        ("domain", "length") => c.length = num(l)?,
        ("domain", "width") => c.width = num(l)?,
        ("domain", "time") => c.horizon = num(l)?,

        ("physics", "diffusion_x") => c.transport.diffusion_x = num(l)?,
        ("physics", "diffusion_y") => c.transport.diffusion_y = num(l)?,
        ("physics", "alpha") => c.transport.alpha = num(l)?,
        ("physics", "velocity_x" | "velocity_y") => {
            if c.kind == CaseKind::Darcy2D {
                return Err("velocity follows from Darcy's law in darcy2d cases".into());
            }
            let v = c.transport.velocity.get_or_insert([0.0, 0.0]);
            v[usize::from(l.key == "velocity_y")] = num(l)?;
        }
        ("physics", "porosity") => c.transport.porosity = num(l)?,
        ("physics", "mu_phi") => c.transport.mu_phi = num(l)?,
        ("physics", "c0") => c.transport.c0 = num(l)?,
        ("physics", "initial_concentration") => c.initial_concentration = num(l)?,
        ("physics", "permeability") => c.permeability = Some(permeability(l.value, base)?),

        ("network", "hidden") => {
            b.network.hidden_widths = l
                .value
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| format!("network.hidden: bad width `{}`", s.trim())))
                .collect::<std::result::Result<_, _>>()?;
        }
        ("network", "activation") => {
            b.network.activation = Activation::from_str(l.value).map_err(|e| e.to_string())?
        }
        ("network", "omega0") => b.network.first_layer_frequency = num(l)?,

        ("training", "interior") => t.budget.interior = num(l)?,
        ("training", "boundary_initial") => t.budget.boundary_initial = num(l)?,
        ("training", "data") => t.budget.data = num(l)?,
        ("training", "weight_ic") => t.weights.initial = num(l)?,
        ("training", "weight_bc") => t.weights.boundary = num(l)?,
        ("training", "weight_data") => t.weights.data = num(l)?,
        ("training", "weight_pde") => t.weights.pde = num(l)?,
        ("training", "memory") => t.lbfgs.memory = num(l)?,
        ("training", "max_iters") => t.lbfgs.max_iters = num(l)?,
        ("training", "tolerance") => t.lbfgs.tolerance = num(l)?,
        ("training", "time_limit") => {
            let s: f64 = num(l)?;
            if !(s > 0.0 && s.is_finite()) {
                return Err("training.time_limit must be a positive number of seconds".into());
            }
            t.lbfgs.time_limit = Some(Duration::from_secs_f64(s));
        }
        ("training", "warmup_steps") => {
            let steps = num(l)?;
            t.warmup = Some(Warmup { steps, ..t.warmup.unwrap_or_default() });
        }
        ("training", "warmup_rate") => {
            let learning_rate = num(l)?;
            t.warmup = Some(Warmup { learning_rate, ..t.warmup.unwrap_or_default() });
        }
        ("training", "parallel") => {
            t.mode = if num::<bool>(l)? { ExecMode::Parallel } else { ExecMode::Sequential }
        }

        ("bc", face @ ("left" | "right" | "bottom" | "top")) => {
            let f = face_from_name(face);
            let cond = face_condition(l.value, c.face_extent(f))?;
            c.concentration_bc.set(f, cond);
        }
        ("bc", key) if key.starts_with("pressure_") => {
            let f = match &key["pressure_".len()..] {
                name @ ("left" | "right" | "bottom" | "top") => face_from_name(name),
                _ => return Err(format!("unknown key `bc.{key}`")),
            };
            let v: f64 = num(l)?;
            let bc = c.pressure_bc.get_or_insert_with(|| super::case::FaceSet::uniform(0.0));
            bc.set(f, v);
        }
        ("bc", "anchors") => {
            c.anchors = l
                .value
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    let v: Vec<f64> = s
                        .split(':')
                        .map(|p| p.trim().parse().map_err(|_| format!("bad anchor `{}`", s.trim())))
                        .collect::<std::result::Result<_, _>>()?;
                    match v.as_slice() {
                        [x, y, p] => Ok(Anchor { x: *x, y: *y, pressure: *p }),
                        _ => Err(format!("anchor `{}` must be x:y:p", s.trim())),
                    }
                })
                .collect::<std::result::Result<_, _>>()?;
        }

        ("output", "grid") => c.grid = num(l)?,
        ("output", "snapshots") => c.snapshots = list(l)?,

        (section, key) => return Err(format!("unknown key `{section}.{key}`")),
    }
    Ok(())
}

fn face_from_name(name: &str) -> Face {
    match name {
        "left" => Face::Left,
        "right" => Face::Right,
        "bottom" => Face::Bottom,
        _ => Face::Top,
    }
}
