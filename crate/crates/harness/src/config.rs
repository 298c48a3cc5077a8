//! Run configuration: flat `key = value` files, presets and flag overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemId {
    HeavyTopBody,
    HeavyTopSpatial,
    HeavyTopLiePoisson,
    HeavyTopExt,
    Pendulum,
    Quadrotor,
}

impl SystemId {
    pub const NAMES: &'static [&'static str] = &[
        "heavytop-body",
        "heavytop-spatial",
        "heavytop-lp",
        "heavytop-ext",
        "pendulum",
        "quadrotor",
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::HeavyTopBody => "heavytop-body",
            SystemId::HeavyTopSpatial => "heavytop-spatial",
            SystemId::HeavyTopLiePoisson => "heavytop-lp",
            SystemId::HeavyTopExt => "heavytop-ext",
            SystemId::Pendulum => "pendulum",
            SystemId::Quadrotor => "quadrotor",
        }
    }

    pub fn is_heavy_top(self) -> bool {
        !matches!(self, SystemId::Pendulum | SystemId::Quadrotor)
    }
}

impl FromStr for SystemId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "heavytop-body" => SystemId::HeavyTopBody,
            "heavytop-spatial" => SystemId::HeavyTopSpatial,
            "heavytop-lp" => SystemId::HeavyTopLiePoisson,
            "heavytop-ext" => SystemId::HeavyTopExt,
            "pendulum" => SystemId::Pendulum,
            "quadrotor" => SystemId::Quadrotor,
            other => bail!(
                "unknown system `{other}` (expected one of {})",
                Self::NAMES.join(", ")
            ),
        })
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Fixed,
    Adaptive,
    Converge,
}

impl FromStr for Mode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fixed" => Mode::Fixed,
            "adaptive" => Mode::Adaptive,
            "converge" => Mode::Converge,
            other => bail!("unknown mode `{other}` (expected fixed, adaptive or converge)"),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fixed => "fixed",
            Mode::Adaptive => "adaptive",
            Mode::Converge => "converge",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlsId {
    None,
    Hover,
}

/// Physical parameter overrides. Unset fields keep the system defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub mass: Option<f64>,
    pub length: Option<f64>,
    pub gravity: Option<f64>,
    pub inertia: Option<[f64; 3]>,
    pub links: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: Option<SystemId>,
    /// A scheme name or `symplectic`. Converge mode accepts a list, and a
    /// `:aux` suffix selects the auxiliary solution of an embedded pair.
    pub methods: Vec<String>,
    pub mode: Mode,
    pub t0: f64,
    pub t_end: Option<f64>,
    pub h: Option<f64>,
    pub steps: Option<usize>,
    pub tol: f64,
    pub theta: f64,
    /// Controller safety factor.
    pub safety: f64,
    /// Controller exponent; `None` means `1/(1 + min(p, p̂))`.
    pub alpha: Option<f64>,
    pub h0: Option<f64>,
    pub n0: Option<usize>,
    pub levels: (u32, u32),
    pub controls: ControlsId,
    pub overrides: Overrides,
    pub perturb: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub preset: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: None,
            methods: Vec::new(),
            mode: Mode::Fixed,
            t0: 0.0,
            t_end: None,
            h: None,
            steps: None,
            tol: 1e-6,
            theta: 0.5,
            safety: 0.9,
            alpha: None,
            h0: None,
            n0: None,
            levels: (4, 9),
            controls: ControlsId::None,
            overrides: Overrides::default(),
            perturb: 0.0,
            seed: 0,
            out: PathBuf::from("out"),
            preset: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "system", "method", "methods", "mode", "t0", "t_end", "h", "steps", "tol", "theta", "safety",
    "alpha", "h0", "n0", "levels", "controls", "mass", "length", "gravity", "inertia", "links",
    "perturb", "seed", "out", "preset",
];

pub const PRESETS: &[&str] = &["bruls-top", "pendulum-chain"];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| anyhow!("invalid value `{v}` for `{key}`: {e}"))
}

fn list(v: &str) -> Vec<String> {
    v.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "system" => self.system = Some(v.parse()?),
            "method" | "methods" => self.methods = list(v),
            "mode" => self.mode = v.parse()?,
            "t0" => self.t0 = num(key, v)?,
            "t_end" => self.t_end = Some(num(key, v)?),
            "h" => self.h = Some(num(key, v)?),
            "steps" => self.steps = Some(num(key, v)?),
            "tol" => self.tol = num(key, v)?,
            "theta" => self.theta = num(key, v)?,
            "safety" => self.safety = num(key, v)?,
            "alpha" => self.alpha = Some(num(key, v)?),
            "h0" => self.h0 = Some(num(key, v)?),
            "n0" => self.n0 = Some(num(key, v)?),
            "levels" => {
                let (a, b) = v
                    .split_once("..")
                    .ok_or_else(|| anyhow!("`levels` must look like `4..9`, got `{v}`"))?;
                self.levels = (num(key, a.trim())?, num(key, b.trim())?);
            }
            "controls" => {
                self.controls = match v {
                    "none" => ControlsId::None,
                    "hover" => ControlsId::Hover,
                    other => bail!("unknown controls `{other}` (expected none or hover)"),
                }
            }
            "mass" => self.overrides.mass = Some(num(key, v)?),
            "length" => self.overrides.length = Some(num(key, v)?),
            "gravity" => self.overrides.gravity = Some(num(key, v)?),
            "inertia" => {
                let parts = list(v);
                if parts.len() != 3 {
                    bail!("`inertia` needs three comma-separated values, got `{v}`");
                }
                let mut out = [0.0; 3];
                for (o, p) in out.iter_mut().zip(&parts) {
                    *o = num(key, p)?;
                }
                self.overrides.inertia = Some(out);
            }
            "links" => self.overrides.links = Some(num(key, v)?),
            "perturb" => self.perturb = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "preset" => self.apply_preset(v)?,
            other => bail!(
                "unknown key `{other}` (expected one of {})",
                KEYS.join(", ")
            ),
        }
        Ok(())
    }

    /// Presets fill in a whole problem; later keys still override them.
    pub fn apply_preset(&mut self, name: &str) -> Result<()> {
        match name {
            // Q(0) = I, ℓ = 2, M = 15, 𝕀 = diag(0.234375, 0.46875, 0.234375)
            "bruls-top" => {
                if !self.system.is_some_and(SystemId::is_heavy_top) {
                    self.system = Some(SystemId::HeavyTopSpatial);
                }
                self.overrides.mass = Some(15.0);
                self.overrides.length = Some(2.0);
                self.overrides.gravity = Some(1.0);
                self.overrides.inertia = Some([0.234375, 0.46875, 0.234375]);
                // 6000 steps of h = 0.01; order studies keep their own span
                if self.mode != Mode::Converge {
                    self.t_end.get_or_insert(60.0);
                }
            }
            "pendulum-chain" => {
                self.system = Some(SystemId::Pendulum);
                self.overrides.links = Some(2);
                self.overrides.mass = Some(1.0);
                self.overrides.length = Some(1.0);
                if self.mode != Mode::Converge {
                    self.t_end.get_or_insert(3.0);
                }
            }
            other => bail!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            ),
        }
        self.preset = Some(name.to_string());
        Ok(())
    }

    /// Applies a `key = value` document. Blank lines and `#` comments are
    /// skipped; every error names its line.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{line}`", i + 1))?;
            self.set(key.trim(), value)
                .with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    pub fn from_str_validated(text: &str, mode: Mode) -> Result<Self> {
        let mut c = RunConfig {
            mode,
            ..Default::default()
        };
        c.apply_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn system(&self) -> SystemId {
        self.system.expect("validated config has a system")
    }

    pub fn t_end(&self) -> f64 {
        self.t_end.expect("validated config has t_end")
    }

    /// Step count of a fixed-step run.
    pub fn n_steps(&self) -> usize {
        match (self.steps, self.h) {
            (Some(n), _) => n,
            (None, Some(h)) => ((self.t_end() - self.t0) / h).round() as usize,
            (None, None) => unreachable!("validated fixed-mode config has h or steps"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let system = self.system.ok_or_else(|| anyhow!("no system given"))?;
        // order studies fall back to the span of their ladder plan
        let t_end = match (self.t_end, self.mode) {
            (Some(t), _) => t,
            (None, Mode::Converge) => f64::INFINITY,
            (None, _) => bail!("no end time `t_end` given"),
        };
        if !(t_end > self.t0) {
            bail!("t_end = {t_end} must exceed t0 = {}", self.t0);
        }
        if self.methods.is_empty() {
            bail!("no method given");
        }
        if self.mode != Mode::Converge && self.methods.len() > 1 {
            bail!(
                "{} mode takes a single method, got {}",
                self.mode,
                self.methods.join(", ")
            );
        }
        for m in &self.methods {
            let base = m.strip_suffix(":aux").unwrap_or(m);
            if base == "symplectic" {
                if !matches!(system, SystemId::HeavyTopSpatial | SystemId::HeavyTopExt) {
                    bail!("the symplectic method needs heavytop-spatial or heavytop-ext, not {system}");
                }
                if self.mode == Mode::Adaptive {
                    bail!("the symplectic method has no error estimate for adaptive runs");
                }
                if base != m {
                    bail!("the symplectic method has no auxiliary solution");
                }
            } else {
                let s = lgi_core::integrators::Scheme::from_name(base)?;
                if (self.mode == Mode::Adaptive || base != m) && s.embedded_order().is_none() {
                    bail!("method `{base}` has no embedded pair");
                }
            }
        }
        if !(0.0..=1.0).contains(&self.theta) {
            bail!("theta must lie in [0, 1], got {}", self.theta);
        }
        if !(self.tol > 0.0) {
            bail!("tol must be positive, got {}", self.tol);
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            bail!("safety must lie in (0, 1), got {}", self.safety);
        }
        if self.levels.0 > self.levels.1 || self.levels.1 > 20 {
            bail!(
                "levels {}..{} must be increasing and at most 20",
                self.levels.0,
                self.levels.1
            );
        }
        if !(self.perturb >= 0.0) {
            bail!("perturb must be non-negative");
        }
        if self.mode == Mode::Fixed {
            match (self.h, self.steps) {
                (Some(_), Some(_)) => bail!("give either h or steps, not both"),
                (None, None) => bail!("fixed mode needs h or steps"),
                (Some(h), None) => {
                    if !(h > 0.0) {
                        bail!("h must be positive, got {h}");
                    }
                    let span = t_end - self.t0;
                    let n = (span / h).round();
                    if n < 1.0 || (n * h - span).abs() > 1e-9 * span {
                        bail!(
                            "h = {h} does not divide [{}, {t_end}] into whole steps",
                            self.t0
                        );
                    }
                }
                (None, Some(0)) => bail!("steps must be at least 1"),
                _ => {}
            }
        } else if self.h.is_some() && self.steps.is_some() {
            bail!("give either h or steps, not both");
        }
        if system == SystemId::Pendulum && self.overrides.links == Some(0) {
            bail!("a pendulum needs at least one link");
        }
        Ok(())
    }

    /// The configuration echo written as CSV metadata.
    pub fn echo(&self) -> Vec<String> {
        let mut out = vec![
            format!("system = {}", self.system.map(|s| s.name()).unwrap_or("")),
            format!("method = {}", self.methods.join(", ")),
            format!("mode = {}", self.mode),
            format!("t0 = {}", self.t0),
        ];
        if let Some(t) = self.t_end {
            out.push(format!("t_end = {t}"));
        }
        if let Some(h) = self.h {
            out.push(format!("h = {h}"));
        }
        if let Some(n) = self.steps {
            out.push(format!("steps = {n}"));
        }
        out.push(format!("tol = {}", self.tol));
        out.push(format!("theta = {}", self.theta));
        out.push(format!("safety = {}", self.safety));
        if let Some(a) = self.alpha {
            out.push(format!("alpha = {a}"));
        }
        if let Some(h0) = self.h0 {
            out.push(format!("h0 = {h0}"));
        }
        if let Some(n0) = self.n0 {
            out.push(format!("n0 = {n0}"));
        }
        out.push(format!("levels = {}..{}", self.levels.0, self.levels.1));
        out.push(format!(
            "controls = {}",
            match self.controls {
                ControlsId::None => "none",
                ControlsId::Hover => "hover",
            }
        ));
        let o = &self.overrides;
        if let Some(v) = o.mass {
            out.push(format!("mass = {v}"));
        }
        if let Some(v) = o.length {
            out.push(format!("length = {v}"));
        }
        if let Some(v) = o.gravity {
            out.push(format!("gravity = {v}"));
        }
        if let Some([a, b, c]) = o.inertia {
            out.push(format!("inertia = {a}, {b}, {c}"));
        }
        if let Some(v) = o.links {
            out.push(format!("links = {v}"));
        }
        out.push(format!("perturb = {}", self.perturb));
        out.push(format!("seed = {}", self.seed));
        if let Some(p) = &self.preset {
            out.push(format!("preset = {p}"));
        }
        out
    }
}
