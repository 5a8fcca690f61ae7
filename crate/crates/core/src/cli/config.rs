use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::channels::{friedrichs_bc, rotation_bc_on, ChannelId, ChannelSet, ExtensionBC};
use crate::error::{Error, Result};
use crate::models::ModelSpec;

/// Output format of every subcommand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Contents of a `--config` file. Every field is optional; command-line
/// flags win over the file, the file wins over built-in defaults.
///
/// ```toml
/// [model]
/// type = "truncated_cone"
/// angle = 12.566370614359172
/// radius = 1.0
///
/// [bc]
/// preset = "half"
///
/// [lambda]
/// values = [-1.0, -2.0]
/// max = 1e5
///
/// [output]
/// format = "csv"
/// jobs = 4
///
/// [tolerance]
/// check = 1e-8
/// ```
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelSpec>,
    pub bc: Option<BcConfig>,
    pub lambda: Option<LambdaConfig>,
    pub output: Option<OutputConfig>,
    pub tolerance: Option<ToleranceConfig>,
}

/// A named preset or an explicit `(P, Q)` pair in the `{"n", "P", "Q"}` layout.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BcConfig {
    Preset { preset: String },
    Explicit(ExtensionBC),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaConfig {
    pub values: Option<Vec<f64>>,
    pub grid: Option<GridConfig>,
    /// Eigenvalue cutoff for spectral computations.
    pub max: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub check: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

impl GridConfig {
    pub fn points(&self) -> Result<Vec<f64>> {
        let n = self.count;
        if n == 0 {
            return Ok(Vec::new());
        }
        if n == 1 {
            return Ok(vec![self.start]);
        }
        if self.log {
            if self.start * self.end <= 0.0 {
                return Err(Error::Config(
                    "a log grid needs endpoints of one sign".into(),
                ));
            }
            let (a, b) = (self.start.abs().ln(), self.end.abs().ln());
            let sign = self.start.signum();
            return Ok((0..n)
                .map(|i| sign * (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect());
        }
        Ok((0..n)
            .map(|i| self.start + (self.end - self.start) * i as f64 / (n - 1) as f64)
            .collect())
    }
}

/// Reads `1.5`, `4pi`, `-pi/2`, `3*pi/4`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t: String = s
        .trim()
        .chars()
        .filter(|c| *c != '*' && *c != ' ')
        .collect();
    let bad = || Error::Config(format!("cannot read a number from {s:?}"));
    let Some(i) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let coef = match &t[..i] {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match &t[i + 2..] {
        "" => 1.0,
        rest => rest
            .strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    Ok(coef * PI / den)
}

/// `start:end:count` or `start:end:count:log`.
pub fn parse_grid(s: &str) -> Result<GridConfig> {
    let f: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&f.len()) {
        return Err(Error::Config(format!(
            "grid {s:?} is not start:end:count[:log]"
        )));
    }
    let log = match f.get(3) {
        None => false,
        Some(&"log") => true,
        Some(x) => return Err(Error::Config(format!("unknown grid spacing {x:?}"))),
    };
    Ok(GridConfig {
        start: parse_real(f[0])?,
        end: parse_real(f[1])?,
        count: f[2]
            .parse()
            .map_err(|_| Error::Config(format!("bad grid count {:?}", f[2])))?,
        log,
    })
}

fn split_params(s: &str) -> (&str, Vec<(&str, &str)>) {
    match s.split_once(':') {
        None => (s, Vec::new()),
        Some((name, rest)) => (
            name,
            rest.split(',')
                .filter(|p| !p.is_empty())
                .map(|p| p.split_once('=').unwrap_or((p, "")))
                .collect(),
        ),
    }
}

fn hexagon_points() -> Vec<[f64; 2]> {
    (0..6)
        .map(|k| {
            let a = PI * k as f64 / 3.0;
            [a.cos(), a.sin()]
        })
        .collect()
}

/// Model flags: `cone:angle=4pi`, `truncated-cone:angle=4pi,radius=1`,
/// `torus[:v1x=..,v1y=..,v2x=..,v2y=..]`, `sphere[:z1=re;im,…]`.
pub fn parse_model(s: &str) -> Result<ModelSpec> {
    let (name, params) = split_params(s);
    let get = |key: &str, default: Option<f64>| -> Result<f64> {
        match params.iter().find(|(k, _)| *k == key) {
            Some((_, v)) => parse_real(v),
            None => default.ok_or_else(|| Error::Config(format!("model {name:?} needs {key}="))),
        }
    };
    let spec = match name {
        "cone" => ModelSpec::Cone {
            angle: get("angle", None)?,
        },
        "truncated-cone" | "truncated_cone" => ModelSpec::TruncatedCone {
            angle: get("angle", None)?,
            radius: get("radius", Some(1.0))?,
        },
        "torus" => ModelSpec::Torus {
            v1: [get("v1x", Some(1.0))?, get("v1y", Some(0.0))?],
            v2: [get("v2x", Some(0.0))?, get("v2y", Some(1.0))?],
        },
        "sphere" => {
            let mut points = hexagon_points();
            for (k, v) in &params {
                let idx: usize = k
                    .strip_prefix('z')
                    .and_then(|i| i.parse().ok())
                    .filter(|i| (1..=6).contains(i))
                    .ok_or_else(|| Error::Config(format!("unknown sphere parameter {k:?}")))?;
                points[idx - 1] = parse_point(v)?;
            }
            ModelSpec::Sphere { points }
        }
        other => return Err(Error::Config(format!("unknown model {other:?}"))),
    };
    let known: &[&str] = match name {
        "cone" => &["angle"],
        "truncated-cone" | "truncated_cone" => &["angle", "radius"],
        "torus" => &["v1x", "v1y", "v2x", "v2y"],
        _ => &[],
    };
    if name != "sphere" {
        if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(k)) {
            return Err(Error::Config(format!(
                "unknown parameter {k:?} for model {name:?}"
            )));
        }
    }
    Ok(spec)
}

/// `re;im` or `re,im`.
pub fn parse_point(s: &str) -> Result<[f64; 2]> {
    let (a, b) = s
        .split_once(';')
        .or_else(|| s.split_once(','))
        .ok_or_else(|| Error::Config(format!("point {s:?} is not re;im")))?;
    Ok([parse_real(a)?, parse_real(b)?])
}

/// Boundary-condition presets, resolved against a channel set:
///
/// - `friedrichs`
/// - `half[:theta=..]`: angle θ (default π/2) on channel (point 0, k = 1)
/// - `log[:theta=..]`: angle θ (default π/2) on the log channel of point 0
/// - `hexagon[:theta=..]`: angle θ (default π/3) on (0, ±1)
/// - `rotation:P.K=θ,…`: angle θ on channel (point P, k = K)
/// - `@file.json`: explicit `{"n", "P", "Q"}`
pub fn resolve_bc(preset: &str, cs: &ChannelSet) -> Result<ExtensionBC> {
    if let Some(path) = preset.strip_prefix('@') {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
        return serde_json::from_str(&text).map_err(|e| Error::Config(format!("{path}: {e}")));
    }
    let (name, params) = split_params(preset);
    if name != "rotation" {
        if let Some((k, _)) = params
            .iter()
            .find(|(k, _)| *k != "theta" || name == "friedrichs")
        {
            return Err(Error::Config(format!(
                "unknown parameter {k:?} for bc {name:?}"
            )));
        }
    }
    let theta = |default: f64| -> Result<f64> {
        match params.iter().find(|(k, _)| *k == "theta") {
            Some((_, v)) => parse_real(v),
            None => Ok(default),
        }
    };
    let id = |point, k| ChannelId { point, k };
    match name {
        "friedrichs" => Ok(friedrichs_bc(cs)),
        "half" => rotation_bc_on(cs, &[(id(0, 1), theta(PI / 2.0)?)]),
        "log" => rotation_bc_on(cs, &[(id(0, 0), theta(PI / 2.0)?)]),
        "hexagon" => {
            let t = theta(PI / 3.0)?;
            rotation_bc_on(cs, &[(id(0, 1), t), (id(0, -1), t)])
        }
        "rotation" => {
            let mut angles = Vec::with_capacity(params.len());
            for (k, v) in &params {
                let (p, kk) = k
                    .split_once('.')
                    .ok_or_else(|| Error::Config(format!("channel {k:?} is not point.k")))?;
                let bad = || Error::Config(format!("bad channel {k:?}"));
                angles.push((
                    id(
                        p.parse().map_err(|_| bad())?,
                        kk.parse().map_err(|_| bad())?,
                    ),
                    parse_real(v)?,
                ));
            }
            rotation_bc_on(cs, &angles)
        }
        other => Err(Error::Config(format!("unknown bc preset {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals() {
        assert_eq!(parse_real("1.5").unwrap(), 1.5);
        assert!((parse_real("4pi").unwrap() - 4.0 * PI).abs() < 1e-15);
        assert!((parse_real("-pi/2").unwrap() + PI / 2.0).abs() < 1e-15);
        assert!((parse_real("3*pi/4").unwrap() - 0.75 * PI).abs() < 1e-15);
        assert!(parse_real("pie").is_err());
    }

    #[test]
    fn bc_presets_reject_unknown_parameters() {
        let cs = ChannelSet::new(&[4.0 * PI]).unwrap();
        assert!(resolve_bc("half:theta=1", &cs).is_ok());
        assert!(resolve_bc("half:1", &cs).is_err());
        assert!(resolve_bc("friedrichs:theta=1", &cs).is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("-100:-0.01:5:log").unwrap();
        let p = g.points().unwrap();
        assert_eq!(p.len(), 5);
        assert!((p[0] + 100.0).abs() < 1e-12 && (p[4] + 0.01).abs() < 1e-15);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("-1:1:3:log").unwrap().points().is_err());
    }

    #[test]
    fn models() {
        assert_eq!(
            parse_model("truncated-cone:angle=4pi").unwrap(),
            ModelSpec::TruncatedCone {
                angle: 4.0 * PI,
                radius: 1.0
            }
        );
        assert!(parse_model("torus:v3=1").is_err());
        match parse_model("sphere:z1=1.1;0").unwrap() {
            ModelSpec::Sphere { points } => assert_eq!(points[0], [1.1, 0.0]),
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn config_file() {
        let cfg = RunConfig::from_toml(
            "[model]\ntype = \"truncated_cone\"\nangle = 12.5\nradius = 1.0\n\
             [bc]\nn = 1\nP = [[0.0, 0.0]]\nQ = [[1.0, 0.0]]\n\
             [lambda]\ngrid = { start = -2.0, end = -1.0, count = 3 }\n",
        )
        .unwrap();
        assert!(matches!(cfg.bc, Some(BcConfig::Explicit(_))));
        assert_eq!(
            cfg.lambda.unwrap().grid.unwrap().points().unwrap(),
            vec![-2.0, -1.5, -1.0]
        );
        assert!(RunConfig::from_toml("[model]\ntype = \"blob\"\n").is_err());
        assert!(RunConfig::from_toml("[output]\ncolour = 1\n").is_err());
    }

    #[test]
    fn presets() {
        let cs = ChannelSet::new(&[4.0 * PI]).unwrap();
        let bc = resolve_bc("rotation:0.1=pi/2", &cs).unwrap();
        assert_eq!(bc, resolve_bc("half", &cs).unwrap());
        assert!(resolve_bc("rotation:0.5=1", &cs).is_err());
        assert!(resolve_bc("nope", &cs).is_err());
    }
}
