use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{parse_point, resolve_bc, Format};
use super::output::{complex, float, to_value, Record, Table};
use super::Settings;
use crate::channels::{ChannelSet, ExtensionBC};
use crate::error::{Error, Result};
use crate::krein::{
    asymptotic_data, d_function, det_ratio, eigenvalue_trace_sum, secular_coupled,
    secular_spectrum, spectral_shift_sweep, trace_resolvent_diff,
};
use crate::models::{
    cone_s_matrix, sphere_s0_block, ModelSpec, SpectralModel, SpectrumList, SphereConfig,
};
use crate::relzeta::{
    relative_zeta, relative_zeta_at_zero, relative_zeta_extrapolated, relative_zeta_limit,
    DEFAULT_SHIFTS,
};

/// Rendered output of one command.
pub enum Output {
    Records(Vec<Record>),
    Table(Table),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Records(rs) => rs.iter().map(|r| r.to_json_line() + "\n").collect(),
            Output::Table(t) => t.render(),
        }
    }
}

fn model_and_bc(s: &Settings) -> Result<(ModelSpec, Box<dyn SpectralModel>, ExtensionBC)> {
    let spec = s
        .model
        .clone()
        .ok_or_else(|| Error::Config("--model is required".into()))?;
    let model = spec.build()?;
    let bc = match &s.bc {
        Some(super::BcSource::Preset(p)) => resolve_bc(p, model.channel_set())?,
        Some(super::BcSource::Explicit(bc)) => bc.clone(),
        None => return Err(Error::Config("--bc is required".into())),
    };
    Ok((spec, model, bc))
}

fn base_inputs(spec: &ModelSpec, bc: &ExtensionBC) -> Result<serde_json::Map<String, Value>> {
    let mut m = serde_json::Map::new();
    m.insert("model".into(), to_value(spec)?);
    m.insert("bc".into(), to_value(bc)?);
    Ok(m)
}

fn channel_labels(cs: &ChannelSet) -> Value {
    Value::Array(
        cs.channels()
            .iter()
            .map(|c| json!({"point": c.id.point, "k": c.id.k, "nu": c.nu}))
            .collect(),
    )
}

pub fn cone_smatrix(s: &Settings, angle: f64) -> Result<Output> {
    let cs = ChannelSet::new(&[angle])?;
    let rows: Vec<(f64, Vec<f64>)> = s
        .lambdas
        .par_iter()
        .map(|&l| {
            let m = cone_s_matrix(angle, l)?;
            Ok((l, (0..cs.len()).map(|i| m[(i, i)].re).collect()))
        })
        .collect::<Result<_>>()?;
    Ok(match s.format {
        Format::Csv => {
            let mut t = Table::new(&["lambda", "point", "k", "nu", "re", "im"]);
            for (l, diag) in &rows {
                for (c, v) in cs.channels().iter().zip(diag) {
                    t.push(vec![
                        float(*l),
                        c.id.point.to_string(),
                        c.id.k.to_string(),
                        float(c.nu),
                        float(*v),
                        float(0.0),
                    ]);
                }
            }
            Output::Table(t)
        }
        Format::Json => Output::Records(
            rows.into_iter()
                .map(|(l, diag)| {
                    Record::new(
                        "cone-smatrix",
                        json!({"angle": angle, "lambda": l, "channels": channel_labels(&cs)}),
                        Value::Array(
                            diag.iter()
                                .map(|&v| complex(Complex64::new(v, 0.0)))
                                .collect(),
                        ),
                        json!({"off_diagonal": 0.0}),
                    )
                })
                .collect(),
        ),
    })
}

pub fn spectrum(s: &Settings) -> Result<Output> {
    let (spec, model, bc) = model_and_bc(s)?;
    let max = s.max.unwrap_or(1e4);
    let sp = secular_spectrum(&bc, model.as_ref(), max)?;
    Ok(match s.format {
        Format::Csv => {
            let mut t = Table::new(&["eigenvalue", "multiplicity", "channel"]);
            for e in sp.laplacian.entries() {
                t.push(vec![
                    float(e.value),
                    e.multiplicity.to_string(),
                    e.sector.to_string(),
                ]);
            }
            Output::Table(t)
        }
        Format::Json => {
            let mut inputs = base_inputs(&spec, &bc)?;
            inputs.insert("max".into(), json!(max));
            Output::Records(vec![Record::new(
                "spectrum",
                Value::Object(inputs),
                to_value(&sp.laplacian.entries())?,
                json!({
                    "coupled_channels": sp.coupled.coupled_channels,
                    "coupled_eigenvalues": sp.coupled.laplacian.total_multiplicity(),
                    "uncoupled_eigenvalues": sp.uncoupled.total_multiplicity(),
                    "singular_points": to_value(&sp.coupled.singular_points)?,
                }),
            )])
        }
    })
}

pub fn shift(s: &Settings) -> Result<Output> {
    let (spec, model, bc) = model_and_bc(s)?;
    let ts = &s.lambdas;
    let xi = spectral_shift_sweep(&bc, model.as_ref(), ts)?;
    let d: Vec<Complex64> = ts
        .par_iter()
        .map(|&t| d_function(&bc, model.as_ref(), t).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
        .collect();
    Ok(match s.format {
        Format::Csv => {
            let mut t = Table::new(&["lambda", "re_d", "im_d", "xi"]);
            for i in 0..ts.len() {
                t.push(vec![
                    float(ts[i]),
                    float(d[i].re),
                    float(d[i].im),
                    float(xi[i]),
                ]);
            }
            Output::Table(t)
        }
        Format::Json => {
            let inputs = base_inputs(&spec, &bc)?;
            Output::Records(
                (0..ts.len())
                    .map(|i| {
                        let mut inp = inputs.clone();
                        inp.insert("lambda".into(), json!(ts[i]));
                        Record::new(
                            "shift",
                            Value::Object(inp),
                            json!(xi[i]),
                            json!({"d": [d[i].re, d[i].im]}),
                        )
                    })
                    .collect(),
            )
        }
    })
}

struct TraceRow {
    lambda: f64,
    trace: Complex64,
    sum: Option<f64>,
    tail: f64,
    pairs: usize,
}

pub fn trace_check(s: &Settings) -> Result<(Output, bool)> {
    let (spec, model, bc) = model_and_bc(s)?;
    let lambdas = if s.lambdas.is_empty() {
        vec![-1.0]
    } else {
        s.lambdas.clone()
    };
    let max = s.max.unwrap_or(1e6);
    let caps = model.capabilities();
    let coupled = if caps.has_spectrum && caps.supports_positive_lambda {
        Some(secular_coupled(&bc, model.as_ref(), max)?)
    } else {
        None
    };
    let rows: Vec<TraceRow> = lambdas
        .par_iter()
        .map(|&l| {
            let trace = trace_resolvent_diff(&bc, model.as_ref(), l)?;
            let (sum, tail, pairs) = match &coupled {
                Some(c) => {
                    let t = eigenvalue_trace_sum(&c.laplacian, &c.friedrichs, l)?;
                    (Some(t.value), t.tail, t.pairs)
                }
                None => (None, 0.0, 0),
            };
            Ok(TraceRow {
                lambda: l,
                trace,
                sum,
                tail,
                pairs,
            })
        })
        .collect::<Result<_>>()?;
    let residual = |r: &TraceRow| {
        r.sum
            .map(|x| (r.trace.re - x).abs() / r.trace.re.abs().max(1.0))
    };
    let pass = rows.iter().all(|r| residual(r).is_none_or(|e| e <= s.tol));
    let out = match s.format {
        Format::Csv => {
            let mut t = Table::new(&[
                "lambda",
                "trace_re",
                "trace_im",
                "eigenvalue_sum",
                "residual",
            ]);
            for r in &rows {
                t.push(vec![
                    float(r.lambda),
                    float(r.trace.re),
                    float(r.trace.im),
                    float(r.sum.unwrap_or(f64::NAN)),
                    float(residual(r).unwrap_or(f64::NAN)),
                ]);
            }
            Output::Table(t)
        }
        Format::Json => {
            let inputs = base_inputs(&spec, &bc)?;
            Output::Records(
                rows.iter()
                    .map(|r| {
                        let mut inp = inputs.clone();
                        inp.insert("lambda".into(), json!(r.lambda));
                        inp.insert("max".into(), json!(max));
                        Record::new(
                            "trace-check",
                            Value::Object(inp),
                            complex(r.trace),
                            json!({
                                "eigenvalue_sum": r.sum,
                                "residual": residual(r),
                                "tail": r.tail,
                                "pairs": r.pairs,
                                "tolerance": s.tol,
                            }),
                        )
                    })
                    .collect(),
            )
        }
    };
    Ok((out, pass))
}

pub fn det_ratio_cmd(s: &Settings) -> Result<Output> {
    let (spec, model, bc) = model_and_bc(s)?;
    let shift = s.lambdas.first().copied();
    let cmp = det_ratio(&bc, model.as_ref(), shift)?;
    let asym = asymptotic_data(&bc, model.as_ref())?;
    let mut inputs = base_inputs(&spec, &bc)?;
    inputs.insert("shift".into(), json!(shift));
    let rec = Record::new(
        "det-ratio",
        Value::Object(inputs),
        complex(cmp.ratio),
        json!({"comparison": to_value(&cmp)?, "asymptotics": to_value(&asym)?}),
    );
    Ok(match s.format {
        Format::Json => Output::Records(vec![rec]),
        Format::Csv => {
            let mut t = Table::new(&[
                "ratio_re", "ratio_im", "gamma_re", "gamma_im", "d", "dstar_re", "dstar_im",
            ]);
            t.push(vec![
                float(cmp.ratio.re),
                float(cmp.ratio.im),
                float(cmp.gamma.re),
                float(cmp.gamma.im),
                cmp.d.to_string(),
                float(cmp.d_star_zero.re),
                float(cmp.d_star_zero.im),
            ]);
            Output::Table(t)
        }
    })
}

pub fn sphere_s0(s: &Settings, points: &[String]) -> Result<Output> {
    let cfg = if !points.is_empty() {
        let z: Vec<Complex64> = points
            .iter()
            .map(|p| parse_point(p).map(|[a, b]| Complex64::new(a, b)))
            .collect::<Result<_>>()?;
        SphereConfig::new(z)?
    } else if let Some(ModelSpec::Sphere { points }) = &s.model {
        SphereConfig::new(points.iter().map(|p| Complex64::new(p[0], p[1])).collect())?
    } else {
        SphereConfig::regular_hexagon()
    };
    let block = sphere_s0_block(&cfg);
    let entries: Vec<Complex64> = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|ij| block[ij])
        .collect();
    let pts: Vec<[f64; 2]> = cfg.points().iter().map(|z| [z.re, z.im]).collect();
    Ok(match s.format {
        Format::Csv => {
            let mut t = Table::new(&["row", "col", "re", "im"]);
            for (n, z) in entries.iter().enumerate() {
                t.push(vec![
                    (n / 2).to_string(),
                    (n % 2).to_string(),
                    float(z.re),
                    float(z.im),
                ]);
            }
            Output::Table(t)
        }
        Format::Json => Output::Records(vec![Record::new(
            "sphere-s0",
            json!({"points": pts}),
            Value::Array(entries.iter().map(|&z| complex(z)).collect()),
            json!({"channels": [{"k": -1, "nu": -0.5}, {"k": 1, "nu": 0.5}], "max_abs": block.iter().map(|z| z.norm()).fold(0.0, f64::max)}),
        )]),
    })
}

pub fn torus_s00(s: &Settings, lattice: Option<&str>) -> Result<Output> {
    let spec = match (lattice, &s.model) {
        (Some(l), _) => {
            let v: Vec<f64> = l
                .split(',')
                .map(super::config::parse_real)
                .collect::<Result<_>>()?;
            if v.len() != 4 {
                return Err(Error::Config("--lattice takes v1x,v1y,v2x,v2y".into()));
            }
            ModelSpec::Torus {
                v1: [v[0], v[1]],
                v2: [v[2], v[3]],
            }
        }
        (None, Some(m @ ModelSpec::Torus { .. })) => m.clone(),
        (None, Some(_)) => return Err(Error::Config("torus-s00 needs a torus model".into())),
        (None, None) => ModelSpec::Torus {
            v1: [1.0, 0.0],
            v2: [0.0, 1.0],
        },
    };
    let model = spec.build()?;
    let rows: Vec<(f64, f64)> = s
        .lambdas
        .par_iter()
        .map(|&l| Ok((l, model.s_matrix(l)?[(0, 0)].re)))
        .collect::<Result<_>>()?;
    let cone = |l: f64| {
        (l < 0.0)
            .then(|| crate::models::cone_entry(0.0, l).ok())
            .flatten()
    };
    Ok(match s.format {
        Format::Csv => {
            let mut t = Table::new(&["lambda", "s00", "cone_s00"]);
            for &(l, v) in &rows {
                t.push(vec![float(l), float(v), float(cone(l).unwrap_or(f64::NAN))]);
            }
            Output::Table(t)
        }
        Format::Json => Output::Records(
            rows.iter()
                .map(|&(l, v)| {
                    Record::new(
                        "torus-s00",
                        json!({"model": to_value(&spec).unwrap_or(Value::Null), "lambda": l}),
                        complex(Complex64::new(v, 0.0)),
                        json!({"cone_s00": cone(l), "difference": cone(l).map(|c| v - c)}),
                    )
                })
                .collect(),
        ),
    })
}

fn read_spectrum(path: &std::path::Path) -> Result<SpectrumList> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    SpectrumList::from_csv(&text)
}

pub fn relzeta(
    s: &Settings,
    svals: &[f64],
    files: Option<(&std::path::Path, &std::path::Path)>,
) -> Result<Output> {
    let max = s.max.unwrap_or(1e6);
    let mut inputs = serde_json::Map::new();
    let mut krein = Value::Null;
    let (mu_l, mu_f) = match files {
        Some((l, f)) => {
            inputs.insert("spectrum_l".into(), json!(l.display().to_string()));
            inputs.insert("spectrum_f".into(), json!(f.display().to_string()));
            (read_spectrum(l)?, read_spectrum(f)?)
        }
        None => {
            let (spec, model, bc) = model_and_bc(s)?;
            inputs = base_inputs(&spec, &bc)?;
            inputs.insert("max".into(), json!(max));
            krein = match det_ratio(&bc, model.as_ref(), None) {
                Ok(c) => json!({"ratio": [c.ratio.re, c.ratio.im], "d": c.d}),
                Err(e) => json!({"error": e.to_string()}),
            };
            let c = secular_coupled(&bc, model.as_ref(), max)?;
            (c.laplacian, c.friedrichs)
        }
    };
    let result = match s.lambdas.first() {
        Some(&shift) => relative_zeta_at_zero(&mu_l, &mu_f, shift)?,
        None => relative_zeta_extrapolated(&mu_l, &mu_f, &DEFAULT_SHIFTS)?,
    };
    let zeta_s: Vec<(f64, f64)> = svals
        .par_iter()
        .map(|&sv| {
            let v = match s.lambdas.first() {
                Some(&shift) => relative_zeta(&mu_l, &mu_f, sv, shift)?,
                None => relative_zeta_limit(&mu_l, &mu_f, sv, &DEFAULT_SHIFTS)?,
            };
            Ok((sv, v))
        })
        .collect::<Result<_>>()?;
    Ok(match s.format {
        Format::Csv => {
            let mut t = Table::new(&["s", "zeta"]);
            t.push(vec![float(0.0), float(result.zeta_at_zero)]);
            for (sv, v) in &zeta_s {
                t.push(vec![float(*sv), float(*v)]);
            }
            Output::Table(t)
        }
        Format::Json => Output::Records(vec![Record::new(
            "relzeta",
            Value::Object(inputs),
            json!(result.det_ratio),
            json!({
                "result": to_value(&result)?,
                "zeta": zeta_s.iter().map(|(a, b)| json!({"s": a, "value": b})).collect::<Vec<_>>(),
                "krein": krein,
            }),
        )]),
    })
}
