use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use qsphere::dini::{classify_rectifiability, dini_integral, DiniSource, ProfileSource, ScaleProfile};
use qsphere::experiments::{
    dimension_bound_check, flatness_vs_bound, lemma_suite, rectifiability_pipeline, thm31_sweep, ExperimentReport,
    MapFamily, Outcome, Subject, EPS_MAX,
};
use qsphere::generators::{annulus_sampler, snowflake, snowflake_closed, sphere_sampler, AngleSchedule, Angles};
use qsphere::geometry::reifenberg_profile;
use qsphere::maps::{builtin_test_maps, dilatation, Region};
use qsphere::qs::weak_qs_constant;
use qsphere::sampling::sphere_points;
use qsphere::special::{
    elliptic_k, gamma_n, grotzsch_gamma_2d_inverse, radius_threshold, ring_modulus_rho, surface_area, t0_constant,
    tau_from_gamma, distortion_phi, SpecialFnContext, Value, DEFAULT_HOLDER_M,
};
use qsphere::{MapSpec, Point, PointSet};
use serde_json::json;

use crate::args::{
    Cli, Command, DiniArgs, DilatationArgs, EvalArgs, ExperimentArgs, ExperimentName, FlatnessArgs, Generate, QsArgs,
    SpecialName, Specialfn,
};
use crate::config::RunConfig;
use crate::{CliError, Output};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?.resolve(cli.seed);
    let out = Output { path: cli.out, header: !cli.no_header };
    match cli.command {
        Command::Version => {
            println!("{}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
        Command::Generate(g) => generate(g, &cfg, &out),
        Command::Flatness(a) => flatness(a, &cfg, &out),
        Command::Qs(a) => qs(a, &cfg, &out),
        Command::Dilatation(a) => dilatation_cmd(a, &out),
        Command::Specialfn(Specialfn::Eval(a)) => special(a, &out),
        Command::Dini(a) => dini(a, &cfg, &out),
        Command::Experiment(a) => experiment(a, cfg, &out),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))
}

fn parse_point(s: &str) -> Result<Point, CliError> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad point {s:?}")))?;
    Point::from_slice(&xs).map_err(|e| usage(e.to_string()))
}

fn load_map(spec: &str) -> Result<MapSpec, CliError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_test_maps()
            .into_iter()
            .find(|m| m.name == name)
            .map(|m| m.map)
            .ok_or_else(|| usage(format!("unknown builtin map {name:?}")));
    }
    Ok(MapSpec::from_json(&read_text(Path::new(spec))?)?)
}

/// `list:<file>` reads the angles from a file, one or more per line.
fn parse_angles(s: &str) -> Result<Angles, CliError> {
    if let Some(rest) = s.strip_prefix("list:") {
        let p = Path::new(rest.trim());
        if p.is_file() {
            let text = read_text(p)?;
            return format!("list:{}", text.trim()).parse().map_err(|e: qsphere::Error| usage(e.to_string()));
        }
    }
    s.parse().map_err(|e: qsphere::Error| usage(e.to_string()))
}

fn generate(g: Generate, cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let seed = cfg.seed.unwrap_or(0);
    let set = match g {
        Generate::Snowflake { angles, generations, closed } => {
            let schedule = AngleSchedule::new(parse_angles(&angles)?, generations)?;
            let curve = if closed { snowflake_closed(&schedule)? } else { snowflake(&schedule)? };
            curve.polyline
        }
        Generate::Sphere { n, count } => sphere_sampler(n, count, seed)?,
        Generate::Annulus { n, t, count } => annulus_sampler(n, t, count, seed)?,
        Generate::Profile { shape, t_min, t_max, per_decade } => {
            let f = profile_shape(&shape)?;
            if !(t_min > 0.0 && t_min < t_max && t_max <= 1.0) || per_decade == 0 {
                return Err(usage("need 0 < t-min < t-max <= 1 and per-decade >= 1"));
            }
            let p = ScaleProfile::from_fn(f, t_min, t_max, per_decade)?;
            return out.csv(|w| p.write_csv(w));
        }
    };
    out.csv(|w| set.write_csv(w))
}

fn profile_shape(s: &str) -> Result<Box<dyn Fn(f64) -> f64>, CliError> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| usage(format!("profile shape {s:?} lacks a kind")))?;
    let nums: Vec<f64> = rest
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad profile parameters {rest:?}")))?;
    match (kind, nums.as_slice()) {
        ("const", &[c]) => Ok(Box::new(move |_| c)),
        ("power", &[c, q]) => Ok(Box::new(move |t: f64| c * t.powf(q))),
        ("invlog", &[c, q]) => Ok(Box::new(move |t: f64| if t < 1.0 { c * (1.0 / t).ln().powf(-q) } else { c })),
        _ => Err(usage(format!("unknown profile shape {s:?}"))),
    }
}

fn flatness(a: FlatnessArgs, cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let file = fs::File::open(&a.input).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", a.input.display())))?;
    let set = PointSet::read_csv(BufReader::new(file))?;
    let centers: Vec<Point> = match &a.centers {
        Some(s) => s.split(';').map(parse_point).collect::<Result<_, _>>()?,
        None => {
            let n = set.len();
            let k = a.center_count.clamp(1, n.max(1));
            (0..k).map(|i| set.points()[i * n / k]).collect()
        }
    };
    let mut scales = a.scales.clone();
    scales.sort_by(|x, y| y.total_cmp(x));
    let profile = reifenberg_profile(&set, &centers, &scales, &cfg.flatness.clone().unwrap_or_default())?;
    for m in &profile.missing {
        eprintln!("center {} scale {}: {}", m.center_index, m.scale, m.reason);
    }
    out.csv(|w| profile.write_csv(w))
}

fn qs(a: QsArgs, cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let f = load_map(&a.map)?;
    let center = if a.center.is_empty() { Point::zero(f.dim()) } else { Point::from_slice(&a.center).map_err(|e| usage(e.to_string()))? };
    let mut q = cfg.qs();
    if let Some(n) = a.triples {
        q.triple_count = n;
    }
    if let Some(n) = a.refine {
        q.refine_iterations = n;
    }
    let e = weak_qs_constant(&f, &center, a.radius, &q)?;
    out.json(&serde_json::to_value(e).expect("estimate serializes"))
}

fn dilatation_cmd(a: DilatationArgs, out: &Output) -> Result<(), CliError> {
    let f = load_map(&a.map)?;
    let region = match (&a.ball, a.annulus) {
        (Some(b), None) => {
            let (c, r) = b.split_once(':').ok_or_else(|| usage("ball must be given as x,y:r"))?;
            let r: f64 = r.trim().parse().map_err(|_| usage(format!("bad radius {r:?}")))?;
            Region::ball(parse_point(c)?, r)?
        }
        (None, Some(t)) => Region::annulus(t)?,
        _ => return Err(usage("give exactly one of --ball or --annulus")),
    };
    let e = dilatation(&f, &region, a.samples)?;
    out.json(&serde_json::to_value(e).expect("estimate serializes"))
}

fn need(v: Option<f64>, name: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| usage(format!("this function needs --{name}")))
}

fn special(a: EvalArgs, out: &Output) -> Result<(), CliError> {
    let ctx = || SpecialFnContext::new(a.n);
    let v = match a.function {
        SpecialName::Rho => Value::Exact(ring_modulus_rho(a.n, need(a.r, "r")?, need(a.big_r, "R")?)?),
        SpecialName::Gamma => gamma_n(&ctx()?, need(a.t, "t")?)?,
        SpecialName::GammaInverse => Value::Exact(grotzsch_gamma_2d_inverse(need(a.t, "t")?)?),
        SpecialName::Tau => tau_from_gamma(&ctx()?, need(a.t, "t")?)?,
        SpecialName::Phi => distortion_phi(&ctx()?, need(a.a, "a")?, need(a.r, "r")?)?,
        SpecialName::T0 => t0_constant(&ctx()?, need(a.k, "k")?)?,
        SpecialName::Sigma => Value::Exact(surface_area(a.n)?),
        SpecialName::Ellipk => Value::Exact(elliptic_k(need(a.k, "k")?)),
        SpecialName::Threshold => {
            let k = need(a.k, "k")?;
            let p = radius_threshold(&ctx()?, k, a.k_prime.unwrap_or(k), a.holder_m.unwrap_or(DEFAULT_HOLDER_M))?;
            return out.json(&serde_json::to_value(p).expect("parameters serialize"));
        }
    };
    out.json(&v.to_json())
}

/// A `t,value` profile, or the sup over centers per scale of a flatness
/// profile CSV.
fn read_profile(path: &Path) -> Result<ScaleProfile, CliError> {
    let text = read_text(path)?;
    let header = text.lines().find(|l| !l.trim().is_empty() && !l.starts_with('#')).unwrap_or("");
    if !header.starts_with("center_index") {
        return Ok(ScaleProfile::read_csv(text.as_bytes(), ProfileSource::Measured)?);
    }
    let mut sup: Vec<(f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("center_index") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let num = |k: usize| -> Result<f64, CliError> {
            cols.get(k)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| CliError::Domain(format!("{}: bad row {}", path.display(), i + 1)))
        };
        let (t, th) = (num(1)?, num(2)?);
        match sup.iter_mut().find(|e| e.0 == t) {
            Some(e) => e.1 = e.1.max(th),
            None => sup.push((t, th)),
        }
    }
    sup.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ScaleProfile::new(sup, ProfileSource::Measured)?)
}

fn dini(a: DiniArgs, cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let profile = read_profile(&a.profile)?;
    let dcfg = cfg.dini.clone().unwrap_or_default();
    if a.rectifiability {
        let h = a.h_profile.as_deref().map(read_profile).transpose()?;
        let v = classify_rectifiability(&profile, h.as_ref(), &dcfg)?;
        return out.json(&serde_json::to_value(v).expect("verdict serializes"));
    }
    let r = dini_integral(&DiniSource::Profile(&profile), a.p, a.log_weighted, a.t_min, a.t_max, &dcfg)?;
    out.json(&serde_json::to_value(r).expect("report serializes"))
}

fn subject(a: &ExperimentArgs, cfg: &RunConfig) -> Result<Subject, CliError> {
    if let Some(m) = &a.map {
        return Ok(Subject::Map(load_map(m)?));
    }
    if let Some(s) = &a.angles {
        let g = a.generations.ok_or_else(|| usage("--angles needs --generations"))?;
        return Ok(Subject::Snowflake(AngleSchedule::new(parse_angles(s)?, g)?));
    }
    cfg.subject.clone().ok_or_else(|| usage("this experiment needs --map, --angles or a config \"subject\""))
}

fn experiment(a: ExperimentArgs, cfg: RunConfig, out: &Output) -> Result<(), CliError> {
    let start = Instant::now();
    let dim = a.dim.or(cfg.dim);
    let mut report: ExperimentReport = match a.name {
        ExperimentName::Lemma => {
            let dim = dim.unwrap_or(2);
            let count = a.count.or(cfg.count).unwrap_or(50);
            let reports = lemma_suite(dim, count, cfg.eps_max.unwrap_or(EPS_MAX), cfg.seed.unwrap_or(0), &cfg.lemma)?;
            let count_of = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
            let mut summary = json!({
                "name": "lemma_suite",
                "dim": dim,
                "count": count,
                "seed": cfg.seed.unwrap_or(0),
                "passed": count_of(Outcome::Pass),
                "failed": count_of(Outcome::Fail),
                "not_applicable": count_of(Outcome::NotApplicable),
                "inconclusive": count_of(Outcome::Inconclusive),
                "reports": reports,
            });
            if out.header {
                summary["runtime_s"] = json!(start.elapsed().as_secs_f64());
            }
            return out.json(&summary);
        }
        ExperimentName::FlatnessBound => {
            let f = match subject(&a, &cfg)? {
                Subject::Map(f) => f,
                Subject::Snowflake(_) => return Err(usage("flatness-bound runs on a map")),
            };
            let centers: Vec<Point> = match &cfg.centers {
                Some(cs) => cs.iter().map(|c| Point::from_slice(c)).collect::<Result<_, _>>()?,
                None => sphere_points(f.dim(), 4),
            };
            let t = cfg.t_list.clone().unwrap_or_else(|| vec![0.4, 0.2, 0.1, 0.05]);
            flatness_vs_bound(&f, &centers, &t, &cfg.flatness_bound)?
        }
        ExperimentName::Dimension => dimension_bound_check(&subject(&a, &cfg)?, &cfg.dimension)?,
        ExperimentName::Sweep => {
            let family = cfg.family.unwrap_or(MapFamily::RadialStretch { dim: dim.unwrap_or(2) });
            let grid = cfg.k_grid.clone().unwrap_or_else(|| vec![1.05, 1.1, 1.2, 1.3]);
            thm31_sweep(&family, &grid, &cfg.sweep)?
        }
        ExperimentName::Pipeline => rectifiability_pipeline(&subject(&a, &cfg)?, &cfg.pipeline)?,
    };
    if out.header {
        report.runtime_s = Some(start.elapsed().as_secs_f64());
    }
    out.json(&serde_json::to_value(&report).expect("report serializes"))
}
