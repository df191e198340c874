use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use wiretap_core::channel::BceChannel;
use wiretap_core::coding::{
    secrecy_trend, CodingDistribution, RateTargets, TrendRow, MAX_CODEWORDS, MAX_ENUMERATION_WORK, MAX_OUTPUT_BITS,
};
use wiretap_core::degraded::{
    search_degraded_region, AuxiliaryDecomposition, DegradednessReport, SearchConfig, RATE_FLOOR,
};
use wiretap_core::fading::{
    average_rate, integrated_density, interference_window, optimize_profile_numerical, rayleigh_endpoints,
    ClosedFormProfile, FadingFamily, FadingSpec, InterferenceLaw, InterferenceProfile, LayerGrid, OptimizerConfig,
    PowerProfile,
};
use wiretap_core::gaussian::{sweep, GaussianBceParams};
use wiretap_core::inner_bound::{sample_inner_region, AuxCaps, InnerBoundDecomposition};

use crate::args::*;
use crate::config::{parse_seeds, pick, require, Common, FileConfig, Units};
use crate::output::{sidecar, write_csv, write_json, Clock};
use crate::{CliError, CliResult};

pub fn run(cli: Cli) -> CliResult<()> {
    let file = FileConfig::load(cli.global.config.as_deref())?;
    let common = Common {
        format: pick(cli.global.format, file.format, Format::Csv),
        workers: cli.global.workers.or(file.workers),
        units: if cli.global.nats || file.nats == Some(true) {
            Units::Nats
        } else {
            Units::Bits
        },
    };
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(CliError::Input("--workers must be at least 1".into()));
        }
        // a pool may already exist when run in-process; the count is then advisory
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match cli.command {
        Command::Region(RegionCommand::Gaussian(a)) => gaussian(a, &file, &common),
        Command::Region(RegionCommand::Degraded(a)) => degraded(a, &file, &common),
        Command::Region(RegionCommand::Inner(a)) => inner(a, &file, &common),
        Command::Fading(FadingCommand::ClosedForm(a)) => closed_form(a, &file, &common),
        Command::Fading(FadingCommand::Optimize(a)) => optimize(a, &file, &common),
        Command::Simulate(a) => simulate(a, &file, &common),
        Command::Check(CheckCommand::Degraded(a)) => check_degraded(a, &file),
    }
}

fn out_path(out: Option<PathBuf>) -> CliResult<PathBuf> {
    out.ok_or_else(|| CliError::Input("missing required --out".into()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("bad {what} {}: {e}", path.display())))
}

fn load_channel(path: &Path) -> CliResult<BceChannel> {
    read_json(path, "channel")
}

/// Re-runs the constructors so that loaded distributions get the same
/// checks as programmatic ones.
fn load_distribution(path: &Path) -> CliResult<CodingDistribution> {
    let d: CodingDistribution = read_json(path, "distribution")?;
    Ok(match d {
        CodingDistribution::Degraded(a) => {
            CodingDistribution::Degraded(AuxiliaryDecomposition::new(a.p_u, a.p_x_given_u)?)
        }
        CodingDistribution::General(g) => CodingDistribution::General(InnerBoundDecomposition::new(
            g.p_u,
            g.p_v1v2_given_u,
            g.p_x_given_v1v2,
            g.v1_size,
            g.v2_size,
        )?),
    })
}

#[derive(Serialize)]
struct GaussianConfig {
    power: f64,
    sigmas: Vec<f64>,
    points: usize,
    out: PathBuf,
}

#[derive(Serialize)]
struct GaussianRow {
    alpha: f64,
    r1_secret: f64,
    r2_secret: f64,
    r1_nonsecret: f64,
    r2_nonsecret: f64,
}

fn gaussian(a: GaussianArgs, file: &FileConfig, common: &Common) -> CliResult<()> {
    let clock = Clock::start();
    let f = &file.gaussian;
    let cfg = GaussianConfig {
        power: pick(a.power, f.power, 20.0),
        sigmas: pick(a.sigmas, f.sigmas.clone(), vec![0.9, 1.5, 4.0]),
        points: pick(a.points, f.points, 101),
        out: out_path(a.out)?,
    };
    let [s1, s2, s3] = cfg.sigmas[..] else {
        return Err(CliError::Input(format!("--sigmas needs three variances, got {}", cfg.sigmas.len())));
    };
    let params = GaussianBceParams::new(cfg.power, s1, s2, s3)?;
    let u = common.units;
    let rows: Vec<GaussianRow> = sweep(&params, cfg.points)?
        .into_iter()
        .map(|r| GaussianRow {
            alpha: r.alpha,
            r1_secret: u.scale(r.secret.r1),
            r2_secret: u.scale(r.secret.r2),
            r1_nonsecret: u.scale(r.nonsecret.r1),
            r2_nonsecret: u.scale(r.nonsecret.r2),
        })
        .collect();
    match common.format {
        Format::Csv => write_csv(
            &cfg.out,
            &["alpha", "R1_secret", "R2_secret", "R1_nonsecret", "R2_nonsecret"],
            &rows
                .iter()
                .map(|r| {
                    vec![Some(r.alpha), Some(r.r1_secret), Some(r.r2_secret), Some(r.r1_nonsecret), Some(r.r2_nonsecret)]
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Json => write_json(&cfg.out, &rows)?,
    }
    let max_r1 = rows.iter().map(|r| r.r1_secret).fold(0.0, f64::max);
    let max_r2 = rows.iter().map(|r| r.r2_secret).fold(0.0, f64::max);
    clock.finish(
        &cfg.out,
        "region gaussian",
        common,
        &cfg,
        json!({}),
        json!({ "max_r1_secret": max_r1, "max_r2_secret": max_r2 }),
    )
}

#[derive(Serialize)]
struct DegradedRow {
    mu: Option<f64>,
    r1: f64,
    r2: f64,
    certificate_id: usize,
}

fn degraded(a: DegradedArgs, file: &FileConfig, common: &Common) -> CliResult<()> {
    let clock = Clock::start();
    let f = &file.degraded;
    let d = SearchConfig::default();
    let channel = require(a.channel, f.channel.clone(), "channel")?;
    let cfg = SearchConfig {
        grid_resolution: pick(a.grid, f.grid, d.grid_resolution),
        random_samples: pick(a.samples, f.samples, d.random_samples),
        refine_iters: pick(a.refine_iters, f.refine_iters, d.refine_iters),
        mu_grid: pick(a.mu_grid, f.mu_grid.clone(), d.mu_grid),
        seed: pick(a.seed, f.seed, d.seed),
        u_cardinality: a.u_cardinality.or(f.u_cardinality),
        max_grid_points: pick(a.max_grid_points, f.max_grid_points, d.max_grid_points),
    };
    let out = out_path(a.out)?;
    let bce = load_channel(&channel)?;
    let region = search_degraded_region(&bce, &cfg)?;
    let u = common.units;

    // one row per trade-off weight, then every frontier vertex
    let mut rows: Vec<DegradedRow> = region
        .mu_optima
        .iter()
        .map(|m| {
            let c = region.certificate(m.certificate_id).expect("optima refer to frontier certificates");
            DegradedRow {
                mu: Some(m.mu),
                r1: u.scale(c.rate.r1),
                r2: u.scale(c.rate.r2),
                certificate_id: c.id,
            }
        })
        .collect();
    rows.extend(region.frontier.points.iter().map(|p| DegradedRow {
        mu: None,
        r1: u.scale(p.rate.r1),
        r2: u.scale(p.rate.r2),
        certificate_id: p.source,
    }));
    match common.format {
        Format::Csv => write_csv(
            &out,
            &["mu", "R1", "R2", "certificate_id"],
            &rows
                .iter()
                .map(|r| vec![r.mu, Some(r.r1), Some(r.r2), Some(r.certificate_id as f64)])
                .collect::<Vec<_>>(),
        )?,
        Format::Json => write_json(&out, &rows)?,
    }
    write_json(
        &sidecar(&out, "certificates.json"),
        &json!({ "units": "bits", "certificates": region.certificates }),
    )?;
    #[derive(Serialize)]
    struct Resolved<'a> {
        channel: &'a Path,
        out: &'a Path,
        search: &'a SearchConfig,
    }
    clock.finish(
        &out,
        "region degraded",
        common,
        &Resolved {
            channel: &channel,
            out: &out,
            search: &cfg,
        },
        json!({ "rate_floor": RATE_FLOOR, "refine_min_gain": 1e-10 }),
        json!({
            "max_r1": u.scale(region.frontier.max_r1()),
            "max_r2": u.scale(region.frontier.max_r2()),
            "vertices": region.frontier.len(),
            "evaluated": region.evaluated,
            "u_cardinality": region.u_cardinality,
            "cardinality_note": region.cardinality_note,
            "degradedness": region.degradedness,
        }),
    )
}

#[derive(Serialize)]
struct InnerConfig {
    channel: PathBuf,
    caps: Vec<usize>,
    samples: usize,
    seed: u64,
    out: PathBuf,
}

#[derive(Serialize)]
struct InnerRow {
    sample: usize,
    r0: f64,
    r1: f64,
    r2: f64,
}

fn inner(a: InnerArgs, file: &FileConfig, common: &Common) -> CliResult<()> {
    let clock = Clock::start();
    let f = &file.inner;
    let cfg = InnerConfig {
        channel: require(a.channel, f.channel.clone(), "channel")?,
        caps: pick(a.caps, f.caps.clone(), vec![2, 2, 2]),
        samples: pick(a.samples, f.samples, 5000),
        seed: pick(a.seed, f.seed, 0),
        out: out_path(a.out)?,
    };
    let [cu, c1, c2] = cfg.caps[..] else {
        return Err(CliError::Input(format!("--caps needs three values, got {}", cfg.caps.len())));
    };
    let bce = load_channel(&cfg.channel)?;
    let triples = sample_inner_region(&bce, AuxCaps { u: cu, v1: c1, v2: c2 }, cfg.samples, cfg.seed)?;
    let u = common.units;
    let rows: Vec<InnerRow> = triples
        .iter()
        .map(|t| InnerRow {
            sample: t.sample,
            r0: u.scale(t.triple.r0),
            r1: u.scale(t.triple.r1),
            r2: u.scale(t.triple.r2),
        })
        .collect();
    match common.format {
        Format::Csv => write_csv(
            &cfg.out,
            &["sample", "R0", "R1", "R2"],
            &rows
                .iter()
                .map(|r| vec![Some(r.sample as f64), Some(r.r0), Some(r.r1), Some(r.r2)])
                .collect::<Vec<_>>(),
        )?,
        Format::Json => write_json(&cfg.out, &rows)?,
    }
    clock.finish(
        &cfg.out,
        "region inner",
        common,
        &cfg,
        json!({}),
        json!({ "triples": rows.len() }),
    )
}

#[derive(Clone, Serialize)]
struct SpecConfig {
    family: FamilyArg,
    m: Option<f64>,
    s_prime: f64,
    power: f64,
}

fn fading_spec(a: &FadingSpecArgs, file: &FileConfig) -> CliResult<(SpecConfig, FadingSpec)> {
    let f = &file.fading;
    let cfg = SpecConfig {
        family: pick(a.family, f.family, FamilyArg::Rayleigh),
        m: a.m.or(f.m),
        s_prime: pick(a.s_prime, f.s_prime, 0.5),
        power: pick(a.power, f.power, 1.0),
    };
    let family = match (cfg.family, cfg.m) {
        (FamilyArg::Rayleigh, None) => FadingFamily::Rayleigh,
        (FamilyArg::Rayleigh, Some(_)) => {
            return Err(CliError::Input("--m applies to the nakagami family only".into()))
        }
        (FamilyArg::Nakagami, m) => FadingFamily::Nakagami {
            m: m.ok_or_else(|| CliError::Input("nakagami needs --m".into()))?,
        },
    };
    let spec = FadingSpec::new(family, cfg.s_prime, cfg.power)?;
    Ok((cfg, spec))
}

fn law(l: LawArg) -> InterferenceLaw {
    match l {
        LawArg::Closed => InterferenceLaw::Closed,
        LawArg::Stationary => InterferenceLaw::Stationary,
    }
}

#[derive(Serialize)]
struct ProfileRow {
    s: f64,
    #[serde(rename = "I")]
    i: f64,
    rho: f64,
}

fn write_profile(out: &Path, format: Format, rows: &[ProfileRow]) -> CliResult<()> {
    match format {
        Format::Csv => write_csv(
            out,
            &["s", "I", "rho"],
            &rows.iter().map(|r| vec![Some(r.s), Some(r.i), Some(r.rho)]).collect::<Vec<_>>(),
        ),
        Format::Json => write_json(out, &rows),
    }
}

fn closed_form(a: ClosedFormArgs, file: &FileConfig, common: &Common) -> CliResult<()> {
    let clock = Clock::start();
    let (spec_cfg, spec) = fading_spec(&a.spec, file)?;
    #[derive(Serialize)]
    struct Resolved {
        spec: SpecConfig,
        law: LawArg,
        points: usize,
        out: PathBuf,
    }
    let cfg = Resolved {
        spec: spec_cfg,
        law: pick(a.law, file.fading.law, LawArg::Closed),
        points: pick(a.points, file.fading.points, 401),
        out: out_path(a.out)?,
    };
    if cfg.points < 2 {
        return Err(CliError::Core(wiretap_core::Error::Validation(
            "--points must be at least 2".into(),
        )));
    }
    let profile = ClosedFormProfile::new(law(cfg.law), spec)?;
    let (_, hi) = profile.support();
    let top = 1.25 * hi.max(spec.s_prime);
    let rows = (0..cfg.points)
        .map(|k| {
            let s = top * k as f64 / (cfg.points - 1) as f64;
            Ok(ProfileRow {
                s,
                i: profile.try_interference(s)?,
                rho: profile.density(s),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    write_profile(&cfg.out, common.format, &rows)?;
    let endpoints = rayleigh_endpoints(&spec).ok();
    clock.finish(
        &cfg.out,
        "fading closed-form",
        common,
        &cfg,
        json!({ "quadrature_abs_tol": wiretap_core::fading::quadrature::DEFAULT_TOL }),
        json!({
            "window": interference_window(law(cfg.law), &spec)?,
            "rayleigh_endpoints": endpoints,
            "average_rate": common.units.scale(average_rate(&spec, &profile)?),
            "integrated_density": integrated_density(&profile)?,
        }),
    )
}

fn optimize(a: OptimizeArgs, file: &FileConfig, common: &Common) -> CliResult<()> {
    let clock = Clock::start();
    let (spec_cfg, spec) = fading_spec(&a.spec, file)?;
    let f = &file.fading;
    let d = OptimizerConfig::default();
    #[derive(Serialize)]
    struct Resolved {
        spec: SpecConfig,
        layers: usize,
        optimizer: OptimizerConfig,
        out: PathBuf,
    }
    let cfg = Resolved {
        spec: spec_cfg,
        layers: pick(a.layers, f.layers, 400),
        optimizer: OptimizerConfig {
            max_iters: pick(a.max_iters, f.max_iters, d.max_iters),
            rel_tol: pick(a.rel_tol, f.rel_tol, d.rel_tol),
            ..d
        },
        out: out_path(a.out)?,
    };
    let sol = optimize_profile_numerical(&spec, &LayerGrid::Uniform { n: cfg.layers }, &cfg.optimizer)?;
    let profile: PowerProfile = sol.profile()?;
    let rows: Vec<ProfileRow> = (0..profile.grid.len())
        .map(|k| ProfileRow {
            s: profile.grid[k],
            i: profile.interference[k],
            rho: profile.density[k],
        })
        .collect();
    write_profile(&cfg.out, common.format, &rows)?;
    let u = common.units;
    let mut reference = serde_json::Map::new();
    for l in [LawArg::Closed, LawArg::Stationary] {
        if let Ok(p) = ClosedFormProfile::new(law(l), spec) {
            let avg = average_rate(&spec, &p)?;
            reference.insert(
                format!("{l:?}").to_lowercase(),
                json!({ "average_rate": u.scale(avg), "relative_gap": (sol.objective - avg) / avg }),
            );
        }
    }
    clock.finish(
        &cfg.out,
        "fading optimize",
        common,
        &cfg,
        json!({ "rel_tol": cfg.optimizer.rel_tol, "armijo": cfg.optimizer.armijo }),
        json!({
            "objective": u.scale(sol.objective),
            "iterations": sol.iterations,
            "converged": sol.converged,
            "warning": sol.warning,
            "active_layers": sol.powers.iter().filter(|&&p| p > 0.0).count(),
            "closed_form_reference": reference,
        }),
    )
}

#[derive(Serialize)]
struct SimulateConfig {
    channel: PathBuf,
    dist: PathBuf,
    n: Vec<usize>,
    targets: RateTargets,
    seeds: Vec<u64>,
    out: PathBuf,
}

fn targets(rates: &[f64], dist: &CodingDistribution) -> CliResult<RateTargets> {
    match (rates, dist) {
        (&[r1, r2], CodingDistribution::Degraded(_)) => Ok(RateTargets::degraded(r1, r2)),
        (&[r1, r2], CodingDistribution::General(_)) => Ok(RateTargets {
            r11: r1,
            r22: r2,
            ..Default::default()
        }),
        (&[r0, r10, r11, r20, r22], _) => Ok(RateTargets { r0, r10, r11, r20, r22 }),
        _ => Err(CliError::Input(format!("--rates takes 2 or 5 values, got {}", rates.len()))),
    }
}

fn simulate(a: SimulateArgs, file: &FileConfig, common: &Common) -> CliResult<()> {
    let clock = Clock::start();
    let f = &file.simulate;
    let channel = require(a.channel, f.channel.clone(), "channel")?;
    let dist_path = require(a.dist, f.dist.clone(), "dist")?;
    let rates = require(a.rates, f.rates.clone(), "rates")?;
    let seeds = match a.seeds {
        Some(s) => parse_seeds(&s)?,
        None => f.seeds.clone().unwrap_or_else(|| vec![0]),
    };
    let bce = load_channel(&channel)?;
    let dist = load_distribution(&dist_path)?;
    let cfg = SimulateConfig {
        channel,
        dist: dist_path,
        n: pick(a.n, f.n.clone(), vec![6]),
        targets: targets(&rates, &dist)?,
        seeds,
        out: out_path(a.out)?,
    };
    let rows: Vec<TrendRow> = secrecy_trend(&bce, &dist, cfg.targets, &cfg.n, &cfg.seeds)?;
    let u = common.units;
    let summary: Vec<_> = rows
        .iter()
        .map(|r| json!({ "n": r.n, "mean_gap": u.scale(r.mean_gap), "mean_pe": r.mean_pe, "plan_valid": r.plan.valid }))
        .collect();
    match common.format {
        Format::Json => write_json(
            &cfg.out,
            &json!({
                "units": "bits",
                "seeds": cfg.seeds,
                "budgets": {
                    "max_output_bits": MAX_OUTPUT_BITS,
                    "max_enumeration_work": MAX_ENUMERATION_WORK,
                    "max_codewords": MAX_CODEWORDS,
                },
                "rows": rows,
            }),
        )?,
        Format::Csv => {
            let mut table = Vec::new();
            for r in &rows {
                for o in &r.outcomes {
                    let e = &o.equivocation;
                    table.push(
                        [
                            r.n as f64,
                            o.seed as f64,
                            u.scale(o.rates.0),
                            u.scale(o.rates.1),
                            u.scale(o.rates.2),
                            u.scale(e.r_e1),
                            u.scale(e.r_e2),
                            u.scale(e.r_e12),
                            o.error.pe1,
                            o.error.pe2,
                            o.error.pe,
                        ]
                        .into_iter()
                        .map(Some)
                        .collect(),
                    );
                }
            }
            write_csv(
                &cfg.out,
                &["n", "seed", "R0", "R1", "R2", "R_e1", "R_e2", "R_e12", "Pe1", "Pe2", "Pe"],
                &table,
            )?;
        }
    }
    clock.finish(
        &cfg.out,
        "simulate",
        common,
        &cfg,
        json!({ "posterior_normalisation": 1e-12 }),
        json!({ "trend": summary }),
    )
}

fn check_degraded(a: CheckDegradedArgs, file: &FileConfig) -> CliResult<()> {
    let channel = require(a.channel, file.degraded.channel.clone(), "channel")?;
    let report = DegradednessReport::for_channel(&load_channel(&channel)?)?;
    let text = serde_json::to_string_pretty(&report).expect("report serialises");
    println!("{text}");
    if let Some(out) = a.out {
        write_json(&out, &report)?;
    }
    Ok(())
}
