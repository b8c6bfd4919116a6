use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use clap::{Args, Subcommand};
use num_complex::Complex64;
use serde_json::Value;

use motkit::gmcfield::{self, BoundaryGridSpec, DriftSpec, FieldSampler};
use motkit::motsim::{self, Driver, FlowConfig, InversionConfig, SkewConfig, T1Config, ThinningConfig};
use motkit::ptheta::{self, Side};
use motkit::rng::map_replicas;
use motkit::sle::{self, ForcePoint, Location, SleConfig};
use motkit::specfun::{self, background_charge, InsertionTriple, QuadratureConfig};
use motkit::stats::Summary;
use motkit::Error;

use crate::config::Settings;
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Resolved global options shared by every command.
pub struct Ctx {
    pub settings: Settings,
    pub seed_flag: Option<u64>,
    pub reps_flag: Option<usize>,
    pub degrees: bool,
    /// Seed actually used, for the manifest; None for deterministic commands.
    pub seed: Option<u64>,
}

impl Ctx {
    fn seed(&mut self) -> Result<u64, CliError> {
        let s = self.settings.get("seed", self.seed_flag, 0u64)?;
        self.seed = Some(s);
        Ok(s)
    }

    fn reps(&mut self, default: usize) -> Result<usize, CliError> {
        self.settings.get("reps", self.reps_flag, default)
    }

    fn get<T: crate::config::ConfigValue>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        self.settings.get(key, flag, default)
    }

    fn require<T: crate::config::ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        self.settings.require(key, flag)
    }

    /// An angle in radians, or in degrees under --degrees.
    fn angle(&mut self, key: &str, flag: Option<f64>, default: Option<f64>) -> Result<f64, CliError> {
        let v = match default {
            Some(d) => self.get(key, flag, d)?,
            None => self.require(key, flag)?,
        };
        self.settings.record("degrees", Value::Bool(self.degrees));
        Ok(if self.degrees { v.to_radians() } else { v })
    }
}

fn triple(v: &[f64]) -> Result<InsertionTriple, CliError> {
    match v {
        [a, b, c] => Ok(InsertionTriple::new(*a, *b, *c)),
        _ => Err(CliError::Input(format!("--betas needs three values, got {}", v.len()))),
    }
}

fn positive_count(name: &str, n: usize) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::Input(format!("--{name} must be at least 1")));
    }
    Ok(n)
}

// ---------------------------------------------------------------- params

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    gamma: Option<f64>,
}

pub fn params(a: &ParamsArgs, ctx: &mut Ctx) -> Result<Table, CliError> {
    let gamma = ctx.require("gamma", a.gamma)?;
    let p = ptheta::lqg_params(gamma)?;
    Ok(Table::record(vec![
        ("gamma", p.gamma.into()),
        ("kappa", p.kappa.into()),
        ("kappa_prime", p.kappa_prime.into()),
        ("Q", p.q.into()),
        ("chi_ig", p.chi_ig.into()),
        ("chi_prime", p.chi_prime.into()),
        ("a", p.a.into()),
        ("rho", p.rho.into()),
    ]))
}

// ---------------------------------------------------------------- ptheta

#[derive(Debug, Subcommand)]
pub enum PthetaCmd {
    /// p, c, wedge weights and inversion rate on a θ grid over [−π/2, π/2].
    Table {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// θ with p_γ(θ) = p.
    Invert {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// p·c and (1−p)·c from trigonometry and from the structure constants.
    PcCrosscheck {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
    },
}

pub fn ptheta_cmd(c: &PthetaCmd, ctx: &mut Ctx) -> Result<Table, CliError> {
    match c {
        PthetaCmd::Table { gamma, steps } => {
            let gamma = ctx.require("gamma", *gamma)?;
            let steps = ctx.get("steps", *steps, 181usize)?;
            if steps < 2 {
                return Err(CliError::Input("--steps must be at least 2".into()));
            }
            ptheta::lqg_params(gamma)?;
            let mut t = Table::new(&["theta", "p", "c", "wL", "wR", "inversion_rate"]);
            let h = PI / (steps - 1) as f64;
            for i in 0..steps {
                let theta = if i == steps - 1 { FRAC_PI_2 } else { -FRAC_PI_2 + i as f64 * h };
                let row = ptheta::SkewCoupling::new(gamma, theta)?;
                let vals = [theta, row.p, row.c, row.w_l, row.w_r, ptheta::inversion_rate(theta)];
                if vals.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Domain(format!("non-finite value at theta = {theta}")).into());
                }
                t.push(vals.iter().map(|&v| Cell::Num(v)).collect());
            }
            Ok(t)
        }
        PthetaCmd::Invert { gamma, p } => {
            let gamma = ctx.require("gamma", *gamma)?;
            let p = ctx.require("p", *p)?;
            let theta = ptheta::theta_of_p(gamma, p)?;
            Ok(Table::record(vec![
                ("gamma", gamma.into()),
                ("p", p.into()),
                ("theta", theta.into()),
                ("theta_degrees", theta.to_degrees().into()),
                ("residual", (ptheta::p_of_theta(gamma, theta) - p).into()),
            ]))
        }
        PthetaCmd::PcCrosscheck { gamma, theta } => {
            let gamma = ctx.require("gamma", *gamma)?;
            let theta = ctx.angle("theta", *theta, None)?;
            ptheta::SkewCoupling::new(gamma, theta)?;
            let cfg = QuadratureConfig::default();
            let (pc, qc) = ptheta::pc_products(gamma, theta);
            // a weight outside the admissible window leaves that side empty
            let side = |s| match ptheta::pc_via_lcft_side(gamma, theta, s, &cfg) {
                Ok(v) => Ok(Some(v)),
                Err(Error::Domain(_)) => Ok(None),
                Err(e) => Err(CliError::from(e)),
            };
            let (l, r) = (side(Side::Left)?, side(Side::Right)?);
            let rel = |x: Option<f64>, y: f64| x.map(|x| (x / y - 1.0).abs());
            Ok(Table::record(vec![
                ("gamma", gamma.into()),
                ("theta", theta.into()),
                ("pc", pc.into()),
                ("qc", qc.into()),
                ("pc_lcft", l.into()),
                ("qc_lcft", r.into()),
                ("rel_err_left", rel(l, pc).into()),
                ("rel_err_right", rel(r, qc).into()),
            ]))
        }
    }
}

// ---------------------------------------------------------------- specfun

#[derive(Debug, Subcommand)]
pub enum SpecfunCmd {
    /// Double gamma Γ_b(z).
    Gammab {
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        z: Option<f64>,
    },
    /// Boundary structure constant bar-H(β₁, β₂, β₃).
    Barh {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        betas: Option<Vec<f64>>,
    },
    /// H^{(Q+3γ/2−β, 2/γ, β)}_{(0,0,0)} from Γ products.
    Hspecial {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Boundary reflection coefficient bar-R(β, μ, μ).
    Barr {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
    },
}

pub fn specfun_cmd(c: &SpecfunCmd, ctx: &mut Ctx) -> Result<Table, CliError> {
    let cfg = QuadratureConfig::default();
    match c {
        SpecfunCmd::Gammab { b, z } => {
            let b = ctx.require("b", *b)?;
            let z = ctx.require("z", *z)?;
            let v = specfun::ln_gamma_b(b, z, &cfg)?;
            Ok(Table::record(vec![
                ("b", b.into()),
                ("z", z.into()),
                ("value", v.value().into()),
                ("ln_abs", v.ln_abs.into()),
                ("sign", v.sign.into()),
            ]))
        }
        SpecfunCmd::Barh { gamma, betas } => {
            let gamma = ctx.require("gamma", *gamma)?;
            let t = triple(&ctx.require("betas", betas.clone())?)?;
            let v = specfun::ln_bar_h(gamma, &t, &cfg)?;
            let [b1, b2, b3] = t.as_array();
            Ok(Table::record(vec![
                ("gamma", gamma.into()),
                ("beta1", b1.into()),
                ("beta2", b2.into()),
                ("beta3", b3.into()),
                ("value", v.value().into()),
                ("ln_abs", v.ln_abs.into()),
            ]))
        }
        SpecfunCmd::Hspecial { gamma, beta } => {
            let gamma = ctx.require("gamma", *gamma)?;
            let beta = ctx.require("beta", *beta)?;
            Ok(Table::record(vec![
                ("gamma", gamma.into()),
                ("beta", beta.into()),
                ("value", specfun::h_special(gamma, beta)?.into()),
                ("value_via_log", specfun::h_special_log(gamma, beta)?.into()),
            ]))
        }
        SpecfunCmd::Barr { gamma, beta, mu } => {
            let gamma = ctx.require("gamma", *gamma)?;
            let beta = ctx.require("beta", *beta)?;
            let mu = ctx.require("mu", *mu)?;
            Ok(Table::record(vec![
                ("gamma", gamma.into()),
                ("beta", beta.into()),
                ("mu", mu.into()),
                ("value", specfun::bar_r(gamma, beta, mu, &cfg)?.into()),
            ]))
        }
    }
}

// ---------------------------------------------------------------- mc

#[derive(Debug, Subcommand)]
pub enum McCmd {
    /// Skew Brownian motion: P(X_T > 0) and the local time at T = steps·dt.
    Skew {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        /// One row per path instead of the summary.
        #[arg(long)]
        raw: bool,
    },
    /// First passage of level 1: E e^{−λT₁} against e^{−√(2λ)}.
    T1 {
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        raw: bool,
    },
    /// Laplace transforms of the thinned excursion areas.
    ExcursionArea {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        mus: Option<Vec<f64>>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        excursions: Option<usize>,
        #[arg(long)]
        max_excursion_steps: Option<u64>,
    },
    /// Points of one permuton sample from the coalescent flow.
    Permuton {
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Inversion rate of k-point permuton patterns against (π − 2θ)/(2π).
    InversionRate {
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
}

fn summary_cells(s: &Summary) -> [Cell; 3] {
    [s.mean.into(), s.stderr.into(), s.n.into()]
}

pub fn mc_cmd(c: &McCmd, ctx: &mut Ctx) -> Result<Table, CliError> {
    match c {
        McCmd::Skew { p, steps, dt, raw } => {
            let p = ctx.require("p", *p)?;
            let n_steps = positive_count("steps", ctx.get("steps", *steps, 10_000usize)?)?;
            let dt = ctx.get("dt", *dt, 1.0 / n_steps as f64)?;
            let reps = positive_count("reps", ctx.reps(10_000)?)?;
            let seed = ctx.seed()?;
            let cfg = SkewConfig { p, n_steps, dt, zero_band: None, seed };
            cfg.validate()?;
            let ends = map_replicas(seed, reps, |_, rng| motsim::skew_terminal(&cfg, rng));
            let ends: Vec<_> = ends.into_iter().collect::<Result<_, _>>()?;
            if *raw {
                let mut t = Table::new(&["path", "x", "local_time"]);
                for (i, e) in ends.iter().enumerate() {
                    t.push(vec![i.into(), e.x.into(), e.local_time.into()]);
                }
                return Ok(t);
            }
            let pos: Vec<f64> = ends.iter().map(|e| (e.x > 0.0) as u8 as f64).collect();
            let lt: Vec<f64> = ends.iter().map(|e| e.local_time).collect();
            let (sp, sl) = (Summary::of(&pos), Summary::of(&lt));
            Ok(Table::record(vec![
                ("p", p.into()),
                ("T", (n_steps as f64 * dt).into()),
                ("positive_fraction", sp.mean.into()),
                ("stderr", sp.stderr.into()),
                ("local_time_mean", sl.mean.into()),
                ("local_time_stderr", sl.stderr.into()),
                ("n", sp.n.into()),
            ]))
        }
        McCmd::T1 { lambdas, dt, horizon, raw } => {
            let lambdas = ctx.get("lambdas", lambdas.clone(), vec![0.25, 0.5, 1.0])?;
            let defaults = T1Config::default();
            let cfg = T1Config { dt: ctx.get("dt", *dt, defaults.dt)?, horizon: ctx.get("horizon", *horizon, defaults.horizon)? };
            let reps = positive_count("reps", ctx.reps(100_000)?)?;
            let seed = ctx.seed()?;
            let samples = motsim::sample_t1_with(reps, &cfg, seed)?;
            if *raw {
                let mut t = Table::new(&["path", "t1"]);
                for (i, s) in samples.iter().enumerate() {
                    t.push(vec![i.into(), (*s).into()]);
                }
                return Ok(t);
            }
            let mut t = Table::new(&["lambda", "estimate", "stderr", "n", "exact", "rel_err"]);
            for &l in &lambdas {
                if !(l >= 0.0) {
                    return Err(CliError::Input(format!("lambda = {l} must be nonnegative")));
                }
                let v: Vec<f64> = samples.iter().map(|s| (-l * s).exp()).collect();
                let s = Summary::of(&v);
                let exact = (-(2.0 * l).sqrt()).exp();
                let [m, e, n] = summary_cells(&s);
                t.push(vec![l.into(), m, e, n, exact.into(), (s.mean / exact - 1.0).into()]);
            }
            Ok(t)
        }
        McCmd::ExcursionArea { gamma, theta, mus, t, excursions, max_excursion_steps } => {
            let gamma = ctx.require("gamma", *gamma)?;
            let theta = ctx.angle("theta", *theta, Some(0.0))?;
            let mus = ctx.get("mus", mus.clone(), vec![0.5, 1.0])?;
            let horizon_t = ctx.get("t", *t, 1.0)?;
            let reps = ctx.reps(20_000)?;
            let seed = ctx.seed()?;
            let mut cfg = ThinningConfig::new(gamma, theta, horizon_t, mus, reps, seed);
            cfg.excursions = ctx.get("excursions", *excursions, cfg.excursions)?;
            cfg.max_excursion_steps = ctx.get("max-excursion-steps", *max_excursion_steps, cfg.max_excursion_steps)?;
            let est = motsim::thinned_excursion_area(&cfg)?;
            let mut tab = Table::new(&[
                "mu",
                "left",
                "left_stderr",
                "right",
                "right_stderr",
                "representation_left",
                "representation_right",
                "exact_left",
                "exact_right",
                "correlation",
            ]);
            for e in &est {
                tab.push(vec![
                    e.mu.into(),
                    e.left.mean.into(),
                    e.left.stderr.into(),
                    e.right.mean.into(),
                    e.right.stderr.into(),
                    e.representation_left.mean.into(),
                    e.representation_right.mean.into(),
                    e.exact_left.into(),
                    e.exact_right.into(),
                    e.correlation.into(),
                ]);
            }
            Ok(tab)
        }
        McCmd::Permuton { rho, q, steps, k } => {
            let rho = ctx.require("rho", *rho)?;
            let q = ctx.require("q", *q)?;
            let n_steps = ctx.get("steps", *steps, 20_000usize)?;
            let k = ctx.get("k", *k, 200usize)?;
            let seed = ctx.seed()?;
            let cfg = FlowConfig { rho, q, n_steps, start_times: Vec::new(), seed, driver: Driver::QuadrantLoop };
            let flow = motsim::coalescent_flow(&cfg)?;
            let sample = motsim::permuton_from_flow(&flow, k, seed)?;
            let mut t = Table::new(&["t", "phi"]);
            for &(x, y) in &sample.points {
                t.push(vec![x.into(), y.into()]);
            }
            Ok(t)
        }
        McCmd::InversionRate { rho, q, steps, k } => {
            let rho = ctx.require("rho", *rho)?;
            let q = ctx.require("q", *q)?;
            let n_steps = ctx.get("steps", *steps, 20_000usize)?;
            let k = ctx.get("k", *k, 200usize)?;
            let reps = ctx.reps(200)?;
            let seed = ctx.seed()?;
            let cfg = InversionConfig { rho, q, n_steps, k, n_samples: reps, seed, driver: Driver::QuadrantLoop };
            let s = motsim::inversion_rate_mc(&cfg)?;
            // (π − 2θ)/(2π) with θ solving p_γ(θ) = q for γ matching ρ
            let theory = if q > 0.0 && q < 1.0 {
                let gamma = ptheta::gamma_from_rho(rho)?;
                Some(ptheta::inversion_rate(ptheta::theta_of_p(gamma, q)?))
            } else {
                None
            };
            Ok(Table::record(vec![
                ("rho", rho.into()),
                ("q", q.into()),
                ("k", k.into()),
                ("estimate", s.mean.into()),
                ("stderr", s.stderr.into()),
                ("n", s.n.into()),
                ("theory", theory.into()),
            ]))
        }
    }
}

// ---------------------------------------------------------------- gmc

#[derive(Debug, Args)]
pub struct GmcCommon {
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    betas: Option<Vec<f64>>,
    /// Number of grid points on [−T, T].
    #[arg(long)]
    grid: Option<usize>,
    /// T, the half width of the truncated boundary.
    #[arg(long)]
    half_width: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum GmcCmd {
    /// One field sample on the top boundary with its GMC weights.
    Sample {
        #[command(flatten)]
        common: GmcCommon,
        /// Also write the sample in the binary field format.
        #[arg(long)]
        binary: Option<PathBuf>,
    },
    /// Monte Carlo E[L^power] of the top-boundary length.
    Moment {
        #[command(flatten)]
        common: GmcCommon,
        #[arg(long, allow_negative_numbers = true)]
        power: Option<f64>,
    },
}

fn gmc_setup(c: &GmcCommon, ctx: &mut Ctx) -> Result<(BoundaryGridSpec, DriftSpec), CliError> {
    let gamma = ctx.require("gamma", c.gamma)?;
    let betas = triple(&ctx.require("betas", c.betas.clone())?)?;
    let d = BoundaryGridSpec::default();
    let grid = BoundaryGridSpec {
        n_points: ctx.get("grid", c.grid, d.n_points)?,
        half_width: ctx.get("half-width", c.half_width, d.half_width)?,
        ..d
    };
    Ok((grid, DriftSpec::new(gamma, betas)))
}

pub fn gmc_cmd(c: &GmcCmd, ctx: &mut Ctx) -> Result<Table, CliError> {
    match c {
        GmcCmd::Sample { common, binary } => {
            let (grid, drift) = gmc_setup(common, ctx)?;
            let seed = ctx.seed()?;
            let binary = ctx.settings.optional("binary", binary.as_ref().map(|p| p.display().to_string()))?;
            let s = gmcfield::sample_boundary_field(grid, drift, seed)?;
            if let Some(path) = binary {
                let f = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
                gmcfield::write_field(std::io::BufWriter::new(f), &s).map_err(|e| CliError::io(&path, e))?;
            }
            let mut t = Table::new(&["x", "drift", "field", "weight"]);
            for (i, x) in s.grid.points().into_iter().enumerate() {
                t.push(vec![x.into(), s.drift.value(x).into(), s.values[i].into(), s.gmc_weights[i].into()]);
            }
            Ok(t)
        }
        GmcCmd::Moment { common, power } => {
            let (grid, drift) = gmc_setup(common, ctx)?;
            let q = background_charge(drift.gamma);
            let natural = (2.0 * q - drift.betas.beta_bar()) / drift.gamma;
            let power = ctx.get("power", *power, natural)?;
            let reps = ctx.reps(20_000)?;
            let seed = ctx.seed()?;
            // fail on a bad grid before the Monte Carlo
            FieldSampler::new(grid, drift)?;
            let m = gmcfield::moment_estimate(grid, drift, power, reps, seed)?;
            // at the natural power the moment equals bar-H
            let oracle = if (power - natural).abs() < 1e-12 {
                Some(specfun::bar_h(drift.gamma, &drift.betas, &QuadratureConfig::default())?)
            } else {
                None
            };
            Ok(Table::record(vec![
                ("power", m.power.into()),
                ("estimate", m.estimate.into()),
                ("stderr", m.stderr.into()),
                ("n", m.n_replicas.into()),
                ("oracle", oracle.into()),
            ]))
        }
    }
}

// ---------------------------------------------------------------- sle

#[derive(Debug, Args)]
pub struct SleCommon {
    /// γ of the weld-zero preset SLE_κ(W−2; −W, W−2) with κ = γ².
    #[arg(long)]
    gamma: Option<f64>,
    /// W of the weld-zero preset.
    #[arg(long)]
    weight: Option<f64>,
    /// κ for an explicit force-point list.
    #[arg(long)]
    kappa: Option<f64>,
    /// Force point `side:location:rho`, e.g. `left:0-:-1.4` or `right:1.5:0.6`.
    #[arg(long = "force", allow_negative_numbers = true)]
    force: Vec<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    collision_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum SleCmd {
    /// Per-path continuation-threshold times.
    Threshold {
        #[command(flatten)]
        common: SleCommon,
    },
    /// g_t(z) against its far-field expansion z + 2t/z.
    Farfield {
        #[command(flatten)]
        common: SleCommon,
        #[arg(long)]
        t: Option<f64>,
        /// z = i·height.
        #[arg(long)]
        height: Option<f64>,
    },
}

pub fn parse_force(s: &str) -> Result<ForcePoint, CliError> {
    let bad = || CliError::Input(format!("force point `{s}` is not side:location:rho"));
    let mut it = s.splitn(3, ':');
    let (side, loc, rho) = (it.next().ok_or_else(bad)?, it.next().ok_or_else(bad)?, it.next().ok_or_else(bad)?);
    let side = match side.to_ascii_lowercase().as_str() {
        "l" | "left" => Side::Left,
        "r" | "right" => Side::Right,
        _ => return Err(bad()),
    };
    let location = match loc {
        "0-" => Location::ZeroMinus,
        "0+" => Location::ZeroPlus,
        x => Location::At(x.parse().map_err(|_| bad())?),
    };
    Ok(ForcePoint::new(location, rho.parse().map_err(|_| bad())?, side))
}

fn sle_setup(c: &SleCommon, ctx: &mut Ctx) -> Result<SleConfig, CliError> {
    let force = ctx.settings.optional("force", if c.force.is_empty() { None } else { Some(c.force.clone()) })?;
    let mut cfg = match force {
        Some(list) => {
            let kappa = ctx.require("kappa", c.kappa)?;
            SleConfig::new(kappa, list.iter().map(|s| parse_force(s)).collect::<Result<_, _>>()?)
        }
        None => {
            let gamma = ctx.get("gamma", c.gamma, 1.4)?;
            let w = ctx.get("weight", c.weight, 0.6)?;
            SleConfig::weld_zero(gamma, w)
        }
    };
    cfg.dt = ctx.get("dt", c.dt, cfg.dt)?;
    cfg.horizon = ctx.get("horizon", c.horizon, cfg.horizon)?;
    cfg.collision_tol = ctx.get("collision-tol", c.collision_tol, cfg.collision_tol)?;
    cfg.seed = ctx.seed()?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn sle_cmd(c: &SleCmd, ctx: &mut Ctx) -> Result<Table, CliError> {
    match c {
        SleCmd::Threshold { common } => {
            let cfg = sle_setup(common, ctx)?;
            let reps = ctx.reps(1_000)?;
            let out = sle::run_threshold_paths(&cfg, reps)?;
            let mut t = Table::new(&["path", "threshold_time", "fired", "side", "cumulative_weight", "absorbed"]);
            for (i, o) in out.iter().enumerate() {
                let (side, weight) = match o.fired {
                    Some((Side::Left, w)) => (Cell::from("left"), Cell::Num(w)),
                    Some((Side::Right, w)) => (Cell::from("right"), Cell::Num(w)),
                    None => (Cell::Empty, Cell::Empty),
                };
                t.push(vec![
                    i.into(),
                    o.threshold_time.into(),
                    o.threshold_time.is_some().into(),
                    side,
                    weight,
                    o.state.absorbed.into(),
                ]);
            }
            Ok(t)
        }
        SleCmd::Farfield { common, t, height } => {
            let cfg = sle_setup(common, ctx)?;
            let t = ctx.get("t", *t, 1.0)?;
            let h = ctx.get("height", *height, 100.0)?;
            let z = Complex64::new(0.0, h);
            let g = sle::forward_map_far_field(&cfg, z, t, cfg.seed)?;
            let expected = z + 2.0 * t / z;
            Ok(Table::record(vec![
                ("t", t.into()),
                ("height", h.into()),
                ("g_re", g.re.into()),
                ("g_im", g.im.into()),
                ("expansion_re", expected.re.into()),
                ("expansion_im", expected.im.into()),
                ("error", (g - expected).norm().into()),
            ]))
        }
    }
}

// ---------------------------------------------------------------- selfcheck

struct Checks {
    table: Table,
    failed: Vec<String>,
}

impl Checks {
    fn add(&mut self, name: &str, value: Result<f64, Error>, tol: f64) {
        let (cell, pass) = match value {
            Ok(v) => (Cell::Num(v), v <= tol),
            Err(e) => (Cell::Text(e.to_string()), false),
        };
        if !pass {
            self.failed.push(name.to_string());
        }
        self.table.push(vec![name.into(), cell, tol.into(), pass.into()]);
    }
}

fn max_of<I: IntoIterator<Item = Result<f64, Error>>>(it: I) -> Result<f64, Error> {
    it.into_iter().try_fold(0.0f64, |m, v| v.map(|v| if v.is_nan() { f64::INFINITY } else { m.max(v) }))
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Runs the invariant suite; the table lists each check and whether it passed.
pub fn selfcheck(ctx: &mut Ctx) -> (Table, Vec<String>) {
    let _ = ctx;
    let cfg = QuadratureConfig::default();
    let mut c = Checks { table: Table::new(&["check", "value", "tolerance", "pass"]), failed: Vec::new() };
    let bs = [0.4, 0.55, 0.7, 0.85, 1.0];
    let zs = [0.3, 0.9, 1.6];

    c.add(
        "gamma_b shift equations",
        max_of(bs.iter().flat_map(|&b| {
            zs.iter().flat_map(move |&z| [b, 1.0 / b].map(|s| specfun::shift_residual(b, s, z, &QuadratureConfig::default())))
        })),
        1e-8,
    );
    c.add(
        "gamma_b at Q/2 is 1",
        max_of(bs.iter().map(|&b| specfun::gamma_b(b, 0.5 * (b + 1.0 / b), &cfg).map(|v| (v - 1.0).abs()))),
        1e-9,
    );
    c.add(
        "gamma_b symmetric in b and 1/b",
        max_of(bs.iter().flat_map(|&b| {
            zs.iter().map(move |&z| {
                let cfg = QuadratureConfig::default();
                Ok(rel(specfun::gamma_b(b, z, &cfg)?, specfun::gamma_b(1.0 / b, z, &cfg)?))
            })
        })),
        1e-9,
    );
    c.add(
        "gamma reflection formula",
        Ok([0.1, 0.37, 0.5, 1.3, 2.71, -0.4, -1.7].iter().map(|&x| specfun::reflection_residual(x)).fold(0.0, f64::max)),
        1e-12,
    );

    let gammas: Vec<f64> = (1..=19).map(|i| 0.1 * i as f64).collect();
    let thetas: Vec<f64> = (0..=36).map(|i| -FRAC_PI_2 + i as f64 * PI / 36.0).collect();
    let mut pc_sum = 0.0f64;
    let mut sym = 0.0f64;
    for &g in &gammas {
        for &t in &thetas {
            let (a, b) = ptheta::pc_products(g, t);
            pc_sum = pc_sum.max((a + b - ptheta::c_of_theta(g, t)).abs());
            sym = sym.max((ptheta::p_of_theta(g, -t) - (1.0 - ptheta::p_of_theta(g, t))).abs());
        }
    }
    c.add("pc + (1-p)c = c", Ok(pc_sum), 1e-12);
    c.add("p(-theta) = 1 - p(theta)", Ok(sym), 1e-12);
    c.add(
        "p(1, pi/6) = 1/(1+sqrt 2)",
        Ok((ptheta::p_of_theta(1.0, PI / 6.0) - 1.0 / (1.0 + 2f64.sqrt())).abs()),
        1e-12,
    );
    c.add(
        "theta_of_p inverts p_of_theta",
        max_of(gammas.iter().flat_map(|&g| {
            [-1.2, -0.4, 0.0, 0.7, 1.3].map(move |t| ptheta::theta_of_p(g, ptheta::p_of_theta(g, t)).map(|s| (s - t).abs()))
        })),
        1e-10,
    );
    c.add(
        "bar-H direct equals reduced form",
        max_of([(0.8, 2.6), (1.0, 2.3), (1.0, 1.7), (1.4, 2.4)].iter().map(|&(g, b)| {
            let q = background_charge(g);
            let t = InsertionTriple::new(b, q + 1.5 * g - b, 2.0 / g);
            Ok(rel(specfun::bar_h(g, &t, &QuadratureConfig::default())?, specfun::bar_h_reduced(g, b)?))
        })),
        1e-7,
    );
    c.add(
        "pc from structure constants",
        max_of([(1.0, -PI / 6.0, Side::Left), (0.8, 0.2, Side::Left), (0.8, 0.2, Side::Right), (1.2, 0.2, Side::Right)].iter().map(
            |&(g, t, s)| {
                let (a, b) = ptheta::pc_products(g, t);
                let want = if s == Side::Left { a } else { b };
                Ok(rel(ptheta::pc_via_lcft_side(g, t, s, &QuadratureConfig::default())?, want))
            },
        )),
        1e-7,
    );
    c.add(
        "quantum triangle exponents agree",
        Ok([(1.0, [0.7, 0.9, 1.2]), (0.6, [0.3, 1.1, 1.5]), (1.5, [1.2, 1.3, 1.4])]
            .iter()
            .map(|&(g, [a, b, w])| (ptheta::qt_scaling_exponent(g, a, b, w) - ptheta::qt_length_exponent(g, a, b, w)).abs())
            .fold(0.0, f64::max)),
        1e-12,
    );
    (c.table, c.failed)
}
