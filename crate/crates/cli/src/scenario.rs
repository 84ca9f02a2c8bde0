//! `scenario` subcommand: the physical models with their closed forms and
//! numerical cross-checks side by side.

use clap::{Args, ValueEnum};
use decohere_core::evolution::{damping_rate, frequency_shift, propagate_closed_form};
use decohere_core::models::cat::CatScenario;
use decohere_core::models::free_particle::{free_particle_spread, free_particle_spread_quadrature};
use decohere_core::models::oscillator::{coherent_amplitude, OscillatorScenario};
use decohere_core::models::two_level::{
    rabi_damping_vs_n, rabi_population_difference, two_level_coherence, TwoLevelKind, TwoLevelScenario,
};
use decohere_core::observables::averaged_position_density;
use decohere_core::series::linspace;
use decohere_core::{expectation, CMatrix, Complex64, DecoherenceParams, TimeSeries};

use crate::error::{CliError, CliResult};
use crate::output::{cronon_note, header, num, Artifact, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    Oscillator,
    FreeParticle,
    Cat,
    Spin,
    Rabi,
    Epr,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    pub name: ScenarioName,
    #[arg(long, default_value_t = 0.1)]
    pub tau1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub tau2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// End of the time grid; each scenario has its own default.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid intervals.
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// oscillator: coherent amplitude (real part).
    #[arg(long, default_value_t = 2.0)]
    pub alpha_re: f64,
    /// oscillator: coherent amplitude (imaginary part).
    #[arg(long, default_value_t = 0.0)]
    pub alpha_im: f64,
    /// oscillator: angular frequency.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// oscillator: Fock truncation (default: smallest safe value).
    #[arg(long)]
    pub dim: Option<usize>,
    /// free-particle, cat: packet width.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_x: f64,
    /// free-particle, cat: velocity spread (cat default: minimum uncertainty).
    #[arg(long)]
    pub sigma_v: Option<f64>,
    /// cat: distance between the packet centres.
    #[arg(long, default_value_t = 6.0)]
    pub separation: f64,
    /// cat: particle mass.
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// cat: position grid `a:b:n`.
    #[arg(long, default_value = "-4:4:81", allow_hyphen_values = true)]
    pub x_grid: String,
    /// spin, epr: Larmor frequency.
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    /// spin, epr: length of the field region.
    #[arg(long, default_value_t = 2.0 * std::f64::consts::PI)]
    pub length: f64,
    /// spin, epr: particle velocity.
    #[arg(long, default_value_t = 1.0)]
    pub velocity: f64,
    /// rabi: one-photon Rabi frequency.
    #[arg(long, default_value_t = 5.0)]
    pub g: f64,
    /// rabi: cavity photon number.
    #[arg(long, default_value_t = 0)]
    pub n_photons: u64,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

/// Parse `a:b:n`.
pub fn parse_grid(text: &str, flag: &str) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::config(format!("{flag}: expected a:b:n, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && b > a && n >= 2) {
        return Err(CliError::config(format!("{flag}: need finite a < b and n >= 2, got {text:?}")));
    }
    Ok((a, b, n))
}

fn grid(start: f64, stop: f64, steps: usize) -> CliResult<Vec<f64>> {
    if steps == 0 {
        return Err(CliError::config("--steps: must be at least 1"));
    }
    if !(stop.is_finite() && stop > start) {
        return Err(CliError::config(format!("--t-max: must exceed {}, got {stop}", num(start))));
    }
    Ok(linspace(start, stop, steps + 1)?)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn run(args: &ScenarioArgs) -> CliResult<Report> {
    let params = DecoherenceParams::with_hbar(args.tau1, args.tau2, args.hbar)?;
    let mut meta = header(&format!("scenario {:?}", args.name).to_lowercase(), Some(&params));
    let data = match args.name {
        ScenarioName::Oscillator => oscillator(args, &params, &mut meta)?,
        ScenarioName::FreeParticle => free_particle(args, &params, &mut meta)?,
        ScenarioName::Cat => cat(args, &params, &mut meta)?,
        ScenarioName::Spin | ScenarioName::Epr => transit(args, &params, &mut meta)?,
        ScenarioName::Rabi => rabi(args, &params, &mut meta)?,
    };
    Ok(Report { metadata: meta, data })
}

fn oscillator(args: &ScenarioArgs, p: &DecoherenceParams, meta: &mut Vec<String>) -> CliResult<Artifact> {
    let alpha = Complex64::new(args.alpha_re, args.alpha_im);
    let sc = match args.dim {
        Some(d) => OscillatorScenario::new(alpha, args.omega, d),
        None => OscillatorScenario::with_min_dim(alpha, args.omega),
    }?;
    let gamma = damping_rate(args.omega, p);
    let t_max = args.t_max.unwrap_or(if gamma > 0.0 { 10.0 / gamma } else { 10.0 });
    let times = grid(0.0, t_max, args.steps)?;
    let spec = sc.hamiltonian(p.hbar())?;
    let rho0 = sc.initial_state()?;
    let a = sc.annihilation();
    let x = (&a + a.adjoint()).scale(0.5);
    let y = (&a - a.adjoint()) * Complex64::new(0.0, -0.5);
    let number = a.adjoint() * &a;
    let (mut closed, mut matrix, mut photons) = (Vec::new(), Vec::new(), Vec::new());
    for &t in &times {
        closed.push(coherent_amplitude(&sc, p, t)?);
        let rho = propagate_closed_form(&rho0, &spec, p, t)?;
        matrix.push(Complex64::new(expectation(&rho, &x)?, expectation(&rho, &y)?));
        photons.push(expectation(&rho, &number)?);
    }
    let mut s = TimeSeries::new(times.clone())?;
    s.add_complex_channel("alpha", &closed)?;
    s.add_channel("alpha_abs", closed.iter().map(|z| z.norm()).collect())?;
    s.add_complex_channel("alpha_matrix", &matrix)?;
    s.add_channel("photons", photons)?;
    meta.push(format!(
        "oscillator: alpha0 = {} + {} i, omega = {}, dim = {}",
        num(args.alpha_re),
        num(args.alpha_im),
        num(args.omega),
        sc.dim()
    ));
    meta.push(format!("gamma = {}, nu = {}", num(gamma), num(frequency_shift(args.omega, p))));
    meta.extend(cronon_note(&times, p));
    Ok(Artifact::Series(s))
}

fn free_particle(args: &ScenarioArgs, p: &DecoherenceParams, meta: &mut Vec<String>) -> CliResult<Artifact> {
    let sigma_v = args.sigma_v.unwrap_or(1.0);
    // the averaged density is integrated numerically, which needs t >= tau2
    let t_max = args.t_max.unwrap_or(100.0 * p.tau2());
    let times = grid(p.tau2(), t_max, args.steps)?;
    let (mut exact, mut quad, mut unitary) = (Vec::new(), Vec::new(), Vec::new());
    for &t in &times {
        exact.push(free_particle_spread(args.sigma_x, sigma_v, p, t)?);
        quad.push(free_particle_spread_quadrature(args.sigma_x, sigma_v, p, t, 1e-8)?);
        unitary.push(args.sigma_x.powi(2) + (sigma_v * t).powi(2));
    }
    let mut s = TimeSeries::new(times.clone())?;
    s.add_channel("variance", exact)?;
    s.add_channel("variance_quadrature", quad)?;
    s.add_channel("variance_unitary", unitary)?;
    meta.push(format!("free particle at rest: sigma_x = {}, sigma_v = {}", num(args.sigma_x), num(sigma_v)));
    meta.push("grid starts at tau2: the quadrature column averages over the waiting-time law".to_string());
    meta.extend(cronon_note(&times, p));
    Ok(Artifact::Series(s))
}

fn cat(args: &ScenarioArgs, p: &DecoherenceParams, meta: &mut Vec<String>) -> CliResult<Artifact> {
    let sc = match args.sigma_v {
        Some(v) => CatScenario::new(args.sigma_x, v, args.separation, args.mass, p.hbar()),
        None => CatScenario::minimum_uncertainty(args.sigma_x, args.separation, args.mass, p.hbar()),
    }?;
    let (a, b, n) = parse_grid(&args.x_grid, "--x-grid")?;
    let xs = linspace(a, b, n)?;
    let t_max = args.t_max.unwrap_or(50.0 * p.tau2());
    let times = grid(p.tau2(), t_max, args.steps)?;
    let mut table = Table::new(["time", "x", "density", "density_quadrature", "interference", "rate"]);
    for &t in &times {
        for &x in &xs {
            table.push(vec![
                t,
                x,
                decohere_core::models::cat_density(&sc, p, x, t)?,
                averaged_position_density(&sc, x, t, p, 1e-12)?,
                sc.interference_term(p, x, t),
                sc.interference_rate(p, x),
            ]);
        }
    }
    meta.push(format!(
        "cat: sigma_x = {}, sigma_v = {}, separation = {}, mass = {}",
        num(sc.sigma_x()),
        num(sc.sigma_v()),
        num(sc.separation()),
        num(sc.mass())
    ));
    meta.push("omega(x) = x D sigma_v / (2 sigma_x^3); rows are (time, x) pairs, time-major".to_string());
    meta.push(format!(
        "half-width with fringe contrast >= 1/2 at t_max: {}",
        num(sc.coherent_half_width(p, t_max, 0.5)?)
    ));
    meta.extend(cronon_note(&times, p));
    Ok(Artifact::Table(table))
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn transit(args: &ScenarioArgs, p: &DecoherenceParams, meta: &mut Vec<String>) -> CliResult<Artifact> {
    let kind = match args.name {
        ScenarioName::Spin => TwoLevelKind::SpinLarmor { omega0: args.omega0 },
        _ => TwoLevelKind::EprSinglet { omega0: args.omega0 },
    };
    let sc = TwoLevelScenario::new(kind, args.length, args.velocity)?;
    let coh = two_level_coherence(&sc, p);
    let t_max = args.t_max.unwrap_or(sc.transit_time());
    let times = grid(0.0, t_max, args.steps)?;
    let (spec, rho0) = sc.system(p.hbar())?;
    let (i, j) = sc.coherence_element();
    let sx = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
    let probe = match kind {
        TwoLevelKind::EprSinglet { .. } => kron(&sx, &sx),
        _ => sx,
    };
    let mut s = TimeSeries::new(times.clone())?;
    let (mut coherence, mut survival, mut corr, mut pops) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &t in &times {
        let rho = propagate_closed_form(&rho0, &spec, p, t)?;
        coherence.push(rho.get(i, j) / rho0.get(i, j).norm());
        survival.push((-coh.gamma * t).exp());
        corr.push(expectation(&rho, &probe)?);
        pops.push((rho.get(i, i).re, rho.get(j, j).re));
    }
    s.add_complex_channel("coherence", &coherence)?;
    s.add_channel("coherence_abs", coherence.iter().map(|z| z.norm()).collect())?;
    s.add_channel("survival", survival)?;
    match kind {
        TwoLevelKind::EprSinglet { .. } => {
            s.add_channel("sxsx", corr)?;
            s.add_channel("p_pm", pops.iter().map(|q| q.0).collect())?;
            s.add_channel("p_mp", pops.iter().map(|q| q.1).collect())?;
        }
        _ => {
            s.add_channel("sx", corr)?;
        }
    }
    meta.push(format!(
        "{}: omega0 = {}, L = {}, v = {}, transit time = {}",
        if matches!(kind, TwoLevelKind::EprSinglet { .. }) { "epr singlet" } else { "spin" },
        num(args.omega0),
        num(args.length),
        num(args.velocity),
        num(sc.transit_time())
    ));
    meta.push(format!("gamma = {}, nu = {}, survival after transit = {}", num(coh.gamma), num(coh.nu), num(coh.survival)));
    meta.extend(cronon_note(&times, p));
    Ok(Artifact::Series(s))
}

fn rabi(args: &ScenarioArgs, p: &DecoherenceParams, meta: &mut Vec<String>) -> CliResult<Artifact> {
    let sc = TwoLevelScenario::new(TwoLevelKind::RabiFock { g: args.g, n_photons: args.n_photons }, 1.0, 1.0)?;
    let coh = two_level_coherence(&sc, p);
    let t_max = args.t_max.unwrap_or(10.0 / coh.gamma);
    let times = grid(0.0, t_max, args.steps)?;
    let d = times.iter().map(|&t| rabi_population_difference(&sc, p, t)).collect::<Result<Vec<_>, _>>()?;
    let mut s = TimeSeries::new(times.clone())?;
    let upper = d.iter().map(|x| 0.5 * (1.0 + x)).collect();
    s.add_channel("d", d)?;
    s.add_channel("p_upper", upper)?;
    s.add_channel("envelope", times.iter().map(|&t| (-coh.gamma * t).exp()).collect())?;
    meta.push(format!(
        "rabi: g = {}, n = {}, Omega = {}, gamma = {}, nu = {}",
        num(args.g),
        args.n_photons,
        num(sc.splitting()),
        num(coh.gamma),
        num(coh.nu)
    ));
    let ns: Vec<u64> = (0..=5).collect();
    let table = rabi_damping_vs_n(args.g, &ns, p)?;
    for (n, g) in &table.rows {
        meta.push(format!("gamma_n {n} {}", num(*g)));
    }
    if let Some(e) = table.exponent {
        meta.push(format!("power-law exponent of gamma_n over n = 0..5: {}", num(e)));
    }
    meta.extend(cronon_note(&times, p));
    Ok(Artifact::Series(s))
}
