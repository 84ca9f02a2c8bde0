//! Subcommands other than `scenario`.

use decohere_core::evolution::{damping_rate, frequency_shift, propagate_closed_form};
use decohere_core::observables::averaged_expectation;
use decohere_core::series::linspace;
use decohere_core::trajectories::{mc_estimate_density, mc_estimate_observable, sample_rng, RNG_DESCRIPTION};
use decohere_core::waiting_time::{gaussian_approximation, gamma_pdf};
use decohere_core::{
    bohr_frequencies, expectation, tm_check, CMatrix, Complex64, DecoherenceParams, DensityMatrix, GammaLaw,
    McConfig, SpectralHamiltonian, TimeSeries, TmReport,
};
use rand::Rng;

use crate::config::System;
use crate::error::{CliError, CliResult};
use crate::output::{cronon_note, header, num, Artifact, Report, Table};

fn element_name(r: usize, c: usize) -> String {
    format!("rho_{r}_{c}")
}

/// Rates of every energy-basis pair, for the metadata block.
fn rate_lines(spec: &SpectralHamiltonian, params: &DecoherenceParams) -> Vec<String> {
    let freqs = bohr_frequencies(spec, params);
    let e = spec.eigenvalues();
    let mut lines = vec![format!(
        "energies (ascending): {}",
        e.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
    )];
    lines.push("pair rates: n m omega gamma nu (energy basis)".to_string());
    for (n, m, w) in freqs.pairs() {
        lines.push(format!(
            "rate {n} {m} {} {} {}",
            num(w),
            num(damping_rate(w, params)),
            num(frequency_shift(w, params))
        ));
    }
    lines
}

fn common_metadata(command: &str, sys: &System, seed: Option<u64>) -> Vec<String> {
    let mut meta = header(command, Some(&sys.params));
    meta.push(match seed {
        Some(s) => format!("seed = {s}"),
        None => "seed = none".to_string(),
    });
    meta.extend(rate_lines(&sys.spec, &sys.params));
    meta.extend(cronon_note(&sys.times, &sys.params));
    meta
}

pub fn evolve(sys: &System, tracked: &[[usize; 2]], seed: Option<u64>) -> CliResult<Report> {
    let states: Vec<DensityMatrix> = sys
        .times
        .iter()
        .map(|&t| propagate_closed_form(&sys.rho0, &sys.spec, &sys.params, t))
        .collect::<Result<_, _>>()?;
    let mut series = TimeSeries::new(sys.times.clone())?;
    for &[r, c] in tracked {
        let values: Vec<Complex64> = states.iter().map(|s| s.get(r, c)).collect();
        series.add_complex_channel(&element_name(r, c), &values)?;
    }
    for (name, a) in &sys.observables {
        let values = states.iter().map(|s| expectation(s, a)).collect::<Result<Vec<_>, _>>()?;
        series.add_channel(name.clone(), values)?;
    }
    Ok(Report { metadata: common_metadata("evolve", sys, seed), data: Artifact::Series(series) })
}

pub fn rates(omegas: &[f64], params: &DecoherenceParams) -> CliResult<Report> {
    let mut table = Table::new(["omega", "gamma", "nu"]);
    for &w in omegas {
        if !w.is_finite() {
            return Err(CliError::config(format!("--omega: values must be finite, got {w}")));
        }
        let (g, nu) = (damping_rate(w, params), frequency_shift(w, params));
        if !g.is_finite() || !nu.is_finite() {
            return Err(CliError::numeric(format!("rates at omega = {w:e} are not representable")));
        }
        table.push(vec![w, g, nu]);
    }
    Ok(Report { metadata: header("rates", Some(params)), data: Artifact::Table(table) })
}

pub fn dist(t: f64, params: &DecoherenceParams, grid: (f64, f64, usize)) -> CliResult<Report> {
    let law = GammaLaw::at_time(t, params)?;
    let points = linspace(grid.0, grid.1, grid.2).map_err(|e| CliError::from(e).at("--grid"))?;
    if grid.0 < 0.0 {
        return Err(CliError::config("--grid: effective times start at 0"));
    }
    let gauss = gaussian_approximation(t, params).ok();
    let mut cols = vec!["t_prime", "pdf", "cdf"];
    if gauss.is_some() {
        cols.push("gaussian_pdf");
    }
    let mut table = Table::new(cols);
    for &tp in &points {
        let mut row = vec![tp, gamma_pdf(tp, t, params)?.value(), law.cdf(tp)];
        if let Some(g) = &gauss {
            row.push(g.pdf(tp));
        }
        table.push(row);
    }
    let mut meta = header("dist", Some(params));
    meta.push(format!("t = {}, shape = {}, scale = {}", num(t), num(law.shape()), num(law.scale())));
    meta.push(format!("mean = {}, sigma = {}", num(law.mean()), num(law.variance().sqrt())));
    if gauss.is_none() {
        meta.push("gaussian approximation omitted: needs t / tau2 > 1".to_string());
    }
    Ok(Report { metadata: meta, data: Artifact::Table(table) })
}

pub fn mc(sys: &System, tracked: &[[usize; 2]], samples: usize, seed: u64, workers: usize) -> CliResult<Report> {
    if samples < 2 {
        return Err(CliError::config(format!("--samples: at least 2 samples are required, got {samples}")));
    }
    let cfg = McConfig::new(samples, seed).with_workers(workers);
    let n_obs = sys.observables.len();
    let mut elem = vec![[Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new()]; tracked.len()];
    let mut obs = vec![[Vec::new(), Vec::new(), Vec::new()]; n_obs];
    for &t in &sys.times {
        let exact = propagate_closed_form(&sys.rho0, &sys.spec, &sys.params, t)?;
        // the law degenerates at t = 0; the state is then known exactly
        let est = if t > 0.0 { Some(mc_estimate_density(&sys.rho0, &sys.spec, &sys.params, t, &cfg)?) } else { None };
        for (k, &[r, c]) in tracked.iter().enumerate() {
            let (z, se) = match &est {
                Some(e) => (e.estimate[(r, c)], e.stderr[(r, c)]),
                None => (sys.rho0.get(r, c), 0.0),
            };
            let ex = exact.get(r, c);
            for (col, v) in elem[k].iter_mut().zip([z.re, z.im, se, ex.re, ex.im]) {
                col.push(v);
            }
        }
        for (k, (_, a)) in sys.observables.iter().enumerate() {
            let (v, se) = if t > 0.0 {
                let s = mc_estimate_observable(&sys.rho0, &sys.spec, &sys.params, a, t, &cfg)?;
                (s.value, s.stderr)
            } else {
                (expectation(&sys.rho0, a)?, 0.0)
            };
            let ex = averaged_expectation(&sys.rho0, &sys.spec, &sys.params, a, t)?;
            for (col, v) in obs[k].iter_mut().zip([v, se, ex]) {
                col.push(v);
            }
        }
    }
    let mut series = TimeSeries::new(sys.times.clone())?;
    for (k, &[r, c]) in tracked.iter().enumerate() {
        let base = element_name(r, c);
        let [re, im, se, ere, eim] = elem[k].clone();
        series.add_channel(format!("{base}_re"), re)?;
        series.add_channel(format!("{base}_im"), im)?;
        series.add_channel(format!("{base}_stderr"), se)?;
        series.add_channel(format!("{base}_exact_re"), ere)?;
        series.add_channel(format!("{base}_exact_im"), eim)?;
    }
    for (k, (name, _)) in sys.observables.iter().enumerate() {
        let [v, se, ex] = obs[k].clone();
        series.add_channel(name.clone(), v)?;
        series.add_channel(format!("{name}_stderr"), se)?;
        series.add_channel(format!("{name}_exact"), ex)?;
    }
    let mut meta = common_metadata("mc", sys, Some(seed));
    meta.push(format!("samples = {samples}"));
    meta.push(format!("rng: {RNG_DESCRIPTION}"));
    meta.push("stderr: standard error of the complex sample mean, sqrt(sum |z - mean|^2 / ((n - 1) n))".to_string());
    Ok(Report { metadata: meta, data: Artifact::Series(series) })
}

const TM_COLUMNS: [&str; 11] = [
    "t",
    "delta_a_bar",
    "sigma_a",
    "sigma_h",
    "tau_e",
    "lhs",
    "rhs",
    "slack",
    "satisfied",
    "tau_e_infinite",
    "sigma_a_degenerate",
];

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn tm_row(t: f64, r: &TmReport) -> Vec<f64> {
    vec![
        t,
        r.delta_a_bar,
        r.sigma_a,
        r.sigma_h,
        r.tau_e,
        r.lhs,
        r.rhs,
        r.slack,
        flag(r.satisfied),
        flag(r.tau_e_infinite),
        flag(r.sigma_a_degenerate),
    ]
}

/// Result of an inequality check; `violated` means exit code 3 after the
/// report is written.
pub struct TmOutcome {
    pub report: Report,
    pub violations: usize,
}

pub fn tm_single(sys: &System, observable: &str, t: f64, seed: Option<u64>) -> CliResult<TmOutcome> {
    let a = if observable == "H" {
        sys.spec.matrix()
    } else {
        sys.observables
            .iter()
            .find(|(name, _)| name == observable)
            .map(|(_, m)| m.clone())
            .ok_or_else(|| CliError::config(format!("--observable: no observable named {observable:?} in the configuration")))?
    };
    let rep = tm_check(&sys.rho0, &sys.spec, &sys.params, &a, t)?;
    let mut table = Table::new(TM_COLUMNS);
    table.push(tm_row(t, &rep));
    let mut meta = header("tm-check", Some(&sys.params));
    meta.push(format!("observable = {observable}"));
    meta.push(match seed {
        Some(s) => format!("seed = {s}"),
        None => "seed = none".to_string(),
    });
    meta.push("inequality: |A(t) - A(t - tau2)| / sigma_A <= tau1 / tau_E, tau_E = hbar / (2 sigma_H)".to_string());
    Ok(TmOutcome { report: Report { metadata: meta, data: Artifact::Table(table) }, violations: usize::from(!rep.satisfied) })
}

fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&g + g.adjoint()).scale(0.5)
}

/// Randomized sweep over systems of dimension 2 to 4.
pub fn tm_fuzz(trials: usize, seed: u64) -> CliResult<TmOutcome> {
    let mut cols = vec!["trial", "dim", "tau1", "tau2"];
    cols.extend(TM_COLUMNS);
    let mut table = Table::new(cols);
    let mut violations = 0;
    for trial in 0..trials {
        let mut rng = sample_rng(seed, trial as u64);
        let n = rng.random_range(2..=4usize);
        let a = 10f64.powf(rng.random_range(-3.0..0.0));
        let b = 10f64.powf(rng.random_range(-3.0..0.0));
        let params = DecoherenceParams::new(a.min(b), a.max(b))?;
        let scale = rng.random_range(0.01..10.0) / params.tau1();
        let h = random_hermitian(&mut rng, n).scale(scale);
        let spec = decohere_core::diagonalize_hamiltonian(&h)?;
        let g = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = &g * g.adjoint();
        let rho0 = DensityMatrix::new(&m / m.trace())?;
        let obs = random_hermitian(&mut rng, n);
        let t = params.tau2() * rng.random_range(1.0..20.0);
        let rep = tm_check(&rho0, &spec, &params, &obs, t)?;
        violations += usize::from(!rep.satisfied);
        let mut row = vec![trial as f64, n as f64, params.tau1(), params.tau2()];
        row.extend(tm_row(t, &rep));
        table.push(row);
    }
    let mut meta = header("tm-check --fuzz", None);
    meta.push(format!("trials = {trials}, seed = {seed}, violations = {violations}"));
    meta.push(format!("rng: {RNG_DESCRIPTION}"));
    Ok(TmOutcome { report: Report { metadata: meta, data: Artifact::Table(table) }, violations })
}
