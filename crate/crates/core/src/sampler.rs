//! Markov chains targeting the Coulomb gas law `exp(-beta E_n)`.

use crate::equilibrium::{equilibrium_for, EquilibriumLabel};
use crate::error::{invalid, Error, Result};
use crate::kernel::{energy_delta, gradient_of, Configuration, GasParameters, Potential};
use crate::{rng_from_seed, SimRng};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// One uniformly chosen particle per step, Gaussian displacement.
    MetropolisSingle,
    /// Metropolis-adjusted Langevin on all particles at once.
    Mala,
}

/// Chain settings. `burn_in` and `thin` count steps (single-particle moves
/// for [`Scheme::MetropolisSingle`], global moves for [`Scheme::Mala`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub scheme: Scheme,
    pub step: f64,
    pub adapt: bool,
    pub target_acceptance: f64,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            scheme: Scheme::MetropolisSingle,
            step: 0.2,
            adapt: true,
            target_acceptance: 0.4,
            burn_in: 20_000,
            thin: 100,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(invalid("step", format!("must be positive, got {}", self.step)));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(invalid("target_acceptance", format!("must lie in (0,1), got {}", self.target_acceptance)));
        }
        if self.thin == 0 {
            return Err(invalid("thin", "must be >= 1"));
        }
        Ok(())
    }
}

/// Steps between full energy recomputations.
pub const REFRESH_EVERY: u64 = 10_000;
/// Burn-in steps per adaptation window.
pub const ADAPT_WINDOW: u64 = 50;
const ADAPT_FACTOR: f64 = 1.01;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub cfg: Configuration,
    pub step_count: u64,
    pub accept_count: u64,
    pub current_step_size: f64,
}

impl ChainState {
    pub fn new(cfg: Configuration, step: f64) -> Self {
        ChainState { cfg, step_count: 0, accept_count: 0, current_step_size: step }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.step_count == 0 {
            0.0
        } else {
            self.accept_count as f64 / self.step_count as f64
        }
    }
}

/// Per-sample traces and bookkeeping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub energy: Vec<f64>,
    pub sum_sq: Vec<f64>,
    /// Largest relative drift of the cached energy seen at a refresh.
    pub max_energy_drift: f64,
    /// Step size after burn-in.
    pub final_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub samples: Vec<Configuration>,
    /// Acceptance rate over the sampling phase (after burn-in).
    pub acceptance_rate: f64,
    pub diagnostics: Diagnostics,
}

/// `min(1, exp(-beta delta))`.
pub fn mh_acceptance(delta: f64, beta: f64) -> f64 {
    (-beta * delta).exp().min(1.0)
}

fn accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    let u: f64 = rng.random();
    log_ratio >= 0.0 || u < log_ratio.exp()
}

/// One single-particle Metropolis step. Returns whether the move was
/// accepted; colliding proposals are rejected.
pub fn mh_step<R: Rng + ?Sized>(state: &mut ChainState, p: &GasParameters, rng: &mut R) -> Result<bool> {
    let n = state.cfg.n();
    let d = state.cfg.dim();
    let i = rng.random_range(0..n);
    let h = state.current_step_size;
    let mut x_new = state.cfg.point(i).to_vec();
    let active = if p.line_constrained { 1 } else { d };
    for v in x_new.iter_mut().take(active) {
        let xi: f64 = StandardNormal.sample(rng);
        *v += h * xi;
    }
    state.step_count += 1;
    let delta = match energy_delta(&state.cfg, i, &x_new, p) {
        Ok(v) => v,
        Err(Error::Collision(..)) => return Ok(false),
        Err(e) => return Err(e),
    };
    if delta.is_finite() && accept(-p.beta * delta, rng) {
        state.cfg.apply_move(i, &x_new, delta);
        state.accept_count += 1;
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Tamed drift `grad E / (1 + h |grad E| / n)`.
pub fn tamed_drift(grad: &[f64], h: f64, n: usize) -> Vec<f64> {
    let norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
    let s = 1.0 / (1.0 + h * norm / n as f64);
    grad.iter().map(|v| v * s).collect()
}

fn masked_drift(coords: &[f64], p: &GasParameters, h: f64, d: usize) -> Result<Vec<f64>> {
    let mut grad = gradient_of(coords, p)?;
    if p.line_constrained {
        for (k, v) in grad.iter_mut().enumerate() {
            if k % d != 0 {
                *v = 0.0;
            }
        }
    }
    Ok(tamed_drift(&grad, h, p.n))
}

/// `log q(to | from)` up to a constant, for the Langevin proposal.
fn log_q(to: &[f64], from: &[f64], drift_from: &[f64], h: f64, beta: f64) -> f64 {
    let s: f64 = to
        .iter()
        .zip(from)
        .zip(drift_from)
        .map(|((y, x), dr)| {
            let r = y - x + h * dr;
            r * r
        })
        .sum();
    -beta * s / (4.0 * h)
}

/// One Metropolis-adjusted Langevin step on all particles.
pub fn mala_step<R: Rng + ?Sized>(state: &mut ChainState, p: &GasParameters, rng: &mut R) -> Result<bool> {
    let d = state.cfg.dim();
    let h = state.current_step_size;
    let x = state.cfg.coords().to_vec();
    let drift_x = masked_drift(&x, p, h, d)?;
    let noise = (2.0 * h / p.beta).sqrt();
    let y: Vec<f64> = x
        .iter()
        .zip(&drift_x)
        .enumerate()
        .map(|(k, (xi, dr))| {
            if p.line_constrained && k % d != 0 {
                return *xi;
            }
            let xi_n: f64 = StandardNormal.sample(rng);
            xi - h * dr + noise * xi_n
        })
        .collect();
    state.step_count += 1;
    let proposal = match Configuration::new(y, p) {
        Ok(c) => c,
        Err(Error::Collision(..)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let drift_y = masked_drift(proposal.coords(), p, h, d)?;
    let log_ratio = -p.beta * (proposal.energy() - state.cfg.energy())
        + log_q(&x, proposal.coords(), &drift_y, h, p.beta)
        - log_q(proposal.coords(), &x, &drift_x, h, p.beta);
    if log_ratio.is_finite() && accept(log_ratio, rng) {
        let e = proposal.energy();
        state.cfg.replace(proposal.coords().to_vec(), e);
        state.accept_count += 1;
        Ok(true)
    } else {
        Ok(false)
    }
}

fn step<R: Rng + ?Sized>(state: &mut ChainState, p: &GasParameters, sc: &SamplerConfig, rng: &mut R) -> Result<bool> {
    match sc.scheme {
        Scheme::MetropolisSingle => mh_step(state, p, rng),
        Scheme::Mala => mala_step(state, p, rng),
    }
}

/// Equilibrium measure matching `p`, when the potential is one of the
/// tabulated cases.
pub fn matching_preset(p: &GasParameters) -> Option<crate::EquilibriumMeasure> {
    let d = p.dim.get();
    match (&p.potential, p.line_constrained) {
        (Potential::Quadratic { gamma }, false) => {
            let base = if d == 2 {
                equilibrium_for(EquilibriumLabel::UniformDisc)
            } else {
                equilibrium_for(EquilibriumLabel::UniformBall(p.dim))
            };
            base.ok()?.dilated((2.0 * gamma).powf(-1.0 / d as f64)).ok()
        }
        (Potential::Quadratic { gamma }, true) => {
            equilibrium_for(EquilibriumLabel::Semicircle).ok()?.dilated(0.5 / gamma.sqrt()).ok()
        }
        (Potential::SphericalLog { .. }, false) if d == 2 => equilibrium_for(EquilibriumLabel::SphericalHeavyTail).ok(),
        _ => None,
    }
}

/// Starting configuration: i.i.d. draws from the matching equilibrium
/// measure, otherwise standard Gaussian points.
pub fn initial_configuration<R: Rng + ?Sized>(p: &GasParameters, rng: &mut R) -> Result<Configuration> {
    let d = p.dim.get();
    for _ in 0..16 {
        let coords: Vec<f64> = match matching_preset(p) {
            Some(m) => m.sample(p.n, rng).into_iter().flat_map(|mut x| {
                x.resize(d, 0.0);
                x
            }).collect(),
            None => (0..p.n * d)
                .map(|k| {
                    if p.line_constrained && k % d != 0 {
                        0.0
                    } else {
                        StandardNormal.sample(rng)
                    }
                })
                .collect(),
        };
        match Configuration::new(coords, p) {
            Ok(c) => return Ok(c),
            Err(Error::Collision(..)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Domain("could not draw a collision-free initial configuration".into()))
}

/// Runs one chain from `initial_configuration`.
pub fn run_chain(p: &GasParameters, sc: &SamplerConfig, n_samples: usize) -> Result<ChainOutput> {
    let mut rng = rng_from_seed(sc.seed);
    let cfg = initial_configuration(p, &mut rng)?;
    run_chain_from(cfg, p, sc, n_samples, &mut rng)
}

/// Runs a chain from a given configuration.
pub fn run_chain_from(
    cfg: Configuration,
    p: &GasParameters,
    sc: &SamplerConfig,
    n_samples: usize,
    rng: &mut SimRng,
) -> Result<ChainOutput> {
    sc.validate()?;
    if n_samples == 0 {
        return Err(invalid("n_samples", "must be >= 1"));
    }
    if cfg.n() != p.n || cfg.dim() != p.dim.get() {
        return Err(invalid("cfg", "configuration does not match the gas parameters"));
    }
    let mut state = ChainState::new(cfg, sc.step);
    let mut diag = Diagnostics::default();
    let mut window_accepts = 0u64;
    for k in 1..=sc.burn_in as u64 {
        if step(&mut state, p, sc, rng)? {
            window_accepts += 1;
        }
        if sc.adapt && k % ADAPT_WINDOW == 0 {
            let rate = window_accepts as f64 / ADAPT_WINDOW as f64;
            if rate > sc.target_acceptance {
                state.current_step_size *= ADAPT_FACTOR;
            } else {
                state.current_step_size /= ADAPT_FACTOR;
            }
            window_accepts = 0;
        }
        refresh_if_due(&mut state, p, &mut diag)?;
    }
    diag.final_step = state.current_step_size;
    let (steps0, accepts0) = (state.step_count, state.accept_count);
    let mut samples = Vec::with_capacity(n_samples);
    for s in 0..n_samples {
        if s > 0 {
            for _ in 0..sc.thin {
                step(&mut state, p, sc, rng)?;
                refresh_if_due(&mut state, p, &mut diag)?;
            }
        }
        diag.energy.push(state.cfg.energy());
        diag.sum_sq.push(state.cfg.sum_sq());
        samples.push(state.cfg.clone());
    }
    let steps = state.step_count - steps0;
    let acceptance_rate = if steps == 0 { 0.0 } else { (state.accept_count - accepts0) as f64 / steps as f64 };
    Ok(ChainOutput { samples, acceptance_rate, diagnostics: diag })
}

fn refresh_if_due(state: &mut ChainState, p: &GasParameters, diag: &mut Diagnostics) -> Result<()> {
    if state.step_count.is_multiple_of(REFRESH_EVERY) {
        let drift = state.cfg.refresh_energy(p)?;
        diag.max_energy_drift = diag.max_energy_drift.max(drift);
    }
    Ok(())
}

/// Runs `n_chains` independent chains; chain `k` uses seed `sc.seed + k`.
/// The result does not depend on the thread count.
pub fn run_parallel_chains(
    p: &GasParameters,
    sc: &SamplerConfig,
    n_chains: usize,
    n_samples: usize,
) -> Result<Vec<ChainOutput>> {
    if n_chains == 0 {
        return Err(invalid("n_chains", "must be >= 1"));
    }
    (0..n_chains as u64)
        .into_par_iter()
        .map(|k| {
            let sc_k = SamplerConfig { seed: sc.seed.wrapping_add(k), ..*sc };
            run_chain(p, &sc_k, n_samples)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{energy_total, Dimension};

    fn quick(scheme: Scheme) -> SamplerConfig {
        SamplerConfig { scheme, burn_in: 2000, thin: 10, seed: 7, ..Default::default() }
    }

    #[test]
    fn acceptance_rule() {
        assert_eq!(mh_acceptance(-3.0, 2.0), 1.0);
        assert_eq!(mh_acceptance(0.0, 2.0), 1.0);
        assert!((mh_acceptance(1.5, 2.0) - (-3.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn two_state_detailed_balance() {
        let p = GasParameters::beta_ginibre(2, 2.0).unwrap();
        let a = Configuration::from_points(&[vec![0.1, 0.0], vec![-0.4, 0.2]], &p).unwrap();
        let b = Configuration::from_points(&[vec![0.6, 0.3], vec![-0.4, 0.2]], &p).unwrap();
        let delta = energy_delta(&a, 0, b.point(0), &p).unwrap();
        // symmetric proposal: flow ratio is the acceptance ratio
        let forward = mh_acceptance(delta, p.beta);
        let backward = mh_acceptance(-delta, p.beta);
        let boltzmann = (-p.beta * (b.energy() - a.energy())).exp();
        assert!((forward / backward - boltzmann).abs() < 1e-12 * boltzmann);
    }

    #[test]
    fn collisions_are_rejected() {
        let p = GasParameters::beta_ginibre(2, 2.0).unwrap();
        let cfg = Configuration::from_points(&[vec![0.0, 0.0], vec![0.5, 0.0]], &p).unwrap();
        assert!(energy_delta(&cfg, 0, &[0.5, 0.0], &p).is_err());
    }

    #[test]
    fn taming_bounds_the_drift() {
        let p = GasParameters::beta_ginibre(2, 2.0).unwrap();
        let coords = vec![0.0, 0.0, 1e-6, 0.0];
        let g = gradient_of(&coords, &p).unwrap();
        for h in [1e-3, 0.1, 10.0] {
            let d = tamed_drift(&g, h, 2);
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(h * norm <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn zero_drift_at_minimum() {
        let p = GasParameters::beta_ginibre(1, 2.0).unwrap();
        let d = masked_drift(&[0.0, 0.0], &p, 1e-8, 2).unwrap();
        assert_eq!(d, vec![0.0, 0.0]);
    }

    #[test]
    fn deterministic_and_seed_separated() {
        let p = GasParameters::beta_ginibre(5, 2.0).unwrap();
        for scheme in [Scheme::MetropolisSingle, Scheme::Mala] {
            let sc = quick(scheme);
            let a = run_chain(&p, &sc, 20).unwrap();
            let b = run_chain(&p, &sc, 20).unwrap();
            assert_eq!(a, b);
            let c = run_chain(&p, &SamplerConfig { seed: 8, ..sc }, 20).unwrap();
            assert_ne!(a.samples, c.samples);
        }
    }

    #[test]
    fn first_sample_is_initializer() {
        let p = GasParameters::beta_ginibre(4, 2.0).unwrap();
        let sc = SamplerConfig { burn_in: 0, thin: 1, seed: 3, ..Default::default() };
        let out = run_chain(&p, &sc, 3).unwrap();
        let init = initial_configuration(&p, &mut rng_from_seed(3)).unwrap();
        assert_eq!(out.samples[0], init);
    }

    #[test]
    fn parallel_matches_sequential() {
        let p = GasParameters::beta_ginibre(4, 1.0).unwrap();
        let sc = quick(Scheme::MetropolisSingle);
        let par = run_parallel_chains(&p, &sc, 3, 10).unwrap();
        for (k, out) in par.iter().enumerate() {
            let seq = run_chain(&p, &SamplerConfig { seed: sc.seed + k as u64, ..sc }, 10).unwrap();
            assert_eq!(*out, seq);
        }
        assert_eq!(run_parallel_chains(&p, &sc, 1, 10).unwrap()[0], run_chain(&p, &sc, 10).unwrap());
        assert!(run_parallel_chains(&p, &sc, 0, 10).is_err());
    }

    #[test]
    fn adapted_acceptance_band() {
        let p = GasParameters::beta_ginibre(8, 2.0).unwrap();
        let sc = SamplerConfig { burn_in: 20_000, thin: 8, seed: 1, ..Default::default() };
        let out = run_chain(&p, &sc, 2000).unwrap();
        assert!((0.2..=0.6).contains(&out.acceptance_rate), "{}", out.acceptance_rate);
        assert!(out.diagnostics.max_energy_drift < 1e-9);
    }

    #[test]
    fn cached_energy_stays_exact() {
        let p = GasParameters::new(Dimension::new(3).unwrap(), 6, 1.5, Potential::Quadratic { gamma: 0.5 }).unwrap();
        let out = run_chain(&p, &quick(Scheme::MetropolisSingle), 50).unwrap();
        for c in &out.samples {
            let fresh = energy_total(c, &p).unwrap();
            assert!((fresh - c.energy()).abs() <= 1e-10 * fresh.abs().max(1.0));
        }
    }

    #[test]
    fn line_constraint_is_kept() {
        let p = GasParameters::real_hermite(5, 2.0).unwrap();
        for scheme in [Scheme::MetropolisSingle, Scheme::Mala] {
            let out = run_chain(&p, &quick(scheme), 20).unwrap();
            assert!(out.samples.iter().all(|c| c.points().all(|x| x[1] == 0.0)));
        }
    }

    #[test]
    fn invalid_configs() {
        let p = GasParameters::beta_ginibre(3, 2.0).unwrap();
        for sc in [
            SamplerConfig { step: 0.0, ..Default::default() },
            SamplerConfig { target_acceptance: 1.0, ..Default::default() },
            SamplerConfig { thin: 0, ..Default::default() },
        ] {
            assert!(run_chain(&p, &sc, 1).is_err());
        }
        assert!(run_chain(&p, &SamplerConfig::default(), 0).is_err());
    }
}
