//! `verify`: the oracle battery. One row per check.

use crate::config::{RunConfig, Suite};
use crate::table::{Cell, Table};
use crate::CliError;
use coulomb_core::detkernel::{
    gamma_poisson_tail, integration_radius, kernel_diag, remainder_bound, remainder_lhs, scaled_one_point,
    KernelContext,
};
use coulomb_core::equilibrium::{
    annulus_grid, euler_lagrange_constant, euler_lagrange_min_excess, euler_lagrange_residual, polar_grid,
};
use coulomb_core::exactlaws::{beta_ginibre_laws, kostlan_moduli, spectral_radius_sample};
use coulomb_core::quadrature::integrate_polar;
use coulomb_core::rmt::{ginibre_eigs, spherical_eigs, stereographic_lift};
use coulomb_core::sampler::run_parallel_chains;
use coulomb_core::special::gamma_p;
use coulomb_core::stats::{clt_variance, ks_test, ks_test_cdf, ks_two_sample, mean_var, sphere_z_uniformity};
use coulomb_core::{
    equilibrium_for, rng_from_seed, Complex64, DistributionSpec, EquilibriumLabel, GasParameters, GofReport,
    Potential, SamplerConfig, TestFunction,
};
use rayon::prelude::*;
use std::f64::consts::PI;

/// How `value` is compared with `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Pass iff `value > threshold` (p-values).
    Above,
    /// Pass iff `value <= threshold` (residuals).
    AtMost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check_id: &'static str,
    pub statistic: f64,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(check_id: &'static str, statistic: f64, value: f64, threshold: f64, rule: Rule) -> Self {
        let pass = match rule {
            Rule::Above => value > threshold,
            Rule::AtMost => value <= threshold,
        };
        CheckRow { check_id, statistic, value, threshold, pass }
    }

    fn from_gof(check_id: &'static str, r: &GofReport, level: f64) -> Self {
        Self::new(check_id, r.statistic, r.p_value.unwrap_or(f64::NAN), level, Rule::Above)
    }
}

type CheckFn = fn(u64, bool) -> Result<CheckRow, CliError>;

struct Check {
    id: &'static str,
    deterministic: bool,
    run: CheckFn,
}

const LEVEL: f64 = 0.01;

const CHECKS: [Check; 13] = [
    Check { id: "beta_ginibre_sum_sq", deterministic: false, run: beta_ginibre_sum_sq },
    Check { id: "beta_ginibre_sum", deterministic: false, run: beta_ginibre_sum },
    Check { id: "kostlan_cross", deterministic: false, run: kostlan_cross },
    Check { id: "circular_law_bulk", deterministic: true, run: circular_law_bulk },
    Check { id: "circular_law_exterior", deterministic: true, run: circular_law_exterior },
    Check { id: "series_bound", deterministic: true, run: series_bound },
    Check { id: "gamma_poisson", deterministic: true, run: gamma_poisson },
    Check { id: "euler_lagrange_support", deterministic: true, run: euler_lagrange_support },
    Check { id: "euler_lagrange_outside", deterministic: true, run: euler_lagrange_outside },
    Check { id: "determinantal_mass", deterministic: true, run: determinantal_mass },
    Check { id: "edge_exact_law", deterministic: false, run: edge_exact_law },
    Check { id: "clt_variance", deterministic: false, run: clt_variance_check },
    Check { id: "spherical_lift", deterministic: false, run: spherical_lift },
];

/// Check identifiers of `suite`, in report order.
pub fn suite_ids(suite: Suite) -> Vec<&'static str> {
    CHECKS.iter().filter(|c| suite != Suite::Deterministic || c.deterministic).map(|c| c.id).collect()
}

/// Number of rows `suite` reports.
pub fn suite_size(suite: Suite) -> usize {
    suite_ids(suite).len()
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckRow>, CliError> {
    let corrupt = suite == Suite::SelfTest;
    let selected: Vec<(usize, &Check)> =
        CHECKS.iter().enumerate().filter(|(_, c)| suite != Suite::Deterministic || c.deterministic).collect();
    selected
        .into_par_iter()
        .map(|(k, c)| (c.run)(seed.wrapping_mul(1000).wrapping_add(100 * k as u64), corrupt))
        .collect()
}

pub fn report_table(cfg: &RunConfig, rows: &[CheckRow]) -> Table {
    let mut t = Table::new(
        ["check_id", "statistic", "p_value_or_residual", "threshold", "pass"].map(String::from).to_vec(),
    );
    t.metadata = vec![
        ("suite".into(), cfg.suite.name().into()),
        ("seed".into(), cfg.seed.to_string()),
        ("version".into(), crate::VERSION.into()),
    ];
    for r in rows {
        t.rows.push(vec![
            Cell::Text(r.check_id.into()),
            Cell::Float(r.statistic),
            Cell::Float(r.value),
            Cell::Float(r.threshold),
            Cell::Bool(r.pass),
        ]);
    }
    t
}

fn beta_ginibre_chains(seed: u64) -> Result<Vec<coulomb_core::Configuration>, CliError> {
    let p = GasParameters::beta_ginibre(8, 2.0)?;
    let sc = SamplerConfig { burn_in: 20_000, thin: 200, seed, ..SamplerConfig::default() };
    Ok(run_parallel_chains(&p, &sc, 4, 1000)?.into_iter().flat_map(|o| o.samples).collect())
}

fn beta_ginibre_sum_sq(seed: u64, corrupt: bool) -> Result<CheckRow, CliError> {
    let samples = beta_ginibre_chains(seed)?;
    let (_, mut gamma) = beta_ginibre_laws(8, 2.0)?;
    if corrupt {
        if let DistributionSpec::Gamma { shape, rate } = gamma {
            gamma = DistributionSpec::gamma(shape + 1.0, rate)?;
        }
    }
    let s: Vec<f64> = samples.iter().map(|c| c.sum_sq()).collect();
    Ok(CheckRow::from_gof("beta_ginibre_sum_sq", &ks_test(&s, &gamma)?, LEVEL))
}

fn beta_ginibre_sum(seed: u64, _: bool) -> Result<CheckRow, CliError> {
    let samples = beta_ginibre_chains(seed)?;
    let (normal, _) = beta_ginibre_laws(8, 2.0)?;
    let s: Vec<f64> = samples.iter().map(|c| c.sum()[0]).collect();
    Ok(CheckRow::from_gof("beta_ginibre_sum", &ks_test(&s, &normal)?, LEVEL))
}

fn kostlan_cross(seed: u64, _: bool) -> Result<CheckRow, CliError> {
    let n = 16;
    let mut rng = rng_from_seed(seed);
    let mut matrix = vec![];
    let mut kostlan = vec![];
    for _ in 0..500 {
        let s = ginibre_eigs(n, &mut rng)?;
        matrix.extend(s.moduli().iter().map(|r| r / s.scaling));
        kostlan.extend(kostlan_moduli(n, &mut rng));
    }
    Ok(CheckRow::from_gof("kostlan_cross", &ks_two_sample(&matrix, &kostlan)?, LEVEL))
}

fn ring(r0: f64, r1: f64) -> Vec<Complex64> {
    (0..=80)
        .flat_map(|i| (0..4).map(move |k| Complex64::from_polar(r0 + (r1 - r0) * i as f64 / 80.0, 0.4 + k as f64 * PI / 2.0)))
        .collect()
}

fn circular_law_bulk(_: u64, _: bool) -> Result<CheckRow, CliError> {
    let ctx = KernelContext::new(1000)?;
    let sup = ring(0.0, 0.8).iter().map(|&z| (PI * scaled_one_point(&ctx, z) - 1.0).abs()).fold(0.0, f64::max);
    Ok(CheckRow::new("circular_law_bulk", sup, sup, 1e-6, Rule::AtMost))
}

fn circular_law_exterior(_: u64, _: bool) -> Result<CheckRow, CliError> {
    let ctx = KernelContext::new(1000)?;
    let sup = ring(1.2, 2.0).iter().map(|&z| scaled_one_point(&ctx, z)).fold(0.0, f64::max);
    Ok(CheckRow::new("circular_law_exterior", sup, sup, 1e-6, Rule::AtMost))
}

fn series_bound(_: u64, _: bool) -> Result<CheckRow, CliError> {
    let mut violations = 0usize;
    let mut worst: f64 = 0.0;
    for n in [2, 5, 10, 30] {
        for i in 0..40 {
            for k in 0..40 {
                let z = Complex64::from_polar(2.0 * i as f64 / 39.0, 2.0 * PI * k as f64 / 40.0);
                let (lhs, rhs) = (remainder_lhs(n, z), remainder_bound(n, z));
                violations += (lhs > rhs) as usize;
                if rhs > 0.0 {
                    worst = worst.max(lhs / rhs);
                }
            }
        }
    }
    Ok(CheckRow::new("series_bound", worst, violations as f64, 0.0, Rule::AtMost))
}

fn gamma_poisson(_: u64, _: bool) -> Result<CheckRow, CliError> {
    let mut worst: f64 = 0.0;
    for n in 1..=30 {
        for r in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let (a, b) = gamma_poisson_tail(n, r)?;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(CheckRow::new("gamma_poisson", worst, worst, 1e-12, Rule::AtMost))
}

fn euler_lagrange_support(_: u64, _: bool) -> Result<CheckRow, CliError> {
    let v = Potential::ginibre();
    let m = equilibrium_for(EquilibriumLabel::UniformDisc)?;
    let grid = polar_grid(1.0, 10, 10);
    let c = euler_lagrange_constant(&v, &m, &grid)?;
    let residual = euler_lagrange_residual(&v, &m, &grid)?;
    Ok(CheckRow::new("euler_lagrange_support", c, residual, 1e-12, Rule::AtMost))
}

fn euler_lagrange_outside(_: u64, _: bool) -> Result<CheckRow, CliError> {
    let v = Potential::ginibre();
    let m = equilibrium_for(EquilibriumLabel::UniformDisc)?;
    let c = euler_lagrange_constant(&v, &m, &polar_grid(1.0, 10, 10))?;
    let excess = euler_lagrange_min_excess(&v, &m, &annulus_grid(1.0, 3.0, 10, 5), c)?;
    Ok(CheckRow::new("euler_lagrange_outside", excess, (-excess).max(0.0), 0.0, Rule::AtMost))
}

fn determinantal_mass(_: u64, _: bool) -> Result<CheckRow, CliError> {
    let mut worst: f64 = 0.0;
    for n in [1, 2, 5] {
        let ctx = KernelContext::new(n)?;
        let total = integrate_polar(
            |r, t| kernel_diag(&ctx, Complex64::from_polar(r, t)),
            integration_radius(n, 1e-18),
            64,
            1e-11,
            1e-11,
        )?;
        worst = worst.max((total - n as f64).abs());
    }
    Ok(CheckRow::new("determinantal_mass", worst, worst, 1e-6, Rule::AtMost))
}

/// Scaled spectral radius against its exact finite-`n` law
/// `P(rho <= r) = prod_k P(Gamma(k, 1) <= n r^2)`.
fn edge_exact_law(seed: u64, _: bool) -> Result<CheckRow, CliError> {
    let n = 200;
    let mut rng = rng_from_seed(seed);
    let rho: Vec<f64> = (0..2000).map(|_| spectral_radius_sample(n, &mut rng)).collect();
    let cdf = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let x = n as f64 * r * r;
        (1..=n).map(|k| gamma_p(k as f64, x).unwrap_or(f64::NAN).ln()).sum::<f64>().exp()
    };
    Ok(CheckRow::from_gof("edge_exact_law", &ks_test_cdf(&rho, cdf, "product of Gamma CDFs")?, LEVEL))
}

fn clt_variance_check(seed: u64, _: bool) -> Result<CheckRow, CliError> {
    let n = 256;
    let draws = 2000;
    let mut rng = rng_from_seed(seed);
    let stat: Vec<f64> =
        (0..draws).map(|_| kostlan_moduli(n, &mut rng).iter().map(|r| r * r).sum::<f64>() / n as f64).collect();
    let (_, var) = mean_var(&stat);
    let limit = clt_variance(&TestFunction::modulus_squared())?;
    let allowed = 0.01 + 3.0 * var * (2.0 / (draws as f64 - 1.0)).sqrt();
    Ok(CheckRow::new("clt_variance", var, (var - limit).abs(), allowed, Rule::AtMost))
}

fn spherical_lift(seed: u64, _: bool) -> Result<CheckRow, CliError> {
    let mut rng = rng_from_seed(seed);
    let mut lifted = vec![];
    for _ in 0..200 {
        lifted.extend(spherical_eigs(16, &mut rng)?.eigenvalues.into_iter().map(stereographic_lift));
    }
    Ok(CheckRow::from_gof("spherical_lift", &sphere_z_uniformity(&lifted)?, LEVEL))
}
