//! `sample`: configurations of a gas or spectra of a random matrix model.

use crate::config::{Ensemble, RunConfig, SchemeArg};
use crate::table::{Cell, Table};
use crate::CliError;
use coulomb_core::rmt::{ginibre_eigs, product_ginibre_eigs, spherical_eigs, truncated_unitary_eigs};
use coulomb_core::sampler::{matching_preset, run_parallel_chains};
use coulomb_core::{
    equilibrium_for, rng_from_seed, Dimension, EquilibriumLabel, EquilibriumMeasure, GasParameters, Potential,
    SamplerConfig, Scheme, SpectrumSample,
};
use rayon::prelude::*;

/// One sampled particle: `(sample_index, particle_index, coordinates)`.
pub type Row = (usize, usize, Vec<f64>);

pub fn gas_parameters(cfg: &RunConfig) -> Result<GasParameters, CliError> {
    Ok(match cfg.ensemble {
        Ensemble::Coulomb => GasParameters::new(
            Dimension::new(cfg.dim)?,
            cfg.n,
            cfg.beta,
            Potential::Quadratic { gamma: 0.5 },
        )?,
        Ensemble::Hermite => GasParameters::real_hermite(cfg.n, cfg.beta)?,
        other => return Err(CliError::Usage(format!("ensemble `{other}` is not sampled by MCMC"))),
    })
}

/// Number of coordinates per output row.
pub fn output_dim(cfg: &RunConfig) -> usize {
    match cfg.ensemble {
        Ensemble::Coulomb => cfg.dim,
        Ensemble::Hermite => 1,
        _ => 2,
    }
}

/// Large-`n` limit of the empirical measure of the samples written by
/// [`sample_rows`].
pub fn limit_measure(cfg: &RunConfig) -> Result<EquilibriumMeasure, CliError> {
    let m = match cfg.ensemble {
        Ensemble::Coulomb | Ensemble::Hermite => matching_preset(&gas_parameters(cfg)?)
            .ok_or_else(|| CliError::Usage("no tabulated equilibrium measure".into()))?,
        Ensemble::Ginibre => equilibrium_for(EquilibriumLabel::UniformDisc)?,
        Ensemble::Spherical => equilibrium_for(EquilibriumLabel::SphericalHeavyTail)?,
        Ensemble::Truncated => {
            equilibrium_for(EquilibriumLabel::TruncationLimit { alpha: cfg.n as f64 / cfg.resolved_m() as f64 })?
        }
        Ensemble::Product => equilibrium_for(EquilibriumLabel::ProductLimit { m: cfg.resolved_m() as u32 })?,
    };
    Ok(m)
}

fn sampler_config(cfg: &RunConfig) -> SamplerConfig {
    SamplerConfig {
        scheme: match cfg.scheme {
            SchemeArg::Mh => Scheme::MetropolisSingle,
            SchemeArg::Mala => Scheme::Mala,
        },
        burn_in: cfg.burn_in,
        thin: cfg.thin,
        seed: cfg.seed,
        ..SamplerConfig::default()
    }
}

fn spectrum(cfg: &RunConfig, k: usize) -> Result<SpectrumSample, CliError> {
    let mut rng = rng_from_seed(cfg.seed.wrapping_add(k as u64));
    let n = cfg.n;
    Ok(match cfg.ensemble {
        Ensemble::Ginibre => ginibre_eigs(n, &mut rng)?,
        Ensemble::Spherical => spherical_eigs(n, &mut rng)?,
        Ensemble::Truncated => truncated_unitary_eigs(n, cfg.resolved_m(), &mut rng)?,
        Ensemble::Product => product_ginibre_eigs(n, cfg.resolved_m(), &mut rng)?,
        Ensemble::Coulomb | Ensemble::Hermite => unreachable!("gas ensembles use the sampler"),
    })
}

/// Rows in canonical order: sorted by sample index, then particle index.
/// Gas ensembles run `chains` chains of `samples` draws each (chain `c`
/// uses seed `seed + c`); matrix ensembles draw `samples` matrices, the
/// `k`-th from seed `seed + k`.
pub fn sample_rows(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let mut rows = vec![];
    if cfg.ensemble.is_gas() {
        let p = gas_parameters(cfg)?;
        let d = output_dim(cfg);
        let outs = run_parallel_chains(&p, &sampler_config(cfg), cfg.chains, cfg.samples)?;
        for (c, out) in outs.iter().enumerate() {
            for (s, conf) in out.samples.iter().enumerate() {
                for (i, x) in conf.points().enumerate() {
                    rows.push((c * cfg.samples + s, i, x[..d].to_vec()));
                }
            }
        }
    } else {
        let spectra: Vec<SpectrumSample> =
            (0..cfg.samples).into_par_iter().map(|k| spectrum(cfg, k)).collect::<Result<_, _>>()?;
        for (s, spec) in spectra.iter().enumerate() {
            for (i, z) in spec.eigenvalues.iter().enumerate() {
                rows.push((s, i, vec![z.re, z.im]));
            }
        }
    }
    Ok(rows)
}

pub fn sample_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let d = output_dim(cfg);
    let mut columns = vec!["sample_index".to_string(), "particle_index".to_string()];
    columns.extend((1..=d).map(|k| format!("coord_{k}")));
    let mut table = Table::new(columns);
    table.metadata = cfg.metadata().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    table.metadata.push(("version".into(), crate::VERSION.into()));
    for (s, i, x) in sample_rows(cfg)? {
        let mut row = vec![Cell::Int(s as u64), Cell::Int(i as u64)];
        row.extend(x.into_iter().map(Cell::Float));
        table.rows.push(row);
    }
    Ok(table)
}
