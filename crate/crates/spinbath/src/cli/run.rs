//! Dispatch from a validated [`RunConfig`] to the owning module, producing a
//! [`ResultEnvelope`].

use std::collections::BTreeMap;

use crate::cli::config::{
    boson_params, ising_params, qubit_density, sweep_spec, time_grid, xy_params, CommandKind,
    Extract, ParamMap, RunConfig,
};
use crate::cli::envelope::{fmt_f64, Cell, Column, ResultEnvelope};
use crate::degeneracy::DegeneracyTable;
use crate::distribution;
use crate::half::HalfInteger;
use crate::series::linear_grid;
use crate::{hp_boson, ising_exact, ising_mf, xy_model, Error, Result};

fn echo_params(map: &ParamMap) -> BTreeMap<String, String> {
    map.clone()
}

fn push_series(
    env: &mut ResultEnvelope,
    unit: &str,
    scaled_times: &[f64],
    series: &crate::series::CoherenceSeries,
    with_pop: bool,
) {
    env.columns = vec![
        Column::new("t", unit),
        Column::new("re_ratio12", "dimensionless"),
        Column::new("im_ratio12", "dimensionless"),
        Column::new("abs_ratio12", "dimensionless"),
    ];
    if with_pop {
        env.columns.push(Column::new("pop11", "dimensionless"));
    }
    for (k, &x) in scaled_times.iter().enumerate() {
        let z = series.ratio12[k];
        let mut row = vec![
            Cell::Num(x),
            Cell::Num(z.re),
            Cell::Num(z.im),
            Cell::Num(z.norm()),
        ];
        if with_pop {
            row.push(Cell::Num(series.pop11[k]));
        }
        env.rows.push(row);
    }
}

fn table_for(n: u32, s: HalfInteger, config: &RunConfig) -> Result<DegeneracyTable> {
    match &config.cache_dir {
        Some(dir) => DegeneracyTable::load_or_build(n, s, dir),
        None => DegeneracyTable::build(n, s),
    }
}

/// Runs one command and collects rows plus diagnostics.
pub fn run(config: &RunConfig) -> Result<ResultEnvelope> {
    let map = &config.params;
    let x = Extract(map);
    let mut env = ResultEnvelope::new(config.command.name(), echo_params(map));
    match config.command {
        CommandKind::Degeneracy => {
            let n = x.u32("n")?;
            let s = x.spin()?;
            let table = table_for(n, s, config)?;
            env.columns = vec![
                Column::new("j", "dimensionless"),
                Column::new("nu", "count"),
            ];
            for (j, nu) in table.entries() {
                env.rows
                    .push(vec![Cell::Num(j.value()), Cell::Text(nu.to_string())]);
            }
            env.push_diag("state_count", table.state_count().to_string());
            env.push_diag("weighted_sum", table.weighted_sum().to_string());
        }
        CommandKind::Distribution => {
            let n = x.u32("n")?;
            let s = x.spin()?;
            let kind = map.get("kind").map(|s| s.as_str()).unwrap_or("exact");
            let (mean, var) = distribution::moments(n, s);
            env.push_diag("gaussian_mean", fmt_f64(mean));
            env.push_diag("gaussian_variance", fmt_f64(var));
            if kind == "exact" {
                let table = table_for(n, s, config)?;
                env.push_diag(
                    "kolmogorov_vs_gaussian",
                    fmt_f64(distribution::kolmogorov_distance(&table)?),
                );
                env.columns = vec![
                    Column::new("j", "dimensionless"),
                    Column::new("pmf", "probability"),
                ];
                for (j, _) in table.entries() {
                    let p = distribution::exact_pmf(&table, *j)?;
                    env.rows.push(vec![Cell::Num(j.value()), Cell::Num(p)]);
                }
            } else {
                let j_max = x.f64_or("j-max", mean + 6.0 * var.sqrt())?;
                let points = x.usize_or("points", 201)?;
                env.columns = vec![
                    Column::new("j", "dimensionless"),
                    Column::new("pdf", "probability density"),
                ];
                for j in linear_grid(0.0, j_max, points)? {
                    env.rows.push(vec![
                        Cell::Num(j),
                        Cell::Num(distribution::gaussian_pdf(n, s, j)),
                    ]);
                }
            }
        }
        CommandKind::XyEvolve => {
            let p = xy_params(map)?;
            let rho0 = qubit_density(map)?;
            let scaled = time_grid(map, 201)?;
            let phys: Vec<f64> = scaled.iter().map(|t| t / p.alpha).collect();
            let series = xy_model::coherence_evolution(&p, &rho0, &phys)?;
            push_series(&mut env, "1/alpha", &scaled, &series, true);
            env.push_diag("psi", fmt_f64(xy_model::asymptotic_coherence(&p)?));
            let tau = xy_model::decoherence_time(&p)?;
            env.push_diag("tau_d", fmt_f64(tau.tau_d));
        }
        CommandKind::XyAsymptote => {
            let p = xy_params(map)?;
            let rho0 = qubit_density(map)?;
            let quad = xy_model::asymptotic_coherence(&p)?;
            let closed = xy_model::asymptotic_coherence_closed(&p)?;
            let pop = xy_model::asymptotic_population(&p, &rho0)?;
            env.columns = vec![
                Column::new("psi_quadrature", "dimensionless"),
                Column::new("psi_closed_form", "dimensionless"),
                Column::new("rho11_infinity", "dimensionless"),
            ];
            env.rows
                .push(vec![Cell::Num(quad), Cell::Num(closed), Cell::Num(pop)]);
            env.push_diag("route_disagreement", fmt_f64((quad - closed).abs()));
        }
        CommandKind::TauD => {
            let p = xy_params(map)?;
            let tau = xy_model::decoherence_time(&p)?;
            env.columns = vec![
                Column::new("tau_d", "1/alpha"),
                Column::new("tau_d_min", "1/alpha"),
            ];
            env.rows.push(vec![
                Cell::Num(tau.tau_d * p.alpha),
                Cell::Num(tau.tau_d_min * p.alpha),
            ]);
            env.push_diag("degenerate", tau.degenerate.to_string());
        }
        CommandKind::HpBoson => {
            let p = boson_params(map)?;
            let scaled = time_grid(map, 201)?;
            let phys: Vec<f64> = scaled.iter().map(|t| t / p.alpha).collect();
            let series = hp_boson::coherence_series(&p, &phys)?;
            push_series(&mut env, "1/alpha", &scaled, &series, false);
        }
        CommandKind::IsingMf => {
            let p = ising_params(map, false)?;
            let sol = ising_mf::solve_order_parameter(&p)?;
            let scaled = time_grid(map, 201)?;
            let phys: Vec<f64> = scaled.iter().map(|t| t / p.j0.abs()).collect();
            let closed_form = matches!(p.s.twice(), 2 | 3 | 4);
            let series = if closed_form {
                ising_mf::g_meanfield(&p, &sol, &phys)?
            } else {
                ising_mf::g_meanfield_oracle(&p, &sol, &phys)?
            };
            push_series(&mut env, "1/J0", &scaled, &series, false);
            if closed_form {
                env.columns.push(Column::new("limit_abs_g_sq", "dimensionless"));
                for (k, row) in env.rows.iter_mut().enumerate() {
                    row.push(Cell::Num(ising_mf::g_meanfield_limit(&p, &sol, phys[k])?));
                }
            }
            env.push_diag("m", fmt_f64(sol.m));
            env.push_diag("theta", fmt_f64(sol.theta));
            env.push_diag("tc", fmt_f64(sol.tc));
            env.push_diag("ordered", sol.ordered.to_string());
            env.push_diag(
                "decay_valid",
                match sol.decay_valid {
                    Some(v) => v.to_string(),
                    None => "n/a".into(),
                },
            );
            env.push_diag(
                "ln_z_per_site",
                fmt_f64(ising_mf::partition_function(&p, sol.m)? / p.n as f64),
            );
        }
        CommandKind::IsingExact => {
            let p = ising_params(map, true)?;
            let table = table_for(p.n, p.s, config)?;
            let scaled = time_grid(map, 201)?;
            let phys: Vec<f64> = scaled.iter().map(|t| t / p.j0.abs()).collect();
            let r = ising_exact::g_exact(&p, &table, &phys)?;
            push_series(&mut env, "1/J0", &scaled, &r.series, false);
            env.push_diag("revival_period", fmt_f64(r.revival_period * p.j0.abs()));
            if r.gaussian_fit_sigma.is_finite() {
                env.push_diag(
                    "gaussian_fit_sigma",
                    fmt_f64(r.gaussian_fit_sigma / (p.j0 * p.j0)),
                );
            }
        }
        CommandKind::Compare => {
            let p = ising_params(map, true)?;
            let points = x.usize_or("points", 1200)?;
            let rep = ising_exact::meanfield_vs_exact(&p, points)?;
            env.columns = vec![
                Column::new("t", "1/J0"),
                Column::new("abs_g_exact", "dimensionless"),
                Column::new("abs_g_meanfield", "dimensionless"),
            ];
            for (k, &t) in rep.times.iter().enumerate() {
                env.rows.push(vec![
                    Cell::Num(t * p.j0.abs()),
                    Cell::Num(rep.exact_abs[k]),
                    Cell::Num(rep.meanfield_abs[k]),
                ]);
            }
            env.push_diag("max_deviation", fmt_f64(rep.max_deviation));
            env.push_diag(
                "exact_revival_amplitude",
                fmt_f64(rep.exact_revival_amplitude),
            );
            env.push_diag(
                "meanfield_monotone",
                rep.meanfield_monotone.to_string(),
            );
            env.push_diag("m", fmt_f64(rep.solution.m));
            env.push_diag("tc", fmt_f64(rep.solution.tc));
        }
        CommandKind::Sweep => {
            let spec = sweep_spec(map)?;
            let mut inner_map = map.clone();
            for k in ["over", "values", "from", "to", "points", "command"] {
                inner_map.remove(k);
            }
            let mut first_cols: Option<Vec<Column>> = None;
            for &v in &spec.values {
                inner_map.insert(spec.over.clone(), format!("{v}"));
                let inner_config = RunConfig {
                    command: spec.inner,
                    params: inner_map.clone(),
                    out: None,
                    format: None,
                    cache_dir: config.cache_dir.clone(),
                };
                let inner_env = run(&inner_config)?;
                let cols = first_cols.get_or_insert_with(|| {
                    let mut cols = vec![Column::new(&spec.over, "swept")];
                    // scalar commands produce a single row
                    cols.extend(inner_env.columns.iter().cloned());
                    cols
                });
                let _ = cols;
                let row0 = inner_env
                    .rows
                    .first()
                    .ok_or_else(|| Error::Config("inner command produced no rows".into()))?;
                let mut row = vec![Cell::Num(v)];
                row.extend(row0.iter().cloned());
                env.rows.push(row);
            }
            env.columns = first_cols.unwrap_or_default();
        }
    }
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::parse_and_validate;

    fn run_args(s: &str) -> Result<ResultEnvelope> {
        let argv: Vec<String> = std::iter::once("spinbath".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect();
        run(&parse_and_validate(argv)?)
    }

    #[test]
    fn degeneracy_rows_match_spec_example() {
        let env = run_args("degeneracy --N 4 --S 0.5").unwrap();
        let want = [(0.0, "2"), (1.0, "3"), (2.0, "1")];
        assert_eq!(env.rows.len(), 3);
        for (row, (j, nu)) in env.rows.iter().zip(want) {
            assert_eq!(row[0], Cell::Num(j));
            assert_eq!(row[1], Cell::Text(nu.into()));
        }
    }

    #[test]
    fn sweep_psi_nondecreasing_in_s() {
        let env = run_args(
            "sweep --over S --values 0.5,1,1.5,2,5,10 --command xy-asymptote --mu 1 --alpha 1 --g 1 --beta 0.1",
        )
        .unwrap();
        assert_eq!(env.rows.len(), 6);
        let mut prev = -1.0;
        for row in &env.rows {
            let psi = match row[1] {
                Cell::Num(x) => x,
                _ => panic!("psi must be numeric"),
            };
            assert!(psi >= prev, "psi must be nondecreasing in S");
            prev = psi;
        }
    }

    #[test]
    fn xy_evolve_deterministic_csv() {
        let a = run_args("xy-evolve --mu 1 --alpha 1 --g 1 --beta 0.1 --S 1 --t-max 5 --points 41")
            .unwrap()
            .to_csv();
        let b = run_args("xy-evolve --mu 1 --alpha 1 --g 1 --beta 0.1 --S 1 --t-max 5 --points 41")
            .unwrap()
            .to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn ising_exact_fig4_setting() {
        let env = run_args(
            "ising-exact --N 10 --S 1 --T 1 --j-equals-t --t-max 30 --points 301",
        )
        .unwrap();
        // decay then revival structure: |g| drops below 0.1 and comes back
        // above 0.5 within J0 t <= 30 (period is 2π√10 ≈ 19.9)
        let abs: Vec<f64> = env
            .rows
            .iter()
            .map(|r| match r[3] {
                Cell::Num(x) => x,
                _ => unreachable!(),
            })
            .collect();
        let min = abs.iter().cloned().fold(f64::INFINITY, f64::min);
        let later_max = abs[150..].iter().cloned().fold(0.0, f64::max);
        assert!(min < 0.1, "collapse expected, min = {min}");
        assert!(later_max > 0.5, "revival expected, max = {later_max}");
    }

    #[test]
    fn tau_d_row() {
        let env = run_args("tau-d --alpha 1 --g 1 --beta 1 --S 0.5").unwrap();
        match env.rows[0][0] {
            Cell::Num(x) => assert!((x - 3f64.sqrt()).abs() < 1e-12),
            _ => panic!(),
        }
    }

    #[test]
    fn compare_fig7_diagnostics() {
        let env = run_args("compare --N 100 --S 1 --J 3 --T 3.8 --points 700").unwrap();
        let dev: f64 = env.diagnostics["max_deviation"].parse().unwrap();
        assert!(dev > 0.2);
        assert_eq!(env.diagnostics["meanfield_monotone"], "true");
    }

    #[test]
    fn cache_round_trip_through_cli() {
        let dir = tempfile::tempdir().unwrap();
        let arg = format!("degeneracy --N 6 --S 1 --cache-dir {}", dir.path().display());
        let a = run_args(&arg).unwrap();
        assert!(dir.path().join("deg_n6_twos2.csv").is_file());
        let b = run_args(&arg).unwrap(); // second run loads the cache
        assert_eq!(a.rows, b.rows);
    }
}
