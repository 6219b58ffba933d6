//! Implementations of the five subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use haartrunc::spectra::unit_grid;
use haartrunc::{
    Complex64, EnsembleConfig, LimitLaw, Moments, RadialMeasure, WeightSpec, constant_b,
    equilibrium_measure, kolmogorov_distance, log_normalizing_constant, quad, rate_function,
    sample_spectra, verify_equilibrium,
};
use serde_json::{Map, Value, json};

use crate::dataset::{pooled_eigenvalues, read_dataset, write_dataset};
use crate::error::{AppError, AppResult};
use crate::manifest::write_manifest;
use crate::numfmt::fmt_f64;
use crate::{CompareArgs, ConstantsArgs, EquilibriumArgs, OutputFormat, RateArgs, SampleArgs};

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> AppResult<(T, usize)> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        builder = builder.num_threads(workers);
    }
    let pool = builder
        .build()
        .map_err(|e| AppError::Validation(format!("worker pool: {e}")))?;
    let count = pool.current_num_threads();
    Ok((pool.install(f), count))
}

fn write_text(path: &Path, body: &str) -> AppResult<()> {
    std::fs::write(path, body)?;
    Ok(())
}

fn write_json(path: &Path, value: &Value) -> AppResult<()> {
    let mut body = serde_json::to_string_pretty(value).expect("report serialization");
    body.push('\n');
    write_text(path, &body)
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".summary.json");
    out.with_file_name(name)
}

/// Parses a CSV of `columns` numeric fields, skipping one optional header
/// line.
fn read_csv_columns(path: &Path, columns: usize) -> AppResult<Vec<Vec<f64>>> {
    let body = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) if row.len() == columns => rows.push(row),
            Ok(row) => {
                return Err(AppError::Validation(format!(
                    "{}: line {} has {} fields, expected {columns}",
                    path.display(),
                    lineno + 1,
                    row.len()
                )));
            }
            Err(_) if lineno == 0 => continue, // header
            Err(e) => {
                return Err(AppError::Validation(format!(
                    "{}: line {}: {e}",
                    path.display(),
                    lineno + 1
                )));
            }
        }
    }
    if rows.is_empty() {
        return Err(AppError::Validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(rows)
}

pub fn run_sample(args: &SampleArgs, started: Instant) -> AppResult<()> {
    if args.common.format != OutputFormat::Json {
        return Err(AppError::Validation(
            "datasets are JSON-lines; csv output applies to tables only".into(),
        ));
    }
    let m = match (args.m, args.lambda) {
        (Some(m), None) => m,
        (None, Some(lambda)) => (lambda * args.n as f64).round() as usize,
        _ => {
            return Err(AppError::Validation(
                "specify the ambient dimension either as --m or as --lambda (never both)".into(),
            ));
        }
    };
    let config = EnsembleConfig::new(m, args.n, args.samples, args.common.seed)?;
    let (samples, workers) = with_pool(args.common.workers, move || sample_spectra(&config))?;
    let samples = samples?;
    write_dataset(&args.common.out, &samples)?;

    let mut params = Map::new();
    params.insert("m".into(), json!(m));
    params.insert("n".into(), json!(args.n));
    params.insert("samples".into(), json!(args.samples));
    params.insert("seed".into(), json!(args.common.seed));
    params.insert("workers".into(), json!(args.common.workers));
    params.insert("out".into(), json!(args.common.out.display().to_string()));
    params.insert("format".into(), json!("json"));
    write_manifest(
        &args.common.out,
        "sample",
        params,
        args.common.seed,
        workers,
        started,
    )?;
    println!(
        "sample: wrote {} records of {} eigenvalues to {}",
        args.samples,
        args.n,
        args.common.out.display()
    );
    Ok(())
}

fn law_abs_moment(law: &LimitLaw, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    quad::adaptive_simpson(
        &|r: f64| r.powi(2 * k as i32) * law.radial_density(r),
        0.0,
        law.edge_radius(),
        1e-12,
    )
}

pub fn run_compare(args: &CompareArgs, started: Instant) -> AppResult<()> {
    if args.grid_size < 8 {
        return Err(AppError::Validation("grid size must be at least 8".into()));
    }
    let records = read_dataset(&args.dataset)?;
    let pooled = pooled_eigenvalues(&records);
    let mu = haartrunc::EmpiricalMeasure::from_eigenvalues(&pooled)?;
    let law = LimitLaw::new(args.lambda)?;

    let grid = unit_grid(args.grid_size);
    let empirical = mu.radial_cdf(&grid)?;
    let theory = law.cdf_table(&grid)?;
    let ks = kolmogorov_distance(&empirical, &theory)?;

    let mut moments = Vec::new();
    for k1 in 0..=4u32 {
        for k2 in 0..=(4 - k1) {
            let emp = mu.mixed_moment(k1, k2);
            let th = if k1 == k2 {
                Complex64::new(law_abs_moment(&law, k1), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            moments.push(json!({
                "k1": k1,
                "k2": k2,
                "empirical": {"re": emp.re, "im": emp.im},
                "theory": {"re": th.re, "im": th.im},
                "abs_error": (emp - th).norm(),
            }));
        }
    }

    let summary = json!({
        "lambda": args.lambda,
        "grid_size": args.grid_size,
        "record_count": records.len(),
        "pooled_count": pooled.len(),
        "first_record": {
            "sample_index": records[0].sample_index,
            "m": records[0].m,
            "n": records[0].n,
        },
        "ks_distance": ks,
        "moments": moments,
    });

    match args.common.format {
        OutputFormat::Json => {
            let cdf: Vec<Value> = grid
                .iter()
                .zip(empirical.values().iter().zip(theory.values()))
                .map(|(&r, (&e, &t))| json!({"radius": r, "empirical": e, "theory": t}))
                .collect();
            let mut report = summary;
            report["cdf"] = Value::Array(cdf);
            write_json(&args.common.out, &report)?;
        }
        OutputFormat::Csv => {
            let mut body = String::from("radius,empirical,theory\n");
            for (&r, (&e, &t)) in grid
                .iter()
                .zip(empirical.values().iter().zip(theory.values()))
            {
                body.push_str(&format!("{},{},{}\n", fmt_f64(r), fmt_f64(e), fmt_f64(t)));
            }
            write_text(&args.common.out, &body)?;
            write_json(&summary_path(&args.common.out), &summary)?;
        }
    }

    let mut params = Map::new();
    params.insert("dataset".into(), json!(args.dataset.display().to_string()));
    params.insert("lambda".into(), json!(args.lambda));
    params.insert("grid_size".into(), json!(args.grid_size));
    params.insert("out".into(), json!(args.common.out.display().to_string()));
    params.insert("format".into(), json!(args.common.format.as_str()));
    write_manifest(
        &args.common.out,
        "compare",
        params,
        args.common.seed,
        1,
        started,
    )?;
    println!(
        "compare: KS = {ks:.6} over {} pooled eigenvalues",
        pooled.len()
    );
    Ok(())
}

pub fn run_rate(args: &RateArgs, started: Instant) -> AppResult<()> {
    let (report, input_kind, input_path) = match (&args.dataset, &args.measure) {
        (Some(path), None) => {
            let records = read_dataset(path)?;
            let pooled = pooled_eigenvalues(&records);
            let mu = haartrunc::EmpiricalMeasure::from_eigenvalues(&pooled)?;
            let (r, _workers) = with_pool(args.common.workers, || {
                rate_function(&mu, args.lambda, args.clamp)
            })?;
            (r?, "dataset", path.clone())
        }
        (None, Some(path)) => {
            let rows = read_csv_columns(path, 2)?;
            let radii: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            let density: Vec<f64> = rows.iter().map(|r| r[1]).collect();
            let mu = RadialMeasure::new(radii, density)?;
            let (r, _workers) = with_pool(args.common.workers, || {
                rate_function(&mu, args.lambda, args.clamp)
            })?;
            (r?, "measure", path.clone())
        }
        _ => {
            return Err(AppError::Validation(
                "provide exactly one input: --dataset or --measure".into(),
            ));
        }
    };

    let clamp_value = if report.clamp_alpha.is_finite() {
        json!(report.clamp_alpha)
    } else {
        Value::Null
    };
    let body = json!({
        "lambda": args.lambda,
        "input": input_kind,
        "clamp_alpha": clamp_value,
        "sigma_term": report.sigma_term,
        "weight_term": report.weight_term,
        "constant_b": report.constant_b,
        "total": report.total,
        "edge_mass_cut": report.edge_mass_cut,
    });
    match args.common.format {
        OutputFormat::Json => write_json(&args.common.out, &body)?,
        OutputFormat::Csv => {
            let line = format!(
                "sigma_term,weight_term,constant_b,total,edge_mass_cut\n{},{},{},{},{}\n",
                fmt_f64(report.sigma_term),
                fmt_f64(report.weight_term),
                fmt_f64(report.constant_b),
                fmt_f64(report.total),
                fmt_f64(report.edge_mass_cut),
            );
            write_text(&args.common.out, &line)?;
        }
    }

    let mut params = Map::new();
    params.insert(input_kind.into(), json!(input_path.display().to_string()));
    params.insert("lambda".into(), json!(args.lambda));
    if let Some(alpha) = args.clamp {
        params.insert("clamp".into(), json!(alpha));
    }
    params.insert("out".into(), json!(args.common.out.display().to_string()));
    params.insert("format".into(), json!(args.common.format.as_str()));
    write_manifest(
        &args.common.out,
        "rate",
        params,
        args.common.seed,
        1,
        started,
    )?;
    println!(
        "rate: total = {} (sigma {} + weight {} + B {})",
        report.total, report.sigma_term, report.weight_term, report.constant_b
    );
    Ok(())
}

pub fn run_equilibrium(args: &EquilibriumArgs, started: Instant) -> AppResult<()> {
    let weight = match (&args.lambda, &args.weight_table) {
        (Some(lambda), None) => WeightSpec::Truncation { lambda: *lambda },
        (None, Some(path)) => {
            let rows = read_csv_columns(path, 3)?;
            WeightSpec::Tabulated {
                radii: rows.iter().map(|r| r[0]).collect(),
                q: rows.iter().map(|r| r[1]).collect(),
                q_prime: rows.iter().map(|r| r[2]).collect(),
            }
        }
        _ => {
            return Err(AppError::Validation(
                "provide exactly one weight: --lambda or --weight-table".into(),
            ));
        }
    };
    if args.grid_size < 64 {
        return Err(AppError::Validation(
            "verification grid needs at least 64 nodes".into(),
        ));
    }

    let weight_for_pool = weight.clone();
    let tol = args.tol;
    let (result, _workers) = with_pool(args.common.workers, move || {
        equilibrium_measure(&weight_for_pool, tol)
    })?;
    let result = result?;

    // certificate on the requested grid
    let end = match &weight {
        WeightSpec::Truncation { .. } => 1.0 - 1e-3,
        WeightSpec::Tabulated { radii, .. } => (1.0 - 1e-3_f64).min(radii[radii.len() - 1]),
    };
    let mut grid = haartrunc::radial::uniform_grid(0.0, end, args.grid_size);
    for r in [result.inner_radius, result.outer_radius] {
        if r > 0.0 && r < end && !grid.contains(&r) {
            grid.push(r);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cert = verify_equilibrium(&result, &weight, &grid, 1e-6)?;

    let summary = json!({
        "r0": result.inner_radius,
        "R0": result.outer_radius,
        "frostman_constant": cert.constant,
        "max_residual_on_support": cert.max_residual_on_support,
        "min_slack_off_support": cert.min_slack_off_support,
        "certificate_passes": cert.passes,
        "tol": args.tol,
        "density_points": result.density.radii().len(),
    });
    match args.common.format {
        OutputFormat::Json => {
            let density: Vec<Value> = result
                .density
                .radii()
                .iter()
                .zip(result.density.density())
                .map(|(&r, &d)| json!({"radius": r, "density": d}))
                .collect();
            let mut report = summary;
            report["density"] = Value::Array(density);
            write_json(&args.common.out, &report)?;
        }
        OutputFormat::Csv => {
            let mut body = String::from("radius,density\n");
            for (&r, &d) in result.density.radii().iter().zip(result.density.density()) {
                body.push_str(&format!("{},{}\n", fmt_f64(r), fmt_f64(d)));
            }
            write_text(&args.common.out, &body)?;
            write_json(&summary_path(&args.common.out), &summary)?;
        }
    }

    let mut params = Map::new();
    match (&args.lambda, &args.weight_table) {
        (Some(lambda), _) => {
            params.insert("lambda".into(), json!(lambda));
        }
        (_, Some(path)) => {
            params.insert("weight_table".into(), json!(path.display().to_string()));
        }
        _ => unreachable!(),
    }
    params.insert("tol".into(), json!(args.tol));
    params.insert("grid_size".into(), json!(args.grid_size));
    params.insert("out".into(), json!(args.common.out.display().to_string()));
    params.insert("format".into(), json!(args.common.format.as_str()));
    write_manifest(
        &args.common.out,
        "equilibrium",
        params,
        args.common.seed,
        1,
        started,
    )?;
    println!(
        "equilibrium: r0 = {}, R0 = {}, support residual = {:.3e}, certificate {}",
        result.inner_radius,
        result.outer_radius,
        cert.max_residual_on_support,
        if cert.passes { "passes" } else { "FAILS" }
    );
    Ok(())
}

pub fn run_constants(args: &ConstantsArgs, started: Instant) -> AppResult<()> {
    if args.n_list.is_empty() {
        return Err(AppError::Validation(
            "--n-list needs at least one entry".into(),
        ));
    }
    let b = constant_b(args.lambda)?;
    let mut rows = Vec::new();
    for &n in &args.n_list {
        let m = (args.lambda * n as f64).round() as usize;
        if m <= n {
            return Err(AppError::Validation(format!(
                "n = {n}: round(lambda n) = {m} does not exceed n"
            )));
        }
        let scaled = log_normalizing_constant(m, n)? / (n as f64 * n as f64);
        rows.push((n, m, scaled, b, (scaled - b).abs()));
    }

    match args.common.format {
        OutputFormat::Json => {
            let body = json!({
                "lambda": args.lambda,
                "b": b,
                "rows": rows.iter().map(|&(n, m, s, b, e)| json!({
                    "n": n, "m": m, "scaled_log_constant": s, "b": b, "abs_error": e,
                })).collect::<Vec<_>>(),
            });
            write_json(&args.common.out, &body)?;
        }
        OutputFormat::Csv => {
            let mut body = String::from("n,m,scaled_log_constant,b,abs_error\n");
            for &(n, m, s, b, e) in &rows {
                body.push_str(&format!(
                    "{n},{m},{},{},{}\n",
                    fmt_f64(s),
                    fmt_f64(b),
                    fmt_f64(e)
                ));
            }
            write_text(&args.common.out, &body)?;
        }
    }

    let mut params = Map::new();
    params.insert("lambda".into(), json!(args.lambda));
    params.insert(
        "n_list".into(),
        json!(
            args.n_list
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    );
    params.insert("out".into(), json!(args.common.out.display().to_string()));
    params.insert("format".into(), json!(args.common.format.as_str()));
    write_manifest(
        &args.common.out,
        "constants",
        params,
        args.common.seed,
        1,
        started,
    )?;
    for &(n, _, s, _, e) in &rows {
        println!("constants: n = {n}: (1/n^2) log C = {s:.6}, |error| = {e:.6}");
    }
    Ok(())
}
