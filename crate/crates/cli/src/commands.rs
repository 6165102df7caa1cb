use std::fs::File;
use std::io::BufWriter;

use serde_json::{json, Value};
use su11::detection::{figure2_table, optimal_operating_point, phase_variance, phase_variance_homodyne};
use su11::experiment::{
    calibrated_coherent_config, estimate_snr, expected_coherent_snr_db, paired_experiment, photons_from_power,
    run_experiment, segment_for_rbw, simulate_homodyne_timeseries, welch_periodogram, write_samples_le,
    ModulationConfig,
};
use su11::fisher::cfi_homodyne;
use su11::fock::{compare_to_gaussian, OracleGrid};
use su11::snri::{snri_map, snri_scan_phip};

use crate::scenario::{self, McMode};
use crate::table::{Field, Table};
use crate::CliError;

pub struct Report {
    pub table: Table,
    /// Replaces the row-object rendering of `table` in JSON output.
    pub json: Option<Value>,
    /// Set when the command ran but its check did not pass.
    pub failure: Option<String>,
}

impl Report {
    fn table(table: Table) -> Self {
        Self {
            table,
            json: None,
            failure: None,
        }
    }

    /// Single-row result rendered as one JSON object.
    fn single(table: Table) -> Self {
        let json = table.to_json()[0].clone();
        Self {
            json: Some(json),
            ..Self::table(table)
        }
    }

    pub fn to_json(&self) -> Value {
        self.json.clone().unwrap_or_else(|| self.table.to_json())
    }
}

pub fn sensitivity(s: &scenario::Sensitivity) -> Result<Report, CliError> {
    let config = s.config()?;
    let (report, config) = if s.optimize {
        let op = optimal_operating_point(&config, s.scheme, &Default::default())?;
        (op.report, config.with_scheme(s.scheme))
    } else {
        (phase_variance(&config, s.scheme)?, config.with_scheme(s.scheme))
    };
    let mut t = Table::new([
        "scheme",
        "phi",
        "phi_p",
        "phi_c",
        "phase_variance",
        "scaled_variance",
        "signal_slope",
        "noise_variance",
        "mean_signal",
    ]);
    t.push(vec![
        s.scheme.label().into(),
        report.phi.into(),
        report.operating_point.0.into(),
        report.operating_point.1.into(),
        report.phase_variance.into(),
        (report.phase_variance * config.alpha2).into(),
        report.signal_slope.into(),
        report.noise_variance.into(),
        report.mean_signal.into(),
    ]);
    let json = json!({
        "scheme": s.scheme,
        "config": config,
        "report": report,
        "scaled_variance": report.phase_variance * config.alpha2,
    });
    Ok(Report {
        json: Some(json),
        ..Report::table(t)
    })
}

pub fn figure2(s: &scenario::Figure2) -> Result<Report, CliError> {
    let gains = s.gains()?;
    let rows = figure2_table(&gains, &s.schemes, s.alpha2, &s.scan()?)?;
    let mut header = vec!["gain".to_string()];
    for scheme in &s.schemes {
        header.push(format!("closed_{scheme}"));
        header.push(format!("numeric_{scheme}"));
    }
    header.push("qfi_bound".into());
    let mut t = Table::new(header);
    for row in rows {
        let mut cells = vec![Field::from(row.gain)];
        for (c, n) in row.closed_form.iter().zip(&row.numeric) {
            cells.push((*c).into());
            cells.push((*n).into());
        }
        cells.push(row.qfi_bound.into());
        t.push(cells);
    }
    Ok(Report::table(t))
}

pub fn fig4b(s: &scenario::Fig4b) -> Result<Report, CliError> {
    s.validate()?;
    let scan = snri_scan_phip(s.eta, s.gain, s.alpha2, s.phi_c, s.points)?;
    let mut t = Table::new(["phi_p", "snri_db", "cfi_snri_db"]);
    for p in scan {
        t.push(vec![p.phi_p.into(), p.snri_db.into(), p.cfi_snri_db.into()]);
    }
    Ok(Report::table(t))
}

pub fn figs2(s: &scenario::FigS2) -> Result<Report, CliError> {
    s.validate()?;
    let map = snri_map(s.r, s.eta, s.points)?;
    let mut t = Table::new(["phi_p", "phi_c", "snri_db", "mean_jp", "mean_jc"]);
    for (i, &pp) in map.phi_p.iter().enumerate() {
        for (j, &pc) in map.phi_c.iter().enumerate() {
            t.push(vec![
                pp.into(),
                pc.into(),
                map.snri_db[i][j].into(),
                map.mean_jp[i].into(),
                map.mean_jc[j].into(),
            ]);
        }
    }
    let max = map
        .max()
        .map(|(phi_p, phi_c, snri_db)| json!({ "phi_p": phi_p, "phi_c": phi_c, "snri_db": snri_db }));
    let mut json = serde_json::to_value(&map).map_err(|e| CliError::Computation(e.to_string()))?;
    json["max"] = max.unwrap_or(Value::Null);
    Ok(Report {
        json: Some(json),
        ..Report::table(t)
    })
}

pub fn fisher(s: &scenario::Fisher) -> Result<Report, CliError> {
    let config = s.config()?;
    let rep = cfi_homodyne(&config)?;
    let inverse_variance = match phase_variance_homodyne(&config) {
        Ok(r) => Some(1.0 / r.phase_variance),
        Err(su11::Error::SlopeZero { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut t = Table::new(["qfi", "cfi", "snr_term", "dist_term", "inverse_phase_variance"]);
    t.push(vec![
        rep.qfi.into(),
        rep.cfi.into(),
        rep.snr_term.into(),
        rep.dist_term.into(),
        inverse_variance.into(),
    ]);
    Ok(Report::single(t))
}

pub fn oracle_check(grid: &OracleGrid) -> Result<Report, CliError> {
    let report = compare_to_gaussian(grid)?;
    let mut t = Table::new(["r", "alpha", "eta", "quantity", "gaussian", "fock", "difference"]);
    for e in &report.entries {
        t.push(vec![
            e.r.into(),
            e.alpha.into(),
            e.eta.into(),
            e.quantity.as_str().into(),
            e.gaussian.into(),
            e.fock.into(),
            e.difference.into(),
        ]);
    }
    let failure = (!report.pass).then(|| {
        format!(
            "oracle check failed: max discrepancy {:e} >= {:e}",
            report.max_discrepancy, report.tolerance
        )
    });
    let mut json = serde_json::to_value(&report).map_err(|e| CliError::Computation(e.to_string()))?;
    json["status"] = Value::from(if report.pass { "pass" } else { "fail" });
    Ok(Report {
        table: t,
        json: Some(json),
        failure,
    })
}

pub fn mc_experiment(s: &scenario::McExperiment, seed: Option<u64>) -> Result<Report, CliError> {
    let mut modulation = s.modulation;
    if let Some(seed) = seed {
        modulation.seed = seed;
    }
    modulation.validate()?;
    if s.seeds == 0 {
        return Err(CliError::Validation("seeds must be >= 1".into()));
    }
    let config = match s.mode {
        McMode::Calibrated => calibrated_coherent_config(&s.calibration, &modulation)?,
        McMode::Single | McMode::Paired => s.config()?,
    };
    write_side_outputs(s, &config, &modulation)?;

    let run_seeds = (0..s.seeds).map(|k| modulation.seed.wrapping_add(2 * k as u64));
    let table = if s.mode == McMode::Paired {
        let mut t = Table::new([
            "seed",
            "squeezed_analytic_snr_db",
            "squeezed_estimated_snr_db",
            "coherent_analytic_snr_db",
            "coherent_estimated_snr_db",
            "analytic_difference_db",
            "estimated_difference_db",
        ]);
        for seed in run_seeds {
            let p = paired_experiment(&config, &ModulationConfig { seed, ..modulation })?;
            t.push(vec![
                seed.into(),
                p.squeezed.analytic_snr_db.into(),
                p.squeezed.estimated_snr_db.into(),
                p.coherent.analytic_snr_db.into(),
                p.coherent.estimated_snr_db.into(),
                p.analytic_difference_db.into(),
                p.estimated_difference_db.into(),
            ]);
        }
        t
    } else {
        let mut t = Table::new(["seed", "analytic_snr_db", "estimated_snr_db", "phase_variance", "samples"]);
        for seed in run_seeds {
            let run = run_experiment(&config, &ModulationConfig { seed, ..modulation })?;
            t.push(vec![
                seed.into(),
                run.analytic_snr_db.into(),
                run.estimated_snr_db.into(),
                run.phase_variance.into(),
                (run.samples as u64).into(),
            ]);
        }
        t
    };
    Ok(Report::table(table))
}

fn write_side_outputs(
    s: &scenario::McExperiment,
    config: &su11::InterferometerConfig,
    modulation: &ModulationConfig,
) -> Result<(), CliError> {
    if s.samples_out.is_none() && s.periodogram_out.is_none() {
        return Ok(());
    }
    let samples = simulate_homodyne_timeseries(config, modulation)?;
    if let Some(path) = &s.samples_out {
        write_samples_le(&samples, BufWriter::new(File::create(path)?))?;
    }
    if let Some(path) = &s.periodogram_out {
        // same estimator settings as the SNR, so fail early on too-short records
        estimate_snr(&samples, modulation.sample_rate, modulation.omega, modulation.rbw)?;
        let pg = welch_periodogram(
            &samples,
            modulation.sample_rate,
            segment_for_rbw(modulation.sample_rate, modulation.rbw),
        )?;
        pg.write_csv(BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

pub fn calibrate_sql(s: &scenario::CalibrateSql) -> Result<Report, CliError> {
    let photons = photons_from_power(&s.calibration)?;
    let snr = expected_coherent_snr_db(photons, s.delta_phi)?;
    let mut t = Table::new(["photons", "delta_phi", "expected_coherent_snr_db"]);
    t.push(vec![photons.into(), s.delta_phi.into(), snr.into()]);
    Ok(Report::single(t))
}
