//! Subcommands behind the `fiber-ground` binary.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::elements::{
    assemble_coefficients, compute_element_on_nodes, definition, hydrogen_inventory, inventory,
    verify_adjoint_identities, CoefficientSet, ElementCache, ElementTable, Estimate,
};
use crate::error::{Error, Result};
use crate::hydrogen::{self, HydrogenCoefficients};
use crate::oracle::{DiscreteModel, LanczosOptions};
use crate::report::{write_csv, write_json};
use crate::ritz::{self, BasisMatrices, BASIS};

#[derive(Debug, Parser)]
#[command(
    name = "fiber-ground",
    version,
    about = "Small-coupling ground-state coefficients of the Pauli-Fierz fiber Hamiltonian"
)]
pub struct Cli {
    /// `key = value` config file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available parallelism). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Cutoff scale Λ (≥ 1).
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    /// Cutoff shape: sharp or smooth_cubic.
    #[arg(long, global = true)]
    pub taper: Option<String>,
    /// Smallest α of the log grid.
    #[arg(long, global = true)]
    pub alpha_min: Option<String>,
    /// Largest α of the log grid (≤ 0.1).
    #[arg(long, global = true)]
    pub alpha_max: Option<String>,
    /// Points on the α grid.
    #[arg(long, global = true)]
    pub alpha_points: Option<String>,
    /// Quadrature seed; each element derives its own stream from it.
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Points for elements of dimension ≤ 5.
    #[arg(long = "budget-3d", global = true)]
    pub budget_3d: Option<String>,
    /// Points for 6- to 8-dimensional elements.
    #[arg(long = "budget-6d", global = true)]
    pub budget_6d: Option<String>,
    /// Points for elements of dimension ≥ 9.
    #[arg(long = "budget-9d", global = true)]
    pub budget_9d: Option<String>,
    /// Radial shells of the discrete model.
    #[arg(long, global = true)]
    pub modes_radial: Option<String>,
    /// Directions per shell (4, 6, 8, 12, 20 or 32).
    #[arg(long, global = true)]
    pub modes_angular: Option<String>,
    /// Photon cap of the discrete model.
    #[arg(long, global = true)]
    pub nmax: Option<String>,
    /// Outer radius of the hydrogen grid.
    #[arg(long, global = true)]
    pub radial_rmax: Option<String>,
    /// Interior nodes of the hydrogen grid.
    #[arg(long, global = true)]
    pub radial_points: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Element cache directory.
    #[arg(long, global = true)]
    pub cache: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("lambda", &self.lambda),
            ("taper", &self.taper),
            ("alpha_min", &self.alpha_min),
            ("alpha_max", &self.alpha_max),
            ("alpha_points", &self.alpha_points),
            ("seed", &self.seed),
            ("budget_3d", &self.budget_3d),
            ("budget_6d", &self.budget_6d),
            ("budget_9d", &self.budget_9d),
            ("modes_radial", &self.modes_radial),
            ("modes_angular", &self.modes_angular),
            ("nmax", &self.nmax),
            ("radial_rmax", &self.radial_rmax),
            ("radial_points", &self.radial_points),
            ("out", &self.out),
            ("cache", &self.cache),
        ]
    }
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// d⁽⁰⁾, d⁽¹⁾, d⁽²⁾, β and the identity report.
    Coefficients,
    /// Ritz and trial energies on the α grid, with the polynomial fit.
    Curve,
    /// Discrete-model spectra, element lock and truncation diagnostics.
    Oracle,
    /// Coulomb-side coefficients and Σ(α).
    Hydrogen,
}

/// Builds the effective config: defaults, then file, then flags.
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    if let Some(p) = &cli.config {
        c.apply_text(&fs::read_to_string(p)?)?;
    }
    for (k, v) in cli.overrides.pairs() {
        if let Some(v) = v {
            c.set(k, v)?;
        }
    }
    c.validate()?;
    Ok(c)
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_)
        | Error::Domain(_)
        | Error::DegenerateProfile(_)
        | Error::UnknownElement(_)
        | Error::Fit(_)
        | Error::Size(_) => 2,
        Error::Identity { .. } | Error::Accuracy(_) => 3,
        Error::Convergence { .. } | Error::Conditioning(_) => 4,
        _ => 1,
    }
}

/// Parses, runs and reports; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("fiber-ground: {e}");
            exit_code(&e)
        }
    }
}

/// Runs one subcommand inside a pool of `--jobs` workers.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let config = effective_config(cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Validation(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Coefficients => cmd_coefficients(&config),
        Command::Curve => cmd_curve(&config),
        Command::Oracle => cmd_oracle(&config),
        Command::Hydrogen => cmd_hydrogen(&config),
    })
}

fn element_table(config: &RunConfig, names: &[String]) -> Result<ElementTable> {
    let cache = ElementCache::new(&config.cache);
    ElementTable::compute(&config.profile()?, &config.budgets(), config.seed, names, Some(&cache))
}

fn out_dir(config: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&config.out)?;
    Ok(config.out.clone())
}

#[derive(Serialize)]
struct CoefficientsFile<'a> {
    #[serde(flatten)]
    coefficients: &'a CoefficientSet,
    profile_hash: String,
}

/// coefficients.json and identities.json. A failing identity is reported
/// after both files are written.
pub fn cmd_coefficients(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let table = element_table(config, &inventory())?;
    let identities = verify_adjoint_identities(&table)?;
    let coefficients = assemble_coefficients(&table)?;
    let dir = out_dir(config)?;
    let (c, i) = (dir.join("coefficients.json"), dir.join("identities.json"));
    write_json(
        &c,
        config,
        &CoefficientsFile {
            coefficients: &coefficients,
            profile_hash: config.profile()?.hash(),
        },
    )?;
    write_json(&i, config, &identities)?;
    identities.into_result()?;
    Ok(vec![c, i])
}

#[derive(Serialize)]
struct FitFile {
    fit: ritz::ExpansionFit,
    d0: Estimate,
    d1: Estimate,
    d2: Estimate,
    null_directions: Vec<String>,
}

/// rr_curve.csv and fit.json.
pub fn cmd_curve(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let table = element_table(config, &inventory())?;
    let coefficients = assemble_coefficients(&table)?;
    let m = BasisMatrices::from_table(&table)?;
    let mut rows = Vec::new();
    let mut curve = Vec::new();
    let mut null = Vec::new();
    for a in config.alphas() {
        let s = ritz::solve(&m, a)?;
        let t = ritz::trial_estimate(&m, a)?;
        let mut row = vec![a, s.energy, s.sensitivity, t.value, t.error];
        row.extend(s.vector);
        rows.push(row);
        curve.push((a, Estimate::new(s.energy, s.sensitivity)));
        null = s.null;
    }
    let mut header = vec!["alpha", "E_RR", "E_RR_error", "E_trial", "E_trial_error"];
    let names: Vec<String> = BASIS.iter().map(|b| format!("c_{b}")).collect();
    header.extend(names.iter().map(String::as_str));
    let dir = out_dir(config)?;
    let csv = dir.join("rr_curve.csv");
    write_csv(&csv, config, &header, &rows)?;
    let fit = ritz::fit_expansion(&curve)?;
    let json = dir.join("fit.json");
    write_json(
        &json,
        config,
        &FitFile {
            fit,
            d0: coefficients.d0,
            d1: coefficients.d1,
            d2: coefficients.d2,
            null_directions: null,
        },
    )?;
    Ok(vec![csv, json])
}

#[derive(Serialize)]
struct LockFile {
    elements: usize,
    max_abs_deviation: f64,
    worst_element: String,
    nodes: usize,
    tolerance: f64,
}

/// Largest |kernel − dense| over the inventory on the model's own nodes.
pub fn convention_lock(model: &DiscreteModel) -> Result<(f64, String)> {
    let mut worst = (0.0, String::new());
    for name in inventory().into_iter().chain(hydrogen_inventory()) {
        let dense = model.pair(&definition(&name)?);
        let kernel = compute_element_on_nodes(&name, &model.profile, &model.modes)?;
        let dev = (dense - kernel).abs() / dense.abs().max(1.0);
        if dev >= worst.0 {
            worst = (dev, name);
        }
    }
    Ok(worst)
}

/// Tolerance of the element lock.
pub const LOCK_TOLERANCE: f64 = 1e-10;

/// Highest photon sector any inventory element reaches.
const LOCK_NMAX: usize = 4;

/// oracle_spectra.csv, convention_lock.json and oracle_truncation.csv.
pub fn cmd_oracle(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let profile = config.profile()?;
    let opts = LanczosOptions {
        seed: config.seed,
        ..LanczosOptions::default()
    };
    let mut alphas = vec![0.0];
    alphas.extend(config.alphas());
    let models = (1..=config.nmax)
        .map(|n| DiscreteModel::from_spec(profile, config.modes(), n))
        .collect::<Result<Vec<_>>>()?;
    let mut spectra = Vec::new();
    let mut truncation = Vec::new();
    for &a in &alphas {
        let mut row = vec![a];
        for m in &models {
            let g = m.ground_state(a, opts)?;
            row.push(g.energy);
            row.push(g.residual);
        }
        spectra.push(row);
        let top = models.last().expect("nmax ≥ 1");
        truncation.push(vec![a, top.photon_number_diagnostic(a, opts)?]);
    }
    let header: Vec<String> = std::iter::once("alpha".to_string())
        .chain((1..=config.nmax).flat_map(|n| [format!("E_nmax{n}"), format!("E_nmax{n}_residual")]))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let dir = out_dir(config)?;
    let spectra_path = dir.join("oracle_spectra.csv");
    write_csv(&spectra_path, config, &header, &spectra)?;
    let trunc_path = dir.join("oracle_truncation.csv");
    write_csv(&trunc_path, config, &["alpha", "photon_number"], &truncation)?;

    let lock_model = DiscreteModel::from_spec(profile, config.modes(), LOCK_NMAX)?;
    let (dev, name) = convention_lock(&lock_model)?;
    let lock_path = dir.join("convention_lock.json");
    write_json(
        &lock_path,
        config,
        &LockFile {
            elements: inventory().len() + hydrogen_inventory().len(),
            max_abs_deviation: dev,
            worst_element: name.clone(),
            nodes: lock_model.modes.len(),
            tolerance: LOCK_TOLERANCE,
        },
    )?;
    if dev > LOCK_TOLERANCE {
        return Err(Error::Identity {
            name: format!("convention lock ({name})"),
            lhs: dev,
            rhs: 0.0,
            tolerance: LOCK_TOLERANCE,
        });
    }
    Ok(vec![spectra_path, trunc_path, lock_path])
}

#[derive(Serialize)]
struct HydrogenFile<'a> {
    #[serde(flatten)]
    hydrogen: &'a HydrogenCoefficients,
    e3_commutator: f64,
    d0: Estimate,
    d1: Estimate,
    d2: Estimate,
}

/// hydrogen.json and sigma_curve.csv.
pub fn cmd_hydrogen(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let profile = config.profile()?;
    let names: Vec<String> = inventory().into_iter().chain(hydrogen_inventory()).collect();
    let table = element_table(config, &names)?;
    let d = assemble_coefficients(&table)?;
    let grid = config.grid();
    let e2 = hydrogen::e2_from_table(&table, &profile, &grid)?;
    let h = HydrogenCoefficients::new(
        &d,
        hydrogen::e1(&profile),
        e2,
        hydrogen::e3(&grid)?,
        hydrogen::a0(&profile),
    );
    let dir = out_dir(config)?;
    let json = dir.join("hydrogen.json");
    write_json(
        &json,
        config,
        &HydrogenFile {
            hydrogen: &h,
            e3_commutator: hydrogen::e3_commutator(&grid)?,
            d0: d.d0,
            d1: d.d1,
            d2: d.d2,
        },
    )?;
    let rows: Vec<Vec<f64>> = hydrogen::assemble_sigma(&d, &h, &config.alphas())
        .iter()
        .map(|p| {
            vec![
                p.alpha,
                p.sigma0.value,
                p.sigma0.error,
                p.binding.value,
                p.binding.error,
                p.sigma.value,
                p.sigma.error,
            ]
        })
        .collect();
    let csv = dir.join("sigma_curve.csv");
    write_csv(
        &csv,
        config,
        &[
            "alpha",
            "Sigma0",
            "Sigma0_error",
            "binding",
            "binding_error",
            "Sigma",
            "Sigma_error",
        ],
        &rows,
    )?;
    Ok(vec![json, csv])
}
