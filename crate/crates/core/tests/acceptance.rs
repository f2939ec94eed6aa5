//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Elements are cached under `target/acceptance-cache`; a cold run computes
//! them at the default budgets first.

mod common;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::Parser;
use fiber_ground::cli::{self, Cli, LOCK_TOLERANCE};
use fiber_ground::config::RunConfig;
use fiber_ground::elements::{
    assemble_coefficients, inventory, verify_adjoint_identities, CoefficientSet, Derived, ElementCache, ElementTable,
    Estimate,
};
use fiber_ground::hydrogen::{self, RadialGrid};
use fiber_ground::model::CutoffProfile;
use fiber_ground::oracle::{DiscreteModel, LanczosOptions, ModeSpec};
use fiber_ground::ritz::{self, BasisMatrices};

type Outcome = Result<String, String>;

fn cache_dir() -> PathBuf {
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target"));
    target.join("acceptance-cache")
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn default_table() -> Result<ElementTable, String> {
    let c = RunConfig::default();
    let cache = ElementCache::new(cache_dir());
    ElementTable::compute(&c.profile().unwrap(), &c.budgets(), c.seed, &inventory(), Some(&cache))
        .map_err(|e| e.to_string())
}

fn coefficients(t: &ElementTable) -> Result<(CoefficientSet, BasisMatrices), String> {
    let d = assemble_coefficients(t).map_err(|e| e.to_string())?;
    let m = BasisMatrices::from_table(t).map_err(|e| e.to_string())?;
    Ok((d, m))
}

fn e1_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for lambda in [1.0, 2.0] {
        let got = hydrogen::e1(&CutoffProfile::sharp(lambda));
        worst = worst.max((got.value - 2.0 / PI * (1.0 + lambda).ln()).abs());
    }
    ensure(worst <= 1e-8, format!("max |e1 - (2/pi)ln(1+L)| = {worst:.2e}"))
}

fn e3_closed_form() -> Outcome {
    let grid = RadialGrid::default();
    let exact = -1.0 / (12.0 * PI);
    let e3 = hydrogen::e3(&grid).map_err(|e| e.to_string())?;
    let comm = hydrogen::e3_commutator(&grid).map_err(|e| e.to_string())?;
    let (a, b) = ((e3.value - exact).abs(), (comm - exact).abs());
    ensure(
        a <= 1e-6 && b <= 1e-6,
        format!("|e3 - exact| = {a:.2e}, |commutator - exact| = {b:.2e}"),
    )
}

fn hydrogen_energy() -> Outcome {
    let u = hydrogen::ground_u1(&RadialGrid::default()).map_err(|e| e.to_string())?;
    let dev = (u.energy.value + 0.25).abs();
    ensure(dev <= 1e-8, format!("|E + 1/4| = {dev:.2e} (± {:.1e})", u.energy.error))
}

fn lock_models() -> Vec<(String, DiscreteModel)> {
    let mut out = Vec::new();
    for profile in [CutoffProfile::default(), CutoffProfile::sharp(1.5)] {
        for angular in [4, 6] {
            let spec = ModeSpec { radial: 1, angular };
            out.push((
                format!("{} {angular} modes", profile.taper.as_str()),
                DiscreteModel::from_spec(profile, spec, 4).unwrap(),
            ));
        }
        out.push((
            format!("{} skewed 5 modes", profile.taper.as_str()),
            common::skewed_model(profile),
        ));
    }
    out
}

fn convention_lock() -> Outcome {
    let mut worst = (0.0, String::new());
    for (label, model) in lock_models() {
        let (dev, name) = cli::convention_lock(&model).map_err(|e| e.to_string())?;
        if dev >= worst.0 {
            worst = (dev, format!("{name} on {label}"));
        }
    }
    ensure(
        worst.0 <= LOCK_TOLERANCE,
        format!("max deviation {:.2e} ({}) over 6 models", worst.0, worst.1),
    )
}

fn identities(t: &ElementTable) -> Outcome {
    let r = verify_adjoint_identities(t).map_err(|e| e.to_string())?;
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let tightest = r
        .checks
        .iter()
        .map(|c| (c.lhs.value - c.rhs.value).abs() / c.tolerance)
        .fold(0.0, f64::max);
    ensure(
        failed.is_empty(),
        format!(
            "{} checks, worst at {tightest:.2} of tolerance, failed {failed:?}",
            r.checks.len()
        ),
    )
}

fn phi1_nullity(t: &ElementTable, m: &BasisMatrices) -> Outcome {
    let n1 = t.get("n1s").map_err(|e| e.to_string())?;
    let null = ritz::solve(m, 1e-2).map_err(|e| e.to_string())?.null;
    ensure(
        n1.value.abs() <= 3.0 * n1.error && null.iter().any(|n| n == "phi1"),
        format!(
            "|n1s| = {:.2e}, error {:.2e}, null directions {null:?}",
            n1.value.abs(),
            n1.error
        ),
    )
}

fn remainder_slope(d: &CoefficientSet, m: &BasisMatrices) -> Outcome {
    let mut pts = Vec::new();
    for a in ritz::log_grid(1e-3, 1e-1, 9) {
        let q = ritz::trial_quotient(m, a).map_err(|e| e.to_string())?;
        let r = (q - (d.d0.value * a * a + d.d1.value * a.powi(3) + d.d2.value * a.powi(4))).abs();
        pts.push((a.ln(), r.ln()));
    }
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let slope =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    ensure(slope >= 4.5 && slope.is_finite(), format!("log-log slope {slope:.3}"))
}

fn variational_chain() -> Outcome {
    let opts = LanczosOptions::default();
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut count = 0;
    for (_, model) in lock_models() {
        let m = BasisMatrices::from_table(&common::discrete_table(&model)).map_err(|e| e.to_string())?;
        for a in ritz::default_alpha_grid() {
            let exact = model.ground_state(a, opts).map_err(|e| e.to_string())?.energy;
            let rr = ritz::solve(&m, a).map_err(|e| e.to_string())?.energy;
            let trial = ritz::trial_quotient(&m, a).map_err(|e| e.to_string())?;
            worst = worst.max(exact - rr).max(rr - trial);
            count += 1;
        }
    }
    ensure(worst <= 1e-12, format!("{count} points, largest violation {worst:.2e}"))
}

/// Signed relative deviations of the (Φ₂, Φ̃₂, Φ₄) components from
/// α(1 − βα), 4α², 4α².
fn pattern_deviation(d: &CoefficientSet, m: &BasisMatrices, a: f64) -> Result<[f64; 3], String> {
    let v = ritz::solve(m, a).map_err(|e| e.to_string())?.vector;
    let want = [a * (1.0 - d.beta.value * a), 4.0 * a * a, 4.0 * a * a];
    Ok([0, 1, 2].map(|k| [v[2], v[3], v[5]][k] / want[k] - 1.0))
}

/// The Φ̃₂ component tends to 4α²(1 − ⟨Φ̃₂, r₁⟩∗/‖Φ̃₂‖∗²); r₁ is built on Φ₁
/// and vanishes in the continuum, so the offset is quadrature noise that
/// must be consistent with zero. Tightening is measured past that limit.
fn eigenvector_pattern(t: &ElementTable, d: &CoefficientSet, m: &BasisMatrices) -> Outcome {
    let der = Derived::new(t);
    let r1 = der.raw_tilde("s", "r1").map_err(|e| e.to_string())?;
    let n2t = der.n2ts().map_err(|e| e.to_string())?;
    let offset = -r1.value / n2t.value;
    let offset_ok = r1.value.abs() <= 3.0 * r1.error;
    let limit = [0.0, offset, 0.0];
    let devs: Vec<[f64; 3]> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&a| pattern_deviation(d, m, a))
        .collect::<Result<_, _>>()?;
    let abs: Vec<f64> = devs
        .iter()
        .map(|x| x.iter().fold(0.0_f64, |w, y| w.max(y.abs())))
        .collect();
    let excess: Vec<f64> = devs
        .iter()
        .map(|x| (0..3).fold(0.0_f64, |w, k| w.max((x[k] - limit[k]).abs())))
        .collect();
    let tightening = excess.windows(2).all(|w| w[1] <= w[0]);
    ensure(
        abs[0] <= 0.1 && tightening && offset_ok,
        format!(
            "relative error {:.2e} at 1e-2; past the limit {:.2e} / {:.2e} / {:.2e} at 1e-2 / 1e-3 / 1e-4; \
             limit offset {offset:.2e} (r1 part {:.1e} ± {:.1e})",
            abs[0], excess[0], excess[1], excess[2], r1.value, r1.error
        ),
    )
}

fn fit_consistency(d: &CoefficientSet, m: &BasisMatrices) -> Outcome {
    let curve: Vec<(f64, Estimate)> = ritz::default_alpha_grid()
        .into_iter()
        .map(|a| ritz::solve(m, a).map(|s| (a, Estimate::new(s.energy, s.sensitivity))))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let f = ritz::fit_expansion(&curve).map_err(|e| e.to_string())?;
    let within = |c: Estimate, d: Estimate| (c.value - d.value).abs() / (3.0 * c.error.hypot(d.error));
    let (r2, r3) = (within(f.c2, d.d0), within(f.c3, d.d1));
    let c4_ok = f.c4.value <= d.d2.value + 3.0 * f.c4.error.hypot(d.d2.error);
    ensure(
        r2 <= 1.0 && r3 <= 1.0 && c4_ok,
        format!(
            "c2 at {r2:.2}, c3 at {r3:.2} of 3 sigma; c4 {:.3e} vs d2 {:.3e}",
            f.c4.value, d.d2.value
        ),
    )
}

fn determinism() -> Outcome {
    let out = std::env::temp_dir().join(format!("fiber-ground-acceptance-{}", std::process::id()));
    let run = |jobs: &str| -> Result<Vec<Vec<u8>>, String> {
        let cli = Cli::try_parse_from([
            "fiber-ground",
            "--jobs",
            jobs,
            "--cache",
            cache_dir().to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "coefficients",
        ])
        .map_err(|e| e.to_string())?;
        let files = cli::run(&cli).map_err(|e| e.to_string())?;
        files
            .iter()
            .map(|f| std::fs::read(f).map_err(|e| e.to_string()))
            .collect()
    };
    let runs = [run("1")?, run("1")?, run("4")?];
    let _ = std::fs::remove_dir_all(&out);
    let same = runs.windows(2).all(|w| w[0] == w[1]);
    let bytes: usize = runs[0].iter().map(Vec::len).sum();
    ensure(same, format!("3 runs (1, 1, 4 workers), {bytes} bytes each"))
}

struct Line {
    id: usize,
    name: &'static str,
    limit: Duration,
    outcome: Outcome,
    elapsed: Duration,
}

fn timed(id: usize, name: &'static str, limit_s: u64, f: impl FnOnce() -> Outcome) -> Line {
    let t = Instant::now();
    let outcome = f();
    Line {
        id,
        name,
        limit: Duration::from_secs(limit_s),
        outcome,
        elapsed: t.elapsed(),
    }
}

fn main() {
    let mut lines = vec![
        timed(1, "e1 closed forms", 1, e1_closed_forms),
        timed(2, "e3 closed form and commutator", 10, e3_closed_form),
        timed(3, "hydrogen ground energy", 10, hydrogen_energy),
        timed(4, "element convention lock", 120, convention_lock),
    ];
    let t = Instant::now();
    let table = default_table();
    let build = t.elapsed();
    match table.and_then(|t| coefficients(&t).map(|c| (t, c))) {
        Ok((table, (d, m))) => {
            let mut l5 = timed(5, "adjoint identities", 1800, || identities(&table));
            l5.elapsed += build;
            lines.push(l5);
            lines.push(timed(6, "phi1 nullity", 1800, || phi1_nullity(&table, &m)));
            lines.push(timed(7, "remainder scaling", 60, || remainder_slope(&d, &m)));
            lines.push(timed(8, "variational chain", 300, variational_chain));
            lines.push(timed(9, "eigenvector pattern", 60, || {
                eigenvector_pattern(&table, &d, &m)
            }));
            lines.push(timed(10, "fit consistency", 60, || fit_consistency(&d, &m)));
            // Bounded by the cached element run above.
            lines.push(timed(11, "determinism", 1800, determinism));
        }
        Err(e) => {
            for (id, name) in [
                (5, "adjoint identities"),
                (6, "phi1 nullity"),
                (7, "remainder scaling"),
                (9, "eigenvector pattern"),
                (10, "fit consistency"),
                (11, "determinism"),
            ] {
                lines.push(Line {
                    id,
                    name,
                    limit: Duration::ZERO,
                    outcome: Err(format!("element table: {e}")),
                    elapsed: build,
                });
            }
            lines.push(timed(8, "variational chain", 300, variational_chain));
            lines.sort_by_key(|l| l.id);
        }
    }
    let mut failed = 0;
    for l in &lines {
        let in_time = l.elapsed <= l.limit;
        let (pass, detail) = match &l.outcome {
            Ok(d) => (in_time, d.clone()),
            Err(d) => (false, d.clone()),
        };
        let time = if in_time {
            format!("{:.2}s", l.elapsed.as_secs_f64())
        } else {
            format!("{:.2}s, over {}s", l.elapsed.as_secs_f64(), l.limit.as_secs())
        };
        println!(
            "{} {:>2} {}: {detail} [{time}]",
            if pass { "PASS" } else { "FAIL" },
            l.id,
            l.name
        );
        failed += usize::from(!pass);
    }
    println!("{} of {} criteria pass", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
