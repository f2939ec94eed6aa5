//! Matrix-element inventory, coefficient assembly and identity checks.

mod estimate;
mod inventory;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{ModeTable, PairIntegrand};
use crate::model::{CutoffProfile, Vec3};
use crate::quadrature::{self, Budgets, Method, QuadratureResult};

pub use estimate::Estimate;
pub use inventory::{definition, dimension, hydrogen_inventory, inventory};

/// A named scalar with its quadrature half-width.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixElement {
    pub name: String,
    pub value: f64,
    pub error: f64,
    pub method: Method,
    pub nodes: u64,
    pub seed: u64,
    pub profile: CutoffProfile,
    pub profile_hash: String,
}

impl MatrixElement {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error)
    }
}

fn task<'a>(profile: CutoffProfile, pair: &'a PairIntegrand, reduced: bool) -> quadrature::IntegralTask<'a> {
    let f = move |k: &[Vec3]| pair.eval(&ModeTable::new(&profile, k));
    if reduced {
        quadrature::reduce_by_rotation(pair.momenta(), profile, f)
    } else {
        quadrature::unreduced(pair.momenta(), profile, f)
    }
}

/// Evaluates one inventory element with the default method for its dimension.
pub fn compute_element(name: &str, profile: &CutoffProfile, budgets: &Budgets, seed: u64) -> Result<MatrixElement> {
    let pair = definition(name)?;
    let dim = dimension(name)?;
    let method = Method::for_dimension(dim);
    let element_seed = quadrature::derive_seed(seed, name);
    let r = if profile.is_vanishing() {
        QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            method,
            nodes_used: 0,
            seed: element_seed,
        }
    } else {
        let t = task(*profile, &pair, true);
        quadrature::integrate(&t, budgets.for_dimension(dim), method, element_seed)?
    };
    Ok(MatrixElement {
        name: name.to_string(),
        value: r.value,
        error: r.error_estimate,
        method: r.method,
        nodes: r.nodes_used,
        seed: element_seed,
        profile: *profile,
        profile_hash: profile.hash(),
    })
}

/// Same element with an explicit method, budget and reduction (cross-checks).
pub fn compute_element_with(
    name: &str,
    profile: &CutoffProfile,
    method: Method,
    budget: u64,
    seed: u64,
    reduced: bool,
) -> Result<QuadratureResult> {
    let pair = definition(name)?;
    let t = task(*profile, &pair, reduced);
    quadrature::integrate(&t, budget, method, seed)
}

/// Element with every momentum measure replaced by Σ_j w_j δ(k - k_j).
pub fn compute_element_on_nodes(name: &str, profile: &CutoffProfile, nodes: &[(Vec3, f64)]) -> Result<f64> {
    let pair = definition(name)?;
    let t = task(*profile, &pair, false);
    let r = quadrature::integrate_on_nodes(&t, nodes)?;
    Ok(r.value)
}

/// JSON record store under `<root>/<profile hash>/`.
#[derive(Clone, Debug)]
pub struct ElementCache {
    root: PathBuf,
}

impl ElementCache {
    pub fn new(root: impl AsRef<Path>) -> Self {
        ElementCache {
            root: root.as_ref().to_path_buf(),
        }
    }

    fn path(&self, name: &str, profile: &CutoffProfile, budget: u64, seed: u64) -> PathBuf {
        self.root
            .join(profile.hash())
            .join(format!("{name}-b{budget}-s{seed}.json"))
    }

    pub fn load(&self, name: &str, profile: &CutoffProfile, budget: u64, seed: u64) -> Option<MatrixElement> {
        let text = fs::read_to_string(self.path(name, profile, budget, seed)).ok()?;
        let e: MatrixElement = serde_json::from_str(&text).ok()?;
        (e.name == name && e.profile == *profile).then_some(e)
    }

    pub fn store(&self, e: &MatrixElement, budget: u64, seed: u64) -> Result<()> {
        let p = self.path(&e.name, &e.profile, budget, seed);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = p.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(e)?)?;
        fs::rename(tmp, p)?;
        Ok(())
    }
}

/// Computed elements for one (profile, budgets, seed).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementTable {
    pub profile: CutoffProfile,
    pub budgets: Budgets,
    pub seed: u64,
    pub entries: BTreeMap<String, MatrixElement>,
}

impl ElementTable {
    pub fn compute(
        profile: &CutoffProfile,
        budgets: &Budgets,
        seed: u64,
        names: &[String],
        cache: Option<&ElementCache>,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for name in names {
            let budget = budgets.for_dimension(dimension(name)?);
            let cached = cache.and_then(|c| c.load(name, profile, budget, seed));
            let e = match cached {
                Some(e) => e,
                None => {
                    let e = compute_element(name, profile, budgets, seed)?;
                    if let Some(c) = cache {
                        c.store(&e, budget, seed)?;
                    }
                    e
                }
            };
            entries.insert(name.clone(), e);
        }
        Ok(ElementTable {
            profile: *profile,
            budgets: *budgets,
            seed,
            entries,
        })
    }

    /// The full inventory.
    pub fn compute_all(
        profile: &CutoffProfile,
        budgets: &Budgets,
        seed: u64,
        cache: Option<&ElementCache>,
    ) -> Result<Self> {
        Self::compute(profile, budgets, seed, &inventory(), cache)
    }

    /// Builds a table from explicit values (zero error), e.g. oracle values.
    pub fn from_values(profile: &CutoffProfile, values: &BTreeMap<String, f64>, method: Method) -> Self {
        let entries = values
            .iter()
            .map(|(k, v)| {
                (
                    k.clone(),
                    MatrixElement {
                        name: k.clone(),
                        value: *v,
                        error: 0.0,
                        method,
                        nodes: 0,
                        seed: 0,
                        profile: *profile,
                        profile_hash: profile.hash(),
                    },
                )
            })
            .collect();
        ElementTable {
            profile: *profile,
            budgets: Budgets::uniform(0),
            seed: 0,
            entries,
        }
    }

    pub fn get(&self, name: &str) -> Result<Estimate> {
        self.entries
            .get(name)
            .map(MatrixElement::estimate)
            .ok_or_else(|| Error::MissingElement(name.to_string()))
    }

    /// Element `<prefix>_<a>_<b>` irrespective of the order of a and b.
    pub fn pair(&self, prefix: &str, a: &str, b: &str) -> Result<Estimate> {
        let key = format!("{prefix}_{a}_{b}");
        if self.entries.contains_key(&key) {
            return self.get(&key);
        }
        self.get(&format!("{prefix}_{b}_{a}"))
    }
}

const RAW: [&str; 3] = ["r1", "r2", "r3"];

/// Quantities derived from the table; all Φ̃₂ products use its
/// representation X - c⋆Φ₂ with X the sum of the raw parts.
#[derive(Clone, Debug)]
pub struct Derived<'a> {
    t: &'a ElementTable,
}

impl<'a> Derived<'a> {
    pub fn new(t: &'a ElementTable) -> Self {
        Derived { t }
    }

    fn family_norm(&self, prefix: &str) -> Result<Estimate> {
        match prefix {
            "s" => self.t.get("n2s"),
            "p" => self.t.get("l2"),
            _ => self.t.get("am2"),
        }
    }

    /// ⟨Φ₂, X⟩ in the given family.
    pub fn phi2_x(&self, prefix: &str) -> Result<Estimate> {
        RAW.iter()
            .map(|r| self.t.pair(prefix, "p2", r))
            .collect::<Result<Vec<_>>>()
            .map(Estimate::sum)
    }

    /// ⟨u, X⟩ for a raw part u.
    pub fn raw_x(&self, prefix: &str, u: &str) -> Result<Estimate> {
        RAW.iter()
            .map(|r| self.t.pair(prefix, u, r))
            .collect::<Result<Vec<_>>>()
            .map(Estimate::sum)
    }

    /// ⟨X, X⟩ in the given family.
    pub fn x_x(&self, prefix: &str) -> Result<Estimate> {
        let mut terms = Vec::new();
        for (i, a) in RAW.iter().enumerate() {
            for (j, b) in RAW.iter().enumerate() {
                if j < i {
                    continue;
                }
                let v = self.t.pair(prefix, a, b)?;
                terms.push(if i == j { v } else { v.scale(2.0) });
            }
        }
        Ok(Estimate::sum(terms))
    }

    /// c⋆ = ⟨Φ₂, X⟩∗ / ‖Φ₂‖∗²
    pub fn cstar(&self) -> Result<Estimate> {
        let n2s = self.t.get("n2s")?;
        if n2s.value <= 0.0 {
            return Err(Error::DegenerateProfile(
                "‖Φ₂‖∗² vanishes, the projection off Φ₂ is undefined".into(),
            ));
        }
        Ok(self.phi2_x("s")? / n2s)
    }

    /// ⟨Φ̃₂, Φ̃₂⟩ in the given family.
    pub fn tilde_tilde(&self, prefix: &str) -> Result<Estimate> {
        let c = self.cstar()?;
        let xx = self.x_x(prefix)?;
        let px = self.phi2_x(prefix)?;
        let pp = self.family_norm(prefix)?;
        if prefix == "s" {
            // Projection Pythagoras: ‖X‖∗² - c⋆²‖Φ₂‖∗².
            return Ok(xx - c.square() * pp);
        }
        Ok(xx - (c * px).scale(2.0) + c.square() * pp)
    }

    /// ⟨Φ₂, Φ̃₂⟩ in the given family.
    pub fn phi2_tilde(&self, prefix: &str) -> Result<Estimate> {
        let c = self.cstar()?;
        Ok(self.phi2_x(prefix)? - c * self.family_norm(prefix)?)
    }

    /// ⟨u, Φ̃₂⟩ for a raw part u.
    pub fn raw_tilde(&self, prefix: &str, u: &str) -> Result<Estimate> {
        let c = self.cstar()?;
        Ok(self.raw_x(prefix, u)? - c * self.t.pair(prefix, "p2", u)?)
    }

    /// ⟨Φ₄, Φ₄⟩ in the given family.
    pub fn phi4_phi4(&self, prefix: &str) -> Result<Estimate> {
        Ok(self.t.pair(prefix, "4a", "4a")?
            + self.t.pair(prefix, "4a", "4b")?.scale(2.0)
            + self.t.pair(prefix, "4b", "4b")?)
    }

    /// ⟨Φ₄ₓ, Φ₄⟩∗ for a part x.
    pub fn part_phi4_star(&self, part: &str) -> Result<Estimate> {
        Ok(self.t.pair("s", part, "4a")? + self.t.pair("s", part, "4b")?)
    }

    pub fn n2ts(&self) -> Result<Estimate> {
        self.tilde_tilde("s")
    }

    pub fn n4s(&self) -> Result<Estimate> {
        self.phi4_phi4("s")
    }
}

/// d⁽⁰⁾, d⁽¹⁾, d⁽²⁾ and β with their inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub d0: Estimate,
    pub d1: Estimate,
    pub d2: Estimate,
    pub beta: Estimate,
    pub cstar: Estimate,
    pub n2ts: Estimate,
    pub n4s: Estimate,
    pub inventory: Vec<MatrixElement>,
}

pub fn assemble_coefficients(t: &ElementTable) -> Result<CoefficientSet> {
    let d = Derived::new(t);
    let n2s = t.get("n2s")?;
    if n2s.value <= 0.0 {
        return Err(Error::DegenerateProfile("‖Φ₂‖∗² vanishes".into()));
    }
    let d0 = -n2s;
    let d1 = t.get("am2")?.scale(2.0) - t.get("n3s")?.scale(4.0) - t.get("n1s")?.scale(4.0);
    let beta = d1 / n2s;
    let n2ts = d.n2ts()?;
    let n4s = d.n4s()?;
    let d2 = -(d1.square() / n2s) + t.get("x13")?.scale(8.0) + t.get("am1")?.scale(8.0) + t.get("am3")?.scale(8.0)
        - n2ts.scale(16.0)
        - n4s.scale(16.0)
        + t.get("l2")? * n2s;
    Ok(CoefficientSet {
        d0,
        d1,
        d2,
        beta,
        cstar: d.cstar()?,
        n2ts,
        n4s,
        inventory: t.entries.values().cloned().collect(),
    })
}

/// One equality checked within a multiple of its combined half-width.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The first failing check as an error.
    pub fn into_result(self) -> Result<Self> {
        if let Some(c) = self.checks.iter().find(|c| !c.pass) {
            return Err(Error::Identity {
                name: c.name.clone(),
                lhs: c.lhs.value,
                rhs: c.rhs.value,
                tolerance: c.tolerance,
            });
        }
        Ok(self)
    }
}

/// Identity tolerance in combined half-widths.
pub const IDENTITY_WIDTHS: f64 = 3.0;

fn check(name: &str, lhs: Estimate, rhs: Estimate, floor: f64) -> IdentityCheck {
    let tolerance = IDENTITY_WIDTHS * lhs.error.hypot(rhs.error) + floor;
    IdentityCheck {
        name: name.to_string(),
        lhs,
        rhs,
        tolerance,
        pass: (lhs.value - rhs.value).abs() <= tolerance,
    }
}

/// Adjoint and orthogonality identities. Each compares a right-applied
/// integrand with the *-form it must equal; the two sides are independent
/// integrals.
pub fn verify_adjoint_identities(t: &ElementTable) -> Result<IdentityReport> {
    let d = Derived::new(t);
    let n2s = t.get("n2s")?;
    // Rounding floor relative to the problem scale, for the exact (node-sum)
    // tables where all half-widths are zero.
    let floor = 1e-12 * n2s.value.abs().max(1e-300);
    let sum2 = |p: &str| -> Result<Estimate> { Ok(t.get(&format!("{p}_4a"))? + t.get(&format!("{p}_4b"))?) };
    let sum_raw = |p: &str| -> Result<Estimate> {
        RAW.iter()
            .map(|r| t.get(&format!("{p}_{r}")))
            .collect::<Result<Vec<_>>>()
            .map(Estimate::sum)
    };
    let vanishing = n2s.value == 0.0;
    let c = if vanishing { Estimate::ZERO } else { d.cstar()? };
    let tilde = |e: Estimate, p2_part: Estimate| e - c * p2_part;
    let mut checks = vec![
        check("vacuum_pair", t.get("id_a")?, -n2s, floor),
        check("phi1_adjoint", t.get("id_b")?, -t.get("n1s")?, floor),
        check("phi3_adjoint", t.get("id_c")?, -t.get("n3s")?, floor),
        check(
            "phi4_first_part",
            sum2("id_d")?,
            -(t.pair("s", "4a", "4a")? + t.pair("s", "4a", "4b")?),
            floor,
        ),
        check(
            "phi4_second_part",
            sum2("id_e")?,
            -(t.pair("s", "4a", "4b")? + t.pair("s", "4b", "4b")?).scale(4.0),
            floor,
        ),
    ];
    if vanishing {
        checks.push(check("phi2tilde_third_part", Estimate::ZERO, Estimate::ZERO, 0.0));
        checks.push(check("star_orthogonality", Estimate::ZERO, Estimate::ZERO, 0.0));
        checks.push(check("phi1_phi2tilde", Estimate::ZERO, Estimate::ZERO, 0.0));
        checks.push(check("phi3_phi2tilde", Estimate::ZERO, Estimate::ZERO, 0.0));
        return Ok(IdentityReport { checks });
    }
    // ⟨A⁻Φ₂, A⁻Φ̃₂⟩ = -2⟨Φ̃₂⁽³⁾, Φ̃₂⟩∗
    checks.push(check(
        "phi2tilde_third_part",
        tilde(d.phi2_x("m")?, t.get("am2")?),
        -d.raw_tilde("s", "r3")?.scale(2.0),
        floor,
    ));
    // ⟨Φ₂, Φ̃₂⟩∗ = 0 with ⟨Φ₂, X⟩∗ = -⟨Ω, A⁻·A⁻X⟩.
    checks.push(check(
        "star_orthogonality",
        -sum_raw("id_g")? - c * n2s,
        Estimate::ZERO,
        floor,
    ));
    // ⟨Φ₁, P_f·A⁻Φ̃₂⟩ = -⟨Φ̃₂⁽¹⁾, Φ̃₂⟩∗
    checks.push(check(
        "phi1_phi2tilde",
        tilde(sum_raw("id_h")?, t.get("id_b")?),
        -d.raw_tilde("s", "r1")?,
        floor,
    ));
    // ⟨P_f·A⁺Φ̃₂, Φ₃⟩ = -⟨Φ̃₂⁽²⁾, Φ̃₂⟩∗, with ⟨P_f·A⁺Φ₂, Φ₃⟩ = id_c.
    checks.push(check(
        "phi3_phi2tilde",
        tilde(sum_raw("id_i")?, t.get("id_c")?),
        -d.raw_tilde("s", "r2")?,
        floor,
    ));
    Ok(IdentityReport { checks })
}
