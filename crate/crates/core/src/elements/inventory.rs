//! Names and integrands of every scalar the expansion needs.
//!
//! Naming scheme (vectors: p1 = Φ₁, p2 = Φ₂, p3 = Φ₃, r1..r3 = raw parts of
//! Φ̃₂, 4a/4b = parts of Φ₄):
//! - `n1s n2s n3s`, `s_<u>_<v>`: ⟨u, v⟩∗
//! - `l1 l2 l3`, `p_<u>_<v>`: ⟨u, v⟩
//! - `am1 am2 am3`, `m_<u>_<v>`: ⟨A⁻u, A⁻v⟩
//! - `x13`: ⟨A⁺·A⁺Φ₁, Φ₃⟩, `y_<ri>_<4x>`: ⟨A⁺·A⁺ rᵢ, Φ₄ₓ⟩
//! - `id_*`: right-applied sides of the adjoint identities
//! - `e2_i e2_ii e2_iii`: the Fock-space pieces of the hydrogen e⁽²⁾.

use crate::error::{Error, Result};
use crate::kernels::{self, Amp, PairIntegrand, PairWeight};

fn vector(name: &str) -> Option<Amp> {
    let [r1, r2, r3] = kernels::phi2tilde_raw_parts();
    let [a, b] = kernels::phi4_parts();
    Some(match name {
        "p1" => kernels::phi1(),
        "p2" => kernels::phi2(),
        "p3" => kernels::phi3(),
        "r1" => r1,
        "r2" => r2,
        "r3" => r3,
        "4a" => a,
        "4b" => b,
        _ => return None,
    })
}

const RAW: [&str; 3] = ["r1", "r2", "r3"];
const PHI4: [&str; 2] = ["4a", "4b"];

fn pairs_upper(v: &[&str]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for i in 0..v.len() {
        for j in i..v.len() {
            out.push((v[i].to_string(), v[j].to_string()));
        }
    }
    out
}

/// Vector pairs shared by the *-, plain and A⁻ families (besides the norms).
fn family_pairs() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = RAW.iter().map(|r| ("p2".to_string(), r.to_string())).collect();
    out.extend(pairs_upper(&RAW));
    out.extend(pairs_upper(&PHI4));
    out
}

/// Every element name, in a fixed order.
pub fn inventory() -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for (prefix, norms) in [
        ("s", ["n1s", "n2s", "n3s"]),
        ("p", ["l1", "l2", "l3"]),
        ("m", ["am1", "am2", "am3"]),
    ] {
        names.extend(norms.iter().map(|s| s.to_string()));
        names.extend(family_pairs().into_iter().map(|(a, b)| format!("{prefix}_{a}_{b}")));
    }
    names.push("x13".into());
    for r in RAW {
        for f in PHI4 {
            names.push(format!("y_{r}_{f}"));
        }
    }
    names.extend(["id_a", "id_b", "id_c"].map(String::from));
    for f in PHI4 {
        names.push(format!("id_d_{f}"));
        names.push(format!("id_e_{f}"));
    }
    for r in RAW {
        names.push(format!("id_g_{r}"));
        names.push(format!("id_h_{r}"));
        names.push(format!("id_i_{r}"));
    }
    names
}

/// Names needed for the hydrogen-side e⁽²⁾.
pub fn hydrogen_inventory() -> Vec<String> {
    ["e2_i", "e2_ii", "e2_iii"].map(String::from).to_vec()
}

fn vec_or_err(name: &str, v: &str) -> Result<Amp> {
    vector(v).ok_or_else(|| Error::UnknownElement(name.to_string()))
}

/// The folded integrand of a named element.
pub fn definition(name: &str) -> Result<PairIntegrand> {
    let unknown = || Error::UnknownElement(name.to_string());
    let pair = |a: &str, b: &str, w: PairWeight| -> Result<PairIntegrand> {
        Ok(PairIntegrand::new(vec_or_err(name, a)?, vec_or_err(name, b)?, w))
    };
    let minus_pair = |a: &str, b: &str| -> Result<PairIntegrand> {
        Ok(PairIntegrand::new(
            vec_or_err(name, a)?.aminus(),
            vec_or_err(name, b)?.aminus(),
            PairWeight::Plain,
        ))
    };
    match name {
        "n1s" => return pair("p1", "p1", PairWeight::Star),
        "n2s" => return pair("p2", "p2", PairWeight::Star),
        "n3s" => return pair("p3", "p3", PairWeight::Star),
        "l1" => return pair("p1", "p1", PairWeight::Plain),
        "l2" => return pair("p2", "p2", PairWeight::Plain),
        "l3" => return pair("p3", "p3", PairWeight::Plain),
        "am1" => return minus_pair("p1", "p1"),
        "am2" => return minus_pair("p2", "p2"),
        "am3" => return minus_pair("p3", "p3"),
        "x13" => {
            return Ok(PairIntegrand::new(
                kernels::phi1().aplus_aplus(),
                kernels::phi3(),
                PairWeight::Plain,
            ))
        }
        "id_a" => {
            return Ok(PairIntegrand::new(
                Amp::vacuum(),
                kernels::phi2().aminus_aminus(),
                PairWeight::Plain,
            ))
        }
        "id_b" => {
            return Ok(PairIntegrand::new(
                kernels::phi1(),
                kernels::phi2().pf_aminus(),
                PairWeight::Plain,
            ))
        }
        "id_c" => {
            return Ok(PairIntegrand::new(
                kernels::phi2(),
                kernels::phi3().pf_aminus(),
                PairWeight::Plain,
            ))
        }
        "e2_i" => {
            return Ok(PairIntegrand::new(
                Amp::vacuum().aplus_aplus().resolvent().aminus(),
                Amp::vacuum().aplus_component().resolvent(),
                PairWeight::Plain,
            ))
        }
        "e2_ii" => {
            let y = Amp::Sum(vec![
                (2.0, Amp::vacuum().aplus_component().resolvent().pf_aplus()),
                (-1.0, Amp::vacuum().aplus_aplus().resolvent().pf_component()),
            ]);
            return Ok(PairIntegrand::new(y.clone(), y, PairWeight::InverseStar));
        }
        "e2_iii" => {
            let v = Amp::vacuum().aplus_component().resolvent().aminus();
            return Ok(PairIntegrand::new(v.clone(), v, PairWeight::Plain));
        }
        _ => {}
    }
    let parts: Vec<&str> = name.splitn(3, '_').collect();
    if parts.len() != 3 {
        return Err(unknown());
    }
    let (kind, a, b) = (parts[0], parts[1], parts[2]);
    match kind {
        "s" => pair(a, b, PairWeight::Star),
        "p" => pair(a, b, PairWeight::Plain),
        "m" => minus_pair(a, b),
        "y" => Ok(PairIntegrand::new(
            vec_or_err(name, a)?.aplus_aplus(),
            vec_or_err(name, b)?,
            PairWeight::Plain,
        )),
        "id" => {
            let v = vec_or_err(name, b)?;
            match a {
                "d" => Ok(PairIntegrand::new(kernels::phi3(), v.pf_aminus(), PairWeight::Plain)),
                "e" => Ok(PairIntegrand::new(
                    kernels::phi2(),
                    v.aminus_aminus(),
                    PairWeight::Plain,
                )),
                "g" => Ok(PairIntegrand::new(Amp::vacuum(), v.aminus_aminus(), PairWeight::Plain)),
                "h" => Ok(PairIntegrand::new(kernels::phi1(), v.pf_aminus(), PairWeight::Plain)),
                "i" => Ok(PairIntegrand::new(v.pf_aplus(), kernels::phi3(), PairWeight::Plain)),
                _ => Err(unknown()),
            }
        }
        _ => Err(unknown()),
    }
}

/// Reduced integration dimension of a named element.
pub fn dimension(name: &str) -> Result<usize> {
    let m = definition(name)?.momenta();
    Ok(match m {
        0 => 0,
        1 => 1,
        m => 3 * m - 3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_inventory_name_has_a_definition() {
        let names = inventory();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        for n in names.iter().chain(&hydrogen_inventory()) {
            definition(n).unwrap();
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        for n in ["bogus", "s_p2_zz", "q_p2_p2", "id_z_r1"] {
            assert!(matches!(definition(n), Err(Error::UnknownElement(_))), "{n}");
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension("n2s").unwrap(), 3);
        assert_eq!(dimension("n1s").unwrap(), 6);
        assert_eq!(dimension("am2").unwrap(), 6);
        assert_eq!(dimension("s_r1_r2").unwrap(), 9);
        assert_eq!(dimension("m_4a_4b").unwrap(), 12);
        assert_eq!(dimension("id_a").unwrap(), 3);
        assert_eq!(dimension("e2_iii").unwrap(), 3);
    }
}
