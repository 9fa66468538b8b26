//! Named instances of the family and their JSON description.
//!
//! Preset names encode the dimension `n = 6 + 4p`:
//! `S_n` (`f = 0`), `H_n_k` (`1 ≤ k ≤ p + 2`), `N_n_exp` (`ψ = e^{z_0}`)
//! and `N_n_mix` (`ψ = e^{z_0} + e^{2 z_0}`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse, Expression};
use crate::manifold::ManifoldConfig;

/// `z_1 z_0² + .. + z_k z_0^{k+1}` as s-expression text.
fn chain(k: usize) -> String {
    let terms: Vec<String> = (1..=k).map(|j| format!("(* z{j} (^ z0 {}))", j + 1)).collect();
    match terms.len() {
        0 => "0".into(),
        1 => terms[0].clone(),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

fn with_psi(p: usize, psi: &str) -> String {
    format!("(+ {} {psi})", chain(p))
}

/// `f_k`, including `f_{p+1} = f_p + z_0^{p+3}` and `f_{p+2} = f_p + e^{z_0}`.
pub fn chain_f(p: usize, k: usize) -> Result<String> {
    if k == 0 || k > p + 2 {
        return Err(Error::InvalidConfig(format!("H needs 1 <= k <= {}, got {k}", p + 2)));
    }
    Ok(if k <= p {
        chain(k)
    } else if k == p + 1 {
        with_psi(p, &format!("(^ z0 {})", p + 3))
    } else {
        with_psi(p, "(exp z0)")
    })
}

/// Which family member an instance is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Preset {
    Symmetric,
    Chain { k: usize },
    PsiExp,
    PsiMixed,
}

impl Preset {
    pub fn name(self, p: usize) -> String {
        let n = 6 + 4 * p;
        match self {
            Preset::Symmetric => format!("S_{n}"),
            Preset::Chain { k } => format!("H_{n}_{k}"),
            Preset::PsiExp => format!("N_{n}_exp"),
            Preset::PsiMixed => format!("N_{n}_mix"),
        }
    }

    pub fn f_text(self, p: usize) -> Result<String> {
        match self {
            Preset::Symmetric => Ok("0".into()),
            Preset::Chain { k } => chain_f(p, k),
            Preset::PsiExp => Ok(with_psi(p, "(exp z0)")),
            Preset::PsiMixed => Ok(with_psi(p, "(+ (exp z0) (exp (* 2 z0)))")),
        }
    }

    pub fn instance(self, p: usize) -> Result<InstanceSpec> {
        Ok(InstanceSpec {
            name: self.name(p),
            p,
            f: self.f_text(p)?,
            points: None,
            suites: None,
        })
    }

    /// Every preset for a given `p`.
    pub fn all(p: usize) -> Vec<Preset> {
        let mut out = vec![Preset::Symmetric];
        out.extend((1..=p + 2).map(|k| Preset::Chain { k }));
        out.extend([Preset::PsiExp, Preset::PsiMixed]);
        out
    }

    /// Parses a preset name such as `H_10_1`; returns the preset and `p`.
    pub fn from_name(name: &str) -> Result<(Preset, usize)> {
        let bad = || Error::InvalidConfig(format!("unknown preset `{name}`"));
        let parts: Vec<&str> = name.split('_').collect();
        let n: usize = parts.get(1).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        if n < 10 || !(n - 6).is_multiple_of(4) {
            return Err(bad());
        }
        let p = (n - 6) / 4;
        let preset = match (parts[0], parts.get(2), parts.len()) {
            ("S", None, 2) => Preset::Symmetric,
            ("H", Some(k), 3) => Preset::Chain {
                k: k.parse().map_err(|_| bad())?,
            },
            ("N", Some(&"exp"), 3) => Preset::PsiExp,
            ("N", Some(&"mix"), 3) => Preset::PsiMixed,
            _ => return Err(bad()),
        };
        preset.f_text(p)?;
        Ok((preset, p))
    }
}

/// JSON instance file: `{"name", "p", "f", "points"?, "suites"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub name: String,
    pub p: usize,
    /// `f` as s-expression text.
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<String>>,
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Reads an instance file. A path that does not exist but whose stem
    /// names a preset (`H_10_1.json`) resolves to that preset.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::from_json(&text),
            Err(e) => {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
                match Preset::from_name(stem) {
                    Ok((preset, p)) => preset.instance(p),
                    Err(_) => Err(Error::Io(format!("{}: {e}", path.display()))),
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn expression(&self) -> Result<Expression> {
        parse(&self.f)
    }

    pub fn config(&self) -> Result<ManifoldConfig> {
        ManifoldConfig::new(self.p, self.expression()?)
    }

    /// One-line summary for reports.
    pub fn describe(&self) -> String {
        format!("{} (p = {}, dim = {}): f = {}", self.name, self.p, 6 + 4 * self.p, self.f)
    }
}
