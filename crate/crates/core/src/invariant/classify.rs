//! Symmetric / curvature-homogeneous / homogeneous classification on a
//! grid of `z_0` values.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::alpha::{alpha_direct, psi_derivative, psi_of};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::expr::{Coord, Expression};
use crate::manifold::ManifoldConfig;
use crate::model::{build_model, normalize_frame, verify_isomorphism};

/// Evenly spaced `z_0` samples, `n ≥ 1` values from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { lo: -2.0, hi: 2.0, n: 17 }
    }
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64)
            .collect()
    }

    /// Grid points: `z_0` from the grid, every other coordinate fixed to a
    /// deterministic value in `[−1, 1]`.
    pub fn points(&self, config: &ManifoldConfig) -> Vec<Vec<f64>> {
        let z0 = config.chart().z(0);
        self.values()
            .into_iter()
            .map(|v| {
                let mut pt: Vec<f64> = (0..config.dim()).map(|i| ((i * 5) % 9) as f64 / 4.0 - 1.0).collect();
                pt[z0] = v;
                pt
            })
            .collect()
    }
}

/// `"a:b:n"`.
impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("grid must look like a:b:n, got `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        Ok(Grid { lo, hi, n })
    }
}

/// Curvature-homogeneity order; `InfFlat` when `∇R ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomogeneityOrder {
    Finite(usize),
    InfFlat,
}

impl fmt::Display for HomogeneityOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomogeneityOrder::Finite(k) => write!(f, "{k}"),
            HomogeneityOrder::InfFlat => f.write_str("inf-flat"),
        }
    }
}

impl Serialize for HomogeneityOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HomogeneityOrder::Finite(k) => s.serialize_u64(*k as u64),
            HomogeneityOrder::InfFlat => s.serialize_str("inf-flat"),
        }
    }
}

/// `α²` over the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaConstancy {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub symmetric: bool,
    pub curvature_homogeneity: HomogeneityOrder,
    pub alpha2: Option<AlphaConstancy>,
    pub homogeneous: Option<bool>,
    /// Which rule decided `homogeneous`.
    pub basis: String,
}

/// True when every partial derivative of `f` of the given order in
/// `z_0..z_p` vanishes identically.
pub fn partials_vanish(config: &ManifoldConfig, order: usize) -> bool {
    let vars: Vec<usize> = (0..=config.p()).collect();
    crate::manifold::multisets(&vars, order).into_iter().all(|ms| {
        let coords: Vec<Coord> = ms.iter().map(|&i| Coord::Z(i as u8)).collect();
        let d: Expression = config.f().multi_partial(&coords);
        match d.to_exp_poly() {
            Ok(e) => e.is_zero(),
            Err(_) => d.is_zero(),
        }
    })
}

/// Relative spread test used for `α²` constancy.
pub fn is_constant(values: &[f64]) -> Option<AlphaConstancy> {
    if values.is_empty() {
        return None;
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Some(AlphaConstancy {
        min,
        max,
        mean,
        constant: max - min <= 1e-9 * mean.abs().max(1.0),
    })
}

fn certified_everywhere(config: &ManifoldConfig, points: &[Vec<f64>], k: usize, exec: Exec) -> bool {
    let Ok(model) = build_model(config.p(), k) else { return false };
    exec.map(points, |pt| {
        normalize_frame(config, pt, k)
            .and_then(|frame| verify_isomorphism(config, pt, &frame, &model))
            .map(|c| c.passed)
            .unwrap_or(false)
    })
    .into_iter()
    .all(|ok| ok)
}

/// Whether `ψ^{(p+3)}` and `ψ^{(p+4)}` are positive at every point.
fn alpha_applicable(config: &ManifoldConfig, points: &[Vec<f64>]) -> bool {
    let Ok(psi) = psi_of(config) else { return false };
    let p = config.p();
    points.iter().all(|pt| {
        [p + 3, p + 4].iter().all(|&n| {
            psi_derivative::<f64>(&psi, config, pt, n)
                .map(|v| v > 0.0)
                .unwrap_or(false)
        })
    })
}

pub fn classify(config: &ManifoldConfig, grid: &Grid, exec: Exec) -> Result<Classification> {
    if grid.n == 0 {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    let points = grid.points(config);
    let symmetric = partials_vanish(config, 3);
    let curvature_homogeneity = if symmetric {
        HomogeneityOrder::InfFlat
    } else {
        let mut k = 0;
        while k < config.p() + 2 && certified_everywhere(config, &points, k + 1, exec) {
            k += 1;
        }
        HomogeneityOrder::Finite(k)
    };
    let alpha2 = if alpha_applicable(config, &points) {
        let values: Vec<f64> = exec
            .map(&points, |pt| alpha_direct::<f64>(config, pt, 2))
            .into_iter()
            .collect::<Result<_>>()?;
        is_constant(&values)
    } else {
        None
    };
    let (homogeneous, basis) = match (symmetric, curvature_homogeneity, &alpha2) {
        (true, _, _) => (Some(true), "symmetric space"),
        (_, HomogeneityOrder::Finite(c), _) if partials_vanish(config, c + 3) => (
            Some(true),
            "curvature homogeneous to an order beyond which all covariant derivatives of R vanish",
        ),
        (_, _, Some(a)) => (Some(a.constant), "alpha^2 constancy with psi^(p+3), psi^(p+4) > 0"),
        _ => (None, "undecided"),
    };
    Ok(Classification {
        symmetric,
        curvature_homogeneity,
        alpha2,
        homogeneous,
        basis: basis.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn cfg(f: &str) -> ManifoldConfig {
        ManifoldConfig::new(1, parse(f).unwrap()).unwrap()
    }

    #[test]
    fn grid_parsing_and_values() {
        let g: Grid = "-1:1:5".parse().unwrap();
        assert_eq!(g.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!("1:2".parse::<Grid>().is_err());
        assert!("1:2:0".parse::<Grid>().is_err());
        assert_eq!(Grid::default().values().len(), 17);
    }

    #[test]
    fn flat_and_quadratic_are_symmetric() {
        let g = Grid { lo: -1.0, hi: 1.0, n: 3 };
        for f in ["0", "(+ (* z0 z1) (^ z1 2))"] {
            let c = classify(&cfg(f), &g, Exec::Sequential).unwrap();
            assert!(c.symmetric);
            assert_eq!(c.curvature_homogeneity, HomogeneityOrder::InfFlat);
            assert_eq!(c.homogeneous, Some(true));
        }
    }

    #[test]
    fn h_one() {
        let g = Grid { lo: -1.0, hi: 1.0, n: 3 };
        let c = classify(&cfg("(* z1 (^ z0 2))"), &g, Exec::Sequential).unwrap();
        assert!(!c.symmetric);
        assert_eq!(c.curvature_homogeneity, HomogeneityOrder::Finite(1));
        assert_eq!(c.homogeneous, Some(true));
        assert_eq!(c.alpha2, None);
    }

    #[test]
    fn serialized_order() {
        assert_eq!(serde_json::to_string(&HomogeneityOrder::InfFlat).unwrap(), "\"inf-flat\"");
        assert_eq!(serde_json::to_string(&HomogeneityOrder::Finite(3)).unwrap(), "3");
    }
}
