use crate::error::{Error, Result};
use crate::expr::Coord;

/// Coordinate layout of ℝ^{6+4p}:
/// `x, z_0..z_p, z̃_0..z̃_p, x*, z*_0..z*_p, z̃*_0..z̃*_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chart {
    p: usize,
}

impl Chart {
    pub fn new(p: usize) -> Result<Self> {
        if 6 + 4 * p > 255 {
            return Err(Error::InvalidConfig(format!("p = {p} exceeds the packed index range")));
        }
        Ok(Chart { p })
    }

    pub fn p(self) -> usize {
        self.p
    }

    pub fn dim(self) -> usize {
        6 + 4 * self.p
    }

    pub fn x(self) -> usize {
        0
    }

    pub fn z(self, i: usize) -> usize {
        1 + i
    }

    pub fn zt(self, i: usize) -> usize {
        self.p + 2 + i
    }

    pub fn xs(self) -> usize {
        2 * self.p + 3
    }

    pub fn zs(self, i: usize) -> usize {
        2 * self.p + 4 + i
    }

    pub fn zts(self, i: usize) -> usize {
        3 * self.p + 5 + i
    }

    /// Indices of the `s` coordinates (`z_i` then `z̃_i`).
    pub fn s_indices(self) -> Vec<usize> {
        (1..=2 * self.p + 2).collect()
    }

    pub fn is_s(self, idx: usize) -> bool {
        (1..=2 * self.p + 2).contains(&idx)
    }

    /// Index of the coordinate paired with `idx` by the metric
    /// (`x ↔ x*`, `z_i ↔ z*_i`, `z̃_i ↔ z̃*_i`).
    pub fn dual(self, idx: usize) -> usize {
        let half = self.dim() / 2;
        if idx < half {
            idx + half
        } else {
            idx - half
        }
    }

    pub fn coord(self, idx: usize) -> Coord {
        let p = self.p;
        let half = 2 * p + 3;
        let (base, star) = if idx < half { (idx, false) } else { (idx - half, true) };
        let c = match base {
            0 => Coord::X,
            b if b <= p + 1 => Coord::Z((b - 1) as u8),
            b => Coord::ZTilde((b - p - 2) as u8),
        };
        if !star {
            return c;
        }
        match c {
            Coord::X => Coord::XStar,
            Coord::Z(i) => Coord::ZStar(i),
            Coord::ZTilde(i) => Coord::ZTildeStar(i),
            _ => unreachable!(),
        }
    }

    pub fn index(self, c: Coord) -> Option<usize> {
        let p = self.p;
        let ok = |i: u8| (i as usize) <= p;
        match c {
            Coord::X => Some(self.x()),
            Coord::Z(i) if ok(i) => Some(self.z(i as usize)),
            Coord::ZTilde(i) if ok(i) => Some(self.zt(i as usize)),
            Coord::XStar => Some(self.xs()),
            Coord::ZStar(i) if ok(i) => Some(self.zs(i as usize)),
            Coord::ZTildeStar(i) if ok(i) => Some(self.zts(i as usize)),
            _ => None,
        }
    }

    /// Name of the frame vector occupying the same position as coordinate
    /// `idx` (`X`, `Z0`, `Zt0`, `Xs`, `Zs0`, `Zts0`).
    pub fn frame_label(self, idx: usize) -> String {
        match self.coord(idx) {
            Coord::X => "X".into(),
            Coord::Z(i) => format!("Z{i}"),
            Coord::ZTilde(i) => format!("Zt{i}"),
            Coord::XStar => "Xs".into(),
            Coord::ZStar(i) => format!("Zs{i}"),
            Coord::ZTildeStar(i) => format!("Zts{i}"),
        }
    }

    /// Looks a coordinate up in a point vector.
    pub fn lookup<'a, S: Clone>(self, point: &'a [S]) -> impl Fn(Coord) -> Option<S> + 'a {
        move |c| self.index(c).and_then(|i| point.get(i).cloned())
    }

    pub fn check_point<S>(self, point: &[S]) -> Result<()> {
        if point.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.dim(),
                found: point.len(),
            })
        }
    }
}
