//! Products of single-qubit spin observables `n·σ` along arbitrary unit
//! directions. Pauli strings are the special case where every direction is
//! a coordinate axis; those take the exact bit-mask path in [`PauliString`].

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;

use super::pauli::{Axis, PauliString, Sign};
use super::state::{inner, StateVector};
use super::{check_register, AMPLITUDE_TOLERANCE};
use crate::error::{Error, Result};

/// Unit Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > AMPLITUDE_TOLERANCE {
            return Err(Error::InvalidDirection(format!(
                "({x}, {y}, {z}) has length {norm}"
            )));
        }
        Ok(Self { x, y, z })
    }

    /// `cos(angle) Z + sin(angle) X`. Its `+1` eigenvector is
    /// `cos(angle/2)|0> + sin(angle/2)|1>`.
    pub fn in_xz_plane(angle: f64) -> Self {
        Self {
            x: angle.sin(),
            y: 0.0,
            z: angle.cos(),
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    fn dot(&self, o: &Direction) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn cross_norm(&self, o: &Direction) -> f64 {
        let cx = self.y * o.z - self.z * o.y;
        let cy = self.z * o.x - self.x * o.z;
        let cz = self.x * o.y - self.y * o.x;
        (cx * cx + cy * cy + cz * cz).sqrt()
    }

    /// The Pauli axis and sign when the direction is exactly `±x`, `±y` or `±z`.
    fn as_axis(&self) -> Option<(Sign, Axis)> {
        let sign = |v: f64| if v > 0.0 { Sign::Plus } else { Sign::Minus };
        match (self.x, self.y, self.z) {
            (x, y, z) if x.abs() == 1.0 && y == 0.0 && z == 0.0 => Some((sign(x), Axis::X)),
            (x, y, z) if y.abs() == 1.0 && x == 0.0 && z == 0.0 => Some((sign(y), Axis::Y)),
            (x, y, z) if z.abs() == 1.0 && x == 0.0 && y == 0.0 => Some((sign(z), Axis::Z)),
            _ => None,
        }
    }

    fn from_axis(axis: Axis) -> Option<Self> {
        match axis {
            Axis::I => None,
            Axis::X => Some(Self { x: 1.0, y: 0.0, z: 0.0 }),
            Axis::Y => Some(Self { x: 0.0, y: 1.0, z: 0.0 }),
            Axis::Z => Some(Self { x: 0.0, y: 0.0, z: 1.0 }),
        }
    }
}

/// `±1`-valued observable `sign · ⊗_k (n_k·σ)`, identity where a site is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    sign: Sign,
    sites: Vec<Option<Direction>>,
}

impl Observable {
    pub fn new(sign: Sign, sites: Vec<Option<Direction>>) -> Result<Self> {
        check_register(sites.len())?;
        Ok(Self { sign, sites })
    }

    /// `direction·σ` on one qubit, identity elsewhere.
    pub fn local(num_qubits: usize, qubit: usize, direction: Direction) -> Result<Self> {
        check_register(num_qubits)?;
        if qubit >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits,
            });
        }
        let mut sites = vec![None; num_qubits];
        sites[qubit] = Some(direction);
        Ok(Self {
            sign: Sign::Plus,
            sites,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Per-qubit measurement direction; `None` is the identity.
    pub fn sites(&self) -> &[Option<Direction>] {
        &self.sites
    }

    pub fn is_identity(&self) -> bool {
        self.sites.iter().all(Option::is_none)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.sites.len())
            .filter(|&q| self.sites[q].is_some())
            .collect()
    }

    /// The equivalent Pauli string when every site lies on a coordinate axis.
    pub fn as_pauli(&self) -> Option<PauliString> {
        let mut sign = self.sign;
        let mut axes = Vec::with_capacity(self.sites.len());
        for site in &self.sites {
            match site {
                None => axes.push(Axis::I),
                Some(d) => {
                    let (s, a) = d.as_axis()?;
                    sign = sign * s;
                    axes.push(a);
                }
            }
        }
        PauliString::new(sign, axes).ok()
    }

    /// Operator product of two site-wise disjoint observables.
    pub fn joined(&self, other: &Observable) -> Result<Observable> {
        self.check_size(other.num_qubits())?;
        let mut sites = self.sites.clone();
        for (q, s) in other.sites.iter().enumerate() {
            if let Some(d) = s {
                if sites[q].is_some() {
                    return Err(Error::InvalidDirection(format!(
                        "qubit {q} is acted on by both factors"
                    )));
                }
                sites[q] = Some(*d);
            }
        }
        Ok(Observable {
            sign: self.sign * other.sign,
            sites,
        })
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if self.num_qubits() != n {
            return Err(Error::SizeMismatch {
                left: self.num_qubits(),
                right: n,
            });
        }
        Ok(())
    }

    /// Site-wise rule: each pair of local factors must commute (parallel
    /// directions) or anticommute (orthogonal directions), and the number of
    /// anticommuting sites must be even. A site that does neither makes the
    /// products fail to commute.
    pub fn commutes(&self, other: &Observable) -> Result<bool> {
        if let (Some(p), Some(q)) = (self.as_pauli(), other.as_pauli()) {
            return p.commutes(&q);
        }
        self.check_size(other.num_qubits())?;
        let mut anticommuting = 0usize;
        for (a, b) in self.sites.iter().zip(&other.sites) {
            let (Some(a), Some(b)) = (a, b) else { continue };
            if a.cross_norm(b) <= AMPLITUDE_TOLERANCE {
                continue;
            }
            if a.dot(b).abs() <= AMPLITUDE_TOLERANCE {
                anticommuting += 1;
            } else {
                return Ok(false);
            }
        }
        Ok(anticommuting.is_multiple_of(2))
    }

    pub(crate) fn apply_amps(&self, amps: &[Complex64]) -> Vec<Complex64> {
        if let Some(p) = self.as_pauli() {
            return p.apply_amps(amps);
        }
        let n = self.sites.len();
        let mut out = amps.to_vec();
        for (q, site) in self.sites.iter().enumerate() {
            let Some(d) = site else { continue };
            let bit = 1usize << (n - 1 - q);
            let m01 = Complex64::new(d.x, -d.y);
            let m10 = Complex64::new(d.x, d.y);
            for b in (0..out.len()).filter(|b| b & bit == 0) {
                let a0 = out[b];
                let a1 = out[b | bit];
                out[b] = a0 * d.z + m01 * a1;
                out[b | bit] = m10 * a0 - a1 * d.z;
            }
        }
        let s = self.sign.value();
        out.iter_mut().for_each(|a| *a *= s);
        out
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check_size(state.num_qubits())?;
        let (s, _) = StateVector::normalize(self.apply_amps(state.amplitudes()))?;
        Ok(s)
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        self.check_size(state.num_qubits())?;
        let applied = self.apply_amps(state.amplitudes());
        Ok(inner(state.amplitudes(), &applied).re)
    }
}

impl From<PauliString> for Observable {
    fn from(p: PauliString) -> Self {
        Observable::from(&p)
    }
}

impl From<&PauliString> for Observable {
    fn from(p: &PauliString) -> Self {
        Observable {
            sign: p.sign(),
            sites: p.axes().iter().map(|&a| Direction::from_axis(a)).collect(),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_pauli() {
            return write!(f, "{p}");
        }
        write!(f, "{}", if self.sign == Sign::Plus { '+' } else { '-' })?;
        for site in &self.sites {
            match site {
                None => write!(f, "I")?,
                Some(d) => match d.as_axis() {
                    Some((Sign::Plus, a)) => write!(f, "{a:?}")?,
                    _ => write!(f, "[{:.6},{:.6},{:.6}]", d.x, d.y, d.z)?,
                },
            }
        }
        Ok(())
    }
}

impl Serialize for Observable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
