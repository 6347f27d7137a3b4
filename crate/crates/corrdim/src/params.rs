use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Family datum of the correspondence (w - c)^q = z^p.
///
/// The exponents satisfy p > q >= 2 and gcd(p, q) = 1, so beta = p/q is in
/// lowest terms and the forward map is genuinely q-valued.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    p: u32,
    q: u32,
    c: Complex64,
}

impl Params {
    pub fn new(p: u32, q: u32, c: Complex64) -> Result<Self> {
        if !(p > q && q >= 2) {
            return Err(Error::InvalidParams(format!(
                "need p > q >= 2, got p = {p}, q = {q}"
            )));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidParams(format!(
                "need gcd(p, q) = 1, got p = {p}, q = {q}"
            )));
        }
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::NonFiniteInput("Params::c"));
        }
        Ok(Self { p, q, c })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// beta = p/q > 1.
    pub fn beta(&self) -> f64 {
        f64::from(self.p) / f64::from(self.q)
    }

    /// Same exponents at a different parameter value.
    pub fn with_c(&self, c: Complex64) -> Result<Self> {
        Self::new(self.p, self.q, c)
    }

    /// p^n with an overflow check, as u64.
    pub fn word_count(&self, n: u32) -> Result<u64> {
        let mut acc: u64 = 1;
        for _ in 0..n {
            acc = acc
                .checked_mul(u64::from(self.p))
                .ok_or(Error::CapExceeded {
                    requested: u64::MAX,
                    cap: u64::MAX,
                })?;
        }
        Ok(acc)
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Params", 3)?;
        s.serialize_field("p", &self.p)?;
        s.serialize_field("q", &self.q)?;
        s.serialize_field("c", &[self.c.re, self.c.im])?;
        s.end()
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Numeric tolerances shared across the orbit machinery. All of these are
/// plain configuration; the defaults are what every CLI entry point uses.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    /// Relative orbit-relation residual accepted for a valid orbit.
    pub orbit_residual: f64,
    /// Convergence threshold for backward fixed-point iteration.
    pub fix_point: f64,
    /// Cycle closure threshold |z_n - z_0| after polishing.
    pub closure: f64,
    /// Two periodic points closer than this are the same point.
    pub dedup: f64,
    /// Iteration cap for the backward fixed-point search.
    pub max_backward_iter: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orbit_residual: 1e-9,
            fix_point: 1e-12,
            closure: 1e-10,
            dedup: 1e-8,
            max_backward_iter: 200,
        }
    }
}

/// Enumeration cap: p^n states are enumerated explicitly.
pub const WORD_CAP: u64 = 1 << 22;
/// Transfer-matrix cap: p^m cylinder states are held in memory.
pub const MATRIX_CAP: u64 = 1 << 20;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_families() {
        for (p, q) in [(3, 2), (5, 2), (7, 3), (10, 3)] {
            assert!(Params::new(p, q, Complex64::new(0.0, 0.0)).is_ok());
        }
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(Params::new(2, 2, Complex64::new(0.0, 0.0)).is_err());
        assert!(Params::new(3, 1, Complex64::new(0.0, 0.0)).is_err());
        assert!(Params::new(2, 3, Complex64::new(0.0, 0.0)).is_err());
        // common factor
        assert!(Params::new(6, 4, Complex64::new(0.0, 0.0)).is_err());
        assert!(Params::new(4, 2, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn rejects_non_finite_c() {
        assert!(Params::new(5, 2, Complex64::new(f64::NAN, 0.0)).is_err());
        assert!(Params::new(5, 2, Complex64::new(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn params_serialize_as_pair() {
        let p = Params::new(5, 2, Complex64::new(0.05, -0.1)).unwrap();
        let v = serde_json::to_value(p).unwrap();
        assert_eq!(v["p"], 5);
        assert_eq!(v["c"][0], 0.05);
        assert_eq!(v["c"][1], -0.1);
    }
}
