//! Exact multivalued dynamics of (w - c)^q = z^p: images, labeled inverse
//! branches, branch derivatives, the geometric potential and escape geometry.
//!
//! Every operation here is a pure function of its arguments; identical inputs
//! give bit-identical outputs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{Params, Tolerances};

/// Default relative residual accepted when an operation validates the orbit
/// relation on a single pair.
pub const DEFAULT_ORBIT_TOL: f64 = 1e-9;

fn check_finite(z: Complex64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteInput(what))
    }
}

/// e^{2 pi i k / n}
fn root_of_unity(n: u32, k: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f64::from(k) / f64::from(n))
}

/// Relative residual |(z1 - c)^q - z0^p| / max(1, |z0|^p) of a candidate
/// orbit step z0 -> z1.
pub fn relation_residual(params: &Params, z0: Complex64, z1: Complex64) -> f64 {
    let lhs = (z1 - params.c()).powu(params.q());
    let rhs = z0.powu(params.p());
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

/// The q images of z: w = c + zeta_q^j (z^p)^{1/p... principal 1/q root},
/// ordered by the root label j = 0..q-1. z = 0 returns c with multiplicity q.
pub fn images(params: &Params, z: Complex64) -> Result<Vec<Complex64>> {
    check_finite(z, "images")?;
    let u = z.powu(params.p());
    let principal = if u == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        u.powf(1.0 / f64::from(params.q()))
    };
    Ok((0..params.q())
        .map(|j| params.c() + root_of_unity(params.q(), j) * principal)
        .collect())
}

/// The p preimages of w, ordered by symbol label k = 0..p-1; equals
/// `inverse_branch(params, w, k)` for each k. w = c returns 0 with
/// multiplicity p.
pub fn preimages(params: &Params, w: Complex64) -> Result<Vec<Complex64>> {
    check_finite(w, "preimages")?;
    if w == params.c() {
        return Ok(vec![Complex64::new(0.0, 0.0); params.p() as usize]);
    }
    (0..params.p()).map(|k| inverse_branch(params, w, k)).collect()
}

/// Labeled inverse branch: z_k = zeta_p^k exp((1/p) Log((w - c)^q)) with the
/// principal logarithm. Total and deterministic away from the singular point
/// w = c; continuity across the cut is not promised, orbit validity is always
/// decided by residual.
pub fn inverse_branch(params: &Params, w: Complex64, k: u32) -> Result<Complex64> {
    inverse_branch_with_cut(params, w, k, 0.0)
}

/// Same as [`inverse_branch`] with the branch cut of the logarithm rotated by
/// `cut`: the argument of (w - c)^q is folded into (-pi + cut, pi + cut].
/// `cut = 0` is the principal labeling.
pub fn inverse_branch_with_cut(params: &Params, w: Complex64, k: u32, cut: f64) -> Result<Complex64> {
    check_finite(w, "inverse_branch")?;
    debug_assert!(k < params.p());
    let u = (w - params.c()).powu(params.q());
    if u == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularPoint { at: w });
    }
    let mut arg = u.arg();
    while arg <= cut - std::f64::consts::PI {
        arg += 2.0 * std::f64::consts::PI;
    }
    while arg > cut + std::f64::consts::PI {
        arg -= 2.0 * std::f64::consts::PI;
    }
    let pf = f64::from(params.p());
    let principal = Complex64::from_polar(u.norm().powf(1.0 / pf), arg / pf);
    Ok(root_of_unity(params.p(), k) * principal)
}

/// Derivative of the forward branch through the orbit step (z0, z1):
/// g'(z0) = p (z1 - c) / (q z0), by implicit differentiation of the relation.
/// The pair must satisfy the relation within [`DEFAULT_ORBIT_TOL`].
pub fn branch_derivative(params: &Params, z0: Complex64, z1: Complex64) -> Result<Complex64> {
    check_finite(z0, "branch_derivative")?;
    check_finite(z1, "branch_derivative")?;
    if z0 == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularPoint { at: z0 });
    }
    let residual = relation_residual(params, z0, z1);
    if residual > DEFAULT_ORBIT_TOL {
        return Err(Error::InconsistentPair { residual });
    }
    Ok(f64::from(params.p()) * (z1 - params.c()) / (f64::from(params.q()) * z0))
}

/// Geometric potential on the orbit step (z0, z1): -log |g'(z0)|.
pub fn potential(params: &Params, z0: Complex64, z1: Complex64) -> Result<f64> {
    Ok(-branch_derivative(params, z0, z1)?.norm().ln())
}

/// Analytic continuation of the branch through (z0, z1) along the short
/// segment z0 + h: w(h) = c + (z1 - c) ((z0 + h)/z0)^{p/q} with the principal
/// logarithm of the near-unit ratio. Used to cross-check `branch_derivative`
/// against central finite differences.
pub fn branch_continuation(params: &Params, z0: Complex64, z1: Complex64, h: Complex64) -> Result<Complex64> {
    if z0 == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularPoint { at: z0 });
    }
    let ratio = (z0 + h) / z0;
    Ok(params.c() + (z1 - params.c()) * (ratio.ln() * params.beta()).exp())
}

/// A finite forward orbit (z_0, ..., z_n) of the correspondence together with
/// its worst relative relation residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    points: Vec<Complex64>,
    residual: f64,
}

impl Orbit {
    /// Validates the relation on every step. Tolerance comes from `tol`.
    pub fn new(params: &Params, points: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty orbit".into()));
        }
        for z in &points {
            check_finite(*z, "Orbit")?;
        }
        let residual = points
            .windows(2)
            .map(|w| relation_residual(params, w[0], w[1]))
            .fold(0.0f64, f64::max);
        if residual > tol.orbit_residual {
            return Err(Error::InconsistentPair { residual });
        }
        Ok(Self { points, residual })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Number of steps (one less than the number of points).
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> Complex64 {
        self.points[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.points.last().unwrap()
    }
}

/// Chain-rule derivative of the composed branch along the orbit: the product
/// of per-step branch derivatives. The empty product (single-point orbit) is 1.
pub fn orbit_multiplier(params: &Params, orbit: &Orbit) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for w in orbit.points().windows(2) {
        acc *= branch_derivative(params, w[0], w[1])?;
    }
    Ok(acc)
}

/// Smallest R >= 2 with R^{p/q} - |c| >= 2R. Any point with |z| > R has all
/// images of modulus >= 2|z|, so every orbit entering |z| > R diverges.
pub fn escape_radius(params: &Params) -> f64 {
    let beta = params.beta();
    let cm = params.c().norm();
    let f = |r: f64| r.powf(beta) - 2.0 * r - cm;
    if f(2.0) >= 0.0 {
        return 2.0;
    }
    let mut lo = 2.0;
    let mut hi = 4.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    // keep f(hi) >= 0 so the returned radius satisfies the inequality
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}
