//! Periodic-orbit enumeration.
//!
//! Words over {0, ..., p-1} label compositions of inverse branches. Each word
//! gets a backward fixed-point search (contraction iteration plus a Newton
//! polish); a second pass continues the exact c = 0 cycle set in the parameter
//! to pick up points whose principal itinerary collides with another point's.
//! Genuineness of every stored orbit is decided by residual, closure and
//! multiplier, never by the labeling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::correspondence::{
    inverse_branch_with_cut, orbit_multiplier, potential, relation_residual, Orbit,
};
use crate::error::{Error, Result};
use crate::params::{Params, Tolerances, WORD_CAP};

/// Symbol sequence in {0, ..., p-1}; the finite shift coordinate of a
/// backward cylinder.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Word(pub Vec<u8>);

impl Word {
    /// Decode index into base-p digits, most significant first.
    pub fn from_index(index: u64, p: u32, n: u32) -> Self {
        let mut digits = vec![0u8; n as usize];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = (rest % u64::from(p)) as u8;
            rest /= u64::from(p);
        }
        Word(digits)
    }

    pub fn to_index(&self, p: u32) -> u64 {
        self.0
            .iter()
            .fold(0u64, |acc, &d| acc * u64::from(p) + u64::from(d))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, p: u32) -> Result<()> {
        if self.0.iter().any(|&s| u32::from(s) >= p) {
            return Err(Error::InvalidArgument(format!(
                "word {:?} has symbols >= p = {p}",
                self.0
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A validated repelling cycle, stored with the word that generated it.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub orbit: Orbit,
    pub period: u32,
    pub multiplier_modulus: f64,
    pub word: Word,
}

impl PeriodicOrbit {
    /// First point of the forward cycle (the fixed point of the n-step map).
    pub fn point(&self) -> Complex64 {
        self.orbit.start()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    /// Backward iteration never settled: the word has no fixed point on this
    /// labeling (or none reachable from the seed).
    NonConvergent,
    /// The backward chain hit the singular point w = c.
    SingularHit,
    /// A fixed point was located but failed residual/closure/multiplier checks.
    InvalidOrbit,
}

#[derive(Debug, Clone, Serialize)]
pub struct WordFailure {
    pub word: Word,
    pub reason: FailureReason,
}

/// Result of a period-n enumeration.
///
/// `expected` is the word count p^n. A word may host more than one periodic
/// point (the principal itinerary is not injective on cycles), so
/// `found_count + failures.len()` may exceed `expected`; the accounting
/// identity that always holds is: words with at least one orbit plus
/// `failures.len()` equals `expected`.
#[derive(Debug, Clone)]
pub struct OrbitInventory {
    pub period: u32,
    pub expected: u64,
    pub orbits: Vec<PeriodicOrbit>,
    pub found_count: usize,
    pub duplicates_merged: usize,
    /// Points contributed by cycle continuation rather than word iteration.
    pub recovered: usize,
    pub failures: Vec<WordFailure>,
}

impl OrbitInventory {
    pub fn completeness_ratio(&self) -> f64 {
        self.found_count as f64 / self.expected as f64
    }
}

/// Configuration for `periodic_points`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymbolicConfig {
    pub tolerances: Tolerances,
    pub rng_seed: u64,
    /// Branch-cut rotation of the labeling; 0 is the principal convention.
    pub cut_rotation: f64,
    /// Run the c = 0 cycle continuation pass to recover points whose word
    /// collides with another point's.
    pub continuation: bool,
    pub word_cap: u64,
}

impl Default for SymbolicConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            rng_seed: 1,
            cut_rotation: 0.0,
            continuation: true,
            word_cap: WORD_CAP,
        }
    }
}

/// Applies the labeled inverse branches of `word` backward from `z`
/// (symbols word[n-1], ..., word[0]) and returns the whole chain
/// y_0 = z, y_1, ..., y_n. The reversed chain is a forward orbit segment.
pub fn backward_map(params: &Params, word: &Word, z: Complex64) -> Result<Vec<Complex64>> {
    backward_map_with_cut(params, word, z, 0.0)
}

pub fn backward_map_with_cut(
    params: &Params,
    word: &Word,
    z: Complex64,
    cut: f64,
) -> Result<Vec<Complex64>> {
    word.validate(params.p())?;
    let mut chain = Vec::with_capacity(word.len() + 1);
    chain.push(z);
    let mut cur = z;
    for (depth, &k) in word.0.iter().rev().enumerate() {
        cur = inverse_branch_with_cut(params, cur, u32::from(k), cut)
            .map_err(|_| Error::SingularHit { depth })?;
        chain.push(cur);
    }
    Ok(chain)
}

/// Depth-m cylinder sample: the m-step backward image of `seed` under `word`
/// and the geometric potential on its first forward step.
pub fn cylinder_representative(
    params: &Params,
    word: &Word,
    seed: Complex64,
) -> Result<(Complex64, f64)> {
    if word.is_empty() {
        return Err(Error::InvalidArgument(
            "cylinder representative needs a nonempty word".into(),
        ));
    }
    let chain = backward_map(params, word, seed)?;
    let n = word.len();
    let phi = potential(params, chain[n], chain[n - 1])?;
    Ok((chain[n], phi))
}

/// Forward orbit obtained by reversing a backward chain.
fn forward_points(chain: &[Complex64]) -> Vec<Complex64> {
    chain.iter().rev().copied().collect()
}

struct Candidate {
    word_index: u64,
    forward: Vec<Complex64>,
    from_continuation: bool,
}

/// Outcome of the per-word backward search.
enum WordOutcome {
    Found(Vec<Complex64>),
    Failed(FailureReason),
}

fn search_word(
    params: &Params,
    word: &Word,
    seed: Complex64,
    cfg: &SymbolicConfig,
) -> WordOutcome {
    match search_word_from(params, word, seed, cfg) {
        WordOutcome::Failed(FailureReason::NonConvergent | FailureReason::SingularHit) => {
            // one retry from a perturbed seed, reproducible via the run RNG
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.rng_seed ^ word.to_index(params.p()).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            );
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let seed2 = seed + Complex64::from_polar(1e-3, theta);
            search_word_from(params, word, seed2, cfg)
        }
        other => other,
    }
}

fn search_word_from(
    params: &Params,
    word: &Word,
    seed: Complex64,
    cfg: &SymbolicConfig,
) -> WordOutcome {
    let tol = &cfg.tolerances;
    let mut z = seed;
    let mut converged = false;
    for _ in 0..tol.max_backward_iter {
        let chain = match backward_map_with_cut(params, word, z, cfg.cut_rotation) {
            Ok(c) => c,
            Err(_) => return WordOutcome::Failed(FailureReason::SingularHit),
        };
        let next = chain[word.len()];
        if !next.re.is_finite() || !next.im.is_finite() {
            return WordOutcome::Failed(FailureReason::NonConvergent);
        }
        if (next - z).norm() < tol.fix_point {
            z = next;
            converged = true;
            break;
        }
        z = next;
    }
    if !converged {
        return WordOutcome::Failed(FailureReason::NonConvergent);
    }

    // Newton polish on F(z) = B(z) - z; B'(z) is the product of inverse-branch
    // derivatives q y_{j+1} / (p (y_j - c)) along the chain.
    for _ in 0..8 {
        let chain = match backward_map_with_cut(params, word, z, cfg.cut_rotation) {
            Ok(c) => c,
            Err(_) => break,
        };
        let f = chain[word.len()] - z;
        let mut bp = Complex64::new(1.0, 0.0);
        for j in 0..word.len() {
            bp *= f64::from(params.q()) * chain[j + 1]
                / (f64::from(params.p()) * (chain[j] - params.c()));
        }
        let denom = bp - Complex64::new(1.0, 0.0);
        if denom.norm() < 1e-6 {
            break;
        }
        let dz = -f / denom;
        z += dz;
        if dz.norm() < 1e-15 {
            break;
        }
    }

    let chain = match backward_map_with_cut(params, word, z, cfg.cut_rotation) {
        Ok(c) => c,
        Err(_) => return WordOutcome::Failed(FailureReason::SingularHit),
    };
    if (chain[word.len()] - z).norm() > tol.closure {
        return WordOutcome::Failed(FailureReason::NonConvergent);
    }
    let mut forward = forward_points(&chain);
    // pin the endpoint so closure is exact in the stored orbit
    forward[0] = z;
    WordOutcome::Found(forward)
}

fn validate_candidate(
    params: &Params,
    forward: &[Complex64],
    tol: &Tolerances,
) -> Option<(Orbit, f64)> {
    let n = forward.len() - 1;
    if (forward[n] - forward[0]).norm() > tol.closure {
        return None;
    }
    if forward.iter().any(|z| *z == Complex64::new(0.0, 0.0)) {
        return None;
    }
    let orbit = Orbit::new(params, forward.to_vec(), tol).ok()?;
    let mult = orbit_multiplier(params, &orbit).ok()?.norm();
    if !(mult > 1.0) {
        return None;
    }
    Some((orbit, mult))
}

/// Recover the word labeling of a forward cycle under the configured cut.
fn word_of_forward_cycle(params: &Params, forward: &[Complex64], cut: f64) -> Option<Word> {
    let n = forward.len() - 1;
    let mut word = vec![0u8; n];
    // backward chain y_j = forward[n - j]; step y_j -> y_{j+1} carries label
    // word[n - 1 - j]
    for j in 0..n {
        let y_j = forward[n - j];
        let y_next = forward[n - j - 1];
        let mut best = f64::INFINITY;
        let mut best_k = 0u8;
        for k in 0..params.p() {
            let cand = inverse_branch_with_cut(params, y_j, k, cut).ok()?;
            let d = (cand - y_next).norm();
            if d < best {
                best = d;
                best_k = k as u8;
            }
        }
        if best > 1e-6 {
            return None;
        }
        word[n - 1 - j] = best_k;
    }
    Some(Word(word))
}

/// Exact c = 0 cycle combinatorics: period-n points of the circle dynamics
/// are e^{2 pi i s / N} with N = p^n - q^n, and the forward step multiplies
/// s by p q^{-1} mod N. Cycles are the orbits of that unit.
struct SolenoidModel {
    modulus: u64,
    step: u64,
}

impl SolenoidModel {
    fn new(params: &Params, n: u32) -> Option<Self> {
        let pn = (u64::from(params.p())).checked_pow(n)?;
        let qn = (u64::from(params.q())).checked_pow(n)?;
        let modulus = pn.checked_sub(qn)?;
        if modulus == 0 {
            return None;
        }
        let qinv = mod_inverse(u64::from(params.q()) % modulus, modulus)?;
        let step = (u128::from(params.p()) * u128::from(qinv) % u128::from(modulus)) as u64;
        Some(Self { modulus, step })
    }

    /// Orbits of s -> step * s mod N, each listed from its smallest member.
    fn cycles(&self) -> Vec<Vec<u64>> {
        let n = self.modulus as usize;
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for s in 0..self.modulus {
            if seen[s as usize] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut t = s;
            while !seen[t as usize] {
                seen[t as usize] = true;
                orbit.push(t);
                t = (u128::from(t) * u128::from(self.step) % u128::from(self.modulus)) as u64;
            }
            cycles.push(orbit);
        }
        cycles
    }

    fn point(&self, s: u64) -> Complex64 {
        Complex64::from_polar(
            1.0,
            std::f64::consts::TAU * s as f64 / self.modulus as f64,
        )
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (i128::from(a), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(i128::from(m)) as u64)
}

/// Newton continuation of a d-cycle of the cyclic system
/// (x_{i+1} - c)^q = x_i^p from c = 0 to the target parameter.
/// The linear solve exploits the cyclic bidiagonal Jacobian; the closing
/// denominator is 1 - M with M the cycle multiplier, bounded away from zero
/// on repelling cycles.
fn continue_cycle(params: &Params, start: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = start.len();
    let c_target = params.c();
    let steps = (c_target.norm() / 0.02).ceil().max(1.0) as usize;
    let p = f64::from(params.p());
    let q = f64::from(params.q());
    let mut x: Vec<Complex64> = start.to_vec();
    for s in 1..=steps {
        let c = c_target * (s as f64 / steps as f64);
        let mut settled = false;
        for _ in 0..40 {
            let mut f = vec![Complex64::new(0.0, 0.0); d];
            let mut fmax = 0.0f64;
            for i in 0..d {
                let xi1 = x[(i + 1) % d];
                f[i] = (xi1 - c).powu(params.q()) - x[i].powu(params.p());
                fmax = fmax.max(f[i].norm());
            }
            if fmax < 1e-13 {
                settled = true;
                break;
            }
            // a_i dx_i + b_i dx_{i+1} = -F_i with
            // a_i = -p x_i^{p-1}, b_i = q (x_{i+1} - c)^{q-1}
            // propagate dx_i = u_i + v_i dx_0 around the cycle
            let mut u = Complex64::new(0.0, 0.0);
            let mut v = Complex64::new(1.0, 0.0);
            let mut us = Vec::with_capacity(d);
            let mut vs = Vec::with_capacity(d);
            for i in 0..d {
                us.push(u);
                vs.push(v);
                let xi1 = x[(i + 1) % d];
                let a = -p * x[i].powu(params.p() - 1);
                let b = q * (xi1 - c).powu(params.q() - 1);
                if b.norm() < 1e-300 {
                    return None;
                }
                u = (-f[i] - a * u) / b;
                v = -a * v / b;
            }
            let denom = Complex64::new(1.0, 0.0) - v;
            if denom.norm() < 1e-9 {
                return None;
            }
            let dx0 = u / denom;
            let mut dmax = 0.0f64;
            for i in 0..d {
                let dx = us[i] + vs[i] * dx0;
                x[i] += dx;
                dmax = dmax.max(dx.norm());
            }
            if dmax < 1e-14 {
                settled = true;
                break;
            }
        }
        if !settled {
            return None;
        }
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
    }
    Some(x)
}

/// Spatial hash for dedup of periodic points.
struct DedupGrid {
    cell: f64,
    map: std::collections::HashMap<(i64, i64), Vec<Complex64>>,
}

impl DedupGrid {
    fn new(cell: f64) -> Self {
        Self {
            cell,
            map: std::collections::HashMap::new(),
        }
    }

    fn key(&self, z: Complex64) -> (i64, i64) {
        ((z.re / self.cell).floor() as i64, (z.im / self.cell).floor() as i64)
    }

    fn contains(&self, z: Complex64, tol: f64) -> bool {
        let (kx, ky) = self.key(z);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.map.get(&(kx + dx, ky + dy)) {
                    if v.iter().any(|u| (u - z).norm() < tol) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn insert(&mut self, z: Complex64) {
        let k = self.key(z);
        self.map.entry(k).or_default().push(z);
    }
}

/// Enumerate the period-n points reachable from `seed`.
///
/// Pass 1 runs the backward fixed-point search for each of the p^n words
/// (failed words are retried once from a perturbed seed). Pass 2, when
/// enabled, continues the exact c = 0 cycle set to the target parameter and
/// inserts whatever the word pass missed. Orbits are sorted by word, then by
/// angle, so the output is deterministic.
pub fn periodic_points(
    params: &Params,
    n: u32,
    seed: Complex64,
    cfg: &SymbolicConfig,
) -> Result<OrbitInventory> {
    if n == 0 {
        return Err(Error::InvalidArgument("period must be >= 1".into()));
    }
    let expected = params.word_count(n)?;
    if expected > cfg.word_cap {
        return Err(Error::CapExceeded {
            requested: expected,
            cap: cfg.word_cap,
        });
    }
    let tol = cfg.tolerances;

    // pass 1: word-by-word backward search
    let outcomes: Vec<WordOutcome> = (0..expected)
        .into_par_iter()
        .map(|idx| {
            let word = Word::from_index(idx, params.p(), n);
            search_word(params, &word, seed, cfg)
        })
        .collect();

    let mut grid = DedupGrid::new(tol.dedup.max(1e-12) * 4.0);
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut duplicates_merged = 0usize;
    let mut word_reasons: Vec<Option<FailureReason>> = Vec::with_capacity(expected as usize);
    let mut word_has_point = vec![false; expected as usize];

    for (idx, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            WordOutcome::Found(forward) => {
                if validate_candidate(params, &forward, &tol).is_some() {
                    let z = forward[0];
                    if grid.contains(z, tol.dedup) {
                        duplicates_merged += 1;
                        word_reasons.push(None);
                        // point already present; the word still counts as hosting one
                        word_has_point[idx] = true;
                    } else {
                        grid.insert(z);
                        candidates.push(Candidate {
                            word_index: idx as u64,
                            forward,
                            from_continuation: false,
                        });
                        word_has_point[idx] = true;
                        word_reasons.push(None);
                    }
                } else {
                    word_reasons.push(Some(FailureReason::InvalidOrbit));
                }
            }
            WordOutcome::Failed(reason) => word_reasons.push(Some(reason)),
        }
    }

    // pass 2: continuation of the exact c = 0 cycle set
    let mut recovered = 0usize;
    if cfg.continuation {
        if let Some(model) = SolenoidModel::new(params, n) {
            let cycles = model.cycles();
            let continued: Vec<Option<Vec<Complex64>>> = cycles
                .par_iter()
                .map(|orbit| {
                    let start: Vec<Complex64> = orbit.iter().map(|&s| model.point(s)).collect();
                    continue_cycle(params, &start)
                })
                .collect();
            for cyc in continued.into_iter().flatten() {
                let d = cyc.len();
                for r in 0..d {
                    let z = cyc[r];
                    if grid.contains(z, tol.dedup) {
                        duplicates_merged += 1;
                        continue;
                    }
                    // build the period-n forward orbit through cyc[r]
                    let mut forward = Vec::with_capacity(n as usize + 1);
                    for j in 0..=n as usize {
                        forward.push(cyc[(r + j) % d]);
                    }
                    forward[n as usize] = forward[0];
                    if validate_candidate(params, &forward, &tol).is_none() {
                        continue;
                    }
                    let Some(word) = word_of_forward_cycle(params, &forward, cfg.cut_rotation)
                    else {
                        continue;
                    };
                    let idx = word.to_index(params.p());
                    grid.insert(z);
                    word_has_point[idx as usize] = true;
                    candidates.push(Candidate {
                        word_index: idx,
                        forward,
                        from_continuation: true,
                    });
                    recovered += 1;
                }
            }
        }
    }

    // assemble, deterministically ordered
    candidates.sort_by(|a, b| {
        a.word_index
            .cmp(&b.word_index)
            .then_with(|| a.forward[0].arg().partial_cmp(&b.forward[0].arg()).unwrap())
    });
    let mut orbits = Vec::with_capacity(candidates.len());
    for cand in candidates {
        let (orbit, mult) = validate_candidate(params, &cand.forward, &tol)
            .expect("candidate validated twice");
        orbits.push(PeriodicOrbit {
            orbit,
            period: n,
            multiplier_modulus: mult,
            word: Word::from_index(cand.word_index, params.p(), n),
        });
        let _ = cand.from_continuation;
    }

    let failures: Vec<WordFailure> = (0..expected as usize)
        .filter(|&idx| !word_has_point[idx])
        .map(|idx| WordFailure {
            word: Word::from_index(idx as u64, params.p(), n),
            reason: word_reasons[idx].unwrap_or(FailureReason::NonConvergent),
        })
        .collect();

    let found_count = orbits.len();
    Ok(OrbitInventory {
        period: n,
        expected,
        orbits,
        found_count,
        duplicates_merged,
        recovered,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(p: u32, q: u32, c: f64) -> Params {
        Params::new(p, q, Complex64::new(c, 0.0)).unwrap()
    }

    #[test]
    fn backward_map_basics() {
        let p = params(3, 2, 0.0);
        let one = Complex64::new(1.0, 0.0);
        // all-zero word stays at the principal root of 1
        let chain = backward_map(&p, &Word(vec![0, 0, 0]), one).unwrap();
        assert!((chain[3] - one).norm() < 1e-14);
        // single symbol matches inverse_branch
        let chain = backward_map(&p, &Word(vec![1]), one).unwrap();
        let direct = crate::correspondence::inverse_branch(&p, one, 1).unwrap();
        assert!((chain[1] - direct).norm() < 1e-15);
        // empty word is the identity
        let chain = backward_map(&p, &Word(vec![]), one).unwrap();
        assert_eq!(chain, vec![one]);
    }

    #[test]
    fn backward_map_rejects_bad_symbols() {
        let p = params(3, 2, 0.0);
        assert!(backward_map(&p, &Word(vec![3]), Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn cylinder_representative_at_c_zero() {
        let p = params(5, 2, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let (pt, phi) = cylinder_representative(&p, &Word(vec![0]), one).unwrap();
        assert!((pt - one).norm() < 1e-14);
        assert_relative_eq!(phi, -(2.5f64.ln()), epsilon = 1e-13);
        // any word on the circle has the same potential
        let (_, phi) = cylinder_representative(&p, &Word(vec![3, 1, 4]), one).unwrap();
        assert_relative_eq!(phi, -(2.5f64.ln()), epsilon = 1e-12);
    }

    /// Independent oracle for the c = 0 period-n point count: a closed orbit
    /// picks a branch offset vector (k_0, ..., k_{n-1}) in {0..q-1}^n; writing
    /// the n-step return condition on angles t -> (p t + k)/q shows the closed
    /// points are exactly the multiples of 1/(p^n - q^n). Counting distinct
    /// angles over all offset vectors gives p^n - q^n.
    fn oracle_count(p: u64, q: u64, n: u32) -> u64 {
        p.pow(n) - q.pow(n)
    }

    fn word_count_inventory(p: u32, q: u32, c: f64, n: u32) -> OrbitInventory {
        let pr = params(p, q, c);
        let cfg = SymbolicConfig::default();
        periodic_points(&pr, n, Complex64::new(1.0, 0.0), &cfg).unwrap()
    }

    #[test]
    fn count_law_at_c_zero() {
        for (p, q) in [(5u32, 2u32), (3, 2)] {
            for n in 1..=5u32 {
                let inv = word_count_inventory(p, q, 0.0, n);
                assert_eq!(
                    inv.found_count as u64,
                    oracle_count(u64::from(p), u64::from(q), n),
                    "(p,q)=({p},{q}) n={n}"
                );
                // every point on the circle, every multiplier (p/q)^n
                let beta_n = (f64::from(p) / f64::from(q)).powi(n as i32);
                for orb in &inv.orbits {
                    assert!((orb.point().norm() - 1.0).abs() < 1e-9);
                    assert!((orb.multiplier_modulus - beta_n).abs() < 1e-9 * beta_n);
                }
            }
        }
    }

    #[test]
    fn c_zero_points_match_the_congruence_oracle() {
        // the exact circle positions s/(p^n - q^n) for (5,2), n = 3
        let inv = word_count_inventory(5, 2, 0.0, 3);
        let n_pts = 117u64;
        assert_eq!(inv.found_count as u64, n_pts);
        let mut got: Vec<f64> = inv
            .orbits
            .iter()
            .map(|o| (o.point().arg() / std::f64::consts::TAU).rem_euclid(1.0))
            .collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (i, t) in got.iter().enumerate() {
            let nearest = (t * n_pts as f64).round();
            assert!(
                (t - nearest / n_pts as f64).abs() < 1e-9 / n_pts as f64 * n_pts as f64,
                "point {i} at angle {t} is off-lattice"
            );
        }
    }

    #[test]
    fn shift_closure_and_residuals() {
        let inv = word_count_inventory(5, 2, 0.05, 3);
        for orb in &inv.orbits {
            let pts = orb.orbit.points();
            assert!((pts[pts.len() - 1] - pts[0]).norm() <= 1e-9);
            assert!(orb.orbit.residual() <= 1e-9);
            assert!(orb.multiplier_modulus > 1.0);
        }
    }

    #[test]
    fn inventory_accounting() {
        let pr = params(5, 2, 0.05);
        let cfg = SymbolicConfig::default();
        let inv = periodic_points(&pr, 4, Complex64::new(1.0, 0.0), &cfg).unwrap();
        assert_eq!(inv.expected, 625);
        assert_eq!(inv.found_count, 609); // p^4 - q^4
        // words hosting at least one point + failed words = p^n
        let words_hit: std::collections::HashSet<u64> =
            inv.orbits.iter().map(|o| o.word.to_index(5)).collect();
        assert_eq!(words_hit.len() + inv.failures.len(), 625);
        // a failed word genuinely has no fixed point: spot-check one
        if let Some(f) = inv.failures.first() {
            assert!(matches!(
                f.reason,
                FailureReason::NonConvergent | FailureReason::InvalidOrbit
            ));
        }
    }

    #[test]
    fn continuation_only_adds_label_collisions() {
        // with continuation disabled the word pass alone finds one point per
        // hosting word; enabling it recovers the colliding points
        let pr = params(3, 2, 0.0);
        let seed = Complex64::new(1.0, 0.0);
        let mut cfg = SymbolicConfig::default();
        cfg.continuation = false;
        let inv1 = periodic_points(&pr, 2, seed, &cfg).unwrap();
        cfg.continuation = true;
        let inv2 = periodic_points(&pr, 2, seed, &cfg).unwrap();
        assert_eq!(inv1.found_count, 3); // one point per hosting word
        assert_eq!(inv2.found_count, 5); // p^2 - q^2
        assert!(inv2.recovered >= 2);
    }

    #[test]
    fn label_independence_under_cut_rotation() {
        let pr = params(5, 2, 0.03);
        let seed = Complex64::new(1.0, 0.0);
        let cfg0 = SymbolicConfig::default();
        let cfg1 = SymbolicConfig {
            cut_rotation: 0.8,
            ..SymbolicConfig::default()
        };
        let inv0 = periodic_points(&pr, 3, seed, &cfg0).unwrap();
        let inv1 = periodic_points(&pr, 3, seed, &cfg1).unwrap();
        assert_eq!(inv0.found_count, inv1.found_count);
        for orb in &inv0.orbits {
            let z = orb.point();
            assert!(
                inv1.orbits.iter().any(|o| (o.point() - z).norm() < 1e-8),
                "point {z} missing under rotated labeling"
            );
        }
    }

    #[test]
    fn repelling_floor_against_certificate_rate() {
        // multiplier >= kappa^n / 2 with kappa = p/q at-and-near c = 0
        let inv = word_count_inventory(5, 2, 0.02, 4);
        let kappa: f64 = 2.5;
        for orb in &inv.orbits {
            assert!(orb.multiplier_modulus >= kappa.powi(4) / 2.0);
        }
    }

    #[test]
    fn word_cap_is_enforced() {
        let pr = params(5, 2, 0.0);
        let cfg = SymbolicConfig {
            word_cap: 100,
            ..SymbolicConfig::default()
        };
        assert!(matches!(
            periodic_points(&pr, 4, Complex64::new(1.0, 0.0), &cfg),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn word_index_round_trip() {
        for idx in [0u64, 1, 7, 124, 623] {
            let w = Word::from_index(idx, 5, 4);
            assert_eq!(w.to_index(5), idx);
            assert_eq!(w.len(), 4);
        }
    }
}
