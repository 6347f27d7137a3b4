//! Planar Julia-set sampling, box-counting dimension estimation, critical
//! orbit classification and diagnostic rendering.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;

use crate::correspondence::{escape_radius, images, inverse_branch, preimages, Orbit};
use crate::error::{Error, Result};
use crate::params::{Params, Tolerances, WORD_CAP};
use crate::symbolic::OrbitInventory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CloudSource {
    BackwardRandom,
    BackwardTree,
    Periodic,
}

/// Planar sample of the Julia set.
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub points: Vec<Complex64>,
    pub source: CloudSource,
    pub params: Params,
    pub rng_seed: Option<u64>,
}

impl PointCloud {
    pub fn from_inventory(params: &Params, inventory: &OrbitInventory) -> Self {
        Self {
            points: inventory.orbits.iter().map(|o| o.point()).collect(),
            source: CloudSource::Periodic,
            params: *params,
            rng_seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Axis-aligned bounding box (x0, y0, x1, y1).
    pub fn bounding_box(&self) -> Option<(f64, f64, f64, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut x0 = f64::INFINITY;
        let mut y0 = f64::INFINITY;
        let mut x1 = f64::NEG_INFINITY;
        let mut y1 = f64::NEG_INFINITY;
        for z in &self.points {
            x0 = x0.min(z.re);
            y0 = y0.min(z.im);
            x1 = x1.max(z.re);
            y1 = y1.max(z.im);
        }
        Some((x0, y0, x1, y1))
    }
}

/// A repelling solution of (z - c)^q = z^p, found by Newton from z = 1 with
/// stepwise continuation in c when |c| > 0.1. Used to seed backward orbits.
pub fn repelling_fixed_point(params: &Params) -> Result<Complex64> {
    repelling_fixed_point_from(params, Complex64::new(1.0, 0.0))
}

pub fn repelling_fixed_point_from(params: &Params, start: Complex64) -> Result<Complex64> {
    let c_target = params.c();
    let steps = if c_target.norm() > 0.1 {
        (c_target.norm() / 0.05).ceil() as usize
    } else {
        1
    };
    let mut z = start;
    for s in 1..=steps {
        let c = c_target * (s as f64 / steps as f64);
        let mut ok = false;
        for _ in 0..100 {
            let f = (z - c).powu(params.q()) - z.powu(params.p());
            let df = f64::from(params.q()) * (z - c).powu(params.q() - 1)
                - f64::from(params.p()) * z.powu(params.p() - 1);
            if df.norm() < 1e-300 {
                break;
            }
            let dz = f / df;
            z -= dz;
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::SeedFailure("Newton diverged".into()));
            }
            if dz.norm() < 1e-14 {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::SeedFailure(format!(
                "Newton stalled on the continuation path at c = {c}"
            )));
        }
    }
    let residual = ((z - c_target).powu(params.q()) - z.powu(params.p())).norm();
    if residual > 1e-12 {
        return Err(Error::SeedFailure(format!("residual {residual:.3e}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::SeedFailure("converged to the critical point".into()));
    }
    let mult = f64::from(params.p()) * (z - c_target).norm()
        / (f64::from(params.q()) * z.norm());
    if mult <= 1.0 {
        return Err(Error::SeedFailure(format!(
            "fixed point {z} is not repelling (|g'| = {mult:.6})"
        )));
    }
    Ok(z)
}

fn mix_seed(seed: u64, chunk: u64) -> u64 {
    // splitmix64 step
    let mut x = seed ^ chunk.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

const CHAIN_CHUNK: usize = 1 << 16;

/// Random backward orbit sampling: from the repelling fixed point, each chain
/// takes `transient` uniform inverse-branch steps and then records points.
/// Chains are chunked with per-chunk seeded streams, so the cloud is a pure
/// function of (params, count, transient, rng_seed).
pub fn julia_backward(
    params: &Params,
    count: usize,
    transient: usize,
    rng_seed: u64,
) -> Result<PointCloud> {
    if count == 0 || transient == 0 {
        return Err(Error::InvalidArgument(
            "count and transient must be >= 1".into(),
        ));
    }
    let z0 = repelling_fixed_point(params)?;
    let chunks = count.div_ceil(CHAIN_CHUNK);
    let points: Vec<Complex64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let take = CHAIN_CHUNK.min(count - chunk * CHAIN_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(rng_seed, chunk as u64));
            let mut z = z0;
            let mut out = Vec::with_capacity(take);
            let mut emitted = 0usize;
            let mut step = 0usize;
            while emitted < take {
                let k = rng.gen_range(0..params.p());
                match inverse_branch(params, z, k) {
                    Ok(next) => z = next,
                    // singular hit: resample another symbol next round
                    Err(_) => continue,
                }
                step += 1;
                if step > transient {
                    out.push(z);
                    emitted += 1;
                }
            }
            out
        })
        .collect();
    Ok(PointCloud {
        points,
        source: CloudSource::BackwardRandom,
        params: *params,
        rng_seed: Some(rng_seed),
    })
}

/// Full preimage tree of the repelling fixed point; records all p^depth
/// leaves in symbol-lexicographic order.
pub fn julia_tree(params: &Params, depth: u32) -> Result<PointCloud> {
    let leaves = params.word_count(depth)?;
    if leaves > WORD_CAP {
        return Err(Error::CapExceeded {
            requested: leaves,
            cap: WORD_CAP,
        });
    }
    let z0 = repelling_fixed_point(params)?;
    let mut level = vec![z0];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * params.p() as usize);
        for z in &level {
            for w in preimages(params, *z)? {
                next.push(w);
            }
        }
        level = next;
    }
    Ok(PointCloud {
        points: level,
        source: CloudSource::BackwardTree,
        params: *params,
        rng_seed: None,
    })
}

/// Box-counting fit: (epsilon, N(epsilon)) samples, the least-squares slope of
/// log N against log(1/epsilon), and the fit quality.
#[derive(Debug, Clone, Serialize)]
pub struct BoxCountResult {
    pub scales: Vec<(f64, u64)>,
    pub dimension: f64,
    pub r_squared: f64,
    pub scale_range: (f64, f64),
}

/// Counts occupied grid cells at scales side/2^k for k = k_min..=k_max and
/// fits the box dimension. The fit is refused when r^2 drops below 0.99.
pub fn box_counting(cloud: &PointCloud, k_min: u32, k_max: u32) -> Result<BoxCountResult> {
    if cloud.len() < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "box counting needs >= 10^4 points, got {}",
            cloud.len()
        )));
    }
    if k_max < k_min + 4 {
        return Err(Error::InvalidArgument(
            "need k_max - k_min >= 4 scales".into(),
        ));
    }
    let (x0, y0, x1, y1) = cloud.bounding_box().unwrap();
    let side = (x1 - x0).max(y1 - y0);
    if side <= 0.0 {
        return Err(Error::InvalidArgument("degenerate cloud".into()));
    }

    let mut scales = Vec::new();
    for k in k_min..=k_max {
        let cells = 1u64 << k;
        let eps = side / cells as f64;
        let count = cloud
            .points
            .par_chunks(1 << 16)
            .map(|chunk| {
                let mut set: HashSet<u64> = HashSet::with_capacity(chunk.len());
                for z in chunk {
                    let ix = (((z.re - x0) / eps) as u64).min(cells - 1);
                    let iy = (((z.im - y0) / eps) as u64).min(cells - 1);
                    set.insert(ix * cells + iy);
                }
                set
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            })
            .len() as u64;
        scales.push((eps, count));
    }

    // least squares of ln N against ln(1/eps)
    let xs: Vec<f64> = scales.iter().map(|(e, _)| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = scales.iter().map(|(_, n)| (*n as f64).ln()).collect();
    let (slope, _intercept, r2) = linear_fit(&xs, &ys);
    if r2 < 0.99 {
        return Err(Error::FitRejected { r_squared: r2 });
    }
    Ok(BoxCountResult {
        scale_range: (scales.last().unwrap().0, scales[0].0),
        scales,
        dimension: slope,
        r_squared: r2,
    })
}

pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AllEscape,
    SimpleCentre,
    BoundedOrbitExists,
    Undetermined,
}

/// Outcome of the critical-orbit test.
#[derive(Debug, Clone)]
pub struct CentreClassification {
    pub verdict: Verdict,
    pub periodic_witness: Option<Orbit>,
    pub depth_used: u32,
    pub escape_radius_used: f64,
    pub surviving_branches: usize,
    pub escaped_branches: usize,
}

/// Explores the q-ary forward orbit tree of the critical point 0, pruning any
/// branch that leaves |z| <= R (such branches provably diverge).
///
/// Verdicts: every branch pruned -> `AllEscape`; exactly one distinct branch
/// survives, revisits an earlier point of its own path, and at least one other
/// branch escaped -> `SimpleCentre`; two or more survivors, or a single
/// periodic survivor with no escaping companions (the c = 0 degeneracy)
/// -> `BoundedOrbitExists`; a single bounded non-periodic survivor
/// -> `Undetermined`.
pub fn critical_orbit_classify(params: &Params, depth: u32) -> Result<CentreClassification> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be >= 1".into()));
    }
    let radius = escape_radius(params);
    let revisit_tol = 1e-9;

    #[derive(Clone)]
    struct Branch {
        path: Vec<Complex64>,
    }

    let mut level: Vec<Branch> = vec![Branch {
        path: vec![Complex64::new(0.0, 0.0)],
    }];
    let mut escaped = 0usize;
    for _ in 0..depth {
        let mut next: Vec<Branch> = Vec::new();
        for b in &level {
            let z = *b.path.last().unwrap();
            let imgs = images(params, z)?;
            // collapse duplicated children (images of 0 are c with multiplicity q)
            let mut kids: Vec<Complex64> = Vec::new();
            for w in imgs {
                if !kids.iter().any(|k| (k - w).norm() < 1e-13) {
                    kids.push(w);
                }
            }
            for w in kids {
                if w.norm() > radius {
                    escaped += 1;
                } else {
                    let mut path = b.path.clone();
                    path.push(w);
                    next.push(Branch { path });
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
        // merge branches whose full paths coincide
        level.dedup_by(|a, b| {
            a.path.len() == b.path.len()
                && a.path
                    .iter()
                    .zip(&b.path)
                    .all(|(x, y)| (x - y).norm() < 1e-13)
        });
    }

    let surviving = level.len();
    if surviving == 0 {
        return Ok(CentreClassification {
            verdict: Verdict::AllEscape,
            periodic_witness: None,
            depth_used: depth,
            escape_radius_used: radius,
            surviving_branches: 0,
            escaped_branches: escaped,
        });
    }

    // periodicity: a survivor revisits any earlier point of its path
    let find_witness = |b: &Branch| -> Option<Orbit> {
        let path = &b.path;
        for j in 1..path.len() {
            for i in 0..j {
                if (path[j] - path[i]).norm() <= revisit_tol {
                    let mut cyc = path[i..=j].to_vec();
                    let last = cyc.len() - 1;
                    cyc[last] = cyc[0];
                    return Orbit::new(params, cyc, &Tolerances::default()).ok();
                }
            }
        }
        None
    };

    if surviving == 1 {
        let witness = find_witness(&level[0]);
        let verdict = match (&witness, escaped) {
            (Some(_), 0) => Verdict::BoundedOrbitExists,
            (Some(_), _) => Verdict::SimpleCentre,
            (None, _) => Verdict::Undetermined,
        };
        return Ok(CentreClassification {
            verdict,
            periodic_witness: witness,
            depth_used: depth,
            escape_radius_used: radius,
            surviving_branches: 1,
            escaped_branches: escaped,
        });
    }

    let witness = level.iter().find_map(find_witness);
    Ok(CentreClassification {
        verdict: Verdict::BoundedOrbitExists,
        periodic_witness: witness,
        depth_used: depth,
        escape_radius_used: radius,
        surviving_branches: surviving,
        escaped_branches: escaped,
    })
}

/// Grayscale hit-count image of a cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
    /// Plot window (x0, y0, x1, y1): cloud bounding box plus a 5% margin.
    pub window: (f64, f64, f64, f64),
}

/// Hit-count histogram over a width x height grid covering the cloud's
/// bounding box with a 5% margin, log-scaled to 8-bit grayscale.
pub fn render(cloud: &PointCloud, width: u32, height: u32) -> Result<GrayImage> {
    if cloud.is_empty() {
        return Err(Error::InvalidArgument("empty cloud".into()));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument("zero image dimension".into()));
    }
    let (x0, y0, x1, y1) = cloud.bounding_box().unwrap();
    let mx = 0.05 * (x1 - x0).max(f64::MIN_POSITIVE);
    let my = 0.05 * (y1 - y0).max(f64::MIN_POSITIVE);
    let window = (x0 - mx, y0 - my, x1 + mx, y1 + my);
    let dx = (window.2 - window.0) / f64::from(width);
    let dy = (window.3 - window.1) / f64::from(height);

    let mut hits = vec![0u32; width as usize * height as usize];
    for z in &cloud.points {
        let ix = (((z.re - window.0) / dx) as u32).min(width - 1);
        let iy = (((z.im - window.1) / dy) as u32).min(height - 1);
        // image rows top-down, complex plane bottom-up
        let row = height - 1 - iy;
        hits[(row * width + ix) as usize] += 1;
    }
    let hmax = *hits.iter().max().unwrap();
    let scale = if hmax > 0 {
        255.0 / f64::from(1 + hmax).ln()
    } else {
        0.0
    };
    let pixels = hits
        .iter()
        .map(|&h| {
            if h == 0 {
                0
            } else {
                (f64::from(1 + h).ln() * scale).round().min(255.0) as u8
            }
        })
        .collect();
    Ok(GrayImage {
        width,
        height,
        pixels,
        window,
    })
}
