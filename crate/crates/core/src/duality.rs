//! Duality bounds, normalized coordinates, and the physical region.
//!
//! For an n-path configuration with coherence X = (1/n)Σ_{j≠k}|ρ_jk S_kj|
//! and optimal which-way probability P_d, the trade-off lemma states
//!
//! > X − ((n−2)/n)(1−P_d) − (2/n)√((n−1)P_d(1−P_d)) ≤ 0,
//!
//! evaluated by [`lemma1_lhs`]. In the normalized coordinates
//! x = X/(1−1/n), y = (P_d−1/n)/(1−1/n) of [`to_xy`] (or their operational
//! twins in [`to_xy_operational`]) every physical point lies in the union
//! 𝒯∪ℰ of the triangle x+y ≤ 1 and the ellipse
//!
//! > ((x+y−(n−2)/(n−1)) / (√n/(n−1)))² + ((x−y) / √(n/(n−1)))² ≤ 1,
//!
//! tested by [`region_membership`]. At n=2 the ellipse is exactly the unit
//! circle; as n → ∞ it collapses onto the line x+y = 1. The combined-game
//! ceiling is [`theorem1_bound`] = 1/2 + 1/(2√n), attained by the symmetric
//! family at [`optimal_overlap`]. [`soundness_sweep`] hammers the bounds
//! with seeded random configurations and reports the worst violations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrimination::{self, symmetric_pd, Ensemble};
use crate::error::{Error, Result};
use crate::interferometer::{canonical_phases, coherence_x, DensityMatrix, DetectorGram};
use crate::numerics::tol;
use crate::sample;

/// Input slack accepted (and clamped away) on solver-produced
/// probabilities before coordinate maps and bound evaluation.
const INPUT_SLACK: f64 = 1e-9;
/// Iteration cap for the phases solver inside sweeps; its value is an
/// achievable lower bound at any cap, which is the safe direction for
/// membership checks (the region is closed downward in both coordinates).
const SWEEP_PHASES_MAX_ITER: usize = 4_000;

/// Which coordinate map produced a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointSource {
    /// x from the coherence X (wave side known exactly).
    Coherence,
    /// x from the operational phases-game probability P_ph.
    Operational,
}

/// A point in the normalized duality square [0,1]².
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DualityPoint {
    pub x: f64,
    pub y: f64,
    pub n: usize,
    pub source: PointSource,
}

impl DualityPoint {
    /// Validate and clamp: coordinates within [−1e−9, 1+1e−9] are clamped
    /// into [0,1]; anything further out is rejected.
    pub fn new(x: f64, y: f64, n: usize, source: PointSource) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDim { got: n, min: 2 });
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite {
                context: "duality point coordinates",
            });
        }
        for v in [x, y] {
            if !(-INPUT_SLACK..=1.0 + INPUT_SLACK).contains(&v) {
                return Err(Error::OutOfRange {
                    name: "duality coordinate",
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Self {
            x: x.clamp(0.0, 1.0),
            y: y.clamp(0.0, 1.0),
            n,
            source,
        })
    }
}

/// Geometry of the elliptical part ℰ of the physical region.
///
/// The center sits on the diagonal x = y; the minor axis points along
/// (1,1)/√2 with length √(n/2)/(n−1), the major axis along (1,−1)/√2 with
/// length √(n/(2(n−1))) — parallel to the line x+y = 1 at distance
/// 1/(√2(n−1)) below it. At n=2 both axes equal 1 and ℰ is the unit circle.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RegionSpec {
    pub n: usize,
    /// Ellipse center (on x = y).
    pub center: (f64, f64),
    /// Semi-axis along (1,1)/√2.
    pub semi_minor: f64,
    /// Semi-axis along (1,−1)/√2.
    pub semi_major: f64,
    /// Angle of the major axis measured from the x-axis (always −π/4).
    pub orientation: f64,
}

impl RegionSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDim { got: n, min: 2 });
        }
        let nf = n as f64;
        let c = (nf - 2.0) / (2.0 * (nf - 1.0));
        Ok(Self {
            n,
            center: (c, c),
            semi_minor: (nf / 2.0).sqrt() / (nf - 1.0),
            semi_major: (nf / (2.0 * (nf - 1.0))).sqrt(),
            orientation: -std::f64::consts::FRAC_PI_4,
        })
    }

    /// The quadratic form whose unit level set is the ellipse boundary:
    /// ((x+y−(n−2)/(n−1))/(√n/(n−1)))² + ((x−y)/√(n/(n−1)))².
    pub fn form(&self, x: f64, y: f64) -> f64 {
        let nf = self.n as f64;
        let c1 = (nf - 2.0) / (nf - 1.0);
        let a = nf.sqrt() / (nf - 1.0);
        let b = (nf / (nf - 1.0)).sqrt();
        ((x + y - c1) / a).powi(2) + ((x - y) / b).powi(2)
    }
}

/// The ellipse quadratic form at (x, y) for dimension n.
pub fn ellipse_form(n: usize, x: f64, y: f64) -> Result<f64> {
    Ok(RegionSpec::new(n)?.form(x, y))
}

/// Combined-game ceiling 1/2 + 1/(2√n).
pub fn theorem1_bound(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDim { got: n, min: 2 });
    }
    Ok(0.5 + 0.5 / (n as f64).sqrt())
}

/// The constant detector overlap 1/2 + 1/(2+2√n) at which the symmetric
/// family attains the combined-game ceiling (P_d = P_ph there).
pub fn optimal_overlap(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDim { got: n, min: 2 });
    }
    Ok(0.5 + 1.0 / (2.0 + 2.0 * (n as f64).sqrt()))
}

fn checked_x_coh(x_coh: f64, n: usize) -> Result<f64> {
    let hi = (n as f64 - 1.0) / n as f64;
    if !x_coh.is_finite() || !(-INPUT_SLACK..=hi + INPUT_SLACK).contains(&x_coh) {
        return Err(Error::OutOfRange {
            name: "coherence",
            value: x_coh,
            lo: 0.0,
            hi,
        });
    }
    Ok(x_coh.clamp(0.0, hi))
}

fn checked_prob(p: f64, name: &'static str, n: usize) -> Result<f64> {
    let lo = 1.0 / n as f64;
    if !p.is_finite() || !(lo - INPUT_SLACK..=1.0 + INPUT_SLACK).contains(&p) {
        return Err(Error::OutOfRange {
            name,
            value: p,
            lo,
            hi: 1.0,
        });
    }
    Ok(p.clamp(lo, 1.0))
}

/// Left-hand side of the coherence/which-way trade-off: physical
/// configurations give a value ≤ 0 (up to solver tolerance), with equality
/// on the attainment family.
pub fn lemma1_lhs(x_coh: f64, pd: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDim { got: n, min: 2 });
    }
    let x = checked_x_coh(x_coh, n)?;
    let pd = checked_prob(pd, "which-way probability", n)?;
    let nf = n as f64;
    Ok(x - (nf - 2.0) / nf * (1.0 - pd) - 2.0 / nf * ((nf - 1.0) * pd * (1.0 - pd)).sqrt())
}

/// Coherence-based coordinates: x = X/(1−1/n), y = (P_d−1/n)/(1−1/n).
pub fn to_xy(x_coh: f64, pd: f64, n: usize) -> Result<DualityPoint> {
    if n < 2 {
        return Err(Error::InvalidDim { got: n, min: 2 });
    }
    let x_coh = checked_x_coh(x_coh, n)?;
    let pd = checked_prob(pd, "which-way probability", n)?;
    let nf = n as f64;
    let denom = 1.0 - 1.0 / nf;
    DualityPoint::new(
        x_coh / denom,
        (pd - 1.0 / nf) / denom,
        n,
        PointSource::Coherence,
    )
}

/// Operational coordinates: x = (P_ph−1/n)/(1−1/n), y = (P_way−1/n)/(1−1/n).
/// Since P_ph ≤ X + 1/n, the operational x never exceeds the coherence x
/// of the same configuration (up to roundoff).
pub fn to_xy_operational(pph: f64, pway: f64, n: usize) -> Result<DualityPoint> {
    if n < 2 {
        return Err(Error::InvalidDim { got: n, min: 2 });
    }
    let pph = checked_prob(pph, "phases probability", n)?;
    let pway = checked_prob(pway, "which-way probability", n)?;
    let nf = n as f64;
    let denom = 1.0 - 1.0 / nf;
    DualityPoint::new(
        (pph - 1.0 / nf) / denom,
        (pway - 1.0 / nf) / denom,
        n,
        PointSource::Operational,
    )
}

/// x² + y² − 1: the two-path prior-work relation (≤ 0 on its obeying set).
pub fn circle_relation(p: &DualityPoint) -> f64 {
    p.x * p.x + p.y * p.y - 1.0
}

/// Membership in 𝒯∪ℰ with one-sided tolerance 1e−9; also returns the
/// signed ellipse-form value minus 1. A point is a member when it lies in
/// the triangle x+y ≤ 1 or inside the ellipse (form ≤ 1).
pub fn region_membership(p: &DualityPoint) -> (bool, f64) {
    let form = RegionSpec::new(p.n)
        .expect("point dimension validated at construction")
        .form(p.x, p.y);
    let member = p.x + p.y - 1.0 <= tol::REGION || form - 1.0 <= tol::REGION;
    (member, form - 1.0)
}

/// How far outside 𝒯∪ℰ a point sits: min of the triangle overage
/// max(x+y−1, 0) and the ellipse overage max(form−1, 0). Zero exactly on
/// members; thresholding at τ reproduces membership with tolerance τ.
pub fn union_excess(p: &DualityPoint) -> f64 {
    let (_, form_minus_one) = region_membership(p);
    let triangle = (p.x + p.y - 1.0).max(0.0);
    let ellipse = form_minus_one.max(0.0);
    triangle.min(ellipse)
}

/// A point of the ellipse boundary parametrization, possibly outside the
/// positive quadrant (flagged, never silently clipped).
#[derive(Clone, Copy, Debug)]
pub struct EllipsePoint {
    /// Raw parametric coordinates; may dip below 0 near the axes.
    pub x: f64,
    pub y: f64,
    pub n: usize,
    pub t: f64,
    pub in_quadrant: bool,
}

impl EllipsePoint {
    /// The point clipped into the unit square as a [`DualityPoint`].
    pub fn clipped(&self) -> Result<DualityPoint> {
        DualityPoint::new(
            self.x.clamp(0.0, 1.0),
            self.y.clamp(0.0, 1.0),
            self.n,
            PointSource::Coherence,
        )
    }
}

fn ellipse_parametrization(n: usize, t: f64) -> (f64, f64) {
    let nf = n as f64;
    let c1 = (nf - 2.0) / (nf - 1.0);
    let a = nf.sqrt() / (nf - 1.0);
    let b = (nf / (nf - 1.0)).sqrt();
    let sum = c1 + a * t.cos();
    let diff = b * t.sin();
    (0.5 * (sum + diff), 0.5 * (sum - diff))
}

/// Parametric boundary point of ℰ at angle t (periodic in 2π): t = 0 is
/// the minor-axis tip away from the origin, t = π/2 the major-axis tip
/// toward the x-axis. Points leaving the positive quadrant are flagged.
/// Two-path callers use the circle: the form degenerates there, so n ≥ 3.
pub fn ellipse_boundary(n: usize, t: f64) -> Result<EllipsePoint> {
    if n < 3 {
        return Err(Error::InvalidDim { got: n, min: 3 });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite {
            context: "ellipse parameter",
        });
    }
    let (x, y) = ellipse_parametrization(n, t);
    Ok(EllipsePoint {
        x,
        y,
        n,
        t,
        in_quadrant: x >= -1e-12 && y >= -1e-12,
    })
}

/// The symmetric constant-overlap family point: x = s exactly,
/// y from the closed-form P_d. Lies on the ellipse boundary for every s.
pub fn symmetric_family_point(n: usize, s: f64) -> Result<DualityPoint> {
    let pd = symmetric_pd(n, s)?;
    let nf = n as f64;
    DualityPoint::new(
        s,
        (pd - 1.0 / nf) / (1.0 - 1.0 / nf),
        n,
        PointSource::Coherence,
    )
}

/// The seeded random physical configuration with the given index: ρ from a
/// normalized Wishart-style draw, S an independent unit-diagonal PSD draw.
/// (House phases play no role in X or P_d; sweeps use the canonical set.)
pub fn sample_config(n: usize, seed: u64, index: u64) -> (DensityMatrix, DetectorGram) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let rho = sample::random_density(n, &mut rng);
    let s = sample::random_detector_gram(n, &mut rng);
    (rho, s)
}

/// Everything the soundness checks need about one configuration.
#[derive(Clone, Copy, Debug)]
pub struct ConfigCheck {
    /// Coherence X.
    pub x_coh: f64,
    /// Ways-game optimum from the fixed-point solver.
    pub p_way: f64,
    /// Trade-off left-hand side (≤ 0 for physical configurations).
    pub lemma_lhs: f64,
    /// Coherence-based coordinates.
    pub point: DualityPoint,
    /// Distance outside 𝒯∪ℰ (0 for members).
    pub excess: f64,
}

/// Evaluate the coherence, the ways optimum, the trade-off LHS, and region
/// membership of one configuration.
pub fn check_config(rho: &DensityMatrix, s: &DetectorGram) -> Result<ConfigCheck> {
    let n = rho.dim();
    let x_coh = coherence_x(rho, s)?;
    let ensemble = Ensemble::detector_ensemble(rho, s)?;
    let (p_way, _) = discrimination::min_error_value(
        &ensemble,
        discrimination::FIXED_POINT_MAX_ITER,
        1e-10,
    )?;
    let lemma_lhs = lemma1_lhs(x_coh, p_way, n)?;
    let point = to_xy(x_coh, p_way, n)?;
    let excess = union_excess(&point);
    Ok(ConfigCheck {
        x_coh,
        p_way,
        lemma_lhs,
        point,
        excess,
    })
}

/// Aggregate outcome of [`soundness_sweep`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub configs: u64,
    pub seed: u64,
    /// Largest trade-off LHS seen (should be ≤ 1e−8).
    pub max_lemma_lhs: f64,
    /// Largest region excess of a coherence point (should be ≤ 1e−8).
    pub max_excess: f64,
    /// Largest region excess of an operational point, when computed.
    pub max_operational_excess: Option<f64>,
    /// Largest (operational x − coherence x) gap, when computed
    /// (should be ≤ 1e−12 by the phase-information bound).
    pub max_operational_x_gap: Option<f64>,
    /// Index of the configuration with the worst violation score
    /// (reproducible through [`sample_config`] with the same seed).
    pub worst_index: u64,
    /// max(lemma LHS, excess) of that configuration.
    pub worst_score: f64,
}

struct SweepOutcome {
    index: u64,
    lemma_lhs: f64,
    excess: f64,
    op_excess: Option<f64>,
    op_x_gap: Option<f64>,
}

/// Run `configs` seeded random configurations at dimension n, checking the
/// trade-off lemma and region membership of the coherence point; with
/// `operational` also solve the phases game (iteration-capped; lower
/// bounds are membership-safe) and check the operational point and the
/// P_ph ≤ X + 1/n consistency. Configurations run concurrently; the
/// aggregation is a commutative max, so results are schedule-independent.
pub fn soundness_sweep(
    n: usize,
    configs: u64,
    seed: u64,
    operational: bool,
) -> Result<SweepReport> {
    if configs == 0 {
        return Err(Error::OutOfRange {
            name: "configs",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let phases = canonical_phases(n)?;
    let outcomes: Vec<SweepOutcome> = (0..configs)
        .into_par_iter()
        .map(|index| -> Result<SweepOutcome> {
            let (rho, s) = sample_config(n, seed, index);
            let check = check_config(&rho, &s)?;
            let (op_excess, op_x_gap) = if operational {
                let ensemble = Ensemble::phases_ensemble(&rho, &s, &phases)?;
                let (p_ph, _) = discrimination::min_error_value(
                    &ensemble,
                    SWEEP_PHASES_MAX_ITER,
                    tol::BOUND_CHECK,
                )?;
                let op = to_xy_operational(p_ph, check.p_way, n)?;
                (Some(union_excess(&op)), Some(op.x - check.point.x))
            } else {
                (None, None)
            };
            Ok(SweepOutcome {
                index,
                lemma_lhs: check.lemma_lhs,
                excess: check.excess,
                op_excess,
                op_x_gap,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = SweepReport {
        n,
        configs,
        seed,
        max_lemma_lhs: f64::NEG_INFINITY,
        max_excess: f64::NEG_INFINITY,
        max_operational_excess: operational.then_some(f64::NEG_INFINITY),
        max_operational_x_gap: operational.then_some(f64::NEG_INFINITY),
        worst_index: 0,
        worst_score: f64::NEG_INFINITY,
    };
    for o in &outcomes {
        report.max_lemma_lhs = report.max_lemma_lhs.max(o.lemma_lhs);
        report.max_excess = report.max_excess.max(o.excess);
        if let (Some(acc), Some(v)) = (report.max_operational_excess.as_mut(), o.op_excess) {
            *acc = acc.max(v);
        }
        if let (Some(acc), Some(v)) = (report.max_operational_x_gap.as_mut(), o.op_x_gap) {
            *acc = acc.max(v);
        }
        let score = o.lemma_lhs.max(o.excess);
        if score > report.worst_score {
            report.worst_score = score;
            report.worst_index = o.index;
        }
    }
    Ok(report)
}

/// One CSV row of region data (boundary traces and sampled points share
/// the schema `n,s_or_t,x,y,ellipse_form,lemma1_lhs`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub n: usize,
    /// Boundary parameter (ellipse angle t, or line/sample parameter).
    pub s_or_t: f64,
    pub x: f64,
    pub y: f64,
    pub ellipse_form: f64,
    pub lemma1_lhs: f64,
}

fn row_from_xy(n: usize, s_or_t: f64, x: f64, y: f64) -> Result<RegionRow> {
    let nf = n as f64;
    let denom = 1.0 - 1.0 / nf;
    let x_coh = x * denom;
    let pd = y * denom + 1.0 / nf;
    Ok(RegionRow {
        n,
        s_or_t,
        x,
        y,
        ellipse_form: ellipse_form(n, x, y)?,
        lemma1_lhs: lemma1_lhs(x_coh, pd, n)?,
    })
}

/// Boundary rows: the in-quadrant elliptical arc (the full unit circle
/// quadrant at n=2) on a `grid`-point parameter sweep, followed by the
/// triangle hypotenuse x+y = 1.
pub fn boundary_rows(n: usize, grid: usize) -> Result<Vec<RegionRow>> {
    if n < 2 {
        return Err(Error::InvalidDim { got: n, min: 2 });
    }
    if grid < 2 {
        return Err(Error::OutOfRange {
            name: "grid",
            value: grid as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let mut rows = Vec::new();
    for k in 0..grid {
        let t = std::f64::consts::TAU * k as f64 / grid as f64;
        let (x, y) = ellipse_parametrization(n, t);
        if x >= -1e-12 && y >= -1e-12 {
            rows.push(row_from_xy(n, t, x.clamp(0.0, 1.0), y.clamp(0.0, 1.0))?);
        }
    }
    for k in 0..=grid {
        let u = k as f64 / grid as f64;
        rows.push(row_from_xy(n, u, 1.0 - u, u)?);
    }
    Ok(rows)
}

/// Sampled-configuration rows: the coherence points of `samples` seeded
/// random configurations (s_or_t carries the sample index).
pub fn sample_rows(n: usize, samples: u64, seed: u64) -> Result<Vec<RegionRow>> {
    (0..samples)
        .into_par_iter()
        .map(|index| {
            let (rho, s) = sample_config(n, seed, index);
            let check = check_config(&rho, &s)?;
            Ok(RegionRow {
                n,
                s_or_t: index as f64,
                x: check.point.x,
                y: check.point.y,
                ellipse_form: ellipse_form(n, check.point.x, check.point.y)?,
                lemma1_lhs: check.lemma_lhs,
            })
        })
        .collect()
}

/// Full region export: boundary rows then sample rows.
pub fn region_rows(n: usize, grid: usize, samples: u64, seed: u64) -> Result<Vec<RegionRow>> {
    let mut rows = boundary_rows(n, grid)?;
    rows.extend(sample_rows(n, samples, seed)?);
    Ok(rows)
}

/// Monte Carlo estimate of the area of (𝒯∪ℰ) ∩ [0,1]²: the member
/// fraction of `points` uniform draws. Decreasing in n; → 1/2 (the
/// triangle) as n → ∞, and π/4 at n=2 (the circle quadrant).
pub fn region_area_estimate(n: usize, points: u64, seed: u64) -> Result<f64> {
    if points == 0 {
        return Err(Error::OutOfRange {
            name: "points",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let spec = RegionSpec::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inside = 0u64;
    for _ in 0..points {
        let x: f64 = rand::Rng::gen(&mut rng);
        let y: f64 = rand::Rng::gen(&mut rng);
        if x + y - 1.0 <= tol::REGION || spec.form(x, y) - 1.0 <= tol::REGION {
            inside += 1;
        }
    }
    Ok(inside as f64 / points as f64)
}

/// One row of the constant-overlap family sweep
/// (schema `s,X,P_d,x,y,lemma1_lhs,ellipse_form`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricRow {
    pub s: f64,
    pub x_coh: f64,
    pub p_d: f64,
    pub x: f64,
    pub y: f64,
    pub lemma1_lhs: f64,
    pub ellipse_form: f64,
}

/// Sweep the maximally-coherent constant-overlap family over a uniform
/// `grid`-point overlap sweep of [0,1], with the boundary-attaining
/// overlap 1/2 + 1/(2+2√n) inserted in order. Every row sits on the
/// elliptical boundary with lemma residual 0 (up to roundoff).
pub fn symmetric_rows(n: usize, grid: usize) -> Result<Vec<SymmetricRow>> {
    if grid < 2 {
        return Err(Error::OutOfRange {
            name: "grid",
            value: grid as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let mut overlaps: Vec<f64> = (0..grid).map(|k| k as f64 / (grid - 1) as f64).collect();
    let star = optimal_overlap(n)?;
    let pos = overlaps.partition_point(|&v| v < star);
    if overlaps.get(pos) != Some(&star) {
        overlaps.insert(pos, star);
    }
    overlaps
        .into_iter()
        .map(|s| {
            let nf = n as f64;
            let x_coh = s * (nf - 1.0) / nf;
            let p_d = crate::discrimination::symmetric_pd(n, s)?;
            let point = symmetric_family_point(n, s)?;
            Ok(SymmetricRow {
                s,
                x_coh,
                p_d,
                x: point.x,
                y: point.y,
                lemma1_lhs: lemma1_lhs(x_coh, p_d, n)?,
                ellipse_form: ellipse_form(n, point.x, point.y)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2_INV: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn theorem1_values_and_monotonicity() {
        assert!((theorem1_bound(2).unwrap() - 0.8535533905932738).abs() <= 1e-12);
        assert!((theorem1_bound(4).unwrap() - 0.75).abs() <= 1e-15);
        assert!((theorem1_bound(100).unwrap() - 0.55).abs() <= 1e-15);
        let mut prev = theorem1_bound(2).unwrap();
        for n in 3..200 {
            let v = theorem1_bound(n).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(matches!(theorem1_bound(1), Err(Error::InvalidDim { .. })));
    }

    #[test]
    fn optimal_overlap_attains_the_bound() {
        assert!((optimal_overlap(2).unwrap() - SQRT2_INV).abs() <= 1e-12);
        assert!((optimal_overlap(4).unwrap() - 2.0 / 3.0).abs() <= 1e-15);
        for n in 2..=50 {
            let s = optimal_overlap(n).unwrap();
            let pd = symmetric_pd(n, s).unwrap();
            assert!(
                (pd - theorem1_bound(n).unwrap()).abs() <= 1e-9,
                "attainment failed at n={n}"
            );
        }
    }

    #[test]
    fn lemma_lhs_attainment_and_sign() {
        // Two-path attainment point, exact expressions.
        let pd = 0.5 + 0.5 * SQRT2_INV;
        let lhs = lemma1_lhs(0.25 * 2.0_f64.sqrt(), pd, 2).unwrap();
        assert!(lhs.abs() <= 1e-9, "attainment LHS = {lhs}");
        // Diagonal input: X = 0 keeps the LHS non-positive for every pd.
        for k in 0..=20 {
            let pd = 0.25 + 0.75 * k as f64 / 20.0;
            assert!(lemma1_lhs(0.0, pd, 4).unwrap() <= 0.0);
        }
        // Four-path symmetric family: equality all along.
        for k in 0..=100 {
            let s = k as f64 / 100.0;
            let x = 3.0 * s / 4.0;
            let pd = symmetric_pd(4, s).unwrap();
            let lhs = lemma1_lhs(x, pd, 4).unwrap();
            assert!(lhs.abs() <= 1e-8, "family LHS {lhs} at s={s}");
        }
        assert!(matches!(
            lemma1_lhs(0.9, 0.5, 2),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn coordinate_maps() {
        let p = to_xy(0.3, 0.25, 4).unwrap();
        assert!((p.y - 0.0).abs() <= 1e-15, "pd = 1/n maps to y = 0");
        assert_eq!(p.source, PointSource::Coherence);
        let p = to_xy(0.0, 1.0, 4).unwrap();
        assert!((p.y - 1.0).abs() <= 1e-15);
        // n=2 symmetric family traces the unit circle.
        for k in 0..=100 {
            let s = k as f64 / 100.0;
            let x = s / 2.0;
            let pd = symmetric_pd(2, s).unwrap();
            let p = to_xy(x, pd, 2).unwrap();
            assert!((p.x - s).abs() <= 1e-12);
            assert!(
                (p.x * p.x + p.y * p.y - 1.0).abs() <= 1e-10,
                "circle violated at s={s}"
            );
            assert!(circle_relation(&p).abs() <= 1e-10);
        }
        // Operational map trivials.
        let p = to_xy_operational(0.25, 0.25, 4).unwrap();
        assert!(p.x.abs() <= 1e-15 && p.y.abs() <= 1e-15);
        assert_eq!(p.source, PointSource::Operational);
        let p = to_xy_operational(1.0, 0.25, 4).unwrap();
        assert!((p.x - 1.0).abs() <= 1e-15 && p.y.abs() <= 1e-15);
        let p = to_xy_operational(0.75, 0.75, 4).unwrap();
        assert!((p.x - 2.0 / 3.0).abs() <= 1e-12);
        assert!((p.y - 2.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn circle_relation_corners() {
        let origin = DualityPoint::new(0.0, 0.0, 2, PointSource::Coherence).unwrap();
        assert!((circle_relation(&origin) + 1.0).abs() <= 1e-15);
        let corner = DualityPoint::new(1.0, 0.0, 2, PointSource::Coherence).unwrap();
        assert!(circle_relation(&corner).abs() <= 1e-15);
    }

    #[test]
    fn membership_two_path_is_the_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x: f64 = rand::Rng::gen(&mut rng);
            let y: f64 = rand::Rng::gen(&mut rng);
            let p = DualityPoint::new(x, y, 2, PointSource::Coherence).unwrap();
            let (member, form_minus_one) = region_membership(&p);
            let circle = x * x + y * y - 1.0;
            assert!(
                (form_minus_one - circle).abs() <= 1e-12,
                "two-path form vs circle mismatch"
            );
            // At n=2 the triangle lies inside the circle, so membership is
            // exactly the circle test.
            assert_eq!(member, circle <= tol::REGION);
        }
    }

    #[test]
    fn membership_examples() {
        let p = DualityPoint::new(0.9, 0.9, 9, PointSource::Coherence).unwrap();
        let (member, form_minus_one) = region_membership(&p);
        assert!(!member);
        assert!(form_minus_one > 0.0);
        assert!(union_excess(&p) > 0.0);
        // The x = y attainment point sits on the ellipse boundary.
        for n in 2..=12 {
            let nf = n as f64;
            let coord = (theorem1_bound(n).unwrap() - 1.0 / nf) / (1.0 - 1.0 / nf);
            let p = DualityPoint::new(coord, coord, n, PointSource::Coherence).unwrap();
            let (member, form_minus_one) = region_membership(&p);
            assert!(member);
            assert!(
                form_minus_one.abs() <= 1e-9,
                "attainment point off boundary at n={n}: {form_minus_one}"
            );
        }
    }

    #[test]
    fn ellipse_boundary_geometry() {
        for n in [3usize, 5, 9] {
            let spec = RegionSpec::new(n).unwrap();
            // Form is 1 along the whole parametrization (raw coordinates).
            for k in 0..64 {
                let t = std::f64::consts::TAU * k as f64 / 64.0;
                let p = ellipse_boundary(n, t).unwrap();
                assert!(
                    (spec.form(p.x, p.y) - 1.0).abs() <= 1e-12,
                    "form off unity at n={n}, t={t}"
                );
            }
            // Axis tips.
            let minor = ellipse_boundary(n, 0.0).unwrap();
            let d = ((minor.x - spec.center.0).powi(2) + (minor.y - spec.center.1).powi(2)).sqrt();
            assert!((d - spec.semi_minor).abs() <= 1e-14);
            let major = ellipse_boundary(n, std::f64::consts::FRAC_PI_2).unwrap();
            let d = ((major.x - spec.center.0).powi(2) + (major.y - spec.center.1).powi(2)).sqrt();
            assert!((d - spec.semi_major).abs() <= 1e-14);
            assert!((spec.semi_major / spec.semi_minor - ((n - 1) as f64).sqrt()).abs() <= 1e-12);
            // Intersections with x+y = 1 at cos t = 1/√n.
            let t_meet = (1.0 / (n as f64).sqrt()).acos();
            for t in [t_meet, -t_meet] {
                let p = ellipse_boundary(n, t).unwrap();
                assert!((p.x + p.y - 1.0).abs() <= 1e-12);
            }
        }
        // Opposite minor tip leaves the quadrant at n=3.
        let outside = ellipse_boundary(3, std::f64::consts::PI).unwrap();
        assert!(!outside.in_quadrant);
        assert!(outside.x < 0.0 && outside.y < 0.0);
        let clipped = outside.clipped().unwrap();
        assert!(clipped.x == 0.0 && clipped.y == 0.0);
        assert!(matches!(
            ellipse_boundary(2, 0.0),
            Err(Error::InvalidDim { .. })
        ));
    }

    #[test]
    fn ellipse_collapses_to_line_for_large_n() {
        // Distance from in-quadrant boundary points to the segment
        // x+y = 1, 0 ≤ x ≤ 1 stays on the 2/√n scale.
        let n = 10_000;
        let mut max_dist = 0.0_f64;
        for k in 0..2000 {
            let t = std::f64::consts::TAU * k as f64 / 2000.0;
            let p = ellipse_boundary(n, t).unwrap();
            if !p.in_quadrant {
                continue;
            }
            max_dist = max_dist.max(segment_distance(p.x, p.y));
        }
        let scale = 2.0 / (n as f64).sqrt();
        assert!(
            max_dist <= 1.05 * scale,
            "collapse too slow: {max_dist} vs scale {scale}"
        );
    }

    fn segment_distance(x: f64, y: f64) -> f64 {
        // Distance to the segment from (1,0) to (0,1).
        let u = ((x - 1.0) * (-1.0) + y * 1.0) / 2.0;
        let u = u.clamp(0.0, 1.0);
        let (px, py) = (1.0 - u, u);
        ((x - px).powi(2) + (y - py).powi(2)).sqrt()
    }

    #[test]
    fn symmetric_family_on_the_boundary() {
        let endpoints = symmetric_family_point(3, 0.0).unwrap();
        assert!(endpoints.x.abs() <= 1e-15 && (endpoints.y - 1.0).abs() <= 1e-12);
        let endpoints = symmetric_family_point(3, 1.0).unwrap();
        assert!((endpoints.x - 1.0).abs() <= 1e-15 && endpoints.y.abs() <= 1e-12);
        for n in 2..=8 {
            for k in 0..=100 {
                let s = k as f64 / 100.0;
                let p = symmetric_family_point(n, s).unwrap();
                let (member, form_minus_one) = region_membership(&p);
                assert!(member);
                assert!(
                    form_minus_one.abs() <= 1e-8,
                    "family point off boundary at n={n}, s={s}: {form_minus_one}"
                );
            }
            // The optimal overlap lands on x = y.
            let p = symmetric_family_point(n, optimal_overlap(n).unwrap()).unwrap();
            assert!((p.x - p.y).abs() <= 1e-9, "x≠y at the optimum for n={n}");
        }
    }

    #[test]
    fn sweep_small_smoke() {
        let report = soundness_sweep(2, 40, 11, true).unwrap();
        assert!(report.max_lemma_lhs <= tol::BOUND_CHECK);
        assert!(report.max_excess <= tol::BOUND_CHECK);
        assert!(report.max_operational_excess.unwrap() <= tol::BOUND_CHECK);
        assert!(report.max_operational_x_gap.unwrap() <= 1e-8);
        let report3 = soundness_sweep(3, 25, 13, false).unwrap();
        assert!(report3.max_lemma_lhs <= tol::BOUND_CHECK);
        assert!(report3.max_operational_excess.is_none());
        // Determinism of the worst index.
        let again = soundness_sweep(3, 25, 13, false).unwrap();
        assert_eq!(report3.worst_index, again.worst_index);
        assert_eq!(report3.max_lemma_lhs, again.max_lemma_lhs);
    }

    #[test]
    fn boundary_rows_shapes() {
        let rows = boundary_rows(2, 64).unwrap();
        let triangle_count = 65;
        let circle_count = rows.len() - triangle_count;
        // A quarter of the 64-point sweep lies in the quadrant at n=2.
        assert!((16..=18).contains(&circle_count), "got {circle_count}");
        for r in rows.iter().take(circle_count) {
            assert!(
                (r.x * r.x + r.y * r.y - 1.0).abs() <= 1e-9,
                "two-path boundary row off the circle"
            );
        }
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.x) && (0.0..=1.0).contains(&r.y));
            // Every boundary row satisfies the trade-off (region = lemma set).
            assert!(r.lemma1_lhs <= 1e-8, "row violates the trade-off");
        }
        // On the upper elliptical arc (where the pre-squaring sign condition
        // x ≥ (n−2)(1−y)/n holds) the trade-off is tight.
        let rows9 = boundary_rows(9, 128).unwrap();
        let tri9 = 129;
        for r in rows9.iter().take(rows9.len() - tri9) {
            assert!((r.ellipse_form - 1.0).abs() <= 1e-10);
            assert!(r.lemma1_lhs <= 1e-8);
            if r.x >= 7.0 * (1.0 - r.y) / 9.0 + 1e-9 {
                assert!(
                    r.lemma1_lhs.abs() <= 1e-8,
                    "upper arc should attain the trade-off: {}",
                    r.lemma1_lhs
                );
            }
        }
    }

    #[test]
    fn area_estimates_decrease_toward_half() {
        // The elliptical sliver above the triangle shrinks like 1/√n.
        let a2 = region_area_estimate(2, 20_000, 3).unwrap();
        let a3 = region_area_estimate(3, 20_000, 3).unwrap();
        let a6 = region_area_estimate(6, 20_000, 3).unwrap();
        let a100 = region_area_estimate(100, 20_000, 3).unwrap();
        let a10000 = region_area_estimate(10_000, 20_000, 3).unwrap();
        assert!((a2 - std::f64::consts::FRAC_PI_4).abs() <= 0.02);
        assert!(a2 > a3 && a3 > a6 && a6 > a100 && a100 > a10000);
        assert!(a10000 >= 0.5 - 0.015 && a10000 <= 0.52);
    }

    #[test]
    fn symmetric_rows_sweep_contract() {
        for n in [2usize, 4, 9] {
            let rows = symmetric_rows(n, 41).unwrap();
            // n=9 has its attainment overlap 5/8 already on the grid; the
            // other cases need the inserted row.
            let expect = if n == 9 { 41 } else { 42 };
            assert_eq!(rows.len(), expect, "n={n} row count");
            let star = optimal_overlap(n).unwrap();
            let nf = n as f64;
            let mut saw_star = false;
            for w in rows.windows(2) {
                assert!(w[0].s <= w[1].s, "rows ordered by overlap");
            }
            for r in &rows {
                assert!((r.x_coh - r.s * (nf - 1.0) / nf).abs() <= 1e-15);
                assert!((r.x - r.s).abs() <= 1e-12);
                assert!(r.lemma1_lhs.abs() <= 1e-8, "attainment family is tight");
                assert!((r.ellipse_form - 1.0).abs() <= 1e-8);
                if r.s == star {
                    saw_star = true;
                    assert!((r.p_d - theorem1_bound(n).unwrap()).abs() <= 1e-9);
                    // Canonical phases make the phase value X + 1/n, so the
                    // fair-coin win probability hits the ceiling exactly.
                    let p_win = 0.5 * r.p_d + 0.5 * (r.x_coh + 1.0 / nf);
                    assert!((p_win - theorem1_bound(n).unwrap()).abs() <= 1e-9);
                }
            }
            assert!(saw_star);
            // n=2 rows trace the unit circle.
            if n == 2 {
                for r in &rows {
                    assert!((r.x * r.x + r.y * r.y - 1.0).abs() <= 1e-10);
                }
            }
        }
        // endpoints
        let rows = symmetric_rows(3, 2).unwrap();
        let first = rows.first().unwrap();
        let last = rows.last().unwrap();
        assert!((first.x, first.y) == (0.0, 1.0) || (first.x - 0.0).abs() <= 1e-12);
        assert!((last.x - 1.0).abs() <= 1e-12 && last.y.abs() <= 1e-12);
        assert!(symmetric_rows(3, 1).is_err());
    }
}
