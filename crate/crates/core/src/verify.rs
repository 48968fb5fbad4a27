//! Cross-module invariant suites behind the `verify` subcommand: each
//! check re-derives a property from an independent direction (brute-force
//! oracles, closed forms, conserved quantities) at a scale that finishes
//! in seconds, and reports a machine-readable pass/fail record.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discrimination::{
    certificate_residual, fourier_phases_povm, maximize_gram_value, pgm, povm_fixed_point,
    povm_success, symmetric_pd, ways_gram, Ensemble, FIXED_POINT_MAX_ITER,
};
use crate::duality::{
    ellipse_form, optimal_overlap, region_membership, soundness_sweep, symmetric_rows,
    theorem1_bound, DualityPoint, PointSource,
};
use crate::error::{Error, Result};
use crate::game::{cheat_unrestricted, run_combined, CombinedSetup, GameConfig};
use crate::interferometer::{
    canonical_phases, coherence_x, detector_vectors, maximally_coherent, pph_upper, phase_unitary,
    reduced_state, DensityMatrix, DetectorGram,
};
use crate::numerics::{herm_eig, polar_unitary, psd_pinv_sqrt, psd_sqrt, tol, ComplexMatrix};
use crate::sample;

/// Outcome of one invariant check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub const SUITES: [&str; 5] = [
    "numerics",
    "interferometer",
    "discrimination",
    "duality",
    "game",
];

fn check(
    out: &mut Vec<CheckResult>,
    suite: &'static str,
    name: &'static str,
    body: impl FnOnce() -> Result<(bool, String)>,
) {
    let (pass, detail) = match body() {
        Ok((pass, detail)) => (pass, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    out.push(CheckResult {
        suite,
        name,
        pass,
        detail,
    });
}

/// Brute-force two-state minimum-error oracle: for two real pure states
/// with overlap `c` and priors (p0, 1−p0), sweep `angles` projective
/// measurement bases over [0, π) and take the best success rate. For two
/// pure states a projective measurement in their span is optimal, so a
/// dense sweep converges to the true optimum (grid error O(Δθ²)).
pub fn two_state_oracle(overlap: f64, p0: f64, angles: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::OutOfRange {
            name: "overlap",
            value: overlap,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::OutOfRange {
            name: "p0",
            value: p0,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if angles < 2 {
        return Err(Error::OutOfRange {
            name: "angles",
            value: angles as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let delta = 0.5 * overlap.acos();
    let p1 = 1.0 - p0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..angles {
        let theta = std::f64::consts::PI * k as f64 / angles as f64;
        let hit0 = (theta - delta).cos().powi(2);
        let hit1 = (theta + delta).sin().powi(2);
        best = best.max(p0 * hit0 + p1 * hit1);
    }
    Ok(best)
}

/// The two real pure states used by the oracle, as an ensemble.
fn two_state_ensemble(overlap: f64, p0: f64) -> Result<Ensemble> {
    let delta = 0.5 * overlap.acos();
    let c = |x: f64| num_complex::Complex64::new(x, 0.0);
    let psi0 = vec![c(delta.cos()), c(delta.sin())];
    let psi1 = vec![c(delta.cos()), c(-delta.sin())];
    Ensemble::new(
        vec![p0, 1.0 - p0],
        vec![sample::pure_density(&psi0)?, sample::pure_density(&psi1)?],
    )
}

fn suite_numerics(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    check(&mut out, "numerics", "eigendecomposition reconstructs", || {
        let mut worst = 0.0_f64;
        for n in 2..=6 {
            for _ in 0..5 {
                let a = sample::random_hermitian(n, &mut rng);
                let eig = herm_eig(&a)?;
                let back = eig.reconstruct();
                worst = worst.max(a.sub(&back).frob_norm() / tol::hybrid(a.frob_norm()));
            }
        }
        Ok((worst <= 1e-10, format!("max scaled residual {worst:.3e}")))
    });

    check(&mut out, "numerics", "psd square root squares back", || {
        let mut worst = 0.0_f64;
        for n in 2..=5 {
            for _ in 0..4 {
                let a = sample::random_psd(n, &mut rng);
                let q = psd_sqrt(&a)?;
                worst = worst.max(q.mul(&q).sub(&a).frob_norm() / tol::hybrid(a.frob_norm()));
            }
        }
        Ok((worst <= 1e-9, format!("max scaled residual {worst:.3e}")))
    });

    check(
        &mut out,
        "numerics",
        "pseudo-inverse root acts as identity on the support",
        || {
            let mut worst = 0.0_f64;
            for _ in 0..6 {
                // Rank-2 PSD in dimension 4.
                let vs = sample::random_pure_states(4, 2, &mut rng);
                let mut a = ComplexMatrix::zeros(4);
                for v in &vs {
                    a = a.add(sample::pure_density(v)?.matrix());
                }
                let (q, support) = psd_pinv_sqrt(&a)?;
                worst = worst.max(q.mul(&a).mul(&q).sub(&support).frob_norm());
                worst = worst.max(support.mul(&a).sub(&a).frob_norm());
            }
            Ok((worst <= 1e-8, format!("max support residual {worst:.3e}")))
        },
    );

    check(&mut out, "numerics", "polar factor is unitary", || {
        let mut worst = 0.0_f64;
        for n in 2..=5 {
            for _ in 0..4 {
                let a = sample::random_gaussian(n, &mut rng);
                let u = polar_unitary(&a, 1e-12)?;
                let eye = ComplexMatrix::identity(n);
                worst = worst.max(u.adjoint().mul(&u).sub(&eye).frob_norm());
                // The remaining factor U†A must be PSD.
                let h = u.adjoint().mul(&a);
                let min = herm_eig(&h.hermitize())?
                    .eigenvalues
                    .last()
                    .copied()
                    .unwrap_or(0.0);
                if min < -1e-8 * tol::hybrid(a.frob_norm()) {
                    return Ok((false, format!("polar remainder min eigenvalue {min:.3e}")));
                }
            }
        }
        Ok((worst <= 1e-10, format!("max unitarity residual {worst:.3e}")))
    });

    out
}

fn suite_interferometer(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1f);

    check(
        &mut out,
        "interferometer",
        "detector vectors reproduce the overlap matrix",
        || {
            let mut worst = 0.0_f64;
            for n in 2..=5 {
                for _ in 0..4 {
                    let s = sample::random_detector_gram(n, &mut rng);
                    let eta = detector_vectors(&s)?;
                    for j in 0..n {
                        for k in 0..n {
                            let ip: num_complex::Complex64 =
                                eta[j].iter().zip(&eta[k]).map(|(a, b)| a.conj() * b).sum();
                            worst = worst.max((ip - s.entry(j, k)).norm());
                        }
                    }
                }
            }
            Ok((worst <= 1e-10, format!("max overlap residual {worst:.3e}")))
        },
    );

    check(
        &mut out,
        "interferometer",
        "coherence is invariant under phase relabeling",
        || {
            let mut worst = 0.0_f64;
            for _ in 0..10 {
                let n = 2 + (rng.gen::<u64>() % 4) as usize;
                let rho = sample::random_density(n, &mut rng);
                let s = sample::random_detector_gram(n, &mut rng);
                let p = sample::random_phase_set(n, &mut rng);
                let x0 = coherence_x(&rho, &s)?;
                for r in 0..n {
                    let u = phase_unitary(&p, r)?;
                    let conj = u.mul(rho.matrix()).mul(&u.adjoint());
                    let rho_r = DensityMatrix::new(conj)?;
                    worst = worst.max((coherence_x(&rho_r, &s)? - x0).abs());
                }
            }
            Ok((worst <= 1e-12, format!("max coherence drift {worst:.3e}")))
        },
    );

    check(
        &mut out,
        "interferometer",
        "reduced states are consistent and bound the phase value",
        || {
            let mut worst = 0.0_f64;
            for _ in 0..10 {
                let n = 2 + (rng.gen::<u64>() % 3) as usize;
                let rho = sample::random_density(n, &mut rng);
                let s = sample::random_detector_gram(n, &mut rng);
                let p = sample::random_phase_set(n, &mut rng);
                let upper = pph_upper(&rho, &s)?;
                if !(1.0 / n as f64 - 1e-12..=1.0 + 1e-12).contains(&upper) {
                    return Ok((false, format!("phase bound {upper} escapes [1/n, 1]")));
                }
                // Equal-weight mixture of the reduced states has unit trace
                // and diagonal equal to 1/n in the detector-vector frame.
                let mut avg = ComplexMatrix::zeros(n);
                for r in 0..n {
                    avg = avg.add(reduced_state(&rho, &s, &p, r)?.matrix());
                }
                worst = worst.max((avg.trace().re / n as f64 - 1.0).abs());
            }
            Ok((worst <= 1e-10, format!("max mixture trace drift {worst:.3e}")))
        },
    );

    out
}

fn suite_discrimination(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2f);

    check(
        &mut out,
        "discrimination",
        "solvers match the constant-overlap closed form",
        || {
            let mut worst = 0.0_f64;
            for n in 2..=4 {
                for s in [0.2, 0.5, 0.8] {
                    let expect = symmetric_pd(n, s)?;
                    let rho = maximally_coherent(n)?;
                    let gram = DetectorGram::constant_overlap(n, s)?;
                    let e = Ensemble::detector_ensemble(&rho, &gram)?;
                    let (_, pgm_value) = pgm(&e)?;
                    worst = worst.max((pgm_value - expect).abs());
                    let fp = povm_fixed_point(&e, FIXED_POINT_MAX_ITER, tol::FIXED_POINT)?;
                    worst = worst.max((fp.value - expect).abs());
                    let w = ways_gram(&rho, &gram)?;
                    let gf = maximize_gram_value(&w, 6, seed, 1e-8)?;
                    worst = worst.max((gf.value - expect).abs());
                }
            }
            Ok((worst <= 1e-6, format!("max closed-form gap {worst:.3e}")))
        },
    );

    check(
        &mut out,
        "discrimination",
        "fixed point certified optimal on random ensembles",
        || {
            let mut worst = 0.0_f64;
            for _ in 0..8 {
                let states = sample::random_pure_states(3, 3, &mut rng);
                let priors = sample::random_priors(3, &mut rng);
                let densities = states
                    .iter()
                    .map(|v| sample::pure_density(v))
                    .collect::<Result<Vec<_>>>()?;
                let e = Ensemble::new(priors, densities)?;
                let fp = povm_fixed_point(&e, FIXED_POINT_MAX_ITER, tol::FIXED_POINT)?;
                worst = worst.max(certificate_residual(&e, &fp.povm)?);
            }
            Ok((worst <= 1e-8, format!("max certificate residual {worst:.3e}")))
        },
    );

    check(
        &mut out,
        "discrimination",
        "two-state values match the brute-force oracle",
        || {
            let mut worst = 0.0_f64;
            for &c in &[0.3, 0.7] {
                for &p0 in &[0.5, 0.3] {
                    let oracle = two_state_oracle(c, p0, 100_000)?;
                    let e = two_state_ensemble(c, p0)?;
                    let fp = povm_fixed_point(&e, FIXED_POINT_MAX_ITER, tol::FIXED_POINT)?;
                    worst = worst.max((fp.value - oracle).abs());
                    if p0 == 0.5 {
                        let helstrom = 0.5 * (1.0 + (1.0 - c * c).sqrt());
                        worst = worst.max((oracle - helstrom).abs());
                    }
                }
            }
            Ok((worst <= 1e-8, format!("max oracle gap {worst:.3e}")))
        },
    );

    check(
        &mut out,
        "discrimination",
        "phase-aligned measurement attains the coherence bound",
        || {
            let mut worst = 0.0_f64;
            for n in 2..=4 {
                let rho = maximally_coherent(n)?;
                let s = DetectorGram::constant_overlap(n, 0.6)?;
                let e = Ensemble::phases_ensemble(&rho, &s, &canonical_phases(n)?)?;
                let value = povm_success(&e, &fourier_phases_povm(n)?)?;
                worst = worst.max((value - pph_upper(&rho, &s)?).abs());
            }
            Ok((worst <= 1e-12, format!("max bound gap {worst:.3e}")))
        },
    );

    out
}

fn suite_duality(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3f);

    check(
        &mut out,
        "duality",
        "trade-off holds on random configurations",
        || {
            let mut worst_lemma = f64::NEG_INFINITY;
            let mut worst_excess = f64::NEG_INFINITY;
            for n in 2..=4 {
                let report = soundness_sweep(n, 60, seed ^ n as u64, false)?;
                worst_lemma = worst_lemma.max(report.max_lemma_lhs);
                worst_excess = worst_excess.max(report.max_excess);
            }
            Ok((
                worst_lemma <= 1e-8 && worst_excess <= 1e-8,
                format!("max trade-off LHS {worst_lemma:.3e}, max region excess {worst_excess:.3e}"),
            ))
        },
    );

    check(
        &mut out,
        "duality",
        "operational points stay inside the region",
        || {
            let report = soundness_sweep(3, 40, seed ^ 0x77, true)?;
            let excess = report.max_operational_excess.unwrap_or(f64::INFINITY);
            let gap = report.max_operational_x_gap.unwrap_or(f64::INFINITY);
            Ok((
                excess <= 1e-8 && gap <= 1e-8,
                format!("max operational excess {excess:.3e}, max phase-bound gap {gap:.3e}"),
            ))
        },
    );

    check(&mut out, "duality", "attainment family is tight", || {
        let mut worst = 0.0_f64;
        for n in 2..=8 {
            for row in symmetric_rows(n, 25)? {
                worst = worst.max(row.lemma1_lhs.abs());
                worst = worst.max((row.ellipse_form - 1.0).abs());
            }
        }
        Ok((worst <= 1e-8, format!("max boundary residual {worst:.3e}")))
    });

    check(
        &mut out,
        "duality",
        "two-path region is the circle quadrant",
        || {
            let mut worst = 0.0_f64;
            for _ in 0..200 {
                let x: f64 = rng.gen();
                let y: f64 = rng.gen();
                let p = DualityPoint::new(x, y, 2, PointSource::Coherence)?;
                let (_, signed) = region_membership(&p);
                worst = worst.max((signed - (x * x + y * y - 1.0)).abs());
                worst = worst.max((ellipse_form(2, x, y)? - (x * x + y * y)).abs());
            }
            Ok((worst <= 1e-12, format!("max circle-form gap {worst:.3e}")))
        },
    );

    check(&mut out, "duality", "ceiling attained at the optimal overlap", || {
        let mut worst = 0.0_f64;
        let mut prev = f64::INFINITY;
        for n in 2..=12 {
            let bound = theorem1_bound(n)?;
            if bound >= prev || bound <= 0.5 {
                return Ok((false, format!("ceiling not decreasing toward 1/2 at n={n}")));
            }
            prev = bound;
            worst = worst.max((symmetric_pd(n, optimal_overlap(n)?)? - bound).abs());
        }
        Ok((worst <= 1e-9, format!("max attainment gap {worst:.3e}")))
    });

    out
}

fn suite_game(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();

    check(
        &mut out,
        "game",
        "statistics identical across thread pools",
        || {
            let cfg = GameConfig::theorem1(3, 2_000, seed)?;
            let single = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .map_err(|e| Error::Parse {
                    detail: format!("thread pool: {e}"),
                })?
                .install(|| run_combined(&cfg))?;
            let multi = rayon::ThreadPoolBuilder::new()
                .num_threads(4)
                .build()
                .map_err(|e| Error::Parse {
                    detail: format!("thread pool: {e}"),
                })?
                .install(|| run_combined(&cfg))?;
            Ok((
                single == multi,
                format!(
                    "1-thread wins {}/{}, 4-thread wins {}/{}",
                    single.wins_ways + single.wins_phases,
                    single.trials,
                    multi.wins_ways + multi.wins_phases,
                    multi.trials
                ),
            ))
        },
    );

    check(&mut out, "game", "empirical rate within the binomial band", || {
        let cfg = GameConfig::theorem1(2, 50_000, seed ^ 0x9)?;
        let stats = run_combined(&cfg)?;
        Ok((
            stats.consistent(),
            format!(
                "empirical {:.6} vs analytic {:.6} (stderr {:.2e})",
                stats.empirical_pwin, stats.analytic_pwin, stats.stderr
            ),
        ))
    });

    check(
        &mut out,
        "game",
        "attaining configuration plays at the ceiling",
        || {
            let mut worst = 0.0_f64;
            for n in [2usize, 4] {
                let cfg = GameConfig::theorem1(n, 10, 1)?;
                let setup = CombinedSetup::new(&cfg)?;
                let bound = theorem1_bound(n)?;
                worst = worst.max((setup.p_way - bound).abs());
                worst = worst.max((setup.p_ph - bound).abs());
            }
            Ok((worst <= 1e-6, format!("max ceiling gap {worst:.3e}")))
        },
    );

    check(&mut out, "game", "unrestricted cheat wins every round", || {
        let cfg = GameConfig::theorem1(4, 1_000, seed ^ 0x11)?;
        let stats = cheat_unrestricted(&cfg)?;
        let beats = stats.analytic_pwin > theorem1_bound(4)?;
        Ok((
            stats.empirical_pwin == 1.0 && stats.analytic_pwin == 1.0 && beats,
            format!(
                "empirical {}, analytic {} vs ceiling {:.6}",
                stats.empirical_pwin,
                stats.analytic_pwin,
                theorem1_bound(4)?
            ),
        ))
    });

    out
}

/// Run every suite (or one selected by `only`) and collect the results.
pub fn run_all(seed: u64, only: Option<&str>) -> Result<Vec<CheckResult>> {
    if let Some(name) = only {
        if !SUITES.contains(&name) {
            return Err(Error::UnsupportedInput {
                detail: format!("unknown suite {name:?}; expected one of {SUITES:?}"),
            });
        }
    }
    let mut out = Vec::new();
    let wanted = |s: &str| only.is_none() || only == Some(s);
    if wanted("numerics") {
        out.extend(suite_numerics(seed));
    }
    if wanted("interferometer") {
        out.extend(suite_interferometer(seed));
    }
    if wanted("discrimination") {
        out.extend(suite_discrimination(seed));
    }
    if wanted("duality") {
        out.extend(suite_duality(seed));
    }
    if wanted("game") {
        out.extend(suite_game(seed));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_helstrom_closed_form() {
        for &c in &[0.0, 0.2, 0.5, 0.9, 1.0] {
            let oracle = two_state_oracle(c, 0.5, 20_000).unwrap();
            let helstrom = 0.5 * (1.0 + (1.0 - c * c).sqrt());
            assert!(
                (oracle - helstrom).abs() <= 1e-8,
                "c={c}: {oracle} vs {helstrom}"
            );
        }
        // Unequal priors: never worse than guessing the likelier state,
        // never better than certainty.
        let v = two_state_oracle(0.6, 0.8, 20_000).unwrap();
        assert!(v >= 0.8 && v <= 1.0);
        assert!(two_state_oracle(1.2, 0.5, 100).is_err());
        assert!(two_state_oracle(0.5, 0.5, 1).is_err());
    }

    #[test]
    fn numerics_suite_passes() {
        for r in suite_numerics(5) {
            assert!(r.pass, "{}::{}: {}", r.suite, r.name, r.detail);
        }
    }

    #[test]
    fn filter_selects_one_suite() {
        let results = run_all(3, Some("numerics")).unwrap();
        assert!(!results.is_empty());
        assert!(results.iter().all(|r| r.suite == "numerics"));
        assert!(run_all(3, Some("nonsense")).is_err());
    }
}
