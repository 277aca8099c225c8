//! Batch-GMI coordinate ascent: orthant-seed search and free-point search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use shape4d_constellation::{
    expand_orthant_symmetric, extract_first_orthant, ConstellationError, FirstOrthantSeed,
    LabeledConstellation,
};
use shape4d_gmi::{gmi_on_batch, AwgnSpec, EvalBatch};

use crate::config::{
    pass_seed, require_uniform, ClampEvent, OptimizationTrace, OptimizerConfig, OptimizerError,
    TraceRow,
};

/// Batch index reserved for the final keep-or-revert comparison.
const FINAL_CHECK_PASS: u64 = u64::MAX;

/// After the step schedule converges, restart it this many times at half
/// the previous starting size (hopping to nearby basins) before stopping.
const STEP_RESTARTS: usize = 2;

/// Cap on consecutive pattern-extrapolation accepts per pass.
const MAX_EXTRAPOLATIONS: usize = 3;

fn expand_normalized(
    seed: &FirstOrthantSeed,
    es: f64,
) -> Result<LabeledConstellation, ConstellationError> {
    expand_orthant_symmetric(seed).and_then(|c| c.normalize(es))
}

/// Returns a copy of `seed` with every point coordinate replaced.
fn seed_with_points(
    seed: &FirstOrthantSeed,
    points: Vec<f64>,
) -> Result<FirstOrthantSeed, ConstellationError> {
    let sb = seed.seed_bits();
    let mut labels = Vec::with_capacity(seed.num_rows() * sb);
    for r in 0..seed.num_rows() {
        labels.extend_from_slice(seed.label(r));
    }
    FirstOrthantSeed::new(seed.n_dims(), sb, points, labels)
}

/// Returns a copy of `seed` with the label rows of `a` and `b` exchanged.
fn swap_label_rows(
    seed: &FirstOrthantSeed,
    a: usize,
    b: usize,
) -> Result<FirstOrthantSeed, ConstellationError> {
    let sb = seed.seed_bits();
    let rows = seed.num_rows();
    let mut labels = Vec::with_capacity(rows * sb);
    for r in 0..rows {
        labels.extend_from_slice(seed.label(r));
    }
    for j in 0..sb {
        labels.swap(a * sb + j, b * sb + j);
    }
    FirstOrthantSeed::new(seed.n_dims(), sb, seed.points_flat().to_vec(), labels)
}

/// Coordinate ascent over first-orthant seed coordinates with nested label
/// swaps, holding every candidate at the configured mean symbol energy.
///
/// Each pass draws a fresh evaluation batch and re-anchors the incumbent on
/// it, sweeps every (row, dim) with ±step proposals (first improvement
/// wins), sweeps coupled ±step moves on every in-row coordinate pair (the
/// diagonal directions single-axis steps cannot take without an uphill
/// intermediate), tries swapping each pair of seed label rows, and finally
/// extrapolates the whole pass displacement while that keeps helping. Seed
/// coordinates stay strictly positive via a small floor; an accepted
/// floor-limited move is recorded as a clamp event. When a pass accepts
/// nothing or the step falls below `convergence_tol`, the step restarts at
/// half its previous starting size a couple of times before the search ends;
/// the result is kept only if it beats the starting point on one more unseen
/// batch.
pub fn optimize_os(
    seed: &FirstOrthantSeed,
    spec: &AwgnSpec,
    config: &OptimizerConfig,
) -> Result<(FirstOrthantSeed, OptimizationTrace), OptimizerError> {
    config.validate()?;
    require_uniform(spec)?;

    let es = config.power_constraint_es;
    let n_dims = seed.n_dims();
    let rows = seed.num_rows();
    let floor = 1e-4 * (es / n_dims as f64).sqrt();
    let sigma2 = spec.noise_variance_per_real_dim;

    let mut cur_seed = seed.clone();
    let mut cur_c = expand_normalized(&cur_seed, es)?;
    let m = cur_c.num_points();
    if spec.input_distribution.len() != m {
        return Err(OptimizerError::InvalidConfig(format!(
            "channel spec carries {} symbol priors for {} points",
            spec.input_distribution.len(),
            m
        )));
    }

    let mut step = config.initial_step;
    let mut trace = OptimizationTrace::default();

    let batch0 = EvalBatch::generate(
        m,
        n_dims,
        sigma2,
        config.mc_samples_per_eval,
        pass_seed(config.rng_seed, 0),
    );
    let (mut cur_g, mut cur_se) = gmi_on_batch(&cur_c, &batch0)?;
    trace.rows.push(TraceRow {
        iter: 0,
        gmi: cur_g,
        stderr: cur_se,
        step,
        accepted: 0,
    });

    let mut restarts_left = STEP_RESTARTS;
    let mut restart_step = config.initial_step;
    for pass in 1..=config.max_iterations {
        let batch = EvalBatch::generate(
            m,
            n_dims,
            sigma2,
            config.mc_samples_per_eval,
            pass_seed(config.rng_seed, pass as u64),
        );
        let (g, se) = gmi_on_batch(&cur_c, &batch)?;
        cur_g = g;
        cur_se = se;
        let anchor = cur_seed.points_flat().to_vec();

        let mut accepted = 0usize;
        for row in 0..rows {
            for dim in 0..n_dims {
                for dir in [1.0f64, -1.0] {
                    let old = cur_seed.point(row)[dim];
                    let raw = old + dir * step;
                    let clamped = raw.max(floor);
                    if clamped == old {
                        continue;
                    }
                    let cand_seed = match cur_seed.with_coordinate(row, dim, clamped) {
                        Ok(s) => s,
                        Err(_) => continue,
                    };
                    let cand_c = match expand_normalized(&cand_seed, es) {
                        Ok(c) => c,
                        Err(_) => continue,
                    };
                    let (g, se) = gmi_on_batch(&cand_c, &batch)?;
                    if g > cur_g {
                        cur_seed = cand_seed;
                        cur_c = cand_c;
                        cur_g = g;
                        cur_se = se;
                        accepted += 1;
                        if clamped != raw {
                            trace.clamp_events.push(ClampEvent { pass, row, dim });
                        }
                        break;
                    }
                }
            }
        }

        for row in 0..rows {
            for da in 0..n_dims {
                for db in (da + 1)..n_dims {
                    for (sa, sb) in [(1.0f64, 1.0f64), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
                        let pa = cur_seed.point(row)[da];
                        let pb = cur_seed.point(row)[db];
                        let ra = pa + sa * step;
                        let rb = pb + sb * step;
                        let ca = ra.max(floor);
                        let cb = rb.max(floor);
                        if ca == pa && cb == pb {
                            continue;
                        }
                        let cand_seed = match cur_seed
                            .with_coordinate(row, da, ca)
                            .and_then(|s| s.with_coordinate(row, db, cb))
                        {
                            Ok(s) => s,
                            Err(_) => continue,
                        };
                        let cand_c = match expand_normalized(&cand_seed, es) {
                            Ok(c) => c,
                            Err(_) => continue,
                        };
                        let (g, se) = gmi_on_batch(&cand_c, &batch)?;
                        if g > cur_g {
                            cur_seed = cand_seed;
                            cur_c = cand_c;
                            cur_g = g;
                            cur_se = se;
                            accepted += 1;
                            if ca != ra {
                                trace.clamp_events.push(ClampEvent { pass, row, dim: da });
                            }
                            if cb != rb {
                                trace.clamp_events.push(ClampEvent { pass, row, dim: db });
                            }
                            break;
                        }
                    }
                }
            }
        }

        for a in 0..rows {
            for b in (a + 1)..rows {
                let cand_seed = match swap_label_rows(&cur_seed, a, b) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                let cand_c = match expand_normalized(&cand_seed, es) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                let (g, se) = gmi_on_batch(&cand_c, &batch)?;
                if g > cur_g {
                    cur_seed = cand_seed;
                    cur_c = cand_c;
                    cur_g = g;
                    cur_se = se;
                    accepted += 1;
                }
            }
        }

        // Pattern move: retrace this pass's net displacement from its anchor
        // in one jump, repeating while the jump still pays.
        for _ in 0..MAX_EXTRAPOLATIONS {
            if accepted == 0 {
                break;
            }
            let cur_pts = cur_seed.points_flat();
            let cand_pts: Vec<f64> = cur_pts
                .iter()
                .zip(anchor.iter())
                .map(|(c, a)| (2.0 * c - a).max(floor))
                .collect();
            if cand_pts == cur_pts {
                break;
            }
            let cand_seed = match seed_with_points(&cur_seed, cand_pts) {
                Ok(s) => s,
                Err(_) => break,
            };
            let cand_c = match expand_normalized(&cand_seed, es) {
                Ok(c) => c,
                Err(_) => break,
            };
            let (g, se) = gmi_on_batch(&cand_c, &batch)?;
            if g <= cur_g {
                break;
            }
            cur_seed = cand_seed;
            cur_c = cand_c;
            cur_g = g;
            cur_se = se;
            accepted += 1;
        }

        trace.rows.push(TraceRow {
            iter: pass,
            gmi: cur_g,
            stderr: cur_se,
            step,
            accepted,
        });
        step *= config.step_decay;
        if accepted == 0 || step < config.convergence_tol {
            if restarts_left == 0 {
                break;
            }
            restarts_left -= 1;
            restart_step *= 0.5;
            step = restart_step;
        }
    }

    // Keep the search result only if it beats the start on unseen noise.
    let final_batch = EvalBatch::generate(
        m,
        n_dims,
        sigma2,
        config.mc_samples_per_eval,
        pass_seed(config.rng_seed, FINAL_CHECK_PASS),
    );
    let init_c = expand_normalized(seed, es)?;
    let (g_init, _) = gmi_on_batch(&init_c, &final_batch)?;
    let (g_fin, _) = gmi_on_batch(&cur_c, &final_batch)?;
    let keep = if g_fin > g_init { &cur_c } else { &init_c };
    let out = extract_first_orthant(keep)?;
    Ok((out, trace))
}

/// Stochastic full-matrix ascent on free point coordinates at fixed energy.
///
/// Every proposal perturbs all M·N coordinates with Gaussian steps and
/// renormalizes to the power constraint; it is accepted only when it beats
/// the incumbent on the current frozen batch. The batch is replaced (and the
/// incumbent re-anchored) every 50 proposals so accepted moves must
/// generalize. A final comparison against the starting point on one more
/// fresh batch guarantees the result is never worse than the input.
pub fn optimize_unconstrained(
    c_init: &LabeledConstellation,
    spec: &AwgnSpec,
    config: &OptimizerConfig,
) -> Result<(LabeledConstellation, OptimizationTrace), OptimizerError> {
    config.validate()?;
    require_uniform(spec)?;
    if spec.input_distribution.len() != c_init.num_points() {
        return Err(OptimizerError::InvalidConfig(format!(
            "channel spec carries {} symbol priors for {} points",
            spec.input_distribution.len(),
            c_init.num_points()
        )));
    }

    let es = config.power_constraint_es;
    let init = c_init.normalize(es)?;
    let m = init.num_points();
    let nd = init.n_dims();
    let sigma2 = spec.noise_variance_per_real_dim;

    // Proposal draws live on their own stream, away from batch chunks.
    let mut prng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    prng.set_stream(u64::MAX);

    let mut step = config.initial_step;
    let mut trace = OptimizationTrace::default();

    let mut batch_idx = 0u64;
    let mut batch = EvalBatch::generate(
        m,
        nd,
        sigma2,
        config.mc_samples_per_eval,
        pass_seed(config.rng_seed, batch_idx),
    );
    let mut cur = init.clone();
    let (mut cur_g, mut cur_se) = gmi_on_batch(&cur, &batch)?;
    trace.rows.push(TraceRow {
        iter: 0,
        gmi: cur_g,
        stderr: cur_se,
        step,
        accepted: 0,
    });

    for it in 1..=config.max_iterations {
        let want_idx = ((it - 1) / 50) as u64;
        if want_idx != batch_idx {
            batch_idx = want_idx;
            batch = EvalBatch::generate(
                m,
                nd,
                sigma2,
                config.mc_samples_per_eval,
                pass_seed(config.rng_seed, batch_idx),
            );
            let (g, se) = gmi_on_batch(&cur, &batch)?;
            cur_g = g;
            cur_se = se;
        }

        let mut pts = cur.points_flat().to_vec();
        for v in pts.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut prng);
            *v += step * z;
        }
        let mut accepted = 0usize;
        if let Ok(cand) = cur.with_points(pts).and_then(|c| c.normalize(es)) {
            let (g, se) = gmi_on_batch(&cand, &batch)?;
            if g > cur_g {
                cur = cand;
                cur_g = g;
                cur_se = se;
                accepted = 1;
            }
        }
        trace.rows.push(TraceRow {
            iter: it,
            gmi: cur_g,
            stderr: cur_se,
            step,
            accepted,
        });
        step *= config.step_decay;
        if step < config.convergence_tol {
            break;
        }
    }

    let final_batch = EvalBatch::generate(
        m,
        nd,
        sigma2,
        config.mc_samples_per_eval,
        pass_seed(config.rng_seed, FINAL_CHECK_PASS),
    );
    let (g_init, _) = gmi_on_batch(&init, &final_batch)?;
    let (g_fin, _) = gmi_on_batch(&cur, &final_batch)?;
    let out = if g_fin > g_init { cur } else { init };
    Ok((out, trace))
}
