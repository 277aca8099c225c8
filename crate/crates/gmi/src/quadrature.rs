//! Gauss–Hermite quadrature rates for constellations that factor into
//! independent 2D components (the PM-QAM family).

use std::collections::HashMap;

use shape4d_constellation::LabeledConstellation;

use crate::demap::Demapper;
use crate::error::GmiError;
use crate::shaping::entropy_bits;
use crate::types::{AwgnSpec, RateMethod, RateReport};

/// Nodes and weights of the n-point Gauss–Hermite rule (weight e^{−x²}),
/// nodes ascending. ∫f(x)e^{−x²}dx ≈ Σ w_i f(x_i).
pub fn hermgauss(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^(−1/4)
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = (n + 1) / 2;
    let mut z = 0.0f64;
    for i in 0..half {
        // initial guesses for roots, largest first
        z = match i {
            0 => {
                let an = (2 * n + 1) as f64;
                an.sqrt() - 1.85575 * an.powf(-1.0 / 6.0)
            }
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[n - 1],
            3 => 1.91 * z - 0.91 * x[n - 2],
            _ => 2.0 * z - x[n - i + 1],
        };
        // Newton iteration on the orthonormal Hermite recurrence
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2
                    - (((j - 1) as f64) / j as f64).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let z1 = z;
            z -= p1 / pp;
            if (z - z1).abs() <= 1e-14 * (1.0 + z.abs()) {
                break;
            }
        }
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = 2.0 / (pp * pp);
        w[i] = w[n - 1 - i];
    }
    (x, w)
}

struct Factor {
    points: Vec<f64>,   // size × 2
    label_idx: Vec<u32>,
    bits: usize,
    priors: Vec<f64>,
}

/// Splits a constellation with an even number of dimensions into independent
/// 2D factors over consecutive dimension pairs, or reports why it cannot.
fn factorize(
    c: &LabeledConstellation,
    priors: &[f64],
) -> Result<Vec<Factor>, GmiError> {
    let nd = c.n_dims();
    if nd % 2 != 0 {
        return Err(GmiError::NonProduct(format!(
            "odd number of dimensions ({nd})"
        )));
    }
    let n_factors = nd / 2;
    let m = c.num_points();
    let bits = c.bits_per_symbol();

    // distinct 2D projections per factor, and each point's id within them
    let mut factor_points: Vec<Vec<f64>> = vec![Vec::new(); n_factors];
    let mut point_fid: Vec<Vec<usize>> = vec![vec![0; m]; n_factors];
    for f in 0..n_factors {
        let mut ids: HashMap<(u64, u64), usize> = HashMap::new();
        for i in 0..m {
            let p = c.point(i);
            let key = (p[2 * f].to_bits(), p[2 * f + 1].to_bits());
            let next = ids.len();
            let id = *ids.entry(key).or_insert(next);
            if id == next {
                factor_points[f].extend_from_slice(&p[2 * f..2 * f + 2]);
            }
            point_fid[f][i] = id;
        }
    }
    let sizes: Vec<usize> = factor_points.iter().map(|p| p.len() / 2).collect();
    if sizes.iter().product::<usize>() != m {
        return Err(GmiError::NonProduct(format!(
            "projection sizes {sizes:?} do not multiply to {m} points"
        )));
    }

    // each label bit must be a function of exactly one factor's projection
    let mut bit_factor = vec![usize::MAX; bits];
    for k in 0..bits {
        'factors: for f in 0..n_factors {
            let mut table: Vec<Option<u8>> = vec![None; sizes[f]];
            for i in 0..m {
                let b = c.label(i)[k];
                match table[point_fid[f][i]] {
                    None => table[point_fid[f][i]] = Some(b),
                    Some(prev) if prev != b => continue 'factors,
                    _ => {}
                }
            }
            bit_factor[k] = f;
            break;
        }
        if bit_factor[k] == usize::MAX {
            return Err(GmiError::NonProduct(format!(
                "label bit {k} couples the 2D components"
            )));
        }
    }

    // the input distribution must factorize over the projections
    let mut marginals: Vec<Vec<f64>> = sizes.iter().map(|&s| vec![0.0; s]).collect();
    for i in 0..m {
        for f in 0..n_factors {
            marginals[f][point_fid[f][i]] += priors[i];
        }
    }
    for i in 0..m {
        let prod: f64 = (0..n_factors).map(|f| marginals[f][point_fid[f][i]]).product();
        if (prod - priors[i]).abs() > 1e-9 * (priors[i] + 1e-12) {
            return Err(GmiError::NonProduct(
                "input distribution does not factorize over the 2D components".into(),
            ));
        }
    }

    // assemble the factors, remapping each one's bits to positions 0..bits_f
    let mut factors = Vec::with_capacity(n_factors);
    for f in 0..n_factors {
        let my_bits: Vec<usize> = (0..bits).filter(|&k| bit_factor[k] == f).collect();
        if 1usize << my_bits.len() != sizes[f] {
            return Err(GmiError::NonProduct(format!(
                "component {f} has {} points but {} bits",
                sizes[f],
                my_bits.len()
            )));
        }
        let mut label_idx = vec![u32::MAX; sizes[f]];
        for i in 0..m {
            let mut idx = 0u32;
            for (pos, &k) in my_bits.iter().enumerate() {
                idx |= (c.label(i)[k] as u32) << pos;
            }
            let fid = point_fid[f][i];
            if label_idx[fid] == u32::MAX {
                label_idx[fid] = idx;
            } else if label_idx[fid] != idx {
                return Err(GmiError::NonProduct(format!(
                    "component {f} labeling is not a function of its projection"
                )));
            }
        }
        factors.push(Factor {
            points: factor_points[f].clone(),
            label_idx,
            bits: my_bits.len(),
            priors: marginals[f].clone(),
        });
    }
    Ok(factors)
}

/// Deterministic GMI/MI via a Gauss–Hermite product rule applied to each
/// independent 2D component; rates sum across components.
pub fn gmi_quadrature_2d(
    c: &LabeledConstellation,
    spec: &AwgnSpec,
    nodes: usize,
) -> Result<RateReport, GmiError> {
    assert!(nodes >= 2);
    let factors = factorize(c, &spec.input_distribution)?;
    let sigma2 = spec.noise_variance_per_real_dim;
    let scale = std::f64::consts::SQRT_2 * sigma2.sqrt();
    let inv_pi = 1.0 / std::f64::consts::PI;
    let (t, wq) = hermgauss(nodes);

    let mut gmi = 0.0;
    let mut mi = 0.0;
    let mut evals = 0usize;
    for factor in &factors {
        let size = factor.label_idx.len();
        let demap = Demapper::from_parts(
            factor.points.clone(),
            2,
            factor.label_idx.clone(),
            factor.bits,
            &factor.priors,
            sigma2,
        )?;
        let mut a = vec![0.0; size];
        let mut e_g = 0.0;
        let mut e_mi = 0.0;
        for j in 0..size {
            let pj = factor.priors[j];
            if pj == 0.0 {
                continue;
            }
            let x0 = factor.points[2 * j];
            let x1 = factor.points[2 * j + 1];
            for ia in 0..nodes {
                let y0 = x0 + scale * t[ia];
                for ib in 0..nodes {
                    let y = [y0, x1 + scale * t[ib]];
                    demap.scores(&y, &mut a);
                    let (g, ml) = demap.exact_losses(&a, j);
                    let wgt = pj * wq[ia] * wq[ib] * inv_pi;
                    e_g += wgt * g;
                    e_mi += wgt * ml;
                }
            }
            evals += nodes * nodes;
        }
        let h = entropy_bits(&factor.priors);
        gmi += h - e_g;
        mi += h - e_mi;
    }
    Ok(RateReport {
        gmi_bits_per_sym: gmi,
        mi_bits_per_sym: mi,
        stderr: 0.0,
        n_samples: evals,
        method: RateMethod::Quadrature,
    })
}
