use crate::error::ConstellationError;
use crate::labeled::LabeledConstellation;
use crate::orthant::{expand_orthant_symmetric, FirstOrthantSeed};

/// Format names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 7] = [
    "4d-os128",
    "128sp-16qam",
    "7b4d-2a8psk",
    "pm-16qam",
    "pm-64qam",
    "pm-qpsk",
    "l4-128",
];

/// Returns a built-in format by name, normalized to `Es = 2`.
pub fn builtin(name: &str) -> Result<LabeledConstellation, ConstellationError> {
    match name {
        "4d-os128" => os128_4d(),
        "128sp-16qam" => sp128_16qam(),
        "7b4d-2a8psk" => builtin_two_a8psk(),
        "pm-16qam" => pm_16qam(),
        "pm-64qam" => pm_64qam(),
        "pm-qpsk" => pm_qpsk(),
        "l4-128" => d4_spherical_subset(128, 3.0),
        other => Err(ConstellationError::UnknownFormat(other.to_string())),
    }
}

/// The five positive coordinate magnitudes of the 4D-OS128 format.
const OS128_T: [f64; 5] = [0.2875, 0.3834, 0.4730, 1.1501, 1.2460];

/// Seed rows of 4D-OS128, one per 3-bit in-orthant label (row index = label
/// value, first label component = LSB). Entries index into [`OS128_T`].
const OS128_SEED_PATTERN: [[usize; 4]; 8] = [
    [3, 3, 2, 2],
    [2, 2, 3, 3],
    [4, 1, 2, 2],
    [2, 2, 1, 4],
    [1, 4, 2, 2],
    [2, 2, 4, 1],
    [2, 2, 0, 0],
    [0, 0, 2, 2],
];

/// 4D-OS128: 128 points, 7 bits, orthant-symmetric, 3 energy levels.
///
/// Coordinates are stored at their published 4-decimal precision and
/// re-normalized to `Es = 2` to remove the residual rounding drift.
pub fn os128_4d() -> Result<LabeledConstellation, ConstellationError> {
    let mut points = Vec::with_capacity(8 * 4);
    let mut labels = Vec::with_capacity(8 * 3);
    for (r, pattern) in OS128_SEED_PATTERN.iter().enumerate() {
        points.extend(pattern.iter().map(|&j| OS128_T[j]));
        for j in 0..3 {
            labels.push(((r >> j) & 1) as u8);
        }
    }
    let seed = FirstOrthantSeed::new(4, 3, points, labels)?;
    expand_orthant_symmetric(&seed)?.normalize(2.0)
}

/// 128SP-16QAM: the even-parity half of PM-16QAM.
///
/// Each PM-16QAM point carries eight bits `[s1..s4, a1..a4]` — per-dimension
/// sign (1 = negative) and amplitude (1 = outer level 3) indicators, which is
/// Gray per dimension. The subset keeps the 128 points of even overall
/// parity; the 7-bit label drops `a4` (implied by parity). Not
/// orthant-symmetric: mirroring one coordinate flips the parity class.
pub fn sp128_16qam() -> Result<LabeledConstellation, ConstellationError> {
    let mut points = Vec::with_capacity(128 * 4);
    let mut labels = Vec::with_capacity(128 * 7);
    for v in 0..128usize {
        let mut parity = 0usize;
        for j in 0..7 {
            parity ^= (v >> j) & 1;
        }
        let a4 = parity; // even overall parity
        for d in 0..4 {
            let sign = if (v >> d) & 1 == 1 { -1.0 } else { 1.0 };
            let amp_bit = if d < 3 { (v >> (4 + d)) & 1 } else { a4 };
            let mag = if amp_bit == 1 { 3.0 } else { 1.0 };
            points.push(sign * mag);
        }
        for j in 0..7 {
            labels.push(((v >> j) & 1) as u8);
        }
    }
    LabeledConstellation::new(4, 7, points, labels)?.normalize(2.0)
}

/// PM-16QAM with the per-dimension Gray labeling (sign bit + amplitude bit).
pub fn pm_16qam() -> Result<LabeledConstellation, ConstellationError> {
    let mut points = Vec::with_capacity(16 * 4);
    let mut labels = Vec::with_capacity(16 * 4);
    for r in 0..16usize {
        for d in 0..4 {
            points.push(if (r >> d) & 1 == 1 { 3.0 } else { 1.0 });
        }
        for j in 0..4 {
            labels.push(((r >> j) & 1) as u8);
        }
    }
    let seed = FirstOrthantSeed::new(4, 4, points, labels)?;
    expand_orthant_symmetric(&seed)?.normalize(2.0)
}

/// Per-dimension reflected Gray code over the amplitudes {1,3,5,7}.
const AMP_GRAY_64: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 1), (1, 0)];

/// PM-64QAM with per-dimension Gray labeling (4 sign bits + 2 bits/dim).
pub fn pm_64qam() -> Result<LabeledConstellation, ConstellationError> {
    let rows = 256usize; // 4 amplitude levels ^ 4 dims
    let mut points = Vec::with_capacity(rows * 4);
    let mut labels = Vec::with_capacity(rows * 8);
    for r in 0..rows {
        let mut row_labels = [0u8; 8];
        for d in 0..4 {
            let b0 = ((r >> (2 * d)) & 1) as u8;
            let b1 = ((r >> (2 * d + 1)) & 1) as u8;
            let amp_idx = AMP_GRAY_64
                .iter()
                .position(|&g| g == (b0, b1))
                .expect("two bits always form a Gray pair");
            points.push((2 * amp_idx + 1) as f64);
            row_labels[2 * d] = b0;
            row_labels[2 * d + 1] = b1;
        }
        labels.extend_from_slice(&row_labels);
    }
    let seed = FirstOrthantSeed::new(4, 8, points, labels)?;
    expand_orthant_symmetric(&seed)?.normalize(2.0)
}

/// PM-QPSK: 16 constant-modulus points, one bit per dimension.
pub fn pm_qpsk() -> Result<LabeledConstellation, ConstellationError> {
    let seed = FirstOrthantSeed::new(4, 0, vec![1.0; 4], vec![])?;
    expand_orthant_symmetric(&seed)?.normalize(2.0)
}

/// Gray walk around the octagon: position `p` carries bits `GRAY8[p]`.
const GRAY8: [usize; 8] = [0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100];

/// 7-bit dual-polarization 2A8PSK with a configurable ring-amplitude ratio.
///
/// Three Gray bits select the 8PSK phase of each polarization; the seventh
/// bit pairs the rings (0 = X inner / Y outer, 1 = swapped) so every point
/// has the same total energy. Radii satisfy `r_in/r_out = ring_ratio` and
/// `r_in² + r_out² = 2`.
pub fn two_a8psk(ring_ratio: f64) -> Result<LabeledConstellation, ConstellationError> {
    if !(ring_ratio > 0.0 && ring_ratio <= 1.0) {
        return Err(ConstellationError::ShapeMismatch {
            detail: format!("ring ratio must be in (0, 1], got {}", ring_ratio),
        });
    }
    let mut pos_of_bits = [0usize; 8];
    for (p, &b) in GRAY8.iter().enumerate() {
        pos_of_bits[b] = p;
    }
    let r_out = (2.0 / (1.0 + ring_ratio * ring_ratio)).sqrt();
    let r_in = ring_ratio * r_out;

    let mut points = Vec::with_capacity(128 * 4);
    let mut labels = Vec::with_capacity(128 * 7);
    for v in 0..128usize {
        let px = pos_of_bits[v & 7];
        let py = pos_of_bits[(v >> 3) & 7];
        let (rx, ry) = if (v >> 6) & 1 == 0 {
            (r_in, r_out)
        } else {
            (r_out, r_in)
        };
        let phx = 2.0 * std::f64::consts::PI * px as f64 / 8.0;
        let phy = 2.0 * std::f64::consts::PI * py as f64 / 8.0;
        points.extend_from_slice(&[
            rx * phx.cos(),
            rx * phx.sin(),
            ry * phy.cos(),
            ry * phy.sin(),
        ]);
        for j in 0..7 {
            labels.push(((v >> j) & 1) as u8);
        }
    }
    LabeledConstellation::new(4, 7, points, labels)?.normalize(2.0)
}

/// Ring ratio for the shipped 7b4d-2a8psk, chosen so the 64 ring-swap pairs
/// set the minimum distance (d² ≈ 0.229) exactly as the format is specified
/// structurally; self-checked below before shipping.
const A8PSK_RING_RATIO: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn builtin_two_a8psk() -> Result<LabeledConstellation, ConstellationError> {
    let c = two_a8psk(A8PSK_RING_RATIO)?;
    // Structural self-check: constant modulus, d² within 0.23 ± 0.01, 64
    // minimum-distance pairs. A mismatch means the construction drifted.
    let es = c.es();
    for i in 0..c.num_points() {
        let e: f64 = c.point(i).iter().map(|x| x * x).sum();
        if (e - es).abs() > 1e-9 * es {
            return Err(ConstellationError::ConstructionMismatch {
                format: "7b4d-2a8psk",
                detail: format!("point {} energy {} deviates from constant modulus", i, e),
            });
        }
    }
    let (msed, count) = min_sed(&c);
    if (msed - 0.23).abs() > 0.01 || count != 64 {
        return Err(ConstellationError::ConstructionMismatch {
            format: "7b4d-2a8psk",
            detail: format!("minimum SED {} with {} pairs, expected ≈0.23 with 64", msed, count),
        });
    }
    Ok(c)
}

fn min_sed(c: &LabeledConstellation) -> (f64, usize) {
    let mut msed = f64::INFINITY;
    let mut count = 0usize;
    let n = c.n_dims();
    for i in 0..c.num_points() {
        for j in (i + 1)..c.num_points() {
            let d2: f64 = (0..n)
                .map(|k| {
                    let d = c.point(i)[k] - c.point(j)[k];
                    d * d
                })
                .sum();
            if d2 < msed - 1e-9 {
                msed = d2;
                count = 1;
            } else if (d2 - msed).abs() <= 1e-9 {
                count += 1;
            }
        }
    }
    (msed, count)
}

/// 2D Gray-labeled 16QAM built from its first-quadrant seed.
pub fn gray_16qam_2d() -> Result<LabeledConstellation, ConstellationError> {
    let seed = FirstOrthantSeed::new(
        2,
        2,
        vec![3.0, 3.0, 1.0, 3.0, 1.0, 1.0, 3.0, 1.0],
        vec![0, 0, 0, 1, 1, 1, 1, 0],
    )?;
    expand_orthant_symmetric(&seed)?.normalize(2.0)
}

/// Candidate centroids tried by the D4 subset search: the lattice origin and
/// the two deep-hole classes of D4.
const D4_CENTROIDS: [[f64; 4]; 3] = [
    [0.0, 0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.5, 0.5, 0.5, 0.5],
];

/// Selects the `m_points` lowest-energy D4 lattice points around the best
/// candidate centroid. Returns the integer points (selection order) and the
/// centroid that won. Ties in energy break lexicographically on the integer
/// coordinates; centroid candidates tie-break in declaration order.
pub fn d4_select(
    m_points: usize,
    search_radius: f64,
) -> Result<(Vec<[i64; 4]>, [f64; 4]), ConstellationError> {
    let r2 = search_radius * search_radius;
    let mut best: Option<(f64, Vec<[i64; 4]>, [f64; 4])> = None;
    let mut max_available = 0usize;

    for centroid in D4_CENTROIDS {
        let mut candidates: Vec<([i64; 4], f64)> = Vec::new();
        let lo = |c: f64| (c - search_radius).floor() as i64 - 1;
        let hi = |c: f64| (c + search_radius).ceil() as i64 + 1;
        for x0 in lo(centroid[0])..=hi(centroid[0]) {
            for x1 in lo(centroid[1])..=hi(centroid[1]) {
                for x2 in lo(centroid[2])..=hi(centroid[2]) {
                    for x3 in lo(centroid[3])..=hi(centroid[3]) {
                        if (x0 + x1 + x2 + x3) % 2 != 0 {
                            continue; // D4: even coordinate sum
                        }
                        let v = [x0, x1, x2, x3];
                        let d2: f64 = v
                            .iter()
                            .zip(&centroid)
                            .map(|(&x, &c)| (x as f64 - c) * (x as f64 - c))
                            .sum();
                        if d2 <= r2 + 1e-12 {
                            candidates.push((v, d2));
                        }
                    }
                }
            }
        }
        max_available = max_available.max(candidates.len());
        if candidates.len() < m_points {
            continue;
        }
        candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        candidates.truncate(m_points);
        let total: f64 = candidates.iter().map(|c| c.1).sum();
        let selected: Vec<[i64; 4]> = candidates.into_iter().map(|c| c.0).collect();
        match &best {
            Some((t, _, _)) if *t <= total => {}
            _ => best = Some((total, selected, centroid)),
        }
    }

    match best {
        Some((_, selected, centroid)) => Ok((selected, centroid)),
        None => Err(ConstellationError::InsufficientLatticePoints {
            requested: m_points,
            available: max_available,
        }),
    }
}

/// Spherical D4-lattice subset: `m_points` lowest-energy lattice points,
/// re-centered on their own mean and normalized to `Es = 2`, labeled in
/// natural order (row index → bits, first label bit = MSB of the index).
/// Labeling refinement is left to the optimizer.
pub fn d4_spherical_subset(
    m_points: usize,
    search_radius: f64,
) -> Result<LabeledConstellation, ConstellationError> {
    if !m_points.is_power_of_two() {
        return Err(ConstellationError::NotPowerOfTwo(m_points));
    }
    let bits = m_points.trailing_zeros() as usize;
    let (selected, _) = d4_select(m_points, search_radius)?;

    let mut mean = [0.0f64; 4];
    for v in &selected {
        for d in 0..4 {
            mean[d] += v[d] as f64;
        }
    }
    for m in &mut mean {
        *m /= m_points as f64;
    }

    let mut points = Vec::with_capacity(m_points * 4);
    let mut labels = Vec::with_capacity(m_points * bits);
    for (i, v) in selected.iter().enumerate() {
        for d in 0..4 {
            points.push(v[d] as f64 - mean[d]);
        }
        for j in 0..bits {
            labels.push(((i >> (bits - 1 - j)) & 1) as u8);
        }
    }
    LabeledConstellation::new(4, bits, points, labels)?.normalize(2.0)
}
