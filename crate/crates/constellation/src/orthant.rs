use crate::error::{ConstellationError, NotOrthantSymmetric};
use crate::labeled::LabeledConstellation;

/// Strictly positive seed points with in-orthant labels.
///
/// `2^(m−N)` rows in `N` dimensions plus an `(m−N)`-bit label per row. Seed
/// coordinates must be strictly positive: a point on an orthant boundary
/// would be duplicated by mirroring.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrthantSeed {
    points: Vec<f64>, // rows × N
    labels: Vec<u8>,  // rows × seed_bits
    n_dims: usize,
    seed_bits: usize,
}

impl FirstOrthantSeed {
    /// Builds a seed, validating positivity and label completeness.
    pub fn new(
        n_dims: usize,
        seed_bits: usize,
        points: Vec<f64>,
        labels: Vec<u8>,
    ) -> Result<Self, ConstellationError> {
        let rows = 1usize << seed_bits;
        if points.len() != rows * n_dims {
            return Err(ConstellationError::ShapeMismatch {
                detail: format!(
                    "expected {}x{} seed point matrix, got {} entries",
                    rows,
                    n_dims,
                    points.len()
                ),
            });
        }
        if labels.len() != rows * seed_bits {
            return Err(ConstellationError::ShapeMismatch {
                detail: format!(
                    "expected {}x{} seed label matrix, got {} entries",
                    rows,
                    seed_bits,
                    labels.len()
                ),
            });
        }
        for r in 0..rows {
            for d in 0..n_dims {
                let v = points[r * n_dims + d];
                if !(v > 0.0) {
                    return Err(ConstellationError::NonPositiveSeedCoordinate {
                        row: r,
                        dim: d,
                        value: v,
                    });
                }
            }
        }
        let mut seen = vec![false; rows];
        for r in 0..rows {
            let mut v = 0usize;
            for j in 0..seed_bits {
                match labels[r * seed_bits + j] {
                    0 => {}
                    1 => v |= 1 << j,
                    other => {
                        return Err(ConstellationError::InvalidLabelEntry { row: r, value: other })
                    }
                }
            }
            if seen[v] {
                return Err(ConstellationError::IncompleteLabeling { bits: seed_bits });
            }
            seen[v] = true;
        }
        Ok(Self {
            points,
            labels,
            n_dims,
            seed_bits,
        })
    }

    pub fn num_rows(&self) -> usize {
        1 << self.seed_bits
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    /// In-orthant label bits per row (`m − N` of the expanded format).
    pub fn seed_bits(&self) -> usize {
        self.seed_bits
    }

    pub fn point(&self, r: usize) -> &[f64] {
        &self.points[r * self.n_dims..(r + 1) * self.n_dims]
    }

    pub fn label(&self, r: usize) -> &[u8] {
        &self.labels[r * self.seed_bits..(r + 1) * self.seed_bits]
    }

    pub fn points_flat(&self) -> &[f64] {
        &self.points
    }

    /// Returns a copy with row `r`, dim `d` replaced by `value` (must stay positive).
    pub fn with_coordinate(
        &self,
        r: usize,
        d: usize,
        value: f64,
    ) -> Result<Self, ConstellationError> {
        let mut points = self.points.clone();
        points[r * self.n_dims + d] = value;
        Self::new(self.n_dims, self.seed_bits, points, self.labels.clone())
    }
}

/// The `2^N` diagonal ±1 sign matrices, ordered by the natural binary order
/// of their label rows (first label component = least-significant bit).
#[derive(Debug, Clone)]
pub struct MirrorSet {
    signs: Vec<f64>, // 2^N × N diagonal entries
    n_dims: usize,
}

impl MirrorSet {
    pub fn len(&self) -> usize {
        1 << self.n_dims
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Diagonal entries of matrix `k`: entry `j` is `(−1)^{bit j of k}`.
    pub fn diagonal(&self, k: usize) -> &[f64] {
        &self.signs[k * self.n_dims..(k + 1) * self.n_dims]
    }

    /// Label row `l_k` associated with matrix `k`.
    pub fn label_row(&self, k: usize) -> Vec<u8> {
        (0..self.n_dims).map(|j| ((k >> j) & 1) as u8).collect()
    }
}

/// Builds the `2^N` mirror matrices for an `N`-dimensional space.
pub fn mirror_matrices(n_dims: usize) -> Result<MirrorSet, ConstellationError> {
    if n_dims == 0 || n_dims > 16 {
        return Err(ConstellationError::DimensionOutOfRange(n_dims));
    }
    let count = 1usize << n_dims;
    let mut signs = Vec::with_capacity(count * n_dims);
    for k in 0..count {
        for j in 0..n_dims {
            signs.push(if (k >> j) & 1 == 1 { -1.0 } else { 1.0 });
        }
    }
    Ok(MirrorSet { signs, n_dims })
}

/// Mirrors a first-orthant seed into all `2^N` orthants.
///
/// Block `k` holds the seed points with signs flipped per mirror matrix `k`;
/// its labels are the `N` orthant bits (bit `j` = 1 iff coordinate `j` is
/// negative) followed by the seed label row.
pub fn expand_orthant_symmetric(
    seed: &FirstOrthantSeed,
) -> Result<LabeledConstellation, ConstellationError> {
    let n = seed.n_dims();
    let mirrors = mirror_matrices(n)?;
    let rows = seed.num_rows();
    let bits = n + seed.seed_bits();
    let m_total = mirrors.len() * rows;

    let mut points = Vec::with_capacity(m_total * n);
    let mut labels = Vec::with_capacity(m_total * bits);
    for k in 0..mirrors.len() {
        let diag = mirrors.diagonal(k);
        for r in 0..rows {
            let p = seed.point(r);
            for j in 0..n {
                points.push(p[j] * diag[j]);
            }
            for j in 0..n {
                labels.push(((k >> j) & 1) as u8);
            }
            labels.extend_from_slice(seed.label(r));
        }
    }
    LabeledConstellation::new(n, bits, points, labels)
}

/// Recovers the first-orthant seed of an orthant-symmetric constellation.
///
/// The convention checked is the one used by [`expand_orthant_symmetric`]:
/// the first `N` label bits encode coordinate signs (1 = negative) and every
/// point is an exact mirror image of a first-orthant mate with the same
/// trailing label bits. On failure the first violated condition is reported.
pub fn extract_first_orthant(
    c: &LabeledConstellation,
) -> Result<FirstOrthantSeed, NotOrthantSymmetric> {
    let n = c.n_dims();
    let m = c.bits_per_symbol();
    if m < n {
        return Err(NotOrthantSymmetric {
            reason: format!("{} label bits cannot cover {} sign dimensions", m, n),
        });
    }
    let seed_bits = m - n;
    let seed_rows = c.num_points() >> n;

    // Sign bits must match coordinate signs everywhere.
    for i in 0..c.num_points() {
        let p = c.point(i);
        let l = c.label(i);
        for j in 0..n {
            if p[j] == 0.0 {
                return Err(NotOrthantSymmetric {
                    reason: format!("point {} has a zero coordinate in dim {}", i, j),
                });
            }
            let want = u8::from(p[j] < 0.0);
            if l[j] != want {
                return Err(NotOrthantSymmetric {
                    reason: format!(
                        "label bit {} of point {} does not encode the sign of coordinate {}",
                        j, i, j
                    ),
                });
            }
        }
    }

    // Collect the first-orthant rows, keyed by their trailing label bits.
    let mut seed_of_suffix: Vec<Option<usize>> = vec![None; seed_rows];
    for i in 0..c.num_points() {
        if c.point(i).iter().all(|&x| x > 0.0) {
            let suffix = c.label_index(i) >> n;
            if suffix >= seed_rows || seed_of_suffix[suffix].is_some() {
                return Err(NotOrthantSymmetric {
                    reason: format!("duplicate first-orthant label suffix {:#b}", suffix),
                });
            }
            seed_of_suffix[suffix] = Some(i);
        }
    }
    let mut seed_points = Vec::with_capacity(seed_rows * n);
    let mut seed_labels = Vec::with_capacity(seed_rows * seed_bits);
    for (suffix, slot) in seed_of_suffix.iter().enumerate() {
        let Some(i) = slot else {
            return Err(NotOrthantSymmetric {
                reason: format!("no first-orthant point carries label suffix {:#b}", suffix),
            });
        };
        seed_points.extend_from_slice(c.point(*i));
        for j in 0..seed_bits {
            seed_labels.push(((suffix >> j) & 1) as u8);
        }
    }

    // Every point must be an exact mirror of its first-orthant mate.
    for i in 0..c.num_points() {
        let suffix = c.label_index(i) >> n;
        let mate = &seed_points[suffix * n..(suffix + 1) * n];
        let p = c.point(i);
        for j in 0..n {
            if p[j].abs() != mate[j] {
                return Err(NotOrthantSymmetric {
                    reason: format!(
                        "point {} is not a mirror image of its first-orthant mate",
                        i
                    ),
                });
            }
        }
    }

    FirstOrthantSeed::new(n, seed_bits, seed_points, seed_labels).map_err(|e| {
        NotOrthantSymmetric {
            reason: format!("first-orthant rows do not form a valid seed: {}", e),
        }
    })
}

/// Builds a seed from the all-positive-orthant points of any constellation.
///
/// Unlike [`extract_first_orthant`] this does not require mirror symmetry —
/// only that exactly `2^(m−N)` points lie strictly inside the positive
/// orthant with distinct trailing label bits. For genuinely orthant-symmetric
/// inputs it coincides with strict extraction; for formats that merely have a
/// full positive orthant (e.g. the set-partitioned 16QAM subset) it provides
/// an optimizer starting point.
pub fn seed_from_positive_orthant(
    c: &LabeledConstellation,
) -> Result<FirstOrthantSeed, NotOrthantSymmetric> {
    let n = c.n_dims();
    let m = c.bits_per_symbol();
    if m < n {
        return Err(NotOrthantSymmetric {
            reason: format!("{} label bits cannot cover {} sign dimensions", m, n),
        });
    }
    let seed_bits = m - n;
    let seed_rows = c.num_points() >> n;

    let mut seed_of_suffix: Vec<Option<usize>> = vec![None; seed_rows];
    let mut found = 0usize;
    for i in 0..c.num_points() {
        if c.point(i).iter().all(|&x| x > 0.0) {
            found += 1;
            let suffix = c.label_index(i) >> n;
            if seed_of_suffix[suffix].is_some() {
                return Err(NotOrthantSymmetric {
                    reason: format!(
                        "two positive-orthant points share label suffix {:#b}",
                        suffix
                    ),
                });
            }
            seed_of_suffix[suffix] = Some(i);
        }
    }
    if found != seed_rows {
        return Err(NotOrthantSymmetric {
            reason: format!(
                "positive orthant holds {} points, expected {}",
                found, seed_rows
            ),
        });
    }
    let mut seed_points = Vec::with_capacity(seed_rows * n);
    let mut seed_labels = Vec::with_capacity(seed_rows * seed_bits);
    for (suffix, slot) in seed_of_suffix.iter().enumerate() {
        seed_points.extend_from_slice(c.point(slot.unwrap()));
        for j in 0..seed_bits {
            seed_labels.push(((suffix >> j) & 1) as u8);
        }
    }
    FirstOrthantSeed::new(n, seed_bits, seed_points, seed_labels).map_err(|e| {
        NotOrthantSymmetric {
            reason: format!("positive-orthant rows do not form a valid seed: {}", e),
        }
    })
}
