use crate::error::ConstellationError;

/// `M = 2^m` points in `N` real dimensions with distinct `m`-bit labels.
///
/// Immutable after construction. Points and labels are stored row-major;
/// label bit `j` of point `i` is `labels[i*m + j]`, and the first label
/// component is the least-significant bit of [`label_index`](Self::label_index).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledConstellation {
    points: Vec<f64>, // M×N row-major
    labels: Vec<u8>,  // M×m row-major, entries 0/1
    n_dims: usize,
    bits: usize,
    es: f64, // measured mean squared norm
}

impl LabeledConstellation {
    /// Builds a constellation from row-major point and label storage.
    ///
    /// Validates that the labels enumerate `{0,1}^m` exactly once and that no
    /// two point rows coincide.
    pub fn new(
        n_dims: usize,
        bits: usize,
        points: Vec<f64>,
        labels: Vec<u8>,
    ) -> Result<Self, ConstellationError> {
        let m = 1usize
            .checked_shl(bits as u32)
            .ok_or(ConstellationError::IncompleteLabeling { bits })?;
        if points.len() != m * n_dims {
            return Err(ConstellationError::ShapeMismatch {
                detail: format!(
                    "expected {}x{} point matrix, got {} entries",
                    m,
                    n_dims,
                    points.len()
                ),
            });
        }
        if labels.len() != m * bits {
            return Err(ConstellationError::ShapeMismatch {
                detail: format!(
                    "expected {}x{} label matrix, got {} entries",
                    m,
                    bits,
                    labels.len()
                ),
            });
        }

        // Labels: every m-bit pattern exactly once.
        let mut seen = vec![false; m];
        for i in 0..m {
            let mut v = 0usize;
            for j in 0..bits {
                match labels[i * bits + j] {
                    0 => {}
                    1 => v |= 1 << j,
                    other => {
                        return Err(ConstellationError::InvalidLabelEntry { row: i, value: other })
                    }
                }
            }
            if seen[v] {
                return Err(ConstellationError::IncompleteLabeling { bits });
            }
            seen[v] = true;
        }

        // Points: pairwise distinct (checked on a lexicographic sort).
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            let ra = &points[a * n_dims..(a + 1) * n_dims];
            let rb = &points[b * n_dims..(b + 1) * n_dims];
            ra.iter()
                .zip(rb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for w in order.windows(2) {
            let (a, b) = (w[0], w[1]);
            if points[a * n_dims..(a + 1) * n_dims] == points[b * n_dims..(b + 1) * n_dims] {
                return Err(ConstellationError::DuplicatePoint {
                    a: a.min(b),
                    b: a.max(b),
                });
            }
        }

        let es = points.iter().map(|x| x * x).sum::<f64>() / m as f64;
        Ok(Self {
            points,
            labels,
            n_dims,
            bits,
            es,
        })
    }

    /// Number of points `M`.
    pub fn num_points(&self) -> usize {
        1 << self.bits
    }

    /// Real-dimension count `N`.
    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    /// Bits per symbol `m` (`M = 2^m`).
    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    /// Measured mean squared norm.
    pub fn es(&self) -> f64 {
        self.es
    }

    /// Coordinates of point `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n_dims..(i + 1) * self.n_dims]
    }

    /// Label bits of point `i`.
    pub fn label(&self, i: usize) -> &[u8] {
        &self.labels[i * self.bits..(i + 1) * self.bits]
    }

    /// Label of point `i` as an integer, first label component = LSB.
    pub fn label_index(&self, i: usize) -> usize {
        self.label(i)
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
    }

    /// Flat row-major point storage (`M×N`).
    pub fn points_flat(&self) -> &[f64] {
        &self.points
    }

    /// Flat row-major label storage (`M×m`).
    pub fn labels_flat(&self) -> &[u8] {
        &self.labels
    }

    /// Returns a copy scaled so the mean squared norm equals `es`.
    pub fn normalize(&self, es: f64) -> Result<Self, ConstellationError> {
        if !(self.es > 0.0) || !(es > 0.0) {
            return Err(ConstellationError::Degenerate);
        }
        let scale = (es / self.es).sqrt();
        let points = self.points.iter().map(|x| x * scale).collect();
        Ok(Self {
            points,
            labels: self.labels.clone(),
            n_dims: self.n_dims,
            bits: self.bits,
            es: self.es * scale * scale,
        })
    }

    /// Returns a copy with the same geometry and a replacement label matrix.
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Self, ConstellationError> {
        Self::new(self.n_dims, self.bits, self.points.clone(), labels)
    }

    /// Returns a copy with the same labels and replacement coordinates.
    pub fn with_points(&self, points: Vec<f64>) -> Result<Self, ConstellationError> {
        Self::new(self.n_dims, self.bits, points, self.labels.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bpsk() -> LabeledConstellation {
        LabeledConstellation::new(1, 1, vec![1.0, -1.0], vec![0, 1]).unwrap()
    }

    #[test]
    fn rejects_duplicate_labels() {
        let err = LabeledConstellation::new(1, 1, vec![1.0, -1.0], vec![0, 0]).unwrap_err();
        assert!(matches!(err, ConstellationError::IncompleteLabeling { .. }));
    }

    #[test]
    fn rejects_duplicate_points() {
        let err = LabeledConstellation::new(1, 1, vec![1.0, 1.0], vec![0, 1]).unwrap_err();
        assert!(matches!(err, ConstellationError::DuplicatePoint { a: 0, b: 1 }));
    }

    #[test]
    fn normalize_hits_target_and_round_trips() {
        let c = bpsk().normalize(2.0).unwrap();
        assert!((c.es() - 2.0).abs() < 1e-12);
        let back = c.normalize(1.0).unwrap();
        for i in 0..2 {
            assert!((back.point(i)[0] - bpsk().point(i)[0]).abs() < 1e-12);
        }
        // labels untouched by scaling
        assert_eq!(back.labels_flat(), bpsk().labels_flat());
    }

    #[test]
    fn label_index_uses_first_bit_as_lsb() {
        let c = LabeledConstellation::new(
            1,
            2,
            vec![1.0, 2.0, 3.0, 4.0],
            vec![0, 0, 1, 0, 0, 1, 1, 1],
        )
        .unwrap();
        assert_eq!(c.label_index(0), 0);
        assert_eq!(c.label_index(1), 1); // bits [1,0] -> 1
        assert_eq!(c.label_index(2), 2); // bits [0,1] -> 2
        assert_eq!(c.label_index(3), 3);
    }
}
