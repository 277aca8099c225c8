//! Invariants of the structural metrics under scaling and symmetry.

use proptest::prelude::*;
use shape4d_constellation::{builtin, expand_orthant_symmetric, FirstOrthantSeed};
use shape4d_metrics::{energy_profile, sed_spectrum, DEFAULT_BIN_TOL, DEFAULT_LEVEL_TOL};

fn arb_seed() -> impl Strategy<Value = FirstOrthantSeed> {
    (1usize..=3, 0usize..=2)
        .prop_flat_map(|(n, seed_bits)| {
            let rows = 1usize << seed_bits;
            (
                Just(n),
                Just(seed_bits),
                proptest::collection::vec(0.05f64..3.0, rows * n),
            )
        })
        .prop_filter_map("seed must expand to a valid constellation", |(n, sb, coords)| {
            let labels: Vec<u8> = (0..1usize << sb)
                .flat_map(|r| (0..sb).map(move |j| ((r >> j) & 1) as u8))
                .collect();
            let seed = FirstOrthantSeed::new(n, sb, coords, labels).ok()?;
            expand_orthant_symmetric(&seed).ok().map(|_| seed)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Scaling all coordinates by λ scales every SED bin by λ² and leaves
    /// PAPR, level count, and pair counts unchanged.
    #[test]
    fn scaling_invariance(seed in arb_seed(), lambda in 0.3f64..3.0) {
        let c = expand_orthant_symmetric(&seed).unwrap();
        let scaled = c.normalize(lambda * lambda * c.es()).unwrap();

        let p = energy_profile(&c, DEFAULT_LEVEL_TOL);
        let ps = energy_profile(&scaled, DEFAULT_LEVEL_TOL);
        prop_assert!((p.papr_db - ps.papr_db).abs() < 1e-9);
        prop_assert_eq!(p.levels.len(), ps.levels.len());

        let s = sed_spectrum(&c, DEFAULT_BIN_TOL * c.es() / 2.0);
        let ss = sed_spectrum(&scaled, DEFAULT_BIN_TOL * scaled.es() / 2.0);
        prop_assert_eq!(s.bins.len(), ss.bins.len());
        for (a, b) in s.bins.iter().zip(ss.bins.iter()) {
            prop_assert_eq!(a.total_pairs, b.total_pairs);
            prop_assert_eq!(a.hd1_pairs, b.hd1_pairs);
            prop_assert!((a.sed * lambda * lambda - b.sed).abs() < 1e-9 * (1.0 + b.sed));
        }
    }

    /// Bins partition the full set of unordered pairs.
    #[test]
    fn pair_counts_sum(seed in arb_seed()) {
        let c = expand_orthant_symmetric(&seed).unwrap();
        let m = c.num_points();
        let s = sed_spectrum(&c, DEFAULT_BIN_TOL);
        prop_assert_eq!(s.total_pairs(), m * (m - 1) / 2);
        for b in &s.bins {
            prop_assert!(b.hd1_pairs <= b.total_pairs);
        }
    }

    /// Sign mirroring preserves energy: each seed energy appears 2^N times.
    #[test]
    fn orthant_energy_multiset(seed in arb_seed()) {
        let c = expand_orthant_symmetric(&seed).unwrap();
        let p = energy_profile(&c, DEFAULT_LEVEL_TOL);
        let copies = 1usize << seed.n_dims();
        let mut seed_energies: Vec<f64> = (0..seed.num_rows())
            .map(|r| seed.point(r).iter().map(|x| x * x).sum())
            .collect();
        seed_energies.sort_by(f64::total_cmp);
        let mut expanded = p.symbol_energies.clone();
        expanded.sort_by(f64::total_cmp);
        for (r, &e) in seed_energies.iter().enumerate() {
            for k in 0..copies {
                prop_assert!((expanded[r * copies + k] - e).abs() < 1e-9 * (1.0 + e));
            }
        }
    }
}

#[test]
fn builtin_pair_totals() {
    for name in ["4d-os128", "pm-16qam", "pm-qpsk", "7b4d-2a8psk"] {
        let c = builtin(name).unwrap();
        let m = c.num_points();
        let s = sed_spectrum(&c, DEFAULT_BIN_TOL);
        assert_eq!(s.total_pairs(), m * (m - 1) / 2, "{name}");
    }
}
