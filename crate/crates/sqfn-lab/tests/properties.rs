//! Property tests for the quadrature and norm invariants.

use proptest::prelude::*;

use sqfn_lab::grid::{
    distribution_set_measure, lq_norm_weighted, FieldSpec, Grid, GridFunction, RegionSpec,
};
use sqfn_lab::herz::{herz_norm, weak_herz_norm, Annuli, HerzParams, LevelGrid};
use sqfn_lab::weights::Weight;

fn grid() -> Grid {
    Grid::new(1, 8.0, 128).unwrap()
}

fn noise_field(seed: u64, level: u32, amp: f64) -> GridFunction {
    GridFunction::sample(
        &FieldSpec::DyadicNoise {
            seed,
            level,
            amp,
            inner_cut: 0.25,
            outer_cut: 2.0,
        },
        &grid(),
    )
    .unwrap()
}

fn params(alpha: f64, p: f64, q: f64) -> HerzParams {
    HerzParams {
        alpha,
        p,
        q,
        q1: 1.0,
        q2: 1.0,
        w1: Weight::constant(1.0),
        w2: Weight::constant(1.0),
        homogeneous: true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lq_norm_is_homogeneous_and_monotone(
        seed in any::<u64>(),
        level in 3u32..6,
        c in -64.0f64..64.0,
        q in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]),
    ) {
        prop_assume!(c.abs() > 1e-6);
        let f = noise_field(seed, level, 1.0);
        let w = Weight::constant(1.0);
        let base = lq_norm_weighted(&f, q, &w).unwrap();
        let scaled = lq_norm_weighted(&f.scaled(c), q, &w).unwrap();
        let expect = c.abs() * base;
        prop_assert!((scaled - expect).abs() <= 1e-12 * expect.max(1e-300));
        // growing |f| pointwise grows the norm
        let bigger = lq_norm_weighted(&f.scaled(c.abs() + 1.0), q, &w).unwrap();
        prop_assert!(expect <= bigger * (1.0 + 1e-12));
    }

    #[test]
    fn distribution_measure_monotone_and_additive(
        seed in any::<u64>(),
        level in 3u32..6,
        lo in 0.01f64..0.5,
        step in 1.05f64..4.0,
    ) {
        let f = noise_field(seed, level, 1.0);
        let w = Weight::constant(1.0);
        let whole = RegionSpec::WholeDomain;
        let m_lo = distribution_set_measure(&f, lo, &whole, &w).unwrap();
        let m_hi = distribution_set_measure(&f, lo * step, &whole, &w).unwrap();
        prop_assert!(m_hi <= m_lo);
        // additivity over a disjoint split of the domain
        let inner = RegionSpec::Ball { center: [0.0, 0.0], radius: 1.0 };
        let outer = RegionSpec::Annulus { inner: 1.0, outer: 16.0 };
        let a = distribution_set_measure(&f, lo, &inner, &w).unwrap();
        let b = distribution_set_measure(&f, lo, &outer, &w).unwrap();
        prop_assert!((a + b - m_lo).abs() <= 1e-12 * m_lo.max(1e-300));
    }

    #[test]
    fn weak_norm_is_dominated_by_strong(
        seed in any::<u64>(),
        level in 3u32..6,
        amp in 0.1f64..8.0,
        alpha in -0.4f64..0.6,
        p in prop::sample::select(vec![0.5, 1.0, 2.0]),
    ) {
        let f = noise_field(seed, level, amp);
        let hp = params(alpha, p, 2.0);
        let annuli = Annuli::default_window(&grid(), true).unwrap();
        let levels = LevelGrid::for_function(&f);
        let weak = weak_herz_norm(&f, &hp, &annuli, &levels).unwrap();
        let (strong, _) = herz_norm(&f, &hp, &annuli).unwrap();
        prop_assert!(weak.value <= strong * (1.0 + 1e-12),
            "weak {} > strong {strong}", weak.value);
    }

    #[test]
    fn herz_quasi_norm_inequality(
        seed_a in any::<u64>(),
        seed_b in any::<u64>(),
        p in prop::sample::select(vec![0.5, 0.75, 1.0, 2.0]),
        alpha in -0.3f64..0.5,
    ) {
        let g = grid();
        let fa = noise_field(seed_a, 4, 1.0);
        let fb = noise_field(seed_b, 5, 1.0);
        let sum = GridFunction::from_values(
            g,
            fa.values.iter().zip(&fb.values).map(|(a, b)| a + b).collect(),
            "sum",
        ).unwrap();
        let hp = params(alpha, p, 2.0);
        let annuli = Annuli::default_window(&g, true).unwrap();
        let (na, _) = herz_norm(&fa, &hp, &annuli).unwrap();
        let (nb, _) = herz_norm(&fb, &hp, &annuli).unwrap();
        let (ns, _) = herz_norm(&sum, &hp, &annuli).unwrap();
        if p >= 1.0 {
            prop_assert!(ns <= (na + nb) * (1.0 + 1e-10));
        } else {
            prop_assert!(ns.powf(p) <= (na.powf(p) + nb.powf(p)) * (1.0 + 1e-10));
        }
    }

    #[test]
    fn csv_round_trip_is_lossless(seed in any::<u64>(), amp in 0.01f64..100.0) {
        let f = noise_field(seed, 4, amp);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        sqfn_lab::grid::write_csv(&f, &path).unwrap();
        let back = sqfn_lab::grid::read_csv(&path).unwrap();
        prop_assert_eq!(back.values, f.values);
        prop_assert_eq!(back.grid, f.grid);
    }
}
