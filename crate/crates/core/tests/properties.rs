//! Property tests for the structural invariants: similarity invariance of
//! the determinant, column bookkeeping of the T matrices, grid evaluation,
//! the Liouville identity, and block-partition properties.

use dirac_bvp::linalg::{c64, C64, CMat};
use dirac_bvp::propagator::{char_determinant, fundamental_matrix, StepControl};
use dirac_bvp::sectors::{build_t, compute_fan, is_admissible};
use dirac_bvp::spectrum::group_blocks;
use dirac_bvp::system::{
    canonical_block_order, validate_bvp, BoundaryPair, Interp, PotentialField, WeightMatrix,
};
use dirac_bvp::DiracBVP;
use proptest::prelude::*;

fn small_complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c64(re, im))
}

fn weight_entry() -> impl Strategy<Value = C64> {
    prop_oneof![
        Just(c64(-1.0, 0.0)),
        Just(c64(1.0, 0.0)),
        Just(c64(2.0, 0.0)),
        Just(c64(-0.5, 0.0)),
        Just(c64(0.0, 1.0)),
        Just(c64(1.0, 1.0)),
    ]
}

fn matrix(n: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec(small_complex(), n * n)
        .prop_map(move |data| CMat { rows: n, cols: n, data })
}

fn maximal_pair(n: usize) -> impl Strategy<Value = BoundaryPair> {
    (matrix(n), matrix(n)).prop_filter_map("maximal boundary pair", |(c, d)| {
        let pair = BoundaryPair::new(c, d);
        pair.is_maximal().then_some(pair)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    /// Renumbering to block order never changes the determinant (similarity
    /// under simultaneous permutation plus the sign-compensating row flip).
    #[test]
    fn renumbering_preserves_determinant(
        entries in proptest::collection::vec(weight_entry(), 2..=4),
        q in matrix(4),
        pair in maximal_pair(4),
        lam_re in -4.0f64..4.0,
        lam_im in -2.0f64..2.0,
    ) {
        let n = entries.len();
        let weight = WeightMatrix::new(entries);
        let mut qn = CMat::zeros(n, n);
        let mut cn = CMat::zeros(n, n);
        let mut dn = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                qn[(i, j)] = q[(i, j)];
                cn[(i, j)] = pair.c[(i, j)];
                dn[(i, j)] = pair.d[(i, j)];
            }
        }
        let bvp = DiracBVP::new(weight, PotentialField::constant(qn), BoundaryPair::new(cn, dn));
        prop_assume!(validate_bvp(&bvp).is_valid());
        let (blocked, _) = canonical_block_order(&bvp);
        let ctrl = StepControl::default();
        let lam = c64(lam_re, lam_im);
        let d0 = char_determinant(&bvp, lam, &ctrl).unwrap();
        let d1 = char_determinant(&blocked, lam, &ctrl).unwrap();
        prop_assert!((d0 - d1).norm() <= 1e-10 * (1.0 + d0.norm()), "{d0} vs {d1}");
    }

    /// For real weights, T(z) and T(-z) together use every column of (C D)
    /// exactly once.
    #[test]
    fn antipodal_t_matrices_partition_columns(
        entries in proptest::collection::vec(prop_oneof![Just(-2.0f64), Just(-1.0), Just(1.0), Just(3.0)], 1..=5),
        pair in maximal_pair(5),
        angle in 0.05f64..3.0,
    ) {
        let n = entries.len();
        let weight = WeightMatrix::from_re(&entries);
        let mut cn = CMat::zeros(n, n);
        let mut dn = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                cn[(i, j)] = pair.c[(i, j)];
                dn[(i, j)] = pair.d[(i, j)];
            }
        }
        let z = C64::from_polar(1.0, angle);
        prop_assume!(is_admissible(z, &weight).unwrap_or(false));
        let t_pos = build_t(z, &cn, &dn, &weight).unwrap();
        let t_neg = build_t(-z, &cn, &dn, &weight).unwrap();
        for k in 0..n {
            prop_assert_ne!(t_pos.from_d[k], t_neg.from_d[k]);
        }
    }

    /// Grid potentials reproduce their samples exactly at the sample abscissae.
    #[test]
    fn grid_eval_reproduces_samples(
        samples in proptest::collection::vec(matrix(2), 2..=9),
        step in proptest::bool::ANY,
    ) {
        let interp = if step { Interp::Step } else { Interp::Linear };
        let field = PotentialField::grid(samples.clone(), interp);
        let m = samples.len() - 1;
        for (i, want) in samples.iter().enumerate() {
            let got = field.eval(i as f64 / m as f64);
            prop_assert!(got.sub(want).max_norm() < 1e-14);
        }
    }

    /// det Phi(x) = exp(i tr(B) lambda x - i x tr(B Q)) for constant Q.
    #[test]
    fn liouville_identity(
        entries in proptest::collection::vec(weight_entry(), 1..=3),
        q in matrix(3),
        lam_re in -3.0f64..3.0,
        lam_im in -1.5f64..1.5,
        x in 0.1f64..1.0,
    ) {
        let n = entries.len();
        let weight = WeightMatrix::new(entries);
        let mut qn = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                qn[(i, j)] = q[(i, j)];
            }
        }
        let bvp = DiracBVP::new(
            weight.clone(),
            PotentialField::constant(qn.clone()),
            BoundaryPair::new(CMat::identity(n), CMat::identity(n)),
        );
        let lam = c64(lam_re, lam_im);
        let prop_result = fundamental_matrix(&bvp, lam, &[x], &StepControl::default()).unwrap();
        let det = prop_result.at(x).unwrap().det();
        let trb: C64 = weight.entries().iter().sum();
        let trbq = weight.as_matrix().mul(&qn).trace();
        let want = (c64(0.0, 1.0) * (trb * lam - trbq) * x).exp();
        prop_assert!((det - want).norm() <= 1e-9 * (1.0 + want.norm()), "{det} vs {want}");
    }

    /// Blocks partition the index set, and chained points share a ray window.
    #[test]
    fn riesz_blocks_partition(
        eigs in proptest::collection::vec((-6.0f64..6.0, -0.4f64..0.4).prop_map(|(re, im)| c64(re, im)), 0..12),
        eps in 0.05f64..1.0,
    ) {
        let blocks = group_blocks(&eigs, &[0.0, std::f64::consts::PI], eps);
        let mut seen = vec![false; eigs.len()];
        for block in &blocks.blocks {
            for &i in block {
                prop_assert!(!seen[i], "index {i} in two blocks");
                seen[i] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    /// The sector fan covers the plane: every admissible direction lies in
    /// exactly one sector and the sign pattern there matches.
    #[test]
    fn fan_covers_admissible_directions(
        entries in proptest::collection::vec(weight_entry(), 1..=4),
        angle in 0.0f64..6.28,
    ) {
        let weight = WeightMatrix::new(entries);
        let fan = compute_fan(&weight).unwrap();
        let z = C64::from_polar(1.0, angle);
        let inside: Vec<usize> = fan.sectors.iter().filter(|s| s.contains(z)).map(|s| s.index).collect();
        prop_assert!(inside.len() <= 1, "direction in {} sectors", inside.len());
        if let Some(&idx) = inside.first() {
            let sector = &fan.sectors[idx];
            for (j, &bj) in weight.entries().iter().enumerate() {
                let sign = if (c64(0.0, 1.0) * bj * z).re > 0.0 { 1 } else { -1 };
                prop_assert_eq!(sign, sector.signs[j]);
            }
        }
    }
}
