mod common;

use common::{ellp, rel, Oracle};
use fqres::grid::{dyadic_decompose, lp_sum, majorant_sandwich, FULL_DEPTH};
use fqres::restriction::{
    conjectured_exponent, necessary_threshold, restriction_ratio, transfer_identity_check, OmegaContext,
};
use fqres::soperator::{s_apply, s_lp_factor, s_lp_identity, HomogeneousFunction, LineOrbits};
use fqres::varieties::{variety_points, VarietySpec};
use fqres::{fourier_transform, inverse_fourier_transform, make_field, Budget, CaseTag, Exponent, GridFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn cell() -> impl Strategy<Value = (u64, usize)> {
    (prop::sample::select(vec![3u64, 5, 7]), 1usize..=3)
}

fn values(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b)), len)
}

fn grid_and_values() -> impl Strategy<Value = (u64, usize, Vec<Complex64>)> {
    cell().prop_flat_map(|(q, d)| (Just(q), Just(d), values((q as usize).pow(d as u32))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plancherel_and_round_trip((q, d, vals) in grid_and_values()) {
        let g = GridFunction::new(&make_field(q).unwrap(), d, vals).unwrap();
        let hat = fourier_transform(&g);
        let qd = (q as f64).powi(d as i32);
        prop_assert!(rel(lp_sum(hat.values(), 2.0), qd * lp_sum(g.values(), 2.0)) < 1e-10);
        prop_assert!(inverse_fourier_transform(&hat).max_abs_diff(&g) < 1e-10);
        let o = Oracle::new(q);
        let slow = o.dft(g.values(), d);
        let err = slow.iter().zip(hat.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9 * qd);
    }

    #[test]
    fn s_is_linear(
        (q, d, a) in grid_and_values(),
        seed in any::<u64>(),
        c1 in -2.0..2.0f64,
        c2 in -2.0..2.0f64,
    ) {
        let field = make_field(q).unwrap();
        let n = a.len();
        let b: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(((seed >> (i % 60)) & 7) as f64 - 3.5, (i % 5) as f64))
            .collect();
        let ga = GridFunction::new(&field, d, a).unwrap();
        let gb = GridFunction::new(&field, d, b).unwrap();
        let (c1, c2) = (Complex64::new(c1, 0.0), Complex64::new(0.0, c2));
        let lhs = s_apply(&ga.combine(c1, &gb, c2).unwrap()).unwrap();
        let rhs = s_apply(&ga).unwrap().combine(c1, &s_apply(&gb).unwrap(), c2).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn transfer_identity_for_any_r(
        (q, d, vals) in (prop::sample::select(vec![3u64, 5]), 2usize..=3)
            .prop_flat_map(|(q, d)| (Just(q), Just(d), values((q as usize).pow(d as u32)))),
        j_pick in 0usize..16,
        r in 1.0..6.0f64,
    ) {
        let field = make_field(q).unwrap();
        let j = 1 + (j_pick as u64 % (q - 1));
        let g = GridFunction::new(&field, d, vals).unwrap();
        let rep = transfer_identity_check(&g, j, r, &Budget::default()).unwrap();
        prop_assert!(rep.rel_err <= 1e-8, "rel err {}", rep.rel_err);
    }

    #[test]
    fn ratio_monotone_in_p(
        (q, d, vals) in (prop::sample::select(vec![3u64, 5, 7]), 2usize..=3)
            .prop_flat_map(|(q, d)| (Just(q), Just(d), values((q as usize).pow(d as u32)))),
        p1 in 1.0..4.0f64,
        dp in 0.0..3.0f64,
    ) {
        let field = make_field(q).unwrap();
        let g = GridFunction::new(&field, d, vals).unwrap();
        let sphere = variety_points(&VarietySpec::sphere(&field, d, 1).unwrap(), &Budget::default()).unwrap();
        let lo = restriction_ratio(&g, &sphere, p1, 2.0).unwrap();
        let hi = restriction_ratio(&g, &sphere, p1 + dp, 2.0).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn s_lp_constant_for_homogeneous(
        q in prop::sample::select(vec![3u64, 5, 7]),
        d in 2usize..=3,
        p in 1.0..4.0f64,
        seed in any::<u64>(),
    ) {
        let field = make_field(q).unwrap();
        let orbits = LineOrbits::new(&field, d, &Budget::default()).unwrap();
        let lines = (0..orbits.count())
            .map(|i| Complex64::new(((seed.rotate_left(i as u32) & 0xff) as f64) / 128.0 - 1.0, (i % 3) as f64 - 1.0))
            .collect();
        let g = HomogeneousFunction::new(orbits, lines, Complex64::new(0.5, -0.25)).unwrap();
        let rep = s_lp_identity(&g, p).unwrap();
        prop_assert!(rel(rep.lhs, rep.rhs) <= 1e-9);
        prop_assert!(rep.ratio.unwrap() <= 2.0);
        // independent evaluation of the same sums
        let o = Oracle::new(q);
        let grid = g.to_grid();
        let sg = o.s_op(grid.values(), d);
        prop_assert!(rel(ellp(&sg, p), s_lp_factor(q, p) * ellp(grid.values(), p)) <= 1e-9);
        // homogeneity survives a round trip through the grid
        let back = HomogeneousFunction::from_grid(&grid, g.orbits().clone()).unwrap();
        prop_assert_eq!(back.line_values, g.line_values);
    }

    #[test]
    fn omega_below_bound(
        q in prop::sample::select(vec![3u64, 5]),
        d in 2usize..=4,
        j_pick in 0usize..8,
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..200),
    ) {
        let field = make_field(q).unwrap();
        let j = 1 + (j_pick as u64 % (q - 1));
        let spec = VarietySpec::hom(&field, d, j).unwrap();
        let ctx = OmegaContext::new(&spec, &Budget::default()).unwrap();
        let ambient = (q as usize).pow(d as u32 + 1);
        let e: Vec<usize> = picks.iter().map(|i| i.index(ambient)).collect();
        let rep = ctx.bound_check(&e).unwrap();
        prop_assert!(rep.pass, "{} > {}", rep.omega, rep.bound);
        prop_assert_eq!(rep.omega_pairs as f64, rep.omega.round());
    }

    #[test]
    fn dyadic_sandwich(raw in prop::collection::vec(0.0..=1.0f64, 27)) {
        let field = make_field(3).unwrap();
        let f = GridFunction::new(&field, 3, raw.iter().map(|&v| Complex64::new(v, 0.0)).collect()).unwrap();
        let dec = dyadic_decompose(&f, FULL_DEPTH).unwrap();
        prop_assert!(majorant_sandwich(&f, &dec.majorant));
    }

    #[test]
    fn threshold_equals_conjecture(d in 3usize..=60) {
        let two = Exponent::integer(2).unwrap();
        for tag in CaseTag::ALL.into_iter().filter(|t| t.fits(d)) {
            let k = tag.sphere_flat_dim(d);
            prop_assert_eq!(necessary_threshold(d, k, two).unwrap(), conjectured_exponent(d, tag).unwrap());
        }
    }
}
