use flatblock::exactnum::{PlanarVec, QuadElem};
use flatblock::golden::{golden_points, rel_flow};
use flatblock::polygon::{angle_lcm, parse_angles, realize, signed_area2};
use flatblock::surface::{
    build_unfolding, cylinder_decomposition, segments_between, Involution, SurfacePoint,
};
use proptest::prelude::*;

fn frac(n: i64, d: i64) -> QuadElem {
    QuadElem::from_frac(n, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn segments_reverse(a in 1i64..8, b in 1i64..8, c in 1i64..8, d in 1i64..8, l in 1i64..4) {
        let sq = vec![
            PlanarVec::from_ints(0, 0),
            PlanarVec::from_ints(1, 0),
            PlanarVec::from_ints(1, 1),
            PlanarVec::from_ints(0, 1),
        ];
        let torus = flatblock::surface::TranslationSurface::new(vec![sq], vec![((0, 0), (0, 2)), ((0, 1), (0, 3))]).unwrap();
        let p = SurfacePoint::new(0, PlanarVec::new(frac(a, 9), frac(b, 9)));
        let q = SurfacePoint::new(0, PlanarVec::new(frac(c, 9), frac(d, 9)));
        let lmax = QuadElem::from_int(l);
        let fwd = segments_between(&torus, &p, &q, &lmax, &[]).unwrap();
        let back = segments_between(&torus, &q, &p, &lmax, &[]).unwrap();
        prop_assert_eq!(fwd.len(), back.len());
        let mut f: Vec<PlanarVec> = fwd.iter().map(|x| x.holonomy.scale(&QuadElem::from_int(-1))).collect();
        let mut g: Vec<PlanarVec> = back.iter().map(|x| x.holonomy.clone()).collect();
        f.sort_by(|u, v| u.lex_cmp(v));
        g.sort_by(|u, v| u.lex_cmp(v));
        prop_assert_eq!(f, g);
    }

    #[test]
    fn golden_segments_reverse(n in 1i64..5, l in 1i64..3) {
        let state = rel_flow(&frac(n, 6)).unwrap();
        let s = &state.surface;
        let [p, q] = golden_points(&state);
        let lmax = QuadElem::from_int(l);
        let fwd = segments_between(s, &p, &q, &lmax, &[]).unwrap();
        let back = segments_between(s, &q, &p, &lmax, &[]).unwrap();
        prop_assert_eq!(fwd.len(), back.len());
    }

    #[test]
    fn cylinders_tile_the_rel_family(n in -14i64..6) {
        let state = rel_flow(&frac(n, 6)).unwrap();
        let s = &state.surface;
        for dir in [PlanarVec::from_ints(1, 0), PlanarVec::from_ints(0, 1)] {
            let cyls = cylinder_decomposition(s, &dir).unwrap();
            let total = cyls.iter().fold(QuadElem::zero(), |acc, c| &acc + &c.area());
            prop_assert_eq!(total, s.area());
        }
    }

    #[test]
    fn involution_is_an_involution(n in -14i64..6, i in 0usize..6) {
        let state = rel_flow(&frac(n, 6)).unwrap();
        let s = &state.surface;
        let inv = Involution::find(s).unwrap();
        let p = state.tracked_points[i % state.tracked_points.len()].at.clone();
        let twice = inv.apply(s, &inv.apply(s, &p).unwrap()).unwrap();
        prop_assert!(s.same_point(&twice, &p).unwrap());
    }
}

#[test]
fn unfolding_area_is_twice_d_table_areas() {
    for a in [
        "1/8,3/8,1/2",
        "1/4,3/4,1/2,1/2",
        "1/3,1/3,2/3,2/3",
        "1/6,1/6,2/3",
        "1/2,1/2,1/2,3/2,1/2,1/2",
    ] {
        let angles = parse_angles(a).unwrap();
        for scale in ["1", "2", "5/3"] {
            let shape: Vec<QuadElem> = vec![scale.parse().unwrap()];
            let spec = if angles.len() == 3 {
                realize(&angles, Some(&shape)).unwrap()
            } else {
                realize(&angles, None).unwrap()
            };
            assert!(spec.metric.is_none(), "{a}");
            let table = signed_area2(spec.vertices.as_ref().unwrap()) / QuadElem::from_int(2);
            let s = build_unfolding(&spec).unwrap();
            let copies = QuadElem::from_int(2 * angle_lcm(&angles) as i64);
            assert_eq!(s.area(), &copies * &table, "{a} scale {scale}");
        }
    }
}
