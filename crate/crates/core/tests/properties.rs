use std::f64::consts::PI;

use proptest::prelude::*;

use dendrite_lab::address::{addresses_of_point, cylinder, MultiIndex, DEFAULT_MAX_DEPTH};
use dendrite_lab::dimension::{dimension_report, moran_dimension};
use dendrite_lab::geometry::{
    classify_intersection, pt, solid_angle_measure, IntersectionClass, Point, Polyhedron, Similarity,
};
use dendrite_lab::io::{parse_system_file, SystemDescription};
use dendrite_lab::tree::build_main_tree;
use dendrite_lab::validator::{refine_system, validate_system, PolyhedralSystem};

const TAU: f64 = 1e-9;

fn rotation2(angle: f64, reflect: bool) -> Vec<Vec<f64>> {
    let (s, c) = angle.sin_cos();
    let f = if reflect { -1.0 } else { 1.0 };
    vec![vec![c, -s * f], vec![s, c * f]]
}

/// Rodrigues rotation about `axis`, optionally composed with x ↦ −x.
fn rotation3(axis: [f64; 3], angle: f64, reflect: bool) -> Vec<Vec<f64>> {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = axis.map(|a| a / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let f = if reflect { -1.0 } else { 1.0 };
    vec![
        vec![f * (t * x * x + c), f * (t * x * y - s * z), f * (t * x * z + s * y)],
        vec![f * (t * x * y + s * z), f * (t * y * y + c), f * (t * y * z - s * x)],
        vec![f * (t * x * z - s * y), f * (t * y * z + s * x), f * (t * z * z + c)],
    ]
}

fn similarity2() -> impl Strategy<Value = Similarity> {
    (0.05..0.95f64, 0.0..2.0 * PI, any::<bool>(), -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(r, a, refl, tx, ty)| Similarity::from_rows(r, &rotation2(a, refl), pt(&[tx, ty])).unwrap())
}

fn similarity3() -> impl Strategy<Value = Similarity> {
    (
        0.05..0.95f64,
        prop::array::uniform3(0.1..1.0f64),
        0.0..2.0 * PI,
        any::<bool>(),
        prop::array::uniform3(-2.0..2.0f64),
    )
        .prop_map(|(r, axis, a, refl, t)| Similarity::from_rows(r, &rotation3(axis, a, refl), pt(&t)).unwrap())
}

fn point(dim: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-3.0..3.0f64, dim).prop_map(|c| Point::new(c).unwrap())
}

/// Convex polygon inscribed in a circle, with well-separated vertices.
fn convex_polygon() -> impl Strategy<Value = Polyhedron> {
    prop::collection::vec(0.0..2.0 * PI, 3..8)
        .prop_filter_map("vertices too close", |mut a| {
            a.sort_by(f64::total_cmp);
            let gaps_ok = a.windows(2).all(|w| w[1] - w[0] > 0.15) && a[0] + 2.0 * PI - a[a.len() - 1] > 0.15;
            gaps_ok.then_some(a)
        })
        .prop_flat_map(|angles| (Just(angles), 0.5..2.0f64, -1.0..1.0f64, -1.0..1.0f64))
        .prop_map(|(angles, r, cx, cy)| {
            let vs = angles
                .iter()
                .map(|a| pt(&[cx + r * a.cos(), cy + r * a.sin()]))
                .collect();
            Polyhedron::polygon(vs).unwrap()
        })
}

/// Vicsek cross with every map composed with a random symmetry of the square.
fn twisted_vicsek() -> impl Strategy<Value = PolyhedralSystem> {
    prop::collection::vec((0..4usize, any::<bool>()), 5).prop_map(|twists| {
        let r = 1.0 / 3.0;
        let corners = [
            [0.0, 0.0],
            [2.0 / 3.0, 0.0],
            [2.0 / 3.0, 2.0 / 3.0],
            [0.0, 2.0 / 3.0],
            [1.0 / 3.0, 1.0 / 3.0],
        ];
        let maps = twists
            .iter()
            .zip(corners)
            .map(|(&(k, refl), target)| {
                let rows = rotation2(k as f64 * PI / 2.0, refl);
                let image = |x: f64, y: f64| [rows[0][0] * x + rows[0][1] * y, rows[1][0] * x + rows[1][1] * y];
                let corners = [image(0.0, 0.0), image(1.0, 0.0), image(1.0, 1.0), image(0.0, 1.0)];
                let lo = [0, 1].map(|k| corners.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min));
                let t = pt(&[target[0] - r * lo[0], target[1] - r * lo[1]]);
                Similarity::from_rows(r, &rows, t).unwrap()
            })
            .collect();
        PolyhedralSystem::new(Polyhedron::unit_square(), maps).unwrap()
    })
}

/// Interval system with each half optionally reversed.
fn twisted_interval() -> impl Strategy<Value = PolyhedralSystem> {
    (any::<bool>(), any::<bool>()).prop_map(|(a, b)| {
        let half = |flip: bool, left: f64| {
            let (o, t) = if flip { (-1.0, left + 0.5) } else { (1.0, left) };
            Similarity::from_rows(0.5, &[vec![o]], pt(&[t])).unwrap()
        };
        PolyhedralSystem::new(
            Polyhedron::interval(0.0, 1.0).unwrap(),
            vec![half(a, 0.0), half(b, 0.5)],
        )
        .unwrap()
    })
}

fn close(a: &Point, b: &Point, tol: f64) -> bool {
    a.dist(b) <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #[test]
    fn distances_scale_by_ratio_2d(s in similarity2(), x in point(2), y in point(2)) {
        let d = s.apply(&x).unwrap().dist(&s.apply(&y).unwrap());
        prop_assert!((d - s.ratio() * x.dist(&y)).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn distances_scale_by_ratio_3d(s in similarity3(), x in point(3), y in point(3)) {
        let d = s.apply(&x).unwrap().dist(&s.apply(&y).unwrap());
        prop_assert!((d - s.ratio() * x.dist(&y)).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn composition_matches_sequential_application(s in similarity3(), t in similarity3(), x in point(3)) {
        let st = s.compose(&t);
        prop_assert!(close(&st.apply(&x).unwrap(), &s.apply(&t.apply(&x).unwrap()).unwrap(), 1e-12));
        prop_assert!((st.ratio() - s.ratio() * t.ratio()).abs() < 1e-15);
    }

    #[test]
    fn intersection_classification_is_symmetric(p in convex_polygon(), s in similarity2(), q in convex_polygon()) {
        let a = s.apply_polyhedron(&p);
        prop_assert_eq!(classify_intersection(&a, &q, TAU), classify_intersection(&q, &a, TAU).swapped());
    }

    #[test]
    fn squares_meeting_at_a_corner_share_it(phi in 0.01..1.5f64, r in 0.1..1.0f64) {
        let unit = Polyhedron::unit_square();
        let s = Similarity::from_rows(r, &rotation2(phi, false), pt(&[1.0, 1.0])).unwrap();
        let other = s.apply_polyhedron(&unit);
        let ab = classify_intersection(&unit, &other, TAU);
        match &ab {
            IntersectionClass::SharedVertex { point, index_in_first, index_in_second } => {
                prop_assert!(close(point, &pt(&[1.0, 1.0]), 1e-12));
                prop_assert_eq!((*index_in_first, *index_in_second), (2, 0));
            }
            other => prop_assert!(false, "expected a shared vertex, got {:?}", other),
        }
        prop_assert_eq!(ab, classify_intersection(&other, &unit, TAU).swapped());
    }

    #[test]
    fn polygon_angles_sum_to_interior_total(p in convex_polygon()) {
        let n = p.vertex_count();
        let sum: f64 = (0..n).map(|k| solid_angle_measure(&p, k).unwrap().measure).sum();
        prop_assert!((sum - (n as f64 - 2.0) * PI).abs() < 1e-9);
    }

    #[test]
    fn vertex_map_recovers_the_similarity(p in convex_polygon(), s in similarity2()) {
        let targets: Vec<Point> = p.vertices().iter().map(|v| s.apply(v).unwrap()).collect();
        let found = Similarity::from_vertex_map(&p, &targets, TAU).unwrap();
        prop_assert!((found.ratio() - s.ratio()).abs() < 1e-9);
        for (v, t) in p.vertices().iter().zip(&targets) {
            prop_assert!(close(&found.apply(v).unwrap(), t, TAU));
        }
    }

    #[test]
    fn moran_residual_is_tiny(ratios in prop::collection::vec(0.02..0.98f64, 2..7)) {
        let s = moran_dimension(&ratios).unwrap();
        let residual: f64 = ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
        prop_assert!(residual.abs() <= 1e-10, "residual {}", residual);
    }

    #[test]
    fn moran_dimension_is_refinement_invariant(ratios in prop::collection::vec(0.05..0.9f64, 2..5)) {
        let squared: Vec<f64> = ratios.iter().flat_map(|a| ratios.iter().map(move |b| a * b)).collect();
        prop_assert!((moran_dimension(&ratios).unwrap() - moran_dimension(&squared).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn descriptions_round_trip(maps in prop::collection::vec(similarity2(), 2..5)) {
        let sys = PolyhedralSystem::new(Polyhedron::unit_square(), maps).unwrap();
        let desc = SystemDescription::from_system("random", &sys);
        prop_assert_eq!(parse_system_file(&desc.to_json()).unwrap(), desc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn twisted_systems_stay_dendrites_under_refinement(sys in prop_oneof![twisted_vicsek(), twisted_interval()]) {
        prop_assert!(validate_system(&sys).is_dendrite());
        prop_assert!(validate_system(&refine_system(&sys, 2).unwrap()).is_dendrite());
    }

    #[test]
    fn twisted_vicsek_skeletons_are_trees(sys in twisted_vicsek()) {
        let tree = build_main_tree(&sys).unwrap();
        for n in 0..=2 {
            let s = tree.skeleton(&sys, n).unwrap();
            prop_assert_eq!(s.edges.len() + 1, s.nodes.len());
            prop_assert!(s.is_tree());
            prop_assert!(s.squeeze_violations(&sys).unwrap().is_empty());
        }
    }

    #[test]
    fn addresses_code_their_point(sys in twisted_vicsek()) {
        let third = 1.0 / 3.0;
        let x = pt(&[third, third]);
        let pa = addresses_of_point(&sys, &x, DEFAULT_MAX_DEPTH).unwrap();
        prop_assert_eq!(pa.count(), 2);
        prop_assert!(pa.angle_budget_holds());
        for a in pa.addresses() {
            let mut previous: Option<Polyhedron> = None;
            for k in 1..=6 {
                let c = cylinder(&sys, &a.prefix(k));
                prop_assert!(c.contains_point(&x, 1e-9));
                if let Some(p) = &previous {
                    prop_assert!(c.diameter() < p.diameter());
                }
                previous = Some(c);
            }
            prop_assert!(a.prefix(1) != MultiIndex::empty());
        }
    }

    #[test]
    fn dimension_sandwich(sys in twisted_vicsek()) {
        let r = dimension_report(&sys, &[1, 2, 3]).unwrap();
        for c in &r.dim_tree_upper {
            prop_assert!(r.max_arc_dim() <= c.dim + 1e-9);
            prop_assert!(c.dim <= r.dim_k + 1e-9);
        }
        prop_assert!(r.jordan_arc || r.gap_certified);
    }
}
