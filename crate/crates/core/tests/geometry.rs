mod common;

use proptest::prelude::*;
use rand::Rng;
use wayfind::geometry::{
    build_visibility_graph, closest_point_on_ellipse, grid_path_oracle, point_in_ellipse,
    segment_intersects_walls, shortest_path_to_ellipse, GoalEllipse, Point2, Segment,
};

/// Open-interior blocking test written from scratch: parametric crossing
/// strictly inside both segments, or collinear overlap of positive length.
fn blocks(s: &Segment, w: &Segment) -> bool {
    let (p, r) = (s.a, s.b - s.a);
    let (q, t) = (w.a, w.b - w.a);
    let denom = r.x * t.y - r.y * t.x;
    let qp = q - p;
    if denom.abs() > 1e-12 {
        let u = (qp.x * t.y - qp.y * t.x) / denom;
        let v = (qp.x * r.y - qp.y * r.x) / denom;
        let inside = |x: f64| x > 1e-9 && x < 1.0 - 1e-9;
        return inside(u) && inside(v);
    }
    if (qp.x * r.y - qp.y * r.x).abs() > 1e-12 {
        return false;
    }
    let rr = r.x * r.x + r.y * r.y;
    let t0 = (qp.x * r.x + qp.y * r.y) / rr;
    let t1 = t0 + (t.x * r.x + t.y * r.y) / rr;
    let (lo, hi) = (t0.min(t1).max(0.0), t0.max(t1).min(1.0));
    hi - lo > 1e-9
}

#[test]
fn visibility_edges_match_pairwise_brute_force() {
    let mut rng = common::rng(1);
    for _ in 0..20 {
        let walls = common::random_walls(&mut rng, 20, 20.0);
        let start = Point2::new(rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0));
        let targets: Vec<Point2> = (0..5)
            .map(|_| Point2::new(rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0)))
            .collect();
        let g = build_visibility_graph(start, &targets, &walls);
        assert_eq!(g.nodes().len(), 1 + targets.len() + 2 * walls.len());
        let n = g.nodes().len();
        for i in 0..n {
            for j in (i + 1)..n {
                let s = Segment::new(g.nodes()[i], g.nodes()[j]);
                let expected = !walls.iter().any(|w| blocks(&s, w));
                assert_eq!(g.has_edge(i, j), expected, "pair {i},{j}");
            }
        }
        for (i, j, w) in g.edges() {
            assert!((w - g.nodes()[i].dist(g.nodes()[j])).abs() <= 1e-9);
        }
    }
}

#[test]
fn grid_cross_validation_on_random_scenes() {
    let mut rng = common::rng(2024);
    let mut unobstructed = 0;
    for k in 0..100 {
        let sc = common::random_scene(&mut rng, 20, 2.0);
        let vis = shortest_path_to_ellipse(sc.start, &sc.ellipse, &sc.walls, 64);
        let grid = grid_path_oracle(sc.start, &sc.ellipse, &sc.walls, 0.05);
        match (vis, grid) {
            (Ok((v, _)), Ok(g)) => assert!((v - g).abs() / g <= 0.10, "scene {k}: {v} vs {g}"),
            (Err(_), Err(_)) => {}
            (v, g) => panic!("scene {k}: reachability differs: {v:?} vs {g:?}"),
        }
        let (c, d) = closest_point_on_ellipse(sc.start, &sc.ellipse).unwrap();
        if !segment_intersects_walls(&Segment::new(sc.start, c), &sc.walls) {
            unobstructed += 1;
            let (v, _) = shortest_path_to_ellipse(sc.start, &sc.ellipse, &sc.walls, 64).unwrap();
            assert!((v - d).abs() <= 1e-6, "scene {k}: {v} vs closed form {d}");
        }
    }
    assert!(unobstructed > 10);
}

#[test]
fn l_shaped_wall_detour_matches_grid() {
    let walls = [
        Segment::new(Point2::new(2., -10.), Point2::new(2., 2.)),
        Segment::new(Point2::new(2., 2.), Point2::new(6., 2.)),
    ];
    let e = GoalEllipse::circle(Point2::new(8., 0.), 1.0).unwrap();
    let start = Point2::new(0., 0.);
    let (v, path) = shortest_path_to_ellipse(start, &e, &walls, 64).unwrap();
    let g = grid_path_oracle(start, &e, &walls, 0.01).unwrap();
    assert!(path.len() >= 3);
    assert!((v - g).abs() / g <= 0.02, "{v} vs {g}");
    let closed = 8f64.sqrt() + 4.0 + 8f64.sqrt() - 1.0;
    assert!((v - closed).abs() < 1e-5, "{v} vs {closed}");
}

#[test]
fn beeline_without_walls() {
    let e = GoalEllipse::new(Point2::new(0., 0.), 2.0, 1.0, 0.0).unwrap();
    let (v, path) = shortest_path_to_ellipse(Point2::new(10., 0.), &e, &[], 64).unwrap();
    assert!((v - 8.0).abs() < 1e-12);
    assert_eq!(path.len(), 2);
}

#[test]
fn closest_point_against_dense_sampling() {
    let mut rng = common::rng(3);
    for _ in 0..50 {
        let e = common::random_ellipse(&mut rng, 20.0);
        let p = Point2::new(rng.gen_range(-5.0..25.0), rng.gen_range(-5.0..25.0));
        if point_in_ellipse(p, &e) {
            continue;
        }
        let (c, d) = closest_point_on_ellipse(p, &e).unwrap();
        assert!((e.level(c) - 1.0).abs() <= 1e-9);
        let n = 100_000;
        let sampled = (0..n)
            .map(|k| p.dist(e.boundary_point(std::f64::consts::TAU * k as f64 / n as f64)))
            .fold(f64::INFINITY, f64::min);
        assert!(d <= sampled + 1e-12);
        assert!(sampled - d <= 1e-6, "{d} vs {sampled}");
    }
}

fn scene_strategy() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn visibility_edges_are_symmetric(seed in scene_strategy()) {
        let mut rng = common::rng(seed);
        let walls = common::random_walls(&mut rng, 12, 20.0);
        let g = build_visibility_graph(Point2::new(1., 1.), &[Point2::new(19., 19.)], &walls);
        for i in 0..g.nodes().len() {
            for &(j, _) in g.neighbors(i) {
                prop_assert!(g.has_edge(j, i));
            }
        }
    }

    #[test]
    fn deleting_a_wall_never_lengthens_the_path(seed in scene_strategy(), pick in any::<prop::sample::Index>()) {
        let mut rng = common::rng(seed);
        let sc = common::random_scene(&mut rng, 12, 0.5);
        prop_assume!(!sc.walls.is_empty());
        let full = shortest_path_to_ellipse(sc.start, &sc.ellipse, &sc.walls, 64);
        let mut fewer = sc.walls.clone();
        fewer.remove(pick.index(fewer.len()));
        let reduced = shortest_path_to_ellipse(sc.start, &sc.ellipse, &fewer, 64);
        if let Ok((f, _)) = full {
            let (r, _) = reduced.expect("removing a wall keeps the goal reachable");
            prop_assert!(r <= f + 1e-9, "{} > {}", r, f);
        }
    }

    #[test]
    fn path_is_at_least_the_euclidean_gap(seed in scene_strategy()) {
        let mut rng = common::rng(seed);
        let sc = common::random_scene(&mut rng, 12, 0.5);
        if let Ok((v, path)) = shortest_path_to_ellipse(sc.start, &sc.ellipse, &sc.walls, 64) {
            let (_, d) = closest_point_on_ellipse(sc.start, &sc.ellipse).unwrap();
            prop_assert!(v >= d - 1e-9);
            prop_assert!(v > 0.0);
            prop_assert!(point_in_ellipse(*path.last().unwrap(), &sc.ellipse)
                || sc.ellipse.level(*path.last().unwrap()) <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn zero_exactly_inside(seed in scene_strategy()) {
        let mut rng = common::rng(seed);
        let e = common::random_ellipse(&mut rng, 20.0);
        let walls = common::random_walls(&mut rng, 8, 20.0);
        let p = Point2::new(rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0));
        match shortest_path_to_ellipse(p, &e, &walls, 64) {
            Ok((v, _)) => prop_assert_eq!(v == 0.0, point_in_ellipse(p, &e)),
            Err(_) => prop_assert!(!point_in_ellipse(p, &e)),
        }
    }

    #[test]
    fn doubling_samples_never_lengthens(seed in scene_strategy()) {
        let mut rng = common::rng(seed);
        let sc = common::random_scene(&mut rng, 10, 0.5);
        let mut last = f64::INFINITY;
        for n in [8, 16, 32, 64, 128, 256] {
            if let Ok((v, _)) = shortest_path_to_ellipse(sc.start, &sc.ellipse, &sc.walls, n) {
                prop_assert!(v <= last + 1e-9, "n={}: {} > {}", n, v, last);
                last = v;
            }
        }
    }
}
