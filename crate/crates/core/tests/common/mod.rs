#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use wayfind::floorplan::{parse_scenario, Scenario};
use wayfind::geometry::{closest_point_on_ellipse, segments_intersect, GoalEllipse, Point2, Segment};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Scene {
    pub start: Point2,
    pub ellipse: GoalEllipse,
    pub walls: Vec<Segment>,
}

pub fn random_wall(rng: &mut ChaCha8Rng, extent: f64) -> Segment {
    let c = Point2::new(rng.gen_range(0.0..extent), rng.gen_range(0.0..extent));
    let ang: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let half = rng.gen_range(0.5..3.0);
    let d = Point2::new(ang.cos(), ang.sin()) * half;
    Segment::new(c - d, c + d)
}

pub fn random_walls(rng: &mut ChaCha8Rng, n: usize, extent: f64) -> Vec<Segment> {
    (0..n).map(|_| random_wall(rng, extent)).collect()
}

pub fn random_ellipse(rng: &mut ChaCha8Rng, extent: f64) -> GoalEllipse {
    let a = rng.gen_range(0.5..3.0);
    let b = rng.gen_range(0.3..=a);
    GoalEllipse::new(
        Point2::new(rng.gen_range(0.0..extent), rng.gen_range(0.0..extent)),
        a,
        b,
        rng.gen_range(0.0..std::f64::consts::PI),
    )
    .unwrap()
}

/// Distance between two segments that do not cross.
fn gap(s: &Segment, t: &Segment) -> f64 {
    [s.distance_to(t.a), s.distance_to(t.b), t.distance_to(s.a), t.distance_to(s.b)]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Up to `max_walls` random walls in a 20 m square and a random ellipse,
/// laid out so a 0.05 m grid resolves every passage: walls cross or keep
/// 0.3 m apart, stay 0.3 m clear of the ellipse, and the start lies 0.3 m
/// from every wall and at least `min_gap` from the ellipse.
pub fn random_scene(rng: &mut ChaCha8Rng, max_walls: usize, min_gap: f64) -> Scene {
    let extent = 20.0;
    let n = rng.gen_range(0..=max_walls);
    let ellipse = random_ellipse(rng, extent);
    let clear_of_ellipse = |w: &Segment| {
        (0..=200).all(|k| {
            let q = w.a.lerp(w.b, k as f64 / 200.0);
            !ellipse.contains(q) && closest_point_on_ellipse(q, &ellipse).unwrap().1 >= 0.3
        })
    };
    let mut walls: Vec<Segment> = Vec::with_capacity(n);
    while walls.len() < n {
        let w = random_wall(rng, extent);
        let ok = clear_of_ellipse(&w)
            && walls
                .iter()
                .all(|v| segments_intersect(&w, v) || gap(&w, v) >= 0.3);
        if ok {
            walls.push(w);
        }
    }
    loop {
        let start = Point2::new(rng.gen_range(0.0..extent), rng.gen_range(0.0..extent));
        if ellipse.contains(start) || walls.iter().any(|w| w.distance_to(start) < 0.3) {
            continue;
        }
        if closest_point_on_ellipse(start, &ellipse).unwrap().1 < min_gap {
            continue;
        }
        return Scene {
            start,
            ellipse,
            walls,
        };
    }
}

fn p(x: f64, y: f64) -> Value {
    json!([x, y])
}

/// Scenario document for a random connected floor plan on a grid of cells.
///
/// Some 2x2 blocks are merged into L-shaped rooms. Doors form a random
/// spanning tree over room adjacency plus a few extra links; one door on the
/// building's outline leads outside.
pub fn random_plan_doc(rng: &mut ChaCha8Rng) -> Value {
    let nx = rng.gen_range(2..=5usize);
    let ny = rng.gen_range(2..=4usize);
    let mut xs = vec![0.0];
    for _ in 0..nx {
        xs.push(xs.last().unwrap() + 3.0 + 0.5 * rng.gen_range(0..8) as f64);
    }
    let mut ys = vec![0.0];
    for _ in 0..ny {
        ys.push(ys.last().unwrap() + 3.0 + 0.5 * rng.gen_range(0..6) as f64);
    }

    // cell -> room index
    let mut owner = vec![vec![usize::MAX; ny]; nx];
    let mut rooms: Vec<Vec<Point2>> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if owner[i][j] != usize::MAX {
                continue;
            }
            let free = |a: usize, b: usize| a < nx && b < ny && owner[a][b] == usize::MAX;
            if free(i + 1, j) && free(i, j + 1) && rng.gen_bool(0.25) {
                let r = rooms.len();
                owner[i][j] = r;
                owner[i + 1][j] = r;
                owner[i][j + 1] = r;
                rooms.push(vec![
                    Point2::new(xs[i], ys[j]),
                    Point2::new(xs[i + 2], ys[j]),
                    Point2::new(xs[i + 2], ys[j + 1]),
                    Point2::new(xs[i + 1], ys[j + 1]),
                    Point2::new(xs[i + 1], ys[j + 2]),
                    Point2::new(xs[i], ys[j + 2]),
                ]);
            } else {
                owner[i][j] = rooms.len();
                rooms.push(vec![
                    Point2::new(xs[i], ys[j]),
                    Point2::new(xs[i + 1], ys[j]),
                    Point2::new(xs[i + 1], ys[j + 1]),
                    Point2::new(xs[i], ys[j + 1]),
                ]);
            }
        }
    }

    // shared cell edges between different rooms
    let mut links: BTreeMap<(usize, usize), Vec<Segment>> = BTreeMap::new();
    for i in 0..nx {
        for j in 0..ny {
            let a = owner[i][j];
            if i + 1 < nx && owner[i + 1][j] != a {
                let b = owner[i + 1][j];
                let s = Segment::new(Point2::new(xs[i + 1], ys[j]), Point2::new(xs[i + 1], ys[j + 1]));
                links.entry((a.min(b), a.max(b))).or_default().push(s);
            }
            if j + 1 < ny && owner[i][j + 1] != a {
                let b = owner[i][j + 1];
                let s = Segment::new(Point2::new(xs[i], ys[j + 1]), Point2::new(xs[i + 1], ys[j + 1]));
                links.entry((a.min(b), a.max(b))).or_default().push(s);
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = links.keys().copied().collect();
    pairs.shuffle(rng);
    let mut parent: Vec<usize> = (0..rooms.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    let door_on = |edge: &Segment, rng: &mut ChaCha8Rng| {
        let len = edge.length();
        let width = rng.gen_range(0.6..1.0);
        let t0 = rng.gen_range(0.3..(len - 0.3 - width));
        let dir = edge.direction() * (1.0 / len);
        (edge.a + dir * t0, edge.a + dir * (t0 + width))
    };
    let mut doors = Vec::new();
    let name = |r: usize| format!("R{r:02}");
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        let tree = ra != rb;
        if tree || rng.gen_bool(0.3) {
            parent[ra] = rb;
            let edge = *links[&(a, b)].choose(rng).unwrap();
            let (u, v) = door_on(&edge, rng);
            doors.push((name(a), name(b), u, v));
        }
    }

    // exit on the outline
    let mut outline = Vec::new();
    for i in 0..nx {
        outline.push((owner[i][0], Segment::new(Point2::new(xs[i], 0.0), Point2::new(xs[i + 1], 0.0))));
        outline.push((owner[i][ny - 1], Segment::new(Point2::new(xs[i], ys[ny]), Point2::new(xs[i + 1], ys[ny]))));
    }
    for j in 0..ny {
        outline.push((owner[0][j], Segment::new(Point2::new(0.0, ys[j]), Point2::new(0.0, ys[j + 1]))));
        outline.push((owner[nx - 1][j], Segment::new(Point2::new(xs[nx], ys[j]), Point2::new(xs[nx], ys[j + 1]))));
    }
    let (exit_room, edge) = *outline.choose(rng).unwrap();
    let (u, v) = door_on(&edge, rng);
    doors.push((name(exit_room), "outside".to_string(), u, v));
    doors.shuffle(rng);

    let classes = ["common", "circulation"];
    let room_docs: Vec<Value> = rooms
        .iter()
        .enumerate()
        .map(|(r, vs)| {
            json!({
                "id": name(r),
                "class": classes[rng.gen_range(0..2)],
                "vertices": vs.iter().map(|v| p(v.x, v.y)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let door_docs: Vec<Value> = doors
        .iter()
        .enumerate()
        .map(|(k, (a, b, u, v))| {
            json!({ "id": format!("D{k:02}"), "endpoints": [p(u.x, u.y), p(v.x, v.y)], "room_a": a, "room_b": b })
        })
        .collect();

    let start_room = rng.gen_range(0..rooms.len());
    let (ci, cj) = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .find(|&(i, j)| owner[i][j] == start_room)
        .unwrap();
    let start = p(
        rng.gen_range(xs[ci] + 0.3..xs[ci + 1] - 0.3),
        rng.gen_range(ys[cj] + 0.3..ys[cj + 1] - 0.3),
    );
    let a = rng.gen_range(1.0..6.0);
    let b = rng.gen_range(0.5..=a);
    let agent = json!({
        "id": "A1",
        "start": start,
        "goal_ellipses": [{
            "center": p(rng.gen_range(-5.0..xs[nx] + 5.0), rng.gen_range(-5.0..ys[ny] + 5.0)),
            "semi_major": a,
            "semi_minor": b,
            "rotation": rng.gen_range(0.0..std::f64::consts::PI),
        }],
        "strategies": { "use_circulation_preference": rng.gen_bool(0.5), "n_ellipse_samples": 32 },
        "rng_seed": rng.gen_range(0..1000u64),
    });
    json!({
        "meta": { "units": "meters", "format_version": 1 },
        "rooms": room_docs,
        "doors": door_docs,
        "agents": [agent],
    })
}

pub fn random_plan(rng: &mut ChaCha8Rng) -> Scenario {
    parse_scenario(&random_plan_doc(rng).to_string()).expect("generated plans are valid")
}

pub fn scenario_file(name: &str) -> Scenario {
    let path = format!("{}/../../scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_scenario(&text).unwrap()
}

/// Checks the invariants every recorded run must satisfy. Returns the first
/// violation found.
pub fn check_trajectory(
    plan: &wayfind::floorplan::FloorPlan,
    run: &wayfind::sim::RunResult,
    speed: f64,
    dt: f64,
) -> Result<(), String> {
    use wayfind::geometry::segment_intersects_walls;
    use wayfind::sim::{EventKind, Outcome};
    let walls = plan.all_walls();
    let samples = &run.trajectory.samples;
    for s in samples {
        let p = Point2::new(s.x, s.y);
        if plan.locate_room(p).is_err() {
            return Err(format!("sample {p} lies outside all rooms"));
        }
    }
    for w in samples.windows(2) {
        let (a, b) = (Point2::new(w[0].x, w[0].y), Point2::new(w[1].x, w[1].y));
        if w[1].t <= w[0].t {
            return Err(format!("time not increasing at t={}", w[1].t));
        }
        if a.dist(b) > speed * dt + 1e-9 {
            return Err(format!("jump of {} at t={}", a.dist(b), w[1].t));
        }
        if segment_intersects_walls(&Segment::new(a, b), &walls) {
            return Err(format!("step {a} -> {b} crosses a wall"));
        }
    }
    let poly = run.trajectory.polyline_length();
    if (poly - run.path_length).abs() > 1e-6 * run.path_length.max(1.0) {
        return Err(format!("path_length {} vs polyline {poly}", run.path_length));
    }
    if run.outcome == Outcome::Exited
        && run.trajectory.events.last().map(|e| e.kind) != Some(EventKind::Exit)
    {
        return Err("exited without a final exit event".into());
    }
    Ok(())
}

/// The office plan's agent with its goal replaced.
pub fn with_goal(sc: &Scenario, goal: GoalEllipse) -> wayfind::floorplan::AgentSpec {
    wayfind::floorplan::AgentSpec {
        goal_ellipses: vec![goal],
        ..sc.agents[0].clone()
    }
}

/// Midpoint of the plan's first exit door.
pub fn exit_midpoint(plan: &wayfind::floorplan::FloorPlan) -> Point2 {
    let id = &plan.exit_door_ids()[0];
    plan.door(id).unwrap().midpoint()
}

/// Goal of the same shape moved to the bounding-box corner farthest from the exit.
pub fn opposite_corner_goal(plan: &wayfind::floorplan::FloorPlan, goal: &GoalEllipse) -> GoalEllipse {
    let (lo, hi) = plan.bbox();
    let exit = exit_midpoint(plan);
    let corner = [lo, hi, Point2::new(lo.x, hi.y), Point2::new(hi.x, lo.y)]
        .into_iter()
        .max_by(|a, b| a.dist(exit).total_cmp(&b.dist(exit)))
        .unwrap();
    GoalEllipse::new(corner, goal.semi_major(), goal.semi_minor(), goal.rotation()).unwrap()
}
