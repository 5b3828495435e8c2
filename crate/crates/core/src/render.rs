//! SVG export of a floor plan with goal ellipses and an optional run.

use crate::floorplan::{FloorPlan, RoomClass};
use crate::geometry::{GoalEllipse, Point2};
use crate::sim::{EventKind, RunResult};
use std::fmt::Write as _;

const CIRCULATION_FILL: &str = "#dce9f5";
const COMMON_FILL: &str = "#ffffff";

/// Fixed three decimals with trailing zeros trimmed; `-0` prints as `0`.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn pt(p: Point2) -> String {
    format!("{},{}", num(p.x), num(p.y))
}

pub fn render_svg(plan: &FloorPlan, goals: &[GoalEllipse], run: Option<&RunResult>) -> String {
    let (lo, hi) = plan.bbox();
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let (mx, my) = (0.05 * w, 0.05 * h);
    let stroke = num((0.002 * w.max(h)).max(0.01));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        num(lo.x - mx),
        num(-(hi.y + my)),
        num(w + 2.0 * mx),
        num(h + 2.0 * my)
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)" stroke-width="{stroke}">"#);

    for r in plan.rooms() {
        let fill = match r.class {
            RoomClass::Circulation => CIRCULATION_FILL,
            _ => COMMON_FILL,
        };
        let mut d = String::new();
        for (i, &v) in r.boundary.vertices().iter().enumerate() {
            let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, num(v.x), num(v.y));
        }
        d.push('Z');
        let _ = writeln!(
            out,
            r#"<path id="room-{}" class="room {}" d="{d}" fill="{fill}" stroke="none"/>"#,
            r.id,
            class_name(r.class)
        );
    }
    for s in plan.all_walls() {
        let _ = writeln!(
            out,
            r##"<line class="wall" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#222222"/>"##,
            num(s.a.x),
            num(s.a.y),
            num(s.b.x),
            num(s.b.y)
        );
    }
    for d in plan.doors() {
        let s = d.segment;
        let _ = writeln!(
            out,
            r##"<line id="door-{}" class="door{}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#2a9d3a" stroke-dasharray="0.2,0.1"/>"##,
            d.id,
            if d.is_exit() { " exit" } else { "" },
            num(s.a.x),
            num(s.a.y),
            num(s.b.x),
            num(s.b.y)
        );
    }
    for e in goals {
        let c = e.center();
        let _ = writeln!(
            out,
            r##"<ellipse class="goal" cx="{}" cy="{}" rx="{}" ry="{}" transform="rotate({} {} {})" fill="#f4a261" fill-opacity="0.25" stroke="#e76f51"/>"##,
            num(c.x),
            num(c.y),
            num(e.semi_major()),
            num(e.semi_minor()),
            num(e.rotation().to_degrees()),
            num(c.x),
            num(c.y)
        );
    }
    if let Some(run) = run {
        let pts: Vec<String> = run.trajectory.points().map(pt).collect();
        let _ = writeln!(
            out,
            r##"<polyline class="trajectory" points="{}" fill="none" stroke="#c1121f"/>"##,
            pts.join(" ")
        );
        let samples = &run.trajectory.samples;
        for ev in &run.trajectory.events {
            let kind = match ev.kind {
                EventKind::Backtrack => "backtrack",
                EventKind::ReachEllipse => "reach_ellipse",
                EventKind::Exit => "exit",
                EventKind::EnterRoom | EventKind::ChooseDoor => continue,
            };
            // position of the latest sample at or before the event
            let k = samples.partition_point(|s| s.t <= ev.t).saturating_sub(1);
            if let Some(s) = samples.get(k) {
                let _ = writeln!(
                    out,
                    r##"<circle class="event {kind}" cx="{}" cy="{}" r="{}" fill="#1d3557"/>"##,
                    num(s.x),
                    num(s.y),
                    num(0.01 * w.max(h))
                );
            }
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn class_name(c: RoomClass) -> &'static str {
    match c {
        RoomClass::Circulation => "circulation",
        RoomClass::Common => "common",
        RoomClass::Outside => "outside",
    }
}
