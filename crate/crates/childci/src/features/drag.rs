//! Drag-and-drop features: largest-deviation-point geometry, segment
//! latencies/lengths/directions aggregated over drag strokes, plus the two
//! carrot/rabbit outcome flags.

use crate::model::{FeatureDef, Point, Stroke, TargetKind, TestSession};
use crate::signal::{kinematic_profile, largest_deviation_point, sample_mean_std};

pub const DRAG_LEN: usize = 28;

/// The 13 per-stroke quantities aggregated as mean/std pairs, in catalog
/// order.
const QUANTITIES: &[(&str, &str, bool)] = &[
    ("ldp_size", "LDP size (px)", false),
    ("ldp_velocity", "LDP velocity (px/s)", false),
    ("start_ldp_latency_ms", "Start-to-LDP latency (ms)", false),
    ("start_ldp_length", "Straight start-to-LDP length (px)", false),
    ("start_ldp_direction", "Start-to-LDP direction (rad)", true),
    ("start_stop_latency_ms", "Start-to-stop latency (ms)", false),
    ("start_stop_length", "Straight start-to-stop length (px)", false),
    ("start_stop_direction", "Start-to-stop direction (rad)", true),
    ("ldp_stop_latency_ms", "LDP-to-stop latency (ms)", false),
    ("ldp_stop_length", "Straight LDP-to-stop length (px)", false),
    ("ldp_stop_direction", "LDP-to-stop direction (rad)", true),
    ("start_velocity", "Start point velocity (px/s)", false),
    ("stop_velocity", "Stop point velocity (px/s)", false),
];

pub fn defs() -> Vec<FeatureDef> {
    let mut out = Vec::with_capacity(DRAG_LEN);
    for (id, name, _) in QUANTITIES {
        for (suffix, label) in [("mean", "Average"), ("std", "Std of")] {
            out.push(FeatureDef {
                id: format!("t2.{id}_{suffix}"),
                name: format!("{label} {name}"),
                source: "drag".to_string(),
            });
        }
    }
    out.push(FeatureDef {
        id: "t2.carrot_touched_first_down".into(),
        name: "Carrot touched on the first pointer down".into(),
        source: "drag".into(),
    });
    out.push(FeatureDef {
        id: "t2.carrot_ends_in_rabbit".into(),
        name: "Carrot ends up inside the rabbit".into(),
        source: "drag".into(),
    });
    out
}

struct StrokeQuantities {
    values: [f64; 13],
}

fn stroke_quantities(stroke: &Stroke) -> Option<StrokeQuantities> {
    if stroke.samples.len() < 3 {
        return None;
    }
    let ldp = largest_deviation_point(stroke).ok()?;
    let profile = kinematic_profile(stroke).ok()?;
    let start = stroke.start();
    let stop = stroke.end();
    let ldp_sample = &stroke.samples[ldp.index];
    let dir = |a: Point, b: Point| (b.y - a.y).atan2(b.x - a.x);
    Some(StrokeQuantities {
        values: [
            ldp.size,
            ldp.velocity,
            (ldp_sample.t - start.t) as f64,
            start.pos().dist(ldp_sample.pos()),
            dir(start.pos(), ldp_sample.pos()),
            (stop.t - start.t) as f64,
            start.pos().dist(stop.pos()),
            dir(start.pos(), stop.pos()),
            (stop.t - ldp_sample.t) as f64,
            ldp_sample.pos().dist(stop.pos()),
            dir(ldp_sample.pos(), stop.pos()),
            profile.speed[0],
            profile.speed[stroke.samples.len() - 1],
        ],
    })
}

/// Circular mean and circular standard deviation of angles.
fn circular_mean_std(angles: &[f64]) -> (f64, f64) {
    let n = angles.len() as f64;
    let sin: f64 = angles.iter().map(|a| a.sin()).sum::<f64>() / n;
    let cos: f64 = angles.iter().map(|a| a.cos()).sum::<f64>() / n;
    let mean = sin.atan2(cos);
    let r = sin.hypot(cos).min(1.0);
    let std = if r > 0.0 { (-2.0 * r.ln()).sqrt() } else { f64::INFINITY };
    (mean, std)
}

pub fn values(session: &TestSession) -> Vec<Option<f64>> {
    let mut out = vec![None; DRAG_LEN];

    let per_stroke: Vec<StrokeQuantities> = session
        .strokes
        .iter()
        .filter_map(stroke_quantities)
        .collect();
    if !per_stroke.is_empty() {
        for (q, (_, _, circular)) in QUANTITIES.iter().enumerate() {
            let series: Vec<f64> = per_stroke.iter().map(|s| s.values[q]).collect();
            let (mean, std) = if *circular {
                circular_mean_std(&series)
            } else {
                sample_mean_std(&series)
            };
            out[2 * q] = Some(mean).filter(|v| v.is_finite());
            out[2 * q + 1] = Some(std).filter(|v| v.is_finite());
        }
    }

    out[26] = carrot_touched_first_down(session).map(|b| f64::from(u8::from(b)));
    out[27] = carrot_ends_in_rabbit(session).map(|b| f64::from(u8::from(b)));
    out
}

/// The carrot circle shown at time `t`: the latest carrot position event not
/// after it (falling back to the first one).
fn carrot_at(session: &TestSession, t: i64) -> Option<(Point, f64)> {
    let carrots = session.targets_of(TargetKind::CarrotPos);
    carrots
        .iter()
        .filter(|c| c.t <= t)
        .last()
        .or_else(|| carrots.first())
        .and_then(|c| c.geometry.circle())
}

pub fn carrot_touched_first_down(session: &TestSession) -> Option<bool> {
    let first = session.strokes.first()?.start();
    let (center, radius) = carrot_at(session, first.t)?;
    Some(first.pos().dist(center) <= radius)
}

pub fn carrot_ends_in_rabbit(session: &TestSession) -> Option<bool> {
    let (c_center, c_radius) = session
        .targets_of(TargetKind::CarrotPos)
        .last()?
        .geometry
        .circle()?;
    let (r_center, r_radius) = session
        .targets_of(TargetKind::RabbitPos)
        .last()?
        .geometry
        .circle()?;
    Some(c_center.dist(r_center) <= c_radius + r_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        Action, ChildId, InputKind, Screen, TargetEvent, TargetGeometry, TestId, TouchSample,
    };

    fn line_stroke(t0: i64, from: (f64, f64), to: (f64, f64), n: usize) -> Stroke {
        let samples = (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                TouchSample {
                    t: t0 + (i as i64) * 20,
                    x: from.0 + f * (to.0 - from.0),
                    y: from.1 + f * (to.1 - from.1),
                    pressure: 0.5,
                    pointer_id: 0,
                    action: if i == 0 {
                        Action::Down
                    } else if i == n - 1 {
                        Action::Up
                    } else {
                        Action::Move
                    },
                }
            })
            .collect();
        Stroke {
            pointer_id: 0,
            samples,
        }
    }

    fn circle(kind: TargetKind, t: i64, x: f64, y: f64, radius: f64) -> TargetEvent {
        TargetEvent {
            t,
            kind,
            geometry: TargetGeometry::Circle {
                center: Point::new(x, y),
                radius,
            },
        }
    }

    fn t2_session(strokes: Vec<Stroke>, targets: Vec<TargetEvent>) -> TestSession {
        TestSession {
            child_id: ChildId::new("c"),
            test_id: TestId::T2,
            input: InputKind::Finger,
            screen: Screen::default(),
            duration_ms: 20_000,
            strokes,
            targets,
            ui_states: vec![],
        }
    }

    #[test]
    fn straight_constant_drag_has_zero_ldp_and_stds() {
        let s = t2_session(
            vec![line_stroke(0, (100.0, 400.0), (900.0, 400.0), 20)],
            vec![
                circle(TargetKind::CarrotPos, 0, 100.0, 400.0, 40.0),
                circle(TargetKind::RabbitPos, 0, 900.0, 400.0, 70.0),
            ],
        );
        let v = values(&s);
        assert_eq!(v[0], Some(0.0)); // mean LDP size
        for q in 0..13 {
            assert!(v[2 * q + 1].unwrap().abs() < 1e-9, "std of quantity {q}");
        }
        assert_eq!(v[26], Some(1.0));
    }

    #[test]
    fn first_touch_far_from_carrot() {
        let s = t2_session(
            vec![line_stroke(0, (150.0, 400.0), (900.0, 400.0), 10)],
            vec![circle(TargetKind::CarrotPos, 0, 100.0, 400.0, 30.0)],
        );
        let v = values(&s);
        assert_eq!(v[26], Some(0.0));
        assert_eq!(v[27], None); // no rabbit target
    }

    #[test]
    fn carrot_overlapping_rabbit_counts_as_delivered() {
        let targets = vec![
            circle(TargetKind::CarrotPos, 0, 100.0, 400.0, 40.0),
            circle(TargetKind::RabbitPos, 0, 900.0, 400.0, 70.0),
            circle(TargetKind::CarrotPos, 900, 850.0, 400.0, 40.0),
        ];
        let s = t2_session(vec![line_stroke(0, (100.0, 400.0), (850.0, 400.0), 10)], targets);
        let v = values(&s);
        assert_eq!(v[27], Some(1.0));
    }

    #[test]
    fn short_strokes_invalidate_aggregates_but_not_flags() {
        let mut stroke = line_stroke(0, (100.0, 400.0), (120.0, 400.0), 2);
        stroke.samples.truncate(2);
        let s = t2_session(
            vec![stroke],
            vec![
                circle(TargetKind::CarrotPos, 0, 100.0, 400.0, 40.0),
                circle(TargetKind::RabbitPos, 0, 900.0, 400.0, 70.0),
            ],
        );
        let v = values(&s);
        assert!(v[..26].iter().all(Option::is_none));
        assert_eq!(v[26], Some(1.0));
        assert_eq!(v[27], Some(0.0));
    }

    #[test]
    fn two_stroke_aggregates_match_per_stroke_recomputation() {
        let a = line_stroke(0, (100.0, 400.0), (500.0, 420.0), 15);
        let mut b = line_stroke(2000, (500.0, 420.0), (900.0, 380.0), 15);
        b.samples[7].y += 30.0; // bend the second stroke
        let s = t2_session(
            vec![a.clone(), b.clone()],
            vec![circle(TargetKind::CarrotPos, 0, 100.0, 400.0, 40.0)],
        );
        let v = values(&s);

        let qa = stroke_quantities(&a).unwrap();
        let qb = stroke_quantities(&b).unwrap();
        for q in 0..13 {
            let series = [qa.values[q], qb.values[q]];
            let (mean, std) = if QUANTITIES[q].2 {
                circular_mean_std(&series)
            } else {
                sample_mean_std(&series)
            };
            assert!((v[2 * q].unwrap() - mean).abs() < 1e-9, "mean of {q}");
            assert!((v[2 * q + 1].unwrap() - std).abs() < 1e-9, "std of {q}");
        }
    }

    #[test]
    fn circular_mean_handles_wraparound() {
        use std::f64::consts::PI;
        let angles = [PI - 0.1, -PI + 0.1];
        let (mean, std) = circular_mean_std(&angles);
        assert!((mean.abs() - PI).abs() < 1e-9, "mean = {mean}");
        assert!(std < 0.2);
    }
}
