//! Session-level aggregate features shared by every test: time, kinematic,
//! direction, geometry and pressure families, 34 values in a fixed order.

use crate::model::{FeatureDef, InputKind, TestSession};
use crate::signal::{kinematic_profile, path_and_chord, sample_mean_std, wrap_angle};

pub const GLOBAL_LEN: usize = 34;

/// Definitions of the global family in catalog order. `prefix` becomes the id
/// namespace so the same definitions can serve both as appended columns and
/// as the drawing-test base set.
pub fn defs(prefix: &str, source: &str) -> Vec<FeatureDef> {
    let mut d: Vec<FeatureDef> = Vec::with_capacity(GLOBAL_LEN);
    fn def(prefix: &str, source: &str, id: &str, name: &str) -> FeatureDef {
        FeatureDef {
            id: format!("{prefix}.{id}"),
            name: name.to_string(),
            source: source.to_string(),
        }
    }
    let mut push = |id: &str, name: &str| d.push(def(prefix, source, id, name));
    push("duration_ms", "Total session duration (ms)");
    push("stroke_count", "Number of strokes");
    push("stroke_duration_mean_ms", "Mean stroke duration (ms)");
    push("stroke_duration_std_ms", "Std of stroke duration (ms)");
    push("interstroke_gap_mean_ms", "Mean gap between consecutive strokes (ms)");
    push("pendown_ratio", "Fraction of the session spent touching");
    push("speed_mean", "Mean speed (px/s)");
    push("speed_std", "Std of speed (px/s)");
    push("speed_max", "Max speed (px/s)");
    push("accel_mean", "Mean absolute acceleration (px/s^2)");
    push("accel_std", "Std of absolute acceleration (px/s^2)");
    push("accel_max", "Max absolute acceleration (px/s^2)");
    push("jerk_mean", "Mean absolute jerk (px/s^3)");
    push("jerk_std", "Std of absolute jerk (px/s^3)");
    push("jerk_max", "Max absolute jerk (px/s^3)");
    for bin in 0..8 {
        push(
            &format!("dir_hist_{bin}"),
            &format!("Fraction of segments in direction octant {bin}"),
        );
    }
    push("turn_angle_mean_abs", "Mean absolute turning angle (rad)");
    push("path_len", "Total drawn path length (px)");
    push("bbox_w", "Bounding box width (px)");
    push("bbox_h", "Bounding box height (px)");
    push("bbox_aspect", "Bounding box width/height ratio");
    push("path_chord_ratio", "Path length over start-stop chord");
    push("pressure_mean", "Mean pressure");
    push("pressure_std", "Std of pressure");
    push("pressure_max", "Max pressure");
    push("pressure_min", "Min pressure");
    push("pressure_range", "Pressure range (max - min)");
    debug_assert_eq!(d.len(), GLOBAL_LEN);
    d
}

/// Computes the 34 global family values; `None` marks an unavailable slot.
///
/// Sessions without at least one stroke of 3+ samples yield all-invalid.
pub fn values(session: &TestSession) -> Vec<Option<f64>> {
    if !session.strokes.iter().any(|s| s.samples.len() >= 3) {
        return vec![None; GLOBAL_LEN];
    }
    let mut out = Vec::with_capacity(GLOBAL_LEN);

    // time family
    let durations: Vec<f64> = session
        .strokes
        .iter()
        .map(|s| s.duration_ms() as f64)
        .collect();
    let (dur_mean, dur_std) = sample_mean_std(&durations);
    out.push(Some(session.duration_ms as f64));
    out.push(Some(session.strokes.len() as f64));
    out.push(Some(dur_mean));
    out.push(Some(dur_std));
    let gaps: Vec<f64> = session
        .strokes
        .windows(2)
        .map(|w| (w[1].start().t - w[0].end().t) as f64)
        .collect();
    out.push(if gaps.is_empty() {
        None
    } else {
        Some(gaps.iter().sum::<f64>() / gaps.len() as f64)
    });
    out.push(if session.duration_ms > 0 {
        Some(durations.iter().sum::<f64>() / session.duration_ms as f64)
    } else {
        None
    });

    // kinematic family: pooled per-segment speeds, accelerations, jerks
    let mut speeds = Vec::new();
    let mut accels = Vec::new();
    let mut jerks = Vec::new();
    let mut directions = Vec::new();
    let mut turns = Vec::new();
    for stroke in &session.strokes {
        if stroke.samples.len() < 2 {
            continue;
        }
        let profile = kinematic_profile(stroke).expect("len checked");
        let n_seg = stroke.samples.len() - 1;
        let seg_speed = &profile.speed[..n_seg];
        let seg_dir = &profile.direction[..n_seg];
        speeds.extend_from_slice(seg_speed);
        directions.extend_from_slice(seg_dir);
        for w in seg_dir.windows(2) {
            turns.push(wrap_angle(w[1] - w[0]).abs());
        }
        let mut stroke_accels = Vec::new();
        for i in 0..n_seg.saturating_sub(1) {
            let dt = (stroke.samples[i + 1].t - stroke.samples[i].t) as f64 / 1000.0;
            if dt > 0.0 {
                stroke_accels.push(((seg_speed[i + 1] - seg_speed[i]) / dt).abs());
            }
        }
        for i in 0..stroke_accels.len().saturating_sub(1) {
            let dt = (stroke.samples[i + 2].t - stroke.samples[i + 1].t) as f64 / 1000.0;
            if dt > 0.0 {
                jerks.push(((stroke_accels[i + 1] - stroke_accels[i]) / dt).abs());
            }
        }
        accels.extend(stroke_accels);
    }
    for series in [&speeds, &accels, &jerks] {
        if series.is_empty() {
            out.extend([None, None, None]);
        } else {
            let (mean, std) = sample_mean_std(series);
            let max = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            out.push(Some(mean));
            out.push(Some(std));
            out.push(Some(max));
        }
    }

    // direction family
    if directions.is_empty() {
        out.extend(std::iter::repeat(None).take(8));
    } else {
        let mut hist = [0usize; 8];
        for &d in &directions {
            hist[direction_octant(d)] += 1;
        }
        for count in hist {
            out.push(Some(count as f64 / directions.len() as f64));
        }
    }
    out.push(if turns.is_empty() {
        None
    } else {
        Some(turns.iter().sum::<f64>() / turns.len() as f64)
    });

    // geometry family
    let mut path_len = 0.0;
    for stroke in &session.strokes {
        if stroke.samples.len() >= 2 {
            let (p, _) = path_and_chord(&stroke.points()).expect("len checked");
            path_len += p;
        }
    }
    out.push(Some(path_len));
    let xs: Vec<f64> = session.all_samples().map(|s| s.x).collect();
    let ys: Vec<f64> = session.all_samples().map(|s| s.y).collect();
    let (w, h) = (span(&xs), span(&ys));
    out.push(Some(w));
    out.push(Some(h));
    out.push(if h > 0.0 { Some(w / h) } else { None });
    let chord = {
        let first = session.strokes.first().map(|s| s.start().pos());
        let last = session.strokes.last().map(|s| s.end().pos());
        match (first, last) {
            (Some(a), Some(b)) => a.dist(b),
            _ => 0.0,
        }
    };
    out.push(if chord > 0.0 { Some(path_len / chord) } else { None });

    // pressure family; finger devices that report a constant value carry no
    // pressure signal
    let pressures: Vec<f64> = session.all_samples().map(|s| s.pressure).collect();
    let p_max = pressures.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let p_min = pressures.iter().cloned().fold(f64::INFINITY, f64::min);
    let constant = (p_max - p_min) == 0.0;
    if pressures.is_empty() || (session.input == InputKind::Finger && constant) {
        out.extend(std::iter::repeat(None).take(5));
    } else {
        let (mean, std) = sample_mean_std(&pressures);
        out.push(Some(mean));
        out.push(Some(std));
        out.push(Some(p_max));
        out.push(Some(p_min));
        out.push(Some(p_max - p_min));
    }

    debug_assert_eq!(out.len(), GLOBAL_LEN);
    out
}

fn direction_octant(dir: f64) -> usize {
    let shifted = dir + std::f64::consts::PI; // (0, 2*pi]
    let bin = (shifted / (std::f64::consts::PI / 4.0)).floor() as isize;
    bin.clamp(0, 7) as usize
}

fn span(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if max.is_finite() && min.is_finite() {
        max - min
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Action, ChildId, Screen, Stroke, TestId, TouchSample};

    fn stroke(pointer_id: u32, pts: &[(i64, f64, f64, f64)]) -> Stroke {
        let n = pts.len();
        Stroke {
            pointer_id,
            samples: pts
                .iter()
                .enumerate()
                .map(|(i, &(t, x, y, pressure))| TouchSample {
                    t,
                    x,
                    y,
                    pressure,
                    pointer_id,
                    action: if i == 0 {
                        Action::Down
                    } else if i == n - 1 {
                        Action::Up
                    } else {
                        Action::Move
                    },
                })
                .collect(),
        }
    }

    fn session(strokes: Vec<Stroke>, input: InputKind) -> TestSession {
        TestSession {
            child_id: ChildId::new("c"),
            test_id: if input == InputKind::Finger {
                TestId::T1
            } else {
                TestId::T6
            },
            input,
            screen: Screen::default(),
            duration_ms: 10_000,
            strokes,
            targets: vec![],
            ui_states: vec![],
        }
    }

    #[test]
    fn constant_velocity_stroke_has_zero_speed_std() {
        let s = session(
            vec![stroke(
                0,
                &[
                    (0, 0.0, 0.0, 0.4),
                    (100, 10.0, 0.0, 0.5),
                    (200, 20.0, 0.0, 0.6),
                    (300, 30.0, 0.0, 0.5),
                ],
            )],
            InputKind::Stylus,
        );
        let v = values(&s);
        let speed_std = v[7].unwrap();
        assert!(speed_std.abs() < 1e-9);
        assert!((v[6].unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn two_strokes_gap_of_500ms() {
        let s = session(
            vec![
                stroke(0, &[(0, 0.0, 0.0, 0.5), (50, 1.0, 0.0, 0.5), (100, 2.0, 0.0, 0.5)]),
                stroke(0, &[(600, 0.0, 0.0, 0.5), (650, 1.0, 0.0, 0.5), (700, 2.0, 0.0, 0.5)]),
            ],
            InputKind::Stylus,
        );
        let v = values(&s);
        assert_eq!(v[4].unwrap(), 500.0);
        assert_eq!(v[1].unwrap(), 2.0);
    }

    #[test]
    fn empty_session_is_all_invalid() {
        let s = session(vec![], InputKind::Finger);
        assert!(values(&s).iter().all(Option::is_none));
    }

    #[test]
    fn constant_finger_pressure_invalidates_pressure_family() {
        let s = session(
            vec![stroke(
                0,
                &[(0, 0.0, 0.0, 1.0), (100, 5.0, 0.0, 1.0), (200, 9.0, 0.0, 1.0)],
            )],
            InputKind::Finger,
        );
        let v = values(&s);
        assert!(v[29..34].iter().all(Option::is_none));

        let s = session(
            vec![stroke(
                0,
                &[(0, 0.0, 0.0, 0.3), (100, 5.0, 0.0, 0.5), (200, 9.0, 0.0, 0.4)],
            )],
            InputKind::Stylus,
        );
        let v = values(&s);
        assert!((v[31].unwrap() - 0.5).abs() < 1e-12);
        assert!((v[33].unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn octants_cover_the_circle() {
        assert_eq!(direction_octant(-std::f64::consts::PI + 1e-9), 0);
        assert_eq!(direction_octant(0.1), 4);
        assert_eq!(direction_octant(std::f64::consts::PI), 7);
    }

    /// Brute-force recomputation of a few aggregates on a fixed fixture.
    #[test]
    fn aggregates_match_direct_recomputation() {
        let pts = [
            (0, 0.0, 0.0, 0.30),
            (40, 3.0, 1.0, 0.40),
            (80, 7.0, -1.0, 0.35),
            (120, 12.0, 2.0, 0.45),
            (160, 14.0, 6.0, 0.50),
        ];
        let s = session(vec![stroke(0, &pts)], InputKind::Stylus);
        let v = values(&s);

        let mut speeds = Vec::new();
        let mut path = 0.0;
        for w in pts.windows(2) {
            let d = ((w[1].1 - w[0].1).powi(2) + (w[1].2 - w[0].2).powi(2)).sqrt();
            let dt = (w[1].0 - w[0].0) as f64 / 1000.0;
            speeds.push(d / dt);
            path += d;
        }
        let mean_speed = speeds.iter().sum::<f64>() / speeds.len() as f64;
        assert!((v[6].unwrap() - mean_speed).abs() < 1e-9);
        assert!((v[24].unwrap() - path).abs() < 1e-9);

        let press: Vec<f64> = pts.iter().map(|p| p.3).collect();
        let mean_p = press.iter().sum::<f64>() / press.len() as f64;
        assert!((v[29].unwrap() - mean_p).abs() < 1e-12);
    }
}
