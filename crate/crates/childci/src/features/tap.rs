//! Tap-test features: accuracy of taps relative to the active mole plus the
//! number of distinct moles touched.

use crate::model::{FeatureDef, Point, TargetKind, TestSession};
use crate::signal::sample_mean_std;

pub const TAP_LEN: usize = 5;

/// Number of moles the test asks for; the touched count is capped here.
pub const MOLES_REQUIRED: usize = 4;

pub fn defs() -> Vec<FeatureDef> {
    let mk = |id: &str, name: &str| FeatureDef {
        id: format!("t1.{id}"),
        name: name.to_string(),
        source: "tap".to_string(),
    };
    vec![
        mk("tap_mole_dist_mean", "Average distance between tap and mole centre (px)"),
        mk("tap_mole_dist_std", "Std of distance between tap and mole centre (px)"),
        mk("tap_mole_dist_max", "Max distance between tap and mole centre (px)"),
        mk("tap_mole_dist_min", "Min distance between tap and mole centre (px)"),
        mk("moles_touched", "Number of distinct moles touched"),
    ]
}

/// Tap distances to the mole active at each tap, plus the distinct-mole touch
/// count. All-invalid when the session has no taps.
pub fn values(session: &TestSession) -> Vec<Option<f64>> {
    if session.strokes.is_empty() {
        return vec![None; TAP_LEN];
    }
    let moles: Vec<(i64, Point, f64)> = session
        .targets_of(TargetKind::MoleSpawn)
        .iter()
        .filter_map(|t| t.geometry.circle().map(|(c, r)| (t.t, c, r)))
        .collect();

    let mut dists = Vec::new();
    let mut touched = std::collections::BTreeSet::new();
    for stroke in &session.strokes {
        let tap = stroke.start();
        // the mole shown at tap time: the latest spawn not after the tap
        let active = moles
            .iter()
            .enumerate()
            .filter(|(_, m)| m.0 <= tap.t)
            .last();
        let Some((idx, &(_, center, radius))) = active else {
            continue;
        };
        let d = tap.pos().dist(center);
        dists.push(d);
        if d <= radius {
            touched.insert(idx);
        }
    }

    let mut out = vec![None; TAP_LEN];
    if !dists.is_empty() {
        let (mean, std) = sample_mean_std(&dists);
        out[0] = Some(mean);
        out[1] = Some(std);
        out[2] = Some(dists.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        out[3] = Some(dists.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    out[4] = Some(touched.len().min(MOLES_REQUIRED) as f64);
    out
}

/// Distinct moles touched (uncapped), used by the completion rule.
pub fn moles_touched(session: &TestSession) -> usize {
    let moles: Vec<(i64, Point, f64)> = session
        .targets_of(TargetKind::MoleSpawn)
        .iter()
        .filter_map(|t| t.geometry.circle().map(|(c, r)| (t.t, c, r)))
        .collect();
    let mut touched = std::collections::BTreeSet::new();
    for stroke in &session.strokes {
        let tap = stroke.start();
        if let Some((idx, &(_, center, radius))) = moles
            .iter()
            .enumerate()
            .filter(|(_, m)| m.0 <= tap.t)
            .last()
        {
            if tap.pos().dist(center) <= radius {
                touched.insert(idx);
            }
        }
    }
    touched.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        Action, ChildId, InputKind, Screen, Stroke, TargetEvent, TargetGeometry, TestId,
        TouchSample,
    };

    fn tap_at(t: i64, x: f64, y: f64) -> Stroke {
        Stroke {
            pointer_id: 0,
            samples: vec![
                TouchSample { t, x, y, pressure: 0.5, pointer_id: 0, action: Action::Down },
                TouchSample { t: t + 40, x, y, pressure: 0.5, pointer_id: 0, action: Action::Up },
            ],
        }
    }

    fn mole(t: i64, x: f64, y: f64, radius: f64) -> TargetEvent {
        TargetEvent {
            t,
            kind: TargetKind::MoleSpawn,
            geometry: TargetGeometry::Circle {
                center: Point::new(x, y),
                radius,
            },
        }
    }

    fn t1_session(strokes: Vec<Stroke>, targets: Vec<TargetEvent>) -> TestSession {
        TestSession {
            child_id: ChildId::new("c"),
            test_id: TestId::T1,
            input: InputKind::Finger,
            screen: Screen::default(),
            duration_ms: 20_000,
            strokes,
            targets,
            ui_states: vec![],
        }
    }

    #[test]
    fn perfect_taps_on_four_moles() {
        let targets = vec![
            mole(0, 100.0, 100.0, 60.0),
            mole(1000, 300.0, 100.0, 60.0),
            mole(2000, 500.0, 100.0, 60.0),
            mole(3000, 700.0, 100.0, 60.0),
        ];
        let strokes = vec![
            tap_at(500, 100.0, 100.0),
            tap_at(1500, 300.0, 100.0),
            tap_at(2500, 500.0, 100.0),
            tap_at(3500, 700.0, 100.0),
        ];
        let v = values(&t1_session(strokes, targets));
        assert_eq!(v[0], Some(0.0));
        assert_eq!(v[1], Some(0.0));
        assert_eq!(v[2], Some(0.0));
        assert_eq!(v[3], Some(0.0));
        assert_eq!(v[4], Some(4.0));
    }

    #[test]
    fn single_tap_stats() {
        let targets = vec![mole(0, 100.0, 100.0, 60.0)];
        let v = values(&t1_session(vec![tap_at(500, 110.0, 100.0)], targets));
        assert_eq!(v[0], Some(10.0));
        assert_eq!(v[1], Some(0.0));
        assert_eq!(v[2], Some(10.0));
        assert_eq!(v[3], Some(10.0));
        assert_eq!(v[4], Some(1.0));
    }

    #[test]
    fn mixed_distances_with_small_radius() {
        // taps at distances {5, 5, 15}, radius 10: two moles hit
        let targets = vec![
            mole(0, 100.0, 100.0, 10.0),
            mole(1000, 300.0, 100.0, 10.0),
            mole(2000, 500.0, 100.0, 10.0),
        ];
        let strokes = vec![
            tap_at(500, 105.0, 100.0),
            tap_at(1500, 305.0, 100.0),
            tap_at(2500, 515.0, 100.0),
        ];
        let v = values(&t1_session(strokes, targets));
        let (mean, std) = sample_mean_std(&[5.0, 5.0, 15.0]);
        assert!((v[0].unwrap() - mean).abs() < 1e-9);
        assert!((v[1].unwrap() - std).abs() < 1e-9);
        assert_eq!(v[4], Some(2.0));
    }

    #[test]
    fn no_taps_is_all_invalid() {
        let v = values(&t1_session(vec![], vec![mole(0, 1.0, 1.0, 60.0)]));
        assert!(v.iter().all(Option::is_none));
    }

    #[test]
    fn taps_before_first_mole_are_ignored() {
        let targets = vec![mole(1000, 100.0, 100.0, 60.0)];
        let strokes = vec![tap_at(200, 100.0, 100.0), tap_at(1500, 100.0, 100.0)];
        let v = values(&t1_session(strokes, targets));
        assert_eq!(v[0], Some(0.0));
        assert_eq!(v[4], Some(1.0));
    }
}
