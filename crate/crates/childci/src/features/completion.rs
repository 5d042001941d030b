//! Test-completion rules and the per-age completion-rate table.

use serde::{Deserialize, Serialize};

use crate::ingest::Dataset;
use crate::model::{TestId, TestSession};

use super::{drag, drawing, spiral, tap, zoom};

/// Dwell required on target for the zoom tests to count as completed.
pub const ZOOM_DWELL_MS: i64 = 500;
/// Display line width of the reference spiral; the end region spans twice it.
pub const SPIRAL_LINE_WIDTH_PX: f64 = 8.0;
/// Fraction of the tree surface that must be coloured.
pub const COVERAGE_THRESHOLD: f64 = 0.70;

/// Whether the session fulfilled its test objective.
pub fn completion_flag(session: &TestSession) -> bool {
    match session.test_id {
        TestId::T1 => tap::moles_touched(session) >= tap::MOLES_REQUIRED,
        TestId::T2 => drag::carrot_ends_in_rabbit(session) == Some(true),
        TestId::T3 | TestId::T4 => zoom::longest_on_target_run_ms(session) >= ZOOM_DWELL_MS,
        TestId::T5 => {
            let Some(end) = spiral::spiral_endpoint(session) else {
                return false;
            };
            session
                .all_samples()
                .any(|s| s.pos().dist(end) <= 2.0 * SPIRAL_LINE_WIDTH_PX)
        }
        TestId::T6 => drawing::coverage(session).is_some_and(|c| c >= COVERAGE_THRESHOLD),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRow {
    pub age_years: i64,
    pub test_id: TestId,
    pub completed_fraction: f64,
    pub n_children: usize,
}

/// Completion fractions per (age in years, test).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionTable {
    pub rows: Vec<CompletionRow>,
}

impl CompletionTable {
    pub fn fraction(&self, age_years: i64, test_id: TestId) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.age_years == age_years && r.test_id == test_id)
            .map(|r| r.completed_fraction)
    }
}

/// Fraction of children at each age (in whole years) completing each test.
/// Children missing a test are excluded from that cell.
pub fn completion_report(dataset: &Dataset) -> CompletionTable {
    use std::collections::BTreeMap;
    let mut cells: BTreeMap<(i64, TestId), (usize, usize)> = BTreeMap::new();
    for subject in &dataset.subjects {
        let age_years = subject.age_months() / 12;
        for (test, session) in subject.sessions() {
            let cell = cells.entry((age_years, *test)).or_insert((0, 0));
            cell.1 += 1;
            if completion_flag(session) {
                cell.0 += 1;
            }
        }
    }
    CompletionTable {
        rows: cells
            .into_iter()
            .map(|((age_years, test_id), (done, total))| CompletionRow {
                age_years,
                test_id,
                completed_fraction: done as f64 / total as f64,
                n_children: total,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        Action, ChildId, InputKind, Point, Screen, Stroke, TargetEvent, TargetGeometry,
        TouchSample, UiStateEvent,
    };

    fn tap(t: i64, x: f64, y: f64) -> Stroke {
        Stroke {
            pointer_id: 0,
            samples: vec![
                TouchSample { t, x, y, pressure: 0.5, pointer_id: 0, action: Action::Down },
                TouchSample { t: t + 30, x, y, pressure: 0.5, pointer_id: 0, action: Action::Up },
            ],
        }
    }

    fn base_session(test_id: TestId) -> TestSession {
        TestSession {
            child_id: ChildId::new("c"),
            test_id,
            input: test_id.input(),
            screen: Screen::default(),
            duration_ms: 20_000,
            strokes: vec![],
            targets: vec![],
            ui_states: vec![],
        }
    }

    #[test]
    fn t1_completes_with_four_moles() {
        let mut s = base_session(TestId::T1);
        for i in 0..4 {
            s.targets.push(TargetEvent {
                t: i * 1000,
                kind: crate::model::TargetKind::MoleSpawn,
                geometry: TargetGeometry::Circle {
                    center: Point::new(100.0 + 150.0 * i as f64, 200.0),
                    radius: 60.0,
                },
            });
            s.strokes.push(tap(i * 1000 + 400, 100.0 + 150.0 * i as f64, 200.0));
        }
        assert!(completion_flag(&s));
        s.strokes.pop();
        assert!(!completion_flag(&s));
    }

    #[test]
    fn t3_requires_dwell() {
        let mut s = base_session(TestId::T3);
        s.ui_states = vec![
            UiStateEvent { t: 1000, scale: 1.8, on_target: true },
            UiStateEvent { t: 1400, scale: 1.9, on_target: false },
        ];
        assert!(!completion_flag(&s)); // 400 ms < dwell
        s.ui_states[1].t = 1600;
        assert!(completion_flag(&s));
    }

    #[test]
    fn t3_without_two_finger_samples_is_incomplete() {
        let s = base_session(TestId::T3);
        assert!(!completion_flag(&s));
    }

    #[test]
    fn t5_requires_reaching_the_end_region() {
        let mut s = base_session(TestId::T5);
        s.targets.push(TargetEvent {
            t: 0,
            kind: crate::model::TargetKind::SpiralRef,
            geometry: TargetGeometry::Points {
                points: vec![Point::new(640.0, 400.0), Point::new(866.0, 400.0)],
            },
        });
        s.strokes.push(tap(500, 700.0, 400.0));
        assert!(!completion_flag(&s));
        s.strokes.push(tap(900, 860.0, 400.0)); // within 16 px of the endpoint
        assert!(completion_flag(&s));
    }

    #[test]
    fn report_counts_fractions_per_age_and_test() {
        use std::collections::BTreeMap;
        let mut s1 = base_session(TestId::T3);
        s1.child_id = ChildId::new("a");
        s1.ui_states = vec![UiStateEvent { t: 1000, scale: 2.0, on_target: true }];
        let mut s2 = base_session(TestId::T3);
        s2.child_id = ChildId::new("b");

        let mk = |id: &str, age, session: TestSession| {
            let mut map = BTreeMap::new();
            map.insert(TestId::T3, session);
            crate::model::SubjectRecord::new(ChildId::new(id), age, map).unwrap()
        };
        let dataset = Dataset {
            subjects: vec![mk("a", 30, s1), mk("b", 30, s2)],
            provenance: crate::ingest::Provenance {
                source: "test".into(),
                schema: "childci/1".into(),
            },
        };
        let table = completion_report(&dataset);
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].age_years, 2);
        assert_eq!(table.rows[0].n_children, 2);
        assert!((table.rows[0].completed_fraction - 0.5).abs() < 1e-12);
    }
}
