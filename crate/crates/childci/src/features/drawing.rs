//! Drawing-test features: the global family applied to the coloring session,
//! with the last slot replaced by the fraction of the tree interior covered.

use crate::model::{FeatureDef, Point, TargetKind, TestSession};

use super::global;

pub const DRAWING_LEN: usize = 34;

/// Raster resolution for coverage estimation.
pub const RASTER_SIZE: usize = 256;
/// Radius in screen pixels a single sample colors around itself.
pub const BRUSH_RADIUS_PX: f64 = 8.0;

pub fn defs() -> Vec<FeatureDef> {
    // The drawing set reuses the global family definitions under its own id
    // namespace; coverage replaces the final slot.
    let mut out = global::defs("t6", "drawing");
    out.truncate(DRAWING_LEN - 1);
    out.push(FeatureDef {
        id: "t6.coverage".into(),
        name: "Fraction of the tree interior coloured".into(),
        source: "drawing".into(),
    });
    out
}

pub fn values(session: &TestSession) -> Vec<Option<f64>> {
    if !session.strokes.iter().any(|s| s.samples.len() >= 3) {
        return vec![None; DRAWING_LEN];
    }
    let mut out = global::values(session);
    out.truncate(DRAWING_LEN - 1);
    out.push(coverage(session));
    out
}

/// Fraction of the tree-interior raster cells touched by the brush.
///
/// The interior is rasterized on a square grid over the outline's bounding
/// box; each touch sample colors every cell whose center lies within the
/// brush radius.
pub fn coverage(session: &TestSession) -> Option<f64> {
    let outline = session
        .targets_of(TargetKind::TreeOutline)
        .first()?
        .geometry
        .points()?
        .to_vec();
    if outline.len() < 3 {
        return None;
    }
    let min_x = outline.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let max_x = outline.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let min_y = outline.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = outline.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let w = max_x - min_x;
    let h = max_y - min_y;
    if w <= 0.0 || h <= 0.0 {
        return None;
    }
    let n = RASTER_SIZE;
    let cell_w = w / n as f64;
    let cell_h = h / n as f64;

    let cell_center = |ix: usize, iy: usize| {
        Point::new(
            min_x + (ix as f64 + 0.5) * cell_w,
            min_y + (iy as f64 + 0.5) * cell_h,
        )
    };

    let mut interior = vec![false; n * n];
    let mut interior_count = 0usize;
    for iy in 0..n {
        for ix in 0..n {
            if point_in_polygon(cell_center(ix, iy), &outline) {
                interior[iy * n + ix] = true;
                interior_count += 1;
            }
        }
    }
    if interior_count == 0 {
        return None;
    }

    let mut colored = vec![false; n * n];
    for sample in session.all_samples() {
        // only cells within the brush box need checking
        let x_lo = ((sample.x - BRUSH_RADIUS_PX - min_x) / cell_w).floor().max(0.0) as usize;
        let x_hi = (((sample.x + BRUSH_RADIUS_PX - min_x) / cell_w).ceil() as usize).min(n);
        let y_lo = ((sample.y - BRUSH_RADIUS_PX - min_y) / cell_h).floor().max(0.0) as usize;
        let y_hi = (((sample.y + BRUSH_RADIUS_PX - min_y) / cell_h).ceil() as usize).min(n);
        for iy in y_lo..y_hi {
            for ix in x_lo..x_hi {
                if !colored[iy * n + ix]
                    && sample.pos().dist(cell_center(ix, iy)) <= BRUSH_RADIUS_PX
                {
                    colored[iy * n + ix] = true;
                }
            }
        }
    }

    let covered = interior
        .iter()
        .zip(&colored)
        .filter(|(i, c)| **i && **c)
        .count();
    Some(covered as f64 / interior_count as f64)
}

/// Even-odd ray casting.
fn point_in_polygon(p: Point, polygon: &[Point]) -> bool {
    let mut inside = false;
    let n = polygon.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        Action, ChildId, InputKind, Screen, Stroke, TargetEvent, TargetGeometry, TestId,
        TouchSample,
    };

    fn rect_outline(x0: f64, y0: f64, x1: f64, y1: f64) -> TargetEvent {
        TargetEvent {
            t: 0,
            kind: TargetKind::TreeOutline,
            geometry: TargetGeometry::Points {
                points: vec![
                    Point::new(x0, y0),
                    Point::new(x1, y0),
                    Point::new(x1, y1),
                    Point::new(x0, y1),
                ],
            },
        }
    }

    /// Boustrophedon scribble over the top `frac` of a rectangle, rows spaced
    /// by the brush diameter so covered rows fill completely.
    fn scribble(x0: f64, y0: f64, x1: f64, y1: f64, frac: f64) -> Vec<Stroke> {
        let rows = ((y1 - y0) / (2.0 * BRUSH_RADIUS_PX)).ceil() as usize;
        let cover_rows = (rows as f64 * frac).round() as usize;
        let mut samples = Vec::new();
        let mut t = 0i64;
        for row in 0..cover_rows {
            let y = y0 + (row as f64 + 0.5) * 2.0 * BRUSH_RADIUS_PX;
            let n = 60;
            for i in 0..n {
                let f = i as f64 / (n - 1) as f64;
                let x = if row % 2 == 0 {
                    x0 + f * (x1 - x0)
                } else {
                    x1 - f * (x1 - x0)
                };
                samples.push(TouchSample {
                    t,
                    x,
                    y,
                    pressure: 0.3 + 0.01 * (i % 7) as f64,
                    pointer_id: 0,
                    action: Action::Move,
                });
                t += 16;
            }
        }
        if samples.is_empty() {
            return vec![];
        }
        samples.first_mut().unwrap().action = Action::Down;
        samples.last_mut().unwrap().action = Action::Up;
        vec![Stroke {
            pointer_id: 0,
            samples,
        }]
    }

    fn t6_session(strokes: Vec<Stroke>, targets: Vec<TargetEvent>) -> TestSession {
        let duration = strokes
            .last()
            .and_then(|s| s.samples.last())
            .map_or(1000, |s| s.t + 100);
        TestSession {
            child_id: ChildId::new("c"),
            test_id: TestId::T6,
            input: InputKind::Stylus,
            screen: Screen::default(),
            duration_ms: duration,
            strokes,
            targets,
            ui_states: vec![],
        }
    }

    #[test]
    fn fully_scribbled_rectangle_covers_everything() {
        let s = t6_session(
            scribble(100.0, 100.0, 400.0, 420.0, 1.0),
            vec![rect_outline(100.0, 100.0, 400.0, 420.0)],
        );
        let c = coverage(&s).unwrap();
        assert!(c > 0.97, "coverage {c}");
    }

    #[test]
    fn half_scribbled_rectangle_covers_half() {
        let s = t6_session(
            scribble(100.0, 100.0, 400.0, 420.0, 0.5),
            vec![rect_outline(100.0, 100.0, 400.0, 420.0)],
        );
        let c = coverage(&s).unwrap();
        assert!((c - 0.5).abs() < 0.02, "coverage {c}");
    }

    #[test]
    fn empty_session_is_all_invalid() {
        let s = t6_session(vec![], vec![rect_outline(0.0, 0.0, 100.0, 100.0)]);
        assert!(values(&s).iter().all(Option::is_none));
    }

    #[test]
    fn coverage_replaces_the_final_slot() {
        let d = defs();
        assert_eq!(d.len(), DRAWING_LEN);
        assert_eq!(d.last().unwrap().id, "t6.coverage");
        assert_eq!(d[0].id, "t6.duration_ms");
    }

    #[test]
    fn point_in_polygon_triangle() {
        let tri = [
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(5.0, 10.0),
        ];
        assert!(point_in_polygon(Point::new(5.0, 3.0), &tri));
        assert!(!point_in_polygon(Point::new(0.5, 8.0), &tri));
    }
}
