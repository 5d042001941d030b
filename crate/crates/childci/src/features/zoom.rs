//! Zoom features, shared by the zoom-in and zoom-out tests: target dwell
//! time, two-finger reaction, scale statistics, and per-finger trajectory
//! aggregates over the first two-pointer episode.

use crate::model::{FeatureDef, Point, Stroke, TestSession};
use crate::signal::{path_and_chord, sample_mean_std};

pub const ZOOM_LEN: usize = 20;

pub fn defs() -> Vec<FeatureDef> {
    let mk = |id: &str, name: &str| FeatureDef {
        id: format!("zoom.{id}"),
        name: name.to_string(),
        source: "zoom".to_string(),
    };
    vec![
        mk("time_on_target_ms", "Total time on target (ms)"),
        mk("reaction_two_fingers_ms", "Reaction time until using 2 fingers (ms)"),
        mk("scale_max", "Maximum scale"),
        mk("scale_min", "Minimum scale"),
        mk("scale_mean", "Average scale"),
        mk("scale_std", "Std of scale"),
        mk("samples_two_fingers", "Samples using 2 fingers"),
        mk("samples_one_finger", "Samples using 1 finger"),
        mk("fc_vx_mean", "Average x velocity of the first finger curve (px/s)"),
        mk("fc_vy_mean", "Average y velocity of the first finger curve (px/s)"),
        mk("sc_vx_mean", "Average x velocity of the second finger curve (px/s)"),
        mk("sc_vy_mean", "Average y velocity of the second finger curve (px/s)"),
        mk("fc_path_len", "First finger curve trajectory length (px)"),
        mk("sc_path_len", "Second finger curve trajectory length (px)"),
        mk("fc_traj_velocity", "First finger curve trajectory velocity (px/s)"),
        mk("sc_traj_velocity", "Second finger curve trajectory velocity (px/s)"),
        mk("start_finger_dist", "Inter-finger distance at first two-finger instant (px)"),
        mk("stop_finger_dist", "Inter-finger distance at last two-finger instant (px)"),
        mk("fc_chord_len", "First finger curve straight length (px)"),
        mk("sc_chord_len", "Second finger curve straight length (px)"),
    ]
}

/// The first episode where two different pointers are down simultaneously.
/// `fc` is the finger that went down first.
struct TwoFingerEpisode<'a> {
    fc: &'a Stroke,
    sc: &'a Stroke,
    overlap_start: i64,
    overlap_end: i64,
}

fn first_episode(session: &TestSession) -> Option<TwoFingerEpisode<'_>> {
    let strokes: Vec<&Stroke> = session
        .strokes
        .iter()
        .filter(|s| !s.samples.is_empty())
        .collect();
    let mut best: Option<TwoFingerEpisode<'_>> = None;
    for (i, a) in strokes.iter().enumerate() {
        for b in &strokes[i + 1..] {
            if a.pointer_id == b.pointer_id {
                continue;
            }
            let start = a.start().t.max(b.start().t);
            let end = a.end().t.min(b.end().t);
            if start > end {
                continue;
            }
            if best.as_ref().is_none_or(|e| start < e.overlap_start) {
                let (fc, sc) = if (a.start().t, a.pointer_id) <= (b.start().t, b.pointer_id) {
                    (*a, *b)
                } else {
                    (*b, *a)
                };
                best = Some(TwoFingerEpisode {
                    fc,
                    sc,
                    overlap_start: start,
                    overlap_end: end,
                });
            }
        }
    }
    best
}

/// Position of a stroke's pointer at time `t` (last sample not after `t`).
fn position_at(stroke: &Stroke, t: i64) -> Point {
    stroke
        .samples
        .iter()
        .take_while(|s| s.t <= t)
        .last()
        .unwrap_or(stroke.start())
        .pos()
}

/// Scale trajectory: the app-reported ui scale when present, otherwise the
/// inter-finger distance normalized by its value at the first two-finger
/// sample, so raw-only logs remain usable.
fn scale_series(session: &TestSession, episode: Option<&TwoFingerEpisode<'_>>) -> Option<Vec<f64>> {
    if !session.ui_states.is_empty() {
        return Some(session.ui_states.iter().map(|u| u.scale).collect());
    }
    let ep = episode?;
    let mut times: Vec<i64> = vec![ep.overlap_start];
    for s in ep.fc.samples.iter().chain(&ep.sc.samples) {
        if s.t >= ep.overlap_start && s.t <= ep.overlap_end {
            times.push(s.t);
        }
    }
    times.sort_unstable();
    times.dedup();
    let d0 = position_at(ep.fc, times[0]).dist(position_at(ep.sc, times[0]));
    if d0 <= 0.0 {
        return None;
    }
    Some(
        times
            .iter()
            .map(|&t| position_at(ep.fc, t).dist(position_at(ep.sc, t)) / d0)
            .collect(),
    )
}

/// Sum of intervals spent on target according to the ui state stream; an
/// open trailing interval extends to the session end.
pub fn time_on_target_ms(session: &TestSession) -> Option<i64> {
    if session.ui_states.is_empty() {
        return None;
    }
    let mut total = 0i64;
    for w in session.ui_states.windows(2) {
        if w[0].on_target {
            total += w[1].t - w[0].t;
        }
    }
    if session.ui_states.last().unwrap().on_target {
        total += session.duration_ms - session.ui_states.last().unwrap().t;
    }
    Some(total)
}

/// Length of the longest contiguous on-target run, for the completion rule.
pub fn longest_on_target_run_ms(session: &TestSession) -> i64 {
    let mut longest = 0i64;
    let mut run_start: Option<i64> = None;
    for u in &session.ui_states {
        match (u.on_target, run_start) {
            (true, None) => run_start = Some(u.t),
            (false, Some(start)) => {
                longest = longest.max(u.t - start);
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(start) = run_start {
        longest = longest.max(session.duration_ms - start);
    }
    longest
}

fn mean_component_velocity(stroke: &Stroke, component: impl Fn(&Point, &Point) -> f64) -> Option<f64> {
    let mut vals = Vec::new();
    for w in stroke.samples.windows(2) {
        let dt = (w[1].t - w[0].t) as f64 / 1000.0;
        if dt > 0.0 {
            vals.push(component(&w[0].pos(), &w[1].pos()) / dt);
        }
    }
    if vals.is_empty() {
        None
    } else {
        Some(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

pub fn values(session: &TestSession) -> Vec<Option<f64>> {
    let mut out = vec![None; ZOOM_LEN];
    let episode = first_episode(session);

    out[0] = time_on_target_ms(session).map(|v| v as f64);
    out[1] = episode.as_ref().map(|e| e.overlap_start as f64);

    if let Some(scales) = scale_series(session, episode.as_ref()) {
        if !scales.is_empty() {
            let (mean, std) = sample_mean_std(&scales);
            out[2] = Some(scales.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            out[3] = Some(scales.iter().cloned().fold(f64::INFINITY, f64::min));
            out[4] = Some(mean);
            out[5] = Some(std);
        }
    }

    // samples by number of simultaneously active pointers
    let spans: Vec<(i64, i64)> = session
        .strokes
        .iter()
        .filter(|s| !s.samples.is_empty())
        .map(|s| (s.start().t, s.end().t))
        .collect();
    let mut two = 0usize;
    let mut one = 0usize;
    for sample in session.all_samples() {
        let active = spans
            .iter()
            .filter(|(a, b)| *a <= sample.t && sample.t <= *b)
            .count();
        if active >= 2 {
            two += 1;
        } else {
            one += 1;
        }
    }
    out[6] = Some(two as f64);
    out[7] = Some(one as f64);

    if let Some(ep) = &episode {
        out[8] = mean_component_velocity(ep.fc, |a, b| b.x - a.x);
        out[9] = mean_component_velocity(ep.fc, |a, b| b.y - a.y);
        out[10] = mean_component_velocity(ep.sc, |a, b| b.x - a.x);
        out[11] = mean_component_velocity(ep.sc, |a, b| b.y - a.y);
        for (slot, stroke) in [(12usize, ep.fc), (13, ep.sc)] {
            if let Ok((path, chord)) = path_and_chord(&stroke.points()) {
                out[slot] = Some(path);
                out[slot + 6] = Some(chord); // 18, 19
                let dur_s = stroke.duration_ms() as f64 / 1000.0;
                out[slot + 2] = if dur_s > 0.0 { Some(path / dur_s) } else { None };
            }
        }
        let d_start = position_at(ep.fc, ep.overlap_start).dist(position_at(ep.sc, ep.overlap_start));
        let d_stop = position_at(ep.fc, ep.overlap_end).dist(position_at(ep.sc, ep.overlap_end));
        out[16] = Some(d_start);
        out[17] = Some(d_stop);
    }
    out
}
