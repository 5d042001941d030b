//! Spiral-test features: drawn path statistics, response time, and the full
//! battery of radial-series statistics around the reference spiral center.

use crate::model::{FeatureDef, Point, TargetKind, TestSession};
use crate::signal::{
    amplitude_stats, crossings_and_slope_changes, extrema_summary, higuchi_fd,
    radial_difference_rates, radial_transform, sample_entropy, sample_mean_std,
};

pub const SPIRAL_LEN: usize = 24;

pub const SAMPLE_ENTROPY_M: usize = 3;
pub const SAMPLE_ENTROPY_R: f64 = 0.2;
pub const HIGUCHI_KMAX: usize = 5;
/// Minimum concatenated samples for the extractor to produce anything.
pub const MIN_SAMPLES: usize = 10;

pub fn defs() -> Vec<FeatureDef> {
    let mk = |id: &str, name: &str| FeatureDef {
        id: format!("t5.{id}"),
        name: name.to_string(),
        source: "spiral".to_string(),
    };
    vec![
        mk("spiral_length", "Drawn spiral length (px)"),
        mk("point_dist_mean", "Average distance between consecutive points (px)"),
        mk("point_dist_std", "Std of distance between consecutive points (px)"),
        mk("response_time_s", "Response time until the first pen down (s)"),
        mk("sentropy", "Sample entropy of R (m=3, r=0.2*std)"),
        mk("mav", "Mean absolute value of R"),
        mk("var", "Variance of R"),
        mk("rms", "Root mean square of R (square root applied)"),
        mk("log_det", "Log detector of R"),
        mk("wl", "Waveform length of R"),
        mk("std", "Standard deviation of R"),
        mk("acc", "Difference absolute standard deviation of R"),
        mk("higuchi_fd", "Higuchi fractal dimension of R (kmax=5)"),
        mk("mfl", "Maximum fractal length of R"),
        mk("iemg", "Integrated absolute sum of R"),
        mk("ssi", "Simple square integral of R"),
        mk("zc", "Mean crossings of R"),
        mk("ssc", "Slope sign changes of R"),
        mk("radial_diff_per_radian", "Mean absolute radial difference per radian"),
        mk("radial_diff_per_second", "Mean absolute radial difference per second"),
        mk("n_max", "Local maxima count in R"),
        mk("n_min", "Local minima count in R"),
        mk("q_max", "Index quartile of the global maximum of R"),
        mk("q_min", "Index quartile of the global minimum of R"),
    ]
}

/// Center of the reference spiral: the first vertex of the spiral polyline
/// (the test draws from the inner part outwards).
pub fn spiral_center(session: &TestSession) -> Option<Point> {
    session
        .targets_of(TargetKind::SpiralRef)
        .first()
        .and_then(|t| t.geometry.points())
        .and_then(|pts| pts.first().copied())
}

/// Outer endpoint of the reference spiral polyline.
pub fn spiral_endpoint(session: &TestSession) -> Option<Point> {
    session
        .targets_of(TargetKind::SpiralRef)
        .first()
        .and_then(|t| t.geometry.points())
        .and_then(|pts| pts.last().copied())
}

pub fn values(session: &TestSession) -> Vec<Option<f64>> {
    let total_samples: usize = session.strokes.iter().map(|s| s.samples.len()).sum();
    if total_samples < MIN_SAMPLES {
        return vec![None; SPIRAL_LEN];
    }
    let mut out = vec![None; SPIRAL_LEN];

    // within-stroke consecutive distances; pen-up jumps are not drawn
    let mut dists = Vec::new();
    for stroke in &session.strokes {
        for w in stroke.samples.windows(2) {
            dists.push(w[0].pos().dist(w[1].pos()));
        }
    }
    if !dists.is_empty() {
        let (mean, std) = sample_mean_std(&dists);
        out[0] = Some(dists.iter().sum());
        out[1] = Some(mean);
        out[2] = Some(std);
    }
    out[3] = session
        .strokes
        .first()
        .map(|s| s.start().t as f64 / 1000.0);

    let Some(center) = spiral_center(session) else {
        return out;
    };
    let points: Vec<Point> = session.all_samples().map(|s| s.pos()).collect();
    let times: Vec<i64> = session.all_samples().map(|s| s.t).collect();
    let Ok(rs) = radial_transform(&points, center, &times) else {
        return out;
    };

    out[4] = sample_entropy(&rs.r, SAMPLE_ENTROPY_M, SAMPLE_ENTROPY_R).ok();
    if let Ok(a) = amplitude_stats(&rs.r) {
        out[5] = Some(a.mav);
        out[6] = Some(a.var);
        out[7] = Some(a.rms);
        out[8] = Some(a.log_det);
        out[9] = Some(a.wl);
        out[10] = Some(a.std);
        out[11] = Some(a.acc);
        out[13] = Some(a.mfl).filter(|v| v.is_finite());
        out[14] = Some(a.iemg);
        out[15] = Some(a.ssi);
    }
    out[12] = higuchi_fd(&rs.r, HIGUCHI_KMAX).ok();
    if let Ok((zc, ssc)) = crossings_and_slope_changes(&rs.r) {
        out[16] = Some(zc as f64);
        out[17] = Some(ssc as f64);
    }
    if let Ok((per_rad, per_sec)) = radial_difference_rates(&rs) {
        out[18] = Some(per_rad);
        out[19] = Some(per_sec);
    }
    if let Ok(e) = extrema_summary(&rs.r) {
        out[20] = Some(e.n_max as f64);
        out[21] = Some(e.n_min as f64);
        out[22] = Some(e.q_max as f64);
        out[23] = Some(e.q_min as f64);
    }
    out
}
