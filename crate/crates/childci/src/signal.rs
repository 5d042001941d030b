//! Reusable numerical primitives over strokes and 1-D series: kinematics,
//! largest-deviation-point geometry, the radial spiral transform, and the
//! amplitude/entropy/fractal statistics used by the spiral features.
//!
//! All angle math is in radians and all rates in px/s. Operations here are
//! pure functions and safe to call from parallel workers.

use crate::error::{Error, Result};
use crate::model::{Point, Stroke};

/// Per-sample speed (px/s) and movement direction (radians) of a stroke.
///
/// The last sample copies the previous values so both vectors have one entry
/// per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicProfile {
    pub speed: Vec<f64>,
    pub direction: Vec<f64>,
}

/// Radial representation of a trajectory around a fixed center.
///
/// `theta` is the cumulative signed angle (unwrapped, may exceed 2π) and `t`
/// is in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSeries {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub t: Vec<f64>,
}

impl RadialSeries {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// The sample of a stroke farthest (perpendicular) from its start-stop chord.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdpResult {
    pub index: usize,
    /// Perpendicular distance to the chord, in pixels.
    pub size: f64,
    /// Instantaneous speed at that sample, px/s.
    pub velocity: f64,
}

/// Amplitude-domain statistics of a 1-D series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeStats {
    pub mav: f64,
    pub var: f64,
    pub rms: f64,
    pub log_det: f64,
    pub wl: f64,
    pub std: f64,
    pub acc: f64,
    pub mfl: f64,
    pub iemg: f64,
    pub ssi: f64,
}

/// Counts of strict local extrema plus the index-quartile of the global
/// extrema of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtremaSummary {
    pub n_max: usize,
    pub n_min: usize,
    /// 1..=4: which quarter of the index range holds the global maximum.
    pub q_max: u8,
    pub q_min: u8,
}

/// Sample mean and standard deviation (N-1 denominator; std is 0 when fewer
/// than two values).
pub fn sample_mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let w = a.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w - two_pi
    } else {
        w
    }
}

/// Per-sample speed and direction of a stroke.
///
/// Speed between duplicate timestamps is defined as 0 rather than infinite;
/// raw logs may repeat timestamps at device resolution.
pub fn kinematic_profile(stroke: &Stroke) -> Result<KinematicProfile> {
    let s = &stroke.samples;
    if s.len() < 2 {
        return Err(Error::StrokeTooShort {
            got: s.len(),
            need: 2,
        });
    }
    let n = s.len();
    let mut speed = Vec::with_capacity(n);
    let mut direction = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let dx = s[i + 1].x - s[i].x;
        let dy = s[i + 1].y - s[i].y;
        let dt = (s[i + 1].t - s[i].t) as f64 / 1000.0;
        let dist = dx.hypot(dy);
        speed.push(if dt > 0.0 { dist / dt } else { 0.0 });
        direction.push(dy.atan2(dx));
    }
    speed.push(speed[n - 2]);
    direction.push(direction[n - 2]);
    Ok(KinematicProfile { speed, direction })
}

/// Total polyline length and the straight start-to-stop distance.
pub fn path_and_chord(points: &[Point]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::SeriesTooShort {
            got: points.len(),
            need: 2,
        });
    }
    let path = points.windows(2).map(|w| w[0].dist(w[1])).sum();
    let chord = points[0].dist(points[points.len() - 1]);
    Ok((path, chord))
}

/// Index and perpendicular distance of the interior point farthest from the
/// start-stop chord. Ties break to the earliest index; when start == stop,
/// distances are measured to that single point.
pub fn chord_deviation(points: &[Point]) -> Result<(usize, f64)> {
    if points.len() < 3 {
        return Err(Error::SeriesTooShort {
            got: points.len(),
            need: 3,
        });
    }
    let start = points[0];
    let stop = points[points.len() - 1];
    let chord = stop.dist(start);
    let mut best = (1usize, f64::NEG_INFINITY);
    for (i, p) in points.iter().enumerate().take(points.len() - 1).skip(1) {
        let d = if chord == 0.0 {
            p.dist(start)
        } else {
            let cross = (stop.x - start.x) * (p.y - start.y) - (stop.y - start.y) * (p.x - start.x);
            cross.abs() / chord
        };
        if d > best.1 {
            best = (i, d);
        }
    }
    Ok(best)
}

/// Largest Deviation Point of a stroke: position of the maximum perpendicular
/// deviation plus the instantaneous speed there.
pub fn largest_deviation_point(stroke: &Stroke) -> Result<LdpResult> {
    let points = stroke.points();
    let (index, size) = chord_deviation(&points)?;
    let profile = kinematic_profile(stroke)?;
    Ok(LdpResult {
        index,
        size,
        velocity: profile.speed[index],
    })
}

/// Expresses a trajectory as radial distance and unwrapped angle around a
/// center. Angular steps for points coincident with the center contribute 0.
pub fn radial_transform(points: &[Point], center: Point, times_ms: &[i64]) -> Result<RadialSeries> {
    if points.is_empty() {
        return Err(Error::EmptyInput("radial_transform points"));
    }
    if points.len() != times_ms.len() {
        return Err(Error::DimensionMismatch {
            got: times_ms.len(),
            expected: points.len(),
        });
    }
    let mut r = Vec::with_capacity(points.len());
    let mut theta = Vec::with_capacity(points.len());
    let raw_angle = |p: &Point| (p.y - center.y).atan2(p.x - center.x);

    r.push(points[0].dist(center));
    let mut prev_raw = raw_angle(&points[0]);
    theta.push(prev_raw);
    for p in &points[1..] {
        let dist = p.dist(center);
        r.push(dist);
        let prev_theta = *theta.last().unwrap();
        if dist == 0.0 {
            theta.push(prev_theta);
        } else {
            let raw = raw_angle(p);
            theta.push(prev_theta + wrap_angle(raw - prev_raw));
            prev_raw = raw;
        }
    }
    let t = times_ms.iter().map(|&ms| ms as f64 / 1000.0).collect();
    Ok(RadialSeries { r, theta, t })
}

/// Amplitude statistics of a series (MAV, VAR, RMS, LOG, WL, STD, ACC, MFL,
/// IEMG, SSI).
///
/// The log detector floors |x| at machine epsilon since the formula is
/// undefined at 0. MFL is -inf for a constant series (WL = 0).
pub fn amplitude_stats(series: &[f64]) -> Result<AmplitudeStats> {
    let n = series.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { got: n, need: 2 });
    }
    let nf = n as f64;
    let mav = series.iter().map(|x| x.abs()).sum::<f64>() / nf;
    let mean = series.iter().sum::<f64>() / nf;
    let var = series.iter().map(|x| (x - mean).abs().powi(2)).sum::<f64>() / (nf - 1.0);
    let rms = (series.iter().map(|x| x * x).sum::<f64>() / nf).sqrt();
    let log_det = (series
        .iter()
        .map(|x| x.abs().max(f64::EPSILON).ln())
        .sum::<f64>()
        / nf)
        .exp();
    let wl = series.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
    let acc = (series
        .windows(2)
        .map(|w| (w[1] - w[0]).abs().powi(2))
        .sum::<f64>()
        / (nf - 1.0))
        .sqrt();
    Ok(AmplitudeStats {
        mav,
        var,
        rms,
        log_det,
        wl,
        std: var.sqrt(),
        acc,
        mfl: wl.ln(),
        iemg: series.iter().map(|x| x.abs()).sum::<f64>(),
        ssi: series.iter().map(|x| x * x).sum::<f64>(),
    })
}

/// Raw template match counts behind [`sample_entropy`]: pairs matching at
/// length `m` (B) and at length `m + 1` (A), Chebyshev distance, self-matches
/// excluded.
pub fn sample_entropy_counts(series: &[f64], m: usize, r: f64) -> Result<(u64, u64)> {
    let n = series.len();
    if n < m + 2 {
        return Err(Error::SeriesTooShort { got: n, need: m + 2 });
    }
    let count = n - m; // templates that exist at both lengths
    let mut a = 0u64;
    let mut b = 0u64;
    for i in 0..count {
        for j in i + 1..count {
            let mut max_d = 0.0f64;
            for k in 0..m {
                let d = (series[i + k] - series[j + k]).abs();
                if d > max_d {
                    max_d = d;
                }
            }
            if max_d <= r {
                b += 1;
                if (series[i + m] - series[j + m]).abs().max(max_d) <= r {
                    a += 1;
                }
            }
        }
    }
    Ok((a, b))
}

/// Sample entropy with template length `m` and tolerance `r_frac` times the
/// sample standard deviation.
///
/// When no templates match at either length the value is capped at
/// ln(B_max) with B_max = (N-m-1)(N-m)/2, keeping the function total.
pub fn sample_entropy(series: &[f64], m: usize, r_frac: f64) -> Result<f64> {
    let (_, std) = sample_mean_std(series);
    let r = r_frac * std;
    let (a, b) = sample_entropy_counts(series, m, r)?;
    let n = series.len();
    let b_max = ((n - m - 1) * (n - m) / 2) as f64;
    if a == 0 || b == 0 {
        Ok(b_max.ln())
    } else {
        Ok(-((a as f64 / b as f64).ln()))
    }
}

/// Higuchi fractal dimension: slope of ln L(k) against ln(1/k) for
/// k = 1..=kmax with Higuchi's curve-length normalization.
pub fn higuchi_fd(series: &[f64], kmax: usize) -> Result<f64> {
    let n = series.len();
    if kmax < 2 {
        return Err(Error::InvalidConfig("higuchi kmax must be >= 2".into()));
    }
    if n < 2 * kmax {
        return Err(Error::SeriesTooShort {
            got: n,
            need: 2 * kmax,
        });
    }
    let mut xs = Vec::with_capacity(kmax);
    let mut ys = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut total = 0.0;
        let mut count = 0usize;
        for m in 0..k {
            let steps = (n - 1 - m) / k;
            if steps == 0 {
                continue;
            }
            let mut length = 0.0;
            for j in 1..=steps {
                length += (series[m + j * k] - series[m + (j - 1) * k]).abs();
            }
            // Higuchi normalization: rescale to the full series length, then
            // divide by k once more.
            length = length * (n - 1) as f64 / (steps * k) as f64 / k as f64;
            total += length;
            count += 1;
        }
        if count == 0 {
            continue;
        }
        let lk = total / count as f64;
        if lk > 0.0 && lk.is_finite() {
            xs.push((1.0 / k as f64).ln());
            ys.push(lk.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::EmptyInput("higuchi: degenerate series"));
    }
    Ok(linear_slope(&xs, &ys))
}

/// Least-squares slope of y against x.
fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Mean crossings and slope sign changes of a series.
///
/// A crossing is a strict sign change of (x - mean); zero slopes are skipped,
/// carrying the last nonzero sign.
pub fn crossings_and_slope_changes(series: &[f64]) -> Result<(usize, usize)> {
    let n = series.len();
    if n < 3 {
        return Err(Error::SeriesTooShort { got: n, need: 3 });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut zc = 0usize;
    let mut prev_sign = 0i8;
    for x in series {
        let s = sign(x - mean);
        if s != 0 {
            if prev_sign != 0 && s != prev_sign {
                zc += 1;
            }
            prev_sign = s;
        }
    }
    let mut ssc = 0usize;
    let mut prev_slope = 0i8;
    for w in series.windows(2) {
        let s = sign(w[1] - w[0]);
        if s != 0 {
            if prev_slope != 0 && s != prev_slope {
                ssc += 1;
            }
            prev_slope = s;
        }
    }
    Ok((zc, ssc))
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Mean absolute radial difference per radian and per second.
///
/// Pairs with a zero angular (resp. time) delta are skipped from the sum; the
/// prefactor is 1/N with N the series length.
pub fn radial_difference_rates(rs: &RadialSeries) -> Result<(f64, f64)> {
    let n = rs.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { got: n, need: 2 });
    }
    let nf = n as f64;
    let mut per_radian = 0.0;
    let mut per_second = 0.0;
    for i in 0..n - 1 {
        let dr = rs.r[i + 1] - rs.r[i];
        let dtheta = rs.theta[i + 1] - rs.theta[i];
        let dt = rs.t[i + 1] - rs.t[i];
        if dtheta != 0.0 {
            per_radian += (dr / dtheta).abs();
        }
        if dt != 0.0 {
            per_second += (dr / dt).abs();
        }
    }
    Ok((per_radian / nf, per_second / nf))
}

/// Counts strict interior extrema and locates the global extrema by index
/// quartile (four contiguous index blocks, remainder spread to the earlier
/// blocks; first occurrence wins).
pub fn extrema_summary(series: &[f64]) -> Result<ExtremaSummary> {
    let n = series.len();
    if n < 3 {
        return Err(Error::SeriesTooShort { got: n, need: 3 });
    }
    let mut n_max = 0usize;
    let mut n_min = 0usize;
    for i in 1..n - 1 {
        if series[i] > series[i - 1] && series[i] > series[i + 1] {
            n_max += 1;
        }
        if series[i] < series[i - 1] && series[i] < series[i + 1] {
            n_min += 1;
        }
    }
    let mut max_idx = 0usize;
    let mut min_idx = 0usize;
    for (i, &x) in series.iter().enumerate() {
        if x > series[max_idx] {
            max_idx = i;
        }
        if x < series[min_idx] {
            min_idx = i;
        }
    }
    Ok(ExtremaSummary {
        n_max,
        n_min,
        q_max: index_quartile(max_idx, n),
        q_min: index_quartile(min_idx, n),
    })
}

fn index_quartile(idx: usize, n: usize) -> u8 {
    let base = n / 4;
    let rem = n % 4;
    let mut start = 0usize;
    for q in 0..4u8 {
        let size = base + usize::from((q as usize) < rem);
        if idx < start + size {
            return q + 1;
        }
        start += size;
    }
    4
}
