//! Trend classification of second-derivative trajectories, comparison with
//! Spearman's rho, loss-surface slices and gradient masks.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{loss, GradientTrace, ModelParams};
use crate::stats::spearman;

pub const DEFAULT_FLAT_EPSILON: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrendLabel {
    Increasing,
    Decreasing,
    Flat,
}

impl TrendLabel {
    pub fn predicted_sign(self) -> i8 {
        match self {
            TrendLabel::Increasing => 1,
            TrendLabel::Decreasing => -1,
            TrendLabel::Flat => 0,
        }
    }
}

/// Least-squares slope of `series` against its index `0..len`.
pub fn ols_slope(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort {
            min: 2,
            len: series.len(),
        });
    }
    if let Some(index) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let n = series.len() as f64;
    let x_mean = (n - 1.0) / 2.0;
    let y_mean = series.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in series.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    Ok(sxy / sxx)
}

pub fn classify_trend(series: &[f64], flat_epsilon: f64) -> Result<TrendLabel> {
    let slope = ols_slope(series)?;
    Ok(if slope > flat_epsilon {
        TrendLabel::Increasing
    } else if slope < -flat_epsilon {
        TrendLabel::Decreasing
    } else {
        TrendLabel::Flat
    })
}

/// Plurality label; a tie for the top count yields `Flat`.
pub fn majority_trend(labels: &[TrendLabel]) -> TrendLabel {
    let count = |l: TrendLabel| labels.iter().filter(|&&x| x == l).count();
    let counts = [
        (TrendLabel::Increasing, count(TrendLabel::Increasing)),
        (TrendLabel::Decreasing, count(TrendLabel::Decreasing)),
        (TrendLabel::Flat, count(TrendLabel::Flat)),
    ];
    let best = counts.iter().map(|c| c.1).max().unwrap_or(0);
    let winners: Vec<_> = counts.iter().filter(|c| c.1 == best).collect();
    if winners.len() == 1 {
        winners[0].0
    } else {
        TrendLabel::Flat
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rho {
    Defined(f64),
    Undefined(UndefinedMarker),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UndefinedMarker {
    Undefined,
}

impl Rho {
    pub fn value(self) -> Option<f64> {
        match self {
            Rho::Defined(v) => Some(v),
            Rho::Undefined(_) => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Agreement {
    Known(bool),
    NotApplicable(NaMarker),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NaMarker {
    #[serde(rename = "n/a")]
    Na,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Agreement between rho and the predicted sign: `n/a` when rho is undefined,
/// otherwise true iff both signs are nonzero and equal.
pub fn agreement(rho: Rho, predicted_sign: i8) -> Agreement {
    match rho.value() {
        None => Agreement::NotApplicable(NaMarker::Na),
        Some(r) => {
            let s = sign(r);
            Agreement::Known(s != 0 && predicted_sign != 0 && s == predicted_sign)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSensitivity {
    pub name: String,
    pub spearman_rho: Rho,
    pub trend_per_run: Vec<TrendLabel>,
    pub majority_trend: TrendLabel,
    pub predicted_sign: i8,
    pub agree: Agreement,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub n_features: usize,
    pub n_agree: usize,
    pub n_disagree: usize,
    pub n_undefined: usize,
    pub runs: usize,
    pub epochs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub features: Vec<FeatureSensitivity>,
    pub summary: ReportSummary,
}

/// Classify each feature's second-derivative trace in every run, vote across
/// runs, and compare the voted direction with the sign of Spearman's rho
/// between the feature column and the target.
pub fn compare(
    traces: &[GradientTrace],
    data: &Dataset,
    flat_epsilon: f64,
) -> Result<SensitivityReport> {
    let first = traces
        .first()
        .ok_or(Error::InvalidConfig("no traces to compare".into()))?;
    let n = data.n_features();
    for t in traces {
        if t.n_features() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: t.n_features(),
            });
        }
    }

    let mut features = Vec::with_capacity(n);
    for (j, name) in data.names().iter().enumerate() {
        let spearman_rho = match spearman(&data.column(j), data.target()) {
            Ok(r) => Rho::Defined(r),
            Err(Error::ConstantInput) => Rho::Undefined(UndefinedMarker::Undefined),
            Err(e) => return Err(e),
        };
        let trend_per_run = traces
            .iter()
            .map(|t| classify_trend(&t.d2_series(j), flat_epsilon))
            .collect::<Result<Vec<_>>>()?;
        let majority = majority_trend(&trend_per_run);
        let predicted_sign = majority.predicted_sign();
        features.push(FeatureSensitivity {
            name: name.clone(),
            spearman_rho,
            trend_per_run,
            majority_trend: majority,
            predicted_sign,
            agree: agreement(spearman_rho, predicted_sign),
        });
    }

    let n_agree = features
        .iter()
        .filter(|f| f.agree == Agreement::Known(true))
        .count();
    let n_disagree = features
        .iter()
        .filter(|f| f.agree == Agreement::Known(false))
        .count();
    let summary = ReportSummary {
        n_features: n,
        n_agree,
        n_disagree,
        n_undefined: n - n_agree - n_disagree,
        runs: traces.len(),
        epochs: first.epochs(),
    };
    Ok(SensitivityReport { features, summary })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceSlice {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `losses[i][j]` is the loss at `alphas[i]`, `betas[j]`; non-finite
    /// evaluations are stored as `+inf`.
    pub losses: Vec<Vec<f64>>,
    /// Weights followed by the bias component.
    pub directions: [Vec<f64>; 2],
}

impl SurfaceSlice {
    pub fn center(&self) -> f64 {
        let c = self.alphas.len() / 2;
        self.losses[c][self.betas.len() / 2]
    }
}

fn unit_gaussian<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn grid(half_width: f64, points: usize) -> Vec<f64> {
    let c = (points / 2) as f64;
    (0..points)
        .map(|i| half_width * (i as f64 - c) / c)
        .collect()
}

fn check_slice_args(half_width: f64, grid_points: usize) -> Result<()> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidConfig("half-width must be positive".into()));
    }
    if grid_points < 3 || grid_points.is_multiple_of(2) {
        return Err(Error::InvalidConfig(
            "grid must be odd and at least 3".into(),
        ));
    }
    Ok(())
}

/// Loss over the plane `params + α·d1 + β·d2` with α, β on a uniform grid
/// spanning `[-half_width, half_width]`.
pub fn surface_slice_along(
    params: &ModelParams,
    data: &Dataset,
    half_width: f64,
    grid_points: usize,
    directions: [Vec<f64>; 2],
) -> Result<SurfaceSlice> {
    check_slice_args(half_width, grid_points)?;
    let n = params.weights.len();
    for d in &directions {
        if d.len() != n + 1 {
            return Err(Error::LengthMismatch {
                expected: n + 1,
                actual: d.len(),
            });
        }
    }
    let alphas = grid(half_width, grid_points);
    let betas = alphas.clone();
    let [d1, d2] = &directions;
    let losses = alphas
        .iter()
        .map(|&a| {
            betas
                .iter()
                .map(|&b| {
                    let moved = ModelParams::new(
                        (0..n)
                            .map(|k| params.weights[k] + a * d1[k] + b * d2[k])
                            .collect(),
                        params.bias + a * d1[n] + b * d2[n],
                    );
                    let l = loss(&moved, data);
                    if l.is_finite() {
                        l
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        })
        .collect();
    Ok(SurfaceSlice {
        alphas,
        betas,
        losses,
        directions,
    })
}

/// [`surface_slice_along`] with two random unit-norm Gaussian directions.
pub fn surface_slice<R: Rng + ?Sized>(
    params: &ModelParams,
    data: &Dataset,
    half_width: f64,
    grid_points: usize,
    rng: &mut R,
) -> Result<SurfaceSlice> {
    check_slice_args(half_width, grid_points)?;
    let len = params.weights.len() + 1;
    let d1 = unit_gaussian(len, rng);
    let d2 = unit_gaussian(len, rng);
    surface_slice_along(params, data, half_width, grid_points, [d1, d2])
}

/// 1 where the feature's second-derivative trend is increasing, else 0.
pub fn build_mask(trace: &GradientTrace, flat_epsilon: f64) -> Result<Vec<u8>> {
    (0..trace.n_features())
        .map(|j| {
            classify_trend(&trace.d2_series(j), flat_epsilon)
                .map(|l| u8::from(l == TrendLabel::Increasing))
        })
        .collect()
}

pub fn apply_mask(image: &[f64], mask: &[u8]) -> Result<Vec<f64>> {
    if image.len() != mask.len() {
        return Err(Error::LengthMismatch {
            expected: image.len(),
            actual: mask.len(),
        });
    }
    Ok(image
        .iter()
        .zip(mask)
        .map(|(p, &m)| p * f64::from(m))
        .collect())
}
