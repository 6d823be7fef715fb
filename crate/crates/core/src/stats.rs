//! Spearman rank correlation computed as the Pearson correlation of average
//! ranks, so ties are handled without a separate code path.

use crate::error::{Error, Result};

/// 1-based ranks; tied values share the mean of the positions they occupy.
#[derive(Clone, Debug, PartialEq)]
pub struct RankVector(pub Vec<f64>);

impl RankVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

pub fn average_ranks(v: &[f64]) -> Result<RankVector> {
    if v.is_empty() {
        return Err(Error::SeriesTooShort { min: 1, len: 0 });
    }
    check_finite(v)?;
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));

    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    Ok(RankVector(ranks))
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    // a single sqrt keeps perfectly monotone inputs at exactly ±1
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho in [-1, 1]. Fails on length mismatch, fewer than two
/// points, or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::SeriesTooShort {
            min: 2,
            len: x.len(),
        });
    }
    let rx = average_ranks(x)?;
    let ry = average_ranks(y)?;
    pearson(rx.as_slice(), ry.as_slice())
}
