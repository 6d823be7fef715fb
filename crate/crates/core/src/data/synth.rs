use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    PosLinear,
    NegLinear,
    PosCubic,
    NegCubic,
    Noise,
}

impl FeatureKind {
    /// Contribution of a feature value to the target, before the coefficient.
    fn response(self, x: f64) -> f64 {
        match self {
            FeatureKind::PosLinear => x,
            FeatureKind::NegLinear => -x,
            FeatureKind::PosCubic => x * x * x,
            FeatureKind::NegCubic => -(x * x * x),
            FeatureKind::Noise => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_samples: usize,
    pub features: Vec<FeatureSpec>,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Thirteen features: six increasing, six decreasing (alternating linear
    /// and cubic, coefficients 1.5 down to 0.5) and one pure-noise column.
    pub fn default_13(seed: u64) -> Self {
        const COEFS: [f64; 6] = [1.5, 1.3, 1.1, 0.9, 0.7, 0.5];
        let mut features = Vec::with_capacity(13);
        for (sign, lin, cub) in [
            ("pos", FeatureKind::PosLinear, FeatureKind::PosCubic),
            ("neg", FeatureKind::NegLinear, FeatureKind::NegCubic),
        ] {
            for (k, &c) in COEFS.iter().enumerate() {
                let (kind, shape) = if k % 2 == 0 {
                    (lin, "lin")
                } else {
                    (cub, "cub")
                };
                features.push(FeatureSpec {
                    name: format!("{sign}_{shape}_{}", k + 1),
                    kind,
                    coefficient: c,
                });
            }
        }
        features.push(FeatureSpec {
            name: "noise".into(),
            kind: FeatureKind::Noise,
            coefficient: 0.0,
        });
        Self {
            n_samples: 500,
            features,
            noise_sd: 0.1,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidConfig("n_samples must be positive".into()));
        }
        if !self.features.iter().any(|f| f.kind != FeatureKind::Noise) {
            return Err(Error::InvalidConfig(
                "synthetic spec needs at least one non-noise feature".into(),
            ));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidConfig(
                "noise_sd must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Features are i.i.d. uniform on [-1, 1]; the target sums each feature's
/// signed linear or cubic response plus Gaussian noise.
pub fn synth_generate(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_sd)
        .map_err(|e| Error::InvalidConfig(format!("noise_sd: {e}")))?;
    let n = spec.features.len();
    let mut features = Vec::with_capacity(spec.n_samples * n);
    let mut target = Vec::with_capacity(spec.n_samples);
    for _ in 0..spec.n_samples {
        let mut t = 0.0;
        for f in &spec.features {
            let x: f64 = rng.gen_range(-1.0..=1.0);
            t += f.coefficient * f.kind.response(x);
            features.push(x);
        }
        target.push(t + noise.sample(&mut rng));
    }
    let names = spec.features.iter().map(|f| f.name.clone()).collect();
    Dataset::from_flat(features, target, names)
}
