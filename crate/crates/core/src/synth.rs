//! Synthetic oddball EEG with a controllable P300-like component.
//!
//! The generator emits background noise (white or pink-ish) on every channel
//! and, after each target onset, adds a Gaussian bump peaking around 300 ms
//! with per-channel amplitude weights and seeded per-channel latency jitter.
//! Non-target onsets add nothing. With the amplitude at zero the two classes
//! are drawn from the same process, which gives an exact chance-level
//! control for the classification pipeline.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{Recording, StimulusLog};
use crate::error::{Error, Result};
use crate::seed::stream_rng;

/// Background noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    #[default]
    White,
    /// Approximate 1/f spectrum from a small bank of first-order filters.
    PinkApprox,
}

/// Everything the generator needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_channels: usize,
    pub sampling_rate_hz: f64,
    pub n_target: usize,
    pub n_nontarget: usize,
    /// Peak height of the target bump; 0 disables the evoked response.
    pub p300_amplitude: f64,
    pub p300_latency_s: f64,
    pub p300_width_s: f64,
    /// Per-channel scaling of the bump; length must equal `n_channels`.
    pub channel_weights: Vec<f64>,
    /// Std of the per-(onset, channel) latency jitter, in seconds.
    pub latency_jitter_std_s: f64,
    pub noise: NoiseModel,
    pub noise_std: f64,
    /// Spacing between consecutive onsets, in seconds.
    pub isi_s: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_channels: 8,
            sampling_rate_hz: 256.0,
            n_target: 20,
            n_nontarget: 60,
            p300_amplitude: 1.0,
            p300_latency_s: 0.3,
            p300_width_s: 0.1,
            channel_weights: vec![1.0; 8],
            latency_jitter_std_s: 0.01,
            noise: NoiseModel::White,
            noise_std: 1.0,
            isi_s: 1.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.n_channels == 0 {
            return Err(Error::Config("need at least one channel".into()));
        }
        if !(self.sampling_rate_hz > 0.0) {
            return Err(Error::Config("sampling rate must be positive".into()));
        }
        if self.n_target + self.n_nontarget == 0 {
            return Err(Error::Config("need at least one subtrial".into()));
        }
        if self.channel_weights.len() != self.n_channels {
            return Err(Error::Config(format!(
                "{} channel weights for {} channels",
                self.channel_weights.len(),
                self.n_channels
            )));
        }
        if self.channel_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("channel weights must be finite".into()));
        }
        if !(self.p300_latency_s + 3.0 * self.p300_width_s < 1.0) {
            return Err(Error::Config(
                "latency + 3 * width must fit inside the one-second window".into(),
            ));
        }
        if self.noise_std < 0.0 || self.latency_jitter_std_s < 0.0 {
            return Err(Error::Config("standard deviations must be non-negative".into()));
        }
        if !(self.isi_s > 0.0) {
            return Err(Error::Config("inter-stimulus interval must be positive".into()));
        }
        Ok(())
    }
}

/// Paul Kellet's "economy" pink filter; gain is normalized numerically from
/// the impulse-response energy so the output std matches the requested one.
struct PinkFilter {
    b: [f64; 3],
    scale: f64,
}

impl PinkFilter {
    fn new() -> Self {
        let mut probe = Self {
            b: [0.0; 3],
            scale: 1.0,
        };
        let mut energy = 0.0;
        for k in 0..20_000 {
            let v = probe.step(if k == 0 { 1.0 } else { 0.0 });
            energy += v * v;
        }
        Self {
            b: [0.0; 3],
            scale: 1.0 / energy.sqrt(),
        }
    }

    fn step(&mut self, white: f64) -> f64 {
        self.b[0] = 0.99765 * self.b[0] + white * 0.0990460;
        self.b[1] = 0.96300 * self.b[1] + white * 0.2965164;
        self.b[2] = 0.57000 * self.b[2] + white * 1.0526913;
        self.b[0] + self.b[1] + self.b[2] + white * 0.1848
    }

    fn filtered(&mut self, white: f64) -> f64 {
        self.step(white) * self.scale
    }
}

/// Generates a continuous recording plus its stimulus log.
///
/// Onsets start after a half-second lead-in and are spaced by `isi_s`; the
/// target/non-target order is a seeded shuffle. Deterministic per seed.
pub fn generate_oddball(cfg: &SynthConfig) -> Result<(Recording, StimulusLog)> {
    cfg.validate()?;
    let fs = cfg.sampling_rate_hz;
    let n_onsets = cfg.n_target + cfg.n_nontarget;

    let mut labels = vec![1usize; cfg.n_target];
    labels.extend(std::iter::repeat(0usize).take(cfg.n_nontarget));
    labels.shuffle(&mut stream_rng(cfg.seed, "synth-labels", 0));

    let onsets: Vec<usize> = (0..n_onsets)
        .map(|k| ((0.5 + k as f64 * cfg.isi_s) * fs).round() as usize)
        .collect();
    let last = *onsets.last().expect("at least one onset");
    let n_timepoints = last + (1.5 * fs).round() as usize;

    let mut samples = Array2::<f64>::zeros((cfg.n_channels, n_timepoints));
    for ch in 0..cfg.n_channels {
        let mut rng = stream_rng(cfg.seed, "synth-noise", ch as u64);
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        match cfg.noise {
            NoiseModel::White => {
                for t in 0..n_timepoints {
                    samples[(ch, t)] = cfg.noise_std * normal.sample(&mut rng);
                }
            }
            NoiseModel::PinkApprox => {
                let mut pink = PinkFilter::new();
                for t in 0..n_timepoints {
                    samples[(ch, t)] = cfg.noise_std * pink.filtered(normal.sample(&mut rng));
                }
            }
        }
    }

    if cfg.p300_amplitude != 0.0 {
        let mut jitter_rng = stream_rng(cfg.seed, "synth-jitter", 0);
        let jitter_dist = Normal::new(0.0, cfg.latency_jitter_std_s.max(f64::MIN_POSITIVE))
            .expect("valid jitter distribution");
        for (&onset, &label) in onsets.iter().zip(&labels) {
            for ch in 0..cfg.n_channels {
                // Always draw so the bump placement of later onsets does not
                // depend on earlier labels.
                let jitter: f64 = if cfg.latency_jitter_std_s > 0.0 {
                    jitter_dist.sample(&mut jitter_rng)
                } else {
                    0.0
                };
                if label == 0 {
                    continue;
                }
                let center = onset as f64 + (cfg.p300_latency_s + jitter) * fs;
                let width = cfg.p300_width_s * fs;
                let from = (center - 4.0 * width).floor().max(0.0) as usize;
                let to = ((center + 4.0 * width).ceil() as usize).min(n_timepoints);
                for t in from..to {
                    let d = (t as f64 - center) / width;
                    samples[(ch, t)] +=
                        cfg.p300_amplitude * cfg.channel_weights[ch] * (-0.5 * d * d).exp();
                }
            }
        }
    }

    let names = (0..cfg.n_channels).map(|c| format!("ch{c}")).collect();
    let rec = Recording::new(samples, fs, names)?;
    let log = StimulusLog::new(onsets, labels)?;
    Ok((rec, log))
}
