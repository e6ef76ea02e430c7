//! Doubly-selective channel generation and waveform-level application.
//!
//! Channels are sparse path sets: per path a complex gain, a delay in
//! seconds (generally a fractional multiple of `T_s`) and a Doppler shift in
//! Hz. Application happens on the oversampled circular frame axis: each path
//! delays the waveform (integer fine-grid shift plus cubic interpolation of
//! the sub-sample remainder), applies its Doppler phase ramp, and scales by
//! its gain.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::modem::FineWaveform;
use crate::C64;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: C64,
    /// Delay in seconds, `>= 0`.
    pub delay: f64,
    /// Doppler shift in Hz.
    pub doppler: f64,
}

impl Path {
    /// `h' = h * exp(j 2 pi nu tau)`, the gain with the delay-Doppler cross
    /// phase folded in.
    pub fn effective_gain(&self) -> C64 {
        self.gain * C64::from_polar(1.0, TAU * self.doppler * self.delay)
    }
}

/// A set of `P` channel paths.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSet {
    pub paths: Vec<Path>,
}

impl PathSet {
    pub fn single(gain: C64, delay: f64, doppler: f64) -> Self {
        Self {
            paths: vec![Path {
                gain,
                delay,
                doppler,
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn total_power(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }

    pub fn max_delay(&self) -> f64 {
        self.paths.iter().fold(0.0, |acc, p| acc.max(p.delay))
    }
}

/// Statistical channel description.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// Number of paths `P`.
    pub num_paths: usize,
    /// Exponential power delay profile decay (natural-log units per tap).
    pub pdp_decay: f64,
    /// Mobile speed in km/h.
    pub speed_kmh: f64,
    /// Carrier frequency in Hz.
    pub carrier_hz: f64,
    /// Fractional delay range in units of `T_s`; tap `i` gets delay
    /// `(i + a_i) T_s` with `a_i` uniform in this interval (`a_0` clamped
    /// nonnegative). `(0.0, 0.0)` gives integer-delay taps.
    pub frac_delay_range: (f64, f64),
}

impl ChannelConfig {
    /// The evaluation channel: 6 paths, unit exponential decay, fractional
    /// delays uniform in `[-0.5, 0.5]`.
    pub fn six_path(speed_kmh: f64, carrier_hz: f64) -> Self {
        Self {
            num_paths: 6,
            pdp_decay: 1.0,
            speed_kmh,
            carrier_hz,
            frac_delay_range: (-0.5, 0.5),
        }
    }

    /// Maximum Doppler shift `f_c * v / c` in Hz.
    pub fn doppler_max(&self) -> f64 {
        self.carrier_hz * (self.speed_kmh / 3.6) / SPEED_OF_LIGHT
    }
}

/// Draw a channel realization.
///
/// Tap `i` gets delay `(i + a_i) T_s` with `a_i` uniform over the configured
/// fractional range (first tap clamped nonnegative), a circularly-symmetric
/// complex Gaussian gain with variance proportional to `exp(-pdp_decay * i)`
/// (unit total mean power), and Doppler `nu_max * cos(theta)` with `theta`
/// uniform. Draw order per tap is delay, gain, Doppler angle.
pub fn generate_channel(cfg: &ChannelConfig, ts: f64, rng: &mut impl Rng) -> PathSet {
    assert!(cfg.num_paths >= 1, "need at least one path");
    assert!(cfg.speed_kmh >= 0.0, "speed must be nonnegative");
    let (lo, hi) = cfg.frac_delay_range;
    assert!(lo <= hi, "bad fractional delay range");
    let nu_max = cfg.doppler_max();
    // Mean tap powers, normalized to unit total.
    let raw: Vec<f64> = (0..cfg.num_paths)
        .map(|i| (-cfg.pdp_decay * i as f64).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    let mut paths = Vec::with_capacity(cfg.num_paths);
    for (i, &p_i) in raw.iter().enumerate() {
        let mut a = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
        if i == 0 {
            a = a.max(0.0);
        }
        let delay = (i as f64 + a) * ts;
        let std = (p_i / total / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let gain = C64::new(std * re, std * im);
        let theta: f64 = rng.gen_range(0.0..TAU);
        let doppler = if cfg.speed_kmh == 0.0 {
            0.0
        } else {
            nu_max * theta.cos()
        };
        paths.push(Path {
            gain,
            delay,
            doppler,
        });
    }
    PathSet { paths }
}

/// Apply the path set to an oversampled waveform on the circular frame axis:
/// `r(t) = sum_i h_i x(t - tau_i) e^{j 2 pi nu_i t}`.
///
/// Delays are realized as an integer fine-grid shift plus cubic interpolation
/// of the sub-sample remainder; the Doppler ramp runs over `t in [0, MN T_s)`
/// (the model's frame clock, with `t = 0` at the first post-CP sample).
pub fn apply_channel_waveform(tx: &FineWaveform, ps: &PathSet) -> FineWaveform {
    let n = tx.len();
    let dt = tx.fine_step();
    let x = tx.as_slice();
    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut delayed = vec![C64::new(0.0, 0.0); n];
    for path in &ps.paths {
        assert!(path.delay >= 0.0, "path delays must be causal");
        // x(j dt - tau) at position j - shift (circular).
        let shift = path.delay / dt;
        let n0 = shift.floor() as isize;
        let frac = shift - n0 as f64;
        if frac == 0.0 {
            for (j, d) in delayed.iter_mut().enumerate() {
                let idx = (j as isize - n0).rem_euclid(n as isize) as usize;
                *d = x[idx];
            }
        } else {
            // Four-point Lagrange weights at fractional position 1 - frac
            // between neighbours x[j - n0 - 1] and x[j - n0].
            let u = 1.0 - frac;
            let w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
            let w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
            let w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
            let w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
            for (j, d) in delayed.iter_mut().enumerate() {
                let i1 = j as isize - n0 - 1;
                let at = |k: isize| x[(i1 + k).rem_euclid(n as isize) as usize];
                *d = at(-1) * w0 + at(0) * w1 + at(1) * w2 + at(2) * w3;
            }
        }
        // Gain times Doppler ramp, phase computed exactly per sample.
        if path.doppler == 0.0 {
            for (&d, o) in delayed.iter().zip(out.iter_mut()) {
                *o += d * path.gain;
            }
        } else {
            let w = TAU * path.doppler * dt;
            for (j, (&d, o)) in delayed.iter().zip(out.iter_mut()).enumerate() {
                *o += d * path.gain * C64::from_polar(1.0, w * j as f64);
            }
        }
    }
    FineWaveform::new(out, tx.oversampling(), tx.ts(), tx.cp_len())
}

/// Add i.i.d. circularly-symmetric complex Gaussian noise of variance
/// `10^(-snr_db/10)` per sample. `snr_db = +inf` leaves the signal unchanged.
pub fn add_awgn(samples: &mut [C64], snr_db: f64, rng: &mut impl Rng) {
    if snr_db.is_infinite() && snr_db > 0.0 {
        return;
    }
    let sigma2 = 10.0f64.powf(-snr_db / 10.0);
    let std = (sigma2 / 2.0).sqrt();
    for z in samples.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *z += C64::new(std * re, std * im);
    }
}
