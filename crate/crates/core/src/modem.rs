//! Transmit and receive chains between the delay-Doppler grid and the
//! oversampled pulse-shaped waveform.
//!
//! The frame is processed on a circular time axis of one period `M*N*T_s`:
//! pulse shaping wraps around the frame boundary, so the cyclic-prefix region
//! of the physical signal is exactly the periodic extension of the frame
//! body. That realizes the post-CP circular input-output model the
//! delay-Doppler operator is built on, leaving only fine-grid interpolation
//! and the matched-filter narrowband-Doppler approximation between the two.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{self, DDFrame, GridError, TimeSignal};
use crate::pulse::PulsePrototype;
use crate::C64;

/// Frame and sampling geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ModemConfig {
    /// Delay bins `M`.
    pub delay_bins: usize,
    /// Doppler bins `N`.
    pub doppler_bins: usize,
    /// Subcarrier spacing in Hz; `T_s = 1 / (M * delta_f)`.
    pub subcarrier_spacing: f64,
    /// Carrier frequency in Hz (used for Doppler generation downstream).
    pub carrier_hz: f64,
    /// Cyclic prefix length in symbol-rate samples.
    pub cp_len: usize,
    /// QAM order; only 4 is supported.
    pub qam_order: usize,
    /// Fine-grid oversampling factor `Q`.
    pub oversampling: usize,
}

impl ModemConfig {
    /// The evaluation setup used throughout: `M = 32`, `N = 16`,
    /// 15 kHz spacing, 5.9 GHz carrier, 16-sample CP, `Q = 64`.
    pub fn lte_like() -> Self {
        Self {
            delay_bins: 32,
            doppler_bins: 16,
            subcarrier_spacing: 15e3,
            carrier_hz: 5.9e9,
            cp_len: 16,
            qam_order: 4,
            oversampling: 64,
        }
    }

    /// Symbol period (delay resolution) in seconds.
    pub fn ts(&self) -> f64 {
        1.0 / (self.delay_bins as f64 * self.subcarrier_spacing)
    }

    /// Doppler resolution `1 / (M N T_s)` in Hz.
    pub fn doppler_resolution(&self) -> f64 {
        1.0 / (self.delay_bins as f64 * self.doppler_bins as f64 * self.ts())
    }

    pub fn frame_len(&self) -> usize {
        self.delay_bins * self.doppler_bins
    }

    pub fn fine_len(&self) -> usize {
        self.frame_len() * self.oversampling
    }

    pub fn validate(&self) -> Result<(), ModemError> {
        if self.delay_bins == 0 || self.doppler_bins == 0 {
            return Err(ModemError::BadConfig("grid dimensions must be positive"));
        }
        if self.qam_order != 4 {
            return Err(ModemError::BadConfig("only 4-QAM is supported"));
        }
        if self.cp_len > self.frame_len() {
            return Err(ModemError::BadConfig("cp_len exceeds frame length"));
        }
        if !(self.subcarrier_spacing > 0.0) {
            return Err(ModemError::BadConfig("subcarrier spacing must be positive"));
        }
        Ok(())
    }
}

/// Errors from the modem chain.
#[derive(Debug, Clone, PartialEq)]
pub enum ModemError {
    BadConfig(&'static str),
    /// Bit payload does not match the frame capacity.
    BitCountMismatch { expected: usize, got: usize },
    /// Pulse grid does not match the modem configuration.
    PulseMismatch,
    /// Waveform shorter than one frame.
    WaveformTooShort { expected: usize, got: usize },
    /// Fractional timing offset outside `[0, 0.5)`.
    TimingOffsetOutOfRange { delta: f64 },
    Grid(GridError),
}

impl fmt::Display for ModemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModemError::BadConfig(what) => write!(f, "bad modem config: {what}"),
            ModemError::BitCountMismatch { expected, got } => {
                write!(f, "bit count {got}, expected {expected}")
            }
            ModemError::PulseMismatch => write!(f, "pulse grid does not match modem config"),
            ModemError::WaveformTooShort { expected, got } => {
                write!(f, "waveform length {got}, expected {expected}")
            }
            ModemError::TimingOffsetOutOfRange { delta } => {
                write!(f, "timing offset {delta} outside [0, 0.5)")
            }
            ModemError::Grid(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModemError {}

impl From<GridError> for ModemError {
    fn from(e: GridError) -> Self {
        ModemError::Grid(e)
    }
}

/// Residual fractional timing offset at the receiver sampler, in symbol
/// periods; the matched-filter output is sampled at `(l + delta) * T_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingOffset(f64);

impl TimingOffset {
    pub const NONE: TimingOffset = TimingOffset(0.0);

    pub fn new(delta: f64) -> Result<Self, ModemError> {
        if (0.0..0.5).contains(&delta) {
            Ok(Self(delta))
        } else {
            Err(ModemError::TimingOffsetOutOfRange { delta })
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// One frame period of the oversampled waveform on the circular time axis.
///
/// `samples[j]` is the field at `t = j * T_s / Q` for `j = 0 .. M*N*Q`;
/// indices wrap modulo the period. [`FineWaveform::samples_with_cp`]
/// materializes the linear with-CP view when the physical layout is needed.
#[derive(Debug, Clone, PartialEq)]
pub struct FineWaveform {
    samples: Vec<C64>,
    q: usize,
    ts: f64,
    cp_len: usize,
}

impl FineWaveform {
    pub fn new(samples: Vec<C64>, q: usize, ts: f64, cp_len: usize) -> Self {
        Self {
            samples,
            q,
            ts,
            cp_len,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn oversampling(&self) -> usize {
        self.q
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    pub fn fine_step(&self) -> f64 {
        self.ts / self.q as f64
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.samples
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    #[inline]
    pub fn wrapped(&self, idx: isize) -> C64 {
        let n = self.samples.len() as isize;
        self.samples[idx.rem_euclid(n) as usize]
    }

    /// Time-averaged power `(1/T) * integral |x|^2 dt` over one period.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Energy of one period, `integral |x|^2 dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.fine_step()
    }

    /// Linear view including the cyclic prefix (the periodic extension over
    /// `[-cp_len * T_s, M*N*T_s)`).
    pub fn samples_with_cp(&self) -> Vec<C64> {
        let head = self.samples.len() - self.cp_len * self.q;
        let mut out = Vec::with_capacity(self.samples.len() + self.cp_len * self.q);
        out.extend_from_slice(&self.samples[head..]);
        out.extend_from_slice(&self.samples);
        out
    }
}

/// Gray-mapped 4-QAM: bit pair `(b1, b0)` maps to
/// `((1 - 2 b1) + j (1 - 2 b0)) / sqrt(2)`.
#[inline]
pub fn qam4_symbol(b1: bool, b0: bool) -> C64 {
    let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
    C64::new(
        if b1 { -inv_sqrt2 } else { inv_sqrt2 },
        if b0 { -inv_sqrt2 } else { inv_sqrt2 },
    )
}

/// Hard-decision demapping of one symbol.
#[inline]
pub fn qam4_bits(z: C64) -> (bool, bool) {
    (z.re < 0.0, z.im < 0.0)
}

/// Map `2*M*N` bits onto a full data frame.
pub fn map_bits(bits: &[bool], m: usize, n: usize) -> Result<DDFrame, ModemError> {
    if bits.len() != 2 * m * n {
        return Err(ModemError::BitCountMismatch {
            expected: 2 * m * n,
            got: bits.len(),
        });
    }
    let data: Vec<C64> = bits
        .chunks_exact(2)
        .map(|b| qam4_symbol(b[0], b[1]))
        .collect();
    Ok(DDFrame::from_vec(m, n, data)?)
}

/// Map bits onto the `true` positions of a column-major mask; other grid
/// positions are left zero (pilot and guard loading happens elsewhere).
pub fn map_bits_masked(
    bits: &[bool],
    m: usize,
    n: usize,
    mask: &[bool],
) -> Result<DDFrame, ModemError> {
    assert_eq!(mask.len(), m * n, "mask length mismatch");
    let data_count = mask.iter().filter(|&&x| x).count();
    if bits.len() != 2 * data_count {
        return Err(ModemError::BitCountMismatch {
            expected: 2 * data_count,
            got: bits.len(),
        });
    }
    let mut frame = DDFrame::zeros(m, n);
    let mut it = bits.chunks_exact(2);
    let vec = frame.as_vec_mut();
    for (pos, &is_data) in mask.iter().enumerate() {
        if is_data {
            let b = it.next().expect("bit count checked above");
            vec[pos] = qam4_symbol(b[0], b[1]);
        }
    }
    Ok(frame)
}

/// Hard-demap the `true` positions of the mask back to bits.
pub fn demap(frame: &DDFrame, mask: &[bool]) -> Vec<bool> {
    assert_eq!(
        mask.len(),
        frame.as_vec().len(),
        "mask length mismatch"
    );
    let mut bits = Vec::with_capacity(2 * mask.len());
    for (z, &is_data) in frame.as_vec().iter().zip(mask) {
        if is_data {
            let (b1, b0) = qam4_bits(*z);
            bits.push(b1);
            bits.push(b0);
        }
    }
    bits
}

/// Pulse-shape a frame onto the oversampled circular grid:
/// `x(t) = sum_kappa s[kappa] p_tx(t - kappa T_s)` with the sum taken over
/// the periodized symbol sequence.
pub fn transmit(
    frame: &DDFrame,
    pulse: &PulsePrototype,
    cfg: &ModemConfig,
) -> Result<FineWaveform, ModemError> {
    cfg.validate()?;
    if frame.delay_bins() != cfg.delay_bins || frame.doppler_bins() != cfg.doppler_bins {
        return Err(ModemError::BadConfig("frame dimensions do not match config"));
    }
    if pulse.oversampling() != cfg.oversampling || (pulse.ts() - cfg.ts()).abs() > 1e-12 * cfg.ts()
    {
        return Err(ModemError::PulseMismatch);
    }
    let s = grid::idzt(frame);
    let q = cfg.oversampling;
    let fine_len = cfg.fine_len();
    let taps = pulse.samples();
    let half = (pulse.span() * q) as isize;
    let mut x = vec![C64::new(0.0, 0.0); fine_len];
    for (kappa, &sym) in s.samples.iter().enumerate() {
        if sym == C64::new(0.0, 0.0) {
            continue;
        }
        let base = (kappa * q) as isize;
        for (ti, &tap) in taps.iter().enumerate() {
            if tap == 0.0 {
                continue;
            }
            let j = (base + ti as isize - half).rem_euclid(fine_len as isize) as usize;
            x[j] += sym * tap;
        }
    }
    Ok(FineWaveform::new(x, q, cfg.ts(), cfg.cp_len))
}

/// Matched-filter the waveform with `p_rx(t) = p_tx*(-t)` and sample the
/// output at `(l + delta) * T_s` for `l = -cp_len .. M*N`, returning the
/// symbol-rate signal with its cyclic prefix still attached.
///
/// The output is normalized so a loopback chain has unit gain (the same
/// factor that peak-normalizes the effective pulse).
pub fn matched_filter_output(
    waveform: &FineWaveform,
    pulse: &PulsePrototype,
    cfg: &ModemConfig,
    to: TimingOffset,
) -> Result<TimeSignal, ModemError> {
    cfg.validate()?;
    if waveform.oversampling() != cfg.oversampling {
        return Err(ModemError::PulseMismatch);
    }
    if waveform.len() < cfg.fine_len() {
        return Err(ModemError::WaveformTooShort {
            expected: cfg.fine_len(),
            got: waveform.len(),
        });
    }
    let q = cfg.oversampling;
    let dt = cfg.ts() / q as f64;
    let delta = to.value();
    // Receive-filter taps at the (fractionally shifted) fine grid:
    // tap(k) = p_tx(k*dt - delta*T_s). One extra symbol of margin covers the
    // shift; the prototype evaluates to exactly zero outside its support.
    let half = (pulse.span() * q + q) as isize;
    let taps: Vec<f64> = (-half..=half)
        .map(|k| pulse.eval(k as f64 * dt - delta * cfg.ts()))
        .collect();
    // Normalize by the raw autocorrelation peak so the effective pulse through
    // this chain has unit peak.
    let peak: f64 = pulse.samples().iter().map(|v| v * v).sum::<f64>() * dt;
    let gain = dt / peak;

    let frame_len = cfg.frame_len();
    let mut out = Vec::with_capacity(frame_len + cfg.cp_len);
    for l in -(cfg.cp_len as isize)..frame_len as isize {
        let base = l * q as isize;
        let mut acc = C64::new(0.0, 0.0);
        for (ti, &tap) in taps.iter().enumerate() {
            if tap == 0.0 {
                continue;
            }
            acc += waveform.wrapped(base + ti as isize - half) * tap;
        }
        out.push(acc * gain);
    }
    let mut sig = TimeSignal::new(out, cfg.ts());
    sig.cp_len = cfg.cp_len;
    Ok(sig)
}

/// Full receive chain: matched filter, offset sampling, CP removal, DZT.
pub fn receive(
    waveform: &FineWaveform,
    pulse: &PulsePrototype,
    cfg: &ModemConfig,
    to: TimingOffset,
) -> Result<DDFrame, ModemError> {
    let mf = matched_filter_output(waveform, pulse, cfg, to)?;
    let body = grid::remove_cp(&mf);
    Ok(grid::dzt(&body, cfg.delay_bins, cfg.doppler_bins)?)
}
