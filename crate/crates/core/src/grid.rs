//! Delay-Doppler grid types and the discrete Zak transform pair.
//!
//! A frame is an `M x N` matrix of symbols, row index `m` = delay bin, column
//! index `n` = Doppler bin. The inverse discrete Zak transform maps it to a
//! delay-time sequence of length `M*N`:
//!
//! `s[n*M + m] = (1/sqrt(N)) * sum_k D[m, k] * exp(+j 2 pi k n / N)`
//!
//! i.e. `s = vec(D F_N^H)` with the normalized DFT matrix and column-major
//! `vec`. Both transforms are unitary.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::CMat;
use crate::C64;

/// Errors from grid-level operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridError {
    /// Sequence length does not factor as `M * N`.
    LengthMismatch { expected: usize, got: usize },
    /// Requested cyclic prefix length is outside `0..=M*N`.
    CpOutOfRange { cp_len: usize, max: usize },
    /// A cyclic prefix is already attached.
    CpAlreadyPresent,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::LengthMismatch { expected, got } => {
                write!(f, "sequence length {got}, expected {expected}")
            }
            GridError::CpOutOfRange { cp_len, max } => {
                write!(f, "cyclic prefix length {cp_len} outside 0..={max}")
            }
            GridError::CpAlreadyPresent => write!(f, "signal already carries a cyclic prefix"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GridError {}

/// An `M x N` delay-Doppler symbol grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DDFrame {
    m: usize,
    n: usize,
    values: CMat,
}

impl DDFrame {
    pub fn zeros(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "grid dimensions must be positive");
        Self {
            m,
            n,
            values: CMat::zeros(m, n),
        }
    }

    /// Build from a column-major `vec(D)` (delay index fastest).
    pub fn from_vec(m: usize, n: usize, data: Vec<C64>) -> Result<Self, GridError> {
        if data.len() != m * n {
            return Err(GridError::LengthMismatch {
                expected: m * n,
                got: data.len(),
            });
        }
        Ok(Self {
            m,
            n,
            values: CMat::from_vec(m, n, data),
        })
    }

    pub fn delay_bins(&self) -> usize {
        self.m
    }

    pub fn doppler_bins(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.values[(m, n)]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, value: C64) {
        self.values[(m, n)] = value;
    }

    /// Column-major `vec(D)`.
    pub fn as_vec(&self) -> &[C64] {
        self.values.as_slice()
    }

    pub fn as_vec_mut(&mut self) -> &mut [C64] {
        self.values.as_mut_slice()
    }

    /// Frobenius norm of the symbol grid.
    pub fn norm(&self) -> f64 {
        self.values.norm_fro()
    }
}

/// A delay-time sequence at `T_s` sample spacing, optionally carrying a
/// cyclic prefix of `cp_len` samples at its head.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub samples: Vec<C64>,
    /// Sample spacing in seconds. The transforms do not depend on it; it is
    /// carried so downstream processing knows the physical rate.
    pub ts: f64,
    pub cp_len: usize,
}

impl TimeSignal {
    pub fn new(samples: Vec<C64>, ts: f64) -> Self {
        Self {
            samples,
            ts,
            cp_len: 0,
        }
    }

    /// Number of samples excluding the cyclic prefix.
    pub fn body_len(&self) -> usize {
        self.samples.len() - self.cp_len
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Inverse discrete Zak transform: `s = vec(D F_N^H)`, length `M*N`.
pub fn idzt(frame: &DDFrame) -> TimeSignal {
    let (m_bins, n_bins) = (frame.delay_bins(), frame.doppler_bins());
    let scale = 1.0 / (n_bins as f64).sqrt();
    let mut samples = vec![C64::new(0.0, 0.0); m_bins * n_bins];
    for n in 0..n_bins {
        for k in 0..n_bins {
            let w = C64::from_polar(scale, TAU * (k * n % n_bins) as f64 / n_bins as f64);
            let col = &frame.values.col(k)[..m_bins];
            let out = &mut samples[n * m_bins..(n + 1) * m_bins];
            for (o, &d) in out.iter_mut().zip(col) {
                *o += d * w;
            }
        }
    }
    TimeSignal::new(samples, 1.0)
}

/// Discrete Zak transform, the exact inverse of [`idzt`].
///
/// The input must be CP-free with length `M*N`.
pub fn dzt(signal: &TimeSignal, m_bins: usize, n_bins: usize) -> Result<DDFrame, GridError> {
    if signal.cp_len != 0 {
        return Err(GridError::CpAlreadyPresent);
    }
    let frame_vec = dzt_vec(&signal.samples, m_bins, n_bins)?;
    DDFrame::from_vec(m_bins, n_bins, frame_vec)
}

/// DZT of a bare length-`M*N` sequence, returned as column-major `vec(Z)`.
pub fn dzt_vec(samples: &[C64], m_bins: usize, n_bins: usize) -> Result<Vec<C64>, GridError> {
    if samples.len() != m_bins * n_bins {
        return Err(GridError::LengthMismatch {
            expected: m_bins * n_bins,
            got: samples.len(),
        });
    }
    let scale = 1.0 / (n_bins as f64).sqrt();
    let mut out = vec![C64::new(0.0, 0.0); m_bins * n_bins];
    for n in 0..n_bins {
        for b in 0..n_bins {
            let w = C64::from_polar(scale, -TAU * (b * n % n_bins) as f64 / n_bins as f64);
            let src = &samples[b * m_bins..(b + 1) * m_bins];
            let dst = &mut out[n * m_bins..(n + 1) * m_bins];
            for (o, &s) in dst.iter_mut().zip(src) {
                *o += s * w;
            }
        }
    }
    Ok(out)
}

/// Prepend the last `cp_len` samples as a cyclic prefix.
pub fn add_cp(signal: &TimeSignal, cp_len: usize) -> Result<TimeSignal, GridError> {
    if signal.cp_len != 0 {
        return Err(GridError::CpAlreadyPresent);
    }
    let n = signal.samples.len();
    if cp_len > n {
        return Err(GridError::CpOutOfRange { cp_len, max: n });
    }
    let mut samples = Vec::with_capacity(n + cp_len);
    samples.extend_from_slice(&signal.samples[n - cp_len..]);
    samples.extend_from_slice(&signal.samples);
    Ok(TimeSignal {
        samples,
        ts: signal.ts,
        cp_len,
    })
}

/// Drop the recorded cyclic prefix.
pub fn remove_cp(signal: &TimeSignal) -> TimeSignal {
    TimeSignal {
        samples: signal.samples[signal.cp_len..].to_vec(),
        ts: signal.ts,
        cp_len: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_frame(rng: &mut impl Rng, m: usize, n: usize) -> DDFrame {
        let data = (0..m * n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        DDFrame::from_vec(m, n, data).unwrap()
    }

    #[test]
    fn idzt_of_zero_frame_is_zero() {
        let frame = DDFrame::zeros(4, 2);
        let s = idzt(&frame);
        assert_eq!(s.samples.len(), 8);
        assert!(s.samples.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn idzt_of_corner_impulse() {
        // Impulse at (m=0, n=0): s[l] = 1/sqrt(2) at l in {0, 4}, else 0.
        let mut frame = DDFrame::zeros(4, 2);
        frame.set(0, 0, C64::new(1.0, 0.0));
        let s = idzt(&frame);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        for (l, z) in s.samples.iter().enumerate() {
            let want = if l == 0 || l == 4 { inv_sqrt2 } else { 0.0 };
            assert!((z - C64::new(want, 0.0)).norm() < 1e-15, "l={l}");
        }
    }

    #[test]
    fn idzt_of_general_impulse_is_modulated_comb() {
        // Impulse at (m_p, n_p): s[n*M + m_p] = (1/sqrt(N)) e^{+j 2 pi n n_p / N}.
        let (m_bins, n_bins, m_p, n_p) = (5usize, 4usize, 3usize, 2usize);
        let mut frame = DDFrame::zeros(m_bins, n_bins);
        frame.set(m_p, n_p, C64::new(1.0, 0.0));
        let s = idzt(&frame);
        for n in 0..n_bins {
            for m in 0..m_bins {
                let z = s.samples[n * m_bins + m];
                if m == m_p {
                    let want = C64::from_polar(
                        1.0 / (n_bins as f64).sqrt(),
                        TAU * (n * n_p) as f64 / n_bins as f64,
                    );
                    assert!((z - want).norm() < 1e-14);
                } else {
                    assert_eq!(z, C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn dzt_inverts_idzt() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let frame = random_frame(&mut rng, 8, 4);
        let back = dzt(&idzt(&frame), 8, 4).unwrap();
        let err = frame
            .as_vec()
            .iter()
            .zip(back.as_vec())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "round trip error {err}");
    }

    #[test]
    fn dzt_of_constant_comb_is_corner_indicator() {
        // Reverse of the corner-impulse case.
        let n_bins = 2;
        let m_bins = 4;
        let mut samples = vec![C64::new(0.0, 0.0); 8];
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        samples[0] = C64::new(inv_sqrt2, 0.0);
        samples[4] = C64::new(inv_sqrt2, 0.0);
        let frame = dzt(&TimeSignal::new(samples, 1.0), m_bins, n_bins).unwrap();
        for m in 0..m_bins {
            for n in 0..n_bins {
                let want = if m == 0 && n == 0 { 1.0 } else { 0.0 };
                assert!((frame.get(m, n) - C64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dzt_rejects_length_mismatch() {
        let sig = TimeSignal::new(vec![C64::new(1.0, 0.0); 7], 1.0);
        assert!(matches!(
            dzt(&sig, 4, 2),
            Err(GridError::LengthMismatch {
                expected: 8,
                got: 7
            })
        ));
    }

    #[test]
    fn cp_add_remove_examples() {
        let s = TimeSignal::new(
            [1.0, 2.0, 3.0, 4.0]
                .iter()
                .map(|&x| C64::new(x, 0.0))
                .collect(),
            1.0,
        );
        let with_cp = add_cp(&s, 2).unwrap();
        let want: Vec<f64> = vec![3.0, 4.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(with_cp.cp_len, 2);
        for (z, w) in with_cp.samples.iter().zip(&want) {
            assert_eq!(*z, C64::new(*w, 0.0));
        }
        assert_eq!(with_cp.body_len(), 4);
        let back = remove_cp(&with_cp);
        assert_eq!(back, s);

        let nocp = add_cp(&s, 0).unwrap();
        assert_eq!(nocp.samples, s.samples);

        assert!(matches!(
            add_cp(&s, 5),
            Err(GridError::CpOutOfRange { cp_len: 5, max: 4 })
        ));
        assert!(matches!(
            add_cp(&with_cp, 1),
            Err(GridError::CpAlreadyPresent)
        ));
    }

    proptest! {
        #[test]
        fn unitarity_and_linearity(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (m, n) = (1 + (seed as usize % 7), 1 + (seed as usize % 5));
            let f1 = random_frame(&mut rng, m, n);
            let f2 = random_frame(&mut rng, m, n);
            let a = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let b = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);

            // Unitarity: ||idzt(D)|| = ||D||_F.
            let s1 = idzt(&f1);
            prop_assert!((s1.energy().sqrt() - f1.norm()).abs() < 1e-12);

            // Parseval for dzt of a bare sequence.
            let z = dzt_vec(&s1.samples, m, n).unwrap();
            let zn = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((zn - s1.energy().sqrt()).abs() < 1e-12);

            // Linearity.
            let mut combo = DDFrame::zeros(m, n);
            for i in 0..m {
                for j in 0..n {
                    combo.set(i, j, a * f1.get(i, j) + b * f2.get(i, j));
                }
            }
            let lhs = idzt(&combo);
            let s2 = idzt(&f2);
            for (i, (x, y)) in lhs.samples.iter().zip(s1.samples.iter().zip(&s2.samples)).enumerate() {
                let want = a * y.0 + b * y.1;
                prop_assert!((x - want).norm() < 1e-12, "sample {}", i);
            }
        }

        #[test]
        fn cp_round_trip(seed in 0u64..200, frac in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 2 + (seed as usize % 30);
            let samples: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let s = TimeSignal::new(samples, 1.0);
            let k = ((n as f64) * frac) as usize;
            let rt = remove_cp(&add_cp(&s, k).unwrap());
            prop_assert_eq!(rt, s);
        }

        #[test]
        fn full_round_trip(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (m, n) = (2 + (seed as usize % 8), 1 + (seed as usize % 6));
            let frame = random_frame(&mut rng, m, n);
            let cp = (m * n) / 3;
            let chain = dzt(&remove_cp(&add_cp(&idzt(&frame), cp).unwrap()), m, n).unwrap();
            let err = frame
                .as_vec()
                .iter()
                .zip(chain.as_vec())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            prop_assert!(err < 1e-12);
        }
    }
}
