//! Delay-Doppler domain baseband DSP.
//!
//! This crate implements the signal-processing core of an OTFS link-level
//! simulator: the discrete Zak transform pair, transmit pulse construction
//! (square-root raised cosine and a time-frequency localized Gaussian-Hermite
//! combination), doubly-selective channel generation and application, the
//! full modem chain on an oversampled grid, the exact delay-Doppler domain
//! effective channel operator, and embedded-pilot channel estimation with
//! MMSE detection.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std` feature
//! enables runtime-dispatched SIMD kernels and is what the companion
//! simulator crate builds against.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channel;
pub mod detect;
pub mod effective;
pub mod grid;
pub mod linalg;
pub mod modem;
pub mod pulse;

pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = num_complex::Complex64;
