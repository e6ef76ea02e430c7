use otfs_core::*;
use otfs_core::modem::*;
use otfs_core::pulse::*;
use otfs_core::channel::*;
use rand::{Rng, SeedableRng};
fn main() {
    let cfg = ModemConfig { delay_bins: 16, doppler_bins: 8, subcarrier_spacing: 15e3,
        carrier_hz: 5.9e9, cp_len: 8, qam_order: 4, oversampling: 32 };
    let pulse = PulsePrototype::srrc(0.22, 32, 8, cfg.ts()).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
    let bits: Vec<bool> = (0..2*cfg.frame_len()).map(|_| rng.gen()).collect();
    let frame = map_bits(&bits, 16, 8).unwrap();
    let wf = transmit(&frame, &pulse, &cfg).unwrap();
    let ps = PathSet::single(C64::new(1.0,0.0), 0.0, 1234.5);
    let out = apply_channel_waveform(&wf, &ps);
    let mut worst = (0usize, 0.0f64);
    for (j,(a,b)) in wf.as_slice().iter().zip(out.as_slice()).enumerate() {
        let d = (a.norm()-b.norm()).abs();
        if d > worst.1 { worst = (j, d); }
    }
    println!("worst magnitude dev: {:.3e} at j={}", worst.1, worst.0);
    let dt = wf.fine_step();
    let mut worstp = (0usize, 0.0f64);
    for j in 0..wf.len() {
        let want = wf.as_slice()[j] * C64::from_polar(1.0, std::f64::consts::TAU*1234.5*(j as f64)*dt);
        let d = (out.as_slice()[j]-want).norm();
        if d > worstp.1 { worstp = (j, d); }
    }
    println!("worst vs exact ramp: {:.3e} at j={}", worstp.1, worstp.0);
}
