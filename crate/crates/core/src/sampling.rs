//! Deterministic sampling utilities for the toy learners.
//!
//! All randomness flows through [`rand_chacha::ChaCha8Rng`], a named
//! counter-based generator with a documented cross-platform stability
//! guarantee, so a fixed seed reproduces a trajectory bit-for-bit. The
//! samplers below consume the stream through `next_u64` only, keeping the
//! draw sequence independent of `rand` front-end versions.

pub use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Crate-standard generator seeded from a single `u64`.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a per-stream seed from a base seed and a stream index by
/// running two rounds of the SplitMix64 output permutation.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for _ in 0..2 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Uniform draw in `[0, 1)` using the top 53 bits of one `u64`.
pub fn uniform_unit<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw via Box–Muller; consumes exactly two `u64`s.
pub fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    let u1 = uniform_unit(rng);
    let u2 = uniform_unit(rng);
    // 1 - u1 ∈ (0, 1], so the log is finite.
    (-2.0 * (1.0 - u1).ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

/// von Mises draw by the Best–Fisher (1979) rejection scheme, returned in
/// `[-π, π)` relative to the mean direction `mu`.
pub fn von_mises_draw<R: RngCore>(mu: f64, kappa: f64, rng: &mut R) -> f64 {
    const PI: f64 = core::f64::consts::PI;
    if kappa < 1e-8 {
        return wrap_to_pi(mu + (2.0 * uniform_unit(rng) - 1.0) * PI);
    }
    let a = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let b = (a - (2.0 * a).sqrt()) / (2.0 * kappa);
    let r = (1.0 + b * b) / (2.0 * b);
    loop {
        let u1 = uniform_unit(rng);
        let u2 = uniform_unit(rng);
        let z = (PI * u1).cos();
        let f = ((1.0 + r * z) / (r + z)).clamp(-1.0, 1.0);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3 = uniform_unit(rng);
            let angle = if u3 > 0.5 { f.acos() } else { -f.acos() };
            return wrap_to_pi(mu + angle);
        }
    }
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_to_pi(x: f64) -> f64 {
    const PI: f64 = core::f64::consts::PI;
    const TAU: f64 = core::f64::consts::TAU;
    let mut w = x % TAU;
    if w < -PI {
        w += TAU;
    } else if w >= PI {
        w -= TAU;
    }
    w
}

/// FNV-1a hash over the raw bits of a float slice; used to verify that
/// seed-matched experiment arms consumed identical data streams.
pub fn hash_f64_slice(xs: &[f64]) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for &x in xs {
        for byte in x.to_bits().to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }
    h
}
