use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::ThreePhaseFrame;
use crate::error::{Error, Result};

fn mean_power(frames: &[ThreePhaseFrame]) -> f64 {
    if frames.is_empty() {
        return 0.0;
    }
    let total: f64 = frames
        .iter()
        .flat_map(|f| f.voltages())
        .map(|v| v * v)
        .sum();
    total / (3 * frames.len()) as f64
}

/// Adds independent white Gaussian noise to every phase.
///
/// The noise variance is the record's mean per-phase signal power scaled by
/// `10^(−snr_db/10)`. `snr_db = +∞` returns the frames unchanged.
pub fn add_noise(frames: &[ThreePhaseFrame], snr_db: f64, seed: u64) -> Result<Vec<ThreePhaseFrame>> {
    if snr_db == f64::INFINITY {
        return Ok(frames.to_vec());
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidSpec(format!("snr_db must be finite or +inf, got {snr_db}")));
    }
    let sigma = (mean_power(frames) * 10f64.powf(-snr_db / 10.0)).sqrt();
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(frames
        .iter()
        .map(|f| ThreePhaseFrame {
            va: f.va + normal.sample(&mut rng),
            vb: f.vb + normal.sample(&mut rng),
            vc: f.vc + normal.sample(&mut rng),
            ..*f
        })
        .collect())
}

/// SNR of `noisy` against `clean` in dB, pooled over all phases.
pub fn empirical_snr_db(clean: &[ThreePhaseFrame], noisy: &[ThreePhaseFrame]) -> f64 {
    let noise: Vec<ThreePhaseFrame> = clean
        .iter()
        .zip(noisy)
        .map(|(c, n)| ThreePhaseFrame {
            va: n.va - c.va,
            vb: n.vb - c.vb,
            vc: n.vc - c.vc,
            ..*c
        })
        .collect();
    10.0 * (mean_power(clean) / mean_power(&noise)).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{generate, preset};

    #[test]
    fn infinite_snr_is_identity() {
        let frames = generate(&preset("balanced").unwrap()).unwrap();
        assert_eq!(add_noise(&frames, f64::INFINITY, 3).unwrap(), frames);
        assert!(add_noise(&frames, f64::NAN, 3).is_err());
    }

    #[test]
    fn noise_variance_on_unit_sines() {
        let mut spec = preset("balanced").unwrap();
        spec.duration = 20.0;
        let clean = generate(&spec).unwrap();
        let noisy = add_noise(&clean, 40.0, 11).unwrap();
        let var: f64 = clean
            .iter()
            .zip(&noisy)
            .flat_map(|(c, n)| [n.va - c.va, n.vb - c.vb, n.vc - c.vc])
            .map(|e| e * e)
            .sum::<f64>()
            / (3 * clean.len()) as f64;
        // sine power ½ at 40 dB
        assert!((var / 0.5e-4 - 1.0).abs() < 0.03, "variance {var}");
        assert!((empirical_snr_db(&clean, &noisy) - 40.0).abs() < 0.5);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let clean = generate(&preset("sag").unwrap()).unwrap();
        let a = add_noise(&clean, 30.0, 99).unwrap();
        let b = add_noise(&clean, 30.0, 99).unwrap();
        let c = add_noise(&clean, 30.0, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
