//! Seeded 2D gradient noise and its fractal sum.

use glam::DVec2;
use rand::seq::SliceRandom;

use crate::seed::substream;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NoiseError {
    #[error("fractal noise needs at least one octave")]
    ZeroOctaves,
}

/// Classic 2D Perlin noise over a seeded permutation table.
#[derive(Debug, Clone)]
pub struct Perlin {
    perm: [u8; 512],
}

const GRADIENTS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
    (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    (-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    (std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
    (-std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
];

impl Perlin {
    pub fn new(seed: u64) -> Self {
        let mut p: Vec<u8> = (0..=255u8).collect();
        p.shuffle(&mut substream(seed, "perlin"));
        let mut perm = [0u8; 512];
        for i in 0..512 {
            perm[i] = p[i & 255];
        }
        Self { perm }
    }

    fn grad(&self, ix: i64, iy: i64, dx: f64, dy: f64) -> f64 {
        let h = self.perm[(self.perm[(ix & 255) as usize] as usize + (iy & 255) as usize) & 511];
        let (gx, gy) = GRADIENTS[(h & 7) as usize];
        gx * dx + gy * dy
    }

    /// Noise value, roughly within [-0.71, 0.71]; exactly 0 on lattice points.
    pub fn noise(&self, p: DVec2) -> f64 {
        let (x0, y0) = (p.x.floor(), p.y.floor());
        let (fx, fy) = (p.x - x0, p.y - y0);
        let (ix, iy) = (x0 as i64, y0 as i64);
        let fade = |t: f64| t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
        let (u, v) = (fade(fx), fade(fy));
        let n00 = self.grad(ix, iy, fx, fy);
        let n10 = self.grad(ix + 1, iy, fx - 1.0, fy);
        let n01 = self.grad(ix, iy + 1, fx, fy - 1.0);
        let n11 = self.grad(ix + 1, iy + 1, fx - 1.0, fy - 1.0);
        let a = n00 + u * (n10 - n00);
        let b = n01 + u * (n11 - n01);
        a + v * (b - a)
    }
}

/// Fractal sum of Perlin octaves. Octave `k` has frequency `lacunarity^k`
/// and amplitude `gain^k`; each octave is rescaled by √2 to span about
/// [-1, 1] and the sum is clamped to [-1, 1].
#[derive(Debug, Clone)]
pub struct Fbm {
    octaves: Vec<Perlin>,
    pub lacunarity: f64,
    pub gain: f64,
}

impl Fbm {
    pub fn new(octaves: usize, lacunarity: f64, gain: f64, seed: u64) -> Result<Self, NoiseError> {
        if octaves == 0 {
            return Err(NoiseError::ZeroOctaves);
        }
        let octaves = (0..octaves)
            .map(|k| Perlin::new(crate::seed::splitmix64(seed.wrapping_add(k as u64))))
            .collect();
        Ok(Self {
            octaves,
            lacunarity,
            gain,
        })
    }

    pub fn sample(&self, p: DVec2) -> f64 {
        let mut freq = 1.0;
        let mut amp = 1.0;
        let mut sum = 0.0;
        for o in &self.octaves {
            sum += amp * std::f64::consts::SQRT_2 * o.noise(p * freq);
            freq *= self.lacunarity;
            amp *= self.gain;
        }
        sum.clamp(-1.0, 1.0)
    }
}

/// One-shot fractal noise evaluation.
pub fn fbm_perlin(p: DVec2, octaves: usize, lacunarity: f64, gain: f64, seed: u64) -> Result<f64, NoiseError> {
    Ok(Fbm::new(octaves, lacunarity, gain, seed)?.sample(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_points_vanish() {
        for x in -3..4 {
            for y in -3..4 {
                let v = fbm_perlin(DVec2::new(x as f64, y as f64), 1, 2.0, 0.5, 9).unwrap();
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn zero_octaves_rejected() {
        assert_eq!(fbm_perlin(DVec2::ZERO, 0, 2.0, 0.5, 1), Err(NoiseError::ZeroOctaves));
    }

    #[test]
    fn bounded_and_deterministic() {
        let f = Fbm::new(5, 2.0, 0.6, 3).unwrap();
        for i in 0..500 {
            let p = DVec2::new(i as f64 * 0.173, i as f64 * 0.091 - 7.0);
            let v = f.sample(p);
            assert!((-1.0..=1.0).contains(&v));
            assert_eq!(v, Fbm::new(5, 2.0, 0.6, 3).unwrap().sample(p));
        }
    }
}
