use image::{Rgb, RgbImage};

use super::GeomError;

/// Roughness assigned to perfectly uniform regions.
pub const ROUGHNESS_FLOOR: f32 = 0.2;

/// Single-channel float image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

impl FloatImage {
    pub fn new(width: u32, height: u32, fill: f32) -> Self {
        Self {
            width,
            height,
            data: vec![fill; (width * height) as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> f32) -> Self {
        let mut data = Vec::with_capacity((width * height) as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.data[(y * self.width + x) as usize]
    }

    /// Sample with clamp-to-edge addressing.
    pub fn get_clamped(&self, x: i64, y: i64) -> f32 {
        let x = x.clamp(0, self.width as i64 - 1) as u32;
        let y = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(x, y)
    }

    pub fn mean(&self) -> f32 {
        self.data.iter().sum::<f32>() / self.data.len().max(1) as f32
    }

    pub fn to_gray8(&self) -> image::GrayImage {
        image::GrayImage::from_fn(self.width, self.height, |x, y| {
            image::Luma([(self.get(x, y).clamp(0.0, 1.0) * 255.0).round() as u8])
        })
    }
}

/// Rec. 709 luminance in [0, 1].
pub fn luminance(p: &Rgb<u8>) -> f32 {
    (0.2126 * p[0] as f32 + 0.7152 * p[1] as f32 + 0.0722 * p[2] as f32) / 255.0
}

/// Tangent-space normal map from central-difference height gradients.
pub fn normal_from_height(height: &FloatImage, strength: f32) -> Result<RgbImage, GeomError> {
    if height.is_empty() {
        return Err(GeomError::EmptyImage);
    }
    Ok(RgbImage::from_fn(height.width, height.height, |x, y| {
        let (x, y) = (x as i64, y as i64);
        let dx = 0.5 * (height.get_clamped(x + 1, y) - height.get_clamped(x - 1, y));
        let dy = 0.5 * (height.get_clamped(x, y + 1) - height.get_clamped(x, y - 1));
        let n = glam::Vec3::new(-strength * dx, -strength * dy, 1.0).normalize();
        Rgb([encode_unit(n.x), encode_unit(n.y), encode_unit(n.z)])
    }))
}

fn encode_unit(v: f32) -> u8 {
    ((v + 1.0) * 0.5 * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Height is the 3x3 box-filtered luminance. Roughness rises from
/// `ROUGHNESS_FLOOR` with the local luminance standard deviation, so flat
/// regions read as smooth and busy texture as rough.
pub fn height_and_roughness_from_diffuse(diffuse: &RgbImage) -> Result<(FloatImage, FloatImage), GeomError> {
    let (w, h) = diffuse.dimensions();
    if w == 0 || h == 0 {
        return Err(GeomError::EmptyImage);
    }
    let lum = FloatImage::from_fn(w, h, |x, y| luminance(diffuse.get_pixel(x, y)));
    let mut height = FloatImage::new(w, h, 0.0);
    let mut rough = FloatImage::new(w, h, 0.0);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let (mut s, mut s2) = (0.0f32, 0.0f32);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let v = lum.get_clamped(x + dx, y + dy);
                    s += v;
                    s2 += v * v;
                }
            }
            let mean = s / 9.0;
            let std = (s2 / 9.0 - mean * mean).max(0.0).sqrt();
            let i = (y as u32 * w + x as u32) as usize;
            height.data[i] = mean.clamp(0.0, 1.0);
            rough.data[i] = (ROUGHNESS_FLOOR + (1.0 - ROUGHNESS_FLOOR) * (2.0 * std).min(1.0)).clamp(0.0, 1.0);
        }
    }
    Ok((height, rough))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_height_is_flat() {
        let img = normal_from_height(&FloatImage::new(5, 4, 0.7), 3.0).unwrap();
        assert!(img.pixels().all(|p| p.0 == [128, 128, 255]));
    }

    #[test]
    fn ramp_gives_uniform_tilt() {
        let h = FloatImage::from_fn(8, 8, |x, _| x as f32 * 0.1);
        let img = normal_from_height(&h, 1.0).unwrap();
        let inner = img.get_pixel(3, 3).0;
        for y in 0..8 {
            for x in 1..7 {
                assert_eq!(img.get_pixel(x, y).0, inner);
            }
        }
        assert!(inner[0] < 128 && inner[1] == 128);
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(normal_from_height(&FloatImage::new(0, 3, 0.0), 1.0), Err(GeomError::EmptyImage));
        assert!(height_and_roughness_from_diffuse(&RgbImage::new(0, 0)).is_err());
    }

    #[test]
    fn diffuse_endpoints() {
        let white = RgbImage::from_pixel(4, 4, Rgb([255; 3]));
        let black = RgbImage::from_pixel(4, 4, Rgb([0; 3]));
        let (hw, rw) = height_and_roughness_from_diffuse(&white).unwrap();
        let (hb, _) = height_and_roughness_from_diffuse(&black).unwrap();
        assert!(hw.data.iter().all(|v| (v - 1.0).abs() < 1e-6));
        assert!(hb.data.iter().all(|v| *v == 0.0));
        assert!(rw.data.iter().all(|v| (v - ROUGHNESS_FLOOR).abs() < 1e-6));
    }
}
