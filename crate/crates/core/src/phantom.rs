//! Synthetic lesion images with exact ground truth.
//!
//! A phantom is a light skin field with a dark elliptical lesion, optional
//! pixel noise, curved dark hair strokes and a dark corner vignette. The
//! ellipse it was drawn from is the ground-truth mask.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::raster::{BinaryMask, Rgb, RgbImage};

#[derive(Clone, Debug, PartialEq)]
pub struct HairStroke {
    /// Quadratic Bezier control points `(x, y)`.
    pub points: [(f64, f64); 3],
    pub width: f64,
    pub color: Rgb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhantomConfig {
    pub width: usize,
    pub height: usize,
    pub skin: Rgb,
    pub lesion: Rgb,
    /// Ellipse center `(x, y)`.
    pub center: (f64, f64),
    /// Semi-axes along the rotated x and y directions.
    pub semi_axes: (f64, f64),
    /// Rotation in radians.
    pub angle: f64,
    /// Relative darkening of the lesion core versus its rim.
    pub core_darkening: f64,
    /// Width in pixels of the blended lesion rim.
    pub edge_softness: f64,
    pub noise_sigma: f64,
    pub hairs: Vec<HairStroke>,
    /// Strength of the dark corner vignette in `[0, 1]`; 0 disables it.
    pub vignette: f64,
    /// Air bubbles as `(x, y, radius)`: a bright thin rim with a specular spot.
    pub bubbles: Vec<(f64, f64, f64)>,
}

impl PhantomConfig {
    /// Plain lesion on a clean field: no noise, hair or vignette.
    pub fn plain(width: usize, height: usize, semi_axes: (f64, f64)) -> Self {
        Self {
            width,
            height,
            skin: [210, 180, 160],
            lesion: [80, 50, 45],
            center: (width as f64 / 2.0, height as f64 / 2.0),
            semi_axes,
            angle: 0.0,
            core_darkening: 0.0,
            edge_softness: 0.0,
            noise_sigma: 0.0,
            hairs: Vec::new(),
            vignette: 0.0,
            bubbles: Vec::new(),
        }
    }

    /// Add `count` random dark strokes, most of them crossing the central area.
    pub fn with_random_hair(mut self, count: usize, rng: &mut impl Rng) -> Self {
        let (w, h) = (self.width as f64, self.height as f64);
        for _ in 0..count {
            let start = (rng.random_range(0.0..w), rng.random_range(0.0..h));
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let len = rng.random_range(0.25..0.6) * w.min(h);
            let end = (start.0 + len * theta.cos(), start.1 + len * theta.sin());
            let bend = rng.random_range(-0.2..0.2) * len;
            let mid = (
                (start.0 + end.0) / 2.0 - bend * theta.sin(),
                (start.1 + end.1) / 2.0 + bend * theta.cos(),
            );
            let shade = rng.random_range(20..60u8);
            self.hairs.push(HairStroke {
                points: [start, mid, end],
                width: rng.random_range(1.0..2.6),
                color: [shade, shade.saturating_sub(8), shade.saturating_sub(12)],
            });
        }
        self
    }

    /// Randomised phantom of the kind used for corpus-level evaluation.
    pub fn random(rng: &mut impl Rng) -> Self {
        let width = rng.random_range(560..=760);
        let height = rng.random_range(480..=600);
        let min = width.min(height) as f64;
        let jitter = |rng: &mut dyn rand::RngCore, base: u8, spread: i32| -> u8 {
            (base as i32 + rng.random_range(-spread..=spread)).clamp(0, 255) as u8
        };
        let skin = [jitter(rng, 210, 15), jitter(rng, 180, 15), jitter(rng, 160, 15)];
        let lesion = [jitter(rng, 85, 20), jitter(rng, 55, 15), jitter(rng, 50, 15)];
        let a = rng.random_range(0.17..0.3) * min;
        let b = a * rng.random_range(0.6..1.0);
        let center = (
            width as f64 / 2.0 + rng.random_range(-0.06..0.06) * width as f64,
            height as f64 / 2.0 + rng.random_range(-0.06..0.06) * height as f64,
        );
        let hair = rng.random_range(5..=30);
        let bubbles = (0..rng.random_range(0..=2))
            .map(|_| {
                (
                    rng.random_range(0.0..width as f64),
                    rng.random_range(0.0..height as f64),
                    rng.random_range(0.02..0.05) * min,
                )
            })
            .collect();
        let cfg = Self {
            width,
            height,
            skin,
            lesion,
            center,
            semi_axes: (a, b),
            angle: rng.random_range(0.0..std::f64::consts::PI),
            core_darkening: rng.random_range(0.0..0.25),
            edge_softness: rng.random_range(1.0..6.0),
            noise_sigma: rng.random_range(2.0..6.0),
            hairs: Vec::new(),
            vignette: rng.random_range(0.3..0.9),
            bubbles,
        };
        cfg.with_random_hair(hair, rng)
    }

    /// Normalised elliptical radius of `(x, y)`; the lesion is `<= 1`.
    fn radius(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.center.0, y - self.center.1);
        let (s, c) = self.angle.sin_cos();
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        ((u / self.semi_axes.0).powi(2) + (v / self.semi_axes.1).powi(2)).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phantom {
    pub image: RgbImage,
    pub truth: BinaryMask,
    pub config: PhantomConfig,
}

fn smoothstep(e0: f64, e1: f64, x: f64) -> f64 {
    if e1 <= e0 {
        return if x < e0 { 0.0 } else { 1.0 };
    }
    let t = ((x - e0) / (e1 - e0)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

fn bezier(p: &[(f64, f64); 3], t: f64) -> (f64, f64) {
    let u = 1.0 - t;
    (
        u * u * p[0].0 + 2.0 * u * t * p[1].0 + t * t * p[2].0,
        u * u * p[0].1 + 2.0 * u * t * p[1].1 + t * t * p[2].1,
    )
}

fn paint_stroke(canvas: &mut [[f64; 3]], w: usize, h: usize, stroke: &HairStroke) {
    let p = &stroke.points;
    let approx_len = ((p[0].0 - p[1].0).hypot(p[0].1 - p[1].1)) + ((p[1].0 - p[2].0).hypot(p[1].1 - p[2].1));
    let steps = (approx_len * 2.0).ceil().max(2.0) as usize;
    let r = stroke.width / 2.0;
    let color = stroke.color.map(f64::from);
    for i in 0..=steps {
        let (x, y) = bezier(p, i as f64 / steps as f64);
        let (x0, x1) = ((x - r - 1.0).floor().max(0.0) as usize, ((x + r + 1.0).ceil() as usize).min(w));
        let (y0, y1) = ((y - r - 1.0).floor().max(0.0) as usize, ((y + r + 1.0).ceil() as usize).min(h));
        for py in y0..y1 {
            for px in x0..x1 {
                let d = (px as f64 + 0.5 - x).hypot(py as f64 + 0.5 - y);
                let cover = (r + 0.5 - d).clamp(0.0, 1.0);
                if cover > 0.0 {
                    let dst = &mut canvas[py * w + px];
                    for k in 0..3 {
                        let blended = dst[k] * (1.0 - cover) + color[k] * cover;
                        dst[k] = dst[k].min(blended);
                    }
                }
            }
        }
    }
}

fn paint_bubble(canvas: &mut [[f64; 3]], w: usize, h: usize, (bx, by, radius): (f64, f64, f64)) {
    let reach = radius + 2.0;
    let (x0, x1) = ((bx - reach).floor().max(0.0) as usize, ((bx + reach).ceil().max(0.0) as usize).min(w));
    let (y0, y1) = ((by - reach).floor().max(0.0) as usize, ((by + reach).ceil().max(0.0) as usize).min(h));
    let spot = (bx - 0.4 * radius, by - 0.4 * radius);
    for py in y0..y1 {
        for px in x0..x1 {
            let (x, y) = (px as f64 + 0.5, py as f64 + 0.5);
            let d = (x - bx).hypot(y - by);
            let rim = (1.0 - (d - radius).abs() / 1.5).clamp(0.0, 1.0) * 0.7;
            let glint = (1.0 - (x - spot.0).hypot(y - spot.1) / (0.2 * radius)).clamp(0.0, 1.0);
            let lift = rim.max(glint);
            if lift > 0.0 {
                let dst = &mut canvas[py * w + px];
                for v in dst.iter_mut() {
                    *v += (255.0 - *v) * lift;
                }
            }
        }
    }
}

/// Render a phantom; `seed` drives the pixel noise only.
pub fn render(config: &PhantomConfig, seed: u64) -> Phantom {
    let (w, h) = (config.width, config.height);
    let skin = config.skin.map(f64::from);
    let lesion = config.lesion.map(f64::from);
    let min_axis = config.semi_axes.0.min(config.semi_axes.1);
    let half_diag = ((w * w + h * h) as f64).sqrt() / 2.0;
    let mut canvas = vec![[0.0f64; 3]; w * h];
    let mut truth = BinaryMask::empty(w, h);

    for r in 0..h {
        for c in 0..w {
            let (x, y) = (c as f64 + 0.5, r as f64 + 0.5);
            let rho = config.radius(x, y);
            let inside = rho <= 1.0;
            truth.set(r, c, inside);
            let signed = (rho - 1.0) * min_axis;
            let alpha = if config.edge_softness > 0.0 {
                1.0 - smoothstep(-config.edge_softness / 2.0, config.edge_softness / 2.0, signed)
            } else if inside {
                1.0
            } else {
                0.0
            };
            let core = 1.0 - config.core_darkening * (1.0 - rho.min(1.0));
            let mut px = [0.0; 3];
            for k in 0..3 {
                px[k] = skin[k] * (1.0 - alpha) + lesion[k] * core * alpha;
            }
            if config.vignette > 0.0 {
                let d = (x - w as f64 / 2.0).hypot(y - h as f64 / 2.0) / half_diag;
                let shade = 1.0 - config.vignette * smoothstep(0.78, 1.0, d);
                px = px.map(|v| v * shade);
            }
            canvas[r * w + c] = px;
        }
    }
    for stroke in &config.hairs {
        paint_stroke(&mut canvas, w, h, stroke);
    }
    for &bubble in &config.bubbles {
        paint_bubble(&mut canvas, w, h, bubble);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, config.noise_sigma.max(1e-9)).expect("finite sigma");
    let data = canvas
        .iter()
        .flat_map(|px| {
            let n = if config.noise_sigma > 0.0 {
                [noise.sample(&mut rng), noise.sample(&mut rng), noise.sample(&mut rng)]
            } else {
                [0.0; 3]
            };
            [0, 1, 2].map(|k| (px[k] + n[k]).round().clamp(0.0, 255.0) as u8)
        })
        .collect();
    Phantom {
        image: RgbImage::new(w, h, data).expect("sized canvas"),
        truth,
        config: config.clone(),
    }
}

/// The `index`-th phantom of the corpus identified by `seed`.
pub fn corpus_phantom(seed: u64, index: usize) -> Phantom {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let config = PhantomConfig::random(&mut rng);
    render(&config, rng.random())
}
