//! Deterministic raster images: escape-time maps and hyperbolic density maps,
//! written as binary PPM (`P6`, maxval 255).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{iterate_with, Classification, ClassifyParams, ComplexPoint};
use crate::hyperbolic::{density, HyperbolicDomain};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// A rectangle in the plane sampled at pixel centers. Pixel `(0, 0)` is the
/// top-left corner `(re_min, im_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn new(re: (f64, f64), im: (f64, f64), width: usize, height: usize) -> Result<Self, RenderError> {
        let g = GridSpec { re_min: re.0, re_max: re.1, im_min: im.0, im_max: im.1, width, height };
        g.check()?;
        Ok(g)
    }

    /// A `1×1` grid whose single pixel center is `z`.
    pub fn point(z: ComplexPoint) -> Self {
        GridSpec { re_min: z.re - 0.5, re_max: z.re + 0.5, im_min: z.im - 0.5, im_max: z.im + 0.5, width: 1, height: 1 }
    }

    pub fn check(&self) -> Result<(), RenderError> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|x| x.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(RenderError::InvalidGrid(format!("{self:?}")));
        }
        if self.width == 0 || self.height == 0 {
            return Err(RenderError::InvalidGrid("width and height must be positive".into()));
        }
        Ok(())
    }

    pub fn pixel_center(&self, col: usize, row: usize) -> ComplexPoint {
        let dx = (self.re_max - self.re_min) / self.width as f64;
        let dy = (self.im_max - self.im_min) / self.height as f64;
        ComplexPoint::new(self.re_min + (col as f64 + 0.5) * dx, self.im_max - (row as f64 + 0.5) * dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Palette {
    /// Brightness falls linearly with the first step whose real part exceeds the threshold.
    Grayscale,
    /// One fixed color per [`Classification`] variant.
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderParams {
    pub max_steps: usize,
    pub escape_re_threshold: f64,
    pub palette: Palette,
}

impl Default for RenderParams {
    fn default() -> Self {
        RenderParams { max_steps: 40, escape_re_threshold: 50.0, palette: Palette::Grayscale }
    }
}

pub const CERTIFIED_RGB: [u8; 3] = [255, 200, 0];
pub const HEURISTIC_RGB: [u8; 3] = [220, 60, 30];
pub const PERIODIC_RGB: [u8; 3] = [40, 120, 255];
pub const UNRESOLVED_RGB: [u8; 3] = [0, 0, 0];
pub const OVERFLOWED_RGB: [u8; 3] = [255, 255, 255];

pub fn classification_rgb(c: &Classification) -> [u8; 3] {
    match c {
        Classification::EscapingCertified => CERTIFIED_RGB,
        Classification::EscapingHeuristic => HEURISTIC_RGB,
        Classification::PeriodicDetected { .. } => PERIODIC_RGB,
        Classification::Unresolved => UNRESOLVED_RGB,
        Classification::Overflowed { .. } => OVERFLOWED_RGB,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Threading {
    Sequential,
    RowParallel,
}

/// Color of the pixel centered at `z`.
pub fn escape_pixel(z: ComplexPoint, params: &RenderParams) -> [u8; 3] {
    let cp = ClassifyParams { escape_re_threshold: params.escape_re_threshold, ..ClassifyParams::default() };
    let record = iterate_with(z, params.max_steps, &cp);
    match params.palette {
        Palette::Classification => classification_rgb(&record.classification),
        Palette::Grayscale => {
            // An overflowed step had a real part past any threshold we accept.
            let crossing = record.points.iter().position(|p| !p.re.is_finite() || p.re > params.escape_re_threshold);
            let g = match crossing {
                Some(s) => (255.0 * (1.0 - s as f64 / params.max_steps.max(1) as f64)).round().clamp(0.0, 255.0) as u8,
                None => 0,
            };
            [g, g, g]
        }
    }
}

fn render_rows(grid: &GridSpec, threading: Threading, pixel: impl Fn(ComplexPoint) -> [u8; 3] + Sync) -> Vec<u8> {
    let row_len = 3 * grid.width;
    let mut body = vec![0u8; row_len * grid.height];
    let fill = |(row, out): (usize, &mut [u8])| {
        for col in 0..grid.width {
            out[3 * col..3 * col + 3].copy_from_slice(&pixel(grid.pixel_center(col, row)));
        }
    };
    match threading {
        Threading::Sequential => body.chunks_mut(row_len).enumerate().for_each(fill),
        Threading::RowParallel => body.par_chunks_mut(row_len).enumerate().for_each(fill),
    }
    body
}

/// Wraps raw RGB rows in a `P6` header.
pub fn to_ppm(width: usize, height: usize, rgb: &[u8]) -> Vec<u8> {
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(rgb);
    out
}

pub fn render_escape_map(grid: &GridSpec, params: &RenderParams) -> Result<Vec<u8>, RenderError> {
    render_escape_map_with(grid, params, Threading::RowParallel)
}

pub fn render_escape_map_with(
    grid: &GridSpec,
    params: &RenderParams,
    threading: Threading,
) -> Result<Vec<u8>, RenderError> {
    grid.check()?;
    let body = render_rows(grid, threading, |z| escape_pixel(z, params));
    Ok(to_ppm(grid.width, grid.height, &body))
}

pub fn render_density_map(domain: HyperbolicDomain, grid: &GridSpec) -> Result<Vec<u8>, RenderError> {
    render_density_map_with(domain, grid, Threading::RowParallel)
}

/// `log ρ` scaled linearly onto `1..=255` over the in-domain pixels; the
/// rest stay black.
pub fn render_density_map_with(
    domain: HyperbolicDomain,
    grid: &GridSpec,
    threading: Threading,
) -> Result<Vec<u8>, RenderError> {
    grid.check()?;
    let log_density = |z: ComplexPoint| density(domain, z).ok().map(f64::ln).filter(|l| l.is_finite());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in 0..grid.height {
        for col in 0..grid.width {
            if let Some(l) = log_density(grid.pixel_center(col, row)) {
                lo = lo.min(l);
                hi = hi.max(l);
            }
        }
    }
    let span = hi - lo;
    let body = render_rows(grid, threading, |z| match log_density(z) {
        None => [0, 0, 0],
        Some(l) => {
            let g = if span > 0.0 { 1.0 + (254.0 * (l - lo) / span).round() } else { 255.0 };
            let g = g as u8;
            [g, g, g]
        }
    });
    Ok(to_ppm(grid.width, grid.height, &body))
}

/// Splits a `P6` file into `(width, height, rgb)`.
pub fn parse_ppm(bytes: &[u8]) -> Option<(usize, usize, &[u8])> {
    let mut fields = Vec::new();
    let mut i = 0;
    while fields.len() < 4 {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..i]).ok()?);
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return None;
    }
    let (w, h): (usize, usize) = (fields[1].parse().ok()?, fields[2].parse().ok()?);
    let rgb = bytes.get(i + 1..)?;
    (rgb.len() == 3 * w * h).then_some((w, h, rgb))
}
