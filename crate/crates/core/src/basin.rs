//! Escape-time pictures of the two basins of attraction: every pixel center
//! is iterated until its overlap with the reference or with the orthogonal
//! state reaches the target, and the verdict and step count are recorded.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::complex::ExtComplex;
use crate::document::format_real;
use crate::error::{Error, Result};
use crate::gate::TwoQubitGate;
use crate::matcher::{Matcher, Verdict, DEFAULT_MAX_ITER, DEFAULT_TARGET_SQR};
use crate::protocol;

/// How a pixel is advanced by one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapSource {
    /// Evaluate the matcher's rational map.
    AnalyticMap,
    /// Simulate the protocol with this gate.
    Gate(TwoQubitGate),
}

/// Square-pixel viewport. `half_width` is along the real axis; the
/// imaginary half-extent is scaled by `ny/nx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: Complex64,
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterConfig {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub threshold_sq: f64,
    pub max_iter: usize,
    pub source: MapSource,
}

impl RasterConfig {
    pub fn new(window: Window, nx: usize, ny: usize) -> Result<Self> {
        let cfg = RasterConfig {
            window,
            nx,
            ny,
            threshold_sq: DEFAULT_TARGET_SQR,
            max_iter: DEFAULT_MAX_ITER,
            source: MapSource::AnalyticMap,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Centered on the Julia circle with half-width 2.5 radii. For a Julia
    /// line the window is centered on the reference instead.
    pub fn default_for(m: &Matcher, nx: usize, ny: usize) -> Result<Self> {
        let julia = m.julia_circle();
        let window = match (julia.center(), julia.radius()) {
            (Some(center), Some(r)) => Window { center, half_width: 2.5 * r },
            _ => {
                let z1 = m.reference().finite().unwrap_or_default();
                Window { center: z1, half_width: 2.5 * (1.0 + z1.norm()) }
            }
        };
        Self::new(window, nx, ny)
    }

    pub fn with_threshold_sq(mut self, t: f64) -> Result<Self> {
        self.threshold_sq = t;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_iter(mut self, n: usize) -> Result<Self> {
        self.max_iter = n;
        self.validate()?;
        Ok(self)
    }

    pub fn with_source(mut self, source: MapSource) -> Self {
        self.source = source;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::domain(format!("resolution must be at least 2x2, got {}x{}", self.nx, self.ny)));
        }
        if !(self.threshold_sq > 0.0 && self.threshold_sq < 1.0) {
            return Err(Error::domain(format!("threshold² must lie in (0, 1), got {}", self.threshold_sq)));
        }
        let w = &self.window;
        if !(w.half_width > 0.0 && w.half_width.is_finite() && w.center.re.is_finite() && w.center.im.is_finite()) {
            return Err(Error::domain("window must have a finite center and positive half-width"));
        }
        if self.max_iter == 0 {
            return Err(Error::domain("max_iter must be at least 1"));
        }
        Ok(())
    }

    /// Center of pixel `(ix, iy)`; row 0 is the top of the image.
    pub fn pixel_center(&self, ix: usize, iy: usize) -> Complex64 {
        pixel_center(&self.window, self.nx, self.ny, ix, iy)
    }
}

fn pixel_center(w: &Window, nx: usize, ny: usize, ix: usize, iy: usize) -> Complex64 {
    let step = 2.0 * w.half_width / nx as f64;
    let half_height = w.half_width * ny as f64 / nx as f64;
    Complex64::new(
        w.center.re - w.half_width + (ix as f64 + 0.5) * step,
        w.center.im + half_height - (iy as f64 + 0.5) * step,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Reference,
    Partner,
    Undecided,
}

impl Region {
    /// `+1`, `−1` or `0`.
    pub fn sign(self) -> i8 {
        match self {
            Region::Reference => 1,
            Region::Partner => -1,
            Region::Undecided => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pixel {
    pub region: Region,
    pub iterations: usize,
}

impl Pixel {
    fn from_verdict(v: Verdict, max_iter: usize) -> Self {
        match v {
            Verdict::Reference(k) => Pixel { region: Region::Reference, iterations: k },
            Verdict::Partner(k) => Pixel { region: Region::Partner, iterations: k },
            Verdict::Undecided => Pixel { region: Region::Undecided, iterations: max_iter },
        }
    }
}

/// Row-major pixels, top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinGrid {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub max_iter: usize,
    pub pixels: Vec<Pixel>,
}

impl BasinGrid {
    pub fn get(&self, ix: usize, iy: usize) -> Pixel {
        self.pixels[iy * self.nx + ix]
    }

    pub fn pixel_center(&self, ix: usize, iy: usize) -> Complex64 {
        pixel_center(&self.window, self.nx, self.ny, ix, iy)
    }

    /// `(z, pixel)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Complex64, Pixel)> + '_ {
        (0..self.ny).flat_map(move |iy| (0..self.nx).map(move |ix| (self.pixel_center(ix, iy), self.get(ix, iy))))
    }
}

/// Classifies a single point as [`rasterize`] would.
pub fn classify_point(m: &Matcher, z: &ExtComplex, cfg: &RasterConfig) -> Result<Pixel> {
    let target = cfg.threshold_sq.sqrt();
    let v = match &cfg.source {
        MapSource::AnalyticMap => m.match_state(z, target, cfg.max_iter)?,
        MapSource::Gate(u) => m.match_with(z, target, cfg.max_iter, |z| Ok(protocol::protocol_step(u, z)?.z_out))?,
    };
    Ok(Pixel::from_verdict(v, cfg.max_iter))
}

pub fn rasterize(m: &Matcher, cfg: &RasterConfig) -> Result<BasinGrid> {
    cfg.validate()?;
    let rows: Vec<Vec<Pixel>> = (0..cfg.ny)
        .into_par_iter()
        .map(|iy| {
            (0..cfg.nx)
                .map(|ix| classify_point(m, &cfg.pixel_center(ix, iy).into(), cfg))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(BasinGrid {
        window: cfg.window,
        nx: cfg.nx,
        ny: cfg.ny,
        max_iter: cfg.max_iter,
        pixels: rows.into_iter().flatten().collect(),
    })
}

/// Companion file holding the region map: `out.pgm` → `out.region.pgm`.
pub fn region_path(path: &Path) -> PathBuf {
    path.with_extension("region.pgm")
}

/// Writes the iteration-count image to `path` and the region image next to
/// it, both as binary PGM.
pub fn write_image(grid: &BasinGrid, path: &Path) -> Result<()> {
    let counts: Vec<u8> = grid
        .pixels
        .iter()
        .map(|p| match p.region {
            Region::Undecided => 255,
            _ => (255 * p.iterations / grid.max_iter).min(255) as u8,
        })
        .collect();
    let regions: Vec<u8> = grid
        .pixels
        .iter()
        .map(|p| match p.region {
            Region::Partner => 0,
            Region::Undecided => 128,
            Region::Reference => 255,
        })
        .collect();
    write_pgm(path, grid.nx, grid.ny, &counts)?;
    write_pgm(&region_path(path), grid.nx, grid.ny, &regions)
}

fn write_pgm(path: &Path, w: usize, h: usize, data: &[u8]) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    write!(out, "P5\n{w} {h}\n255\n").map_err(io)?;
    out.write_all(data).map_err(io)?;
    out.flush().map_err(io)
}

/// `re,im,region,iterations`, one row per pixel in image order.
pub fn write_csv(grid: &BasinGrid, path: &Path, digits: usize) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(out, "re,im,region,iterations").map_err(io)?;
    for (z, p) in grid.iter() {
        writeln!(
            out,
            "{},{},{},{}",
            format_real(z.re, digits),
            format_real(z.im, digits),
            p.region.sign(),
            p.iterations
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}
