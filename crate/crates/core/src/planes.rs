//! Dynamical and parameter planes: per-pixel orbit fates, coloring and PPM output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{critical_points, AnalysisError};
use crate::poly::{Complex, ExtComplex, RationalMap};

pub const DEFAULT_MAX_ITER: u32 = 150;
pub const DEFAULT_CONV_RADIUS: f64 = 1e-4;
pub const DEFAULT_INFINITY_RADIUS: f64 = 1e8;

/// Critical points this close to `±1` are not candidates for the free orbit.
const UNIT_EXCLUSION: f64 = 1e-6;
/// Critical points within this distance of the unit circle count as lying on it.
const UNIT_CIRCLE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PlaneError {
    #[error("invalid render configuration: {0}")]
    InvalidConfig(String),
    #[error("no free critical point")]
    NoFreeCritical,
    #[error("{0} free critical pairs; pass an explicit selector index")]
    MultipleFreePairs(usize),
    #[error("selector index {index} out of range ({pairs} free critical pairs)")]
    SelectorOutOfRange { index: usize, pairs: usize },
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorMode {
    Speed,
    Attractor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderConfig {
    /// `(x_min, x_max, y_min, y_max)`.
    pub window: (f64, f64, f64, f64),
    pub width: usize,
    pub height: usize,
    pub max_iter: u32,
    pub conv_radius: f64,
    pub infinity_radius: f64,
    pub mode: ColorMode,
    /// Worker threads; `None` leaves the choice to rayon.
    pub threads: Option<usize>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            window: (-2.0, 2.0, -2.0, 2.0),
            width: 400,
            height: 400,
            max_iter: DEFAULT_MAX_ITER,
            conv_radius: DEFAULT_CONV_RADIUS,
            infinity_radius: DEFAULT_INFINITY_RADIUS,
            mode: ColorMode::Speed,
            threads: None,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<(), PlaneError> {
        let (x0, x1, y0, y1) = self.window;
        let bad = |m: &str| Err(PlaneError::InvalidConfig(m.to_string()));
        if ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) || !(x0 < x1) || !(y0 < y1) {
            return bad("window needs x_min < x_max and y_min < y_max");
        }
        if self.width == 0 || self.height == 0 {
            return bad("resolution must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if !(self.conv_radius > 0.0) || !self.conv_radius.is_finite() {
            return bad("conv_radius must be positive");
        }
        if !(self.infinity_radius > 1.0) {
            return bad("infinity_radius must exceed 1");
        }
        if self.threads == Some(0) {
            return bad("thread count must be positive");
        }
        Ok(())
    }

    /// Centre of the pixel cell at column `col`, row `row`; row 0 is the top edge.
    pub fn pixel_point(&self, col: usize, row: usize) -> Complex {
        let (x0, x1, y0, y1) = self.window;
        let dx = (x1 - x0) / self.width as f64;
        let dy = (y1 - y0) / self.height as f64;
        Complex::new(x0 + (col as f64 + 0.5) * dx, y1 - (row as f64 + 0.5) * dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Root0,
    RootInf,
    StrangeAttractor,
    None,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Root0 => "root-0",
            Outcome::RootInf => "root-inf",
            Outcome::StrangeAttractor => "strange-attractor",
            Outcome::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PixelRecord {
    pub outcome: Outcome,
    pub iterations: u32,
}

/// A finite attracting point or cycle other than `0` and `∞`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnownAttractor {
    Point(Complex),
    Cycle(Vec<Complex>),
}

impl KnownAttractor {
    fn points(&self) -> &[Complex] {
        match self {
            KnownAttractor::Point(p) => std::slice::from_ref(p),
            KnownAttractor::Cycle(c) => c,
        }
    }

    /// Keep the finite members of a sequence of points on the sphere.
    pub fn from_ext(points: &[ExtComplex]) -> Option<Self> {
        let finite: Vec<Complex> = points.iter().filter_map(|p| p.as_finite()).collect();
        match finite.len() {
            0 => None,
            1 => Some(KnownAttractor::Point(finite[0])),
            _ => Some(KnownAttractor::Cycle(finite)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<PixelRecord>,
    pub rgb: Vec<u8>,
    pub config: RenderConfig,
    /// Parameter pixels with no usable free critical point.
    pub no_free_critical: usize,
    /// Parameter pixels where the default selector saw more than one pair.
    pub ambiguous_critical: usize,
}

impl PlaneImage {
    pub fn pixel(&self, col: usize, row: usize) -> PixelRecord {
        self.pixels[row * self.width + col]
    }

    pub fn count(&self, outcome: Outcome) -> usize {
        self.pixels.iter().filter(|p| p.outcome == outcome).count()
    }

    /// Recolor in another mode without iterating again.
    pub fn recolor(&mut self, mode: ColorMode) {
        self.config.mode = mode;
        self.rgb = colorize(&self.pixels, self.config.max_iter, mode);
    }
}

/// Fate of the orbit of `z0`.
///
/// At each step `t = 0, 1, …` the current point is tested against `0`, `∞` and the
/// known attractors before `R` is applied again.
pub fn iterate_orbit(r: &RationalMap, z0: Complex, cfg: &RenderConfig, attractors: &[KnownAttractor]) -> PixelRecord {
    let mut z = z0;
    for t in 0..cfg.max_iter {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= cfg.infinity_radius {
            return PixelRecord { outcome: Outcome::RootInf, iterations: t };
        }
        if z.norm() < cfg.conv_radius {
            return PixelRecord { outcome: Outcome::Root0, iterations: t };
        }
        if attractors.iter().flat_map(|a| a.points()).any(|p| (z - p).norm() < cfg.conv_radius) {
            return PixelRecord { outcome: Outcome::StrangeAttractor, iterations: t };
        }
        z = r.eval_c(z);
    }
    PixelRecord { outcome: Outcome::None, iterations: cfg.max_iter }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, PlaneError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| PlaneError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

fn render_rows<F>(cfg: &RenderConfig, per_pixel: F) -> Result<Vec<PixelRecord>, PlaneError>
where
    F: Fn(Complex) -> PixelRecord + Sync,
{
    let blank = PixelRecord { outcome: Outcome::None, iterations: cfg.max_iter };
    let mut pixels = vec![blank; cfg.width * cfg.height];
    with_pool(cfg.threads, || {
        pixels.par_chunks_mut(cfg.width).enumerate().for_each(|(row, line)| {
            for (col, px) in line.iter_mut().enumerate() {
                *px = per_pixel(cfg.pixel_point(col, row));
            }
        })
    })?;
    Ok(pixels)
}

/// Orbit fate of every pixel of the window under `R`.
pub fn dynamical_plane(
    r: &RationalMap,
    cfg: &RenderConfig,
    attractors: &[KnownAttractor],
) -> Result<PlaneImage, PlaneError> {
    cfg.validate()?;
    let pixels = render_rows(cfg, |z| iterate_orbit(r, z, cfg, attractors))?;
    let rgb = colorize(&pixels, cfg.max_iter, cfg.mode);
    Ok(PlaneImage {
        width: cfg.width,
        height: cfg.height,
        pixels,
        rgb,
        config: cfg.clone(),
        no_free_critical: 0,
        ambiguous_critical: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalSelector {
    /// The only free pair; an error when there are several.
    #[default]
    Default,
    /// The pair at this position in the order of [`free_critical_representatives`].
    Index(usize),
}

/// One free critical point per `ι`-pair `{κ, 1/κ}`, taken with `|κ| ≤ 1`.
///
/// Points near `±1` are left out. When both members lie on the unit circle the
/// one with the smaller principal argument represents the pair. Sorted by modulus, then argument.
pub fn free_critical_representatives(r: &RationalMap) -> Result<Vec<Complex>, PlaneError> {
    let mut inside = Vec::new();
    let mut on_circle = Vec::new();
    for cp in critical_points(r)?.into_iter().filter(|c| c.free) {
        let Some(k) = cp.point.as_finite() else { continue };
        if (k - 1.0).norm() <= UNIT_EXCLUSION || (k + 1.0).norm() <= UNIT_EXCLUSION {
            continue;
        }
        let m = k.norm();
        if (m - 1.0).abs() <= UNIT_CIRCLE_TOL {
            on_circle.push(k);
        } else if m < 1.0 {
            inside.push(k);
        }
    }
    let mut reps = inside;
    on_circle.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    let mut used = vec![false; on_circle.len()];
    for i in 0..on_circle.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let partner = on_circle[i].inv();
        if let Some(j) = (i + 1..on_circle.len()).find(|&j| !used[j] && (on_circle[j] - partner).norm() <= 1e-6) {
            used[j] = true;
        }
        reps.push(on_circle[i]);
    }
    reps.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(reps)
}

/// The critical point whose orbit a parameter-plane pixel follows.
pub fn select_critical(r: &RationalMap, selector: CriticalSelector) -> Result<Complex, PlaneError> {
    let reps = free_critical_representatives(r)?;
    match selector {
        _ if reps.is_empty() => Err(PlaneError::NoFreeCritical),
        CriticalSelector::Default if reps.len() > 1 => Err(PlaneError::MultipleFreePairs(reps.len())),
        CriticalSelector::Default => Ok(reps[0]),
        CriticalSelector::Index(i) => reps
            .get(i)
            .copied()
            .ok_or(PlaneError::SelectorOutOfRange { index: i, pairs: reps.len() }),
    }
}

#[derive(Clone, Copy)]
enum PixelStatus {
    Ok,
    NoFree,
    Ambiguous,
}

/// Fate of the selected free critical orbit at every parameter in the window.
///
/// The family is probed at the window centre first, so a family with several free
/// pairs needs an explicit index. Parameters where the operator cannot be built or
/// has no free critical point are flagged `none` and counted.
pub fn parameter_plane<F>(
    family: F,
    selector: CriticalSelector,
    cfg: &RenderConfig,
    attractors: &[KnownAttractor],
) -> Result<PlaneImage, PlaneError>
where
    F: Fn(Complex) -> Option<RationalMap> + Sync,
{
    cfg.validate()?;
    let (x0, x1, y0, y1) = cfg.window;
    let probe = Complex::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    if let Some(r) = family(probe) {
        match select_critical(&r, selector) {
            Err(e @ PlaneError::MultipleFreePairs(_)) | Err(e @ PlaneError::SelectorOutOfRange { .. }) => return Err(e),
            _ => {}
        }
    }
    let blank = PixelRecord { outcome: Outcome::None, iterations: cfg.max_iter };
    let mut cells = vec![(blank, PixelStatus::Ok); cfg.width * cfg.height];
    with_pool(cfg.threads, || {
        cells.par_chunks_mut(cfg.width).enumerate().for_each(|(row, line)| {
            for (col, cell) in line.iter_mut().enumerate() {
                *cell = parameter_pixel(&family, selector, cfg, attractors, cfg.pixel_point(col, row));
            }
        })
    })?;
    let no_free_critical = cells.iter().filter(|c| matches!(c.1, PixelStatus::NoFree)).count();
    let ambiguous_critical = cells.iter().filter(|c| matches!(c.1, PixelStatus::Ambiguous)).count();
    let pixels: Vec<PixelRecord> = cells.into_iter().map(|c| c.0).collect();
    let rgb = colorize(&pixels, cfg.max_iter, cfg.mode);
    Ok(PlaneImage {
        width: cfg.width,
        height: cfg.height,
        pixels,
        rgb,
        config: cfg.clone(),
        no_free_critical,
        ambiguous_critical,
    })
}

fn parameter_pixel<F>(
    family: &F,
    selector: CriticalSelector,
    cfg: &RenderConfig,
    attractors: &[KnownAttractor],
    alpha: Complex,
) -> (PixelRecord, PixelStatus)
where
    F: Fn(Complex) -> Option<RationalMap>,
{
    let none = PixelRecord { outcome: Outcome::None, iterations: cfg.max_iter };
    let Some(r) = family(alpha) else { return (none, PixelStatus::NoFree) };
    let reps = match free_critical_representatives(&r) {
        Ok(reps) if !reps.is_empty() => reps,
        _ => return (none, PixelStatus::NoFree),
    };
    let (kappa, status) = match selector {
        CriticalSelector::Default if reps.len() > 1 => (reps[0], PixelStatus::Ambiguous),
        CriticalSelector::Default => (reps[0], PixelStatus::Ok),
        CriticalSelector::Index(i) => match reps.get(i) {
            Some(&k) => (k, PixelStatus::Ok),
            None => return (none, PixelStatus::NoFree),
        },
    };
    (iterate_orbit(&r, kappa, cfg, attractors), status)
}

const SPEED_STOPS: [(f64, [f64; 3]); 5] = [
    (0.0, [255.0, 0.0, 0.0]),
    (0.25, [255.0, 255.0, 0.0]),
    (0.5, [0.0, 255.0, 0.0]),
    (0.75, [0.0, 0.0, 255.0]),
    (1.0, [128.0, 128.0, 128.0]),
];

fn lerp(a: [f64; 3], b: [f64; 3], s: f64) -> [u8; 3] {
    let ch = |i: usize| (a[i] + (b[i] - a[i]) * s).round().clamp(0.0, 255.0) as u8;
    [ch(0), ch(1), ch(2)]
}

/// Red, yellow, green, blue, grey at `t = 0, 0.25, 0.5, 0.75, 1`.
pub fn speed_color(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    for w in SPEED_STOPS.windows(2) {
        let ((t0, c0), (t1, c1)) = (w[0], w[1]);
        if t <= t1 {
            return lerp(c0, c1, (t - t0) / (t1 - t0));
        }
    }
    [128, 128, 128]
}

/// Color of one pixel record.
pub fn pixel_color(p: PixelRecord, max_iter: u32, mode: ColorMode) -> [u8; 3] {
    let t = p.iterations as f64 / max_iter as f64;
    match (p.outcome, mode) {
        (Outcome::None, _) => [0, 0, 0],
        (Outcome::StrangeAttractor, ColorMode::Attractor) => lerp([0.0, 255.0, 0.0], [0.0, 96.0, 0.0], t.clamp(0.0, 1.0)),
        _ => speed_color(t),
    }
}

/// RGB buffer, row-major, three bytes per pixel.
pub fn colorize(pixels: &[PixelRecord], max_iter: u32, mode: ColorMode) -> Vec<u8> {
    pixels.iter().flat_map(|&p| pixel_color(p, max_iter, mode)).collect()
}

/// Binary PPM bytes of an image.
pub fn encode_ppm(img: &PlaneImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.rgb);
    out
}

pub fn write_image(img: &PlaneImage, path: &Path) -> Result<(), PlaneError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&encode_ppm(img))?;
    f.flush()?;
    Ok(())
}

/// `key=value` lines describing a render; `extra` is appended as given.
pub fn sidecar_text(img: &PlaneImage, extra: &[(String, String)]) -> String {
    let cfg = &img.config;
    let (x0, x1, y0, y1) = cfg.window;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k}={v}");
    };
    kv("width", img.width.to_string());
    kv("height", img.height.to_string());
    kv("window", format!("{x0},{x1},{y0},{y1}"));
    kv("max_iter", cfg.max_iter.to_string());
    kv("conv_radius", format!("{:e}", cfg.conv_radius));
    kv("infinity_radius", format!("{:e}", cfg.infinity_radius));
    kv("mode", match cfg.mode {
        ColorMode::Speed => "speed".into(),
        ColorMode::Attractor => "attractor".into(),
    });
    for o in [Outcome::Root0, Outcome::RootInf, Outcome::StrangeAttractor, Outcome::None] {
        kv(&format!("count.{}", o.label()), img.count(o).to_string());
    }
    kv("no_free_critical", img.no_free_critical.to_string());
    kv("ambiguous_critical", img.ambiguous_critical.to_string());
    for (k, v) in extra {
        kv(k, v.clone());
    }
    s
}

pub fn write_sidecar(img: &PlaneImage, path: &Path, extra: &[(String, String)]) -> Result<(), PlaneError> {
    std::fs::write(path, sidecar_text(img, extra))?;
    Ok(())
}
