//! Zero counting and location for analytic functions by discrete phase
//! tracking along region boundaries, quadtree subdivision with Newton
//! polishing, and sign-change scanning on real intervals.

use crate::csv_out::CsvWriter;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, TAU};

pub const MAX_DEPTH: u32 = 24;
pub const RETRY_BUDGET: u32 = 8;
pub const DEFAULT_SIDE_SAMPLES: usize = 16;
pub const NEWTON_ITERATIONS: usize = 50;
pub const SAMPLING_ESCALATIONS: u32 = 2;
const MIN_MODULUS_FACTOR: f64 = 1e-13;
const REAL_GRID_DIVISIONS: f64 = 2048.0;

/// The domain a region must lie strictly inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainTag {
    HalfPlane,
    UnitDisk,
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub shape: Shape,
    pub domain: DomainTag,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Region {
    pub fn rectangle(lo: Complex64, hi: Complex64, domain: DomainTag) -> Result<Self> {
        if !(lo.re < hi.re && lo.im < hi.im) {
            return Err(Error::InvalidArgument(format!("rectangle needs lo < hi, got {lo} and {hi}")));
        }
        let r = Self { shape: Shape::Rectangle { lo: pair(lo), hi: pair(hi) }, domain };
        r.check_domain()?;
        Ok(r)
    }

    pub fn disk(center: Complex64, radius: f64, domain: DomainTag) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("disk radius must be positive, got {radius}")));
        }
        let r = Self { shape: Shape::Disk { center: pair(center), radius }, domain };
        r.check_domain()?;
        Ok(r)
    }

    fn check_domain(&self) -> Result<()> {
        let ok = match (self.domain, self.shape) {
            (DomainTag::Plane, _) => true,
            (DomainTag::HalfPlane, Shape::Rectangle { lo, .. }) => lo[0] > 0.0,
            (DomainTag::HalfPlane, Shape::Disk { center, radius }) => center[0] - radius > 0.0,
            (DomainTag::UnitDisk, Shape::Rectangle { lo, hi }) => {
                [lo, hi, [lo[0], hi[1]], [hi[0], lo[1]]].iter().all(|&p| cx(p).norm() < 1.0)
            }
            (DomainTag::UnitDisk, Shape::Disk { center, radius }) => cx(center).norm() + radius < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("region {:?} not strictly inside {:?}", self.shape, self.domain)))
        }
    }

    pub fn diameter(&self) -> f64 {
        match self.shape {
            Shape::Rectangle { lo, hi } => (cx(hi) - cx(lo)).norm(),
            Shape::Disk { radius, .. } => 2.0 * radius,
        }
    }

    pub fn center(&self) -> Complex64 {
        match self.shape {
            Shape::Rectangle { lo, hi } => (cx(lo) + cx(hi)) * 0.5,
            Shape::Disk { center, .. } => cx(center),
        }
    }

    /// Strict interior membership.
    pub fn contains(&self, z: Complex64) -> bool {
        match self.shape {
            Shape::Rectangle { lo, hi } => lo[0] < z.re && z.re < hi[0] && lo[1] < z.im && z.im < hi[1],
            Shape::Disk { center, radius } => (z - cx(center)).norm() < radius,
        }
    }

    fn translated(&self, d: Complex64) -> Self {
        let shape = match self.shape {
            Shape::Rectangle { lo, hi } => Shape::Rectangle { lo: pair(cx(lo) + d), hi: pair(cx(hi) + d) },
            Shape::Disk { center, radius } => Shape::Disk { center: pair(cx(center) + d), radius },
        };
        Self { shape, domain: self.domain }
    }

    fn seed_bits(&self) -> u64 {
        let xs: Vec<f64> = match self.shape {
            Shape::Rectangle { lo, hi } => vec![lo[0], lo[1], hi[0], hi[1]],
            Shape::Disk { center, radius } => vec![center[0], center[1], radius],
        };
        xs.iter().fold(0x9e37_79b9_7f4a_7c15, |h, x| splitmix(h ^ x.to_bits()))
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic offset in [−1, 1]² keyed by `seed` and `attempt`.
fn jitter(seed: u64, attempt: u32) -> Complex64 {
    let a = splitmix(seed ^ u64::from(attempt).wrapping_mul(0xa076_1d64_78bd_642f));
    let b = splitmix(a);
    let unit = |u: u64| (u >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    Complex64::new(unit(a), unit(b))
}

/// Atoms of a zero-counting measure.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasure {
    pub atoms: Vec<(Complex64, u32)>,
    pub region: Region,
}

impl PointMeasure {
    pub fn total(&self) -> u32 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn to_csv(&self) -> String {
        let meta = serde_json::to_string(&self.region).expect("region serializes");
        let mut w = CsvWriter::with_comment(&meta, &["re", "im", "multiplicity"]);
        for (z, m) in &self.atoms {
            w.row(&[crate::csv_out::fmt_f64(z.re), crate::csv_out::fmt_f64(z.im), m.to_string()]);
        }
        w.finish()
    }
}

/// Tuning knobs for boundary phase tracking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingOptions {
    /// Initial samples per rectangle side (a disk gets four times this).
    pub side_samples: usize,
    /// Boundary-zero threshold; `None` means 1e−13·max|f| on the initial samples.
    pub min_modulus: Option<f64>,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self { side_samples: DEFAULT_SIDE_SAMPLES, min_modulus: None }
    }
}

// A boundary piece, parametrized by t ∈ [0, 1], traversed start → end.
#[derive(Clone, Copy)]
enum Piece {
    // canonical endpoints a ≤ b; `reversed` walks b → a
    Segment { a: Complex64, b: Complex64, reversed: bool },
    Arc { center: Complex64, radius: f64 },
}

impl Piece {
    fn segment(from: Complex64, to: Complex64) -> Self {
        if (from.re, from.im) <= (to.re, to.im) {
            Piece::Segment { a: from, b: to, reversed: false }
        } else {
            Piece::Segment { a: to, b: from, reversed: true }
        }
    }

    fn at(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Segment { a, b, reversed } => {
                let u = if reversed { 1.0 - t } else { t };
                a + (b - a) * u
            }
            Piece::Arc { center, radius } => center + Complex64::from_polar(radius, TAU * t),
        }
    }
}

fn boundary(region: &Region) -> Vec<Piece> {
    match region.shape {
        Shape::Rectangle { lo, hi } => {
            let (a, b, c, d) = (cx(lo), Complex64::new(hi[0], lo[1]), cx(hi), Complex64::new(lo[0], hi[1]));
            vec![Piece::segment(a, b), Piece::segment(b, c), Piece::segment(c, d), Piece::segment(d, a)]
        }
        Shape::Disk { center, radius } => vec![Piece::Arc { center: cx(center), radius }],
    }
}

struct Tracker<'a, F> {
    f: &'a F,
    threshold: f64,
}

impl<F: Fn(Complex64) -> Complex64> Tracker<'_, F> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = (self.f)(z);
        if !(v.norm() >= self.threshold) {
            return Err(Error::BoundaryZero { re: z.re, im: z.im });
        }
        Ok(v)
    }

    // A segment is accepted once its endpoint increment is below π/2 and
    // the midpoint confirms it; a zero (above all a multiple one) close to
    // the segment can turn the phase by a full 2π between two samples.
    fn phase(&self, piece: &Piece, t0: f64, f0: Complex64, t1: f64, f1: Complex64, depth: u32) -> Result<f64> {
        let d = (f1 / f0).arg();
        let tm = 0.5 * (t0 + t1);
        if d.abs() < FRAC_PI_2 {
            let fm = self.eval(piece.at(tm))?;
            let (d0, d1) = ((fm / f0).arg(), (f1 / fm).arg());
            if d0.abs() < FRAC_PI_2 && d1.abs() < FRAC_PI_2 && (d0 + d1 - d).abs() < 1e-9 {
                return Ok(d0 + d1);
            }
            if depth >= MAX_DEPTH {
                return Err(Error::NonConvergence(MAX_DEPTH));
            }
            return Ok(self.phase(piece, t0, f0, tm, fm, depth + 1)? + self.phase(piece, tm, fm, t1, f1, depth + 1)?);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NonConvergence(MAX_DEPTH));
        }
        let fm = self.eval(piece.at(tm))?;
        Ok(self.phase(piece, t0, f0, tm, fm, depth + 1)? + self.phase(piece, tm, fm, t1, f1, depth + 1)?)
    }
}

/// Number of zeros inside `region`, with multiplicity.
pub fn winding_count<F>(f: &F, region: &Region, min_modulus: Option<f64>) -> Result<u32>
where
    F: Fn(Complex64) -> Complex64,
{
    winding_count_with(f, region, &WindingOptions { min_modulus, ..Default::default() })
}

pub fn winding_count_with<F>(f: &F, region: &Region, opts: &WindingOptions) -> Result<u32>
where
    F: Fn(Complex64) -> Complex64,
{
    let pieces = boundary(region);
    let n = match region.shape {
        Shape::Rectangle { .. } => opts.side_samples.max(1),
        Shape::Disk { .. } => 4 * opts.side_samples.max(1),
    };
    let mut samples = Vec::with_capacity(pieces.len());
    let mut max_mod: f64 = 0.0;
    for p in &pieces {
        let vals: Vec<(f64, Complex64)> = (0..=n)
            .map(|k| {
                let t = k as f64 / n as f64;
                let v = f(p.at(t));
                max_mod = max_mod.max(v.norm());
                (t, v)
            })
            .collect();
        samples.push(vals);
    }
    let threshold = opts.min_modulus.unwrap_or(MIN_MODULUS_FACTOR * max_mod);
    let tracker = Tracker { f, threshold };
    let mut total = 0.0;
    for (p, vals) in pieces.iter().zip(&samples) {
        for &(t, v) in vals {
            if !(v.norm() >= threshold) || v.norm() == 0.0 {
                let z = p.at(t);
                return Err(Error::BoundaryZero { re: z.re, im: z.im });
            }
        }
        for w in vals.windows(2) {
            total += tracker.phase(p, w[0].0, w[0].1, w[1].0, w[1].1, 0)?;
        }
    }
    let turns = total / TAU;
    let k = turns.round();
    if k < 0.0 {
        return Err(Error::InvalidArgument(format!("negative winding {k}: function has poles in the region")));
    }
    Ok(k as u32)
}

// Evaluation cache keyed by a fine quantization of the point.
struct Memo<'a, F> {
    f: &'a F,
    cache: RefCell<HashMap<(i64, i64), Complex64>>,
    scale: f64,
}

impl<'a, F: Fn(Complex64) -> Complex64> Memo<'a, F> {
    fn new(f: &'a F, diameter: f64) -> Self {
        Self { f, cache: RefCell::new(HashMap::new()), scale: 2f64.powi(44) / diameter.max(1e-300) }
    }

    fn call(&self, z: Complex64) -> Complex64 {
        let key = ((z.re * self.scale).round() as i64, (z.im * self.scale).round() as i64);
        if let Some(v) = self.cache.borrow().get(&key) {
            return *v;
        }
        let v = (self.f)(z);
        self.cache.borrow_mut().insert(key, v);
        v
    }
}

fn newton_polish<F>(f: &F, cell_lo: Complex64, cell_hi: Complex64, m: u32, tol: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let center = (cell_lo + cell_hi) * 0.5;
    let diam = (cell_hi - cell_lo).norm();
    let h = (diam * 1e-3).max(1e-12 * (1.0 + center.norm()));
    let mut z = center;
    for _ in 0..NEWTON_ITERATIONS {
        let fz = f(z);
        if fz.norm() == 0.0 {
            break;
        }
        let d = (f(z + h) - f(z - h)) / (2.0 * h);
        if !(d.norm() > 0.0) {
            return center;
        }
        let step = fz / d * m as f64;
        if !step.is_finite() {
            return center;
        }
        z -= step;
        if step.norm() < tol / 10.0 {
            break;
        }
    }
    if z.is_finite() && (z - center).norm() <= diam {
        z
    } else {
        center
    }
}

/// Quadtree zero location. When child counts keep disagreeing with their
/// parent, the search restarts with 4× denser boundary sampling, at most
/// [`SAMPLING_ESCALATIONS`] times.
pub fn locate_zeros<F>(f: &F, region: &Region, tol: f64, min_modulus: Option<f64>) -> Result<PointMeasure>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let memo = Memo::new(f, region.diameter());
    let mut side_samples = DEFAULT_SIDE_SAMPLES;
    let mut last = Err(Error::UnresolvableBoundary(RETRY_BUDGET));
    for _ in 0..=SAMPLING_ESCALATIONS {
        last = locate_with(&memo, region, tol, &WindingOptions { side_samples, min_modulus });
        match last {
            Err(Error::UnresolvableBoundary(_)) => side_samples *= 4,
            _ => return last,
        }
    }
    last
}

fn locate_with<F>(memo: &Memo<'_, F>, region: &Region, tol: f64, opts: &WindingOptions) -> Result<PointMeasure>
where
    F: Fn(Complex64) -> Complex64,
{
    let opts = *opts;
    let g = |z: Complex64| memo.call(z);
    // top level: perturb the whole region on boundary zeros
    let mut used = *region;
    let mut count = None;
    let seed = region.seed_bits();
    for attempt in 0..=RETRY_BUDGET {
        if attempt > 0 {
            used = region.translated(jitter(seed, attempt) * (1e-3 * region.diameter()));
            used.check_domain()?;
        }
        match winding_count_with(&g, &used, &opts) {
            Ok(c) => {
                count = Some(c);
                break;
            }
            // a zero on or next to the contour shows up as either error
            Err(Error::BoundaryZero { .. } | Error::NonConvergence(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let count = count.ok_or(Error::UnresolvableBoundary(RETRY_BUDGET))?;
    let (lo, hi) = match used.shape {
        Shape::Rectangle { lo, hi } => (cx(lo), cx(hi)),
        Shape::Disk { center, radius } => {
            let r = Complex64::new(radius, radius) * (1.0 + 1e-9);
            (cx(center) - r, cx(center) + r)
        }
    };
    let square_count = match used.shape {
        Shape::Rectangle { .. } => count,
        Shape::Disk { .. } => {
            let sq = Region { shape: Shape::Rectangle { lo: pair(lo), hi: pair(hi) }, domain: DomainTag::Plane };
            winding_count_with(&g, &sq, &opts)?
        }
    };
    let mut atoms: Vec<(Complex64, u32)> = Vec::new();
    let mut stack = vec![(lo, hi, square_count)];
    while let Some((clo, chi, c)) = stack.pop() {
        if c == 0 {
            continue;
        }
        if (chi - clo).norm() <= tol {
            atoms.push((newton_polish(&g, clo, chi, c, tol), c));
            continue;
        }
        let children = split_cell(&g, clo, chi, c, &opts)?;
        // push in reverse so cells are visited in a fixed order
        for ch in children.into_iter().rev() {
            stack.push(ch);
        }
    }
    let mut atoms: Vec<(Complex64, u32)> = merge_close_atoms(atoms, tol)
        .into_iter()
        .map(|(z, m, merged)| {
            if merged {
                let d = Complex64::new(tol, tol) * 0.5;
                (newton_polish(&g, z - d, z + d, m, tol), m)
            } else {
                (z, m)
            }
        })
        .collect();
    atoms.retain(|(z, _)| used.contains(*z));
    let total: u32 = atoms.iter().map(|a| a.1).sum();
    if total != count {
        return Err(Error::UnresolvableBoundary(RETRY_BUDGET));
    }
    atoms.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(PointMeasure { atoms, region: used })
}

// A multiple zero splits into a cluster of simple ones under rounding, and a
// cut can separate them; atoms closer than `tol` are one zero.
fn merge_close_atoms(atoms: Vec<(Complex64, u32)>, tol: f64) -> Vec<(Complex64, u32, bool)> {
    let mut merged: Vec<(Complex64, u32, bool)> = Vec::with_capacity(atoms.len());
    for (z, m) in atoms {
        match merged.iter_mut().find(|(w, _, _)| (*w - z).norm() <= tol) {
            Some((w, k, flag)) => {
                *w = (*w * *k as f64 + z * m as f64) / (*k + m) as f64;
                *k += m;
                *flag = true;
            }
            None => merged.push((z, m, false)),
        }
    }
    merged
}

type Cell = (Complex64, Complex64, u32);

fn split_cell<F>(f: &F, lo: Complex64, hi: Complex64, count: u32, opts: &WindingOptions) -> Result<Vec<Cell>>
where
    F: Fn(Complex64) -> Complex64,
{
    let seed = splitmix(lo.re.to_bits() ^ splitmix(lo.im.to_bits() ^ splitmix(hi.re.to_bits() ^ hi.im.to_bits())));
    let diam = (hi - lo).norm();
    for attempt in 0..=RETRY_BUDGET {
        let mut mid = (lo + hi) * 0.5;
        if attempt > 0 {
            mid += jitter(seed, attempt) * (1e-3 * diam);
        }
        let quads = [
            (lo, mid),
            (Complex64::new(mid.re, lo.im), Complex64::new(hi.re, mid.im)),
            (Complex64::new(lo.re, mid.im), Complex64::new(mid.re, hi.im)),
            (mid, hi),
        ];
        let mut out = Vec::with_capacity(4);
        let mut failed = false;
        for (a, b) in quads {
            let r = Region { shape: Shape::Rectangle { lo: pair(a), hi: pair(b) }, domain: DomainTag::Plane };
            match winding_count_with(f, &r, opts) {
                Ok(c) => out.push((a, b, c)),
                Err(Error::BoundaryZero { .. } | Error::NonConvergence(_)) => {
                    failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !failed && out.iter().map(|c| c.2).sum::<u32>() == count {
            return Ok(out);
        }
    }
    Err(Error::UnresolvableBoundary(RETRY_BUDGET))
}

/// Real zeros on an open interval, each of multiplicity one.
#[derive(Debug, Clone, PartialEq)]
pub struct RealZeros {
    pub a: f64,
    pub b: f64,
    pub locations: Vec<f64>,
}

impl RealZeros {
    pub fn count(&self) -> usize {
        self.locations.len()
    }

    pub fn to_csv(&self) -> String {
        let meta = format!("{{\"interval\":[{:e},{:e}]}}", self.a, self.b);
        let mut w = CsvWriter::with_comment(&meta, &["re", "im", "multiplicity"]);
        for &x in &self.locations {
            w.row(&[crate::csv_out::fmt_f64(x), crate::csv_out::fmt_f64(0.0), "1".into()]);
        }
        w.finish()
    }
}

/// Sign-change scan on (a, b) with step `grid_step` (default (b − a)/2048),
/// each bracket bisected to width `tol`.
pub fn real_zeros<F>(f: &F, a: f64, b: f64, grid_step: Option<f64>, tol: f64) -> Result<RealZeros>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("need a < b, got ({a}, {b})")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let step = grid_step.unwrap_or((b - a) / REAL_GRID_DIVISIONS);
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("grid step must be positive, got {step}")));
    }
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let xs: Vec<f64> = (0..=n).map(|i| if i == n { b } else { a + step * i as f64 }).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let (x0, x1, y0, y1) = (xs[i], xs[i + 1], ys[i], ys[i + 1]);
        if y0 == 0.0 {
            if i > 0 {
                out.push(x0);
            }
            continue;
        }
        if y1 == 0.0 || (y0 < 0.0) == (y1 < 0.0) {
            continue;
        }
        let (mut lo, mut hi) = (x0, x1);
        let lo_neg = y0 < 0.0;
        while hi - lo > tol {
            let m = 0.5 * (lo + hi);
            let fm = f(m);
            if fm == 0.0 {
                lo = m;
                hi = m;
                break;
            }
            if (fm < 0.0) == lo_neg {
                lo = m;
            } else {
                hi = m;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(RealZeros { a, b, locations: out })
}

/// φ(𝔻(r)) = disk with center (1+r²)/(1−r²) and radius 2r/(1−r²).
pub fn disk_image(r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("radius must lie in (0, 1), got {r}")));
    }
    let d = 1.0 - r * r;
    Ok(((1.0 + r * r) / d, 2.0 * r / d))
}

/// Zeros of `zeros` inside φ(𝔻(r)).
pub fn count_in_mapped_disk(zeros: &PointMeasure, r: f64) -> Result<u32> {
    let (c, rad) = disk_image(r)?;
    let covered = match zeros.region.shape {
        Shape::Rectangle { lo, hi } => lo[0] < c - rad && hi[0] > c + rad && lo[1] < -rad && hi[1] > rad,
        Shape::Disk { center, radius } => (cx(center) - c).norm() + rad < radius,
    };
    if !covered {
        return Err(Error::Coverage(format!("region does not cover the disk |z − {c}| ≤ {rad}")));
    }
    Ok(zeros.atoms.iter().filter(|(z, _)| (z - c).norm() < rad).map(|a| a.1).sum())
}

/// Rectangle in the half-plane covering φ(𝔻(r)) with a relative margin.
pub fn covering_rectangle(r: f64, margin: f64) -> Result<Region> {
    let (c, rad) = disk_image(r)?;
    let pad = rad * margin;
    let lo_re = (c - rad - pad).max((c - rad) * 0.5);
    Region::rectangle(Complex64::new(lo_re, -rad - pad), Complex64::new(c + rad + pad, rad + pad), DomainTag::HalfPlane)
}
