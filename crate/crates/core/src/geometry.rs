//! Planar geometry of the base-station process.
//!
//! Poisson sampling in a rectangular window, nearest / second-nearest atom
//! queries (brute force and grid-indexed), the Delaunay-neighbour predicate,
//! the cooperation disc of a serving pair and the geometric ρ-policy.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist2(self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Point2) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Axis-aligned observation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidWindow(format!(
                "[{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Square of the given surface, centred on the origin.
    pub fn centered_square(area: f64) -> Result<Self> {
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::InvalidWindow(format!("area {area}")));
        }
        let h = 0.5 * area.sqrt();
        Self::new(-h, h, -h, h)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        Point2::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        Point2::new(
            self.x_min + self.width() * rng.random::<f64>(),
            self.y_min + self.height() * rng.random::<f64>(),
        )
    }
}

/// Distance convention inside a window.
///
/// `Toroidal` wraps the window onto a torus, which removes edge effects; it
/// is used to quantify how much of a finite-window result is boundary bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[default]
    Euclidean,
    Toroidal,
}

impl Metric {
    pub fn dist2(self, window: &Window, a: Point2, b: Point2) -> f64 {
        match self {
            Metric::Euclidean => a.dist2(b),
            Metric::Toroidal => {
                let (w, h) = (window.width(), window.height());
                let mut dx = (a.x - b.x).abs() % w;
                let mut dy = (a.y - b.y).abs() % h;
                dx = dx.min(w - dx);
                dy = dy.min(h - dy);
                dx * dx + dy * dy
            }
        }
    }

    pub fn dist(self, window: &Window, a: Point2, b: Point2) -> f64 {
        self.dist2(window, a, b).sqrt()
    }
}

/// Draws a homogeneous Poisson point process of intensity `params.lambda` in `window`.
pub fn sample_ppp<R: Rng + ?Sized>(params: &SystemParams, window: &Window, rng: &mut R) -> Vec<Point2> {
    let mean = params.lambda * window.area();
    let n = match Poisson::new(mean) {
        Ok(dist) => dist.sample(rng) as usize,
        Err(_) => 0,
    };
    (0..n).map(|_| window.sample_uniform(rng)).collect()
}

/// The two atoms nearest to a query point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoNearest {
    pub i1: usize,
    pub i2: usize,
    pub b1: Point2,
    pub b2: Point2,
    pub r1: f64,
    pub r2: f64,
}

#[derive(Clone, Copy)]
struct Best2 {
    first: (f64, usize),
    second: (f64, usize),
}

impl Best2 {
    fn new() -> Self {
        Self {
            first: (f64::INFINITY, usize::MAX),
            second: (f64::INFINITY, usize::MAX),
        }
    }

    // Lexicographic on (squared distance, index): ties go to the lower index.
    fn offer(&mut self, d2: f64, idx: usize) {
        if idx == self.first.1 || idx == self.second.1 {
            return;
        }
        let c = (d2, idx);
        if lex_less(c, self.first) {
            self.second = self.first;
            self.first = c;
        } else if lex_less(c, self.second) {
            self.second = c;
        }
    }

    fn finish(self, atoms: &[Point2]) -> TwoNearest {
        TwoNearest {
            i1: self.first.1,
            i2: self.second.1,
            b1: atoms[self.first.1],
            b2: atoms[self.second.1],
            r1: self.first.0.sqrt(),
            r2: self.second.0.sqrt(),
        }
    }
}

fn lex_less(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Brute-force two-nearest query (Euclidean).
pub fn two_nearest(query: Point2, atoms: &[Point2]) -> Result<TwoNearest> {
    if atoms.len() < 2 {
        return Err(Error::InsufficientAtoms(atoms.len()));
    }
    let mut best = Best2::new();
    for (i, &a) in atoms.iter().enumerate() {
        best.offer(query.dist2(a), i);
    }
    Ok(best.finish(atoms))
}

/// Uniform-grid bucket index over a fixed atom set.
///
/// Answers nearest and two-nearest queries under either metric in roughly
/// constant time for Poisson-like atom sets.
#[derive(Debug, Clone)]
pub struct AtomIndex<'a> {
    atoms: &'a [Point2],
    window: Window,
    metric: Metric,
    nx: usize,
    ny: usize,
    cw: f64,
    ch: f64,
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl<'a> AtomIndex<'a> {
    pub fn new(atoms: &'a [Point2], window: Window, metric: Metric) -> Self {
        let target_cells = (atoms.len() / 2).max(1) as f64;
        let aspect = window.width() / window.height();
        let nx = ((target_cells * aspect).sqrt().round() as usize).clamp(1, 4096);
        let ny = ((target_cells / aspect).sqrt().round() as usize).clamp(1, 4096);
        let cw = window.width() / nx as f64;
        let ch = window.height() / ny as f64;
        let mut counts = vec![0usize; nx * ny + 1];
        let cell_of = |p: Point2| -> usize {
            let cx = (((p.x - window.x_min) / cw) as isize).clamp(0, nx as isize - 1) as usize;
            let cy = (((p.y - window.y_min) / ch) as isize).clamp(0, ny as isize - 1) as usize;
            cy * nx + cx
        };
        for &p in atoms {
            counts[cell_of(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0usize; atoms.len()];
        for (i, &p) in atoms.iter().enumerate() {
            let c = cell_of(p);
            items[fill[c]] = i;
            fill[c] += 1;
        }
        Self {
            atoms,
            window,
            metric,
            nx,
            ny,
            cw,
            ch,
            starts,
            items,
        }
    }

    pub fn atoms(&self) -> &'a [Point2] {
        self.atoms
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    fn query_best(&self, q: Point2, want_two: bool) -> Best2 {
        let mut best = Best2::new();
        let qx = (((q.x - self.window.x_min) / self.cw).floor() as isize).clamp(0, self.nx as isize - 1);
        let qy = (((q.y - self.window.y_min) / self.ch).floor() as isize).clamp(0, self.ny as isize - 1);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let kmax = match self.metric {
            Metric::Euclidean => nx.max(ny),
            Metric::Toroidal => nx.max(ny) / 2 + 1,
        };
        // Outside the window the distance to the grid adds to the ring bound.
        let outside = {
            let dx = (self.window.x_min - q.x).max(q.x - self.window.x_max).max(0.0);
            let dy = (self.window.y_min - q.y).max(q.y - self.window.y_max).max(0.0);
            (dx * dx + dy * dy).sqrt()
        };
        let step = self.cw.min(self.ch);
        for k in 0..=kmax {
            for dy in -k..=k {
                for dx in -k..=k {
                    if dx.abs() != k && dy.abs() != k {
                        continue;
                    }
                    let (mut cx, mut cy) = (qx + dx, qy + dy);
                    match self.metric {
                        Metric::Euclidean => {
                            if cx < 0 || cy < 0 || cx >= nx || cy >= ny {
                                continue;
                            }
                        }
                        Metric::Toroidal => {
                            cx = cx.rem_euclid(nx);
                            cy = cy.rem_euclid(ny);
                        }
                    }
                    let c = cy as usize * self.nx + cx as usize;
                    for &i in &self.items[self.starts[c]..self.starts[c + 1]] {
                        let d2 = self.metric.dist2(&self.window, q, self.atoms[i]);
                        best.offer(d2, i);
                    }
                }
            }
            let bound = k as f64 * step;
            let have = if want_two { best.second.0 } else { best.first.0 };
            // Unvisited cells are at least `bound` away; strict so ties are resolved by index.
            if have.is_finite() && have.sqrt() + outside < bound {
                break;
            }
        }
        best
    }

    /// The 1-Voronoi cell of atom `i` clipped to the window, as a convex polygon
    /// in counter-clockwise order.
    ///
    /// Under the toroidal metric the cell is returned unwrapped around the atom,
    /// so its vertices may fall outside the window.
    pub fn cell_polygon(&self, i: usize) -> Vec<Point2> {
        let a = self.atoms[i];
        let (w, h) = (self.window.width(), self.window.height());
        let base = match self.metric {
            Metric::Euclidean => self.window,
            Metric::Toroidal => Window {
                x_min: a.x - 0.5 * w,
                x_max: a.x + 0.5 * w,
                y_min: a.y - 0.5 * h,
                y_max: a.y + 0.5 * h,
            },
        };
        let mut poly = vec![
            Point2::new(base.x_min, base.y_min),
            Point2::new(base.x_max, base.y_min),
            Point2::new(base.x_max, base.y_max),
            Point2::new(base.x_min, base.y_max),
        ];
        let images: &[(f64, f64)] = match self.metric {
            Metric::Euclidean => &[(0.0, 0.0)],
            Metric::Toroidal => &[
                (0.0, 0.0),
                (-1.0, 0.0),
                (1.0, 0.0),
                (0.0, -1.0),
                (0.0, 1.0),
                (-1.0, -1.0),
                (-1.0, 1.0),
                (1.0, -1.0),
                (1.0, 1.0),
            ],
        };
        let ax = (((a.x - self.window.x_min) / self.cw) as isize).clamp(0, self.nx as isize - 1);
        let ay = (((a.y - self.window.y_min) / self.ch) as isize).clamp(0, self.ny as isize - 1);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let kmax = nx.max(ny);
        let step = self.cw.min(self.ch);
        for k in 0..=kmax {
            for dy in -k..=k {
                for dx in -k..=k {
                    if dx.abs() != k && dy.abs() != k {
                        continue;
                    }
                    let (mut cx, mut cy) = (ax + dx, ay + dy);
                    match self.metric {
                        Metric::Euclidean => {
                            if cx < 0 || cy < 0 || cx >= nx || cy >= ny {
                                continue;
                            }
                        }
                        Metric::Toroidal => {
                            // wrapped rings repeat once k passes half the grid
                            if 2 * k > nx.max(ny) + 1 {
                                continue;
                            }
                            cx = cx.rem_euclid(nx);
                            cy = cy.rem_euclid(ny);
                        }
                    }
                    let c = cy as usize * self.nx + cx as usize;
                    for &j in &self.items[self.starts[c]..self.starts[c + 1]] {
                        if j == i {
                            continue;
                        }
                        let b = self.atoms[j];
                        if b == a {
                            // ties go to the lower index
                            if j < i {
                                return Vec::new();
                            }
                            continue;
                        }
                        for &(ox, oy) in images {
                            let bj = Point2::new(b.x + ox * w, b.y + oy * h);
                            clip_half_plane(&mut poly, a, bj);
                        }
                    }
                }
            }
            let reach = poly.iter().map(|v| v.dist(a)).fold(0.0, f64::max);
            // atoms in unvisited rings are at least k·step from `a`
            if 2.0 * reach <= k as f64 * step {
                break;
            }
        }
        poly
    }

    /// Index of the nearest atom, `None` if the index is empty.
    pub fn nearest(&self, q: Point2) -> Option<usize> {
        if self.atoms.is_empty() {
            return None;
        }
        Some(self.query_best(q, false).first.1)
    }

    pub fn two_nearest(&self, q: Point2) -> Result<TwoNearest> {
        if self.atoms.len() < 2 {
            return Err(Error::InsufficientAtoms(self.atoms.len()));
        }
        Ok(self.query_best(q, true).finish(self.atoms))
    }
}

/// Keeps the part of convex `poly` at least as close to `a` as to `b`.
fn clip_half_plane(poly: &mut Vec<Point2>, a: Point2, b: Point2) {
    let (nx, ny) = (b.x - a.x, b.y - a.y);
    let c = 0.5 * ((b.x * b.x + b.y * b.y) - (a.x * a.x + a.y * a.y));
    let side = |p: Point2| nx * p.x + ny * p.y - c;
    if poly.iter().all(|&p| side(p) <= 0.0) {
        return;
    }
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push(Point2::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)));
        }
    }
    *poly = out;
}

/// Area of a simple polygon (shoelace formula).
pub fn polygon_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    let mut twice = 0.0;
    for k in 0..n {
        let (p, q) = (poly[k], poly[(k + 1) % n]);
        twice += p.x * q.y - q.x * p.y;
    }
    0.5 * twice.abs()
}

/// Uniform point of a convex polygon, by area-weighted fan triangles.
pub fn sample_in_convex_polygon<R: Rng + ?Sized>(poly: &[Point2], rng: &mut R) -> Option<Point2> {
    if poly.len() < 3 {
        return None;
    }
    let o = poly[0];
    let tri_area = |k: usize| {
        let (p, q) = (poly[k], poly[k + 1]);
        0.5 * ((p.x - o.x) * (q.y - o.y) - (q.x - o.x) * (p.y - o.y)).abs()
    };
    let total: f64 = (1..poly.len() - 1).map(tri_area).sum();
    if total.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return None;
    }
    let mut pick = rng.random::<f64>() * total;
    let mut k = 1;
    while k < poly.len() - 2 {
        let a = tri_area(k);
        if pick < a {
            break;
        }
        pick -= a;
        k += 1;
    }
    let (p, q) = (poly[k], poly[k + 1]);
    let (mut u, mut v) = (rng.random::<f64>(), rng.random::<f64>());
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    Some(Point2::new(
        o.x + u * (p.x - o.x) + v * (q.x - o.x),
        o.y + u * (p.y - o.y) + v * (q.y - o.y),
    ))
}

/// Witness point of the 2-Voronoi cell of atoms `i` and `j`, if the cell is non-empty.
///
/// A non-empty cell contains a point equidistant from both atoms (the centre
/// of an empty circle through them), so the search runs along their
/// perpendicular bisector. There every other atom imposes a linear
/// constraint on the bisector coordinate; the feasible set is an interval.
pub fn delaunay_witness(i: usize, j: usize, atoms: &[Point2]) -> Result<Option<Point2>> {
    let (a, b) = (atoms[i], atoms[j]);
    if i == j || a == b {
        return Err(Error::InvalidPair);
    }
    let m = Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    let n = Point2::new(-(b.y - a.y), b.x - a.x);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let a2 = a.x * a.x + a.y * a.y;
    for (k, &c) in atoms.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        // |z - a|² < |z - c|²  <=>  2 z·(c - a) < |c|² - |a|²
        let (ux, uy) = (c.x - a.x, c.y - a.y);
        let slope = 2.0 * (n.x * ux + n.y * uy);
        let rhs = c.x * c.x + c.y * c.y - a2 - 2.0 * (m.x * ux + m.y * uy);
        if slope > 0.0 {
            hi = hi.min(rhs / slope);
        } else if slope < 0.0 {
            lo = lo.max(rhs / slope);
        } else if rhs <= 0.0 {
            return Ok(None);
        }
        if lo >= hi {
            return Ok(None);
        }
    }
    let t = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    };
    Ok(Some(Point2::new(m.x + t * n.x, m.y + t * n.y)))
}

/// True iff atoms `i` and `j` are Delaunay neighbours (their 2-Voronoi cell is non-empty).
pub fn is_delaunay_pair(i: usize, j: usize, atoms: &[Point2]) -> Result<bool> {
    Ok(delaunay_witness(i, j, atoms)?.is_some())
}

/// All Delaunay neighbour pairs `(i, j)` with `i < j`.
pub fn delaunay_pairs(atoms: &[Point2]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            if atoms[i] == atoms[j] {
                continue;
            }
            if let Ok(true) = is_delaunay_pair(i, j, atoms) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Line `a x + b y = c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Locus `{z : d(b1, z) <= ρ d(b2, z)}` of a serving pair.
///
/// A disc for ρ < 1 (a point at `b1` when ρ = 0); for ρ = 1 it degenerates to
/// the half-plane bounded by the perpendicular bisector, kept in `degenerate_line`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoopDisc {
    pub center: Point2,
    pub radius: f64,
    pub degenerate_line: Option<Line>,
}

impl CoopDisc {
    /// Whether `z` satisfies the no-cooperation condition of this pair's disc.
    pub fn contains(&self, z: Point2) -> bool {
        match self.degenerate_line {
            Some(l) => {
                // b1 side of the bisector
                l.a * z.x + l.b * z.y <= l.c
            }
            None => z.dist2(self.center) <= self.radius * self.radius,
        }
    }
}

pub fn coop_disc(b1: Point2, b2: Point2, rho: f64) -> Result<CoopDisc> {
    if b1 == b2 {
        return Err(Error::InvalidPair);
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParams(format!("rho = {rho}")));
    }
    if rho == 1.0 {
        let line = Line {
            a: b2.x - b1.x,
            b: b2.y - b1.y,
            c: 0.5 * ((b2.x * b2.x + b2.y * b2.y) - (b1.x * b1.x + b1.y * b1.y)),
        };
        return Ok(CoopDisc {
            center: Point2::new(0.5 * (b1.x + b2.x), 0.5 * (b1.y + b2.y)),
            radius: f64::INFINITY,
            degenerate_line: Some(line),
        });
    }
    let r2 = rho * rho;
    let k = 1.0 / (1.0 - r2);
    Ok(CoopDisc {
        center: Point2::new((b1.x - b2.x * r2) * k, (b1.y - b2.y * r2) * k),
        radius: rho * b1.dist(b2) * k,
        degenerate_line: None,
    })
}

/// Serving decision of a user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    NoCoop,
    FullCoop,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::NoCoop => "no-coop",
            Action::FullCoop => "full-coop",
        }
    }
}

/// Geometric policy: no cooperation iff `r1 <= ρ r2`.
pub fn policy_action(r1: f64, r2: f64, rho: f64) -> Result<Action> {
    if !(r1 >= 0.0 && r1 <= r2) {
        return Err(Error::InvalidGeometry { r1, r2 });
    }
    Ok(if r1 <= rho * r2 {
        Action::NoCoop
    } else {
        Action::FullCoop
    })
}

/// Gain ratio `h2/h1` above which full cooperation maximises the received signal.
///
/// Root of `x + 2√x − 1 = 0`, i.e. `(√2 − 1)²`.
pub const FULL_COOP_GAIN_RATIO: f64 = 0.171_572_875_253_809_9;

/// Signal-optimal action for a known gain ratio `h2/h1 ∈ [0, 1]`.
pub fn optimal_action_threshold(gain_ratio: f64) -> Result<Action> {
    if !(0.0..=1.0).contains(&gain_ratio) {
        return Err(Error::InvalidRatio(gain_ratio));
    }
    Ok(if gain_ratio >= FULL_COOP_GAIN_RATIO {
        Action::FullCoop
    } else {
        Action::NoCoop
    })
}

/// Distance-ratio form of the threshold once fading is averaged out:
/// full cooperation iff `r1 >= ratio · r2`.
pub fn full_coop_distance_ratio(beta: f64) -> f64 {
    FULL_COOP_GAIN_RATIO.powf(1.0 / beta)
}

/// Default cap on rejection draws per cell.
pub const DEFAULT_CELL_ATTEMPTS: usize = 1_000_000;

/// Uniform point of the 1-Voronoi cell of atom `bs`, clipped to the window.
///
/// Plain rejection: draw uniformly in the window and accept when `bs` is the
/// nearest atom (ties to the lower index).
pub fn sample_user_in_cell<R: Rng + ?Sized>(
    bs: usize,
    index: &AtomIndex<'_>,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Point2> {
    let window = *index.window();
    for _ in 0..max_attempts {
        let z = window.sample_uniform(rng);
        if index.nearest(z) == Some(bs) {
            return Ok(z);
        }
    }
    Err(Error::CellSamplingExhausted(max_attempts))
}

/// One uniform user per cell, for every atom at once.
///
/// Each cell is built as a polygon and sampled directly, which has the law of
/// [`sample_user_in_cell`] per atom without its rejection cost on small cells.
/// Toroidal points are wrapped back into the window.
pub fn sample_users<R: Rng + ?Sized>(
    index: &AtomIndex<'_>,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Vec<Point2>> {
    let window = *index.window();
    (0..index.atoms().len())
        .map(|i| {
            let poly = index.cell_polygon(i);
            match sample_in_convex_polygon(&poly, rng) {
                Some(z) => Ok(match index.metric() {
                    Metric::Euclidean => z,
                    Metric::Toroidal => wrap_into(&window, z),
                }),
                // degenerate cell (coincident atoms): fall back to rejection
                None => sample_user_in_cell(i, index, rng, max_attempts),
            }
        })
        .collect()
}

/// Maps a point onto the window by periodic translation.
pub fn wrap_into(window: &Window, z: Point2) -> Point2 {
    let (w, h) = (window.width(), window.height());
    Point2::new(
        window.x_min + (z.x - window.x_min).rem_euclid(w),
        window.y_min + (z.y - window.y_min).rem_euclid(h),
    )
}
