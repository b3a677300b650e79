//! Seeded search for large values of `‖ĝ‖_{L^r(V)} / ‖g‖_{ℓ^p}` over a
//! class of functions. Every value found is attained by an explicit witness,
//! so the result is a lower bound for the supremum over the class.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{extremizer_from_subspace, restriction_ratio};
use crate::budget::{power, Budget};
use crate::error::{Error, Result};
use crate::field::{CaseTag, Field, Scalar};
use crate::grid::{ambient_size, decode_into, fourier_transform, lp_sum, GridFunction};
use crate::soperator::LineOrbits;
use crate::varieties::linalg::nullspace;
use crate::varieties::{build_affine_in_sphere, AffineSubspace, PointSet, VarietyKind};

/// Cap on inner-loop work (roughly multiply-adds) per search cell.
pub const WORK_CAP: u64 = 2_000_000_000;

const EXHAUSTIVE_MAX_LINES: usize = 20;
const EXHAUSTIVE_MAX_POINTS: usize = 20;
const PAR_MIN: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchClass {
    All,
    Homogeneous,
    Characteristic,
    HomogeneousCharacteristic,
}

impl SearchClass {
    pub fn name(self) -> &'static str {
        match self {
            SearchClass::All => "all",
            SearchClass::Homogeneous => "homogeneous",
            SearchClass::Characteristic => "characteristic",
            SearchClass::HomogeneousCharacteristic => "homogeneous-characteristic",
        }
    }

    fn homogeneous(self) -> bool {
        matches!(self, SearchClass::Homogeneous | SearchClass::HomogeneousCharacteristic)
    }

    fn indicator(self) -> bool {
        matches!(self, SearchClass::Characteristic | SearchClass::HomogeneousCharacteristic)
    }
}

impl FromStr for SearchClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "all" => Ok(SearchClass::All),
            "homogeneous" | "hom" => Ok(SearchClass::Homogeneous),
            "characteristic" | "char" => Ok(SearchClass::Characteristic),
            "homogeneous-characteristic" | "hom-char" => Ok(SearchClass::HomogeneousCharacteristic),
            other => Err(Error::Parse(format!("unknown function class '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub p: f64,
    pub r: f64,
    pub class: SearchClass,
    pub budget: Budget,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub variety: String,
    pub q: u64,
    pub d: usize,
    pub j: Scalar,
    pub tag: CaseTag,
    pub class: SearchClass,
    pub p: f64,
    pub r: f64,
    /// Ratio attained by the witness; a lower bound for the class supremum.
    pub ratio: f64,
    pub bound: &'static str,
    /// Whether the class was enumerated completely.
    pub exhaustive: bool,
    pub evaluations: u64,
    pub witness: String,
    pub seed: u64,
    #[serde(skip)]
    pub witness_grid: GridFunction,
}

/// Per-cell seed derived from a master seed and the cell's coordinates.
pub fn cell_seed(master: u64, coords: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    coords.iter().fold(mix(master), |acc, &c| mix(acc ^ mix(c)))
}

/// Keeps `ĝ` on `V` up to date under pointwise and line-wise edits of `g`.
struct Evaluator {
    q: u64,
    n: usize,
    chi: Vec<Complex64>,
    points: Vec<usize>,
    vcoords: Vec<Scalar>,
    p: f64,
    r: f64,
    g: Vec<Complex64>,
    hat: Vec<Complex64>,
    src: f64,
    support: usize,
    evals: u64,
    work: u64,
    max_evals: u64,
    buf: Vec<Scalar>,
}

impl Evaluator {
    fn new(variety: &PointSet, p: f64, r: f64, max_evals: u64) -> Self {
        let field = &variety.spec.field;
        let n = variety.ambient_dim();
        let size = power(field.q(), n) as usize;
        Evaluator {
            q: field.q(),
            n,
            chi: field.chi_table().to_vec(),
            points: variety.points.clone(),
            vcoords: variety.flat_coords(),
            p,
            r,
            g: vec![Complex64::new(0.0, 0.0); size],
            hat: vec![Complex64::new(0.0, 0.0); variety.len()],
            src: 0.0,
            support: 0,
            evals: 0,
            work: 0,
            max_evals,
            buf: vec![0; n],
        }
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.max_evals || self.work >= WORK_CAP
    }

    fn pow_p(&self, v: Complex64) -> f64 {
        if self.p.is_finite() {
            v.norm().powf(self.p)
        } else {
            0.0
        }
    }

    fn load(&mut self, g: &GridFunction) {
        self.g.copy_from_slice(g.values());
        let hat = fourier_transform(g);
        for (h, &i) in self.hat.iter_mut().zip(&self.points) {
            *h = hat.values()[i];
        }
        self.src = if self.p.is_finite() { lp_sum(&self.g, self.p) } else { 0.0 };
        self.support = self.g.iter().filter(|v| v.norm() > 0.0).count();
        self.work += (self.g.len() * self.n * self.q as usize) as u64;
    }

    fn ratio(&mut self) -> f64 {
        self.evals += 1;
        self.work += self.hat.len() as u64;
        if self.support == 0 {
            return 0.0;
        }
        let source = if self.p.is_finite() {
            self.src.max(0.0).powf(1.0 / self.p)
        } else {
            self.work += self.g.len() as u64;
            self.g.iter().map(|v| v.norm()).fold(0.0, f64::max)
        };
        let target = if self.r.is_finite() {
            (lp_sum(&self.hat, self.r) / self.hat.len() as f64).powf(1.0 / self.r)
        } else {
            self.hat.iter().map(|v| v.norm()).fold(0.0, f64::max)
        };
        if source > 0.0 {
            target / source
        } else {
            0.0
        }
    }

    fn write_value(&mut self, m: usize, value: Complex64) {
        let old = self.g[m];
        self.src += self.pow_p(value) - self.pow_p(old);
        match (old.norm() > 0.0, value.norm() > 0.0) {
            (false, true) => self.support += 1,
            (true, false) => self.support -= 1,
            _ => {}
        }
        self.g[m] = value;
    }

    /// Adds `Σ_x kernel(m·x)·delta` to `ĝ` on `V`.
    fn update_hat(&mut self, m: usize, kernel: impl Fn(u64) -> Complex64 + Sync) {
        decode_into(m, self.q, &mut self.buf);
        let (q, n, buf) = (self.q, self.n, &self.buf);
        let step = |(h, x): (&mut Complex64, &[Scalar])| {
            let dot: u64 = buf.iter().zip(x).map(|(a, b)| a * b).sum::<u64>() % q;
            *h += kernel(dot);
        };
        if self.hat.len() >= PAR_MIN {
            self.hat
                .par_iter_mut()
                .zip(self.vcoords.par_chunks(n))
                .with_min_len(4096)
                .for_each(step);
        } else {
            self.hat.iter_mut().zip(self.vcoords.chunks(n)).for_each(step);
        }
        self.work += (self.hat.len() * n) as u64;
    }

    fn set_point(&mut self, m: usize, value: Complex64) {
        let delta = value - self.g[m];
        if delta.norm() == 0.0 {
            return;
        }
        self.write_value(m, value);
        let (q, chi) = (self.q, std::mem::take(&mut self.chi));
        self.update_hat(m, |dot| delta * chi[((q - dot) % q) as usize]);
        self.chi = chi;
    }

    /// Sets `g` to `value` on the punctured line through `members[0]`.
    fn set_line(&mut self, members: &[usize], value: Complex64) {
        let current = self.g[members[0]];
        if members.iter().any(|&m| self.g[m] != current) {
            for &m in members {
                self.set_point(m, value);
            }
            return;
        }
        let delta = value - current;
        if delta.norm() == 0.0 {
            return;
        }
        for &m in members {
            self.write_value(m, value);
        }
        let on = delta * (self.q - 1) as f64;
        self.update_hat(members[0], |dot| if dot == 0 { on } else { -delta });
    }

    fn grid(&self, field: &Field) -> GridFunction {
        GridFunction::new(field, self.n, self.g.clone()).expect("evaluator holds a full grid")
    }
}

/// Points of each punctured line, `q − 1` per line, representative first.
struct Lines {
    orbits: Arc<LineOrbits>,
    members: Vec<usize>,
    per_line: usize,
}

impl Lines {
    fn new(field: &Field, n: usize, budget: &Budget) -> Result<Self> {
        let orbits = LineOrbits::new(field, n, budget)?;
        let q = field.q();
        let per_line = (q - 1) as usize;
        let mut c = vec![0; n];
        let mut t = vec![0; n];
        let mut members = Vec::with_capacity(orbits.count() * per_line);
        for &rep in orbits.representatives() {
            decode_into(rep, q, &mut c);
            t.iter_mut().for_each(|x| *x = 0);
            for _ in 1..q {
                for (a, &b) in t.iter_mut().zip(&c) {
                    *a = field.add(*a, b);
                }
                members.push(crate::grid::encode(&t, q));
            }
        }
        Ok(Lines {
            orbits,
            members,
            per_line,
        })
    }

    fn count(&self) -> usize {
        self.orbits.count()
    }

    fn line(&self, l: usize) -> &[usize] {
        &self.members[l * self.per_line..(l + 1) * self.per_line]
    }

    fn rep(&self, l: usize) -> usize {
        self.orbits.representatives()[l]
    }

    fn grid(&self, field: &Field, n: usize, values: &[Complex64], zero: Complex64) -> GridFunction {
        let mut g = GridFunction::zeros(field, n);
        g.values_mut()[0] = zero;
        for (l, &v) in values.iter().enumerate() {
            for &m in self.line(l) {
                g.values_mut()[m] = v;
            }
        }
        g
    }
}

struct Best {
    ratio: f64,
    grid: Option<GridFunction>,
    stage: String,
}

impl Best {
    fn offer(&mut self, ratio: f64, ev: &Evaluator, field: &Field, stage: &str) {
        if ratio > self.ratio {
            self.ratio = ratio;
            self.grid = Some(ev.grid(field));
            self.stage = stage.to_string();
        }
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn fmt_point(i: usize, q: u64, n: usize) -> String {
    let mut x = vec![0; n];
    decode_into(i, q, &mut x);
    let parts: Vec<String> = x.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

fn fmt_value(v: Complex64) -> String {
    if v.im == 0.0 {
        format!("{:.6}", v.re)
    } else {
        format!("{:.6}{:+.6}i", v.re, v.im)
    }
}

fn describe(stage: &str, g: &GridFunction, lines: Option<&Lines>) -> String {
    let q = g.field().q();
    let n = g.dim();
    let vals = g.values();
    let mut out = format!("{stage}; ");
    match lines {
        Some(lines) => {
            let on: Vec<usize> = (0..lines.count()).filter(|&l| vals[lines.rep(l)].norm() > 0.0).collect();
            let _ = write!(out, "lines={}/{}; zero={}", on.len(), lines.count(), fmt_value(vals[0]));
            let shown: Vec<String> = on
                .iter()
                .take(4)
                .map(|&l| format!("{}:{}", fmt_point(lines.rep(l), q, n), fmt_value(vals[lines.rep(l)])))
                .collect();
            if !shown.is_empty() {
                let more = if on.len() > 4 { ",..." } else { "" };
                let _ = write!(out, "; [{}{more}]", shown.join(","));
            }
        }
        None => {
            let support = vals.iter().filter(|v| v.norm() > 0.0).count();
            let _ = write!(out, "support={}/{}", support, vals.len());
        }
    }
    out
}

/// A flat inside the variety, when one is available: a maximal flat of the
/// sphere, placed in the slice `s = 1` for homogeneous varieties.
fn flat_in_variety(variety: &PointSet, seed: u64) -> Option<AffineSubspace> {
    let spec = &variety.spec;
    let flat = build_affine_in_sphere(&spec.field, spec.d, spec.effective_j(), seed).ok()?;
    Some(match spec.kind {
        VarietyKind::Sphere => flat,
        _ => flat.lift(),
    })
}

/// Indicators of the linear subspaces `(W_i + ⟨v⟩)^⊥` and `W_i^⊥` for the
/// nested direction spans `W_i` of `flat = v + W`. These are homogeneous.
fn span_indicators(flat: &AffineSubspace) -> Vec<(String, GridFunction)> {
    let field = flat.field();
    let n = flat.ambient_dim();
    let mut out = Vec::new();
    for i in 0..=flat.k() {
        let dirs = &flat.directions[..i];
        let mut with_base = dirs.to_vec();
        with_base.push(flat.base.clone());
        for (label, rows) in [("span-perp-with-base", with_base), ("span-perp", dirs.to_vec())] {
            if rows.is_empty() {
                continue;
            }
            let basis = nullspace(field, &rows, n);
            let sub = AffineSubspace::new(field, vec![0; n], basis).expect("nullspace basis is independent");
            out.push((
                format!("{label} i={i}"),
                GridFunction::indicator(field, n, &sub.point_indices()),
            ));
        }
    }
    out
}

pub fn sup_ratio_search(variety: &PointSet, opts: &SearchOptions) -> Result<SweepCell> {
    if variety.is_empty() {
        return Err(Error::EmptyVariety(variety.spec.to_string()));
    }
    for (name, e) in [("p", opts.p), ("r", opts.r)] {
        if e.is_nan() || e < 1.0 {
            return Err(Error::InvalidExponent(format!("{name} = {e}")));
        }
    }
    let spec = &variety.spec;
    let field = spec.field.clone();
    let q = field.q();
    let n = variety.ambient_dim();
    let size = ambient_size(q, n, &opts.budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut ev = Evaluator::new(variety, opts.p, opts.r, opts.budget.max_evaluations);
    let mut best = Best {
        ratio: f64::NEG_INFINITY,
        grid: None,
        stage: String::new(),
    };
    let lines = if opts.class.homogeneous() {
        Some(Lines::new(&field, n, &opts.budget)?)
    } else {
        None
    };
    let flat = flat_in_variety(variety, opts.seed);
    let zero_grid: &[f64] = match opts.class {
        SearchClass::Homogeneous => &[0.0, 1.0, -1.0],
        _ => &[0.0, 1.0],
    };

    // Structured candidates.
    let mut candidates: Vec<(String, GridFunction)> = vec![("delta0".into(), GridFunction::delta(&field, n, 0))];
    if let Some(flat) = &flat {
        candidates.extend(span_indicators(flat));
        if opts.class == SearchClass::All {
            for i in 0..=flat.k() {
                candidates.push((format!("affine-extremizer k={i}"), extremizer_from_subspace(&flat.truncated(i))?));
            }
        }
    }
    if opts.class == SearchClass::All {
        let x0 = variety.points[rng.gen_range(0..variety.len())];
        let point = inverse_fourier_transform_point(&field, n, x0);
        candidates.push((format!("point-extremizer x0={}", fmt_point(x0, q, n)), point));
    }
    candidates.push(("constant".into(), GridFunction::constant(&field, n, c(1.0))));
    for (stage, g) in &candidates {
        ev.load(g);
        let r = ev.ratio();
        best.offer(r, &ev, &field, stage);
    }

    let mut exhaustive = false;
    match (&lines, opts.class) {
        (Some(lines), class) => {
            let count = lines.count();
            let patterns = 1u64.checked_shl(count as u32).unwrap_or(u64::MAX);
            if count <= EXHAUSTIVE_MAX_LINES
                && patterns.saturating_mul(zero_grid.len() as u64) <= opts.budget.max_evaluations
            {
                exhaustive = true;
                exhaustive_lines(&mut ev, lines, zero_grid, &field, &mut best);
            } else {
                random_lines(&mut ev, lines, zero_grid, &field, &mut rng, &mut best);
                greedy_lines(&mut ev, lines, &field, &mut rng, &mut best);
            }
            if !(exhaustive && class.indicator()) {
                climb_lines(&mut ev, lines, class, &field, &mut rng, &mut best);
            }
        }
        (None, SearchClass::Characteristic) => {
            let patterns = 1u64.checked_shl(size as u32).unwrap_or(u64::MAX);
            if size <= EXHAUSTIVE_MAX_POINTS && patterns <= opts.budget.max_evaluations {
                exhaustive = true;
                exhaustive_points(&mut ev, size, &field, &mut best);
            } else {
                random_points(&mut ev, size, &field, &mut rng, &mut best, false);
                climb_points(&mut ev, size, true, &field, &mut rng, &mut best);
            }
        }
        (None, _) => {
            random_points(&mut ev, size, &field, &mut rng, &mut best, true);
            climb_points(&mut ev, size, false, &field, &mut rng, &mut best);
        }
    }

    let grid = best.grid.expect("at least one candidate was evaluated");
    let ratio = restriction_ratio(&grid, variety, opts.p, opts.r)?;
    Ok(SweepCell {
        variety: spec.to_string(),
        q,
        d: spec.d,
        j: spec.j,
        tag: spec.case_tag(),
        class: opts.class,
        p: opts.p,
        r: opts.r,
        ratio,
        bound: "lower",
        exhaustive,
        evaluations: ev.evals + 1,
        witness: describe(&best.stage, &grid, lines.as_ref()),
        seed: opts.seed,
        witness_grid: grid,
    })
}

/// `g(m) = q^{-n} χ(m·x0)`, so that `ĝ = δ_{x0}`.
fn inverse_fourier_transform_point(field: &Field, n: usize, x0: usize) -> GridFunction {
    crate::grid::inverse_fourier_transform(&GridFunction::delta(field, n, x0))
}

fn exhaustive_lines(ev: &mut Evaluator, lines: &Lines, zero_grid: &[f64], field: &Field, best: &mut Best) {
    let count = lines.count();
    let n = ev.n;
    for &z in zero_grid {
        ev.load(&lines.grid(field, n, &vec![c(0.0); count], c(z)));
        let mut mask = 0u64;
        if z != 0.0 {
            let r = ev.ratio();
            best.offer(r, ev, field, "exhaustive");
        }
        for i in 1..(1u64 << count) {
            let bit = i.trailing_zeros() as usize;
            mask ^= 1 << bit;
            let v = if mask >> bit & 1 == 1 { 1.0 } else { 0.0 };
            ev.set_line(lines.line(bit), c(v));
            let r = ev.ratio();
            best.offer(r, ev, field, "exhaustive");
        }
    }
}

fn exhaustive_points(ev: &mut Evaluator, size: usize, field: &Field, best: &mut Best) {
    ev.load(&GridFunction::zeros(field, ev.n));
    let mut mask = 0u64;
    for i in 1..(1u64 << size) {
        let bit = i.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let v = if mask >> bit & 1 == 1 { 1.0 } else { 0.0 };
        ev.set_point(bit, c(v));
        let r = ev.ratio();
        best.offer(r, ev, field, "exhaustive");
    }
}

const DENSITIES: [f64; 5] = [0.001, 0.01, 0.05, 0.2, 0.5];
const STARTS_PER_DENSITY: usize = 8;

fn random_lines(
    ev: &mut Evaluator,
    lines: &Lines,
    zero_grid: &[f64],
    field: &Field,
    rng: &mut ChaCha8Rng,
    best: &mut Best,
) {
    let count = lines.count();
    for &rho in &DENSITIES {
        for _ in 0..STARTS_PER_DENSITY {
            if ev.exhausted() {
                return;
            }
            let k = ((rho * count as f64).round() as usize).clamp(1, count);
            let mut vals = vec![c(0.0); count];
            for l in sample(rng, count, k) {
                vals[l] = c(1.0);
            }
            let z = zero_grid[rng.gen_range(0..zero_grid.len())];
            ev.load(&lines.grid(field, ev.n, &vals, c(z)));
            let r = ev.ratio();
            best.offer(r, ev, field, &format!("random-lines density={rho}"));
        }
    }
}

/// Grows the best function by the best of a few sampled line toggles.
fn greedy_lines(
    ev: &mut Evaluator,
    lines: &Lines,
    field: &Field,
    rng: &mut ChaCha8Rng,
    best: &mut Best,
) {
    let Some(start) = best.grid.clone() else { return };
    ev.load(&start);
    let mut current = ev.ratio();
    let count = lines.count();
    let sample_size = count.min(32);
    for _ in 0..64 {
        let mut step: Option<(usize, Complex64, f64)> = None;
        for l in sample(rng, count, sample_size) {
            if ev.exhausted() {
                break;
            }
            let members = lines.line(l);
            let old = ev.g[members[0]];
            let new = if old.norm() > 0.0 { c(0.0) } else { c(1.0) };
            ev.set_line(members, new);
            let r = ev.ratio();
            ev.set_line(members, old);
            if r > step.map_or(current, |s| s.2) {
                step = Some((l, new, r));
            }
        }
        match step {
            Some((l, v, r)) => {
                ev.set_line(lines.line(l), v);
                current = r;
                best.offer(r, ev, field, "greedy-lines");
            }
            None => break,
        }
    }
}

fn climb_lines(
    ev: &mut Evaluator,
    lines: &Lines,
    class: SearchClass,
    field: &Field,
    rng: &mut ChaCha8Rng,
    best: &mut Best,
) {
    let Some(start) = best.grid.clone() else { return };
    ev.load(&start);
    let mut current = ev.ratio();
    let count = lines.count();
    let patience = (4 * count).max(200);
    let mut stale = 0;
    while !ev.exhausted() && stale < patience {
        let l = rng.gen_range(0..=count);
        let origin = l == count;
        let old = if origin { ev.g[0] } else { ev.g[lines.rep(l)] };
        let new = if class.indicator() {
            if old.norm() > 0.0 {
                c(0.0)
            } else {
                c(1.0)
            }
        } else {
            let scale = ev.g.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
            match rng.gen_range(0..3) {
                0 => c(0.0),
                1 => c(rng.gen_range(-1.0..=1.0) * scale),
                _ => old + c(rng.gen_range(-0.25..=0.25) * scale),
            }
        };
        if origin {
            ev.set_point(0, new);
        } else {
            ev.set_line(lines.line(l), new);
        }
        let r = ev.ratio();
        if r > current * (1.0 + 1e-12) {
            current = r;
            stale = 0;
            best.offer(r, ev, field, "hill-climb-lines");
        } else {
            stale += 1;
            if origin {
                ev.set_point(0, old);
            } else {
                ev.set_line(lines.line(l), old);
            }
        }
    }
}

fn random_points(
    ev: &mut Evaluator,
    size: usize,
    field: &Field,
    rng: &mut ChaCha8Rng,
    best: &mut Best,
    complex: bool,
) {
    for &rho in &DENSITIES {
        for _ in 0..STARTS_PER_DENSITY {
            if ev.exhausted() {
                return;
            }
            let mut g = GridFunction::zeros(field, ev.n);
            if complex {
                for v in g.values_mut() {
                    if rng.gen_bool(rho) {
                        *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    }
                }
                g.values_mut()[0] += c(1e-3);
            } else {
                let k = ((rho * size as f64).round() as usize).clamp(1, size);
                for i in sample(rng, size, k) {
                    g.values_mut()[i] = c(1.0);
                }
            }
            ev.load(&g);
            let r = ev.ratio();
            best.offer(r, ev, field, &format!("random-points density={rho}"));
        }
    }
}

fn climb_points(
    ev: &mut Evaluator,
    size: usize,
    indicator: bool,
    field: &Field,
    rng: &mut ChaCha8Rng,
    best: &mut Best,
) {
    let Some(start) = best.grid.clone() else { return };
    ev.load(&start);
    let mut current = ev.ratio();
    let patience = (4 * size).max(200);
    let mut stale = 0;
    while !ev.exhausted() && stale < patience {
        let m = rng.gen_range(0..size);
        let old = ev.g[m];
        let new = if indicator {
            if old.norm() > 0.0 {
                c(0.0)
            } else {
                c(1.0)
            }
        } else {
            let scale = ev.g.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
            old + Complex64::new(rng.gen_range(-0.25..=0.25), rng.gen_range(-0.25..=0.25)) * scale
        };
        ev.set_point(m, new);
        let r = ev.ratio();
        if r > current * (1.0 + 1e-12) {
            current = r;
            stale = 0;
            best.offer(r, ev, field, "hill-climb-points");
        } else {
            stale += 1;
            ev.set_point(m, old);
        }
    }
}
