//! Batch identity and inequality checks over grids of `(q, d, j)`.
//!
//! Each check aggregates many instances and reports the worst one, so a
//! row's `lhs`/`rhs` are the two sides of the instance farthest from
//! passing.

use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{power, Budget};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::field::{make_field, CaseTag, Field, Scalar};
use crate::grid::{
    check_dyadic_mass, dyadic_decompose, fourier_transform, fourier_transform_direct,
    inverse_fourier_transform, lp_sum, majorant_sandwich, GridFunction, FULL_DEPTH,
};
use crate::restriction::{
    cell_seed, conjectured_exponent, dyadic_l2_ratio, necessary_threshold, operator_norm_p2,
    transfer_identity_check, OmegaContext,
};
use crate::soperator::{s_hat_check, s_lp_identity, HomogeneousFunction, LineOrbits};
use crate::tol;
use crate::varieties::{
    build_affine_in_sphere, character_sum, hom_fourier_closed, variety_points, VarietySpec,
};

/// Which nonzero `j` to use for each `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JRule {
    All,
    Squares,
    NonSquares,
    List(Vec<u64>),
}

impl JRule {
    pub fn resolve(&self, field: &Field) -> Result<Vec<Scalar>> {
        let q = field.q();
        let js: Vec<Scalar> = match self {
            JRule::All => (1..q).collect(),
            JRule::Squares => (1..q).filter(|&j| field.is_square(j)).collect(),
            JRule::NonSquares => (1..q).filter(|&j| !field.is_square(j)).collect(),
            JRule::List(list) => {
                let mut js = Vec::new();
                for &j in list {
                    if j % q == 0 {
                        return Err(Error::ZeroArgument("j"));
                    }
                    js.push(j % q);
                }
                js.sort_unstable();
                js.dedup();
                js
            }
        };
        Ok(js)
    }
}

impl FromStr for JRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(JRule::All),
            "squares" => Ok(JRule::Squares),
            "nonsquares" | "non-squares" => Ok(JRule::NonSquares),
            list => list
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad j value '{t}'"))))
                .collect::<Result<Vec<_>>>()
                .map(JRule::List),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub qs: Vec<u64>,
    pub ds: Vec<usize>,
    pub j_rule: JRule,
    pub seed: u64,
    /// Random instances per check and cell.
    pub samples: usize,
    pub budget: Budget,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug)]
pub struct VerifyOutcome {
    pub results: Vec<CheckResult>,
    /// First configuration or budget error hit while running, if any.
    pub error: Option<Error>,
}

/// Worst instance of one check.
struct Acc {
    check: &'static str,
    params: String,
    tol: f64,
    worst: Option<(f64, f64, f64)>,
    pass: bool,
}

impl Acc {
    fn new(check: &'static str, params: &str, tol: f64) -> Self {
        Acc {
            check,
            params: params.to_string(),
            tol,
            worst: None,
            pass: true,
        }
    }

    fn push(&mut self, badness: f64, lhs: f64, rhs: f64, ok: bool) {
        self.pass &= ok;
        let badness = if badness.is_nan() { f64::INFINITY } else { badness };
        if self.worst.map_or(true, |w| badness > w.0) {
            self.worst = Some((badness, lhs, rhs));
        }
    }

    /// `|lhs − rhs| ≤ tol`, with `err` the measured distance.
    fn abs(&mut self, lhs: f64, rhs: f64, err: f64) {
        self.push(err / self.tol, lhs, rhs, err <= self.tol);
    }

    fn rel(&mut self, lhs: f64, rhs: f64) {
        let e = tol::rel_diff(lhs, rhs);
        self.push(e / self.tol, lhs, rhs, e <= self.tol);
    }

    /// `lhs ≤ rhs·(1 + tol)`.
    fn le(&mut self, lhs: f64, rhs: f64) {
        let ok = lhs <= rhs * (1.0 + self.tol);
        self.push(if rhs > 0.0 { lhs / rhs } else { f64::INFINITY }, lhs, rhs, ok);
    }

    fn exact(&mut self, lhs: f64, rhs: f64, ok: bool) {
        self.push(if ok { 0.0 } else { 1.0 }, lhs, rhs, ok);
    }

    fn finish(self) -> CheckResult {
        let (_, lhs, rhs) = self.worst.unwrap_or((0.0, 0.0, 0.0));
        CheckResult {
            check: self.check,
            params: self.params,
            lhs,
            rhs,
            tol: self.tol,
            pass: self.pass && self.worst.is_some(),
        }
    }
}

/// Validates the grid and budget before any work is done.
pub fn plan_verify(cfg: &VerifyConfig) -> Result<Vec<(Field, usize, Vec<Scalar>)>> {
    if cfg.qs.is_empty() || cfg.ds.is_empty() {
        return Err(Error::InvalidDimension("empty q or d list".into()));
    }
    if cfg.samples == 0 || cfg.tol_scale.is_nan() || cfg.tol_scale <= 0.0 {
        return Err(Error::InvalidDimension("samples and tolerance scale must be positive".into()));
    }
    let mut cells = Vec::new();
    for &q in &cfg.qs {
        let field = make_field(q)?;
        for &d in &cfg.ds {
            if d < 2 {
                return Err(Error::InvalidDimension(format!("d = {d}, need d >= 2")));
            }
            cfg.budget
                .check_ambient(&format!("ambient space F_{q}^{}", d + 1), power(q, d + 1))?;
            cfg.budget
                .check_ambient(&format!("direct transform oracle on F_{q}^{d} (q^(2d) terms)"), power(q, 2 * d))?;
            let js = cfg.j_rule.resolve(&field)?;
            cells.push((field.clone(), d, js));
        }
    }
    Ok(cells)
}

enum Task {
    Gauss(Field),
    Grid(Field, usize),
    Variety(Field, usize, Scalar),
    Exponents(usize),
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyOutcome> {
    let cells = plan_verify(cfg)?;
    let mut tasks = Vec::new();
    let mut seen_q = Vec::new();
    for (field, d, js) in &cells {
        if !seen_q.contains(&field.q()) {
            seen_q.push(field.q());
            tasks.push(Task::Gauss(field.clone()));
        }
        tasks.push(Task::Grid(field.clone(), *d));
        for &j in js {
            tasks.push(Task::Variety(field.clone(), *d, j));
        }
    }
    let mut ds = cfg.ds.clone();
    ds.sort_unstable();
    ds.dedup();
    tasks.extend(ds.into_iter().filter(|&d| d >= 3).map(Task::Exponents));

    let outputs: Vec<Result<Vec<CheckResult>>> = tasks
        .par_iter()
        .map(|t| match t {
            Task::Gauss(f) => Ok(gauss_suite(f, cfg)),
            Task::Grid(f, d) => grid_suite(f, *d, cfg),
            Task::Variety(f, d, j) => variety_suite(f, *d, *j, cfg),
            Task::Exponents(d) => exponent_suite(*d, cfg),
        })
        .collect();
    let mut results = Vec::new();
    let mut error = None;
    for out in outputs {
        match out {
            Ok(rows) => results.extend(rows),
            Err(e) if error.is_none() => error = Some(e),
            Err(_) => {}
        }
    }
    Ok(VerifyOutcome { results, error })
}

fn random_grid(field: &Field, dim: usize, rng: &mut ChaCha8Rng) -> GridFunction {
    GridFunction::from_fn(field, dim, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn gauss_suite(field: &Field, cfg: &VerifyConfig) -> Vec<CheckResult> {
    let q = field.q();
    let qf = q as f64;
    let params = format!("q={q}");
    let t = tol::PER_TERM * qf * cfg.tol_scale;
    let g1 = field.gauss_sum(1).expect("a = 1");
    let mut modulus = Acc::new("gauss_modulus", &params, t);
    let mut twist = Acc::new("gauss_twist", &params, t);
    let mut square = Acc::new("gauss_square", &params, t);
    let mut complete = Acc::new("complete_square", &params, t);
    for a in 1..q {
        let ga = field.gauss_sum(a).expect("a != 0");
        modulus.abs(ga.norm_sqr(), qf, (ga.norm_sqr() - qf).abs());
        let want = g1 * f64::from(field.eta(a));
        twist.abs(ga.re, want.re, (ga - want).norm());
        for b in 0..q {
            let direct: Complex64 = (0..q)
                .map(|s| field.chi(field.add(field.mul(a, field.mul(s, s)), field.mul(b, s))))
                .sum();
            let closed = field.complete_square_closed(a, b).expect("a != 0");
            complete.abs(direct.re, closed.re, (direct - closed).norm());
        }
    }
    let sq = g1 * g1;
    let want = f64::from(field.eta(q - 1)) * qf;
    square.abs(sq.re, want, (sq - Complex64::new(want, 0.0)).norm());
    vec![modulus.finish(), twist.finish(), square.finish(), complete.finish()]
}

fn grid_suite(field: &Field, d: usize, cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let q = field.q();
    let params = format!("q={q} d={d}");
    let s = cfg.tol_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(cfg.seed, &[1, q, d as u64]));
    let qd = power(q, d) as f64;

    let mut planch = Acc::new("plancherel", &params, tol::PLANCHEREL_REL * s);
    let mut round = Acc::new("fourier_round_trip", &params, tol::ROUND_TRIP * s);
    let mut direct = Acc::new("fourier_direct", &params, tol::PER_TERM * qd * s);
    let mut s_hat = Acc::new("s_hat_closed_form", &params, tol::S_HAT * qd * s);
    for i in 0..cfg.samples {
        let g = random_grid(field, d, &mut rng);
        let hat = fourier_transform(&g);
        planch.rel(lp_sum(hat.values(), 2.0), qd * lp_sum(g.values(), 2.0));
        let back = inverse_fourier_transform(&hat);
        round.abs(back.max_abs_diff(&g), 0.0, back.max_abs_diff(&g));
        if i < 3 {
            let slow = fourier_transform_direct(&g);
            let err = slow.max_abs_diff(&hat);
            direct.abs(err, 0.0, err);
        }
        let rep = s_hat_check(&g)?;
        s_hat.abs(rep.max_err, 0.0, rep.max_err);
    }

    let orbits = LineOrbits::new(field, d, &cfg.budget)?;
    let mut s_lp = Acc::new("s_lp_identity", &params, tol::S_LP_REL * s);
    let mut s_lp_two = Acc::new("s_lp_at_most_two", &params, 0.0);
    for p in [1.0, 1.5, 1.6, 2.0] {
        for _ in 0..cfg.samples {
            let vals = (0..orbits.count())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let g = HomogeneousFunction::new(orbits.clone(), vals, Complex64::new(rng.gen_range(-1.0..1.0), 0.0))?;
            let rep = s_lp_identity(&g, p)?;
            s_lp.rel(rep.lhs, rep.rhs);
            s_lp_two.le(rep.lhs, 2.0 * g.lp_sum(p));
        }
    }

    let mut sandwich = Acc::new("dyadic_sandwich", &params, 0.0);
    let mut mass = Acc::new("dyadic_mass", &params, 0.0);
    for p in [1.25, 1.5, 2.0] {
        for _ in 0..cfg.samples {
            let raw: Vec<f64> = (0..power(q, d + 1)).map(|_| rng.gen_range(0.0..1.0f64).powi(3)).collect();
            let norm = raw.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p);
            let f = GridFunction::new(field, d + 1, raw.iter().map(|v| Complex64::new(v / norm, 0.0)).collect())?;
            let dec = dyadic_decompose(&f, FULL_DEPTH)?;
            let ok = majorant_sandwich(&f, &dec.majorant);
            sandwich.exact(f64::from(u8::from(ok)), 1.0, ok);
            let rep = check_dyadic_mass(&f, p)?;
            mass.le(rep.lhs, rep.bound);
        }
    }
    Ok(vec![
        planch.finish(),
        round.finish(),
        direct.finish(),
        s_hat.finish(),
        s_lp.finish(),
        s_lp_two.finish(),
        sandwich.finish(),
        mass.finish(),
    ])
}

/// Every `M ∈ F_q^n` with at most two nonzero coordinates.
pub fn sparse_points(q: u64, n: usize) -> Vec<Vec<Scalar>> {
    let mut out = vec![vec![0; n]];
    for i in 0..n {
        for a in 1..q {
            let mut m = vec![0; n];
            m[i] = a;
            out.push(m.clone());
            for k in i + 1..n {
                for b in 1..q {
                    let mut m2 = m.clone();
                    m2[k] = b;
                    out.push(m2);
                }
            }
        }
    }
    out
}

fn variety_suite(field: &Field, d: usize, j: Scalar, cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let q = field.q();
    let params = format!("q={q} d={d} j={j}");
    let s = cfg.tol_scale;
    let b = &cfg.budget;
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(cfg.seed, &[2, q, d as u64, j]));
    let hom_spec = VarietySpec::hom(field, d, j)?;
    let sphere_spec = VarietySpec::sphere(field, d, j)?;
    let hom = variety_points(&hom_spec, b)?;
    let sphere = variety_points(&sphere_spec, b)?;
    let n = d + 1;
    let ambient = power(q, n) as usize;
    let qd = power(q, d) as f64;

    let mut closed = Acc::new("hom_fourier_closed", &params, tol::HOM_FOURIER * (q as f64).powf(n as f64 / 2.0) * s);
    let mut ms = sparse_points(q, n);
    for _ in 0..cfg.samples {
        ms.push((0..n).map(|_| rng.gen_range(0..q)).collect());
    }
    for m in &ms {
        let want = hom_fourier_closed(&hom_spec, m)? as f64;
        let got = character_sum(&hom, m)?;
        closed.abs(got.re, want, (got - Complex64::new(want, 0.0)).norm());
    }
    let mut card = Acc::new("hom_cardinality", &params, 0.0);
    let size = hom.len() as f64;
    let want = hom_fourier_closed(&hom_spec, &vec![0; n])? as f64;
    card.exact(size, want, size == want);
    let mut card_range = Acc::new("hom_cardinality_range", &params, 0.0);
    card_range.le(qd / 2.0, size);
    card_range.le(size, 2.0 * qd);

    let mut transfer = Acc::new("sphere_transfer", &params, tol::TRANSFER_REL * s);
    for r in [1.0, 2.0, 4.0] {
        for _ in 0..cfg.samples {
            let g = random_grid(field, d, &mut rng);
            let rep = transfer_identity_check(&g, j, r, b)?;
            transfer.rel(rep.lhs, rep.rhs);
        }
    }

    let ctx = OmegaContext::new(&hom_spec, b)?;
    let mut omega_agree = Acc::new("omega_two_algorithms", &params, tol::OMEGA_REL * s);
    let mut omega_bound = Acc::new("omega_bound", &params, tol::OMEGA_BOUND_REL * s);
    let flat = build_affine_in_sphere(field, d, j, cell_seed(cfg.seed, &[3, q, d as u64, j]))?;
    let mut sets: Vec<Vec<usize>> = vec![vec![0], vec![ambient - 1], (0..ambient).collect(), flat.lift().point_indices()];
    for _ in 0..cfg.samples {
        let k = ((ambient as f64).powf(rng.gen_range(0.0..1.0)).round() as usize).clamp(1, ambient);
        sets.push(sample(&mut rng, ambient, k).into_vec());
    }
    for e in &sets {
        match ctx.bound_check(e) {
            Ok(rep) => {
                omega_agree.rel(rep.omega, rep.omega_pairs as f64);
                omega_bound.le(rep.omega, rep.bound);
            }
            Err(Error::IdentityViolation { lhs, rhs, .. }) => omega_agree.rel(lhs, rhs),
            Err(e) => return Err(e),
        }
    }

    let mut dyadic = Acc::new("dyadic_l2_ratio", &params, 0.0);
    for _ in 0..cfg.samples {
        let f = GridFunction::from_fn(field, n, |_| Complex64::new(rng.gen_range(0.0..=1.0), 0.0));
        let rep = dyadic_l2_ratio(&f, &hom)?;
        dyadic.push((rep.ratio.ln().abs() / 4f64.ln()).max(0.0), rep.ratio, 4.0, rep.pass);
    }

    let mut flat_dim = Acc::new("sphere_flat", &params, 0.0);
    let want_k = field.case_tag(d, j).sphere_flat_dim(d);
    let contained = flat.certify_in_sphere(j).is_ok();
    flat_dim.exact(flat.k() as f64, want_k as f64, contained && flat.k() == want_k);

    let mut op = Acc::new("operator_norm_p2", &params, tol::OPERATOR_NORM_REL * s);
    for set in [&sphere, &hom] {
        let rep = operator_norm_p2(set, cell_seed(cfg.seed, &[4, q, d as u64, j]))?;
        op.rel(rep.power_iteration, rep.closed);
    }

    Ok(vec![
        closed.finish(),
        card.finish(),
        card_range.finish(),
        transfer.finish(),
        omega_agree.finish(),
        omega_bound.finish(),
        dyadic.finish(),
        flat_dim.finish(),
        op.finish(),
    ])
}

fn exponent_suite(d: usize, _cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let mut acc = Acc::new("exponent_threshold", &format!("d={d}"), 0.0);
    let two = Exponent::integer(2)?;
    for t in CaseTag::ALL.into_iter().filter(|t| t.fits(d)) {
        let thr = necessary_threshold(d, t.sphere_flat_dim(d), two)?;
        let conj = conjectured_exponent(d, t)?;
        let f = |r: crate::exponent::Rational| *r.numer() as f64 / *r.denom() as f64;
        acc.exact(f(thr), f(conj), thr == conj);
    }
    Ok(vec![acc.finish()])
}
