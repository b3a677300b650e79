//! Slow reference implementations written directly from the definitions,
//! sharing no code with the library beyond its index convention.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

pub struct Oracle {
    pub q: u64,
    chi: Vec<Complex64>,
}

impl Oracle {
    pub fn new(q: u64) -> Self {
        let chi = (0..q)
            .map(|t| Complex64::from_polar(1.0, 2.0 * PI * t as f64 / q as f64))
            .collect();
        Oracle { q, chi }
    }

    /// `e^{2πi t/q}` for any integer `t`.
    pub fn chi(&self, t: i128) -> Complex64 {
        self.chi[t.rem_euclid(self.q as i128) as usize]
    }

    /// Legendre symbol by Euler's criterion.
    pub fn eta(&self, a: u64) -> i32 {
        let a = a % self.q;
        if a == 0 {
            return 0;
        }
        let mut base = a as u128;
        let mut e = (self.q - 1) / 2;
        let mut acc: u128 = 1;
        let m = self.q as u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        if acc == 1 {
            1
        } else {
            -1
        }
    }

    pub fn pow(&self, n: usize) -> usize {
        (self.q as usize).pow(n as u32)
    }

    /// Coordinates of index `i`, first coordinate least significant.
    pub fn coords(&self, mut i: usize, n: usize) -> Vec<u64> {
        let mut c = vec![0; n];
        for x in c.iter_mut() {
            *x = (i % self.q as usize) as u64;
            i /= self.q as usize;
        }
        c
    }

    pub fn index(&self, c: &[u64]) -> usize {
        c.iter().rev().fold(0, |acc, &x| acc * self.q as usize + (x % self.q) as usize)
    }

    pub fn dot(&self, a: &[u64], b: &[u64]) -> i128 {
        a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
    }

    pub fn norm(&self, a: &[u64]) -> u64 {
        (self.dot(a, a) % self.q as i128) as u64
    }

    /// `Σ_m e^{-2πi m·x/q} g(m)` at each `x` in `at`.
    pub fn dft_at(&self, g: &[Complex64], n: usize, at: &[Vec<u64>]) -> Vec<Complex64> {
        let ms: Vec<Vec<u64>> = (0..g.len()).map(|i| self.coords(i, n)).collect();
        at.iter()
            .map(|x| {
                ms.iter()
                    .zip(g)
                    .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
                    .map(|(m, v)| self.chi(-self.dot(m, x)) * v)
                    .sum()
            })
            .collect()
    }

    pub fn dft(&self, g: &[Complex64], n: usize) -> Vec<Complex64> {
        let all: Vec<Vec<u64>> = (0..g.len()).map(|i| self.coords(i, n)).collect();
        self.dft_at(g, n, &all)
    }

    /// `Sg(m, s) = q^{-1} Σ_{t≠0} e^{2πi ts/q} g(tm)`.
    pub fn s_op(&self, g: &[Complex64], d: usize) -> Vec<Complex64> {
        let q = self.q;
        let mut out = vec![Complex64::new(0.0, 0.0); g.len() * q as usize];
        for (i, slot) in out.iter_mut().enumerate() {
            let c = self.coords(i, d + 1);
            let (m, s) = (&c[..d], c[d]);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 1..q {
                let tm: Vec<u64> = m.iter().map(|&x| x * t % q).collect();
                acc += self.chi((t * s) as i128) * g[self.index(&tm)];
            }
            *slot = acc / q as f64;
        }
        out
    }

    /// `{x ∈ F_q^d : Σ x_i² = j}`.
    pub fn sphere(&self, d: usize, j: u64) -> Vec<Vec<u64>> {
        (0..self.pow(d))
            .map(|i| self.coords(i, d))
            .filter(|x| self.norm(x) == j % self.q)
            .collect()
    }

    /// `{(x, s) ∈ F_q^{d+1} : Σ x_i² = j s²}`.
    pub fn hom(&self, d: usize, j: u64) -> Vec<Vec<u64>> {
        let q = self.q as i128;
        (0..self.pow(d + 1))
            .map(|i| self.coords(i, d + 1))
            .filter(|x| {
                let s = x[d] as i128;
                (self.dot(&x[..d], &x[..d]) - j as i128 * s * s).rem_euclid(q) == 0
            })
            .collect()
    }

    /// Largest flat dimension inside the sphere, per the five cases.
    pub fn flat_dim(&self, d: usize, j: u64) -> usize {
        if d % 2 == 0 {
            return (d - 2) / 2;
        }
        let sign = if d % 4 == 1 { self.eta(j) } else { self.eta(self.q - j % self.q) };
        if sign == -1 {
            (d - 3) / 2
        } else {
            (d - 1) / 2
        }
    }
}

pub fn ellp(values: &[Complex64], p: f64) -> f64 {
    values.iter().map(|v| v.norm().powf(p)).sum()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}
