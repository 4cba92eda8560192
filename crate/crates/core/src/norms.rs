//! Computable norms on the torus and the localization diagnostics built from
//! them.
//!
//! Homogeneous norms ignore the zero mode. Where the mean matters (the dual
//! `Ḣ^{-1/2}` norm) it is reported next to the norm instead of being folded
//! in.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicPartition;
use crate::torus::{analyze_raw, ScalarField, TorusGrid, VectorField};

/// A subset of the torus, described geometrically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Whole,
    /// Periodic ball `{x : d(x, center) < radius}`.
    Ball {
        center: f64,
        radius: f64,
    },
    /// Dyadic annulus `A_j = B_{2^{j+1}}(center) \ B_{2^{j-1}}(center)`.
    Annulus {
        center: f64,
        j: i32,
    },
    /// Open periodic interval `(a, b)`, `a < b`.
    Interval {
        a: f64,
        b: f64,
    },
}

impl Region {
    pub fn ball(center: f64, radius: f64) -> Self {
        Region::Ball { center, radius }
    }

    pub fn annulus(center: f64, j: i32) -> Self {
        Region::Annulus { center, j }
    }

    pub fn annulus_radii(j: i32) -> (f64, f64) {
        (2f64.powi(j - 1), 2f64.powi(j + 1))
    }

    fn validate(&self, grid: &TorusGrid) -> Result<()> {
        let half = grid.period() / 2.0;
        match *self {
            Region::Whole => Ok(()),
            Region::Ball { radius, .. } if !(radius >= 0.0 && radius <= half) => Err(
                Error::Precondition(format!("ball radius {radius} outside [0, L/2]")),
            ),
            Region::Annulus { j, .. } if Self::annulus_radii(j).1 > half => Err(
                Error::Precondition(format!("annulus A_{j} does not fit in the torus")),
            ),
            Region::Interval { a, b } if !(b > a && b - a <= grid.period()) => Err(
                Error::Precondition(format!("interval ({a}, {b}) is empty or wraps")),
            ),
            _ => Ok(()),
        }
    }

    /// Membership of each grid point.
    pub fn mask(&self, grid: &TorusGrid) -> Result<Vec<bool>> {
        self.validate(grid)?;
        let eps = 1e-9 * grid.spacing();
        let pts = grid.points();
        Ok(match *self {
            Region::Whole => vec![true; grid.len()],
            Region::Ball { center, radius } => pts
                .iter()
                .map(|&x| grid.distance(x, center) < radius - eps)
                .collect(),
            Region::Interval { a, b } => Region::ball(0.5 * (a + b), 0.5 * (b - a)).mask(grid)?,
            Region::Annulus { center, j } => {
                let (inner, outer) = Self::annulus_radii(j);
                pts.iter()
                    .map(|&x| {
                        let d = grid.distance(x, center);
                        d >= inner - eps && d < outer - eps
                    })
                    .collect()
            }
        })
    }

    /// Quadrature weights: the fraction of each sample's cell
    /// `[x_i - h/2, x_i + h/2]` that lies in the region. On grid-aligned
    /// radii this is the trapezoid rule.
    pub fn weights(&self, grid: &TorusGrid) -> Result<Vec<f64>> {
        self.validate(grid)?;
        let h = grid.spacing();
        let half = grid.period() / 2.0;
        let ball = |center: f64, radius: f64| -> Vec<f64> {
            if radius >= half {
                return vec![1.0; grid.len()];
            }
            grid.points()
                .iter()
                .map(|&x| {
                    let d = grid.distance(x, center);
                    let covered = (d + 0.5 * h).min(radius) - (d - 0.5 * h).max(-radius);
                    let w = (covered / h).clamp(0.0, 1.0);
                    // Snap roundoff so interior cells weigh exactly one.
                    if (w - 1.0).abs() < 1e-9 {
                        1.0
                    } else if w < 1e-9 {
                        0.0
                    } else {
                        w
                    }
                })
                .collect()
        };
        Ok(match *self {
            Region::Whole => vec![1.0; grid.len()],
            Region::Ball { center, radius } => ball(center, radius),
            Region::Interval { a, b } => ball(0.5 * (a + b), 0.5 * (b - a)),
            Region::Annulus { center, j } => {
                let (inner, outer) = Self::annulus_radii(j);
                ball(center, outer)
                    .into_iter()
                    .zip(ball(center, inner))
                    .map(|(o, i)| o - i)
                    .collect()
            }
        })
    }
}

/// Homogeneous Sobolev norm `‖f‖_{Ḣ^s}² = L Σ_{k≠0} |ξ_k|^{2s} |c_k|²`.
pub fn sobolev(f: &ScalarField, s: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&s) {
        return Err(Error::Precondition(format!(
            "order s = {s} outside [-1, 1]"
        )));
    }
    Ok(sobolev_sq(f, s).sqrt())
}

pub(crate) fn sobolev_sq(f: &ScalarField, s: f64) -> f64 {
    let grid = f.grid();
    let c = analyze_raw(f);
    let sum: f64 = c
        .coeffs()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != 0)
        .map(|(i, z)| grid.xi(grid.mode_at(i)).abs().powf(2.0 * s) * z.norm_sqr())
        .sum();
    grid.period() * sum
}

/// Sum of squared component norms, `Σ_a ‖u_a‖²_{Ḣ^s}`.
pub fn sobolev_sq_vector(components: &[ScalarField], s: f64) -> f64 {
    components.iter().map(|c| sobolev_sq(c, s)).sum()
}

/// Dual `Ḣ^{-1/2}` norm of the mean-free part, with the mean reported apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualNorm {
    pub norm: f64,
    pub mean_abs: f64,
}

pub fn neg_half_dual(f: &ScalarField) -> DualNorm {
    DualNorm {
        norm: sobolev_sq(f, -0.5).sqrt(),
        mean_abs: f.mean().abs(),
    }
}

/// Componentwise dual norms combined in `ℓ²`, largest component mean.
pub fn neg_half_dual_vector(u: &VectorField) -> DualNorm {
    let parts: Vec<DualNorm> = u.components().iter().map(neg_half_dual).collect();
    DualNorm {
        norm: parts.iter().map(|p| p.norm * p.norm).sum::<f64>().sqrt(),
        mean_abs: parts.iter().fold(0.0, |m, p| m.max(p.mean_abs)),
    }
}

/// Discrete Gagliardo double integral
/// `(h² Σ_{x∈R1} Σ_{y∈R2, y≠x} (f(x) - f(y))² / d(x, y)²)^{1/2}`
/// with `d` the periodic distance.
pub fn gagliardo(f: &ScalarField, r1: &Region, r2: &Region) -> Result<f64> {
    Ok(gagliardo_sq(f, r1, r2)?.sqrt())
}

pub(crate) fn gagliardo_sq(f: &ScalarField, r1: &Region, r2: &Region) -> Result<f64> {
    let grid = f.grid();
    let n = grid.len();
    let h = grid.spacing();
    let rows: Vec<usize> = indices(&r1.mask(grid)?);
    let cols: Vec<usize> = indices(&r2.mask(grid)?);
    if rows.is_empty() || cols.is_empty() {
        return Ok(0.0);
    }
    let inv_d2: Vec<f64> = (0..n)
        .map(|t| {
            let d = t.min(n - t) as f64 * h;
            if t == 0 {
                0.0
            } else {
                1.0 / (d * d)
            }
        })
        .collect();
    let v = f.samples();
    let row_sums: Vec<f64> = rows
        .par_iter()
        .map(|&i| {
            cols.iter()
                .map(|&j| {
                    let diff = v[i] - v[j];
                    diff * diff * inv_d2[(i + n - j) % n]
                })
                .sum::<f64>()
        })
        .collect();
    Ok(h * h * pairwise_sum(&row_sums))
}

fn indices(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect()
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BmoVariant {
    /// Mean absolute oscillation; `O(N²)`, limited to `N ≤ 4096`.
    L1,
    /// Root-mean-square oscillation via prefix sums.
    #[default]
    L2,
}

/// Arc lengths in samples: `2, 4, …, N/2`.
fn arc_lengths(n: usize) -> impl Iterator<Item = usize> {
    std::iter::successors(Some(2usize), |m| Some(m * 2)).take_while(move |&m| m <= n / 2)
}

/// Sup of the mean oscillation over arcs of length `2h, 4h, …, L/2` at every
/// starting sample.
pub fn bmo(f: &ScalarField, variant: BmoVariant) -> Result<f64> {
    match variant {
        BmoVariant::L1 => {
            let n = f.len();
            if n > 4096 {
                return Err(Error::Precondition(format!(
                    "L1 mean oscillation is quadratic; N = {n} exceeds 4096"
                )));
            }
            let v: Vec<f64> = f.samples().iter().map(|x| x - f.mean()).collect();
            let prefix = periodic_prefix(&v, 2);
            let mut best = 0.0f64;
            for m in arc_lengths(n) {
                for i in 0..n {
                    let mean = (prefix[i + m] - prefix[i]) / m as f64;
                    let osc = (i..i + m).map(|t| (v[t % n] - mean).abs()).sum::<f64>() / m as f64;
                    best = best.max(osc);
                }
            }
            Ok(best)
        }
        BmoVariant::L2 => Ok(bmo_l2(std::slice::from_ref(f))),
    }
}

/// Root-mean-square BMO of a vector field with the Euclidean norm on `R^m`.
pub fn bmo_vector(u: &VectorField) -> f64 {
    bmo_l2(u.components())
}

fn bmo_l2(components: &[ScalarField]) -> f64 {
    let n = components[0].len();
    let centered: Vec<Vec<f64>> = components
        .iter()
        .map(|c| {
            let mu = c.mean();
            c.samples().iter().map(|x| x - mu).collect()
        })
        .collect();
    let p1: Vec<Vec<f64>> = centered.iter().map(|v| periodic_prefix(v, 2)).collect();
    let p2: Vec<Vec<f64>> = centered
        .iter()
        .map(|v| periodic_prefix(&v.iter().map(|x| x * x).collect::<Vec<_>>(), 2))
        .collect();
    let mut best = 0.0f64;
    for m in arc_lengths(n) {
        let mf = m as f64;
        for i in 0..n {
            let var: f64 = p1
                .iter()
                .zip(&p2)
                .map(|(a, b)| {
                    let mean = (a[i + m] - a[i]) / mf;
                    let sq = (b[i + m] - b[i]) / mf;
                    (sq - mean * mean).max(0.0)
                })
                .sum();
            best = best.max(var);
        }
    }
    best.sqrt()
}

/// Prefix sums over `periods` copies of `v`.
fn periodic_prefix(v: &[f64], periods: usize) -> Vec<f64> {
    let n = v.len();
    let mut p = vec![0.0; periods * n + 1];
    for t in 0..periods * n {
        p[t + 1] = p[t] + v[t % n];
    }
    p
}

/// Homogeneous `B⁰_{∞,∞}` norm: `max_j ‖f_j‖_∞`.
pub fn besov_inf(f: &ScalarField) -> f64 {
    let p = DyadicPartition::new(f.grid());
    p.blocks(f)
        .expect("partition built on f's grid")
        .iter()
        .fold(0.0, |m, b| m.max(b.max_abs()))
}

/// Square-function Hardy norm `h Σ_i (Σ_j f_j(x_i)²)^{1/2}` of `f - mean f`.
pub fn hardy(f: &ScalarField) -> f64 {
    hardy_components(std::slice::from_ref(f))
}

/// Vector-valued square function, `h Σ_i (Σ_a Σ_j (u_a)_j(x_i)²)^{1/2}`.
pub fn hardy_vector(u: &VectorField) -> f64 {
    hardy_components(u.components())
}

fn hardy_components(components: &[ScalarField]) -> f64 {
    let grid = components[0].grid();
    let p = DyadicPartition::new(grid);
    let mut sq = vec![0.0; grid.len()];
    for c in components {
        for b in p.blocks(&c.remove_mean()).expect("same grid") {
            for (s, v) in sq.iter_mut().zip(b.samples()) {
                *s += v * v;
            }
        }
    }
    grid.spacing() * sq.iter().map(|v| v.sqrt()).sum::<f64>()
}

/// `∫_region f²` with cell-fraction weights at the boundary.
pub fn local_l2_sq(f: &ScalarField, region: &Region) -> Result<f64> {
    let w = region.weights(f.grid())?;
    Ok(f.grid().spacing()
        * f.samples()
            .iter()
            .zip(&w)
            .map(|(v, w)| w * v * v)
            .sum::<f64>())
}

/// `Σ_a ∫_region u_a²`.
pub fn local_l2_sq_vector(u: &VectorField, region: &Region) -> Result<f64> {
    u.components().iter().map(|c| local_l2_sq(c, region)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationSides {
    /// Squared Gagliardo seminorm over `I = (c - 1, c + 1)`.
    pub lhs: f64,
    /// `Σ_j` of squared seminorms over the annuli `A_j`, `j_floor ≤ j ≤ 0`.
    pub rhs: f64,
    /// `lhs / rhs`, `None` when `rhs` vanishes.
    pub ratio: Option<f64>,
    pub annuli: Vec<i32>,
}

/// Smallest annulus index with inner radius `2^{j-1} ≥ 2h`.
pub fn annulus_floor(grid: &TorusGrid) -> i32 {
    (2.0 * grid.spacing()).log2().ceil() as i32 + 1
}

/// Both sides of the localization of the `Ḣ^{1/2}((c-1, c+1))` seminorm onto
/// dyadic annuli around `c`.
pub fn localization_sides(f: &ScalarField, center: f64) -> Result<LocalizationSides> {
    let grid = f.grid();
    if grid.period() < 4.0 {
        return Err(Error::Precondition(
            "annulus A_0 needs a period of at least 4".into(),
        ));
    }
    let interval = Region::Interval {
        a: center - 1.0,
        b: center + 1.0,
    };
    let lhs = gagliardo_sq(f, &interval, &interval)?;
    let annuli: Vec<i32> = (annulus_floor(grid)..=0).collect();
    let rhs = annuli
        .iter()
        .map(|&j| {
            let a = Region::annulus(center, j);
            gagliardo_sq(f, &a, &a)
        })
        .sum::<Result<f64>>()?;
    let ratio = (rhs > 0.0).then(|| lhs / rhs);
    Ok(LocalizationSides {
        lhs,
        rhs,
        ratio,
        annuli,
    })
}

/// `∫_{B_1(0)} f² / [f]²_{Ḣ^{1/2}((-2, 2))}` for `f` supported in `(-1, 1)`.
/// `None` when both sides vanish.
pub fn poincare_ratio(f: &ScalarField) -> Result<Option<f64>> {
    let grid = f.grid();
    if grid.period() < 4.0 {
        return Err(Error::Precondition("(-2, 2) must fit in the torus".into()));
    }
    let outside = grid
        .points()
        .into_iter()
        .zip(f.samples())
        .find(|&(x, v)| grid.distance(x, 0.0) >= 1.0 && v.abs() >= 1e-12);
    if let Some((x, _)) = outside {
        return Err(Error::Precondition(format!(
            "field does not vanish outside (-1, 1) (at x = {x})"
        )));
    }
    let mass = local_l2_sq(f, &Region::ball(0.0, 1.0))?;
    let big = Region::ball(0.0, 2.0);
    let semi = gagliardo_sq(f, &big, &big)?;
    Ok((semi > 0.0).then(|| mass / semi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{band_limited, trial_rng, Band};
    use std::f64::consts::PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::standard(n).unwrap()
    }

    fn cos_k(g: &TorusGrid, k: f64) -> ScalarField {
        ScalarField::from_fn(g, |x| (k * x).cos()).unwrap()
    }

    #[test]
    fn sobolev_of_cosines() {
        let g = grid(128);
        for k in 1..20 {
            let f = cos_k(&g, k as f64);
            let kf = k as f64;
            assert!((sobolev(&f, 0.5).unwrap().powi(2) - PI * kf).abs() < 1e-10 * kf);
            assert!((sobolev(&f, -0.5).unwrap().powi(2) - PI / kf).abs() < 1e-12);
        }
        assert_eq!(sobolev(&ScalarField::constant(&g, 4.0), 0.5).unwrap(), 0.0);
        assert!(sobolev(&cos_k(&g, 1.0), 1.5).is_err());
    }

    #[test]
    fn dual_norm_examples() {
        let g = grid(64);
        let d = neg_half_dual(&cos_k(&g, 1.0));
        assert!((d.norm * d.norm - PI).abs() < 1e-12);
        let d = neg_half_dual(&ScalarField::constant(&g, 3.0));
        assert_eq!(d.norm, 0.0);
        assert!((d.mean_abs - 3.0).abs() < 1e-15);
    }

    #[test]
    fn gagliardo_basics() {
        let g = grid(256);
        let c = ScalarField::constant(&g, 1.5);
        assert_eq!(gagliardo(&c, &Region::Whole, &Region::Whole).unwrap(), 0.0);
        let f = cos_k(&g, 1.0);
        let whole = gagliardo(&f, &Region::Whole, &Region::Whole).unwrap();
        let a = Region::ball(0.5, 0.4);
        let b = Region::ball(3.5, 0.4);
        let part = gagliardo(&f, &a, &b).unwrap();
        assert!(part <= whole && part > 0.0);
        let empty = Region::ball(1.0, 0.0);
        assert_eq!(gagliardo(&f, &empty, &Region::Whole).unwrap(), 0.0);
    }

    #[test]
    fn bmo_basics() {
        let g = grid(256);
        let f = band_limited(&g, Band::new(20, 0.5), &mut trial_rng(2, 0)).unwrap();
        for variant in [BmoVariant::L1, BmoVariant::L2] {
            assert!(bmo(&ScalarField::constant(&g, 2.0), variant).unwrap() < 1e-12);
            let a = bmo(&f, variant).unwrap();
            let b = bmo(&f.shift(17.0), variant).unwrap();
            assert!((a - b).abs() < 1e-10 * a);
            assert!(a <= 2.0 * f.max_abs());
        }
        let g8k = grid(8192);
        let big = ScalarField::zeros(&g8k);
        assert!(bmo(&big, BmoVariant::L1).is_err());
    }

    #[test]
    fn besov_and_hardy() {
        let g = grid(256);
        let f = cos_k(&g, 64.0);
        assert!((besov_inf(&f) - 1.0).abs() < 1e-10);
        assert!(hardy(&ScalarField::constant(&g, 5.0)) < 1e-12);

        let r = band_limited(&g, Band::new(100, 0.2), &mut trial_rng(4, 0)).unwrap();
        let p = DyadicPartition::new(&g);
        let h = hardy(&r);
        for b in p.blocks(&r).unwrap() {
            assert!(h >= b.l1_norm() - 1e-12);
        }
    }

    #[test]
    fn local_mass_of_balls() {
        let g = grid(512);
        let one = ScalarField::constant(&g, 1.0);
        let mut prev = 0.0;
        for r in [0.05, 0.1, 0.3, 0.7, 1.2, 2.9] {
            let e = local_l2_sq(&one, &Region::ball(1.0, r)).unwrap();
            assert!((e - 2.0 * r).abs() < 1e-12);
            assert!(e >= prev);
            prev = e;
        }
        let h = g.spacing();
        let w = Region::ball(0.0, 16.0 * h).weights(&g).unwrap();
        assert!((w[16] - 0.5).abs() < 1e-9);
        assert_eq!((w[15], w[17]), (1.0, 0.0));
        assert!(local_l2_sq(&one, &Region::ball(0.0, 4.0)).is_err());
    }

    #[test]
    fn annulus_weights_are_ball_differences() {
        let g = grid(1024);
        let one = ScalarField::constant(&g, 1.0);
        for j in -4..=0 {
            let (ri, ro) = Region::annulus_radii(j);
            let a = local_l2_sq(&one, &Region::annulus(0.3, j)).unwrap();
            assert!((a - 2.0 * (ro - ri)).abs() < 1e-12);
        }
        assert!(Region::annulus(0.0, 1).mask(&g).is_err());
    }

    #[test]
    fn localization_degenerate_and_regular() {
        let g = grid(512);
        let s = localization_sides(&ScalarField::constant(&g, 1.0), 0.0).unwrap();
        assert_eq!((s.lhs, s.rhs, s.ratio), (0.0, 0.0, None));
        let s = localization_sides(&cos_k(&g, 4.0), 0.0).unwrap();
        let r = s.ratio.unwrap();
        assert!(r.is_finite() && r > 0.0);
        assert_eq!(*s.annuli.last().unwrap(), 0);
    }

    #[test]
    fn poincare_basics() {
        let g = grid(512);
        assert_eq!(poincare_ratio(&ScalarField::zeros(&g)).unwrap(), None);
        let bump = |x: f64| {
            let y = if x > PI { x - 2.0 * PI } else { x };
            let t = 2.0 * y;
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        };
        let f = ScalarField::from_fn(&g, bump).unwrap();
        let r = poincare_ratio(&f).unwrap().unwrap();
        assert!(r.is_finite() && r > 0.0);
        let r2 = poincare_ratio(&f.scale(2.0)).unwrap().unwrap();
        assert!((r - r2).abs() <= 1e-12 * r);
        assert!(poincare_ratio(&cos_k(&g, 1.0)).is_err());
    }
}
