//! Littlewood–Paley decomposition on the torus.
//!
//! The family is inhomogeneous: `ψ_0 = φ` collects the modes `|k| < 2`
//! (including the mean) and `ψ_j(k) = φ(|k|/2^j) - φ(|k|/2^{j-1})` for
//! `j ≥ 1`, so that `Σ_{j ≤ J} ψ_j = φ(|k|/2^J)` telescopes to one on every
//! grid mode once `2^J ≥ N/2`. Bumps are measured in integer modes, not in
//! physical frequency, so block boundaries do not depend on the period.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::torus::{analyze_raw, synthesize_raw, ScalarField, TorusGrid};

/// `exp(-1/s)` for `s > 0`, zero otherwise.
fn flat_exp(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth monotone cutoff: one on `|t| ≤ 1`, zero on `|t| ≥ 2`.
pub fn cutoff(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        return 1.0;
    }
    if t >= 2.0 {
        return 0.0;
    }
    let a = flat_exp(2.0 - t);
    let b = flat_exp(t - 1.0);
    a / (a + b)
}

/// Annular bump `ψ(t) = φ(t) - φ(2t)`, supported on `1/2 ≤ |t| ≤ 2`.
pub fn annulus_bump(t: f64) -> f64 {
    cutoff(t) - cutoff(2.0 * t)
}

/// Human-readable description of the cutoff, for run metadata.
pub const PROFILE: &str =
    "phi(t)=e(2-|t|)/(e(2-|t|)+e(|t|-1)), e(s)=exp(-1/s) for s>0 else 0; psi_j(k)=phi(|k|/2^j)-phi(|k|/2^(j-1))";

#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: TorusGrid,
    j_max: usize,
    /// `psi[j][i]`: weight of block `j` on the mode stored at FFT index `i`.
    psi: Vec<Vec<f64>>,
}

impl DyadicPartition {
    pub fn new(grid: &TorusGrid) -> Self {
        let half = grid.len() / 2;
        let j_max = half.trailing_zeros() as usize;
        let psi = (0..=j_max)
            .map(|j| {
                grid.modes()
                    .into_iter()
                    .map(|k| {
                        let t = k.unsigned_abs() as f64;
                        if j == 0 {
                            cutoff(t)
                        } else {
                            cutoff(t / (1u64 << j) as f64) - cutoff(t / (1u64 << (j - 1)) as f64)
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            grid: grid.clone(),
            j_max,
            psi,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Index of the top block: the smallest `j` with `2^j ≥ N/2`.
    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn block_count(&self) -> usize {
        self.j_max + 1
    }

    /// `ψ_j(k)`; zero for modes outside the grid.
    pub fn psi(&self, j: usize, k: i64) -> f64 {
        match (self.psi.get(j), self.grid.index_of(k)) {
            (Some(row), Some(i)) => row[i],
            _ => 0.0,
        }
    }

    fn check(&self, f: &ScalarField) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j > self.j_max {
            return Err(Error::OutOfRange {
                index: j,
                max: self.j_max,
            });
        }
        Ok(())
    }

    fn filtered(&self, f: &ScalarField, weight: impl Fn(usize) -> f64) -> ScalarField {
        let mut c = analyze_raw(f);
        let coeffs: Vec<Complex64> = c
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, z)| z * weight(i))
            .collect();
        c = crate::torus::Spectrum::new(&self.grid, coeffs).expect("finite coefficients");
        synthesize_raw(&c)
    }

    /// `f_j = ℱ^{-1}[ψ_j ℱf]`.
    pub fn block(&self, f: &ScalarField, j: usize) -> Result<ScalarField> {
        self.check(f)?;
        self.check_index(j)?;
        Ok(self.filtered(f, |i| self.psi[j][i]))
    }

    /// `f^j = Σ_{k ≤ j} f_k`.
    pub fn low_pass(&self, f: &ScalarField, j: usize) -> Result<ScalarField> {
        self.check(f)?;
        self.check_index(j)?;
        Ok(self.filtered(f, |i| (0..=j).map(|k| self.psi[k][i]).sum()))
    }

    /// All blocks `f_0, …, f_{j_max}` from a single analysis.
    pub fn blocks(&self, f: &ScalarField) -> Result<Vec<ScalarField>> {
        self.check(f)?;
        let c = analyze_raw(f);
        Ok(self
            .psi
            .iter()
            .map(|row| {
                let coeffs = c.coeffs().iter().zip(row).map(|(z, w)| z * w).collect();
                synthesize_raw(&crate::torus::Spectrum::new(&self.grid, coeffs).expect("finite"))
            })
            .collect())
    }

    /// Running sums `f^0, …, f^{j_max}` of the blocks.
    pub fn low_passes(&self, f: &ScalarField) -> Result<Vec<ScalarField>> {
        let blocks = self.blocks(f)?;
        let mut out: Vec<ScalarField> = Vec::with_capacity(blocks.len());
        for b in blocks {
            let next = match out.last() {
                Some(prev) => prev + &b,
                None => b,
            };
            out.push(next);
        }
        Ok(out)
    }

    fn pair(
        &self,
        f: &ScalarField,
        g: &ScalarField,
    ) -> Result<(Vec<ScalarField>, Vec<ScalarField>)> {
        self.check(f)?;
        self.check(g)?;
        Ok((self.blocks(f)?, self.blocks(g)?))
    }

    /// `Π₁(f, g) = Σ_j f_j g^{j-4}`: high frequencies of `f` against low of `g`.
    pub fn pi1(&self, f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
        let (fb, gb) = self.pair(f, g)?;
        Ok(low_high(&fb, &gb, &self.grid))
    }

    /// `Π₂(f, g) = Σ_j g_j f^{j-4}`.
    pub fn pi2(&self, f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
        let (fb, gb) = self.pair(f, g)?;
        Ok(low_high(&gb, &fb, &self.grid))
    }

    /// `Π₃(f, g) = Σ_j f_j Σ_{|k-j| ≤ 3} g_k`: comparable frequencies.
    pub fn pi3(&self, f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
        let (fb, gb) = self.pair(f, g)?;
        let n = self.grid.len();
        let mut acc = vec![0.0; n];
        for (j, fj) in fb.iter().enumerate() {
            let lo = j.saturating_sub(3);
            let hi = (j + 3).min(self.j_max);
            for gk in &gb[lo..=hi] {
                for ((s, a), b) in acc.iter_mut().zip(fj.samples()).zip(gk.samples()) {
                    *s += a * b;
                }
            }
        }
        Ok(ScalarField::new(&self.grid, acc).expect("finite"))
    }

    /// Centered dyadic maximal function: at each sample, the largest average
    /// of `|f|` over the periodic balls of radius `h, 2h, 4h, …, L/2`.
    /// Averages use trapezoid weights (half weight on the two end samples).
    pub fn maximal(&self, f: &ScalarField) -> Result<ScalarField> {
        self.check(f)?;
        Ok(maximal(f))
    }
}

/// `Σ_j high_j · low^{j-4}` with `low^{j} = Σ_{k ≤ j} low_k`.
fn low_high(high: &[ScalarField], low: &[ScalarField], grid: &TorusGrid) -> ScalarField {
    let n = grid.len();
    let mut acc = vec![0.0; n];
    let mut running = vec![0.0; n];
    for j in 4..high.len() {
        for (r, v) in running.iter_mut().zip(low[j - 4].samples()) {
            *r += v;
        }
        for ((s, a), b) in acc.iter_mut().zip(high[j].samples()).zip(&running) {
            *s += a * b;
        }
    }
    ScalarField::new(grid, acc).expect("finite")
}

pub fn build_partition(grid: &TorusGrid) -> DyadicPartition {
    DyadicPartition::new(grid)
}

/// Centered dyadic maximal function of `f` (see [`DyadicPartition::maximal`]).
pub fn maximal(f: &ScalarField) -> ScalarField {
    let n = f.len();
    let abs: Vec<f64> = f.samples().iter().map(|v| v.abs()).collect();
    // prefix[t] = Σ_{s < t} abs[(s + n) mod n] over three periods, offset by n.
    let mut prefix = vec![0.0; 3 * n + 1];
    for t in 0..3 * n {
        prefix[t + 1] = prefix[t] + abs[t % n];
    }
    let mut out = vec![0.0f64; n];
    let mut m = 1;
    while m <= n / 2 {
        for (i, o) in out.iter_mut().enumerate() {
            let lo = i + n - m;
            let hi = i + n + m;
            let sum = prefix[hi + 1] - prefix[lo] - 0.5 * (abs[lo % n] + abs[hi % n]);
            *o = o.max(sum / (2 * m) as f64);
        }
        m *= 2;
    }
    ScalarField::new(f.grid(), out).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{band_limited, trial_rng, Band};

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::standard(n).unwrap()
    }

    #[test]
    fn partition_of_unity() {
        let g = grid(256);
        let p = build_partition(&g);
        assert_eq!(p.j_max(), 7);
        for k in g.modes() {
            let s: f64 = (0..=p.j_max()).map(|j| p.psi(j, k)).sum();
            assert!((s - 1.0).abs() < 1e-12, "k={k}");
            for j in 0..=p.j_max() {
                let v = p.psi(j, k);
                assert!((0.0..=1.0).contains(&v));
                let a = k.unsigned_abs();
                if j >= 1 && v != 0.0 {
                    assert!(a >= 1 << (j - 1) && a <= 1 << (j + 1));
                }
            }
        }
    }

    #[test]
    fn named_bump_values() {
        let p = build_partition(&grid(256));
        assert_eq!(p.psi(6, 64), 1.0);
        assert_eq!(p.psi(5, 64), 0.0);
        assert_eq!(p.psi(7, 64), 0.0);
        assert_eq!(p.psi(0, 1), 1.0);
        assert_eq!(p.psi(1, 1), 0.0);
        assert_eq!(p.psi(0, 0), 1.0);
    }

    #[test]
    fn profile_is_monotone_and_smooth_at_joins() {
        let mut prev = 1.0;
        for i in 0..=400 {
            let t = 0.8 + i as f64 * 0.0035;
            let v = cutoff(t);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert!(cutoff(1.0 + 1e-3) > 1.0 - 1e-12);
        assert!(cutoff(2.0 - 1e-3) < 1e-12);
        assert!((annulus_bump(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_annulus_mode() {
        let g = grid(256);
        let p = build_partition(&g);
        let f = ScalarField::from_fn(&g, |x| (64.0 * x).cos()).unwrap();
        for j in 0..=p.j_max() {
            let b = p.block(&f, j).unwrap();
            let err = if j == 6 {
                (&b - &f).max_abs()
            } else {
                b.max_abs()
            };
            assert!(err < 1e-12, "j={j}");
        }
        let c = ScalarField::constant(&g, 2.0);
        assert!((&p.block(&c, 0).unwrap() - &c).max_abs() < 1e-14);
        assert!(p.block(&c, 8).is_err());
        assert!(p.low_pass(&c, 9).is_err());
    }

    #[test]
    fn reconstruction_and_low_pass() {
        let g = grid(512);
        let p = build_partition(&g);
        let f = band_limited(&g, Band::new(200, 0.3), &mut trial_rng(3, 0))
            .unwrap()
            .shift(0.7);
        let sum = p
            .blocks(&f)
            .unwrap()
            .iter()
            .fold(ScalarField::zeros(&g), |acc, b| &acc + b);
        assert!((&sum - &f).max_abs() < 1e-12 * f.max_abs());
        let lp = p.low_passes(&f).unwrap();
        assert!((&lp[p.j_max()] - &f).max_abs() < 1e-12 * f.max_abs());
        let direct = p.low_pass(&f, 4).unwrap();
        assert!((&direct - &lp[4]).max_abs() < 1e-12 * f.max_abs());
    }

    #[test]
    fn paraproduct_examples() {
        let g = grid(256);
        let p = build_partition(&g);
        let c1 = ScalarField::from_fn(&g, |x| x.cos()).unwrap();
        let c64 = ScalarField::from_fn(&g, |x| (64.0 * x).cos()).unwrap();
        let fg = &c1 * &c1;
        assert!((&p.pi3(&c1, &c1).unwrap() - &fg).max_abs() < 1e-13);
        assert!(p.pi1(&c1, &c1).unwrap().max_abs() < 1e-13);
        assert!(p.pi2(&c1, &c1).unwrap().max_abs() < 1e-13);

        let fg = &c64 * &c1;
        assert!((&p.pi1(&c64, &c1).unwrap() - &fg).max_abs() < 1e-13);
        assert!(p.pi2(&c64, &c1).unwrap().max_abs() < 1e-13);
        assert!(p.pi3(&c64, &c1).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn paraproduct_symmetry_and_grid_check() {
        let g = grid(128);
        let p = build_partition(&g);
        let f = band_limited(&g, Band::new(50, 0.5), &mut trial_rng(9, 0)).unwrap();
        let h = band_limited(&g, Band::new(50, 0.5), &mut trial_rng(9, 1)).unwrap();
        assert_eq!(p.pi1(&f, &h).unwrap(), p.pi2(&h, &f).unwrap());
        let other = ScalarField::zeros(&grid(64));
        assert_eq!(p.pi1(&f, &other), Err(Error::GridMismatch));
    }

    #[test]
    fn maximal_basics() {
        let g = grid(128);
        let c = ScalarField::constant(&g, -3.0);
        let m = maximal(&c);
        assert!(m.samples().iter().all(|v| (v - 3.0).abs() < 1e-12));

        // A bump: every tested ball average is below the maximal function.
        let f =
            ScalarField::from_fn(&g, |x| if (x - 2.0).abs() < 0.3 { 1.0 } else { 0.0 }).unwrap();
        let m = maximal(&f);
        let n = g.len();
        for i in 0..n {
            for r in [1usize, 2, 4, 16, 64] {
                let avg: f64 = (0..=2 * r)
                    .map(|t| {
                        let w = if t == 0 || t == 2 * r { 0.5 } else { 1.0 };
                        w * f.samples()[(i + n - r + t) % n]
                    })
                    .sum::<f64>()
                    / (2 * r) as f64;
                assert!(m.samples()[i] >= avg - 1e-14);
            }
        }
    }
}
