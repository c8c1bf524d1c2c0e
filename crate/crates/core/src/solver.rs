//! Finite-difference discretization of `−d²/dx² + V(x)` with Dirichlet walls
//! and the lowest eigenpairs of the resulting symmetric tridiagonal matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with a partially pivoted tridiagonal LU factorization.
//! Vectors whose eigenvalues are close are reorthogonalized against each
//! other.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::DeltaTerm;
use crate::profile::TWO_PI;

/// Coarsest spacing ever used, regardless of oscillation wavenumber.
pub const MAX_DX: f64 = 0.01;

/// Minimum number of nodes per oscillation period.
pub const MIN_NODES_PER_PERIOD: f64 = 16.0;

/// Uniform grid of `n` interior nodes `x_j = x_min + (j+1)·dx` on `[x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    dx: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {n}")));
        }
        Ok(Self {
            x_min,
            x_max,
            n,
            dx: (x_max - x_min) / (n + 1) as f64,
        })
    }

    /// Coarsest grid whose spacing does not exceed `max_dx`.
    pub fn with_max_spacing(x_min: f64, x_max: f64, max_dx: f64) -> Result<Self> {
        if !(max_dx > 0.0) {
            return Err(Error::InvalidGrid(format!("max_dx must be positive, got {max_dx}")));
        }
        let intervals = ((x_max - x_min) / max_dx * (1.0 - 1e-12)).ceil() as usize;
        Self::new(x_min, x_max, intervals.max(4) - 1)
    }

    /// Grid resolving oscillations of wavenumber `k` with at least
    /// `nodes_per_period` nodes per period and spacing at most [`MAX_DX`].
    pub fn resolving(x_min: f64, x_max: f64, k: f64, nodes_per_period: f64) -> Result<Self> {
        if nodes_per_period < MIN_NODES_PER_PERIOD {
            return Err(Error::InvalidGrid(format!(
                "nodes_per_period = {nodes_per_period} is below the minimum {MIN_NODES_PER_PERIOD}"
            )));
        }
        let dx = (TWO_PI / (nodes_per_period * k)).min(MAX_DX);
        Self::with_max_spacing(x_min, x_max, dx)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + (j + 1) as f64 * self.dx
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Same interval with spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            x_min: self.x_min,
            x_max: self.x_max,
            n: 2 * self.n + 1,
            dx: self.dx / 2.0,
        }
    }
}

/// Symmetric tridiagonal matrix with constant off-diagonal `−1/dx²`.
#[derive(Clone, Debug)]
pub struct TridiagonalHamiltonian {
    grid: Grid,
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    /// `H·ψ`.
    pub fn apply(&self, psi: &[f64]) -> Vec<f64> {
        let n = self.diagonal.len();
        (0..n)
            .map(|i| {
                let mut y = self.diagonal[i] * psi[i];
                if i > 0 {
                    y += self.off_diagonal[i - 1] * psi[i - 1];
                }
                if i + 1 < n {
                    y += self.off_diagonal[i] * psi[i + 1];
                }
                y
            })
            .collect()
    }

    /// Infinity norm, an upper bound on the spectral radius.
    pub fn norm(&self) -> f64 {
        let n = self.diagonal.len();
        (0..n)
            .map(|i| {
                let mut r = self.diagonal[i].abs();
                if i > 0 {
                    r += self.off_diagonal[i - 1].abs();
                }
                if i + 1 < n {
                    r += self.off_diagonal[i].abs();
                }
                r
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin interval containing every eigenvalue.
    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diagonal.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off_diagonal[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off_diagonal[i].abs();
            }
            lo = lo.min(self.diagonal[i] - r);
            hi = hi.max(self.diagonal[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma` (Sturm sequence count).
    pub fn count_below(&self, sigma: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + sigma.abs());
        let mut count = 0;
        let mut q = self.diagonal[0] - sigma;
        for i in 0..self.diagonal.len() {
            if i > 0 {
                let e = self.off_diagonal[i - 1];
                q = self.diagonal[i] - sigma - e * e / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Builds the finite-difference Hamiltonian for `−d²/dx² + V(x) + Σ sₙ δ(x − xₙ)`.
///
/// Each delta term is split between the two neighbouring nodes with linear
/// weights, so that `Σ contribution·dx = strength`.
pub fn assemble<V>(grid: &Grid, potential: V, deltas: &[DeltaTerm]) -> Result<TridiagonalHamiltonian>
where
    V: Fn(f64) -> f64,
{
    let dx = grid.dx();
    let kinetic = 1.0 / (dx * dx);
    let mut diagonal = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let x = grid.x(j);
        let v = potential(x);
        if !v.is_finite() {
            return Err(Error::NonFinitePotential { x });
        }
        diagonal.push(2.0 * kinetic + v);
    }
    for d in deltas {
        if !(d.position > grid.x_min() && d.position < grid.x_max()) {
            return Err(Error::DeltaOutsideGrid {
                position: d.position,
                x_min: grid.x_min(),
                x_max: grid.x_max(),
            });
        }
        // fractional node index; -1 and n are the walls
        let t = (d.position - grid.x_min()) / dx - 1.0;
        let mut j = t.floor();
        let mut frac = t - j;
        // snap positions that sit on a node up to rounding
        if frac > 1.0 - 1e-9 {
            j += 1.0;
            frac = 0.0;
        } else if frac < 1e-9 {
            frac = 0.0;
        }
        let j = j as isize;
        let scale = d.strength / dx;
        let n = grid.len() as isize;
        if (0..n).contains(&j) {
            diagonal[j as usize] += scale * (1.0 - frac);
        }
        if frac > 0.0 && (0..n).contains(&(j + 1)) {
            diagonal[(j + 1) as usize] += scale * frac;
        }
    }
    Ok(TridiagonalHamiltonian {
        grid: *grid,
        diagonal,
        off_diagonal: vec![-kinetic; grid.len() - 1],
    })
}

/// Sorted eigenpairs sampled on a grid.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    energies: Vec<f64>,
    states: Vec<Vec<f64>>,
    node_counts: Vec<usize>,
}

impl Spectrum {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i]
    }

    pub fn node_counts(&self) -> &[usize] {
        &self.node_counts
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Only states strictly below the continuum threshold `E = 0`.
    pub fn bound_states(&self) -> Spectrum {
        let keep = self.energies.iter().take_while(|&&e| e < 0.0).count();
        Spectrum {
            grid: self.grid,
            energies: self.energies[..keep].to_vec(),
            states: self.states[..keep].to_vec(),
            node_counts: self.node_counts[..keep].to_vec(),
        }
    }
}

/// Free-function form of [`Spectrum::bound_states`].
pub fn bound_states(s: &Spectrum) -> Spectrum {
    s.bound_states()
}

/// Sign-changes of a sampled state, ignoring entries below `1e-6·max|ψ|`.
pub fn count_nodes(psi: &[f64]) -> usize {
    let max = psi.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tol = 1e-6 * max;
    let mut last = 0.0_f64;
    let mut nodes = 0;
    for &p in psi {
        if p.abs() <= tol {
            continue;
        }
        if last != 0.0 && p.signum() != last.signum() {
            nodes += 1;
        }
        last = p;
    }
    nodes
}

/// Scales to `Σψ²dx = 1` and flips the sign so the first entry exceeding
/// `1e-3·max|ψ|` is positive.
pub fn normalize_state(psi: &mut [f64], dx: f64) {
    let norm = (psi.iter().map(|p| p * p).sum::<f64>() * dx).sqrt();
    let max = psi.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let sign = psi.iter().find(|p| p.abs() > 1e-3 * max).map_or(1.0, |p| p.signum());
    let scale = sign / norm;
    psi.iter_mut().for_each(|p| *p *= scale);
}

/// Relative bisection tolerance on eigenvalues.
const BISECTION_RTOL: f64 = 4.0 * f64::EPSILON;

const MAX_INVERSE_ITERATIONS: usize = 8;

/// The `m` algebraically smallest eigenpairs.
pub fn lowest_eigenpairs(h: &TridiagonalHamiltonian, m: usize) -> Result<Spectrum> {
    let n = h.diagonal.len();
    if m == 0 || m > n {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: format!("requested {m} eigenpairs from a {n}×{n} matrix"),
        });
    }
    let norm = h.norm();
    let (glo, ghi) = h.gershgorin();
    let energies: Vec<f64> = (0..m).map(|i| bisect_eigenvalue(h, i, glo, ghi, norm)).collect();

    let mut states: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, &e) in energies.iter().enumerate() {
        // reorthogonalize against neighbours closer than this
        let cluster = 1e-3 * norm;
        let neighbours: Vec<usize> = (0..i).filter(|&j| (energies[j] - e).abs() < cluster).collect();
        let v = inverse_iteration(h, e, norm, &neighbours, &states).ok_or(Error::NonConvergence { index: i })?;
        states.push(v);
    }

    let dx = h.grid.dx();
    for s in &mut states {
        normalize_state(s, dx);
    }
    let node_counts = states.iter().map(|s| count_nodes(s)).collect();
    Ok(Spectrum {
        grid: h.grid,
        energies,
        states,
        node_counts,
    })
}

fn bisect_eigenvalue(h: &TridiagonalHamiltonian, index: usize, lo: f64, hi: f64, norm: f64) -> f64 {
    let (mut lo, mut hi) = (lo - 1e-12 * norm, hi + 1e-12 * norm);
    let abs_tol = f64::EPSILON * norm;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h.count_below(mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= BISECTION_RTOL * lo.abs().max(hi.abs()) + abs_tol {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Inverse iteration for the eigenvector of eigenvalue `e`; returns a vector
/// of unit Euclidean norm.
fn inverse_iteration(
    h: &TridiagonalHamiltonian,
    e: f64,
    norm: f64,
    neighbours: &[usize],
    previous: &[Vec<f64>],
) -> Option<Vec<f64>> {
    let n = h.diagonal.len();
    let lu = TridiagonalLu::factor(h, e, norm);
    // deterministic, non-symmetric start vector
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64 * 0.618_033_988_75).fract() - 0.5))
        .collect();
    normalize_euclid(&mut x);
    let residual_tol = 1e-9 * norm;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let mut y = lu.solve(&x);
        for &j in neighbours {
            let p = &previous[j];
            let dot: f64 = y.iter().zip(p).map(|(a, b)| a * b).sum();
            let pp: f64 = p.iter().map(|a| a * a).sum();
            y.iter_mut().zip(p).for_each(|(a, b)| *a -= dot / pp * b);
        }
        if !normalize_euclid(&mut y) {
            return None;
        }
        x = y;
        let hx = h.apply(&x);
        let res = hx.iter().zip(&x).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
        if res <= residual_tol {
            return Some(x);
        }
    }
    None
}

fn normalize_euclid(x: &mut [f64]) -> bool {
    let s = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !(s > 0.0) || !s.is_finite() {
        return false;
    }
    x.iter_mut().for_each(|a| *a /= s);
    true
}

/// LU factorization of `H − σI` with partial pivoting (LAPACK `gttrf` layout).
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    pivot_swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(h: &TridiagonalHamiltonian, sigma: f64, norm: f64) -> Self {
        let n = h.diagonal.len();
        let mut dl = h.off_diagonal.clone();
        let mut d: Vec<f64> = h.diagonal.iter().map(|a| a - sigma).collect();
        let mut du = h.off_diagonal.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                // no interchange
                if d[i] == 0.0 {
                    d[i] = f64::EPSILON * norm;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = f64::EPSILON * norm;
        }
        Self {
            dl,
            d,
            du,
            du2,
            pivot_swapped: swapped,
        }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        // L·y = P·b
        for i in 0..n - 1 {
            if self.pivot_swapped[i] {
                let temp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = temp - self.dl[i] * x[i];
            } else {
                x[i + 1] -= self.dl[i] * x[i];
            }
        }
        // U·x = y
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn box_spectrum(n: usize, m: usize) -> Spectrum {
        let grid = Grid::new(0.0, 1.0, n).unwrap();
        let h = assemble(&grid, |_| 0.0, &[]).unwrap();
        lowest_eigenpairs(&h, m).unwrap()
    }

    #[test]
    fn particle_in_a_box() {
        let n = 999;
        let s = box_spectrum(n, 3);
        let dx = 1.0 / (n + 1) as f64;
        for (i, e) in s.energies().iter().enumerate() {
            let q = (i + 1) as f64 * PI;
            // exact discrete eigenvalue and O(dx²) continuum agreement
            let discrete = 4.0 / (dx * dx) * (q * dx / 2.0).sin().powi(2);
            assert!((e - discrete).abs() < 1e-9 * discrete, "{e} vs {discrete}");
            assert!((e - q * q).abs() < q.powi(4) * dx * dx / 12.0 * 1.01);
        }
        assert_eq!(s.node_counts(), &[0, 1, 2]);
    }

    #[test]
    fn states_are_normalized_orthogonal_and_signed() {
        let s = box_spectrum(400, 6);
        let dx = s.grid().dx();
        for i in 0..s.len() {
            let norm: f64 = s.state(i).iter().map(|p| p * p).sum::<f64>() * dx;
            assert!((norm - 1.0).abs() < 1e-10);
            assert!(s.state(i)[0] > 0.0);
            for j in 0..i {
                let dot: f64 = s.state(i).iter().zip(s.state(j)).map(|(a, b)| a * b).sum::<f64>() * dx;
                assert!(dot.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn residual_is_small() {
        let grid = Grid::new(-6.0, 6.0, 3000).unwrap();
        let h = assemble(&grid, |x| x * x, &[]).unwrap();
        let s = lowest_eigenpairs(&h, 5).unwrap();
        let norm = h.norm();
        for (i, e) in s.energies().iter().enumerate() {
            let mut psi = s.state(i).to_vec();
            normalize_euclid(&mut psi);
            let hp = h.apply(&psi);
            let r = hp
                .iter()
                .zip(&psi)
                .map(|(a, b)| (a - e * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-8 * norm);
            // harmonic oscillator −d² + x²: E = 2n + 1
            assert!((e - (2 * i + 1) as f64).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_envelope_diagonal_is_background() {
        let grid = Grid::new(-1.0, 1.0, 9).unwrap();
        let rho = |x: f64| 0.3 * x;
        let h = assemble(&grid, rho, &[]).unwrap();
        let dx = grid.dx();
        for j in 0..grid.len() {
            assert!((h.diagonal()[j] - (2.0 / (dx * dx) + rho(grid.x(j)))).abs() < 1e-12);
        }
        assert!(h.off_diagonal().iter().all(|&e| e == -1.0 / (dx * dx)));
    }

    #[test]
    fn delta_weights_sum_to_strength() {
        let grid = Grid::new(-1.0, 1.0, 19).unwrap();
        let dx = grid.dx();
        let base = assemble(&grid, |_| 0.0, &[]).unwrap();
        for &p in &[0.0, 0.033, -0.71] {
            let h = assemble(
                &grid,
                |_| 0.0,
                &[DeltaTerm {
                    position: p,
                    strength: -2.5,
                }],
            )
            .unwrap();
            let added: f64 = h
                .diagonal()
                .iter()
                .zip(base.diagonal())
                .map(|(a, b)| a - b)
                .sum::<f64>()
                * dx;
            assert!((added + 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_outside_grid_is_rejected() {
        let grid = Grid::new(-1.0, 1.0, 19).unwrap();
        for p in [-1.0, 1.0, 3.0] {
            let err = assemble(
                &grid,
                |_| 0.0,
                &[DeltaTerm {
                    position: p,
                    strength: 1.0,
                }],
            )
            .unwrap_err();
            assert!(matches!(err, Error::DeltaOutsideGrid { .. }));
        }
    }

    #[test]
    fn non_finite_potential_is_rejected() {
        let grid = Grid::new(-1.0, 1.0, 19).unwrap();
        let err = assemble(&grid, |x| 1.0 / x, &[]).unwrap_err();
        assert!(matches!(err, Error::NonFinitePotential { .. }));
    }

    #[test]
    fn bound_state_filter() {
        let s = box_spectrum(100, 3);
        assert!(s.bound_states().is_empty());
    }

    #[test]
    fn invalid_requests() {
        let grid = Grid::new(0.0, 1.0, 5).unwrap();
        let h = assemble(&grid, |_| 0.0, &[]).unwrap();
        assert!(lowest_eigenpairs(&h, 0).is_err());
        assert!(lowest_eigenpairs(&h, 6).is_err());
        assert!(Grid::new(1.0, 0.0, 5).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn grid_resolution_rule() {
        let g = Grid::resolving(-6.0, 6.0, 250.0, 16.0).unwrap();
        assert!(g.dx() <= TWO_PI / (16.0 * 250.0));
        let g = Grid::resolving(-6.0, 6.0, 1.0, 16.0).unwrap();
        assert!(g.dx() <= MAX_DX);
        assert!(Grid::resolving(-6.0, 6.0, 1.0, 8.0).is_err());
        let r = g.refined();
        assert!((r.dx() - g.dx() / 2.0).abs() < 1e-15);
        assert!((r.x(1) - g.x(0)).abs() < 1e-12);
    }
}
