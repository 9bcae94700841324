use crate::error::{KpgmError, Result};
use crate::{lit, to_f64, Real};

/// Uniform radial grid with Dirichlet walls at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub r_min: T,
    pub r_max: T,
    pub count: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(r_min: T, r_max: T, count: usize) -> Result<Self> {
        let g = Self { r_min, r_max, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > T::zero()) {
            return Err(KpgmError::invalid("r_min", format!("r_min must be > 0, got {}", self.r_min)));
        }
        if !(self.r_max > self.r_min) {
            return Err(KpgmError::invalid("r_max", "r_max must exceed r_min"));
        }
        if self.count < 16 {
            return Err(KpgmError::invalid("count", format!("count must be >= 16, got {}", self.count)));
        }
        Ok(())
    }

    pub fn step(&self) -> T {
        (self.r_max - self.r_min) / lit((self.count - 1) as f64)
    }

    /// Halves the spacing while keeping every existing node.
    pub fn refined(&self) -> Self {
        Self {
            count: 2 * self.count - 1,
            ..*self
        }
    }
}

/// Result of a three-level grid-doubling solve.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSpectrum<T> {
    /// h²-extrapolated eigenvalues from the two finest grids.
    pub energies: Vec<T>,
    /// Raw eigenvalues per grid, coarsest first.
    pub raw: [Vec<T>; 3],
    /// Observed convergence order per eigenvalue.
    pub order: Vec<T>,
    /// |finest extrapolation - coarser extrapolation| per eigenvalue.
    pub change: Vec<T>,
    pub grids: [GridSpec<T>; 3],
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`
/// (Sturm count through the LDLᵀ pivots).
fn sturm_count<T: Real>(diag: &[T], off2: &[T], x: T) -> usize {
    let tiny = T::min_positive_value().sqrt();
    let mut count = 0;
    let mut q = T::one();
    for i in 0..diag.len() {
        q = if i == 0 {
            diag[0] - x
        } else {
            diag[i] - x - off2[i - 1] / q
        };
        if q == T::zero() {
            q = -tiny;
        }
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// Lowest `k` eigenvalues of a symmetric tridiagonal matrix by Sturm
/// bisection. `off` has one entry fewer than `diag`.
pub fn tridiagonal_eigenvalues<T: Real>(diag: &[T], off: &[T], k: usize) -> Result<Vec<T>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(KpgmError::domain("tridiagonal_eigenvalues", "inconsistent matrix dimensions"));
    }
    if k > n {
        return Err(KpgmError::domain(
            "tridiagonal_eigenvalues",
            format!("requested {k} eigenvalues of a {n}x{n} matrix"),
        ));
    }
    let off2: Vec<T> = off.iter().map(|&e| e * e).collect();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { T::zero() };
        let right = if i + 1 < n { off[i].abs() } else { T::zero() };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(KpgmError::domain("tridiagonal_eigenvalues", "non-finite matrix entries"));
    }
    let span = (hi - lo).max(T::one());
    let mut out = Vec::with_capacity(k);
    for idx in 0..k {
        let mut a = if idx == 0 { lo - span * T::epsilon() } else { out[idx - 1] - span * T::epsilon() };
        let mut b = hi + span * T::epsilon();
        for _ in 0..200 {
            let mid = lit::<T>(0.5) * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, &off2, mid) > idx {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(lit::<T>(0.5) * (a + b));
    }
    Ok(out)
}

fn solve_on_grid<T: Real, F: Fn(T) -> T>(veff: &F, grid: &GridSpec<T>, mu: T, hbar: T, k: usize) -> Result<Vec<T>> {
    let h = grid.step();
    let kinetic = hbar * hbar / (lit::<T>(2.0) * mu * h * h);
    let interior = grid.count - 2;
    let mut diag = Vec::with_capacity(interior);
    for i in 1..=interior {
        let r = grid.r_min + h * lit(i as f64);
        let v = veff(r);
        if !v.is_finite() {
            return Err(KpgmError::domain("fd_eigensolve", format!("potential not finite at r = {r}")));
        }
        diag.push(kinetic + kinetic + v);
    }
    let off = vec![-kinetic; interior - 1];
    tridiagonal_eigenvalues(&diag, &off, k)
}

/// Lowest `count_states` eigenvalues of `-(ħ²/2μ)ψ'' + V ψ = Eψ` with
/// Dirichlet walls at the grid ends.
///
/// The problem is solved on `grid` and two successive refinements, the two
/// finest are extrapolated in h², and the run fails with
/// [`KpgmError::Convergence`] if that extrapolation moves by more than
/// `tol * max(|E|, 1)` relative to the one from the two coarsest grids.
pub fn fd_eigensolve<T: Real, F: Fn(T) -> T>(
    veff: F,
    grid: GridSpec<T>,
    mu: T,
    hbar: T,
    count_states: usize,
    tol: T,
) -> Result<FdSpectrum<T>> {
    grid.validate()?;
    if !(mu > T::zero()) || !(hbar > T::zero()) {
        return Err(KpgmError::domain("fd_eigensolve", "mu and hbar must be > 0"));
    }
    let grids = [grid, grid.refined(), grid.refined().refined()];
    let e0 = solve_on_grid(&veff, &grids[0], mu, hbar, count_states)?;
    let e1 = solve_on_grid(&veff, &grids[1], mu, hbar, count_states)?;
    let e2 = solve_on_grid(&veff, &grids[2], mu, hbar, count_states)?;
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    let mut energies = Vec::with_capacity(count_states);
    let mut order = Vec::with_capacity(count_states);
    let mut change = Vec::with_capacity(count_states);
    for i in 0..count_states {
        let fine = (four * e2[i] - e1[i]) / three;
        let coarse = (four * e1[i] - e0[i]) / three;
        let d01 = e0[i] - e1[i];
        let d12 = e1[i] - e2[i];
        let p = if d12 != T::zero() { (d01 / d12).abs().log2() } else { T::nan() };
        let delta = (fine - coarse).abs();
        if delta > tol * fine.abs().max(T::one()) {
            return Err(KpgmError::Convergence {
                index: i,
                change: to_f64(delta),
                tol: to_f64(tol),
            });
        }
        energies.push(fine);
        order.push(p);
        change.push(delta);
    }
    Ok(FdSpectrum {
        energies,
        raw: [e0, e1, e2],
        order,
        change,
        grids,
    })
}
