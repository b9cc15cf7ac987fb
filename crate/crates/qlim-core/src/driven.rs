//! Steady states of driven collective decay, reduced states through the
//! highest-weight Clebsch-Gordan map, spin squeezing, and negativity.
//!
//! The density matrix of a driven symmetric N-qubit system stays in the
//! form rho = sum X[na][nb] i^(na-nb) |D_na><D_nb| with X real symmetric,
//! so the dynamics close on the (N+1)(N+2)/2 upper-triangle entries of X.
//! Working in units of the decay rate, the only parameter is the drive
//! ratio Omega. The stationarity equations are linear in X; one redundant
//! equation is swapped for the trace condition and the system solved by
//! dense partial-pivot LU. A direct adaptive Runge-Kutta integration of
//! the same equations of motion is kept alongside as the long-time oracle.
//!
//! The dissipator's diagonal coefficient enters as
//! -(f-(na)^2 + f-(nb)^2)/2: the sign is fixed by trace preservation and
//! positivity of the resulting steady states and is cross-checked against
//! the oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::{binomial, bisect_root, rk45};
use crate::{Error, Result};

/// Trace tolerance on symmetric density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Positivity slack on reconstructed density matrices.
pub const PSD_TOL: f64 = 1e-8;
/// Stationarity residual bound certified by [`steady_state`].
pub const STATIONARITY_TOL: f64 = 1e-9;

/// Real symmetric element array X of a symmetric-sector density matrix
/// with the fixed phase convention i^(na-nb).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricDensityMatrix {
    n: usize,
    /// Row-major (N+1) x (N+1), kept exactly symmetric.
    x: Vec<f64>,
}

impl SymmetricDensityMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            x: vec![0.0; (n + 1) * (n + 1)],
        }
    }

    /// All population in the bottom level (the undriven fixed point).
    pub fn ground(n: usize) -> Self {
        let mut m = Self::zeros(n);
        m.set(0, 0, 1.0);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, na: usize, nb: usize) -> f64 {
        self.x[na * (self.n + 1) + nb]
    }

    /// Sets X[na][nb] and its mirror.
    pub fn set(&mut self, na: usize, nb: usize, v: f64) {
        self.x[na * (self.n + 1) + nb] = v;
        self.x[nb * (self.n + 1) + na] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..=self.n).map(|k| self.get(k, k)).sum()
    }

    /// The (N+1)-dimensional symmetric-sector matrix with phases applied.
    pub fn sector_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.n + 1;
        DMatrix::from_fn(dim, dim, |na, nb| {
            phase(na as i64 - nb as i64) * Complex64::new(self.get(na, nb), 0.0)
        })
    }

    /// Full 2^N computational-basis matrix; the Dicke vectors spread each
    /// sector entry over the bit strings of matching weight.
    pub fn computational_matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.n;
        if n > 12 {
            return Err(Error::OutOfRange {
                what: "qubit count for dense expansion",
                value: n as f64,
                lo: 1.0,
                hi: 12.0,
            });
        }
        let dim = 1usize << n;
        let mut vectors: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for idx in 0..dim {
            vectors[(idx as u32).count_ones() as usize].push(idx);
        }
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for na in 0..=n {
            let amp_a = 1.0 / binomial(n, na).sqrt();
            for nb in 0..=n {
                let w = phase(na as i64 - nb as i64)
                    * Complex64::new(self.get(na, nb) * amp_a / binomial(n, nb).sqrt(), 0.0);
                if w.norm() == 0.0 {
                    continue;
                }
                for &i in &vectors[na] {
                    for &j in &vectors[nb] {
                        rho[(i, j)] += w;
                    }
                }
            }
        }
        Ok(rho)
    }

    /// Trace one, and the reconstructed matrix positive semidefinite
    /// within [`PSD_TOL`].
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Invalid(format!("trace = {tr}")));
        }
        let eig = self.sector_matrix().symmetric_eigen();
        let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        if min < -PSD_TOL {
            return Err(Error::Invalid(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }
}

fn phase(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Qubit count and drive-to-decay ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub n: usize,
    /// Omega = omega / Gamma.
    pub omega: f64,
}

impl DriveSpec {
    pub fn new(n: usize, omega: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange {
                what: "qubit count N",
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        if !omega.is_finite() {
            return Err(Error::Invalid("drive ratio must be finite".into()));
        }
        Ok(Self { n, omega })
    }
}

/// Ladder factors on the symmetric sector: raising f+(n) = sqrt((n+1)(N-n))
/// and lowering f-(n) = sqrt(n(N-n+1)); both vanish at their boundary.
pub fn ladder_factors(n_exc: usize, n: usize) -> (f64, f64) {
    let f_plus = if n_exc >= n {
        0.0
    } else {
        (((n_exc + 1) * (n - n_exc)) as f64).sqrt()
    };
    let f_minus = if n_exc == 0 {
        0.0
    } else {
        ((n_exc * (n - n_exc + 1)) as f64).sqrt()
    };
    (f_plus, f_minus)
}

/// Equations of motion for the element array in units of the decay rate:
/// drive terms with strength Omega/2 plus the cascade dissipator with the
/// corrected-sign diagonal.
pub fn x_dot(spec: &DriveSpec, x: &SymmetricDensityMatrix) -> SymmetricDensityMatrix {
    let n = spec.n;
    let half_drive = 0.5 * spec.omega;
    let mut out = SymmetricDensityMatrix::zeros(n);
    let get = |na: isize, nb: isize| -> f64 {
        if na < 0 || nb < 0 || na > n as isize || nb > n as isize {
            0.0
        } else {
            x.get(na as usize, nb as usize)
        }
    };
    for na in 0..=n {
        for nb in na..=n {
            let (fpa, fma) = ladder_factors(na, n);
            let (fpb, fmb) = ladder_factors(nb, n);
            let a = na as isize;
            let b = nb as isize;
            let mut v = half_drive
                * (fpa * get(a + 1, b) + fpb * get(a, b + 1)
                    - fma * get(a - 1, b)
                    - fmb * get(a, b - 1));
            v += fpa * fpb * get(a + 1, b + 1) - 0.5 * (fma * fma + fmb * fmb) * x.get(na, nb);
            out.set(na, nb, v);
        }
    }
    out
}

fn packed_len(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Steady state of the driven system for N <= 80: the stationarity
/// equations over the packed upper triangle, with the redundant (0,0)
/// equation replaced by the trace condition, solved by partial-pivot LU.
/// The full stationarity residual of the solution is certified below
/// [`STATIONARITY_TOL`].
pub fn steady_state(spec: &DriveSpec) -> Result<SymmetricDensityMatrix> {
    let n = spec.n;
    if n > 80 {
        return Err(Error::OutOfRange {
            what: "qubit count N",
            value: n as f64,
            lo: 1.0,
            hi: 80.0,
        });
    }
    let m = packed_len(n);
    let pairs: Vec<(usize, usize)> = (0..=n)
        .flat_map(|na| (na..=n).map(move |nb| (na, nb)))
        .collect();

    // Column j of the system matrix is the time derivative generated by
    // the j-th symmetric unit element; guarantees the solver and the
    // integration oracle share one set of equations.
    let mut a = DMatrix::<f64>::zeros(m, m);
    for (j, &(na, nb)) in pairs.iter().enumerate() {
        let mut unit = SymmetricDensityMatrix::zeros(n);
        unit.set(na, nb, 1.0);
        let dot = x_dot(spec, &unit);
        for (i, &(ra, rb)) in pairs.iter().enumerate() {
            a[(i, j)] = dot.get(ra, rb);
        }
    }
    // Trace row in place of the stationarity equation at (0,0).
    for (j, &(na, nb)) in pairs.iter().enumerate() {
        a[(0, j)] = if na == nb { 1.0 } else { 0.0 };
    }
    let mut rhs = DMatrix::<f64>::zeros(m, 1);
    rhs[(0, 0)] = 1.0;

    let solution = a.lu().solve(&rhs).ok_or(Error::SingularSystem { n })?;

    let mut x = SymmetricDensityMatrix::zeros(n);
    for (j, &(na, nb)) in pairs.iter().enumerate() {
        x.set(na, nb, solution[(j, 0)]);
    }
    let residual = x_dot(spec, &x);
    let worst = (0..=n)
        .flat_map(|na| (0..=n).map(move |nb| (na, nb)))
        .map(|(na, nb)| residual.get(na, nb).abs())
        .fold(0.0, f64::max);
    if worst > STATIONARITY_TOL || (x.trace() - 1.0).abs() > TRACE_TOL {
        return Err(Error::SingularSystem { n });
    }
    Ok(x)
}

/// Integrate the equations of motion from the ground state to time
/// `t_final` (units of 1/Gamma) with adaptive Runge-Kutta; the long-time
/// validation oracle for [`steady_state`]. N <= 10.
pub fn lindblad_oracle(spec: &DriveSpec, t_final: f64) -> Result<SymmetricDensityMatrix> {
    let n = spec.n;
    if n > 10 {
        return Err(Error::OutOfRange {
            what: "qubit count N",
            value: n as f64,
            lo: 1.0,
            hi: 10.0,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..=n)
        .flat_map(|na| (na..=n).map(move |nb| (na, nb)))
        .collect();
    let unpack = |y: &[f64]| -> SymmetricDensityMatrix {
        let mut x = SymmetricDensityMatrix::zeros(n);
        for (j, &(na, nb)) in pairs.iter().enumerate() {
            x.set(na, nb, y[j]);
        }
        x
    };
    let mut y0 = vec![0.0; packed_len(n)];
    y0[0] = 1.0; // ground state, (0,0) is the first packed pair
    let y = rk45(
        |_, y| {
            let dot = x_dot(spec, &unpack(y));
            pairs.iter().map(|&(na, nb)| dot.get(na, nb)).collect()
        },
        &y0,
        0.0,
        t_final,
        1e-10,
        1e-12,
    );
    Ok(unpack(&y))
}

/// Highest-weight Clebsch-Gordan coefficient splitting N qubits into d and
/// N-d: sqrt( B(d,n1) B(N-d,n2) / B(N,n1+n2) ).
pub fn cg_coefficient(n: usize, d: usize, n_prime: usize, n_double: usize) -> f64 {
    (binomial(d, n_prime) * binomial(n - d, n_double) / binomial(n, n_prime + n_double)).sqrt()
}

/// Reduced state of d < N qubits: the linear Clebsch-Gordan contraction
/// X(d)[a][b] = sum_k CG(a,k) CG(b,k) X(N)[a+k][b+k]; the phase convention
/// carries over unchanged.
pub fn reduced_state(rho: &SymmetricDensityMatrix, d: usize) -> Result<SymmetricDensityMatrix> {
    let n = rho.n();
    if d == 0 || d >= n {
        return Err(Error::OutOfRange {
            what: "reduced size d",
            value: d as f64,
            lo: 1.0,
            hi: (n - 1) as f64,
        });
    }
    let mut out = SymmetricDensityMatrix::zeros(d);
    for a in 0..=d {
        for b in a..=d {
            let mut acc = 0.0;
            for k in 0..=(n - d) {
                acc +=
                    cg_coefficient(n, d, a, k) * cg_coefficient(n, d, b, k) * rho.get(a + k, b + k);
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// <sigma_x sigma_x> on a two-qubit symmetric state in element form.
pub fn sigma_xx_expectation(rho2: &SymmetricDensityMatrix) -> f64 {
    debug_assert_eq!(rho2.n(), 2);
    rho2.get(1, 1) - 2.0 * rho2.get(0, 2)
}

/// Spin-squeezing parameter from the closed form over the diagonal and
/// second off-diagonal of the element array:
/// 1 + (2/N) sum_{q,s} (-1)^s sqrt(q(q+s)(N-q)(N-q+s)) X[q-s][q+s].
pub fn spin_squeezing(rho: &SymmetricDensityMatrix) -> Result<f64> {
    let n = rho.n();
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "qubit count N",
            value: n as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let mut acc = 0.0;
    for q in 1..n {
        for s in 0..=1usize {
            let sign = if s == 0 { 1.0 } else { -1.0 };
            let w = ((q * (q + s) * (n - q) * (n - q + s)) as f64).sqrt();
            acc += sign * w * rho.get(q - s, q + s);
        }
    }
    Ok(1.0 + 2.0 * acc / n as f64)
}

/// Collective operators scaled per particle: jbar = (2/N) J on the
/// symmetric sector.
fn collective_ops(n: usize) -> [DMatrix<Complex64>; 3] {
    let dim = n + 1;
    let mut a_plus = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..n {
        let (fp, _) = ladder_factors(k, n);
        a_plus[(k + 1, k)] = Complex64::new(fp, 0.0);
    }
    let a_minus = a_plus.adjoint();
    let scale = Complex64::new(1.0 / n as f64, 0.0);
    let jx = (&a_plus + &a_minus) * scale;
    let jy = (&a_plus - &a_minus) * Complex64::new(0.0, -1.0 / n as f64);
    let jz = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new((2.0 * r as f64 - n as f64) / n as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    [jx, jy, jz]
}

fn expectation(op: &DMatrix<Complex64>, rho: &DMatrix<Complex64>) -> f64 {
    (op * rho).trace().re
}

/// Spin-squeezing parameter from the collective-operator definition: the
/// minimized transverse variance about the mean spin direction. Errors
/// when the mean spin is too small to fix a direction.
pub fn general_spin_squeezing(rho: &SymmetricDensityMatrix) -> Result<f64> {
    let n = rho.n();
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "qubit count N",
            value: n as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let sector = rho.sector_matrix();
    let [jx, jy, jz] = collective_ops(n);
    let mx = expectation(&jx, &sector);
    let my = expectation(&jy, &sector);
    let mz = expectation(&jz, &sector);
    let r = (mx * mx + my * my + mz * mz).sqrt();
    if r < 1e-12 {
        return Err(Error::ZeroMeanSpin(r));
    }
    let theta = (mz / r).acos();
    let phi = my.atan2(mx);

    let j1 = &jy * Complex64::new(phi.cos(), 0.0) - &jx * Complex64::new(phi.sin(), 0.0);
    let j2 = &jx * Complex64::new(theta.cos() * phi.cos(), 0.0)
        + &jy * Complex64::new(theta.cos() * phi.sin(), 0.0)
        - &jz * Complex64::new(theta.sin(), 0.0);

    let j1j1 = expectation(&(&j1 * &j1), &sector);
    let j2j2 = expectation(&(&j2 * &j2), &sector);
    let cross = expectation(&(&j1 * &j2 + &j2 * &j1), &sector);
    let value = (j1j1 + j2j2) - ((j1j1 - j2j2).powi(2) + cross * cross).sqrt();
    Ok(value * n as f64 / 2.0)
}

/// Negativity of a multi-qubit density matrix in the computational basis:
/// transpose the first `cut` qubits, eigensolve, and sum the negative
/// part as (sum |lambda| - 1)/2.
pub fn negativity(rho: &DMatrix<Complex64>, cut: usize) -> Result<f64> {
    let dim = rho.nrows();
    if rho.ncols() != dim || !dim.is_power_of_two() || dim > (1 << 10) {
        return Err(Error::Invalid(format!(
            "density matrix dimension {dim} not a power of two within 2^10"
        )));
    }
    let qubits = dim.trailing_zeros() as usize;
    if cut == 0 || cut >= qubits {
        return Err(Error::OutOfRange {
            what: "bipartition size",
            value: cut as f64,
            lo: 1.0,
            hi: (qubits - 1) as f64,
        });
    }
    let tail = 1usize << (qubits - cut);
    let pt = DMatrix::from_fn(dim, dim, |r, c| {
        let (ra, rb) = (r / tail, r % tail);
        let (ca, cb) = (c / tail, c % tail);
        rho[(ca * tail + rb, ra * tail + cb)]
    });
    let eig = pt.symmetric_eigen();
    let abs_sum: f64 = eig.eigenvalues.iter().map(|v| v.abs()).sum();
    Ok((abs_sum - 1.0) / 2.0)
}

/// One row of a drive sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: f64,
    pub xi2: f64,
    pub negativity: f64,
    pub converged: bool,
}

/// Sweep results with the squeezing window edge and the best squeezing
/// point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaSweep {
    pub n: usize,
    pub rows: Vec<SweepRow>,
    /// Largest drive ratio with xi^2 < 1, refined by bisection between the
    /// bracketing grid points.
    pub window_upper_edge: Option<f64>,
    /// (omega, xi^2) of the deepest squeezing on the grid.
    pub best: Option<(f64, f64)>,
}

/// Default sweep grid: 48 log-spaced Omega/N values in [1e-2, 1e2].
pub fn default_omega_grid(n: usize) -> Vec<f64> {
    crate::radiance::log_spaced(1e-2 * n as f64, 1e2 * n as f64, 48)
}

/// Steady state plus squeezing/negativity diagnostics per drive ratio.
/// Per-point failures are flagged, not fatal.
pub fn omega_sweep(n: usize, omega_grid: &[f64]) -> Result<OmegaSweep> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "qubit count N",
            value: n as f64,
            lo: 2.0,
            hi: 80.0,
        });
    }
    let rows: Vec<SweepRow> = omega_grid
        .par_iter()
        .map(|&omega| {
            let diag = (|| -> Result<(f64, f64)> {
                let spec = DriveSpec::new(n, omega)?;
                let steady = steady_state(&spec)?;
                let xi2 = spin_squeezing(&steady)?;
                let rho2 = reduced_state(&steady, 2)?;
                let neg = negativity(&rho2.computational_matrix()?, 1)?;
                Ok((xi2, neg))
            })();
            match diag {
                Ok((xi2, neg)) => SweepRow {
                    omega,
                    xi2,
                    negativity: neg,
                    converged: true,
                },
                Err(_) => SweepRow {
                    omega,
                    xi2: f64::NAN,
                    negativity: f64::NAN,
                    converged: false,
                },
            }
        })
        .collect();

    // Window edge: last crossing of xi^2 = 1 along the grid, bisected.
    let mut edge = None;
    for w in rows.windows(2).rev() {
        let (a, b) = (w[0], w[1]);
        if a.converged && b.converged && a.xi2 < 1.0 && b.xi2 >= 1.0 {
            let f = |omega: f64| -> f64 {
                DriveSpec::new(n, omega)
                    .and_then(|spec| steady_state(&spec))
                    .and_then(|s| spin_squeezing(&s))
                    .map(|x| x - 1.0)
                    .unwrap_or(f64::NAN)
            };
            edge = Some(bisect_root(f, a.omega, b.omega, 1e-6 * n as f64));
            break;
        }
    }
    let best = rows
        .iter()
        .filter(|r| r.converged && r.xi2.is_finite())
        .min_by(|a, b| a.xi2.total_cmp(&b.xi2))
        .map(|r| (r.omega, r.xi2));
    Ok(OmegaSweep {
        n,
        rows,
        window_upper_edge: edge,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_boundaries() {
        assert_eq!(ladder_factors(0, 4).1, 0.0);
        assert_eq!(ladder_factors(4, 4).0, 0.0);
        let (fp, fm) = ladder_factors(1, 4);
        assert!((fp - 6.0_f64.sqrt()).abs() < 1e-15);
        assert!((fm - 2.0).abs() < 1e-15);
    }

    #[test]
    fn undriven_steady_state_is_ground() {
        let spec = DriveSpec::new(5, 0.0).unwrap();
        let x = steady_state(&spec).unwrap();
        assert!((x.get(0, 0) - 1.0).abs() < 1e-12);
        for na in 0..=5 {
            for nb in 0..=5 {
                if (na, nb) != (0, 0) {
                    assert!(x.get(na, nb).abs() < 1e-12);
                }
            }
        }
        x.validate().unwrap();
    }

    #[test]
    fn steady_state_matches_long_time_integration() {
        for &(n, omega) in &[(2usize, 1.0), (4, 1.0), (3, 0.5)] {
            let spec = DriveSpec::new(n, omega).unwrap();
            let direct = steady_state(&spec).unwrap();
            let integrated = lindblad_oracle(&spec, 50.0).unwrap();
            for na in 0..=n {
                for nb in 0..=n {
                    assert!(
                        (direct.get(na, nb) - integrated.get(na, nb)).abs() < 1e-6,
                        "N={n} Omega={omega} ({na},{nb})"
                    );
                }
            }
        }
    }

    #[test]
    fn oracle_preserves_trace_and_ground_fixed_point() {
        let spec = DriveSpec::new(3, 0.0).unwrap();
        let x = lindblad_oracle(&spec, 10.0).unwrap();
        assert!((x.get(0, 0) - 1.0).abs() < 1e-9);

        let spec = DriveSpec::new(4, 2.0).unwrap();
        for &t in &[0.5, 5.0, 50.0] {
            let x = lindblad_oracle(&spec, t).unwrap();
            assert!((x.trace() - 1.0).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn steady_states_are_positive() {
        for &omega in &[0.1, 1.0, 10.0] {
            for n in [2usize, 5, 10, 20, 40] {
                let x = steady_state(&DriveSpec::new(n, omega).unwrap()).unwrap();
                x.validate().unwrap();
            }
        }
    }

    #[test]
    fn cg_values() {
        assert!((cg_coefficient(2, 1, 1, 0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cg_coefficient(6, 2, 0, 0), 1.0);
    }

    #[test]
    fn reduction_examples() {
        // Ground state reduces to the smaller ground state.
        let g = SymmetricDensityMatrix::ground(5);
        for d in 1..5 {
            let r = reduced_state(&g, d).unwrap();
            assert!((r.get(0, 0) - 1.0).abs() < 1e-14);
            assert!((r.trace() - 1.0).abs() < 1e-14);
        }
        assert!(reduced_state(&g, 0).is_err());
        assert!(reduced_state(&g, 5).is_err());
    }

    #[test]
    fn reduction_preserves_trace_for_random_elements() {
        // The contraction is linear, so trace preservation holds for any
        // symmetric element array, density matrix or not; normalize the
        // diagonal to make the check read as traces.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(44);
        for _ in 0..100 {
            let n = rng.random_range(3..=7);
            let mut x = SymmetricDensityMatrix::zeros(n);
            for na in 0..=n {
                for nb in na..=n {
                    x.set(na, nb, rng.random_range(-1.0..1.0));
                }
            }
            let tr = x.trace();
            if tr.abs() < 1e-3 {
                continue;
            }
            for na in 0..=n {
                for nb in na..=n {
                    let v = x.get(na, nb) / tr;
                    x.set(na, nb, v);
                }
            }
            for d in 1..n {
                let r = reduced_state(&x, d).unwrap();
                assert!((r.trace() - 1.0).abs() < 1e-10, "N={n} d={d}");
            }
        }
    }

    #[test]
    fn reduction_matches_partial_trace_oracle() {
        // Brute-force partial trace in the computational basis.
        for &(n, omega) in &[(4usize, 1.0), (5, 2.0), (6, 0.7)] {
            let steady = steady_state(&DriveSpec::new(n, omega).unwrap()).unwrap();
            let full = steady.computational_matrix().unwrap();
            for d in [1usize, 2, 3] {
                if d >= n {
                    continue;
                }
                let reduced = reduced_state(&steady, d).unwrap();
                let tail = 1usize << (n - d);
                let dim_d = 1usize << d;
                let mut traced = DMatrix::<Complex64>::zeros(dim_d, dim_d);
                for ia in 0..dim_d {
                    for ja in 0..dim_d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..tail {
                            acc += full[(ia * tail + k, ja * tail + k)];
                        }
                        traced[(ia, ja)] = acc;
                    }
                }
                let from_map = reduced.computational_matrix().unwrap();
                for i in 0..dim_d {
                    for j in 0..dim_d {
                        assert!(
                            (traced[(i, j)] - from_map[(i, j)]).norm() < 1e-10,
                            "N={n} d={d} ({i},{j})"
                        );
                    }
                }
                assert!((reduced.trace() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn squeezing_of_ground_state_is_one() {
        let g = SymmetricDensityMatrix::ground(6);
        assert!((spin_squeezing(&g).unwrap() - 1.0).abs() < 1e-14);
        assert!((general_spin_squeezing(&g).unwrap() - 1.0).abs() < 1e-12);
        assert!(spin_squeezing(&SymmetricDensityMatrix::ground(1)).is_err());
    }

    #[test]
    fn closed_form_squeezing_matches_general_definition() {
        for &(n, omega) in &[(2usize, 0.5), (4, 0.5), (4, 1.0), (6, 2.0), (8, 3.0)] {
            let steady = steady_state(&DriveSpec::new(n, omega).unwrap()).unwrap();
            let closed = spin_squeezing(&steady).unwrap();
            let general = general_spin_squeezing(&steady).unwrap();
            assert!(
                (closed - general).abs() < 1e-8,
                "N={n} Omega={omega}: {closed} vs {general}"
            );
        }
    }

    #[test]
    fn small_drive_squeezes() {
        let steady = steady_state(&DriveSpec::new(4, 0.5).unwrap()).unwrap();
        let xi2 = spin_squeezing(&steady).unwrap();
        assert!(xi2 < 1.0, "got {xi2}");

        // Strong drive: mixed beyond the standard quantum limit.
        let hot = steady_state(&DriveSpec::new(4, 100.0).unwrap()).unwrap();
        assert!(spin_squeezing(&hot).unwrap() > 1.0);
    }

    #[test]
    fn fully_mixed_sector_state_has_no_direction() {
        let n = 4;
        let mut x = SymmetricDensityMatrix::zeros(n);
        for k in 0..=n {
            x.set(k, k, 1.0 / (n + 1) as f64);
        }
        assert!(matches!(
            general_spin_squeezing(&x),
            Err(Error::ZeroMeanSpin(_))
        ));
    }

    #[test]
    fn negativity_of_bell_and_product_states() {
        // (|00> + |11>)/sqrt(2).
        let mut rho = DMatrix::<Complex64>::zeros(4, 4);
        for &(i, j) in &[(0usize, 0usize), (0, 3), (3, 0), (3, 3)] {
            rho[(i, j)] = Complex64::new(0.5, 0.0);
        }
        assert!((negativity(&rho, 1).unwrap() - 0.5).abs() < 1e-12);

        let g = SymmetricDensityMatrix::ground(2)
            .computational_matrix()
            .unwrap();
        assert!(negativity(&g, 1).unwrap().abs() < 1e-12);

        assert!(negativity(&rho, 2).is_err());
        let bad = DMatrix::<Complex64>::zeros(3, 3);
        assert!(negativity(&bad, 1).is_err());
    }

    #[test]
    fn squeezing_ties_to_reduced_negativity() {
        for &(n, omega) in &[(3usize, 0.6), (4, 1.0), (6, 1.5)] {
            let steady = steady_state(&DriveSpec::new(n, omega).unwrap()).unwrap();
            let xi2 = spin_squeezing(&steady).unwrap();
            let rho2 = reduced_state(&steady, 2).unwrap();
            let sxx = sigma_xx_expectation(&rho2);
            // Closed form against the two-particle correlator.
            assert!((xi2 - (1.0 + (n as f64 - 1.0) * sxx)).abs() < 1e-8);
            if xi2 < 1.0 {
                let neg = negativity(&rho2.computational_matrix().unwrap(), 1).unwrap();
                assert!(
                    (xi2 - (1.0 - 2.0 * (n as f64 - 1.0) * neg)).abs() < 1e-8,
                    "N={n} Omega={omega}"
                );
                assert!(sxx < 0.0);
            }
        }
    }

    #[test]
    fn sweep_reports_window() {
        let sweep = omega_sweep(4, &default_omega_grid(4)).unwrap();
        assert!(sweep.rows.iter().all(|r| r.converged));
        let edge = sweep.window_upper_edge.expect("squeezing window exists");
        assert!(edge > 0.0 && edge < 4.0 * 100.0);
        let (_, best_xi2) = sweep.best.unwrap();
        assert!(best_xi2 < 1.0);
        // Omega ~ 0 row sits at the standard quantum limit.
        let first = steady_state(&DriveSpec::new(4, 1e-6).unwrap()).unwrap();
        assert!((spin_squeezing(&first).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn deeper_minima_with_larger_n() {
        let grid: Vec<f64> = (1..=30).map(|i| 0.05 * i as f64).collect();
        let mut minima = Vec::new();
        for n in [4usize, 8, 16] {
            let grid_n: Vec<f64> = grid.iter().map(|v| v * n as f64).collect();
            let sweep = omega_sweep(n, &grid_n).unwrap();
            minima.push(sweep.best.unwrap().1);
        }
        assert!(minima[1] < minima[0]);
        assert!(minima[2] < minima[1]);
    }
}
