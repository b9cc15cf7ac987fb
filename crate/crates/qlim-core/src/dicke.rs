//! Dicke-basis diagonal states: separability fitting against the explicit
//! separable mixture form, partial-transpose determinant conditions, the
//! change-of-variable Jacobian, and state-space volumes.
//!
//! A state diagonal in the Dicke basis is a population vector chi_0..chi_N
//! over excitation number. The separable reference family is the binomial
//! mixture rho[y] with populations binom(N,n1) y^n0 (1-y)^n1; a state is
//! certified separable when it fits a convex combination of at most
//! ceil((N+1)/2) such terms, with the last amplitude pinned to zero for
//! even N so variable and equation counts match.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::{binomial, derive_seed};
use crate::{Error, Result};

/// Normalization tolerance on population vectors.
pub const NORM_TOL: f64 = 1e-10;
/// Population nonnegativity slack.
pub const POP_TOL: f64 = 1e-12;
/// Max-abs population residual below which a fit counts as exact.
pub const FIT_RESIDUAL_TOL: f64 = 1e-8;
/// Range slack on fitted weights and amplitudes.
pub const FIT_RANGE_TOL: f64 = 1e-9;

/// Number of weight slots in the separable decomposition.
pub fn jx_max(n: usize) -> usize {
    (n + 1).div_ceil(2)
}

/// Number of free amplitude slots; one less than the weights for even N,
/// where the last amplitude is pinned to zero.
pub fn jy_max(n: usize) -> usize {
    n.div_ceil(2)
}

/// An N-qubit state diagonal in the Dicke basis, indexed by excitation
/// number n1 (so n0 = N - n1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DickeDiagonalState {
    #[serde(rename = "N")]
    pub n: usize,
    pub chi: Vec<f64>,
}

impl DickeDiagonalState {
    pub fn new(n: usize, chi: Vec<f64>) -> Result<Self> {
        let s = Self { n, chi };
        s.validate()?;
        Ok(s)
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            n,
            chi: vec![1.0 / (n + 1) as f64; n + 1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.chi.len() != self.n + 1 {
            return Err(Error::Invalid(format!(
                "population vector length {} for N = {}",
                self.chi.len(),
                self.n
            )));
        }
        let mut sum = 0.0;
        for &p in &self.chi {
            if p < -POP_TOL {
                return Err(Error::OutOfRange {
                    what: "population",
                    value: p,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::Invalid(format!("populations sum to {sum}")));
        }
        Ok(())
    }
}

/// Populations of the separable reference state at amplitude y:
/// chi_n1 = binom(N, n1) y^n0 (1-y)^n1.
pub fn sds_populations(y: f64, n: usize) -> Result<DickeDiagonalState> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::OutOfRange {
            what: "amplitude y",
            value: y,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let chi = (0..=n)
        .map(|n1| {
            let n0 = n - n1;
            binomial(n, n1) * y.powi(n0 as i32) * (1.0 - y).powi(n1 as i32)
        })
        .collect();
    DickeDiagonalState::new(n, chi)
}

/// Populations reconstructed from decomposition nodes (weight, amplitude).
fn chi_hat(n: usize, nodes: &[(f64, f64)]) -> Vec<f64> {
    (0..=n)
        .map(|n1| {
            let n0 = (n - n1) as i32;
            binomial(n, n1)
                * nodes
                    .iter()
                    .map(|&(x, y)| x * y.powi(n0) * (1.0 - y).powi(n1 as i32))
                    .sum::<f64>()
        })
        .collect()
}

fn max_abs_residual(chi: &[f64], hat: &[f64]) -> f64 {
    chi.iter()
        .zip(hat)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// A fitted separable decomposition: weight/amplitude nodes with
/// amplitudes sorted nonincreasing. For even N the final node is the
/// pinned y = 0 slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdsDecomposition {
    pub n: usize,
    /// (x_j, y_j), length jx_max(n).
    pub nodes: Vec<(f64, f64)>,
    /// Max-abs population residual of the reconstruction.
    pub residual: f64,
}

impl SdsDecomposition {
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|&(x, _)| x)
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|&(_, y)| y)
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        chi_hat(self.n, &self.nodes)
    }
}

/// Which acceptance constraint a failed fit violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FailedConstraint {
    /// Best residual stayed above [`FIT_RESIDUAL_TOL`].
    Residual,
    /// A weight left [0, 1] beyond [`FIT_RANGE_TOL`]; carries the offender.
    WeightRange(f64),
    /// An amplitude left [0, 1] beyond [`FIT_RANGE_TOL`].
    AmplitudeRange(f64),
}

/// Certificate returned when no acceptable decomposition was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Infeasibility {
    pub best_residual: f64,
    pub failed: FailedConstraint,
}

/// Outcome of a separability fit.
#[derive(Debug, Clone, PartialEq)]
pub enum SdsFit {
    Separable(SdsDecomposition),
    Infeasible(Infeasibility),
}

impl SdsFit {
    pub fn is_separable(&self) -> bool {
        matches!(self, SdsFit::Separable(_))
    }

    pub fn residual(&self) -> f64 {
        match self {
            SdsFit::Separable(d) => d.residual,
            SdsFit::Infeasible(c) => c.best_residual,
        }
    }
}

/// Fixed seed for the least-squares fallback multistarts; the fit has no
/// seed parameter and must be reproducible.
const FALLBACK_SEED: u64 = 0x5d5_f17;

/// Fit a diagonal state against the separable mixture form.
///
/// The populations are first divided by their binomials, turning the fit
/// into a power-moment problem in t = (1-y)/y. Nodes come out of the
/// shifted Hankel pencil (generalized eigenvalues of H1 v = t H0 v),
/// weights from the square Vandermonde system on the leading moments; for
/// even N the pinned y = 0 node absorbs what remains of chi_N. Rank is
/// walked downward when the pencil degenerates or a node weight collapses,
/// and a bounded nonlinear least-squares multistart takes over when the
/// pencil path fails outright.
///
/// A decomposition is accepted iff the max-abs population residual is
/// below [`FIT_RESIDUAL_TOL`] and every weight and amplitude lies in
/// [0, 1] within [`FIT_RANGE_TOL`]; otherwise the certificate reports the
/// best residual and the violated constraint.
pub fn sds_fit(s: &DickeDiagonalState) -> Result<SdsFit> {
    s.validate()?;
    let n = s.n;
    let pinned = n.is_multiple_of(2);
    let moments: Vec<f64> = (0..=n).map(|k| s.chi[k] / binomial(n, k)).collect();

    let mut best_candidate: Option<SdsDecomposition> = None;
    let mut best_residual = f64::INFINITY;

    for r in (0..=jy_max(n)).rev() {
        let Some(nodes) = prony_nodes(&moments, n, r, pinned) else {
            continue;
        };
        let mut decomposition = finish_decomposition(s, nodes);
        // Conditioning of the Vandermonde solve can leave a near-miss;
        // a short damped Gauss-Newton pass cleans it up.
        let sane = decomposition
            .nodes
            .iter()
            .all(|&(x, y)| x.abs() <= 2.0 && (-0.5..=1.5).contains(&y));
        if decomposition.residual > 1e-12 && sane {
            let polished = gauss_newton_polish(s, &decomposition.nodes, jy_max(n));
            let jx = jx_max(n);
            let nodes: Vec<(f64, f64)> = (0..jx)
                .map(|j| {
                    let y = if j < jy_max(n) { polished[jx + j] } else { 0.0 };
                    (polished[j], y)
                })
                .collect();
            let redone = finish_decomposition(s, nodes);
            if redone.residual < decomposition.residual {
                decomposition = redone;
            }
        }
        best_residual = best_residual.min(decomposition.residual);
        if let Some(acc) = accept(&decomposition) {
            let tiny_weight = acc.nodes.iter().take(r).any(|&(x, _)| x < FIT_RANGE_TOL);
            if tiny_weight && r > 0 {
                // A collapsed node: remember this fit but retry leaner.
                if best_candidate.is_none() {
                    best_candidate = Some(acc);
                }
                continue;
            }
            return Ok(SdsFit::Separable(acc));
        }
    }
    if let Some(c) = best_candidate {
        return Ok(SdsFit::Separable(c));
    }

    // Pencil path failed; bounded least squares with multistarts.
    let ls = least_squares_fit(s);
    best_residual = best_residual.min(ls.residual);
    if let Some(acc) = accept(&ls) {
        return Ok(SdsFit::Separable(acc));
    }
    Ok(SdsFit::Infeasible(Infeasibility {
        best_residual,
        failed: diagnose(&ls),
    }))
}

/// Check acceptance; returns the decomposition with nodes sorted by
/// amplitude (descending) when it qualifies.
fn accept(d: &SdsDecomposition) -> Option<SdsDecomposition> {
    if d.residual >= FIT_RESIDUAL_TOL {
        return None;
    }
    let in_range = |v: f64| (-FIT_RANGE_TOL..=1.0 + FIT_RANGE_TOL).contains(&v);
    if !d.nodes.iter().all(|&(x, y)| in_range(x) && in_range(y)) {
        return None;
    }
    let mut nodes = d.nodes.clone();
    nodes.sort_by(|a, b| b.1.total_cmp(&a.1));
    Some(SdsDecomposition {
        n: d.n,
        nodes,
        residual: d.residual,
    })
}

fn diagnose(d: &SdsDecomposition) -> FailedConstraint {
    let in_range = |v: f64| (-FIT_RANGE_TOL..=1.0 + FIT_RANGE_TOL).contains(&v);
    if d.residual < FIT_RESIDUAL_TOL {
        for &(x, y) in &d.nodes {
            if !in_range(x) {
                return FailedConstraint::WeightRange(x);
            }
            if !in_range(y) {
                return FailedConstraint::AmplitudeRange(y);
            }
        }
    }
    FailedConstraint::Residual
}

/// Recover `r` free nodes from the moment sequence; `None` when the pencil
/// degenerates or produces nodes outside the admissible cone.
fn prony_nodes(moments: &[f64], n: usize, r: usize, pinned: bool) -> Option<Vec<(f64, f64)>> {
    let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(jx_max(n));
    if r > 0 {
        if 2 * r - 1 > n {
            return None;
        }
        let h0 = DMatrix::from_fn(r, r, |i, j| moments[i + j]);
        let h1 = DMatrix::from_fn(r, r, |i, j| moments[i + j + 1]);
        let lu = h0.clone().lu();
        let x = lu.solve(&h1)?;
        let eigs = x.complex_eigenvalues();
        let mut ts = Vec::with_capacity(r);
        for t in eigs.iter() {
            if t.im.abs() > 1e-7 * (1.0 + t.re.abs()) {
                return None;
            }
            let tr = t.re.max(0.0);
            if t.re < -1e-6 || tr > 1e12 {
                return None;
            }
            ts.push(tr);
        }
        // Weights from the square Vandermonde system on m_0..m_{r-1}.
        let v = DMatrix::from_fn(r, r, |k, j| ts[j].powi(k as i32));
        let rhs = DMatrix::from_fn(r, 1, |k, _| moments[k]);
        let w = v.lu().solve(&rhs)?;
        for (j, &t) in ts.iter().enumerate() {
            let y = 1.0 / (1.0 + t);
            let x_j = w[(j, 0)] * (1.0 + t).powi(n as i32);
            if !x_j.is_finite() {
                return None;
            }
            nodes.push((x_j, y));
        }
    }
    if pinned {
        // The y = 0 slot only feeds chi_N; match the leftover moment.
        let covered: f64 = nodes
            .iter()
            .map(|&(x, y)| x * (1.0 - y).powi(n as i32))
            .sum();
        let mut x_pin = moments[n] - covered;
        if x_pin.abs() < FIT_RANGE_TOL {
            x_pin = x_pin.max(0.0);
        }
        nodes.push((x_pin, 0.0));
    }
    // Pad dropped slots so the decomposition keeps its declared shape.
    while nodes.len() < jx_max(n) {
        nodes.push((0.0, 0.0));
    }
    Some(nodes)
}

fn finish_decomposition(s: &DickeDiagonalState, nodes: Vec<(f64, f64)>) -> SdsDecomposition {
    let hat = chi_hat(s.n, &nodes);
    SdsDecomposition {
        n: s.n,
        residual: max_abs_residual(&s.chi, &hat),
        nodes,
    }
}

/// Bounded least squares over (weights, free amplitudes) in [0,1]:
/// Nelder-Mead multistart followed by a damped Gauss-Newton polish.
fn least_squares_fit(s: &DickeDiagonalState) -> SdsDecomposition {
    let n = s.n;
    let jx = jx_max(n);
    let jy = jy_max(n);
    let dim = jx + jy;

    let to_nodes = |p: &[f64]| -> Vec<(f64, f64)> {
        (0..jx)
            .map(|j| {
                let y = if j < jy { p[jx + j] } else { 0.0 };
                (p[j], y)
            })
            .collect()
    };
    let objective = |p: &[f64]| -> f64 {
        let hat = chi_hat(n, &to_nodes(p));
        s.chi.iter().zip(&hat).map(|(a, b)| (a - b) * (a - b)).sum()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(FALLBACK_SEED, &[n as u64]));
    let mut best_p: Vec<f64> = vec![0.5; dim];
    let mut best_obj = objective(&best_p);
    for _ in 0..32 {
        let start: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..=1.0)).collect();
        let p = nelder_mead(&objective, &start, 250 * dim);
        let p = gauss_newton_polish(s, &to_nodes(&p), jy);
        let v = objective(&p);
        if v < best_obj {
            best_obj = v;
            best_p = p;
        }
        if best_obj < 1e-22 {
            break;
        }
    }
    finish_decomposition(s, to_nodes(&best_p))
}

/// Standard Nelder-Mead on [0,1]^d with clamped vertices.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], iters: usize) -> Vec<f64> {
    let d = start.len();
    let clamp = |p: &mut Vec<f64>| {
        for v in p.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
    };
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(d + 1);
    simplex.push((f(start), start.to_vec()));
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] = (p[i] + 0.25).min(1.0);
        if (p[i] - start[i]).abs() < 1e-3 {
            p[i] = (start[i] - 0.25).max(0.0);
        }
        simplex.push((f(&p), p));
    }
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        if simplex[d].0 - simplex[0].0 < 1e-18 {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|i| simplex[..d].iter().map(|(_, p)| p[i]).sum::<f64>() / d as f64)
            .collect();
        let worst = simplex[d].clone();
        let mut refl: Vec<f64> = (0..d)
            .map(|i| centroid[i] + (centroid[i] - worst.1[i]))
            .collect();
        clamp(&mut refl);
        let f_refl = f(&refl);
        if f_refl < simplex[0].0 {
            let mut exp: Vec<f64> = (0..d)
                .map(|i| centroid[i] + 2.0 * (centroid[i] - worst.1[i]))
                .collect();
            clamp(&mut exp);
            let f_exp = f(&exp);
            simplex[d] = if f_exp < f_refl {
                (f_exp, exp)
            } else {
                (f_refl, refl)
            };
        } else if f_refl < simplex[d - 1].0 {
            simplex[d] = (f_refl, refl);
        } else {
            let mut con: Vec<f64> = (0..d)
                .map(|i| centroid[i] + 0.5 * (worst.1[i] - centroid[i]))
                .collect();
            clamp(&mut con);
            let f_con = f(&con);
            if f_con < worst.0 {
                simplex[d] = (f_con, con);
            } else {
                let best = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut p: Vec<f64> = entry
                        .1
                        .iter()
                        .zip(&best)
                        .map(|(v, b)| b + 0.5 * (v - b))
                        .collect();
                    clamp(&mut p);
                    entry.0 = f(&p);
                    entry.1 = p;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    simplex[0].1.clone()
}

/// Damped Gauss-Newton polish of the population residuals; numeric
/// Jacobian, clamped to the box. Returns the packed parameter vector.
fn gauss_newton_polish(s: &DickeDiagonalState, nodes: &[(f64, f64)], jy: usize) -> Vec<f64> {
    let n = s.n;
    let jx = nodes.len();
    let mut p: Vec<f64> = nodes.iter().map(|&(x, _)| x).collect();
    p.extend(nodes.iter().take(jy).map(|&(_, y)| y));
    let dim = p.len();

    let residuals = |p: &[f64]| -> Vec<f64> {
        let nodes: Vec<(f64, f64)> = (0..jx)
            .map(|j| (p[j], if j < jy { p[jx + j] } else { 0.0 }))
            .collect();
        let hat = chi_hat(n, &nodes);
        s.chi.iter().zip(&hat).map(|(a, b)| b - a).collect()
    };

    for _ in 0..60 {
        let r = residuals(&p);
        let norm = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if norm < 1e-14 {
            break;
        }
        let h = 1e-7;
        let mut jac = DMatrix::<f64>::zeros(n + 1, dim);
        for c in 0..dim {
            let mut plus = p.clone();
            let mut minus = p.clone();
            plus[c] += h;
            minus[c] -= h;
            let rp = residuals(&plus);
            let rm = residuals(&minus);
            for row in 0..=n {
                jac[(row, c)] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let rv = DMatrix::from_fn(n + 1, 1, |i, _| r[i]);
        let jt = jac.transpose();
        let mut a = &jt * &jac;
        for i in 0..dim {
            a[(i, i)] += 1e-12;
        }
        let Some(step) = a.lu().solve(&(&jt * &rv)) else {
            break;
        };
        let mut improved = false;
        for &damp in &[1.0, 0.5, 0.25, 0.1] {
            let cand: Vec<f64> = p
                .iter()
                .enumerate()
                .map(|(i, v)| (v - damp * step[(i, 0)]).clamp(0.0, 1.0))
                .collect();
            let rc = residuals(&cand);
            let cn = rc.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if cn < norm {
                p = cand;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
    p
}

/// Element (x, y) of the partial-transpose block matrix for bipartition
/// size q and offset m:
/// chi_{m+x+y} sqrt(B(q,x) B(q,y) B(N-q,m+x) B(N-q,m+y)) / B(N,m+x+y).
pub fn ppt_matrix(s: &DickeDiagonalState, q: usize, m: usize) -> Result<DMatrix<f64>> {
    let n = s.n;
    if q < 1 || q > n / 2 {
        return Err(Error::OutOfRange {
            what: "bipartition size q",
            value: q as f64,
            lo: 1.0,
            hi: (n / 2) as f64,
        });
    }
    if m > n - 2 * q {
        return Err(Error::OutOfRange {
            what: "offset m",
            value: m as f64,
            lo: 0.0,
            hi: (n - 2 * q) as f64,
        });
    }
    Ok(DMatrix::from_fn(q + 1, q + 1, |x, y| {
        ppt_element(s, q, m, x, y)
    }))
}

fn ppt_element(s: &DickeDiagonalState, q: usize, m: usize, x: usize, y: usize) -> f64 {
    let n = s.n;
    let w = (binomial(q, x) * binomial(q, y) * binomial(n - q, m + x) * binomial(n - q, m + y))
        .sqrt()
        / binomial(n, m + x + y);
    s.chi[m + x + y] * w
}

/// Determinant by Gaussian elimination on a stack copy; the blocks here
/// are at most 7x7.
fn det_in_place(a: &mut [f64], dim: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..dim {
        let mut pivot = col;
        for row in col + 1..dim {
            if a[row * dim + col].abs() > a[pivot * dim + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * dim + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..dim {
                a.swap(col * dim + k, pivot * dim + k);
            }
            det = -det;
        }
        let d = a[col * dim + col];
        det *= d;
        for row in col + 1..dim {
            let factor = a[row * dim + col] / d;
            for k in col..dim {
                a[row * dim + k] -= factor * a[col * dim + k];
            }
        }
    }
    det
}

/// PPT under every bipartition: all block determinants nonnegative within
/// 1e-12, for q = 1..floor(N/2) and m = 0..N-2q.
pub fn ppt_all(s: &DickeDiagonalState) -> bool {
    let n = s.n;
    let mut buf = [0.0_f64; 64];
    for q in 1..=n / 2 {
        let dim = q + 1;
        for m in 0..=(n - 2 * q) {
            for x in 0..dim {
                for y in 0..dim {
                    buf[x * dim + y] = ppt_element(s, q, m, x, y);
                }
            }
            if det_in_place(&mut buf[..dim * dim], dim) < -1e-12 {
                return false;
            }
        }
    }
    true
}

/// Closed-form change-of-variable Jacobian determinant (absolute value):
/// Z_N prod_k x_k prod_{j != k} (y_j - y_k)^2, with k over the weight
/// indices 1..jy_max and j over all amplitude slots including the pinned
/// zero. Inputs carry one entry per weight slot (length jx_max), the
/// pinned amplitude included explicitly.
pub fn jacobian_det(x: &[f64], y: &[f64], n: usize) -> Result<f64> {
    let jx = jx_max(n);
    if x.len() != jx || y.len() != jx {
        return Err(Error::Invalid(format!(
            "expected {jx} weights and amplitudes for N = {n}"
        )));
    }
    let z_n: f64 = (0..=n).map(|k| binomial(n, k)).product();
    let mut jac = z_n;
    for k in 0..jy_max(n) {
        jac *= x[k];
        for (j, &yj) in y.iter().enumerate() {
            if j != k {
                jac *= (yj - y[k]) * (yj - y[k]);
            }
        }
    }
    Ok(jac.abs())
}

/// Exact volume of the separable family in population coordinates:
/// prod_{z=1}^{N} z^(z-1) (z-1)!/(2z-1)!.
pub fn sds_volume_closed(n: usize) -> Result<BigRational> {
    if !(1..=12).contains(&n) {
        return Err(Error::OutOfRange {
            what: "N",
            value: n as f64,
            lo: 1.0,
            hi: 12.0,
        });
    }
    let mut v = BigRational::from_integer(BigInt::from(1));
    for z in 1..=n as u64 {
        let num = BigInt::from(z).pow(z as u32 - 1) * big_factorial(z - 1);
        let den = big_factorial(2 * z - 1);
        v *= BigRational::new(num, den);
    }
    Ok(v)
}

fn big_factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

/// f64 value of the closed-form volume.
pub fn sds_volume_closed_f64(n: usize) -> Result<f64> {
    use num_traits::ToPrimitive;
    let v = sds_volume_closed(n)?;
    Ok(v.to_f64().unwrap_or(f64::NAN))
}

const MC_CHUNK: u64 = 1 << 16;

/// Draw a uniform point of the probability simplex by normalized
/// exponential spacings.
fn sample_simplex(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut sum = 0.0;
    for v in out.iter_mut() {
        let u: f64 = rng.random();
        *v = -(1.0 - u).ln();
        sum += *v;
    }
    for v in out.iter_mut() {
        *v /= sum;
    }
}

/// Monte Carlo estimate of the PPT volume in population coordinates:
/// uniform simplex sampling, indicator [`ppt_all`]. Returns (estimate,
/// binomial standard error), in the same delta-normalized convention as
/// [`sds_volume_closed`]: the whole simplex carries volume 1/N!, so the
/// hit fraction is divided by N!. The stream splits into fixed chunks
/// with seeds derived from the chunk index, so the count is identical for
/// any worker count.
pub fn pptds_volume_mc(n: usize, samples: u64, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::Invalid("at least one Monte Carlo sample".into()));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x7070, n as u64, chunk]));
            let lo = chunk * MC_CHUNK;
            let hi = ((chunk + 1) * MC_CHUNK).min(samples);
            let mut chi = vec![0.0; n + 1];
            let mut count = 0u64;
            let mut state = DickeDiagonalState::uniform(n);
            for _ in lo..hi {
                sample_simplex(&mut rng, &mut chi);
                state.chi.copy_from_slice(&chi);
                if ppt_all(&state) {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let scale = crate::numeric::factorial(n);
    let p = hits as f64 / samples as f64;
    let stderr = (p * (1.0 - p) / samples as f64).sqrt();
    Ok((p / scale, stderr / scale))
}

/// Sample `samples` PPT states by rejection from the simplex and run the
/// separability fit on each; returns how many fail the fit. Equality of
/// the PPT and separable volumes predicts zero.
pub fn mc_equivalence_scan(n: usize, samples: u64, seed: u64) -> Result<u64> {
    if n > 8 {
        return Err(Error::OutOfRange {
            what: "N",
            value: n as f64,
            lo: 1.0,
            hi: 8.0,
        });
    }
    if samples == 0 {
        return Ok(0);
    }
    let mut failures = 0u64;
    let mut collected = 0u64;
    let mut chunk_base = 0u64;
    let wave = 64u64;
    let max_chunks = 200_000u64;
    while collected < samples {
        if chunk_base >= max_chunks {
            return Err(Error::NonConvergence {
                context: "PPT rejection sampling",
                iterations: (chunk_base * MC_CHUNK) as usize,
            });
        }
        let flags: Vec<Vec<bool>> = (chunk_base..chunk_base + wave)
            .into_par_iter()
            .map(|chunk| {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x0e9, n as u64, chunk]));
                let mut chi = vec![0.0; n + 1];
                let mut state = DickeDiagonalState::uniform(n);
                let mut out = Vec::new();
                for _ in 0..MC_CHUNK {
                    sample_simplex(&mut rng, &mut chi);
                    state.chi.copy_from_slice(&chi);
                    if ppt_all(&state) {
                        let fit_failed = !matches!(sds_fit(&state), Ok(f) if f.is_separable());
                        out.push(fit_failed);
                    }
                }
                out
            })
            .collect();
        for chunk_flags in flags {
            for failed in chunk_flags {
                if collected == samples {
                    break;
                }
                collected += 1;
                if failed {
                    failures += 1;
                }
            }
        }
        chunk_base += wave;
    }
    Ok(failures)
}
