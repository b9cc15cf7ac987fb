//! Quantum-bound criteria on (2,2,2) behaviors and maximal-xi boundary
//! curves along the gamma and beta slices.
//!
//! Four criteria have closed forms on the slices (Uffink, NPA level 1, the
//! QB3 function-valued family, and a fixed 10-term LO^2 clique). The fifth
//! is the NPA 1+AB semidefinite certificate: a 9x9 moment matrix with eight
//! data entries and eight free variables which must admit a positive
//! semidefinite completion. Feasibility is decided by maximizing the
//! minimum eigenvalue over the free variables (concave in them), and the
//! boundary is traced by bisection in xi.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::SMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::{slice_behavior, Behavior222, ProbTable222, SliceKind, SliceSpec};
use crate::numeric::{derive_seed, golden_min};
use crate::{Error, Result};

/// Feasibility threshold on the maximized minimum eigenvalue; absorbs
/// eigensolver noise.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// The five boundary criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    Uffink,
    Npa1,
    Lo2,
    Qb3,
    Npa1ab,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::Uffink,
        Criterion::Npa1,
        Criterion::Lo2,
        Criterion::Qb3,
        Criterion::Npa1ab,
    ];
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Criterion::Uffink => "uffink",
            Criterion::Npa1 => "npa1",
            Criterion::Lo2 => "lo2",
            Criterion::Qb3 => "qb3",
            Criterion::Npa1ab => "npa1ab",
        };
        f.write_str(s)
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uffink" => Ok(Criterion::Uffink),
            "npa1" => Ok(Criterion::Npa1),
            "lo2" => Ok(Criterion::Lo2),
            "qb3" => Ok(Criterion::Qb3),
            "npa1ab" => Ok(Criterion::Npa1ab),
            other => Err(Error::Invalid(format!("unknown criterion '{other}'"))),
        }
    }
}

fn check_param(param: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&param) {
        return Err(Error::OutOfRange {
            what: "slice param",
            value: param,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Largest xi allowed by Uffink's quadratic bound on the given slice.
pub fn uffink_max_xi(slice: SliceKind, param: f64) -> Result<f64> {
    check_param(param)?;
    Ok(match slice {
        SliceKind::GammaSlice => 0.5 * ((2.0 - param * param).sqrt() - param),
        SliceKind::BetaSlice => FRAC_1_SQRT_2.min(1.0 - param),
    })
}

/// The NPA level-1 arcsine criterion on a behavior: the signed arcsine sum
/// must not exceed pi.
///
/// When a marginal is deterministic the arcsine argument degenerates; the
/// continuous extension used here maps it to sign(c_xy - mAx*mBy), or 0
/// when the numerator also vanishes.
pub fn npa1_satisfied(b: &Behavior222, tol: f64) -> bool {
    let mut sum = 0.0;
    for x in 0..2usize {
        for y in 0..2usize {
            let ma = b.marginal_a(x);
            let mb = b.marginal_b(y);
            let num = b.correlator(x, y) - ma * mb;
            let den2 = (1.0 - ma * ma) * (1.0 - mb * mb);
            let arg = if den2 < 1e-18 {
                if num == 0.0 {
                    0.0
                } else {
                    num.signum()
                }
            } else {
                (num / den2.sqrt()).clamp(-1.0, 1.0)
            };
            let sign = if x == 1 && y == 1 { -1.0 } else { 1.0 };
            sum += sign * arg.asin();
        }
    }
    sum <= PI + tol
}

/// Largest xi allowed by NPA level 1 on the given slice.
///
/// On the gamma slice the arcsine boundary reduces to the depressed cubic
/// 2u^3 - u = g/(1+g), solved in real arithmetic with the triple-angle
/// form; past the discriminant sign change the hyperbolic branch takes
/// over (the radical form printed for this boundary goes complex there).
pub fn npa1_max_xi(slice: SliceKind, param: f64) -> Result<f64> {
    check_param(param)?;
    Ok(match slice {
        SliceKind::GammaSlice => {
            let g = param;
            let rhs = g / (1.0 + g);
            // Largest real root of 2u^3 - u = rhs.
            let k = 1.5 * 6.0_f64.sqrt() * rhs;
            let scale = 2.0 / 6.0_f64.sqrt();
            let u = if k <= 1.0 {
                scale * (k.acos() / 3.0).cos()
            } else {
                scale * (k.acosh() / 3.0).cosh()
            };
            u * (1.0 - g * g) - g * (1.0 - g)
        }
        SliceKind::BetaSlice => {
            let b = param;
            (((1.0 - b * b) / 2.0).sqrt()).min(1.0 - b)
        }
    })
}

/// Stable evaluation of f(c) = (c^2 - sqrt((3c^2-4)(c^2-2)))/(c^2-1) on
/// [0, 1]; the removable singularity at c = 1 is expanded analytically
/// (limit 3).
fn qb3_f(c: f64) -> f64 {
    let eps = c * c - 1.0;
    if eps.abs() < 1e-6 {
        3.0 + 0.5 * eps + eps * eps
    } else {
        (c * c - ((3.0 * c * c - 4.0) * (c * c - 2.0)).sqrt()) / eps
    }
}

/// min over c in [0,1] of f(c) - c*g: the envelope of the QB3 family of
/// linear bounds at slope g.
pub fn qb3_min_term(g: f64) -> Result<f64> {
    if g < 0.0 {
        return Err(Error::OutOfRange {
            what: "qb3 slope g",
            value: g,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let h = |c: f64| qb3_f(c) - c * g;
    // Coarse bracket, then golden refinement; handles minima at either
    // endpoint.
    let n = 256usize;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let c = i as f64 / n as f64;
        let v = h(c);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = (best_i.saturating_sub(1)) as f64 / n as f64;
    let hi = ((best_i + 1).min(n)) as f64 / n as f64;
    let (_, v) = golden_min(h, lo, hi, 1e-10);
    Ok(v.min(best))
}

/// Largest xi allowed by the QB3 envelope on the given slice.
pub fn qb3_max_xi(slice: SliceKind, param: f64) -> Result<f64> {
    check_param(param)?;
    Ok(match slice {
        SliceKind::GammaSlice => (qb3_min_term(param)? - 2.0 * param) / 4.0,
        SliceKind::BetaSlice => (qb3_min_term(2.0 * param)? / 4.0).min(1.0 - param),
    })
}

/// The ten wired product terms of the LO^2 clique, as
/// (a, b, c, d | x, y, z, w).
const LO2_CLIQUE: [(u8, u8, u8, u8, u8, u8, u8, u8); 10] = [
    (1, 1, 1, 1, 1, 1, 0, 0),
    (1, 1, 1, 0, 1, 1, 0, 0),
    (1, 1, 0, 1, 1, 0, 0, 1),
    (1, 1, 0, 0, 0, 0, 0, 1),
    (1, 0, 1, 1, 1, 1, 0, 1),
    (1, 0, 0, 1, 1, 0, 0, 1),
    (0, 1, 1, 1, 1, 1, 0, 0),
    (0, 0, 1, 1, 1, 1, 1, 1),
    (0, 0, 1, 0, 0, 1, 1, 1),
    (0, 0, 0, 0, 1, 0, 1, 0),
];

/// Sum of the 10-term LO^2 clique over the wiring
/// P(abcd|xyzw) = Pa(ab|xy) * Pb(cd|zw). LO^2 holds iff the sum <= 1.
pub fn lo2_clique_sum(pa: &ProbTable222, pb: &ProbTable222) -> f64 {
    LO2_CLIQUE
        .iter()
        .map(|&(a, b, c, d, x, y, z, w)| pa.get(a, b, x, y) * pb.get(c, d, z, w))
        .sum()
}

/// Largest xi allowed by the LO^2 clique on the given slice.
pub fn lo2_max_xi(slice: SliceKind, param: f64) -> Result<f64> {
    check_param(param)?;
    let root10 = 10.0_f64.sqrt();
    Ok(match slice {
        SliceKind::GammaSlice => (root10 - 1.0) / 3.0 * (1.0 - param),
        SliceKind::BetaSlice => {
            let b = param;
            let closed = (2.0_f64.sqrt() * ((1.0 - b) * (b + 5.0)).sqrt() + b - 1.0) / 3.0;
            closed.min(1.0 - b)
        }
    })
}

/// The NPA 1+AB moment matrix. Row/column order: 1, A0, A1, B0, B1, A0B0,
/// A0B1, A1B0, A1B1. Eight entries come from the behavior, eight are free
/// moments in the order A0.A1, B0.B1, A0.A1B0, A0.A1B1, B0.B1A0, B0.B1A1,
/// A0.A1B0.B1, A0.A1B1.B0.
pub struct GammaMatrix;

/// Upper-triangle positions of each free variable.
const FREE_POSITIONS: [&[(usize, usize)]; 8] = [
    &[(1, 2), (5, 7), (6, 8)],
    &[(3, 4), (5, 6), (7, 8)],
    &[(1, 7), (2, 5)],
    &[(1, 8), (2, 6)],
    &[(3, 6), (4, 5)],
    &[(3, 8), (4, 7)],
    &[(5, 8)],
    &[(6, 7)],
];

impl GammaMatrix {
    /// Assemble the certificate for a behavior and a choice of the eight
    /// free moments. Symmetric with unit diagonal by construction.
    pub fn assemble(b: &Behavior222, free: &[f64; 8]) -> SMatrix<f64, 9, 9> {
        let mut g = SMatrix::<f64, 9, 9>::identity();
        let mut set = |r: usize, c: usize, v: f64| {
            g[(r, c)] = v;
            g[(c, r)] = v;
        };
        set(0, 1, b.m_a0);
        set(0, 2, b.m_a1);
        set(0, 3, b.m_b0);
        set(0, 4, b.m_b1);
        set(0, 5, b.c00);
        set(0, 6, b.c01);
        set(0, 7, b.c10);
        set(0, 8, b.c11);
        set(1, 3, b.c00);
        set(1, 4, b.c01);
        set(1, 5, b.m_b0);
        set(1, 6, b.m_b1);
        set(2, 3, b.c10);
        set(2, 4, b.c11);
        set(2, 7, b.m_b0);
        set(2, 8, b.m_b1);
        set(3, 5, b.m_a0);
        set(3, 7, b.m_a1);
        set(4, 6, b.m_a0);
        set(4, 8, b.m_a1);
        for (var, positions) in FREE_POSITIONS.iter().enumerate() {
            for &(r, c) in positions.iter() {
                set(r, c, free[var]);
            }
        }
        g
    }

    /// Minimum eigenvalue of the assembled certificate together with its
    /// unit eigenvector (the supergradient generator).
    pub fn lambda_min(b: &Behavior222, free: &[f64; 8]) -> (f64, [f64; 9]) {
        let eig = Self::assemble(b, free).symmetric_eigen();
        let mut idx = 0;
        let mut min = f64::INFINITY;
        for (i, &v) in eig.eigenvalues.iter().enumerate() {
            if v < min {
                min = v;
                idx = i;
            }
        }
        let col = eig.eigenvectors.column(idx);
        let mut u = [0.0; 9];
        for (i, slot) in u.iter_mut().enumerate() {
            *slot = col[i];
        }
        (min, u)
    }
}

/// Initial subgradient step length; decays as 1/k per iteration.
const SUBGRADIENT_STEP: f64 = 1.0;
const RESTARTS: u64 = 16;
const ITERATIONS: usize = 2000;

/// Maximize the minimum eigenvalue of the certificate over the eight free
/// variables: subgradient ascent on the concave map with 16 seeded random
/// restarts in [-1,1]^8, step schedule 1/k, 2000 iterations per restart,
/// returning the best value seen. The behavior is inside the NPA 1+AB set
/// iff the result clears -[`FEASIBILITY_TOL`].
pub fn npa1ab_max_lambda_min(b: &Behavior222, seed: u64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for restart in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[restart]));
        let mut v = [0.0_f64; 8];
        for slot in v.iter_mut() {
            *slot = rng.random_range(-1.0..=1.0);
        }
        for k in 1..=ITERATIONS {
            let (lam, u) = GammaMatrix::lambda_min(b, &v);
            if lam > best {
                best = lam;
            }
            let mut g = [0.0_f64; 8];
            for (var, positions) in FREE_POSITIONS.iter().enumerate() {
                for &(r, c) in positions.iter() {
                    g[var] += 2.0 * u[r] * u[c];
                }
            }
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-14 {
                break;
            }
            let step = SUBGRADIENT_STEP / k as f64;
            for (vi, gi) in v.iter_mut().zip(g.iter()) {
                *vi += step * gi / norm;
            }
        }
        let (lam, _) = GammaMatrix::lambda_min(b, &v);
        best = best.max(lam);
    }
    best
}

/// Solver knobs shared by the boundary tracer.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub seed: u64,
    /// Bisection tolerance in xi for the NPA 1+AB boundary.
    pub xi_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            xi_tol: 1e-4,
        }
    }
}

/// Largest xi certified NPA 1+AB-feasible on the slice, by bisection
/// against the eigenvalue solver. Solver shortfalls shrink the reported
/// value, never inflate it, so the result is a lower bound on the true
/// boundary.
pub fn npa1ab_max_xi(slice: SliceKind, param: f64, cfg: &SolverConfig) -> Result<f64> {
    check_param(param)?;
    let feasible = |xi: f64| -> Result<bool> {
        let b = slice_behavior(&SliceSpec {
            kind: slice,
            param,
            xi,
        })?;
        let s = derive_seed(cfg.seed, &[param.to_bits(), xi.to_bits()]);
        Ok(npa1ab_max_lambda_min(&b, s) >= -FEASIBILITY_TOL)
    };
    let mut lo = 0.0;
    let mut hi = 1.0 - param;
    if hi <= 0.0 {
        return Ok(0.0);
    }
    if feasible(hi)? {
        // The quantum set meets the no-signalling facet here.
        return Ok(hi);
    }
    while hi - lo > cfg.xi_tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Maximal xi for any criterion at one slice point.
pub fn max_xi(
    criterion: Criterion,
    slice: SliceKind,
    param: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let raw = match criterion {
        Criterion::Uffink => uffink_max_xi(slice, param)?,
        Criterion::Npa1 => npa1_max_xi(slice, param)?,
        Criterion::Lo2 => lo2_max_xi(slice, param)?,
        Criterion::Qb3 => qb3_max_xi(slice, param)?,
        Criterion::Npa1ab => npa1ab_max_xi(slice, param, cfg)?,
    };
    Ok(raw.clamp(0.0, 1.0 - param))
}

/// One traced point of a boundary curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub param: f64,
    pub criterion: Criterion,
    pub xi_max: f64,
    pub converged: bool,
}

/// Per-criterion maximal-xi samples along one slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub slice: SliceKind,
    pub points: Vec<BoundaryPoint>,
}

impl BoundaryCurve {
    pub fn points_for(&self, criterion: Criterion) -> impl Iterator<Item = &BoundaryPoint> {
        self.points.iter().filter(move |p| p.criterion == criterion)
    }
}

/// Trace every requested criterion across a parameter grid. Grid points
/// are independent and evaluated in parallel; the NPA 1+AB solver seeds
/// derive from (seed, param index), so the output is identical for any
/// worker count.
pub fn trace_boundary(
    slice: SliceKind,
    criteria: &[Criterion],
    params: &[f64],
    cfg: &SolverConfig,
) -> Result<BoundaryCurve> {
    for &p in params {
        check_param(p)?;
    }
    let jobs: Vec<(usize, f64, Criterion)> = params
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| criteria.iter().map(move |&c| (i, p, c)))
        .collect();
    let points: Vec<BoundaryPoint> = jobs
        .par_iter()
        .map(|&(i, param, criterion)| {
            let point_cfg = SolverConfig {
                seed: derive_seed(cfg.seed, &[i as u64]),
                xi_tol: cfg.xi_tol,
            };
            match max_xi(criterion, slice, param, &point_cfg) {
                Ok(v) if v.is_finite() => BoundaryPoint {
                    param,
                    criterion,
                    xi_max: v,
                    converged: true,
                },
                _ => BoundaryPoint {
                    param,
                    criterion,
                    xi_max: f64::NAN,
                    converged: false,
                },
            }
        })
        .collect();
    Ok(BoundaryCurve { slice, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{pr_box, to_probabilities, white_noise};

    #[test]
    fn uffink_values() {
        assert!((uffink_max_xi(SliceKind::GammaSlice, 0.0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(uffink_max_xi(SliceKind::GammaSlice, 1.0).unwrap(), 0.0);
        assert!((uffink_max_xi(SliceKind::BetaSlice, 0.9).unwrap() - 0.1).abs() < 1e-12);
        assert!(uffink_max_xi(SliceKind::GammaSlice, 1.2).is_err());
    }

    #[test]
    fn npa1_criterion_points() {
        assert!(npa1_satisfied(&white_noise().to_behavior(), 1e-9));
        assert!(!npa1_satisfied(&pr_box().to_behavior(), 1e-9));
        // Boundary point: 4 arcsin(1/sqrt2) = pi.
        let spec = SliceSpec {
            kind: SliceKind::GammaSlice,
            param: 0.0,
            xi: FRAC_1_SQRT_2,
        };
        let b = slice_behavior(&spec).unwrap();
        assert!(npa1_satisfied(&b, 1e-9));
        assert!(!npa1_satisfied(
            &slice_behavior(&SliceSpec {
                xi: FRAC_1_SQRT_2 + 1e-6,
                ..spec
            })
            .unwrap(),
            1e-9
        ));
    }

    #[test]
    fn npa1_closed_form_matches_bisection() {
        for i in 0..=20 {
            let g = i as f64 / 20.0;
            let closed = npa1_max_xi(SliceKind::GammaSlice, g).unwrap();
            if g >= 1.0 {
                assert!(closed.abs() < 1e-9);
                continue;
            }
            let by_bisect = crate::numeric::bisect_predicate(
                |xi| {
                    let b = slice_behavior(&SliceSpec {
                        kind: SliceKind::GammaSlice,
                        param: g,
                        xi,
                    })
                    .unwrap();
                    !npa1_satisfied(&b, 1e-12)
                },
                0.0,
                1.0 - g,
                1e-9,
            );
            assert!(
                (closed - by_bisect).abs() < 1e-6,
                "gamma = {g}: closed {closed} vs bisect {by_bisect}"
            );
        }
    }

    #[test]
    fn npa1_closed_form_matches_radical_form() {
        // The cube-root radical form of the same boundary is real once its
        // inner radicand 3g(25g-4)-6 turns nonnegative; both forms must
        // agree there.
        for i in 0..=12 {
            let g: f64 = 0.38 + 0.05 * i as f64;
            if g > 1.0 {
                break;
            }
            let radicand = 3.0 * g * (25.0 * g - 4.0) - 6.0;
            assert!(radicand >= 0.0);
            let h =
                (6.0 * (1.0 - g).powi(3) * (g + 1.0).powi(2) * (9.0 * g + radicand.sqrt())).cbrt();
            let alt = g * (g - 1.0) + (g * g - 1.0).powi(2) / h + h / 6.0;
            let ours = npa1_max_xi(SliceKind::GammaSlice, g).unwrap();
            assert!(
                (ours - alt).abs() < 1e-10,
                "gamma = {g}: {ours} vs radical form {alt}"
            );
        }
    }

    #[test]
    fn npa1_beta_branch_point() {
        let v = npa1_max_xi(SliceKind::BetaSlice, 1.0 / 3.0).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        assert!((npa1_max_xi(SliceKind::GammaSlice, 0.0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn qb3_min_term_values() {
        let v0 = qb3_min_term(0.0).unwrap();
        assert!((v0 - 8.0_f64.sqrt()).abs() < 1e-9, "got {v0}");
        let v2 = qb3_min_term(2.0).unwrap();
        assert!((v2 - 1.0).abs() < 1e-9, "got {v2}");
        assert!(qb3_min_term(-0.5).is_err());
    }

    #[test]
    fn qb3_slice_values() {
        assert!((qb3_max_xi(SliceKind::BetaSlice, 0.0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-9);
        assert!(qb3_max_xi(SliceKind::GammaSlice, 1.0).unwrap().abs() < 1e-9);
        let xi0 = (qb3_min_term(0.0).unwrap() - 2.0 * 0.0) / 4.0;
        assert!((xi0 - FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn lo2_clique_values() {
        let noise = white_noise();
        assert!((lo2_clique_sum(&noise, &noise) - 0.625).abs() < 1e-15);
        let pr = pr_box();
        assert_eq!(lo2_clique_sum(&pr, &pr), 1.25);
    }

    #[test]
    fn lo2_closed_form_on_gamma_slice() {
        // Displayed reduction: sum = (xi(3xi - 2(g-1)) - 3(g-2)g + 5)/8.
        for &(g, xi) in &[(0.0, 0.3), (0.2, 0.5), (0.6, 0.1), (0.35, 0.4)] {
            let b = slice_behavior(&SliceSpec {
                kind: SliceKind::GammaSlice,
                param: g,
                xi,
            })
            .unwrap();
            let t = to_probabilities(&b).unwrap();
            let sum = lo2_clique_sum(&t, &t);
            let closed = (xi * (3.0 * xi - 2.0 * (g - 1.0)) - 3.0 * (g - 2.0) * g + 5.0) / 8.0;
            assert!((sum - closed).abs() < 1e-12, "g={g} xi={xi}");
        }
    }

    #[test]
    fn lo2_max_xi_values() {
        let expect = (10.0_f64.sqrt() - 1.0) / 3.0;
        assert!((lo2_max_xi(SliceKind::GammaSlice, 0.0).unwrap() - expect).abs() < 1e-12);
        assert!((lo2_max_xi(SliceKind::BetaSlice, 0.0).unwrap() - expect).abs() < 1e-12);
        // Both beta branches meet at 1/3.
        let at_third = lo2_max_xi(SliceKind::BetaSlice, 1.0 / 3.0).unwrap();
        assert!((at_third - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lo2_numeric_root_matches_closed_form() {
        // Solve clique sum == 1 in xi as a quadratic fitted from three
        // evaluations; independent of the closed form.
        for i in 0..=9 {
            let g = i as f64 * 0.1;
            let sum_at = |xi: f64| {
                let b = slice_behavior(&SliceSpec {
                    kind: SliceKind::GammaSlice,
                    param: g,
                    xi,
                })
                .unwrap();
                let t = to_probabilities(&b).unwrap();
                lo2_clique_sum(&t, &t)
            };
            let span = 1.0 - g;
            let (s0, s1, s2) = (sum_at(0.0), sum_at(0.5 * span), sum_at(span));
            let c2 = 2.0 * (s0 - 2.0 * s1 + s2) / (span * span);
            let c1 = (s2 - s0) / span - c2 * span;
            let c0 = s0 - 1.0;
            let root = if c2.abs() < 1e-14 {
                -c0 / c1
            } else {
                let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
                (-c1 + disc) / (2.0 * c2)
            };
            let closed = lo2_max_xi(SliceKind::GammaSlice, g).unwrap();
            assert!(
                (root - closed).abs() < 1e-8,
                "gamma = {g}: root {root} vs closed {closed}"
            );
        }
    }

    #[test]
    fn gamma_matrix_layout() {
        let b = Behavior222::new(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8);
        let free = [0.11, 0.22, 0.33, 0.44, 0.55, 0.66, 0.77, 0.88];
        let g = GammaMatrix::assemble(&b, &free);
        assert_eq!(g.transpose(), g);
        for i in 0..9 {
            assert_eq!(g[(i, i)], 1.0);
        }
        // Spot checks against the tabulated layout.
        assert_eq!(g[(0, 5)], b.c00);
        assert_eq!(g[(0, 6)], b.c01);
        assert_eq!(g[(0, 7)], b.c10);
        assert_eq!(g[(2, 4)], b.c11);
        assert_eq!(g[(4, 8)], b.m_a1);
        assert_eq!(g[(1, 2)], free[0]);
        assert_eq!(g[(5, 8)], free[6]);
        assert_eq!(g[(6, 7)], free[7]);
        assert_eq!(g[(7, 8)], free[1]);
    }

    #[test]
    fn white_noise_certificate_is_feasible() {
        let b = white_noise().to_behavior();
        let v = npa1ab_max_lambda_min(&b, 11);
        assert!(v >= 0.0, "got {v}");
    }

    #[test]
    fn pr_certificate_is_infeasible() {
        let b = pr_box().to_behavior();
        let v = npa1ab_max_lambda_min(&b, 11);
        assert!(v < -FEASIBILITY_TOL, "got {v}");
    }

    #[test]
    fn npa1ab_brackets_tsirelson_point() {
        let at = |xi: f64| {
            let b = slice_behavior(&SliceSpec {
                kind: SliceKind::GammaSlice,
                param: 0.0,
                xi,
            })
            .unwrap();
            npa1ab_max_lambda_min(&b, 3)
        };
        assert!(at(0.70) >= -FEASIBILITY_TOL);
        assert!(at(0.72) < -FEASIBILITY_TOL);
    }

    #[test]
    fn lambda_min_concavity_midpoint() {
        let b = slice_behavior(&SliceSpec {
            kind: SliceKind::BetaSlice,
            param: 0.3,
            xi: 0.5,
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..32 {
            let mut v1 = [0.0; 8];
            let mut v2 = [0.0; 8];
            for i in 0..8 {
                v1[i] = rng.random_range(-1.0..=1.0);
                v2[i] = rng.random_range(-1.0..=1.0);
            }
            let mut mid = [0.0; 8];
            for i in 0..8 {
                mid[i] = 0.5 * (v1[i] + v2[i]);
            }
            let f1 = GammaMatrix::lambda_min(&b, &v1).0;
            let f2 = GammaMatrix::lambda_min(&b, &v2).0;
            let fm = GammaMatrix::lambda_min(&b, &mid).0;
            assert!(fm >= 0.5 * (f1 + f2) - 1e-10);
        }
    }

    #[test]
    fn qb3_min_term_concave_nonincreasing() {
        let mut prev = f64::INFINITY;
        let mut vals = Vec::new();
        for i in 0..=20 {
            let g = i as f64 * 0.15;
            let v = qb3_min_term(g).unwrap();
            assert!(v <= prev + 1e-12);
            prev = v;
            vals.push(v);
        }
        for w in vals.windows(3) {
            assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-9, "concavity violated");
        }
    }

    #[test]
    fn empty_criteria_trace_is_empty() {
        let curve = trace_boundary(
            SliceKind::GammaSlice,
            &[],
            &[0.0, 0.5],
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(curve.points.is_empty());
    }

    #[test]
    fn criterion_parsing() {
        assert_eq!("NPA1AB".parse::<Criterion>().unwrap(), Criterion::Npa1ab);
        assert!("bogus".parse::<Criterion>().is_err());
    }
}
