//! Quantum maxima (Tsirelson bounds) of linear functionals over k-party
//! binary/dichotomic scenarios.
//!
//! Each party's two observables are taken in the x-y plane as
//! `K_a = cos(t) sx + (-1)^a sin(t) sy`, which is fully general for binary
//! dichotomic scenarios up to local unitaries. The resulting operator Z is
//! Hermitian with zero diagonal, so its characteristic polynomial is monic
//! with vanishing subleading coefficient and has only real roots. A real `z`
//! exceeds the largest root iff the polynomial and all its derivatives are
//! positive at `z`; the bound is the infimum of such `z` over all
//! measurement angles, found by bisection with an inner adversarial angle
//! search. A dense eigensolver over the same angle domain serves as the
//! independent oracle.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::boxes::Behavior222;
use crate::numeric::{factorial, golden_min};
use crate::{Error, Result};

/// One product of single-party observables: sorted distinct (party, setting)
/// pairs. The empty product is not a valid term.
pub type TermKey = Vec<(u8, u8)>;

/// A linear functional of marginal/correlation expectations, with an
/// optional scalar weight `x` multiplying designated coefficients.
///
/// The bipartite case carries up to 3^2 - 1 = 8 coefficients
/// (c^A_x, c^B_y, c^AB_xy).
#[derive(Debug, Clone, PartialEq)]
pub struct TsirelsonFunctional {
    parties: usize,
    terms: BTreeMap<TermKey, f64>,
    /// Coefficients scaled by the sweep weight when `bind` is called.
    weighted: BTreeMap<TermKey, f64>,
}

impl TsirelsonFunctional {
    pub fn new(parties: usize) -> Result<Self> {
        if !(2..=4).contains(&parties) {
            return Err(Error::OutOfRange {
                what: "party count",
                value: parties as f64,
                lo: 2.0,
                hi: 4.0,
            });
        }
        Ok(Self {
            parties,
            terms: BTreeMap::new(),
            weighted: BTreeMap::new(),
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    fn check_key(&self, ops: &[(u8, u8)]) -> Result<TermKey> {
        if ops.is_empty() {
            return Err(Error::Invalid("empty operator product in term".into()));
        }
        let mut key: TermKey = ops.to_vec();
        key.sort_unstable();
        for w in key.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invalid(format!(
                    "party {} appears twice in one term",
                    w[0].0
                )));
            }
        }
        for &(p, s) in &key {
            if p as usize >= self.parties || s > 1 {
                return Err(Error::Invalid(format!(
                    "operator ({p},{s}) outside a {}-party dichotomic scenario",
                    self.parties
                )));
            }
        }
        Ok(key)
    }

    /// Add or overwrite a constant-coefficient term.
    pub fn with_term(mut self, ops: &[(u8, u8)], coeff: f64) -> Result<Self> {
        let key = self.check_key(ops)?;
        self.terms.insert(key, coeff);
        Ok(self)
    }

    /// Add a term whose coefficient is `coeff * x` for the sweep weight x.
    pub fn with_weighted_term(mut self, ops: &[(u8, u8)], coeff: f64) -> Result<Self> {
        let key = self.check_key(ops)?;
        self.weighted.insert(key, coeff);
        Ok(self)
    }

    /// Substitute the sweep weight, leaving only constant coefficients.
    pub fn bind(&self, x: f64) -> Self {
        let mut terms = self.terms.clone();
        for (key, c) in &self.weighted {
            *terms.entry(key.clone()).or_insert(0.0) += c * x;
        }
        Self {
            parties: self.parties,
            terms,
            weighted: BTreeMap::new(),
        }
    }

    /// Bipartite functional from c^A_x, c^B_y, and c^AB indexed [x][y].
    pub fn bipartite(c_a: [f64; 2], c_b: [f64; 2], c_ab: [[f64; 2]; 2]) -> Self {
        let mut f = Self::new(2).unwrap();
        for x in 0..2u8 {
            if c_a[x as usize] != 0.0 {
                f = f.with_term(&[(0, x)], c_a[x as usize]).unwrap();
            }
            if c_b[x as usize] != 0.0 {
                f = f.with_term(&[(1, x)], c_b[x as usize]).unwrap();
            }
        }
        for x in 0..2u8 {
            for y in 0..2u8 {
                let c = c_ab[x as usize][y as usize];
                if c != 0.0 {
                    f = f.with_term(&[(0, x), (1, y)], c).unwrap();
                }
            }
        }
        f
    }

    /// CHSH: correlators (1, 1, 1, -1), no marginals.
    pub fn chsh() -> Self {
        Self::bipartite([0.0; 2], [0.0; 2], [[1.0, 1.0], [1.0, -1.0]])
    }

    /// Correlators (1, 1, 1, x).
    pub fn qb1(x: f64) -> Self {
        Self::bipartite([0.0; 2], [0.0; 2], [[1.0, 1.0], [1.0, x]])
    }

    /// c^A_0 = x plus CHSH correlators.
    pub fn qb2(x: f64) -> Self {
        Self::bipartite([x, 0.0], [0.0; 2], [[1.0, 1.0], [1.0, -1.0]])
    }

    /// c^A = (x, x), c^B_0 = -x plus CHSH correlators.
    pub fn qb3(x: f64) -> Self {
        Self::bipartite([x, x], [-x, 0.0], [[1.0, 1.0], [1.0, -1.0]])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, f64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    /// Sum of |coefficients|; an upper bound on any expectation value since
    /// every operator product has unit norm.
    pub fn coeff_bound(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum::<f64>()
            + self.weighted.values().map(|c| c.abs()).sum::<f64>()
    }

    /// Value on a bipartite behavior. Weighted terms must be bound first.
    pub fn evaluate(&self, b: &Behavior222) -> Result<f64> {
        if self.parties != 2 {
            return Err(Error::Invalid(
                "behavior evaluation is defined for bipartite functionals".into(),
            ));
        }
        if !self.weighted.is_empty() {
            return Err(Error::Invalid("unbound sweep weight in functional".into()));
        }
        let mut acc = 0.0;
        for (key, c) in &self.terms {
            let factor = match key.as_slice() {
                [(0, x)] => b.marginal_a(*x as usize),
                [(1, y)] => b.marginal_b(*y as usize),
                [(0, x), (1, y)] => b.correlator(*x as usize, *y as usize),
                _ => unreachable!("checked bipartite keys"),
            };
            acc += c * factor;
        }
        Ok(acc)
    }
}

/// One measurement angle per party, radians in [0, pi/2].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementAngles(pub Vec<f64>);

impl MeasurementAngles {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        for &t in &angles {
            if !(0.0..=FRAC_PI_2 + 1e-12).contains(&t) {
                return Err(Error::OutOfRange {
                    what: "measurement angle",
                    value: t,
                    lo: 0.0,
                    hi: FRAC_PI_2,
                });
            }
        }
        Ok(Self(angles))
    }
}

/// K_a = cos(t) sx + (-1)^a sin(t) sy as an explicit 2x2 complex matrix.
fn observable(theta: f64, setting: u8) -> DMatrix<Complex64> {
    let s = if setting == 0 { 1.0 } else { -1.0 };
    let off = Complex64::new(theta.cos(), -s * theta.sin());
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            off,
            off.conj(),
            Complex64::new(0.0, 0.0),
        ],
    )
}

/// Assemble the 2^k x 2^k Hermitian operator of a functional at the given
/// angles. Identity padding on parties absent from a term; the diagonal is
/// identically zero.
pub fn build_operator(
    f: &TsirelsonFunctional,
    angles: &MeasurementAngles,
) -> Result<DMatrix<Complex64>> {
    if angles.0.len() != f.parties {
        return Err(Error::Invalid(format!(
            "{} angles supplied for {} parties",
            angles.0.len(),
            f.parties
        )));
    }
    if !f.weighted.is_empty() {
        return Err(Error::Invalid("unbound sweep weight in functional".into()));
    }
    let dim = 1usize << f.parties;
    let mut z = DMatrix::<Complex64>::zeros(dim, dim);
    let eye = DMatrix::<Complex64>::identity(2, 2);
    for (key, &c) in &f.terms {
        let mut acc = DMatrix::<Complex64>::identity(1, 1);
        for party in 0..f.parties as u8 {
            let factor = match key.iter().find(|(p, _)| *p == party) {
                Some(&(_, setting)) => observable(angles.0[party as usize], setting),
                None => eye.clone(),
            };
            acc = acc.kronecker(&factor);
        }
        z += acc * Complex64::new(c, 0.0);
    }
    Ok(z)
}

/// Monic characteristic polynomial of a Hermitian matrix, stored by
/// ascending power of the dummy variable.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPolynomial {
    coeffs: Vec<f64>,
}

impl CharPolynomial {
    /// Faddeev-LeVerrier trace recursion with norm prescaling. The input
    /// must be Hermitian; imaginary residue in the coefficients is rounding
    /// noise and is dropped.
    pub fn of(z: &DMatrix<Complex64>) -> Self {
        let n = z.nrows();
        assert_eq!(n, z.ncols(), "characteristic polynomial of a square matrix");
        let norm = z
            .row_iter()
            .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
            .fold(1.0_f64, f64::max);
        let scaled = z.map(|v| v / Complex64::new(norm, 0.0));

        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        let mut m = DMatrix::<Complex64>::identity(n, n);
        for k in 1..=n {
            let am = &scaled * &m;
            let c = -am.trace() / Complex64::new(k as f64, 0.0);
            coeffs[n - k] = c;
            m = am;
            for i in 0..n {
                m[(i, i)] += c;
            }
        }
        let coeffs = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.re * norm.powi((n - i) as i32))
            .collect();
        Self { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    /// Values p^(q)(z) for q = 0..=degree, via repeated synthetic division.
    pub fn derivative_values(&self, z: f64) -> Vec<f64> {
        let deg = self.degree();
        let mut work = self.coeffs.clone();
        let mut vals = Vec::with_capacity(deg + 1);
        for q in 0..=deg {
            // One Horner pass: remainder is the Taylor coefficient of order q.
            let d = work.len() - 1;
            if d == 0 {
                vals.push(work[0] * factorial(q));
                break;
            }
            let mut quot = vec![0.0; d];
            quot[d - 1] = work[d];
            for i in (1..d).rev() {
                quot[i - 1] = work[i] + z * quot[i];
            }
            let rem = work[0] + z * quot[0];
            vals.push(rem * factorial(q));
            work = quot;
        }
        vals
    }

    /// Minimum of p^(q)(z) over 0 <= q <= degree - 1. The order-(deg-1)
    /// derivative is linear (deg! z on traceless input) and the top one a
    /// positive constant, so only the constant is skipped.
    pub fn min_derivative_value(&self, z: f64) -> f64 {
        let deg = self.degree();
        let vals = self.derivative_values(z);
        vals[..=deg.saturating_sub(1)]
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// True iff z exceeds the largest real root: every derivative value up
    /// to order degree - 2 is strictly positive.
    pub fn is_upper_bound(&self, z: f64) -> bool {
        self.min_derivative_value(z) > 0.0
    }

    /// Largest real root of a Hermitian characteristic polynomial by
    /// bisection on the upper-bound predicate.
    pub fn largest_root(&self, tol: f64) -> f64 {
        let radius = 1.0 + self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let mut lo = -radius;
        let mut hi = radius;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.is_upper_bound(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Characteristic polynomial of the operator of `f` at `angles`.
pub fn char_poly(f: &TsirelsonFunctional, angles: &MeasurementAngles) -> Result<CharPolynomial> {
    Ok(CharPolynomial::of(&build_operator(f, angles)?))
}

/// Search controls for [`tsirelson_bound`] and [`eigen_oracle`].
#[derive(Debug, Clone, Copy)]
pub struct BoundOptions {
    /// Outer bisection tolerance on the bound.
    pub tol: f64,
    /// Grid points per measurement angle.
    pub grid: usize,
    /// Iteration cap for the outer bisection.
    pub max_iter: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            grid: 97,
            max_iter: 200,
        }
    }
}

impl BoundOptions {
    /// Coarser grid for quick sweeps; bound accuracy follows `tol` as long
    /// as the grid still locates the adversarial basin.
    pub fn with_grid(grid: usize) -> Self {
        Self {
            grid,
            ..Self::default()
        }
    }
}

/// Iterate a k-dimensional angle grid as flat indices.
struct AngleIter {
    dims: usize,
    per_axis: usize,
    idx: usize,
    total: usize,
}

impl AngleIter {
    fn new(dims: usize, per_axis: usize) -> Self {
        Self {
            dims,
            per_axis,
            idx: 0,
            total: per_axis.pow(dims as u32),
        }
    }
}

impl Iterator for AngleIter {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.idx >= self.total {
            return None;
        }
        let mut rem = self.idx;
        let step = FRAC_PI_2 / (self.per_axis - 1) as f64;
        let mut angles = Vec::with_capacity(self.dims);
        for _ in 0..self.dims {
            angles.push((rem % self.per_axis) as f64 * step);
            rem /= self.per_axis;
        }
        self.idx += 1;
        Some(angles)
    }
}

/// Coordinate-wise golden-section descent of `f` around `start` within
/// radius `h` per axis, clamped to [0, pi/2]. Two sweeps suffice here.
fn refine_angles<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    h: f64,
    sweeps: usize,
) -> (Vec<f64>, f64) {
    let mut best = start.to_vec();
    let mut best_val = f(&best);
    for _ in 0..sweeps {
        for dim in 0..best.len() {
            let lo = (best[dim] - h).max(0.0);
            let hi = (best[dim] + h).min(FRAC_PI_2);
            let (t, v) = golden_min(
                |x| {
                    let mut candidate = best.clone();
                    candidate[dim] = x;
                    f(&candidate)
                },
                lo,
                hi,
                1e-9,
            );
            if v < best_val {
                best_val = v;
                best[dim] = t;
            }
        }
    }
    (best, best_val)
}

/// Strictness slack for the positivity conditions inside the bisection; the
/// infimum is approached from above.
const DERIV_TOL: f64 = 1e-12;

/// Quantum maximum of the functional by the characteristic-polynomial
/// method: bisection on z against "all derivative values positive for every
/// angle", with an adversarial grid + golden-section angle search inside.
pub fn tsirelson_bound(f: &TsirelsonFunctional, opts: &BoundOptions) -> Result<f64> {
    let f = if f.weighted.is_empty() {
        f.clone()
    } else {
        return Err(Error::Invalid(
            "bind the sweep weight before bounding".into(),
        ));
    };
    let k = f.parties;
    let per_axis = opts.grid.max(3);
    let grid_step = FRAC_PI_2 / (per_axis - 1) as f64;

    // The polynomial coefficients depend only on the angles, so the whole
    // grid is assembled once and reused across bisection steps.
    let grid: Vec<(Vec<f64>, CharPolynomial)> = AngleIter::new(k, per_axis)
        .map(|angles| {
            let poly = char_poly(&f, &MeasurementAngles(angles.clone()))?;
            Ok((angles, poly))
        })
        .collect::<Result<_>>()?;

    let adversarial = |z: f64| -> f64 {
        // Worst (smallest) derivative value over the grid, then local
        // refinement in continuous angles around the few worst points.
        let mut ranked: Vec<(f64, usize)> = grid
            .iter()
            .enumerate()
            .map(|(i, (_, poly))| (poly.min_derivative_value(z), i))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut worst = ranked[0].0;
        for &(_, i) in ranked.iter().take(3) {
            let (_, v) = refine_angles(
                |angles| match char_poly(&f, &MeasurementAngles(angles.to_vec())) {
                    Ok(p) => p.min_derivative_value(z),
                    Err(_) => f64::INFINITY,
                },
                &grid[i].0,
                grid_step,
                2,
            );
            worst = worst.min(v);
        }
        worst
    };

    let mut lo = 0.0;
    let mut hi = f.coeff_bound() + 1.0;
    let mut iterations = 0;
    while hi - lo > opts.tol {
        iterations += 1;
        if iterations > opts.max_iter {
            return Err(Error::NonConvergence {
                context: "tsirelson_bound bisection",
                iterations,
            });
        }
        let mid = 0.5 * (lo + hi);
        if adversarial(mid) > -DERIV_TOL {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn lambda_max(z: &DMatrix<Complex64>) -> f64 {
    z.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
}

/// Direct maximization of the largest eigenvalue over the same angle
/// domain; independent of the polynomial path.
pub fn eigen_oracle(f: &TsirelsonFunctional, opts: &BoundOptions) -> Result<f64> {
    if !f.weighted.is_empty() {
        return Err(Error::Invalid(
            "bind the sweep weight before bounding".into(),
        ));
    }
    let k = f.parties;
    let per_axis = opts.grid.max(3);
    let grid_step = FRAC_PI_2 / (per_axis - 1) as f64;

    let mut best_angles = vec![0.0; k];
    let mut best = f64::NEG_INFINITY;
    for angles in AngleIter::new(k, per_axis) {
        let v = lambda_max(&build_operator(f, &MeasurementAngles(angles.clone()))?);
        if v > best {
            best = v;
            best_angles = angles;
        }
    }
    let (_, neg) = refine_angles(
        |angles| match build_operator(f, &MeasurementAngles(angles.to_vec())) {
            Ok(z) => -lambda_max(&z),
            Err(_) => f64::INFINITY,
        },
        &best_angles,
        grid_step,
        3,
    );
    Ok(best.max(-neg))
}

/// Classical (deterministic hidden variable) maximum: exhaustive over the
/// 4^k deterministic outcome assignments.
pub fn lhvm_max(f: &TsirelsonFunctional) -> Result<f64> {
    if !f.weighted.is_empty() {
        return Err(Error::Invalid(
            "bind the sweep weight before bounding".into(),
        ));
    }
    let k = f.parties;
    let mut best = f64::NEG_INFINITY;
    // Each party picks (a_0, a_1) in {-1,+1}^2: 2 bits per party.
    for assignment in 0..(1usize << (2 * k)) {
        let sign = |party: u8, setting: u8| -> f64 {
            let bit = (assignment >> (2 * party as usize + setting as usize)) & 1;
            if bit == 1 {
                1.0
            } else {
                -1.0
            }
        };
        let mut acc = 0.0;
        for (key, c) in f.terms() {
            let prod: f64 = key.iter().map(|&(p, s)| sign(p, s)).product();
            acc += c * prod;
        }
        best = best.max(acc);
    }
    Ok(best)
}

/// No-signalling maximum for bipartite functionals: exhaustive over the 16
/// deterministic vertices and the 8 PR-box vertices.
pub fn nosig_max(f: &TsirelsonFunctional) -> Result<f64> {
    if f.parties != 2 {
        return Err(Error::Invalid(
            "no-signalling maximum implemented for the bipartite polytope".into(),
        ));
    }
    let mut best = lhvm_max(f)?;
    // PR family: correlators (-1)^(xy + ax + by + g), zero marginals.
    for alpha in 0..2u8 {
        for beta in 0..2u8 {
            for g in 0..2u8 {
                let mut c = [[0.0; 2]; 2];
                for x in 0..2u8 {
                    for y in 0..2u8 {
                        let e = (x & y) ^ (alpha & x) ^ (beta & y) ^ g;
                        c[x as usize][y as usize] = if e == 0 { 1.0 } else { -1.0 };
                    }
                }
                let b = Behavior222::new(0.0, 0.0, 0.0, 0.0, c[0][0], c[1][0], c[0][1], c[1][1]);
                best = best.max(f.evaluate(&b)?);
            }
        }
    }
    Ok(best)
}

/// The three function-valued rows of the linear-bounds table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFamily {
    Qb1,
    Qb2,
    Qb3,
}

impl TableFamily {
    /// The functional of this row at sweep weight x.
    pub fn functional(&self, x: f64) -> TsirelsonFunctional {
        match self {
            TableFamily::Qb1 => TsirelsonFunctional::qb1(x),
            TableFamily::Qb2 => TsirelsonFunctional::qb2(x),
            TableFamily::Qb3 => TsirelsonFunctional::qb3(x),
        }
    }
}

/// Which bound column of the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundClass {
    Lhvm,
    Quantum,
    NoSig,
}

/// Closed-form table bounds as tabulated; piecewise in the weight x.
pub fn table_bound(family: TableFamily, class: BoundClass, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::OutOfRange {
            what: "table weight x",
            value: x,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        });
    }
    let ax = x.abs();
    Ok(match (family, class) {
        (TableFamily::Qb1, BoundClass::Lhvm) => (x + 1.0).abs() + 2.0,
        (TableFamily::Qb1, BoundClass::Quantum) => {
            if x >= -1.0 / 3.0 {
                x + 3.0
            } else {
                ((x - 1.0).powi(3) / x).sqrt()
            }
        }
        (TableFamily::Qb1, BoundClass::NoSig) => ax + 3.0,
        (TableFamily::Qb2, BoundClass::Lhvm) => ax + 2.0,
        (TableFamily::Qb2, BoundClass::Quantum) => {
            if ax >= 2.0 {
                ax + 2.0
            } else {
                (2.0 * x * x + 8.0).sqrt()
            }
        }
        (TableFamily::Qb2, BoundClass::NoSig) => {
            if ax >= 2.0 {
                ax + 2.0
            } else {
                4.0
            }
        }
        (TableFamily::Qb3, BoundClass::Lhvm) => {
            if ax >= 2.0 {
                3.0 * ax - 2.0
            } else {
                ax + 2.0
            }
        }
        (TableFamily::Qb3, BoundClass::Quantum) => {
            if ax >= 2.0 {
                3.0 * ax - 2.0
            } else if ax >= 1.0 {
                ax + 2.0
            } else {
                let eps = x * x - 1.0;
                if eps.abs() < 1e-6 {
                    // One-sided expansion at the removable singularity.
                    3.0 + 0.5 * eps
                } else {
                    (x * x - ((2.0 - x * x) * (4.0 - 3.0 * x * x)).sqrt()) / eps
                }
            }
        }
        (TableFamily::Qb3, BoundClass::NoSig) => {
            if ax >= 2.0 {
                3.0 * ax - 2.0
            } else {
                4.0
            }
        }
    })
}
