//! Small shared numerics: combinatorics, 1-D searches, seeding, and an
//! adaptive Runge-Kutta integrator.

/// Exact binomial coefficient as f64. Exact through u128 for every argument
/// used in this crate (n <= 80).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    (num / den) as f64
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// n! as f64, exact for n <= 20 and correctly rounded beyond.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Golden-section minimization of a unimodal function on [a, b].
/// Returns (argmin, min).
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx <= fc && fx <= fd {
        (x, fx)
    } else if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection on a monotone predicate: `pred` must be false at `lo`, true at
/// `hi`, and monotone in between. Returns the threshold within `tol`,
/// reported from the true side.
pub fn bisect_predicate<F: FnMut(f64) -> bool>(
    mut pred: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Bisection root find for a continuous function with f(lo) and f(hi) of
/// opposite sign. Returns the midpoint of the final bracket.
pub fn bisect_root<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if (flo <= 0.0) == (fmid <= 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// SplitMix64 step; the standard way to expand one 64-bit seed into many.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a base seed and a salt tuple.
/// Used to keep parallel work deterministic regardless of scheduling.
pub fn derive_seed(base: u64, salts: &[u64]) -> u64 {
    let mut state = base ^ 0x6a09_e667_f3bc_c909;
    let mut out = splitmix64(&mut state);
    for &s in salts {
        state ^= s.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        out = splitmix64(&mut state);
    }
    out
}

/// Composite Simpson quadrature with n (even) panels.
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n.is_multiple_of(2) { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Dormand-Prince 5(4) adaptive step integrator for dy/dt = f(t, y).
///
/// Integrates from `t0` to `t1` and returns y(t1). Step size adapts to the
/// max-norm local error estimate against `atol + rtol * |y|`.
pub fn rk45<F>(mut f: F, y0: &[f64], t0: f64, t1: f64, rtol: f64, atol: f64) -> Vec<f64>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    // Dormand-Prince coefficients.
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    // 5th-order weights equal the last row of A; 4th-order weights below.
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let span = t1 - t0;
    if span <= 0.0 {
        return y;
    }
    let mut h = (span / 64.0).clamp(1e-12, 0.1);
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut scratch = vec![0.0; dim];

    let max_steps = 2_000_000;
    for _ in 0..max_steps {
        if t >= t1 {
            return y;
        }
        if t + h > t1 {
            h = t1 - t;
        }
        k[0] = f(t, &y);
        for stage in 0..6 {
            for (d, s) in scratch.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    acc += A[stage][j] * kj[d];
                }
                *s = y[d] + h * acc;
            }
            k[stage + 1] = f(t + C[stage] * h, &scratch);
        }
        // 5th-order solution and embedded error estimate.
        let mut err: f64 = 0.0;
        for d in 0..dim {
            let y5 = y[d]
                + h * (A[5][0] * k[0][d]
                    + A[5][2] * k[2][d]
                    + A[5][3] * k[3][d]
                    + A[5][4] * k[4][d]
                    + A[5][5] * k[5][d]);
            let y4 = y[d]
                + h * (B4[0] * k[0][d]
                    + B4[2] * k[2][d]
                    + B4[3] * k[3][d]
                    + B4[4] * k[4][d]
                    + B4[5] * k[5][d]
                    + B4[6] * k[6][d]);
            let scale = atol + rtol * y5.abs().max(y[d].abs());
            err = err.max(((y5 - y4) / scale).abs());
            scratch[d] = y5;
        }
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&scratch);
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        h = h.max(1e-14 * span);
    }
    y
}
