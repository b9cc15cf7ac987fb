//! (2,2,2) correlation points, expectation/probability conversions, and the
//! named boxes and parametric slices used by every bound criterion.
//!
//! Outcome labels {0,1} map to eigenvalues {-1,+1}: label 1 is the +1
//! outcome. Expectation coordinates are the canonical representation;
//! probability tables are derived views.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance for normalization and no-signalling checks on tables;
/// accumulated rounding in convex mixtures stays well below this.
pub const TABLE_TOL: f64 = 1e-12;

/// A (2,2,2) behavior in expectation coordinates: four marginals and four
/// correlators `c_xy` = <A_x B_y>.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Behavior222 {
    #[serde(rename = "mA0")]
    pub m_a0: f64,
    #[serde(rename = "mA1")]
    pub m_a1: f64,
    #[serde(rename = "mB0")]
    pub m_b0: f64,
    #[serde(rename = "mB1")]
    pub m_b1: f64,
    pub c00: f64,
    pub c10: f64,
    pub c01: f64,
    pub c11: f64,
}

impl Behavior222 {
    pub fn new(
        m_a0: f64,
        m_a1: f64,
        m_b0: f64,
        m_b1: f64,
        c00: f64,
        c10: f64,
        c01: f64,
        c11: f64,
    ) -> Self {
        Self {
            m_a0,
            m_a1,
            m_b0,
            m_b1,
            c00,
            c10,
            c01,
            c11,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn marginal_a(&self, x: usize) -> f64 {
        if x == 0 {
            self.m_a0
        } else {
            self.m_a1
        }
    }

    pub fn marginal_b(&self, y: usize) -> f64 {
        if y == 0 {
            self.m_b0
        } else {
            self.m_b1
        }
    }

    /// <A_x B_y>.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        match (x, y) {
            (0, 0) => self.c00,
            (1, 0) => self.c10,
            (0, 1) => self.c01,
            _ => self.c11,
        }
    }

    /// Fields in the CSV column order (mA0,mA1,mB0,mB1,c00,c10,c01,c11).
    pub fn as_row(&self) -> [f64; 8] {
        [
            self.m_a0, self.m_a1, self.m_b0, self.m_b1, self.c00, self.c10, self.c01, self.c11,
        ]
    }

    /// All fields in [-1, 1] and all sixteen derived probabilities in [0, 1].
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("mA0", self.m_a0),
            ("mA1", self.m_a1),
            ("mB0", self.m_b0),
            ("mB1", self.m_b1),
            ("c00", self.c00),
            ("c10", self.c10),
            ("c01", self.c01),
            ("c11", self.c11),
        ] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    what,
                    value: v,
                    lo: -1.0,
                    hi: 1.0,
                });
            }
        }
        for x in 0..2u8 {
            for y in 0..2u8 {
                for a in 0..2u8 {
                    for b in 0..2u8 {
                        let p = self.probability(a, b, x, y);
                        if !(-TABLE_TOL..=1.0 + TABLE_TOL).contains(&p) {
                            return Err(Error::NegativeProbability { a, b, x, y, p });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// P(ab|xy) = (1 + a*<A_x> + b*<B_y> + ab*<A_x B_y>)/4 with the +-1
    /// values of the outcome labels.
    pub fn probability(&self, a: u8, b: u8, x: u8, y: u8) -> f64 {
        let sa = if a == 1 { 1.0 } else { -1.0 };
        let sb = if b == 1 { 1.0 } else { -1.0 };
        let (x, y) = (x as usize, y as usize);
        0.25 * (1.0
            + sa * self.marginal_a(x)
            + sb * self.marginal_b(y)
            + sa * sb * self.correlator(x, y))
    }

    /// The CHSH combination c00 + c10 + c01 - c11.
    pub fn chsh_value(&self) -> f64 {
        self.c00 + self.c10 + self.c01 - self.c11
    }

    /// Convex mixture of two behaviors (affine coordinates make this exact).
    pub fn mix(&self, other: &Self, weight_other: f64) -> Self {
        let w = weight_other;
        let u = 1.0 - w;
        let a = self.as_row();
        let b = other.as_row();
        Self::new(
            u * a[0] + w * b[0],
            u * a[1] + w * b[1],
            u * a[2] + w * b[2],
            u * a[3] + w * b[3],
            u * a[4] + w * b[4],
            u * a[5] + w * b[5],
            u * a[6] + w * b[6],
            u * a[7] + w * b[7],
        )
    }
}

/// Full conditional probability table P(ab|xy), indexed `[x][y][a][b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbTable222 {
    p: [[[[f64; 2]; 2]; 2]; 2],
}

impl ProbTable222 {
    pub fn from_fn(f: impl Fn(u8, u8, u8, u8) -> f64) -> Self {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        p[x][y][a][b] = f(a as u8, b as u8, x as u8, y as u8);
                    }
                }
            }
        }
        Self { p }
    }

    pub fn get(&self, a: u8, b: u8, x: u8, y: u8) -> f64 {
        self.p[x as usize][y as usize][a as usize][b as usize]
    }

    /// Nonnegativity, normalization per setting pair, and no-signalling of
    /// both marginals, all within [`TABLE_TOL`].
    pub fn validate(&self) -> Result<()> {
        for x in 0..2u8 {
            for y in 0..2u8 {
                let mut sum = 0.0;
                for a in 0..2u8 {
                    for b in 0..2u8 {
                        let v = self.get(a, b, x, y);
                        if v < -TABLE_TOL {
                            return Err(Error::InvalidTable(format!(
                                "P({a}{b}|{x}{y}) = {v} negative"
                            )));
                        }
                        sum += v;
                    }
                }
                if (sum - 1.0).abs() > TABLE_TOL {
                    return Err(Error::InvalidTable(format!(
                        "normalization at (x,y)=({x},{y}) is {sum}"
                    )));
                }
            }
        }
        for a in 0..2u8 {
            for x in 0..2u8 {
                let m0 = self.get(a, 0, x, 0) + self.get(a, 1, x, 0);
                let m1 = self.get(a, 0, x, 1) + self.get(a, 1, x, 1);
                if (m0 - m1).abs() > TABLE_TOL {
                    return Err(Error::InvalidTable(format!(
                        "Alice marginal P({a}|{x}) depends on y: {m0} vs {m1}"
                    )));
                }
            }
        }
        for b in 0..2u8 {
            for y in 0..2u8 {
                let m0 = self.get(0, b, 0, y) + self.get(1, b, 0, y);
                let m1 = self.get(0, b, 1, y) + self.get(1, b, 1, y);
                if (m0 - m1).abs() > TABLE_TOL {
                    return Err(Error::InvalidTable(format!(
                        "Bob marginal P({b}|{y}) depends on x: {m0} vs {m1}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Expectation coordinates of a valid table.
    pub fn to_behavior(&self) -> Behavior222 {
        let sign = |o: u8| if o == 1 { 1.0 } else { -1.0 };
        let mut m_a = [0.0; 2];
        let mut m_b = [0.0; 2];
        let mut c = [[0.0; 2]; 2];
        for x in 0..2u8 {
            for y in 0..2u8 {
                for a in 0..2u8 {
                    for b in 0..2u8 {
                        let p = self.get(a, b, x, y);
                        if y == 0 {
                            m_a[x as usize] += sign(a) * p;
                        }
                        if x == 0 {
                            m_b[y as usize] += sign(b) * p;
                        }
                        c[x as usize][y as usize] += sign(a) * sign(b) * p;
                    }
                }
            }
        }
        Behavior222::new(
            m_a[0], m_a[1], m_b[0], m_b[1], c[0][0], c[1][0], c[0][1], c[1][1],
        )
    }
}

/// Expectation -> probability conversion. Fails when a derived probability
/// leaves [0, 1], i.e. the point is outside the no-signalling polytope.
pub fn to_probabilities(b: &Behavior222) -> Result<ProbTable222> {
    b.validate()?;
    Ok(ProbTable222::from_fn(|a, bb, x, y| {
        b.probability(a, bb, x, y)
    }))
}

/// The PR box: P(ab|xy) = 1/2 when a XOR b = x AND y, else 0.
pub fn pr_box() -> ProbTable222 {
    ProbTable222::from_fn(|a, b, x, y| if a ^ b == x & y { 0.5 } else { 0.0 })
}

/// Measurement-invariant local box with Alice bias `m` and Bob bias `n`
/// (probability of outcome 1, independent of settings).
pub fn invariant_local_box(m: f64, n: f64) -> Result<ProbTable222> {
    for (what, v) in [("m", m), ("n", n)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                what,
                value: v,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    Ok(ProbTable222::from_fn(|a, b, _, _| {
        let pa = if a == 1 { m } else { 1.0 - m };
        let pb = if b == 1 { n } else { 1.0 - n };
        pa * pb
    }))
}

/// The all-one fully deterministic box.
pub fn all_one_box() -> ProbTable222 {
    invariant_local_box(1.0, 1.0).unwrap()
}

/// Alice deterministic-one, Bob unbiased coin.
pub fn bob_random_box() -> ProbTable222 {
    invariant_local_box(1.0, 0.5).unwrap()
}

/// White noise: every entry 1/4.
pub fn white_noise() -> ProbTable222 {
    invariant_local_box(0.5, 0.5).unwrap()
}

/// Local deterministic box with outcome assignments a(x), b(y) given as
/// labels in {0,1}.
pub fn deterministic_box(a0: u8, a1: u8, b0: u8, b1: u8) -> ProbTable222 {
    ProbTable222::from_fn(|a, b, x, y| {
        let ax = if x == 0 { a0 } else { a1 };
        let by = if y == 0 { b0 } else { b1 };
        if a == ax && b == by {
            1.0
        } else {
            0.0
        }
    })
}

/// Which two-parameter slice of the no-signalling polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceKind {
    /// PR box + all-one deterministic box + white noise; parameter gamma.
    GammaSlice,
    /// PR box + Bob-random box + white noise; parameter beta.
    BetaSlice,
}

/// A point on one of the two slices: `param` is gamma or beta, `xi` the PR
/// weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub kind: SliceKind,
    pub param: f64,
    pub xi: f64,
}

impl SliceSpec {
    pub fn new(kind: SliceKind, param: f64, xi: f64) -> Result<Self> {
        let s = Self { kind, param, xi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.param) {
            return Err(Error::OutOfRange {
                what: "slice param",
                value: self.param,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if self.xi < 0.0 {
            return Err(Error::OutOfRange {
                what: "xi",
                value: self.xi,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if self.xi + self.param > 1.0 + TABLE_TOL {
            return Err(Error::Invalid(format!(
                "xi + param = {} exceeds 1 (normalization bound)",
                self.xi + self.param
            )));
        }
        Ok(())
    }
}

/// Expectation coordinates of a slice point.
///
/// GammaSlice: all marginals gamma, correlators (g+xi, g+xi, g+xi, g-xi).
/// BetaSlice: Alice marginals beta, Bob marginals 0, correlators
/// (xi, xi, xi, -xi).
pub fn slice_behavior(s: &SliceSpec) -> Result<Behavior222> {
    s.validate()?;
    Ok(match s.kind {
        SliceKind::GammaSlice => {
            let g = s.param;
            Behavior222::new(g, g, g, g, g + s.xi, g + s.xi, g + s.xi, g - s.xi)
        }
        SliceKind::BetaSlice => {
            let b = s.param;
            Behavior222::new(b, b, 0.0, 0.0, s.xi, s.xi, s.xi, -s.xi)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pr_box_matches_definition() {
        let pr = pr_box();
        assert_eq!(pr.get(1, 1, 0, 0), 0.5);
        assert_eq!(pr.get(1, 0, 0, 0), 0.0);
        pr.validate().unwrap();
        let b = pr.to_behavior();
        assert_eq!(b.as_row(), [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0]);
        assert_eq!(b.chsh_value(), 4.0);
    }

    #[test]
    fn invariant_local_special_cases() {
        let one = all_one_box();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(one.get(1, 1, x, y), 1.0);
            }
        }
        let sd = bob_random_box();
        assert_eq!(sd.get(1, 0, 0, 1), 0.5);
        assert_eq!(sd.get(1, 1, 1, 0), 0.5);
        assert_eq!(sd.get(0, 0, 0, 0), 0.0);
        let noise = white_noise();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        assert_eq!(noise.get(a, b, x, y), 0.25);
                    }
                }
            }
        }
        assert!(invariant_local_box(1.2, 0.5).is_err());
        assert!(invariant_local_box(0.5, -0.1).is_err());
    }

    #[test]
    fn slice_points() {
        let origin = slice_behavior(&SliceSpec::new(SliceKind::GammaSlice, 0.0, 0.0).unwrap());
        assert_eq!(origin.unwrap(), Behavior222::zero());

        let pr = slice_behavior(&SliceSpec::new(SliceKind::GammaSlice, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(pr.as_row(), [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0]);

        let b = slice_behavior(&SliceSpec::new(SliceKind::BetaSlice, 0.3, 0.2).unwrap()).unwrap();
        assert_eq!(b.as_row(), [0.3, 0.3, 0.0, 0.0, 0.2, 0.2, 0.2, -0.2]);

        assert!(SliceSpec::new(SliceKind::GammaSlice, 0.7, 0.4).is_err());
        assert!(SliceSpec::new(SliceKind::BetaSlice, -0.1, 0.0).is_err());
    }

    #[test]
    fn slice_tables_satisfy_no_signalling() {
        for &kind in &[SliceKind::GammaSlice, SliceKind::BetaSlice] {
            for i in 0..=10 {
                let param = i as f64 / 10.0;
                let xi = (1.0 - param) * 0.99;
                let b = slice_behavior(&SliceSpec::new(kind, param, xi).unwrap()).unwrap();
                to_probabilities(&b).unwrap().validate().unwrap();
            }
        }
    }

    #[test]
    fn conversion_round_trip_and_errors() {
        let noise = white_noise().to_behavior();
        let t = to_probabilities(&noise).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        assert_eq!(t.get(a, b, x, y), 0.25);
                    }
                }
            }
        }

        let pr_b = pr_box().to_behavior();
        let back = to_probabilities(&pr_b).unwrap();
        assert_eq!(back, pr_box());

        let bad = Behavior222::new(0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0);
        assert!(to_probabilities(&bad).is_err());

        // In range fields, but the joint point is outside the polytope.
        let outside = Behavior222::new(1.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            to_probabilities(&outside),
            Err(Error::NegativeProbability { .. })
        ));
    }

    #[test]
    fn chsh_values() {
        assert_eq!(white_noise().to_behavior().chsh_value(), 0.0);
        assert_eq!(all_one_box().to_behavior().chsh_value(), 2.0);
    }

    #[test]
    fn behavior_json_field_names() {
        let b = Behavior222::new(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8);
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(
            text,
            r#"{"mA0":0.1,"mA1":0.2,"mB0":0.3,"mB1":0.4,"c00":0.5,"c10":0.6,"c01":0.7,"c11":0.8}"#
        );
        let back: Behavior222 = serde_json::from_str(&text).unwrap();
        assert_eq!(back, b);
    }
}
