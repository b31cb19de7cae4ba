//! Integer 2x2 matrices of determinant one, the theta group, its multiplier
//! system and the coset words used to parametrize the Kloosterman moduli.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use thiserror::Error;

use crate::arith::{epsilon, gcd, kronecker};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModGroupError {
    #[error("matrix [{a} {b}; {c} {d}] does not have determinant 1")]
    BadDeterminant { a: i64, b: i64, c: i64, d: i64 },
    #[error("{0} is not an element of the theta group")]
    NotInGroup(Mat2Z),
    #[error("weight 2k = {0} must be odd")]
    EvenWeight(i32),
}

/// An exact eighth root of unity e(k/8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EighthRoot(u8);

impl EighthRoot {
    pub const ONE: EighthRoot = EighthRoot(0);
    pub const I: EighthRoot = EighthRoot(2);
    pub const MINUS_ONE: EighthRoot = EighthRoot(4);
    pub const MINUS_I: EighthRoot = EighthRoot(6);

    pub fn from_exponent(k: i64) -> Self {
        EighthRoot(k.rem_euclid(8) as u8)
    }

    pub fn from_sign(s: i32) -> Self {
        if s < 0 {
            Self::MINUS_ONE
        } else {
            Self::ONE
        }
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn pow(self, n: i64) -> Self {
        Self::from_exponent(self.0 as i64 * n)
    }

    pub fn inv(self) -> Self {
        Self::from_exponent(-(self.0 as i64))
    }

    pub fn to_complex(self) -> Complex64 {
        let h = FRAC_1_SQRT_2;
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(h, h),
            2 => Complex64::new(0.0, 1.0),
            3 => Complex64::new(-h, h),
            4 => Complex64::new(-1.0, 0.0),
            5 => Complex64::new(-h, -h),
            6 => Complex64::new(0.0, -1.0),
            _ => Complex64::new(h, -h),
        }
    }
}

impl Mul for EighthRoot {
    type Output = EighthRoot;
    fn mul(self, o: EighthRoot) -> EighthRoot {
        EighthRoot((self.0 + o.0) % 8)
    }
}

impl fmt::Display for EighthRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({}/8)", self.0)
    }
}

/// A matrix [a b; c d] with ad - bc = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2Z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl fmt::Display for Mat2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}; {} {}]", self.a, self.b, self.c, self.d)
    }
}

impl Mat2Z {
    pub const IDENTITY: Mat2Z = Mat2Z { a: 1, b: 0, c: 0, d: 1 };
    pub const S: Mat2Z = Mat2Z { a: 0, b: -1, c: 1, d: 0 };
    pub const T: Mat2Z = Mat2Z { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, ModGroupError> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(ModGroupError::BadDeterminant { a, b, c, d });
        }
        Ok(Mat2Z { a, b, c, d })
    }

    /// T^n.
    pub fn translation(n: i64) -> Self {
        Mat2Z { a: 1, b: n, c: 0, d: 1 }
    }

    /// The generator A = T^2 of Gamma(2).
    pub fn gen_a() -> Self {
        Self::translation(2)
    }

    /// The generator B = S T^2 S of Gamma(2).
    pub fn gen_b() -> Self {
        Self::S * Self::translation(2) * Self::S
    }

    pub fn neg(self) -> Self {
        Mat2Z { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn inverse(self) -> Self {
        Mat2Z { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn pow(self, n: i64) -> Self {
        let mut base = if n < 0 { self.inverse() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Representative of +-self with c > 0, or c = 0 and d > 0.
    pub fn normalized(self) -> Self {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn act(self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / (tau * self.c as f64 + self.d as f64)
    }

    /// The automorphy factor c tau + d.
    pub fn j(self, tau: Complex64) -> Complex64 {
        tau * self.c as f64 + self.d as f64
    }

    pub fn mod2(self) -> [u8; 4] {
        [self.a, self.b, self.c, self.d].map(|x| x.rem_euclid(2) as u8)
    }
}

impl Mul for Mat2Z {
    type Output = Mat2Z;
    fn mul(self, o: Mat2Z) -> Mat2Z {
        Mat2Z {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    SL2Z,
    /// Matrices congruent to I or S modulo 2.
    GammaTheta,
    /// The principal congruence subgroup of level 2.
    Gamma2,
    /// Gamma_0(N).
    Gamma0(u64),
}

pub fn membership(g: Mat2Z, group: Group) -> bool {
    match group {
        Group::SL2Z => true,
        Group::Gamma2 => g.mod2() == [1, 0, 0, 1],
        Group::GammaTheta => {
            let m = g.mod2();
            m == [1, 0, 0, 1] || m == [0, 1, 1, 0]
        }
        Group::Gamma0(n) => n != 0 && g.c.rem_euclid(n as i64) == 0,
    }
}

/// The multiplier system of Theta(tau) = sum e^{pi i n^2 tau} on the theta
/// group, so that Theta(g tau) = nu(g) (c tau + d)^{1/2} Theta(tau).
pub fn nu_theta(g: Mat2Z) -> Result<EighthRoot, ModGroupError> {
    if !membership(g, Group::GammaTheta) {
        return Err(ModGroupError::NotInGroup(g));
    }
    let Mat2Z { c, d, .. } = g;
    if c == 0 {
        return Ok(if d == 1 { EighthRoot::ONE } else { EighthRoot::MINUS_I });
    }
    if c < 0 {
        return Ok(EighthRoot::I * nu_theta(g.neg())?);
    }
    let root = if c % 2 == 0 {
        epsilon(d).expect("d is odd").inv() * EighthRoot::from_sign(kronecker(2 * c, d))
    } else {
        EighthRoot::from_exponent(-1)
            * epsilon(c).expect("c is odd")
            * EighthRoot::from_sign(kronecker(2 * d, c))
    };
    Ok(root)
}

/// Principal branch z^{k2/2} with arg z in (-pi, pi].
pub fn principal_power(z: Complex64, k2: i32) -> Complex64 {
    let mut arg = z.im.atan2(z.re);
    if arg <= -PI {
        arg += 2.0 * PI;
    }
    if z.im == 0.0 && z.re < 0.0 {
        arg = PI;
    }
    let k = k2 as f64 / 2.0;
    Complex64::from_polar(z.norm().powf(k), k * arg)
}

/// The weight-k cocycle j(g2,tau)^k j(g1,g2 tau)^k j(g1 g2,tau)^{-k}.
pub fn cocycle_w(k2: i32, g1: Mat2Z, g2: Mat2Z, tau: Complex64) -> Complex64 {
    let t2 = g2.act(tau);
    principal_power(g2.j(tau), k2) * principal_power(g1.j(t2), k2)
        / principal_power((g1 * g2).j(tau), k2)
}

/// A reduced word B^{f1} A^{e1} ... B^{fm} A^{em} in the generators of
/// Gamma(2); every exponent is nonzero except possibly the last.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CosetWord {
    pub blocks: Vec<(i64, i64)>,
    pub tilde: bool,
}

impl CosetWord {
    pub fn evaluate(&self) -> Mat2Z {
        let (a, b) = (Mat2Z::gen_a(), Mat2Z::gen_b());
        let mut m = self
            .blocks
            .iter()
            .fold(Mat2Z::IDENTITY, |acc, &(f, e)| acc * b.pow(f) * a.pow(e));
        if self.tilde {
            m = m * Mat2Z::S;
        }
        m.normalized()
    }
}

impl fmt::Display for CosetWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(fb, ea) in &self.blocks {
            write!(f, "B^{fb}")?;
            if ea != 0 {
                write!(f, "A^{ea}")?;
            }
        }
        if self.tilde {
            write!(f, "S")?;
        }
        if self.blocks.is_empty() && !self.tilde {
            write!(f, "I")?;
        }
        Ok(())
    }
}

/// The words of the coset set ending in a B-block (one per orbit of right
/// multiplication by A) whose matrix has |c| <= max_c. Each bottom row
/// (c, d) has c even, d odd, gcd(c, d) = 1 and |d| < |c|; |c| grows
/// strictly with every appended block, which bounds the search.
pub fn enumerate_coset_b(max_c: u64) -> Vec<(CosetWord, Mat2Z)> {
    let max_c = max_c as i64;
    let (a, b) = (Mat2Z::gen_a(), Mat2Z::gen_b());
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    let mut f = 1i64;
    while 2 * f <= max_c {
        for s in [f, -f] {
            queue.push_back((vec![(s, 0i64)], b.pow(s).normalized()));
        }
        f += 1;
    }
    while let Some((blocks, m)) = queue.pop_front() {
        let (c, d) = (m.c, m.d);
        let mut e = 1i64;
        while 2 * (2 * e * c.abs() - d.abs()) - c.abs() <= max_c {
            for se in [e, -e] {
                let dp = d + 2 * se * c;
                let mut f = 1i64;
                while 2 * f * dp.abs() - c.abs() <= max_c {
                    for sf in [f, -f] {
                        let cn = c - 2 * sf * dp;
                        if cn.abs() <= max_c {
                            let mut nb = blocks.clone();
                            nb.last_mut().unwrap().1 = se;
                            nb.push((sf, 0));
                            let nm = (m * a.pow(se) * b.pow(sf)).normalized();
                            queue.push_back((nb, nm));
                        }
                    }
                    f += 1;
                }
            }
            e += 1;
        }
        out.push((CosetWord { blocks, tilde: false }, m));
    }
    out.sort_by_key(|(_, m)| (m.c, m.d));
    out
}

/// [S] together with the words of `enumerate_coset_b(max_c)` followed by S.
/// Bottom rows (c, d) have c odd, d even.
pub fn enumerate_coset_b_tilde(max_c: u64) -> Vec<(CosetWord, Mat2Z)> {
    let mut out = vec![(CosetWord { blocks: vec![], tilde: true }, Mat2Z::S)];
    for (w, m) in enumerate_coset_b(max_c) {
        let tw = CosetWord { blocks: w.blocks, tilde: true };
        out.push((tw, (m * Mat2Z::S).normalized()));
    }
    out.sort_by_key(|(_, m)| (m.c, m.d));
    out
}

/// Whether (c, d) can be a bottom row in SL2(Z).
pub fn is_primitive_pair(c: i64, d: i64) -> bool {
    gcd(c, d) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        assert_eq!(Mat2Z::gen_b().normalized(), Mat2Z::new(1, 0, -2, 1).unwrap().normalized());
        assert_eq!(Mat2Z::S * Mat2Z::S, Mat2Z::IDENTITY.neg());
        assert!(Mat2Z::new(1, 1, 1, 1).is_err());
    }

    #[test]
    fn nu_of_s_and_minus_identity() {
        assert_eq!(nu_theta(Mat2Z::S).unwrap(), EighthRoot::from_exponent(-1));
        assert_eq!(nu_theta(Mat2Z::IDENTITY.neg()).unwrap(), EighthRoot::MINUS_I);
        assert!(nu_theta(Mat2Z::T).is_err());
    }

    #[test]
    fn coset_small() {
        let words = enumerate_coset_b(2);
        let rows: Vec<_> = words.iter().map(|(_, m)| (m.c, m.d)).collect();
        assert_eq!(rows, vec![(2, -1), (2, 1)]);
    }
}
