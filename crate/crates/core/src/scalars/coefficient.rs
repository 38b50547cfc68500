use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact element of ℚ(i, √2):
/// `(re_rat + re_sqrt2·√2) + i·(im_rat + im_sqrt2·√2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    pub re_rat: BigRational,
    pub re_sqrt2: BigRational,
    pub im_rat: BigRational,
    pub im_sqrt2: BigRational,
}

// Gaussian rational, used for the p + q√2 decomposition.
#[derive(Clone)]
struct Gauss {
    re: BigRational,
    im: BigRational,
}

impl Gauss {
    fn add(&self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &Gauss) -> Gauss {
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn scale(&self, k: &BigRational) -> Gauss {
        Gauss { re: &self.re * k, im: &self.im * k }
    }
    fn inv(&self) -> Option<Gauss> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return None;
        }
        Some(Gauss { re: &self.re / &norm, im: -(&self.im / &norm) })
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Coefficient {
    pub fn new(
        re_rat: BigRational,
        re_sqrt2: BigRational,
        im_rat: BigRational,
        im_sqrt2: BigRational,
    ) -> Self {
        Coefficient { re_rat, re_sqrt2, im_rat, im_sqrt2 }
    }

    pub fn zero() -> Self {
        Coefficient::from_ratio(0, 1)
    }

    pub fn one() -> Self {
        Coefficient::from_ratio(1, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient::from_ratio(n, 1)
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Coefficient::from_rational(rat(n, d))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Coefficient {
            re_rat: r,
            re_sqrt2: BigRational::zero(),
            im_rat: BigRational::zero(),
            im_sqrt2: BigRational::zero(),
        }
    }

    /// `r·√2`.
    pub fn sqrt2_times(r: BigRational) -> Self {
        Coefficient {
            re_rat: BigRational::zero(),
            re_sqrt2: r,
            im_rat: BigRational::zero(),
            im_sqrt2: BigRational::zero(),
        }
    }

    pub fn sqrt2() -> Self {
        Coefficient::sqrt2_times(BigRational::one())
    }

    /// `1/√2 = √2/2`.
    pub fn inv_sqrt2() -> Self {
        Coefficient::sqrt2_times(rat(1, 2))
    }

    pub fn i() -> Self {
        Coefficient {
            re_rat: BigRational::zero(),
            re_sqrt2: BigRational::zero(),
            im_rat: BigRational::one(),
            im_sqrt2: BigRational::zero(),
        }
    }

    /// Multiplies by `i`.
    pub fn times_i(&self) -> Self {
        Coefficient {
            re_rat: -self.im_rat.clone(),
            re_sqrt2: -self.im_sqrt2.clone(),
            im_rat: self.re_rat.clone(),
            im_sqrt2: self.re_sqrt2.clone(),
        }
    }

    fn split(&self) -> (Gauss, Gauss) {
        (
            Gauss { re: self.re_rat.clone(), im: self.im_rat.clone() },
            Gauss { re: self.re_sqrt2.clone(), im: self.im_sqrt2.clone() },
        )
    }

    fn join(p: Gauss, q: Gauss) -> Self {
        Coefficient { re_rat: p.re, re_sqrt2: q.re, im_rat: p.im, im_sqrt2: q.im }
    }

    pub fn is_zero(&self) -> bool {
        self.re_rat.is_zero()
            && self.re_sqrt2.is_zero()
            && self.im_rat.is_zero()
            && self.im_sqrt2.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re_rat.is_one()
            && self.re_sqrt2.is_zero()
            && self.im_rat.is_zero()
            && self.im_sqrt2.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coefficient {
            re_rat: self.re_rat.clone(),
            re_sqrt2: self.re_sqrt2.clone(),
            im_rat: -self.im_rat.clone(),
            im_sqrt2: -self.im_sqrt2.clone(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        // (p + q√2)⁻¹ = (p − q√2) / (p² − 2q²); the denominator vanishes only
        // at zero because √2 ∉ ℚ(i).
        let (p, q) = self.split();
        let denom = p.mul(&p).sub(&q.mul(&q).scale(&rat(2, 1)));
        let d_inv = denom.inv()?;
        Some(Coefficient::join(p.mul(&d_inv), q.mul(&d_inv).scale(&rat(-1, 1))))
    }

    pub fn to_complex(&self) -> Complex64 {
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        let s2 = std::f64::consts::SQRT_2;
        Complex64::new(
            f(&self.re_rat) + f(&self.re_sqrt2) * s2,
            f(&self.im_rat) + f(&self.im_sqrt2) * s2,
        )
    }

    /// Canonical literal with `sqrt2` spelled out; see [`fmt::Display`].
    fn render(&self, sqrt2: &str, open: char, close: char, pad: bool) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        let comps = [
            (&self.re_rat, false, false),
            (&self.re_sqrt2, true, false),
            (&self.im_rat, false, true),
            (&self.im_sqrt2, true, true),
        ];
        for (value, root, imag) in comps {
            if value.is_zero() {
                continue;
            }
            let negative = value.is_negative();
            let magnitude = if root { value.abs() * rat(2, 1) } else { value.abs() };
            let body = if imag && !root && magnitude.is_one() {
                String::from("i")
            } else {
                let mut b = ratio_text(&magnitude);
                if root {
                    b.push('/');
                    b.push_str(sqrt2);
                }
                if imag {
                    b.push_str("*i");
                }
                b
            };
            parts.push((negative, body));
        }
        match parts.len() {
            0 => "0".to_string(),
            1 => {
                let (neg, body) = &parts[0];
                format!("{}{}", if *neg { "-" } else { "" }, body)
            }
            _ => {
                let mut out = String::new();
                out.push(open);
                for (i, (neg, body)) in parts.iter().enumerate() {
                    match (i, neg, pad) {
                        (0, true, _) => out.push('-'),
                        (0, false, _) => {}
                        (_, true, true) => out.push_str(" - "),
                        (_, false, true) => out.push_str(" + "),
                        (_, true, false) => out.push('-'),
                        (_, false, false) => out.push('+'),
                    }
                    out.push_str(body);
                }
                out.push(close);
                out
            }
        }
    }

    /// Human-oriented rendering used in Dirac output (`1/√2`, `(1/2 + i)`).
    pub fn dirac_text(&self) -> String {
        self.render("√2", '(', ')', true)
    }

    /// True when the canonical literal needs no enclosing brackets.
    pub fn is_simple(&self) -> bool {
        [&self.re_rat, &self.re_sqrt2, &self.im_rat, &self.im_sqrt2]
            .iter()
            .filter(|r| !r.is_zero())
            .count()
            <= 1
    }
}

fn ratio_text(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical literal: `0`, `-3/4`, `1/sqrt2`, `i`, `-2*i`, `[1/2+1/sqrt2*i]`.
impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("sqrt2", '[', ']', false))
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        Coefficient {
            re_rat: &self.re_rat + &o.re_rat,
            re_sqrt2: &self.re_sqrt2 + &o.re_sqrt2,
            im_rat: &self.im_rat + &o.im_rat,
            im_sqrt2: &self.im_sqrt2 + &o.im_sqrt2,
        }
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        self + &(-o)
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            re_rat: -self.re_rat.clone(),
            re_sqrt2: -self.re_sqrt2.clone(),
            im_rat: -self.im_rat.clone(),
            im_sqrt2: -self.im_sqrt2.clone(),
        }
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        // (p1 + q1√2)(p2 + q2√2) = (p1p2 + 2q1q2) + (p1q2 + q1p2)√2
        let (p1, q1) = self.split();
        let (p2, q2) = o.split();
        let p = p1.mul(&p2).add(&q1.mul(&q2).scale(&rat(2, 1)));
        let q = p1.mul(&q2).add(&q1.mul(&p2));
        Coefficient::join(p, q)
    }
}
