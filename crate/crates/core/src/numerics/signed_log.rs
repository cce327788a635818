use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

/// A real number stored as `sign · exp(log_mag)`.
///
/// Zero is its own element (`sign == 0`, `log_mag == -∞`) so that exact
/// cancellations stay exact instead of degrading to a very negative log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLogReal {
    sign: i8,
    log_mag: f64,
}

impl SignedLogReal {
    pub const ZERO: Self = Self {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };
    pub const ONE: Self = Self {
        sign: 1,
        log_mag: 0.0,
    };

    /// Builds a value from its parts. A zero sign or a `-∞` magnitude yields
    /// the zero element; `+∞` saturates at `f64::MAX`.
    pub fn new(sign: i8, log_mag: f64) -> Self {
        assert!(!log_mag.is_nan(), "log magnitude is NaN");
        if sign == 0 || log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            sign: sign.signum(),
            log_mag: saturate(log_mag),
        }
    }

    /// Positive value `exp(log_mag)`.
    pub fn from_ln(log_mag: f64) -> Self {
        Self::new(1, log_mag)
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "cannot encode non-finite value {x}");
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::new(if x > 0.0 { 1 } else { -1 }, x.abs().ln())
        }
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.sign) * self.log_mag.exp()
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn log_mag(self) -> f64 {
        self.log_mag
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(self) -> bool {
        self.sign > 0
    }

    /// True when the magnitude hit the representable ceiling.
    pub fn is_saturated(self) -> bool {
        self.log_mag == f64::MAX
    }

    pub fn abs(self) -> Self {
        Self::new(self.sign.abs(), self.log_mag)
    }

    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Self::new(self.sign, -self.log_mag)
    }

    /// `self^p` for a real exponent; only defined for non-negative values.
    pub fn powf(self, p: f64) -> Self {
        assert!(self.sign >= 0, "real power of a negative value");
        if self.is_zero() {
            return if p == 0.0 { Self::ONE } else { Self::ZERO };
        }
        Self::new(1, self.log_mag * p)
    }

    pub fn powi(self, p: i32) -> Self {
        if p == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            assert!(p > 0, "negative power of zero");
            return Self::ZERO;
        }
        let sign = if p % 2 == 0 { 1 } else { self.sign };
        Self::new(sign, self.log_mag * f64::from(p))
    }

    /// Natural log of a positive value.
    pub fn ln(self) -> f64 {
        assert!(self.sign > 0, "log of a non-positive value");
        self.log_mag
    }

    pub fn product<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(Self::ONE, |acc, x| acc * x)
    }

    pub fn sum<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(Self::ZERO, |acc, x| acc + x)
    }
}

fn saturate(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::MAX
    } else {
        x
    }
}

impl Default for SignedLogReal {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Display for SignedLogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "exp({})", self.log_mag),
            _ => write!(f, "-exp({})", self.log_mag),
        }
    }
}

impl Mul for SignedLogReal {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.sign * rhs.sign, self.log_mag + rhs.log_mag)
    }
}

impl Div for SignedLogReal {
    type Output = Self;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Neg for SignedLogReal {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            log_mag: self.log_mag,
        }
    }
}

impl Add for SignedLogReal {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = small.log_mag - big.log_mag;
        if big.sign == small.sign {
            Self::new(big.sign, big.log_mag + d.exp().ln_1p())
        } else if d == 0.0 {
            Self::ZERO
        } else {
            Self::new(big.sign, big.log_mag + (-d.exp_m1()).ln())
        }
    }
}

impl Sub for SignedLogReal {
    type Output = Self;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl PartialOrd for SignedLogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log_mag.partial_cmp(&other.log_mag),
                _ => other.log_mag.partial_cmp(&self.log_mag),
            },
            ord => Some(ord),
        }
    }
}

// `-∞` has no JSON encoding, so the zero element serialises its magnitude as
// null.
impl Serialize for SignedLogReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SignedLogReal", 2)?;
        st.serialize_field("sign", &self.sign)?;
        let mag = if self.is_zero() {
            None
        } else {
            Some(self.log_mag)
        };
        st.serialize_field("log_mag", &mag)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for SignedLogReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            sign: i8,
            log_mag: Option<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        match (raw.sign, raw.log_mag) {
            (0, _) => Ok(Self::ZERO),
            (s @ (-1 | 1), Some(m)) if !m.is_nan() => Ok(Self::new(s, m)),
            (s, m) => Err(de::Error::custom(format!(
                "invalid signed log value (sign {s}, log_mag {m:?})"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn slr(sign: i8, x: f64) -> SignedLogReal {
        SignedLogReal::new(sign, x)
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(slr(1, 0.0) * slr(1, 0.0), slr(1, 0.0));
        let p = slr(-1, 2f64.ln()) * slr(1, 3f64.ln());
        assert_eq!(p.sign(), -1);
        assert!((p.log_mag() - 6f64.ln()).abs() < 1e-15);
        assert!((SignedLogReal::ZERO * slr(-1, 100.0)).is_zero());
    }

    #[test]
    fn addition_examples() {
        let s = slr(1, 2f64.ln()) + slr(1, 3f64.ln());
        assert!((s.log_mag() - 5f64.ln()).abs() < 1e-15);
        let z = slr(1, 5f64.ln()) + slr(-1, 5f64.ln());
        assert!(z.is_zero());
        assert_eq!(z.log_mag(), f64::NEG_INFINITY);
        let h = slr(1, 0.0) + slr(-1, 0.5f64.ln());
        assert_eq!(h.sign(), 1);
        assert!((h.log_mag() - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn saturation_is_flagged() {
        let big = slr(1, f64::MAX) * slr(1, f64::MAX);
        assert!(big.is_saturated());
        assert!(!slr(1, 1.0).is_saturated());
    }

    #[test]
    fn ordering_and_powers() {
        assert!(slr(-1, 3.0) < slr(-1, 1.0));
        assert!(SignedLogReal::ZERO < slr(1, -50.0));
        assert_eq!(slr(-1, 1.0).powi(2).sign(), 1);
        assert_eq!(slr(-1, 1.0).powi(3).sign(), -1);
        assert!((slr(1, 2.0).powf(0.5).log_mag() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_including_zero() {
        for v in [SignedLogReal::ZERO, slr(-1, -3.25), slr(1, 1e5)] {
            let s = serde_json::to_string(&v).unwrap();
            let back: SignedLogReal = serde_json::from_str(&s).unwrap();
            assert_eq!(v, back);
        }
        assert_eq!(
            serde_json::to_string(&SignedLogReal::ZERO).unwrap(),
            r#"{"sign":0,"log_mag":null}"#
        );
    }

    #[test]
    fn products_of_positive_reals_are_sums_of_logs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut acc = SignedLogReal::ONE;
        let mut logs = 0.0;
        for _ in 0..1000 {
            let x: f64 = rng.random_range(1e-3..1e3);
            acc = acc * SignedLogReal::from_f64(x);
            logs += x.ln();
        }
        assert_eq!(acc.log_mag(), logs);
    }

    fn nonzero() -> impl Strategy<Value = SignedLogReal> {
        (prop_oneof![Just(-1i8), Just(1i8)], -50.0..50.0f64).prop_map(|(s, m)| slr(s, m))
    }

    fn rel_close(a: SignedLogReal, b: SignedLogReal, tol: f64) -> bool {
        if a.is_zero() || b.is_zero() {
            return (a - b).is_zero() || (a - b).log_mag() < a.log_mag().max(b.log_mag()) - 25.0;
        }
        a.sign() == b.sign() && (a.log_mag() - b.log_mag()).abs() <= tol * (1.0 + a.log_mag().abs())
    }

    proptest! {
        #[test]
        fn round_trip_f64(x in prop_oneof![-1e300..-1e-300f64, 1e-300..1e300f64]) {
            let back = SignedLogReal::from_f64(x).to_f64();
            prop_assert!(((back - x) / x).abs() < 1e-13);
        }

        #[test]
        fn mul_commutes_and_associates(a in nonzero(), b in nonzero(), c in nonzero()) {
            prop_assert!(rel_close(a * b, b * a, 1e-12));
            prop_assert!(rel_close((a * b) * c, a * (b * c), 1e-12));
        }

        #[test]
        fn add_commutes_and_associates(a in nonzero(), b in nonzero(), c in nonzero()) {
            prop_assert!(rel_close(a + b, b + a, 1e-12));
            // Associativity only holds up to the cancellation the inputs force.
            let lhs = (a + b) + c;
            let rhs = a + (b + c);
            let scale = a.log_mag().max(b.log_mag()).max(c.log_mag());
            let diff = lhs - rhs;
            prop_assert!(diff.is_zero() || diff.log_mag() <= scale + (1e-12f64).ln());
        }
    }
}
