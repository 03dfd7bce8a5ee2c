//! Exact rational numbers and finite probability distributions.
//!
//! Every probability in the operational and ontological layers is a
//! [`Rational`]; equality checks against table values are exact, never
//! tolerance-based. Arbitrary-precision integers back the arithmetic, so
//! desk-scale tables cannot overflow.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number.
///
/// Always stored in canonical form: positive denominator,
/// `gcd(|numerator|, denominator) = 1`. Equality is value equality, so
/// `rat(3, 6) == rat(1, 2)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

/// Error raised by [`rat`] on a zero denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroDenominator;

impl fmt::Display for ZeroDenominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rational denominator must be non-zero")
    }
}

/// Builds the rational `num/den` in canonical form.
///
/// The sign is carried by the numerator: `rat(-2, -4) == rat(1, 2)`.
pub fn rat(num: i64, den: i64) -> Result<Rational, ZeroDenominator> {
    if den == 0 {
        return Err(ZeroDenominator);
    }
    Ok(Rational(BigRational::new(
        BigInt::from(num),
        BigInt::from(den),
    )))
}

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Shorthand for small constants that cannot fail: `Rational::new(3, 8)`.
    ///
    /// Panics on a zero denominator; use [`rat`] for fallible construction.
    pub fn new(num: i64, den: i64) -> Self {
        rat(num, den).expect("non-zero denominator")
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Nearest `f64`; used only where a floating-point layer compares itself
    /// against the exact tables.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact comparison of `self²` against the integer `n`, without leaving
    /// rational arithmetic. This is how the Tsirelson bound `2√2` is checked.
    pub fn square_cmp_integer(&self, n: i64) -> Ordering {
        let sq = &self.0 * &self.0;
        sq.cmp(&BigRational::from_integer(BigInt::from(n)))
    }
}

impl fmt::Display for Rational {
    /// Canonical form `num/den`, with integers shortened: `3/8`, `1`, `0`, `-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Error from parsing a rational string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal `{}`", self.0)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `num`, `num/den` (normalizing as needed, e.g. `3/6` → `1/2`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseRationalError(s.to_owned());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rational(BigRational::new(num, den)))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// A finite probability distribution over outcome labels of type `T`.
///
/// Masses are non-negative rationals summing to exactly 1. Zero-mass labels
/// are dropped on construction, so two distributions are equal exactly when
/// they assign the same mass everywhere. Entries are kept sorted by label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution<T: Ord + Clone> {
    entries: Vec<(T, Rational)>,
}

/// Why a list of `(label, mass)` entries is not a distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistributionError {
    /// A label appeared twice.
    DuplicateLabel(String),
    /// A mass was negative; names the offending label.
    NegativeMass(String),
    /// Masses summed to the given value instead of 1.
    NotNormalized(String),
}

impl fmt::Display for DistributionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionError::DuplicateLabel(l) => write!(f, "duplicate outcome label `{l}`"),
            DistributionError::NegativeMass(l) => write!(f, "negative mass at label `{l}`"),
            DistributionError::NotNormalized(s) => write!(f, "masses sum to {s}, not 1"),
        }
    }
}

/// Validates and builds a distribution from `(label, mass)` entries.
pub fn dist<T: Ord + Clone + fmt::Debug>(
    entries: impl IntoIterator<Item = (T, Rational)>,
) -> Result<Distribution<T>, DistributionError> {
    Distribution::new(entries)
}

impl<T: Ord + Clone + fmt::Debug> Distribution<T> {
    pub fn new(
        entries: impl IntoIterator<Item = (T, Rational)>,
    ) -> Result<Self, DistributionError> {
        let mut entries: Vec<(T, Rational)> = entries.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(DistributionError::DuplicateLabel(format!("{:?}", w[0].0)));
            }
        }
        let mut total = Rational::zero();
        for (label, mass) in &entries {
            if mass.is_negative() {
                return Err(DistributionError::NegativeMass(format!("{label:?}")));
            }
            total = total + mass.clone();
        }
        if !total.is_one() {
            return Err(DistributionError::NotNormalized(total.to_string()));
        }
        entries.retain(|(_, m)| !m.is_zero());
        Ok(Distribution { entries })
    }

    /// The point mass at `label`.
    pub fn point(label: T) -> Self {
        Distribution {
            entries: alloc::vec![(label, Rational::one())],
        }
    }

    /// The uniform distribution over distinct `labels`.
    pub fn uniform(labels: impl IntoIterator<Item = T>) -> Result<Self, DistributionError> {
        let labels: Vec<T> = labels.into_iter().collect();
        let n = labels.len() as i64;
        Self::new(labels.into_iter().map(|l| (l, Rational::new(1, n))))
    }
}

impl<T: Ord + Clone> Distribution<T> {
    /// Mass at `label`; zero when the label is off the support.
    pub fn mass(&self, label: &T) -> Rational {
        match self.entries.binary_search_by(|(l, _)| l.cmp(label)) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Labels with strictly positive mass, in sorted order.
    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(l, _)| l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Rational)> {
        self.entries.iter().map(|(l, m)| (l, m))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every mass is 0 or 1, i.e. the distribution is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.entries.len() == 1 && self.entries[0].1.is_one()
    }

    /// Sums masses over all labels selected by `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(&T) -> bool) -> Rational {
        self.entries
            .iter()
            .filter(|(l, _)| pred(l))
            .map(|(_, m)| m.clone())
            .sum()
    }

    /// Pushes the distribution forward through `f`, merging labels that map
    /// to the same image. The result is again a valid distribution.
    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> Distribution<U> {
        let mut out: Vec<(U, Rational)> = Vec::new();
        for (label, mass) in &self.entries {
            let image = f(label);
            match out.binary_search_by(|(l, _)| l.cmp(&image)) {
                Ok(i) => out[i].1 = out[i].1.clone() + mass.clone(),
                Err(i) => out.insert(i, (image, mass.clone())),
            }
        }
        Distribution { entries: out }
    }
}

impl<T: Ord + Clone + fmt::Debug> fmt::Debug for Distribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(l, m)| (l, m)))
            .finish()
    }
}
