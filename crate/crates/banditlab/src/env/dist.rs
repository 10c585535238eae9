//! Reward distributions on `[0, 1]`.
//!
//! The library works with a closed set of families so that means, CDFs and
//! pairwise density ratios are all exactly computable. Anything outside the
//! four variants below is rejected at construction time.

use std::fmt;

use thiserror::Error;

/// Absolute tolerance for weight normalization and mean checks.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("parameter {name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("uniform interval needs a < b (got a = {a}, b = {b}); use dirac(x) for a point mass")]
    EmptyInterval { a: f64, b: f64 },
    #[error("finite support needs at least one point")]
    EmptySupport,
    #[error("finite support points must be strictly increasing")]
    UnsortedSupport,
    #[error("finite support weights must be positive")]
    NonPositiveWeight,
    #[error("finite support weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("cannot parse distribution literal `{0}`")]
    BadLiteral(String),
}

/// A reward law on `[0, 1]` from one of the four supported families.
#[derive(Debug, Clone, PartialEq)]
pub enum ArmDistribution {
    Bernoulli { p: f64 },
    Dirac { x: f64 },
    UniformInterval { a: f64, b: f64 },
    FiniteSupport { points: Vec<(f64, f64)> },
}

fn check_unit(name: &'static str, value: f64) -> Result<(), DistError> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(DistError::OutOfRange { name, value })
    }
}

impl ArmDistribution {
    pub fn bernoulli(p: f64) -> Result<Self, DistError> {
        check_unit("p", p)?;
        Ok(Self::Bernoulli { p })
    }

    pub fn dirac(x: f64) -> Result<Self, DistError> {
        check_unit("x", x)?;
        Ok(Self::Dirac { x })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self, DistError> {
        check_unit("a", a)?;
        check_unit("b", b)?;
        if a >= b {
            return Err(DistError::EmptyInterval { a, b });
        }
        Ok(Self::UniformInterval { a, b })
    }

    /// Finite support: points strictly increasing, weights positive and
    /// summing to one within [`WEIGHT_TOLERANCE`].
    pub fn finite(points: Vec<(f64, f64)>) -> Result<Self, DistError> {
        if points.is_empty() {
            return Err(DistError::EmptySupport);
        }
        let mut sum = 0.0;
        for (i, &(x, w)) in points.iter().enumerate() {
            check_unit("x", x)?;
            if !(w.is_finite() && w > 0.0) {
                return Err(DistError::NonPositiveWeight);
            }
            if i > 0 && points[i - 1].0 >= x {
                return Err(DistError::UnsortedSupport);
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(DistError::WeightSum { sum });
        }
        Ok(Self::FiniteSupport { points })
    }

    /// Analytic expectation.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Bernoulli { p } => *p,
            Self::Dirac { x } => *x,
            Self::UniformInterval { a, b } => 0.5 * (a + b),
            Self::FiniteSupport { points } => points.iter().map(|(x, w)| x * w).sum(),
        }
    }

    /// Analytic variance.
    pub fn variance(&self) -> f64 {
        match self {
            Self::Bernoulli { p } => p * (1.0 - p),
            Self::Dirac { .. } => 0.0,
            Self::UniformInterval { a, b } => (b - a) * (b - a) / 12.0,
            Self::FiniteSupport { points } => {
                let m = self.mean();
                points.iter().map(|(x, w)| w * (x - m) * (x - m)).sum()
            }
        }
    }

    /// Right-continuous CDF, `P(X <= x)`. Defined for every real `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Bernoulli { p } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
            Self::Dirac { x: c } => {
                if x < *c {
                    0.0
                } else {
                    1.0
                }
            }
            Self::UniformInterval { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Self::FiniteSupport { points } => points
                .iter()
                .take_while(|(xi, _)| *xi <= x)
                .map(|(_, w)| w)
                .sum(),
        }
    }

    /// Left limit of the CDF, `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x) - self.atom_mass(x)
    }

    /// Point mass at `x` (zero for continuous families).
    pub fn atom_mass(&self, x: f64) -> f64 {
        match self {
            Self::Bernoulli { p } => {
                if x == 0.0 {
                    1.0 - p
                } else if x == 1.0 {
                    *p
                } else {
                    0.0
                }
            }
            Self::Dirac { x: c } => {
                if x == *c {
                    1.0
                } else {
                    0.0
                }
            }
            Self::UniformInterval { .. } => 0.0,
            Self::FiniteSupport { points } => points
                .iter()
                .find(|(xi, _)| *xi == x)
                .map(|(_, w)| *w)
                .unwrap_or(0.0),
        }
    }

    /// Density of the Lebesgue-continuous part at `x`.
    pub fn continuous_density(&self, x: f64) -> f64 {
        match self {
            Self::UniformInterval { a, b } if (*a..=*b).contains(&x) => 1.0 / (b - a),
            _ => 0.0,
        }
    }

    /// Whether `x` lies in the topological support.
    pub fn support_contains(&self, x: f64) -> bool {
        match self {
            Self::Bernoulli { p } => (x == 0.0 && *p < 1.0) || (x == 1.0 && *p > 0.0),
            Self::Dirac { x: c } => x == *c,
            Self::UniformInterval { a, b } => (*a..=*b).contains(&x),
            Self::FiniteSupport { points } => points.iter().any(|(xi, _)| *xi == x),
        }
    }

    /// Discontinuity and kink locations of the CDF, ascending. Together with
    /// observation values these are the only candidates for the supremum in a
    /// Kolmogorov-Smirnov distance.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Bernoulli { p } => {
                let mut v = Vec::new();
                if *p < 1.0 {
                    v.push(0.0);
                }
                if *p > 0.0 {
                    v.push(1.0);
                }
                v
            }
            Self::Dirac { x } => vec![*x],
            Self::UniformInterval { a, b } => vec![*a, *b],
            Self::FiniteSupport { points } => points.iter().map(|(x, _)| *x).collect(),
        }
    }

    /// Map a uniform draw `u` in `[0, 1)` through the inverse CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::Bernoulli { p } => {
                if u < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Dirac { x } => *x,
            Self::UniformInterval { a, b } => a + u * (b - a),
            Self::FiniteSupport { points } => {
                let mut cum = 0.0;
                for (x, w) in points {
                    cum += w;
                    if u < cum {
                        return *x;
                    }
                }
                points[points.len() - 1].0
            }
        }
    }

    /// Canonical literal, e.g. `ber(0.6)` or `finite(0.2:0.5,0.8:0.5)`.
    pub fn literal(&self) -> String {
        self.to_string()
    }

    /// Parse a distribution literal: `ber(p)`, `dirac(x)`, `unif(a,b)`,
    /// `finite(x1:w1,x2:w2,...)`. Case-insensitive, plain decimal numbers.
    pub fn parse(literal: &str) -> Result<Self, DistError> {
        let s = literal.trim().to_ascii_lowercase();
        let bad = || DistError::BadLiteral(literal.to_string());
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = &s[..open];
        let args = &s[open + 1..s.len() - 1];
        match name {
            "ber" => Self::bernoulli(parse_decimal(args).ok_or_else(bad)?),
            "dirac" => Self::dirac(parse_decimal(args).ok_or_else(bad)?),
            "unif" => {
                let (a, b) = args.split_once(',').ok_or_else(bad)?;
                Self::uniform(
                    parse_decimal(a).ok_or_else(bad)?,
                    parse_decimal(b).ok_or_else(bad)?,
                )
            }
            "finite" => {
                let mut points = Vec::new();
                for part in args.split(',') {
                    let (x, w) = part.split_once(':').ok_or_else(bad)?;
                    points.push((
                        parse_decimal(x).ok_or_else(bad)?,
                        parse_decimal(w).ok_or_else(bad)?,
                    ));
                }
                Self::finite(points)
            }
            _ => Err(bad()),
        }
    }
}

/// Plain decimal numbers only: no exponents, no `inf`/`nan`.
pub(crate) fn parse_decimal(s: &str) -> Option<f64> {
    let t = s.trim();
    let body = t.strip_prefix(['+', '-']).unwrap_or(t);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    if body.chars().filter(|&c| c == '.').count() > 1 {
        return None;
    }
    t.parse().ok()
}

impl fmt::Display for ArmDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bernoulli { p } => write!(f, "ber({p})"),
            Self::Dirac { x } => write!(f, "dirac({x})"),
            Self::UniformInterval { a, b } => write!(f, "unif({a},{b})"),
            Self::FiniteSupport { points } => {
                write!(f, "finite(")?;
                for (i, (x, w)) in points.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}:{w}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Is the density ratio `d nu / d nu_tilde` zero at `x`?
///
/// Conventions: the ratio is `+inf` off the support of `nu_tilde` (returns
/// false there); at an atom of `nu_tilde` it is the ratio of point masses; at
/// a continuity point with positive Lebesgue density it is the ratio of
/// continuous densities, with any `nu` atom counting as `+inf`.
pub fn density_ratio_zero(nu: &ArmDistribution, nu_tilde: &ArmDistribution, x: f64) -> bool {
    if !nu_tilde.support_contains(x) {
        return false;
    }
    if nu_tilde.atom_mass(x) > 0.0 {
        return nu.atom_mass(x) == 0.0;
    }
    // x is in the support of nu_tilde without an atom, so nu_tilde has
    // positive continuous density there.
    if nu.atom_mass(x) > 0.0 {
        return false;
    }
    nu.continuous_density(x) == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ber(p: f64) -> ArmDistribution {
        ArmDistribution::bernoulli(p).unwrap()
    }

    fn dirac(x: f64) -> ArmDistribution {
        ArmDistribution::dirac(x).unwrap()
    }

    #[test]
    fn means() {
        assert_eq!(ber(0.6).mean(), 0.6);
        assert_eq!(dirac(0.5).mean(), 0.5);
        // Hand-checkable weighted sum.
        let f = ArmDistribution::finite(vec![(0.2, 0.5), (0.8, 0.5)]).unwrap();
        assert_abs_diff_eq!(f.mean(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            ArmDistribution::uniform(0.2, 0.6).unwrap().mean(),
            0.4,
            epsilon = 1e-15
        );
    }

    #[test]
    fn cdf_values() {
        assert_eq!(ber(0.6).cdf(0.5), 0.4);
        assert_abs_diff_eq!(
            ArmDistribution::uniform(0.4, 0.6).unwrap().cdf(0.5),
            0.5,
            epsilon = 1e-15
        );
        assert_eq!(dirac(0.5).cdf(0.49), 0.0);
        assert_eq!(dirac(0.5).cdf(0.5), 1.0);
    }

    #[test]
    fn cdf_boundaries() {
        for d in [
            ber(0.3),
            dirac(0.7),
            ArmDistribution::uniform(0.1, 0.9).unwrap(),
            ArmDistribution::finite(vec![(0.0, 0.25), (0.5, 0.25), (1.0, 0.5)]).unwrap(),
        ] {
            assert_eq!(d.cdf(1.0), 1.0, "{d}");
            assert_eq!(d.cdf(-1e-9), 0.0, "{d}");
            assert_eq!(d.cdf(2.0), 1.0, "{d}");
        }
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(ArmDistribution::bernoulli(1.2).is_err());
        assert!(ArmDistribution::uniform(0.5, 0.5).is_err());
        assert!(ArmDistribution::uniform(0.6, 0.4).is_err());
        assert!(ArmDistribution::finite(vec![(0.2, 0.5), (0.2, 0.5)]).is_err());
        assert!(ArmDistribution::finite(vec![(0.2, 0.5), (0.8, 0.6)]).is_err());
        assert!(ArmDistribution::finite(vec![(0.2, -0.5), (0.8, 1.5)]).is_err());
        assert!(ArmDistribution::finite(vec![]).is_err());
    }

    #[test]
    fn density_ratio_conventions() {
        // Both Bernoulli: atom-mass ratio at 1 is 0.25/0.75 > 0.
        assert!(!density_ratio_zero(&ber(0.25), &ber(0.75), 1.0));
        // Reference atom at 1, numerator has no mass there.
        assert!(density_ratio_zero(&dirac(0.5), &ber(0.5), 1.0));
        // Off the support of the reference: ratio is +inf by convention.
        assert!(!density_ratio_zero(&ber(0.5), &dirac(0.3), 0.5));
        // Continuous reference, numerator continuous elsewhere.
        let u1 = ArmDistribution::uniform(0.0, 0.4).unwrap();
        let u2 = ArmDistribution::uniform(0.0, 1.0).unwrap();
        assert!(density_ratio_zero(&u1, &u2, 0.7)); // density 0 / positive
        assert!(!density_ratio_zero(&u1, &u2, 0.2)); // both positive
                                                     // Atom of the numerator at a continuity point of the reference.
        assert!(!density_ratio_zero(&dirac(0.5), &u2, 0.5));
        // Bernoulli numerator against a continuous reference: zero ratio
        // except at reference-off-support points.
        assert!(density_ratio_zero(&ber(0.5), &u2, 0.5));
    }

    #[test]
    fn quantile_matches_cdf_on_finite() {
        let f = ArmDistribution::finite(vec![(0.1, 0.2), (0.5, 0.3), (0.9, 0.5)]).unwrap();
        assert_eq!(f.quantile(0.0), 0.1);
        assert_eq!(f.quantile(0.19), 0.1);
        assert_eq!(f.quantile(0.2), 0.5);
        assert_eq!(f.quantile(0.49), 0.5);
        assert_eq!(f.quantile(0.5), 0.9);
        assert_eq!(f.quantile(0.999), 0.9);
    }

    #[test]
    fn literals_round_trip() {
        for s in [
            "ber(0.6)",
            "dirac(0.5)",
            "unif(0.4,0.6)",
            "finite(0.2:0.5,0.8:0.5)",
        ] {
            let d = ArmDistribution::parse(s).unwrap();
            assert_eq!(d.literal(), s);
        }
        // Case-insensitive, whitespace-tolerant.
        assert_eq!(ArmDistribution::parse(" BER(0.25) ").unwrap(), ber(0.25));
        assert!(ArmDistribution::parse("ber(1e-3)").is_err());
        assert!(ArmDistribution::parse("ber(nan)").is_err());
        assert!(ArmDistribution::parse("gauss(0.5)").is_err());
        assert!(ArmDistribution::parse("unif(0.5)").is_err());
    }
}
