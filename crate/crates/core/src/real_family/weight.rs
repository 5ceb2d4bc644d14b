use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    Bump,
    Indicator,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
enum Rule {
    Bump,
    Indicator,
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
}

/// A compactly supported non-negative test function Φ.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    rule: Rule,
    lo: f64,
    hi: f64,
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidArgument(format!(
            "weight support needs finite a < b, got ({a}, {b})"
        )));
    }
    Ok(())
}

impl WeightFunction {
    /// exp(−1/(1 − u²)) with u = 2(x − (a+b)/2)/(b − a), zero outside (a, b).
    pub fn bump(a: f64, b: f64) -> Result<Self> {
        check_interval(a, b)?;
        Ok(Self {
            rule: Rule::Bump,
            lo: a,
            hi: b,
        })
    }

    /// The indicator of the open interval (a, b).
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        check_interval(a, b)?;
        Ok(Self {
            rule: Rule::Indicator,
            lo: a,
            hi: b,
        })
    }

    /// Piecewise-linear interpolation through (xs[i], ys[i]), zero outside
    /// [xs[0], xs[n−1]].
    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::InvalidArgument(
                "tabulated weight needs at least two (x, y) pairs".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "tabulated abscissae must be finite and strictly increasing".into(),
            ));
        }
        if ys.iter().any(|y| !(y.is_finite() && *y >= 0.0)) {
            return Err(Error::InvalidArgument(
                "tabulated values must be finite and non-negative".into(),
            ));
        }
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        Ok(Self {
            rule: Rule::Tabulated { xs, ys },
            lo,
            hi,
        })
    }

    pub fn kind(&self) -> WeightKind {
        match self.rule {
            Rule::Bump => WeightKind::Bump,
            Rule::Indicator => WeightKind::Indicator,
            Rule::Tabulated { .. } => WeightKind::Tabulated,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x > self.lo && x < self.hi) {
            return match &self.rule {
                Rule::Tabulated { ys, .. } if x == self.lo => ys[0],
                Rule::Tabulated { ys, .. } if x == self.hi => ys[ys.len() - 1],
                _ => 0.0,
            };
        }
        match &self.rule {
            Rule::Bump => {
                let u = 2.0 * (x - self.center()) / (self.hi - self.lo);
                let q = 1.0 - u * u;
                if q <= 0.0 {
                    0.0
                } else {
                    (-1.0 / q).exp()
                }
            }
            Rule::Indicator => 1.0,
            Rule::Tabulated { xs, ys } => {
                let k = xs.partition_point(|&t| t <= x).saturating_sub(1);
                let k = k.min(xs.len() - 2);
                let s = (x - xs[k]) / (xs[k + 1] - xs[k]);
                ys[k] + s * (ys[k + 1] - ys[k])
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// sup{|x| : Φ(x) > 0}, up to the closure of the support.
    pub fn beta(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// Only the bump is C^∞; the other kinds have kinks or jumps.
    pub fn is_smooth(&self) -> bool {
        matches!(self.rule, Rule::Bump)
    }

    /// Points where Φ may fail to be smooth, including both support ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.rule {
            Rule::Tabulated { xs, .. } => xs.clone(),
            _ => vec![self.lo, self.hi],
        }
    }

    /// Linear pieces (x0, y0, x1, y1) for the kinds that are piecewise linear.
    pub(crate) fn linear_pieces(&self) -> Option<Vec<(f64, f64, f64, f64)>> {
        match &self.rule {
            Rule::Bump => None,
            Rule::Indicator => Some(vec![(self.lo, 1.0, self.hi, 1.0)]),
            Rule::Tabulated { xs, ys } => Some(
                xs.windows(2)
                    .zip(ys.windows(2))
                    .map(|(x, y)| (x[0], y[0], x[1], y[1]))
                    .collect(),
            ),
        }
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::Bump => write!(f, "bump:{},{}", self.lo, self.hi),
            Rule::Indicator => write!(f, "indicator:{},{}", self.lo, self.hi),
            Rule::Tabulated { xs, .. } => {
                write!(f, "tabulated:{}pts[{},{}]", xs.len(), self.lo, self.hi)
            }
        }
    }
}

/// Parses `bump:a,b` or `indicator:a,b`.
impl FromStr for WeightFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse weight {s:?}"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let (a, b) = args.split_once(',').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "bump" => Self::bump(a, b),
            "indicator" => Self::indicator(a, b),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_examples() {
        let b = WeightFunction::bump(1.0, 2.0).unwrap();
        assert!((b.eval(1.5) - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(b.eval(1.0), 0.0);
        assert_eq!(b.eval(2.0), 0.0);
        assert_eq!(b.eval(2.5), 0.0);
        let i = WeightFunction::indicator(-2.0, -1.0).unwrap();
        assert_eq!(i.eval(-1.5), 1.0);
        assert_eq!(i.eval(-0.5), 0.0);
        assert_eq!(i.beta(), 2.0);
    }

    #[test]
    fn bump_matches_figure_formula() {
        let b = WeightFunction::bump(1.0, 2.0).unwrap();
        for k in 1..100 {
            let x = 1.0 + k as f64 / 100.0;
            let want = (-1.0 / (1.0 - 4.0 * (x - 1.5) * (x - 1.5))).exp();
            assert!((b.eval(x) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn tabulated_interpolates() {
        let w = WeightFunction::tabulated(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(w.eval(0.5), 1.0);
        assert_eq!(w.eval(2.0), 1.0);
        assert_eq!(w.eval(1.0), 2.0);
        assert_eq!(w.eval(-0.1), 0.0);
        assert!(!w.is_smooth());
        assert!(WeightFunction::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(WeightFunction::tabulated(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn parse_round_trip() {
        let w: WeightFunction = "bump:1,2".parse().unwrap();
        assert_eq!(w, WeightFunction::bump(1.0, 2.0).unwrap());
        let w: WeightFunction = "indicator:-2,-1".parse().unwrap();
        assert_eq!(w.to_string().parse::<WeightFunction>().unwrap(), w);
        assert!("bump:2,1".parse::<WeightFunction>().is_err());
        assert!("gauss:0,1".parse::<WeightFunction>().is_err());
    }
}
