use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::syntax::cfg::Cfg;

pub type Rational = BigRational;

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `3`, `1/3` or `0.25` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().ok()?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        let r = BigRational::new(n, d);
        return Some(if negative { -r } else { r });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreConfig {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl Default for ScoreConfig {
    fn default() -> ScoreConfig {
        ScoreConfig {
            alpha: ratio(1, 3),
            beta: ratio(2, 3),
            gamma: Rational::one(),
        }
    }
}

impl ScoreConfig {
    pub fn is_valid(&self) -> bool {
        let zero = Rational::zero();
        let one = Rational::one();
        self.alpha > zero
            && self.alpha < one
            && self.beta > zero
            && self.beta < one
            && !self.gamma.is_negative()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreRecord {
    pub cdep: Rational,
    pub edep: Rational,
    pub dyn_score: Rational,
    pub fixme: Rational,
}

/// `γ + α/(1−α) · (1 − β + β·α^#p − α^#f)`
pub fn dynamic_score(passing: usize, failing: usize, cfg: &ScoreConfig) -> Rational {
    let one = Rational::one();
    let a = &cfg.alpha;
    let ap = Pow::pow(a, passing as u32);
    let af = Pow::pow(a, failing as u32);
    let factor = a / (&one - a);
    &cfg.gamma + factor * (&one - &cfg.beta + &cfg.beta * ap - af)
}

/// Harmonic mean of the three scores; 0 when any of them is not positive.
pub fn fixme_score(edep: &Rational, cdep: &Rational, dyn_score: &Rational) -> Rational {
    if !edep.is_positive() || !cdep.is_positive() || !dyn_score.is_positive() {
        return Rational::zero();
    }
    let three = Rational::from_integer(BigInt::from(3));
    three / (edep.recip() + cdep.recip() + dyn_score.recip())
}

/// `1 − cdist(ℓ, j) / max{cdist(λ, j) | λ ⇝ j}`, or 0 when ℓ does not reach j.
pub fn control_dependence(cfg: &Cfg, l: u32, j: u32) -> Rational {
    let dist = cfg.distances_to(j);
    let Some(&d) = dist.get(&l) else {
        return Rational::zero();
    };
    let max = dist.values().copied().max().unwrap_or(0);
    if max == 0 {
        return if l == j { Rational::one() } else { Rational::zero() };
    }
    Rational::one() - ratio(d as i64, max as i64)
}

/// `eprox / max`, or 0 when nothing in the predicate set shares a
/// sub-expression with the clause.
pub fn expression_dependence(eprox: usize, max_eprox: usize) -> Rational {
    if max_eprox == 0 {
        Rational::zero()
    } else {
        ratio(eprox as i64, max_eprox as i64)
    }
}
