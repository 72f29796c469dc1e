//! Certified enclosures of base-2 logarithms.
//!
//! Tower-scale quantities are tracked through their logarithms as
//! [`Log2Form`] values: an exact rational plus a rational combination of
//! `log2` of odd integers. Forms are exact and compare symbolically; when a
//! numeric bound is needed they materialize to a [`Log2Interval`] whose
//! endpoints are certified by directed-rounding digit extraction (one run
//! rounding every step down, an independent run rounding every step up), so
//! the true logarithm always lies inside the returned interval.

use num::bigint::BigInt;
use num::{BigRational, BigUint, One, Signed, Zero};
use std::collections::BTreeMap;

/// Closed interval `[lo, hi]` certified to contain some real logarithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Log2Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Log2Interval {
    pub fn exact(v: BigRational) -> Self {
        Log2Interval { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &Self) -> Self {
        Log2Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn add_rational(&self, q: &BigRational) -> Self {
        Log2Interval { lo: &self.lo + q, hi: &self.hi + q }
    }

    /// Scales by a rational, flipping endpoints for negative factors.
    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_negative() {
            Log2Interval { lo: &self.hi * c, hi: &self.lo * c }
        } else {
            Log2Interval { lo: &self.lo * c, hi: &self.hi * c }
        }
    }

    /// Intersection of two enclosures of the same quantity. `None` signals
    /// that the inputs were not enclosures of one value after all.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi <= other.hi { self.hi.clone() } else { other.hi.clone() };
        if lo <= hi {
            Some(Log2Interval { lo, hi })
        } else {
            None
        }
    }

    /// Certified strict `<` between enclosed quantities; `None` when the
    /// intervals overlap and the comparison is not decided.
    pub fn certified_lt(&self, other: &Self) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }
}

/// Floor of `log2(x)` for `x >= 1`, i.e. the index of the top bit.
pub fn log2_floor(x: &BigUint) -> u64 {
    assert!(!x.is_zero(), "log2_floor of zero");
    x.bits() - 1
}

/// Certified enclosure of `log2(x)` for `x >= 1` with roughly `frac_bits`
/// fractional bits of precision. Exact for powers of two.
///
/// Both endpoints come from the classical square-and-renormalize digit
/// extractor run in fixed point with `frac_bits + 32` guard bits: the
/// floor-rounded run can only under-approximate and the ceil-rounded run can
/// only over-approximate, because every step map is monotone in the mantissa.
pub fn log2_nat(x: &BigUint, frac_bits: u32) -> Log2Interval {
    assert!(!x.is_zero(), "log2 of zero");
    let two_exp = x.trailing_zeros().unwrap_or(0);
    let odd = x >> two_exp;
    if odd.is_one() {
        return Log2Interval::exact(BigRational::from(BigInt::from(two_exp)));
    }
    let exp = odd.bits() - 1;
    let int_part = BigRational::from(BigInt::from(two_exp + exp));
    let guard = u64::from(frac_bits) + 32;
    let two_g1: BigUint = BigUint::one() << (guard + 1);
    let g_mask: BigUint = (BigUint::one() << guard) - 1u32;

    // Mantissas of x / 2^floor(log2 x) in [1, 2), scaled by 2^guard.
    let scaled = &odd << guard;
    let m_floor: BigUint = &scaled >> exp;
    let m_ceil: BigUint =
        if (&m_floor << exp) == scaled { m_floor.clone() } else { &m_floor + 1u32 };

    let run = |mut m: BigUint, round_up: bool| -> BigUint {
        let mut acc = BigUint::zero();
        for _ in 0..frac_bits {
            acc <<= 1;
            let sq = &m * &m;
            m = if round_up { (sq + &g_mask) >> guard } else { sq >> guard };
            if m >= two_g1 {
                acc += 1u32;
                m = if round_up { (&m + 1u32) >> 1 } else { &m >> 1 };
            }
        }
        acc
    };

    let acc_lo = run(m_floor, false);
    let acc_hi = run(m_ceil, true) + 1u32;
    let scale = BigInt::one() << frac_bits;
    Log2Interval {
        lo: &int_part + BigRational::new(BigInt::from(acc_lo), scale.clone()),
        hi: &int_part + BigRational::new(BigInt::from(acc_hi), scale),
    }
}

/// Exact symbolic form `base + sum of coeff * log2(oddTerm)`.
///
/// Powers of two fold into `base`; term keys are odd integers `>= 3` and
/// coefficients are nonzero. Two forms are equal as reals iff they are
/// structurally equal, because `log2` of distinct odd primes (and hence the
/// normalized odd-term decomposition) is linearly independent over the
/// rationals; terms are keyed by the odd integers actually encountered,
/// which is enough for the equality uses here (both sides are built from the
/// same generators).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Log2Form {
    base: BigRational,
    terms: BTreeMap<BigUint, BigRational>,
}

impl Log2Form {
    pub fn zero() -> Self {
        Log2Form { base: BigRational::zero(), terms: BTreeMap::new() }
    }

    /// The form whose value is the exact rational `q`.
    pub fn from_rational(q: BigRational) -> Self {
        Log2Form { base: q, terms: BTreeMap::new() }
    }

    /// `log2(x)` for `x >= 1`.
    pub fn of_nat(x: &BigUint) -> Self {
        assert!(!x.is_zero(), "log2 of zero");
        let two_exp = x.trailing_zeros().unwrap_or(0);
        let odd = x >> two_exp;
        let mut form = Log2Form::from_rational(BigRational::from(BigInt::from(two_exp)));
        if !odd.is_one() {
            form.terms.insert(odd, BigRational::one());
        }
        form
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.base += &other.base;
        for (n, c) in &other.terms {
            let slot = out.terms.entry(n.clone()).or_insert_with(BigRational::zero);
            *slot += c;
            if slot.is_zero() {
                out.terms.remove(n);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Log2Form::zero();
        }
        Log2Form {
            base: &self.base * c,
            terms: self.terms.iter().map(|(n, k)| (n.clone(), k * c)).collect(),
        }
    }

    /// `Some(q)` when the form is the exact rational `q` (no odd terms).
    pub fn exact_value(&self) -> Option<&BigRational> {
        if self.terms.is_empty() {
            Some(&self.base)
        } else {
            None
        }
    }

    /// Largest bit length among coefficient numerators and the base; the
    /// representability guard in the tower caps this.
    pub fn coeff_bits(&self) -> u64 {
        let mut bits = self.base.numer().magnitude().bits();
        for c in self.terms.values() {
            bits = bits.max(c.numer().magnitude().bits());
        }
        bits
    }

    /// Certified interval for the form's value, targeting `2^-bits` width.
    pub fn materialize(&self, bits: u32) -> Log2Interval {
        let mut acc = Log2Interval::exact(self.base.clone());
        if self.terms.is_empty() {
            return acc;
        }
        let head = 64 - (self.terms.len() as u64).leading_zeros();
        for (n, c) in &self.terms {
            // |c| <= 2^numer_bits, so numer_bits extra fractional bits keep
            // this term's contribution within the overall budget.
            let coeff_bits = u32::try_from(c.numer().magnitude().bits().min(1 << 24)).unwrap();
            let frac = bits.saturating_add(coeff_bits).saturating_add(head).saturating_add(2);
            acc = acc.add(&log2_nat(n, frac).scale(c));
        }
        acc
    }
}

/// Certified enclosure of `sqrt(r)` for a nonnegative rational, with
/// absolute error at most `2^-frac_bits` on each side.
///
/// `sqrt(a/b) = sqrt(a*b)/b`; the integer square root of `a*b*4^k` gives a
/// directed lower mantissa, and adding one unit gives the upper one.
pub fn sqrt_enclosure(r: &BigRational, frac_bits: u32) -> Log2Interval {
    assert!(!r.is_negative(), "sqrt of negative rational");
    if r.is_zero() {
        return Log2Interval::exact(BigRational::zero());
    }
    let a = r.numer().magnitude();
    let b = r.denom().magnitude();
    let scaled = a * b << (2 * u64::from(frac_bits));
    let root = scaled.sqrt();
    let denom = BigInt::from(b << frac_bits);
    let exactly = &root * &root == scaled;
    let lo = BigRational::new(BigInt::from(root.clone()), denom.clone());
    if exactly {
        Log2Interval::exact(lo)
    } else {
        Log2Interval { lo, hi: BigRational::new(BigInt::from(root + 1u32), denom) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn nat(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn powers_of_two_are_exact() {
        for (x, v) in [(1u64, 0i64), (2, 1), (4, 2), (1024, 10)] {
            let enc = log2_nat(&nat(x), 64);
            assert!(enc.is_exact(), "log2({x}) should be exact");
            assert_eq!(enc.lo, ratio(v, 1));
        }
    }

    #[test]
    fn encloses_known_logs_tightly() {
        // log2(3) = 1.5849625007211562...
        let enc = log2_nat(&nat(3), 80);
        assert!(enc.lo < enc.hi);
        assert!(enc.lo > ratio(15849, 10000), "lower bound too small: {:?}", enc.lo);
        assert!(enc.hi < ratio(15850, 10000), "upper bound too big: {:?}", enc.hi);
        let budget = BigRational::new(1.into(), BigInt::one() << 70u32);
        assert!(enc.width() < budget, "width {:?} above budget", enc.width());
    }

    #[test]
    fn enclosure_brackets_the_true_value_for_many_inputs() {
        // At 8 fractional bits each bound is p/2^f with 2^f <= 256, so
        // "lo <= log2 x" is decidable exactly as 2^p <= x^(2^f).
        use num::ToPrimitive;
        for x in 3u64..200 {
            let enc = log2_nat(&nat(x), 8);
            for (bound, upper) in [(&enc.lo, false), (&enc.hi, true)] {
                let f = bound.denom().magnitude().trailing_zeros().unwrap_or(0);
                let p = bound.numer().to_u64().expect("small numerator");
                let lhs = nat(x).pow(u32::try_from(1u64 << f).unwrap());
                let rhs = BigUint::one() << p;
                if upper {
                    assert!(lhs <= rhs, "upper bound violated for x={x}");
                } else {
                    assert!(lhs >= rhs, "lower bound violated for x={x}");
                }
            }
            // Refinement at higher precision stays nested-consistent.
            let fine = log2_nat(&nat(x), 80);
            assert!(fine.intersect(&enc).is_some(), "precisions disagree for x={x}");
            assert!(fine.width() < enc.width() || enc.is_exact());
        }
    }

    #[test]
    fn forms_compose_and_materialize() {
        // log2(12) = 2 + log2(3)
        let f = Log2Form::of_nat(&nat(12));
        let direct = log2_nat(&nat(12), 64);
        let via_form = f.materialize(64);
        assert!(via_form.intersect(&direct).is_some(), "enclosures must overlap");
        // 3*log2(9*2^10) - 3*log2(9) = 30 exactly.
        let three = ratio(3, 1);
        let g = Log2Form::of_nat(&nat(9 << 10))
            .scale(&three)
            .add(&Log2Form::of_nat(&nat(9)).scale(&-three.clone()));
        assert_eq!(g.exact_value(), Some(&ratio(30, 1)));
    }

    #[test]
    fn form_equality_is_structural() {
        // log2(1024^2) built two ways.
        let a = Log2Form::of_nat(&nat(1024)).scale(&ratio(2, 1));
        let b = Log2Form::of_nat(&(BigUint::one() << 20u32));
        assert_eq!(a, b);
        // 2*log2(18) = 2 + 4*log2(3) keyed by the odd part 9.
        let c = Log2Form::of_nat(&nat(18)).scale(&ratio(2, 1));
        let d = Log2Form::from_rational(ratio(2, 1))
            .add(&Log2Form::of_nat(&nat(9)).scale(&ratio(2, 1)));
        assert_eq!(c, d);
    }

    #[test]
    fn sqrt_enclosure_brackets() {
        let enc = sqrt_enclosure(&ratio(2, 1), 64);
        assert!(&enc.lo * &enc.lo < ratio(2, 1));
        assert!(&enc.hi * &enc.hi > ratio(2, 1));
        let budget = BigRational::new(1.into(), BigInt::one() << 63u32);
        assert!(enc.width() <= budget);
        let exact = sqrt_enclosure(&ratio(9, 4), 16);
        assert!(exact.is_exact());
        assert_eq!(exact.lo, ratio(3, 2));
    }
}
