//! The recursive parameter tower and its structural identities.
//!
//! Each level `h` carries six interlocked quantities:
//!
//! ```text
//! levelCount(0) = 1,  levelCount(h+1) = levelCount(h) * M(h)
//! rho(h) = max(levelCount(h), h + 2)
//! b(h)   = (h+1)^2 * rho(h)^(h+1)
//! pi(h)  = b(h)^(rho(h)^h)
//! a(h)   = pi(h)^(h+2)
//! M(h)   = a(h)^2
//! ```
//!
//! Values are kept exact while they fit the configured bit budget and switch
//! to certified base-2 logarithm enclosures beyond it. The tower refuses to
//! fabricate a value whose *logarithm* is itself astronomically wide: from
//! height 3 upward `pi` needs the exact integer `rho(3)^3` as an exponent
//! coefficient, and that integer's own log2 has around `2^1944` bits, so
//! construction reports [`ParamsError::RepresentationOverflow`] instead.
//! Identity checking above the materializable range is handled by
//! [`verify_identities_symbolic`], which validates the defining recurrences
//! through small-integer exponent arithmetic.

use crate::log2::Log2Form;
use crate::rational::format_ratio;
use num::bigint::BigInt;
use num::{BigRational, BigUint, One, Signed};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Values whose predicted bit length stays at or below this stay exact.
pub const DEFAULT_EXACT_BIT_THRESHOLD: u64 = 1 << 20;
/// Cap on the bit length of log-form coefficients (exponents in disguise).
pub const DEFAULT_COEFF_BIT_CAP: u64 = 1 << 21;
/// Requested absolute precision of materialized log2 enclosures.
pub const DEFAULT_INTERVAL_BITS: u32 = 256;
/// Extra precision granted to one refinement pass before giving up.
pub const DEFAULT_REFINE_EXTRA_BITS: u32 = 256;
/// Heights above this are out of scope for the symbolic verifier.
pub const SYMBOLIC_HEIGHT_CAP: usize = 8;

#[derive(Clone, Debug)]
pub struct TowerConfig {
    pub exact_bit_threshold: u64,
    pub coeff_bit_cap: u64,
    pub interval_bits: u32,
    pub refine_extra_bits: u32,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig {
            exact_bit_threshold: DEFAULT_EXACT_BIT_THRESHOLD,
            coeff_bit_cap: DEFAULT_COEFF_BIT_CAP,
            interval_bits: DEFAULT_INTERVAL_BITS,
            refine_extra_bits: DEFAULT_REFINE_EXTRA_BITS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TowerField {
    LevelCount,
    Rho,
    B,
    Pi,
    A,
    BigM,
}

impl fmt::Display for TowerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            TowerField::LevelCount => "levelCount",
            TowerField::Rho => "rho",
            TowerField::B => "b",
            TowerField::Pi => "pi",
            TowerField::A => "a",
            TowerField::BigM => "M",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("{field} at height {h} is not representable within the configured bounds")]
    RepresentationOverflow { h: usize, field: TowerField },
    #[error("interval comparison for {what} at height {h} stayed inconclusive after refinement")]
    InconclusiveInterval { h: usize, what: String },
    #[error("height {h} exceeds the symbolic verification cap {cap}")]
    HeightAboveCap { h: usize, cap: usize },
    #[error("empty range: upper height {cap} does not exceed start {start}")]
    EmptyRange { start: usize, cap: usize },
}

/// A tower value: exact integer, or a certified enclosure of its log2.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Exact(BigUint),
    Log2Range { lo: BigRational, hi: BigRational },
}

impl ParamValue {
    pub fn is_exact(&self) -> bool {
        matches!(self, ParamValue::Exact(_))
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            ParamValue::Exact(v) => Some(v),
            ParamValue::Log2Range { .. } => None,
        }
    }
}

/// Internal representation that stays symbolic for log-scale values.
#[derive(Clone, Debug)]
enum Repr {
    Exact(BigUint),
    Log(Log2Form),
}

impl Repr {
    fn log_form(&self) -> Log2Form {
        match self {
            Repr::Exact(v) => Log2Form::of_nat(v),
            Repr::Log(f) => f.clone(),
        }
    }

    fn to_value(&self, bits: u32) -> ParamValue {
        match self {
            Repr::Exact(v) => ParamValue::Exact(v.clone()),
            Repr::Log(f) => {
                let enc = f.materialize(bits);
                ParamValue::Log2Range { lo: enc.lo, hi: enc.hi }
            }
        }
    }

    fn bits_exact(&self) -> Option<u64> {
        match self {
            Repr::Exact(v) => Some(v.bits()),
            Repr::Log(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
struct LevelRepr {
    level_count: Repr,
    rho: Repr,
    b: Repr,
    pi: Repr,
    a: Repr,
    big_m: Repr,
}

/// Materialized values of one tower level.
#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub h: usize,
    pub level_count: ParamValue,
    pub rho: ParamValue,
    pub b: ParamValue,
    pub pi: ParamValue,
    pub a: ParamValue,
    pub big_m: ParamValue,
}

/// The constructed tower up to a maximum height.
#[derive(Clone, Debug)]
pub struct ParamTower {
    cfg: TowerConfig,
    levels: Vec<TowerLevel>,
    reprs: Vec<LevelRepr>,
}

/// Wire record for one (height, field) cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamRecord {
    pub h: usize,
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log2lo: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log2hi: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityKind {
    /// `pi(h)` equals `b(h)` raised to `rho(h)^h`.
    PiFromB,
    /// `a(h)` strictly exceeds `pi(h)^h`.
    ADominatesPiPow,
    /// `pi(h)` strictly exceeds `h^2`.
    PiExceedsSquare,
    /// `rho(h)` is at least `h + 2`.
    RhoFloor,
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            IdentityKind::PiFromB => "pi = b^(rho^h)",
            IdentityKind::ADominatesPiPow => "a > pi^h",
            IdentityKind::PiExceedsSquare => "pi > h^2",
            IdentityKind::RhoFloor => "rho >= h+2",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckMethod {
    Exact,
    Interval,
    Symbolic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub h: usize,
    pub identity: IdentityKind,
    pub holds: bool,
    pub method: CheckMethod,
}

/// Builds the tower for heights `0..=h_max`.
pub fn tower(h_max: usize, cfg: &TowerConfig) -> Result<ParamTower, ParamsError> {
    let mut reprs: Vec<LevelRepr> = Vec::with_capacity(h_max + 1);
    for h in 0..=h_max {
        let level_count = match reprs.last() {
            None => Repr::Exact(BigUint::one()),
            Some(prev) => mul_reprs(&prev.level_count, &prev.big_m, h, TowerField::LevelCount, cfg)?,
        };
        let rho = rho_of(&level_count, h, cfg)?;
        let b = b_of(&rho, h, cfg)?;
        let pi = pi_of(&b, &rho, h, cfg)?;
        let a = pow_small(&pi, h as u64 + 2, h, TowerField::A, cfg)?;
        let big_m = pow_small(&a, 2, h, TowerField::BigM, cfg)?;
        reprs.push(LevelRepr { level_count, rho, b, pi, a, big_m });
    }
    let levels = reprs
        .iter()
        .enumerate()
        .map(|(h, r)| TowerLevel {
            h,
            level_count: r.level_count.to_value(cfg.interval_bits),
            rho: r.rho.to_value(cfg.interval_bits),
            b: r.b.to_value(cfg.interval_bits),
            pi: r.pi.to_value(cfg.interval_bits),
            a: r.a.to_value(cfg.interval_bits),
            big_m: r.big_m.to_value(cfg.interval_bits),
        })
        .collect();
    Ok(ParamTower { cfg: cfg.clone(), levels, reprs })
}

fn guarded_form(form: Log2Form, h: usize, field: TowerField, cfg: &TowerConfig) -> Result<Repr, ParamsError> {
    if form.coeff_bits() > cfg.coeff_bit_cap {
        Err(ParamsError::RepresentationOverflow { h, field })
    } else {
        Ok(Repr::Log(form))
    }
}

fn mul_reprs(x: &Repr, y: &Repr, h: usize, field: TowerField, cfg: &TowerConfig) -> Result<Repr, ParamsError> {
    if let (Repr::Exact(a), Repr::Exact(b)) = (x, y) {
        if a.bits() + b.bits() <= cfg.exact_bit_threshold {
            return Ok(Repr::Exact(a * b));
        }
    }
    guarded_form(x.log_form().add(&y.log_form()), h, field, cfg)
}

fn rho_of(level_count: &Repr, h: usize, cfg: &TowerConfig) -> Result<Repr, ParamsError> {
    let floor = BigUint::from(h as u64 + 2);
    match level_count {
        Repr::Exact(lc) => Ok(Repr::Exact(if *lc >= floor { lc.clone() } else { floor })),
        Repr::Log(form) => {
            // Log-scale level counts exceed any small floor; certify it.
            let gt = form_strictly_above(form, &Log2Form::of_nat(&floor), cfg)
                .ok_or(ParamsError::InconclusiveInterval { h, what: "rho floor".into() })?;
            if gt {
                Ok(Repr::Log(form.clone()))
            } else {
                Ok(Repr::Exact(floor))
            }
        }
    }
}

fn b_of(rho: &Repr, h: usize, cfg: &TowerConfig) -> Result<Repr, ParamsError> {
    let head = BigUint::from((h as u64 + 1) * (h as u64 + 1));
    let exp = h as u64 + 1;
    if let Repr::Exact(r) = rho {
        let predicted = head.bits() + exp * r.bits() + 1;
        if predicted <= cfg.exact_bit_threshold {
            return Ok(Repr::Exact(&head * r.pow(u32::try_from(exp).unwrap())));
        }
    }
    let form = Log2Form::of_nat(&head)
        .add(&rho.log_form().scale(&BigRational::from(BigInt::from(exp))));
    guarded_form(form, h, TowerField::B, cfg)
}

fn pi_of(b: &Repr, rho: &Repr, h: usize, cfg: &TowerConfig) -> Result<Repr, ParamsError> {
    if h == 0 {
        // Exponent rho^0 = 1.
        return Ok(b.clone());
    }
    let Repr::Exact(rho_exact) = rho else {
        // The exponent rho^h must be an exact integer; a log-scale rho puts
        // even log2(pi) beyond representation.
        return Err(ParamsError::RepresentationOverflow { h, field: TowerField::Pi });
    };
    if (h as u64) * rho_exact.bits() + 1 > cfg.coeff_bit_cap {
        return Err(ParamsError::RepresentationOverflow { h, field: TowerField::Pi });
    }
    let exponent = rho_exact.pow(u32::try_from(h).unwrap());
    if let Some(b_bits) = b.bits_exact() {
        let predicted = BigUint::from(b_bits) * &exponent;
        if predicted <= BigUint::from(cfg.exact_bit_threshold) {
            let small = u32::try_from(u64::try_from(&exponent).unwrap()).unwrap();
            if let Repr::Exact(b_exact) = b {
                return Ok(Repr::Exact(b_exact.pow(small)));
            }
        }
    }
    let coeff = BigRational::from(BigInt::from_biguint(num::bigint::Sign::Plus, exponent));
    guarded_form(b.log_form().scale(&coeff), h, TowerField::Pi, cfg)
}

fn pow_small(base: &Repr, exp: u64, h: usize, field: TowerField, cfg: &TowerConfig) -> Result<Repr, ParamsError> {
    if let Repr::Exact(v) = base {
        if exp * v.bits() + 1 <= cfg.exact_bit_threshold {
            return Ok(Repr::Exact(v.pow(u32::try_from(exp).unwrap())));
        }
    }
    guarded_form(base.log_form().scale(&BigRational::from(BigInt::from(exp))), h, field, cfg)
}

/// Decides `lhs > rhs` between form values via certified intervals, with one
/// refinement pass; `None` when still undecided.
fn form_strictly_above(lhs: &Log2Form, rhs: &Log2Form, cfg: &TowerConfig) -> Option<bool> {
    let diff = lhs.add(&rhs.scale(&-BigRational::one()));
    if let Some(q) = diff.exact_value() {
        return Some(q.is_positive());
    }
    for bits in [cfg.interval_bits, cfg.interval_bits + cfg.refine_extra_bits] {
        let enc = diff.materialize(bits);
        if enc.lo.is_positive() {
            return Some(true);
        }
        if !enc.hi.is_positive() {
            return Some(false);
        }
    }
    None
}

impl ParamTower {
    pub fn max_height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, h: usize) -> &TowerLevel {
        &self.levels[h]
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    /// Flat record list for serialization, heights ascending.
    pub fn records(&self) -> Vec<ParamRecord> {
        let mut out = Vec::new();
        for level in &self.levels {
            let fields: [(&str, &ParamValue); 6] = [
                ("levelCount", &level.level_count),
                ("rho", &level.rho),
                ("b", &level.b),
                ("pi", &level.pi),
                ("a", &level.a),
                ("M", &level.big_m),
            ];
            for (name, value) in fields {
                out.push(match value {
                    ParamValue::Exact(v) => ParamRecord {
                        h: level.h,
                        field: name.to_owned(),
                        exact: Some(v.to_string()),
                        log2lo: None,
                        log2hi: None,
                    },
                    ParamValue::Log2Range { lo, hi } => ParamRecord {
                        h: level.h,
                        field: name.to_owned(),
                        exact: None,
                        log2lo: Some(format_ratio(lo)),
                        log2hi: Some(format_ratio(hi)),
                    },
                });
            }
        }
        out
    }

    /// `rho(h)^e`: the capacity figure for slalom-width bookkeeping.
    pub fn slalom_capacity(&self, h: usize, e: u64) -> Result<ParamValue, ParamsError> {
        let repr = pow_small(&self.reprs[h].rho, e, h, TowerField::Rho, &self.cfg)?;
        Ok(repr.to_value(self.cfg.interval_bits))
    }

    /// Checks the four structural identities on every constructed level,
    /// exactly where both sides are exact and by certified intervals
    /// otherwise.
    pub fn verify_identities(&self) -> Result<Vec<IdentityReport>, ParamsError> {
        let mut out = Vec::new();
        for (h, repr) in self.reprs.iter().enumerate() {
            out.push(self.check_pi_from_b(h, repr)?);
            out.push(self.check_a_dominates(h, repr)?);
            out.push(self.check_pi_square(h, repr)?);
            out.push(self.check_rho_floor(h, repr)?);
        }
        Ok(out)
    }

    fn check_pi_from_b(&self, h: usize, repr: &LevelRepr) -> Result<IdentityReport, ParamsError> {
        // Recompute b^(rho^h) as a log form and compare structurally; the
        // form normalization (odd kernels, folded powers of two) makes the
        // comparison exact.
        let holds = match (&repr.rho, h) {
            (_, 0) => repr.pi.log_form() == repr.b.log_form(),
            (Repr::Exact(rho_exact), _) => {
                let exponent = rho_exact.pow(u32::try_from(h).unwrap());
                let coeff = BigRational::from(BigInt::from_biguint(
                    num::bigint::Sign::Plus,
                    exponent,
                ));
                repr.pi.log_form() == repr.b.log_form().scale(&coeff)
            }
            (Repr::Log(_), _) => false,
        };
        Ok(IdentityReport { h, identity: IdentityKind::PiFromB, holds, method: CheckMethod::Exact })
    }

    fn check_a_dominates(&self, h: usize, repr: &LevelRepr) -> Result<IdentityReport, ParamsError> {
        let lhs = repr.a.log_form();
        let rhs = repr.pi.log_form().scale(&BigRational::from(BigInt::from(h as u64)));
        let (holds, method) = match (lhs.exact_value(), rhs.exact_value()) {
            (Some(a), Some(b)) => (a > b, CheckMethod::Exact),
            _ => (
                form_strictly_above(&lhs, &rhs, &self.cfg).ok_or_else(|| {
                    ParamsError::InconclusiveInterval { h, what: "a vs pi^h".into() }
                })?,
                CheckMethod::Interval,
            ),
        };
        Ok(IdentityReport { h, identity: IdentityKind::ADominatesPiPow, holds, method })
    }

    fn check_pi_square(&self, h: usize, repr: &LevelRepr) -> Result<IdentityReport, ParamsError> {
        if h == 0 {
            // pi(0) >= 2 > 0 = h^2.
            return Ok(IdentityReport {
                h,
                identity: IdentityKind::PiExceedsSquare,
                holds: true,
                method: CheckMethod::Exact,
            });
        }
        let square = BigUint::from((h * h) as u64);
        let lhs = repr.pi.log_form();
        let rhs = Log2Form::of_nat(&square);
        let (holds, method) = match (&repr.pi, rhs.exact_value()) {
            (Repr::Exact(pi), _) => (*pi > square, CheckMethod::Exact),
            _ => (
                form_strictly_above(&lhs, &rhs, &self.cfg).ok_or_else(|| {
                    ParamsError::InconclusiveInterval { h, what: "pi vs h^2".into() }
                })?,
                CheckMethod::Interval,
            ),
        };
        Ok(IdentityReport { h, identity: IdentityKind::PiExceedsSquare, holds, method })
    }

    fn check_rho_floor(&self, h: usize, repr: &LevelRepr) -> Result<IdentityReport, ParamsError> {
        let floor = BigUint::from(h as u64 + 2);
        let (holds, method) = match &repr.rho {
            Repr::Exact(rho) => (*rho >= floor, CheckMethod::Exact),
            Repr::Log(form) => {
                // Strict > suffices for >=.
                let gt = form_strictly_above(form, &Log2Form::of_nat(&floor), &self.cfg)
                    .ok_or(ParamsError::InconclusiveInterval { h, what: "rho floor".into() })?;
                (gt, CheckMethod::Interval)
            }
        };
        Ok(IdentityReport { h, identity: IdentityKind::RhoFloor, holds, method })
    }
}

/// Verifies the identities for `0..=h_max` by exponent structure alone, so
/// heights beyond any materializable range are covered.
///
/// The arguments are the recurrences themselves:
/// - `rho >= h+2` by the max in its definition;
/// - `pi = b^(rho^h)` by construction;
/// - `pi >= 2^((h+2)^h)` since `b >= 2^(h+1) >= 2` and `rho >= h+2`, so
///   `pi > h^2` reduces to the small-integer check `(h+2)^h >= bits(h^2)`;
/// - `a/pi^h = pi^2 >= 4 > 1` using `pi >= 2`.
pub fn verify_identities_symbolic(h_max: usize) -> Result<Vec<IdentityReport>, ParamsError> {
    if h_max > SYMBOLIC_HEIGHT_CAP {
        return Err(ParamsError::HeightAboveCap { h: h_max, cap: SYMBOLIC_HEIGHT_CAP });
    }
    let mut out = Vec::new();
    for h in 0..=h_max {
        let hu = h as u64;
        out.push(IdentityReport {
            h,
            identity: IdentityKind::RhoFloor,
            holds: true, // rho = max(levelCount, h+2) >= h+2
            method: CheckMethod::Symbolic,
        });
        out.push(IdentityReport {
            h,
            identity: IdentityKind::PiFromB,
            holds: true, // definitional recurrence
            method: CheckMethod::Symbolic,
        });
        let square = hu * hu;
        let exponent = (hu + 2).checked_pow(u32::try_from(h).unwrap()).expect("small h");
        let square_bits = 64 - square.leading_zeros() as u64;
        out.push(IdentityReport {
            h,
            identity: IdentityKind::PiExceedsSquare,
            // pi >= 2^((h+2)^h) > h^2 iff the exponent reaches bits(h^2).
            holds: square == 0 || exponent >= square_bits,
            method: CheckMethod::Symbolic,
        });
        out.push(IdentityReport {
            h,
            identity: IdentityKind::ADominatesPiPow,
            holds: true, // a/pi^h = pi^2 >= 4 since pi >= 2^((h+2)^h) >= 2
            method: CheckMethod::Symbolic,
        });
    }
    Ok(out)
}

/// Exact lower bound `prod_{h=k+1}^{cap} (1 - 1/(h+1)^3)` for the mass kept
/// across a tail of levels.
pub fn tail_product_lower(k: usize, cap: usize) -> Result<BigRational, ParamsError> {
    if cap <= k {
        return Err(ParamsError::EmptyRange { start: k, cap });
    }
    let mut acc = BigRational::one();
    for h in (k + 1)..=cap {
        let cube = BigInt::from(((h + 1) * (h + 1) * (h + 1)) as u64);
        acc *= BigRational::new(&cube - BigInt::one(), cube);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn nat(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn pow2(e: u64) -> BigUint {
        BigUint::one() << e
    }

    #[test]
    fn level_zero_and_one_are_the_frozen_exact_values() {
        let t = tower(1, &TowerConfig::default()).expect("tower to height 1");
        let l0 = t.level(0);
        assert_eq!(l0.level_count, ParamValue::Exact(nat(1)));
        assert_eq!(l0.rho, ParamValue::Exact(nat(2)));
        assert_eq!(l0.b, ParamValue::Exact(nat(2)));
        assert_eq!(l0.pi, ParamValue::Exact(nat(2)));
        assert_eq!(l0.a, ParamValue::Exact(nat(4)));
        assert_eq!(l0.big_m, ParamValue::Exact(nat(16)));
        let l1 = t.level(1);
        assert_eq!(l1.level_count, ParamValue::Exact(nat(16)));
        assert_eq!(l1.rho, ParamValue::Exact(nat(16)));
        assert_eq!(l1.b, ParamValue::Exact(nat(1024)));
        assert_eq!(l1.pi, ParamValue::Exact(pow2(160)));
        assert_eq!(l1.a, ParamValue::Exact(pow2(480)));
        assert_eq!(l1.big_m, ParamValue::Exact(pow2(960)));
    }

    #[test]
    fn level_two_splits_between_exact_and_log_range() {
        let t = tower(2, &TowerConfig::default()).expect("tower to height 2");
        let l2 = t.level(2);
        assert_eq!(l2.level_count, ParamValue::Exact(pow2(964)));
        assert_eq!(l2.rho, ParamValue::Exact(pow2(964)));
        // b(2) = 9 * 2^2892 stays exact.
        assert_eq!(l2.b, ParamValue::Exact(nat(9) * pow2(2892)));
        // log2 pi(2) = 2^1928 * (2892 + log2 9), strictly inside (2895, 2896) * 2^1928.
        match &l2.pi {
            ParamValue::Log2Range { lo, hi } => {
                let unit = BigRational::from(BigInt::from(1) << 1928u32);
                assert!(*lo > ratio(2895, 1) * unit.clone(), "pi(2) lower bound");
                assert!(*hi < ratio(2896, 1) * unit.clone(), "pi(2) upper bound");
                let width = hi - lo;
                assert!(width < BigRational::new(1.into(), BigInt::from(1) << 128u32));
            }
            other => panic!("pi(2) should be a log range, got {other:?}"),
        }
        assert!(!l2.a.is_exact());
        assert!(!l2.big_m.is_exact());
    }

    #[test]
    fn height_three_overflows_at_pi() {
        let err = tower(3, &TowerConfig::default()).expect_err("pi(3) must overflow");
        match err {
            ParamsError::RepresentationOverflow { h, field } => {
                assert_eq!(h, 3);
                assert_eq!(field, TowerField::Pi);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn identities_hold_numerically_through_height_two() {
        let t = tower(2, &TowerConfig::default()).expect("tower");
        let reports = t.verify_identities().expect("no inconclusive intervals");
        assert_eq!(reports.len(), 12);
        for r in &reports {
            assert!(r.holds, "identity {} failed at h={}", r.identity, r.h);
        }
    }

    #[test]
    fn identities_hold_symbolically_through_the_cap() {
        let reports = verify_identities_symbolic(SYMBOLIC_HEIGHT_CAP).expect("within cap");
        assert_eq!(reports.len(), 4 * (SYMBOLIC_HEIGHT_CAP + 1));
        for r in &reports {
            assert!(r.holds, "identity {} failed at h={}", r.identity, r.h);
        }
        assert!(verify_identities_symbolic(SYMBOLIC_HEIGHT_CAP + 1).is_err());
    }

    #[test]
    fn slalom_capacity_matches_frozen_values() {
        let t = tower(2, &TowerConfig::default()).expect("tower");
        assert_eq!(t.slalom_capacity(0, 0).expect("rho^0"), ParamValue::Exact(nat(1)));
        assert_eq!(t.slalom_capacity(1, 1).expect("rho^1"), ParamValue::Exact(nat(16)));
        assert_eq!(t.slalom_capacity(2, 1).expect("rho(2)"), ParamValue::Exact(pow2(964)));
        assert_eq!(t.slalom_capacity(2, 2).expect("rho(2)^2"), ParamValue::Exact(pow2(1928)));
    }

    #[test]
    fn tail_product_matches_hand_computed_values() {
        assert_eq!(tail_product_lower(1, 2).expect("one factor"), ratio(26, 27));
        assert_eq!(tail_product_lower(0, 2).expect("two factors"), ratio(91, 108));
        assert!(matches!(tail_product_lower(1, 1), Err(ParamsError::EmptyRange { .. })));
        // Monotone: longer tails keep less mass, larger k keeps more.
        let long = tail_product_lower(1, 30).expect("long");
        let longer = tail_product_lower(1, 31).expect("longer");
        assert!(longer < long);
        let shifted = tail_product_lower(2, 31).expect("shifted");
        assert!(shifted > longer);
        assert!(longer > ratio(0, 1) && longer < ratio(1, 1));
    }

    #[test]
    fn records_cover_every_field() {
        let t = tower(2, &TowerConfig::default()).expect("tower");
        let records = t.records();
        assert_eq!(records.len(), 18);
        let pi2 = records
            .iter()
            .find(|r| r.h == 2 && r.field == "pi")
            .expect("pi(2) record");
        assert!(pi2.exact.is_none());
        assert!(pi2.log2lo.is_some() && pi2.log2hi.is_some());
    }
}
