//! Finite branching spaces, tree conditions, norms, and refinements.
//!
//! A [`CreatureSpace`] fixes, per height `h`, a successor count `M-hat(h)`
//! and a logarithm base `a-hat(h)`. A [`Condition`] is a subtree of the full
//! height-`H` tree given by the kept successor set at every kept internal
//! node. The norm of a node keeping `n` of `M` successors is
//! `log_base(M / (M - n))` (infinite at `n = M`); every norm comparison here
//! is decided exactly as an integer power inequality, never via floats.

use crate::rational::format_ratio;
use num::{BigRational, BigUint, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

/// Default output cap for exhaustive enumerations.
pub const DEFAULT_ENUM_CAP: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum CreatureError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid condition: {0}")]
    InvalidCondition(String),
    #[error("height {h} out of range {lo}..={hi}")]
    HeightRange { h: usize, lo: usize, hi: usize },
    #[error("successor {value} is the sole successor of {node}")]
    WouldEmpty { node: Node, value: u32 },
    #[error("successor index {value} out of range at height {h}")]
    IndexOutOfRange { value: u32, h: usize },
    #[error("weights must sum to 1, got {0}")]
    WeightSum(String),
    #[error("witness {0} is not kept at or above the stem in every condition")]
    WitnessNotShared(Node),
    #[error("conditions live on different spaces")]
    SpaceMismatch,
    #[error("no conditions supplied")]
    EmptyInput,
    #[error("space height {actual} below required {needed}")]
    HeightTooSmall { needed: usize, actual: usize },
    #[error("enumeration needs {size} items, above the cap {cap}")]
    EnumerationInfeasible { size: String, cap: usize },
    #[error("invalid threshold {0}: power exponents must stay small")]
    InvalidThreshold(String),
}

/// Path of successor indices from the root; the height is the length.
/// Ordering is lexicographic with proper prefixes first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Node(pub Vec<u32>);

impl Node {
    pub fn root() -> Self {
        Node(Vec::new())
    }

    pub fn height(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, index: u32) -> Node {
        let mut path = self.0.clone();
        path.push(index);
        Node(path)
    }

    pub fn parent(&self) -> Option<Node> {
        if self.0.is_empty() {
            None
        } else {
            Some(Node(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn prefix(&self, len: usize) -> Node {
        Node(self.0[..len].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Node) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for Node {
    fmt::fmt_display_body!();
}

/// Per-height structure of the full tree: `succ_count[h]` children below
/// every height-`h` node, norms at height `h` taken to base `base[h]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceWire", into = "SpaceWire")]
pub struct CreatureSpace {
    height: usize,
    succ_count: Vec<u64>,
    base: Vec<u64>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SpaceWire {
    height: usize,
    succ_count: Vec<u64>,
    base: Vec<u64>,
}

impl TryFrom<SpaceWire> for CreatureSpace {
    type Error = CreatureError;
    fn try_from(w: SpaceWire) -> Result<Self, Self::Error> {
        if w.height != w.succ_count.len() || w.height != w.base.len() {
            return Err(CreatureError::InvalidSpace(format!(
                "height {} does not match successor/base vector lengths {}/{}",
                w.height,
                w.succ_count.len(),
                w.base.len()
            )));
        }
        CreatureSpace::new(w.succ_count, w.base)
    }
}

impl From<CreatureSpace> for SpaceWire {
    fn from(s: CreatureSpace) -> SpaceWire {
        SpaceWire { height: s.height, succ_count: s.succ_count, base: s.base }
    }
}

impl CreatureSpace {
    /// Builds a space of height `succ_count.len()`; every width and base
    /// must be at least 2.
    pub fn new(succ_count: Vec<u64>, base: Vec<u64>) -> Result<Self, CreatureError> {
        if succ_count.is_empty() {
            return Err(CreatureError::InvalidSpace("height must be at least 1".into()));
        }
        if succ_count.len() != base.len() {
            return Err(CreatureError::InvalidSpace(format!(
                "successor vector length {} != base vector length {}",
                succ_count.len(),
                base.len()
            )));
        }
        if let Some(m) = succ_count.iter().find(|&&m| m < 2) {
            return Err(CreatureError::InvalidSpace(format!("successor count {m} below 2")));
        }
        if let Some(a) = base.iter().find(|&&a| a < 2) {
            return Err(CreatureError::InvalidSpace(format!("norm base {a} below 2")));
        }
        Ok(CreatureSpace { height: succ_count.len(), succ_count, base })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `M-hat(h)`: successors below a height-`h` node.
    pub fn succ_count(&self, h: usize) -> u64 {
        self.succ_count[h]
    }

    /// `a-hat(h)`: norm base at height `h`.
    pub fn base(&self, h: usize) -> u64 {
        self.base[h]
    }

    /// Base grows past the halving scale: `a-hat(h) > 2^h`.
    pub fn ed_valid(&self, h: usize) -> bool {
        BigUint::from(self.base[h]) > (BigUint::one() << h)
    }

    /// Base supports `j`-fold intersections: `a-hat(h) > j^h`.
    pub fn intersect_valid(&self, h: usize, j: u64) -> bool {
        BigUint::from(self.base[h]) > BigUint::from(j).pow(h as u32)
    }

    /// Base supports the weighted split bound: `a-hat(h) > h^(2h)`.
    pub fn fubini_valid(&self, h: usize) -> bool {
        BigUint::from(self.base[h]) > BigUint::from(h as u64).pow(2 * h as u32)
    }

    /// Nodes of the full tree at height `h`.
    pub fn level_size(&self, h: usize) -> BigUint {
        self.level_size_range(0, h)
    }

    /// Product of widths over heights `from..to`.
    pub fn level_size_range(&self, from: usize, to: usize) -> BigUint {
        let mut acc = BigUint::one();
        for h in from..to {
            acc *= BigUint::from(self.succ_count[h]);
        }
        acc
    }
}

/// Exact decision of `norm >= threshold` (or strict `>`), where the norm of
/// keeping `kept` of `big_m` successors at base `base` is
/// `log_base(big_m / (big_m - kept))`, infinite when everything is kept.
///
/// For positive `threshold = p/q` the comparison is the integer power
/// inequality `big_m^q >= base^p * (big_m - kept)^q`.
pub fn norm_cmp(
    big_m: &BigUint,
    base: &BigUint,
    kept: &BigUint,
    threshold: &BigRational,
    strict: bool,
) -> bool {
    assert!(kept <= big_m, "kept exceeds the width");
    if kept == big_m {
        return true;
    }
    if threshold.is_negative() {
        return true;
    }
    if threshold.is_zero() {
        return if strict { !kept.is_zero() } else { true };
    }
    let p = u32::try_from(threshold.numer().magnitude())
        .unwrap_or_else(|_| panic!("threshold numerator too large: {}", threshold));
    let q = u32::try_from(threshold.denom().magnitude())
        .unwrap_or_else(|_| panic!("threshold denominator too large: {}", threshold));
    let lhs = big_m.pow(q);
    let rhs = base.pow(p) * (big_m - kept).pow(q);
    if strict {
        lhs > rhs
    } else {
        lhs >= rhs
    }
}

/// Exact decision of "removing one successor from a kept set of size `kept`
/// drops the norm by less than `1/h`", i.e.
/// `(big_m - kept + 1)^h < base * (big_m - kept)^h`. Requires `kept < big_m`
/// (dropping from a full set leaves an infinite norm on both sides).
pub fn removal_drop_small(big_m: &BigUint, base: &BigUint, kept: &BigUint, h: usize) -> bool {
    assert!(!kept.is_zero() && kept < big_m, "need 0 < kept < width");
    let gap = big_m - kept;
    (&gap + BigUint::one()).pow(h as u32) < base * gap.pow(h as u32)
}

/// Validity threshold `1 + 1/h*` for a stem height, `None` meaning
/// "full successor sets required" (stem at the root).
pub fn stem_threshold(h_star: usize) -> Option<BigRational> {
    if h_star == 0 {
        None
    } else {
        Some(BigRational::new((h_star as i64 + 1).into(), (h_star as i64).into()))
    }
}

/// Wire shape of a condition: the sorted list of all kept nodes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionWire {
    pub nodes: Vec<Node>,
}

/// A subtree of the full tree: every kept internal node maps to its
/// nonempty kept successor set; kept leaves are implied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    space: CreatureSpace,
    succ: BTreeMap<Node, BTreeSet<u32>>,
}

impl Condition {
    /// The full tree.
    pub fn full(space: CreatureSpace) -> Condition {
        let mut succ = BTreeMap::new();
        let mut frontier = vec![Node::root()];
        for h in 0..space.height() {
            let all: BTreeSet<u32> = (0..u32::try_from(space.succ_count(h)).expect("width"))
                .collect();
            let mut next = Vec::new();
            for t in frontier {
                for &i in &all {
                    next.push(t.child(i));
                }
                succ.insert(t, all.clone());
            }
            frontier = next;
        }
        Condition { space, succ }
    }

    /// The path to `node` followed by the full tree above it.
    pub fn cone(space: CreatureSpace, node: &Node) -> Result<Condition, CreatureError> {
        check_node(&space, node)?;
        let mut succ = BTreeMap::new();
        for d in 0..node.height() {
            succ.insert(node.prefix(d), BTreeSet::from([node.0[d]]));
        }
        let mut frontier = vec![node.clone()];
        for h in node.height()..space.height() {
            let all: BTreeSet<u32> = (0..u32::try_from(space.succ_count(h)).expect("width"))
                .collect();
            let mut next = Vec::new();
            for t in frontier {
                for &i in &all {
                    next.push(t.child(i));
                }
                succ.insert(t, all.clone());
            }
            frontier = next;
        }
        Ok(Condition { space, succ })
    }

    /// The single branch through a full-height node.
    pub fn single_branch(space: CreatureSpace, leaf: &Node) -> Result<Condition, CreatureError> {
        if leaf.height() != space.height() {
            return Err(CreatureError::InvalidCondition(format!(
                "branch node {leaf} does not reach height {}",
                space.height()
            )));
        }
        Condition::cone(space, leaf)
    }

    /// Builds from an explicit successor map, validating structure.
    pub fn new(
        space: CreatureSpace,
        succ: BTreeMap<Node, BTreeSet<u32>>,
    ) -> Result<Condition, CreatureError> {
        if !succ.contains_key(&Node::root()) {
            return Err(CreatureError::InvalidCondition("root missing".into()));
        }
        for (t, s) in &succ {
            let h = t.height();
            if h >= space.height() {
                return Err(CreatureError::InvalidCondition(format!(
                    "internal node {t} at or above the height"
                )));
            }
            if s.is_empty() {
                return Err(CreatureError::InvalidCondition(format!("empty successors at {t}")));
            }
            for &i in s {
                if u64::from(i) >= space.succ_count(h) {
                    return Err(CreatureError::IndexOutOfRange { value: i, h });
                }
                if h + 1 < space.height() && !succ.contains_key(&t.child(i)) {
                    return Err(CreatureError::InvalidCondition(format!(
                        "kept child {} of {t} has no entry",
                        t.child(i)
                    )));
                }
            }
            if let Some(parent) = t.parent() {
                let ok = succ
                    .get(&parent)
                    .is_some_and(|ps| ps.contains(t.0.last().expect("nonroot")));
                if !ok {
                    return Err(CreatureError::InvalidCondition(format!(
                        "node {t} not reachable from its parent"
                    )));
                }
            }
        }
        Ok(Condition { space, succ })
    }

    /// Rebuilds from the sorted node list shape.
    pub fn from_node_list(
        space: CreatureSpace,
        nodes: &[Node],
    ) -> Result<Condition, CreatureError> {
        let set: BTreeSet<&Node> = nodes.iter().collect();
        let mut succ: BTreeMap<Node, BTreeSet<u32>> = BTreeMap::new();
        for node in nodes {
            check_node(&space, node)?;
            if node.height() < space.height() {
                succ.entry(node.clone()).or_default();
            }
            if let Some(parent) = node.parent() {
                if !set.contains(&parent) {
                    return Err(CreatureError::InvalidCondition(format!(
                        "node {node} listed without its parent"
                    )));
                }
                succ.entry(parent).or_default().insert(*node.0.last().expect("nonroot"));
            }
        }
        Condition::new(space, succ)
    }

    pub fn space(&self) -> &CreatureSpace {
        &self.space
    }

    /// All kept nodes, leaves included, in lexicographic order.
    pub fn node_list(&self) -> Vec<Node> {
        let mut out: Vec<Node> = self.succ.keys().cloned().collect();
        let leaf_height = self.space.height();
        for (t, s) in &self.succ {
            if t.height() + 1 == leaf_height {
                for &i in s {
                    out.push(t.child(i));
                }
            }
        }
        out.sort();
        out
    }

    pub fn to_wire(&self) -> ConditionWire {
        ConditionWire { nodes: self.node_list() }
    }

    pub fn from_wire(space: CreatureSpace, wire: &ConditionWire) -> Result<Condition, CreatureError> {
        Condition::from_node_list(space, &wire.nodes)
    }

    pub fn successors(&self, t: &Node) -> Option<&BTreeSet<u32>> {
        self.succ.get(t)
    }

    pub fn is_kept(&self, t: &Node) -> bool {
        if t.height() > self.space.height() {
            return false;
        }
        if t.height() == self.space.height() {
            let parent = t.parent().expect("leaf of positive height");
            return self
                .succ
                .get(&parent)
                .is_some_and(|s| s.contains(t.0.last().expect("nonroot")));
        }
        self.succ.contains_key(t)
    }

    /// Kept nodes at one height.
    pub fn kept_at(&self, h: usize) -> Vec<Node> {
        if h == 0 {
            return vec![Node::root()];
        }
        let mut out = Vec::new();
        for (t, s) in self.succ.range(level_range(h - 1)) {
            if t.height() == h - 1 {
                for &i in s {
                    out.push(t.child(i));
                }
            }
        }
        out.sort();
        out
    }

    /// Number of kept nodes at one height (cheap; no materialization).
    pub fn kept_count_at(&self, h: usize) -> BigUint {
        if h == 0 {
            return BigUint::one();
        }
        let mut acc = BigUint::zero();
        for (t, s) in self.succ.range(level_range(h - 1)) {
            if t.height() == h - 1 {
                acc += BigUint::from(s.len() as u64);
            }
        }
        acc
    }

    /// The first node with at least two kept successors; for a single
    /// branch, its deepest node.
    pub fn stem(&self) -> Node {
        let mut cur = Node::root();
        loop {
            if cur.height() == self.space.height() {
                return cur;
            }
            let s = self.succ.get(&cur).expect("kept internal node");
            if s.len() >= 2 {
                return cur;
            }
            cur = cur.child(*s.iter().next().expect("nonempty"));
        }
    }

    /// Exact test `norm(t) >= threshold` (or strict) for a kept internal node.
    pub fn node_norm_at_least(&self, t: &Node, threshold: &BigRational, strict: bool) -> bool {
        let s = self.succ.get(t).expect("kept internal node");
        let h = t.height();
        norm_cmp(
            &BigUint::from(self.space.succ_count(h)),
            &BigUint::from(self.space.base(h)),
            &BigUint::from(s.len() as u64),
            threshold,
            strict,
        )
    }

    /// Validity: all norms at or above the stem reach `1 + 1/h*`; a stem at
    /// the root demands the full tree.
    pub fn is_condition(&self) -> bool {
        let h_star = self.stem().height();
        match stem_threshold(h_star) {
            None => self
                .succ
                .iter()
                .all(|(t, s)| s.len() as u64 == self.space.succ_count(t.height())),
            Some(thr) => self
                .succ
                .iter()
                .filter(|(t, _)| t.height() >= h_star)
                .all(|(t, _)| self.node_norm_at_least(t, &thr, false)),
        }
    }

    /// The recorded loss `1/m` with `m = floor((h* - 1)/3)`, defined when
    /// `m >= 2` and every norm at or above the stem reaches `1 + 1/m`.
    pub fn loss(&self) -> Option<BigRational> {
        let h_star = self.stem().height();
        if h_star < 7 {
            return None;
        }
        let m = (h_star as i64 - 1) / 3;
        let thr = BigRational::new((m + 1).into(), m.into());
        let ok = self
            .succ
            .iter()
            .filter(|(t, _)| t.height() >= h_star)
            .all(|(t, _)| self.node_norm_at_least(t, &thr, false));
        if ok {
            Some(BigRational::new(1.into(), m.into()))
        } else {
            None
        }
    }

    /// Removes successor index `value` from every kept node at height `h`.
    /// Purely structural: the result may fail norm validity. Errors when the
    /// index is some node's sole successor.
    pub fn avoid_level(&self, h: usize, value: u32) -> Result<Condition, CreatureError> {
        if h >= self.space.height() {
            return Err(CreatureError::HeightRange { h, lo: 0, hi: self.space.height() - 1 });
        }
        if u64::from(value) >= self.space.succ_count(h) {
            return Err(CreatureError::IndexOutOfRange { value, h });
        }
        for (t, s) in self.succ.range(level_range(h)) {
            if t.height() == h && s.len() == 1 && s.contains(&value) {
                return Err(CreatureError::WouldEmpty { node: t.clone(), value });
            }
        }
        let mut succ = self.succ.clone();
        let mut removed_roots = Vec::new();
        for (t, s) in succ.iter_mut() {
            if t.height() == h && s.remove(&value) {
                removed_roots.push(t.child(value));
            }
        }
        for root in removed_roots {
            remove_subtree(&mut succ, &root);
        }
        Condition::new(self.space.clone(), succ)
    }

    /// Fraction of the full cone kept at height `h`, relative to the stem:
    /// `kept(h) / prod_{i = h*}^{h-1} M-hat(i)`.
    pub fn relative_count(&self, h: usize) -> Result<BigRational, CreatureError> {
        let h_star = self.stem().height();
        if h < h_star || h > self.space.height() {
            return Err(CreatureError::HeightRange { h, lo: h_star, hi: self.space.height() });
        }
        let kept = self.kept_count_at(h);
        let full = self.space.level_size_range(h_star, h);
        Ok(BigRational::new(biguint_to_int(&kept), biguint_to_int(&full)))
    }
}

fn biguint_to_int(v: &BigUint) -> num::BigInt {
    num::BigInt::from_biguint(num::bigint::Sign::Plus, v.clone())
}

fn check_node(space: &CreatureSpace, node: &Node) -> Result<(), CreatureError> {
    if node.height() > space.height() {
        return Err(CreatureError::HeightRange {
            h: node.height(),
            lo: 0,
            hi: space.height(),
        });
    }
    for (h, &i) in node.0.iter().enumerate() {
        if u64::from(i) >= space.succ_count(h) {
            return Err(CreatureError::IndexOutOfRange { value: i, h });
        }
    }
    Ok(())
}

/// Range over the node keys of exactly height `h` (lexicographic order puts
/// a height-`h` node between its own prefix-path and any deeper extension,
/// so a plain range does not work; this helper scans keys whose length is
/// `h` inside the full map range). Kept simple: full scan bounds.
fn level_range(_h: usize) -> std::ops::RangeFull {
    ..
}

fn remove_subtree(succ: &mut BTreeMap<Node, BTreeSet<u32>>, root: &Node) {
    let doomed: Vec<Node> = succ
        .range(root.clone()..)
        .take_while(|(t, _)| root.is_prefix_of(t))
        .map(|(t, _)| t.clone())
        .collect();
    for t in doomed {
        succ.remove(&t);
    }
}

/// The set of successor indices whose weighted membership mass exceeds
/// `1 - 1/h^2`: `sets` pairs successor subsets at height `h` with weights
/// that must be nonnegative and sum to one.
pub fn weighted_success_set(
    space: &CreatureSpace,
    s: &Node,
    sets: &[(BTreeSet<u32>, BigRational)],
    h: usize,
) -> Result<BTreeSet<u32>, CreatureError> {
    if h == 0 || h >= space.height() + 1 || s.height() != h {
        return Err(CreatureError::HeightRange { h, lo: 1, hi: space.height() });
    }
    check_node(space, s)?;
    let width = space.succ_count(h.min(space.height() - 1));
    let width = if h < space.height() { space.succ_count(h) } else { width };
    let mut total = BigRational::zero();
    for (set, w) in sets {
        if w.is_negative() {
            return Err(CreatureError::WeightSum(format_ratio(w)));
        }
        for &i in set {
            if u64::from(i) >= width {
                return Err(CreatureError::IndexOutOfRange { value: i, h });
            }
        }
        total += w;
    }
    if !total.is_one() {
        return Err(CreatureError::WeightSum(format_ratio(&total)));
    }
    let h_big = BigRational::from(num::BigInt::from((h * h) as u64));
    let threshold = BigRational::one() - BigRational::one() / h_big;
    let mut out = BTreeSet::new();
    for i in 0..u32::try_from(width).expect("width") {
        let mut mass = BigRational::zero();
        for (set, w) in sets {
            if set.contains(&i) {
                mass += w;
            }
        }
        if mass > threshold {
            out.insert(i);
        }
    }
    Ok(out)
}

/// One linkedness class: conditions keeping `node` whose stem is at or
/// below its height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkedClass {
    pub node: Node,
}

impl LinkedClass {
    pub fn admits(&self, c: &Condition) -> bool {
        c.is_kept(&self.node) && c.stem().height() <= self.node.height()
    }
}

/// The linkedness classes at height `h`: one per full-tree node, in
/// lexicographic order. Errors when the level is too wide to enumerate.
pub fn linked_family(
    space: &CreatureSpace,
    h: usize,
    cap: usize,
) -> Result<Vec<LinkedClass>, CreatureError> {
    if h > space.height() {
        return Err(CreatureError::HeightRange { h, lo: 0, hi: space.height() });
    }
    let size = space.level_size(h);
    if size > BigUint::from(cap as u64) {
        return Err(CreatureError::EnumerationInfeasible { size: size.to_string(), cap });
    }
    let mut nodes = vec![Node::root()];
    for height in 0..h {
        let width = u32::try_from(space.succ_count(height)).expect("width");
        let mut next = Vec::with_capacity(nodes.len() * width as usize);
        for t in nodes {
            for i in 0..width {
                next.push(t.child(i));
            }
        }
        nodes = next;
    }
    Ok(nodes.into_iter().map(|node| LinkedClass { node }).collect())
}

/// Common refinement of `conds` through a shared witness node.
///
/// A single input returns itself. Otherwise the kept-node intersection
/// restricted to the witness cone is pruned bottom-up, keeping a node of
/// height `h'` only while its surviving successor set has norm at least
/// `1 + 1/w - 1/h'` (`w` = witness height; full sets demanded at `w = 0`),
/// and the survivor is restricted to the cone of the lexicographically
/// least branch cut at height `2w`. `Ok(None)` means pruning emptied the
/// intersection.
pub fn common_refinement(
    conds: &[Condition],
    witness: &Node,
) -> Result<Option<Condition>, CreatureError> {
    let first = conds.first().ok_or(CreatureError::EmptyInput)?;
    let space = first.space.clone();
    if conds.iter().any(|c| c.space != space) {
        return Err(CreatureError::SpaceMismatch);
    }
    check_node(&space, witness)?;
    for c in conds {
        if !c.is_kept(witness) || !c.stem().is_prefix_of(witness) {
            return Err(CreatureError::WitnessNotShared(witness.clone()));
        }
    }
    if conds.len() == 1 {
        return Ok(Some(first.clone()));
    }
    let w = witness.height();
    let height = space.height();
    if height < 2 * w {
        return Err(CreatureError::HeightTooSmall { needed: 2 * w, actual: height });
    }

    // Kept-successor intersection over the witness cone.
    let mut inter: BTreeMap<Node, BTreeSet<u32>> = BTreeMap::new();
    let mut frontier = VecDeque::from([witness.clone()]);
    while let Some(t) = frontier.pop_front() {
        if t.height() == height {
            continue;
        }
        let mut set = conds[0].successors(&t).cloned().unwrap_or_default();
        for c in &conds[1..] {
            let other = c.successors(&t).cloned().unwrap_or_default();
            set = set.intersection(&other).cloned().collect();
        }
        for &i in &set {
            frontier.push_back(t.child(i));
        }
        inter.insert(t, set);
    }

    // Bottom-up prune: survivors need nonempty successor sets meeting the
    // height-dependent norm threshold.
    let mut alive: BTreeMap<Node, BTreeSet<u32>> = BTreeMap::new();
    let mut order: Vec<Node> = inter.keys().cloned().collect();
    order.sort_by_key(|t| std::cmp::Reverse(t.height()));
    for t in order {
        let h = t.height();
        let set: BTreeSet<u32> = inter[&t]
            .iter()
            .copied()
            .filter(|&i| h + 1 == height || alive.contains_key(&t.child(i)))
            .collect();
        let keeps = if w == 0 {
            set.len() as u64 == space.succ_count(h)
        } else {
            !set.is_empty() && {
                let thr = BigRational::one()
                    + BigRational::new(1.into(), (w as i64).into())
                    - BigRational::new(1.into(), (h as i64).into());
                norm_cmp(
                    &BigUint::from(space.succ_count(h)),
                    &BigUint::from(space.base(h)),
                    &BigUint::from(set.len() as u64),
                    &thr,
                    false,
                )
            }
        };
        if keeps {
            alive.insert(t, set);
        }
    }
    if w < height && !alive.contains_key(witness) {
        return Ok(None);
    }

    // Lexicographically least surviving branch, cut at height 2w.
    let mut x = witness.clone();
    while x.height() < height {
        let set = &alive[&x];
        x = x.child(*set.iter().next().expect("alive nodes keep successors"));
    }
    let cut = x.prefix(2 * w);
    let mut succ: BTreeMap<Node, BTreeSet<u32>> = BTreeMap::new();
    for d in 0..2 * w {
        succ.insert(x.prefix(d), BTreeSet::from([x.0[d]]));
    }
    let mut frontier = VecDeque::from([cut]);
    while let Some(t) = frontier.pop_front() {
        if t.height() == height {
            continue;
        }
        let set = alive[&t].clone();
        for &i in &set {
            frontier.push_back(t.child(i));
        }
        succ.insert(t, set);
    }
    Condition::new(space, succ).map(Some)
}

/// Enumerates every condition whose stem is exactly `stem`: single branch
/// below, and above it every node keeps a set meeting the validity
/// threshold for that stem height. Errors when more than `cap` conditions
/// would be produced.
pub fn enumerate_class(
    space: &CreatureSpace,
    stem: &Node,
    cap: usize,
) -> Result<Vec<Condition>, CreatureError> {
    check_node(space, stem)?;
    let threshold = stem_threshold(stem.height());
    let mut budget = cap;
    let subtrees = enum_subtrees(space, stem, threshold.as_ref(), &mut budget, cap)?;
    let mut out = Vec::with_capacity(subtrees.len());
    for sub in subtrees {
        let mut succ = sub;
        for d in 0..stem.height() {
            succ.insert(stem.prefix(d), BTreeSet::from([stem.0[d]]));
        }
        out.push(Condition::new(space.clone(), succ)?);
    }
    Ok(out)
}

/// Admissible kept-set sizes at a height for a threshold (None = full only).
fn admissible_sizes(space: &CreatureSpace, h: usize, threshold: Option<&BigRational>) -> Vec<u64> {
    let width = space.succ_count(h);
    match threshold {
        None => vec![width],
        Some(thr) => (1..=width)
            .filter(|&n| {
                norm_cmp(
                    &BigUint::from(width),
                    &BigUint::from(space.base(h)),
                    &BigUint::from(n),
                    thr,
                    false,
                )
            })
            .collect(),
    }
}

fn enum_subtrees(
    space: &CreatureSpace,
    t: &Node,
    threshold: Option<&BigRational>,
    budget: &mut usize,
    cap: usize,
) -> Result<Vec<BTreeMap<Node, BTreeSet<u32>>>, CreatureError> {
    if t.height() == space.height() {
        return Ok(vec![BTreeMap::new()]);
    }
    let h = t.height();
    let width = u32::try_from(space.succ_count(h)).expect("width");
    let sizes = admissible_sizes(space, h, threshold);
    let mut out = Vec::new();
    for set in subsets_of_sizes(width, &sizes) {
        // Cartesian product over the chosen children's subtree choices.
        let mut partial: Vec<BTreeMap<Node, BTreeSet<u32>>> = vec![BTreeMap::new()];
        for &i in &set {
            let child_trees = enum_subtrees(space, &t.child(i), threshold, budget, cap)?;
            let mut next = Vec::new();
            for base in &partial {
                for ct in &child_trees {
                    if next.len() + out.len() > cap {
                        return Err(CreatureError::EnumerationInfeasible {
                            size: format!("more than {cap}"),
                            cap,
                        });
                    }
                    let mut merged = base.clone();
                    merged.extend(ct.iter().map(|(k, v)| (k.clone(), v.clone())));
                    next.push(merged);
                }
            }
            partial = next;
        }
        for mut tree in partial {
            tree.insert(t.clone(), set.clone());
            out.push(tree);
        }
        if out.len() > cap {
            return Err(CreatureError::EnumerationInfeasible {
                size: format!("more than {cap}"),
                cap,
            });
        }
    }
    if *budget < out.len() {
        return Err(CreatureError::EnumerationInfeasible { size: format!("more than {cap}"), cap });
    }
    Ok(out)
}

/// All subsets of `{0..width}` whose size is listed, ascending lexicographic.
fn subsets_of_sizes(width: u32, sizes: &[u64]) -> Vec<BTreeSet<u32>> {
    let mut out = Vec::new();
    let size_set: BTreeSet<u64> = sizes.iter().copied().collect();
    // Iterate bitmask-free: recursive combination builder per size.
    for &k in &size_set {
        let mut combo: Vec<u32> = Vec::new();
        build_combos(width, k as usize, 0, &mut combo, &mut out);
    }
    out
}

fn build_combos(
    width: u32,
    k: usize,
    start: u32,
    combo: &mut Vec<u32>,
    out: &mut Vec<BTreeSet<u32>>,
) {
    if combo.len() == k {
        out.push(combo.iter().copied().collect());
        return;
    }
    let remaining = k - combo.len();
    let mut i = start;
    while i + (remaining as u32) <= width {
        combo.push(i);
        build_combos(width, k, i + 1, combo, out);
        combo.pop();
        i += 1;
    }
}
