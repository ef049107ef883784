//! Carrier/operation abstraction, the canonical order induced by the
//! aggregation, and checkers for the ordered ternary axioms.
//!
//! The aggregation `⊕` is read as a meet: `a ≤ b` iff `a ⊕ b = a`, and the
//! distinguished top element is neutral for `⊕`. Checkers enumerate the full
//! tuple space when the carrier is finite and the space fits in the budget;
//! otherwise they draw tuples from a seeded generator and mark the report as
//! non-exhaustive.

use std::fmt::Debug;
use std::hash::Hash;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Deterministic generator used by every sampled check.
pub type SampleRng = ChaCha8Rng;

/// Label used when an instance declares no explicit gamma set.
pub const DEFAULT_GAMMA: &str = "g0";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element {0} is outside the carrier")]
    OutsideCarrier(String),
    #[error("unknown gamma label `{0}`")]
    UnknownGamma(String),
    #[error("invalid weight literal `{0}`")]
    InvalidLiteral(String),
    #[error("no {0}-ary operation is available for this instance")]
    UnsupportedArity(usize),
}

/// Resolved index of a gamma label within an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gamma(pub usize);

/// An idempotent aggregation together with a gamma-indexed family of ternary
/// operations.
pub trait Algebra: Sync {
    type Elem: Copy + Eq + Ord + Hash + Debug + Send + Sync + Serialize;

    fn name(&self) -> &str;

    fn gamma_labels(&self) -> Vec<String>;

    fn gamma(&self, label: &str) -> Result<Gamma, AlgebraError> {
        self.gamma_labels()
            .iter()
            .position(|l| l == label)
            .map(Gamma)
            .ok_or_else(|| AlgebraError::UnknownGamma(label.to_string()))
    }

    fn contains(&self, e: &Self::Elem) -> bool;

    fn aggregate(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;

    fn ternary(&self, gamma: Gamma, x: Self::Elem, y: Self::Elem, z: Self::Elem) -> Self::Elem;

    /// The k-ary operation used by wide relaxation windows.
    ///
    /// Defaults to the ternary window fold, which is only defined for an odd
    /// number of arguments.
    fn kary(&self, gamma: Gamma, args: &[Self::Elem]) -> Result<Self::Elem, AlgebraError> {
        if args.len() < 3 || args.len() % 2 == 0 {
            return Err(AlgebraError::UnsupportedArity(args.len()));
        }
        let mut acc = self.ternary(gamma, args[0], args[1], args[2]);
        for pair in args[3..].chunks(2) {
            acc = self.ternary(gamma, acc, pair[0], pair[1]);
        }
        Ok(acc)
    }

    fn top(&self) -> Self::Elem;

    /// Value pinned at the source vertex by the relaxation operator.
    fn seed(&self) -> Self::Elem;

    /// Declared binary factorization `⊗` with `[x,y,z] = (x⊗y)⊗z`, if any.
    fn factor(&self, _a: Self::Elem, _b: Self::Elem) -> Option<Self::Elem> {
        None
    }

    /// All carrier elements in canonical order, for finite carriers.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    fn sample(&self, rng: &mut SampleRng) -> Self::Elem;

    fn parse_literal(&self, s: &str) -> Result<Self::Elem, AlgebraError>;

    fn render(&self, e: Self::Elem) -> String;

    /// Instances that only satisfy the triple-system identities and must not
    /// be fed to the solver without an explicit override.
    fn triple_system_only(&self) -> bool {
        false
    }

    fn leq_unchecked(&self, a: Self::Elem, b: Self::Elem) -> bool {
        self.aggregate(a, b) == a
    }
}

fn ensure<A: Algebra>(alg: &A, e: A::Elem) -> Result<(), AlgebraError> {
    if alg.contains(&e) {
        Ok(())
    } else {
        Err(AlgebraError::OutsideCarrier(format!("{e:?}")))
    }
}

/// Canonical order: `a ≤ b` iff `a ⊕ b = a`.
pub fn leq<A: Algebra>(alg: &A, a: A::Elem, b: A::Elem) -> Result<bool, AlgebraError> {
    ensure(alg, a)?;
    ensure(alg, b)?;
    Ok(alg.leq_unchecked(a, b))
}

/// Left fold of `⊕`; the empty sequence aggregates to top.
pub fn aggregate_all<A: Algebra>(alg: &A, items: &[A::Elem]) -> Result<A::Elem, AlgebraError> {
    let mut acc: Option<A::Elem> = None;
    for &item in items {
        ensure(alg, item)?;
        acc = Some(match acc {
            None => item,
            Some(a) => alg.aggregate(a, item),
        });
    }
    Ok(acc.unwrap_or_else(|| alg.top()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    pub budget: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            budget: 100_000,
            seed: 0,
        }
    }
}

/// A concrete counterexample.
///
/// `inputs` is the tuple evaluated to obtain `lhs`. For monotonicity and
/// distributivity `alt_inputs` holds the substituted tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness<E> {
    pub law: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinate: Option<usize>,
    pub inputs: Vec<E>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_inputs: Option<Vec<E>>,
    pub lhs: E,
    pub rhs: E,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport<E> {
    pub axiom_name: String,
    pub passed: bool,
    pub checked: usize,
    pub exhaustive: bool,
    pub witness: Option<Witness<E>>,
}

impl<E> AxiomReport<E> {
    fn pass(name: &str, checked: usize, exhaustive: bool) -> Self {
        AxiomReport {
            axiom_name: name.to_string(),
            passed: true,
            checked,
            exhaustive,
            witness: None,
        }
    }

    fn fail(name: &str, checked: usize, exhaustive: bool, witness: Witness<E>) -> Self {
        AxiomReport {
            axiom_name: name.to_string(),
            passed: false,
            checked,
            exhaustive,
            witness: Some(witness),
        }
    }
}

/// Source of tuples for a checker: the full odometer over a finite carrier or
/// a seeded stream of samples.
enum Tuples<'a, A: Algebra> {
    Exhaustive {
        elems: Vec<A::Elem>,
        idx: Vec<usize>,
        done: bool,
    },
    Sampled {
        alg: &'a A,
        rng: SampleRng,
        arity: usize,
        remaining: usize,
    },
}

impl<'a, A: Algebra> Tuples<'a, A> {
    fn new(alg: &'a A, arity: usize, cfg: &CheckConfig, space_factor: usize) -> Self {
        if let Some(elems) = alg.elements() {
            let space = (elems.len() as u128)
                .checked_pow(arity as u32)
                .map(|s| s * space_factor as u128);
            if space.is_some_and(|s| s <= cfg.budget as u128) {
                return Tuples::Exhaustive {
                    done: elems.is_empty(),
                    elems,
                    idx: vec![0; arity],
                };
            }
        }
        Tuples::Sampled {
            alg,
            rng: SampleRng::seed_from_u64(cfg.seed),
            arity,
            remaining: cfg.budget,
        }
    }

    fn exhaustive(&self) -> bool {
        matches!(self, Tuples::Exhaustive { .. })
    }
}

impl<A: Algebra> Iterator for Tuples<'_, A> {
    type Item = Vec<A::Elem>;

    fn next(&mut self) -> Option<Vec<A::Elem>> {
        match self {
            Tuples::Exhaustive { elems, idx, done } => {
                if *done {
                    return None;
                }
                let out = idx.iter().map(|&i| elems[i]).collect();
                // odometer, most significant coordinate first
                let mut pos = idx.len();
                loop {
                    if pos == 0 {
                        *done = true;
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < elems.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
                Some(out)
            }
            Tuples::Sampled {
                alg,
                rng,
                arity,
                remaining,
            } => {
                if *remaining == 0 {
                    return None;
                }
                *remaining -= 1;
                Some((0..*arity).map(|_| alg.sample(rng)).collect())
            }
        }
    }
}

/// Idempotency, commutativity and associativity of `⊕`.
pub fn check_semilattice<A: Algebra>(alg: &A, cfg: &CheckConfig) -> AxiomReport<A::Elem> {
    const NAME: &str = "semilattice";
    if let Some(elems) = alg.elements() {
        let n = elems.len() as u128;
        if n + n * n + n * n * n <= cfg.budget as u128 {
            let mut checked = 0;
            for &a in &elems {
                checked += 1;
                let aa = alg.aggregate(a, a);
                if aa != a {
                    return AxiomReport::fail(NAME, checked, true, idempotency_witness(a, aa));
                }
            }
            for &a in &elems {
                for &b in &elems {
                    checked += 1;
                    if let Some(w) = commutativity_violation(alg, a, b) {
                        return AxiomReport::fail(NAME, checked, true, w);
                    }
                }
            }
            for &a in &elems {
                for &b in &elems {
                    for &c in &elems {
                        checked += 1;
                        if let Some(w) = associativity_violation(alg, a, b, c) {
                            return AxiomReport::fail(NAME, checked, true, w);
                        }
                    }
                }
            }
            return AxiomReport::pass(NAME, checked, true);
        }
    }
    let mut rng = SampleRng::seed_from_u64(cfg.seed);
    for checked in 1..=cfg.budget {
        let (a, b, c) = (alg.sample(&mut rng), alg.sample(&mut rng), alg.sample(&mut rng));
        let aa = alg.aggregate(a, a);
        if aa != a {
            return AxiomReport::fail(NAME, checked, false, idempotency_witness(a, aa));
        }
        if let Some(w) = commutativity_violation(alg, a, b) {
            return AxiomReport::fail(NAME, checked, false, w);
        }
        if let Some(w) = associativity_violation(alg, a, b, c) {
            return AxiomReport::fail(NAME, checked, false, w);
        }
    }
    AxiomReport::pass(NAME, cfg.budget, false)
}

fn idempotency_witness<E: Copy>(a: E, aa: E) -> Witness<E> {
    Witness {
        law: "idempotency".into(),
        coordinate: None,
        inputs: vec![a],
        alt_inputs: None,
        lhs: aa,
        rhs: a,
    }
}

fn commutativity_violation<A: Algebra>(alg: &A, a: A::Elem, b: A::Elem) -> Option<Witness<A::Elem>> {
    let (ab, ba) = (alg.aggregate(a, b), alg.aggregate(b, a));
    (ab != ba).then(|| Witness {
        law: "commutativity".into(),
        coordinate: None,
        inputs: vec![a, b],
        alt_inputs: None,
        lhs: ab,
        rhs: ba,
    })
}

fn associativity_violation<A: Algebra>(alg: &A, a: A::Elem, b: A::Elem, c: A::Elem) -> Option<Witness<A::Elem>> {
    let left = alg.aggregate(alg.aggregate(a, b), c);
    let right = alg.aggregate(a, alg.aggregate(b, c));
    (left != right).then(|| Witness {
        law: "associativity".into(),
        coordinate: None,
        inputs: vec![a, b, c],
        alt_inputs: None,
        lhs: left,
        rhs: right,
    })
}

/// `[[x,y,z],u,v] = [x,[y,z,u],v] = [x,y,[z,u,v]]` over quintuples.
pub fn check_ternary_associativity<A: Algebra>(alg: &A, gamma: Gamma, cfg: &CheckConfig) -> AxiomReport<A::Elem> {
    const NAME: &str = "ternary-associativity";
    let tuples = Tuples::new(alg, 5, cfg, 1);
    let exhaustive = tuples.exhaustive();
    let mut checked = 0;
    for t in tuples {
        checked += 1;
        let (x, y, z, u, v) = (t[0], t[1], t[2], t[3], t[4]);
        let left = alg.ternary(gamma, alg.ternary(gamma, x, y, z), u, v);
        let middle = alg.ternary(gamma, x, alg.ternary(gamma, y, z, u), v);
        let right = alg.ternary(gamma, x, y, alg.ternary(gamma, z, u, v));
        let mismatch = if left != middle {
            Some(("left=middle", middle))
        } else if left != right {
            Some(("left=right", right))
        } else {
            None
        };
        if let Some((law, rhs)) = mismatch {
            let w = Witness {
                law: law.into(),
                coordinate: None,
                inputs: t,
                alt_inputs: None,
                lhs: left,
                rhs,
            };
            return AxiomReport::fail(NAME, checked, exhaustive, w);
        }
    }
    AxiomReport::pass(NAME, checked, exhaustive)
}

fn substitute<E: Copy>(coord: usize, x: E, rest: (E, E)) -> [E; 3] {
    match coord {
        0 => [x, rest.0, rest.1],
        1 => [rest.0, x, rest.1],
        _ => [rest.0, rest.1, x],
    }
}

/// Each coordinate is order preserving: `a ≤ b` implies `[..a..] ≤ [..b..]`.
///
/// Coordinates in witnesses are 1-based.
pub fn check_monotonicity<A: Algebra>(alg: &A, gamma: Gamma, cfg: &CheckConfig) -> AxiomReport<A::Elem> {
    const NAME: &str = "monotonicity";
    let mut checked = 0;
    let mut exhaustive = true;
    for coord in 0..3 {
        let tuples = Tuples::new(alg, 4, cfg, 3);
        exhaustive &= tuples.exhaustive();
        let sampled = !tuples.exhaustive();
        for t in tuples {
            let (a, b) = if sampled {
                (alg.aggregate(t[0], t[1]), t[0])
            } else {
                (t[0], t[1])
            };
            if !alg.leq_unchecked(a, b) {
                continue;
            }
            checked += 1;
            let lo = substitute(coord, a, (t[2], t[3]));
            let hi = substitute(coord, b, (t[2], t[3]));
            let lv = alg.ternary(gamma, lo[0], lo[1], lo[2]);
            let hv = alg.ternary(gamma, hi[0], hi[1], hi[2]);
            if !alg.leq_unchecked(lv, hv) {
                let w = Witness {
                    law: "monotonicity".into(),
                    coordinate: Some(coord + 1),
                    inputs: lo.to_vec(),
                    alt_inputs: Some(hi.to_vec()),
                    lhs: lv,
                    rhs: hv,
                };
                return AxiomReport::fail(NAME, checked, exhaustive, w);
            }
        }
    }
    AxiomReport::pass(NAME, checked, exhaustive)
}

/// `[x⊕x',y,z] = [x,y,z] ⊕ [x',y,z]` and likewise in the other coordinates.
pub fn check_distributivity<A: Algebra>(alg: &A, gamma: Gamma, cfg: &CheckConfig) -> AxiomReport<A::Elem> {
    const NAME: &str = "distributivity";
    let mut checked = 0;
    let mut exhaustive = true;
    for coord in 0..3 {
        let tuples = Tuples::new(alg, 4, cfg, 3);
        exhaustive &= tuples.exhaustive();
        for t in tuples {
            checked += 1;
            let (a, b) = (t[0], t[1]);
            let joined = substitute(coord, alg.aggregate(a, b), (t[2], t[3]));
            let ta = substitute(coord, a, (t[2], t[3]));
            let tb = substitute(coord, b, (t[2], t[3]));
            let lhs = alg.ternary(gamma, joined[0], joined[1], joined[2]);
            let rhs = alg.aggregate(
                alg.ternary(gamma, ta[0], ta[1], ta[2]),
                alg.ternary(gamma, tb[0], tb[1], tb[2]),
            );
            if lhs != rhs {
                let w = Witness {
                    law: "distributivity".into(),
                    coordinate: Some(coord + 1),
                    inputs: ta.to_vec(),
                    alt_inputs: Some(tb.to_vec()),
                    lhs,
                    rhs,
                };
                return AxiomReport::fail(NAME, checked, exhaustive, w);
            }
        }
    }
    AxiomReport::pass(NAME, checked, exhaustive)
}

/// `[x,y,z] = (x⊗y)⊗z` for the declared factorization. `None` when the
/// instance declares none.
pub fn check_factorization<A: Algebra>(alg: &A, gamma: Gamma, cfg: &CheckConfig) -> Option<AxiomReport<A::Elem>> {
    const NAME: &str = "factorization";
    let probe = alg.elements().and_then(|e| e.first().copied());
    let probe = probe.unwrap_or_else(|| alg.top());
    alg.factor(probe, probe)?;
    let tuples = Tuples::new(alg, 3, cfg, 1);
    let exhaustive = tuples.exhaustive();
    let mut checked = 0;
    for t in tuples {
        checked += 1;
        let lhs = alg.ternary(gamma, t[0], t[1], t[2]);
        let rhs = alg
            .factor(t[0], t[1])
            .and_then(|xy| alg.factor(xy, t[2]))
            .expect("declared factorization is total");
        if lhs != rhs {
            let w = Witness {
                law: "factorization".into(),
                coordinate: None,
                inputs: t,
                alt_inputs: None,
                lhs,
                rhs,
            };
            return Some(AxiomReport::fail(NAME, checked, exhaustive, w));
        }
    }
    Some(AxiomReport::pass(NAME, checked, exhaustive))
}

/// The four ordered axioms for one gamma, in gate order.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomSuite<E> {
    pub gamma: String,
    pub semilattice: AxiomReport<E>,
    pub ternary_associativity: AxiomReport<E>,
    pub monotonicity: AxiomReport<E>,
    pub distributivity: AxiomReport<E>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorization: Option<AxiomReport<E>>,
}

impl<E> AxiomSuite<E> {
    pub fn all_passed(&self) -> bool {
        self.semilattice.passed
            && self.ternary_associativity.passed
            && self.monotonicity.passed
            && self.distributivity.passed
    }

    pub fn first_failure(&self) -> Option<&AxiomReport<E>> {
        [
            &self.semilattice,
            &self.ternary_associativity,
            &self.monotonicity,
            &self.distributivity,
        ]
        .into_iter()
        .find(|r| !r.passed)
    }
}

pub fn check_all<A: Algebra>(alg: &A, gamma: Gamma, cfg: &CheckConfig) -> AxiomSuite<A::Elem> {
    AxiomSuite {
        gamma: alg.gamma_labels()[gamma.0].clone(),
        semilattice: check_semilattice(alg, cfg),
        ternary_associativity: check_ternary_associativity(alg, gamma, cfg),
        monotonicity: check_monotonicity(alg, gamma, cfg),
        distributivity: check_distributivity(alg, gamma, cfg),
        factorization: check_factorization(alg, gamma, cfg),
    }
}
