//! Built-in algebra instances and the loader for finite table algebras.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{
    check_factorization, check_semilattice, Algebra, AlgebraError, CheckConfig, Gamma, SampleRng, Witness,
    DEFAULT_GAMMA,
};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("unknown algebra selector `{0}` (expected minplus, boolf2 or table:<path>)")]
    UnknownSelector(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed algebra table: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cardinality mismatch in {table}: expected {expected} entries, found {found}")]
    Cardinality {
        table: String,
        expected: usize,
        found: usize,
    },
    #[error("index {index} in {table} is outside carrier of size {size}")]
    IndexOutOfRange { table: String, index: usize, size: usize },
    #[error("table declares no ternary operation")]
    NoTernary,
    #[error("aggregate is not a semilattice: {law} fails at {inputs:?} ({lhs} vs {rhs})")]
    NotSemilattice {
        law: String,
        inputs: Vec<usize>,
        lhs: usize,
        rhs: usize,
    },
    #[error("declared top {top} is not the order maximum: {top} ⊕ {element} = {result}, expected {element}")]
    TopNotMaximum { top: usize, element: usize, result: usize },
    #[error("declared factorization is inconsistent at {inputs:?}: ternary gives {lhs}, (x⊗y)⊗z gives {rhs}")]
    Factorization { inputs: Vec<usize>, lhs: usize, rhs: usize },
}

/// Integers extended with a formal `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    Finite(i64),
    Inf,
}

impl ExtInt {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Finite(v) => Some(v),
            ExtInt::Inf => None,
        }
    }

    pub fn plus(self, other: ExtInt) -> ExtInt {
        match (self, other) {
            (ExtInt::Finite(a), ExtInt::Finite(b)) => {
                ExtInt::Finite(a.checked_add(b).expect("min-plus weight overflow"))
            }
            _ => ExtInt::Inf,
        }
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::Finite(v) => write!(f, "{v}"),
            ExtInt::Inf => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtInt::Finite(v) => s.serialize_i64(*v),
            ExtInt::Inf => s.serialize_str("inf"),
        }
    }
}

/// `min` aggregation with `[x,y,z] = x+y+z`; degenerate through integer
/// addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MinPlus;

pub fn minplus_degenerate() -> MinPlus {
    MinPlus
}

impl Algebra for MinPlus {
    type Elem = ExtInt;

    fn name(&self) -> &str {
        "minplus"
    }

    fn gamma_labels(&self) -> Vec<String> {
        vec![DEFAULT_GAMMA.to_string()]
    }

    fn contains(&self, _e: &ExtInt) -> bool {
        true
    }

    fn aggregate(&self, a: ExtInt, b: ExtInt) -> ExtInt {
        a.min(b)
    }

    fn ternary(&self, _gamma: Gamma, x: ExtInt, y: ExtInt, z: ExtInt) -> ExtInt {
        x.plus(y).plus(z)
    }

    fn kary(&self, _gamma: Gamma, args: &[ExtInt]) -> Result<ExtInt, AlgebraError> {
        if args.len() < 2 {
            return Err(AlgebraError::UnsupportedArity(args.len()));
        }
        Ok(args.iter().fold(ExtInt::Finite(0), |acc, &a| acc.plus(a)))
    }

    fn top(&self) -> ExtInt {
        ExtInt::Inf
    }

    fn seed(&self) -> ExtInt {
        ExtInt::Finite(0)
    }

    fn factor(&self, a: ExtInt, b: ExtInt) -> Option<ExtInt> {
        Some(a.plus(b))
    }

    fn elements(&self) -> Option<Vec<ExtInt>> {
        None
    }

    fn sample(&self, rng: &mut SampleRng) -> ExtInt {
        if rng.gen_ratio(1, 8) {
            ExtInt::Inf
        } else {
            ExtInt::Finite(rng.gen_range(-50..=50))
        }
    }

    fn parse_literal(&self, s: &str) -> Result<ExtInt, AlgebraError> {
        let t = s.trim();
        if t == "inf" {
            return Ok(ExtInt::Inf);
        }
        t.parse::<i64>()
            .map(ExtInt::Finite)
            .map_err(|_| AlgebraError::InvalidLiteral(s.to_string()))
    }

    fn render(&self, e: ExtInt) -> String {
        e.to_string()
    }
}

/// On-disk form of a finite table algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSpec {
    pub carrier_size: usize,
    pub aggregate: Vec<Vec<usize>>,
    /// Flat `n³` tables, x-major, y-middle, z-minor.
    pub ternary: BTreeMap<String, Vec<usize>>,
    pub top: usize,
    pub seed: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorization: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub triple_system_only: bool,
}

/// Finite algebra on `{0, …, n−1}` given by operation tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableAlgebra {
    label: String,
    n: usize,
    aggregate: Vec<usize>,
    gammas: Vec<String>,
    ternary: Vec<Vec<usize>>,
    top: usize,
    seed: usize,
    factorization: Option<Vec<usize>>,
    triple_system_only: bool,
}

fn flatten(table: &[Vec<usize>]) -> Vec<usize> {
    table.iter().flatten().copied().collect()
}

fn square(flat: &[usize], n: usize) -> Vec<Vec<usize>> {
    flat.chunks(n.max(1)).map(<[usize]>::to_vec).collect()
}

impl TableAlgebra {
    /// Builds an instance from already validated flat tables.
    pub fn from_parts(
        n: usize,
        aggregate: Vec<Vec<usize>>,
        ternary: Vec<(String, Vec<usize>)>,
        top: usize,
        seed: usize,
        factorization: Option<Vec<Vec<usize>>>,
    ) -> TableAlgebra {
        let (gammas, ternary) = ternary.into_iter().unzip();
        TableAlgebra {
            label: "table".into(),
            n,
            aggregate: flatten(&aggregate),
            gammas,
            ternary,
            top,
            seed,
            factorization: factorization.as_deref().map(flatten),
            triple_system_only: false,
        }
    }

    /// Structural validation only: cardinalities and index ranges.
    pub fn from_spec(spec: &TableSpec) -> Result<TableAlgebra, InstanceError> {
        let n = spec.carrier_size;
        let check_rows = |name: &str, rows: &[Vec<usize>]| -> Result<(), InstanceError> {
            if rows.len() != n {
                return Err(InstanceError::Cardinality {
                    table: name.into(),
                    expected: n,
                    found: rows.len(),
                });
            }
            for row in rows {
                if row.len() != n {
                    return Err(InstanceError::Cardinality {
                        table: format!("{name} row"),
                        expected: n,
                        found: row.len(),
                    });
                }
                check_indices(name, row, n)?;
            }
            Ok(())
        };
        check_rows("aggregate", &spec.aggregate)?;
        if let Some(f) = &spec.factorization {
            check_rows("factorization", f)?;
        }
        if spec.ternary.is_empty() {
            return Err(InstanceError::NoTernary);
        }
        for (label, flat) in &spec.ternary {
            let name = format!("ternary `{label}`");
            if flat.len() != n * n * n {
                return Err(InstanceError::Cardinality {
                    table: name,
                    expected: n * n * n,
                    found: flat.len(),
                });
            }
            check_indices(&name, flat, n)?;
        }
        check_indices("top", &[spec.top], n)?;
        check_indices("seed", &[spec.seed], n)?;
        let mut alg = TableAlgebra::from_parts(
            n,
            spec.aggregate.clone(),
            spec.ternary.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            spec.top,
            spec.seed,
            spec.factorization.clone(),
        );
        alg.triple_system_only = spec.triple_system_only;
        Ok(alg)
    }

    pub fn to_spec(&self) -> TableSpec {
        TableSpec {
            carrier_size: self.n,
            aggregate: square(&self.aggregate, self.n),
            ternary: self.gammas.iter().cloned().zip(self.ternary.iter().cloned()).collect(),
            top: self.top,
            seed: self.seed,
            factorization: self.factorization.as_deref().map(|f| square(f, self.n)),
            triple_system_only: self.triple_system_only,
        }
    }

    /// Semantic validation: semilattice laws, top maximality, and consistency
    /// of a declared factorization.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let cfg = CheckConfig {
            budget: usize::MAX,
            seed: 0,
        };
        let report = check_semilattice(self, &cfg);
        if let Some(Witness {
            law, inputs, lhs, rhs, ..
        }) = report.witness
        {
            return Err(InstanceError::NotSemilattice { law, inputs, lhs, rhs });
        }
        for a in 0..self.n {
            let r = self.aggregate(a, self.top);
            if r != a {
                return Err(InstanceError::TopNotMaximum {
                    top: self.top,
                    element: a,
                    result: r,
                });
            }
        }
        for g in 0..self.gammas.len() {
            if let Some(r) = check_factorization(self, Gamma(g), &cfg) {
                if let Some(w) = r.witness {
                    return Err(InstanceError::Factorization {
                        inputs: w.inputs,
                        lhs: w.lhs,
                        rhs: w.rhs,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_triple_system_only(mut self, flag: bool) -> Self {
        self.triple_system_only = flag;
        self
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn ternary_table(&self, gamma: Gamma) -> &[usize] {
        &self.ternary[gamma.0]
    }

    pub fn aggregate_table(&self) -> &[usize] {
        &self.aggregate
    }
}

fn check_indices(name: &str, values: &[usize], n: usize) -> Result<(), InstanceError> {
    match values.iter().find(|&&v| v >= n) {
        Some(&index) => Err(InstanceError::IndexOutOfRange {
            table: name.into(),
            index,
            size: n,
        }),
        None => Ok(()),
    }
}

impl Algebra for TableAlgebra {
    type Elem = usize;

    fn name(&self) -> &str {
        &self.label
    }

    fn gamma_labels(&self) -> Vec<String> {
        self.gammas.clone()
    }

    fn contains(&self, e: &usize) -> bool {
        *e < self.n
    }

    fn aggregate(&self, a: usize, b: usize) -> usize {
        self.aggregate[a * self.n + b]
    }

    fn ternary(&self, gamma: Gamma, x: usize, y: usize, z: usize) -> usize {
        self.ternary[gamma.0][(x * self.n + y) * self.n + z]
    }

    fn top(&self) -> usize {
        self.top
    }

    fn seed(&self) -> usize {
        self.seed
    }

    fn factor(&self, a: usize, b: usize) -> Option<usize> {
        self.factorization.as_ref().map(|f| f[a * self.n + b])
    }

    fn elements(&self) -> Option<Vec<usize>> {
        Some((0..self.n).collect())
    }

    fn sample(&self, rng: &mut SampleRng) -> usize {
        rng.gen_range(0..self.n)
    }

    fn parse_literal(&self, s: &str) -> Result<usize, AlgebraError> {
        let v: usize = s
            .trim()
            .parse()
            .map_err(|_| AlgebraError::InvalidLiteral(s.to_string()))?;
        if v < self.n {
            Ok(v)
        } else {
            Err(AlgebraError::OutsideCarrier(v.to_string()))
        }
    }

    fn render(&self, e: usize) -> String {
        e.to_string()
    }

    fn triple_system_only(&self) -> bool {
        self.triple_system_only
    }
}

/// Which two-element semilattice orders `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoElementOrder {
    /// `⊕ = AND`, so `0 ≤ 1` and top is 1.
    And,
    /// `⊕ = OR`, so `1 ≤ 0` and top is 0.
    Or,
}

/// The complemented XOR `[x,y,z] = 1 ⊕₂ x ⊕₂ y ⊕₂ z` on `{0, 1}`, with `⊕ = AND`
/// as its order carrier.
pub fn bool_f2() -> TableAlgebra {
    bool_f2_with_order(TwoElementOrder::And)
}

pub fn bool_f2_with_order(order: TwoElementOrder) -> TableAlgebra {
    let mut ternary = Vec::with_capacity(8);
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                ternary.push(1 ^ x ^ y ^ z);
            }
        }
    }
    let (aggregate, top) = match order {
        TwoElementOrder::And => (vec![vec![0, 0], vec![0, 1]], 1),
        TwoElementOrder::Or => (vec![vec![0, 1], vec![1, 1]], 0),
    };
    TableAlgebra::from_parts(2, aggregate, vec![(DEFAULT_GAMMA.into(), ternary)], top, 0, None)
        .with_label("boolf2")
        .with_triple_system_only(true)
}

pub fn parse_table(json: &str) -> Result<TableAlgebra, InstanceError> {
    let spec: TableSpec = serde_json::from_str(json)?;
    let alg = TableAlgebra::from_spec(&spec)?;
    alg.validate()?;
    Ok(alg)
}

pub fn load_table(path: impl AsRef<Path>) -> Result<TableAlgebra, InstanceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_table(&text)?.with_label(format!("table:{}", path.display())))
}

pub fn table_to_json(alg: &TableAlgebra) -> String {
    serde_json::to_string_pretty(&alg.to_spec()).expect("table specs always serialize")
}

/// A resolved catalog entry.
#[derive(Debug, Clone)]
pub enum Instance {
    MinPlus(MinPlus),
    Table(TableAlgebra),
}

/// Resolves `minplus`, `boolf2` or `table:<path>`.
pub fn resolve(selector: &str) -> Result<Instance, InstanceError> {
    match selector {
        "minplus" | "minplus-degenerate" => Ok(Instance::MinPlus(minplus_degenerate())),
        "boolf2" | "bool-f2" => Ok(Instance::Table(bool_f2())),
        s => match s.strip_prefix("table:") {
            Some(path) => Ok(Instance::Table(load_table(path)?)),
            None => Err(InstanceError::UnknownSelector(s.to_string())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_monotonicity, check_ternary_associativity};

    #[test]
    fn minplus_examples() {
        let mp = minplus_degenerate();
        let f = ExtInt::Finite;
        let g = Gamma(0);
        assert_eq!(mp.ternary(g, f(1), f(2), f(3)), f(6));
        assert_eq!(mp.ternary(g, f(4), ExtInt::Inf, f(-2)), ExtInt::Inf);
        assert_eq!(mp.parse_literal("inf").unwrap(), ExtInt::Inf);
        assert_eq!(mp.parse_literal("-7").unwrap(), f(-7));
        assert!(mp.parse_literal("1.5").is_err());
        assert_eq!(mp.kary(g, &[f(1), f(2), f(3), f(4), f(5)]).unwrap(), f(15));
        let r = check_ternary_associativity(&mp, g, &CheckConfig { budget: 1000, seed: 9 });
        assert!(r.passed && !r.exhaustive);
    }

    #[test]
    fn bool_f2_values() {
        let f2 = bool_f2();
        let g = Gamma(0);
        assert_eq!(f2.ternary(g, 0, 0, 0), 1);
        assert_eq!(f2.ternary(g, 0, 0, 1), 0);
        assert_eq!(f2.ternary(g, 1, 0, 0), 0);
        // collapsed quintuple form x ⊕ y ⊕ z ⊕ u ⊕ v
        for t in 0..32usize {
            let b: Vec<usize> = (0..5).map(|i| (t >> (4 - i)) & 1).collect();
            let nested = f2.ternary(g, f2.ternary(g, b[0], b[1], b[2]), b[3], b[4]);
            assert_eq!(nested, b.iter().fold(0, |a, x| a ^ x));
        }
        assert_eq!(f2.ternary(g, f2.ternary(g, 1, 1, 1), 1, 1), 1);
        assert!(f2.triple_system_only());
    }

    #[test]
    fn bool_f2_fails_monotonicity_under_both_orders() {
        for order in [TwoElementOrder::And, TwoElementOrder::Or] {
            let alg = bool_f2_with_order(order);
            let r = check_monotonicity(&alg, Gamma(0), &CheckConfig::default());
            assert!(!r.passed, "{order:?}");
            let w = r.witness.unwrap();
            let lo = &w.inputs;
            let hi = w.alt_inputs.as_ref().unwrap();
            assert_eq!(alg.ternary(Gamma(0), lo[0], lo[1], lo[2]), w.lhs);
            assert_eq!(alg.ternary(Gamma(0), hi[0], hi[1], hi[2]), w.rhs);
            assert!(!alg.leq_unchecked(w.lhs, w.rhs));
        }
    }

    const PROJ1: &str = r#"{
        "carrier_size": 2,
        "aggregate": [[0, 0], [0, 1]],
        "ternary": { "g0": [0, 0, 0, 0, 1, 1, 1, 1] },
        "top": 1,
        "seed": 0
    }"#;

    #[test]
    fn load_valid_table() {
        let alg = parse_table(PROJ1).unwrap();
        assert_eq!(alg.carrier_size(), 2);
        assert_eq!(alg.ternary(Gamma(0), 1, 0, 0), 1);
        assert_eq!(alg.ternary(Gamma(0), 0, 1, 1), 0);
    }

    #[test]
    fn load_rejects_non_idempotent_aggregate() {
        let bad = PROJ1.replace("[[0, 0], [0, 1]]", "[[0, 1], [1, 0]]");
        match parse_table(&bad) {
            Err(InstanceError::NotSemilattice { law, inputs, .. }) => {
                assert_eq!(law, "idempotency");
                assert_eq!(inputs, vec![1]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn load_rejects_top_that_is_not_maximum() {
        let bad = PROJ1.replace("\"top\": 1", "\"top\": 0");
        assert!(matches!(
            parse_table(&bad),
            Err(InstanceError::TopNotMaximum {
                top: 0,
                element: 1,
                result: 0
            })
        ));
    }

    #[test]
    fn load_rejects_bad_shapes() {
        let short = PROJ1.replace("[0, 0, 0, 0, 1, 1, 1, 1]", "[0, 0, 0, 0, 1, 1, 1]");
        assert!(matches!(parse_table(&short), Err(InstanceError::Cardinality { .. })));
        let range = PROJ1.replace("[0, 0, 0, 0, 1, 1, 1, 1]", "[0, 0, 0, 0, 1, 1, 1, 2]");
        assert!(matches!(
            parse_table(&range),
            Err(InstanceError::IndexOutOfRange { index: 2, .. })
        ));
        assert!(matches!(parse_table("{ not json"), Err(InstanceError::Parse(_))));
        let rows = PROJ1.replace("[[0, 0], [0, 1]]", "[[0, 0]]");
        assert!(matches!(parse_table(&rows), Err(InstanceError::Cardinality { .. })));
    }

    #[test]
    fn load_rejects_inconsistent_factorization() {
        let with_f = PROJ1.replace("\"seed\": 0", "\"seed\": 0, \"factorization\": [[1, 1], [1, 1]]");
        assert!(matches!(parse_table(&with_f), Err(InstanceError::Factorization { .. })));
        let ok = PROJ1.replace("\"seed\": 0", "\"seed\": 0, \"factorization\": [[0, 0], [1, 1]]");
        assert!(parse_table(&ok).is_ok());
    }

    #[test]
    fn serialize_then_load_is_identity() {
        let f2 = bool_f2();
        let back = parse_table(&table_to_json(&f2)).unwrap();
        assert_eq!(back.to_spec(), f2.to_spec());
        assert!(back.triple_system_only());
    }

    #[test]
    fn resolve_selectors() {
        assert!(matches!(resolve("minplus"), Ok(Instance::MinPlus(_))));
        assert!(matches!(resolve("boolf2"), Ok(Instance::Table(_))));
        assert!(matches!(resolve("maxplus"), Err(InstanceError::UnknownSelector(_))));
        assert!(matches!(
            resolve("table:/nonexistent/x.json"),
            Err(InstanceError::Io { .. })
        ));
    }
}
