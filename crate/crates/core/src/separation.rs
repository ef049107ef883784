//! Mechanical reproduction of the non-factorization result for the
//! complemented XOR, and exhaustive finite-model searches for binary
//! factorizations and for ordered, non-degenerate ternary instances.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    check_distributivity, check_monotonicity, check_ternary_associativity, Algebra, AxiomReport, CheckConfig, Gamma,
    SampleRng, DEFAULT_GAMMA,
};
use crate::instances::{bool_f2, TableAlgebra, TableSpec};

/// Largest number of binary tables the factorization search will enumerate
/// by default (`3⁹`).
pub const DEFAULT_FACTORIZATION_BUDGET: u128 = 19_683;

/// Largest carrier for which semilattices are enumerated.
pub const MAX_SEARCH_CARRIER: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("enumeration needs {required} tables but the budget allows {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("carrier size {0} is outside the supported range 1..={MAX_SEARCH_CARRIER}")]
    CarrierSize(usize),
}

/// A binary operation on `{0, …, n−1}` stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryTable {
    pub n: usize,
    pub cells: Vec<usize>,
}

impl BinaryTable {
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.cells[a * self.n + b]
    }

    pub fn is_associative(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.get(self.get(a, b), c) == self.get(a, self.get(b, c)))))
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.cells.chunks(self.n.max(1)).map(<[usize]>::to_vec).collect()
    }

    /// The `index`-th table in base-`n` counting order (first cell most
    /// significant).
    fn nth(n: usize, index: u128) -> BinaryTable {
        let mut cells = vec![0; n * n];
        let mut rest = index;
        for cell in cells.iter_mut().rev() {
            *cell = (rest % n as u128) as usize;
            rest /= n as u128;
        }
        BinaryTable { n, cells }
    }
}

impl Serialize for BinaryTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub searched: u128,
    pub associative_count: u128,
    pub witnesses: Vec<BinaryTable>,
    pub exhaustive: bool,
}

/// All associative `⊗` with `[x,y,z] = (x⊗y)⊗z` on every triple.
pub fn search_binary_factorization(
    alg: &TableAlgebra,
    gamma: Gamma,
    budget: u128,
) -> Result<FactorizationReport, SearchError> {
    let n = alg.carrier_size();
    let required = (n as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(SearchError::BudgetExceeded { required, budget });
    }
    let ternary = alg.ternary_table(gamma);
    let mut associative_count = 0;
    let mut witnesses = Vec::new();
    for index in 0..required {
        let t = BinaryTable::nth(n, index);
        if !t.is_associative() {
            continue;
        }
        associative_count += 1;
        let factors =
            (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| ternary[(x * n + y) * n + z] == t.get(t.get(x, y), z))));
        if factors {
            witnesses.push(t);
        }
    }
    Ok(FactorizationReport {
        searched: required,
        associative_count,
        witnesses,
        exhaustive: true,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    pub instance: String,
    pub associativity: AxiomReport<usize>,
    pub factorization: FactorizationReport,
}

impl SeparationReport {
    pub fn separated(&self) -> bool {
        self.associativity.passed && self.factorization.witnesses.is_empty()
    }
}

/// Ternary associativity over all quintuples plus the exhaustive
/// factorization search, for an arbitrary finite table.
pub fn separation_report(alg: &TableAlgebra, gamma: Gamma) -> Result<SeparationReport, SearchError> {
    let cfg = CheckConfig {
        budget: usize::MAX,
        seed: 0,
    };
    Ok(SeparationReport {
        instance: alg.name().to_string(),
        associativity: check_ternary_associativity(alg, gamma, &cfg),
        factorization: search_binary_factorization(alg, gamma, DEFAULT_FACTORIZATION_BUDGET)?,
    })
}

/// The complemented XOR on `{0, 1}`: associative on all 32 quintuples, and
/// none of the 16 binary operations factors it.
pub fn verify_separation() -> SeparationReport {
    separation_report(&bool_f2(), Gamma(0)).expect("16 tables fit the default budget")
}

/// One ordered instance surviving every gate with no binary factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoundInstance {
    pub aggregate: BinaryTable,
    pub ternary: Vec<usize>,
    /// Loadable table form; present when the semilattice has a top element.
    pub table: Option<TableSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub associative: u64,
    pub monotone: u64,
    pub distributive: u64,
    pub factorizable: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TtgsSearchReport {
    pub carrier_size: usize,
    pub semilattices: Vec<BinaryTable>,
    pub semilattices_tried: usize,
    pub ternary_ops_tried: u128,
    pub combinations_examined: u128,
    pub survivors: GateCounts,
    pub found: Vec<FoundInstance>,
    pub exhaustive: bool,
    pub seed: u64,
    pub budget: u64,
}

/// Every commutative, idempotent, associative table on `n` elements.
pub fn enumerate_semilattices(n: usize) -> Vec<BinaryTable> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let total = (n as u128).pow(pairs.len() as u32);
    let mut out = Vec::new();
    for index in 0..total {
        let mut cells = vec![0; n * n];
        for a in 0..n {
            cells[a * n + a] = a;
        }
        let mut rest = index;
        for &(a, b) in pairs.iter().rev() {
            let v = (rest % n as u128) as usize;
            rest /= n as u128;
            cells[a * n + b] = v;
            cells[b * n + a] = v;
        }
        let t = BinaryTable { n, cells };
        if t.is_associative() {
            out.push(t);
        }
    }
    out
}

/// The element `t` with `a ⊕ t = a` for all `a`, if any.
fn semilattice_top(s: &BinaryTable) -> Option<usize> {
    (0..s.n).find(|&t| (0..s.n).all(|a| s.get(a, t) == a))
}

fn semilattice_bottom(s: &BinaryTable) -> usize {
    (1..s.n).fold(0, |acc, a| s.get(acc, a))
}

fn ternary_from_index(n: usize, index: u128) -> Vec<usize> {
    let mut cells = vec![0; n * n * n];
    let mut rest = index;
    for cell in cells.iter_mut().rev() {
        *cell = (rest % n as u128) as usize;
        rest /= n as u128;
    }
    cells
}

fn instance(s: &BinaryTable, ternary: &[usize]) -> TableAlgebra {
    let top = semilattice_top(s).unwrap_or(0);
    TableAlgebra::from_parts(
        s.n,
        s.rows(),
        vec![(DEFAULT_GAMMA.to_string(), ternary.to_vec())],
        top,
        semilattice_bottom(s),
        None,
    )
}

/// Verdict for a single (semilattice, ternary) pair after the associativity
/// gate has passed.
enum Verdict {
    NotMonotone,
    NotDistributive,
    Factorizable,
    NonDegenerate,
}

fn judge(s: &BinaryTable, ternary: &[usize]) -> Verdict {
    let alg = instance(s, ternary);
    let cfg = CheckConfig {
        budget: usize::MAX,
        seed: 0,
    };
    if !check_monotonicity(&alg, Gamma(0), &cfg).passed {
        return Verdict::NotMonotone;
    }
    if !check_distributivity(&alg, Gamma(0), &cfg).passed {
        return Verdict::NotDistributive;
    }
    let fact = search_binary_factorization(&alg, Gamma(0), DEFAULT_FACTORIZATION_BUDGET)
        .expect("carrier sizes up to 3 fit the factorization budget");
    if fact.witnesses.is_empty() {
        Verdict::NonDegenerate
    } else {
        Verdict::Factorizable
    }
}

fn ternary_is_associative(n: usize, t: &[usize]) -> bool {
    let op = |x: usize, y: usize, z: usize| t[(x * n + y) * n + z];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let xyz = op(x, y, z);
                for u in 0..n {
                    let yzu = op(y, z, u);
                    for v in 0..n {
                        let left = op(xyz, u, v);
                        if left != op(x, yzu, v) || left != op(x, y, op(z, u, v)) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Searches for ordered ternary instances passing associativity, monotonicity
/// and distributivity that admit no binary factorization.
///
/// Ternary tables are enumerated exhaustively when `n^(n³)` fits in `budget`,
/// otherwise `budget` tables are drawn per semilattice from a generator seeded with `seed`.
pub fn search_nondegenerate_ttgs(
    carrier_size: usize,
    budget: u64,
    seed: u64,
    parallel: bool,
) -> Result<TtgsSearchReport, SearchError> {
    let n = carrier_size;
    if n == 0 || n > MAX_SEARCH_CARRIER {
        return Err(SearchError::CarrierSize(n));
    }
    let semilattices = enumerate_semilattices(n);
    let space = (n as u128).checked_pow((n * n * n) as u32);
    let exhaustive = space.is_some_and(|s| s <= budget as u128);
    let candidates: Vec<Vec<usize>> = if exhaustive {
        (0..space.expect("checked above"))
            .map(|i| ternary_from_index(n, i))
            .collect()
    } else {
        let mut rng = SampleRng::seed_from_u64(seed);
        (0..budget)
            .map(|_| (0..n * n * n).map(|_| rng.gen_range(0..n)).collect())
            .collect()
    };
    let assoc: Vec<bool> = if parallel {
        candidates.par_iter().map(|t| ternary_is_associative(n, t)).collect()
    } else {
        candidates.iter().map(|t| ternary_is_associative(n, t)).collect()
    };

    let mut survivors = GateCounts {
        associative: 0,
        monotone: 0,
        distributive: 0,
        factorizable: 0,
    };
    let mut found = Vec::new();
    for s in &semilattices {
        let kept: Vec<&Vec<usize>> = candidates
            .iter()
            .zip(&assoc)
            .filter_map(|(t, &ok)| ok.then_some(t))
            .collect();
        survivors.associative += kept.len() as u64;
        let verdicts: Vec<Verdict> = if parallel {
            kept.par_iter().map(|t| judge(s, t)).collect()
        } else {
            kept.iter().map(|t| judge(s, t)).collect()
        };
        for (t, verdict) in kept.into_iter().zip(verdicts) {
            match verdict {
                Verdict::NotMonotone => {}
                Verdict::NotDistributive => survivors.monotone += 1,
                Verdict::Factorizable => {
                    survivors.monotone += 1;
                    survivors.distributive += 1;
                    survivors.factorizable += 1;
                }
                Verdict::NonDegenerate => {
                    survivors.monotone += 1;
                    survivors.distributive += 1;
                    let table = semilattice_top(s).map(|_| instance(s, t).to_spec());
                    found.push(FoundInstance {
                        aggregate: s.clone(),
                        ternary: t.clone(),
                        table,
                    });
                }
            }
        }
    }
    found.sort_by(|a, b| (&a.aggregate, &a.ternary).cmp(&(&b.aggregate, &b.ternary)));
    Ok(TtgsSearchReport {
        carrier_size: n,
        semilattices_tried: semilattices.len(),
        ternary_ops_tried: candidates.len() as u128,
        combinations_examined: semilattices.len() as u128 * candidates.len() as u128,
        semilattices,
        survivors,
        found,
        exhaustive,
        seed,
        budget,
    })
}
