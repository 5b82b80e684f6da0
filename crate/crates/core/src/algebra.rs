//! Finite universal algebra: generated subalgebras, polynomial
//! equations, and the subalgebra poset.
//!
//! Carrier elements are indices `0..n`; named elements belong to I/O
//! mapping tables, not to the engine. Subalgebras are subsets closed
//! under every operation, stored as bitmasks. Two enumeration routes
//! are provided: brute force over all subsets (the oracle, capped) and
//! closure-grown search (reaches every subalgebra by adding one
//! generator at a time), and they are checked against each other.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::poset::{FinitePoset, PosetError};

/// Carrier cap for brute-force subset enumeration.
pub const BRUTE_FORCE_CAP: usize = 12;

/// Hard carrier cap (subsets are `u64` masks).
pub const MAX_CARRIER: usize = 63;

/// Default cap on the number of valuations one `satisfies` call may visit.
pub const DEFAULT_VALUATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("unknown operation symbol {0:?}")]
    UnknownSymbol(String),
    #[error("unbound variable {0:?}")]
    UnboundVariable(String),
    #[error("operation {symbol:?} expects {expected} arguments, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("table entry {value} out of carrier 0..{carrier}")]
    TableEntryOutOfRange { value: usize, carrier: usize },
    #[error("table for {symbol:?} has wrong shape")]
    TableShape { symbol: String },
    #[error("element index {0} out of carrier")]
    ElementOutOfRange(usize),
    #[error("size cap exceeded: {what} ({size} > {cap})")]
    SizeCapExceeded {
        what: &'static str,
        size: u64,
        cap: u64,
    },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A finite signature: operation symbols with arities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn arity_of(&self, symbol: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|(s, _)| s == symbol)
            .map(|(_, a)| *a)
    }
}

/// One operation table, stored flat in row-major tuple order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct OpTable {
    arity: usize,
    values: Vec<usize>,
}

/// A finite algebra: a carrier `0..n` and one total table per symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    carrier: usize,
    signature: Signature,
    tables: Vec<OpTable>,
}

/// Iterates over `members^arity` tuples, calling `visit` with the flat
/// row-major index of each tuple into a full `carrier^arity` table.
/// Returns early when `visit` does.
fn for_each_tuple(
    members: &[usize],
    arity: usize,
    carrier: usize,
    mut visit: impl FnMut(usize) -> bool,
) {
    if members.is_empty() {
        return;
    }
    let mut tuple = vec![0usize; arity];
    loop {
        let mut idx = 0usize;
        for &t in &tuple {
            idx = idx * carrier + members[t];
        }
        if !visit(idx) {
            return;
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < members.len() {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

impl FiniteAlgebra {
    pub fn new(
        carrier: usize,
        signature: Signature,
        tables: Vec<(String, Vec<usize>)>,
    ) -> Result<Self, AlgebraError> {
        if carrier == 0 || carrier > MAX_CARRIER {
            return Err(AlgebraError::SizeCapExceeded {
                what: "carrier",
                size: carrier as u64,
                cap: MAX_CARRIER as u64,
            });
        }
        // canonical symbol order for deterministic output
        let mut signature = signature;
        signature.symbols.sort();
        let mut ordered = Vec::with_capacity(signature.symbols.len());
        for (name, arity) in &signature.symbols {
            let (_, values) = tables
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| AlgebraError::UnknownSymbol(name.clone()))?;
            let expected = carrier.pow(*arity as u32);
            if values.len() != expected {
                return Err(AlgebraError::TableShape {
                    symbol: name.clone(),
                });
            }
            for &v in values {
                if v >= carrier {
                    return Err(AlgebraError::TableEntryOutOfRange { value: v, carrier });
                }
            }
            ordered.push(OpTable {
                arity: *arity,
                values: values.clone(),
            });
        }
        Ok(FiniteAlgebra {
            carrier,
            signature,
            tables: ordered,
        })
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.carrier) - 1
    }

    fn table(&self, symbol: &str) -> Result<&OpTable, AlgebraError> {
        let pos = self
            .signature
            .symbols
            .iter()
            .position(|(s, _)| s == symbol)
            .ok_or_else(|| AlgebraError::UnknownSymbol(symbol.to_string()))?;
        Ok(&self.tables[pos])
    }

    pub fn apply(&self, symbol: &str, args: &[usize]) -> Result<usize, AlgebraError> {
        let table = self.table(symbol)?;
        if args.len() != table.arity {
            return Err(AlgebraError::ArityMismatch {
                symbol: symbol.to_string(),
                expected: table.arity,
                got: args.len(),
            });
        }
        let mut idx = 0usize;
        for &a in args {
            if a >= self.carrier {
                return Err(AlgebraError::ElementOutOfRange(a));
            }
            idx = idx * self.carrier + a;
        }
        Ok(table.values[idx])
    }

    /// Is `mask` closed under every operation?
    pub fn is_closed(&self, mask: u64) -> bool {
        let members: Vec<usize> = (0..self.carrier).filter(|i| mask & (1 << i) != 0).collect();
        for table in &self.tables {
            if table.arity == 0 {
                if mask & (1 << table.values[0]) == 0 {
                    return false;
                }
                continue;
            }
            let mut closed = true;
            for_each_tuple(&members, table.arity, self.carrier, |idx| {
                closed = mask & (1 << table.values[idx]) != 0;
                closed
            });
            if !closed {
                return false;
            }
        }
        true
    }

    /// The subalgebra generated by `g`: iterated closure under the
    /// operations, stopping at the first fixed point.
    pub fn generate(&self, g: u64) -> u64 {
        let mut current = g & self.full_mask();
        loop {
            let mut next = current;
            let members: Vec<usize> = (0..self.carrier)
                .filter(|i| current & (1 << i) != 0)
                .collect();
            for table in &self.tables {
                if table.arity == 0 {
                    next |= 1 << table.values[0];
                    continue;
                }
                for_each_tuple(&members, table.arity, self.carrier, |idx| {
                    next |= 1 << table.values[idx];
                    true
                });
            }
            if next == current {
                return current;
            }
            current = next;
        }
    }

    /// All subalgebras by brute force over the 2^n subsets. This is the
    /// independent oracle route; capped.
    pub fn subalgebras_brute_force(&self) -> Result<BTreeSet<u64>, AlgebraError> {
        if self.carrier > BRUTE_FORCE_CAP {
            return Err(AlgebraError::SizeCapExceeded {
                what: "brute-force carrier",
                size: self.carrier as u64,
                cap: BRUTE_FORCE_CAP as u64,
            });
        }
        let full = self.full_mask();
        Ok((0..=full).filter(|&m| self.is_closed(m)).collect())
    }

    /// All subalgebras by closure-grown search: start from the
    /// subalgebra generated by the empty set and repeatedly adjoin one
    /// element and close. Every subalgebra is reached because it is
    /// generated by its own elements added one at a time.
    pub fn subalgebras_generated(&self, count_cap: usize) -> Result<BTreeSet<u64>, AlgebraError> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let least = self.generate(0);
        seen.insert(least);
        queue.push_back(least);
        while let Some(b) = queue.pop_front() {
            for x in 0..self.carrier {
                if b & (1 << x) != 0 {
                    continue;
                }
                let bigger = self.generate(b | (1 << x));
                if seen.insert(bigger) {
                    if seen.len() > count_cap {
                        return Err(AlgebraError::SizeCapExceeded {
                            what: "subalgebra count",
                            size: seen.len() as u64,
                            cap: count_cap as u64,
                        });
                    }
                    queue.push_back(bigger);
                }
            }
        }
        Ok(seen)
    }
}

/// A term over the signature: a variable or a symbol application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    fn var_occurrences(&self, counts: &mut BTreeMap<String, usize>) {
        match self {
            Term::Var(v) => *counts.entry(v.clone()).or_insert(0) += 1,
            Term::App(_, args) => {
                for a in args {
                    a.var_occurrences(counts);
                }
            }
        }
    }

    /// Checks arities against the signature.
    pub fn well_formed(&self, sig: &Signature) -> Result<(), AlgebraError> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let arity = sig
                    .arity_of(f)
                    .ok_or_else(|| AlgebraError::UnknownSymbol(f.clone()))?;
                if args.len() != arity {
                    return Err(AlgebraError::ArityMismatch {
                        symbol: f.clone(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                for a in args {
                    a.well_formed(sig)?;
                }
                Ok(())
            }
        }
    }

    /// Nested-array JSON: `["mul", "x", ["mul", "y", "z"]]`. A bare
    /// string is a variable if listed in `vars`, else a constant symbol.
    pub fn from_json(
        value: &Value,
        sig: &Signature,
        vars: &[String],
    ) -> Result<Term, AlgebraError> {
        let term = match value {
            Value::String(s) => {
                if vars.iter().any(|v| v == s) {
                    Term::Var(s.clone())
                } else if sig.arity_of(s).is_some() {
                    Term::App(s.clone(), vec![])
                } else {
                    return Err(AlgebraError::UnboundVariable(s.clone()));
                }
            }
            Value::Array(items) => {
                let head = items
                    .first()
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| AlgebraError::UnknownSymbol(format!("{value}")))?;
                let args = items[1..]
                    .iter()
                    .map(|v| Term::from_json(v, sig, vars))
                    .collect::<Result<Vec<_>, _>>()?;
                Term::App(head.to_string(), args)
            }
            other => return Err(AlgebraError::UnknownSymbol(format!("{other}"))),
        };
        term.well_formed(sig)?;
        Ok(term)
    }

    pub fn to_json(&self) -> Value {
        match self {
            Term::Var(v) => Value::String(v.clone()),
            Term::App(f, args) if args.is_empty() => Value::String(f.clone()),
            Term::App(f, args) => {
                let mut items = vec![Value::String(f.clone())];
                items.extend(args.iter().map(Term::to_json));
                Value::Array(items)
            }
        }
    }
}

/// Inductive evaluation of a term under a valuation of its variables.
pub fn eval_term(
    algebra: &FiniteAlgebra,
    term: &Term,
    valuation: &BTreeMap<String, usize>,
) -> Result<usize, AlgebraError> {
    match term {
        Term::Var(v) => valuation
            .get(v)
            .copied()
            .ok_or_else(|| AlgebraError::UnboundVariable(v.clone())),
        Term::App(f, args) => {
            let values = args
                .iter()
                .map(|a| eval_term(algebra, a, valuation))
                .collect::<Result<Vec<_>, _>>()?;
            algebra.apply(f, &values)
        }
    }
}

/// A polynomial equation: two terms over a shared variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub vars: Vec<String>,
}

impl Equation {
    /// Linearity: each variable occurs at most once in each side.
    pub fn is_linear(&self) -> bool {
        [&self.lhs, &self.rhs].iter().all(|side| {
            let mut counts = BTreeMap::new();
            side.var_occurrences(&mut counts);
            counts.values().all(|&c| c <= 1)
        })
    }

    pub fn from_json(value: &Value, sig: &Signature) -> Result<Equation, AlgebraError> {
        #[derive(Deserialize)]
        struct Raw {
            lhs: Value,
            rhs: Value,
            vars: Vec<String>,
        }
        let raw: Raw = serde_json::from_value(value.clone())
            .map_err(|e| AlgebraError::UnknownSymbol(e.to_string()))?;
        Ok(Equation {
            lhs: Term::from_json(&raw.lhs, sig, &raw.vars)?,
            rhs: Term::from_json(&raw.rhs, sig, &raw.vars)?,
            vars: raw.vars,
        })
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "vars": self.vars,
        })
    }
}

/// Does the subset `b` satisfy the equation under every valuation into
/// `b`? Exhaustive over |b|^#vars valuations, capped.
pub fn satisfies(
    algebra: &FiniteAlgebra,
    b: u64,
    equation: &Equation,
    valuation_cap: u64,
) -> Result<bool, AlgebraError> {
    let members: Vec<usize> = (0..algebra.carrier_size())
        .filter(|i| b & (1 << i) != 0)
        .collect();
    let k = equation.vars.len();
    if members.is_empty() {
        return Ok(true); // no valuations exist
    }
    match (members.len() as u64).checked_pow(k as u32) {
        Some(c) if c <= valuation_cap => {}
        other => {
            return Err(AlgebraError::SizeCapExceeded {
                what: "valuations",
                size: other.unwrap_or(u64::MAX),
                cap: valuation_cap,
            })
        }
    }
    let mut choice = vec![0usize; k];
    loop {
        let valuation: BTreeMap<String, usize> = equation
            .vars
            .iter()
            .zip(&choice)
            .map(|(v, &c)| (v.clone(), members[c]))
            .collect();
        if eval_term(algebra, &equation.lhs, &valuation)?
            != eval_term(algebra, &equation.rhs, &valuation)?
        {
            return Ok(false);
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(true);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < members.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

pub fn satisfies_all(
    algebra: &FiniteAlgebra,
    b: u64,
    equations: &[Equation],
    valuation_cap: u64,
) -> Result<bool, AlgebraError> {
    for e in equations {
        if !satisfies(algebra, b, e, valuation_cap)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The poset of subalgebras, with meets and joins exposed.
#[derive(Debug, Clone)]
pub struct SubalgebraLattice {
    /// Masks sorted by (popcount, mask value); labels follow this order.
    pub sets: Vec<u64>,
    pub poset: FinitePoset,
    labels: Vec<String>,
}

impl SubalgebraLattice {
    fn from_sets(sets: BTreeSet<u64>) -> Result<Self, AlgebraError> {
        let mut ordered: Vec<u64> = sets.into_iter().collect();
        ordered.sort_by_key(|&m| (m.count_ones(), m));
        let width = ordered.len().to_string().len().max(2);
        let labels: Vec<String> = (0..ordered.len())
            .map(|i| format!("B{i:0width$}"))
            .collect();
        let mut edges = Vec::new();
        for (i, &a) in ordered.iter().enumerate() {
            for (j, &b) in ordered.iter().enumerate() {
                if i != j && a & b == a {
                    edges.push((labels[i].clone(), labels[j].clone()));
                }
            }
        }
        let poset = FinitePoset::validate(&labels, &edges)?;
        Ok(SubalgebraLattice {
            sets: ordered,
            poset,
            labels,
        })
    }

    pub fn label_of(&self, mask: u64) -> Option<&str> {
        self.sets
            .iter()
            .position(|&m| m == mask)
            .map(|i| self.labels[i].as_str())
    }

    pub fn mask_of_label(&self, label: &str) -> Option<u64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.sets[i])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Meet is plain intersection (always a member in the full lattice).
    pub fn meet(&self, a: u64, b: u64) -> u64 {
        a & b
    }

    /// Join is the subalgebra generated by the union.
    pub fn join(&self, algebra: &FiniteAlgebra, a: u64, b: u64) -> u64 {
        algebra.generate(a | b)
    }
}

/// The poset `⟨Sub_A, ⊆⟩`. Uses brute force within its cap and the
/// closure-grown route above it.
pub fn enumerate_subalgebras(algebra: &FiniteAlgebra) -> Result<SubalgebraLattice, AlgebraError> {
    let sets = if algebra.carrier_size() <= BRUTE_FORCE_CAP {
        algebra.subalgebras_brute_force()?
    } else {
        algebra.subalgebras_generated(100_000)?
    };
    SubalgebraLattice::from_sets(sets)
}

/// The induced subposet of subalgebras satisfying every equation in `es`.
pub fn sub_e_poset(
    algebra: &FiniteAlgebra,
    equations: &[Equation],
    valuation_cap: u64,
) -> Result<SubalgebraLattice, AlgebraError> {
    let all = enumerate_subalgebras(algebra)?;
    let mut kept = BTreeSet::new();
    for &m in &all.sets {
        if satisfies_all(algebra, m, equations, valuation_cap)? {
            kept.insert(m);
        }
    }
    SubalgebraLattice::from_sets(kept)
}

/// Way-below in a subalgebra poset: containment plus finite
/// generation. Every subalgebra of a finite algebra is generated by its
/// own finitely many elements, so the second conjunct is constant here;
/// the operation exists to be validated against the definitional poset
/// oracle.
pub fn way_below_fg(c: u64, b: u64) -> bool {
    let finitely_generated = true;
    c & b == c && finitely_generated
}

/// The finitely generated subalgebras contained in `b` — for a finite
/// algebra, all members of the lattice contained in `b`.
pub fn sub_fin(lattice: &SubalgebraLattice, b: u64) -> Vec<u64> {
    lattice
        .sets
        .iter()
        .copied()
        .filter(|&c| c & b == c)
        .collect()
}

/// JSON schema: `{"carrier": n, "ops": {"mul": {"arity": 2, "table": [[...]]},
/// "e": {"arity": 0, "table": k}}}`.
pub fn algebra_from_json(value: &Value) -> Result<FiniteAlgebra, AlgebraError> {
    #[derive(Deserialize)]
    struct RawOp {
        arity: usize,
        table: Value,
    }
    #[derive(Deserialize)]
    struct Raw {
        carrier: usize,
        ops: BTreeMap<String, RawOp>,
    }
    let raw: Raw = serde_json::from_value(value.clone())
        .map_err(|e| AlgebraError::UnknownSymbol(e.to_string()))?;
    let mut symbols = Vec::new();
    let mut tables = Vec::new();
    for (name, op) in raw.ops {
        let mut flat = Vec::new();
        flatten_table(&op.table, op.arity, raw.carrier, &name, &mut flat)?;
        symbols.push((name.clone(), op.arity));
        tables.push((name, flat));
    }
    FiniteAlgebra::new(raw.carrier, Signature { symbols }, tables)
}

fn flatten_table(
    value: &Value,
    depth: usize,
    carrier: usize,
    symbol: &str,
    out: &mut Vec<usize>,
) -> Result<(), AlgebraError> {
    if depth == 0 {
        let v = value.as_u64().ok_or_else(|| AlgebraError::TableShape {
            symbol: symbol.to_string(),
        })?;
        out.push(v as usize);
        return Ok(());
    }
    let arr = value.as_array().ok_or_else(|| AlgebraError::TableShape {
        symbol: symbol.to_string(),
    })?;
    if arr.len() != carrier {
        return Err(AlgebraError::TableShape {
            symbol: symbol.to_string(),
        });
    }
    for item in arr {
        flatten_table(item, depth - 1, carrier, symbol, out)?;
    }
    Ok(())
}

pub fn algebra_to_json(algebra: &FiniteAlgebra) -> Value {
    let mut ops = serde_json::Map::new();
    for ((name, arity), table) in algebra.signature.symbols.iter().zip(&algebra.tables) {
        let table_json = nest_table(&table.values, *arity, algebra.carrier);
        ops.insert(
            name.clone(),
            serde_json::json!({"arity": arity, "table": table_json}),
        );
    }
    serde_json::json!({"carrier": algebra.carrier, "ops": ops})
}

fn nest_table(values: &[usize], arity: usize, carrier: usize) -> Value {
    if arity == 0 {
        return Value::from(values[0]);
    }
    if arity == 1 {
        return Value::Array(values.iter().map(|&v| Value::from(v)).collect());
    }
    let stride = values.len() / carrier;
    Value::Array(
        (0..carrier)
            .map(|i| nest_table(&values[i * stride..(i + 1) * stride], arity - 1, carrier))
            .collect(),
    )
}

/// Stock algebras used by tests and the property battery.
pub mod samples {
    use super::{Equation, FiniteAlgebra, Signature, Term};

    /// The group signature: binary `mul`, constant `e`, unary `inv`.
    pub fn group_signature() -> Signature {
        Signature {
            symbols: vec![
                ("mul".to_string(), 2),
                ("e".to_string(), 0),
                ("inv".to_string(), 1),
            ],
        }
    }

    fn group_from_mul(n: usize, mul: impl Fn(usize, usize) -> usize) -> FiniteAlgebra {
        let mut mul_table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                mul_table.push(mul(a, b));
            }
        }
        let mut inv_table = vec![0usize; n];
        for (a, slot) in inv_table.iter_mut().enumerate() {
            *slot = (0..n).find(|&b| mul(a, b) == 0).expect("group inverse");
        }
        FiniteAlgebra::new(
            n,
            group_signature(),
            vec![
                ("mul".to_string(), mul_table),
                ("e".to_string(), vec![0]),
                ("inv".to_string(), inv_table),
            ],
        )
        .expect("valid group table")
    }

    /// The cyclic group of order `n` under addition.
    pub fn cyclic_group(n: usize) -> FiniteAlgebra {
        group_from_mul(n, move |a, b| (a + b) % n)
    }

    /// Element 0 must be the identity permutation.
    fn perm_group(perms: Vec<Vec<usize>>) -> FiniteAlgebra {
        let n = perms.len();
        let compose = {
            let perms = perms.clone();
            move |a: usize, b: usize| -> usize {
                let composed: Vec<usize> =
                    (0..perms[a].len()).map(|i| perms[a][perms[b][i]]).collect();
                perms.iter().position(|p| *p == composed).expect("closed")
            }
        };
        group_from_mul(n, compose)
    }

    /// The symmetric group on 3 points.
    pub fn symmetric_group_3() -> FiniteAlgebra {
        let perms: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ];
        perm_group(perms)
    }

    /// The dihedral group of the square (8 elements), as permutations
    /// of the 4 corners.
    pub fn dihedral_group_4() -> FiniteAlgebra {
        let rot = |k: usize| -> Vec<usize> { (0..4).map(|i| (i + k) % 4).collect() };
        let mut perms: Vec<Vec<usize>> = (0..4).map(rot).collect();
        for k in 0..4 {
            let r = rot(k);
            perms.push((0..4).map(|i| r[(4 - i) % 4]).collect());
        }
        perms.sort();
        perms.dedup();
        assert_eq!(perms.len(), 8);
        let id = perms.iter().position(|p| *p == vec![0, 1, 2, 3]).unwrap();
        perms.swap(0, id);
        perm_group(perms)
    }

    /// `xy = yx` over the group signature.
    pub fn commutativity() -> Equation {
        Equation {
            lhs: Term::App(
                "mul".to_string(),
                vec![Term::Var("x".to_string()), Term::Var("y".to_string())],
            ),
            rhs: Term::App(
                "mul".to_string(),
                vec![Term::Var("y".to_string()), Term::Var("x".to_string())],
            ),
            vars: vec!["x".to_string(), "y".to_string()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;
    use crate::poset::DEFAULT_REPORT_CAP;

    fn mask(elems: &[usize]) -> u64 {
        elems.iter().fold(0, |m, &e| m | (1 << e))
    }

    #[test]
    fn eval_modular_addition() {
        let z3 = cyclic_group(3);
        let term = Term::App(
            "mul".into(),
            vec![Term::Var("x".into()), Term::Var("y".into())],
        );
        let v: BTreeMap<String, usize> = [("x".to_string(), 1), ("y".to_string(), 2)]
            .into_iter()
            .collect();
        assert_eq!(eval_term(&z3, &term, &v).unwrap(), 0);
        assert_eq!(eval_term(&z3, &Term::Var("x".into()), &v).unwrap(), 1);
        let nested = Term::App(
            "mul".into(),
            vec![
                Term::App(
                    "mul".into(),
                    vec![Term::Var("x".into()), Term::Var("y".into())],
                ),
                Term::Var("x".into()),
            ],
        );
        let v1: BTreeMap<String, usize> = [("x".to_string(), 2), ("y".to_string(), 2)]
            .into_iter()
            .collect();
        assert_eq!(eval_term(&z3, &nested, &v1).unwrap(), 0);
        assert!(matches!(
            eval_term(&z3, &Term::Var("z".into()), &v),
            Err(AlgebraError::UnboundVariable(_))
        ));
    }

    #[test]
    fn generate_in_z6() {
        let z6 = cyclic_group(6);
        assert_eq!(z6.generate(mask(&[2])), mask(&[0, 2, 4]));
        // constants force membership even from the empty set
        assert_eq!(z6.generate(0), mask(&[0]));
        let full = z6.full_mask();
        assert_eq!(z6.generate(full), full);
    }

    #[test]
    fn generate_is_a_closure_operator() {
        let s3 = symmetric_group_3();
        let full = s3.full_mask();
        for g in 0..=full {
            let c = s3.generate(g);
            assert_eq!(c & g, g, "extensive");
            assert_eq!(s3.generate(c), c, "idempotent");
            for h in [g & (g >> 1), g & 0b1010, 0] {
                let sub = h & g;
                let csub = s3.generate(sub);
                assert_eq!(csub & c, csub, "monotone");
            }
        }
    }

    #[test]
    fn z4_has_three_subalgebras() {
        let z4 = cyclic_group(4);
        let lattice = enumerate_subalgebras(&z4).unwrap();
        assert_eq!(
            lattice.sets,
            vec![mask(&[0]), mask(&[0, 2]), mask(&[0, 1, 2, 3])]
        );
        let report = lattice.poset.domain_report(DEFAULT_REPORT_CAP).unwrap();
        assert!(report.is_complete_lattice);
    }

    #[test]
    fn brute_force_and_generated_routes_agree() {
        for algebra in [
            cyclic_group(4),
            cyclic_group(6),
            symmetric_group_3(),
            dihedral_group_4(),
        ] {
            let brute = algebra.subalgebras_brute_force().unwrap();
            let grown = algebra.subalgebras_generated(100_000).unwrap();
            assert_eq!(brute, grown);
        }
    }

    #[test]
    fn s3_commutativity() {
        let s3 = symmetric_group_3();
        let comm = commutativity();
        let full = s3.full_mask();
        assert!(!satisfies(&s3, full, &comm, DEFAULT_VALUATION_CAP).unwrap());
        // every 2-element subgroup is abelian
        let lattice = enumerate_subalgebras(&s3).unwrap();
        for &m in &lattice.sets {
            if m.count_ones() == 2 {
                assert!(satisfies(&s3, m, &comm, DEFAULT_VALUATION_CAP).unwrap());
            }
        }
        // the empty equation system is vacuously satisfied
        assert!(satisfies_all(&s3, full, &[], DEFAULT_VALUATION_CAP).unwrap());
    }

    #[test]
    fn s3_has_five_abelian_subgroups() {
        let s3 = symmetric_group_3();
        let abelian = sub_e_poset(&s3, &[commutativity()], DEFAULT_VALUATION_CAP).unwrap();
        assert_eq!(abelian.sets.len(), 5);
        let orders: Vec<u32> = abelian.sets.iter().map(|m| m.count_ones()).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3]);
    }

    #[test]
    fn z4_already_abelian() {
        let z4 = cyclic_group(4);
        let all = enumerate_subalgebras(&z4).unwrap();
        let abelian = sub_e_poset(&z4, &[commutativity()], DEFAULT_VALUATION_CAP).unwrap();
        assert_eq!(all.sets, abelian.sets);
    }

    #[test]
    fn sub_e_is_downward_closed() {
        let s3 = symmetric_group_3();
        let all = enumerate_subalgebras(&s3).unwrap();
        let comm = [commutativity()];
        for &b in &all.sets {
            if satisfies_all(&s3, b, &comm, DEFAULT_VALUATION_CAP).unwrap() {
                for &c in &all.sets {
                    if c & b == c {
                        assert!(satisfies_all(&s3, c, &comm, DEFAULT_VALUATION_CAP).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn linearity_examples() {
        assert!(commutativity().is_linear());
        let x_squared = Equation {
            lhs: Term::App(
                "mul".into(),
                vec![Term::Var("x".into()), Term::Var("x".into())],
            ),
            rhs: Term::Var("x".into()),
            vars: vec!["x".into()],
        };
        assert!(!x_squared.is_linear());
        let constants = Equation {
            lhs: Term::App("e".into(), vec![]),
            rhs: Term::App("e".into(), vec![]),
            vars: vec![],
        };
        assert!(constants.is_linear());
    }

    #[test]
    fn way_below_fg_examples() {
        let z4 = cyclic_group(4);
        let lattice = enumerate_subalgebras(&z4).unwrap();
        let full = mask(&[0, 1, 2, 3]);
        assert!(way_below_fg(mask(&[0, 2]), full));
        assert!(!way_below_fg(full, mask(&[0, 2])));
        // every subalgebra of a finite algebra is way below itself
        for &b in &lattice.sets {
            assert!(way_below_fg(b, b));
        }
        // Sub_fin(B) exhausts the downset and unions back to B
        for &b in &lattice.sets {
            let fin = sub_fin(&lattice, b);
            let union = fin.iter().fold(0u64, |a, &c| a | c);
            assert_eq!(union, b);
        }
    }

    #[test]
    fn lattice_meet_and_join() {
        let z6 = cyclic_group(6);
        let lattice = enumerate_subalgebras(&z6).unwrap();
        let two = mask(&[0, 2, 4]);
        let three = mask(&[0, 3]);
        assert_eq!(lattice.meet(two, three), mask(&[0]));
        assert_eq!(lattice.join(&z6, two, three), z6.full_mask());
    }

    #[test]
    fn json_round_trip() {
        let z3 = cyclic_group(3);
        let json = algebra_to_json(&z3);
        let back = algebra_from_json(&json).unwrap();
        assert_eq!(back, z3);
        let term_json = serde_json::json!(["mul", "x", ["mul", "y", "x"]]);
        let term = Term::from_json(&term_json, z3.signature(), &["x".into(), "y".into()]).unwrap();
        assert_eq!(term.to_json(), term_json);
        // constants parse as bare strings
        let const_term = Term::from_json(&serde_json::json!("e"), z3.signature(), &[]).unwrap();
        assert_eq!(const_term, Term::App("e".into(), vec![]));
    }

    #[test]
    fn bad_tables_are_rejected() {
        let sig = Signature {
            symbols: vec![("f".into(), 1)],
        };
        assert!(matches!(
            FiniteAlgebra::new(2, sig.clone(), vec![("f".into(), vec![0, 5])]),
            Err(AlgebraError::TableEntryOutOfRange { .. })
        ));
        assert!(matches!(
            FiniteAlgebra::new(2, sig, vec![("f".into(), vec![0])]),
            Err(AlgebraError::TableShape { .. })
        ));
    }
}
