//! Sign systems: sorts, constructors, relations and ranked constraints, plus
//! ground sign terms and the finite configurations built from them.
//!
//! A [`SignSystem`] is immutable once built. The subsort relation is kept as
//! the declared edge list and answered through a reflexive-transitive closure
//! computed at construction time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Which side of the product/environment boundary a sign-sort lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Boundary {
    Product,
    Environment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SortKind {
    Data,
    Sign(Boundary),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
    pub kind: SortKind,
}

impl SortDecl {
    pub fn data(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: SortKind::Data,
        }
    }

    pub fn product(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: SortKind::Sign(Boundary::Product),
        }
    }

    pub fn environment(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: SortKind::Sign(Boundary::Environment),
        }
    }

    pub fn is_data(&self) -> bool {
        matches!(self.kind, SortKind::Data)
    }

    pub fn boundary(&self) -> Option<Boundary> {
        match self.kind {
            SortKind::Data => None,
            SortKind::Sign(b) => Some(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub name: String,
    pub arg_sorts: Vec<String>,
    pub result_sort: String,
    pub level: i64,
    pub priority: i64,
}

impl ConstructorDecl {
    pub fn new(
        name: impl Into<String>,
        arg_sorts: &[&str],
        result_sort: impl Into<String>,
        level: i64,
    ) -> Self {
        Self {
            name: name.into(),
            arg_sorts: arg_sorts.iter().map(|s| s.to_string()).collect(),
            result_sort: result_sort.into(),
            level,
            priority: 0,
        }
    }

    pub fn with_priority(mut self, priority: i64) -> Self {
        self.priority = priority;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationDecl {
    pub name: String,
    pub arg_sorts: Vec<String>,
}

impl RelationDecl {
    pub fn new(name: impl Into<String>, arg_sorts: &[&str]) -> Self {
        Self {
            name: name.into(),
            arg_sorts: arg_sorts.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// One position of a constraint pattern.
#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    Wildcard,
    /// Named variable; repeated occurrences must bind the same term.
    Var(String),
    /// Ground term the tuple argument must equal structurally.
    Term(SignTerm),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintBody {
    Forbid { relation: String, pattern: Vec<Atom> },
    Require { relation: String, pattern: Vec<Atom> },
    AtMost { relation: String, count: usize },
}

impl ConstraintBody {
    pub fn relation(&self) -> &str {
        match self {
            ConstraintBody::Forbid { relation, .. }
            | ConstraintBody::Require { relation, .. }
            | ConstraintBody::AtMost { relation, .. } => relation,
        }
    }

    pub fn pattern(&self) -> Option<&[Atom]> {
        match self {
            ConstraintBody::Forbid { pattern, .. } | ConstraintBody::Require { pattern, .. } => {
                Some(pattern)
            }
            ConstraintBody::AtMost { .. } => None,
        }
    }
}

/// A ranked axiom. Rank 0 is the most important; larger ranks give way first.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub rank: u32,
    pub body: ConstraintBody,
}

/// Kinds of data literal and the data-sort each one inhabits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiteralKind {
    Int,
    Real,
    Str,
}

impl LiteralKind {
    pub fn sort_name(self) -> &'static str {
        match self {
            LiteralKind::Int => "Int",
            LiteralKind::Real => "Real",
            LiteralKind::Str => "String",
        }
    }
}

/// A ground sign term: a constructor applied to argument terms, or a data literal.
#[derive(Clone, Debug, PartialEq)]
pub enum SignTerm {
    App { ctor: String, args: Vec<SignTerm> },
    Int(i64),
    Real(f64),
    Str(String),
}

impl SignTerm {
    pub fn app(ctor: impl Into<String>, args: Vec<SignTerm>) -> Self {
        SignTerm::App {
            ctor: ctor.into(),
            args,
        }
    }

    pub fn literal_kind(&self) -> Option<LiteralKind> {
        match self {
            SignTerm::App { .. } => None,
            SignTerm::Int(_) => Some(LiteralKind::Int),
            SignTerm::Real(_) => Some(LiteralKind::Real),
            SignTerm::Str(_) => Some(LiteralKind::Str),
        }
    }

    /// Visits this term and every subterm, outermost first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SignTerm)) {
        f(self);
        if let SignTerm::App { args, .. } = self {
            for a in args {
                a.walk(f);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SignTerm::App { args, .. } => 1 + args.iter().map(|a| a.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }
}

pub(crate) fn write_string_literal(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for SignTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignTerm::App { ctor, args } => {
                write!(f, "{ctor}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            SignTerm::Int(v) => write!(f, "{v}"),
            // Debug formatting of f64 is shortest round-trip and always marks reals.
            SignTerm::Real(v) => write!(f, "{v:?}"),
            SignTerm::Str(s) => write_string_literal(f, s),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Wildcard => f.write_str("*"),
            Atom::Var(v) => f.write_str(v),
            Atom::Term(t) => write!(f, "{t}"),
        }
    }
}

impl fmt::Display for ConstraintBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kw, relation, pattern) = match self {
            ConstraintBody::AtMost { relation, count } => {
                return write!(f, "atmost {relation} {count}");
            }
            ConstraintBody::Forbid { relation, pattern } => ("forbid", relation, pattern),
            ConstraintBody::Require { relation, pattern } => ("require", relation, pattern),
        };
        write!(f, "{kw} {relation}(")?;
        for (i, a) in pattern.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Reflexive-transitive closure of the declared subsort edges.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
struct SubsortClosure {
    index: BTreeMap<String, usize>,
    reach: Vec<Vec<bool>>,
}

impl SubsortClosure {
    fn build(sorts: &[SortDecl], edges: &[(String, String)]) -> Self {
        let mut index = BTreeMap::new();
        for s in sorts {
            let next = index.len();
            index.entry(s.name.clone()).or_insert(next);
        }
        let n = index.len();
        let mut succ = vec![Vec::new(); n];
        for (sub, sup) in edges {
            if let (Some(&a), Some(&b)) = (index.get(sub), index.get(sup)) {
                succ[a].push(b);
            }
        }
        let mut reach = vec![vec![false; n]; n];
        for (start, row) in reach.iter_mut().enumerate() {
            let mut stack = vec![start];
            row[start] = true;
            while let Some(v) = stack.pop() {
                for &w in &succ[v] {
                    if !row[w] {
                        row[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        Self { index, reach }
    }

    fn leq(&self, a: &str, b: &str) -> Option<bool> {
        let i = *self.index.get(a)?;
        let j = *self.index.get(b)?;
        Some(self.reach[i][j])
    }
}

/// The five-part sign system: sign-sorts and data-sorts, constructors,
/// relations and ranked constraints, with the subsort order on sign-sorts.
#[derive(Clone, Debug, PartialEq)]
pub struct SignSystem {
    name: String,
    sorts: Vec<SortDecl>,
    subsorts: Vec<(String, String)>,
    constructors: Vec<ConstructorDecl>,
    relations: Vec<RelationDecl>,
    constraints: Vec<Constraint>,
    closure: SubsortClosure,
    sort_ix: BTreeMap<String, usize>,
    ctor_ix: BTreeMap<String, usize>,
    rel_ix: BTreeMap<String, usize>,
}

fn first_index<'a>(names: impl Iterator<Item = &'a str>) -> BTreeMap<String, usize> {
    let mut map = BTreeMap::new();
    for (i, n) in names.enumerate() {
        map.entry(n.to_string()).or_insert(i);
    }
    map
}

impl SignSystem {
    pub fn new(
        name: impl Into<String>,
        sorts: Vec<SortDecl>,
        subsorts: Vec<(String, String)>,
        constructors: Vec<ConstructorDecl>,
        relations: Vec<RelationDecl>,
        constraints: Vec<Constraint>,
    ) -> Self {
        // Edges form a set; a canonical order keeps equality structural.
        let mut subsorts = subsorts;
        subsorts.sort();
        let closure = SubsortClosure::build(&sorts, &subsorts);
        let sort_ix = first_index(sorts.iter().map(|s| s.name.as_str()));
        let ctor_ix = first_index(constructors.iter().map(|c| c.name.as_str()));
        let rel_ix = first_index(relations.iter().map(|r| r.name.as_str()));
        Self {
            name: name.into(),
            sorts,
            subsorts,
            constructors,
            relations,
            constraints,
            closure,
            sort_ix,
            ctor_ix,
            rel_ix,
        }
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Self::new(name, vec![], vec![], vec![], vec![], vec![])
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn sorts(&self) -> &[SortDecl] {
        &self.sorts
    }
    pub fn subsort_edges(&self) -> &[(String, String)] {
        &self.subsorts
    }
    pub fn constructors(&self) -> &[ConstructorDecl] {
        &self.constructors
    }
    pub fn relations(&self) -> &[RelationDecl] {
        &self.relations
    }
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn sort(&self, name: &str) -> Option<&SortDecl> {
        self.sort_ix.get(name).map(|&i| &self.sorts[i])
    }
    pub fn constructor(&self, name: &str) -> Option<&ConstructorDecl> {
        self.ctor_ix.get(name).map(|&i| &self.constructors[i])
    }
    pub fn relation(&self, name: &str) -> Option<&RelationDecl> {
        self.rel_ix.get(name).map(|&i| &self.relations[i])
    }

    /// Boundary tag of a sort; `None` for data-sorts and unknown names.
    pub fn boundary_of(&self, sort: &str) -> Option<Boundary> {
        self.sort(sort).and_then(SortDecl::boundary)
    }

    /// `s1 ≤ s2` in the reflexive-transitive closure of the subsort edges.
    pub fn subsort_leq(&self, s1: &str, s2: &str) -> Result<bool, SortError> {
        for s in [s1, s2] {
            if self.sort(s).is_none() {
                return Err(SortError::UnknownSort(s.to_string()));
            }
        }
        Ok(self.closure.leq(s1, s2).unwrap_or(false))
    }

    /// Infallible variant for internal use; unknown names are unrelated.
    pub(crate) fn leq(&self, s1: &str, s2: &str) -> bool {
        self.closure.leq(s1, s2).unwrap_or(false)
    }

    /// Computes the sort of a ground term, checking every argument against
    /// its declared sort up to subsorting.
    pub fn well_sorted(&self, term: &SignTerm) -> Result<String, SortError> {
        match term {
            SignTerm::App { ctor, args } => {
                let decl = self
                    .constructor(ctor)
                    .ok_or_else(|| SortError::UnknownConstructor(ctor.clone()))?;
                if decl.arg_sorts.len() != args.len() {
                    return Err(SortError::ArityMismatch {
                        symbol: ctor.clone(),
                        expected: decl.arg_sorts.len(),
                        found: args.len(),
                    });
                }
                for (position, (arg, expected)) in args.iter().zip(&decl.arg_sorts).enumerate() {
                    let found = self.well_sorted(arg)?;
                    if !self.leq(&found, expected) {
                        return Err(SortError::SortMismatch {
                            symbol: ctor.clone(),
                            position,
                            expected: expected.clone(),
                            found,
                        });
                    }
                }
                Ok(decl.result_sort.clone())
            }
            lit => {
                let sort = lit.literal_kind().expect("non-app term is a literal").sort_name();
                match self.sort(sort) {
                    Some(decl) if decl.is_data() => Ok(sort.to_string()),
                    _ => Err(SortError::UnknownSort(sort.to_string())),
                }
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SortError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("`{symbol}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("argument {position} of `{symbol}` has sort `{found}`, which is not below `{expected}`")]
    SortMismatch {
        symbol: String,
        position: usize,
        expected: String,
        found: String,
    },
}

impl SortError {
    pub fn code(&self) -> &'static str {
        match self {
            SortError::UnknownSort(_) => "UNKNOWN_SORT",
            SortError::UnknownConstructor(_) => "UNKNOWN_CONSTRUCTOR",
            SortError::ArityMismatch { .. } => "ARITY_MISMATCH",
            SortError::SortMismatch { .. } => "SORT_MISMATCH",
        }
    }
}

/// Stable diagnostic codes reported by [`validate_system`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SystemCode {
    DuplicateSort,
    DuplicateConstructor,
    DuplicateRelation,
    DuplicateConstraint,
    UnknownSort,
    ResultNotSignSort,
    SubsortOnDataSort,
    CyclicSubsort,
    UnknownRelation,
    PatternArity,
    PatternSort,
}

impl SystemCode {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemCode::DuplicateSort => "DUPLICATE_SORT",
            SystemCode::DuplicateConstructor => "DUPLICATE_CONSTRUCTOR",
            SystemCode::DuplicateRelation => "DUPLICATE_RELATION",
            SystemCode::DuplicateConstraint => "DUPLICATE_CONSTRAINT",
            SystemCode::UnknownSort => "UNKNOWN_SORT",
            SystemCode::ResultNotSignSort => "RESULT_NOT_SIGN_SORT",
            SystemCode::SubsortOnDataSort => "SUBSORT_ON_DATA_SORT",
            SystemCode::CyclicSubsort => "CYCLIC_SUBSORT",
            SystemCode::UnknownRelation => "UNKNOWN_RELATION",
            SystemCode::PatternArity => "PATTERN_ARITY",
            SystemCode::PatternSort => "PATTERN_SORT",
        }
    }
}

impl fmt::Display for SystemCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The declaration a diagnostic is about, by position in the system's lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subject {
    Sort(usize),
    Edge {
        index: usize,
        /// 0 = subsort side, 1 = supersort side.
        side: usize,
    },
    /// `arg: None` points at the result sort.
    Constructor { index: usize, arg: Option<usize> },
    Relation { index: usize, arg: usize },
    Constraint { index: usize, atom: Option<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemDiagnostic {
    pub code: SystemCode,
    pub subject: Subject,
    pub message: String,
}

pub type ValidationReport = Vec<SystemDiagnostic>;

/// Checks every declaration invariant of a sign system. An empty report means
/// the system is valid.
pub fn validate_system(sys: &SignSystem) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |code, subject, message: String| {
        out.push(SystemDiagnostic {
            code,
            subject,
            message,
        })
    };

    let mut seen = BTreeSet::new();
    for (i, s) in sys.sorts.iter().enumerate() {
        if !seen.insert(s.name.as_str()) {
            push(
                SystemCode::DuplicateSort,
                Subject::Sort(i),
                format!("sort `{}` declared twice", s.name),
            );
        }
    }

    for (i, (sub, sup)) in sys.subsorts.iter().enumerate() {
        let mut ok = true;
        for (side, s) in [sub, sup].into_iter().enumerate() {
            match sys.sort(s) {
                None => {
                    ok = false;
                    push(
                        SystemCode::UnknownSort,
                        Subject::Edge { index: i, side },
                        format!("unknown sort `{s}` in subsort edge"),
                    );
                }
                Some(d) if d.is_data() => {
                    ok = false;
                    push(
                        SystemCode::SubsortOnDataSort,
                        Subject::Edge { index: i, side },
                        format!("data sort `{s}` cannot take part in subsorting"),
                    );
                }
                Some(_) => {}
            }
        }
        if ok && sub != sup && sys.leq(sup, sub) {
            push(
                SystemCode::CyclicSubsort,
                Subject::Edge { index: i, side: 0 },
                format!("subsort edge `{sub} < {sup}` lies on a cycle"),
            );
        }
    }

    let mut seen = BTreeSet::new();
    for (i, c) in sys.constructors.iter().enumerate() {
        if !seen.insert(c.name.as_str()) {
            push(
                SystemCode::DuplicateConstructor,
                Subject::Constructor { index: i, arg: None },
                format!("constructor `{}` declared twice", c.name),
            );
        }
        for (j, s) in c.arg_sorts.iter().enumerate() {
            if sys.sort(s).is_none() {
                push(
                    SystemCode::UnknownSort,
                    Subject::Constructor {
                        index: i,
                        arg: Some(j),
                    },
                    format!("unknown sort `{s}` in constructor `{}`", c.name),
                );
            }
        }
        match sys.sort(&c.result_sort) {
            None => push(
                SystemCode::UnknownSort,
                Subject::Constructor { index: i, arg: None },
                format!("unknown sort `{}` in constructor `{}`", c.result_sort, c.name),
            ),
            Some(d) if d.is_data() => push(
                SystemCode::ResultNotSignSort,
                Subject::Constructor { index: i, arg: None },
                format!("constructor `{}` must build a sign-sort, not `{}`", c.name, d.name),
            ),
            Some(_) => {}
        }
    }

    let mut seen = BTreeSet::new();
    for (i, r) in sys.relations.iter().enumerate() {
        if !seen.insert(r.name.as_str()) {
            push(
                SystemCode::DuplicateRelation,
                Subject::Relation { index: i, arg: 0 },
                format!("relation `{}` declared twice", r.name),
            );
        }
        for (j, s) in r.arg_sorts.iter().enumerate() {
            if sys.sort(s).is_none() {
                push(
                    SystemCode::UnknownSort,
                    Subject::Relation { index: i, arg: j },
                    format!("unknown sort `{s}` in relation `{}`", r.name),
                );
            }
        }
    }

    let mut seen = BTreeSet::new();
    for (i, c) in sys.constraints.iter().enumerate() {
        if !seen.insert(c.name.as_str()) {
            push(
                SystemCode::DuplicateConstraint,
                Subject::Constraint { index: i, atom: None },
                format!("axiom `{}` declared twice", c.name),
            );
        }
        let rel_name = c.body.relation();
        let Some(rel) = sys.relation(rel_name) else {
            push(
                SystemCode::UnknownRelation,
                Subject::Constraint { index: i, atom: None },
                format!("axiom `{}` refers to unknown relation `{rel_name}`", c.name),
            );
            continue;
        };
        let Some(pattern) = c.body.pattern() else {
            continue;
        };
        if pattern.len() != rel.arg_sorts.len() {
            push(
                SystemCode::PatternArity,
                Subject::Constraint { index: i, atom: None },
                format!(
                    "axiom `{}` gives {} atom(s) for `{rel_name}` of arity {}",
                    c.name,
                    pattern.len(),
                    rel.arg_sorts.len()
                ),
            );
            continue;
        }
        for (j, (atom, expected)) in pattern.iter().zip(&rel.arg_sorts).enumerate() {
            if let Atom::Term(t) = atom {
                let subject = Subject::Constraint {
                    index: i,
                    atom: Some(j),
                };
                match sys.well_sorted(t) {
                    Ok(found) if sys.leq(&found, expected) => {}
                    Ok(found) => push(
                        SystemCode::PatternSort,
                        subject,
                        format!("literal `{t}` has sort `{found}`, expected `{expected}`"),
                    ),
                    Err(e) => push(SystemCode::PatternSort, subject, format!("literal `{t}`: {e}")),
                }
            }
        }
    }

    out
}

/// One relation instance inside a configuration, naming its argument terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple {
    pub relation: String,
    pub args: Vec<String>,
}

impl Tuple {
    pub fn new(relation: impl Into<String>, args: &[&str]) -> Self {
        Self {
            relation: relation.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.relation, self.args.join(", "))
    }
}

/// A finite model over a sign system: named ground terms and relation tuples
/// between them.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    name: String,
    system: Arc<SignSystem>,
    terms: BTreeMap<String, SignTerm>,
    tuples: BTreeSet<Tuple>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("term `{0}` already defined")]
    DuplicateTerm(String),
    #[error("term `{name}`: {source}")]
    IllSortedTerm { name: String, source: SortError },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown term `{0}`")]
    UnknownTerm(String),
    #[error("`{relation}` expects {expected} argument(s), found {found}")]
    TupleArity {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("argument {position} of `{relation}` is `{term}` of sort `{found}`, not below `{expected}`")]
    TupleSort {
        relation: String,
        position: usize,
        term: String,
        expected: String,
        found: String,
    },
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::DuplicateTerm(_) => "DUPLICATE_TERM",
            ConfigError::IllSortedTerm { source, .. } => source.code(),
            ConfigError::UnknownRelation(_) => "UNKNOWN_RELATION",
            ConfigError::UnknownTerm(_) => "UNKNOWN_TERM",
            ConfigError::TupleArity { .. } => "ARITY_MISMATCH",
            ConfigError::TupleSort { .. } => "SORT_MISMATCH",
        }
    }
}

impl Configuration {
    pub fn new(name: impl Into<String>, system: Arc<SignSystem>) -> Self {
        Self {
            name: name.into(),
            system,
            terms: BTreeMap::new(),
            tuples: BTreeSet::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn system(&self) -> &Arc<SignSystem> {
        &self.system
    }
    pub fn terms(&self) -> &BTreeMap<String, SignTerm> {
        &self.terms
    }
    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Adds a well-sorted term under a fresh name.
    pub fn add_term(&mut self, name: impl Into<String>, term: SignTerm) -> Result<(), ConfigError> {
        let name = name.into();
        if self.terms.contains_key(&name) {
            return Err(ConfigError::DuplicateTerm(name));
        }
        self.system
            .well_sorted(&term)
            .map_err(|source| ConfigError::IllSortedTerm {
                name: name.clone(),
                source,
            })?;
        self.terms.insert(name, term);
        Ok(())
    }

    /// Adds a tuple after checking relation, arity and argument sorts.
    /// Returns `false` if the tuple was already present.
    pub fn add_tuple(&mut self, tuple: Tuple) -> Result<bool, ConfigError> {
        self.check_tuple(&tuple)?;
        Ok(self.tuples.insert(tuple))
    }

    pub fn with_term(mut self, name: &str, term: SignTerm) -> Result<Self, ConfigError> {
        self.add_term(name, term)?;
        Ok(self)
    }

    pub fn with_tuple(mut self, relation: &str, args: &[&str]) -> Result<Self, ConfigError> {
        self.add_tuple(Tuple::new(relation, args))?;
        Ok(self)
    }

    pub(crate) fn insert_term_unchecked(&mut self, name: String, term: SignTerm) {
        self.terms.insert(name, term);
    }

    pub(crate) fn insert_tuple_unchecked(&mut self, tuple: Tuple) -> bool {
        self.tuples.insert(tuple)
    }

    pub fn remove_tuple(&mut self, tuple: &Tuple) -> bool {
        self.tuples.remove(tuple)
    }

    pub(crate) fn retain_terms(&mut self, mut keep: impl FnMut(&str, &SignTerm) -> bool) {
        self.terms.retain(|k, v| keep(k, v));
    }

    fn check_tuple(&self, tuple: &Tuple) -> Result<(), ConfigError> {
        let rel = self
            .system
            .relation(&tuple.relation)
            .ok_or_else(|| ConfigError::UnknownRelation(tuple.relation.clone()))?;
        if rel.arg_sorts.len() != tuple.args.len() {
            return Err(ConfigError::TupleArity {
                relation: tuple.relation.clone(),
                expected: rel.arg_sorts.len(),
                found: tuple.args.len(),
            });
        }
        for (position, (arg, expected)) in tuple.args.iter().zip(&rel.arg_sorts).enumerate() {
            let found = self.term_sort(arg)?;
            if !self.system.leq(&found, expected) {
                return Err(ConfigError::TupleSort {
                    relation: tuple.relation.clone(),
                    position,
                    term: arg.clone(),
                    expected: expected.clone(),
                    found,
                });
            }
        }
        Ok(())
    }

    pub fn term_sort(&self, name: &str) -> Result<String, ConfigError> {
        let term = self
            .terms
            .get(name)
            .ok_or_else(|| ConfigError::UnknownTerm(name.to_string()))?;
        self.system
            .well_sorted(term)
            .map_err(|source| ConfigError::IllSortedTerm {
                name: name.to_string(),
                source,
            })
    }

    /// All invariant violations; empty iff the configuration is valid.
    pub fn validate(&self) -> Vec<ConfigError> {
        let mut out = Vec::new();
        for (name, term) in &self.terms {
            if let Err(source) = self.system.well_sorted(term) {
                out.push(ConfigError::IllSortedTerm {
                    name: name.clone(),
                    source,
                });
            }
        }
        for t in &self.tuples {
            if let Err(e) = self.check_tuple(t) {
                out.push(e);
            }
        }
        out
    }

    /// Boundary tag of every term whose sort is a sign-sort.
    pub fn term_boundaries(&self) -> BTreeMap<&str, Option<Boundary>> {
        self.terms
            .iter()
            .map(|(name, term)| {
                let b = self
                    .system
                    .well_sorted(term)
                    .ok()
                    .and_then(|s| self.system.boundary_of(&s));
                (name.as_str(), b)
            })
            .collect()
    }

    /// Canonical text form; equal strings iff structurally equal contents.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for (name, term) in &self.terms {
            s.push_str(&format!("{name}={term};"));
        }
        for t in &self.tuples {
            s.push_str(&format!("{t};"));
        }
        s
    }
}

/// Tuples of `relation` matching a pattern, with consistent variable binding.
pub fn matching_tuples<'c>(
    relation: &str,
    pattern: &[Atom],
    cfg: &'c Configuration,
) -> Vec<&'c Tuple> {
    cfg.tuples
        .iter()
        .filter(|t| t.relation == relation && tuple_matches(t, pattern, cfg))
        .collect()
}

pub(crate) fn tuple_matches(tuple: &Tuple, pattern: &[Atom], cfg: &Configuration) -> bool {
    if tuple.args.len() != pattern.len() {
        return false;
    }
    let mut bindings: BTreeMap<&str, &str> = BTreeMap::new();
    for (arg, atom) in tuple.args.iter().zip(pattern) {
        match atom {
            Atom::Wildcard => {}
            Atom::Var(v) => match bindings.get(v.as_str()) {
                Some(bound) if *bound != arg.as_str() => return false,
                Some(_) => {}
                None => {
                    bindings.insert(v, arg);
                }
            },
            Atom::Term(lit) => {
                if cfg.terms.get(arg) != Some(lit) {
                    return false;
                }
            }
        }
    }
    true
}

/// `true` when the configuration satisfies the constraint.
pub fn evaluate_constraint(c: &Constraint, cfg: &Configuration) -> bool {
    match &c.body {
        ConstraintBody::Forbid { relation, pattern } => {
            matching_tuples(relation, pattern, cfg).is_empty()
        }
        ConstraintBody::Require { relation, pattern } => {
            !matching_tuples(relation, pattern, cfg).is_empty()
        }
        ConstraintBody::AtMost { relation, count } => {
            cfg.tuples.iter().filter(|t| &t.relation == relation).count() <= *count
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProfileEntry {
    pub rank: u32,
    pub name: String,
    pub satisfied: bool,
}

/// Satisfaction of every constraint, ordered by rank then name.
pub fn constraint_profile(cfg: &Configuration) -> Vec<ProfileEntry> {
    let mut out: Vec<ProfileEntry> = cfg
        .system
        .constraints
        .iter()
        .map(|c| ProfileEntry {
            rank: c.rank,
            name: c.name.clone(),
            satisfied: evaluate_constraint(c, cfg),
        })
        .collect();
    out.sort();
    out
}

/// Constraints in repair order: ascending rank, ties by name.
pub(crate) fn constraints_by_rank(sys: &SignSystem) -> Vec<&Constraint> {
    let mut cs: Vec<&Constraint> = sys.constraints.iter().collect();
    cs.sort_by(|a, b| (a.rank, &a.name).cmp(&(b.rank, &b.name)));
    cs
}
