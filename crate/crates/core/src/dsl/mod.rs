//! The `.sgn` definition language: sign systems, morphisms, configurations,
//! semiosis sequences and simulation scenarios in one text format.
//!
//! ```text
//! system Lamp {
//!   data Real;
//!   sort Body;
//!   sort Room [env];
//!   ctor body() -> Body @level 0;
//!   ctor room(Real) -> Room @level 0;
//!   rel lights(Body, Room);
//!   axiom lit : rank 0 : require lights(*, *);
//! }
//! config lamp of Lamp { b = body(); r = room(3.5); lights(b, r); }
//! ```

mod elaborate;
mod lexer;
mod parser;
mod serialize;

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::morphism::SemioticMorphism;
use crate::semiosis::SemiosisSequence;
use crate::sign_algebra::{Configuration, SignSystem};
use crate::sim::scenario::Scenario;

pub use serialize::serialize;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub line: u32,
    pub column: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

impl Diagnostic {
    pub(crate) fn error(code: &str, message: impl Into<String>, pos: Pos) -> Self {
        Self {
            severity: Severity::Error,
            code: code.to_string(),
            message: message.into(),
            line: pos.line,
            column: pos.column,
            file: None,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}: {sev}[{}]: {}",
            self.line, self.column, self.code, self.message
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    System(Arc<SignSystem>),
    Morphism(Arc<SemioticMorphism>),
    Config(Arc<Configuration>),
    Sequence(Arc<SemiosisSequence>),
    Scenario(Arc<Scenario>),
}

impl Block {
    pub fn name(&self) -> &str {
        match self {
            Block::System(s) => s.name(),
            Block::Morphism(m) => m.name(),
            Block::Config(c) => c.name(),
            Block::Sequence(s) => s.name(),
            Block::Scenario(s) => &s.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Block::System(_) => "system",
            Block::Morphism(_) => "morphism",
            Block::Config(_) => "config",
            Block::Sequence(_) => "sequence",
            Block::Scenario(_) => "scenario",
        }
    }
}

/// Lookup helpers over a parsed block list.
pub trait BlockList {
    fn system(&self, name: &str) -> Option<&Arc<SignSystem>>;
    fn morphism(&self, name: &str) -> Option<&Arc<SemioticMorphism>>;
    fn config(&self, name: &str) -> Option<&Arc<Configuration>>;
    fn sequence(&self, name: &str) -> Option<&Arc<SemiosisSequence>>;
    fn sequences(&self) -> Vec<&Arc<SemiosisSequence>>;
    fn scenario(&self, name: &str) -> Option<&Arc<Scenario>>;
    fn scenarios(&self) -> Vec<&Arc<Scenario>>;
}

impl BlockList for [Block] {
    fn system(&self, name: &str) -> Option<&Arc<SignSystem>> {
        self.iter().find_map(|b| match b {
            Block::System(s) if s.name() == name => Some(s),
            _ => None,
        })
    }
    fn morphism(&self, name: &str) -> Option<&Arc<SemioticMorphism>> {
        self.iter().find_map(|b| match b {
            Block::Morphism(m) if m.name() == name => Some(m),
            _ => None,
        })
    }
    fn config(&self, name: &str) -> Option<&Arc<Configuration>> {
        self.iter().find_map(|b| match b {
            Block::Config(c) if c.name() == name => Some(c),
            _ => None,
        })
    }
    fn sequence(&self, name: &str) -> Option<&Arc<SemiosisSequence>> {
        self.sequences().into_iter().find(|s| s.name() == name)
    }
    fn sequences(&self) -> Vec<&Arc<SemiosisSequence>> {
        self.iter()
            .filter_map(|b| match b {
                Block::Sequence(s) => Some(s),
                _ => None,
            })
            .collect()
    }
    fn scenario(&self, name: &str) -> Option<&Arc<Scenario>> {
        self.scenarios().into_iter().find(|s| s.name == name)
    }
    fn scenarios(&self) -> Vec<&Arc<Scenario>> {
        self.iter()
            .filter_map(|b| match b {
                Block::Scenario(s) => Some(s),
                _ => None,
            })
            .collect()
    }
}

fn parse_unit(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<parser::Item> {
    let toks = lexer::lex(text, diags);
    parser::parse_items(toks, diags)
}

/// Parses and elaborates one text. Never panics; every problem becomes a
/// diagnostic. Blocks with errors are left out, other blocks are kept.
/// `import` needs a file system and is reported here; use [`load_file`].
pub fn parse(text: &str) -> (Vec<Block>, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let items = parse_unit(text, &mut diags);
    for item in &items {
        if let parser::Item::Import(path, pos) = item {
            diags.push(Diagnostic::error(
                "IMPORT_UNAVAILABLE",
                format!("cannot import `{path}` from in-memory text"),
                *pos,
            ));
        }
    }
    let units = [elaborate::Unit { items, file: None }];
    let blocks = elaborate::elaborate(&units, &mut diags);
    (blocks, diags)
}

struct Loader {
    stack: Vec<PathBuf>,
    done: BTreeSet<PathBuf>,
    units: Vec<elaborate::Unit>,
    diags: Vec<Diagnostic>,
}

impl Loader {
    fn visit(&mut self, path: &Path, display: String, from: Option<(String, Pos)>) {
        let located = |code: &str, msg: String, from: &Option<(String, Pos)>, display: &str| {
            let (file, pos) = match from {
                Some((f, p)) => (f.clone(), *p),
                None => (display.to_string(), Pos { line: 1, column: 1 }),
            };
            let mut d = Diagnostic::error(code, msg, pos);
            d.file = Some(file);
            d
        };
        let key = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
        if self.stack.contains(&key) {
            let d = located("IMPORT_CYCLE", format!("`{display}` imports itself"), &from, &display);
            self.diags.push(d);
            return;
        }
        if self.done.contains(&key) {
            return;
        }
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                let d = located("IO_ERROR", format!("cannot read `{display}`: {e}"), &from, &display);
                self.diags.push(d);
                return;
            }
        };
        let mut local = Vec::new();
        let items = parse_unit(&text, &mut local);
        for mut d in local {
            d.file = Some(display.clone());
            self.diags.push(d);
        }
        self.stack.push(key.clone());
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for item in &items {
            if let parser::Item::Import(rel, pos) = item {
                let next = dir.join(rel);
                let shown = next.display().to_string();
                self.visit(&next, shown, Some((display.clone(), *pos)));
            }
        }
        self.stack.pop();
        self.done.insert(key);
        self.units.push(elaborate::Unit {
            items,
            file: Some(display),
        });
    }
}

/// Reads a file and everything it imports (paths relative to the importing
/// file). Imported blocks come first in the result.
pub fn load_file(path: impl AsRef<Path>) -> (Vec<Block>, Vec<Diagnostic>) {
    let path = path.as_ref();
    let mut loader = Loader {
        stack: vec![],
        done: BTreeSet::new(),
        units: vec![],
        diags: vec![],
    };
    loader.visit(path, path.display().to_string(), None);
    let mut diags = loader.diags;
    let blocks = elaborate::elaborate(&loader.units, &mut diags);
    (blocks, diags)
}
