use super::lexer::{is_keyword, Tok, Token};
use super::{Diagnostic, Pos};
use crate::sign_algebra::Boundary;

/// Nesting limit for terms, so hostile input cannot exhaust the stack.
pub(crate) const MAX_TERM_DEPTH: usize = 128;

#[derive(Clone, Debug)]
pub(crate) struct Ident {
    pub name: String,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub(crate) enum TermKind {
    App { ctor: Ident, args: Vec<RawTerm> },
    Ref(String),
    Int(i64),
    Real(f64),
    Str(String),
}

#[derive(Clone, Debug)]
pub(crate) struct RawTerm {
    pub kind: TermKind,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub(crate) enum AtomKind {
    Wildcard,
    Name(String),
    Term(RawTerm),
}

#[derive(Clone, Debug)]
pub(crate) struct RawAtom {
    pub kind: AtomKind,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BodyKind {
    Forbid,
    Require,
    AtMost,
}

#[derive(Clone, Debug)]
pub(crate) enum RawDecl {
    Data(Ident),
    Sort {
        name: Ident,
        boundary: Boundary,
        parents: Vec<Ident>,
    },
    Ctor {
        name: Ident,
        args: Vec<Ident>,
        result: Ident,
        level: i64,
        prio: i64,
    },
    Rel {
        name: Ident,
        args: Vec<Ident>,
    },
    Axiom {
        name: Ident,
        rank: u32,
        kind: BodyKind,
        relation: Ident,
        atoms: Vec<RawAtom>,
        count: usize,
    },
}

#[derive(Clone, Debug)]
pub(crate) struct RawSystem {
    pub name: Ident,
    pub decls: Vec<RawDecl>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum MapKind {
    Sort,
    Ctor,
    Rel,
}

#[derive(Clone, Debug)]
pub(crate) struct RawMorphism {
    pub name: Ident,
    pub source: Ident,
    pub target: Ident,
    pub maps: Vec<(MapKind, Ident, Ident)>,
}

#[derive(Clone, Debug)]
pub(crate) enum ConfigEntry {
    Term(Ident, RawTerm),
    Tuple(Ident, Vec<Ident>),
}

#[derive(Clone, Debug)]
pub(crate) struct RawConfig {
    pub name: Ident,
    pub system: Ident,
    pub entries: Vec<ConfigEntry>,
}

#[derive(Clone, Debug)]
pub(crate) enum RawStep {
    Vary { depth: u32, budget: u32 },
    Select { min: bool },
    Apply(Ident),
}

#[derive(Clone, Debug)]
pub(crate) struct RawBranch {
    pub morphism: Ident,
    pub p: f64,
    pub target: Ident,
}

#[derive(Clone, Debug)]
pub(crate) struct RawComponent {
    pub pos: Pos,
    pub t1: i64,
    pub t2: i64,
    pub from: Ident,
    pub steps: Vec<RawStep>,
    pub branches: Vec<RawBranch>,
}

#[derive(Clone, Debug)]
pub(crate) struct RawSequence {
    pub name: Ident,
    pub components: Vec<RawComponent>,
}

#[derive(Clone, Debug)]
pub(crate) enum RawExpect {
    Functional { param: Ident, low: f64, high: f64 },
    Env { kind: Ident, low: f64, high: f64 },
}

#[derive(Clone, Debug)]
pub(crate) enum ScenarioEntry {
    Env {
        id: Ident,
        features: Vec<f64>,
        rates: Vec<(Ident, f64)>,
    },
    Product {
        id: Ident,
        config: Ident,
        env: Ident,
        manufacturer: Ident,
        params: Vec<(Ident, f64)>,
    },
    Agent {
        product: Ident,
        at: Option<u64>,
        weber: f64,
        window: Option<usize>,
        expects: Vec<RawExpect>,
    },
    Adapt(bool),
    Tau(f64),
}

#[derive(Clone, Debug)]
pub(crate) struct RawScenario {
    pub name: Ident,
    pub entries: Vec<ScenarioEntry>,
}

#[derive(Clone, Debug)]
pub(crate) enum Item {
    Import(String, Pos),
    System(RawSystem),
    Morphism(RawMorphism),
    Config(RawConfig),
    Sequence(RawSequence),
    Scenario(RawScenario),
}

const TOP_LEVEL: &[&str] = &["import", "system", "morphism", "config", "sequence", "scenario"];

struct Parser<'d> {
    toks: Vec<Token>,
    i: usize,
    diags: &'d mut Vec<Diagnostic>,
}

/// Marker for a syntax error that has already been reported.
struct Bail;

type PResult<T> = Result<T, Bail>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn fail<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().describe();
        self.diags.push(Diagnostic::error(
            "UNEXPECTED_TOKEN",
            format!("expected {expected}, found {found}"),
            self.pos(),
        ));
        Err(Bail)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.fail(&format!("`{kw}`"))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.fail(&t.describe())
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) if is_keyword(&name) => {
                self.diags.push(Diagnostic::error(
                    "RESERVED_WORD",
                    format!("`{name}` is a keyword and cannot be used as a name"),
                    self.pos(),
                ));
                Err(Bail)
            }
            Tok::Ident(name) => {
                let pos = self.advance().pos;
                Ok(Ident { name, pos })
            }
            _ => self.fail("a name"),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match *self.peek() {
            Tok::Int(i) => {
                self.advance();
                Ok(i)
            }
            _ => self.fail("an integer"),
        }
    }

    fn nat<T: TryFrom<i64>>(&mut self) -> PResult<T> {
        let pos = self.pos();
        let i = self.int()?;
        T::try_from(i).map_err(|_| {
            self.diags.push(Diagnostic::error(
                "INVALID_NUMBER",
                format!("{i} is out of range here"),
                pos,
            ));
            Bail
        })
    }

    fn number(&mut self) -> PResult<f64> {
        match *self.peek() {
            Tok::Int(i) => {
                self.advance();
                Ok(i as f64)
            }
            Tok::Real(r) => {
                self.advance();
                Ok(r)
            }
            _ => self.fail("a number"),
        }
    }

    /// `( x, y, ... )` with a possibly empty list.
    fn paren_list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn recover(&mut self) {
        let start = self.i;
        loop {
            let t = &self.toks[self.i];
            if t.tok == Tok::Eof {
                return;
            }
            let top = matches!(&t.tok, Tok::Ident(s) if TOP_LEVEL.contains(&s.as_str()));
            if top && t.depth == 0 && self.i > start {
                return;
            }
            self.advance();
        }
    }

    fn file(&mut self) -> Vec<Item> {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            let r = match self.peek() {
                Tok::Ident(s) if s == "import" => self.import(),
                Tok::Ident(s) if s == "system" => self.system().map(Item::System),
                Tok::Ident(s) if s == "morphism" => self.morphism().map(Item::Morphism),
                Tok::Ident(s) if s == "config" => self.config().map(Item::Config),
                Tok::Ident(s) if s == "sequence" => self.sequence().map(Item::Sequence),
                Tok::Ident(s) if s == "scenario" => self.scenario().map(Item::Scenario),
                _ => self.fail("`import`, `system`, `morphism`, `config`, `sequence` or `scenario`"),
            };
            match r {
                Ok(item) => items.push(item),
                Err(Bail) => self.recover(),
            }
        }
        items
    }

    fn import(&mut self) -> PResult<Item> {
        self.kw("import")?;
        let pos = self.pos();
        let path = match self.peek().clone() {
            Tok::Str(s) => {
                self.advance();
                s
            }
            _ => return self.fail("a quoted path"),
        };
        self.expect(Tok::Semi)?;
        Ok(Item::Import(path, pos))
    }

    fn system(&mut self) -> PResult<RawSystem> {
        self.kw("system")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut decls = Vec::new();
        while !self.eat(&Tok::RBrace) {
            decls.push(self.decl()?);
        }
        Ok(RawSystem { name, decls })
    }

    fn decl(&mut self) -> PResult<RawDecl> {
        let d = if self.eat_kw("data") {
            RawDecl::Data(self.ident()?)
        } else if self.eat_kw("sort") {
            let name = self.ident()?;
            let mut boundary = Boundary::Product;
            if self.eat(&Tok::LBrack) {
                if self.eat_kw("env") {
                    boundary = Boundary::Environment;
                } else if !self.eat_kw("product") {
                    return self.fail("`product` or `env`");
                }
                self.expect(Tok::RBrack)?;
            }
            let mut parents = Vec::new();
            while self.eat(&Tok::Lt) {
                parents.push(self.ident()?);
            }
            RawDecl::Sort {
                name,
                boundary,
                parents,
            }
        } else if self.eat_kw("ctor") {
            let name = self.ident()?;
            let args = self.paren_list(|p| p.ident())?;
            self.expect(Tok::Arrow)?;
            let result = self.ident()?;
            if !matches!(self.peek(), Tok::At(s) if s == "level") {
                return self.fail("`@level`");
            }
            self.advance();
            let level = self.int()?;
            let mut prio = 0;
            if matches!(self.peek(), Tok::At(s) if s == "prio") {
                self.advance();
                prio = self.int()?;
            }
            RawDecl::Ctor {
                name,
                args,
                result,
                level,
                prio,
            }
        } else if self.eat_kw("rel") {
            let name = self.ident()?;
            let args = self.paren_list(|p| p.ident())?;
            RawDecl::Rel { name, args }
        } else if self.eat_kw("axiom") {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            self.kw("rank")?;
            let rank = self.nat::<u32>()?;
            self.expect(Tok::Colon)?;
            let (kind, relation, atoms, count) = if self.eat_kw("atmost") {
                let rel = self.ident()?;
                let count = self.nat::<usize>()?;
                (BodyKind::AtMost, rel, vec![], count)
            } else {
                let kind = if self.eat_kw("forbid") {
                    BodyKind::Forbid
                } else if self.eat_kw("require") {
                    BodyKind::Require
                } else {
                    return self.fail("`forbid`, `require` or `atmost`");
                };
                let rel = self.ident()?;
                let atoms = self.paren_list(|p| p.atom())?;
                (kind, rel, atoms, 0)
            };
            RawDecl::Axiom {
                name,
                rank,
                kind,
                relation,
                atoms,
                count,
            }
        } else {
            return self.fail("`data`, `sort`, `ctor`, `rel`, `axiom` or `}`");
        };
        self.expect(Tok::Semi)?;
        Ok(d)
    }

    fn atom(&mut self) -> PResult<RawAtom> {
        let pos = self.pos();
        if self.eat(&Tok::Star) {
            return Ok(RawAtom {
                kind: AtomKind::Wildcard,
                pos,
            });
        }
        let term = self.term(0)?;
        let kind = match term.kind {
            TermKind::Ref(name) => AtomKind::Name(name),
            _ => AtomKind::Term(term),
        };
        Ok(RawAtom { kind, pos })
    }

    fn term(&mut self, depth: usize) -> PResult<RawTerm> {
        let pos = self.pos();
        if depth > MAX_TERM_DEPTH {
            self.diags.push(Diagnostic::error(
                "TERM_TOO_DEEP",
                format!("terms may nest at most {MAX_TERM_DEPTH} levels"),
                pos,
            ));
            return Err(Bail);
        }
        let kind = match self.peek().clone() {
            Tok::Int(i) => {
                self.advance();
                TermKind::Int(i)
            }
            Tok::Real(r) => {
                self.advance();
                TermKind::Real(r)
            }
            Tok::Str(s) => {
                self.advance();
                TermKind::Str(s)
            }
            Tok::Ident(_) => {
                let id = self.ident()?;
                if *self.peek() == Tok::LParen {
                    let args = self.paren_list(|p| p.term(depth + 1))?;
                    TermKind::App { ctor: id, args }
                } else {
                    TermKind::Ref(id.name)
                }
            }
            _ => return self.fail("a term"),
        };
        Ok(RawTerm { kind, pos })
    }

    fn morphism(&mut self) -> PResult<RawMorphism> {
        self.kw("morphism")?;
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let source = self.ident()?;
        self.expect(Tok::Arrow)?;
        let target = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut maps = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let kind = if self.eat_kw("sort") {
                MapKind::Sort
            } else if self.eat_kw("ctor") {
                MapKind::Ctor
            } else if self.eat_kw("rel") {
                MapKind::Rel
            } else {
                return self.fail("`sort`, `ctor`, `rel` or `}`");
            };
            let from = self.ident()?;
            self.expect(Tok::Arrow)?;
            let to = self.ident()?;
            self.expect(Tok::Semi)?;
            maps.push((kind, from, to));
        }
        Ok(RawMorphism {
            name,
            source,
            target,
            maps,
        })
    }

    fn config(&mut self) -> PResult<RawConfig> {
        self.kw("config")?;
        let name = self.ident()?;
        self.kw("of")?;
        let system = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let id = self.ident()?;
            if self.eat(&Tok::Eq) {
                let t = self.term(0)?;
                entries.push(ConfigEntry::Term(id, t));
            } else if *self.peek() == Tok::LParen {
                let args = self.paren_list(|p| p.ident())?;
                entries.push(ConfigEntry::Tuple(id, args));
            } else {
                return self.fail("`=` or `(`");
            }
            self.expect(Tok::Semi)?;
        }
        Ok(RawConfig {
            name,
            system,
            entries,
        })
    }

    fn sequence(&mut self) -> PResult<RawSequence> {
        self.kw("sequence")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut components = Vec::new();
        while !self.eat(&Tok::RBrace) {
            components.push(self.component()?);
        }
        Ok(RawSequence { name, components })
    }

    fn component(&mut self) -> PResult<RawComponent> {
        let pos = self.pos();
        self.kw("component")?;
        self.kw("t")?;
        let t1 = self.int()?;
        self.expect(Tok::DotDot)?;
        let t2 = self.int()?;
        self.expect(Tok::LBrace)?;
        self.kw("from")?;
        let from = self.ident()?;
        self.expect(Tok::Semi)?;
        let mut steps = Vec::new();
        loop {
            if self.eat_kw("vary") {
                self.kw("depth")?;
                let depth = self.nat::<u32>()?;
                self.kw("budget")?;
                let budget = self.nat::<u32>()?;
                steps.push(RawStep::Vary { depth, budget });
            } else if self.eat_kw("select") {
                let min = self.eat_kw("min");
                steps.push(RawStep::Select { min });
            } else if self.eat_kw("apply") {
                steps.push(RawStep::Apply(self.ident()?));
            } else {
                break;
            }
            self.expect(Tok::Semi)?;
        }
        let mut branches = Vec::new();
        while self.eat_kw("branch") {
            let morphism = self.ident()?;
            self.kw("p")?;
            let p = self.number()?;
            self.expect(Tok::Arrow)?;
            let target = self.ident()?;
            self.expect(Tok::Semi)?;
            branches.push(RawBranch { morphism, p, target });
        }
        if branches.is_empty() {
            return self.fail("`branch`");
        }
        self.expect(Tok::RBrace)?;
        Ok(RawComponent {
            pos,
            t1,
            t2,
            from,
            steps,
            branches,
        })
    }

    fn band(&mut self) -> PResult<(f64, f64)> {
        self.expect(Tok::LBrack)?;
        let lo = self.number()?;
        self.expect(Tok::Comma)?;
        let hi = self.number()?;
        self.expect(Tok::RBrack)?;
        Ok((lo, hi))
    }

    fn scenario(&mut self) -> PResult<RawScenario> {
        self.kw("scenario")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let e = if self.eat_kw("env") {
                let id = self.ident()?;
                self.kw("features")?;
                self.expect(Tok::LBrack)?;
                let mut features = Vec::new();
                if !self.eat(&Tok::RBrack) {
                    loop {
                        features.push(self.number()?);
                        if self.eat(&Tok::RBrack) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                let mut rates = Vec::new();
                while self.eat_kw("rate") {
                    let kind = self.ident()?;
                    let r = self.number()?;
                    rates.push((kind, r));
                }
                ScenarioEntry::Env { id, features, rates }
            } else if self.eat_kw("product") {
                let id = self.ident()?;
                self.kw("of")?;
                let config = self.ident()?;
                self.kw("in")?;
                let env = self.ident()?;
                self.kw("manufacturer")?;
                let manufacturer = self.ident()?;
                let mut params = Vec::new();
                if self.eat_kw("params") {
                    params = self.paren_list(|p| {
                        let n = p.ident()?;
                        p.expect(Tok::Eq)?;
                        Ok((n, p.number()?))
                    })?;
                }
                ScenarioEntry::Product {
                    id,
                    config,
                    env,
                    manufacturer,
                    params,
                }
            } else if self.eat_kw("agent") {
                self.kw("for")?;
                let product = self.ident()?;
                let at = if self.eat_kw("at") {
                    Some(self.nat::<u64>()?)
                } else {
                    None
                };
                self.kw("weber")?;
                let weber = self.number()?;
                let window = if self.eat_kw("window") {
                    Some(self.nat::<usize>()?)
                } else {
                    None
                };
                let mut expects = Vec::new();
                while self.eat_kw("expect") {
                    if self.eat_kw("functional") {
                        let param = self.ident()?;
                        let (low, high) = self.band()?;
                        expects.push(RawExpect::Functional { param, low, high });
                    } else if self.eat_kw("env") {
                        let kind = self.ident()?;
                        let (low, high) = self.band()?;
                        expects.push(RawExpect::Env { kind, low, high });
                    } else {
                        return self.fail("`functional` or `env`");
                    }
                }
                ScenarioEntry::Agent {
                    product,
                    at,
                    weber,
                    window,
                    expects,
                }
            } else if self.eat_kw("adapt") {
                if self.eat_kw("on") {
                    ScenarioEntry::Adapt(true)
                } else if self.eat_kw("off") {
                    ScenarioEntry::Adapt(false)
                } else {
                    return self.fail("`on` or `off`");
                }
            } else if self.eat_kw("cluster") {
                self.kw("tau")?;
                ScenarioEntry::Tau(self.number()?)
            } else {
                return self.fail("`env`, `product`, `agent`, `adapt`, `cluster` or `}`");
            };
            self.expect(Tok::Semi)?;
            entries.push(e);
        }
        Ok(RawScenario { name, entries })
    }
}

pub(crate) fn parse_items(toks: Vec<Token>, diags: &mut Vec<Diagnostic>) -> Vec<Item> {
    let mut p = Parser { toks, i: 0, diags };
    p.file()
}
