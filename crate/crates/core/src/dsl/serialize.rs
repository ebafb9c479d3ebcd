use std::fmt::Write;

use super::Block;
use crate::morphism::SemioticMorphism;
use crate::semiosis::{SemiosisSequence, SemioticStep};
use crate::sign_algebra::{Configuration, SignSystem, SortKind};
use crate::sim::scenario::{Expectation, Scenario};

fn system(out: &mut String, s: &SignSystem) {
    let _ = writeln!(out, "system {} {{", s.name());
    for decl in s.sorts() {
        match decl.kind {
            SortKind::Data => {
                let _ = writeln!(out, "  data {};", decl.name);
            }
            SortKind::Sign(b) => {
                let _ = write!(out, "  sort {}", decl.name);
                if b == crate::sign_algebra::Boundary::Environment {
                    out.push_str(" [env]");
                }
                for (sub, sup) in s.subsort_edges() {
                    if *sub == decl.name {
                        let _ = write!(out, " < {sup}");
                    }
                }
                out.push_str(";\n");
            }
        }
    }
    for c in s.constructors() {
        let _ = write!(
            out,
            "  ctor {}({}) -> {} @level {}",
            c.name,
            c.arg_sorts.join(", "),
            c.result_sort,
            c.level
        );
        if c.priority != 0 {
            let _ = write!(out, " @prio {}", c.priority);
        }
        out.push_str(";\n");
    }
    for r in s.relations() {
        let _ = writeln!(out, "  rel {}({});", r.name, r.arg_sorts.join(", "));
    }
    for a in s.constraints() {
        let _ = writeln!(out, "  axiom {} : rank {} : {};", a.name, a.rank, a.body);
    }
    out.push_str("}\n");
}

fn morphism(out: &mut String, m: &SemioticMorphism) {
    let _ = writeln!(
        out,
        "morphism {} : {} -> {} {{",
        m.name(),
        m.source().name(),
        m.target().name()
    );
    for (kw, map) in [("sort", m.sort_map()), ("ctor", m.ctor_map()), ("rel", m.rel_map())] {
        for (a, b) in map {
            let _ = writeln!(out, "  {kw} {a} -> {b};");
        }
    }
    out.push_str("}\n");
}

fn config(out: &mut String, c: &Configuration) {
    let _ = writeln!(out, "config {} of {} {{", c.name(), c.system().name());
    for (name, t) in c.terms() {
        let _ = writeln!(out, "  {name} = {t};");
    }
    for t in c.tuples() {
        let _ = writeln!(out, "  {t};");
    }
    out.push_str("}\n");
}

fn sequence(out: &mut String, s: &SemiosisSequence) {
    let _ = writeln!(out, "sequence {} {{", s.name());
    for c in s.components() {
        let _ = writeln!(out, "  component t {}..{} {{", c.t1(), c.t2());
        let _ = writeln!(out, "    from {};", c.source().name());
        for step in c.steps() {
            let _ = match step {
                SemioticStep::Variation {
                    depth_bound,
                    relation_budget,
                } => writeln!(out, "    vary depth {depth_bound} budget {relation_budget};"),
                SemioticStep::Selection { minimality: true } => writeln!(out, "    select min;"),
                SemioticStep::Selection { minimality: false } => writeln!(out, "    select;"),
                SemioticStep::Morphism(m) => writeln!(out, "    apply {};", m.name()),
            };
        }
        for b in c.branches() {
            let _ = writeln!(
                out,
                "    branch {} p {:?} -> {};",
                b.morphism.name(),
                b.probability,
                b.target_system().name()
            );
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
}

fn band(out: &mut String, lo: f64, hi: f64) {
    let _ = write!(out, "[{lo:?}, {hi:?}]");
}

fn scenario(out: &mut String, s: &Scenario) {
    let _ = writeln!(out, "scenario {} {{", s.name);
    for e in &s.environments {
        let feats: Vec<String> = e.features.iter().map(|x| format!("{x:?}")).collect();
        let _ = write!(out, "  env {} features [{}]", e.id, feats.join(", "));
        for (k, r) in &e.base_rates {
            let _ = write!(out, " rate {k} {r:?}");
        }
        out.push_str(";\n");
    }
    for p in &s.products {
        let _ = write!(
            out,
            "  product {} of {} in {} manufacturer {}",
            p.id,
            p.config.name(),
            p.environment,
            p.manufacturer
        );
        if !p.params.is_empty() {
            let ps: Vec<String> = p.params.iter().map(|(k, v)| format!("{k} = {v:?}")).collect();
            let _ = write!(out, " params ({})", ps.join(", "));
        }
        out.push_str(";\n");
    }
    for a in &s.agents {
        let _ = write!(out, "  agent for {}", a.product);
        if let Some(t) = a.from_tick {
            let _ = write!(out, " at {t}");
        }
        let _ = write!(out, " weber {:?} window {}", a.weber_k, a.window);
        for e in &a.expectations {
            match e {
                Expectation::Functional { param, low, high } => {
                    let _ = write!(out, " expect functional {param} ");
                    band(out, *low, *high);
                }
                Expectation::Environmental { kind, low, high } => {
                    let _ = write!(out, " expect env {kind} ");
                    band(out, *low, *high);
                }
            }
        }
        out.push_str(";\n");
    }
    let _ = writeln!(out, "  adapt {};", if s.adapt { "on" } else { "off" });
    let _ = writeln!(out, "  cluster tau {:?};", s.tau);
    out.push_str("}\n");
}

/// Renders blocks in the definition language. Blocks are separated by a blank
/// line; referenced blocks must be included for the text to parse back.
pub fn serialize(blocks: &[Block]) -> String {
    let mut out = String::new();
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match b {
            Block::System(s) => system(&mut out, s),
            Block::Morphism(m) => morphism(&mut out, m),
            Block::Config(c) => config(&mut out, c),
            Block::Sequence(s) => sequence(&mut out, s),
            Block::Scenario(s) => scenario(&mut out, s),
        }
    }
    out
}
