use std::fmt::Write;

use super::{ModelDocument, NormalityDecl};

/// Canonical text for a document. Notes become `#` comment lines after the
/// header; everything else reads back to an equal document.
pub fn print_model(doc: &ModelDocument) -> String {
    let m = &doc.model;
    let mut out = String::new();
    writeln!(out, "model {}", m.name()).unwrap();
    for note in m.notes() {
        for line in note.lines() {
            writeln!(out, "# {line}").unwrap();
        }
    }
    if !m.exogenous().is_empty() {
        out.push('\n');
        for d in m.exogenous() {
            writeln!(out, "exogenous {}: {}", d.name, d.range).unwrap();
        }
    }
    out.push('\n');
    for ((name, expr), d) in m.equations().zip(m.endogenous()) {
        writeln!(out, "endogenous {name}: {} = {expr}", d.range).unwrap();
    }
    if !doc.contexts.is_empty() {
        out.push('\n');
        for (name, ctx) in &doc.contexts {
            let body = m
                .exogenous()
                .iter()
                .zip(ctx.values())
                .map(|(d, v)| format!("{} = {v}", d.name))
                .collect::<Vec<_>>()
                .join(", ");
            if body.is_empty() {
                writeln!(out, "context {name} {{}}").unwrap();
            } else {
                writeln!(out, "context {name} {{ {body} }}").unwrap();
            }
        }
    }
    match &doc.normality {
        None => {}
        Some(NormalityDecl::RespectEquations { context, vars }) => {
            let vars = vars
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            writeln!(out, "\nnormality respect_equations({context}) {{ {vars} }}").unwrap();
        }
        Some(NormalityDecl::Ranks { rules, default }) => {
            out.push_str("\nnormality ranks { ");
            for (cond, rank) in rules {
                write!(out, "{cond} -> {rank}; ").unwrap();
            }
            writeln!(out, "default -> {default} }}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_model;
    use super::*;

    #[test]
    fn printing_is_a_fixed_point() {
        let src = "model scan
# a note
exogenous U: {0,1}
endogenous B: {0,1} = U
endogenous C: {-1,0,1} = case { B = 1 -> 1; default -> -1 }
context u { U = 1 }

normality ranks { B = 0 & C != 1 -> 2; default -> 0 }
";
        let doc = parse_model(src).unwrap();
        let text = print_model(&doc);
        let again = parse_model(&text).unwrap();
        assert_eq!(again, doc);
        assert_eq!(print_model(&again), text);
    }
}
