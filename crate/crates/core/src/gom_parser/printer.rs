use std::fmt;

use crate::signature_model::{OperatorKind, SignatureModule};

/// Prints a module back as `.gom` text. Hooks follow the productions.
impl fmt::Display for SignatureModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "module {}", self.name)?;
        if !self.imports.is_empty() {
            writeln!(f, "  imports {}", self.imports.join(" "))?;
        }
        let sorts: Vec<_> = self.sorts.iter().map(|s| s.name.as_str()).collect();
        writeln!(f, "  sorts {}", sorts.join(" "))?;
        writeln!(f, "  abstract syntax")?;
        for op in &self.operators {
            write!(f, "    {}", op.name)?;
            match &op.kind {
                OperatorKind::Fixed { slots } if slots.is_empty() => {}
                OperatorKind::Fixed { slots } => {
                    let fields: Vec<_> = slots.iter().map(|s| format!("{}:{}", s.name, s.sort)).collect();
                    write!(f, "({})", fields.join(","))?;
                }
                OperatorKind::Variadic { element } => write!(f, "({element}*)")?,
            }
            writeln!(f, " -> {}", op.result)?;
        }
        for hook in &self.hooks {
            writeln!(f, "    {}:{}({}) {{", hook.operator, hook.kind, hook.params.join(","))?;
            for clause in &hook.body {
                let pats: Vec<_> = clause.patterns.iter().map(|p| p.to_string()).collect();
                write!(f, "      {}", pats.join(", "))?;
                if let Some(g) = &clause.guard {
                    write!(f, " where {g}")?;
                }
                writeln!(f, " -> {};", clause.action)?;
            }
            writeln!(f, "    }}")?;
        }
        Ok(())
    }
}
