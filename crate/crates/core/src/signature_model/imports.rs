use super::SignatureModule;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImportError {
    #[error("unknown imported module {0}")]
    UnknownImport(String),
    #[error("import cycle: {}", .0.join(" -> "))]
    ImportCycle(Vec<String>),
    #[error("operator {operator} is declared in several modules: {}", .modules.join(", "))]
    NameClash {
        operator: String,
        modules: Vec<String>,
    },
}

/// Flattens the transitive imports of `module` into its own tables.
///
/// Imported declarations come first, in dependency order. A module reached
/// along several import paths contributes once. `module` itself is left
/// untouched.
pub fn resolve_imports(
    module: &SignatureModule,
    available: &[SignatureModule],
) -> Result<SignatureModule, ImportError> {
    let mut order: Vec<&SignatureModule> = Vec::new();
    let mut stack: Vec<String> = vec![module.name.clone()];
    for name in &module.imports {
        visit(name, available, &mut stack, &mut order)?;
    }

    let mut resolved = module.clone();
    resolved.sorts.clear();
    resolved.operators.clear();
    resolved.hooks.clear();
    for m in order.iter().copied().chain(std::iter::once(module)) {
        for sort in &m.sorts {
            if !resolved.has_sort(&sort.name) {
                resolved.sorts.push(sort.clone());
            }
        }
        for op in &m.operators {
            match resolved.operators.iter().find(|o| o.name == op.name) {
                Some(existing) if existing == op => continue,
                Some(existing) => {
                    return Err(ImportError::NameClash {
                        operator: op.name.clone(),
                        modules: vec![existing.module.clone(), op.module.clone()],
                    })
                }
                None => resolved.operators.push(op.clone()),
            }
        }
        for hook in &m.hooks {
            if !resolved.hooks.contains(hook) {
                resolved.hooks.push(hook.clone());
            }
        }
    }
    Ok(resolved)
}

fn visit<'a>(
    name: &str,
    available: &'a [SignatureModule],
    stack: &mut Vec<String>,
    order: &mut Vec<&'a SignatureModule>,
) -> Result<(), ImportError> {
    if let Some(start) = stack.iter().position(|n| n == name) {
        return Err(ImportError::ImportCycle(stack[start..].to_vec()));
    }
    if order.iter().any(|m| m.name == name) {
        return Ok(());
    }
    let module = available
        .iter()
        .find(|m| m.name == name)
        .ok_or_else(|| ImportError::UnknownImport(name.to_string()))?;
    stack.push(name.to_string());
    for dep in &module.imports {
        visit(dep, available, stack, order)?;
    }
    stack.pop();
    order.push(module);
    Ok(())
}
