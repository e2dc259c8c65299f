//! The signature modules shipped with the crate.

use crate::gom_parser::{parse_module, SyntaxError};
use crate::hook_engine::{Factory, FactoryError};
use crate::signature_model::{resolve_imports, ImportError, SignatureModule};

pub const BOOLEAN: &str = include_str!("../corpus/boolean.gom");
pub const STRUCT: &str = include_str!("../corpus/struct.gom");
pub const NAT: &str = include_str!("../corpus/nat.gom");

/// Builtin module names, as accepted on the command line.
pub const NAMES: [&str; 3] = ["boolean", "struct", "nat"];

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("no builtin module named {0}")]
    Unknown(String),
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Import(#[from] ImportError),
    #[error(transparent)]
    Factory(#[from] FactoryError),
}

pub fn text(name: &str) -> Option<&'static str> {
    match name {
        "boolean" => Some(BOOLEAN),
        "struct" => Some(STRUCT),
        "nat" => Some(NAT),
        _ => None,
    }
}

/// Parsed builtin module, imports not yet resolved.
pub fn load_unresolved(name: &str) -> Result<SignatureModule, LoadError> {
    let text = text(name).ok_or_else(|| LoadError::Unknown(name.to_string()))?;
    Ok(parse_module(text)?)
}

/// Every builtin module, parsed.
pub fn all_modules() -> Result<Vec<SignatureModule>, LoadError> {
    NAMES.iter().map(|n| load_unresolved(n)).collect()
}

/// Parsed builtin module with imports resolved against the other builtins.
pub fn load(name: &str) -> Result<SignatureModule, LoadError> {
    let module = load_unresolved(name)?;
    Ok(resolve_imports(&module, &all_modules()?)?)
}

pub fn factory(name: &str) -> Result<Factory, LoadError> {
    Ok(Factory::new(&load(name)?)?)
}
