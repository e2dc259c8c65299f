//! Parser for `.gom` signature modules, term expressions and patterns.
//!
//! Module grammar:
//!
//! ```text
//! module   ::= "module" Ident ["imports" Ident*] ["public"] "sorts" Ident*
//!              "abstract" "syntax" (production | hook | "...")*
//! production ::= Ident ["(" [field ("," field)*] ")"] "->" Ident
//!              | Ident "(" Ident "*" ")" "->" Ident
//! field    ::= Ident ":" Ident
//! hook     ::= Ident ":" kind "(" [Ident ([","] Ident)*] ")" "{" clause* "}"
//! clause   ::= expr ("," expr)* ["where" guard] "->" action ";"
//! action   ::= "raw" "(" expr ")" | "(" expr ("," expr)* ")" | expr
//! guard    ::= unary ("&&" unary)*
//! unary    ::= "!" unary | "(" guard ")" | Ident "(" [expr ("," expr)*] ")"
//! expr     ::= "_" | Ident "*" | Ident ["(" [expr ("," expr)*] ")"]
//! ```
//!
//! `//` starts a line comment. The keyword `public` and the token `...` are
//! accepted and ignored.

mod lexer;
mod printer;

use std::fmt;

use lexer::{tokenize, Tok, Token};

use crate::matcher::{Pattern, PatternError};
use crate::signature_model::{
    ActionExpr, Expr, ExprKind, GuardExpr, HookDecl, HookKind, OperatorDecl, OperatorKind, Pos,
    RuleClause, Signature, SignatureModule, Slot, SortDecl,
};

const KEYWORDS: [&str; 5] = ["module", "imports", "public", "sorts", "abstract"];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct SyntaxError {
    pub pos: Pos,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected ", self.pos)?;
        match self.expected.as_slice() {
            [one] => write!(f, "{one}")?,
            many => write!(f, "one of {}", many.join(", "))?,
        }
        write!(f, ", found {}", self.found)
    }
}

/// A parsed term expression: not yet sorted, checked, or interned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceTerm {
    pub head: String,
    pub children: Vec<SurfaceTerm>,
    pub pos: Pos,
}

impl SurfaceTerm {
    pub fn new(head: impl Into<String>, children: Vec<SurfaceTerm>) -> Self {
        SurfaceTerm {
            head: head.into(),
            children,
            pos: Pos::default(),
        }
    }

    pub fn constant(head: impl Into<String>) -> Self {
        SurfaceTerm::new(head, Vec::new())
    }
}

impl fmt::Display for SurfaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.head)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                crate::deep(|| write!(f, "{c}"))?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Parses module text into an unvalidated [`SignatureModule`].
pub fn parse_module(text: &str) -> Result<SignatureModule, SyntaxError> {
    let mut p = Parser::new(text)?;
    let m = p.module()?;
    p.expect_eof()?;
    Ok(m)
}

/// Parses a closed term in functional notation. Constants may be written
/// with or without `()`. Arities are not checked here.
pub fn parse_term(text: &str) -> Result<SurfaceTerm, SyntaxError> {
    let mut p = Parser::new(text)?;
    let t = p.surface_term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a pattern and resolves it against `signature`: operator names
/// become operator patterns, `X*` list variables, `_` the wildcard, and any
/// other identifier a term variable.
pub fn parse_pattern(text: &str, signature: &Signature) -> Result<Pattern, PatternError> {
    let expr = parse_expr(text).map_err(PatternError::Syntax)?;
    Pattern::resolve(&expr, signature)
}

/// Parses a pattern or template expression without resolving names.
pub fn parse_expr(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, SyntaxError> {
        if *self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            self.error(&[&tok.to_string()])
        }
    }

    fn expect_eof(&mut self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => self.error(&["end of input"]),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, SyntaxError> {
        if self.is_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            self.error(&[&format!("`{kw}`")])
        }
    }

    /// An identifier that is not a reserved word.
    fn plain_ident(&self) -> Option<&str> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Some(s),
            _ => None,
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), SyntaxError> {
        match self.plain_ident() {
            Some(_) => {
                let t = self.bump();
                match t.tok {
                    Tok::Ident(s) => Ok((s, t.pos)),
                    _ => unreachable!(),
                }
            }
            None => self.error(&["identifier"]),
        }
    }

    fn module(&mut self) -> Result<SignatureModule, SyntaxError> {
        let pos = self.keyword("module")?;
        let (name, _) = self.ident()?;
        let mut module = SignatureModule::new(name);
        module.pos = pos;
        if self.is_keyword("imports") {
            self.bump();
            while self.plain_ident().is_some() {
                module.imports.push(self.ident()?.0);
            }
        }
        while self.is_keyword("public") {
            self.bump();
        }
        self.keyword("sorts")?;
        while self.plain_ident().is_some() {
            let (name, pos) = self.ident()?;
            module.sorts.push(SortDecl { name, pos });
        }
        self.keyword("abstract")?;
        match self.peek() {
            Tok::Ident(s) if s == "syntax" => {
                self.bump();
            }
            _ => return self.error(&["`syntax`"]),
        }
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Ellipsis => {
                    self.bump();
                }
                Tok::Ident(s) if s == "public" => {
                    self.bump();
                }
                Tok::Ident(_) if self.plain_ident().is_some() => {
                    if *self.peek_at(1) == Tok::Colon {
                        let hook = self.hook()?;
                        module.hooks.push(hook);
                    } else {
                        let op = self.production(&module.name)?;
                        module.operators.push(op);
                    }
                }
                _ => return self.error(&["production", "hook", "end of input"]),
            }
        }
        Ok(module)
    }

    fn production(&mut self, module: &str) -> Result<OperatorDecl, SyntaxError> {
        let (name, pos) = self.ident()?;
        let mut kind = OperatorKind::Fixed { slots: Vec::new() };
        if self.eat(&Tok::LParen) {
            if self.plain_ident().is_some() && *self.peek_at(1) == Tok::Star {
                let (element, _) = self.ident()?;
                self.expect(Tok::Star)?;
                self.expect(Tok::RParen)?;
                kind = OperatorKind::Variadic { element };
            } else {
                let mut slots = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        let (slot, _) = self.ident()?;
                        self.expect(Tok::Colon)?;
                        let (sort, _) = self.ident()?;
                        slots.push(Slot { name: slot, sort });
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                kind = OperatorKind::Fixed { slots };
            }
        }
        self.expect(Tok::Arrow)?;
        let (result, _) = self.ident()?;
        Ok(OperatorDecl {
            name,
            kind,
            result,
            module: module.to_string(),
            pos,
        })
    }

    fn hook(&mut self) -> Result<HookDecl, SyntaxError> {
        let (operator, pos) = self.ident()?;
        self.expect(Tok::Colon)?;
        let kind = match self.peek() {
            Tok::Ident(s) => HookKind::from_keyword(s),
            _ => None,
        };
        let Some(kind) = kind else {
            return self.error(&HookKind::ALL.map(|k| k.keyword()));
        };
        self.bump();
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        while self.plain_ident().is_some() {
            params.push(self.ident()?.0);
            self.eat(&Tok::Comma);
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut body = Vec::new();
        while *self.peek() != Tok::RBrace {
            body.push(self.clause()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(HookDecl {
            operator,
            kind,
            params,
            body,
            pos,
        })
    }

    fn clause(&mut self) -> Result<RuleClause, SyntaxError> {
        let pos = self.pos();
        let mut patterns = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            patterns.push(self.expr()?);
        }
        let guard = if self.is_keyword("where") {
            self.bump();
            Some(self.guard()?)
        } else {
            None
        };
        if *self.peek() != Tok::Arrow {
            return self.error(&["`,`", "`where`", "`->`"]);
        }
        self.bump();
        let action = self.action()?;
        if *self.peek() != Tok::RBrace {
            self.expect(Tok::Semi)?;
        }
        Ok(RuleClause {
            patterns,
            guard,
            action,
            pos,
        })
    }

    fn action(&mut self) -> Result<ActionExpr, SyntaxError> {
        if self.eat(&Tok::LParen) {
            let mut items = vec![self.expr()?];
            while self.eat(&Tok::Comma) {
                items.push(self.expr()?);
            }
            self.expect(Tok::RParen)?;
            return Ok(ActionExpr::Tuple(items));
        }
        if self.is_keyword("raw") && *self.peek_at(1) == Tok::LParen {
            self.bump();
            self.bump();
            let inner = self.expr()?;
            self.expect(Tok::RParen)?;
            return Ok(ActionExpr::Raw(inner));
        }
        Ok(ActionExpr::Template(self.expr()?))
    }

    fn guard(&mut self) -> Result<GuardExpr, SyntaxError> {
        let mut g = self.guard_unary()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.guard_unary()?;
            g = GuardExpr::And(Box::new(g), Box::new(rhs));
        }
        Ok(g)
    }

    fn guard_unary(&mut self) -> Result<GuardExpr, SyntaxError> {
        if self.eat(&Tok::Bang) {
            return Ok(GuardExpr::Not(Box::new(self.guard_unary()?)));
        }
        if self.eat(&Tok::LParen) {
            let g = self.guard()?;
            self.expect(Tok::RParen)?;
            return Ok(g);
        }
        let (name, pos) = self.ident()?;
        self.expect(Tok::LParen)?;
        let args = self.expr_list()?;
        Ok(GuardExpr::Pred { name, args, pos })
    }

    /// Comma-separated expressions up to and including the closing `)`.
    fn expr_list(&mut self) -> Result<Vec<Expr>, SyntaxError> {
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if self.eat(&Tok::Comma) {
                    continue;
                }
                if *self.peek() == Tok::RParen {
                    self.bump();
                    break;
                }
                return self.error(&["`,`", "`)`"]);
            }
        }
        Ok(args)
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        if self.eat(&Tok::Underscore) {
            return Ok(Expr::new(ExprKind::Wildcard, pos));
        }
        let (name, pos) = match self.ident() {
            Ok(x) => x,
            Err(_) => return self.error(&["identifier", "`_`"]),
        };
        if self.eat(&Tok::Star) {
            return Ok(Expr::new(ExprKind::Star(name), pos));
        }
        if self.eat(&Tok::LParen) {
            let args = self.expr_list()?;
            return Ok(Expr::new(ExprKind::App(name, args), pos));
        }
        Ok(Expr::new(ExprKind::Ident(name), pos))
    }

    fn surface_term(&mut self) -> Result<SurfaceTerm, SyntaxError> {
        let (head, pos) = self.ident()?;
        let mut children = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                children.push(crate::deep(|| self.surface_term())?);
                if self.eat(&Tok::Comma) {
                    continue;
                }
                if *self.peek() == Tok::RParen {
                    self.bump();
                    break;
                }
                return self.error(&["`,`", "`)`"]);
            }
        }
        Ok(SurfaceTerm {
            head,
            children,
            pos,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_listing() {
        let m = crate::corpus::load_unresolved("boolean").unwrap();
        assert_eq!(m.name, "Boolean");
        assert_eq!(m.sorts.len(), 1);
        let ops: Vec<_> = m.operators.iter().map(|o| o.name.as_str()).collect();
        assert_eq!(ops, ["True", "False", "not", "and", "or"]);
        assert_eq!(m.hooks.len(), 1);
        assert_eq!(m.hooks[0].body.len(), 3);
    }

    #[test]
    fn boolean_listing_without_hook() {
        let text = "module Boolean
  sorts Bool
  abstract syntax
    True                   -> Bool
    False                  -> Bool
    not(b:Bool)            -> Bool
    and(lhs:Bool,rhs:Bool) -> Bool
    or(lhs:Bool,rhs:Bool)  -> Bool";
        let m = parse_module(text).unwrap();
        assert_eq!(m.operators.len(), 5);
        assert!(m.hooks.is_empty());
        assert_eq!(
            m.operators[3].kind,
            OperatorKind::Fixed {
                slots: vec![
                    Slot { name: "lhs".into(), sort: "Bool".into() },
                    Slot { name: "rhs".into(), sort: "Bool".into() },
                ]
            }
        );
    }

    #[test]
    fn struct_listing() {
        let m = crate::corpus::load_unresolved("struct").unwrap();
        assert_eq!(m.sorts.len(), 4);
        let conc_par = m.operator("concPar").unwrap();
        assert_eq!(conc_par.kind, OperatorKind::Variadic { element: "Struc".into() });
        assert_eq!(conc_par.result, "StrucPar");
        assert!(m.imports.is_empty());
    }

    #[test]
    fn elliptical_listing_is_tolerated() {
        let text = "module Struct imports public sorts Struc abstract syntax
            o -> Struc
            a -> Struc
            ...
            neg(a:Struc) -> Struc";
        let m = parse_module(text).unwrap();
        assert_eq!(m.operators.len(), 3);
    }

    #[test]
    fn empty_grammar() {
        let m = parse_module("module M sorts abstract syntax").unwrap();
        assert!(m.sorts.is_empty());
        assert!(m.operators.is_empty());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_module("module M\n  sorts B\n  abstract syntax\n    f(x:B -> B").unwrap_err();
        assert_eq!(err.pos, Pos::new(4, 11));
        assert_eq!(err.found, "`->`");
        assert!(err.expected.contains(&"`,`".to_string()) || err.expected.contains(&"`)`".to_string()));

        let err = parse_module("module M abstract syntax").unwrap_err();
        assert_eq!(err.expected, ["`sorts`"]);
        let err = parse_module("module M sorts B abstract syntax t -> B $").unwrap_err();
        assert_eq!(err.found, "`$`");
    }

    #[test]
    fn terms() {
        let t = parse_term("not(and(True,False))").unwrap();
        assert_eq!(
            t,
            SurfaceTerm::new(
                "not",
                vec![SurfaceTerm::new(
                    "and",
                    vec![SurfaceTerm::constant("True"), SurfaceTerm::constant("False")]
                )]
            )
            .with_positions_of(&t)
        );
        let t = parse_term("par(concPar(a,b,c))").unwrap();
        assert_eq!(t.head, "par");
        assert_eq!(t.children[0].head, "concPar");
        assert_eq!(t.children[0].children.len(), 3);
        // arity is not the parser's business
        assert_eq!(parse_term("and(True)").unwrap().children.len(), 1);
        assert_eq!(parse_term("o()").unwrap(), parse_term("o").unwrap());
        assert!(parse_term("f(x,)").is_err());
        assert!(parse_term("f(x) g").is_err());
    }

    #[test]
    fn hook_clauses() {
        let m = crate::corpus::load_unresolved("struct").unwrap();
        let hook = m
            .hooks
            .iter()
            .find(|h| h.operator == "concPar")
            .unwrap();
        assert_eq!(hook.kind, HookKind::MakeInsert);
        assert_eq!(hook.params, ["e", "l"]);
        let last = hook.body.last().unwrap();
        assert_eq!(last.guard.as_ref().unwrap().to_string(), "geq(e,head)");
        assert_eq!(last.action.to_string(), "raw(concPar(head,concPar(e,tail*)))");
    }

    impl SurfaceTerm {
        fn with_positions_of(mut self, other: &SurfaceTerm) -> SurfaceTerm {
            self.pos = other.pos;
            self.children = self
                .children
                .into_iter()
                .zip(&other.children)
                .map(|(c, o)| c.with_positions_of(o))
                .collect();
            self
        }
    }
}
