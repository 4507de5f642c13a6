//! Recursive-descent parser for `.spec` text.
//!
//! ```text
//! module   := unit*
//! unit     := 'spec' IDENT 'sorts' sortdecl section* 'end'
//! section  := ('constructors' | 'observers' | 'others') opdecl*
//!           | 'domains' (vardecl | domain)*
//!           | 'axioms' (vardecl | formula ';')*
//! opdecl   := IDENT ':' sortref* (('->' | '->?') result)? ';'?
//! vardecl  := IDENT (',' IDENT)* ':' sortref ';'?
//! domain   := IDENT '(' IDENT,* ')' 'if' formula ';'
//! formula  := implies ('if' implies)?
//! implies  := disj (('=>' | 'iff') disj)?
//! disj     := conj ('or' conj)*
//! conj     := unary ('and' unary)*
//! unary    := 'not' unary | 'true' | 'false' | '(' formula ')' | term ('=' term)?
//! term     := IDENT | IDENT '(' term,* ')'
//! ```

use std::collections::HashMap;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SpecError;

const KEYWORDS: &[&str] = &[
    "spec",
    "sorts",
    "constructors",
    "observers",
    "others",
    "domains",
    "axioms",
    "end",
    "if",
    "not",
    "and",
    "or",
    "iff",
    "true",
    "false",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Parses the text of one or more `spec` units without semantic checks.
pub fn parse_syntax(src: &str) -> Result<SpecModule, SpecError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, at: 0 };
    let mut units = Vec::new();
    while p.peek() != &Tok::Eof {
        units.push(p.unit()?);
    }
    if units.is_empty() {
        return Err(SpecError::Syntax {
            pos: p.pos(),
            msg: "expected `spec`".into(),
        });
    }
    Ok(SpecModule {
        name: units[0].name.clone(),
        units,
    })
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, SpecError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(SpecError::Syntax {
            pos: self.pos(),
            msg: format!("expected {expected}, found {}", self.peek().describe()),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.advance().pos)
        } else {
            self.error(&tok.describe())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Pos> {
        if self.is_kw(kw) {
            Ok(self.advance().pos)
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if *self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    /// A non-keyword identifier.
    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                let pos = self.advance().pos;
                Ok((s, pos))
            }
            _ => self.error("identifier"),
        }
    }

    fn at_plain_ident(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if !is_keyword(s))
    }

    fn unit(&mut self) -> PResult<SpecUnit> {
        let pos = self.expect_kw("spec")?;
        let (name, _) = self.ident()?;
        self.expect_kw("sorts")?;
        let (sname, spos) = self.ident()?;
        let params = self.bracket_params()?;
        self.eat(Tok::Semi);
        let sort = SortDecl {
            name: sname,
            params,
            pos: spos,
        };
        let mut ops: Vec<OpSig> = Vec::new();
        let mut axioms = Vec::new();
        let mut domains: Vec<(String, Domain)> = Vec::new();
        loop {
            let section = match self.peek() {
                Tok::Ident(s) if s == "end" => {
                    self.advance();
                    break;
                }
                Tok::Ident(s) if s == "constructors" => Some(Section::Constructors),
                Tok::Ident(s) if s == "observers" => Some(Section::Observers),
                Tok::Ident(s) if s == "others" => Some(Section::Others),
                Tok::Ident(s) if s == "domains" => None,
                Tok::Ident(s) if s == "axioms" => {
                    self.advance();
                    self.axioms_section(&mut axioms)?;
                    continue;
                }
                _ => return self.error("a section keyword or `end`"),
            };
            self.advance();
            match section {
                Some(sec) => {
                    while self.at_plain_ident() {
                        ops.push(self.op_decl(sec)?);
                    }
                }
                None => self.domains_section(&mut domains)?,
            }
        }
        for (op, dom) in domains {
            match ops.iter_mut().find(|o| o.name == op) {
                Some(sig) if sig.domain.is_none() => sig.domain = Some(dom),
                Some(_) => {
                    return Err(SpecError::Syntax {
                        pos: dom.pos,
                        msg: format!("duplicate domain clause for `{op}`"),
                    })
                }
                None => {
                    return Err(SpecError::UnknownOp {
                        pos: dom.pos,
                        name: op,
                    })
                }
            }
        }
        Ok(SpecUnit {
            name,
            sort,
            ops,
            axioms,
            pos,
        })
    }

    fn bracket_params(&mut self) -> PResult<Vec<String>> {
        let mut params = Vec::new();
        if self.eat(Tok::LBracket) {
            loop {
                params.push(self.ident()?.0);
                if !self.eat(Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RBracket)?;
        }
        Ok(params)
    }

    fn sort_ref(&mut self) -> PResult<SortRef> {
        let (name, pos) = self.ident()?;
        let params = self.bracket_params()?;
        Ok(SortRef { name, params, pos })
    }

    fn op_decl(&mut self, section: Section) -> PResult<OpSig> {
        let (name, pos) = self.ident()?;
        self.expect(Tok::Colon)?;
        let mut args = Vec::new();
        // An identifier followed by `:` starts the next declaration.
        while self.at_plain_ident() && *self.peek_at(1) != Tok::Colon && *self.peek_at(1) != Tok::Comma {
            args.push(self.sort_ref()?);
        }
        let (partial, result) = match self.peek() {
            Tok::Arrow | Tok::PartialArrow => {
                let partial = *self.peek() == Tok::PartialArrow;
                self.advance();
                let r = self.sort_ref()?;
                if r.name == "Boolean" && r.params.is_empty() {
                    (partial, ResultRef::Boolean)
                } else {
                    (partial, ResultRef::Sort(r))
                }
            }
            _ => (false, ResultRef::Boolean),
        };
        self.eat(Tok::Semi);
        Ok(OpSig {
            name,
            section,
            args,
            result,
            partial,
            domain: None,
            pos,
        })
    }

    fn at_var_decl(&self) -> bool {
        self.at_plain_ident() && matches!(self.peek_at(1), Tok::Colon | Tok::Comma)
    }

    fn var_decl(&mut self, vars: &mut HashMap<String, SortRef>) -> PResult<()> {
        let mut names = vec![self.ident()?];
        while self.eat(Tok::Comma) {
            names.push(self.ident()?);
        }
        self.expect(Tok::Colon)?;
        let sort = self.sort_ref()?;
        self.eat(Tok::Semi);
        for (n, pos) in names {
            if vars.insert(n.clone(), sort.clone()).is_some() {
                return Err(SpecError::Syntax {
                    pos,
                    msg: format!("variable `{n}` declared twice"),
                });
            }
        }
        Ok(())
    }

    fn domains_section(&mut self, out: &mut Vec<(String, Domain)>) -> PResult<()> {
        let mut vars = HashMap::new();
        loop {
            if self.at_var_decl() {
                self.var_decl(&mut vars)?;
                continue;
            }
            if !self.at_plain_ident() {
                return Ok(());
            }
            let (op, pos) = self.ident()?;
            self.expect(Tok::LParen)?;
            let mut params = Vec::new();
            if *self.peek() != Tok::RParen {
                loop {
                    let (v, vpos) = self.ident()?;
                    if !vars.contains_key(&v) {
                        return Err(SpecError::UnknownVar { pos: vpos, name: v });
                    }
                    params.push(v);
                    if !self.eat(Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            self.expect_kw("if")?;
            let condition = self.formula(&vars)?;
            self.expect(Tok::Semi)?;
            let mut used: Vec<&str> = params.iter().map(String::as_str).collect();
            condition.collect_vars(&mut used);
            let vars_used = used
                .into_iter()
                .map(|v| (v.to_string(), vars[v].clone()))
                .collect();
            out.push((
                op,
                Domain {
                    vars: vars_used,
                    params,
                    condition,
                    pos,
                },
            ));
        }
    }

    fn axioms_section(&mut self, out: &mut Vec<Axiom>) -> PResult<()> {
        let mut vars = HashMap::new();
        loop {
            if self.at_var_decl() {
                self.var_decl(&mut vars)?;
                continue;
            }
            let starts_formula = match self.peek() {
                Tok::Ident(s) => !is_keyword(s) || matches!(s.as_str(), "not" | "true" | "false"),
                Tok::LParen => true,
                _ => false,
            };
            if !starts_formula {
                return Ok(());
            }
            let pos = self.pos();
            let formula = self.formula(&vars)?;
            self.expect(Tok::Semi)?;
            let mut used = Vec::new();
            formula.collect_vars(&mut used);
            let universals = used
                .into_iter()
                .map(|v| (v.to_string(), vars[v].clone()))
                .collect();
            out.push(Axiom {
                universals,
                formula,
                pos,
            });
        }
    }

    fn formula(&mut self, vars: &HashMap<String, SortRef>) -> PResult<Formula> {
        let concl = self.implies(vars)?;
        if self.is_kw("if") {
            self.advance();
            let hyp = self.implies(vars)?;
            return Ok(Formula::Implies(Box::new(hyp), Box::new(concl)));
        }
        Ok(concl)
    }

    fn implies(&mut self, vars: &HashMap<String, SortRef>) -> PResult<Formula> {
        let lhs = self.disj(vars)?;
        if self.eat(Tok::Implies) {
            let rhs = self.disj(vars)?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        if self.is_kw("iff") {
            self.advance();
            let rhs = self.disj(vars)?;
            return Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self, vars: &HashMap<String, SortRef>) -> PResult<Formula> {
        let mut f = self.conj(vars)?;
        while self.is_kw("or") {
            self.advance();
            let rhs = self.conj(vars)?;
            f = Formula::Or(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn conj(&mut self, vars: &HashMap<String, SortRef>) -> PResult<Formula> {
        let mut f = self.unary(vars)?;
        while self.is_kw("and") {
            self.advance();
            let rhs = self.unary(vars)?;
            f = Formula::And(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn unary(&mut self, vars: &HashMap<String, SortRef>) -> PResult<Formula> {
        if self.is_kw("not") {
            self.advance();
            return Ok(Formula::Not(Box::new(self.unary(vars)?)));
        }
        if self.is_kw("true") {
            self.advance();
            return Ok(Formula::Const(true));
        }
        if self.is_kw("false") {
            self.advance();
            return Ok(Formula::Const(false));
        }
        if self.eat(Tok::LParen) {
            let f = self.formula(vars)?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        let lhs = self.term(vars)?;
        if self.eat(Tok::Eq) {
            let rhs = self.term(vars)?;
            return Ok(Formula::Eq(lhs, rhs));
        }
        Ok(Formula::Atom(lhs))
    }

    fn term(&mut self, vars: &HashMap<String, SortRef>) -> PResult<Term> {
        let (name, pos) = self.ident()?;
        if self.eat(Tok::LParen) {
            let mut args = Vec::new();
            if *self.peek() != Tok::RParen {
                loop {
                    args.push(self.term(vars)?);
                    if !self.eat(Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            Ok(Term::App(name, args, pos))
        } else if vars.contains_key(&name) {
            Ok(Term::Var(name, pos))
        } else {
            Err(SpecError::UnknownVar { pos, name })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_module_without_semicolons() {
        let m = parse_syntax("spec T sorts T constructors mk: -> T end").unwrap();
        assert_eq!(m.units.len(), 1);
        let u = &m.units[0];
        assert_eq!(u.sort.name, "T");
        assert_eq!(u.ops.len(), 1);
        assert_eq!(u.ops[0].section, Section::Constructors);
        assert!(u.ops[0].args.is_empty());
        assert!(u.axioms.is_empty());
    }

    #[test]
    fn predicate_without_arrow_is_boolean() {
        let m = parse_syntax(
            "spec S sorts S constructors e: -> S; observers isE: S isF: S end",
        )
        .unwrap();
        let ops = &m.units[0].ops;
        assert_eq!(ops[1].result, ResultRef::Boolean);
        assert_eq!(ops[1].args.len(), 1);
        assert_eq!(ops[2].name, "isF");
    }

    #[test]
    fn conditional_axiom_desugars_to_implication() {
        let m = parse_syntax(
            "spec S sorts S constructors e: -> S; observers p: S; axioms X: S; p(X) if not p(X); end",
        )
        .unwrap();
        let ax = &m.units[0].axioms[0];
        assert!(matches!(ax.formula, Formula::Implies(_, _)));
        assert_eq!(ax.universals.len(), 1);
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let err = parse_syntax("spec S\nsorts S\nconstructors e: -> ;\nend").unwrap_err();
        match err {
            SpecError::Syntax { pos, .. } => assert_eq!((pos.line, pos.col), (3, 20)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_variable_is_rejected() {
        let err = parse_syntax("spec S sorts S constructors e: -> S; observers p: S; axioms p(X); end")
            .unwrap_err();
        assert!(matches!(err, SpecError::UnknownVar { ref name, .. } if name == "X"));
    }
}
