use super::ast::{EdgePattern, NodePattern, Query};
use super::lexer::{tokenize, Spanned, Tok};
use super::ParseError;

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError { offset: t.offset, expected: expected.into(), found: t.tok.describe() }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("string literal")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if s.eq_ignore_ascii_case(kw) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(kw)),
        }
    }

    fn node(&mut self) -> Result<NodePattern, ParseError> {
        self.expect(Tok::LParen)?;
        let var = self.ident("variable name")?;
        let label = if self.eat(&Tok::Colon) { Some(self.ident("label")?) } else { None };
        let mut props = Vec::new();
        if self.eat(&Tok::LBrace) {
            loop {
                let key = self.ident("property name")?;
                self.expect(Tok::Colon)?;
                props.push((key, self.string()?));
                if self.eat(&Tok::RBrace) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return Err(self.error("',' or '}'"));
                }
            }
        }
        if !self.eat(&Tok::RParen) {
            let expected = match (&label, props.is_empty()) {
                (None, true) => "':', '{' or ')'",
                (Some(_), true) => "'{' or ')'",
                _ => "')'",
            };
            return Err(self.error(expected));
        }
        Ok(NodePattern { var, label, props })
    }

    fn query(&mut self) -> Result<Query, ParseError> {
        self.keyword("MATCH")?;
        let start = self.node()?;
        let hop = if self.eat(&Tok::Dash) {
            self.expect(Tok::LBracket)?;
            self.expect(Tok::Colon)?;
            let rel = self.ident("relationship type")?;
            self.expect(Tok::RBracket)?;
            self.expect(Tok::Arrow)?;
            Some((EdgePattern { rel }, self.node()?))
        } else {
            None
        };
        if let Err(e) = self.keyword("RETURN") {
            return Err(if hop.is_none() { ParseError { expected: "'-' or RETURN".into(), ..e } } else { e });
        }
        let mut returns = Vec::new();
        let bound: Vec<String> = std::iter::once(start.var.clone()).chain(hop.as_ref().map(|(_, n)| n.var.clone())).collect();
        loop {
            let offset = self.peek().offset;
            let var = self.ident("variable name")?;
            if !bound.contains(&var) {
                return Err(ParseError {
                    offset,
                    expected: format!("a variable bound in MATCH ({})", bound.join(", ")),
                    found: format!("unbound variable {var:?}"),
                });
            }
            returns.push(var);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if self.peek().tok != Tok::Eof {
            return Err(self.error("',' or end of input"));
        }
        Ok(Query { start, hop, returns })
    }
}

/// Parses one pattern query. Offsets in errors count characters.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    Parser { toks: tokenize(text)?, pos: 0 }.query()
}
