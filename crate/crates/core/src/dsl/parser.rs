use super::ast::*;
use super::lexer::{lex, Tok};
use super::{DslError, ErrorKind, Span, Spanned, FORMAT_VERSION};

const TOP: [&str; 8] = [
    "format",
    "automaton",
    "extended",
    "system",
    "channel",
    "protocol",
    "rules",
    "process",
];

type PResult<T> = Result<T, DslError>;

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    end: Span,
    last: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn bump(&mut self) -> Option<Tok> {
        let (t, s) = self.toks.get(self.pos)?.clone();
        self.pos += 1;
        self.last = s;
        Some(t)
    }

    fn error(&self, message: impl Into<String>) -> DslError {
        DslError::new(ErrorKind::Syntax, self.span(), message)
    }

    fn unexpected(&self, want: &str) -> DslError {
        match self.peek() {
            Some(t) => self.error(format!("expected {want}, found {}", t.describe())),
            None => self.error(format!("expected {want}, found end of input")),
        }
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == Some(t)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(x)) if x == w)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn keyword(&mut self, w: &str) -> PResult<()> {
        if self.at_word(w) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn spanned<T>(&self, start: Span, node: T) -> Spanned<T> {
        Spanned::new(node, start.join(self.last))
    }

    /// A name: a bare word or a quoted string.
    fn ident(&mut self) -> PResult<Ident> {
        let s = self.span();
        match self.peek() {
            Some(Tok::Word(w)) if w != "eps" => {
                let w = w.clone();
                self.bump();
                Ok(Spanned::new(w, s))
            }
            Some(Tok::Str(w)) => {
                let w = w.clone();
                self.bump();
                Ok(Spanned::new(w, s))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    /// A name or `eps`.
    fn opt_ident(&mut self) -> PResult<Option<Ident>> {
        if self.at_word("eps") {
            self.bump();
            Ok(None)
        } else {
            self.ident().map(Some)
        }
    }

    fn path(&mut self) -> PResult<Path> {
        let start = self.span();
        let mut parts = vec![self.ident()?.node];
        while self.eat(&Tok::Dot) {
            parts.push(self.ident()?.node);
        }
        Ok(self.spanned(start, parts))
    }

    /// `a, b, c` (at least one).
    fn list(&mut self) -> PResult<Vec<Ident>> {
        let mut v = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            v.push(self.ident()?);
        }
        Ok(v)
    }

    /// `{a, b}`, possibly empty.
    fn braced_list(&mut self) -> PResult<Vec<Ident>> {
        self.expect(Tok::LBrace)?;
        if self.eat(&Tok::RBrace) {
            return Ok(Vec::new());
        }
        let v = self.list()?;
        self.expect(Tok::RBrace)?;
        Ok(v)
    }

    fn once<T>(&self, slot: &Option<T>, what: &str, at: Span) -> PResult<()> {
        if slot.is_some() {
            Err(DslError::new(
                ErrorKind::Syntax,
                at,
                format!("duplicate {what} clause"),
            ))
        } else {
            Ok(())
        }
    }

    fn accept(&mut self) -> PResult<Spanned<AcceptDecl>> {
        let start = self.span();
        self.keyword("accept")?;
        let acc = if self.at_word("finite") {
            self.bump();
            AcceptDecl::Finite(self.braced_list()?)
        } else if self.at_word("muller") {
            self.bump();
            self.expect(Tok::LBrace)?;
            let mut sets = Vec::new();
            if !self.at(&Tok::RBrace) {
                sets.push(self.braced_list()?);
                while self.eat(&Tok::Comma) {
                    sets.push(self.braced_list()?);
                }
            }
            self.expect(Tok::RBrace)?;
            AcceptDecl::Muller(sets)
        } else {
            return Err(self.unexpected("`finite` or `muller`"));
        };
        self.expect(Tok::Semi)?;
        Ok(self.spanned(start, acc))
    }

    fn io_items(&mut self, kw: &str) -> PResult<Vec<IoItem>> {
        if self.at_word("eps") {
            self.bump();
            return Ok(Vec::new());
        }
        let mut items = Vec::new();
        loop {
            // `in` is optional and may itself be a port name: `in in.a`.
            if self.at_word(kw) && !matches!(self.peek_at(1), Some(Tok::Dot)) {
                self.bump();
            }
            let port = self.ident()?;
            self.expect(Tok::Dot)?;
            let sym = self.ident()?;
            items.push((port, sym));
            if !self.eat(&Tok::Comma) {
                return Ok(items);
            }
        }
    }

    fn transition(&mut self) -> PResult<Spanned<TransitionDecl>> {
        let start = self.span();
        let label = self.ident()?;
        self.expect(Tok::Colon)?;
        let from = self.ident()?;
        self.expect(Tok::OpenLabel)?;
        let input = self.io_items("in")?;
        self.expect(Tok::Slash)?;
        let output = self.io_items("out")?;
        self.expect(Tok::CloseLabel)?;
        let to = self.ident()?;
        self.expect(Tok::Semi)?;
        Ok(self.spanned(
            start,
            TransitionDecl {
                label,
                from,
                input,
                output,
                to,
            },
        ))
    }

    fn port(&mut self) -> PResult<Spanned<PortDecl>> {
        let start = self.span();
        self.bump();
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let symbols = self.braced_list()?;
        self.expect(Tok::Semi)?;
        Ok(self.spanned(start, PortDecl { name, symbols }))
    }

    fn is_labelled_statement(&self) -> bool {
        matches!(self.peek(), Some(Tok::Word(_) | Tok::Str(_)))
            && self.peek_at(1) == Some(&Tok::Colon)
    }

    fn automaton(&mut self) -> PResult<Decl> {
        self.keyword("automaton")?;
        let mut d = AutomatonDecl::new(self.ident()?);
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            let at = self.span();
            if self.is_labelled_statement() {
                d.transitions.push(self.transition()?);
            } else if self.at_word("states") {
                self.once(&d.states, "states", at)?;
                self.bump();
                d.states = Some(self.list()?);
                self.expect(Tok::Semi)?;
            } else if self.at_word("initial") {
                self.once(&d.initial, "initial", at)?;
                self.bump();
                d.initial = Some(self.ident()?);
                self.expect(Tok::Semi)?;
            } else if self.at_word("accept") {
                self.once(&d.accept, "accept", at)?;
                d.accept = Some(self.accept()?);
            } else if self.at_word("in") {
                d.inputs.push(self.port()?);
            } else if self.at_word("out") {
                d.outputs.push(self.port()?);
            } else {
                return Err(self.unexpected("an automaton clause or `}`"));
            }
        }
        Ok(Decl::Automaton(d))
    }

    fn doc_port(&mut self) -> PResult<Spanned<DocPortDecl>> {
        let start = self.span();
        self.bump();
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let mut classes = Vec::new();
        loop {
            let class = self.ident()?;
            let mut params = Vec::new();
            if self.eat(&Tok::LBracket) {
                params = self.list()?;
                self.expect(Tok::RBracket)?;
            }
            classes.push(DocClassDecl { class, params });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        Ok(self.spanned(start, DocPortDecl { name, classes }))
    }

    fn condition(&mut self) -> PResult<Spanned<ConditionDecl>> {
        let start = self.span();
        self.keyword("cond")?;
        let name = self.ident()?;
        self.keyword("on")?;
        let on = self.ident()?;
        self.keyword("holds")?;
        self.expect(Tok::LBrace)?;
        let mut holds = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if !holds.is_empty() {
                self.expect(Tok::Comma)?;
            }
            self.expect(Tok::LParen)?;
            let r = self.ident()?;
            self.expect(Tok::Comma)?;
            let p = self.ident()?;
            self.expect(Tok::RParen)?;
            holds.push((r, p));
        }
        self.expect(Tok::Semi)?;
        Ok(self.spanned(start, ConditionDecl { name, on, holds }))
    }

    fn class_transition(&mut self) -> PResult<Spanned<ClassTransitionDecl>> {
        let start = self.span();
        let label = self.ident()?;
        self.expect(Tok::Colon)?;
        let from = self.ident()?;
        self.expect(Tok::OpenLabel)?;
        let input = self.opt_ident()?;
        let mut when = None;
        if self.at_word("when") {
            self.bump();
            let holds = !self.eat(&Tok::Bang);
            when = Some((holds, self.ident()?));
        }
        self.expect(Tok::Slash)?;
        let output = self.opt_ident()?;
        self.expect(Tok::CloseLabel)?;
        let to = self.ident()?;
        self.expect(Tok::Semi)?;
        Ok(self.spanned(
            start,
            ClassTransitionDecl {
                label,
                from,
                input,
                when,
                output,
                to,
            },
        ))
    }

    fn extended(&mut self) -> PResult<Decl> {
        self.keyword("extended")?;
        self.keyword("automaton")?;
        let mut d = ExtendedDecl::new(self.ident()?);
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            let at = self.span();
            if self.is_labelled_statement() {
                d.transitions.push(self.class_transition()?);
            } else if self.at_word("modes") {
                if !d.modes.is_empty() {
                    return Err(DslError::new(
                        ErrorKind::Syntax,
                        at,
                        "duplicate modes clause",
                    ));
                }
                self.bump();
                d.modes = self.list()?;
                self.expect(Tok::Semi)?;
            } else if self.at_word("rest") {
                if !d.rest.is_empty() {
                    return Err(DslError::new(
                        ErrorKind::Syntax,
                        at,
                        "duplicate rest clause",
                    ));
                }
                self.bump();
                d.rest = self.list()?;
                self.expect(Tok::Semi)?;
            } else if self.at_word("initial") {
                self.once(&d.initial, "initial", at)?;
                self.bump();
                let mode = self.ident()?;
                let rest = if self.at_word("rest") {
                    self.bump();
                    Some(self.ident()?)
                } else {
                    None
                };
                d.initial = Some((mode, rest));
                self.expect(Tok::Semi)?;
            } else if self.at_word("accept") {
                self.once(&d.accept, "accept", at)?;
                d.accept = Some(self.accept()?);
            } else if self.at_word("in") {
                d.inputs.push(self.doc_port()?);
            } else if self.at_word("out") {
                d.outputs.push(self.doc_port()?);
            } else if self.at_word("cond") {
                d.conditions.push(self.condition()?);
            } else {
                return Err(self.unexpected("an extended automaton clause or `}`"));
            }
        }
        Ok(Decl::Extended(d))
    }

    fn system(&mut self) -> PResult<Decl> {
        self.keyword("system")?;
        let mut d = SystemDecl::new(self.ident()?);
        let mut clocking_seen = false;
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            let at = self.span();
            if self.at_word("f") && self.peek_at(1) == Some(&Tok::LParen) {
                self.bump();
                self.bump();
                let state = self.ident()?;
                self.expect(Tok::Comma)?;
                let input = self.opt_ident()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Eq)?;
                self.expect(Tok::LParen)?;
                let next = self.ident()?;
                self.expect(Tok::Comma)?;
                let output = self.opt_ident()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                d.entries.push(self.spanned(
                    at,
                    EntryDecl {
                        state,
                        input,
                        next,
                        output,
                    },
                ));
            } else if self.at_word("clocked") || self.at_word("unclocked") {
                if clocking_seen {
                    return Err(DslError::new(
                        ErrorKind::Syntax,
                        at,
                        "duplicate clocking clause",
                    ));
                }
                clocking_seen = true;
                d.clocked = self.at_word("clocked");
                self.bump();
                self.expect(Tok::Semi)?;
            } else if self.at_word("initial") {
                self.once(&d.initial, "initial", at)?;
                self.bump();
                d.initial = Some(self.ident()?);
                self.expect(Tok::Semi)?;
            } else if self.at_word("states") {
                self.once(&d.states, "states", at)?;
                self.bump();
                d.states = Some(self.list()?);
                self.expect(Tok::Semi)?;
            } else if self.at_word("in") {
                self.once(&d.inputs, "in", at)?;
                self.bump();
                d.inputs = Some(self.braced_list()?);
                self.expect(Tok::Semi)?;
            } else if self.at_word("out") {
                self.once(&d.outputs, "out", at)?;
                self.bump();
                d.outputs = Some(self.braced_list()?);
                self.expect(Tok::Semi)?;
            } else {
                return Err(self.unexpected("a system clause or `}`"));
            }
        }
        Ok(Decl::System(d))
    }

    fn endpoint(&mut self) -> PResult<(Ident, Ident)> {
        let role = self.ident()?;
        self.expect(Tok::Dot)?;
        Ok((role, self.ident()?))
    }

    fn channel(&mut self) -> PResult<Decl> {
        self.keyword("channel")?;
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let from = self.endpoint()?;
        self.expect(Tok::Arrow)?;
        let to = self.endpoint()?;
        self.expect(Tok::Semi)?;
        Ok(Decl::Channel(ChannelDecl { name, from, to }))
    }

    fn protocol(&mut self) -> PResult<Decl> {
        self.keyword("protocol")?;
        let name = self.ident()?;
        let (mut roles, mut channels, mut tree) = (None, None, false);
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            let at = self.span();
            if self.at_word("roles") {
                self.once(&roles, "roles", at)?;
                self.bump();
                roles = Some(self.list()?);
            } else if self.at_word("channels") {
                self.once(&channels, "channels", at)?;
                self.bump();
                channels = Some(self.list()?);
            } else if self.at_word("tree") {
                self.bump();
                tree = true;
            } else {
                return Err(self.unexpected("`roles`, `channels`, `tree` or `}`"));
            }
            self.expect(Tok::Semi)?;
        }
        Ok(Decl::Protocol(ProtocolDecl {
            name,
            roles: roles.unwrap_or_default(),
            channels: channels.unwrap_or_default(),
            tree,
        }))
    }

    fn guard(&mut self) -> PResult<GuardDecl> {
        let role = self.ident()?;
        let negated = if self.eat(&Tok::Eq) {
            false
        } else if self.eat(&Tok::NotEq) {
            true
        } else {
            return Err(self.unexpected("`=` or `!=`"));
        };
        Ok(GuardDecl {
            role,
            negated,
            state: self.ident()?,
        })
    }

    fn rule(&mut self) -> PResult<Spanned<RuleDecl>> {
        let start = self.span();
        self.keyword("rule")?;
        let mut r = RuleDecl {
            name: self.ident()?,
            when: Vec::new(),
            on: None,
            forbid: Vec::new(),
        };
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            let at = self.span();
            if self.at_word("when") {
                self.bump();
                r.when.push(self.guard()?);
                while self.eat(&Tok::Comma) {
                    r.when.push(self.guard()?);
                }
            } else if self.at_word("on") {
                self.once(&r.on, "on", at)?;
                self.bump();
                r.on = Some(if self.at_word("eps") {
                    self.bump();
                    OnDecl::Eps
                } else {
                    OnDecl::Symbol(self.path()?)
                });
            } else if self.at_word("forbid") {
                self.bump();
                r.forbid.push(self.path()?);
                while self.eat(&Tok::Comma) {
                    r.forbid.push(self.path()?);
                }
            } else {
                return Err(self.unexpected("`when`, `on`, `forbid` or `}`"));
            }
            self.expect(Tok::Semi)?;
        }
        Ok(self.spanned(start, r))
    }

    fn rules(&mut self) -> PResult<Decl> {
        self.keyword("rules")?;
        let name = self.ident()?;
        self.keyword("for")?;
        let roles = self.list()?;
        let mut rules = Vec::new();
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            rules.push(self.rule()?);
        }
        Ok(Decl::Rules(RulesDecl { name, roles, rules }))
    }

    fn process(&mut self) -> PResult<Decl> {
        self.keyword("process")?;
        let mut d = ProcessDecl {
            name: self.ident()?,
            coordinate: None,
            bindings: Vec::new(),
        };
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            let at = self.span();
            if self.at_word("coordinate") {
                self.once(&d.coordinate, "coordinate", at)?;
                self.bump();
                d.coordinate = Some(self.ident()?);
            } else if self.at_word("bind") {
                self.bump();
                let role = self.ident()?;
                self.expect(Tok::Colon)?;
                let protocol = self.ident()?;
                self.keyword("with")?;
                let counterparty = self.ident()?;
                d.bindings.push(self.spanned(
                    at,
                    BindDecl {
                        role,
                        protocol,
                        counterparty,
                    },
                ));
            } else {
                return Err(self.unexpected("`coordinate`, `bind` or `}`"));
            }
            self.expect(Tok::Semi)?;
        }
        Ok(Decl::Process(d))
    }

    fn decl(&mut self) -> PResult<Spanned<Decl>> {
        let start = self.span();
        let d = match self.peek() {
            Some(Tok::Word(w)) => match w.as_str() {
                "automaton" => self.automaton()?,
                "extended" => self.extended()?,
                "system" => self.system()?,
                "channel" => self.channel()?,
                "protocol" => self.protocol()?,
                "rules" => self.rules()?,
                "process" => self.process()?,
                _ => return Err(self.unexpected("a declaration")),
            },
            _ => return Err(self.unexpected("a declaration")),
        };
        Ok(self.spanned(start, d))
    }

    /// Skip to the next token that can start a declaration.
    fn recover(&mut self) {
        self.bump();
        while let Some(t) = self.peek() {
            let boundary =
                self.pos == 0 || matches!(self.toks[self.pos - 1].0, Tok::Semi | Tok::RBrace);
            if boundary && matches!(t, Tok::Word(w) if TOP.contains(&w.as_str())) {
                return;
            }
            self.bump();
        }
    }
}

/// Parse a document, collecting every lexical and syntax error.
pub fn parse(src: &str) -> Result<Document, Vec<DslError>> {
    let (toks, mut errors) = lex(src);
    let end = Span {
        start: src.len(),
        end: src.len(),
        line: src.lines().count().max(1),
        column: src.lines().last().map_or(1, |l| l.chars().count() + 1),
    };
    let mut p = Parser {
        toks,
        pos: 0,
        end,
        last: Span::default(),
    };
    let mut doc = Document::default();
    if p.at_word("format") {
        let at = p.span();
        p.bump();
        let version = match p.bump() {
            Some(Tok::Word(w)) => w.parse::<u32>().ok(),
            _ => None,
        };
        match version {
            Some(FORMAT_VERSION) => {}
            _ => errors.push(DslError::new(
                ErrorKind::Syntax,
                at.join(p.last),
                format!("unsupported format; expected `format {FORMAT_VERSION};`"),
            )),
        }
        if !p.eat(&Tok::Semi) {
            errors.push(p.unexpected("`;`"));
        }
    }
    while p.peek().is_some() {
        match p.decl() {
            Ok(d) => doc.decls.push(d),
            Err(e) => {
                errors.push(e);
                p.recover();
            }
        }
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        errors.sort_by_key(|e| e.span.start);
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file() {
        assert_eq!(parse("").unwrap(), Document::default());
        assert_eq!(parse("format 1;\n").unwrap(), Document::default());
    }

    #[test]
    fn automaton_clauses() {
        let d = parse(
            "automaton T { states q0, q1; initial q0; accept finite {q0};
             in in: {a}; t0: q0 -[in in.a / eps]-> q1; t1: q1 -[in.a / eps]-> q0; }",
        )
        .unwrap();
        let Decl::Automaton(a) = &d.decls[0].node else {
            panic!()
        };
        assert_eq!(a.transitions.len(), 2);
        assert_eq!(a.transitions[0], a.transitions[0]);
        assert_eq!(a.transitions[1].input[0].0.node, "in");
        assert_eq!(a.inputs[0].name.node, "in");
    }

    #[test]
    fn errors_recover_to_next_declaration() {
        let errs = parse(
            "automaton A { initial ; }\nchannel c A.x -> B.y;\nprotocol P { roles A; }\nautomaton B { bogus; }",
        )
        .unwrap_err();
        assert_eq!(errs.len(), 3);
        assert_eq!(errs[0].span.line, 1);
        assert_eq!(errs[1].span.line, 2);
        assert_eq!(errs[2].span.line, 4);
    }

    #[test]
    fn duplicate_clause() {
        let errs = parse("automaton A { initial a; initial b; }").unwrap_err();
        assert!(errs[0].message.contains("duplicate initial"));
    }

    #[test]
    fn bad_format() {
        assert!(parse("format 2;").is_err());
    }

    #[test]
    fn spans_cover_nodes() {
        let src = "channel c: A.x -> B.y;";
        let d = parse(src).unwrap();
        assert_eq!(d.decls[0].span.start, 0);
        assert_eq!(d.decls[0].span.end, src.len());
    }
}
