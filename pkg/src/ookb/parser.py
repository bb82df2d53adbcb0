"""Reader and writer for the textual knowledge-base format.

The surface syntax is a small ASP-style fragment:

  * facts:  ``class(cell).``  ``value(has_parent, p1, p2).``
  * guarded templates:  ``value(has_part, X, f1(X)) :- instance_of(X, cell).``
  * sufficient conditions:  ``instance_of(X, parent) :- value(has_child, X, Y).``
  * ``%`` starts a comment that runs to end of line.

Every rule must match exactly one of the supported template shapes; anything
else is a ``bad-template`` error.  Skolem function names are scoped per owner
class: the same index written under two unrelated classes denotes two distinct
functions, and the loader mangles the written name with the owner class to
keep them apart.  A name with no typing companion in its own class resolves
through the superclass chain, so a subclass can state equalities against (or
attach new values to) Skolem terms introduced by an ancestor.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import KBLoadError
from .model import (
    CONSTRAINT_KINDS,
    MAX_CONSTRAINT_BOUND,
    PREDICATES,
    Atom,
    AtomPattern,
    DescriptiveRule,
    OOKBDomain,
    PApply,
    SkolemId,
    SufficientCondition,
    Term,
    Var,
    apply_skolem,
    individual,
)

__all__ = [
    "SourceSpan",
    "ParseError",
    "parse_kb",
    "load_kb_files",
    "parse_atom",
    "parse_atoms",
    "render_atoms",
    "render_domain",
]


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseError:
    """One load-time problem. ``kind`` is one of syntax, arity,
    undeclared-symbol, bad-template, duplicate."""

    span: SourceSpan
    kind: str
    message: str

    def __str__(self):
        return f"{self.span}: {self.kind}: {self.message}"


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<impl>:-)
  | (?P<ident>[a-z_][A-Za-z0-9_]*)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<punct>[(),.\-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident | var | int | impl | ( | ) | , | . | -
    value: str
    span: SourceSpan


def _tokenize(text: str, filename: str) -> List[_Tok]:
    toks: List[_Tok] = []
    line, col, pos = 1, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(filename, line, col)
            raise KBLoadError([ParseError(span, "syntax", f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        value = m.group()
        span = SourceSpan(filename, line, col)
        if kind == "punct":
            toks.append(_Tok(value, value, span))
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, value, span))
        nl = value.count("\n")
        if nl:
            line += nl
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    toks.append(_Tok("eof", "", SourceSpan(filename, line, col)))
    return toks


# ---------------------------------------------------------------------------
# Raw syntax trees (before classification)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _RawTerm:
    kind: str  # ident | var | int | app
    name: str
    arg: Optional["_RawTerm"] = None
    span: SourceSpan = None


@dataclass(frozen=True)
class _RawAtom:
    neg: bool
    predicate: str
    args: Tuple[_RawTerm, ...]
    span: SourceSpan


@dataclass(frozen=True)
class _RawStatement:
    head: _RawAtom
    body: Tuple[_RawAtom, ...]
    span: SourceSpan


class _Reader:
    """Recursive-descent reader for statements; syntax errors abort."""

    def __init__(self, toks: List[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.next()
        if t.kind != kind:
            raise KBLoadError(
                [ParseError(t.span, "syntax", f"expected {kind!r}, found {t.value!r}")]
            )
        return t

    def statements(self) -> List[_RawStatement]:
        out = []
        while self.peek().kind != "eof":
            out.append(self.statement())
        return out

    def statement(self) -> _RawStatement:
        head = self.literal()
        body: Tuple[_RawAtom, ...] = ()
        if self.peek().kind == "impl":
            self.next()
            items = [self.literal()]
            while self.peek().kind == ",":
                self.next()
                items.append(self.literal())
            body = tuple(items)
        self.expect(".")
        return _RawStatement(head, body, head.span)

    def literal(self) -> _RawAtom:
        neg = False
        if self.peek().kind == "-":
            neg = True
            self.next()
        name = self.expect("ident")
        self.expect("(")
        args = [self.term()]
        while self.peek().kind == ",":
            self.next()
            args.append(self.term())
        self.expect(")")
        return _RawAtom(neg, name.value, tuple(args), name.span)

    def term(self) -> _RawTerm:
        t = self.next()
        if t.kind == "int":
            return _RawTerm("int", t.value, span=t.span)
        if t.kind == "var":
            return _RawTerm("var", t.value, span=t.span)
        if t.kind != "ident":
            raise KBLoadError([ParseError(t.span, "syntax", f"expected a term, found {t.value!r}")])
        if self.peek().kind == "(":
            self.next()
            arg = self.term()
            close = self.next()
            if close.kind == ",":
                raise KBLoadError(
                    [ParseError(close.span, "arity", "Skolem functions are unary")]
                )
            if close.kind != ")":
                raise KBLoadError([ParseError(close.span, "syntax", "expected ')'")])
            return _RawTerm("app", t.value, arg, span=t.span)
        return _RawTerm("ident", t.value, span=t.span)


def _read_statements(text: str, filename: str) -> List[_RawStatement]:
    return _Reader(_tokenize(text, filename)).statements()


# ---------------------------------------------------------------------------
# Ground atoms (answer-set surface syntax)
# ---------------------------------------------------------------------------


def _ground_term(raw: _RawTerm, errors: List[ParseError]) -> Optional[Term]:
    if raw.kind == "ident":
        return individual(raw.name)
    if raw.kind == "app":
        arg = _ground_term(raw.arg, errors)
        if arg is None:
            return None
        return apply_skolem(SkolemId(raw.name), arg)
    errors.append(ParseError(raw.span, "syntax", f"expected a ground term, found {raw.name!r}"))
    return None


def _typed_ground_atom(raw: _RawAtom, errors: List[ParseError]) -> Optional[Atom]:
    sig = PREDICATES.get(raw.predicate)
    if sig is None:
        errors.append(ParseError(raw.span, "syntax", f"unknown predicate {raw.predicate!r}"))
        return None
    if len(raw.args) != len(sig):
        errors.append(
            ParseError(
                raw.span,
                "arity",
                f"{raw.predicate} takes {len(sig)} arguments, got {len(raw.args)}",
            )
        )
        return None
    if raw.neg and raw.predicate != "instance_of":
        errors.append(
            ParseError(raw.span, "syntax", "classical negation is only supported on instance_of")
        )
        return None
    args: List[object] = []
    for kind, a in zip(sig, raw.args):
        if kind == "term":
            t = _ground_term(a, errors)
            if t is None:
                return None
            args.append(t)
        elif kind == "ident":
            if a.kind != "ident":
                errors.append(
                    ParseError(a.span, "syntax", f"expected an identifier, found {a.name!r}")
                )
                return None
            args.append(a.name)
        elif kind == "ckind":
            if a.kind != "ident" or a.name not in CONSTRAINT_KINDS:
                errors.append(
                    ParseError(a.span, "syntax", "constraint kind must be min, max or exact")
                )
                return None
            args.append(a.name)
        else:  # int
            if a.kind != "int":
                errors.append(ParseError(a.span, "syntax", "expected an integer bound"))
                return None
            n = int(a.name)
            if n > MAX_CONSTRAINT_BOUND:
                errors.append(
                    ParseError(a.span, "bad-template", f"bound exceeds {MAX_CONSTRAINT_BOUND}")
                )
                return None
            args.append(n)
    return Atom(raw.predicate, tuple(args), raw.neg)


def parse_atom(text: str, filename: str = "<atom>") -> Atom:
    """Parse a single ground atom in surface syntax."""
    toks = _tokenize(text, filename)
    reader = _Reader(toks)
    raw = reader.literal()
    tail = reader.next()
    if tail.kind == ".":
        tail = reader.next()
    if tail.kind != "eof":
        raise KBLoadError([ParseError(tail.span, "syntax", "trailing input after atom")])
    errors: List[ParseError] = []
    a = _typed_ground_atom(raw, errors)
    if errors:
        raise KBLoadError(errors)
    return a


def parse_atoms(text: str, filename: str = "<atoms>") -> List[Atom]:
    """Parse a sequence of ground atom facts (``p(a, b).`` per statement)."""
    out: List[Atom] = []
    errors: List[ParseError] = []
    for st in _read_statements(text, filename):
        if st.body:
            errors.append(ParseError(st.span, "syntax", "expected a ground fact, found a rule"))
            continue
        a = _typed_ground_atom(st.head, errors)
        if a is not None:
            out.append(a)
    if errors:
        raise KBLoadError(errors)
    return out


# ---------------------------------------------------------------------------
# Domain building
# ---------------------------------------------------------------------------

_FACT_PREDICATES = (
    "class",
    "individual",
    "relation",
    "subclass_of",
    "disjoint",
    "instance_of",
    "domain",
    "range",
    "subrelation_of",
    "compose",
    "inverse",
    "value",
    "eq",
    "neq",
    "constraint",
)

_VAR_NAMES = ("X", "Y", "Z", "U", "V", "W")


def _var_name(i: int) -> str:
    return _VAR_NAMES[i] if i < len(_VAR_NAMES) else f"V{i}"


class _Builder:
    def __init__(self, statements: Sequence[_RawStatement], implicit_decl: bool):
        self.statements = statements
        self.implicit = implicit_decl
        self.errors: List[ParseError] = []
        self.classes: Dict[str, SourceSpan] = {}
        self.individuals: Dict[str, SourceSpan] = {}
        self.relations: Dict[str, SourceSpan] = {}
        self.facts: Dict[str, set] = {p: set() for p in _FACT_PREDICATES}
        # (owner, source) -> SkolemId for companion-typed skolems;
        # fresh-by-use skolems are added as they are resolved.
        self.primary: Dict[Tuple[str, str], SkolemId] = {}
        self.declared: Dict[Tuple[str, str], SkolemId] = {}
        self.descriptive: List[DescriptiveRule] = []
        self.equality: List[DescriptiveRule] = []
        self.constraints: List[DescriptiveRule] = []
        self.sufficient: List[SufficientCondition] = []

    # -- helpers ------------------------------------------------------------

    def error(self, span: SourceSpan, kind: str, message: str):
        self.errors.append(ParseError(span, kind, message))

    def declare(self, table: Dict[str, SourceSpan], name: str, span: SourceSpan):
        table.setdefault(name, span)

    def check_reserved(self, name: str, span: SourceSpan) -> bool:
        if name.startswith("_"):
            self.error(span, "syntax", f"identifier {name!r} is reserved")
            return False
        return True

    def require(self, table: Dict[str, SourceSpan], name: str, span: SourceSpan, what: str):
        if name in table:
            return
        if self.implicit:
            table[name] = span
        else:
            self.error(span, "undeclared-symbol", f"{what} {name!r} is not declared")

    def require_class(self, name, span):
        self.require(self.classes, name, span, "class")

    def require_relation(self, name, span):
        self.require(self.relations, name, span, "relation")

    def require_individual(self, name, span):
        self.require(self.individuals, name, span, "individual")

    # -- phase 1: declarations ----------------------------------------------

    def collect_declarations(self):
        for st in self.statements:
            for lit in (st.head,) + st.body:
                for raw in lit.args:
                    t = raw
                    while t is not None:
                        if t.kind in ("ident", "app", "var"):
                            self.check_reserved(t.name, t.span or st.span)
                        t = t.arg
            if st.body:
                continue
            h = st.head
            if h.predicate == "class" and len(h.args) == 1 and h.args[0].kind == "ident":
                self.declare(self.classes, h.args[0].name, h.span)
            elif h.predicate == "relation" and len(h.args) == 1 and h.args[0].kind == "ident":
                self.declare(self.relations, h.args[0].name, h.span)
            elif h.predicate == "individual" and len(h.args) == 1 and h.args[0].kind == "ident":
                self.declare(self.individuals, h.args[0].name, h.span)

    def check_duplicates(self):
        for name in set(self.classes) & set(self.relations):
            self.error(self.relations[name], "duplicate", f"{name!r} declared as class and relation")
        for name in set(self.classes) & set(self.individuals):
            self.error(
                self.individuals[name], "duplicate", f"{name!r} declared as class and individual"
            )
        for name in set(self.relations) & set(self.individuals):
            self.error(
                self.individuals[name], "duplicate", f"{name!r} declared as relation and individual"
            )

    # -- phase 2: facts -----------------------------------------------------

    def add_fact(self, raw: _RawAtom):
        a = _typed_ground_atom(raw, self.errors)
        if a is None:
            return
        if a.neg:
            self.error(raw.span, "syntax", "negated facts are not part of the input language")
            return
        p = a.predicate
        if p not in _FACT_PREDICATES:
            self.error(raw.span, "syntax", f"{p} atoms cannot be asserted as facts")
            return
        span = raw.span
        if p == "subclass_of" or p == "disjoint":
            self.require_class(a.args[0], span)
            self.require_class(a.args[1], span)
        elif p == "instance_of":
            self.require_individual(a.args[0].root().name, span)
            self.require_class(a.args[1], span)
        elif p in ("domain", "range"):
            self.require_relation(a.args[0], span)
            self.require_class(a.args[1], span)
        elif p in ("subrelation_of", "inverse"):
            self.require_relation(a.args[0], span)
            self.require_relation(a.args[1], span)
        elif p == "compose":
            for r in a.args:
                self.require_relation(r, span)
        elif p == "value":
            self.require_relation(a.args[0], span)
            self.require_individual(a.args[1].root().name, span)
            self.require_individual(a.args[2].root().name, span)
        elif p in ("eq", "neq"):
            self.require_individual(a.args[0].root().name, span)
            self.require_individual(a.args[1].root().name, span)
        elif p == "constraint":
            self.require_individual(a.args[1].root().name, span)
            self.require_relation(a.args[2], span)
            self.require_class(a.args[3], span)
        if p == "class" or p == "relation":
            self.facts[p].add(a.args[0])
        elif p == "individual":
            if a.args[0].fn is not None:
                self.error(span, "syntax", "individual declarations take a constant")
            else:
                self.facts[p].add(a.args[0].name)
        else:
            self.facts[p].add(a.args)

    # -- phase 3: rules -----------------------------------------------------

    def superclasses(self) -> Dict[str, set]:
        up: Dict[str, set] = {}
        for sub, sup in self.facts["subclass_of"]:
            up.setdefault(sub, set()).add(sup)
        changed = True
        while changed:
            changed = False
            for c in list(up):
                extra = set()
                for s in up[c]:
                    extra |= up.get(s, set())
                if not extra <= up[c]:
                    up[c] |= extra
                    changed = True
        return up

    def resolve_skolem(
        self, source: str, owner: str, span: SourceSpan, ancestors: Dict[str, set]
    ) -> SkolemId:
        """Resolve a written Skolem name under its owner class.

        A companion declaration in the owner wins; otherwise a unique
        companion declaration in an ancestor is inherited; otherwise the name
        is a fresh function of the owner.
        """
        key = (owner, source)
        if key in self.primary:
            return self.primary[key]
        if key in self.declared:
            return self.declared[key]
        found = [
            self.primary[(a, source)]
            for a in sorted(ancestors.get(owner, ()))
            if (a, source) in self.primary
        ]
        if len(found) == 1:
            return found[0]
        if len(found) > 1:
            names = ", ".join(sorted(s.owner for s in found))
            self.error(
                span,
                "undeclared-symbol",
                f"Skolem {source!r} under {owner!r} is inherited from several classes: {names}",
            )
            return found[0]
        sk = SkolemId(f"{source}_{owner}", source=source, owner=owner)
        self.declared[key] = sk
        return sk

    def collect_companions(self, rules: List[Tuple[_RawStatement, str]]):
        """Register companion-typed skolems before any name resolution."""
        for st, owner in rules:
            h = st.head
            if h.predicate != "instance_of" or h.neg:
                continue
            t = h.args[0]
            if t.kind != "app":
                continue
            if t.arg.kind != "var":
                self.error(h.span, "bad-template", "instance_of companions type a term f(X)")
                continue
            key = (owner, t.name)
            if key not in self.primary:
                self.primary[key] = SkolemId(f"{t.name}_{owner}", source=t.name, owner=owner)

    def pattern_term(
        self,
        raw: _RawTerm,
        owner: str,
        guard: Optional[str],
        ancestors: Dict[str, set],
        vars_seen: Dict[str, Var],
    ) -> Optional[object]:
        if raw.kind == "var":
            if guard is not None and raw.name != guard:
                self.error(raw.span, "bad-template", f"free variable {raw.name}")
                return None
            v = vars_seen.get(raw.name)
            if v is None:
                v = Var(_var_name(len(vars_seen)))
                vars_seen[raw.name] = v
            return v
        if raw.kind == "app":
            arg = self.pattern_term(raw.arg, owner, guard, ancestors, vars_seen)
            if arg is None:
                return None
            sk = self.resolve_skolem(raw.name, owner, raw.span, ancestors)
            return PApply(sk, arg)
        self.error(raw.span, "bad-template", "term positions in rules hold X or Skolem terms of X")
        return None

    def pattern_atom(
        self,
        raw: _RawAtom,
        owner: str,
        guard: Optional[str],
        ancestors: Dict[str, set],
        vars_seen: Dict[str, Var],
    ) -> Optional[AtomPattern]:
        sig = PREDICATES.get(raw.predicate)
        if sig is None:
            self.error(raw.span, "syntax", f"unknown predicate {raw.predicate!r}")
            return None
        if len(raw.args) != len(sig):
            self.error(
                raw.span,
                "arity",
                f"{raw.predicate} takes {len(sig)} arguments, got {len(raw.args)}",
            )
            return None
        args: List[object] = []
        for kind, a in zip(sig, raw.args):
            if kind == "term":
                p = self.pattern_term(a, owner, guard, ancestors, vars_seen)
                if p is None:
                    return None
                args.append(p)
            elif kind == "ident":
                if a.kind != "ident":
                    self.error(a.span, "bad-template", "expected an identifier")
                    return None
                args.append(a.name)
            elif kind == "ckind":
                if a.kind != "ident" or a.name not in CONSTRAINT_KINDS:
                    self.error(a.span, "syntax", "constraint kind must be min, max or exact")
                    return None
                args.append(a.name)
            else:
                if a.kind != "int":
                    self.error(a.span, "syntax", "expected an integer bound")
                    return None
                n = int(a.name)
                if n > MAX_CONSTRAINT_BOUND:
                    self.error(a.span, "bad-template", f"bound exceeds {MAX_CONSTRAINT_BOUND}")
                    return None
                args.append(n)
        return AtomPattern(raw.predicate, tuple(args))

    def guard_of(self, st: _RawStatement) -> Optional[Tuple[str, str]]:
        """(variable, class) when the body is a single instance_of guard."""
        if len(st.body) != 1:
            return None
        b = st.body[0]
        if b.predicate != "instance_of" or b.neg or len(b.args) != 2:
            return None
        if b.args[0].kind != "var" or b.args[1].kind != "ident":
            return None
        return (b.args[0].name, b.args[1].name)

    def add_template(self, st: _RawStatement, guard_var: str, owner: str, ancestors):
        h = st.head
        self.require_class(owner, st.span)
        vars_seen = {guard_var: Var("X")}
        if h.neg:
            self.error(h.span, "bad-template", "rule heads are positive")
            return
        if h.predicate == "value":
            pat = self.pattern_atom(h, owner, guard_var, ancestors, vars_seen)
            if pat is None:
                return
            self.require_relation(pat.args[0], h.span)
            src, tgt = pat.args[1], pat.args[2]
            shape_ok = (
                isinstance(src, Var)
                and isinstance(tgt, PApply)
                and tgt.depth == 1
            ) or (
                isinstance(src, PApply)
                and isinstance(tgt, PApply)
                and src.depth == 1
                and tgt.depth == 1
                and src.fn != tgt.fn
            )
            if not shape_ok:
                self.error(
                    h.span,
                    "bad-template",
                    "value heads are value(r, X, g(X)) or value(r, f(X), g(X)) with f != g",
                )
                return
            for sk in pat.skolems():
                if (sk.owner, sk.source) not in self.primary:
                    self.error(
                        h.span,
                        "bad-template",
                        f"Skolem {sk.source!r} in a value head has no instance_of companion",
                    )
                    return
            self.descriptive.append(DescriptiveRule(owner, "value", pat))
        elif h.predicate == "instance_of" and h.args and h.args[0].kind == "app":
            pat = self.pattern_atom(h, owner, guard_var, ancestors, vars_seen)
            if pat is None:
                return
            src = pat.args[0]
            if not (isinstance(src, PApply) and src.depth == 1):
                self.error(h.span, "bad-template", "instance_of companions type a term f(X)")
                return
            self.require_class(pat.args[1], h.span)
            self.descriptive.append(DescriptiveRule(owner, "member", pat))
        elif h.predicate in ("eq", "neq"):
            pat = self.pattern_atom(h, owner, guard_var, ancestors, vars_seen)
            if pat is None:
                return
            self.equality.append(DescriptiveRule(owner, h.predicate, pat))
        elif h.predicate == "constraint":
            pat = self.pattern_atom(h, owner, guard_var, ancestors, vars_seen)
            if pat is None:
                return
            t = pat.args[1]
            if isinstance(t, PApply) and t.depth != 1:
                self.error(h.span, "bad-template", "constraint terms are X or f(X)")
                return
            self.require_relation(pat.args[2], h.span)
            self.require_class(pat.args[3], h.span)
            self.constraints.append(DescriptiveRule(owner, "constraint", pat))
        else:
            self.error(h.span, "bad-template", f"{h.predicate} heads do not match any template")

    def add_sufficient(self, st: _RawStatement, ancestors):
        h = st.head
        if h.neg or h.predicate != "instance_of" or h.args[0].kind != "var":
            self.error(h.span, "bad-template", f"{h.predicate} heads do not match any template")
            return
        if h.args[1].kind != "ident":
            self.error(h.span, "bad-template", "expected a class name")
            return
        target = h.args[1].name
        self.require_class(target, h.span)
        head_raw_var = h.args[0].name
        vars_seen: Dict[str, Var] = {head_raw_var: Var("X")}
        body: List[AtomPattern] = []
        for lit in st.body:
            if lit.neg:
                self.error(lit.span, "bad-template", "sufficient-condition bodies are positive")
                return
            if lit.predicate not in ("value", "instance_of", "constraint"):
                self.error(
                    lit.span,
                    "bad-template",
                    "sufficient-condition bodies hold value, instance_of and constraint literals",
                )
                return
            pat = self.pattern_atom(lit, target, None, ancestors, vars_seen)
            if pat is None:
                return
            if lit.predicate == "value":
                self.require_relation(pat.args[0], lit.span)
            elif lit.predicate == "instance_of":
                self.require_class(pat.args[1], lit.span)
            else:
                self.require_relation(pat.args[2], lit.span)
                self.require_class(pat.args[3], lit.span)
            body.append(pat)
        head_var = vars_seen[head_raw_var]
        bound = set()
        for pat in body:
            bound.update(pat.variables())
        if head_var not in bound:
            self.error(h.span, "bad-template", f"free variable {head_raw_var}")
            return
        self.sufficient.append(SufficientCondition(target, head_var, tuple(body)))

    def check_skolem_collisions(self):
        seen: Dict[str, Tuple[str, str]] = {}
        for key, sk in sorted({**self.primary, **self.declared}.items()):
            prior = seen.get(sk.name)
            if prior is not None and prior != key:
                span = SourceSpan("<kb>", 1, 1)
                self.error(
                    span,
                    "duplicate",
                    f"Skolem functions {prior[1]!r} of {prior[0]!r} and {key[1]!r} of "
                    f"{key[0]!r} collide on the mangled name {sk.name!r}",
                )
            else:
                seen[sk.name] = key

    # -- driver ---------------------------------------------------------------

    def build(self) -> OOKBDomain:
        self.collect_declarations()
        for st in self.statements:
            if not st.body:
                self.add_fact(st.head)
        self.check_duplicates()
        ancestors = self.superclasses()
        rules = []
        for st in self.statements:
            if not st.body:
                continue
            guard = self.guard_of(st)
            if guard is not None and st.head.predicate == "instance_of" and st.head.args[0].kind == "app":
                rules.append((st, guard[1]))
        self.collect_companions(rules)
        for st in self.statements:
            if not st.body:
                continue
            guard = self.guard_of(st)
            if (
                guard is not None
                and not (st.head.predicate == "instance_of" and st.head.args[0].kind == "var")
            ):
                self.add_template(st, guard[0], guard[1], ancestors)
            else:
                self.add_sufficient(st, ancestors)
        self.check_skolem_collisions()
        if self.errors:
            raise KBLoadError(self.errors)
        return OOKBDomain.build(
            classes=self.classes,
            individuals=self.individuals,
            relations=self.relations,
            subclass_facts=self.facts["subclass_of"],
            disjoint_facts=self.facts["disjoint"],
            instance_facts=self.facts["instance_of"],
            domain_facts=self.facts["domain"],
            range_facts=self.facts["range"],
            subrelation_facts=self.facts["subrelation_of"],
            compose_facts=self.facts["compose"],
            inverse_facts=self.facts["inverse"],
            value_facts=self.facts["value"],
            eq_facts=self.facts["eq"],
            neq_facts=self.facts["neq"],
            constraint_facts=self.facts["constraint"],
            descriptive_rules=self.descriptive,
            equality_rules=self.equality,
            constraint_rules=self.constraints,
            sufficient_conditions=self.sufficient,
        )


def parse_kb(text: str, filename: str = "<kb>", implicit_decl: bool = False) -> OOKBDomain:
    """Parse a knowledge base from text.

    Raises :class:`KBLoadError` carrying the batch of problems found.  With
    ``implicit_decl`` set, referenced-but-undeclared symbols are declared on
    first use instead of reported.
    """
    return _Builder(_read_statements(text, filename), implicit_decl).build()


def load_kb_files(paths: Iterable[str], implicit_decl: bool = False) -> OOKBDomain:
    """Load and merge several KB files into a single domain.

    The files are concatenated before resolution, so a later file may attach
    rules to classes declared in an earlier one.
    """
    statements: List[_RawStatement] = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            statements.extend(_read_statements(fh.read(), str(path)))
    return _Builder(statements, implicit_decl).build()


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def render_atoms(atoms: Iterable[Atom], fmt: str = "text") -> str:
    """Serialise atoms deterministically (deduplicated, sorted) as text or JSON."""
    ordered = sorted(set(atoms), key=lambda a: a.sort_key())
    if fmt == "text":
        return "".join(f"{a.text}.\n" for a in ordered)
    if fmt == "json":
        payload = [
            {
                "predicate": a.predicate,
                "args": [x.text if isinstance(x, Term) else str(x) for x in a.args],
                "neg": a.neg,
            }
            for a in ordered
        ]
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _render_pattern(p) -> str:
    if isinstance(p, Var):
        return p.name
    if isinstance(p, PApply):
        return f"{p.fn.source}({_render_pattern(p.arg)})"
    return str(p)


def _render_template(rule: DescriptiveRule) -> str:
    args = ", ".join(_render_pattern(a) for a in rule.head.args)
    return f"{rule.head.predicate}({args}) :- instance_of(X, {rule.owner})."


def _render_sufficient(sc: SufficientCondition) -> str:
    body = ", ".join(
        f"{p.predicate}({', '.join(_render_pattern(a) for a in p.args)})" for p in sc.body
    )
    return f"instance_of({sc.head_var.name}, {sc.target}) :- {body}."


def render_domain(domain: OOKBDomain) -> str:
    """Write a domain back to KB surface syntax; parse_kb round-trips it."""
    lines: List[str] = []

    def block(title: str, items: List[str]):
        if items:
            lines.append(f"% {title}")
            lines.extend(items)
            lines.append("")

    block("declarations", [f"class({c})." for c in domain.classes]
          + [f"individual({i})." for i in domain.individuals]
          + [f"relation({r})." for r in domain.relations])
    block("taxonomy", [f"subclass_of({a}, {b})." for a, b in domain.subclass_facts]
          + [f"disjoint({a}, {b})." for a, b in domain.disjoint_facts]
          + [f"instance_of({t.text}, {c})." for t, c in domain.instance_facts])
    block("relation structure", [f"domain({r}, {c})." for r, c in domain.domain_facts]
          + [f"range({r}, {c})." for r, c in domain.range_facts]
          + [f"subrelation_of({a}, {b})." for a, b in domain.subrelation_facts]
          + [f"compose({a}, {b}, {c})." for a, b, c in domain.compose_facts]
          + [f"inverse({a}, {b})." for a, b in domain.inverse_facts])
    block("ground facts", [f"value({r}, {x.text}, {y.text})." for r, x, y in domain.value_facts]
          + [f"eq({x.text}, {y.text})." for x, y in domain.eq_facts]
          + [f"neq({x.text}, {y.text})." for x, y in domain.neq_facts]
          + [f"constraint({k}, {t.text}, {r}, {d}, {n})."
             for k, t, r, d, n in domain.constraint_facts])
    owners = sorted(
        {r.owner for r in domain.descriptive_rules + domain.equality_rules + domain.constraint_rules}
    )
    for owner in owners:
        rules = [r for r in domain.descriptive_rules if r.owner == owner]
        rules += [r for r in domain.equality_rules if r.owner == owner]
        rules += [r for r in domain.constraint_rules if r.owner == owner]
        block(f"class {owner}", [_render_template(r) for r in rules])
    block("sufficient conditions", [_render_sufficient(sc) for sc in domain.sufficient_conditions])
    return "\n".join(lines).rstrip("\n") + "\n" if lines else ""
