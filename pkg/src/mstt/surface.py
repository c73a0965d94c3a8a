"""Text syntax: lexer, recursive-descent parser and pretty printer.

Grammar sketch (ASCII spellings)::

    program  := { "def" NAME ["@" MODE] [":" type] "=" term }
    type     := prod ["->" type]
    prod     := tapp { "*" tapp }
    tapp     := EXT { tatom } | tatom
    tatom    := "Nat" | "Bool" | "<" modality "|" type ">" | "(" type ")" | EXT
    modality := matom { "o" matom }          -- right nested
    matom    := NAME | "1" | "(" modality ")"
    term     := "lam" "[" [modality "|"] NAME ":" type "]" term
              | "let" ["<" modality ">"] "mod" "<" modality ">" NAME "<-" term "in" term
              | "mod" "<" modality ">" term
              | BINDER "[" NAME ":" type "]" term
              | app
    app      := atom { "." atom | "." "<" modality ">" atom }

Later definitions may mention earlier ones by name; such references are
inlined unless a binder of the same name is in scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, TypeCheckError
from .mode_theory import ID_CELL, UNIT, Atom, Compose, ModalityExpr, Unit, render_modality
from .presheaf import render_host
from .syntax import (
    Ann,
    App,
    Arrow,
    Bool,
    BoolTy,
    FalseTm,
    Fst,
    If,
    Lam,
    Lit,
    Modal,
    ModElim,
    ModIntro,
    Nat,
    NatElim,
    NatTy,
    Pair,
    Plus,
    Prod,
    Snd,
    Suc,
    TmExpr,
    TmExt,
    TrueTm,
    TyExpr,
    TyExt,
    Var,
    render_ty,
)

NAME_RE = r"[A-Za-z0-9_][A-Za-z0-9_']*(?:-[A-Za-z0-9_']+)*"
TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<comment>--[^\n]*)|(?P<name>" + NAME_RE + r")|(?P<sym>->|<-|[.<>|()\[\],:=@*])"
)
KEYWORDS = {
    "def", "lam", "let", "mod", "in", "var", "if", "fst", "snd", "nat-elim",
    "suc", "plus", "true", "false", "Nat", "Bool",
}


@dataclass(frozen=True)
class Token:
    kind: str  # name | num | sym | eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        s = m.group()
        if kind == "name":
            out.append(Token("num" if s.isdigit() else "name", s, line, pos - line_start + 1))
        elif kind == "sym":
            out.append(Token("sym", s, line, pos - line_start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass(frozen=True)
class Definition:
    name: str
    mode: str
    term: TmExpr
    annotation: TyExpr | None = None


@dataclass
class SourceProgram:
    defs: list = field(default_factory=list)

    def names(self) -> list:
        return [d.name for d in self.defs]

    def lookup(self, name: str) -> Definition:
        for d in self.defs:
            if d.name == name:
                return d
        raise KeyError(name)


class Parser:
    def __init__(self, text: str, checker):
        self.toks = tokenize(text)
        self.i = 0
        self.checker = checker
        self.defs: dict = {}
        self.scope: list = []

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        return ParseError(f"{msg} (found {found!r})", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("sym", "name")

    def eat(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self) -> str:
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS:
            raise self.error("expected a name")
        self.i += 1
        return t.text

    # -- program -------------------------------------------------------------

    def program(self) -> SourceProgram:
        prog = SourceProgram()
        while self.tok.kind != "eof":
            self.eat("def")
            start = self.tok
            name = self.name()
            if name in self.defs:
                raise self.error(f"duplicate definition {name!r}", start)
            mode = self.checker.default_mode
            if self.at("@"):
                self.eat("@")
                mtok = self.tok
                mode = self.name()
                if mode not in self.checker.mt.modes:
                    raise self.error(f"unknown mode {mode!r}", mtok)
            ann = None
            if self.at(":"):
                self.eat(":")
                ann = self.ty()
            self.eat("=")
            body = self.term()
            if ann is not None:
                body = Ann(body, ann)
            d = Definition(name, mode, body, ann)
            self.defs[name] = d
            prog.defs.append(d)
        return prog

    # -- modalities ----------------------------------------------------------

    def modality(self) -> ModalityExpr:
        first = self.matom()
        if self.at("o"):
            self.eat("o")
            return Compose(first, self.modality())
        return first

    def matom(self) -> ModalityExpr:
        if self.at("("):
            self.eat("(")
            mu = self.modality()
            self.eat(")")
            return mu
        if self.tok.kind == "num" and self.tok.text == "1":
            self.i += 1
            return UNIT
        if self.tok.kind == "name" and self.tok.text != "o":
            name = self.tok.text
            self.i += 1
            return Atom(name)
        raise self.error("expected a modality")

    # -- types ---------------------------------------------------------------

    def ty(self) -> TyExpr:
        left = self.prod_ty()
        if self.at("->"):
            self.eat("->")
            return Arrow(left, self.ty())
        return left

    def prod_ty(self) -> TyExpr:
        out = self.tapp()
        while self.at("*"):
            self.eat("*")
            out = Prod(out, self.tapp())
        return out

    def tapp(self) -> TyExpr:
        t = self.tok
        if t.kind == "name" and t.text in self.checker.ty_exts:
            self.i += 1
            arity = len(self.checker.ty_exts[t.text].arg_modes)
            return TyExt(t.text, tuple(self.tatom() for _ in range(arity)))
        return self.tatom()

    def tatom(self) -> TyExpr:
        t = self.tok
        if self.at("Nat"):
            self.i += 1
            return Nat
        if self.at("Bool"):
            self.i += 1
            return Bool
        if self.at("<"):
            self.eat("<")
            mu = self.modality()
            self.eat("|")
            inner = self.ty()
            self.eat(">")
            return Modal(mu, inner)
        if self.at("("):
            self.eat("(")
            inner = self.ty()
            self.eat(")")
            return inner
        if t.kind == "name" and t.text in self.checker.ty_exts:
            if self.checker.ty_exts[t.text].arg_modes:
                raise self.error(f"type {t.text} needs arguments; parenthesize it")
            self.i += 1
            return TyExt(t.text, ())
        raise self.error("expected a type")

    # -- terms ---------------------------------------------------------------

    def _bound(self, name, parse_body):
        self.scope.append(name)
        try:
            return parse_body()
        finally:
            self.scope.pop()

    def term(self) -> TmExpr:
        if self.at("lam"):
            self.eat("lam")
            self.eat("[")
            mu = None
            if not (self.tok.kind == "name" and self.peek().text == ":"):
                mu = self.modality()
                self.eat("|")
            x = self.name()
            self.eat(":")
            ty = self.ty()
            self.eat("]")
            body = self._bound(x, self.term)
            if mu is None:
                return Lam(x, ty, body)
            return Lam(x, Modal(mu, ty), ModElim(mu, x, Var(x, ID_CELL), body))
        if self.at("let"):
            self.eat("let")
            outer = UNIT
            if self.at("<"):
                self.eat("<")
                outer = self.modality()
                self.eat(">")
            self.eat("mod")
            mu = self.bracketed_modality()
            x = self.name()
            self.eat("<-")
            scrut = self.term()
            self.eat("in")
            body = self._bound(x, self.term)
            return ModElim(mu, x, scrut, body, outer)
        if self.at("mod"):
            self.eat("mod")
            mu = self.bracketed_modality()
            return ModIntro(mu, self.term())
        ext = self._ext_at()
        if ext is not None and ext.surface == "binder":
            code = self.tok.text
            self.i += 1
            self.eat("[")
            x = self.name()
            self.eat(":")
            ty = self.ty()
            self.eat("]")
            body = self._bound(x, self.term)
            return TmExt(code, (ty,), (body,), x)
        return self.app()

    def bracketed_modality(self) -> ModalityExpr:
        self.eat("<")
        mu = self.modality()
        self.eat(">")
        return mu

    def _ext_at(self):
        t = self.tok
        if t.kind == "name" and t.text in self.checker.tm_exts:
            ext = self.checker.tm_exts[t.text]
            if self.peek().text == ("<" if ext.surface == "macro" else "["):
                return ext
        return None

    def app(self) -> TmExpr:
        out = self.atom()
        while self.at("."):
            self.eat(".")
            if self.at("<"):
                mu = self.bracketed_modality()
                out = App(out, ModIntro(mu, self.atom()))
            else:
                out = App(out, self.atom())
        return out

    def atom(self) -> TmExpr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Lit(int(t.text))
        if self.at("("):
            self.eat("(")
            first = self.term()
            if self.at(","):
                self.eat(",")
                second = self.term()
                self.eat(")")
                return Pair(first, second)
            if self.at(":"):
                self.eat(":")
                ty = self.ty()
                self.eat(")")
                return Ann(first, ty)
            self.eat(")")
            return first
        if self.at("var"):
            self.eat("var")
            x = self.name()
            cell = self.tok
            if cell.kind not in ("name", "num"):
                raise self.error("expected a 2-cell name")
            self.i += 1
            return Var(x, cell.text)
        simple = {"suc": Suc, "plus": Plus, "true": TrueTm, "false": FalseTm}
        if t.kind == "name" and t.text in simple:
            self.i += 1
            return simple[t.text]()
        if self.at("fst") or self.at("snd"):
            self.i += 1
            self.eat("(")
            inner = self.term()
            self.eat(")")
            return Fst(inner) if t.text == "fst" else Snd(inner)
        if self.at("if"):
            self.eat("if")
            self.eat("(")
            c = self.term()
            self.eat(",")
            a = self.term()
            self.eat(",")
            b = self.term()
            self.eat(")")
            return If(c, a, b)
        if self.at("nat-elim"):
            self.eat("nat-elim")
            self.eat("(")
            z = self.term()
            self.eat(",")
            s = self.term()
            self.eat(")")
            return NatElim(z, s)
        ext = self._ext_at()
        if ext is not None:
            return self.ext_term(ext)
        if t.kind == "name" and t.text not in KEYWORDS:
            self.i += 1
            if t.text not in self.scope and t.text in self.defs:
                return self.defs[t.text].term
            return Var(t.text, ID_CELL)
        raise self.error("expected a term")

    def ext_term(self, ext) -> TmExpr:
        code = self.tok.text
        self.i += 1
        if ext.surface == "macro":
            mu = self.bracketed_modality()
            self.eat("[")
            tys = [self.ty()]
            while self.at(","):
                self.eat(",")
                tys.append(self.ty())
            self.eat("]")
            try:
                return ext.expand(mu, tys)
            except TypeCheckError as e:
                raise self.error(e.message) from None
        self.eat("[")
        if ext.surface == "types":
            tys = [self.ty()]
            while self.at(","):
                self.eat(",")
                tys.append(self.ty())
            self.eat("]")
            return TmExt(code, tuple(tys))
        if ext.surface == "op":
            t = self.tok
            op = self.name()
            self.eat("]")
            if op not in ext.ops:
                raise self.error(f"unknown operation {op!r} for {code}", t)
            return TmExt(code, data=ext.ops[op])
        if ext.surface == "literal":
            t = self.tok
            tycode = self.name()
            if tycode not in ext.ops:
                raise self.error(f"{code} does not support type {tycode!r}", t)
            self.eat(":")
            left = self.host()
            self.eat(",")
            right = self.host()
            self.eat("]")
            return TmExt(code, data=(tycode, left, right))
        raise self.error(f"extension {code} has no bracket syntax")

    def host(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return int(t.text)
        if self.at("("):
            self.eat("(")
            items = [self.host()]
            while self.at(","):
                self.eat(",")
                items.append(self.host())
            self.eat(")")
            return tuple(items)
        if self.at("true") or self.at("false"):
            self.i += 1
            return t.text == "true"
        if t.kind == "name":
            self.i += 1
            return t.text
        raise self.error("expected a host literal")


def parse(text: str, checker) -> SourceProgram:
    """Parse a whole file; raises ``ParseError`` with a position."""
    return Parser(text, checker).program()


def parse_term(text: str, checker) -> TmExpr:
    p = Parser(text, checker)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error("trailing input")
    return t


def parse_ty(text: str, checker) -> TyExpr:
    p = Parser(text, checker)
    t = p.ty()
    if p.tok.kind != "eof":
        raise p.error("trailing input")
    return t


def parse_modality(text: str, checker) -> ModalityExpr:
    p = Parser(text, checker)
    mu = p.modality()
    if p.tok.kind != "eof":
        raise p.error("trailing input")
    return mu


# ---------------------------------------------------------------------------
# Pretty printing

PREFIX, APP, ATOM = 0, 1, 2


def _is_modal_lam(t: Lam) -> bool:
    return (
        isinstance(t.ty, Modal)
        and isinstance(t.body, ModElim)
        and t.body.mu == t.ty.mu
        and t.body.name == t.name
        and t.body.tm == Var(t.name, ID_CELL)
        and isinstance(t.body.outer, Unit)
    )


def pretty_tm(t: TmExpr, checker, prec: int = PREFIX) -> str:
    def go(u, p=PREFIX):
        return pretty_tm(u, checker, p)

    def wrap(s, level):
        return f"({s})" if prec > level else s

    mod = render_modality
    if isinstance(t, Lam):
        if _is_modal_lam(t):
            head = f"lam[{mod(t.ty.mu)} | {t.name} : {render_ty(t.ty.ty)}] "
            return wrap(head + go(t.body.body), PREFIX)
        return wrap(f"lam[{t.name} : {render_ty(t.ty)}] " + go(t.body), PREFIX)
    if isinstance(t, ModElim):
        outer = "" if isinstance(t.outer, Unit) else f"<{mod(t.outer)}>"
        s = f"let{outer} mod<{mod(t.mu)}> {t.name} <- {go(t.tm)} in {go(t.body)}"
        return wrap(s, PREFIX)
    if isinstance(t, ModIntro):
        return wrap(f"mod<{mod(t.mu)}> {go(t.tm)}", PREFIX)
    if isinstance(t, App):
        fn = go(t.fn, APP)
        if isinstance(t.arg, ModIntro):
            return wrap(f"{fn} .<{mod(t.arg.mu)}> {go(t.arg.tm, ATOM)}", APP)
        return wrap(f"{fn} . {go(t.arg, ATOM)}", APP)
    if isinstance(t, Var):
        return t.name if t.cell == ID_CELL else f"var {t.name} {t.cell}"
    if isinstance(t, Ann):
        return f"({go(t.tm)} : {render_ty(t.ty)})"
    if isinstance(t, Lit):
        return str(t.n)
    if isinstance(t, Suc):
        return "suc"
    if isinstance(t, Plus):
        return "plus"
    if isinstance(t, TrueTm):
        return "true"
    if isinstance(t, FalseTm):
        return "false"
    if isinstance(t, NatElim):
        return f"nat-elim({go(t.zero)}, {go(t.step)})"
    if isinstance(t, If):
        return f"if({go(t.cond)}, {go(t.then)}, {go(t.orelse)})"
    if isinstance(t, Pair):
        return f"({go(t.fst)}, {go(t.snd)})"
    if isinstance(t, Fst):
        return f"fst({go(t.tm)})"
    if isinstance(t, Snd):
        return f"snd({go(t.tm)})"
    if isinstance(t, TmExt):
        return _pretty_ext(t, checker, go, wrap)
    raise TypeError(f"not a term: {t!r}")


def _pretty_ext(t: TmExt, checker, go, wrap) -> str:
    ext = checker.tm_exts.get(t.code) if checker is not None else None
    kind = ext.surface if ext is not None else "types"
    if kind == "binder":
        return wrap(f"{t.code}[{t.name} : {render_ty(t.tys[0])}] {go(t.args[0])}", PREFIX)
    if kind == "op":
        for name, payload in ext.ops.items():
            if payload == t.data:
                return f"{t.code}[{name}]"
        raise ValueError(f"operation of {t.code} has no surface name")
    if kind == "literal":
        tycode, left, right = t.data
        return f"{t.code}[{tycode}: {render_host(left)}, {render_host(right)}]"
    return f"{t.code}[{', '.join(render_ty(a) for a in t.tys)}]"


def pretty_def(d: Definition, checker) -> str:
    head = f"def {d.name}"
    if d.mode != checker.default_mode:
        head += f" @ {d.mode}"
    body = d.term
    if d.annotation is not None and isinstance(body, Ann) and body.ty == d.annotation:
        head += f" : {render_ty(d.annotation)}"
        body = body.tm
    return f"{head} =\n  {pretty_tm(body, checker)}\n"


def pretty_program(prog: SourceProgram, checker) -> str:
    return "\n".join(pretty_def(d, checker) for d in prog.defs)
