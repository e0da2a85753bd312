"""Input documents: one ring declaration plus named modules.

Example::

    ring: vars x,y; order dp; ideal x^2+y^2;
    module M = [[x,y],[y,-x]];
    module p = ideal(x, y);
    stages aclass, kskernel, lclass;

Statements end with ';'.  Orders are lp, dp or wp(w1,...); the local
order ds is refused: for the quasi-homogeneous inputs this tool is
built for, the affine computation with a global order already decides
the local and complete-local questions, so use dp or lp.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .algebra import MonomialOrder, PolyRing
from .groebner import PolyMatrix, QuotientRing
from .modules import PresentedModule, free_module, ideal_module, present
from .polyparse import (
    ParseError,
    PolynomialParser,
    Token,
    TokenStream,
    parse_matrix_rows,
    tokenize,
)

STAGE_NAMES = ("der", "aclass", "kskernel", "lclass")

DS_MESSAGE = (
    "the local ordering 'ds' is not supported: for quasi-homogeneous "
    "affine input the global-order verdicts already agree with the "
    "local and complete-local ones; use dp or lp"
)


@dataclass
class InputDocument:
    ring: QuotientRing
    modules: List[Tuple[str, PresentedModule]]
    stages: Optional[List[str]] = None
    output_path: Optional[str] = None
    ideal_texts: List[str] = field(default_factory=list)


def parse_input(text: str) -> InputDocument:
    """Parse and build the document; errors carry (line, column)."""
    stream = TokenStream(tokenize(text))
    varnames: Optional[List[str]] = None
    order: Optional[MonomialOrder] = None
    ideal_decls: List[Tuple[str, Token]] = []
    module_decls = []
    stages: Optional[List[str]] = None
    output_path: Optional[str] = None
    seen_names = set()

    def expect_keyword(tok: Token, *options: str):
        raise ParseError("syntax error", tok.line, tok.column,
                         options, tok.text or "end of input")

    def need_ring(tok: Token) -> Tuple[PolyRing, "PolynomialParser"]:
        if varnames is None:
            raise ParseError("ring variables must be declared first",
                             tok.line, tok.column, ("vars",), tok.text)
        ring = PolyRing(varnames, order or MonomialOrder.degrevlex())
        return ring, PolynomialParser(ring)

    while True:
        tok = stream.peek()
        if tok.kind == "END":
            break
        if tok.kind != "IDENT":
            expect_keyword(tok, "ring", "vars", "order", "ideal", "module",
                           "stages", "output")
        word = tok.text
        stream.next()
        if word == "ring":
            stream.expect_op(":")
            continue
        if word == "vars":
            if varnames is not None:
                raise ParseError("duplicate vars declaration",
                                 tok.line, tok.column)
            names = [stream.expect("IDENT", "variable name")]
            while stream.accept_op(","):
                names.append(stream.expect("IDENT", "variable name"))
            seen = set()
            for t in names:
                if t.text in seen:
                    raise ParseError("duplicate variable name",
                                     t.line, t.column, ("fresh name",), t.text)
                seen.add(t.text)
            varnames = [t.text for t in names]
        elif word == "order":
            name_tok = stream.expect("IDENT", "order name (lp, dp, wp)")
            if name_tok.text == "ds":
                raise ParseError(DS_MESSAGE, name_tok.line, name_tok.column,
                                 ("lp", "dp", "wp"), "ds")
            if name_tok.text not in ("lp", "dp", "wp"):
                raise ParseError("unsupported order", name_tok.line,
                                 name_tok.column, ("lp", "dp", "wp"),
                                 name_tok.text)
            weights = None
            if name_tok.text == "wp":
                stream.expect_op("(")
                weights = [int(stream.expect("NUM", "weight").text)]
                while stream.accept_op(","):
                    weights.append(int(stream.expect("NUM", "weight").text))
                stream.expect_op(")")
            order = MonomialOrder.from_name(name_tok.text, weights)
        elif word == "ideal":
            ring, parser = need_ring(tok)
            ideal_decls.append(parser.parse(stream))
            while stream.accept_op(","):
                ideal_decls.append(parser.parse(stream))
        elif word == "module":
            name_tok = stream.expect("IDENT", "module name")
            if name_tok.text in seen_names:
                raise ParseError("duplicate module name", name_tok.line,
                                 name_tok.column, ("fresh name",),
                                 name_tok.text)
            seen_names.add(name_tok.text)
            stream.expect_op("=")
            ring, parser = need_ring(tok)
            nxt = stream.peek()
            if nxt.kind == "IDENT" and nxt.text == "ideal":
                stream.next()
                stream.expect_op("(")
                gens = [parser.parse(stream)]
                while stream.accept_op(","):
                    gens.append(parser.parse(stream))
                stream.expect_op(")")
                module_decls.append((name_tok.text, "ideal", gens))
            elif nxt.kind == "IDENT" and nxt.text == "free":
                stream.next()
                stream.expect_op("(")
                rank_tok = stream.expect("NUM", "rank")
                stream.expect_op(")")
                rank = int(rank_tok.text)
                if rank < 1:
                    raise ParseError("free rank must be positive",
                                     rank_tok.line, rank_tok.column)
                module_decls.append((name_tok.text, "free", rank))
            elif nxt.kind == "OP" and nxt.text == "[":
                rows = parse_matrix_rows(stream, ring)
                module_decls.append((name_tok.text, "matrix", rows))
            else:
                expect_keyword(nxt, "ideal(...)", "free(rank)", "[[...]] matrix")
        elif word == "stages":
            names = [stream.expect("IDENT", "stage name")]
            while stream.accept_op(","):
                names.append(stream.expect("IDENT", "stage name"))
            for t in names:
                if t.text not in STAGE_NAMES:
                    raise ParseError("unknown stage", t.line, t.column,
                                     STAGE_NAMES, t.text)
            stages = [t.text for t in names]
        elif word == "output":
            # paths may contain '.', '/', '-': join raw tokens up to ';'
            pieces = []
            while True:
                nxt = stream.peek()
                if nxt.kind == "END" or (nxt.kind == "OP" and nxt.text == ";"):
                    break
                pieces.append(stream.next().text)
            if not pieces:
                raise ParseError("missing output path", tok.line, tok.column,
                                 ("path",), ";")
            output_path = "".join(pieces)
        else:
            expect_keyword(tok, "ring", "vars", "order", "ideal", "module",
                           "stages", "output")
        # every statement ends with ';' (tolerated before end of input)
        if not stream.accept_op(";"):
            tail = stream.peek()
            if tail.kind != "END":
                raise ParseError("missing statement terminator", tail.line,
                                 tail.column, ("';'",), tail.text)

    final = stream.peek()
    if varnames is None:
        raise ParseError("no ring declared", final.line, final.column,
                         ("vars",), "end of input")

    base = PolyRing(varnames, order or MonomialOrder.degrevlex())
    ring = QuotientRing(base, ideal_decls)
    modules: List[Tuple[str, PresentedModule]] = []
    for name, kind, payload in module_decls:
        if kind == "ideal":
            modules.append((name, ideal_module(ring, payload)))
        elif kind == "free":
            modules.append((name, free_module(ring, payload)))
        else:
            modules.append((name, present(ring, PolyMatrix.from_rows(ring, payload))))
    return InputDocument(
        ring=ring,
        modules=modules,
        stages=stages,
        output_path=output_path,
        ideal_texts=[str(f) for f in ideal_decls],
    )
