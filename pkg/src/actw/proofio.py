r"""Textual derivation trees.

A node is ``(Kind attr... "conclusion" child...)``; attributes are ``n=2``,
``pos=1``, ``f="formula"`` and the bare flag ``bounded``.  Omega nodes carry
either explicit instance children (flag ``bounded``) or one ``(cert ...)``
child holding the base and either a root extension or a template context.
Template sequents write the abstract block as ``@``.

    (StarLw pos=0 "p^* => p^*"
      (cert
        (base (StarRn n=0 "=> p^*"))
        (extend left (Id "p => p"))))
"""

from __future__ import annotations

from .calculus import (
    BLOCK,
    Derivation,
    RuleId,
    SchemaCertificate,
    StarFamily,
    TNode,
    TSeq,
    _omega_pos,
)
from .syntax import (
    DSequent,
    _Tokens,
    _parse_formula,
    _parse_formula_list,
    parse_sequent_or_dsequent,
    print_dsequent,
    print_formula,
    print_sequent,
    zone_sorted,
)


# ---------------------------------------------------------------------------
# writing

def _conclusion_text(s) -> str:
    return print_dsequent(s) if isinstance(s, DSequent) else print_sequent(s)


def _tseq_text(t: TSeq) -> str:
    items = ", ".join(
        "@" if p == BLOCK else print_formula(p) for p in t.parts
    )
    body = (items + " " if items else "") + "=> " + print_formula(t.succedent)
    if t.zone is None:
        return body
    zone = ", ".join(print_formula(f) for f in zone_sorted(t.zone))
    return "{" + zone + "} ; " + body


def _rule_head(r: RuleId) -> str:
    parts = [r.kind]
    if r.n is not None:
        parts.append(f"n={r.n}")
    if r.pos is not None:
        parts.append(f"pos={r.pos}")
    if r.formula is not None:
        parts.append(f'f="{print_formula(r.formula)}"')
    return " ".join(parts)


def format_derivation(d: Derivation) -> str:
    out = []

    def node(x: Derivation, indent: int):
        pad = "  " * indent
        head = _rule_head(x.rule)
        if x.bounded:
            head += " bounded"
        out.append(f'{pad}({head} "{_conclusion_text(x.conclusion)}"')
        if x.cert is not None:
            cert(x.cert, indent + 1)
        for c in x.children:
            node(c, indent + 1)
        out[-1] += ")"

    def cert(c: SchemaCertificate, indent: int):
        pad = "  " * indent
        out.append(f"{pad}(cert")
        out.append(f"{pad}  (base")
        node(c.base, indent + 2)
        out[-1] += ")"
        if c.extra is not None:
            out.append(f"{pad}  (extend {c.side}")
            node(c.extra, indent + 2)
            out[-1] += ")"
        else:
            out.append(f"{pad}  (plug")
            tnode(c.template, indent + 2)
            out[-1] += ")"
        out[-1] += ")"

    def tnode(t: TNode, indent: int):
        pad = "  " * indent
        if t.rule is None:
            out.append(f'{pad}(hole "{_tseq_text(t.tseq)}")')
            return
        out.append(f'{pad}(tpl {_rule_head(t.rule)} "{_tseq_text(t.tseq)}"')
        for c in t.children:
            if isinstance(c, TNode):
                tnode(c, indent + 1)
            else:
                node(c, indent + 1)
        out[-1] += ")"

    node(d, 0)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# reading

class _Lexer:
    def __init__(self, text: str):
        self.toks = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch in "()":
                self.toks.append(ch)
                i += 1
            elif ch == '"':
                j = text.index('"', i + 1)
                self.toks.append(("str", text[i + 1 : j]))
                i = j + 1
            else:
                j = i
                while j < n and not text[j].isspace() and text[j] not in '()"':
                    j += 1
                atom = text[i:j]
                if j < n and text[j] == '"' and atom.endswith("="):
                    k = text.index('"', j + 1)
                    self.toks.append(("attr", atom[:-1], text[j + 1 : k]))
                    i = k + 1
                else:
                    self.toks.append(("atom", atom))
                    i = j
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ValueError("unexpected end of derivation text")
        self.i += 1
        return t

    def expect(self, tok):
        t = self.next()
        if t != tok:
            raise ValueError(f"expected {tok!r}, found {t!r}")
        return t


def _parse_tseq(text: str) -> TSeq:
    ts = _Tokens(text)
    zone = None
    if ts.peek()[0] == "{":
        ts.next()
        zone = frozenset(_parse_formula_list(ts, ("}",)))
        ts.expect("}")
        ts.expect(";")
    parts = []
    while ts.peek()[0] != "=>":
        if ts.peek()[0] == "@":
            ts.next()
            parts.append(BLOCK)
        else:
            parts.append(_parse_formula(ts))
        if ts.peek()[0] == ",":
            ts.next()
    ts.expect("=>")
    succ = _parse_formula(ts)
    ts.expect("eof")
    return TSeq(tuple(parts), succ, zone)


def _read_head(lx: _Lexer):
    kind_tok = lx.next()
    if kind_tok[0] != "atom":
        raise ValueError(f"expected a rule kind, found {kind_tok!r}")
    kind = kind_tok[1]
    n = pos = formula = None
    bounded = False
    while True:
        t = lx.peek()
        if isinstance(t, tuple) and t[0] == "attr":
            lx.next()
            if t[1] == "f":
                formula = _parse_formula_text(t[2])
            else:
                raise ValueError(f"unknown string attribute {t[1]!r}")
        elif isinstance(t, tuple) and t[0] == "atom" and "=" in t[1]:
            lx.next()
            key, _, val = t[1].partition("=")
            if key == "n":
                n = int(val)
            elif key == "pos":
                pos = int(val)
            else:
                raise ValueError(f"unknown attribute {key!r}")
        elif isinstance(t, tuple) and t == ("atom", "bounded"):
            lx.next()
            bounded = True
        else:
            break
    return RuleId(kind, n, pos, formula), bounded


def _parse_formula_text(text: str):
    ts = _Tokens(text)
    f = _parse_formula(ts)
    ts.expect("eof")
    return f


def _read_node(lx: _Lexer) -> Derivation:
    lx.expect("(")
    rid, bounded = _read_head(lx)
    concl_tok = lx.next()
    if not (isinstance(concl_tok, tuple) and concl_tok[0] == "str"):
        raise ValueError(f"expected a conclusion string, found {concl_tok!r}")
    conclusion = parse_sequent_or_dsequent(concl_tok[1])
    cert = None
    children = []
    while lx.peek() == "(":
        save = lx.i
        lx.next()
        head = lx.peek()
        lx.i = save
        if head == ("atom", "cert"):
            cert = _read_cert(lx, conclusion, rid)
        else:
            children.append(_read_node(lx))
    lx.expect(")")
    return Derivation(rid, conclusion, tuple(children), bounded=bounded, cert=cert)


def _read_cert(lx: _Lexer, conclusion, rid: RuleId) -> SchemaCertificate:
    lx.expect("(")
    lx.expect(("atom", "cert"))
    lx.expect("(")
    lx.expect(("atom", "base"))
    base = _read_node(lx)
    lx.expect(")")
    lx.expect("(")
    tag = lx.next()
    node = Derivation(rid, conclusion)  # only for the family position
    family = StarFamily.of(conclusion, _omega_pos(node))
    if tag == ("atom", "extend"):
        side_tok = lx.next()
        extra = _read_node(lx)
        lx.expect(")")
        lx.expect(")")
        return SchemaCertificate(family, base, extra=extra, side=side_tok[1])
    if tag == ("atom", "plug"):
        template = _read_tnode(lx)
        lx.expect(")")
        lx.expect(")")
        return SchemaCertificate(family, base, template=template)
    raise ValueError(f"expected extend or plug, found {tag!r}")


def _read_tnode(lx: _Lexer) -> TNode:
    lx.expect("(")
    tag = lx.next()
    if tag == ("atom", "hole"):
        tseq_tok = lx.next()
        lx.expect(")")
        return TNode(None, _parse_tseq(tseq_tok[1]))
    if tag != ("atom", "tpl"):
        raise ValueError(f"expected tpl or hole, found {tag!r}")
    rid, _ = _read_head(lx)
    tseq_tok = lx.next()
    tseq = _parse_tseq(tseq_tok[1])
    children = []
    while lx.peek() == "(":
        save = lx.i
        lx.next()
        head = lx.peek()
        lx.i = save
        if head in (("atom", "tpl"), ("atom", "hole")):
            children.append(_read_tnode(lx))
        else:
            children.append(_read_node(lx))
    lx.expect(")")
    return TNode(rid, tseq, tuple(children))


def parse_derivation(text: str) -> Derivation:
    lx = _Lexer(text)
    d = _read_node(lx)
    if lx.peek() is not None:
        raise ValueError("trailing content after the derivation")
    return d
