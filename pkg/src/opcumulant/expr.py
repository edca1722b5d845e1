"""
Symbolic expressions: rational sums of ordered products of brackets.

A bracket ``<i.j.k>`` stands for a moment average and ``<i.j.k>_c`` for
a cumulant average over indexed non-commuting atoms. A term's factors
are read left to right as operator composition.

Each term carries a ``projected`` flag. A projected term is a product
still inside the ordering map, so canonicalization may reorder its
factors according to the map's rule. A term that is not projected is a
literal operator product, and its factor order is kept (except under
the commutative maps). Canonicalization applies the projection and
clears the flag, so canonical expressions are always literal.
"""
import json
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import ParseError, ValidationError
from .ordering import OrderingMapKind, canonical_factor_order, parse_map

MOMENT = "m"
CUMULANT = "c"


@dataclass(frozen=True, order=True)
class Bracket:
    """Moment (kind 'm') or cumulant (kind 'c') average over atom indices."""

    idx: tuple
    kind: str = MOMENT

    def __post_init__(self):
        idx = tuple(int(i) for i in self.idx)
        if not idx:
            raise ValidationError("bracket needs at least one atom")
        if any(i < 1 for i in idx):
            raise ValidationError(f"atom indices must be >= 1, got {idx}")
        if self.kind not in (MOMENT, CUMULANT):
            raise ValidationError(f"unknown bracket kind {self.kind!r}")
        object.__setattr__(self, "idx", idx)

    def __len__(self):
        return len(self.idx)

    @property
    def atoms(self):
        return frozenset(self.idx)

    def normalized(self):
        """Sorted indices; a singleton cumulant equals the singleton moment."""
        if len(set(self.idx)) != len(self.idx):
            raise ValidationError(f"repeated atom index inside bracket {self.idx}")
        kind = MOMENT if len(self.idx) == 1 else self.kind
        return Bracket(tuple(sorted(self.idx)), kind)

    def relabel(self, mapping):
        return Bracket(tuple(mapping[i] for i in self.idx), self.kind)

    def text(self):
        return "<" + ".".join(map(str, self.idx)) + ">" + ("_c" if self.kind == CUMULANT else "")

    def __str__(self):
        return self.text()


def moment(*idx):
    return Bracket(tuple(idx), MOMENT)


def cumulant(*idx):
    return Bracket(tuple(idx), CUMULANT)


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    factors: tuple
    wedge: bool = False
    projected: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValidationError("term needs at least one factor")

    def atoms(self):
        return [i for f in self.factors for i in f.idx]

    def sort_key(self):
        return (len(self.factors), tuple((f.idx, f.kind) for f in self.factors))

    def scaled(self, c):
        return replace(self, coeff=self.coeff * c)


@dataclass(frozen=True)
class Expression:
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def from_bracket(cls, bracket, coeff=1):
        return cls((Term(coeff, (bracket,)),))

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other):
        return Expression(self.terms + other.terms)

    def __neg__(self):
        return Expression(t.scaled(-1) for t in self.terms)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        return Expression(t.scaled(c) for t in self.terms)

    def __mul__(self, other):
        """Distributed product; each term pair concatenates its factors."""
        if not isinstance(other, Expression):
            return self.scaled(Fraction(other))
        out = []
        for a in self.terms:
            for b in other.terms:
                out.append(
                    Term(
                        a.coeff * b.coeff,
                        a.factors + b.factors,
                        wedge=a.wedge or b.wedge,
                        projected=a.projected and b.projected,
                    )
                )
        return Expression(out)

    __rmul__ = scaled

    def brackets(self):
        """Distinct brackets appearing anywhere, in first-seen order."""
        seen = {}
        for t in self.terms:
            for f in t.factors:
                seen.setdefault(f, None)
        return list(seen)

    def atoms(self):
        return sorted({i for t in self.terms for i in t.atoms()})

    def with_projection(self, projected=True):
        return Expression(replace(t, projected=projected) for t in self.terms)

    def __str__(self):
        return render(self)


ZERO = Expression(())


def _grassmann_relabel(factors):
    """Map a wedge term onto its profile representative, keeping its atom set."""
    sets = [f.atoms for f in factors]
    union = set().union(*sets)
    if sum(len(s) for s in sets) != len(union):
        return factors
    labels = iter(sorted(union))
    out = []
    for f in factors:
        out.append(Bracket(tuple(next(labels) for _ in f.idx), f.kind))
    return tuple(out)


def canonicalize(expr, map_kind):
    """
    Canonical form of `expr` under the ordering map.

    Brackets are sorted internally, projected terms have their factors
    put in the map's normal form, like terms are merged and zero terms
    dropped. Under Grassmann every product is a wedge product and terms
    are relabeled onto their size-profile representative.
    """
    map_kind = parse_map(map_kind)
    merged = {}
    for t in expr.terms:
        factors = tuple(f.normalized() for f in t.factors)
        wedge = t.wedge
        if map_kind is OrderingMapKind.GRASSMANN:
            factors = tuple(canonical_factor_order(factors, map_kind))
            factors = _grassmann_relabel(factors)
            factors = tuple(canonical_factor_order(factors, map_kind))
            wedge = len(factors) > 1
        else:
            if wedge and len(factors) > 1:
                raise ValidationError(f"wedge products are only defined under the Grassmann map, not {map_kind.value}")
            wedge = False
            if t.projected or map_kind is OrderingMapKind.CLASSICAL:
                factors = tuple(canonical_factor_order(factors, map_kind))
        key = (factors, wedge)
        merged[key] = merged.get(key, Fraction(0)) + t.coeff
    terms = [Term(c, f, wedge=w) for (f, w), c in merged.items() if c != 0]
    terms.sort(key=Term.sort_key)
    return Expression(terms)


def equal(a, b, map_kind):
    """True iff both expressions share the same canonical form."""
    ca, cb = canonicalize(a, map_kind), canonicalize(b, map_kind)
    return ca.terms == cb.terms


def substitute(expr, target, replacement, map_kind):
    """
    Replace every occurrence of `target` by `replacement` and distribute.

    Both sides are canonicalized first, so projected products are put in
    normal order before the literal insertion.
    """
    return substitute_many(expr, {target: replacement}, map_kind)


def substitute_many(expr, replacements, map_kind):
    """Simultaneous substitution for several target brackets."""
    reps = {}
    for target, replacement in replacements.items():
        target = target.normalized()
        for t in replacement.terms:
            atoms = t.atoms()
            if sorted(atoms) != list(target.idx):
                raise ValidationError(f"replacement term over {sorted(atoms)} does not match {target}")
        reps[target] = canonicalize(replacement, map_kind)
    out = []
    for t in canonicalize(expr, map_kind).terms:
        acc = None
        for f in t.factors:
            piece = reps[f] if f in reps else Expression((Term(1, (f,)),))
            acc = piece if acc is None else acc * piece
        acc = acc.scaled(t.coeff)
        if t.wedge:
            acc = Expression(replace(u, wedge=True) for u in acc.terms)
        out.extend(acc.terms)
    return canonicalize(Expression(out), map_kind)


def relabel(expr, mapping):
    """Rename atom indices through `mapping` (dict old -> new)."""
    return Expression(
        replace(t, factors=tuple(f.relabel(mapping) for f in t.factors)) for t in expr.terms
    )


def relabel_to(expr, indices):
    """Relabel an expression over 1..n onto the increasing index list `indices`."""
    return relabel(expr, {k + 1: v for k, v in enumerate(indices)})


# ---------------------------------------------------------------- rendering

def _coeff_text(c):
    if c == 1:
        return ""
    if c.denominator == 1:
        return f"{c.numerator}*"
    return f"{c.numerator}/{c.denominator}*"


def render(expr, fmt="text"):
    """Render as the text grammar or as JSON."""
    if fmt == "json":
        return json.dumps(to_json(expr), separators=(", ", ": "))
    if fmt != "text":
        raise ValidationError(f"unknown format {fmt!r}")
    if not expr.terms:
        return "0"
    parts = []
    for t in expr.terms:
        op = "^" if t.wedge else "*"
        parts.append(_coeff_text(t.coeff) + op.join(f.text() for f in t.factors))
    return " + ".join(parts)


def to_json(expr):
    terms = []
    for t in expr.terms:
        item = {
            "coeff": [t.coeff.numerator, t.coeff.denominator],
            "factors": [{"kind": f.kind, "idx": list(f.idx)} for f in t.factors],
        }
        if t.wedge:
            item["op"] = "^"
        terms.append(item)
    return {"terms": terms}


def from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    terms = []
    for item in data["terms"]:
        num, den = item["coeff"]
        factors = tuple(Bracket(tuple(f["idx"]), f["kind"]) for f in item["factors"])
        terms.append(Term(Fraction(num, den), factors, wedge=item.get("op") == "^"))
    return _infer_projection(Expression(terms))


# ------------------------------------------------------------------ parsing

_INT = re.compile(rb"[0-9]+")


class _Parser:
    def __init__(self, text):
        self.src = text.encode("utf-8") if isinstance(text, str) else text
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.pos)

    def peek(self, s=b""):
        return self.src.startswith(s, self.pos) if s else self.pos < len(self.src)

    def expect(self, s):
        if not self.src.startswith(s, self.pos):
            self.error(f"expected {s.decode()!r}")
        self.pos += len(s)

    def integer(self):
        m = _INT.match(self.src, self.pos)
        if not m:
            self.error("expected integer")
        self.pos = m.end()
        return int(m.group())

    def factor(self):
        start = self.pos
        self.expect(b"<")
        idx = [self.integer()]
        while self.peek(b"."):
            self.pos += 1
            idx.append(self.integer())
        self.expect(b">")
        kind = MOMENT
        if self.peek(b"_c"):
            self.pos += 2
            kind = CUMULANT
        if any(i < 1 for i in idx):
            raise ParseError("atom index must be >= 1", start)
        if len(set(idx)) != len(idx):
            raise ParseError("repeated atom index inside bracket", start)
        return Bracket(tuple(idx), kind)

    def op(self):
        # S? op S?
        save = self.pos
        if self.peek(b" "):
            self.pos += 1
        if self.peek(b"*") or self.peek(b"^"):
            c = self.src[self.pos:self.pos + 1]
            self.pos += 1
            if self.peek(b" "):
                self.pos += 1
            if not self.peek(b"<"):
                self.error("expected factor after operator")
            return c
        self.pos = save
        return None

    def term(self):
        sign = 1
        if self.peek(b"-"):
            self.pos += 1
            sign = -1
        coeff = Fraction(1)
        if not self.peek(b"<"):
            num = self.integer()
            den = 1
            if self.peek(b"/"):
                self.pos += 1
                at = self.pos
                den = self.integer()
                if den == 0:
                    raise ParseError("zero denominator", at)
            coeff = Fraction(num, den)
            if self.peek(b" "):
                self.pos += 1
            self.expect(b"*")
            if self.peek(b" "):
                self.pos += 1
        factors = [self.factor()]
        ops = set()
        while True:
            at = self.pos
            o = self.op()
            if o is None:
                break
            ops.add(o)
            if len(ops) > 1:
                raise ParseError("cannot mix '*' and '^' in one term", at)
            factors.append(self.factor())
        return Term(sign * coeff, tuple(factors), wedge=b"^" in ops)

    def expression(self):
        terms = [self.term()]
        while self.peek(b" + "):
            self.pos += 3
            terms.append(self.term())
        if self.peek():
            self.error("unexpected trailing input")
        return Expression(terms)


def _infer_projection(expr):
    """
    An expression with no multi-atom moment bracket is read as a cumulant
    expansion (products inside the map); otherwise products are literal.
    """
    literal = any(f.kind == MOMENT and len(f) > 1 for t in expr.terms for f in t.factors)
    return expr.with_projection(not literal)


def parse(text):
    """Parse the text grammar; raises ParseError with a byte offset."""
    if isinstance(text, str) and text.strip() == "0":
        return ZERO
    return _infer_projection(_Parser(text).expression())
