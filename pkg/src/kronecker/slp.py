"""Straight-line programs: parsing, affine reparametrization, evaluation.

The input grammar is one ``vars`` line followed by one polynomial expression
per statement::

    vars x, y;
    x^2 + y^2 - 5;
    x*y - 2;

Integer constants are arbitrary precision; ``^`` takes a nonnegative integer
exponent and is expanded by repeated squaring at parse time, so programs stay
division-free and the recorded length counts one instruction per ring
operation actually performed.

A program can carry an affine change of variables (an integer matrix with its
adjugate and determinant).  Evaluation then maps the supplied point y to
x = adj(m) * y / det(m) inside the evaluation ring, which keeps the program
itself integer-parameterized and defers the division to rings where det is a
unit.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotInvertibleError, ParseError, SingularMatrixError
from .rings import coerce

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^();,]))"
)

_MAX_DENSE_TERMS = 200_000


@dataclass(frozen=True)
class AffineChange:
    """Invertible integer change of variables y = matrix * x.

    Stores the adjugate and determinant so that x = adjugate * y / det can be
    evaluated over any ring in which det is a unit.
    """

    matrix: tuple
    det: int
    adjugate: tuple

    @classmethod
    def from_matrix(cls, rows):
        rows = tuple(tuple(int(c) for c in row) for row in rows)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise ValueError("matrix must be square")
        det, inv = _fraction_inverse(rows)
        if det == 0:
            raise SingularMatrixError("change of variables has determinant 0")
        adj = tuple(
            tuple(_as_int(det * inv[i][j]) for j in range(n)) for i in range(n)
        )
        return cls(matrix=rows, det=det, adjugate=adj)

    @classmethod
    def identity(cls, n):
        rows = tuple(
            tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
        )
        return cls(matrix=rows, det=1, adjugate=rows)

    @property
    def n(self):
        return len(self.matrix)

    def is_identity(self):
        return all(
            self.matrix[i][j] == (1 if i == j else 0)
            for i in range(self.n)
            for j in range(self.n)
        )

    def left_compose(self, outer):
        """The change z = outer * (self * x), i.e. the product matrix."""
        n = self.n
        prod = [
            [
                sum(outer.matrix[i][k] * self.matrix[k][j] for k in range(n))
                for j in range(n)
            ]
            for i in range(n)
        ]
        return AffineChange.from_matrix(prod)

    def apply(self, xs):
        """Forward map x -> y = matrix * x over plain integers."""
        n = self.n
        return tuple(
            sum(self.matrix[i][j] * xs[j] for j in range(n)) for i in range(n)
        )


def _as_int(fr):
    assert fr.denominator == 1
    return int(fr)


def _fraction_inverse(rows):
    """Exact determinant and inverse of an integer matrix, by elimination."""
    n = len(rows)
    a = [[Fraction(rows[i][j]) for j in range(n)] for i in range(n)]
    inv = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return 0, None
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
            det = -det
        det *= a[col][col]
        scale = 1 / a[col][col]
        a[col] = [v * scale for v in a[col]]
        inv[col] = [v * scale for v in inv[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                inv[r] = [v - f * w for v, w in zip(inv[r], inv[col])]
    return _as_int(det), inv


@dataclass(frozen=True)
class StraightLineProgram:
    """Division-free arithmetic circuit for the input polynomials.

    ``instructions`` is an acyclic sequence of ('var', i), ('const', c),
    ('add', a, b), ('sub', a, b), ('mul', a, b) entries referencing earlier
    indices; ``outputs`` names the instruction computing each polynomial.
    ``degrees`` and ``height`` come from the dense expansion made at parse
    time (total degree per output, bit length of the largest coefficient).
    """

    n_vars: int
    var_names: tuple
    instructions: tuple
    outputs: tuple
    degrees: tuple
    height: int
    dense_forms: tuple = field(repr=False, default=())
    transform: AffineChange | None = None

    @property
    def n_outputs(self):
        return len(self.outputs)

    @property
    def length(self):
        ops = sum(
            1 for ins in self.instructions if ins[0] in ("add", "sub", "mul")
        )
        if self.transform is not None and not self.transform.is_identity():
            n = self.n_vars
            ops += 2 * n * n
        return ops


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        if m.group("num") is not None:
            tokens.append(("num", int(m.group("num")), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self):
        kind, val, pos = self.next()
        if kind != "ident" or val != "vars":
            raise ParseError("input must start with a 'vars' declaration", pos)
        names = []
        while True:
            kind, val, pos = self.next()
            if kind != "ident":
                raise ParseError("expected a variable name", pos)
            if val in names:
                raise ParseError(f"duplicate variable {val!r}", pos)
            names.append(val)
            kind, val, pos = self.next()
            if kind == "op" and val == ",":
                continue
            if kind == "op" and val == ";":
                break
            raise ParseError("expected ',' or ';' in the vars line", pos)
        self.var_index = {name: i for i, name in enumerate(names)}
        exprs = []
        while self.peek()[0] != "end":
            exprs.append(self.expr())
            self.expect_op(";")
        if not exprs:
            raise ParseError("no polynomials declared", self.peek()[2])
        return names, exprs

    def expr(self):
        kind, val, _ = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.next()
            negate = val == "-"
        node = self.term()
        if negate:
            node = ("neg", node)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                node = ("add" if val == "+" else "sub", node, rhs)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.next()
                node = ("mul", node, self.factor())
            else:
                return node

    def factor(self):
        kind, val, pos = self.peek()
        if kind == "op" and val in "+-":
            self.next()
            inner = self.factor()
            return ("neg", inner) if val == "-" else inner
        node = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, exp, pos = self.next()
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer", pos)
            node = ("pow", node, exp)
        return node

    def atom(self):
        kind, val, pos = self.next()
        if kind == "num":
            return ("const", val)
        if kind == "ident":
            if val not in self.var_index:
                raise ParseError(f"unknown variable {val!r}", pos)
            return ("var", self.var_index[val])
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError("expected a number, variable or '('", pos)


class _Builder:
    def __init__(self, n_vars):
        self.instructions = []
        self.var_idx = {}
        self.const_idx = {}
        for i in range(n_vars):
            self.var_idx[i] = len(self.instructions)
            self.instructions.append(("var", i))

    def const(self, c):
        if c not in self.const_idx:
            self.const_idx[c] = len(self.instructions)
            self.instructions.append(("const", c))
        return self.const_idx[c]

    def emit(self, op, a, b):
        self.instructions.append((op, a, b))
        return len(self.instructions) - 1

    def build(self, node):
        op = node[0]
        if op == "const":
            return self.const(node[1])
        if op == "var":
            return self.var_idx[node[1]]
        if op == "neg":
            return self.emit("sub", self.const(0), self.build(node[1]))
        if op == "pow":
            base = self.build(node[1])
            return self.power(base, node[2])
        a = self.build(node[1])
        b = self.build(node[2])
        return self.emit(op, a, b)

    def power(self, base, e):
        if e == 0:
            return self.const(1)
        if e == 1:
            return base
        # Repeated squaring along the bits of e, high to low.
        bits = bin(e)[3:]
        acc = base
        for bit in bits:
            acc = self.emit("mul", acc, acc)
            if bit == "1":
                acc = self.emit("mul", acc, base)
        return acc


def _dense_expand(node, n_vars):
    """Dense monomial map of an expression; raises ParseError past the cap."""
    op = node[0]
    if op == "const":
        return {(0,) * n_vars: node[1]} if node[1] != 0 else {}
    if op == "var":
        e = [0] * n_vars
        e[node[1]] = 1
        return {tuple(e): 1}
    if op == "neg":
        return {k: -v for k, v in _dense_expand(node[1], n_vars).items()}
    if op == "pow":
        base = _dense_expand(node[1], n_vars)
        out = {(0,) * n_vars: 1}
        for _ in range(node[2]):
            out = _dense_mul(out, base, n_vars)
        return out
    a = _dense_expand(node[1], n_vars)
    b = _dense_expand(node[2], n_vars)
    if op == "mul":
        return _dense_mul(a, b, n_vars)
    sign = 1 if op == "add" else -1
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + sign * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _dense_mul(a, b, n_vars):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            nv = out.get(k, 0) + va * vb
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        if len(out) > _MAX_DENSE_TERMS:
            raise ParseError("polynomial too large to expand")
    return out


def parse_system(source):
    """Parse the input text into a StraightLineProgram.

    Rejects systems with more polynomials than variables and inputs that are
    identically zero, and records per-output total degrees plus the maximum
    coefficient bit length for the bounds machinery.
    """
    parser = _Parser(source)
    names, exprs = parser.parse()
    n = len(names)
    if len(exprs) > n:
        raise ParseError(
            f"{len(exprs)} polynomials in {n} variables is overdetermined"
        )
    builder = _Builder(n)
    outputs = []
    dense_forms = []
    degrees = []
    height = 0
    for k, node in enumerate(exprs):
        dense = _dense_expand(node, n)
        if not dense:
            raise ParseError(f"polynomial #{k + 1} is identically zero")
        dense_forms.append(dict(dense))
        degrees.append(max(sum(e) for e in dense))
        height = max(height, max(abs(c) for c in dense.values()).bit_length())
        outputs.append(builder.build(node))
    return StraightLineProgram(
        n_vars=n,
        var_names=tuple(names),
        instructions=tuple(builder.instructions),
        outputs=tuple(outputs),
        degrees=tuple(degrees),
        height=height,
        dense_forms=tuple(dense_forms),
        transform=None,
    )


def compose_affine(slp, change):
    """Program computing the same polynomials in the variables y = change * x.

    Evaluating the result at y equals evaluating ``slp`` at x = change⁻¹ y;
    the inverse is carried as (adjugate, det) and applied inside the
    evaluation ring.
    """
    if change.n != slp.n_vars:
        raise ValueError("change of variables has the wrong dimension")
    combined = change if slp.transform is None else slp.transform.left_compose(change)
    return StraightLineProgram(
        n_vars=slp.n_vars,
        var_names=slp.var_names,
        instructions=slp.instructions,
        outputs=slp.outputs,
        degrees=slp.degrees,
        height=slp.height,
        dense_forms=slp.dense_forms,
        transform=combined,
    )


def _transformed_inputs(slp, point, R):
    point = [coerce(R, x) for x in point]
    tr = slp.transform
    if tr is None or tr.is_identity():
        return point
    n = slp.n_vars
    det = R.from_int(tr.det)
    try:
        det_inv = R.inv(det)
    except NotInvertibleError:
        raise NotInvertibleError(
            "determinant of the change of variables is not a unit here"
        ) from None
    xs = []
    for i in range(n):
        acc = R.zero
        for j in range(n):
            a = tr.adjugate[i][j]
            if a == 0:
                continue
            acc = R.add(acc, R.mul(R.from_int(a), point[j]))
        xs.append(R.mul(acc, det_inv))
    return xs


def _run(slp, xs, R):
    vals = []
    for ins in slp.instructions:
        op = ins[0]
        if op == "var":
            vals.append(xs[ins[1]])
        elif op == "const":
            vals.append(R.from_int(ins[1]))
        elif op == "add":
            vals.append(R.add(vals[ins[1]], vals[ins[2]]))
        elif op == "sub":
            vals.append(R.sub(vals[ins[1]], vals[ins[2]]))
        else:
            vals.append(R.mul(vals[ins[1]], vals[ins[2]]))
    return vals


def evaluate(slp, point, R):
    """Evaluate every output at a point with entries in (or coercible to) R."""
    if len(point) != slp.n_vars:
        raise ValueError("point has the wrong number of coordinates")
    xs = _transformed_inputs(slp, point, R)
    vals = _run(slp, xs, R)
    return [vals[o] for o in slp.outputs]


def evaluate_jacobian(slp, point, R, wrt, n_out=None):
    """Values and partial derivatives of the first ``n_out`` outputs.

    ``wrt`` lists the variable indices to differentiate against (0-based,
    referring to the post-change variables).  Forward-mode: one value pass,
    then one tangent pass per direction; exact over any ring.
    Returns (values, rows) with rows[i][k] = dF_i/dY_{wrt[k]}.
    """
    if n_out is None:
        n_out = len(wrt)
    xs = _transformed_inputs(slp, point, R)
    vals = _run(slp, xs, R)
    tr = slp.transform
    det_inv = None
    if tr is not None and not tr.is_identity():
        det_inv = R.inv(R.from_int(tr.det))
    rows = [[R.zero] * len(wrt) for _ in range(n_out)]
    for col, direction in enumerate(wrt):
        tans = []
        for ins in slp.instructions:
            op = ins[0]
            if op == "var":
                i = ins[1]
                if det_inv is None:
                    tans.append(R.one if i == direction else R.zero)
                else:
                    a = tr.adjugate[i][direction]
                    tans.append(
                        R.mul(R.from_int(a), det_inv) if a else R.zero
                    )
            elif op == "const":
                tans.append(R.zero)
            elif op == "add":
                tans.append(R.add(tans[ins[1]], tans[ins[2]]))
            elif op == "sub":
                tans.append(R.sub(tans[ins[1]], tans[ins[2]]))
            else:
                a, b = ins[1], ins[2]
                tans.append(
                    R.add(R.mul(vals[a], tans[b]), R.mul(tans[a], vals[b]))
                )
        for i in range(n_out):
            rows[i][col] = tans[slp.outputs[i]]
    values = [vals[slp.outputs[i]] for i in range(n_out)]
    return values, rows
