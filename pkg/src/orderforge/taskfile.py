"""Task-file grammar: rings, named objects and task lines.

A task file is UTF-8 text made of sections.  ``[ring]`` starts a new block
and resets all names; ``[define]`` binds names; ``[tasks]`` lists the work.
See ``docs/TASKFILE.md`` for the full grammar.  Every error carries the
line and column it was found at.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import GF, QQ, ParseError, Poly, Ring, parse_expression
from .groebner import Ideal
from .fpmod import FPModule
from .azumaya import SCAlgebra, dual_numbers, quaternion_algebra, twisted_cokernel
from .orders import koszul_syzygy


class TaskFileError(ValueError):
    def __init__(self, message: str, line: int, col: int, path: str = "<task>"):
        self.line = line
        self.col = col
        self.path = path
        self.message = message
        super().__init__(f"{path}:{line}:{col}: {message}")


@dataclass
class Arg:
    key: str
    text: str
    col: int           # 1-based column of the value
    value: object = None


@dataclass
class Task:
    op: str
    args: dict
    expect: dict
    line: int
    text: str

    def arg_text(self) -> dict:
        return {k: a.text for k, a in self.args.items()}


@dataclass
class Block:
    ring: Ring
    ring_text: dict
    names: dict = field(default_factory=dict)     # name -> (kind, value)
    tasks: list = field(default_factory=list)


@dataclass
class TaskFile:
    source: str
    path: str
    blocks: list

    @property
    def tasks(self):
        for b in self.blocks:
            for t in b.tasks:
                yield b, t


# ---------------------------------------------------------------- values


class _Lin:
    """Linear combination of algebra basis symbols (for structure tables)."""

    def __init__(self, coords: dict):
        self.coords = coords

    def __add__(self, other):
        other = _as_lin(other)
        out = dict(self.coords)
        for k, v in other.coords.items():
            out[k] = out.get(k, 0) + v
        return _Lin(out)

    __radd__ = __add__

    def __neg__(self):
        return _Lin({k: -v for k, v in self.coords.items()})

    def __sub__(self, other):
        return self + (-_as_lin(other))

    def __rsub__(self, other):
        return _as_lin(other) - self

    def __mul__(self, other):
        if isinstance(other, _Lin):
            if set(self.coords) == {None}:
                return other * self.coords[None]
            if set(other.coords) == {None}:
                return self * other.coords[None]
            raise ValueError("products of basis elements are not allowed on the right-hand side")
        return _Lin({k: v * other for k, v in self.coords.items()})

    __rmul__ = __mul__

    def __pow__(self, n):
        if set(self.coords) == {None}:
            return _Lin({None: self.coords[None] ** n})
        raise ValueError("powers of basis elements are not allowed on the right-hand side")


def _as_lin(x):
    return x if isinstance(x, _Lin) else _Lin({None: x})


def parse_ring(spec: dict, line: int) -> Ring:
    fld = spec.get("field", ("Q", 0, 0))
    text = fld[0].strip()
    m = re.fullmatch(r"(?:GF\((\d+)\)|F_?(\d+)|Fp\s+(\d+))", text)
    if text in ("Q", "QQ"):
        field_ = QQ
    elif m:
        p = int(next(g for g in m.groups() if g))
        try:
            field_ = GF(p)
        except ValueError as exc:
            raise TaskFileError(str(exc), fld[1], fld[2]) from None
    else:
        raise TaskFileError(f"unknown field {text!r} (use Q or GF(p))", fld[1], fld[2])
    if "vars" not in spec:
        raise TaskFileError("ring section needs 'vars'", line, 1)
    vars_ = [v.strip() for v in spec["vars"][0].split(",") if v.strip()]
    for v in vars_:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
            raise TaskFileError(f"bad variable name {v!r}", spec["vars"][1], spec["vars"][2])
    order = spec.get("order", ("grevlex", 0, 0))[0].strip()
    if order not in ("grevlex", "lex"):
        raise TaskFileError(f"unknown order {order!r}", spec["order"][1], spec["order"][2])
    quotient = ()
    if "quotient" in spec:
        qt, ql, qc = spec["quotient"]
        amb = Ring(vars_, field=field_, order=order)
        quotient = tuple(_poly(amb, part, ql, qc + off) for part, off in _split_offsets(qt, ","))
    domain = None
    if "domain" in spec:
        domain = spec["domain"][0].strip().lower() in ("true", "yes", "1")
    return Ring(vars_, field=field_, order=order, quotient=quotient, domain=domain)


def _split_offsets(text: str, sep: str) -> list:
    """Top-level split keeping each part's offset in ``text``."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append((text[start:i], start))
            start = i + 1
    parts.append((text[start:], start))
    out = []
    for part, off in parts:
        stripped = part.lstrip()
        out.append((stripped.rstrip(), off + len(part) - len(stripped)))
    return [p for p in out if p[0]]


def _poly(ring: Ring, text: str, line: int, col: int) -> Poly:
    try:
        return ring.parse(text)
    except ParseError as exc:
        raise TaskFileError(str(exc).split(" at column")[0], line, col + exc.pos) from None
    except (ValueError, ZeroDivisionError) as exc:
        raise TaskFileError(str(exc), line, col) from None


class Resolver:
    """Turns value text into ring objects, consulting the block's names."""

    def __init__(self, block: Block):
        self.block = block
        self.ring = block.ring

    def lookup(self, name: str, kind: str, line: int, col: int):
        hit = self.block.names.get(name)
        if hit is None:
            return None
        if hit[0] != kind:
            raise TaskFileError(f"{name!r} is a {hit[0]}, expected a {kind}", line, col)
        return hit[1]

    def ideal(self, text: str, line: int, col: int) -> Ideal:
        text = text.strip()
        named = self.lookup(text, "ideal", line, col)
        if named is not None:
            return named
        if not (text.startswith("(") and text.endswith(")")):
            raise TaskFileError(f"expected an ideal '(g1, g2, ...)' or a name, got {text!r}", line, col)
        inner = text[1:-1]
        gens = [_poly(self.ring, part, line, col + 1 + off) for part, off in _split_offsets(inner, ",")]
        return Ideal(self.ring, gens)

    def ideals(self, text: str, line: int, col: int) -> list:
        return [self.ideal(part, line, col + off) for part, off in _split_offsets(text, ";")]

    def poly(self, text: str, line: int, col: int) -> Poly:
        return _poly(self.ring, text, line, col)

    def integer(self, text: str, line: int, col: int) -> int:
        try:
            return int(text)
        except ValueError:
            raise TaskFileError(f"expected an integer, got {text!r}", line, col) from None

    def matrix(self, text: str, line: int, col: int) -> list:
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise TaskFileError("expected a matrix '[a, b; c, d]'", line, col)
        rows = []
        for row, roff in _split_offsets(text[1:-1], ";"):
            rows.append([self.poly(x, line, col + 1 + roff + off) for x, off in _split_offsets(row, ",")])
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise TaskFileError("ragged matrix", line, col)
        return rows

    def module(self, text: str, line: int, col: int) -> FPModule:
        parts = _split_offsets(text, "+")
        mods = [self._module_term(p, line, col + off) for p, off in parts]
        if not mods:
            raise TaskFileError("empty module expression", line, col)
        out = mods[0]
        for m in mods[1:]:
            out = out.direct_sum(m)
        return out

    def _module_term(self, text: str, line: int, col: int) -> FPModule:
        ring = self.ring
        named = self.lookup(text, "module", line, col)
        if named is not None:
            return named
        if text == "R":
            return FPModule.free(ring, 1)
        m = re.fullmatch(r"R\^(\d+)", text)
        if m:
            return FPModule.free(ring, int(m.group(1)))
        if text.startswith("R/"):
            return FPModule.cyclic(self.ideal(text[2:], line, col + 2))
        if text.startswith("coker"):
            rows = self.matrix(text[5:], line, col + 5)
            if not rows or not rows[0]:
                raise TaskFileError("empty presentation matrix", line, col)
            return FPModule.from_matrix(ring, rows)
        if text.startswith("ideal"):
            rest = text[5:].lstrip()
            return FPModule.from_ideal(self.ideal(rest, line, col + len(text) - len(rest)))
        if text.startswith("twisted(") and text.endswith(")"):
            parts = _split_offsets(text[8:-1], ",")
            if len(parts) != 3:
                raise TaskFileError("twisted(ALGEBRA, f, g) takes three arguments", line, col)
            alg = self.algebra(parts[0][0], line, col + 8 + parts[0][1])
            f, g = (self.element(alg, t, line, col + 8 + off) for t, off in parts[1:])
            try:
                return twisted_cokernel(alg, f, g).unfolded
            except ValueError as exc:
                raise TaskFileError(str(exc), line, col) from None
        if text == "koszul":
            try:
                return koszul_syzygy(ring)
            except ValueError as exc:
                raise TaskFileError(str(exc), line, col) from None
        raise TaskFileError(f"unknown module {text!r}", line, col)

    def algebra(self, text: str, line: int, col: int) -> SCAlgebra:
        text = text.strip()
        named = self.lookup(text, "algebra", line, col)
        if named is not None:
            return named
        ring = self.ring
        try:
            if text == "dual_numbers":
                return dual_numbers(ring)
            m = re.fullmatch(r"quaternion\((.*)\)", text)
            if m:
                parts = _split_offsets(m.group(1), ",")
                if len(parts) != 2:
                    raise TaskFileError("quaternion(a, b) takes two arguments", line, col)
                a, b = (self.poly(p, line, col + 11 + off) for p, off in parts)
                return quaternion_algebra(ring, a, b)
            m = re.fullmatch(r"structure\((.*)\)", text)
            if m:
                return self._structure(m.group(1), line, col + 10)
        except TaskFileError:
            raise
        except ValueError as exc:
            raise TaskFileError(str(exc), line, col) from None
        raise TaskFileError(f"unknown algebra {text!r}", line, col)

    def _structure(self, body: str, line: int, col: int) -> SCAlgebra:
        ring = self.ring
        sections = _split_offsets(body, ";")
        if not sections:
            raise TaskFileError("structure(...) needs a basis", line, col)
        names = [n for n, _ in _split_offsets(sections[0][0], ",")]
        n = len(names)
        zero = [0] * n
        table = [[list(zero) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            table[0][i][i] = 1
            table[i][0][i] = 1
        symbols = {v: _Lin({None: ring.var(v)}) for v in ring.variables}
        symbols.update({name: _Lin({k: 1}) for k, name in enumerate(names)})
        for rules, roff in sections[1:]:
            for rule, off in _split_offsets(rules, ","):
                at = col + roff + off
                m = re.fullmatch(r"\s*(\w+)\s*\*\s*(\w+)\s*=(.*)", rule)
                if not m or m.group(1) not in names or m.group(2) not in names:
                    raise TaskFileError(f"expected 'x*y = expr' over the basis, got {rule!r}", line, at)
                try:
                    val = _as_lin(parse_expression(m.group(3), symbols, lambda c: _Lin({None: c})))
                except ParseError as exc:
                    raise TaskFileError(str(exc).split(" at column")[0], line,
                                        at + m.start(3) + exc.pos) from None
                if None in val.coords and val.coords[None]:
                    raise TaskFileError("products must be combinations of basis elements", line, at)
                coords = [0] * n
                for k, c in val.coords.items():
                    if k is not None:
                        coords[k] = c
                table[names.index(m.group(1))][names.index(m.group(2))] = coords
        return SCAlgebra(ring, names, [[[_coerce(ring, c) for c in e] for e in row] for row in table],
                         label=f"structure({body.strip()})")

    def element(self, algebra: SCAlgebra, text: str, line: int, col: int):
        named = self.lookup(text.strip(), "element", line, col)
        if named is not None:
            if named.algebra is not algebra:
                raise TaskFileError(f"{text.strip()!r} belongs to a different algebra", line, col)
            return named
        try:
            return algebra.parse(text)
        except ParseError as exc:
            raise TaskFileError(str(exc).split(" at column")[0], line, col + exc.pos) from None


def _coerce(ring: Ring, c):
    if isinstance(c, Poly):
        return c
    if isinstance(c, Fraction):
        return ring.const(c)
    return ring.const(c)


# ---------------------------------------------------------------- lines


_SECTION = re.compile(r"\[\s*(ring|define|tasks)\s*\]")
_DEFINE = re.compile(r"(ideal|module|algebra|element)\s+([A-Za-z_][A-Za-z_0-9]*)\s*(?:in\s+([A-Za-z_]\w*)\s*)?=")


def split_args(text: str, line: int, col0: int) -> list:
    """Split ``key=value`` words at top level; values may be double-quoted."""
    out = []
    i, n = 0, len(text)
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        start = i
        depth = 0
        quoted = False
        while i < n and (depth or quoted or not text[i].isspace()):
            ch = text[i]
            if ch == '"':
                quoted = not quoted
            elif not quoted and ch in "([":
                depth += 1
            elif not quoted and ch in ")]":
                depth -= 1
            i += 1
        if quoted:
            raise TaskFileError("unterminated quote", line, col0 + start)
        if depth:
            raise TaskFileError("unbalanced brackets", line, col0 + start)
        out.append((text[start:i], col0 + start))
    return out


def _strip_comment(raw: str) -> str:
    quoted = False
    for i, ch in enumerate(raw):
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            return raw[:i]
    return raw


def parse_task_file(source: str, path: str = "<task>", signatures: dict | None = None) -> TaskFile:
    """Parse and resolve a whole task file; raises :class:`TaskFileError`."""
    blocks: list = []
    section = None
    ring_spec: dict = {}
    ring_line = 0
    block: Block | None = None

    def ensure_block(line):
        nonlocal block
        if block is None:
            if not ring_spec:
                raise TaskFileError("a [ring] section must come first", line, 1)
            block = Block(parse_ring(ring_spec, ring_line), {k: v[0] for k, v in ring_spec.items()})
            blocks.append(block)
        return block

    try:
        for lineno, raw in enumerate(source.splitlines(), start=1):
            text = _strip_comment(raw).rstrip()
            if not text.strip():
                continue
            indent = len(text) - len(text.lstrip())
            body = text.strip()
            m = _SECTION.fullmatch(body)
            if m:
                section = m.group(1)
                if section == "ring":
                    ring_spec, ring_line, block = {}, lineno, None
                else:
                    ensure_block(lineno)
                continue
            if body.startswith("["):
                raise TaskFileError(f"unknown section {body!r}", lineno, indent + 1)
            if section is None:
                raise TaskFileError("text before the first section", lineno, indent + 1)
            if section == "ring":
                if "=" not in body:
                    raise TaskFileError("expected 'key = value'", lineno, indent + 1)
                key, val = body.split("=", 1)
                key = key.strip()
                if key not in ("field", "vars", "order", "quotient", "domain"):
                    raise TaskFileError(f"unknown ring key {key!r}", lineno, indent + 1)
                vcol = indent + body.index("=") + 2 + (len(val) - len(val.lstrip()))
                ring_spec[key] = (val.strip(), lineno, vcol)
            elif section == "define":
                _parse_define(ensure_block(lineno), body, lineno, indent)
            else:
                _parse_task(ensure_block(lineno), body, lineno, indent, signatures)
    except TaskFileError as exc:
        exc.path = path
        raise TaskFileError(exc.message, exc.line, exc.col, path) from None
    if not blocks and ring_spec:
        ensure_block(ring_line)
    return TaskFile(source, path, blocks)


def _parse_define(block: Block, body: str, line: int, indent: int):
    m = _DEFINE.match(body)
    if not m:
        raise TaskFileError("expected 'ideal|module|algebra|element NAME = ...'", line, indent + 1)
    kind, name, owner = m.group(1), m.group(2), m.group(3)
    if name in block.ring.variables:
        raise TaskFileError(f"{name!r} is a ring variable", line, indent + m.start(2) + 1)
    rest = body[m.end():]
    col = indent + m.end() + 1 + (len(rest) - len(rest.lstrip()))
    rest = rest.strip()
    if not rest:
        raise TaskFileError("missing value", line, col)
    res = Resolver(block)
    if kind == "ideal":
        value = res.ideal(rest, line, col)
    elif kind == "module":
        value = res.module(rest, line, col)
    elif kind == "algebra":
        value = res.algebra(rest, line, col)
    else:
        alg = None
        if owner:
            alg = res.lookup(owner, "algebra", line, indent + m.start(3) + 1)
            if alg is None:
                raise TaskFileError(f"unknown algebra {owner!r}", line, indent + m.start(3) + 1)
        else:
            algs = [v for k, v in block.names.values() if k == "algebra"]
            if not algs:
                raise TaskFileError("element needs a preceding algebra", line, col)
            alg = algs[-1]
        value = res.element(alg, rest, line, col)
    block.names[name] = (kind, value)


def _parse_task(block: Block, body: str, line: int, indent: int, signatures: dict | None):
    words = split_args(body, line, indent + 1)
    op, _ = words[0]
    args, expect = {}, {}
    for word, col in words[1:]:
        if "=" not in word:
            raise TaskFileError(f"expected key=value, got {word!r}", line, col)
        key, val = word.split("=", 1)
        vcol = col + len(key) + 1
        if val.startswith('"') and val.endswith('"') and len(val) >= 2:
            val, vcol = val[1:-1], vcol + 1
        if key == "expect" or key.startswith("expect."):
            expect[key[7:] or "value"] = val
        else:
            if key in args:
                raise TaskFileError(f"repeated argument {key!r}", line, col)
            args[key] = Arg(key, val, vcol)
    task = Task(op, args, expect, line, body)
    if signatures is not None:
        if op not in signatures:
            raise TaskFileError(f"unknown task {op!r}", line, indent + 1)
        resolve_args(block, task, signatures[op])
    block.tasks.append(task)


def resolve_args(block: Block, task: Task, signature: dict):
    """Resolve argument text to objects using ``signature = {key: (kind, default)}``."""
    res = Resolver(block)
    for key in task.args:
        if key not in signature:
            raise TaskFileError(f"{task.op} takes no argument {key!r}", task.line, task.args[key].col - len(key) - 1)
    pending = []
    for key, (kind, default) in signature.items():
        arg = task.args.get(key)
        if arg is None:
            if default is REQUIRED:
                raise TaskFileError(f"{task.op} needs {key}=...", task.line, 1)
            arg = Arg(key, "" if default is None else str(default).lower(), 0, None)
            task.args[key] = arg
            if default is not None:
                arg.value = _resolve(res, kind, arg, task.line)
            continue
        if kind == "element":
            pending.append(arg)
            continue
        arg.value = _resolve(res, kind, arg, task.line)
    for arg in pending:
        alg = task.args.get("algebra")
        if alg is None or alg.value is None:
            raise TaskFileError("elements need an algebra= argument", task.line, arg.col)
        arg.value = res.element(alg.value, arg.text, task.line, arg.col)


def _resolve(res: Resolver, kind: str, arg: Arg, line: int):
    t, c = arg.text, arg.col
    if kind == "ideal":
        return res.ideal(t, line, c)
    if kind == "ideals":
        return res.ideals(t, line, c)
    if kind == "module":
        return res.module(t, line, c)
    if kind == "algebra":
        return res.algebra(t, line, c)
    if kind == "poly":
        return res.poly(t, line, c)
    if kind == "int":
        return res.integer(t, line, c)
    if kind == "matrix":
        return res.matrix(t, line, c)
    if kind == "bool":
        if t.lower() not in ("true", "false"):
            raise TaskFileError(f"expected true or false, got {t!r}", line, c)
        return t.lower() == "true"
    if kind == "choice":
        return t
    raise AssertionError(f"unknown argument kind {kind}")


REQUIRED = object()
