"""The administrator's matching-expression language.

Two small grammars, both defined here and documented in docs/grammar.md:

* operation match expressions over substituent operation names::

      expr   := term ("OR" term)*
      term   := factor ("AND" factor)*
      factor := NAME | "(" expr ")"

  AND binds tighter than OR; names resolve case-sensitively.

* data mapping expressions over flattened leaf paths::

      expr    := addsub ("concat" addsub)*
      addsub  := muldiv (("+" | "-") muldiv)*
      muldiv  := primary (("*" | "/") primary)*
      primary := "<" path ">" | NUMBER | STRING | "(" expr ")"

  Path references use angle brackets around the flattened leaf path
  ("<person address city>"); string literals are double-quoted with
  backslash escapes; numeric literals are plain decimals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Mapping, Union

from wsmatch.errors import EvaluationError, ExpressionError
from wsmatch.wsdl import DataSet, ServiceDescription

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class OperationRef:
    name: str


@dataclass(frozen=True)
class OperationConnective:
    op: str  # "AND" | "OR"
    children: tuple["OperationMatchExpr", ...]

    def __post_init__(self):
        if self.op not in ("AND", "OR"):
            raise ValueError(f"unknown connective {self.op}")
        if len(self.children) < 2:
            raise ValueError("connective needs at least two children")


OperationMatchExpr = Union[OperationRef, OperationConnective]


@dataclass(frozen=True)
class PathRef:
    path: str  # normalized flattened leaf path, e.g. "person address city"


@dataclass(frozen=True)
class Literal:
    value: float | str


@dataclass(frozen=True)
class BinaryOp:
    op: str  # "+", "-", "*", "/", "concat"
    left: "DataMappingExpr"
    right: "DataMappingExpr"


DataMappingExpr = Union[PathRef, Literal, BinaryOp]


def operation_refs(expr: OperationMatchExpr) -> tuple[str, ...]:
    """Referenced operation names, in first-appearance order, deduplicated."""
    out: list[str] = []

    def walk(node):
        if isinstance(node, OperationRef):
            if node.name not in out:
                out.append(node.name)
        else:
            for child in node.children:
                walk(child)

    walk(expr)
    return tuple(out)


def path_refs(expr: DataMappingExpr) -> tuple[str, ...]:
    out: list[str] = []

    def walk(node):
        if isinstance(node, PathRef):
            if node.path not in out:
                out.append(node.path)
        elif isinstance(node, BinaryOp):
            walk(node.left)
            walk(node.right)

    walk(expr)
    return tuple(out)


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<path><[^<>]*>)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<name>[A-Za-z_][A-Za-z0-9_.\-]*)
  | (?P<op>[+\-*/()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _lex(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ExpressionError(
                f"unexpected character {text[pos]!r} at position {pos}", pos
            )
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind: str, text: str | None = None) -> _Token:
        token = self.current
        if token.kind != kind or (text is not None and token.text != text):
            want = text or kind
            got = token.text or "end of input"
            raise ExpressionError(
                f"expected {want} but found {got} at position {token.position}",
                token.position,
            )
        return self.advance()


# ---------------------------------------------------------------------------
# Operation match expressions


def parse_operation_expr(
    text: str, substituent: ServiceDescription | None = None
) -> OperationMatchExpr:
    """Parse an AND/OR expression; names are checked against the substituent
    service when one is given."""
    stream = _TokenStream(_lex(text))
    expr = _parse_or(stream)
    token = stream.current
    if token.kind != "end":
        raise ExpressionError(
            f"unexpected {token.text!r} at position {token.position}",
            token.position,
        )
    if substituent is not None:
        known = set(substituent.operation_names())
        for name in operation_refs(expr):
            if name not in known:
                raise ExpressionError(
                    f"unknown operation name {name!r}"
                )
    return expr


def _parse_or(stream: _TokenStream) -> OperationMatchExpr:
    children = [_parse_and(stream)]
    while stream.current.kind == "name" and stream.current.text == "OR":
        stream.advance()
        children.append(_parse_and(stream))
    if len(children) == 1:
        return children[0]
    return OperationConnective("OR", tuple(children))


def _parse_and(stream: _TokenStream) -> OperationMatchExpr:
    children = [_parse_operation_factor(stream)]
    while stream.current.kind == "name" and stream.current.text == "AND":
        stream.advance()
        children.append(_parse_operation_factor(stream))
    if len(children) == 1:
        return children[0]
    return OperationConnective("AND", tuple(children))


def _parse_operation_factor(stream: _TokenStream) -> OperationMatchExpr:
    token = stream.current
    if token.kind == "op" and token.text == "(":
        stream.advance()
        expr = _parse_or(stream)
        stream.expect("op", ")")
        return expr
    if token.kind == "name":
        if token.text in ("AND", "OR"):
            raise ExpressionError(
                f"expected operation name but found {token.text} "
                f"at position {token.position}",
                token.position,
            )
        stream.advance()
        return OperationRef(token.text)
    got = token.text or "end of input"
    raise ExpressionError(
        f"expected operation name but found {got} at position {token.position}",
        token.position,
    )


def render_operation_expr(expr: OperationMatchExpr) -> str:
    """Text form that reparses to a structurally equal tree."""

    def render(node, parent_op: str | None) -> str:
        if isinstance(node, OperationRef):
            return node.name
        inner = f" {node.op} ".join(render(c, node.op) for c in node.children)
        # OR under AND needs parentheses for precedence; a nested connective
        # of the same kind needs them to keep its shape through a reparse
        if (parent_op == "AND" and node.op == "OR") or parent_op == node.op:
            return f"({inner})"
        return inner

    return render(expr, None)


# ---------------------------------------------------------------------------
# Data mapping expressions

_PRECEDENCE = {"concat": 1, "+": 2, "-": 2, "*": 3, "/": 3}


def parse_data_expr(
    text: str, source_leaves: DataSet | set[str] | None = None
) -> DataMappingExpr:
    """Parse an arithmetic/concat expression; path refs are checked against
    ``source_leaves`` when given."""
    stream = _TokenStream(_lex(text))
    expr = _parse_concat(stream)
    token = stream.current
    if token.kind != "end":
        raise ExpressionError(
            f"unexpected {token.text!r} at position {token.position}",
            token.position,
        )
    if source_leaves is not None:
        known = (
            set(source_leaves.sentence_texts)
            if isinstance(source_leaves, DataSet)
            else set(source_leaves)
        )
        for path in path_refs(expr):
            if path not in known:
                raise ExpressionError(f"unresolvable path reference <{path}>")
    return expr


def _parse_concat(stream: _TokenStream) -> DataMappingExpr:
    node = _parse_addsub(stream)
    while stream.current.kind == "name" and stream.current.text == "concat":
        stream.advance()
        node = BinaryOp("concat", node, _parse_addsub(stream))
    return node


def _parse_addsub(stream: _TokenStream) -> DataMappingExpr:
    node = _parse_muldiv(stream)
    while stream.current.kind == "op" and stream.current.text in ("+", "-"):
        op = stream.advance().text
        node = BinaryOp(op, node, _parse_muldiv(stream))
    return node


def _parse_muldiv(stream: _TokenStream) -> DataMappingExpr:
    node = _parse_data_primary(stream)
    while stream.current.kind == "op" and stream.current.text in ("*", "/"):
        op = stream.advance().text
        node = BinaryOp(op, node, _parse_data_primary(stream))
    return node


def _parse_data_primary(stream: _TokenStream) -> DataMappingExpr:
    token = stream.current
    if token.kind == "path":
        stream.advance()
        path = " ".join(token.text[1:-1].split()).lower()
        if not path:
            raise ExpressionError(
                f"empty path reference at position {token.position}",
                token.position,
            )
        return PathRef(path)
    if token.kind == "number":
        stream.advance()
        return Literal(float(token.text))
    if token.kind == "string":
        stream.advance()
        return Literal(_unescape(token.text[1:-1]))
    if token.kind == "op" and token.text == "(":
        stream.advance()
        expr = _parse_concat(stream)
        stream.expect("op", ")")
        return expr
    got = token.text or "end of input"
    raise ExpressionError(
        f"expected value but found {got} at position {token.position}",
        token.position,
    )


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", r"\1", body)


def _escape(body: str) -> str:
    return body.replace("\\", "\\\\").replace('"', '\\"')


def render_number(value: float) -> str:
    """Positional decimal rendering; no exponent notation below 1e15."""
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return format(Decimal(repr(value)), "f")


def render_data_expr(expr: DataMappingExpr) -> str:
    """Text form that reparses to a structurally equal tree."""

    def render(node) -> str:
        if isinstance(node, PathRef):
            return f"<{node.path}>"
        if isinstance(node, Literal):
            if isinstance(node.value, str):
                return f'"{_escape(node.value)}"'
            return render_number(node.value)
        left = render(node.left)
        right = render(node.right)
        prec = _PRECEDENCE[node.op]
        if isinstance(node.left, BinaryOp) and _PRECEDENCE[node.left.op] < prec:
            left = f"({left})"
        if isinstance(node.right, BinaryOp) and _PRECEDENCE[node.right.op] <= prec:
            right = f"({right})"
        return f"{left} {node.op} {right}"

    return render(expr)


# ---------------------------------------------------------------------------
# Evaluation


def render_value(value) -> str:
    if isinstance(value, str):
        return value
    return render_number(float(value))


def _as_number(value, position_hint: str):
    if isinstance(value, bool):
        raise EvaluationError(f"arithmetic on non-numeric value {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            pass
    raise EvaluationError(
        f"arithmetic on non-numeric value {value!r} ({position_hint})"
    )


def evaluate_data_expr(expr: DataMappingExpr, bindings: Mapping[str, object]):
    """Evaluate against leaf-path bindings. Pure; raises EvaluationError on
    missing bindings, non-numeric arithmetic, or division by zero."""
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, PathRef):
        if expr.path not in bindings:
            raise EvaluationError(f"missing binding for <{expr.path}>")
        return bindings[expr.path]
    left = evaluate_data_expr(expr.left, bindings)
    right = evaluate_data_expr(expr.right, bindings)
    if expr.op == "concat":
        return render_value(left) + render_value(right)
    a = _as_number(left, f"left of {expr.op}")
    b = _as_number(right, f"right of {expr.op}")
    if expr.op == "+":
        return a + b
    if expr.op == "-":
        return a - b
    if expr.op == "*":
        return a * b
    if b == 0.0:
        raise EvaluationError("division by zero")
    return a / b


# ---------------------------------------------------------------------------
# Matching plan

# XSD simple types on which arithmetic is considered well-typed.
NUMERIC_TYPES = frozenset(
    {
        "byte", "decimal", "double", "float", "int", "integer", "long",
        "negativeInteger", "nonNegativeInteger", "nonPositiveInteger",
        "positiveInteger", "short", "unsignedByte", "unsignedInt",
        "unsignedLong", "unsignedShort",
    }
)


@dataclass
class MatchingPlan:
    """Administrator-confirmed matching.

    ``operations`` maps each substituted operation name to its AND/OR match
    expression. ``input_mappings`` maps substituent input leaf paths to
    expressions over substituted input leaves; ``output_mappings`` maps
    substituted output leaf paths to expressions over substituent output
    leaves (the reverse direction).
    """

    operations: dict[str, OperationMatchExpr] = field(default_factory=dict)
    input_mappings: dict[str, DataMappingExpr] = field(default_factory=dict)
    output_mappings: dict[str, DataMappingExpr] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not self.operations

    def referenced_operations(self) -> tuple[str, ...]:
        out: list[str] = []
        for expr in self.operations.values():
            for name in operation_refs(expr):
                if name not in out:
                    out.append(name)
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {
            "operations": {
                name: render_operation_expr(expr)
                for name, expr in self.operations.items()
            },
            "inputMappings": {
                leaf: render_data_expr(expr)
                for leaf, expr in self.input_mappings.items()
            },
            "outputMappings": {
                leaf: render_data_expr(expr)
                for leaf, expr in self.output_mappings.items()
            },
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MatchingPlan":
        return cls(
            operations={
                name: parse_operation_expr(text)
                for name, text in data.get("operations", {}).items()
            },
            input_mappings={
                leaf: parse_data_expr(text)
                for leaf, text in data.get("inputMappings", {}).items()
            },
            output_mappings={
                leaf: parse_data_expr(text)
                for leaf, text in data.get("outputMappings", {}).items()
            },
        )


@dataclass(frozen=True)
class Problem:
    severity: str  # "error" | "warning"
    code: str
    message: str

    def to_json_dict(self) -> dict:
        return {"severity": self.severity, "code": self.code, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple[Problem, ...]

    @property
    def errors(self) -> tuple[Problem, ...]:
        return tuple(p for p in self.problems if p.severity == "error")

    @property
    def ok(self) -> bool:
        """True when there are no errors (warnings do not block annotation)."""
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok

    def to_json_dict(self) -> list:
        return [p.to_json_dict() for p in self.problems]

    @classmethod
    def from_json_list(cls, items: list) -> "ValidationReport":
        return cls(
            tuple(
                Problem(p["severity"], p["code"], p["message"]) for p in items
            )
        )


def validate_plan(
    plan: MatchingPlan,
    substituted: ServiceDescription,
    substituent: ServiceDescription,
) -> ValidationReport:
    """Check reference resolution, input coverage, and arithmetic typing.

    Problems come back as report entries; an empty report means the plan is
    ready to annotate.
    """
    problems: list[Problem] = []

    def error(code, message):
        problems.append(Problem("error", code, message))

    def warning(code, message):
        problems.append(Problem("warning", code, message))

    known_substituted = set(substituted.operation_names())
    known_substituent = set(substituent.operation_names())

    for name, expr in plan.operations.items():
        if name not in known_substituted:
            error(
                "unknown_substituted_operation",
                f"plan references unknown substituted operation {name!r}",
            )
        for ref in operation_refs(expr):
            if ref not in known_substituent:
                error(
                    "unknown_substituent_operation",
                    f"expression for {name!r} references unknown operation {ref!r}",
                )

    referenced = [
        name for name in plan.referenced_operations() if name in known_substituent
    ]

    # Input coverage: every input leaf of every referenced substituent
    # operation needs a mapping.
    substituent_input_types: dict[str, str | None] = {}
    for ref in referenced:
        op = substituent.operation(ref)
        uncovered = []
        for leaf in op.input.leaves:
            substituent_input_types.setdefault(leaf.sentence.text, leaf.type_name)
            if leaf.sentence.text not in plan.input_mappings:
                uncovered.append(leaf.sentence.text)
        if uncovered:
            error(
                "uncovered_input_leaves",
                f"uncovered input leaves of {ref}: " + ", ".join(uncovered),
            )

    # Source leaves for input mappings: union over matched substituted
    # operations' inputs.
    substituted_input_types: dict[str, str | None] = {}
    for name in plan.operations:
        op = substituted.operation(name)
        if op is None:
            continue
        for leaf in op.input.leaves:
            substituted_input_types.setdefault(leaf.sentence.text, leaf.type_name)

    for leaf_path, expr in plan.input_mappings.items():
        if leaf_path not in substituent_input_types:
            error(
                "unresolved_mapping_target",
                f"input mapping targets unknown substituent leaf <{leaf_path}>",
            )
        for ref in path_refs(expr):
            if ref not in substituted_input_types:
                error(
                    "unresolved_path_reference",
                    f"input mapping for <{leaf_path}> references unknown "
                    f"substituted leaf <{ref}>",
                )
        _check_arithmetic_types(
            expr, substituted_input_types, warning, f"input mapping for <{leaf_path}>"
        )

    # Output mappings: keys are substituted output leaves; expressions range
    # over the outputs of the operations matched to the owning operation(s).
    for leaf_path, expr in plan.output_mappings.items():
        owners = [
            name
            for name in plan.operations
            if (op := substituted.operation(name)) is not None
            and op.output.find_leaf(leaf_path) is not None
        ]
        if not owners:
            error(
                "unresolved_mapping_target",
                f"output mapping targets unknown substituted output leaf "
                f"<{leaf_path}>",
            )
            continue
        allowed_types: dict[str, str | None] = {}
        for owner in owners:
            for ref in operation_refs(plan.operations[owner]):
                op = substituent.operation(ref)
                if op is None:
                    continue
                for leaf in op.output.leaves:
                    allowed_types.setdefault(leaf.sentence.text, leaf.type_name)
        for ref in path_refs(expr):
            if ref not in allowed_types:
                error(
                    "unresolved_path_reference",
                    f"output mapping for <{leaf_path}> references leaf <{ref}> "
                    f"outside the matched operations' outputs",
                )
        _check_arithmetic_types(
            expr, allowed_types, warning, f"output mapping for <{leaf_path}>"
        )

    return ValidationReport(tuple(problems))


def _check_arithmetic_types(expr, leaf_types, warning, where):
    def walk(node, under_arithmetic):
        if isinstance(node, PathRef):
            if under_arithmetic:
                type_name = leaf_types.get(node.path)
                if type_name is not None and type_name not in NUMERIC_TYPES:
                    warning(
                        "type_clash",
                        f"{where}: arithmetic over non-numeric leaf <{node.path}> "
                        f"(xsd:{type_name})",
                    )
        elif isinstance(node, BinaryOp):
            arithmetic = node.op != "concat"
            walk(node.left, under_arithmetic or arithmetic)
            walk(node.right, under_arithmetic or arithmetic)

    walk(expr, False)
