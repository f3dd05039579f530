# Expression: recursive descent parser, printer and evaluator
import numpy as np
from dataclasses import dataclass, field
from typing import Tuple, Union
from .tokenizer import tokenize, ExpressionSyntaxError, UnknownIdentifierError, ArityError
from .functions import FUNCTIONS, CONSTANTS, VARIABLES, ExpressionDomainError, divide, power, first_index


@dataclass(frozen=True)
class Constant:
    value: float
    name: str = None  # 'pi' for named constants

@dataclass(frozen=True)
class Variable:
    name: str

@dataclass(frozen=True)
class Unary:
    op: str
    operand: 'Node'

@dataclass(frozen=True)
class Binary:
    op: str
    left: 'Node'
    right: 'Node'

@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple['Node', ...]


Node = Union[Constant, Variable, Unary, Binary, Call]


@dataclass(frozen=True)
class Expression:
    """
    Parsed scalar expression over the variables t, x, u, v.
    Immutable, so evaluation is reentrant. Equality compares the syntax tree only.
    """
    ast: Node
    source: str = field(default='', compare=False)

    def __str__(self):
        return self.source or to_source(self.ast)

    @property
    def variables(self) -> frozenset:
        return frozenset(_variables(self.ast))

    def evaluate(self, t=0.0, x=0.0, u=0.0, v=0.0):
        return evaluate(self, t, x, u, v)


class _Parser:
    """
    expression := term (('+' | '-') term)*
    term       := unary (('*' | '/') unary)*
    unary      := ('-' | '+') unary | power
    power      := atom ('^' unary)?
    atom       := number | name | name '(' args ')' | '(' expression ')'
    """

    def __init__(self, source):
        self.source = source
        self.tokens = tokenize(source)
        self.position = 0

    @property
    def current(self):
        return self.tokens[self.position]

    def advance(self):
        token = self.tokens[self.position]
        self.position += 1
        return token

    def expect(self, kind):
        token = self.current
        if token.kind != kind:
            found = token.text or 'end of input'
            raise ExpressionSyntaxError(f'expected "{kind}" but found "{found}"', token.offset)
        return self.advance()

    def parse(self):
        node = self.expression()
        if self.current.kind != 'end':
            raise ExpressionSyntaxError(f'unexpected "{self.current.text}"', self.current.offset)
        return node

    def expression(self):
        node = self.term()
        while self.current.kind == 'op' and self.current.text in '+-':
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.current.kind == 'op' and self.current.text in '*/':
            op = self.advance().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        if self.current.kind == 'op' and self.current.text in '+-':
            op = self.advance().text
            operand = self.unary()
            return operand if op == '+' else Unary('-', operand)
        return self.power()

    def power(self):
        base = self.atom()
        if self.current.kind == 'op' and self.current.text == '^':
            self.advance()
            # right operand parsed as unary: 2^3^2 = 2^(3^2) and 2^-1 is legal
            return Binary('^', base, self.unary())
        return base

    def atom(self):
        token = self.current
        if token.kind == 'number':
            self.advance()
            value = float(token.text)
            if not np.isfinite(value):
                raise ExpressionSyntaxError(f'number "{token.text}" out of range', token.offset)
            return Constant(value)
        if token.kind == '(':
            self.advance()
            node = self.expression()
            self.expect(')')
            return node
        if token.kind == 'name':
            self.advance()
            if self.current.kind == '(':
                return self.call(token)
            if token.text in VARIABLES:
                return Variable(token.text)
            if token.text in CONSTANTS:
                return Constant(CONSTANTS[token.text], token.text)
            raise UnknownIdentifierError(token.text, token.offset)
        found = token.text or 'end of input'
        raise ExpressionSyntaxError(f'unexpected "{found}"', token.offset)

    def call(self, name_token):
        function = FUNCTIONS.get(name_token.text)
        if function is None:
            raise UnknownIdentifierError(name_token.text, name_token.offset)
        self.expect('(')
        args = []
        if self.current.kind != ')':
            args.append(self.expression())
            while self.current.kind == ',':
                self.advance()
                args.append(self.expression())
        self.expect(')')
        if len(args) != function.arity:
            raise ArityError(function.name, function.arity, len(args), name_token.offset)
        return Call(function.name, tuple(args))


def parse(source: str) -> Expression:
    """
    Parse expression text.
    @source: str, non-empty, e.g. '2*u + v^2' or 'min(u, 0.5)*sin(x)'
    @return: Expression
    """
    if source is None or source.strip() == '':
        raise ExpressionSyntaxError('empty expression', 0)
    return Expression(_Parser(source).parse(), source)


def to_source(node: Node) -> str:
    """Fully parenthesized text of a syntax tree; parse(to_source(n)).ast == n"""
    if isinstance(node, Constant):
        return node.name if node.name is not None else repr(float(node.value))
    if isinstance(node, Variable):
        return node.name
    if isinstance(node, Unary):
        return f'({node.op}{to_source(node.operand)})'
    if isinstance(node, Binary):
        return f'({to_source(node.left)} {node.op} {to_source(node.right)})'
    if isinstance(node, Call):
        return f'{node.name}(' + ', '.join(to_source(a) for a in node.args) + ')'
    raise TypeError(f'not an expression node: {node!r}')


def _variables(node):
    if isinstance(node, Variable):
        yield node.name
    elif isinstance(node, Unary):
        yield from _variables(node.operand)
    elif isinstance(node, Binary):
        yield from _variables(node.left)
        yield from _variables(node.right)
    elif isinstance(node, Call):
        for arg in node.args:
            yield from _variables(arg)


_BINARY = {
    '+': np.add,
    '-': np.subtract,
    '*': np.multiply,
    '/': divide,
    '^': power,
}


def _evaluate(node, bindings):
    if isinstance(node, Constant):
        return np.float64(node.value)
    if isinstance(node, Variable):
        return bindings[node.name]
    if isinstance(node, Unary):
        return np.negative(_evaluate(node.operand, bindings))
    if isinstance(node, Binary):
        return _BINARY[node.op](_evaluate(node.left, bindings), _evaluate(node.right, bindings))
    if isinstance(node, Call):
        args = [_evaluate(a, bindings) for a in node.args]
        return FUNCTIONS[node.name].apply(*args)
    raise TypeError(f'not an expression node: {node!r}')


def evaluate(e: Expression, t=0.0, x=0.0, u=0.0, v=0.0):
    """
    Evaluate at the bindings. Scalars give a float; arrays are broadcast against each other
    and give an array of the broadcast shape.
    @raise ExpressionDomainError: division by zero, log/sqrt outside their domain,
        negative base with non-integer exponent, or any other NaN-producing operation
    """
    bindings = {
        't': np.asarray(t, dtype=float),
        'x': np.asarray(x, dtype=float),
        'u': np.asarray(u, dtype=float),
        'v': np.asarray(v, dtype=float),
    }
    with np.errstate(all='ignore'):
        result = _evaluate(e.ast, bindings)
    result = np.asarray(result, dtype=float)
    nan = np.isnan(result)
    if np.any(nan):
        raise ExpressionDomainError(f'"{e}" is undefined', first_index(nan))
    shape = np.broadcast_shapes(*(b.shape for b in bindings.values()))
    if shape == ():
        return float(result)
    return np.broadcast_to(result, shape).copy() if result.shape != shape else result
