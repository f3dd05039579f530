import math
import time
import numpy as np
import pytest
from NonlocalParabolic.expression import (
    parse, evaluate, to_source, tokenize, Constant, Variable, Unary, Binary, Call,
    ExpressionError, ExpressionSyntaxError, UnknownIdentifierError, ArityError, ExpressionDomainError,
    check_nonnegative, check_between, constant_value, box_grid,
)
from NonlocalParabolic.utils import set_logging_level
set_logging_level()


def test_precedence():
    assert evaluate(parse('2*3+4')) == 10
    assert evaluate(parse('2+3*4')) == 14
    assert evaluate(parse('1-2-3')) == -4
    assert evaluate(parse('8/4/2')) == 1
    assert evaluate(parse('2^3^2')) == 512
    assert evaluate(parse('-2^2')) == -4
    assert evaluate(parse('2^-1')) == 0.5
    assert evaluate(parse('(1+2)*3')) == 9
    assert evaluate(parse('+u'), u=3.0) == 3.0
    assert evaluate(parse('--u'), u=3.0) == 3.0


def test_functions_and_constants():
    assert evaluate(parse('sin(pi/2)')) == pytest.approx(1.0)
    assert evaluate(parse('min(u, 0.5)'), u=2.0) == 0.5
    assert evaluate(parse('max(u, v)'), u=1.0, v=3.0) == 3.0
    assert evaluate(parse('exp(log(2))')) == pytest.approx(2.0)
    assert evaluate(parse('abs(-3) + sqrt(16)')) == 7.0
    assert evaluate(parse('tanh(0) + cos(0)')) == 1.0
    assert evaluate(parse('1e-3 * 2.5E2')) == pytest.approx(0.25)
    assert parse('pi').ast == Constant(math.pi, 'pi')


def test_broadcasting():
    e = parse('u*x + t')
    t, x = np.meshgrid(np.linspace(0, 1, 3), np.linspace(0, 2, 5), indexing='ij')
    values = evaluate(e, t=t, x=x, u=2.0)
    assert values.shape == (3, 5)
    assert np.allclose(values, 2 * x + t)
    # a constant still comes back in the broadcast shape
    assert evaluate(parse('3'), u=np.zeros(4)).shape == (4,)
    assert isinstance(evaluate(parse('u + 1'), u=1.0), float)


def test_variables():
    assert parse('u*sin(x) + 2').variables == frozenset({'u', 'x'})
    assert parse('pi/4').variables == frozenset()


def test_syntax_errors():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse('2 + * 3')
    assert info.value.offset == 4
    with pytest.raises(ExpressionSyntaxError):
        parse('')
    with pytest.raises(ExpressionSyntaxError):
        parse('(u + 1')
    with pytest.raises(ExpressionSyntaxError) as info:
        parse('u $ v')
    assert info.value.offset == 2
    with pytest.raises(ExpressionSyntaxError):
        parse('u v')


def test_unknown_and_arity():
    with pytest.raises(UnknownIdentifierError) as info:
        parse('2*w')
    assert info.value.name == 'w'
    assert info.value.offset == 2
    with pytest.raises(UnknownIdentifierError):
        parse('foo(u)')
    with pytest.raises(ArityError):
        parse('min(u)')
    with pytest.raises(ArityError):
        parse('sin(u, v)')
    # all parse errors share one base class
    for text in ('2 +', 'w', 'max(1)'):
        with pytest.raises(ExpressionError):
            parse(text)


def test_domain_errors():
    with pytest.raises(ExpressionDomainError):
        evaluate(parse('1/u'), u=0.0)
    with pytest.raises(ExpressionDomainError):
        evaluate(parse('log(u)'), u=0.0)
    with pytest.raises(ExpressionDomainError):
        evaluate(parse('sqrt(u)'), u=-1.0)
    with pytest.raises(ExpressionDomainError):
        evaluate(parse('u^0.5'), u=-4.0)
    with pytest.raises(ExpressionDomainError):
        evaluate(parse('0^-1'))
    with pytest.raises(ExpressionDomainError) as info:
        evaluate(parse('log(u)'), u=np.array([1.0, 2.0, 0.0, -1.0]))
    assert info.value.index == (2,)
    # integer exponents of negative bases are fine
    assert evaluate(parse('u^3'), u=-2.0) == -8.0


def test_tokenize_offsets_are_bytes():
    tokens = tokenize('u + 1.5e3')
    assert [token.kind for token in tokens] == ['name', 'op', 'number', 'end']
    assert tokens[2].offset == 4
    assert tokens[-1].offset == 9


def _random_node(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        choice = rng.integers(3)
        if choice == 0:
            return Constant(float(rng.integers(1, 100)) / 8)
        if choice == 1:
            return Constant(math.pi, 'pi')
        return Variable(str(rng.choice(['t', 'x', 'u', 'v'])))
    kind = rng.integers(4)
    if kind == 0:
        return Unary('-', _random_node(rng, depth - 1))
    if kind == 1:
        op = str(rng.choice(['+', '-', '*', '/', '^']))
        return Binary(op, _random_node(rng, depth - 1), _random_node(rng, depth - 1))
    if kind == 2:
        return Call(str(rng.choice(['sin', 'cos', 'tanh', 'abs', 'exp'])), (_random_node(rng, depth - 1),))
    return Call(str(rng.choice(['min', 'max'])), (_random_node(rng, depth - 1), _random_node(rng, depth - 1)))


def test_random_round_trip():
    rng = np.random.default_rng(7)
    start = time.time()
    for _ in range(1000):
        node = _random_node(rng, 4)
        text = to_source(node)
        assert parse(text).ast == node, text
        # printing the reparsed tree is stable
        assert to_source(parse(text).ast) == text
    assert time.time() - start < 5


def test_equality_ignores_source():
    assert parse('u+1') == parse('u + 1')
    assert parse('(u)') == parse('u')
    assert parse('u+1') != parse('1+u')
    assert str(parse('u + 1')) == 'u + 1'


def test_sample_checks():
    box = {'t': (0.0, 1.0), 'x': (0.0, math.pi), 'u': (0.0, 2.0), 'v': (0.0, 2.0)}
    assert check_nonnegative(parse('u*v + sin(x)'), box) == []
    errors = check_nonnegative(parse('u - 1'), box)
    assert len(errors) == 1 and 'u=0' in errors[0]
    assert check_between(parse('2*u'), 1.0, 3.0, {'u': (0.0, 5.0)}) == []
    errors = check_between(parse('u^2'), 1.0, 1.0, {'u': (0.0, 5.0)})
    assert len(errors) == 2
    grid = box_grid({'u': (1.0, 1.0), 'x': (0.0, 1.0)}, 5)
    assert grid['u'].size == 5 and np.all(grid['u'] == 1.0)


def test_constant_value():
    assert constant_value('pi/4') == pytest.approx(math.pi / 4)
    assert constant_value('1e-8') == 1e-8
    with pytest.raises(ExpressionError):
        constant_value('u + 1')


if __name__ == '__main__':
    test_precedence()
    test_random_round_trip()
