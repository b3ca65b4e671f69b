from fractions import Fraction

import pytest

from mrb.core import scaled_projection
from mrb.opring import FreeModuleElement, OpElement, OperatorRing
from mrb.operated import FreeOperatedModule
from mrb.parser import (
    ExpressionError,
    bind_op_expression,
    bind_operated_expression,
    parse_expression,
    print_free_module_element,
    print_op_element,
    print_operated_element,
)


@pytest.fixture(scope="module")
def ring():
    return OperatorRing(scaled_projection((1, 2)))


@pytest.fixture(scope="module")
def fom(ring):
    return FreeOperatedModule(ring.inst, ["x", "y"])


def test_single_word_coefficient_one(ring):
    ast = parse_expression("e1")
    e = bind_op_expression(ast, ring)
    assert e == ring.element((0,), ())


def test_module_expression_two_terms(ring):
    ast = parse_expression("3/2 * e1 Q[1] e2 - e2 : x")
    # mixing ring words and module words is rejected
    with pytest.raises(ValueError):
        bind_op_expression(ast, ring)
    ast2 = parse_expression("3/2 * (e1 Q[1] e2 : x) - (e2 : x)")
    e = bind_op_expression(ast2, ring)
    assert isinstance(e, FreeModuleElement)
    assert len(e.terms) == 2


def test_syntax_error_position():
    with pytest.raises(ExpressionError) as err:
        parse_expression("e1 Q[")
    assert err.value.column == 6


def test_error_positions_various():
    with pytest.raises(ExpressionError) as err:
        parse_expression("e1 +")
    assert err.value.column == 5
    with pytest.raises(ExpressionError) as err:
        parse_expression("3/2 *")
    assert err.value.column == 6
    with pytest.raises(ExpressionError) as err:
        parse_expression("(e1")
    assert err.value.column == 4


def test_unknown_labels_rejected(ring):
    with pytest.raises(KeyError):
        bind_op_expression(parse_expression("e9"), ring)
    with pytest.raises(KeyError):
        bind_op_expression(parse_expression("e1 Q[7] e1"), ring)


def test_operator_expression_round_trip(ring):
    texts = [
        "e1",
        "e1 Q[1] e2",
        "3/2 * (e1 Q[1] e2) + 2 * (e2 Q[2] e1)",
        "-1 * e1 Q[2] e2",
        "e1 - 1/2 * (e2 Q[1] e1 Q[2] e2)",
        "0",
    ]
    for text in texts:
        e = bind_op_expression(parse_expression(text), ring)
        printed = print_op_element(e, ring.inst)
        again = bind_op_expression(parse_expression(printed), ring)
        assert again == e
        assert print_op_element(again, ring.inst) == printed


def test_canonical_printing_is_sorted(ring):
    e = ring.element((1, 0), ("2",)).scale(Fraction(-1, 2)) + ring.element((0,), ())
    printed = print_op_element(e, ring.inst)
    assert printed == "e1 - 1/2 * (e2 Q[2] e1)"


def test_module_word_round_trip(ring):
    e = FreeModuleElement.from_dict({(ring.word((0, 1), ("1",)), "x"): Fraction(5, 3)})
    printed = print_free_module_element(e, ring.inst)
    assert printed == "5/3 * (e1 Q[1] e2 : x)"
    back = bind_op_expression(parse_expression(printed), ring)
    assert back == e


def test_operated_round_trip(fom):
    e = fom.element((0, 1), ("2",), "x") - fom.element((1,), (), "y").scale(Fraction(2, 7))
    printed = print_operated_element(e, fom.inst)
    back = bind_operated_expression(parse_expression(printed), fom)
    assert back == e
    assert print_operated_element(back, fom.inst) == printed


def test_operated_syntax_shapes(fom):
    e = bind_operated_expression(parse_expression("e1 . 1 . e2 : x"), fom)
    assert e == fom.element((0, 1), ("1",), "x")
    single = bind_operated_expression(parse_expression("e2 : y"), fom)
    assert single == fom.element((1,), (), "y")


def test_operated_rejects_bracket_syntax(fom):
    with pytest.raises(ValueError):
        bind_operated_expression(parse_expression("e1 Q[1] e2 : x"), fom)


def test_op_rejects_dot_syntax(ring):
    with pytest.raises(ValueError):
        bind_op_expression(parse_expression("e1 . 1 . e2 : x"), ring)


def test_zero_literal(ring):
    e = bind_op_expression(parse_expression("0"), ring)
    assert isinstance(e, OpElement)
    assert e.is_zero()
    assert print_op_element(e, ring.inst) == "0"
