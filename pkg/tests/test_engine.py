import pytest

from wsmatch.engine import (
    Weights,
    combine_operation_scores,
    data_set_similarity,
    operation_similarity,
    rank_candidates,
    service_similarity,
)
from wsmatch.textsim import jaro_winkler, tokenize
from wsmatch.wsdl import DataSet, EMPTY_DATA_SET, LeafPath, parse_wsdl


def data_set(*texts):
    leaves = tuple(
        LeafPath(tokenize(t), tuple(t.split()), None) for t in texts
    )
    return DataSet(leaves)


# -- weights ------------------------------------------------------------------


def test_weights_defaults():
    w = Weights()
    assert (w.p1, w.p2, w.p3) == (1.0, 1.0, 2.0)


def test_weights_validation():
    with pytest.raises(ValueError):
        Weights(-1, 1, 1)
    with pytest.raises(ValueError):
        Weights(0, 0, 0)


# -- data set similarity ------------------------------------------------------


def test_identical_data_sets(calc):
    d = data_set("get weather request zip")
    assert data_set_similarity(calc, d, d) == 1.0


def test_empty_set_conventions(calc):
    d = data_set("city")
    assert data_set_similarity(calc, EMPTY_DATA_SET, EMPTY_DATA_SET) == 1.0
    assert data_set_similarity(calc, EMPTY_DATA_SET, d) == 0.0
    assert data_set_similarity(calc, d, EMPTY_DATA_SET) == 0.0


def test_single_sentence_pair_equals_the_oracle_value(calc):
    # out-of-lexicon single-token sentences: the score is the plain
    # Jaro-Winkler value (0.5 exactly for this pair: two matches, one
    # transposition, no shared prefix), low enough to never count as coverage
    left = data_set("zzqa")
    right = data_set("qqzz")
    expected = jaro_winkler("zzqa", "qqzz")
    assert expected == pytest.approx(0.5, abs=1e-12)
    assert data_set_similarity(calc, left, right) == pytest.approx(expected, abs=1e-12)


# -- operation similarity --------------------------------------------------------


def test_combine_is_the_weighted_mean():
    assert combine_operation_scores(0.5, 0.5, 1.0, Weights(1, 1, 2)) == 0.75
    assert combine_operation_scores(0.0, 0.0, 0.0, Weights(1, 1, 2)) == 0.0
    assert combine_operation_scores(1.0, 1.0, 1.0, Weights(1, 1, 2)) == 1.0


def test_combine_monotonic():
    base = combine_operation_scores(0.3, 0.4, 0.5)
    assert combine_operation_scores(0.4, 0.4, 0.5) >= base
    assert combine_operation_scores(0.3, 0.5, 0.5) >= base
    assert combine_operation_scores(0.3, 0.4, 0.6) >= base


def test_operation_self_similarity(calc, weather_a):
    op = weather_a.operations[0]
    assert operation_similarity(calc, op, op) == pytest.approx(1.0, abs=1e-12)


def test_operation_similarity_uses_weights(calc, weather_a, weather_b):
    f = weather_a.operation("GetWeather")
    g = weather_b.operation("GetCity")
    # heavier name weight moves the score toward the name similarity
    name_heavy = operation_similarity(calc, f, g, Weights(1, 1, 100))
    name_sim = calc.sentence_similarity(f.name_sentence, g.name_sentence)
    assert name_heavy == pytest.approx(name_sim, abs=0.05)


# -- service similarity --------------------------------------------------------------


def test_service_self_similarity(calc, weather_a):
    score, matrix = service_similarity(calc, weather_a, weather_a)
    assert score == pytest.approx(1.0, abs=1e-12)
    assert matrix.rows == matrix.cols == 2
    assert matrix.values[0][0] == pytest.approx(1.0, abs=1e-12)


def test_service_similarity_symmetric(calc, weather_a, weather_b):
    ab, _ = service_similarity(calc, weather_a, weather_b)
    ba, _ = service_similarity(calc, weather_b, weather_a)
    assert ab == pytest.approx(ba, abs=1e-12)


def test_two_cell_directed_average(calc):
    # one perfectly matched operation plus an unrelated extra in B:
    # score = min(1, (1 + s)/2) where s is the unrelated pair's score
    doc_a = _single_op_wsdl("OnlyOp", "alphaleaf", "betaleaf")
    doc_b = _two_op_wsdl()
    a = parse_wsdl(doc_a)
    b = parse_wsdl(doc_b)
    score, matrix = service_similarity(calc, a, b)
    s = matrix.values[0][1]
    assert matrix.values[0][0] == pytest.approx(1.0, abs=1e-12)
    assert score == pytest.approx(min(1.0, (1.0 + s) / 2.0), abs=1e-12)
    assert score < 1.0


def _single_op_wsdl(op_name, in_leaf, out_leaf, extra=""):
    return f"""<?xml version="1.0"?>
    <wsdl:definitions name="S" targetNamespace="urn:s"
        xmlns:wsdl="http://schemas.xmlsoap.org/wsdl/"
        xmlns:tns="urn:s" xmlns:xs="http://www.w3.org/2001/XMLSchema">
      <wsdl:types><xs:schema targetNamespace="urn:s">
        <xs:element name="{in_leaf}" type="xs:string"/>
        <xs:element name="{out_leaf}" type="xs:string"/>
      </xs:schema></wsdl:types>
      <wsdl:message name="In"><wsdl:part name="p" element="tns:{in_leaf}"/></wsdl:message>
      <wsdl:message name="Out"><wsdl:part name="p" element="tns:{out_leaf}"/></wsdl:message>
      <wsdl:portType name="Port">
        <wsdl:operation name="{op_name}">
          <wsdl:input message="tns:In"/><wsdl:output message="tns:Out"/>
        </wsdl:operation>
        {extra}
      </wsdl:portType>
    </wsdl:definitions>""".encode()


def _two_op_wsdl():
    return b"""<?xml version="1.0"?>
    <wsdl:definitions name="S2" targetNamespace="urn:s2"
        xmlns:wsdl="http://schemas.xmlsoap.org/wsdl/"
        xmlns:tns="urn:s2" xmlns:xs="http://www.w3.org/2001/XMLSchema">
      <wsdl:types><xs:schema targetNamespace="urn:s2">
        <xs:element name="alphaleaf" type="xs:string"/>
        <xs:element name="betaleaf" type="xs:string"/>
        <xs:element name="qwjvx" type="xs:string"/>
        <xs:element name="kzmpy" type="xs:string"/>
      </xs:schema></wsdl:types>
      <wsdl:message name="In"><wsdl:part name="p" element="tns:alphaleaf"/></wsdl:message>
      <wsdl:message name="Out"><wsdl:part name="p" element="tns:betaleaf"/></wsdl:message>
      <wsdl:message name="UIn"><wsdl:part name="p" element="tns:qwjvx"/></wsdl:message>
      <wsdl:message name="UOut"><wsdl:part name="p" element="tns:kzmpy"/></wsdl:message>
      <wsdl:portType name="Port">
        <wsdl:operation name="OnlyOp">
          <wsdl:input message="tns:In"/><wsdl:output message="tns:Out"/>
        </wsdl:operation>
        <wsdl:operation name="hrgle">
          <wsdl:input message="tns:UIn"/><wsdl:output message="tns:UOut"/>
        </wsdl:operation>
      </wsdl:portType>
    </wsdl:definitions>"""


# -- ranking -----------------------------------------------------------------------


def test_identical_copy_ranks_first(calc, weather_a, weather_b, unrelated):
    copy = parse_wsdl(weather_a.raw_document, base_uri="copy.wsdl")
    ranked, failures = rank_candidates(calc, weather_a, [unrelated, copy, weather_b])
    assert not failures
    assert ranked[0].service is copy
    assert ranked[0].score == pytest.approx(1.0, abs=1e-9)
    assert [rc.service.name for rc in ranked[1:]] == ["WeatherB", "Unrelated"]


def test_empty_pool(calc, weather_a):
    ranked, failures = rank_candidates(calc, weather_a, [])
    assert ranked == [] and failures == []


def test_ranking_is_sorted_and_a_permutation(calc, weather_a, weather_b, relations_a, unrelated):
    pool = [weather_b, relations_a, unrelated]
    ranked, _ = rank_candidates(calc, weather_a, pool)
    assert {id(rc.service) for rc in ranked} == {id(s) for s in pool}
    scores = [rc.score for rc in ranked]
    assert scores == sorted(scores, reverse=True)


def test_ranking_determinism(calc, weather_a, weather_b, unrelated):
    first, _ = rank_candidates(calc, weather_a, [weather_b, unrelated])
    second, _ = rank_candidates(calc, weather_a, [weather_b, unrelated])
    assert [(rc.service.name, rc.score) for rc in first] == [
        (rc.service.name, rc.score) for rc in second
    ]
