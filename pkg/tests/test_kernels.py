"""Both kernel backends must agree with each other and with the oracle."""

import random

import pytest

from wsmatch._kernels import _pure

try:
    from wsmatch._kernels import _speedups
except ImportError:
    _speedups = None

from oracles import reference_jaro_winkler

BACKENDS = [_pure] if _speedups is None else [_pure, _speedups]


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param


def test_jaro_winkler_identity(backend):
    assert backend.jaro_winkler("weather", "weather") == 1.0


def test_jaro_winkler_empty_conventions(backend):
    assert backend.jaro_winkler("", "") == 1.0
    assert backend.jaro_winkler("", "abc") == 0.0
    assert backend.jaro_winkler("abc", "") == 0.0


def test_jaro_winkler_no_matches(backend):
    assert backend.jaro_winkler("abc", "xyz") == 0.0


def test_jaro_winkler_known_value(backend):
    # j = 0.9444..., prefix length 3 -> 0.9611...
    assert backend.jaro_winkler("martha", "marhta") == pytest.approx(0.9611, abs=1e-4)


def test_jaro_winkler_case_insensitive(backend):
    assert backend.jaro_winkler("ZipCode", "zipcode") == 1.0


def test_hausdorff_reduce_values(backend):
    assert backend.hausdorff_reduce([[1.0, 0.0], [0.0, 1.0]]) == 1.0
    assert backend.hausdorff_reduce([[0.8]]) == pytest.approx(0.8)
    assert backend.hausdorff_reduce(
        [[0.9, 0.1, 0.2], [0.3, 0.7, 0.4]]
    ) == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_literal_reduce_is_the_printed_form(backend):
    # max of averaged row/column minima: identity matrix scores 0, not 1
    assert backend.literal_hausdorff_reduce([[1.0, 0.0], [0.0, 1.0]]) == 0.0
    assert backend.literal_hausdorff_reduce([[0.8]]) == pytest.approx(0.8)


@pytest.mark.skipif(_speedups is None, reason="compiled kernels unavailable")
def test_backends_agree_on_random_inputs():
    rng = random.Random(20240811)
    alphabet = "abcdefgh"
    for _ in range(2000):
        s1 = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
        s2 = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
        assert _pure.jaro_winkler(s1, s2) == pytest.approx(
            _speedups.jaro_winkler(s1, s2), abs=1e-12
        )
    for _ in range(500):
        n, m = rng.randint(1, 6), rng.randint(1, 6)
        matrix = [[rng.random() for _ in range(m)] for _ in range(n)]
        assert _pure.hausdorff_reduce(matrix) == pytest.approx(
            _speedups.hausdorff_reduce(matrix), abs=1e-12
        )
        assert _pure.literal_hausdorff_reduce(matrix) == pytest.approx(
            _speedups.literal_hausdorff_reduce(matrix), abs=1e-12
        )


def test_pure_backend_matches_reference_oracle():
    rng = random.Random(7)
    alphabet = "abcdxyz"
    for _ in range(2000):
        s1 = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 10)))
        s2 = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 10)))
        assert _pure.jaro_winkler(s1, s2) == pytest.approx(
            reference_jaro_winkler(s1, s2), abs=1e-9
        )
