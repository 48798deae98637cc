import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperam.config import Config, ConfigError, load_config, parse_number, parse_vector, preset_names
from hyperam.dynamics import format_number
from hyperam.rcnn import ExcitationKind


@pytest.mark.parametrize(
    "text, dim, want",
    [
        ("1-k", 4, [1, 0, 0, -1]),
        ("-i+j", 4, [0, -1, 1, 0]),
        ("i", 2, [0, 1]),
        ("-1", 1, [-1]),
        ("0.5-2i3", 8, [0.5, 0, 0, -2, 0, 0, 0, 0]),
        ("(1, 2, 3, 4)", 4, [1, 2, 3, 4]),
        ("1e-3i", 2, [0, 1e-3]),
    ],
)
def test_parse_number(text, dim, want):
    assert np.array_equal(parse_number(text, dim), want)


@pytest.mark.parametrize("text, dim", [("", 2), ("j", 2), ("i9", 4), ("1+", 2), ("(1, 2)", 4), ("x", 2)])
def test_parse_number_rejects(text, dim):
    with pytest.raises(ValueError):
        parse_number(text, dim)


@given(st.sampled_from([1, 2, 4, 8]).flatmap(lambda d: st.lists(st.integers(-5, 5), min_size=d, max_size=d)))
def test_format_parse_round_trip(coeffs):
    p = np.array(coeffs, dtype=float)
    assert np.array_equal(parse_number(format_number(p), len(p)), p)


def test_parse_vector():
    assert parse_vector("1, -i", 2).tolist() == [[1, 0], [0, -1]]
    assert parse_vector("(1, 0), (0, 1)", 2).tolist() == [[1, 0], [0, 1]]
    with pytest.raises(ValueError):
        parse_vector(" , ", 2)


TEXT = """\
[experiment]
kind = dynamics
# comment line
[algebra]
name = complex
[activation]
kind = csgn
K = four
[excitation]
alpha = 1/2
beta = exp(-1)
"""


def test_bad_value_reports_its_line():
    cfg = Config(TEXT, "t.ini")
    with pytest.raises(ConfigError, match=r"^t\.ini:8: 'K' must be an integer"):
        cfg.activation()


def test_fractions_and_exponentials():
    ex = Config(TEXT).excitation()
    assert ex.alpha == 0.5
    assert ex.beta == pytest.approx(math.exp(-1), rel=1e-15)


def test_scaled_exponential():
    cfg = Config("[excitation]\na = 10\nm = 2\n")
    ex = cfg.excitation(n_neurons=100, self_form=99.0)
    assert ex.alpha == pytest.approx(10 / 200) and ex.beta == pytest.approx(math.exp(-10))
    with pytest.raises(ConfigError, match="network size"):
        Config("[excitation]\na = 10\n").excitation()


def test_other_excitations():
    assert Config("[excitation]\nkind = potential\nL = 3\n").excitation().kind is ExcitationKind.POTENTIAL
    with pytest.raises(ConfigError, match=":2:"):
        Config("[excitation]\nkind = cubic\n").excitation()


def test_missing_section_and_key():
    with pytest.raises(ConfigError, match="missing required key 'name'"):
        Config("[algebra]\ninvolution = natural\n").algebra()
    with pytest.raises(ConfigError, match=":1:.*no fundamental memories"):
        Config("[memories]\n").memories(2)


def test_bad_memory_line():
    cfg = Config("[memories]\nu1 = 1, i\nu2 = 1, q\n", "m.ini")
    with pytest.raises(ConfigError, match=r"m\.ini:3: memory u2"):
        cfg.memories(2)


def test_inline_algebra_table():
    text = "[algebra]\nname = dual\ndim = 2\ntable =\n  1 1 0 0\n"
    spec = Config(text).algebra()
    assert spec.dim == 2 and spec.name == "dual"
    assert not spec.table.any()


def test_syntax_error_has_line():
    with pytest.raises(ConfigError, match=":2:"):
        Config("[a]\nno separator here\n")


def test_echo_lists_resolved_keys():
    echo = Config(TEXT).echo()
    assert "activation.K = four" in echo and "excitation.alpha = 1/2" in echo


def test_presets_load():
    names = preset_names()
    for want in ("example1", "example1_caption", "example5", "energy_hyperbolic", "image_recall", "verify"):
        assert want in names
    assert load_config("preset:example2").source == "preset:example2"
    with pytest.raises(ConfigError, match="no such config"):
        load_config("no_such_preset")
