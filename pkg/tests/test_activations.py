import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hyperam.activations import OUT_OF_DOMAIN, ActivationFn, StateAlphabet, apply, check_b_function, in_domain
from hyperam.algebra import bilinear, cayley_dickson, get_algebra, involute, mul, quaternion

from conftest import numbers

FINITE_KINDS = [
    ("bipolar_sign", None, 1),
    ("csgn", 4, 2),
    ("csgn", 7, 2),
    ("csgn_conjugated", 4, 2),
    ("twin_multistate", 4, 4),
    ("twin_multistate", 16, 4),
    ("split_sign", None, 8),
]
ALL_KINDS = FINITE_KINDS + [("continuous_sigma", None, 4), ("continuous_sigma", None, 8)]


def csgn_oracle(z: complex, K: int) -> complex:
    """Nearest K-th root of unity by phase, via cmath."""
    theta = cmath.phase(z) % (2 * math.pi)
    k = round(theta / (2 * math.pi / K)) % K
    return cmath.exp(2j * math.pi * k / K)


# -- worked examples ---------------------------------------------------------


def test_bipolar_negative():
    assert np.array_equal(apply(ActivationFn("bipolar_sign"), [-3.2]), [-1])


def test_csgn_first_sector():
    assert np.allclose(apply(ActivationFn("csgn", 4), [0.9, 0.1]), [1, 0])


def test_csgn_boundary_ray_is_out_of_domain():
    fn = ActivationFn("csgn", 4)
    assert apply(fn, [1.0, 1.0]) is OUT_OF_DOMAIN
    assert not in_domain(fn, [1.0, 1.0])
    assert in_domain(fn, [1.0, 1.0 + 1e-9])


def test_sigma_quaternion():
    assert np.allclose(apply(ActivationFn("continuous_sigma"), [0, 3, 0, 4]), [0, 0.6, 0, 0.8])


def test_split_sign_octonion():
    out = apply(ActivationFn("split_sign"), [2, -1, 3, -4, 1, 1, -2, 5])
    assert np.array_equal(out, [1, -1, 1, -1, 1, 1, -1, 1])


def test_twin_example():
    # (0.9 + 0.1i) + (0.1 + 0.9i) j  ->  1 + i j = 1 + k
    out = apply(ActivationFn("twin_multistate", 4), [0.9, 0.1, 0.1, 0.9])
    assert np.allclose(out, [1, 0, 0, 1])


@pytest.mark.parametrize(
    "kind, K, h",
    [
        ("bipolar_sign", None, [0.0]),
        ("split_sign", None, [1, 0, 0, 0, 0, 0, 0, 0]),
        ("continuous_sigma", None, [0, 0, 0, 0]),
        ("csgn", 8, [0, 0]),
        ("twin_multistate", 4, [1, 0.5, 0, 0]),
    ],
)
def test_out_of_domain(kind, K, h):
    fn = ActivationFn(kind, K)
    assert not in_domain(fn, h)
    assert apply(fn, h) is OUT_OF_DOMAIN


def test_sigma_nonzero_is_in_domain():
    assert in_domain(ActivationFn("continuous_sigma"), [1e-300, 0, 0, 0])


# -- codomains --------------------------------------------------------------


def test_csgn_codomain_k4_is_exact():
    pts = ActivationFn("csgn", 4).codomain().elements
    assert np.array_equal(pts, [[1, 0], [0, 1], [-1, 0], [0, -1]])


@pytest.mark.parametrize("K", [3, 4, 16, 256])
def test_csgn_codomain_is_roots_of_unity(K):
    pts = ActivationFn("csgn", K).codomain().elements
    want = [cmath.exp(2j * math.pi * k / K) for k in range(K)]
    assert np.allclose(pts[:, 0] + 1j * pts[:, 1], want, atol=1e-15)


def test_twin_codomain_k4_matches_listed_set():
    # {±1 ± j, ±1 ± k, ±i ± j, ±i ± k}
    els = ActivationFn("twin_multistate", 4).codomain().elements
    assert len(els) == 16
    listed = set()
    for a in ([1, 0], [-1, 0], [0, 1], [0, -1]):
        for b in ([0, 0, 1, 0], [0, 0, -1, 0], [0, 0, 0, 1], [0, 0, 0, -1]):
            listed.add(tuple(np.array(a + [0, 0]) + np.array(b)))
    assert {tuple(e) for e in els} == listed


def test_split_sign_codomain():
    els = ActivationFn("split_sign").codomain(8).elements
    assert els.shape == (256, 8)
    assert len({tuple(e) for e in els}) == 256
    assert set(np.unique(els)) == {-1.0, 1.0}


def test_sigma_codomain_is_sphere():
    a = ActivationFn("continuous_sigma").codomain(8)
    assert not a.is_finite
    with pytest.raises(TypeError):
        len(a)
    s = a.sample(np.random.default_rng(0), (50,))
    assert np.allclose(np.linalg.norm(s, axis=-1), 1)


def test_alphabet_sample_is_uniform():
    a = ActivationFn("csgn", 4).codomain()
    s = a.sample(np.random.default_rng(1), (40000,))
    counts = np.bincount(a.index_of(s), minlength=4)
    assert np.all(np.abs(counts - 10000) < 400)


# -- properties -------------------------------------------------------------


@pytest.mark.parametrize("kind, K, dim", ALL_KINDS)
@given(data=st.data())
def test_values_lie_in_codomain(kind, K, dim, data):
    fn = ActivationFn(kind, K)
    h = data.draw(numbers(dim, 10))
    values, ok = fn.evaluate(h)
    assert np.all(fn.codomain(dim).contains(values[ok], atol=1e-12))


@pytest.mark.parametrize("kind, K, dim", ALL_KINDS)
@pytest.mark.parametrize("lam", [0.5, 2.0, 1000.0])
def test_positive_scaling_invariance(kind, K, dim, lam, rng):
    fn = ActivationFn(kind, K)
    h = rng.standard_normal((200, dim))
    v1, ok1 = fn.evaluate(h)
    v2, ok2 = fn.evaluate(lam * h)
    assert np.array_equal(ok1, ok2)
    if fn.is_finite:
        assert np.array_equal(v1[ok1], v2[ok1])
    else:
        assert np.allclose(v1, v2, atol=1e-15)


@pytest.mark.parametrize("kind, K, dim", [k for k in FINITE_KINDS if k[0] != "csgn_conjugated"])
def test_idempotent_on_codomain(kind, K, dim):
    fn = ActivationFn(kind, K)
    els = fn.codomain(dim).elements
    values, ok = fn.evaluate(els)
    assert ok.all()
    assert np.array_equal(values, els)


@given(numbers(2))
def test_csgn_matches_phase_oracle(z):
    assume(np.hypot(*z) > 1e-6)
    for K in (4, 7, 256):
        theta = math.atan2(z[1], z[0]) % (2 * math.pi)
        # stay away from the sector boundaries, where rounding decides
        sector = theta / (math.pi / K)
        assume(abs(sector - round(sector)) > 1e-6 or round(sector) % 2 == 0)
        want = csgn_oracle(complex(*z), K)
        got = ActivationFn("csgn", K)(z)
        assert abs(complex(*got) - want) < 1e-12


@given(numbers(2))
def test_csgn_maximizes_complex_form(z):
    # for complex numbers csgn(z) is the codomain point with the largest Re(conj(s) z)
    assume(np.hypot(*z) > 1e-6)
    fn = ActivationFn("csgn", 16)
    values, ok = fn.evaluate(z)
    assume(bool(ok))
    pts = fn.codomain().elements
    scores = pts @ z
    assert scores.max() - values @ z <= 1e-12


def test_csgn_conjugated_conjugates_the_codomain():
    # S is closed under conjugation, so the conjugated kind permutes it instead of fixing it
    fn = ActivationFn("csgn_conjugated", 4)
    els = fn.codomain().elements
    assert np.array_equal(fn(els), involute("natural", els))
    assert np.array_equal(fn(fn(els)), els)


@given(numbers(2))
def test_csgn_conjugated_is_csgn_of_conjugate(z):
    a = ActivationFn("csgn_conjugated", 8).evaluate(z)
    b = ActivationFn("csgn", 8).evaluate(involute("natural", z))
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]


@given(numbers(4))
def test_twin_decomposition(q):
    # tsgn(z0 + z1 j) = csgn(z0) + csgn(z1) j, with the product taken in the quaternions
    csgn = ActivationFn("csgn", 16)
    w0, ok0 = csgn.evaluate(q[:2])
    w1, ok1 = csgn.evaluate(q[2:])
    got, ok = ActivationFn("twin_multistate", 16).evaluate(q)
    assert bool(ok) == bool(ok0 and ok1)
    if ok:
        qa = quaternion()
        want = np.array([w0[0], w0[1], 0, 0]) + mul(qa, [w1[0], w1[1], 0, 0], qa.unit(2))
        assert np.allclose(got, want, atol=1e-15)


@given(numbers(8))
def test_split_sign_is_componentwise(p):
    values, ok = ActivationFn("split_sign").evaluate(p)
    assert bool(ok) == bool(np.all(p != 0))
    if ok:
        assert np.array_equal(values, np.where(p > 0, 1.0, -1.0))


@given(numbers(8))
def test_sigma_self_form_is_norm(p):
    assume(np.linalg.norm(p) > 1e-6)
    s = apply(ActivationFn("continuous_sigma"), p)
    assert abs(bilinear(get_algebra("octonion"), "natural", s, p) - np.linalg.norm(p)) <= 1e-10


def test_vectorized_matches_elementwise(rng):
    fn = ActivationFn("twin_multistate", 4)
    h = rng.standard_normal((30, 4))
    batch = fn(h)
    for k in range(30):
        assert np.array_equal(batch[k], apply(fn, h[k]))


# -- B-function checker -----------------------------------------------------


@pytest.mark.parametrize(
    "kind, K, alg, tau",
    [
        ("bipolar_sign", None, "reals", "trivial"),
        ("csgn", 8, "complex", "natural"),
        ("csgn", 256, "complex", "natural"),
        ("csgn_conjugated", 4, "hyperbolic", "natural"),
        ("twin_multistate", 4, "quaternion", "natural"),
        ("twin_multistate", 16, "quaternion", "natural"),
        ("split_sign", None, "octonion", "natural"),
        ("continuous_sigma", None, "complex", "natural"),
        ("continuous_sigma", None, "quaternion", "natural"),
        ("continuous_sigma", None, "octonion", "natural"),
    ],
)
def test_b_function_passes(kind, K, alg, tau):
    r = check_b_function(ActivationFn(kind, K), get_algebra(alg), tau, 1000)
    assert r.passed
    assert r.counterexample is None
    assert r.worst_margin > 0 or kind == "continuous_sigma"


def test_sigma_b_function_on_sedenions():
    assert check_b_function(ActivationFn("continuous_sigma"), cayley_dickson(4), "natural", 500).passed


def test_csgn_on_hyperbolic_has_counterexample():
    h = get_algebra("hyperbolic")
    r = check_b_function(ActivationFn("csgn", 4), h, "natural", 1000)
    assert not r.passed
    q, phi_q, s = r.counterexample
    # the counterexample is genuine: a rival beats csgn(q) on B(., q)
    assert np.array_equal(phi_q, ActivationFn("csgn", 4)(q))
    assert bilinear(h, "natural", s, q) > bilinear(h, "natural", phi_q, q)


def test_sigma_on_hyperbolic_fails():
    r = check_b_function(ActivationFn("continuous_sigma"), get_algebra("hyperbolic"), "natural", 500)
    assert not r.passed


def test_b_function_checker_is_deterministic():
    fn, h = ActivationFn("csgn", 4), get_algebra("hyperbolic")
    a = check_b_function(fn, h, "natural", 300, seed=3)
    b = check_b_function(fn, h, "natural", 300, seed=3)
    assert a.worst_margin == b.worst_margin


# -- validation -------------------------------------------------------------


@pytest.mark.parametrize("kind, K", [("csgn", None), ("csgn", 1), ("twin_multistate", 2.5), ("bipolar_sign", 4)])
def test_bad_resolution_factor(kind, K):
    with pytest.raises(ValueError):
        ActivationFn(kind, K)


def test_unknown_kind():
    with pytest.raises(ValueError):
        ActivationFn("tanh")


def test_algebra_mismatch():
    with pytest.raises(ValueError):
        apply(ActivationFn("csgn", 4), [1.0, 0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        ActivationFn("twin_multistate", 4).codomain(8)
    with pytest.raises(ValueError):
        ActivationFn("split_sign").codomain()


def test_to_config():
    assert ActivationFn("csgn", 256).to_config() == {"kind": "csgn", "K": "256"}
    assert ActivationFn("split_sign").to_config() == {"kind": "split_sign"}


def test_alphabet_index_and_distance():
    a = StateAlphabet(2, np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert list(a.index_of([[0.9, 0.1], [0.2, 0.7]])) == [0, 1]
    assert np.isclose(a.distance([0.0, 0.0]), 1.0)
