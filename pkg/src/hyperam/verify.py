"""The property suite behind ``hyperam verify``.

Each check returns a :class:`CheckResult`; some checks are expected to fail
(a known non-B-function, a trivial involution on a noncommutative algebra)
and count as satisfied when they do.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .activations import ActivationFn, check_b_function
from .algebra import (
    ALGEBRAS,
    bilinear,
    cayley_dickson,
    check_re_ahn,
    check_reverse_involution,
    complex_numbers,
    get_algebra,
    mul,
    octonion,
    quaternion,
)

__all__ = ["CheckResult", "Check", "CHECKS", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    expect_pass: bool
    detail: str

    @property
    def ok(self) -> bool:
        return self.passed == self.expect_pass

    def line(self) -> str:
        if self.expect_pass:
            tag = "PASS" if self.passed else "FAIL"
        else:
            tag = "XFAIL" if not self.passed else "XPASS"
        return f"{tag:5s} {self.name}: {self.detail}"


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[[int, int], tuple[bool, str]]
    expect_pass: bool = True


def _involution(alg, tau):
    def run(samples, seed):
        r = check_reverse_involution(get_algebra(alg), tau, samples, seed)
        detail = f"involution {r.involution:.1e}, anti-homomorphism {r.antihomomorphism:.1e}, linearity {r.linearity:.1e}"
        if r.witness is not None:
            p, q = (np.round(v, 6).tolist() for v in r.witness)
            detail += f", witness p={p} q={q}"
        return r.passed(), detail

    return run


def _re_ahn(alg, tau):
    def run(samples, seed):
        r = check_re_ahn(get_algebra(alg), tau, samples, seed)
        return r.passed(), f"max violation {r.max_violation:.1e}, min B(p,p) {r.min_self_form:.3g}"

    return run


def _bfunction(kind, K, alg, tau):
    def run(samples, seed):
        r = check_b_function(ActivationFn(kind, K), get_algebra(alg), tau, samples, seed)
        detail = f"worst margin {r.worst_margin:.3g} over {r.samples} samples"
        if r.counterexample is not None:
            q, phi, s = (np.round(v, 6).tolist() for v in r.counterexample)
            detail += f", counterexample q={q} phi(q)={phi} rival s={s}"
        return r.passed, detail

    return run


def _sigma_cd(samples, seed):
    worst, details = True, []
    for alg in ("complex", "quaternion", "octonion", "sedenion"):
        spec = get_algebra(alg) if alg != "sedenion" else cayley_dickson(4)
        r = check_b_function(ActivationFn("continuous_sigma"), spec, "natural", samples, seed)
        worst &= r.passed
        details.append(f"{spec.name} {'ok' if r.passed else 'FAILED'}")
    return worst, ", ".join(details)


def _cd_tables(samples, seed):
    pairs = [(cayley_dickson(1), complex_numbers()), (cayley_dickson(2), quaternion()), (cayley_dickson(3), octonion())]
    bad = [ref.name for gen, ref in pairs if not np.array_equal(gen.table, ref.table)]
    return not bad, "generated tables match references" if not bad else f"mismatch: {', '.join(bad)}"


def _symmetry(samples, seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for make in ALGEBRAS.values():
        spec = make()
        for tau in ("natural", "trivial"):
            p = rng.standard_normal((samples, spec.dim))
            q = rng.standard_normal((samples, spec.dim))
            worst = max(worst, float(np.max(np.abs(bilinear(spec, tau, p, q) - bilinear(spec, tau, q, p)))))
    ok = worst <= 1e-12
    return ok, f"max |B(p,q) - B(q,p)| {worst:.1e} over all built-in algebras"


def _alternative(samples, seed):
    rng = np.random.default_rng(seed)
    spec = octonion()
    p = rng.standard_normal((samples, 8))
    q = rng.standard_normal((samples, 8))
    err = float(np.max(np.abs(mul(spec, mul(spec, p, p), q) - mul(spec, p, mul(spec, p, q)))))
    return err <= 1e-10, f"max |(pp)q - p(pq)| {err:.1e}"


CHECKS: dict[str, Check] = {
    c.name: c
    for c in [
        Check("involution_quaternion_natural", _involution("quaternion", "natural")),
        Check("involution_quaternion_trivial", _involution("quaternion", "trivial"), expect_pass=False),
        Check("involution_complex_trivial", _involution("complex", "trivial")),
        Check("involution_octonion_natural", _involution("octonion", "natural")),
        Check("re_ahn_complex", _re_ahn("complex", "natural")),
        Check("re_ahn_quaternion", _re_ahn("quaternion", "natural")),
        Check("re_ahn_octonion", _re_ahn("octonion", "natural")),
        Check("re_ahn_hyperbolic_trivial", _re_ahn("hyperbolic", "trivial")),
        Check("cd_tables", _cd_tables),
        Check("bilinear_symmetry", _symmetry),
        Check("octonion_alternative", _alternative),
        Check("bfunction_bipolar_reals", _bfunction("bipolar_sign", None, "reals", "trivial")),
        Check("bfunction_csgn_complex", _bfunction("csgn", 8, "complex", "natural")),
        Check("bfunction_csgn_conjugated_hyperbolic", _bfunction("csgn_conjugated", 4, "hyperbolic", "natural")),
        Check("bfunction_twin_quaternion", _bfunction("twin_multistate", 4, "quaternion", "natural")),
        Check("bfunction_sigma_cayley_dickson", _sigma_cd),
        Check("bfunction_split_sign_octonion", _bfunction("split_sign", None, "octonion", "natural")),
        Check("bfunction_csgn_hyperbolic", _bfunction("csgn", 4, "hyperbolic", "natural"), expect_pass=False),
    ]
}


def run_checks(names: list[str] | None = None, samples: int = 1000, seed: int = 0) -> list[CheckResult]:
    """Run the named checks (all by default) in suite order."""
    names = list(CHECKS) if not names else names
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    out = []
    for name in names:
        check = CHECKS[name]
        passed, detail = check.run(samples, seed)
        out.append(CheckResult(name, bool(passed), check.expect_pass, detail))
    return out
