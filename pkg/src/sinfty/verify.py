"""Verification suites: each check returns a :class:`CheckResult`."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from . import characters, ewens, zmeasure
from .permutations import VirtualPermutationPrefix, act, cocycle_c, random_bisymmetric
from .rng import make_rng
from .special import GridSpec, WhittakerKernel, resolvent_check


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    params: str
    passed: bool
    detail: str = ""


EXACT_Z = ("1/2", "2/3", "1+i")


def exact_suite(max_n: int = 30) -> Iterator[CheckResult]:
    """Exact identities: z-measure normalization and coherency, Ewens identities, characters."""
    for z in EXACT_Z:
        for n in range(1, max_n + 1):
            yield CheckResult("exact", "zmeasure_normalization", f"z={z} n={n}", zmeasure.normalization_check(z, n))
        for n in range(1, min(max_n, 12) + 1):
            yield CheckResult("exact", "zmeasure_coherency", f"z={z} n={n}", zmeasure.coherency_check(z, n))
    for t in (Fraction(1, 2), Fraction(1), Fraction(3)):
        for n in range(1, min(max_n, 8) + 1):
            yield CheckResult("exact", "ewens_normalization", f"t={t} n={n}", ewens.normalization_check(t, n))
        for n in range(2, min(max_n, 7) + 1):
            yield CheckResult("exact", "ewens_consistency", f"t={t} n={n}", ewens.consistency_check(t, n))
        for n in range(1, min(max_n, 7) + 1):
            yield CheckResult("exact", "ewens_product_structure", f"t={t} n={n}", ewens.product_structure_check(t, n))
    for n in range(1, min(max_n, 7) + 1):
        yield CheckResult("exact", "character_orthogonality", f"n={n}", characters.orthogonality_check(n))
    for z in ("1/2", "3/10+1/5i", "1+i"):
        target = characters.chi_z_transposition_closed_form(z)
        for n in range(2, min(max_n, 8) + 1):
            v = characters.chi_z(z, (2,), n)
            yield CheckResult("exact", "chi_z_transposition", f"z={z} n={n}", v == target, f"{v}")


def cocycle_suite(count: int = 10_000, level: int = 20, seed: int = 0, t: Fraction = Fraction(2, 3)) -> Iterator[CheckResult]:
    """Cocycle additivity and the Radon-Nikodym identity on random instances."""
    rng = make_rng(seed)
    additivity_fail = 0
    rn_fail = 0
    for _ in range(count):
        coords = tuple(int(rng.integers(0, m)) if m > 1 else 0 for m in range(1, level + 1))
        x = VirtualPermutationPrefix(coords)
        g = random_bisymmetric(int(rng.integers(1, level)), rng)
        h = random_bisymmetric(int(rng.integers(1, level)), rng)
        if cocycle_c(x, g * h) != cocycle_c(act(x, g), h) + cocycle_c(x, g):
            additivity_fail += 1
        if not ewens.radon_nikodym_check(t, x, g):
            rn_fail += 1
    yield CheckResult("cocycle", "additivity", f"count={count} level={level}", additivity_fail == 0, f"failures={additivity_fail}")
    yield CheckResult("cocycle", "radon_nikodym", f"count={count} level={level} t={t}", rn_fail == 0, f"failures={rn_fail}")


def character_suite(seed: int = 0, n_max: int = 6) -> Iterator[CheckResult]:
    from .partitions import ThomaPoint
    from .permutations import random_permutation

    omega = ThomaPoint((Fraction(1, 2), Fraction(1, 5)), (Fraction(1, 4),))
    yield CheckResult("characters", "sgn_twist", f"n<={n_max}", characters.sgn_twist_check(omega, n_max))
    for z in ("1/2", "3/10+1/5i", "1+i"):
        zbar = z.replace("+", "-") if "+" in z else z
        same = all(characters.chi_z(z, rho, 6) == characters.chi_z(zbar, rho, 6) for rho in characters.cycle_types(6))
        yield CheckResult("characters", "chi_z_conjugation", f"z={z} n=6", same)
    rng = make_rng(seed)
    f = characters.chi_z_function("3/10+1/5i", 6)
    elements = [random_permutation(6, rng) for _ in range(20)]
    lam_min = characters.gram_min_eigenvalue(f, elements)
    yield CheckResult("characters", "gram_psd", "z=3/10+1/5i n=6 k=20", lam_min >= -characters.PSD_TOL, f"min_eig={lam_min!r}")


def kernel_suite(seed: int = 0, pairs: int = 1000) -> Iterator[CheckResult]:
    kern = WhittakerKernel(0.3 + 0.2j)
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        x, y = rng.uniform(-5, 5, 2)
        worst = max(worst, abs(kern(x, y) - np.sign(x) * np.sign(y) * kern(y, x)))
    yield CheckResult("kernel", "j_symmetry", f"pairs={pairs}", worst <= 1e-10, f"max_dev={worst!r}")
    r400 = resolvent_check(0.3 + 0.2j, GridSpec(400))
    r800 = resolvent_check(0.3 + 0.2j, GridSpec(800))
    yield CheckResult(
        "kernel", "resolvent", "z=0.3+0.2i nodes=400,800",
        r400.max_deviation < 1e-2 and r800.max_deviation < r400.max_deviation,
        f"dev400={r400.max_deviation!r} dev800={r800.max_deviation!r}",
    )


SUITES: dict[str, Callable[..., Iterator[CheckResult]]] = {
    "exact": exact_suite,
    "cocycle": cocycle_suite,
    "characters": character_suite,
    "kernel": kernel_suite,
}
