"""Bell-pair measurement statistics and the interleaved Bell-test scenario.

Two Bell pairs |Phi+>_AB |Phi+>_CD are measured by A, B, C, D in the ZY
plane. A and D measure at angle gamma[i]; C measures at gamma[i_C xor o_A]
and B at gamma[i_B xor o_D]. Events are in canonical order A, B, C, D.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .distributions import ConditionalDistribution
from .joint import SpaceSpec
from .order import StaticCausalOrder, discrete_order, make_order

I2 = np.eye(2, dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)

IMAG_TOL = 1e-12

EVENTS = ("A", "B", "C", "D")
VARIANTS = ("base", "extended")


def interleaved_order(variant: str = "base") -> StaticCausalOrder:
    """A < C and D < B; the extended variant also lets A signal to B."""
    covers = [("A", "C"), ("D", "B")]
    if variant == "extended":
        covers.append(("A", "B"))
    elif variant != "base":
        raise ValueError(f"unknown order variant {variant!r}; choose from {VARIANTS}")
    return make_order(EVENTS, covers)


@dataclass(frozen=True)
class ScenarioParams:
    gamma0: float
    gamma1: float
    variant: Literal["base", "extended"] = "base"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown order variant {self.variant!r}; choose from {VARIANTS}")
        for g in (self.gamma0, self.gamma1):
            _check_angle(g)

    @property
    def angles(self) -> tuple[float, float]:
        return (self.gamma0, self.gamma1)


def _check_angle(gamma: float) -> None:
    if not math.isfinite(gamma):
        raise ValueError(f"angle must be finite, got {gamma}")
    if not -1e-12 <= gamma <= math.pi + 1e-12:
        warnings.warn(f"angle {gamma} outside [0, pi]", stacklevel=3)


def projector(gamma: float, outcome: int) -> np.ndarray:
    """Projector for ``outcome`` of a ZY-plane measurement at ``gamma`` from +Z."""
    sign = 1 - 2 * (outcome & 1)
    return 0.5 * (I2 + sign * (math.cos(gamma) * Z + math.sin(gamma) * Y))


def _real_prob(value: complex) -> float:
    if abs(value.imag) > IMAG_TOL:
        raise ArithmeticError(f"probability has imaginary part {value.imag:.3g}")
    return min(max(value.real, 0.0), 1.0)


def bell_pair_prob(gamma_a: float, out_a: int, gamma_b: float, out_b: int) -> float:
    """<Phi+| H(gamma_a, out_a) (x) H(gamma_b, out_b) |Phi+> by explicit contraction."""
    op = np.kron(projector(gamma_a, out_a), projector(gamma_b, out_b))
    return _real_prob(complex(PHI_PLUS.conj() @ op @ PHI_PLUS))


def bell_pair_prob_closed_form(gamma_a: float, out_a: int, gamma_b: float, out_b: int) -> float:
    return 0.25 * (1 + (-1) ** (out_a ^ out_b) * math.cos(gamma_a + gamma_b))


def _pair_table(angles_a, angles_b) -> np.ndarray:
    """P[xa, xb, oa, ob] for setting indices xa, xb."""
    out = np.zeros((len(angles_a), len(angles_b), 2, 2))
    for xa, ga in enumerate(angles_a):
        for xb, gb in enumerate(angles_b):
            for oa in range(2):
                for ob in range(2):
                    out[xa, xb, oa, ob] = bell_pair_prob(ga, oa, gb, ob)
    return out


def interleaved_table(gamma0: float, gamma1: float) -> np.ndarray:
    """16x16 table P(o|i) with joint indices i_A + 2 i_B + 4 i_C + 8 i_D (same for outputs)."""
    g = (gamma0, gamma1)
    pair = _pair_table(g, g)
    table = np.zeros((16, 16))
    for i in range(16):
        iA, iB, iC, iD = (i >> 0) & 1, (i >> 1) & 1, (i >> 2) & 1, (i >> 3) & 1
        for o in range(16):
            oA, oB, oC, oD = (o >> 0) & 1, (o >> 1) & 1, (o >> 2) & 1, (o >> 3) & 1
            table[i, o] = pair[iA, iB ^ oD, oA, oB] * pair[iC ^ oA, iD, oC, oD]
    return table


def interleaved_distribution(params: ScenarioParams | None = None, **kwargs) -> ConditionalDistribution:
    """Conditional distribution of the interleaved Bell tests.

    Accepts a :class:`ScenarioParams` or the same fields as keywords. The
    returned distribution carries the order of the chosen variant.
    """
    params = params or ScenarioParams(**kwargs)
    table = interleaved_table(params.gamma0, params.gamma1)
    if np.max(np.abs(table.sum(axis=1) - 1.0)) > 1e-12:
        raise ArithmeticError("interleaved table rows are not normalised")
    return ConditionalDistribution(interleaved_order(params.variant), SpaceSpec.uniform(4), table, tol=1e-9)


def bipartite_bell_distribution(angles_a, angles_b) -> ConditionalDistribution:
    """Two spacelike parties sharing |Phi+>; input x selects ``angles[x]``."""
    for g in (*angles_a, *angles_b):
        _check_angle(g)
    pair = _pair_table(angles_a, angles_b)
    spec = SpaceSpec((len(angles_a), len(angles_b)), (2, 2))
    table = np.zeros((spec.n_inputs, 4))
    for xa in range(len(angles_a)):
        for xb in range(len(angles_b)):
            for oa in range(2):
                for ob in range(2):
                    table[xa + len(angles_a) * xb, oa + 2 * ob] = pair[xa, xb, oa, ob]
    return ConditionalDistribution(discrete_order(["A", "B"]), spec, table, tol=1e-9)


TSIRELSON_ANGLES = ((0.0, math.pi / 2), (math.pi / 4, 3 * math.pi / 4))
"""ZY angles reaching CHSH value 2*sqrt(2) with correlators cos(a + b), all within [0, pi]."""
