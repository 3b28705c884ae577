"""Local fractions of conditional distributions over static causal orders."""

__version__ = "0.1.0"

from .distributions import ConditionalDistribution, is_causal_distribution, pr_box
from .fractions import FractionReport, fraction_report, local_fraction, ns_fraction, ns_local_fraction
from .functions import CausalFunction, count_causal, enumerate_causal
from .joint import SpaceSpec
from .order import StaticCausalOrder, discrete_order, downset, lowersets, make_order
from .quantum import ScenarioParams, bipartite_bell_distribution, interleaved_distribution, interleaved_order

__all__ = [
    "CausalFunction",
    "ConditionalDistribution",
    "FractionReport",
    "ScenarioParams",
    "SpaceSpec",
    "StaticCausalOrder",
    "bipartite_bell_distribution",
    "count_causal",
    "discrete_order",
    "downset",
    "enumerate_causal",
    "fraction_report",
    "interleaved_distribution",
    "interleaved_order",
    "is_causal_distribution",
    "local_fraction",
    "lowersets",
    "make_order",
    "ns_fraction",
    "ns_local_fraction",
    "pr_box",
]
