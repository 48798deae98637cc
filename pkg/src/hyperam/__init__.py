"""Hypercomplex-valued recurrent correlation neural networks.

Numbers are float arrays of shape ``(dim,)``; a network state is ``(N, dim)``
and a memory set is ``(P, N, dim)``.
"""
from .activations import ActivationFn, StateAlphabet, apply, check_b_function, in_domain
from .algebra import (
    AlgebraSpec,
    Involution,
    bilinear,
    cayley_dickson,
    cayley_dickson_double,
    check_re_ahn,
    check_reverse_involution,
    get_algebra,
    mul,
)
from .dynamics import build_graph, classify, export_dot
from .imaging import Codec, GrayImage, decode, encode, recall_experiment
from .rcnn import ExcitationFn, MemorySet, Network, NetworkConfig, RunResult, RunStatus, UpdateMode

__version__ = "0.1.0"

__all__ = [
    "ActivationFn",
    "AlgebraSpec",
    "Codec",
    "ExcitationFn",
    "GrayImage",
    "Involution",
    "MemorySet",
    "Network",
    "NetworkConfig",
    "RunResult",
    "RunStatus",
    "StateAlphabet",
    "UpdateMode",
    "apply",
    "bilinear",
    "build_graph",
    "cayley_dickson",
    "cayley_dickson_double",
    "check_b_function",
    "check_re_ahn",
    "check_reverse_involution",
    "classify",
    "decode",
    "encode",
    "export_dot",
    "get_algebra",
    "in_domain",
    "mul",
    "recall_experiment",
]
