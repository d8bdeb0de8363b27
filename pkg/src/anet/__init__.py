"""Which digraphs arise as interaction graphs of functions conjugate to a given automata network."""

from .core import Digraph, FunctionTable, dynamics_summary, interaction_graph
from .iso import NilpotentProfile, are_conjugate, canonical_code, nilpotent_profile

__all__ = [
    "Digraph",
    "FunctionTable",
    "NilpotentProfile",
    "are_conjugate",
    "canonical_code",
    "dynamics_summary",
    "interaction_graph",
    "nilpotent_profile",
]

__version__ = "0.1.0"
