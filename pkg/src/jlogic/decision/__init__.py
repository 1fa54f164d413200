"""Decision procedures: alternating automata over JSON trees and the
bounded satisfiability search with its reduction encoders."""

from .automata import (
    IdxLabel,
    JAutomaton,
    KeyLabel,
    QuantAtom,
    RAnd,
    ROr,
    StateAtom,
    TestAtom,
    FalseAtom,
    TrueAtom,
    automaton_accepts,
    complement,
    jsl_to_automaton,
    recursive_to_automaton,
)
from .encode import Qbf, encode_3sat, encode_qbf
from .search import Bounds, SatVerdict, sat_bounded

__all__ = [
    "Bounds",
    "FalseAtom",
    "IdxLabel",
    "JAutomaton",
    "KeyLabel",
    "Qbf",
    "QuantAtom",
    "RAnd",
    "ROr",
    "SatVerdict",
    "StateAtom",
    "TestAtom",
    "TrueAtom",
    "automaton_accepts",
    "complement",
    "encode_3sat",
    "encode_qbf",
    "jsl_to_automaton",
    "recursive_to_automaton",
    "sat_bounded",
]
