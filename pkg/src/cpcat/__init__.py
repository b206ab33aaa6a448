"""Completely positive maps over FHilb and Rel made executable.

Doubling constructions with Kraus witnesses and superoperators, special
dagger Frobenius structures with a full axiom checker, CP* sandwich
morphisms with membership decision and purification, and harnesses that
verify the axioms of environment and decoherence structures on randomized
desk-scale instances.
"""

from .tensor import Tolerance, DEFAULT_TOLERANCE
from .category import FHILB, REL, Obj, PureMorphism
from .frobenius import FrobeniusStructure, check_frobenius
from .cpm import CpmMorphism, Superoperator, realize, purify, is_cp, check_environment
from .cpstar import CpStarMorphism, sandwich_realize, is_cpstar, cpstar_purify, check_decoherence

__version__ = "0.1.0"
