"""Multimode simple type theory with an executable presheaf semantics.

Typical use::

    from mstt import guarded
    checker = guarded.make_checker()
    result = checker.infer(guarded.g_nats)
    result.denotation.at(3)   # VecV of NatV 0..3
"""

from .errors import EvaluationPanic, ParseError, TypeCheckError
from .typechecker import Checker, InferInterpretResult

__all__ = ["Checker", "EvaluationPanic", "InferInterpretResult", "ParseError", "TypeCheckError"]
