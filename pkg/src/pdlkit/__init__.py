"""Toolkit for three propositional dynamic logics and their variable-free fragments."""

from .syntax import (
    Atomic,
    Box,
    Choice,
    Dialect,
    DialectError,
    Falsum,
    Formula,
    Implies,
    Inter,
    Par,
    ParseError,
    Program,
    Seq,
    Special,
    Star,
    Test,
    Var,
    conj,
    diamond,
    disj,
    iff,
    metrics,
    neg,
    normalize_variables,
    parse_formula,
    print_formula,
    print_program,
    substitute,
    top,
    validate,
)
from .semantics import (
    KripkeModel,
    ModelError,
    check,
    enumerate_models,
    model_from_json,
    model_to_json,
    random_model,
    relation_of,
    rtc_matrix,
    rtc_worklist,
    truth_set,
)
from .embedding import (
    TranslationContext,
    attach_gadgets,
    build_context,
    embed,
    gadget_model,
    ground,
    hat,
    marker_formula_A,
    marker_formula_B,
    prime,
    prune_to_marked,
    theta,
)
from .decision import SatResult, Verdict, bounded_sat, fl_closure, pdl_sat

__all__ = [
    "Atomic", "Box", "Choice", "Dialect", "DialectError", "Falsum", "Formula",
    "Implies", "Inter", "Par", "ParseError", "Program", "Seq", "Special",
    "Star", "Test", "Var", "conj", "diamond", "disj", "iff", "metrics", "neg",
    "normalize_variables", "parse_formula", "print_formula", "print_program",
    "substitute", "top", "validate",
    "KripkeModel", "ModelError", "check", "enumerate_models", "model_from_json",
    "model_to_json", "random_model", "relation_of", "rtc_matrix",
    "rtc_worklist", "truth_set",
    "TranslationContext", "attach_gadgets", "build_context", "embed",
    "gadget_model", "ground", "hat", "marker_formula_A", "marker_formula_B",
    "prime", "prune_to_marked", "theta",
    "SatResult", "Verdict", "bounded_sat", "fl_closure", "pdl_sat",
]
