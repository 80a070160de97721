"""Twisted conjugacy in restricted wreath products G wr Z^k.

Constructs explicit automorphisms with finitely many twisted conjugacy
classes for finite abelian G, certifies the exact class count with integer
matrix arithmetic, and cross-checks everything against brute-force
enumeration of finite quotients G wr (Z_n)^k.
"""

__version__ = "0.1.0"

from .abelian import FiniteAbelianGroup, GAutomorphism, GElement, choose_m
from .construct import CaseReport, Construction, build, classify
from .errors import CapExceeded, InputError
from .intmat import INFINITE, IntMatrix, cokernel_order, smith_normal_form
from .oracle import (
    FiniteAutomorphism,
    FiniteWreath,
    burnside_count,
    descend,
    fixed_conjugacy_classes,
    pullback_check,
    twisted_classes_bruteforce,
)
from .verify import (
    VerificationReport,
    classify_sigma_reidemeister,
    full_verify,
    generate_fixed_elements,
    reidemeister_zk,
)
from .wreath import (
    Support,
    WreathAutomorphism,
    WreathElement,
    apply_automorphism,
    format_element,
    parse_element,
    twisted_conjugate,
)

__all__ = [
    "INFINITE",
    "CapExceeded",
    "CaseReport",
    "Construction",
    "FiniteAbelianGroup",
    "FiniteAutomorphism",
    "FiniteWreath",
    "GAutomorphism",
    "GElement",
    "InputError",
    "IntMatrix",
    "Support",
    "VerificationReport",
    "WreathAutomorphism",
    "WreathElement",
    "__version__",
    "apply_automorphism",
    "build",
    "burnside_count",
    "choose_m",
    "classify",
    "classify_sigma_reidemeister",
    "cokernel_order",
    "descend",
    "fixed_conjugacy_classes",
    "format_element",
    "full_verify",
    "generate_fixed_elements",
    "parse_element",
    "pullback_check",
    "reidemeister_zk",
    "smith_normal_form",
    "twisted_classes_bruteforce",
    "twisted_conjugate",
]
