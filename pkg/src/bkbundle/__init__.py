"""Bundles of Banach algebras over finite atomic measure spaces.

The package models a lattice-normed algebra of sections: a finite atomic
measure space carries one concrete Banach algebra per atom (a complex
scalar, a matrix algebra with the operator norm, or a finite sup-norm
function algebra), and a section picks one fiber element per atom.  The
norm of a section is the function sending each atom to its fiber norm,
so every estimate in the library is a pointwise estimate between such
functions.

What it provides:

- ``measure``: the atom space, simple functions on it, idempotents,
  partitions of unity, and the exact gluing operation ``mix``.
- ``fibers`` / ``bundle``: fiber elements and sections with certified
  norms, plus norm-splitting and the (trivial, but checked) liftings.
- ``inversion``: geometric-series inversion with an explicit tail bound,
  exact atomwise inversion as an independent route, the quantitative
  perturbation bound, and gluing-compatibility of inversion.
- ``spectrum``: fiberwise eigenvalue tables, function-valued spectrum
  membership through two routes, and enumeration of atomwise selections.
- ``representation``: evaluation seminorms, a brute-force quotient norm
  used as a cross-check, bundle reconstruction from sections, and
  inner-product modules with an operator-norm validation report.
- ``gelfand_mazur``: checkers deciding whether a bundle is isometrically
  a copy of the base function algebra, with replayable counterexamples.
- ``verification`` / ``scenario`` / ``cli``: the seeded invariant suite
  and the JSON scenario runner around everything above.

All randomness descends from one integer seed through
:func:`bkbundle.sampling.derive_rng`; equal seeds give equal results.
"""

from .bundle import Bundle, Section, d_decompose, lifting, mix_sections, vector_lifting
from .errors import (
    AlgebraError,
    CertificationError,
    ConvergenceError,
    MismatchError,
    PreconditionError,
    ScenarioError,
)
from .fibers import FiberDescriptor, FiberElement
from .gelfand_mazur import (
    bound_partition,
    certify_reverse_bound,
    check_reverse_bound_hypothesis,
    check_unit_support_hypothesis,
)
from .inversion import (
    InverseCertificate,
    NotInvertible,
    inverse,
    inverse_of_mix,
    is_invertible,
    neumann_inverse,
    perturbed_inverse,
)
from .measure import AtomicMeasureSpace, EFunction, Idempotent, PartitionOfUnity, mix
from .representation import (
    HKModule,
    QuotientFiber,
    evaluation_seminorm,
    hk_inner,
    hk_norm,
    operator_algebra,
    quotient_norm,
    reconstruct_bundle,
)
from .sampling import derive_rng
from .scenario import Scenario, load_scenario, parse_scenario
from .spectrum import (
    enumerate_selection_spectrum,
    selection_spectrum_contains,
    selection_spectrum_properties,
    spectrum_contains,
    spectrum_table,
)
from .verification import run_verification

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AtomicMeasureSpace",
    "EFunction",
    "Idempotent",
    "PartitionOfUnity",
    "mix",
    "FiberDescriptor",
    "FiberElement",
    "Bundle",
    "Section",
    "lifting",
    "vector_lifting",
    "d_decompose",
    "mix_sections",
    "AlgebraError",
    "MismatchError",
    "PreconditionError",
    "ConvergenceError",
    "CertificationError",
    "ScenarioError",
    "NotInvertible",
    "InverseCertificate",
    "neumann_inverse",
    "inverse",
    "is_invertible",
    "perturbed_inverse",
    "inverse_of_mix",
    "spectrum_table",
    "spectrum_contains",
    "selection_spectrum_contains",
    "enumerate_selection_spectrum",
    "selection_spectrum_properties",
    "evaluation_seminorm",
    "quotient_norm",
    "QuotientFiber",
    "reconstruct_bundle",
    "HKModule",
    "hk_inner",
    "hk_norm",
    "operator_algebra",
    "check_unit_support_hypothesis",
    "check_reverse_bound_hypothesis",
    "bound_partition",
    "certify_reverse_bound",
    "derive_rng",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "run_verification",
]
