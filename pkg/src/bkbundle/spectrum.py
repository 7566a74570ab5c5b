"""Function-valued spectra of sections.

For a section ``x``, a base function ``a`` belongs to the spectrum when
``a e - x`` fails to be invertible, i.e. fails at SOME atom.  The
selection spectrum is the stricter set where ``a`` hits a fiber
eigenvalue at EVERY atom; equivalently, the atomwise selections from
the per-atom fiber spectra.  The selection spectrum is closed under
mixing along partitions of unity and is pointwise bounded by the norm;
every selection is in particular a spectrum member.  The containment in
the other direction does not follow at this level and is deliberately
not asserted anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .bundle import Section
from .errors import MismatchError
from .measure import EFunction, mix
from .sampling import as_rng, random_partition

__all__ = [
    "FiberSpectrumTable",
    "spectrum_table",
    "spectrum_contains",
    "selection_spectrum_contains",
    "SelectionEnumeration",
    "enumerate_selection_spectrum",
    "SpectrumPropertyReport",
    "selection_spectrum_properties",
    "DEFAULT_SELECTION_CAP",
]

DEFAULT_TOL = 1e-8
DEFAULT_SELECTION_CAP = 4096


@dataclass(frozen=True)
class FiberSpectrumTable:
    """Per-atom fiber spectra of one section, eigenvalues sorted by
    (real, imag) and repeated with multiplicity."""

    section: Section
    tolerance: float
    per_atom: dict[str, tuple[complex, ...]]

    def eigenvalues(self, atom: str) -> tuple[complex, ...]:
        try:
            return self.per_atom[atom]
        except KeyError:
            raise MismatchError(f"unknown atom {atom!r}") from None

    def distinct(self, atom: str) -> tuple[complex, ...]:
        """Eigenvalues at an atom deduplicated at the table's tolerance.

        Values are already sorted by (real, imag); a value joins the
        previous group when it sits within the tolerance of the group's
        representative.
        """
        out: list[complex] = []
        for z in self.eigenvalues(atom):
            if not out or abs(z - out[-1]) > self.tolerance:
                out.append(z)
        return tuple(out)

    def distance(self, a: EFunction) -> np.ndarray:
        """Per-atom distance from a(atom) to the fiber spectrum there."""
        space = self.section.bundle.space
        if a.space != space:
            raise MismatchError("function lives over a different space")
        dists = np.empty(len(space))
        for i, atom in enumerate(space.atoms):
            eigs = self.per_atom[atom]
            dists[i] = min(abs(complex(a.values[i]) - z) for z in eigs)
        return dists


def spectrum_table(x: Section, tol: float = DEFAULT_TOL) -> FiberSpectrumTable:
    """Compute every fiber spectrum of a section."""
    per_atom = {
        atom: v.spectrum(tol)
        for atom, v in zip(x.bundle.space.atoms, x.values)
    }
    return FiberSpectrumTable(x, tol, per_atom)


def _table_for(x: Section, tol: float, table: FiberSpectrumTable | None):
    if table is not None:
        if table.section.bundle != x.bundle:
            raise MismatchError("table belongs to a different bundle")
        return table
    return spectrum_table(x, tol)


def selection_spectrum_contains(
    x: Section,
    a: EFunction,
    tol: float = DEFAULT_TOL,
    table: FiberSpectrumTable | None = None,
) -> bool:
    """True when ``a`` hits a fiber eigenvalue at every atom."""
    t = _table_for(x, tol, table)
    return bool((t.distance(a) <= tol).all())


def spectrum_contains(
    x: Section,
    a: EFunction,
    tol: float = DEFAULT_TOL,
    table: FiberSpectrumTable | None = None,
) -> bool:
    """True when ``a e - x`` is not invertible, i.e. ``a`` hits a fiber
    eigenvalue at some atom."""
    t = _table_for(x, tol, table)
    return bool((t.distance(a) <= tol).any())


@dataclass(frozen=True)
class SelectionEnumeration:
    """The selection spectrum, enumerated up to a cap.

    ``total_count`` multiplies the distinct eigenvalue counts over the
    atoms; when it exceeds the cap, ``selections`` holds only the first
    ``cap`` members in lexicographic order and ``truncated`` is set.
    """

    selections: tuple[EFunction, ...]
    truncated: bool
    total_count: int


def enumerate_selection_spectrum(
    x: Section,
    cap: int = DEFAULT_SELECTION_CAP,
    tol: float = DEFAULT_TOL,
    table: FiberSpectrumTable | None = None,
) -> SelectionEnumeration:
    """All atomwise eigenvalue selections, in lexicographic order.

    The order is by atom position first (earlier atoms vary slowest),
    then by the (real, imag) order of each atom's distinct eigenvalues.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    t = _table_for(x, tol, table)
    space = x.bundle.space
    choice_lists = [t.distinct(atom) for atom in space.atoms]
    total = 1
    for choices in choice_lists:
        total *= len(choices)
    selections = []
    for combo in itertools.islice(itertools.product(*choice_lists), cap):
        selections.append(EFunction(space, np.array(combo, dtype=complex)))
    return SelectionEnumeration(tuple(selections), total > cap, total)


@dataclass
class SpectrumPropertyReport:
    """Outcome of the selection spectrum property suite.

    Checks: nonempty, pointwise bounded by the norm, closed under
    mixing along random partitions (cyclic), and closed under pointwise
    limits of members (order closed).  ``failures`` holds replayable
    witnesses for anything that failed.
    """

    member_count: int
    truncated: bool
    nonempty: bool
    bounded: bool
    cyclic: bool
    order_closed: bool
    samples: int
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.nonempty and self.bounded and self.cyclic and self.order_closed


def selection_spectrum_properties(
    x: Section,
    samples: int = 200,
    tol: float = DEFAULT_TOL,
    cap: int = DEFAULT_SELECTION_CAP,
    rng=None,
) -> SpectrumPropertyReport:
    rng = as_rng(rng)
    space = x.bundle.space
    table = spectrum_table(x, tol)
    enum = enumerate_selection_spectrum(x, cap=cap, tol=tol, table=table)
    members = enum.selections
    failures: list[dict] = []

    nonempty = len(members) > 0

    # Bounded: |a| <= norm(x) pointwise, with tolerance for the root
    # finder's residual.
    norm_plus = x.norm().real_array() + tol
    bounded = True
    for a in members:
        if (np.abs(a.values) > norm_plus).any():
            bounded = False
            failures.append(
                {
                    "check": "bounded",
                    "selection": {
                        atom: [z.real, z.imag]
                        for atom, z in zip(space.atoms, a.values)
                    },
                }
            )
            break

    # Cyclic: mixing members along any partition of unity stays inside.
    cyclic = True
    for _ in range(samples):
        partition = random_partition(space, rng)
        picks = [members[int(rng.integers(0, len(members)))] for _ in partition]
        mixed = mix(partition, picks)
        if not selection_spectrum_contains(x, mixed, tol, table=table):
            cyclic = False
            failures.append(
                {
                    "check": "cyclic",
                    "mixed": {
                        atom: [z.real, z.imag]
                        for atom, z in zip(space.atoms, mixed.values)
                    },
                }
            )
            break

    # Order closed: perturb a member, reproject each term of a shrinking
    # sequence onto the selection set, and test the pointwise limit.
    order_closed = True
    probes = max(1, samples // 10)
    for _ in range(probes):
        base = members[int(rng.integers(0, len(members)))]
        noise = rng.standard_normal(len(space)) + 1j * rng.standard_normal(len(space))
        projected = None
        for n in range(1, 41):
            eps = 2.0 ** (-n)
            perturbed = EFunction(space, base.values + eps * noise)
            # nearest selection, atom by atom
            values = []
            for atom, v in zip(space.atoms, perturbed.values):
                eigs = table.per_atom[atom]
                values.append(min(eigs, key=lambda z: abs(z - complex(v))))
            projected = EFunction(space, np.array(values, dtype=complex))
        # By n = 40 the perturbation is ~1e-12, far below any eigenvalue
        # gap, so the projected sequence has stabilized at its limit.
        if projected is None or not selection_spectrum_contains(
            x, projected, tol, table=table
        ):
            order_closed = False
            failures.append({"check": "order_closed"})
            break

    return SpectrumPropertyReport(
        member_count=len(members),
        truncated=enum.truncated,
        nonempty=nonempty,
        bounded=bounded,
        cyclic=cyclic,
        order_closed=order_closed,
        samples=samples,
        failures=failures,
    )
