"""States, measurements, and outcome statistics of N-party Bell scenarios.

This module owns the quantum side of the package: pure/mixed states on a
tensor product of finite-dimensional systems, POVM measurements, and the
joint outcome probabilities

    P(a_1, ..., a_N | x_1, ..., x_N) = Tr((E^1_{a_1} (x) ... (x) E^N_{a_N}) rho),

together with the detector-inefficiency extension in which every party's
outcome alphabet gains a "no click" symbol and a pattern with k silent
detectors occurs with probability eta^(N-k) (1-eta)^k times the quantum
marginal on the firing set.

Numerical policy: quantum quantities are computed in floating point and
compared with tolerance ``1e-10``; exact rational arithmetic is reserved for
the combinatorial layer built on top of these tables.  Construction-time
invariants (normalization, Hermiticity, POVM completeness) are enforced at
tolerances ``1e-12`` / ``1e-10`` as documented per type.

All values are immutable after construction (arrays are marked read-only)
and safe to share across threads; every random operation takes an explicit
``numpy.random.Generator``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DomainError,
    InvariantViolation,
    ScenarioFormatError,
    StructuralError,
)

#: Tolerance for state normalization / Hermiticity checks.
NORM_TOL = 1e-12
#: Tolerance for POVM positivity and completeness checks.
POVM_TOL = 1e-10
#: Eigenvalues below this are treated as null directions when refining.
RANK_ONE_CUTOFF = 1e-12
#: Per-settings-block normalization tolerance of float distributions.
BLOCK_SUM_TOL = 1e-12


class _NoClick:
    """Singleton sentinel for the detector-silent outcome."""

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "∅"

    def __reduce__(self):
        return (_NoClick, ())


#: The extra outcome a detector produces when it does not fire.
NO_CLICK = _NoClick()


def format_outcome(outcome: Any) -> str:
    """Render an outcome label for reports ("∅" for the silent outcome)."""
    return "∅" if outcome is NO_CLICK else str(outcome)


def outcome_sort_key(outcomes: Sequence[Any]):
    """Sort key placing click outcomes first (in label order), ∅ last."""
    return tuple((1, 0) if o is NO_CLICK else (0, o) for o in outcomes)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuantumState:
    """A pure state vector or density matrix on a tensor-product space.

    Parameters
    ----------
    kind : {"pure", "mixed"}
        Representation of ``data``: amplitude vector or density matrix.
    dims : tuple of int
        Local dimension of each party, in party order.
    data : ndarray
        Complex vector of length ``prod(dims)`` (pure) or square matrix of
        that size (mixed).

    Raises
    ------
    StructuralError
        If the shape of ``data`` does not match ``dims``.
    InvariantViolation
        Pure: squared norm differs from 1 by more than 1e-12.  Mixed:
        non-Hermitian beyond 1e-12, eigenvalue below -1e-10, or trace
        differing from 1 by more than 1e-12.
    """

    kind: str
    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.kind not in ("pure", "mixed"):
            raise StructuralError(f"unknown state kind {self.kind!r}")
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise StructuralError(f"invalid local dimensions {dims}")
        data = np.asarray(self.data, dtype=complex)
        total = int(np.prod(dims))
        if self.kind == "pure":
            if data.shape != (total,):
                raise StructuralError(
                    f"pure state needs shape ({total},), got {data.shape}"
                )
            norm2 = float(np.vdot(data, data).real)
            if abs(norm2 - 1.0) > NORM_TOL:
                raise InvariantViolation(
                    f"pure state squared norm {norm2!r} differs from 1 "
                    f"by more than {NORM_TOL}"
                )
        else:
            if data.shape != (total, total):
                raise StructuralError(
                    f"density matrix needs shape ({total},{total}), "
                    f"got {data.shape}"
                )
            herm_dev = float(np.max(np.abs(data - data.conj().T)))
            if herm_dev > NORM_TOL:
                raise InvariantViolation(
                    f"density matrix is non-Hermitian (deviation {herm_dev:.3e})"
                )
            eigs = np.linalg.eigvalsh((data + data.conj().T) / 2.0)
            if float(eigs.min()) < -POVM_TOL:
                raise InvariantViolation(
                    f"density matrix has eigenvalue {float(eigs.min()):.3e} < -{POVM_TOL}"
                )
            tr = float(np.trace(data).real)
            if abs(tr - 1.0) > NORM_TOL:
                raise InvariantViolation(f"density matrix trace {tr!r} != 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", _readonly(data))

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def density(self) -> np.ndarray:
        """The state as a density matrix (outer product for pure states)."""
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return np.array(self.data)


def maximally_entangled(d: int) -> QuantumState:
    """The two-party state (1/sqrt(d)) sum_i |ii>, in the computational basis.

    The computational basis is, by convention, the Schmidt basis of this
    state; :func:`conjugate_in_schmidt_basis` conjugates relative to it.
    """
    return ghz_state(2, d)


def ghz_state(n_parties: int, d: int = 2) -> QuantumState:
    """The N-party state (1/sqrt(d)) sum_i |i i ... i>.

    For ``n_parties=2`` this is the maximally entangled state of two
    d-dimensional systems; for d=2, N=3 it is the usual GHZ state.
    """
    if n_parties < 2:
        raise DomainError(f"need at least 2 parties, got {n_parties}")
    if d < 2:
        raise DomainError(f"need local dimension >= 2, got {d}")
    amp = np.zeros((d,) * n_parties, dtype=complex)
    for i in range(d):
        amp[(i,) * n_parties] = 1.0 / np.sqrt(d)
    return QuantumState("pure", (d,) * n_parties, amp.reshape(-1))


def haar_random_state(
    d: int, rng: np.random.Generator, size: int | None = None
) -> np.ndarray:
    """Unit vector(s) drawn from the unitarily invariant measure on C^d.

    Implementation contract: 2d independent standard Gaussians per vector
    (real parts then imaginary parts, interleaved per component) are combined
    into a complex vector which is then normalized.  The resulting
    distribution is invariant under every fixed unitary.

    Parameters
    ----------
    d : int
        Hilbert-space dimension (>= 1).
    rng : numpy.random.Generator
        Source of randomness; pass independent streams to parallel callers.
    size : int, optional
        If given, return an array of shape ``(size, d)`` of independent
        samples; otherwise a single vector of shape ``(d,)``.
    """
    if d < 1:
        raise DomainError(f"need dimension >= 1, got {d}")
    n = 1 if size is None else int(size)
    g = rng.standard_normal((n, d, 2))
    z = g[..., 0] + 1j * g[..., 1]
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z[0] if size is None else z


def conjugate_in_schmidt_basis(v: np.ndarray) -> np.ndarray:
    """Entrywise complex conjugate, relative to the computational basis.

    The computational basis is the Schmidt basis of
    :func:`maximally_entangled`, for which <Phi| (|u> (x) |v>) =
    (1/sqrt(d)) <u*|v> with |u*> the vector returned here.
    """
    return np.conj(np.asarray(v, dtype=complex))


# ---------------------------------------------------------------------------
# measurements
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Povm:
    """A measurement: one positive operator per outcome, summing to identity.

    ``labels`` identifies the outcomes; it defaults to ``0..n-1``.  The
    constructor only coerces shapes — use :func:`validate_povm` to check the
    positivity and completeness invariants, which reports violations instead
    of raising.
    """

    elements: tuple[np.ndarray, ...]
    labels: tuple[Any, ...] | None = None

    def __post_init__(self) -> None:
        elements = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        if not elements:
            raise StructuralError("a POVM needs at least one element")
        labels = self.labels
        if labels is None:
            labels = tuple(range(len(elements)))
        else:
            labels = tuple(labels)
            if len(labels) != len(elements):
                raise StructuralError(
                    f"{len(labels)} labels for {len(elements)} elements"
                )
            if len(set(labels)) != len(labels):
                raise StructuralError("outcome labels must be distinct")
        object.__setattr__(self, "elements", tuple(_readonly(e) for e in elements))
        object.__setattr__(self, "labels", labels)

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        """Common matrix dimension (raises StructuralError if inconsistent)."""
        _check_square_common(self.elements)
        return self.elements[0].shape[0]

    def element_for(self, label: Any) -> np.ndarray:
        try:
            return self.elements[self.labels.index(label)]
        except ValueError:
            raise DomainError(f"unknown outcome label {label!r}") from None


def projective_povm(vectors: Sequence[Sequence[complex]], labels=None) -> Povm:
    """POVM of rank-one projectors onto the given orthonormal vectors."""
    els = []
    for v in vectors:
        v = np.asarray(v, dtype=complex)
        els.append(np.outer(v, v.conj()))
    return Povm(tuple(els), labels)


@dataclass(frozen=True)
class PovmValidationReport:
    """Outcome of :func:`validate_povm`.

    ``failed_invariant`` is ``None`` when the POVM is valid, otherwise
    ``"positivity"`` or ``"completeness"``; ``worst_deviation`` is the
    worst-case numerical deviation of the named invariant (or, when valid,
    the larger of the two observed deviations).
    """

    ok: bool
    failed_invariant: str | None
    worst_deviation: float


def _check_square_common(elements: Sequence[np.ndarray]) -> int:
    d = None
    for e in elements:
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise StructuralError(f"POVM element has shape {e.shape}, not square")
        if d is None:
            d = e.shape[0]
        elif e.shape[0] != d:
            raise StructuralError(
                f"POVM elements mix dimensions {d} and {e.shape[0]}"
            )
    return int(d)


def validate_povm(p: Povm) -> PovmValidationReport:
    """Check positivity of each element and completeness of their sum.

    Returns a report naming the first failed invariant and its worst-case
    deviation.  Structural problems (non-square or mixed-dimension elements)
    raise :class:`StructuralError` instead, since the invariants are not even
    well posed for them.
    """
    d = _check_square_common(p.elements)
    pos_dev = 0.0
    for e in p.elements:
        herm = float(np.max(np.abs(e - e.conj().T)))
        low = -float(np.linalg.eigvalsh((e + e.conj().T) / 2.0).min())
        pos_dev = max(pos_dev, herm, low)
    total = sum(p.elements)
    comp_dev = float(np.max(np.abs(total - np.eye(d))))
    if pos_dev > POVM_TOL:
        return PovmValidationReport(False, "positivity", pos_dev)
    if comp_dev > POVM_TOL:
        return PovmValidationReport(False, "completeness", comp_dev)
    return PovmValidationReport(True, None, max(pos_dev, comp_dev))


@dataclass(frozen=True, eq=False)
class RankOnePovmElement:
    """A weighted direction ``weight * |v><v|`` refined from a POVM element.

    ``weight`` is the scalar trace of the refined element, ``direction`` the
    unit vector, and ``parent_label`` the outcome of the original POVM this
    element coarse-grains back to.
    """

    weight: float
    direction: np.ndarray
    parent_label: Any

    def __post_init__(self) -> None:
        w = float(self.weight)
        if w < 0.0:
            raise InvariantViolation(f"negative weight {w!r}")
        v = np.asarray(self.direction, dtype=complex)
        if v.ndim != 1:
            raise StructuralError(f"direction must be a vector, got shape {v.shape}")
        norm2 = float(np.vdot(v, v).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvariantViolation(
                f"direction squared norm {norm2!r} differs from 1"
            )
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "direction", _readonly(v))

    def matrix(self) -> np.ndarray:
        return self.weight * np.outer(self.direction, self.direction.conj())


def refine_to_rank_one(p: Povm) -> list[RankOnePovmElement]:
    """Split every POVM element into rank-one pieces via eigendecomposition.

    One refined element is emitted per eigenvalue above ``1e-12`` (null
    directions carry no probability and are dropped); the sum of the
    reconstructed matrices reproduces the original element.  Probabilities
    computed from the refined elements, coarse-grained back over
    ``parent_label``, agree with the unrefined ones.
    """
    report = validate_povm(p)
    if not report.ok:
        raise InvariantViolation(
            f"cannot refine invalid POVM ({report.failed_invariant} violated "
            f"by {report.worst_deviation:.3e})"
        )
    refined: list[RankOnePovmElement] = []
    for label, e in zip(p.labels, p.elements):
        w, vecs = np.linalg.eigh((e + e.conj().T) / 2.0)
        for j in range(len(w)):
            if w[j] > RANK_ONE_CUTOFF:
                refined.append(RankOnePovmElement(float(w[j]), vecs[:, j], label))
    return refined


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Scenario:
    """An N-party Bell experiment: shared state plus per-party setting lists.

    ``settings[p]`` is the list of POVMs party ``p`` may choose between; all
    settings of one party must act on that party's local dimension and use
    the same outcome label set (so the party has a single outcome alphabet).
    Construction validates every POVM, so a ``Scenario`` instance is always
    fully valid.
    """

    state: QuantumState
    settings: tuple[tuple[Povm, ...], ...]

    def __post_init__(self) -> None:
        settings = tuple(tuple(per_party) for per_party in self.settings)
        n = len(settings)
        if n < 2:
            raise StructuralError(f"a scenario needs >= 2 parties, got {n}")
        if n != self.state.n_parties:
            raise StructuralError(
                f"{n} setting lists for a {self.state.n_parties}-party state"
            )
        for party, povms in enumerate(settings):
            if not povms:
                raise StructuralError(f"party {party} has no settings")
            alphabet = povms[0].labels
            for s, povm in enumerate(povms):
                report = validate_povm(povm)
                if not report.ok:
                    raise InvariantViolation(
                        f"party {party} setting {s}: {report.failed_invariant} "
                        f"violated by {report.worst_deviation:.3e}"
                    )
                if povm.dim != self.state.dims[party]:
                    raise StructuralError(
                        f"party {party} setting {s} acts on dimension "
                        f"{povm.dim}, local dimension is {self.state.dims[party]}"
                    )
                if povm.labels != alphabet:
                    raise StructuralError(
                        f"party {party}: settings 0 and {s} use different "
                        "outcome labels"
                    )
        object.__setattr__(self, "settings", settings)

    @property
    def n_parties(self) -> int:
        return len(self.settings)

    @property
    def n_settings(self) -> tuple[int, ...]:
        """Number of settings per party (M_1, ..., M_N)."""
        return tuple(len(per_party) for per_party in self.settings)

    def alphabet(self, party: int) -> tuple[Any, ...]:
        """Outcome labels of one party (identical across its settings)."""
        return self.settings[party][0].labels

    def settings_choices(self) -> Iterable[tuple[int, ...]]:
        """All joint setting choices, in lexicographic order."""
        return itertools.product(*(range(m) for m in self.n_settings))


# ---------------------------------------------------------------------------
# joint probabilities
# ---------------------------------------------------------------------------


def _stacked_tables(
    state: QuantumState, op_stacks: Sequence[np.ndarray]
) -> np.ndarray:
    """Contract per-party operator stacks against the state.

    ``op_stacks[p]`` has shape ``(n_p, d_p, d_p)``; the result has shape
    ``(n_1, ..., n_N)`` with entry Tr((E^1_{a_1} (x) ...) rho), real part.
    """
    n = state.n_parties
    dims = state.dims
    if state.kind == "pure":
        psi = state.data.reshape(dims)
        # indices: i_p -> p, j_p -> n+p, outcome axes a_p -> 2n+p
        args: list[Any] = [psi.conj(), list(range(n))]
        for p, ops in enumerate(op_stacks):
            args += [ops, [2 * n + p, p, n + p]]
        args += [psi, list(range(n, 2 * n))]
        out = np.einsum(*args, list(range(2 * n, 3 * n)), optimize=True)
    else:
        rho = state.data.reshape(dims + dims)
        # Tr(E rho) = sum_{i,k} E_{i k} rho_{k i}: k_p -> p, i_p -> n+p
        args = []
        for p, ops in enumerate(op_stacks):
            args += [ops, [2 * n + p, n + p, p]]
        args += [rho, list(range(2 * n))]
        out = np.einsum(*args, list(range(2 * n, 3 * n)), optimize=True)
    return np.ascontiguousarray(out.real)


def joint_outcome_table(
    scenario: Scenario, settings: Sequence[int]
) -> np.ndarray:
    """Joint click probabilities at one settings choice.

    Returns an array of shape ``(n_outcomes_1, ..., n_outcomes_N)`` indexed
    by outcome positions (use :meth:`Scenario.alphabet` for the labels).
    """
    ops = []
    for p, x in enumerate(settings):
        if not 0 <= int(x) < scenario.n_settings[p]:
            raise DomainError(
                f"setting {x} out of range for party {p} "
                f"(has {scenario.n_settings[p]})"
            )
        ops.append(np.stack(scenario.settings[p][int(x)].elements))
    return _stacked_tables(scenario.state, ops)


def subset_joint_table(
    scenario: Scenario, parties: Sequence[int], settings: Sequence[int]
) -> np.ndarray:
    """Marginal outcome table of a subset of parties.

    The remaining parties are traced out by substituting the identity for
    their measurement operators, so the result does not depend on any
    setting choice for them.  ``parties`` must be strictly increasing;
    ``settings[j]`` is the setting of ``parties[j]``.  The returned axes
    follow the order of ``parties``.
    """
    parties = list(parties)
    if sorted(set(parties)) != parties:
        raise DomainError(f"parties must be strictly increasing, got {parties}")
    if len(settings) != len(parties):
        raise DomainError("need one setting per listed party")
    chosen = dict(zip(parties, settings))
    ops = []
    for p in range(scenario.n_parties):
        if p in chosen:
            x = int(chosen[p])
            if not 0 <= x < scenario.n_settings[p]:
                raise DomainError(f"setting {x} out of range for party {p}")
            ops.append(np.stack(scenario.settings[p][x].elements))
        else:
            ops.append(np.eye(scenario.state.dims[p], dtype=complex)[None, :, :])
    table = _stacked_tables(scenario.state, ops)
    # squeeze the dummy axes of the traced-out parties
    keep = set(parties)
    drop = tuple(p for p in range(scenario.n_parties) if p not in keep)
    return np.squeeze(table, axis=drop)


def quantum_joint(
    scenario: Scenario, settings: Sequence[int], outcomes: Sequence[Any]
) -> float:
    """Probability of one outcome tuple at one settings choice.

    An outcome entry of :data:`NO_CLICK` marginalizes that party (its
    measurement operator is replaced by the identity), so mixed entries give
    joint-marginal probabilities.
    """
    if len(settings) != scenario.n_parties or len(outcomes) != scenario.n_parties:
        raise DomainError("need one setting and one outcome per party")
    parties = [p for p, o in enumerate(outcomes) if o is not NO_CLICK]
    if not parties:
        return 1.0
    table = subset_joint_table(
        scenario, parties, [settings[p] for p in parties]
    )
    idx = tuple(
        scenario.alphabet(p).index(outcomes[p]) if outcomes[p] in scenario.alphabet(p)
        else _raise_label(outcomes[p], p)
        for p in parties
    )
    return float(table[idx])


def _raise_label(label: Any, party: int):
    raise DomainError(f"unknown outcome label {label!r} for party {party}")


# ---------------------------------------------------------------------------
# outcome distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """A probability table over settings choices and outcome tuples.

    ``table`` maps ``(settings, outcomes)`` key pairs — both plain tuples —
    to probabilities; ``alphabets[p]`` lists party ``p``'s outcome labels,
    including :data:`NO_CLICK` when the distribution covers detector
    silence.  ``numeric_mode`` is ``"float"`` or ``"exact-rational"``; in
    rational mode every entry is a :class:`fractions.Fraction` and each
    settings block sums to exactly 1, in float mode blocks sum to 1 within
    ``1e-12``.
    """

    n_parties: int
    alphabets: tuple[tuple[Any, ...], ...]
    table: Mapping[tuple[tuple[int, ...], tuple[Any, ...]], Any]
    numeric_mode: str = "float"

    def __post_init__(self) -> None:
        if self.numeric_mode not in ("float", "exact-rational"):
            raise StructuralError(f"unknown numeric mode {self.numeric_mode!r}")
        if len(self.alphabets) != self.n_parties:
            raise StructuralError("need one outcome alphabet per party")
        alphabets = tuple(tuple(a) for a in self.alphabets)
        table = dict(self.table)
        exact = self.numeric_mode == "exact-rational"
        sums: dict[tuple[int, ...], Any] = {}
        for (settings, outcomes), p in table.items():
            if len(settings) != self.n_parties or len(outcomes) != self.n_parties:
                raise StructuralError(
                    f"key {(settings, outcomes)} does not match {self.n_parties} parties"
                )
            for party, o in enumerate(outcomes):
                if o not in alphabets[party]:
                    raise StructuralError(
                        f"outcome {format_outcome(o)} not in party {party}'s alphabet"
                    )
            if exact:
                p = Fraction(p)
                table[(settings, outcomes)] = p
                if p < 0 or p > 1:
                    raise InvariantViolation(f"probability {p} outside [0,1]")
            else:
                p = float(p)
                table[(settings, outcomes)] = p
                if p < -BLOCK_SUM_TOL or p > 1.0 + BLOCK_SUM_TOL:
                    raise InvariantViolation(f"probability {p!r} outside [0,1]")
            sums[settings] = sums.get(settings, 0) + p
        for settings, total in sums.items():
            if exact:
                if total != 1:
                    raise InvariantViolation(
                        f"settings {settings}: probabilities sum to {total}, not 1"
                    )
            elif abs(total - 1.0) > BLOCK_SUM_TOL:
                raise InvariantViolation(
                    f"settings {settings}: probabilities sum to {total!r}, not 1"
                )
        object.__setattr__(self, "alphabets", alphabets)
        object.__setattr__(self, "table", table)

    def settings_choices(self) -> list[tuple[int, ...]]:
        return sorted({s for s, _ in self.table})

    def block(self, settings: tuple[int, ...]) -> dict[tuple[Any, ...], Any]:
        """The outcome distribution at one settings choice."""
        out = {
            o: p for (s, o), p in self.table.items() if s == tuple(settings)
        }
        if not out:
            raise DomainError(f"no entries for settings {tuple(settings)}")
        return out

    def includes_no_click(self) -> bool:
        return any(NO_CLICK in a for a in self.alphabets)

    def condition_on_all_clicks(
        self, settings: tuple[int, ...]
    ) -> dict[tuple[Any, ...], Any]:
        """The block at ``settings`` conditioned on every detector firing."""
        block = self.block(settings)
        clicked = {
            o: p
            for o, p in block.items()
            if not any(x is NO_CLICK for x in o)
        }
        total = sum(clicked.values())
        if total == 0:
            raise DomainError(
                f"all-click probability is 0 at settings {tuple(settings)}"
            )
        return {o: p / total for o, p in clicked.items()}


def quantum_distribution(scenario: Scenario) -> OutcomeDistribution:
    """The full click-only outcome table of a scenario, for every settings
    choice, as a float-mode :class:`OutcomeDistribution`."""
    table: dict[tuple[tuple[int, ...], tuple[Any, ...]], float] = {}
    alphabets = tuple(scenario.alphabet(p) for p in range(scenario.n_parties))
    for choice in scenario.settings_choices():
        probs = joint_outcome_table(scenario, choice)
        for idx in np.ndindex(probs.shape):
            outcomes = tuple(alphabets[p][i] for p, i in enumerate(idx))
            table[(choice, outcomes)] = float(probs[idx])
    return OutcomeDistribution(
        scenario.n_parties, alphabets, table, numeric_mode="float"
    )


def extend_with_inefficiency(
    dist: OutcomeDistribution, eta: Any
) -> OutcomeDistribution:
    """Add detector silence at efficiency ``eta`` to a click-only table.

    A pattern in which a set K of k parties is silent and the rest fire with
    outcomes ``o`` has probability ``eta^(N-k) (1-eta)^k`` times the
    marginal of ``o`` over K (obtained by summing the click-only block, which
    by POVM completeness equals the identity-substitution marginal).  In
    rational mode the output block sums are exactly 1.

    ``eta`` must be a float in float mode and an exact number (int, Fraction
    or num/den string) in rational mode.
    """
    if dist.includes_no_click():
        raise DomainError("distribution already includes the no-click outcome")
    exact = dist.numeric_mode == "exact-rational"
    if exact:
        eta = Fraction(eta)
    else:
        eta = float(eta)
    if not 0 <= eta <= 1:
        raise DomainError(f"efficiency {eta} outside [0,1]")
    n = dist.n_parties
    one = Fraction(1) if exact else 1.0
    table: dict[tuple[tuple[int, ...], tuple[Any, ...]], Any] = {}
    for settings in dist.settings_choices():
        block = dist.block(settings)
        for silent in itertools.product((False, True), repeat=n):
            k = sum(silent)
            factor = eta ** (n - k) * (one - eta) ** k
            marg: dict[tuple[Any, ...], Any] = {}
            for outcomes, p in block.items():
                key = tuple(
                    NO_CLICK if silent[q] else outcomes[q] for q in range(n)
                )
                marg[key] = marg.get(key, 0) + p
            for key, p in marg.items():
                table[(settings, key)] = table.get((settings, key), 0) + factor * p
    alphabets = tuple(a + (NO_CLICK,) for a in dist.alphabets)
    return OutcomeDistribution(n, alphabets, table, numeric_mode=dist.numeric_mode)


# ---------------------------------------------------------------------------
# scenario (de)serialization
# ---------------------------------------------------------------------------


def _complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _matrix_to_pairs(m: np.ndarray) -> list[list[list[float]]]:
    return [[_complex_to_pair(z) for z in row] for row in np.asarray(m)]


def scenario_to_json(scenario: Scenario) -> dict:
    """Serialize a scenario to the documented JSON structure.

    Complex numbers become two-element ``[re, im]`` arrays.  Pure-state data
    is a flat list of pairs, mixed-state data a list of matrix rows.  Outcome
    labels are positional (0..n-1) in this format.
    """
    state = scenario.state
    if state.kind == "pure":
        data = [_complex_to_pair(z) for z in state.data]
    else:
        data = _matrix_to_pairs(state.data)
    return {
        "parties": scenario.n_parties,
        "state": {"kind": state.kind, "dims": list(state.dims), "data": data},
        "settings": [
            [_povm_to_json(povm) for povm in per_party]
            for per_party in scenario.settings
        ],
    }


def _povm_to_json(povm: Povm) -> list:
    return [_matrix_to_pairs(e) for e in povm.elements]


def _pair_to_complex(pair: Any, where: str) -> complex:
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(x, (int, float)) for x in pair)
    ):
        raise ScenarioFormatError(
            f"{where}: expected a two-element [re, im] array, got {pair!r}"
        )
    return complex(float(pair[0]), float(pair[1]))


def _pairs_to_matrix(rows: Any, where: str) -> np.ndarray:
    if not isinstance(rows, (list, tuple)) or not rows:
        raise ScenarioFormatError(f"{where}: expected a non-empty matrix")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, (list, tuple)):
            raise ScenarioFormatError(f"{where} row {i}: expected a list")
        out.append([_pair_to_complex(z, f"{where}[{i}]") for z in row])
    return np.asarray(out, dtype=complex)


def scenario_from_json(obj: Any) -> Scenario:
    """Parse a scenario from the documented JSON structure.

    Raises :class:`ScenarioFormatError` for every malformed or invalid
    input, including invariant violations of the described state or POVMs.
    """
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ScenarioFormatError(f"top level must be an object, got {type(obj)}")
    try:
        parties = int(obj["parties"])
        state_obj = obj["state"]
        settings_obj = obj["settings"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioFormatError(
            "top level needs integer 'parties', object 'state', list 'settings'"
        ) from exc
    if not isinstance(state_obj, dict):
        raise ScenarioFormatError("'state' must be an object")
    kind = state_obj.get("kind")
    if kind not in ("pure", "mixed"):
        raise ScenarioFormatError(
            f"state kind must be 'pure' or 'mixed', got {kind!r}"
        )
    dims = state_obj.get("dims")
    if (
        not isinstance(dims, (list, tuple))
        or not dims
        or not all(isinstance(d, int) and d >= 1 for d in dims)
    ):
        raise ScenarioFormatError("state 'dims' must be a list of positive integers")
    data = state_obj.get("data")
    try:
        if kind == "pure":
            if not isinstance(data, (list, tuple)):
                raise ScenarioFormatError("pure state 'data' must be a list of pairs")
            vec = np.asarray(
                [_pair_to_complex(z, "state data") for z in data], dtype=complex
            )
            state = QuantumState("pure", tuple(dims), vec)
        else:
            mat = _pairs_to_matrix(data, "state data")
            state = QuantumState("mixed", tuple(dims), mat)
    except (StructuralError, InvariantViolation) as exc:
        raise ScenarioFormatError(f"invalid state: {exc}") from exc
    if not isinstance(settings_obj, (list, tuple)) or len(settings_obj) != parties:
        raise ScenarioFormatError(
            f"'settings' must list one entry per party ({parties})"
        )
    per_party_povms = []
    for party, povm_list in enumerate(settings_obj):
        if not isinstance(povm_list, (list, tuple)) or not povm_list:
            raise ScenarioFormatError(f"party {party}: settings must be a non-empty list")
        povms = []
        for s, matrices in enumerate(povm_list):
            if not isinstance(matrices, (list, tuple)) or not matrices:
                raise ScenarioFormatError(
                    f"party {party} setting {s}: a POVM is a non-empty list of matrices"
                )
            els = [
                _pairs_to_matrix(m, f"party {party} setting {s} element {j}")
                for j, m in enumerate(matrices)
            ]
            try:
                povms.append(Povm(tuple(els)))
            except StructuralError as exc:
                raise ScenarioFormatError(
                    f"party {party} setting {s}: {exc}"
                ) from exc
        per_party_povms.append(tuple(povms))
    try:
        return Scenario(state, tuple(per_party_povms))
    except (StructuralError, InvariantViolation) as exc:
        raise ScenarioFormatError(f"invalid scenario: {exc}") from exc


def load_scenario(path: str) -> Scenario:
    """Read and parse a scenario JSON file (ScenarioFormatError on failure)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read scenario file {path!r}: {exc}") from exc
    return scenario_from_json(text)
