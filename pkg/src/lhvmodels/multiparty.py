"""The N-party protocol family: click-pattern probabilities, exact-rational
mixture weights, the positivity scan, and a full model for small N.

A protocol indexed by i (i = 0 or 2 <= i <= N; there is no i = 1 member)
forces a uniformly chosen subset of i parties to stay silent, picks one
special party uniformly among the remaining N - i, and predetermines a
uniformly guessed setting plus a quantum-distributed outcome for every
other party.  A guessing party answers only when its actual setting matches
the guess; the special party always answers, from the quantum conditional.
The probability that a *given* set of k detectors stays silent under
protocol i is

    q_i(k) = C(k,i)/C(N,i) * (N-k)/(N-i) * (M-1)^(k-i) / M^(N-i-1)

for k >= i (zero for k < i, and 1 when k = i = N).

Mixing the protocols with weights p_i chosen so that
sum_i p_i q_i(k) = eta^(N-k) (1-eta)^k at eta = N/((N-1)M+1) makes the
mixture indistinguishable from independent detectors of efficiency eta.
The weights follow from a triangular linear system (:func:`solve_weights`),
or equivalently from an M-independent recursion for the rescaled sequence
r_k (:func:`recursion_r`); positivity of every r_k certifies positive
weights for *all* M at once (:func:`positivity_scan`).

Everything in this combinatorial layer uses exact rational arithmetic
end-to-end — no stable floating-point evaluation of the recursion is known,
and the positivity question is precisely about signs of tiny values.  When
the optional ``gmpy2`` package is installed its rationals are used
internally for speed; results are always returned as
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Iterator, Mapping

import numpy as np

from .bounds import eta_multiparty
from .errors import ConsistencyError, DomainError, SizeGuardExceeded
from .quantum import (
    NO_CLICK,
    OutcomeDistribution,
    Scenario,
    subset_joint_table,
)

try:  # optional fast exact-rational backend
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - exercised where gmpy2 is absent
    _mpq = None


# ---------------------------------------------------------------------------
# click-pattern probabilities
# ---------------------------------------------------------------------------


def _check_protocol_index(n: int, i: int) -> None:
    if i == 1 or i < 0 or i > n:
        raise DomainError(
            f"protocol index must be 0 or 2..{n} (no single-silent protocol "
            f"exists), got {i}"
        )


def q_i_k(n: int, m: int, i: int, k: int) -> Fraction:
    """Probability that a given set of k detectors is silent under
    protocol i (N parties, M settings each).  Exact rational.
    """
    n, m, i, k = int(n), int(m), int(i), int(k)
    if n < 2 or m < 2:
        raise DomainError(f"need N >= 2 and M >= 2, got ({n}, {m})")
    _check_protocol_index(n, i)
    if not 0 <= k <= n:
        raise DomainError(f"silent count k must be in 0..{n}, got {k}")
    if k < i:
        return Fraction(0)
    if i == n:  # k == n here: every party is forced silent
        return Fraction(1)
    return (
        Fraction(comb(k, i), comb(n, i))
        * Fraction(n - k, n - i)
        * Fraction((m - 1) ** (k - i), m ** (n - i - 1))
    )


def q_prime(n: int, i: int, k: int) -> Fraction:
    """The M-independent part of ``q_i_k``:
    C(k,i)/C(N,i) * (N-k)/(N-i), with the k = i = N corner defined as
    1/C(N,N) = 1 so that the whole sequence stays independent of M.

    For i < N this equals q_i_k(n, m, i, k) * M^(N-i-1) / (M-1)^(k-i) for
    every M.  Requires k >= i.
    """
    n, i, k = int(n), int(i), int(k)
    if n < 2:
        raise DomainError(f"need N >= 2, got {n}")
    if not 0 <= i <= n or not 0 <= k <= n:
        raise DomainError(f"need 0 <= i, k <= {n}, got i={i}, k={k}")
    if k < i:
        raise DomainError(f"q_prime needs k >= i, got i={i}, k={k}")
    if i == k == n:
        return Fraction(1)
    return Fraction(comb(k, i), comb(n, i)) * Fraction(n - k, n - i)


@dataclass(frozen=True)
class ClickPatternProbabilities:
    """The probability q(k) that one *given* set of k detectors is silent,
    for k = 0..N, under some model.  Summing over the C(N,k) sets of each
    size must give exactly 1."""

    n: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.n + 1:
            raise DomainError(
                f"need {self.n + 1} values for N={self.n}, got {len(self.values)}"
            )
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    def total(self) -> Fraction:
        """sum_k C(N,k) q(k) — exactly 1 for a genuine model."""
        return sum(
            (comb(self.n, k) * v for k, v in enumerate(self.values)),
            Fraction(0),
        )

    def ratios(self) -> tuple[Fraction | None, ...]:
        """q(k)/q(k+1) for k = 0..N-1 (None where q(k+1) = 0)."""
        out = []
        for k in range(self.n):
            nxt = self.values[k + 1]
            out.append(None if nxt == 0 else self.values[k] / nxt)
        return tuple(out)


def protocol_click_probabilities(n: int, m: int, i: int) -> ClickPatternProbabilities:
    """The q(k) row of a single protocol i."""
    return ClickPatternProbabilities(
        n, tuple(q_i_k(n, m, i, k) for k in range(n + 1))
    )


# ---------------------------------------------------------------------------
# the M-independent recursion
# ---------------------------------------------------------------------------


def recursion_r(n: int, use_fast: bool = True) -> list[Fraction]:
    """The rescaled weight sequence r_0..r_N, in exact rational arithmetic.

    Starting from r_0 = 1, r_1 = 0, each r_k is fixed by requiring the
    click-pattern ratios q(k-1)/q(k) of the mixture to be constant in k:

        r_k = C(N,k) * sum_{i<k} r_i * (c * q'_i(k-1) - q'_i(k)),
        c = q'_0(1)/q'_0(0) = (N-1)/N,

    with q'_i(k) the M-independent pattern factors of :func:`q_prime`.
    Clearing denominators, the bracket for each (k, i) becomes the integer

        (N-1)(N-k+1) C(k-1,i) - N(N-k) C(k,i)

    over N * C(N,i) * (N-i), which is how the loop below evaluates it
    (binomials updated incrementally along each row).  Only the signs of
    the r_k matter downstream, and they sit at the edge of massive
    cancellation — hence exact rationals end-to-end; no floating-point
    shortcut is taken anywhere in this path.

    ``use_fast=False`` forces the pure-stdlib Fraction backend even when
    gmpy2 is available (the two backends are compared in the tests).
    """
    n = int(n)
    if n < 2:
        raise DomainError(f"need N >= 2, got {n}")
    rational = _mpq if (use_fast and _mpq is not None) else Fraction
    r = [rational(1), rational(0)]
    # u_i = r_i / (C(N,i) * (N-i)) : the shared denominator of row terms
    u = [rational(1, n), rational(0)]
    for k in range(2, n + 1):
        c_km1 = 1  # C(k-1, i), updated incrementally over i
        c_k = 1  # C(k, i)
        lead = (n - 1) * (n - k + 1)
        tail = n * (n - k)
        acc = rational(0)
        for i in range(k):
            bracket = lead * c_km1 - tail * c_k
            if bracket and u[i]:
                acc += u[i] * bracket
            c_km1 = c_km1 * (k - 1 - i) // (i + 1)
            c_k = c_k * (k - i) // (i + 1)
        r_k = acc * comb(n, k) / n
        r.append(r_k)
        u.append(r_k / (comb(n, k) * (n - k)) if k < n else rational(0))
    if rational is Fraction:
        return r
    return [Fraction(int(v.numerator), int(v.denominator)) for v in r]


# ---------------------------------------------------------------------------
# mixture weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolMixture:
    """Exact mixture weights p_i over the protocol family, for one (N, M).

    ``weights`` maps each protocol index i (0 and 2..N) to its probability;
    they sum to exactly 1.  ``r_sequence`` is the M-independent rescaled
    sequence: r_k = (M/(M-1))^k * p_k/p_0 for k < N, while the all-silent
    row carries one extra factor 1/M (its pattern probability is exactly 1
    rather than following the (M-1)^k/M^(N-1) scaling of the other rows),
    so r_N = (M/(M-1))^N * p_N/(M p_0).
    """

    n: int
    m: int
    eta: Fraction
    weights: Mapping[int, Fraction]
    r_sequence: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        weights = {int(i): Fraction(p) for i, p in self.weights.items()}
        expected = {0} | set(range(2, self.n + 1))
        if set(weights) != expected:
            raise DomainError(
                f"weights must cover protocol indices {sorted(expected)}, "
                f"got {sorted(weights)}"
            )
        total = sum(weights.values(), Fraction(0))
        if total != 1:
            raise ConsistencyError(f"mixture weights sum to {total}, not 1")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(
            self, "r_sequence", tuple(Fraction(v) for v in self.r_sequence)
        )

    def min_weight(self) -> tuple[int, Fraction]:
        """(index, value) of the smallest mixture weight."""
        i = min(self.weights, key=lambda j: self.weights[j])
        return i, self.weights[i]

    def click_probabilities(self) -> ClickPatternProbabilities:
        """The mixture's pattern row sum_i p_i q_i(k), exactly."""
        values = tuple(
            sum(
                (p * q_i_k(self.n, self.m, i, k) for i, p in self.weights.items()),
                Fraction(0),
            )
            for k in range(self.n + 1)
        )
        return ClickPatternProbabilities(self.n, values)


def _r_from_weights(
    n: int, m: int, weights: Mapping[int, Fraction]
) -> tuple[Fraction, ...]:
    p0 = weights[0]
    scale = Fraction(m, m - 1)
    r = [Fraction(1), Fraction(0)]
    for k in range(2, n + 1):
        val = scale**k * weights[k] / p0
        if k == n:
            val /= m
        r.append(val)
    return tuple(r)


def solve_weights(n: int, m: int) -> ProtocolMixture:
    """Mixture weights from the triangular linear system, exactly.

    Row k of the system reads eta^(N-k) (1-eta)^k = sum_i p_i q_i(k) at
    eta = N/((N-1)M+1).  Since q_i(k) = 0 for i > k the system is
    triangular: row 0 fixes p_0 = eta^N M^(N-1), rows k >= 2 give each
    p_k by forward substitution, and row 1 — which contains no p_1, the
    family having no single-silent protocol — must hold identically at
    this eta.  It is verified exactly and a violation raises
    :class:`ConsistencyError` (that would be an arithmetic bug, not a
    property of the inputs).
    """
    n, m = int(n), int(m)
    eta = eta_multiparty(n, m)
    one_minus = 1 - eta
    weights: dict[int, Fraction] = {0: eta**n * Fraction(m) ** (n - 1)}
    consistency = eta ** (n - 1) * one_minus - weights[0] * q_i_k(n, m, 0, 1)
    if consistency != 0:
        raise ConsistencyError(
            f"single-silent row violated for (N={n}, M={m}): residual {consistency}"
        )
    for k in range(2, n + 1):
        rhs = eta ** (n - k) * one_minus**k
        acc = sum(
            (weights[i] * q_i_k(n, m, i, k) for i in weights),
            Fraction(0),
        )
        weights[k] = (rhs - acc) / q_i_k(n, m, k, k)
    total = sum(weights.values(), Fraction(0))
    if total != 1:
        raise ConsistencyError(
            f"triangular solve for (N={n}, M={m}) gives total weight {total}"
        )
    return ProtocolMixture(n, m, eta, weights, _r_from_weights(n, m, weights))


def mixture_from_recursion(n: int, m: int) -> ProtocolMixture:
    """Mixture weights rebuilt from the M-independent recursion.

    Un-normalized weights are t_k = ((M-1)/M)^k r_k for k < N and
    t_N = ((M-1)/M)^N M r_N (the all-silent row's extra factor M, see
    :class:`ProtocolMixture`); normalizing gives the p_i.  Agrees exactly
    with :func:`solve_weights` — the two constructions are independent
    oracles for each other.
    """
    n, m = int(n), int(m)
    if m < 2:
        raise DomainError(f"need M >= 2, got {m}")
    r = recursion_r(n)
    scale = Fraction(m - 1, m)
    t = {0: Fraction(1)}
    for k in range(2, n + 1):
        t[k] = scale**k * r[k] * (m if k == n else 1)
    total = sum(t.values(), Fraction(0))
    weights = {i: v / total for i, v in t.items()}
    return ProtocolMixture(
        n, m, eta_multiparty(n, m), weights, tuple(r)
    )


# ---------------------------------------------------------------------------
# positivity scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    """One N of the positivity scan: the minimum value (an r_k, or a
    mixture weight in fixed-M mode), where it occurs, and whether it is
    non-negative."""

    n: int
    mode: str
    min_value: Fraction
    argmin_k: int
    passed: bool


def positivity_scan(
    n_max: int,
    mode: str = "all_M_via_r",
    m: int | None = None,
    n_min: int = 2,
) -> Iterator[ScanRow]:
    """Stream positivity checks for N = n_min..n_max, one row per N.

    ``mode="all_M_via_r"`` checks r_k >= 0 for all k via the recursion;
    since every weight is a positive multiple of its r_k, this certifies
    positive mixtures for *every* M >= 2 at once.  ``mode="fixed_M"``
    instead solves the triangular system at the given M and checks the
    weights themselves.

    Rows are yielded as soon as computed, so long scans can be consumed
    (and persisted) incrementally; each N is independent, making a
    restart from the last reported N possible.
    """
    n_max, n_min = int(n_max), int(n_min)
    if n_min < 2 or n_max < n_min:
        raise DomainError(f"need 2 <= n_min <= n_max, got ({n_min}, {n_max})")
    if mode == "all_M_via_r":
        for n in range(n_min, n_max + 1):
            r = recursion_r(n)
            k = min(range(n + 1), key=lambda j: r[j])
            yield ScanRow(n, mode, r[k], k, r[k] >= 0)
    elif mode == "fixed_M":
        if m is None:
            raise DomainError("fixed_M mode needs a settings count m")
        for n in range(n_min, n_max + 1):
            mixture = solve_weights(n, m)
            i, value = mixture.min_weight()
            yield ScanRow(n, mode, value, i, value >= 0)
    else:
        raise DomainError(f"unknown scan mode {mode!r}")


# ---------------------------------------------------------------------------
# the full model for small N
# ---------------------------------------------------------------------------


class MultipartyModel:
    """Exact distribution and sampler of the protocol mixture for an
    N-party scenario with a uniform settings count M.

    The exact table multiplies the mixture's click-pattern probability
    sum_i p_i q_i(k) — evaluated from the solved weights, not from the
    eta-power form it is meant to equal — by the quantum marginal of the
    firing parties at their actual settings (silent parties traced out by
    identity substitution).  Comparing against the eta-extended quantum
    distribution therefore checks the linear system and the marginal
    structure at once.
    """

    def __init__(self, scenario: Scenario, max_table_entries: int = 2_000_000):
        counts = scenario.n_settings
        if len(set(counts)) != 1:
            raise DomainError(
                f"the protocol family needs a uniform settings count, "
                f"scenario has {counts}"
            )
        self.scenario = scenario
        self.n = scenario.n_parties
        self.m = counts[0]
        if self.m < 2:
            raise DomainError("need at least 2 settings per party")
        entries = (self.m**self.n) * int(
            np.prod([len(scenario.alphabet(p)) + 1 for p in range(self.n)])
        )
        if entries > max_table_entries:
            raise SizeGuardExceeded(
                f"exact table would hold {entries} entries "
                f"(limit {max_table_entries}); reduce N, M, or outcomes"
            )
        self.mixture = solve_weights(self.n, self.m)
        self.eta = self.mixture.eta
        self._pattern = [
            float(v) for v in self.mixture.click_probabilities().values
        ]
        self._alphabets = tuple(
            scenario.alphabet(p) for p in range(self.n)
        )
        self._table_cache: dict = {}

    def _subset_table(
        self, parties: tuple[int, ...], settings: tuple[int, ...]
    ) -> np.ndarray:
        key = (parties, settings)
        if key not in self._table_cache:
            self._table_cache[key] = subset_joint_table(
                self.scenario, list(parties), list(settings)
            )
        return self._table_cache[key]

    # ------------------------------------------------------------------
    # exact distribution
    # ------------------------------------------------------------------

    def exact_distribution(self) -> OutcomeDistribution:
        """The model's full outcome table over every settings choice."""
        n = self.n
        table: dict[tuple[tuple[int, ...], tuple[Any, ...]], float] = {}
        for choice in self.scenario.settings_choices():
            for silent in itertools.product((False, True), repeat=n):
                k = sum(silent)
                firing = tuple(p for p in range(n) if not silent[p])
                weight = self._pattern[k]
                if not firing:
                    key = tuple(NO_CLICK for _ in range(n))
                    table[(choice, key)] = weight
                    continue
                marg = self._subset_table(
                    firing, tuple(choice[p] for p in firing)
                )
                for idx in np.ndindex(marg.shape):
                    outcomes: list[Any] = [NO_CLICK] * n
                    for j, p in enumerate(firing):
                        outcomes[p] = self._alphabets[p][idx[j]]
                    table[(choice, tuple(outcomes))] = weight * float(marg[idx])
        alphabets = tuple(a + (NO_CLICK,) for a in self._alphabets)
        return OutcomeDistribution(n, alphabets, table, numeric_mode="float")

    # ------------------------------------------------------------------
    # explicit protocol enumeration (locality-manifest route)
    # ------------------------------------------------------------------

    def distribution_by_hidden_enumeration(self) -> OutcomeDistribution:
        """Rebuild the table by enumerating the full hidden variable.

        Sums over protocol index, forced-silent subset, special party,
        guessed settings, and guessed outcomes, composing each party's
        response to its own setting.  Exponentially slower than
        :meth:`exact_distribution`; intended for cross-checking on small
        scenarios (guarded at N <= 4).
        """
        n, m = self.n, self.m
        if n > 4:
            raise SizeGuardExceeded(
                "hidden-variable enumeration is for N <= 4 cross-checks"
            )
        sizes = [len(a) for a in self._alphabets]
        ext_sizes = [s + 1 for s in sizes]  # last position = silent
        table: dict[tuple[tuple[int, ...], tuple[Any, ...]], float] = {}
        for choice in self.scenario.settings_choices():
            block = np.zeros(ext_sizes)
            for i, p_i in self.mixture.weights.items():
                w_protocol = float(p_i)
                if w_protocol == 0.0:
                    continue
                for forced in itertools.combinations(range(n), i):
                    rest = [p for p in range(n) if p not in forced]
                    w_forced = w_protocol / comb(n, i)
                    if not rest:  # every party forced: all-silent corner
                        block[tuple(s - 1 for s in ext_sizes)] += w_forced
                        continue
                    for special in rest:
                        guessers = tuple(p for p in rest if p != special)
                        w_special = w_forced / len(rest)
                        for guess_settings in itertools.product(
                            range(m), repeat=len(guessers)
                        ):
                            w_guess = w_special / m ** len(guessers)
                            self._accumulate_guessed(
                                block,
                                choice,
                                forced,
                                special,
                                guessers,
                                guess_settings,
                                w_guess,
                            )
            for idx in np.ndindex(*ext_sizes):
                outcomes = tuple(
                    NO_CLICK if idx[p] == sizes[p] else self._alphabets[p][idx[p]]
                    for p in range(n)
                )
                table[(choice, outcomes)] = float(block[idx])
        alphabets = tuple(a + (NO_CLICK,) for a in self._alphabets)
        return OutcomeDistribution(n, alphabets, table, numeric_mode="float")

    def _accumulate_guessed(
        self,
        block: np.ndarray,
        choice: tuple[int, ...],
        forced: tuple[int, ...],
        special: int,
        guessers: tuple[int, ...],
        guess_settings: tuple[int, ...],
        weight: float,
    ) -> None:
        """Add one (protocol, subset, special, guessed-settings) term:
        sum over guessed outcomes of weight x P(guessed) x (outer product
        of every party's response distribution)."""
        n = self.n
        sizes = [len(a) for a in self._alphabets]
        if guessers:
            guess_marg = self._subset_table(guessers, guess_settings)
        else:
            guess_marg = np.ones(())
        joint_parties = tuple(sorted(guessers + (special,)))
        joint_settings = tuple(
            choice[special] if p == special else guess_settings[guessers.index(p)]
            for p in joint_parties
        )
        joint = self._subset_table(joint_parties, joint_settings)
        special_axis = joint_parties.index(special)
        for guessed in np.ndindex(guess_marg.shape):
            p_guess = float(guess_marg[guessed])
            if p_guess <= 0.0:
                continue
            # special party's conditional response on its own setting
            sel: list[Any] = [slice(None)] * joint.ndim
            for j, p in enumerate(joint_parties):
                if p != special:
                    sel[j] = guessed[guessers.index(p)]
            special_dist = np.clip(np.asarray(joint[tuple(sel)]), 0.0, None)
            special_dist = special_dist / p_guess
            # compose per-party responses (each a fn of own setting + lam)
            vecs = []
            for p in range(n):
                v = np.zeros(sizes[p] + 1)
                if p in forced:
                    v[-1] = 1.0
                elif p == special:
                    v[: sizes[p]] = special_dist
                else:
                    g = guessers.index(p)
                    if guess_settings[g] == choice[p]:
                        v[guessed[g]] = 1.0
                    else:
                        v[-1] = 1.0
                vecs.append(v)
            term = weight * p_guess
            out = vecs[0] * term
            for v in vecs[1:]:
                out = np.multiply.outer(out, v)
            block += out

    # ------------------------------------------------------------------
    # sampling
    # ------------------------------------------------------------------

    def sample(
        self, settings: tuple[int, ...], rng: np.random.Generator
    ) -> tuple[Any, ...]:
        """One draw: pick a protocol, a forced subset, a special party,
        guessed settings and outcomes, then each party answers from its own
        setting and the hidden variable alone."""
        choice = tuple(int(x) for x in settings)
        if len(choice) != self.n or any(
            not 0 <= x < self.m for x in choice
        ):
            raise DomainError(f"settings {settings} out of range")
        indices = sorted(self.mixture.weights)
        probs = np.array([float(self.mixture.weights[i]) for i in indices])
        i = indices[int(rng.choice(len(indices), p=probs / probs.sum()))]
        forced = tuple(sorted(rng.choice(self.n, size=i, replace=False)))
        rest = [p for p in range(self.n) if p not in forced]
        outcomes: list[Any] = [NO_CLICK] * self.n
        if not rest:
            return tuple(outcomes)
        special = rest[int(rng.integers(len(rest)))]
        guessers = tuple(p for p in rest if p != special)
        guess_settings = tuple(
            int(x) for x in rng.integers(self.m, size=len(guessers))
        )
        if guessers:
            marg = self._subset_table(guessers, guess_settings)
            flat = np.clip(marg.reshape(-1), 0.0, None)
            flat = flat / flat.sum()
            guessed = np.unravel_index(
                int(rng.choice(flat.size, p=flat)), marg.shape
            )
        else:
            guessed = ()
        # guessing parties answer only on a matching setting
        for j, p in enumerate(guessers):
            if guess_settings[j] == choice[p]:
                outcomes[p] = self._alphabets[p][guessed[j]]
        # special party draws the quantum conditional
        joint_parties = tuple(sorted(guessers + (special,)))
        joint_settings = tuple(
            choice[special] if p == special else guess_settings[guessers.index(p)]
            for p in joint_parties
        )
        joint = self._subset_table(joint_parties, joint_settings)
        sel: list[Any] = [slice(None)] * joint.ndim
        for j, p in enumerate(joint_parties):
            if p != special:
                sel[j] = guessed[guessers.index(p)]
        cond = np.clip(np.asarray(joint[tuple(sel)]), 0.0, None)
        cond = cond / cond.sum()
        outcomes[special] = self._alphabets[special][
            int(rng.choice(len(cond), p=cond))
        ]
        return tuple(outcomes)

    def sample_many(
        self, settings: tuple[int, ...], n_draws: int, rng: np.random.Generator
    ) -> dict[tuple[Any, ...], int]:
        """Count ``n_draws`` independent draws at one settings choice."""
        counts: dict[tuple[Any, ...], int] = {}
        for _ in range(int(n_draws)):
            o = self.sample(settings, rng)
            counts[o] = counts.get(o, 0) + 1
        return counts


def build_multiparty_model(
    scenario: Scenario, max_table_entries: int = 2_000_000
) -> OutcomeDistribution:
    """Exact outcome table of the protocol mixture for a scenario."""
    return MultipartyModel(scenario, max_table_entries).exact_distribution()
