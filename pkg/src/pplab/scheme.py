"""Joint pseudo-probability schemes over dichotomic observables.

A scheme is the full table of pseudo-probabilities for all 2^N joint
outcomes of N dichotomic observables spread over subsystems.  Observables
sharing a subsystem enter through a pseudo-projection; different subsystems
tensor together.  Entries always sum to 1, and dropping any observable
marginalizes exactly onto the scheme of the remaining ones, with single
surviving observables reducing to Born probabilities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .geometry import pauli_vector
from .operator_core import (
    Array,
    DensityMatrix,
    Projector,
    SPECTRAL_TOL,
    STRUCTURAL_TOL,
    as_complex_matrix,
    expectation,
    require_square,
    resolve_tolerance,
)
from .pseudoprojection import convex_pp, symmetrized_pp, unit_pp

__all__ = [
    "ObservableSpec",
    "Scheme",
    "build_scheme",
    "marginalize",
    "negativity_report",
    "equality_sum",
    "scheme_to_json",
    "scheme_from_json",
    "outcomes_to_string",
    "string_to_outcomes",
]

MAX_OBSERVABLES = 8
PRESCRIPTIONS = ("unit", "symmetrized", "convex")

# Accept the typographic minus on parse; always emit ASCII.
_MINUS_CHARS = "-−"


@dataclass(frozen=True)
class ObservableSpec:
    """One dichotomic observable attached to a subsystem.

    Provide either a Bloch `axis` (qubit observable sigma.axis) or a general
    Hermitian `matrix` squaring to the identity.
    """

    subsystem: int
    axis: Array | None = None
    matrix: Array | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.subsystem < 0:
            raise InvalidInputError(f"subsystem index must be >= 0, got {self.subsystem}")
        if (self.axis is None) == (self.matrix is None):
            raise InvalidInputError("provide exactly one of axis or matrix")
        if self.axis is not None:
            m = pauli_vector(self.axis)
            object.__setattr__(self, "axis", np.asarray(self.axis, dtype=float))
        else:
            m = require_square(as_complex_matrix(self.matrix, "matrix"), "matrix")
            if not np.allclose(m, m.conj().T, atol=STRUCTURAL_TOL):
                raise InvalidInputError("observable must be Hermitian")
            if not np.allclose(m @ m, np.eye(m.shape[0]), atol=SPECTRAL_TOL):
                raise InvalidInputError("observable must be dichotomic (square to identity)")
        object.__setattr__(self, "matrix", m)
        if not self.label:
            object.__setattr__(self, "label", f"s{self.subsystem}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]  # type: ignore[union-attr]

    def projector(self, outcome: int) -> Projector:
        if outcome not in (+1, -1):
            raise InvalidInputError(f"outcome must be +1 or -1, got {outcome!r}")
        d = self.dim
        return Projector(0.5 * (np.eye(d, dtype=complex) + outcome * self.matrix))


def outcomes_to_string(outcomes: tuple[int, ...]) -> str:
    return "".join("+" if s > 0 else "-" for s in outcomes)


def string_to_outcomes(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for ch in text:
        if ch == "+":
            out.append(+1)
        elif ch in _MINUS_CHARS:
            out.append(-1)
        else:
            raise InvalidInputError(f"bad outcome character {ch!r} in {text!r}")
    return tuple(out)


@dataclass(frozen=True)
class Scheme:
    """Pseudo-probability table over all joint outcomes."""

    observables: tuple[ObservableSpec, ...]
    entries: dict[tuple[int, ...], float]
    prescription: str
    weights: tuple[float, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        n = len(self.observables)
        if not (1 <= n <= MAX_OBSERVABLES):
            raise InvalidInputError(f"need 1..{MAX_OBSERVABLES} observables, got {n}")
        if len(self.entries) != 2**n:
            raise InvalidInputError(
                f"expected {2**n} entries for {n} observables, got {len(self.entries)}"
            )
        total = sum(self.entries.values())
        if abs(total - 1.0) > 1e-10:
            raise InvalidInputError(f"entries must sum to 1, got {total!r}")

    @property
    def n_observables(self) -> int:
        return len(self.observables)

    def entry(self, outcomes: tuple[int, ...] | str) -> float:
        key = string_to_outcomes(outcomes) if isinstance(outcomes, str) else tuple(outcomes)
        if key not in self.entries:
            raise InvalidInputError(f"no entry for outcomes {outcomes!r}")
        return self.entries[key]


def _subsystem_layout(observables: tuple[ObservableSpec, ...]) -> tuple[list[list[int]], list[int]]:
    """Observable positions per subsystem and subsystem dimensions."""
    count = max(o.subsystem for o in observables) + 1
    groups: list[list[int]] = [[] for _ in range(count)]
    dims = [0] * count
    for pos, obs in enumerate(observables):
        groups[obs.subsystem].append(pos)
        if dims[obs.subsystem] == 0:
            dims[obs.subsystem] = obs.dim
        elif dims[obs.subsystem] != obs.dim:
            raise InvalidInputError(
                f"subsystem {obs.subsystem} has observables of differing dimension"
            )
    for sub, g in enumerate(groups):
        if not g:
            raise InvalidInputError(f"subsystem {sub} has no observables")
    return groups, dims


def build_scheme(
    state: DensityMatrix,
    observables: list[ObservableSpec] | tuple[ObservableSpec, ...],
    prescription: str = "symmetrized",
    weights: object | None = None,
) -> Scheme:
    """Evaluate every joint pseudo-probability of `observables` in `state`.

    Observables on one subsystem combine through the chosen prescription;
    subsystems tensor in index order with subsystem 0 outermost.  `weights`
    applies only to the convex prescription and must match the ordering count
    of every multi-observable group.
    """
    obs = tuple(observables)
    if not (1 <= len(obs) <= MAX_OBSERVABLES):
        raise InvalidInputError(f"need 1..{MAX_OBSERVABLES} observables, got {len(obs)}")
    if prescription not in PRESCRIPTIONS:
        raise InvalidInputError(f"unknown prescription {prescription!r}")
    if weights is not None and prescription != "convex":
        raise InvalidInputError("weights are only meaningful for the convex prescription")
    groups, dims = _subsystem_layout(obs)
    if int(np.prod(dims)) != state.dim:
        raise InvalidInputError(
            f"subsystem dimensions {dims} do not compose to state dimension {state.dim}"
        )
    if weights is not None:
        sizes = {len(g) for g in groups if len(g) >= 2}
        if len(sizes) > 1:
            raise InvalidInputError(
                "convex weights require all multi-observable groups to share one size"
            )

    entries: dict[tuple[int, ...], float] = {}
    for outcome in itertools.product((+1, -1), repeat=len(obs)):
        factor_mats: list[Array] = []
        for positions in groups:
            projs = [obs[p].projector(outcome[p]) for p in positions]
            if len(projs) == 1:
                factor_mats.append(projs[0].matrix)
            elif prescription == "unit":
                factor_mats.append(unit_pp(projs).matrix)
            elif prescription == "symmetrized":
                factor_mats.append(symmetrized_pp(projs).matrix)
            else:
                factor_mats.append(convex_pp(projs, weights).matrix)
        joint = factor_mats[0]
        for m in factor_mats[1:]:
            joint = np.kron(joint, m)
        entries[outcome] = float(np.real(expectation(state, joint)))
    w = None if weights is None else tuple(float(x) for x in np.asarray(weights, dtype=float))
    return Scheme(observables=obs, entries=entries, prescription=prescription, weights=w)


def marginalize(s: Scheme, drop_index: int) -> Scheme:
    """Sum out one observable; exact for every prescription.

    Summing the two outcomes of a factor replaces it by the identity inside
    every ordering product, so the marginal table equals the scheme of the
    remaining observables.
    """
    n = s.n_observables
    if not (0 <= drop_index < n):
        raise InvalidInputError(f"drop_index {drop_index} out of range for {n} observables")
    if n == 1:
        raise InvalidInputError("cannot marginalize the last remaining observable")
    kept = tuple(o for i, o in enumerate(s.observables) if i != drop_index)
    entries: dict[tuple[int, ...], float] = {}
    for outcome in itertools.product((+1, -1), repeat=n - 1):
        total = 0.0
        for dropped in (+1, -1):
            full = outcome[:drop_index] + (dropped,) + outcome[drop_index:]
            total += s.entries[full]
        entries[outcome] = total
    return Scheme(observables=kept, entries=entries, prescription=s.prescription, weights=s.weights)


def negativity_report(s: Scheme) -> dict[str, object]:
    """Negative entries, the minimum entry, and the nonclassicality verdict."""
    tol = resolve_tolerance()
    negative = sorted(
        ((outcomes_to_string(k), v) for k, v in s.entries.items() if v < -tol),
        key=lambda kv: kv[1],
    )
    min_key = min(s.entries, key=s.entries.get)  # type: ignore[arg-type]
    return {
        "negative_entries": negative,
        "min_entry": (outcomes_to_string(min_key), s.entries[min_key]),
        "nonclassical": bool(negative),
        "tolerance": tol,
    }


def _parse_pattern(pattern: str, n: int) -> list[list[tuple[int, int]]]:
    """Groups of (index, sign); sign -1 marks a '~' negated slot."""
    if not isinstance(pattern, str) or not pattern.strip():
        raise InvalidInputError("pattern must be a non-empty string")
    groups: list[list[tuple[int, int]]] = []
    for chunk in pattern.split(","):
        tokens = [t.strip() for t in chunk.split("=")]
        if any(not t for t in tokens):
            raise InvalidInputError(f"malformed pattern chunk {chunk!r}")
        group: list[tuple[int, int]] = []
        for tok in tokens:
            sign = +1
            if tok.startswith("~"):
                sign = -1
                tok = tok[1:]
            if not tok.isdigit():
                raise InvalidInputError(f"malformed pattern token {tok!r}")
            idx = int(tok)
            if idx >= n:
                raise InvalidInputError(f"pattern index {idx} out of range for {n} observables")
            group.append((idx, sign))
        groups.append(group)
    return groups


def equality_sum(s: Scheme, pattern: str) -> float:
    """Sum of entries whose outcomes satisfy an equality pattern.

    Pattern mini-language: comma-separated groups, each "i=j=~k"; a '~'
    negates that observable's outcome before comparison, and singleton groups
    impose no constraint.  "0=1=2" sums the two fully-correlated entries;
    "~0=1=2" the anti-correlated ones.
    """
    groups = _parse_pattern(pattern, s.n_observables)
    total = 0.0
    for outcome, value in s.entries.items():
        ok = True
        for group in groups:
            signed = {outcome[idx] * sign for idx, sign in group}
            if len(signed) > 1:
                ok = False
                break
        if ok:
            total += value
    return total


def scheme_to_json(s: Scheme) -> dict[str, object]:
    """JSON-ready dict; outcome keys use ASCII '+'/'-'."""
    obs_out: list[dict[str, object]] = []
    for o in s.observables:
        d: dict[str, object] = {"subsystem": o.subsystem, "label": o.label}
        if o.axis is not None:
            d["axis"] = [float(x) for x in o.axis]
        else:
            d["matrix"] = {
                "re": np.real(o.matrix).tolist(),
                "im": np.imag(o.matrix).tolist(),
            }
        obs_out.append(d)
    payload: dict[str, object] = {
        "observables": obs_out,
        "prescription": s.prescription,
        "entries": {outcomes_to_string(k): v for k, v in s.entries.items()},
    }
    if s.weights is not None:
        payload["weights"] = list(s.weights)
    return payload


def scheme_from_json(data: dict[str, object]) -> Scheme:
    """Inverse of scheme_to_json; tolerates the typographic minus sign."""
    try:
        obs_in = data["observables"]
        prescription = data["prescription"]
        entries_in = data["entries"]
    except (KeyError, TypeError):
        raise InvalidInputError("scheme JSON needs observables, prescription, entries")
    observables = []
    for d in obs_in:  # type: ignore[union-attr]
        if "axis" in d:
            observables.append(
                ObservableSpec(subsystem=int(d["subsystem"]), axis=np.asarray(d["axis"], dtype=float), label=str(d.get("label", "")))
            )
        else:
            m = np.asarray(d["matrix"]["re"], dtype=float) + 1j * np.asarray(d["matrix"]["im"], dtype=float)
            observables.append(
                ObservableSpec(subsystem=int(d["subsystem"]), matrix=m, label=str(d.get("label", "")))
            )
    entries = {string_to_outcomes(k): float(v) for k, v in entries_in.items()}  # type: ignore[union-attr]
    weights = data.get("weights")
    w = None if weights is None else tuple(float(x) for x in weights)  # type: ignore[union-attr]
    return Scheme(
        observables=tuple(observables),
        entries=entries,
        prescription=str(prescription),
        weights=w,
    )
