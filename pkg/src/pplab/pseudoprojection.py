"""Pseudo-projection operators: Hermitian stand-ins for classical indicator
functions of joint events over non-commuting projectors.

A pseudo-projection is built from an ordered product of projectors and made
Hermitian by averaging with its adjoint; symmetrized and convex variants
average over factor orderings.  None of these are idempotent unless the
factors commute, and their spectra may dip below zero, which is the entire
point: a negative expectation value is a nonclassicality certificate.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .operator_core import Array, Projector, as_complex_matrix, hermitian_eigen

__all__ = [
    "PseudoProjection",
    "unit_pp",
    "symmetrized_pp",
    "convex_pp",
    "conjunction_pp",
    "disjunction_pp",
    "min_eigen_certificate",
    "distinct_orderings",
]


@dataclass(frozen=True)
class PseudoProjection:
    """Hermitian joint-event operator with its factor list and prescription."""

    matrix: Array
    factors: tuple[Projector, ...]
    prescription: str
    weights: tuple[float, ...] | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _coerce_factors(factors: object, minimum: int = 2) -> tuple[Projector, ...]:
    try:
        items = list(factors)  # type: ignore[arg-type]
    except TypeError:
        raise InvalidInputError("factors must be an ordered collection of projectors")
    out: list[Projector] = []
    for f in items:
        out.append(f if isinstance(f, Projector) else Projector(as_complex_matrix(f, "factor")))
    if len(out) < minimum:
        raise InvalidInputError(f"need at least {minimum} factors, got {len(out)}")
    dims = {p.dim for p in out}
    if len(dims) != 1:
        raise InvalidInputError(f"factor dimension mismatch: {sorted(dims)}")
    return tuple(out)


def _ordered_product(mats: tuple[Array, ...], order: tuple[int, ...]) -> Array:
    prod = mats[order[0]].copy()
    for i in order[1:]:
        prod = prod @ mats[i]
    return prod


def distinct_orderings(n: int) -> list[tuple[int, ...]]:
    """Factor orderings modulo reversal.

    Hermitization identifies a product with its reverse, so orderings are
    deduplicated by requiring first index < last index; n!/2 survive for
    n >= 2.
    """
    if n < 2:
        raise InvalidInputError(f"orderings need n >= 2, got {n}")
    return [p for p in itertools.permutations(range(n)) if p[0] < p[-1]]


def unit_pp(factors: object) -> PseudoProjection:
    """(1/2)(pi_1 ... pi_N + h.c.) for one fixed factor ordering."""
    fs = _coerce_factors(factors)
    mats = tuple(p.matrix for p in fs)
    prod = _ordered_product(mats, tuple(range(len(fs))))
    return PseudoProjection(0.5 * (prod + prod.conj().T), fs, "unit")


def symmetrized_pp(factors: object) -> PseudoProjection:
    """Equal-weight average of unit pseudo-projections over all orderings."""
    fs = _coerce_factors(factors)
    mats = tuple(p.matrix for p in fs)
    orders = distinct_orderings(len(fs))
    acc = np.zeros_like(mats[0])
    for order in orders:
        prod = _ordered_product(mats, order)
        acc = acc + 0.5 * (prod + prod.conj().T)
    return PseudoProjection(acc / len(orders), fs, "symmetrized")


def convex_pp(factors: object, weights: object | None = None) -> PseudoProjection:
    """Convex mixture of the ordering-resolved unit pseudo-projections.

    `weights` must match the distinct-ordering count (n!/2), be non-negative,
    and sum to 1; omitted weights reproduce the symmetrized prescription.
    """
    fs = _coerce_factors(factors)
    mats = tuple(p.matrix for p in fs)
    orders = distinct_orderings(len(fs))
    if weights is None:
        w = np.full(len(orders), 1.0 / len(orders))
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(orders),):
            raise InvalidInputError(
                f"weights must have length {len(orders)} (one per ordering), got {w.shape}"
            )
        if np.any(w < -1e-14) or abs(w.sum() - 1.0) > 1e-10:
            raise InvalidInputError("weights must be non-negative and sum to 1")
    acc = np.zeros_like(mats[0])
    for wi, order in zip(w, orders):
        prod = _ordered_product(mats, order)
        acc = acc + wi * 0.5 * (prod + prod.conj().T)
    return PseudoProjection(acc, fs, "convex", weights=tuple(float(x) for x in w))


def conjunction_pp(factors: object) -> PseudoProjection:
    """Right-nested half-anticommutator conjunction.

    For factors (f_1, ..., f_N) this is (1/2){f_1, (1/2){f_2, ...}}, nesting
    from the right.  Entries may be Projector or PseudoProjection; the stored
    factor list is the flattened projector sequence.  Distinct from `unit_pp`
    for three or more factors.
    """
    try:
        items = list(factors)  # type: ignore[arg-type]
    except TypeError:
        raise InvalidInputError("factors must be an ordered collection")
    if len(items) < 2:
        raise InvalidInputError(f"need at least 2 factors, got {len(items)}")
    mats: list[Array] = []
    flat: list[Projector] = []
    for f in items:
        if isinstance(f, PseudoProjection):
            mats.append(f.matrix)
            flat.extend(f.factors)
        elif isinstance(f, Projector):
            mats.append(f.matrix)
            flat.append(f)
        else:
            p = Projector(as_complex_matrix(f, "factor"))
            mats.append(p.matrix)
            flat.append(p)
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise InvalidInputError(f"factor dimension mismatch: {sorted(dims)}")
    acc = mats[-1]
    for m in reversed(mats[:-1]):
        acc = 0.5 * (m @ acc + acc @ m)
    return PseudoProjection(acc, tuple(flat), "nested")


def disjunction_pp(pa: object, pb: object) -> PseudoProjection:
    """Inclusion-exclusion disjunction: pi_a + pi_b - (1/2){pi_a, pi_b}."""
    fs = _coerce_factors([pa, pb])
    a, b = fs[0].matrix, fs[1].matrix
    m = a + b - 0.5 * (a @ b + b @ a)
    return PseudoProjection(m, fs, "disjunction")


def min_eigen_certificate(pp: PseudoProjection | Array) -> tuple[float, Array]:
    """Smallest eigenvalue and its normalized eigenvector.

    A strictly negative minimum certifies that the operator cannot be a
    classical indicator; the witness vector realizes the negative expectation.
    """
    m = pp.matrix if isinstance(pp, PseudoProjection) else as_complex_matrix(pp, "pp")
    w, v = hermitian_eigen(m)
    return float(w[0]), v[:, 0]
