"""Finite-dimensional multiple Rota-Baxter algebras.

An instance bundles an associative unital algebra presentation (structure
constants over Q), an indexed family of linear operators P_w, and a family
of weights lambda_w.  The defining identity, checked exhaustively on basis
pairs for every operator pair (alpha, beta), is

    P_a(x) P_b(y) = P_a(x P_b(y)) + P_b(P_a(x) y)
                    + lambda_b P_a(x y) + lambda_a P_b(x y).

Both weight slots draw from the single weight family (the diagonal pair
weight convention); the identity is bilinear in (x, y), so basis pairs
decide it on the whole algebra.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .linalg import (
    Matrix,
    Vector,
    frac,
    format_rational,
    is_zero_vector,
    unit_vector,
    vector,
    zero_vector,
)


class MalformedPresentationError(ValueError):
    """Shapes of a presentation do not match its declared dimension."""


class PreconditionError(ValueError):
    """An operation was invoked outside its contract."""


@dataclass(frozen=True)
class AlgebraPresentation:
    """Associative unital algebra given by structure constants.

    ``structure_constants[i][j]`` is the coordinate vector of b_i * b_j.
    Associativity and the unit laws are not enforced here; they are what
    :func:`check_presentation` verifies.
    """

    dim: int
    basis_labels: tuple[str, ...]
    structure_constants: tuple[tuple[Vector, ...], ...]
    unit: Vector

    def __post_init__(self):
        d = self.dim
        if len(self.basis_labels) != d or len(set(self.basis_labels)) != d:
            raise MalformedPresentationError("basis labels must be distinct and match dim")
        if len(self.structure_constants) != d:
            raise MalformedPresentationError("structure constant array has wrong shape")
        for row in self.structure_constants:
            if len(row) != d or any(len(v) != d for v in row):
                raise MalformedPresentationError("structure constant array has wrong shape")
        if len(self.unit) != d:
            raise MalformedPresentationError("unit vector has wrong length")

    def label_index(self, name: str) -> int:
        try:
            return self.basis_labels.index(name)
        except ValueError:
            raise KeyError(f"unknown basis label {name!r}") from None

    def basis_vector(self, i: int) -> Vector:
        return unit_vector(self.dim, i)

    def multiply(self, u: Sequence, v: Sequence) -> Vector:
        u, v = vector(u), vector(v)
        out = [Fraction(0)] * self.dim
        for i, a in enumerate(u):
            if a == 0:
                continue
            for j, b in enumerate(v):
                if b == 0:
                    continue
                ab = a * b
                for k, c in enumerate(self.structure_constants[i][j]):
                    if c != 0:
                        out[k] += ab * c
        return tuple(out)

    def left_mult_matrix(self, u: Sequence) -> Matrix:
        """Matrix of v -> u*v in basis coordinates."""
        cols = [self.multiply(u, self.basis_vector(j)) for j in range(self.dim)]
        return Matrix.from_cols(cols, rows=self.dim)

    def right_mult_matrix(self, u: Sequence) -> Matrix:
        """Matrix of v -> v*u in basis coordinates."""
        cols = [self.multiply(self.basis_vector(j), u) for j in range(self.dim)]
        return Matrix.from_cols(cols, rows=self.dim)


@dataclass(frozen=True)
class OperatorFamily:
    """Linear operators on the algebra, one per label in Omega."""

    labels: tuple[str, ...]
    matrices: tuple[Matrix, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("operator labels must be distinct")
        if len(self.matrices) != len(self.labels):
            raise ValueError("one matrix per label required")

    def matrix(self, label: str) -> Matrix:
        return self.matrices[self.index(label)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown operator label {label!r}") from None


@dataclass(frozen=True)
class WeightFamily:
    labels: tuple[str, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.values):
            raise ValueError("one weight per label required")

    def weight(self, label: str) -> Fraction:
        try:
            return self.values[self.labels.index(label)]
        except ValueError:
            raise KeyError(f"unknown weight label {label!r}") from None


@dataclass(frozen=True)
class MrbAlgebraInstance:
    """Algebra presentation plus operator and weight families.

    ``verified`` is a latch set only by :func:`check_mrb_identity`; it is
    excluded from equality.
    """

    algebra: AlgebraPresentation
    operators: OperatorFamily
    weights: WeightFamily
    verified: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.operators.labels != self.weights.labels:
            raise ValueError("operator and weight families must share the same labels")
        d = self.algebra.dim
        for m in self.operators.matrices:
            if m.rows != d or m.cols != d:
                raise MalformedPresentationError("operator matrix has wrong shape")

    @property
    def omega(self) -> tuple[str, ...]:
        return self.operators.labels

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def p_matrix(self, label: str) -> Matrix:
        return self.operators.matrix(label)

    def weight(self, label: str) -> Fraction:
        return self.weights.weight(label)

    def apply_operator(self, label: str, v: Sequence) -> Vector:
        return self.operators.matrix(label).apply(v)

    def _mark_verified(self):
        object.__setattr__(self, "verified", True)


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    residual: Vector | None = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "where": list(self.where)}
        if self.residual is not None:
            out["residual"] = [format_rational(x) for x in self.residual]
        return out


@dataclass(frozen=True)
class CheckReport:
    subject: str
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "violations": [v.to_json() for v in self.violations],
        }


def check_presentation(alg: AlgebraPresentation) -> CheckReport:
    """List every associativity and unit failure of a presentation."""
    violations = []
    for i in range(alg.dim):
        b = alg.basis_vector(i)
        left = alg.multiply(alg.unit, b)
        if left != b:
            violations.append(Violation("unit-left", (i,), tuple(x - y for x, y in zip(left, b))))
        right = alg.multiply(b, alg.unit)
        if right != b:
            violations.append(Violation("unit-right", (i,), tuple(x - y for x, y in zip(right, b))))
    for i in range(alg.dim):
        bi = alg.basis_vector(i)
        for j in range(alg.dim):
            bj = alg.basis_vector(j)
            ij = alg.multiply(bi, bj)
            for k in range(alg.dim):
                bk = alg.basis_vector(k)
                lhs = alg.multiply(ij, bk)
                rhs = alg.multiply(bi, alg.multiply(bj, bk))
                if lhs != rhs:
                    violations.append(
                        Violation("associativity", (i, j, k), tuple(x - y for x, y in zip(lhs, rhs)))
                    )
    return CheckReport("presentation", tuple(violations))


def check_mrb_identity(inst: MrbAlgebraInstance) -> CheckReport:
    """Exhaustively evaluate the coupled operator identity.

    Both sides are computed on every basis pair and every pair of labels,
    d^2 s^2 evaluations total.  An empty report marks the instance verified.
    """
    pres = check_presentation(inst.algebra)
    if not pres.ok:
        raise PreconditionError("presentation must pass check_presentation first")
    alg = inst.algebra
    violations = []
    for a in inst.omega:
        pa = inst.p_matrix(a)
        la = inst.weight(a)
        for b in inst.omega:
            pb = inst.p_matrix(b)
            lb = inst.weight(b)
            for i in range(alg.dim):
                r1 = alg.basis_vector(i)
                pr1 = pa.apply(r1)
                for j in range(alg.dim):
                    r2 = alg.basis_vector(j)
                    pr2 = pb.apply(r2)
                    lhs = alg.multiply(pr1, pr2)
                    prod = alg.multiply(r1, r2)
                    rhs = pa.apply(alg.multiply(r1, pr2))
                    rhs = tuple(
                        x + y for x, y in zip(rhs, pb.apply(alg.multiply(pr1, r2)))
                    )
                    rhs = tuple(
                        x + lb * pav + la * pbv
                        for x, pav, pbv in zip(rhs, pa.apply(prod), pb.apply(prod))
                    )
                    residual = tuple(x - y for x, y in zip(lhs, rhs))
                    if not is_zero_vector(residual):
                        violations.append(Violation("mrb-identity", (i, j, a, b), residual))
    report = CheckReport("mrb-identity", tuple(violations))
    if report.ok:
        inst._mark_verified()
    return report


# ---------------------------------------------------------------------------
# Instance catalog
# ---------------------------------------------------------------------------

def componentwise_algebra(d: int) -> AlgebraPresentation:
    """Q^d with entrywise product; basis e1..ed, unit (1, ..., 1)."""
    sc = tuple(
        tuple(
            tuple(Fraction(1 if i == j == k else 0) for k in range(d))
            for j in range(d)
        )
        for i in range(d)
    )
    return AlgebraPresentation(
        dim=d,
        basis_labels=tuple(f"e{i + 1}" for i in range(d)),
        structure_constants=sc,
        unit=(Fraction(1),) * d,
    )


def upper_triangular_algebra() -> AlgebraPresentation:
    """Upper triangular 2x2 matrices; basis t11, t12, t22."""
    labels = ("t11", "t12", "t22")
    # products of matrix units E11, E12, E22
    table = {
        ("t11", "t11"): "t11",
        ("t11", "t12"): "t12",
        ("t12", "t22"): "t12",
        ("t22", "t22"): "t22",
    }
    sc = [[[Fraction(0)] * 3 for _ in range(3)] for _ in range(3)]
    for (a, b), c in table.items():
        sc[labels.index(a)][labels.index(b)][labels.index(c)] = Fraction(1)
    return AlgebraPresentation(
        dim=3,
        basis_labels=labels,
        structure_constants=tuple(tuple(tuple(v) for v in row) for row in sc),
        unit=(Fraction(1), Fraction(0), Fraction(1)),
    )


def trivial_instance(d: int, s: int, algebra: AlgebraPresentation | None = None) -> MrbAlgebraInstance:
    """Zero operators and zero weights over a d-dimensional algebra."""
    alg = algebra if algebra is not None else componentwise_algebra(d)
    if alg.dim != d:
        raise ValueError("algebra dimension does not match d")
    labels = tuple(str(i + 1) for i in range(s))
    ops = OperatorFamily(labels, tuple(Matrix.zero(d, d) for _ in labels))
    weights = WeightFamily(labels, tuple(Fraction(0) for _ in labels))
    return MrbAlgebraInstance(alg, ops, weights)


def _scaled_family(alg: AlgebraPresentation, proj: Matrix, c: Sequence) -> MrbAlgebraInstance:
    coeffs = tuple(frac(x) for x in c)
    if not coeffs:
        raise ValueError("coefficient list must be nonempty")
    if any(x == 0 for x in coeffs):
        raise ValueError("zero coefficients are rejected; they degenerate to the trivial family")
    labels = tuple(str(i + 1) for i in range(len(coeffs)))
    ops = OperatorFamily(labels, tuple(proj.scale(x) for x in coeffs))
    weights = WeightFamily(labels, tuple(-x / 2 for x in coeffs))
    return MrbAlgebraInstance(alg, ops, weights)


def scaled_projection(c: Sequence) -> MrbAlgebraInstance:
    """Family c_w * P on Q^2 where P(a, b) = (a, 0), with weights -c_w/2.

    P is a Rota-Baxter operator of weight -1 on the componentwise algebra,
    so every scaled family passes the identity checker.
    """
    alg = componentwise_algebra(2)
    proj = Matrix([[1, 0], [0, 0]])
    inst = _scaled_family(alg, proj, c)
    check_mrb_identity(inst)
    return inst


def upper_triangular_instance(c: Sequence = (1, 2)) -> MrbAlgebraInstance:
    """Noncommutative catalog entry: scaled projections onto the t11 line.

    Correctness is established by running the checker, not asserted.
    """
    alg = upper_triangular_algebra()
    proj = Matrix([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    inst = _scaled_family(alg, proj, c)
    check_mrb_identity(inst)
    return inst


def catalog() -> dict[str, MrbAlgebraInstance]:
    """Named verified instances used throughout the test suite."""
    entries: dict[str, MrbAlgebraInstance] = {}
    for d in (1, 2, 3):
        for s in (1, 2, 3):
            inst = trivial_instance(d, s)
            check_mrb_identity(inst)
            entries[f"trivial({d},{s})"] = inst
    for c in ((1,), (1, 2), (2, 3, 5)):
        entries[f"scaled_projection({','.join(map(str, c))})"] = scaled_projection(c)
    entries["upper_triangular(1,2)"] = upper_triangular_instance((1, 2))
    return entries


_CATALOG_NAME_RE = re.compile(r"(trivial|scaled_projection|upper_triangular)\(([^)]*)\)$")


def catalog_instance(name: str) -> MrbAlgebraInstance:
    """Resolve a catalog name like ``scaled_projection(1,2)``."""
    m = _CATALOG_NAME_RE.match(name.strip())
    if not m:
        raise KeyError(f"unknown catalog instance {name!r}")
    kind, argtext = m.groups()
    args = [a.strip() for a in argtext.split(",") if a.strip()]
    if kind == "trivial":
        d, s = (int(a) for a in args)
        inst = trivial_instance(d, s)
        check_mrb_identity(inst)
        return inst
    if kind == "scaled_projection":
        return scaled_projection([frac(a) for a in args])
    return upper_triangular_instance([frac(a) for a in args])


# ---------------------------------------------------------------------------
# Reweighting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReweightSpec:
    """Coefficient maps defining new operators as combinations of old ones.

    Each row (i, {w: a_iw}) yields P_i = sum a_iw P_w and
    lambda_i = sum a_iw lambda_w.
    """

    rows: tuple[tuple[str, tuple[tuple[str, Fraction], ...]], ...]

    @classmethod
    def from_dict(cls, maps: Mapping[str, Mapping[str, object]]) -> "ReweightSpec":
        rows = tuple(
            (str(new), tuple((str(old), frac(a)) for old, a in coeffs.items()))
            for new, coeffs in maps.items()
        )
        return cls(rows)

    @classmethod
    def identity(cls, omega: Sequence[str]) -> "ReweightSpec":
        return cls(tuple((w, ((w, Fraction(1)),)) for w in omega))

    def labels(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.rows)


def reweight(inst: MrbAlgebraInstance, spec: ReweightSpec) -> MrbAlgebraInstance:
    """Instance with operators and weights replaced by the spec's combinations.

    The result is re-verified by the identity checker before being returned.
    """
    if not inst.verified:
        raise PreconditionError("instance must be verified before reweighting")
    if not spec.rows:
        raise ValueError("reweight spec must be nonempty")
    labels = spec.labels()
    if len(set(labels)) != len(labels):
        raise ValueError("reweight spec labels must be distinct")
    d = inst.dim
    matrices = []
    values = []
    for _, coeffs in spec.rows:
        m = Matrix.zero(d, d)
        w = Fraction(0)
        for old, a in coeffs:
            m = m + inst.p_matrix(old).scale(a)
            w += a * inst.weight(old)
        matrices.append(m)
        values.append(w)
    out = MrbAlgebraInstance(
        inst.algebra,
        OperatorFamily(labels, tuple(matrices)),
        WeightFamily(labels, tuple(values)),
    )
    report = check_mrb_identity(out)
    if not report.ok:
        raise AssertionError("reweighted instance failed the identity checker")
    return out


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def _matrix_to_json(m: Matrix) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in m.entries]


def _matrix_from_json(rows: Sequence[Sequence[str]]) -> Matrix:
    return Matrix([[frac(x) for x in row] for row in rows])


def instance_to_json(inst: MrbAlgebraInstance) -> dict:
    alg = inst.algebra
    return {
        "dim": alg.dim,
        "basis": list(alg.basis_labels),
        "structure_constants": [
            [[format_rational(x) for x in v] for v in row] for row in alg.structure_constants
        ],
        "unit": [format_rational(x) for x in alg.unit],
        "omega": list(inst.omega),
        "operators": {w: _matrix_to_json(inst.p_matrix(w)) for w in inst.omega},
        "weights": {w: format_rational(inst.weight(w)) for w in inst.omega},
    }


def instance_from_json(doc: Mapping) -> MrbAlgebraInstance:
    try:
        alg = AlgebraPresentation(
            dim=int(doc["dim"]),
            basis_labels=tuple(str(x) for x in doc["basis"]),
            structure_constants=tuple(
                tuple(vector(v) for v in row) for row in doc["structure_constants"]
            ),
            unit=vector(doc["unit"]),
        )
        omega = tuple(str(w) for w in doc["omega"])
        ops = OperatorFamily(omega, tuple(_matrix_from_json(doc["operators"][w]) for w in omega))
        weights = WeightFamily(omega, tuple(frac(doc["weights"][w]) for w in omega))
    except (KeyError, TypeError) as exc:
        raise MalformedPresentationError(f"malformed instance document: {exc}") from exc
    return MrbAlgebraInstance(alg, ops, weights)


def load_instance(text_or_doc) -> MrbAlgebraInstance:
    """Accept an instance document, a JSON string, or a catalog name."""
    if isinstance(text_or_doc, MrbAlgebraInstance):
        return text_or_doc
    if isinstance(text_or_doc, Mapping):
        return instance_from_json(text_or_doc)
    text = str(text_or_doc)
    if text.lstrip().startswith("{"):
        return instance_from_json(json.loads(text))
    return catalog_instance(text)
