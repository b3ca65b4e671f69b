"""The ring of operator words over a verified instance, as a rewriting system.

Words alternate algebra slots and formal operator letters,
``r0 Q[w1] r1 ... Q[wk] rk`` with q_degree k.  The quotient ring divides by
the two-sided ideal generated by

    Q_a r Q_b - P_a(r) Q_b + Q_b P_a(r) + lambda_b Q_a r + lambda_a Q_b r,

read here as the degree-lowering rewrite rule

    Q_a r Q_b  ->  P_a(r) Q_b - Q_b P_a(r) - lambda_b Q_a r - lambda_a Q_b r.

Every rule application lowers q_degree by one, so reduction terminates with
all words at q_degree <= 1.  Confluence of the rule set is *not* assumed:
it is probed (`confluence_probe`), and a truncated linear-algebra oracle
over the ideal span (`truncated_quotient_oracle`) serves as ground truth
for the quotient whenever strategies could disagree.

Elements store slots as basis indices; words built from general algebra
vectors (including the unit, which separates adjacent operator letters in
the free product) are expanded multilinearly into basis-slot words.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import MrbAlgebraInstance, PreconditionError
from .linalg import SparseRowSpace, frac, vector
from .operated import OperatedElement


@dataclass(frozen=True)
class OpWord:
    """Alternating word r0 Q[w1] r1 ... Q[wk] rk; slots are basis indices."""

    slots: tuple[int, ...]
    ops: tuple[str, ...]

    def __post_init__(self):
        if len(self.slots) != len(self.ops) + 1:
            raise ValueError("a word needs exactly one more slot than operator letters")

    @property
    def q_degree(self) -> int:
        return len(self.ops)

    def sort_key(self):
        return (self.q_degree, self.slots, self.ops)


def _canonical(terms: Mapping[OpWord, Fraction]) -> tuple[tuple[OpWord, Fraction], ...]:
    return tuple(
        (w, c) for w, c in sorted(terms.items(), key=lambda t: t[0].sort_key()) if c != 0
    )


@dataclass(frozen=True)
class OpElement:
    """Finitely supported rational combination of operator words."""

    terms: tuple[tuple[OpWord, Fraction], ...]

    @classmethod
    def from_dict(cls, terms: Mapping[OpWord, Fraction]) -> "OpElement":
        return cls(_canonical(terms))

    @classmethod
    def zero(cls) -> "OpElement":
        return cls(())

    def as_dict(self) -> dict[OpWord, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "OpElement") -> "OpElement":
        out = self.as_dict()
        for w, c in other.terms:
            out[w] = out.get(w, Fraction(0)) + c
        return OpElement.from_dict(out)

    def __sub__(self, other: "OpElement") -> "OpElement":
        return self + (-other)

    def __neg__(self) -> "OpElement":
        return OpElement(tuple((w, -c) for w, c in self.terms))

    def scale(self, c) -> "OpElement":
        c = frac(c)
        if c == 0:
            return OpElement.zero()
        return OpElement(tuple((w, c * k) for w, k in self.terms))

    def max_q_degree(self) -> int:
        return max((w.q_degree for w, _ in self.terms), default=0)

    def sort_key(self):
        return tuple((w.sort_key(), c) for w, c in self.terms)


@dataclass(frozen=True)
class FreeModuleElement:
    """Combination of (operator word, generator) pairs.

    These present elements of the free module on a generator set through
    the operator ring: the ring acts on the left, generators close words on
    the right.
    """

    terms: tuple[tuple[OpWord, str, Fraction], ...]

    @classmethod
    def from_dict(cls, terms: Mapping[tuple[OpWord, str], Fraction]) -> "FreeModuleElement":
        items = sorted(terms.items(), key=lambda t: (t[0][0].sort_key(), t[0][1]))
        return cls(tuple((w, g, c) for (w, g), c in items if c != 0))

    @classmethod
    def zero(cls) -> "FreeModuleElement":
        return cls(())

    def as_dict(self) -> dict[tuple[OpWord, str], Fraction]:
        return {(w, g): c for w, g, c in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FreeModuleElement") -> "FreeModuleElement":
        out = self.as_dict()
        for w, g, c in other.terms:
            out[(w, g)] = out.get((w, g), Fraction(0)) + c
        return FreeModuleElement.from_dict(out)

    def __sub__(self, other: "FreeModuleElement") -> "FreeModuleElement":
        return self + other.scale(-1)

    def scale(self, c) -> "FreeModuleElement":
        c = frac(c)
        if c == 0:
            return FreeModuleElement.zero()
        return FreeModuleElement(tuple((w, g, c * k) for w, g, k in self.terms))


@dataclass(frozen=True)
class RewriteReport:
    input: OpElement
    output: OpElement
    applications: int
    strategy: str = "leftmost-innermost"


@dataclass(frozen=True)
class Discrepancy:
    word: OpWord
    normal_forms: tuple[OpElement, ...]
    witnesses: tuple[OpElement, ...]


@dataclass(frozen=True)
class ConfluenceReport:
    probed: int
    discrepancies: tuple[Discrepancy, ...]

    @property
    def ok(self) -> bool:
        return not self.discrepancies


@dataclass(frozen=True)
class OracleResult:
    dim: int
    basis_cosets: tuple[OpWord, ...]
    word_count: int
    relation_rank: int


class OperatorRing:
    """Computations in the operator ring of one verified instance."""

    def __init__(self, inst: MrbAlgebraInstance):
        if not inst.verified:
            raise PreconditionError("instance must pass check_mrb_identity first")
        self.inst = inst
        self._nf_cache: dict[OpWord, tuple[OpElement, int]] = {}
        self._rnf_cache: dict[OpWord, frozenset[OpElement]] = {}
        self._oracle_cache: dict[int, tuple[OracleResult, SparseRowSpace, dict[OpWord, int]]] = {}

    # -- construction -------------------------------------------------------

    def word(self, slots: Sequence[int], ops: Sequence[str]) -> OpWord:
        d = self.inst.dim
        for i in slots:
            if not 0 <= i < d:
                raise ValueError(f"slot index {i} out of range")
        for w in ops:
            if w not in self.inst.omega:
                raise KeyError(f"unknown operator label {w!r}")
        return OpWord(tuple(slots), tuple(ops))

    def element(self, slots: Sequence[int], ops: Sequence[str], coeff=1) -> OpElement:
        return OpElement.from_dict({self.word(slots, ops): frac(coeff)})

    def word_element(self, vectors: Sequence[Sequence], ops: Sequence[str]) -> OpElement:
        """Multilinear expansion of a word with general vector slots."""
        if len(vectors) != len(ops) + 1:
            raise ValueError("need one more slot vector than operator letters")
        vecs = [vector(v) for v in vectors]
        terms: dict[OpWord, Fraction] = {}
        for combo in itertools.product(*(range(self.inst.dim) for _ in vecs)):
            c = Fraction(1)
            for v, i in zip(vecs, combo):
                c *= v[i]
                if c == 0:
                    break
            if c == 0:
                continue
            w = self.word(combo, ops)
            terms[w] = terms.get(w, Fraction(0)) + c
        return OpElement.from_dict(terms)

    def unit(self) -> OpElement:
        return self.word_element([self.inst.algebra.unit], [])

    def embed(self, v: Sequence) -> OpElement:
        """Algebra element as a q_degree-0 ring element."""
        return self.word_element([v], [])

    def q_letter(self, label: str) -> OpElement:
        """The element 1 Q[label] 1."""
        u = self.inst.algebra.unit
        return self.word_element([u, u], [label])

    # -- multiplication -----------------------------------------------------

    def multiply_words(self, a: OpWord, b: OpWord) -> OpElement:
        boundary = self.inst.algebra.multiply(
            self.inst.algebra.basis_vector(a.slots[-1]),
            self.inst.algebra.basis_vector(b.slots[0]),
        )
        terms: dict[OpWord, Fraction] = {}
        for t, c in enumerate(boundary):
            if c == 0:
                continue
            w = OpWord(a.slots[:-1] + (t,) + b.slots[1:], a.ops + b.ops)
            terms[w] = terms.get(w, Fraction(0)) + c
        return OpElement.from_dict(terms)

    def multiply(self, a: OpElement, b: OpElement) -> OpElement:
        """Free-product multiplication; the result is not normalized."""
        out: dict[OpWord, Fraction] = {}
        for wa, ca in a.terms:
            for wb, cb in b.terms:
                for w, c in self.multiply_words(wa, wb).terms:
                    out[w] = out.get(w, Fraction(0)) + ca * cb * c
        return OpElement.from_dict(out)

    # -- rewriting ----------------------------------------------------------

    def rewrite_at(self, w: OpWord, pos: int) -> OpElement:
        """Contract the redex Q_a r Q_b at 1-based position pos.

        pos ranges over 1..q_degree-1; the redex is (ops[pos-1], slots[pos],
        ops[pos]).  Boundary slots are merged through the algebra product,
        so every produced word has q_degree exactly one lower.
        """
        k = w.q_degree
        if not 1 <= pos <= k - 1:
            raise ValueError("no redex at this position")
        alg = self.inst.algebra
        alpha, beta = w.ops[pos - 1], w.ops[pos]
        la, lb = self.inst.weight(alpha), self.inst.weight(beta)
        r_mid = alg.basis_vector(w.slots[pos])
        p = self.inst.apply_operator(alpha, r_mid)
        out: dict[OpWord, Fraction] = {}

        def emit(slots, ops, coeff):
            if coeff == 0:
                return
            nw = OpWord(slots, ops)
            out[nw] = out.get(nw, Fraction(0)) + coeff

        ops_drop_alpha = w.ops[: pos - 1] + (beta,) + w.ops[pos + 1:]
        ops_drop_beta = w.ops[:pos] + w.ops[pos + 1:]
        # + P_a(r) Q_b : merge P_a(r) into the left neighbour slot
        merged = alg.multiply(alg.basis_vector(w.slots[pos - 1]), p)
        for t, c in enumerate(merged):
            emit(w.slots[: pos - 1] + (t,) + w.slots[pos + 1:], ops_drop_alpha, c)
        # - Q_b P_a(r) : merge P_a(r) into the right neighbour slot
        merged = alg.multiply(p, alg.basis_vector(w.slots[pos + 1]))
        for t, c in enumerate(merged):
            emit(w.slots[:pos] + (t,) + w.slots[pos + 2:], ops_drop_alpha, -c)
        # - lambda_b Q_a r  and  - lambda_a Q_b r : collapse the beta letter
        merged = alg.multiply(r_mid, alg.basis_vector(w.slots[pos + 1]))
        for t, c in enumerate(merged):
            emit(w.slots[:pos] + (t,) + w.slots[pos + 2:], ops_drop_beta, -lb * c)
            emit(w.slots[:pos] + (t,) + w.slots[pos + 2:], ops_drop_alpha, -la * c)
        return OpElement.from_dict(out)

    def _nf_word(self, w: OpWord) -> tuple[OpElement, int]:
        """Leftmost-innermost normal form of a single word, with the size of
        its full reduction tree (deterministic, cache independent)."""
        if w.q_degree <= 1:
            return OpElement.from_dict({w: Fraction(1)}), 0
        cached = self._nf_cache.get(w)
        if cached is not None:
            return cached
        step = self.rewrite_at(w, 1)
        total: dict[OpWord, Fraction] = {}
        apps = 1
        for w2, c in step.terms:
            nf2, a2 = self._nf_word(w2)
            apps += a2
            for w3, c3 in nf2.terms:
                total[w3] = total.get(w3, Fraction(0)) + c * c3
        result = (OpElement.from_dict(total), apps)
        self._nf_cache[w] = result
        return result

    def normal_form(self, e: OpElement) -> OpElement:
        out: dict[OpWord, Fraction] = {}
        for w, c in e.terms:
            nf, _ = self._nf_word(w)
            for w2, c2 in nf.terms:
                out[w2] = out.get(w2, Fraction(0)) + c * c2
        return OpElement.from_dict(out)

    def normalize(self, e: OpElement) -> RewriteReport:
        apps = 0
        out: dict[OpWord, Fraction] = {}
        for w, c in e.terms:
            nf, a = self._nf_word(w)
            apps += a
            for w2, c2 in nf.terms:
                out[w2] = out.get(w2, Fraction(0)) + c * c2
        return RewriteReport(e, OpElement.from_dict(out), apps)

    # -- word enumeration ---------------------------------------------------

    def basis_words(self, max_qdegree: int, min_qdegree: int = 0) -> list[OpWord]:
        d = self.inst.dim
        out = []
        for k in range(min_qdegree, max_qdegree + 1):
            for slots in itertools.product(range(d), repeat=k + 1):
                for ops in itertools.product(self.inst.omega, repeat=k):
                    out.append(OpWord(slots, ops))
        out.sort(key=OpWord.sort_key)
        return out

    # -- confluence probing -------------------------------------------------

    def word_normal_forms(self, w: OpWord, budget: int = 50000) -> frozenset[OpElement]:
        """All normal forms of a word reachable by contracting its redexes in
        any order, each occurrence reduced independently.

        Independent reduction of occurrences over-approximates the merged
        element semantics, so a singleton result certifies order independence
        while a larger set is evidence against it, to be adjudicated by the
        ideal-span oracle.
        """
        memo = self._rnf_cache

        def per_word(word: OpWord) -> frozenset[OpElement]:
            if word.q_degree <= 1:
                return frozenset([OpElement.from_dict({word: Fraction(1)})])
            cached = memo.get(word)
            if cached is not None:
                return cached
            acc: set[OpElement] = set()
            for pos in range(1, word.q_degree):
                step = self.rewrite_at(word, pos)
                options = [
                    (c, sorted(per_word(w2), key=OpElement.sort_key))
                    for w2, c in step.terms
                ]
                count = 1
                for _, opts in options:
                    count *= len(opts)
                if count > budget:
                    raise RuntimeError("confluence search budget exceeded")
                for choice in itertools.product(*(opts for _, opts in options)):
                    total = OpElement.zero()
                    for (c, _), nf in zip(options, choice):
                        total = total + nf.scale(c)
                    acc.add(total)
            result = frozenset(acc)
            memo[word] = result
            return result

        return per_word(w)

    def confluence_probe(self, max_qdegree: int) -> ConfluenceReport:
        """Reduce every overlap word (q_degree >= 3) via all redex orders."""
        discrepancies = []
        probed = 0
        for w in self.basis_words(max_qdegree, min_qdegree=3):
            probed += 1
            nfs = sorted(self.word_normal_forms(w), key=OpElement.sort_key)
            if len(nfs) > 1:
                witnesses = tuple(nf - nfs[0] for nf in nfs[1:])
                discrepancies.append(Discrepancy(w, tuple(nfs), witnesses))
        return ConfluenceReport(probed, tuple(discrepancies))

    # -- truncated quotient oracle ------------------------------------------

    def ideal_generator(self, r_index: int, alpha: str, beta: str) -> OpElement:
        """Q_a r Q_b - P_a(r) Q_b + Q_b P_a(r) + l_b Q_a r + l_a Q_b r."""
        alg = self.inst.algebra
        r = alg.basis_vector(r_index)
        p = self.inst.apply_operator(alpha, r)
        u = alg.unit
        la, lb = self.inst.weight(alpha), self.inst.weight(beta)
        e = self.word_element([u, r, u], [alpha, beta])
        e = e - self.word_element([p, u], [beta])
        e = e + self.word_element([u, p], [beta])
        e = e + self.word_element([u, r], [alpha]).scale(lb)
        e = e + self.word_element([u, r], [beta]).scale(la)
        return e

    def ideal_generators(self) -> list[OpElement]:
        d = self.inst.dim
        return [
            self.ideal_generator(i, a, b)
            for i in range(d)
            for a in self.inst.omega
            for b in self.inst.omega
        ]

    def _element_row(self, e: OpElement, index: Mapping[OpWord, int]) -> dict[int, Fraction]:
        return {index[w]: c for w, c in e.terms}

    def _oracle(self, max_qdegree: int) -> tuple[OracleResult, SparseRowSpace, dict[OpWord, int]]:
        cached = self._oracle_cache.get(max_qdegree)
        if cached is not None:
            return cached
        words = self.basis_words(max_qdegree)
        index = {w: i for i, w in enumerate(words)}
        rows = SparseRowSpace()
        d = self.inst.dim
        side_words = self.basis_words(max_qdegree - 2) if max_qdegree >= 2 else []
        for i in range(d):
            for alpha in self.inst.omega:
                for beta in self.inst.omega:
                    g = self.ideal_generator(i, alpha, beta)
                    for u in side_words:
                        ug = self.multiply(OpElement.from_dict({u: Fraction(1)}), g)
                        room = max_qdegree - 2 - u.q_degree
                        for v in side_words:
                            if v.q_degree > room:
                                continue
                            ugv = self.multiply(ug, OpElement.from_dict({v: Fraction(1)}))
                            rows.add(self._element_row(ugv, index))
        cosets = tuple(w for w in words if index[w] not in rows.pivot_columns)
        result = OracleResult(
            dim=len(words) - rows.rank,
            basis_cosets=cosets,
            word_count=len(words),
            relation_rank=rows.rank,
        )
        self._oracle_cache[max_qdegree] = (result, rows, index)
        return result, rows, index

    def truncated_quotient_oracle(self, max_qdegree: int) -> OracleResult:
        """Quotient dimension of the degree-truncated word space by the part
        of the ideal visible inside the truncation.

        Generator multiples whose leading degree exceeds the truncation are
        discarded, so the span under-approximates the ideal; at small degree
        the rewriting system is compared against it for exact agreement.
        """
        if max_qdegree < 0:
            raise ValueError("max_qdegree must be nonnegative")
        return self._oracle(max_qdegree)[0]

    def ideal_contains(self, e: OpElement, max_qdegree: int) -> bool:
        """Membership of e in the truncated ideal span."""
        if e.max_q_degree() > max_qdegree:
            raise ValueError("element exceeds the truncation degree")
        _, rows, index = self._oracle(max_qdegree)
        return rows.contains(self._element_row(e, index))

    # -- free module on generators ------------------------------------------

    def module_word(self, slots: Sequence[int], ops: Sequence[str], gen: str) -> FreeModuleElement:
        return FreeModuleElement.from_dict({(self.word(slots, ops), gen): Fraction(1)})

    def act(self, a: OpElement, m: FreeModuleElement) -> FreeModuleElement:
        """Left action of the ring on free-module elements."""
        out: dict[tuple[OpWord, str], Fraction] = {}
        for wa, ca in a.terms:
            for wm, g, cm in m.terms:
                for w, c in self.multiply_words(wa, wm).terms:
                    key = (w, g)
                    out[key] = out.get(key, Fraction(0)) + ca * cm * c
        return FreeModuleElement.from_dict(out)

    def free_module_normal_form(self, m: FreeModuleElement) -> FreeModuleElement:
        out: dict[tuple[OpWord, str], Fraction] = {}
        for w, g, c in m.terms:
            nf, _ = self._nf_word(w)
            for w2, c2 in nf.terms:
                key = (w2, g)
                out[key] = out.get(key, Fraction(0)) + c * c2
        return FreeModuleElement.from_dict(out)

    def from_operated(self, e: OperatedElement) -> FreeModuleElement:
        """Translate mixable-tensor words: r1 (x) w1 (x) ... (x) rn (x) x
        becomes the pair (r1 Q[w1] r2 ... rn, x)."""
        out: dict[tuple[OpWord, str], Fraction] = {}
        for w, c in e.terms:
            ow = OpWord(w.slots, w.ops)
            key = (ow, w.gen)
            out[key] = out.get(key, Fraction(0)) + c
        return FreeModuleElement.from_dict(out)
