"""Finitely generated abelian groups in invariant-factor form.

An FgAbelian is Z/d1 x ... x Z/dk x Z^r with d1 | d2 | ... | dk; elements are
exponent tuples with torsion coordinates reduced to [0, di).  Homomorphisms
are integer matrices acting on those coordinates, with well-definedness
checked against the torsion relations.  Ext groups of such pairs are
assembled from the cyclic building blocks and renormalised through the Smith
form, and purity of an embedded subgroup is decided by exact integer kernel
computations rather than enumeration so it also covers infinite groups.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

from .errors import InvalidParameter, NotBijective
from . import snf
from .rings import COMPLETE, UnitGroupStruct


class FgAbelian:
    """Z/d1 x ... x Z/dk x Z^r with the di forming a divisibility chain."""

    def __init__(self, invariant_factors=(), free_rank: int = 0):
        factors = tuple(int(d) for d in invariant_factors)
        if any(d < 2 for d in factors):
            raise InvalidParameter(f"invariant factors must be >= 2, got {factors}")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise InvalidParameter(f"invariant factors must form a chain, got {factors}")
        if free_rank < 0:
            raise InvalidParameter(f"free rank must be nonnegative, got {free_rank}")
        self.invariant_factors = factors
        self.free_rank = int(free_rank)
        self.k = len(factors)
        self.n = self.k + self.free_rank

    @classmethod
    def from_cyclic_orders(cls, orders, free_rank: int = 0) -> "FgAbelian":
        """Canonicalise an arbitrary product of cyclic groups."""
        orders = [int(d) for d in orders if int(d) != 1]
        if any(d < 1 for d in orders):
            raise InvalidParameter(f"cyclic orders must be positive, got {orders}")
        if not orders:
            return cls((), free_rank)
        diag = [[orders[i] if i == j else 0 for j in range(len(orders))] for i in range(len(orders))]
        return cls(snf.invariant_factors(diag), free_rank)

    # -- carrier interface -------------------------------------------------
    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.n

    def reduce(self, vec) -> tuple[int, ...]:
        if len(vec) != self.n:
            raise InvalidParameter(f"expected {self.n} coordinates, got {len(vec)}")
        return tuple(
            v % self.invariant_factors[i] if i < self.k else int(v) for i, v in enumerate(vec)
        )

    def op(self, x, y) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(x, y)])

    def inverse(self, x) -> tuple[int, ...]:
        return self.reduce([-a for a in x])

    def power(self, x, k: int) -> tuple[int, ...]:
        return self.reduce([k * a for a in x])

    def contains(self, x) -> bool:
        return (
            isinstance(x, tuple)
            and len(x) == self.n
            and all(isinstance(a, int) for a in x)
            and self.reduce(x) == x
        )

    @property
    def torsion_factors(self) -> tuple[int, ...]:
        return self.invariant_factors

    def torsion_factor_generator(self, idx: int) -> tuple[int, ...]:
        if not 0 <= idx < self.k:
            raise InvalidParameter(f"no torsion factor {idx}")
        return tuple(1 if i == idx else 0 for i in range(self.n))

    def free_generator(self, key: int) -> tuple[int, ...]:
        if not 0 <= key < self.free_rank:
            raise InvalidParameter(f"no free factor {key}")
        return tuple(1 if i == self.k + key else 0 for i in range(self.n))

    def decompose(self, x) -> tuple[tuple[int, ...], dict]:
        x = self.reduce(x)
        return (x[: self.k], {i: x[self.k + i] for i in range(self.free_rank) if x[self.k + i]})

    def compose(self, torsion_exps, free_exps) -> tuple[int, ...]:
        vec = list(torsion_exps) + [0] * (self.k - len(torsion_exps)) + [0] * self.free_rank
        for key, e in free_exps.items():
            vec[self.k + key] = e
        return self.reduce(vec)

    def nth_root(self, x, n: int):
        if n <= 0:
            raise InvalidParameter(f"root index must be positive, got {n}")
        x = self.reduce(x)
        out = []
        for i, a in enumerate(x):
            if i < self.k:
                m = self.invariant_factors[i]
                g = math.gcd(n, m)
                if a % g:
                    return None
                out.append((a // g) * pow(n // g, -1, m // g) % (m // g))
            else:
                if a % n:
                    return None
                out.append(a // n)
        return self.reduce(out)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int:
        if not self.is_finite:
            raise InvalidParameter("group is infinite")
        return math.prod(self.invariant_factors) if self.invariant_factors else 1

    def elements(self) -> Iterator[tuple[int, ...]]:
        if not self.is_finite:
            raise InvalidParameter("group is infinite")
        for combo in itertools.product(*(range(d) for d in self.invariant_factors)):
            yield combo

    def exponent(self) -> int:
        if not self.is_finite:
            raise InvalidParameter("group is infinite")
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def generators(self) -> list[tuple[int, ...]]:
        return [self.torsion_factor_generator(i) for i in range(self.k)] + [
            self.free_generator(j) for j in range(self.free_rank)
        ]

    def relation_columns(self) -> list[list[int]]:
        """Columns spanning the relation lattice (di * ei for torsion factors)."""
        cols = []
        for i, d in enumerate(self.invariant_factors):
            col = [0] * self.n
            col[i] = d
            cols.append(col)
        return cols

    def sample(self, rng, span: int = 6) -> tuple[int, ...]:
        vec = [rng.randrange(d) for d in self.invariant_factors]
        vec += [rng.randint(-span, span) for _ in range(self.free_rank)]
        return self.reduce(vec)

    def element_order(self, x) -> int | None:
        """Order of x, or None when infinite."""
        x = self.reduce(x)
        if any(x[self.k + j] for j in range(self.free_rank)):
            return None
        out = 1
        for i, a in enumerate(x[: self.k]):
            d = self.invariant_factors[i]
            out = math.lcm(out, d // math.gcd(a, d))
        return out

    def __eq__(self, other):
        return (
            isinstance(other, FgAbelian)
            and self.invariant_factors == other.invariant_factors
            and self.free_rank == other.free_rank
        )

    def __hash__(self):
        return hash((self.invariant_factors, self.free_rank))

    def __repr__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors] + ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "1"


class AbHom:
    """Homomorphism between FgAbelian groups, as an integer matrix on coordinates.

    Columns are images of the domain generators.  Construction checks the
    torsion relations: d_j times column j must vanish in the codomain.
    """

    def __init__(self, domain: FgAbelian, codomain: FgAbelian, matrix):
        self.domain = domain
        self.codomain = codomain
        self.matrix = [list(map(int, row)) for row in matrix]
        if len(self.matrix) != codomain.n or any(len(row) != domain.n for row in self.matrix):
            raise InvalidParameter(
                f"matrix must be {codomain.n}x{domain.n}, got "
                f"{len(self.matrix)}x{len(self.matrix[0]) if self.matrix else 0}"
            )
        for j, d in enumerate(domain.invariant_factors):
            for i in range(codomain.n):
                val = d * self.matrix[i][j]
                if i < codomain.k:
                    if val % codomain.invariant_factors[i]:
                        raise InvalidParameter(
                            f"column {j} violates the order-{d} relation at codomain row {i}"
                        )
                elif val:
                    raise InvalidParameter(
                        f"column {j} maps a torsion generator into the free part"
                    )

    @classmethod
    def identity(cls, group: FgAbelian) -> "AbHom":
        return cls(group, group, snf.identity_matrix(group.n))

    def apply(self, x) -> tuple[int, ...]:
        x = self.domain.reduce(x)
        return self.codomain.reduce(snf.mat_vec(self.matrix, list(x)))

    def compose(self, inner: "AbHom") -> "AbHom":
        """self after inner."""
        if inner.codomain != self.domain:
            raise InvalidParameter("homomorphisms do not compose")
        return AbHom(inner.domain, self.codomain, snf.mat_mul(self.matrix, inner.matrix))

    def is_surjective(self) -> bool:
        aug = [row[:] for row in self.matrix]
        for col in self.codomain.relation_columns():
            for i in range(self.codomain.n):
                aug[i].append(col[i])
        if not aug:
            return True
        _, d, _ = snf.smith_normal_form(aug)
        diag = snf.diagonal_of(d)
        return len(diag) >= self.codomain.n and all(x == 1 for x in diag[: self.codomain.n])

    def is_bijective(self) -> bool:
        # a surjection between groups with identical invariants is bijective
        # (finitely generated abelian groups are Hopfian)
        return (
            self.domain.invariant_factors == self.codomain.invariant_factors
            and self.domain.free_rank == self.codomain.free_rank
            and self.is_surjective()
        )

    def inverse(self) -> "AbHom":
        if not self.is_bijective():
            raise NotBijective("homomorphism is not an isomorphism")
        aug = [row[:] for row in self.matrix]
        rel_cols = self.codomain.relation_columns()
        for col in rel_cols:
            for i in range(self.codomain.n):
                aug[i].append(col[i])
        cols = []
        for j in range(self.codomain.n):
            target = [1 if i == j else 0 for i in range(self.codomain.n)]
            sol = snf.solve_integer(aug, target)
            if sol is None:
                raise NotBijective("no integral preimage for a codomain generator")
            cols.append(sol[: self.domain.n])
        matrix = [[cols[j][i] for j in range(self.codomain.n)] for i in range(self.domain.n)]
        return AbHom(self.codomain, self.domain, matrix)

    def kernel_is_trivial(self) -> bool:
        gens = _preimage_subgroup_generators(self, 0)
        return all(self.domain.reduce(g) == self.domain.identity for g in gens)

    def __repr__(self):
        return f"AbHom({self.domain!r} -> {self.codomain!r})"


def ext_group(b: FgAbelian, a: FgAbelian) -> FgAbelian:
    """Ext(B, A) assembled from the cyclic factor pairs.

    Ext(Z/m, Z/n) = Z/gcd(m, n); Ext(Z/m, Z) = Z/m; Ext(Z, -) = 0.  The
    resulting product is renormalised to invariant-factor form.
    """
    orders = []
    for m in b.invariant_factors:
        for n in a.invariant_factors:
            orders.append(math.gcd(m, n))
        orders.extend([m] * a.free_rank)
    return FgAbelian.from_cyclic_orders(orders)


def _preimage_subgroup_generators(hom: AbHom, n: int) -> list[tuple[int, ...]]:
    """Generators of {a in A : hom(a) lies in n*B} as a subgroup of A.

    Solves hom(a) = n*b modulo the codomain relations by an integer kernel
    computation over the stacked variables (a, b, relation multipliers).
    """
    a_grp, b_grp = hom.domain, hom.codomain
    rel_cols = b_grp.relation_columns()
    width = a_grp.n + b_grp.n + len(rel_cols)
    system = []
    for i in range(b_grp.n):
        row = [hom.matrix[i][j] for j in range(a_grp.n)]
        row += [-n if i == t else 0 for t in range(b_grp.n)]
        row += [-col[i] for col in rel_cols]
        system.append(row)
    if not system:
        return list(a_grp.generators())
    basis = snf.kernel_basis(system)
    assert all(len(v) == width for v in basis)
    return [a_grp.reduce(v[: a_grp.n]) for v in basis]


def _in_n_multiples(group: FgAbelian, x, n: int) -> bool:
    """Whether x lies in n*group, coordinate by coordinate."""
    x = group.reduce(x)
    for i, a in enumerate(x):
        if i < group.k:
            if a % math.gcd(n, group.invariant_factors[i]):
                return False
        elif a % n:
            return False
    return True


def is_pure_subgroup(embedding: AbHom, bound: int) -> bool:
    """Decide nA = nB intersect A for all 1 <= n <= bound.

    The embedding presents A as a subgroup of B.  For each n the preimage of
    n*B under the embedding is computed exactly; purity at n means every
    generator of that preimage already lies in n*A.
    """
    if bound < 1:
        raise InvalidParameter(f"bound must be positive, got {bound}")
    if not embedding.kernel_is_trivial():
        raise InvalidParameter("the homomorphism is not injective, so not an embedding")
    for n in range(1, bound + 1):
        for gen in _preimage_subgroup_generators(embedding, n):
            if not _in_n_multiples(embedding.domain, gen, n):
                return False
    return True


# ---------------------------------------------------------------------------
# bridge from unit groups


def unit_group_as_fg(units: UnitGroupStruct):
    """Present a finitely generated unit group as an FgAbelian.

    Returns (group, to_exponents, from_exponents).  Lazy prime-basis groups
    (Q^x) are not finitely generated and are rejected.
    """
    if units.basis_mode != COMPLETE:
        raise InvalidParameter(f"{units.ring.spec}^x is not finitely generated")
    torsion = (units.torsion_order,) if units.torsion_order > 1 else ()
    group = FgAbelian(torsion, len(units.free_basis))

    def to_exponents(x):
        t, free = units.decompose(x)
        return group.compose(t, free)

    def from_exponents(vec):
        t, free = group.decompose(vec)
        return units.compose(t, free)

    return group, to_exponents, from_exponents
