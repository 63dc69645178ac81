"""Triangular matrix groups and their abelian deformations.

Two pictures of the same object.  TriMatrix / TriMatrixGroup is the concrete
group of invertible upper triangular matrices over an exact ring.  A
DeformedGroup replaces the diagonal torus (R^x)^n by a central extension of
(R^x)^{n-1} by R^x built from a tuple of symmetric 2-cocycles f_1..f_{n-1};
elements are kept in the normal form (xbar, z, U) with xbar the torus part,
z the central unit and U a strict upper triangular matrix.  With all
cocycles trivial the two pictures are isomorphic and the bridge maps below
realise the isomorphism explicitly.

Index convention: generators and entry keys are 1-based, matching t_ij and
d_k notation; i < j always for strict upper entries.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Iterator

from .cocycles import CarryCocycle, SymCocycle2, carriers_equal, is_coboundary, verify_cocycle
from .errors import (
    DomainMismatch,
    InvalidParameter,
    MissingWitness,
    NotAUnit,
    TooLarge,
)
from .rings import Ring

ENUMERATION_LIMIT = 10_000


# ---------------------------------------------------------------------------
# strict upper triangular arithmetic on sparse entry maps


def upper_normalise(ring: Ring, n: int, entries) -> tuple:
    """Sorted entry tuple with zeros dropped; keys are 1-based (i, j), i < j."""
    table = {}
    for (i, j), v in (entries.items() if isinstance(entries, dict) else entries):
        if not (1 <= i < j <= n):
            raise InvalidParameter(f"entry ({i}, {j}) is not strictly upper in size {n}")
        v = ring.ensure(v)
        if v != ring.zero:
            table[(i, j)] = ring.add(table[(i, j)], v) if (i, j) in table else v
            if table[(i, j)] == ring.zero:
                del table[(i, j)]
    return tuple(sorted(table.items()))


def upper_product(ring: Ring, n: int, u1: tuple, u2: tuple) -> tuple:
    """Pure matrix product U1 U2 of two strict parts."""
    out: dict = {}
    for (i, k), a in u1:
        for (k2, j), b in u2:
            if k == k2:
                prod = ring.mul(a, b)
                out[(i, j)] = ring.add(out[(i, j)], prod) if (i, j) in out else prod
    return upper_normalise(ring, n, out)


def upper_mul(ring: Ring, n: int, u1: tuple, u2: tuple) -> tuple:
    """Strict part of (I + U1)(I + U2) = I + U1 + U2 + U1 U2."""
    out = dict(u1)
    for key, v in u2:
        out[key] = ring.add(out[key], v) if key in out else v
    for key, v in upper_product(ring, n, u1, u2):
        out[key] = ring.add(out[key], v) if key in out else v
    return upper_normalise(ring, n, out)


def upper_inv(ring: Ring, n: int, u: tuple) -> tuple:
    """Strict part of (I + U)^-1 via the finite Neumann series."""
    acc: dict = {}
    power = u
    sign = -1
    while power:
        for key, v in power:
            term = v if sign > 0 else ring.neg(v)
            acc[key] = ring.add(acc[key], term) if key in acc else term
        power = upper_product(ring, n, power, u)
        sign = -sign
    return upper_normalise(ring, n, acc)


def upper_conjugate(ring: Ring, n: int, u: tuple, xbar: tuple) -> tuple:
    """Entrywise scaling x_i^-1 u_ij x_j with x_n = 1."""

    def coord(m: int):
        return xbar[m - 1] if m < n else ring.one

    scaled = []
    for (i, j), v in u:
        scaled.append(((i, j), ring.mul(ring.mul(ring.inv(coord(i)), v), coord(j))))
    return upper_normalise(ring, n, scaled)


# ---------------------------------------------------------------------------
# the matrix picture


class TriMatrix:
    """Invertible upper triangular matrix over an exact ring."""

    __slots__ = ("ring", "n", "rows")

    def __init__(self, ring: Ring, rows):
        self.ring = ring
        rows = tuple(tuple(ring.ensure(v) for v in row) for row in rows)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise InvalidParameter("matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != ring.zero:
                    raise InvalidParameter("matrix must be upper triangular")
            if not ring.is_unit(rows[i][i]):
                raise NotAUnit(f"diagonal entry {ring.format_elem(rows[i][i])} is not a unit")
        self.n = n
        self.rows = rows

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "TriMatrix":
        return cls(ring, [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)])

    @classmethod
    def transvection(cls, ring: Ring, n: int, i: int, j: int, beta) -> "TriMatrix":
        if not (1 <= i < j <= n):
            raise InvalidParameter(f"transvection needs 1 <= i < j <= n, got ({i}, {j})")
        rows = [[ring.one if a == b else ring.zero for b in range(n)] for a in range(n)]
        rows[i - 1][j - 1] = ring.ensure(beta)
        return cls(ring, rows)

    @classmethod
    def diagonal_gen(cls, ring: Ring, n: int, k: int, alpha) -> "TriMatrix":
        if not 1 <= k <= n:
            raise InvalidParameter(f"diagonal index {k} out of range")
        alpha = ring.ensure(alpha)
        if not ring.is_unit(alpha):
            raise NotAUnit(f"{ring.format_elem(alpha)} is not a unit")
        rows = [[ring.one if a == b else ring.zero for b in range(n)] for a in range(n)]
        rows[k - 1][k - 1] = alpha
        return cls(ring, rows)

    @classmethod
    def diagonal(cls, ring: Ring, entries) -> "TriMatrix":
        entries = [ring.ensure(v) for v in entries]
        n = len(entries)
        rows = [[entries[a] if a == b else ring.zero for b in range(n)] for a in range(n)]
        return cls(ring, rows)

    def entry(self, i: int, j: int):
        return self.rows[i - 1][j - 1]

    def mul(self, other: "TriMatrix") -> "TriMatrix":
        if self.ring != other.ring or self.n != other.n:
            raise DomainMismatch("matrix shapes or rings differ")
        r, n = self.ring, self.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = r.zero
                for k in range(i, j + 1):
                    acc = r.add(acc, r.mul(self.rows[i][k], other.rows[k][j]))
                row.append(acc)
            rows.append(row)
        return TriMatrix(r, rows)

    def inv(self) -> "TriMatrix":
        r, n = self.ring, self.n
        out = [[r.zero] * n for _ in range(n)]
        for j in range(n):
            out[j][j] = r.inv(self.rows[j][j])
            for i in range(j - 1, -1, -1):
                acc = r.zero
                for k in range(i + 1, j + 1):
                    acc = r.add(acc, r.mul(self.rows[i][k], out[k][j]))
                out[i][j] = r.neg(r.mul(r.inv(self.rows[i][i]), acc))
        return TriMatrix(r, out)

    def is_unitriangular(self) -> bool:
        return all(self.rows[i][i] == self.ring.one for i in range(self.n))

    def diagonal_part(self) -> tuple:
        return tuple(self.rows[i][i] for i in range(self.n))

    def strict_part(self) -> tuple:
        """Strict entries of D^-1 M, i.e. the U with M = D (I + U)."""
        r = self.ring
        entries = []
        for i in range(self.n):
            yi_inv = r.inv(self.rows[i][i])
            for j in range(i + 1, self.n):
                entries.append(((i + 1, j + 1), r.mul(yi_inv, self.rows[i][j])))
        return upper_normalise(r, self.n, entries)

    def to_json(self):
        return [[self.ring.elem_to_json(v) for v in row] for row in self.rows]

    @classmethod
    def from_json(cls, ring: Ring, data) -> "TriMatrix":
        return cls(ring, [[ring.elem_from_json(v) for v in row] for row in data])

    def __eq__(self, other):
        return (
            isinstance(other, TriMatrix)
            and self.ring == other.ring
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.ring, self.rows))

    def __repr__(self):
        body = "; ".join(
            " ".join(self.ring.format_elem(v) for v in row) for row in self.rows
        )
        return f"TriMatrix[{body}]"


class TriMatrixGroup:
    """T_n(R) with the group protocol used across the package."""

    def __init__(self, ring: Ring, n: int):
        if n < 1:
            raise InvalidParameter("matrix size must be positive")
        self.ring = ring
        self.n = n

    @property
    def identity(self) -> TriMatrix:
        return TriMatrix.identity(self.ring, self.n)

    def op(self, a: TriMatrix, b: TriMatrix) -> TriMatrix:
        return a.mul(b)

    def inverse(self, a: TriMatrix) -> TriMatrix:
        return a.inv()

    def commutator(self, a: TriMatrix, b: TriMatrix) -> TriMatrix:
        return a.inv().mul(b.inv()).mul(a).mul(b)

    def transvection(self, i: int, j: int, beta) -> TriMatrix:
        return TriMatrix.transvection(self.ring, self.n, i, j, beta)

    def diagonal_gen(self, k: int, alpha) -> TriMatrix:
        return TriMatrix.diagonal_gen(self.ring, self.n, k, alpha)

    def scalar(self, alpha) -> TriMatrix:
        alpha = self.ring.ensure(alpha)
        return TriMatrix.diagonal(self.ring, [alpha] * self.n)

    @property
    def is_finite(self) -> bool:
        return self.ring.is_finite

    def order(self) -> int:
        if not self.ring.is_finite:
            raise TooLarge("infinite ring")
        units = len(self.ring.units())
        return units**self.n * self.ring.size() ** (self.n * (self.n - 1) // 2)

    def elements(self) -> Iterator[TriMatrix]:
        if not self.ring.is_finite:
            raise TooLarge("infinite ring")
        if self.order() > ENUMERATION_LIMIT:
            raise TooLarge(f"group order {self.order()} exceeds {ENUMERATION_LIMIT}")
        r, n = self.ring, self.n
        units = list(r.units())
        ring_elems = list(r.elements())
        strict_slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for diag in itertools.product(units, repeat=n):
            for fill in itertools.product(ring_elems, repeat=len(strict_slots)):
                rows = [[r.zero] * n for _ in range(n)]
                for i in range(n):
                    rows[i][i] = diag[i]
                for (i, j), v in zip(strict_slots, fill):
                    rows[i][j] = v
                yield TriMatrix(r, rows)

    def sample(self, rng: random.Random) -> TriMatrix:
        r, n = self.ring, self.n
        rows = [[r.zero] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = r.random_unit(rng)
            for j in range(i + 1, n):
                rows[i][j] = r.random_elem(rng)
        return TriMatrix(r, rows)

    def generating_set(self) -> list[TriMatrix]:
        if not self.ring.is_finite:
            raise TooLarge("generating sets are enumerated for finite rings only")
        gens = []
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                gens.append(self.transvection(i, j, self.ring.one))
        for k in range(1, self.n + 1):
            for u in self.ring.units():
                if u != self.ring.one:
                    gens.append(self.diagonal_gen(k, u))
        return gens

    def elem_to_json(self, a: TriMatrix):
        return a.to_json()

    def elem_from_json(self, data) -> TriMatrix:
        return TriMatrix.from_json(self.ring, data)

    def __eq__(self, other):
        return isinstance(other, TriMatrixGroup) and self.ring == other.ring and self.n == other.n

    def __hash__(self):
        return hash(("trimatrixgroup", self.ring, self.n))

    def __repr__(self):
        return f"TriMatrixGroup({self.ring.spec!r}, n={self.n})"


# ---------------------------------------------------------------------------
# the deformed picture


@dataclass(frozen=True)
class DeformedElem:
    """Normal form (xbar, z, U): torus part, central unit, strict upper part."""

    xbar: tuple
    z: Any
    upper: tuple

    def upper_entry(self, ring: Ring, i: int, j: int):
        for key, v in self.upper:
            if key == (i, j):
                return v
        return ring.zero

    def __repr__(self):
        return f"DeformedElem(xbar={self.xbar!r}, z={self.z!r}, upper={self.upper!r})"


@dataclass
class RelationReport:
    """Outcome of one presentation relation family."""

    family: str
    checked: int
    ok: bool
    witness: tuple | None = None

    def to_json(self):
        return {
            "family": self.family,
            "checked": self.checked,
            "ok": self.ok,
            "witness": None if self.witness is None else [repr(w) for w in self.witness],
        }


class DeformedGroup:
    """T_n(R, f) for a tuple of cocycles f = (f_1, .., f_{n-1}) on R^x.

    cocycles=None means the untwisted group; this avoids requiring a cyclic
    unit group, so untwisted groups exist over every supported ring.
    """

    def __init__(self, ring: Ring, n: int, cocycles=None, verify: bool = True):
        if n < 3:
            raise InvalidParameter("deformations are defined for n >= 3")
        self.ring = ring
        self.n = n
        if cocycles is None:
            self.cocycles = None
        else:
            cocycles = tuple(cocycles)
            if len(cocycles) != n - 1:
                raise InvalidParameter(f"need {n - 1} cocycles, got {len(cocycles)}")
            units = ring.unit_group()
            for f in cocycles:
                if not isinstance(f, SymCocycle2):
                    raise InvalidParameter("cocycle entries must be SymCocycle2 instances")
                if not carriers_equal(f.domain, units) or not carriers_equal(f.codomain, units):
                    raise DomainMismatch("cocycles must map R^x pairs into R^x")
                if verify:
                    report = verify_cocycle(f, trials=32, exhaustive_limit=16)
                    if not report.ok:
                        raise InvalidParameter(
                            f"cocycle fails the {report.failure[0]} law at {report.failure[1:]}"
                        )
            self.cocycles = cocycles

    # -- cocycle plumbing ---------------------------------------------------

    @property
    def is_untwisted(self) -> bool:
        if self.cocycles is None:
            return True
        return all(isinstance(f, CarryCocycle) and not f.targets for f in self.cocycles)

    def twist(self, x1: tuple, x2: tuple):
        """prod_i f_i(x1[i], x2[i]), the central correction in torus products."""
        out = self.ring.one
        if self.cocycles is None:
            return out
        for i, f in enumerate(self.cocycles):
            out = self.ring.mul(out, f(x1[i], x2[i]))
        return out

    def big_f(self, alpha, beta):
        """F(a, b) = prod_i f_i(a, b) with both slots equal across factors."""
        alpha, beta = self.ring.ensure(alpha), self.ring.ensure(beta)
        return self.twist((alpha,) * (self.n - 1), (beta,) * (self.n - 1))

    # -- element constructors ------------------------------------------------

    @property
    def identity(self) -> DeformedElem:
        return DeformedElem((self.ring.one,) * (self.n - 1), self.ring.one, ())

    def element(self, xbar, z, upper) -> DeformedElem:
        xbar = tuple(self.ring.ensure(v) for v in xbar)
        if len(xbar) != self.n - 1:
            raise InvalidParameter(f"xbar must have {self.n - 1} coordinates")
        for v in xbar:
            if not self.ring.is_unit(v):
                raise NotAUnit(f"torus coordinate {self.ring.format_elem(v)} is not a unit")
        z = self.ring.ensure(z)
        if not self.ring.is_unit(z):
            raise NotAUnit(f"central part {self.ring.format_elem(z)} is not a unit")
        return DeformedElem(xbar, z, upper_normalise(self.ring, self.n, upper))

    def transvection(self, i: int, j: int, beta) -> DeformedElem:
        if not (1 <= i < j <= self.n):
            raise InvalidParameter(f"transvection needs 1 <= i < j <= n, got ({i}, {j})")
        return self.element((self.ring.one,) * (self.n - 1), self.ring.one, {(i, j): beta})

    def diagonal_gen(self, k: int, alpha) -> DeformedElem:
        """d_k(a).  For k = n the central part carries the cocycle correction
        prod_i f_i(a, a^-1)^-1, which keeps conjugation formulas uniform."""
        alpha = self.ring.ensure(alpha)
        if not self.ring.is_unit(alpha):
            raise NotAUnit(f"{self.ring.format_elem(alpha)} is not a unit")
        if not 1 <= k <= self.n:
            raise InvalidParameter(f"diagonal index {k} out of range")
        r = self.ring
        if k < self.n:
            xbar = tuple(alpha if m == k else r.one for m in range(1, self.n))
            return DeformedElem(xbar, r.one, ())
        alpha_inv = r.inv(alpha)
        xbar = (alpha_inv,) * (self.n - 1)
        z = r.mul(alpha, r.inv(self.big_f(alpha, alpha_inv)))
        return DeformedElem(xbar, z, ())

    def central(self, alpha) -> DeformedElem:
        alpha = self.ring.ensure(alpha)
        if not self.ring.is_unit(alpha):
            raise NotAUnit(f"{self.ring.format_elem(alpha)} is not a unit")
        return DeformedElem((self.ring.one,) * (self.n - 1), alpha, ())

    # -- group operations ----------------------------------------------------

    def op(self, g1: DeformedElem, g2: DeformedElem) -> DeformedElem:
        r = self.ring
        xbar = tuple(r.mul(a, b) for a, b in zip(g1.xbar, g2.xbar))
        z = r.mul(r.mul(g1.z, g2.z), self.twist(g1.xbar, g2.xbar))
        upper = upper_mul(r, self.n, upper_conjugate(r, self.n, g1.upper, g2.xbar), g2.upper)
        return DeformedElem(xbar, z, upper)

    def inverse(self, g: DeformedElem) -> DeformedElem:
        r = self.ring
        xbar_inv = tuple(r.inv(v) for v in g.xbar)
        z = r.mul(r.inv(g.z), r.inv(self.twist(g.xbar, xbar_inv)))
        upper = upper_conjugate(r, self.n, upper_inv(r, self.n, g.upper), xbar_inv)
        return DeformedElem(xbar_inv, z, upper)

    def commutator(self, a: DeformedElem, b: DeformedElem) -> DeformedElem:
        return self.op(self.op(self.inverse(a), self.inverse(b)), self.op(a, b))

    def power(self, g: DeformedElem, k: int) -> DeformedElem:
        if k < 0:
            return self.power(self.inverse(g), -k)
        acc = self.identity
        for _ in range(k):
            acc = self.op(acc, g)
        return acc

    def conjugate(self, g: DeformedElem, by: DeformedElem) -> DeformedElem:
        return self.op(self.op(self.inverse(by), g), by)

    # -- size and enumeration -------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.ring.is_finite

    def order(self) -> int:
        if not self.ring.is_finite:
            raise TooLarge("infinite ring")
        units = len(self.ring.units())
        return units**self.n * self.ring.size() ** (self.n * (self.n - 1) // 2)

    def elements(self) -> Iterator[DeformedElem]:
        if not self.ring.is_finite:
            raise TooLarge("infinite ring")
        if self.order() > ENUMERATION_LIMIT:
            raise TooLarge(f"group order {self.order()} exceeds {ENUMERATION_LIMIT}")
        r = self.ring
        units = list(r.units())
        ring_elems = list(r.elements())
        slots = [(i, j) for i in range(1, self.n + 1) for j in range(i + 1, self.n + 1)]
        for xbar in itertools.product(units, repeat=self.n - 1):
            for z in units:
                for fill in itertools.product(ring_elems, repeat=len(slots)):
                    upper = upper_normalise(r, self.n, list(zip(slots, fill)))
                    yield DeformedElem(xbar, z, upper)

    def sample(self, rng: random.Random) -> DeformedElem:
        r = self.ring
        xbar = tuple(r.random_unit(rng) for _ in range(self.n - 1))
        z = r.random_unit(rng)
        slots = [(i, j) for i in range(1, self.n + 1) for j in range(i + 1, self.n + 1)]
        upper = [(key, r.random_elem(rng)) for key in slots]
        return DeformedElem(xbar, z, upper_normalise(r, self.n, upper))

    def element_order(self, g: DeformedElem) -> int:
        if not self.is_finite:
            raise TooLarge("element orders are computed in finite groups only")
        acc, k = g, 1
        bound = self.order() + 1
        while acc != self.identity:
            acc = self.op(acc, g)
            k += 1
            if k > bound:
                raise InvalidParameter("element order exceeded the group order")
        return k

    def generating_set(self) -> list[DeformedElem]:
        if not self.ring.is_finite:
            raise TooLarge("generating sets are enumerated for finite rings only")
        gens = []
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                gens.append(self.transvection(i, j, self.ring.one))
        for k in range(1, self.n + 1):
            for u in self.ring.units():
                if u != self.ring.one:
                    gens.append(self.diagonal_gen(k, u))
        for u in self.ring.units():
            if u != self.ring.one:
                gens.append(self.central(u))
        return gens

    # -- serialisation ---------------------------------------------------------

    def elem_to_json(self, g: DeformedElem):
        return {
            "xbar": [self.ring.elem_to_json(v) for v in g.xbar],
            "z": self.ring.elem_to_json(g.z),
            "upper": {f"{i},{j}": self.ring.elem_to_json(v) for (i, j), v in g.upper},
        }

    def elem_from_json(self, data) -> DeformedElem:
        upper = []
        for key, v in data.get("upper", {}).items():
            i, j = (int(part) for part in key.split(","))
            upper.append(((i, j), self.ring.elem_from_json(v)))
        return self.element(
            [self.ring.elem_from_json(v) for v in data["xbar"]],
            self.ring.elem_from_json(data["z"]),
            upper,
        )

    def __repr__(self):
        kind = "untwisted" if self.is_untwisted else "twisted"
        return f"DeformedGroup({self.ring.spec!r}, n={self.n}, {kind})"


# ---------------------------------------------------------------------------
# bridges between the pictures (untwisted only)


def matrix_to_deformed(group: DeformedGroup, m: TriMatrix) -> DeformedElem:
    """diag(y) (I + U) -> (y_i y_n^-1, y_n, U); a homomorphism when untwisted."""
    if not group.is_untwisted:
        raise InvalidParameter("the matrix bridge is defined for untwisted groups")
    if m.ring != group.ring or m.n != group.n:
        raise DomainMismatch("matrix does not live over the group's ring and size")
    r = group.ring
    y = m.diagonal_part()
    yn_inv = r.inv(y[-1])
    xbar = tuple(r.mul(y[i], yn_inv) for i in range(group.n - 1))
    return DeformedElem(xbar, y[-1], m.strict_part())


def deformed_to_matrix(group: DeformedGroup, g: DeformedElem) -> TriMatrix:
    if not group.is_untwisted:
        raise InvalidParameter("the matrix bridge is defined for untwisted groups")
    r, n = group.ring, group.n
    y = [r.mul(g.z, g.xbar[i]) for i in range(n - 1)] + [g.z]
    rows = [[r.zero] * n for _ in range(n)]
    table = dict(g.upper)
    for i in range(n):
        rows[i][i] = y[i]
        for j in range(i + 1, n):
            u = table.get((i + 1, j + 1), r.zero)
            rows[i][j] = r.mul(y[i], u)
    return TriMatrix(r, rows)


# ---------------------------------------------------------------------------
# the deformed diagonal relation


def fn_identity_check(group: DeformedGroup, alpha, beta) -> tuple[bool, DeformedElem, DeformedElem]:
    """d_n(a) d_n(b) d_n(ab)^-1 against the central element F(a, b)^-1.

    Holds for every genuine cocycle tuple; returns both sides for reporting.
    """
    r = group.ring
    alpha, beta = r.ensure(alpha), r.ensure(beta)
    lhs = group.op(
        group.op(group.diagonal_gen(group.n, alpha), group.diagonal_gen(group.n, beta)),
        group.inverse(group.diagonal_gen(group.n, r.mul(alpha, beta))),
    )
    rhs = group.central(r.inv(group.big_f(alpha, beta)))
    return lhs == rhs, lhs, rhs


# ---------------------------------------------------------------------------
# presentation checking


def _scalar_pool(ring: Ring, rng: random.Random, count: int) -> list:
    if ring.is_finite and ring.size() <= 8:
        return list(ring.elements())
    pool = [ring.zero, ring.one, ring.neg(ring.one)]
    while len(pool) < count:
        pool.append(ring.random_elem(rng))
    return pool


def _unit_pool(ring: Ring, rng: random.Random, count: int) -> list:
    units = ring.units() if ring.is_finite else None
    if units is not None and len(units) <= 8:
        return list(units)
    pool = [ring.one, ring.neg(ring.one)]
    while len(pool) < count:
        pool.append(ring.random_unit(rng))
    return pool


def check_presentation(group, trials: int = 40, rng: random.Random | None = None) -> list[RelationReport]:
    """Check the five defining relation families on a triangular group.

    Works on TriMatrixGroup and DeformedGroup alike.  Conjugation relations
    use the true group inverse of d_k(a); in twisted groups d_n(a^-1) differs
    from d_n(a)^-1 by a central factor, so the substitution form would fail
    for reasons that have nothing to do with the relation itself.
    """
    rng = rng or random.Random(20260814)
    ring, n = group.ring, group.n
    scalars = _scalar_pool(ring, rng, max(3, trials // 8))
    units = _unit_pool(ring, rng, max(2, trials // 10))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    reports = []

    checked = 0
    witness = None
    for (i, j), beta, gamma in itertools.product(pairs, scalars, scalars):
        checked += 1
        lhs = group.op(group.transvection(i, j, beta), group.transvection(i, j, gamma))
        rhs = group.transvection(i, j, ring.add(beta, gamma))
        if lhs != rhs:
            witness = (i, j, beta, gamma)
            break
    reports.append(RelationReport("transvection-additivity", checked, witness is None, witness))

    checked = 0
    witness = None
    for (i, j), (k, l) in itertools.product(pairs, repeat=2):
        if j == k or l == i:
            continue
        for beta, gamma in itertools.product(scalars[:4], repeat=2):
            checked += 1
            c = group.commutator(group.transvection(i, j, beta), group.transvection(k, l, gamma))
            if c != group.identity:
                witness = (i, j, k, l, beta, gamma)
                break
        if witness:
            break
    reports.append(RelationReport("disjoint-commutation", checked, witness is None, witness))

    checked = 0
    witness = None
    for i, j, l in itertools.combinations(range(1, n + 1), 3):
        for beta, gamma in itertools.product(scalars[:4], repeat=2):
            checked += 1
            c = group.commutator(group.transvection(i, j, beta), group.transvection(j, l, gamma))
            if c != group.transvection(i, l, ring.mul(beta, gamma)):
                witness = (i, j, l, beta, gamma)
                break
        if witness:
            break
    reports.append(RelationReport("overlap-commutation", checked, witness is None, witness))

    checked = 0
    witness = None
    deformed = isinstance(group, DeformedGroup)
    for k in range(1, n + 1):
        for a1, a2 in itertools.product(units, repeat=2):
            checked += 1
            lhs = group.op(group.diagonal_gen(k, a1), group.diagonal_gen(k, a2))
            rhs = group.diagonal_gen(k, ring.mul(a1, a2))
            if deformed and group.cocycles is not None:
                # d_k(a)d_k(b) = d_k(ab) diag(f_k(a,b)); the k = n twist is
                # the product correction F(a,b)^-1 instead
                if k < n:
                    corr = group.cocycles[k - 1](a1, a2)
                else:
                    corr = ring.inv(group.big_f(a1, a2))
                rhs = group.op(rhs, group.central(corr))
            if lhs != rhs:
                witness = ("multiplicativity", k, a1, a2)
                break
        if witness:
            break
    if witness is None:
        for k, l in itertools.combinations(range(1, n + 1), 2):
            for a1, a2 in itertools.product(units[:4], repeat=2):
                checked += 1
                lhs = group.op(group.diagonal_gen(k, a1), group.diagonal_gen(l, a2))
                rhs = group.op(group.diagonal_gen(l, a2), group.diagonal_gen(k, a1))
                if lhs != rhs:
                    witness = ("commutation", k, l, a1, a2)
                    break
            if witness:
                break
    reports.append(RelationReport("diagonal-subgroup", checked, witness is None, witness))

    checked = 0
    witness = None
    for k in range(1, n + 1):
        for alpha in units:
            d = group.diagonal_gen(k, alpha)
            d_inv = group.inverse(d)
            for (i, j), beta in itertools.product(pairs, scalars[:4]):
                checked += 1
                lhs = group.op(group.op(d_inv, group.transvection(i, j, beta)), d)
                scaled = beta
                if i == k:
                    scaled = ring.mul(ring.inv(alpha), scaled)
                if j == k:
                    scaled = ring.mul(scaled, alpha)
                if lhs != group.transvection(i, j, scaled):
                    witness = (k, alpha, i, j, beta)
                    break
            if witness:
                break
        if witness:
            break
    reports.append(RelationReport("diagonal-conjugation", checked, witness is None, witness))
    return reports


# ---------------------------------------------------------------------------
# splitting twisted groups


class SplitIso:
    """Isomorphism T_n(R, f) -> T_n(R) from coboundary witnesses.

    forward sends (xbar, z, U) to diag(z', z' xbar, ..) (I + U) with
    z' = z * prod_i psi_i(xbar_i)^-1; the witnesses make this multiplicative.
    """

    def __init__(self, group: DeformedGroup, witnesses: tuple):
        self.group = group
        self.witnesses = witnesses
        self.target = TriMatrixGroup(group.ring, group.n)
        self._untwisted = DeformedGroup(group.ring, group.n)

    def straighten(self, g: DeformedElem) -> DeformedElem:
        r = self.group.ring
        z = g.z
        for i, psi in enumerate(self.witnesses):
            z = r.mul(z, r.inv(psi(g.xbar[i])))
        return DeformedElem(g.xbar, z, g.upper)

    def forward(self, g: DeformedElem) -> TriMatrix:
        return deformed_to_matrix(self._untwisted, self.straighten(g))

    def backward(self, m: TriMatrix) -> DeformedElem:
        e = matrix_to_deformed(self._untwisted, m)
        r = self.group.ring
        z = e.z
        for i, psi in enumerate(self.witnesses):
            z = r.mul(z, psi(e.xbar[i]))
        return DeformedElem(e.xbar, z, e.upper)


def split_isomorphism(group: DeformedGroup) -> SplitIso | None:
    """Explicit isomorphism onto the matrix group, or None if some factor
    cocycle is not a coboundary (no such torus-compatible splitting exists).
    """
    if group.cocycles is None:
        return SplitIso(group, tuple())
    witnesses = []
    for f in group.cocycles:
        if hasattr(f, "psi"):
            witnesses.append(f.psi)
            continue
        psi = is_coboundary(f)
        if psi is None:
            return None
        witnesses.append(psi)
    return SplitIso(group, tuple(witnesses))


def enumerate_group(group) -> list:
    """All elements of a finite group; TooLarge above the shared cap."""
    return list(group.elements())
