"""Symmetric 2-cocycles on abelian groups and the extensions they build.

A cocycle f: B x B -> A is represented by one of several backends (carry
tables on cyclic factors, explicit function tables, coboundaries of a map
psi, pointwise products).  The central decision procedure, is_coboundary,
works per cyclic factor of B: the A-part of (g, 1)^m in the extension E(f)
is the obstruction attached to a torsion factor of order m, and f splits iff
every obstruction is an m-th power in A.  Free factors never obstruct.  The
witness returned is a genuine section-based splitting map, so the coboundary
identity holds exactly, not just up to cohomology.

Carriers for B and A are duck-typed: FgAbelian instances and unit groups
both work, including the lazily factored Q^x.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable

from .abgroups import AbHom, FgAbelian
from .errors import DomainMismatch, InvalidParameter, NotBijective, TooLarge, UnsupportedCodomain
from .rings import UnitGroupStruct, parse_ring


# ---------------------------------------------------------------------------
# extension arithmetic helpers (elements of E(f) are (b, a) pairs)


def ext_identity(f: "SymCocycle2"):
    return (f.domain.identity, f.codomain.identity)


def ext_mul(f: "SymCocycle2", x, y):
    b = f.domain.op(x[0], y[0])
    a = f.codomain.op(f.codomain.op(x[1], y[1]), f(x[0], y[0]))
    return (b, a)


def ext_inv(f: "SymCocycle2", x):
    b_inv = f.domain.inverse(x[0])
    a = f.codomain.inverse(f.codomain.op(x[1], f(x[0], b_inv)))
    return (b_inv, a)


def ext_pow(f: "SymCocycle2", x, k: int):
    if k < 0:
        x, k = ext_inv(f, x), -k
    acc = ext_identity(f)
    for _ in range(k):
        acc = ext_mul(f, acc, x)
    return acc


# ---------------------------------------------------------------------------
# psi maps (arbitrary normalised functions B -> A, not homomorphisms)


class PsiMap:
    """Function psi: B -> A with psi(1) = 1; used as coboundary data."""

    domain: Any
    codomain: Any

    def __call__(self, b):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


class DictPsi(PsiMap):
    def __init__(self, domain, codomain, table: dict):
        self.domain = domain
        self.codomain = codomain
        self.table = dict(table)
        if self.table.get(domain.identity, codomain.identity) != codomain.identity:
            raise InvalidParameter("psi must send the identity to the identity")
        self.table[domain.identity] = codomain.identity

    def __call__(self, b):
        return self.table[b]

    def to_json(self):
        return {
            "type": "table",
            "entries": [
                [carrier_elem_to_json(self.domain, b), carrier_elem_to_json(self.codomain, a)]
                for b, a in self.table.items()
            ],
        }


class MonomialPsi(PsiMap):
    """psi(b) = prod base^e over the canonical exponents of b.

    Bases are keyed per factor; unspecified factors contribute nothing.
    """

    def __init__(self, domain, codomain, torsion_bases: dict | None = None, free_bases: dict | None = None):
        self.domain = domain
        self.codomain = codomain
        self.torsion_bases = dict(torsion_bases or {})
        self.free_bases = dict(free_bases or {})

    def __call__(self, b):
        torsion, free = self.domain.decompose(b)
        out = self.codomain.identity
        for idx, base in self.torsion_bases.items():
            e = torsion[idx] if idx < len(torsion) else 0
            out = self.codomain.op(out, self.codomain.power(base, e))
        for key, e in free.items():
            if key in self.free_bases:
                out = self.codomain.op(out, self.codomain.power(self.free_bases[key], e))
        return out

    def to_json(self):
        return {
            "type": "monomial",
            "torsion_bases": {
                str(idx): carrier_elem_to_json(self.codomain, a) for idx, a in self.torsion_bases.items()
            },
            "free_bases": {
                str(key): carrier_elem_to_json(self.codomain, a) for key, a in self.free_bases.items()
            },
        }


class SplitSectionPsi(PsiMap):
    """Witness produced by is_coboundary.

    For each torsion factor <g_i> of order m_i, roots[i] is a y_i with
    y_i^{m_i} equal to the inverse of the factor obstruction, so
    (g_i, y_i) has order m_i in E(f).  The section sending b with canonical
    exponents (t, e) to prod (g_i, y_i)^{t_i} * prod (h_j, 1)^{e_j} is then a
    homomorphism B -> E(f), and psi(b) is its A-part.
    """

    def __init__(self, cocycle: "SymCocycle2", roots: dict[int, Any]):
        self.cocycle = cocycle
        self.domain = cocycle.domain
        self.codomain = cocycle.codomain
        self.roots = dict(roots)
        self._cache: dict[Any, Any] = {}

    def __call__(self, b):
        if b in self._cache:
            return self._cache[b]
        torsion, free = self.domain.decompose(b)
        acc = ext_identity(self.cocycle)
        for idx in range(len(self.domain.torsion_factors)):
            e = torsion[idx] if idx < len(torsion) else 0
            if e:
                gen = (self.domain.torsion_factor_generator(idx), self.roots[idx])
                acc = ext_mul(self.cocycle, acc, ext_pow(self.cocycle, gen, e))
        for fkey, e in free.items():
            gen = (self.domain.free_generator(fkey), self.codomain.identity)
            acc = ext_mul(self.cocycle, acc, ext_pow(self.cocycle, gen, e))
        assert acc[0] == b, "section failed to reconstruct its argument"
        self._cache[b] = acc[1]
        return acc[1]

    def to_json(self):
        return {
            "type": "section",
            "roots": {str(idx): carrier_elem_to_json(self.codomain, a) for idx, a in self.roots.items()},
        }


class InvertedPsi(PsiMap):
    def __init__(self, psi: PsiMap):
        self.psi = psi
        self.domain = psi.domain
        self.codomain = psi.codomain

    def __call__(self, b):
        return self.codomain.inverse(self.psi(b))

    def to_json(self):
        return {"type": "inverted", "psi": self.psi.to_json()}


class ComposedPsi(PsiMap):
    """after o psi o before, for transporting coboundary data along isos."""

    def __init__(self, domain, codomain, after: Callable, psi: PsiMap, before: Callable):
        self.domain = domain
        self.codomain = codomain
        self.after = after
        self.psi = psi
        self.before = before

    def __call__(self, b):
        return self.after(self.psi(self.before(b)))

    def to_json(self):
        return {"type": "composed", "psi": self.psi.to_json()}


# ---------------------------------------------------------------------------
# cocycle backends


class SymCocycle2:
    """Symmetric normalised 2-cocycle B x B -> A."""

    domain: Any
    codomain: Any
    backend: str

    def __call__(self, x, y):
        raise NotImplementedError

    def to_json(self):
        return {
            "domain": carrier_to_json(self.domain),
            "codomain": carrier_to_json(self.codomain),
            "backend": self.backend_json(),
        }

    def backend_json(self):
        raise NotImplementedError


class CarryCocycle(SymCocycle2):
    """Per-factor carry cocycle.

    On a torsion factor of order m with pinned generator g and target c,
    f(g^i, g^j) = c^floor((i + j) / m) with i, j canonical in [0, m).  Free
    factors never carry.  Targets are keyed by torsion factor index; the
    empty target map is the trivial cocycle.
    """

    backend = "carry"

    def __init__(self, domain, codomain, targets: dict[int, Any] | None = None):
        self.domain = domain
        self.codomain = codomain
        self.targets = {}
        factors = domain.torsion_factors
        for idx, c in (targets or {}).items():
            if not 0 <= idx < len(factors):
                raise InvalidParameter(f"no torsion factor {idx} to carry into")
            if c != codomain.identity:
                self.targets[idx] = c

    def __call__(self, x, y):
        if not self.targets:
            return self.codomain.identity
        tx, _ = self.domain.decompose(x)
        ty, _ = self.domain.decompose(y)
        out = self.codomain.identity
        for idx, c in self.targets.items():
            m = self.domain.torsion_factors[idx]
            carry = (tx[idx] + ty[idx]) // m
            if carry:
                out = self.codomain.op(out, self.codomain.power(c, carry))
        return out

    def backend_json(self):
        return {
            "type": "carry",
            "targets": {str(i): carrier_elem_to_json(self.codomain, c) for i, c in self.targets.items()},
        }


def trivial_cocycle(domain, codomain) -> CarryCocycle:
    return CarryCocycle(domain, codomain, {})


class FunctionTable(SymCocycle2):
    """Explicit table over a finite domain of order at most 256."""

    backend = "table"

    def __init__(self, domain, codomain, table: dict):
        if not domain.is_finite or domain.order() > 256:
            raise TooLarge("function tables require |B| <= 256")
        self.domain = domain
        self.codomain = codomain
        self.table = dict(table)

    @classmethod
    def from_callable(cls, domain, codomain, fn) -> "FunctionTable":
        elems = list(domain.elements())
        return cls(domain, codomain, {(x, y): fn(x, y) for x in elems for y in elems})

    def __call__(self, x, y):
        return self.table[(x, y)]

    def backend_json(self):
        return {
            "type": "table",
            "entries": [
                [
                    carrier_elem_to_json(self.domain, x),
                    carrier_elem_to_json(self.domain, y),
                    carrier_elem_to_json(self.codomain, a),
                ]
                for (x, y), a in self.table.items()
            ],
        }


class CoboundaryOf(SymCocycle2):
    """f(x, y) = psi(xy) * psi(x)^-1 * psi(y)^-1 for a normalised psi."""

    backend = "coboundary"

    def __init__(self, domain, codomain, psi: PsiMap):
        self.domain = domain
        self.codomain = codomain
        self.psi = psi
        if psi(domain.identity) != codomain.identity:
            raise InvalidParameter("psi must be normalised: psi(1) = 1")

    def __call__(self, x, y):
        a = self.psi(self.domain.op(x, y))
        a = self.codomain.op(a, self.codomain.inverse(self.psi(x)))
        return self.codomain.op(a, self.codomain.inverse(self.psi(y)))

    def backend_json(self):
        return {"type": "coboundary", "psi": self.psi.to_json()}


class ProductCocycle(SymCocycle2):
    backend = "product"

    def __init__(self, parts):
        parts = tuple(parts)
        if not parts:
            raise InvalidParameter("product of no cocycles")
        self.parts = parts
        self.domain = parts[0].domain
        self.codomain = parts[0].codomain
        for p in parts[1:]:
            if not carriers_equal(p.domain, self.domain) or not carriers_equal(p.codomain, self.codomain):
                raise DomainMismatch("product factors live on different groups")

    def __call__(self, x, y):
        out = self.codomain.identity
        for p in self.parts:
            out = self.codomain.op(out, p(x, y))
        return out

    def backend_json(self):
        return {"type": "product", "parts": [p.backend_json() for p in self.parts]}


class RestrictionCocycle(SymCocycle2):
    """Restriction of a cocycle to an embedded subgroup of its domain."""

    backend = "restriction"

    def __init__(self, base: SymCocycle2, domain, embed: Callable):
        self.base = base
        self.domain = domain
        self.codomain = base.codomain
        self.embed = embed

    def __call__(self, x, y):
        return self.base(self.embed(x), self.embed(y))

    def backend_json(self):
        return {"type": "restriction", "base": self.base.backend_json()}


class TransportedCocycle(SymCocycle2):
    """Image of a cocycle under isomorphisms of its groups.

    Convention (fixed here once and for all): given g on (B, A) and isos
    psi: A -> A' and eta: B -> B', the transported cocycle on (B', A') is
    g'(x, y) = psi(g(eta^-1(x), eta^-1(y))).
    """

    backend = "transported"

    def __init__(self, base: SymCocycle2, domain, codomain, psi_apply: Callable, eta_inv_apply: Callable):
        self.base = base
        self.domain = domain
        self.codomain = codomain
        self.psi_apply = psi_apply
        self.eta_inv_apply = eta_inv_apply

    def __call__(self, x, y):
        return self.psi_apply(self.base(self.eta_inv_apply(x), self.eta_inv_apply(y)))

    def backend_json(self):
        raise InvalidParameter(
            "transported cocycles over infinite groups have no table form; "
            "materialise over a finite domain first"
        )


# ---------------------------------------------------------------------------
# carrier helpers


def carriers_equal(a, b) -> bool:
    if a is b:
        return True
    if isinstance(a, FgAbelian) and isinstance(b, FgAbelian):
        return a == b
    if isinstance(a, UnitGroupStruct) and isinstance(b, UnitGroupStruct):
        return a.ring == b.ring
    return False


def carrier_to_json(carrier):
    if isinstance(carrier, FgAbelian):
        return {
            "type": "fg",
            "invariant_factors": list(carrier.invariant_factors),
            "free_rank": carrier.free_rank,
        }
    if isinstance(carrier, UnitGroupStruct):
        return {"type": "units", "ring": carrier.ring.spec}
    raise InvalidParameter(f"unsupported carrier {carrier!r}")


def carrier_from_json(data):
    if data["type"] == "fg":
        return FgAbelian(tuple(data["invariant_factors"]), data.get("free_rank", 0))
    if data["type"] == "units":
        return parse_ring(data["ring"]).unit_group()
    raise InvalidParameter(f"unsupported carrier type {data['type']!r}")


def carrier_elem_to_json(carrier, x):
    if isinstance(carrier, FgAbelian):
        return list(x)
    if isinstance(carrier, UnitGroupStruct):
        return carrier.ring.elem_to_json(x)
    raise InvalidParameter(f"unsupported carrier {carrier!r}")


def carrier_elem_from_json(carrier, data):
    if isinstance(carrier, FgAbelian):
        return carrier.reduce(data)
    if isinstance(carrier, UnitGroupStruct):
        return carrier.ring.elem_from_json(data)
    raise InvalidParameter(f"unsupported carrier {carrier!r}")


def cocycle_from_json(data) -> SymCocycle2:
    domain = carrier_from_json(data["domain"])
    codomain = carrier_from_json(data["codomain"])
    return _backend_from_json(domain, codomain, data["backend"])


def _backend_from_json(domain, codomain, backend) -> SymCocycle2:
    kind = backend["type"]
    if kind == "carry":
        targets = {
            int(i): carrier_elem_from_json(codomain, c) for i, c in backend.get("targets", {}).items()
        }
        return CarryCocycle(domain, codomain, targets)
    if kind == "table":
        table = {
            (carrier_elem_from_json(domain, x), carrier_elem_from_json(domain, y)): carrier_elem_from_json(codomain, a)
            for x, y, a in backend["entries"]
        }
        return FunctionTable(domain, codomain, table)
    if kind == "coboundary":
        return CoboundaryOf(domain, codomain, _psi_from_json(domain, codomain, backend["psi"]))
    if kind == "product":
        return ProductCocycle([_backend_from_json(domain, codomain, b) for b in backend["parts"]])
    raise InvalidParameter(f"unsupported backend type {kind!r}")


def _psi_from_json(domain, codomain, data) -> PsiMap:
    if data["type"] == "monomial":
        return MonomialPsi(
            domain,
            codomain,
            {int(i): carrier_elem_from_json(codomain, a) for i, a in data.get("torsion_bases", {}).items()},
            {int(k): carrier_elem_from_json(codomain, a) for k, a in data.get("free_bases", {}).items()},
        )
    if data["type"] == "table":
        return DictPsi(
            domain,
            codomain,
            {
                carrier_elem_from_json(domain, b): carrier_elem_from_json(codomain, a)
                for b, a in data["entries"]
            },
        )
    raise InvalidParameter(f"unsupported psi type {data['type']!r}")


# ---------------------------------------------------------------------------
# verification


@dataclass
class CocycleReport:
    ok: bool
    checked: int
    exhaustive: bool
    failure: tuple | None = None  # (law, witness elements...)

    def to_json(self):
        return {
            "ok": self.ok,
            "checked": self.checked,
            "exhaustive": self.exhaustive,
            "failure": None if self.failure is None else [repr(w) for w in self.failure],
        }


def verify_cocycle(f: SymCocycle2, trials: int = 200, rng=None, exhaustive_limit: int = 64) -> CocycleReport:
    """Check normalisation, symmetry and the cocycle identity.

    Exhaustive when the domain is finite with at most exhaustive_limit
    elements, otherwise sampled with the provided rng.
    """
    b_grp, a_grp = f.domain, f.codomain
    checked = 0

    def norm_ok(x):
        return f(b_grp.identity, x) == a_grp.identity and f(x, b_grp.identity) == a_grp.identity

    def sym_ok(x, y):
        return f(x, y) == f(y, x)

    def cocycle_ok(x, y, z):
        lhs = a_grp.op(f(b_grp.op(x, y), z), f(x, y))
        rhs = a_grp.op(f(x, b_grp.op(y, z)), f(y, z))
        return lhs == rhs

    if b_grp.is_finite and b_grp.order() <= exhaustive_limit:
        elems = list(b_grp.elements())
        for x in elems:
            checked += 1
            if not norm_ok(x):
                return CocycleReport(False, checked, True, ("normalisation", x))
        for x, y in itertools.product(elems, repeat=2):
            checked += 1
            if not sym_ok(x, y):
                return CocycleReport(False, checked, True, ("symmetry", x, y))
        for x, y, z in itertools.product(elems, repeat=3):
            checked += 1
            if not cocycle_ok(x, y, z):
                return CocycleReport(False, checked, True, ("cocycle", x, y, z))
        return CocycleReport(True, checked, True)

    import random

    rng = rng or random.Random(0)
    for _ in range(trials):
        x, y, z = b_grp.sample(rng), b_grp.sample(rng), b_grp.sample(rng)
        checked += 1
        if not norm_ok(x):
            return CocycleReport(False, checked, False, ("normalisation", x))
        if not sym_ok(x, y):
            return CocycleReport(False, checked, False, ("symmetry", x, y))
        if not cocycle_ok(x, y, z):
            return CocycleReport(False, checked, False, ("cocycle", x, y, z))
    return CocycleReport(True, checked, False)


# ---------------------------------------------------------------------------
# the coboundary decision


def factor_obstruction(f: SymCocycle2, idx: int):
    """A-part of (g, 1)^m in E(f) for the idx-th torsion factor <g> of order m."""
    b_grp, a_grp = f.domain, f.codomain
    m = b_grp.torsion_factors[idx]
    g = b_grp.torsion_factor_generator(idx)
    c = a_grp.identity
    x = g
    for _ in range(m - 1):
        c = a_grp.op(c, f(x, g))
        x = b_grp.op(x, g)
    return c


def is_coboundary(f: SymCocycle2) -> SplitSectionPsi | None:
    """Splitting map psi with f(x,y) = psi(xy) psi(x)^-1 psi(y)^-1, or None.

    Decides per torsion factor: the factor obstruction must be an m-th power
    in A (Ext(B, A) is the product of the per-factor classes A / A^m, and
    restriction to the factors is faithful).  Free factors always split.
    """
    a_grp = f.codomain
    if not hasattr(a_grp, "nth_root"):
        raise UnsupportedCodomain(f"{a_grp!r} does not support root extraction")
    roots: dict[int, Any] = {}
    for idx in range(len(f.domain.torsion_factors)):
        c = factor_obstruction(f, idx)
        m = f.domain.torsion_factors[idx]
        y = a_grp.nth_root(a_grp.inverse(c), m)
        if y is None:
            return None
        roots[idx] = y
    return SplitSectionPsi(f, roots)


def coboundary_defect(f: SymCocycle2, psi: PsiMap, x, y):
    """f(x,y) * (delta psi)(x,y)^-1; identity everywhere iff psi witnesses f."""
    a_grp = f.codomain
    delta = a_grp.op(
        psi(f.domain.op(x, y)),
        a_grp.inverse(a_grp.op(psi(x), psi(y))),
    )
    return a_grp.op(f(x, y), a_grp.inverse(delta))


def torsion_restriction(f: SymCocycle2) -> RestrictionCocycle:
    """f restricted to the torsion subgroup of its domain."""
    b_grp = f.domain
    t_grp = FgAbelian(b_grp.torsion_factors, 0)

    def embed(x):
        return b_grp.compose(x, {})

    return RestrictionCocycle(f, t_grp, embed)


def is_cot(f: SymCocycle2) -> bool:
    """Whether f is a coboundary on the torsion of its domain (CoT)."""
    if not f.domain.torsion_factors:
        return True
    return is_coboundary(torsion_restriction(f)) is not None


# ---------------------------------------------------------------------------
# algebra on cocycles


def cocycle_product(f: SymCocycle2, g: SymCocycle2) -> SymCocycle2:
    if not carriers_equal(f.domain, g.domain) or not carriers_equal(f.codomain, g.codomain):
        raise DomainMismatch("cocycles live on different groups")
    if isinstance(f, CarryCocycle) and isinstance(g, CarryCocycle):
        targets = dict(f.targets)
        for idx, c in g.targets.items():
            targets[idx] = f.codomain.op(targets[idx], c) if idx in targets else c
        return CarryCocycle(f.domain, f.codomain, targets)
    return ProductCocycle([f, g])


def cocycle_inverse(f: SymCocycle2) -> SymCocycle2:
    a_grp = f.codomain
    if isinstance(f, CarryCocycle):
        return CarryCocycle(f.domain, a_grp, {i: a_grp.inverse(c) for i, c in f.targets.items()})
    if isinstance(f, FunctionTable):
        return FunctionTable(f.domain, a_grp, {k: a_grp.inverse(v) for k, v in f.table.items()})
    if isinstance(f, CoboundaryOf):
        return CoboundaryOf(f.domain, a_grp, InvertedPsi(f.psi))
    if isinstance(f, ProductCocycle):
        return ProductCocycle([cocycle_inverse(p) for p in f.parts])
    raise InvalidParameter(f"cannot invert backend {f.backend!r} structurally")


def transport_cocycle(g: SymCocycle2, psi: AbHom, eta: AbHom) -> SymCocycle2:
    """Transport g along isos psi: A -> A' and eta: B -> B'.

    The result evaluates as g'(x, y) = psi(g(eta^-1(x), eta^-1(y))).
    Coboundaries stay coboundaries with a composed witness; anything else is
    materialised as a table when B' is small enough, or wrapped.
    """
    if not isinstance(g.domain, FgAbelian) or not isinstance(g.codomain, FgAbelian):
        raise InvalidParameter("transport is defined for FgAbelian carriers")
    if eta.domain != g.domain or psi.domain != g.codomain:
        raise DomainMismatch("isomorphisms do not match the cocycle's groups")
    if not psi.is_bijective() or not eta.is_bijective():
        raise NotBijective("transport requires isomorphisms on both sides")
    eta_inv = eta.inverse()
    new_domain, new_codomain = eta.codomain, psi.codomain
    if isinstance(g, CoboundaryOf):
        composed = ComposedPsi(new_domain, new_codomain, psi.apply, g.psi, eta_inv.apply)
        return CoboundaryOf(new_domain, new_codomain, composed)
    if isinstance(g, ProductCocycle):
        return ProductCocycle([transport_cocycle(p, psi, eta) for p in g.parts])
    transported = TransportedCocycle(g, new_domain, new_codomain, psi.apply, eta_inv.apply)
    if new_domain.is_finite and new_domain.order() <= 256:
        return FunctionTable.from_callable(new_domain, new_codomain, transported)
    return transported


# ---------------------------------------------------------------------------
# the extension group E(f)


class ExtensionGroup:
    """E(f): pairs (b, a) with (b1,a1)(b2,a2) = (b1 b2, a1 a2 f(b1,b2)).

    Abelian exactly because f is symmetric.
    """

    def __init__(self, cocycle: SymCocycle2):
        self.cocycle = cocycle
        self.base = cocycle.domain
        self.fiber = cocycle.codomain

    @property
    def identity(self):
        return ext_identity(self.cocycle)

    def op(self, x, y):
        return ext_mul(self.cocycle, x, y)

    def inverse(self, x):
        return ext_inv(self.cocycle, x)

    def power(self, x, k: int):
        return ext_pow(self.cocycle, x, k)

    @property
    def is_finite(self) -> bool:
        return self.base.is_finite and self.fiber.is_finite

    def order(self) -> int:
        return self.base.order() * self.fiber.order()

    def elements(self):
        for b in self.base.elements():
            for a in self.fiber.elements():
                yield (b, a)

    def element_order(self, x) -> int:
        acc, k = x, 1
        while acc != self.identity:
            acc = self.op(acc, x)
            k += 1
            if k > 4 * self.order() + 4:
                raise InvalidParameter("element order runaway; cocycle is not a cocycle")
        return k


def build_extension(f: SymCocycle2, verify_trials: int = 64) -> ExtensionGroup:
    report = verify_cocycle(f, trials=verify_trials, exhaustive_limit=16)
    if not report.ok:
        raise InvalidParameter(f"not a symmetric cocycle: failed {report.failure[0]}")
    return ExtensionGroup(f)
