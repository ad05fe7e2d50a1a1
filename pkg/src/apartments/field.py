"""Finite fields GF(p^e) with table-driven arithmetic.

Elements are plain ints in ``range(q)``: the residue polynomial
``c_0 + c_1 x + ... + c_{e-1} x^{e-1}`` is encoded as ``sum(c_i * p**i)``.
For ``e == 1`` this is the usual residue mod ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

MAX_ORDER = 64

# Conway polynomials, little-endian coefficients, for every p^e <= 64 with e > 1.
CONWAY_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}


class FieldError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


def _poly_rem(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m (little-endian, over F_p)."""
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return [x % p for x in a[:dm]] + [0] * max(0, dm - len(a))


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Exhaustive check: no monic factor of degree 1..deg//2 over F_p."""
    e = len(modulus) - 1
    if e < 1 or modulus[-1] % p != 1:
        return False
    if e == 1:
        return True
    for d in range(1, e // 2 + 1):
        for low in product(range(p), repeat=d):
            if not any(_poly_rem(list(modulus), list(low) + [1], p)):
                return False
    return True


class FieldSpec:
    """The field F_q, q = p^e <= 64, with precomputed operation tables.

    Instances are immutable and hashable; two specs are equal iff they share
    ``(p, e, modulus)``.
    """

    __slots__ = (
        "p", "e", "q", "modulus", "add_table", "sub_table", "mul_table",
        "neg_table", "inv_table", "exp_table", "log_table", "frob_table",
        "generator", "_key", "_hash",
    )

    def __init__(self, p: int, e: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if e < 1:
            raise FieldError("extension degree must be >= 1")
        q = p**e
        if q > MAX_ORDER:
            raise FieldError(f"field order {q} exceeds the bound q <= {MAX_ORDER}")
        if e == 1:
            modulus = (0, 1)
        else:
            if modulus is None:
                if (p, e) not in CONWAY_MODULI:
                    raise FieldError(f"no default modulus for GF({p}^{e})")
                modulus = CONWAY_MODULI[(p, e)]
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != e + 1:
                raise FieldError(f"modulus must have degree {e}")
            if not is_irreducible(modulus, p):
                raise FieldError(f"modulus {list(modulus)} is not irreducible over F_{p}")
        self.p, self.e, self.q, self.modulus = p, e, q, modulus
        self._build_tables()
        self._key = (p, e, modulus)
        self._hash = hash(self._key)

    def _build_tables(self) -> None:
        p, e, q = self.p, self.e, self.q
        if e == 1:
            self.add_table = tuple(tuple((a + b) % p for b in range(q)) for a in range(q))
            self.mul_table = tuple(tuple((a * b) % p for b in range(q)) for a in range(q))
            self.neg_table = tuple((-a) % p for a in range(q))
        else:
            digits = [self._digits(a) for a in range(q)]
            self.add_table = tuple(
                tuple(self._encode([(x + y) % p for x, y in zip(digits[a], digits[b])])
                      for b in range(q))
                for a in range(q)
            )
            self.neg_table = tuple(self._encode([(-x) % p for x in digits[a]]) for a in range(q))
            mul = [[0] * q for _ in range(q)]
            for a in range(q):
                for b in range(a, q):
                    prod = [0] * (2 * e - 1)
                    for i, x in enumerate(digits[a]):
                        if x:
                            for j, y in enumerate(digits[b]):
                                prod[i + j] += x * y
                    c = self._encode(_poly_rem(prod, list(self.modulus), p))
                    mul[a][b] = mul[b][a] = c
            self.mul_table = tuple(tuple(row) for row in mul)
        self.sub_table = tuple(
            tuple(self.add_table[a][self.neg_table[b]] for b in range(q)) for a in range(q)
        )
        # log/antilog tables from the smallest primitive element
        for g in range(2 if q > 2 else 1, q):
            exp = [1]
            while len(exp) < q:
                nxt = self.mul_table[exp[-1]][g]
                if nxt == 1:
                    break
                exp.append(nxt)
            if len(exp) == q - 1:
                break
        else:  # pragma: no cover - every finite field has a primitive element
            raise FieldError("no primitive element found")
        self.generator = g
        self.exp_table = tuple(exp)
        log = [-1] * q
        for i, x in enumerate(exp):
            log[x] = i
        self.log_table = tuple(log)
        inv = [0] * q
        for a in range(1, q):
            inv[a] = exp[(q - 1 - log[a]) % (q - 1)]
        self.inv_table = tuple(inv)
        frob = []
        for t in range(e):
            k = p**t
            frob.append(tuple(self.pow(a, k) for a in range(q)))
        self.frob_table = tuple(frob)

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _encode(self, digits) -> int:
        v = 0
        for c in reversed(list(digits)):
            v = v * self.p + c
        return v

    # arithmetic

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.sub_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul_table[a][self.inv(b)]

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("zero has no inverse")
            return 1 if k == 0 else 0
        return self.exp_table[(self.log_table[a] * k) % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    # automorphisms

    def frobenius(self, power: int = 1) -> "FieldAut":
        return FieldAut(self, power % self.e)

    def identity_aut(self) -> "FieldAut":
        return FieldAut(self, 0)

    def automorphisms(self) -> list["FieldAut"]:
        return enumerate_automorphisms(self)

    # identity / serialization

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldSpec) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e})"

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, d: dict) -> "FieldSpec":
        e = int(d.get("e", 1))
        mod = d.get("modulus")
        return get_field(int(d["p"]), e, tuple(mod) if mod is not None and e > 1 else None)


@lru_cache(maxsize=None)
def get_field(p: int, e: int = 1, modulus: tuple[int, ...] | None = None) -> FieldSpec:
    return FieldSpec(p, e, modulus)


def field_of_order(q: int) -> FieldSpec:
    """The default field with q elements."""
    for p in range(2, q + 1):
        if is_prime(p):
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r == 1 and e >= 1:
                return get_field(p, e)
            if e:
                break
    raise FieldError(f"{q} is not a prime power")


@dataclass(frozen=True)
class FieldAut:
    """The Frobenius power x -> x^(p^power)."""

    field: FieldSpec
    power: int

    def __call__(self, a: int) -> int:
        return self.field.frob_table[self.power][a]

    def table(self) -> tuple[int, ...]:
        return self.field.frob_table[self.power]

    def compose(self, other: "FieldAut") -> "FieldAut":
        """self after other."""
        return FieldAut(self.field, (self.power + other.power) % self.field.e)

    def inverse(self) -> "FieldAut":
        return FieldAut(self.field, (-self.power) % self.field.e)

    def is_identity(self) -> bool:
        return self.power == 0

    def is_automorphism(self) -> bool:
        """Exhaustively check additivity, multiplicativity and bijectivity."""
        F, t = self.field, self.table()
        if len(set(t)) != F.q:
            return False
        for a in range(F.q):
            for b in range(F.q):
                if t[F.add_table[a][b]] != F.add_table[t[a]][t[b]]:
                    return False
                if t[F.mul_table[a][b]] != F.mul_table[t[a]][t[b]]:
                    return False
        return True


def enumerate_automorphisms(F: FieldSpec) -> list[FieldAut]:
    auts = [FieldAut(F, t) for t in range(F.e)]
    for s in auts:
        if not s.is_automorphism():  # pragma: no cover - guards table construction
            raise FieldError(f"Frobenius power {s.power} failed the automorphism check")
    return auts


def aut_from_table(F: FieldSpec, table) -> FieldAut | None:
    """The Frobenius power whose value table equals ``table``, if any."""
    table = tuple(table)
    for t in range(F.e):
        if F.frob_table[t] == table:
            return FieldAut(F, t)
    return None
