"""Laurent polynomials with exact integer coefficients.

Two flavours are used throughout the package: :class:`LaurentPoly` in a
single variable (Jones polynomials) and :class:`TwoVarPoly` in two variables
(Poincare polynomials in ``(u, q)`` and HOMFLYPT polynomials in ``(a, z)``).
Both store only nonzero coefficients, so equality is structural.
"""

from __future__ import annotations

from typing import Iterable, Mapping


class LaurentPoly:
    """Laurent polynomial in one variable, ``{exponent: coefficient}``."""

    __slots__ = ("_c",)
    var = "q"

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        self._c = {int(e): int(c) for e, c in (coeffs or {}).items() if c}

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls({exp: coeff})

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "LaurentPoly":
        out: dict[int, int] = {}
        for e, c in pairs:
            out[e] = out.get(e, 0) + c
        return cls(out)

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        return isinstance(other, LaurentPoly) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        out = dict(self._c)
        for e, c in other._c.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({e: c * other for e, c in self._c.items()})
        out: dict[int, int] = {}
        for e1, c1 in self._c.items():
            for e2, c2 in other._c.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are only defined for monomials; use shift()")
        result = LaurentPoly({0: 1})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``var**k``."""
        return LaurentPoly({e + k: c for e, c in self._c.items()})

    def substitute_inverse(self) -> "LaurentPoly":
        """``p(q) -> p(q^-1)``."""
        return LaurentPoly({-e: c for e, c in self._c.items()})

    def __call__(self, value):
        return sum(c * value**e for e, c in self._c.items())

    def to_pairs(self) -> list[list[int]]:
        return [[e, c] for e, c in self.items()]

    def format(self, var: str | None = None) -> str:
        v = var or self.var
        if not self._c:
            return "0"
        return format_terms((((e,), c) for e, c in self.items()), (v,))

    __str__ = format

    def __repr__(self):
        return f"LaurentPoly({self.format()})"


class TwoVarPoly:
    """Laurent polynomial in two variables, ``{(e1, e2): coefficient}``."""

    __slots__ = ("_c", "names")

    def __init__(self, coeffs: Mapping[tuple[int, int], int] | None = None,
                 names: tuple[str, str] = ("a", "z")):
        self._c = {(int(a), int(b)): int(c) for (a, b), c in (coeffs or {}).items() if c}
        self.names = names

    @property
    def coeffs(self) -> dict[tuple[int, int], int]:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def _like(self, coeffs):
        return TwoVarPoly(coeffs, self.names)

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, int):
            other = TwoVarPoly({(0, 0): other})
        return isinstance(other, TwoVarPoly) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other):
        if isinstance(other, int):
            other = TwoVarPoly({(0, 0): other})
        out = dict(self._c)
        for e, c in other._c.items():
            out[e] = out.get(e, 0) + c
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self._like({e: c * other for e, c in self._c.items()})
        out: dict[tuple[int, int], int] = {}
        for (a1, b1), c1 in self._c.items():
            for (a2, b2), c2 in other._c.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return self._like(out)

    __rmul__ = __mul__

    def shift(self, da: int, db: int) -> "TwoVarPoly":
        return self._like({(a + da, b + db): c for (a, b), c in self._c.items()})

    def specialize_first(self, value: int) -> LaurentPoly:
        """Evaluate the first variable at an integer (``value`` must be +-1)."""
        if value not in (1, -1):
            raise ValueError("only +-1 keeps integer Laurent coefficients")
        out: dict[int, int] = {}
        for (a, b), c in self._c.items():
            out[b] = out.get(b, 0) + c * value**(a % 2)
        return LaurentPoly(out)

    def to_pairs(self) -> list[list[int]]:
        return [[a, b, c] for (a, b), c in self.items()]

    def format(self) -> str:
        if not self._c:
            return "0"
        return format_terms(self.items(), self.names)

    __str__ = format

    def __repr__(self):
        return f"TwoVarPoly({self.format()})"


def format_terms(terms, names=("q",)) -> str:
    """Render ``((exponents...), coeff)`` pairs as ``-q^-2 + 3 + 2*q^4``."""
    parts = []
    for exps, c in terms:
        mono = []
        for name, e in zip(names, exps):
            if e == 0:
                continue
            mono.append(name if e == 1 else f"{name}^{e}")
        body = "*".join(mono)
        mag = abs(c)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        if not parts:
            parts.append(text if c > 0 else "-" + text)
        else:
            parts.append(("+ " if c > 0 else "- ") + text)
    return " ".join(parts)


Q_PLUS_QINV = LaurentPoly({-1: 1, 1: 1})
