"""Polynomial nonlinearities F(y) and perturbation functions eps(u, v).

Both are stored as coefficient tuples so that instances stay hashable and
immutable; evaluation is vectorised through :mod:`numpy.polynomial`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import DomainError


class NonlinearityKind(enum.Enum):
    QUADRATIC_MINUS = "minus"  # F(y) = M - y^2
    QUADRATIC_PLUS = "plus"  # F(y) = -M + y^2
    POLYNOMIAL = "poly"


@dataclass(frozen=True)
class Nonlinearity:
    """The function F of a Henon-like map together with its exact derivative.

    Use the class constructors rather than the raw fields::

        Nonlinearity.quadratic_minus(4.0)      # F(y) = 4 - y**2
        Nonlinearity.polynomial([0, 0, 0, 1])  # F(y) = y**3
    """

    kind: NonlinearityKind
    M: float = 0.0
    coeffs: tuple = ()

    @classmethod
    def quadratic_minus(cls, M: float) -> "Nonlinearity":
        return cls(NonlinearityKind.QUADRATIC_MINUS, float(M), (float(M), 0.0, -1.0))

    @classmethod
    def quadratic_plus(cls, M: float) -> "Nonlinearity":
        return cls(NonlinearityKind.QUADRATIC_PLUS, float(M), (-float(M), 0.0, 1.0))

    @classmethod
    def polynomial(cls, coeffs) -> "Nonlinearity":
        c = tuple(float(a) for a in coeffs)
        if not c:
            raise DomainError("polynomial nonlinearity needs at least one coefficient")
        return cls(NonlinearityKind.POLYNOMIAL, 0.0, c)

    @property
    def has_parameter(self) -> bool:
        return self.kind is not NonlinearityKind.POLYNOMIAL

    def with_M(self, M: float) -> "Nonlinearity":
        if self.kind is NonlinearityKind.QUADRATIC_MINUS:
            return Nonlinearity.quadratic_minus(M)
        if self.kind is NonlinearityKind.QUADRATIC_PLUS:
            return Nonlinearity.quadratic_plus(M)
        raise DomainError("a generic polynomial nonlinearity has no parameter M")

    @cached_property
    def _c(self):
        return np.asarray(self.coeffs, dtype=float)

    @cached_property
    def _dc(self):
        return P.polyder(self._c) if len(self._c) > 1 else np.zeros(1)

    def __call__(self, y):
        return P.polyval(y, self._c)

    def derivative(self, y):
        return P.polyval(y, self._dc)

    def is_even(self, samples: int = 32, radius: float = 4.0, rtol: float = 1e-12) -> bool:
        y = np.linspace(-radius, radius, samples)
        a, b = self(y), self(-y)
        return bool(np.all(np.abs(a - b) <= rtol * np.maximum(1.0, np.abs(a))))


class PerturbationForm(enum.Enum):
    ZERO = "zero"
    BIVARIATE = "bivariate"
    SEPARABLE = "separable"


def _as_matrix(terms) -> np.ndarray:
    if isinstance(terms, dict):
        deg_u = max((i for i, _ in terms), default=0)
        deg_v = max((j for _, j in terms), default=0)
        c = np.zeros((deg_u + 1, deg_v + 1))
        for (i, j), a in terms.items():
            if i < 0 or j < 0:
                raise DomainError(f"negative exponent in term {(i, j)}")
            c[i, j] += float(a)
        return c
    c = np.atleast_2d(np.asarray(terms, dtype=float))
    if c.ndim != 2:
        raise DomainError("bivariate coefficients must form a 2-D array")
    return c


def _bcast(u, v):
    return np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))


@dataclass(frozen=True)
class Perturbation:
    """A perturbation eps(u, v) with exact partials.

    ``dx`` differentiates in the first argument and ``dy`` in the second,
    whatever names the caller gives those arguments.
    """

    form: PerturbationForm = PerturbationForm.ZERO
    coeffs: tuple = ()  # bivariate: rows indexed by the power of u
    p: tuple = ()  # separable: eps(u, v) = p(u) + q(v)
    q: tuple = ()

    @classmethod
    def zero(cls) -> "Perturbation":
        return cls()

    @classmethod
    def bivariate(cls, terms) -> "Perturbation":
        """Build sum a_ij u^i v^j from ``{(i, j): a_ij}`` or a coefficient matrix."""
        c = _as_matrix(terms)
        return cls(PerturbationForm.BIVARIATE, tuple(tuple(float(a) for a in row) for row in c))

    @classmethod
    def separable(cls, p, q=(0.0,)) -> "Perturbation":
        p = tuple(float(a) for a in p) or (0.0,)
        q = tuple(float(a) for a in q) or (0.0,)
        return cls(PerturbationForm.SEPARABLE, p=p, q=q)

    @property
    def is_zero(self) -> bool:
        if self.form is PerturbationForm.ZERO:
            return True
        if self.form is PerturbationForm.BIVARIATE:
            return not np.any(self._c)
        return not (np.any(self._p) or np.any(self._q))

    def scaled(self, factor: float) -> "Perturbation":
        if self.form is PerturbationForm.ZERO:
            return self
        if self.form is PerturbationForm.BIVARIATE:
            return Perturbation.bivariate(factor * self._c)
        return Perturbation.separable(factor * self._p, factor * self._q)

    def as_bivariate(self) -> np.ndarray:
        """Coefficient matrix of the same function in the bivariate basis."""
        if self.form is PerturbationForm.BIVARIATE:
            return self._c.copy()
        if self.form is PerturbationForm.ZERO:
            return np.zeros((1, 1))
        c = np.zeros((len(self._p), len(self._q)))
        c[:, 0] += self._p
        c[0, :] += self._q
        return c

    @cached_property
    def _c(self):
        return np.asarray(self.coeffs, dtype=float) if self.coeffs else np.zeros((1, 1))

    @cached_property
    def _p(self):
        return np.asarray(self.p or (0.0,), dtype=float)

    @cached_property
    def _q(self):
        return np.asarray(self.q or (0.0,), dtype=float)

    @cached_property
    def _cu(self):
        return P.polyder(self._c, axis=0) if self._c.shape[0] > 1 else np.zeros((1, 1))

    @cached_property
    def _cv(self):
        return P.polyder(self._c, axis=1) if self._c.shape[1] > 1 else np.zeros((1, 1))

    @cached_property
    def _dp(self):
        return P.polyder(self._p) if len(self._p) > 1 else np.zeros(1)

    @cached_property
    def _dq(self):
        return P.polyder(self._q) if len(self._q) > 1 else np.zeros(1)

    def __call__(self, u, v):
        u, v = _bcast(u, v)
        if self.form is PerturbationForm.ZERO:
            return np.zeros(u.shape)
        if self.form is PerturbationForm.BIVARIATE:
            return P.polyval2d(u, v, self._c)
        return P.polyval(u, self._p) + P.polyval(v, self._q)

    def dx(self, u, v):
        u, v = _bcast(u, v)
        if self.form is PerturbationForm.ZERO:
            return np.zeros(u.shape)
        if self.form is PerturbationForm.BIVARIATE:
            return P.polyval2d(u, v, self._cu)
        return P.polyval(u, self._dp) + 0.0 * v

    def dy(self, u, v):
        u, v = _bcast(u, v)
        if self.form is PerturbationForm.ZERO:
            return np.zeros(u.shape)
        if self.form is PerturbationForm.BIVARIATE:
            return P.polyval2d(u, v, self._cv)
        return P.polyval(v, self._dq) + 0.0 * u

    def first_component_derivative(self) -> np.ndarray:
        """Coefficients of p' for a separable p(u) + q(v); pure-u part otherwise."""
        if self.form is PerturbationForm.SEPARABLE:
            return self._dp.copy()
        if self.form is PerturbationForm.ZERO:
            return np.zeros(1)
        pure_u = self._c[:, 0]
        return P.polyder(pure_u) if len(pure_u) > 1 else np.zeros(1)

    def is_separable(self) -> bool:
        if self.form is not PerturbationForm.BIVARIATE:
            return True
        mixed = self._c[1:, 1:]
        return not np.any(mixed)


ZERO = Perturbation.zero()
