"""Per-family formulas: defining equations, scalar reductions, Jacobians.

Every family is written as a pair of defining equations ``E(x, y, X, Y) = 0``
linking a point ``(x, y)`` to its image ``(X, Y)``.  A kernel knows

* how to solve those equations forward and backward (scalar Newton on the
  single implicit unknown, 2-D Newton for the full involution-conjugated form),
* the exact partial derivatives of ``E``, from which the differential of the
  step follows by the implicit function theorem,
* the closed-form determinant of that differential.

All kernel functions are vectorised over numpy arrays.
"""
from __future__ import annotations

import enum

import numpy as np

from .solver import OK, newton_2d, newton_scalar


class Family(enum.Enum):
    CONSERVATIVE_H = "ConservativeH"
    CROSS_FORM_TILDE_H = "CrossFormTildeH"
    TILDE_H_M2 = "TildeHm2"
    TILDE_H12_INV = "TildeH12inv"
    QR_HAT_H = "QRhatH"
    QR_EXAMPLE1 = "QRexample1"
    QR_EXAMPLE2 = "QRexample2"
    NONORIENTABLE_HAT_HM1 = "NonorientableHatHm1"
    T2MU = "T2mu"
    HM1MU = "Hm1mu"
    HP1MU = "Hp1mu"

    @classmethod
    def parse(cls, name: str) -> "Family":
        for f in cls:
            if name in (f.value, f.name) or name.lower() == f.value.lower():
                return f
        raise ValueError(f"unknown map family {name!r}; choose from {[f.value for f in cls]}")


NEEDS_B = {Family.TILDE_H12_INV, Family.T2MU}
NAMED = {Family.T2MU, Family.HM1MU, Family.HP1MU}
NONORIENTABLE = {Family.NONORIENTABLE_HAT_HM1, Family.HM1MU}
# families whose step needs no Newton solve at all
EXPLICIT = {Family.CONSERVATIVE_H}


def _mat(a, b, c, d):
    a, b, c, d = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (a, b, c, d)))
    out = np.empty(a.shape + (2, 2))
    out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = a, b, c, d
    return out


def _ok(shape):
    return np.full(shape, OK, dtype=int)


class Kernel:
    """Base class; subclasses fill in the family formulas."""

    sigma = 1.0  # determinant of the unperturbed map

    def forward(self, m, x, y, cfg):
        raise NotImplementedError

    def backward(self, m, X, Y, cfg):
        raise NotImplementedError

    def equations(self, m, x, y, X, Y):
        raise NotImplementedError

    def partials(self, m, x, y, X, Y):
        """Return ``(A, B)`` with ``A = dE/d(x, y)`` and ``B = dE/d(X, Y)``."""
        raise NotImplementedError

    def jacobian(self, m, x, y, X, Y):
        """Closed-form determinant as ``(numerator, denominator)``."""
        raise NotImplementedError

    def cross_factor(self, m, a, b, anchor=None):
        """Shared factor of cross-form Jacobians; only cross-form kernels define it."""
        raise NotImplementedError(f"{type(self).__name__} is not a cross-form map")


class ConservativeH(Kernel):
    def forward(self, m, x, y, cfg):
        F = m.F
        X, Y = y + 0.0 * x, -x + F(y)
        return X, Y, _ok(np.shape(X))

    def backward(self, m, X, Y, cfg):
        F = m.F
        x, y = F(X) - Y, X + 0.0 * Y
        return x, y, _ok(np.shape(x))

    def equations(self, m, x, y, X, Y):
        return X - y, Y + x - m.F(y)

    def partials(self, m, x, y, X, Y):
        z, one = np.zeros_like(x + y + X + Y), np.ones_like(x + y + X + Y)
        return _mat(z, -one, one, -m.F.derivative(y)), _mat(one, z, z, one)

    def jacobian(self, m, x, y, X, Y):
        one = np.ones(np.broadcast(x, y, X, Y).shape)
        return one, one


class CrossFormTildeH(Kernel):
    """X = y + e(x, Y) - e(Y, x),  Y = -x + F(y - e(Y, x))."""

    def forward(self, m, x, y, cfg):
        F, e = m.F, m.eps_eff

        def fun(Y):
            s = y - e(Y, x)
            return Y + x - F(s), 1.0 + F.derivative(s) * e.dx(Y, x)

        Y, _, status = newton_scalar(fun, -x + F(y), cfg)
        X = y + e(x, Y) - e(Y, x)
        return X, Y, status

    def backward(self, m, X, Y, cfg):
        F, e = m.F, m.eps_eff

        def fun(x):
            s = X - e(x, Y)
            return x + Y - F(s), 1.0 + F.derivative(s) * e.dx(x, Y)

        x, _, status = newton_scalar(fun, F(X) - Y, cfg)
        y = X - e(x, Y) + e(Y, x)
        return x, y, status

    def equations(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        return X - y - e(x, Y) + e(Y, x), Y + x - F(y - e(Y, x))

    def partials(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        fp = F.derivative(y - e(Y, x))
        z = np.zeros(np.broadcast(x, y, X, Y).shape)
        A = _mat(-e.dx(x, Y) + e.dy(Y, x), z - 1.0, 1.0 + fp * e.dy(Y, x), -fp)
        B = _mat(z + 1.0, -e.dy(x, Y) + e.dx(Y, x), z, 1.0 + fp * e.dx(Y, x))
        return A, B

    def anchor(self, m, x, y, X, Y):
        return y - m.eps_eff(Y, x)

    def cross_factor(self, m, a, b, anchor=None):
        return 1.0 + m.F.derivative(anchor) * m.eps_eff.dx(a, b)

    def jacobian(self, m, x, y, X, Y):
        s = self.anchor(m, x, y, X, Y)
        return self.cross_factor(m, x, Y, s), self.cross_factor(m, Y, x, s)


class TildeHm2(Kernel):
    """X = -x + F(Y) + e(x, Y),  Y = -y + F(x) + e(Y, x)."""

    def forward(self, m, x, y, cfg):
        F, e = m.F, m.eps_eff
        c = -y + F(x)

        def fun(Y):
            return Y - c - e(Y, x), 1.0 - e.dx(Y, x)

        Y, _, status = newton_scalar(fun, c, cfg)
        return -x + F(Y) + e(x, Y), Y, status

    def backward(self, m, X, Y, cfg):
        F, e = m.F, m.eps_eff
        c = -X + F(Y)

        def fun(x):
            return x - c - e(x, Y), 1.0 - e.dx(x, Y)

        x, _, status = newton_scalar(fun, c, cfg)
        return x, -Y + F(x) + e(Y, x), status

    def equations(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        return X + x - F(Y) - e(x, Y), Y + y - F(x) - e(Y, x)

    def partials(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        z = np.zeros(np.broadcast(x, y, X, Y).shape)
        A = _mat(1.0 - e.dx(x, Y), z, -F.derivative(x) - e.dy(Y, x), z + 1.0)
        B = _mat(z + 1.0, -F.derivative(Y) - e.dy(x, Y), z, 1.0 - e.dx(Y, x))
        return A, B

    def cross_factor(self, m, a, b, anchor=None):
        return 1.0 - m.eps_eff.dx(a, b)

    def jacobian(self, m, x, y, X, Y):
        return self.cross_factor(m, x, Y), self.cross_factor(m, Y, x)


class TildeH12inv(Kernel):
    """X = x/b - F(Y)/b + e(x, Y),  y = Y/b - F(x)/b + e(Y, x)."""

    def forward(self, m, x, y, cfg):
        F, e, b = m.F, m.eps_eff, m.b
        Fx = F(x)

        def fun(Y):
            return Y - Fx + b * e(Y, x) - b * y, 1.0 + b * e.dx(Y, x)

        Y, _, status = newton_scalar(fun, b * y + Fx, cfg)
        return (x - F(Y)) / b + e(x, Y), Y, status

    def backward(self, m, X, Y, cfg):
        F, e, b = m.F, m.eps_eff, m.b
        FY = F(Y)

        def fun(x):
            return x - FY + b * e(x, Y) - b * X, 1.0 + b * e.dx(x, Y)

        x, _, status = newton_scalar(fun, b * X + FY, cfg)
        return x, (Y - F(x)) / b + e(Y, x), status

    def equations(self, m, x, y, X, Y):
        F, e, b = m.F, m.eps_eff, m.b
        return X - (x - F(Y)) / b - e(x, Y), y - (Y - F(x)) / b - e(Y, x)

    def partials(self, m, x, y, X, Y):
        F, e, b = m.F, m.eps_eff, m.b
        z = np.zeros(np.broadcast(x, y, X, Y).shape)
        A = _mat(-1.0 / b - e.dx(x, Y), z, F.derivative(x) / b - e.dy(Y, x), z + 1.0)
        B = _mat(z + 1.0, F.derivative(Y) / b - e.dy(x, Y), z, -1.0 / b - e.dx(Y, x))
        return A, B

    def cross_factor(self, m, a, b_, anchor=None):
        return 1.0 + m.b * m.eps_eff.dx(a, b_)

    def jacobian(self, m, x, y, X, Y):
        return self.cross_factor(m, x, Y), self.cross_factor(m, Y, x)


class T2mu(TildeH12inv):
    """TildeH12inv with F = M - y^2 and e = mu x y; Jacobian written out."""

    def jacobian(self, m, x, y, X, Y):
        bm = m.b * m.mu
        return 1.0 + bm * Y + 0.0 * x, 1.0 + bm * x + 0.0 * Y


def _qr_detT(e1, e2, u, v):
    return (1.0 + e2.dy(u, v)) * (1.0 + e1.dx(u, v)) - e2.dx(u, v) * e1.dy(u, v)


class QRhatH(Kernel):
    """X = y + e2(x, y) - e2(Y, X),  Y = -x + F(y + e2(x, y)) - e1(x, y) - e1(Y, X)."""

    def forward(self, m, x, y, cfg):
        F, e1, e2 = m.F, m.eps_eff, m.eps2_eff
        w = y + e2(x, y)
        c1 = w
        c2 = -x + F(w) - e1(x, y)

        def fun(X, Y):
            r1 = X + e2(Y, X) - c1
            r2 = Y + e1(Y, X) - c2
            J = _mat(1.0 + e2.dy(Y, X), e2.dx(Y, X), e1.dy(Y, X), 1.0 + e1.dx(Y, X))
            return r1, r2, J

        X, Y, _, status = newton_2d(fun, (y + 0.0 * x, -x + F(y)), cfg)
        return X, Y, status

    def backward(self, m, X, Y, cfg):
        F, e1, e2 = m.F, m.eps_eff, m.eps2_eff
        L1 = X + e2(Y, X)
        L2 = Y + e1(Y, X)
        target = F(L1) - L2

        def fun(x, y):
            r1 = y + e2(x, y) - L1
            r2 = x + e1(x, y) - target
            J = _mat(e2.dx(x, y), 1.0 + e2.dy(x, y), 1.0 + e1.dx(x, y), e1.dy(x, y))
            return r1, r2, J

        x, y, _, status = newton_2d(fun, (F(X) - Y, X + 0.0 * Y), cfg)
        return x, y, status

    def equations(self, m, x, y, X, Y):
        F, e1, e2 = m.F, m.eps_eff, m.eps2_eff
        return (
            X - y - e2(x, y) + e2(Y, X),
            Y + x - F(y + e2(x, y)) + e1(x, y) + e1(Y, X),
        )

    def partials(self, m, x, y, X, Y):
        F, e1, e2 = m.F, m.eps_eff, m.eps2_eff
        fp = F.derivative(y + e2(x, y))
        A = _mat(
            -e2.dx(x, y),
            -1.0 - e2.dy(x, y),
            1.0 - fp * e2.dx(x, y) + e1.dx(x, y),
            -fp * (1.0 + e2.dy(x, y)) + e1.dy(x, y),
        )
        B = _mat(1.0 + e2.dy(Y, X), e2.dx(Y, X), e1.dy(Y, X), 1.0 + e1.dx(Y, X))
        return A, B

    def jacobian(self, m, x, y, X, Y):
        e1, e2 = m.eps_eff, m.eps2_eff
        return _qr_detT(e1, e2, x, y), _qr_detT(e1, e2, Y, X)


class QRexample1(Kernel):
    """X = y,  Y = -x + F(y) - e1(x, y) - e1(Y, X)."""

    def forward(self, m, x, y, cfg):
        F, e = m.F, m.eps_eff
        X = y + 0.0 * x
        c = -x + F(y) - e(x, y)

        def fun(Y):
            return Y + e(Y, X) - c, 1.0 + e.dx(Y, X)

        Y, _, status = newton_scalar(fun, -x + F(y), cfg)
        return X, Y, status

    def backward(self, m, X, Y, cfg):
        F, e = m.F, m.eps_eff
        y = X + 0.0 * Y
        c = -Y + F(y) - e(Y, X)

        def fun(x):
            return x + e(x, y) - c, 1.0 + e.dx(x, y)

        x, _, status = newton_scalar(fun, F(X) - Y, cfg)
        return x, y, status

    def equations(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        return X - y, Y + x - F(y) + e(x, y) + e(Y, X)

    def partials(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        z = np.zeros(np.broadcast(x, y, X, Y).shape)
        A = _mat(z, z - 1.0, 1.0 + e.dx(x, y), -F.derivative(y) + e.dy(x, y))
        B = _mat(z + 1.0, z, e.dy(Y, X), 1.0 + e.dx(Y, X))
        return A, B

    def jacobian(self, m, x, y, X, Y):
        e = m.eps_eff
        return 1.0 + e.dx(x, y), 1.0 + e.dx(Y, X)


class Hp1mu(QRexample1):
    """QRexample1 with F = M - y^2 and e1 = mu (x y + x^2)."""

    def jacobian(self, m, x, y, X, Y):
        mu = m.mu
        return 1.0 + mu * y + 2.0 * mu * x, 1.0 + mu * X + 2.0 * mu * Y


class QRexample2(Kernel):
    """X = y + e2(x, y) - e2(Y, X),  Y = -x + F(y + e2(x, y))."""

    def forward(self, m, x, y, cfg):
        F, e = m.F, m.eps_eff
        w = y + e(x, y)
        Y = -x + F(w)

        def fun(X):
            return X + e(Y, X) - w, 1.0 + e.dy(Y, X)

        X, _, status = newton_scalar(fun, y + 0.0 * x, cfg)
        return X, Y, status

    def backward(self, m, X, Y, cfg):
        F, e = m.F, m.eps_eff
        c = X + e(Y, X)
        x = F(c) - Y

        def fun(y):
            return y + e(x, y) - c, 1.0 + e.dy(x, y)

        y, _, status = newton_scalar(fun, X + 0.0 * Y, cfg)
        return x, y, status

    def equations(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        w = y + e(x, y)
        return X - w + e(Y, X), Y + x - F(w)

    def partials(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        fp = F.derivative(y + e(x, y))
        z = np.zeros(np.broadcast(x, y, X, Y).shape)
        A = _mat(-e.dx(x, y), -1.0 - e.dy(x, y), 1.0 - fp * e.dx(x, y), -fp * (1.0 + e.dy(x, y)))
        B = _mat(1.0 + e.dy(Y, X), e.dx(Y, X), z, z + 1.0)
        return A, B

    def jacobian(self, m, x, y, X, Y):
        e = m.eps_eff
        return 1.0 + e.dy(x, y), 1.0 + e.dy(Y, X)


class NonorientableHatHm1(Kernel):
    """X = -y,  Y = -x + F(y) - e(x, y) - e(Y, X)."""

    sigma = -1.0

    def forward(self, m, x, y, cfg):
        F, e = m.F, m.eps_eff
        X = -y + 0.0 * x
        c = -x + F(y) - e(x, y)

        def fun(Y):
            return Y + e(Y, X) - c, 1.0 + e.dx(Y, X)

        Y, _, status = newton_scalar(fun, -x + F(y), cfg)
        return X, Y, status

    def backward(self, m, X, Y, cfg):
        F, e = m.F, m.eps_eff
        y = -X + 0.0 * Y
        c = -Y + F(y) - e(Y, X)

        def fun(x):
            return x + e(x, y) - c, 1.0 + e.dx(x, y)

        x, _, status = newton_scalar(fun, F(y) - Y, cfg)
        return x, y, status

    def equations(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        return X + y, Y + x - F(y) + e(x, y) + e(Y, X)

    def partials(self, m, x, y, X, Y):
        F, e = m.F, m.eps_eff
        z = np.zeros(np.broadcast(x, y, X, Y).shape)
        A = _mat(z, z + 1.0, 1.0 + e.dx(x, y), -F.derivative(y) + e.dy(x, y))
        B = _mat(z + 1.0, z, e.dy(Y, X), 1.0 + e.dx(Y, X))
        return A, B

    def jacobian(self, m, x, y, X, Y):
        e = m.eps_eff
        return -(1.0 + e.dx(x, y)), 1.0 + e.dx(Y, X)


class Hm1mu(NonorientableHatHm1):
    """NonorientableHatHm1 with F = -M + y^2 and e = mu x y."""

    def jacobian(self, m, x, y, X, Y):
        mu = m.mu
        return -(1.0 + mu * y) + 0.0 * x, 1.0 + mu * X + 0.0 * Y


KERNELS = {
    Family.CONSERVATIVE_H: ConservativeH(),
    Family.CROSS_FORM_TILDE_H: CrossFormTildeH(),
    Family.TILDE_H_M2: TildeHm2(),
    Family.TILDE_H12_INV: TildeH12inv(),
    Family.QR_HAT_H: QRhatH(),
    Family.QR_EXAMPLE1: QRexample1(),
    Family.QR_EXAMPLE2: QRexample2(),
    Family.NONORIENTABLE_HAT_HM1: NonorientableHatHm1(),
    Family.T2MU: T2mu(),
    Family.HM1MU: Hm1mu(),
    Family.HP1MU: Hp1mu(),
}

CROSS_FORM = {Family.CROSS_FORM_TILDE_H, Family.TILDE_H_M2, Family.TILDE_H12_INV, Family.T2MU}
