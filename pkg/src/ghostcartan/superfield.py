"""Superfields over (t, theta, thetabar) and the Berezin form of H~.

A ``SuperValue`` is ``body + theta*theta_part + thetabar*thetabar_part +
thetabar*theta*top`` with the Grassmann coordinate always written to the
LEFT of its coefficient.  theta and thetabar anticommute with each other and
with every ghost.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .algebra import I, GradedPolynomial, ScalarC
from .charges import PhaseModel

__all__ = ["SuperValue", "superfield", "super_mul", "evaluate", "berezin_H", "BEREZIN_SIGN"]

# int dtheta dthetabar (thetabar theta) = BEREZIN_SIGN; calibrated so the oscillator reproduces H~.
BEREZIN_SIGN = 1


@dataclass(frozen=True)
class SuperValue:
    body: GradedPolynomial
    theta_part: GradedPolynomial
    thetabar_part: GradedPolynomial
    top: GradedPolynomial

    @classmethod
    def scalar(cls, p: GradedPolynomial) -> "SuperValue":
        z = GradedPolynomial.zero(p.n)
        return cls(p, z, z, z)

    @property
    def n(self) -> int:
        return self.body.n

    def __add__(self, other: "SuperValue") -> "SuperValue":
        return SuperValue(self.body + other.body, self.theta_part + other.theta_part,
                          self.thetabar_part + other.thetabar_part, self.top + other.top)

    def scale(self, k) -> "SuperValue":
        return SuperValue(self.body.scale(k), self.theta_part.scale(k),
                          self.thetabar_part.scale(k), self.top.scale(k))

    def __mul__(self, other: "SuperValue") -> "SuperValue":
        return super_mul(self, other)

    def slots(self):
        return {"1": self.body, "theta": self.theta_part,
                "thetabar": self.thetabar_part, "thetabar*theta": self.top}


def super_mul(x: SuperValue, y: SuperValue) -> SuperValue:
    # x0 theta = theta twist(x0); theta x1 thetabar y2 = -thetabar theta twist(x1) y2;
    # thetabar x2 theta y1 = thetabar theta twist(x2) y1.
    x0t = x.body.parity_twist()
    return SuperValue(
        body=x.body * y.body,
        theta_part=x0t * y.theta_part + x.theta_part * y.body,
        thetabar_part=x0t * y.thetabar_part + x.thetabar_part * y.body,
        top=(x.body * y.top + x.top * y.body
             - x.theta_part.parity_twist() * y.thetabar_part
             + x.thetabar_part.parity_twist() * y.theta_part),
    )


def superfield(model: PhaseModel, a: int) -> SuperValue:
    """``Phi^a = phi^a + theta c^a + thetabar omega^{ab} cb_b + i thetabar theta omega^{ab} lam_b``."""
    N = model.N
    if not 1 <= a <= N:
        raise IndexError(f"superfield index {a} out of range 1..{N}")
    cb = GradedPolynomial.zero(model.n)
    lam = GradedPolynomial.zero(model.n)
    for b in range(1, N + 1):
        w = model.table.upper(a, b)
        if w:
            cb = cb + model.v("cb", b).scale(w)
            lam = lam + model.v("lam", b).scale(w)
    return SuperValue(model.v("phi", a), model.v("c", a), cb, lam.scale(I))


def evaluate(H: GradedPolynomial, fields: Iterable[SuperValue]) -> SuperValue:
    """Substitute superfields for phi^1..phi^N in a phi-polynomial."""
    fields = list(fields)
    n = H.n
    N = 2 * n
    one = SuperValue.scalar(GradedPolynomial.const(n, 1))
    powers = [[one] for _ in range(N)]
    total = SuperValue.scalar(GradedPolynomial.zero(n))
    for (exps, mask), coeff in H.terms.items():
        if mask or any(exps[N:]):
            raise ValueError("only phi-polynomials can be evaluated on superfields")
        term = one
        for a, e in enumerate(exps[:N]):
            if e:
                while len(powers[a]) <= e:
                    powers[a].append(powers[a][-1] * fields[a])
                term = term * powers[a][e]
        total = total + term.scale(coeff)
    return total


def berezin_H(model: PhaseModel) -> GradedPolynomial:
    """``i * int dtheta dthetabar H[Phi]``."""
    value = evaluate(model.H, (superfield(model, a) for a in range(1, model.N + 1)))
    return value.top.scale(I * ScalarC(BEREZIN_SIGN))
