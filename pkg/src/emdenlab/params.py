"""Parameter algebra for the weighted Lane-Emden equation.

The equation -div(|x|^theta grad v) = |x|^l |v|^(p-1) v posed in R^N
behaves, radially, like an unweighted problem in the effective dimension
N' = N + theta with Henon-type weight tau = l - theta.  This module holds
the exact algebra built on those indices:

* the Serrin exponent (N'+tau)/(N'-2) and the Sobolev-type exponent
  (N'+2+2*tau)/(N'-2),
* the potential-strength function f(p) = p*m*(N'-2-m), m = (2+tau)/(p-1),
  which measures the linearization of the equation at its explicit
  singular solution against the Hardy level (N'-2)^2/4,
* the two critical powers p_tilde_c = P_minus and p_c (the
  Joseph-Lundgren-type power, P_plus or infinity) where f crosses the
  Hardy level, obtained both in closed form and by bisection,
* the regime classification of a given power p, and
* the change of variables v = |x|^sigma u linking the weighted equation
  to the nonlinear Schrodinger equation with Hardy potential
  -Delta u = |x|^alpha |u|^(p-1) u + ell |x|^(-2) u.

Everything here is pure arithmetic on immutable values and is safe for
concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidParameterError, NumericalError

#: Bisection terminates when the bracket width drops below this.
BISECTION_WIDTH = 1e-12
#: Every returned root must satisfy |f(root) - hardy_level| below this.
ROOT_RESIDUAL_TOL = 1e-10
#: Allowed disagreement between closed-form and bisection roots.
CROSSCHECK_TOL = 1e-8


@dataclass(frozen=True)
class ProblemParams:
    """Parameters (N, theta, l, p) of the weighted equation.

    ``standard_regime`` records the standing assumption N + theta > 2 and
    l - theta > -2 under which the critical-exponent theory applies.
    Parameters outside that regime are representable (the dual transform
    produces them) but most operations reject them.
    """

    N: int
    theta: float
    l: float
    p: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise InvalidParameterError(f"N must be an integer >= 2, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if not self.p > 1.0:
            raise InvalidParameterError(f"p must exceed 1, got {self.p}")
        for name in ("theta", "l", "p"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")

    @property
    def n_prime(self) -> float:
        return self.N + self.theta

    @property
    def tau(self) -> float:
        return self.l - self.theta

    @property
    def standard_regime(self) -> bool:
        return self.n_prime > 2.0 and self.tau > -2.0


@dataclass(frozen=True)
class DerivedIndices:
    """Indices derived from (N, theta, l, p).

    ``serrin`` and ``sobolev`` are None exactly when N' = 2, where the
    defining quotients are singular.  ``c0`` is the amplitude of the
    singular solution c0 * r**(-m_exp); it exists exactly when the
    base m_exp*(N'-2-m_exp) is positive, i.e. when N' > 2, tau > -2 and
    p exceeds the Serrin exponent.
    """

    n_prime: float
    tau: float
    m_exp: float
    serrin: float | None
    sobolev: float | None
    c0: float | None


class RegimeLabel(str, Enum):
    """Position of p relative to the critical powers at (N', tau)."""

    BELOW_SERRIN = "below_serrin"
    SERRIN_TO_PTILDE = "serrin_to_ptilde"
    REMOVABILITY_WINDOW = "removability_window"
    SOBOLEV_EXACT = "sobolev_exact"
    AT_OR_ABOVE_PC = "at_or_above_pc"


@dataclass(frozen=True)
class CriticalExponents:
    """Roots of f(p) = (N'-2)^2/4 for a fixed (N', tau).

    ``p_minus`` (= ``p_tilde_c``) always exists and lies strictly between
    the Serrin and Sobolev exponents.  ``p_plus`` exists iff
    N' > 10 + 4*tau and then lies strictly above the Sobolev exponent;
    ``p_c`` equals ``p_plus`` there and is None (meaning +infinity) for
    2 < N' <= 10 + 4*tau.  Infinity is always this explicit None, never a
    float sentinel.  ``quadratic_coeffs`` are the coefficients (a, b, c)
    of the equivalent quadratic a*p**2 - b*p + c = 0.
    """

    p_minus: float
    p_plus: float | None
    p_c: float | None
    p_tilde_c: float
    quadratic_coeffs: tuple[float, float, float]


@dataclass(frozen=True)
class SchrodingerParams:
    """Parameters (N, alpha, ell, p) of the Hardy-potential equation.

    Requires ell < (N-2)^2/4 so that the exponent sigma of the change of
    variables v = |x|^sigma u is defined.
    """

    N: int
    alpha: float
    ell: float
    p: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise InvalidParameterError(f"N must be an integer >= 2, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if not self.p > 1.0:
            raise InvalidParameterError(f"p must exceed 1, got {self.p}")
        cap = (self.N - 2.0) ** 2 / 4.0
        if not self.ell < cap:
            raise InvalidParameterError(
                f"ell must be below (N-2)^2/4 = {cap}, got {self.ell}"
            )

    @property
    def sigma(self) -> float:
        half = (self.N - 2.0) / 2.0
        return half - math.sqrt(half * half - self.ell)


@dataclass(frozen=True)
class Classification:
    """Regime label plus the auxiliary facts the label depends on.

    ``condition_weight_balance`` is the inequality
    tau <= (p-1)*theta / (2p + 2*sqrt(p(p-1))), which decides whether
    min(p_c(N',tau), p_c(N,0)) is attained by the weighted exponent.
    ``removability_applies`` is True when p sits strictly between
    p_tilde_c and that minimum and is not the Sobolev exponent; only then
    do the removable-singularity / fast-decay conclusions apply.  The
    label itself partitions (1, inf) using p_c(N', tau) alone.
    """

    label: RegimeLabel
    condition_weight_balance: bool
    p_c_weighted: float | None
    p_c_dimension: float | None
    removability_upper: float | None
    removability_applies: bool


def derive(params: ProblemParams) -> DerivedIndices:
    """Compute the derived indices of a parameter set."""
    np_, tau = params.n_prime, params.tau
    m = (2.0 + tau) / (params.p - 1.0)
    if np_ == 2.0:
        serrin: float | None = None
        sobolev: float | None = None
    else:
        serrin = (np_ + tau) / (np_ - 2.0)
        sobolev = (np_ + 2.0 + 2.0 * tau) / (np_ - 2.0)
    base = m * (np_ - 2.0 - m)
    c0 = base ** (1.0 / (params.p - 1.0)) if (np_ > 2.0 and base > 0.0) else None
    return DerivedIndices(n_prime=np_, tau=tau, m_exp=m, serrin=serrin, sobolev=sobolev, c0=c0)


def f_eval(p: float, n_prime: float, tau: float) -> float:
    """Potential strength f(p) = p * m * (N'-2-m) with m = (2+tau)/(p-1).

    Vanishes at the Serrin exponent and tends to (2+tau)*(N'-2) as
    p -> infinity.
    """
    if not p > 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    m = (2.0 + tau) / (p - 1.0)
    return p * m * (n_prime - 2.0 - m)


def gamma_of_p(p: float) -> float:
    """Upper endpoint 2p + 2*sqrt(p(p-1)) - 1 of the admissible test-power range."""
    if not p > 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    return 2.0 * p + 2.0 * math.sqrt(p * (p - 1.0)) - 1.0


def capital_gamma(p: float, tau: float) -> float:
    """Effective-dimension threshold whose crossing with N' locates p_c.

    Gamma(p) = 2*(2+tau)*(1 + 1/(p-1) + sqrt(1 + 1/(p-1))) + 2 is strictly
    decreasing on (1, inf), from +infinity down to 10 + 4*tau.
    """
    if not p > 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    s = 1.0 + 1.0 / (p - 1.0)
    return 2.0 * (2.0 + tau) * (s + math.sqrt(s)) + 2.0


def delta(n_prime: float, p: float, gamma: float, tau: float) -> float:
    """Capacity balance N'(p-1) - (2+tau)*gamma - 2p - tau.

    At gamma = gamma_of_p(p) this equals (p-1)*(N' - capital_gamma(p, tau))
    and vanishes exactly at p = p_c(N', tau).
    """
    if not p > 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    return n_prime * (p - 1.0) - (2.0 + tau) * gamma - 2.0 * p - tau


def hardy_constant(n_prime: float) -> float:
    """Hardy level (N'-2)^2/4: the best constant of the weighted form bound.

    The companion Caffarelli-Kohn-Nirenberg inequality has optimal
    constant 4/(N'-2)^2; this function returns the form-side value.
    """
    if not n_prime > 2.0:
        raise InvalidParameterError(f"need N' > 2, got {n_prime}")
    return (n_prime - 2.0) ** 2 / 4.0


def sigma_of(schrodinger: SchrodingerParams) -> float:
    """Exponent sigma = (N-2)/2 - sqrt((N-2)^2/4 - ell) of the change of variables.

    It is the smaller root of sigma^2 - (N-2)*sigma + ell = 0.
    """
    return schrodinger.sigma


def _bisect_crossing(n_prime: float, tau: float, lo: float, hi: float) -> float:
    """Bisection root of f(p) = (N'-2)^2/4 on a sign-changing bracket."""
    level = (n_prime - 2.0) ** 2 / 4.0
    glo = f_eval(lo, n_prime, tau) - level if lo > 1.0 else -level
    ghi = f_eval(hi, n_prime, tau) - level
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0.0) == (ghi > 0.0):
        raise NumericalError(
            f"no sign change for f crossing on [{lo}, {hi}] at N'={n_prime}, tau={tau}"
        )
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= max(BISECTION_WIDTH, 4.0 * math.ulp(mid)):
            return mid
        gmid = f_eval(mid, n_prime, tau) - level
        if gmid == 0.0:
            return mid
        if (gmid > 0.0) == (ghi > 0.0):
            hi, ghi = mid, gmid
        else:
            lo, glo = mid, gmid
    raise NumericalError("bisection failed to converge")


def crossing_by_bisection(n_prime: float, tau: float, which: str = "plus") -> float:
    """Root of f(p) = (N'-2)^2/4 found by bisection alone.

    ``which='minus'`` brackets between the Serrin and Sobolev exponents;
    ``which='plus'`` (valid only for N' > 10 + 4*tau) brackets above the
    Sobolev exponent, doubling the upper end until f drops back below the
    Hardy level.  Serves as the independent cross-check of the closed
    forms.
    """
    if not (n_prime > 2.0 and tau > -2.0):
        raise InvalidParameterError("need N' > 2 and tau > -2")
    serrin = (n_prime + tau) / (n_prime - 2.0)
    sobolev = (n_prime + 2.0 + 2.0 * tau) / (n_prime - 2.0)
    level = (n_prime - 2.0) ** 2 / 4.0
    if which == "minus":
        return _bisect_crossing(n_prime, tau, serrin, sobolev)
    if which != "plus":
        raise InvalidParameterError("which must be 'plus' or 'minus'")
    if not n_prime > 10.0 + 4.0 * tau:
        raise InvalidParameterError("upper crossing exists only for N' > 10 + 4*tau")
    hi = max(100.0, 2.0 * sobolev)
    for _ in range(200):
        if f_eval(hi, n_prime, tau) < level:
            break
        hi *= 2.0
    else:
        raise NumericalError("could not bracket the upper crossing")
    return _bisect_crossing(n_prime, tau, sobolev, hi)


def critical_exponents(n_prime: float, tau: float) -> CriticalExponents:
    """Critical powers at (N', tau) via the quadratic a*p**2 - b*p + c = 0.

    The coefficients are a = (N'-2)*(N'-4*tau-10),
    b = 2*(N'-2)^2 - 4*(tau+2)*(tau+N') and c = (N'-2)^2.  When
    N' = 4*tau + 10 the quadratic degenerates to a linear equation with
    root c/b = 4/3.  Each returned root is verified against the defining
    equation f(p) = (N'-2)^2/4 at absolute tolerance 1e-10 and against an
    independent bisection root at 1e-8; any disagreement raises
    :class:`NumericalError`.

    Raises :class:`InvalidParameterError` for N' <= 2 or tau <= -2, where
    the theory provides no positive solutions on punctured balls.
    """
    if not n_prime > 2.0:
        raise InvalidParameterError(f"need N' > 2, got {n_prime}")
    if not tau > -2.0:
        raise InvalidParameterError(f"need tau > -2, got {tau}")

    a = (n_prime - 2.0) * (n_prime - 4.0 * tau - 10.0)
    b = 2.0 * (n_prime - 2.0) ** 2 - 4.0 * (tau + 2.0) * (tau + n_prime)
    c = (n_prime - 2.0) ** 2
    serrin = (n_prime + tau) / (n_prime - 2.0)
    sobolev = (n_prime + 2.0 + 2.0 * tau) / (n_prime - 2.0)
    level = c / 4.0

    if a == 0.0:
        p_minus = c / b
        p_plus = None
    else:
        # b^2 - 4ac factored as 16*(2+tau)^3*(2N'+tau-2): positive throughout
        # the admissible region and free of the catastrophic cancellation the
        # raw expression suffers as tau approaches -2.
        sq = 4.0 * (2.0 + tau) * math.sqrt((2.0 + tau) * (2.0 * n_prime + tau - 2.0))
        # Numerically stable root pair of a*p^2 - b*p + c = 0.
        q = 0.5 * (b + sq) if b >= 0.0 else 0.5 * (b - sq)
        roots = sorted((q / a, c / q))
        if a > 0.0:
            p_minus, p_plus = roots
        else:
            # One root is spurious (negative); the admissible one is > 1.
            candidates = [r for r in roots if r > 1.0]
            if len(candidates) != 1:
                raise NumericalError(
                    f"unexpected root pattern {roots} at N'={n_prime}, tau={tau}"
                )
            p_minus, p_plus = candidates[0], None

    # The window ordering is part of the contract: fail loudly if violated.
    if not (serrin < p_minus < sobolev):
        raise NumericalError(
            f"lower crossing {p_minus} escapes (serrin, sobolev) at N'={n_prime}, tau={tau}"
        )
    if p_plus is not None and not p_plus > sobolev:
        raise NumericalError(
            f"upper crossing {p_plus} is not above the Sobolev exponent at N'={n_prime}, tau={tau}"
        )

    for root in (p_minus,) if p_plus is None else (p_minus, p_plus):
        if abs(f_eval(root, n_prime, tau) - level) > ROOT_RESIDUAL_TOL:
            raise NumericalError(
                f"closed-form root {root} misses the Hardy level at N'={n_prime}, tau={tau}"
            )

    # Independent bisection cross-check of every returned root.
    bis_minus = crossing_by_bisection(n_prime, tau, "minus")
    if abs(bis_minus - p_minus) > CROSSCHECK_TOL:
        raise NumericalError(
            f"closed-form P_minus {p_minus} disagrees with bisection {bis_minus}"
        )
    if p_plus is not None:
        bis_plus = crossing_by_bisection(n_prime, tau, "plus")
        if abs(bis_plus - p_plus) > CROSSCHECK_TOL * max(1.0, abs(p_plus)):
            raise NumericalError(
                f"closed-form P_plus {p_plus} disagrees with bisection {bis_plus}"
            )

    p_c = p_plus if a > 0.0 else None
    return CriticalExponents(
        p_minus=p_minus,
        p_plus=p_plus,
        p_c=p_c,
        p_tilde_c=p_minus,
        quadratic_coeffs=(a, b, c),
    )


def _p_c_dimension(N: int) -> float | None:
    """p_c(N, 0) with None for +infinity (all N <= 10)."""
    if N <= 10:
        return None
    return critical_exponents(float(N), 0.0).p_c


def classify_p(params: ProblemParams) -> Classification:
    """Place p relative to the critical powers of (N', tau).

    The label partitions (1, inf): at or below the Serrin exponent, in
    (serrin, p_tilde_c], in the open window (p_tilde_c, p_c) off the
    Sobolev exponent, exactly at the Sobolev exponent (where the theory
    makes no removability claim), or at/above p_c.  The report also
    carries the weight-balance condition and min(p_c(N',tau), p_c(N,0)),
    since the removability conclusions require p below that minimum.
    """
    if not params.standard_regime:
        raise InvalidParameterError(
            "classification requires N + theta > 2 and l - theta > -2"
        )
    p = params.p
    np_, tau = params.n_prime, params.tau
    exps = critical_exponents(np_, tau)
    ind = derive(params)
    serrin, sobolev = ind.serrin, ind.sobolev

    sobolev_exact = math.isclose(p, sobolev, rel_tol=1e-12, abs_tol=0.0)
    if sobolev_exact:
        label = RegimeLabel.SOBOLEV_EXACT
    elif p <= serrin:
        label = RegimeLabel.BELOW_SERRIN
    elif p <= exps.p_tilde_c:
        label = RegimeLabel.SERRIN_TO_PTILDE
    elif exps.p_c is None or p < exps.p_c:
        label = RegimeLabel.REMOVABILITY_WINDOW
    else:
        label = RegimeLabel.AT_OR_ABOVE_PC

    balance = tau <= (p - 1.0) * params.theta / (2.0 * p + 2.0 * math.sqrt(p * (p - 1.0)))
    p_c_dim = _p_c_dimension(params.N)
    finite_uppers = [x for x in (exps.p_c, p_c_dim) if x is not None]
    upper = min(finite_uppers) if finite_uppers else None
    applies = (
        p > exps.p_tilde_c
        and not sobolev_exact
        and (upper is None or p < upper)
    )
    return Classification(
        label=label,
        condition_weight_balance=balance,
        p_c_weighted=exps.p_c,
        p_c_dimension=p_c_dim,
        removability_upper=upper,
        removability_applies=applies,
    )
