"""Action-set and regularizer geometry.

Supported action sets: probability simplex, coordinate box, Euclidean ball,
unconstrained space, and the nonnegative budget set {x >= 0, sum x <= b}
(needed by the proportional-allocation auction).

Regularizers are 1-strongly convex potentials h paired with a fixed norm:
Quadratic h(x) = ||x||^2/2 with the Euclidean norm, NegativeEntropy
h(x) = sum x log x (simplex only) with the l1 norm and l-infinity dual.
Each exposes the Bregman divergence D(p, x), the Fenchel conjugate h*,
the Fenchel coupling F(p, y) = h(p) + h*(y) - <y, p>, the mirror map
Q(y) = argmax <y, x> - h(x), and the constrained prox step
argmin <g, x> + eta * D(x, base), all in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

# Coordinate floor before taking logs on the simplex. OMWU-style iterates
# stay strictly interior, so this is a safety net, not a correction.
ENTROPY_EPS = 1e-300

# Membership tolerances: simplex coordinates may undershoot zero by 1e-12
# from floating-point projection; all aggregate checks use 1e-9.
COORD_TOL = 1e-12
MEMBER_TOL = 1e-9


def _as_vector(x, dim, name="vector"):
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.shape[0] != dim:
        raise ValueError(f"{name} has shape {v.shape}, expected ({dim},)")
    return v


def simplex_projection(v, radius=1.0):
    """Euclidean projection onto {x >= 0, sum x = radius} by sort-and-threshold."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("simplex_projection needs a nonempty 1-d vector")
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - radius
    ind = np.arange(1, v.size + 1)
    cond = u - cssv / ind > 0
    rho = np.nonzero(cond)[0][-1]
    theta = cssv[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


class ActionSet:
    """Closed convex feasible set for one player."""

    dim: int

    def contains(self, x) -> bool:
        raise NotImplementedError

    def project(self, v):
        """Euclidean projection onto the set."""
        raise NotImplementedError

    def support_argmin(self, v):
        """A minimizer of <v, x> over the set (linear minimization oracle)."""
        raise NotImplementedError

    def sample(self, rng):
        """A random feasible point."""
        raise NotImplementedError

    def canonical(self):
        """A fixed interior reference point (uniform/midpoint/center)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Simplex(ActionSet):
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("simplex dimension must be >= 1")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and x.min() >= -COORD_TOL and abs(x.sum() - 1.0) <= MEMBER_TOL

    def project(self, v):
        return simplex_projection(_as_vector(v, self.dim))

    def support_argmin(self, v):
        v = _as_vector(v, self.dim)
        out = np.zeros(self.dim)
        out[int(np.argmin(v))] = 1.0
        return out

    def sample(self, rng):
        return rng.dirichlet(np.ones(self.dim))

    def canonical(self):
        return np.full(self.dim, 1.0 / self.dim)


@dataclass(frozen=True)
class Box(ActionSet):
    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, lower, upper):
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("box bounds must be 1-d vectors of equal length")
        if np.any(lower > upper):
            raise ValueError("box lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self):
        return self.lower.shape[0]

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (
            x.shape == (self.dim,)
            and np.all(x >= self.lower - MEMBER_TOL)
            and np.all(x <= self.upper + MEMBER_TOL)
        )

    def project(self, v):
        return np.clip(_as_vector(v, self.dim), self.lower, self.upper)

    def support_argmin(self, v):
        v = _as_vector(v, self.dim)
        return np.where(v > 0, self.lower, self.upper)

    def sample(self, rng):
        return self.lower + rng.random(self.dim) * (self.upper - self.lower)

    def canonical(self):
        return 0.5 * (self.lower + self.upper)


@dataclass(frozen=True)
class Ball(ActionSet):
    center: np.ndarray
    radius: float

    def __init__(self, center, radius):
        center = np.atleast_1d(np.asarray(center, dtype=float))
        radius = float(radius)
        if radius <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)

    @property
    def dim(self):
        return self.center.shape[0]

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and np.linalg.norm(x - self.center) <= self.radius + MEMBER_TOL

    def project(self, v):
        d = _as_vector(v, self.dim) - self.center
        n = np.linalg.norm(d)
        if n <= self.radius:
            return self.center + d
        return self.center + d * (self.radius / n)

    def support_argmin(self, v):
        v = _as_vector(v, self.dim)
        n = np.linalg.norm(v)
        if n == 0:
            return self.center.copy()
        return self.center - self.radius * v / n

    def sample(self, rng):
        g = rng.standard_normal(self.dim)
        n = np.linalg.norm(g)
        if n == 0:
            return self.center.copy()
        u = rng.random() ** (1.0 / self.dim)
        return self.center + self.radius * u * g / n

    def canonical(self):
        return self.center.copy()


@dataclass(frozen=True)
class Unconstrained(ActionSet):
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and bool(np.all(np.isfinite(x)))

    def project(self, v):
        return _as_vector(v, self.dim).copy()

    def support_argmin(self, v):
        raise ValueError("linear minimization is unbounded on an unconstrained set")

    def sample(self, rng):
        return rng.standard_normal(self.dim)

    def canonical(self):
        return np.zeros(self.dim)


@dataclass(frozen=True)
class Budget(ActionSet):
    """Nonnegative orthant capped by a total-spend budget: {x >= 0, sum x <= b}."""

    dim: int
    budget: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.budget <= 0:
            raise ValueError("budget must be positive")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and x.min() >= -COORD_TOL and x.sum() <= self.budget + MEMBER_TOL

    def project(self, v):
        # Exact two-case Euclidean projection: if clipping to the orthant
        # already meets the budget the cap is inactive; otherwise the cap is
        # tight and the problem reduces to a scaled-simplex projection.
        v = _as_vector(v, self.dim)
        clipped = np.maximum(v, 0.0)
        if clipped.sum() <= self.budget:
            return clipped
        return simplex_projection(v, radius=self.budget)

    def support_argmin(self, v):
        v = _as_vector(v, self.dim)
        k = int(np.argmin(v))
        out = np.zeros(self.dim)
        if v[k] < 0:
            out[k] = self.budget
        return out

    def sample(self, rng):
        return rng.dirichlet(np.ones(self.dim + 1))[: self.dim] * self.budget

    def canonical(self):
        return np.full(self.dim, self.budget / (2.0 * self.dim))


def _rows(p, dim, name):
    """View p as (k, dim) rows plus a flag for squeezing scalar results."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != dim:
            raise ValueError(f"{name} has shape {arr.shape}, expected ({dim},)")
        return arr[None, :], True
    if arr.ndim == 2 and arr.shape[1] == dim:
        return arr, False
    raise ValueError(f"{name} has shape {arr.shape}, expected (k, {dim})")


class Regularizer:
    """Strongly convex potential h over an action set, with its mirror calculus."""

    domain: ActionSet

    @property
    def dim(self):
        return self.domain.dim

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def mirror(self, y):
        raise NotImplementedError

    def conjugate(self, y):
        raise NotImplementedError

    def prox(self, base, g, eta):
        raise NotImplementedError

    def bregman(self, target, base):
        raise NotImplementedError

    def bregman_extended(self, target, base):
        """Bregman divergence, extended by continuity to boundary bases.

        Identical to bregman() wherever that is defined.  Subclasses whose
        divergence blows up on the domain boundary override this with the
        directional-limit value (possibly +inf) instead of raising, so that
        audit code can score iterates that have underflowed onto a face.
        """
        return self.bregman(target, base)

    def norm(self, v):
        raise NotImplementedError

    def dual_norm(self, v):
        raise NotImplementedError

    def coupling(self, target, y):
        """Fenchel coupling F(p, y) = h(p) + h*(y) - <y, p>."""
        y = _as_vector(y, self.dim, "dual vector")
        p, squeeze = _rows(target, self.dim, "target")
        out = self.value(p) + self.conjugate(y) - p @ y
        return float(out[0]) if squeeze else out

    def argmin_point(self):
        """argmin of h over the domain, i.e. Q(0)."""
        return self.mirror(np.zeros(self.dim))

    def min_value(self):
        return float(self.value(self.argmin_point()))


@dataclass(frozen=True)
class Quadratic(Regularizer):
    domain: ActionSet

    def value(self, x):
        x, squeeze = _rows(x, self.dim, "point")
        out = 0.5 * np.einsum("ij,ij->i", x, x)
        return float(out[0]) if squeeze else out

    def grad(self, x):
        return _as_vector(x, self.dim).copy()

    def mirror(self, y):
        return self.domain.project(_as_vector(y, self.dim, "dual vector"))

    def conjugate(self, y):
        y = _as_vector(y, self.dim, "dual vector")
        q = self.domain.project(y)
        return float(y @ q - 0.5 * q @ q)

    def prox(self, base, g, eta):
        if eta <= 0:
            raise ValueError("eta must be positive")
        base = _as_vector(base, self.dim, "base")
        g = _as_vector(g, self.dim, "gradient")
        return self.domain.project(base - g / eta)

    def bregman(self, target, base):
        base = _as_vector(base, self.dim, "base")
        p, squeeze = _rows(target, self.dim, "target")
        d = p - base[None, :]
        out = 0.5 * np.einsum("ij,ij->i", d, d)
        return float(out[0]) if squeeze else out

    def norm(self, v):
        return float(np.linalg.norm(v))

    def dual_norm(self, v):
        return float(np.linalg.norm(v))


@dataclass(frozen=True)
class NegativeEntropy(Regularizer):
    domain: Simplex = field()

    def __post_init__(self):
        if not isinstance(self.domain, Simplex):
            raise ValueError("NegativeEntropy pairs only with Simplex domains")

    def value(self, x):
        x, squeeze = _rows(x, self.dim, "point")
        terms = np.where(x > 0, x * np.log(np.maximum(x, ENTROPY_EPS)), 0.0)
        out = terms.sum(axis=1)
        return float(out[0]) if squeeze else out

    def grad(self, x):
        x = _as_vector(x, self.dim)
        return 1.0 + np.log(np.maximum(x, ENTROPY_EPS))

    def mirror(self, y):
        y = _as_vector(y, self.dim, "dual vector")
        z = np.exp(y - y.max())
        return z / z.sum()

    def conjugate(self, y):
        return float(logsumexp(_as_vector(y, self.dim, "dual vector")))

    def prox(self, base, g, eta):
        # Multiplicative-weights step, done in log space for stability.
        if eta <= 0:
            raise ValueError("eta must be positive")
        base = _as_vector(base, self.dim, "base")
        g = _as_vector(g, self.dim, "gradient")
        return self.mirror(np.log(np.maximum(base, ENTROPY_EPS)) - g / eta)

    def bregman(self, target, base):
        base = _as_vector(base, self.dim, "base")
        if np.any(base <= 0):
            raise ValueError("entropy Bregman base on the simplex boundary")
        p, squeeze = _rows(target, self.dim, "target")
        logq = np.log(base)
        terms = np.where(p > 0, p * (np.log(np.maximum(p, ENTROPY_EPS)) - logq[None, :]), 0.0)
        out = terms.sum(axis=1)
        return float(out[0]) if squeeze else out

    def bregman_extended(self, target, base):
        # KL with the base floored at the smallest representable mass.  Long
        # multiplicative-weights runs underflow coordinates to an exact 0.0
        # that stands for "positive but below float range" (exact iterates
        # from an interior start never leave the open simplex), so the audit
        # terms D(x_{t+1}, x_{t+1/2}) stay finite and the floor contributes
        # at most ~1e-298 when the target mass there is also denormal-small.
        # A target with real mass on a floored coordinate gets a penalty in
        # the hundreds, which sinks any residual it takes part in.
        base = _as_vector(base, self.dim, "base")
        if np.any(base < 0):
            raise ValueError("entropy Bregman base has negative coordinates")
        p, squeeze = _rows(target, self.dim, "target")
        logq = np.log(np.maximum(base, ENTROPY_EPS))
        terms = np.where(p > 0, p * (np.log(np.maximum(p, ENTROPY_EPS)) - logq[None, :]), 0.0)
        out = terms.sum(axis=1)
        return float(out[0]) if squeeze else out

    def norm(self, v):
        return float(np.abs(np.asarray(v, dtype=float)).sum())

    def dual_norm(self, v):
        return float(np.abs(np.asarray(v, dtype=float)).max())


def bregman(reg, target, base):
    """Bregman divergence D(target, base) = h(t) - h(b) - <grad h(b), t - b>."""
    return reg.bregman(target, base)


def fenchel_conjugate(reg, y):
    """h*(y) = max over the domain of <y, x> - h(x), in closed form."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("dual vector must be finite")
    return reg.conjugate(y)


def fenchel_coupling(reg, target, y):
    """F(target, y) = h(target) + h*(y) - <y, target>."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("dual vector must be finite")
    return reg.coupling(target, y)


def mirror_map(reg, y):
    """Q(y) = argmax <y, x> - h(x), the unique maximizer."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("dual vector must be finite")
    return reg.mirror(y)


def prox_step(reg, base, g, eta):
    """argmin over the domain of <g, x> + eta * D(x, base)."""
    return reg.prox(base, g, eta)
