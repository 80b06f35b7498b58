"""
Special functions behind every exact computation in gcrm.

- Pochhammer symbols (alpha)_n in log space
- Monic Laguerre polynomials L~_{n,alpha}, orthogonal for Gamma(alpha, 1),
  with their norms n!(alpha)_n and Laplace transforms
- Modified Bessel I_nu by its power series
- Partial exponential Bell polynomials B_{n,k}

Functions taking ``x`` accept scalars or numpy arrays and work elementwise.
"""

import logging
import math
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, roots_genlaguerre

from .base import DomainError, PolyIndex, RangeError
from .config import get_config

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

BESSEL_REL_TOL = 1e-16
BESSEL_MAX_TERMS = 100000


def _check_order(n) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"Order must be a nonnegative integer, got {n}")
    return int(n)


def log_pochhammer(alpha: float, n: int) -> float:
    """log (alpha)_n = log Gamma(alpha + n) - log Gamma(alpha)."""
    if not alpha > 0:
        raise DomainError(f"Pochhammer symbol needs alpha > 0, got {alpha}")
    n = _check_order(n)
    if n == 0:
        return 0.0
    return float(gammaln(alpha + n) - gammaln(alpha))


def pochhammer(alpha: float, n: int) -> float:
    """Ascending factorial (alpha)_n = alpha (alpha+1) ... (alpha+n-1)."""
    try:
        return math.exp(log_pochhammer(alpha, n))
    except OverflowError as e:
        raise RangeError(f"(alpha)_n overflows for alpha={alpha}, n={n}") from e


def laguerre_table(n_max: int, alpha: float, x: ArrayLike) -> np.ndarray:
    """
    Monic Laguerre polynomials of degrees 0..n_max at ``x``.

    Uses the monic three-term recurrence
        L~_{n+1} = (x - (2n + alpha)) L~_n - n (n + alpha - 1) L~_{n-1}.

    Returns an array of shape (n_max + 1,) + shape(x).
    """
    n_max = _check_order(n_max)
    PolyIndex(n_max, alpha)
    x = np.asarray(x, dtype=float)

    table = np.empty((n_max + 1,) + x.shape)
    table[0] = 1.0
    if n_max >= 1:
        table[1] = x - alpha
    for n in range(1, n_max):
        table[n + 1] = (x - (2 * n + alpha)) * table[n] - n * (n + alpha - 1) * table[n - 1]
    return table


def laguerre_tilde(idx: PolyIndex, x: ArrayLike) -> ArrayLike:
    """Monic Laguerre polynomial L~_{n,alpha}(x)."""
    value = laguerre_table(idx.n, idx.alpha, x)[idx.n]
    return value if np.ndim(value) else float(value)


def hyp1f1_laguerre(idx: PolyIndex, x: ArrayLike) -> ArrayLike:
    """
    Monic Laguerre polynomial from its terminating 1F1 series,
    (-1)^n (alpha)_n 1F1(-n; alpha; x), summed term by term.
    """
    n, alpha = idx.n, idx.alpha
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    log_poch_n = log_pochhammer(alpha, n)
    for k in range(n + 1):
        coeff = math.comb(n, k) * math.exp(log_poch_n - log_pochhammer(alpha, k))
        total = total + (-1) ** (n - k) * coeff * x ** k
    return total if total.ndim else float(total)


def laguerre_norm(idx: PolyIndex) -> float:
    """c_{n,alpha} = n! (alpha)_n, the squared norm of L~_{n,alpha} under Gamma(alpha, 1)."""
    try:
        return math.exp(gammaln(idx.n + 1) + log_pochhammer(idx.alpha, idx.n))
    except OverflowError as e:
        raise RangeError(f"Laguerre norm overflows for n={idx.n}, alpha={idx.alpha}") from e


def laguerre_laplace(idx: PolyIndex, t: float) -> float:
    """
    E[exp(-tX) L~_{n,alpha}(X)] for X ~ Gamma(alpha, 1):
    (alpha)_n (-t/(t+1))^n (1+t)^(-alpha).
    """
    if t < 0:
        raise DomainError(f"Laplace argument must be nonnegative, got {t}")
    n, alpha = idx.n, idx.alpha
    if t == 0:
        return 1.0 if n == 0 else 0.0
    sign = -1.0 if n % 2 else 1.0
    log_abs = log_pochhammer(alpha, n) + n * math.log(t / (t + 1.0)) - alpha * math.log1p(t)
    return sign * math.exp(log_abs)


def laguerre_generating_function(alpha: float, x: ArrayLike, r: float) -> ArrayLike:
    """sum_n L~_{n,alpha}(x) r^n / n! = (1+r)^(-alpha) exp(x r / (1+r)), |r| < 1."""
    if not alpha > 0:
        raise DomainError(f"Gamma shape must be positive, got {alpha}")
    if not abs(r) < 1:
        raise DomainError(f"Generating function needs |r| < 1, got {r}")
    x = np.asarray(x, dtype=float)
    value = (1.0 + r) ** (-alpha) * np.exp(x * r / (1.0 + r))
    return value if value.ndim else float(value)


def laguerre_quadrature(alpha: float, nodes: int = None) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss quadrature points and weights for the Gamma(alpha, 1) law (weights sum to 1)."""
    if not alpha > 0:
        raise DomainError(f"Gamma shape must be positive, got {alpha}")
    if nodes is None:
        nodes = get_config().numerics.quadrature_nodes
    points, weights = roots_genlaguerre(int(nodes), alpha - 1.0)
    return points, weights * math.exp(-gammaln(alpha))


def bessel_i(nu: float, x: ArrayLike) -> ArrayLike:
    """
    Modified Bessel function I_nu(x) by its power series

        sum_k (x/2)^(2k + nu) / (k! Gamma(k + nu + 1)),

    stopped once a term falls below 1e-16 of the partial sum.
    """
    if not nu > -1:
        raise DomainError(f"Bessel order must exceed -1, got {nu}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("Bessel argument must be nonnegative")
    limit = get_config().numerics.bessel_max_argument
    if np.any(x > limit):
        raise RangeError(f"Bessel power series refused for arguments above {limit}")

    at_zero = x == 0
    half = np.where(at_zero, 1.0, x / 2.0)
    term = np.exp(nu * np.log(half) - gammaln(nu + 1.0))
    term = np.where(at_zero, 1.0 if nu == 0 else 0.0, term)
    half = np.where(at_zero, 0.0, half)
    quarter_sq = half * half

    total = term.copy()
    for k in range(1, BESSEL_MAX_TERMS):
        term = term * quarter_sq / (k * (k + nu))
        total = total + term
        if np.all(term <= BESSEL_REL_TOL * total):
            break
    else:
        raise RangeError("Bessel power series did not converge")
    logger.debug("bessel_i(nu=%s) converged after %d terms", nu, k)

    if nu < 0:
        total = np.where(at_zero, np.inf, total)
    return total if total.ndim else float(total)


def bell_partial(n: int, k: int, args: Sequence[float]) -> float:
    """
    Partial exponential Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}) via

        B_{m,j} = sum_{i=1}^{m-j+1} C(m-1, i-1) x_i B_{m-i,j-1}.
    """
    n, k = _check_order(n), _check_order(k)
    if n < 1 or not 1 <= k <= n:
        raise DomainError(f"Bell polynomial needs 1 <= k <= n, got n={n}, k={k}")
    xs = [float(v) for v in args]
    if len(xs) != n - k + 1:
        raise DomainError(f"B_{{{n},{k}}} takes {n - k + 1} arguments, got {len(xs)}")

    # table[m][j] = B_{m,j}
    table = [[0.0] * (k + 1) for _ in range(n + 1)]
    table[0][0] = 1.0
    for m in range(1, n + 1):
        for j in range(1, min(m, k) + 1):
            total = 0.0
            for i in range(1, m - j + 2):
                if i > len(xs):
                    break
                total += math.comb(m - 1, i - 1) * xs[i - 1] * table[m - i][j - 1]
            table[m][j] = total
    return table[n][k]


def bell_complete(n: int, args: Sequence[float]) -> float:
    """sum_{k=1}^{n} B_{n,k}(x_1, ..., x_{n-k+1}); 1 for n = 0."""
    n = _check_order(n)
    if n == 0:
        return 1.0
    xs = list(args)
    if len(xs) < n:
        raise DomainError(f"Complete Bell polynomial of order {n} needs {n} arguments")
    return sum(bell_partial(n, k, xs[: n - k + 1]) for k in range(1, n + 1))
