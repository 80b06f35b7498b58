"""
Experiment Service

One function per runner subcommand. Each takes a validated
ExperimentConfig and returns an ExperimentOutcome whose report holds the
CSV rows. Analytic experiments store their tolerance as std_error, so one
gate rule covers every row.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from ..base import ConfigurationError, CorrelationIndex, PartitionSpec, PolyIndex
from ..config import get_config
from ..dirichlet import (
    DirichletMeanSpec,
    mean_moments,
    sample_dirichlet_means,
    stieltjes_identity_gap,
)
from ..estimators import (
    CorrelationEntry,
    CorrelationReport,
    correlation_report,
    estimate_canonical_corr,
    factorization_gap,
    moment_match_report,
    orthogonality_scan,
)
from ..kernels import (
    BetaLaw,
    DegenerateConstant,
    DirectingKernel,
    bell_form_comparison,
    canonical_corr_exact,
    closed_form_laplace_ratio,
    extreme_joint_laplace,
    extreme_pair_density,
    get_kernel,
    joint_laplace_series,
    merge_corr,
    merged_cell_corr,
)
from ..samplers import (
    FiniteVectorLaw,
    PairBatch,
    algorithm_a1_batch,
    algorithm_a2_batch,
    algorithm_a3_batch,
    algorithm_a4_batch,
    derive_streams,
    dw_pair_batch,
    dw_z,
    sample_pair_general_batch,
)
from ..specfun import (
    laguerre_generating_function,
    laguerre_norm,
    laguerre_quadrature,
    laguerre_table,
)
from ..subordination import (
    SubordinatorSpec,
    markov_corr,
    poissonized_corr,
    poissonized_pair_batch,
    subordinated_pair_batch,
)
from .schemas import ExperimentConfig

logger = logging.getLogger(__name__)


@dataclass
class ExperimentOutcome:
    """Report of one run; ``expect_rejection`` inverts the verdict (a test meant to fail)."""
    experiment: str
    params: dict
    report: CorrelationReport
    expect_rejection: bool = False

    @property
    def passed(self) -> bool:
        return not self.report.passes if self.expect_rejection else self.report.passes


def _analytic(label: str, value: float, exact: float, tol: float, relative: bool = True) -> CorrelationEntry:
    scale = max(1.0, abs(exact)) if relative else 1.0
    return CorrelationEntry(label, float(value), float(exact), tol * scale)


def _partition(config: ExperimentConfig, default=(1.0,)) -> PartitionSpec:
    alphas = config.reals("alpha", list(default))
    total = config.real("c", None)
    return PartitionSpec(alphas=tuple(alphas), total_mass=total)


def _kernel(config: ExperimentConfig, part: PartitionSpec) -> DirectingKernel:
    name = config.choice("kernel", ("degenerate", "percell", "random", "common"))
    if name == "degenerate":
        kernel = get_kernel(name, z=config.real("z"))
    elif name == "percell":
        kernel = get_kernel(name, bases=config.bases("bases", part.dim))
    elif name == "random":
        law = config.z_law("law")
        points = config.integer("law_points", 0)
        if points and isinstance(law, BetaLaw):
            law = law.to_base(points)
        kernel = get_kernel(name, law=law)
    else:
        kernel = get_kernel(name, eta=config.real("eta"))
    return kernel.check(part)


def _indices(config: ExperimentConfig, dim: int) -> List[CorrelationIndex]:
    """--n list, or every index with 1 <= |n| <= --max-order."""
    if config.has("n"):
        return config.indices("n", dim)
    max_order = config.integer("max_order", 2)
    if max_order < 1:
        raise ConfigurationError(f"--max-order must be positive, got {max_order}")
    result = [
        CorrelationIndex(values)
        for values in itertools.product(range(max_order + 1), repeat=dim)
        if 1 <= sum(values) <= max_order
    ]
    return sorted(result, key=lambda n: (n.total, [-v for v in n.n]))


def _pooled_batch(config: ExperimentConfig, draw: Callable[[int, np.random.Generator], PairBatch]) -> PairBatch:
    """Split ``samples`` over --streams derived generators and pool the batches."""
    count = config.integer("streams", 1)
    if count < 1:
        raise ConfigurationError(f"--streams must be positive, got {count}")
    rngs = derive_streams(config.seed, count) if count > 1 else [np.random.default_rng(config.seed)]
    sizes = [config.samples // count + (k < config.samples % count) for k in range(count)]
    batch = None
    for size, rng in zip(sizes, rngs):
        if size == 0:
            continue
        part_batch = draw(size, rng)
        batch = part_batch if batch is None else batch.concat(part_batch)
    batch.seed = config.seed
    return batch


def run_orthogonality(config: ExperimentConfig) -> CorrelationReport:
    """Gauss quadrature Gram matrix of the monic Laguerre family, normalised by the norms."""
    alphas = config.reals("alpha", [0.5, 1.0, 2.5])
    max_degree = config.integer("max_degree", 10)
    nodes = config.integer("nodes", get_config().numerics.quadrature_nodes)
    if not 0 <= max_degree < nodes:
        raise ConfigurationError(f"--max-degree must lie in [0, {nodes - 1}] for {nodes} nodes")
    tol = get_config().tolerance("orthogonality")

    report = CorrelationReport(analytic=True)
    for alpha in alphas:
        points, weights = laguerre_quadrature(alpha, nodes)
        table = laguerre_table(max_degree, alpha, points)
        gram = (table * weights) @ table.T
        norms = np.sqrt([laguerre_norm(PolyIndex(n, alpha)) for n in range(max_degree + 1)])
        gram /= np.outer(norms, norms)
        for n in range(max_degree + 1):
            for m in range(max_degree + 1):
                report.entries.append(
                    _analytic(f"{n}|{m}@{alpha:g}", gram[n, m], float(n == m), tol, relative=False)
                )
    return report


def run_genfun_check(config: ExperimentConfig) -> CorrelationReport:
    """Truncated sum_n L~_n(x) r^n / n! against the closed-form generating function."""
    alpha = config.real("alpha", 1.0)
    xs = config.reals("x", [0.0, 0.5, 1.0, 2.0, 5.0])
    rs = config.reals("r", [-0.5, -0.2, 0.2, 0.5])
    terms = config.integer("terms", 80)
    tol = get_config().tolerance("genfun")

    table = laguerre_table(terms, alpha, np.asarray(xs, dtype=float))
    orders = np.arange(terms + 1)
    report = CorrelationReport(analytic=True)
    for r in rs:
        if r == 0:
            coeffs = (orders == 0).astype(float)
        else:
            coeffs = np.sign(r) ** orders * np.exp(orders * math.log(abs(r)) - gammaln(orders + 1))
        series = coeffs @ table
        for x, value in zip(xs, series):
            exact = laguerre_generating_function(alpha, x, r)
            report.entries.append(_analytic(f"x={x:g},r={r:g}", value, exact, tol))
    return report


def run_pair_corr(config: ExperimentConfig) -> CorrelationReport:
    """Monte Carlo canonical correlations of one pair sampler against their exact values."""
    sampler = config.choice("sampler", ("a1", "a2", "a3", "a4", "dw", "general"))

    if sampler == "a1":
        alpha = config.real("alpha")
        part = PartitionSpec(alphas=(alpha,))
        b = config.real("b")
        z = b / (1.0 + b)
        exact = lambda n: z ** n.total
        draw = lambda size, rng: algorithm_a1_batch(alpha, b, size, rng)
    elif sampler == "a2":
        part = _partition(config)
        vectors, weights = config.vectors("pstar", part.dim)
        pstar = FiniteVectorLaw(vectors, weights)
        zs = pstar.vectors / (1.0 + pstar.vectors)
        exact = lambda n: float(np.dot(pstar.weights, np.prod(zs ** np.asarray(n.n), axis=1)))
        draw = lambda size, rng: algorithm_a2_batch(part, pstar, size, rng)
    elif sampler == "a3":
        part = _partition(config)
        b = config.real("b")
        z = b / (1.0 + b)
        exact = lambda n: z ** n.total
        draw = lambda size, rng: algorithm_a3_batch(b, part, size, rng)
    elif sampler == "a4":
        part = _partition(config)
        pz = config.z_law("pz")
        points = config.integer("pz_points", 0)
        if points and isinstance(pz, BetaLaw):
            pz = pz.to_base(points)
        exact = lambda n: pz.moment(n.total)
        draw = lambda size, rng: algorithm_a4_batch(pz, part, size, rng)
    elif sampler == "dw":
        part = _partition(config)
        z = dw_z(config.real("t")) if config.has("t") else config.real("z")
        exact = lambda n: z ** n.total
        draw = lambda size, rng: dw_pair_batch(z, part, size, rng)
    else:
        part = _partition(config)
        kernel = _kernel(config, part)
        exact = lambda n: canonical_corr_exact(part, kernel, n)
        draw = lambda size, rng: sample_pair_general_batch(part, kernel, size, rng)

    batch = _pooled_batch(config, draw)
    report = correlation_report(batch, part, _indices(config, part.dim), exact)
    scan_degree = config.integer("scan_degree", 0)
    if scan_degree:
        report.extend(orthogonality_scan(batch, part, scan_degree))
    return report


def run_merge_check(config: ExperimentConfig) -> CorrelationReport:
    """Beta-binomial merge identity and the Bell-polynomial form of rho_n."""
    part = _partition(config, default=(1.0, 1.0))
    kernel = _kernel(config, part)
    i, j = config.integer("i", 0), config.integer("j", 1)
    max_n = config.integer("max_n", 6)
    tol = get_config().tolerance("merge")

    report = CorrelationReport(analytic=True)
    for n in range(1, max_n + 1):
        exact = merged_cell_corr(part, kernel, n, i, j)
        report.entries.append(_analytic(f"merge:{n}", merge_corr(part, kernel, n, i, j), exact, tol))

    for n in range(1, max_n + 1):
        index = [0] * part.dim
        index[i] = n
        index[j] = 1
        comparison = bell_form_comparison(part, kernel, index)
        label = CorrelationIndex(tuple(index)).label()
        logger.debug(
            "Bell form at %s: recursion %.17g, j! c m_j arguments %.17g", label, comparison.recursion, comparison.literal
        )
        report.entries.append(_analytic(f"bell:{label}", comparison.bell_form, comparison.recursion, tol))
    return report


def run_dirichlet_moments(config: ExperimentConfig) -> CorrelationReport:
    """Stick-breaking sample moments of a Dirichlet mean against the exact recursion."""
    spec = DirichletMeanSpec(theta=config.real("theta"), base=config.base("base"))
    n_max = config.integer("n_max", 5)
    eps = config.real("eps", None)
    exact = mean_moments(spec, n_max)
    draws = sample_dirichlet_means(spec, config.samples, eps, np.random.default_rng(config.seed))
    return moment_match_report(draws, exact, n_max, seed=config.seed)


def run_stieltjes_check(config: ExperimentConfig) -> CorrelationReport:
    """Monte Carlo E[(1 - lam M)^(-theta)] against exp(-theta E_G log(1 - lam s))."""
    spec = DirichletMeanSpec(theta=config.real("theta"), base=config.base("base"))
    report = CorrelationReport(sample_count=config.samples, seed=config.seed)
    for lam in config.reals("lam", [-1.0, -0.5, 0.5]):
        gap = stieltjes_identity_gap(spec, lam, samples=config.samples, seed=config.seed, eps=config.real("eps", None))
        report.entries.append(CorrelationEntry(f"lam={lam:g}", gap.lhs, gap.rhs, gap.std_error))
    return report


def _composite_legendre(upper: float, panels: int, nodes: int):
    base_x, base_w = leggauss(nodes)
    width = upper / panels
    starts = np.arange(panels) * width
    points = (starts[:, None] + (base_x[None, :] + 1.0) * width / 2.0).ravel()
    weights = np.tile(base_w * width / 2.0, panels)
    return points, weights


def run_density_check(config: ExperimentConfig) -> CorrelationReport:
    """Total mass and first canonical correlation of the extreme-pair density by quadrature."""
    alpha = config.real("alpha", 1.0)
    zs = config.reals("z", [0.2, 0.5, 0.8])
    numerics = get_config().numerics
    upper = config.real("upper", 40.0)
    panels = config.integer("panels", numerics.density_panels)
    nodes = config.integer("panel_nodes", numerics.density_panel_nodes)
    tol = get_config().tolerance("density")

    points, weights = _composite_legendre(upper, panels, nodes)
    xx, yy = np.meshgrid(points, points, indexing="ij")
    ww = np.outer(weights, weights)
    report = CorrelationReport(analytic=True)
    for z in zs:
        density = extreme_pair_density(xx, yy, z, alpha) * ww
        mass = density.sum()
        rho1 = np.sum(density * (xx - alpha) * (yy - alpha)) / alpha
        report.entries.append(_analytic(f"mass@{z:g}", mass, 1.0, tol, relative=False))
        report.entries.append(_analytic(f"rho1@{z:g}", rho1, z, tol, relative=False))
    return report


def run_laplace_ratio(config: ExperimentConfig) -> CorrelationReport:
    """Truncated Laplace-ratio series against closed forms (or a longer truncation)."""
    part = _partition(config)
    kernel = _kernel(config, part)
    s = config.reals("s", [0.5])
    t = config.reals("t", [0.5])
    s = s * part.dim if len(s) == 1 else s
    t = t * part.dim if len(t) == 1 else t
    trunc = config.integer("trunc", 120)
    tol = get_config().tolerance("laplace")

    series = joint_laplace_series(part, kernel, s, t, trunc)
    report = CorrelationReport(analytic=True)
    closed = closed_form_laplace_ratio(part, kernel, s, t)
    if closed is not None:
        report.entries.append(_analytic("series", series.value, closed, tol))
    else:
        longer = joint_laplace_series(part, kernel, s, t, min(2 * trunc, get_config().numerics.max_laplace_trunc))
        report.entries.append(
            CorrelationEntry("series", series.value, longer.value, max(series.tail_bound, tol * abs(longer.value)))
        )

    if isinstance(kernel, DegenerateConstant) and part.dim == 1:
        alpha = part.alphas[0]
        joint = extreme_joint_laplace(s[0], t[0], kernel.z, alpha)
        ratio = joint / ((1.0 + s[0]) ** (-alpha) * (1.0 + t[0]) ** (-alpha))
        report.entries.append(_analytic("extreme", series.value, ratio, tol))
    logger.debug("Laplace series tail bound %.3e at trunc %d", series.tail_bound, trunc)
    return report


def _subordinator(config: ExperimentConfig) -> SubordinatorSpec:
    rate = config.real("rate", 0.0)
    return SubordinatorSpec(
        drift=config.real("drift", 0.0),
        jump_rate=rate,
        jump_law=config.jump_law("jump") if rate > 0 else None,
    )


def run_subordinate(config: ExperimentConfig) -> ExperimentOutcome:
    """Subordinated DW pairs: correlations, chained steps, or CRM factorization."""
    mode = config.choice("mode", ("corr", "chain", "factorization"), "corr")
    spec = _subordinator(config)
    t = config.real("t", 1.0)
    part = _partition(config, default=(1.0, 1.0) if mode == "factorization" else (1.0,))

    if mode == "factorization":
        if part.dim < 2:
            raise ConfigurationError("Factorization needs at least two cells")
        default = "dependent" if spec.has_jumps else "factorize"
        expect = config.choice("expect", ("factorize", "dependent"), default)
        batch = _pooled_batch(config, lambda size, rng: subordinated_pair_batch(part, spec, t, size, rng))
        report = CorrelationReport(sample_count=batch.size, seed=config.seed)
        report.entries.append(factorization_gap(batch, part))
        return ExperimentOutcome("subordinate", config.describe(), report, expect_rejection=expect == "dependent")

    indices = config.indices("n", part.dim, [CorrelationIndex.unit(part.dim, 0, 1)])
    exact = lambda n: markov_corr(spec, n, t)
    if mode == "corr":
        batch = _pooled_batch(config, lambda size, rng: subordinated_pair_batch(part, spec, t, size, rng))
        return ExperimentOutcome("subordinate", config.describe(), correlation_report(batch, part, indices, exact))

    steps = config.integer("steps", 2)
    single_rng, chained_rng = derive_streams(config.seed, 2)
    single = subordinated_pair_batch(part, spec, t, config.samples, single_rng, seed=config.seed)
    chained = subordinated_pair_batch(part, spec, t, config.samples, chained_rng, seed=config.seed, steps=steps)
    report = CorrelationReport(sample_count=config.samples, seed=config.seed)
    for n in indices:
        est_single, se_single = estimate_canonical_corr(single, part, n)
        est_chained, se_chained = estimate_canonical_corr(chained, part, n)
        report.entries.append(
            CorrelationEntry(f"chain:{n.label()}", est_chained, est_single, math.hypot(se_single, se_chained))
        )
        report.entries.append(CorrelationEntry(f"single:{n.label()}", est_single, exact(n), se_single))
        report.entries.append(CorrelationEntry(f"chained:{n.label()}", est_chained, exact(n), se_chained))
    return ExperimentOutcome("subordinate", config.describe(), report)


def run_poisson_embed(config: ExperimentConfig) -> CorrelationReport:
    """DW chain run on a Poisson clock against exp(-gamma t (1 - z^n))."""
    part = _partition(config)
    gamma_rate = config.real("gamma", 1.0)
    z = config.real("z")
    t = config.real("t", 1.0)
    indices = config.indices("n", part.dim, [CorrelationIndex.unit(part.dim, 0, k) for k in (1, 2)])
    batch = _pooled_batch(config, lambda size, rng: poissonized_pair_batch(part, z, gamma_rate, t, size, rng))
    return correlation_report(batch, part, indices, lambda n: poissonized_corr(gamma_rate, z ** n.total, n.total, t))


EXPERIMENTS: Dict[str, Callable] = {
    "orthogonality": run_orthogonality,
    "genfun-check": run_genfun_check,
    "pair-corr": run_pair_corr,
    "merge-check": run_merge_check,
    "dirichlet-moments": run_dirichlet_moments,
    "stieltjes-check": run_stieltjes_check,
    "density-check": run_density_check,
    "laplace-ratio": run_laplace_ratio,
    "subordinate": run_subordinate,
    "poisson-embed": run_poisson_embed,
}


def run_experiment(config: ExperimentConfig) -> ExperimentOutcome:
    """Dispatch to the subcommand and wrap its report."""
    logger.info("Running %s with seed %d", config.subcommand, config.seed)
    result = EXPERIMENTS[config.subcommand](config)
    if isinstance(result, ExperimentOutcome):
        return result
    result.seed = config.seed
    if not result.analytic:
        result.sample_count = result.sample_count or config.samples
    return ExperimentOutcome(config.subcommand, config.describe(), result)
