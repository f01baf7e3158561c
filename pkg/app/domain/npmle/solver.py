"""
Nonparametric maximum likelihood for conditionally independent PSD mixtures.

The solver alternates gradient-directed support expansion (random draws from
the gradient-as-mixture, sharpened by Modal EM) with constrained-Newton weight
updates (simplex NNLS plus a halving line search), then prunes and merges the
support. Everything works on the distinct rows of the dataset with their
multiplicities.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize
from scipy.special import logsumexp
from scipy.stats import qmc

from app.config import settings
from app.domain.errors import DegenerateModelError, NonConvergenceError
from app.domain.families import kernels
from app.domain.families.schemas import DualKind, FamilyKind, PsdFamily
from app.domain.mixtures.model import component_log_pmf
from app.domain.mixtures.schemas import Dataset, MixingDistribution, MixturePmf
from app.domain.npmle.schemas import Certificate, DualProduct, FitOptions, FitResult, TraceEntry

logger = logging.getLogger(__name__)

# Beta draws are kept strictly inside the parameter space [0, 1).
_UPPER_OPEN = 1.0 - 1e-12


def _log_weights(weights: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(weights)


def _loglik(log_f: np.ndarray, counts: np.ndarray, weights: np.ndarray) -> float:
    log_pi = logsumexp(log_f + _log_weights(weights)[None, :], axis=1)
    if np.any(np.isneginf(log_pi)):
        return -math.inf
    return float(np.dot(counts, log_pi))


def _mixture_log_pi(log_f: np.ndarray, weights: np.ndarray, rows: np.ndarray, dataset_rows: Optional[np.ndarray] = None) -> np.ndarray:
    log_pi = logsumexp(log_f + _log_weights(weights)[None, :], axis=1)
    bad = np.flatnonzero(np.isneginf(log_pi))
    if bad.size:
        row = _first_row_index(rows[bad[0]], dataset_rows)
        raise DegenerateModelError(f"observation {rows[bad[0]].tolist()} has zero probability under the model", row=row)
    return log_pi


def _first_row_index(row: np.ndarray, dataset_rows: Optional[np.ndarray]) -> Optional[int]:
    if dataset_rows is None:
        return None
    return int(np.flatnonzero(np.all(dataset_rows == row, axis=1))[0])


def response_matrix(model: MixturePmf, dataset: Dataset) -> np.ndarray:
    """S_il = prod_j f_{theta_lj}(k_ij) / pi(k_i) for every dataset row."""
    rows = dataset.values
    log_f = component_log_pmf(model.family, model.mixing.support_array(), rows)
    log_pi = _mixture_log_pi(log_f, model.mixing.weight_array(), rows, rows)
    return np.exp(log_f - log_pi[:, None])


def _gradient_at(family: PsdFamily, thetas: np.ndarray, rows: np.ndarray, counts: np.ndarray,
                 log_pi: np.ndarray, chunk: int = 1000) -> np.ndarray:
    """d(theta; Q) = sum_i f_theta(k_i)/pi(k_i) - n for each row of thetas."""
    thetas = np.atleast_2d(thetas)
    n = counts.sum()
    values = np.empty(thetas.shape[0])
    for start in range(0, thetas.shape[0], chunk):
        block = thetas[start:start + chunk]
        ratio = np.exp(component_log_pmf(family, block, rows) - log_pi[:, None])
        values[start:start + chunk] = counts @ ratio - n
    return values


def gradient(model: MixturePmf, dataset: Dataset, theta) -> float:
    """Directional derivative of the log-likelihood at Q towards the point mass at theta."""
    rows, counts = dataset.unique()
    log_f = component_log_pmf(model.family, model.mixing.support_array(), rows)
    log_pi = _mixture_log_pi(log_f, model.mixing.weight_array(), rows, dataset.values)
    theta = np.asarray(theta, dtype=float).reshape(1, -1)
    return float(_gradient_at(model.family, theta, rows, counts, log_pi)[0])


def _nnls_objective(S: np.ndarray, counts: np.ndarray, p: np.ndarray) -> float:
    residual = S @ p - 2.0
    return float(np.dot(counts, residual * residual))


def _refine_on_active_set(A: np.ndarray, target: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Exact minimizer of ||A p - target|| with sum(p) = 1 on the support of p, if it stays positive."""
    active = np.flatnonzero(p > 0)
    k = active.size
    sub = A[:, active]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = 2.0 * sub.T @ sub
    kkt[:k, k] = kkt[k, :k] = 1.0
    rhs = np.concatenate([2.0 * sub.T @ target, [1.0]])
    solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
    if not np.all(solution > 0):
        return p
    refined = np.zeros_like(p)
    refined[active] = solution / solution.sum()
    return refined


def nnls_update(S: np.ndarray, p: np.ndarray, counts: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Solve min ||S p' - 2|| over the simplex (rows weighted by counts).

    The unity constraint is enforced through an extra heavily weighted row and
    the equality-constrained problem is then solved exactly on the resulting
    active set.
    """
    S = np.asarray(S, dtype=float)
    p = np.asarray(p, dtype=float)
    counts = np.ones(S.shape[0]) if counts is None else np.asarray(counts, dtype=float)
    m = S.shape[1]
    if m == 1:
        return np.ones(1)

    root = np.sqrt(counts)[:, None]
    A = np.vstack([root * S, np.ones((1, m))])
    gamma = 1e3 * np.max(np.abs(A))
    A[-1, :] = gamma
    target = np.concatenate([2.0 * root[:, 0], [gamma]])
    try:
        solution, _ = optimize.nnls(A, target, maxiter=10 * m)
    except RuntimeError as error:
        raise NonConvergenceError(f"NNLS did not converge within {10 * m} iterations", best=p.copy()) from error

    total = solution.sum()
    if not total > 0:
        logger.info("NNLS returned the zero vector; keeping the current weights")
        return p.copy()
    solution = _refine_on_active_set(root * S, 2.0 * root[:, 0], solution / total)
    if _nnls_objective(S, counts, solution) > _nnls_objective(S, counts, p) + 1e-10:
        logger.info("NNLS solution does not improve the quadratic objective; keeping the current weights")
        return p.copy()
    return solution


def _line_search(log_f: np.ndarray, counts: np.ndarray, p_old: np.ndarray, p_new: np.ndarray) -> np.ndarray:
    base = _loglik(log_f, counts, p_old)
    step = p_new - p_old
    if not np.any(step):
        return p_old.copy()
    for exponent in range(settings.LINE_SEARCH_MIN_EXPONENT + 1):
        s = 0.5 ** exponent
        candidate = np.clip(p_old + s * step, 0.0, None)
        candidate = candidate / candidate.sum()
        if _loglik(log_f, counts, candidate) > base:
            if exponent:
                logger.debug("line search accepted step 2^-%d", exponent)
            return candidate
    logger.info("line search found no improving step; keeping the previous weights")
    return p_old.copy()


def line_search(model: MixturePmf, dataset: Dataset, p_old, p_new) -> np.ndarray:
    """Largest s in {1, 1/2, ..., 2^-30} with l(p_old + s (p_new - p_old)) > l(p_old), else p_old."""
    rows, counts = dataset.unique()
    log_f = component_log_pmf(model.family, model.mixing.support_array(), rows)
    return _line_search(log_f, counts, np.asarray(p_old, dtype=float), np.asarray(p_new, dtype=float))


def dual_product(family: PsdFamily, rows: np.ndarray) -> Tuple[DualProduct, np.ndarray]:
    """Dual densities of every row and log prod_j c_{k_ij}."""
    a, b, log_c = kernels.dual_parameters(family, rows)
    kind = DualKind.GAMMA if family.kind == FamilyKind.POISSON else DualKind.BETA
    return DualProduct(kind=kind, a=a, b=b), log_c.sum(axis=1)


def default_candidate_cap(rows: np.ndarray) -> np.ndarray:
    """Per-coordinate Poisson cap: largest observation + 5 sqrt(largest observation + 1)."""
    top = rows.max(axis=0).astype(float)
    return top + 5.0 * np.sqrt(top + 1.0)


def _clip_candidates(family: PsdFamily, thetas: np.ndarray, cap) -> np.ndarray:
    if family.kind == FamilyKind.POISSON:
        return thetas if cap is None else np.minimum(thetas, cap)
    return np.minimum(thetas, _UPPER_OPEN)


def _selection_log_weights(family: PsdFamily, rows: np.ndarray, counts: np.ndarray, log_pi: np.ndarray):
    duals, log_c = dual_product(family, rows)
    return duals, np.log(counts) + log_c - log_pi


def selection_weights(model: MixturePmf, dataset: Dataset) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct rows and their probabilities of being picked by candidate_points."""
    rows, counts = dataset.unique()
    log_f = component_log_pmf(model.family, model.mixing.support_array(), rows)
    log_pi = _mixture_log_pi(log_f, model.mixing.weight_array(), rows, dataset.values)
    _, log_select = _selection_log_weights(model.family, rows, counts, log_pi)
    return rows, np.exp(log_select - logsumexp(log_select))


def _draw_from_duals(duals: DualProduct, log_select: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
    probabilities = np.exp(log_select - logsumexp(log_select))
    index = rng.choice(duals.size, size=size, p=probabilities / probabilities.sum())
    a = duals.a[index]
    if duals.kind == DualKind.GAMMA:
        return rng.gamma(a)
    return rng.beta(a, duals.b[index])


def candidate_points(model: MixturePmf, dataset: Dataset, rng: np.random.Generator, grid_size: int,
                     candidate_cap: Optional[float] = None) -> np.ndarray:
    """
    Draw grid_size points from the gradient function read as a mixture over theta.

    Row i is selected with probability proportional to (prod_j c_{k_ij}) / pi(k_i)
    and each coordinate is then drawn from its dual density.
    """
    d = model.d
    if grid_size <= 0:
        return np.empty((0, d))
    rows, counts = dataset.unique()
    log_f = component_log_pmf(model.family, model.mixing.support_array(), rows)
    log_pi = _mixture_log_pi(log_f, model.mixing.weight_array(), rows, dataset.values)
    duals, log_select = _selection_log_weights(model.family, rows, counts, log_pi)
    thetas = _draw_from_duals(duals, log_select, rng, grid_size)
    return _clip_candidates(model.family, thetas, candidate_cap)


def _dual_log_density(duals: DualProduct, thetas: np.ndarray) -> np.ndarray:
    """(t, u) matrix of log prod_j g_{k_uj}(theta_tj)."""
    values = kernels.dual_logpdf(duals.kind, duals.a[None, :, :], duals.b[None, :, :], thetas[:, None, :])
    return np.sum(values, axis=-1)


def modal_em(weights, duals: DualProduct, start, iters: int):
    """
    Modal EM ascent of theta -> sum_i w_i g_i(theta) from one start or a batch of starts.

    Returns (theta, ok); ok is False for starts outside the support of every
    component, which are returned unchanged.
    """
    log_w = _log_weights(np.asarray(weights, dtype=float))
    start = np.asarray(start, dtype=float)
    single = start.ndim == 1
    thetas = np.atleast_2d(start).copy()
    ok = np.ones(thetas.shape[0], dtype=bool)
    excess = duals.a - 1.0  # k_ij

    for _ in range(iters):
        with np.errstate(divide="ignore", invalid="ignore"):
            log_r = log_w[None, :] + _dual_log_density(duals, thetas)
        log_r = np.where(np.isnan(log_r), -np.inf, log_r)
        total = logsumexp(log_r, axis=1)
        live = ok & np.isfinite(total)
        ok &= live
        if not np.any(live):
            break
        r = np.exp(log_r[live] - total[live, None])
        if duals.kind == DualKind.GAMMA:
            updated = r @ excess
        else:
            updated = (r @ excess) / (r @ (excess + duals.b - 1.0))
        change = np.max(np.abs(updated - thetas[live])) if updated.size else 0.0
        thetas[live] = updated
        if change < 1e-13:
            break

    if np.any(~ok):
        logger.debug("modal EM: %d start(s) outside every dual support", int(np.sum(~ok)))
        thetas[~ok] = np.atleast_2d(start)[~ok]
    if single:
        return thetas[0], bool(ok[0])
    return thetas, ok


def select_candidates(modes, gradients, current_support, merge_radius: float = 0.0) -> np.ndarray:
    """
    Keep, per Voronoi cell of the current support, the mode with the largest positive gradient.
    """
    modes = np.atleast_2d(np.asarray(modes, dtype=float))
    gradients = np.asarray(gradients, dtype=float)
    support = np.atleast_2d(np.asarray(current_support, dtype=float))
    if gradients.size == 0:
        return np.empty((0, support.shape[1]))

    distances = np.linalg.norm(modes[:, None, :] - support[None, :, :], axis=-1)
    cell = np.argmin(distances, axis=1)
    survivors = []
    for label in np.unique(cell):
        members = np.flatnonzero(cell == label)
        best = members[np.argmax(gradients[members])]
        if gradients[best] > 0:
            survivors.append(best)

    survivors.sort(key=lambda i: -gradients[i])
    kept: List[int] = []
    for i in survivors:
        if all(np.max(np.abs(modes[i] - modes[j])) > merge_radius for j in kept):
            kept.append(i)
    return modes[kept] if kept else np.empty((0, support.shape[1]))


def _prune_arrays(support: np.ndarray, weights: np.ndarray, prune_tol: float, merge_radius: float):
    keep = np.flatnonzero(weights >= prune_tol)
    if keep.size == 0:
        keep = np.array([int(np.argmax(weights))])
    support, weights = support[keep], weights[keep]

    order = np.argsort(-weights, kind="stable")
    anchors: List[np.ndarray] = []
    locations: List[np.ndarray] = []
    masses: List[float] = []
    for i in order:
        for c, anchor in enumerate(anchors):
            if np.max(np.abs(support[i] - anchor)) <= merge_radius:
                total = masses[c] + weights[i]
                locations[c] = (masses[c] * locations[c] + weights[i] * support[i]) / total
                masses[c] = total
                break
        else:
            anchors.append(support[i])
            locations.append(support[i].copy())
            masses.append(float(weights[i]))
    masses = np.asarray(masses)
    return np.vstack(locations), masses / masses.sum()


def prune_and_merge(mixing: MixingDistribution, prune_tol: float, merge_radius: float) -> MixingDistribution:
    """Drop weights below prune_tol and coalesce points closer than merge_radius (sup-norm)."""
    support, weights = _prune_arrays(mixing.support_array(), mixing.weight_array(), prune_tol, merge_radius)
    return MixingDistribution.from_arrays(support, weights)


def moment_map(family: PsdFamily, values: np.ndarray) -> np.ndarray:
    """Parameter whose marginal mean equals the given mean (single-observation MLE for integers)."""
    values = np.asarray(values, dtype=float)
    if family.kind == FamilyKind.POISSON:
        return values
    if family.kind == FamilyKind.GEOMETRIC:
        return values / (values + 1.0)
    return values / (values + family.v)


def _em_step(family: PsdFamily, support: np.ndarray, weights: np.ndarray, rows: np.ndarray, counts: np.ndarray):
    log_f = component_log_pmf(family, support, rows)
    log_joint = log_f + _log_weights(weights)[None, :]
    responsibilities = np.exp(log_joint - logsumexp(log_joint, axis=1)[:, None]) * counts[:, None]
    mass = responsibilities.sum(axis=0)
    new_weights = mass / counts.sum()
    live = mass > 0
    new_support = support.copy()
    means = (responsibilities[:, live].T @ rows) / mass[live, None]
    new_support[live] = moment_map(family, means)
    return new_support, new_weights / new_weights.sum()


def em_polish(model: MixturePmf, dataset: Dataset, iters: int) -> MixturePmf:
    """Standard EM steps on weights and support coordinates."""
    if iters <= 0:
        return model
    rows, counts = dataset.unique()
    support, weights = model.mixing.support_array(), model.mixing.weight_array()
    for _ in range(iters):
        support, weights = _em_step(model.family, support, weights, rows, counts)
    return MixturePmf(family=model.family, mixing=MixingDistribution.from_arrays(support, weights))


class _Problem:
    """Distinct rows of a dataset with the per-fit constants the solver reuses."""

    def __init__(self, dataset: Dataset, family: PsdFamily, options: FitOptions):
        self.dataset = dataset
        self.family = family
        self.rows, self.counts = dataset.unique()
        self.n = float(dataset.n)
        self.duals, self.log_c = dual_product(family, self.rows)
        if family.kind == FamilyKind.POISSON:
            self.cap = options.candidate_cap if options.candidate_cap is not None else default_candidate_cap(self.rows)
        else:
            self.cap = None
        if options.merge_radius is not None:
            self.merge_radius = options.merge_radius
        else:
            largest = float(np.max(moment_map(family, self.rows.max(axis=0))))
            self.merge_radius = settings.MERGE_RADIUS_SCALE * (1.0 + largest)

    def log_f(self, support: np.ndarray) -> np.ndarray:
        return component_log_pmf(self.family, support, self.rows)

    def loglik(self, support: np.ndarray, weights: np.ndarray) -> float:
        return _loglik(self.log_f(support), self.counts, weights)


def _initial_support(problem: _Problem, rng: np.random.Generator) -> np.ndarray:
    u = problem.rows.shape[0]
    size = min(settings.INIT_SUPPORT_SIZE, u)
    chosen = np.sort(rng.choice(u, size=size, replace=False))
    support = moment_map(problem.family, problem.rows[chosen])
    log_f = problem.log_f(support)
    if np.any(np.isneginf(logsumexp(log_f, axis=1))):
        # a zero parameter in some coordinate cannot explain positive counts there
        centre = moment_map(problem.family, (problem.counts @ problem.rows) / problem.n)
        support = np.vstack([support, centre])
    return support


def _propose(problem: _Problem, support: np.ndarray, log_pi: np.ndarray, rng: np.random.Generator,
             options: FitOptions):
    """Modal EM from random draws of the gradient mixture and from every current support point."""
    log_select = np.log(problem.counts) + problem.log_c - log_pi
    draws = _clip_candidates(problem.family, _draw_from_duals(problem.duals, log_select, rng, options.grid_size), problem.cap)
    starts = np.vstack([draws, support])
    modes, ok = modal_em(np.exp(log_select - logsumexp(log_select)), problem.duals, starts, options.modal_em_iters)
    modes = _clip_candidates(problem.family, modes[ok], problem.cap)
    return modes, _gradient_at(problem.family, modes, problem.rows, problem.counts, log_pi)


def _polish(problem: _Problem, support: np.ndarray, weights: np.ndarray, log_f: np.ndarray, loglik: float,
            min_iters: int, max_iters: int):
    """
    EM steps on support and weights: at least min_iters, then until a step gains
    less than EM_POLISH_TOL * n. A step that lowers the log-likelihood is discarded.
    """
    tol = settings.EM_POLISH_TOL * problem.n
    for step in range(max_iters):
        new_support, new_weights = _em_step(problem.family, support, weights, problem.rows, problem.counts)
        new_log_f = problem.log_f(new_support)
        new_loglik = _loglik(new_log_f, problem.counts, new_weights)
        if not new_loglik >= loglik:
            break
        gain = new_loglik - loglik
        support, weights, log_f, loglik = new_support, new_weights, new_log_f, new_loglik
        if step + 1 >= min_iters and gain < tol:
            break
    live = weights > 0
    if not np.all(live):
        support, weights, log_f = support[live], weights[live] / weights[live].sum(), log_f[:, live]
    return support, weights, log_f, loglik


def _stagnated(trace: List[TraceEntry], n: float) -> bool:
    window = settings.STAGNATION_WINDOW
    if len(trace) <= window:
        return False
    return trace[-1].loglik - trace[-1 - window].loglik < settings.STAGNATION_TOL * n


def fit(dataset: Dataset, family: PsdFamily, options: Optional[FitOptions] = None) -> FitResult:
    """Nonparametric MLE of the mixing distribution; deterministic given options.seed."""
    options = options or FitOptions()
    problem = _Problem(dataset, family, options)
    rng = np.random.default_rng(options.seed)

    support = _initial_support(problem, rng)
    weights = np.full(support.shape[0], 1.0 / support.shape[0])
    log_f = problem.log_f(support)
    loglik = _loglik(log_f, problem.counts, weights)
    trace = [TraceEntry(loglik=loglik, support_size=support.shape[0])]
    converged = False
    sup_gradient = math.inf
    iteration = 0

    for iteration in range(options.max_outer_iters + 1):
        log_pi = logsumexp(log_f + _log_weights(weights)[None, :], axis=1)
        modes, mode_gradients = _propose(problem, support, log_pi, rng, options)
        support_gradients = _gradient_at(family, support, problem.rows, problem.counts, log_pi)
        sup_gradient = float(np.max(np.concatenate([mode_gradients, support_gradients]))) / problem.n
        logger.debug("iteration %d: loglik=%.10g support=%d sup gradient/n=%.3g",
                     iteration, loglik, support.shape[0], sup_gradient)
        if sup_gradient <= options.grad_tol:
            converged = True
            break
        if iteration == options.max_outer_iters:
            break
        if _stagnated(trace, problem.n):
            # a long EM run decides whether the likelihood has really stopped improving
            before = loglik
            if options.em_polish_iters:
                support, weights, log_f, loglik = _polish(problem, support, weights, log_f, loglik,
                                                          1, settings.REFINE_ITERS)
            if loglik - before < settings.STAGNATION_TOL * problem.n:
                break
            logger.debug("refinement gained %.3g after stagnation", loglik - before)
            trace.append(TraceEntry(loglik=loglik, support_size=support.shape[0]))
            continue

        fresh = select_candidates(modes, mode_gradients, support, problem.merge_radius)
        if fresh.shape[0]:
            support = np.vstack([support, fresh])
            weights = np.concatenate([weights, np.zeros(fresh.shape[0])])
            log_f = np.hstack([log_f, problem.log_f(fresh)])

        S = np.exp(log_f - log_pi[:, None])
        try:
            proposal = nnls_update(S, weights, problem.counts)
        except NonConvergenceError as error:
            logger.warning("%s; keeping the current weights", error)
            proposal = weights
        weights = _line_search(log_f, problem.counts, weights, proposal)
        loglik = _loglik(log_f, problem.counts, weights)

        pruned_support, pruned_weights = _prune_arrays(support, weights, options.prune_tol, problem.merge_radius)
        pruned_log_f = problem.log_f(pruned_support)
        pruned_loglik = _loglik(pruned_log_f, problem.counts, pruned_weights)
        if pruned_loglik >= loglik:
            support, weights, log_f, loglik = pruned_support, pruned_weights, pruned_log_f, pruned_loglik
        else:
            logger.info("prune lowered the log-likelihood by %.3g; reverted", loglik - pruned_loglik)
            live = weights > 0
            support, weights, log_f = support[live], weights[live] / weights[live].sum(), log_f[:, live]
            loglik = max(loglik, _loglik(log_f, problem.counts, weights))

        if options.em_polish_iters:
            support, weights, log_f, loglik = _polish(problem, support, weights, log_f, loglik, options.em_polish_iters,
                                                      max(options.em_polish_iters, settings.EM_POLISH_MAX_ITERS))

        trace.append(TraceEntry(loglik=loglik, support_size=support.shape[0]))

    if not converged:
        logger.warning("fit stopped after %d iterations with sup gradient/n = %.3g", iteration, sup_gradient)

    mixing = MixingDistribution.from_arrays(support, weights)
    return FitResult(
        model=MixturePmf(family=family, mixing=mixing),
        loglik=loglik,
        sup_gradient_normalized=sup_gradient,
        outer_iters=iteration,
        converged=converged,
        trace=trace,
        seed=options.seed,
        options=options,
    )


def certify(model: MixturePmf, dataset: Dataset, n_points: Optional[int] = None, seed: int = 0,
            cap: Optional[float] = None, prune_tol: Optional[float] = None) -> Certificate:
    """
    Largest normalized gradient over a scrambled Sobol grid of the parameter box
    and largest |gradient|/n over support points with weight above 10 prune_tol.
    """
    n_points = settings.CERTIFY_POINTS if n_points is None else n_points
    prune_tol = settings.PRUNE_TOL if prune_tol is None else prune_tol
    rows, counts = dataset.unique()
    n = float(dataset.n)
    log_f = component_log_pmf(model.family, model.mixing.support_array(), rows)
    log_pi = _mixture_log_pi(log_f, model.mixing.weight_array(), rows, dataset.values)

    if model.family.kind == FamilyKind.POISSON:
        upper = np.full(model.d, cap) if cap is not None else default_candidate_cap(rows)
    else:
        upper = np.full(model.d, _UPPER_OPEN)
    sampler = qmc.Sobol(d=model.d, scramble=True, seed=seed)
    grid = sampler.random_base2(max(0, math.ceil(math.log2(max(n_points, 1)))))[:n_points] * upper
    grid_sup = float(np.max(_gradient_at(model.family, grid, rows, counts, log_pi))) / n

    heavy = model.mixing.weight_array() > 10 * prune_tol
    support = model.mixing.support_array()[heavy]
    support_sup = float(np.max(np.abs(_gradient_at(model.family, support, rows, counts, log_pi)))) / n
    return Certificate(grid_sup=grid_sup, support_sup=support_sup, n_points=n_points)
