"""Non-uniform QoS power allocation for inter-network cooperation.

Users have their own outage targets and rates.  With the high-SNR outage
approximations the power-minimisation problem in the normalised SNRs
z = (z1, z2) reads

    max  -rho1 z1 - rho2 z2
    s.t. g1 = 2 P1 z1 z2 - 2 (1 - alpha) z2 - alpha >= 0
         g2 = 2 P2 beta^2 z1 z2 - 2 (1 - alpha) beta^2 z1 - alpha >= 0
         1/z1 + 1/z2 < sqrt(2 delta) * min(1, beta),  1/zi < sqrt(2 delta)

where Pi are the outage targets, alpha the joint exchange-success
probability and beta the ratio of the users' cellular SNR thresholds.  The
feasible set is not convex; candidates come from the first-order KKT system
and are screened with the second-order condition, and an exhaustive search
serves as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from greenlink.outage import decoding_state_probs, outage_internetwork_user
from greenlink.power import (
    BatteryModel,
    EnergyReport,
    PowerAllocation,
    exchange_powers,
    scheme_total_energy,
    solve_power_single_link,
)
from greenlink.radio import free_space_gain
from greenlink.scenario import Scenario, Scheme

ACTIVE_SETS = (("c1", "c2"), ("c1",), ("c2",))
N_STARTS = 8
DEDUP_RTOL = 1e-8
CORRECTION_RTOL = 0.05


class InfeasibleProblem(RuntimeError):
    def __init__(self, constraint, message):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint


@dataclass(frozen=True)
class NonUniformProblem:
    rho1: float
    rho2: float
    alpha: float
    beta: float
    pout1: float
    pout2: float
    delta: float
    k1: float = 1.0
    k2: float = 1.0
    thr1: float = 1.0
    thr2: float = 1.0

    def __post_init__(self):
        if not (self.rho1 > 0 and self.rho2 > 0):
            raise ValueError("rho1 and rho2 must be > 0")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not self.beta > 0:
            raise ValueError("beta must be > 0")
        if not self.delta > 0:
            raise ValueError("delta must be > 0")
        for name in ("pout1", "pout2"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")

    # constraint pieces, written so that vectorised numpy input also works
    def g1(self, z1, z2):
        return 2.0 * self.pout1 * z1 * z2 - 2.0 * (1.0 - self.alpha) * z2 - self.alpha

    def g2(self, z1, z2):
        b2 = self.beta * self.beta
        return 2.0 * self.pout2 * b2 * z1 * z2 - 2.0 * (1.0 - self.alpha) * b2 * z1 - self.alpha

    def grad_g1(self, z1, z2):
        return np.array([2.0 * self.pout1 * z2, 2.0 * self.pout1 * z1 - 2.0 * (1.0 - self.alpha)])

    def grad_g2(self, z1, z2):
        b2 = self.beta * self.beta
        return np.array([2.0 * self.pout2 * b2 * z2 - 2.0 * (1.0 - self.alpha) * b2, 2.0 * self.pout2 * b2 * z1])

    def objective(self, z1, z2):
        return -self.rho1 * z1 - self.rho2 * z2

    @property
    def sum_bound(self) -> float:
        return math.sqrt(2.0 * self.delta) * min(1.0, self.beta)

    @property
    def single_bound(self) -> float:
        return math.sqrt(2.0 * self.delta)

    @property
    def z_floor(self) -> float:
        """Smallest z allowed by the per-variable domain bound."""
        return 1.0 / self.single_bound

    def in_domain(self, z1, z2):
        inv1, inv2 = 1.0 / z1, 1.0 / z2
        return (
            (z1 > 0)
            & (z2 > 0)
            & (inv1 + inv2 < self.sum_bound)
            & (inv1 < self.single_bound)
            & (inv2 < self.single_bound)
        )

    def feasible(self, z1, z2, tol=0.0):
        return (self.g1(z1, z2) >= -tol) & (self.g2(z1, z2) >= -tol) & self.in_domain(z1, z2)

    def violated(self, z1, z2) -> list[str]:
        out = []
        if not self.g1(z1, z2) >= 0:
            out.append("constraint1")
        if not self.g2(z1, z2) >= 0:
            out.append("constraint2")
        if not self.in_domain(z1, z2):
            out.append("domain")
        return out


@dataclass(frozen=True)
class KktCandidate:
    z1: float
    z2: float
    mu1: float
    mu2: float
    active_set: tuple
    objective: float
    is_local_max: bool
    feasible: bool
    slackness: float = 0.0

    def sort_key(self):
        return (-self.objective, self.z1, self.z2)


def cellular_gain(scenario: Scenario, user: int) -> float:
    """K_i: free-space gain of user i's uplink including both antenna gains."""
    t = scenario.topology
    d, g = (t.d_1b, t.g_u1) if user == 1 else (t.d_2b, t.g_u2)
    return free_space_gain(scenario.cellular, d, g, t.g_bs)


def build_problem(scenario: Scenario, delta: float = 0.005, p2_threshold: str = "r1") -> NonUniformProblem:
    """Problem coefficients for ``scenario``'s non-uniform QoS.

    ``p2_threshold="r1"`` normalises user 2's power with user 1's rate,
    as in the definition of z2; ``"r2"`` uses user 2's own rate instead
    (sensitivity variant).
    """
    if p2_threshold not in ("r1", "r2"):
        raise ValueError("p2_threshold must be 'r1' or 'r2'")
    qos = scenario.qos
    r1 = qos.rate1
    r2_norm = r1 if p2_threshold == "r1" else qos.rate2
    thr1 = scenario.cellular_threshold(1, Scheme.INTER)
    thr2 = scenario.cellular_threshold(2, Scheme.INTER)
    alpha, _ = decoding_state_probs(qos.pout12, qos.pout21)
    return NonUniformProblem(
        rho1=scenario.cellular_coefficient(1, Scheme.INTER, rate=r1),
        rho2=scenario.cellular_coefficient(2, Scheme.INTER, rate=r2_norm),
        alpha=alpha,
        beta=thr1 / thr2,
        pout1=qos.pout1,
        pout2=qos.pout2,
        delta=delta,
        k1=cellular_gain(scenario, 1),
        k2=cellular_gain(scenario, 2),
        thr1=thr1,
        thr2=thr2,
    )


# -- KKT enumeration ------------------------------------------------------------


def _residual(problem, active, x):
    z1, z2, mu1, mu2 = x
    gg1 = problem.grad_g1(z1, z2)
    gg2 = problem.grad_g2(z1, z2)
    station = np.array([-problem.rho1, -problem.rho2]) + mu1 * gg1 + mu2 * gg2
    r3 = problem.g1(z1, z2) if "c1" in active else mu1
    r4 = problem.g2(z1, z2) if "c2" in active else mu2
    return np.array([station[0], station[1], r3, r4])


def _jacobian(problem, active, x):
    z1, z2, mu1, mu2 = x
    p1, p2 = problem.pout1, problem.pout2
    b2 = problem.beta**2
    h = 2.0 * (p1 * mu1 + p2 * b2 * mu2)
    gg1 = problem.grad_g1(z1, z2)
    gg2 = problem.grad_g2(z1, z2)
    jac = np.zeros((4, 4))
    jac[0, :] = [0.0, h, gg1[0], gg2[0]]
    jac[1, :] = [h, 0.0, gg1[1], gg2[1]]
    jac[2, :] = [gg1[0], gg1[1], 0.0, 0.0] if "c1" in active else [0.0, 0.0, 1.0, 0.0]
    jac[3, :] = [gg2[0], gg2[1], 0.0, 0.0] if "c2" in active else [0.0, 0.0, 0.0, 1.0]
    return jac


def _initial_multipliers(problem, active, z1, z2):
    cols = []
    if "c1" in active:
        cols.append(problem.grad_g1(z1, z2))
    if "c2" in active:
        cols.append(problem.grad_g2(z1, z2))
    a = np.column_stack(cols)
    sol, *_ = np.linalg.lstsq(a, np.array([problem.rho1, problem.rho2]), rcond=None)
    mu = [0.0, 0.0]
    it = iter(sol)
    if "c1" in active:
        mu[0] = float(next(it))
    if "c2" in active:
        mu[1] = float(next(it))
    return mu


def _damped_newton(problem, active, x0, max_iter=200):
    x = np.asarray(x0, dtype=float)
    f = _residual(problem, active, x)
    norm = np.linalg.norm(f)
    for _ in range(max_iter):
        try:
            step = np.linalg.solve(_jacobian(problem, active, x), -f)
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t > 1e-12:
            trial = x + t * step
            if trial[0] > 0 and trial[1] > 0:
                f_trial = _residual(problem, active, trial)
                n_trial = np.linalg.norm(f_trial)
                if n_trial < norm or n_trial == 0.0:
                    break
            t *= 0.5
        else:
            break
        converged = np.all(np.abs(trial - x) <= 1e-15 * np.maximum(np.abs(x), 1e-300))
        x, f, norm = trial, f_trial, n_trial
        if converged or norm == 0.0:
            break
    if not np.all(np.isfinite(x)):
        return None
    return x


def _start_points(problem):
    lo = problem.z_floor
    hi = max(lo * 10.0, 10.0 * (1.0 - problem.alpha + 1e-3) / min(problem.pout1, problem.pout2))
    return np.geomspace(lo, hi, N_STARTS)


def check_second_order(candidate: KktCandidate, problem: NonUniformProblem) -> bool:
    """Second-order sufficiency for a strict local maximum.

    The Lagrangian Hessian has a zero diagonal; it must be negative definite
    on the null space of the active-constraint Jacobian.  An empty tangent
    space (two independent active constraints in 2D) passes vacuously.
    """
    z1, z2 = candidate.z1, candidate.z2
    h = 2.0 * (problem.pout1 * candidate.mu1 + problem.pout2 * problem.beta**2 * candidate.mu2)
    hess = np.array([[0.0, h], [h, 0.0]])
    rows = []
    if "c1" in candidate.active_set:
        rows.append(problem.grad_g1(z1, z2))
    if "c2" in candidate.active_set:
        rows.append(problem.grad_g2(z1, z2))
    if rows:
        a = np.vstack(rows)
        _, s, vt = np.linalg.svd(a)
        rank = int(np.sum(s > 1e-12 * max(s.max(), 1e-300)))
        basis = vt[rank:].T
    else:
        basis = np.eye(2)
    if basis.shape[1] == 0:
        return True
    reduced = basis.T @ hess @ basis
    return bool(np.all(np.linalg.eigvalsh(reduced) < 0.0))


def _make_candidate(problem, active, x):
    z1, z2, mu1, mu2 = (float(v) for v in x)
    slack = max(abs(mu1 * problem.g1(z1, z2)), abs(mu2 * problem.g2(z1, z2)))
    cand = KktCandidate(
        z1=z1,
        z2=z2,
        mu1=mu1,
        mu2=mu2,
        active_set=tuple(active),
        objective=problem.objective(z1, z2),
        is_local_max=False,
        feasible=bool(problem.feasible(z1, z2, tol=1e-9)),
        slackness=slack,
    )
    return KktCandidate(**{**cand.__dict__, "is_local_max": check_second_order(cand, problem)})


def _polish_active(problem, active, x):
    """Snap active constraints to exactly zero by one-dimensional Newton on z."""
    z1, z2 = x[0], x[1]
    if active == ("c1",):
        # g1 = 0 is linear in z1 for fixed z2
        z1 = (problem.alpha + 2.0 * (1.0 - problem.alpha) * z2) / (2.0 * problem.pout1 * z2)
    elif active == ("c2",):
        b2 = problem.beta**2
        z2 = (problem.alpha + 2.0 * (1.0 - problem.alpha) * b2 * z1) / (2.0 * problem.pout2 * b2 * z1)
    return np.array([z1, z2, x[2], x[3]])


def enumerate_kkt_candidates(problem: NonUniformProblem) -> list[KktCandidate]:
    """First-order KKT points over the active sets {c1, c2}, {c1}, {c2}.

    Damped Newton from several log-spaced starts per active set; roots are
    deduplicated and screened for positivity, non-negative multipliers,
    feasibility and the approximation domain.  Returned sorted by objective
    (best first).  An empty list means no KKT point in the domain.
    """
    found = []
    for active in ACTIVE_SETS:
        for z0 in _start_points(problem):
            z1_0, z2_0 = z0, z0
            mu = _initial_multipliers(problem, active, z1_0, z2_0)
            x = _damped_newton(problem, active, [z1_0, z2_0, mu[0], mu[1]])
            if x is None:
                continue
            if np.linalg.norm(_residual(problem, active, x)) > 1e-8 * max(problem.rho1, problem.rho2, 1.0):
                continue
            x = _polish_active(problem, active, x)
            if any(
                a == active and np.all(np.abs(np.array([y[0], y[1]]) - x[:2]) <= DEDUP_RTOL * np.abs(x[:2]))
                for a, y in found
            ):
                continue
            found.append((active, x))

    out = []
    for active, x in found:
        z1, z2, mu1, mu2 = x
        if not (z1 > 0 and z2 > 0):
            continue
        if mu1 < 0 or mu2 < 0:
            continue
        cand = _make_candidate(problem, active, x)
        if not cand.feasible:
            continue
        out.append(cand)
    out.sort(key=KktCandidate.sort_key)
    return out


def best_kkt_candidate(problem: NonUniformProblem) -> KktCandidate | None:
    maxima = [c for c in enumerate_kkt_candidates(problem) if c.is_local_max]
    return maxima[0] if maxima else None


# -- exhaustive search ------------------------------------------------------------


def _reference_point(problem):
    """A feasible point on the ray z1 = z2, found by doubling."""
    t = problem.z_floor * 1.01
    for _ in range(200):
        if problem.feasible(t, t):
            return t, t
        t *= 2.0
    raise InfeasibleProblem(problem.violated(t, t)[0], "no feasible point found along z1 = z2")


def _min_feasible_z1(problem, z2, z1_hi, iters=80):
    """Smallest feasible z1 for each z2 (vectorised bisection).

    For fixed z2 every constraint is monotone in z1 once z2 exceeds
    2 (1 - alpha) / (2 P2), so feasibility is an up-set in z1.  Entries with
    no feasible z1 below ``z1_hi`` come back as NaN.
    """
    z2 = np.asarray(z2, dtype=float)
    hi = np.full_like(z2, z1_hi)
    ok_hi = problem.feasible(hi, z2)
    lo = np.full_like(z2, problem.z_floor)
    for _ in range(iters):
        mid = np.sqrt(lo * hi)
        ok = problem.feasible(mid, z2)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    # finish with arithmetic midpoints for full relative precision
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ok = problem.feasible(mid, z2)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return np.where(ok_hi, hi, np.nan)


def exhaustive_search(problem: NonUniformProblem, grid_resolution: int = 400, refine_tol: float = 1e-8):
    """Grid search over the box the constraints imply, then a refinement.

    The box runs from the domain floor to J_ref / rho_i, where J_ref is the
    cost of a feasible point; no better point can lie outside it.  A
    logarithmic grid with ``grid_resolution`` points per axis locates the
    best feasible cell; refinement then optimises along z2 with z1 held at
    its smallest feasible value, zooming until the objective changes by
    less than ``refine_tol`` (relative).  Returns (z1, z2, objective).
    """
    if grid_resolution < 100:
        raise ValueError("grid_resolution must be >= 100")
    r1, r2 = _reference_point(problem)
    j_ref = problem.rho1 * r1 + problem.rho2 * r2
    lo = problem.z_floor
    z1_axis = np.geomspace(lo, max(j_ref / problem.rho1, lo * 1.0001), grid_resolution)
    z2_axis = np.geomspace(lo, max(j_ref / problem.rho2, lo * 1.0001), grid_resolution)

    best = (-math.inf, None, None)
    chunk = max(1, 2_000_000 // grid_resolution)
    for start in range(0, grid_resolution, chunk):
        z2 = z2_axis[start : start + chunk, None]
        z1 = z1_axis[None, :]
        obj = np.where(problem.feasible(z1, z2), problem.objective(z1, z2), -np.inf)
        k = np.unravel_index(np.argmax(obj), obj.shape)
        if obj[k] > best[0]:
            best = (float(obj[k]), float(z1_axis[k[1]]), float(z2_axis[start + k[0]]))
    if best[1] is None:
        raise InfeasibleProblem(problem.violated(r1, r2)[0] if problem.violated(r1, r2) else "grid", "no feasible grid point")

    # Refinement along z2 with z1 at its smallest feasible value.  The grid
    # snaps z1 upward, so the grid's best z2 can sit many cells away from the
    # optimum; the reduced objective is first scanned over the whole z2 axis.
    z1_cap = j_ref / problem.rho1 * 1.5
    z1_best, z2_best, f_best = best[1], best[2], best[0]
    z2 = z2_axis
    for _ in range(200):
        z1 = _min_feasible_z1(problem, z2, z1_cap)
        obj = np.where(np.isnan(z1), -np.inf, problem.objective(np.nan_to_num(z1), z2))
        k = int(np.argmax(obj))
        f_new = float(obj[k])
        change = math.inf
        if f_new >= f_best:
            change = abs(f_new - f_best) / abs(f_new)
            z1_best, z2_best, f_best = float(z1[k]), float(z2[k]), f_new
        a = z2[max(k - 1, 0)]
        b = z2[min(k + 1, len(z2) - 1)]
        if b / a - 1.0 < 1e-13 or (change < refine_tol and b / a - 1.0 < 1e-7):
            break
        z2 = np.geomspace(max(a, lo * (1 + 1e-15)), b, 41)
    return z1_best, z2_best, f_best


# -- recovery and the full pipeline ------------------------------------------------


def recover_powers(z1: float, z2: float, problem: NonUniformProblem) -> tuple[float, float]:
    """Cellular transmit powers (W) from normalised SNRs: P_i = rho_i z_i."""
    if not (z1 > 0 and z2 > 0):
        raise ValueError("z1 and z2 must be > 0")
    return problem.rho1 * z1, problem.rho2 * z2


@dataclass(frozen=True)
class HessianReport:
    minors_f: tuple
    minors_g: tuple
    indefinite: bool


def hessian_diagnostic(problem: NonUniformProblem) -> HessianReport:
    """Leading principal minors of the two constraint Hessians.

    Both Hessians are [[0, c], [c, 0]] with c > 0, so the minors are
    (0, -c^2): the constraint functions are indefinite and the feasible set
    is not convex.
    """
    b2 = problem.beta**2
    h_f = np.array([[0.0, 2.0 * problem.pout1], [2.0 * problem.pout1, 0.0]])
    h_g = np.array([[0.0, 2.0 * problem.pout2 * b2], [2.0 * problem.pout2 * b2, 0.0]])

    def minors(h):
        return (float(h[0, 0]), float(h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]))

    mf, mg = minors(h_f), minors(h_g)
    indefinite = mf[1] < 0 and mg[1] < 0
    assert indefinite, "constraint Hessian unexpectedly semidefinite"
    return HessianReport(mf, mg, indefinite)


@dataclass(frozen=True)
class NonUniformResult:
    problem: NonUniformProblem
    candidates: tuple
    kkt: KktCandidate | None
    exhaustive: tuple | None
    z1: float
    z2: float
    correction_factor: float
    allocation: PowerAllocation
    exact_outage1: float
    exact_outage2: float
    coop: EnergyReport
    baseline: EnergyReport
    status: str = "ok"
    notes: tuple = field(default_factory=tuple)

    CSV_FIELDS = (
        "pout1",
        "pout2",
        "status",
        "active_set",
        "z1_kkt",
        "z2_kkt",
        "mu1",
        "mu2",
        "z1_exhaustive",
        "z2_exhaustive",
        "objective_kkt",
        "objective_exhaustive",
        "correction_factor",
        "p1_shortrange_w",
        "p2_shortrange_w",
        "p1_cellular_w",
        "p2_cellular_w",
        "exact_outage1",
        "exact_outage2",
        "e_nc_j",
        "e_t_j",
    )

    def csv_row(self) -> dict:
        k = self.kkt
        ex = self.exhaustive
        a = self.allocation
        return {
            "pout1": self.problem.pout1,
            "pout2": self.problem.pout2,
            "status": self.status,
            "active_set": "+".join(k.active_set) if k else "",
            "z1_kkt": k.z1 if k else "",
            "z2_kkt": k.z2 if k else "",
            "mu1": k.mu1 if k else "",
            "mu2": k.mu2 if k else "",
            "z1_exhaustive": ex[0] if ex else "",
            "z2_exhaustive": ex[1] if ex else "",
            "objective_kkt": -k.objective if k else "",
            "objective_exhaustive": -ex[2] if ex else "",
            "correction_factor": self.correction_factor,
            "p1_shortrange_w": a.p1_shortrange,
            "p2_shortrange_w": a.p2_shortrange,
            "p1_cellular_w": a.p1_cellular,
            "p2_cellular_w": a.p2_cellular,
            "exact_outage1": self.exact_outage1,
            "exact_outage2": self.exact_outage2,
            "e_nc_j": self.coop.total,
            "e_t_j": self.baseline.total,
        }


def _exact_outages(scenario, p_short, p_cell):
    alloc = PowerAllocation(p_short[0], p_short[1], p_cell[0], p_cell[1])
    return (
        outage_internetwork_user(1, scenario, alloc).total,
        outage_internetwork_user(2, scenario, alloc).total,
    )


def _post_correct(scenario, p_short, p_cell):
    """Common scale factor >= 1 on the cellular powers restoring exact feasibility.

    Applied only when an exact outage exceeds its target by more than 5%.
    """
    qos = scenario.qos
    o1, o2 = _exact_outages(scenario, p_short, p_cell)
    if o1 <= qos.pout1 * (1 + CORRECTION_RTOL) and o2 <= qos.pout2 * (1 + CORRECTION_RTOL):
        return 1.0

    def ok(s):
        e1, e2 = _exact_outages(scenario, p_short, (p_cell[0] * s, p_cell[1] * s))
        return e1 <= qos.pout1 and e2 <= qos.pout2

    lo, hi = 1.0, 2.0
    while not ok(hi):
        lo, hi = hi, hi * 2.0
        if hi > 1e12:
            raise InfeasibleProblem("exact", "outage targets unreachable by scaling cellular powers")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def no_cooperation_energy(scenario: Scenario, battery: BatteryModel) -> EnergyReport:
    """Baseline: each user alone meets its own target at its own rate."""
    qos = scenario.qos
    alloc = PowerAllocation(
        p1_cellular=solve_power_single_link(qos.pout1, scenario.cellular_coefficient(1, Scheme.NO_COOP)),
        p2_cellular=solve_power_single_link(qos.pout2, scenario.cellular_coefficient(2, Scheme.NO_COOP)),
    )
    return scheme_total_energy(Scheme.NO_COOP, alloc, battery)


def solve_nonuniform(
    scenario: Scenario,
    battery: BatteryModel,
    delta: float = 0.005,
    p2_threshold: str = "r1",
    grid_resolution: int = 400,
    run_exhaustive: bool = True,
) -> NonUniformResult:
    """KKT optimum (exhaustive search as fallback and cross-check), powers and energies."""
    problem = build_problem(scenario, delta, p2_threshold)
    candidates = tuple(enumerate_kkt_candidates(problem))
    maxima = [c for c in candidates if c.is_local_max]
    kkt = maxima[0] if maxima else None
    notes = []
    exhaustive = None
    if run_exhaustive or kkt is None:
        try:
            exhaustive = exhaustive_search(problem, grid_resolution)
        except InfeasibleProblem as exc:
            notes.append(str(exc))
    if kkt is not None:
        z1, z2 = kkt.z1, kkt.z2
    elif exhaustive is not None:
        z1, z2 = exhaustive[0], exhaustive[1]
        notes.append("no KKT local maximum in the domain; exhaustive optimum used")
    else:
        raise InfeasibleProblem(notes[0] if notes else "problem", "no solution found")

    p_short = exchange_powers(scenario, Scheme.INTER)
    p_cell = recover_powers(z1, z2, problem)
    factor = _post_correct(scenario, p_short, p_cell)
    if factor != 1.0:
        notes.append(f"cellular powers scaled by {factor:.6g} to meet exact targets")
    p_cell = (p_cell[0] * factor, p_cell[1] * factor)
    allocation = PowerAllocation(p_short[0], p_short[1], p_cell[0], p_cell[1])
    o1, o2 = _exact_outages(scenario, p_short, p_cell)
    probs = decoding_state_probs(scenario.qos.pout12, scenario.qos.pout21)
    coop = scheme_total_energy(Scheme.INTER, allocation, battery, probs)
    baseline = no_cooperation_energy(scenario, battery)
    status = "ok" if kkt is not None else "exhaustive_only"
    if factor != 1.0:
        status += "+corrected"
    return NonUniformResult(
        problem, candidates, kkt, exhaustive, z1, z2, factor, allocation, o1, o2, coop, baseline, status, tuple(notes)
    )
