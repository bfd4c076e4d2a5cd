"""SDP relaxation of the localization problem and a dense primal-dual solver.

The decision variable is the (d+n) x (d+n) symmetric block matrix

    Z = [ I  X ]
        [ X' Y ]

whose X columns are candidate sensor positions; Y majorizes X'X exactly when
Z is feasible and rank d.  Every squared-distance equality is linear in Z
with a rank-one coefficient matrix (an outer product), which the solver
exploits when forming Schur complements.

The solver is an infeasible-start primal-dual path-following method with an
adaptive centering parameter.  For a zero objective the central path
converges to the analytic center of the solution set, i.e. a solution of
maximum rank, which is exactly what the uniqueness certificate needs.  The
dual slack matrix at termination doubles as the strong-localizability
certificate: at most n of its eigenvalues can survive complementarity, and
it reaches rank n precisely on strongly localizable instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .network import AS, SS, NetworkInstance

__all__ = [
    "ObjectiveTerm",
    "ObjectiveSpec",
    "Constraint",
    "SdpProblem",
    "SolveOptions",
    "SdpSolution",
    "DualCertificate",
    "CertificationResult",
    "AssemblyError",
    "SdpInfeasibleError",
    "SdpUnboundedError",
    "assemble_relaxation",
    "lift_positions",
    "constraint_residuals",
    "solve",
    "numerical_rank",
    "certify_unique",
    "certify_strong",
    "extract_positions",
    "dual_slack_from_multipliers",
]


class AssemblyError(ValueError):
    """Raised when an instance cannot be turned into a well-posed relaxation."""


class SdpInfeasibleError(RuntimeError):
    """No positive semidefinite matrix satisfies the distance equalities.

    Carries the per-constraint residual profile of the best primal iterate
    and the separating dual ray that certifies infeasibility.
    """

    def __init__(self, message, residuals=None, certificate=None):
        super().__init__(message)
        self.residuals = residuals
        self.certificate = certificate


class SdpUnboundedError(RuntimeError):
    """The objective grows without bound over the feasible set."""


@dataclass(frozen=True)
class ObjectiveTerm:
    """One squared-length term.  sign +1 maximizes, -1 minimizes, 0 disables."""

    kind: str  # "ss" | "as"
    i: int
    j: int
    sign: int
    weight: float = 1.0


@dataclass(frozen=True)
class ObjectiveSpec:
    """Maximized linear objective built from squared pair lengths."""

    terms: tuple[ObjectiveTerm, ...] = ()

    @staticmethod
    def zero() -> "ObjectiveSpec":
        return ObjectiveSpec(())

    def is_zero(self) -> bool:
        return all(t.sign == 0 or t.weight == 0 for t in self.terms)


@dataclass(frozen=True)
class Constraint:
    """A_c . Z = rhs.  kind "ss"/"as" mirror edge kinds; "block" pins the
    top-left identity entry (i, j)."""

    kind: str
    i: int
    j: int
    rhs: float


@dataclass(frozen=True, eq=False)
class SdpProblem:
    dimension: int
    n_sensors: int
    anchors: np.ndarray
    constraints: tuple[Constraint, ...]
    objective: ObjectiveSpec
    warnings: tuple[str, ...] = ()
    unanchored_sensors: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return self.dimension + self.n_sensors


@dataclass
class SolveOptions:
    feasibility_tol: float = 1e-8
    rank_tol: float = 1e-6
    max_iterations: int = 100
    step_fraction: float = 0.98
    sigma_min: float = 1e-6
    sigma_max: float = 0.8
    mu_tol: float | None = None  # defaults to feasibility_tol / 10

    def __post_init__(self):
        if min(self.feasibility_tol, self.rank_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True, eq=False)
class SdpSolution:
    Z: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    rank_z: int
    gap: float  # trace(Y) - ||X||_F^2
    objective_value: float
    converged: bool
    status: str
    iterations: int
    primal_residual: float
    dual_residual: float
    mu: float
    dimension: int
    n_sensors: int
    zero_objective: bool
    unanchored_sensors: tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class DualCertificate:
    """Dual slack matrix with its multipliers.

    y aligns with y_edges (sensor-sensor pairs) and w with w_edges
    (anchor, sensor) pairs; V collects the multipliers of the identity-block
    constraints.
    """

    V: np.ndarray
    y: np.ndarray
    w: np.ndarray
    U: np.ndarray
    rank_u: int
    complementarity: float
    n_sensors: int
    converged: bool
    y_edges: tuple = ()
    w_edges: tuple = ()


@dataclass(frozen=True)
class CertificationResult:
    unique: bool | None  # None = indeterminate
    rank_z: int
    gap: float
    reason: str


def _pair_vector(d, n, anchors, kind, i, j):
    v = np.zeros(d + n)
    if kind == SS:
        v[d + i] = 1.0
        v[d + j] = -1.0
    else:
        v[:d] = anchors[i]
        v[d + j] = -1.0
    return v


def _objective_matrix(problem: SdpProblem) -> np.ndarray:
    d, n = problem.dimension, problem.n_sensors
    C = np.zeros((problem.k, problem.k))
    for t in problem.objective.terms:
        if t.sign == 0 or t.weight == 0:
            continue
        v = _pair_vector(d, n, problem.anchors, t.kind, t.i, t.j)
        C += t.sign * t.weight * np.outer(v, v)
    return C


def _unanchored_components(instance: NetworkInstance) -> tuple[int, ...]:
    """Sensors in connected components (over sensor-sensor edges) that touch
    no anchor edge.  Such components can translate freely, so the instance
    cannot be uniquely localizable and the feasible set is unbounded."""
    n = instance.n_sensors
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in instance.edges:
        if e.kind == SS:
            ra, rb = find(e.i), find(e.j)
            if ra != rb:
                parent[ra] = rb
    anchored = set()
    for e in instance.edges:
        if e.kind == AS:
            anchored.add(find(e.j))
    return tuple(j for j in range(n) if find(j) not in anchored)


def lift_positions(instance: NetworkInstance, positions) -> np.ndarray:
    """Rank-d feasible point [[I, X], [X', X'X]] built from sensor positions."""
    d = instance.dimension
    X = np.asarray(positions, dtype=float).T  # d x n
    top = np.hstack([np.eye(d), X])
    bottom = np.hstack([X.T, X.T @ X])
    return np.vstack([top, bottom])


def constraint_residuals(problem: SdpProblem, Z: np.ndarray) -> np.ndarray:
    """|A_c . Z - rhs| for every constraint, in problem order."""
    d, n = problem.dimension, problem.n_sensors
    out = np.zeros(len(problem.constraints))
    for idx, c in enumerate(problem.constraints):
        if c.kind == "block":
            val = 0.5 * (Z[c.i, c.j] + Z[c.j, c.i]) if c.i != c.j else Z[c.i, c.i]
        else:
            v = _pair_vector(d, n, problem.anchors, c.kind, c.i, c.j)
            val = float(v @ Z @ v)
        out[idx] = abs(val - c.rhs)
    return out


def assemble_relaxation(
    instance: NetworkInstance, objective: ObjectiveSpec | None = None
) -> SdpProblem:
    """Build the relaxation: one equality per measured edge with right-hand
    side dist**2, plus d(d+1)/2 scalar equalities pinning the identity block.

    Rejects anchor sets that are affinely degenerate (they cannot pin the
    coordinate frame).  When ground truth is attached, the assembled
    constraints are checked against its lift.  Objective terms referencing a
    measured edge are permitted (the search strategies need them) but
    recorded as warnings.
    """
    objective = objective or ObjectiveSpec.zero()
    d = instance.dimension
    n = instance.n_sensors
    anchors = instance.anchors

    offsets = anchors[1:] - anchors[0]
    if np.linalg.matrix_rank(offsets, tol=1e-9 * max(1.0, float(np.abs(anchors).max()))) < d:
        raise AssemblyError("anchors are affinely degenerate; they cannot fix the frame")

    constraints = [Constraint(e.kind, e.i, e.j, e.dist**2) for e in instance.edges]
    for p in range(d):
        for q in range(p, d):
            constraints.append(Constraint("block", p, q, 1.0 if p == q else 0.0))

    edge_keys = {e.key() for e in instance.edges}
    warnings_list = []
    for t in objective.terms:
        if t.kind not in (SS, AS):
            raise AssemblyError(f"objective term has unknown kind {t.kind!r}")
        if t.kind == SS and not (0 <= t.i < n and 0 <= t.j < n and t.i != t.j):
            raise AssemblyError(f"objective term {t} out of range")
        if t.kind == AS and not (0 <= t.i < anchors.shape[0] and 0 <= t.j < n):
            raise AssemblyError(f"objective term {t} out of range")
        if t.sign not in (-1, 0, 1):
            raise AssemblyError(f"objective sign must be -1, 0, or +1, got {t.sign}")
        if t.weight < 0:
            raise AssemblyError("objective weights must be nonnegative")
        key = (t.kind, min(t.i, t.j), max(t.i, t.j)) if t.kind == SS else (t.kind, t.i, t.j)
        if t.sign != 0 and key in edge_keys:
            warnings_list.append(f"objective term on measured edge {key}")

    problem = SdpProblem(
        dimension=d,
        n_sensors=n,
        anchors=anchors,
        constraints=tuple(constraints),
        objective=objective,
        warnings=tuple(warnings_list),
        unanchored_sensors=_unanchored_components(instance),
    )

    if instance.sensor_truth is not None:
        Z = lift_positions(instance, instance.sensor_truth)
        worst = float(constraint_residuals(problem, Z).max())
        if worst > 1e-9 * max(1.0, float(np.abs(Z).max())):
            raise AssemblyError(f"ground truth violates assembled constraints by {worst}")

    return problem


def _atomize(problem: SdpProblem):
    """Represent every constraint as a signed sum of rank-one outer products.

    Returns (W, P, b): columns of W are the atom vectors, P[a, c] is the
    coefficient of atom a in constraint c, so  A_c = sum_a P[a, c] w_a w_a'.
    """
    d, n, k = problem.dimension, problem.n_sensors, problem.k
    atoms = []
    coef = []  # (atom_index, constraint_index, value)
    for c_idx, c in enumerate(problem.constraints):
        if c.kind in (SS, AS):
            atoms.append(_pair_vector(d, n, problem.anchors, c.kind, c.i, c.j))
            coef.append((len(atoms) - 1, c_idx, 1.0))
        else:
            p, q = c.i, c.j
            if p == q:
                v = np.zeros(k)
                v[p] = 1.0
                atoms.append(v)
                coef.append((len(atoms) - 1, c_idx, 1.0))
            else:
                vp = np.zeros(k)
                vp[p] = 1.0
                vq = np.zeros(k)
                vq[q] = 1.0
                atoms.append(vp + vq)
                coef.append((len(atoms) - 1, c_idx, 0.25))
                atoms.append(vp - vq)
                coef.append((len(atoms) - 1, c_idx, -0.25))
    W = np.array(atoms).T  # k x n_atoms
    P = np.zeros((len(atoms), len(problem.constraints)))
    for a, c, v in coef:
        P[a, c] = v
    b = np.array([c.rhs for c in problem.constraints])
    return W, P, b


def _chol(Q: np.ndarray) -> np.ndarray:
    jitter = 0.0
    base = max(1.0, float(np.trace(Q)) / Q.shape[0])
    for _ in range(6):
        try:
            return np.linalg.cholesky(Q + jitter * np.eye(Q.shape[0]))
        except np.linalg.LinAlgError:
            jitter = 1e-14 * base if jitter == 0.0 else jitter * 100.0
    raise np.linalg.LinAlgError("matrix not positive definite even after jitter")


def _max_step(Q: np.ndarray, D: np.ndarray) -> float:
    """Largest t with Q + t*D still positive definite (Q assumed PD)."""
    L = _chol(Q)
    T = solve_triangular(L, D, lower=True)
    B = solve_triangular(L, T.T, lower=True)
    lam = float(np.linalg.eigvalsh(0.5 * (B + B.T))[0])
    if lam >= -1e-14:
        return np.inf
    return -1.0 / lam


def _ipm(W, P, b, C, k, opt: SolveOptions):
    m = len(b)
    eye = np.eye(k)
    bmax = float(np.abs(b).max()) if m else 1.0
    cfro = float(np.linalg.norm(C, "fro"))

    def A_of(V):
        return P.T @ (((V @ W) * W).sum(axis=0))

    def At(y):
        return (W * (P @ y)) @ W.T

    traces = P.T @ (W * W).sum(axis=0)
    rho_p = max(1.0, bmax / max(1.0, float(np.abs(traces).max())))
    Z = rho_p * eye
    S = (1.0 + cfro) * eye
    y = np.zeros(m)

    tol = opt.feasibility_tol
    mu_stop = (opt.mu_tol if opt.mu_tol is not None else max(1e-12, tol / 10.0)) * max(
        1.0, bmax
    )
    frac = opt.step_fraction

    status = "max_iterations"
    converged = False
    best = None
    best_score = np.inf
    no_progress = 0
    prev_mu = np.inf
    it = 0

    for it in range(1, opt.max_iterations + 1):
        rp = b - A_of(Z)
        Rd = C + S - At(y)
        mu = float((Z * S).sum()) / k
        relp = float(np.abs(rp).max()) / (1.0 + bmax)
        reld = float(np.linalg.norm(Rd, "fro")) / (1.0 + cfro)
        pobj = float((C * Z).sum())
        dobj = float(b @ y)

        score = max(relp, reld) + mu / max(1.0, bmax)
        if score < best_score:
            best_score = score
            best = (Z.copy(), y.copy(), S.copy(), relp, reld, mu)

        if relp <= tol and reld <= tol and mu <= mu_stop:
            status = "optimal"
            converged = True
            break

        # verified separating-ray test: a dual direction with nonnegative
        # slack combination and negative value proves primal infeasibility
        if it >= 5 and dobj < pobj - 1e3 * (1.0 + abs(pobj)):
            ynorm = y / max(1e-300, float(np.linalg.norm(y)))
            val = float(b @ ynorm)
            if val < -1e-6 * (1.0 + bmax):
                Sy = At(ynorm)
                eigs = np.linalg.eigvalsh(0.5 * (Sy + Sy.T))
                if eigs[0] >= -1e-8 * max(1.0, float(np.abs(eigs).max())):
                    bestZ = best[0] if best is not None else Z
                    raise SdpInfeasibleError(
                        "distance equalities admit no positive semidefinite solution",
                        residuals=np.abs(b - A_of(bestZ)),
                        certificate=ynorm,
                    )

        if pobj > 1e8 * (1.0 + bmax) * max(1.0, rho_p):
            raise SdpUnboundedError("objective appears unbounded over the feasible set")

        if mu > 0.98 * prev_mu and max(relp, reld) > tol:
            no_progress += 1
            if no_progress >= 8:
                status = "stalled"
                break
        else:
            no_progress = 0
        prev_mu = mu

        Ls = _chol(S)
        Sinv_half = solve_triangular(Ls, eye, lower=True)
        Sinv = Sinv_half.T @ Sinv_half

        G1 = W.T @ Z @ W
        G2 = W.T @ Sinv @ W
        M = P.T @ ((G1 * G2) @ P)
        M = 0.5 * (M + M.T)
        try:
            Lm = _chol(M)
        except np.linalg.LinAlgError:
            status = "numerical"
            break

        def schur_solve(rhs):
            t = solve_triangular(Lm, rhs, lower=True)
            return solve_triangular(Lm.T, t, lower=False)

        def direction(nu):
            rhs = A_of(nu * Sinv + Z @ Rd @ Sinv) - b
            dy = schur_solve(rhs)
            dS = At(dy) - Rd
            dZ = nu * Sinv - Z - Z @ dS @ Sinv
            return 0.5 * (dZ + dZ.T), dy, dS

        # predictor: pure Newton step toward the boundary sets the centering
        dZ, dy, dS = direction(0.0)
        ap = min(1.0, frac * _max_step(Z, dZ))
        ad = min(1.0, frac * _max_step(S, dS))
        mu_aff = float(((Z + ap * dZ) * (S + ad * dS)).sum()) / k
        sigma = float(np.clip((max(mu_aff, 0.0) / mu) ** 3, opt.sigma_min, opt.sigma_max))

        dZ, dy, dS = direction(sigma * mu)
        ap = min(1.0, frac * _max_step(Z, dZ))
        ad = min(1.0, frac * _max_step(S, dS))
        if min(ap, ad) < 1e-10:
            status = "stalled"
            break
        Z = Z + ap * dZ
        y = y + ad * dy
        S = S + ad * dS

    if not converged and best is not None:
        Z, y, S, relp, reld, mu = best
    else:
        rp = b - A_of(Z)
        Rd = C + S - At(y)
        mu = float((Z * S).sum()) / k
        relp = float(np.abs(rp).max()) / (1.0 + bmax)
        reld = float(np.linalg.norm(Rd, "fro")) / (1.0 + cfro)

    return {
        "Z": 0.5 * (Z + Z.T),
        "y": y,
        "S": 0.5 * (S + S.T),
        "iterations": it,
        "status": status,
        "converged": converged,
        "relp": relp,
        "reld": reld,
        "mu": mu,
        "residual_profile": np.abs(b - A_of(Z)),
    }


def numerical_rank(matrix: np.ndarray, rank_tol: float = 1e-6) -> int:
    """Count of eigenvalues above rank_tol * max(largest eigenvalue, 1)."""
    sym = 0.5 * (matrix + matrix.T)
    eigs = np.linalg.eigvalsh(sym)
    cutoff = rank_tol * max(float(eigs[-1]), 1.0)
    return int((eigs > cutoff).sum())


def _build_solution(problem, Z, status, converged, iterations, relp, reld, mu, opt):
    d = problem.dimension
    X = Z[:d, d:]
    Y = Z[d:, d:]
    C = _objective_matrix(problem)
    return SdpSolution(
        Z=Z,
        X=X,
        Y=Y,
        rank_z=numerical_rank(Z, opt.rank_tol),
        gap=float(np.trace(Y) - (X * X).sum()),
        objective_value=float((C * Z).sum()),
        converged=converged,
        status=status,
        iterations=iterations,
        primal_residual=relp,
        dual_residual=reld,
        mu=mu,
        dimension=d,
        n_sensors=problem.n_sensors,
        zero_objective=problem.objective.is_zero(),
        unanchored_sensors=problem.unanchored_sensors,
    )


def _build_certificate(problem, Z, y, U, converged, opt):
    d = problem.dimension
    V = np.zeros((d, d))
    y_idx, w_idx = [], []
    for idx, c in enumerate(problem.constraints):
        if c.kind == "block":
            if c.i == c.j:
                V[c.i, c.i] += y[idx]
            else:
                V[c.i, c.j] += 0.5 * y[idx]
                V[c.j, c.i] += 0.5 * y[idx]
        elif c.kind == SS:
            y_idx.append(idx)
        else:
            w_idx.append(idx)
    U = 0.5 * (U + U.T)
    return DualCertificate(
        V=V,
        y=y[y_idx],
        w=y[w_idx],
        U=U,
        rank_u=numerical_rank(U, opt.rank_tol),
        complementarity=abs(float((Z * U).sum())),
        n_sensors=problem.n_sensors,
        converged=converged,
        y_edges=tuple((problem.constraints[i].i, problem.constraints[i].j) for i in y_idx),
        w_edges=tuple((problem.constraints[i].i, problem.constraints[i].j) for i in w_idx),
    )


def solve(problem: SdpProblem, options: SolveOptions | None = None):
    """Solve the relaxation; returns (SdpSolution, DualCertificate).

    Raises SdpInfeasibleError with a constraint residual profile when the
    equalities admit no PSD solution, and SdpUnboundedError when the
    objective diverges.  Iteration exhaustion returns the best iterate with
    converged=False rather than raising.

    A zero-objective solve with free-floating sensors (a component with no
    anchor edge) is cut short: the feasible set is unbounded in those
    coordinates, so no analytic center exists; the structural defect is
    recorded on the solution for the certification step.
    """
    opt = options or SolveOptions()
    k = problem.k

    if problem.unanchored_sensors and problem.objective.is_zero():
        Z = np.eye(k)
        sol = _build_solution(
            problem, Z, "free_sensors", False, 0, np.inf, np.inf, np.inf, opt
        )
        cert = _build_certificate(
            problem, Z, np.zeros(len(problem.constraints)), np.zeros((k, k)), False, opt
        )
        return sol, cert

    W, P, b = _atomize(problem)
    C = _objective_matrix(problem)
    out = _ipm(W, P, b, C, k, opt)

    sol = _build_solution(
        problem,
        out["Z"],
        out["status"],
        out["converged"],
        out["iterations"],
        out["relp"],
        out["reld"],
        out["mu"],
        opt,
    )
    # rebuild the slack from the multipliers so U = A*(y) - C holds exactly
    U = (W * (P @ out["y"])) @ W.T - C
    cert = _build_certificate(problem, out["Z"], out["y"], U, out["converged"], opt)
    return sol, cert


def certify_unique(solution: SdpSolution, options: SolveOptions | None = None) -> CertificationResult:
    """Decide unique localizability from a zero-objective (max-rank) solve.

    True exactly when the returned maximum-rank solution has rank d, i.e.
    the trace gap vanishes.  Non-converged solves give an indeterminate
    verdict, never a false positive.  Solutions of a nonzero-objective solve
    can only support a negative verdict (a feasible point of rank above d
    already witnesses a higher-dimensional realization).
    """
    opt = options or SolveOptions()
    d = solution.dimension
    gap_tol = max(100.0 * opt.feasibility_tol, 1e-6)

    if solution.unanchored_sensors:
        return CertificationResult(
            False,
            solution.rank_z,
            solution.gap,
            f"sensors {solution.unanchored_sensors} have no anchored component and can translate",
        )
    if not solution.converged:
        return CertificationResult(
            None, solution.rank_z, solution.gap, f"solver did not converge ({solution.status})"
        )
    if not solution.zero_objective:
        if solution.rank_z > d and solution.gap > gap_tol:
            return CertificationResult(
                False, solution.rank_z, solution.gap,
                "feasible solution of rank above d found under a nonzero objective",
            )
        return CertificationResult(
            None, solution.rank_z, solution.gap,
            "uniqueness certification needs a zero-objective (max-rank) solve",
        )
    if solution.rank_z == d and solution.gap <= gap_tol:
        return CertificationResult(
            True, solution.rank_z, solution.gap, "max-rank solution has rank d"
        )
    if solution.rank_z > d and solution.gap > gap_tol:
        return CertificationResult(
            False, solution.rank_z, solution.gap,
            f"max-rank solution has rank {solution.rank_z} > {d}",
        )
    return CertificationResult(
        None, solution.rank_z, solution.gap, "rank and trace gap disagree near tolerance"
    )


def certify_strong(certificate: DualCertificate, options: SolveOptions | None = None) -> bool:
    """True when an optimal dual slack matrix of rank n exists.

    Complementarity caps rank(Z) + rank(U) at d + n, so a rank-n dual slack
    forces every primal solution to rank d.
    """
    opt = options or SolveOptions()
    if not certificate.converged:
        return False
    if certificate.complementarity > 10.0 * opt.feasibility_tol * max(
        1.0, float(np.abs(certificate.U).max())
    ):
        return False
    return certificate.rank_u == certificate.n_sensors


def extract_positions(solution: SdpSolution):
    """Sensor positions (columns of X) and the trace gap; the gap tells the
    caller how much mass escaped into higher dimensions."""
    return solution.X.T.copy(), solution.gap


def dual_slack_from_multipliers(
    problem: SdpProblem, V: np.ndarray, y, w
) -> np.ndarray:
    """Assemble [V 0; 0 0] + sum y A + sum w A-bar minus the objective matrix.

    y must align with the sensor-sensor constraints in problem order and w
    with the anchor-sensor constraints.  Used to check that an independently
    constructed certificate has the exact dual-feasible form.
    """
    d, n, k = problem.dimension, problem.n_sensors, problem.k
    U = np.zeros((k, k))
    U[:d, :d] = V
    yi = wi = 0
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    for c in problem.constraints:
        if c.kind == SS:
            v = _pair_vector(d, n, problem.anchors, SS, c.i, c.j)
            U += y[yi] * np.outer(v, v)
            yi += 1
        elif c.kind == AS:
            v = _pair_vector(d, n, problem.anchors, AS, c.i, c.j)
            U += w[wi] * np.outer(v, v)
            wi += 1
    return U - _objective_matrix(problem)
