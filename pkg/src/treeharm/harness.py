"""End-to-end verification harness: build multiplier-intertwined sequences
(Lambda f_k = A f_{k+1}) at desk scale, test norm uniformity, decompose f_0
into Laplacian eigenfunctions at the spectral level set |kappa| = |A|, and
reconcile each component with boundary data through the Poisson transform.

A scenario's verdict is one of
  consistent              observed behavior matches the theorem prediction,
  hypothesis-violated     the sequence fails uniform boundedness (detected
                          super-linear norm growth),
  inconclusive-truncation stabilization flags or truncation slack prevented
                          a determination.
Reports are reproducible bit-for-bit for a fixed config and seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateError, UnsupportedScenarioError
from .multipliers import (
    MultiplierOperator,
    ball_avg_op,
    heat_op,
    laplacian_apply,
    laplacian_op,
    psi_of_L_op,
    sphere_avg_op,
)
from .eigenproject import eigen_decompose
from .norms import NormReport, hardy_norm, weak_lp_norm
from .spectral import (
    SpectralSymbol,
    conjugate_index,
    delta,
    gamma,
    phi_profile,
    symbol_extrema,
    tau,
    wrap_alpha,
)
from .transforms import VertexFunction
from .tree import TreeGeometry, build_tree, height_matrix

GROWTH_DETECT_RATIO = 1.02
BOUNDEDNESS_RATIO = 10.0
LEVEL_SET_MATCH_TOL = 1e-7
EIGEN_CHECK_TOL = 1e-7
RECON_TOL = 1e-7
POISSON_TOL = 1e-6
MAX_LEVEL_SET_POINTS = 8


# ---------------------------------------------------------------------------
# scenario specification
# ---------------------------------------------------------------------------

def multiplier_from_spec(q: int, spec: dict) -> MultiplierOperator:
    kind = spec.get("kind")
    if kind == "laplacian":
        return laplacian_op(q)
    if kind == "sphere":
        return sphere_avg_op(q, int(spec["n"]))
    if kind == "ball":
        return ball_avg_op(q, int(spec["n"]))
    if kind == "heat":
        re, im = spec["xi"]
        return heat_op(q, complex(re, im), tol=float(spec.get("tol", 1e-10)))
    if kind == "poly":
        coeffs = [complex(re, im) for re, im in spec["coeffs"]]
        return psi_of_L_op(q, coeffs)
    raise ConfigError(f"multiplier.kind must be laplacian|sphere|ball|heat|poly, got {kind!r}")


def resolve_terms(scenario: "Scenario", rng: np.random.Generator
                  ) -> list[tuple[complex, complex]]:
    """Resolve planted-term dicts to (coefficient, z) pairs.

    A term locates z by one of: "alpha_over_tau" / "alpha" on the boundary
    line, an explicit "z", or "beta_point" (1=max, 2=min angle of a heat
    multiplier).  Coefficient "random" draws from the scenario RNG.
    """
    docs = list(scenario.planted)
    if scenario.contaminant is not None:
        docs.append(scenario.contaminant)
    dpp = -delta(scenario.p)
    out: list[tuple[complex, complex]] = []
    for doc in docs:
        coeff = doc.get("coeff", [1.0, 0.0])
        if coeff == "random":
            c = complex(rng.normal(), rng.normal())
        else:
            c = complex(coeff[0], coeff[1])
        if "beta_point" in doc:
            if scenario.multiplier.get("kind") != "heat":
                raise ConfigError("planted beta_point requires a heat multiplier")
            from .spectral import beta_points

            xi = complex(*scenario.multiplier["xi"])
            b1, b2 = beta_points(scenario.q, scenario.p, xi)
            alpha = b1 if int(doc["beta_point"]) == 1 else b2
            z = complex(alpha, dpp)
        elif "z" in doc:
            z = complex(doc["z"][0], doc["z"][1])
        elif "alpha_over_tau" in doc:
            z = complex(float(doc["alpha_over_tau"]) * tau(scenario.q), dpp)
        elif "alpha" in doc:
            z = complex(float(doc["alpha"]), dpp)
        else:
            raise ConfigError("planted term needs one of alpha_over_tau|alpha|z|beta_point")
        out.append((c, z))
    return out


@dataclass
class Scenario:
    name: str
    q: int
    R: int
    p: float
    multiplier: dict
    regime: str                       # max | min | above_max | below_min
    direction: str                    # forward | backward | bi
    iterates: int = 12
    amplitude_factor: float = 1.0
    planted: list[dict] = field(default_factory=list)
    contaminant: dict | None = None
    track: list[dict] = field(default_factory=lambda: [{"kind": "weak"}])
    poisson_depth: int = 6
    seed: int = 1234
    expected_verdict: str = "consistent"
    evolution: str = "spectral"       # spectral | operator

    REGIMES = ("max", "min", "above_max", "below_min")
    DIRECTIONS = ("forward", "backward", "bi")

    def validate(self) -> None:
        if self.q < 2:
            raise ConfigError(f"scenario {self.name}: field q must be >= 2")
        if not 1 <= self.R <= 16:
            raise ConfigError(f"scenario {self.name}: field R outside [1, 16]")
        if not 1 <= self.p < 2:
            raise ConfigError(f"scenario {self.name}: field p outside [1, 2)")
        if self.regime not in self.REGIMES:
            raise ConfigError(f"scenario {self.name}: field regime must be one of {self.REGIMES}")
        if self.direction not in self.DIRECTIONS:
            raise ConfigError(f"scenario {self.name}: field direction must be one of {self.DIRECTIONS}")
        if self.iterates < 2:
            raise ConfigError(f"scenario {self.name}: field iterates must be >= 2")
        if not 1 <= self.poisson_depth <= self.R:
            raise ConfigError(f"scenario {self.name}: field poisson_depth outside [1, R]")
        if self.amplitude_factor <= 0:
            raise ConfigError(f"scenario {self.name}: field amplitude_factor must be > 0")
        if self.regime == "above_max" and self.amplitude_factor <= 1:
            raise ConfigError(
                f"scenario {self.name}: regime above_max needs amplitude_factor > 1")
        if self.regime == "below_min" and self.amplitude_factor >= 1:
            raise ConfigError(
                f"scenario {self.name}: regime below_min needs amplitude_factor < 1")
        if self.regime in ("max", "min") and abs(self.amplitude_factor - 1.0) > 1e-12:
            raise ConfigError(
                f"scenario {self.name}: regime {self.regime} pins amplitude_factor = 1")
        if self.evolution not in ("spectral", "operator"):
            raise ConfigError(f"scenario {self.name}: field evolution must be spectral|operator")

    @staticmethod
    def from_dict(doc: dict) -> "Scenario":
        known = {f for f in Scenario.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"scenario has unknown fields: {sorted(unknown)}")
        try:
            sc = Scenario(**doc)
        except TypeError as exc:
            raise ConfigError(f"scenario missing required field: {exc}") from exc
        sc.validate()
        return sc


# ---------------------------------------------------------------------------
# level-set search on the boundary line
# ---------------------------------------------------------------------------

def boundary_level_set(sym: SpectralSymbol, p: float, magnitude: float,
                       grid_size: int = 4096) -> list[float]:
    """All alpha in (-tau/2, tau/2] with |kappa(alpha + i delta_{p'})| equal
    to the target magnitude.

    Tangential contacts (the max/min regimes) come from the refined extrema;
    transversal crossings are bisected to 1e-10.  More than 8 points is
    outside the implemented scenario family.
    """
    q = sym.q
    t = tau(q)
    dpp = -delta(p)
    rep = symbol_extrema(sym, p, grid_size)
    scale = max(1.0, magnitude)
    cands: list[float] = []
    if abs(rep.max_mod - magnitude) <= LEVEL_SET_MATCH_TOL * scale:
        cands.extend(rep.argmax)
    if abs(rep.min_mod - magnitude) <= LEVEL_SET_MATCH_TOL * scale:
        cands.extend(rep.argmin)

    alphas = np.linspace(-t / 2, t / 2, grid_size, endpoint=False) + t / grid_size
    h = np.abs(sym(alphas + 1j * dpp)) - magnitude

    def hfun(a: float) -> float:
        return float(abs(sym(a + 1j * dpp))) - magnitude

    sign = np.sign(h)
    for i in range(grid_size):
        j = (i + 1) % grid_size
        if sign[i] == 0 or sign[i] * sign[j] >= 0:
            continue
        lo = alphas[i]
        hi = alphas[i] + t / grid_size
        flo = h[i]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fm = hfun(mid)
            if flo * fm <= 0:
                hi = mid
            else:
                lo, flo = mid, fm
            if hi - lo < 1e-10:
                break
        cands.append(wrap_alpha(q, 0.5 * (lo + hi)))

    cands.sort()
    dedup: list[float] = []
    for a in cands:
        if all(abs(math.remainder(a - b, t)) > 1e-6 for b in dedup):
            dedup.append(a)
    if len(dedup) > MAX_LEVEL_SET_POINTS:
        raise UnsupportedScenarioError(
            f"level set |kappa| = {magnitude} has {len(dedup)} points; "
            f"the implemented scenarios assume at most {MAX_LEVEL_SET_POINTS}")
    return dedup


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass
class SequenceResult:
    k_values: list[int]
    functions: list[VertexFunction]
    k_effective: int
    spectral: bool
    op_check_residual: float | None


def _planted_seed(g: TreeGeometry, terms: list[tuple[complex, complex]]) -> VertexFunction:
    vals = np.zeros(g.n_vertices, dtype=complex)
    for coeff, z in terms:
        prof = phi_profile(g.q, z, g.R)
        vals += coeff * prof[g.levels]
    return VertexFunction(g, vals)


def make_sequence(scenario: Scenario, op: MultiplierOperator, amplitude: complex,
                  g: TreeGeometry, resolved: list[tuple[complex, complex]]
                  ) -> SequenceResult:
    """Iterates of Lambda f_k = A f_{k+1} around f_0.

    Planted seeds evolve spectrally (coefficient c_i picks up kappa(z_i)/A
    per forward step), which is exact on the infinite tree and keeps every
    iterate at full radius; one forward step is verified against the actual
    operator stencil and reported.  Non-planted evolution applies the
    operator directly and shortens the run when validity is exhausted.
    """
    K = scenario.iterates
    if scenario.direction == "forward":
        ks = list(range(0, K))
    elif scenario.direction == "backward":
        ks = list(range(-(K - 1), 1))
    else:
        half = K // 2
        ks = list(range(-half, half + 1))

    if scenario.evolution == "spectral":
        kappas = [complex(op.symbol(z)) for _, z in resolved]
        funcs = []
        for k in ks:
            evolved = [(c * (kap / amplitude) ** k, z)
                       for (c, z), kap in zip(resolved, kappas)]
            funcs.append(_planted_seed(g, evolved))
        # one-step stencil verification at the smallest cost point
        check = None
        if len(ks) >= 2 and funcs[0].valid_radius >= op.level_cost:
            i = ks.index(0) if 0 in ks else 0
            if i + 1 < len(funcs):
                lhs = op.apply(funcs[i])
                rhs = funcs[i + 1] * amplitude
                denom = max(rhs.sup_norm(lhs.valid_radius), 1e-300)
                check = (lhs - rhs).sup_norm() / denom
        return SequenceResult(k_values=ks, functions=funcs, k_effective=len(ks),
                              spectral=True, op_check_residual=check)

    # operator evolution: forward only from the seed; backward would need the
    # synthesized inverse, which callers request via regime/direction checks
    f0 = _planted_seed(g, resolved)
    funcs = [f0]
    k_eff = 1
    for _ in ks[1:]:
        prev = funcs[-1]
        if prev.valid_radius - op.level_cost < 2:
            break
        funcs.append(op.apply(prev) * (1.0 / amplitude))
        k_eff += 1
    return SequenceResult(k_values=ks[:k_eff], functions=funcs, k_effective=k_eff,
                          spectral=False, op_check_residual=None)


# ---------------------------------------------------------------------------
# Poisson characterization
# ---------------------------------------------------------------------------

@dataclass
class PoissonCharReport:
    z: complex
    depth: int
    is_eigenfunction: bool
    eigen_residual: float
    rel_residual: float | None = None
    boundary_norm: float | None = None
    boundary_values: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "depth": self.depth,
            "is_eigenfunction": self.is_eigenfunction,
            "eigen_residual": self.eigen_residual,
            "rel_residual": self.rel_residual,
            "boundary_norm": self.boundary_norm,
        }


def poisson_char_check(g_fun: VertexFunction, z: complex, depth: int,
                       p: float) -> PoissonCharReport:
    """Least-squares boundary data F with P_z F matching g on the depth ball.

    Preconditions that g is a gamma(z)-eigenfunction (relative residual
    below 1e-6 on the interior); true Poisson transforms round-trip their
    boundary data up to sector resolution.
    """
    g = g_fun.geometry
    gam = complex(gamma(g.q, z))
    lap = laplacian_apply(g_fun)
    r_eig = min(lap.valid_radius, depth)
    diff = lap - g_fun * gam
    denom = g_fun.sup_norm(r_eig)
    if denom == 0:
        raise DegenerateError("poisson characterization of the zero function")
    eig_resid = float(np.max(np.abs(diff.restricted(r_eig)))) / denom
    if eig_resid > 1e-6:
        return PoissonCharReport(z=z, depth=depth, is_eigenfunction=False,
                                 eigen_residual=eig_resid)

    hmat = height_matrix(g, depth)
    mass = 1.0 / ((g.q + 1) * g.q ** (depth - 1))
    design = np.exp(math.log(g.q) * (0.5 + 1j * z) * hmat.astype(float)) * mass
    b = g_fun.values[: int(g.offsets[depth + 1])]
    sol, _, rank, _ = np.linalg.lstsq(design, b, rcond=None)
    n_sec = design.shape[1]
    if rank < n_sec:
        raise DegenerateError(
            f"Poisson design matrix rank {rank} < {n_sec} sectors at depth {depth}")
    fit = design @ sol
    rel = float(np.linalg.norm(fit - b) / max(np.linalg.norm(b), 1e-300))
    pp = conjugate_index(p)
    if pp == math.inf:
        bnorm = float(np.max(np.abs(sol)))
    else:
        bnorm = float((np.sum(np.abs(sol) ** pp) * mass) ** (1.0 / pp))
    return PoissonCharReport(z=z, depth=depth, is_eigenfunction=True,
                             eigen_residual=eig_resid, rel_residual=rel,
                             boundary_norm=bnorm, boundary_values=sol)


# ---------------------------------------------------------------------------
# the end-to-end check
# ---------------------------------------------------------------------------

@dataclass
class StrichartzReport:
    scenario: Scenario
    verdict: str
    expected_verdict: str
    amplitude: float
    extrema: dict
    norm_table: list[dict]
    bounded: bool
    growth_per_step_backward: float | None
    growth_per_step_forward: float | None
    predicted_growth: float | None
    level_set: list[float]
    eigenvalues: list[complex]
    eigen_residuals: list[float]
    reconstruction_error: float | None
    poisson: list[dict]
    coefficient_recovery: list[dict]
    op_check_residual: float | None
    k_effective: int
    reasons: list[str]
    seed: int

    @property
    def matches_expected(self) -> bool:
        return self.verdict == self.expected_verdict

    def to_json_dict(self) -> dict:
        return {
            "name": self.scenario.name,
            "verdict": self.verdict,
            "expected_verdict": self.expected_verdict,
            "matches_expected": self.matches_expected,
            "amplitude": self.amplitude,
            "extrema": self.extrema,
            "norm_table": self.norm_table,
            "bounded": self.bounded,
            "growth_per_step_backward": self.growth_per_step_backward,
            "growth_per_step_forward": self.growth_per_step_forward,
            "predicted_growth": self.predicted_growth,
            "level_set": self.level_set,
            "eigenvalues": [[v.real, v.imag] for v in self.eigenvalues],
            "eigen_residuals": self.eigen_residuals,
            "reconstruction_error": self.reconstruction_error,
            "poisson": self.poisson,
            "coefficient_recovery": self.coefficient_recovery,
            "op_check_residual": self.op_check_residual,
            "k_effective": self.k_effective,
            "reasons": self.reasons,
            "seed": self.seed,
            "config": {
                "q": self.scenario.q, "R": self.scenario.R, "p": self.scenario.p,
                "multiplier": self.scenario.multiplier,
                "regime": self.scenario.regime,
                "direction": self.scenario.direction,
                "iterates": self.scenario.iterates,
                "amplitude_factor": self.scenario.amplitude_factor,
                "poisson_depth": self.scenario.poisson_depth,
                "track": self.scenario.track,
                "evolution": self.scenario.evolution,
            },
        }

    def norm_csv_rows(self) -> list[tuple]:
        rows = []
        for entry in self.norm_table:
            for nr in entry["norms"]:
                rows.append((entry["k"], nr["kind"], nr.get("r"), nr["radius"],
                             nr["value"], nr["stabilized"]))
        return rows


def _tracked_norms(f: VertexFunction, p: float, track: list[dict]) -> list[NormReport]:
    pp = conjugate_index(p)
    out = []
    for spec in track:
        kind = spec.get("kind", "weak")
        if kind == "weak":
            out.append(weak_lp_norm(f, pp))
        elif kind == "hardy":
            r = spec.get("r", math.inf)
            out.append(hardy_norm(f, p, math.inf if r in ("inf", None) else float(r)))
        else:
            raise ConfigError(f"track.kind must be weak|hardy, got {kind!r}")
    return out


def verify_strichartz(scenario: Scenario) -> StrichartzReport:
    scenario.validate()
    rng = np.random.default_rng(scenario.seed)
    g = build_tree(scenario.q, scenario.R)
    op = multiplier_from_spec(scenario.q, scenario.multiplier)
    extrema = symbol_extrema(op.symbol, scenario.p)
    base = extrema.max_mod if scenario.regime in ("max", "above_max") else extrema.min_mod
    amplitude = scenario.amplitude_factor * base
    reasons: list[str] = []

    resolved = resolve_terms(scenario, rng)
    seq = make_sequence(scenario, op, amplitude, g, resolved)

    norm_table = []
    primary_values = []
    for k, f in zip(seq.k_values, seq.functions):
        reports = _tracked_norms(f, scenario.p, scenario.track)
        primary_values.append(reports[0].value)
        norm_table.append({"k": k, "norms": [r.to_json_dict() for r in reports]})

    vals = np.array(primary_values)
    nonzero_seed = bool(np.max(np.abs(seq.functions[seq.k_values.index(0)].values)) > 0)
    bounded = bool(vals.max() < BOUNDEDNESS_RATIO * max(vals.min(), 1e-300)) if nonzero_seed else True

    # terminal consecutive ratios estimate the asymptotic per-step rate: the
    # fastest-growing spectral mode dominates at the far ends of the run
    i0 = seq.k_values.index(0)
    growth_back = None
    growth_fwd = None
    if i0 > 0 and vals[0] > 0 and vals[1] > 0:
        growth_back = float(vals[0] / vals[1])
    if i0 < len(vals) - 1 and vals[-1] > 0 and vals[-2] > 0:
        growth_fwd = float(vals[-1] / vals[-2])

    # predicted per-step growth from the seed's own spectral data
    predicted = None
    if resolved:
        mods = [abs(complex(op.symbol(z))) for _, z in resolved]
        if scenario.direction in ("backward", "bi"):
            predicted = amplitude / min(mods)
        else:
            predicted = max(mods) / amplitude

    growth_detected = any(r is not None and r > GROWTH_DETECT_RATIO
                          for r in (growth_back, growth_fwd))

    level_set: list[float] = []
    eigenvalues: list[complex] = []
    eigen_residuals: list[float] = []
    recon_err = None
    poisson_reports: list[dict] = []
    recovery: list[dict] = []

    if not nonzero_seed:
        verdict = "consistent"
        reasons.append("zero seed: trivially bounded sequence with f_0 = 0")
    elif growth_detected or not bounded:
        verdict = "hypothesis-violated"
        reasons.append(
            f"norm growth detected (backward {growth_back}, forward {growth_fwd}); "
            f"uniform boundedness fails")
    else:
        stabilized = all(nr["stabilized"] for e in norm_table for nr in e["norms"])
        f0 = seq.functions[i0]
        level_set = boundary_level_set(op.symbol, scenario.p, amplitude)
        dpp = -delta(scenario.p)
        gam_values = [complex(gamma(scenario.q, a + 1j * dpp)) for a in level_set]
        # merge level-set points sharing a gamma value (conjugate collapses)
        merged_alphas: list[float] = []
        merged_gammas: list[complex] = []
        for a, w in zip(level_set, gam_values):
            if all(abs(w - w2) > 1e-8 for w2 in merged_gammas):
                merged_alphas.append(a)
                merged_gammas.append(w)
        dec = eigen_decompose(f0, laplacian_op(scenario.q), merged_gammas, order=1)
        eigenvalues = list(dec.eigenvalues)
        recon_err = dec.reconstruction_error / max(f0.sup_norm(), 1e-300)
        for comp, w in zip(dec.components, dec.eigenvalues):
            scale = max(comp.sup_norm(), 1e-300)
            anni = laplacian_apply(comp) - comp * w
            eigen_residuals.append(anni.sup_norm() / max(f0.sup_norm(), 1e-300))
        for comp, a in zip(dec.components, merged_alphas):
            if comp.sup_norm() <= 1e-9 * f0.sup_norm():
                poisson_reports.append({"skipped": "component numerically zero",
                                        "alpha": a})
                continue
            rep = poisson_char_check(comp, complex(a, dpp), scenario.poisson_depth,
                                     scenario.p)
            poisson_reports.append(rep.to_json_dict())
        # planted coefficient recovery: component value at the root is the
        # coefficient since phi(o) = 1
        n_planted = len(scenario.planted)
        for coeff, z in resolved[:n_planted]:
            w = complex(gamma(scenario.q, z))
            best = None
            for comp, w2 in zip(dec.components, dec.eigenvalues):
                if abs(w - w2) < 1e-6:
                    best = comp
                    break
            if best is not None:
                err = abs(complex(best.values[0]) - coeff) / max(abs(coeff), 1e-300)
                recovery.append({"z": [z.real, z.imag],
                                 "coeff": [coeff.real, coeff.imag],
                                 "relative_error": err})

        checks_ok = (
            recon_err < RECON_TOL
            and all(r < EIGEN_CHECK_TOL for r in eigen_residuals)
            and all(("rel_residual" in pr and pr["rel_residual"] is not None
                     and pr["rel_residual"] < POISSON_TOL) or "skipped" in pr
                    for pr in poisson_reports)
        )
        if not stabilized:
            verdict = "inconclusive-truncation"
            reasons.append("norm stabilization flags unset at this radius")
        elif checks_ok:
            verdict = "consistent"
            reasons.append(
                "bounded sequence decomposed into boundary eigenfunctions "
                "matching the level set")
        else:
            verdict = "inconclusive-truncation"
            reasons.append(
                f"decomposition checks missed tolerance "
                f"(recon {recon_err}, eigen {eigen_residuals}); truncation suspected")

    return StrichartzReport(
        scenario=scenario, verdict=verdict, expected_verdict=scenario.expected_verdict,
        amplitude=float(amplitude), extrema=extrema.to_json_dict(),
        norm_table=norm_table, bounded=bounded,
        growth_per_step_backward=growth_back, growth_per_step_forward=growth_fwd,
        predicted_growth=predicted, level_set=[float(a) for a in level_set],
        eigenvalues=eigenvalues, eigen_residuals=eigen_residuals,
        reconstruction_error=recon_err, poisson=poisson_reports,
        coefficient_recovery=recovery, op_check_residual=seq.op_check_residual,
        k_effective=seq.k_effective, reasons=reasons, seed=scenario.seed)


def run_scenarios(scenarios: list[Scenario], jobs: int = 1) -> list[StrichartzReport]:
    """Run scenarios (optionally in parallel); output order follows input."""
    if jobs <= 1:
        return [verify_strichartz(s) for s in scenarios]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(verify_strichartz, scenarios))


#: scenario fields that may be supplied as top-level config defaults
CONFIG_DEFAULT_FIELDS = ("q", "R", "p", "seed", "poisson_depth", "iterates",
                         "evolution")


def scenarios_from_config(doc: dict, seed_override: int | None = None
                          ) -> list[Scenario]:
    """Parse a run-config document: top-level defaults plus a scenario list."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    raw = doc.get("scenarios")
    if not isinstance(raw, list) or not raw:
        raise ConfigError("config field 'scenarios' must be a non-empty list")
    unknown = set(doc) - set(CONFIG_DEFAULT_FIELDS) - {"scenarios", "output_dir",
                                                       "formats", "tolerances"}
    if unknown:
        raise ConfigError(f"config has unknown top-level fields: {sorted(unknown)}")
    out = []
    for i, sdoc in enumerate(raw):
        if not isinstance(sdoc, dict):
            raise ConfigError(f"scenario #{i} must be a JSON object")
        merged = dict(sdoc)
        for f in CONFIG_DEFAULT_FIELDS:
            if f not in merged and f in doc:
                merged[f] = doc[f]
        merged.setdefault("name", f"scenario_{i}")
        if seed_override is not None:
            merged["seed"] = seed_override
        out.append(Scenario.from_dict(merged))
    return out
