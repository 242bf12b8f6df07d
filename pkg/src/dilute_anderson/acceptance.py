"""Acceptance suite: twelve numbered criteria, each an independent numerical
verification of the low-density perturbation theory or of the toolkit's
internal consistency.

Every statistical tolerance is written as (3 sigma + explicit allowance); the
frozen allowance constants below were calibrated once with high-statistics
oracle runs and are not tuned per run. The full suite reproduces the
calibration; the fast suite scales the chain lengths down for smoke testing.

Two criteria (1 and 11) assert anchor values that the toolkit's own
independent cross-checks (quadrature, two closed forms, two Monte Carlo
chains) contradict; they are reported honestly as failing, with the measured
values and the corrected anchors in their detail lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import arith, dos, harmonics, lyapunov, pruefer
from .model import DisorderSpec, RngContract, make_energy_from_E, make_energy_from_k, parse_disorder, pure_atoms

DEFAULT_SEED = 108

# frozen calibration constants (see module docstring)
C_RHO_LYAP = 1.0   # first-order-in-rho allowance for gamma/rho vs gamma_hat_q
C_HARM = 1.0       # |I_m| <= C_HARM * rho + 3 sigma for suppressed harmonics
C_DOS = 1.0        # |dos_rotation - dos_lowdensity| <= C_DOS * rho^2 + 3 sigma
EIG_BOUNDARY_C = 5.0  # |dos_rotation - dos_eigencount| <= pi * C / box + 3 sigma

GOLDEN_K = math.pi * (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    lines: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def summary(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.cid:2d} ({self.name})"


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = DEFAULT_SEED
    fast: bool = False

    def steps(self, full: int, floor: int = 10**5) -> int:
        return full if not self.fast else max(floor, full // 50)

    def rng(self, *idx: int) -> RngContract:
        return RngContract(self.seed).spawn(*idx)


def _within(value: float, target: float, tol: float) -> bool:
    return abs(value - target) <= tol


# ---------------------------------------------------------------------------


def criterion_01_closed_form_anchors(cfg: SuiteConfig) -> CriterionResult:
    """Stated closed-form anchors at E = 0: 1/2 ln 3 for delta_2 and
    1/2 ln(3/2) for delta_1, each to 1e-12."""
    E0 = make_energy_from_E(0.0)
    g2 = lyapunov.gamma_hat_infinity(E0, pure_atoms("2:1")).gamma.value
    g1 = lyapunov.gamma_hat_infinity(E0, pure_atoms("1:1")).gamma.value
    t2, t1 = 0.5 * math.log(3.0), 0.5 * math.log(1.5)
    ok = _within(g2, t2, 1e-12) and _within(g1, t1, 1e-12)
    lines = [
        f"gamma_hat_inf(E=0, delta_2) = {g2:.12f}, stated anchor {t2:.12f}",
        f"gamma_hat_inf(E=0, delta_1) = {g1:.12f}, stated anchor {t1:.12f}",
    ]
    if not ok:
        # the stated anchors come from evaluating log(average) instead of
        # average(log) in the circle integral; four independent routes agree
        # on 1/2 ln(1 + a/4), not 1/2 ln(1 + a/2)
        a0_2 = lyapunov.fourier_a(E0, pure_atoms("2:1"), 16, 1024)[0].real
        a0_1 = lyapunov.fourier_a(E0, pure_atoms("1:1"), 16, 1024)[0].real
        lines += [
            f"corrected anchors: 1/2 ln 2 = {0.5 * math.log(2.0):.12f} (delta_2), "
            f"1/2 ln(5/4) = {0.5 * math.log(1.25):.12f} (delta_1)",
            f"independent quadrature a_0: {a0_2:.12f} (delta_2), {a0_1:.12f} (delta_1)",
            "the stated anchors interchange log and circle average; the implementation "
            "keeps the exact integral (see also criteria 2-4, which cross-check it)",
        ]
    return CriterionResult(1, "closed-form anchors", ok, lines,
                           dict(delta2=g2, delta1=g1, stated=(t2, t1)))


def criterion_02_fourier_consistency(cfg: SuiteConfig) -> CriterionResult:
    """|a_0 - gamma_hat_inf| <= 1e-10 on 10 random parameter sets, and a
    positive fitted exponential decay rate with a valid envelope."""
    gen = cfg.rng(2).generator()
    lines = []
    ok = True
    for trial in range(10):
        k = float(gen.uniform(0.35, math.pi - 0.35))
        n_atoms = int(gen.integers(1, 4))
        vals = gen.uniform(0.5, 3.0, n_atoms) * gen.choice([-1.0, 1.0], n_atoms)
        wts = gen.uniform(0.2, 1.0, n_atoms)
        atoms = DisorderSpec(rho=1.0, atoms=tuple(
            (float(v), float(w)) for v, w in zip(vals, wts / wts.sum())
        ))
        E = make_energy_from_k(k)
        coeffs = lyapunov.fourier_a(E, atoms, m_max=24, n_grid=2048)
        gi = lyapunov.gamma_hat_infinity(E, atoms).gamma.value
        diff = abs(coeffs[0] - gi)
        c_env, xi = coeffs.decay_fit()
        envelope_ok = all(
            abs(coeffs[m]) <= c_env * math.exp(-xi * m) + 1e-15
            for m in range(coeffs.m_max + 1)
        )
        trial_ok = diff <= 1e-10 and xi > 0.0 and envelope_ok
        ok = ok and trial_ok
        lines.append(
            f"k={k:.4f} atoms={n_atoms}: |a_0 - gamma_inf|={diff:.2e}, xi={xi:.3f}"
            + ("" if trial_ok else "  <- FAIL")
        )
    return CriterionResult(2, "Fourier consistency a_0 = gamma_hat_inf", ok, lines)


def criterion_03_uniform_phase_law(cfg: SuiteConfig) -> CriterionResult:
    """Uniform-psi hat chain reproduces gamma_hat_inf within 3 sigma and its
    phases are uniform mod pi (KS distance <= 0.01)."""
    E0 = make_energy_from_E(0.0)
    atoms = pure_atoms("2:1")
    n = cfg.steps(10**6)
    orbit = pruefer.run_hat_orbit(E0, atoms, "uniform", n, rng=cfg.rng(3))
    from .model import batch_means

    est = batch_means(orbit.log_norms)
    gi = lyapunov.gamma_hat_infinity(E0, atoms).gamma.value
    ks = pruefer.ks_distance_uniform_mod_pi(orbit.thetas[1:])
    gamma_ok = abs(est.value - gi) <= 3.0 * est.std_error
    ks_ok = ks <= 0.01
    lines = [
        f"hat-chain gamma = {est.value:.6f} +- {est.std_error:.1e}, "
        f"closed form {gi:.6f} (|diff| = {abs(est.value - gi):.1e})",
        f"KS distance of phases mod pi from uniform: {ks:.5f} (limit 0.01)",
    ]
    return CriterionResult(3, "uniform-phase law", gamma_ok and ks_ok, lines,
                           dict(gamma=est.value, se=est.std_error, ks=ks))


def criterion_04_diophantine_branch(cfg: SuiteConfig) -> CriterionResult:
    """Golden-mean k: gamma/rho converges to gamma_hat_inf with decreasing
    residuals and a linear-in-rho fit intercept within 3 sigma."""
    E = make_energy_from_k(GOLDEN_K)
    atoms = pure_atoms("2:1")
    gi = lyapunov.gamma_hat_infinity(E, atoms).gamma.value
    n = cfg.steps(10**7)
    rhos = np.array([0.1, 0.05, 0.025])
    ratios, ses = [], []
    lines = [f"gamma_hat_inf = {gi:.6f}"]
    for i, rho in enumerate(rhos):
        d = parse_disorder("2:1", float(rho))
        r = lyapunov.gamma_mc_telescopic(E, d, n, rng=cfg.rng(4, i))
        ratios.append(r.gamma.value / rho)
        ses.append(r.gamma.std_error / rho)
        lines.append(
            f"rho={rho}: gamma/rho = {ratios[-1]:.6f} +- {ses[-1]:.1e}, "
            f"residual {abs(ratios[-1] - gi):.2e}"
        )
    ratios, ses = np.array(ratios), np.array(ses)
    residuals = np.abs(ratios - gi)
    decreasing = bool(residuals[0] > residuals[-1])
    # weighted linear fit ratio = intercept + slope * rho
    w = 1.0 / ses**2
    X = np.column_stack([np.ones_like(rhos), rhos])
    cov = np.linalg.inv(X.T @ (w[:, None] * X))
    beta = cov @ X.T @ (w * ratios)
    int_se = math.sqrt(cov[0, 0])
    fit_ok = abs(beta[0] - gi) <= 3.0 * int_se
    lines.append(
        f"fit intercept = {beta[0]:.6f} +- {int_se:.1e} (slope {beta[1]:+.3f}); "
        f"|intercept - gamma_hat_inf| = {abs(beta[0] - gi):.2e}"
    )
    return CriterionResult(4, "linear law, Diophantine branch", decreasing and fit_ok, lines)


def criterion_05_rational_branch(cfg: SuiteConfig) -> CriterionResult:
    """k = pi/2 and pi/3: gamma/rho at rho = 0.025 matches gamma_hat_q (not
    gamma_hat_inf), with the MC and spectral gamma_hat_q agreeing."""
    atoms = pure_atoms("2:1")
    rho = 0.025
    n = cfg.steps(10**7)
    ok = True
    lines = []
    for j, (p, q) in enumerate(((1, 2), (1, 3))):
        E = arith.energy_from_rational(p, q)
        d = parse_disorder("2:1", rho)
        tel = lyapunov.gamma_mc_telescopic(E, d, n, rng=cfg.rng(5, j, 0))
        mc = lyapunov.gamma_hat_q_mc(E, atoms, q, n, rng=cfg.rng(5, j, 1))
        sp = lyapunov.gamma_hat_q_spectral(E, atoms, q, n_max=max(16, 128 // q))
        gi = lyapunov.gamma_hat_infinity(E, atoms).gamma.value
        ratio = tel.gamma.value / rho
        ratio_se = tel.gamma.std_error / rho
        tol_ratio = 3.0 * ratio_se + rho * C_RHO_LYAP
        ratio_ok = abs(ratio - sp.gamma.value) <= tol_ratio
        cross_tol = 3.0 * mc.gamma.std_error + sp.truncation_error
        cross_ok = abs(mc.gamma.value - sp.gamma.value) <= cross_tol
        ok = ok and ratio_ok and cross_ok
        lines += [
            f"q={q}: gamma/rho = {ratio:.6f} +- {ratio_se:.1e}; gamma_hat_q "
            f"spectral {sp.gamma.value:.6f} (trunc {sp.truncation_error:.1e}), "
            f"MC {mc.gamma.value:.6f} +- {mc.gamma.std_error:.1e}",
            f"q={q}: |ratio - spectral| = {abs(ratio - sp.gamma.value):.2e} "
            f"(tol {tol_ratio:.2e}){'' if ratio_ok else '  <- FAIL'}; "
            f"|MC - spectral| = {abs(mc.gamma.value - sp.gamma.value):.2e} "
            f"(tol {cross_tol:.2e}){'' if cross_ok else '  <- FAIL'}; "
            f"gamma_hat_inf = {gi:.6f} sits {abs(ratio - gi) / max(ratio_se, 1e-12):.0f} sigma away",
        ]
    return CriterionResult(5, "linear law, rational branch", ok, lines)


def criterion_06_anomaly_decay(cfg: SuiteConfig) -> CriterionResult:
    """|gamma_hat_q - gamma_hat_inf| for q = 2..10 decays consistently with an
    exponential bound: negative least-squares slope of the log-difference."""
    atoms = pure_atoms("2:1")
    qs, diffs = [], []
    lines = []
    for q in range(2, 11):
        p = arith.nearest_coprime_to_half(q)
        E = arith.energy_from_rational(p, q)
        n_max = max(6, 64 // q) if not cfg.fast else max(4, 32 // q)
        sp = lyapunov.gamma_hat_q_spectral(E, atoms, q, n_max=n_max)
        gi = lyapunov.gamma_hat_infinity(E, atoms).gamma.value
        diff = abs(sp.gamma.value - gi)
        qs.append(q)
        diffs.append(max(diff, 1e-14))
        lines.append(f"q={q} (p={p}): |gamma_hat_q - gamma_hat_inf| = {diff:.3e}")
    slope = float(np.polyfit(np.array(qs, dtype=float), np.log(np.array(diffs)), 1)[0])
    trend = diffs[-1] < diffs[0]
    lines.append(f"least-squares slope of log-difference vs q: {slope:+.3f}")
    return CriterionResult(6, "anomaly existence and decay", slope < 0.0 and trend, lines,
                           dict(qs=qs, diffs=diffs, slope=slope))


def criterion_07_harmonic_structure(cfg: SuiteConfig) -> CriterionResult:
    """k = pi/3, rho = 0.05: suppressed harmonics are O(rho); hat-chain
    harmonics vanish off multiples of 3; solver J_1 matches the empirical
    hat-chain I_3 within 3 sigma."""
    E = arith.energy_from_rational(1, 3)
    atoms = pure_atoms("2:1")
    rho = 0.05
    n = cfg.steps(10**7)
    orbit = pruefer.run_orbit(E, parse_disorder("2:1", rho), n, rng=cfg.rng(7, 0))
    I = harmonics.oscillatory_sums(orbit, m_max=5)
    ok = True
    lines = []
    for m in (1, 2, 4, 5):
        bound = C_HARM * rho + 3.0 * I.std_errors[m]
        m_ok = abs(I[m]) <= bound
        ok = ok and m_ok
        lines.append(f"|I_{m}| = {abs(I[m]):.4f} (bound {bound:.4f})"
                     + ("" if m_ok else "  <- FAIL"))
    horbit = pruefer.run_hat_orbit(E, atoms, "grid", n, rng=cfg.rng(7, 1), q=3)
    Ih = harmonics.oscillatory_sums(horbit, m_max=5)
    for m in (1, 2, 4, 5):
        m_ok = abs(Ih[m]) <= 3.0 * Ih.std_errors[m]
        ok = ok and m_ok
        lines.append(f"hat |I_{m}| = {abs(Ih[m]):.2e} (3 sigma = {3 * Ih.std_errors[m]:.1e})"
                     + ("" if m_ok else "  <- FAIL"))
    sol = harmonics.solve_harmonic_system(E, atoms, q=3, n_max=64 if cfg.fast else 256)
    jdiff = abs(sol[1] - Ih[3])
    j_ok = jdiff <= 3.0 * Ih.std_errors[3]
    ok = ok and j_ok
    lines.append(
        f"J_1 = {sol[1]:.6f} vs empirical I_3 = {Ih[3]:.6f} "
        f"(|diff| = {jdiff:.2e}, 3 sigma = {3 * Ih.std_errors[3]:.1e})"
        + ("" if j_ok else "  <- FAIL")
    )
    return CriterionResult(7, "harmonic structure at k = pi/3", ok, lines)


def criterion_08_hat_grid_identity(cfg: SuiteConfig) -> CriterionResult:
    """The q-periodic coefficient identity holds at 1e-10 for the implemented
    pi/q grid (q = 2..5); the half-width printed grid is reported as the
    documented counter-diagnostic."""
    atoms = pure_atoms("2:1")
    ok = True
    lines = []
    for q in range(2, 6):
        E = arith.energy_from_rational(1, q)
        coeffs = harmonics.transition_coeffs(E, atoms, m_max=2 * q + 1, l_max=20,
                                             n_grid=1024)
        rep = harmonics.hat_transition_relation_check(coeffs, q)
        ok = ok and rep.passed
        lines.append(rep.summary())
        alt = harmonics.hat_transition_relation_check(
            coeffs, q, psi_grid=pruefer.printed_half_width_grid(q)
        )
        lines.append(f"  half-width printed grid diagnostic: {alt.summary()}")
    return CriterionResult(8, "hat-grid coefficient identity", ok, lines)


def criterion_09_dos_anchors(cfg: SuiteConfig) -> CriterionResult:
    """DOS anchors: rotation number equals k at rho = 0; Sturm equals the
    dense Jacobi count exactly; rotation vs eigencount at O(1/N); low-density
    formula matches rotation within C rho^2 + 3 sigma on both branches."""
    atoms = pure_atoms("2:1")
    lines = []
    ok = True

    Eg = make_energy_from_k(GOLDEN_K)
    free = dos.dos_rotation(Eg, parse_disorder("2:1", 0.0), cfg.steps(10**5), rng=cfg.rng(9, 0))
    anchor_ok = abs(free.value - Eg.k) <= 1e-12
    ok = ok and anchor_ok
    lines.append(f"rotation number at rho=0: {free.value!r} vs k={Eg.k!r}"
                 + ("" if anchor_ok else "  <- FAIL"))

    gen = cfg.rng(9, 1).generator()
    n_mats = 1000 if not cfg.fast else 200
    mismatches = 0
    for _ in range(n_mats):
        size = int(gen.integers(2, 65))
        d = parse_disorder("2:1", float(gen.uniform(0.0, 1.0)))
        v = pruefer.sample_potentials(d, size, gen)
        shift = float(gen.uniform(-2.5, 2.5))
        if dos.sturm_count(v - shift) != dos.jacobi_count(v - shift):
            mismatches += 1
    sturm_ok = mismatches == 0
    ok = ok and sturm_ok
    lines.append(f"Sturm vs dense Jacobi count: {mismatches} mismatches in {n_mats} random boxes"
                 + ("" if sturm_ok else "  <- FAIL"))

    d = parse_disorder("2:1", 0.1)
    box = 10**4
    rot = dos.dos_rotation(Eg, d, cfg.steps(10**6), rng=cfg.rng(9, 2))
    eig = dos.dos_eigencount(Eg, d, box, rng=cfg.rng(9, 3), replicas=8)
    tol = math.pi * EIG_BOUNDARY_C / box + 3.0 * math.hypot(rot.error.std_error,
                                                            eig.error.std_error)
    eig_ok = abs(rot.value - eig.value) <= tol
    ok = ok and eig_ok
    lines.append(f"|rotation - eigencount| = {abs(rot.value - eig.value):.2e} (tol {tol:.2e})"
                 + ("" if eig_ok else "  <- FAIL"))

    E3 = arith.energy_from_rational(1, 3)
    for name, E, law, q in (("golden/lebesgue", Eg, "lebesgue", None),
                            ("pi/3 grid", E3, "grid", 3)):
        for i, rho in enumerate((0.1, 0.05)):
            dd = parse_disorder("2:1", rho)
            rot = dos.dos_rotation(E, dd, cfg.steps(10**7), rng=cfg.rng(9, 4, i, q or 0))
            pred = dos.dos_lowdensity(E, dd, law=law, q=q, n_steps=cfg.steps(2 * 10**6),
                                      rng=cfg.rng(9, 5, i, q or 0))
            se = math.hypot(rot.error.std_error, pred.error.std_error)
            tol = C_DOS * rho**2 + 3.0 * se
            branch_ok = abs(rot.value - pred.value) <= tol
            ok = ok and branch_ok
            lines.append(
                f"{name} rho={rho}: |rotation - prediction| = "
                f"{abs(rot.value - pred.value):.2e} (tol {tol:.2e})"
                + ("" if branch_ok else "  <- FAIL")
            )
    return CriterionResult(9, "density-of-states anchors", ok, lines)


def criterion_10_estimator_equivalence(cfg: SuiteConfig) -> CriterionResult:
    """Telescopic vs matrix-product estimators agree within 3 combined sigma on
    20 random parameter sets; the telescopic estimate is theta_0-independent."""
    gen = cfg.rng(10).generator()
    n = cfg.steps(2 * 10**5)
    ok = True
    lines = []
    worst = 0.0
    for trial in range(20):
        k = float(gen.uniform(0.3, math.pi - 0.3))
        rho = float(gen.uniform(0.05, 0.5))
        v = float(gen.uniform(0.5, 2.5) * gen.choice([-1.0, 1.0]))
        E = make_energy_from_k(k)
        d = DisorderSpec(rho=rho, atoms=((v, 1.0),))
        tel = lyapunov.gamma_mc_telescopic(E, d, n, rng=cfg.rng(10, trial, 0))
        mat = lyapunov.gamma_mc_matrix_product(E, d, n, rng=cfg.rng(10, trial, 1))
        sigma = math.hypot(tel.gamma.std_error, mat.gamma.std_error)
        pull = abs(tel.gamma.value - mat.gamma.value) / max(sigma, 1e-300)
        worst = max(worst, pull)
        if pull > 3.0:
            ok = False
            lines.append(f"set {trial}: k={k:.3f} rho={rho:.3f} v={v:+.2f}: "
                         f"pull {pull:.2f} sigma  <- FAIL")
    lines.insert(0, f"20 parameter sets, worst telescopic-vs-matrix pull: {worst:.2f} sigma")

    E = make_energy_from_k(1.234)
    d = parse_disorder("2:1", 0.1)
    runs = [
        lyapunov.gamma_mc_telescopic(E, d, n, rng=cfg.rng(10, 100, j), theta0=th)
        for j, th in enumerate((0.0, 0.7, 2.0))
    ]
    for a in range(3):
        for b in range(a + 1, 3):
            sigma = math.hypot(runs[a].gamma.std_error, runs[b].gamma.std_error)
            pull = abs(runs[a].gamma.value - runs[b].gamma.value) / max(sigma, 1e-300)
            if pull > 3.0:
                ok = False
                lines.append(f"theta0 pair ({a},{b}): pull {pull:.2f} sigma  <- FAIL")
    lines.append("theta_0 in {0, 0.7, 2.0}: estimates agree pairwise within 3 sigma"
                 if ok else "theta_0 independence violated")
    return CriterionResult(10, "estimator equivalence", ok, lines)


def criterion_11_band_center_linearity(cfg: SuiteConfig) -> CriterionResult:
    """Stated band-center linearity: gamma(rho, 0)/rho constant within 3 sigma
    across rho in {0.1..0.5}; the constant reported alongside gamma_hat_2(0)."""
    E0 = make_energy_from_E(0.0)
    atoms = pure_atoms("2:1")
    n = cfg.steps(10**7)
    rhos = (0.1, 0.2, 0.3, 0.4, 0.5)
    ratios, ses = [], []
    lines = []
    for i, rho in enumerate(rhos):
        d = parse_disorder("2:1", rho)
        r = lyapunov.gamma_mc_telescopic(E0, d, n, rng=cfg.rng(11, i))
        ratios.append(r.gamma.value / rho)
        ses.append(r.gamma.std_error / rho)
        lines.append(f"rho={rho}: gamma/rho = {ratios[-1]:.6f} +- {ses[-1]:.1e}")
    ratios_arr, ses_arr = np.array(ratios), np.array(ses)
    w = 1.0 / ses_arr**2
    mean = float(np.sum(w * ratios_arr) / np.sum(w))
    pulls = np.abs(ratios_arr - mean) / ses_arr
    ok = bool(np.all(pulls <= 3.0))
    sp2 = lyapunov.gamma_hat_q_spectral(E0, atoms, q=2, n_max=32 if not cfg.fast else 16)
    full = lyapunov.gamma_mc_telescopic(E0, parse_disorder("2:1", 1.0),
                                        cfg.steps(10**6), rng=cfg.rng(11, 99))
    lines += [
        f"weighted mean ratio = {mean:.6f}, worst pull {float(pulls.max()):.1f} sigma",
        f"reported alongside: gamma_hat_2(0) = {sp2.gamma.value:.6f}, "
        f"gamma(rho=1, 0) = {full.gamma.value:.2e} +- {full.gamma.std_error:.1e}",
    ]
    if not ok:
        lines += [
            "the ratio decreases with rho (impurity-gap parity is rho-dependent), so the "
            "stated exact linearity does not hold for strong single-atom impurities;",
            "the rho -> 0 limit of the ratio does agree with gamma_hat_2(0), consistent "
            "with the rational-branch law at q = 2",
        ]
    return CriterionResult(11, "band-center linearity probe", ok, lines,
                           dict(ratios=ratios, ses=ses, gamma_hat_2=sp2.gamma.value))


def criterion_12_determinism(cfg: SuiteConfig) -> CriterionResult:
    """Repeated sweep runs with a fixed seed are byte-identical, threaded or
    not, once the timestamp header is suppressed."""
    import tempfile
    from pathlib import Path

    from . import cli

    lines = []
    with tempfile.TemporaryDirectory() as tmp:
        paths = [Path(tmp) / f"sweep{i}.csv" for i in range(3)]
        base = [
            "sweep-energy", "--k-min", "1.0", "--k-max", "2.0", "--k-count", "3",
            "--rho", "0.1", "--dist", "2:1", "--steps", "20000", "--burn-in", "1000",
            "--seed", str(cfg.seed), "--no-timestamp", "--q-max", "8",
            "--box-size", "512",
        ]
        rc0 = cli.main(base + ["--threads", "1", "--out", str(paths[0])])
        rc1 = cli.main(base + ["--threads", "1", "--out", str(paths[1])])
        rc2 = cli.main(base + ["--threads", "4", "--out", str(paths[2])])
        blobs = [p.read_bytes() for p in paths]
    repeat_ok = rc0 == rc1 == rc2 == 0 and blobs[0] == blobs[1]
    thread_ok = blobs[0] == blobs[2]
    lines.append(f"repeat run byte-identical: {repeat_ok}")
    lines.append(f"threaded (4) vs unthreaded byte-identical: {thread_ok}")
    return CriterionResult(12, "sweep determinism", repeat_ok and thread_ok, lines)


CRITERIA = (
    criterion_01_closed_form_anchors,
    criterion_02_fourier_consistency,
    criterion_03_uniform_phase_law,
    criterion_04_diophantine_branch,
    criterion_05_rational_branch,
    criterion_06_anomaly_decay,
    criterion_07_harmonic_structure,
    criterion_08_hat_grid_identity,
    criterion_09_dos_anchors,
    criterion_10_estimator_equivalence,
    criterion_11_band_center_linearity,
    criterion_12_determinism,
)


def run_suite(suite: str = "full", seed: int = DEFAULT_SEED, verbose: bool = True):
    """Run all criteria; returns (results, all_passed)."""
    if suite not in ("fast", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    cfg = SuiteConfig(seed=seed, fast=(suite == "fast"))
    results = []
    for fn in CRITERIA:
        res = fn(cfg)
        results.append(res)
        if verbose:
            print(res.summary())
            for line in res.lines:
                print(f"    {line}")
    all_passed = all(r.passed for r in results)
    if verbose:
        n_pass = sum(r.passed for r in results)
        print(f"\n{n_pass}/{len(results)} criteria passed ({suite} suite)")
    return results, all_passed
