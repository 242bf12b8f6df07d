"""Command-line front end: single-point reports, parameter sweeps, anomaly and
harmonic diagnostics, and the acceptance suite.

Exit codes: 0 ok, 1 validation error, 2 verification failure, 3 internal
consistency (assertion) failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np

from . import acceptance, arith, dos, harmonics, lyapunov, pruefer
from .model import (
    ConfigurationError,
    DisorderSpec,
    DomainError,
    EnergyPoint,
    RngContract,
    make_energy_from_E,
    make_energy_from_k,
    parse_disorder,
    parse_seed,
)

SWEEP_COLUMNS = [
    "k", "E", "p", "q", "rho",
    "gamma_mc", "gamma_mc_se", "gamma_mc2", "gamma_mc2_se",
    "gamma_hat_inf", "gamma_hat_q_mc", "gamma_hat_q_mc_se",
    "gamma_hat_q_spectral", "trunc_err",
    "dos_rot", "dos_rot_se", "dos_pred", "dos_eig",
    "n_steps", "seed",
]

ANOMALY_COLUMNS = ["q", "p", "k", "E", "gamma_hat_q_spectral", "trunc_err",
                   "gamma_hat_inf", "abs_diff"]

# stream-index offsets so every estimator in a row draws from its own
# independent substream keyed by (row, estimator, replica)
_STREAM_TEL, _STREAM_MAT, _STREAM_HATQ, _STREAM_DOSROT, _STREAM_DOSEIG, _STREAM_DOSPRED = range(6)


class _CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise DomainError(message)


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _resolve_energy(args) -> tuple[EnergyPoint, tuple[int, int] | None]:
    """Energy point from --k-rational / --k / --E (exactly one), plus the
    rational label when known exactly or detected by classification."""
    given = [name for name, val in (("--k-rational", args.k_rational),
                                    ("--k", args.k), ("--E", args.E)) if val is not None]
    if len(given) != 1:
        raise DomainError(f"need exactly one of --k, --E, --k-rational (got {given or 'none'})")
    if args.k_rational is not None:
        p, q = arith.parse_rational(args.k_rational)
        return arith.energy_from_rational(p, q), (p, q)
    E = make_energy_from_k(args.k) if args.k is not None else make_energy_from_E(args.E)
    cls = arith.classify_k(E.k, q_max=args.q_max)
    pq = (cls.p, cls.q) if cls.is_rational else None
    return E, pq


def _classify_for_row(k: float, q_max: int) -> tuple[int, int] | None:
    cls = arith.classify_k(k, q_max=q_max)
    return (cls.p, cls.q) if cls.is_rational else None


def _auto_n_max(q: int, requested: int) -> int:
    # deep enough that the slowly-decaying measure harmonics are resolved
    return requested if requested > 0 else max(16, 128 // q)


def _compute_row(row_index: int, E: EnergyPoint, disorder: DisorderSpec,
                 pq: tuple[int, int] | None, args, base: RngContract) -> dict:
    """One full sweep row: both physical-chain estimators, the closed form,
    the rational-k exponents when applicable, and the DOS columns."""
    rng = base.spawn(row_index)
    n, reps = args.steps, args.replicas
    row = {c: "" for c in SWEEP_COLUMNS}
    row.update(k=E.k, E=E.E, rho=disorder.rho, n_steps=n, seed=base.master_seed)
    tel = lyapunov.gamma_mc_telescopic(E, disorder, n, burn_in=args.burn_in,
                                       rng=rng.spawn(_STREAM_TEL), replicas=reps)
    mat = lyapunov.gamma_mc_matrix_product(E, disorder, n, renorm_every=args.renorm_every,
                                           rng=rng.spawn(_STREAM_MAT), replicas=reps)
    atoms = disorder.with_rho(1.0)
    gi = lyapunov.gamma_hat_infinity(E, atoms)
    row.update(gamma_mc=tel.gamma.value, gamma_mc_se=tel.gamma.std_error,
               gamma_mc2=mat.gamma.value, gamma_mc2_se=mat.gamma.std_error,
               gamma_hat_inf=gi.gamma.value)
    if pq is not None and pq[1] <= args.q_max:
        p, q = pq
        row.update(p=p, q=q)
        hq = lyapunov.gamma_hat_q_mc(E, atoms, q, n, burn_in=args.burn_in,
                                     rng=rng.spawn(_STREAM_HATQ), replicas=reps)
        sp = lyapunov.gamma_hat_q_spectral(E, atoms, q, n_max=_auto_n_max(q, args.n_max))
        row.update(gamma_hat_q_mc=hq.gamma.value, gamma_hat_q_mc_se=hq.gamma.std_error,
                   gamma_hat_q_spectral=sp.gamma.value, trunc_err=sp.truncation_error)
    rot = dos.dos_rotation(E, disorder, n, burn_in=args.burn_in,
                           rng=rng.spawn(_STREAM_DOSROT), replicas=reps)
    law, q_arg = ("grid", pq[1]) if (pq is not None and pq[1] <= args.q_max) else ("lebesgue", None)
    pred = dos.dos_lowdensity(E, disorder, law=law, q=q_arg, n_grid=args.grid,
                              n_steps=max(n // 4, 10_000), burn_in=args.burn_in,
                              rng=rng.spawn(_STREAM_DOSPRED))
    eig = dos.dos_eigencount(E, disorder, args.box_size,
                             rng=rng.spawn(_STREAM_DOSEIG), replicas=max(reps, 4))
    row.update(dos_rot=rot.value, dos_rot_se=rot.error.std_error,
               dos_pred=pred.value, dos_eig=eig.value)
    return row


def _emit(rows: list[dict], columns: list[str], args, config: dict) -> None:
    header_lines = []
    if not args.no_timestamp:
        header_lines.append(f"# generated: {datetime.now(timezone.utc).isoformat()}")
    header_lines.append("# config: " + json.dumps(config, sort_keys=True))
    if args.format == "csv":
        buf = io.StringIO()
        for line in header_lines:
            buf.write(line + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in columns])
        text = buf.getvalue()
    else:
        payload = {"config": config, "rows": rows}
        if not args.no_timestamp:
            payload["generated"] = datetime.now(timezone.utc).isoformat()
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_echo(args, command: str) -> dict:
    # threads and the output path are execution context, not physics
    # parameters; excluding them keeps equal-config runs byte-identical
    skip = {"func", "out", "threads"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    cfg["command"] = command
    return cfg


def _print_kv(pairs):
    width = max(len(k) for k, _ in pairs)
    for key, val in pairs:
        print(f"  {key:<{width}}  {val}")


# ---------------------------------------------------------------------------
# commands


def cmd_lyapunov(args) -> int:
    E, pq = _resolve_energy(args)
    disorder = parse_disorder(args.dist, args.rho)
    base = RngContract(args.seed)
    row = _compute_row(0, E, disorder, pq, args, base)
    pairs = [("k", _fmt(E.k)), ("E", _fmt(E.E)), ("rho", _fmt(disorder.rho))]
    if pq:
        pairs.append(("p/q", f"{pq[0]}/{pq[1]}"))
    pairs += [
        ("gamma (telescopic)", f"{_fmt(row['gamma_mc'])} +- {_fmt(row['gamma_mc_se'])}"),
        ("gamma (matrix product)", f"{_fmt(row['gamma_mc2'])} +- {_fmt(row['gamma_mc2_se'])}"),
        ("gamma_hat_inf", _fmt(row["gamma_hat_inf"])),
    ]
    if disorder.rho > 0:
        pairs.append(("gamma/rho (telescopic)",
                      f"{_fmt(row['gamma_mc'] / disorder.rho)} +- "
                      f"{_fmt(row['gamma_mc_se'] / disorder.rho)}"))
    if row["gamma_hat_q_mc"] != "":
        pairs += [
            ("gamma_hat_q (MC)",
             f"{_fmt(row['gamma_hat_q_mc'])} +- {_fmt(row['gamma_hat_q_mc_se'])}"),
            ("gamma_hat_q (spectral)",
             f"{_fmt(row['gamma_hat_q_spectral'])} (trunc {_fmt(row['trunc_err'])})"),
        ]
    print("Lyapunov exponents:")
    _print_kv(pairs)
    if args.out:
        _emit([row], SWEEP_COLUMNS, args, _config_echo(args, "lyapunov"))
    return 0


def cmd_dos(args) -> int:
    E, pq = _resolve_energy(args)
    disorder = parse_disorder(args.dist, args.rho)
    base = RngContract(args.seed)
    row = _compute_row(0, E, disorder, pq, args, base)
    print("Integrated density of states:")
    _print_kv([
        ("k", _fmt(E.k)), ("E", _fmt(E.E)), ("rho", _fmt(disorder.rho)),
        ("rotation", f"{_fmt(row['dos_rot'])} +- {_fmt(row['dos_rot_se'])}"),
        ("low-density prediction", _fmt(row["dos_pred"])),
        ("eigencount", _fmt(row["dos_eig"])),
    ])
    if args.out:
        _emit([row], SWEEP_COLUMNS, args, _config_echo(args, "dos"))
    return 0


def cmd_anomaly(args) -> int:
    atoms = parse_disorder(args.dist, 1.0)
    rows = []
    for q in range(args.q_min, args.q_max + 1):
        p = arith.nearest_coprime_to_half(q)
        E = arith.energy_from_rational(p, q)
        n_max = args.n_max if args.n_max else max(6, 64 // q)
        sp = lyapunov.gamma_hat_q_spectral(E, atoms, q, n_max=n_max)
        gi = lyapunov.gamma_hat_infinity(E, atoms)
        rows.append({
            "q": q, "p": p, "k": E.k, "E": E.E,
            "gamma_hat_q_spectral": sp.gamma.value,
            "trunc_err": sp.truncation_error,
            "gamma_hat_inf": gi.gamma.value,
            "abs_diff": abs(sp.gamma.value - gi.gamma.value),
        })
    print(f"{'q':>3} {'p':>3} {'k':>10} {'gamma_hat_q':>14} {'gamma_hat_inf':>14} {'abs_diff':>12}")
    for r in rows:
        print(f"{r['q']:>3} {r['p']:>3} {r['k']:>10.6f} {r['gamma_hat_q_spectral']:>14.8f} "
              f"{r['gamma_hat_inf']:>14.8f} {r['abs_diff']:>12.3e}")
    if args.out:
        _emit(rows, ANOMALY_COLUMNS, args, _config_echo(args, "anomaly"))
    return 0


def cmd_harmonics(args) -> int:
    E, pq = _resolve_energy(args)
    if pq is None:
        raise DomainError("harmonics command needs a rational quasi-momentum "
                          "(--k-rational p/q, or a k within tolerance of one)")
    p, q = pq
    disorder = parse_disorder(args.dist, args.rho)
    atoms = disorder.with_rho(1.0)
    base = RngContract(args.seed)
    orbit = pruefer.run_orbit(E, disorder, args.steps, args.burn_in, base.spawn(0))
    I = harmonics.oscillatory_sums(orbit, args.m_max)
    horbit = pruefer.run_hat_orbit(E, atoms, "grid", args.steps, args.burn_in,
                                   base.spawn(1), q=q)
    Ih = harmonics.oscillatory_sums(horbit, args.m_max)
    sol = harmonics.solve_harmonic_system(E, atoms, q, n_max=args.n_max or max(16, 96 // q))
    coeffs = harmonics.transition_coeffs(E, atoms, m_max=2 * q + 1, l_max=args.l_max,
                                         n_grid=max(args.grid, 8 * (2 * q + 1 + args.l_max)))
    rep = harmonics.hat_transition_relation_check(coeffs, q)
    alt = harmonics.hat_transition_relation_check(
        coeffs, q, psi_grid=pruefer.printed_half_width_grid(q))
    print(f"harmonics at k = pi*{p}/{q}, rho = {disorder.rho}:")
    print(f"{'m':>3} {'|I_m| physical':>15} {'|I_m| hat':>12}")
    for m in range(1, args.m_max + 1):
        print(f"{m:>3} {abs(I[m]):>15.6f} {abs(Ih[m]):>12.6f}")
    print(f"solver J_n (n = 1..{min(4, len(sol.values) // 2)}):")
    for n in range(1, min(4, len(sol.values) // 2) + 1):
        print(f"  J_{n} = {sol[n]:.6f}   empirical hat I_{n * q} = {Ih.values.get(n * q, float('nan'))}")
    print(rep.summary())
    print("half-width printed grid diagnostic: " + alt.summary())
    if args.out:
        payload = {
            "config": _config_echo(args, "harmonics"),
            "physical_I": {str(m): [I[m].real, I[m].imag] for m in I.values},
            "hat_I": {str(m): [Ih[m].real, Ih[m].imag] for m in Ih.values},
            "J": {str(n): [sol[n].real, sol[n].imag] for n in sol.values},
            "hat_identity": {"passed": rep.passed,
                             "max_dev_multiples": rep.max_dev_multiples,
                             "max_mag_nonmultiples": rep.max_mag_nonmultiples},
            "printed_grid_identity": {"passed": alt.passed,
                                      "max_dev_multiples": alt.max_dev_multiples,
                                      "max_mag_nonmultiples": alt.max_mag_nonmultiples},
        }
        with open(args.out, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0


def _run_sweep(points: list[tuple[EnergyPoint, DisorderSpec]], args, command: str) -> int:
    base = RngContract(args.seed)

    def work(item):
        i, (E, disorder) = item
        pq = _classify_for_row(E.k, args.q_max)
        return _compute_row(i, E, disorder, pq, args, base)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as ex:
            rows = list(ex.map(work, enumerate(points)))
    else:
        rows = [work(item) for item in enumerate(points)]
    _emit(rows, SWEEP_COLUMNS, args, _config_echo(args, command))
    return 0


def cmd_sweep_energy(args) -> int:
    if args.k_count < 2:
        raise DomainError("sweep needs --k-count >= 2")
    if not (0.0 < args.k_min < args.k_max < math.pi):
        raise DomainError("need 0 < --k-min < --k-max < pi")
    ks = np.linspace(args.k_min, args.k_max, args.k_count)
    disorder = parse_disorder(args.dist, args.rho)
    points = [(make_energy_from_k(float(k)), disorder) for k in ks]
    return _run_sweep(points, args, "sweep-energy")


def cmd_sweep_density(args) -> int:
    E, _ = _resolve_energy(args)
    rhos = [float(x) for x in args.rho_list.split(",") if x.strip()]
    if len(rhos) < 1:
        raise DomainError("--rho-list needs at least one value")
    points = [(E, parse_disorder(args.dist, rho)) for rho in rhos]
    return _run_sweep(points, args, "sweep-density")


def cmd_verify(args) -> int:
    results, all_passed = acceptance.run_suite(args.suite, seed=args.seed)
    if args.out:
        payload = {
            "suite": args.suite,
            "seed": args.seed,
            "passed": all_passed,
            "criteria": [
                {"id": r.cid, "name": r.name, "passed": r.passed, "detail": r.lines}
                for r in results
            ],
        }
        with open(args.out, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0 if all_passed else 2


# ---------------------------------------------------------------------------


def _add_energy_flags(p):
    p.add_argument("--k", type=float, help="quasi-momentum in (0, pi)")
    p.add_argument("--E", type=float, help="energy in the open band (-2, 2)")
    p.add_argument("--k-rational", help="exact rational quasi-momentum p/q (k = pi p/q)")


def _add_common_flags(p, steps_default=10**6):
    p.add_argument("--dist", default="2:1", help='impurity atoms "v:w,v:w,..."')
    p.add_argument("--rho", type=float, default=0.05, help="impurity density in [0, 1]")
    p.add_argument("--steps", type=int, default=steps_default)
    p.add_argument("--burn-in", type=int, default=pruefer.DEFAULT_BURN_IN)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--seed", type=parse_seed, default=0,
                   help="64-bit master seed (decimal or 0x-hex)")
    p.add_argument("--m-max", type=int, default=8)
    p.add_argument("--l-max", type=int, default=24)
    p.add_argument("--n-max", type=int, default=0, help="harmonic window (0 = auto)")
    p.add_argument("--grid", type=int, default=4096, help="quadrature grid size")
    p.add_argument("--q-max", type=int, default=12,
                   help="largest denominator treated as rational")
    p.add_argument("--box-size", type=int, default=4096, help="eigencount box size")
    p.add_argument("--renorm-every", type=int, default=10)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="output path (default: stdout for sweeps)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-timestamp", action="store_true",
                   help="suppress the timestamp header line")


def build_parser() -> argparse.ArgumentParser:
    parser = _CliParser(prog="dilute-anderson",
                        description="Dilute-impurity Anderson chain toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lyapunov", help="Lyapunov exponents at one energy")
    _add_energy_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_lyapunov)

    p = sub.add_parser("dos", help="integrated density of states at one energy")
    _add_energy_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_dos)

    p = sub.add_parser("anomaly", help="rational-k anomaly table over q")
    p.add_argument("--q-min", type=int, default=2)
    _add_common_flags(p)
    p.set_defaults(func=cmd_anomaly)

    p = sub.add_parser("harmonics", help="oscillatory sums and measure harmonics")
    _add_energy_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_harmonics)

    p = sub.add_parser("sweep-energy", help="sweep a k-grid, one CSV row per point")
    p.add_argument("--k-min", type=float, required=True)
    p.add_argument("--k-max", type=float, required=True)
    p.add_argument("--k-count", type=int, required=True)
    _add_common_flags(p, steps_default=10**5)
    p.set_defaults(func=cmd_sweep_energy)

    p = sub.add_parser("sweep-density", help="sweep a rho list at fixed energy")
    _add_energy_flags(p)
    p.add_argument("--rho-list", required=True, help="comma-separated densities")
    _add_common_flags(p, steps_default=10**6)
    p.set_defaults(func=cmd_sweep_density)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", choices=("fast", "full"), default="fast")
    p.add_argument("--seed", type=parse_seed, default=acceptance.DEFAULT_SEED)
    p.add_argument("--out", help="write a JSON verdict here")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (DomainError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except harmonics.IllConditionedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
