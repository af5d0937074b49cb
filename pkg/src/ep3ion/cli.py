"""Command-line surface: one subcommand per analysis pipeline.

Every run resolves a ParamConfig (file, then flag overrides), executes
its pipeline, and writes CSV tables, rendered figures, and a sibling
``.manifest`` recording content hashes.  All randomness derives from
the master seed through per-task counter streams, so serial reruns and
reordered sweeps produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

import ep3ion
from ep3ion import linalg, liouvillian, plots, quench, reports, spectroscopy, tomography, validate
from ep3ion.config import TWO_PI, ConfigError, ParamConfig, load_config
from ep3ion.model import AuxParams, SystemParams, build_heff

_STOCHASTIC = ("spectroscopy", "winding", "tomography", "quench", "liouvillian")


def _ratio_range(text: str) -> np.ndarray:
    """Parse '1.2' or 'start:stop:count' into a ratio array."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            count = int(parts[2])
            if count < 1:
                raise ValueError
            return np.linspace(float(parts[0]), float(parts[1]), count)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(
        f"expected VALUE or START:STOP:COUNT, got {text!r}"
    )


def _sym_params(c: ParamConfig, ratio: float | None = None,
                delta0: float = 0.0, delta1: float = 0.0) -> SystemParams:
    omega = (ratio if ratio is not None else c.omega_over_gamma) * c.gamma
    return SystemParams(
        omega1=omega, omega2=omega, gamma1=c.gamma, gamma2=2.0 * c.gamma,
        delta0=delta0, delta1=delta1,
    )


def _aux_params(c: ParamConfig, delta_a: float = 0.0) -> AuxParams:
    return AuxParams(
        omega_a=c.omega_a, delta_a=delta_a, gamma_a=c.gamma_a,
        branch_f=c.branch_f, n0=c.n0,
    )


def _task_rng(c: ParamConfig, task: int) -> np.random.Generator:
    seed = c.seed if c.seed is not None else 0
    return np.random.default_rng([seed, task])


def _noisy(c: ParamConfig) -> bool:
    return c.mode == "shot_noise"


class _Run:
    """Collects outputs of one subcommand and writes the manifest."""

    def __init__(self, command: str, c: ParamConfig, outdir: str) -> None:
        os.makedirs(outdir, exist_ok=True)
        self.outdir = outdir
        self.manifest = reports.RunManifest(
            command=command, config_sha256=c.sha256(), seed=c.seed,
            version=ep3ion.__version__,
        )
        words = command.split()
        self._name = words[1] if len(words) > 1 else words[0]

    def path(self, name: str) -> str:
        return os.path.join(self.outdir, name)

    def csv(self, name: str, header, rows) -> str:
        path = self.path(name)
        digest = reports.write_csv(path, header, rows)
        self.manifest.add(path, digest)
        return path

    def figure(self, name: str, draw) -> str:
        path = self.path(name)
        draw(path)
        self.manifest.add(path)
        return path

    def text(self, name: str, content: str) -> str:
        path = self.path(name)
        with open(path, "wb") as fh:
            fh.write(content.encode("utf-8"))
        self.manifest.add(path)
        return path

    def finish(self) -> None:
        path = self.path(f"{self._name}.manifest")
        self.manifest.write(path)
        print(f"wrote {len(self.manifest.outputs)} files + manifest to {self.outdir}")


def _fit_report_rows(fit: spectroscopy.FitResult, c: ParamConfig) -> tuple[list[str], list[list]]:
    header = [
        "line", "omega_mhz", "gamma1_mhz", "gamma2_mhz", "n0", "delta0_mhz",
        "delta1_mhz", "gamma_clamped", "re_e1_mhz", "im_e1_mhz", "re_e2_mhz",
        "im_e2_mhz", "re_e3_mhz", "im_e3_mhz", "loss", "converged",
    ]
    rows = []
    for i, lp in enumerate(fit.lines):
        es = spectroscopy.eigenenergies_from_fit(fit, i)
        rows.append([
            i, lp.omega / TWO_PI, lp.gamma1 / TWO_PI, lp.gamma2 / TWO_PI, lp.n0,
            lp.delta0 / TWO_PI, lp.delta1 / TWO_PI, int(fit.gamma_clamped[i]),
            es.values[0].real / TWO_PI, es.values[0].imag / TWO_PI,
            es.values[1].real / TWO_PI, es.values[1].imag / TWO_PI,
            es.values[2].real / TWO_PI, es.values[2].imag / TWO_PI,
            fit.loss, int(fit.converged),
        ])
    return header, rows


def run_spectrum(c: ParamConfig, ratios: np.ndarray, outdir: str, command: str) -> int:
    run = _Run(command, c, outdir)
    energies = np.empty((len(ratios), 3), dtype=complex)
    for k, ratio in enumerate(ratios):
        energies[k] = linalg.eig(build_heff(_sym_params(c, float(ratio)))).values
    rows = [
        [r, e[0].real / TWO_PI, e[0].imag / TWO_PI, e[1].real / TWO_PI,
         e[1].imag / TWO_PI, e[2].real / TWO_PI, e[2].imag / TWO_PI]
        for r, e in zip(ratios, energies)
    ]
    run.csv("spectrum.csv", [
        "omega_over_gamma", "re_e1_mhz", "im_e1_mhz", "re_e2_mhz", "im_e2_mhz",
        "re_e3_mhz", "im_e3_mhz",
    ], rows)
    run.figure("spectrum.png", lambda p: plots.plot_spectrum(ratios, energies, c.gamma, p))
    run.finish()
    return 0


def run_spectroscopy(c: ParamConfig, outdir: str, command: str) -> int:
    run = _Run(command, c, outdir)
    p = _sym_params(c)
    aux = _aux_params(c)
    grid = spectroscopy.default_detuning_grid(c.grid_points, c.grid_span)
    line = spectroscopy.synth_line(
        p, aux, c.t_evolve, grid, shots=c.shots, rounds=c.rounds,
        rng=_task_rng(c, 0), exact=not _noisy(c),
    )
    run.csv("line.csv", ["delta_a_MHz", "na_mean", "na_std", "shots", "rounds", "t_us"], [
        [d / TWO_PI, m, s, line.shots, line.rounds, line.t_evolve]
        for d, m, s in zip(line.detunings, line.populations, line.errbars)
    ])
    init = [spectroscopy.LineParams(omega=c.omega, gamma1=c.gamma, gamma2=2.0 * c.gamma)]
    fit = spectroscopy.fit_spectra([line], aux, init, restarts=c.restarts, rng=_task_rng(c, 1))
    header, rows = _fit_report_rows(fit, c)
    run.csv("line_fit.csv", header, rows)
    fitted_curve = fit.lines[0].n0 * spectroscopy.na_tgt_curve(
        fit.lines[0].to_system(), aux, c.t_evolve, grid
    ) / aux.n0
    run.figure("line.png", lambda path: plots.plot_line(
        grid, line.populations, line.errbars if _noisy(c) else None, fitted_curve, path))
    run.finish()
    return 0


def _winding_triplets(c: ParamConfig, thetas: np.ndarray) -> np.ndarray:
    """Eigenvalue triplets along the detuning loop, exact or refitted."""
    if not _noisy(c):
        triplets = np.empty((len(thetas), 3), dtype=complex)
        for k, th in enumerate(thetas):
            p = _sym_params(c, delta0=c.delta_r * np.cos(th),
                            delta1=c.delta_r * np.sin(th))
            triplets[k] = linalg.eig(build_heff(p)).values
        return triplets
    aux = _aux_params(c)
    grid = spectroscopy.default_detuning_grid(c.grid_points, c.grid_span)
    fitted = []
    for k, th in enumerate(thetas):
        d0 = c.delta_r * np.cos(th)
        d1 = c.delta_r * np.sin(th)
        p = _sym_params(c, delta0=d0, delta1=d1)
        line = spectroscopy.synth_line(
            p, aux, c.t_evolve, grid, shots=c.shots, rounds=c.rounds,
            rng=_task_rng(c, 100 + k),
        )
        init = [spectroscopy.LineParams(
            omega=c.omega, gamma1=c.gamma, gamma2=2.0 * c.gamma, delta0=d0, delta1=d1,
        )]
        fit = spectroscopy.fit_spectra(
            [line], aux, init, restarts=c.restarts, rng=_task_rng(c, 10_000 + k),
        )
        fitted.append(fit.lines[0])
    return spectroscopy.pooled_loop_triplets(fitted)


def run_winding(c: ParamConfig, outdir: str, command: str) -> int:
    run = _Run(command, c, outdir)
    thetas = np.arange(c.loop_points) * (TWO_PI / c.loop_points)
    triplets = _winding_triplets(c, thetas)
    bs = spectroscopy.track_bands(thetas, triplets)
    e_b = complex(c.e_b_re, c.e_b_im)
    windings = [spectroscopy.winding_number(bs, e_b, band) for band in range(3)]
    run.csv("winding_bands.csv", [
        "theta_rad", "re_e1_mhz", "im_e1_mhz", "re_e2_mhz", "im_e2_mhz",
        "re_e3_mhz", "im_e3_mhz",
    ], [
        [th, b[0].real / TWO_PI, b[0].imag / TWO_PI, b[1].real / TWO_PI,
         b[1].imag / TWO_PI, b[2].real / TWO_PI, b[2].imag / TWO_PI]
        for th, b in zip(bs.thetas, bs.bands)
    ])
    run.csv("winding_summary.csv", ["band", "winding", "m", "ambiguous"], [
        [band, w, bs.m, int(bs.ambiguous)] for band, w in enumerate(windings)
    ])
    run.figure("winding.png", lambda path: plots.plot_bands(
        bs.thetas, bs.bands, e_b, windings, bs.m, path))
    run.finish()
    print(f"m = {bs.m}; W = {[f'{w:.4f}' for w in windings]}; sum = {sum(windings):.6f}")
    return 0


def run_tomography(c: ParamConfig, outdir: str, command: str) -> int:
    run = _Run(command, c, outdir)
    p = _sym_params(c)
    grids = {k: tomography.default_grid(k, c.scan_points) for k in ("z", "x", "zero")}
    record: dict = {}
    states = tomography.extract_eigenstates(
        p, grids=grids, shots=c.shots if _noisy(c) else None,
        rng=_task_rng(c, 0) if _noisy(c) else None,
        flip_prob=c.flip_prob if _noisy(c) else 0.0, record=record,
    )
    scan_rows = []
    for kind, (grid, values, zeros) in sorted(record.items()):
        for angle, value in zip(grid, values):
            scan_rows.append([kind, c.omega_over_gamma, angle, value, ""])
        for z in zeros:
            scan_rows.append([kind, c.omega_over_gamma, z.angle, 0.0, int(z.excluded)])
    run.csv("tomography_scan.csv",
            ["kind", "omega_over_gamma", "angle_rad", "delta_rho_n2", "excluded"],
            scan_rows)
    state_rows = []
    for label, psi, phi in (
        ("plus", states.psi_plus, states.phi_plus),
        ("minus", states.psi_minus, states.phi_minus),
        ("zero", states.psi_zero, states.phi_zero),
    ):
        if psi is None:
            continue
        state_rows.append([
            label, phi, psi[0].real, psi[0].imag, psi[1].real, psi[1].imag,
            psi[2].real, psi[2].imag,
        ])
    run.csv("tomography_states.csv", [
        "state", "angle_rad", "re_c0", "im_c0", "re_c1", "im_c1", "re_c2", "im_c2",
    ], state_rows)
    if states.complete:
        ips = tomography.inner_products(states)
        run.csv("tomography_overlaps.csv", ["pair", "abs_inner_product"], [
            ["minus_plus", ips[0]], ["plus_zero", ips[1]], ["minus_zero", ips[2]],
        ])
        print(f"overlaps: |<-|+>| = {ips[0]:.4f}, |<+|0>| = {ips[1]:.4f}, |<-|0>| = {ips[2]:.4f}")
    else:
        print("warning: extraction incomplete; overlaps not written", file=sys.stderr)
    for kind, (grid, values, zeros) in sorted(record.items()):
        run.figure(f"tomography_{kind}.png", lambda path, k=kind, g=grid, v=values, zs=zeros:
                   plots.plot_tomography(g, v, [z.angle for z in zs],
                                         [z.excluded for z in zs], k, path))
    run.finish()
    return 0


def run_quench(c: ParamConfig, family: str, outdir: str, command: str) -> int:
    run = _Run(command, c, outdir)
    p = _sym_params(c)
    gamma_t = np.linspace(0.0, c.quench_tmax, c.quench_points)
    ts = gamma_t / c.gamma
    if family == "h_eff":
        if _noisy(c):
            values = quench.sample_rho03(p, ts, shots=c.shots, rng=_task_rng(c, 0),
                                         flip_prob=c.flip_prob)
        else:
            values = quench.rho03_closed(p.omega1, c.gamma, ts)
        ylabel = "$|\\rho_{03}|$"
    else:
        values = liouvillian.detect_ep3(
            p, ts, shots=c.shots if _noisy(c) else None,
            rng=_task_rng(c, 0) if _noisy(c) else None,
            flip_prob=c.flip_prob if _noisy(c) else 0.0,
        )
        ylabel = "$\\rho_{12}-\\rho_{01}$"
    run.csv("quench_samples.csv", ["gamma_t", "value"],
            [[x, v] for x, v in zip(gamma_t, values)])
    fit = quench.fit_quench(np.column_stack([gamma_t, values]), family, rng=_task_rng(c, 1))
    b_true = quench.true_b(c.omega_over_gamma, family)
    run.csv("quench_fit.csv", [
        "family", "model", "a", "b", "c", "residual", "ci95_b", "converged", "b_true",
    ], [[family, fit.model, fit.a, fit.b, fit.c if fit.c is not None else "",
         fit.residual, fit.ci95_b, int(fit.converged), b_true]])
    fitted = quench._model_curve(fit.model, gamma_t, fit.a, fit.b, fit.c)
    run.figure("quench.png", lambda path: plots.plot_quench(gamma_t, values, fitted, ylabel, path))
    run.finish()
    print(f"family {family}: model {fit.model}, B = {fit.b:.5f} (true {b_true:.5f}), "
          f"ci95 {fit.ci95_b:.2e}")
    return 0


def run_liouvillian(c: ParamConfig, ratios: np.ndarray, outdir: str, command: str) -> int:
    run = _Run(command, c, outdir)
    eig_rows = []
    triplets = np.empty((len(ratios), 3), dtype=complex)
    for k, ratio in enumerate(ratios):
        le = liouvillian.liouvillian_spectrum(_sym_params(c, float(ratio)))
        for idx, lam in enumerate(le.eigenvalues):
            sel = le.selected.index(idx) if idx in le.selected else ""
            eig_rows.append([float(ratio), idx, lam.real, lam.imag, sel,
                             int(le.condition_flag)])
        triplets[k] = [le.eigenvalues[i] for i in le.selected]
    run.csv("liouvillian_eigens.csv", [
        "omega_over_gamma", "index", "re_lambda_inv_us", "im_lambda_inv_us",
        "selected", "condition_flag",
    ], eig_rows)
    gamma_t = np.linspace(0.0, c.quench_tmax, c.quench_points)
    p = _sym_params(c)
    signal = liouvillian.detect_ep3(
        p, gamma_t / c.gamma, shots=c.shots if _noisy(c) else None,
        rng=_task_rng(c, 0) if _noisy(c) else None,
        flip_prob=c.flip_prob if _noisy(c) else 0.0,
    )
    run.csv("liouvillian_signal.csv", ["gamma_t", "signal"],
            [[x, v] for x, v in zip(gamma_t, signal)])
    fit = quench.fit_quench(np.column_stack([gamma_t, signal]), "liouvillian",
                            rng=_task_rng(c, 1))
    run.csv("liouvillian_fit.csv", [
        "model", "a", "b", "residual", "ci95_b", "converged", "b_true",
    ], [[fit.model, fit.a, fit.b, fit.residual, fit.ci95_b, int(fit.converged),
         quench.true_b(c.omega_over_gamma, "liouvillian")]])
    run.figure("liouvillian_triplet.png",
               lambda path: plots.plot_lambda_triplet(ratios, triplets, c.gamma, path))
    fitted = quench._model_curve(fit.model, gamma_t, fit.a, fit.b, fit.c)
    run.figure("liouvillian_signal.png", lambda path: plots.plot_quench(
        gamma_t, signal, fitted, "$\\rho_{12}-\\rho_{01}$", path))
    run.finish()
    return 0


def run_validate(c: ParamConfig, outdir: str, command: str) -> int:
    run = _Run(command, c, outdir)
    results = validate.run_all(c.seed if c.seed is not None else 0)
    text = validate.report_text(results, c.seed if c.seed is not None else 0)
    run.text("validate_report.txt", text)
    run.finish()
    print(text, end="")
    return 0 if all(ok for _, ok, _ in results) else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ep3ion",
        description="Dissipative three-level spectral analysis pipelines",
    )
    parser.add_argument("--version", action="version", version=ep3ion.__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--out", default=".", help="output directory (default: cwd)")
    common.add_argument("--seed", type=int, help="master seed (mandatory for shot noise)")
    common.add_argument("--mode", choices=("noiseless", "shot_noise"))
    common.add_argument("--shots", type=int)
    common.add_argument("--rounds", type=int)
    common.add_argument("--flip-prob", type=float, dest="flip_prob")
    common.add_argument("--gamma-mhz", type=float, dest="gamma_mhz")
    common.add_argument("--omega-a-mhz", type=float, dest="omega_a_mhz")
    common.add_argument("--t-evolve-us", type=float, dest="t_evolve_us")

    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common],
                        help="eigenenergy branches over a ratio range")
    sp.add_argument("--omega-over-gamma", type=_ratio_range, default=_ratio_range("0.4:1.6:13"))

    sp = sub.add_parser("spectroscopy", parents=[common],
                        help="synthesize and fit one absorption line")
    sp.add_argument("--omega-over-gamma", type=float)
    sp.add_argument("--grid-points", type=int, dest="grid_points")
    sp.add_argument("--grid-span-mhz", type=float, dest="grid_span_mhz")
    sp.add_argument("--restarts", type=int)

    sp = sub.add_parser("winding", parents=[common],
                        help="band tracking and spectral winding on a detuning loop")
    sp.add_argument("--delta-r-mhz", type=float, dest="delta_r_mhz")
    sp.add_argument("--points", type=int, help="loop points (overrides loop_points)")
    sp.add_argument("--e-b-re-mhz", type=float, dest="e_b_re_mhz")
    sp.add_argument("--e-b-im-mhz", type=float, dest="e_b_im_mhz")
    sp.add_argument("--omega-over-gamma", type=float)
    sp.add_argument("--restarts", type=int)

    sp = sub.add_parser("tomography", parents=[common],
                        help="eigenstate reconstruction from zero-crossing scans")
    sp.add_argument("--omega-over-gamma", type=float)
    sp.add_argument("--scan-points", type=int, dest="scan_points")
    sp.add_argument("--gamma-dt", type=float, dest="gamma_dt")

    sp = sub.add_parser("quench", parents=[common],
                        help="quench response sampling and damped-model fits")
    sp.add_argument("--omega-over-gamma", type=float)
    sp.add_argument("--family", choices=("h_eff", "liouvillian"), default="h_eff")
    sp.add_argument("--quench-tmax", type=float, dest="quench_tmax")
    sp.add_argument("--quench-points", type=int, dest="quench_points")

    sp = sub.add_parser("liouvillian", parents=[common],
                        help="16x16 generator spectrum and the detection signal")
    sp.add_argument("--omega-over-gamma", type=_ratio_range,
                    default=_ratio_range("0.5:1.5:11"))
    sp.add_argument("--quench-tmax", type=float, dest="quench_tmax")
    sp.add_argument("--quench-points", type=int, dest="quench_points")

    sp = sub.add_parser("validate", parents=[common],
                        help="run the named invariant suite")
    return parser


_FLAG_TO_FIELD = [
    ("seed", "seed", 1.0),
    ("mode", "mode", 1.0),
    ("shots", "shots", 1.0),
    ("rounds", "rounds", 1.0),
    ("flip_prob", "flip_prob", 1.0),
    ("gamma_mhz", "gamma", TWO_PI),
    ("omega_a_mhz", "omega_a", TWO_PI),
    ("t_evolve_us", "t_evolve", 1.0),
    ("grid_points", "grid_points", 1.0),
    ("grid_span_mhz", "grid_span", TWO_PI),
    ("restarts", "restarts", 1.0),
    ("delta_r_mhz", "delta_r", TWO_PI),
    ("points", "loop_points", 1.0),
    ("e_b_re_mhz", "e_b_re", TWO_PI),
    ("e_b_im_mhz", "e_b_im", TWO_PI),
    ("scan_points", "scan_points", 1.0),
    ("gamma_dt", "gamma_dt", 1.0),
    ("quench_tmax", "quench_tmax", 1.0),
    ("quench_points", "quench_points", 1.0),
]


def _resolve_config(args: argparse.Namespace) -> ParamConfig:
    overrides: dict[str, object] = {}
    for attr, field, scale in _FLAG_TO_FIELD:
        value = getattr(args, attr, None)
        if value is None:
            continue
        overrides[field] = value * scale if scale != 1.0 else value
    ratio = getattr(args, "omega_over_gamma", None)
    if isinstance(ratio, float):
        overrides["omega_over_gamma"] = ratio
    return load_config(args.config, overrides)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    command = " ".join(["ep3ion"] + argv)
    try:
        c = _resolve_config(args)
        if args.command in _STOCHASTIC and c.mode == "shot_noise" and c.seed is None:
            raise ConfigError("--seed is mandatory in shot_noise mode")
        if args.command == "validate" and c.seed is None:
            raise ConfigError("validate requires --seed for its stochastic checks")
        if args.command == "spectrum":
            return run_spectrum(c, args.omega_over_gamma, args.out, command)
        if args.command == "spectroscopy":
            return run_spectroscopy(c, args.out, command)
        if args.command == "winding":
            return run_winding(c, args.out, command)
        if args.command == "tomography":
            return run_tomography(c, args.out, command)
        if args.command == "quench":
            return run_quench(c, args.family, args.out, command)
        if args.command == "liouvillian":
            return run_liouvillian(c, args.omega_over_gamma, args.out, command)
        if args.command == "validate":
            return run_validate(c, args.out, command)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
