"""Command-line front end: config parsing, pipelines, file output.

Every pipeline is a deterministic analytic computation (no randomness),
so identical configs produce byte-identical artifacts.  Files are
written atomically (temp file + rename) and the run summary goes to
stdout as a single JSON line.  Exit codes: 0 ok, 2 config error,
3 resource guard, 4 numeric guard.
"""

import argparse
import json
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field

COMMANDS = ("entropy-series", "period", "spectrum", "spacings", "ratios",
            "rbar", "eigenstate-ee", "qkt-map", "oracle-check")

_RATIONAL = re.compile(r"^([+-]?\d+)\s*/\s*(\d+)$")
_INTEGER = re.compile(r"^[+-]?\d+$")
_SURD = re.compile(r"^(?:([+-]?\d+)\s*\*\s*)?sqrt\((\d+)\)(?:\s*/\s*(\d+))?$")
_INV_SURD = re.compile(r"^([+-]?\d+)\s*/\s*sqrt\((\d+)\)$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


def parse_coupling(text: str):
    """Parse "r/h", "sqrt(b)/c", "a*sqrt(b)/c", "a/sqrt(b)" or a decimal.

    Decimals are never promoted to rationals; "0.5" stays a raw real
    while "1/2" is the exact rational.
    """
    from .floquet import CouplingSpec

    s = text.strip()
    if not s:
        raise ValueError("empty coupling string")
    m = _RATIONAL.match(s)
    if m:
        return CouplingSpec.rational(int(m.group(1)), int(m.group(2)))
    if _INTEGER.match(s):
        return CouplingSpec.rational(int(s), 1)
    m = _SURD.match(s)
    if m:
        a = int(m.group(1)) if m.group(1) else 1
        return CouplingSpec.surd(a, int(m.group(2)), int(m.group(3) or 1))
    m = _INV_SURD.match(s)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if b == 0:
            raise ValueError("division by sqrt(0)")
        return CouplingSpec.surd(a, b, b)  # a/sqrt(b) = a*sqrt(b)/b
    if _DECIMAL.match(s) and ("." in s or "e" in s or "E" in s):
        return CouplingSpec.real(float(s))
    bad = next((i for i, ch in enumerate(s) if ch not in "0123456789+-*/sqrt(). eE"),
               len(s) - 1)
    raise ValueError(f"cannot parse coupling {text!r} (near position {bad})")


@dataclass
class RunConfig:
    command: str
    n_qubits: int = 0
    coupling: str = "1"
    tau_m: int = 1
    theta0: float = 0.0
    phi0: float = 0.0
    kicks: int = 0
    order_k: int = 1
    bins: int = 50
    perturb_param: str = "tau"
    perturb_delta: float = 1e-10
    sector: str = "plus"
    unfold_method: str = "rank"
    unfold_window: int = 100
    out_path: str = ""
    fmt: str = "csv"
    sizes: list = field(default_factory=list)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render(columns, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"columns": list(columns), "rows": [list(r) for r in rows]},
                          separators=(",", ":")) + "\n"
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _write_table(cfg: RunConfig, columns, rows):
    if cfg.out_path:
        _atomic_write(cfg.out_path, _render(columns, rows, cfg.fmt))


def _sector_arg(sector: str) -> str:
    return "both" if sector == "pooled" else sector


def run(config: RunConfig) -> dict:
    """Execute one command, write its artifacts, return the summary dict."""
    from . import dynamics, eigenstates, floquet, kicked_top, spectral
    from .states import CoherentParams

    cfg = config
    summary = {"command": cfg.command}

    if cfg.command == "entropy-series":
        j = parse_coupling(cfg.coupling)
        if cfg.kicks < 1:
            raise ValueError("--kicks must be >= 1")
        series = dynamics.entropy_series(CoherentParams(cfg.theta0, cfg.phi0),
                                         cfg.n_qubits, j, cfg.tau_m, cfg.kicks)
        _write_table(cfg, ("kick", "linear_entropy", "von_neumann_entropy"),
                     list(zip(series.kicks.tolist(), series.linear.tolist(),
                              series.von_neumann.tolist())))
        summary.update(n=cfg.n_qubits, coupling=j.label(), tau_m=cfg.tau_m,
                       theta0=cfg.theta0, phi0=cfg.phi0, kicks=cfg.kicks,
                       s_min=float(series.linear.min()),
                       s_max=float(series.linear.max()))

    elif cfg.command == "period":
        j = parse_coupling(cfg.coupling)
        if not j.is_rational:
            raise ValueError("period prediction needs a rational coupling r/h")
        predicted = floquet.predicted_period(cfg.n_qubits, j.r, j.h)
        blocks = floquet.diagonal_blocks(cfg.n_qubits, j, 1)
        scanned = floquet.minimal_period_scan(blocks, 2 * predicted)
        summary.update(n=cfg.n_qubits, coupling=j.label(), predicted=predicted,
                       scanned=scanned, match=bool(scanned == predicted))

    elif cfg.command == "spectrum":
        j = parse_coupling(cfg.coupling)
        spec = spectral.eigenphases(cfg.n_qubits, j, cfg.tau_m, _sector_arg(cfg.sector))
        _write_table(cfg, ("phase", "multiplicity"),
                     list(zip(spec.phases.tolist(), spec.multiplicities.tolist())))
        summary.update(n=cfg.n_qubits, coupling=j.label(), sector=cfg.sector,
                       distinct=spec.distinct_count, dimension=spec.dimension,
                       max_multiplicity=int(spec.multiplicities.max()),
                       precision_bound=spec.precision_bound)

    elif cfg.command in ("spacings", "ratios"):
        j = parse_coupling(cfg.coupling)
        spec = spectral.eigenphases(cfg.n_qubits, j, cfg.tau_m, _sector_arg(cfg.sector))
        levels = spectral.unfold(spec, method=cfg.unfold_method, window=cfg.unfold_window)
        if cfg.command == "spacings":
            samples = spectral.kth_spacings(levels, cfg.order_k)
        else:
            samples = spectral.kth_ratios(levels, cfg.order_k)
        centers, emp, ref = spectral.density_table(samples, cfg.bins)
        _write_table(cfg, ("x", "empirical_density", "reference_density"),
                     list(zip(centers.tolist(), emp.tolist(), ref.tolist())))
        summary.update(n=cfg.n_qubits, coupling=j.label(), sector=cfg.sector,
                       k=cfg.order_k, unfold=levels.method,
                       samples=len(samples.values), filtered=samples.n_filtered,
                       ks=spectral.ks_distance(samples))

    elif cfg.command == "rbar":
        j = parse_coupling(cfg.coupling)
        spec = spectral.eigenphases(cfg.n_qubits, j, cfg.tau_m, _sector_arg(cfg.sector))
        levels = spectral.unfold(spec, method=cfg.unfold_method, window=cfg.unfold_window)
        stats = spectral.adjacent_ratio_stats(levels)
        summary.update(n=cfg.n_qubits, coupling=j.label(), sector=cfg.sector,
                       r_mean=stats["r_mean"], n_used=stats["n_used"],
                       n_filtered=stats["n_filtered"],
                       poisson_reference=spectral.POISSON_MEAN_R)

    elif cfg.command == "eigenstate-ee":
        j = parse_coupling(cfg.coupling)
        perturb = (cfg.perturb_param, cfg.perturb_delta)
        sizes = cfg.sizes or [cfg.n_qubits]
        if len(sizes) >= 4:
            points, fit = eigenstates.scaling_series(sizes, j, cfg.tau_m, perturb)
            summary.update(coupling=j.label(), perturb=cfg.perturb_param,
                           delta=cfg.perturb_delta, sizes=sizes, **fit)
        else:
            points = [eigenstates.average_ee_ratio(
                eigenstates.floquet_eigenstates(n, j, cfg.tau_m, perturb))
                for n in sizes]
            summary.update(coupling=j.label(), perturb=cfg.perturb_param,
                           delta=cfg.perturb_delta, sizes=sizes,
                           ratio=points[-1].ratio)
        _write_table(cfg, ("n_qubits", "inv_smax", "ratio", "mean_entropy",
                           "ratio_plus", "ratio_minus"),
                     [(p.n_qubits, p.inv_smax, p.ratio, p.mean_entropy,
                       p.ratio_plus, p.ratio_minus) for p in points])

    elif cfg.command == "qkt-map":
        import numpy as np

        j = parse_coupling(cfg.coupling)
        params = kicked_top.map_params(cfg.n_qubits, j, cfg.tau_m)
        summary.update(n=cfg.n_qubits, coupling=j.label(), p=params.p,
                       k_prime=params.k_prime)
        if cfg.kicks > 0:
            start = kicked_top.BlochPoint(np.sin(cfg.theta0) * np.cos(cfg.phi0),
                                          np.sin(cfg.theta0) * np.sin(cfg.phi0),
                                          np.cos(cfg.theta0))
            orbit = kicked_top.trajectory(start, params, cfg.kicks)
            _write_table(cfg, ("step", "x", "y", "z"),
                         [(i, float(r[0]), float(r[1]), float(r[2]))
                          for i, r in enumerate(orbit)])

    elif cfg.command == "oracle-check":
        summary.update(_oracle_check(cfg))

    return summary


def _oracle_check(cfg: RunConfig) -> dict:
    import numpy as np

    from . import dynamics, floquet, oracle
    from .states import (CoherentParams, ParityState, coherent_dicke,
                         from_parity, to_parity)

    j = parse_coupling(cfg.coupling)
    n = cfg.n_qubits
    tau = cfg.tau_m * np.pi / 2.0
    jval = j.value()
    checks = {}

    u = oracle.full_floquet(n, jval, tau)
    checks["unitarity"] = float(np.abs(u.conj().T @ u - np.eye(2**n)).max())
    if n <= 10:
        checks["parity_commutation"] = oracle.parity_commutation_check(n, jval, tau)

    # every parity basis vector must be an eigenvector with the analytic phase
    blocks = floquet.diagonal_blocks(n, j, cfg.tau_m)
    err = 0.0
    for sector, dim in zip(("plus", "minus"), blocks.dims):
        lam = blocks.diagonal_entries(sector)
        for q in range(dim):
            c = np.zeros(dim, dtype=complex)
            c[q] = 1.0
            if sector == "plus":
                ps = ParityState(n, c, np.zeros(blocks.dims[1], dtype=complex))
            else:
                ps = ParityState(n, np.zeros(blocks.dims[0], dtype=complex), c)
            full = oracle.embed_symmetric(from_parity(ps))
            evolved = (oracle.ising_phases(n, jval, tau)
                       * oracle.apply_kick(full.amplitudes, n, tau))
            err = max(err, float(np.abs(evolved - lam[q] * full.amplitudes).max()))
    checks["block_eigenvalues"] = err

    params = CoherentParams(cfg.theta0 if cfg.theta0 else np.pi / 4.0,
                            cfg.phi0 if cfg.phi0 else -np.pi / 4.0)
    kicks = cfg.kicks if cfg.kicks else 7
    psi = dynamics.evolve_parity(to_parity(coherent_dicke(params, n)), blocks, kicks)
    rdm = dynamics.single_qubit_rdm(psi)
    ref = oracle.full_rdm_qubit(oracle.full_state_evolve(params, n, jval, tau, kicks))
    checks["rdm_population"] = abs(rdm.population - ref.population)
    checks["rdm_coherence"] = abs(rdm.coherence - ref.coherence)
    checks["linear_entropy"] = abs(dynamics.linear_entropy(rdm)
                                   - dynamics.linear_entropy(ref))

    tol = 1e-11
    return {**{k: float(v) for k, v in checks.items()},
            "tolerance": tol,
            "all_pass": bool(all(v < tol for v in checks.values()))}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kicked-ising",
        description="Analytic pipelines for the kicked infinite-range Ising chain "
                    "at tau = m*pi/2.")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--n", type=str, default="0",
                   help="qubit count; comma list allowed for eigenstate-ee")
    p.add_argument("--coupling", type=str, default="1",
                   help='J as "r/h", "sqrt(b)/c" or a decimal')
    p.add_argument("--tau-m", type=int, default=1, help="tau = m*pi/2")
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--phi0", type=float, default=0.0)
    p.add_argument("--kicks", type=int, default=0)
    p.add_argument("--k", type=int, default=1, help="spacing/ratio order")
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--perturb", choices=("J", "tau"), default="tau")
    p.add_argument("--delta", type=float, default=1e-10)
    p.add_argument("--sector", choices=("plus", "minus", "pooled"), default="plus")
    p.add_argument("--unfold", type=str, default="rank",
                   help='"rank" or "local:WINDOW"')
    p.add_argument("--out", type=str, default="")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def config_from_args(args) -> RunConfig:
    sizes = []
    if "," in args.n:
        sizes = [int(tok) for tok in args.n.split(",") if tok.strip()]
        n = sizes[0]
    else:
        n = int(args.n)
    method, window = args.unfold, 100
    if method.startswith("local:"):
        method, window = "local_mean", int(method.split(":", 1)[1])
    elif method == "local":
        method = "local_mean"
    elif method != "rank":
        raise ValueError(f"unknown unfold method {args.unfold!r}")
    return RunConfig(command=args.command, n_qubits=n, coupling=args.coupling,
                     tau_m=args.tau_m, theta0=args.theta0, phi0=args.phi0,
                     kicks=args.kicks, order_k=args.k, bins=args.bins,
                     perturb_param=args.perturb, perturb_delta=args.delta,
                     sector=args.sector, unfold_method=method,
                     unfold_window=window, out_path=args.out, fmt=args.format,
                     sizes=sizes)


def main(argv=None) -> int:
    threads = os.environ.get("KICKED_ISING_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)

    from .errors import NumericGuardError, ResourceLimitError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        summary = run(config_from_args(args))
    except ValueError as exc:
        print(json.dumps({"error": "config", "message": str(exc)},
                         separators=(",", ":")))
        return 2
    except ResourceLimitError as exc:
        print(json.dumps({"error": "resource", "message": str(exc)},
                         separators=(",", ":")))
        return 3
    except NumericGuardError as exc:
        print(json.dumps({"error": "numeric", "message": str(exc)},
                         separators=(",", ":")))
        return 4
    print(json.dumps(summary, separators=(",", ":")))
    if summary.get("all_pass") is False:
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
