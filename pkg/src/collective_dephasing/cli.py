"""Command-line experiment runner.

Subcommands::

    run <config>                     fidelity / eta / delta_phi / purity curves to CSV
    dfs-info <L>                     sector dimensions and pair-code efficiency
    verify <config>                  oracle vs closed form over the time grid
    encode <state-file> <out-file>   apply the pair code to an amplitude file
    decode <state-file> <out-file>   invert the pair code

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 numerical error.
"""

from __future__ import annotations

import argparse
import io
import logging
import math
import sys
import warnings
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__, analysis, dfs, oracle
from . import bath as _bath
from .errors import (ConfigError, DecodeError, DephasingError, NoRootError, NumericalError,
                     SizeError, ValidationError)
from .register import L_MAX, PureState, configurations, parse_config_string
from .scenario import Scenario, atomic_write, load_scenario, read_amplitude_file, write_amplitude_file

log = logging.getLogger("collective_dephasing")

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

RUN_COLUMNS = ("time", "eta", "delta_phi", "fidelity", "purity")
VERIFY_COLUMNS = ("time", "eta", "delta_phi", "max_deviation", "max_std_error", "truncation_diagnostic")
VACUUM_THRESHOLD = 1e-6
THERMAL_SIGMAS = 3.0


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _csv_text(scenario: Scenario, columns: Sequence[str], rows: List[Sequence[float]],
              extra_meta: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    buf.write(f"# collective-dephasing {__version__}\n")
    buf.write("# units: natural units hbar=k_B=1\n")
    for key, value in scenario.echo:
        buf.write(f"# {key} = {value}\n")
    for line in extra_meta:
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_num(v) for v in row) + "\n")
    return buf.getvalue()


def _family_state(family: str, n: int, scenario: Scenario):
    """Pure state of one family; GHZ and basis states beyond the dense cap come back as mappings."""
    if family == "ghz":
        support = analysis.ghz_support(n)
        return PureState.from_mapping(support) if n <= L_MAX else support
    if family == "basis":
        config = parse_config_string(scenario.state_config)
        return PureState.basis(config) if n <= L_MAX else {config: 1.0}
    if n > L_MAX:
        raise SizeError(f"{family} states are limited to {L_MAX} qubits, got {n}")
    if family == "uniform":
        return PureState.normalized(np.ones(2 ** n))
    psi = read_amplitude_file(scenario.state_file)
    if psi.num_qubits != n:
        raise ConfigError(f"{scenario.state_file} holds {psi.num_qubits} qubits, scenario has {n}")
    return psi


def build_state(scenario: Scenario):
    if scenario.state == "encoded":
        inner = _family_state(scenario.state_inner, scenario.qubits, scenario)
        if not isinstance(inner, PureState):
            raise SizeError(f"cannot encode {scenario.qubits} logical qubits (cap {L_MAX // 2})")
        return dfs.encode(inner)
    return _family_state(scenario.state, scenario.qubits, scenario)


def _output_path(scenario: Scenario, override: Optional[str]) -> Path:
    if override:
        return Path(override)
    if scenario.output is None:
        raise ConfigError("no output path: set 'output' in the config or pass --output")
    return scenario.output


def cmd_run(args) -> int:
    scenario = load_scenario(args.config, seed_override=args.seed)
    out = _output_path(scenario, args.output)
    psi = build_state(scenario)
    rows = []
    for t in scenario.times:
        f = _bath.factors(scenario.bath, float(t))
        if scenario.channel == "collective":
            fid = analysis.fidelity_collective_closed_form(psi, f)
        else:
            fid = analysis.fidelity_independent_closed_form(psi, f)
        pur = analysis.purity_closed_form(psi, scenario.channel, f)
        rows.append((f.time, f.eta, f.delta_phi, fid, pur))
    atomic_write(out, _csv_text(scenario, RUN_COLUMNS, rows))

    summary = [f"wrote {len(rows)} rows to {out}",
               f"final fidelity = {_num(rows[-1][3])}"]
    spec = scenario.bath.spectral
    if isinstance(spec, _bath.OhmicSpectrum) and scenario.bath.temperature > 0:
        try:
            t_star = analysis.decoherence_time(scenario.bath)
            summary.append(f"decoherence time (eta = 1) = {_num(t_star)}; "
                           f"high-T estimate 1/(pi eps^2 T) = "
                           f"{_num(1 / _bath.eta_high_temperature_slope(scenario.bath))}")
        except NoRootError as exc:
            summary.append(f"decoherence time: not found ({exc})")
    else:
        summary.append("decoherence time: n/a (needs an ohmic bath with T > 0)")
    print("; ".join(summary))
    return EXIT_OK


def cmd_dfs_info(args) -> int:
    L = args.L
    if L < 1:
        raise ConfigError(f"L must be positive, got {L}")
    print(f"# sectors of {L} qubits: m, dimension")
    for m in dfs.valid_sector_sums(L):
        print(f"{m:+d}, {dfs.sector_dimension(L, m)}")
    exact, approx = dfs.efficiency(L)
    print(f"S_0 dimension for {2 * L} qubits: {dfs.sector_dimension(2 * L, 0)}")
    print(f"efficiency exact: {exact:.10g}")
    print(f"efficiency approximate: {approx:.10g}")
    print(f"pair-code efficiency: 0.5")
    return EXIT_OK


def cmd_verify(args) -> int:
    scenario = load_scenario(args.config, seed_override=args.seed)
    if scenario.oracle is None:
        raise ConfigError("verify needs an oracle block (oracle.* keys)")
    if scenario.channel != "collective":
        raise ConfigError("the oracle models a shared bath; set channel = collective")
    block = scenario.oracle
    psi = build_state(scenario)
    if not isinstance(psi, PureState):
        raise SizeError("state too large for the oracle")
    temperature = scenario.bath.temperature
    threshold = args.threshold if args.threshold is not None else block.threshold
    out = _output_path(scenario, args.output)

    rows = []
    passed = True
    worst = 0.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for t in scenario.times:
            rep = oracle.compare_to_closed_form(psi, block.bath, temperature, float(t),
                                                num_samples=block.samples, seed=block.seed)
            err = rep.max_std_error if rep.max_std_error is not None else 0.0
            rows.append((t, rep.eta, rep.delta_phi, rep.max_deviation, err, rep.truncation_diagnostic))
            worst = max(worst, rep.max_deviation)
            if threshold is not None:
                ok = rep.max_deviation <= threshold
            elif temperature == 0:
                ok = rep.max_deviation <= VACUUM_THRESHOLD
            else:
                ok = rep.max_z_score is not None and rep.max_z_score <= THERMAL_SIGMAS
            passed &= ok
            print(f"t={_num(t)} eta={_num(rep.eta)} delta_phi={_num(rep.delta_phi)} "
                  f"max_deviation={rep.max_deviation:.3e} std_error={err:.3e} "
                  f"truncation={rep.truncation_diagnostic:.3e} {'ok' if ok else 'FAIL'}")
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    rule = (f"threshold = {_num(threshold)}" if threshold is not None
            else f"threshold = {_num(VACUUM_THRESHOLD)}" if temperature == 0
            else f"threshold = {THERMAL_SIGMAS:g} standard errors")
    atomic_write(out, _csv_text(scenario, VERIFY_COLUMNS, rows, extra_meta=(rule,)))
    print(f"max deviation {worst:.3e} ({rule}): {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_encode(args) -> int:
    psi = read_amplitude_file(args.state_file)
    write_amplitude_file(args.out_file, dfs.encode(psi),
                         header=f"pair-code encoding of {args.state_file}")
    return EXIT_OK


def cmd_decode(args) -> int:
    phi = read_amplitude_file(args.state_file)
    write_amplitude_file(args.out_file, dfs.decode(phi),
                         header=f"pair-code decoding of {args.state_file}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collective-dephasing",
        description="Collective vs independent dephasing of qubit registers.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", help="CSV output path (overrides the config)")
        p.add_argument("--seed", type=int, help="Monte Carlo seed (overrides the config)")

    p = sub.add_parser("run", help="sweep the time grid and write curves")
    p.add_argument("config")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("dfs-info", help="decoherence-free sector table")
    p.add_argument("L", type=int)
    p.set_defaults(func=cmd_dfs_info)

    p = sub.add_parser("verify", help="compare the brute-force oracle with the closed form")
    p.add_argument("config")
    p.add_argument("--threshold", type=float, help="absolute deviation threshold")
    common(p)
    p.set_defaults(func=cmd_verify)

    for name, func in (("encode", cmd_encode), ("decode", cmd_decode)):
        p = sub.add_parser(name, help=f"{name} an amplitude file with the pair code")
        p.add_argument("state_file")
        p.add_argument("out_file")
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    context = getattr(args, "config", None) or getattr(args, "state_file", None) or ""
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical error{f' in {context}' if context else ''}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValidationError, SizeError, DecodeError, DephasingError) as exc:
        print(f"error{f' in {context}' if context else ''}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
