"""Command-line entry point.

Subcommands ``dynamics``, ``sweep-flux``, ``scattering``, ``fwhm`` and
``verify`` each write exactly one artifact file and print a one-line summary.
Exit status: 0 on success, 1 when ``verify`` reports a failed check, 2 for an
invalid configuration, 3 for a numerical failure.

CSV floats are printed with 17 significant digits; JSON floats use Python's
shortest round-trip repr. Non-finite values appear as ``inf``/``nan``.
"""
import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .atom import CyclicAtomParams
from .dynamics import MODELS, resolve_workers, sweep_flux, sweep_time
from .errors import InvalidInputError, NonrecipError
from .scattering import WaveguideSystem, half_max_k, half_max_k_numeric, sweep_k
from .verify import verify_paper_claims

COMMANDS = ("dynamics", "sweep-flux", "scattering", "fwhm", "verify")
DEFAULT_FORMAT = {"dynamics": "csv", "sweep-flux": "csv", "scattering": "csv", "fwhm": "json", "verify": "json"}

EXIT_OK, EXIT_FAILED_CHECKS, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass(frozen=True)
class Grid:
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise InvalidInputError(f"grid count must be >= 2, got {self.count}")
        if not self.min < self.max:
            raise InvalidInputError(f"grid min must be below max, got [{self.min}, {self.max}]")


@dataclass(frozen=True)
class RunConfig:
    command: str
    output_path: Path
    format: str
    model: str = "full"
    params: object = None
    grid: Grid = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInputError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise InvalidInputError(f"format must be csv or json, got {self.format!r}")
        if self.model not in MODELS:
            raise InvalidInputError(f"model must be one of {MODELS}, got {self.model!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidInputError(message)


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--out", type=Path, help="artifact path (default: <command>.<format>)")
    shared.add_argument("--format", choices=("csv", "json"))
    shared.add_argument("--model", choices=MODELS, default="full",
                        help="three-level model or the eliminated two-level model")
    shared.add_argument("-v", "--verbose", action="store_true",
                        help="include scattering intermediates in JSON output")

    atom = argparse.ArgumentParser(add_help=False)
    atom.add_argument("--params", help="CyclicAtomParams JSON file or inline JSON object")
    flux = atom.add_mutually_exclusive_group()
    flux.add_argument("--phi", type=float, help="synthetic flux in radians")
    flux.add_argument("--phi-over-pi", type=float, help="synthetic flux in units of pi")

    parser = _Parser(prog="nonrecip", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dynamics", parents=[shared, atom], help="transition probabilities versus time")
    p.add_argument("--t-max", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=401)

    p = sub.add_parser("sweep-flux", parents=[shared, atom], help="transition probabilities versus flux")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--count", type=int, default=721)

    p = sub.add_parser("scattering", parents=[shared], help="scattering flows versus wave number")
    p.add_argument("--params", help="WaveguideSystem JSON file or inline JSON object")
    p.add_argument("--eta", type=float, default=0.1,
                   help="xi/Gamma of the optimal one-way system (used without --params)")
    p.add_argument("--k-count", type=int, default=199)
    p.add_argument("--incident", choices=("a", "b"), default="a")

    p = sub.add_parser("fwhm", parents=[shared], help="half-maximum width of the one-way band")
    p.add_argument("--eta", type=float, default=0.5)

    sub.add_parser("verify", parents=[shared], help="run the built-in verification suite")
    return parser


def _load_json(source):
    text = source.strip()
    if not text.startswith("{"):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InvalidInputError(f"cannot read parameters: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"invalid JSON parameters: {exc}") from exc


def config_from_args(args):
    """Validate parsed arguments into a :class:`RunConfig`; nothing is computed."""
    resolve_workers()
    fmt = args.format or DEFAULT_FORMAT[args.command]
    out = args.out or Path(f"{args.command}.{fmt}")
    common = dict(command=args.command, output_path=out, format=fmt, model=args.model)

    if args.command in ("dynamics", "sweep-flux"):
        params = CyclicAtomParams.from_dict(_load_json(args.params)) if args.params else CyclicAtomParams()
        if args.phi is not None:
            params = params.with_flux(args.phi)
        elif args.phi_over_pi is not None:
            params = params.with_flux(args.phi_over_pi * math.pi)
        if args.command == "dynamics":
            if not (math.isfinite(args.t_max) and args.t_max > 0):
                raise InvalidInputError(f"--t-max must be positive, got {args.t_max}")
            return RunConfig(params=params, grid=Grid(0.0, args.t_max, args.steps), **common)
        if not (math.isfinite(args.t) and args.t >= 0):
            raise InvalidInputError(f"--t must be non-negative, got {args.t}")
        if args.count < 3:
            raise InvalidInputError(f"--count must be >= 3, got {args.count}")
        return RunConfig(params=params, grid=Grid(-math.pi, math.pi, args.count),
                         options={"t": args.t}, **common)

    if args.command == "scattering":
        if args.params:
            params = WaveguideSystem.from_dict(_load_json(args.params))
        else:
            params = WaveguideSystem.optimal(args.eta)
        if args.k_count < 3:
            raise InvalidInputError(f"--k-count must be >= 3, got {args.k_count}")
        return RunConfig(params=params, grid=Grid(0.0, math.pi, args.k_count),
                         options={"incident": args.incident, "verbose": args.verbose}, **common)

    if args.command == "fwhm":
        if not (math.isfinite(args.eta) and args.eta > 0):
            raise InvalidInputError(f"--eta must be positive, got {args.eta}")
        return RunConfig(options={"eta": args.eta}, **common)

    return RunConfig(**common)


def _fwhm_payload(eta):
    analytic = half_max_k(eta)
    numeric = half_max_k_numeric(eta)
    d = analytic.to_dict()
    d["delta_k_numeric"] = numeric.delta_k
    d["k_half_numeric"] = numeric.k_half
    return d


def _render(config):
    """Compute the artifact; returns ``(text, summary, exit_code)``."""
    fmt = config.format
    if config.command == "dynamics":
        res = sweep_time(config.params, config.grid.max, config.grid.count, config.model)
        peak = max(res.points, key=lambda pt: pt.t_ba)
        summary = (f"dynamics: {len(res.points)} points, model={config.model}, "
                   f"phi={config.params.flux:.6g}, max T_ba={peak.t_ba:.6g} at t={peak.t:.6g}")
        return (res.to_csv() if fmt == "csv" else res.to_json() + "\n"), summary, EXIT_OK

    if config.command == "sweep-flux":
        res = sweep_flux(config.params, config.options["t"], config.grid.count, config.model)
        iso = res.column("isolation")
        finite = [(v, x) for v, x in zip(iso, res.axis_values) if math.isfinite(v)]
        best = max(finite)[1] if finite else math.nan
        summary = (f"sweep-flux: {len(res.points)} points, model={config.model}, "
                   f"t={config.options['t']:g}, max isolation at phi/pi={best / math.pi:.6g}")
        return (res.to_csv() if fmt == "csv" else res.to_json() + "\n"), summary, EXIT_OK

    if config.command == "scattering":
        res = sweep_k(config.params, config.grid.count, config.options["incident"])
        summary = f"scattering: {len(res.k_values)} wave numbers, incident={res.incident}"
        if res.k_values:
            i_ba = res.column("i_ba")
            summary += f", max I_ba={i_ba.max():.6g}"
        text = res.to_csv() if fmt == "csv" else res.to_json(config.options["verbose"]) + "\n"
        return text, summary, EXIT_OK

    if config.command == "fwhm":
        d = _fwhm_payload(config.options["eta"])
        summary = f"fwhm: eta={d['eta']:g}, delta_k/pi={d['delta_k_over_pi']:.6g}"
        if fmt == "json":
            return json.dumps(d, indent=2) + "\n", summary, EXIT_OK
        keys = list(d)
        row = ",".join(str(d[k]).lower() if isinstance(d[k], bool) else f"{d[k]:.17g}" for k in keys)
        return ",".join(keys) + "\n" + row + "\n", summary, EXIT_OK

    report = verify_paper_claims()
    for c in report.checks:
        print(c.line())
    n_pass = sum(c.passed for c in report.checks)
    summary = f"verify: {n_pass}/{len(report.checks)} checks passed"
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    else:
        lines = ["name,expected,observed,tolerance,pass"]
        lines += [f"\"{c.name}\",\"{c.expected}\",{c.observed:.17g},{c.tolerance:.17g},{str(c.passed).lower()}"
                  for c in report.checks]
        text = "\n".join(lines) + "\n"
    return text, summary, EXIT_OK if report.all_pass else EXIT_FAILED_CHECKS


def run(config):
    """Execute ``config``, write its artifact and return the exit status."""
    try:
        text, summary, code = _render(config)
    except NonrecipError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        config.output_path.write_text(text)
    except OSError as exc:
        print(f"error: cannot write {config.output_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{summary} -> {config.output_path}")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
