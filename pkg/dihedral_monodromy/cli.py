import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import __version__
from .certificate import Certificate, summarize
from .constants import (
    ALL_CHECKS,
    CHECK_AD_REGULAR,
    CHECK_BRAID,
    CHECK_DIMENSION,
    CHECK_HEISENBERG_COMPARISON,
    CHECK_IRREDUCIBILITY,
    CHECK_JORDAN,
    CHECK_LIE_CLOSURE,
    CHECK_NO_CHARACTERS,
    CHECK_NONCOMPACTNESS,
    CHECK_OPEN_ORBIT,
    CHECK_SEPARATION,
    CHECK_SPAN,
    CHECK_SYMPLECTIC,
    DEFAULT_MAX_WORD_LENGTH,
    DEFAULT_SEED,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    FORMAT_CSV,
    FORMAT_JSON,
    PRESET_IRR,
    PRESETS,
    TOOL_NAME,
)
from .curve import (
    BranchConfig,
    ConfigError,
    all_loops,
    config_from_json,
    local_system,
    preset_passing,
)
from .density import (
    Factor,
    LieAlgebraBasis,
    build_factor,
    component_separation,
    factor_closure,
    irreducibility_certificate,
    lie_closure_certificate,
    no_characters_proxy,
    noncompactness_search,
    open_orbit_certificate,
)
from .homology import dimension_certificate, span_certificate
from .logger import Logger
from .reps import (
    CharOrbit,
    ad_regular_decomposition,
    all_orbits,
    heisenberg_comparison_certificate,
)
from .twist import braid_certificate, jordan_certificate, symplectic_certificate
from .utils import detect_output_format, format_for_output_type, save_to_file, timed

logger = Logger("cli")

PER_ORBIT_CHECKS = [
    CHECK_DIMENSION,
    CHECK_SPAN,
    CHECK_IRREDUCIBILITY,
    CHECK_JORDAN,
    CHECK_SYMPLECTIC,
    CHECK_LIE_CLOSURE,
    CHECK_NO_CHARACTERS,
]
NEEDS_FACTOR = {
    CHECK_IRREDUCIBILITY,
    CHECK_JORDAN,
    CHECK_SYMPLECTIC,
    CHECK_LIE_CLOSURE,
    CHECK_NO_CHARACTERS,
    CHECK_SEPARATION,
    CHECK_OPEN_ORBIT,
    CHECK_NONCOMPACTNESS,
}
NEEDS_CLOSURE = {CHECK_LIE_CLOSURE, CHECK_NO_CHARACTERS, CHECK_OPEN_ORBIT}
COMMANDS = ("report", "matrices")
DEFAULT_COMMAND = "report"


@dataclass
class RunSpec:
    """Validated command-line parameters of one run."""

    config: BranchConfig
    orbits: List[CharOrbit]
    checks: List[str]
    seed: int = DEFAULT_SEED
    max_word_length: int = DEFAULT_MAX_WORD_LENGTH
    output_format: str = FORMAT_JSON
    out: Optional[str] = None
    workers: int = 1

    def to_json(self) -> Dict:
        return {
            "genus": self.config.g,
            "n": self.config.n,
            "preset": self.config.preset_name,
            "orbits": [[u.b, u.c] for u in self.orbits],
            "checks": list(self.checks),
            "seed": self.seed,
            "max_word_length": self.max_word_length,
        }


@dataclass
class OrbitResult:
    orbit: CharOrbit
    certificates: List[Certificate] = field(default_factory=list)
    factor: Optional[Factor] = None
    closure: Optional[LieAlgebraBasis] = None


def _add_common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--genus", type=int, default=6, help="Genus g of the curve (default: 6)")
    parser.add_argument("--n", type=int, default=3, help="Odd order n of the group (default: 3)")
    parser.add_argument(
        "--preset",
        choices=PRESETS,
        default=PRESET_IRR,
        help=f"Passing transformations (default: {PRESET_IRR})",
    )
    parser.add_argument(
        "--config",
        help="JSON file with {g, n, preset} or {g, n, passing}; overrides --genus/--n/--preset",
    )
    parser.add_argument(
        "--orbit",
        action="append",
        metavar="B,C",
        help="Character orbit b,c (repeatable; defaults to every orbit)",
    )
    parser.add_argument(
        "--orbits",
        choices=["all"],
        help="Use every orbit of (Z/n)^2 under negation",
    )
    parser.add_argument(
        "--format",
        choices=[FORMAT_JSON, FORMAT_CSV],
        help="Output format (defaults to json or based on output file extension)",
    )
    parser.add_argument("-o", "--out", help="Output file path (defaults to stdout)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")


def parse_args(args: Optional[List[str]] = None):
    """
    Parse command line arguments.

    Without a subcommand the arguments go to report, so `dhmono --genus 6 --n 3` runs it.
    """
    if args is None:
        args = sys.argv[1:]
    args = list(args)
    if not args or args[0] not in COMMANDS + ("-h", "--help", "--version"):
        args = [DEFAULT_COMMAND] + args
    parser = argparse.ArgumentParser(
        prog="dhmono",
        description="Exact certificates for dihedral Heisenberg monodromy on hyperelliptic curves.",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    report = subparsers.add_parser("report", help="Run certificates and write a JSON report")
    _add_common_arguments(report)
    report.add_argument(
        "--checks",
        default="all",
        help=f"Comma-separated checks or 'all' ({', '.join(ALL_CHECKS)})",
    )
    report.add_argument(
        "--seed", type=int, default=DEFAULT_SEED, help=f"Seed (default: {DEFAULT_SEED})"
    )
    report.add_argument(
        "--max-word-length",
        type=int,
        default=DEFAULT_MAX_WORD_LENGTH,
        help="Word budget of the noncompactness search; 0 skips it (default: 0)",
    )
    report.add_argument(
        "--workers", type=int, default=1, help="Processes for orbit-level checks (default: 1)"
    )

    matrices = subparsers.add_parser(
        "matrices", help="Dump passing, monodromy, twist and Gram matrices of one orbit"
    )
    _add_common_arguments(matrices)

    return parser.parse_args(args)


def parse_orbit(n: int, text: str) -> CharOrbit:
    try:
        b, c = (int(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"Orbit must look like b,c; got {text!r}")
    return CharOrbit.of(n, b, c)


def parse_checks(text: str) -> List[str]:
    if text.strip() == "all":
        return list(ALL_CHECKS)
    checks = [c.strip() for c in text.split(",") if c.strip()]
    unknown = [c for c in checks if c not in ALL_CHECKS]
    if unknown:
        raise ConfigError(
            f"Unknown checks {', '.join(unknown)}; expected any of {', '.join(ALL_CHECKS)}"
        )
    return [c for c in ALL_CHECKS if c in checks]


def build_run_spec(parsed_args) -> RunSpec:
    """
    Validate flags before any computation.

    Raises:
        ConfigError: On invalid genus, n, preset, orbit or check names
    """
    if parsed_args.config:
        config = config_from_json(parsed_args.config)
    else:
        config = preset_passing(parsed_args.genus, parsed_args.n, parsed_args.preset)
    if parsed_args.orbit and parsed_args.orbits:
        raise ConfigError("Use either --orbit or --orbits all, not both")
    if parsed_args.orbit:
        orbits = [parse_orbit(config.n, text) for text in parsed_args.orbit]
    else:
        orbits = all_orbits(config.n)
    checks = parse_checks(getattr(parsed_args, "checks", "all"))
    max_word_length = getattr(parsed_args, "max_word_length", DEFAULT_MAX_WORD_LENGTH)
    if max_word_length < 0:
        raise ConfigError(f"--max-word-length must be >= 0, got {max_word_length}")
    workers = getattr(parsed_args, "workers", 1)
    if workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {workers}")
    return RunSpec(
        config=config,
        orbits=orbits,
        checks=checks,
        seed=getattr(parsed_args, "seed", DEFAULT_SEED),
        max_word_length=max_word_length,
        output_format=parsed_args.format or detect_output_format(parsed_args.out),
        out=parsed_args.out,
        workers=workers,
    )


def run_orbit(config: BranchConfig, u: CharOrbit, checks: List[str]) -> OrbitResult:
    """All per-orbit checks of one orbit; also returns the factor and closure it built."""
    result = OrbitResult(u)
    if NEEDS_FACTOR.intersection(checks):
        result.factor = build_factor(config, u)
    if NEEDS_CLOSURE.intersection(checks):
        with timed() as clock:
            result.closure = factor_closure(result.factor)
        closure_ms = clock["runtime_ms"]
    params = {"genus": config.g, "n": config.n, "preset": config.preset_name, "orbit": [u.b, u.c]}
    for check in PER_ORBIT_CHECKS:
        if check not in checks:
            continue
        logger.info(f"Running {check} for u={u.label()}")
        if check == CHECK_DIMENSION:
            cert = dimension_certificate(config, u)
        elif check == CHECK_SPAN:
            cert = span_certificate(config, u)
        elif check == CHECK_IRREDUCIBILITY:
            cert = irreducibility_certificate(config, u, factor=result.factor)
        elif check == CHECK_JORDAN:
            cert = jordan_certificate(result.factor.basis, result.factor.twists)
        elif check == CHECK_SYMPLECTIC:
            cert = symplectic_certificate(result.factor.basis, result.factor.twists)
        elif check == CHECK_LIE_CLOSURE:
            cert = lie_closure_certificate(result.closure, params, closure_ms)
        else:
            cert = no_characters_proxy(result.closure, params)
        result.certificates.append(cert)
    return result


def _run_orbits(spec: RunSpec) -> List[OrbitResult]:
    if spec.workers == 1 or len(spec.orbits) == 1:
        return [run_orbit(spec.config, u, spec.checks) for u in spec.orbits]
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        futures = [pool.submit(run_orbit, spec.config, u, spec.checks) for u in spec.orbits]
        # collected in submission order so the report does not depend on scheduling
        return [f.result() for f in futures]


def cmd_report(spec: RunSpec) -> Dict:
    """Run the selected checks and assemble the report."""
    config = spec.config
    certificates: List[Certificate] = []
    if CHECK_BRAID in spec.checks:
        certificates.append(braid_certificate(config.g))
    if CHECK_AD_REGULAR in spec.checks:
        certificates.append(ad_regular_decomposition(config.n))
    if CHECK_HEISENBERG_COMPARISON in spec.checks:
        for u in dict.fromkeys(spec.orbits):
            if not u.is_trivial:
                certificates.append(heisenberg_comparison_certificate(u))

    results = _run_orbits(spec)
    factors = {r.orbit: r.factor for r in results if r.factor is not None}
    closures = {r.orbit: r.closure for r in results if r.closure is not None}
    for r in results:
        certificates.extend(r.certificates)

    if CHECK_SEPARATION in spec.checks:
        distinct = []
        for u in spec.orbits:
            if not u.is_trivial and u not in distinct:
                distinct.append(u)
        for a in range(len(distinct)):
            for b in range(a + 1, len(distinct)):
                certificates.append(component_separation(config, distinct[a], distinct[b], factors))
    if CHECK_OPEN_ORBIT in spec.checks:
        certificates.append(
            open_orbit_certificate(config, spec.orbits, factors, closures, seed=spec.seed)
        )
    if CHECK_NONCOMPACTNESS in spec.checks and spec.max_word_length > 0:
        search_factors = {
            u: factors.get(u) or build_factor(config, u) for u in all_orbits(config.n)
        }
        certificates.append(
            noncompactness_search(config, spec.max_word_length, spec.seed, search_factors)
        )

    summary = summarize(certificates)
    exit_code = EXIT_FAILURE if summary["fail"] else EXIT_OK
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "params": spec.to_json(),
        "certificates": [c.to_dict() for c in certificates],
        "summary": summary,
        "exit_code": exit_code,
    }


def cmd_matrices(spec: RunSpec) -> Dict:
    """Passing matrices, every M_ij with its class, D_ij^2 and A_ij, and the Gram matrix."""
    config = spec.config
    u = next((v for v in spec.orbits if not v.is_trivial), spec.orbits[0])
    ls = local_system(config, u)
    matrices: Dict[str, List] = {}
    classes: Dict[str, str] = {}
    for k in range(1, config.g + 2):
        matrices[f"P_{k}"] = ls.cut_matrix(k).to_json()
    for loop in all_loops(config.g):
        mc = ls.monodromy(loop.i, loop.j)
        name = f"M_{loop.i}_{loop.j}"
        matrices[name] = mc.matrix.to_json()
        classes[name] = mc.kind
    factor = build_factor(config, u)
    for (i, j), op in sorted(factor.twists.items()):
        matrices[f"D2_{i}_{j}"] = op.matrix.to_json()
        matrices[f"A_{i}_{j}"] = factor.nilpotents[(i, j)].to_json()
    matrices["gram"] = factor.gram.to_json()
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "params": {
            "genus": config.g,
            "n": config.n,
            "preset": config.preset_name,
            "orbit": [u.b, u.c],
        },
        "classification": classes,
        "cycles": factor.basis.to_json()["cycles"],
        "matrices": matrices,
    }


def _emit(content: str, out: Optional[str]):
    if out:
        save_to_file(content, out)
    else:
        print(content, file=sys.stdout)


def main(args: Optional[List[str]] = None):
    """Main entry point for the CLI."""
    parsed_args = parse_args(args)

    if parsed_args.verbose:
        os.environ["LOG_LEVEL"] = str(logging.DEBUG)
        logger.set_level(logging.DEBUG)
        logger.debug("Verbose logging enabled")

    try:
        spec = build_run_spec(parsed_args)
    except ConfigError as e:
        logger.error(f"Invalid parameters: {str(e)}")
        print(f"error: {str(e)}", file=sys.stderr)
        sys.exit(EXIT_USAGE)

    try:
        if parsed_args.command == "report":
            if spec.output_format == FORMAT_CSV:
                raise ConfigError("Reports are JSON only; CSV is available for matrices")
            payload = cmd_report(spec)
            exit_code = payload["exit_code"]
            summary = payload["summary"]
            print(
                f"pass: {summary['pass']}, fail: {summary['fail']}, "
                f"inconclusive: {summary['inconclusive']}",
                file=sys.stderr,
            )
        else:
            payload = cmd_matrices(spec)
            exit_code = EXIT_OK
        _emit(format_for_output_type(payload, spec.output_format), spec.out)
    except ConfigError as e:
        logger.error(f"Invalid parameters: {str(e)}")
        print(f"error: {str(e)}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except Exception as e:
        logger.error(f"Error: {str(e)}")
        sys.exit(EXIT_FAILURE)

    sys.exit(exit_code)


if __name__ == "__main__":
    main()
