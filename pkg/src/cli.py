"""
Command line: vaserstein <subcommand> [flags].

Exit codes: 0 on success, 1 on invalid input or a failed precondition,
2 when a certificate or construction does not check.
"""
import argparse
import sys
from typing import List, Optional, Tuple

from .complete import generalized_completion
from .errors import VerificationError
from .eventlog import emit
from .formats import (parse_record, read_certificate, read_epi_data, read_matrix, read_module, read_word,
                      write_completion, write_symbol)
from .matrix import Matrix
from .oracle import run_oracle
from .projmod import ProjModule, Trivialization, UmEpi
from .ring import RingSpec, bezout_witness, ring_parse
from .selftest import DEFAULT_RINGS, run_selftest
from .symbol import epi_on, free_symbol_data, generalized_symbol
from .witt import EquivCert, WittRep, verify_equiv


def _read(path: str) -> str:
    with open(path) as f:
        return f.read()


def _write(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, 'w') as f:
            f.write(text)
        emit("OutputWritten", path=path)
    else:
        sys.stdout.write(text)


def _parse_vector(ring: RingSpec, text: str) -> List:
    return [ring(part) for part in text.split(',')]


def _epi_inputs(args: argparse.Namespace, ring: RingSpec) -> Tuple[ProjModule, Trivialization, UmEpi]:
    """(P0, trivialization, epi) from --row/--witness or from --module/--epi."""
    if args.row:
        row = _parse_vector(ring, args.row)
        if len(row) != 3:
            raise ValueError("--row needs three entries")
        witness = _parse_vector(ring, args.witness) if args.witness else bezout_witness(row)
        return free_symbol_data(Matrix.row(ring, row), Matrix.column(ring, witness))
    if not (args.module and args.epi):
        raise ValueError("give --row, or both --module and --epi")
    P0, triv = read_module(_read(args.module), ring)
    if triv is None:
        raise ValueError("module file has no trivialization (w, lambda)")
    a, s = read_epi_data(_read(args.epi), ring)
    return P0, triv, epi_on(P0, a, s)


def cmd_pfaffian(args: argparse.Namespace) -> int:
    ring = ring_parse(args.ring)
    M = read_matrix(_read(args.input), ring)
    print(M.pfaffian())
    return 0


def cmd_symbol(args: argparse.Namespace) -> int:
    ring = ring_parse(args.ring)
    P0, triv, epi = _epi_inputs(args, ring)
    result = generalized_symbol(P0, triv, epi)
    _write(write_symbol(result.triple.g, result.triple.f, result.pfaffian, result.witt.size), args.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    ring = ring_parse(args.ring)
    M = WittRep(read_matrix(_read(args.left), ring))
    N = WittRep(read_matrix(_read(args.right), ring))
    text = _read(args.cert)
    if parse_record(text).kind == 'word':
        cert = EquivCert(0, read_word(text, ring))
    else:
        cert = read_certificate(text, ring)
    if not verify_equiv(M, N, cert):
        raise VerificationError("certificate does not check")
    print("OK")
    return 0


def cmd_complete(args: argparse.Namespace) -> int:
    ring = ring_parse(args.ring)
    P0, triv, epi = _epi_inputs(args, ring)
    _write(write_completion(generalized_completion(P0, triv, epi)), args.out)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    params = {
        'ring': args.ring,
        'stab_levels': args.stab_levels,
        'max_states': args.max_states,
        'max_ring_size': args.max_ring_size,
    }
    if args.out:
        params['output_dir'] = args.out
    report = run_oracle(params)
    if not args.out:
        sys.stdout.write(report.to_record().dumps())
    else:
        print(f"summary: {report.summary()}")
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    params = {
        'random_seed': args.seed,
        'instances': args.instances,
        'rings': args.rings.split(',') if args.rings else DEFAULT_RINGS,
    }
    result = run_selftest(params)
    print(f"passed: {result.passed} skipped: {result.skipped} failed: {len(result.failures)}")
    return 0 if result.ok else 2


def _add_epi_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ring", required=True)
    p.add_argument("--row", default="", help="Unimodular row a1,a2,a3 on R^3")
    p.add_argument("--witness", default="", help="Section b with a.b = 1 (default: computed)")
    p.add_argument("--module", default="", help="Module file with trivialization")
    p.add_argument("--epi", default="", help="Epimorphism file (a, s) on P0 + R")
    p.add_argument("--out", default="", help="Output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vaserstein")
    sub = ap.add_subparsers(dest="cmd", required=True)

    pf = sub.add_parser("pfaffian", help="Print the Pfaffian of a skew matrix file")
    pf.add_argument("--ring", required=True)
    pf.add_argument("--in", dest="input", required=True)
    pf.set_defaults(func=cmd_pfaffian)

    sy = sub.add_parser("symbol", help="Generalized Vaserstein symbol")
    _add_epi_flags(sy)
    sy.set_defaults(func=cmd_symbol)

    ve = sub.add_parser("verify", help="Check an equivalence certificate")
    ve.add_argument("--ring", required=True)
    ve.add_argument("--left", required=True)
    ve.add_argument("--right", required=True)
    ve.add_argument("--cert", required=True)
    ve.set_defaults(func=cmd_verify)

    co = sub.add_parser("complete", help="Determinant-1 completion of (a0, a_R^2)")
    _add_epi_flags(co)
    co.set_defaults(func=cmd_complete)

    orc = sub.add_parser("oracle", help="Brute-force symbol map over a finite ring")
    orc.add_argument("--ring", required=True)
    orc.add_argument("--out", default="", help="Run directory for report.txt and parameters.json")
    orc.add_argument("--stab-levels", type=int, default=1, choices=[0, 1])
    orc.add_argument("--max-states", type=int, default=200000)
    orc.add_argument("--max-ring-size", type=int, default=9)
    orc.set_defaults(func=cmd_oracle)

    st = sub.add_parser("selftest", help="Randomized identity suites")
    st.add_argument("--seed", type=int, default=100)
    st.add_argument("--instances", type=int, default=20)
    st.add_argument("--rings", default="", help="Comma separated ring specs")
    st.set_defaults(func=cmd_selftest)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VerificationError as exc:
        emit("CommandFailed", command=args.cmd, error=type(exc).__name__, message=str(exc))
        print(f"FAIL: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        emit("CommandFailed", command=args.cmd, error=type(exc).__name__, message=str(exc))
        print(f"ERROR: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
