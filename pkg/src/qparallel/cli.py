"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 precondition violation,
3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import circuit_io, generators, passes
from .circuit import Circuit, Cnot, LayeredCircuit, OneQubit, Unitary, schedule_greedy
from .linalg import NonUnitaryError, NotCommutingError, SingularMatrixError
from .simulator import (
    GateKindError,
    NotDiagonalError,
    SimulationSizeError,
    gf2_simulate,
    embedded_phase_vector,
    phase_vector,
    verify_embedding,
)

EXIT_OK, EXIT_IO, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3
PASS_NAMES = ("permute-anc", "permute", "fanout", "diag-fanin", "commute-fanin",
              "diag-compress", "cnot", "morse", "power")
_PRECONDITION_ERRORS = (passes.PreconditionError, GateKindError, NotDiagonalError,
                        NotCommutingError, NonUnitaryError, SingularMatrixError,
                        SimulationSizeError)


@dataclass
class Report:
    command: str
    pass_name: str | None = None
    gates_in: int | None = None
    gates_out: int | None = None
    depth_before: int | None = None
    depth_after: int | None = None
    ancillae_used: int | None = None
    claimed_depth_bound: int | None = None
    verification: dict | None = None
    wall_time: float = 0.0
    notes: str = ""
    extra: dict = field(default_factory=dict)

    def emit(self, as_json: bool) -> None:
        data = {k: v for k, v in asdict(self).items() if v not in (None, "", {})}
        if as_json:
            print(json.dumps(data, indent=1, default=float))
            return
        for k, v in data.items():
            if isinstance(v, dict):
                print(f"{k}:")
                for kk, vv in v.items():
                    print(f"  {kk}: {vv}")
            else:
                print(f"{k}: {v}")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _flat(c) -> Circuit:
    return c.flatten() if isinstance(c, LayeredCircuit) else c


def _load(path) -> Circuit:
    try:
        return _flat(circuit_io.load(path))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    except circuit_io.CircuitFormatError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc}") from exc


def _write(circuit, path) -> None:
    if path is None or path == "-":
        print(circuit_io.dumps(circuit))
        return
    try:
        circuit_io.save(circuit, path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


# --------------------------------------------------------------------------

def cmd_gen(args) -> Report:
    kind = args.family
    if kind == "qft":
        c = generators.gen_qft(args.n)
    elif kind == "staircase":
        c = generators.gen_staircase(args.n, generators.NAMED_UNITARIES[args.unitary])
    elif kind == "fanout":
        rng = np.random.default_rng(args.seed)
        c = Circuit(args.n + 1, 0, [passes.ControlledU(0, i + 1, generators.random_unitary(2, rng))
                                    for i in range(args.n)])
    else:
        try:
            inst = generators.gen_random(args.random_family, args.n, args.count, args.seed)
        except ValueError as exc:
            raise CliError(EXIT_PRECONDITION, str(exc)) from exc
        c = generators.swap_network(inst) if args.random_family == "permutation" else inst
    _write(c, args.out)
    return Report("gen", gates_out=len(c.gates), depth_after=schedule_greedy(c).depth,
                  notes=f"{kind} n={args.n}")


def _power_operator(c: Circuit):
    if len(c.gates) != 1 or not isinstance(c.gates[0], (OneQubit, Unitary)):
        raise passes.PreconditionError("power pass expects a file holding exactly one one_qubit or unitary gate")
    return c.gates[0].matrix()


def run_pass(name: str, c: Circuit, args) -> tuple[passes.PassResult, object]:
    """Dispatch to a pass; returns the result and the reference for verification."""
    if name in ("permute-anc", "permute"):
        p = passes.permutation_from_circuit(c)
        fn = passes.permute_with_ancillae if name == "permute-anc" else passes.permute_no_ancillae
        return fn(p), c
    if name == "fanout":
        return passes.fanout_parallelize(c), c
    if name == "diag-fanin":
        return passes.diag_fanin_parallelize(c), c
    if name == "commute-fanin":
        return passes.commuting_fanin_parallelize(c), c
    if name == "diag-compress":
        return passes.diag_compress(c, log_depth=args.log_depth), c
    if name == "cnot":
        return passes.cnot_parallelize(c), c
    if name == "morse":
        return passes.morse_synthesize(phase_vector(c, args.max_sim_qubits)), c
    if name == "power":
        u = _power_operator(c)
        return passes.power_circuit(u, args.k), passes.power_reference(u, args.k)
    raise CliError(EXIT_PRECONDITION, f"unknown pass {name!r}")


def check_result(reference, candidate, tol: float, seed: int, max_qubits: int) -> dict:
    """Pick the cheapest exact oracle that covers the candidate's gate set."""
    cand = _flat(candidate)
    if isinstance(reference, Circuit):
        n = reference.n_qubits
        m = cand.n_qubits - n
        if all(isinstance(g, Cnot) for g in cand.gates) and all(isinstance(g, Cnot) for g in reference.gates):
            ref_map, out_map = gf2_simulate(reference), gf2_simulate(cand)
            data_mask = ((1 << n) - 1)
            mismatched = sum(
                1 for i in range(n) if (out_map.rows[i] & data_mask) != ref_map.rows[i])
            dirty = sum(1 for i in range(n, n + m) if out_map.rows[i] & data_mask)
            ok = mismatched == 0 and dirty == 0
            return {"oracle": "gf2", "verdict": "pass" if ok else "fail",
                    "mismatched_rows": mismatched, "dirty_ancillae": dirty}
        try:
            ref_pv = phase_vector(reference, max_qubits)
            out_pv = embedded_phase_vector(cand, max_qubits)
        except (GateKindError, NotDiagonalError):
            pass
        else:
            dev = out_pv.distance(ref_pv)
            return {"oracle": "phase_vector", "verdict": "pass" if dev <= tol else "fail",
                    "max_phase_deviation": dev}
    rep = verify_embedding(reference, cand, tol, seed, max_qubits)
    return {"oracle": "dense", **rep.as_dict()}


def cmd_parallelize(args) -> Report:
    c = _load(args.inp)
    t0 = time.perf_counter()
    try:
        result, reference = run_pass(args.pass_name, c, args)
    except _PRECONDITION_ERRORS as exc:
        raise CliError(EXIT_PRECONDITION, f"precondition violated: {exc}") from exc
    report = Report(
        "parallelize", pass_name=args.pass_name, gates_in=len(c.gates),
        gates_out=len(result.circuit.gates), depth_before=schedule_greedy(c).depth,
        depth_after=result.depth, ancillae_used=result.ancillae_used,
        claimed_depth_bound=result.claimed_depth_bound, notes=result.notes)
    if args.out:
        _write(result.circuit, args.out)
    if args.verify:
        try:
            report.verification = check_result(reference, result.circuit, args.tolerance,
                                               args.seed, args.max_sim_qubits)
        except SimulationSizeError as exc:
            report.verification = {"verdict": "skipped", "reason": str(exc)}
    report.wall_time = time.perf_counter() - t0
    return report


def cmd_verify(args) -> Report:
    ref, cand = _load(args.original), _load(args.candidate)
    t0 = time.perf_counter()
    try:
        rep = verify_embedding(ref, cand, args.tolerance, args.seed, args.max_sim_qubits)
    except (SimulationSizeError, ValueError) as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from exc
    return Report("verify", gates_in=len(ref.gates), gates_out=len(cand.gates),
                  verification=rep.as_dict(), wall_time=time.perf_counter() - t0)


def cmd_depth(args) -> Report:
    c = _load(args.inp)
    return Report("depth", gates_in=len(c.gates), depth_after=schedule_greedy(c).depth)


def cmd_stats(args) -> Report:
    c = _load(args.inp)
    kinds: dict[str, int] = {}
    for g in c.gates:
        kinds[g.kind] = kinds.get(g.kind, 0) + 1
    return Report("stats", gates_in=len(c.gates), depth_after=schedule_greedy(c).depth,
                  extra={"width_data": c.width_data, "width_ancilla": c.width_ancilla,
                         "global_phase": c.global_phase, "gate_kinds": kinds})


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=1e-8)
    common.add_argument("--max-sim-qubits", type=int, default=22)
    common.add_argument("--json", action="store_true", help="print the report as JSON")

    parser = argparse.ArgumentParser(prog="qparallel", description="Quantum circuit depth reduction.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a generated circuit")
    g.add_argument("family", choices=("qft", "staircase", "random", "fanout"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--unitary", choices=sorted(generators.NAMED_UNITARIES), default="hadamard")
    g.add_argument("--family", dest="random_family", choices=generators.FAMILIES, default="cnot")
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("parallelize", parents=[common], help="run a depth-reduction pass")
    p.add_argument("--pass", dest="pass_name", choices=PASS_NAMES, required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--log-depth", action="store_true", help="diag-compress: fan out to O(log n) depth")
    p.add_argument("--k", type=int, default=1, help="power: control register size")
    p.set_defaults(func=cmd_parallelize)

    v = sub.add_parser("verify", parents=[common], help="check an embedding against the original")
    v.add_argument("original")
    v.add_argument("candidate")
    v.set_defaults(func=cmd_verify)

    for name, fn in (("depth", cmd_depth), ("stats", cmd_stats)):
        d = sub.add_parser(name, parents=[common])
        d.add_argument("--in", dest="inp", required=True)
        d.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    report.emit(args.json)
    if report.verification and report.verification.get("verdict") == "fail":
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
