"""Command-line front end.

Subcommands: ``build``, ``check``, ``estimate``, ``simulate``, ``export``.
Plant files may contain either a finite system or a continuous plant spec
(detected by their fields); specs are quantized on the fly.  Every
randomized run takes or prints an explicit seed and reruns bit-identically.
Exit codes: 0 on success with all requested checks passing, 1 when a check
fails, 2 on usage or input errors.

The environment variable ``NCS_ABSTRACT_THREADS``, when set, caps the
number of workers; the current implementation runs a single worker, which
respects any positive cap.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from . import io as nio
from .builder import (
    build_ncs_dynamic,
    build_ncs_static,
    enumerate_dynamic_states,
    enumerate_static_states,
    simulate_trace,
    trace_contained,
)
from .errors import NcsAbstractError, RangeError
from .grid import build_grid_abstraction
from .packets import DelayBounds, channel_history, controller_measurement_index, held_input_index
from .relations import (
    Relation,
    check_bisimulation,
    check_simulation,
    largest_approx_bisimulation,
    largest_approx_simulation,
)
from .sizing import (
    SizeInputs,
    size_dynamic,
    size_prior_work,
    size_static,
    state_count_dynamic,
    state_count_static,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def _worker_cap() -> int:
    raw = os.environ.get("NCS_ABSTRACT_THREADS")
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError as exc:
        raise RangeError(f"NCS_ABSTRACT_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise RangeError("NCS_ABSTRACT_THREADS must be at least 1")
    return cap


def _load_plant(path: str):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError:
        data = None
    if isinstance(data, dict) and "states" in data:
        return nio.load_system(path)
    spec = nio.load_plant_spec(path)
    return build_grid_abstraction(spec).system


def _bounds(args) -> DelayBounds:
    return DelayBounds(args.nsc[0], args.nsc[1], args.nca[0], args.nca[1])


def _emit(args, human_lines, payload) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2))
    else:
        for line in human_lines:
            print(line)


def cmd_build(args) -> int:
    plant = _load_plant(args.plant)
    bounds = _bounds(args)
    build = build_ncs_static if args.static else build_ncs_dynamic
    model = build(plant, bounds, full_space=args.full)
    lines = [
        f"states: {len(model.states)}",
        f"transitions: {model.size()}",
        f"initial: {len(model.initial)}",
        f"deterministic: {'yes' if model.is_deterministic() else 'no'}",
    ]
    payload = {
        "states": len(model.states),
        "transitions": model.size(),
        "initial": len(model.initial),
        "deterministic": model.is_deterministic(),
    }
    if args.unreachable:
        enumerate_all = enumerate_static_states if args.static else enumerate_dynamic_states
        reachable = set(model.states) if not args.full else None
        if reachable is None:
            pruned = build(plant, bounds)
            reachable = set(pruned.states)
        unreachable = sorted(
            s.key() for s in enumerate_all(plant, bounds) if s.key() not in reachable
        )
        lines.append(f"unreachable states: {len(unreachable)}")
        lines.extend(f"  {key}" for key in unreachable)
        payload["unreachable"] = unreachable
    if args.out:
        nio.save_system(model, args.out)
        lines.append(f"written: {args.out}")
        payload["out"] = str(args.out)
    _emit(args, lines, payload)
    return EXIT_OK


def cmd_check(args) -> int:
    left = nio.load_system(args.left)
    right = nio.load_system(args.right)
    epsilon = args.epsilon

    if args.relation:
        relation = nio.load_relation(args.relation, left, right)
        checker = check_bisimulation if args.bisim else check_simulation
        result = checker(relation, epsilon, alternating=args.alternating)
        holds, pairs = result.holds, relation
        violation = result.violation
    else:
        compute = largest_approx_bisimulation if args.bisim else largest_approx_simulation
        computed = compute(left, right, epsilon, alternating=args.alternating)
        holds, pairs = computed.initial_covered, computed.relation
        violation = None
        if args.out:
            nio.save_relation(pairs, args.out)

    mode = ("alternating " if args.alternating else "") + (
        "bisimulation" if args.bisim else "simulation"
    )
    lines = [
        f"mode: {mode} at epsilon={epsilon}",
        f"relation pairs: {len(pairs)}",
        f"verdict: {'holds' if holds else 'fails'}",
    ]
    payload = {
        "mode": mode,
        "epsilon": epsilon,
        "pairs": len(pairs),
        "holds": holds,
    }
    if violation is not None:
        lines.append(f"counterexample: {json.dumps(violation.as_dict())}")
        payload["counterexample"] = violation.as_dict()
    if not args.relation and args.out:
        lines.append(f"written: {args.out}")
        payload["out"] = str(args.out)
    _emit(args, lines, payload)
    return EXIT_OK if holds else EXIT_CHECK_FAILED


def cmd_estimate(args) -> int:
    si = SizeInputs(args.d_card, args.u_card, _bounds(args), args.k)
    rows = [
        ("baseline transitions", size_prior_work(si)),
        ("two-channel transitions", size_dynamic(si)),
        ("single-channel transitions", size_static(si)),
        ("two-channel states", state_count_dynamic(si)),
        ("single-channel states", state_count_static(si)),
    ]
    width = max(len(name) for name, _ in rows)
    lines = [f"{name:<{width}}  {value:>22}  {value:.4e}" for name, value in rows]
    payload = {name: {"exact": value, "sci": f"{value:.4e}"} for name, value in rows}
    _emit(args, lines, payload)
    return EXIT_OK


def _parse_csv_ints(raw: str) -> list:
    return [int(tok) for tok in raw.split(",") if tok != ""]


def _parse_csv(raw: str) -> list:
    return [tok for tok in raw.split(",") if tok != ""]


def cmd_simulate(args) -> int:
    plant = _load_plant(args.plant)
    bounds = _bounds(args)
    scripted = args.sc_delays is not None or args.ca_delays is not None or args.inputs is not None

    if scripted:
        if not (args.sc_delays and args.ca_delays and args.inputs):
            raise RangeError("scripted runs need --sc-delays, --ca-delays and --inputs together")
        sc = _parse_csv_ints(args.sc_delays)
        ca = _parse_csv_ints(args.ca_delays)
        inputs = _parse_csv(args.inputs)
        seed = None
    else:
        seed = args.seed if args.seed is not None else random.SystemRandom().randrange(2**31)
        rng = random.Random(seed)
        steps = args.steps
        sc = [rng.choice(list(bounds.sc_choices)) for _ in range(steps)]
        ca = [rng.choice(list(bounds.ca_choices)) for _ in range(steps)]
        inputs = [rng.choice(sorted(plant.inputs)) for _ in range(steps)]

    init = args.init or sorted(plant.initial)[0]
    init_input = args.init_input or sorted(plant.inputs)[0]
    outputs = simulate_trace(plant, bounds, sc, ca, inputs, init, init_input)

    lines = []
    payload = {"init": init, "init_input": init_input, "steps": len(inputs)}
    if seed is not None:
        lines.append(f"seed: {seed}")
        payload["seed"] = seed

    # replay the buffers to report which packets were held at each step
    state_sc = (bounds.nsc_max,) * bounds.nsc_max
    state_ca = (bounds.nca_max,) * bounds.nca_max
    steps_payload = []
    lines.append(f"k=0 output={outputs[0]!r}")
    for k, (u, fresh_sc, fresh_ca) in enumerate(zip(inputs, sc, ca), start=1):
        ca_window = channel_history(state_ca, bounds.nca_min, bounds.nca_max, fresh=fresh_ca)
        held = held_input_index(ca_window)
        state_sc = (fresh_sc,) + state_sc[:-1]
        state_ca = (fresh_ca,) + state_ca[:-1]
        if bounds.nsc_min == 0:
            meas = 0
        else:
            sc_window = channel_history(state_sc, bounds.nsc_min, bounds.nsc_max)
            meas = controller_measurement_index(sc_window)
        lines.append(
            f"k={k} input={u} sc_delay={fresh_sc} ca_delay={fresh_ca} "
            f"held_input_offset={held} controller_measurement_offset={meas} "
            f"output={outputs[k]!r}"
        )
        steps_payload.append(
            {
                "k": k,
                "input": u,
                "sc_delay": fresh_sc,
                "ca_delay": fresh_ca,
                "held_input_offset": held,
                "controller_measurement_offset": meas,
                "output": nio.label_to_json(outputs[k]),
            }
        )
    payload["trace"] = [nio.label_to_json(o) for o in outputs]
    payload["steps_detail"] = steps_payload

    model = build_ncs_dynamic(plant, bounds)
    contained = trace_contained(model, outputs, args.epsilon)
    lines.append(f"contained at epsilon={args.epsilon}: {'yes' if contained else 'no'}")
    payload["contained"] = contained
    payload["epsilon"] = args.epsilon
    _emit(args, lines, payload)
    return EXIT_OK if contained else EXIT_CHECK_FAILED


def cmd_export(args) -> int:
    plant = _load_plant(args.plant)
    bounds = _bounds(args)
    build = build_ncs_static if args.static else build_ncs_dynamic
    model = build(plant, bounds)
    dot = nio.to_dot(model)
    if args.out:
        Path(args.out).write_text(dot, encoding="utf-8")
        _emit(
            args,
            [f"nodes: {len(model.states)}", f"written: {args.out}"],
            {"nodes": len(model.states), "out": str(args.out)},
        )
    else:
        print(dot, end="")
    return EXIT_OK


def _add_bounds_args(parser) -> None:
    parser.add_argument("--nsc", nargs=2, type=int, required=True, metavar=("MIN", "MAX"),
                        help="sensor-to-controller delay bounds, in sampling periods")
    parser.add_argument("--nca", nargs=2, type=int, required=True, metavar=("MIN", "MAX"),
                        help="controller-to-actuator delay bounds, in sampling periods")


def _add_shape_args(parser) -> None:
    shape = parser.add_mutually_exclusive_group(required=True)
    shape.add_argument("--static", action="store_true",
                       help="single combined channel (memoryless controllers)")
    shape.add_argument("--dynamic", action="store_true", help="separate channels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncs-abstract",
        description="Build and check finite models of control loops closed over a delaying, "
        "reordering network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a network-closure model")
    p.add_argument("--plant", required=True, help="plant system or plant spec (JSON)")
    _add_shape_args(p)
    _add_bounds_args(p)
    p.add_argument("--full", action="store_true", help="materialize the full product space")
    p.add_argument("--unreachable", action="store_true",
                   help="also list states of the full space that are unreachable")
    p.add_argument("--out", help="write the model to this JSON file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", help="compute or check an approximate (bi)simulation")
    p.add_argument("--left", required=True, help="left system (JSON)")
    p.add_argument("--right", required=True, help="right system (JSON)")
    p.add_argument("--relation", help="check this relation file instead of computing the largest")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--alternating", action="store_true")
    p.add_argument("--bisim", action="store_true", help="check both directions")
    p.add_argument("--out", help="write the computed relation to this JSON file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("estimate", help="closed-form size bounds")
    p.add_argument("--d-card", type=int, required=True, help="plant state-grid cardinality")
    p.add_argument("--u-card", type=int, required=True, help="plant input-grid cardinality")
    _add_bounds_args(p)
    p.add_argument("--k", type=int, default=1, help="max plant successors per (state, input)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="run one delay realization and check containment")
    p.add_argument("--plant", required=True)
    _add_bounds_args(p)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--seed", type=int, help="seed for random delays and inputs (printed)")
    p.add_argument("--sc-delays", help="scripted sensor-channel delays, comma-separated")
    p.add_argument("--ca-delays", help="scripted actuation-channel delays, comma-separated")
    p.add_argument("--inputs", help="scripted input sequence, comma-separated")
    p.add_argument("--init", help="initial plant state (default: first initial state)")
    p.add_argument("--init-input", help="initial buffered input (default: first input)")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", help="DOT rendering of a built model")
    p.add_argument("--plant", required=True)
    _add_shape_args(p)
    _add_bounds_args(p)
    p.add_argument("--out", help="write DOT here instead of stdout")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _worker_cap()
        return args.func(args)
    except NcsAbstractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
