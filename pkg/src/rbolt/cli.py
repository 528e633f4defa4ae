"""Command-line front end: ``rbolt compile|train|verify --config FILE``.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 resource cap exceeded. ``RBOLT_OUT`` overrides the configured
output directory; ``--out`` overrides both.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional

import numpy as np
import yaml

from .automata import ResourceError, compile_to_dfa, export_dot
from .config import ExperimentConfig, load
from .envs import ConfigError
from .envs.base import TraceLogger
from .logic import FormulaError, parse

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _out_dir(args, configured: Optional[str]) -> Path:
    out = args.out or os.environ.get("RBOLT_OUT") or configured or "runs"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# --------------------------------------------------------------------------
# compile


def cmd_compile(args) -> int:
    try:
        with open(args.config) as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as e:
        raise UsageError(f"cannot read {args.config}: {e}")
    if not isinstance(data, dict) or "bolt" not in data:
        raise UsageError("spec file needs a bolt block")
    bolt = data["bolt"] or {}
    fluents = bolt.get("fluents")
    if fluents is None and data.get("env"):
        cfg = ExperimentConfig.from_dict(data)
        fluents = cfg.fluents()
    specs = bolt.get("specs") or []
    if not specs:
        raise UsageError("bolt block has no specs")
    out = _out_dir(args, data.get("output") if isinstance(data.get("output"), str) else None)
    rows = []
    for i, spec in enumerate(specs):
        if isinstance(spec, str):
            spec = {"formula": spec}
        text = spec.get("formula", "")
        try:
            f = parse(text, fluents, spec.get("logic", "ltlf"))
        except (FormulaError, ValueError) as e:
            raise UsageError(f"spec {i}: {e}")
        try:
            dfa = compile_to_dfa(f)
        except ResourceError as e:
            raise ResourceError(f"spec {i}: {e}")
        (out / f"spec_{i}.dot").write_text(export_dot(dfa, name=f"spec_{i}"))
        (out / f"spec_{i}.json").write_text(dfa.dumps() + "\n")
        rows.append((i, dfa.num_states, len(dfa.accepting), len(dfa.failure_states()),
                     dfa.max_distance(), text))
    print(f"{'spec':>4}  {'|Q|':>5}  {'|F|':>4}  {'fail':>4}  {'maxd':>4}  formula")
    for i, nq, nf, nfail, md, text in rows:
        print(f"{i:>4}  {nq:>5}  {nf:>4}  {nfail:>4}  {md:>4}  {text}")
    print(f"wrote {2 * len(rows)} files to {out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# train


def _run_seed(cfg_dict: dict, seed: int, out: str) -> dict:
    from .rl import evaluate_policy, train

    cfg = ExperimentConfig.from_dict(cfg_dict)
    env = cfg.make_env(seed)
    bolt = cfg.make_bolt(env)
    tc = dataclasses.replace(cfg.train, seed=seed)
    out_path = Path(out)
    trace = TraceLogger(out_path / f"trace_seed{seed}.jsonl") if cfg.trace else None
    try:
        q, log = train(env, bolt, tc, trace=trace)
    finally:
        if trace is not None:
            trace.close()
    (out_path / f"train_seed{seed}.csv").write_text(log.to_csv())
    (out_path / f"policy_seed{seed}.tsv").write_text(log.best_q.dumps(env.actions))
    ev = evaluate_policy(env, bolt, log.best_q, tc.eval_episodes, seed=seed, max_steps=tc.max_steps)
    return {
        "seed": seed,
        "episodes": len(log.records),
        "first_satisfied": log.first_satisfied,
        "reached_target": log.reached_target,
        **ev,
    }


def cmd_train(args) -> int:
    cfg = load(args.config)
    if args.seed_override is not None:
        cfg.seeds = [args.seed_override]
    cfg.validate()
    out = _out_dir(args, cfg.output)
    cfg_dict = cfg.to_dict()
    jobs = max(1, args.jobs or 1)
    if jobs == 1 or len(cfg.seeds) == 1:
        results = [_run_seed(cfg_dict, s, str(out)) for s in cfg.seeds]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_seed, [cfg_dict] * len(cfg.seeds), cfg.seeds,
                                    [str(out)] * len(cfg.seeds)))
    (out / "report.json").write_text(json.dumps(results, indent=1) + "\n")
    print(f"{'seed':>6}  {'episodes':>8}  {'mean_return':>11}  {'score':>6}  {'satisfied':>9}")
    for r in results:
        print(f"{r['seed']:>6}  {r['episodes']:>8}  {r['mean_return']:>11.4f}  "
              f"{r['mean_score']:>6.2f}  {r['spec_satisfaction_rate']:>9.2f}")
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def run_checks(cfg: ExperimentConfig) -> List[dict]:
    """Oracle checks for a small instance; each result has name, ok, detail."""
    from . import oracle

    v = cfg.verify or type("V", (), {})()
    gamma = getattr(v, "gamma", 0.9)
    horizon = getattr(v, "horizon", 12)
    cap = getattr(v, "product_cap", oracle.PRODUCT_CAP)
    max_policies = getattr(v, "max_policies", 4096)
    broken = getattr(v, "broken_terminal_potential", None)

    env = cfg.make_env()
    bolt = cfg.make_bolt(env, shaping="offline")
    model = oracle.joint_model(env, cap)
    mdp = oracle.enumerate_product(model, bolt, gamma, episodic=True, cap=cap)
    checks = []

    def record(name, ok, detail):
        checks.append({"name": name, "ok": bool(ok), "detail": detail})

    record("product rows stochastic", mdp.check_stochastic(), f"{mdp.num_states} product states")

    sol = oracle.value_iteration(mdp)
    res = sol.residuals
    monotone = all(b <= a + 1e-15 for a, b in zip(res[1:], res[2:]))
    record("value iteration", monotone or gamma >= 1.0,
           f"{len(res)} sweeps, final residual {res[-1]:.3g}, V(x0) = {sol.values[mdp.initial]:.6g}")

    marg = oracle.marginalize_l(mdp)
    msol = oracle.value_iteration(marg)
    gap = max(abs(sol.values[i] - msol.values[marg.index[(q, s)]])
              for i, (q, s, _) in enumerate(mdp.states))
    record("l-independence", gap <= 1e-9, f"max |V(q,s,l) - V(q,s)| = {gap:.3g}")

    keys = sorted({(q, s) for i, (q, s, _) in enumerate(mdp.states) if not mdp.terminal[i]}, key=repr)
    n_pol = len(mdp.actions) ** len(keys)
    if n_pol <= max_policies:
        tables = list(oracle.enumerate_policies(keys, mdp.actions))
    else:
        greedy = {}
        for i, (q, s, _) in enumerate(mdp.states):
            if not mdp.terminal[i]:
                greedy.setdefault((q, s), mdp.actions[int(sol.policy[i])])
        tables = [greedy]
    specs = [(s.formula, s.reward) for s in bolt.specs]
    r_max = float(np.max(np.abs(mdp.rewards))) if len(mdp.rewards) else 0.0
    bound = gamma ** horizon * r_max / (1.0 - gamma) if gamma < 1 else float("inf")
    worst = 0.0
    for table in tables:
        pv = oracle.policy_evaluation(mdp, oracle.product_policy_vector(mdp, table))[mdp.initial]
        hv = oracle.nmrdp_value_horizon(model, specs, gamma, horizon,
                                        oracle.markov_policy_as_history(bolt, table),
                                        scaling=bolt.scaling)
        worst = max(worst, abs(pv - hv))
    record("product value = trace value", worst <= bound * (1 + 1e-12),
           f"{len(tables)} policies, max gap {worst:.3g} (bound {bound:.3g}, H = {horizon})")

    phi = oracle.product_potential(mdp, bolt)
    rep = oracle.check_shaping_invariance(mdp, phi)
    record("shaping invariance", rep.ok, f"{rep.checked} live states, {len(rep.mismatches)} mismatches")

    if broken is not None:
        bad = oracle.broken_terminal_potential(mdp, bolt, broken)
        rep = oracle.check_shaping_invariance(mdp, bad)
        record("shaping invariance (terminal potential %g)" % broken, rep.ok,
               f"{rep.checked} live states, {len(rep.mismatches)} mismatches")
    return checks


def cmd_verify(args) -> int:
    cfg = load(args.config)
    cfg.validate()
    checks = run_checks(cfg)
    for c in checks:
        print(f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']}: {c['detail']}")
    if args.out or os.environ.get("RBOLT_OUT"):
        out = _out_dir(args, None)
        (out / "verify.json").write_text(json.dumps(checks, indent=1) + "\n")
    return EXIT_OK if all(c["ok"] for c in checks) else EXIT_VERIFY


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rbolt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("compile", "compile bolt specifications to DFAs"),
                           ("train", "train tabular agents with a bolt"),
                           ("verify", "run brute-force oracle checks")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", required=True, help="YAML experiment or spec file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--jobs", type=int, default=1, help="seeds trained in parallel")
        sp.add_argument("--seed-override", type=int, help="train only this seed")
    return p


COMMANDS = {"compile": cmd_compile, "train": cmd_train, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ResourceError as e:
        print(f"error: resource cap exceeded: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ConfigError, FormulaError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
