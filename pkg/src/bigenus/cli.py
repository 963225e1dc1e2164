"""Command-line interface.

Subcommands: generate, orient, trails, match, estimate, oracle,
predict, experiment. Graphs and digraphs travel as the plain-text
formats of the bigraph module; estimates become CSV rows with a fixed,
versioned column set. Exit codes: 0 success, 2 guard or validation
refusal, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

from .bigraph import (GenParams, gen_random_bipartite, orient_randomly,
                      read_bipartite, read_digraph, standard_graph,
                      write_bipartite, write_digraph)
from .errors import GuardError, ValidationError
from .estimator import (CSV_COLUMNS, PipelineConfig, estimate_genus,
                        prediction_for, regime_classify)
from .oracle import (SearchBudget, exact_genus, genus_formula_reference,
                     heuristic_genus_upper, minimum_genus_rotation, pincer_genus)
from .trails import (build_trail_hypergraph, enumerate_closed_trails,
                     find_matching, matching_report_to_text, trails_to_text)

SCHEMA_LINE = "# bigenus experiment csv schema v1"
EXPERIMENT_COLUMNS = CSV_COLUMNS + ("timestamp",)


def parse_p(token: str, n1: int) -> float:
    """Edge probability: a literal, or `nexp:E` meaning n1**E."""
    if token.startswith("nexp:"):
        if n1 < 1:
            raise ValidationError("nexp: probability needs n1 >= 1")
        p = float(n1) ** float(token[len("nexp:"):])
    else:
        p = float(token)
    if not (0.0 <= p <= 1.0):
        raise ValidationError(f"p evaluates to {p}, outside [0,1]")
    return p


def parse_config(path: str) -> dict[str, str]:
    """Flat key=value file; # comments and blank lines ignored."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValidationError(f"{path}:{lineno}: expected key=value")
            key = key.strip()
            if key in out:
                raise ValidationError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value.strip()
    return out


@contextlib.contextmanager
def _open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _load_graph_file(path: str):
    """Bipartite graph or digraph, decided by the header word."""
    with open(path) as fh:
        head = fh.readline().split()
        fh.seek(0)
        if head and head[0] == "bipartite":
            return read_bipartite(fh)
        if head and head[0] == "digraph":
            return read_digraph(fh)
    raise ValidationError(f"{path}: unrecognized header, want 'bipartite' or 'digraph'")


def _graph_from_args(args) -> tuple:
    """(graph, p or None). Reads --in when given, else generates."""
    if getattr(args, "infile", None):
        g = _load_graph_file(args.infile)
        return g, None
    if args.n1 is None or args.n2 is None or args.p is None:
        raise ValidationError("need either --in FILE or all of --n1 --n2 --p")
    p = parse_p(args.p, args.n1)
    if getattr(args, "standard", False):
        return standard_graph(args.n1, args.n2, p), p
    return gen_random_bipartite(GenParams(args.n1, args.n2, p, seed=args.seed)), p


def _digraph_from_args(args):
    g, _p = _graph_from_args(args)
    from .bigraph import Digraph

    if isinstance(g, Digraph):
        return g
    return orient_randomly(g, args.seed)


def cmd_generate(args) -> int:
    g, _p = _graph_from_args(args)
    with _open_out(args.out) as fh:
        write_bipartite(g, fh)
    print(f"edges={g.n_edges}", file=sys.stderr)
    return 0


def cmd_orient(args) -> int:
    g, _p = _graph_from_args(args)
    d = orient_randomly(g, args.seed)
    with _open_out(args.out) as fh:
        write_digraph(d, fh)
    print(f"arcs={d.n_arcs}", file=sys.stderr)
    return 0


def cmd_trails(args) -> int:
    d = _digraph_from_args(args)
    ts = enumerate_closed_trails(d, args.i, args.cap)
    with _open_out(args.out) as fh:
        trails_to_text(ts.trails, fh)
    print(f"trails={len(ts)} truncated={int(ts.truncated)}", file=sys.stderr)
    return 0


def cmd_match(args) -> int:
    d = _digraph_from_args(args)
    h = build_trail_hypergraph(d, args.i, args.cap)
    if h.truncated:
        raise GuardError("trail cap truncated enumeration; raise --cap")
    report = find_matching(h, args.strategy, args.seed)
    matching_report_to_text(report, sys.stdout)
    if args.out:
        with _open_out(args.out) as fh:
            trails_to_text(report.matching, fh)
    return 0


def cmd_estimate(args) -> int:
    g, p = _graph_from_args(args)
    cfg = PipelineConfig(strategy=args.strategy, seed=args.seed, cap=args.cap,
                         eps=args.eps, p=p)
    est = estimate_genus(g, args.i, cfg)
    est.to_text(sys.stdout)
    with _open_out(args.out) as fh:
        fh.write("# " + ",".join(CSV_COLUMNS) + "\n")
        fh.write(",".join(est.csv_row()) + "\n")
    return 0


def cmd_oracle(args) -> int:
    if args.complete is not None:
        from .bigraph import complete_graph

        g = complete_graph(args.complete)
        print(f"formula={genus_formula_reference('complete', args.complete)}")
    elif args.complete_bipartite is not None:
        from .bigraph import complete_bipartite_graph

        m, n = args.complete_bipartite
        g = complete_bipartite_graph(m, n)
        print(f"formula={genus_formula_reference('complete_bipartite', m, n)}")
    elif args.infile:
        g = _load_graph_file(args.infile)
    else:
        raise ValidationError("need --in, --complete, or --complete-bipartite")
    budget = SearchBudget(max_systems=args.max_systems, restarts=args.restarts)
    if args.method == "exact":
        if args.witness:
            genus, rot = minimum_genus_rotation(g, budget)
            from .embedding import rotation_to_text

            with open(args.witness, "w") as fh:
                rotation_to_text(rot, fh)
        else:
            genus = exact_genus(g, budget)
        print(f"genus={genus}")
    elif args.method == "heuristic":
        print(f"genus_upper={heuristic_genus_upper(g, budget, args.seed)}")
    else:
        res = pincer_genus(g, budget, args.seed)
        print(f"lower={res.lower}")
        print(f"upper={res.upper}")
        print(f"exact={int(res.exact)}")
    return 0


def cmd_predict(args) -> int:
    if args.n1 is None or args.n2 is None or args.p is None:
        raise ValidationError("predict needs --n1 --n2 --p")
    p = parse_p(args.p, args.n1)
    res = regime_classify(args.n1, args.n2, p)
    pred = prediction_for(res, args.n1, args.n2, p, args.i)
    print(f"regime={res.label()}")
    print(f"prediction={pred:.6g}")
    print(f"prediction_nonorientable={2 * pred:.6g}")
    return 0


def _experiment_cell(cell) -> list[str]:
    n1, n2, p, i, seed, strategy, eps, cap = cell
    try:
        g = gen_random_bipartite(GenParams(n1, n2, p, seed=seed))
        cfg = PipelineConfig(strategy=strategy, seed=seed, cap=cap, eps=eps, p=p)
        est = estimate_genus(g, i, cfg)
        row = est.csv_row()
    except (GuardError, ValidationError) as exc:
        print(f"cell ({n1},{n2},{p:.10g},{i},{seed}) failed: {exc}", file=sys.stderr)
        row = [str(n1), str(n2), f"{p:.10g}", str(i), str(seed),
               "", "", "", "", "", "", "error"]
    row.append(datetime.now(timezone.utc).isoformat(timespec="seconds"))
    return row


def _existing_keys(path: str) -> set[tuple[str, ...]]:
    keys: set[tuple[str, ...]] = set()
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line.startswith("n1,"):
                    continue
                parts = line.split(",")
                if len(parts) >= 5:
                    keys.add(tuple(parts[:5]))
    except FileNotFoundError:
        pass
    return keys


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def cmd_experiment(args) -> int:
    cfg = parse_config(args.config)
    unknown = set(cfg) - {"n1", "n2", "p", "i", "trials", "seed", "strategy",
                          "eps", "cap", "out", "workers"}
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    for key in ("n1", "n2", "p", "out"):
        if key not in cfg:
            raise ValidationError(f"config is missing {key!r}")
    n1s = _int_list(cfg["n1"])
    n2s = _int_list(cfg["n2"])
    p_tokens = [tok.strip() for tok in cfg["p"].split(",") if tok.strip()]
    i_vals = _int_list(cfg.get("i", "1"))
    trials = int(cfg.get("trials", "1"))
    base_seed = int(cfg.get("seed", "0"))
    strategy = cfg.get("strategy", "greedy")
    eps = float(cfg.get("eps", "0.15"))
    cap = int(cfg["cap"]) if "cap" in cfg else None
    out = args.out or cfg["out"]
    workers = int(cfg.get("workers", "1"))
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if not (n1s and n2s and p_tokens and i_vals):
        raise ValidationError("empty experiment grid")

    cells = []
    for n1 in n1s:
        for n2 in n2s:
            for tok in p_tokens:
                p = parse_p(tok, n1)
                for i in i_vals:
                    for t in range(trials):
                        cells.append((n1, n2, p, i, base_seed + t,
                                      strategy, eps, cap))

    done = _existing_keys(out)
    todo = [c for c in cells
            if (str(c[0]), str(c[1]), f"{c[2]:.10g}", str(c[3]), str(c[4])) not in done]
    print(f"cells={len(cells)} todo={len(todo)}", file=sys.stderr)

    try:
        with open(out) as fh:
            header_needed = not fh.readline()
    except FileNotFoundError:
        header_needed = True
    with open(out, "a") as fh:
        if header_needed:
            fh.write(SCHEMA_LINE + "\n")
            fh.write(",".join(EXPERIMENT_COLUMNS) + "\n")
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for row in pool.map(_experiment_cell, todo):
                    fh.write(",".join(row) + "\n")
        else:
            for cell in todo:
                fh.write(",".join(_experiment_cell(cell)) + "\n")
    print(f"wrote {len(todo)} rows to {out}", file=sys.stderr)
    return 0


def _add_model_flags(sub, with_i=True):
    sub.add_argument("--n1", type=int, default=None)
    sub.add_argument("--n2", type=int, default=None)
    sub.add_argument("--p", type=str, default=None,
                     help="edge probability, literal or nexp:E for n1**E")
    sub.add_argument("--seed", type=int, default=0)
    if with_i:
        sub.add_argument("--i", type=int, default=1,
                         help="trail half-length parameter (faces have length 2i+2)")
    sub.add_argument("--in", dest="infile", default=None,
                     help="read a graph/digraph file instead of generating")
    sub.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bigenus",
        description="Genus bounds and embeddings of random bipartite graphs",
    )
    subs = ap.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("generate", help="write a random or standard bipartite graph")
    _add_model_flags(sub, with_i=False)
    sub.add_argument("--standard", action="store_true",
                     help="deterministic expected-class-size graph instead of random")
    sub.set_defaults(func=cmd_generate)

    sub = subs.add_parser("orient", help="orient each edge by a seeded fair coin")
    _add_model_flags(sub, with_i=False)
    sub.set_defaults(func=cmd_orient)

    sub = subs.add_parser("trails", help="enumerate closed trails of length 2i+2")
    _add_model_flags(sub)
    sub.add_argument("--cap", type=int, default=None)
    sub.set_defaults(func=cmd_trails)

    sub = subs.add_parser("match", help="arc-disjoint trail matching")
    _add_model_flags(sub)
    sub.add_argument("--cap", type=int, default=None)
    sub.add_argument("--strategy", choices=("greedy", "nibble"), default="greedy")
    sub.set_defaults(func=cmd_match)

    sub = subs.add_parser("estimate", help="full pipeline: genus bounds and prediction")
    _add_model_flags(sub)
    sub.add_argument("--cap", type=int, default=None)
    sub.add_argument("--strategy", choices=("greedy", "nibble"), default="greedy")
    sub.add_argument("--eps", type=float, default=0.15)
    sub.set_defaults(func=cmd_estimate)

    sub = subs.add_parser("oracle", help="exact or heuristic genus of a small graph")
    sub.add_argument("--in", dest="infile", default=None)
    sub.add_argument("--complete", type=int, default=None, metavar="N")
    sub.add_argument("--complete-bipartite", type=int, nargs=2, default=None,
                     metavar=("M", "N"))
    sub.add_argument("--method", choices=("exact", "heuristic", "pincer"),
                     default="exact")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--max-systems", type=int, default=10_000_000)
    sub.add_argument("--restarts", type=int, default=64)
    sub.add_argument("--witness", default=None,
                     help="write a minimum-genus rotation system here")
    sub.set_defaults(func=cmd_oracle)

    sub = subs.add_parser("predict", help="regime tag and predicted genus")
    sub.add_argument("--n1", type=int, default=None)
    sub.add_argument("--n2", type=int, default=None)
    sub.add_argument("--p", type=str, default=None)
    sub.add_argument("--i", type=int, default=1)
    sub.set_defaults(func=cmd_predict)

    sub = subs.add_parser("experiment", help="grid sweep to CSV, resumable")
    sub.add_argument("--config", required=True, help="key=value file")
    sub.add_argument("--out", default=None, help="override config out=")
    sub.set_defaults(func=cmd_experiment)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GuardError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
