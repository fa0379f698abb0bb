"""Command-line surface for the toolkit.

Subcommands cover generation (generate, nullmodel), measurement (params,
graphlets, spectrum), classification (svm-train, svm-predict), the two
dimension-fitting pipelines (fit), perturbation sweeps (sensitivity), and
aggregation of saved fits into the dimension-vs-log(n) regression (report).

Graphs travel as edge-list text files: one "u v" pair per line, '#' comments
allowed. Exit codes: 0 success, 2 bad input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from .errors import InputError, NumericError
from .estimators import estimate_parameters
from .graph import load_edge_list, save_edge_list
from .graphlets import (
    GRAPHLET_NAMES,
    count_graphlets_exact,
    count_graphlets_sampled,
    default_sample_prob,
    features,
)
from .mgeop import MgeopParams, sample
from .nullmodels import degree_preserving_rewire, er_matched, percolate
from .pipeline import (
    DEFAULT_SAMPLES_PER_DIM,
    fit_dimension_graphlets,
    fit_dimension_spectral,
    regression_report,
    run_sensitivity,
)
from .spectral import (
    DENSE_SOLVER_CAP,
    N_BINS,
    normalized_laplacian_eigenvalues,
    spectral_histogram,
)
from .svm import (
    make_training_set,
    model_from_json,
    model_to_json,
    predict_many,
    train,
)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _load_graph(path: str):
    try:
        return load_edge_list(path)
    except FileNotFoundError:
        raise InputError(f"graph file not found: {path}")


def _load_csv(path: str, what: str) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except FileNotFoundError:
        raise InputError(f"{what} file not found: {path}")
    except ValueError as exc:
        raise InputError(f"could not parse {what} CSV {path}: {exc}")
    if data.size == 0:
        raise InputError(f"{what} CSV {path} is empty")
    return data


def _parse_dims(spec: str) -> tuple:
    """'1-12', '2,3,4', or a mix like '1-4,6' -> sorted dimension tuple."""
    dims = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if "-" in token[1:]:
            lo, _, hi = token.partition("-")
            try:
                lo_i, hi_i = int(lo), int(hi)
            except ValueError:
                raise InputError(f"bad dimension range {token!r}")
            if hi_i < lo_i:
                raise InputError(f"bad dimension range {token!r}")
            dims.extend(range(lo_i, hi_i + 1))
        else:
            try:
                dims.append(int(token))
            except ValueError:
                raise InputError(f"bad dimension value {token!r}")
    if not dims:
        raise InputError(f"no dimensions in {spec!r}")
    return tuple(dims)


def _parse_levels(spec: str) -> list:
    try:
        return [float(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise InputError(f"bad level list {spec!r}")


def _write_edges(g, out: str | None) -> None:
    if out is None:
        _emit("\n".join(f"{u} {v}" for u, v in g.edges), None)
    else:
        save_edge_list(g, out)


def _json(obj) -> str:
    return json.dumps(obj, indent=2)


def _cmd_generate(args) -> None:
    params = MgeopParams(
        n=args.n, m=args.m, alpha=args.alpha, beta=args.beta, p=args.p
    )
    smp = sample(params, seed=args.seed, method=args.method)
    _write_edges(smp.graph, args.out)
    if args.positions is not None:
        rows = []
        for v in range(params.n):
            coords = "\t".join(repr(float(c)) for c in smp.positions[v])
            rows.append(f"{v}\t{int(smp.ranks[v])}\t{coords}")
        Path(args.positions).write_text("\n".join(rows) + "\n")


def _cmd_params(args) -> None:
    g = _load_graph(args.graph)
    est = estimate_parameters(g, seed=args.seed)
    _emit(
        _json(
            {
                "n": est.n,
                "edges": est.edges,
                "rho": est.rho,
                "eta": est.eta,
                "x_min": est.x_min,
                "eta_raw": est.eta_raw,
                "alpha": est.alpha,
                "beta": est.beta,
                "clamped": est.clamped,
                "eff_diameter": est.eff_diameter,
                "m_model": est.m_model,
                "lcc_n": est.lcc_n,
            }
        ),
        args.out,
    )


def _cmd_graphlets(args) -> None:
    g = _load_graph(args.graph)
    if args.exact:
        vec = count_graphlets_exact(g)
    else:
        q = args.prob if args.prob is not None else default_sample_prob(g.n)
        vec = count_graphlets_sampled(g, q, seed=args.seed)
    counts = [float(c) if vec.sampled else int(round(c)) for c in vec.counts]
    _emit(
        _json(
            {
                "names": list(GRAPHLET_NAMES),
                "counts": counts,
                "edge_count": vec.edge_count,
                "sampled": vec.sampled,
                "q": vec.sample_prob,
                "features": [float(x) for x in features(vec)],
            }
        ),
        args.out,
    )


def _cmd_spectrum(args) -> None:
    g = _load_graph(args.graph)
    hist = spectral_histogram(normalized_laplacian_eigenvalues(g, cap=args.cap))
    lines = ["bin_lo,bin_hi,count,probability"]
    for i in range(N_BINS):
        lo = 2.0 * i / N_BINS
        hi = 2.0 * (i + 1) / N_BINS
        lines.append(
            f"{lo:.10g},{hi:.10g},{int(hist.raw_counts[i])},{hist.bins[i]:.12g}"
        )
    _emit("\n".join(lines), args.out)


def _cmd_svm_train(args) -> None:
    data = _load_csv(args.features, "features")
    if data.shape[1] < 2:
        raise InputError("features CSV needs a label column plus features")
    labels = data[:, 0]
    model = train(
        make_training_set(data[:, 1:], labels),
        c=args.c,
        tol=args.tol,
        max_passes=args.max_passes,
    )
    _emit(model_to_json(model), args.out)


def _cmd_svm_predict(args) -> None:
    try:
        model_text = Path(args.model).read_text()
    except FileNotFoundError:
        raise InputError(f"model file not found: {args.model}")
    model = model_from_json(model_text)
    data = _load_csv(args.features, "features")
    preds = [int(p) for p in predict_many(model, data)]
    if args.format == "csv":
        _emit("\n".join(str(p) for p in preds), args.out)
    else:
        _emit(_json({"predictions": preds}), args.out)


def _cmd_fit(args) -> None:
    g = _load_graph(args.graph)
    dims = _parse_dims(args.dims)
    if args.method == "graphlets":
        fit = fit_dimension_graphlets(
            g,
            dims=dims,
            samples_per_dim=args.samples_per_dim,
            seed=args.seed,
            threads=args.threads,
            sample_prob=args.q,
            graph_id=args.graph,
        )
    else:
        fit = fit_dimension_spectral(
            g,
            dims=dims,
            seed=args.seed,
            threads=args.threads,
            cap=args.cap,
            graph_id=args.graph,
        )
    _emit(_json(fit.to_dict()), args.out)


def _cmd_nullmodel(args) -> None:
    g = _load_graph(args.graph)
    if args.type == "er":
        out = er_matched(g.n, g.edge_count, seed=args.seed)
    elif args.type == "rewire":
        out = degree_preserving_rewire(
            g, swaps_per_edge=args.swaps_per_edge, seed=args.seed
        )
    else:
        if args.fraction is None:
            raise InputError("percolate needs --fraction")
        out = percolate(g, args.fraction, seed=args.seed)
    _write_edges(out, args.out)


def _cmd_sensitivity(args) -> None:
    g = _load_graph(args.graph)
    res = run_sensitivity(
        g,
        args.study,
        levels=_parse_levels(args.levels),
        trials=args.trials,
        seed=args.seed,
        dims=_parse_dims(args.dims),
        samples_per_dim=args.samples_per_dim,
        threads=args.threads,
        sample_prob=args.q,
    )
    if args.format == "json":
        _emit(
            _json(
                {
                    "study": res.study,
                    "baseline_m": res.baseline_m,
                    "nullmodel": res.nullmodel_flag,
                    "rows": [list(r) for r in res.rows],
                }
            ),
            args.out,
        )
    else:
        header = [f"# baseline_m={res.baseline_m}"]
        if res.nullmodel_flag is not None:
            header.append(f"# nullmodel={res.nullmodel_flag}")
        _emit("\n".join(header) + "\n" + res.to_csv(), args.out)


def _cmd_report(args) -> None:
    root = Path(args.dir)
    if not root.is_dir():
        raise InputError(f"not a directory: {args.dir}")
    by_method: dict = {}
    for path in sorted(root.glob("*.json")):
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            continue
        if not isinstance(doc, dict) or "fitted_m" not in doc:
            continue
        p = doc.get("params_used", {})
        if "n" not in p or "m_model" not in p:
            continue
        shim = SimpleNamespace(
            fitted_m=int(doc["fitted_m"]),
            params_used=SimpleNamespace(
                n=int(p["n"]), m_model=float(p["m_model"])
            ),
        )
        by_method.setdefault(doc.get("method", "unknown"), []).append(shim)
    reports = {}
    for method, fits in sorted(by_method.items()):
        if len(fits) >= 3:
            reports[method] = regression_report(fits).to_dict()
    if not reports:
        raise InputError(
            f"no method in {args.dir} has the 3 or more fit JSONs a regression needs"
        )
    _emit(_json(reports), args.out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master RNG seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument(
        "--format", choices=("json", "csv"), default=None,
        help="output format where a command supports both",
    )

    ap = argparse.ArgumentParser(
        prog="netdim",
        description="Geometric graph generation and latent-dimension estimation.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="sample a generator graph")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--alpha", type=float, required=True)
    g.add_argument("--beta", type=float, required=True)
    g.add_argument("--p", type=float, default=1.0)
    g.add_argument("--method", choices=("auto", "grid", "naive"), default="auto")
    g.add_argument(
        "--positions", default=None,
        help="also dump per-node TSV rows: id rank x_1..x_m",
    )
    g.set_defaults(func=_cmd_generate)

    p = sub.add_parser("params", parents=[common], help="estimate model parameters")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=_cmd_params)

    gl = sub.add_parser("graphlets", parents=[common], help="count 3- and 4-node graphlets")
    gl.add_argument("--graph", required=True)
    mode = gl.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="full enumeration")
    mode.add_argument("--prob", type=float, default=None, help="sampling probability q")
    mode.add_argument(
        "--prob-auto", action="store_true",
        help="q = min(1, 10/n) (default when no mode flag is given)",
    )
    gl.set_defaults(func=_cmd_graphlets)

    sp = sub.add_parser("spectrum", parents=[common], help="normalized Laplacian histogram CSV")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--cap", type=int, default=DENSE_SOLVER_CAP, help="dense eigensolver cap")
    sp.set_defaults(func=_cmd_spectrum)

    st = sub.add_parser("svm-train", parents=[common], help="train the pairwise linear SVM")
    st.add_argument("--features", required=True, help="CSV rows: label,x1,...,xk")
    st.add_argument("--c", type=float, default=1.0)
    st.add_argument("--tol", type=float, default=1e-3)
    st.add_argument("--max-passes", type=int, default=200)
    st.set_defaults(func=_cmd_svm_train)

    sv = sub.add_parser("svm-predict", parents=[common], help="predict with a saved model")
    sv.add_argument("--model", required=True)
    sv.add_argument("--features", required=True, help="CSV rows: x1,...,xk")
    sv.set_defaults(func=_cmd_svm_predict)

    f = sub.add_parser("fit", parents=[common], help="fit a latent dimension to a graph")
    f.add_argument("--graph", required=True)
    f.add_argument("--method", choices=("graphlets", "spectral"), required=True)
    f.add_argument("--dims", default="1-12", help="e.g. 1-12 or 2,3,4")
    f.add_argument("--samples-per-dim", type=int, default=DEFAULT_SAMPLES_PER_DIM)
    f.add_argument("--q", type=float, default=None, help="graphlet sampling probability")
    f.add_argument("--cap", type=int, default=DENSE_SOLVER_CAP, help="spectral eigensolver cap")
    f.set_defaults(func=_cmd_fit)

    nm = sub.add_parser("nullmodel", parents=[common], help="reference-model graphs")
    nm.add_argument("--type", choices=("er", "rewire", "percolate"), required=True)
    nm.add_argument("--graph", required=True)
    nm.add_argument("--fraction", type=float, default=None)
    nm.add_argument("--swaps-per-edge", type=float, default=10.0)
    nm.set_defaults(func=_cmd_nullmodel)

    se = sub.add_parser("sensitivity", parents=[common], help="perturbation sweep CSV")
    se.add_argument("--graph", required=True)
    se.add_argument("--study", choices=("er", "rewire", "percolation"), required=True)
    se.add_argument("--levels", required=True, help="comma list, e.g. 0,0.05,0.1")
    se.add_argument("--trials", type=int, required=True)
    se.add_argument("--dims", default="1-12")
    se.add_argument("--samples-per-dim", type=int, default=DEFAULT_SAMPLES_PER_DIM)
    se.add_argument("--q", type=float, default=None)
    se.set_defaults(func=_cmd_sensitivity)

    r = sub.add_parser("report", parents=[common], help="aggregate fit JSONs into a regression")
    r.add_argument("--dir", required=True, help="directory of saved fit JSONs")
    r.set_defaults(func=_cmd_report)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command in ("spectrum", "sensitivity") else "json"
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
