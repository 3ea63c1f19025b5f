"""Command-line front end: ``planelab verify|unital|render|desargues|motions|facts|export``."""

import argparse
import csv
import io
import json
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import classification_facts as facts
from . import collineations, polarities, verification
from ._version import __version__
from .errors import PlanelabError, UnsupportedError
from .io_utils import write_atomic
from .plane_engine import Affine, AtInfinity, Infinity, NonVertical, Slope, Vertical, plane_from_id

SVG_SIZE = 600
LINE_SAMPLES = 256


# --- rendering ---------------------------------------------------------------


@dataclass
class RenderSpec:
    plane: str
    window: tuple = (-3.0, 3.0, -3.0, 3.0)
    slopes: int = 9
    intercepts: int = 9
    verticals: int = 5
    overlay: str = None
    out: str = "plane.svg"

    def __post_init__(self):
        x0, x1, y0, y1 = self.window
        if not (x0 < x1 and y0 < y1):
            raise PlanelabError("window must be nonempty")
        if min(self.slopes, self.intercepts) < 1 or self.verticals < 0:
            raise PlanelabError("grid counts must be at least 1")


def _pieces(xs, ys, window):
    """Split a sampled curve where it leaves the window."""
    x0, x1, y0, y1 = window
    pad = 0.05 * (y1 - y0)
    inside = np.isfinite(ys) & (ys >= y0 - pad) & (ys <= y1 + pad)
    out, cur = [], []
    for x, y, ok in zip(xs, ys, inside):
        if ok:
            cur.append((x, y))
        elif cur:
            out.append(cur)
            cur = []
    if cur:
        out.append(cur)
    return [p for p in out if len(p) > 1]


def _unital_points(pol, window, grid=LINE_SAMPLES):
    """Affine absolute points in the window: sign changes of the predicate
    on a grid, refined by linear interpolation along y."""
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, grid)
    ys = np.linspace(y0, y1, 2 * grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    P = pol.predicate(X.reshape(-1, 1), Y.reshape(-1, 1)).reshape(X.shape)
    hits = np.flatnonzero((np.sign(P[:, :-1]) != np.sign(P[:, 1:])).ravel())
    i, j = np.unravel_index(hits, (grid, 2 * grid - 1))
    pa, pb = P[i, j], P[i, j + 1]
    frac = pa / (pa - pb)
    return list(zip(xs[i], ys[j] + frac * (ys[j + 1] - ys[j])))


def render_svg(spec):
    plane = plane_from_id(spec.plane)
    if plane.carrier_dim != 1:
        raise UnsupportedError(f"rendering needs a 2-dimensional plane; {plane.id} has carrier dimension {plane.carrier_dim}")
    x0, x1, y0, y1 = spec.window
    sx = SVG_SIZE / (x1 - x0)
    sy = SVG_SIZE / (y1 - y0)
    to_svg = lambda x, y: (f"{(x - x0) * sx:.3f}", f"{(y1 - y) * sy:.3f}")
    xs = np.linspace(x0, x1, LINE_SAMPLES)
    body = []
    for s in np.linspace(-2.0, 2.0, spec.slopes):
        for t in np.linspace(y0, y1, spec.intercepts):
            ys = plane.tau(np.full((LINE_SAMPLES, 1), s), xs[:, None], np.full((LINE_SAMPLES, 1), t))[:, 0]
            for piece in _pieces(xs, ys, spec.window):
                pts = " ".join(",".join(to_svg(x, y)) for x, y in piece)
                body.append(f'<polyline class="line" points="{pts}"/>')
    for c in np.linspace(x0, x1, spec.verticals + 2)[1:-1]:
        (a, b), (_, d) = to_svg(c, y1), to_svg(c, y0)
        body.append(f'<line class="vertical" x1="{a}" y1="{b}" x2="{a}" y2="{d}"/>')
    if spec.overlay:
        pol = polarities.get_polarity(plane, spec.overlay)
        for x, y in _unital_points(pol, spec.window):
            a, b = to_svg(x, y)
            body.append(f'<circle class="unital" cx="{a}" cy="{b}" r="1.5"/>')
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">\n'
        f"<title>{plane.id} window {list(spec.window)}</title>\n"
        "<style>.line{fill:none;stroke:#3b5b92;stroke-width:0.8}.vertical{stroke:#9aa5b1;stroke-width:0.6}"
        ".unital{fill:#c0392b}</style>\n"
        f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>\n'
    )
    return write_atomic(spec.out, head + "\n".join(body) + "\n</svg>\n")


# --- sample export -----------------------------------------------------------


def _coords(e):
    if isinstance(e, Affine):
        return "affine", list(map(float, e.x)) + list(map(float, e.y))
    if isinstance(e, Slope):
        return "slope", list(map(float, e.s))
    if isinstance(e, NonVertical):
        return "line", list(map(float, e.s)) + list(map(float, e.t))
    if isinstance(e, Vertical):
        return "vertical", list(map(float, e.c))
    return ("infinity" if e is Infinity else "line-at-infinity"), []


def export_samples(target, path, plane, samples, seed, fmt="json", polarity=None):
    """Write unital points or incident (point, line) pairs to ``path``."""
    plane = plane_from_id(plane)
    if target == "unital":
        pol = polarities.get_polarity(plane, polarity)
        x, y, _ = pol.sample_unital(np.random.default_rng(seed), samples) if samples else (np.zeros((0, 1)), np.zeros((0, 1)), 0)
        return polarities.export_unital(path, pol, np.concatenate([x, y], axis=-1), seed, fmt)
    if target != "incidences":
        raise PlanelabError(f"unknown export target {target!r}")
    flags = plane.sample_flags(np.random.default_rng(seed), samples) if samples else []
    recs = []
    for p, L in flags:
        (pk, pc), (lk, lc) = _coords(p), _coords(L)
        recs.append({"point_kind": pk, "point": pc, "line_kind": lk, "line": lc})
    if fmt == "json":
        text = json.dumps({"plane": plane.id, "seed": seed, "version": __version__, "incidences": recs}, indent=1) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["point_kind", "point", "line_kind", "line"])
        for r in recs:
            w.writerow([r["point_kind"], " ".join(map(repr, r["point"])), r["line_kind"], " ".join(map(repr, r["line"]))])
        text = buf.getvalue()
    else:
        raise PlanelabError(f"unknown export format {fmt!r}")
    return write_atomic(path, text)


# --- subcommands -------------------------------------------------------------


def _emit(args, payload, text):
    out = json.dumps(payload, indent=2, default=float) + "\n" if args.format == "json" else text + "\n"
    if args.out:
        write_atomic(args.out, out)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(out)


def _verify_jobs(plane, args):
    n = args.samples or 1000
    suites = args.suite.split(",") if args.suite else ["axioms", "algebra", "polarities"]
    jobs = []
    if "axioms" in suites:
        jobs.append(("axioms", lambda: verification.check_plane_axioms(plane, n, args.seed, args.tol)))
    cs = getattr(plane, "cs", None)
    if "algebra" in suites and cs is not None:
        cls = args.algebra_class or "cartesian"
        jobs.append((f"algebra:{cls}", lambda: verification.check_algebra_axioms(cs, cls, n, args.seed, args.tol)))
    if "polarities" in suites:
        for name in polarities.polarity_names(plane):
            pol = polarities.get_polarity(plane, name)
            jobs.append((f"polarity:{name}", lambda pol=pol: verification.check_polarity(pol, n, args.seed, args.tol or 1e-8)))
    return jobs


def cmd_verify(args):
    plane = plane_from_id(args.plane)
    jobs = _verify_jobs(plane, args)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        reports = list(pool.map(lambda job: (job[0], job[1]()), jobs))
    lines = []
    for name, rep in reports:
        status = "PASS" if rep.ok else "FAIL"
        lines.append(f"{status} {name}: {rep.passed}/{rep.attempted} passed, {rep.skipped} skipped, max residual {rep.max_residual:.3g}")
        for w in rep.witnesses[:2]:
            lines.append(f"  witness {json.dumps(w, default=float)}")
    _emit(args, {name: rep.to_dict() for name, rep in reports}, "\n".join(lines))
    return 0 if all(rep.ok for _, rep in reports) else 1


def cmd_unital(args):
    pol = polarities.get_polarity(args.plane, args.polarity)
    n = 1000 if args.samples is None else args.samples
    probe = polarities.unital_probe(pol, n, args.seed) if n else None
    if args.out:
        samples = probe.samples if probe is not None else np.zeros((0, 2 * pol.plane.carrier_dim))
        polarities.export_unital(args.out, pol, samples, args.seed, args.format or "json")
        print(f"wrote {len(samples)} points to {args.out}")
    if probe is not None:
        print(f"{pol.plane.id} {pol.name}: local dimension {probe.local_dimension} (probes {probe.probe_dimensions}), {probe.skipped} draws skipped")
    return 0


def _window(text):
    vals = tuple(float(v) for v in text.split(","))
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("window needs xmin,xmax,ymin,ymax")
    return vals


def cmd_render(args):
    spec = RenderSpec(args.plane, args.window or (-3.0, 3.0, -3.0, 3.0), overlay=args.polarity, out=args.out or "plane.svg")
    print(f"wrote {render_svg(spec)}")
    return 0


def cmd_desargues(args):
    region = verification.Region.window(*args.window) if args.window else None
    res = verification.configuration_test(args.plane, args.configuration, region, args.trials, args.seed)
    text = (
        f"{res.plane} {res.kind}: {res.trials} trials, {res.skipped} degenerate draws redrawn, "
        f"max discrepancy {res.max_discrepancy:.3g}, {res.failures} failing configurations"
    )
    _emit(args, res.to_dict(), text)
    return 0


def cmd_motions(args):
    pol = polarities.get_polarity(args.plane, args.polarity)
    rng = np.random.default_rng(args.seed)
    draws = args.samples or 200
    agree = members = 0
    witness = None
    for k in range(draws):
        coll = collineations.draw_motion(pol, rng, member=k % 2 == 0)
        res = collineations.motion_test(pol, coll, 50, args.seed + k)
        members += res.condition_membership
        if res.condition_membership == res.commutes:
            agree += 1
        elif witness is None:
            witness = {"draw": k, "params": {key: repr(v) for key, v in coll.params.items()}, **vars(res)}
    payload = {"plane": pol.plane.id, "polarity": pol.name, "draws": draws, "members": members, "disagreements": draws - agree, "witness": witness}
    text = f"{pol.plane.id} {pol.name}: {draws} draws, {members} members, {draws - agree} disagreements"
    try:
        params, rank, dim = collineations.dimension_audit(pol, args.seed)
        payload["audit"] = {"parameters": params, "constraint_rank": rank, "dimension": dim}
        text += f"\nparameter audit: {params} parameters, constraint rank {rank}, dimension {dim}"
    except UnsupportedError as exc:
        text += f"\nparameter audit: {exc}"
    _emit(args, payload, text)
    return 0 if agree == draws else 1


def cmd_facts(args):
    table = facts.query(args.fix, args.group)
    if args.format == "json":
        _emit(args, [r.to_dict() for r in table], "")
        return 0
    text = facts.format_rows(table)
    notes = sorted({f for r in table for f in r.footnotes})
    if notes:
        fn = facts.footnotes()
        text += "\n" + "\n".join(f"({k}) {fn[k][0]}  [{fn[k][1]}]" for k in notes)
    _emit(args, None, text)
    return 0


def cmd_export(args):
    path = export_samples(args.target, args.out, args.plane, 1000 if args.samples is None else args.samples, args.seed, args.format or "json", args.polarity)
    print(f"wrote {path}")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("text", "json", "csv"), default=None)

    p = argparse.ArgumentParser(prog="planelab", description="Compact projective planes by explicit formulas.")
    p.add_argument("--version", action="version", version=f"planelab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="plane, algebra and polarity suites")
    v.add_argument("--plane", required=True)
    v.add_argument("--suite", help="comma list of axioms,algebra,polarities")
    v.add_argument("--class", dest="algebra_class", choices=verification.CLASSES)
    v.add_argument("--jobs", type=int, default=4)
    v.set_defaults(func=cmd_verify)

    u = sub.add_parser("unital", parents=[common], help="sample and export a unital")
    u.add_argument("--plane", required=True)
    u.add_argument("--polarity", required=True)
    u.set_defaults(func=cmd_unital)

    r = sub.add_parser("render", parents=[common], help="SVG picture of a 2-dimensional plane")
    r.add_argument("--plane", required=True)
    r.add_argument("--window", type=_window)
    r.add_argument("--polarity", help="overlay the unital of this polarity")
    r.set_defaults(func=cmd_render)

    d = sub.add_parser("desargues", parents=[common], help="random closing-configuration trials")
    d.add_argument("--plane", required=True)
    d.add_argument("--trials", type=int, default=100)
    d.add_argument("--window", type=_window)
    d.add_argument("--configuration", choices=("desargues", "pappus"), default="desargues")
    d.set_defaults(func=cmd_desargues)

    m = sub.add_parser("motions", parents=[common], help="closed-form membership against commutation")
    m.add_argument("--plane", required=True)
    m.add_argument("--polarity", required=True)
    m.set_defaults(func=cmd_motions)

    f = sub.add_parser("facts", parents=[common], help="query the dimension-bound table")
    f.add_argument("--fix")
    f.add_argument("--group")
    f.set_defaults(func=cmd_facts)

    e = sub.add_parser("export", parents=[common], help="export unital points or plane incidences")
    e.add_argument("--plane", required=True)
    e.add_argument("--target", choices=("unital", "incidences"), default="incidences")
    e.add_argument("--polarity")
    e.set_defaults(func=cmd_export, out_required=True)
    return p


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    if args.command == "export" and not args.out:
        print("planelab export: --out is required", file=sys.stderr)
        return 2
    print(f"# planelab {shlex.join(argv)}  (seed {args.seed}, version {__version__})")
    try:
        return args.func(args)
    except PlanelabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
