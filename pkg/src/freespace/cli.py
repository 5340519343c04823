"""Command-line front end: generation, validation, counting and growth sweeps.

Exit codes: 0 success, 1 validation failure (bad scene, GP violation,
oracle mismatch), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

from .constructions import (
    GenConfig, GenerationFailed, fig1_scene, quadratic_scene, random_scene, random_segments,
)
from .contacts import (
    Unclassifiable, brute_force_triples, classify_triple, contact_model, parse_spec_label,
)
from .envelopes import envelope, naive_envelope
from .planes import explain, structured_triples
from .scene import (
    SceneError, check_general_position, dumps_scene, load_scene, make_robot, validate_scene,
)

CLASSES = ("VVV", "FACE", "PAR_EDGE", "LINE_PAIR", "FACE_PP", "EDGE_PP", "EEE_NONPAR")
CSV_SCHEMA_VERSION = 1
CSV_HEADER = ["n", "k", "seed", "robot", "method", "total"] + [c.lower() for c in CLASSES] + ["ms"]


class InsufficientData(ValueError):
    pass


class GrowthRow(NamedTuple):
    n: int
    k: int
    seed: int
    robot: str
    method: str
    total: int
    per_class: tuple
    ms: int

    def cells(self):
        return [self.n, self.k, self.seed, self.robot, self.method, self.total, *self.per_class, self.ms]


class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    points: int

    def __str__(self):
        return f"slope {self.slope:.3f} intercept {self.intercept:.3f} points {self.points}"


def fit_slope(rows) -> SlopeFit:
    """Least-squares slope of ln(count) against ln(n).

    ``rows`` holds (n, count) pairs or GrowthRow records; rows with a zero
    count are dropped.
    """
    pts = []
    for r in rows:
        n, c = (r.n, r.total) if isinstance(r, GrowthRow) else r
        if c > 0 and n > 0:
            pts.append((math.log(n), math.log(c)))
    if len({x for x, _ in pts}) < 2:
        raise InsufficientData("need counts at two or more distinct sizes")
    fit = statistics.linear_regression([x for x, _ in pts], [y for _, y in pts])
    slope = round(fit.slope, 9) + 0.0
    return SlopeFit(slope, round(fit.intercept, 9) + 0.0, len(pts))


def _count(robot, scene, method, threads):
    if method == "brute":
        return brute_force_triples(robot, scene, threads=threads)
    return structured_triples(robot, scene, threads=threads)


def growth_row(robot_tag, method, size, seed, threads=1, timing=True) -> GrowthRow:
    robot = make_robot(robot_tag)
    scene = random_scene(size, seed, GenConfig(plant_robot=robot_tag))
    t0 = time.perf_counter()
    found = _count(robot, scene, method, threads)
    ms = round((time.perf_counter() - t0) * 1000) if timing else 0
    hist = {c: 0 for c in CLASSES}
    for t in found:
        hist[t.tag] += 1
    n = sum(len(o.body.vertices) for o in scene.obstacles)
    return GrowthRow(n, len(scene.obstacles), seed, robot_tag, method, len(found),
                     tuple(hist[c] for c in CLASSES), ms)


def growth_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def growth_svg(rows, fit=None, width=480, height=360) -> str:
    """Static log-log scatter of total count against n."""
    pts = [(math.log(r.n), math.log(r.total)) for r in rows if r.total > 0 and r.n > 0]
    pad = 40
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{pad}" y="20" font-size="12">ln(count) vs ln(n)'
           + (f", {fit}" if fit else "") + "</text>"]
    if pts:
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        x0, x1 = min(xs), max(xs) if max(xs) > min(xs) else min(xs) + 1
        y0, y1 = min(ys), max(ys) if max(ys) > min(ys) else min(ys) + 1

        def px(x, y):
            return (pad + (x - x0) / (x1 - x0) * (width - 2 * pad),
                    height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad))

        out.append(f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>')
        out.append(f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>')
        for x, y in pts:
            cx, cy = px(x, y)
            out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="steelblue"/>')
        if fit:
            (ax, ay), (bx, by) = (px(x, fit.intercept + fit.slope * x) for x in (x0, x1))
            out.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}" stroke="firebrick"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- commands

def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(a):
    if a.kind == "random":
        scene = random_scene(a.m, a.seed)
    elif a.kind == "quadratic":
        scene = quadratic_scene(a.m)
    else:
        scene = fig1_scene(a.m)
    _emit(dumps_scene(scene) + "\n", a.out)
    return 0


def cmd_validate(a):
    problems = validate_scene(load_scene(a.scene))
    for i, j in problems:
        print(f"obstacles {i} and {j} intersect")
    print("ok" if not problems else f"{len(problems)} problem(s)")
    return 1 if problems else 0


def cmd_gp_check(a):
    robot, scene = make_robot(a.robot), load_scene(a.scene)
    found = check_general_position(robot, scene, "full" if a.full else "pairwise")
    for v in found:
        print(v.code, " ".join(str(x) for x in v.ids), v.detail)
    print("clean" if not found else f"{len(found)} violation(s)")
    return 1 if found else 0


def cmd_count(a):
    robot, scene = make_robot(a.robot), load_scene(a.scene)
    t0 = time.perf_counter()
    found = _count(robot, scene, a.method, a.threads)
    if a.dump:
        with open(a.dump, "w") as fh:
            for t in found:
                v = " ".join(str(x) for x in t.v)
                fh.write(" ".join(s.label for s in t.specs) + f" | {v} | {t.tag}\n")
    print(len(found))
    if not a.no_timing:
        print(f"elapsed_ms {round((time.perf_counter() - t0) * 1000)}", file=sys.stderr)
    return 0


def cmd_classify(a):
    robot, scene = make_robot(a.robot), load_scene(a.scene)
    found = _count(robot, scene, "structured", a.threads)
    hist = {c: 0 for c in CLASSES}
    for t in found:
        hist[t.tag] += 1
    for c in CLASSES:
        print(f"{c} {hist[c]}")
    print(f"total {len(found)}")
    # every adjacent spec triple must get a tag, free or not
    model = contact_model(robot, scene)
    bad = 0
    adj = model.adjacency
    for s in model.specs:
        for t in adj.get(s, ()):
            for u in adj.get(t, ()):
                if not (s.key < t.key < u.key and u in adj[s]):
                    continue
                try:
                    classify_triple(robot, (s, t, u))
                except Unclassifiable:
                    bad += 1
    print(f"unclassifiable {bad}")
    return 1 if bad else 0


def cmd_envelope_stats(a):
    ok = True
    for label, segs in (("crossing", random_segments(a.m, a.seed)),
                        ("noncrossing", random_segments(a.m, a.seed, noncrossing=True))):
        for side in ("lower", "upper"):
            fast, slow = envelope(segs, side), naive_envelope(segs, side)
            same = fast.pieces == slow.pieces and fast.breakpoints == slow.breakpoints
            ok &= same
            print(f"{label} {side} segments {len(segs)} breakpoints {len(fast.breakpoints)} "
                  f"crossings {fast.crossing_count} naive_breakpoints {len(slow.breakpoints)} "
                  f"match {'yes' if same else 'NO'}")
    return 0 if ok else 1


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_growth(a):
    jobs = [(size, seed) for size in a.sizes for seed in a.seeds]
    timing = not a.no_timing

    def run(job):
        return growth_row(a.robot, a.method, job[0], job[1], timing=timing)

    if a.threads > 1:
        with ThreadPoolExecutor(a.threads) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(j) for j in jobs]
    text = growth_csv(rows)
    _emit(text, a.csv)
    try:
        fit = fit_slope(rows)
        print(fit)
    except InsufficientData as e:
        fit = None
        print(f"slope unavailable: {e}")
    if a.svg:
        with open(a.svg, "w") as fh:
            fh.write(growth_svg(rows, fit))
    return 0


def cmd_explain(a):
    robot, scene = make_robot(a.robot), load_scene(a.scene)
    try:
        spec = parse_spec_label(a.plane)
    except ValueError:
        print(f"bad contact id {a.plane!r}; expected R<dim>.<idx>@O<id>.<dim>.<idx>", file=sys.stderr)
        return 2
    sys.stdout.write(explain(robot, scene, spec))
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--no-timing", action="store_true",
                        help="omit wall-clock output so runs are byte-identical")
    common.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    robots = ("square", "triangle", "cube", "hexagon")

    p = argparse.ArgumentParser(prog="freespace", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a generated scene as JSON")
    g.add_argument("kind", choices=("random", "quadratic", "fig1"))
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", parents=[common], help="check obstacles are convex and disjoint")
    v.add_argument("scene")
    v.set_defaults(func=cmd_validate)

    gp = sub.add_parser("gp-check", parents=[common], help="list general-position violations")
    gp.add_argument("scene")
    gp.add_argument("--robot", choices=robots, required=True)
    gp.add_argument("--full", action="store_true")
    gp.set_defaults(func=cmd_gp_check)

    c = sub.add_parser("count", parents=[common], help="count free triple contacts")
    c.add_argument("scene")
    c.add_argument("--robot", choices=robots, required=True)
    c.add_argument("--method", choices=("brute", "structured"), default="structured")
    c.add_argument("--dump")
    c.set_defaults(func=cmd_count)

    k = sub.add_parser("classify", parents=[common], help="class histogram of free triple contacts")
    k.add_argument("scene")
    k.add_argument("--robot", choices=robots, required=True)
    k.set_defaults(func=cmd_classify)

    e = sub.add_parser("envelope-stats", parents=[common], help="envelope breakpoints vs the naive oracle")
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.set_defaults(func=cmd_envelope_stats)

    w = sub.add_parser("growth", parents=[common], help="count sweep over random scenes, CSV out")
    w.add_argument("--robot", choices=robots, required=True)
    w.add_argument("--method", choices=("brute", "structured"), default="structured")
    w.add_argument("--sizes", type=_int_list, required=True)
    w.add_argument("--seeds", type=_int_list, required=True)
    w.add_argument("--csv")
    w.add_argument("--svg")
    w.set_defaults(func=cmd_growth)

    x = sub.add_parser("explain", parents=[common], help="dump the parametric plane of one contact")
    x.add_argument("scene")
    x.add_argument("--robot", choices=robots, required=True)
    x.add_argument("--plane", required=True, help="contact id such as R0.1@O3.2.0")
    x.set_defaults(func=cmd_explain)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except (SceneError, OSError, GenerationFailed, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
