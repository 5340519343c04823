"""Lower and upper envelopes of nonvertical planar segments.

Segments are pairs of 2D rational points.  ``envelope`` merges recursively;
``naive_envelope`` evaluates every elementary slab and serves as its oracle.
"""
from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple


class VerticalSegment(ValueError):
    pass


class Piece(NamedTuple):
    x0: Fraction
    x1: Fraction
    seg: int


class Breakpoint(NamedTuple):
    point: tuple
    kind: str  # "endpoint" | "crossing"


def _start(piece):
    return piece.x0


class Envelope(NamedTuple):
    side: str
    segments: tuple
    pieces: tuple
    breakpoints: tuple

    def piece_at(self, x, after=True):
        """Piece covering (x, x+eps) when ``after`` else (x-eps, x)."""
        k = bisect_right(self.pieces, x, key=_start) - 1
        if not after and k >= 0 and self.pieces[k].x0 == x:
            k -= 1
        if k < 0:
            return None
        p = self.pieces[k]
        return p if ((p.x0 <= x < p.x1) if after else (p.x0 < x <= p.x1)) else None

    def value_at(self, x):
        """Extremal y over all segments at x (closed segments), or None.

        Every segment defined at x is defined just left or just right of it,
        where it cannot beat the envelope piece; by continuity the two
        pieces meeting at x decide the value.
        """
        best = None
        for after in (True, False):
            p = self.piece_at(x, after)
            if p is not None:
                y = seg_y(self.segments[p.seg], x)
                if best is None or (y < best if self.side == "lower" else y > best):
                    best = y
        return best

    @property
    def crossing_count(self):
        return sum(1 for b in self.breakpoints if b.kind == "crossing")


def normalize(seg):
    a, b = ((Fraction(p[0]), Fraction(p[1])) for p in seg)
    if a[0] == b[0]:
        raise VerticalSegment(f"vertical segment {seg}")
    return (a, b) if a[0] < b[0] else (b, a)


def seg_y(seg, x):
    (x0, y0), (x1, y1) = seg
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0)


def _better(side, a, b):
    return a < b if side == "lower" else a > b


def _compact(pieces):
    out = []
    for p in pieces:
        if p.x0 == p.x1:
            continue
        if out and out[-1].seg == p.seg and out[-1].x1 == p.x0:
            out[-1] = Piece(out[-1].x0, p.x1, p.seg)
        else:
            out.append(p)
    return out


def _merge(side, segs, e1, e2):
    xs = sorted({p.x0 for p in e1} | {p.x1 for p in e1} | {p.x0 for p in e2} | {p.x1 for p in e2})
    out = []
    i = j = 0
    for a, b in zip(xs, xs[1:]):
        while i < len(e1) and e1[i].x1 <= a:
            i += 1
        while j < len(e2) and e2[j].x1 <= a:
            j += 1
        s = e1[i].seg if i < len(e1) and e1[i].x0 <= a else None
        t = e2[j].seg if j < len(e2) and e2[j].x0 <= a else None
        if s is None and t is None:
            continue
        if s is None or t is None:
            out.append(Piece(a, b, s if t is None else t))
            continue
        da = seg_y(segs[s], a) - seg_y(segs[t], a)
        db = seg_y(segs[s], b) - seg_y(segs[t], b)
        if side == "upper":
            da, db = -da, -db
        if da == 0 and db == 0:
            out.append(Piece(a, b, min(s, t)))
        elif da <= 0 and db <= 0:
            out.append(Piece(a, b, s))
        elif da >= 0 and db >= 0:
            out.append(Piece(a, b, t))
        else:
            xm = a + (b - a) * da / (da - db)
            first, second = (s, t) if da < 0 else (t, s)
            out.append(Piece(a, xm, first))
            out.append(Piece(xm, b, second))
    return _compact(out)


def _breakpoints(segs, pieces):
    out = []
    for p, q in zip(pieces, pieces[1:]):
        sp, sq = segs[p.seg], segs[q.seg]
        if p.x1 == q.x0:
            x = p.x1
            yp, yq = seg_y(sp, x), seg_y(sq, x)
            inner = sp[0][0] < x < sp[1][0] and sq[0][0] < x < sq[1][0]
            kind = "crossing" if inner and yp == yq else "endpoint"
            out.append(Breakpoint((x, yq), kind))
        else:
            out.append(Breakpoint((q.x0, seg_y(sq, q.x0)), "endpoint"))
    return tuple(out)


def _build(side, segs, pieces):
    pieces = tuple(_compact(pieces))
    return Envelope(side, tuple(segs), pieces, _breakpoints(segs, pieces))


def envelope(segments, side="lower") -> Envelope:
    """Exact envelope by divide and conquer; piece ``seg`` indexes ``segments``."""
    if side not in ("lower", "upper"):
        raise ValueError(side)
    segs = [normalize(s) for s in segments]

    def rec(lo, hi):
        if hi - lo == 1:
            return [Piece(segs[lo][0][0], segs[lo][1][0], lo)]
        mid = (lo + hi) // 2
        return _merge(side, segs, rec(lo, mid), rec(mid, hi))

    return _build(side, segs, rec(0, len(segs)) if segs else [])


def line_crossing_x(s, t):
    """x where the supporting lines of s and t meet, if inside both x-ranges."""
    (a0, ay0), (a1, ay1) = s
    (b0, by0), (b1, by1) = t
    ma = (ay1 - ay0) / (a1 - a0)
    mb = (by1 - by0) / (b1 - b0)
    if ma == mb:
        return None
    x = (by0 - mb * b0 - ay0 + ma * a0) / (ma - mb)
    if max(a0, b0) <= x <= min(a1, b1):
        return x
    return None


def naive_envelope(segments, side="lower") -> Envelope:
    """Oracle: evaluate the extremal segment at every elementary slab midpoint."""
    if side not in ("lower", "upper"):
        raise ValueError(side)
    segs = [normalize(s) for s in segments]
    xs = {x for s in segs for x in (s[0][0], s[1][0])}
    for s, t in combinations(segs, 2):
        x = line_crossing_x(s, t)
        if x is not None:
            xs.add(x)
    xs = sorted(xs)
    pieces = []
    for a, b in zip(xs, xs[1:]):
        mid = (a + b) / 2
        best = None
        for i, s in enumerate(segs):
            if s[0][0] <= a and b <= s[1][0]:
                y = seg_y(s, mid)
                if best is None or _better(side, y, best[0]):
                    best = (y, i)
        if best is not None:
            pieces.append(Piece(a, b, best[1]))
    return _build(side, segs, pieces)


# ---------------------------------------------------------------- cross-family visibility

class Crossing(NamedTuple):
    point: tuple
    i: int   # index into the first family
    j: int   # index into the second family


def segment_crossing(s, t):
    """Intersection point of two nonvertical segments (None if disjoint or overlapping)."""
    x = line_crossing_x(s, t)
    if x is None:
        return None
    return (x, seg_y(s, x))


def is_transversal(s, t, p):
    return s[0][0] < p[0] < s[1][0] and t[0][0] < p[0] < t[1][0]


def _on_env(env, p):
    v = env.value_at(p[0])
    return v is not None and v == p[1]


def _through(segs, p):
    return [i for i, s in enumerate(segs) if s[0][0] <= p[0] <= s[1][0] and seg_y(s, p[0]) == p[1]]


def cross_envelope_visible(s1, side1, s2, side2, transversal_only=True) -> list:
    """Crossings between the two families lying on both chosen envelopes.

    Walks the merged breakpoints of the two envelopes: inside each elementary
    x-range only the two current envelope segments can meet.
    """
    f1 = [normalize(s) for s in s1]
    f2 = [normalize(s) for s in s2]
    if not f1 or not f2:
        return []
    return visible_between(envelope(f1, side1), envelope(f2, side2), transversal_only)


def visible_between(e1, e2, transversal_only=True) -> list:
    """``cross_envelope_visible`` on two prebuilt envelopes."""
    f1, f2 = e1.segments, e2.segments
    if not f1 or not f2:
        return []
    xs = sorted({x for e in (e1, e2) for p in e.pieces for x in (p.x0, p.x1)})
    points = set()
    for a, b in zip(xs, xs[1:]):
        p1 = e1.piece_at(a)
        p2 = e2.piece_at(a)
        if p1 is None or p2 is None or p1.x1 < b or p2.x1 < b:
            continue
        x = line_crossing_x(f1[p1.seg], f2[p2.seg])
        if x is not None and a <= x <= b:
            points.add((x, seg_y(f1[p1.seg], x)))
    # both envelopes may switch pieces at the same x; pair the pieces on either side
    for a in xs:
        left = [p for p in (e1.piece_at(a, False), e1.piece_at(a)) if p is not None]
        right = [p for p in (e2.piece_at(a, False), e2.piece_at(a)) if p is not None]
        for p1 in left:
            for p2 in right:
                y = seg_y(f1[p1.seg], a)
                if y == seg_y(f2[p2.seg], a):
                    points.add((a, y))
    if not transversal_only:
        # touches at segment endpoints may sit where neither envelope piece is defined
        for seg_list, env, other_env in ((f1, e1, e2), (f2, e2, e1)):
            for s in seg_list:
                for q in s:
                    if _on_env(env, q) and _on_env(other_env, q):
                        points.add(q)
    out = set()
    for p in points:
        if not (_on_env(e1, p) and _on_env(e2, p)):
            continue
        for i in _through(f1, p):
            for j in _through(f2, p):
                if transversal_only and not is_transversal(f1[i], f2[j], p):
                    continue
                if segment_crossing(f1[i], f2[j]) is None:
                    continue  # collinear overlap
                out.add(Crossing(p, i, j))
    return sorted(out)


def naive_cross_visible(s1, side1, s2, side2, transversal_only=True) -> list:
    """Oracle: every pairwise crossing, kept if no segment of either family
    passes strictly beyond it on the chosen side (checked against all segments)."""
    f1 = [normalize(s) for s in s1]
    f2 = [normalize(s) for s in s2]
    out = []
    for i, s in enumerate(f1):
        for j, t in enumerate(f2):
            p = segment_crossing(s, t)
            if p is None:
                continue
            if transversal_only and not is_transversal(s, t, p):
                continue
            if _extremal_at(f1, side1, p) and _extremal_at(f2, side2, p):
                out.append(Crossing(p, i, j))
    return sorted(out)


def _extremal_at(segs, side, p):
    for s in segs:
        if s[0][0] <= p[0] <= s[1][0] and _better(side, seg_y(s, p[0]), p[1]):
            return False
    return True


def family_crossings(segments) -> list:
    """Pairs (i, j) of segments sharing a point other than a common endpoint touch."""
    segs = [normalize(s) for s in segments]
    out = []
    for (i, s), (j, t) in combinations(enumerate(segs), 2):
        p = segment_crossing(s, t)
        if p is None:
            continue
        if p in s and p in t:
            continue  # endpoints touching
        out.append((i, j))
    return out


def ackermann_capped(i: int, j: int, cap: int) -> int:
    """A(i, j) under A(1,j)=2^j, A(i,1)=A(i-1,2), A(i,j)=A(i-1,A(i,j-1)); cap+1 once above cap."""
    if i == 1:
        if j > cap.bit_length():
            return cap + 1
        return min(2 ** j, cap + 1)
    val = ackermann_capped(i - 1, 2, cap)
    for _ in range(2, j + 1):
        if val > cap:
            return cap + 1
        val = ackermann_capped(i - 1, val, cap)
    return min(val, cap + 1)


def inverse_ackermann(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    i = 1
    while ackermann_capped(i, i, n) < n:
        i += 1
    return i
