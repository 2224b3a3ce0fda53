"""Scenario files, task dispatch and deterministic reports.

A scenario file is line oriented. The first non-blank line is the version
header ``courantred-scenario 1``; header keys (``name``, ``seed``,
``samples``, ``max-degree``) follow, then bracketed blocks::

    [chart]        standard N | algebroid N R | x/e/p name lists
    [metric]       hyperbolic | row c1 c2 ...       (custom charts only)
    [theta]        standard | twisted + chi lines | algebroid + anchor/structure lines | explicit EXPR
    [coiso]        ideal EXPR lines, or N/K/F/flat lines
    [hamiltonian]  g/h declarations with psi/mu lines, or a full dgla
    [dirac]        l EXPR lines, two-form + omega lines, bivector + pi lines
    [gcs]          J EXPR, symplectic + omega lines, complex + entry lines
    [tasks]        one task per line, optionally followed by expect=fail

Indices in matrix and tensor lines are 1-based. ``#`` starts a comment.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__, hamiltonian as ham, linalg
from .coiso import (
    CoisotropicIdeal,
    GeometricCoisoData,
    clean_intersection,
    ideal_from_data,
    is_coisotropic,
    reduce,
    reduce_dirac,
    reduce_quadratic,
    reducible_geometric,
    reducible_symbolic,
)
from .courant import (
    CourantScenario,
    gc_from_complex,
    gc_from_symplectic,
    gcs_report,
    graph_of_bivector,
    graph_of_two_form,
    hyperbolic_metric,
    master_residual,
    standard_chart,
    standard_theta,
    theta_from_lie_algebroid,
    twisted_theta,
    verify_axioms,
)
from .errors import DataError, InternalError, ReductionError
from .graded_algebra import Chart, DegreeError, GradedPoly, degree, x_monomials
from .parsing import ExpressionError, parse_expr, parse_rational
from .poisson import BracketData

__all__ = [
    "FORMAT_HEADER",
    "REPORT_HEADER",
    "TASKS",
    "ScenarioError",
    "ScenarioFile",
    "TaskResult",
    "Report",
    "parse",
    "parse_text",
    "run",
    "run_tasks",
]

FORMAT_HEADER = "courantred-scenario 1"
REPORT_HEADER = "courantred-report 1"

TASKS = (
    "master-equation",
    "axioms",
    "left-central",
    "gcs",
    "coisotropic",
    "reducible",
    "reduce",
    "dgla",
    "comoment",
    "chain",
    "regular-zero",
    "zero-level",
    "extended-action",
    "ham-reduce",
)


class ScenarioError(DataError):
    """Syntax or semantic error in a scenario file, with its position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 block: str | None = None):
        self.line, self.column, self.block = line, column, block
        where = []
        if block:
            where.append(f"[{block}]")
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{' '.join(where)}: {message}" if where else message)


@dataclass
class _Line:
    no: int
    text: str
    offset: int  # column of text[0] in the source line, 1-based

    @property
    def words(self) -> list:
        return self.text.split()

    def rest(self, n_words: int) -> tuple:
        """Text after the first ``n_words`` words and its column."""
        pos = 0
        t = self.text
        for _ in range(n_words):
            while pos < len(t) and t[pos].isspace():
                pos += 1
            while pos < len(t) and not t[pos].isspace():
                pos += 1
        while pos < len(t) and t[pos].isspace():
            pos += 1
        return t[pos:], self.offset + pos


@dataclass
class ScenarioFile:
    name: str
    digest: str
    seed: int = 0
    samples: int = 5
    max_degree: int = 2
    scenario: CourantScenario | None = None
    ideal: CoisotropicIdeal | None = None
    coiso_data: GeometricCoisoData | None = None
    action: ham.HamAction | None = None
    algebra: ham.CourantAlgebraData | None = None
    dirac: list | None = None
    J: GradedPoly | None = None
    tasks: list = field(default_factory=list)  # (task, expect_pass)
    path: str = ""


# ---------------------------------------------------------------------------
# parsing


def parse(path) -> ScenarioFile:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise ScenarioError("file is not valid UTF-8") from None
    sf = parse_text(text, digest=hashlib.sha256(data).hexdigest())
    sf.path = str(path)
    return sf


def _split(text: str):
    header: list = []
    blocks: dict = {}
    order: list = []
    current = None
    seen_version = False
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.lstrip()
        if not stripped:
            continue
        col = len(body) - len(stripped) + 1
        if not seen_version:
            if stripped != FORMAT_HEADER:
                raise ScenarioError(f"expected version header {FORMAT_HEADER!r}", no, col)
            seen_version = True
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ScenarioError("unterminated block header", no, col + len(stripped))
            current = stripped[1:-1].strip()
            if current not in _BLOCKS:
                raise ScenarioError(f"unknown block [{current}]", no, col + 1)
            if current in blocks:
                raise ScenarioError(f"duplicate block [{current}]", no, col)
            blocks[current] = []
            order.append(current)
            continue
        line = _Line(no, stripped, col)
        if current is None:
            header.append(line)
        else:
            blocks[current].append(line)
    if not seen_version:
        raise ScenarioError(f"empty file; expected version header {FORMAT_HEADER!r}", 1, 1)
    return header, blocks


_BLOCKS = ("chart", "metric", "theta", "coiso", "hamiltonian", "dirac", "gcs", "tasks")


def _int(word: str, line: _Line, block: str, col: int | None = None, lo: int | None = None) -> int:
    try:
        v = int(word)
    except ValueError:
        raise ScenarioError(f"expected an integer, got {word!r}", line.no, col or line.offset, block) from None
    if lo is not None and v < lo:
        raise ScenarioError(f"expected an integer >= {lo}, got {v}", line.no, col or line.offset, block)
    return v


def _word_col(line: _Line, k: int) -> int:
    t = line.text
    pos = 0
    for i in range(k + 1):
        while pos < len(t) and t[pos].isspace():
            pos += 1
        if i == k:
            break
        while pos < len(t) and not t[pos].isspace():
            pos += 1
    return line.offset + pos


def _rat(word: str, line: _Line, block: str, k: int) -> Fraction:
    try:
        return parse_rational(word)
    except (ValueError, ZeroDivisionError, ExpressionError) as exc:
        raise ScenarioError(f"malformed rational {word!r} ({exc})", line.no, _word_col(line, k), block) from None


def _expr(line: _Line, n_words: int, chart: Chart, block: str, degree_: int | None = None) -> GradedPoly:
    text, col = line.rest(n_words)
    if not text:
        raise ScenarioError("missing expression", line.no, col, block)
    try:
        f = parse_expr(text, chart)
    except ExpressionError as exc:
        c = col + (exc.column - 1 if exc.column else 0)
        msg = str(exc).split(" (column")[0]
        raise ScenarioError(msg, line.no, c, block) from None
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(str(exc).strip("'\""), line.no, col, block) from None
    if degree_ is not None and not f.is_zero():
        try:
            d = degree(f)
        except DegreeError as exc:
            raise ScenarioError(str(exc), line.no, col, block) from None
        if d is None:
            raise ScenarioError("expression mixes degrees", line.no, col, block)
        if d != degree_:
            raise ScenarioError(f"expression must have degree {degree_}, found {d}", line.no, col, block)
    return f


def _idx(word: str, line: _Line, block: str, k: int, n: int) -> int:
    v = _int(word, line, block, _word_col(line, k))
    if not 1 <= v <= n:
        raise ScenarioError(f"index {v} out of range 1..{n}", line.no, _word_col(line, k), block)
    return v - 1


def _need_words(line: _Line, n: int, block: str, usage: str):
    if len(line.words) < n:
        raise ScenarioError(f"expected: {usage}", line.no, line.offset, block)


def _x_index(name: str, chart: Chart, line: _Line, block: str, k: int) -> int:
    if not chart.has(name) or chart.gen(name)[0] != "x":
        raise ScenarioError(f"unknown body coordinate {name!r}", line.no, _word_col(line, k), block)
    return chart.gen(name)[1]


def parse_text(text: str, digest: str | None = None) -> ScenarioFile:
    digest = digest or hashlib.sha256(text.encode("utf-8")).hexdigest()
    header, blocks = _split(text)
    sf = ScenarioFile(name="", digest=digest)
    for line in header:
        w = line.words
        key = w[0].rstrip(":")
        if len(w) < 2:
            raise ScenarioError(f"header key {key!r} needs a value", line.no, line.offset, "header")
        if key == "name":
            sf.name = line.rest(1)[0]
        elif key in ("seed", "samples", "max-degree"):
            v = _int(w[1], line, "header", _word_col(line, 1), lo=0)
            setattr(sf, key.replace("-", "_"), v)
        else:
            raise ScenarioError(f"unknown header key {key!r}", line.no, line.offset, "header")
    chart_kind, chart = _parse_chart(blocks)
    if chart is not None or "theta" in blocks:
        sf.scenario = _parse_theta(blocks, chart_kind, chart)
    needs = [b for b in ("coiso", "dirac", "gcs") if b in blocks]
    if needs and sf.scenario is None:
        raise ScenarioError(f"block [{needs[0]}] requires [chart] and [theta]")
    if "coiso" in blocks:
        _parse_coiso(blocks["coiso"], sf)
    if "hamiltonian" in blocks:
        _parse_ham(blocks["hamiltonian"], sf)
    if "dirac" in blocks:
        sf.dirac = _parse_dirac(blocks["dirac"], sf.scenario)
    if "gcs" in blocks:
        sf.J = _parse_gcs(blocks["gcs"], sf.scenario)
    for line in blocks.get("tasks", []):
        w = line.words
        if w[0] not in TASKS:
            raise ScenarioError(f"unknown task {w[0]!r}", line.no, line.offset, "tasks")
        expect = True
        for k, extra in enumerate(w[1:], start=1):
            if extra == "expect=fail":
                expect = False
            elif extra != "expect=pass":
                raise ScenarioError(f"unknown task option {extra!r}", line.no, _word_col(line, k), "tasks")
        sf.tasks.append((w[0], expect))
    return sf


def _parse_chart(blocks):
    if "chart" not in blocks:
        if "metric" in blocks:
            raise ScenarioError("[metric] without [chart]")
        return None, None
    lines = blocks["chart"]
    if not lines:
        raise ScenarioError("empty block", block="chart")
    first = lines[0]
    w = first.words
    if w[0] in ("standard", "algebroid"):
        if len(lines) > 1:
            raise ScenarioError("unexpected line", lines[1].no, lines[1].offset, "chart")
        if w[0] == "standard":
            _need_words(first, 2, "chart", "standard N")
            n = _int(w[1], first, "chart", _word_col(first, 1), lo=0)
            return "standard", standard_chart(n)
        _need_words(first, 3, "chart", "algebroid N R")
        n = _int(w[1], first, "chart", _word_col(first, 1), lo=0)
        r = _int(w[2], first, "chart", _word_col(first, 2), lo=0)
        return "algebroid", Chart(
            n, 2 * r, n,
            x_names=tuple(f"x{i + 1}" for i in range(n)),
            e_names=tuple(f"v{a + 1}" for a in range(r)) + tuple(f"xi{a + 1}" for a in range(r)),
            p_names=tuple(f"p{i + 1}" for i in range(n)),
        )
    names = {"x": (), "e": (), "p": ()}
    for line in lines:
        k = line.words[0]
        if k not in names:
            raise ScenarioError(f"unknown chart entry {k!r}", line.no, line.offset, "chart")
        names[k] = tuple(line.words[1:])
    try:
        chart = Chart(len(names["x"]), len(names["e"]), len(names["p"]), names["x"], names["e"], names["p"])
    except ValueError as exc:
        raise ScenarioError(str(exc), first.no, first.offset, "chart") from None
    return "custom", chart


def _parse_metric(blocks, chart: Chart) -> BracketData:
    lines = blocks.get("metric")
    if lines is None:
        raise ScenarioError("custom charts need a [metric] block", block="metric")
    if len(lines) == 1 and lines[0].words == ["hyperbolic"]:
        if chart.n_e % 2:
            raise ScenarioError("hyperbolic metric needs an even number of e-generators", lines[0].no,
                                lines[0].offset, "metric")
        g = hyperbolic_metric(chart.n_e // 2)
    else:
        g = []
        for line in lines:
            if line.words[0] != "row":
                raise ScenarioError(f"expected 'row', got {line.words[0]!r}", line.no, line.offset, "metric")
            g.append([_rat(wd, line, "metric", k) for k, wd in enumerate(line.words[1:], start=1)])
    try:
        return BracketData(chart, g)
    except ValueError as exc:
        ln = lines[0] if lines else None
        raise ScenarioError(str(exc), ln.no if ln else None, ln.offset if ln else None, "metric") from None


def _parse_theta(blocks, chart_kind, chart) -> CourantScenario:
    if chart is None:
        raise ScenarioError("[theta] requires a [chart] block", block="theta")
    if "theta" not in blocks or not blocks["theta"]:
        raise ScenarioError("missing [theta] block", block="theta")
    if chart_kind != "custom" and "metric" in blocks:
        raise ScenarioError("[metric] is only allowed for custom charts", block="metric")
    lines = blocks["theta"]
    first = lines[0]
    kind = first.words[0]
    rest = lines[1:]
    B = "theta"
    if kind == "standard":
        if chart_kind != "standard":
            raise ScenarioError("'standard' theta needs a standard chart", first.no, first.offset, B)
        if rest:
            raise ScenarioError("unexpected line", rest[0].no, rest[0].offset, B)
        return standard_theta(chart.n_x)
    if kind == "twisted":
        if chart_kind != "standard":
            raise ScenarioError("'twisted' theta needs a standard chart", first.no, first.offset, B)
        n = chart.n_x
        chi = {}
        for line in rest:
            if line.words[0] != "chi":
                raise ScenarioError(f"expected 'chi', got {line.words[0]!r}", line.no, line.offset, B)
            _need_words(line, 5, B, "chi i j k EXPR")
            ijk = tuple(_idx(line.words[k], line, B, k, n) for k in (1, 2, 3))
            if len(set(ijk)) < 3:
                raise ScenarioError("chi indices must be distinct", line.no, line.offset, B)
            chi[ijk] = _expr(line, 4, chart, B, 0)
        full = {}
        for (i, j, k), c in chi.items():
            for perm, sgn in (((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
                              ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1)):
                full[perm] = full.get(perm, GradedPoly.zero(chart)) + c * sgn
        try:
            return twisted_theta(n, full)
        except ValueError as exc:
            raise ScenarioError(str(exc), first.no, first.offset, B) from None
    if kind == "algebroid":
        if chart_kind != "algebroid":
            raise ScenarioError("'algebroid' theta needs an algebroid chart", first.no, first.offset, B)
        n, r = chart.n_x, chart.n_e // 2
        zero = GradedPoly.zero(chart)
        anchor = [[zero] * r for _ in range(n)]
        struct = [[[zero] * r for _ in range(r)] for _ in range(r)]
        for line in rest:
            w = line.words
            if w[0] == "anchor":
                _need_words(line, 4, B, "anchor i a EXPR")
                i = _idx(w[1], line, B, 1, n)
                a = _idx(w[2], line, B, 2, r)
                anchor[i][a] = _expr(line, 3, chart, B, 0)
            elif w[0] == "structure":
                _need_words(line, 5, B, "structure c a b EXPR")
                c = _idx(w[1], line, B, 1, r)
                a = _idx(w[2], line, B, 2, r)
                b = _idx(w[3], line, B, 3, r)
                if a == b:
                    raise ScenarioError("structure constants need a != b", line.no, line.offset, B)
                f = _expr(line, 4, chart, B, 0)
                struct[c][a][b] = f
                struct[c][b][a] = -f
            else:
                raise ScenarioError(f"unknown algebroid entry {w[0]!r}", line.no, line.offset, B)
        return theta_from_lie_algebroid(anchor, struct, n=n)
    if kind == "explicit":
        bracket = _parse_metric(blocks, chart) if chart_kind == "custom" else BracketData(
            chart, hyperbolic_metric(chart.n_e // 2))
        if rest:
            raise ScenarioError("unexpected line", rest[0].no, rest[0].offset, B)
        th = _expr(first, 1, chart, B, 3)
        return CourantScenario(bracket, th, kind="explicit")
    raise ScenarioError(f"unknown theta kind {kind!r}", first.no, first.offset, B)


def _parse_coiso(lines, sf: ScenarioFile):
    s = sf.scenario
    ch = s.chart
    B = "coiso"
    gens, N, K, F, flat = [], [], [], [], []
    geometric = False
    for line in lines:
        w = line.words
        if w[0] == "ideal":
            gens.append(_expr(line, 1, ch, B))
        elif w[0] in ("N", "F"):
            geometric = True
            idx = [_x_index(nm, ch, line, B, k) for k, nm in enumerate(w[1:], start=1)]
            (N if w[0] == "N" else F).extend(idx)
        elif w[0] in ("K", "flat"):
            geometric = True
            (K if w[0] == "K" else flat).append(_expr(line, 1, ch, B, 1))
        else:
            raise ScenarioError(f"unknown coiso entry {w[0]!r}", line.no, line.offset, B)
    if gens and geometric:
        raise ScenarioError("use either ideal generators or N/K/F/flat data, not both", lines[0].no,
                            lines[0].offset, B)
    try:
        if geometric:
            sf.coiso_data = GeometricCoisoData(s.bracket, N=tuple(N), K=tuple(K), F=tuple(F), flat=tuple(flat),
                                               seed=sf.seed)
            sf.ideal = ideal_from_data(sf.coiso_data)
        else:
            sf.ideal = CoisotropicIdeal.from_generators(s.bracket, gens)
    except DataError as exc:
        raise ScenarioError(str(exc), lines[0].no if lines else None, None, B) from None


def _lie(line: _Line, B: str) -> ham.LieAlgebra:
    w = line.words
    _need_words(line, 2, B, "g abelian N | so3 | heisenberg | aff1 | custom N")
    if w[1] == "abelian":
        _need_words(line, 3, B, "g abelian N")
        return ham.abelian(_int(w[2], line, B, _word_col(line, 2), lo=0))
    if w[1] in ("so3", "heisenberg", "aff1"):
        return {"so3": ham.so3, "heisenberg": ham.heisenberg, "aff1": ham.aff1}[w[1]]()
    if w[1] == "custom":
        _need_words(line, 3, B, "g custom N")
        return ham.LieAlgebra(_int(w[2], line, B, _word_col(line, 2), lo=0))
    raise ScenarioError(f"unknown Lie algebra {w[1]!r}", line.no, _word_col(line, 1), B)


def _parse_ham(lines, sf: ScenarioFile):
    B = "hamiltonian"
    s = sf.scenario
    ch = s.chart if s else None
    g = None
    g_line = None
    gbr = []
    h_kind, nh = None, 0
    h_line = None
    hrep = []
    psi, mu, phi, rho, mus = [], [], [], [], []
    na = None
    mats = {"tau": [], "lam": [], "varpi": [], "dha": [], "dag": []}
    for line in lines:
        w = line.words
        key = w[0]
        if key in ("psi", "mu", "phi", "rho", "mustar") and ch is None:
            raise ScenarioError(f"{key!r} needs [chart] and [theta]", line.no, line.offset, B)
        if key == "g":
            g, g_line = _lie(line, B), line
        elif key == "gbracket":
            _need_words(line, 5, B, "gbracket i j k VALUE")
            gbr.append(line)
        elif key == "h":
            _need_words(line, 2, B, "h trivial M | adjoint | custom M")
            h_line = line
            h_kind = w[1]
            if h_kind in ("trivial", "custom"):
                _need_words(line, 3, B, f"h {h_kind} M")
                nh = _int(w[2], line, B, _word_col(line, 2), lo=0)
            elif h_kind != "adjoint":
                raise ScenarioError(f"unknown module {h_kind!r}", line.no, _word_col(line, 1), B)
        elif key == "hrep":
            _need_words(line, 5, B, "hrep i k j VALUE")
            hrep.append(line)
        elif key == "psi":
            psi.append(_expr(line, 1, ch, B, 1))
        elif key == "mu":
            mu.append(_expr(line, 1, ch, B, 0))
        elif key == "phi":
            phi.append(_expr(line, 1, ch, B, 2))
        elif key == "rho":
            rho.append(_expr(line, 1, ch, B, 1))
        elif key == "mustar":
            mus.append(_expr(line, 1, ch, B, 0))
        elif key == "na":
            _need_words(line, 2, B, "na N")
            na = _int(w[1], line, B, _word_col(line, 1), lo=0)
        elif key in mats:
            mats[key].append(line)
        else:
            raise ScenarioError(f"unknown hamiltonian entry {key!r}", line.no, line.offset, B)
    if g is None:
        raise ScenarioError("missing 'g' declaration", block=B)
    ng = g.dim
    if gbr:
        c = [[[Fraction(0)] * ng for _ in range(ng)] for _ in range(ng)]
        for line in gbr:
            i, j, k = (_idx(line.words[t], line, B, t, ng) for t in (1, 2, 3))
            v = _rat(line.words[4], line, B, 4)
            c[k][i][j] = v
            c[k][j][i] = -v
        g = ham.LieAlgebra(ng, c)
    w = ham._jacobi_witness(g)
    if w is not None:
        raise ScenarioError(f"g violates Jacobi/antisymmetry at {w}", g_line.no, g_line.offset, B)
    if h_kind == "adjoint":
        nh = ng
        rep = ham.adjoint_rep(g)
    else:
        rep = ham.trivial_rep(g, nh)
    for line in hrep:
        if h_kind != "custom":
            raise ScenarioError("hrep lines need 'h custom M'", line.no, line.offset, B)
        i = _idx(line.words[1], line, B, 1, ng)
        k = _idx(line.words[2], line, B, 2, nh)
        j = _idx(line.words[3], line, B, 3, nh)
        rep[i][k][j] = _rat(line.words[4], line, B, 4)
    try:
        if phi or rho or mus or na is not None:
            _parse_full_action(sf, g, rep, nh, na, phi, rho, mus, mats, lines)
            return
        sf.algebra = ham.hemisemidirect(g, rep, nh)
        if psi or mu:
            if s is None:
                raise ScenarioError("reduction data need [chart] and [theta]", block=B)
            if len(mu) != nh:
                raise ScenarioError(f"expected {nh} mu lines (one per h-basis element), got {len(mu)}", block=B)
            sf.action = ham.from_reduction_data(s, g, psi, mu, h_rep=rep, label=sf.name)
    except ScenarioError:
        raise
    except DataError as exc:
        ln = h_line or g_line
        raise ScenarioError(str(exc), ln.no, None, B) from None


def _parse_full_action(sf, g, rep, nh, na, phi, rho, mus, mats, lines):
    B = "hamiltonian"
    ng = g.dim
    if na is None:
        raise ScenarioError("a full action needs 'na N'", block=B)
    tau = [linalg.zeros(na, na) for _ in range(ng)]
    varpi = [[[Fraction(0)] * na for _ in range(na)] for _ in range(nh)]
    dha = linalg.zeros(na, nh)
    dag = linalg.zeros(ng, na)
    shapes = {"tau": (ng, na, na), "lam": (ng, nh, nh), "varpi": (nh, na, na), "dha": (na, nh), "dag": (ng, na)}
    lam = [[list(r) for r in m] for m in rep]
    for key, ls in mats.items():
        for line in ls:
            shp = shapes[key]
            _need_words(line, len(shp) + 2, B, f"{key} " + " ".join("i" * len(shp)) + " VALUE")
            idx = [_idx(line.words[t + 1], line, B, t + 1, shp[t]) for t in range(len(shp))]
            v = _rat(line.words[len(shp) + 1], line, B, len(shp) + 1)
            if key == "tau":
                tau[idx[0]][idx[1]][idx[2]] = v
            elif key == "lam":
                lam[idx[0]][idx[1]][idx[2]] = v
            elif key == "varpi":
                varpi[idx[0]][idx[1]][idx[2]] = v
            elif key == "dha":
                dha[idx[0]][idx[1]] = v
            else:
                dag[idx[0]][idx[1]] = v
    d = ham.DGLA2Data(g, na, nh, tau, lam, varpi, dha, dag)
    sf.action = ham.HamAction(sf.scenario, d, tuple(phi), tuple(rho), tuple(mus), label=sf.name)
    if d.is_exact():
        sf.algebra = ham.dgla_to_courant_algebra(d)


def _form_entries(lines, key, chart, B, antisym=True):
    n = chart.n_x
    m = [[GradedPoly.zero(chart)] * n for _ in range(n)]
    for line in lines:
        if line.words[0] != key:
            raise ScenarioError(f"expected {key!r}, got {line.words[0]!r}", line.no, line.offset, B)
        _need_words(line, 4, B, f"{key} i j EXPR")
        i = _idx(line.words[1], line, B, 1, n)
        j = _idx(line.words[2], line, B, 2, n)
        f = _expr(line, 3, chart, B, 0)
        m[i][j] = f
        if antisym:
            if i == j:
                raise ScenarioError("skew entries need i != j", line.no, line.offset, B)
            m[j][i] = -f
    return m


def _standard_only(s, line, B):
    if s.kind not in ("standard", "twisted"):
        raise ScenarioError("this shorthand needs a standard chart", line.no, line.offset, B)


def _parse_dirac(lines, s) -> list:
    B = "dirac"
    ch = s.chart
    if not lines:
        raise ScenarioError("empty block", block=B)
    first = lines[0]
    if first.words[0] in ("two-form", "bivector"):
        _standard_only(s, first, B)
        key = "omega" if first.words[0] == "two-form" else "pi"
        m = _form_entries(lines[1:], key, ch, B)
        return graph_of_two_form(ch, m) if key == "omega" else graph_of_bivector(ch, m)
    out = []
    for line in lines:
        if line.words[0] != "l":
            raise ScenarioError(f"expected 'l', got {line.words[0]!r}", line.no, line.offset, B)
        out.append(_expr(line, 1, ch, B, 1))
    return out


def _parse_gcs(lines, s) -> GradedPoly:
    B = "gcs"
    ch = s.chart
    if not lines:
        raise ScenarioError("empty block", block=B)
    first = lines[0]
    w = first.words
    if w[0] == "J":
        if len(lines) > 1:
            raise ScenarioError("unexpected line", lines[1].no, lines[1].offset, B)
        return _expr(first, 1, ch, B, 2)
    if w[0] in ("symplectic", "complex"):
        _standard_only(s, first, B)
        key = "omega" if w[0] == "symplectic" else "entry"
        m = _form_entries(lines[1:], key, ch, B, antisym=(key == "omega"))
        try:
            vals = [[c.constant_term() if not c.is_zero() else Fraction(0) for c in row] for row in m]
            if any(any(sum(xs) for (xs, _, _), _ in c.items()) for row in m for c in row):
                raise ScenarioError("structure entries must be constants", first.no, first.offset, B)
            if key == "omega":
                return gc_from_symplectic(s.bracket, vals)
            return gc_from_complex(s.bracket, vals)
        except ValueError as exc:
            raise ScenarioError(str(exc), first.no, first.offset, B) from None
    raise ScenarioError(f"unknown gcs entry {w[0]!r}", first.no, first.offset, B)


# ---------------------------------------------------------------------------
# running tasks


@dataclass
class TaskResult:
    task: str
    passed: bool
    expected: bool = True
    lines: list = field(default_factory=list)
    error: str | None = None  # "input" | "internal" | None

    @property
    def as_expected(self) -> bool:
        return self.error is None and self.passed == self.expected


@dataclass
class Report:
    sf: ScenarioFile
    results: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if any(r.error == "internal" for r in self.results):
            return 3
        if any(r.error == "input" for r in self.results):
            return 2
        if any(not r.as_expected for r in self.results):
            return 1
        return 0

    def render(self) -> str:
        sf = self.sf
        out = [
            REPORT_HEADER,
            f"engine: courantred {__version__}",
            f"scenario: {sf.name}",
            f"input-sha256: {sf.digest}",
            f"seed: {sf.seed}",
            f"samples: {sf.samples}",
            f"max-degree: {sf.max_degree}",
        ]
        for r in self.results:
            out.append("")
            out.append(f"[task {r.task}]")
            status = "error" if r.error else ("pass" if r.passed else "fail")
            out.append(f"status: {status}")
            out.append(f"expected: {'pass' if r.expected else 'fail'}")
            out.extend(r.lines)
        good = sum(1 for r in self.results if r.as_expected)
        out.append("")
        out.append(f"summary: {good}/{len(self.results)} tasks as expected")
        out.append(f"exit: {self.exit_code}")
        return "\n".join(out) + "\n"


def _fmt_witness(w) -> str:
    if w is None:
        return "-"
    if isinstance(w, (tuple, list)):
        return "(" + ", ".join(str(x) for x in w) + ")"
    return str(w)


def _random_section(rng: random.Random, chart: Chart, max_degree: int) -> GradedPoly:
    monos = list(x_monomials(chart.n_x, max_degree))
    f = GradedPoly.zero(chart)
    for mu in range(chart.n_e):
        if rng.random() < 0.5:
            continue
        for m in rng.sample(monos, min(2, len(monos))):
            c = rng.randint(-2, 2)
            if c:
                term = GradedPoly.const(chart, c)
                for i, a in enumerate(m):
                    if a:
                        term = term * GradedPoly.generator(chart, ("x", i)) ** a
                f = f + term * GradedPoly.generator(chart, ("e", mu))
    if f.is_zero() and chart.n_e:
        f = GradedPoly.generator(chart, ("e", rng.randrange(chart.n_e)))
    return f


def _random_function(rng: random.Random, chart: Chart, max_degree: int) -> GradedPoly:
    monos = [m for m in x_monomials(chart.n_x, max_degree) if sum(m)]
    f = GradedPoly.zero(chart)
    for m in rng.sample(monos, min(2, len(monos))):
        term = GradedPoly.const(chart, rng.choice([-2, -1, 1, 2]))
        for i, a in enumerate(m):
            if a:
                term = term * GradedPoly.generator(chart, ("x", i)) ** a
        f = f + term
    return f


def _need(sf: ScenarioFile, what: str):
    val = {"scenario": sf.scenario, "ideal": sf.ideal, "data": sf.coiso_data, "action": sf.action,
           "algebra": sf.algebra, "J": sf.J}[what]
    if val is None:
        blk = {"scenario": "[chart]/[theta]", "ideal": "[coiso]", "data": "[coiso] N/K/F/flat",
               "action": "[hamiltonian] action", "algebra": "[hamiltonian]", "J": "[gcs]"}[what]
        raise ScenarioError(f"task needs {blk}")
    return val


def _dump_scenario(prefix: str, s: CourantScenario) -> list:
    ch = s.chart
    return [
        f"{prefix}.kind: {s.kind}",
        f"{prefix}.x: {' '.join(ch.x_names) or '-'}",
        f"{prefix}.e: {' '.join(ch.e_names) or '-'}",
        f"{prefix}.p: {' '.join(ch.p_names) or '-'}",
        *[f"{prefix}.metric: {' '.join(str(v) for v in row)}" for row in s.bracket.metric],
        f"{prefix}.theta: {s.theta}",
    ]


def _t_master(sf):
    s = _need(sf, "scenario")
    res = master_residual(s)
    return res.is_zero(), [f"residual: {res}"]


def _t_axioms(sf):
    s = _need(sf, "scenario")
    rng = random.Random(sf.seed)
    secs = [_random_section(rng, s.chart, sf.max_degree) for _ in range(sf.samples)]
    funs = [_random_function(rng, s.chart, sf.max_degree) for _ in range(max(1, sf.samples // 2))] \
        if s.chart.n_x else []
    rep = verify_axioms(s, secs, funs)
    lines = [f"sections: {len(secs)}", f"functions: {len(funs)}"]
    for k, (ok, w) in rep.results.items():
        lines.append(f"{k}: {'pass' if ok else 'fail'}" + ("" if ok else f" witness={_fmt_witness(w)}"))
    return rep.passed, lines


def _t_left_central(sf):
    s = _need(sf, "scenario")
    ok = ham.left_central_check(s)
    return ok, [f"left-central: {'pass' if ok else 'fail'}"]


def _t_gcs(sf):
    s = _need(sf, "scenario")
    J = _need(sf, "J")
    rep = gcs_report(s, J)
    lines = [f"J: {J}"]
    for key, val in (("almost-complex", rep.almost_complex), ("nijenhuis-vanishes", rep.nijenhuis),
                     ("theta-identity", rep.theta_identity)):
        ok, w = val if isinstance(val, tuple) else (val, None)
        lines.append(f"{key}: {'pass' if ok else 'fail'}" + ("" if ok else f" witness={_fmt_witness(w)}"))
    return rep.passed, lines


def _t_coisotropic(sf):
    I = _need(sf, "ideal")
    ok = is_coisotropic(I)
    return ok, [f"generator: {g}" for g in I.describe()] + [f"coisotropic: {ok}"]


def _t_reducible(sf):
    s = _need(sf, "scenario")
    I = _need(sf, "ideal")
    sym = reducible_symbolic(s, I)
    lines = [f"symbolic: {sym}"]
    ok = sym
    if sf.coiso_data is not None:
        v = reducible_geometric(s, sf.coiso_data)
        lines += [f"R{i + 1}: {x}" for i, x in enumerate(v.as_tuple())]
        lines.append(f"verdicts-agree: {v.all == sym}")
        if v.all != sym:
            raise InternalError("symbolic and geometric reducibility verdicts disagree")
    return ok, lines


def _t_reduce(sf):
    s = _need(sf, "scenario")
    I = _need(sf, "ideal")
    red = reduce(s, I)
    lines = _dump_scenario("reduced", red.scenario)
    if sf.J is not None:
        Jr, rep = reduce_quadratic(s, sf.J, sf.coiso_data, I, reduction=red)
        lines += [f"J.{k}: {v}" for k, v in rep.items()] + [f"J_red: {Jr}"]
    if sf.dirac is not None:
        d = _need(sf, "data")
        lines.append(f"clean-intersection: {clean_intersection(sf.dirac, d, I=I)}")
        Lr = reduce_dirac(sf.dirac, s, d, I, reduction=red)
        lines += [f"L_red: {f}" for f in Lr]
    return True, lines


def _t_dgla(sf):
    c = _need(sf, "algebra")
    rep = ham.validate_courant_algebra(c)
    lines = [f"courant-algebra {x}" for x in rep.lines()]
    ok = rep.passed
    if ok:
        d = ham.courant_algebra_to_dgla(c)
        r2 = ham.validate_dgla(d)
        lines += [f"dgla {x}" for x in r2.lines()]
        back = ham.dgla_to_courant_algebra(d)
        rt = back.bracket == c.bracket and back.p == c.p
        lines.append(f"round-trip: {rt}")
        ok = r2.passed and rt
    return ok, lines


def _check_lines(rep) -> list:
    return [x for x in rep.lines()]


def _t_comoment(sf):
    rep = ham.validate_comoment(_need(sf, "action"))
    return rep.passed, _check_lines(rep)


def _t_chain(sf):
    rep = ham.validate_chain(_need(sf, "action"))
    return rep.passed, _check_lines(rep)


def _t_regular(sf):
    rep = ham.regular_zero(_need(sf, "action"), samples=sf.samples, seed=sf.seed)
    return rep.passed, _check_lines(rep)


def _t_zero_level(sf):
    A = _need(sf, "action")
    d = ham.zero_level_data(A, seed=sf.seed)
    ch = A.chart
    lines = [f"N: {' '.join(ch.x_names[a] + '=0' for a in d.N) or 'M'}",
             *[f"K: {k}" for k in d.K],
             f"F: {' '.join('d/d' + ch.x_names[c] for c in d.F) or '0'}",
             *[f"flat: {f}" for f in d.flat]]
    return True, lines


def _t_extended(sf):
    A = _need(sf, "action")
    c = _need(sf, "algebra")
    rep = ham.extended_action_check(A.scenario, c, list(A.rho_a), list(A.mu_star), samples=sf.samples,
                                    seed=sf.seed)
    return rep.passed, _check_lines(rep)


def _t_ham_reduce(sf):
    A = _need(sf, "action")
    out = ham.ham_reduce(A, J=sf.J, L=sf.dirac, samples=sf.samples, seed=sf.seed)
    lines = [f"ideal: {g}" for g in out.ideal.describe()]
    lines += _dump_scenario("reduced", out.reduction.scenario)
    if out.J_red is not None:
        lines.append(f"J_red: {out.J_red}")
    if out.L_red is not None:
        lines += [f"L_red: {f}" for f in out.L_red]
    a, b = out.exactness
    lines += [f"exactness (a): {a}", f"exactness (b): {b}", f"reduced-exact: {out.reduced_exact}"]
    return True, lines


_DISPATCH = {
    "master-equation": _t_master,
    "axioms": _t_axioms,
    "left-central": _t_left_central,
    "gcs": _t_gcs,
    "coisotropic": _t_coisotropic,
    "reducible": _t_reducible,
    "reduce": _t_reduce,
    "dgla": _t_dgla,
    "comoment": _t_comoment,
    "chain": _t_chain,
    "regular-zero": _t_regular,
    "zero-level": _t_zero_level,
    "extended-action": _t_extended,
    "ham-reduce": _t_ham_reduce,
}


def run(sf: ScenarioFile, task: str, expected: bool = True) -> TaskResult:
    """Run one task; failures of hypotheses become verdicts, bad input and
    broken invariants are recorded as errors."""
    try:
        ok, lines = _DISPATCH[task](sf)
        return TaskResult(task, bool(ok), expected, lines)
    except ReductionError as exc:
        return TaskResult(task, False, expected, [f"reason: {exc}"])
    except InternalError as exc:
        return TaskResult(task, False, expected, [f"internal-error: {exc}"], error="internal")
    except (DataError, ValueError, KeyError) as exc:
        return TaskResult(task, False, expected, [f"input-error: {exc}"], error="input")


def run_tasks(sf: ScenarioFile, only: list | None = None) -> Report:
    rep = Report(sf)
    tasks = sf.tasks
    if only is not None:
        tasks = [(t, e) for t, e in tasks if t in only] or [(t, True) for t in only]
    for t, e in tasks:
        rep.results.append(run(sf, t, e))
    return rep
