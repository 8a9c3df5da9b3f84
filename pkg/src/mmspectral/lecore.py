"""Young diagrams and Le-tableaux.

A tableau is a weakly decreasing stack of rows, each box holding either 0 or a
strictly positive weight.  The south-east boundary of the diagram is labeled
1..n from north-east to south-west; vertical steps are pivot columns, horizontal
steps are non-pivot (sink) columns.
"""

from dataclasses import dataclass
from fractions import Fraction


class TableauError(ValueError):
    """Malformed tableau text or shape violation."""


@dataclass(frozen=True)
class YoungDiagram:
    """Shape (row_lengths) inside the k x (n-k) bounding box."""

    row_lengths: tuple
    n: int

    def __post_init__(self):
        lam = self.row_lengths
        if not lam:
            raise TableauError("diagram has no rows")
        if any(l <= 0 for l in lam):
            raise TableauError("empty rows are not allowed")
        if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
            raise TableauError("row lengths must be weakly decreasing")
        k = len(lam)
        if k > self.n or lam[0] > self.n - k:
            raise TableauError(
                "shape %r does not fit the %d x %d boundary box" % (lam, k, self.n - k)
            )

    @property
    def k(self):
        return len(self.row_lengths)

    @property
    def num_boxes(self):
        return sum(self.row_lengths)

    def column_height(self, j):
        """Number of rows whose length is >= j (1-based column)."""
        return sum(1 for l in self.row_lengths if l >= j)

    def boundary_steps(self):
        """Boundary walk NE -> SW as a list of labeled steps.

        Each step is (label, kind, pos): kind 'v' for a vertical step alongside
        row ``pos`` (1-based), kind 'h' for a horizontal step at the bottom of
        column ``pos``.  Labels run 1..n.
        """
        lam = self.row_lengths
        k = self.k
        steps = []
        label = 0
        prev = self.n - k
        for row in range(1, k + 1):
            for col in range(prev, lam[row - 1], -1):
                label += 1
                steps.append((label, "h", col))
            label += 1
            steps.append((label, "v", row))
            prev = lam[row - 1]
        for col in range(prev, 0, -1):
            label += 1
            steps.append((label, "h", col))
        assert label == self.n
        return steps

    def pivots(self):
        return PivotSet(
            tuple(lab for lab, kind, _ in self.boundary_steps() if kind == "v"), self.n
        )

    def sink_label(self, j):
        """Boundary label of the horizontal step at the bottom of column j."""
        for lab, kind, pos in self.boundary_steps():
            if kind == "h" and pos == j:
                return lab
        raise KeyError(j)

    def source_label(self, i):
        """Boundary label of the vertical step alongside row i."""
        for lab, kind, pos in self.boundary_steps():
            if kind == "v" and pos == i:
                return lab
        raise KeyError(i)


@dataclass(frozen=True)
class PivotSet:
    pivots: tuple
    n: int

    def __post_init__(self):
        p = self.pivots
        if not p:
            raise TableauError("pivot set is empty")
        if any(j < 1 or j > self.n for j in p):
            raise TableauError("pivot out of range 1..%d: %r" % (self.n, p))
        if any(p[i] >= p[i + 1] for i in range(len(p) - 1)):
            raise TableauError("pivots must be strictly increasing: %r" % (p,))

    @property
    def k(self):
        return len(self.pivots)

    @property
    def sinks(self):
        ps = set(self.pivots)
        return tuple(j for j in range(1, self.n + 1) if j not in ps)


@dataclass(frozen=True)
class LeTableau:
    """Diagram plus per-box entries; 0 marks an empty box, weights are > 0."""

    diagram: YoungDiagram
    entries: tuple  # tuple of row tuples of Fraction

    def entry(self, i, j):
        """Entry of box (i, j), 1-based row/column."""
        return self.entries[i - 1][j - 1]

    def boxes(self):
        for i, row in enumerate(self.entries, start=1):
            for j, w in enumerate(row, start=1):
                yield i, j, w

    def nonzero_boxes(self):
        return [(i, j, w) for i, j, w in self.boxes() if w != 0]

    @property
    def dimension(self):
        """Dimension of the positroid cell = number of nonzero boxes."""
        return len(self.nonzero_boxes())

    def to_json_dict(self):
        d = self.diagram
        return {
            "rows": list(d.row_lengths),
            "n": d.n,
            "k": d.k,
            "pivots": list(d.pivots().pivots),
            "entries": [[str(w) for w in row] for row in self.entries],
        }


def tableau_from_rows(rows, n=None):
    """Build a LeTableau from an iterable of per-row weight lists.

    If ``n`` is omitted it is taken minimal: n = k + lambda_1.
    """
    entries = tuple(tuple(Fraction(w) for w in row) for row in rows)
    if any(w < 0 for row in entries for w in row):
        raise TableauError("negative weight")
    lam = tuple(len(row) for row in entries)
    if n is None:
        n = len(lam) + (lam[0] if lam else 0)
    diagram = YoungDiagram(lam, n)
    return LeTableau(diagram, entries)


def parse_tableau(text):
    """Parse whitespace-separated rows of "0" / positive decimal weights."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        row = []
        for colno, tok in enumerate(line.split(), start=1):
            try:
                w = _parse_weight(tok)
            except (ValueError, ZeroDivisionError):
                raise TableauError(
                    "line %d, token %d: cannot parse %r" % (lineno, colno, tok)
                )
            if w < 0:
                raise TableauError("line %d, token %d: negative weight" % (lineno, colno))
            row.append(w)
        if not row:
            continue
        if rows and len(row) > len(rows[-1]):
            raise TableauError("line %d: row lengths increase" % lineno)
        rows.append(row)
    if not rows:
        raise TableauError("no rows")
    return tableau_from_rows(rows)


def _parse_weight(tok):
    # exact decimal-to-rational parse; "1.25" -> 5/4
    if "/" in tok:
        return Fraction(tok)
    if "." in tok or "e" in tok or "E" in tok:
        return Fraction(tok)
    return Fraction(int(tok))


def serialize_tableau(t):
    lines = []
    for row in t.entries:
        lines.append(" ".join(_format_weight(w) for w in row))
    return "\n".join(lines) + "\n"


def _format_weight(w):
    if w.denominator == 1:
        return str(w.numerator)
    return "%s/%s" % (w.numerator, w.denominator)


def validate_le_rule(t):
    """Return the list of Le-rule violations, empty iff the tableau is valid.

    A zero box violates the rule when some box to its left in the row and some
    box above it in the column are both nonzero; each violation is reported as
    (zero_box, left_witness, above_witness).
    """
    violations = []
    for i, j, w in t.boxes():
        if w != 0:
            continue
        left = next(
            ((i, jj) for jj in range(j - 1, 0, -1) if t.entry(i, jj) != 0), None
        )
        if left is None:
            continue
        above = next(
            (
                (ii, j)
                for ii in range(i - 1, 0, -1)
                if t.diagram.row_lengths[ii - 1] >= j and t.entry(ii, j) != 0
            ),
            None,
        )
        if above is not None:
            violations.append(((i, j), left, above))
    return violations


def is_schubert_positive(t):
    """True iff no box is zero (weights themselves may be any positive reals)."""
    return all(w != 0 for _, _, w in t.boxes())


def diagram_from_pivots(pivots, n):
    """Shape with lambda_l = number of non-pivot columns right of the l-th pivot."""
    ps = PivotSet(tuple(pivots), n)
    nonpivots = ps.sinks
    lam = tuple(sum(1 for j in nonpivots if j > p) for p in ps.pivots)
    return YoungDiagram(lam, n)
