"""Report bundles: aligned text tables and lossless TSV / JSON-lines exports."""

import hashlib
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal

from . import __version__
from .errors import SegbiasError
from .metrics import ACCURACY_COLUMNS

UNDEFINED_TEXT = "—"
FORMATS = ("tsv", "jsonl")

# column kinds: str, int, float, num (int or float); a trailing "?" allows null
SCHEMAS = {
    "vocab": (("system", "str"), ("method", "str"), ("size", "int")),
    "accuracy": (("system", "str"), ("metric", "str"))
    + tuple((c, "num?") for c in ACCURACY_COLUMNS),
    "diversity": (
        ("system", "str"), ("ttr_pct", "float"), ("mattr_pct", "float"),
        ("window_size", "int"), ("token_count", "int"), ("type_count", "int"),
    ),
    "increment": (
        ("system", "str"), ("averaging", "str"), ("mean_increment_pct", "float"), ("n_pairs", "int"),
    ),
    "isolation": (
        ("system", "str"), ("isolated", "int"), ("total_pairs", "int"),
        ("isolation_rate_pct", "float?"), ("skipped_multiword", "int"),
    ),
    "asymmetry": (
        ("system", "str"), ("pct_feminine_rarer", "float"), ("pct_feminine_longer", "float"),
        ("n_pairs", "int"), ("n_exceptions", "int"),
    ),
}
SECTION_ORDER = tuple(SCHEMAS)


def _check_value(kind, value):
    nullable = kind.endswith("?")
    kind = kind.rstrip("?")
    if value is None:
        return nullable
    if kind == "str":
        return isinstance(value, str) and "\t" not in value and "\n" not in value
    if isinstance(value, bool):
        return False
    if kind == "int":
        return isinstance(value, int)
    if kind == "float":
        return isinstance(value, float)
    return isinstance(value, (int, float))


@dataclass(frozen=True)
class Section:
    name: str
    rows: tuple

    def __post_init__(self):
        if self.name not in SCHEMAS:
            raise SegbiasError(f"unknown report section {self.name!r}")
        schema = SCHEMAS[self.name]
        rows = tuple(tuple(r) for r in self.rows)
        for r in rows:
            if len(r) != len(schema):
                raise SegbiasError(f"section {self.name}: row {r!r} has {len(r)} cells, expected {len(schema)}")
            for (col, kind), v in zip(schema, r):
                if not _check_value(kind, v):
                    raise SegbiasError(f"section {self.name}: column {col} cannot hold {v!r}")
        object.__setattr__(self, "rows", rows)

    @property
    def columns(self):
        return tuple(c for c, _ in SCHEMAS[self.name])


@dataclass(frozen=True)
class ReportBundle:
    sections: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        ordered = {n: self.sections[n] for n in SECTION_ORDER if n in self.sections}
        if len(ordered) != len(self.sections):
            unknown = set(self.sections) - set(ordered)
            raise SegbiasError(f"unknown report sections: {sorted(unknown)}")
        object.__setattr__(self, "sections", ordered)
        meta = {str(k): str(v) for k, v in sorted(self.metadata.items())}
        for k, v in meta.items():
            if any(ch in k + v for ch in "\t\n\r"):
                raise SegbiasError(f"metadata {k!r} contains a tab or line break")
        object.__setattr__(self, "metadata", meta)

    def merged(self, other):
        sections = dict(self.sections)
        for name, sec in other.sections.items():
            if name in sections:
                sections[name] = Section(name, sections[name].rows + sec.rows)
            else:
                sections[name] = sec
        meta = dict(self.metadata)
        meta.update(other.metadata)
        return ReportBundle(sections, meta)


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def base_metadata(config=None, inputs=None):
    """Tool version, resolved configuration and SHA-256 of every input file."""
    meta = {"tool": "segbias", "version": __version__}
    for key, value in (config or {}).items():
        meta[f"config.{key}"] = "" if value is None else str(value)
    for role, path in (inputs or {}).items():
        if path is not None:
            meta[f"input.{role}"] = f"sha256:{file_digest(path)}"
    return meta


# -- section builders ---------------------------------------------------------

def vocab_section(reports):
    """``reports``: iterable of (system, VocabReport)."""
    return Section("vocab", [(system, r.method, r.size) for system, r in reports])


def accuracy_section(reports):
    rows = []
    for system, rep in reports:
        cats = [rep[c] for c in ACCURACY_COLUMNS]
        rows.append((system, "accuracy_pct", *[c.accuracy_pct for c in cats]))
        rows.append((system, "coverage_pct", *[c.coverage_pct for c in cats]))
        rows.append((system, "correct", *[c.correct for c in cats]))
        rows.append((system, "wrong", *[c.wrong for c in cats]))
        rows.append((system, "not_found", *[c.not_found for c in cats]))
    return Section("accuracy", rows)


def diversity_section(reports):
    return Section("diversity", [
        (system, r.ttr_pct, r.mattr_pct, r.window_size, r.token_count, r.type_count)
        for system, r in reports
    ])


def increment_section(reports):
    return Section("increment", [
        (system, r.averaging, r.mean_increment_pct, r.n_pairs) for system, r in reports
    ])


def isolation_section(reports):
    return Section("isolation", [
        (system, r.isolated_count, r.total_pairs, r.isolation_rate_pct, r.skipped_multiword)
        for system, r in reports
    ])


def asymmetry_section(reports):
    return Section("asymmetry", [
        (system, r.pct_feminine_rarer, r.pct_feminine_longer, r.n_pairs, len(r.exceptions))
        for system, r in reports
    ])


# -- text ---------------------------------------------------------------------

def format_number(value):
    if value is None:
        return UNDEFINED_TEXT
    if isinstance(value, float):
        return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN))
    return str(value)


def render_text(bundle):
    if not bundle.sections:
        raise SegbiasError("cannot render an empty report bundle")
    blocks = []
    for name, sec in bundle.sections.items():
        schema = SCHEMAS[name]
        cells = [list(sec.columns)]
        for row in sec.rows:
            cells.append([v if kind == "str" else format_number(v) for (_, kind), v in zip(schema, row)])
        widths = [max(len(r[i]) for r in cells) for i in range(len(schema))]
        lines = [f"== {name} =="]
        for r in cells:
            parts = []
            for (_, kind), w, v in zip(schema, widths, r):
                parts.append(v.ljust(w) if kind == "str" else v.rjust(w))
            lines.append("  ".join(parts).rstrip())
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


# -- machine exports ----------------------------------------------------------

def _tsv_cell(value):
    if value is None:
        return "null"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(kind, raw):
    if raw == "null" and kind.endswith("?"):
        return None
    kind = kind.rstrip("?")
    if kind == "str":
        return raw
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return float(raw) if any(ch in raw for ch in ".eEn") else int(raw)


def dumps_tsv(bundle):
    lines = [f"#META\t{k}\t{v}" for k, v in bundle.metadata.items()]
    for name, sec in bundle.sections.items():
        lines.append(f"#SECTION {name}")
        lines.append("\t".join(sec.columns))
        lines.extend("\t".join(_tsv_cell(v) for v in row) for row in sec.rows)
    return "\n".join(lines) + "\n"


def dumps_jsonl(bundle):
    objs = [{"section": "meta", "metadata": bundle.metadata}]
    for name, sec in bundle.sections.items():
        objs.append({"section": name, "columns": list(sec.columns), "rows": [list(r) for r in sec.rows]})
    return "".join(json.dumps(o, ensure_ascii=False, sort_keys=True) + "\n" for o in objs)


def export_machine(bundle, path, fmt="tsv"):
    if fmt not in FORMATS:
        raise SegbiasError(f"unknown export format {fmt!r}; choose from {', '.join(FORMATS)}")
    text = dumps_tsv(bundle) if fmt == "tsv" else dumps_jsonl(bundle)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _lines(text):
    # split on LF only: labels may legitimately hold other Unicode separators
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def loads_tsv(text):
    metadata = {}
    sections = {}
    name, rows, header = None, [], None

    def flush():
        if name is not None:
            sections[name] = Section(name, rows)

    for lineno, line in enumerate(_lines(text), 1):
        if line.startswith("#META\t"):
            parts = line.split("\t")
            if len(parts) != 3:
                raise SegbiasError(f"line {lineno}: malformed #META line")
            metadata[parts[1]] = parts[2]
        elif line.startswith("#SECTION "):
            flush()
            name, rows, header = line[len("#SECTION "):].strip(), [], None
            if name not in SCHEMAS:
                raise SegbiasError(f"line {lineno}: unknown section {name!r}")
        elif name is None:
            raise SegbiasError(f"line {lineno}: data before any #SECTION line")
        elif header is None:
            header = tuple(line.split("\t"))
            if header != tuple(c for c, _ in SCHEMAS[name]):
                raise SegbiasError(f"line {lineno}: header of section {name} does not match its schema")
        else:
            raw = line.split("\t")
            schema = SCHEMAS[name]
            if len(raw) != len(schema):
                raise SegbiasError(f"line {lineno}: expected {len(schema)} cells, got {len(raw)}")
            try:
                rows.append(tuple(_parse_cell(k, v) for (_, k), v in zip(schema, raw)))
            except ValueError:
                raise SegbiasError(f"line {lineno}: bad numeric cell") from None
    flush()
    return ReportBundle(sections, metadata)


def loads_jsonl(text):
    metadata = {}
    sections = {}
    for lineno, line in enumerate(_lines(text), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SegbiasError(f"line {lineno}: {exc}") from None
        name = obj.get("section")
        if name == "meta":
            metadata.update(obj.get("metadata", {}))
            continue
        if name not in SCHEMAS:
            raise SegbiasError(f"line {lineno}: unknown section {name!r}")
        if tuple(obj.get("columns", ())) != tuple(c for c, _ in SCHEMAS[name]):
            raise SegbiasError(f"line {lineno}: columns of section {name} do not match its schema")
        sections[name] = Section(name, [tuple(r) for r in obj.get("rows", [])])
    return ReportBundle(sections, metadata)


def load_export(path):
    """Parse a TSV or JSON-lines export, detected from its first byte."""
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return loads_jsonl(text) if text.lstrip().startswith("{") else loads_tsv(text)
