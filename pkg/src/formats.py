"""
Versioned text records for matrices, words, certificates, modules,
epimorphisms, symbols and completions.

Every file starts with `# vaserstein-format: 1`, followed by `key: value`
lines. Keys may repeat (`row`, `factor`). Inline matrices are written as
`a, b; c, d`: entries separated by commas, rows by semicolons.
"""
from typing import Dict, List, Optional, Sequence, Tuple

from .complete import Completion
from .elem import BlockDecomposition, ElemFactor, ElemWord
from .matrix import Matrix
from .projmod import ComplementFrame, ProjModule, Trivialization, UmEpi
from .ring import RingSpec, ring_parse
from .witt import EquivCert

FORMAT_VERSION = 1
HEADER = f"# vaserstein-format: {FORMAT_VERSION}"


class Record:
    """Ordered key/value lines of one file."""

    def __init__(self, kind: str, fields: Optional[List[Tuple[str, str]]] = None):
        self.kind = kind
        self.fields: List[Tuple[str, str]] = list(fields or [])

    def add(self, key: str, value) -> 'Record':
        self.fields.append((key, str(value)))
        return self

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        for k, v in self.fields:
            if k == key:
                return v
        return default

    def require(self, key: str) -> str:
        value = self.get(key)
        if value is None:
            raise ValueError(f"{self.kind} record is missing '{key}'")
        return value

    def get_all(self, key: str) -> List[str]:
        return [v for k, v in self.fields if k == key]

    def dumps(self) -> str:
        lines = [HEADER, f"kind: {self.kind}"]
        lines += [f"{k}: {v}" for k, v in self.fields]
        return '\n'.join(lines) + '\n'


def parse_record(text: str, kind: Optional[str] = None) -> Record:
    """
    Raises:
        ValueError: missing header, unknown version, malformed line or wrong kind
    """
    lines = [line.rstrip() for line in text.splitlines()]
    lines = [line for line in lines if line.strip()]
    if not lines or not lines[0].startswith('# vaserstein-format:'):
        raise ValueError("missing format header '# vaserstein-format: <n>'")
    version = lines[0].split(':', 1)[1].strip()
    if version != str(FORMAT_VERSION):
        raise ValueError(f"unsupported format version {version}")
    fields = []
    for line in lines[1:]:
        if line.lstrip().startswith('#'):
            continue
        if ':' not in line:
            raise ValueError(f"malformed line: {line!r}")
        key, value = line.split(':', 1)
        fields.append((key.strip(), value.strip()))
    if not fields or fields[0][0] != 'kind':
        raise ValueError("record does not start with 'kind'")
    record = Record(fields[0][1], fields[1:])
    if kind is not None and record.kind != kind:
        raise ValueError(f"expected a {kind} record, got {record.kind}")
    return record


def format_entries(values: Sequence) -> str:
    return ', '.join(str(v) for v in values)


def parse_entries(ring: RingSpec, text: str) -> List:
    text = text.strip()
    if not text:
        return []
    return [ring(part) for part in text.split(',')]


def format_inline(M: Matrix) -> str:
    return '; '.join(format_entries(row) for row in M.to_rows())


def parse_inline(ring: RingSpec, text: str, shape: Optional[Tuple[int, int]] = None) -> Matrix:
    rows = [parse_entries(ring, part) for part in text.split(';')] if text.strip() else []
    cols = shape[1] if shape else (len(rows[0]) if rows else 0)
    M = Matrix.from_rows(ring, rows, cols=cols)
    if shape is not None and M.shape != tuple(shape):
        raise ValueError(f"matrix has shape {M.shape}, header says {tuple(shape)}")
    return M


def _shape(text: str) -> Tuple[int, int]:
    parts = text.split()
    if len(parts) != 2:
        raise ValueError(f"malformed shape: {text!r}")
    return int(parts[0]), int(parts[1])


def _ring_of(record: Record, ring: Optional[RingSpec]) -> RingSpec:
    declared = ring_parse(record.require('ring'))
    if ring is not None and declared != ring:
        raise ValueError(f"file declares ring {declared}, expected {ring}")
    return declared


# -- matrices -------------------------------------------------------------

def write_matrix(M: Matrix) -> str:
    record = Record('matrix').add('ring', M.ring).add('shape', f"{M.rows} {M.cols}")
    for row in M.to_rows():
        record.add('row', format_entries(row))
    return record.dumps()


def read_matrix(text: str, ring: Optional[RingSpec] = None) -> Matrix:
    record = parse_record(text, 'matrix')
    ring = _ring_of(record, ring)
    rows, cols = _shape(record.require('shape'))
    data = [parse_entries(ring, r) for r in record.get_all('row')]
    if len(data) != rows:
        raise ValueError(f"expected {rows} rows, found {len(data)}")
    return Matrix.from_rows(ring, data, cols=cols) if rows else Matrix.zeros(ring, 0, cols)


# -- words and certificates ------------------------------------------------

def _word_fields(record: Record, w: ElemWord) -> None:
    record.add('blocks', ' '.join(str(s) for s in w.decomp.sizes))
    if w.decomp.idempotent_block is not None:
        record.add('idempotent_block', w.decomp.idempotent_block)
        record.add('idempotent', format_inline(w.decomp.idempotent))
    for factor in w.factors:
        record.add('factor', f"{factor.target} {factor.source} | {format_inline(factor.coeff)}")


def _word_from(record: Record, ring: RingSpec) -> ElemWord:
    sizes = tuple(int(s) for s in record.require('blocks').split())
    block = record.get('idempotent_block')
    if block is not None:
        k = int(block)
        idem = parse_inline(ring, record.require('idempotent'), (sizes[k], sizes[k]))
        decomp = BlockDecomposition(sizes, k, idem)
    else:
        decomp = BlockDecomposition(sizes)
    factors = []
    for text in record.get_all('factor'):
        if '|' not in text:
            raise ValueError(f"malformed factor: {text!r}")
        head, coeff = text.split('|', 1)
        target, source = (int(x) for x in head.split())
        shape = (sizes[target], sizes[source])
        factors.append(ElemFactor(target, source, parse_inline(ring, coeff, shape)))
    return ElemWord(ring, decomp, factors)


def write_word(w: ElemWord) -> str:
    record = Record('word').add('ring', w.ring)
    _word_fields(record, w)
    return record.dumps()


def read_word(text: str, ring: Optional[RingSpec] = None) -> ElemWord:
    record = parse_record(text, 'word')
    return _word_from(record, _ring_of(record, ring))


def write_certificate(cert: EquivCert) -> str:
    record = Record('certificate').add('ring', cert.word.ring).add('stabilization', cert.stabilization)
    _word_fields(record, cert.word)
    return record.dumps()


def read_certificate(text: str, ring: Optional[RingSpec] = None) -> EquivCert:
    record = parse_record(text, 'certificate')
    ring = _ring_of(record, ring)
    return EquivCert(int(record.require('stabilization')), _word_from(record, ring))


# -- modules and epimorphisms ------------------------------------------------

def write_module(module: ProjModule, triv: Optional[Trivialization] = None) -> str:
    record = Record('module').add('ring', module.ring).add('ambient', module.ambient)
    record.add('rank', module.rank).add('idempotent', format_inline(module.idempotent))
    if module.frame is not None:
        record.add('frame_rank', module.frame.S.cols)
        record.add('frame_s', format_inline(module.frame.S))
        record.add('frame_c', format_inline(module.frame.C))
    if triv is not None:
        record.add('w', format_entries(triv.w.entries()))
        record.add('lambda', format_entries(triv.lam.entries()))
    return record.dumps()


def read_module(text: str, ring: Optional[RingSpec] = None) -> Tuple[ProjModule, Optional[Trivialization]]:
    record = parse_record(text, 'module')
    ring = _ring_of(record, ring)
    m = int(record.require('ambient'))
    idem = parse_inline(ring, record.require('idempotent'), (m, m))
    frame = None
    if record.get('frame_rank') is not None:
        k = int(record.require('frame_rank'))
        frame = ComplementFrame(parse_inline(ring, record.require('frame_s'), (m, k)),
                                parse_inline(ring, record.require('frame_c'), (k, m)))
    module = ProjModule(ring, idem, int(record.require('rank')), frame)
    triv = None
    if record.get('w') is not None:
        triv = Trivialization(Matrix.column(ring, parse_entries(ring, record.require('w'))),
                              Matrix.row(ring, parse_entries(ring, record.require('lambda'))))
        triv.check(module)
    return module, triv


def write_epi(epi: UmEpi) -> str:
    record = Record('epi').add('ring', epi.ring)
    record.add('a', format_entries(epi.a.entries())).add('s', format_entries(epi.s.entries()))
    return record.dumps()


def read_epi_data(text: str, ring: Optional[RingSpec] = None) -> Tuple[Matrix, Matrix]:
    """The (a, s) pair of an epi record; the module comes from elsewhere."""
    record = parse_record(text, 'epi')
    ring = _ring_of(record, ring)
    a = Matrix.row(ring, parse_entries(ring, record.require('a')))
    s = Matrix.column(ring, parse_entries(ring, record.require('s')))
    return a, s


# -- results ------------------------------------------------------------------

def write_symbol(g: Matrix, f: Matrix, pfaffian=None, embedded_size: Optional[int] = None) -> str:
    record = Record('symbol').add('ring', g.ring).add('shape', f"{g.rows} {g.cols}")
    record.add('g', format_inline(g)).add('f', format_inline(f))
    if pfaffian is not None:
        record.add('pfaffian', pfaffian)
    if embedded_size is not None:
        record.add('embedded_size', embedded_size)
    return record.dumps()


def read_symbol(text: str, ring: Optional[RingSpec] = None) -> Dict[str, object]:
    record = parse_record(text, 'symbol')
    ring = _ring_of(record, ring)
    shape = _shape(record.require('shape'))
    result: Dict[str, object] = {
        'g': parse_inline(ring, record.require('g'), shape),
        'f': parse_inline(ring, record.require('f'), shape),
    }
    if record.get('pfaffian') is not None:
        result['pfaffian'] = ring(record.require('pfaffian'))
    if record.get('embedded_size') is not None:
        result['embedded_size'] = int(record.require('embedded_size'))
    return result


def write_completion(c: Completion) -> str:
    M = c.matrix
    record = Record('completion').add('ring', M.ring).add('shape', f"{M.rows} {M.cols}")
    record.add('matrix', format_inline(M)).add('target', format_entries(c.target.entries()))
    return record.dumps()


def read_completion(text: str, ring: Optional[RingSpec] = None) -> Completion:
    record = parse_record(text, 'completion')
    ring = _ring_of(record, ring)
    M = parse_inline(ring, record.require('matrix'), _shape(record.require('shape')))
    return Completion(M, Matrix.row(ring, parse_entries(ring, record.require('target'))))
