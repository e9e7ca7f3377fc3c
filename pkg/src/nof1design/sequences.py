"""Treatment-sequence enumeration under the four randomization schemes.

Scheme definitions (two treatments, K periods):

* alternating  -- treatments alternate, first period at random (2 sequences).
* pairwise     -- each consecutive pair of periods is randomized to (1,0) or
  (0,1); for odd K the first K-1 periods form pairs and the last period is
  assigned at random.
* restricted   -- both treatments get the same number of periods (for odd K,
  counts differ by exactly one in either direction).
* unrestricted -- every period randomized independently.
* manual       -- investigator-supplied sequences.

Counts follow the closed forms: 2; 2^(K/2) (even) / 2^((K+1)/2) (odd);
C(K, K/2) (even) / 2*C(K, (K-1)/2) (odd); 2^K.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb

from .errors import ParameterError, SequenceFileError
from .model import Sequence

ALTERNATING = "alternating"
PAIRWISE = "pairwise"
RESTRICTED = "restricted"
UNRESTRICTED = "unrestricted"
MANUAL = "manual"

SCHEME_KINDS = (ALTERNATING, PAIRWISE, RESTRICTED, UNRESTRICTED, MANUAL)

# schemes that assign each treatment to the same number of periods, hence
# admit only even K in balanced design search
EVEN_K_SCHEMES = (ALTERNATING, PAIRWISE, RESTRICTED)


@dataclass(frozen=True)
class RandomizationScheme:
    kind: str = PAIRWISE
    manual_sequences: tuple[Sequence, ...] | None = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ParameterError(
                f"scheme kind must be one of {SCHEME_KINDS}, got {self.kind!r}",
                field="scheme.kind",
            )
        if self.kind == MANUAL:
            seqs = self.manual_sequences
            if not seqs:
                raise ParameterError(
                    "manual scheme requires at least one sequence", field="scheme.sequences"
                )
            seqs = tuple(s if isinstance(s, Sequence) else Sequence(tuple(s)) for s in seqs)
            if len(set(seqs)) != len(seqs):
                raise ParameterError(
                    "duplicate manual sequences are rejected (they would change "
                    "the sequence count I silently)",
                    field="scheme.sequences",
                )
            if len({s.n_periods for s in seqs}) != 1:
                raise ParameterError(
                    "manual sequences must all have the same length",
                    field="scheme.sequences",
                )
            object.__setattr__(self, "manual_sequences", seqs)
        elif self.manual_sequences is not None:
            raise ParameterError(
                f"manual_sequences only apply to the manual scheme, not {self.kind!r}",
                field="scheme.sequences",
            )

    @property
    def manual_length(self) -> int | None:
        if self.kind == MANUAL:
            return self.manual_sequences[0].n_periods
        return None


def count_sequences(scheme: RandomizationScheme, n_periods: int) -> int:
    """Closed-form number of sequences I for the scheme at K periods."""
    k = n_periods
    if k < 1:
        raise ParameterError(f"period count must be >= 1, got {k}", field="K")
    if scheme.kind == ALTERNATING:
        return 2
    if scheme.kind == PAIRWISE:
        return 2 ** ((k + 1) // 2) if k % 2 else 2 ** (k // 2)
    if scheme.kind == RESTRICTED:
        return 2 * comb(k, (k - 1) // 2) if k % 2 else comb(k, k // 2)
    if scheme.kind == UNRESTRICTED:
        return 2**k
    if scheme.manual_length != k:
        raise ParameterError(
            f"manual sequences have length {scheme.manual_length}, not K={k}",
            field="scheme.sequences",
        )
    return len(scheme.manual_sequences)


def enumerate_sequences(scheme: RandomizationScheme, n_periods: int) -> list[Sequence]:
    """Exhaustive duplicate-free sequence list in lexicographic order."""
    k = n_periods
    if k < 1:
        raise ParameterError(f"period count must be >= 1, got {k}", field="K")

    if scheme.kind == ALTERNATING:
        raw = {tuple((s + t) % 2 for t in range(k)) for s in (0, 1)}
    elif scheme.kind == PAIRWISE:
        blocks = product(*([((1, 0), (0, 1))] * (k // 2)))
        if k % 2:
            raw = {
                tuple(x for b in bs for x in b) + (last,)
                for bs in blocks
                for last in (0, 1)
            }
        else:
            raw = {tuple(x for b in bs for x in b) for bs in blocks}
    elif scheme.kind == RESTRICTED:
        targets = {k // 2, (k + 1) // 2} if k % 2 else {k // 2}
        raw = {s for s in product((0, 1), repeat=k) if sum(s) in targets}
    elif scheme.kind == UNRESTRICTED:
        raw = set(product((0, 1), repeat=k))
    else:
        if scheme.manual_length != k:
            raise ParameterError(
                f"manual sequences have length {scheme.manual_length}, not K={k}",
                field="scheme.sequences",
            )
        raw = {s.assignments for s in scheme.manual_sequences}

    return [Sequence(t) for t in sorted(raw)]


def parse_sequence_file(text: str) -> list[Sequence]:
    """Parse manual sequences: one per line, comma-separated 0/1 tokens.

    Blank lines are skipped and surrounding whitespace is ignored; all rows
    must share one length and duplicates are rejected.  Errors carry the
    1-based line number.
    """
    if not text.strip():
        raise SequenceFileError("sequence file is empty", line=1)
    seqs: list[Sequence] = []
    seen: dict[tuple[int, ...], int] = {}
    length = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = [t.strip() for t in line.split(",")]
        values = []
        for t in tokens:
            if t not in ("0", "1"):
                raise SequenceFileError(
                    f"line {lineno}: token {t!r} is not 0 or 1", line=lineno
                )
            values.append(int(t))
        tup = tuple(values)
        if length is None:
            length = len(tup)
        elif len(tup) != length:
            raise SequenceFileError(
                f"line {lineno}: sequence has {len(tup)} periods, expected {length}",
                line=lineno,
            )
        if tup in seen:
            raise SequenceFileError(
                f"line {lineno}: duplicate of line {seen[tup]}", line=lineno
            )
        seen[tup] = lineno
        seqs.append(Sequence(tup))
    return seqs
