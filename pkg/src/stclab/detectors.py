"""Maximum-likelihood block detection and trellis (Viterbi) decoding.

Both detectors assume receiver-side channel knowledge and score candidates
by the squared Euclidean distance ||r - C h||^2 of the received block from
the faded codematrix.  The trellis decoder runs add-compare-select over a
section trellis whose branches carry parallel codematrix labels (one coset
per branch); parallel transitions are resolved to the best label before the
compare step.  All tie-breaks are deterministic: smaller predecessor state,
then smaller label position.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import ChannelRealization
from .constellation import build_constellation, matrix_stack
from .expansion import Subconstellation

TRELLIS_FILE = "trellis8.txt"


@dataclass(frozen=True)
class DecodeResult:
    """Decided codematrix indices, accumulated metric, tie count."""

    decided_indices: tuple
    metric: float
    ties_broken: int


@dataclass(frozen=True)
class Transition:
    from_state: int
    to_state: int
    coset: int
    labels: tuple      # codematrix indices, uncoded-bit order


@dataclass(frozen=True, eq=False)
class TrellisSpec:
    """Validated section trellis.

    bits_per_section splits into coded bits (selecting the transition, in
    listing order per from-state) and uncoded bits (selecting the parallel
    label within the branch).
    """

    num_states: int
    bits_per_section: int
    transitions: tuple

    @property
    def labels_per_branch(self) -> int:
        return len(self.transitions[0].labels)

    @property
    def uncoded_bits(self) -> int:
        return int(np.log2(self.labels_per_branch))

    @property
    def coded_bits(self) -> int:
        return self.bits_per_section - self.uncoded_bits

    def outgoing(self, state: int) -> tuple:
        return self._outgoing[state]

    def __post_init__(self):
        out = [[] for _ in range(self.num_states)]
        for t in self.transitions:
            out[t.from_state].append(t)
        object.__setattr__(self, "_outgoing", tuple(tuple(ts) for ts in out))


def _validate_trellis(spec: TrellisSpec) -> None:
    entries = build_constellation()
    by_index = {e.index: e for e in entries}
    expect_out = 2 ** spec.coded_bits
    seen_labels = []
    for st in range(spec.num_states):
        outs = spec.outgoing(st)
        if len(outs) != expect_out:
            raise ValueError("state %d has %d outgoing transitions, expected %d"
                             % (st, len(outs), expect_out))
        tags = set()
        for t in outs:
            tags.update(by_index[i].subconstellation for i in t.labels)
        if len(tags) != 1:
            raise ValueError("state %d departs on a mix of subconstellations" % st)
    incoming_tags = {}
    for t in spec.transitions:
        if len(t.labels) != spec.labels_per_branch:
            raise ValueError("transition %d->%d has %d labels, expected %d"
                             % (t.from_state, t.to_state, len(t.labels),
                                spec.labels_per_branch))
        seen_labels.extend(t.labels)
        tagset = {by_index[i].subconstellation for i in t.labels}
        if len(tagset) != 1:
            raise ValueError("transition %d->%d mixes subconstellations"
                             % (t.from_state, t.to_state))
        incoming_tags.setdefault(t.to_state, set()).update(tagset)
        # coset id and label order cross-checked against the partition tables
        if spec.num_states == 8:
            for pos, idx in enumerate(t.labels):
                e = by_index[idx]
                if e.q8_coset != t.coset:
                    raise ValueError("transition %d->%d declares coset %d but "
                                     "label %d sits in q8 coset %d"
                                     % (t.from_state, t.to_state, t.coset, idx, e.q8_coset))
                if int(e.q8_bits, 2) != pos:
                    raise ValueError("transition %d->%d label %d out of "
                                     "uncoded-bit order" % (t.from_state, t.to_state, idx))
        elif spec.num_states == 16:
            for pos, idx in enumerate(t.labels):
                e = by_index[idx]
                if e.q16_coset != t.coset:
                    raise ValueError("transition %d->%d declares coset %d but "
                                     "label %d sits in q16 coset %d"
                                     % (t.from_state, t.to_state, t.coset, idx, e.q16_coset))
                if int(e.q16_bit, 2) != pos:
                    raise ValueError("transition %d->%d label %d out of "
                                     "uncoded-bit order" % (t.from_state, t.to_state, idx))
    for st, tags in incoming_tags.items():
        if len(tags) != 1:
            raise ValueError("state %d is entered on a mix of subconstellations" % st)
    if set(seen_labels) != set(range(32)):
        raise ValueError("branch labels cover %d of 32 codematrix indices"
                         % len(set(seen_labels)))


def load_trellis(text: str) -> TrellisSpec:
    """Parse and validate the trellis text format.

    Header ``states=<n> bits_per_section=<k>``, then one line per transition
    ``from to coset idx...``.  Raises ValueError with a line number on
    malformed input and rejects structurally inconsistent trellises.
    """
    body = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())
            if ln.strip() and not ln.strip().startswith("#")]
    if not body:
        raise ValueError("empty trellis file")
    head_no, head = body[0]
    fields = dict()
    for tok in head.split():
        if "=" not in tok:
            raise ValueError("line %d: header token %r is not key=value" % (head_no, tok))
        k, v = tok.split("=", 1)
        fields[k] = v
    try:
        num_states = int(fields["states"])
        bits = int(fields["bits_per_section"])
    except (KeyError, ValueError):
        raise ValueError("line %d: header must carry states=<n> "
                         "bits_per_section=<k>" % head_no) from None
    transitions = []
    n_labels = None
    for no, ln in body[1:]:
        parts = ln.split()
        if len(parts) < 4:
            raise ValueError("line %d: need 'from to coset idx...'" % no)
        try:
            frm, to, coset = int(parts[0]), int(parts[1]), int(parts[2])
            labels = tuple(int(x) for x in parts[3:])
        except ValueError:
            raise ValueError("line %d: non-integer field" % no) from None
        if not 0 <= frm < num_states or not 0 <= to < num_states:
            raise ValueError("line %d: state out of range 0..%d" % (no, num_states - 1))
        if any(not 0 <= i < 32 for i in labels):
            raise ValueError("line %d: label index out of range 0..31" % no)
        if n_labels is None:
            n_labels = len(labels)
            if n_labels & (n_labels - 1) or n_labels == 0:
                raise ValueError("line %d: label count must be a power of two" % no)
        elif len(labels) != n_labels:
            raise ValueError("line %d: expected %d labels" % (no, n_labels))
        transitions.append(Transition(frm, to, coset, labels))
    if not transitions:
        raise ValueError("trellis has no transitions")
    spec = TrellisSpec(num_states=num_states, bits_per_section=bits,
                       transitions=tuple(transitions))
    if spec.coded_bits < 0:
        raise ValueError("more parallel labels than bits_per_section allows")
    _validate_trellis(spec)
    return spec


@lru_cache(maxsize=None)
def default_trellis() -> TrellisSpec:
    """The shipped 8-state trellis (4 bits per section, q8 partition)."""
    text = importlib.resources.files("stclab.data").joinpath(TRELLIS_FILE).read_text()
    return load_trellis(text)


def block_metrics(received, ch: ChannelRealization,
                  candidate_matrices: np.ndarray) -> np.ndarray:
    """||r - C h||^2 for a stack of candidate codematrices."""
    r = np.asarray(received, dtype=np.complex128).reshape(-1)
    faded = candidate_matrices @ ch.h          # (M, T)
    return np.sum(np.abs(r[None, :] - faded) ** 2, axis=1)


def ml_block_decode(received, ch: ChannelRealization, candidates) -> DecodeResult:
    """Exhaustive ML decision over a candidate entry list.

    Ties go to the lowest codematrix index and are counted.
    """
    cand = list(candidates)
    if not cand:
        raise ValueError("candidate list must be nonempty")
    mats = np.stack([e.matrix for e in cand])
    metrics = block_metrics(received, ch, mats)
    best = float(np.min(metrics))
    hits = [cand[i].index for i in np.flatnonzero(metrics <= best)]
    ties = len(hits) - 1
    return DecodeResult(decided_indices=(min(hits),), metric=best,
                        ties_broken=ties)


def trellis_encode(spec: TrellisSpec, bits, initial_state: int = 0) -> list:
    """Map a bit sequence to codematrix indices along the trellis.

    Each section consumes bits_per_section bits, most significant first: the
    coded bits pick the outgoing transition in listing order, the uncoded
    bits pick the parallel label.
    """
    b = np.asarray(bits, dtype=np.int64).reshape(-1)
    if b.size % spec.bits_per_section != 0:
        raise ValueError("bit count %d is not a multiple of %d"
                         % (b.size, spec.bits_per_section))
    if not 0 <= initial_state < spec.num_states:
        raise ValueError("initial state out of range")
    if not np.all((b == 0) | (b == 1)):
        raise ValueError("bits must be 0 or 1")
    state = initial_state
    out = []
    for s in range(b.size // spec.bits_per_section):
        chunk = b[s * spec.bits_per_section:(s + 1) * spec.bits_per_section]
        coded = 0
        for bit in chunk[:spec.coded_bits]:
            coded = (coded << 1) | int(bit)
        uncoded = 0
        for bit in chunk[spec.coded_bits:]:
            uncoded = (uncoded << 1) | int(bit)
        t = spec.outgoing(state)[coded]
        out.append(t.labels[uncoded])
        state = t.to_state
    return out


@lru_cache(maxsize=None)
def _acs_tables(spec: TrellisSpec):
    """Flat transition arrays plus per-to-state grouping for the ACS sweep."""
    trans = spec.transitions
    from_arr = np.array([t.from_state for t in trans])
    label_rows = np.array([t.labels for t in trans])
    coded_arr = np.empty(len(trans), dtype=np.int64)
    pos_of = {id(t): k for k, t in enumerate(trans)}
    for st in range(spec.num_states):
        for coded, t in enumerate(spec.outgoing(st)):
            coded_arr[pos_of[id(t)]] = coded
    groups = []
    for st in range(spec.num_states):
        rows = [k for k, t in enumerate(trans) if t.to_state == st]
        rows.sort(key=lambda k: trans[k].from_state)
        groups.append(np.array(rows, dtype=np.int64))
    return from_arr, label_rows, coded_arr, groups


def viterbi_decode(spec: TrellisSpec, received_blocks, channels,
                   initial_state: int = 0):
    """ML sequence decision over the trellis; returns (DecodeResult, bits).

    received_blocks and channels are per-section sequences.  The start state
    is known to the decoder; the end state is free (best final metric).
    The returned metric equals the summed block metrics of the decided path.
    """
    blocks = list(received_blocks)
    chs = list(channels)
    if len(blocks) != len(chs):
        raise ValueError("got %d received blocks but %d channel realizations"
                         % (len(blocks), len(chs)))
    if not blocks:
        raise ValueError("at least one section is required")
    if not 0 <= initial_state < spec.num_states:
        raise ValueError("initial state out of range")
    all_mats = matrix_stack()
    from_arr, label_rows, coded_arr, groups = _acs_tables(spec)
    n_sections = len(blocks)
    n_trans = len(spec.transitions)
    arange_t = np.arange(n_trans)

    # faded candidates per distinct channel object; frames reuse one draw
    faded_cache = {}
    for ch in chs:
        if id(ch) not in faded_cache:
            faded_cache[id(ch)] = all_mats @ ch.h                # (32, T)

    uniform = len({g.size for g in groups}) == 1 and groups[0].size > 0
    group_mat = np.stack(groups) if uniform else None            # (states, indeg)
    arange_s = np.arange(spec.num_states)

    pm = np.full(spec.num_states, np.inf)
    pm[initial_state] = 0.0
    back = np.empty((n_sections, spec.num_states), dtype=np.int64)
    lab = np.empty((n_sections, spec.num_states), dtype=np.int64)
    ties = 0

    for s in range(n_sections):
        r = np.asarray(blocks[s], dtype=np.complex128).reshape(-1)
        dists = np.sum(np.abs(r[None, :] - faded_cache[id(chs[s])]) ** 2, axis=1)
        per_label = dists[label_rows]                            # (n_trans, L)
        best_pos = np.argmin(per_label, axis=1)
        branch = per_label[arange_t, best_pos]
        ties += int(np.sum(np.sum(per_label == branch[:, None], axis=1) > 1))
        cand = pm[from_arr] + branch
        if uniform:
            vals = cand[group_mat]                               # (states, indeg)
            k = np.argmin(vals, axis=1)     # first minimum: smaller from-state
            new_pm = vals[arange_s, k]
            rows = group_mat[arange_s, k]
            back[s] = rows
            lab[s] = best_pos[rows]
            finite = np.isfinite(new_pm)
            ties += int(np.sum((vals == new_pm[:, None]) & finite[:, None])
                        - np.sum(finite))
        else:
            new_pm = np.full(spec.num_states, np.inf)
            for st in range(spec.num_states):
                rows = groups[st]
                if rows.size == 0:
                    continue
                vals = cand[rows]
                k = int(np.argmin(vals))
                ties += int(np.sum(vals == vals[k]) - 1) if np.isfinite(vals[k]) else 0
                new_pm[st] = vals[k]
                back[s, st] = rows[k]
                lab[s, st] = best_pos[rows[k]]
        pm = new_pm

    end_state = int(np.argmin(pm))
    ties += int(np.sum(pm == pm[end_state]) - 1) if np.isfinite(pm[end_state]) else 0
    metric = float(pm[end_state])

    decided = []
    bits = []
    state = end_state
    for s in range(n_sections - 1, -1, -1):
        k = back[s, state]
        pos = int(lab[s, state])
        decided.append(int(label_rows[k, pos]))
        piece = []
        coded = int(coded_arr[k])
        for shift in range(spec.coded_bits - 1, -1, -1):
            piece.append((coded >> shift) & 1)
        for shift in range(spec.uncoded_bits - 1, -1, -1):
            piece.append((pos >> shift) & 1)
        bits.append(piece)
        state = int(from_arr[k])
    decided.reverse()
    bits.reverse()
    flat_bits = np.array([b for piece in bits for b in piece], dtype=np.int64)
    result = DecodeResult(decided_indices=tuple(decided), metric=metric,
                          ties_broken=ties)
    return result, flat_bits


def base_subconstellation_entries():
    """The 16 BASE entries, index order; candidate set for uncoded ML."""
    return [e for e in build_constellation()
            if e.subconstellation is Subconstellation.BASE]
